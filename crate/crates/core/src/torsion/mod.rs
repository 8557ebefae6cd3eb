//! Smith normal form, torsion in cellular cohomology, and the explicit
//! torsion and Betti number bounds.

pub mod bounds;
mod tower;

pub use bounds::*;
pub use tower::{Mag, TowerValue, EXPLICIT_BITS};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorsionError {
    #[error("boundary {index} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch { index: usize, expected: (usize, usize), found: (usize, usize) },
    #[error("not a chain complex: d_{index} d_{next} != 0", next = .index + 1)]
    NotAComplex { index: usize },
    #[error("triplet ({row}, {col}) outside a {rows}x{cols} matrix")]
    TripletOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("cohomology torsion in degree {0} disagrees with homology torsion in degree {0} - 1")]
    UniversalCoefficientMismatch(usize),
    #[error("simple mode needs d >= 2 and N >= 4")]
    ModeRequiresD2,
    #[error("invalid complex file: {0}")]
    Format(String),
}

/// Dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix { rows: rows.len(), cols, data: rows }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    /// Shape given explicitly so that empty matrices keep their size.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, i64)]) -> Result<Self, TorsionError> {
        let mut m = IntMatrix::zeros(rows, cols);
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(TorsionError::TripletOutOfRange { row: i, col: j, rows, cols });
            }
            m.data[i][j] += v;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn transpose(&self) -> Self {
        let data = (0..self.cols).map(|j| (0..self.rows).map(|i| self.data[i][j].clone()).collect()).collect();
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out.data[i][j] += &self.data[i][k] * &o.data[k][j];
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(|x| x.is_zero())
    }

    /// Entries all in `{-1, 0, 1}`.
    pub fn is_sign_matrix(&self) -> bool {
        self.data.iter().flatten().all(|x| x.magnitude() <= &BigUint::one())
    }
}

/// Nonzero invariant factors `d_0 | d_1 | ...`, all positive.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut t = 0;
    while t < r.min(c) {
        // pivot of least absolute value, first in row-major order
        let Some((pi, pj)) = min_abs(&a, t, r, t, c) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if !a[i][t].is_zero() {
                    let q = &a[i][t] / &a[t][t];
                    for j in t..c {
                        let v = &a[t][j] * &q;
                        a[i][j] -= v;
                    }
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..c {
                if !a[t][j].is_zero() {
                    let q = &a[t][j] / &a[t][t];
                    for i in t..r {
                        let v = &a[i][t] * &q;
                        a[i][j] -= v;
                    }
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                // a smaller remainder now sits in row or column t
                let mut best = (t, t);
                for i in t + 1..r {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..c {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            let p = a[t][t].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for j in t..c {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        t += 1;
    }
    (0..t).map(|i| a[i][i].abs()).collect()
}

fn min_abs(a: &[Vec<BigInt>], r0: usize, r: usize, c0: usize, c: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in r0..r {
        for j in c0..c {
            if a[i][j].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Big integers serialize as decimal strings.
pub(crate) mod dec {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn one<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn many<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn opt<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CokerTorsion {
    pub rank: usize,
    #[serde(serialize_with = "dec::one")]
    pub order: BigUint,
    /// Invariant factors greater than 1.
    #[serde(serialize_with = "dec::many")]
    pub invariants: Vec<BigUint>,
    /// `min(m!, n!)` when every entry is in `{-1, 0, 1}`.
    #[serde(serialize_with = "dec::opt")]
    pub lemma_bound: Option<BigUint>,
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// Torsion subgroup of `coker(M: Z^n -> Z^m)`.
pub fn torsion_of_coker(m: &IntMatrix) -> CokerTorsion {
    let snf = smith_normal_form(m);
    let invariants: Vec<BigUint> = snf.iter().map(|d| d.magnitude().clone()).filter(|d| !d.is_one()).collect();
    let order = invariants.iter().fold(BigUint::one(), |acc, d| acc * d);
    let lemma_bound = m.is_sign_matrix().then(|| factorial(m.rows.min(m.cols)));
    if let Some(b) = &lemma_bound {
        assert!(&order <= b, "torsion order {order} exceeds min(m!, n!) = {b}");
    }
    CokerTorsion { rank: snf.len(), order, invariants, lemma_bound }
}

/// Cellular chain complex; `boundaries[i]` is `d_{i+1}: C_{i+1} -> C_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    cells: Vec<usize>,
    boundaries: Vec<IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub betti: usize,
    #[serde(serialize_with = "dec::many")]
    pub torsion: Vec<BigUint>,
}

impl CellComplex {
    pub fn new(cells: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, TorsionError> {
        let mut boundaries = boundaries;
        while boundaries.len() + 1 < cells.len() {
            let i = boundaries.len();
            boundaries.push(IntMatrix::zeros(cells[i], cells[i + 1]));
        }
        for (i, d) in boundaries.iter().enumerate() {
            let expected = (cells.get(i).copied().unwrap_or(0), cells.get(i + 1).copied().unwrap_or(0));
            if (d.rows, d.cols) != expected {
                return Err(TorsionError::ShapeMismatch { index: i + 1, expected, found: (d.rows, d.cols) });
            }
        }
        for i in 1..boundaries.len() {
            if !boundaries[i - 1].mul(&boundaries[i]).is_zero() {
                return Err(TorsionError::NotAComplex { index: i });
            }
        }
        Ok(CellComplex { cells, boundaries })
    }

    pub fn dim(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// `d_i`, or an empty map outside the complex.
    fn boundary(&self, i: usize) -> IntMatrix {
        if i == 0 || i > self.boundaries.len() {
            let rows = if i == 0 { 0 } else { self.cells.get(i - 1).copied().unwrap_or(0) };
            return IntMatrix::zeros(rows, self.cells.get(i).copied().unwrap_or(0));
        }
        self.boundaries[i - 1].clone()
    }

    /// `H_i(K; Z)`.
    pub fn homology(&self, i: usize) -> CohomologyGroup {
        let n = self.cells.get(i).copied().unwrap_or(0);
        let rank_out = smith_normal_form(&self.boundary(i)).len();
        let into = torsion_of_coker(&self.boundary(i + 1));
        CohomologyGroup { degree: i, betti: n - rank_out - into.rank, torsion: into.invariants }
    }

    /// `H^i(K; Z)` from the cochain complex `delta^{i-1} = d_i^T`, checked
    /// against `H_{i-1}` torsion.
    pub fn cohomology(&self, i: usize) -> Result<CohomologyGroup, TorsionError> {
        let n = self.cells.get(i).copied().unwrap_or(0);
        let delta_in = self.boundary(i).transpose();
        let delta_out = self.boundary(i + 1).transpose();
        let rank_out = smith_normal_form(&delta_out).len();
        let coker = torsion_of_coker(&delta_in);
        let group = CohomologyGroup { degree: i, betti: n - rank_out - coker.rank, torsion: coker.invariants };
        let homology_torsion = if i == 0 { Vec::new() } else { self.homology(i - 1).torsion };
        if homology_torsion != group.torsion {
            return Err(TorsionError::UniversalCoefficientMismatch(i));
        }
        Ok(group)
    }

    /// Orders of all cohomology torsion subgroups.
    pub fn torsion_orders(&self) -> Result<Vec<BigUint>, TorsionError> {
        (0..=self.dim())
            .map(|i| Ok(self.cohomology(i)?.torsion.iter().fold(BigUint::one(), |a, d| a * d)))
            .collect()
    }
}

pub fn cohomology_torsion(k: &CellComplex, i: usize) -> Result<CohomologyGroup, TorsionError> {
    k.cohomology(i)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(usize, usize, i64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexFile {
    pub cells: Vec<usize>,
    pub boundaries: Vec<MatrixJson>,
}

impl ComplexFile {
    pub fn to_complex(&self) -> Result<CellComplex, TorsionError> {
        let b = self
            .boundaries
            .iter()
            .map(|m| IntMatrix::from_triplets(m.rows, m.cols, &m.triplets))
            .collect::<Result<_, _>>()?;
        CellComplex::new(self.cells.clone(), b)
    }
}

pub fn parse_complex(json: &str) -> Result<CellComplex, TorsionError> {
    let f: ComplexFile = serde_json::from_str(json).map_err(|e| TorsionError::Format(e.to_string()))?;
    f.to_complex()
}

/// Bundled fixtures: minimal CW structures.
pub mod fixtures {
    use super::*;

    /// One cell in each dimension 0, 1, 2 with `d_2 = [2]`.
    pub fn real_projective_plane() -> CellComplex {
        CellComplex::new(vec![1, 1, 1], vec![IntMatrix::from_i64(&[&[0]]), IntMatrix::from_i64(&[&[2]])]).unwrap()
    }

    /// Word `a b a b^{-1}`.
    pub fn klein_bottle() -> CellComplex {
        CellComplex::new(vec![1, 2, 1], vec![IntMatrix::from_i64(&[&[0, 0]]), IntMatrix::from_i64(&[&[2], &[0]])])
            .unwrap()
    }

    /// Disc attached along a loop of degree `n`.
    pub fn moore_space(n: i64) -> CellComplex {
        CellComplex::new(vec![1, 1, 1], vec![IntMatrix::from_i64(&[&[0]]), IntMatrix::from_i64(&[&[n]])]).unwrap()
    }

    pub fn sphere2() -> CellComplex {
        CellComplex::new(vec![1, 0, 1], vec![]).unwrap()
    }

    pub fn torus() -> CellComplex {
        CellComplex::new(vec![1, 2, 1], vec![IntMatrix::from_i64(&[&[0, 0]]), IntMatrix::from_i64(&[&[0], &[0]])])
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn det(m: &[Vec<BigInt>]) -> BigInt {
        if m.is_empty() {
            return BigInt::one();
        }
        let n = m.len();
        let mut acc = BigInt::zero();
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
            let term = &m[0][j] * det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    /// Product of the first k invariant factors = gcd of k x k minors.
    fn minor_gcd(m: &IntMatrix, k: usize) -> BigInt {
        let mut g = BigInt::zero();
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let sub: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| m.get(i, j).clone()).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        g
    }

    #[test]
    fn spec_examples() {
        assert_eq!(smith_normal_form(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]])), ints(&[1, 6]));
        assert_eq!(smith_normal_form(&IntMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])), ints(&[1, 1, 1]));
        assert!(smith_normal_form(&IntMatrix::zeros(3, 2)).is_empty());
        let t = torsion_of_coker(&IntMatrix::from_i64(&[&[1, 1], &[1, -1]]));
        assert_eq!(t.order, BigUint::from(2u32));
        assert_eq!(t.invariants, vec![BigUint::from(2u32)]);
        assert_eq!(t.lemma_bound, Some(BigUint::from(2u32)));
        let u = torsion_of_coker(&IntMatrix::from_i64(&[&[2, 1], &[1, 1]]));
        assert_eq!(u.order, BigUint::one());
    }

    #[test]
    fn fixture_cohomology() {
        use fixtures::*;
        let rp2 = real_projective_plane();
        assert_eq!(rp2.cohomology(2).unwrap().torsion, vec![BigUint::from(2u32)]);
        assert_eq!(rp2.cohomology(1).unwrap(), CohomologyGroup { degree: 1, betti: 0, torsion: vec![] });
        assert_eq!(rp2.cohomology(0).unwrap().betti, 1);
        let kb = klein_bottle();
        assert_eq!(kb.cohomology(1).unwrap(), CohomologyGroup { degree: 1, betti: 1, torsion: vec![] });
        assert_eq!(kb.cohomology(2).unwrap().torsion, vec![BigUint::from(2u32)]);
        assert_eq!(kb.homology(1).torsion, vec![BigUint::from(2u32)]);
        assert_eq!(moore_space(3).cohomology(2).unwrap().torsion, vec![BigUint::from(3u32)]);
        let s2 = sphere2();
        for i in 0..=2 {
            assert!(s2.cohomology(i).unwrap().torsion.is_empty());
        }
        assert_eq!(s2.cohomology(2).unwrap().betti, 1);
        assert_eq!(torus().cohomology(1).unwrap().betti, 2);
    }

    #[test]
    fn rejects_non_complexes() {
        let d1 = IntMatrix::from_i64(&[&[1]]);
        let d2 = IntMatrix::from_i64(&[&[1]]);
        assert_eq!(CellComplex::new(vec![1, 1, 1], vec![d1, d2]), Err(TorsionError::NotAComplex { index: 1 }));
        let bad = r#"{"cells":[1,1],"boundaries":[{"rows":1,"cols":1,"triplets":[[0,3,1]]}]}"#;
        assert!(matches!(parse_complex(bad), Err(TorsionError::TripletOutOfRange { .. })));
    }

    #[test]
    fn complex_file() {
        let json = r#"{"cells":[1,1,1],"boundaries":[{"rows":1,"cols":1,"triplets":[]},{"rows":1,"cols":1,"triplets":[[0,0,2]]}]}"#;
        assert_eq!(parse_complex(json).unwrap(), fixtures::real_projective_plane());
    }

    #[test]
    fn random_sign_matrices_respect_the_factorial_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(m, n) in &[(4usize, 6usize), (5, 5), (6, 3), (5, 7)] {
            for _ in 0..1000 {
                let rows = (0..m).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-1i64..=1))).collect()).collect();
                let t = torsion_of_coker(&IntMatrix::from_rows(rows));
                assert!(t.order <= t.lemma_bound.unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn snf_matches_minor_gcds(m in 1usize..=4, n in 1usize..=4, entries in prop::collection::vec(-9i64..=9, 16)) {
            let rows: Vec<Vec<BigInt>> = (0..m).map(|i| (0..n).map(|j| BigInt::from(entries[i * 4 + j])).collect()).collect();
            let mat = IntMatrix::from_rows(rows);
            let d = smith_normal_form(&mat);
            for w in d.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            let mut prod = BigInt::one();
            for (k, dk) in d.iter().enumerate() {
                prop_assert!(dk.is_positive());
                prod *= dk;
                prop_assert_eq!(&prod, &minor_gcd(&mat, k + 1));
            }
            if d.len() < m.min(n) {
                prop_assert!(minor_gcd(&mat, d.len() + 1).is_zero());
            }
        }
    }
}
