//! Reflections, spinor norms and the index-two subgroups of `O(q)`.

use serde::Serialize;

use super::matrix::{bilinear, invmod, is_square, mulmod, MatModL};
use super::{preserves, GroupError, GroupSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SquareClass {
    Square,
    NonSquare,
}

impl SquareClass {
    pub fn of(a: u64, ell: u64) -> Self {
        if is_square(a, ell) {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        }
    }
    pub fn times(self, o: Self) -> Self {
        if self == o {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        }
    }
    /// `1` or `-1`.
    pub fn sign(self) -> i8 {
        match self {
            SquareClass::Square => 1,
            SquareClass::NonSquare => -1,
        }
    }
}

/// `r_v(x) = x - 2 B(x, v) / Q(v) v`, `Q(v) = B(v, v) = v^T G v`.
pub fn reflection(v: &[u64], spec: &GroupSpec) -> Result<MatModL, GroupError> {
    if spec.family.is_symplectic() {
        return Err(super::GroupError::FormMismatch);
    }
    reflection_in(&spec.form, v)
}

fn reflection_in(g: &MatModL, v: &[u64]) -> Result<MatModL, GroupError> {
    let (ell, s) = (g.ell, g.s);
    if v.len() != s {
        return Err(GroupError::SizeMismatch { expected: s, found: v.len() });
    }
    if v.iter().all(|&x| x % ell == 0) {
        return Err(GroupError::ZeroVector);
    }
    let q = bilinear(g, v, v);
    let Some(qi) = invmod(q, ell) else { return Err(GroupError::Isotropic) };
    let c = mulmod(2, qi, ell);
    let gv = g.apply(v);
    let mut m = MatModL::identity(ell, s);
    for i in 0..s {
        for j in 0..s {
            let d = mulmod(c, mulmod(v[i] % ell, gv[j], ell), ell);
            m.set(i, j, (m.get(i, j) + ell - d) % ell);
        }
    }
    Ok(m)
}

/// Vectors `w_1, ..., w_k` with `M = r_(w_1) ... r_(w_k)`.
pub fn reflection_factorization(m: &MatModL, spec: &GroupSpec) -> Result<Vec<Vec<u64>>, GroupError> {
    if spec.ell == 2 {
        return Err(GroupError::CharTwo);
    }
    if preserves(spec, m)? != Some(1) || spec.family.is_symplectic() {
        return Err(GroupError::NotIsometry);
    }
    let g = &spec.form;
    let (ell, s) = (g.ell, g.s);
    let sub = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).map(|(x, y)| (x + ell - y) % ell).collect() };
    let add = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).map(|(x, y)| (x + y) % ell).collect() };
    // fix an orthogonal basis x_1, x_2, ... one vector at a time: with
    // y = cur x, one of x - y, x + y is non-isotropic since their norms sum
    // to 4 Q(x); r_(x-y), or r_x r_(x+y), sends y back to x
    let mut cur = m.clone();
    let mut ws: Vec<Vec<u64>> = Vec::new();
    let mut chosen: Vec<Vec<u64>> = Vec::new();
    for _ in 0..s {
        let x = non_isotropic_in_complement(g, &chosen).ok_or(GroupError::DegenerateForm)?;
        let y = cur.apply(&x);
        let mut step = Vec::new();
        if y != x {
            let d = sub(&x, &y);
            if bilinear(g, &d, &d) != 0 {
                step.push(d);
            } else {
                step.push(add(&x, &y));
                step.push(x.clone());
            }
        }
        for w in step {
            cur = reflection_in(g, &w)?.mul(&cur);
            ws.push(w);
        }
        debug_assert_eq!(cur.apply(&x), x);
        chosen.push(x);
    }
    debug_assert!(cur.is_identity());
    Ok(ws)
}

/// A vector `v` orthogonal to every vector in `xs` with `Q(v) != 0`.
fn non_isotropic_in_complement(g: &MatModL, xs: &[Vec<u64>]) -> Option<Vec<u64>> {
    let (ell, s) = (g.ell, g.s);
    let mut rows = MatModL::zeros(ell, s);
    for (i, x) in xs.iter().enumerate() {
        let gx = g.apply(x);
        for j in 0..s {
            rows.set(i, j, gx[j]);
        }
    }
    let basis = rows.kernel();
    let mut cands = basis.clone();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            cands.push(basis[i].iter().zip(&basis[j]).map(|(a, b)| (a + b) % ell).collect());
        }
    }
    cands.into_iter().find(|v| bilinear(g, v, v) != 0)
}

/// Spinor norm as a square class: `prod Q(w_i)` over a reflection
/// factorization.
pub fn spinor_norm(m: &MatModL, spec: &GroupSpec) -> Result<SquareClass, GroupError> {
    let ws = reflection_factorization(m, spec)?;
    let p = ws.iter().fold(1, |acc, w| mulmod(acc, bilinear(&spec.form, w, w), spec.ell));
    Ok(SquareClass::of(p, spec.ell))
}

fn det_sign(m: &MatModL) -> i8 {
    if m.det() == 1 {
        1
    } else {
        -1
    }
}

/// Which index-at-most-two subgroup of `O(q)` contains the generated group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrthClass {
    /// Inside the kernel of the spinor norm.
    A,
    /// Inside the kernel of spinor norm times determinant (as signs), not
    /// inside the spinor kernel.
    B,
    C,
}

pub fn classify_orth_subgroup(gens: &[MatModL], spec: &GroupSpec) -> Result<OrthClass, GroupError> {
    let mut all_spinor = true;
    let mut all_product = true;
    for g in gens {
        let theta = spinor_norm(g, spec)?.sign();
        all_spinor &= theta == 1;
        all_product &= theta * det_sign(g) == 1;
    }
    Ok(if all_spinor {
        OrthClass::A
    } else if all_product {
        OrthClass::B
    } else {
        OrthClass::C
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{enumerate_group, sample_group, Family, FormChoice};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Spinor norm from the form `[(1 - M)u, y] = B(u, y)` on `W = im(1 - M)`:
    /// its determinant times `2^(dim W)`.
    fn wall_norm(m: &MatModL, spec: &GroupSpec) -> SquareClass {
        let (ell, s) = (spec.ell, spec.s);
        let one_minus = MatModL::identity(ell, s).sub(m);
        // pick preimages u_i with (1 - M)u_i independent
        let mut us: Vec<Vec<u64>> = Vec::new();
        let mut ws: Vec<Vec<u64>> = Vec::new();
        let rank = one_minus.rank();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        while ws.len() < rank {
            let u: Vec<u64> = (0..s).map(|_| rng.gen_range(0..ell)).collect();
            let w = one_minus.apply(&u);
            let mut cand = ws.clone();
            cand.push(w.clone());
            let mut mat = MatModL::zeros(ell, s);
            for (j, c) in cand.iter().enumerate() {
                for i in 0..s {
                    mat.set(i, j, c[i]);
                }
            }
            if mat.rank() == cand.len() {
                ws.push(w);
                us.push(u);
            }
        }
        let k = ws.len();
        let mut gram = MatModL::zeros(ell, k);
        for i in 0..k {
            for j in 0..k {
                gram.set(i, j, bilinear(&spec.form, &us[i], &ws[j]));
            }
        }
        let two_k = (0..k).fold(1, |acc, _| mulmod(acc, 2, ell));
        let d = if k == 0 { 1 } else { gram.det() };
        SquareClass::of(mulmod(d, two_k, ell), ell)
    }

    #[test]
    fn reflection_norm_is_q() {
        let spec = GroupSpec::new(Family::O, 3, 5).unwrap();
        for v in [[1u64, 0, 0], [1, 1, 0], [2, 1, 1], [1, 1, 1]] {
            let r = reflection(&v, &spec).unwrap();
            assert!(r.mul(&r).is_identity());
            assert_eq!(preserves(&spec, &r).unwrap(), Some(1));
            assert_eq!(spinor_norm(&r, &spec).unwrap(), SquareClass::of(bilinear(&spec.form, &v, &v), 5));
        }
        assert_eq!(spinor_norm(&MatModL::identity(5, 3), &spec).unwrap(), SquareClass::Square);
        let split = GroupSpec::new(Family::O, 2, 5).unwrap();
        assert_eq!(reflection(&[1, 0], &split), Err(GroupError::Isotropic));
    }

    #[test]
    fn minus_identity_in_split_o2() {
        let spec = GroupSpec::new(Family::O, 2, 5).unwrap();
        let m = MatModL::scalar(5, 2, 4);
        let ws = reflection_factorization(&m, &spec).unwrap();
        assert_eq!(ws.len(), 2);
        let prod = ws.iter().fold(MatModL::identity(5, 2), |acc, w| acc.mul(&reflection(w, &spec).unwrap()));
        assert_eq!(prod, m);
        assert_eq!(spinor_norm(&m, &spec).unwrap(), wall_norm(&m, &spec));
    }

    #[test]
    fn spinor_matches_wall_form_everywhere() {
        for spec in [
            GroupSpec::new(Family::O, 3, 5).unwrap(),
            GroupSpec::new(Family::O, 2, 7).unwrap(),
            GroupSpec::with_form(Family::O, 2, 7, FormChoice::Diagonal(3)).unwrap(),
            GroupSpec::new(Family::O, 4, 3).unwrap(),
        ] {
            for m in enumerate_group(&spec).unwrap().iter().step_by(3) {
                let ws = reflection_factorization(m, &spec).unwrap();
                assert!(ws.len() <= 2 * spec.s);
                let prod = ws.iter().fold(MatModL::identity(spec.ell, spec.s), |acc, w| acc.mul(&reflection(w, &spec).unwrap()));
                assert_eq!(&prod, m);
                assert_eq!(spinor_norm(m, &spec).unwrap(), wall_norm(m, &spec), "{m:?}");
            }
        }
    }

    #[test]
    fn spinor_norm_is_a_homomorphism() {
        let spec = GroupSpec::new(Family::O, 3, 5).unwrap();
        for seed in 0..100 {
            let a = sample_group(&spec, 1, 2 * seed).unwrap();
            let b = sample_group(&spec, 1, 2 * seed + 1).unwrap();
            let ab = a.mul(&b);
            assert_eq!(spinor_norm(&ab, &spec).unwrap(), spinor_norm(&a, &spec).unwrap().times(spinor_norm(&b, &spec).unwrap()));
        }
    }

    #[test]
    fn classification() {
        let spec = GroupSpec::new(Family::O, 3, 5).unwrap();
        let id = MatModL::identity(5, 3);
        assert_eq!(classify_orth_subgroup(&[id.clone()], &spec).unwrap(), OrthClass::A);
        // Q(e_1) = 1 square, Q(e_1 + e_2 + 2e_3)... pick by norm
        let sq = reflection(&[1, 0, 0], &spec).unwrap();
        assert_eq!(classify_orth_subgroup(&[sq.clone()], &spec).unwrap(), OrthClass::A);
        let ns_v = [1u64, 1, 0]; // Q = 2, a nonsquare mod 5
        let ns = reflection(&ns_v, &spec).unwrap();
        assert_eq!(classify_orth_subgroup(&[ns.clone()], &spec).unwrap(), OrthClass::B);
        assert_eq!(classify_orth_subgroup(&[sq, ns], &spec).unwrap(), OrthClass::C);
        let sym = crate::groups::Family::Sp;
        let bad = GroupSpec::new(sym, 2, 5).unwrap();
        assert_eq!(reflection(&[1, 0], &bad), Err(GroupError::FormMismatch));
        let not_iso = MatModL::scalar(5, 3, 2);
        assert_eq!(spinor_norm(&not_iso, &spec), Err(GroupError::NotIsometry));
    }
}
