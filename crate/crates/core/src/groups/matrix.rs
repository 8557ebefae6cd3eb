use std::fmt;

use serde::{Deserialize, Serialize};

use super::GroupError;

/// Square matrix over `F_l`, row-major, entries in `[0, l)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatModL {
    pub ell: u64,
    pub s: usize,
    pub a: Vec<u64>,
}

impl fmt::Debug for MatModL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u64]> = self.a.chunks(self.s.max(1)).collect();
        write!(f, "{rows:?} mod {}", self.ell)
    }
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, ell: u64) -> u64 {
    a * b % ell
}

pub(crate) fn powmod(mut a: u64, mut e: u64, ell: u64) -> u64 {
    let mut r = 1 % ell;
    a %= ell;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, ell);
        }
        a = mulmod(a, a, ell);
        e >>= 1;
    }
    r
}

pub(crate) fn invmod(a: u64, ell: u64) -> Option<u64> {
    (a % ell != 0).then(|| powmod(a, ell - 2, ell))
}

pub(crate) fn is_square(a: u64, ell: u64) -> bool {
    let a = a % ell;
    a == 0 || powmod(a, (ell - 1) / 2, ell) == 1
}

pub(crate) fn smallest_nonsquare(ell: u64) -> u64 {
    (2..ell).find(|&a| !is_square(a, ell)).unwrap()
}

impl MatModL {
    pub fn zeros(ell: u64, s: usize) -> Self {
        MatModL { ell, s, a: vec![0; s * s] }
    }

    pub fn identity(ell: u64, s: usize) -> Self {
        Self::scalar(ell, s, 1)
    }

    pub fn scalar(ell: u64, s: usize, c: u64) -> Self {
        let mut m = Self::zeros(ell, s);
        for i in 0..s {
            m.a[i * s + i] = c % ell;
        }
        m
    }

    pub fn from_rows(ell: u64, rows: &[&[i64]]) -> Result<Self, GroupError> {
        let s = rows.len();
        let mut a = Vec::with_capacity(s * s);
        for r in rows {
            if r.len() != s {
                return Err(GroupError::SizeMismatch { expected: s, found: r.len() });
            }
            a.extend(r.iter().map(|&x| x.rem_euclid(ell as i64) as u64));
        }
        Ok(MatModL { ell, s, a })
    }

    pub fn from_vec(ell: u64, s: usize, a: Vec<u64>) -> Result<Self, GroupError> {
        if a.len() != s * s {
            return Err(GroupError::SizeMismatch { expected: s * s, found: a.len() });
        }
        Ok(MatModL { ell, s, a: a.into_iter().map(|x| x % ell).collect() })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.s + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.a[i * self.s + j] = v % self.ell;
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!((self.s, self.ell), (o.s, o.ell));
        let (s, ell) = (self.s, self.ell);
        let mut a = vec![0u64; s * s];
        for i in 0..s {
            for k in 0..s {
                let x = self.a[i * s + k];
                if x == 0 {
                    continue;
                }
                for j in 0..s {
                    a[i * s + j] = (a[i * s + j] + x * o.a[k * s + j]) % ell;
                }
            }
        }
        MatModL { ell, s, a }
    }

    pub fn transpose(&self) -> Self {
        let s = self.s;
        let mut a = vec![0; s * s];
        for i in 0..s {
            for j in 0..s {
                a[j * s + i] = self.a[i * s + j];
            }
        }
        MatModL { ell: self.ell, s, a }
    }

    pub fn add(&self, o: &Self) -> Self {
        let a = self.a.iter().zip(&o.a).map(|(x, y)| (x + y) % self.ell).collect();
        MatModL { ell: self.ell, s: self.s, a }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let a = self.a.iter().zip(&o.a).map(|(x, y)| (x + self.ell - y) % self.ell).collect();
        MatModL { ell: self.ell, s: self.s, a }
    }

    pub fn scale(&self, c: u64) -> Self {
        let a = self.a.iter().map(|x| mulmod(*x, c % self.ell, self.ell)).collect();
        MatModL { ell: self.ell, s: self.s, a }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        (0..self.s).map(|i| (0..self.s).fold(0, |acc, j| (acc + self.get(i, j) * v[j]) % self.ell)).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.s).all(|i| (0..self.s).all(|j| self.get(i, j) == (i == j) as u64))
    }

    /// Row echelon form; returns the rank and the determinant (0 when
    /// singular).
    fn eliminate(&self) -> (usize, u64, Vec<Vec<u64>>) {
        let (s, ell) = (self.s, self.ell);
        let mut m: Vec<Vec<u64>> = self.a.chunks(s.max(1)).map(|r| r.to_vec()).collect();
        if s == 0 {
            return (0, 1, m);
        }
        let mut det = 1u64;
        let mut r = 0;
        for c in 0..s {
            let Some(p) = (r..s).find(|&i| m[i][c] != 0) else {
                det = 0;
                continue;
            };
            if p != r {
                m.swap(p, r);
                det = (ell - det) % ell;
            }
            det = mulmod(det, m[r][c], ell);
            let inv = invmod(m[r][c], ell).unwrap();
            for i in r + 1..s {
                let f = mulmod(m[i][c], inv, ell);
                if f == 0 {
                    continue;
                }
                for j in c..s {
                    m[i][j] = (m[i][j] + ell - mulmod(f, m[r][j], ell)) % ell;
                }
            }
            r += 1;
        }
        (r, det, m)
    }

    pub fn det(&self) -> u64 {
        self.eliminate().1
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    pub fn inverse(&self) -> Option<Self> {
        let (s, ell) = (self.s, self.ell);
        let mut m: Vec<Vec<u64>> = (0..s)
            .map(|i| {
                let mut row = self.a[i * s..(i + 1) * s].to_vec();
                row.extend((0..s).map(|j| (i == j) as u64));
                row
            })
            .collect();
        for c in 0..s {
            let p = (c..s).find(|&i| m[i][c] != 0)?;
            m.swap(p, c);
            let inv = invmod(m[c][c], ell).unwrap();
            for x in m[c].iter_mut() {
                *x = mulmod(*x, inv, ell);
            }
            for i in 0..s {
                if i != c && m[i][c] != 0 {
                    let f = m[i][c];
                    for j in 0..2 * s {
                        m[i][j] = (m[i][j] + ell - mulmod(f, m[c][j], ell)) % ell;
                    }
                }
            }
        }
        let a = m.into_iter().flat_map(|r| r[s..].to_vec()).collect();
        Some(MatModL { ell, s, a })
    }

    /// Basis of the null space.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let (s, ell) = (self.s, self.ell);
        let (_, _, mut m) = self.eliminate();
        // reduce to row echelon with unit pivots, then back-substitute
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..s {
            if r < s && m[r][c] != 0 {
                let inv = invmod(m[r][c], ell).unwrap();
                for x in m[r].iter_mut() {
                    *x = mulmod(*x, inv, ell);
                }
                for i in 0..s {
                    if i != r && m[i][c] != 0 {
                        let f = m[i][c];
                        for j in 0..s {
                            m[i][j] = (m[i][j] + ell - mulmod(f, m[r][j], ell)) % ell;
                        }
                    }
                }
                pivots.push(c);
                r += 1;
            }
        }
        (0..s)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![0u64; s];
                v[free] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = (ell - m[row][free]) % ell;
                }
                v
            })
            .collect()
    }

    /// Basis of the column space.
    pub fn column_space(&self) -> Vec<Vec<u64>> {
        let t = self.transpose();
        let (_, _, m) = t.eliminate();
        m.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect()
    }
}

/// `x^T G y`.
pub fn bilinear(g: &MatModL, x: &[u64], y: &[u64]) -> u64 {
    let gy = g.apply(y);
    x.iter().zip(&gy).fold(0, |acc, (a, b)| (acc + a * b) % g.ell)
}

/// Multiplier `lambda` with `M^T G M = lambda G`, from flat slices; no
/// allocation for `s <= 4`.
pub(crate) fn multiplier_raw(ell: u64, s: usize, g: &[u64], m: &[u64]) -> Option<u64> {
    debug_assert!(s <= 4);
    let mut gm = [0u64; 16];
    for i in 0..s {
        for j in 0..s {
            // l < 2^31: four products stay below 2^64
            let mut acc = 0;
            for k in 0..s {
                acc += g[i * s + k] * m[k * s + j];
            }
            gm[i * s + j] = acc % ell;
        }
    }
    let mut lambda = None;
    for i in 0..s {
        for j in 0..s {
            let mut acc = 0;
            for k in 0..s {
                acc += m[k * s + i] * gm[k * s + j];
            }
            let y = acc % ell;
            let gij = g[i * s + j];
            match lambda {
                None if gij != 0 => {
                    let l = mulmod(y, invmod(gij, ell).unwrap(), ell);
                    if l == 0 {
                        return None;
                    }
                    lambda = Some(l);
                }
                None => {
                    if y != 0 {
                        return None;
                    }
                }
                Some(l) => {
                    if y != mulmod(l, gij, ell) {
                        return None;
                    }
                }
            }
        }
    }
    // entries visited before the first nonzero of G were checked against 0
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_inverse_rank() {
        let m = MatModL::from_rows(7, &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(m.det(), (4 - 6i64).rem_euclid(7) as u64);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let sing = MatModL::from_rows(5, &[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(sing.det(), 0);
        assert_eq!(sing.rank(), 1);
        assert!(sing.inverse().is_none());
        assert_eq!(sing.column_space().len(), 1);
        let k = sing.kernel();
        assert_eq!(k.len(), 1);
        assert_eq!(sing.apply(&k[0]), vec![0, 0]);
    }

    #[test]
    fn quadratic_residues() {
        assert!(is_square(4, 7) && is_square(2, 7) && !is_square(3, 7));
        assert_eq!(smallest_nonsquare(7), 3);
        assert_eq!(smallest_nonsquare(3), 2);
        assert_eq!(invmod(3, 7), Some(5));
    }
}
