//! Bilinear forms over `F_l`: defaults, normal forms and similitudes with a
//! prescribed multiplier.

use super::matrix::{bilinear, invmod, is_square, mulmod, smallest_nonsquare, MatModL};
use super::GroupError;

/// `[[0, I], [-I, 0]]`.
pub fn standard_symplectic(ell: u64, s: usize) -> MatModL {
    let r = s / 2;
    let mut j = MatModL::zeros(ell, s);
    for i in 0..r {
        j.set(i, r + i, 1);
        j.set(r + i, i, ell - 1);
    }
    j
}

/// `[[0, I], [I, 0]]`.
pub fn split_orthogonal(ell: u64, s: usize) -> MatModL {
    let r = s / 2;
    let mut j = MatModL::zeros(ell, s);
    for i in 0..r {
        j.set(i, r + i, 1);
        j.set(r + i, i, 1);
    }
    j
}

/// `diag(1, ..., 1, delta)`.
pub fn diagonal_form(ell: u64, s: usize, delta: u64) -> MatModL {
    let mut j = MatModL::identity(ell, s);
    if s > 0 {
        j.set(s - 1, s - 1, delta);
    }
    j
}

pub fn is_symmetric(g: &MatModL) -> bool {
    *g == g.transpose()
}

pub fn is_alternating(g: &MatModL) -> bool {
    (0..g.s).all(|i| g.get(i, i) == 0 && (0..g.s).all(|j| (g.get(i, j) + g.get(j, i)) % g.ell == 0))
}

fn axpy(ell: u64, c: u64, x: &[u64], y: &[u64]) -> Vec<u64> {
    x.iter().zip(y).map(|(a, b)| (mulmod(c, *a, ell) + b) % ell).collect()
}

fn scale(ell: u64, c: u64, x: &[u64]) -> Vec<u64> {
    x.iter().map(|a| mulmod(c, *a, ell)).collect()
}

fn columns_to_matrix(ell: u64, cols: &[Vec<u64>]) -> MatModL {
    let s = cols.len();
    let mut m = MatModL::zeros(ell, s);
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            m.set(i, j, *x);
        }
    }
    m
}

/// Orthogonal basis of a nondegenerate symmetric form, with the values
/// `Q(v_i) = v_i^T G v_i`.
fn orthogonal_basis(g: &MatModL) -> Result<(Vec<Vec<u64>>, Vec<u64>), GroupError> {
    let (ell, s) = (g.ell, g.s);
    let mut rest: Vec<Vec<u64>> = (0..s).map(|i| (0..s).map(|j| (i == j) as u64).collect()).collect();
    let mut basis = Vec::new();
    let mut values = Vec::new();
    while !rest.is_empty() {
        let mut pick = None;
        'find: for i in 0..rest.len() {
            if bilinear(g, &rest[i], &rest[i]) != 0 {
                pick = Some(rest[i].clone());
                break;
            }
            for j in i + 1..rest.len() {
                let v = axpy(ell, 1, &rest[i], &rest[j]);
                if bilinear(g, &v, &v) != 0 {
                    pick = Some(v);
                    break 'find;
                }
            }
        }
        // every vector isotropic on a subspace => the form vanishes there
        let v = pick.ok_or(GroupError::DegenerateForm)?;
        let qv = bilinear(g, &v, &v);
        let inv = invmod(qv, ell).unwrap();
        let mut next = Vec::new();
        for w in &rest {
            let c = mulmod(bilinear(g, w, &v), inv, ell);
            let w2 = axpy(ell, ell - c, &v, w);
            if w2.iter().any(|&x| x != 0) {
                next.push(w2);
            }
        }
        // keep a basis of the complement
        let m = columns_to_matrix_rect(ell, &next);
        next = m;
        basis.push(v);
        values.push(qv);
        rest = next;
        if basis.len() + rest.len() != s {
            return Err(GroupError::DegenerateForm);
        }
    }
    Ok((basis, values))
}

/// Independent subset (row echelon) of a list of vectors.
fn columns_to_matrix_rect(ell: u64, vs: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut echelon: Vec<(usize, Vec<u64>)> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for (p, e) in &echelon {
            if w[*p] != 0 {
                let c = mulmod(w[*p], invmod(e[*p], ell).unwrap(), ell);
                w = axpy(ell, ell - c, e, &w);
            }
        }
        if let Some(p) = w.iter().position(|&x| x != 0) {
            echelon.push((p, w));
            out.push(v.clone());
        }
    }
    out
}

/// Solution of `a x^2 + b y^2 = c` with `a, b, c` nonzero.
fn represent(ell: u64, a: u64, b: u64, c: u64) -> (u64, u64) {
    for x in 0..ell {
        for y in 0..ell {
            if (mulmod(a, mulmod(x, x, ell), ell) + mulmod(b, mulmod(y, y, ell), ell)) % ell == c % ell {
                return (x, y);
            }
        }
    }
    unreachable!("nondegenerate binary forms over F_l are universal")
}

/// Change of basis `P` (columns) with `P^T G P = diag(1, ..., 1, d)`,
/// `d` either 1 or the smallest nonsquare.
pub fn symmetric_normal_form(g: &MatModL) -> Result<(MatModL, u64), GroupError> {
    let ell = g.ell;
    let (mut vs, mut qs) = orthogonal_basis(g)?;
    let s = vs.len();
    for i in 0..s.saturating_sub(1) {
        let (a, b) = (qs[i], qs[i + 1]);
        let (x, y) = represent(ell, a, b, 1);
        let u = axpy(ell, x, &vs[i], &scale(ell, y, &vs[i + 1]));
        let u2 = axpy(ell, ell - mulmod(b, y, ell), &vs[i], &scale(ell, mulmod(a, x, ell), &vs[i + 1]));
        vs[i] = u;
        vs[i + 1] = u2;
        qs[i] = 1;
        qs[i + 1] = mulmod(a, b, ell);
    }
    let mut d = 1;
    if s > 0 {
        let last = qs[s - 1];
        let target = if is_square(last, ell) { 1 } else { smallest_nonsquare(ell) };
        // last * c^2 = target
        let c2 = mulmod(target, invmod(last, ell).unwrap(), ell);
        let c = (1..ell).find(|&c| mulmod(c, c, ell) == c2).unwrap();
        vs[s - 1] = scale(ell, c, &vs[s - 1]);
        d = target;
    }
    Ok((columns_to_matrix(ell, &vs), d))
}

/// Change of basis `P` with `P^T G P = [[0, I], [-I, 0]]`.
pub fn symplectic_normal_form(g: &MatModL) -> Result<MatModL, GroupError> {
    let (ell, s) = (g.ell, g.s);
    let mut rest: Vec<Vec<u64>> = (0..s).map(|i| (0..s).map(|j| (i == j) as u64).collect()).collect();
    let (mut es, mut fs) = (Vec::new(), Vec::new());
    while !rest.is_empty() {
        let e = rest[0].clone();
        let f = rest[1..].iter().find(|f| bilinear(g, &e, f) != 0).ok_or(GroupError::DegenerateForm)?;
        let f = scale(ell, invmod(bilinear(g, &e, f), ell).unwrap(), f);
        // project onto the complement of span(e, f)
        let mut next = Vec::new();
        for w in &rest {
            let a = bilinear(g, w, &f); // coefficient of e
            let b = bilinear(g, &e, w); // coefficient of f
            let w2 = axpy(ell, ell - a, &e, &axpy(ell, ell - b, &f, w));
            if w2.iter().any(|&x| x != 0) {
                next.push(w2);
            }
        }
        rest = columns_to_matrix_rect(ell, &next);
        es.push(e);
        fs.push(f);
        if 2 * es.len() + rest.len() != s {
            return Err(GroupError::DegenerateForm);
        }
    }
    es.extend(fs);
    Ok(columns_to_matrix(ell, &es))
}

/// A similitude of the normal form with multiplier `lambda`, or `None`
/// when no such similitude exists.
fn normal_similitude(ell: u64, s: usize, alternating: bool, d: u64, lambda: u64) -> Option<MatModL> {
    let lambda = lambda % ell;
    if lambda == 0 {
        return None;
    }
    if alternating {
        let r = s / 2;
        let mut m = MatModL::identity(ell, s);
        for i in r..s {
            m.set(i, i, lambda);
        }
        return Some(m);
    }
    if let Some(c) = (1..ell).find(|&c| mulmod(c, c, ell) == lambda) {
        return Some(MatModL::scalar(ell, s, c));
    }
    if s % 2 == 1 {
        return None;
    }
    // blocks diag(1, a) with a = 1 except the last; multiplication by an
    // element of norm lambda in each
    let mut m = MatModL::zeros(ell, s);
    for b in 0..s / 2 {
        let a = if b == s / 2 - 1 { d } else { 1 };
        let (x, y) = represent(ell, 1, a, lambda);
        let (i, j) = (2 * b, 2 * b + 1);
        m.set(i, i, x);
        m.set(j, i, y);
        m.set(i, j, ell - mulmod(a, y, ell));
        m.set(j, j, x);
    }
    Some(m)
}

/// A matrix `M` with `M^T G M = lambda G`, or `None` if `lambda` is not a
/// multiplier of the form.
pub fn similitude_with_multiplier(g: &MatModL, lambda: u64) -> Result<Option<MatModL>, GroupError> {
    let (ell, s) = (g.ell, g.s);
    let (p, alternating, d) = if is_alternating(g) {
        (symplectic_normal_form(g)?, true, 1)
    } else if is_symmetric(g) {
        let (p, d) = symmetric_normal_form(g)?;
        (p, false, d)
    } else {
        return Err(GroupError::FormNotClassical);
    };
    let Some(r) = normal_similitude(ell, s, alternating, d, lambda) else {
        return Ok(None);
    };
    let pinv = p.inverse().ok_or(GroupError::DegenerateForm)?;
    Ok(Some(p.mul(&r).mul(&pinv)))
}

/// For a symmetric form of even dimension `2r`: `(-1)^r det G` is a square.
pub fn is_split(g: &MatModL) -> bool {
    let r = (g.s / 2) as u64;
    let sign = if r % 2 == 1 { g.ell - 1 } else { 1 };
    is_square(mulmod(sign, g.det(), g.ell), g.ell)
}
