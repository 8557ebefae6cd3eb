//! Singular scheme of a plane curve by Groebner bases in an affine chart.

use super::mpoly::MPoly;
use crate::ff::{Fe, FieldDesc};
use crate::poly::dense;

/// Term `c * x^a y^b`.
type Term = (u32, u32, Fe);

/// Bivariate polynomial with terms sorted decreasingly in graded reverse
/// lexicographic order (`x > y`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Biv(Vec<Term>);

fn key(a: u32, b: u32) -> (u32, u32) {
    (a + b, a)
}

impl Biv {
    pub fn new(desc: &FieldDesc, mut terms: Vec<Term>) -> Self {
        terms.sort_by(|x, y| key(y.0, y.1).cmp(&key(x.0, x.1)));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for (a, b, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == a && last.1 == b => last.2 = desc.add(last.2, c),
                _ => out.push((a, b, c)),
            }
        }
        out.retain(|t| t.2 != Fe(0));
        Biv(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lead(&self) -> Option<Term> {
        self.0.first().copied()
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    /// `self - c * x^a y^b * o`.
    fn sub_shifted(&self, desc: &FieldDesc, c: Fe, a: u32, b: u32, o: &Biv) -> Biv {
        let mut terms = self.0.clone();
        for &(x, y, d) in &o.0 {
            terms.push((x + a, y + b, desc.neg(desc.mul(c, d))));
        }
        Biv::new(desc, terms)
    }

    fn monic(&self, desc: &FieldDesc) -> Biv {
        match self.lead() {
            None => self.clone(),
            Some((_, _, c)) => {
                let inv = desc.inv(c).unwrap();
                Biv(self.0.iter().map(|&(a, b, d)| (a, b, desc.mul(d, inv))).collect())
            }
        }
    }
}

fn reduce(desc: &FieldDesc, p: &Biv, basis: &[Biv]) -> Biv {
    let mut p = p.clone();
    let mut rem: Vec<Term> = Vec::new();
    while let Some((a, b, c)) = p.lead() {
        let div = basis.iter().find(|g| {
            let (ga, gb, _) = g.lead().unwrap();
            ga <= a && gb <= b
        });
        match div {
            Some(g) => {
                let (ga, gb, gc) = g.lead().unwrap();
                let f = desc.mul(c, desc.inv(gc).unwrap());
                p = p.sub_shifted(desc, f, a - ga, b - gb, g);
            }
            None => {
                rem.push((a, b, c));
                p.0.remove(0);
            }
        }
    }
    Biv::new(desc, rem)
}

fn s_poly(desc: &FieldDesc, f: &Biv, g: &Biv) -> Biv {
    let (fa, fb, fc) = f.lead().unwrap();
    let (ga, gb, gc) = g.lead().unwrap();
    let (la, lb) = (fa.max(ga), fb.max(gb));
    let left = Biv(f.0.iter().map(|&(a, b, c)| (a + la - fa, b + lb - fb, desc.mul(c, desc.inv(fc).unwrap()))).collect());
    left.sub_shifted(desc, desc.inv(gc).unwrap(), la - ga, lb - gb, g)
}

/// Reduced Groebner basis (grevlex) of the ideal generated by `gens`.
pub fn groebner(desc: &FieldDesc, gens: &[Biv]) -> Vec<Biv> {
    let mut basis: Vec<Biv> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.monic(desc)).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        let (ia, ib, _) = basis[i].lead().unwrap();
        let (ja, jb, _) = basis[j].lead().unwrap();
        // coprime leading monomials reduce to zero
        if ia.min(ja) == 0 && ib.min(jb) == 0 {
            continue;
        }
        let s = reduce(desc, &s_poly(desc, &basis[i], &basis[j]), &basis);
        if !s.is_zero() {
            basis.push(s.monic(desc));
            let n = basis.len() - 1;
            for k in 0..n {
                pairs.push((k, n));
            }
        }
    }
    // minimal basis
    let mut minimal: Vec<Biv> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let (a, b, _) = g.lead().unwrap();
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let (ha, hb, _) = h.lead().unwrap();
            j != idx && ha <= a && hb <= b && ((ha, hb) != (a, b) || j < idx)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    // interreduce
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Biv> = minimal.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
        let (la, lb, lc) = minimal[i].lead().unwrap();
        let tail = Biv(minimal[i].0[1..].to_vec());
        let mut r = reduce(desc, &tail, &others).0;
        r.push((la, lb, lc));
        reduced.push(Biv::new(desc, r).monic(desc));
    }
    reduced.sort_by(|x, y| {
        let (xa, xb, _) = x.lead().unwrap();
        let (ya, yb, _) = y.lead().unwrap();
        key(xa, xb).cmp(&key(ya, yb))
    });
    reduced
}

/// `dim_F F[x, y] / I` from a Groebner basis; `None` if infinite.
pub fn quotient_dimension(basis: &[Biv]) -> Option<usize> {
    let leads: Vec<(u32, u32)> = basis.iter().map(|g| (g.lead().unwrap().0, g.lead().unwrap().1)).collect();
    let ax = leads.iter().filter(|l| l.1 == 0).map(|l| l.0).min()?;
    let by = leads.iter().filter(|l| l.0 == 0).map(|l| l.1).min()?;
    let mut count = 0;
    for a in 0..ax {
        for b in 0..by {
            if !leads.iter().any(|&(la, lb)| la <= a && lb <= b) {
                count += 1;
            }
        }
    }
    Some(count)
}

/// Summary of the singular locus of a projective plane curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularScheme {
    /// Length of the scheme `F = F_x = F_y = F_z = 0`; `None` when no clean
    /// chart was found or the locus is positive dimensional.
    pub length: Option<usize>,
    /// The unique singular point when `length == Some(1)`, canonical form.
    pub point: Option<[Fe; 3]>,
    /// Whether the quadratic part at `point` is nondegenerate.
    pub node: bool,
}

/// Dehomogenize at coordinate `c` (set to 1) into a bivariate polynomial in
/// the other two coordinates, in their original order.
fn dehomogenize(desc: &FieldDesc, f: &MPoly, c: usize) -> Biv {
    let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
    Biv::new(desc, f.terms().map(|(e, &v)| (e[others[0]], e[others[1]], v)).collect())
}

/// True if the curve has a singular point on the line `x_c = 0`.
fn singular_on_line(desc: &FieldDesc, polys: &[MPoly], c: usize) -> bool {
    let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
    // points (1 : t) and (0 : 1) in coordinates (x_u, x_v)
    let mut g: Vec<Fe> = Vec::new();
    let mut at_inf = true;
    for p in polys {
        let mut uni: Vec<(usize, Fe)> = Vec::new();
        let mut top = Fe(0);
        let deg = p.total_degree().unwrap_or(0);
        for (e, &v) in p.terms() {
            if e[c] != 0 {
                continue;
            }
            uni.push((e[others[1]] as usize, v));
            if e[others[1]] == deg {
                top = desc.add(top, v);
            }
        }
        let mut coeffs = vec![Fe(0); uni.iter().map(|u| u.0 + 1).max().unwrap_or(0)];
        for (i, v) in uni {
            coeffs[i] = desc.add(coeffs[i], v);
        }
        let coeffs = dense::normalize(desc, coeffs);
        g = if g.is_empty() { coeffs } else { dense::gcd(desc, &g, &coeffs) };
        if top != Fe(0) {
            at_inf = false;
        }
    }
    // g == [] means every restricted form vanishes identically
    g.is_empty() || g.len() > 1 || at_inf
}

/// Computes the singular scheme of `f` (homogeneous, three variables).
pub fn singular_scheme(desc: &FieldDesc, f: &MPoly) -> SingularScheme {
    let mut polys = vec![f.clone()];
    polys.extend(f.gradient(desc));
    let unknown = SingularScheme { length: None, point: None, node: false };
    let Some(c) = [2usize, 0, 1].into_iter().find(|&c| !singular_on_line(desc, &polys, c)) else {
        return unknown;
    };
    let gens: Vec<Biv> = polys.iter().map(|p| dehomogenize(desc, p, c)).collect();
    let basis = groebner(desc, &gens);
    let Some(len) = quotient_dimension(&basis) else { return unknown };
    if len != 1 {
        return SingularScheme { length: Some(len), point: None, node: false };
    }
    // reduced basis of a rational point: {y - b, x - a}
    let mut a = Fe(0);
    let mut b = Fe(0);
    for g in &basis {
        let t = g.terms();
        let constant = t.iter().find(|x| x.0 == 0 && x.1 == 0).map(|x| desc.neg(x.2)).unwrap_or(Fe(0));
        match (t[0].0, t[0].1) {
            (1, 0) => a = constant,
            (0, 1) => b = constant,
            _ => {}
        }
    }
    let mut pt = [Fe(0); 3];
    let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
    pt[c] = Fe(1);
    pt[others[0]] = a;
    pt[others[1]] = b;
    let node = quadratic_part_nondegenerate(desc, f, &pt);
    SingularScheme { length: Some(1), point: Some(canonical(desc, pt)), node }
}

pub fn canonical(desc: &FieldDesc, p: [Fe; 3]) -> [Fe; 3] {
    let i = p.iter().position(|&x| x != Fe(0)).expect("nonzero point");
    let inv = desc.inv(p[i]).unwrap();
    std::array::from_fn(|j| desc.mul(p[j], inv))
}

/// Quadratic part `a u^2 + b uv + c v^2` of `f` at `pt` in the chart where
/// the first nonzero coordinate of `pt` is 1; nondegenerate iff
/// `b^2 - 4ac != 0`. In characteristic 2 this is `b != 0`.
pub fn quadratic_part_nondegenerate(desc: &FieldDesc, f: &MPoly, pt: &[Fe; 3]) -> bool {
    let pt = canonical(desc, *pt);
    let c = pt.iter().position(|&x| x != Fe(0)).unwrap();
    let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
    // x_c = 1, x_o = pt_o + u_o
    let forms: Vec<MPoly> = (0..3)
        .map(|i| {
            if i == c {
                MPoly::constant(2, Fe(1))
            } else {
                let k = others.iter().position(|&o| o == i).unwrap();
                MPoly::constant(2, pt[i]).add(desc, &MPoly::var(2, k))
            }
        })
        .collect();
    let g = f.substitute(desc, &forms, 2);
    let qa = g.coeff(&[2, 0]);
    let qb = g.coeff(&[1, 1]);
    let qc = g.coeff(&[0, 2]);
    let disc = desc.sub(desc.mul(qb, qb), desc.mul(desc.from_int(4), desc.mul(qa, qc)));
    disc != Fe(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::field_make;

    fn curve(desc: &FieldDesc, terms: &[([u32; 3], i64)]) -> MPoly {
        MPoly::from_terms_in(desc, 3, terms.iter().map(|(e, c)| (e.to_vec(), desc.from_int(*c))))
    }

    #[test]
    fn groebner_of_a_point() {
        let f = field_make(5, 1, 0).unwrap();
        // x - 2, y^2 - 4 y + 4 => point (2, 2) with multiplicity 2
        let g1 = Biv::new(&f, vec![(1, 0, Fe(1)), (0, 0, f.from_int(-2))]);
        let g2 = Biv::new(&f, vec![(0, 2, Fe(1)), (0, 1, f.from_int(-4)), (0, 0, Fe(4))]);
        let gb = groebner(&f, &[g1, g2]);
        assert_eq!(quotient_dimension(&gb), Some(2));
    }

    #[test]
    fn spec_curves() {
        let f5 = field_make(5, 1, 0).unwrap();
        // nodal cubic y^2 z - x^2 (x + z)
        let nodal = curve(&f5, &[([0, 2, 1], 1), ([3, 0, 0], -1), ([2, 0, 1], -1)]);
        let s = singular_scheme(&f5, &nodal);
        assert_eq!(s.length, Some(1));
        assert_eq!(s.point, Some([Fe(0), Fe(0), Fe(1)]));
        assert!(s.node);
        // cusp y^2 z - x^3 has Tjurina number 2
        let cusp = curve(&f5, &[([0, 2, 1], 1), ([3, 0, 0], -1)]);
        let s = singular_scheme(&f5, &cusp);
        assert_eq!(s.length, Some(2));
        assert!(!s.node);
        let f2 = field_make(2, 1, 0).unwrap();
        let fermat = curve(&f2, &[([3, 0, 0], 1), ([0, 3, 0], 1), ([0, 0, 3], 1)]);
        assert_eq!(singular_scheme(&f2, &fermat).length, Some(0));
    }

    #[test]
    fn node_in_characteristic_two() {
        let f2 = field_make(2, 1, 0).unwrap();
        // y^2 z + x y z + x^3 has a node at (0:0:1): quadratic part y^2 + xy
        let c = curve(&f2, &[([0, 2, 1], 1), ([1, 1, 1], 1), ([3, 0, 0], 1)]);
        let s = singular_scheme(&f2, &c);
        assert_eq!(s.length, Some(1));
        assert!(s.node);
        // y^2 z + x^3: a cusp in characteristic 2
        let c = curve(&f2, &[([0, 2, 1], 1), ([3, 0, 0], 1)]);
        assert!(!singular_scheme(&f2, &c).node);
    }

    #[test]
    fn three_concurrent_lines_are_not_nodal() {
        let f3 = field_make(7, 1, 0).unwrap();
        // x y (x + y): triple point at (0:0:1)
        let c = curve(&f3, &[([2, 1, 0], 1), ([1, 2, 0], 1)]);
        let s = singular_scheme(&f3, &c);
        assert!(s.length.unwrap_or(2) >= 2);
        assert!(!s.node);
    }
}
