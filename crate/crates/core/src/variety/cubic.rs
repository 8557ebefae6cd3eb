//! Chord-tangent group law on a smooth plane cubic and a baby-step
//! giant-step point count over the Hasse interval.

use std::collections::HashMap;

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mpoly::{LastVarView, MPoly};
use crate::ff::{Fe, FieldDesc};
use crate::poly::roots;

pub type Pt = [Fe; 3];

/// Random points examined after the candidate set stops shrinking.
const STABLE_POINTS: usize = 16;
const MAX_POINTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CubicCountMethod {
    /// The Hasse interval contained a single multiple of the orders seen.
    Unique,
    /// Several multiples remained; the one compatible with
    /// `E = Z/n1 x Z/n2`, `n1 | n2`, `n1 | Q - 1` was selected, with `n2`
    /// taken as the lcm of the orders of the sampled points.
    Structure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicCount {
    pub n: u64,
    pub method: CubicCountMethod,
    pub exponent_lower_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CubicError {
    /// The gradient vanished or a line lay on the curve.
    Degenerate,
    /// No rational point found after the search budget.
    NoPoint,
    /// More than one candidate order survived.
    Ambiguous(Vec<u64>),
}

struct Cubic<'a> {
    desc: &'a FieldDesc,
    terms: Vec<([u32; 3], Fe)>,
    grad: [Vec<([u32; 3], Fe)>; 3],
}

fn term_list(p: &MPoly) -> Vec<([u32; 3], Fe)> {
    p.terms().map(|(e, c)| ([e[0], e[1], e[2]], *c)).collect()
}

impl<'a> Cubic<'a> {
    fn new(desc: &'a FieldDesc, f: &MPoly) -> Self {
        let g = f.gradient(desc);
        Cubic { desc, terms: term_list(f), grad: [term_list(&g[0]), term_list(&g[1]), term_list(&g[2])] }
    }

    fn eval_terms(&self, terms: &[([u32; 3], Fe)], p: &Pt) -> Fe {
        let d = self.desc;
        let pw: [[Fe; 4]; 3] = std::array::from_fn(|i| {
            let x = p[i];
            let x2 = d.mul(x, x);
            [Fe(1), x, x2, d.mul(x2, x)]
        });
        terms.iter().fold(Fe(0), |acc, (e, c)| {
            let mut t = *c;
            for i in 0..3 {
                if e[i] > 0 {
                    t = d.mul(t, pw[i][e[i] as usize]);
                }
            }
            d.add(acc, t)
        })
    }

    fn eval(&self, p: &Pt) -> Fe {
        self.eval_terms(&self.terms, p)
    }

    fn grad(&self, p: &Pt) -> Pt {
        std::array::from_fn(|i| self.eval_terms(&self.grad[i], p))
    }

    fn dot(&self, a: &Pt, b: &Pt) -> Fe {
        let d = self.desc;
        d.add(d.add(d.mul(a[0], b[0]), d.mul(a[1], b[1])), d.mul(a[2], b[2]))
    }

    fn normalize(&self, p: Pt) -> Option<Pt> {
        let i = p.iter().position(|&x| x != Fe(0))?;
        let inv = self.desc.inv(p[i]).unwrap();
        Some(std::array::from_fn(|j| if j == i { Fe(1) } else { self.desc.mul(p[j], inv) }))
    }

    fn combo(&self, s: Fe, a: &Pt, t: Fe, b: &Pt) -> Pt {
        let d = self.desc;
        std::array::from_fn(|i| d.sub(d.mul(s, a[i]), d.mul(t, b[i])))
    }

    fn proportional(&self, a: &Pt, b: &Pt) -> bool {
        let d = self.desc;
        (0..3).all(|i| (0..3).all(|j| d.mul(a[i], b[j]) == d.mul(a[j], b[i])))
    }

    /// Third intersection of the line through `p` and `q` (tangent if equal).
    fn third(&self, p: &Pt, q: &Pt) -> Result<Pt, CubicError> {
        if p == q {
            return self.tangent_third(p);
        }
        let alpha = self.dot(&self.grad(p), q);
        let beta = self.dot(&self.grad(q), p);
        self.normalize(self.combo(beta, p, alpha, q)).ok_or(CubicError::Degenerate)
    }

    fn tangent_third(&self, p: &Pt) -> Result<Pt, CubicError> {
        let d = self.desc;
        let g = self.grad(p);
        if g.iter().all(|&x| x == Fe(0)) {
            return Err(CubicError::Degenerate);
        }
        // V = g x e_i lies on the tangent line g . X = 0
        let cands: [Pt; 3] = [
            [Fe(0), g[2], d.neg(g[1])],
            [d.neg(g[2]), Fe(0), g[0]],
            [g[1], d.neg(g[0]), Fe(0)],
        ];
        let v = cands
            .into_iter()
            .find(|v| v.iter().any(|&x| x != Fe(0)) && !self.proportional(v, p))
            .ok_or(CubicError::Degenerate)?;
        let c2 = self.dot(&self.grad(&v), p);
        let c3 = self.eval(&v);
        self.normalize(self.combo(c3, p, c2, &v)).ok_or(CubicError::Degenerate)
    }
}

struct Group<'a> {
    c: Cubic<'a>,
    o: Pt,
    oo: Pt,
}

impl Group<'_> {
    fn add(&self, p: &Pt, q: &Pt) -> Result<Pt, CubicError> {
        if *p == self.o {
            return Ok(*q);
        }
        if *q == self.o {
            return Ok(*p);
        }
        let r = self.c.third(p, q)?;
        self.c.third(&self.o, &r)
    }

    fn neg(&self, p: &Pt) -> Result<Pt, CubicError> {
        self.c.third(p, &self.oo)
    }

    fn mul(&self, p: &Pt, mut n: u64) -> Result<Pt, CubicError> {
        let mut acc = self.o;
        let mut base = *p;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            n >>= 1;
            if n > 0 {
                base = self.add(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Exact order of `p` given a multiple `n` that kills it.
    fn order(&self, p: &Pt, mut n: u64) -> Result<u64, CubicError> {
        for r in prime_factors(n) {
            while n % r == 0 && self.mul(p, n / r)? == self.o {
                n /= r;
            }
        }
        Ok(n)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn random_point(c: &Cubic, view: &LastVarView, rng: &mut ChaCha8Rng) -> Result<Pt, CubicError> {
    let d = c.desc;
    for _ in 0..256 {
        let a = d.random(rng);
        let pows = super::mpoly::power_table(d, &[Fe(1), a], 3);
        let uni = view.eval_prefix(d, &pows);
        if uni.is_empty() {
            return Ok([Fe(1), a, d.random(rng)]);
        }
        let rs = roots::distinct_roots(d, &uni);
        if !rs.is_empty() {
            use rand::Rng;
            let t = rs[rng.gen_range(0..rs.len())];
            return Ok([Fe(1), a, t]);
        }
    }
    Err(CubicError::NoPoint)
}

fn isqrt(n: u128) -> u128 {
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `[Q + 1 - floor(2 sqrt Q), Q + 1 + floor(2 sqrt Q)]`.
pub fn hasse_interval(q: u64) -> (u64, u64) {
    let w = isqrt(4 * q as u128) as u64;
    (q + 1 - w, q + 1 + w)
}

/// Counts `#E(F_Q)` for a smooth plane cubic `f` with a rational point.
pub fn count_smooth_cubic(desc: &FieldDesc, f: &MPoly, seed: u64) -> Result<CubicCount, CubicError> {
    let c = Cubic::new(desc, f);
    let view = LastVarView::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let o = random_point(&c, &view, &mut rng)?;
    let oo = c.third(&o, &o)?;
    let g = Group { c, o, oo };
    let (lo, hi) = hasse_interval(desc.size());

    // all n in [lo, hi] with nP = O for the first point
    let p = random_point(&g.c, &view, &mut rng)?;
    let m = isqrt((hi - lo + 1) as u128) as u64 + 1;
    let mut baby: HashMap<Pt, Vec<u64>> = HashMap::new();
    let mut cur = g.o;
    for j in 0..m {
        baby.entry(cur).or_default().push(j);
        cur = g.add(&cur, &p)?;
    }
    let step = g.mul(&p, m)?;
    let mut giant = g.mul(&p, lo)?;
    let mut cands = Vec::new();
    let mut base = lo;
    while base <= hi {
        let target = g.neg(&giant)?;
        if let Some(js) = baby.get(&target) {
            for &j in js {
                if base + j <= hi {
                    cands.push(base + j);
                }
            }
        }
        giant = g.add(&giant, &step)?;
        base += m;
    }
    cands.sort_unstable();
    cands.dedup();
    if cands.is_empty() {
        return Err(CubicError::Degenerate);
    }
    let mut exponent = g.order(&p, cands[0])?;
    let mut stable = 0;
    let mut seen = 1;
    while cands.len() > 1 && stable < STABLE_POINTS && seen < MAX_POINTS {
        let p = random_point(&g.c, &view, &mut rng)?;
        seen += 1;
        let before = (cands.len(), exponent);
        let mut kept = Vec::with_capacity(cands.len());
        for &n in &cands {
            if g.mul(&p, n)? == g.o {
                kept.push(n);
            }
        }
        cands = kept;
        if cands.is_empty() {
            return Err(CubicError::Degenerate);
        }
        exponent = exponent.lcm(&g.order(&p, cands[0])?);
        if (cands.len(), exponent) == before {
            stable += 1;
        } else {
            stable = 0;
        }
    }
    if cands.len() == 1 {
        return Ok(CubicCount { n: cands[0], method: CubicCountMethod::Unique, exponent_lower_bound: exponent });
    }
    let qm1 = desc.size() - 1;
    let structured: Vec<u64> = cands
        .iter()
        .copied()
        .filter(|&n| {
            let n1 = n / exponent;
            n % exponent == 0 && exponent % n1 == 0 && qm1 % n1 == 0
        })
        .collect();
    if structured.len() == 1 {
        Ok(CubicCount { n: structured[0], method: CubicCountMethod::Structure, exponent_lower_bound: exponent })
    } else {
        Err(CubicError::Ambiguous(cands))
    }
}
