//! Roots of univariate polynomials over `F_q`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dense;
use crate::ff::{Fe, FieldDesc};

/// Fields up to this size find roots by evaluating at every element.
pub const SCAN_LIMIT: u64 = 1 << 16;

/// `gcd(f, x^q - x)`, monic. `f` must be nonzero.
pub fn rational_part(desc: &FieldDesc, f: &[Fe]) -> Vec<Fe> {
    let f = dense::monic(desc, f);
    if f.len() <= 1 {
        return f;
    }
    let x = [Fe(0), Fe(1)];
    let xq = dense::pow_mod(desc, &x, desc.size() as u128, &f);
    let diff = dense::sub(desc, &xq, &x);
    dense::gcd(desc, &f, &diff)
}

/// Number of distinct roots in `F_q`. The zero polynomial has `q`.
pub fn count_distinct_roots(desc: &FieldDesc, f: &[Fe]) -> u64 {
    match dense::degree(f) {
        None => desc.size(),
        Some(0) => 0,
        Some(1) => 1,
        Some(_) => (rational_part(desc, f).len() - 1) as u64,
    }
}

/// Distinct roots in `F_q`, sorted by integer encoding.
pub fn distinct_roots(desc: &FieldDesc, f: &[Fe]) -> Vec<Fe> {
    let f = dense::normalize(desc, f.to_vec());
    if f.is_empty() {
        return (0..desc.size()).map(Fe).collect();
    }
    let g = rational_part(desc, &f);
    let mut out = Vec::with_capacity(g.len().saturating_sub(1));
    if g.len() <= 1 {
        return out;
    }
    if desc.size() <= SCAN_LIMIT {
        for a in 0..desc.size() {
            if dense::eval(desc, &g, &Fe(a)) == Fe(0) {
                out.push(Fe(a));
                if out.len() + 1 == g.len() {
                    break;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_2007);
        split(desc, g, &mut rng, &mut out);
    }
    out.sort();
    out
}

/// Roots with multiplicity, sorted.
pub fn roots_with_multiplicity(desc: &FieldDesc, f: &[Fe]) -> Vec<Fe> {
    let f = dense::normalize(desc, f.to_vec());
    assert!(!f.is_empty(), "the zero polynomial has no finite root multiset");
    let mut out = Vec::new();
    for r in distinct_roots(desc, &f) {
        let lin = [desc.neg(r), Fe(1)];
        let mut cur = f.clone();
        while let Some(q) = dense::div_exact(desc, &cur, &lin) {
            out.push(r);
            cur = q;
        }
    }
    out
}

// `g` is monic, squarefree and splits into linear factors over F_q.
fn split(desc: &FieldDesc, g: Vec<Fe>, rng: &mut ChaCha8Rng, out: &mut Vec<Fe>) {
    match g.len() {
        0 | 1 => return,
        2 => {
            out.push(desc.neg(g[0]));
            return;
        }
        _ => {}
    }
    loop {
        let delta = desc.random(rng);
        let h = if desc.is_binary() {
            // trace of delta*x: sum_{i<k} (delta x)^{2^i} mod g
            let mut t = dense::rem(desc, &[Fe(0), delta], &g);
            let mut acc = t.clone();
            for _ in 1..desc.k() {
                t = dense::mul_mod(desc, &t, &t, &g);
                acc = dense::add(desc, &acc, &t);
            }
            acc
        } else {
            let e = ((desc.size() - 1) / 2) as u128;
            let base = [delta, Fe(1)];
            dense::sub(desc, &dense::pow_mod(desc, &base, e, &g), &[Fe(1)])
        };
        let d = dense::gcd(desc, &g, &h);
        if d.len() > 1 && d.len() < g.len() {
            let other = dense::div_exact(desc, &g, &d).expect("factor divides");
            split(desc, d, rng, out);
            split(desc, other, rng, out);
            return;
        }
    }
}
