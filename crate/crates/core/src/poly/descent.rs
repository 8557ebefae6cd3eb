//! Recovering a Weil polynomial over `F_q` from its images over `F_{q^r1}`
//! and `F_{q^r2}` with `gcd(r1, r2) = 1`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::complex::{inverse_roots, CFix};
use super::{power_map_poly, IntPoly, PolyError, WeilPoly};

/// Relative matching tolerance `2^-40`.
pub const MATCH_TOL_BITS: u32 = 40;

/// Upper bound on the perfect matchings examined before giving up.
pub const MATCHING_CAP: usize = 4096;

fn bezout(r1: i64, r2: i64) -> (i64, i64) {
    let e = r1.extended_gcd(&r2);
    (e.x, e.y)
}

fn expand(roots: &[(CFix, usize)]) -> Vec<CFix> {
    roots.iter().flat_map(|(r, m)| std::iter::repeat(r.clone()).take(*m)).collect()
}

/// Finds the unique `f` over `F_q` with `f^(r1) = f1` and `f^(r2) = f2`.
pub fn recover_base(
    f1: &WeilPoly,
    r1: u32,
    f2: &WeilPoly,
    r2: u32,
    q: u128,
    w: u32,
) -> Result<WeilPoly, PolyError> {
    if r1 == 0 || r2 == 0 || r1.gcd(&r2) != 1 {
        return Err(PolyError::NotCoprimeExponents(r1, r2));
    }
    let (d1, d2) = (f1.degree(), f2.degree());
    if d1 != d2 {
        return Err(PolyError::DegreeMismatch(d1, d2));
    }
    for f in [f1, f2] {
        let c0 = f.poly.coeff(0);
        if !c0.is_one() {
            return Err(PolyError::NonUnitConstantTerm(c0));
        }
    }
    if d1 == 0 {
        return Ok(WeilPoly::one(q, w));
    }
    let (a, b) = bezout(r1 as i64, r2 as i64);
    let betas = expand(&inverse_roots(&f1.poly));
    let gammas = expand(&inverse_roots(&f2.poly));
    if betas.len() != d1 || gammas.len() != d2 {
        return Err(PolyError::NoConsistentMatching);
    }
    let beta_pows: Vec<Option<CFix>> = betas.iter().map(|z| z.powi(a)).collect();
    let gamma_pows: Vec<Option<CFix>> = gammas.iter().map(|z| z.powi(b)).collect();

    // candidate[i] lists (j, alpha) for compatible pairs
    let mut candidates: Vec<Vec<(usize, CFix)>> = vec![Vec::new(); d1];
    for (i, bi) in betas.iter().enumerate() {
        let Some(ba) = &beta_pows[i] else { continue };
        for (j, gj) in gammas.iter().enumerate() {
            let Some(gb) = &gamma_pows[j] else { continue };
            let alpha = ba.mul(gb);
            let ok1 = alpha.powi(r1 as i64).is_some_and(|z| z.close_to(bi, MATCH_TOL_BITS));
            let ok2 = alpha.powi(r2 as i64).is_some_and(|z| z.close_to(gj, MATCH_TOL_BITS));
            if ok1 && ok2 {
                candidates[i].push((j, alpha));
            }
        }
    }
    if candidates.iter().any(|c| c.is_empty()) {
        return Err(PolyError::NoConsistentMatching);
    }

    let mut verified: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let mut used = vec![false; d2];
    let mut chosen: Vec<CFix> = Vec::with_capacity(d1);
    let mut explored = 0usize;
    search(&candidates, 0, &mut used, &mut chosen, &mut explored, &mut |alphas| {
        if let Some(p) = round_product(alphas) {
            let ok = power_map_poly(&p, r1).is_ok_and(|g| g == f1.poly)
                && power_map_poly(&p, r2).is_ok_and(|g| g == f2.poly);
            if ok {
                verified.insert(p.coeffs().to_vec());
            }
        }
    });
    match verified.len() {
        0 => Err(PolyError::NoConsistentMatching),
        1 => {
            let coeffs = verified.into_iter().next().unwrap();
            Ok(WeilPoly { poly: IntPoly::new(coeffs), q, w, verified: f1.verified && f2.verified })
        }
        n => Err(PolyError::AmbiguousMatching(n)),
    }
}

fn search(
    cand: &[Vec<(usize, CFix)>],
    i: usize,
    used: &mut Vec<bool>,
    chosen: &mut Vec<CFix>,
    explored: &mut usize,
    visit: &mut dyn FnMut(&[CFix]),
) {
    if *explored >= MATCHING_CAP {
        return;
    }
    if i == cand.len() {
        *explored += 1;
        visit(chosen);
        return;
    }
    for (j, alpha) in &cand[i] {
        if used[*j] {
            continue;
        }
        used[*j] = true;
        chosen.push(alpha.clone());
        search(cand, i + 1, used, chosen, explored, visit);
        chosen.pop();
        used[*j] = false;
    }
}

/// `prod (1 - alpha T)` rounded to integers.
fn round_product(alphas: &[CFix]) -> Option<IntPoly> {
    let mut coeffs = vec![CFix::one()];
    for a in alphas {
        let mut next = vec![CFix::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k] = next[k].add(c);
            next[k + 1] = next[k + 1].sub(&c.mul(a));
        }
        coeffs = next;
    }
    let ints = coeffs.iter().map(|c| c.round_real(8)).collect::<Option<Vec<_>>>()?;
    Some(IntPoly::new(ints))
}
