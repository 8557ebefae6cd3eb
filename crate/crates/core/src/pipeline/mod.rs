//! Two-fibre gcd trials over `F_Q`, success estimates, the extension-degree
//! threshold, and descent from two extensions to the base field.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ff::{splitmix64, FieldDesc};
use crate::pencil::{fibre_equation, sample_smooth_fibre, FibreParam, PencilDesc, PencilError, PencilField};
use crate::poly::{recover_base, resultant, weil_gcd, IntPoly, PolyError, WeilPoly};
use crate::torsion::{milnor_bound, torsion_free_prime, Mag, TowerValue};
use crate::variety::{curve_numerator, genus_plane, VarietyError};

/// Fresh-seed attempts in [`descend`] before giving up.
pub const DESCEND_ATTEMPTS: u32 = 8;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("fibres are not plane curves (fibre dimension {0}, ambient {1})")]
    NotPlaneFibres(usize, usize),
    #[error("target degree {target} exceeds both fibre numerators ({f1}, {f2})")]
    GroundTruthMismatchDegree { target: usize, f1: usize, f2: usize },
    #[error("gcd does not divide the fibre numerators")]
    InexactDivision,
    #[error("no consistent descent after {0} attempts")]
    NoConsistentMatching(u32),
    #[error("at least one trial is needed")]
    NoTrials,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Seed of trial `i` under master seed `master`:
/// `splitmix64(master + (i + 1) * 0x9e3779b97f4a7c15)`.
pub fn trial_seed(master: u64, i: u64) -> u64 {
    splitmix64(master.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Seeds of the two fibre draws of one trial.
pub fn fibre_seeds(seed: u64) -> (u64, u64) {
    (splitmix64(seed ^ 1), splitmix64(seed ^ 2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    #[serde(rename = "Q")]
    pub big_q: u64,
    pub u1: FibreParam,
    pub u2: FibreParam,
    pub f1: WeilPoly,
    pub f2: WeilPoly,
    pub g: IntPoly,
    pub success: Option<bool>,
    /// Kept out of the log so logs are reproducible byte for byte.
    #[serde(skip)]
    pub wall: Duration,
}

fn check_plane_fibres(p: &PencilDesc) -> Result<(), PipelineError> {
    if p.scan.is_none() {
        return Err(PencilError::NotScanned.into());
    }
    if p.fibre_dim() != 1 {
        return Err(PipelineError::NotPlaneFibres(p.fibre_dim(), p.ambient_dim()));
    }
    Ok(())
}

fn fibre_numerator(pf: &PencilField, t: &FibreParam, genus: u32) -> Result<WeilPoly, PipelineError> {
    let c = fibre_equation(pf, t)?;
    Ok(curve_numerator(&c, genus)?)
}

/// One trial on the given parameters.
pub fn gcd_trial_at(
    pf: &PencilField,
    u1: FibreParam,
    u2: FibreParam,
    target: Option<&IntPoly>,
    seed: u64,
) -> Result<TrialRecord, PipelineError> {
    let start = Instant::now();
    let genus = genus_plane(pf.degree);
    let f1 = fibre_numerator(pf, &u1, genus)?;
    let f2 = if u2 == u1 { f1.clone() } else { fibre_numerator(pf, &u2, genus)? };
    let g = weil_gcd(&f1.poly, &f2.poly)?;
    if f1.poly.div_exact(&g).is_none() || f2.poly.div_exact(&g).is_none() {
        return Err(PipelineError::InexactDivision);
    }
    let success = match target {
        None => None,
        Some(t) => {
            let (dt, d1, d2) = (t.degree().unwrap_or(0), f1.degree(), f2.degree());
            if dt > d1 && dt > d2 {
                return Err(PipelineError::GroundTruthMismatchDegree { target: dt, f1: d1, f2: d2 });
            }
            Some(&g == t)
        }
    };
    Ok(TrialRecord { seed, big_q: pf.size(), u1, u2, f1, f2, g, success, wall: start.elapsed() })
}

/// Two independent uniform draws from `U(F_Q)`, fibre numerators, and
/// their gcd over the rationals.
pub fn gcd_trial(p: &PencilDesc, q_desc: &FieldDesc, seed: u64, target: Option<&IntPoly>) -> Result<TrialRecord, PipelineError> {
    check_plane_fibres(p)?;
    let pf = p.over_field(q_desc)?;
    let (s1, s2) = fibre_seeds(seed);
    let u1 = sample_smooth_fibre(&pf, s1)?;
    let u2 = sample_smooth_fibre(&pf, s2)?;
    gcd_trial_at(&pf, u1, u2, target, seed)
}

/// `[Res(f1, f2) != 0]`.
pub fn coprime_by_resultant(r: &TrialRecord) -> Result<bool, PipelineError> {
    Ok(resultant(&r.f1.poly, &r.f2.poly)? != 0.into())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessEstimate {
    pub trials: u64,
    pub successes: u64,
    pub fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
    #[serde(skip)]
    pub wall: Duration,
}

/// 95% Wilson score interval.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (successes as f64, n as f64);
    let p = k / n;
    let z2 = WILSON_Z * WILSON_Z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    let lo = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Runs `trials` trials with seeds [`trial_seed`]`(seed, i)`; records are
/// ordered by trial index. Without a target no trial counts as a success.
pub fn estimate_success(
    p: &PencilDesc,
    q_desc: &FieldDesc,
    trials: u64,
    seed: u64,
    target: Option<&IntPoly>,
) -> Result<SuccessEstimate, PipelineError> {
    if trials == 0 {
        return Err(PipelineError::NoTrials);
    }
    let start = Instant::now();
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|i| gcd_trial(p, q_desc, trial_seed(seed, i), target))
        .collect::<Result<_, _>>()?;
    let successes = records.iter().filter(|r| r.success == Some(true)).count() as u64;
    let (wilson_low, wilson_high) = wilson_interval(successes, trials);
    Ok(SuccessEstimate {
        trials,
        successes,
        fraction: successes as f64 / trials as f64,
        wilson_low,
        wilson_high,
        records,
        wall: start.elapsed(),
    })
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(records: &[TrialRecord], mut out: W) -> Result<(), PipelineError> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub const SUMMARY_CSV_HEADER: &str = "trials,successes,fraction,wilson_low,wilson_high";

pub fn summary_csv_row(e: &SuccessEstimate) -> String {
    format!("{},{},{},{},{}", e.trials, e.successes, e.fraction, e.wilson_low, e.wilson_high)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub q: u64,
    /// Torsion-free prime in use, if one was supplied.
    pub ell: Option<u64>,
    /// Size the proof asks of `l`: `D^(2^(4N^2))`.
    pub ell_bound: String,
    /// `E = 2^(8N^2) N^2 D^(4N)`; the bound is `Q > D^E`.
    pub exponent: String,
    /// `log2` of the bound, `E log2 D`, exact when `D` is a power of two.
    pub log2_bound: Option<String>,
    /// Interval `(height, lo, hi)` enclosing the `log2` of the bound.
    pub log2_bound_mag: (u32, f64, f64),
    /// `2 D^(N+1)`, and the least `w` with `q^w` above it.
    pub aux_bound: u128,
    pub aux_min_w: u32,
    /// Betti-sum bound `N D (2D - 1)^(2N + 1)` for a hyperplane section.
    #[serde(serialize_with = "crate::torsion::dec::one")]
    pub betti_sum_bound: BigUint,
    pub configured_w: Option<u32>,
    #[serde(rename = "configured_Q_log2")]
    pub configured_q_log2: Option<f64>,
    pub configured_meets_bound: Option<bool>,
    pub configured_meets_aux: Option<bool>,
}

/// The proof's displayed lower bound on `Q`, next to the `Q` actually used.
pub fn threshold(d: u64, n: u32, q: u64, ell: Option<u64>, configured_w: Option<u32>) -> ThresholdReport {
    assert!(d >= 1 && n >= 1 && q >= 2);
    let n64 = n as u64;
    let e = TowerValue::mul(
        TowerValue::mul(TowerValue::pow(2u32, TowerValue::from(8 * n64 * n64)), TowerValue::from(n64 * n64)),
        TowerValue::pow(d, TowerValue::from(4 * n64)),
    );
    let log2_d = (d as f64).log2();
    let exact_log2 = if d.is_power_of_two() {
        let k = d.trailing_zeros() as u64;
        Some(if k == 0 { TowerValue::from(0) } else { TowerValue::mul(TowerValue::from(k), e.clone()) })
    } else {
        None
    };
    let mag = match &exact_log2 {
        Some(v) => v.mag(),
        None => e.mag().mul(Mag::interval(log2_d, log2_d)),
    };
    let aux_bound = 2 * (d as u128).pow(n + 1);
    let mut aux_min_w = 1;
    while (q as u128).checked_pow(aux_min_w).is_some_and(|v| v <= aux_bound) {
        aux_min_w += 1;
    }
    let configured_q_log2 = configured_w.map(|w| w as f64 * (q as f64).log2());
    let configured_meets_bound = configured_q_log2.and_then(|l| {
        if d == 1 {
            return Some(true);
        }
        Mag::interval(l, l).compare(mag).map(|o| o == std::cmp::Ordering::Greater)
    });
    let configured_meets_aux = configured_w.map(|w| (q as u128).checked_pow(w).is_none_or(|v| v > aux_bound));
    let ell_bound = torsion_free_prime(None, d.max(2), n).ell_bound.map(|v| v.to_string()).unwrap_or_default();
    ThresholdReport {
        d,
        n,
        q,
        ell,
        ell_bound,
        exponent: e.to_string(),
        log2_bound: exact_log2.map(|v| v.to_string()),
        log2_bound_mag: (mag.height, mag.lo, mag.hi),
        aux_bound,
        aux_min_w,
        betti_sum_bound: milnor_bound(n, d),
        configured_w,
        configured_q_log2,
        configured_meets_bound,
        configured_meets_aux,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescendReport {
    pub base: WeilPoly,
    pub w1: u32,
    pub w2: u32,
    pub g1: IntPoly,
    pub g2: IntPoly,
    /// Number of seed attempts used, starting at 1.
    pub attempts: u32,
}

/// `recover_base` on injected candidates `g1` over `F_(q^w1)` and `g2` over
/// `F_(q^w2)`.
pub fn descend_from_candidates(g1: &IntPoly, w1: u32, g2: &IntPoly, w2: u32, q: u128, weight: u32) -> Result<WeilPoly, PolyError> {
    let f1 = WeilPoly { poly: g1.clone(), q: q.pow(w1), w: weight, verified: false };
    let f2 = WeilPoly { poly: g2.clone(), q: q.pow(w2), w: weight, verified: false };
    recover_base(&f1, w1, &f2, w2, q, weight)
}

/// Runs a gcd trial over `F_(q^w1)` and over `F_(q^w2)` and descends; on a
/// failed matching, retries with fresh seeds up to [`DESCEND_ATTEMPTS`]
/// times.
pub fn descend(p: &PencilDesc, w1: u32, w2: u32, seed: u64) -> Result<DescendReport, PipelineError> {
    check_plane_fibres(p)?;
    if num_integer::gcd(w1, w2) != 1 || w1 == 0 || w2 == 0 {
        return Err(PolyError::NotCoprimeExponents(w1, w2).into());
    }
    let q = p.base().size() as u128;
    let pf1 = p.over(w1)?;
    let pf2 = p.over(w2)?;
    for attempt in 0..DESCEND_ATTEMPTS {
        let s = trial_seed(seed, attempt as u64);
        let r1 = gcd_trial(p, pf1.desc(), splitmix64(s ^ 0x11), None)?;
        let r2 = gcd_trial(p, pf2.desc(), splitmix64(s ^ 0x22), None)?;
        match descend_from_candidates(&r1.g, w1, &r2.g, w2, q, 1) {
            Ok(base) => return Ok(DescendReport { base, w1, w2, g1: r1.g, g2: r2.g, attempts: attempt + 1 }),
            Err(PolyError::NoConsistentMatching | PolyError::DegreeMismatch(..) | PolyError::AmbiguousMatching(_)) => {
                log::debug!("descend attempt {attempt} failed; retrying");
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(PipelineError::NoConsistentMatching(DESCEND_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::field_make;
    use crate::pencil::ClassifyMode;
    use crate::poly::power_map;
    use crate::variety::{fermat, ProjVariety};

    fn fermat_pencil() -> PencilDesc {
        let f2 = field_make(2, 1, 0).unwrap();
        let x = ProjVariety::hypersurface(f2, fermat(4, 3)).unwrap();
        let mut p = PencilDesc::random(x, 1).unwrap();
        let _ = p.scan_nodal_locus(4, ClassifyMode::Algebraic);
        p
    }

    #[test]
    fn seeds_are_stable() {
        assert_eq!(trial_seed(7, 0), trial_seed(7, 0));
        assert_ne!(trial_seed(7, 0), trial_seed(7, 1));
        let (a, b) = fibre_seeds(5);
        assert_ne!(a, b);
    }

    #[test]
    fn wilson() {
        let (lo, hi) = wilson_interval(40, 50);
        assert!(lo < 0.8 && 0.8 < hi);
        assert!((lo - 0.6696).abs() < 1e-3 && (hi - 0.8876).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 1).0, 0.0);
        assert_eq!(wilson_interval(0, 50).0, 0.0);
        assert_eq!(wilson_interval(50, 50).1, 1.0);
    }

    #[test]
    fn threshold_examples() {
        let t = threshold(3, 3, 2, None, Some(8));
        assert_eq!((t.aux_bound, t.aux_min_w), (162, 8));
        assert_eq!(t.configured_meets_aux, Some(true));
        assert_eq!(t.configured_meets_bound, Some(false));
        let one = threshold(1, 2, 2, None, Some(3));
        assert_eq!(one.log2_bound.as_deref(), Some("0"));
        let t = threshold(2, 4, 2, Some(5), None);
        // 2^128 * 16 * 2^16 = 2^148
        assert_eq!(t.log2_bound.as_deref(), Some("2^148"));
        assert_eq!(t.ell, Some(5));
        assert_eq!(threshold(3, 3, 2, None, None).betti_sum_bound, BigUint::from(703125u32));
    }

    #[test]
    fn unscanned_pencil_is_rejected() {
        let f2 = field_make(2, 1, 0).unwrap();
        let x = ProjVariety::hypersurface(f2, fermat(4, 3)).unwrap();
        let p = PencilDesc::random(x, 1).unwrap();
        let q = p.over(4).unwrap().desc().clone();
        assert!(matches!(gcd_trial(&p, &q, 0, None), Err(PipelineError::Pencil(PencilError::NotScanned))));
    }

    #[test]
    fn same_fibre_gives_its_numerator() {
        let p = fermat_pencil();
        let pf = p.over(6).unwrap();
        let u = sample_smooth_fibre(&pf, 3).unwrap();
        let r = gcd_trial_at(&pf, u, u, Some(&IntPoly::one()), 3).unwrap();
        assert_eq!(r.g, r.f1.poly);
        assert_eq!(r.success, Some(false));
        let big = IntPoly::from_i64(&[1, 0, 0, 0, 1]);
        assert!(matches!(
            gcd_trial_at(&pf, u, u, Some(&big), 3),
            Err(PipelineError::GroundTruthMismatchDegree { target: 4, .. })
        ));
    }

    #[test]
    fn coprime_numerators() {
        let f1 = IntPoly::from_i64(&[1, 0, 2]);
        let f2 = IntPoly::from_i64(&[1, -2, 2]);
        assert_eq!(weil_gcd(&f1, &f2).unwrap(), IntPoly::one());
        assert_ne!(resultant(&f1, &f2).unwrap(), 0.into());
    }

    #[test]
    fn synthetic_descent() {
        let f = WeilPoly::new(IntPoly::from_i64(&[1, 0, 2]), 2, 1).unwrap();
        let g1 = power_map(&f, 2).unwrap();
        let g2 = power_map(&f, 3).unwrap();
        let back = descend_from_candidates(&g1.poly, 2, &g2.poly, 3, 2, 1).unwrap();
        assert_eq!(back.poly, f.poly);
        let one = descend_from_candidates(&IntPoly::one(), 3, &IntPoly::one(), 4, 2, 1).unwrap();
        assert_eq!(one.poly, IntPoly::one());
        assert!(matches!(descend(&fermat_pencil(), 2, 4, 0), Err(PipelineError::Poly(PolyError::NotCoprimeExponents(2, 4)))));
    }

    #[test]
    fn jsonl_is_reproducible() {
        let p = fermat_pencil();
        let q = p.over(5).unwrap().desc().clone();
        let run = || {
            let e = estimate_success(&p, &q, 3, 42, Some(&IntPoly::one())).unwrap();
            let mut buf = Vec::new();
            write_jsonl(&e.records, &mut buf).unwrap();
            buf
        };
        let a = run();
        assert_eq!(a, run());
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.starts_with("{\"seed\":") && l.contains("\"Q\":32")));
    }
}
