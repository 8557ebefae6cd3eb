//! The equidistribution error term and its check on a pencil of plane
//! cubics.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{group_order, CharpolyCensus, Family, GroupError, GroupSpec, Sampling};
use crate::ff::{splitmix64, FieldDesc};
use crate::pencil::{fibre_equation, sample_smooth_fibre, PencilDesc};
use crate::variety::curve_numerator;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KatzBound {
    /// Exact rational value as `num/den`.
    pub exact: String,
    pub value: f64,
    /// At least 1: the inequality says nothing.
    pub vacuous: bool,
}

/// `ceil(sqrt(n) * 2^64) / 2^64`.
fn sqrt_up(n: &BigUint) -> BigRational {
    let scaled = n << 128u32;
    let mut r = scaled.sqrt();
    if &r * &r < scaled {
        r += 1u32;
    }
    BigRational::new(BigInt::from(r), BigInt::one() << 64u32)
}

/// `|chi| #G sqrt(q^w) / #U`, with the square root rounded up at 64 bits.
pub fn katz_error_bound(chi: i64, g_order: &BigUint, q: u64, w: u32, u_count: u64) -> KatzBound {
    assert!(u_count >= 1, "U(F_Q) must be nonempty");
    let qw = BigUint::from(q).pow(w);
    let v = BigRational::from_integer(BigInt::from(chi).abs())
        * BigRational::from_integer(BigInt::from(g_order.clone()))
        * sqrt_up(&qw)
        / BigRational::from_integer(BigInt::from(u_count));
    let value = v.to_f64().unwrap_or(f64::INFINITY);
    KatzBound { exact: format!("{}/{}", v.numer(), v.denom()), vacuous: v >= BigRational::one(), value }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquidistReport {
    pub ell: u64,
    pub q: u64,
    pub w: u32,
    pub big_q: u64,
    /// `Q mod l`, the multiplier of every Frobenius.
    pub lambda: u64,
    pub residues: Vec<u64>,
    pub samples: u64,
    pub hits: u64,
    pub empirical: f64,
    pub exact_numerator: u64,
    pub exact_denominator: u64,
    pub exact_fraction: f64,
    pub difference: f64,
    pub chi_u: i64,
    pub u_count: u64,
    /// `#U(F_Q)` is exact when every singular fibre over `F_Q` was found.
    pub u_count_exact: bool,
    pub katz: KatzBound,
    pub sigma3: f64,
    pub within: bool,
    /// Trace of Frobenius of each sampled fibre, in sample order.
    pub traces: Vec<i64>,
}

/// Samples fibres over `F_Q` and compares the frequency of traces in
/// `residues` (mod `l`) with the proportion in the `Q mod l` coset of
/// `GSp(2, F_l)`.
pub fn equidistribution_check(
    p: &PencilDesc,
    ell: u64,
    q_desc: &FieldDesc,
    residues: &[u64],
    samples: u64,
    seed: u64,
) -> Result<EquidistReport, GroupError> {
    if p.fibre_dim() != 1 || p.degree() != 3 {
        return Err(GroupError::Unsupported(p.fibre_dim()));
    }
    let pf = p.over_field(q_desc)?;
    let big_q = q_desc.size();
    if big_q % ell == 0 {
        return Err(GroupError::EllDividesQ(ell));
    }
    let scan = p.scan.as_ref().ok_or(crate::pencil::PencilError::NotScanned)?;
    let chi_u = p.euler_char_u()?;
    let w = pf.w;
    let singular_rational: u64 = p.z.iter().filter(|e| w % e.degree == 0).map(|e| e.degree as u64).sum();
    let u_count_exact = scan.complete || (1..=w).filter(|d| w % d == 0).all(|d| d <= scan.k_scan);
    let u_count = big_q + 1 - singular_rational;

    let traces: Vec<i64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<i64, GroupError> {
            let t = sample_smooth_fibre(&pf, splitmix64(seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15)))?;
            let c = fibre_equation(&pf, &t)?;
            let num = curve_numerator(&c, 1)?;
            Ok(-num.poly.coeff(1).to_i64().unwrap())
        })
        .collect::<Result<_, _>>()?;
    let residues: Vec<u64> = {
        let mut r: Vec<u64> = residues.iter().map(|x| x % ell).collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    let hits = traces.iter().filter(|&&a| residues.contains(&(a.rem_euclid(ell as i64) as u64))).count() as u64;
    let spec = GroupSpec::new(Family::GSp, 2, ell)?;
    let lambda = big_q % ell;
    let census = CharpolyCensus::build(&spec, lambda, Sampling::default())?;
    let exact = census.trace_fraction(&residues);
    let exact_fraction = exact.value();
    let empirical = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
    let difference = (empirical - exact_fraction).abs();
    let katz = katz_error_bound(chi_u, &group_order(&spec), p.base().size(), w, u_count.max(1));
    let sigma3 = if samples == 0 { 0.0 } else { 3.0 * (exact_fraction * (1.0 - exact_fraction) / samples as f64).sqrt() };
    let within = difference <= katz.value + sigma3;
    Ok(EquidistReport {
        ell,
        q: p.base().size(),
        w,
        big_q,
        lambda,
        residues,
        samples,
        hits,
        empirical,
        exact_numerator: exact.numerator,
        exact_denominator: exact.denominator,
        exact_fraction,
        difference,
        chi_u,
        u_count,
        u_count_exact,
        katz,
        sigma3,
        within,
        traces,
    })
}

impl EquidistReport {
    /// Exact bound as a rational, for callers that compare without floats.
    pub fn katz_rational(&self) -> BigRational {
        let (n, d) = self.katz.exact.split_once('/').unwrap();
        BigRational::new(n.parse().unwrap(), d.parse().unwrap())
    }

    pub fn is_informative(&self) -> bool {
        !self.katz.vacuous && !self.katz_rational().is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{extension, field_make, Fe};
    use crate::pencil::ClassifyMode;
    use crate::variety::{fermat, ProjVariety};

    #[test]
    fn bound_examples() {
        let b = katz_error_bound(-10, &BigUint::from(48u32), 2, 20, (1 << 20) - 11);
        let direct = 10.0 * 48.0 * 1024.0 / ((1u64 << 20) - 11) as f64;
        assert!((b.value - direct).abs() < 1e-12);
        assert!((b.value - 0.469).abs() < 1e-3);
        assert!(!b.vacuous);
        assert_eq!(katz_error_bound(0, &BigUint::from(48u32), 2, 20, 5).value, 0.0);
        assert!(katz_error_bound(10, &BigUint::from(48u32), 2, 4, 3).vacuous);
        // rounding is upward for non-squares
        let odd = katz_error_bound(1, &BigUint::one(), 2, 1, 1);
        assert!(odd.value >= 2f64.sqrt());
        let r = sqrt_up(&BigUint::from(2u32));
        assert!(&r * &r >= BigRational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn trivial_residue_sets() {
        let f2 = field_make(2, 1, 0).unwrap();
        let x = ProjVariety::hypersurface(f2, fermat(4, 3)).unwrap();
        let mut p = PencilDesc::new(x, vec![Fe(0), Fe(0), Fe(0), Fe(1)], vec![Fe(1), Fe(0), Fe(0), Fe(0)]).unwrap();
        let _ = p.scan_nodal_locus(4, ClassifyMode::Algebraic);
        let q = extension(p.base(), 6, 0).unwrap().target;
        let all = equidistribution_check(&p, 5, &q, &[0, 1, 2, 3, 4], 30, 1).unwrap();
        assert_eq!((all.empirical, all.exact_fraction, all.difference), (1.0, 1.0, 0.0));
        let none = equidistribution_check(&p, 5, &q, &[], 30, 1).unwrap();
        assert_eq!((none.empirical, none.exact_fraction), (0.0, 0.0));
        assert!(all.traces.iter().all(|a| a.unsigned_abs() <= 2 * 8));
        assert_eq!(equidistribution_check(&p, 2, &q, &[0], 5, 1), Err(GroupError::EllDividesQ(2)));
    }
}
