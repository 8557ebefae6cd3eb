//! Closed-form bounds on cell counts, cohomology torsion, Betti numbers
//! and torsion-free primes, evaluated exactly as [`TowerValue`]s.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{Mag, TorsionError, TowerValue};

fn t(n: u64) -> TowerValue {
    TowerValue::from(n)
}

fn binom(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `(2d)^(3^(N+1)) * m^(2^N)`.
pub fn cell_bound(n: u32, d: u64, m: u64) -> TowerValue {
    let a = TowerValue::pow(2 * d, TowerValue::pow(3u32, t(n as u64 + 1)));
    let b = TowerValue::pow(m, TowerValue::pow(2u32, t(n as u64)));
    TowerValue::mul(a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMode {
    RealAffine,
    ComplexProjective,
    Simple,
}

impl std::str::FromStr for BoundMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "real-affine" => Ok(BoundMode::RealAffine),
            "complex-projective" => Ok(BoundMode::ComplexProjective),
            "simple" => Ok(BoundMode::Simple),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

/// One inequality of a proof chain with its verdict (`None`: the interval
/// bounds could not separate the two sides).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    pub claim: String,
    pub holds: Option<bool>,
}

fn step(claim: impl Into<String>, lhs: &TowerValue, rhs: &TowerValue) -> ChainStep {
    ChainStep { claim: claim.into(), holds: lhs.le(rhs) }
}

fn mag_step(claim: impl Into<String>, lhs: Mag, rhs: Mag) -> ChainStep {
    ChainStep { claim: claim.into(), holds: lhs.compare(rhs).map(|o| o != std::cmp::Ordering::Greater) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionBound {
    pub mode: BoundMode,
    #[serde(serialize_with = "display")]
    pub bound: TowerValue,
    /// The number `L` with bound `L!`, for the factorial modes.
    #[serde(serialize_with = "display_opt")]
    pub cells: Option<TowerValue>,
    pub log2_bound: (u32, f64, f64),
    pub chain: Vec<ChainStep>,
}

fn display<S: serde::Serializer>(v: &TowerValue, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn display_opt<S: serde::Serializer>(v: &Option<TowerValue>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn real_affine_cells(n: u64, d: u64) -> TowerValue {
    let a = TowerValue::pow(2 * d, TowerValue::pow(3u32, t(n + 1)));
    let b = TowerValue::pow(binom(n + d, n), TowerValue::pow(2u32, t(n)));
    TowerValue::mul(a, b)
}

/// Bound on `#H^i(X, Z)_tors` in the requested form.
pub fn betti_torsion_bound(n: u32, d: u64, mode: BoundMode) -> Result<TorsionBound, TorsionError> {
    let n64 = n as u64;
    let (bound, cells, chain) = match mode {
        BoundMode::RealAffine => {
            let l = real_affine_cells(n64, d);
            (TowerValue::factorial(l.clone()), Some(l), Vec::new())
        }
        BoundMode::ComplexProjective => {
            let m2 = (n64 + 1) * (n64 + 1);
            let a = TowerValue::pow(2 * d, TowerValue::pow(3u32, t(m2 + 1)));
            let b = TowerValue::pow(binom(m2 + d, m2), TowerValue::pow(2u32, t(m2)));
            let l = TowerValue::mul(a, b);
            (TowerValue::factorial(l.clone()), Some(l), Vec::new())
        }
        BoundMode::Simple => {
            if d < 2 || n < 4 {
                return Err(TorsionError::ModeRequiresD2);
            }
            let bound = TowerValue::pow(2u32, TowerValue::pow(d, TowerValue::pow(2u32, t(3 * n64 * n64))));
            (bound, None, simple_chain(n64, d))
        }
    };
    let m = bound.log2_mag();
    Ok(TorsionBound { mode, log2_bound: (m.height, m.lo, m.hi), bound, cells, chain })
}

/// The inequalities reducing the complex projective bound to
/// `2^(d^(2^(3N^2)))`, with `M = N + 1`.
pub fn simple_chain(n: u64, d: u64) -> Vec<ChainStep> {
    let m = n + 1;
    let m2 = m * m;
    let binom_val = TowerValue::from(binom(m2 + d, m2));
    let l = TowerValue::mul(
        TowerValue::pow(2 * d, TowerValue::pow(3u32, t(m2 + 1))),
        TowerValue::pow(binom(m2 + d, m2), TowerValue::pow(2u32, t(m2))),
    );
    // exponent e with L <= d^e
    let e = TowerValue::add(
        TowerValue::mul(t(2), TowerValue::pow(3u32, t(m2 + 1))),
        TowerValue::mul(TowerValue::pow(m, t(3)), TowerValue::pow(2u32, t(m2))),
    );
    let two_e = TowerValue::mul(t(2), e.clone());
    let mut chain = vec![
        step(
            format!("binom(M^2+d, M^2) <= (M^2+d)^(M^2) at M={m}, d={d}"),
            &binom_val,
            &TowerValue::pow(m2 + d, t(m2)),
        ),
        step(format!("(M^2+d)^(M^2) <= d^(M^3) at M={m}, d={d}"), &TowerValue::pow(m2 + d, t(m2)), &TowerValue::pow(d, t(m * m2))),
        step("L <= d^(2*3^(M^2+1) + M^3*2^(M^2))", &l, &TowerValue::pow(d, e.clone())),
    ];
    // log_d log_2 L! <= 2 log_d L, i.e. log_2 L! <= L^2
    let fact = TowerValue::factorial(l.clone());
    chain.push(mag_step("log_2 L! <= L^2", fact.log2_mag(), TowerValue::mul(l.clone(), l).mag()));
    chain.push(step(
        format!("2 log_d L <= 4*3^(M^2+1) + M^3*2^(M^2) <= 2^(3(M-1)^2) at M={m}"),
        &two_e,
        &TowerValue::pow(2u32, t(3 * (m - 1) * (m - 1))),
    ));
    let bound = TowerValue::pow(2u32, TowerValue::pow(d, TowerValue::pow(2u32, t(3 * n * n))));
    chain.push(step("L! <= 2^(d^(2^(3N^2)))", &fact, &bound));
    chain
}

/// `N d (2d - 1)^(2N + 1)`.
pub fn milnor_bound(n: u32, d: u64) -> BigUint {
    BigUint::from(n) * d * BigUint::from(2 * d - 1).pow(2 * n + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeChoice {
    /// Smallest prime dividing none of the given orders (exact path).
    pub ell: Option<u64>,
    /// `k = N d^(2^(3N^2))` and the steps `p_k < k(ln k + 2 ln ln k) <= k^2
    /// <= d^(2^(4N^2))`.
    #[serde(serialize_with = "display_opt")]
    pub k: Option<TowerValue>,
    #[serde(serialize_with = "display_opt")]
    pub ell_bound: Option<TowerValue>,
    pub chain: Vec<ChainStep>,
}

fn is_prime(n: u64) -> bool {
    crate::ff::is_prime(n)
}

/// Exact path when torsion orders are supplied, bound-only path otherwise.
pub fn torsion_free_prime(orders: Option<&[BigUint]>, d: u64, n: u32) -> PrimeChoice {
    if let Some(orders) = orders {
        let ell = (2u64..)
            .filter(|&p| is_prime(p))
            .find(|&p| orders.iter().all(|o| o.is_zero() || !(o % p).is_zero()))
            .unwrap();
        return PrimeChoice { ell: Some(ell), k: None, ell_bound: None, chain: Vec::new() };
    }
    let n64 = n as u64;
    let k = TowerValue::mul(t(n64), TowerValue::pow(d, TowerValue::pow(2u32, t(3 * n64 * n64))));
    let ell_bound = TowerValue::pow(d, TowerValue::pow(2u32, t(4 * n64 * n64)));
    let k2 = TowerValue::mul(k.clone(), k.clone());
    // k (ln k + 2 ln ln k) <= k ln 2 (log2 k + 2 log2 log2 k)
    let km = k.mag();
    let lk = km.log2();
    let llk = lk.log2();
    let rosser = km.mul(Mag::exact(std::f64::consts::LN_2)).mul(lk.add(Mag::exact(2.0).mul(llk)));
    let chain = vec![
        mag_step("k (ln k + 2 ln ln k) <= k^2", rosser, k2.mag()),
        step("k^2 <= d^(2^(4N^2))", &k2, &ell_bound),
    ];
    PrimeChoice { ell: None, k: Some(k), ell_bound: Some(ell_bound), chain }
}
