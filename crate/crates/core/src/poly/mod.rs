//! Univariate polynomials over the integers, `F_l` and `F_q`, and Weil
//! polynomials in the reversed convention `prod (1 - alpha_j T)`.

pub mod complex;
pub mod dense;
mod descent;
pub mod roots;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{field_make, Fe, FieldDesc, Rationals};
pub use descent::{recover_base, MATCH_TOL_BITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("resultant of the zero polynomial")]
    ZeroInput,
    #[error("constant term must be 1, found {0}")]
    NonUnitConstantTerm(BigInt),
    #[error("power sums produced a non-integral coefficient (arithmetic bug)")]
    InternalNonIntegral,
    #[error("exponents {0} and {1} are not coprime")]
    NotCoprimeExponents(u32, u32),
    #[error("polynomials have different degrees {0} and {1}")]
    DegreeMismatch(usize, usize),
    #[error("no root matching reproduces both inputs")]
    NoConsistentMatching,
    #[error("{0} distinct polynomials reproduce both inputs")]
    AmbiguousMatching(usize),
    #[error("base size {0}^{1} overflows")]
    BaseOverflow(u128, u32),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Integer polynomial, coefficient of `T^i` at index `i`, no trailing zeros.
///
/// Serializes as a JSON integer array; coefficients outside the `i64`
/// range are written as decimal strings.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&JsonInt::Small(v))?,
                None => seq.serialize_element(&JsonInt::Big(c.to_string()))?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        let coeffs = raw
            .into_iter()
            .map(|v| match v {
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(BigInt::from)
                    .or_else(|| n.as_u64().map(BigInt::from))
                    .ok_or_else(|| serde::de::Error::custom("coefficient is not an integer")),
                serde_json::Value::String(s) => s.parse::<BigInt>().map_err(serde::de::Error::custom),
                _ => Err(serde::de::Error::custom("coefficient must be an integer or a decimal string")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{sign}")?;
            if !first {
                write!(f, " ")?;
            }
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "T")?,
                (1, false) => write!(f, "{mag}T")?,
                (_, true) => write!(f, "T^{i}")?,
                (_, false) => write!(f, "{mag}T^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }
    pub fn from_i64(v: &[i64]) -> Self {
        IntPoly::new(v.iter().map(|&x| BigInt::from(x)).collect())
    }
    pub fn one() -> Self {
        IntPoly::from_i64(&[1])
    }
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return IntPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }
    /// `T^deg f(1/T)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }
    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.coeffs.last().unwrap().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }
    pub fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }
    /// Exact integer polynomial from rationals, `None` if any is fractional.
    pub fn from_rational(v: &[BigRational]) -> Option<Self> {
        v.iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(IntPoly::new)
    }
    /// Squarefree decomposition over the rationals: `(i, a_i)` with `a_i`
    /// primitive and `self = c * prod a_i^i`.
    pub fn squarefree_parts(&self) -> Vec<(usize, IntPoly)> {
        let parts = dense::squarefree_yun(&Rationals, &self.to_rational());
        parts
            .into_iter()
            .enumerate()
            .filter(|(_, p)| p.len() > 1)
            .map(|(i, p)| (i + 1, clear_denominators(&p).primitive()))
            .collect()
    }
    /// Exact division over the integers.
    pub fn div_exact(&self, o: &Self) -> Option<Self> {
        let q = dense::div_exact(&Rationals, &self.to_rational(), &o.to_rational())?;
        IntPoly::from_rational(&q)
    }
    /// Reduction mod a prime.
    pub fn reduce_mod(&self, ell: u64) -> ModPoly {
        let m = BigInt::from(ell);
        ModPoly::new(ell, self.coeffs.iter().map(|c| c.mod_floor(&m).to_u64().unwrap()).collect())
    }
}

fn clear_denominators(v: &[BigRational]) -> IntPoly {
    let l = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    IntPoly::new(v.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect())
}

/// Weil polynomial with base size `q` and weight `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeilPoly {
    #[serde(rename = "numerator")]
    pub poly: IntPoly,
    pub q: u128,
    pub w: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub verified: bool,
}

impl WeilPoly {
    pub fn new(poly: IntPoly, q: u128, w: u32) -> Result<Self, PolyError> {
        let c0 = poly.coeff(0);
        if !c0.is_one() {
            return Err(PolyError::NonUnitConstantTerm(c0));
        }
        Ok(WeilPoly { poly, q, w, verified: false })
    }
    pub fn one(q: u128, w: u32) -> Self {
        WeilPoly { poly: IntPoly::one(), q, w, verified: true }
    }
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }
    /// `lambda = q^w`.
    pub fn lambda(&self) -> Option<BigInt> {
        Some(BigInt::from(self.q).pow(self.w))
    }
    /// Runs [`is_weil`] and records the outcome in `verified`.
    pub fn verify(mut self, tol: f64) -> (Self, WeilReport) {
        let lambda = self.lambda().unwrap();
        let rep = is_weil(&self.poly, &lambda, tol);
        self.verified = rep.passed;
        (self, rep)
    }
}

/// Polynomial over `F_l` with coefficients in `[0, l)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModPoly {
    pub ell: u64,
    pub coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(ell: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % ell).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { ell, coeffs }
    }
    pub fn from_i64(ell: u64, v: &[i64]) -> Self {
        ModPoly::new(ell, v.iter().map(|&c| c.rem_euclid(ell as i64) as u64).collect())
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn field(&self) -> Result<FieldDesc, PolyError> {
        field_make(self.ell, 1, 0).map(|f| (*f).clone()).map_err(|_| PolyError::NotPrime(self.ell))
    }
    pub fn elems(&self) -> Vec<Fe> {
        self.coeffs.iter().map(|&c| Fe(c)).collect()
    }
    pub fn from_elems(ell: u64, v: &[Fe]) -> Self {
        ModPoly::new(ell, v.iter().map(|c| c.0).collect())
    }
    /// Monic gcd over `F_l`.
    pub fn gcd(&self, o: &Self) -> Result<Self, PolyError> {
        assert_eq!(self.ell, o.ell, "gcd of polynomials over different primes");
        if self.coeffs.is_empty() && o.coeffs.is_empty() {
            return Err(PolyError::BothZero);
        }
        let f = self.field()?;
        Ok(ModPoly::from_elems(self.ell, &dense::gcd(&f, &self.elems(), &o.elems())))
    }
    pub fn is_squarefree(&self) -> Result<bool, PolyError> {
        let f = self.field()?;
        let d = dense::derivative(&f, &self.elems());
        Ok(dense::gcd(&f, &self.elems(), &d).len() <= 1)
    }
}

/// Gcd over the rationals, normalized to constant term 1 when the constant
/// term is nonzero and monic otherwise.
pub fn poly_gcd(f: &IntPoly, g: &IntPoly) -> Result<Vec<BigRational>, PolyError> {
    if f.is_zero() && g.is_zero() {
        return Err(PolyError::BothZero);
    }
    let d = dense::gcd(&Rationals, &f.to_rational(), &g.to_rational());
    let c0 = d[0].clone();
    if c0.is_zero() {
        Ok(d)
    } else {
        Ok(d.iter().map(|c| c / &c0).collect())
    }
}

/// Gcd of two polynomials with constant term 1; the result is integral with
/// constant term 1 by Gauss's lemma.
pub fn weil_gcd(f: &IntPoly, g: &IntPoly) -> Result<IntPoly, PolyError> {
    let d = poly_gcd(f, g)?;
    IntPoly::from_rational(&d).ok_or(PolyError::InternalNonIntegral)
}

/// Determinant by Bareiss fraction-free elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester matrix of `f` and `g` (leading coefficients first in each row).
pub fn sylvester(f: &IntPoly, g: &IntPoly) -> Vec<Vec<BigInt>> {
    let m = f.degree().unwrap_or(0);
    let n = g.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (i, c) in f.coeffs.iter().rev().enumerate() {
            row[shift + i] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (i, c) in g.coeffs.iter().rev().enumerate() {
            row[shift + i] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// `Res(f, g)` as the Sylvester determinant.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> Result<BigInt, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    Ok(bareiss_det(sylvester(f, g)))
}

/// Power sums `s_1..s_m` of the inverse roots of `f` (constant term 1).
pub fn power_sums(f: &IntPoly, m: usize) -> Vec<BigInt> {
    let mut s: Vec<BigInt> = Vec::with_capacity(m + 1);
    s.push(BigInt::from(f.degree().unwrap_or(0)));
    for k in 1..=m {
        let mut v = -BigInt::from(k) * f.coeff(k);
        for i in 1..k {
            v -= f.coeff(i) * &s[k - i];
        }
        s.push(v);
    }
    s.remove(0);
    s
}

/// Reconstructs `1 + b_1 T + ... + b_d T^d` from power sums `t_1..t_d`.
pub fn from_power_sums(t: &[BigInt]) -> Result<IntPoly, PolyError> {
    let mut b = vec![BigInt::one()];
    for k in 1..=t.len() {
        let mut acc = BigInt::zero();
        for i in 0..k {
            acc += &b[i] * &t[k - i - 1];
        }
        let (q, r) = (-acc).div_rem(&BigInt::from(k));
        if !r.is_zero() {
            return Err(PolyError::InternalNonIntegral);
        }
        b.push(q);
    }
    Ok(IntPoly::new(b))
}

/// `prod (1 - alpha_j^r T)` from `prod (1 - alpha_j T)`, exactly.
pub fn power_map_poly(f: &IntPoly, r: u32) -> Result<IntPoly, PolyError> {
    let c0 = f.coeff(0);
    if !c0.is_one() {
        return Err(PolyError::NonUnitConstantTerm(c0));
    }
    let d = f.degree().unwrap_or(0);
    if r == 1 || d == 0 {
        return Ok(f.clone());
    }
    let s = power_sums(f, d * r as usize);
    let t: Vec<BigInt> = (1..=d).map(|k| s[k * r as usize - 1].clone()).collect();
    from_power_sums(&t)
}

pub fn power_map(f: &WeilPoly, r: u32) -> Result<WeilPoly, PolyError> {
    let poly = power_map_poly(&f.poly, r)?;
    let q = f.q.checked_pow(r).ok_or(PolyError::BaseOverflow(f.q, r))?;
    Ok(WeilPoly { poly, q, w: f.w, verified: f.verified })
}

/// Outcome of [`is_weil`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilReport {
    pub passed: bool,
    /// `+1` or `-1` for the satisfied functional equation, if any.
    pub functional_sign: Option<i8>,
    /// Largest `| |alpha| - sqrt(lambda) | / sqrt(lambda)` over inverse roots.
    pub max_relative_deviation: f64,
    pub reason: Option<String>,
}

fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Functional-equation sign: `a_{s-i} = sign * lambda^{s/2 - i} a_i` for all
/// `i`. Odd degrees need `lambda` to be a perfect square.
pub fn functional_equation_sign(f: &IntPoly, lambda: &BigInt) -> Option<i8> {
    let s = f.degree().unwrap_or(0);
    let root = if s % 2 == 1 { Some(isqrt_exact(lambda)?) } else { None };
    // lambda^{s/2 - i}, via sqrt(lambda) when s is odd
    let scaled = |i: usize| -> BigInt {
        match &root {
            None => lambda.pow((s / 2 - i) as u32),
            Some(r) => r.pow((s - 2 * i) as u32),
        }
    };
    'signs: for sign in [1i8, -1] {
        for i in 0..=s / 2 {
            let lhs = f.coeff(s - i);
            let rhs = f.coeff(i) * scaled(i) * BigInt::from(sign);
            if lhs != rhs {
                continue 'signs;
            }
        }
        return Some(sign);
    }
    None
}

/// Checks the functional equation and that every inverse root has absolute
/// value `sqrt(lambda)` to relative tolerance `tol`.
pub fn is_weil(f: &IntPoly, lambda: &BigInt, tol: f64) -> WeilReport {
    let c0 = f.coeff(0);
    if !c0.is_one() {
        return WeilReport {
            passed: false,
            functional_sign: None,
            max_relative_deviation: f64::NAN,
            reason: Some(format!("constant term {c0} is not 1")),
        };
    }
    if f.degree() == Some(0) {
        return WeilReport { passed: true, functional_sign: Some(1), max_relative_deviation: 0.0, reason: None };
    }
    let sign = functional_equation_sign(f, lambda);
    let target = lambda.to_f64().unwrap_or(f64::INFINITY).sqrt();
    let mut worst: f64 = 0.0;
    for (r, _) in complex::inverse_roots(f) {
        worst = worst.max((r.abs_f64() - target).abs() / target);
    }
    let reason = match (sign, worst < tol) {
        (Some(_), true) => None,
        (None, true) => Some("coefficients violate the functional equation for both signs".to_string()),
        (_, false) => Some(format!("inverse root modulus deviates from sqrt(lambda) by {worst:.3e} relative")),
    };
    WeilReport { passed: reason.is_none(), functional_sign: sign, max_relative_deviation: worst, reason }
}
