//! Complex roots of integer polynomials in big fixed-point arithmetic.
//!
//! A real number `x` is stored as the integer `round(x * 2^FRAC_BITS)`.
//! Roots are located with a double-precision Aberth iteration and then
//! refined by Aberth steps in fixed point.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use super::IntPoly;

/// Fractional bits of the fixed-point representation.
pub const FRAC_BITS: u32 = 192;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFix {
    pub re: BigInt,
    pub im: BigInt,
}

fn fmul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FRAC_BITS
}

fn fdiv(a: &BigInt, b: &BigInt) -> BigInt {
    (a << FRAC_BITS) / b
}

fn to_f64(a: &BigInt) -> f64 {
    let bits = a.bits();
    if bits > 900 {
        let shift = bits - 900;
        return (a >> shift).to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32 - FRAC_BITS as i32);
    }
    a.to_f64().unwrap_or(f64::NAN) / 2f64.powi(FRAC_BITS as i32)
}

fn from_f64(x: f64) -> BigInt {
    if x == 0.0 || !x.is_finite() {
        return BigInt::zero();
    }
    let (m, e) = frexp(x);
    // x = m * 2^e with m in [0.5, 1); take 53 mantissa bits
    let mant = BigInt::from((m * (1u64 << 53) as f64) as i64);
    let shift = e - 53 + FRAC_BITS as i32;
    if shift >= 0 {
        mant << shift as usize
    } else {
        mant >> (-shift) as usize
    }
}

fn frexp(x: f64) -> (f64, i32) {
    let e = x.abs().log2().floor() as i32 + 1;
    let m = x / 2f64.powi(e);
    if m.abs() >= 1.0 {
        (m / 2.0, e + 1)
    } else if m.abs() < 0.5 {
        (m * 2.0, e - 1)
    } else {
        (m, e)
    }
}

impl CFix {
    pub fn zero() -> Self {
        CFix { re: BigInt::zero(), im: BigInt::zero() }
    }
    pub fn one() -> Self {
        CFix { re: BigInt::from(1) << FRAC_BITS, im: BigInt::zero() }
    }
    pub fn from_int(n: &BigInt) -> Self {
        CFix { re: n << FRAC_BITS, im: BigInt::zero() }
    }
    pub fn from_c64(z: Complex64) -> Self {
        CFix { re: from_f64(z.re), im: from_f64(z.im) }
    }
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
    pub fn add(&self, o: &Self) -> Self {
        CFix { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    pub fn sub(&self, o: &Self) -> Self {
        CFix { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    pub fn mul(&self, o: &Self) -> Self {
        CFix {
            re: fmul(&self.re, &o.re) - fmul(&self.im, &o.im),
            im: fmul(&self.re, &o.im) + fmul(&self.im, &o.re),
        }
    }
    /// `|z|^2` in fixed point.
    pub fn norm_sqr(&self) -> BigInt {
        fmul(&self.re, &self.re) + fmul(&self.im, &self.im)
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn div(&self, o: &Self) -> Option<Self> {
        let den = o.norm_sqr();
        if den.is_zero() {
            return None;
        }
        let re = fmul(&self.re, &o.re) + fmul(&self.im, &o.im);
        let im = fmul(&self.im, &o.re) - fmul(&self.re, &o.im);
        Some(CFix { re: fdiv(&re, &den), im: fdiv(&im, &den) })
    }
    pub fn inv(&self) -> Option<Self> {
        CFix::one().div(self)
    }
    /// Integer power, negative exponents through the inverse.
    pub fn powi(&self, e: i64) -> Option<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = CFix::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        Some(acc)
    }
    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }
    /// `|self - o| < tol * |o|` with `tol = 2^-tol_bits`, decided in fixed point.
    pub fn close_to(&self, o: &Self, tol_bits: u32) -> bool {
        let d = self.sub(o).norm_sqr();
        let scale = o.norm_sqr().max(BigInt::from(1));
        (d << (2 * tol_bits as usize)) < scale
    }
    /// Nearest integer to the real part; `None` if the imaginary part or the
    /// fractional part exceeds `2^-tol_bits`.
    pub fn round_real(&self, tol_bits: u32) -> Option<BigInt> {
        let half = BigInt::from(1) << (FRAC_BITS - 1);
        let r = (&self.re + &half) >> FRAC_BITS;
        let frac = &self.re - (&r << FRAC_BITS);
        let lim = BigInt::from(1) << (FRAC_BITS - tol_bits);
        (frac.abs() < lim && self.im.abs() < lim).then_some(r)
    }
}

fn horner(coeffs: &[CFix], z: &CFix) -> (CFix, CFix) {
    let mut p = CFix::zero();
    let mut dp = CFix::zero();
    for c in coeffs.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(c);
    }
    (p, dp)
}

fn aberth_f64(coeffs: &[BigInt]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = to_f64(&(&coeffs[n] << FRAC_BITS));
    let low = to_f64(&(&coeffs[0] << FRAC_BITS));
    let radius = if low == 0.0 { 1.0 } else { (low / lead).abs().powf(1.0 / n as f64) };
    // scaled monic polynomial in u = z / radius
    let c: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let v = to_f64(&(a << FRAC_BITS)) / lead * radius.powi(i as i32 - n as i32);
            Complex64::new(v, 0.0)
        })
        .collect();
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for a in c.iter().rev() {
                dp = dp * z[k] + p;
                p = p * z[k] + a;
            }
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                worst = worst.max(w.norm());
            }
        }
        if worst < 1e-14 {
            break;
        }
    }
    z.into_iter().map(|u| u * radius).collect()
}

/// Roots of a squarefree integer polynomial (low coefficient first).
pub fn squarefree_roots(coeffs: &[BigInt]) -> Vec<CFix> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let fixed: Vec<CFix> = coeffs.iter().map(CFix::from_int).collect();
    if n == 1 {
        let r = fixed[0].div(&fixed[1]).expect("nonzero leading coefficient");
        return vec![CFix { re: -r.re, im: -r.im }];
    }
    let mut z: Vec<CFix> = aberth_f64(coeffs).into_iter().map(CFix::from_c64).collect();
    let target = BigInt::from(1) << 24;
    for _ in 0..200 {
        let mut done = true;
        for k in 0..n {
            let (p, dp) = horner(&fixed, &z[k]);
            if p.is_zero() {
                continue;
            }
            let Some(ratio) = p.div(&dp) else { continue };
            let mut s = CFix::zero();
            for j in 0..n {
                if j != k {
                    if let Some(t) = z[k].sub(&z[j]).inv() {
                        s = s.add(&t);
                    }
                }
            }
            let den = CFix::one().sub(&ratio.mul(&s));
            let w = ratio.div(&den).unwrap_or(ratio);
            let lim = &target * BigInt::from(z[k].abs_f64().max(1.0).ceil() as u64);
            if w.re.abs() >= lim || w.im.abs() >= lim {
                done = false;
            }
            z[k] = z[k].sub(&w);
        }
        if done {
            break;
        }
    }
    z
}

/// Complex roots of `T^s f(1/T)`, i.e. the inverse roots `alpha_j` of
/// `f = prod (1 - alpha_j T)`, each with its multiplicity.
pub fn inverse_roots(f: &IntPoly) -> Vec<(CFix, usize)> {
    let rev = f.reversed();
    let mut out = Vec::new();
    for (mult, part) in rev.squarefree_parts() {
        for r in squarefree_roots(part.coeffs()) {
            out.push((r, mult));
        }
    }
    out
}
