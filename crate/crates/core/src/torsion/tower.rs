//! Exact expressions for astronomically large integers, with comparison
//! through outward-rounded iterated logarithms.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Values with at most this many bits are always stored as explicit
/// integers.
pub const EXPLICIT_BITS: u64 = 4096;

const EPS: f64 = 1e-12;
const RAISE_ABOVE: f64 = 1.0e307;
const LOWER_BELOW: f64 = 1000.0;

/// A nonnegative integer given exactly, either explicitly or as a nested
/// expression. Values shorter than `EXPLICIT_BITS - 8` bits are always
/// `Int`, so equal small values have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TowerValue {
    Int(BigUint),
    /// `base^exp * mult`, `base >= 2`.
    Pow { base: BigUint, exp: Box<TowerValue>, mult: Box<TowerValue> },
    Mul(Box<TowerValue>, Box<TowerValue>),
    Sum(Box<TowerValue>, Box<TowerValue>),
    Factorial(Box<TowerValue>),
}

/// `E^h(lo) <= v <= E^h(hi)` where `E(x) = 2^x` is applied `height` times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mag {
    pub height: u32,
    pub lo: f64,
    pub hi: f64,
}

fn widen(lo: f64, hi: f64) -> (f64, f64) {
    (lo - lo.abs() * EPS - f64::MIN_POSITIVE, hi + hi.abs() * EPS + f64::MIN_POSITIVE)
}

fn log2_f(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.log2()
    }
}

impl Mag {
    pub fn exact(x: f64) -> Mag {
        let (lo, hi) = widen(x, x);
        Mag { height: 0, lo: lo.max(0.0), hi }.normalize()
    }

    pub fn interval(lo: f64, hi: f64) -> Mag {
        let (lo, hi) = widen(lo, hi);
        Mag { height: 0, lo, hi }.normalize()
    }

    fn normalize(mut self) -> Mag {
        loop {
            if self.hi > RAISE_ABOVE || self.hi.is_infinite() {
                let (lo, hi) = widen(log2_f(self.lo), log2_f(self.hi));
                self = Mag { height: self.height + 1, lo, hi };
            } else if self.height > 0 && self.hi < LOWER_BELOW {
                let (lo, hi) = widen(self.lo.exp2(), self.hi.exp2());
                self = Mag { height: self.height - 1, lo, hi };
            } else {
                return self;
            }
        }
    }

    /// Same bounds expressed at a larger height.
    pub fn lift(self, h: u32) -> Mag {
        let mut m = self;
        while m.height < h {
            let (lo, hi) = widen(log2_f(m.lo), log2_f(m.hi));
            m = Mag { height: m.height + 1, lo, hi };
        }
        m
    }

    pub fn log2(self) -> Mag {
        if self.height > 0 {
            Mag { height: self.height - 1, ..self }.normalize()
        } else {
            let (lo, hi) = widen(log2_f(self.lo), log2_f(self.hi));
            Mag { height: 0, lo, hi }.normalize()
        }
    }

    pub fn exp2(self) -> Mag {
        Mag { height: self.height + 1, ..self }.normalize()
    }

    fn is_zero(&self) -> bool {
        self.height == 0 && self.hi <= f64::MIN_POSITIVE * 2.0
    }

    pub fn add(self, o: Mag) -> Mag {
        if self.height == 0 && o.height == 0 {
            return Mag::interval(self.lo + o.lo, self.hi + o.hi);
        }
        let h = self.height.max(o.height);
        let (a, b) = (self.lift(h), o.lift(h));
        let lo = a.lo.max(b.lo);
        let top = a.hi.max(b.hi);
        // a + b <= 2 max(a, b); at height >= 2 the doubling is far below EPS
        let hi = if h == 1 { top + 1.0 } else { top };
        let (lo, hi) = widen(lo, hi);
        Mag { height: h, lo, hi }.normalize()
    }

    pub fn mul(self, o: Mag) -> Mag {
        if self.is_zero() || o.is_zero() {
            return Mag::exact(0.0);
        }
        if self.height == 0 && o.height == 0 && self.hi * o.hi < RAISE_ABOVE {
            return Mag::interval(self.lo * o.lo, self.hi * o.hi);
        }
        self.log2().add(o.log2()).exp2()
    }

    /// Lower bound shifted down by `c`; used for Stirling-type estimates
    /// on values of at least 1.
    fn sub_const(self, c: f64) -> Mag {
        if self.height == 0 {
            Mag::interval((self.lo - c).max(0.0), (self.hi - c).max(0.0))
        } else {
            // values here exceed 2^1000, so subtracting c moves log2 by < EPS
            let (lo, hi) = widen(self.lo, self.hi);
            Mag { height: self.height, lo, hi }
        }
    }

    /// Interval comparison; `None` when the bounds overlap.
    pub fn compare(self, o: Mag) -> Option<Ordering> {
        let h = self.height.max(o.height);
        let (a, b) = (self.lift(h), o.lift(h));
        if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo > b.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Midpoint estimate of the iterated log at this height.
    pub fn mid(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }
}

fn bits(n: &BigUint) -> u64 {
    n.bits()
}

fn int_mag(n: &BigUint) -> Mag {
    let b = bits(n);
    if b <= 1000 {
        return Mag::exact(n.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = b - 64;
    let top = (n >> shift).to_u64().unwrap() as f64;
    let (lo, hi) = widen(shift as f64 + top.log2(), shift as f64 + (top + 1.0).log2());
    Mag { height: 1, lo, hi }.normalize()
}

impl From<u64> for TowerValue {
    fn from(n: u64) -> Self {
        TowerValue::Int(BigUint::from(n))
    }
}

impl From<BigUint> for TowerValue {
    fn from(n: BigUint) -> Self {
        TowerValue::Int(n)
    }
}

impl TowerValue {
    pub fn int(n: impl Into<BigUint>) -> Self {
        TowerValue::Int(n.into())
    }

    pub fn as_int(&self) -> Option<&BigUint> {
        match self {
            TowerValue::Int(n) => Some(n),
            _ => None,
        }
    }

    fn is_one(&self) -> bool {
        matches!(self, TowerValue::Int(n) if n.is_one())
    }

    fn explicit_if_small(self) -> Self {
        if matches!(self, TowerValue::Int(_)) {
            return self;
        }
        let m = self.mag();
        if m.height == 0 && m.hi < 2f64.powi(EXPLICIT_BITS as i32 - 8).min(RAISE_ABOVE) || m.height == 1 && m.hi < (EXPLICIT_BITS - 8) as f64 {
            if let Some(n) = self.evaluate() {
                return TowerValue::Int(n);
            }
        }
        self
    }

    /// Explicit value, computed only when it has at most
    /// [`EXPLICIT_BITS`] bits.
    pub fn evaluate(&self) -> Option<BigUint> {
        let m = self.mag();
        if !(m.height == 0 || m.height == 1 && m.hi <= EXPLICIT_BITS as f64) {
            return None;
        }
        match self {
            TowerValue::Int(n) => Some(n.clone()),
            TowerValue::Pow { base, exp, mult } => {
                let e = exp.evaluate()?.to_u32()?;
                Some(base.pow(e) * mult.evaluate()?)
            }
            TowerValue::Mul(a, b) => Some(a.evaluate()? * b.evaluate()?),
            TowerValue::Sum(a, b) => Some(a.evaluate()? + b.evaluate()?),
            TowerValue::Factorial(n) => {
                let n = n.evaluate()?.to_u64()?;
                Some((1..=n).fold(BigUint::one(), |acc, i| acc * i))
            }
        }
    }

    pub fn pow(base: impl Into<BigUint>, exp: TowerValue) -> TowerValue {
        let base: BigUint = base.into();
        if base.is_zero() {
            return TowerValue::int(if matches!(&exp, TowerValue::Int(e) if e.is_zero()) { 1u32 } else { 0 });
        }
        if base.is_one() {
            return TowerValue::int(1u32);
        }
        if let TowerValue::Int(e) = &exp {
            if e.to_u64().is_some_and(|e| e.saturating_mul(bits(&base)) <= EXPLICIT_BITS) {
                return TowerValue::Int(base.pow(e.to_u32().unwrap()));
            }
        }
        TowerValue::Pow { base, exp: Box::new(exp), mult: Box::new(TowerValue::int(1u32)) }.explicit_if_small()
    }

    pub fn mul(a: TowerValue, b: TowerValue) -> TowerValue {
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        match (a, b) {
            (TowerValue::Int(x), TowerValue::Int(y)) if bits(&x) + bits(&y) <= EXPLICIT_BITS => TowerValue::Int(x * y),
            (TowerValue::Pow { base, exp, mult }, TowerValue::Pow { base: b2, exp: e2, mult: m2 }) if base == b2 => {
                let exp = TowerValue::add(*exp, *e2);
                TowerValue::Pow { base, exp: Box::new(exp), mult: Box::new(TowerValue::mul(*mult, *m2)) }
                    .explicit_if_small()
            }
            (TowerValue::Pow { base, exp, mult }, other) | (other, TowerValue::Pow { base, exp, mult }) => {
                TowerValue::Pow { base, exp, mult: Box::new(TowerValue::mul(*mult, other)) }.explicit_if_small()
            }
            (a, b) => TowerValue::Mul(Box::new(a), Box::new(b)).explicit_if_small(),
        }
    }

    pub fn add(a: TowerValue, b: TowerValue) -> TowerValue {
        match (a, b) {
            (TowerValue::Int(x), TowerValue::Int(y)) => TowerValue::Int(x + y),
            (TowerValue::Int(z), v) | (v, TowerValue::Int(z)) if z.is_zero() => v,
            (a, b) => TowerValue::Sum(Box::new(a), Box::new(b)).explicit_if_small(),
        }
    }

    pub fn factorial(n: TowerValue) -> TowerValue {
        TowerValue::Factorial(Box::new(n)).explicit_if_small()
    }

    /// Bounds on the value.
    pub fn mag(&self) -> Mag {
        match self {
            TowerValue::Int(n) => int_mag(n),
            TowerValue::Pow { base, exp, mult } => {
                let lb = int_mag(base).log2();
                exp.mag().mul(lb).exp2().mul(mult.mag())
            }
            TowerValue::Mul(a, b) => a.mag().mul(b.mag()),
            TowerValue::Sum(a, b) => a.mag().add(b.mag()),
            TowerValue::Factorial(n) => {
                // (n/e)^n <= n! <= n^n
                let nm = n.mag();
                let lg = nm.log2();
                let upper = nm.mul(lg);
                let lower = nm.mul(lg.sub_const(std::f64::consts::LOG2_E));
                let h = upper.height.max(lower.height);
                let (u, l) = (upper.lift(h), lower.lift(h));
                Mag { height: h, lo: l.lo.max(0.0).min(u.lo), hi: u.hi }.normalize().exp2()
            }
        }
    }

    /// Bounds on `log2` of the value.
    pub fn log2_mag(&self) -> Mag {
        self.mag().log2()
    }

    /// Exact `log2` when the value is a power of two.
    pub fn log2_exact(&self) -> Option<TowerValue> {
        match self {
            TowerValue::Int(n) if !n.is_zero() && n.count_ones() == 1 => Some(TowerValue::from(n.bits() - 1)),
            TowerValue::Pow { base, exp, mult } if base.count_ones() == 1 => {
                let k = base.bits() - 1;
                let head = TowerValue::mul(TowerValue::from(k), (**exp).clone());
                let tail = mult.log2_exact()?;
                Some(TowerValue::add(head, tail))
            }
            _ => None,
        }
    }

    /// Exact for explicit integers and structurally equal expressions,
    /// otherwise decided by interval bounds; `None` when those overlap.
    pub fn compare(&self, o: &TowerValue) -> Option<Ordering> {
        if let (TowerValue::Int(a), TowerValue::Int(b)) = (self, o) {
            return Some(a.cmp(b));
        }
        if self == o {
            return Some(Ordering::Equal);
        }
        self.mag().compare(o.mag())
    }

    pub fn le(&self, o: &TowerValue) -> Option<bool> {
        self.compare(o).map(|c| c != Ordering::Greater)
    }
}

impl fmt::Display for TowerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(v: &TowerValue) -> String {
            match v {
                TowerValue::Int(_) | TowerValue::Factorial(_) => v.to_string(),
                _ => format!("({v})"),
            }
        }
        match self {
            TowerValue::Int(n) if n.bits() > 128 && n.count_ones() == 1 => write!(f, "2^{}", n.bits() - 1),
            TowerValue::Int(n) => write!(f, "{n}"),
            TowerValue::Pow { base, exp, mult } => {
                write!(f, "{base}^{}", atom(exp))?;
                if !mult.is_one() {
                    write!(f, "*{}", atom(mult))?;
                }
                Ok(())
            }
            TowerValue::Mul(a, b) => write!(f, "{}*{}", atom(a), atom(b)),
            TowerValue::Sum(a, b) => write!(f, "{}+{}", atom(a), atom(b)),
            TowerValue::Factorial(n) => write!(f, "{}!", atom(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(n: u64) -> TowerValue {
        TowerValue::from(n)
    }

    #[test]
    fn small_values_stay_explicit() {
        assert_eq!(TowerValue::pow(2u32, t(9)), t(512));
        let v = TowerValue::mul(TowerValue::pow(4u32, t(27)), TowerValue::pow(3u32, t(4)));
        assert_eq!(v.as_int().unwrap(), &(BigUint::from(4u32).pow(27) * 81u32));
        assert_eq!(TowerValue::factorial(t(5)), t(120));
    }

    #[test]
    fn nested_comparisons() {
        let a = TowerValue::pow(2u32, TowerValue::pow(2u32, t(48)));
        let b = TowerValue::pow(2u32, TowerValue::pow(2u32, t(49)));
        assert_eq!(a.compare(&b), Some(Ordering::Less));
        assert_eq!(a.compare(&a.clone()), Some(Ordering::Equal));
        let c = TowerValue::pow(3u32, TowerValue::pow(2u32, t(48)));
        assert_eq!(a.compare(&c), Some(Ordering::Less));
        let m = a.log2_mag().log2();
        assert_eq!(m.height, 0);
        assert!((m.mid() - 48.0).abs() < 1e-6);
        assert_eq!(a.log2_exact().unwrap(), TowerValue::pow(2u32, t(48)));
    }

    #[test]
    fn factorial_bounds() {
        let big = TowerValue::pow(2u32, t(5000));
        let f = TowerValue::factorial(big.clone());
        assert!(matches!(f, TowerValue::Factorial(_)));
        // n! <= n^n = 2^(5000 * 2^5000) < 2^(5001 * 2^5000)
        let nn = TowerValue::pow(2u32, TowerValue::mul(t(5001), big.clone()));
        assert_eq!(f.compare(&nn), Some(Ordering::Less));
        assert_eq!(f.compare(&big), Some(Ordering::Greater));
    }

    #[test]
    fn display() {
        assert_eq!(TowerValue::pow(2u32, TowerValue::pow(2u32, t(48))).to_string(), "2^281474976710656");
        assert_eq!(TowerValue::pow(2u32, TowerValue::pow(2u32, TowerValue::pow(2u32, t(48)))).to_string(), "2^(2^281474976710656)");
        assert_eq!(t(1 << 20).to_string(), "1048576");
    }

    proptest! {
        #[test]
        fn order_agrees_with_integers(a in 0u32..200, b in 0u32..200, x in 1u64..1000, y in 1u64..1000, e in 1u32..120, f in 1u32..120) {
            // both sides below 512 bits: compared exactly
            let u = TowerValue::mul(TowerValue::pow(x, t(e as u64)), t(a as u64 + 1));
            let v = TowerValue::mul(TowerValue::pow(y, t(f as u64)), t(b as u64 + 1));
            let ui = BigUint::from(x).pow(e) * (a + 1);
            let vi = BigUint::from(y).pow(f) * (b + 1);
            prop_assume!(ui.bits() <= 512 && vi.bits() <= 512);
            prop_assert_eq!(u.compare(&v), Some(ui.cmp(&vi)));
        }

        #[test]
        fn mags_enclose_explicit_values(x in 2u64..1_000_000, e in 1u32..3000) {
            let n = BigUint::from(x).pow(e);
            let m = int_mag(&n).lift(1);
            let l = (x as f64).log2() * e as f64;
            prop_assert!(m.lo <= l && l <= m.hi, "{:?} vs {}", m, l);
        }
    }
}
