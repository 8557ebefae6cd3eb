//! Prime fields `F_p` and their extensions `F_{p^k}`.
//!
//! Elements are packed into a single `u64`: the coefficient vector
//! `(c_0, ..., c_{k-1})` in the polynomial basis is stored as `sum c_i p^i`.
//! For `p = 2` this is the usual bit-packed representation and multiplication
//! goes through carry-less multiply with Barrett reduction.

mod binary;

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::dense;
pub use binary::BinaryReducer;

/// Characteristic bound for [`FieldDesc`].
pub const MAX_CHARACTERISTIC: u64 = 1 << 20;

/// Default cap on the number of elements `field_enumerate` will hand out.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Environment override for [`DEFAULT_ENUMERATION_CAP`].
pub const ENUMERATION_CAP_ENV: &str = "ZETAGCD_ENUM_CAP";

const MAX_DIGITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("characteristic {0} is outside the supported range [2, 2^20)")]
    CharacteristicTooLarge(u64),
    #[error("field of size {p}^{k} does not fit the packed element representation")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("modulus is not a monic irreducible polynomial of the declared degree")]
    ReducibleModulus,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("field has {size} elements, enumeration cap is {cap}")]
    EnumerationCapExceeded { size: u64, cap: u64 },
    #[error("coefficient {value} is not a valid element of the field")]
    InvalidElement { value: u64 },
}

/// Arithmetic context for a field. Elements are plain values; the context
/// carries the modulus.
pub trait Field {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Characteristic, `0` for the rationals.
    fn characteristic(&self) -> u64;
}

/// The field of rational numbers with exact big-rational elements.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// Packed element of some [`FieldDesc`]. Carries no field reference; use
/// [`FieldElem`] for the checked API.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u64);

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Prime,
    Binary(BinaryReducer),
    General,
}

/// Description of `F_{p^k}`: characteristic, degree and (for `k > 1`) a monic
/// irreducible modulus over `F_p`, low coefficient first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDesc {
    p: u64,
    k: u32,
    modulus: Vec<u64>,
    size: u64,
    repr: Repr,
}

pub type FieldRef = Arc<FieldDesc>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn checked_size(p: u64, k: u32) -> Option<u64> {
    let mut s: u64 = 1;
    for _ in 0..k {
        s = s.checked_mul(p)?;
    }
    (s < (1u64 << 63)).then_some(s)
}

/// Builds `F_{p^k}` with the first irreducible modulus found in a
/// deterministic scan whose starting offset is derived from `seed`.
pub fn field_make(p: u64, k: u32, seed: u64) -> Result<FieldRef, FfError> {
    if k == 0 {
        return Err(FfError::DegreeZero);
    }
    if p >= MAX_CHARACTERISTIC {
        return Err(FfError::CharacteristicTooLarge(p));
    }
    if !is_prime(p) {
        return Err(FfError::NotPrime(p));
    }
    let tail = checked_size(p, k).ok_or(FfError::FieldTooLarge { p, k })?;
    if p == 2 && k > 62 {
        return Err(FfError::FieldTooLarge { p, k });
    }
    if k == 1 {
        return Ok(Arc::new(FieldDesc::prime_unchecked(p)));
    }
    let base = FieldDesc::prime_unchecked(p);
    let start = if seed == 0 { 0 } else { splitmix64(seed) % tail };
    for offset in 0..tail {
        let idx = (start + offset) % tail;
        let mut modulus = digits(idx, p, k as usize);
        if modulus[0] == 0 {
            continue;
        }
        modulus.push(1);
        if is_irreducible(&base, &modulus) {
            return Ok(Arc::new(FieldDesc::with_modulus_unchecked(p, modulus)));
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

/// Rebuilds a field from a serialized modulus, verifying irreducibility.
pub fn field_from_modulus(p: u64, k: u32, modulus: &[u64]) -> Result<FieldRef, FfError> {
    if k == 0 {
        return Err(FfError::DegreeZero);
    }
    if p >= MAX_CHARACTERISTIC {
        return Err(FfError::CharacteristicTooLarge(p));
    }
    if !is_prime(p) {
        return Err(FfError::NotPrime(p));
    }
    checked_size(p, k).ok_or(FfError::FieldTooLarge { p, k })?;
    if p == 2 && k > 62 {
        return Err(FfError::FieldTooLarge { p, k });
    }
    if k == 1 {
        if !(modulus.is_empty() || modulus.len() == 2 && modulus[1] == 1) {
            return Err(FfError::ReducibleModulus);
        }
        return Ok(Arc::new(FieldDesc::prime_unchecked(p)));
    }
    if modulus.len() != k as usize + 1 || modulus[k as usize] != 1 || modulus.iter().any(|&c| c >= p) {
        return Err(FfError::ReducibleModulus);
    }
    let base = FieldDesc::prime_unchecked(p);
    if !is_irreducible(&base, modulus) {
        return Err(FfError::ReducibleModulus);
    }
    Ok(Arc::new(FieldDesc::with_modulus_unchecked(p, modulus.to_vec())))
}

/// Ben-Or test: no irreducible factor of degree `<= k/2`.
fn is_irreducible(base: &FieldDesc, modulus: &[u64]) -> bool {
    let f: Vec<Fe> = modulus.iter().map(|&c| Fe(c)).collect();
    let k = f.len() - 1;
    let x = vec![Fe(0), Fe(1)];
    let mut h = x.clone();
    for _ in 0..k / 2 {
        h = dense::pow_mod(base, &h, base.p as u128, &f);
        let diff = dense::sub(base, &h, &x);
        let g = dense::gcd(base, &f, &diff);
        if dense::degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn digits(mut n: u64, p: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k + 1);
    for _ in 0..k {
        out.push(n % p);
        n /= p;
    }
    out
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(p as i128) as u64
}

impl FieldDesc {
    fn prime_unchecked(p: u64) -> Self {
        FieldDesc { p, k: 1, modulus: Vec::new(), size: p, repr: Repr::Prime }
    }

    fn with_modulus_unchecked(p: u64, modulus: Vec<u64>) -> Self {
        let k = (modulus.len() - 1) as u32;
        let size = checked_size(p, k).expect("size checked by caller");
        let repr = if p == 2 {
            let bits = modulus.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (c << i));
            Repr::Binary(BinaryReducer::new(bits))
        } else {
            Repr::General
        };
        FieldDesc { p, k, modulus, size, repr }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    /// `q = p^k`.
    pub fn size(&self) -> u64 {
        self.size
    }
    /// Monic modulus, low coefficient first; empty for prime fields.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Lifts an integer representative, rejecting values `>= q`.
    pub fn elem(&self, value: u64) -> Result<Fe, FfError> {
        if value < self.size {
            Ok(Fe(value))
        } else {
            Err(FfError::InvalidElement { value })
        }
    }

    /// Image of the prime-field integer `n`.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u64)
    }

    pub fn coeffs(&self, a: Fe) -> Vec<u64> {
        digits(a.0, self.p, self.k as usize)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Fe, FfError> {
        if coeffs.len() > self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FfError::InvalidElement { value: coeffs.first().copied().unwrap_or(0) });
        }
        Ok(Fe(coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)))
    }

    /// The polynomial generator `x` (or `1` when `k = 1`... which is not a
    /// generator; callers use this only for `k > 1`).
    pub fn gen(&self) -> Fe {
        if self.k == 1 {
            Fe(1)
        } else {
            Fe(self.p)
        }
    }

    #[inline]
    pub fn is_binary(&self) -> bool {
        self.p == 2
    }

    fn unpack(&self, a: u64, out: &mut [u64; MAX_DIGITS]) {
        let mut a = a;
        for d in out.iter_mut().take(self.k as usize) {
            *d = a % self.p;
            a /= self.p;
        }
    }

    fn pack(&self, d: &[u64]) -> u64 {
        d.iter().take(self.k as usize).rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match self.repr {
            Repr::Binary(_) => Fe(a.0 ^ b.0),
            Repr::Prime => {
                let s = a.0 + b.0;
                Fe(if s >= self.p { s - self.p } else { s })
            }
            Repr::General => {
                let (mut x, mut y) = ([0u64; MAX_DIGITS], [0u64; MAX_DIGITS]);
                self.unpack(a.0, &mut x);
                self.unpack(b.0, &mut y);
                for i in 0..self.k as usize {
                    x[i] = (x[i] + y[i]) % self.p;
                }
                Fe(self.pack(&x))
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        match self.repr {
            Repr::Binary(_) => a,
            Repr::Prime => Fe(if a.0 == 0 { 0 } else { self.p - a.0 }),
            Repr::General => {
                let mut x = [0u64; MAX_DIGITS];
                self.unpack(a.0, &mut x);
                for d in x.iter_mut().take(self.k as usize) {
                    *d = (self.p - *d) % self.p;
                }
                Fe(self.pack(&x))
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        match self.repr {
            Repr::Binary(_) => Fe(a.0 ^ b.0),
            _ => self.add(a, self.neg(b)),
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.repr {
            Repr::Binary(r) => Fe(r.mul(a.0, b.0)),
            Repr::Prime => Fe(mulmod(a.0, b.0, self.p)),
            Repr::General => self.mul_general(a, b),
        }
    }

    fn mul_general(&self, a: Fe, b: Fe) -> Fe {
        let k = self.k as usize;
        let p = self.p;
        let (mut x, mut y) = ([0u64; MAX_DIGITS], [0u64; MAX_DIGITS]);
        self.unpack(a.0, &mut x);
        self.unpack(b.0, &mut y);
        let mut prod = [0u128; 2 * MAX_DIGITS];
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] += x[i] as u128 * y[j] as u128;
            }
        }
        let mut red = [0u64; 2 * MAX_DIGITS];
        for i in 0..2 * k - 1 {
            red[i] = (prod[i] % p as u128) as u64;
        }
        // reduce by the monic modulus from the top
        for top in (k..2 * k - 1).rev() {
            let c = red[top];
            if c == 0 {
                continue;
            }
            red[top] = 0;
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                if m != 0 {
                    let idx = top - k + i;
                    red[idx] = (red[idx] + p - mulmod(c, m, p)) % p;
                }
            }
        }
        Fe(self.pack(&red[..k]))
    }

    #[inline]
    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Fe, mut e: u128) -> Fe {
        let mut base = a;
        let mut acc = Fe(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        match self.repr {
            Repr::Prime => Some(Fe(inv_mod(a.0, self.p))),
            _ => Some(self.pow(a, self.size as u128 - 2)),
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^p`.
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p as u128)
    }

    /// Smallest `d | k` with `a^{p^d} = a`, i.e. the degree of the subfield
    /// `F_p(a)`.
    pub fn element_degree(&self, a: Fe) -> u32 {
        let mut x = a;
        for d in 1..=self.k {
            x = self.frobenius(x);
            if x == a {
                return d;
            }
        }
        self.k
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.size))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.size))
    }

    /// Square root in characteristic 2 (`a^{q/2}`).
    pub fn sqrt_char2(&self, a: Fe) -> Fe {
        debug_assert!(self.is_binary());
        self.pow(a, (self.size / 2) as u128)
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.k)
        }
    }
}

impl Field for FieldDesc {
    type Elem = Fe;

    #[inline]
    fn zero(&self) -> Fe {
        Fe(0)
    }
    #[inline]
    fn one(&self) -> Fe {
        Fe(1)
    }
    #[inline]
    fn is_zero(&self, a: &Fe) -> bool {
        a.0 == 0
    }
    #[inline]
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        FieldDesc::add(self, *a, *b)
    }
    #[inline]
    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        FieldDesc::sub(self, *a, *b)
    }
    #[inline]
    fn neg(&self, a: &Fe) -> Fe {
        FieldDesc::neg(self, *a)
    }
    #[inline]
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        FieldDesc::mul(self, *a, *b)
    }
    fn inv(&self, a: &Fe) -> Option<Fe> {
        FieldDesc::inv(self, *a)
    }
    fn from_i64(&self, n: i64) -> Fe {
        self.from_int(n)
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
}

/// Enumeration cap, honouring the `ZETAGCD_ENUM_CAP` environment override.
pub fn enumeration_cap() -> u64 {
    std::env::var(ENUMERATION_CAP_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_CAP)
}

/// All `q` elements in lexicographic coefficient order (top coefficient
/// most significant).
pub fn field_enumerate(desc: &FieldDesc) -> Result<impl Iterator<Item = Fe>, FfError> {
    field_enumerate_capped(desc, enumeration_cap())
}

pub fn field_enumerate_capped(desc: &FieldDesc, cap: u64) -> Result<impl Iterator<Item = Fe>, FfError> {
    if desc.size > cap {
        return Err(FfError::EnumerationCapExceeded { size: desc.size, cap });
    }
    Ok((0..desc.size).map(Fe))
}

/// Splits the enumeration into `c` contiguous index ranges.
pub fn enumeration_chunks(desc: &FieldDesc, c: usize) -> Result<Vec<Range<u64>>, FfError> {
    let cap = enumeration_cap();
    if desc.size > cap {
        return Err(FfError::EnumerationCapExceeded { size: desc.size, cap });
    }
    let c = c.max(1) as u64;
    let step = desc.size.div_ceil(c);
    Ok((0..c)
        .map(|i| (i * step).min(desc.size)..((i + 1) * step).min(desc.size))
        .filter(|r| !r.is_empty())
        .collect())
}

/// An element bundled with its field; arithmetic checks that both operands
/// share the field.
#[derive(Clone, Debug)]
pub struct FieldElem {
    desc: FieldRef,
    value: Fe,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && same_field(&self.desc, &other.desc)
    }
}

fn same_field(a: &FieldRef, b: &FieldRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldElem {
    pub fn new(desc: &FieldRef, value: u64) -> Result<Self, FfError> {
        Ok(FieldElem { value: desc.elem(value)?, desc: desc.clone() })
    }
    pub fn from_fe(desc: &FieldRef, value: Fe) -> Self {
        debug_assert!(value.0 < desc.size);
        FieldElem { desc: desc.clone(), value }
    }
    pub fn value(&self) -> Fe {
        self.value
    }
    pub fn desc(&self) -> &FieldRef {
        &self.desc
    }
    pub fn coeffs(&self) -> Vec<u64> {
        self.desc.coeffs(self.value)
    }
    pub fn is_zero(&self) -> bool {
        self.value.0 == 0
    }

    fn check(&self, other: &Self) -> Result<(), FfError> {
        if same_field(&self.desc, &other.desc) {
            Ok(())
        } else {
            Err(FfError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FfError> {
        self.check(other)?;
        Ok(Self::from_fe(&self.desc, self.desc.add(self.value, other.value)))
    }
    pub fn sub(&self, other: &Self) -> Result<Self, FfError> {
        self.check(other)?;
        Ok(Self::from_fe(&self.desc, self.desc.sub(self.value, other.value)))
    }
    pub fn mul(&self, other: &Self) -> Result<Self, FfError> {
        self.check(other)?;
        Ok(Self::from_fe(&self.desc, self.desc.mul(self.value, other.value)))
    }
    pub fn div(&self, other: &Self) -> Result<Self, FfError> {
        self.check(other)?;
        let inv = self.desc.inv(other.value).ok_or(FfError::DivisionByZero)?;
        Ok(Self::from_fe(&self.desc, self.desc.mul(self.value, inv)))
    }
    pub fn inv(&self) -> Result<Self, FfError> {
        let inv = self.desc.inv(self.value).ok_or(FfError::DivisionByZero)?;
        Ok(Self::from_fe(&self.desc, inv))
    }
    pub fn pow(&self, e: u128) -> Self {
        Self::from_fe(&self.desc, self.desc.pow(self.value, e))
    }
    pub fn neg(&self) -> Self {
        Self::from_fe(&self.desc, self.desc.neg(self.value))
    }
}

/// Field homomorphism `F_q -> F_{q^r}` fixed by the image of the generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub source: FieldRef,
    pub target: FieldRef,
    /// Images of `1, x, ..., x^{k-1}` for the source polynomial basis.
    basis_images: Vec<Fe>,
}

impl Embedding {
    pub fn identity(desc: &FieldRef) -> Self {
        let basis_images = (0..desc.k).map(|i| desc.pow(desc.gen(), i as u128)).collect();
        Embedding { source: desc.clone(), target: desc.clone(), basis_images }
    }

    pub fn apply(&self, a: Fe) -> Fe {
        if self.source.k == 1 {
            return Fe(a.0);
        }
        let t = &self.target;
        let mut acc = Fe(0);
        for (c, img) in self.source.coeffs(a).into_iter().zip(&self.basis_images) {
            if c != 0 {
                acc = t.add(acc, t.mul(Fe(c), *img));
            }
        }
        acc
    }
}

/// Builds `F_{q^r}` as `F_{p^{kr}}` together with an embedding of `F_q`.
/// The embedding sends the generator of `F_q` to one of the roots of its
/// modulus, picked by `seed`.
pub fn extension(desc: &FieldRef, r: u32, seed: u64) -> Result<Embedding, FfError> {
    if r == 0 {
        return Err(FfError::DegreeZero);
    }
    if r == 1 {
        return Ok(Embedding::identity(desc));
    }
    let big = field_make(desc.p, desc.k * r, 0)?;
    if desc.k == 1 {
        return Ok(Embedding { source: desc.clone(), target: big, basis_images: vec![Fe(1)] });
    }
    let lifted: Vec<Fe> = desc.modulus.iter().map(|&c| Fe(c)).collect();
    let mut roots = crate::poly::roots::distinct_roots(&big, &lifted);
    roots.sort();
    let rho = roots[(seed % roots.len() as u64) as usize];
    let basis_images = (0..desc.k).map(|i| big.pow(rho, i as u128)).collect();
    Ok(Embedding { source: desc.clone(), target: big, basis_images })
}
