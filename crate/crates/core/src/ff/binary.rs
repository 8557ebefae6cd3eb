//! Carry-less multiplication and Barrett reduction for binary fields `F_{2^k}`, `k <= 62`.

#[inline]
fn clmul_portable(a: u64, b: u64) -> u128 {
    let mut acc: u128 = 0;
    let wide = a as u128;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        let tz = b.trailing_zeros();
        shift += tz;
        b >>= tz;
        acc ^= wide << shift;
        b >>= 1;
        shift += 1;
    }
    acc
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq", enable = "sse2")]
unsafe fn clmul_hw(a: u64, b: u64) -> u128 {
    use std::arch::x86_64::*;
    let va = _mm_set_epi64x(0, a as i64);
    let vb = _mm_set_epi64x(0, b as i64);
    let r = _mm_clmulepi64_si128(va, vb, 0);
    let lo = _mm_cvtsi128_si64(r) as u64 as u128;
    let hi = _mm_cvtsi128_si64(_mm_unpackhi_epi64(r, r)) as u64 as u128;
    lo | (hi << 64)
}

/// Product of two binary polynomials packed in `u64`s.
#[inline]
pub fn clmul(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: feature presence checked at runtime.
            return unsafe { clmul_hw(a, b) };
        }
    }
    clmul_portable(a, b)
}

/// Reduction data for a fixed modulus of degree `k` (bit `k` set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryReducer {
    pub k: u32,
    pub modulus: u64,
    mu: u64,
    mask: u64,
}

impl BinaryReducer {
    pub fn new(modulus: u64) -> Self {
        let k = 63 - modulus.leading_zeros();
        assert!((1..=62).contains(&k), "binary modulus degree out of range");
        // mu = floor(x^{2k} / m), degree k.
        let mut rem: u128 = 1u128 << (2 * k);
        let mut quot: u128 = 0;
        let m = modulus as u128;
        while rem != 0 && 127 - rem.leading_zeros() >= k {
            let shift = 127 - rem.leading_zeros() - k;
            quot |= 1u128 << shift;
            rem ^= m << shift;
        }
        BinaryReducer {
            k,
            modulus,
            mu: quot as u64,
            mask: if k == 64 { u64::MAX } else { (1u64 << k) - 1 },
        }
    }

    #[inline]
    pub fn reduce(&self, c: u128) -> u64 {
        let k = self.k;
        let hi = (c >> k) as u64;
        if hi == 0 {
            return c as u64;
        }
        let q = (clmul(hi, self.mu) >> k) as u64;
        ((c ^ clmul(q, self.modulus)) as u64) & self.mask
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(clmul(a, b))
    }
}
