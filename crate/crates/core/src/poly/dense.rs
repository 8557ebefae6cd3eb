//! Dense univariate polynomials over any [`Field`], stored low coefficient
//! first with no trailing zeros (the zero polynomial is the empty vector).

use crate::ff::Field;

pub fn normalize<F: Field>(f: &F, mut a: Vec<F::Elem>) -> Vec<F::Elem> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

/// Degree of a normalized polynomial, `None` for zero.
pub fn degree<E>(a: &[E]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn constant<F: Field>(f: &F, c: F::Elem) -> Vec<F::Elem> {
    normalize(f, vec![c])
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n)
        .map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    normalize(f, out)
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n)
        .map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    normalize(f, out)
}

pub fn neg<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    normalize(f, a.iter().map(|x| f.mul(x, c)).collect())
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    normalize(f, out)
}

/// Quotient and remainder; `None` when dividing by zero.
pub fn divrem<F: Field>(
    f: &F,
    a: &[F::Elem],
    b: &[F::Elem],
) -> Option<(Vec<F::Elem>, Vec<F::Elem>)> {
    let db = degree(b)?;
    let lead_inv = f.inv(&b[db])?;
    let mut r = a.to_vec();
    if r.len() <= db {
        return Some((Vec::new(), r));
    }
    let mut q = vec![f.zero(); r.len() - db];
    for top in (db..r.len()).rev() {
        let c = f.mul(&r[top], &lead_inv);
        if f.is_zero(&c) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let idx = top - db + j;
            r[idx] = f.sub(&r[idx], &f.mul(&c, bj));
        }
        q[top - db] = c;
    }
    r.truncate(db);
    Some((normalize(f, q), normalize(f, r)))
}

pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    divrem(f, a, b).expect("division by the zero polynomial").1
}

pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(lead) => {
            let inv = f.inv(lead).expect("normalized leading coefficient is nonzero");
            scale(f, a, &inv)
        }
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut x = normalize(f, a.to_vec());
    let mut y = normalize(f, b.to_vec());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

pub fn mul_mod<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Vec<F::Elem> {
    rem(f, &mul(f, a, b), m)
}

/// `a^e mod m`.
pub fn pow_mod<F: Field>(f: &F, a: &[F::Elem], mut e: u128, m: &[F::Elem]) -> Vec<F::Elem> {
    let mut base = rem(f, a, m);
    let mut acc = rem(f, &[f.one()], m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(f, &acc, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mul_mod(f, &base, &base, m);
        }
    }
    acc
}

pub fn derivative<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(c, &f.from_i64(i as i64)))
        .collect();
    normalize(f, out)
}

pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// Exact quotient, `None` if `b` does not divide `a`.
pub fn div_exact<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let (q, r) = divrem(f, a, b)?;
    r.is_empty().then_some(q)
}

/// Yun's squarefree decomposition in characteristic zero or for polynomials
/// of degree below the characteristic: returns `(a_1, a_2, ...)` with
/// `monic(a) = prod a_i^i`.
pub fn squarefree_yun<F: Field>(f: &F, a: &[F::Elem]) -> Vec<Vec<F::Elem>> {
    let a = monic(f, a);
    if degree(&a).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let da = derivative(f, &a);
    let mut g = gcd(f, &a, &da);
    let mut b = div_exact(f, &a, &g).expect("gcd divides");
    let mut c = div_exact(f, &da, &g).expect("gcd divides");
    let mut d = sub(f, &c, &derivative(f, &b));
    let mut out = Vec::new();
    loop {
        g = gcd(f, &b, &d);
        out.push(g.clone());
        b = div_exact(f, &b, &g).expect("gcd divides");
        if degree(&b).unwrap_or(0) == 0 {
            break;
        }
        c = div_exact(f, &d, &g).expect("gcd divides");
        d = sub(f, &c, &derivative(f, &b));
    }
    while out.last().is_some_and(|p| p.len() == 1) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{field_make, Fe, Rationals};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(v: &[i64]) -> Vec<BigRational> {
        normalize(&Rationals, v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let a = q(&[1, -3, 2, 5]);
        let b = q(&[2, 0, 1]);
        let (qq, r) = divrem(&Rationals, &a, &b).unwrap();
        assert_eq!(add(&Rationals, &mul(&Rationals, &qq, &b), &r), a);
        assert!(r.len() < b.len());
    }

    #[test]
    fn rational_gcd_example() {
        // (1 - T)(1 - 2T) and 1 - 2T
        let g = gcd(&Rationals, &q(&[1, -3, 2]), &q(&[1, -2]));
        assert_eq!(g, monic(&Rationals, &q(&[1, -2])));
        assert_eq!(gcd(&Rationals, &q(&[1, 0, 2]), &q(&[1, 1, 1])), q(&[1]));
    }

    #[test]
    fn yun_over_f5() {
        let f5 = field_make(5, 1, 0).unwrap();
        let e = |v: &[u64]| v.iter().map(|&x| Fe(x)).collect::<Vec<_>>();
        // (x+1)^2 (x+2)
        let a = mul(&*f5, &mul(&*f5, &e(&[1, 1]), &e(&[1, 1])), &e(&[2, 1]));
        let parts = squarefree_yun(&*f5, &a);
        assert_eq!(parts, vec![e(&[2, 1]), e(&[1, 1])]);
    }

    #[test]
    fn pow_mod_matches_repeated_multiplication() {
        let f7 = field_make(7, 1, 0).unwrap();
        let m: Vec<Fe> = [3u64, 1, 0, 1].iter().map(|&x| Fe(x)).collect();
        let a: Vec<Fe> = vec![Fe(2), Fe(5)];
        let mut acc = vec![Fe(1)];
        for e in 0..20u128 {
            assert_eq!(pow_mod(&*f7, &a, e, &m), acc);
            acc = mul_mod(&*f7, &acc, &a, &m);
        }
    }
}
