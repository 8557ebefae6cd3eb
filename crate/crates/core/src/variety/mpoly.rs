//! Sparse multivariate polynomials over a [`FieldDesc`].

use std::collections::BTreeMap;

use crate::ff::{Fe, FieldDesc};

/// Terms keyed by exponent vector; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Fe>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Fe) -> Self {
        let mut p = MPoly::zero(nvars);
        if c != Fe(0) {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MPoly::from_terms(nvars, [(e, Fe(1))])
    }

    /// Builds from terms, adding repeated exponents and dropping zeros.
    pub fn from_terms_in(desc: &FieldDesc, nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Fe)>) -> Self {
        let mut p = MPoly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(desc, e, c);
        }
        p
    }

    /// Builds from terms with distinct exponents.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Fe)>) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            if c != Fe(0) {
                map.insert(e, c);
            }
        }
        MPoly { nvars, terms: map }
    }

    fn add_term(&mut self, desc: &FieldDesc, e: Vec<u32>, c: Fe) {
        if c == Fe(0) {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = desc.add(*o.get(), c);
                if s == Fe(0) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Fe)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Fe {
        self.terms.get(e).copied().unwrap_or(Fe(0))
    }

    /// Largest total degree, `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, desc: &FieldDesc, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(desc, e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, desc: &FieldDesc, c: Fe) -> Self {
        MPoly::from_terms(self.nvars, self.terms.iter().map(|(e, x)| (e.clone(), desc.mul(*x, c))))
    }

    pub fn mul(&self, desc: &FieldDesc, o: &Self) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(desc, e, desc.mul(*c1, *c2));
            }
        }
        out
    }

    pub fn pow(&self, desc: &FieldDesc, n: u32) -> Self {
        let mut acc = MPoly::constant(self.nvars, Fe(1));
        for _ in 0..n {
            acc = acc.mul(desc, self);
        }
        acc
    }

    pub fn eval(&self, desc: &FieldDesc, pt: &[Fe]) -> Fe {
        debug_assert_eq!(pt.len(), self.nvars);
        let mut acc = Fe(0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (x, &k) in pt.iter().zip(e) {
                if k > 0 {
                    t = desc.mul(t, desc.pow(*x, k as u128));
                }
            }
            acc = desc.add(acc, t);
        }
        acc
    }

    /// `d/dx_i`.
    pub fn partial(&self, desc: &FieldDesc, i: usize) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(desc, e2, desc.mul(*c, desc.from_int(e[i] as i64)));
        }
        out
    }

    pub fn gradient(&self, desc: &FieldDesc) -> Vec<MPoly> {
        (0..self.nvars).map(|i| self.partial(desc, i)).collect()
    }

    pub fn map_coeffs(&self, f: impl Fn(Fe) -> Fe) -> Self {
        MPoly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(*c))))
    }

    /// Substitutes `x_i -> forms[i]`, each form a polynomial in `new_nvars`
    /// variables.
    pub fn substitute(&self, desc: &FieldDesc, forms: &[MPoly], new_nvars: usize) -> Self {
        assert_eq!(forms.len(), self.nvars);
        let max_deg = self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0);
        let powers: Vec<Vec<MPoly>> = forms
            .iter()
            .map(|f| {
                let mut v = vec![MPoly::constant(new_nvars, Fe(1))];
                for k in 1..=max_deg as usize {
                    let next = v[k - 1].mul(desc, f);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = MPoly::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(new_nvars, *c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(desc, &powers[i][k as usize]);
                }
            }
            out = out.add(desc, &t);
        }
        out
    }

    /// Linear substitution `x_i -> sum_j m[i][j] y_j`.
    pub fn linear_change(&self, desc: &FieldDesc, m: &[Vec<Fe>]) -> Self {
        let n = m[0].len();
        let forms: Vec<MPoly> = m
            .iter()
            .map(|row| {
                MPoly::from_terms(
                    n,
                    row.iter().enumerate().map(|(j, &c)| {
                        let mut e = vec![0; n];
                        e[j] = 1;
                        (e, c)
                    }),
                )
            })
            .collect();
        self.substitute(desc, &forms, n)
    }

    /// Sets `x_i = value`, keeping the variable count.
    pub fn specialize(&self, desc: &FieldDesc, i: usize, value: Fe) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[i], 0);
            out.add_term(desc, e2, desc.mul(*c, desc.pow(value, k as u128)));
        }
        out
    }

    /// Drops variable `i` (which must not occur).
    pub fn drop_var(&self, i: usize) -> Self {
        MPoly::from_terms(
            self.nvars - 1,
            self.terms.iter().map(|(e, c)| {
                assert_eq!(e[i], 0, "dropped variable still occurs");
                let mut e2 = e.clone();
                e2.remove(i);
                (e2, *c)
            }),
        )
    }
}

/// A polynomial viewed as univariate in its last variable, with the
/// coefficients kept as term lists over the remaining variables so that
/// they can be evaluated quickly at many prefixes.
#[derive(Clone, Debug)]
pub struct LastVarView {
    /// `coeffs[j]` = terms `(exponents of the first n-1 vars, c)` of `x_last^j`.
    coeffs: Vec<Vec<(Vec<u32>, Fe)>>,
}

impl LastVarView {
    pub fn new(p: &MPoly) -> Self {
        let n = p.nvars;
        let deg = p.terms.keys().map(|e| e[n - 1]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![Vec::new(); if p.is_zero() { 0 } else { deg + 1 }];
        for (e, c) in &p.terms {
            coeffs[e[n - 1] as usize].push((e[..n - 1].to_vec(), *c));
        }
        LastVarView { coeffs }
    }

    /// Univariate coefficients at the given prefix (length `n - 1`), with
    /// trailing zeros removed. `pows[i][k]` must hold `prefix[i]^k`.
    pub fn eval_prefix(&self, desc: &FieldDesc, pows: &[Vec<Fe>]) -> Vec<Fe> {
        let mut out: Vec<Fe> = self
            .coeffs
            .iter()
            .map(|terms| {
                terms.iter().fold(Fe(0), |acc, (e, c)| {
                    let t = e.iter().enumerate().fold(*c, |t, (i, &k)| if k == 0 { t } else { desc.mul(t, pows[i][k as usize]) });
                    desc.add(acc, t)
                })
            })
            .collect();
        while out.last() == Some(&Fe(0)) {
            out.pop();
        }
        out
    }

    pub fn max_exponent(&self) -> u32 {
        self.coeffs.iter().flat_map(|t| t.iter().flat_map(|(e, _)| e.iter().copied())).max().unwrap_or(0)
    }
}

/// Power tables `pows[i][k] = prefix[i]^k` for `k <= max_exp`.
pub fn power_table(desc: &FieldDesc, prefix: &[Fe], max_exp: u32) -> Vec<Vec<Fe>> {
    prefix
        .iter()
        .map(|&x| {
            let mut v = Vec::with_capacity(max_exp as usize + 1);
            v.push(Fe(1));
            for k in 1..=max_exp as usize {
                v.push(desc.mul(v[k - 1], x));
            }
            v
        })
        .collect()
}
