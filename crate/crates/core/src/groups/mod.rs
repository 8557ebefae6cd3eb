//! Finite classical groups over `F_l`: orders, enumeration, sampling,
//! reversed characteristic polynomials and class fractions.

pub mod forms;
pub mod katz;
mod matrix;
pub mod orth;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{is_prime, splitmix64};
use crate::pencil::PencilError;
use crate::poly::ModPoly;
use crate::variety::VarietyError;

pub use katz::{equidistribution_check, katz_error_bound, EquidistReport, KatzBound};
pub use matrix::{bilinear, MatModL};
pub use orth::{classify_orth_subgroup, reflection, spinor_norm, OrthClass, SquareClass};

/// Default cap on `|G|` for enumeration.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;
/// Environment override for [`ENUMERATION_LIMIT`].
pub const GROUP_CAP_ENV: &str = "ZETAGCD_GROUP_CAP";

pub fn enumeration_limit() -> u64 {
    std::env::var(GROUP_CAP_ENV).ok().and_then(|s| s.parse().ok()).unwrap_or(ENUMERATION_LIMIT)
}
/// Number of generator steps in a sampled word.
pub const MIXING_LENGTH: usize = 64;
/// Above this many projective points, generators are taken along `e_i`
/// and `e_i + c e_j` only.
pub const MAX_GENERATOR_VECTORS: u128 = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum GroupError {
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("characteristic 2 is not supported")]
    CharTwo,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} is too large for machine arithmetic")]
    PrimeTooLarge(u64),
    #[error("symplectic groups need even dimension, got {0}")]
    OddSymplectic(usize),
    #[error("form is degenerate")]
    DegenerateForm,
    #[error("form is neither alternating nor symmetric")]
    FormNotClassical,
    #[error("form does not match the family")]
    FormMismatch,
    #[error("group of order {order} exceeds the enumeration cap {cap}")]
    EnumerationCapExceeded { order: BigUint, cap: u64 },
    #[error("closure exceeded {0} elements")]
    ClosureCapExceeded(usize),
    #[error("the group is above the enumeration cap and no samples were requested")]
    NoSamples,
    #[error("no element with multiplier {0}")]
    EmptyCoset(u64),
    #[error("zero vector")]
    ZeroVector,
    #[error("isotropic vector")]
    Isotropic,
    #[error("matrix is not an isometry of the form")]
    NotIsometry,
    #[error("{0:?} is not the reversed characteristic polynomial of an element of the coset")]
    NotACharpoly(Vec<u64>),
    #[error("l = {0} divides Q")]
    EllDividesQ(u64),
    #[error("dimension {0} is not supported here")]
    Unsupported(usize),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Sp,
    GSp,
    O,
    GO,
}

impl Family {
    pub fn is_symplectic(self) -> bool {
        matches!(self, Family::Sp | Family::GSp)
    }
    pub fn is_similitude(self) -> bool {
        matches!(self, Family::GSp | Family::GO)
    }
    /// `Sp` for `GSp`, `O` for `GO`.
    pub fn isometries(self) -> Family {
        if self.is_symplectic() {
            Family::Sp
        } else {
            Family::O
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Sp" | "sp" => Ok(Family::Sp),
            "GSp" | "gsp" => Ok(Family::GSp),
            "O" | "o" => Ok(Family::O),
            "GO" | "go" => Ok(Family::GO),
            _ => Err(format!("unknown family {s:?}")),
        }
    }
}

/// Which Gram matrix to use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormChoice {
    /// `[[0, I], [-I, 0]]`; split `[[0, I], [I, 0]]` for even orthogonal;
    /// the identity for odd orthogonal.
    Standard,
    /// `diag(1, ..., 1, delta)`.
    Diagonal(u64),
    Gram(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupSpec {
    pub family: Family,
    pub s: usize,
    pub ell: u64,
    pub form: MatModL,
}

impl GroupSpec {
    pub fn new(family: Family, s: usize, ell: u64) -> Result<Self, GroupError> {
        Self::with_form(family, s, ell, FormChoice::Standard)
    }

    pub fn with_form(family: Family, s: usize, ell: u64, form: FormChoice) -> Result<Self, GroupError> {
        if ell == 2 {
            return Err(GroupError::CharTwo);
        }
        if !is_prime(ell) {
            return Err(GroupError::NotPrime(ell));
        }
        if ell >= 1 << 31 {
            return Err(GroupError::PrimeTooLarge(ell));
        }
        if family.is_symplectic() && s % 2 == 1 {
            return Err(GroupError::OddSymplectic(s));
        }
        let form = match form {
            FormChoice::Standard if family.is_symplectic() => forms::standard_symplectic(ell, s),
            FormChoice::Standard if s % 2 == 0 => forms::split_orthogonal(ell, s),
            FormChoice::Standard => MatModL::identity(ell, s),
            FormChoice::Diagonal(d) => forms::diagonal_form(ell, s, d),
            FormChoice::Gram(rows) => {
                let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
                MatModL::from_rows(ell, &refs)?
            }
        };
        if form.s != s {
            return Err(GroupError::SizeMismatch { expected: s, found: form.s });
        }
        let ok = if family.is_symplectic() { forms::is_alternating(&form) } else { forms::is_symmetric(&form) };
        if !ok {
            return Err(GroupError::FormMismatch);
        }
        if form.det() == 0 {
            return Err(GroupError::DegenerateForm);
        }
        Ok(GroupSpec { family, s, ell, form })
    }

    pub fn with_family(&self, family: Family) -> Self {
        GroupSpec { family, ..self.clone() }
    }

    /// Whether `lambda` is the multiplier of some element.
    pub fn has_multiplier(&self, lambda: u64) -> bool {
        let lambda = lambda % self.ell;
        match self.family {
            Family::Sp | Family::O => lambda == 1,
            Family::GSp => lambda != 0,
            Family::GO if self.s % 2 == 0 => lambda != 0,
            Family::GO => lambda != 0 && matrix::is_square(lambda, self.ell),
        }
    }

    /// Multipliers occurring in the group.
    pub fn multipliers(&self) -> Vec<u64> {
        (1..self.ell).filter(|&l| self.has_multiplier(l)).collect()
    }

    pub fn label(&self) -> String {
        format!("{:?}({},F_{})", self.family, self.s, self.ell)
    }
}

/// `Some(lambda)` iff `M^T J M = lambda J` with `lambda != 0`.
pub fn preserves(spec: &GroupSpec, m: &MatModL) -> Result<Option<u64>, GroupError> {
    if m.s != spec.s {
        return Err(GroupError::SizeMismatch { expected: spec.s, found: m.s });
    }
    let j = &spec.form;
    let y = m.transpose().mul(j).mul(m);
    let Some(p) = j.a.iter().position(|&x| x != 0) else { return Ok(None) };
    let lambda = matrix::mulmod(y.a[p], matrix::invmod(j.a[p], spec.ell).unwrap(), spec.ell);
    Ok((lambda != 0 && y == j.scale(lambda)).then_some(lambda))
}

/// Membership in the group described by `spec`.
pub fn contains(spec: &GroupSpec, m: &MatModL) -> Result<bool, GroupError> {
    Ok(preserves(spec, m)?.is_some_and(|l| spec.has_multiplier(l)))
}

fn prod_terms(ell: &BigUint, r: u32) -> BigUint {
    (1..=r).fold(BigUint::one(), |acc, i| acc * (ell.pow(2 * i) - 1u32))
}

/// Closed-form order.
pub fn group_order(spec: &GroupSpec) -> BigUint {
    let l = BigUint::from(spec.ell);
    let s = spec.s as u32;
    let iso = if spec.family.is_symplectic() {
        let r = s / 2;
        l.pow(r * r) * prod_terms(&l, r)
    } else if s % 2 == 1 {
        let r = s / 2;
        2u32 * l.pow(r * r) * prod_terms(&l, r)
    } else if s == 0 {
        BigUint::one()
    } else {
        let r = s / 2;
        let lr = l.pow(r);
        let middle = if forms::is_split(&spec.form) { lr - 1u32 } else { lr + 1u32 };
        2u32 * l.pow(r * (r - 1)) * middle * prod_terms(&l, r - 1)
    };
    let mults = spec.multipliers().len() as u64;
    iso * mults
}

/// Order of the isometry subgroup (`Sp` or `O`); the size of each
/// multiplier coset.
pub fn isometry_order(spec: &GroupSpec) -> BigUint {
    group_order(&spec.with_family(spec.family.isometries()))
}

fn check_cap(spec: &GroupSpec) -> Result<(), GroupError> {
    let order = group_order(spec);
    let cap = enumeration_limit();
    if order > BigUint::from(cap) {
        return Err(GroupError::EnumerationCapExceeded { order, cap });
    }
    Ok(())
}

/// Transvection `gamma -> gamma + eps <gamma, delta> delta` with
/// `<x, y> = x^T J y`.
pub fn transvection(delta: &[u64], eps: i64, spec: &GroupSpec) -> Result<MatModL, GroupError> {
    if delta.len() != spec.s {
        return Err(GroupError::SizeMismatch { expected: spec.s, found: delta.len() });
    }
    if delta.iter().all(|&x| x % spec.ell == 0) {
        return Err(GroupError::ZeroVector);
    }
    let ell = spec.ell;
    let e = eps.rem_euclid(ell as i64) as u64;
    // <gamma, delta> = sum_j gamma_j (J delta)_j
    let jd = spec.form.apply(delta);
    let mut m = MatModL::identity(ell, spec.s);
    for i in 0..spec.s {
        for j in 0..spec.s {
            let v = (m.get(i, j) + matrix::mulmod(e, matrix::mulmod(delta[i] % ell, jd[j], ell), ell)) % ell;
            m.set(i, j, v);
        }
    }
    Ok(m)
}

fn unit(s: usize, i: usize) -> Vec<u64> {
    (0..s).map(|j| (j == i) as u64).collect()
}

/// Representatives of the points of `P^(s-1)(F_l)` (first nonzero entry 1)
/// when there are at most [`MAX_GENERATOR_VECTORS`], otherwise `e_i` and
/// `e_i + c e_j` (`i < j`, `c != 0`).
fn generator_vectors(spec: &GroupSpec) -> Vec<Vec<u64>> {
    let (s, ell) = (spec.s, spec.ell);
    let points = (ell as u128).pow(s as u32).saturating_sub(1) / (ell as u128 - 1);
    if points <= MAX_GENERATOR_VECTORS {
        let mut out = Vec::new();
        for lead in 0..s {
            let tail = s - lead - 1;
            for idx in 0..ell.pow(tail as u32) {
                let mut v = unit(s, lead);
                let mut x = idx;
                for slot in v.iter_mut().skip(lead + 1) {
                    *slot = x % ell;
                    x /= ell;
                }
                out.push(v);
            }
        }
        return out;
    }
    let mut out: Vec<Vec<u64>> = (0..s).map(|i| unit(s, i)).collect();
    for i in 0..s {
        for j in i + 1..s {
            for c in 1..ell {
                let mut v = unit(s, i);
                v[j] = c;
                out.push(v);
            }
        }
    }
    out
}

/// Transvections (symplectic) or reflections in non-isotropic vectors
/// (orthogonal) along [`generator_vectors`].
pub fn isometry_generators(spec: &GroupSpec) -> Vec<MatModL> {
    let vs = generator_vectors(spec);
    if spec.family.is_symplectic() {
        vs.iter().map(|v| transvection(v, 1, spec).unwrap()).collect()
    } else {
        vs.iter().filter_map(|v| reflection(v, spec).ok()).collect()
    }
}

/// Element with multiplier `lambda`.
pub fn multiplier_representative(spec: &GroupSpec, lambda: u64) -> Result<MatModL, GroupError> {
    if !spec.has_multiplier(lambda) {
        return Err(GroupError::EmptyCoset(lambda));
    }
    if lambda % spec.ell == 1 {
        return Ok(MatModL::identity(spec.ell, spec.s));
    }
    forms::similitude_with_multiplier(&spec.form, lambda)?.ok_or(GroupError::EmptyCoset(lambda))
}

/// Breadth-first closure of `gens` under multiplication, identity
/// included.
pub fn subgroup_closure(gens: &[MatModL], ell: u64, s: usize, cap: usize) -> Result<HashSet<MatModL>, GroupError> {
    let id = MatModL::identity(ell, s);
    let mut seen = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(GroupError::ClosureCapExceeded(cap));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// Calls `f` on every matrix of size `s <= 2` with multiplier `lambda`
/// (`None`: any multiplier of the family), by scanning all `l^(s^2)`
/// matrices; partial results are merged in order.
fn scan_small<T: Send, F, M>(spec: &GroupSpec, lambda: Option<u64>, init: impl Fn() -> T + Sync, f: F, merge: M) -> T
where
    F: Fn(&mut T, &[u64], u64) + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let (ell, s) = (spec.ell, spec.s);
    let cells = s * s;
    let inner = ell.pow(cells.saturating_sub(1) as u32);
    let g = spec.form.a.clone();
    let parts: Vec<T> = (0..ell)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut m = [0u64; 4];
            for idx in 0..inner {
                m[0] = first;
                let mut x = idx;
                for c in 1..cells {
                    m[c] = x % ell;
                    x /= ell;
                }
                let Some(l) = matrix::multiplier_raw(ell, s, &g, &m[..cells]) else { continue };
                if lambda.map_or(spec.has_multiplier(l), |want| want == l) {
                    f(&mut acc, &m[..cells], l);
                }
            }
            acc
        })
        .collect();
    parts.into_iter().fold(init(), merge)
}

/// Elements with multiplier `lambda` (`None`: the whole group).
fn coset_elements(spec: &GroupSpec, lambda: Option<u64>) -> Result<Vec<MatModL>, GroupError> {
    check_cap(spec)?;
    if let Some(l) = lambda {
        if !spec.has_multiplier(l) {
            return Err(GroupError::EmptyCoset(l));
        }
    }
    let (ell, s) = (spec.ell, spec.s);
    if s <= 2 {
        let mut out = scan_small(
            spec,
            lambda,
            Vec::new,
            |acc: &mut Vec<MatModL>, m, _| acc.push(MatModL { ell, s, a: m.to_vec() }),
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        out.sort();
        return Ok(out);
    }
    let base = subgroup_closure(&isometry_generators(spec), ell, s, enumeration_limit() as usize)?;
    let lambdas = match lambda {
        Some(l) => vec![l],
        None => spec.multipliers(),
    };
    let mut out = Vec::new();
    for l in lambdas {
        let rep = multiplier_representative(spec, l)?;
        out.extend(base.iter().map(|g| rep.mul(g)));
    }
    out.sort();
    Ok(out)
}

/// Every element, each exactly once (sorted).
pub fn enumerate_group(spec: &GroupSpec) -> Result<Vec<MatModL>, GroupError> {
    coset_elements(spec, None)
}

/// Elements with multiplier `lambda`.
pub fn enumerate_coset(spec: &GroupSpec, lambda: u64) -> Result<Vec<MatModL>, GroupError> {
    coset_elements(spec, Some(lambda))
}

/// Product of [`MIXING_LENGTH`] generators drawn uniformly from the
/// isometry generators and the identity, times a fixed element of
/// multiplier `lambda`.
pub fn sample_group(spec: &GroupSpec, lambda: u64, seed: u64) -> Result<MatModL, GroupError> {
    let rep = multiplier_representative(spec, lambda)?;
    let gens = isometry_generators(spec);
    Ok(sample_word(&gens, &rep, seed))
}

fn sample_word(gens: &[MatModL], rep: &MatModL, seed: u64) -> MatModL {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let mut m = rep.clone();
    for _ in 0..MIXING_LENGTH {
        // index gens.len() is the identity, so words of every parity occur
        let i = rng.gen_range(0..=gens.len());
        if i < gens.len() {
            m = m.mul(&gens[i]);
        }
    }
    m
}

/// Coefficients `c_0 = 1, c_1, ..., c_s` of `det(T I - M) = sum c_i T^(s-i)`
/// by Berkowitz's division-free algorithm.
fn berkowitz(m: &MatModL) -> Vec<u64> {
    let (s, ell) = (m.s, m.ell);
    if s == 0 {
        return vec![1];
    }
    let neg = |x: u64| (ell - x % ell) % ell;
    let mut v = vec![1, neg(m.get(0, 0))];
    for r in 1..s {
        // leading r x r block A, row R = m[r][0..r], column C = m[0..r][r]
        let mut t = vec![1, neg(m.get(r, r))];
        let mut col: Vec<u64> = (0..r).map(|i| m.get(i, r)).collect();
        for _ in 0..r {
            let rc = (0..r).fold(0, |acc, j| (acc + m.get(r, j) * col[j]) % ell);
            t.push(neg(rc));
            col = (0..r).map(|i| (0..r).fold(0, |acc, j| (acc + m.get(i, j) * col[j]) % ell)).collect();
        }
        let mut next = vec![0u64; r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate().take(i + 1) {
                *slot = (*slot + t[i - j] * vj) % ell;
            }
        }
        v = next;
    }
    v
}

/// `det(1 - T M)`.
pub fn charpoly_reversed(m: &MatModL) -> ModPoly {
    ModPoly::new(m.ell, berkowitz(m))
}

fn charpoly_key(ell: u64, s: usize, a: &[u64]) -> Vec<u64> {
    match s {
        1 => vec![1, (ell - a[0]) % ell],
        2 => {
            let tr = (a[0] + a[3]) % ell;
            let det = (a[0] * a[3] % ell + ell - a[1] * a[2] % ell) % ell;
            vec![1, (ell - tr) % ell, det]
        }
        _ => berkowitz(&MatModL { ell, s, a: a.to_vec() }),
    }
}

/// How a class fraction is computed when enumeration is too large.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub samples: u64,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { samples: 20_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassFraction {
    pub numerator: u64,
    /// `#Sp` or `#O` when exact, the sample size otherwise.
    pub denominator: u64,
    pub exact: bool,
    pub samples: Option<u64>,
}

impl ClassFraction {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Whether the forced eigenvalue of odd orthogonal similitudes is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharpolyView {
    #[default]
    Full,
    /// Odd orthogonal only: `det(1 - TM) / (1 - mu T)`, `mu = det(M) lambda^(-r)`
    /// the eigenvalue every element of the coset has.
    Reduced,
}

/// Multiset of reversed characteristic polynomials over a multiplier coset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharpolyCensus {
    pub spec: String,
    pub ell: u64,
    pub s: usize,
    pub lambda: u64,
    pub orthogonal: bool,
    pub counts: BTreeMap<Vec<u64>, u64>,
    pub total: u64,
    pub exact: bool,
    pub samples: Option<u64>,
}

impl CharpolyCensus {
    /// Exact when `|G|` is within [`enumeration_limit`], Monte Carlo otherwise.
    pub fn build(spec: &GroupSpec, lambda: u64, sampling: Sampling) -> Result<Self, GroupError> {
        let lambda = lambda % spec.ell;
        if !spec.has_multiplier(lambda) {
            return Err(GroupError::EmptyCoset(lambda));
        }
        let (ell, s) = (spec.ell, spec.s);
        let exact = check_cap(spec).is_ok();
        if !exact && sampling.samples == 0 {
            return Err(GroupError::NoSamples);
        }
        let counts: HashMap<Vec<u64>, u64> = if exact && s <= 2 {
            scan_small(
                spec,
                Some(lambda),
                HashMap::new,
                |acc: &mut HashMap<Vec<u64>, u64>, m, _| *acc.entry(charpoly_key(ell, s, m)).or_default() += 1,
                merge_counts,
            )
        } else if exact {
            let mut h = HashMap::new();
            for m in enumerate_coset(spec, lambda)? {
                *h.entry(berkowitz(&m)).or_default() += 1;
            }
            h
        } else {
            let rep = multiplier_representative(spec, lambda)?;
            let gens = isometry_generators(spec);
            let base = sampling.seed;
            (0..sampling.samples)
                .into_par_iter()
                .map(|i| {
                    let m = sample_word(&gens, &rep, splitmix64(base ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
                    HashMap::from([(berkowitz(&m), 1u64)])
                })
                .reduce(HashMap::new, merge_counts)
        };
        let total: u64 = counts.values().sum();
        if exact {
            let iso = isometry_order(spec).to_u64().unwrap();
            assert_eq!(total, iso, "coset size differs from the isometry group order");
        }
        Ok(CharpolyCensus {
            spec: spec.label(),
            ell,
            s,
            lambda,
            orthogonal: !spec.family.is_symplectic(),
            counts: counts.into_iter().collect(),
            total,
            exact,
            samples: (!exact).then_some(sampling.samples),
        })
    }

    fn fraction(&self, numerator: u64) -> ClassFraction {
        ClassFraction { numerator, denominator: self.total, exact: self.exact, samples: self.samples }
    }

    /// Forced eigenvalue of an odd orthogonal similitude from its reversed
    /// characteristic polynomial.
    fn reduce(&self, f: &[u64]) -> Vec<u64> {
        let ell = self.ell;
        if !self.orthogonal || self.s % 2 == 0 || f.len() != self.s + 1 {
            return f.to_vec();
        }
        let r = (self.s / 2) as u64;
        // c_s = (-1)^s det M
        let det = (ell - f[self.s]) % ell;
        let mu = matrix::mulmod(det, matrix::invmod(matrix::powmod(self.lambda, r, ell), ell).unwrap(), ell);
        let field = crate::ff::field_make(ell, 1, 0).unwrap();
        let fe: Vec<crate::ff::Fe> = f.iter().map(|&c| crate::ff::Fe(c)).collect();
        let lin = [crate::ff::Fe(1), crate::ff::Fe((ell - mu) % ell)];
        match crate::poly::dense::div_exact(&*field, &fe, &lin) {
            Some(q) => q.iter().map(|c| c.0).collect(),
            None => f.to_vec(),
        }
    }

    fn view(&self, f: &[u64], view: CharpolyView) -> ModPoly {
        match view {
            CharpolyView::Full => ModPoly::new(self.ell, f.to_vec()),
            CharpolyView::Reduced => ModPoly::new(self.ell, self.reduce(f)),
        }
    }

    pub fn contains(&self, f: &ModPoly) -> bool {
        let mut k = f.coeffs.clone();
        k.resize(self.s + 1, 0);
        self.counts.contains_key(&k)
    }

    /// Elements whose reversed characteristic polynomial has a nonconstant
    /// common factor with `f`.
    pub fn coprime_fraction(&self, f: &ModPoly, view: CharpolyView) -> Result<ClassFraction, GroupError> {
        if f.degree() == Some(self.s) && self.exact && !self.contains(f) {
            return Err(GroupError::NotACharpoly(f.coeffs.clone()));
        }
        let fv = self.view(&f.coeffs, view);
        if fv.degree().unwrap_or(0) == 0 {
            return Ok(self.fraction(0));
        }
        let mut n = 0;
        for (k, c) in &self.counts {
            let g = self.view(k, view).gcd(&fv).unwrap();
            if g.degree().unwrap_or(0) > 0 {
                n += c;
            }
        }
        Ok(self.fraction(n))
    }

    /// Elements with squarefree reversed characteristic polynomial.
    pub fn distinct_root_fraction(&self) -> ClassFraction {
        let n = self
            .counts
            .iter()
            .filter(|(k, _)| ModPoly::new(self.ell, k.to_vec()).is_squarefree().unwrap())
            .map(|(_, c)| c)
            .sum();
        self.fraction(n)
    }

    /// Distinct polynomials occurring, as `ModPoly`s.
    pub fn polys(&self) -> impl Iterator<Item = (ModPoly, u64)> + '_ {
        self.counts.iter().map(|(k, c)| (ModPoly::new(self.ell, k.clone()), *c))
    }

    /// Elements whose trace lies in `residues`.
    pub fn trace_fraction(&self, residues: &[u64]) -> ClassFraction {
        let ell = self.ell;
        let n = self
            .counts
            .iter()
            .filter(|(k, _)| {
                let tr = (ell - k.get(1).copied().unwrap_or(0)) % ell;
                residues.iter().any(|&r| r % ell == tr)
            })
            .map(|(_, c)| c)
            .sum();
        self.fraction(n)
    }
}

fn merge_counts(mut a: HashMap<Vec<u64>, u64>, b: HashMap<Vec<u64>, u64>) -> HashMap<Vec<u64>, u64> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Fraction of the `lambda` coset whose reversed characteristic polynomial
/// shares a factor with `f`, over `#Sp` or `#O`.
pub fn coprime_fraction(spec: &GroupSpec, lambda: u64, f: &ModPoly, sampling: Sampling) -> Result<ClassFraction, GroupError> {
    CharpolyCensus::build(spec, lambda, sampling)?.coprime_fraction(f, CharpolyView::Full)
}

/// Fraction of the `lambda` coset with squarefree reversed characteristic
/// polynomial.
pub fn distinct_root_fraction(spec: &GroupSpec, lambda: u64, sampling: Sampling) -> Result<ClassFraction, GroupError> {
    Ok(CharpolyCensus::build(spec, lambda, sampling)?.distinct_root_fraction())
}

/// Least-squares `C` in `y = C / l`, and the smallest `C` with
/// `y <= C / l` at every point.
pub fn fit_inverse_ell(points: &[(u64, f64)]) -> (f64, f64) {
    let (num, den) = points.iter().fold((0.0, 0.0), |(n, d), &(l, y)| (n + y / l as f64, d + 1.0 / (l as f64 * l as f64)));
    let envelope = points.iter().map(|&(l, y)| y * l as f64).fold(0.0, f64::max);
    (num / den, envelope)
}

/// CSV row `spec,lambda,f,numerator,denominator,exact,samples`.
pub fn fraction_csv_row(spec: &GroupSpec, lambda: u64, f: Option<&ModPoly>, c: &ClassFraction) -> String {
    let f = f.map_or(String::new(), |f| f.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    let samples = c.samples.map_or(String::new(), |s| s.to_string());
    format!("{},{},{},{},{},{},{}", spec.label(), lambda, f, c.numerator, c.denominator, c.exact, samples)
}
