//! Projective varieties over `F_q`: point counts over extensions, singular
//! point scans and zeta numerators of smooth plane curves.

pub mod cubic;
pub mod mpoly;
pub mod singular;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{enumeration_cap, extension, field_from_modulus, field_make, Fe, FfError, FieldDesc, FieldRef};
use crate::poly::{self, dense, roots, IntPoly, PolyError, WeilPoly};
pub use mpoly::MPoly;
use mpoly::{power_table, LastVarView};

/// Fields above this size count genus-1 curves through the group law
/// instead of line by line.
pub const LINE_COUNT_LIMIT: u64 = 1 << 16;

/// The predicted `N_{g+1}` is checked against a direct count while
/// `q^{g+1}` stays at or below this.
pub const CROSS_CHECK_LIMIT: u64 = 1 << 13;

/// Tolerance used when verifying curve numerators with [`poly::is_weil`].
pub const WEIL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarietyError {
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("enumeration needs {needed} prefixes, cap is {cap}")]
    EnumerationCapExceeded { needed: u128, cap: u64 },
    #[error("equation {0} is not homogeneous")]
    NotHomogeneous(usize),
    #[error("exponent vector of length {found}, expected {expected}")]
    BadExponentLength { expected: usize, found: usize },
    #[error("coefficient {0} is not an element of the field")]
    InvalidCoefficient(u64),
    #[error("expected a plane curve (one equation in three variables)")]
    NotPlaneCurve,
    #[error("expected a hypersurface (one equation)")]
    NotHypersurface,
    #[error("zeta recovery produced a non-integral coefficient; the curve is singular or a count is wrong")]
    NonIntegralCoefficient,
    #[error("numerator failed the Weil check: {0}")]
    WeilCheckFailed(String),
    #[error("invalid variety file: {0}")]
    Format(String),
}

/// A projective variety `V(equations) ⊂ P^{nvars-1}` over `F_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjVariety {
    pub desc: FieldRef,
    pub nvars: usize,
    pub equations: Vec<MPoly>,
    pub dim_hint: Option<u32>,
}

/// Exact counts `k -> #V(F_{q^k})`.
pub type CountTable = BTreeMap<u32, u64>;

impl ProjVariety {
    pub fn new(desc: FieldRef, nvars: usize, equations: Vec<MPoly>) -> Result<Self, VarietyError> {
        for (i, e) in equations.iter().enumerate() {
            if e.nvars() != nvars {
                return Err(VarietyError::BadExponentLength { expected: nvars, found: e.nvars() });
            }
            if !e.is_homogeneous() {
                return Err(VarietyError::NotHomogeneous(i));
            }
            if let Some((_, c)) = e.terms().find(|(_, c)| c.0 >= desc.size()) {
                return Err(VarietyError::InvalidCoefficient(c.0));
            }
        }
        Ok(ProjVariety { desc, nvars, equations, dim_hint: None })
    }

    pub fn hypersurface(desc: FieldRef, f: MPoly) -> Result<Self, VarietyError> {
        let n = f.nvars();
        ProjVariety::new(desc, n, vec![f])
    }

    /// Largest equation degree `D`.
    pub fn degree(&self) -> u32 {
        self.equations.iter().filter_map(|e| e.total_degree()).max().unwrap_or(0)
    }

    pub fn is_plane_curve(&self) -> bool {
        self.nvars == 3 && self.equations.len() == 1
    }

    /// Same equations over `F_{q^k}`.
    pub fn base_change(&self, k: u32) -> Result<ProjVariety, VarietyError> {
        let emb = extension(&self.desc, k, 0)?;
        let equations = self.equations.iter().map(|e| e.map_coeffs(|c| emb.apply(c))).collect();
        Ok(ProjVariety { desc: emb.target.clone(), nvars: self.nvars, equations, dim_hint: self.dim_hint })
    }
}

/// `(d - 1)(d - 2) / 2`.
pub fn genus_plane(d: u32) -> u32 {
    if d == 0 {
        return 0;
    }
    (d - 1) * d.saturating_sub(2) / 2
}

/// `#P^n(F_Q)`.
pub fn projective_space_count(q: u64, n: usize) -> u128 {
    (0..=n as u32).map(|i| (q as u128).pow(i)).sum()
}

fn prefix_count(q: u64, len: usize) -> u128 {
    if len == 0 {
        0
    } else {
        projective_space_count(q, len - 1)
    }
}

/// Canonical prefix number `idx` of `P^{len-1}(F_Q)`: first nonzero
/// coordinate 1, remaining coordinates as base-`Q` digits.
fn decode_prefix(q: u64, len: usize, mut idx: u128, out: &mut [Fe]) {
    for lead in 0..len {
        let block = (q as u128).pow((len - 1 - lead) as u32);
        if idx < block {
            for x in out.iter_mut().take(lead) {
                *x = Fe(0);
            }
            out[lead] = Fe(1);
            for x in out.iter_mut().take(len).skip(lead + 1).rev() {
                *x = Fe((idx % q as u128) as u64);
                idx /= q as u128;
            }
            return;
        }
        idx -= block;
    }
    unreachable!("prefix index out of range")
}

/// Visits every point of `V(polys)` in `P^{n-1}(F_Q)` by enumerating
/// canonical prefixes of the first `n - 1` coordinates and solving for the
/// last one. `visit` gets the prefix and the gcd of the univariate
/// restrictions (empty when all vanish identically).
fn for_each_line<T: Send>(
    desc: &FieldDesc,
    polys: &[MPoly],
    nvars: usize,
    init: impl Fn() -> T + Sync + Send,
    visit: impl Fn(&mut T, &[Fe], &[Fe]) + Sync + Send,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> Result<T, VarietyError> {
    let q = desc.size();
    let total = prefix_count(q, nvars - 1);
    let cap = enumeration_cap();
    if total > cap as u128 {
        return Err(VarietyError::EnumerationCapExceeded { needed: total, cap });
    }
    let views: Vec<LastVarView> = polys.iter().map(LastVarView::new).collect();
    let max_exp = views.iter().map(|v| v.max_exponent()).max().unwrap_or(0);
    let chunk = 2048u128;
    let nchunks = total.div_ceil(chunk);
    let result = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let mut acc = init();
            let mut prefix = vec![Fe(0); nvars - 1];
            for idx in ci * chunk..((ci + 1) * chunk).min(total) {
                decode_prefix(q, nvars - 1, idx, &mut prefix);
                let pows = power_table(desc, &prefix, max_exp);
                let mut g: Option<Vec<Fe>> = None;
                for v in &views {
                    let u = v.eval_prefix(desc, &pows);
                    g = Some(match g {
                        None => u,
                        Some(prev) if prev.is_empty() => u,
                        Some(prev) if u.is_empty() => prev,
                        Some(prev) => dense::gcd(desc, &prev, &u),
                    });
                }
                visit(&mut acc, &prefix, &g.unwrap_or_default());
            }
            acc
        })
        .reduce(&init, &merge);
    Ok(result)
}

fn last_point_on(desc: &FieldDesc, polys: &[MPoly], nvars: usize) -> bool {
    let mut pt = vec![Fe(0); nvars];
    pt[nvars - 1] = Fe(1);
    polys.iter().all(|p| p.eval(desc, &pt) == Fe(0))
}

/// Exact `#V(F_Q)` over the variety's own field.
pub fn count_points_base(v: &ProjVariety) -> Result<u64, VarietyError> {
    let desc = &*v.desc;
    if v.equations.is_empty() {
        return Ok(projective_space_count(desc.size(), v.nvars - 1) as u64);
    }
    if v.nvars == 1 {
        return Ok(v.equations.iter().all(|e| e.is_zero()) as u64);
    }
    let lines = for_each_line(
        desc,
        &v.equations,
        v.nvars,
        || 0u64,
        |acc, _, g| *acc += roots::count_distinct_roots(desc, g),
        |a, b| a + b,
    )?;
    Ok(lines + last_point_on(desc, &v.equations, v.nvars) as u64)
}

/// Exact `#V(F_{q^k})`.
pub fn count_points(v: &ProjVariety, k: u32) -> Result<u64, VarietyError> {
    if k == 1 {
        count_points_base(v)
    } else {
        count_points_base(&v.base_change(k)?)
    }
}

pub fn count_table(v: &ProjVariety, ks: &[u32]) -> Result<CountTable, VarietyError> {
    ks.iter().map(|&k| Ok((k, count_points(v, k)?))).collect()
}

/// Line-by-line count of a plane curve over `desc`.
pub fn count_plane_curve_lines(desc: &FieldRef, f: &MPoly) -> Result<u64, VarietyError> {
    count_points_base(&ProjVariety::hypersurface(desc.clone(), f.clone())?)
}

/// Exact smoothness test for a plane curve via its singular scheme.
pub fn plane_curve_is_smooth(desc: &FieldDesc, f: &MPoly) -> bool {
    singular::singular_scheme(desc, f).length == Some(0)
}

/// A point of `V` over `F_{q^k}`, coordinates in the field
/// `field_make(p, k_base * k, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub k: u32,
    pub coords: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothReport {
    pub smooth: bool,
    /// True when the verdict is a proof rather than a search result.
    pub exact: bool,
    pub k_max: u32,
    pub witness: Option<Witness>,
}

fn hypersurface_polys(v: &ProjVariety) -> Result<Vec<MPoly>, VarietyError> {
    if v.equations.len() != 1 {
        return Err(VarietyError::NotHypersurface);
    }
    let f = &v.equations[0];
    let mut polys = vec![f.clone()];
    polys.extend(f.gradient(&v.desc));
    Ok(polys)
}

/// All points of `V(polys)` over `desc`, canonical form.
pub fn common_zeros(desc: &FieldDesc, polys: &[MPoly], nvars: usize) -> Result<Vec<Vec<Fe>>, VarietyError> {
    let mut pts = for_each_line(
        desc,
        polys,
        nvars,
        Vec::new,
        |acc: &mut Vec<Vec<Fe>>, prefix, g| {
            for r in roots::distinct_roots(desc, g) {
                let mut p = prefix.to_vec();
                p.push(r);
                acc.push(p);
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    if last_point_on(desc, polys, nvars) {
        let mut p = vec![Fe(0); nvars];
        p[nvars - 1] = Fe(1);
        pts.push(p);
    }
    pts.sort();
    Ok(pts)
}

/// Singular points of a hypersurface over `F_{q^k}`, in the field of
/// `base_change(k)`.
pub fn singular_points(v: &ProjVariety, k: u32) -> Result<(FieldRef, Vec<Vec<Fe>>), VarietyError> {
    let w = if k == 1 { v.clone() } else { v.base_change(k)? };
    let polys = hypersurface_polys(&w)?;
    let pts = common_zeros(&w.desc, &polys, w.nvars)?;
    Ok((w.desc.clone(), pts))
}

/// Searches `P^m(F_{q^k})`, `k <= k_max`, for a point where the equation
/// and all partials vanish.
pub fn is_smooth_point_scan(v: &ProjVariety, k_max: u32) -> Result<SmoothReport, VarietyError> {
    let polys = hypersurface_polys(v)?;
    let d = v.degree();
    let exact_linear = d <= 1 && polys[1..].iter().any(|p| !p.is_zero());
    // repeated roots of a binary form have degree <= d / 2; singular points
    // of a reduced plane curve have degree <= (d - 1)^2
    let exact_bound = (v.nvars == 2 && k_max >= (d / 2).max(1)) || (v.nvars == 3 && k_max >= (d.saturating_sub(1)).pow(2));
    for k in 1..=k_max {
        let (_, pts) = singular_points(v, k)?;
        if let Some(p) = pts.first() {
            return Ok(SmoothReport {
                smooth: false,
                exact: true,
                k_max,
                witness: Some(Witness { k, coords: p.iter().map(|x| x.0).collect() }),
            });
        }
    }
    Ok(SmoothReport { smooth: true, exact: exact_linear || exact_bound, k_max, witness: None })
}

fn base_size(v: &ProjVariety) -> u128 {
    v.desc.size() as u128
}

/// `#C(F_{q^k})` for a plane curve, using the group law for smooth cubics
/// over large fields and the line-by-line count otherwise.
pub fn count_curve_points(c: &ProjVariety, k: u32) -> Result<u64, VarietyError> {
    if !c.is_plane_curve() {
        return Err(VarietyError::NotPlaneCurve);
    }
    let q = base_size(c).pow(k);
    if c.degree() == 3 && q > LINE_COUNT_LIMIT as u128 {
        let ck = if k == 1 { c.clone() } else { c.base_change(k)? };
        match cubic::count_smooth_cubic(&ck.desc, &ck.equations[0], 0x00c0_ffee ^ k as u64) {
            Ok(r) => return Ok(r.n),
            Err(e) => log::debug!("group-law count fell back to lines: {e:?}"),
        }
        return count_points_base(&ck);
    }
    count_points(c, k)
}

/// Zeta numerator `P(T) = 1 + a_1 T + ... + a_{2g} T^{2g}` of a smooth plane
/// curve of genus `g` from `N_1, ..., N_g`.
pub fn curve_numerator(c: &ProjVariety, g: u32) -> Result<WeilPoly, VarietyError> {
    if !c.is_plane_curve() {
        return Err(VarietyError::NotPlaneCurve);
    }
    let q = base_size(c);
    if g == 0 {
        return Ok(WeilPoly::one(q, 1));
    }
    let counts: Vec<u64> = (1..=g).map(|k| count_curve_points(c, k)).collect::<Result<_, _>>()?;
    numerator_from_counts(q, g, &counts, c).map(|(w, _)| w)
}

/// Builds and checks the numerator from `N_1..N_g`; also returns the
/// predicted `N_{g+1}`.
pub fn numerator_from_counts(
    q: u128,
    g: u32,
    counts: &[u64],
    c: &ProjVariety,
) -> Result<(WeilPoly, BigInt), VarietyError> {
    let qb = BigInt::from(q);
    let s: Vec<BigInt> = counts
        .iter()
        .enumerate()
        .map(|(i, &n)| qb.pow(i as u32 + 1) + 1 - BigInt::from(n))
        .collect();
    let half = poly::from_power_sums(&s).map_err(|_| VarietyError::NonIntegralCoefficient)?;
    let g = g as usize;
    let mut coeffs: Vec<BigInt> = (0..=2 * g).map(|i| half.coeff(i)).collect();
    for i in 0..g {
        coeffs[2 * g - i] = qb.pow((g - i) as u32) * &coeffs[i];
    }
    let p = IntPoly::new(coeffs);
    let rep = poly::is_weil(&p, &qb, WEIL_TOL);
    if !rep.passed {
        return Err(VarietyError::WeilCheckFailed(rep.reason.unwrap_or_default()));
    }
    let sums = poly::power_sums(&p, g + 1);
    let predicted = qb.pow(g as u32 + 1) + 1 - &sums[g];
    if q.pow(g as u32 + 1) <= CROSS_CHECK_LIMIT as u128 {
        let direct = count_points(c, g as u32 + 1)?;
        if BigInt::from(direct) != predicted {
            return Err(VarietyError::WeilCheckFailed(format!(
                "predicted N_{} = {predicted}, direct count {direct}",
                g + 1
            )));
        }
    }
    let mut w = WeilPoly::new(p, q, 1)?;
    w.verified = true;
    Ok((w, predicted))
}

/// One term of a variety file equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub c: u64,
}

/// On-disk variety description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyFile {
    pub p: u64,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modulus: Vec<u64>,
    pub nvars: usize,
    pub equations: Vec<Vec<TermJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_hint: Option<u32>,
}

impl VarietyFile {
    pub fn field(&self) -> Result<FieldRef, VarietyError> {
        if self.k > 1 && self.modulus.is_empty() {
            Ok(field_make(self.p, self.k, 0)?)
        } else {
            Ok(field_from_modulus(self.p, self.k, &self.modulus)?)
        }
    }

    pub fn to_variety(&self) -> Result<ProjVariety, VarietyError> {
        let desc = self.field()?;
        self.to_variety_in(desc)
    }

    pub fn to_variety_in(&self, desc: FieldRef) -> Result<ProjVariety, VarietyError> {
        if self.nvars == 0 {
            return Err(VarietyError::Format("nvars must be positive".into()));
        }
        let mut eqs = Vec::with_capacity(self.equations.len());
        for eq in &self.equations {
            let mut terms = Vec::with_capacity(eq.len());
            for t in eq {
                if t.exp.len() != self.nvars {
                    return Err(VarietyError::BadExponentLength { expected: self.nvars, found: t.exp.len() });
                }
                terms.push((t.exp.clone(), desc.elem(t.c).map_err(|_| VarietyError::InvalidCoefficient(t.c))?));
            }
            eqs.push(MPoly::from_terms_in(&desc, self.nvars, terms));
        }
        let mut v = ProjVariety::new(desc, self.nvars, eqs)?;
        v.dim_hint = self.dim_hint;
        Ok(v)
    }

    pub fn from_variety(v: &ProjVariety) -> Self {
        VarietyFile {
            p: v.desc.p(),
            k: v.desc.k(),
            modulus: v.desc.modulus().to_vec(),
            nvars: v.nvars,
            equations: v
                .equations
                .iter()
                .map(|e| e.terms().map(|(exp, c)| TermJson { exp: exp.clone(), c: c.0 }).collect())
                .collect(),
            dim_hint: v.dim_hint,
        }
    }
}

pub fn parse_variety(json: &str) -> Result<ProjVariety, VarietyError> {
    let file: VarietyFile = serde_json::from_str(json).map_err(|e| VarietyError::Format(e.to_string()))?;
    file.to_variety()
}

/// Helper for tests and fixtures: `sum c_i * x^{e_i}` over `desc`.
pub fn poly_from_ints(desc: &FieldDesc, nvars: usize, terms: &[(&[u32], i64)]) -> MPoly {
    MPoly::from_terms_in(desc, nvars, terms.iter().map(|(e, c)| (e.to_vec(), desc.from_int(*c))))
}

/// Fermat hypersurface `sum x_i^d`.
pub fn fermat(nvars: usize, d: u32) -> MPoly {
    MPoly::from_terms(
        nvars,
        (0..nvars).map(|i| {
            let mut e = vec![0; nvars];
            e[i] = d;
            (e, Fe(1))
        }),
    )
}
