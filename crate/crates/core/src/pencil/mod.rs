//! Pencils of hyperplane sections `X_t = X ∩ {t0 L0 + t1 L1 = 0}` of a
//! hypersurface, fibre classification and sampling of smooth fibres.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{extension, splitmix64, Embedding, Fe, FfError, FieldDesc, FieldRef};
use crate::variety::{
    is_smooth_point_scan, singular, singular_points, MPoly, ProjVariety, VarietyError, VarietyFile, Witness,
};

/// Default number of draws before [`sample_smooth_fibre`] gives up.
pub const REJECTION_BUDGET: usize = 1000;

/// Scan classification is used while `#P^2(F_{Q^{(D-1)^2}})` stays below
/// this many lines.
pub const SCAN_CLASSIFY_LIMIT: u128 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PencilError {
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Field(#[from] FfError),
    #[error("linear forms must have {expected} coefficients, found {found}")]
    FormLength { expected: usize, found: usize },
    #[error("L0 and L1 are linearly dependent")]
    DependentForms,
    #[error("the axis X ∩ {{L0 = L1 = 0}} is singular at {0:?}")]
    AxisSingular(Witness),
    #[error("hyperplane contains X")]
    DegenerateHyperplane,
    #[error("fibre parameter (0:0)")]
    ZeroParameter,
    #[error("fibre at {0:?} is worse than nodal; choose another pencil")]
    NotLefschetz(FibreParam),
    #[error("#Z = {found} exceeds the bound D^(N+1) = {bound}")]
    ProofBoundViolated { found: u64, bound: u128 },
    #[error("nodal locus has not been scanned")]
    NotScanned,
    #[error("no smooth fibre in {0} draws")]
    RejectionBudgetExceeded(usize),
    #[error("no pencil with a smooth axis in {0} draws")]
    NoPencilFound(usize),
    #[error("field of size {found} is not an extension of the pencil's base field")]
    FieldMismatch { found: u64 },
}

/// A point `(t0 : t1)` of `P^1(F_{q^w})`, coordinates in
/// `extension(base, w, 0).target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FibreParam {
    pub t0: u64,
    pub t1: u64,
    pub w: u32,
}

impl FibreParam {
    pub fn new(t0: u64, t1: u64, w: u32) -> Self {
        FibreParam { t0, t1, w }
    }

    /// Scales so that the first nonzero coordinate is 1.
    pub fn canonical(&self, desc: &FieldDesc) -> Result<FibreParam, PencilError> {
        let (a, b) = (Fe(self.t0), Fe(self.t1));
        let lead = if a != Fe(0) { a } else { b };
        let inv = desc.inv(lead).ok_or(PencilError::ZeroParameter)?;
        Ok(FibreParam { t0: desc.mul(a, inv).0, t1: desc.mul(b, inv).0, w: self.w })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum FibreClass {
    Smooth,
    Nodal { witness: Witness },
    WorseThanNodal { witness: Option<Witness> },
}

impl FibreClass {
    pub fn is_smooth(&self) -> bool {
        matches!(self, FibreClass::Smooth)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifyMode {
    /// Scan when affordable, otherwise the singular scheme.
    Auto,
    /// Exhaustive singular point scan up to degree `(D-1)^2`.
    Scan,
    /// Length and quadratic part of the singular scheme.
    Algebraic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: FibreClass,
    pub mode: ClassifyMode,
    /// False for fibres of dimension >= 2, where only a rational point
    /// search is done.
    pub exact: bool,
}

/// One closed point of the nodal locus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZEntry {
    pub t: FibreParam,
    /// Degree of the closed point over `F_q`.
    pub degree: u32,
    #[serde(flatten)]
    pub class: FibreClass,
}

impl ZEntry {
    pub fn nodal_verified(&self) -> bool {
        matches!(self.class, FibreClass::Nodal { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub k_scan: u32,
    pub closed_points: usize,
    /// Geometric points of `Z` found, `sum of degrees`.
    pub geometric: u64,
    /// `D^(N+1)`, asserted.
    pub proof_bound: u128,
    /// `3 (D-1)^2`, informational.
    pub generic_plane_pencil: u64,
    /// Degree `D (D-1)^(N-1)` of the dual hypersurface: the size of `Z` for
    /// a Lefschetz pencil.
    pub dual_degree: u128,
    pub lefschetz: bool,
    /// All of `Z` found (`geometric == dual_degree` and Lefschetz).
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct PencilDesc {
    pub x: ProjVariety,
    pub l0: Vec<Fe>,
    pub l1: Vec<Fe>,
    /// Whether the axis smoothness verdict is a proof.
    pub axis_exact: bool,
    pub z: Vec<ZEntry>,
    pub scan: Option<ScanSummary>,
}

/// The pencil with all data lifted to `F_Q`, `Q = q^w`.
#[derive(Clone, Debug)]
pub struct PencilField {
    pub w: u32,
    pub emb: Embedding,
    pub f: MPoly,
    pub l0: Vec<Fe>,
    pub l1: Vec<Fe>,
    pub degree: u32,
}

impl PencilField {
    pub fn desc(&self) -> &FieldRef {
        &self.emb.target
    }

    pub fn size(&self) -> u64 {
        self.emb.target.size()
    }

    /// Hyperplane `t0 L0 + t1 L1` over `F_Q`.
    pub fn hyperplane(&self, t: &FibreParam) -> Result<Vec<Fe>, PencilError> {
        let d = self.desc();
        if t.t0 >= d.size() || t.t1 >= d.size() {
            return Err(FfError::InvalidElement { value: t.t0.max(t.t1) }.into());
        }
        if t.t0 == 0 && t.t1 == 0 {
            return Err(PencilError::ZeroParameter);
        }
        Ok(self
            .l0
            .iter()
            .zip(&self.l1)
            .map(|(&a, &b)| d.add(d.mul(Fe(t.t0), a), d.mul(Fe(t.t1), b)))
            .collect())
    }
}

/// Linear forms `x_i = sum_k m[i][k] y_k` parametrizing `{h = 0}` by
/// eliminating the pivot variable: the one with the largest integer
/// representative, ties to the highest index.
fn hyperplane_parametrization(desc: &FieldDesc, h: &[Fe]) -> Option<Vec<Vec<Fe>>> {
    let (j, &hj) = h.iter().enumerate().filter(|(_, c)| c.0 != 0).max_by_key(|(i, c)| (c.0, *i))?;
    let inv = desc.inv(hj)?;
    let n = h.len();
    let mut m = vec![vec![Fe(0); n - 1]; n];
    let mut k = 0;
    for i in 0..n {
        if i == j {
            continue;
        }
        m[i][k] = Fe(1);
        m[j][k] = desc.neg(desc.mul(h[i], inv));
        k += 1;
    }
    Some(m)
}

/// Restriction of `f` to `{h = 0}`, as a form in `len(h) - 1` variables.
pub fn restrict_to_hyperplane(desc: &FieldDesc, f: &MPoly, h: &[Fe]) -> Result<MPoly, PencilError> {
    let m = hyperplane_parametrization(desc, h).ok_or(PencilError::ZeroParameter)?;
    let g = f.linear_change(desc, &m);
    if g.is_zero() {
        return Err(PencilError::DegenerateHyperplane);
    }
    Ok(g)
}

fn rank2(desc: &FieldDesc, a: &[Fe], b: &[Fe]) -> bool {
    (0..a.len()).any(|i| (i + 1..a.len()).any(|j| desc.mul(a[i], b[j]) != desc.mul(a[j], b[i])))
}

impl PencilDesc {
    /// Checks independence and axis smoothness.
    pub fn new(x: ProjVariety, l0: Vec<Fe>, l1: Vec<Fe>) -> Result<Self, PencilError> {
        if x.equations.len() != 1 {
            return Err(VarietyError::NotHypersurface.into());
        }
        for l in [&l0, &l1] {
            if l.len() != x.nvars {
                return Err(PencilError::FormLength { expected: x.nvars, found: l.len() });
            }
            if let Some(c) = l.iter().find(|c| c.0 >= x.desc.size()) {
                return Err(FfError::InvalidElement { value: c.0 }.into());
            }
        }
        let desc = x.desc.clone();
        if !rank2(&desc, &l0, &l1) {
            return Err(PencilError::DependentForms);
        }
        // axis: restrict to L0 = 0, then to the image of L1
        let m0 = hyperplane_parametrization(&desc, &l0).ok_or(PencilError::DependentForms)?;
        let l1_on = (0..x.nvars - 1)
            .map(|k| (0..x.nvars).fold(Fe(0), |acc, i| desc.add(acc, desc.mul(l1[i], m0[i][k]))))
            .collect::<Vec<_>>();
        let f0 = x.equations[0].linear_change(&desc, &m0);
        let axis_eq = restrict_to_hyperplane(&desc, &f0, &l1_on)?;
        let axis = ProjVariety::hypersurface(desc.clone(), axis_eq)?;
        let d = x.degree();
        let k_max = match axis.nvars {
            2 => (d / 2).max(1),
            3 => (d.saturating_sub(1)).pow(2),
            _ => 1,
        };
        let report = is_smooth_point_scan(&axis, k_max)?;
        if let Some(w) = report.witness {
            return Err(PencilError::AxisSingular(w));
        }
        Ok(PencilDesc { x, l0, l1, axis_exact: report.exact, z: Vec::new(), scan: None })
    }

    /// Draws `L0, L1` over `F_q` until the construction checks pass.
    pub fn random(x: ProjVariety, seed: u64) -> Result<Self, PencilError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let budget = 1000;
        for _ in 0..budget {
            let l0: Vec<Fe> = (0..x.nvars).map(|_| x.desc.random(&mut rng)).collect();
            let l1: Vec<Fe> = (0..x.nvars).map(|_| x.desc.random(&mut rng)).collect();
            match PencilDesc::new(x.clone(), l0, l1) {
                Ok(p) => return Ok(p),
                Err(PencilError::DependentForms | PencilError::AxisSingular(_) | PencilError::DegenerateHyperplane) => {}
                Err(e) => return Err(e),
            }
        }
        Err(PencilError::NoPencilFound(budget))
    }

    /// Draws pencils from derived seeds until one scans without a
    /// worse-than-nodal fibre up to `k_scan`. Returns the pencil and the
    /// number of rejected draws.
    pub fn random_lefschetz(
        x: ProjVariety,
        seed: u64,
        k_scan: u32,
        mode: ClassifyMode,
        budget: usize,
    ) -> Result<(Self, usize), PencilError> {
        for i in 0..budget {
            let mut p = PencilDesc::random(x.clone(), splitmix64(seed.wrapping_add(i as u64)))?;
            match p.scan_nodal_locus(k_scan, mode) {
                Ok(_) => return Ok((p, i)),
                Err(PencilError::NotLefschetz(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Err(PencilError::NoPencilFound(budget))
    }

    pub fn base(&self) -> &FieldRef {
        &self.x.desc
    }

    pub fn degree(&self) -> u32 {
        self.x.degree()
    }

    /// `N` for `X ⊂ P^N`.
    pub fn ambient_dim(&self) -> usize {
        self.x.nvars - 1
    }

    pub fn fibre_dim(&self) -> usize {
        self.x.nvars.saturating_sub(3)
    }

    /// Lifts the pencil to `F_{q^w}`.
    pub fn over(&self, w: u32) -> Result<PencilField, PencilError> {
        let emb = extension(self.base(), w, 0)?;
        let f = self.x.equations[0].map_coeffs(|c| emb.apply(c));
        let l0 = self.l0.iter().map(|&c| emb.apply(c)).collect();
        let l1 = self.l1.iter().map(|&c| emb.apply(c)).collect();
        Ok(PencilField { w, emb, f, l0, l1, degree: self.degree() })
    }

    /// Lifts the pencil to a given field `F_Q`, which must be the standard
    /// extension of the base field.
    pub fn over_field(&self, q_desc: &FieldDesc) -> Result<PencilField, PencilError> {
        let base = self.base();
        let mismatch = PencilError::FieldMismatch { found: q_desc.size() };
        if q_desc.p() != base.p() || q_desc.k() % base.k() != 0 {
            return Err(mismatch);
        }
        let pf = self.over(q_desc.k() / base.k())?;
        if pf.desc().modulus() != q_desc.modulus() {
            return Err(mismatch);
        }
        Ok(pf)
    }

    pub fn fibre_equation(&self, t: &FibreParam) -> Result<ProjVariety, PencilError> {
        fibre_equation(&self.over(t.w)?, t)
    }

    pub fn classify_fibre(&self, t: &FibreParam, mode: ClassifyMode) -> Result<Classification, PencilError> {
        classify_fibre(&self.over(t.w)?, t, mode)
    }

    /// Classifies every closed point of `P^1` of degree `<= k_scan` over
    /// `F_q` (one representative per Frobenius orbit) and records the
    /// singular ones in `z`. The summary is stored even when the scan ends
    /// with `NotLefschetz`.
    pub fn scan_nodal_locus(&mut self, k_scan: u32, mode: ClassifyMode) -> Result<ScanSummary, PencilError> {
        let q = self.base().size() as u128;
        let mut z = Vec::new();
        for k in 1..=k_scan {
            let pf = self.over(k)?;
            let desc = pf.desc().clone();
            let total = q.pow(k);
            let cap = crate::ff::enumeration_cap() as u128;
            if total > cap {
                return Err(VarietyError::EnumerationCapExceeded { needed: total, cap: cap as u64 }.into());
            }
            let mut params: Vec<FibreParam> = (0..total as u64)
                .filter(|&a| orbit_representative(&desc, q, k, Fe(a)))
                .map(|a| FibreParam::new(1, a, k))
                .collect();
            if k == 1 {
                params.insert(0, FibreParam::new(0, 1, 1));
            }
            let found: Vec<Option<ZEntry>> = params
                .par_iter()
                .map(|t| {
                    let c = classify_fibre(&pf, t, mode)?;
                    Ok((!c.class.is_smooth()).then(|| ZEntry { t: *t, degree: k, class: c.class }))
                })
                .collect::<Result<_, PencilError>>()?;
            z.extend(found.into_iter().flatten());
        }
        let d = self.degree() as u128;
        let n = self.ambient_dim() as u32;
        let geometric: u64 = z.iter().map(|e| e.degree as u64).sum();
        let proof_bound = d.pow(n + 1);
        let dual_degree = d * (d.saturating_sub(1)).pow(n.saturating_sub(1));
        let lefschetz = z.iter().all(|e| e.nodal_verified());
        let summary = ScanSummary {
            k_scan,
            closed_points: z.len(),
            geometric,
            proof_bound,
            generic_plane_pencil: 3 * (d as u64).saturating_sub(1).pow(2),
            dual_degree,
            lefschetz,
            complete: lefschetz && geometric as u128 == dual_degree,
        };
        let bad = z.iter().find(|e| !e.nodal_verified()).map(|e| e.t);
        self.z = z;
        self.scan = Some(summary.clone());
        if geometric as u128 > proof_bound {
            return Err(PencilError::ProofBoundViolated { found: geometric, bound: proof_bound });
        }
        if let Some(t) = bad {
            return Err(PencilError::NotLefschetz(t));
        }
        Ok(summary)
    }

    pub fn require_lefschetz(&self) -> Result<&ScanSummary, PencilError> {
        let s = self.scan.as_ref().ok_or(PencilError::NotScanned)?;
        match self.z.iter().find(|e| !e.nodal_verified()) {
            Some(e) => Err(PencilError::NotLefschetz(e.t)),
            None => Ok(s),
        }
    }

    /// `χ(U) = 2 - #Z`, with `#Z` counted geometrically.
    pub fn euler_char_u(&self) -> Result<i64, PencilError> {
        let s = self.scan.as_ref().ok_or(PencilError::NotScanned)?;
        Ok(2 - s.geometric as i64)
    }
}

/// True if `a` has exact degree `k` over `F_q` and is the smallest element
/// of its Frobenius orbit.
fn orbit_representative(desc: &FieldDesc, q: u128, k: u32, a: Fe) -> bool {
    let mut x = a;
    for i in 1..=k {
        x = desc.pow(x, q);
        if x == a {
            return i == k;
        }
        if x.0 < a.0 {
            return false;
        }
    }
    unreachable!("x^(q^k) = x on F_(q^k)")
}

pub fn fibre_equation(pf: &PencilField, t: &FibreParam) -> Result<ProjVariety, PencilError> {
    let h = pf.hyperplane(t)?;
    let g = restrict_to_hyperplane(pf.desc(), &pf.f, &h)?;
    Ok(ProjVariety::hypersurface(pf.desc().clone(), g)?)
}

/// Number of `F_{Q^k}` lines a scan classification of a degree `d` plane
/// curve visits at its top degree.
fn scan_cost(q: u64, d: u32) -> u128 {
    let k = (d.saturating_sub(1)).pow(2).max(1);
    let big = (q as u128).checked_pow(k).unwrap_or(u128::MAX);
    big.saturating_add(1)
}

pub fn classify_fibre(pf: &PencilField, t: &FibreParam, mode: ClassifyMode) -> Result<Classification, PencilError> {
    let fibre = fibre_equation(pf, t)?;
    classify_hypersurface(&fibre, mode)
}

/// Smooth / nodal / worse classification of a hypersurface; exact for
/// plane curves.
pub fn classify_hypersurface(c: &ProjVariety, mode: ClassifyMode) -> Result<Classification, PencilError> {
    if c.nvars != 3 {
        let r = is_smooth_point_scan(c, 1)?;
        let class = match r.witness {
            None => FibreClass::Smooth,
            Some(w) => FibreClass::WorseThanNodal { witness: Some(w) },
        };
        return Ok(Classification { class, mode: ClassifyMode::Scan, exact: r.exact });
    }
    let mode = match mode {
        ClassifyMode::Auto if scan_cost(c.desc.size(), c.degree()) <= SCAN_CLASSIFY_LIMIT => ClassifyMode::Scan,
        ClassifyMode::Auto => ClassifyMode::Algebraic,
        m => m,
    };
    let class = match mode {
        ClassifyMode::Scan => classify_by_scan(c)?,
        _ => classify_by_scheme(c)?,
    };
    Ok(Classification { class, mode, exact: true })
}

fn witness(k: u32, p: &[Fe]) -> Witness {
    Witness { k, coords: p.iter().map(|x| x.0).collect() }
}

/// Counts singular points over `F_{Q^k}` for `k <= (D-1)^2`. A single
/// geometric singular point must be rational; any growth of the count past
/// `k = 1` means a second geometric point.
fn classify_by_scan(c: &ProjVariety) -> Result<FibreClass, PencilError> {
    let k_max = (c.degree().saturating_sub(1)).pow(2).max(1);
    let (desc1, pts1) = singular_points(c, 1)?;
    if pts1.len() >= 2 {
        return Ok(FibreClass::WorseThanNodal { witness: Some(witness(1, &pts1[0])) });
    }
    for k in 2..=k_max {
        let (_, pts) = singular_points(c, k)?;
        if pts.len() > pts1.len() {
            let w = pts.first().map(|p| witness(k, p));
            return Ok(FibreClass::WorseThanNodal { witness: w });
        }
    }
    let Some(p) = pts1.first() else {
        return Ok(FibreClass::Smooth);
    };
    let pt = [p[0], p[1], p[2]];
    if singular::quadratic_part_nondegenerate(&desc1, &c.equations[0], &pt) {
        Ok(FibreClass::Nodal { witness: witness(1, p) })
    } else {
        Ok(FibreClass::WorseThanNodal { witness: Some(witness(1, p)) })
    }
}

fn classify_by_scheme(c: &ProjVariety) -> Result<FibreClass, PencilError> {
    let s = singular::singular_scheme(&c.desc, &c.equations[0]);
    Ok(match (s.length, s.point) {
        (Some(0), _) => FibreClass::Smooth,
        (Some(1), Some(p)) if s.node => FibreClass::Nodal { witness: witness(1, &p) },
        (_, Some(p)) => FibreClass::WorseThanNodal { witness: Some(witness(1, &p)) },
        _ => FibreClass::WorseThanNodal { witness: None },
    })
}

/// Rejection sampling of a uniform `t ∈ U(F_Q)`.
pub fn sample_smooth_fibre(pf: &PencilField, seed: u64) -> Result<FibreParam, PencilError> {
    sample_smooth_fibre_with_budget(pf, seed, REJECTION_BUDGET)
}

pub fn sample_smooth_fibre_with_budget(pf: &PencilField, seed: u64, budget: usize) -> Result<FibreParam, PencilError> {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let q = pf.size();
    for _ in 0..budget {
        let r = rng.gen_range(0..=q);
        let t = if r == q { FibreParam::new(0, 1, pf.w) } else { FibreParam::new(1, r, pf.w) };
        if classify_fibre(pf, &t, ClassifyMode::Auto)?.class.is_smooth() {
            return Ok(t);
        }
    }
    Err(PencilError::RejectionBudgetExceeded(budget))
}

/// On-disk pencil: a variety block plus the two forms and optional scan
/// results.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilFile {
    #[serde(flatten)]
    pub variety: VarietyFile,
    #[serde(rename = "L0")]
    pub l0: Vec<u64>,
    #[serde(rename = "L1")]
    pub l1: Vec<u64>,
    #[serde(rename = "Z", default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<ZEntry>>,
}

impl PencilFile {
    pub fn to_pencil(&self) -> Result<PencilDesc, PencilError> {
        let x = self.variety.to_variety()?;
        let elems = |v: &[u64]| v.iter().map(|&c| x.desc.elem(c)).collect::<Result<Vec<_>, _>>();
        let l0 = elems(&self.l0)?;
        let l1 = elems(&self.l1)?;
        let mut p = PencilDesc::new(x, l0, l1)?;
        if let Some(z) = &self.z {
            p.z = z.clone();
        }
        Ok(p)
    }

    pub fn from_pencil(p: &PencilDesc) -> Self {
        PencilFile {
            variety: VarietyFile::from_variety(&p.x),
            l0: p.l0.iter().map(|c| c.0).collect(),
            l1: p.l1.iter().map(|c| c.0).collect(),
            z: p.scan.as_ref().map(|_| p.z.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::field_make;
    use crate::variety::{fermat, poly_from_ints};

    fn unit(n: usize, i: usize) -> Vec<Fe> {
        let mut v = vec![Fe(0); n];
        v[i] = Fe(1);
        v
    }

    fn fermat_surface(p: u64) -> ProjVariety {
        let f = field_make(p, 1, 0).unwrap();
        ProjVariety::hypersurface(f, fermat(4, 3)).unwrap()
    }

    #[test]
    fn spec_fibre_equations() {
        let x = fermat_surface(2);
        let p = PencilDesc::new(x, unit(4, 3), unit(4, 0)).unwrap();
        let f2 = p.base().clone();
        assert_eq!(p.fibre_equation(&FibreParam::new(1, 0, 1)).unwrap().equations[0], fermat(3, 3));
        // x = 0 leaves y^3 + z^3 + w^3 in (y, z, w)
        assert_eq!(p.fibre_equation(&FibreParam::new(0, 1, 1)).unwrap().equations[0], fermat(3, 3));
        // w + x = 0, w eliminated: x^3 + y^3 + z^3 + x^3 = y^3 + z^3
        let g = p.fibre_equation(&FibreParam::new(1, 1, 1)).unwrap();
        let expect = poly_from_ints(&f2, 3, &[(&[0, 3, 0], 1), (&[0, 0, 3], 1)]);
        assert_eq!(g.equations[0], expect);
        // re-expansion oracle: points of the fibre are points of X on the plane
        for a in 0..2u64 {
            for b in 0..2 {
                for c in 0..2 {
                    let on_fibre = g.equations[0].eval(&f2, &[Fe(a), Fe(b), Fe(c)]);
                    let on_x = p.x.equations[0].eval(&f2, &[Fe(a), Fe(b), Fe(c), Fe(a)]);
                    assert_eq!(on_fibre, on_x);
                }
            }
        }
    }

    #[test]
    fn construction_errors() {
        let x = fermat_surface(2);
        assert_eq!(PencilDesc::new(x.clone(), unit(4, 0), unit(4, 0)).unwrap_err(), PencilError::DependentForms);
        assert!(matches!(
            PencilDesc::new(x, unit(3, 0), unit(4, 1)).unwrap_err(),
            PencilError::FormLength { .. }
        ));
    }

    #[test]
    fn spec_classifications() {
        let f5 = field_make(5, 1, 0).unwrap();
        let nodal = poly_from_ints(&f5, 3, &[(&[0, 2, 1], 1), (&[3, 0, 0], -1), (&[2, 0, 1], -1)]);
        let cusp = poly_from_ints(&f5, 3, &[(&[0, 2, 1], 1), (&[3, 0, 0], -1)]);
        for mode in [ClassifyMode::Scan, ClassifyMode::Algebraic] {
            let c = classify_hypersurface(&ProjVariety::hypersurface(f5.clone(), nodal.clone()).unwrap(), mode).unwrap();
            assert_eq!(c.class, FibreClass::Nodal { witness: Witness { k: 1, coords: vec![0, 0, 1] } });
            let c = classify_hypersurface(&ProjVariety::hypersurface(f5.clone(), cusp.clone()).unwrap(), mode).unwrap();
            assert!(matches!(c.class, FibreClass::WorseThanNodal { .. }));
        }
        let p = PencilDesc::new(fermat_surface(2), unit(4, 3), unit(4, 0)).unwrap();
        let c = p.classify_fibre(&FibreParam::new(1, 0, 1), ClassifyMode::Scan).unwrap();
        assert_eq!(c.class, FibreClass::Smooth);
        assert!(c.exact);
    }

    #[test]
    fn euler_characteristic() {
        let mut p = PencilDesc::new(fermat_surface(5), unit(4, 3), unit(4, 0)).unwrap();
        assert_eq!(p.euler_char_u(), Err(PencilError::NotScanned));
        for (g, chi) in [(0u64, 2i64), (12, -10), (3, -1)] {
            p.scan = Some(ScanSummary {
                k_scan: 1,
                closed_points: 0,
                geometric: g,
                proof_bound: 81,
                generic_plane_pencil: 12,
                dual_degree: 12,
                lefschetz: true,
                complete: false,
            });
            assert_eq!(p.euler_char_u().unwrap(), chi);
        }
    }

    #[test]
    fn orbit_representatives_partition_p1() {
        let f2 = field_make(2, 1, 0).unwrap();
        for k in 1..=4u32 {
            let big = extension(&f2, k, 0).unwrap().target;
            let reps = (0..big.size()).filter(|&a| orbit_representative(&big, 2, k, Fe(a))).count() as u64;
            // monic irreducibles of degree k over F_2
            let expect = [2u64, 1, 2, 3][k as usize - 1];
            assert_eq!(reps, expect);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_smooth() {
        let p = PencilDesc::new(fermat_surface(2), unit(4, 3), unit(4, 0)).unwrap();
        let pf = p.over(6).unwrap();
        let a = sample_smooth_fibre(&pf, 11).unwrap();
        assert_eq!(a, sample_smooth_fibre(&pf, 11).unwrap());
        assert!(classify_fibre(&pf, &a, ClassifyMode::Algebraic).unwrap().class.is_smooth());
    }

    #[test]
    fn pencil_file_round_trip() {
        let mut p = PencilDesc::new(fermat_surface(5), unit(4, 3), unit(4, 0)).unwrap();
        let _ = p.scan_nodal_locus(1, ClassifyMode::Algebraic);
        let file = PencilFile::from_pencil(&p);
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains("\"L0\"") && json.contains("\"Z\""));
        let back: PencilFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_pencil().unwrap().z, p.z);
    }
}
