//! Runs that tie the engine and the predictors together: identity checks,
//! cohomology tables, spectral-sequence pages and theorem verification.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{ratio, Rational};
use crate::catalog::{build, CatalogError, StructureSpec, TwistedStructure};
use crate::cohomology::{direct_cohomology, CohomEntry, CohomologyError, Frame, WeightSector};
use crate::exec::{map_ordered, ExecMode};
use crate::multivector::{
    euler_field, jacobi_defect, koszul, schouten, wedge, xu_decompose, Multivector,
};
use crate::predict::{
    package_pages, predict_e2_lambda4, predict_h_lambda4, predict_h_lambda8, predict_pages_lambda4,
    PredictedTable,
};
use crate::specseq::{FilteredSector, Page};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Prop2,
    Thm1,
    Thm2,
    Thm3,
    Identities,
}

impl Target {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "prop2" => Some(Target::Prop2),
            "thm1" => Some(Target::Thm1),
            "thm2" => Some(Target::Thm2),
            "thm3" => Some(Target::Thm3),
            "identities" => Some(Target::Identities),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

/// One compared quantity. Identity checks compare counts of nonzero terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyCell {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub page: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    pub expected: usize,
    pub actual: usize,
    pub status: Status,
}

impl VerifyCell {
    fn new(check: impl Into<String>, expected: usize, actual: usize) -> Self {
        VerifyCell {
            check: check.into(),
            weight: None,
            grade: None,
            page: None,
            p: None,
            q: None,
            expected,
            actual,
            status: if expected == actual {
                Status::Pass
            } else {
                Status::Fail
            },
        }
    }

    fn flag(check: impl Into<String>, ok: bool) -> Self {
        VerifyCell::new(check, 0, usize::from(!ok))
    }

    fn weight(mut self, weight: u32) -> Self {
        self.weight = Some(weight);
        self
    }

    fn at(mut self, weight: u32, grade: usize) -> Self {
        self.weight = Some(weight);
        self.grade = Some(grade);
        self
    }

    fn cell(mut self, page: Option<u32>, p: u32, q: u32) -> Self {
        self.page = page;
        self.p = Some(p);
        self.q = Some(q);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub target: Target,
    pub structure: String,
    pub status: Status,
    pub cells: Vec<VerifyCell>,
}

impl VerifyReport {
    fn new(target: Target, spec: &StructureSpec, cells: Vec<VerifyCell>) -> Self {
        let status = if cells.iter().all(|c| c.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        VerifyReport {
            target,
            structure: spec.to_string(),
            status,
            cells,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyCell> {
        self.cells.iter().filter(|c| c.status == Status::Fail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub structure: String,
    pub t_max: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub entries: Vec<CohomEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecseqReport {
    pub pages: Vec<Page>,
    pub limit: Vec<Page>,
    pub comparison: VerifyReport,
}

struct Prepared {
    st: TwistedStructure,
    frame: Frame,
}

impl Prepared {
    fn new(spec: &StructureSpec) -> Result<Self, HarnessError> {
        let st = build(spec)?;
        let frame = Frame::new(&st);
        Ok(Prepared { st, frame })
    }

    fn sector(&self, t: u32) -> Result<WeightSector, HarnessError> {
        Ok(WeightSector::build(&self.st, &self.frame, t)?)
    }

    fn filtered(&self, t: u32) -> Result<FilteredSector, HarnessError> {
        Ok(FilteredSector::new(self.sector(t)?)?)
    }

    /// `f` on every weight `0..=t_max`, in weight order.
    fn per_weight<T: Send>(
        &self,
        mode: ExecMode,
        t_max: u32,
        f: impl Fn(u32) -> Result<T, HarnessError> + Sync + Send,
    ) -> Result<Vec<T>, HarnessError> {
        map_ordered(mode, (0..=t_max).collect(), f)
            .into_iter()
            .collect()
    }
}

/// Jacobi, compatibility, the curl decomposition, and `d² = 0`,
/// `d′² = d″² = d′d″ + d″d′ = 0` on every sector up to `t_max`.
pub fn run_check(
    spec: &StructureSpec,
    t_max: u32,
    mode: ExecMode,
) -> Result<VerifyReport, HarnessError> {
    let pr = Prepared::new(spec)?;
    let st = &pr.st;
    let nonzero = |m: &Multivector| m.components().iter().filter(|p| !p.is_zero()).count();
    let mut cells = vec![
        VerifyCell::new("[L,L]=0", 0, nonzero(&jacobi_defect(&st.lambda))),
        VerifyCell::new("[L_I,L_I]=0", 0, nonzero(&jacobi_defect(&st.lambda_i))),
        VerifyCell::new(
            "[L_I,L_II]=0",
            0,
            nonzero(&schouten(&st.lambda_i, &st.lambda_ii)),
        ),
        VerifyCell::new("[L_II,L_II]=0", 0, nonzero(&jacobi_defect(&st.lambda_ii))),
        VerifyCell::flag("L=L_I+L_II", &st.lambda_i + &st.lambda_ii == st.lambda),
        VerifyCell::flag("structure invariants", st.check_invariants().is_ok()),
    ];
    let curl_ok = match xu_decompose(&st.lambda) {
        Ok((k, f)) => &wedge(&k, &euler_field()).scale(&ratio(1, 3)) + &koszul(&f) == st.lambda,
        Err(_) => false,
    };
    cells.push(VerifyCell::flag("L=(1/3)K^E+Pi_f", curl_ok));
    let sectors = pr.per_weight(mode, t_max, |t| {
        let sec = pr.sector(t)?;
        Ok(vec![
            VerifyCell::flag("d^2=0", sec.check_d_squared()).weight(t),
            VerifyCell::flag("d'^2=d''^2=d'd''+d''d'=0", sec.check_anticommutation()).weight(t),
        ])
    })?;
    cells.extend(sectors.into_iter().flatten());
    Ok(VerifyReport::new(Target::Identities, spec, cells))
}

/// Direct `H^c` per weight.
pub fn run_cohomology(
    spec: &StructureSpec,
    t_max: u32,
    with_reps: bool,
    mode: ExecMode,
) -> Result<CohomologyTable, HarnessError> {
    let pr = Prepared::new(spec)?;
    let rows = pr.per_weight(mode, t_max, |t| {
        Ok(direct_cohomology(&pr.sector(t)?, with_reps))
    })?;
    Ok(CohomologyTable {
        structure: spec.to_string(),
        t_max,
        note: no_target_note(spec),
        entries: rows.into_iter().flatten().collect(),
    })
}

fn no_target_note(spec: &StructureSpec) -> Option<String> {
    matches!(spec, StructureSpec::Lambda11 { .. })
        .then(|| "no closed-form target; direct computation only".to_string())
}

/// Pages `r ∈ pages` per weight, `E_∞`, and the checks `E_∞ = G(H)`,
/// `Σ_{p+q=n} dim E_∞ = dim Hⁿ`.
pub fn run_specseq(
    spec: &StructureSpec,
    t_max: u32,
    pages: RangeInclusive<u32>,
    dump_reps: bool,
    mode: ExecMode,
) -> Result<SpecseqReport, HarnessError> {
    let pr = Prepared::new(spec)?;
    let name = spec.to_string();
    let per = pr.per_weight(mode, t_max, |t| {
        let fs = pr.filtered(t)?;
        let mut ps: Vec<Page> = pages.clone().map(|r| fs.page(r, dump_reps)).collect();
        let mut inf = fs.einfty(dump_reps);
        for p in ps.iter_mut().chain(std::iter::once(&mut inf)) {
            p.structure = name.clone();
        }
        Ok((ps, inf, limit_checks(&fs)))
    })?;
    let mut all_pages = Vec::new();
    let mut limit = Vec::new();
    let mut cells = Vec::new();
    for (ps, inf, cs) in per {
        all_pages.extend(ps);
        limit.push(inf);
        cells.extend(cs);
    }
    Ok(SpecseqReport {
        pages: all_pages,
        limit,
        comparison: VerifyReport::new(Target::Identities, spec, cells),
    })
}

fn limit_checks(fs: &FilteredSector) -> Vec<VerifyCell> {
    let t = fs.t();
    let gh = fs.graded_of_h();
    let h = fs.sector().cohomology_dims();
    let mut out = Vec::new();
    for grade in 0..4 {
        let mut total = 0;
        for p in fs.cell_ps(grade) {
            let e = fs.cell_infinity(grade, p).dim();
            total += e;
            out.push(
                VerifyCell::new("E_inf=G(H)", gh[&(grade, p)], e)
                    .at(t, grade)
                    .cell(None, p, fs.q_of(grade, p)),
            );
        }
        out.push(VerifyCell::new("sum E_inf=dim H", h[grade], total).at(t, grade));
    }
    out.push(VerifyCell::flag("E_inf=E_r past collapse", fs.einfty_consistent()).weight(t));
    out
}

fn compare_weights(
    check: &str,
    pred: &PredictedTable,
    direct: &[(u32, [usize; 4])],
) -> Vec<VerifyCell> {
    let want = pred.dims_by_weight();
    direct
        .iter()
        .flat_map(|(t, h)| (0..4).map(move |g| (*t, g, h[g])))
        .map(|(t, g, h)| VerifyCell::new(check, want[&(g, t)], h).at(t, g))
        .collect()
}

/// Compares every nonzero cell of either side of page `r` with a table.
fn compare_page(
    check: &str,
    pred: &PredictedTable,
    fs: &FilteredSector,
    r: u32,
) -> Vec<VerifyCell> {
    let t = fs.t();
    let want = pred.dims_by_cell();
    let mut out = Vec::new();
    for grade in 0..4 {
        let ps = fs.cell_ps(grade);
        for (&(wt, g, p), &dim) in &want {
            if wt == t && g == grade && !ps.contains(&p) {
                out.push(VerifyCell::new(check, dim, 0).at(t, grade).cell(
                    Some(r),
                    p,
                    fs.q_of(grade, p),
                ));
            }
        }
        for p in ps {
            let exp = want.get(&(t, grade, p)).copied().unwrap_or(0);
            let act = fs.cell(r, grade, p).dim();
            if exp > 0 || act > 0 {
                out.push(VerifyCell::new(check, exp, act).at(t, grade).cell(
                    Some(r),
                    p,
                    fs.q_of(grade, p),
                ));
            }
        }
    }
    out
}

/// Runs the predictor matching `target` against direct computation.
fn lambda4_params(spec: &StructureSpec, what: &str) -> Result<(Rational, Rational), HarnessError> {
    match spec {
        StructureSpec::Lambda4 { a, b } => Ok((a.clone(), b.clone())),
        _ => Err(HarnessError::Unsupported(format!(
            "{what} concerns lambda4 only"
        ))),
    }
}

/// The closed-form table a target is compared against.
pub fn run_predict(
    spec: &StructureSpec,
    target: Target,
    t_max: u32,
    n: u32,
) -> Result<PredictedTable, HarnessError> {
    Ok(match (target, spec) {
        (Target::Thm2, _) => {
            let (a, b) = lambda4_params(spec, "thm2")?;
            predict_h_lambda4(&a, &b, t_max)?
        }
        (Target::Thm3, StructureSpec::Lambda8 { b, c, sign }) => {
            predict_h_lambda8(b, c, *sign, t_max)?
        }
        (Target::Thm3, _) => {
            return Err(HarnessError::Unsupported(
                "thm3 concerns lambda8 only".into(),
            ))
        }
        (Target::Prop2, _) => {
            let (a, b) = lambda4_params(spec, "prop2")?;
            predict_e2_lambda4(&a, &b, t_max)?
        }
        (Target::Thm1, _) => {
            let (a, b) = lambda4_params(spec, "thm1")?;
            predict_pages_lambda4(&a, &b, n, t_max)?
        }
        (Target::Identities, _) => {
            return Err(HarnessError::Unsupported(
                "identities have no predicted table".into(),
            ))
        }
    })
}

pub fn run_verify(
    spec: &StructureSpec,
    target: Target,
    t_max: u32,
    n: u32,
    mode: ExecMode,
) -> Result<VerifyReport, HarnessError> {
    if target == Target::Identities {
        return run_check(spec, t_max, mode);
    }
    let pred = run_predict(spec, target, t_max, n)?;
    let pr = Prepared::new(spec)?;
    let cells = match target {
        Target::Thm2 | Target::Thm3 => {
            let direct =
                pr.per_weight(mode, t_max, |t| Ok((t, pr.sector(t)?.cohomology_dims())))?;
            compare_weights("H", &pred, &direct)
        }
        Target::Prop2 => {
            let per = pr.per_weight(mode, t_max, |t| {
                Ok(compare_page("E2", &pred, &pr.filtered(t)?, 2))
            })?;
            per.into_iter().flatten().collect()
        }
        _ => {
            let (a, b) = lambda4_params(spec, "thm1")?;
            let rs = package_pages(&a, &b, n)?;
            let per = pr.per_weight(mode, t_max, |t| {
                let fs = pr.filtered(t)?;
                Ok(rs
                    .iter()
                    .flat_map(|&r| compare_page("E_r", &pred, &fs, r))
                    .collect::<Vec<_>>())
            })?;
            per.into_iter().flatten().collect()
        }
    };
    Ok(VerifyReport::new(target, spec, cells))
}
