//! Report assembly for the command-line tool: runs the pipeline on a problem
//! file and renders the result as text or versioned JSON.
//!
//! Every verdict carries a [`Provenance`] label. Bounded searches are never
//! labeled `Exact`.

use std::fmt::{self, Write as _};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::expansive::{expansive_minors, Certificate, ExpansivenessVerdict, WitnessSource};
use crate::fitting::{self, Candidate, CandidateVerdict, FreeResolution};
use crate::laurent::{LaurentPoly, TorusPoint};
use crate::mahler::{
    mahler_measure, zero_mahler_verdict, MahlerMethod, MahlerOptions, MahlerValue,
    ZeroEntropyVerdict,
};
use crate::polyio::{poly_list_strings, serialize_poly, ProblemFile};
use crate::presentation::{DeterminantalIdeal, PresentationError, PresentationMatrix};
use crate::square_dyn::{
    ergodic_check, fix_count_resultant, fix_count_with_precision, mixing_check, Lattice, PeriodicCount,
    PropertyVerdict,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("precision must be at least 53 bits, got {0}")]
    Precision(u32),
}

/// Knobs shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub tol: f64,
    /// Evaluation budget for the expansiveness sweep and the largest
    /// quadrature grid.
    pub grid_budget: u64,
    /// Bound for mixing, ergodicity and generalized cyclotomic searches.
    pub search_bound: u32,
    /// Starting precision in bits for ball evaluations; escalates on demand.
    pub precision: u32,
    pub max_period: u64,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub json: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            tol: 1e-6,
            grid_budget: 10_000_000,
            search_bound: 8,
            precision: 256,
            max_period: 8,
            threads: None,
            json: false,
        }
    }
}

impl ReportConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tol > 0.0) {
            return Err(ConfigError::NonPositive("tol"));
        }
        if self.grid_budget == 0 {
            return Err(ConfigError::NonPositive("grid budget"));
        }
        if self.search_bound == 0 {
            return Err(ConfigError::NonPositive("search bound"));
        }
        if self.max_period == 0 {
            return Err(ConfigError::NonPositive("max period"));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::NonPositive("threads"));
        }
        if self.precision < 53 {
            return Err(ConfigError::Precision(self.precision));
        }
        Ok(())
    }

    pub fn mahler_options(&self) -> MahlerOptions {
        MahlerOptions {
            tol: self.tol,
            grid_budget: self.grid_budget,
            cyclotomic_bound: self.search_bound,
        }
    }
}

/// How much a reported value can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Exact integer or symbolic computation.
    Exact,
    /// Rigorous enclosure from ball arithmetic or a certified sweep.
    CertifiedNumeric,
    /// Numeric estimate without a rigorous error bound.
    HeuristicNumeric,
    /// True within the searched range; not a proof.
    BoundedSearch,
    Undecided,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Finite values serialize as numbers, infinities as `"inf"`/`"-inf"`.
fn real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn fmt_real(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "∞".into() } else { "-∞".into() }
    } else {
        format!("{x:.12}")
    }
}

// ---------------------------------------------------------------------------
// Blocks

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationBlock {
    pub ok: bool,
    pub rank: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl ValidationBlock {
    pub fn of(a: &PresentationMatrix) -> Self {
        match a.validate() {
            Ok(()) => ValidationBlock {
                ok: true,
                rank: a.k(),
                k: a.k(),
                message: None,
            },
            Err(e) => {
                let rank = match e {
                    PresentationError::FreeSubmodule { rank, .. } => rank,
                    _ => a.rank(),
                };
                ValidationBlock {
                    ok: false,
                    rank,
                    k: a.k(),
                    message: Some(format!("free submodule; h = ∞ ({e})")),
                }
            }
        }
    }

    pub fn is_free_submodule(&self) -> bool {
        !self.ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealBlock {
    /// Unit-normalized nonzero `k × k` minors, deduplicated.
    pub generators: Vec<String>,
    pub gcd: String,
    pub content: String,
    pub label: Provenance,
}

impl IdealBlock {
    pub fn of(j: &DeterminantalIdeal) -> Self {
        IdealBlock {
            generators: poly_list_strings(&j.generators),
            gcd: serialize_poly(&j.gcd),
            content: if j.gcd.is_zero() {
                "0".into()
            } else {
                fitting::factor_integer(&j.gcd.content()).to_string()
            },
            label: Provenance::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyBlock {
    #[serde(serialize_with = "real")]
    pub value: f64,
    pub method: String,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    pub budget_exhausted: bool,
    pub label: Provenance,
}

impl EntropyBlock {
    pub fn of(m: &MahlerValue) -> Self {
        EntropyBlock {
            value: m.value,
            method: format!("{:?}", m.method),
            error: m.error_estimate,
            grid: m.grid,
            budget_exhausted: m.budget_exhausted,
            label: mahler_label(m.method),
        }
    }

    pub fn free_submodule() -> Self {
        EntropyBlock {
            value: f64::INFINITY,
            method: "FreeSubmodule".into(),
            error: 0.0,
            grid: None,
            budget_exhausted: false,
            label: Provenance::Exact,
        }
    }
}

fn mahler_label(m: MahlerMethod) -> Provenance {
    match m {
        MahlerMethod::ExactZero | MahlerMethod::ExactLogInteger | MahlerMethod::ZeroPolynomial => {
            Provenance::Exact
        }
        MahlerMethod::JensenRoots => Provenance::CertifiedNumeric,
        MahlerMethod::Quadrature => Provenance::HeuristicNumeric,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansiveBlock {
    /// `Expansive`, `NotExpansive` or `Undecided`.
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Witness angles in turns; exact fractions when the witness is exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_used: Option<u64>,
    pub label: Provenance,
}

fn point_strings(z: &TorusPoint, exact: bool) -> Vec<String> {
    if exact {
        z.angles().iter().map(|a| a.to_string()).collect()
    } else {
        z.to_f64().iter().map(|a| format!("{a:.17}")).collect()
    }
}

impl ExpansiveBlock {
    pub fn of(v: &ExpansivenessVerdict) -> Self {
        let empty = ExpansiveBlock {
            verdict: String::new(),
            certificate: None,
            grid: None,
            margin: None,
            witness: None,
            witness_source: None,
            residual: None,
            budget_used: None,
            label: Provenance::Undecided,
        };
        match v {
            ExpansivenessVerdict::Expansive {
                certificate,
                grid,
                margin,
            } => ExpansiveBlock {
                verdict: "Expansive".into(),
                certificate: Some(format!("{certificate:?}")),
                grid: *grid,
                margin: Some(*margin),
                label: match certificate {
                    Certificate::ConstantMinor | Certificate::UnivariateExact => Provenance::Exact,
                    Certificate::GridSweep => Provenance::CertifiedNumeric,
                },
                ..empty
            },
            ExpansivenessVerdict::NotExpansive {
                witness,
                residual,
                exact,
                source,
            } => ExpansiveBlock {
                verdict: "NotExpansive".into(),
                witness: Some(point_strings(witness, *exact)),
                witness_source: Some(format!("{source:?}")),
                residual: Some(*residual),
                label: match source {
                    WitnessSource::RootOfUnity
                    | WitnessSource::RealRootCount
                    | WitnessSource::RationalRounding => Provenance::Exact,
                    WitnessSource::Descent => Provenance::HeuristicNumeric,
                },
                ..empty
            },
            ExpansivenessVerdict::Undecided {
                best_margin,
                budget_used,
            } => ExpansiveBlock {
                verdict: "Undecided".into(),
                margin: Some(*best_margin),
                budget_used: Some(*budget_used),
                ..empty
            },
        }
    }

    /// `J_A = 0` vanishes on the whole torus.
    pub fn free_submodule(d: usize) -> Self {
        ExpansiveBlock {
            verdict: "NotExpansive".into(),
            certificate: None,
            grid: None,
            margin: None,
            witness: Some(vec!["0".into(); d]),
            witness_source: Some("ZeroIdeal".into()),
            residual: Some(0.0),
            budget_used: None,
            label: Provenance::Exact,
        }
    }

    pub fn is_undecided(&self) -> bool {
        self.label == Provenance::Undecided
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictBlock {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u32>,
    pub label: Provenance,
}

impl VerdictBlock {
    pub fn of(v: &PropertyVerdict) -> Self {
        match v {
            PropertyVerdict::Holds => VerdictBlock {
                verdict: "Holds".into(),
                witness: None,
                bound: None,
                label: Provenance::Exact,
            },
            PropertyVerdict::Fails { witness } => VerdictBlock {
                verdict: "Fails".into(),
                witness: Some(witness.to_string()),
                bound: None,
                label: Provenance::Exact,
            },
            PropertyVerdict::VerifiedUpTo { bound } => VerdictBlock {
                verdict: "VerifiedUpTo".into(),
                witness: None,
                bound: Some(*bound),
                label: Provenance::BoundedSearch,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixEntry {
    pub n: u64,
    pub count: PeriodicCount,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeEntry {
    /// Rows of the basis matrix; its columns generate the lattice.
    pub lattice: String,
    pub index: String,
    pub count: PeriodicCount,
    pub label: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEntry {
    pub n: u64,
    /// `n^{-d} log |Fix_{nZ^d}|`.
    #[serde(serialize_with = "real")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicBlock {
    pub det: String,
    /// Counts for the cubic lattices `nZ^d`.
    pub fix_counts: Vec<FixEntry>,
    pub fix_label: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_query: Option<LatticeEntry>,
    pub growth: Vec<GrowthEntry>,
    pub growth_label: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareBlock {
    #[serde(flatten)]
    pub periodic: PeriodicBlock,
    pub mixing: VerdictBlock,
    pub ergodic: VerdictBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittingLevelBlock {
    pub level: usize,
    pub rank: usize,
    pub generators: Vec<String>,
    pub gcd: String,
    pub content: String,
    pub label: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<CandidateBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateBlock {
    pub candidate: String,
    pub verdict: String,
    pub label: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittingBlock {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub ranks: Vec<usize>,
    pub levels: Vec<FittingLevelBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseEntry {
    pub clause: &'static str,
    pub property: &'static str,
    /// `None` for clauses that need the full prime decomposition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<Provenance>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsReport {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: String,
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub config: ReportConfig,
    pub validation: ValidationBlock,
    pub ideal: IdealBlock,
    pub entropy: EntropyBlock,
    pub expansiveness: ExpansiveBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square: Option<SquareBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitting: Option<FittingBlock>,
    pub clauses: Vec<ClauseEntry>,
    pub notes: Vec<String>,
}

/// Process exit status for a finished report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    FreeSubmodule,
    Undecided,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::FreeSubmodule => 3,
            Outcome::Undecided => 4,
        }
    }
}

impl DynamicsReport {
    /// Free submodule beats undecided core verdicts.
    pub fn outcome(&self) -> Outcome {
        if self.validation.is_free_submodule() {
            return Outcome::FreeSubmodule;
        }
        let entropy_undecided = self
            .clauses
            .iter()
            .any(|c| c.clause == "(e)" && c.label == Some(Provenance::Undecided));
        if self.expansiveness.is_undecided() || entropy_undecided {
            Outcome::Undecided
        } else {
            Outcome::Ok
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

// ---------------------------------------------------------------------------
// Pipeline pieces shared with the subcommands

/// `J_A` with its gcd; the zero ideal for a rank-deficient matrix.
pub fn ideal_of(a: &PresentationMatrix) -> DeterminantalIdeal {
    a.minors().unwrap_or_else(|_| DeterminantalIdeal {
        generators: Vec::new(),
        gcd: LaurentPoly::zero(a.dim()),
    })
}

/// Entropy of a validated presentation from the gcd of its minors.
pub fn entropy_of(j: &DeterminantalIdeal, cfg: &ReportConfig) -> MahlerValue {
    mahler_measure(&j.gcd, &cfg.mahler_options())
}

/// Clause (e) from an already computed entropy: the cyclotomic-free cofactor
/// is only measured again when generalized cyclotomic factors were removed.
pub fn positive_entropy_verdict(
    j: &DeterminantalIdeal,
    h: &MahlerValue,
    cfg: &ReportConfig,
) -> ZeroEntropyVerdict {
    let opts = cfg.mahler_options();
    zero_mahler_verdict(&j.gcd, cfg.search_bound, |rest| {
        if rest == &j.gcd {
            h.clone()
        } else {
            mahler_measure(rest, &opts)
        }
    })
}

fn positive_entropy_clause(v: &ZeroEntropyVerdict, h: &MahlerValue) -> ClauseEntry {
    let (status, label, text) = match v {
        ZeroEntropyVerdict::Yes { factors } => (
            "zero entropy",
            Provenance::Exact,
            if factors.is_empty() {
                "gcd(J_A) is a unit times an integer of modulus 1".to_string()
            } else {
                format!(
                    "gcd(J_A) is a unit times generalized cyclotomic factors: {}",
                    factors.join(", ")
                )
            },
        ),
        ZeroEntropyVerdict::No { measure, error } => (
            "positive entropy",
            mahler_label(h.method),
            format!(
                "m(gcd(J_A)) = {} ± {:.1e}, bounded away from 0",
                fmt_real(*measure),
                error
            ),
        ),
        ZeroEntropyVerdict::Undecided {
            measure,
            error,
            bound,
        } => (
            "undecided",
            Provenance::Undecided,
            format!(
                "no generalized cyclotomic factor with parameters up to {bound}, \
                 but m = {} ± {:.1e} is too small to separate from 0",
                fmt_real(*measure),
                error
            ),
        ),
    };
    ClauseEntry {
        clause: "(e)",
        property: "positive entropy",
        status: Some(status.into()),
        label: Some(label),
        text,
    }
}

/// Fix counts for `nZ^d`, `n = 1..=max_period`, plus the growth table and an
/// optional extra lattice.
pub fn periodic_block(
    a: &PresentationMatrix,
    cfg: &ReportConfig,
    periods: &[u64],
    lattice: Option<&Lattice>,
) -> Result<PeriodicBlock, crate::square_dyn::SquareError> {
    let g = a.det()?;
    let d = g.dim();
    let mut fix_counts = Vec::with_capacity(periods.len());
    let mut growth = Vec::new();
    for &n in periods {
        let count = fix_count_resultant(&g, &vec![n as i64; d]);
        if let PeriodicCount::Finite(c) = &count {
            growth.push(GrowthEntry {
                n,
                value: crate::ball::ln_bigint(c) / (n as f64).powi(d as i32),
            });
        }
        fix_counts.push(FixEntry { n, count });
    }
    let lattice_query = match lattice {
        Some(l) => Some(LatticeEntry {
            lattice: l.to_string(),
            index: l.index().to_string(),
            count: fix_count_with_precision(a, l, cfg.precision)?,
            label: Provenance::Exact,
        }),
        None => None,
    };
    Ok(PeriodicBlock {
        det: serialize_poly(&g.unit_normalize()),
        fix_counts,
        fix_label: Provenance::Exact,
        lattice_query,
        growth,
        growth_label: Provenance::CertifiedNumeric,
    })
}

pub fn fitting_block(
    maps: &[crate::matrix::PolyMatrix],
    candidate: Option<&str>,
) -> Result<FittingBlock, ReportError> {
    let res = FreeResolution::new(maps.to_vec())?;
    let ranks = res.maps().iter().map(|m| m.rank()).collect();
    if let Err(e) = fitting::validate(&res) {
        return Ok(FittingBlock {
            valid: false,
            message: Some(e.to_string()),
            ranks,
            levels: Vec::new(),
        });
    }
    let cand = candidate
        .map(|c| fitting::parse_candidate(c, res.dim()).map(|p| (c.to_string(), p)))
        .transpose()?;
    let mut levels = Vec::new();
    for lvl in fitting::fitting_report(&res)? {
        let candidate = match &cand {
            Some((text, p)) => {
                let verdict = match p {
                    Candidate::Principal(q) if q.is_unit() => CandidateVerdict::Unsupported {
                        reason: "candidate is a unit".into(),
                    },
                    _ => fitting::candidate_check(&res, lvl.level, p)?,
                };
                let label = match verdict {
                    CandidateVerdict::Unsupported { .. } => Provenance::Undecided,
                    _ => Provenance::Exact,
                };
                Some(CandidateBlock {
                    candidate: text.clone(),
                    verdict: verdict.to_string(),
                    label,
                })
            }
            None => None,
        };
        levels.push(FittingLevelBlock {
            level: lvl.level,
            rank: lvl.rank,
            generators: poly_list_strings(&lvl.generators),
            gcd: serialize_poly(&lvl.gcd),
            content: lvl.content.to_string(),
            label: Provenance::Exact,
            candidate,
        });
    }
    Ok(FittingBlock {
        valid: true,
        message: None,
        ranks,
        levels,
    })
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fitting(#[from] crate::fitting::FittingError),
    #[error(transparent)]
    Square(#[from] crate::square_dyn::SquareError),
    #[error(transparent)]
    Parse(#[from] crate::polyio::ParseError),
}

// ---------------------------------------------------------------------------
// Full report

const TEXT_A: &str = "X_M satisfies the descending chain condition on closed invariant \
subgroups iff M is Noetherian over R.";
const TEXT_B: &str = "ergodic iff for every associated prime P and every k >= 1 the ideal \
{(u^n)^k - 1 : n in Z^d} is not contained in P.";
const TEXT_C: &str = "mixing iff u^n - 1 lies in no associated prime for every n != 0.";
const TEXT_D: &str = "mixing of all orders iff every associated prime P is pR for a rational \
prime p, or P ∩ Z = 0 and α^{R/P} is mixing. Deciding this needs the full list of associated \
primes, which is not computed.";
const TEXT_E: &str = "positive entropy iff some associated prime is principal and not \
generated by a generalized cyclotomic polynomial; read off gcd(J_A).";
const TEXT_F: &str = "completely positive entropy iff α^{R/P} has positive entropy for every \
associated prime P. Needs the full prime decomposition, which is not computed.";
const TEXT_G: &str = "Bernoulli iff completely positive entropy; needs the same data as (f).";
const TEXT_H: &str = "expansive iff M is Noetherian and no associated prime has a zero on the \
torus S^d; for the first Fitting ideal this means J_A has no common zero on S^d.";
const TEXT_I: &str = "unique measure of maximal entropy iff the entropy is finite and \
completely positive; needs the same data as (f).";

fn informational(clause: &'static str, property: &'static str, text: &str) -> ClauseEntry {
    ClauseEntry {
        clause,
        property,
        status: None,
        label: None,
        text: text.into(),
    }
}

fn verdict_clause(
    clause: &'static str,
    property: &'static str,
    v: Option<&VerdictBlock>,
    text: &str,
) -> ClauseEntry {
    match v {
        Some(v) => {
            let status = match (&v.witness, v.bound) {
                (Some(w), _) => format!("{} (witness {w})", v.verdict),
                (None, Some(b)) => format!("{} (bound {b})", v.verdict),
                _ => v.verdict.clone(),
            };
            ClauseEntry {
                clause,
                property,
                status: Some(status),
                label: Some(v.label),
                text: text.into(),
            }
        }
        None => ClauseEntry {
            clause,
            property,
            status: Some("not applicable (non-square presentation)".into()),
            label: Some(Provenance::Undecided),
            text: format!("{text} Associated primes of a non-square presentation are not enumerated; see notes."),
        },
    }
}

/// Runs the whole pipeline: validate, minors, gcd, entropy, expansiveness,
/// then periodic points, mixing and ergodicity for square matrices.
pub fn build_report(
    problem: &ProblemFile,
    cfg: &ReportConfig,
    candidate: Option<&str>,
) -> Result<DynamicsReport, ReportError> {
    cfg.validate()?;
    let a = PresentationMatrix::new(problem.presentation().clone());
    let validation = ValidationBlock::of(&a);
    let j = ideal_of(&a);
    let ideal = IdealBlock::of(&j);

    let (entropy, expansiveness, clause_e) = if validation.ok {
        let h = entropy_of(&j, cfg);
        let verdict = positive_entropy_verdict(&j, &h, cfg);
        let ex = expansive_minors(&j.generators, cfg.grid_budget);
        (
            EntropyBlock::of(&h),
            ExpansiveBlock::of(&ex),
            positive_entropy_clause(&verdict, &h),
        )
    } else {
        (
            EntropyBlock::free_submodule(),
            ExpansiveBlock::free_submodule(a.dim()),
            ClauseEntry {
                clause: "(e)",
                property: "positive entropy",
                status: Some("infinite entropy".into()),
                label: Some(Provenance::Exact),
                text: "M_A contains a free submodule, so h = ∞.".into(),
            },
        )
    };

    let square = if a.is_square() && validation.ok {
        let periods: Vec<u64> = (1..=cfg.max_period).collect();
        Some(SquareBlock {
            periodic: periodic_block(&a, cfg, &periods, problem.lattice())?,
            mixing: VerdictBlock::of(&mixing_check(&a, cfg.search_bound)?),
            ergodic: VerdictBlock::of(&ergodic_check(&a, cfg.search_bound)?),
        })
    } else {
        None
    };

    let fitting = match problem.resolution() {
        Some(maps) => Some(fitting_block(maps, candidate)?),
        None => None,
    };

    let clause_h = ClauseEntry {
        clause: "(h)",
        property: "expansive",
        status: Some(expansiveness.verdict.clone()),
        label: Some(expansiveness.label),
        text: TEXT_H.into(),
    };
    let clauses = vec![
        ClauseEntry {
            clause: "(a)",
            property: "descending chain condition",
            status: Some("Holds".into()),
            label: Some(Provenance::Exact),
            text: format!("{TEXT_A} M_A is finitely presented over the Noetherian ring R."),
        },
        verdict_clause("(b)", "ergodic", square.as_ref().map(|s| &s.ergodic), TEXT_B),
        verdict_clause("(c)", "mixing", square.as_ref().map(|s| &s.mixing), TEXT_C),
        informational("(d)", "mixing of all orders", TEXT_D),
        ClauseEntry {
            text: format!("{TEXT_E} {}", clause_e.text),
            ..clause_e
        },
        informational("(f)", "completely positive entropy", TEXT_F),
        informational("(g)", "Bernoulli", TEXT_G),
        clause_h,
        informational("(i)", "unique measure of maximal entropy", TEXT_I),
    ];

    Ok(DynamicsReport {
        schema: SCHEMA_VERSION,
        name: problem.name.clone(),
        kind: problem.kind_name().into(),
        d: a.dim(),
        k: a.k(),
        n: a.n(),
        config: cfg.clone(),
        validation,
        ideal,
        entropy,
        expansiveness,
        square,
        fitting,
        clauses,
        notes: problem.expected_notes.clone(),
    })
}

// ---------------------------------------------------------------------------
// Text rendering

impl fmt::Display for IdealBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "determinantal ideal J_A [{}]", self.label)?;
        for g in &self.generators {
            writeln!(f, "  minor  {g}")?;
        }
        writeln!(f, "  gcd    {}", self.gcd)?;
        writeln!(f, "  content {}", self.content)
    }
}

impl fmt::Display for EntropyBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "entropy h = {} [{}] via {}",
            fmt_real(self.value),
            self.label,
            self.method
        )?;
        if self.error > 0.0 {
            write!(f, ", error {:.2e}", self.error)?;
        }
        if let Some(n) = self.grid {
            write!(f, ", grid {n}")?;
        }
        if self.budget_exhausted {
            write!(f, ", budget exhausted before tolerance")?;
        }
        writeln!(f)
    }
}

impl fmt::Display for ExpansiveBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expansiveness: {} [{}]", self.verdict, self.label)?;
        if let Some(c) = &self.certificate {
            write!(f, " via {c}")?;
        }
        if let Some(n) = self.grid {
            write!(f, ", grid {n}")?;
        }
        if let Some(m) = self.margin {
            write!(f, ", margin {m:.3e}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, ", zero at angles ({})", w.join(", "))?;
        }
        if let Some(s) = &self.witness_source {
            write!(f, " from {s}")?;
        }
        if let Some(r) = self.residual {
            write!(f, ", residual {r:.2e}")?;
        }
        if let Some(b) = self.budget_used {
            write!(f, ", {b} evaluations")?;
        }
        writeln!(f)
    }
}

impl fmt::Display for PeriodicBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "det A = {}", self.det)?;
        writeln!(f, "periodic points |Fix_nZ^d| [{}]", self.fix_label)?;
        for e in &self.fix_counts {
            writeln!(f, "  n = {:>3}  {}", e.n, e.count)?;
        }
        if let Some(q) = &self.lattice_query {
            writeln!(
                f,
                "  lattice {} (index {})  {} [{}]",
                q.lattice, q.index, q.count, q.label
            )?;
        }
        if !self.growth.is_empty() {
            writeln!(f, "growth n^-d log|Fix| [{}]", self.growth_label)?;
            for g in &self.growth {
                writeln!(f, "  n = {:>3}  {}", g.n, fmt_real(g.value))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for VerdictBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.verdict)?;
        if let Some(w) = &self.witness {
            write!(f, " (witness {w})")?;
        }
        if let Some(b) = self.bound {
            write!(f, " (bound {b})")?;
        }
        write!(f, " [{}]", self.label)
    }
}

impl fmt::Display for FittingBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        writeln!(f, "resolution ranks [{}]", ranks.join(", "))?;
        if let Some(m) = &self.message {
            writeln!(f, "  invalid: {m}")?;
        }
        for l in &self.levels {
            writeln!(f, "  J(φ{}) rank {} [{}]", l.level, l.rank, l.label)?;
            for g in &l.generators {
                writeln!(f, "    minor  {g}")?;
            }
            writeln!(f, "    gcd    {}  content {}", l.gcd, l.content)?;
            if let Some(c) = &l.candidate {
                writeln!(f, "    candidate {}: {} [{}]", c.candidate, c.verdict, c.label)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for DynamicsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let title = self.name.as_deref().unwrap_or("(unnamed)");
        let _ = writeln!(
            out,
            "{title}: {} over Z[u^±1] with d = {}, {}x{} matrix",
            self.kind, self.d, self.k, self.n
        );
        if let Some(m) = &self.validation.message {
            let _ = writeln!(out, "validation: {m}");
        } else {
            let _ = writeln!(out, "validation: rank {} = k", self.validation.rank);
        }
        let _ = write!(out, "{}", self.ideal);
        let _ = write!(out, "{}", self.entropy);
        let _ = write!(out, "{}", self.expansiveness);
        if let Some(s) = &self.square {
            let _ = write!(out, "{}", s.periodic);
            let _ = writeln!(out, "mixing: {}", s.mixing);
            let _ = writeln!(out, "ergodic: {}", s.ergodic);
        }
        if let Some(fit) = &self.fitting {
            let _ = write!(out, "{fit}");
        }
        let _ = writeln!(out, "dynamical properties:");
        for c in &self.clauses {
            match (&c.status, c.label) {
                (Some(s), Some(l)) => {
                    let _ = writeln!(out, "  {} {}: {s} [{l}]", c.clause, c.property);
                }
                _ => {
                    let _ = writeln!(out, "  {} {}: informational", c.clause, c.property);
                }
            }
            let _ = writeln!(out, "      {}", c.text);
        }
        if !self.notes.is_empty() {
            let _ = writeln!(out, "notes:");
            for n in &self.notes {
                let _ = writeln!(out, "  - {n}");
            }
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyio::parse_problem;

    fn problem(json: &str) -> ProblemFile {
        parse_problem(json).unwrap()
    }

    #[test]
    fn defaults_are_valid() {
        let cfg = ReportConfig::default();
        cfg.validate().unwrap();
        let bad = ReportConfig {
            precision: 32,
            ..ReportConfig::default()
        };
        assert_eq!(bad.validate(), Err(ConfigError::Precision(32)));
    }

    #[test]
    fn free_submodule_report() {
        let p = problem(r#"{"d": 1, "kind": "presentation", "matrix": [["0"]]}"#);
        let r = build_report(&p, &ReportConfig::default(), None).unwrap();
        assert_eq!(r.outcome(), Outcome::FreeSubmodule);
        assert!(r.entropy.value.is_infinite());
        assert!(r.to_json().contains("\"inf\""));
    }

    #[test]
    fn bounded_search_is_never_exact() {
        let p = problem(r#"{"d": 1, "kind": "presentation", "matrix": [["u1^2-4*u1-1"]]}"#);
        let r = build_report(&p, &ReportConfig::default(), None).unwrap();
        let sq = r.square.as_ref().unwrap();
        assert_eq!(sq.mixing.verdict, "VerifiedUpTo");
        assert_eq!(sq.mixing.label, Provenance::BoundedSearch);
        assert_eq!(r.entropy.label, Provenance::CertifiedNumeric);
        assert_eq!(r.outcome(), Outcome::Ok);
        assert_eq!(r.clauses.len(), 9);
    }
}
