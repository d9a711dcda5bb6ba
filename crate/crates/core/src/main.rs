use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use algdyn::expansive::expansive_minors;
use algdyn::mahler::ZeroEntropyVerdict;
use algdyn::polyio::{load_problem, parse_lattice_arg, ProblemFile, ProblemKind};
use algdyn::presentation::PresentationMatrix;
use algdyn::report::{
    self, build_report, fitting_block, ideal_of, periodic_block, positive_entropy_verdict,
    EntropyBlock, ExpansiveBlock, IdealBlock, Outcome, ReportConfig, ReportError,
    ValidationBlock, SCHEMA_VERSION,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;

#[derive(Parser)]
#[command(name = "algdyn", version, about = "Dynamical invariants of algebraic Z^d-actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: validation, minors, entropy, expansiveness, periodic points
    Report(Common),
    /// Entropy h = m(gcd J_A)
    Entropy(Common),
    /// Expansiveness of the action
    Expansive(Common),
    /// Periodic point counts (square presentations)
    Periodic {
        #[command(flatten)]
        common: Common,
        /// Single cubic lattice nZ^d instead of the table 1..=max-period
        #[arg(long)]
        n: Option<u64>,
    },
    /// Determinantal ideal J_A and its gcd
    Gcd(Common),
    /// Fitting ideals of a resolution file
    Fitting(Common),
}

#[derive(Args)]
struct Common {
    file: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Search bound for mixing, ergodicity and cyclotomic factors
    #[arg(long, default_value_t = 8)]
    bound: u32,
    #[arg(long = "max-period", default_value_t = 8)]
    max_period: u64,
    /// Evaluation budget for the sweep and quadrature
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Starting precision in bits for ball arithmetic
    #[arg(long, default_value_t = 256)]
    precision: u32,
    /// Lattice basis as rows, e.g. "2,1;0,3"; its columns generate the lattice
    #[arg(long)]
    lattice: Option<String>,
    /// Candidate prime: one polynomial, or comma-separated generators
    #[arg(long)]
    candidate: Option<String>,
    #[arg(long)]
    json: bool,
    /// Worker threads; falls back to ALGDYN_THREADS
    #[arg(long)]
    threads: Option<usize>,
    /// Accepted for interface stability; every step is deterministic
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn config(&self) -> ReportConfig {
        let threads = self.threads.or_else(|| {
            std::env::var("ALGDYN_THREADS")
                .ok()
                .and_then(|v| v.trim().parse().ok())
        });
        ReportConfig {
            tol: self.tol,
            grid_budget: self.budget,
            search_bound: self.bound,
            precision: self.precision,
            max_period: self.max_period,
            threads,
            json: self.json,
        }
    }
}

enum Failure {
    Parse(String),
    Other(String),
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Parse(_) | ReportError::Config(_) => Failure::Parse(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(p: &ProblemFile, cfg: &ReportConfig, body: T, text: String) {
    if cfg.json {
        let env = Envelope {
            schema: SCHEMA_VERSION,
            name: p.name.clone(),
            body,
        };
        println!("{}", report::to_json(&env));
    } else {
        print!("{text}");
    }
}

#[derive(Serialize)]
struct EntropyOut {
    validation: ValidationBlock,
    gcd: String,
    entropy: EntropyBlock,
    positive_entropy: String,
}

#[derive(Serialize)]
struct ExpansiveOut {
    validation: ValidationBlock,
    expansiveness: ExpansiveBlock,
}

#[derive(Serialize)]
struct GcdOut {
    validation: ValidationBlock,
    ideal: IdealBlock,
}

fn presentation(p: &ProblemFile) -> PresentationMatrix {
    PresentationMatrix::new(p.presentation().clone())
}

fn validation_outcome(v: &ValidationBlock) -> Outcome {
    if v.is_free_submodule() {
        eprintln!("free submodule; h = ∞");
        Outcome::FreeSubmodule
    } else {
        Outcome::Ok
    }
}

fn run(cmd: Command) -> Result<Outcome, Failure> {
    let (common, n) = match &cmd {
        Command::Periodic { common, n } => (common, *n),
        Command::Report(c)
        | Command::Entropy(c)
        | Command::Expansive(c)
        | Command::Gcd(c)
        | Command::Fitting(c) => (c, None),
    };
    let cfg = common.config();
    cfg.validate().map_err(|e| Failure::Parse(e.to_string()))?;
    if let Some(k) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    if let Some(seed) = common.seed {
        log::debug!("seed {seed} ignored: no randomized step");
    }
    let problem = load_problem(&common.file).map_err(|e| {
        if e.is_parse_error() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Other(e.to_string())
        }
    })?;
    let lattice = match &common.lattice {
        Some(text) => Some(
            parse_lattice_arg(text, problem.d).map_err(|e| Failure::Parse(e.to_string()))?,
        ),
        None => problem.lattice().cloned(),
    };

    match cmd {
        Command::Report(_) => {
            let mut problem = problem;
            if let (Some(l), ProblemKind::Presentation(m)) = (&lattice, &problem.kind) {
                problem.kind = ProblemKind::LatticeQuery {
                    matrix: m.clone(),
                    lattice: l.clone(),
                };
            }
            let r = build_report(&problem, &cfg, common.candidate.as_deref())?;
            if cfg.json {
                println!("{}", r.to_json());
            } else {
                print!("{r}");
            }
            if r.outcome() == Outcome::FreeSubmodule {
                eprintln!("free submodule; h = ∞");
            }
            Ok(r.outcome())
        }
        Command::Entropy(_) => {
            let a = presentation(&problem);
            let validation = ValidationBlock::of(&a);
            let j = ideal_of(&a);
            let (entropy, verdict, outcome) = if validation.ok {
                let h = report::entropy_of(&j, &cfg);
                let v = positive_entropy_verdict(&j, &h, &cfg);
                let outcome = match v {
                    ZeroEntropyVerdict::Undecided { .. } => Outcome::Undecided,
                    _ => Outcome::Ok,
                };
                (EntropyBlock::of(&h), verdict_name(&v), outcome)
            } else {
                (
                    EntropyBlock::free_submodule(),
                    "infinite entropy".to_string(),
                    validation_outcome(&validation),
                )
            };
            let text = format!("gcd(J_A) = {}\n{entropy}{verdict}\n", j.gcd);
            let gcd = j.gcd.to_string();
            emit(
                &problem,
                &cfg,
                EntropyOut {
                    validation,
                    gcd,
                    entropy,
                    positive_entropy: verdict,
                },
                text,
            );
            Ok(outcome)
        }
        Command::Expansive(_) => {
            let a = presentation(&problem);
            let validation = ValidationBlock::of(&a);
            let j = ideal_of(&a);
            let (block, outcome) = if validation.ok {
                let b = ExpansiveBlock::of(&expansive_minors(&j.generators, cfg.grid_budget));
                let o = if b.is_undecided() {
                    Outcome::Undecided
                } else {
                    Outcome::Ok
                };
                (b, o)
            } else {
                (
                    ExpansiveBlock::free_submodule(a.dim()),
                    validation_outcome(&validation),
                )
            };
            let text = format!("{block}");
            emit(
                &problem,
                &cfg,
                ExpansiveOut {
                    validation,
                    expansiveness: block,
                },
                text,
            );
            Ok(outcome)
        }
        Command::Periodic { .. } => {
            let a = presentation(&problem);
            if !a.is_square() {
                return Err(Failure::Other(format!(
                    "periodic points need a square presentation, got {}x{}",
                    a.k(),
                    a.n()
                )));
            }
            let periods: Vec<u64> = match (n, &lattice) {
                (Some(n), _) => vec![n],
                (None, Some(_)) => Vec::new(),
                (None, None) => (1..=cfg.max_period).collect(),
            };
            if periods.contains(&0) {
                return Err(Failure::Parse("--n must be positive".into()));
            }
            let block = periodic_block(&a, &cfg, &periods, lattice.as_ref())
                .map_err(|e| Failure::Other(e.to_string()))?;
            let text = format!("{block}");
            emit(&problem, &cfg, block, text);
            Ok(Outcome::Ok)
        }
        Command::Gcd(_) => {
            let a = presentation(&problem);
            let validation = ValidationBlock::of(&a);
            let ideal = IdealBlock::of(&ideal_of(&a));
            let outcome = validation_outcome(&validation);
            let text = format!("{ideal}");
            emit(&problem, &cfg, GcdOut { validation, ideal }, text);
            Ok(outcome)
        }
        Command::Fitting(_) => {
            let owned;
            let maps: &[algdyn::PolyMatrix] = match problem.resolution() {
                Some(m) => m,
                None => {
                    owned = [problem.presentation().clone()];
                    &owned
                }
            };
            let block = fitting_block(maps, common.candidate.as_deref())?;
            let text = format!("{block}");
            let valid = block.valid;
            emit(&problem, &cfg, block, text);
            if valid {
                Ok(Outcome::Ok)
            } else {
                Err(Failure::Other("resolution failed validation".into()))
            }
        }
    }
}

fn verdict_name(v: &ZeroEntropyVerdict) -> String {
    match v {
        ZeroEntropyVerdict::Yes { .. } => "zero entropy".into(),
        ZeroEntropyVerdict::No { .. } => "positive entropy".into(),
        ZeroEntropyVerdict::Undecided { .. } => "undecided".into(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
