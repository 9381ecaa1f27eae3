//! Command-line front end: state files in, JSON reports (or CSV plot data) out.

pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qfim_dim::basis::gellmann_basis;
use qfim_dim::bounds::{self, Component, OptimConfig, Sign, SpinTriple};
use qfim_dim::multipartite::{self, CheckOptions, DimVectorCandidate, Feasibility};
use qfim_dim::state_file::{self, StateData};
use qfim_dim::states::{self, Bipartition, DensityMatrix};
use qfim_dim::witnesses;

pub use report::{InputDescriptor, ReportDocument};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_UNDECIDED: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Undecided(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Undecided(_) => EXIT_UNDECIDED,
        }
    }
}

impl From<qfim_dim::Error> for CliError {
    fn from(e: qfim_dim::Error) -> Self {
        use qfim_dim::Error as E;
        let msg = e.to_string();
        match e {
            E::Format(_) | E::InvalidState(_) => CliError::Parse(msg),
            E::UnsupportedSize(_) => CliError::Undecided(msg),
            _ => CliError::Invalid(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qfim-dim", version, about = "Entanglement-dimensionality certification from quantum Fisher information")]
pub struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt-number criteria for a bipartite state.
    Witness(WitnessArgs),
    /// Maximal collective spin variances at bounded Schmidt rank.
    Bound(BoundArgs),
    /// Test a dimensionality vector against a multipartite state.
    Certify(CertifyArgs),
    /// Collective-QFI bound lines and maximally entangled points as CSV.
    Figure1(Figure1Args),
    /// Write a named example state to a state file.
    Example(ExampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    Gellmann,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    pub state_file: PathBuf,
    #[arg(long, value_enum, default_value = "gellmann")]
    pub basis: BasisChoice,
    /// Largest Schmidt-number hypothesis to test (default: the local dimension).
    #[arg(long)]
    pub max_r: Option<usize>,
    /// Pair the bases as given instead of aligning them with the cross block.
    #[arg(long)]
    pub no_align: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Components {
    Xy,
    Xyz,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Spin quantum number, e.g. `3/2` or `1.5`.
    #[arg(long, value_parser = parse_spin)]
    pub spin: f64,
    #[arg(long, value_enum, default_value = "xy")]
    pub components: Components,
    /// `+` or `-` for `j ⊗ 𝟙 ± 𝟙 ⊗ j`.
    #[arg(long, default_value = "+", value_parser = parse_sign, allow_hyphen_values = true)]
    pub sign: Sign,
    /// Largest Schmidt rank (default: 2j + 1).
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 4000)]
    pub max_iters: usize,
    #[arg(long, env = "QFIM_SEED")]
    pub seed: Option<u64>,
    /// Restrict to computational-basis Schmidt vectors.
    #[arg(long)]
    pub aligned: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    pub state_file: PathBuf,
    /// Class-grouped vector, classes separated by `;`, e.g. `2x6,1;4x8,2x12,1`.
    #[arg(long, conflicts_with = "pure_exact", required_unless_present = "pure_exact")]
    pub vector: Option<String>,
    /// Compute the exact vector of a pure state and its product structure.
    #[arg(long)]
    pub pure_exact: bool,
    /// Largest number of distinct orderings enumerated per class.
    #[arg(long, default_value_t = multipartite::PROFILE_CAP)]
    pub profile_cap: u128,
    /// Report classes above the cap as undecided instead of using the prefix-sum test.
    #[arg(long)]
    pub no_fallback: bool,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    pub d_list: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Mes,
    Bell,
    Ghz,
    RhoS,
    SevenQubit,
    Product,
    Haar,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(value_enum)]
    pub name: ExampleName,
    /// Local dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Schmidt rank of `mes` (default: d).
    #[arg(long)]
    pub r: Option<usize>,
    /// Number of particles for `ghz`, `product` and `haar`.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Mixing weights of `rho-s`.
    #[arg(long, value_delimiter = ',', default_value = "0.3333333333333333,0.3333333333333333,0.3333333333333334")]
    pub p: Vec<f64>,
    #[arg(long, env = "QFIM_SEED")]
    pub seed: Option<u64>,
}

pub fn parse_spin(s: &str) -> Result<f64, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("cannot parse spin '{s}'"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("cannot parse spin '{s}'"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            Ok(num / den)
        }
        None => s.parse().map_err(|_| format!("cannot parse spin '{s}'")),
    }
}

pub fn parse_sign(s: &str) -> Result<Sign, String> {
    match s.trim() {
        "+" | "plus" => Ok(Sign::Plus),
        "-" | "−" | "minus" => Ok(Sign::Minus),
        other => Err(format!("sign must be + or -, got '{other}'")),
    }
}

/// What a command produced; `text` is written verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Witness(a) => cmd_witness(a).map(report_outcome),
        Command::Bound(a) => cmd_bound(a).map(report_outcome),
        Command::Certify(a) => {
            let doc = cmd_certify(a)?;
            let undecided = doc.results["feasibility"] == json!(Feasibility::Undecided);
            Ok(Outcome { text: doc.to_json(), exit_code: if undecided { EXIT_UNDECIDED } else { EXIT_OK } })
        }
        Command::Figure1(a) => Ok(Outcome { text: cmd_figure1(&a.d_list)?, exit_code: EXIT_OK }),
        Command::Example(a) => Ok(Outcome { text: state_file::to_json(&cmd_example(a)?), exit_code: EXIT_OK }),
    }
}

fn report_outcome(doc: ReportDocument) -> Outcome {
    Outcome { text: doc.to_json(), exit_code: EXIT_OK }
}

/// Runs the command and writes its output; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    use std::io::Write;
                    let mut stdout = std::io::stdout().lock();
                    match writeln!(stdout, "{}", out.text.trim_end()) {
                        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("stdout: {e}")),
                        _ => Ok(()),
                    }
                }
            };
            match written {
                Ok(()) => out.exit_code,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    EXIT_PARSE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_state(path: &Path) -> CliResult<(StateData, InputDescriptor)> {
    let state = state_file::read_state_file(path)?;
    let input = InputDescriptor { path: path.display().to_string(), kind: state.kind().to_string(), dims: state.dims().to_vec() };
    Ok((state, input))
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn cmd_witness(args: &WitnessArgs) -> CliResult<ReportDocument> {
    let (state, input) = load_state(&args.state_file)?;
    let rho = state.to_density();
    let dims = rho.dims().to_vec();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(CliError::Invalid(format!("witness criteria need two parties of equal dimension, got {dims:?}")));
    }
    let d = dims[0];
    let max_r = args.max_r.unwrap_or(d);
    if !(1..=d).contains(&max_r) {
        return Err(CliError::Invalid(format!("--max-r must lie in 1..={d}, got {max_r}")));
    }
    let g = match args.basis {
        BasisChoice::Gellmann => gellmann_basis(d, false)?,
    };
    let (ga, gb) = if args.no_align { (g.clone(), g) } else { witnesses::optimize_local_bases(&rho, &g, &g)? };
    let rep = witnesses::full_report(&rho, &ga, &gb)?;
    let per_r: Vec<_> = rep.per_r.iter().filter(|c| c.r <= max_r).cloned().collect();
    let certified = 1 + per_r.iter().filter(|c| c.any_violated()).map(|c| c.r).max().unwrap_or(0);
    let h_value = rep.per_r.get(certified - 1).map(|c| c.h).unwrap_or(rep.h_value);
    let tangle = witnesses::two_tangle_lower_bound(&rho)?;
    let results = json!({
        "d": d,
        "tr_fa": rep.tr_fa,
        "tr_fb": rep.tr_fb,
        "tr_x": rep.tr_x,
        "tr_norm_x": rep.tr_norm_x,
        "h_value": h_value,
        "collective_sum": rep.obs2_sum,
        "per_r": to_value(&per_r),
        "certified_min_schmidt_number": certified,
        "two_tangle_lower_bound": to_value(&tangle),
    });
    let parameters = json!({ "basis": args.basis, "max_r": max_r, "aligned_bases": !args.no_align });
    Ok(ReportDocument::new("witness", Some(input), parameters, results, None))
}

pub fn cmd_bound(args: &BoundArgs) -> CliResult<ReportDocument> {
    let comps = match args.components {
        Components::Xy => vec![Component::X, Component::Y],
        Components::Xyz => vec![Component::X, Component::Y, Component::Z],
    };
    let triple = SpinTriple::new(args.spin, args.sign, comps)?;
    let d = triple.dim();
    if d < 2 {
        return Err(CliError::Invalid("spin 0 has no entanglement structure".into()));
    }
    let r_max = args.r.unwrap_or(d);
    if !(1..=d).contains(&r_max) {
        return Err(CliError::Invalid(format!("--r must lie in 1..={d}, got {r_max}")));
    }
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let cfg = OptimConfig {
        restarts: args.restarts,
        max_iters: args.max_iters,
        seed,
        aligned_only: args.aligned,
        ..OptimConfig::default()
    };
    let table = bounds::spin_bound_table(&triple, r_max, &cfg)?;
    let cut = Bipartition::new(2, &[0])?;
    let rows = table
        .iter()
        .map(|row| {
            let coefficients = states::schmidt_decompose(&row.argmax, &cut)?.coefficients;
            let mut entry = json!({
                "r": row.r,
                "variance_sum": row.variance_sum,
                "qfi_bound": row.qfi_bound,
                "converged": row.converged,
                "argmax_schmidt_coefficients": coefficients,
            });
            if args.components == Components::Xy {
                if row.r == 2 {
                    entry["analytic"] = json!(bounds::spin_bound_r2_analytic(args.spin)?);
                }
                if row.r == d {
                    entry["analytic_global"] = json!(bounds::global_spin_bound(args.spin)?);
                }
            }
            Ok(entry)
        })
        .collect::<qfim_dim::Result<Vec<_>>>()?;
    let parameters = json!({
        "spin": args.spin,
        "d": d,
        "components": args.components,
        "sign": args.sign,
        "r_max": r_max,
        "restarts": args.restarts,
        "max_iters": args.max_iters,
        "aligned": args.aligned,
    });
    let results = json!({
        "variance_ceiling": bounds::variance_ceiling(&triple.operators()),
        "table": rows,
    });
    Ok(ReportDocument::new("bound", None, parameters, results, Some(seed)))
}

pub fn cmd_certify(args: &CertifyArgs) -> CliResult<ReportDocument> {
    let (state, input) = load_state(&args.state_file)?;
    let rho: DensityMatrix = state.to_density();
    let n = rho.num_particles();
    if n > multipartite::MAX_PARTICLES {
        return Err(CliError::Undecided(format!("{n} particles exceed the cap {}", multipartite::MAX_PARTICLES)));
    }
    let opts = CheckOptions { profile_cap: args.profile_cap, exact_fallback: !args.no_fallback, ..CheckOptions::default() };
    let (candidate, structure) = if args.pure_exact {
        let psi = state
            .as_pure()
            .ok_or_else(|| CliError::Invalid("--pure-exact needs a pure state file".into()))?;
        let v = multipartite::pure_state_dim_vector(psi)?;
        let s = multipartite::structure_from_vector(&v)?;
        (v, Some(s))
    } else {
        let spec = args.vector.as_deref().expect("clap requires --vector without --pure-exact");
        let classes = multipartite::parse_vector_spec(spec).map_err(|e| CliError::Parse(e.to_string()))?;
        (DimVectorCandidate::new(rho.dims(), classes)?, None)
    };
    let verdict = multipartite::check_dim_vector(&rho, &candidate, &opts)?;
    let mut results = json!({
        "vector": candidate.compact(),
        "vector_by_class": to_value(&candidate.classes),
        "feasibility": verdict.feasibility,
        "classes": to_value(&verdict.classes),
        "violations": to_value(&verdict.violations),
        "cut_statistics": to_value(&verdict.cut_statistics),
    });
    if let Some(s) = structure {
        results["structure"] = json!({
            "partition": s.to_string(),
            "k_separability": s.k_separability,
            "depth": s.depth,
            "parties": s.parties,
        });
    }
    let parameters = json!({
        "vector": args.vector,
        "pure_exact": args.pure_exact,
        "profile_cap": args.profile_cap.to_string(),
        "exact_fallback": !args.no_fallback,
    });
    Ok(ReportDocument::new("certify", Some(input), parameters, results, None))
}

/// One CSV row per `(d, r)`: the collective bound and the maximally entangled value.
pub fn cmd_figure1(d_list: &[usize]) -> CliResult<String> {
    let mut out = String::from("d,r,bound,mes_sum\n");
    for &d in d_list {
        if d < 2 {
            return Err(CliError::Invalid(format!("dimensions must be at least 2, got {d}")));
        }
        let g = gellmann_basis(d, false)?;
        for r in 1..=d {
            let rho = states::mes_state(d, r)?.to_density();
            let (ga, gb) = witnesses::optimize_local_bases(&rho, &g, &g)?;
            let sum = witnesses::obs2_value(&rho, &ga, &gb)?.sum;
            out.push_str(&format!("{d},{r},{},{sum}\n", witnesses::collective_bound(d, r)));
        }
    }
    Ok(out)
}

pub fn cmd_example(args: &ExampleArgs) -> CliResult<StateData> {
    use rand::SeedableRng;
    Ok(match args.name {
        ExampleName::Mes => StateData::Pure(states::mes_state(args.d, args.r.unwrap_or(args.d))?),
        ExampleName::Bell => StateData::Pure(states::mes_state(2, 2)?),
        ExampleName::Ghz => StateData::Pure(states::ghz_state(args.n, args.d)?),
        ExampleName::RhoS => {
            let p: [f64; 3] = args
                .p
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Invalid(format!("--p needs three weights, got {}", args.p.len())))?;
            StateData::Mixed(states::rho_s(p)?)
        }
        ExampleName::SevenQubit => StateData::Pure(states::seven_qubit_state()),
        ExampleName::Product => StateData::Pure(states::product_zero_state(args.n, args.d)?),
        ExampleName::Haar => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed.unwrap_or(DEFAULT_SEED));
            StateData::Pure(qfim_dim::random::haar_state(&vec![args.d; args.n], &mut rng)?)
        }
    })
}
