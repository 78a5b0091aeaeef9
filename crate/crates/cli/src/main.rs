use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use vilenkin::counterexample::{build_counterexample, CounterexampleSpec, Phi, SelectionOptions};
use vilenkin::hardy::random_atom;
use vilenkin::verify::{
    check_kernel_l1_bounds, direct_divergence_report, fejer_comparison, lemma_constants, remark1_report,
    theorem1_depths, theorem1_ratio, theorem2_growth, transform_selftest, ExperimentReport, OutputFormat,
};
use vilenkin::{inverse_transform, DiscreteFunction, Error, Execution, GroupStructure};

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "vilenkin", version, about = "Numerical experiments on Vilenkin groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Generating sequence, e.g. 2,3,2. Cycled or cut to -L levels when -L is given.
    #[arg(long, value_delimiter = ',', conflicts_with = "walsh")]
    m: Option<Vec<usize>>,
    /// Depth of the truncation.
    #[arg(short = 'L', long = "depth")]
    depth: Option<usize>,
    /// Dyadic group of this depth; same as --m 2,...,2.
    #[arg(long)]
    walsh: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, env = "VILENKIN_OUT", default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Function {
    /// Seeded random p-atom supported on I_N.
    Atom,
    /// Seeded uniform noise.
    Random,
    /// The constant 1.
    Constant,
    /// First block of the dyadic counterexample construction.
    Counterexample,
}

#[derive(Args, Debug, Clone)]
struct FunctionArgs {
    #[arg(long, value_enum, default_value_t = Function::Atom)]
    function: Function,
    /// Support depth N of the atom.
    #[arg(long = "N", default_value_t = 2)]
    support: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fast transform against the definition, roundtrip and Parseval.
    Transform {
        #[command(flatten)]
        common: Common,
    },
    /// L1 norms of the Fejér and Riesz kernels with their running suprema.
    Kernels {
        #[command(flatten)]
        common: Common,
        /// Largest order; defaults to M_L.
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Empirical constants of the two kernel estimates on the complement of I_N.
    Lemmas {
        #[command(flatten)]
        common: Common,
        /// Depths N to compare.
        #[arg(long = "N", value_delimiter = ',', default_values_t = [3, 4])]
        depths: Vec<usize>,
        /// Orders run over M_N..=M_{N+span}.
        #[arg(long, default_value_t = 3)]
        span: usize,
    },
    /// Weighted strong Riesz sums over seeded random p-atoms.
    Theorem1 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Compare several depths; the generating sequence is cycled to each.
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
    },
    /// Fejér strong sums next to the Riesz sums for one function.
    Fejer2cc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.25)]
        p: f64,
        #[command(flatten)]
        function: FunctionArgs,
    },
    /// The dyadic counterexample: pointwise, weak-type and block growth checks.
    Theorem2 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.25)]
        p: f64,
        /// Weight: log, iterated-log, power, power:<q> or linear.
        #[arg(long, default_value = "log")]
        phi: String,
        /// Number of blocks.
        #[arg(long = "K", default_value_t = 2)]
        levels: usize,
    },
    /// Exploratory p = 1/2 Riesz sums, reported without a verdict.
    Remark1 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        function: FunctionArgs,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Transform { common }
            | Command::Kernels { common, .. }
            | Command::Lemmas { common, .. }
            | Command::Theorem1 { common, .. }
            | Command::Fejer2cc { common, .. }
            | Command::Theorem2 { common, .. }
            | Command::Remark1 { common, .. } => common,
        }
    }
}

fn group(common: &Common, default_depth: usize) -> Result<GroupStructure, Error> {
    let gs = match (&common.walsh, &common.m, common.depth) {
        (Some(l), _, Some(d)) if *l != d => {
            return Err(Error::Parameter(format!("--walsh {l} conflicts with -L {d}")));
        }
        (Some(l), _, _) => GroupStructure::walsh(*l)?,
        (None, Some(m), Some(d)) => GroupStructure::periodic(m, d)?,
        (None, Some(m), None) => GroupStructure::new(m)?,
        (None, None, d) => GroupStructure::walsh(d.unwrap_or(default_depth))?,
    };
    let exec = if common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    Ok(gs.with_execution(exec))
}

fn pattern(common: &Common) -> Vec<usize> {
    match &common.m {
        Some(m) if common.walsh.is_none() => m.clone(),
        _ => vec![2],
    }
}

fn test_function(gs: &GroupStructure, args: &FunctionArgs, p: f64, seed: u64) -> Result<(DiscreteFunction, String), Error> {
    Ok(match args.function {
        Function::Atom => (
            random_atom(gs, p, args.support, seed)?.samples,
            format!("atom-N{}", args.support),
        ),
        Function::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = DiscreteFunction::from_fn(gs, |_| rng.gen_range(-1.0..1.0).into());
            (f, "random".into())
        }
        Function::Constant => (DiscreteFunction::constant(gs, 1.0.into()), "constant".into()),
        Function::Counterexample => {
            if !gs.is_dyadic() {
                return Err(Error::UnsupportedGroup("the counterexample lives on the Walsh group".into()));
            }
            let p = p.min(0.49);
            let spec = CounterexampleSpec::from_alphas(Phi::log(), p, vec![2])?;
            let s = build_counterexample(gs, &spec)?;
            (inverse_transform(gs, &s)?, "counterexample".into())
        }
    })
}

fn run(command: &Command) -> Result<ExperimentReport, Error> {
    let common = command.common();
    match command {
        Command::Transform { .. } => transform_selftest(&group(common, 10)?, common.seed),
        Command::Kernels { nmax, .. } => {
            let gs = group(common, 10)?;
            check_kernel_l1_bounds(&gs, nmax.unwrap_or(gs.size()))
        }
        Command::Lemmas { depths, span, .. } => lemma_constants(&group(common, 8)?, depths, *span),
        Command::Theorem1 { p, trials, depths, .. } => match depths {
            Some(depths) => {
                if common.depth.is_some() || common.walsh.is_some() {
                    return Err(Error::Parameter("--depths replaces -L and --walsh".into()));
                }
                theorem1_depths(&pattern(common), depths, *p, *trials, common.seed)
            }
            None => theorem1_ratio(&group(common, 10)?, *p, *trials, common.seed),
        },
        Command::Fejer2cc { p, function, .. } => {
            let gs = group(common, 10)?;
            let (f, label) = test_function(&gs, function, *p, common.seed)?;
            fejer_comparison(&gs, &f, *p, &label)
        }
        Command::Theorem2 { p, phi, levels, .. } => {
            let phi = Phi::parse(phi)?;
            let opts = SelectionOptions::default();
            match CounterexampleSpec::new(phi.clone(), *p, *levels, &opts) {
                Err(Error::DirectDivergence(_)) => {
                    let depth = common.walsh.or(common.depth).unwrap_or(16);
                    Ok(direct_divergence_report(&phi, *p, 1usize << depth.min(40)))
                }
                Err(e) => Err(e),
                Ok(spec) => {
                    if common.m.as_ref().is_some_and(|m| m.iter().any(|&x| x != 2)) {
                        return Err(Error::UnsupportedGroup("the counterexample lives on the Walsh group".into()));
                    }
                    let gs = group(common, spec.required_depth())?;
                    theorem2_growth(&gs, &spec, &opts)
                }
            }
        }
        Command::Remark1 { function, .. } => {
            let gs = group(common, 10)?;
            let (f, label) = test_function(&gs, function, 0.5, common.seed)?;
            remark1_report(&gs, &f, &label)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } | Error::Resolution(_) => EXIT_CAPACITY,
        _ => EXIT_CONFIG,
    }
}

fn error_object(kind: &str, message: &str, code: u8) {
    let err = json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    eprintln!("{err}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            error_object("usage", e.to_string().trim_end(), EXIT_CONFIG);
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let common = cli.command.common().clone();
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            let code = exit_code(&e);
            error_object(e.kind(), &e.to_string(), code);
            return ExitCode::from(code);
        }
    };
    let format = match common.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
        Format::Both => OutputFormat::Both,
    };
    let files = match report.write(&common.out, format) {
        Ok(files) => files,
        Err(e) => {
            error_object(e.kind(), &e.to_string(), EXIT_CONFIG);
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let passed = report.passed();
    let summary = json!({
        "experiment": report.experiment,
        "passed": passed,
        "failed_records": report.failed_records().count(),
        "failed_checks": report.failed_checks().map(|c| c.name.clone()).collect::<Vec<_>>(),
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    println!("{summary}");
    if passed {
        ExitCode::SUCCESS
    } else {
        eprint!("{}", report.failure_summary());
        ExitCode::from(EXIT_FAILED)
    }
}
