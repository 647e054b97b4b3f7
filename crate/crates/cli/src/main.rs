mod data;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use starstat_core::efficiency::{self, RivalTest};
use starstat_core::montecarlo::{self, DecisionRule, Scenario, SimConfig, SimReport, SimTest, CALIBRATION_REPS, TABLE_REPS};
use starstat_core::{exact_null, testing, Error, Family, FamilyKind, Method, Sample};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "starstat", version, about = "Tests of the star (more IFRA) order")]
struct Cli {
    /// Decimal places for printed reals.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test H0: F is star-equivalent to a known reference against "F more IFRA".
    OneSample {
        /// Data file: numbers separated by commas or whitespace; '#' starts a comment line.
        #[arg(long)]
        data: PathBuf,
        /// Reference distribution, e.g. exp:1, weibull:2, gamma:3,1.
        #[arg(long = "ref", default_value = "exp:1")]
        reference: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Aligned text instead of JSON.
        #[arg(long)]
        pretty: bool,
    },
    /// Test H0: F and G are star-equivalent against "F more IFRA than G".
    TwoSample {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        pretty: bool,
    },
    /// Exact critical values of sqrt(12n)(delta_hat - 3/2) under exponentiality.
    CriticalTable {
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1])]
        alphas: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Monte Carlo size and power studies.
    #[command(subcommand)]
    Simulate(SimCommand),
    /// Pitman efficiency of the delta test and its relative efficiency against rivals.
    Pae {
        /// weibull, lfr, makeham or all.
        #[arg(long, default_value = "all")]
        family: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum SimCommand {
    /// Size under the unit exponential null.
    Size {
        #[command(flatten)]
        common: SimArgs,
    },
    /// One-sample power against weibull, lfr or makeham alternatives.
    Power {
        #[arg(long)]
        family: String,
        #[command(flatten)]
        common: SimArgs,
    },
    /// Two-sample power for gamma, weibull or beta pairs.
    Power2 {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// Second sample sizes (defaults to --n).
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[command(flatten)]
        common: SimArgs,
    },
}

#[derive(Args)]
struct SimArgs {
    /// Tests, comma separated: delta, deshpande, kochar, link, ahmad, el_bassiouny, ik, ik_offdiag.
    #[arg(long, value_delimiter = ',', default_value = "delta")]
    test: Vec<String>,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05])]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = TABLE_REPS)]
    reps: u64,
    /// Master seed; required so that every run is reproducible.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = RuleArg::Auto)]
    rule: RuleArg,
    #[arg(long, default_value_t = CALIBRATION_REPS)]
    calibration_reps: u64,
    /// Seed for calibration runs (defaults to --seed).
    #[arg(long)]
    calibration_seed: Option<u64>,
    /// Worker threads (defaults to all cores); output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Exact,
    Asymptotic,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RuleArg {
    /// asymptotic for size runs; exact (delta) or mc (others) for power runs.
    Auto,
    Asymptotic,
    Exact,
    Mc,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ExactRequiresExponential(_) => 3,
            Error::DegenerateVariance => 4,
            Error::Quadrature { .. } => 1,
            Error::InvalidSample { .. } | Error::InvalidParameter { .. } | Error::Parse { .. } => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<data::DataError> for Failure {
    fn from(e: data::DataError) -> Self {
        Failure::usage(e.to_string())
    }
}

fn load(path: &Path, label: &str) -> Result<Sample, Failure> {
    let values = data::read_values(path)?;
    Sample::new(values).map_err(|e| e.with_label(label).into())
}

fn print_report(report: serde_json::Result<serde_json::Value>, pretty: bool, precision: usize) {
    let value = output::round_json(report.expect("serializable report"), precision);
    if pretty {
        print!("{}", output::key_value_text(&value, precision));
    } else {
        println!("{value}");
    }
}

fn print_rows(header: &[&str], rows: &[Vec<String>], format: Format) {
    match format {
        Format::Csv => print!("{}", output::csv_string(header, rows)),
        Format::Text => print!("{}", output::aligned_table(header, rows)),
    }
}

fn one_sample(
    data: &Path,
    reference: &str,
    alpha: f64,
    method: MethodArg,
    pretty: bool,
    precision: usize,
) -> Result<(), Failure> {
    let sample = load(data, "data")?;
    let family: Family = reference.parse()?;
    let moments = testing::reference_moments(&family)?;
    let method = match method {
        MethodArg::Auto => Method::Auto,
        MethodArg::Exact => Method::Exact,
        MethodArg::Asymptotic => Method::Asymptotic,
    };
    let report = testing::one_sample_test(&sample, &moments, alpha, method)?;
    print_report(serde_json::to_value(&report), pretty, precision);
    Ok(())
}

fn two_sample(x: &Path, y: &Path, alpha: f64, pretty: bool, precision: usize) -> Result<(), Failure> {
    let (x, y) = (load(x, "x")?, load(y, "y")?);
    let report = testing::two_sample_test(&x, &y, alpha)?;
    print_report(serde_json::to_value(&report), pretty, precision);
    Ok(())
}

fn critical_table(n_max: usize, alphas: &[f64], format: Format, precision: usize) -> Result<(), Failure> {
    let table = exact_null::critical_table(n_max, alphas)?;
    match format {
        Format::Csv => print!("{}", table.to_csv(precision)),
        Format::Text => print!("{}", table.to_text(precision)),
    }
    Ok(())
}

fn resolve_rule(rule: RuleArg, test: &SimTest, size_run: bool, two_sample: bool, args: &SimArgs, seed: u64) -> DecisionRule {
    let mc = DecisionRule::McCalibrated {
        reps: args.calibration_reps,
        seed: args.calibration_seed.unwrap_or(seed),
    };
    match rule {
        RuleArg::Asymptotic => DecisionRule::Asymptotic,
        RuleArg::Exact => DecisionRule::Exact,
        RuleArg::Mc => mc,
        RuleArg::Auto => match test {
            SimTest::Ik(_) => mc,
            _ if size_run || two_sample => DecisionRule::Asymptotic,
            t if *t == SimTest::DELTA => DecisionRule::Exact,
            _ => mc,
        },
    }
}

fn simulate(cmd: &SimCommand, precision: usize) -> Result<(), Failure> {
    let (args, scenario, ms): (&SimArgs, Scenario, &[usize]) = match cmd {
        SimCommand::Size { common } => (common, Scenario::exponential_null(), &[]),
        SimCommand::Power { family, common } => (common, Scenario::OneSample { family: family.parse()? }, &[]),
        SimCommand::Power2 { f, g, m, common } => (
            common,
            Scenario::TwoSample {
                f: f.parse()?,
                g: g.parse()?,
            },
            m.as_slice(),
        ),
    };
    let seed = args.seed.ok_or_else(|| {
        Failure::usage("--seed is required: simulations never pick a seed silently (try --seed 1)")
    })?;
    let two_sample = matches!(scenario, Scenario::TwoSample { .. });
    if two_sample && !ms.is_empty() && ms.len() != args.n.len() {
        return Err(Failure::usage("--m must list as many sizes as --n"));
    }
    let tests: Vec<SimTest> = args.test.iter().map(|t| t.parse()).collect::<Result<_, _>>()?;

    let mut configs = Vec::new();
    for test in &tests {
        for (i, &n) in args.n.iter().enumerate() {
            for &alpha in &args.alpha {
                let m = two_sample.then(|| ms.get(i).copied().unwrap_or(n));
                configs.push(SimConfig {
                    test: *test,
                    scenario,
                    n,
                    m,
                    alpha,
                    reps: args.reps,
                    seed,
                    rule: resolve_rule(args.rule, test, matches!(cmd, SimCommand::Size { .. }), two_sample, args, seed),
                });
            }
        }
    }
    let run = |c: &SimConfig| match cmd {
        SimCommand::Size { .. } => montecarlo::simulate_size(c),
        SimCommand::Power { .. } => montecarlo::simulate_power(c),
        SimCommand::Power2 { .. } => montecarlo::simulate_power_two_sample(c),
    };
    let reports: Vec<SimReport> = montecarlo::with_threads(args.threads, || {
        configs.iter().map(run).collect::<Result<Vec<_>, _>>()
    })??;
    let rows: Vec<Vec<String>> = reports.iter().map(|r| r.csv_record(precision)).collect();
    print_rows(&SimReport::CSV_HEADER, &rows, args.format);
    Ok(())
}

fn pae(family: &str, format: Format, precision: usize) -> Result<(), Failure> {
    let kinds = match family.trim().to_ascii_lowercase().as_str() {
        "all" => vec![FamilyKind::Weibull, FamilyKind::Lfr, FamilyKind::Makeham],
        other => {
            let kind: FamilyKind = other.parse()?;
            efficiency::null_parameter(kind)?;
            vec![kind]
        }
    };
    let mut header = vec!["family", "theta0", "derivative", "pae_delta"];
    for t in RivalTest::ALL {
        header.push(match t {
            RivalTest::Deshpande => "pare_J_0.9",
            RivalTest::Kochar => "pare_T_n",
            RivalTest::Link => "pare_Gamma",
            RivalTest::Ahmad => "pare_Delta_F",
        });
    }
    let mut rows = Vec::new();
    for kind in kinds {
        let r = efficiency::pae_delta(kind)?;
        let mut row = vec![
            kind.name().to_string(),
            format!("{}", r.theta0),
            format!("{:.*}", precision, r.derivative),
            format!("{:.*}", precision, r.pae),
        ];
        for e in efficiency::pare_row(kind, r.pae)? {
            row.push(format!("{:.*}", precision, e.pare));
        }
        rows.push(row);
    }
    print_rows(&header, &rows, format);
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let p = cli.precision;
    match &cli.command {
        Command::OneSample {
            data,
            reference,
            alpha,
            method,
            pretty,
        } => one_sample(data, reference, *alpha, *method, *pretty, p),
        Command::TwoSample { x, y, alpha, pretty } => two_sample(x, y, *alpha, *pretty, p),
        Command::CriticalTable { n_max, alphas, format } => critical_table(*n_max, alphas, *format, p),
        Command::Simulate(cmd) => simulate(cmd, p),
        Command::Pae { family, format } => pae(family, *format, p),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
