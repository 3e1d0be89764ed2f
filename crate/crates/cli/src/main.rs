use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use obsaudit::checks::{run_criterion, Scale, ALL_CRITERIA};
use obsaudit::experiment::{run_experiment, write_report, write_report_to, ExperimentConfig, ReportFormat};
use obsaudit::proxy::{fit_logistic, LogisticConfig};
use obsaudit::seeding::{stream, Purpose};
use obsaudit::synthdata::{sample_mixture, LabeledDataset, DEFAULT_DIM};
use obsaudit::{empirical_epsilon, AuditOutcome, TradeoffFamily};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SATURATED: u8 = 3;

#[derive(Parser)]
#[command(name = "obsaudit", version, about = "Observational one-run auditing of label differential privacy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Gaussian-mixture dataset and write it as CSV.
    Synth(SynthArgs),
    /// Fit a logistic-regression proxy and save it.
    TrainProxy(TrainArgs),
    /// Run repeated randomized-response audits and write a report.
    AuditRr(Box<AuditArgs>),
    /// Empirical epsilon of a single game tally.
    Epsilon(EpsilonArgs),
    /// Run the acceptance criteria.
    Check(CheckArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Feature dimension; must be at least k.
    #[arg(long, default_value_t = DEFAULT_DIM)]
    d: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training data written by `synth`; sampled fresh when absent.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_DIM)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "learning_rate", alias = "learning-rate", default_value_t = LogisticConfig::default().learning_rate)]
    learning_rate: f64,
    #[arg(long, default_value_t = LogisticConfig::default().iterations)]
    iterations: usize,
    #[arg(long, default_value_t = LogisticConfig::default().l2)]
    l2: f64,
    #[arg(long, short)]
    out: PathBuf,
}

/// Every experiment config key is also a flag; values use the config-file
/// syntax (lists comma separated).
#[derive(Args)]
struct AuditArgs {
    /// Base seed for every random stream.
    #[arg(long, alias = "base_seed", alias = "base-seed")]
    seed: String,
    /// Flat `key = value` config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Start from the small preset (n = 1e5, 20 repetitions).
    #[arg(long)]
    smoke: bool,
    /// Exit with status 3 when any repetition saturates the family range.
    #[arg(long)]
    strict: bool,
    /// Report destination; CSV on stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// csv or json; inferred from the output extension by default.
    #[arg(long)]
    format: Option<String>,

    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long = "eps_list", alias = "eps-list")]
    eps_list: Option<String>,
    #[arg(long = "proxy_kind", alias = "proxy-kind")]
    proxy_kind: Option<String>,
    #[arg(long = "tau_audit", alias = "tau-audit")]
    tau_audit: Option<String>,
    #[arg(long = "guess_fractions", alias = "guess-fractions")]
    guess_fractions: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long = "posterior_prior", alias = "posterior-prior")]
    posterior_prior: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    repetitions: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    sweep: Option<String>,
    #[arg(long = "resample_all", alias = "resample-all", num_args = 0..=1, default_missing_value = "true")]
    resample_all: Option<String>,
    #[arg(long = "learning_rate", alias = "learning-rate")]
    learning_rate: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    l2: Option<String>,
    #[arg(long = "mu_min", alias = "mu-min")]
    mu_min: Option<String>,
    #[arg(long = "mu_max", alias = "mu-max")]
    mu_max: Option<String>,
    #[arg(long = "mu_tolerance", alias = "mu-tolerance")]
    mu_tolerance: Option<String>,
}

impl AuditArgs {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let pairs = [
            ("n", &self.n),
            ("k", &self.k),
            ("d", &self.d),
            ("eps_list", &self.eps_list),
            ("proxy_kind", &self.proxy_kind),
            ("tau_audit", &self.tau_audit),
            ("guess_fractions", &self.guess_fractions),
            ("t", &self.t),
            ("posterior_prior", &self.posterior_prior),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("repetitions", &self.repetitions),
            ("sweep", &self.sweep),
            ("resample_all", &self.resample_all),
            ("learning_rate", &self.learning_rate),
            ("iterations", &self.iterations),
            ("l2", &self.l2),
            ("mu_min", &self.mu_min),
            ("mu_max", &self.mu_max),
            ("mu_tolerance", &self.mu_tolerance),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }

    fn config(&self) -> obsaudit::Result<ExperimentConfig> {
        let mut cfg = if self.smoke {
            ExperimentConfig::smoke()
        } else {
            ExperimentConfig::default()
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| obsaudit::Error::io(path, e))?;
            cfg.apply_text(&text)?;
        }
        for (key, value) in self.overrides() {
            cfg.set(key, value)?;
        }
        cfg.set("base_seed", &self.seed)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct EpsilonArgs {
    #[arg(long)]
    m: u64,
    #[arg(long = "c_prime", alias = "c-prime")]
    c_prime: u64,
    #[arg(long)]
    c: u64,
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
}

#[derive(Args)]
struct CheckArgs {
    /// Reference scale (n = 1e6, 100 to 200 repetitions) instead of smoke.
    #[arg(long)]
    full: bool,
    /// Comma-separated criterion numbers; all by default.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let mut rng = stream(args.seed, Purpose::Dataset, &[args.k as u64]);
    let data = sample_mixture(args.n, args.k, args.d, &mut rng)?;
    data.write_csv(&args.out)?;
    eprintln!("wrote {} samples (k = {}, d = {}) to {}", data.len(), data.k(), data.d(), args.out.display());
    Ok(())
}

fn train_proxy(args: TrainArgs) -> anyhow::Result<()> {
    let data = match &args.data {
        Some(path) => LabeledDataset::read_csv(path)?,
        None => sample_mixture(
            args.n,
            args.k,
            args.d,
            &mut stream(args.seed, Purpose::ProxyTraining, &[args.k as u64]),
        )?,
    };
    let cfg = LogisticConfig {
        learning_rate: args.learning_rate,
        iterations: args.iterations,
        l2: args.l2,
    };
    let (model, history) = fit_logistic(&data, &cfg)?;
    model.save(&args.out)?;
    let probs = obsaudit::ProxyModel::Logistic(model).predict_dataset(&data)?;
    let k = data.k();
    let correct = probs
        .chunks_exact(k)
        .zip(data.labels())
        .filter(|(p, &y)| p.iter().enumerate().all(|(c, &v)| c == y || v <= p[y]))
        .count();
    eprintln!(
        "trained on {} samples: final loss {:.5}, training accuracy {:.4}; saved to {}",
        data.len(),
        history.last().copied().unwrap_or(f64::NAN),
        correct as f64 / data.len() as f64,
        args.out.display()
    );
    Ok(())
}

fn audit_rr(args: AuditArgs) -> anyhow::Result<ExitCode> {
    let cfg = match args.config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return Ok(ExitCode::from(EXIT_CONFIG));
        }
    };
    let format = match (&args.format, &args.out) {
        (Some(f), _) => match f.parse::<ReportFormat>() {
            Ok(f) => f,
            Err(e) => {
                eprintln!("config error: {e}");
                return Ok(ExitCode::from(EXIT_CONFIG));
            }
        },
        (None, Some(path)) => ReportFormat::from_path(path),
        (None, None) => ReportFormat::Csv,
    };
    let report = run_experiment(&cfg)?;
    match &args.out {
        Some(path) => write_report(&report, path, format)?,
        None => write_report_to(&report, io::stdout().lock(), format).context("writing report to stdout")?,
    }

    let mut err = io::stderr().lock();
    writeln!(err, "k\teps\tfraction\tmean\tstd\taccuracy\tsaturated")?;
    for s in &report.summaries {
        let fraction = s.guess_fraction.map_or("sweep".to_string(), |f| f.to_string());
        let acc = s.mean_accuracy.map_or("-".to_string(), |a| format!("{a:.4}"));
        writeln!(
            err,
            "{}\t{}\t{fraction}\t{:.4}\t{:.4}\t{acc}\t{}",
            s.k, s.theoretical_eps, s.mean_emp_eps, s.std_emp_eps, s.saturated_repetitions
        )?;
    }
    if report.any_saturated() {
        writeln!(err, "warning: some repetitions rejected every mu up to mu_max; raise mu_max")?;
        if args.strict {
            return Ok(ExitCode::from(EXIT_SATURATED));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn epsilon(args: EpsilonArgs) -> anyhow::Result<()> {
    let outcome = AuditOutcome::new(args.m, args.c_prime, args.c)?;
    let e = empirical_epsilon(&outcome, args.gamma, args.delta, args.tau, &TradeoffFamily::default())?;
    println!("epsilon\t{}", e.epsilon);
    println!("mu\t{}", e.mu);
    println!("saturated\t{}", e.saturated);
    Ok(())
}

fn check(args: CheckArgs) -> anyhow::Result<ExitCode> {
    let scale = if args.full { Scale::Full } else { Scale::Smoke };
    let ids = if args.only.is_empty() {
        ALL_CRITERIA.to_vec()
    } else {
        args.only
    };
    if let Some(bad) = ids.iter().find(|id| !ALL_CRITERIA.contains(id)) {
        bail!("no criterion {bad}; expected 1 to 7");
    }
    if scale == Scale::Smoke && ids.iter().any(|id| *id <= 5) {
        println!("note: smoke scale; Monte-Carlo criteria 1 to 5 use reference thresholds on small samples and are indicative only (use --full)");
    }
    let mut failed = 0;
    for id in ids {
        let result = run_criterion(id, scale, args.seed)?;
        failed += usize::from(!result.passed);
        println!("{result}");
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a).map(|_| ExitCode::SUCCESS),
        Command::TrainProxy(a) => train_proxy(a).map(|_| ExitCode::SUCCESS),
        Command::AuditRr(a) => audit_rr(*a),
        Command::Epsilon(a) => epsilon(a).map(|_| ExitCode::SUCCESS),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let is_config = e
                .downcast_ref::<obsaudit::Error>()
                .is_some_and(|e| matches!(e, obsaudit::Error::InvalidArgument(_) | obsaudit::Error::OutOfRange { .. } | obsaudit::Error::Parse { .. }));
            ExitCode::from(if is_config { EXIT_CONFIG } else { EXIT_FAILURE })
        }
    }
}
