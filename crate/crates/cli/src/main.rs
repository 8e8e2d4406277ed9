//! Command-line front door: instance IO, learners, audits, measure
//! construction, generators, and the verification suites.
//!
//! Exit codes: 0 success, 1 usage or schema error, 2 learner
//! non-convergence, 3 asserted bound violated.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fairboost_cli::report::{Assertion, RunReport};
use fairboost_cli::suites;
use fairboost_core::constructions::{
    build_maj_instance, build_showcase, random_instance, ClassSpec, LabelMode, MajConfig,
    ShowcaseConfig,
};
use fairboost_core::cube;
use fairboost_core::error::Error as CoreError;
use fairboost_core::fourier::{goldreich_levin, GlConfig};
use fairboost_core::hardcore::{ihcl_pipeline, PipelineOutcome, WeightFn};
use fairboost_core::hypothesis::HypothesisClass;
use fairboost_core::instance::FiniteInstance;
use fairboost_core::learners::{
    learn_calibrated_multiaccurate, learn_multiaccurate, learn_multicalibrated, LearnerConfig,
    LearnerTrace, StepRule,
};
use fairboost_core::metrics::{
    correlation, eae, ece, ma_error, mc_error, opt_correlation, predictor_correlation,
    weighted_ma_error,
};
use fairboost_core::postprocess::{best_postprocessing, threshold};
use fairboost_core::predictor::Predictor;
use fairboost_core::schema;

#[derive(Parser)]
#[command(name = "fairboost", version, about = "Exact multigroup-fairness auditors, learners, and hardcore-measure constructions on finite domains")]
struct Cli {
    /// RNG seed; falls back to the FAIRBOOST_SEED environment variable.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Inequality tolerance for asserted bounds.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Output path for the run report (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Trial count override for corpus suites.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Parallelism degree for independent trials.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Audit an instance file: accuracy, calibration, multiaccuracy (plain
    /// and weighted), multicalibration, best class correlation, and the best
    /// post-processing of the predictor.
    Audit(AuditArgs),
    /// Run a learner tier and assert its guarantee.
    Learn(LearnArgs),
    /// Run the optimal-density pipeline and emit the measure.
    Hardcore(HardcoreArgs),
    /// Run a verification suite (use `--suite list` to enumerate).
    Verify(VerifyArgs),
    /// Generate named instances and seeded random families.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Heavy Fourier coefficient search with query access.
    Gl(GlArgs),
}

#[derive(Args)]
struct AuditArgs {
    /// Instance file (JSON schema).
    #[arg(long)]
    instance: PathBuf,
    /// Predictor file overriding the one embedded in the instance.
    #[arg(long)]
    predictor: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tier {
    /// Multiaccuracy only.
    Ma,
    /// Calibrated multiaccuracy.
    Calma,
    /// Weighted (maximal-weight) calibrated multiaccuracy.
    Wma,
    /// Level-set-conditional multicalibration.
    Mc,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    tier: Tier,
    /// Target error.
    #[arg(long, default_value_t = 0.05)]
    tau: f64,
    /// Full learner configuration as JSON; overrides the individual flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid step override (default tau/4).
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    max_iters: Option<u64>,
    /// Fixed step multiplier; line search when omitted.
    #[arg(long)]
    kappa: Option<f64>,
    /// Where to write the learned predictor (JSON).
    #[arg(long)]
    out_predictor: Option<PathBuf>,
    /// Where to write the per-iteration trace (CSV).
    #[arg(long)]
    out_trace: Option<PathBuf>,
    /// Where to write the trace summary (JSON).
    #[arg(long)]
    out_trace_json: Option<PathBuf>,
}

#[derive(Args)]
struct HardcoreArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Hardness target used for the learner's multiaccuracy goal.
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    /// Where to write the measure (instance schema with a measure field).
    #[arg(long)]
    out_measure: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`, or `list`.
    #[arg(long)]
    suite: String,
}

#[derive(Subcommand)]
enum GenCommand {
    /// The anti-calibrated majority counterexample.
    Maj {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        i: u32,
        #[arg(long, default_value_t = 2)]
        j: u32,
    },
    /// The two-level density showcase.
    Showcase {
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        points_per_region: usize,
    },
    /// Seeded random instance families.
    Random {
        /// Class family: parities:N | dictators:N | juntas:K,N,SUBSETS | random:M
        #[arg(long)]
        class: String,
        /// Label mode: bayes | random | planted:INDEX,NOISE
        #[arg(long, default_value = "bayes")]
        labels: String,
        /// Domain size (derived from the class for cube families).
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Args)]
struct GlArgs {
    /// Cube dimension.
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0.3)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-4)]
    delta_fail: f64,
    /// Planted polynomial "mask:coef,mask:coef"; masks are subset bitmasks.
    #[arg(long)]
    poly: Option<String>,
    /// Instance file: queries answer from the embedded predictor by Bernoulli
    /// draws, or exactly from deterministic labels when no predictor exists.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Compute bucket weights exactly (n <= 12).
    #[arg(long, default_value_t = false)]
    exact: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.or_else(|| {
        std::env::var("FAIRBOOST_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    match dispatch(&cli, seed) {
        Ok(code) => code,
        Err(err) => {
            // learner non-convergence gets its own exit code
            if let Some(CoreError::IterationCapExceeded { trace }) =
                err.downcast_ref::<CoreError>()
            {
                eprintln!("error: {err}");
                eprintln!(
                    "trace: {} oracle calls, {} recalibrations",
                    trace.oracle_calls, trace.recalibrations
                );
                return ExitCode::from(2);
            }
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli, seed: Option<u64>) -> anyhow::Result<ExitCode> {
    let started = std::time::Instant::now();
    match &cli.command {
        Command::Audit(args) => {
            let mut report = cmd_audit(args, seed)?;
            report.wall_clock_ms = started.elapsed().as_secs_f64() * 1e3;
            emit(cli, &report)?;
            Ok(exit_for(&report))
        }
        Command::Learn(args) => {
            let (mut report, trace) = cmd_learn(args, seed, cli.tolerance)?;
            report.wall_clock_ms = started.elapsed().as_secs_f64() * 1e3;
            if let Some(path) = &args.out_trace {
                std::fs::write(path, trace.to_csv())?;
            }
            if let Some(path) = &args.out_trace_json {
                std::fs::write(path, serde_json::to_string_pretty(&trace)?)?;
            }
            emit(cli, &report)?;
            Ok(exit_for(&report))
        }
        Command::Hardcore(args) => {
            let mut report = cmd_hardcore(args, seed, cli.tolerance)?;
            report.wall_clock_ms = started.elapsed().as_secs_f64() * 1e3;
            emit(cli, &report)?;
            Ok(exit_for(&report))
        }
        Command::Verify(args) => {
            if args.suite == "list" {
                for name in suites::SUITES {
                    println!("{name}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let names: Vec<&str> = if args.suite == "all" {
                suites::SUITES.to_vec()
            } else {
                vec![args.suite.as_str()]
            };
            let mut all_ok = true;
            for name in names {
                let report = suites::run_suite(name, seed.unwrap_or(0), cli.trials, cli.jobs)?;
                all_ok &= report.all_passed();
                emit(cli, &report)?;
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Gen(what) => {
            let json = cmd_gen(what, seed)?;
            match &cli.out {
                Some(path) => std::fs::write(path, json)?,
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gl(args) => {
            let mut report = cmd_gl(args, seed)?;
            report.wall_clock_ms = started.elapsed().as_secs_f64() * 1e3;
            emit(cli, &report)?;
            Ok(exit_for(&report))
        }
    }
}

fn exit_for(report: &RunReport) -> ExitCode {
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn emit(cli: &Cli, report: &RunReport) -> anyhow::Result<()> {
    let body = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{body}")?;
        }
    }
    eprint!("{}", report.human_summary());
    Ok(())
}

fn load(path: &Path) -> anyhow::Result<schema::Loaded> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(schema::parse_instance(&text)?)
}

fn require_class(loaded: &schema::Loaded) -> anyhow::Result<&HypothesisClass> {
    loaded
        .class
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("instance file carries no hypothesis class"))
}

fn cmd_audit(args: &AuditArgs, seed: Option<u64>) -> anyhow::Result<RunReport> {
    let loaded = load(&args.instance)?;
    let p = match &args.predictor {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let pf: schema::PredictorFile = serde_json::from_str(&text)?;
            match pf.grid {
                Some(g) => Predictor::with_grid(pf.values, g)?,
                None => Predictor::new(pf.values)?,
            }
        }
        None => loaded
            .predictor
            .clone()
            .ok_or_else(|| anyhow::anyhow!("no predictor in the instance file or --predictor"))?,
    };
    let inst = &loaded.instance;
    let class = require_class(&loaded)?;

    let mut report = RunReport::new("audit", seed);
    let mut row = BTreeMap::new();
    row.insert("eae".into(), eae(inst, &p)?);
    row.insert("ece".into(), ece(inst, &p)?.value);
    row.insert("ma".into(), ma_error(inst, &p, class)?.value);
    if inst.is_deterministic() {
        row.insert(
            "weighted_ma".into(),
            weighted_ma_error(inst, &p, class, &WeightFn::WMax)?.value,
        );
    }
    row.insert("mc".into(), mc_error(inst, &p, class)?.value);
    row.insert("opt".into(), opt_correlation(inst, class)?.value);
    let (_, best_cor) = best_postprocessing(inst, &p)?;
    row.insert("best_post_cor".into(), best_cor);
    row.insert("cor_2p_minus_1".into(), predictor_correlation(inst, &p)?);
    report.push_trial(row);
    report.aggregate();
    Ok(report)
}

fn learner_config(args: &LearnArgs) -> anyhow::Result<LearnerConfig> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        let config: LearnerConfig = serde_json::from_str(&text)?;
        return Ok(config);
    }
    let mut config = LearnerConfig::new(args.tau)?;
    if let Some(g) = args.grid_step {
        config = config.with_grid_step(g)?;
    }
    if let Some(m) = args.max_iters {
        config = config.with_max_iters(m)?;
    }
    if let Some(k) = args.kappa {
        config = config.with_step_rule(StepRule::FixedKappa(k))?;
    }
    Ok(config)
}

fn cmd_learn(
    args: &LearnArgs,
    seed: Option<u64>,
    tolerance: f64,
) -> anyhow::Result<(RunReport, LearnerTrace)> {
    let loaded = load(&args.instance)?;
    let inst = &loaded.instance;
    let class = require_class(&loaded)?;
    let config = learner_config(args)?;
    let tau = args.tau;

    let (p, trace) = match args.tier {
        Tier::Ma => learn_multiaccurate(inst, class, &config)?,
        Tier::Calma => learn_calibrated_multiaccurate(inst, class, &config, None)?,
        Tier::Wma => learn_calibrated_multiaccurate(inst, class, &config, Some(&WeightFn::WMax))?,
        Tier::Mc => learn_multicalibrated(inst, class, &config)?,
    };

    let mut report = RunReport::new("learn", seed);
    let mut row = BTreeMap::new();
    row.insert("oracle_calls".into(), trace.oracle_calls as f64);
    row.insert("recalibrations".into(), trace.recalibrations as f64);
    row.insert("ece".into(), trace.final_reports.ece);
    if let Some(ma) = trace.final_reports.ma {
        row.insert("ma".into(), ma);
    }
    if let Some(wma) = trace.final_reports.weighted_ma {
        row.insert("weighted_ma".into(), wma);
    }
    report.oracle_calls_total = trace.oracle_calls;

    let opt = opt_correlation(inst, class)?.value;
    match args.tier {
        Tier::Ma => {
            let cor = predictor_correlation(inst, &p)?;
            row.insert("cor_2p_minus_1".into(), cor);
            report.assertions.push(Assertion::at_least(
                "cor(y, 2p-1) >= 2 Opt - 1 - 2 tau",
                cor,
                2.0 * opt - 1.0 - 2.0 * tau,
                tolerance,
            ));
        }
        Tier::Calma => {
            let cor = correlation(inst, &threshold(&p))?;
            row.insert("cor_sign".into(), cor);
            report.assertions.push(Assertion::at_least(
                "cor(y, sign(2p-1)) >= Opt - 4 tau",
                cor,
                opt - 4.0 * tau,
                tolerance,
            ));
        }
        Tier::Wma => {
            let wma = trace.final_reports.weighted_ma.unwrap_or(f64::NAN);
            report.assertions.push(Assertion::at_most(
                "weighted multiaccuracy error <= tau",
                wma,
                tau,
                1e-12,
            ));
            report.assertions.push(Assertion::at_most(
                "calibration error <= tau",
                trace.final_reports.ece,
                tau,
                1e-12,
            ));
        }
        Tier::Mc => {
            let mc = mc_error(inst, &p, class)?.value;
            row.insert("mc".into(), mc);
            report.assertions.push(Assertion::at_most(
                "multicalibration error <= tau",
                mc,
                tau,
                1e-12,
            ));
        }
    }
    report.push_trial(row);
    report.aggregate();

    if let Some(path) = &args.out_predictor {
        let pf = schema::PredictorFile {
            values: p.values().to_vec(),
            grid: p.grid(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&pf)?)?;
    }
    Ok((report, trace))
}

fn cmd_hardcore(
    args: &HardcoreArgs,
    seed: Option<u64>,
    tolerance: f64,
) -> anyhow::Result<RunReport> {
    let loaded = load(&args.instance)?;
    let inst = &loaded.instance;
    let class = require_class(&loaded)?;

    let mut report = RunReport::new("hardcore", seed);
    match ihcl_pipeline(inst, class, args.eps, args.delta, args.tau)? {
        PipelineOutcome::NoHardness { trace, .. } => {
            let mut row = BTreeMap::new();
            row.insert("no_hardness".into(), 1.0);
            row.insert("oracle_calls".into(), trace.oracle_calls as f64);
            report.push_trial(row);
            report.oracle_calls_total = trace.oracle_calls;
            eprintln!("no hardness: the class predicts the target exactly");
        }
        PipelineOutcome::Hardcore {
            predictor,
            measure,
            report: audit,
            checks,
            trace,
        } => {
            let mut row = BTreeMap::new();
            row.insert("density".into(), checks.density);
            row.insert("delta_measured".into(), checks.delta_measured);
            row.insert("delta_enumerated".into(), checks.delta_enumerated);
            row.insert("advantage".into(), checks.advantage);
            row.insert("eta".into(), audit.eta);
            row.insert("weighted_ma".into(), checks.weighted_ma_error);
            row.insert("min_entropy_ratio".into(), audit.min_entropy_ratio);
            row.insert("oracle_calls".into(), trace.oracle_calls as f64);
            report.push_trial(row);
            report.oracle_calls_total = trace.oracle_calls;
            report.assertions.push(Assertion::at_least(
                "dns(mu_max) >= 2 E[min(p,1-p)] - tau",
                checks.density,
                2.0 * checks.delta_measured - args.tau,
                tolerance,
            ));
            report.assertions.push(Assertion::at_most(
                "advantage <= 1/2 + 3 eps'/(2 dns)",
                checks.advantage,
                0.5 + 1.5 * checks.weighted_ma_error / checks.density,
                tolerance,
            ));
            if let Some(path) = &args.out_measure {
                let file =
                    schema::to_instance_file(inst, Some(class), Some(&predictor), Some(&measure));
                std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
            }
        }
    }
    report.aggregate();
    Ok(report)
}

fn parse_class_spec(text: &str) -> anyhow::Result<ClassSpec> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| anyhow::anyhow!("class spec needs kind:params, got `{text}`"))?;
    Ok(match kind {
        "parities" => ClassSpec::Parities { n: rest.parse()? },
        "dictators" => ClassSpec::Dictators { n: rest.parse()? },
        "juntas" => {
            let parts: Vec<&str> = rest.split(',').collect();
            anyhow::ensure!(parts.len() == 3, "juntas spec is juntas:K,N,SUBSETS");
            ClassSpec::Juntas {
                k: parts[0].parse()?,
                n: parts[1].parse()?,
                subsets: parts[2].parse()?,
            }
        }
        "random" => ClassSpec::RandomBoolean { m: rest.parse()? },
        other => anyhow::bail!("unknown class family `{other}`"),
    })
}

fn parse_label_mode(text: &str) -> anyhow::Result<LabelMode> {
    Ok(match text {
        "bayes" => LabelMode::BayesUniform,
        "random" => LabelMode::DeterministicRandom,
        other => {
            let rest = other
                .strip_prefix("planted:")
                .ok_or_else(|| anyhow::anyhow!("unknown label mode `{other}`"))?;
            let (idx, noise) = rest
                .split_once(',')
                .ok_or_else(|| anyhow::anyhow!("planted mode is planted:INDEX,NOISE"))?;
            LabelMode::Planted {
                index: idx.parse()?,
                noise: noise.parse()?,
            }
        }
    })
}

fn cmd_gen(what: &GenCommand, seed: Option<u64>) -> anyhow::Result<String> {
    let file = match what {
        GenCommand::Maj { n, i, j } => {
            let (inst, p, class) = build_maj_instance(&MajConfig::new(*n, *i, *j)?)?;
            schema::to_instance_file(&inst, Some(&class), Some(&p), None)
        }
        GenCommand::Showcase {
            eta,
            delta,
            points_per_region,
        } => {
            let cfg = ShowcaseConfig::new(*eta, *delta)?
                .with_points_per_region(*points_per_region)?;
            let (inst, p) = build_showcase(&cfg)?;
            schema::to_instance_file(&inst, None, Some(&p), None)
        }
        GenCommand::Random {
            class,
            labels,
            points,
        } => {
            let spec = parse_class_spec(class)?;
            let mode = parse_label_mode(labels)?;
            let n_points = match (points, &spec) {
                (Some(n), _) => *n,
                (
                    None,
                    ClassSpec::Parities { n }
                    | ClassSpec::Dictators { n }
                    | ClassSpec::Juntas { n, .. },
                ) => 1usize << n,
                (None, ClassSpec::RandomBoolean { .. }) => {
                    anyhow::bail!("--points is required for the random family")
                }
            };
            let (inst, class) =
                random_instance(seed.unwrap_or(0), n_points, &spec, &mode)?;
            schema::to_instance_file(&inst, Some(&class), None, None)
        }
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

fn parse_poly(text: &str, n: u32) -> anyhow::Result<Vec<(u64, f64)>> {
    let mut terms = Vec::new();
    for part in text.split(',') {
        let (mask, coef) = part
            .split_once(':')
            .ok_or_else(|| anyhow::anyhow!("poly term is MASK:COEF, got `{part}`"))?;
        let mask: u64 = mask.parse()?;
        anyhow::ensure!(mask < (1u64 << n), "mask {mask} outside the {n}-cube");
        terms.push((mask, coef.parse()?));
    }
    let l1: f64 = terms.iter().map(|(_, c): &(u64, f64)| c.abs()).sum();
    anyhow::ensure!(
        l1 <= 1.0 + 1e-12,
        "polynomial l1 mass {l1} > 1 leaves the [-1,1] range"
    );
    Ok(terms)
}

fn cmd_gl(args: &GlArgs, seed: Option<u64>) -> anyhow::Result<RunReport> {
    let seed = seed.unwrap_or(0);
    let mut cfg = GlConfig::new(args.gamma, args.delta_fail, seed)?;
    if args.exact {
        cfg = cfg.exact();
    }
    let mut report = RunReport::new("gl", Some(seed));

    let result = match (&args.poly, &args.instance) {
        (Some(poly), None) => {
            let terms = parse_poly(poly, args.n)?;
            goldreich_levin(
                |i| {
                    terms
                        .iter()
                        .map(|&(m, c)| c * cube::parity_value(i, m))
                        .sum()
                },
                args.n,
                &cfg,
            )?
        }
        (None, Some(path)) => {
            let loaded = load(path)?;
            let inst: &FiniteInstance = &loaded.instance;
            anyhow::ensure!(
                cube::hypercube_dimension(inst.points()) == Some(args.n),
                "instance is not a canonical {}-cube",
                args.n
            );
            match &loaded.predictor {
                Some(p) => {
                    // simulate queries by Bernoulli draws from the predictor
                    let mut sampler = fairboost_core::metrics::LabelSampler::new(seed);
                    let values = p.values().to_vec();
                    goldreich_levin(
                        move |i| 2.0 * f64::from(sampler.draw(values[i as usize])) - 1.0,
                        args.n,
                        &cfg,
                    )?
                }
                None => {
                    anyhow::ensure!(
                        inst.is_deterministic(),
                        "instance needs a predictor or deterministic labels"
                    );
                    let values: Vec<f64> =
                        (0..inst.len()).map(|i| 2.0 * inst.label(i) - 1.0).collect();
                    goldreich_levin(|i| values[i as usize], args.n, &cfg)?
                }
            }
        }
        _ => anyhow::bail!("exactly one of --poly or --instance must be given"),
    };

    for (mask, est) in result.subsets.iter().zip(&result.estimates) {
        let mut row = BTreeMap::new();
        row.insert("mask".into(), *mask as f64);
        row.insert("estimate".into(), *est);
        report.push_trial(row);
        eprintln!(
            "{}  mask {:#b}  estimate {est:+.4}",
            cube::parity_name(*mask, args.n),
            mask
        );
    }
    report.assertions.push(Assertion::at_least(
        "search ran to completion within the query budget",
        f64::from(u8::from(result.complete)),
        1.0,
        0.0,
    ));
    report.assertions.push(Assertion::at_most(
        "list size <= 4 / gamma^2",
        result.subsets.len() as f64,
        (4.0 / (args.gamma * args.gamma)).ceil(),
        0.0,
    ));
    eprintln!(
        "queries: {} (weight samples {}, coefficient samples {})",
        result.queries_used, result.samples_weight, result.samples_coeff
    );
    report.aggregate();
    Ok(report)
}
