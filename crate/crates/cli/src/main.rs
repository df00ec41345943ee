mod output;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qkc::amplitude_estimation::{qae_exact_distribution, QaeDistribution, StatePrepOracle, Target};
use qkc::classifiers::{classify, sqkc_oracle};
use qkc::datasets::{
    builtin, iris_feature_index, load_dataset, load_iris, table_datasets, FeaturePool,
};
use qkc::encoding::{Flavor, LabeledDataset, SqkcFlavor};
use qkc::experiments::{
    average_reports, inherent_error_study, run_comparison, write_trajectories_csv,
    ComparisonConfig, Estimator, ExperimentReport, InherentConfig,
};
use qkc::QkcError;

use output::{sig6, Artifacts};
use svg::Series;

/// Outcomes below this are left out of distribution listings.
const PMF_FLOOR: f64 = 1e-12;

#[derive(Parser)]
#[command(
    name = "qkc",
    version,
    about = "Quantum kernel classifiers and amplitude estimation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the test point of a dataset.
    Classify(ClassifyArgs),
    /// Error scaling of an estimator against classical sampling.
    Compare(CompareArgs),
    /// Exact phase-estimation outcome distribution.
    Distribution(DistributionArgs),
    /// Misclassification rate over random Iris draws.
    Inherent(InherentArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for CSV, JSON and manifest files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG chart (needs --out).
    #[arg(long, requires = "out")]
    svg: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// PATH, builtin:NAME
    #[arg(long)]
    data: String,
    #[arg(long)]
    classifier: Option<Flavor>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// PATH, builtin:NAME or builtin:table (mean over all twelve table sets).
    /// Defaults to the first table set of the classifier.
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    classifier: Option<Flavor>,
    #[arg(long, default_value = "qae")]
    estimator: Estimator,
    /// Phase-register sizes, `A..B` inclusive or a single value.
    #[arg(long = "t", value_parser = parse_t_range)]
    t: Option<TRange>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Which outcome counts as good: p1 or p0.
    #[arg(long, value_parser = parse_target)]
    target: Option<Target>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DistributionArgs {
    /// PATH, builtin:NAME or synthetic:A
    #[arg(long)]
    data: String,
    #[arg(long)]
    classifier: Option<Flavor>,
    #[arg(long = "t", value_parser = parse_t_range)]
    t: TRange,
    #[arg(long, value_parser = parse_target)]
    target: Option<Target>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct InherentArgs {
    /// Iris CSV file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "ssc")]
    classifier: Flavor,
    /// Feature columns by index or name.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    features: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "setosa,versicolor")]
    classes: Vec<String>,
    /// Training-set sizes.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    train: Vec<usize>,
    /// Random draws per training size.
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Draws before the first recorded point.
    #[arg(long, default_value_t = 1000)]
    warmup: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Debug)]
struct TRange(Vec<u32>);

fn parse_t_range(s: &str) -> Result<TRange, String> {
    let parse = |v: &str| {
        v.trim()
            .parse::<u32>()
            .map_err(|e| format!("bad t '{v}': {e}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo {
        return Err(format!("t range '{s}' must satisfy 1 <= A <= B"));
    }
    Ok(TRange((lo..=hi).collect()))
}

fn parse_target(s: &str) -> Result<Target, String> {
    match s.to_ascii_lowercase().as_str() {
        "p1" | "1" | "one" => Ok(Target::ProbOne),
        "p0" | "0" | "zero" => Ok(Target::ProbZero),
        _ => Err(format!("unknown target '{s}', expected p1 or p0")),
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(QkcError),
    Io(std::io::Error),
}

impl From<QkcError> for CliError {
    fn from(e: QkcError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_capacity() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

enum DataRef {
    Builtin(&'static qkc::datasets::BuiltinDataset),
    Table,
    Synthetic(f64),
    File(PathBuf),
}

impl DataRef {
    fn parse(s: &str) -> CliResult<Self> {
        if let Some(name) = s.strip_prefix("builtin:") {
            if name == "table" {
                return Ok(DataRef::Table);
            }
            return builtin(name)
                .map(DataRef::Builtin)
                .ok_or_else(|| CliError::Usage(format!("unknown builtin dataset '{name}'")));
        }
        if let Some(a) = s.strip_prefix("synthetic:") {
            let a: f64 = a
                .parse()
                .map_err(|_| CliError::Usage(format!("bad synthetic amplitude '{a}'")))?;
            return Ok(DataRef::Synthetic(a));
        }
        Ok(DataRef::File(PathBuf::from(s)))
    }

    fn id(&self) -> String {
        match self {
            DataRef::Builtin(b) => b.name.to_string(),
            DataRef::Table => "table".into(),
            DataRef::Synthetic(a) => format!("synthetic-{a}"),
            DataRef::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "data".into()),
        }
    }

    fn flavor(&self) -> Option<Flavor> {
        match self {
            DataRef::Builtin(b) => Some(b.flavor.into()),
            _ => None,
        }
    }

    fn target(&self) -> Target {
        match self {
            DataRef::Builtin(b) => b.target,
            _ => Target::ProbOne,
        }
    }

    fn dataset(&self) -> CliResult<LabeledDataset<f64>> {
        match self {
            DataRef::Builtin(b) => Ok(b.dataset()),
            DataRef::File(p) => load_dataset(p).map_err(|e| match e {
                QkcError::Io(io) => CliError::Usage(format!("cannot read {}: {io}", p.display())),
                other => CliError::Core(other),
            }),
            DataRef::Table | DataRef::Synthetic(_) => Err(CliError::Usage(
                "this command needs a single labeled dataset".into(),
            )),
        }
    }
}

fn sqkc_flavor(flavor: Flavor) -> CliResult<SqkcFlavor> {
    SqkcFlavor::try_from(flavor).map_err(|_| {
        CliError::Usage(format!(
            "amplitude estimation runs on the simplified classifiers (shc, ssc), not {flavor}"
        ))
    })
}

fn slug(flavor: Flavor) -> String {
    flavor.name().to_ascii_lowercase()
}

fn json_bytes(v: &serde_json::Value) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(QkcError::from)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_classify(args: &ClassifyArgs) -> CliResult<()> {
    let started = Instant::now();
    let data_ref = DataRef::parse(&args.data)?;
    let data = data_ref.dataset()?;
    let flavor = args.classifier.or(data_ref.flavor()).unwrap_or(Flavor::Ssc);
    let out = classify(&data, flavor)?;

    let mut art = Artifacts::new(
        args.output.out.as_deref(),
        format!("classify-{}-{}", data_ref.id(), slug(flavor)),
    );
    let config = json!({ "data": args.data, "classifier": flavor });
    if art.enabled() {
        let body =
            json!({ "outcome": out, "dataset": data_ref.id(), "manifest": art.manifest_name() });
        art.add(".json", json_bytes(&body)?);
    }
    let written = art.commit("classify", config, None, started)?;

    println!("dataset     {}", data_ref.id());
    println!("classifier  {flavor}");
    println!("score       {}", sig6(out.score));
    println!("Pr(1)       {}", sig6(out.pr_one));
    println!("label       {}", out.predicted_label);
    report_written(&written);
    Ok(())
}

fn comparison_config(
    data_ref: &DataRef,
    flavor: SqkcFlavor,
    args: &CompareArgs,
    data: LabeledDataset<f64>,
    target: Target,
) -> ComparisonConfig {
    let mut cfg = ComparisonConfig::new(flavor, args.estimator, data, data_ref.id(), target);
    cfg.seed = args.seed;
    if let Some(t) = &args.t {
        cfg.t_range = t.0.clone();
    }
    if let Some(r) = args.reps {
        cfg.repetitions = r;
    }
    if let Some(s) = args.shots {
        cfg.shots = s;
    }
    cfg
}

fn cmd_compare(args: &CompareArgs) -> CliResult<()> {
    let started = Instant::now();
    let data_arg = match (&args.data, args.classifier) {
        (Some(d), _) => d.clone(),
        (None, Some(Flavor::Shc)) => "builtin:shc-1".into(),
        (None, _) => "builtin:ssc-1".into(),
    };
    let data_ref = DataRef::parse(&data_arg)?;
    let report: ExperimentReport = match &data_ref {
        DataRef::Table => {
            let reports = table_datasets()
                .map(|b| {
                    let own = DataRef::Builtin(b);
                    let cfg = comparison_config(
                        &own,
                        b.flavor,
                        args,
                        b.dataset(),
                        args.target.unwrap_or(b.target),
                    );
                    run_comparison(&cfg)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut avg = average_reports(&reports)?;
            avg.dataset_id = "table".into();
            avg
        }
        DataRef::Synthetic(_) => {
            return Err(CliError::Usage("compare needs a classifier dataset".into()));
        }
        _ => {
            let flavor = sqkc_flavor(args.classifier.or(data_ref.flavor()).unwrap_or(Flavor::Ssc))?;
            let target = args.target.unwrap_or(data_ref.target());
            let cfg = comparison_config(&data_ref, flavor, args, data_ref.dataset()?, target);
            run_comparison(&cfg)?
        }
    };

    let stem = format!(
        "compare-{}-{}-{}-seed{}",
        report.dataset_id,
        slug(report.flavor.into()),
        report.estimator,
        report.seed
    );
    let mut art = Artifacts::new(args.output.out.as_deref(), stem);
    let config = json!({
        "data": data_arg,
        "classifier": Flavor::from(report.flavor),
        "estimator": report.estimator,
        "t": report.baseline.iter().map(|p| p.t).collect::<Vec<_>>(),
        "repetitions": report.repetitions,
        "shots": args.shots,
        "target": report.target,
    });
    if art.enabled() {
        let mut csv = Vec::new();
        report.write_csv(&mut csv)?;
        art.add(".csv", csv);
        let mut fit = report.fit_summary();
        fit["manifest"] = json!(art.manifest_name());
        art.add(".fit.json", json_bytes(&fit)?);
        if args.output.svg {
            let curve = |c: &[qkc::experiments::CurvePoint]| -> Vec<(f64, f64)> {
                c.iter().map(|p| (p.samples as f64, p.err_p81)).collect()
            };
            let mut series = Vec::new();
            if let Some(q) = &report.quantum {
                series.push(Series {
                    name: report.estimator.to_string(),
                    points: curve(q),
                });
            }
            series.push(Series {
                name: "classical sampling".into(),
                points: curve(&report.baseline),
            });
            let chart = svg::line_chart(
                &format!("{} error scaling, {}", report.estimator, report.dataset_id),
                &format!("manifest: {}", art.manifest_name()),
                "samples",
                "81st percentile error",
                &series,
                true,
            );
            art.add(".svg", chart.into_bytes());
        }
    }
    let written = art.commit("compare", config, Some(args.seed), started)?;

    println!(
        "dataset {}  classifier {}  estimator {}  a = {}",
        report.dataset_id,
        Flavor::from(report.flavor),
        report.estimator,
        sig6(report.true_a)
    );
    println!(
        "{:>3} {:>10} {:>12} {:>12} {:>12}",
        "t", "samples", "err_p81", "baseline", "bound"
    );
    for (i, b) in report.baseline.iter().enumerate() {
        let q = report
            .quantum
            .as_ref()
            .map(|c| sig6(c[i].err_p81))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>3} {:>10} {:>12} {:>12} {:>12}",
            b.t,
            b.samples,
            q,
            sig6(b.err_p81),
            sig6(b.bound)
        );
    }
    let slope = |s: Option<f64>| s.map(sig6).unwrap_or_else(|| "undefined".into());
    if let Some(fit) = report.quantum_fit {
        println!("{} slope {}", report.estimator, slope(fit.slope()));
    }
    println!("baseline slope {}", slope(report.baseline_fit.slope()));
    if report.quantum.is_some() {
        println!("slope ratio {}", slope(report.slope_ratio));
    }
    report_written(&written);
    Ok(())
}

fn distribution_oracle(
    data_ref: &DataRef,
    args: &DistributionArgs,
) -> CliResult<StatePrepOracle<f64>> {
    Ok(match data_ref {
        DataRef::Synthetic(a) => StatePrepOracle::synthetic(*a)?,
        _ => {
            let flavor = sqkc_flavor(args.classifier.or(data_ref.flavor()).unwrap_or(Flavor::Ssc))?;
            let target = args.target.unwrap_or(data_ref.target());
            sqkc_oracle(&data_ref.dataset()?, flavor, target)?
        }
    })
}

fn cmd_distribution(args: &DistributionArgs) -> CliResult<()> {
    let started = Instant::now();
    let data_ref = DataRef::parse(&args.data)?;
    let oracle = distribution_oracle(&data_ref, args)?;
    let a = oracle.probability()?;
    let dists: Vec<QaeDistribution> = args
        .t
        .0
        .iter()
        .map(|&t| qae_exact_distribution(&oracle, t))
        .collect::<Result<_, _>>()?;

    let label = match (&data_ref, args.classifier.or(data_ref.flavor())) {
        (DataRef::Synthetic(_), _) => String::new(),
        (_, f) => format!("-{}", slug(f.unwrap_or(Flavor::Ssc))),
    };
    let range = &args.t.0;
    let stem = format!(
        "distribution-{}{label}-t{}-{}",
        data_ref.id(),
        range[0],
        range[range.len() - 1]
    );
    let mut art = Artifacts::new(args.output.out.as_deref(), stem);
    let config = json!({ "data": args.data, "classifier": args.classifier, "t": range, "target": oracle.target() });
    if art.enabled() {
        for d in &dists {
            let mut csv = Vec::new();
            d.write_csv(&mut csv, PMF_FLOOR)?;
            art.add(&format!(".t{}.csv", d.t), csv);
            if args.output.svg {
                let bars: Vec<(String, f64)> = d
                    .probabilities
                    .iter()
                    .enumerate()
                    .map(|(y, p)| (format!("{:.3}", d.a_of_y(y as u64)), *p))
                    .collect();
                let chart = svg::bar_chart(
                    &format!("outcome distribution, t = {}", d.t),
                    &format!("manifest: {}", art.manifest_name()),
                    "estimate sin²(πy/2^t)",
                    "probability",
                    &bars,
                );
                art.add(&format!(".t{}.svg", d.t), chart.into_bytes());
            }
        }
        let summary: Vec<_> = dists
            .iter()
            .map(|d| json!({ "t": d.t, "expectation": d.expectation(), "mode": d.mode() }))
            .collect();
        let body =
            json!({ "true_a": a, "distributions": summary, "manifest": art.manifest_name() });
        art.add(".json", json_bytes(&body)?);
    }
    let written = art.commit("distribution", config, None, started)?;

    println!("dataset {}  a = {}", data_ref.id(), sig6(a));
    for d in &dists {
        println!(
            "t = {}  expectation {}  mode y = {}",
            d.t,
            sig6(d.expectation()),
            d.mode()
        );
        println!("{:>6} {:>12} {:>12}", "y", "a_of_y", "probability");
        for (y, p) in d.probabilities.iter().enumerate() {
            if *p >= PMF_FLOOR {
                println!("{y:>6} {:>12} {:>12}", sig6(d.a_of_y(y as u64)), sig6(*p));
            }
        }
    }
    report_written(&written);
    Ok(())
}

fn cmd_inherent(args: &InherentArgs) -> CliResult<()> {
    let started = Instant::now();
    let records = load_iris(Path::new(&args.data)).map_err(|e| match e {
        QkcError::Io(io) => CliError::Usage(format!("cannot read {}: {io}", args.data.display())),
        other => CliError::Core(other),
    })?;
    let features = args
        .features
        .iter()
        .map(|f| iris_feature_index(f))
        .collect::<Result<Vec<_>, _>>()?;
    let [c0, c1] = args.classes.as_slice() else {
        return Err(CliError::Usage(
            "--classes takes exactly two species".into(),
        ));
    };
    let pool = FeaturePool::from_iris(&records, &features, [c0, c1])?;
    let mut cfg = InherentConfig::new(args.train.clone(), args.reps, args.seed);
    cfg.flavor = args.classifier;
    cfg.warmup = args.warmup;
    let runs = inherent_error_study(&pool, &cfg)?;

    let stem = format!(
        "inherent-{}-{c0}-{c1}-seed{}",
        slug(args.classifier),
        args.seed
    );
    let mut art = Artifacts::new(args.output.out.as_deref(), stem);
    let config = json!({
        "data": args.data,
        "features": features,
        "classes": [c0, c1],
        "study": cfg,
    });
    if art.enabled() {
        let mut csv = Vec::new();
        write_trajectories_csv(&runs, &mut csv)?;
        art.add(".csv", csv);
        if args.output.svg {
            let series: Vec<Series> = runs
                .iter()
                .map(|r| Series {
                    name: format!("M = {}", r.train_count),
                    points: r.points.iter().map(|&(i, e)| (i as f64, e)).collect(),
                })
                .collect();
            let chart = svg::line_chart(
                &format!("{} misclassification rate", args.classifier),
                &format!("manifest: {}", art.manifest_name()),
                "iteration",
                "error rate",
                &series,
                false,
            );
            art.add(".svg", chart.into_bytes());
        }
    }
    let written = art.commit("inherent", config, Some(args.seed), started)?;

    println!(
        "classifier {}  classes {c0}/{c1}  draws {}",
        args.classifier, args.reps
    );
    for r in &runs {
        println!("M = {:<4} error rate {}", r.train_count, sig6(r.final_rate));
    }
    report_written(&written);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Distribution(a) => cmd_distribution(a),
        Command::Inherent(a) => cmd_inherent(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
