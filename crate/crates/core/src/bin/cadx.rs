use std::fmt::Write as _;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use cadx::classifiers::{load_model, save_model, Classifier, Diagnosis, GdStepMode, LabeledDataset, ModelKind};
use cadx::data_io::{
    load_feature_csv, looks_like_wbc, parse_feature_csv, parse_wbc, read_index, write_lesion_dataset,
    write_lung_dataset, FeatureTable, SyntheticSpec,
};
use cadx::error::{Error, ErrorKind, Result};
use cadx::evaluation::{curve_csv, learning_curve, metrics, split_dataset, EvalReport};
use cadx::pipeline::{check_features, evaluate_counts, extract_file, fit_model, train_pipeline, ExtractConfig, Pipeline, TrainConfig};
use cadx::serve::{serve, AppState};
use cadx::texture::GlcmOffset;

#[derive(Parser, Debug)]
#[command(name = "cadx", version, about = "Computer-aided diagnosis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Image index (or image paths) to a feature CSV.
    Extract(ExtractArgs),
    /// Feature CSV (or raw WBC data) to a model file.
    Train(TrainArgs),
    /// Score a model on a labelled feature CSV.
    Evaluate(EvaluateArgs),
    /// Classify one feature row or image.
    Predict(PredictArgs),
    /// Test accuracy against training-set size.
    Curve(CurveArgs),
    /// Write a seeded synthetic image dataset.
    Synth(SynthArgs),
    /// Run the HTTP inference endpoint.
    Serve(ServeArgs),
}

#[derive(Args, Debug, Clone)]
struct FeatureOpts {
    /// GLCM gray levels.
    #[arg(long)]
    levels: Option<usize>,
    /// GLCM pixel offset as `row,col`.
    #[arg(long, allow_hyphen_values = true)]
    offset: Option<String>,
}

impl FeatureOpts {
    fn config(&self) -> Result<ExtractConfig> {
        let mut cfg = ExtractConfig::default();
        if let Some(levels) = self.levels {
            if levels < 2 {
                return Err(Error::InvalidArgument("--levels must be at least 2".into()));
            }
            cfg.lung.glcm.levels = levels;
        }
        if let Some(offset) = &self.offset {
            let parts = parse_list::<i32>(offset, "--offset")?;
            let [dr, dc] = parts[..] else {
                return Err(Error::InvalidArgument("--offset takes `row,col`".into()));
            };
            cfg.lung.glcm.offset = GlcmOffset::new(dr, dc)?;
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long)]
    pipeline: Pipeline,
    /// Index CSV with `path[,label[,mask]]` columns.
    #[arg(long, conflicts_with = "images")]
    input: Option<PathBuf>,
    /// Image files, used when no index is given.
    images: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report failing files and continue.
    #[arg(long)]
    keep_going: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    features: FeatureOpts,
}

#[derive(Args, Debug, Clone)]
struct Hyper {
    #[arg(long)]
    seed: Option<u64>,
    /// MLP epochs or gradient-descent iterations.
    #[arg(long)]
    epochs: Option<usize>,
    /// MLP learning rate or gradient-descent step.
    #[arg(long)]
    step: Option<f64>,
    /// Gradient-descent step rule: `practical` or `paper`.
    #[arg(long)]
    step_mode: Option<GdStepMode>,
    #[arg(long)]
    c: Option<f64>,
    /// Half-width of the inconclusive band around 0.5.
    #[arg(long)]
    delta: Option<f64>,
    /// MLP layer sizes, e.g. `6,10,6,1`.
    #[arg(long)]
    layers: Option<String>,
    /// Cross-validation folds for SVM feature-pair selection.
    #[arg(long)]
    folds: Option<usize>,
}

#[derive(Args, Debug)]
struct TrainSpec {
    /// Inferred from the data when omitted.
    #[arg(long)]
    pipeline: Option<Pipeline>,
    /// Model kind: svm, ann or gd.
    #[arg(long)]
    model: Option<ModelKind>,
    /// Permit a pipeline/model pairing outside the defaults.
    #[arg(long)]
    any_model: bool,
    /// Training fraction.
    #[arg(long)]
    split: Option<f64>,
    #[command(flatten)]
    hyper: Hyper,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Feature CSV with a `label` column, or raw WBC records.
    #[arg(long)]
    input: PathBuf,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write the held-out rows as a feature CSV.
    #[arg(long)]
    test_out: Option<PathBuf>,
    #[command(flatten)]
    spec: TrainSpec,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// Also write the report as a one-row CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated feature values in the model's column order.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "image", required_unless_present = "image")]
    row: Option<String>,
    #[arg(long)]
    image: Option<PathBuf>,
    /// Lesion mask for a melanoma image.
    #[arg(long, requires = "image")]
    mask: Option<PathBuf>,
    /// Checked against the model's features when given.
    #[arg(long)]
    pipeline: Option<Pipeline>,
    #[command(flatten)]
    features: FeatureOpts,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Training-set sizes, e.g. `20,50,100`.
    #[arg(long)]
    sizes: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    spec: TrainSpec,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// `lung` or `melanoma`.
    #[arg(long)]
    pipeline: Pipeline,
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Image side in pixels.
    #[arg(long, default_value_t = 96)]
    size: usize,
    /// Fraction of malignant samples.
    #[arg(long, default_value_t = 0.5)]
    balance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{flag}: cannot parse `{}`", p.trim())))
        })
        .collect()
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            })
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

fn cmd_extract(args: ExtractArgs) -> Result<u8> {
    if args.pipeline == Pipeline::Breast {
        return Err(Error::InvalidArgument("the breast pipeline has no image extraction".into()));
    }
    let cfg = args.features.config()?;
    let entries = match &args.input {
        Some(index) => read_index(index)?,
        None => args
            .images
            .iter()
            .map(|p| cadx::data_io::IndexEntry {
                path: p.clone(),
                label: None,
                mask: None,
            })
            .collect(),
    };
    let run = || -> Vec<Result<Vec<f64>>> {
        entries
            .par_iter()
            .map(|e| extract_file(args.pipeline, &e.path, e.mask.as_deref(), &cfg))
            .collect()
    };
    let results = match args.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("--workers: {e}")))?
            .install(run),
        None => run(),
    };

    let labelled = !entries.is_empty() && entries.iter().all(|e| e.label.is_some());
    let mut table = FeatureTable {
        names: args.pipeline.feature_names(),
        rows: Vec::new(),
        labels: labelled.then(Vec::new),
    };
    let mut failed = 0usize;
    for (entry, result) in entries.iter().zip(results) {
        match result {
            Ok(row) => {
                table.rows.push(row);
                if let (Some(labels), Some(l)) = (&mut table.labels, entry.label) {
                    labels.push(l);
                }
            }
            Err(e) if args.keep_going => {
                eprintln!("{}: {e}", entry.path.display());
                failed += 1;
            }
            Err(e) => {
                eprintln!("{}: {e}", entry.path.display());
                return Ok(exit_code(e.kind()));
            }
        }
    }
    write_output(args.out.as_deref(), &table.to_csv())?;
    if failed > 0 {
        eprintln!("{failed} of {} files failed", entries.len());
        return Ok(exit_code(ErrorKind::Data));
    }
    Ok(0)
}

/// Labelled data plus the pipeline it belongs to.
fn load_training_data(input: &Path, pipeline: Option<Pipeline>) -> Result<(LabeledDataset, Pipeline, Option<usize>)> {
    let text = read_text(input)?;
    if looks_like_wbc(&text) {
        if pipeline.is_some_and(|p| p != Pipeline::Breast) {
            return Err(Error::InvalidArgument("WBC records belong to the breast pipeline".into()));
        }
        let wbc = parse_wbc(&text)?;
        return Ok((wbc.dataset, Pipeline::Breast, Some(wbc.dropped)));
    }
    let data = parse_feature_csv(&text)?.into_dataset()?;
    let pipeline = match pipeline {
        Some(p) => p,
        None => Pipeline::for_features(data.feature_names())
            .ok_or_else(|| Error::InvalidArgument("cannot infer the pipeline from the columns; pass --pipeline".into()))?,
    };
    Ok((data, pipeline, None))
}

fn train_config(spec: &TrainSpec, pipeline: Pipeline) -> Result<TrainConfig> {
    let mut cfg = TrainConfig::new(pipeline);
    if let Some(kind) = spec.model {
        if !pipeline.allows(kind) && !spec.any_model {
            return Err(Error::InvalidArgument(format!(
                "{pipeline} is not paired with {}; pass --any-model to override",
                kind.as_str()
            )));
        }
        cfg.kind = kind;
    }
    if let Some(split) = spec.split {
        if !(split > 0.0 && split < 1.0) {
            return Err(Error::InvalidArgument("--split must lie strictly between 0 and 1".into()));
        }
        cfg.split = split;
    }
    let h = &spec.hyper;
    if let Some(seed) = h.seed {
        cfg.seed = seed;
        cfg.mlp.seed = seed;
    }
    if let Some(epochs) = h.epochs {
        cfg.mlp.epochs = epochs;
        cfg.gd.iterations = epochs;
    }
    if let Some(step) = h.step {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument("--step must be positive".into()));
        }
        cfg.mlp.learning_rate = step;
        cfg.gd.step = step;
        cfg.gd.sigma = step;
    }
    if let Some(mode) = h.step_mode {
        cfg.gd.mode = mode;
        if mode == GdStepMode::Paper && h.step.is_none() {
            cfg.gd.sigma = cadx::classifiers::PAPER_SIGMA;
        }
    }
    if let Some(c) = h.c {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument("--c must be positive".into()));
        }
        cfg.svm.c = c;
    }
    if let Some(delta) = h.delta {
        if !(0.0..0.5).contains(&delta) {
            return Err(Error::InvalidArgument("--delta must lie in [0, 0.5)".into()));
        }
        cfg.mlp.inconclusive_delta = delta;
    }
    if let Some(layers) = &h.layers {
        let sizes = parse_list::<usize>(layers, "--layers")?;
        if sizes.len() < 2 || sizes.contains(&0) || sizes.last() != Some(&1) {
            return Err(Error::InvalidArgument("--layers needs at least two positive sizes ending in 1".into()));
        }
        cfg.mlp.layer_sizes = sizes;
    }
    if let Some(folds) = h.folds {
        if folds < 2 {
            return Err(Error::InvalidArgument("--folds must be at least 2".into()));
        }
        cfg.folds = folds;
    }
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |v| format!("{v:.4}"))
}

fn report_block(title: &str, r: &EvalReport) -> String {
    let c = &r.counts;
    let mut s = format!("{title}\n");
    let _ = writeln!(s, "  TP {}  FP {}  TN {}  FN {}  inconclusive {}", c.tp, c.fp, c.tn, c.fn_, c.inconclusive);
    for (name, v) in [
        ("sensitivity", r.sensitivity),
        ("specificity", r.specificity),
        ("PPV", r.ppv),
        ("NPV", r.npv),
        ("MCC", r.mcc),
        ("accuracy", r.accuracy),
    ] {
        let _ = writeln!(s, "  {name:<12} {}", fmt_opt(v));
    }
    s
}

fn cmd_train(args: TrainArgs) -> Result<u8> {
    let (data, pipeline, dropped) = load_training_data(&args.input, args.spec.pipeline)?;
    let cfg = train_config(&args.spec, pipeline)?;
    let outcome = train_pipeline(&data, &cfg)?;
    save_model(&outcome.model, &args.out)?;
    if let Some(path) = &args.test_out {
        let (_, test) = split_dataset(&data, cfg.split, cfg.seed)?;
        write_output(Some(path), &FeatureTable::from(&test).to_csv())?;
    }

    let pct = (cfg.split * 100.0).round() as u32;
    let mut s = format!("pipeline {pipeline}  model {}\n", cfg.kind.as_str());
    if let Some(d) = dropped {
        let _ = writeln!(s, "records {} complete, {d} dropped for missing values", data.len());
    }
    let _ = writeln!(
        s,
        "split {pct}:{}  train {}  test {}  (seed {})",
        100 - pct,
        outcome.train_size,
        outcome.test_size,
        cfg.seed
    );
    if let Some([a, b]) = outcome.selected {
        let names = data.feature_names();
        let _ = writeln!(s, "selected features {} + {}", names[a], names[b]);
    }
    if let Some(loss) = outcome.final_loss {
        let _ = writeln!(s, "final training loss {loss:.6}");
    }
    let _ = writeln!(s, "training accuracy {}", fmt_opt(outcome.train_report.accuracy));
    s.push_str(&report_block("test results", &outcome.test_report));
    let _ = writeln!(s, "model written to {}", args.out.display());
    write_output(None, &s)?;
    Ok(0)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<u8> {
    let model = load_model(&args.model)?;
    let table = load_feature_csv(&args.input)?;
    check_features(model.feature_names(), &table.names)?;
    let data = table.into_dataset()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("test CSV has no rows"));
    }
    let report = metrics(&evaluate_counts(&model, &data)?);
    write_output(None, &report_block(&format!("results on {} samples", data.len()), &report))?;
    if let Some(out) = &args.out {
        write_output(Some(out), &format!("{}\n{}\n", EvalReport::csv_header(), report.to_csv_row()))?;
    }
    Ok(0)
}

fn cmd_predict(args: PredictArgs) -> Result<u8> {
    let model = load_model(&args.model)?;
    let model_pipeline = Pipeline::for_features(model.feature_names());
    if let (Some(p), Some(m)) = (args.pipeline, model_pipeline) {
        if p != m {
            return Err(Error::FeatureMismatch(format!("model expects {m} features, not {p}")));
        }
    }
    let row = match (&args.row, &args.image) {
        (Some(row), _) => parse_list::<f64>(row, "--row").map_err(|e| match e {
            Error::InvalidArgument(m) => Error::Format(m),
            e => e,
        })?,
        (None, Some(image)) => {
            let pipeline = args.pipeline.or(model_pipeline).ok_or_else(|| {
                Error::InvalidArgument("model features match no image pipeline; pass --pipeline".into())
            })?;
            extract_file(pipeline, image, args.mask.as_deref(), &args.features.config()?)?
        }
        (None, None) => unreachable!("clap requires --row or --image"),
    };
    let p = model.predict(&row)?;
    let line = format!("{} {} {}\n", p.label, p.score, p.label == Diagnosis::Inconclusive);
    write_output(None, &line)?;
    Ok(0)
}

fn cmd_curve(args: CurveArgs) -> Result<u8> {
    let (data, pipeline, _) = load_training_data(&args.input, args.spec.pipeline)?;
    let cfg = train_config(&args.spec, pipeline)?;
    let sizes = parse_list::<usize>(&args.sizes, "--sizes")?;
    let (train, test) = split_dataset(&data, cfg.split, cfg.seed)?;
    let points = learning_curve(&train, &test, &sizes, cfg.seed, |subset| fit_model(subset, &cfg).map(|(m, _, _)| m))?;
    write_output(args.out.as_deref(), &curve_csv(&points))?;
    Ok(0)
}

fn cmd_synth(args: SynthArgs) -> Result<u8> {
    let spec = SyntheticSpec {
        class_balance: args.balance,
        ..SyntheticSpec::new(args.seed, args.count, args.size)
    };
    let index = match args.pipeline {
        Pipeline::Lung => write_lung_dataset(&spec, &args.out)?,
        Pipeline::Melanoma => write_lesion_dataset(&spec, &args.out)?,
        Pipeline::Breast => {
            return Err(Error::InvalidArgument("synthetic data exists only for lung and melanoma".into()))
        }
    };
    write_output(None, &format!("{}\n", index.display()))?;
    Ok(0)
}

fn cmd_serve(args: ServeArgs) -> Result<u8> {
    let model = load_model(&args.model)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::Io {
        path: "<runtime>".into(),
        source: e,
    })?;
    runtime.block_on(serve(AppState::new(model), args.bind))?;
    Ok(0)
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Usage => 1,
        ErrorKind::Data => 2,
        ErrorKind::Numeric => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Serve(a) => cmd_serve(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
