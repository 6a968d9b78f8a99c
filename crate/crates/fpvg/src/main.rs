use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpvg::pipeline::{self, EvaluateInputs, ImportanceSource, ManifestMode, OutputFormat};
use fpvg::{FpvgError, MetricConfig, Result};
use fpvg_core::synthetic::SyntheticWorldConfig;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "fpvg", version, about = "Faithful and plausible visual grounding metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assign detected objects to relevant, irrelevant or neither.
    Prepare {
        #[arg(long)]
        questions: PathBuf,
        #[arg(long)]
        detections: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// List the object subsets a model must be run on.
    Manifest {
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Conditions)]
        mode: Mode,
        /// Output manifests.jsonl path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predictions on the all / rel / irrel inputs.
    Evaluate {
        #[arg(long)]
        questions: PathBuf,
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long)]
        pred_all: PathBuf,
        #[arg(long)]
        pred_rel: PathBuf,
        #[arg(long)]
        pred_irrel: PathBuf,
        /// How the model runner fed the reduced inputs, recorded in the report.
        #[arg(long, default_value = "unspecified")]
        padding_policy: String,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Ranking match of importance scores against object relevance.
    Importance {
        #[arg(long)]
        assignments: PathBuf,
        /// report.json from `evaluate`.
        #[arg(long)]
        report: PathBuf,
        /// Precomputed importance vectors.
        #[arg(long, conflicts_with_all = ["loo_predictions", "pred_all"])]
        importance: Option<PathBuf>,
        /// Leave-one-out predictions; requires --pred-all.
        #[arg(long, requires = "pred_all")]
        loo_predictions: Option<PathBuf>,
        #[arg(long)]
        pred_all: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Compare correct-to-incorrect ratios across splits.
    Analyze {
        /// LABEL=PATH to a report.json; repeat a label once per seed. The first label is the baseline.
        #[arg(long = "report", required = true, value_parser = parse_labeled)]
        reports: Vec<(String, PathBuf)>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
    /// Generate a synthetic world and simulated model predictions.
    Synth {
        #[arg(long, default_value_t = 100)]
        n_questions: usize,
        /// grounded_oracle, blind_prior, uniform_random or mixed.
        #[arg(long, default_value = "grounded_oracle")]
        model: String,
        /// Fraction of grounded questions for `mixed`.
        #[arg(long)]
        alpha: Option<f64>,
        /// World seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        model_seed: u64,
        #[arg(long, default_value_t = 16)]
        vocab_size: usize,
        /// Also write leave-one-out manifests and predictions.
        #[arg(long)]
        loo: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    iou_threshold: Option<f64>,
    #[arg(long)]
    coverage_threshold: Option<f64>,
    #[arg(long)]
    max_objects: Option<usize>,
    #[arg(long)]
    suff_good: Option<f64>,
    #[arg(long)]
    comp_bad: Option<f64>,
    /// Comma-separated ascending bin edges for flip rates.
    #[arg(long, value_delimiter = ',')]
    flip_bin_edges: Option<Vec<f64>>,
    /// Compare answers byte-for-byte instead of normalized.
    #[arg(long)]
    strict_answers: bool,
}

impl ConfigArgs {
    fn build(&self) -> Result<MetricConfig> {
        let d = MetricConfig::default();
        let c = MetricConfig {
            iou_threshold: self.iou_threshold.unwrap_or(d.iou_threshold),
            coverage_threshold: self.coverage_threshold.unwrap_or(d.coverage_threshold),
            max_objects: self.max_objects.unwrap_or(d.max_objects),
            suff_good: self.suff_good.unwrap_or(d.suff_good),
            comp_bad: self.comp_bad.unwrap_or(d.comp_bad),
            flip_bin_edges: self.flip_bin_edges.clone().unwrap_or(d.flip_bin_edges),
            strict_answers: self.strict_answers,
            ..d
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Conditions,
    Loo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Both => OutputFormat::Both,
        }
    }
}

fn parse_labeled(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => Ok((label.to_owned(), path.into())),
        _ => Err(format!("expected LABEL=PATH, got `{s}`")),
    }
}

fn print<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("summary serializes"));
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prepare {
            questions,
            detections,
            out,
            config,
        } => print(&pipeline::prepare(&questions, &detections, &out, &config.build()?)?),
        Command::Manifest { assignments, mode, out } => {
            let mode = match mode {
                Mode::Conditions => ManifestMode::Conditions,
                Mode::Loo => ManifestMode::Loo,
            };
            let n = pipeline::manifest(&assignments, mode, &out)?;
            print(&serde_json::json!({ "manifests": n, "path": out.display().to_string() }));
        }
        Command::Evaluate {
            questions,
            assignments,
            pred_all,
            pred_rel,
            pred_irrel,
            padding_policy,
            out,
            jobs,
            format,
            config,
        } => {
            let inputs = EvaluateInputs {
                questions,
                assignments,
                pred_all,
                pred_rel,
                pred_irrel,
                padding_policy,
            };
            let report = pipeline::evaluate(&inputs, &out, &config.build()?, jobs, format.into())?;
            print(&serde_json::json!({
                "n_evaluated": report.n_evaluated,
                "fpvg_plus": report.fpvg.plus,
                "accuracy_all": report.accuracy.all,
                "config_fingerprint": report.config_fingerprint,
            }));
        }
        Command::Importance {
            assignments,
            report,
            importance,
            loo_predictions,
            pred_all,
            out,
            config,
        } => {
            let source = match (importance, loo_predictions, pred_all) {
                (Some(path), None, None) => ImportanceSource::Vectors(path),
                (None, Some(loo_predictions), Some(pred_all)) => ImportanceSource::Loo {
                    pred_all,
                    loo_predictions,
                },
                _ => {
                    return Err(FpvgError::invalid(
                        "give either --importance or --loo-predictions with --pred-all",
                    ))
                }
            };
            print(&pipeline::importance(&assignments, &report, &source, &out, &config.build()?)?);
        }
        Command::Analyze { reports, out, format } => {
            let c = pipeline::analyze(&reports, &out, format.into())?;
            print(&serde_json::json!({
                "baseline": c.baseline,
                "splits": c.splits,
                "seeds": c.seeds,
            }));
        }
        Command::Synth {
            n_questions,
            model,
            alpha,
            seed,
            model_seed,
            vocab_size,
            loo,
            out,
        } => {
            let world = SyntheticWorldConfig {
                n_questions,
                seed,
                answer_vocab_size: vocab_size,
                ..SyntheticWorldConfig::default()
            };
            let kind = pipeline::parse_model(&model, alpha)?;
            print(&pipeline::synth(&world, kind, model_seed, loo, &out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
