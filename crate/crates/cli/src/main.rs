//! `fwsvm`: train, predict and benchmark kernel L2-SVMs with the
//! Frank-Wolfe solver family.

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use fwsvm_cli::report::{assemble_rows, median, write_report, Measurement};
use fwsvm_cli::{train_summary, write_traces, ProblemArgs, VariantArg};
use fwsvm_core::io::{load_libsvm, load_model, parse_libsvm_lenient, save_model};
use fwsvm_core::solvers::Variant;
use fwsvm_core::svm::train;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fwsvm",
    about = "Kernel L2-SVM training with Frank-Wolfe style simplex solvers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write it to a model file
    Train(TrainArgs),
    /// Predict labels for a dataset with a trained model
    Predict(PredictArgs),
    /// Run several solver variants on one problem and report timings
    Benchmark(BenchmarkArgs),
}

#[derive(clap::Args)]
struct TrainArgs {
    /// Training data in LIBSVM format
    #[arg(long)]
    data: PathBuf,
    /// Solver variant
    #[arg(long, value_enum)]
    solver: VariantArg,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Where to write the trained model
    #[arg(long = "model-out")]
    model_out: PathBuf,
    /// Optional per-iteration trace CSV (one file per class pair)
    #[arg(long = "trace-out")]
    trace_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PredictArgs {
    /// Model file written by `fwsvm train`
    #[arg(long)]
    model: PathBuf,
    /// Data to classify (labels optional)
    #[arg(long)]
    data: PathBuf,
    /// Write predictions here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchmarkArgs {
    /// Training data in LIBSVM format
    #[arg(long)]
    data: PathBuf,
    /// Labelled test data for accuracy measurement
    #[arg(long)]
    test: PathBuf,
    /// Comma-separated solver variants to run
    #[arg(long, value_delimiter = ',', default_value = "fw,mfw,swap,swap2o,fcfw")]
    variants: Vec<VariantArg>,
    /// Variant used as the baseline for speed-ups and accuracy deltas
    #[arg(long, value_enum, default_value = "fcfw")]
    reference: VariantArg,
    /// Training repetitions per variant (wall times are medians)
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Where to write the report CSV
    #[arg(long)]
    report: PathBuf,
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let data = load_libsvm(&args.data)
        .with_context(|| format!("reading {}", args.data.display()))?;
    let kernel = args.problem.resolve_kernel(&data)?;
    let config = args.problem.train_config(args.solver.into(), kernel)?;
    let outcome = train(&data, &config)?;
    save_model(&outcome.model, &args.model_out)
        .with_context(|| format!("writing {}", args.model_out.display()))?;
    if let Some(trace_out) = &args.trace_out {
        write_traces(&outcome, trace_out)?;
    }
    println!("{}", train_summary(&outcome));
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let model = load_model(&args.model)
        .with_context(|| format!("reading {}", args.model.display()))?;
    let text = std::fs::read_to_string(&args.data)
        .with_context(|| format!("reading {}", args.data.display()))?;
    let data = parse_libsvm_lenient(&text)?;
    let mut predictions = String::new();
    let mut correct = 0usize;
    for (row, &label) in data.rows.iter().zip(&data.labels) {
        let (predicted, _) = model.predict(row);
        predictions.push_str(&format!("{predicted}\n"));
        if predicted == label {
            correct += 1;
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, &predictions)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{predictions}"),
    }
    if data.has_labels() {
        println!("accuracy={}", correct as f64 / data.len() as f64);
    }
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<()> {
    if args.repeats == 0 {
        bail!("--repeats must be at least 1");
    }
    if args.variants.is_empty() {
        bail!("--variants must name at least one solver");
    }
    if !args.variants.contains(&args.reference) {
        bail!("the reference variant must be listed in --variants");
    }
    let data = load_libsvm(&args.data)
        .with_context(|| format!("reading {}", args.data.display()))?;
    let test = load_libsvm(&args.test)
        .with_context(|| format!("reading {}", args.test.display()))?;
    if !test.has_labels() {
        bail!("the test file must be labelled");
    }
    // One shared problem definition for every variant.
    let kernel = args.problem.resolve_kernel(&data)?;

    let mut measurements = Vec::new();
    let mut all_converged = true;
    for &variant_arg in &args.variants {
        let variant: Variant = variant_arg.into();
        let config = args.problem.train_config(variant, kernel)?;
        let mut times = Vec::with_capacity(args.repeats);
        let mut outcome = None;
        let mut failure = None;
        for _ in 0..args.repeats {
            match train(&data, &config) {
                Ok(run) => {
                    times.push(run.total_seconds());
                    outcome = Some(run);
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        let measurement = match (&outcome, failure) {
            (Some(run), None) => {
                let converged = run.converged();
                all_converged &= converged;
                Measurement {
                    variant: variant.name().to_string(),
                    converged,
                    iterations: run.total_iterations(),
                    time_s: median(&times),
                    accuracy: run.model.accuracy(&test),
                    support: run.model.support_size(),
                }
            }
            (_, failure) => {
                // Keep the failed variant in the report so partial results
                // are never silently dropped.
                if let Some(e) = failure {
                    eprintln!("warning: {} failed: {e:#}", variant.name());
                }
                all_converged = false;
                Measurement {
                    variant: variant.name().to_string(),
                    converged: false,
                    iterations: 0,
                    time_s: 0.0,
                    accuracy: 0.0,
                    support: 0,
                }
            }
        };
        measurements.push(measurement);
        if let Some(run) = &outcome {
            let trace_base = trace_base_path(&args.report, variant.name());
            write_traces(run, &trace_base)?;
        }
    }

    let dataset = args
        .data
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let reference: Variant = args.reference.into();
    let rows = assemble_rows(&dataset, measurements, reference.name());
    let file = std::fs::File::create(&args.report)
        .with_context(|| format!("writing {}", args.report.display()))?;
    write_report(&rows, std::io::BufWriter::new(file))?;

    if !all_converged {
        bail!("at least one variant hit the iteration budget before converging");
    }
    Ok(())
}

fn trace_base_path(report: &std::path::Path, variant: &str) -> PathBuf {
    let stem = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    report.with_file_name(format!("{stem}-{variant}-trace.csv"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = write!(std::io::stderr(), "{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Benchmark(args) => cmd_benchmark(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
