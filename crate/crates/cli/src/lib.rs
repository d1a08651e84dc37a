//! Library side of the fwsvm command line tool: benchmark report assembly
//! and the shared argument plumbing used by the binary.

pub mod report;

use anyhow::{anyhow, bail, Context, Result};
use fwsvm_core::io::Dataset;
use fwsvm_core::solvers::{SolverConfig, Variant};
use fwsvm_core::svm::{default_sigma2, KernelSpec, TrainConfig, TrainOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

/// Kernel choice as spelled on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KernelKind {
    Rbf,
    Poly2,
    Linear,
}

/// Solver variant as spelled on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VariantArg {
    Fw,
    Mfw,
    Swap,
    Swap2o,
    Fcfw,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Fw => Variant::Fw,
            VariantArg::Mfw => Variant::Mfw,
            VariantArg::Swap => Variant::Swap,
            VariantArg::Swap2o => Variant::Swap2o,
            VariantArg::Fcfw => Variant::Fcfw,
        }
    }
}

/// Problem flags shared by `train` and `benchmark`. The benchmark applies
/// one shared problem definition to every variant; there are deliberately
/// no per-variant overrides.
#[derive(Debug, Clone, clap::Args)]
pub struct ProblemArgs {
    /// Kernel function
    #[arg(long, value_enum)]
    pub kernel: KernelKind,
    /// RBF scale, or `auto` for the mean squared pairwise distance
    #[arg(long, default_value = "auto")]
    pub sigma2: String,
    /// Polynomial scale, or `auto` for the inverse mean squared distance
    #[arg(long, default_value = "auto")]
    pub gamma: String,
    /// Regularization parameter
    #[arg(short = 'C', long = "C")]
    pub c: f64,
    /// Stopping tolerance on the primal-dual gap
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Number of points used to initialize the starting face
    #[arg(long = "init-p", default_value_t = 20)]
    pub init_p: usize,
    /// Ascent-scan sample size, or `off` for exact scans
    #[arg(long, default_value = "off")]
    pub sample: String,
    /// Seed for initialization and sampled scans
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration budget per solve
    #[arg(long = "max-iter", default_value_t = 10_000_000)]
    pub max_iter: u64,
    /// Kernel-row cache capacity (rows); defaults to min(m, 4096)
    #[arg(long = "cache-rows")]
    pub cache_rows: Option<usize>,
    /// Train one-vs-one subproblems concurrently
    #[arg(long)]
    pub parallel: bool,
}

impl ProblemArgs {
    /// Resolves the kernel spec, computing `auto` scales from the data.
    pub fn resolve_kernel(&self, data: &Dataset) -> Result<KernelSpec> {
        let auto_scale = |label: &str| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            default_sigma2(&data.rows, &mut rng)
                .with_context(|| format!("estimating {label} from the data"))
        };
        let parse_positive = |text: &str, label: &str| -> Result<f64> {
            let value: f64 = text
                .parse()
                .map_err(|_| anyhow!("{label} must be a number or `auto`, got {text:?}"))?;
            if !(value > 0.0 && value.is_finite()) {
                bail!("{label} must be positive and finite, got {value}");
            }
            Ok(value)
        };
        Ok(match self.kernel {
            KernelKind::Rbf => KernelSpec::Rbf {
                sigma2: if self.sigma2 == "auto" {
                    auto_scale("sigma2")?
                } else {
                    parse_positive(&self.sigma2, "--sigma2")?
                },
            },
            KernelKind::Poly2 => KernelSpec::Poly2 {
                gamma: if self.gamma == "auto" {
                    1.0 / auto_scale("gamma")?
                } else {
                    parse_positive(&self.gamma, "--gamma")?
                },
            },
            KernelKind::Linear => KernelSpec::Linear,
        })
    }

    pub fn sample_size(&self) -> Result<Option<usize>> {
        if self.sample == "off" {
            return Ok(None);
        }
        let size: usize = self
            .sample
            .parse()
            .map_err(|_| anyhow!("--sample must be a count or `off`, got {:?}", self.sample))?;
        if size == 0 {
            bail!("--sample must be at least 1");
        }
        Ok(Some(size))
    }

    pub fn train_config(&self, variant: Variant, kernel: KernelSpec) -> Result<TrainConfig> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            bail!("-C must be positive and finite, got {}", self.c);
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            bail!("--eps must be positive and finite, got {}", self.eps);
        }
        if self.init_p == 0 {
            bail!("--init-p must be at least 1");
        }
        let mut solver = SolverConfig::new(variant)
            .with_tolerance(self.eps)
            .with_max_iterations(self.max_iter)
            .with_seed(self.seed);
        solver.ascent_sample = self.sample_size()?;
        let mut config = TrainConfig::new(kernel, self.c, solver);
        config.init_points = self.init_p;
        config.cache_rows = self.cache_rows;
        config.parallel = self.parallel;
        Ok(config)
    }
}

/// The one-line summary printed after training.
pub fn train_summary(outcome: &TrainOutcome) -> String {
    format!(
        "iterations={} time_s={:.6} support={} gap={}",
        outcome.total_iterations(),
        outcome.total_seconds(),
        outcome.model.support_size(),
        outcome.max_gap()
    )
}

/// Trace-file path for one binary subproblem: the given path for a single
/// pair, a `-pair<a>vs<b>` suffix per class pair otherwise.
pub fn trace_path(base: &Path, positive: f64, negative: f64, single: bool) -> PathBuf {
    if single {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let extension = base
        .extension()
        .map(|s| format!(".{}", s.to_string_lossy()))
        .unwrap_or_default();
    let name = format!("{stem}-pair{positive}vs{negative}{extension}");
    base.with_file_name(name)
}

/// Writes one trace CSV per trained binary subproblem.
pub fn write_traces(outcome: &TrainOutcome, base: &Path) -> Result<()> {
    let single = outcome.pairs.len() == 1;
    for pair in &outcome.pairs {
        let path = trace_path(base, pair.positive, pair.negative, single);
        let file = std::fs::File::create(&path)
            .with_context(|| format!("creating trace file {}", path.display()))?;
        fwsvm_core::io::write_trace_csv(&pair.result.trace, std::io::BufWriter::new(file))?;
    }
    Ok(())
}
