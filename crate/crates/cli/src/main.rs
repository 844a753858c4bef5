use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lclrr::data::{load_image_dir, load_matrix, Dataset, DownsampleRate, SynthSpec};
use lclrr::harness::{
    emit_report, fit_dataset, run_experiment, run_rpca_baseline, DataSource, ExperimentConfig, Model, Report,
    ReportFormat,
};
use lclrr::linalg::{fro_norm, singular_values};
use lclrr::Error;

#[derive(Parser)]
#[command(name = "lclrr", version, about = "Locality-constrained low-rank dictionary learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark on synthetic union-of-subspaces data.
    BenchSynth(BenchArgs),
    /// Benchmark on a folder of PGM images (one subfolder per class).
    BenchDir {
        dir: PathBuf,
        #[arg(long, default_value = "1/8")]
        rate: DownsampleRate,
        #[command(flatten)]
        bench: BenchArgs,
    },
    /// Compare against the RPCA + LRR baseline.
    RpcaBench {
        /// Image folder; synthetic data when omitted.
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long, default_value = "1/8")]
        rate: DownsampleRate,
        #[command(flatten)]
        bench: BenchArgs,
    },
    /// Train a model and write it to a directory.
    Fit {
        #[command(flatten)]
        input: LabeledInput,
        /// Output model directory.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Predict class names for the columns of a matrix file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Samples as columns, LRMX or CSV.
        #[arg(long)]
        data: PathBuf,
        /// Write predictions here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Describe a matrix file or a model directory.
    Inspect { path: PathBuf },
}

#[derive(Args)]
struct LabeledInput {
    /// Samples as columns, LRMX or CSV.
    #[arg(long, conflicts_with = "dir", requires = "labels")]
    data: Option<PathBuf>,
    /// One class name per line, in column order.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// PGM image folder, one subfolder per class.
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long, default_value = "1/8")]
    rate: DownsampleRate,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of random splits.
    #[arg(long)]
    repetitions: Option<usize>,
    /// Training samples per class.
    #[arg(long)]
    per_class_train: Option<usize>,
    /// Report training time and hardware (output is then not reproducible).
    #[arg(long)]
    timing: bool,
    /// table, csv or json.
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for data, splits and initialization.
    #[arg(long)]
    seed: Option<u64>,
    /// Weight of the column-sparse error term.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Weight of the locality term.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Dictionary regularization weight.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Error weight used when coding against a fixed dictionary.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Ridge regularization of the classifier.
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Initial penalty.
    #[arg(long, allow_negative_numbers = true)]
    mu0: Option<f64>,
    /// Penalty growth factor.
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Stopping tolerance on the residuals.
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
}

impl CommonArgs {
    fn config(&self) -> lclrr::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let s = &mut cfg.solver;
        macro_rules! set {
            ($($field:ident => $target:expr),*) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(lambda => s.lambda, alpha => s.alpha, gamma => s.gamma, mu0 => s.mu0,
             rho => s.rho, eps => s.eps, max_iter => s.max_iter,
             eta => cfg.eta, seed => cfg.seed);
        if self.beta.is_some() {
            cfg.solver.beta = self.beta;
        }
        Ok(cfg)
    }
}

impl BenchArgs {
    fn config(&self, source: Option<DataSource>) -> lclrr::Result<ExperimentConfig> {
        let mut cfg = self.common.config()?;
        if let Some(src) = source {
            cfg.source = src;
        }
        if let Some(r) = self.repetitions {
            cfg.repetitions = r;
        }
        if let Some(n) = self.per_class_train {
            cfg.per_class_train = n;
        }
        if let (Some(seed), DataSource::Synthetic(spec)) = (self.common.seed, &mut cfg.source) {
            spec.seed = seed;
        }
        cfg.record_timing |= self.timing;
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, cfg: &ExperimentConfig, reports: &[Report]) -> lclrr::Result<()> {
        let text = emit_report(reports, self.format);
        write_output(cfg.output.as_deref(), &text)?;
        for w in reports.iter().flat_map(|r| &r.warnings) {
            if self.format != ReportFormat::Table || cfg.output.is_some() {
                eprintln!("warning: {w}");
            }
        }
        Ok(())
    }
}

fn write_output(path: Option<&Path>, text: &str) -> lclrr::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn image_source(dir: &Path, rate: DownsampleRate) -> DataSource {
    DataSource::ImageDir { path: dir.to_path_buf(), rate, occlusion: None }
}

fn read_labeled(input: &LabeledInput) -> lclrr::Result<Dataset> {
    if let Some(dir) = &input.dir {
        return load_image_dir(dir, input.rate);
    }
    let (Some(data), Some(labels)) = (&input.data, &input.labels) else {
        return Err(Error::invalid("give either --dir or --data with --labels"));
    };
    let x = load_matrix(data)?;
    let text = std::fs::read_to_string(labels).map_err(|e| Error::io(labels, e))?;
    let names: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let classes: Vec<String> =
        names.iter().copied().collect::<BTreeSet<_>>().into_iter().map(String::from).collect();
    let index = names.iter().map(|n| classes.binary_search_by(|c| c.as_str().cmp(n)).unwrap()).collect();
    Dataset::new(x, index, classes, data.display().to_string())
}

fn inspect(path: &Path) -> lclrr::Result<String> {
    if path.is_dir() {
        let m = Model::load(path)?;
        let mut out = format!(
            "model: {} classes ({})\ndictionary: {}x{}\neta: {}\nsolver: lambda={} alpha={} gamma={}\niterations: {} converged: {}\n",
            m.class_ids().len(),
            m.class_ids().join(", "),
            m.dictionary.nrows(),
            m.dictionary.ncols(),
            m.classifier.eta(),
            m.solver.lambda,
            m.solver.alpha,
            m.solver.gamma,
            m.iterations,
            m.converged
        );
        out += "iteration,feasibility,z_j_gap,z_l_gap,mu\n";
        for (k, h) in m.history.iter().enumerate() {
            out += &format!("{},{:.6e},{:.6e},{:.6e},{:.6e}\n", k + 1, h[0], h[1], h[2], h[3]);
        }
        return Ok(out);
    }
    let x = load_matrix(path)?;
    let mut out = format!("shape: {}x{}\nfrobenius: {:.6e}\n", x.nrows(), x.ncols(), fro_norm(&x));
    if !x.is_empty() {
        out += &format!("min: {:.6e}\nmax: {:.6e}\n", x.min(), x.max());
        if x.iter().all(|v| v.is_finite()) {
            let s = singular_values(&x)?;
            let tol = s[0] * 1e-10 * x.nrows().max(x.ncols()) as f64;
            out += &format!(
                "numerical rank: {}\nlargest singular value: {:.6e}\n",
                s.iter().filter(|v| **v > tol).count(),
                s[0]
            );
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> lclrr::Result<()> {
    match cli.command {
        Command::BenchSynth(bench) => {
            let mut cfg = bench.config(None)?;
            if !matches!(cfg.source, DataSource::Synthetic(_)) {
                cfg.source = DataSource::Synthetic(SynthSpec::default());
            }
            let report = run_experiment(&cfg)?;
            bench.emit(&cfg, &[report])
        }
        Command::BenchDir { dir, rate, bench } => {
            let cfg = bench.config(Some(image_source(&dir, rate)))?;
            let report = run_experiment(&cfg)?;
            bench.emit(&cfg, &[report])
        }
        Command::RpcaBench { dir, rate, bench } => {
            let cfg = bench.config(dir.map(|d| image_source(&d, rate)))?;
            let ours = run_experiment(&cfg)?;
            let base = run_rpca_baseline(&cfg)?;
            bench.emit(&cfg, &[ours, base])
        }
        Command::Fit { input, model, common } => {
            let cfg = common.config()?;
            let ds = read_labeled(&input)?;
            let (m, warnings) = fit_dataset(&ds, &cfg)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            m.save(&model)?;
            println!(
                "saved {} ({} atoms, {} iterations, converged: {})",
                model.display(),
                m.dictionary.ncols(),
                m.iterations,
                m.converged
            );
            Ok(())
        }
        Command::Predict { model, data, out } => {
            let m = Model::load(&model)?;
            let x = load_matrix(&data)?;
            let pred = m.predict(&x)?;
            let mut text = String::new();
            for p in pred {
                text.push_str(&m.class_ids()[p]);
                text.push('\n');
            }
            write_output(out.as_deref(), &text)
        }
        Command::Inspect { path } => {
            print!("{}", inspect(&path)?);
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => 1,
        Error::InvalidInput(_) | Error::Format { .. } | Error::Io { .. } => 2,
        Error::Numerical(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
