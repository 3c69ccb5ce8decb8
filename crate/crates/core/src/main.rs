use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use smoothed_rp::harness::seeding::{substream, TAG_GEN};
use smoothed_rp::harness::{run_experiment, ExperimentConfig, ExperimentKind, HarnessError, Sizes};
use smoothed_rp::{hard_instance, sample_uniform_profile, HardFamilyParams, NormKind, RpMode};

#[derive(Parser)]
#[command(name = "smoothed-rp", version, about = "Random priority approximation-ratio experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated profile as CSV
    Gen(GenArgs),
    /// Average-case ratio E[OPT/RP] over uniform profiles
    Avg(RunArgs),
    /// Smoothed ratio of a base profile under perturbation
    Smooth(RunArgs),
    /// Ratio of expectations E[OPT]/E[RP] alongside the average-case ratio
    Bayes(RunArgs),
    /// Hard-family ratio across sizes and its growth exponent
    Worst(RunArgs),
    /// Evaluate the closed-form bounds
    Bounds(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Uniform,
    Hard,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hard,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = HardFamilyParams::DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; flags given here override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    instances: Option<usize>,
    /// exact or sampled:M
    #[arg(long)]
    rp: Option<RpMode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// fro, max or p:P
    #[arg(long)]
    norm: Option<NormKind>,
    #[arg(long)]
    perturbations: Option<usize>,
    #[arg(long, conflicts_with = "family")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    c_wc: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn into_config(self, kind: ExperimentKind) -> Result<ExperimentConfig, HarnessError> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => {
                let out = self.out.clone().ok_or_else(|| HarnessError::ConfigInvalid("out_dir".into()))?;
                ExperimentConfig::new(kind, out)
            }
        };
        config.kind = kind;
        if let Some(sizes) = self.sizes {
            config.n = Some(Sizes::Many(sizes));
        } else if let Some(n) = self.n {
            config.n = Some(Sizes::One(n));
        }
        if let Some(out) = self.out {
            config.out_dir = out;
        }
        if self.family.is_some() {
            config.input = None;
        }
        config.instances = self.instances.or(config.instances);
        config.rp_mode = self.rp.or(config.rp_mode);
        config.seed = self.seed.unwrap_or(config.seed);
        config.eps = self.eps.unwrap_or(config.eps);
        config.sigma = self.sigma.or(config.sigma);
        config.norm_kind = self.norm.unwrap_or(config.norm_kind);
        config.perturbations = self.perturbations.or(config.perturbations);
        config.input = self.input.or(config.input);
        config.c = self.c.or(config.c);
        config.c_wc = self.c_wc.or(config.c_wc);
        config.workers = self.workers.or(config.workers);
        Ok(config)
    }
}

fn generate(args: GenArgs) -> Result<(), HarnessError> {
    let profile = match args.kind {
        GenKind::Uniform => sample_uniform_profile(args.n, &mut substream(args.seed, TAG_GEN, 0))?,
        GenKind::Hard => hard_instance(HardFamilyParams::new(args.n, args.eps)?)?,
    };
    fs::write(&args.out, profile.to_csv()).map_err(|_| HarnessError::IoError(args.out.clone()))
}

fn run(command: Command) -> Result<(), HarnessError> {
    let (kind, args) = match command {
        Command::Gen(args) => return generate(args),
        Command::Avg(a) => (ExperimentKind::Average, a),
        Command::Smooth(a) => (ExperimentKind::Smoothed, a),
        Command::Bayes(a) => (ExperimentKind::Bayesian, a),
        Command::Worst(a) => (ExperimentKind::Worstfamily, a),
        Command::Bounds(a) => (ExperimentKind::Bounds, a),
    };
    let config = args.into_config(kind)?;
    let output = run_experiment(&config)?;
    println!("{}", output.report_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // parameter problems exit with 2, file system failures with 3
            ExitCode::from(if matches!(e, HarnessError::IoError(_)) { 3 } else { 2 })
        }
    }
}
