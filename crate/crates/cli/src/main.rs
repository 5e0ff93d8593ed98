use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opshape::analysis::{axes, diagnose, register};
use opshape::error::CliError;
use opshape::input::parse_landmarks;
use opshape::mc::{compare_with_bootstrap, coverage, CoverageParams};
use opshape::output::{self, emit_outputs, landmarks_csv, write_json};
use opshape::{run_analysis, StudyConfig};
use opshape_core::synth::{synthetic_study, tangent_gaussian_sample, StudyParams};
use opshape_core::{vw, ReductionRule, SplitMix64};

/// Oriented projective shape coplanarity analysis of landmark images.
#[derive(Parser)]
#[command(name = "opshape", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: OPS test, PS comparator, diagnostics, reduced sample.
    Analyze {
        #[command(flatten)]
        study: StudyArgs,
        /// Output directory.
        #[arg(long, default_value = "opshape-out")]
        out: PathBuf,
    },
    /// Leave-one-out table and greedy reduction only.
    Reduce {
        #[command(flatten)]
        study: StudyArgs,
        #[arg(long, default_value = "opshape-out")]
        out: PathBuf,
    },
    /// Veronese-Whitney (sign-blind) comparator only; JSON to stdout or --out.
    Vw {
        #[command(flatten)]
        study: StudyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Images of one random planar (or perturbed) scene, as landmark CSV.
    Synth {
        #[arg(long, default_value_t = 5)]
        landmarks: usize,
        #[arg(long, default_value_t = 41)]
        cameras: usize,
        /// Out-of-plane offset of landmarks outside the frame.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Standard deviation of image-plane noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo coverage of the delta-method interval and a bootstrap check of its SE.
    Mc {
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        replications: usize,
        #[arg(long, default_value_t = 1_000_000)]
        reference_draws: usize,
        #[arg(long, default_value_t = 2000)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    MaximizeLower,
    MinimizeLower,
}

#[derive(Args)]
struct StudyArgs {
    /// Landmark CSV with header scene,landmark,x,y.
    input: PathBuf,
    /// Frame labels in frame order.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,3")]
    frame: Vec<usize>,
    /// Labels registered against the frame.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    remaining: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Level of the interval driving the greedy reduction.
    #[arg(long, default_value_t = 0.05)]
    alpha_ref: f64,
    /// Degrees of freedom of the chi-square reference (default m·q).
    #[arg(long)]
    df: Option<usize>,
    /// Cap on greedy removals (default ⌊n/4⌋).
    #[arg(long)]
    max_removals: Option<usize>,
    /// Which deletion the greedy reduction takes at each step.
    #[arg(long, value_enum, default_value = "maximize-lower")]
    rule: Rule,
    /// Drop scenes whose frame is degenerate instead of aborting.
    #[arg(long)]
    skip_degenerate: bool,
    /// Exit with status 4 on any statistical degeneracy.
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

impl StudyArgs {
    fn config(&self, out: Option<PathBuf>) -> StudyConfig {
        StudyConfig {
            frame_labels: self.frame.clone(),
            remaining_labels: self.remaining.clone(),
            alpha: self.alpha,
            alpha_ref: self.alpha_ref,
            df_override: self.df,
            max_removals: self.max_removals,
            reduction_rule: match self.rule {
                Rule::MaximizeLower => ReductionRule::MaximizeLower,
                Rule::MinimizeLower => ReductionRule::MinimizeLower,
            },
            skip_degenerate: self.skip_degenerate,
            strict: self.strict,
            seed: self.seed,
            input: self.input.clone(),
            out,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("opshape: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::io(path)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(CliError::io("<stdout>")),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze { study, out } => {
            let config = study.config(Some(out.clone()));
            let report = run_analysis(&config)?;
            emit_outputs(&report, &out)?;
            let s = &report.full.summary;
            println!(
                "n = {}  tS = {:.4}  SE = {:.4}  CI = [{:.4}, {:.4}]  T = {:.4}  p = {:.4}  reject = {}",
                s.n, s.total_variance, s.se, s.ci_lower, s.ci_upper, s.t_statistic, s.p_chisq, report.full.reject_ci
            );
            if let Some(d) = &report.diagnostics {
                let r = &d.reduced.summary;
                println!(
                    "removed {:?} ({:?})  n = {}  tS = {:.4}  CI = [{:.4}, {:.4}]  p = {:.4}  reject = {}",
                    d.removed_scene_ids,
                    d.reduction.stopped_reason,
                    r.n,
                    r.total_variance,
                    r.ci_lower,
                    r.ci_upper,
                    r.p_chisq,
                    d.reduced.reject_ci
                );
            }
            for w in &report.provenance.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Reduce { study, out } => {
            let config = study.config(Some(out.clone()));
            config.validate()?;
            let input = parse_landmarks(&config.input)?;
            let reg = register(&input.scenes, &config)?;
            let d = diagnose(&reg.sample, &config)?.ok_or(CliError::Stats(
                opshape_core::StatsError::InsufficientSample { needed: 3, found: reg.sample.n() },
            ))?;
            std::fs::create_dir_all(&out).map_err(CliError::io(&out))?;
            write_json(&d.reduction, &out.join("reduction.json"))?;
            let path = out.join(output::LOO_TABLE);
            std::fs::write(&path, output::loo_table_csv(&d.leave_one_out)).map_err(CliError::io(&path))?;
            println!("removed {:?} ({:?})", d.removed_scene_ids, d.reduction.stopped_reason);
            Ok(())
        }
        Command::Vw { study, out } => {
            let config = study.config(None);
            config.validate()?;
            let input = parse_landmarks(&config.input)?;
            let reg = register(&input.scenes, &config)?;
            let summary = vw::total_variance_ps(&axes(&reg.sample))?;
            match out {
                Some(path) => write_json(&summary, &path),
                None => {
                    println!("{}", serde_json::to_string_pretty(&summary).expect("finite summary"));
                    Ok(())
                }
            }
        }
        Command::Synth { landmarks, cameras, delta, noise, seed, out } => {
            let params = StudyParams { landmarks, cameras, delta, image_noise: noise, seed, ..StudyParams::default() };
            let (_, images) = synthetic_study(&params)?;
            emit(&landmarks_csv(&images), out.as_ref())
        }
        Command::Mc { sigma, n, replications, reference_draws, bootstrap, alpha, seed, out } => {
            let params =
                CoverageParams { sigma, n, replications, reference_draws, alpha, seed, ..CoverageParams::default() };
            let cov = coverage(&params)?;
            let fixed =
                tangent_gaussian_sample(&params.direction, sigma, n, SplitMix64::stream(seed, u64::MAX).next_u64())?;
            let boot = compare_with_bootstrap(&fixed, bootstrap, seed)?;
            let doc = serde_json::json!({ "coverage": cov, "bootstrap": boot });
            emit(&(serde_json::to_string_pretty(&doc).expect("finite results") + "\n"), out.as_ref())
        }
    }
}
