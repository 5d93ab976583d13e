// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 configuration error,
//! 4 internal invariant violation.

mod bench;
mod ingest;
mod output;

pub use bench::{screen_rank_timing, write_timing_tsv};
pub use ingest::{ingest, parse_table, write_series_tsv, IngestError, INPUT_HEADER};
pub use output::{write_segments, SEGMENT_HEADER};

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::diagnostics::{equal_weight_diagnostic, Neighborhood};
use crate::error::SaraError;
use crate::multibandwidth::{
    default_bandwidths, msara_detect, MultiBandConfig, SigmaSource, DEFAULT_THRESHOLD_CONSTANT,
};
use crate::selection::{estimate_sigma, InfoCriterion, SegmentationModel};
use crate::series::Series;
use crate::simulation::{
    self, changepoint_study, generate, simulation3_msara_config, sure_coverage_study,
    theorem1_study, PowerConfig, StudyOptions, TruthSpec, DEFAULT_COVERAGE_PAIRS,
    THEOREM1_SETTINGS,
};

pub const DEFAULT_SEED: u64 = 20120917;

#[derive(Debug, Parser)]
#[command(
    name = "sara",
    version,
    about = "Screening and ranking change-point detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment every label of a `label/position/value` table.
    Detect(DetectArgs),
    /// Run a simulation study or write a synthetic data set.
    Simulate(SimulateArgs),
    /// Time screening and ranking over a grid of series lengths.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Sara,
    Msara,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ThresholdRule {
    /// A fixed lambda given by `--lambda`.
    Fixed,
    /// `C sqrt(2/h) sigma`.
    CSigma,
    /// `2 sqrt(log n) sqrt(2/h) sigma`.
    LogN,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Threshold,
    Bic,
    Mbic,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Segmentation table; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "msara")]
    pub method: Method,
    /// `auto` or a comma-separated list of bandwidths.
    #[arg(long, default_value = "auto")]
    pub bandwidths: String,
    /// Defaults to `c-sigma` for msara and `log-n` for sara.
    #[arg(long, value_enum)]
    pub threshold_rule: Option<ThresholdRule>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "C", default_value_t = DEFAULT_THRESHOLD_CONSTANT)]
    pub c: f64,
    /// Defaults to `mbic` for msara and `threshold` for sara.
    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,
    /// Known noise standard deviation; estimated when omitted.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Directory for `<label>_h<h>.tsv` diagnostic profiles.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
    #[arg(long)]
    pub jmax: Option<usize>,
    /// Screening neighbourhood for the ranking and pooling methods.
    #[arg(long, value_enum, default_value_t = NeighborhoodArg::Half)]
    pub neighborhood: NeighborhoodArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NeighborhoodArg {
    /// Radius h: the strict h-local maximizer rule.
    Bandwidth,
    /// Radius round(h / 2).
    Half,
}

impl From<NeighborhoodArg> for Neighborhood {
    fn from(a: NeighborhoodArg) -> Self {
        match a {
            NeighborhoodArg::Bandwidth => Neighborhood::Bandwidth,
            NeighborhoodArg::Half => Neighborhood::HalfBandwidth,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Study {
    /// Short-segment sure-coverage table.
    Coverage,
    /// Six-change design: model sizes and detection rates.
    Sim3,
    /// Single change-point power curves.
    Power,
    /// Empirical sure coverage against the theoretical lower bound.
    Theorem1,
    /// Write one synthetic series in the input table layout.
    Generate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Trend {
    None,
    Short,
    Long,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Design {
    /// Raised segment of length `--len` in the middle of `--n` points.
    Sim2,
    Sim3,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub study: Study,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Comma-separated noise levels; study-specific default.
    #[arg(long)]
    pub sigmas: Option<String>,
    #[arg(long, value_enum, default_value = "none")]
    pub trend: Trend,
    #[arg(long, value_enum, default_value = "sim3")]
    pub design: Design,
    #[arg(long, default_value_t = 20000)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub len: usize,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "100000,200000,400000")]
    pub n_grid: String,
    #[arg(long, default_value_t = 11)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] IngestError),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Algorithm(SaraError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<SaraError> for CliError {
    fn from(e: SaraError) -> Self {
        match e {
            SaraError::InvalidConfig(m) => CliError::Config(m),
            SaraError::BandwidthNonPositive { .. } | SaraError::BandwidthTooLarge { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Algorithm(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Config(_) => 3,
            CliError::Algorithm(e) => match e {
                SaraError::SeriesTooShort { .. }
                | SaraError::NonFiniteValue { .. }
                | SaraError::PositionsNotIncreasing { .. } => 2,
                _ => 4,
            },
        }
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("invalid {what} {t:?}")))
        })
        .collect()
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// How a single label is segmented, resolved from the flags.
#[derive(Clone, Debug, PartialEq)]
pub enum DetectPlan {
    Threshold {
        bandwidth: Option<usize>,
        rule: ThresholdRule,
        lambda: Option<f64>,
        c: f64,
        sigma: Option<f64>,
    },
    Rank {
        bandwidth: Option<usize>,
        criterion: InfoCriterion,
        jmax: Option<usize>,
        neighborhood: Neighborhood,
    },
    Multi {
        bandwidths: Option<Vec<usize>>,
        rule: ThresholdRule,
        c: f64,
        criterion: InfoCriterion,
        sigma: Option<f64>,
        neighborhood: Neighborhood,
    },
}

impl DetectArgs {
    pub fn plan(&self) -> Result<DetectPlan, CliError> {
        let bandwidths = if self.bandwidths.trim() == "auto" {
            None
        } else {
            Some(parse_list::<usize>(&self.bandwidths, "bandwidth")?)
        };
        if let Some(s) = self.sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(CliError::Config(format!(
                    "--sigma must be positive; got {s}"
                )));
            }
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(CliError::Config(format!(
                "--C must be positive; got {}",
                self.c
            )));
        }
        match self.method {
            Method::Sara => {
                let bandwidth = match bandwidths.as_deref() {
                    None => None,
                    Some([h]) => Some(*h),
                    Some(_) => {
                        return Err(CliError::Config(
                            "--method sara takes exactly one bandwidth".into(),
                        ))
                    }
                };
                match self.criterion.unwrap_or(CriterionArg::Threshold) {
                    CriterionArg::Threshold => {
                        let rule = self.threshold_rule.unwrap_or(ThresholdRule::LogN);
                        if rule == ThresholdRule::Fixed {
                            match self.lambda {
                                Some(l) if l.is_finite() && l >= 0.0 => {}
                                _ => {
                                    return Err(CliError::Config(
                                        "--threshold-rule fixed needs a non-negative --lambda"
                                            .into(),
                                    ))
                                }
                            }
                        }
                        Ok(DetectPlan::Threshold {
                            bandwidth,
                            rule,
                            lambda: self.lambda,
                            c: self.c,
                            sigma: self.sigma,
                        })
                    }
                    CriterionArg::Bic => Ok(DetectPlan::Rank {
                        bandwidth,
                        criterion: InfoCriterion::Bic,
                        jmax: self.jmax,
                        neighborhood: self.neighborhood.into(),
                    }),
                    CriterionArg::Mbic => Ok(DetectPlan::Rank {
                        bandwidth,
                        criterion: InfoCriterion::Mbic,
                        jmax: self.jmax,
                        neighborhood: self.neighborhood.into(),
                    }),
                }
            }
            Method::Msara => {
                let criterion = match self.criterion.unwrap_or(CriterionArg::Mbic) {
                    CriterionArg::Bic => InfoCriterion::Bic,
                    CriterionArg::Mbic => InfoCriterion::Mbic,
                    CriterionArg::Threshold => {
                        return Err(CliError::Config(
                            "--method msara needs --criterion bic or mbic".into(),
                        ))
                    }
                };
                let rule = self.threshold_rule.unwrap_or(ThresholdRule::CSigma);
                if rule == ThresholdRule::Fixed {
                    return Err(CliError::Config(
                        "--method msara scales its thresholds per bandwidth; use c-sigma or log-n"
                            .into(),
                    ));
                }
                Ok(DetectPlan::Multi {
                    bandwidths,
                    rule,
                    c: self.c,
                    criterion,
                    sigma: self.sigma,
                    neighborhood: self.neighborhood.into(),
                })
            }
        }
    }
}

fn auto_single_bandwidth(n: usize) -> Result<usize, SaraError> {
    Ok(default_bandwidths(n)?[0])
}

fn threshold_constant(rule: ThresholdRule, c: f64, n: usize) -> f64 {
    match rule {
        ThresholdRule::LogN => 2.0 * (n as f64).ln().sqrt(),
        _ => c,
    }
}

impl DetectPlan {
    /// Bandwidths whose profiles this plan computes.
    pub fn bandwidths(&self, n: usize) -> Result<Vec<usize>, SaraError> {
        match self {
            DetectPlan::Threshold { bandwidth, .. } | DetectPlan::Rank { bandwidth, .. } => {
                Ok(vec![bandwidth.map_or_else(|| auto_single_bandwidth(n), Ok)?])
            }
            DetectPlan::Multi { bandwidths, .. } => match bandwidths {
                Some(b) => Ok(b.clone()),
                None => default_bandwidths(n),
            },
        }
    }

    pub fn run(&self, series: &Series) -> Result<SegmentationModel, SaraError> {
        let n = series.len();
        match self {
            DetectPlan::Threshold {
                rule,
                lambda,
                c,
                sigma,
                ..
            } => {
                let h = self.bandwidths(n)?[0];
                let lambda = match rule {
                    ThresholdRule::Fixed => lambda.unwrap_or(0.0),
                    _ => {
                        let s = sigma.unwrap_or_else(|| estimate_sigma(series, h));
                        threshold_constant(*rule, *c, n) * (2.0 / h as f64).sqrt() * s
                    }
                };
                crate::pipeline::sara_threshold(series, h, lambda)
            }
            DetectPlan::Rank {
                criterion,
                jmax,
                neighborhood,
                ..
            } => {
                let h = self.bandwidths(n)?[0];
                crate::pipeline::sara_rank(series, h, *criterion, *jmax, *neighborhood)
            }
            DetectPlan::Multi {
                rule,
                c,
                criterion,
                sigma,
                neighborhood,
                ..
            } => {
                let bandwidths = self.bandwidths(n)?;
                let h_min = bandwidths.iter().copied().min().unwrap_or(1);
                let cfg = MultiBandConfig {
                    bandwidths,
                    threshold_constant: threshold_constant(*rule, *c, n),
                    criterion: *criterion,
                    sigma_source: sigma.map_or(SigmaSource::Estimated(h_min), SigmaSource::Known),
                    neighborhood: *neighborhood,
                };
                msara_detect(series, &cfg)
            }
        }
    }
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn run_detect(args: &DetectArgs) -> Result<(), CliError> {
    let plan = args.plan()?;
    let series = ingest(&args.input)?;
    let results: Vec<(Series, SegmentationModel)> = series
        .into_par_iter()
        .map(|s| {
            let m = plan.run(&s)?;
            Ok((s, m))
        })
        .collect::<Result<_, SaraError>>()?;

    if let Some(dir) = &args.profile_out {
        fs::create_dir_all(dir)?;
        for (s, _) in &results {
            for h in plan.bandwidths(s.len())? {
                let profile = equal_weight_diagnostic(s, h)?;
                let name = format!("{}_h{h}.tsv", sanitize(s.label().unwrap_or("series")));
                let mut f = BufWriter::new(File::create(dir.join(name))?);
                profile.write_tsv(&mut f)?;
                f.flush()?;
            }
        }
    }

    let mut out = open_output(args.output.as_deref())?;
    write_segments(&results, &mut out)?;
    out.flush()?;
    Ok(())
}

fn sigmas_or(args: &SimulateArgs, default: &[f64]) -> Result<Vec<f64>, CliError> {
    match &args.sigmas {
        Some(s) => parse_list(s, "sigma"),
        None => Ok(default.to_vec()),
    }
}

fn trend_freq(t: Trend) -> f64 {
    match t {
        Trend::None => 0.0,
        Trend::Short => simulation::SIM3_SHORT_TREND,
        Trend::Long => simulation::SIM3_LONG_TREND,
    }
}

/// Settings for the bound check: `(n, L, sigma)` with `delta = 1`, all
/// satisfying `S^2 > 32 log n`.
pub fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(CliError::Config("--reps must be positive".into()));
    }
    let mut out = open_output(args.output.as_deref())?;
    match args.study {
        Study::Coverage => {
            let sigmas = sigmas_or(args, &[0.5, 0.25])?;
            let rows = sure_coverage_study(
                &DEFAULT_COVERAGE_PAIRS,
                args.delta,
                &sigmas,
                args.reps,
                args.seed,
            )?;
            simulation::write_coverage_table(&rows, &mut out)?;
        }
        Study::Sim3 => {
            let sigma = sigmas_or(args, &[0.2])?[0];
            let template = TruthSpec::simulation3(sigma, trend_freq(args.trend));
            let opts = StudyOptions::new(args.reps, args.seed, 5);
            let mut rows = Vec::new();
            for h in [9, 15, 21] {
                let report = changepoint_study(&template, opts, |s| {
                    crate::pipeline::sara_rank(
                        s,
                        h,
                        InfoCriterion::Mbic,
                        None,
                        Neighborhood::default(),
                    )
                })?;
                rows.push((format!("sara_h{h}"), report));
            }
            let cfg = simulation3_msara_config();
            rows.push((
                "msara".to_string(),
                changepoint_study(&template, opts, |s| msara_detect(s, &cfg))?,
            ));
            simulation::write_model_size_table(&rows, &mut out)?;
            writeln!(out)?;
            simulation::write_detection_table(&rows, &mut out)?;
        }
        Study::Power => {
            let cfg = PowerConfig {
                reps: args.reps,
                calibration_reps: args.reps,
                seed: args.seed,
                ..PowerConfig::default()
            };
            let report = simulation::power_study(&cfg)?;
            simulation::write_power_tsv(&report, &mut out)?;
        }
        Study::Theorem1 => {
            writeln!(out, "n\tL\tdelta\tsigma\th\tlambda\treps\tbound\tempirical")?;
            let rows = theorem1_study(&THEOREM1_SETTINGS, args.delta, args.reps, args.seed)?;
            for r in rows {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.n, r.len, args.delta, r.sigma, r.h, r.lambda, args.reps, r.bound, r.empirical
                )?;
            }
        }
        Study::Generate => {
            let sigma = sigmas_or(args, &[0.2])?[0];
            let spec = match args.design {
                Design::Sim2 => TruthSpec::short_segment(args.n, args.len, args.delta, sigma),
                Design::Sim3 => TruthSpec::simulation3(sigma, trend_freq(args.trend)),
            }
            .with_seed(args.seed);
            let series = generate(&spec)?.with_label("sim");
            write_series_tsv(&[series], &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    let grid: Vec<usize> = parse_list(&args.n_grid, "series length")?;
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|&n| n < 2) {
        return Err(CliError::Config(
            "--n-grid must be increasing, each n >= 2".into(),
        ));
    }
    let rows = screen_rank_timing(&grid, args.reps, args.seed)?;
    let mut out = open_output(args.output.as_deref())?;
    write_timing_tsv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Detect(a) => run_detect(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bench(a) => run_bench(a),
    }
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
