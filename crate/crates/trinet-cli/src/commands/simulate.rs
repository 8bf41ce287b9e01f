use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;

use trinet::data::Condition;
use trinet::sim::{compare, simulate, PatientEpisode, SimConfig, SimMode, SimResult};

use crate::output::OutputSet;

#[derive(Parser)]
pub struct Args {
    /// Run a single mode: baseline or trinet.
    #[arg(long, conflicts_with = "compare")]
    pub mode: Option<SimMode>,
    /// Run both modes on the same seed and report paired differences.
    #[arg(long, default_value_t = false)]
    pub compare: bool,
    #[arg(long, default_value = "pneumonia")]
    pub condition: Condition,
    /// Result file (structured text).
    #[arg(long)]
    pub out: PathBuf,
    /// Optional per-patient episode log (CSV). With --compare, two files
    /// are written with .baseline.csv / .trinet.csv suffixes.
    #[arg(long)]
    pub episodes_out: Option<PathBuf>,
    /// Flat key=value file applied before any flag overrides. Keys use
    /// the flag names, e.g. `arrival_rate=6`, `pia_mean=1.9`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub arrival_rate: Option<f64>,
    #[arg(long)]
    pub physicians: Option<usize>,
    #[arg(long)]
    pub prevalence: Option<f64>,
    #[arg(long)]
    pub screen_tpr: Option<f64>,
    #[arg(long)]
    pub screen_fpr: Option<f64>,
    #[arg(long)]
    pub false_suspicion_rate: Option<f64>,
    #[arg(long)]
    pub triage_mean: Option<f64>,
    #[arg(long)]
    pub triage_sigma: Option<f64>,
    #[arg(long)]
    pub pia_mean: Option<f64>,
    #[arg(long)]
    pub pia_sigma: Option<f64>,
    #[arg(long)]
    pub review_mean: Option<f64>,
    #[arg(long)]
    pub review_sigma: Option<f64>,
    #[arg(long)]
    pub turnaround_xray_mean: Option<f64>,
    #[arg(long)]
    pub turnaround_xray_sigma: Option<f64>,
    #[arg(long)]
    pub turnaround_urinalysis_mean: Option<f64>,
    #[arg(long)]
    pub turnaround_urinalysis_sigma: Option<f64>,
}

fn apply_key(config: &mut SimConfig, key: &str, value: &str) -> Result<()> {
    let float = || -> Result<f64> {
        value
            .parse()
            .with_context(|| format!("bad numeric value for {key}: {value:?}"))
    };
    match key {
        "seed" => config.seed = value.parse().context("bad seed")?,
        "horizon" => config.horizon_hours = float()?,
        "arrival_rate" => config.arrival_rate_per_hour = float()?,
        "physicians" => config.physicians = value.parse().context("bad physicians")?,
        "prevalence" => config.prevalence = float()?,
        "screen_tpr" => config.screen_tpr = float()?,
        "screen_fpr" => config.screen_fpr = float()?,
        "false_suspicion_rate" => config.false_suspicion_rate = float()?,
        "triage_mean" => config.triage.mean_hours = float()?,
        "triage_sigma" => config.triage.sigma = float()?,
        "pia_mean" => config.pia.mean_hours = float()?,
        "pia_sigma" => config.pia.sigma = float()?,
        "review_mean" => config.review.mean_hours = float()?,
        "review_sigma" => config.review.sigma = float()?,
        "turnaround_xray_mean" => config.turnaround_xray.mean_hours = float()?,
        "turnaround_xray_sigma" => config.turnaround_xray.sigma = float()?,
        "turnaround_urinalysis_mean" => config.turnaround_urinalysis.mean_hours = float()?,
        "turnaround_urinalysis_sigma" => config.turnaround_urinalysis.sigma = float()?,
        other => bail!("unknown simulation config key: {other}"),
    }
    Ok(())
}

fn build_config(args: &Args) -> Result<SimConfig> {
    let mut config = SimConfig::default_for(args.condition);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not key=value: {line:?}", i + 1);
            };
            apply_key(&mut config, key.trim(), value.trim())?;
        }
    }
    macro_rules! flag {
        ($field:expr, $value:expr) => {
            if let Some(v) = $value {
                $field = v;
            }
        };
    }
    flag!(config.seed, args.seed);
    flag!(config.horizon_hours, args.horizon);
    flag!(config.arrival_rate_per_hour, args.arrival_rate);
    flag!(config.physicians, args.physicians);
    flag!(config.prevalence, args.prevalence);
    flag!(config.screen_tpr, args.screen_tpr);
    flag!(config.screen_fpr, args.screen_fpr);
    flag!(config.false_suspicion_rate, args.false_suspicion_rate);
    flag!(config.triage.mean_hours, args.triage_mean);
    flag!(config.triage.sigma, args.triage_sigma);
    flag!(config.pia.mean_hours, args.pia_mean);
    flag!(config.pia.sigma, args.pia_sigma);
    flag!(config.review.mean_hours, args.review_mean);
    flag!(config.review.sigma, args.review_sigma);
    flag!(config.turnaround_xray.mean_hours, args.turnaround_xray_mean);
    flag!(config.turnaround_xray.sigma, args.turnaround_xray_sigma);
    flag!(
        config.turnaround_urinalysis.mean_hours,
        args.turnaround_urinalysis_mean
    );
    flag!(
        config.turnaround_urinalysis.sigma,
        args.turnaround_urinalysis_sigma
    );
    Ok(config)
}

fn result_block(text: &mut String, label: &str, result: &SimResult) {
    let _ = writeln!(text, "{label}:");
    let _ = writeln!(text, "  episodes: {}", result.episodes);
    let _ = writeln!(text, "  mean_los_hours: {:.6}", result.mean_los_hours);
    let _ = writeln!(text, "  p90_los_hours: {:.6}", result.p90_los_hours);
    let _ = writeln!(text, "  tests_ordered: {}", result.tests_ordered);
    let _ = writeln!(text, "  unnecessary_tests: {}", result.unnecessary_tests);
}

fn episodes_csv(episodes: &[PatientEpisode]) -> String {
    let mut csv = String::from(
        "patient,arrival,triage_done,pia_start,pia_done,test_ordered,test_done,departure,\
         length_of_stay,truly_positive,screened_positive\n",
    );
    let opt = |v: Option<f64>| match v {
        Some(x) => format!("{x:.6}"),
        None => String::new(),
    };
    for (i, e) in episodes.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{:.6},{:.6},{:.6},{:.6},{},{},{:.6},{:.6},{},{}",
            e.arrival,
            e.triage_done,
            e.pia_start,
            e.pia_done,
            opt(e.test_ordered),
            opt(e.test_done),
            e.departure,
            e.length_of_stay(),
            e.truly_positive as u8,
            e.screened_positive as u8
        );
    }
    csv
}

fn config_lines(text: &mut String, config: &SimConfig) {
    let _ = writeln!(text, "config:");
    let _ = writeln!(text, "  condition: {}", config.condition);
    let _ = writeln!(text, "  seed: {}", config.seed);
    let _ = writeln!(text, "  horizon_hours: {}", config.horizon_hours);
    let _ = writeln!(text, "  arrival_rate_per_hour: {}", config.arrival_rate_per_hour);
    let _ = writeln!(text, "  physicians: {}", config.physicians);
    let _ = writeln!(text, "  prevalence: {}", config.prevalence);
    let _ = writeln!(text, "  screen_tpr: {}", config.screen_tpr);
    let _ = writeln!(text, "  screen_fpr: {}", config.screen_fpr);
    let _ = writeln!(text, "  false_suspicion_rate: {}", config.false_suspicion_rate);
}

pub fn run(args: Args) -> Result<()> {
    let config = build_config(&args)?;
    let mut out = OutputSet::new("simulate");
    if let Some(path) = &args.config {
        out.input(path)?;
    }
    out.seed(config.seed)
        .config("condition", args.condition)
        .config("compare", args.compare);

    let mut text = String::new();
    config_lines(&mut text, &config);
    let _ = writeln!(text);

    if args.compare {
        let report = compare(&config)?;
        result_block(&mut text, "baseline", &report.baseline);
        let _ = writeln!(text);
        result_block(&mut text, "trinet", &report.trinet);
        let _ = writeln!(text);
        let _ = writeln!(text, "paired differences (baseline - trinet):");
        let _ = writeln!(text, "  mean_los_delta_hours: {:.6}", report.mean_los_delta_hours);
        let _ = writeln!(text, "  p90_los_delta_hours: {:.6}", report.p90_los_delta_hours);
        let _ = writeln!(text, "  extra_tests: {}", report.extra_tests);
        let improved = report
            .per_episode_delta_hours
            .iter()
            .filter(|&&d| d > 1e-12)
            .count();
        let _ = writeln!(text, "  episodes_improved: {improved}");

        if let Some(base) = &args.episodes_out {
            let (_, baseline_eps) = simulate(&config, SimMode::Baseline)?;
            let (_, trinet_eps) = simulate(&config, SimMode::Trinet)?;
            out.file(
                with_suffix(base, "baseline"),
                episodes_csv(&baseline_eps).into_bytes(),
            );
            out.file(
                with_suffix(base, "trinet"),
                episodes_csv(&trinet_eps).into_bytes(),
            );
        }
    } else {
        let Some(mode) = args.mode else {
            bail!("pass either --mode baseline|trinet or --compare");
        };
        let (result, episodes) = simulate(&config, mode)?;
        let label = match mode {
            SimMode::Baseline => "baseline",
            SimMode::Trinet => "trinet",
        };
        result_block(&mut text, label, &result);
        if let Some(path) = &args.episodes_out {
            out.file(path.clone(), episodes_csv(&episodes).into_bytes());
        }
    }

    out.file(args.out.clone(), text.into_bytes());
    let manifest = args.out.with_file_name(format!(
        "{}.manifest.json",
        args.out.file_name().unwrap_or_default().to_string_lossy()
    ));
    out.commit(&manifest)?;
    Ok(())
}

fn with_suffix(path: &std::path::Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("episodes");
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}.{suffix}.{ext}"))
}
