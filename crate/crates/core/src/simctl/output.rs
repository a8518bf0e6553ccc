use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use super::config::ScenarioConfig;
use super::metrics::{sinr_cdf, spectral_efficiency_summary, time_averaged_sinr_db, CdfPoint};
use super::scenario::ScenarioRun;
use crate::error::{Error, Result};
use crate::stats::median;

pub const TIMESLOTS_CSV: &str = "timeslots.csv";
pub const SINR_CDF_CSV: &str = "sinr_cdf.csv";
pub const REWARD_TRACE_CSV: &str = "reward_trace.csv";
pub const USER_SINR_CSV: &str = "user_sinr.csv";
pub const SUMMARY_TOML: &str = "summary.toml";
/// Wall-clock time lives apart from the summary so the summary stays reproducible.
pub const TIMING_TOML: &str = "timing.toml";

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub timeslots: PathBuf,
    pub sinr_cdf: PathBuf,
    pub reward_trace: PathBuf,
    pub user_sinr: PathBuf,
    pub summary: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub slots: usize,
    pub triggered_slots: usize,
    pub learning_sessions: usize,
    pub episodes_total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qos_th: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_qos: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_qos: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_qos: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_spectral_efficiency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_user_sinr_db: Option<f64>,
}

impl RunStats {
    pub fn from_run(run: &ScenarioRun) -> Self {
        let r = &run.records;
        let qos: Vec<f64> = r.iter().map(|x| x.qos).collect();
        Self {
            slots: r.len(),
            triggered_slots: r.iter().filter(|x| x.learning_triggered).count(),
            learning_sessions: run.learning_sessions,
            episodes_total: r.iter().map(|x| x.episodes_used).sum(),
            qos_th: r.first().map(|x| x.qos_th),
            mean_qos: (!qos.is_empty()).then(|| qos.iter().sum::<f64>() / qos.len() as f64),
            min_qos: qos.iter().copied().reduce(f64::min),
            final_qos: qos.last().copied(),
            mean_spectral_efficiency: spectral_efficiency_summary(r),
            median_user_sinr_db: median(&time_averaged_sinr_db(r)),
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    stats: RunStats,
    config: &'a ScenarioConfig,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    let wrap = |e: csv::Error| Error::format(path, e);
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_cdf_csv(cdf: &[CdfPoint], path: &Path) -> Result<()> {
    write_rows(
        path,
        &["sinr_db", "cdf"],
        cdf.iter().map(|p| vec![p.sinr_db.to_string(), p.cdf.to_string()]),
    )
}

/// Writes the CSV tables and the summary for one run into `dir`, creating it
/// if needed. Output depends only on `run` and `cfg`.
pub fn emit_outputs(run: &ScenarioRun, cfg: &ScenarioConfig, dir: &Path) -> Result<OutputPaths> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = OutputPaths {
        timeslots: dir.join(TIMESLOTS_CSV),
        sinr_cdf: dir.join(SINR_CDF_CSV),
        reward_trace: dir.join(REWARD_TRACE_CSV),
        user_sinr: dir.join(USER_SINR_CSV),
        summary: dir.join(SUMMARY_TOML),
    };

    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    write_rows(
        &paths.timeslots,
        &["t", "qos", "qos_th", "aerial_x", "aerial_y", "aerial_h", "triggered"],
        run.records.iter().map(|r| {
            vec![
                r.t.to_string(),
                r.qos.to_string(),
                r.qos_th.to_string(),
                opt(r.aerial_pos.map(|p| p.x)),
                opt(r.aerial_pos.map(|p| p.y)),
                opt(r.aerial_pos.map(|p| p.h)),
                r.learning_triggered.to_string(),
            ]
        }),
    )?;
    write_cdf_csv(&sinr_cdf(&run.records), &paths.sinr_cdf)?;
    write_rows(
        &paths.reward_trace,
        &["iteration", "reward"],
        run.reward_trace
            .iter()
            .enumerate()
            .map(|(i, r)| vec![i.to_string(), r.to_string()]),
    )?;
    write_rows(
        &paths.user_sinr,
        &["t", "user", "sinr"],
        run.records.iter().flat_map(|r| {
            r.sinr
                .iter()
                .enumerate()
                .map(move |(u, s)| vec![r.t.to_string(), u.to_string(), s.to_string()])
        }),
    )?;

    let summary = Summary {
        seed: cfg.seed,
        stats: RunStats::from_run(run),
        config: cfg,
    };
    let text = toml::to_string(&summary).map_err(|e| Error::format(&paths.summary, e))?;
    fs::write(&paths.summary, text).map_err(|e| Error::io(&paths.summary, e))?;
    Ok(paths)
}

pub fn write_timing(dir: &Path, elapsed: Duration) -> Result<PathBuf> {
    let path = dir.join(TIMING_TOML);
    let text = format!("wall_clock_seconds = {}\n", elapsed.as_secs_f64());
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
