use std::path::Path;

use serde::Serialize;

use super::config::{BaselineMode, ScenarioConfig};
use super::metrics::{empirical_cdf_db, time_averaged_sinr_db, CdfPoint};
use super::output::write_cdf_csv;
use super::scenario::{run_scenario, ScenarioRun};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::stats::{mean, median};

/// Baseline and aerial runs of one seed, sharing user drops and trajectories.
#[derive(Debug, Clone)]
pub struct PairedRun {
    pub seed: u64,
    pub baseline: ScenarioRun,
    pub aerial: ScenarioRun,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedSummary {
    pub seed: u64,
    /// Slots where the baseline QoS is below the threshold.
    pub below_th_slots: usize,
    pub baseline_qos_below: Option<f64>,
    pub aerial_qos_below: Option<f64>,
    pub baseline_mean_qos: f64,
    pub aerial_mean_qos: f64,
    pub baseline_median_sinr_db: Option<f64>,
    pub aerial_median_sinr_db: Option<f64>,
}

impl PairedSummary {
    /// `Some(true)` when the aerial network does at least as well as the
    /// baseline over the below-threshold slots; `None` if there are none.
    pub fn aerial_holds(&self) -> Option<bool> {
        Some(self.aerial_qos_below? >= self.baseline_qos_below?)
    }
}

impl PairedRun {
    pub fn summary(&self) -> PairedSummary {
        let b = &self.baseline.records;
        let a = &self.aerial.records;
        let below: Vec<usize> = (0..b.len()).filter(|&i| b[i].qos < b[i].qos_th).collect();
        let pick = |recs: &[super::scenario::TimeSlotRecord]| -> Option<f64> {
            (!below.is_empty()).then(|| mean(&below.iter().map(|&i| recs[i].qos).collect::<Vec<_>>()))
        };
        PairedSummary {
            seed: self.seed,
            below_th_slots: below.len(),
            baseline_qos_below: pick(b),
            aerial_qos_below: pick(a),
            baseline_mean_qos: mean(&b.iter().map(|r| r.qos).collect::<Vec<_>>()),
            aerial_mean_qos: mean(&a.iter().map(|r| r.qos).collect::<Vec<_>>()),
            baseline_median_sinr_db: median(&time_averaged_sinr_db(b)),
            aerial_median_sinr_db: median(&time_averaged_sinr_db(a)),
        }
    }
}

pub fn run_pair(cfg: &ScenarioConfig, seed: u64) -> Result<PairedRun> {
    let baseline = run_scenario(&ScenarioConfig {
        seed,
        baseline_mode: BaselineMode::Ground19,
        ..cfg.clone()
    })?;
    let aerial = run_scenario(&ScenarioConfig {
        seed,
        baseline_mode: BaselineMode::Aerial18Plus1,
        ..cfg.clone()
    })?;
    Ok(PairedRun { seed, baseline, aerial })
}

/// Runs baseline and aerial scenarios for every seed. Seeds are independent
/// and may run in parallel; results come back in seed order.
pub fn compare_seeds(cfg: &ScenarioConfig, seeds: &[u64], mode: ExecMode) -> Result<Vec<PairedRun>> {
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("compare needs at least one seed".into()));
    }
    cfg.validate()?;
    mode.map_range(seeds.len(), |i| run_pair(cfg, seeds[i]))
        .into_iter()
        .collect()
}

/// CDFs of per-user time-averaged SINR pooled over all seeds: (baseline, aerial).
pub fn pooled_sinr_cdfs(pairs: &[PairedRun]) -> (Vec<CdfPoint>, Vec<CdfPoint>) {
    let mut b = Vec::new();
    let mut a = Vec::new();
    for p in pairs {
        b.extend(time_averaged_sinr_db(&p.baseline.records));
        a.extend(time_averaged_sinr_db(&p.aerial.records));
    }
    (empirical_cdf_db(&b), empirical_cdf_db(&a))
}

/// Medians of the pooled per-user time-averaged SINR: (baseline, aerial).
pub fn pooled_sinr_medians(pairs: &[PairedRun]) -> (Option<f64>, Option<f64>) {
    let mut b = Vec::new();
    let mut a = Vec::new();
    for p in pairs {
        b.extend(time_averaged_sinr_db(&p.baseline.records));
        a.extend(time_averaged_sinr_db(&p.aerial.records));
    }
    (median(&b), median(&a))
}

pub fn write_compare_csv(summaries: &[PairedSummary], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    let wrap = |e: csv::Error| Error::format(path, e);
    w.write_record([
        "seed",
        "below_th_slots",
        "baseline_qos_below",
        "aerial_qos_below",
        "baseline_mean_qos",
        "aerial_mean_qos",
        "baseline_median_sinr_db",
        "aerial_median_sinr_db",
    ])
    .map_err(wrap)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in summaries {
        w.write_record([
            s.seed.to_string(),
            s.below_th_slots.to_string(),
            opt(s.baseline_qos_below),
            opt(s.aerial_qos_below),
            s.baseline_mean_qos.to_string(),
            s.aerial_mean_qos.to_string(),
            opt(s.baseline_median_sinr_db),
            opt(s.aerial_median_sinr_db),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Pooled CDF tables for a comparison, one file per network.
pub fn write_pooled_cdfs(pairs: &[PairedRun], dir: &Path) -> Result<()> {
    let (b, a) = pooled_sinr_cdfs(pairs);
    write_cdf_csv(&b, &dir.join("sinr_cdf_baseline.csv"))?;
    write_cdf_csv(&a, &dir.join("sinr_cdf_aerial.csv"))
}
