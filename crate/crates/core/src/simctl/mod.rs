//! Slotted scenario driver: threshold snapshot, user motion, triggered
//! re-placement of the aerial BS, and the metrics and files derived from it.

mod compare;
mod config;
mod metrics;
mod output;
mod scenario;

pub use compare::{
    compare_seeds, pooled_sinr_cdfs, pooled_sinr_medians, run_pair, write_compare_csv,
    write_pooled_cdfs, PairedRun, PairedSummary,
};
pub use config::{BaselineMode, GridSpec, Preset, ScenarioConfig, Solver};
pub use metrics::{
    empirical_cdf_db, sinr_cdf, spectral_efficiency_summary, time_averaged_sinr_db, CdfPoint,
};
pub use output::{
    emit_outputs, write_cdf_csv, write_timing, OutputPaths, RunStats, REWARD_TRACE_CSV,
    SINR_CDF_CSV, SUMMARY_TOML, TIMESLOTS_CSV, TIMING_TOML, USER_SINR_CSV,
};
pub use scenario::{initial_aerial_network, oracle_snapshot, run_scenario, run_scenario_with, ScenarioRun, TimeSlotRecord};
