use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use aerial_placement::placement::QTable;
use aerial_placement::simctl::{
    compare_seeds, emit_outputs, oracle_snapshot, pooled_sinr_medians, run_scenario_with,
    write_compare_csv, write_pooled_cdfs, write_timing, BaselineMode, Preset, RunStats,
    ScenarioConfig, Solver,
};
use aerial_placement::ExecMode;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aerial-placement", version, about = "Aerial base station placement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV tables and summary.
    Run {
        #[command(flatten)]
        common: Common,
        /// Warm-start the Q-table from this file.
        #[arg(long)]
        qtable_in: Option<PathBuf>,
        /// Save the final Q-table here.
        #[arg(long)]
        qtable_out: Option<PathBuf>,
    },
    /// Exhaustive QoS map over the placement grid at the initial instant.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Paired ground-only versus aerial-assisted runs over several seeds.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Number of consecutive seeds, starting at the configured seed.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        /// Run seeds one after another instead of in parallel.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct Common {
    /// TOML file layered over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PresetArg::Paper)]
    preset: PresetArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "AERIAL_PLACEMENT_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Paper,
    Desk,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ground19,
    Aerial18plus1,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    QLearning,
    Exhaustive,
}

impl Common {
    /// Preset, then the config file, then flags.
    fn scenario(&self) -> Result<ScenarioConfig> {
        let preset = match self.preset {
            PresetArg::Paper => Preset::Paper,
            PresetArg::Desk => Preset::Desk,
        };
        let mut cfg = ScenarioConfig::preset(preset);
        if let Some(path) = &self.config {
            cfg = ScenarioConfig::load(&cfg, path)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(mode) = self.mode {
            cfg.baseline_mode = match mode {
                ModeArg::Ground19 => BaselineMode::Ground19,
                ModeArg::Aerial18plus1 => BaselineMode::Aerial18Plus1,
            };
        }
        if let Some(solver) = self.solver {
            cfg.solver = match solver {
                SolverArg::QLearning => Solver::QLearning,
                SolverArg::Exhaustive => Solver::Exhaustive,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn run(common: &Common, qtable_in: Option<&Path>, qtable_out: Option<&Path>) -> Result<()> {
    let cfg = common.scenario()?;
    let warm = qtable_in.map(QTable::load).transpose()?;
    create_dir(&common.out_dir)?;
    let t0 = Instant::now();
    let run = run_scenario_with(&cfg, warm)?;
    let elapsed = t0.elapsed();
    let paths = emit_outputs(&run, &cfg, &common.out_dir)?;
    write_timing(&common.out_dir, elapsed)?;
    if let Some(path) = qtable_out {
        match &run.qtable {
            Some(q) => q.save(path)?,
            None => bail!("no q-table to save: the run neither used nor learned one"),
        }
    }
    let stats = RunStats::from_run(&run);
    println!(
        "seed {}: {} slots, {} triggered, mean QoS {:.3} (threshold {:.3}) -> {}",
        cfg.seed,
        stats.slots,
        stats.triggered_slots,
        stats.mean_qos.unwrap_or(0.0),
        stats.qos_th.unwrap_or(0.0),
        paths.summary.display()
    );
    Ok(())
}

fn oracle(common: &Common) -> Result<()> {
    let cfg = common.scenario()?;
    create_dir(&common.out_dir)?;
    let (res, grid) = oracle_snapshot(&cfg, ExecMode::Parallel)?;
    let path = common.out_dir.join("oracle.csv");
    res.write_csv(&grid, &path)?;
    let p = grid.index_to_position(res.best_state)?;
    println!(
        "best state {} at ({}, {}, {}) with QoS {:.3} over {} states -> {}",
        res.best_state,
        p.x,
        p.y,
        p.h,
        res.best_qos,
        grid.n_states(),
        path.display()
    );
    Ok(())
}

fn compare(common: &Common, n_seeds: u64, sequential: bool) -> Result<()> {
    let cfg = common.scenario()?;
    if n_seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let seeds: Vec<u64> = (0..n_seeds).map(|i| cfg.seed.wrapping_add(i)).collect();
    let mode = if sequential { ExecMode::Sequential } else { ExecMode::Parallel };
    create_dir(&common.out_dir)?;
    let t0 = Instant::now();
    let pairs = compare_seeds(&cfg, &seeds, mode)?;
    let elapsed = t0.elapsed();

    let mut summaries = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        let seed_dir = common.out_dir.join(format!("seed_{}", pair.seed));
        let seeded = ScenarioConfig { seed: pair.seed, ..cfg.clone() };
        emit_outputs(
            &pair.baseline,
            &ScenarioConfig { baseline_mode: BaselineMode::Ground19, ..seeded.clone() },
            &seed_dir.join("ground"),
        )?;
        emit_outputs(
            &pair.aerial,
            &ScenarioConfig { baseline_mode: BaselineMode::Aerial18Plus1, ..seeded },
            &seed_dir.join("aerial"),
        )?;
        summaries.push(pair.summary());
    }
    write_compare_csv(&summaries, &common.out_dir.join("compare.csv"))?;
    write_pooled_cdfs(&pairs, &common.out_dir)?;
    write_timing(&common.out_dir, elapsed)?;

    let holds: Vec<bool> = summaries.iter().filter_map(|s| s.aerial_holds()).collect();
    let (mb, ma) = pooled_sinr_medians(&pairs);
    println!(
        "{} seeds: aerial >= ground below threshold in {}/{}; median user SINR {:.2} dB vs {:.2} dB",
        pairs.len(),
        holds.iter().filter(|&&h| h).count(),
        holds.len(),
        ma.unwrap_or(f64::NAN),
        mb.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            common,
            qtable_in,
            qtable_out,
        } => run(common, qtable_in.as_deref(), qtable_out.as_deref()),
        Command::Oracle { common } => oracle(common),
        Command::Compare {
            common,
            seeds,
            sequential,
        } => compare(common, *seeds, *sequential),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
