use std::ops::ControlFlow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{BaselineMode, ScenarioConfig, Solver};
use crate::deployment::{drop_users_ppp, hex_layout, PlacementGrid, Position2D, Position3D};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::mobility::{advance_for, spawn_users};
use crate::oracle::{exhaustive_search, OracleResult};
use crate::placement::{learn_placement_monitored, QTable, QosLandscape};
use crate::radio::{aggregate_qos, link_report, AerialBS, NetworkState};

const DROP_STREAM: u64 = 0;
const MOBILITY_STREAM: u64 = 1;
const LEARNING_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSlotRecord {
    /// seconds since the threshold snapshot
    pub t: f64,
    /// bits/s/Hz of the simulated network
    pub qos: f64,
    pub qos_th: f64,
    /// QoS the full ground network would have at this slot; drives the trigger.
    pub qos_ground: f64,
    pub aerial_pos: Option<Position3D>,
    /// Linear SINR per user, in user order.
    pub sinr: Vec<f64>,
    pub learning_triggered: bool,
    pub episodes_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub records: Vec<TimeSlotRecord>,
    /// Per-episode reward of the first learning session, empty if none ran.
    pub reward_trace: Vec<f64>,
    pub learning_sessions: usize,
    /// Q-table after the last session (aerial mode with Q-learning only).
    pub qtable: Option<QTable>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Full ground network at the initial instant, with the users that will move.
fn initial_network(cfg: &ScenarioConfig) -> Result<NetworkState> {
    let ground = hex_layout(cfg.n_rings, &cfg.area, cfg.antenna_height, cfg.ground_tx_power)?;
    let users = drop_users_ppp(cfg.n_users, &cfg.area, &mut stream(cfg.seed, DROP_STREAM));
    NetworkState::new(ground, None, users, cfg.env, cfg.radio)
}

/// Network the aerial run starts from: the configured BS off and the aerial
/// at the grid point nearest that site, lowest altitude.
pub fn initial_aerial_network(cfg: &ScenarioConfig) -> Result<(NetworkState, usize)> {
    cfg.validate()?;
    let grid = cfg.placement_grid()?;
    let mut net = initial_network(cfg)?;
    let off = cfg.disabled_id();
    let site = net.ground_bs()[off].pos;
    let s = grid.nearest_index(&Position3D::new(site.x, site.y, cfg.area.h_min));
    net.set_ground_active(off, false)?;
    net.set_aerial(Some(AerialBS {
        pos: grid.index_to_position(s)?,
        tx_power: cfg.aerial_tx_power,
    }))?;
    Ok((net, s))
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    run_scenario_with(cfg, None)
}

/// Runs the slotted loop. `warm` seeds the Q-table; otherwise learning starts
/// from zeros. The table persists across slots of the run.
pub fn run_scenario_with(cfg: &ScenarioConfig, warm: Option<QTable>) -> Result<ScenarioRun> {
    cfg.validate()?;
    let grid = cfg.placement_grid()?;
    if cfg.solver == Solver::Exhaustive && grid.n_states() > cfg.oracle_state_limit {
        return Err(Error::GridTooLarge {
            states: grid.n_states(),
            limit: cfg.oracle_state_limit,
        });
    }

    let mut full = initial_network(cfg)?;
    let qos_th = aggregate_qos(&full);
    let mut mob_rng = stream(cfg.seed, MOBILITY_STREAM);
    let mut users = spawn_users(full.users(), &cfg.mobility, &mut mob_rng);
    let mut learn_rng = stream(cfg.seed, LEARNING_STREAM);

    let aerial_mode = cfg.baseline_mode == BaselineMode::Aerial18Plus1;
    let (mut assisted, mut s) = if aerial_mode {
        let (net, s) = initial_aerial_network(cfg)?;
        (Some(net), s)
    } else {
        (None, 0)
    };
    let mut q = match (aerial_mode, cfg.solver, warm) {
        (true, Solver::QLearning, Some(q)) => {
            if !q.matches(&grid) {
                return Err(Error::InvalidConfig(format!(
                    "warm-start q-table dimensions {:?} do not match grid {}x{}x{}",
                    q.dims, grid.n_x, grid.n_y, grid.n_h
                )));
            }
            Some(q)
        }
        (true, Solver::QLearning, None) => Some(QTable::new(&grid, cfg.learning.hyper)?),
        _ => None,
    };

    let mut records = Vec::with_capacity(cfg.n_slots() + 1);
    let mut reward_trace = Vec::new();
    let mut sessions = 0;
    for k in 0..=cfg.n_slots() {
        if k > 0 {
            users = advance_for(&users, cfg.t_min, &cfg.mobility, &cfg.area, &mut mob_rng);
            let pos: Vec<Position2D> = users.iter().map(|u| u.pos).collect();
            full.set_users(pos.clone());
            if let Some(net) = assisted.as_mut() {
                net.set_users(pos);
            }
        }
        let qos_ground = aggregate_qos(&full);
        let mut triggered = false;
        let mut episodes_used = 0;
        let serving = match assisted.as_mut() {
            None => &full,
            Some(net) => {
                if qos_ground < qos_th {
                    triggered = true;
                    s = match q.as_mut() {
                        Some(q) => {
                            let mut land = QosLandscape::new(net, &grid)?;
                            let out = learn_placement_monitored(
                                s,
                                &mut land,
                                q,
                                &cfg.learning,
                                &mut learn_rng,
                                |_, _, _| ControlFlow::Continue(()),
                            )?;
                            if sessions == 0 {
                                reward_trace = out.reward_trace;
                            }
                            episodes_used = out.episodes_run;
                            out.best_state
                        }
                        None => exhaustive_search(net, &grid, ExecMode::Sequential)?.best_state,
                    };
                    sessions += 1;
                    net.move_aerial(grid.index_to_position(s)?)?;
                }
                &*net
            }
        };
        let report = link_report(serving);
        records.push(TimeSlotRecord {
            t: k as f64 * cfg.t_min,
            qos: report.total_throughput(),
            qos_th,
            qos_ground,
            aerial_pos: serving.aerial().map(|a| a.pos),
            sinr: report.links.iter().map(|l| l.sinr).collect(),
            learning_triggered: triggered,
            episodes_used,
        });
    }
    Ok(ScenarioRun {
        records,
        reward_trace,
        learning_sessions: sessions,
        qtable: q,
    })
}

/// Exhaustive QoS map of the aerial network at the initial instant.
pub fn oracle_snapshot(cfg: &ScenarioConfig, mode: ExecMode) -> Result<(OracleResult, PlacementGrid)> {
    let grid = cfg.placement_grid()?;
    if grid.n_states() > cfg.oracle_state_limit {
        return Err(Error::GridTooLarge {
            states: grid.n_states(),
            limit: cfg.oracle_state_limit,
        });
    }
    let (net, _) = initial_aerial_network(cfg)?;
    Ok((exhaustive_search(&net, &grid, mode)?, grid))
}
