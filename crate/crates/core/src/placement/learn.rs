use std::ops::ControlFlow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{apply_action, reward, select_action, QHyperParams, QTable};
use crate::deployment::PlacementGrid;
use crate::error::{Error, Result};
use crate::radio::{aggregate_qos, NetworkState};

/// Where each learning episode begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeStart {
    /// The state the previous episode ended in (the first episode uses the
    /// aerial BS's physical position).
    #[default]
    Previous,
    /// Always the aerial BS's physical position.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningConfig {
    pub max_episodes: usize,
    pub max_steps: usize,
    /// Multiplier applied to epsilon after every episode.
    pub epsilon_decay: f64,
    pub epsilon_floor: f64,
    #[serde(default)]
    pub episode_start: EpisodeStart,
    /// Seeds fresh tables; a warm-started table keeps its own.
    #[serde(default)]
    pub hyper: QHyperParams,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            max_episodes: 5000,
            max_steps: 40,
            epsilon_decay: 0.999,
            epsilon_floor: 0.01,
            episode_start: EpisodeStart::Previous,
            hyper: QHyperParams::default(),
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        if self.max_episodes == 0 || self.max_steps == 0 {
            return Err(Error::InvalidConfig(
                "max_episodes and max_steps must be positive".into(),
            ));
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon_decay must lie in (0, 1], got {}",
                self.epsilon_decay
            )));
        }
        if !(self.epsilon_floor > 0.0 && self.epsilon_floor <= self.hyper.epsilon) {
            return Err(Error::InvalidConfig(format!(
                "epsilon_floor must lie in (0, epsilon], got {}",
                self.epsilon_floor
            )));
        }
        Ok(())
    }
}

/// Aggregate QoS as a function of aerial grid state on a frozen snapshot.
/// Values are computed on first use and cached; a cached value is exactly the
/// result of `aggregate_qos` for that placement.
#[derive(Debug, Clone)]
pub struct QosLandscape {
    snapshot: NetworkState,
    grid: PlacementGrid,
    cache: Vec<Option<f64>>,
}

impl QosLandscape {
    pub fn new(snapshot: &NetworkState, grid: &PlacementGrid) -> Result<Self> {
        grid.validate()?;
        if snapshot.aerial().is_none() {
            return Err(Error::InvalidConfig(
                "placement needs a snapshot with an aerial BS".into(),
            ));
        }
        Ok(Self {
            snapshot: snapshot.clone(),
            grid: *grid,
            cache: vec![None; grid.n_states()],
        })
    }

    pub fn grid(&self) -> &PlacementGrid {
        &self.grid
    }

    pub fn qos(&mut self, s: usize) -> f64 {
        if let Some(v) = self.cache[s] {
            return v;
        }
        let pos = self
            .grid
            .index_to_position(s)
            .expect("state index within grid");
        self.snapshot
            .move_aerial(pos)
            .expect("grid positions are above ground");
        let v = aggregate_qos(&self.snapshot);
        self.cache[s] = Some(v);
        v
    }

    pub fn evaluated(&self) -> usize {
        self.cache.iter().filter(|v| v.is_some()).count()
    }
}

/// States visited by the greedy policy from `start`, stopping just before the
/// first repeated state or after `max_steps` moves.
pub fn greedy_rollout(q: &QTable, grid: &PlacementGrid, start: usize, max_steps: usize) -> (Vec<usize>, Option<usize>) {
    let mut path = vec![start];
    let mut s = start;
    for _ in 0..max_steps {
        let next = apply_action(s, q.greedy_action(s), grid);
        if let Some(pos) = path.iter().position(|&p| p == next) {
            return (path, Some(pos));
        }
        path.push(next);
        s = next;
    }
    (path, None)
}

/// Where the greedy policy settles from `start`. If the rollout closes a cycle
/// (a wall bump is a cycle of length one) the best-QoS state on that cycle is
/// returned; otherwise the last state reached within `n_x + n_y + n_h` steps.
pub fn greedy_terminal(q: &QTable, landscape: &mut QosLandscape, start: usize) -> usize {
    let grid = *landscape.grid();
    let budget = grid.n_x + grid.n_y + grid.n_h;
    let (path, cycle_start) = greedy_rollout(q, &grid, start, budget);
    match cycle_start {
        Some(c) => {
            let mut best = path[c];
            let mut best_qos = landscape.qos(best);
            for &s in &path[c + 1..] {
                let v = landscape.qos(s);
                if v > best_qos || (v == best_qos && s < best) {
                    best = s;
                    best_qos = v;
                }
            }
            best
        }
        None => *path.last().expect("rollout is never empty"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnOutcome {
    pub best_state: usize,
    pub best_qos: f64,
    /// Net reward of each episode: the sum of its step rewards, which
    /// telescopes to the QoS change between the episode's first and last state.
    pub reward_trace: Vec<f64>,
    /// Reward of every learning step, in order.
    pub step_rewards: Vec<f64>,
    pub episodes_run: usize,
}

/// Runs epsilon-greedy Q-learning on a frozen snapshot, every episode starting
/// from `initial_state`, then returns the greedy policy's settling state.
pub fn learn_placement<R: Rng + ?Sized>(
    initial_state: usize,
    snapshot: &NetworkState,
    q: &mut QTable,
    cfg: &LearningConfig,
    grid: &PlacementGrid,
    rng: &mut R,
) -> Result<LearnOutcome> {
    let mut landscape = QosLandscape::new(snapshot, grid)?;
    learn_placement_monitored(initial_state, &mut landscape, q, cfg, rng, |_, _, _| {
        ControlFlow::Continue(())
    })
}

/// [`learn_placement`] with a callback after every episode; returning
/// `ControlFlow::Break` stops learning early.
pub fn learn_placement_monitored<R, F>(
    initial_state: usize,
    landscape: &mut QosLandscape,
    q: &mut QTable,
    cfg: &LearningConfig,
    rng: &mut R,
    mut monitor: F,
) -> Result<LearnOutcome>
where
    R: Rng + ?Sized,
    F: FnMut(usize, &QTable, &mut QosLandscape) -> ControlFlow<()>,
{
    cfg.validate()?;
    let grid = *landscape.grid();
    if !q.matches(&grid) {
        return Err(Error::InvalidConfig(format!(
            "q-table dimensions {:?} do not match grid {}x{}x{}",
            q.dims, grid.n_x, grid.n_y, grid.n_h
        )));
    }
    if initial_state >= grid.n_states() {
        return Err(Error::StateOutOfRange {
            index: initial_state,
            len: grid.n_states(),
        });
    }

    let mut epsilon = q.hyper.epsilon;
    let mut steps = Vec::with_capacity(cfg.max_episodes * cfg.max_steps);
    let mut trace = Vec::with_capacity(cfg.max_episodes);
    let mut episodes_run = 0;
    let mut s = initial_state;
    for episode in 0..cfg.max_episodes {
        if cfg.episode_start == EpisodeStart::Physical {
            s = initial_state;
        }
        let mut qos_s = landscape.qos(s);
        let mut episode_reward = 0.0;
        for _ in 0..cfg.max_steps {
            let a = select_action(q, s, epsilon, rng);
            let next = apply_action(s, a, &grid);
            let qos_next = landscape.qos(next);
            let r = reward(qos_next, qos_s);
            q.update(s, a, r, next);
            steps.push(r);
            episode_reward += r;
            s = next;
            qos_s = qos_next;
        }
        trace.push(episode_reward);
        epsilon = (epsilon * cfg.epsilon_decay).max(cfg.epsilon_floor.min(q.hyper.epsilon));
        episodes_run = episode + 1;
        if monitor(episode, q, landscape).is_break() {
            break;
        }
    }

    let best_state = greedy_terminal(q, landscape, initial_state);
    Ok(LearnOutcome {
        best_state,
        best_qos: landscape.qos(best_state),
        reward_trace: trace,
        step_rewards: steps,
        episodes_run,
    })
}

/// Number of episodes after which the greedy settling state stays within
/// `rel_tol` of `target_qos` for the rest of the run. Returns `None` when the
/// final policy misses the target.
pub fn episodes_to_target<R: Rng + ?Sized>(
    initial_state: usize,
    landscape: &mut QosLandscape,
    q: &mut QTable,
    cfg: &LearningConfig,
    target_qos: f64,
    rel_tol: f64,
    rng: &mut R,
) -> Result<(Option<usize>, LearnOutcome)> {
    let threshold = target_qos - rel_tol * target_qos.abs();
    let mut last_miss: Option<usize> = None;
    let outcome = learn_placement_monitored(initial_state, landscape, q, cfg, rng, |ep, q, land| {
        let s = greedy_terminal(q, land, initial_state);
        if land.qos(s) < threshold {
            last_miss = Some(ep);
        }
        ControlFlow::Continue(())
    })?;
    let hit = match last_miss {
        None => Some(1),
        Some(ep) if ep + 1 < outcome.episodes_run => Some(ep + 2),
        Some(_) => None,
    };
    Ok((hit, outcome))
}

impl QTable {
    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }
}
