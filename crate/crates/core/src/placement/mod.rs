//! Tabular Q-learning over the placement grid. The aerial BS moves one grid
//! step per action; the reward is the change in aggregate QoS.

mod learn;
mod qtable;

pub use learn::{
    episodes_to_target, greedy_rollout, greedy_terminal, learn_placement,
    learn_placement_monitored, EpisodeStart, LearnOutcome, LearningConfig, QosLandscape,
};
pub use qtable::{AlphaSchedule, QHyperParams, QTable, UpdateRule};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::deployment::PlacementGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
    PlusH,
    MinusH,
}

impl Action {
    pub const COUNT: usize = 6;

    /// Canonical order, also the greedy tie-break order.
    pub const ALL: [Action; 6] = [
        Action::PlusX,
        Action::MinusX,
        Action::PlusY,
        Action::MinusY,
        Action::PlusH,
        Action::MinusH,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn inverse(self) -> Action {
        match self {
            Action::PlusX => Action::MinusX,
            Action::MinusX => Action::PlusX,
            Action::PlusY => Action::MinusY,
            Action::MinusY => Action::PlusY,
            Action::PlusH => Action::MinusH,
            Action::MinusH => Action::PlusH,
        }
    }
}

/// Neighbouring state one grid step along the action's axis; moves that would
/// leave the grid keep the current state.
pub fn apply_action(s: usize, a: Action, grid: &PlacementGrid) -> usize {
    let (ix, iy, ih) = grid.coords(s);
    let step = |i: usize, n: usize, up: bool| -> usize {
        if up {
            if i + 1 < n {
                i + 1
            } else {
                i
            }
        } else {
            i.saturating_sub(1)
        }
    };
    let (ix, iy, ih) = match a {
        Action::PlusX => (step(ix, grid.n_x, true), iy, ih),
        Action::MinusX => (step(ix, grid.n_x, false), iy, ih),
        Action::PlusY => (ix, step(iy, grid.n_y, true), ih),
        Action::MinusY => (ix, step(iy, grid.n_y, false), ih),
        Action::PlusH => (ix, iy, step(ih, grid.n_h, true)),
        Action::MinusH => (ix, iy, step(ih, grid.n_h, false)),
    };
    grid.index(ix, iy, ih)
}

/// Reward for moving from a configuration with `qos_prev` to one with `qos_t`.
pub fn reward(qos_t: f64, qos_prev: f64) -> f64 {
    qos_t - qos_prev
}

/// Epsilon-greedy: uniform random action with probability `epsilon`,
/// otherwise the greedy action of row `s`.
pub fn select_action<R: Rng + ?Sized>(q: &QTable, s: usize, epsilon: f64, rng: &mut R) -> Action {
    if rng.gen::<f64>() < epsilon {
        Action::ALL[rng.gen_range(0..Action::COUNT)]
    } else {
        q.greedy_action(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::ServiceArea;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> PlacementGrid {
        PlacementGrid::new(ServiceArea::default(), 5, 4, 3).unwrap()
    }

    #[test]
    fn boundary_moves_clamp() {
        let g = grid();
        let s = g.index(0, 2, 1);
        assert_eq!(apply_action(s, Action::MinusX, &g), s);
        let corner = g.index(4, 3, 2);
        for a in [Action::PlusX, Action::PlusY, Action::PlusH] {
            assert_eq!(apply_action(corner, a, &g), corner);
        }
        assert_eq!(apply_action(0, Action::MinusH, &g), 0);
    }

    #[test]
    fn interior_moves_invert() {
        let g = grid();
        let s = g.index(2, 1, 1);
        for a in Action::ALL {
            let n = apply_action(s, a, &g);
            assert_ne!(n, s);
            assert_eq!(apply_action(n, a.inverse(), &g), s);
        }
        assert_eq!(g.coords(apply_action(s, Action::PlusH, &g)), (2, 1, 2));
    }

    #[test]
    fn reward_examples() {
        assert_eq!(reward(10.0, 10.0), 0.0);
        assert_eq!(reward(12.5, 10.0), 2.5);
    }

    #[test]
    fn greedy_selection() {
        let g = grid();
        let mut q = QTable::new(&g, QHyperParams::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_action(&q, 3, 0.0, &mut rng), Action::PlusX);
        q.set(3, Action::MinusY, 1.0);
        assert_eq!(select_action(&q, 3, 0.0, &mut rng), Action::MinusY);
    }

    #[test]
    fn full_exploration_is_uniform() {
        let g = grid();
        let mut q = QTable::new(&g, QHyperParams::default()).unwrap();
        q.set(0, Action::PlusH, 100.0);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 60_000;
        let mut counts = [0usize; 6];
        for _ in 0..n {
            counts[select_action(&q, 0, 1.0, &mut rng).index()] += 1;
        }
        let p = 1.0 / 6.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * p).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }

    proptest! {
        #[test]
        fn rewards_telescope(start in 0usize..60, moves in prop::collection::vec(0usize..6, 1..80)) {
            let g = grid();
            let qos = |s: usize| ((s * 37) % 11) as f64 * 1.7 - (s as f64).sqrt();
            let mut s = start;
            let mut total = 0.0;
            for m in moves {
                let next = apply_action(s, Action::ALL[m], &g);
                total += reward(qos(next), qos(s));
                s = next;
            }
            prop_assert!((total - (qos(s) - qos(start))).abs() < 1e-9);
        }
    }
}
