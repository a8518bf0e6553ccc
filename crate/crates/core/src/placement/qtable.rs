use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Action;
use crate::deployment::PlacementGrid;
use crate::error::{Error, Result};

const FORMAT_TAG: &str = "aerial-placement/qtable";
const FORMAT_VERSION: u32 = 1;

/// Learning-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaSchedule {
    /// `1 / (1 + n)` where `n` counts visits of the pair including the
    /// current one, giving 1/2, 1/3, ...
    VisitCount,
    Constant { alpha: f64 },
}

/// Form of the tabular update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// `Q <- Q + alpha * (r + gamma * max Q' - Q)`
    #[default]
    Standard,
    /// `Q <- alpha * (r + gamma * max Q' - Q)`, kept only for comparison runs.
    Increment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QHyperParams {
    pub gamma: f64,
    pub epsilon: f64,
    pub alpha: AlphaSchedule,
    #[serde(default)]
    pub rule: UpdateRule,
}

impl Default for QHyperParams {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            epsilon: 0.9,
            alpha: AlphaSchedule::VisitCount,
            rule: UpdateRule::Standard,
        }
    }
}

impl QHyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "discount factor must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if let AlphaSchedule::Constant { alpha } = self.alpha {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "constant learning rate must lie in (0, 1], got {alpha}"
                )));
            }
        }
        Ok(())
    }
}

/// Action-value table over the placement grid, with per-pair visit counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    format: String,
    version: u32,
    pub dims: [usize; 3],
    pub hyper: QHyperParams,
    values: Vec<f64>,
    visits: Vec<u64>,
}

impl QTable {
    pub fn new(grid: &PlacementGrid, hyper: QHyperParams) -> Result<Self> {
        grid.validate()?;
        hyper.validate()?;
        let n = grid.n_states() * Action::COUNT;
        Ok(Self {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            dims: [grid.n_x, grid.n_y, grid.n_h],
            hyper,
            values: vec![0.0; n],
            visits: vec![0; n],
        })
    }

    pub fn n_states(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn matches(&self, grid: &PlacementGrid) -> bool {
        self.dims == [grid.n_x, grid.n_y, grid.n_h]
    }

    pub fn get(&self, s: usize, a: Action) -> f64 {
        self.values[s * Action::COUNT + a.index()]
    }

    pub fn set(&mut self, s: usize, a: Action, v: f64) {
        self.values[s * Action::COUNT + a.index()] = v;
    }

    pub fn visits(&self, s: usize, a: Action) -> u64 {
        self.visits[s * Action::COUNT + a.index()]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * Action::COUNT..(s + 1) * Action::COUNT]
    }

    pub fn max_value(&self, s: usize) -> f64 {
        self.row(s).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Argmax over the row; ties go to the earliest action in `Action::ALL`.
    pub fn greedy_action(&self, s: usize) -> Action {
        let row = self.row(s);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = i;
            }
        }
        Action::ALL[best]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// One tabular update of `(s, a)` after observing reward `r` and successor `s_next`.
    pub fn update(&mut self, s: usize, a: Action, r: f64, s_next: usize) {
        let idx = s * Action::COUNT + a.index();
        self.visits[idx] += 1;
        let alpha = match self.hyper.alpha {
            AlphaSchedule::VisitCount => 1.0 / (1.0 + self.visits[idx] as f64),
            AlphaSchedule::Constant { alpha } => alpha,
        };
        let target = r + self.hyper.gamma * self.max_value(s_next);
        let old = self.values[idx];
        self.values[idx] = match self.hyper.rule {
            UpdateRule::Standard => old + alpha * (target - old),
            UpdateRule::Increment => alpha * (target - old),
        };
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("q-table serializes")
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let table: QTable = serde_json::from_str(text).map_err(|e| Error::format(origin, e))?;
        if table.format != FORMAT_TAG {
            return Err(Error::format(origin, format!("not a q-table file (format {:?})", table.format)));
        }
        if table.version != FORMAT_VERSION {
            return Err(Error::format(origin, format!("unsupported q-table version {}", table.version)));
        }
        let n = table.n_states() * Action::COUNT;
        if table.values.len() != n || table.visits.len() != n {
            return Err(Error::format(origin, "q-table size does not match its dimensions"));
        }
        table.hyper.validate()?;
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::ServiceArea;

    fn grid(n: usize) -> PlacementGrid {
        PlacementGrid::new(ServiceArea::default(), n, 1, 1).unwrap()
    }

    fn constant(alpha: f64) -> QHyperParams {
        QHyperParams {
            alpha: AlphaSchedule::Constant { alpha },
            ..QHyperParams::default()
        }
    }

    #[test]
    fn single_update_from_zero() {
        let mut q = QTable::new(&grid(3), constant(0.5)).unwrap();
        q.update(0, Action::PlusX, 1.0, 1);
        assert_eq!(q.get(0, Action::PlusX), 0.5);
        assert_eq!(q.visits(0, Action::PlusX), 1);
    }

    #[test]
    fn fixed_point_is_stationary() {
        let mut q = QTable::new(&grid(2), constant(0.5)).unwrap();
        // Q(s,a) = gamma * max Q(s_next) with r = 0
        q.set(1, Action::PlusY, 1.0);
        q.set(0, Action::PlusX, 0.9);
        q.update(0, Action::PlusX, 0.0, 1);
        assert_eq!(q.get(0, Action::PlusX), 0.9);
        // self-loop: r + gamma * Q = Q only at Q = r / (1 - gamma)
        let mut q = QTable::new(&grid(1), constant(0.5)).unwrap();
        for a in Action::ALL {
            q.set(0, a, 10.0);
        }
        q.update(0, Action::MinusH, 1.0, 0);
        assert!((q.get(0, Action::MinusH) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn two_state_chain_by_hand() {
        // A = 0, B = 1. (A, +x) -> B with r = 1, then (B, -x) -> A with r = 0.
        // Q(A,+x) = 0 + 0.5 * (1 + 0.9 * 0 - 0) = 0.5
        // Q(B,-x) = 0 + 0.5 * (0 + 0.9 * 0.5 - 0) = 0.225
        // revisit (A,+x) with r = 1: 0.5 + 0.5 * (1 + 0.9 * 0.225 - 0.5) = 0.85125
        let mut q = QTable::new(&grid(2), constant(0.5)).unwrap();
        q.update(0, Action::PlusX, 1.0, 1);
        assert_eq!(q.get(0, Action::PlusX), 0.5);
        q.update(1, Action::MinusX, 0.0, 0);
        assert!((q.get(1, Action::MinusX) - 0.225).abs() < 1e-15);
        q.update(0, Action::PlusX, 1.0, 1);
        assert!((q.get(0, Action::PlusX) - 0.85125).abs() < 1e-15);
    }

    #[test]
    fn visit_count_schedule_decreases() {
        let mut q = QTable::new(&grid(1), QHyperParams::default()).unwrap();
        // r = 1 each time on a self-loop whose other actions stay at zero.
        // alpha = 1/2: Q = 0.5 ; max Q' = 0.5 now
        // alpha = 1/3: Q = 0.5 + (1 + 0.45 - 0.5) / 3
        q.update(0, Action::PlusX, 1.0, 0);
        assert_eq!(q.get(0, Action::PlusX), 0.5);
        q.update(0, Action::PlusX, 1.0, 0);
        assert!((q.get(0, Action::PlusX) - (0.5 + 0.95 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn increment_rule_drops_leading_term() {
        let mut q = QTable::new(
            &grid(2),
            QHyperParams {
                rule: UpdateRule::Increment,
                ..constant(0.5)
            },
        )
        .unwrap();
        q.set(0, Action::PlusX, 0.4);
        q.update(0, Action::PlusX, 1.0, 1);
        assert!((q.get(0, Action::PlusX) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn greedy_tie_break_and_argmax() {
        let mut q = QTable::new(&grid(1), QHyperParams::default()).unwrap();
        assert_eq!(q.greedy_action(0), Action::PlusX);
        q.set(0, Action::MinusY, 1.0);
        assert_eq!(q.greedy_action(0), Action::MinusY);
    }

    #[test]
    fn hyper_validation() {
        let g = grid(1);
        for bad in [
            QHyperParams { gamma: 1.0, ..QHyperParams::default() },
            QHyperParams { gamma: 0.0, ..QHyperParams::default() },
            QHyperParams { epsilon: 1.5, ..QHyperParams::default() },
            constant(0.0),
        ] {
            assert!(QTable::new(&g, bad).is_err());
        }
    }

    #[test]
    fn persistence_round_trip_and_rejections() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.json");
        let mut q = QTable::new(&grid(4), QHyperParams::default()).unwrap();
        q.update(2, Action::PlusH, 0.1 + 0.2, 3);
        q.set(3, Action::MinusX, -1.0 / 3.0);
        q.save(&path).unwrap();
        let back = QTable::load(&path).unwrap();
        assert_eq!(back, q);
        assert!(back.matches(&grid(4)));
        assert!(!back.matches(&grid(5)));

        let tampered = q.to_json().replace("\"version\":1", "\"version\":9");
        assert!(QTable::from_json(&tampered, &path).is_err());
        let wrong = q.to_json().replace("aerial-placement/qtable", "something-else");
        assert!(QTable::from_json(&wrong, &path).is_err());
        assert!(matches!(
            QTable::load(&dir.path().join("missing.json")),
            Err(Error::Io { .. })
        ));
    }
}
