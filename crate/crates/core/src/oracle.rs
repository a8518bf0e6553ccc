//! Brute-force maximizer of aggregate QoS over every grid placement.
//!
//! Each state gets its own full `aggregate_qos` evaluation on a fresh copy of
//! the snapshot; nothing is shared with the learning path's cache.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::deployment::PlacementGrid;
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::radio::{aggregate_qos, NetworkState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_state: usize,
    pub best_qos: f64,
    pub qos_per_state: Vec<f64>,
}

/// QoS with the aerial BS at grid state `s`, evaluated from scratch.
pub fn qos_at_state(snapshot: &NetworkState, grid: &PlacementGrid, s: usize) -> Result<f64> {
    let pos = grid.index_to_position(s)?;
    let mut state = snapshot.clone();
    state.move_aerial(pos)?;
    Ok(aggregate_qos(&state))
}

pub fn exhaustive_search(
    snapshot: &NetworkState,
    grid: &PlacementGrid,
    mode: ExecMode,
) -> Result<OracleResult> {
    grid.validate()?;
    if snapshot.aerial().is_none() {
        return Err(Error::InvalidConfig(
            "exhaustive search needs a snapshot with an aerial BS".into(),
        ));
    }
    let qos_per_state = mode
        .map_range(grid.n_states(), |s| qos_at_state(snapshot, grid, s))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;

    // lowest index wins ties
    let mut best_state = 0;
    for (s, &v) in qos_per_state.iter().enumerate() {
        if v > qos_per_state[best_state] {
            best_state = s;
        }
    }
    Ok(OracleResult {
        best_state,
        best_qos: qos_per_state[best_state],
        qos_per_state,
    })
}

impl OracleResult {
    /// Writes `state,x,y,h,qos` rows, one per grid state.
    pub fn write_csv(&self, grid: &PlacementGrid, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(file);
        let wrap = |e: csv::Error| Error::format(path, e);
        w.write_record(["state", "x", "y", "h", "qos"]).map_err(wrap)?;
        for (s, q) in self.qos_per_state.iter().enumerate() {
            let p = grid.index_to_position(s)?;
            w.write_record([
                s.to_string(),
                p.x.to_string(),
                p.y.to_string(),
                p.h.to_string(),
                q.to_string(),
            ])
            .map_err(wrap)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}
