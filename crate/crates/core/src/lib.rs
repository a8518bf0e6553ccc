//! Downlink cellular simulator that places one aerial base station on a
//! discrete 3D grid with tabular Q-learning, checked against exhaustive search.
//!
//! Module map:
//! - [`deployment`]: hexagonal ground layout, user drops, placement grid
//! - [`channel`]: air-to-ground and terrestrial path loss
//! - [`radio`]: SINR, max-SINR association, aggregate QoS
//! - [`mobility`]: random-walk user motion
//! - [`placement`]: Q-table, epsilon-greedy learning loop
//! - [`oracle`]: brute-force search over all placements
//! - [`simctl`]: time-slotted scenario driver, metrics, output files

pub mod channel;
pub mod deployment;
pub mod error;
pub mod exec;
pub mod mobility;
pub mod oracle;
pub mod placement;
pub mod radio;
pub mod simctl;
pub mod stats;

pub use error::{Error, Result};
pub use exec::ExecMode;
