//! Path loss for the air-to-ground link (elevation-dependent LoS mixture) and
//! for the terrestrial macro links (log-distance).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::deployment::{GroundBS, Position2D, Position3D};
use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// How the sigmoid exponent of the LoS probability is bracketed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosExponentForm {
    /// `exp(-zeta * (theta_deg - kappa))`
    #[default]
    Shifted,
    /// `exp(-zeta * theta_deg - kappa)`
    Unshifted,
}

/// Environment constants of the air-to-ground model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtgEnvironment {
    pub kappa: f64,
    /// per degree
    pub zeta: f64,
    /// dB
    pub eta_los: f64,
    /// dB
    pub eta_nlos: f64,
    #[serde(default)]
    pub exponent_form: LosExponentForm,
}

impl AtgEnvironment {
    pub fn urban() -> Self {
        Self {
            kappa: 9.61,
            zeta: 0.16,
            eta_los: 1.0,
            eta_nlos: 20.0,
            exponent_form: LosExponentForm::Shifted,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.zeta > 0.0) {
            return Err(Error::InvalidConfig(
                "kappa and zeta must be positive".into(),
            ));
        }
        if !(self.eta_los >= 0.0 && self.eta_nlos >= self.eta_los) {
            return Err(Error::InvalidConfig(
                "need 0 <= eta_los <= eta_nlos".into(),
            ));
        }
        Ok(())
    }
}

impl Default for AtgEnvironment {
    fn default() -> Self {
        Self::urban()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Hz
    pub carrier_freq: f64,
    /// dBm
    pub noise_power: f64,
    pub ground_pathloss_exponent: f64,
    /// dB at 1 m
    pub ground_ref_loss: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            carrier_freq: 2.0e9,
            noise_power: -104.0,
            ground_pathloss_exponent: 3.5,
            ground_ref_loss: 38.4,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_freq > 0.0 && self.carrier_freq.is_finite()) {
            return Err(Error::InvalidConfig("carrier frequency must be positive".into()));
        }
        if !self.noise_power.is_finite() {
            return Err(Error::InvalidConfig("noise power must be finite".into()));
        }
        if !(self.ground_pathloss_exponent > 0.0 && self.ground_ref_loss.is_finite()) {
            return Err(Error::InvalidConfig(
                "ground path loss exponent must be positive and reference loss finite".into(),
            ));
        }
        Ok(())
    }
}

/// `atan(h / l)` in radians; `pi/2` directly overhead.
pub fn elevation_angle(aerial: &Position3D, user: &Position2D) -> f64 {
    let l = aerial.horizontal_distance(user);
    if l == 0.0 {
        FRAC_PI_2
    } else {
        (aerial.h / l).atan()
    }
}

/// Probability of a line-of-sight air-to-ground link at elevation `theta` (rad).
pub fn p_los(theta: f64, env: &AtgEnvironment) -> f64 {
    let theta_deg = theta * 180.0 / PI;
    let exponent = match env.exponent_form {
        LosExponentForm::Shifted => -env.zeta * (theta_deg - env.kappa),
        LosExponentForm::Unshifted => -env.zeta * theta_deg - env.kappa,
    };
    1.0 / (1.0 + env.kappa * exponent.exp())
}

/// Free-space path loss in dB at distance `d` meters.
pub fn free_space_pathloss(d: f64, carrier_freq: f64) -> f64 {
    20.0 * (4.0 * PI * carrier_freq * d / SPEED_OF_LIGHT).log10()
}

/// Mean air-to-ground path loss in dB: free-space loss plus the LoS/NLoS
/// weighted excess loss.
pub fn atg_pathloss(
    aerial: &Position3D,
    user: &Position2D,
    env: &AtgEnvironment,
    radio: &RadioParams,
) -> Result<f64> {
    let d = aerial.distance_to_ground(user);
    if d <= 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    let los = p_los(elevation_angle(aerial, user), env);
    Ok(free_space_pathloss(d, radio.carrier_freq) + los * env.eta_los + (1.0 - los) * env.eta_nlos)
}

/// Log-distance terrestrial path loss in dB, using the 3D BS-user distance.
pub fn ground_pathloss(bs: &GroundBS, user: &Position2D, radio: &RadioParams) -> Result<f64> {
    let d = bs.pos.distance_to_ground(user);
    if d <= 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    Ok(radio.ground_ref_loss + 10.0 * radio.ground_pathloss_exponent * d.log10())
}

/// dBm
pub fn received_power(tx_power: f64, pathloss: f64) -> f64 {
    tx_power - pathloss
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
