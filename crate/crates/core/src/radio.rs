//! Downlink SINR with full-buffer co-channel interference, max-SINR user
//! association, and the aggregate spectral-efficiency objective.

use serde::{Deserialize, Serialize};

use crate::channel::{
    atg_pathloss, dbm_to_mw, ground_pathloss, received_power, AtgEnvironment, RadioParams,
};
use crate::deployment::{GroundBS, Position2D, Position3D};
use crate::error::{Error, Result};

/// Serving-cell identifier. Ground BSs order before the aerial BS, which is
/// the lowest-priority index on ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BsId {
    Ground(usize),
    Aerial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AerialBS {
    pub pos: Position3D,
    /// dBm
    pub tx_power: f64,
}

/// Everything needed to evaluate the downlink at one instant.
///
/// Construction checks that at least one BS is active and that every
/// transmitter is above ground, so no link can be degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    ground_bs: Vec<GroundBS>,
    aerial: Option<AerialBS>,
    users: Vec<Position2D>,
    env: AtgEnvironment,
    radio: RadioParams,
}

impl NetworkState {
    pub fn new(
        ground_bs: Vec<GroundBS>,
        aerial: Option<AerialBS>,
        users: Vec<Position2D>,
        env: AtgEnvironment,
        radio: RadioParams,
    ) -> Result<Self> {
        env.validate()?;
        radio.validate()?;
        for bs in &ground_bs {
            if !(bs.pos.h > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "ground BS {} has non-positive antenna height",
                    bs.id
                )));
            }
        }
        if let Some(a) = &aerial {
            check_aerial(a)?;
        }
        let state = Self {
            ground_bs,
            aerial,
            users,
            env,
            radio,
        };
        if state.active_ids().is_empty() {
            return Err(Error::InvalidConfig("no active base station".into()));
        }
        Ok(state)
    }

    pub fn ground_bs(&self) -> &[GroundBS] {
        &self.ground_bs
    }

    pub fn aerial(&self) -> Option<&AerialBS> {
        self.aerial.as_ref()
    }

    pub fn users(&self) -> &[Position2D] {
        &self.users
    }

    pub fn env(&self) -> &AtgEnvironment {
        &self.env
    }

    pub fn radio(&self) -> &RadioParams {
        &self.radio
    }

    pub fn set_users(&mut self, users: Vec<Position2D>) {
        self.users = users;
    }

    pub fn set_aerial(&mut self, aerial: Option<AerialBS>) -> Result<()> {
        if let Some(a) = &aerial {
            check_aerial(a)?;
        }
        if aerial.is_none() && self.ground_bs.iter().all(|b| !b.active) {
            return Err(Error::InvalidConfig("no active base station".into()));
        }
        self.aerial = aerial;
        Ok(())
    }

    /// Moves the aerial BS, keeping its transmit power.
    pub fn move_aerial(&mut self, pos: Position3D) -> Result<()> {
        let tx_power = self
            .aerial
            .map(|a| a.tx_power)
            .ok_or_else(|| Error::InvalidConfig("no aerial BS to move".into()))?;
        self.set_aerial(Some(AerialBS { pos, tx_power }))
    }

    pub fn set_ground_active(&mut self, id: usize, active: bool) -> Result<()> {
        let bs = self
            .ground_bs
            .get_mut(id)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown ground BS {id}")))?;
        bs.active = active;
        if self.active_ids().is_empty() {
            self.ground_bs[id].active = !active;
            return Err(Error::InvalidConfig("no active base station".into()));
        }
        Ok(())
    }

    /// Active BSs in tie-break order.
    pub fn active_ids(&self) -> Vec<BsId> {
        let mut ids: Vec<BsId> = self
            .ground_bs
            .iter()
            .filter(|b| b.active)
            .map(|b| BsId::Ground(b.id))
            .collect();
        if self.aerial.is_some() {
            ids.push(BsId::Aerial);
        }
        ids
    }

    fn is_active(&self, id: BsId) -> bool {
        match id {
            BsId::Ground(j) => self.ground_bs.get(j).is_some_and(|b| b.active),
            BsId::Aerial => self.aerial.is_some(),
        }
    }

    /// Received power in dBm at `user` from BS `id`.
    pub fn received_dbm(&self, id: BsId, user: &Position2D) -> f64 {
        // Heights are validated positive, so the path loss is always defined.
        match id {
            BsId::Ground(j) => {
                let bs = &self.ground_bs[j];
                let pl = ground_pathloss(bs, user, &self.radio).expect("ground BS above ground");
                received_power(bs.tx_power, pl)
            }
            BsId::Aerial => {
                let a = self.aerial.as_ref().expect("aerial BS present");
                let pl = atg_pathloss(&a.pos, user, &self.env, &self.radio)
                    .expect("aerial BS above ground");
                received_power(a.tx_power, pl)
            }
        }
    }

    /// Linear received powers (mW) from every active BS, in tie-break order.
    fn received_mw(&self, user: &Position2D) -> Vec<(BsId, f64)> {
        self.active_ids()
            .into_iter()
            .map(|id| (id, dbm_to_mw(self.received_dbm(id, user))))
            .collect()
    }
}

fn check_aerial(a: &AerialBS) -> Result<()> {
    if !(a.pos.h > 0.0 && a.pos.x.is_finite() && a.pos.y.is_finite() && a.tx_power.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "aerial BS needs positive altitude and finite position/power, got {:?}",
            a
        )));
    }
    Ok(())
}

/// One serving BS per user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationMap {
    pub assign: Vec<BsId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserLink {
    pub serving: BsId,
    pub sinr: f64,
    /// bits/s/Hz
    pub throughput: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub links: Vec<UserLink>,
}

impl LinkReport {
    pub fn total_throughput(&self) -> f64 {
        self.links.iter().map(|l| l.throughput).sum()
    }
}

fn sinr_from_powers(powers: &[(BsId, f64)], serving: BsId, noise_mw: f64) -> f64 {
    let mut signal = 0.0;
    let mut interference = 0.0;
    for &(id, p) in powers {
        if id == serving {
            signal = p;
        } else {
            interference += p;
        }
    }
    signal / (noise_mw + interference)
}

/// Linear SINR at `user` when served by `serving`; every other active BS
/// interferes.
pub fn sinr(user: &Position2D, serving: BsId, state: &NetworkState) -> Result<f64> {
    if !state.is_active(serving) {
        return Err(Error::InvalidConfig(format!(
            "serving BS {serving:?} is not active"
        )));
    }
    let powers = state.received_mw(user);
    Ok(sinr_from_powers(&powers, serving, dbm_to_mw(state.radio.noise_power)))
}

/// Shannon spectral efficiency, bits/s/Hz.
pub fn throughput(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

// With every BS transmitting, SINR for serving BS j is P_j / (N + T - P_j),
// strictly increasing in P_j, so the strongest received power is the max-SINR
// choice. Strict comparison keeps the lowest index on ties.
fn strongest(powers: &[(BsId, f64)]) -> BsId {
    let mut best = powers[0];
    for &(id, p) in &powers[1..] {
        if p > best.1 {
            best = (id, p);
        }
    }
    best.0
}

fn user_link(state: &NetworkState, noise_mw: f64, user: &Position2D) -> UserLink {
    let powers = state.received_mw(user);
    let serving = strongest(&powers);
    let s = sinr_from_powers(&powers, serving, noise_mw);
    UserLink {
        serving,
        sinr: s,
        throughput: throughput(s),
    }
}

/// Assigns each user to the BS that gives it the highest SINR.
pub fn associate_max_sinr(state: &NetworkState) -> AssociationMap {
    let noise = dbm_to_mw(state.radio.noise_power);
    AssociationMap {
        assign: state
            .users
            .iter()
            .map(|u| user_link(state, noise, u).serving)
            .collect(),
    }
}

/// Per-user serving BS, SINR, and throughput under max-SINR association.
pub fn link_report(state: &NetworkState) -> LinkReport {
    let noise = dbm_to_mw(state.radio.noise_power);
    LinkReport {
        links: state
            .users
            .iter()
            .map(|u| user_link(state, noise, u))
            .collect(),
    }
}

/// Sum of user throughputs under a given association.
pub fn qos_for_association(state: &NetworkState, assoc: &AssociationMap) -> Result<f64> {
    if assoc.assign.len() != state.users.len() {
        return Err(Error::InvalidConfig(format!(
            "association covers {} users, state has {}",
            assoc.assign.len(),
            state.users.len()
        )));
    }
    state
        .users
        .iter()
        .zip(&assoc.assign)
        .map(|(u, &bs)| sinr(u, bs, state).map(throughput))
        .sum()
}

/// Aggregate network throughput (bits/s/Hz) under max-SINR association.
pub fn aggregate_qos(state: &NetworkState) -> f64 {
    link_report(state).total_throughput()
}
