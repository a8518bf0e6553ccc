//! Random-walk pedestrian mobility: straight-line motion with speed and
//! heading redrawn every `hold_time` seconds.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::deployment::{Position2D, ServiceArea};
use crate::error::{Error, Result};

// Remaining hold below this counts as expired (absorbs float drift from dt steps).
const HOLD_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: usize,
    pub pos: Position2D,
    /// m/s
    pub speed: f64,
    /// radians in [0, 2pi)
    pub direction: f64,
    /// seconds until the next redraw
    pub hold_remaining: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPolicy {
    #[default]
    Reflect,
    Wrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityParams {
    /// m/s
    pub c_max: f64,
    /// seconds between redraws
    pub hold_time: f64,
    /// integration step, seconds
    pub dt: f64,
    #[serde(default)]
    pub boundary: BoundaryPolicy,
}

impl Default for MobilityParams {
    fn default() -> Self {
        Self {
            c_max: 1.3,
            hold_time: 10.0,
            dt: 1.0,
            boundary: BoundaryPolicy::Reflect,
        }
    }
}

impl MobilityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_max >= 0.0 && self.c_max.is_finite() && self.hold_time > 0.0 && self.dt > 0.0) {
            return Err(Error::InvalidConfig(
                "mobility needs c_max >= 0, hold_time > 0 and dt > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Draws a `(speed, direction)` pair uniform on `[0, c_max) x [0, 2pi)`.
pub fn draw_velocity<R: Rng + ?Sized>(c_max: f64, rng: &mut R) -> (f64, f64) {
    let speed = rng.gen::<f64>() * c_max;
    let direction = rng.gen::<f64>() * TAU;
    (speed, direction)
}

/// Wraps positions into users with a fresh velocity and a full hold timer.
pub fn spawn_users<R: Rng + ?Sized>(
    positions: &[Position2D],
    params: &MobilityParams,
    rng: &mut R,
) -> Vec<User> {
    positions
        .iter()
        .enumerate()
        .map(|(id, &pos)| {
            let (speed, direction) = draw_velocity(params.c_max, rng);
            User {
                id,
                pos,
                speed,
                direction,
                hold_remaining: params.hold_time,
            }
        })
        .collect()
}

/// Advances every user by `dt` seconds. Redraws happen exactly when a hold
/// timer expires, even in the middle of `dt`. Users are processed in order,
/// so the random stream is consumed deterministically.
pub fn step<R: Rng + ?Sized>(
    users: &[User],
    dt: f64,
    params: &MobilityParams,
    area: &ServiceArea,
    rng: &mut R,
) -> Vec<User> {
    users
        .iter()
        .map(|u| {
            let mut u = *u;
            let mut left = dt;
            while left > 0.0 {
                let seg = left.min(u.hold_remaining);
                advance(&mut u, seg, params.boundary, area);
                left -= seg;
                u.hold_remaining -= seg;
                if u.hold_remaining <= HOLD_EPS {
                    let (speed, direction) = draw_velocity(params.c_max, rng);
                    u.speed = speed;
                    u.direction = direction;
                    u.hold_remaining = params.hold_time;
                }
                if left <= HOLD_EPS {
                    break;
                }
            }
            u
        })
        .collect()
}

/// Runs `step` repeatedly to cover `duration` seconds in increments of `params.dt`.
pub fn advance_for<R: Rng + ?Sized>(
    users: &[User],
    duration: f64,
    params: &MobilityParams,
    area: &ServiceArea,
    rng: &mut R,
) -> Vec<User> {
    let mut current = users.to_vec();
    let full_steps = (duration / params.dt + HOLD_EPS).floor() as usize;
    for _ in 0..full_steps {
        current = step(&current, params.dt, params, area, rng);
    }
    let rest = duration - full_steps as f64 * params.dt;
    if rest > HOLD_EPS {
        current = step(&current, rest, params, area, rng);
    }
    current
}

fn advance(u: &mut User, seconds: f64, boundary: BoundaryPolicy, area: &ServiceArea) {
    if u.speed == 0.0 {
        return;
    }
    let dist = u.speed * seconds;
    let x = u.pos.x + dist * u.direction.cos();
    let y = u.pos.y + dist * u.direction.sin();
    match boundary {
        BoundaryPolicy::Reflect => {
            let (x, flip_x) = reflect(x, area.x_min, area.x_max);
            let (y, flip_y) = reflect(y, area.y_min, area.y_max);
            let mut dir = u.direction;
            if flip_x {
                dir = PI - dir;
            }
            if flip_y {
                dir = -dir;
            }
            u.pos = Position2D::new(x, y);
            u.direction = normalize_angle(dir);
        }
        BoundaryPolicy::Wrap => {
            u.pos = Position2D::new(
                wrap(x, area.x_min, area.x_max),
                wrap(y, area.y_min, area.y_max),
            );
        }
    }
}

/// Mirrors `v` into `[lo, hi]`; the flag is true for an odd number of bounces.
fn reflect(mut v: f64, lo: f64, hi: f64) -> (f64, bool) {
    let mut flipped = false;
    loop {
        if v < lo {
            v = 2.0 * lo - v;
        } else if v > hi {
            v = 2.0 * hi - v;
        } else {
            return (v, flipped);
        }
        flipped = !flipped;
    }
}

fn wrap(v: f64, lo: f64, hi: f64) -> f64 {
    let w = lo + (v - lo).rem_euclid(hi - lo);
    if w >= hi {
        lo
    } else {
        w
    }
}

fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}
