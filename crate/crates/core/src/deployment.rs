//! Network geometry: hexagonal ground-BS layout, user drops, and the discrete
//! grid of candidate aerial positions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position2D {
    pub x: f64,
    pub y: f64,
}

impl Position2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A point with height above ground `h`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl Position3D {
    pub fn new(x: f64, y: f64, h: f64) -> Self {
        Self { x, y, h }
    }

    pub fn ground(&self) -> Position2D {
        Position2D::new(self.x, self.y)
    }

    /// Horizontal distance to a ground-level point.
    pub fn horizontal_distance(&self, user: &Position2D) -> f64 {
        self.ground().distance(user)
    }

    /// Straight-line distance to a ground-level point.
    pub fn distance_to_ground(&self, user: &Position2D) -> f64 {
        self.horizontal_distance(user).hypot(self.h)
    }
}

/// Rectangular service area plus the altitude band open to the aerial-BS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceArea {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for ServiceArea {
    /// 2 km x 2 km (4 km^2) with altitudes 25-525 m.
    fn default() -> Self {
        Self::square(4.0e6, 25.0, 525.0)
    }
}

impl ServiceArea {
    /// Square area of `total_area` m^2 with its lower-left corner at the origin.
    pub fn square(total_area: f64, h_min: f64, h_max: f64) -> Self {
        let side = total_area.sqrt();
        Self {
            x_min: 0.0,
            x_max: side,
            y_min: 0.0,
            y_max: side,
            h_min,
            h_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.x_min, self.x_max, self.y_min, self.y_max, self.h_min, self.h_max,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("service area bounds must be finite".into()));
        }
        if !(self.x_min < self.x_max && self.y_min < self.y_max) {
            return Err(Error::InvalidConfig(format!(
                "service area needs x_min < x_max and y_min < y_max, got [{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if !(0.0 < self.h_min && self.h_min < self.h_max) {
            return Err(Error::InvalidConfig(format!(
                "altitude band needs 0 < h_min < h_max, got [{}, {}]",
                self.h_min, self.h_max
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Position2D {
        Position2D::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn contains(&self, p: &Position2D) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }

    pub fn contains_3d(&self, p: &Position3D) -> bool {
        self.contains(&p.ground()) && (self.h_min..=self.h_max).contains(&p.h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundBS {
    pub id: usize,
    pub pos: Position3D,
    /// dBm
    pub tx_power: f64,
    pub active: bool,
}

/// Number of cells in a hexagonal layout with `n_rings` rings around the center.
pub fn hex_cell_count(n_rings: usize) -> usize {
    1 + 3 * n_rings * (n_rings + 1)
}

/// Inter-site distance such that `cells` hexagons tile an area of `total_area`.
pub fn inter_site_distance(total_area: f64, cells: usize) -> f64 {
    let per_cell = total_area / cells as f64;
    (2.0 * per_cell / 3f64.sqrt()).sqrt()
}

/// Places `1 + 3n(n+1)` ground BSs on a hexagonal lattice centered in `area`.
///
/// Sites are ordered ring by ring starting from the center, so id 0 is always
/// the center cell.
pub fn hex_layout(
    n_rings: usize,
    area: &ServiceArea,
    antenna_height: f64,
    tx_power: f64,
) -> Result<Vec<GroundBS>> {
    area.validate()?;
    if !(antenna_height > 0.0 && antenna_height.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "antenna height must be positive, got {antenna_height}"
        )));
    }
    if !tx_power.is_finite() {
        return Err(Error::InvalidConfig("ground tx power must be finite".into()));
    }

    let count = hex_cell_count(n_rings);
    let isd = inter_site_distance(area.area(), count);
    if !(isd > 0.0 && isd.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "area of {} m^2 cannot hold {count} cells",
            area.area()
        )));
    }

    let center = area.center();
    let mut sites = Vec::with_capacity(count);
    sites.push((0i64, 0i64));
    // Axial coordinates; walk each ring starting at direction 4 * k, then
    // step along the six sides.
    const DIRS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    for k in 1..=n_rings as i64 {
        let (mut q, mut r) = (DIRS[4].0 * k, DIRS[4].1 * k);
        for dir in DIRS {
            for _ in 0..k {
                sites.push((q, r));
                q += dir.0;
                r += dir.1;
            }
        }
    }

    let half_sqrt3 = 3f64.sqrt() / 2.0;
    let bss = sites
        .into_iter()
        .enumerate()
        .map(|(id, (q, r))| {
            let x = center.x + isd * (q as f64 + 0.5 * r as f64);
            let y = center.y + isd * half_sqrt3 * r as f64;
            GroundBS {
                id,
                pos: Position3D::new(x, y, antenna_height),
                tx_power,
                active: true,
            }
        })
        .collect::<Vec<_>>();

    if let Some(bs) = bss.iter().find(|bs| !area.contains(&bs.pos.ground())) {
        return Err(Error::InvalidConfig(format!(
            "hex layout with {n_rings} rings (ISD {isd:.1} m) puts BS {} at ({:.1}, {:.1}) outside the area",
            bs.id, bs.pos.x, bs.pos.y
        )));
    }
    Ok(bss)
}

/// Drops `count` users i.i.d. uniformly over the area: a Poisson point
/// process conditioned on its number of points.
pub fn drop_users_ppp<R: Rng + ?Sized>(
    count: usize,
    area: &ServiceArea,
    rng: &mut R,
) -> Vec<Position2D> {
    (0..count)
        .map(|_| {
            Position2D::new(
                rng.gen_range(area.x_min..area.x_max),
                rng.gen_range(area.y_min..area.y_max),
            )
        })
        .collect()
}

/// Regular lattice of candidate aerial positions, corners included.
///
/// State `s` maps to `(ix, iy, ih)` with `s = ix + n_x * (iy + n_y * ih)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementGrid {
    pub area: ServiceArea,
    pub n_x: usize,
    pub n_y: usize,
    pub n_h: usize,
}

impl PlacementGrid {
    pub fn new(area: ServiceArea, n_x: usize, n_y: usize, n_h: usize) -> Result<Self> {
        let grid = Self { area, n_x, n_y, n_h };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        self.area.validate()?;
        if self.n_x == 0 || self.n_y == 0 || self.n_h == 0 {
            return Err(Error::InvalidConfig(format!(
                "grid counts must be positive, got {}x{}x{}",
                self.n_x, self.n_y, self.n_h
            )));
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.n_x * self.n_y * self.n_h
    }

    pub fn coords(&self, s: usize) -> (usize, usize, usize) {
        let ix = s % self.n_x;
        let iy = (s / self.n_x) % self.n_y;
        let ih = s / (self.n_x * self.n_y);
        (ix, iy, ih)
    }

    pub fn index(&self, ix: usize, iy: usize, ih: usize) -> usize {
        ix + self.n_x * (iy + self.n_y * ih)
    }

    pub fn index_to_position(&self, s: usize) -> Result<Position3D> {
        let len = self.n_states();
        if s >= len {
            return Err(Error::StateOutOfRange { index: s, len });
        }
        let (ix, iy, ih) = self.coords(s);
        let a = &self.area;
        Ok(Position3D::new(
            axis_value(a.x_min, a.x_max, self.n_x, ix),
            axis_value(a.y_min, a.y_max, self.n_y, iy),
            axis_value(a.h_min, a.h_max, self.n_h, ih),
        ))
    }

    /// Inverse of [`index_to_position`](Self::index_to_position). Off-lattice
    /// positions snap to the nearest grid point; positions outside the box
    /// are rejected.
    pub fn position_to_index(&self, p: &Position3D) -> Result<usize> {
        if !self.area.contains_3d(p) {
            return Err(Error::InvalidConfig(format!(
                "position ({}, {}, {}) lies outside the placement box",
                p.x, p.y, p.h
            )));
        }
        Ok(self.nearest_index(p))
    }

    /// Nearest grid state, clamping positions outside the box.
    pub fn nearest_index(&self, p: &Position3D) -> usize {
        let a = &self.area;
        self.index(
            axis_index(a.x_min, a.x_max, self.n_x, p.x),
            axis_index(a.y_min, a.y_max, self.n_y, p.y),
            axis_index(a.h_min, a.h_max, self.n_h, p.h),
        )
    }
}

fn axis_value(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        return lo;
    }
    if i == n - 1 {
        return hi;
    }
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

fn axis_index(lo: f64, hi: f64, n: usize, v: f64) -> usize {
    if n == 1 {
        return 0;
    }
    let t = (v - lo) / (hi - lo) * (n - 1) as f64;
    (t.round().max(0.0) as usize).min(n - 1)
}
