//! Random topologies on the unit disk, large-scale fading and virtual cells.
//!
//! Users and BS antennas are drawn i.i.d. uniform over the closed unit disk.
//! Large-scale fading between user `k` and antenna `l` is the amplitude gain
//! `γ_{k,l} = d_{k,l}^{-α/2}` with path-loss factor `α > 2`; coincident
//! points are clamped to [`MIN_DISTANCE`] before the power law. Each user's
//! virtual cell is its `V` closest antennas.

use alloc::vec::Vec;

use rand::Rng;

use crate::fmath;
use crate::{Error, Result};

/// Distances are clamped from below by this before the path-loss power law,
/// keeping gains finite for coincident points.
pub const MIN_DISTANCE: f64 = 1e-6;

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        fmath::sqrt(dx * dx + dy * dy)
    }

    pub fn norm(&self) -> f64 {
        fmath::sqrt(self.x * self.x + self.y * self.y)
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        let a = fmath::atan2(self.y, self.x);
        if a < 0.0 {
            a + 2.0 * core::f64::consts::PI
        } else {
            a
        }
    }
}

/// Positions of `K` users and `L` BS antennas inside the closed unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    users: Vec<Point>,
    bs: Vec<Point>,
}

impl Topology {
    /// Build from explicit positions, validating the unit-disk support.
    pub fn new(users: Vec<Point>, bs: Vec<Point>) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::CountTooSmall {
                what: "user count",
                got: 0,
                min: 1,
            });
        }
        if bs.is_empty() {
            return Err(Error::CountTooSmall {
                what: "antenna count",
                got: 0,
                min: 1,
            });
        }
        // Allow a hair of slack for round-tripped coordinates.
        let inside = |p: &Point| p.norm() <= 1.0 + 1e-12;
        for (i, p) in users.iter().enumerate() {
            if !inside(p) {
                return Err(Error::OutsideUnitDisk {
                    what: "user",
                    index: i,
                });
            }
        }
        for (i, p) in bs.iter().enumerate() {
            if !inside(p) {
                return Err(Error::OutsideUnitDisk {
                    what: "antenna",
                    index: i,
                });
            }
        }
        Ok(Self { users, bs })
    }

    pub fn k(&self) -> usize {
        self.users.len()
    }

    pub fn l(&self) -> usize {
        self.bs.len()
    }

    pub fn users(&self) -> &[Point] {
        &self.users
    }

    pub fn bs(&self) -> &[Point] {
        &self.bs
    }

    pub fn user_antenna_distance(&self, k: usize, l: usize) -> f64 {
        self.users[k].distance_to(&self.bs[l])
    }
}

fn uniform_disk_point(rng: &mut impl Rng) -> Point {
    // Radius √U makes the area density uniform; 1−U maps [0,1) onto (0,1].
    let r = fmath::sqrt(1.0 - rng.random::<f64>());
    let theta = 2.0 * core::f64::consts::PI * rng.random::<f64>();
    Point::new(r * fmath::cos(theta), r * fmath::sin(theta))
}

/// Draw `k` users and `l` antennas i.i.d. uniform on the unit disk.
pub fn generate_topology(k: usize, l: usize, rng: &mut impl Rng) -> Result<Topology> {
    if k == 0 {
        return Err(Error::CountTooSmall {
            what: "user count",
            got: 0,
            min: 1,
        });
    }
    if l == 0 {
        return Err(Error::CountTooSmall {
            what: "antenna count",
            got: 0,
            min: 1,
        });
    }
    let users = (0..k).map(|_| uniform_disk_point(rng)).collect();
    let bs = (0..l).map(|_| uniform_disk_point(rng)).collect();
    Ok(Topology { users, bs })
}

/// The `K×L` matrix of large-scale amplitude gains `γ_{k,l} = d_{k,l}^{-α/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScaleGains {
    gamma: Vec<f64>,
    k: usize,
    l: usize,
    alpha: f64,
}

impl LargeScaleGains {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Amplitude gain from antenna `l` to user `k`.
    #[inline]
    pub fn gain(&self, k: usize, l: usize) -> f64 {
        self.gamma[k * self.l + l]
    }

    /// All gains of user `k`, antenna-indexed.
    #[inline]
    pub fn user_row(&self, k: usize) -> &[f64] {
        &self.gamma[k * self.l..(k + 1) * self.l]
    }
}

/// Compute all pairwise gains for a topology with path-loss factor `alpha`.
pub fn pairwise_gains(topo: &Topology, alpha: f64) -> Result<LargeScaleGains> {
    if !alpha.is_finite() || alpha <= 2.0 {
        return Err(Error::InvalidPathLoss { alpha });
    }
    let (k, l) = (topo.k(), topo.l());
    let mut gamma = Vec::with_capacity(k * l);
    let exponent = -alpha / 2.0;
    for user in &topo.users {
        for ant in &topo.bs {
            let d = user.distance_to(ant).max(MIN_DISTANCE);
            gamma.push(fmath::powf(d, exponent));
        }
    }
    Ok(LargeScaleGains {
        gamma,
        k,
        l,
        alpha,
    })
}

/// Per-user antenna orderings by increasing distance (ties by lower index).
///
/// Useful when sweeping the virtual cell size over one topology: sort once,
/// then slice out a [`VirtualCellMap`] per `V`.
#[derive(Debug, Clone)]
pub struct SortedNeighbors {
    // (distance, antenna index) per user, ascending
    order: Vec<Vec<(f64, usize)>>,
    l: usize,
}

impl SortedNeighbors {
    pub fn of(topo: &Topology) -> Self {
        let order = topo
            .users
            .iter()
            .map(|u| {
                let mut row: Vec<(f64, usize)> = topo
                    .bs
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (u.distance_to(b), i))
                    .collect();
                row.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                row
            })
            .collect();
        Self { order, l: topo.l() }
    }

    pub fn virtual_cells(&self, v: usize) -> Result<VirtualCellMap> {
        if v == 0 || v > self.l {
            return Err(Error::CellSizeOutOfRange { v, l: self.l });
        }
        let mut cells = Vec::with_capacity(self.order.len());
        let mut cell_distances = Vec::with_capacity(self.order.len());
        for row in &self.order {
            cells.push(row[..v].iter().map(|&(_, i)| i).collect());
            cell_distances.push(row[..v].iter().map(|&(d, _)| d).collect());
        }
        Ok(VirtualCellMap {
            v,
            cells,
            cell_distances,
        })
    }
}

/// Each user's virtual cell: its `V` closest antennas with their distances.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualCellMap {
    v: usize,
    cells: Vec<Vec<usize>>,
    cell_distances: Vec<Vec<f64>>,
}

impl VirtualCellMap {
    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.cells.len()
    }

    /// Antenna indices of user `k`'s virtual cell, nearest first.
    pub fn cell(&self, k: usize) -> &[usize] {
        &self.cells[k]
    }

    /// Distances matching [`Self::cell`], nondecreasing.
    pub fn cell_distances(&self, k: usize) -> &[f64] {
        &self.cell_distances[k]
    }

    /// Radius of user `k`'s virtual cell (distance to its V-th antenna).
    pub fn radius(&self, k: usize) -> f64 {
        *self.cell_distances[k].last().expect("V >= 1")
    }

    /// Gains of user `k` restricted to its virtual cell.
    pub fn cell_gains(&self, k: usize, gains: &LargeScaleGains) -> Vec<f64> {
        self.cells[k].iter().map(|&l| gains.gain(k, l)).collect()
    }
}

/// Form every user's virtual cell of the `v` nearest antennas.
pub fn form_virtual_cells(topo: &Topology, v: usize) -> Result<VirtualCellMap> {
    SortedNeighbors::of(topo).virtual_cells(v)
}

/// Index of the user closest to user `k` (ties by lower index).
pub fn closest_interferer(topo: &Topology, k: usize) -> Result<usize> {
    if topo.k() < 2 {
        return Err(Error::CountTooSmall {
            what: "user count",
            got: topo.k(),
            min: 2,
        });
    }
    let me = &topo.users[k];
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for (j, u) in topo.users.iter().enumerate() {
        if j == k {
            continue;
        }
        let d = me.distance_to(u);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    Ok(best)
}
