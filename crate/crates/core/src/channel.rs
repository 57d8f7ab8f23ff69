//! Node placement, path loss and power bookkeeping.
//!
//! Nodes are numbered from 1 as in the usual relay-network convention: node 1
//! is the source, node `T` the destination, nodes `2..T-1` relays. Only nodes
//! `1..T-1` transmit and only nodes `2..T` receive.

use crate::error::{invalid, Result};

/// Distances below this are rejected; the path-loss gain diverges at zero.
pub const MIN_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    /// Positions along a line; distances are differences of positions.
    Line(Vec<f64>),
    /// Full symmetric matrix, row-major, `n * n`.
    Matrix(Vec<f64>),
}

/// Pairwise node distances in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGeometry {
    nodes: usize,
    layout: Layout,
}

impl NetworkGeometry {
    /// Nodes on a straight line, node `i + 1` placed `spacings[i - 1]` meters
    /// after node `i`.
    pub fn linear(spacings: &[f64]) -> Result<Self> {
        if spacings.len() + 1 < 3 {
            return invalid(format!(
                "a relay network needs at least 3 nodes, got {}",
                spacings.len() + 1
            ));
        }
        let mut positions = Vec::with_capacity(spacings.len() + 1);
        positions.push(0.0);
        for (i, &s) in spacings.iter().enumerate() {
            if !s.is_finite() || s < MIN_DISTANCE {
                return invalid(format!(
                    "spacing between nodes {} and {} must be positive (>= {MIN_DISTANCE} m), got {s}",
                    i + 1,
                    i + 2
                ));
            }
            positions.push(positions[i] + s);
        }
        Ok(Self {
            nodes: positions.len(),
            layout: Layout::Line(positions),
        })
    }

    /// `count` nodes spaced `spacing` meters apart.
    pub fn equally_spaced(count: usize, spacing: f64) -> Result<Self> {
        if count < 3 {
            return invalid(format!("a relay network needs at least 3 nodes, got {count}"));
        }
        Self::linear(&vec![spacing; count - 1])
    }

    /// Arbitrary geometry from a full distance matrix (0-based rows, node `i`
    /// is row `i - 1`).
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 3 {
            return invalid(format!("a relay network needs at least 3 nodes, got {n}"));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return invalid(format!("distance row {} has {} entries, expected {n}", i + 1, row.len()));
            }
            flat.extend_from_slice(row);
        }
        for i in 0..n {
            if flat[i * n + i] != 0.0 {
                return invalid(format!("d_{0}{0} must be 0", i + 1));
            }
            for t in 0..n {
                if i == t {
                    continue;
                }
                let d = flat[i * n + t];
                if !d.is_finite() || d < MIN_DISTANCE {
                    return invalid(format!("d_{}{} = {d} must be positive", i + 1, t + 1));
                }
                if d != flat[t * n + i] {
                    return invalid(format!("distance matrix not symmetric at ({}, {})", i + 1, t + 1));
                }
            }
        }
        Ok(Self {
            nodes: n,
            layout: Layout::Matrix(flat),
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// Distance between nodes `i` and `t` (1-based). Panics on out-of-range ids.
    pub fn distance(&self, i: usize, t: usize) -> f64 {
        assert!(
            (1..=self.nodes).contains(&i) && (1..=self.nodes).contains(&t),
            "node id out of range"
        );
        match &self.layout {
            Layout::Line(pos) => (pos[t - 1] - pos[i - 1]).abs(),
            Layout::Matrix(m) => m[(i - 1) * self.nodes + (t - 1)],
        }
    }

    /// Consecutive spacings `d_12, d_23, ...` when the nodes are collinear in
    /// index order.
    pub fn spacings(&self) -> Vec<f64> {
        (1..self.nodes).map(|i| self.distance(i, i + 1)).collect()
    }

    /// Checks `d_ik = d_ij + d_jk` for every `i < j < k` within `rel_tol`.
    pub fn is_collinear(&self, rel_tol: f64) -> bool {
        let n = self.nodes;
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    let lhs = self.distance(i, k);
                    let rhs = self.distance(i, j) + self.distance(j, k);
                    if (lhs - rhs).abs() > rel_tol * lhs.abs().max(rhs.abs()) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Power-law path loss `lambda = kappa * d^(-eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationModel {
    kappa: f64,
    eta: f64,
}

impl Default for PropagationModel {
    fn default() -> Self {
        Self { kappa: 1.0, eta: 2.0 }
    }
}

impl PropagationModel {
    /// Physical model: `eta >= 2` (free space is 2).
    pub fn new(kappa: f64, eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta < 2.0 {
            return invalid(format!(
                "path-loss exponent eta must be >= 2 (free space is 2), got {eta}; use the exploratory override for 1 < eta < 2"
            ));
        }
        Self::exploratory(kappa, eta)
    }

    /// Same as [`PropagationModel::new`] but admits `1 < eta < 2`.
    pub fn exploratory(kappa: f64, eta: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa <= 0.0 {
            return invalid(format!("kappa must be positive, got {kappa}"));
        }
        if !eta.is_finite() || eta <= 1.0 {
            return invalid(format!("path-loss exponent eta must exceed 1, got {eta}"));
        }
        Ok(Self { kappa, eta })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Gain at distance `d`; no validation.
    #[inline]
    pub fn gain_at(&self, d: f64) -> f64 {
        if self.eta == 2.0 {
            self.kappa / (d * d)
        } else {
            self.kappa * d.powf(-self.eta)
        }
    }
}

/// Transmit powers `P_1..P_{T-1}` and receiver noise powers `N_2..N_T`, in W.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerConfig {
    transmit: Vec<f64>,
    noise: Vec<f64>,
}

impl PowerConfig {
    pub fn new(transmit: Vec<f64>, noise: Vec<f64>) -> Result<Self> {
        if transmit.len() != noise.len() {
            return invalid(format!(
                "{} transmit powers but {} noise powers; both must have T-1 entries",
                transmit.len(),
                noise.len()
            ));
        }
        if transmit.len() < 2 {
            return invalid("need powers for at least 3 nodes");
        }
        for (i, &p) in transmit.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return invalid(format!("P_{} must be finite and >= 0, got {p}", i + 1));
            }
        }
        for (i, &n) in noise.iter().enumerate() {
            if !n.is_finite() || n <= 0.0 {
                return invalid(format!("N_{} must be finite and > 0, got {n}", i + 2));
            }
        }
        Ok(Self { transmit, noise })
    }

    /// Every transmitter at `power`, every receiver with noise `noise`.
    pub fn uniform(nodes: usize, power: f64, noise: f64) -> Result<Self> {
        if nodes < 3 {
            return invalid(format!("a relay network needs at least 3 nodes, got {nodes}"));
        }
        Self::new(vec![power; nodes - 1], vec![noise; nodes - 1])
    }

    pub fn node_count(&self) -> usize {
        self.transmit.len() + 1
    }

    /// `P_i` for transmitter `i` in `1..T-1`.
    pub fn transmit(&self, i: usize) -> f64 {
        self.transmit[i - 1]
    }

    /// `N_t` for receiver `t` in `2..T`.
    pub fn noise(&self, t: usize) -> f64 {
        self.noise[t - 2]
    }

    pub fn transmit_powers(&self) -> &[f64] {
        &self.transmit
    }

    pub fn noise_powers(&self) -> &[f64] {
        &self.noise
    }

    /// Per-node power scaling `s_t` in `[0, 1]` applied to the transmit
    /// powers. This lets a node back off below its nominal power; every
    /// evaluator uses unit scale unless the caller opts in here.
    pub fn scaled(&self, scales: &[f64]) -> Result<Self> {
        if scales.len() != self.transmit.len() {
            return invalid(format!(
                "{} scale factors for {} transmitters",
                scales.len(),
                self.transmit.len()
            ));
        }
        if let Some((i, s)) = scales
            .iter()
            .enumerate()
            .find(|(_, s)| !(0.0..=1.0).contains(*s))
        {
            return invalid(format!("scale s_{} = {s} outside [0, 1]", i + 1));
        }
        let transmit = self.transmit.iter().zip(scales).map(|(p, s)| p * s).collect();
        Self::new(transmit, self.noise.clone())
    }
}

/// `lambda_it = kappa * d_it^(-eta)`.
pub fn gain(geometry: &NetworkGeometry, prop: &PropagationModel, i: usize, t: usize) -> Result<f64> {
    let n = geometry.node_count();
    if !(1..=n).contains(&i) || !(1..=n).contains(&t) {
        return invalid(format!("node ids ({i}, {t}) outside 1..={n}"));
    }
    if i == t {
        return invalid(format!("no self-gain for node {i}"));
    }
    Ok(prop.gain_at(geometry.distance(i, t)))
}

/// Power received at node `t` from transmitter `i`: `lambda_it * P_i`.
pub fn received_power(
    geometry: &NetworkGeometry,
    prop: &PropagationModel,
    power: &PowerConfig,
    i: usize,
    t: usize,
) -> Result<f64> {
    let n = geometry.node_count();
    if power.node_count() != n {
        return invalid(format!(
            "power config is for {} nodes, geometry has {n}",
            power.node_count()
        ));
    }
    if i == n {
        return invalid(format!("node {i} is the destination and does not transmit"));
    }
    Ok(gain(geometry, prop, i, t)? * power.transmit(i))
}
