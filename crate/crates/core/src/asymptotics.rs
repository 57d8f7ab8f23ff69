//! Large-network behaviour of two-hop decode-forward on an equally spaced
//! chain: reception rates stay positive as the chain grows, and the power a
//! receiver treats as noise stays below `6 * zeta(eta) * kappa * P`.

use serde::Serialize;

use crate::channel::{NetworkGeometry, PowerConfig, PropagationModel};
use crate::error::{invalid, Error, Result};
use crate::gaussian_df::{GaussianRelayNetwork, ReceptionRecord, SplitMatrix, Strategy};

/// Longest chain [`large_t_report`] accepts.
pub const MAX_CHAIN_NODES: usize = 5000;

/// Terms the zeta partial sum may use before giving up.
const MAX_ZETA_TERMS: f64 = 1e8;

/// A certified value of the Riemann zeta function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaValue {
    pub eta: f64,
    pub value: f64,
    /// `|value - zeta(eta)| <= error`.
    pub error: f64,
    pub terms: usize,
}

impl ZetaValue {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.error
    }
}

/// `zeta(eta)` to within `accuracy`, from a partial sum and the integral
/// bounds on its tail.
pub fn zeta(eta: f64, accuracy: f64) -> Result<ZetaValue> {
    if eta.is_nan() {
        return invalid("eta is NaN");
    }
    if eta <= 1.0 {
        return Err(Error::Divergent(eta));
    }
    if !(accuracy > 0.0) {
        return invalid(format!("accuracy must be positive, got {accuracy}"));
    }
    // tail bracket width is about J^-eta; take J with J^-eta <= accuracy
    let j = accuracy.powf(-1.0 / eta).ceil().max(8.0);
    if j > MAX_ZETA_TERMS {
        return Err(Error::Resource(format!(
            "zeta({eta}) to {accuracy} needs about {j:.3e} terms"
        )));
    }
    let j = j as usize;
    // smallest terms first
    let partial: f64 = (1..=j).rev().map(|i| (i as f64).powf(-eta)).sum();
    let upper = (j as f64).powf(1.0 - eta) / (eta - 1.0);
    let lower = ((j + 1) as f64).powf(1.0 - eta) / (eta - 1.0);
    let rounding = 2.0 * j as f64 * f64::EPSILON * (partial + upper);
    Ok(ZetaValue {
        eta,
        value: partial + 0.5 * (lower + upper),
        error: 0.5 * (upper - lower) + rounding,
        terms: j,
    })
}

/// `6 * zeta(eta) * kappa * P`, which for eta = 2 is `pi^2 * kappa * P`.
pub fn interference_bound(eta: f64, kappa: f64, power: f64) -> Result<f64> {
    if !(power >= 0.0) || !(kappa > 0.0) {
        return invalid(format!("need kappa > 0 and P >= 0, got {kappa} and {power}"));
    }
    Ok(6.0 * zeta(eta, 1e-12)?.value * kappa * power)
}

/// Split used on the chain.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainSplits {
    /// Each node forwards the same fraction of its power.
    Uniform(f64),
    Supplied(SplitMatrix),
}

impl Default for ChainSplits {
    fn default() -> Self {
        Self::Uniform(0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeTReport {
    pub nodes: usize,
    pub min_rate: f64,
    pub bottleneck: usize,
    /// Largest interference over receivers `4..=T-3`; `None` when there are none.
    pub max_interior_interference: Option<f64>,
    pub max_interference: f64,
    pub interference_bound: f64,
    /// Every interior receiver is strictly below the bound.
    pub within_bound: bool,
    pub records: Vec<ReceptionRecord>,
}

/// Evaluates two-hop decode-forward on `T` unit-spaced nodes, each
/// transmitting `power` against receiver noise `noise`.
pub fn large_t_report(
    nodes: usize,
    power: f64,
    noise: f64,
    propagation: &PropagationModel,
    splits: &ChainSplits,
) -> Result<LargeTReport> {
    large_t_report_capped(nodes, power, noise, propagation, splits, MAX_CHAIN_NODES)
}

pub fn large_t_report_capped(
    nodes: usize,
    power: f64,
    noise: f64,
    propagation: &PropagationModel,
    splits: &ChainSplits,
    cap: usize,
) -> Result<LargeTReport> {
    if nodes > cap {
        return Err(Error::Resource(format!("{nodes} nodes exceeds the cap of {cap}")));
    }
    let strategy = Strategy::khop(nodes, 2)?;
    let splits = match splits {
        ChainSplits::Uniform(a) => SplitMatrix::forward_fraction(&strategy, *a)?,
        ChainSplits::Supplied(s) => s.clone(),
    };
    let net = GaussianRelayNetwork::new(
        NetworkGeometry::equally_spaced(nodes, 1.0)?,
        *propagation,
        PowerConfig::uniform(nodes, power, noise)?,
    )?;
    let report = net.rate_report(&splits, &strategy)?;
    let bound = interference_bound(propagation.eta(), propagation.kappa(), power)?;
    let interior = || {
        report
            .records
            .iter()
            .filter(|r| r.node >= 4 && r.node + 3 <= nodes)
    };
    let max_interior_interference = interior().map(|r| r.interference_power).reduce(f64::max);
    let within_bound = interior().all(|r| r.interference_power < bound);
    let max_interference = report
        .records
        .iter()
        .map(|r| r.interference_power)
        .fold(0.0, f64::max);
    Ok(LargeTReport {
        nodes,
        min_rate: report.rate,
        bottleneck: report.bottleneck,
        max_interior_interference,
        max_interference,
        interference_bound: bound,
        within_bound,
        records: report.records,
    })
}
