//! Four-node Gaussian broadcast relay channel with a common message only:
//! source 1, relay 2, destinations 3 and 4. Relay and destinations form a
//! unit equilateral triangle and the source sits on the relay's far side at
//! distance `d_12`, so `d_13^2 = d_14^2 = 1/4 + (sqrt(3)/2 + d_12)^2`.

use serde::Serialize;

use crate::channel::PropagationModel;
use crate::error::{invalid, Result};
use crate::optimizer::{maximize, OptimizerConfig, SearchOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrcConfig {
    pub p1: f64,
    pub p2: f64,
    pub n2: f64,
    pub n3: f64,
    pub n4: f64,
    /// Source-relay distance, m.
    pub d12: f64,
    /// Source power fraction spent on the codeword the relay repeats.
    pub alpha: f64,
    #[serde(skip)]
    pub propagation: PropagationModel,
}

impl Default for BrcConfig {
    fn default() -> Self {
        Self {
            p1: 10.0,
            p2: 10.0,
            n2: 1.0,
            n3: 1.0,
            n4: 1.0,
            d12: 1.0,
            alpha: 0.0,
            propagation: PropagationModel::default(),
        }
    }
}

impl BrcConfig {
    pub const D23: f64 = 1.0;
    pub const D24: f64 = 1.0;

    /// `d_13 = d_14`.
    pub fn d13(&self) -> f64 {
        let a = 3f64.sqrt() / 2.0 + self.d12;
        (0.25 + a * a).sqrt()
    }

    fn check(&self) -> Result<()> {
        for (name, p) in [("P_1", self.p1), ("P_2", self.p2)] {
            if !p.is_finite() || p < 0.0 {
                return invalid(format!("{name} must be finite and >= 0, got {p}"));
            }
        }
        for (name, n) in [("N_2", self.n2), ("N_3", self.n3), ("N_4", self.n4)] {
            if !n.is_finite() || n <= 0.0 {
                return invalid(format!("{name} must be positive, got {n}"));
            }
        }
        if !self.d12.is_finite() || self.d12 <= 0.0 {
            return invalid(format!("d_12 must be positive, got {}", self.d12));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return invalid(format!("alpha = {} outside [0, 1]", self.alpha));
        }
        Ok(())
    }
}

/// Reception rates at the relay and both destinations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrcRates {
    pub relay: f64,
    pub destination3: f64,
    pub destination4: f64,
    /// Achievable common rate, the minimum of the three.
    pub common_rate: f64,
}

fn rate(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

fn gains(cfg: &BrcConfig) -> (f64, f64, f64, f64) {
    let g = |d: f64| cfg.propagation.gain_at(d);
    (g(cfg.d12), g(cfg.d13()), g(BrcConfig::D23), g(BrcConfig::D24))
}

/// One-hop myopic: a point-to-point source-relay link followed by a
/// broadcast from the relay; destinations treat the source as noise.
pub fn brc_onehop_common_rate(cfg: &BrcConfig) -> Result<BrcRates> {
    cfg.check()?;
    let (g12, g13, g23, g24) = gains(cfg);
    let relay = rate(g12 * cfg.p1 / cfg.n2);
    // d_14 = d_13 by symmetry
    let destination3 = rate(g23 * cfg.p2 / (cfg.n3 + g13 * cfg.p1));
    let destination4 = rate(g24 * cfg.p2 / (cfg.n4 + g13 * cfg.p1));
    Ok(BrcRates {
        relay,
        destination3,
        destination4,
        common_rate: relay.min(destination3).min(destination4),
    })
}

/// Omniscient: the source spends `alpha` of its power on the codeword the
/// relay sends, so it adds coherently at the destinations.
pub fn brc_omniscient_common_rate(cfg: &BrcConfig) -> Result<BrcRates> {
    cfg.check()?;
    let (g12, g13, g23, g24) = gains(cfg);
    let (p1, p2, a) = (cfg.p1, cfg.p2, cfg.alpha);
    let relay = rate((1.0 - a) * g12 * p1 / cfg.n2);
    let at = |g2: f64, n: f64| rate((g13 * p1 + g2 * p2 + 2.0 * (a * g13 * g2 * p1 * p2).sqrt()) / n);
    let destination3 = at(g23, cfg.n3);
    let destination4 = at(g24, cfg.n4);
    Ok(BrcRates {
        relay,
        destination3,
        destination4,
        common_rate: relay.min(destination3).min(destination4),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrcOptimum {
    pub config: BrcConfig,
    pub rates: BrcRates,
    pub search: SearchOutcome,
}

/// Best omniscient split `alpha` for the channel in `template`.
pub fn brc_optimize(template: &BrcConfig, config: &OptimizerConfig) -> Result<BrcOptimum> {
    template.check()?;
    let with = |a: f64| BrcConfig { alpha: a, ..*template };
    let objective = |x: &[f64]| {
        brc_omniscient_common_rate(&with(x[0])).map_or(f64::NEG_INFINITY, |r| r.common_rate)
    };
    let outcome = maximize(1, &objective, &[], config)?;
    let best = with(outcome.point[0]);
    Ok(BrcOptimum {
        rates: brc_omniscient_common_rate(&best)?,
        config: best,
        search: outcome,
    })
}
