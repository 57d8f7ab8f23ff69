//! Four-node Gaussian multiple-access relay channel: sources 1 and 2, relay
//! 3, destination 4. Sources and relay sit on a unit equilateral triangle;
//! the destination lies on the relay's far side at distance `d_34`, so
//! `d_14^2 = d_24^2 = (sqrt(3)/2 + d_34)^2 + 1/4`.

use serde::Serialize;

use crate::channel::PropagationModel;
use crate::error::{invalid, Result};
use crate::optimizer::{maximize, OptimizerConfig, SearchOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarcConfig {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub n3: f64,
    pub n4: f64,
    /// Relay-destination distance, m.
    pub d34: f64,
    /// Source power fractions spent on cooperative codewords.
    pub alpha1: f64,
    pub alpha2: f64,
    /// Relay power fractions for each source's cooperative codeword.
    pub beta1: f64,
    pub beta2: f64,
    #[serde(skip)]
    pub propagation: PropagationModel,
}

impl Default for MarcConfig {
    fn default() -> Self {
        Self {
            p1: 10.0,
            p2: 10.0,
            p3: 10.0,
            n3: 1.0,
            n4: 1.0,
            d34: 1.0,
            alpha1: 0.0,
            alpha2: 0.0,
            beta1: 0.5,
            beta2: 0.5,
            propagation: PropagationModel::default(),
        }
    }
}

impl MarcConfig {
    pub const D13: f64 = 1.0;
    pub const D23: f64 = 1.0;

    /// `d_14 = d_24`.
    pub fn d14(&self) -> f64 {
        let a = 3f64.sqrt() / 2.0 + self.d34;
        (a * a + 0.25).sqrt()
    }

    fn check_channel(&self) -> Result<()> {
        for (name, p) in [("P_1", self.p1), ("P_2", self.p2), ("P_3", self.p3)] {
            if !p.is_finite() || p < 0.0 {
                return invalid(format!("{name} must be finite and >= 0, got {p}"));
            }
        }
        for (name, n) in [("N_3", self.n3), ("N_4", self.n4)] {
            if !n.is_finite() || n <= 0.0 {
                return invalid(format!("{name} must be positive, got {n}"));
            }
        }
        if !self.d34.is_finite() || self.d34 <= 0.0 {
            return invalid(format!("d_34 must be positive, got {}", self.d34));
        }
        Ok(())
    }

    fn check_splits(&self) -> Result<()> {
        for (name, a) in [("alpha_1", self.alpha1), ("alpha_2", self.alpha2)] {
            if !(0.0..=1.0).contains(&a) {
                return invalid(format!("{name} = {a} outside [0, 1]"));
            }
        }
        if self.beta1 < 0.0 || self.beta2 < 0.0 || (self.beta1 + self.beta2 - 1.0).abs() > 1e-12 {
            return invalid(format!(
                "relay split beta = ({}, {}) must be non-negative and sum to 1",
                self.beta1, self.beta2
            ));
        }
        Ok(())
    }

    fn gains(&self) -> (f64, f64, f64, f64, f64) {
        let g = |d: f64| self.propagation.gain_at(d);
        let d14 = self.d14();
        (g(Self::D13), g(Self::D23), g(d14), g(d14), g(self.d34))
    }
}

/// Reception (sum) rates at the relay and the destination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarcRates {
    /// Sum rate the relay can decode, `R'_3`.
    pub relay: f64,
    /// Sum rate the destination can decode, `R'_4`.
    pub destination: f64,
    /// Achievable sum rate `min(R'_3, R'_4)`.
    pub sum_rate: f64,
    /// Individual-rate bounds on `R_1` and `R_2` (the corners of the region).
    pub individual: [f64; 2],
}

fn rate(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

/// One-hop myopic decode-forward: a multiple-access channel into the relay
/// cascaded with a relay-destination link that sees both sources as noise.
pub fn marc_onehop_sumrate(cfg: &MarcConfig) -> Result<MarcRates> {
    cfg.check_channel()?;
    let (g13, g23, g14, g24, g34) = cfg.gains();
    let relay = rate((g13 * cfg.p1 + g23 * cfg.p2) / cfg.n3);
    let destination = rate(g34 * cfg.p3 / (cfg.n4 + g14 * cfg.p1 + g24 * cfg.p2));
    Ok(MarcRates {
        relay,
        destination,
        sum_rate: relay.min(destination),
        individual: [rate(g13 * cfg.p1 / cfg.n3), rate(g23 * cfg.p2 / cfg.n3)],
    })
}

/// Omniscient decode-forward: sources split power between fresh
/// information and a codeword the relay repeats coherently.
pub fn marc_omniscient_sumrate(cfg: &MarcConfig) -> Result<MarcRates> {
    cfg.check_channel()?;
    cfg.check_splits()?;
    let (g13, g23, g14, g24, g34) = cfg.gains();
    let (p1, p2, p3) = (cfg.p1, cfg.p2, cfg.p3);
    let (a1, a2, b1, b2) = (cfg.alpha1, cfg.alpha2, cfg.beta1, cfg.beta2);
    let relay = rate((g13 * (1.0 - a1) * p1 + g23 * (1.0 - a2) * p2) / cfg.n3);
    let destination = rate(
        (g14 * p1
            + g24 * p2
            + g34 * p3
            + 2.0 * (a1 * b1 * g14 * g34 * p1 * p3).sqrt()
            + 2.0 * (a2 * b2 * g24 * g34 * p2 * p3).sqrt())
            / cfg.n4,
    );
    // R_1 <= min(I(X1;Y3|U1,U2,X2,X3), I(X1,X3;Y4|U2,X2)), likewise R_2
    let coop = |g_s: f64, p: f64, a: f64, b: f64| {
        let amp = (g_s * a * p).sqrt() + (g34 * b * p3).sqrt();
        amp * amp + g_s * (1.0 - a) * p
    };
    let r1 = rate(g13 * (1.0 - a1) * p1 / cfg.n3).min(rate(coop(g14, p1, a1, b1) / cfg.n4));
    let r2 = rate(g23 * (1.0 - a2) * p2 / cfg.n3).min(rate(coop(g24, p2, a2, b2) / cfg.n4));
    Ok(MarcRates {
        relay,
        destination,
        sum_rate: relay.min(destination),
        individual: [r1, r2],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MarcStrategy {
    OneHop,
    Omniscient,
}

/// What [`marc_optimize`] searches over.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MarcSearch {
    /// Search `alpha_1`, `alpha_2`, `beta_1` independently instead of the
    /// symmetric `alpha_1 = alpha_2`, `beta_1 = beta_2 = 1/2`.
    pub asymmetric: bool,
    /// Also search the common source power `P_1 = P_2` over this range (W).
    pub source_power: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarcOptimum {
    /// Configuration at the optimum (searched fields filled in).
    pub config: MarcConfig,
    /// Recomputed at `config`.
    pub rates: MarcRates,
    pub search: SearchOutcome,
}

/// Maximizes the sum rate of `strategy` over the splits (omniscient) and,
/// when requested, the common source power.
pub fn marc_optimize(
    template: &MarcConfig,
    strategy: MarcStrategy,
    search: MarcSearch,
    config: &OptimizerConfig,
) -> Result<MarcOptimum> {
    template.check_channel()?;
    let power_range = match search.source_power {
        Some((lo, hi)) if !(lo >= 0.0 && hi > lo && hi.is_finite()) => {
            return invalid(format!("source power range [{lo}, {hi}] is invalid"));
        }
        other => other,
    };
    let split_dims = match (strategy, search.asymmetric) {
        (MarcStrategy::OneHop, _) => 0,
        (MarcStrategy::Omniscient, false) => 1,
        (MarcStrategy::Omniscient, true) => 3,
    };
    let dims = split_dims + usize::from(power_range.is_some());
    let build = |x: &[f64]| {
        let mut c = *template;
        let mut rest = x;
        if let Some((lo, hi)) = power_range {
            let p = lo + (hi - lo) * x[0];
            c.p1 = p;
            c.p2 = p;
            rest = &x[1..];
        }
        match (strategy, search.asymmetric) {
            (MarcStrategy::OneHop, _) => {}
            (MarcStrategy::Omniscient, false) => {
                c.alpha1 = rest[0];
                c.alpha2 = rest[0];
                c.beta1 = 0.5;
                c.beta2 = 0.5;
            }
            (MarcStrategy::Omniscient, true) => {
                c.alpha1 = rest[0];
                c.alpha2 = rest[1];
                c.beta1 = rest[2];
                c.beta2 = 1.0 - rest[2];
            }
        }
        c
    };
    let evaluate = |c: &MarcConfig| match strategy {
        MarcStrategy::OneHop => marc_onehop_sumrate(c),
        MarcStrategy::Omniscient => marc_omniscient_sumrate(c),
    };
    let objective = |x: &[f64]| evaluate(&build(x)).map_or(f64::NEG_INFINITY, |r| r.sum_rate);
    let outcome = maximize(dims, &objective, &[], config)?;
    let best = build(&outcome.point);
    Ok(MarcOptimum {
        rates: evaluate(&best)?,
        config: best,
        search: outcome,
    })
}
