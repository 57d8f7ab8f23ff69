//! Route and placement searches against exhaustive oracles.

use myopic_df::optimizer::{optimize_permutation, optimize_spacing, OptimizerConfig};
use myopic_df::{CombiningMode, GaussianRelayNetwork, NetworkGeometry, PowerConfig, PropagationModel, Strategy};

fn line_network(x: &[f64], p: f64) -> GaussianRelayNetwork {
    let rows: Vec<Vec<f64>> = x.iter().map(|a| x.iter().map(|b| (a - b).abs()).collect()).collect();
    GaussianRelayNetwork::new(
        NetworkGeometry::from_matrix(&rows).unwrap(),
        PropagationModel::default(),
        PowerConfig::uniform(x.len(), p, 1.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn identity_route_wins_on_a_line() {
    let net = line_network(&[0.0, 1.0, 2.0, 3.0, 4.0], 10.0);
    for k in [1, 2] {
        let best = optimize_permutation(&net, k, CombiningMode::Coherent, &OptimizerConfig::default()).unwrap();
        assert_eq!(best.strategy.permutation().order(), &[1, 2, 3, 4, 5], "k = {k}");
    }
}

#[test]
fn reversed_relays_are_visited_in_position_order() {
    // relays 2, 3, 4 placed back to front
    let net = line_network(&[0.0, 3.0, 2.0, 1.0, 4.0], 10.0);
    let best = optimize_permutation(&net, 1, CombiningMode::Coherent, &OptimizerConfig::default()).unwrap();
    assert_eq!(best.strategy.permutation().order(), &[1, 4, 3, 2, 5]);
}

/// One-hop min rate on a collinear chain, written out directly.
fn one_hop_min_rate(gaps: &[f64], p: f64) -> f64 {
    let n = gaps.len() + 1;
    let mut x = vec![0.0];
    for g in gaps {
        x.push(x.last().unwrap() + g);
    }
    let gain = |i: usize, j: usize| (x[i] - x[j]).powi(-2);
    (1..n)
        .map(|t| {
            let noise: f64 = (0..n - 1).filter(|&j| j != t - 1 && j != t).map(|j| gain(j, t) * p).sum();
            0.5 * (1.0 + gain(t - 1, t) * p / (1.0 + noise)).log2()
        })
        .fold(f64::INFINITY, f64::min)
}

fn placed(span: f64, n: usize, p: f64) -> (Vec<f64>, f64) {
    let r = optimize_spacing(
        span,
        &Strategy::khop(n, 1).unwrap(),
        &PowerConfig::uniform(n, p, 1.0).unwrap(),
        &PropagationModel::default(),
        &OptimizerConfig::default(),
    )
    .unwrap();
    (r.geometry.as_ref().unwrap().spacings(), r.rate())
}

#[test]
fn one_hop_spacing_matches_exhaustive_search() {
    let (span, p) = (3.0f64, 10.0);
    let step = 0.002;
    let m = (span / step).round() as usize;
    let mut oracle = f64::NEG_INFINITY;
    for i in 1..m {
        for j in 1..m - i {
            let gaps = [i as f64 * step, j as f64 * step, span - (i + j) as f64 * step];
            oracle = oracle.max(one_hop_min_rate(&gaps, p));
        }
    }
    let (gaps, rate) = placed(span, 4, p);
    assert!((one_hop_min_rate(&gaps, p) - rate).abs() < 1e-12);
    assert!(rate >= oracle - 1e-9, "{rate} < grid optimum {oracle}");
    assert!(rate - oracle < 1e-3, "{rate} vs {oracle}");
}

#[test]
fn one_hop_spacing_trends_with_power() {
    let span = 4.0;
    let (high, _) = placed(span, 5, 100.0);
    assert!(high[0] < 1.0 && high[1] < 1.0, "{high:?}");
    let d12: Vec<f64> = [1.0, 10.0, 100.0].iter().map(|&p| placed(span, 5, p).0[0]).collect();
    assert!(d12[0] > d12[1] && d12[1] > d12[2], "{d12:?}");
    // noise-limited: equal spacing
    let (low, _) = placed(span, 5, 1e-3);
    for g in low {
        assert!((g - 1.0).abs() < 0.05, "{g}");
    }
}
