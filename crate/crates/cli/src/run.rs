//! Turns a validated config into a [`Table`], one row per sweep point.

use myopic_df::asymptotics::large_t_report;
use myopic_df::discrete_df::khop_dmc_rate;
use myopic_df::{
    brc_omniscient_common_rate, brc_onehop_common_rate, brc_optimize, efficiency, marc_onehop_sumrate,
    marc_optimize, optimize_permutation, optimize_spacing, optimize_splits, optimize_views, BrcConfig,
    ChainSplits, CombiningMode, GaussianRelayNetwork, MarcSearch, MarcStrategy, NetworkGeometry, OptimumResult,
    Permutation, PowerConfig, Result, Strategy,
};
use rayon::prelude::*;

use crate::config::{
    DiscreteParams, ExperimentConfig, LargeParams, MarcParams, MrcParams, Params, StrategySpec, View,
};
use crate::report::{Cell, Series, Table};

type Row = Vec<(String, Cell)>;

/// Evaluates every sweep point (concurrently) and assembles the table in
/// sweep order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Table> {
    let points: Vec<Option<f64>> = match &cfg.sweep {
        Some(s) => s.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let rows: Vec<Row> = points.par_iter().map(|&x| evaluate(cfg, x)).collect::<Result<_>>()?;
    let header: Vec<String> = rows[0].iter().map(|(h, _)| h.clone()).collect();
    debug_assert!(rows.iter().all(|r| r.iter().map(|(h, _)| h).eq(header.iter())));
    let series = series(cfg, &header);
    Ok(Table {
        rows: rows.into_iter().map(|r| r.into_iter().map(|(_, c)| c).collect()).collect(),
        header,
        series,
        y_label: "rate (bits per channel use)".into(),
        log_x: cfg.sweep.as_ref().is_some_and(|s| s.log),
    })
}

fn evaluate(cfg: &ExperimentConfig, x: Option<f64>) -> Result<Row> {
    let mut row: Row = match (&cfg.sweep, x) {
        (Some(s), Some(x)) => {
            let v = if s.variable == "nodes" { Cell::Int(x.round() as usize) } else { Cell::Num(x) };
            vec![(s.variable.clone(), v)]
        }
        _ => vec![("case".into(), Cell::Int(1))],
    };
    let var = cfg.sweep.as_ref().map(|s| s.variable.as_str());
    let swept = |name: &str| if var == Some(name) { x } else { None };
    match &cfg.params {
        Params::Mrc(p) => mrc(cfg, p, swept, &mut row)?,
        Params::Marc(p) => marc(cfg, p, swept, &mut row)?,
        Params::Brc(p) => brc(cfg, p, swept, &mut row)?,
        Params::Large(p) => large(cfg, p, swept, &mut row)?,
        Params::Discrete(p) => discrete(cfg, p, &mut row)?,
    }
    Ok(row)
}

fn mode_suffix(mode: CombiningMode) -> &'static str {
    match mode {
        CombiningMode::Coherent => "",
        CombiningMode::Fading => "_fading",
    }
}

/// Column prefix and view size of a chain strategy.
fn chain_label(s: &StrategySpec, nodes: usize) -> (String, usize) {
    let k = match s.view {
        View::Hops(k) => k,
        View::Omniscient => nodes - 1,
    };
    let base = if k == nodes - 1 { "omni".to_string() } else { format!("k{k}") };
    (format!("{base}{}", mode_suffix(s.mode)), k)
}

fn legend(prefix: &str) -> String {
    let (base, fading) = match prefix.strip_suffix("_fading") {
        Some(b) => (b, " (fading)"),
        None => (prefix, ""),
    };
    let name = match base {
        "omni" => "omniscient".to_string(),
        "onehop" => "one-hop".to_string(),
        k => format!("k = {}", &k[1..]),
    };
    format!("{name}{fading}")
}

fn series(cfg: &ExperimentConfig, header: &[String]) -> Vec<Series> {
    header
        .iter()
        .enumerate()
        .filter_map(|(column, h)| {
            let prefix = h
                .strip_suffix("_rate_bits_per_use")
                .filter(|p| !p.contains("relay") && !p.contains("destination"))?;
            let prefix = prefix
                .strip_suffix("_sum")
                .or_else(|| prefix.strip_suffix("_common"))
                .unwrap_or(prefix);
            let label = if prefix == "min" {
                format!("k = 2, T = {}", cfg.node_count().unwrap_or(0))
            } else {
                legend(prefix)
            };
            Some(Series { label, column })
        })
        .collect()
}

/// Adds `rho_<label>` for every non-omniscient strategy whose mode also has
/// an omniscient strategy.
fn push_efficiencies(row: &mut Row, rated: &[(String, CombiningMode, bool, f64)]) -> Result<()> {
    for (label, mode, omni, rate) in rated {
        if *omni {
            continue;
        }
        if let Some((_, _, _, o)) = rated.iter().find(|r| r.2 && r.1 == *mode) {
            let cell = if *o > 0.0 { Cell::Num(efficiency(*rate, *o)?.value) } else { Cell::Empty };
            row.push((format!("rho_{label}"), cell));
        }
    }
    Ok(())
}

fn mrc(cfg: &ExperimentConfig, p: &MrcParams, swept: impl Fn(&str) -> Option<f64>, row: &mut Row) -> Result<()> {
    let n = p.nodes;
    let power = swept("power_w").unwrap_or(p.power);
    let noise = swept("noise_w").unwrap_or(p.noise);
    let spacings = match swept("spacing_m") {
        Some(d) => vec![d; n - 1],
        None => p.spacings.clone(),
    };
    let powers = PowerConfig::uniform(n, power, noise)?;
    let net = GaussianRelayNetwork::new(NetworkGeometry::linear(&spacings)?, cfg.propagation, powers.clone())?;
    let perm = match &p.relay_order {
        Some(o) => Permutation::from_relays(n, o)?,
        None => Permutation::identity(n),
    };
    let opt = &cfg.optimizer;

    let mut results: Vec<Option<OptimumResult>> = vec![None; cfg.strategies.len()];
    if p.optimize_spacing || p.optimize_permutation {
        for (slot, s) in results.iter_mut().zip(&cfg.strategies) {
            let (_, k) = chain_label(s, n);
            *slot = Some(if p.optimize_spacing {
                let strategy = Strategy::khop(n, k)?.with_mode(s.mode);
                optimize_spacing(spacings.iter().sum(), &strategy, &powers, &cfg.propagation, opt)?
            } else {
                optimize_permutation(&net, k, s.mode, opt)?
            });
        }
    } else {
        // one ascending chain of views per mode keeps rates monotone in k
        for mode in [CombiningMode::Coherent, CombiningMode::Fading] {
            let mut ks: Vec<usize> = cfg
                .strategies
                .iter()
                .filter(|s| s.mode == mode)
                .map(|s| chain_label(s, n).1)
                .collect();
            if ks.is_empty() {
                continue;
            }
            ks.sort_unstable();
            let base = Strategy::khop(n, 1)?.with_mode(mode).with_permutation(perm.clone())?;
            let found = if ks.len() == 1 {
                vec![optimize_splits(&net, &base.with_k(ks[0])?, opt)?]
            } else {
                optimize_views(&net, &base, &ks, opt)?
            };
            for (slot, s) in results.iter_mut().zip(&cfg.strategies) {
                if s.mode == mode {
                    let k = chain_label(s, n).1;
                    *slot = found.iter().find(|r| r.strategy.k() == k).cloned();
                }
            }
        }
    }

    let mut incomplete = false;
    let mut rated = Vec::new();
    for (s, r) in cfg.strategies.iter().zip(results) {
        let r = r.expect("every strategy evaluated");
        let (label, k) = chain_label(s, n);
        incomplete |= !r.complete;
        row.push((format!("{label}_rate_bits_per_use"), Cell::Num(r.rate())));
        row.push((format!("{label}_bottleneck_node"), Cell::Int(r.report.bottleneck)));
        let order = r.strategy.permutation();
        if p.optimize_permutation {
            let relays: Vec<String> = order.order()[1..n - 1].iter().map(usize::to_string).collect();
            row.push((format!("{label}_relay_order"), Cell::Text(relays.join(" "))));
        }
        if let Some(g) = &r.geometry {
            for (i, d) in g.spacings().into_iter().enumerate() {
                row.push((format!("{label}_spacing_{}_m", i + 1), Cell::Num(d)));
            }
        }
        for q in 1..n {
            let fractions = r.splits.row(order.node_at(q));
            for o in 0..k.min(n - q) {
                row.push((format!("{label}_split_{q}_{o}"), Cell::Num(fractions[o])));
            }
        }
        rated.push((label, s.mode, k == n - 1, r.rate()));
    }
    push_efficiencies(row, &rated)?;
    row.push(("incomplete".into(), Cell::Flag(incomplete)));
    Ok(())
}

fn two_way_label(s: &StrategySpec) -> &'static str {
    if s.view == View::Omniscient {
        "omni"
    } else {
        "onehop"
    }
}

fn marc(cfg: &ExperimentConfig, p: &MarcParams, swept: impl Fn(&str) -> Option<f64>, row: &mut Row) -> Result<()> {
    let mut channel = p.channel;
    if let Some(x) = swept("power_w") {
        channel.p1 = x;
        channel.p2 = x;
    }
    channel.p3 = swept("p3_w").unwrap_or(channel.p3);
    channel.d34 = swept("d34_m").unwrap_or(channel.d34);
    let search = MarcSearch {
        asymmetric: p.asymmetric,
        source_power: p.source_power_range,
    };
    let mut incomplete = false;
    let mut rated = Vec::new();
    for s in &cfg.strategies {
        let label = two_way_label(s);
        let omni = s.view == View::Omniscient;
        let (config, rates) = if omni {
            let best = marc_optimize(&channel, MarcStrategy::Omniscient, search, &cfg.optimizer)?;
            incomplete |= !best.search.complete;
            (best.config, best.rates)
        } else if p.source_power_range.is_some() {
            let best = marc_optimize(&channel, MarcStrategy::OneHop, search, &cfg.optimizer)?;
            incomplete |= !best.search.complete;
            (best.config, best.rates)
        } else {
            (channel, marc_onehop_sumrate(&channel)?)
        };
        row.push((format!("{label}_sum_rate_bits_per_use"), Cell::Num(rates.sum_rate)));
        row.push((format!("{label}_relay_rate_bits_per_use"), Cell::Num(rates.relay)));
        row.push((format!("{label}_destination_rate_bits_per_use"), Cell::Num(rates.destination)));
        row.push((format!("{label}_r1_bound_bits_per_use"), Cell::Num(rates.individual[0])));
        row.push((format!("{label}_r2_bound_bits_per_use"), Cell::Num(rates.individual[1])));
        if omni {
            row.push((format!("{label}_alpha1"), Cell::Num(config.alpha1)));
            row.push((format!("{label}_alpha2"), Cell::Num(config.alpha2)));
            row.push((format!("{label}_beta1"), Cell::Num(config.beta1)));
            row.push((format!("{label}_beta2"), Cell::Num(config.beta2)));
        }
        if p.source_power_range.is_some() {
            row.push((format!("{label}_source_power_w"), Cell::Num(config.p1)));
        }
        rated.push((label.to_string(), CombiningMode::Coherent, omni, rates.sum_rate));
    }
    push_efficiencies(row, &rated)?;
    row.push(("incomplete".into(), Cell::Flag(incomplete)));
    Ok(())
}

fn brc(cfg: &ExperimentConfig, p: &BrcConfig, swept: impl Fn(&str) -> Option<f64>, row: &mut Row) -> Result<()> {
    let mut channel = *p;
    if let Some(x) = swept("power_w") {
        channel.p1 = x;
        channel.p2 = x;
    }
    channel.d12 = swept("d12_m").unwrap_or(channel.d12);
    let mut incomplete = false;
    let mut rated = Vec::new();
    for s in &cfg.strategies {
        let label = two_way_label(s);
        let omni = s.view == View::Omniscient;
        let (alpha, rates) = if omni {
            let best = brc_optimize(&channel, &cfg.optimizer)?;
            incomplete |= !best.search.complete;
            // the reported rates are recomputed at the returned split
            debug_assert_eq!(best.rates, brc_omniscient_common_rate(&best.config)?);
            (Some(best.config.alpha), best.rates)
        } else {
            (None, brc_onehop_common_rate(&channel)?)
        };
        row.push((format!("{label}_common_rate_bits_per_use"), Cell::Num(rates.common_rate)));
        row.push((format!("{label}_relay_rate_bits_per_use"), Cell::Num(rates.relay)));
        row.push((format!("{label}_destination3_rate_bits_per_use"), Cell::Num(rates.destination3)));
        row.push((format!("{label}_destination4_rate_bits_per_use"), Cell::Num(rates.destination4)));
        if let Some(a) = alpha {
            row.push((format!("{label}_alpha"), Cell::Num(a)));
        }
        rated.push((label.to_string(), CombiningMode::Coherent, omni, rates.common_rate));
    }
    push_efficiencies(row, &rated)?;
    row.push(("incomplete".into(), Cell::Flag(incomplete)));
    Ok(())
}

fn large(cfg: &ExperimentConfig, p: &LargeParams, swept: impl Fn(&str) -> Option<f64>, row: &mut Row) -> Result<()> {
    let nodes = swept("nodes").map_or(p.nodes, |x| x.round() as usize);
    let power = swept("power_w").unwrap_or(p.power);
    let rep = large_t_report(nodes, power, p.noise, &cfg.propagation, &ChainSplits::Uniform(p.alpha))?;
    row.push(("min_rate_bits_per_use".into(), Cell::Num(rep.min_rate)));
    row.push(("bottleneck_node".into(), Cell::Int(rep.bottleneck)));
    row.push((
        "max_interior_interference_w".into(),
        rep.max_interior_interference.map_or(Cell::Empty, Cell::Num),
    ));
    row.push(("max_interference_w".into(), Cell::Num(rep.max_interference)));
    row.push(("interference_bound_w".into(), Cell::Num(rep.interference_bound)));
    row.push(("within_bound".into(), Cell::Flag(rep.within_bound)));
    Ok(())
}

fn discrete(cfg: &ExperimentConfig, p: &DiscreteParams, row: &mut Row) -> Result<()> {
    let n = p.channel.node_count();
    let perm = match &p.relay_order {
        Some(o) => Permutation::from_relays(n, o)?,
        None => Permutation::identity(n),
    };
    for s in &cfg.strategies {
        let (label, k) = chain_label(s, n);
        let strategy = Strategy::khop(n, k)?.with_permutation(perm.clone())?;
        let rep = khop_dmc_rate(&p.channel, &p.input, &strategy)?;
        row.push((format!("{label}_rate_bits_per_use"), Cell::Num(rep.rate)));
        row.push((format!("{label}_bottleneck_node"), Cell::Int(rep.bottleneck)));
    }
    Ok(())
}
