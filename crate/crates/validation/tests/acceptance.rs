//! Acceptance criteria, one PASS/FAIL line each. Runtime limits count toward
//! the verdict. Criteria run one at a time so the timings do not contend.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use myopic_df::discrete_df::{khop_dmc_rate, onehop_dmc_rate, DmcChannel, FactorizedInput};
use myopic_df::{
    brc_onehop_common_rate, brc_optimize, large_t_report, marc_onehop_sumrate, marc_optimize, optimize_views,
    zeta, BrcConfig, ChainSplits, GaussianRelayNetwork, MarcConfig, MarcSearch, MarcStrategy, NetworkGeometry,
    OptimizerConfig, Permutation, PowerConfig, PropagationModel, SplitMatrix, Strategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn rate(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

fn unit_chain(nodes: usize, power: f64) -> GaussianRelayNetwork {
    GaussianRelayNetwork::new(
        NetworkGeometry::equally_spaced(nodes, 1.0).unwrap(),
        PropagationModel::default(),
        PowerConfig::uniform(nodes, power, 1.0).unwrap(),
    )
    .unwrap()
}

fn marc_anchor() -> Verdict {
    let cfg = MarcConfig { p1: 10.0, p2: 10.0, n3: 1.0, ..MarcConfig::default() };
    let got = marc_onehop_sumrate(&cfg).unwrap().relay;
    verdict((got - 2.196).abs() <= 5e-4, format!("relay rate {got:.6} (target 2.196 +- 5e-4)"))
}

fn marc_crossover() -> Verdict {
    let template = MarcConfig { p3: 10.0, d34: 1.0, ..MarcConfig::default() };
    let search = MarcSearch { asymmetric: false, source_power: Some((0.0, 10.0)) };
    let best = marc_optimize(&template, MarcStrategy::OneHop, search, &OptimizerConfig::default()).unwrap();
    let gap = (best.rates.relay - best.rates.destination).abs();
    let p = best.config.p1;
    verdict(
        gap <= 1e-4 && (2.0..=2.4).contains(&p),
        format!("maximizer P = {p:.5} W, link gap {gap:.2e}, sum rate {:.6}", best.rates.sum_rate),
    )
}

fn low_snr_equivalence() -> Verdict {
    let ratio = |p: f64| {
        let net = unit_chain(5, p);
        let res = optimize_views(&net, &Strategy::khop(5, 1).unwrap(), &[2, 4], &OptimizerConfig::default()).unwrap();
        (res[0].rate(), res[1].rate())
    };
    let (lo2, lo_omni) = ratio(1.0);
    let (hi2, hi_omni) = ratio(100.0);
    let (rho_lo, rho_hi) = (lo2 / lo_omni, hi2 / hi_omni);
    verdict(
        rho_lo >= 0.999 && rho_hi < 0.999,
        format!(
            "P=1: {lo2:.6}/{lo_omni:.6} = {rho_lo:.6} (need >= 0.999); P=100: {hi2:.6}/{hi_omni:.6} = {rho_hi:.6} (need < 0.999)"
        ),
    )
}

/// Uniform point on the `m`-simplex.
fn simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn closed_forms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut d = vec![vec![0.0; 5]; 5];
        for i in 0..5 {
            for j in i + 1..5 {
                d[i][j] = rng.gen_range(0.5..=3.0);
                d[j][i] = d[i][j];
            }
        }
        let p: Vec<f64> = (0..4).map(|_| rng.gen_range(0.1..=50.0)).collect();
        let net = GaussianRelayNetwork::new(
            NetworkGeometry::from_matrix(&d).unwrap(),
            PropagationModel::default(),
            PowerConfig::new(p.clone(), vec![1.0; 4]).unwrap(),
        )
        .unwrap();
        // received power at node 2 from node `i` spending fraction `f`
        let rx = |i: usize, f: f64| f * p[i - 1] / (d[i - 1][1] * d[i - 1][1]);
        let amp = |i: usize, f: f64| rx(i, f).sqrt();

        let one = Strategy::khop(5, 1).unwrap();
        let want1 = rate(rx(1, 1.0) / (1.0 + rx(3, 1.0) + rx(4, 1.0)));
        let got1 = net.reception_rate(&SplitMatrix::own_only(&one), &one, 2).unwrap().rate;

        // two-hop: the codeword carried by nodes 3 and 4 is noise at node 2
        let two = Strategy::khop(5, 2).unwrap();
        let rows2: Vec<Vec<f64>> = [2, 2, 2, 1].iter().map(|&m| simplex(&mut rng, m)).collect();
        let want2 = rate(rx(1, rows2[0][0]) / (1.0 + (amp(3, rows2[2][1]) + amp(4, 1.0)).powi(2)));
        let got2 = net.reception_rate(&SplitMatrix::from_rows(rows2).unwrap(), &two, 2).unwrap().rate;

        // four-hop on five nodes: everything downstream is known
        let four = Strategy::khop(5, 4).unwrap();
        let rows4: Vec<Vec<f64>> = [4, 3, 2, 1].iter().map(|&m| simplex(&mut rng, m)).collect();
        let want4 = rate(rx(1, rows4[0][0]));
        let got4 = net.reception_rate(&SplitMatrix::from_rows(rows4).unwrap(), &four, 2).unwrap().rate;

        for (got, want) in [(got1, want1), (got2, want2), (got4, want4)] {
            let rel = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(if got == want { 0.0 } else { rel });
        }
    }
    verdict(worst <= 1e-12, format!("worst relative error {worst:.2e} over 1000 draws x 3 views"))
}

fn k_monotonicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cfg = OptimizerConfig::default();
    let mut worst_drop = f64::NEG_INFINITY;
    for case in 0..20 {
        let nodes = if case % 2 == 0 { 5 } else { 6 };
        let spacings: Vec<f64> = (1..nodes).map(|_| rng.gen_range(0.5..2.0)).collect();
        let power = rng.gen_range(0.5..50.0);
        let net = GaussianRelayNetwork::new(
            NetworkGeometry::linear(&spacings).unwrap(),
            PropagationModel::default(),
            PowerConfig::uniform(nodes, power, 1.0).unwrap(),
        )
        .unwrap();
        let ks: Vec<usize> = if nodes == 5 { vec![1, 2, 3, 4] } else { vec![1, 2, 3, 5] };
        let res = optimize_views(&net, &Strategy::khop(nodes, 1).unwrap(), &ks, &cfg).unwrap();
        for w in res.windows(2) {
            worst_drop = worst_drop.max(w[0].rate() - w[1].rate());
        }
    }
    verdict(worst_drop <= 1e-6, format!("largest decrease from k to the next view {worst_drop:.2e}"))
}

fn large_network() -> Verdict {
    let bound = PI * PI * 10.0;
    let mut ok = true;
    let mut rates = Vec::new();
    let mut parts = Vec::new();
    for t in [10, 50, 200] {
        let rep = large_t_report(t, 10.0, 1.0, &PropagationModel::default(), &ChainSplits::Uniform(0.5)).unwrap();
        let interior = rep.max_interior_interference.unwrap_or(0.0);
        ok &= interior < bound && rep.min_rate > 0.01;
        rates.push(rep.min_rate);
        parts.push(format!("T={t}: rate {:.6}, interior interference {interior:.4}", rep.min_rate));
    }
    let drift = (rates[2] - rates[1]).abs();
    ok &= drift < 1e-3;
    verdict(ok, format!("{}; bound {bound:.4}; |rate(200)-rate(50)| = {drift:.2e} (need < 1e-3)", parts.join("; ")))
}

fn zeta_values() -> Verdict {
    let z2 = zeta(2.0, 1e-8).unwrap().value;
    let z3 = zeta(3.0, 1e-8).unwrap().value;
    let (e2, e3) = ((z2 - PI * PI / 6.0).abs(), (z3 - 1.202_056_903_159_594).abs());
    verdict(e2 <= 1e-6 && e3 <= 1e-6, format!("zeta(2) = {z2:.12}, zeta(3) = {z3:.12}"))
}

/// First `d_12` of an up-set where omniscient equals one hop, or why not.
fn brc_threshold(power: f64, grid: &[f64]) -> Result<f64, String> {
    let cfg = OptimizerConfig::default();
    let equal: Vec<bool> = grid
        .iter()
        .map(|&d12| {
            let template = BrcConfig { p1: power, p2: power, d12, ..BrcConfig::default() };
            let one = brc_onehop_common_rate(&template).unwrap().common_rate;
            let omni = brc_optimize(&template, &cfg).unwrap().rates.common_rate;
            (omni - one).abs() <= 1e-6
        })
        .collect();
    let first = equal.iter().position(|&e| e).ok_or_else(|| format!("no equality at {power} W"))?;
    if equal[first..].iter().all(|&e| e) {
        Ok(grid[first])
    } else {
        Err(format!("equality set at {power} W is not an up-set"))
    }
}

fn brc_equality() -> Verdict {
    let grid: Vec<f64> = (0..=70).map(|i| 0.5 + 0.05 * i as f64).collect();
    match (brc_threshold(1.0, &grid), brc_threshold(10.0, &grid)) {
        (Ok(lo), Ok(hi)) => verdict(lo < hi, format!("threshold {lo:.2} m at 1 W, {hi:.2} m at 10 W")),
        (a, b) => verdict(false, format!("{a:?}, {b:?}")),
    }
}

fn random_pmf(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|x| x / s).collect();
    let rest: f64 = p[1..].iter().sum();
    p[0] = 1.0 - rest;
    p
}

fn discrete() -> Verdict {
    let noiseless = DmcChannel::from_fn(vec![2, 2], vec![2, 2], |x, y| f64::from(u8::from(y[0] == x[0] && y[1] == x[1])))
        .unwrap();
    let uniform = FactorizedInput::own_only(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let exact: Vec<f64> = [1, 2]
        .iter()
        .map(|&k| khop_dmc_rate(&noiseless, &uniform, &Strategy::khop(3, k).unwrap()).unwrap().rate)
        .collect();
    let mut ok = exact.iter().all(|&r| r == 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut order_gap, mut onehop_gap) = (f64::NEG_INFINITY, 0.0f64);
    for case in 0..50 {
        let t = if case % 2 == 0 { 3 } else { 4 };
        let inputs: Vec<usize> = (1..t).map(|_| rng.gen_range(2..=3)).collect();
        let outputs: Vec<usize> = (1..t).map(|_| rng.gen_range(2..=3)).collect();
        let nx: usize = inputs.iter().product();
        let ny: usize = outputs.iter().product();
        let table: Vec<f64> = (0..nx).flat_map(|_| random_pmf(&mut rng, ny)).collect();
        let ch = DmcChannel::new(inputs.clone(), outputs, table).unwrap();
        let pmfs: Vec<Vec<f64>> = inputs.iter().map(|&m| random_pmf(&mut rng, m)).collect();
        let input = FactorizedInput::own_only(pmfs.clone()).unwrap();
        let at = |k| khop_dmc_rate(&ch, &input, &Strategy::khop(t, k).unwrap()).unwrap();
        let (r1, r2, rt) = (at(1), at(2), at(t - 1));
        order_gap = order_gap.max(r1.rate - r2.rate).max(r2.rate - rt.rate);
        let one = onehop_dmc_rate(&ch, &pmfs, &Permutation::identity(t)).unwrap();
        for (a, b) in one.records.iter().zip(&r1.records) {
            onehop_gap = onehop_gap.max((a.rate - b.rate).abs());
        }
    }
    ok &= order_gap <= 0.0 && onehop_gap <= 1e-12;
    verdict(
        ok,
        format!("noiseless chain {exact:?}; worst view-order violation {order_gap:.2e}; one-hop mismatch {onehop_gap:.2e}"),
    )
}

fn failure_locality() -> Verdict {
    let net = unit_chain(7, 10.0);
    let two = Strategy::khop(7, 2).unwrap();
    let own = SplitMatrix::own_only(&two);
    let base = net.rate_report(&own, &two).unwrap();
    let failed = net.failure_impact(&own, &two, &[4]).unwrap();
    let same = [2, 7]
        .iter()
        .all(|&t| base.rate_of(t).unwrap().to_bits() == failed.rate_of(t).unwrap().to_bits());

    let omni = Strategy::omniscient(7).unwrap();
    let splits = SplitMatrix::forward_fraction(&omni, 0.5).unwrap();
    let base = net.rate_report(&splits, &omni).unwrap();
    let failed = net.failure_impact(&splits, &omni, &[4]).unwrap();
    let drops: Vec<f64> = (5..=7).map(|t| base.rate_of(t).unwrap() - failed.rate_of(t).unwrap()).collect();
    let lowered = drops.iter().all(|&d| d > 0.0);
    verdict(
        same && lowered,
        format!("two-hop nodes 2 and 7 unchanged: {same}; omniscient drops at nodes 5-7: {drops:.4?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Verdict); 10] = [
        ("MARC reception-rate anchor", Duration::from_millis(1), marc_anchor),
        ("MARC crossover", Duration::from_secs(1), marc_crossover),
        ("five-node low-SNR equivalence", Duration::from_secs(120), low_snr_equivalence),
        ("closed-form equivalence", Duration::from_secs(5), closed_forms),
        ("k-monotonicity", Duration::from_secs(600), k_monotonicity),
        ("large-network interference bound", Duration::from_secs(30), large_network),
        ("zeta certification", Duration::from_millis(1), zeta_values),
        ("BRC equality regime", Duration::from_secs(30), brc_equality),
        ("discrete oracle", Duration::from_secs(60), discrete),
        ("failure locality", Duration::from_secs(1), failure_locality),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = elapsed < *limit;
        let ok = v.ok && in_time;
        failures += usize::from(!ok);
        let timing = if in_time { String::new() } else { " OVER TIME LIMIT".to_string() };
        println!(
            "{} {:>2} {name}: {} [{:.3?} / limit {:?}{timing}]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            elapsed,
            limit
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
