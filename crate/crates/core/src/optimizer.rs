//! Deterministic max-min search by nested grid refinement.
//!
//! The search space is always a unit box `[0, 1]^d`. Simplex-constrained
//! quantities (power splits, node spacings) are mapped into the box with the
//! stick-breaking transform, so every grid point is feasible.
//!
//! Each round evaluates a grid over the current box, moves to the best point
//! and shrinks the box around it. Low-dimensional boxes are searched with a
//! full tensor grid; above [`OptimizerConfig::full_grid_limit`] points the
//! round instead sweeps line grids along every coordinate and along a fixed
//! set of pseudo-random directions, repeating until a sweep brings no
//! improvement.
//!
//! Line sweeps stall at kinks of a max-min objective where several
//! coordinates must move together. [`maximize_min`] therefore searches
//! high-dimensional problems through a sequence of log-sum-exp smoothed
//! minima with shrinking temperature, each stage seeding the next, and
//! finishes on the exact minimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{NetworkGeometry, PowerConfig, PropagationModel, MIN_DISTANCE};
use crate::error::{invalid, Error, Result};
use crate::gaussian_df::{
    CombiningMode, GaussianRelayNetwork, Permutation, RateReport, SplitMatrix, Strategy,
};

/// Largest node count for which all relay orders are enumerated.
pub const MAX_PERMUTATION_NODES: usize = 9;

/// Batches smaller than this are evaluated on the calling thread.
const PARALLEL_BATCH: usize = 256;

/// Upper bound on coordinate sweeps within one round.
const MAX_SWEEPS: usize = 25;

/// Direction lines per sweep, per dimension.
const DIRECTIONS_PER_DIM: usize = 8;

const DIRECTION_SEED: u64 = 0x6d79_6f70_6963;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Grid points per coordinate.
    pub resolution: usize,
    /// Refinement rounds after the coarse stage. Further rounds run while
    /// the last one still improved the objective by at least `tolerance`, or
    /// while values one grid step apart can still differ by more than that.
    pub rounds: usize,
    /// Box shrink factor per round.
    pub shrink: f64,
    /// Stop once a round improves the rate by less than this (bits/use).
    pub tolerance: f64,
    /// Hard cap on objective evaluations; the best point so far is returned
    /// and flagged incomplete when it is hit.
    pub max_evaluations: usize,
    /// Largest tensor grid evaluated in one piece.
    pub full_grid_limit: usize,
    /// Hard cap on rounds.
    pub max_rounds: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            resolution: 21,
            rounds: 3,
            shrink: 5.0,
            tolerance: 1e-6,
            max_evaluations: 50_000_000,
            full_grid_limit: 250_000,
            max_rounds: 40,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return invalid(format!("grid resolution must be >= 2, got {}", self.resolution));
        }
        if !(self.tolerance > 0.0) {
            return invalid(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if !(self.shrink > 1.0) {
            return invalid(format!("shrink factor must exceed 1, got {}", self.shrink));
        }
        if self.max_rounds < self.rounds + 1 {
            return invalid("max_rounds must cover the coarse stage plus all refinement rounds");
        }
        if self.max_evaluations == 0 {
            return invalid("evaluation budget must be positive");
        }
        Ok(())
    }

    /// Cheaper settings for searches nested inside another search.
    pub fn inner(&self) -> Self {
        Self {
            resolution: self.resolution.min(11),
            rounds: self.rounds.min(2),
            tolerance: self.tolerance.max(1e-5),
            max_rounds: 12,
            ..self.clone()
        }
    }
}

/// Best point found by [`maximize`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Improvement achieved by the final round.
    pub achieved_tolerance: f64,
    pub rounds: usize,
    /// False when the evaluation budget ran out first.
    pub complete: bool,
}

struct Incumbent {
    point: Vec<f64>,
    value: f64,
}

impl Incumbent {
    /// Higher value wins; equal values go to the lexicographically smaller point.
    fn offer(&mut self, point: &[f64], value: f64) -> bool {
        let value = if value.is_nan() { f64::NEG_INFINITY } else { value };
        let better = value > self.value
            || (value == self.value
                && point
                    .iter()
                    .zip(&self.point)
                    .find(|(a, b)| a != b)
                    .is_some_and(|(a, b)| a < b));
        if better {
            self.point.clear();
            self.point.extend_from_slice(point);
            self.value = value;
        }
        better
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| {
        if j + 1 == n {
            hi
        } else {
            lo + (hi - lo) * j as f64 / (n - 1) as f64
        }
    })
}

struct Search<'a, F> {
    objective: &'a F,
    config: &'a OptimizerConfig,
    evaluations: usize,
    best: Incumbent,
    directions: Vec<Vec<f64>>,
    /// Lowest finite value seen in the current round.
    round_low: f64,
}

fn directions(dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(DIRECTION_SEED);
    (0..DIRECTIONS_PER_DIM * dim)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

impl<F: Fn(&[f64]) -> f64 + Sync> Search<'_, F> {
    /// Evaluates `points` and folds them into the incumbent in order.
    /// Returns `None` when the budget does not cover the batch.
    fn batch(&mut self, points: Vec<Vec<f64>>) -> Option<bool> {
        if self.evaluations + points.len() > self.config.max_evaluations {
            return None;
        }
        self.evaluations += points.len();
        let f = self.objective;
        let values: Vec<f64> = if points.len() >= PARALLEL_BATCH {
            points.par_iter().map(|p| f(p)).collect()
        } else {
            points.iter().map(|p| f(p)).collect()
        };
        let mut improved = false;
        for (p, v) in points.iter().zip(values) {
            if v.is_finite() {
                self.round_low = self.round_low.min(v);
            }
            improved |= self.best.offer(p, v);
        }
        Some(improved)
    }

    fn tensor_grid(&self, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
        let n = self.config.resolution;
        let d = lo.len();
        let axes: Vec<Vec<f64>> = (0..d).map(|i| linspace(lo[i], hi[i], n).collect()).collect();
        let total = n.pow(d as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            out.push((0..d).map(|i| axes[i][idx[i]]).collect());
            for i in (0..d).rev() {
                idx[i] += 1;
                if idx[i] < n {
                    break;
                }
                idx[i] = 0;
            }
        }
        out
    }

    fn axis_grid(&self, lo: &[f64], hi: &[f64], i: usize) -> Vec<Vec<f64>> {
        let base = &self.best.point;
        linspace(lo[i], hi[i], self.config.resolution)
            .map(|a| {
                let mut p = base.clone();
                p[i] = a;
                p
            })
            .collect()
    }

    /// Points on the line through the incumbent along `dir`, spanning the box
    /// and clipped to it.
    fn line_grid(&self, lo: &[f64], hi: &[f64], dir: &[f64]) -> Vec<Vec<f64>> {
        let n = self.config.resolution;
        let reach = lo
            .iter()
            .zip(hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max);
        let base = &self.best.point;
        linspace(-reach, reach, n)
            .map(|t| {
                base.iter()
                    .zip(dir)
                    .enumerate()
                    .map(|(i, (b, d))| (b + t * d).clamp(lo[i], hi[i]))
                    .collect()
            })
            .collect()
    }

    /// One round over the box; `None` when the budget ran out.
    fn round(&mut self, lo: &[f64], hi: &[f64]) -> Option<()> {
        let d = lo.len();
        let full = (self.config.resolution as f64).powi(d as i32);
        if full <= self.config.full_grid_limit as f64 {
            let grid = self.tensor_grid(lo, hi);
            self.batch(grid)?;
            return Some(());
        }
        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            for i in 0..d {
                let grid = self.axis_grid(lo, hi, i);
                improved |= self.batch(grid)?;
            }
            for k in 0..self.directions.len() {
                let grid = self.line_grid(lo, hi, &self.directions[k]);
                improved |= self.batch(grid)?;
            }
            if !improved {
                break;
            }
        }
        Some(())
    }
}

/// Maximizes `objective` over `[0, 1]^dim`. `seeds` are evaluated first and
/// can only improve the result.
pub fn maximize<F>(dim: usize, objective: &F, seeds: &[Vec<f64>], config: &OptimizerConfig) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    if let Some(s) = seeds.iter().find(|s| s.len() != dim) {
        return invalid(format!("seed of dimension {} for a {dim}-dimensional search", s.len()));
    }
    let mut search = Search {
        objective,
        config,
        evaluations: 0,
        best: Incumbent {
            point: vec![0.0; dim],
            value: f64::NEG_INFINITY,
        },
        directions: directions(dim),
        round_low: f64::INFINITY,
    };
    let mut start = vec![vec![0.0; dim], vec![0.5; dim]];
    start.extend(seeds.iter().cloned());
    if dim == 0 {
        start.truncate(1);
    }
    if search.batch(start).is_none() {
        return Err(Error::Resource(format!(
            "evaluation budget {} too small to start",
            config.max_evaluations
        )));
    }
    if dim == 0 {
        return Ok(SearchOutcome {
            point: Vec::new(),
            value: search.best.value,
            evaluations: search.evaluations,
            achieved_tolerance: 0.0,
            rounds: 0,
            complete: true,
        });
    }

    let mut lo = vec![0.0; dim];
    let mut hi = vec![1.0; dim];
    let mut achieved = f64::INFINITY;
    let mut rounds = 0;
    let mut complete = true;
    while rounds < config.max_rounds {
        let before = search.best.value;
        search.round_low = f64::INFINITY;
        if search.round(&lo, &hi).is_none() {
            complete = false;
            break;
        }
        rounds += 1;
        achieved = if before.is_finite() {
            search.best.value - before
        } else {
            f64::INFINITY
        };
        for i in 0..dim {
            let width = (hi[i] - lo[i]) / config.shrink;
            let c = search.best.point[i];
            lo[i] = (c - width / 2.0).clamp(0.0, 1.0 - width);
            hi[i] = lo[i] + width;
        }
        // a round that found nothing better only proves convergence once
        // neighbouring grid values are within tolerance of each other
        let step_spread = (search.best.value - search.round_low).max(0.0) / (config.resolution - 1) as f64;
        if rounds > config.rounds && achieved < config.tolerance && step_spread < config.tolerance {
            break;
        }
    }
    Ok(SearchOutcome {
        point: search.best.point,
        value: search.best.value,
        evaluations: search.evaluations,
        achieved_tolerance: achieved,
        rounds,
        complete,
    })
}

/// First smoothing temperature of [`maximize_min`], bits per channel use.
const INITIAL_TEMPERATURE: f64 = 0.1;

/// Temperature ratio between smoothing stages.
const TEMPERATURE_STEP: f64 = 5.0;

/// `min(v) - tau * ln(sum exp(-(v_i - min)/tau))`; within `tau ln(len)` below
/// the minimum and smooth where the minimum has kinks.
fn soft_min(values: &[f64], tau: f64) -> f64 {
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = values.iter().map(|v| (-(v - m) / tau).exp()).sum();
    m - tau * s.ln()
}

/// Maximizes the minimum of `components` over `[0, 1]^dim`.
///
/// Problems small enough for the tensor grid go straight to [`maximize`].
/// Larger ones run a continuation over smoothed minima down to a
/// temperature whose smoothing gap is below the tolerance, then a final
/// search on the exact minimum seeded with every stage's optimum.
pub fn maximize_min<F>(
    dim: usize,
    components: &F,
    seeds: &[Vec<f64>],
    config: &OptimizerConfig,
) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let exact = |x: &[f64]| components(x).into_iter().fold(f64::INFINITY, f64::min);
    let full = (config.resolution as f64).powi(dim as i32);
    if full <= config.full_grid_limit as f64 {
        return maximize(dim, &exact, seeds, config);
    }
    config.validate()?;
    let count = components(&vec![0.0; dim]).len().max(2) as f64;
    let mut stage_seeds = seeds.to_vec();
    let mut evaluations = 0;
    let mut complete = true;
    let mut tau = INITIAL_TEMPERATURE;
    loop {
        let left = config.max_evaluations.saturating_sub(evaluations);
        if left == 0 {
            complete = false;
            break;
        }
        let stage_config = OptimizerConfig {
            max_evaluations: left,
            ..config.clone()
        };
        let smooth = |x: &[f64]| soft_min(&components(x), tau);
        let out = maximize(dim, &smooth, &stage_seeds, &stage_config)?;
        evaluations += out.evaluations;
        complete &= out.complete;
        stage_seeds.push(out.point);
        if tau * count.ln() < config.tolerance || !complete {
            break;
        }
        tau /= TEMPERATURE_STEP;
    }
    let final_config = OptimizerConfig {
        max_evaluations: config.max_evaluations.saturating_sub(evaluations).max(stage_seeds.len() + 2),
        ..config.clone()
    };
    let mut out = maximize(dim, &exact, &stage_seeds, &final_config)?;
    out.evaluations += evaluations;
    out.complete &= complete;
    Ok(out)
}

/// Stick-breaking map from `[0, 1]^(m-1)` onto the `m`-simplex. Coordinate
/// `j` takes its share of what is left after coordinates `< j`; entry 0
/// receives the remainder.
pub fn stick_breaking(coords: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coords.len() + 1];
    let mut rest = 1.0;
    for (j, &c) in coords.iter().enumerate() {
        let a = rest * c;
        out[j + 1] = a;
        rest -= a;
    }
    out[0] = rest.max(0.0);
    out
}

/// Inverse of [`stick_breaking`] (any preimage where it is not unique).
pub fn inverse_stick_breaking(weights: &[f64]) -> Vec<f64> {
    let mut rest = 1.0;
    weights[1..]
        .iter()
        .map(|&a| {
            let c = if rest > 0.0 { (a / rest).clamp(0.0, 1.0) } else { 0.0 };
            rest -= a;
            c
        })
        .collect()
}

/// Box coordinates of a split matrix for a given strategy.
struct SplitCoords {
    row_lens: Vec<usize>,
}

impl SplitCoords {
    fn new(strategy: &Strategy) -> Self {
        Self {
            row_lens: (1..strategy.node_count()).map(|t| strategy.row_len(t)).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.row_lens.iter().map(|l| l - 1).sum()
    }

    fn splits(&self, coords: &[f64]) -> SplitMatrix {
        let mut at = 0;
        let rows = self
            .row_lens
            .iter()
            .map(|&len| {
                let row = stick_breaking(&coords[at..at + len - 1]);
                at += len - 1;
                row
            })
            .collect();
        SplitMatrix::from_rows_unchecked(rows)
    }

    fn coords(&self, splits: &SplitMatrix) -> Vec<f64> {
        splits.rows().iter().flat_map(|r| inverse_stick_breaking(r)).collect()
    }
}

/// Result of a max-min search over a relay network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumResult {
    pub splits: SplitMatrix,
    pub strategy: Strategy,
    /// Set when node placement was part of the search.
    #[serde(skip)]
    pub geometry: Option<NetworkGeometry>,
    /// Recomputed from the returned arguments, not cached from the search.
    pub report: RateReport,
    pub evaluations: usize,
    pub achieved_tolerance: f64,
    pub complete: bool,
}

impl OptimumResult {
    pub fn rate(&self) -> f64 {
        self.report.rate
    }
}

/// Best power splits for a fixed strategy.
pub fn optimize_splits(
    network: &GaussianRelayNetwork,
    strategy: &Strategy,
    config: &OptimizerConfig,
) -> Result<OptimumResult> {
    optimize_splits_seeded(network, strategy, &[], config)
}

/// As [`optimize_splits`], also trying the given operating points (padded to
/// the strategy's view when they come from a smaller one).
pub fn optimize_splits_seeded(
    network: &GaussianRelayNetwork,
    strategy: &Strategy,
    seeds: &[SplitMatrix],
    config: &OptimizerConfig,
) -> Result<OptimumResult> {
    // validates network/strategy compatibility
    network.rate_report(&SplitMatrix::own_only(strategy), strategy)?;
    let coords = SplitCoords::new(strategy);
    let seed_points = seeds
        .iter()
        .map(|s| Ok(coords.coords(&s.embed(strategy)?)))
        .collect::<Result<Vec<_>>>()?;
    let objective = |x: &[f64]| network.rates(&coords.splits(x), strategy);
    let outcome = maximize_min(coords.dim(), &objective, &seed_points, config)?;
    let splits = coords.splits(&outcome.point);
    let report = network.rate_report(&splits, strategy)?;
    Ok(OptimumResult {
        splits,
        strategy: strategy.clone(),
        geometry: None,
        report,
        evaluations: outcome.evaluations,
        achieved_tolerance: outcome.achieved_tolerance,
        complete: outcome.complete,
    })
}

/// Optimizes each view size in `ks` (ascending), seeding every search with
/// the previous optimum. The results are then non-decreasing in `k`.
pub fn optimize_views(
    network: &GaussianRelayNetwork,
    base: &Strategy,
    ks: &[usize],
    config: &OptimizerConfig,
) -> Result<Vec<OptimumResult>> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return invalid(format!("view sizes must be strictly increasing, got {ks:?}"));
    }
    let mut out: Vec<OptimumResult> = Vec::with_capacity(ks.len());
    for &k in ks {
        let strategy = base.with_k(k)?;
        let seeds: Vec<SplitMatrix> = out.last().map(|r| r.splits.clone()).into_iter().collect();
        out.push(optimize_splits_seeded(network, &strategy, &seeds, config)?);
    }
    Ok(out)
}

/// Best relay order (and splits for it). Ties keep the earlier order in
/// lexicographic enumeration, so the identity wins ties.
pub fn optimize_permutation(
    network: &GaussianRelayNetwork,
    k: usize,
    mode: CombiningMode,
    config: &OptimizerConfig,
) -> Result<OptimumResult> {
    let n = network.node_count();
    if n > MAX_PERMUTATION_NODES {
        return invalid(format!(
            "{n} nodes means {} relay orders; enumeration is capped at {MAX_PERMUTATION_NODES} nodes, pass a permutation explicitly",
            (1..=n - 2).product::<usize>()
        ));
    }
    let base = Strategy::khop(n, k)?.with_mode(mode);
    let mut best: Option<OptimumResult> = None;
    let mut evaluations = 0;
    let mut complete = true;
    for perm in Permutation::all(n) {
        let strategy = base.clone().with_permutation(perm)?;
        let r = optimize_splits(network, &strategy, config)?;
        evaluations += r.evaluations;
        complete &= r.complete;
        if best.as_ref().is_none_or(|b| r.rate() > b.rate()) {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least the identity order");
    best.evaluations = evaluations;
    best.complete = complete;
    Ok(best)
}

/// Best placement of `nodes` collinear nodes spanning `span` meters, with
/// split optimization nested inside when `strategy` has a view above one.
pub fn optimize_spacing(
    span: f64,
    strategy: &Strategy,
    power: &PowerConfig,
    propagation: &PropagationModel,
    config: &OptimizerConfig,
) -> Result<OptimumResult> {
    if !(span > 0.0) || !span.is_finite() {
        return invalid(format!("span must be positive, got {span}"));
    }
    let n = strategy.node_count();
    if power.node_count() != n {
        return invalid("power config and strategy disagree on node count");
    }
    config.validate()?;
    let inner = config.inner();
    let place = |x: &[f64]| -> Option<GaussianRelayNetwork> {
        let spacings: Vec<f64> = stick_breaking(x).into_iter().map(|f| f * span).collect();
        if spacings.iter().any(|&s| s < MIN_DISTANCE.max(span * 1e-9)) {
            return None;
        }
        let g = NetworkGeometry::linear(&spacings).ok()?;
        GaussianRelayNetwork::new(g, *propagation, power.clone()).ok()
    };
    let own = SplitMatrix::own_only(strategy);
    let objective = |x: &[f64]| match place(x) {
        None => f64::NEG_INFINITY,
        Some(net) if strategy.k() == 1 => net.min_rate(&own, strategy),
        Some(net) => optimize_splits(&net, strategy, &inner).map_or(f64::NEG_INFINITY, |r| r.rate()),
    };
    let equal = inverse_stick_breaking(&vec![1.0 / (n - 1) as f64; n - 1]);
    let outcome = maximize(n - 2, &objective, &[equal], config)?;
    let network = place(&outcome.point)
        .ok_or_else(|| Error::Invalid("no feasible spacing found".into()))?;
    let mut best = if strategy.k() == 1 {
        let report = network.rate_report(&own, strategy)?;
        OptimumResult {
            splits: own,
            strategy: strategy.clone(),
            geometry: None,
            report,
            evaluations: 0,
            achieved_tolerance: 0.0,
            complete: true,
        }
    } else {
        optimize_splits(&network, strategy, &inner)?
    };
    best.geometry = Some(network.geometry().clone());
    best.evaluations += outcome.evaluations;
    best.achieved_tolerance = outcome.achieved_tolerance;
    best.complete &= outcome.complete;
    Ok(best)
}
