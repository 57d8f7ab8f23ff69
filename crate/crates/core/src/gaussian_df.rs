//! Reception rates of k-hop myopic and omniscient decode-forward on the
//! Gaussian multiple-relay channel.
//!
//! Messages flow through the nodes in the order given by a [`Permutation`].
//! Sub-codewords are indexed by flow position: `U_p` is the fresh codeword of
//! the node at position `p`. A transmitter at position `q` superimposes
//! `U_q, U_{q+1}, ..., U_{q+L-1}` with `L = min(k, T - q)`, splitting its power
//! according to its [`SplitMatrix`] row. A receiver at position `p` decodes
//! `U_{p-k}..U_{p-1}`, cancels `U_p..U_{p+k-1}` (its own transmissions among
//! them) and treats everything else as noise.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{NetworkGeometry, PowerConfig, PropagationModel};
use crate::error::{invalid, Result};

/// Row sums must hit 1 within this.
pub const SPLIT_SUM_TOLERANCE: f64 = 1e-12;

/// Above this node count the gain matrix is computed on the fly.
const GAIN_CACHE_NODES: usize = 128;

/// Receivers are evaluated in parallel above this node count.
const PARALLEL_NODES: usize = 64;

/// Order in which the message visits the nodes. Node 1 is always first and
/// node `T` always last; relays may be visited in any order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation {
    order: Vec<usize>,
    #[serde(skip)]
    position: Vec<usize>,
}

impl Permutation {
    pub fn identity(nodes: usize) -> Self {
        let order: Vec<usize> = (1..=nodes).collect();
        Self {
            position: order.clone(),
            order,
        }
    }

    /// Full visiting order, e.g. `[1, 3, 2, 4]`.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n < 3 {
            return invalid(format!("permutation needs at least 3 nodes, got {n}"));
        }
        if order[0] != 1 || order[n - 1] != n {
            return invalid(format!(
                "permutation must start at node 1 and end at node {n}, got {order:?}"
            ));
        }
        let mut position = vec![0; n];
        for (p, &node) in order.iter().enumerate() {
            if !(1..=n).contains(&node) || position[node - 1] != 0 {
                return invalid(format!("{order:?} is not a permutation of 1..={n}"));
            }
            position[node - 1] = p + 1;
        }
        Ok(Self { order, position })
    }

    /// Visiting order of the relays only; endpoints are implied.
    pub fn from_relays(nodes: usize, relays: &[usize]) -> Result<Self> {
        let mut order = Vec::with_capacity(nodes);
        order.push(1);
        order.extend_from_slice(relays);
        order.push(nodes);
        Self::from_order(order)
    }

    /// All `(T-2)!` relay orders, identity first, in lexicographic order.
    pub fn all(nodes: usize) -> impl Iterator<Item = Permutation> {
        (2..nodes)
            .permutations(nodes.saturating_sub(2))
            .map(move |relays| Self::from_relays(nodes, &relays).expect("valid relay order"))
    }

    pub fn node_count(&self) -> usize {
        self.order.len()
    }

    /// Node visited at position `p` (1-based).
    pub fn node_at(&self, p: usize) -> usize {
        self.order[p - 1]
    }

    /// Position (1-based) of `node`.
    pub fn position_of(&self, node: usize) -> usize {
        self.position[node - 1]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(p, &n)| n == p + 1)
    }
}

/// How sub-signals carried by several transmitters combine at a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CombiningMode {
    /// Amplitudes add before squaring (static channel, phase-aligned).
    #[default]
    Coherent,
    /// Powers add; no beamforming gain (phase or Rayleigh fading).
    Fading,
}

/// A decode-forward strategy: view size `k`, message route and combining mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Strategy {
    k: usize,
    permutation: Permutation,
    mode: CombiningMode,
}

impl Strategy {
    /// `k`-hop myopic decode-forward along the identity route.
    pub fn khop(nodes: usize, k: usize) -> Result<Self> {
        if nodes < 3 {
            return invalid(format!("a relay network needs at least 3 nodes, got {nodes}"));
        }
        if k == 0 || k > nodes - 1 {
            return invalid(format!("k = {k} outside 1..={}", nodes - 1));
        }
        Ok(Self {
            k,
            permutation: Permutation::identity(nodes),
            mode: CombiningMode::Coherent,
        })
    }

    /// Omniscient decode-forward, i.e. `k = T - 1`.
    pub fn omniscient(nodes: usize) -> Result<Self> {
        Self::khop(nodes, nodes.saturating_sub(1))
    }

    pub fn with_permutation(mut self, permutation: Permutation) -> Result<Self> {
        if permutation.node_count() != self.node_count() {
            return invalid(format!(
                "permutation over {} nodes for a {}-node strategy",
                permutation.node_count(),
                self.node_count()
            ));
        }
        self.permutation = permutation;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: CombiningMode) -> Self {
        self.mode = mode;
        self
    }

    /// Same route and mode with a different view size.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        let mut s = Self::khop(self.node_count(), k)?;
        s.permutation = self.permutation.clone();
        s.mode = self.mode;
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> CombiningMode {
        self.mode
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    pub fn node_count(&self) -> usize {
        self.permutation.node_count()
    }

    pub fn is_omniscient(&self) -> bool {
        self.k == self.node_count() - 1
    }

    /// Number of sub-codewords node `node` carries.
    pub fn row_len(&self, node: usize) -> usize {
        let q = self.permutation.position_of(node);
        self.k.min(self.node_count() - q)
    }

    /// Transmitters of sub-codeword `U_j` (indexed by the node that
    /// originates it) together with their row offset, ascending by position.
    pub fn carriers(&self, u_node: usize) -> Vec<(usize, usize)> {
        let u = self.permutation.position_of(u_node);
        (u.saturating_sub(self.k - 1).max(1)..=u)
            .map(|q| (self.permutation.node_at(q), u - q))
            .collect()
    }
}

/// Map from each sub-codeword `U_j` (`j` a transmitting node) to the set of
/// nodes that carry it.
pub fn carrier_layout(
    nodes: usize,
    k: usize,
    permutation: &Permutation,
) -> Result<BTreeMap<usize, Vec<usize>>> {
    let strategy = Strategy::khop(nodes, k)?.with_permutation(permutation.clone())?;
    Ok((1..nodes)
        .map(|j| {
            let mut set: Vec<usize> = strategy.carriers(j).into_iter().map(|(i, _)| i).collect();
            set.sort_unstable();
            (j, set)
        })
        .collect())
}

/// Per-transmitter power fractions. Row `t` (node id) holds the fractions of
/// `P_t` spent on the sub-codewords it carries, own codeword first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitMatrix {
    rows: Vec<Vec<f64>>,
}

impl SplitMatrix {
    /// Rows for nodes `1..T-1`. Checks non-negativity and unit row sums only;
    /// shape against a strategy is checked by [`SplitMatrix::check`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return invalid(format!("split row for node {} is empty", i + 1));
            }
            if let Some(a) = row.iter().find(|a| !a.is_finite() || **a < 0.0) {
                return invalid(format!("split row for node {} has entry {a}", i + 1));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SPLIT_SUM_TOLERANCE {
                return invalid(format!(
                    "split row for node {} sums to {sum}, expected 1",
                    i + 1
                ));
            }
        }
        Ok(Self { rows })
    }

    /// Every node spends all its power on its own fresh codeword.
    pub fn own_only(strategy: &Strategy) -> Self {
        Self::forward_fraction(strategy, 0.0).expect("alpha = 0 is valid")
    }

    /// Each node keeps `1 - alpha` for its own codeword and spreads `alpha`
    /// evenly over the codewords it forwards. Nodes with nothing to forward
    /// keep everything.
    pub fn forward_fraction(strategy: &Strategy, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return invalid(format!("forward fraction {alpha} outside [0, 1]"));
        }
        let rows = (1..strategy.node_count())
            .map(|t| {
                let len = strategy.row_len(t);
                if len == 1 {
                    vec![1.0]
                } else {
                    let mut row = vec![alpha / (len - 1) as f64; len];
                    row[0] = 1.0 - alpha;
                    row
                }
            })
            .collect();
        Ok(Self { rows })
    }

    /// No validation; callers guarantee the row invariants.
    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// All fractions, row by row.
    pub fn flattened(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }

    pub fn row(&self, node: usize) -> &[f64] {
        &self.rows[node - 1]
    }

    /// Fraction of `P_node` spent on the codeword `offset` positions ahead.
    #[inline]
    pub fn fraction(&self, node: usize, offset: usize) -> f64 {
        self.rows[node - 1][offset]
    }

    /// Verifies the row shapes match `strategy`.
    pub fn check(&self, strategy: &Strategy) -> Result<()> {
        let n = strategy.node_count();
        if self.rows.len() != n - 1 {
            return invalid(format!(
                "split matrix has {} rows, strategy needs {}",
                self.rows.len(),
                n - 1
            ));
        }
        for t in 1..n {
            let want = strategy.row_len(t);
            if self.rows[t - 1].len() != want {
                return invalid(format!(
                    "split row for node {t} has {} entries, strategy needs {want}",
                    self.rows[t - 1].len()
                ));
            }
        }
        Ok(())
    }

    /// Pads rows with zero fractions to fit a strategy with a larger view.
    /// Under the larger view the same operating point is at least as good.
    pub fn embed(&self, strategy: &Strategy) -> Result<Self> {
        let n = strategy.node_count();
        if self.rows.len() != n - 1 {
            return invalid("split matrix and strategy disagree on node count");
        }
        let rows = (1..n)
            .map(|t| {
                let want = strategy.row_len(t);
                let row = &self.rows[t - 1];
                if row.len() > want {
                    return invalid(format!(
                        "cannot shrink split row for node {t} from {} to {want}",
                        row.len()
                    ));
                }
                let mut r = row.clone();
                r.resize(want, 0.0);
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }
}

/// What one receiver sees under a given operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReceptionRecord {
    pub node: usize,
    /// Power of the decoded sub-codewords, W.
    pub signal_power: f64,
    /// Power of transmissions treated as noise, W.
    pub interference_power: f64,
    pub noise_power: f64,
    /// Bits per channel use.
    pub rate: f64,
}

impl ReceptionRecord {
    fn new(node: usize, signal: f64, interference: f64, noise: f64) -> Self {
        Self {
            node,
            signal_power: signal,
            interference_power: interference,
            noise_power: noise,
            rate: shannon_rate(signal / (noise + interference)),
        }
    }
}

/// Reception rates of every receiver plus the bottleneck.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub records: Vec<ReceptionRecord>,
    /// Receiver with the lowest rate; lowest node id on ties.
    pub bottleneck: usize,
    /// Overall achievable rate, the minimum reception rate.
    pub rate: f64,
}

impl RateReport {
    fn from_records(records: Vec<ReceptionRecord>) -> Self {
        let mut bottleneck = &records[0];
        for r in &records[1..] {
            if r.rate < bottleneck.rate || (r.rate == bottleneck.rate && r.node < bottleneck.node) {
                bottleneck = r;
            }
        }
        Self {
            bottleneck: bottleneck.node,
            rate: bottleneck.rate,
            records,
        }
    }

    pub fn record(&self, node: usize) -> Option<&ReceptionRecord> {
        self.records.iter().find(|r| r.node == node)
    }

    pub fn rate_of(&self, node: usize) -> Option<f64> {
        self.record(node).map(|r| r.rate)
    }
}

#[inline]
fn shannon_rate(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

/// `1/2 log2(1 + P/N)`, bits per channel use.
pub fn point_to_point_rate(received: f64, noise: f64) -> Result<f64> {
    if !(noise > 0.0) || !noise.is_finite() {
        return invalid(format!("noise power must be positive, got {noise}"));
    }
    if !(received >= 0.0) {
        return invalid(format!("received power must be >= 0, got {received}"));
    }
    Ok(shannon_rate(received / noise))
}

/// Ratio of a k-hop rate to the omniscient rate on the same channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Efficiency {
    pub value: f64,
    /// Set when the ratio exceeds `1 + 1e-9`: the omniscient optimum was not
    /// found, since omniscient decode-forward can reproduce any k-hop point.
    pub exceeds_one: bool,
}

pub fn efficiency(khop_rate: f64, omniscient_rate: f64) -> Result<Efficiency> {
    if !(omniscient_rate > 0.0) {
        return invalid(format!(
            "omniscient rate must be positive, got {omniscient_rate}"
        ));
    }
    let value = khop_rate / omniscient_rate;
    Ok(Efficiency {
        value,
        exceeds_one: value > 1.0 + 1e-9,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Decode,
    Known,
    Noise,
}

/// A Gaussian multiple-relay channel: geometry, path loss and powers.
#[derive(Debug, Clone)]
pub struct GaussianRelayNetwork {
    geometry: NetworkGeometry,
    propagation: PropagationModel,
    power: PowerConfig,
    gains: Option<Vec<f64>>,
}

impl GaussianRelayNetwork {
    pub fn new(
        geometry: NetworkGeometry,
        propagation: PropagationModel,
        power: PowerConfig,
    ) -> Result<Self> {
        let n = geometry.node_count();
        if power.node_count() != n {
            return invalid(format!(
                "power config covers {} nodes, geometry has {n}",
                power.node_count()
            ));
        }
        let gains = (n <= GAIN_CACHE_NODES).then(|| {
            let mut g = vec![0.0; n * n];
            for i in 1..=n {
                for t in 1..=n {
                    if i != t {
                        g[(i - 1) * n + (t - 1)] = propagation.gain_at(geometry.distance(i, t));
                    }
                }
            }
            g
        });
        Ok(Self {
            geometry,
            propagation,
            power,
            gains,
        })
    }

    pub fn node_count(&self) -> usize {
        self.geometry.node_count()
    }

    pub fn geometry(&self) -> &NetworkGeometry {
        &self.geometry
    }

    pub fn propagation(&self) -> &PropagationModel {
        &self.propagation
    }

    pub fn power(&self) -> &PowerConfig {
        &self.power
    }

    /// Same geometry and path loss with different powers.
    pub fn with_power(&self, power: PowerConfig) -> Result<Self> {
        Self::new(self.geometry.clone(), self.propagation, power)
    }

    #[inline]
    fn gain(&self, i: usize, t: usize) -> f64 {
        match &self.gains {
            Some(g) => g[(i - 1) * self.node_count() + (t - 1)],
            None => self.propagation.gain_at(self.geometry.distance(i, t)),
        }
    }

    fn check(&self, splits: &SplitMatrix, strategy: &Strategy) -> Result<()> {
        if strategy.node_count() != self.node_count() {
            return invalid(format!(
                "strategy for {} nodes on a {}-node network",
                strategy.node_count(),
                self.node_count()
            ));
        }
        splits.check(strategy)
    }

    /// Signal and interference power at `receiver`. `failed[i-1]` marks
    /// silent transmitters the receiver does not know about.
    fn powers_at(
        &self,
        splits: &SplitMatrix,
        strategy: &Strategy,
        receiver: usize,
        failed: Option<&[bool]>,
    ) -> (f64, f64) {
        let n = self.node_count();
        let k = strategy.k;
        let perm = &strategy.permutation;
        let p = perm.position_of(receiver);
        let coherent = strategy.mode == CombiningMode::Coherent;
        let is_failed = |node: usize| failed.is_some_and(|f| f[node - 1]);

        let mut signal = 0.0;
        let mut interference = 0.0;
        for u in 1..n {
            let role = if u < p && u + k >= p {
                Role::Decode
            } else if u >= p && u < p + k {
                Role::Known
            } else {
                Role::Noise
            };
            if role == Role::Known && failed.is_none() {
                continue;
            }
            // live: contributions actually on the air; ghost: failed carriers
            let mut live = 0.0;
            let mut ghost = 0.0;
            for q in u.saturating_sub(k - 1).max(1)..=u {
                let node = perm.node_at(q);
                let alpha = splits.fraction(node, u - q);
                if alpha == 0.0 {
                    continue;
                }
                let received = self.gain(node, receiver) * alpha * self.power.transmit(node);
                let term = if coherent { received.sqrt() } else { received };
                if is_failed(node) {
                    ghost += term;
                } else {
                    live += term;
                }
            }
            let combine = |x: f64| if coherent { x * x } else { x };
            match role {
                Role::Decode => signal += combine(live),
                // The receiver subtracts codewords that were never sent.
                Role::Known => interference += combine(ghost),
                // Treat-as-noise decoders keep the noise level they were
                // configured for; an unannounced failure does not retune them.
                Role::Noise => interference += combine(live + ghost),
            }
        }
        (signal, interference)
    }

    fn check_receiver(&self, receiver: usize) -> Result<()> {
        let n = self.node_count();
        if receiver == 1 {
            return invalid("node 1 is the source and does not decode");
        }
        if receiver > n || receiver == 0 {
            return invalid(format!("receiver {receiver} outside 2..={n}"));
        }
        Ok(())
    }

    /// Reception rate at one receiver.
    pub fn reception_rate(
        &self,
        splits: &SplitMatrix,
        strategy: &Strategy,
        receiver: usize,
    ) -> Result<ReceptionRecord> {
        self.check(splits, strategy)?;
        self.check_receiver(receiver)?;
        let (s, i) = self.powers_at(splits, strategy, receiver, None);
        Ok(ReceptionRecord::new(receiver, s, i, self.power.noise(receiver)))
    }

    /// Reception rates at every receiver `2..T` and the overall rate.
    pub fn rate_report(&self, splits: &SplitMatrix, strategy: &Strategy) -> Result<RateReport> {
        self.check(splits, strategy)?;
        Ok(self.report_unchecked(splits, strategy, None))
    }

    fn report_unchecked(
        &self,
        splits: &SplitMatrix,
        strategy: &Strategy,
        failed: Option<&[bool]>,
    ) -> RateReport {
        let n = self.node_count();
        let eval = |r: usize| {
            let (s, i) = self.powers_at(splits, strategy, r, failed);
            ReceptionRecord::new(r, s, i, self.power.noise(r))
        };
        let receivers = (2..=n).filter(|&r| !failed.is_some_and(|f| r < n && f[r - 1]));
        let records: Vec<_> = if n > PARALLEL_NODES {
            receivers.collect::<Vec<_>>().into_par_iter().map(eval).collect()
        } else {
            receivers.map(eval).collect()
        };
        RateReport::from_records(records)
    }

    /// Reception rates of receivers `2..T` in order, unvalidated.
    pub(crate) fn rates(&self, splits: &SplitMatrix, strategy: &Strategy) -> Vec<f64> {
        (2..=self.node_count())
            .map(|r| {
                let (s, i) = self.powers_at(splits, strategy, r, None);
                shannon_rate(s / (self.power.noise(r) + i))
            })
            .collect()
    }

    /// Overall rate without building a report. Inputs must already be
    /// validated against each other.
    pub(crate) fn min_rate(&self, splits: &SplitMatrix, strategy: &Strategy) -> f64 {
        let mut best = f64::INFINITY;
        for r in 2..=self.node_count() {
            let (s, i) = self.powers_at(splits, strategy, r, None);
            let rate = shannon_rate(s / (self.power.noise(r) + i));
            if rate < best {
                best = rate;
            }
        }
        best
    }

    /// Rates after the relays in `failed` fall silent without notice.
    ///
    /// Failed relays transmit nothing and decode nothing (they are dropped
    /// from the report). Surviving receivers keep their decoders:
    /// decoded sub-codewords lose the failed carriers' contributions; for
    /// cancelled sub-codewords the receiver subtracts a contribution that
    /// was never sent, so that (coherently combined) power is added to the
    /// interference; treat-as-noise terms are left at their configured level.
    pub fn failure_impact(
        &self,
        splits: &SplitMatrix,
        strategy: &Strategy,
        failed: &[usize],
    ) -> Result<RateReport> {
        self.check(splits, strategy)?;
        let n = self.node_count();
        let mut mask = vec![false; n];
        for &f in failed {
            if f == 1 || f == n {
                return invalid(format!(
                    "node {f} is an endpoint; only relays 2..={} can fail",
                    n - 1
                ));
            }
            if f == 0 || f > n {
                return invalid(format!("failed node {f} outside 1..={n}"));
            }
            mask[f - 1] = true;
        }
        if !mask.contains(&true) {
            return Ok(self.report_unchecked(splits, strategy, None));
        }
        Ok(self.report_unchecked(splits, strategy, Some(&mask)))
    }
}
