//! Exact mutual-information rates for small discrete memoryless relay
//! networks. Everything is brute-force summation over the product alphabet,
//! so this is an oracle for the Gaussian formulas rather than a fast path.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gaussian_df::{Permutation, Strategy};

/// Largest joint table (in entries) the rate routines will materialize.
pub const DEFAULT_TABLE_CAP: usize = 1 << 20;

const MASS_TOLERANCE: f64 = 1e-12;

fn check_pmf(what: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return invalid(format!("{what}: empty distribution"));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return invalid(format!("{what}: entry {x} is not a probability"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return invalid(format!("{what}: total mass {total} differs from 1"));
    }
    Ok(())
}

fn product(cards: &[usize]) -> Option<usize> {
    cards.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c))
}

/// Splits a flat index into mixed-radix digits, most significant first.
fn digits(mut index: usize, cards: &[usize], out: &mut [usize]) {
    for (d, &c) in out.iter_mut().zip(cards).rev() {
        *d = index % c;
        index /= c;
    }
}

fn flatten(ds: impl IntoIterator<Item = usize>, cards: &[usize]) -> usize {
    ds.into_iter().zip(cards).fold(0, |acc, (d, &c)| acc * c + d)
}

/// A probability table over the product of named finite alphabets, stored
/// row-major with the first label most significant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPmf {
    labels: Vec<String>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(labels: Vec<String>, cards: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != cards.len() {
            return invalid(format!("{} labels but {} alphabet sizes", labels.len(), cards.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return invalid(format!("duplicate label {l}"));
            }
        }
        if cards.contains(&0) {
            return invalid("alphabet sizes must be at least 1");
        }
        match product(&cards) {
            Some(n) if n == probs.len() => {}
            _ => return invalid(format!("table has {} entries, alphabets need {:?}", probs.len(), cards)),
        }
        check_pmf("joint pmf", &probs)?;
        Ok(Self { labels, cards, probs })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Invalid(format!("unknown label {label}")))
    }

    /// Sums out every variable not in `keep`; the result follows `keep`'s order.
    pub fn marginal(&self, keep: &[&str]) -> Result<JointPmf> {
        let idx = keep.iter().map(|l| self.index_of(l)).collect::<Result<Vec<_>>>()?;
        for (i, a) in idx.iter().enumerate() {
            if idx[..i].contains(a) {
                return invalid(format!("label {} listed twice", self.labels[*a]));
            }
        }
        let cards: Vec<usize> = idx.iter().map(|&i| self.cards[i]).collect();
        let mut probs = vec![0.0; cards.iter().product()];
        let mut ds = vec![0; self.cards.len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            digits(flat, &self.cards, &mut ds);
            probs[flatten(idx.iter().map(|&i| ds[i]), &cards)] += p;
        }
        Ok(JointPmf {
            labels: keep.iter().map(|s| s.to_string()).collect(),
            cards,
            probs,
        })
    }
}

/// `I(A; B | C)` in bits. Label sets must be disjoint; an empty `A` or `B`
/// gives 0.
pub fn mutual_information(joint: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    let all: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
    for (i, l) in all.iter().enumerate() {
        if all[..i].contains(l) {
            return invalid(format!("label {l} appears in more than one set"));
        }
    }
    let m = joint.marginal(&all)?;
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let na: usize = m.cards[..a.len()].iter().product();
    let nb: usize = m.cards[a.len()..a.len() + b.len()].iter().product();
    let nc: usize = m.cards[a.len() + b.len()..].iter().product();

    let mut pc = vec![0.0; nc];
    let mut pac = vec![0.0; na * nc];
    let mut pbc = vec![0.0; nb * nc];
    for ia in 0..na {
        for ib in 0..nb {
            for ic in 0..nc {
                let p = m.probs[(ia * nb + ib) * nc + ic];
                pc[ic] += p;
                pac[ia * nc + ic] += p;
                pbc[ib * nc + ic] += p;
            }
        }
    }
    let mut total = 0.0;
    for ia in 0..na {
        for ib in 0..nb {
            for ic in 0..nc {
                let p = m.probs[(ia * nb + ib) * nc + ic];
                if p > 0.0 {
                    total += p * ((p * pc[ic]) / (pac[ia * nc + ic] * pbc[ib * nc + ic])).log2();
                }
            }
        }
    }
    Ok(total.max(0.0))
}

/// Conditional law `p(y_2..y_T | x_1..x_{T-1})` of a `T`-node network.
/// Rows are indexed by the input tuple, columns by the output tuple, both
/// mixed-radix with the lowest node most significant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DmcChannel {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    table: Vec<f64>,
}

impl DmcChannel {
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if inputs.len() < 2 || inputs.len() != outputs.len() {
            return invalid(format!(
                "need T-1 >= 2 inputs and as many outputs, got {} and {}",
                inputs.len(),
                outputs.len()
            ));
        }
        if inputs.contains(&0) || outputs.contains(&0) {
            return invalid("alphabet sizes must be at least 1");
        }
        let (nx, ny) = match (product(&inputs), product(&outputs)) {
            (Some(x), Some(y)) if x.checked_mul(y) == Some(table.len()) => (x, y),
            _ => {
                return invalid(format!(
                    "channel table has {} entries, alphabets {:?} x {:?} need more or fewer",
                    table.len(),
                    inputs,
                    outputs
                ))
            }
        };
        debug_assert_eq!(nx * ny, table.len());
        for (row, slice) in table.chunks(ny).enumerate() {
            check_pmf(&format!("channel row {row}"), slice)?;
        }
        Ok(Self { inputs, outputs, table })
    }

    /// Tabulates `f(x, y)` over all input and output tuples.
    pub fn from_fn(inputs: Vec<usize>, outputs: Vec<usize>, f: impl Fn(&[usize], &[usize]) -> f64) -> Result<Self> {
        let nx = product(&inputs).ok_or_else(|| Error::Resource("input alphabet overflow".into()))?;
        let ny = product(&outputs).ok_or_else(|| Error::Resource("output alphabet overflow".into()))?;
        let mut x = vec![0; inputs.len()];
        let mut y = vec![0; outputs.len()];
        let mut table = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            digits(i, &inputs, &mut x);
            for j in 0..ny {
                digits(j, &outputs, &mut y);
                table.push(f(&x, &y));
            }
        }
        Self::new(inputs, outputs, table)
    }

    pub fn node_count(&self) -> usize {
        self.inputs.len() + 1
    }

    /// Alphabet size of `X_node`, `node` in `1..T`.
    pub fn input_size(&self, node: usize) -> usize {
        self.inputs[node - 1]
    }

    /// Alphabet size of `Y_node`, `node` in `2..=T`.
    pub fn output_size(&self, node: usize) -> usize {
        self.outputs[node - 2]
    }

    fn row(&self, x: usize) -> &[f64] {
        let ny: usize = self.outputs.iter().product();
        &self.table[x * ny..(x + 1) * ny]
    }
}

/// How a transmitter maps the sub-codewords it carries to its channel input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoder {
    /// `x = u_own`; the alphabets must agree.
    OwnOnly,
    /// Lookup over the carried tuple (own sub-codeword first, then the ones
    /// it forwards in flow order), mixed-radix with the own one most
    /// significant.
    Table(Vec<usize>),
}

/// Independent sub-codeword pmfs for nodes `1..T` and each node's encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizedInput {
    pub pmfs: Vec<Vec<f64>>,
    pub encoders: Vec<Encoder>,
}

impl FactorizedInput {
    pub fn new(pmfs: Vec<Vec<f64>>, encoders: Vec<Encoder>) -> Result<Self> {
        if pmfs.len() != encoders.len() {
            return invalid(format!("{} pmfs but {} encoders", pmfs.len(), encoders.len()));
        }
        for (i, p) in pmfs.iter().enumerate() {
            check_pmf(&format!("pmf of node {}", i + 1), p)?;
        }
        Ok(Self { pmfs, encoders })
    }

    /// Every node sends its own sub-codeword as its channel input.
    pub fn own_only(pmfs: Vec<Vec<f64>>) -> Result<Self> {
        let n = pmfs.len();
        Self::new(pmfs, vec![Encoder::OwnOnly; n])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeRate {
    pub node: usize,
    pub rate: f64,
}

/// Per-receiver rates of a discrete network and their minimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteRateReport {
    pub records: Vec<NodeRate>,
    /// Lowest id among the receivers attaining the minimum.
    pub bottleneck: usize,
    pub rate: f64,
}

impl DiscreteRateReport {
    fn from_records(records: Vec<NodeRate>) -> Self {
        let mut best = records[0];
        for r in &records[1..] {
            if r.rate < best.rate || (r.rate == best.rate && r.node < best.node) {
                best = *r;
            }
        }
        Self {
            bottleneck: best.node,
            rate: best.rate,
            records,
        }
    }

    pub fn rate_of(&self, node: usize) -> Option<f64> {
        self.records.iter().find(|r| r.node == node).map(|r| r.rate)
    }
}

fn check_permutation(channel: &DmcChannel, perm: &Permutation) -> Result<()> {
    if perm.order().len() != channel.node_count() {
        return invalid(format!(
            "permutation covers {} nodes, channel has {}",
            perm.order().len(),
            channel.node_count()
        ));
    }
    Ok(())
}

fn table_size(cards: &[usize], channel: &DmcChannel, cap: usize) -> Result<usize> {
    match product(cards).and_then(|u| product(&channel.outputs).and_then(|y| u.checked_mul(y))) {
        Some(n) if n <= cap => Ok(n),
        Some(n) => Err(Error::Resource(format!("joint table needs {n} entries, cap is {cap}"))),
        None => Err(Error::Resource("joint table size overflows".into())),
    }
}

/// Joint law of independent sources `S_1..S_{T-1}` (node-indexed) and the
/// channel outputs, where `inputs(s)` yields the channel input tuple.
fn source_output_joint(
    channel: &DmcChannel,
    pmfs: &[Vec<f64>],
    prefix: &str,
    inputs: impl Fn(&[usize], &mut [usize]),
    cap: usize,
) -> Result<JointPmf> {
    let cards: Vec<usize> = pmfs.iter().map(Vec::len).collect();
    let size = table_size(&cards, channel, cap)?;
    let ny: usize = channel.outputs.iter().product();
    let mut probs = vec![0.0; size];
    let mut s = vec![0; cards.len()];
    let mut x = vec![0; cards.len()];
    for (si, chunk) in probs.chunks_mut(ny).enumerate() {
        digits(si, &cards, &mut s);
        let p: f64 = s.iter().zip(pmfs).map(|(&d, pmf)| pmf[d]).product();
        if p == 0.0 {
            continue;
        }
        inputs(&s, &mut x);
        let row = channel.row(flatten(x.iter().copied(), &channel.inputs));
        for (dst, &w) in chunk.iter_mut().zip(row) {
            *dst = p * w;
        }
    }
    let mut labels: Vec<String> = (1..=cards.len()).map(|i| format!("{prefix}{i}")).collect();
    labels.extend((2..=channel.node_count()).map(|i| format!("Y{i}")));
    let mut all_cards = cards;
    all_cards.extend_from_slice(&channel.outputs);
    Ok(JointPmf {
        labels,
        cards: all_cards,
        probs,
    })
}

/// k-hop myopic decode-forward rates on a discrete network, with the
/// default table cap.
pub fn khop_dmc_rate(channel: &DmcChannel, input: &FactorizedInput, strategy: &Strategy) -> Result<DiscreteRateReport> {
    khop_dmc_rate_capped(channel, input, strategy, DEFAULT_TABLE_CAP)
}

/// Each receiver's rate is the information its output carries about the
/// sub-codewords it decodes, given the ones it already knows; everything
/// else acts as noise.
pub fn khop_dmc_rate_capped(
    channel: &DmcChannel,
    input: &FactorizedInput,
    strategy: &Strategy,
    cap: usize,
) -> Result<DiscreteRateReport> {
    let t = channel.node_count();
    if strategy.node_count() != t {
        return invalid(format!("strategy is for {} nodes, channel has {t}", strategy.node_count()));
    }
    if input.pmfs.len() != t - 1 {
        return invalid(format!("need pmfs for nodes 1..{}, got {}", t - 1, input.pmfs.len()));
    }
    let perm = strategy.permutation();
    let k = strategy.k();
    // carried[node - 1]: node ids of the sub-codewords this node transmits
    let carried: Vec<Vec<usize>> = (1..t)
        .map(|node| {
            let q = perm.position_of(node);
            (q..q + strategy.row_len(node)).map(|p| perm.node_at(p)).collect()
        })
        .collect();
    for node in 1..t {
        let x_card = channel.input_size(node);
        match &input.encoders[node - 1] {
            Encoder::OwnOnly => {
                if input.pmfs[node - 1].len() != x_card {
                    return invalid(format!(
                        "node {node}: own-only encoder needs |U| = |X| = {x_card}, got {}",
                        input.pmfs[node - 1].len()
                    ));
                }
            }
            Encoder::Table(map) => {
                let need: usize = carried[node - 1].iter().map(|&u| input.pmfs[u - 1].len()).product();
                if map.len() != need {
                    return invalid(format!("node {node}: encoder table has {} entries, needs {need}", map.len()));
                }
                if let Some(x) = map.iter().find(|&&x| x >= x_card) {
                    return invalid(format!("node {node}: encoder output {x} outside input alphabet {x_card}"));
                }
            }
        }
    }
    let u_cards: Vec<usize> = input.pmfs.iter().map(Vec::len).collect();
    let joint = source_output_joint(
        channel,
        &input.pmfs,
        "U",
        |u, x| {
            for node in 1..t {
                x[node - 1] = match &input.encoders[node - 1] {
                    Encoder::OwnOnly => u[node - 1],
                    Encoder::Table(map) => {
                        let c = &carried[node - 1];
                        map[c.iter().fold(0, |acc, &j| acc * u_cards[j - 1] + u[j - 1])]
                    }
                };
            }
        },
        cap,
    )?;
    let label = |node: usize| format!("U{node}");
    let records = (2..=t)
        .map(|p| {
            let decode: Vec<String> = (p.saturating_sub(k).max(1)..p).map(|q| label(perm.node_at(q))).collect();
            let known: Vec<String> = (p..(p + k).min(t)).map(|q| label(perm.node_at(q))).collect();
            let node = perm.node_at(p);
            let y = format!("Y{node}");
            let rate = mutual_information(&joint, &as_strs(&decode), &[&y], &as_strs(&known))?;
            Ok(NodeRate { node, rate })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscreteRateReport::from_records(records))
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// One-hop rates from independent channel inputs: each receiver decodes its
/// flow predecessor's input given its own.
pub fn onehop_dmc_rate(channel: &DmcChannel, x_pmfs: &[Vec<f64>], perm: &Permutation) -> Result<DiscreteRateReport> {
    let t = channel.node_count();
    check_permutation(channel, perm)?;
    if x_pmfs.len() != t - 1 {
        return invalid(format!("need pmfs for X_1..X_{}, got {}", t - 1, x_pmfs.len()));
    }
    for (i, p) in x_pmfs.iter().enumerate() {
        check_pmf(&format!("pmf of X_{}", i + 1), p)?;
        if p.len() != channel.input_size(i + 1) {
            return invalid(format!("pmf of X_{} has {} entries, alphabet is {}", i + 1, p.len(), channel.input_size(i + 1)));
        }
    }
    let joint = source_output_joint(channel, x_pmfs, "X", |s, x| x.copy_from_slice(s), DEFAULT_TABLE_CAP)?;
    let records = (2..=t)
        .map(|p| {
            let node = perm.node_at(p);
            let prev = format!("X{}", perm.node_at(p - 1));
            let own = format!("X{node}");
            let y = format!("Y{node}");
            let given: &[&str] = if node == t { &[] } else { &[&own] };
            let rate = mutual_information(&joint, &[&prev], &[&y], given)?;
            Ok(NodeRate { node, rate })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscreteRateReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    fn pair(probs: Vec<f64>) -> JointPmf {
        JointPmf::new(vec!["X".into(), "Y".into()], vec![2, 2], probs).unwrap()
    }

    /// `Y_t = X_{t-1}` through a BSC with crossover `eps`.
    fn chain(t: usize, eps: f64) -> DmcChannel {
        DmcChannel::from_fn(vec![2; t - 1], vec![2; t - 1], |x, y| {
            y.iter()
                .enumerate()
                .map(|(i, &yi)| if yi == x[i] { 1.0 - eps } else { eps })
                .product()
        })
        .unwrap()
    }

    #[test]
    fn mi_trivial_cases() {
        let indep = pair(vec![0.25; 4]);
        assert_eq!(mutual_information(&indep, &["X"], &["Y"], &[]).unwrap(), 0.0);
        let copy = pair(vec![0.5, 0.0, 0.0, 0.5]);
        assert_abs_diff_eq!(mutual_information(&copy, &["X"], &["Y"], &[]).unwrap(), 1.0, epsilon = 1e-15);
        let e = 0.11;
        let bsc = pair(vec![0.5 * (1.0 - e), 0.5 * e, 0.5 * e, 0.5 * (1.0 - e)]);
        assert_abs_diff_eq!(mutual_information(&bsc, &["X"], &["Y"], &[]).unwrap(), 1.0 - h2(e), epsilon = 1e-14);
    }

    #[test]
    fn mi_rejects_overlap_and_unknown() {
        let j = pair(vec![0.25; 4]);
        assert!(mutual_information(&j, &["X"], &["X"], &[]).is_err());
        assert!(mutual_information(&j, &["X"], &["Y"], &["Y"]).is_err());
        assert!(mutual_information(&j, &["X"], &["Z"], &[]).is_err());
    }

    #[test]
    fn joint_validation() {
        assert!(JointPmf::new(vec!["A".into()], vec![2], vec![0.5, 0.6]).is_err());
        assert!(JointPmf::new(vec!["A".into()], vec![2], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(vec!["A".into(), "A".into()], vec![1, 2], vec![0.5, 0.5]).is_err());
        assert!(JointPmf::new(vec!["A".into()], vec![3], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn channel_rows_must_sum_to_one() {
        let r = DmcChannel::from_fn(vec![2, 2], vec![2, 2], |_, _| 0.3);
        assert!(r.is_err());
    }

    #[test]
    fn noiseless_cascade() {
        let ch = chain(3, 0.0);
        let input = FactorizedInput::own_only(vec![vec![0.5, 0.5]; 2]).unwrap();
        for k in [1, 2] {
            let rep = khop_dmc_rate(&ch, &input, &Strategy::khop(3, k).unwrap()).unwrap();
            assert_abs_diff_eq!(rep.rate, 1.0, epsilon = 1e-14);
        }
        let one = onehop_dmc_rate(&ch, &[vec![0.5, 0.5], vec![0.5, 0.5]], &Permutation::identity(3)).unwrap();
        assert_abs_diff_eq!(one.rate, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn useless_last_link() {
        // Y_3 is pure noise regardless of X_2
        let ch = DmcChannel::from_fn(vec![2, 2], vec![2, 2], |x, y| {
            let a = if y[0] == x[0] { 1.0 } else { 0.0 };
            a * 0.5
        })
        .unwrap();
        let rep = onehop_dmc_rate(&ch, &[vec![0.5, 0.5], vec![0.5, 0.5]], &Permutation::identity(3)).unwrap();
        assert_eq!(rep.rate_of(3), Some(0.0));
        assert_eq!(rep.rate, 0.0);
        assert_eq!(rep.bottleneck, 3);
    }

    #[test]
    fn cap_is_enforced() {
        let ch = chain(3, 0.1);
        let input = FactorizedInput::own_only(vec![vec![0.5, 0.5]; 2]).unwrap();
        let err = khop_dmc_rate_capped(&ch, &input, &Strategy::khop(3, 1).unwrap(), 8).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn encoder_table_shape_checked() {
        let ch = chain(3, 0.1);
        let bad = FactorizedInput::new(vec![vec![0.5, 0.5]; 2], vec![Encoder::Table(vec![0, 1]), Encoder::OwnOnly]).unwrap();
        // with k = 2 node 1 carries U_1 and U_2, so the table needs 4 entries
        assert!(khop_dmc_rate(&ch, &bad, &Strategy::khop(3, 2).unwrap()).is_err());
        assert!(khop_dmc_rate(&ch, &bad, &Strategy::khop(3, 1).unwrap()).is_ok());
    }

    #[test]
    fn forwarding_table_reaches_destination() {
        // node 1 sends U_1 xor U_2, node 2 sends U_2; with k = 2 the
        // destination knows nothing and must decode both from Y_3 = X_2
        let ch = chain(3, 0.0);
        let input = FactorizedInput::new(
            vec![vec![0.5, 0.5]; 2],
            vec![Encoder::Table(vec![0, 1, 1, 0]), Encoder::Table(vec![0, 1])],
        )
        .unwrap();
        let rep = khop_dmc_rate(&ch, &input, &Strategy::khop(3, 2).unwrap()).unwrap();
        // Y_2 = U_1 xor U_2 with U_2 known at node 2
        assert_abs_diff_eq!(rep.rate_of(2).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rep.rate_of(3).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn permuted_flow() {
        // 4 nodes, Y_t copies X_{t-1}; flow 1 -> 3 -> 2 -> 4 sees noise
        let ch = chain(4, 0.0);
        let pmfs = vec![vec![0.5, 0.5]; 3];
        let perm = Permutation::from_relays(4, &[3, 2]).unwrap();
        let rep = onehop_dmc_rate(&ch, &pmfs, &perm).unwrap();
        assert_eq!(rep.rate_of(3), Some(0.0));
        let id = onehop_dmc_rate(&ch, &pmfs, &Permutation::identity(4)).unwrap();
        assert_abs_diff_eq!(id.rate, 1.0, epsilon = 1e-14);
    }
}
