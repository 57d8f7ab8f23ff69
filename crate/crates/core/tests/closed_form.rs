//! Hand-derived five-node reception rates (kappa = 1, eta = 2, unit noise)
//! against the generic evaluator on random geometries, powers and splits.

use myopic_df::{GaussianRelayNetwork, NetworkGeometry, PowerConfig, PropagationModel, SplitMatrix, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Draw {
    d: [[f64; 5]; 5],
    p: [f64; 5],
}

impl Draw {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut d = [[0.0; 5]; 5];
        for i in 0..5 {
            for j in i + 1..5 {
                d[i][j] = rng.gen_range(0.5..=3.0);
                d[j][i] = d[i][j];
            }
        }
        let mut p = [0.0; 5];
        for x in p.iter_mut().take(4) {
            *x = rng.gen_range(0.1..=50.0);
        }
        Self { d, p }
    }

    /// `d_ij^-2`, 1-based.
    fn g(&self, i: usize, j: usize) -> f64 {
        self.d[i - 1][j - 1].powi(-2)
    }

    fn p(&self, i: usize) -> f64 {
        self.p[i - 1]
    }

    fn network(&self) -> GaussianRelayNetwork {
        let rows: Vec<Vec<f64>> = self.d.iter().map(|r| r.to_vec()).collect();
        GaussianRelayNetwork::new(
            NetworkGeometry::from_matrix(&rows).unwrap(),
            PropagationModel::default(),
            PowerConfig::new(self.p[..4].to_vec(), vec![1.0; 4]).unwrap(),
        )
        .unwrap()
    }
}

/// Uniform point on the `m`-simplex.
fn simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn rate(snr: f64) -> f64 {
    0.5 * (1.0 + snr).log2()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

#[test]
fn two_hop_all_receivers() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let strategy = Strategy::khop(5, 2).unwrap();
    for _ in 0..1000 {
        let x = Draw::new(&mut rng);
        let a: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
        let (a1, a2, a3) = (a[0], a[1], a[2]);
        let splits =
            SplitMatrix::from_rows(vec![vec![1.0 - a1, a1], vec![1.0 - a2, a2], vec![1.0 - a3, a3], vec![1.0]]).unwrap();
        let net = x.network();
        let g = |i, j| x.g(i, j);
        let p = |i| x.p(i);
        let amp = |i: usize, j: usize, f: f64| (g(i, j) * f * p(i)).sqrt();

        let r3 = rate(g(1, 3) * (1.0 - a1) * p(1) + (amp(1, 3, a1) + amp(2, 3, 1.0 - a2)).powi(2));
        let r4_num = (amp(1, 4, a1) + amp(2, 4, 1.0 - a2)).powi(2) + (amp(2, 4, a2) + amp(3, 4, 1.0 - a3)).powi(2);
        let r4 = rate(r4_num / (1.0 + g(1, 4) * (1.0 - a1) * p(1)));
        let r5_num = (amp(2, 5, a2) + amp(3, 5, 1.0 - a3)).powi(2) + (amp(3, 5, a3) + amp(4, 5, 1.0)).powi(2);
        let r5_den = 1.0 + g(1, 5) * (1.0 - a1) * p(1) + (amp(1, 5, a1) + amp(2, 5, 1.0 - a2)).powi(2);
        let r5 = rate(r5_num / r5_den);

        for (t, want) in [(3, r3), (4, r4), (5, r5)] {
            let got = net.reception_rate(&splits, &strategy, t).unwrap().rate;
            assert!(close(got, want), "R_{t}: {got} vs {want}");
        }
    }
}

#[test]
fn one_hop_and_omniscient_all_receivers() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let one = Strategy::khop(5, 1).unwrap();
    let omni = Strategy::omniscient(5).unwrap();
    for _ in 0..1000 {
        let x = Draw::new(&mut rng);
        let net = x.network();
        let g = |i, j| x.g(i, j);
        let p = |i| x.p(i);
        let own = SplitMatrix::own_only(&one);
        for t in 2..=5 {
            let noise: f64 = (1..=4).filter(|&j| j != t - 1 && j != t).map(|j| g(j, t) * p(j)).sum();
            let want = rate(g(t - 1, t) * p(t - 1) / (1.0 + noise));
            let got = net.reception_rate(&own, &one, t).unwrap().rate;
            assert!(close(got, want), "one-hop R_{t}: {got} vs {want}");
        }
        // omniscient R_3: U_1 and U_2 combine coherently from nodes 1 and 2
        let rows: Vec<Vec<f64>> = [4, 3, 2, 1].iter().map(|&m| simplex(&mut rng, m)).collect();
        let splits = SplitMatrix::from_rows(rows.clone()).unwrap();
        let amp = |i: usize, f: f64| (g(i, 3) * f * p(i)).sqrt();
        let want = rate(amp(1, rows[0][0]).powi(2) + (amp(1, rows[0][1]) + amp(2, rows[1][0])).powi(2));
        let got = net.reception_rate(&splits, &omni, 3).unwrap().rate;
        assert!(close(got, want), "omniscient R_3: {got} vs {want}");
    }
}
