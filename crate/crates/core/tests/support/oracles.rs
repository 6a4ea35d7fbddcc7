//! Oracles and generators shared by the integration tests and the
//! acceptance harness.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use stockcast::classical::{ForestConfig, Node};
use stockcast::data::{AlignedPanel, SentimentColumns, TradingDate};
use stockcast::model::ModelSettings;
use stockcast::neural::{LstmParams, LstmTopology, TrainConfig};

/// Exact rational `num / den` with `den > 0`.
#[derive(Clone, Copy)]
struct Q {
    num: i128,
    den: i128,
}

impl Q {
    fn gt(self, other: Q) -> bool {
        self.num * other.den > other.num * self.den
    }
}

/// SSE reduction of splitting `parent` into `left` and `right`.
fn gain(left: &[i64], right: &[i64]) -> Q {
    let (nl, nr) = (left.len() as i128, right.len() as i128);
    let sl: i128 = left.iter().map(|&v| v as i128).sum();
    let sr: i128 = right.iter().map(|&v| v as i128).sum();
    let n = nl + nr;
    let s = sl + sr;
    Q {
        num: sl * sl * nr * n + sr * sr * nl * n - s * s * nl * nr,
        den: nl * nr * n,
    }
}

/// Exhaustive CART: every (feature, midpoint) pair, exact arithmetic, first
/// maximum wins.
pub fn cart_oracle(
    rows: &[Vec<i64>],
    y: &[i64],
    idx: Vec<usize>,
    depth: usize,
    max_depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let at = nodes.len();
    let sum: i64 = idx.iter().map(|&i| y[i]).sum();
    nodes.push(Node::Leaf {
        value: sum as f64 / idx.len() as f64,
        samples: idx.len(),
    });
    if depth >= max_depth || idx.len() < 2 {
        return at;
    }
    let p = rows[0].len();
    let mut best: Option<(usize, f64, Q)> = None;
    for f in 0..p {
        let mut values: Vec<i64> = idx.iter().map(|&i| rows[i][f]).collect();
        values.sort_unstable();
        values.dedup();
        for pair in values.windows(2) {
            let (l, r): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&i| rows[i][f] <= pair[0]);
            let ly: Vec<i64> = l.iter().map(|&i| y[i]).collect();
            let ry: Vec<i64> = r.iter().map(|&i| y[i]).collect();
            let g = gain(&ly, &ry);
            let better = match best {
                None => g.num > 0,
                Some((_, _, b)) => g.gt(b),
            };
            if better {
                best = Some((f, (pair[0] + pair[1]) as f64 / 2.0, g));
            }
        }
    }
    let Some((feature, threshold, _)) = best else {
        return at;
    };
    let (l, r): (Vec<usize>, Vec<usize>) = idx
        .iter()
        .partition(|&&i| (rows[i][feature] as f64) <= threshold);
    let left = cart_oracle(rows, y, l, depth + 1, max_depth, nodes);
    let right = cart_oracle(rows, y, r, depth + 1, max_depth, nodes);
    nodes[at] = Node::Split {
        feature,
        threshold,
        left,
        right,
    };
    at
}

pub fn cart_dataset() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>, usize)> {
    (1usize..=12, 1usize..=3, 0usize..=2).prop_flat_map(|(n, p, depth)| {
        (
            prop::collection::vec(prop::collection::vec(0i64..6, p), n),
            prop::collection::vec(-10i64..10, n),
            Just(depth),
        )
    })
}

/// Largest relative error between BPTT and central differences.
pub fn max_gradient_error(topology: &LstmTopology, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = LstmParams::init(topology, &mut rng).unwrap();
    let windows: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            (0..topology.window)
                .map(|_| rng.random_range(0.0..1.0))
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = windows.iter().map(|w| w.as_slice()).collect();
    let targets: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
    let (_, analytic) = params.loss_and_gradient(&refs, &targets).unwrap();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut probe = params.clone();
    for i in 0..params.len() {
        let x = params.values()[i];
        probe.values_mut()[i] = x + h;
        let (up, _) = probe.loss_and_gradient(&refs, &targets).unwrap();
        probe.values_mut()[i] = x - h;
        let (down, _) = probe.loss_and_gradient(&refs, &targets).unwrap();
        probe.values_mut()[i] = x;
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    worst
}

/// Random positive walks with random sentiment on an irregular calendar.
pub fn random_panel(seed: u64, n: usize) -> AlignedPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let d0 = TradingDate::from_ymd(2018, 1, 1).unwrap();
    let mut dates = Vec::with_capacity(n);
    let mut d = d0;
    for _ in 0..n {
        d = d.add_days(rng.random_range(1..4));
        dates.push(d);
    }
    let mut walk = |start: f64, vol: f64| {
        let mut v = start;
        (0..n)
            .map(|_| {
                v = (v + vol * noise.sample(&mut rng)).max(1.0);
                v
            })
            .collect::<Vec<f64>>()
    };
    let close = walk(100.0, 2.0);
    let gold = walk(1500.0, 10.0);
    let brent = walk(60.0, 1.0);
    let gsec = walk(6.0, 0.05);
    let usd_inr = walk(70.0, 0.3);
    let mut s = SentimentColumns {
        pos: vec![],
        neg: vec![],
        neu: vec![],
        compound: vec![],
    };
    for _ in 0..n {
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        let (pos, neg) = (a * 0.5, b * 0.5);
        s.pos.push(pos);
        s.neg.push(neg);
        s.neu.push(1.0 - pos - neg);
        s.compound.push(rng.random_range(-1.0..1.0));
    }
    AlignedPanel {
        ticker: "RND".into(),
        dates,
        close,
        gold,
        brent,
        gsec,
        usd_inr,
        sentiment: Some(s),
    }
}

/// Small models so many panels can be trained quickly.
pub fn quick_settings() -> ModelSettings {
    let topology = LstmTopology {
        layer_sizes: vec![4],
        dense_sizes: vec![1],
        ..LstmTopology::default()
    };
    let config = TrainConfig {
        epochs: 2,
        ..TrainConfig::default()
    };
    ModelSettings {
        window: 5,
        lstm: (topology.clone(), config.clone()),
        bilstm: (topology, config),
        forest: ForestConfig {
            n_trees: 8,
            ..ForestConfig::default()
        },
        ..ModelSettings::default()
    }
}
