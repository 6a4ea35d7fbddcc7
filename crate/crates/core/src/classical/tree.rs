//! Greedy CART regression trees.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Relative slack below which two split scores count as tied. Ties keep the
/// split found first (lower feature index, then lower threshold).
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features drawn per node; all of them when `>= n_features`.
    pub max_features: usize,
}

/// Nodes in depth-first order; `nodes[0]` is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

impl RegressionTree {
    pub fn leaf(value: f64, samples: usize, n_features: usize) -> Self {
        Self {
            nodes: vec![Node::Leaf { value, samples }],
            n_features,
        }
    }

    /// Fits on `rows[i]` for every `i` in `sample` (repeats allowed, as in a
    /// bootstrap draw).
    pub fn fit<R: Rng, X: AsRef<[f64]>>(
        rows: &[X],
        targets: &[f64],
        sample: &[usize],
        config: &TreeConfig,
        rng: &mut R,
    ) -> Self {
        let n_features = rows.first().map_or(0, |r| r.as_ref().len());
        let mut builder = Builder {
            rows,
            targets,
            config,
            n_features,
            nodes: Vec::new(),
        };
        let mut idx = sample.to_vec();
        builder.grow(&mut idx, 0, rng);
        Self {
            nodes: builder.nodes,
            n_features,
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value, .. } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Builder<'a, X> {
    rows: &'a [X],
    targets: &'a [f64],
    config: &'a TreeConfig,
    n_features: usize,
    nodes: Vec<Node>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl<X: AsRef<[f64]>> Builder<'_, X> {
    fn x(&self, i: usize, f: usize) -> f64 {
        self.rows[i].as_ref()[f]
    }

    fn grow<R: Rng>(&mut self, idx: &mut [usize], depth: usize, rng: &mut R) -> usize {
        let at = self.nodes.len();
        let n = idx.len();
        let sum: f64 = idx.iter().map(|&i| self.targets[i]).sum();
        let value = sum / n as f64;
        self.nodes.push(Node::Leaf { value, samples: n });

        let depth_ok = self.config.max_depth.is_none_or(|d| depth < d);
        let leaf = self.config.min_samples_leaf.max(1);
        if !depth_ok || n < 2 * leaf {
            return at;
        }
        let Some(best) = self.best_split(idx, sum, rng) else {
            return at;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.x(i, best.feature) <= best.threshold);
        let n_left = l.len();
        idx[..n_left].copy_from_slice(&l);
        idx[n_left..].copy_from_slice(&r);
        let (li, ri) = idx.split_at_mut(n_left);
        let left = self.grow(li, depth + 1, rng);
        let right = self.grow(ri, depth + 1, rng);
        self.nodes[at] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        at
    }

    fn features<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let p = self.n_features;
        let m = self.config.max_features;
        if m >= p {
            return (0..p).collect();
        }
        let mut all: Vec<usize> = (0..p).collect();
        for k in 0..m {
            let j = rng.random_range(k..p);
            all.swap(k, j);
        }
        let mut chosen = all[..m].to_vec();
        chosen.sort_unstable();
        chosen
    }

    /// Maximizes `S_l^2/n_l + S_r^2/n_r`, which is the parent SSE minus the
    /// children's SSE plus a constant.
    fn best_split<R: Rng>(&self, idx: &[usize], total: f64, rng: &mut R) -> Option<Candidate> {
        let n = idx.len();
        let leaf = self.config.min_samples_leaf.max(1);
        let parent = total * total / n as f64;
        let mut best: Option<Candidate> = None;
        let mut order: Vec<(f64, f64)> = Vec::with_capacity(n);
        for f in self.features(rng) {
            order.clear();
            order.extend(idx.iter().map(|&i| (self.x(i, f), self.targets[i])));
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_sum = 0.0;
            for k in 0..n - 1 {
                left_sum += order[k].1;
                let n_left = k + 1;
                if order[k].0 == order[k + 1].0 || n_left < leaf || n - n_left < leaf {
                    continue;
                }
                let right_sum = total - left_sum;
                let score = left_sum * left_sum / n_left as f64
                    + right_sum * right_sum / (n - n_left) as f64;
                let beats = match &best {
                    None => score - parent > TIE_TOLERANCE * parent.abs().max(1.0),
                    Some(b) => score - b.score > TIE_TOLERANCE * b.score.abs().max(1.0),
                };
                if beats {
                    let (a, b) = (order[k].0, order[k + 1].0);
                    let mut threshold = a + (b - a) / 2.0;
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some(Candidate {
                        feature: f,
                        threshold,
                        score,
                    });
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(depth: Option<usize>) -> TreeConfig {
        TreeConfig {
            max_depth: depth,
            min_samples_leaf: 1,
            max_features: usize::MAX,
        }
    }

    fn fit(rows: &[Vec<f64>], y: &[f64], c: &TreeConfig) -> RegressionTree {
        let sample: Vec<usize> = (0..y.len()).collect();
        RegressionTree::fit(rows, y, &sample, c, &mut ChaCha8Rng::seed_from_u64(0))
    }

    #[test]
    fn depth_zero_is_mean() {
        let rows = vec![vec![1.0], vec![2.0], vec![3.0]];
        let t = fit(&rows, &[1.0, 2.0, 6.0], &cfg(Some(0)));
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&[100.0]), 3.0);
    }

    #[test]
    fn threshold_is_midpoint() {
        let rows = vec![vec![1.0], vec![2.0], vec![4.0], vec![8.0]];
        let t = fit(&rows, &[0.0, 0.0, 10.0, 10.0], &cfg(None));
        assert_eq!(
            t.nodes[0],
            Node::Split {
                feature: 0,
                threshold: 3.0,
                left: 1,
                right: 2
            }
        );
        assert_eq!(t.predict(&[3.0]), 0.0);
        assert_eq!(t.predict(&[3.5]), 10.0);
    }

    #[test]
    fn monotone_data_splits_in_the_middle() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 1.5]).collect();
        let y: Vec<f64> = (0..10).map(|i| 3.0 * i as f64 + 1.0).collect();
        let t = fit(&rows, &y, &cfg(Some(1)));
        let Node::Split { threshold, .. } = t.nodes[0] else {
            panic!("expected a split");
        };
        assert!(threshold > rows[4][0] && threshold < rows[5][0]);
    }

    #[test]
    fn leaves_respect_min_samples() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![(i * 7 % 20) as f64]).collect();
        let y: Vec<f64> = (0..20).map(|i| ((i * 13) % 5) as f64).collect();
        let c = TreeConfig {
            min_samples_leaf: 3,
            ..cfg(None)
        };
        let t = fit(&rows, &y, &c);
        for n in &t.nodes {
            if let Node::Leaf { samples, .. } = n {
                assert!(*samples >= 3);
            }
        }
    }

    #[test]
    fn constant_target_stays_a_leaf() {
        let rows = vec![vec![1.0], vec![2.0], vec![3.0]];
        let t = fit(&rows, &[4.0, 4.0, 4.0], &cfg(None));
        assert_eq!(t.nodes.len(), 1);
    }
}
