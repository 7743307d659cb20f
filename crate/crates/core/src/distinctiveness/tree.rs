use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Gini impurity of a class distribution given as proportions: 1 - sum p^2.
pub fn gini(proportions: &[f64]) -> f64 {
    1.0 - proportions.iter().map(|p| p * p).sum::<f64>()
}

fn gini_counts(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t) * (c as f64 / t)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        class_counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    /// Sample-weighted impurity decrease credited to each feature.
    pub importances: Vec<f64>,
}

pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: usize,
}

struct Builder<'a, R> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    n_root: f64,
    params: &'a TreeParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
    importances: Vec<f64>,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    decrease: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn better(dec: f64, feature: usize, threshold: f64, best: &Option<SplitChoice>) -> bool {
    match best {
        None => true,
        Some(b) => dec > b.decrease || (dec == b.decrease && (feature, threshold) < (b.feature, b.threshold)),
    }
}

impl<R: Rng> Builder<'_, R> {
    fn class_counts(&self, samples: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        samples.iter().for_each(|&i| counts[self.y[i]] += 1);
        counts
    }

    /// Best split over a random feature subset. Constant features do not
    /// count toward `max_features`, so a split is found whenever one exists.
    fn find_split(&mut self, samples: &[usize], counts: &[usize]) -> Option<SplitChoice> {
        let m = samples.len();
        let parent = gini_counts(counts, m);
        let n_features = self.x[0].len();
        let mut order: Vec<usize> = (0..n_features).collect();
        order.shuffle(self.rng);

        let mut best: Option<SplitChoice> = None;
        let mut visited = 0;
        let mut sorted = samples.to_vec();
        for &f in &order {
            if visited >= self.params.max_features {
                break;
            }
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let lo = self.x[sorted[0]][f];
            let hi = self.x[sorted[m - 1]][f];
            if lo == hi {
                continue;
            }
            visited += 1;
            let mut left = vec![0usize; self.n_classes];
            for pos in 0..m - 1 {
                left[self.y[sorted[pos]]] += 1;
                let (v, next) = (self.x[sorted[pos]][f], self.x[sorted[pos + 1]][f]);
                if v == next {
                    continue;
                }
                let n_left = pos + 1;
                let n_right = m - n_left;
                let right: Vec<usize> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
                let dec = parent
                    - (n_left as f64 / m as f64) * gini_counts(&left, n_left)
                    - (n_right as f64 / m as f64) * gini_counts(&right, n_right);
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                if better(dec, f, threshold, &best) {
                    best = Some(SplitChoice { feature: f, threshold, decrease: dec, left: Vec::new(), right: Vec::new() });
                }
            }
        }
        best.map(|mut b| {
            let (l, r): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&i| self.x[i][b.feature] <= b.threshold);
            b.left = l;
            b.right = r;
            b
        })
    }

    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_counts(&samples);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { class_counts: counts.clone() });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let too_small = samples.len() < self.params.min_samples_split;
        let too_deep = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || too_small || too_deep {
            return id;
        }
        let Some(split) = self.find_split(&samples, &counts) else {
            return id;
        };
        self.importances[split.feature] += samples.len() as f64 / self.n_root * split.decrease;
        let left = self.grow(split.left, depth + 1);
        let right = self.grow(split.right, depth + 1);
        self.nodes[id] = Node::Split { feature: split.feature, threshold: split.threshold, left, right };
        id
    }
}

impl DecisionTree {
    /// Grows a CART classification tree on the given sample indices
    /// (duplicates allowed, as produced by bootstrapping).
    pub(crate) fn fit<R: Rng>(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        samples: Vec<usize>,
        params: &TreeParams,
        rng: &mut R,
    ) -> DecisionTree {
        let n_features = x.first().map_or(0, Vec::len);
        let mut builder = Builder {
            x,
            y,
            n_classes,
            n_root: samples.len() as f64,
            params,
            rng,
            nodes: Vec::new(),
            importances: vec![0.0; n_features],
        };
        if n_features > 0 && !samples.is_empty() {
            builder.grow(samples, 0);
        } else {
            let counts = builder.class_counts(&samples);
            builder.nodes.push(Node::Leaf { class_counts: counts });
        }
        DecisionTree { nodes: builder.nodes, importances: builder.importances }
    }

    /// Majority class of the leaf reached by `sample`; ties go to the lowest
    /// class index.
    pub fn predict_index(&self, sample: &[f64]) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { class_counts } => return argmax_lowest(class_counts),
                Node::Split { feature, threshold, left, right } => {
                    id = if sample[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    pub fn split_features(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf { .. } => None,
        })
    }
}

pub(crate) fn argmax_lowest(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn gini_exact_values() {
        assert_eq!(gini(&[1.0]), 0.0);
        assert_eq!(gini(&[0.5, 0.5]), 0.5);
        assert_eq!(gini_counts(&[2, 2], 4), 0.5);
    }

    #[test]
    fn splits_on_the_separating_feature() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![if i < 4 { 0.0 } else { 1.0 }, 5.0]).collect();
        let y: Vec<usize> = (0..8).map(|i| usize::from(i >= 4)).collect();
        let params = TreeParams { max_depth: None, min_samples_split: 2, max_features: 1 };
        for seed in 0..20 {
            let tree = DecisionTree::fit(&x, &y, 2, (0..8).collect(), &params, &mut rng::stream(seed, &[]));
            assert_eq!(tree.n_splits(), 1);
            assert!(tree.split_features().all(|f| f == 0));
            assert_eq!(tree.importances, [0.5, 0.0]);
            for (xi, &yi) in x.iter().zip(&y) {
                assert_eq!(tree.predict_index(xi), yi);
            }
        }
    }

    #[test]
    fn depth_limit() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..8).map(|i| i % 2).collect();
        let params = TreeParams { max_depth: Some(1), min_samples_split: 2, max_features: 1 };
        let tree = DecisionTree::fit(&x, &y, 2, (0..8).collect(), &params, &mut rng::stream(0, &[]));
        assert_eq!(tree.n_splits(), 1);
        let deep = TreeParams { max_depth: None, ..params };
        let tree = DecisionTree::fit(&x, &y, 2, (0..8).collect(), &deep, &mut rng::stream(0, &[]));
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(tree.predict_index(xi), yi);
        }
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax_lowest(&[2, 3, 3]), 1);
        assert_eq!(argmax_lowest(&[0, 0]), 0);
    }
}
