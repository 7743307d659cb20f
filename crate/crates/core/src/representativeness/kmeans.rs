use rand::Rng;

use super::{ClusterConfig, ClusterError};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct KmeansFit {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances of every point to its cluster mean.
    pub inertia: f64,
    pub n_iter: usize,
    /// Inertia after each Lloyd iteration of the returned run.
    pub inertia_history: Vec<f64>,
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, sq_dist(point, &centroids[0]));
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn plus_plus_init<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 {
                    acc += d;
                    chosen = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            chosen.expect("positive total implies a positive weight")
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick].clone();
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Moves, for each empty cluster, the point farthest from its centroid
/// (taken only from clusters with more than one member) into that cluster.
fn repair_empty(points: &[Vec<f64>], labels: &mut [usize], centroids: &mut [Vec<f64>]) -> usize {
    let k = centroids.len();
    let mut sizes = vec![0usize; k];
    labels.iter().for_each(|&l| sizes[l] += 1);
    let mut repairs = 0;
    for j in 0..k {
        if sizes[j] > 0 {
            continue;
        }
        let donor = (0..points.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .map(|i| (i, sq_dist(&points[i], &centroids[labels[i]])))
            .fold(None::<(usize, f64)>, |best, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        let (i, _) = donor.expect("k <= n leaves a multi-member cluster");
        sizes[labels[i]] -= 1;
        labels[i] = j;
        sizes[j] = 1;
        centroids[j] = points[i].clone();
        repairs += 1;
    }
    repairs
}

fn cluster_means(points: &[Vec<f64>], labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut sizes = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        sizes[l] += 1;
        sums[l].iter_mut().zip(p).for_each(|(s, v)| *s += v);
    }
    for (s, &n) in sums.iter_mut().zip(&sizes) {
        s.iter_mut().for_each(|v| *v /= n as f64);
    }
    sums
}

fn inertia(points: &[Vec<f64>], labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points.iter().zip(labels).map(|(p, &l)| sq_dist(p, &centroids[l])).sum()
}

fn lloyd(points: &[Vec<f64>], k: usize, config: &ClusterConfig, seed: u64) -> KmeansFit {
    let mut rng = rng::stream(seed, &[]);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut labels: Vec<usize> = Vec::new();
    let mut history: Vec<f64> = Vec::new();
    let mut n_iter = 0;
    while n_iter < config.max_iters {
        n_iter += 1;
        let mut next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
        repair_empty(points, &mut next, &mut centroids);
        centroids = cluster_means(points, &next, k);
        let current = inertia(points, &next, &centroids);
        let unchanged = next == labels;
        labels = next;
        let converged = match history.last() {
            Some(&prev) => {
                debug_assert!(current <= prev * (1.0 + 1e-12) + 1e-300, "inertia rose: {prev} -> {current}");
                prev <= 0.0 || (prev - current) / prev <= config.tol
            }
            None => current == 0.0,
        };
        history.push(current);
        if unchanged || converged {
            break;
        }
    }
    KmeansFit { inertia: *history.last().expect("at least one iteration"), labels, centroids, n_iter, inertia_history: history }
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Restart `r` draws from the stream seeded with `config.seed + r`; the
/// lowest-inertia run wins, earlier restarts winning ties.
pub fn kmeans(points: &[Vec<f64>], k: usize, config: &ClusterConfig) -> Result<KmeansFit, ClusterError> {
    if k < 2 {
        return Err(ClusterError::InvalidK(k));
    }
    if points.is_empty() || k > points.len() {
        return Err(ClusterError::TooFewSamples { k, n: points.len() });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(ClusterError::DimensionMismatch);
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite);
    }
    let mut best: Option<KmeansFit> = None;
    for restart in 0..config.n_init.max(1) {
        let fit = lloyd(points, k, config, config.seed.wrapping_add(restart as u64));
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(values: &[f64]) -> Vec<Vec<f64>> {
        values.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn separated_pairs() {
        let fit = kmeans(&one_d(&[0.0, 0.0, 10.0, 10.0]), 2, &ClusterConfig::default()).unwrap();
        assert_eq!(fit.inertia, 0.0);
        assert_eq!(fit.labels[0], fit.labels[1]);
        assert_eq!(fit.labels[2], fit.labels[3]);
        assert_ne!(fit.labels[0], fit.labels[2]);
    }

    #[test]
    fn identical_points_repair() {
        let points = one_d(&[3.0; 5]);
        let cfg = ClusterConfig { n_init: 1, ..Default::default() };
        let fit = kmeans(&points, 2, &cfg).unwrap();
        assert_eq!(fit.inertia, 0.0);
        assert!(fit.labels.contains(&0) && fit.labels.contains(&1));

        let mut labels = vec![0; 5];
        let mut centroids = vec![vec![3.0], vec![3.0]];
        assert_eq!(repair_empty(&points, &mut labels, &mut centroids), 1);
        assert_eq!(labels, [1, 0, 0, 0, 0]);
    }

    #[test]
    fn repeatable() {
        let points = one_d(&[0.1, 0.4, 0.35, 0.9, 0.75, 0.2, 0.05, 0.6]);
        let cfg = ClusterConfig { seed: 42, ..Default::default() };
        let a = kmeans(&points, 3, &cfg).unwrap();
        let b = kmeans(&points, 3, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let cfg = ClusterConfig::default();
        assert_eq!(kmeans(&one_d(&[1.0, 2.0]), 3, &cfg), Err(ClusterError::TooFewSamples { k: 3, n: 2 }));
        assert_eq!(kmeans(&one_d(&[1.0, 2.0]), 1, &cfg), Err(ClusterError::InvalidK(1)));
        assert_eq!(kmeans(&one_d(&[1.0, f64::NAN]), 2, &cfg), Err(ClusterError::NonFinite));
        assert_eq!(kmeans(&[vec![1.0], vec![1.0, 2.0]], 2, &cfg), Err(ClusterError::DimensionMismatch));
    }

    #[test]
    fn history_non_increasing() {
        let points: Vec<Vec<f64>> = (0..40).map(|i| vec![((i * 37) % 17) as f64, ((i * 11) % 7) as f64]).collect();
        for seed in 0..10 {
            let cfg = ClusterConfig { seed, n_init: 1, ..Default::default() };
            let fit = kmeans(&points, 4, &cfg).unwrap();
            for w in fit.inertia_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }
    }
}
