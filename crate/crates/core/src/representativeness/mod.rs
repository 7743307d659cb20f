//! Within-industry representativeness (x axis).
//!
//! Each topic's company weights form a 1-D sample. Companies are clustered
//! on that column for every K in the configured list, and the topic scores
//! the mean silhouette across those K. Well separated firm groups on a
//! topic push the score toward 1; a constant column scores exactly 0.

mod kmeans;
mod silhouette;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kmeans::{kmeans, KmeansFit};
pub use silhouette::silhouette_mean;

use crate::rng::derive_seed;
use crate::scoring::TopicScoreMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("k = {k} exceeds the number of samples ({n})")]
    TooFewSamples { k: usize, n: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("points contain non-finite coordinates")]
    NonFinite,
    #[error("points have inconsistent dimensions")]
    DimensionMismatch,
    #[error("fewer than two non-empty clusters")]
    DegenerateClustering,
    #[error("representativeness needs at least 3 companies, found {0}")]
    TooFewCompanies(usize),
    #[error("invalid cluster config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub k_list: Vec<usize>,
    pub max_iters: usize,
    /// Relative inertia change below which Lloyd iterations stop.
    pub tol: f64,
    pub n_init: usize,
    /// Set from the run seed by the pipeline.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig { k_list: vec![2, 3, 4, 5, 6], max_iters: 100, tol: 1e-6, n_init: 10, seed: 0 }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<(), ClusterError> {
        if let Some(&k) = self.k_list.iter().find(|&&k| k < 2) {
            return Err(ClusterError::InvalidConfig(format!("k_list entry {k} is below 2")));
        }
        if self.max_iters == 0 || self.n_init == 0 {
            return Err(ClusterError::InvalidConfig("max_iters and n_init must be at least 1".into()));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(ClusterError::InvalidConfig("tol must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativenessVector {
    pub year: i32,
    pub topics: Vec<String>,
    pub values: Vec<f64>,
}

impl RepresentativenessVector {
    pub fn get(&self, topic_id: &str) -> Option<f64> {
        self.topics.iter().position(|t| t == topic_id).map(|i| self.values[i])
    }
}

/// Mean silhouette of a 1-D column across the feasible K in `k_list`.
///
/// The column is sorted first so the result depends only on the multiset
/// of values, not on company order.
pub fn column_representativeness(column: &[f64], config: &ClusterConfig, stream: u64) -> Result<f64, ClusterError> {
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite);
    }
    if sorted.first() == sorted.last() {
        return Ok(0.0);
    }
    let points: Vec<Vec<f64>> = sorted.iter().map(|&v| vec![v]).collect();
    mean_silhouette_over_k(&points, config, stream)
}

fn mean_silhouette_over_k(points: &[Vec<f64>], config: &ClusterConfig, stream: u64) -> Result<f64, ClusterError> {
    let mut total = 0.0;
    let mut used = 0usize;
    for &k in config.k_list.iter().filter(|&&k| k <= points.len()) {
        let run = ClusterConfig { seed: derive_seed(stream, &[k as u64]), ..config.clone() };
        let fit = kmeans(points, k, &run)?;
        total += silhouette_mean(points, &fit.labels)?;
        used += 1;
    }
    Ok(if used == 0 { 0.0 } else { total / used as f64 })
}

/// Per-topic representativeness for one year.
pub fn topic_representativeness(
    matrix: &TopicScoreMatrix,
    config: &ClusterConfig,
) -> Result<RepresentativenessVector, ClusterError> {
    config.validate()?;
    let n = matrix.n_companies();
    if n < 3 {
        return Err(ClusterError::TooFewCompanies(n));
    }
    let values = (0..matrix.topics.len())
        .into_par_iter()
        .map(|t| column_representativeness(&matrix.column(t), config, derive_seed(config.seed, &[t as u64])))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RepresentativenessVector { year: matrix.year, topics: matrix.topics.clone(), values })
}

/// Clusters companies on their full topic vectors and returns the overall
/// mean silhouette across K. This does not attribute structure to topics.
pub fn matrix_silhouette(matrix: &TopicScoreMatrix, config: &ClusterConfig) -> Result<f64, ClusterError> {
    config.validate()?;
    let n = matrix.n_companies();
    if n < 3 {
        return Err(ClusterError::TooFewCompanies(n));
    }
    if matrix.weights.iter().all(|row| *row == matrix.weights[0]) {
        return Ok(0.0);
    }
    mean_silhouette_over_k(&matrix.weights, config, derive_seed(config.seed, &[u64::MAX]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(columns: &[&[f64]]) -> TopicScoreMatrix {
        let n = columns[0].len();
        TopicScoreMatrix {
            year: 2020,
            companies: (0..n).map(|i| format!("c{i:02}")).collect(),
            topics: (0..columns.len()).map(|t| format!("t{t}")).collect(),
            weights: (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect(),
        }
    }

    #[test]
    fn two_tight_groups_near_one() {
        let m = matrix(&[&[0.10, 0.11, 0.10, 0.90, 0.91, 0.90]]);
        let cfg = ClusterConfig { k_list: vec![2], ..Default::default() };
        let rep = topic_representativeness(&m, &cfg).unwrap();
        assert!(rep.values[0] > 0.98, "{}", rep.values[0]);
    }

    #[test]
    fn constant_column_is_zero() {
        let m = matrix(&[&[0.3; 5], &[0.0; 5]]);
        let rep = topic_representativeness(&m, &ClusterConfig::default()).unwrap();
        assert_eq!(rep.values, [0.0, 0.0]);
    }

    #[test]
    fn too_few_companies() {
        let m = matrix(&[&[0.1, 0.2]]);
        assert_eq!(topic_representativeness(&m, &ClusterConfig::default()), Err(ClusterError::TooFewCompanies(2)));
    }

    #[test]
    fn infeasible_k_skipped() {
        let m = matrix(&[&[0.0, 0.5, 1.0]]);
        let only_large = ClusterConfig { k_list: vec![4, 5], ..Default::default() };
        assert_eq!(topic_representativeness(&m, &only_large).unwrap().values, [0.0]);
        let mixed = ClusterConfig { k_list: vec![2, 5], ..Default::default() };
        let two = ClusterConfig { k_list: vec![2], ..Default::default() };
        assert_eq!(
            topic_representativeness(&m, &mixed).unwrap().values,
            topic_representativeness(&m, &two).unwrap().values
        );
    }

    #[test]
    fn matrix_mode_runs() {
        let m = matrix(&[&[0.0, 0.0, 1.0, 1.0], &[0.0, 0.1, 1.0, 0.9]]);
        let s = matrix_silhouette(&m, &ClusterConfig { k_list: vec![2], ..Default::default() }).unwrap();
        assert!(s > 0.8);
    }

    #[test]
    fn config_validation() {
        assert!(ClusterConfig { k_list: vec![1], ..Default::default() }.validate().is_err());
        assert!(ClusterConfig { n_init: 0, ..Default::default() }.validate().is_err());
        assert!(ClusterConfig { tol: f64::NAN, ..Default::default() }.validate().is_err());
    }
}
