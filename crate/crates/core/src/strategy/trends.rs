use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::StrategyError;
use crate::corpus::{Dimension, TopicLexicon};
use crate::scoring::TopicScoreMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub year: i32,
    pub mean_weight: f64,
    /// Relative change against the previous year; `None` for the first
    /// year and whenever the previous mean is 0.
    pub change_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    pub topic_id: String,
    pub points: Vec<TrendPoint>,
}

/// Mean topic weight per year across companies, with year-over-year
/// change rates. Series are sorted by topic id; a topic missing from a
/// year's matrix counts as weight 0 there.
pub fn topic_trends(matrices: &BTreeMap<i32, TopicScoreMatrix>) -> Vec<TrendSeries> {
    let topics: BTreeSet<&str> = matrices.values().flat_map(|m| m.topics.iter().map(String::as_str)).collect();
    topics
        .into_iter()
        .map(|topic| {
            let mut points: Vec<TrendPoint> = Vec::with_capacity(matrices.len());
            for (&year, m) in matrices {
                let mean_weight = match (m.topic_index(topic), m.n_companies()) {
                    (Some(t), n) if n > 0 => m.weights.iter().map(|r| r[t]).sum::<f64>() / n as f64,
                    _ => 0.0,
                };
                let change_rate = points
                    .last()
                    .filter(|prev| prev.mean_weight > 0.0)
                    .map(|prev| (mean_weight - prev.mean_weight) / prev.mean_weight);
                points.push(TrendPoint { year, mean_weight, change_rate });
            }
            TrendSeries { topic_id: topic.to_string(), points }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsgTriple {
    pub company_id: String,
    pub year: i32,
    pub e: f64,
    pub s: f64,
    pub g: f64,
}

fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        values.iter().map(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
    } else {
        vec![0.0; values.len()]
    }
}

/// Per-company E/S/G sums of topic weights, each dimension min-max scaled
/// across the year's companies.
pub fn esg_triples(matrix: &TopicScoreMatrix, lexicon: &TopicLexicon) -> Result<Vec<EsgTriple>, StrategyError> {
    let dims = matrix
        .topics
        .iter()
        .map(|t| lexicon.dimension_of(t).ok_or_else(|| StrategyError::MissingDimension(t.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let sum_dim = |row: &[f64], dim: Dimension| -> f64 {
        row.iter().zip(&dims).filter(|(_, d)| **d == dim).map(|(w, _)| w).sum()
    };
    let raw = |dim: Dimension| -> Vec<f64> { matrix.weights.iter().map(|r| sum_dim(r, dim)).collect() };
    let (e, s, g) = (min_max(&raw(Dimension::E)), min_max(&raw(Dimension::S)), min_max(&raw(Dimension::G)));
    Ok(matrix
        .companies
        .iter()
        .enumerate()
        .map(|(i, c)| EsgTriple { company_id: c.clone(), year: matrix.year, e: e[i], s: s[i], g: g[i] })
        .collect())
}
