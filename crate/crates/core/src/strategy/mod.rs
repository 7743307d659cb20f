//! The 2x2 strategic model and the descriptive series around it.
//!
//! A company-year's x coordinate is the representativeness of its topics
//! weighted by its own L1-normalized topic weights; y does the same with
//! topic importance. Both are z-scored per year before zoning.

mod svg;
mod trends;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use svg::render_scatter_svg;
pub use trends::{esg_triples, topic_trends, EsgTriple, TrendPoint, TrendSeries};

use crate::distinctiveness::ImportanceVector;
use crate::representativeness::RepresentativenessVector;
use crate::scoring::TopicScoreMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("topic sets differ: {0}")]
    TopicSetMismatch(String),
    #[error("axis vectors are for year {axis}, matrix is for {matrix}")]
    YearMismatch { matrix: i32, axis: i32 },
    #[error("company `{0}` has no class label")]
    MissingLabel(String),
    #[error("topic `{0}` has no E/S/G dimension in the lexicon")]
    MissingDimension(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Zone {
    #[serde(rename = "I_pioneering")]
    Pioneering,
    #[serde(rename = "II_niche")]
    Niche,
    #[serde(rename = "III_shadow")]
    Shadow,
    /// High representativeness, low distinctiveness. Our own name.
    #[serde(rename = "IV_follower")]
    Follower,
}

impl Zone {
    pub const ALL: [Zone; 4] = [Zone::Pioneering, Zone::Niche, Zone::Shadow, Zone::Follower];

    pub fn as_str(self) -> &'static str {
        match self {
            Zone::Pioneering => "I_pioneering",
            Zone::Niche => "II_niche",
            Zone::Shadow => "III_shadow",
            Zone::Follower => "IV_follower",
        }
    }

    /// Points on a threshold fall to the low side.
    pub fn classify(x: f64, y: f64, x_threshold: f64, y_threshold: f64) -> Zone {
        match (x > x_threshold, y > y_threshold) {
            (true, true) => Zone::Pioneering,
            (false, true) => Zone::Niche,
            (false, false) => Zone::Shadow,
            (true, false) => Zone::Follower,
        }
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Zone {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Zone::ALL.into_iter().find(|z| z.as_str() == s).ok_or_else(|| format!("unknown zone `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    #[default]
    Median,
    Zero,
}

impl FromStr for ThresholdMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "median" => Ok(ThresholdMode::Median),
            "zero" => Ok(ThresholdMode::Zero),
            other => Err(format!("unknown threshold mode `{other}` (expected median or zero)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardizeMode {
    #[default]
    PerYear,
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicPoint {
    pub company_id: String,
    pub year: i32,
    pub x_raw: f64,
    pub y_raw: f64,
    pub x: f64,
    pub y: f64,
    pub zone: Option<Zone>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub x: f64,
    pub y: f64,
}

/// Population z-scores. A spread at rounding-noise level relative to the
/// values' magnitude counts as zero and maps everything to 0.
pub fn z_scores(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if sd > 1e-12 * scale {
        values.iter().map(|v| (v - mean) / sd).collect()
    } else {
        vec![0.0; values.len()]
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn aligned(matrix_topics: &[String], axis_topics: &[String], what: &str) -> Result<Vec<usize>, StrategyError> {
    if matrix_topics.len() != axis_topics.len() {
        return Err(StrategyError::TopicSetMismatch(format!(
            "{what} has {} topics, matrix has {}",
            axis_topics.len(),
            matrix_topics.len()
        )));
    }
    matrix_topics
        .iter()
        .map(|t| {
            axis_topics
                .iter()
                .position(|a| a == t)
                .ok_or_else(|| StrategyError::TopicSetMismatch(format!("{what} lacks topic `{t}`")))
        })
        .collect()
}

/// Raw and per-year standardized strategic coordinates, zones unset.
pub fn company_coordinates(
    matrix: &TopicScoreMatrix,
    rep: &RepresentativenessVector,
    imp: &ImportanceVector,
) -> Result<Vec<StrategicPoint>, StrategyError> {
    for axis_year in [rep.year, imp.year] {
        if axis_year != matrix.year {
            return Err(StrategyError::YearMismatch { matrix: matrix.year, axis: axis_year });
        }
    }
    let rep_idx = aligned(&matrix.topics, &rep.topics, "representativeness")?;
    let imp_idx = aligned(&matrix.topics, &imp.topics, "importance")?;

    let raws: Vec<(f64, f64)> = matrix
        .weights
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            if total <= 0.0 {
                return (0.0, 0.0);
            }
            row.iter().enumerate().fold((0.0, 0.0), |(x, y), (t, w)| {
                let share = w / total;
                (x + share * rep.values[rep_idx[t]], y + share * imp.values[imp_idx[t]])
            })
        })
        .collect();
    let xs = z_scores(&raws.iter().map(|r| r.0).collect::<Vec<_>>());
    let ys = z_scores(&raws.iter().map(|r| r.1).collect::<Vec<_>>());
    Ok(matrix
        .companies
        .iter()
        .enumerate()
        .map(|(i, c)| StrategicPoint {
            company_id: c.clone(),
            year: matrix.year,
            x_raw: raws[i].0,
            y_raw: raws[i].1,
            x: xs[i],
            y: ys[i],
            zone: None,
        })
        .collect())
}

/// Re-standardizes x and y from the raw coordinates pooled over all the
/// given points (all years at once).
pub fn standardize_global(points: &mut [StrategicPoint]) {
    let xs = z_scores(&points.iter().map(|p| p.x_raw).collect::<Vec<_>>());
    let ys = z_scores(&points.iter().map(|p| p.y_raw).collect::<Vec<_>>());
    for (p, (x, y)) in points.iter_mut().zip(xs.into_iter().zip(ys)) {
        p.x = x;
        p.y = y;
    }
}

pub fn zone_thresholds(points: &[StrategicPoint], mode: ThresholdMode) -> Thresholds {
    match mode {
        ThresholdMode::Zero => Thresholds { x: 0.0, y: 0.0 },
        ThresholdMode::Median => Thresholds {
            x: median(&points.iter().map(|p| p.x).collect::<Vec<_>>()),
            y: median(&points.iter().map(|p| p.y).collect::<Vec<_>>()),
        },
    }
}

/// Assigns every point of one year to a zone and returns the thresholds.
pub fn assign_zones(points: &mut [StrategicPoint], mode: ThresholdMode) -> Thresholds {
    let th = zone_thresholds(points, mode);
    for p in points.iter_mut() {
        p.zone = Some(Zone::classify(p.x, p.y, th.x, th.y));
    }
    th
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCompany {
    pub rank: usize,
    pub company_id: String,
    pub score: f64,
}

fn descending(points: &[StrategicPoint], key: impl Fn(&StrategicPoint) -> f64) -> Vec<&StrategicPoint> {
    let mut sorted: Vec<&StrategicPoint> = points.iter().collect();
    sorted.sort_by(|a, b| key(b).total_cmp(&key(a)).then_with(|| a.company_id.cmp(&b.company_id)));
    sorted
}

/// Top companies of one year by x, ties broken by company id.
pub fn rank_within_class(points: &[StrategicPoint], top_n: usize) -> Vec<RankedCompany> {
    descending(points, |p| p.x)
        .into_iter()
        .take(top_n)
        .enumerate()
        .map(|(i, p)| RankedCompany { rank: i + 1, company_id: p.company_id.clone(), score: p.x })
        .collect()
}

/// The company with the highest y in each class; classes without
/// companies are absent.
pub fn rank_across_classes(
    points: &[StrategicPoint],
    labels: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, RankedCompany>, StrategyError> {
    let mut winners: BTreeMap<String, RankedCompany> = BTreeMap::new();
    for p in descending(points, |p| p.y) {
        let class = labels.get(&p.company_id).ok_or_else(|| StrategyError::MissingLabel(p.company_id.clone()))?;
        winners
            .entry(class.clone())
            .or_insert_with(|| RankedCompany { rank: 1, company_id: p.company_id.clone(), score: p.y });
    }
    Ok(winners)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneCount {
    pub year: i32,
    pub zone: Zone,
    pub count: usize,
}

/// Zone occupancy per year, all four zones listed for every year.
pub fn zones_summary(points: &[StrategicPoint]) -> Vec<ZoneCount> {
    let mut counts: BTreeMap<(i32, Zone), usize> = BTreeMap::new();
    let years: std::collections::BTreeSet<i32> = points.iter().map(|p| p.year).collect();
    for &year in &years {
        for zone in Zone::ALL {
            counts.insert((year, zone), 0);
        }
    }
    for p in points {
        if let Some(zone) = p.zone {
            *counts.entry((p.year, zone)).or_default() += 1;
        }
    }
    counts.into_iter().map(|((year, zone), count)| ZoneCount { year, zone, count }).collect()
}
