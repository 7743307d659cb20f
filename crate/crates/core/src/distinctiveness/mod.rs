//! Cross-sector distinctiveness (y axis).
//!
//! A random forest learns to predict a company class label (service area
//! by default) from the year's topic weights. A topic's distinctiveness is
//! its share of the forest's total Gini impurity decrease.

mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tree::{gini, DecisionTree, Node};
use tree::{argmax_lowest, TreeParams};

use crate::corpus::CompanyMeta;
use crate::rng;
use crate::scoring::TopicScoreMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ForestError {
    #[error("company `{0}` has no class label")]
    LabelMismatch(String),
    #[error("sample has {found} features, forest expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training needs at least 2 samples, found {0}")]
    TooFewSamples(usize),
    #[error("invalid forest config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FeaturesPerSplit {
    #[default]
    Sqrt,
    All,
    Fraction(f64),
}

impl FeaturesPerSplit {
    pub fn count(self, n_features: usize) -> usize {
        let m = match self {
            FeaturesPerSplit::Sqrt => (n_features as f64).sqrt().floor() as usize,
            FeaturesPerSplit::All => n_features,
            FeaturesPerSplit::Fraction(f) => (f * n_features as f64).floor() as usize,
        };
        m.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub features_per_split: FeaturesPerSplit,
    pub bootstrap: bool,
    /// Set from the run seed by the pipeline.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 200,
            max_depth: None,
            min_samples_split: 2,
            features_per_split: FeaturesPerSplit::Sqrt,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<(), ForestError> {
        if self.n_trees == 0 {
            return Err(ForestError::InvalidConfig("n_trees must be at least 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(ForestError::InvalidConfig("min_samples_split must be at least 2".into()));
        }
        if let FeaturesPerSplit::Fraction(f) = self.features_per_split {
            if !(f > 0.0 && f <= 1.0) {
                return Err(ForestError::InvalidConfig(format!("feature fraction {f} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    #[default]
    ServiceArea,
    Country,
    Custom,
}

impl LabelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelKind::ServiceArea => "service_area",
            LabelKind::Country => "country",
            LabelKind::Custom => "custom",
        }
    }
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "service_area" => Ok(LabelKind::ServiceArea),
            "country" => Ok(LabelKind::Country),
            "custom" => Ok(LabelKind::Custom),
            other => Err(format!("unknown label kind `{other}`")),
        }
    }
}

/// Class label per company.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanyLabels {
    pub kind: LabelKind,
    pub by_company: BTreeMap<String, String>,
}

impl CompanyLabels {
    /// Labels derived from company metadata. `Custom` labels must be built
    /// by the caller.
    pub fn from_meta(companies: &[CompanyMeta], kind: LabelKind) -> Option<Self> {
        let label = |c: &CompanyMeta| match kind {
            LabelKind::ServiceArea => Some(c.service_area.to_string()),
            LabelKind::Country => Some(c.country.clone()),
            LabelKind::Custom => None,
        };
        let by_company = companies
            .iter()
            .map(|c| label(c).map(|l| (c.company_id.clone(), l)))
            .collect::<Option<BTreeMap<_, _>>>()?;
        Some(CompanyLabels { kind, by_company })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub year: i32,
    pub topics: Vec<String>,
    pub label_kind: LabelKind,
    /// Sorted class labels; tree outputs index into this.
    pub classes: Vec<String>,
    pub trees: Vec<DecisionTree>,
    /// All training samples carried one class.
    pub single_class: bool,
    /// Share of samples predicted correctly by the trees that did not see
    /// them; `None` when no sample was ever out of bag.
    pub oob_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceVector {
    pub year: i32,
    pub topics: Vec<String>,
    pub values: Vec<f64>,
    pub label_kind: LabelKind,
    /// The forest never reduced impurity; all values are 0.
    pub degenerate: bool,
}

impl ImportanceVector {
    pub fn get(&self, topic_id: &str) -> Option<f64> {
        self.topics.iter().position(|t| t == topic_id).map(|i| self.values[i])
    }
}

/// Sorted class labels, fitted trees and out-of-bag accuracy.
pub type TrainedTrees = (Vec<String>, Vec<DecisionTree>, Option<f64>);

/// Trains a forest on raw feature rows and string labels.
pub fn train_forest_on(
    x: &[Vec<f64>],
    labels: &[String],
    config: &ForestConfig,
) -> Result<TrainedTrees, ForestError> {
    config.validate()?;
    let n = x.len();
    if n < 2 {
        return Err(ForestError::TooFewSamples(n));
    }
    if labels.len() != n {
        return Err(ForestError::LabelMismatch(format!("{} labels for {n} samples", labels.len())));
    }
    let p = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != p) {
        return Err(ForestError::DimensionMismatch { expected: p, found: row.len() });
    }
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    let y: Vec<usize> = labels.iter().map(|l| classes.binary_search(l).expect("label present")).collect();
    let params = TreeParams {
        max_depth: config.max_depth,
        min_samples_split: config.min_samples_split,
        max_features: config.features_per_split.count(p),
    };

    let fitted: Vec<(DecisionTree, Vec<bool>)> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(config.seed, &[t as u64]);
            let samples: Vec<usize> =
                if config.bootstrap { (0..n).map(|_| rng.random_range(0..n)).collect() } else { (0..n).collect() };
            let mut in_bag = vec![false; n];
            samples.iter().for_each(|&i| in_bag[i] = true);
            (DecisionTree::fit(x, &y, classes.len(), samples, &params, &mut rng), in_bag)
        })
        .collect();

    let mut scored = 0usize;
    let mut correct = 0usize;
    for i in 0..n {
        let mut votes = vec![0usize; classes.len()];
        for (tree, in_bag) in &fitted {
            if !in_bag[i] {
                votes[tree.predict_index(&x[i])] += 1;
            }
        }
        if votes.iter().any(|&v| v > 0) {
            scored += 1;
            correct += usize::from(argmax_lowest(&votes) == y[i]);
        }
    }
    let oob = (scored > 0).then(|| correct as f64 / scored as f64);
    Ok((classes, fitted.into_iter().map(|(t, _)| t).collect(), oob))
}

/// Trains one forest for one year. Every company in `matrix` needs a label.
pub fn train_forest(
    matrix: &TopicScoreMatrix,
    labels: &CompanyLabels,
    config: &ForestConfig,
) -> Result<RandomForest, ForestError> {
    let y = matrix
        .companies
        .iter()
        .map(|c| labels.by_company.get(c).cloned().ok_or_else(|| ForestError::LabelMismatch(c.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let (classes, trees, oob_accuracy) = train_forest_on(&matrix.weights, &y, config)?;
    Ok(RandomForest {
        year: matrix.year,
        topics: matrix.topics.clone(),
        label_kind: labels.kind,
        single_class: classes.len() < 2,
        classes,
        trees,
        oob_accuracy,
    })
}

/// Mean decrease in Gini impurity per topic, summed over trees and
/// normalized to sum to 1.
pub fn gini_importance(forest: &RandomForest) -> ImportanceVector {
    let mut values = vec![0.0; forest.topics.len()];
    for tree in &forest.trees {
        values.iter_mut().zip(&tree.importances).for_each(|(v, t)| *v += t);
    }
    let total: f64 = values.iter().sum();
    let degenerate = total <= 0.0;
    if degenerate {
        values.iter_mut().for_each(|v| *v = 0.0);
    } else {
        values.iter_mut().for_each(|v| *v /= total);
    }
    ImportanceVector {
        year: forest.year,
        topics: forest.topics.clone(),
        values,
        label_kind: forest.label_kind,
        degenerate,
    }
}

impl RandomForest {
    /// Majority vote; ties go to the lexicographically smallest label.
    pub fn predict(&self, sample: &[f64]) -> Result<&str, ForestError> {
        if sample.len() != self.topics.len() {
            return Err(ForestError::DimensionMismatch { expected: self.topics.len(), found: sample.len() });
        }
        let mut votes = vec![0usize; self.classes.len()];
        for tree in &self.trees {
            votes[tree.predict_index(sample)] += 1;
        }
        Ok(&self.classes[argmax_lowest(&votes)])
    }
}
