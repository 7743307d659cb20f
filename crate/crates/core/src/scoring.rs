//! Per-year TF-IDF topic weights.
//!
//! Document frequency is computed inside one year only; years are never
//! pooled. Each output row is a company (one report per company-year).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TopicCountMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("no documents for year {0}")]
    EmptyYear(i32),
    #[error("count matrix has no documents")]
    NoDocuments,
    #[error("count matrix mixes years {0} and {1}")]
    MixedYears(i32, i32),
    #[error("company `{0}` appears more than once in year {1}")]
    DuplicateCompany(String, i32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TfMode {
    /// count / document length
    #[default]
    Relative,
    Raw,
    /// 1 + ln(count), 0 for absent topics
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdfMode {
    /// ln((1 + N) / (1 + df)) + 1
    #[default]
    Smooth,
    /// ln(N / df)
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TfidfConfig {
    pub tf_mode: TfMode,
    pub idf_mode: IdfMode,
    pub l2_normalize_docs: bool,
}

/// Company x topic weights for one year. Keys are sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicScoreMatrix {
    pub year: i32,
    pub companies: Vec<String>,
    pub topics: Vec<String>,
    pub weights: Vec<Vec<f64>>,
}

impl TopicScoreMatrix {
    pub fn column(&self, topic: usize) -> Vec<f64> {
        self.weights.iter().map(|row| row[topic]).collect()
    }

    pub fn topic_index(&self, topic_id: &str) -> Option<usize> {
        self.topics.iter().position(|t| t == topic_id)
    }

    pub fn company_index(&self, company_id: &str) -> Option<usize> {
        self.companies.iter().position(|c| c == company_id)
    }

    pub fn n_companies(&self) -> usize {
        self.companies.len()
    }

    /// Maps every topic column to its empirical CDF: the share of companies
    /// whose weight is less than or equal to each entry. Values lie in (0, 1].
    pub fn quantile_transform(&self) -> TopicScoreMatrix {
        let n = self.companies.len();
        let mut weights = vec![vec![0.0; self.topics.len()]; n];
        for t in 0..self.topics.len() {
            let mut sorted = self.column(t);
            sorted.sort_by(f64::total_cmp);
            for (c, row) in weights.iter_mut().enumerate() {
                let v = self.weights[c][t];
                let at_or_below = sorted.partition_point(|&s| s <= v);
                row[t] = at_or_below as f64 / n as f64;
            }
        }
        TopicScoreMatrix { year: self.year, companies: self.companies.clone(), topics: self.topics.clone(), weights }
    }
}

pub fn term_frequency(mode: TfMode, count: u64, doc_len: u64) -> f64 {
    match mode {
        TfMode::Relative if doc_len == 0 => 0.0,
        TfMode::Relative => count as f64 / doc_len as f64,
        TfMode::Raw => count as f64,
        TfMode::Log if count == 0 => 0.0,
        TfMode::Log => 1.0 + (count as f64).ln(),
    }
}

/// Inverse document frequency. Plain idf of an absent topic is defined as 0
/// so that absent topics always weigh 0.
pub fn inverse_document_frequency(mode: IdfMode, df: usize, n_docs: usize) -> f64 {
    match mode {
        IdfMode::Smooth => ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0,
        IdfMode::Plain if df == 0 => 0.0,
        IdfMode::Plain => (n_docs as f64 / df as f64).ln(),
    }
}

/// TF-IDF weights for the documents of a single year.
pub fn compute_tfidf(counts: &TopicCountMatrix, config: &TfidfConfig) -> Result<TopicScoreMatrix, ScoringError> {
    let first = counts.rows.first().ok_or(ScoringError::NoDocuments)?;
    let year = first.year;
    if let Some(other) = counts.rows.iter().find(|r| r.year != year) {
        return Err(ScoringError::MixedYears(year, other.year));
    }

    let mut rows: Vec<_> = counts.rows.iter().collect();
    rows.sort_by(|a, b| a.company_id.cmp(&b.company_id));
    if let Some(w) = rows.windows(2).find(|w| w[0].company_id == w[1].company_id) {
        return Err(ScoringError::DuplicateCompany(w[0].company_id.clone(), year));
    }

    let n_docs = rows.len();
    let n_topics = counts.topics.len();
    let idf: Vec<f64> = (0..n_topics)
        .map(|t| {
            let df = rows.iter().filter(|r| r.counts[t] > 0).count();
            inverse_document_frequency(config.idf_mode, df, n_docs)
        })
        .collect();

    let weights = rows
        .iter()
        .map(|row| {
            let mut w: Vec<f64> = (0..n_topics)
                .map(|t| term_frequency(config.tf_mode, row.counts[t], row.token_count) * idf[t])
                .collect();
            if config.l2_normalize_docs {
                let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    w.iter_mut().for_each(|v| *v /= norm);
                }
            }
            w
        })
        .collect();

    Ok(TopicScoreMatrix {
        year,
        companies: rows.iter().map(|r| r.company_id.clone()).collect(),
        topics: counts.topics.clone(),
        weights,
    })
}

/// Scores every year present in `counts`. When `requested` is given, only
/// those years are scored and a requested year without documents is an error.
pub fn score_all_years(
    counts: &TopicCountMatrix,
    config: &TfidfConfig,
    requested: Option<&[i32]>,
) -> Result<BTreeMap<i32, TopicScoreMatrix>, ScoringError> {
    let years = match requested {
        Some(years) => {
            let mut years = years.to_vec();
            years.sort_unstable();
            years.dedup();
            years
        }
        None => counts.years(),
    };
    if years.is_empty() {
        return Err(ScoringError::NoDocuments);
    }
    years
        .par_iter()
        .map(|&year| {
            let subset = counts.for_year(year);
            if subset.rows.is_empty() {
                return Err(ScoringError::EmptyYear(year));
            }
            compute_tfidf(&subset, config).map(|m| (year, m))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|pairs| pairs.into_iter().collect())
}
