//! Stage-by-stage pipeline over an output directory.
//!
//! Every stage reads what earlier stages wrote into the output directory and
//! writes only its own files, so running the stages one by one produces the
//! same bytes as [`run_pipeline`]. Files are written as `<name>.partial` and
//! renamed once the stage has succeeded.

mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{fmt_f64, StageOutput};
use io::{parse_f64, read_csv_expect, read_json, upstream};

use crate::config::{ConfigError, PipelineConfig};
use crate::corpus::{
    build_count_matrix, load_manifest, tokenize_document, write_corpus_jsonl, AcronymMap, CompanyMeta, CorpusError,
    CountRow, ServiceArea, TopicCountMatrix, TopicLexicon,
};
use crate::distinctiveness::{gini_importance, train_forest, CompanyLabels, ImportanceVector, LabelKind};
use crate::representativeness::{matrix_silhouette, topic_representativeness, RepresentativenessVector};
use crate::scoring::{score_all_years, TopicScoreMatrix};
use crate::stats::ols_fit;
use crate::strategy::{
    assign_zones, company_coordinates, esg_triples, rank_across_classes, rank_within_class, render_scatter_svg,
    standardize_global, topic_trends, zones_summary, StandardizeMode, StrategicPoint, Zone,
};

pub const TOOL_NAME: &str = "esg-trendlab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const REGRESSION_DEPENDENT: &str = "Within-Industry";
pub const REGRESSION_REGRESSOR: &str = "Cross-Sector";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Score,
    Represent,
    Distinguish,
    Model,
    Regress,
    Rank,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Ingest, Stage::Score, Stage::Represent, Stage::Distinguish, Stage::Model, Stage::Regress, Stage::Rank];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Score => "score",
            Stage::Represent => "represent",
            Stage::Distinguish => "distinguish",
            Stage::Model => "model",
            Stage::Regress => "regress",
            Stage::Rank => "rank",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL.into_iter().find(|st| st.as_str() == s).ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage}: input file not found: {}", path.display())]
    MissingInput { stage: Stage, path: PathBuf },
    #[error("{stage}: missing upstream output {} (run `{upstream}` first)", path.display())]
    MissingUpstream { stage: Stage, upstream: Stage, path: PathBuf },
    #[error("{stage}: {message}")]
    Data { stage: Stage, message: String },
    #[error("{stage}: {}: {message}", path.display())]
    Malformed { stage: Stage, path: PathBuf, message: String },
    #[error("{stage}: cannot write {}: {source}", path.display())]
    Io { stage: Stage, path: PathBuf, source: std::io::Error },
}

impl PipelineError {
    /// 2 for usage and configuration problems, 3 for bad data, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::MissingInput { .. } | PipelineError::MissingUpstream { .. } => 2,
            PipelineError::Data { .. } | PipelineError::Malformed { .. } => 3,
            PipelineError::Io { .. } => 1,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Config(_) => None,
            PipelineError::MissingInput { stage, .. }
            | PipelineError::MissingUpstream { stage, .. }
            | PipelineError::Data { stage, .. }
            | PipelineError::Malformed { stage, .. }
            | PipelineError::Io { stage, .. } => Some(*stage),
        }
    }

    fn data(stage: Stage, err: impl fmt::Display) -> Self {
        PipelineError::Data { stage, message: err.to_string() }
    }

    fn malformed(stage: Stage, path: &Path, message: impl Into<String>) -> Self {
        PipelineError::Malformed { stage, path: path.to_path_buf(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

pub const RUN_MANIFEST: &str = "run_manifest.json";

fn output_dir(config: &PipelineConfig) -> Result<PathBuf, PipelineError> {
    config.validate()?;
    Ok(config.output_dir().expect("validated config has an output dir"))
}

/// Runs one stage against the configured output directory and returns the
/// names of the files it wrote.
pub fn run_stage(stage: Stage, config: &PipelineConfig) -> Result<Vec<String>, PipelineError> {
    let dir = output_dir(config)?;
    let mut out = StageOutput::new(stage, &dir)?;
    match stage {
        Stage::Ingest => ingest(config, &dir, &mut out)?,
        Stage::Score => score(config, &dir, &mut out)?,
        Stage::Represent => represent(config, &dir, &mut out)?,
        Stage::Distinguish => distinguish(config, &dir, &mut out)?,
        Stage::Model => model(config, &dir, &mut out)?,
        Stage::Regress => regress(&dir, &mut out)?,
        Stage::Rank => rank(config, &dir, &mut out)?,
    }
    out.commit()
}

/// Runs every stage in order, then writes `run_manifest.json`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    let dir = output_dir(config)?;
    let mut stages = Vec::with_capacity(Stage::ALL.len());
    for stage in Stage::ALL {
        let started = Instant::now();
        let outputs = run_stage(stage, config)?;
        stages.push(StageRecord { stage, outputs, wall_clock_seconds: started.elapsed().as_secs_f64() });
    }
    let manifest = RunManifest {
        tool: TOOL_NAME.into(),
        tool_version: TOOL_VERSION.into(),
        config_hash: config.hash(),
        seed: config.seed,
        stages,
    };
    let last = *Stage::ALL.last().expect("stages");
    let mut out = StageOutput::new(last, &dir)?;
    out.write_json(RUN_MANIFEST, &manifest)?;
    out.commit()?;
    Ok(manifest)
}

fn require_input(stage: Stage, path: PathBuf) -> Result<PathBuf, PipelineError> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(PipelineError::MissingInput { stage, path })
    }
}

fn corpus_error(stage: Stage, err: CorpusError) -> PipelineError {
    match err {
        CorpusError::Io { path, source } if source.kind() == std::io::ErrorKind::NotFound => {
            PipelineError::MissingInput { stage, path }
        }
        other => PipelineError::data(stage, other),
    }
}

// ---------------------------------------------------------------- ingest

const COMPANIES_CSV: &str = "companies.csv";
const COUNTS_CSV: &str = "counts.csv";
const CORPUS_JSONL: &str = "corpus.jsonl";
const LEXICON_JSON: &str = "lexicon.json";
const COMPANY_HEADER: [&str; 5] = ["company_id", "display_name", "service_area", "country", "industry"];
const COUNT_HEADER: [&str; 4] = ["doc_id", "company_id", "year", "token_count"];

fn ingest(config: &PipelineConfig, _dir: &Path, out: &mut StageOutput) -> Result<(), PipelineError> {
    let stage = Stage::Ingest;
    let lexicon = match config.lexicon_path() {
        Some(p) => TopicLexicon::load(&require_input(stage, p)?, config.min_token_len).map_err(|e| corpus_error(stage, e))?,
        None => TopicLexicon::default_topics(),
    };
    let acronyms = match config.acronyms_path() {
        Some(p) => AcronymMap::load(&require_input(stage, p)?).map_err(|e| corpus_error(stage, e))?,
        None => AcronymMap::default_map(),
    };
    let stopwords: BTreeSet<String> = match config.stopwords_path() {
        Some(p) => {
            let p = require_input(stage, p)?;
            fs::read_to_string(&p)
                .map_err(|source| PipelineError::Io { stage, path: p.clone(), source })?
                .lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect()
        }
        None => BTreeSet::new(),
    };
    let manifest = require_input(stage, config.manifest_path())?;
    let (companies, mut docs) = load_manifest(&manifest).map_err(|e| corpus_error(stage, e))?;
    if let Some(range) = config.years {
        docs.retain(|d| range.contains(d.year));
    }
    if docs.is_empty() {
        return Err(PipelineError::data(stage, "no documents in the selected years"));
    }
    let with_docs: BTreeSet<&str> = docs.iter().map(|d| d.company_id.as_str()).collect();
    let companies: Vec<&CompanyMeta> = companies.iter().filter(|c| with_docs.contains(c.company_id.as_str())).collect();

    let tokenized: Vec<_> = docs
        .par_iter()
        .map(|d| {
            let mut t = tokenize_document(d, &acronyms, config.min_token_len);
            if !stopwords.is_empty() {
                t.tokens.retain(|tok| !stopwords.contains(tok));
            }
            t
        })
        .collect();
    let counts = build_count_matrix(&tokenized, &lexicon);

    let mut corpus = Vec::new();
    write_corpus_jsonl(&tokenized, &mut corpus).expect("in-memory write");
    out.write_bytes(CORPUS_JSONL, &corpus)?;
    out.write_csv(
        COMPANIES_CSV,
        &COMPANY_HEADER,
        companies.iter().map(|c| {
            vec![
                c.company_id.clone(),
                c.display_name.clone(),
                c.service_area.to_string(),
                c.country.clone(),
                c.industry.clone(),
            ]
        }),
    )?;
    let header: Vec<&str> = COUNT_HEADER.iter().copied().chain(counts.topics.iter().map(String::as_str)).collect();
    out.write_csv(
        COUNTS_CSV,
        &header,
        counts.rows.iter().map(|r| {
            [r.doc_id.clone(), r.company_id.clone(), r.year.to_string(), r.token_count.to_string()]
                .into_iter()
                .chain(r.counts.iter().map(u64::to_string))
                .collect()
        }),
    )?;
    out.write_json(LEXICON_JSON, &lexicon)?;
    Ok(())
}

fn read_companies(stage: Stage, dir: &Path) -> Result<Vec<CompanyMeta>, PipelineError> {
    let path = upstream(stage, Stage::Ingest, dir, COMPANIES_CSV)?;
    let (_, rows) = read_csv_expect(stage, &path, &COMPANY_HEADER)?;
    rows.into_iter()
        .map(|r| {
            let service_area: ServiceArea =
                r[2].parse().map_err(|e: CorpusError| PipelineError::malformed(stage, &path, e.to_string()))?;
            Ok(CompanyMeta {
                company_id: r[0].clone(),
                display_name: r[1].clone(),
                service_area,
                country: r[3].clone(),
                industry: r[4].clone(),
            })
        })
        .collect()
}

fn read_counts(stage: Stage, dir: &Path) -> Result<TopicCountMatrix, PipelineError> {
    let path = upstream(stage, Stage::Ingest, dir, COUNTS_CSV)?;
    let (header, rows) = read_csv_expect(stage, &path, &COUNT_HEADER)?;
    let topics: Vec<String> = header[COUNT_HEADER.len()..].to_vec();
    let int = |s: &str| s.parse::<u64>().map_err(|_| PipelineError::malformed(stage, &path, format!("bad count `{s}`")));
    let rows = rows
        .into_iter()
        .map(|r| {
            Ok(CountRow {
                doc_id: r[0].clone(),
                company_id: r[1].clone(),
                year: r[2].parse().map_err(|_| PipelineError::malformed(stage, &path, format!("bad year `{}`", r[2])))?,
                token_count: int(&r[3])?,
                counts: r[COUNT_HEADER.len()..].iter().map(|s| int(s)).collect::<Result<_, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok(TopicCountMatrix { topics, rows })
}

/// Class labels of the configured kind.
fn read_labels(config: &PipelineConfig, stage: Stage, dir: &Path) -> Result<CompanyLabels, PipelineError> {
    let companies = read_companies(stage, dir)?;
    if config.label_kind != LabelKind::Custom {
        return Ok(CompanyLabels::from_meta(&companies, config.label_kind).expect("metadata label kinds"));
    }
    let path = require_input(stage, config.custom_labels_path().expect("validated config"))?;
    let (_, rows) = read_csv_expect(stage, &path, &["company_id", "label"])?;
    let by_company: BTreeMap<String, String> = rows.into_iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    if let Some(c) = companies.iter().find(|c| !by_company.contains_key(&c.company_id)) {
        return Err(PipelineError::data(stage, format!("no custom label for company `{}`", c.company_id)));
    }
    Ok(CompanyLabels { kind: LabelKind::Custom, by_company })
}

// ---------------------------------------------------------------- score

const SCORES_JSON: &str = "scores.json";
const SCORES_HEATMAP: &str = "scores_heatmap.json";

fn scores_csv(year: i32) -> String {
    format!("scores_{year}.csv")
}

#[derive(Serialize)]
struct ScoreHeatmap<'a> {
    scale: &'static str,
    years: BTreeMap<i32, &'a TopicScoreMatrix>,
}

fn score(config: &PipelineConfig, dir: &Path, out: &mut StageOutput) -> Result<(), PipelineError> {
    let stage = Stage::Score;
    let counts = read_counts(stage, dir)?;
    let requested = config.years.map(|r| r.years());
    let matrices = score_all_years(&counts, &config.tfidf, requested.as_deref()).map_err(|e| PipelineError::data(stage, e))?;
    for (year, m) in &matrices {
        let header: Vec<&str> = std::iter::once("company_id").chain(m.topics.iter().map(String::as_str)).collect();
        out.write_csv(
            &scores_csv(*year),
            &header,
            m.companies
                .iter()
                .zip(&m.weights)
                .map(|(c, row)| std::iter::once(c.clone()).chain(row.iter().map(|w| fmt_f64(*w))).collect()),
        )?;
    }
    out.write_json(SCORES_JSON, &matrices)?;
    let quantiles: BTreeMap<i32, TopicScoreMatrix>;
    let heatmap = if config.quantile_heatmaps {
        quantiles = matrices.iter().map(|(y, m)| (*y, m.quantile_transform())).collect();
        ScoreHeatmap { scale: "quantile", years: quantiles.iter().map(|(y, m)| (*y, m)).collect() }
    } else {
        ScoreHeatmap { scale: "raw", years: matrices.iter().map(|(y, m)| (*y, m)).collect() }
    };
    out.write_json(SCORES_HEATMAP, &heatmap)?;
    Ok(())
}

fn read_scores(stage: Stage, dir: &Path) -> Result<BTreeMap<i32, TopicScoreMatrix>, PipelineError> {
    let path = upstream(stage, Stage::Score, dir, SCORES_JSON)?;
    read_json(stage, &path)
}

// ---------------------------------------------------------------- represent

const REP_HEATMAP: &str = "representativeness_heatmap.json";
const MATRIX_SILHOUETTE_CSV: &str = "matrix_silhouette.csv";
const REP_HEADER: [&str; 2] = ["topic_id", "mean_silhouette"];

fn rep_csv(year: i32) -> String {
    format!("representativeness_{year}.csv")
}

/// Years x topics grid for heatmap plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub measure: String,
    pub years: Vec<i32>,
    pub topics: Vec<String>,
    /// `values[i][j]` belongs to `years[i]` and `topics[j]`.
    pub values: Vec<Vec<f64>>,
}

fn heatmap<'a>(measure: &str, rows: impl Iterator<Item = (i32, &'a [String], &'a [f64])>) -> Heatmap {
    let mut years = Vec::new();
    let mut topics = Vec::new();
    let mut values = Vec::new();
    for (year, t, v) in rows {
        years.push(year);
        topics = t.to_vec();
        values.push(v.to_vec());
    }
    Heatmap { measure: measure.into(), years, topics, values }
}

fn represent(config: &PipelineConfig, dir: &Path, out: &mut StageOutput) -> Result<(), PipelineError> {
    let stage = Stage::Represent;
    let matrices = read_scores(stage, dir)?;
    let cluster = config.cluster_config();
    let vectors: Vec<RepresentativenessVector> = matrices
        .values()
        .map(|m| topic_representativeness(m, &cluster))
        .collect::<Result<_, _>>()
        .map_err(|e| PipelineError::data(stage, e))?;
    for v in &vectors {
        out.write_csv(
            &rep_csv(v.year),
            &REP_HEADER,
            v.topics.iter().zip(&v.values).map(|(t, s)| vec![t.clone(), fmt_f64(*s)]),
        )?;
    }
    out.write_json(
        REP_HEATMAP,
        &heatmap("mean_silhouette", vectors.iter().map(|v| (v.year, v.topics.as_slice(), v.values.as_slice()))),
    )?;
    if config.matrix_mode {
        let rows = matrices
            .values()
            .map(|m| matrix_silhouette(m, &cluster).map(|s| vec![m.year.to_string(), fmt_f64(s)]))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| PipelineError::data(stage, e))?;
        out.write_csv(MATRIX_SILHOUETTE_CSV, &["year", "mean_silhouette"], rows)?;
    }
    Ok(())
}

fn read_topic_values(
    stage: Stage,
    producer: Stage,
    dir: &Path,
    name: &str,
    header: &[&str],
) -> Result<(Vec<String>, Vec<f64>), PipelineError> {
    let path = upstream(stage, producer, dir, name)?;
    let (_, rows) = read_csv_expect(stage, &path, header)?;
    let mut topics = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for r in rows {
        topics.push(r[0].clone());
        values.push(parse_f64(stage, &path, &r[1])?);
    }
    Ok((topics, values))
}

// ---------------------------------------------------------------- distinguish

const IMP_HEADER: [&str; 2] = ["topic_id", "importance"];

fn imp_csv(year: i32, kind: LabelKind) -> String {
    format!("importance_{year}_{kind}.csv")
}

fn imp_heatmap(kind: LabelKind) -> String {
    format!("importance_heatmap_{kind}.json")
}

fn forest_summary(kind: LabelKind) -> String {
    format!("forest_summary_{kind}.csv")
}

fn distinguish(config: &PipelineConfig, dir: &Path, out: &mut StageOutput) -> Result<(), PipelineError> {
    let stage = Stage::Distinguish;
    let matrices = read_scores(stage, dir)?;
    let labels = read_labels(config, stage, dir)?;
    let forest_config = config.forest_config();
    let fitted = matrices
        .values()
        .map(|m| train_forest(m, &labels, &forest_config).map(|f| (gini_importance(&f), f.oob_accuracy, f.classes.len())))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PipelineError::data(stage, e))?;
    for (imp, _, _) in &fitted {
        out.write_csv(
            &imp_csv(imp.year, config.label_kind),
            &IMP_HEADER,
            imp.topics.iter().zip(&imp.values).map(|(t, v)| vec![t.clone(), fmt_f64(*v)]),
        )?;
    }
    out.write_json(
        &imp_heatmap(config.label_kind),
        &heatmap("gini_importance", fitted.iter().map(|(v, _, _)| (v.year, v.topics.as_slice(), v.values.as_slice()))),
    )?;
    out.write_csv(
        &forest_summary(config.label_kind),
        &["year", "n_classes", "n_trees", "oob_accuracy", "degenerate"],
        fitted.iter().map(|(imp, oob, classes)| {
            vec![
                imp.year.to_string(),
                classes.to_string(),
                forest_config.n_trees.to_string(),
                oob.map(fmt_f64).unwrap_or_default(),
                imp.degenerate.to_string(),
            ]
        }),
    )?;
    Ok(())
}

// ---------------------------------------------------------------- model

const STRATEGIC_HEADER: [&str; 6] = ["company_id", "x_raw", "y_raw", "x", "y", "zone"];

fn strategic_csv(year: i32) -> String {
    format!("strategic_{year}.csv")
}

fn model(config: &PipelineConfig, dir: &Path, out: &mut StageOutput) -> Result<(), PipelineError> {
    let stage = Stage::Model;
    let matrices = read_scores(stage, dir)?;
    let lexicon: TopicLexicon = read_json(stage, &upstream(stage, Stage::Ingest, dir, LEXICON_JSON)?)?;
    let mut by_year: BTreeMap<i32, Vec<StrategicPoint>> = BTreeMap::new();
    for (&year, m) in &matrices {
        let (topics, values) = read_topic_values(stage, Stage::Represent, dir, &rep_csv(year), &REP_HEADER)?;
        let rep = RepresentativenessVector { year, topics, values };
        let (topics, values) =
            read_topic_values(stage, Stage::Distinguish, dir, &imp_csv(year, config.label_kind), &IMP_HEADER)?;
        let degenerate = values.iter().all(|v| *v == 0.0);
        let imp = ImportanceVector { year, topics, values, label_kind: config.label_kind, degenerate };
        let points = company_coordinates(m, &rep, &imp).map_err(|e| PipelineError::data(stage, e))?;
        by_year.insert(year, points);
    }
    if config.standardize == StandardizeMode::Global {
        let mut all: Vec<StrategicPoint> = by_year.values().flatten().cloned().collect();
        standardize_global(&mut all);
        by_year = BTreeMap::new();
        for p in all {
            by_year.entry(p.year).or_default().push(p);
        }
    }
    let mut pooled = Vec::new();
    for (&year, points) in by_year.iter_mut() {
        let thresholds = assign_zones(points, config.threshold_mode);
        out.write_csv(
            &strategic_csv(year),
            &STRATEGIC_HEADER,
            points.iter().map(|p| {
                vec![
                    p.company_id.clone(),
                    fmt_f64(p.x_raw),
                    fmt_f64(p.y_raw),
                    fmt_f64(p.x),
                    fmt_f64(p.y),
                    p.zone.map(Zone::as_str).unwrap_or_default().to_string(),
                ]
            }),
        )?;
        if config.svg {
            out.write_bytes(&format!("strategic_{year}.svg"), render_scatter_svg(year, points, thresholds).as_bytes())?;
        }
        pooled.extend(points.iter().cloned());
    }
    out.write_csv(
        "zones_summary.csv",
        &["year", "zone", "count"],
        zones_summary(&pooled).into_iter().map(|z| vec![z.year.to_string(), z.zone.as_str().into(), z.count.to_string()]),
    )?;
    out.write_csv(
        "trends.csv",
        &["topic_id", "year", "mean_weight", "change_rate"],
        topic_trends(&matrices).into_iter().flat_map(|s| {
            let topic = s.topic_id;
            s.points.into_iter().map(move |p| {
                vec![topic.clone(), p.year.to_string(), fmt_f64(p.mean_weight), p.change_rate.map(fmt_f64).unwrap_or_default()]
            })
        }),
    )?;
    for (&year, m) in &matrices {
        let triples = esg_triples(m, &lexicon).map_err(|e| PipelineError::data(stage, e))?;
        out.write_csv(
            &format!("esg3d_{year}.csv"),
            &["company_id", "e", "s", "g"],
            triples.into_iter().map(|t| vec![t.company_id, fmt_f64(t.e), fmt_f64(t.s), fmt_f64(t.g)]),
        )?;
    }
    Ok(())
}

/// Strategic points of every scored year, read back from the model stage.
fn read_strategic(stage: Stage, dir: &Path) -> Result<BTreeMap<i32, Vec<StrategicPoint>>, PipelineError> {
    let years: Vec<i32> = read_scores(stage, dir)?.into_keys().collect();
    let mut by_year = BTreeMap::new();
    for year in years {
        let path = upstream(stage, Stage::Model, dir, &strategic_csv(year))?;
        let (_, rows) = read_csv_expect(stage, &path, &STRATEGIC_HEADER)?;
        let points = rows
            .into_iter()
            .map(|r| {
                let zone = if r[5].is_empty() {
                    None
                } else {
                    Some(r[5].parse::<Zone>().map_err(|e| PipelineError::malformed(stage, &path, e))?)
                };
                Ok(StrategicPoint {
                    company_id: r[0].clone(),
                    year,
                    x_raw: parse_f64(stage, &path, &r[1])?,
                    y_raw: parse_f64(stage, &path, &r[2])?,
                    x: parse_f64(stage, &path, &r[3])?,
                    y: parse_f64(stage, &path, &r[4])?,
                    zone,
                })
            })
            .collect::<Result<Vec<_>, PipelineError>>()?;
        by_year.insert(year, points);
    }
    Ok(by_year)
}

// ---------------------------------------------------------------- regress

fn regress(dir: &Path, out: &mut StageOutput) -> Result<(), PipelineError> {
    let stage = Stage::Regress;
    let points: Vec<StrategicPoint> = read_strategic(stage, dir)?.into_values().flatten().collect();
    let x: Vec<f64> = points.iter().map(|p| p.y).collect();
    let y: Vec<f64> = points.iter().map(|p| p.x).collect();
    let report = ols_fit(&x, &y)
        .map_err(|e| PipelineError::data(stage, e))?
        .with_names(REGRESSION_DEPENDENT, &[REGRESSION_REGRESSOR]);
    out.write_json("regression_report.json", &report)?;
    out.write_bytes("regression_report.txt", report.render_text().as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------- rank

fn rank(config: &PipelineConfig, dir: &Path, out: &mut StageOutput) -> Result<(), PipelineError> {
    let stage = Stage::Rank;
    let by_year = read_strategic(stage, dir)?;
    let labels = read_labels(config, stage, dir)?;
    let mut within = Vec::new();
    let mut across = Vec::new();
    for (year, points) in &by_year {
        for r in rank_within_class(points, config.top_n) {
            within.push(vec![year.to_string(), r.rank.to_string(), r.company_id, fmt_f64(r.score)]);
        }
        let winners = rank_across_classes(points, &labels.by_company).map_err(|e| PipelineError::data(stage, e))?;
        for (class, r) in winners {
            across.push(vec![year.to_string(), class, r.company_id, fmt_f64(r.score)]);
        }
    }
    out.write_csv("rankings_within.csv", &["year", "rank", "company_id", "x"], within)?;
    out.write_csv(&format!("rankings_across_{}.csv", config.label_kind), &["year", "class", "company_id", "y"], across)?;
    Ok(())
}
