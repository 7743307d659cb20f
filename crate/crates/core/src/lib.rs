//! Corpus analytics for ESG report texts.
//!
//! The pipeline turns plain-text company reports into per-year topic
//! weight matrices ([`scoring`]), measures how strongly each topic
//! structures firms inside the industry ([`representativeness`]) and how
//! strongly it separates sectors ([`distinctiveness`]), then places every
//! company-year in a 2x2 strategic model ([`strategy`]) and fits the
//! relationship between the two axes ([`stats`]).

pub mod config;
pub mod corpus;
pub mod distinctiveness;
pub mod fixture;
pub mod pipeline;
pub mod representativeness;
pub mod rng;
pub mod scoring;
pub mod stats;
pub mod strategy;

pub use config::PipelineConfig;
pub use pipeline::{run_pipeline, PipelineError, RunManifest, Stage};
