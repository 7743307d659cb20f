//! Report ingestion: manifest loading, text normalization and topic
//! phrase counting.

mod counts;
mod lexicon;
mod manifest;
mod normalize;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use counts::{build_count_matrix, count_topics, CountRow, TopicCountMatrix};
pub use lexicon::{AcronymMap, Dimension, TopicEntry, TopicLexicon};
pub use manifest::{load_manifest, MANIFEST_HEADER};
pub use normalize::{normalize_text, tokenize_document, DEFAULT_MIN_TOKEN_LEN};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("duplicate document for company `{0}` in year {1}")]
    DuplicateCompanyYear(String, i32),
    #[error("invalid service_area value `{0}` (expected hardware, software or service)")]
    BadEnum(String),
    #[error("malformed manifest row at line {0}: {1}")]
    MalformedRow(u64, String),
    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),
    #[error("invalid acronym map: {0}")]
    InvalidAcronyms(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ServiceArea {
    Hardware,
    Software,
    Service,
}

impl ServiceArea {
    pub const ALL: [ServiceArea; 3] = [ServiceArea::Hardware, ServiceArea::Software, ServiceArea::Service];

    pub fn as_str(self) -> &'static str {
        match self {
            ServiceArea::Hardware => "hardware",
            ServiceArea::Software => "software",
            ServiceArea::Service => "service",
        }
    }
}

impl fmt::Display for ServiceArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ServiceArea {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hardware" => Ok(ServiceArea::Hardware),
            "software" => Ok(ServiceArea::Software),
            "service" => Ok(ServiceArea::Service),
            other => Err(CorpusError::BadEnum(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanyMeta {
    pub company_id: String,
    pub display_name: String,
    pub service_area: ServiceArea,
    /// ISO-3166 alpha-2.
    pub country: String,
    pub industry: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub company_id: String,
    pub year: i32,
    pub raw_text: String,
}

/// A normalized document. Tokens are lowercase alphabetic words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub doc_id: String,
    pub company_id: String,
    pub year: i32,
    pub tokens: Vec<String>,
}

/// Writes the tokenized corpus as JSON lines, one document per line.
pub fn write_corpus_jsonl<W: std::io::Write>(docs: &[TokenizedDoc], mut out: W) -> std::io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_corpus_jsonl<R: std::io::BufRead>(input: R) -> std::io::Result<Vec<TokenizedDoc>> {
    let mut docs = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: TokenizedDoc = serde_json::from_str(&line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        docs.push(doc);
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn service_area_parse() {
        assert_eq!("software".parse::<ServiceArea>().unwrap(), ServiceArea::Software);
        assert!(matches!("Software".parse::<ServiceArea>(), Err(CorpusError::BadEnum(_))));
        assert!(matches!("retail".parse::<ServiceArea>(), Err(CorpusError::BadEnum(_))));
    }

    #[test]
    fn jsonl_field_order_is_stable() {
        let doc = TokenizedDoc {
            doc_id: "acme-2020".into(),
            company_id: "acme".into(),
            year: 2020,
            tokens: vec!["carbon".into(), "emissions".into()],
        };
        let mut buf = Vec::new();
        write_corpus_jsonl(std::slice::from_ref(&doc), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"doc_id\":\"acme-2020\",\"company_id\":\"acme\",\"year\":2020,\"tokens\":[\"carbon\",\"emissions\"]}\n"
        );
        assert_eq!(read_corpus_jsonl(&buf[..]).unwrap(), vec![doc]);
    }
}
