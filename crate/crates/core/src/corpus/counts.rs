use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{TokenizedDoc, TopicEntry, TopicLexicon};

fn phrase_at(tokens: &[String], pos: usize, phrase: &[String]) -> bool {
    tokens.len() - pos >= phrase.len() && tokens[pos..pos + phrase.len()].iter().zip(phrase).all(|(a, b)| a == b)
}

fn count_topic(tokens: &[String], topic: &TopicEntry) -> u64 {
    // Longer phrases are tried first so "carbon footprint" is not also read
    // as "carbon" when a topic lists both.
    let mut phrases: Vec<&[String]> = topic.phrases.iter().map(Vec::as_slice).collect();
    phrases.sort_by_key(|p| std::cmp::Reverse(p.len()));
    let mut count = 0;
    let mut pos = 0;
    while pos < tokens.len() {
        match phrases.iter().find(|p| phrase_at(tokens, pos, p)) {
            Some(p) => {
                count += 1;
                pos += p.len();
            }
            None => pos += 1,
        }
    }
    count
}

/// Per-topic phrase occurrence counts for one document, in lexicon order.
///
/// Within a topic, matches are non-overlapping and scanned left to right;
/// different topics may match the same token positions.
pub fn count_topics(doc: &TokenizedDoc, lexicon: &TopicLexicon) -> Vec<u64> {
    lexicon.topics.iter().map(|topic| count_topic(&doc.tokens, topic)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub doc_id: String,
    pub company_id: String,
    pub year: i32,
    pub token_count: u64,
    pub counts: Vec<u64>,
}

/// Dense document x topic occurrence counts. Topic columns are sorted by
/// id, rows by `(company_id, year)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicCountMatrix {
    pub topics: Vec<String>,
    pub rows: Vec<CountRow>,
}

impl TopicCountMatrix {
    pub fn years(&self) -> Vec<i32> {
        let mut years: Vec<i32> = self.rows.iter().map(|r| r.year).collect();
        years.sort_unstable();
        years.dedup();
        years
    }

    pub fn for_year(&self, year: i32) -> TopicCountMatrix {
        TopicCountMatrix {
            topics: self.topics.clone(),
            rows: self.rows.iter().filter(|r| r.year == year).cloned().collect(),
        }
    }
}

pub fn build_count_matrix(docs: &[TokenizedDoc], lexicon: &TopicLexicon) -> TopicCountMatrix {
    let mut order: Vec<usize> = (0..lexicon.topics.len()).collect();
    order.sort_by(|&a, &b| lexicon.topics[a].topic_id.cmp(&lexicon.topics[b].topic_id));
    let topics = order.iter().map(|&i| lexicon.topics[i].topic_id.clone()).collect();

    let mut rows: Vec<CountRow> = docs
        .par_iter()
        .map(|doc| {
            let counts = count_topics(doc, lexicon);
            CountRow {
                doc_id: doc.doc_id.clone(),
                company_id: doc.company_id.clone(),
                year: doc.year,
                token_count: doc.tokens.len() as u64,
                counts: order.iter().map(|&i| counts[i]).collect(),
            }
        })
        .collect();
    rows.sort_by(|a, b| (&a.company_id, a.year, &a.doc_id).cmp(&(&b.company_id, b.year, &b.doc_id)));
    TopicCountMatrix { topics, rows }
}
