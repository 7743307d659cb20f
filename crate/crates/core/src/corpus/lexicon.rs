use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

const DEFAULT_LEXICON: &str = include_str!("../../assets/default_lexicon.json");
const DEFAULT_ACRONYMS: &str = include_str!("../../assets/default_acronyms.json");

/// Longest phrase the matcher accepts, in tokens.
pub const MAX_PHRASE_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    E,
    S,
    G,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::E => "E",
            Dimension::S => "S",
            Dimension::G => "G",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicEntry {
    pub topic_id: String,
    pub label: String,
    pub dimension: Dimension,
    pub phrases: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicLexicon {
    pub topics: Vec<TopicEntry>,
}

fn valid_token(token: &str, min_token_len: usize) -> bool {
    token.chars().count() >= min_token_len
        && token.chars().all(char::is_alphabetic)
        && token.to_lowercase() == token
}

impl TopicLexicon {
    pub fn new(topics: Vec<TopicEntry>, min_token_len: usize) -> Result<Self, CorpusError> {
        let lexicon = TopicLexicon { topics };
        lexicon.validate(min_token_len)?;
        Ok(lexicon)
    }

    /// The 21 report topics, seven per E/S/G dimension.
    pub fn default_topics() -> Self {
        Self::from_json(DEFAULT_LEXICON, super::DEFAULT_MIN_TOKEN_LEN).expect("bundled lexicon is valid")
    }

    pub fn from_json(json: &str, min_token_len: usize) -> Result<Self, CorpusError> {
        let topics: Vec<TopicEntry> =
            serde_json::from_str(json).map_err(|e| CorpusError::InvalidLexicon(e.to_string()))?;
        Self::new(topics, min_token_len)
    }

    pub fn load(path: &Path, min_token_len: usize) -> Result<Self, CorpusError> {
        let json = std::fs::read_to_string(path).map_err(|source| match source.kind() {
            std::io::ErrorKind::NotFound => CorpusError::MissingFile(path.to_path_buf()),
            _ => CorpusError::Io { path: path.to_path_buf(), source },
        })?;
        Self::from_json(&json, min_token_len)
    }

    pub fn validate(&self, min_token_len: usize) -> Result<(), CorpusError> {
        let mut seen = BTreeSet::new();
        for topic in &self.topics {
            if topic.topic_id.is_empty() {
                return Err(CorpusError::InvalidLexicon("empty topic_id".into()));
            }
            if !seen.insert(topic.topic_id.as_str()) {
                return Err(CorpusError::InvalidLexicon(format!("duplicate topic_id `{}`", topic.topic_id)));
            }
            if topic.phrases.is_empty() {
                return Err(CorpusError::InvalidLexicon(format!("topic `{}` has no phrases", topic.topic_id)));
            }
            for phrase in &topic.phrases {
                if phrase.is_empty() || phrase.len() > MAX_PHRASE_LEN {
                    return Err(CorpusError::InvalidLexicon(format!(
                        "topic `{}`: phrases must have 1 to {MAX_PHRASE_LEN} tokens",
                        topic.topic_id
                    )));
                }
                if let Some(bad) = phrase.iter().find(|t| !valid_token(t, min_token_len)) {
                    return Err(CorpusError::InvalidLexicon(format!(
                        "topic `{}`: token `{bad}` is not a lowercase alphabetic word of length >= {min_token_len}",
                        topic.topic_id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    pub fn topic_ids(&self) -> impl Iterator<Item = &str> {
        self.topics.iter().map(|t| t.topic_id.as_str())
    }

    pub fn dimension_of(&self, topic_id: &str) -> Option<Dimension> {
        self.topics.iter().find(|t| t.topic_id == topic_id).map(|t| t.dimension)
    }
}

/// Ordered acronym table. Keys are case-sensitive and unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AcronymMap {
    entries: Vec<(String, String)>,
}

impl AcronymMap {
    pub fn new(entries: Vec<(String, String)>) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for (acronym, expansion) in &entries {
            if acronym.is_empty() {
                return Err(CorpusError::InvalidAcronyms("empty acronym".into()));
            }
            if expansion.trim().is_empty() {
                return Err(CorpusError::InvalidAcronyms(format!("empty expansion for `{acronym}`")));
            }
            if !seen.insert(acronym.as_str()) {
                return Err(CorpusError::InvalidAcronyms(format!("duplicate acronym `{acronym}`")));
            }
        }
        Ok(AcronymMap { entries })
    }

    pub fn default_map() -> Self {
        Self::from_json(DEFAULT_ACRONYMS).expect("bundled acronym map is valid")
    }

    pub fn from_json(json: &str) -> Result<Self, CorpusError> {
        let raw: OrderedPairs = serde_json::from_str(json).map_err(|e| CorpusError::InvalidAcronyms(e.to_string()))?;
        Self::new(raw.0)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let json = std::fs::read_to_string(path).map_err(|source| match source.kind() {
            std::io::ErrorKind::NotFound => CorpusError::MissingFile(path.to_path_buf()),
            _ => CorpusError::Io { path: path.to_path_buf(), source },
        })?;
        Self::from_json(&json)
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Serialize for AcronymMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// A JSON object read in document order, duplicates kept for validation.
struct OrderedPairs(Vec<(String, String)>);

impl<'de> Deserialize<'de> for OrderedPairs {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairsVisitor;

        impl<'de> Visitor<'de> for PairsVisitor {
            type Value = OrderedPairs;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a JSON object of acronym -> expansion strings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut pairs = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, String>()? {
                    pairs.push((k, v));
                }
                Ok(OrderedPairs(pairs))
            }
        }

        deserializer.deserialize_map(PairsVisitor)
    }
}

impl<'de> Deserialize<'de> for AcronymMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = OrderedPairs::deserialize(deserializer)?;
        AcronymMap::new(pairs.0).map_err(serde::de::Error::custom)
    }
}
