use std::sync::OnceLock;

use regex::Regex;

use super::{AcronymMap, DocumentRecord, TokenizedDoc};

pub const DEFAULT_MIN_TOKEN_LEN: usize = 3;

fn url_pattern() -> &'static Regex {
    static URL: OnceLock<Regex> = OnceLock::new();
    URL.get_or_init(|| Regex::new(r"(?i)[a-z][a-z0-9+.\-]*://\S*|www\.\S*").expect("valid URL pattern"))
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Replaces whole-word, case-sensitive acronym occurrences in one left to
/// right pass. At any position the first listed acronym that matches wins.
fn expand_acronyms(text: &str, acronyms: &AcronymMap) -> String {
    if acronyms.is_empty() {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut prev: Option<char> = None;
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let at_boundary = prev.is_none_or(|c| !is_word_char(c));
        let hit = if at_boundary {
            acronyms.entries().iter().find(|(acr, _)| {
                rest.starts_with(acr.as_str()) && rest[acr.len()..].chars().next().is_none_or(|c| !is_word_char(c))
            })
        } else {
            None
        };
        match hit {
            Some((acr, expansion)) => {
                out.push_str(expansion);
                prev = acr.chars().last();
                i += acr.len();
            }
            None => {
                let c = rest.chars().next().expect("non-empty remainder");
                out.push(c);
                prev = Some(c);
                i += c.len_utf8();
            }
        }
    }
    out
}

/// Normalizes raw report text into lowercase alphabetic tokens.
///
/// Steps run in this order: acronym expansion, URL removal, lowercasing,
/// replacement of every non-alphabetic character by a space, whitespace
/// splitting, and removal of tokens shorter than `min_token_len` characters.
pub fn normalize_text(raw_text: &str, acronyms: &AcronymMap, min_token_len: usize) -> Vec<String> {
    let expanded = expand_acronyms(raw_text, acronyms);
    let without_urls = url_pattern().replace_all(&expanded, " ");
    let lowered = without_urls.to_lowercase();
    let letters_only: String = lowered.chars().map(|c| if c.is_alphabetic() { c } else { ' ' }).collect();
    letters_only
        .split_whitespace()
        .filter(|t| t.chars().count() >= min_token_len)
        .map(str::to_string)
        .collect()
}

pub fn tokenize_document(doc: &DocumentRecord, acronyms: &AcronymMap, min_token_len: usize) -> TokenizedDoc {
    TokenizedDoc {
        doc_id: doc.doc_id.clone(),
        company_id: doc.company_id.clone(),
        year: doc.year,
        tokens: normalize_text(&doc.raw_text, acronyms, min_token_len),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> AcronymMap {
        AcronymMap::new(pairs.iter().map(|(a, e)| (a.to_string(), e.to_string())).collect()).unwrap()
    }

    #[test]
    fn six_step_trace() {
        let acronyms = map(&[("ESG", "environmental social governance"), ("AI", "artificial intelligence")]);
        let tokens = normalize_text("ESG & AI ethics!! See https://x.co 2022", &acronyms, 3);
        assert_eq!(
            tokens,
            ["environmental", "social", "governance", "artificial", "intelligence", "ethics", "see"]
        );
    }

    #[test]
    fn empty_input() {
        assert!(normalize_text("", &AcronymMap::default(), 3).is_empty());
    }

    #[test]
    fn lowercase_collapse() {
        assert_eq!(normalize_text("Carbon CARBON carbon", &AcronymMap::default(), 3), ["carbon"; 3]);
    }

    #[test]
    fn acronyms_are_case_sensitive_whole_words() {
        let acronyms = map(&[("ESG", "environmental social governance")]);
        assert_eq!(normalize_text("esg", &acronyms, 3), ["esg"]);
        assert_eq!(normalize_text("ESGX XESG", &acronyms, 3), ["esgx", "xesg"]);
        assert_eq!(normalize_text("(ESG)", &acronyms, 3), ["environmental", "social", "governance"]);
    }

    #[test]
    fn first_listed_acronym_wins() {
        let acronyms = map(&[("AI ML", "applied learning"), ("AI", "artificial intelligence")]);
        assert_eq!(normalize_text("AI ML", &acronyms, 3), ["applied", "learning"]);
        let acronyms = map(&[("AI", "artificial intelligence"), ("AI ML", "applied learning")]);
        // "AI" matches first; " ML" is left and dropped as a short token.
        assert_eq!(normalize_text("AI ML", &acronyms, 3), ["artificial", "intelligence"]);
    }

    #[test]
    fn urls_removed_before_punctuation() {
        let tokens = normalize_text("visit www.green-tech.com/report or HTTPS://foo.org/a?b=c now", &AcronymMap::default(), 3);
        assert_eq!(tokens, ["visit", "now"]);
    }

    #[test]
    fn min_token_len_counts_chars() {
        assert_eq!(normalize_text("éco ab abc", &AcronymMap::default(), 3), ["éco", "abc"]);
        assert_eq!(normalize_text("a bb", &AcronymMap::default(), 1), ["a", "bb"]);
    }

    #[test]
    fn digits_split_words() {
        assert_eq!(normalize_text("co2emissions scope3", &AcronymMap::default(), 3), ["emissions", "scope"]);
    }
}
