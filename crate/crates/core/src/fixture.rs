//! Deterministic synthetic report corpus.
//!
//! Twelve technology companies (four per service area) publish one report
//! per year for 2017-2020. Topic mention counts are planted so that:
//!
//! * each sector leans on two sector-specific topics, its pioneer
//!   company much more heavily than the other members;
//! * the remaining levels are balanced across sectors, so those topics
//!   carry no sector signal;
//! * environmental topics fade for most firms while the pioneers hold
//!   theirs; social topics are covered by the pioneers from the start,
//!   taken up by two more firms per sector over the years and left aside by
//!   one laggard per sector;
//! * the artificial-intelligence topic grows every year.
//!
//! `ground_truth.json` records these plantings for the checks that use them.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AcronymMap, Dimension, ServiceArea, TopicLexicon};
use crate::rng;

pub const FIXTURE_YEARS: [i32; 4] = [2017, 2018, 2019, 2020];
pub const TREND_TOPIC: &str = "artificial-intelligence";

struct PlantedCompany {
    id: &'static str,
    name: &'static str,
    area: ServiceArea,
    country: &'static str,
    pioneer: bool,
}

const COMPANIES: [PlantedCompany; 12] = [
    PlantedCompany { id: "aurora-devices", name: "Aurora Devices", area: ServiceArea::Hardware, country: "US", pioneer: true },
    PlantedCompany { id: "basalt-systems", name: "Basalt Systems", area: ServiceArea::Hardware, country: "TW", pioneer: false },
    PlantedCompany { id: "cobalt-silicon", name: "Cobalt Silicon", area: ServiceArea::Hardware, country: "KR", pioneer: false },
    PlantedCompany { id: "delta-circuits", name: "Delta Circuits", area: ServiceArea::Hardware, country: "JP", pioneer: false },
    PlantedCompany { id: "ember-soft", name: "Ember Soft", area: ServiceArea::Software, country: "DE", pioneer: true },
    PlantedCompany { id: "fjord-cloud", name: "Fjord Cloud", area: ServiceArea::Software, country: "NO", pioneer: false },
    PlantedCompany { id: "granite-apps", name: "Granite Apps", area: ServiceArea::Software, country: "US", pioneer: false },
    PlantedCompany { id: "harbor-code", name: "Harbor Code", area: ServiceArea::Software, country: "IN", pioneer: false },
    PlantedCompany { id: "iris-consulting", name: "Iris Consulting", area: ServiceArea::Service, country: "GB", pioneer: true },
    PlantedCompany { id: "juniper-services", name: "Juniper Services", area: ServiceArea::Service, country: "US", pioneer: false },
    PlantedCompany { id: "kestrel-support", name: "Kestrel Support", area: ServiceArea::Service, country: "CN", pioneer: false },
    PlantedCompany { id: "lumen-outsourcing", name: "Lumen Outsourcing", area: ServiceArea::Service, country: "FR", pioneer: false },
];

/// Position within each sector of the company that keeps its
/// environmental coverage while peers drop theirs, and covers social
/// topics from the first year. This is the sector's pioneer.
const E_HOLDOUT_SLOT: usize = 0;
/// Position within each sector of the company whose social coverage stays
/// flat while peers grow.
const S_LAGGARD_SLOT: usize = 3;

/// Position of a company among the four members of its sector.
fn sector_slot(index: usize) -> usize {
    let area = COMPANIES[index].area;
    COMPANIES[..index].iter().filter(|c| c.area == area).count()
}

fn sector_topics(area: ServiceArea) -> [&'static str; 2] {
    match area {
        ServiceArea::Hardware => ["carbon-footprint", "responsible-sourcing"],
        ServiceArea::Software => ["data-privacy", "data-security"],
        ServiceArea::Service => ["community-engagement", "stakeholder-engagement"],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthCompany {
    pub company_id: String,
    pub service_area: ServiceArea,
    pub pioneer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub years: Vec<i32>,
    pub companies: Vec<GroundTruthCompany>,
    pub pioneers: Vec<String>,
    /// Sector-specific topics keyed by service area.
    pub sector_topics: BTreeMap<String, Vec<String>>,
    pub informative_topics: Vec<String>,
    /// Topics whose counts do not depend on the sector.
    pub noise_topics: Vec<String>,
    pub trend_topic: String,
    /// The trend topic's mean weight rises in every year after this one.
    pub trend_breakpoint: i32,
    /// One per sector.
    pub environmental_holdouts: Vec<String>,
    /// One per sector.
    pub social_laggards: Vec<String>,
    /// Planted mention counts per company, year and topic.
    pub planted_counts: BTreeMap<String, BTreeMap<i32, BTreeMap<String, u32>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureFiles {
    pub manifest: PathBuf,
    pub lexicon: PathBuf,
    pub acronyms: PathBuf,
    pub config: PathBuf,
    pub ground_truth: PathBuf,
    pub texts: Vec<PathBuf>,
}

const FILLER: [&str; 48] = [
    "report", "annual", "company", "operations", "customers", "products", "strategy", "committed", "continue",
    "improve", "performance", "progress", "initiatives", "across", "teams", "year", "our", "the", "and", "with",
    "program", "targets", "results", "during", "partners", "market", "growth", "value", "long", "term", "focus",
    "priority", "review", "policy", "approach", "framework", "metrics", "goals", "industry", "investors",
    "regional", "sites", "facilities", "services", "platform", "quality", "standards", "disclosure",
];

/// A random rank for each company among the members of its sector, with
/// `skip_slot` (if any) left out of the ranking.
fn sector_ranks(rng: &mut ChaCha8Rng, skip_slot: Option<usize>) -> Vec<Option<usize>> {
    let mut ranks = vec![None; COMPANIES.len()];
    for area in ServiceArea::ALL {
        let mut members: Vec<usize> = (0..COMPANIES.len())
            .filter(|&i| COMPANIES[i].area == area && Some(sector_slot(i)) != skip_slot)
            .collect();
        members.shuffle(rng);
        for (rank, i) in members.into_iter().enumerate() {
            ranks[i] = Some(rank);
        }
    }
    ranks
}

/// Random order of the members that are neither pioneer nor laggard.
fn middle_ranks(rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let mut ranks = vec![None; COMPANIES.len()];
    for area in ServiceArea::ALL {
        let mut members: Vec<usize> = (0..COMPANIES.len())
            .filter(|&i| COMPANIES[i].area == area && ![E_HOLDOUT_SLOT, S_LAGGARD_SLOT].contains(&sector_slot(i)))
            .collect();
        members.shuffle(rng);
        for (rank, i) in members.into_iter().enumerate() {
            ranks[i] = Some(rank);
        }
    }
    ranks
}

/// Draws one level per rank and hands them to the members of every sector
/// in an independently shuffled order, so each sector sees the same
/// multiset and the topic carries no sector signal.
fn balanced_levels(rng: &mut ChaCha8Rng, mut draw: impl FnMut(&mut ChaCha8Rng) -> f64) -> Vec<f64> {
    let levels: Vec<f64> = (0..4).map(|_| draw(rng)).collect();
    sector_ranks(rng, None).into_iter().map(|r| levels[r.expect("ranked")]).collect()
}

/// Per-company mention level shared by all topics of one dimension: the
/// company in `fixed_slot` of each sector sits at `fixed`, the others take
/// `levels` in a shuffled order.
fn propensity(rng: &mut ChaCha8Rng, fixed_slot: usize, fixed: f64, levels: [f64; 3]) -> Vec<f64> {
    sector_ranks(rng, Some(fixed_slot)).into_iter().map(|r| r.map_or(fixed, |r| levels[r])).collect()
}

/// Planted mention counts for every company in one year, keyed by topic id.
/// `adoption` ranks the two middle members of each sector by the year
/// they take up social topics.
fn plant_year(
    year_idx: usize,
    adoption: &[Option<usize>],
    lexicon: &TopicLexicon,
    rng: &mut ChaCha8Rng,
) -> Vec<BTreeMap<String, u32>> {
    let t = year_idx as f64;
    // Environmental coverage starts spread out and collapses to the floor.
    let spread = 4.0 * (1.0 - t / 3.0);
    let e_level = propensity(rng, E_HOLDOUT_SLOT, 11.0, [2.0, 2.0 + spread, 2.0 + 2.0 * spread]);
    // Social coverage: pioneers start high, laggards stay low, and the two
    // middle members ramp up in staggered half steps.
    let (s_low, s_high) = (2.0, 10.0);
    let ramp = [[0.0, 0.5, 1.0, 1.0], [0.0, 0.0, 0.5, 1.0]];
    let s_level: Vec<f64> = (0..COMPANIES.len())
        .map(|i| match (sector_slot(i), adoption[i]) {
            (E_HOLDOUT_SLOT, _) => s_high,
            (S_LAGGARD_SLOT, _) => s_low,
            (_, Some(r)) => s_low + (s_high - s_low) * ramp[r][year_idx.min(3)],
            (_, None) => s_low,
        })
        .collect();

    let mut out = vec![BTreeMap::new(); COMPANIES.len()];
    let mut spread_topics: BTreeMap<Dimension, Vec<&str>> = BTreeMap::new();
    for topic in &lexicon.topics {
        let id = topic.topic_id.as_str();
        let any_sector = ServiceArea::ALL.iter().any(|a| sector_topics(*a).contains(&id));
        let counts: Vec<f64> = if any_sector {
            COMPANIES
                .iter()
                .map(|c| {
                    let n = match (sector_topics(c.area).contains(&id), c.pioneer) {
                        (true, true) => rng.random_range(40..=48),
                        (true, false) => rng.random_range(9..=12),
                        (false, _) => rng.random_range(0..=1),
                    };
                    n as f64
                })
                .collect()
        } else if id == TREND_TOPIC {
            let base = [2.0, 4.0, 7.0, 11.0][year_idx.min(3)];
            balanced_levels(rng, |r| base + r.random_range(0.0..1.5))
        } else if topic.dimension == Dimension::G {
            balanced_levels(rng, |r| r.random_range(2.0..5.0))
        } else {
            spread_topics.entry(topic.dimension).or_default().push(id);
            vec![0.0; COMPANIES.len()]
        };
        for (row, n) in out.iter_mut().zip(counts) {
            row.insert(topic.topic_id.clone(), n.round().max(0.0) as u32);
        }
    }
    // A company's E and S totals follow its level exactly; the mentions
    // land on the dimension's topics at random.
    for (dim, topics) in &spread_topics {
        let level = if *dim == Dimension::E { &e_level } else { &s_level };
        for (row, l) in out.iter_mut().zip(level) {
            let total = (l * topics.len() as f64).round() as usize;
            for _ in 0..total {
                let topic = topics[rng.random_range(0..topics.len())];
                *row.get_mut(topic).expect("topic planted") += 1;
            }
        }
    }
    out
}

/// Surface forms for a topic mention. Acronym forms are expanded again by
/// the default acronym map during ingestion.
fn surface_forms(topic_id: &str, phrases: &[Vec<String>]) -> Vec<String> {
    let mut forms: Vec<String> = phrases.iter().map(|p| p.join(" ")).collect();
    match topic_id {
        "artificial-intelligence" => forms.extend(["AI".to_string(), "ML".to_string()]),
        "carbon-emissions" => forms.push("GHG emissions".into()),
        "waste-management" => forms.push("E-waste".into()),
        _ => {}
    }
    forms
}

fn render_text(company: &PlantedCompany, year: i32, counts: &BTreeMap<String, u32>, lexicon: &TopicLexicon, rng: &mut ChaCha8Rng) -> String {
    let mut chunks: Vec<String> = Vec::new();
    for topic in &lexicon.topics {
        let forms = surface_forms(&topic.topic_id, &topic.phrases);
        for _ in 0..counts[&topic.topic_id] {
            chunks.push(forms.choose(rng).expect("topic has phrases").clone());
        }
    }
    let filler_words = 420 + rng.random_range(0..40);
    chunks.extend((0..filler_words).map(|_| FILLER.choose(rng).expect("filler").to_string()));
    // Shuffle whole mentions so multi-word phrases stay intact.
    chunks.shuffle(rng);

    let mut text = format!(
        "{} ESG Report {year}\nIn {year}, {} published this report for stakeholders in {}.\n",
        company.name, company.name, company.country
    );
    let mut sentence: Vec<String> = Vec::new();
    let mut target = rng.random_range(8..16);
    for chunk in chunks {
        sentence.push(chunk);
        if sentence.len() >= target {
            let mut s = sentence.join(" ");
            if let Some(first) = s.get(..1) {
                let upper = first.to_uppercase();
                s.replace_range(..1, &upper);
            }
            text.push_str(&s);
            text.push_str(if rng.random_bool(0.2) { "; 100% verified.\n" } else { ". " });
            sentence.clear();
            target = rng.random_range(8..16);
        }
    }
    if !sentence.is_empty() {
        text.push_str(&sentence.join(" "));
        text.push_str(".\n");
    }
    text.push_str(&format!("\nMore at https://example.com/{}/esg-{year}.pdf or www.example.com/esg.\n", company.id));
    text
}

/// Writes the fixture corpus, its lexicon, acronym map, a pipeline config
/// and the ground truth under `out_dir`.
pub fn generate_fixture(out_dir: &Path, seed: u64) -> io::Result<FixtureFiles> {
    let lexicon = TopicLexicon::default_topics();
    let acronyms = AcronymMap::default_map();
    let texts_dir = out_dir.join("texts");
    fs::create_dir_all(&texts_dir)?;

    let mut manifest = String::from("company_id,display_name,service_area,country,industry,year,path\n");
    let mut planted: BTreeMap<String, BTreeMap<i32, BTreeMap<String, u32>>> = BTreeMap::new();
    let mut texts = Vec::new();
    let adoption = middle_ranks(&mut rng::stream(seed, &[2]));
    let per_year: Vec<Vec<BTreeMap<String, u32>>> = FIXTURE_YEARS
        .iter()
        .enumerate()
        .map(|(yi, &year)| plant_year(yi, &adoption, &lexicon, &mut rng::stream(seed, &[0, year as u64])))
        .collect();
    for (ci, company) in COMPANIES.iter().enumerate() {
        for (yi, &year) in FIXTURE_YEARS.iter().enumerate() {
            let mut rng = rng::stream(seed, &[1, ci as u64, year as u64]);
            let counts = per_year[yi][ci].clone();
            let text = render_text(company, year, &counts, &lexicon, &mut rng);
            let rel = format!("texts/{}_{year}.txt", company.id);
            let path = out_dir.join(&rel);
            fs::write(&path, text)?;
            texts.push(path);
            manifest.push_str(&format!(
                "{},{},{},{},technology,{year},{rel}\n",
                company.id, company.name, company.area, company.country
            ));
            planted.entry(company.id.to_string()).or_default().insert(year, counts);
        }
    }

    let sector_map: BTreeMap<String, Vec<String>> = ServiceArea::ALL
        .iter()
        .map(|a| (a.to_string(), sector_topics(*a).iter().map(|s| s.to_string()).collect()))
        .collect();
    let mut informative: Vec<String> = sector_map.values().flatten().cloned().collect();
    informative.sort();
    let noise: Vec<String> = lexicon
        .topic_ids()
        .filter(|t| !informative.iter().any(|i| i == t) && *t != TREND_TOPIC)
        .map(str::to_string)
        .collect();
    let truth = GroundTruth {
        seed,
        years: FIXTURE_YEARS.to_vec(),
        companies: COMPANIES
            .iter()
            .map(|c| GroundTruthCompany { company_id: c.id.into(), service_area: c.area, pioneer: c.pioneer })
            .collect(),
        pioneers: COMPANIES.iter().filter(|c| c.pioneer).map(|c| c.id.to_string()).collect(),
        sector_topics: sector_map,
        informative_topics: informative,
        noise_topics: noise,
        trend_topic: TREND_TOPIC.into(),
        trend_breakpoint: FIXTURE_YEARS[0],
        environmental_holdouts: (0..COMPANIES.len())
            .filter(|&i| sector_slot(i) == E_HOLDOUT_SLOT)
            .map(|i| COMPANIES[i].id.to_string())
            .collect(),
        social_laggards: (0..COMPANIES.len())
            .filter(|&i| sector_slot(i) == S_LAGGARD_SLOT)
            .map(|i| COMPANIES[i].id.to_string())
            .collect(),
        planted_counts: planted,
    };

    let files = FixtureFiles {
        manifest: out_dir.join("manifest.csv"),
        lexicon: out_dir.join("lexicon.json"),
        acronyms: out_dir.join("acronyms.json"),
        config: out_dir.join("config.json"),
        ground_truth: out_dir.join("ground_truth.json"),
        texts,
    };
    fs::write(&files.manifest, manifest)?;
    fs::write(&files.lexicon, serde_json::to_string_pretty(&lexicon)? + "\n")?;
    fs::write(&files.acronyms, serde_json::to_string_pretty(&acronyms)? + "\n")?;
    fs::write(&files.ground_truth, serde_json::to_string_pretty(&truth)? + "\n")?;
    let config = serde_json::json!({
        "paths": {
            "manifest": "manifest.csv",
            "lexicon": "lexicon.json",
            "acronyms": "acronyms.json",
            "output_dir": "output"
        },
        "seed": seed
    });
    fs::write(&files.config, serde_json::to_string_pretty(&config)? + "\n")?;
    Ok(files)
}

pub fn load_ground_truth(path: &Path) -> io::Result<GroundTruth> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_counts() {
        let dir = tempfile::tempdir().unwrap();
        let files = generate_fixture(dir.path(), 42).unwrap();
        assert_eq!(files.texts.len(), 48);
        assert_eq!(fs::read_dir(dir.path().join("texts")).unwrap().count(), 48);
        for p in [&files.manifest, &files.lexicon, &files.acronyms, &files.config, &files.ground_truth] {
            assert!(p.is_file(), "{}", p.display());
        }
        let truth = load_ground_truth(&files.ground_truth).unwrap();
        assert_eq!(truth.pioneers.len(), 3);
        assert_eq!(truth.informative_topics.len(), 6);
        assert_eq!(truth.noise_topics.len(), 14);
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let fa = generate_fixture(a.path(), 42).unwrap();
        let fb = generate_fixture(b.path(), 42).unwrap();
        for (x, y) in fa.texts.iter().zip(&fb.texts).chain([(&fa.manifest, &fb.manifest), (&fa.ground_truth, &fb.ground_truth)]) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
        let c = tempfile::tempdir().unwrap();
        let fc = generate_fixture(c.path(), 43).unwrap();
        assert_ne!(fs::read(&fa.texts[0]).unwrap(), fs::read(&fc.texts[0]).unwrap());
    }
}
