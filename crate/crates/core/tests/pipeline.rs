use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use esg_trendlab::config::PipelineConfig;
use esg_trendlab::fixture::generate_fixture;
use esg_trendlab::pipeline::{run_pipeline, run_stage, PipelineError, RunManifest, Stage, RUN_MANIFEST};

fn fixture_config(root: &Path, out: &str) -> PipelineConfig {
    let files = generate_fixture(root, 42).unwrap();
    let mut config = PipelineConfig::load(&files.config).unwrap();
    config.paths.output_dir = Some(out.into());
    config
}

/// Every file in `dir` except the run manifest, by name.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != RUN_MANIFEST)
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn out_dir(config: &PipelineConfig) -> PathBuf {
    config.output_dir().unwrap()
}

#[test]
fn full_output_set() {
    let root = tempfile::tempdir().unwrap();
    let config = fixture_config(root.path(), "out");
    let manifest = run_pipeline(&config).unwrap();
    let files = snapshot(&out_dir(&config));
    let count = |prefix: &str| files.keys().filter(|k| k.starts_with(prefix) && k.ends_with(".csv")).count();
    assert_eq!(count("scores_"), 4);
    assert_eq!(count("representativeness_"), 4);
    assert_eq!(count("importance_"), 4);
    assert_eq!(count("strategic_"), 4);
    assert_eq!(count("esg3d_"), 4);
    for name in [
        "corpus.jsonl",
        "counts.csv",
        "companies.csv",
        "scores.json",
        "trends.csv",
        "zones_summary.csv",
        "regression_report.json",
        "regression_report.txt",
        "rankings_within.csv",
        "rankings_across_service_area.csv",
    ] {
        assert!(files.contains_key(name), "{name} missing");
    }
    assert!(!files.keys().any(|k| k.ends_with(".partial")));
    assert!(!files.keys().any(|k| k.ends_with(".svg")));

    let written: RunManifest =
        serde_json::from_str(&fs::read_to_string(out_dir(&config).join(RUN_MANIFEST)).unwrap()).unwrap();
    assert_eq!(written, manifest);
    assert_eq!(manifest.stages.iter().map(|s| s.stage).collect::<Vec<_>>(), Stage::ALL.to_vec());
    assert_eq!(manifest.config_hash, config.hash());
    let listed: usize = manifest.stages.iter().map(|s| s.outputs.len()).sum();
    assert_eq!(listed, files.len());

    let header = fs::read_to_string(out_dir(&config).join("strategic_2020.csv")).unwrap();
    assert!(header.starts_with("company_id,x_raw,y_raw,x,y,zone\n"));
    assert_eq!(header.lines().count(), 13);
}

#[test]
fn identical_runs_identical_bytes() {
    let root = tempfile::tempdir().unwrap();
    let a = fixture_config(root.path(), "a");
    let mut b = a.clone();
    b.paths.output_dir = Some("b".into());
    let ma = run_pipeline(&a).unwrap();
    let mb = run_pipeline(&b).unwrap();
    assert_eq!(snapshot(&out_dir(&a)), snapshot(&out_dir(&b)));
    assert_eq!(ma.config_hash, mb.config_hash);
    let strip = |m: &RunManifest| m.stages.iter().map(|s| (s.stage, s.outputs.clone())).collect::<Vec<_>>();
    assert_eq!(strip(&ma), strip(&mb));
}

#[test]
fn stages_compose_to_pipeline() {
    let root = tempfile::tempdir().unwrap();
    let whole = fixture_config(root.path(), "whole");
    let mut staged = whole.clone();
    staged.paths.output_dir = Some("staged".into());
    run_pipeline(&whole).unwrap();
    for stage in Stage::ALL {
        run_stage(stage, &staged).unwrap();
    }
    assert_eq!(snapshot(&out_dir(&whole)), snapshot(&out_dir(&staged)));
}

#[test]
fn score_after_ingest_writes_scores_only() {
    let root = tempfile::tempdir().unwrap();
    let config = fixture_config(root.path(), "out");
    let ingest = run_stage(Stage::Ingest, &config).unwrap();
    let before = snapshot(&out_dir(&config));
    let score = run_stage(Stage::Score, &config).unwrap();
    let after = snapshot(&out_dir(&config));
    assert!(score.iter().all(|f| f.starts_with("scores")));
    assert!(score.iter().all(|f| !ingest.contains(f)));
    assert_eq!(after.len(), before.len() + score.len());
    for (name, bytes) in &before {
        assert_eq!(&after[name], bytes);
    }
}

#[test]
fn model_without_represent() {
    let root = tempfile::tempdir().unwrap();
    let config = fixture_config(root.path(), "out");
    run_stage(Stage::Ingest, &config).unwrap();
    run_stage(Stage::Score, &config).unwrap();
    run_stage(Stage::Distinguish, &config).unwrap();
    let err = run_stage(Stage::Model, &config).unwrap_err();
    assert!(matches!(err, PipelineError::MissingUpstream { stage: Stage::Model, upstream: Stage::Represent, .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
    assert!(!snapshot(&out_dir(&config)).keys().any(|k| k.starts_with("strategic_")));
}

#[test]
fn regress_matches_pipeline() {
    let root = tempfile::tempdir().unwrap();
    let config = fixture_config(root.path(), "out");
    run_pipeline(&config).unwrap();
    let report_path = out_dir(&config).join("regression_report.json");
    let first = fs::read(&report_path).unwrap();
    fs::remove_file(&report_path).unwrap();
    run_stage(Stage::Regress, &config).unwrap();
    assert_eq!(fs::read(&report_path).unwrap(), first);
    let text = fs::read_to_string(out_dir(&config).join("regression_report.txt")).unwrap();
    assert!(text.contains("Cross-Sector"));
}

#[test]
fn missing_lexicon_names_path() {
    let root = tempfile::tempdir().unwrap();
    let mut config = fixture_config(root.path(), "out");
    config.paths.lexicon = Some("nowhere/lexicon.json".into());
    let err = run_pipeline(&config).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("nowhere/lexicon.json"), "{err}");
    assert!(!out_dir(&config).join("counts.csv").exists());
}

#[test]
fn year_filter_and_options() {
    let root = tempfile::tempdir().unwrap();
    let mut config = fixture_config(root.path(), "out");
    config.years = Some("2018..2019".parse().unwrap());
    config.svg = true;
    config.matrix_mode = true;
    config.quantile_heatmaps = true;
    run_pipeline(&config).unwrap();
    let files = snapshot(&out_dir(&config));
    assert!(files.contains_key("scores_2018.csv") && files.contains_key("scores_2019.csv"));
    assert!(!files.contains_key("scores_2017.csv"));
    assert!(files.contains_key("strategic_2019.svg"));
    assert!(files.contains_key("matrix_silhouette.csv"));
    assert!(String::from_utf8_lossy(&files["scores_heatmap.json"]).contains("\"quantile\""));

    let mut empty = config.clone();
    empty.paths.output_dir = Some("empty".into());
    empty.years = Some("2001..2002".parse().unwrap());
    let err = run_pipeline(&empty).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
}

#[test]
fn global_standardization_and_zero_split() {
    let root = tempfile::tempdir().unwrap();
    let mut config = fixture_config(root.path(), "out");
    config.standardize = esg_trendlab::strategy::StandardizeMode::Global;
    config.threshold_mode = esg_trendlab::strategy::ThresholdMode::Zero;
    run_pipeline(&config).unwrap();
    let mut xs = Vec::new();
    for year in 2017..=2020 {
        let text = fs::read_to_string(out_dir(&config).join(format!("strategic_{year}.csv"))).unwrap();
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let (x, y): (f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap());
            let expected = esg_trendlab::strategy::Zone::classify(x, y, 0.0, 0.0);
            assert_eq!(f[5], expected.as_str());
            xs.push(x);
        }
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!(mean.abs() < 1e-12);
}

#[test]
fn custom_labels() {
    let root = tempfile::tempdir().unwrap();
    let mut config = fixture_config(root.path(), "out");
    let companies = fs::read_to_string(root.path().join("manifest.csv")).unwrap();
    let mut labels = String::from("company_id,label\n");
    let mut seen = std::collections::BTreeSet::new();
    for line in companies.lines().skip(1) {
        let id = line.split(',').next().unwrap();
        if seen.insert(id.to_string()) {
            labels.push_str(&format!("{id},{}\n", if seen.len() % 2 == 0 { "even" } else { "odd" }));
        }
    }
    fs::write(root.path().join("labels.csv"), labels).unwrap();
    config.label_kind = esg_trendlab::distinctiveness::LabelKind::Custom;
    config.paths.custom_labels = Some("labels.csv".into());
    run_pipeline(&config).unwrap();
    assert!(out_dir(&config).join("importance_2020_custom.csv").is_file());
    let across = fs::read_to_string(out_dir(&config).join("rankings_across_custom.csv")).unwrap();
    assert_eq!(across.lines().count(), 1 + 2 * 4);
}

#[test]
fn informative_topics_lead_forest_importance() {
    let root = tempfile::tempdir().unwrap();
    let mut config = fixture_config(root.path(), "out");
    config.seed = 7;
    run_pipeline(&config).unwrap();
    let truth = esg_trendlab::fixture::load_ground_truth(&root.path().join("ground_truth.json")).unwrap();
    let mut years_ok = 0;
    for year in &truth.years {
        let text = fs::read_to_string(out_dir(&config).join(format!("importance_{year}_service_area.csv"))).unwrap();
        let mut rows: Vec<(f64, String)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let (topic, v) = l.split_once(',').unwrap();
                (v.parse().unwrap(), topic.to_string())
            })
            .collect();
        rows.sort_by(|a, b| b.0.total_cmp(&a.0));
        years_ok += usize::from(rows.iter().take(5).all(|(_, t)| truth.informative_topics.contains(t)));
    }
    assert!(years_ok >= 3, "top-5 all informative in {years_ok} years");
}
