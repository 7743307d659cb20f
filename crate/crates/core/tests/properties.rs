use proptest::prelude::*;

use esg_trendlab::corpus::{
    count_topics, normalize_text, AcronymMap, CountRow, Dimension, TokenizedDoc, TopicCountMatrix, TopicEntry,
    TopicLexicon,
};
use esg_trendlab::distinctiveness::{
    gini_importance, train_forest, CompanyLabels, ForestConfig, ImportanceVector, LabelKind,
};
use esg_trendlab::representativeness::{silhouette_mean, RepresentativenessVector};
use esg_trendlab::scoring::{compute_tfidf, IdfMode, TfMode, TfidfConfig, TopicScoreMatrix};
use esg_trendlab::stats::ols_fit;
use esg_trendlab::strategy::{assign_zones, company_coordinates, esg_triples, StrategicPoint, ThresholdMode, Zone};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

fn count_matrix(counts: &[Vec<u64>], lens: &[u64]) -> TopicCountMatrix {
    TopicCountMatrix {
        topics: (0..counts[0].len()).map(|t| format!("t{t}")).collect(),
        rows: counts
            .iter()
            .zip(lens)
            .enumerate()
            .map(|(i, (c, &len))| CountRow {
                doc_id: format!("d{i}"),
                company_id: format!("c{i:02}"),
                year: 2020,
                token_count: len,
                counts: c.clone(),
            })
            .collect(),
    }
}

/// Count rows whose document length covers the topic counts.
fn counts_strategy() -> impl Strategy<Value = (Vec<Vec<u64>>, Vec<u64>)> {
    (1usize..6, 1usize..5).prop_flat_map(|(docs, topics)| {
        (prop::collection::vec(prop::collection::vec(0u64..20, topics), docs), prop::collection::vec(0u64..50, docs))
            .prop_map(|(counts, extra)| {
                let lens = counts.iter().zip(&extra).map(|(c, e)| c.iter().sum::<u64>() + e).collect();
                (counts, lens)
            })
    })
}

fn score_matrix(weights: Vec<Vec<f64>>) -> TopicScoreMatrix {
    TopicScoreMatrix {
        year: 2020,
        companies: (0..weights.len()).map(|i| format!("c{i:02}")).collect(),
        topics: (0..weights[0].len()).map(|t| format!("t{t}")).collect(),
        weights,
    }
}

fn weights_strategy(rows: std::ops::Range<usize>, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    rows.prop_flat_map(move |n| prop::collection::vec(prop::collection::vec(0.0f64..1.0, cols), n))
}

fn labelled_points() -> impl Strategy<Value = (Vec<f64>, Vec<usize>)> {
    (2usize..25).prop_flat_map(|n| {
        (prop::collection::vec(-50.0f64..50.0, n), prop::collection::vec(0usize..4, n)).prop_filter(
            "two clusters",
            |(_, labels)| labels.iter().any(|&l| l != labels[0]),
        )
    })
}

fn points_1d(x: &[f64]) -> Vec<Vec<f64>> {
    x.iter().map(|&v| vec![v]).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn normalization_is_idempotent(text in "[ -~\n]{0,200}") {
        let acronyms = AcronymMap::default_map();
        let once = normalize_text(&text, &acronyms, 3);
        let twice = normalize_text(&once.join(" "), &acronyms, 3);
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn topic_counts_never_exceed_tokens(words in prop::collection::vec(prop::sample::select(vec!["carbon", "footprint", "data", "privacy", "board", "the"]), 0..60)) {
        let lexicon = TopicLexicon::default_topics();
        let doc = TokenizedDoc {
            doc_id: "d".into(),
            company_id: "c".into(),
            year: 2020,
            tokens: words.iter().map(|w| w.to_string()).collect(),
        };
        for c in count_topics(&doc, &lexicon) {
            prop_assert!(c as usize <= doc.tokens.len());
        }
    }

    #[test]
    fn relative_tf_ignores_document_scale((counts, lens) in counts_strategy(), factor in 2u64..6) {
        let cfg = TfidfConfig::default();
        let base = compute_tfidf(&count_matrix(&counts, &lens), &cfg).unwrap();
        let scaled_counts: Vec<Vec<u64>> = counts.iter().map(|r| r.iter().map(|c| c * factor).collect()).collect();
        let scaled_lens: Vec<u64> = lens.iter().map(|l| l * factor).collect();
        let scaled = compute_tfidf(&count_matrix(&scaled_counts, &scaled_lens), &cfg).unwrap();
        for (a, b) in base.weights.iter().flatten().zip(scaled.weights.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn more_occurrences_weigh_more((counts, lens) in counts_strategy(), tf in prop::sample::select(vec![TfMode::Relative, TfMode::Raw, TfMode::Log]), idf in prop::sample::select(vec![IdfMode::Smooth, IdfMode::Plain])) {
        // raising a count that is already positive leaves df unchanged
        let Some((d, t)) = counts.iter().enumerate().find_map(|(d, r)| r.iter().position(|&c| c > 0).map(|t| (d, t))) else {
            return Ok(());
        };
        let cfg = TfidfConfig { tf_mode: tf, idf_mode: idf, l2_normalize_docs: false };
        let before = compute_tfidf(&count_matrix(&counts, &lens), &cfg).unwrap();
        let mut more = counts.clone();
        more[d][t] += 1;
        let mut more_lens = lens.clone();
        if tf != TfMode::Relative {
            more_lens[d] += 1;
        }
        let after = compute_tfidf(&count_matrix(&more, &more_lens), &cfg).unwrap();
        prop_assert!(after.weights[d][t] >= before.weights[d][t]);
        if before.weights[d][t] > 0.0 {
            prop_assert!(after.weights[d][t] > before.weights[d][t]);
        }
    }

    #[test]
    fn tfidf_weights_finite_and_non_negative((counts, lens) in counts_strategy(), l2 in any::<bool>()) {
        let cfg = TfidfConfig { l2_normalize_docs: l2, ..TfidfConfig::default() };
        let m = compute_tfidf(&count_matrix(&counts, &lens), &cfg).unwrap();
        for row in &m.weights {
            prop_assert!(row.iter().all(|v| v.is_finite() && *v >= 0.0));
            if l2 {
                let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!(norm == 0.0 || (norm - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn silhouette_bounded_and_invariant((x, labels) in labelled_points(), shift in -100.0f64..100.0, scale in 0.01f64..100.0, rot in 0usize..25) {
        let s = silhouette_mean(&points_1d(&x), &labels).unwrap();
        prop_assert!((-1.0..=1.0).contains(&s));

        let moved: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
        let s_moved = silhouette_mean(&points_1d(&moved), &labels).unwrap();
        prop_assert!((s - s_moved).abs() <= 1e-9, "{} vs {}", s, s_moved);

        let k = rot % x.len();
        let (mut px, mut pl) = (x.clone(), labels.clone());
        px.rotate_left(k);
        pl.rotate_left(k);
        let renamed: Vec<usize> = pl.iter().map(|l| l + 10).collect();
        let s_perm = silhouette_mean(&points_1d(&px), &renamed).unwrap();
        prop_assert!((s - s_perm).abs() <= 1e-12);
    }

    #[test]
    fn importances_sum_to_one(weights in weights_strategy(4..12, 3), seed in 0u64..1000) {
        let m = score_matrix(weights);
        let labels = CompanyLabels {
            kind: LabelKind::Custom,
            by_company: m.companies.iter().enumerate().map(|(i, c)| (c.clone(), ["a", "b"][i % 2].to_string())).collect(),
        };
        let forest = train_forest(&m, &labels, &ForestConfig { n_trees: 20, seed, ..ForestConfig::default() }).unwrap();
        let imp = gini_importance(&forest);
        prop_assert!(imp.values.iter().all(|v| *v >= 0.0));
        let total: f64 = imp.values.iter().sum();
        if imp.degenerate {
            prop_assert_eq!(total, 0.0);
        } else {
            prop_assert!((total - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn ols_follows_affine_maps(x in prop::collection::vec(-10.0f64..10.0, 5..40), noise_seed in prop::collection::vec(-1.0f64..1.0, 40), a in -5.0f64..5.0, b in 0.1f64..5.0) {
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-3));
        let y: Vec<f64> = x.iter().zip(&noise_seed).map(|(v, e)| 1.0 + 0.5 * v + e).collect();
        let base = ols_fit(&x, &y).unwrap();
        prop_assume!(!base.exact_fit);
        let y2: Vec<f64> = y.iter().map(|v| a + b * v).collect();
        let fit = ols_fit(&x, &y2).unwrap();
        let tol = |v: f64| 1e-9 * (1.0 + v.abs());
        prop_assert!((fit.coefficients[1].estimate - b * base.coefficients[1].estimate).abs() <= tol(fit.coefficients[1].estimate));
        prop_assert!((fit.coefficients[0].estimate - (a + b * base.coefficients[0].estimate)).abs() <= tol(fit.coefficients[0].estimate));
        prop_assert!((fit.r_squared - base.r_squared).abs() <= 1e-9);
        prop_assert!((fit.coefficients[1].t_value - base.coefficients[1].t_value).abs() <= 1e-6 * (1.0 + base.coefficients[1].t_value.abs()));

        let x2: Vec<f64> = x.iter().map(|v| v + a).collect();
        let shifted = ols_fit(&x2, &y).unwrap();
        prop_assert!((shifted.coefficients[1].estimate - base.coefficients[1].estimate).abs() <= tol(base.coefficients[1].estimate));
        prop_assert!((shifted.r_squared - base.r_squared).abs() <= 1e-9);
    }

    #[test]
    fn zones_partition_and_respect_median((xs, ys) in (3usize..30).prop_flat_map(|n| (prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(-5.0f64..5.0, n)))) {
        let mut points: Vec<StrategicPoint> = xs
            .iter()
            .zip(&ys)
            .enumerate()
            .map(|(i, (&x, &y))| StrategicPoint { company_id: format!("c{i}"), year: 2020, x_raw: x, y_raw: y, x, y, zone: None })
            .collect();
        assign_zones(&mut points, ThresholdMode::Median);
        let n = points.len();
        let count = |z: Zone| points.iter().filter(|p| p.zone == Some(z)).count();
        prop_assert_eq!(Zone::ALL.iter().map(|&z| count(z)).sum::<usize>(), n);
        prop_assert!(count(Zone::Pioneering) + count(Zone::Follower) <= n.div_ceil(2));
        prop_assert!(count(Zone::Pioneering) + count(Zone::Niche) <= n.div_ceil(2));
    }

    #[test]
    fn coordinates_are_weighted_means(weights in weights_strategy(3..10, 4), rep in prop::collection::vec(-1.0f64..1.0, 4), imp in prop::collection::vec(0.0f64..1.0, 4), zero_row in any::<bool>()) {
        let mut weights = weights;
        if zero_row {
            weights[0].iter_mut().for_each(|w| *w = 0.0);
        }
        let m = score_matrix(weights);
        let rep_v = RepresentativenessVector { year: 2020, topics: m.topics.clone(), values: rep.clone() };
        let imp_v = ImportanceVector { year: 2020, topics: m.topics.clone(), values: imp.clone(), label_kind: LabelKind::ServiceArea, degenerate: false };
        let points = company_coordinates(&m, &rep_v, &imp_v).unwrap();
        let lo = rep.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rep.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (p, row) in points.iter().zip(&m.weights) {
            let total: f64 = row.iter().sum();
            let shares: f64 = row.iter().map(|w| if total > 0.0 { w / total } else { 0.0 }).sum();
            prop_assert!(shares == 0.0 || (shares - 1.0).abs() <= 1e-12);
            if total > 0.0 {
                prop_assert!(p.x_raw >= lo - 1e-12 && p.x_raw <= hi + 1e-12);
            } else {
                prop_assert_eq!((p.x_raw, p.y_raw), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn esg_triples_in_unit_cube(weights in weights_strategy(1..10, 3)) {
        let lexicon = TopicLexicon::new(
            [Dimension::E, Dimension::S, Dimension::G]
                .iter()
                .enumerate()
                .map(|(t, &dimension)| TopicEntry {
                    topic_id: format!("t{t}"),
                    label: format!("t{t}"),
                    dimension,
                    phrases: vec![vec![["energy", "people", "board"][t].to_string()]],
                })
                .collect(),
            3,
        )
        .unwrap();
        for t in esg_triples(&score_matrix(weights), &lexicon).unwrap() {
            for v in [t.e, t.s, t.g] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
