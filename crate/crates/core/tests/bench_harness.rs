mod common;

use std::fs;

use common::{accuracy, holdout, rng};
use hsp_core::bench::{
    generate_synthetic, load_dataset, load_fvecs, load_labels, run_experiment, run_on_dataset,
    split_test_train, summarize_max, write_fvecs, write_labels, DataSource, ExperimentConfig,
    GeneratorKind, GeneratorSpec,
};
use hsp_core::classify::{classify_hsp, classify_knn};
use hsp_core::{ClassifierKind, IndexParams, VoteRule};
use rand::Rng;

fn gm(classes: usize, ppc: usize, dim: usize, sep: f64, seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        kind: GeneratorKind::GaussianMixture,
        num_classes: classes,
        points_per_class: ppc,
        dimension: dim,
        class_separation: sep,
        seed,
    }
}

#[test]
fn fvecs_round_trip_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(1);
    let vecs: Vec<Vec<f32>> = (0..1000)
        .map(|_| (0..24).map(|_| r.random_range(-1e6f32..1e6)).collect())
        .collect();
    let a = dir.path().join("a.fvecs");
    let b = dir.path().join("b.fvecs");
    write_fvecs(&a, &vecs).unwrap();
    let read = load_fvecs(&a).unwrap();
    assert_eq!(read.len(), 1000);
    assert!(read.iter().zip(&vecs).all(|(f, v)| f.components() == v.as_slice()));
    write_fvecs(&b, &read).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::metadata(&a).unwrap().len(), 1000 * (4 + 24 * 4));

    let labels: Vec<usize> = (0..1000).map(|_| r.random_range(0..100)).collect();
    let l = dir.path().join("a.txt");
    write_labels(&l, &labels).unwrap();
    assert_eq!(load_labels(&l).unwrap(), labels);
    let ds = load_dataset(&a, Some(&l)).unwrap();
    assert_eq!((ds.len(), ds.dimension()), (1000, 24));
}

#[test]
fn indistinguishable_classes_are_a_coin_flip() {
    let ds = generate_synthetic(&gm(2, 1500, 8, 0.0, 2)).unwrap();
    let (train, queries) = holdout(&ds, 1000);
    let knn = accuracy(&queries, |q| classify_knn(&train, q, 15, VoteRule::Majority, None).unwrap().label);
    let hsp = accuracy(&queries, |q| classify_hsp(&train, q, VoteRule::Majority, None).unwrap().label);
    for acc in [knn, hsp] {
        assert!((acc - 50.0).abs() <= 5.0, "{acc}");
    }
}

#[test]
fn well_separated_classes_are_trivial_for_one_nn() {
    let ds = generate_synthetic(&gm(4, 300, 16, 10.0, 3)).unwrap();
    let (train, queries) = holdout(&ds, 400);
    let acc = accuracy(&queries, |q| classify_knn(&train, q, 1, VoteRule::Majority, None).unwrap().label);
    assert!(acc >= 99.0, "{acc}");
}

fn small_config(out: Option<std::path::PathBuf>) -> ExperimentConfig {
    ExperimentConfig {
        data: DataSource::Synthetic(gm(3, 60, 6, 2.5, 4)),
        test_sample_count: 40,
        k_min: 1,
        k_max: 12,
        classifiers: ClassifierKind::ALL.to_vec(),
        rules: VoteRule::ALL.to_vec(),
        index: IndexParams {
            ef_search: 8,
            ..Default::default()
        },
        seed: 21,
        record_timing: false,
        out,
    }
}

#[test]
fn same_config_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let ra = run_experiment(&small_config(Some(a.clone()))).unwrap();
    run_experiment(&small_config(Some(b.clone()))).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    // 4 swept kinds x 3 rules x 12 k + hsp once per rule
    assert_eq!(ra.rows.len(), 4 * 3 * 12 + 3);
    assert!(ra.rows.iter().all(|r| (0.0..=100.0).contains(&r.accuracy) && r.elapsed_ms.is_none()));
    let maxima = summarize_max(&ra);
    assert_eq!(maxima.len(), 15);
}

#[test]
fn report_accuracy_is_an_exact_count() {
    let cfg = small_config(None);
    let ds = generate_synthetic(&gm(3, 60, 6, 2.5, 4)).unwrap();
    let report = run_on_dataset(&ds, &cfg).unwrap();
    let (test, train_ids) = split_test_train(ds.len(), 40, 21).unwrap();
    assert!(test.iter().all(|t| !train_ids.contains(t)));
    let train = ds.subset(&train_ids).unwrap();
    for k in [1, 5, 12] {
        for rule in VoteRule::ALL {
            let correct = test
                .iter()
                .filter(|&&t| classify_knn(&train, ds.point(t), k, rule, None).unwrap().label == ds.label(t))
                .count();
            let row = report
                .rows
                .iter()
                .find(|r| r.classifier == ClassifierKind::Knn && r.rule == rule && r.k == Some(k))
                .unwrap();
            assert_eq!(row.accuracy, correct as f64 / 40.0 * 100.0);
            assert_eq!((row.n_test, row.n_train, row.dim), (40, 140, 6));
        }
    }
    // probabilistic rows beyond ef_search = 8 go through fresh searches
    let idx = hsp_core::SmallWorldIndex::build(&train, cfg.index).unwrap();
    for k in [3, 8, 9, 12] {
        let correct = test
            .iter()
            .filter(|&&t| {
                hsp_core::classify::classify_probabilistic_asymptotic_hsp(
                    &idx, &train, ds.point(t), k, VoteRule::Dudani, None,
                )
                .unwrap()
                .label
                    == ds.label(t)
            })
            .count();
        let row = report
            .rows
            .iter()
            .find(|r| {
                r.classifier == ClassifierKind::ProbabilisticAsymptoticHsp
                    && r.rule == VoteRule::Dudani
                    && r.k == Some(k)
            })
            .unwrap();
        assert_eq!(row.accuracy, correct as f64 / 40.0 * 100.0, "k={k}");
    }
}

#[test]
fn json_config_paths_resolve_against_its_directory() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate_synthetic(&gm(2, 50, 3, 3.0, 5)).unwrap();
    let rows: Vec<&[f32]> = ds.points().collect();
    write_fvecs(&dir.path().join("x.fvecs"), &rows).unwrap();
    write_labels(&dir.path().join("x.txt"), ds.labels()).unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(
        &cfg_path,
        r#"{
            "data": {"fvecs": {"vectors": "x.fvecs", "labels": "x.txt"}},
            "test_sample_count": 20, "k_min": 2, "k_max": 4,
            "classifiers": ["knn", "hsp"], "rules": ["majority"], "seed": 3,
            "out": "r.csv"
        }"#,
    )
    .unwrap();
    let cfg = ExperimentConfig::from_json_file(&cfg_path).unwrap();
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.rows.len(), 3 + 1);
    let csv = report.to_csv_string();
    assert!(csv.starts_with("classifier,rule,k,accuracy,n_test,n_train,dim,seed,elapsed_ms\n"));
    assert!(csv.contains("\nhsp,majority,,"));
    assert_eq!(fs::read_to_string(dir.path().join("r.csv")).unwrap(), csv);
}
