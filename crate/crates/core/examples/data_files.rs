//! Writes a synthetic dataset as fvecs + labels, reads it back, and
//! runs a small k sweep from a JSON config that points at the files.
//!
//!     cargo run --release --example data_files

use hsp_core::bench::{
    format_max_table, generate_synthetic, load_dataset, run_experiment, summarize_max,
    write_fvecs, write_labels, ExperimentConfig, GeneratorKind, GeneratorSpec,
};

fn main() -> hsp_core::Result<()> {
    let dir = std::env::temp_dir().join("hsp_data_files_example");
    std::fs::create_dir_all(&dir).map_err(|e| hsp_core::Error::Config(e.to_string()))?;
    let ds = generate_synthetic(&GeneratorSpec {
        kind: GeneratorKind::GaussianMixture,
        num_classes: 3,
        points_per_class: 200,
        dimension: 8,
        class_separation: 3.0,
        seed: 5,
    })?;
    let points: Vec<&[f32]> = ds.points().collect();
    write_fvecs(&dir.join("train.fvecs"), &points)?;
    write_labels(&dir.join("train.labels"), ds.labels())?;

    let back = load_dataset(&dir.join("train.fvecs"), Some(&dir.join("train.labels")))?;
    println!("reloaded {} x {}, same fingerprint: {}", back.len(), back.dimension(), back.fingerprint() == ds.fingerprint());

    let config = dir.join("sweep.json");
    std::fs::write(
        &config,
        r#"{
  "data": {"fvecs": {"vectors": "train.fvecs", "labels": "train.labels"}},
  "test_sample_count": 100,
  "k_min": 1,
  "k_max": 40,
  "classifiers": ["knn", "hsp", "ahsp"],
  "rules": ["majority", "dudani"],
  "seed": 3,
  "out": "sweep.csv"
}"#,
    )
    .map_err(|e| hsp_core::Error::Config(e.to_string()))?;
    let report = run_experiment(&ExperimentConfig::from_json_file(&config)?)?;
    print!("{}", format_max_table(&summarize_max(&report)));
    println!("full report in {}", dir.join("sweep.csv").display());
    Ok(())
}
