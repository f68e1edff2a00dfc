//! Reproduces the k-sweep protocol on a synthetic Gaussian mixture and
//! prints the per-classifier maxima.
//!
//!     cargo run --release --example k_sweep -- [separation] [seed] [k_max]

use hsp_core::bench::{
    format_max_table, run_experiment, summarize_max, DataSource, ExperimentConfig, GeneratorKind,
    GeneratorSpec,
};
use hsp_core::{ClassifierKind, IndexParams, VoteRule};

fn main() -> hsp_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let separation: f64 = args.next().map_or(4.0, |s| s.parse().expect("separation"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let k_max: usize = args.next().map_or(100, |s| s.parse().expect("k_max"));

    let config = ExperimentConfig {
        data: DataSource::Synthetic(GeneratorSpec {
            kind: GeneratorKind::GaussianMixture,
            num_classes: 10,
            points_per_class: 550,
            dimension: 32,
            class_separation: separation,
            seed,
        }),
        test_sample_count: 500,
        k_min: 1,
        k_max,
        classifiers: ClassifierKind::ALL.to_vec(),
        rules: VoteRule::ALL.to_vec(),
        index: IndexParams::default(),
        seed,
        record_timing: true,
        out: None,
    };
    let report = run_experiment(&config)?;
    print!("{}", format_max_table(&summarize_max(&report)));

    for kind in [ClassifierKind::Knn, ClassifierKind::AsymptoticHsp] {
        let curve: Vec<f64> = report
            .curve(kind, VoteRule::Majority)
            .iter()
            .map(|r| r.accuracy)
            .collect();
        let tv: f64 = curve.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        println!("{kind}: total variation over k = {tv:.1}");
    }
    Ok(())
}
