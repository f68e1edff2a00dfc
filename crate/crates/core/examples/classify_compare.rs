//! All five classifiers on one held-out split of a synthetic dataset.
//!
//!     cargo run --release --example classify_compare -- [gaussian|moons] [k=30]

use hsp_core::bench::{generate_synthetic, split_test_train, GeneratorKind, GeneratorSpec};
use hsp_core::{ClassifierKind, ClassifierSpec, IndexParams, SmallWorldIndex, VoteRule};
use std::time::Instant;

fn main() -> hsp_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let spec = match args.next().as_deref() {
        Some("moons") => GeneratorSpec {
            kind: GeneratorKind::TwoMoons,
            num_classes: 2,
            points_per_class: 1500,
            dimension: 2,
            class_separation: 0.0,
            seed: 1,
        },
        _ => GeneratorSpec {
            kind: GeneratorKind::GaussianMixture,
            num_classes: 10,
            points_per_class: 300,
            dimension: 32,
            class_separation: 4.0,
            seed: 1,
        },
    };
    let k: usize = args.next().map_or(30, |s| s.parse().expect("k"));

    let ds = generate_synthetic(&spec)?;
    let (test, train) = split_test_train(ds.len(), 300, 7)?;
    let train = ds.subset(&train)?;
    let params = IndexParams::default();
    let index = SmallWorldIndex::build(&train, params)?;

    for kind in ClassifierKind::ALL {
        for rule in VoteRule::ALL {
            let k = kind.takes_k().then_some(k);
            let clf = ClassifierSpec::new(kind, k, rule, Some(params))?;
            let t = Instant::now();
            let mut hits = 0;
            let mut size = 0;
            for &q in &test {
                let p = clf.predict(&train, Some(&index), ds.point(q), None)?;
                hits += usize::from(p.label == ds.label(q));
                size += p.neighbors.len();
            }
            println!(
                "{:>6} {:>8}: accuracy {:5.1}%  mean neighbors {:6.1}  {:.0} ms",
                kind.name(),
                rule.name(),
                hits as f64 * 100.0 / test.len() as f64,
                size as f64 / test.len() as f64,
                t.elapsed().as_secs_f64() * 1e3
            );
        }
    }
    Ok(())
}
