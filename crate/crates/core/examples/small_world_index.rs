//! Builds the small-world index over Gaussian points, sweeps the search
//! beam width and round-trips the index through its binary file.
//!
//!     cargo run --release --example small_world_index -- [n=10000] [dim=16]

use hsp_core::index::recall_at_k;
use hsp_core::{IndexParams, LabeledDataset, SmallWorldIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::time::Instant;

fn gaussian(n: usize, dim: usize, seed: u64) -> hsp_core::Result<LabeledDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f32> = (0..n * dim).map(|_| rng.sample(StandardNormal)).collect();
    LabeledDataset::from_flat(dim, data, vec![0; n], None)
}

fn main() -> hsp_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(10_000, |s| s.parse().expect("n"));
    let dim: usize = args.next().map_or(16, |s| s.parse().expect("dim"));
    let ds = gaussian(n, dim, 1)?;
    let queries = gaussian(500, dim, 2)?;
    let queries: Vec<&[f32]> = queries.points().collect();

    let t = Instant::now();
    let index = SmallWorldIndex::build(&ds, IndexParams::default())?;
    println!(
        "built {n} x {dim} in {:.1}s, levels {:?}, level 0 reaches {}",
        t.elapsed().as_secs_f64(),
        index.level_sizes(),
        index.level0_reachable()
    );
    for ef in [10, 20, 50, 100, 200] {
        let t = Instant::now();
        let recall = recall_at_k(&index, &ds, &queries, 10, ef)?;
        println!("ef {ef:>4}: recall@10 {recall:.4} ({:.1} ms)", t.elapsed().as_secs_f64() * 1e3);
    }

    let path = std::env::temp_dir().join("small_world_example.hspx");
    index.save(&path)?;
    let loaded = SmallWorldIndex::load(&path)?;
    println!(
        "saved {} bytes, reload identical: {}",
        std::fs::metadata(&path).map_err(|e| hsp_core::Error::Config(e.to_string()))?.len(),
        loaded.to_bytes() == index.to_bytes()
    );
    std::fs::remove_file(&path).ok();
    Ok(())
}
