//! Builds the HSP graph of random points in the unit square and checks
//! its graph properties: out-degree, MST containment and stretch.
//!
//!     cargo run --release --example hsp_graph -- [n=300] [seed=1]

use hsp_core::hsp::{empirical_stretch, out_degree_stats, verify_mst_containment};
use hsp_core::{build_hsp_graph, LabeledDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hsp_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(300, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f32> = (0..2 * n).map(|_| rng.random()).collect();
    let ds = LabeledDataset::from_flat(2, data, vec![0; n], None)?;

    let graph = build_hsp_graph(&ds)?;
    let deg = out_degree_stats(&graph)?;
    println!("out-degree: min {} max {} mean {:.2}", deg.min, deg.max, deg.mean);
    let mst = verify_mst_containment(&graph, &ds);
    println!(
        "MST edges contained: {}/{}",
        mst.mst_edges.len() - mst.missing.len(),
        mst.mst_edges.len()
    );
    println!("undirected edges: {}", graph.undirected_edges().len());
    println!("max stretch: {:.4} (bound 2π+1 = {:.4})", empirical_stretch(&graph, &ds)?, 2.0 * std::f64::consts::PI + 1.0);

    println!("first rows of the adjacency file:");
    let mut buf = Vec::new();
    graph.write_adjacency(&mut buf).expect("write to memory");
    for line in String::from_utf8_lossy(&buf).lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
