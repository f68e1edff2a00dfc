//! The HSP test on a handful of 2D points: which candidates survive, and
//! how the result compares with the k nearest neighbors.
//!
//!     cargo run --example hsp_neighborhood

use hsp_core::{hsp_neighbors, knn_search, LabeledDataset};

fn main() -> hsp_core::Result<()> {
    // A tight cluster to the east, two lone points north and south-west.
    let points = vec![
        vec![1.0, 0.0],
        vec![1.2, 0.1],
        vec![1.3, -0.2],
        vec![1.5, 0.0],
        vec![0.0, 2.0],
        vec![-1.5, -1.5],
        vec![0.2, 2.6],
    ];
    let ds = LabeledDataset::new(points, vec![0; 7], None)?;
    let query = [0.0, 0.0];
    let all: Vec<usize> = (0..ds.len()).collect();

    let hsp = hsp_neighbors(&ds, &query, &all)?;
    println!("HSP neighbors of {query:?}:");
    for n in hsp.entries() {
        println!("  id {} at {:?}, distance {:.3}", n.id, ds.point(n.id), n.dist);
    }

    // Three nearest are all in the east cluster; HSP keeps one point per direction.
    let knn = knn_search(&ds, &query, hsp.len(), None)?;
    println!("{} nearest: {:?}", hsp.len(), knn.ids().collect::<Vec<_>>());
    Ok(())
}
