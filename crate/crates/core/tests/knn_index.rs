mod common;

use common::{gaussian, rng, sort_all_knn, uniform};
use hsp_core::index::recall_at_k;
use hsp_core::{knn_search, IndexParams, LabeledDataset, SmallWorldIndex};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn knn_matches_sort_all_oracle() {
    let ds = gaussian(2000, 32, 1);
    let mut r = rng(2);
    for _ in 0..100 {
        let q: Vec<f32> = (0..32).map(|_| r.sample(StandardNormal)).collect();
        let got: Vec<usize> = knn_search(&ds, &q, 10, None).unwrap().ids().collect();
        assert_eq!(got, sort_all_knn(&ds, &q, 10, None));
    }
}

#[test]
fn knn_tie_order_on_integer_grid() {
    let pts: Vec<Vec<f32>> = (0..49).map(|i| vec![(i % 7) as f32, (i / 7) as f32]).collect();
    let ds = LabeledDataset::new(pts, vec![0; 49], None).unwrap();
    for k in [1, 5, 13, 49] {
        let got: Vec<usize> = knn_search(&ds, &[3.0, 3.0], k, None).unwrap().ids().collect();
        assert_eq!(got, sort_all_knn(&ds, &[3.0, 3.0], k, None));
    }
    let full = knn_search(&ds, &[3.0, 3.0], 49, Some(24)).unwrap();
    assert_eq!(full.len(), 48);
    assert!(full.ids().all(|i| i != 24));
}

proptest! {
    #[test]
    fn smaller_k_is_a_prefix(seed in 0u64..1000, k in 1usize..40) {
        let ds = uniform(40, 3, 1, seed);
        let q = [0.5f32, 0.5, 0.5];
        let all = knn_search(&ds, &q, 40, None).unwrap();
        let some = knn_search(&ds, &q, k, None).unwrap();
        prop_assert_eq!(some, all.prefix(k));
    }
}

fn default_index(ds: &LabeledDataset) -> SmallWorldIndex {
    SmallWorldIndex::build(ds, IndexParams::default()).unwrap()
}

#[test]
fn level0_is_connected_on_gaussian_1000() {
    let ds = gaussian(1000, 16, 4);
    let idx = default_index(&ds);
    assert_eq!(idx.level0_reachable(), 1000);
}

#[test]
fn build_is_byte_deterministic_and_round_trips() {
    let ds = gaussian(800, 16, 5);
    let a = default_index(&ds);
    let b = default_index(&ds);
    assert_eq!(a.to_bytes(), b.to_bytes());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("idx.hspx");
    a.save(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"HSPX");
    assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
    let c = SmallWorldIndex::load(&path).unwrap();
    let mut r = rng(6);
    for _ in 0..50 {
        let q: Vec<f32> = (0..16).map(|_| r.sample(StandardNormal)).collect();
        assert_eq!(
            a.search(&ds, &q, 10, 50, None).unwrap(),
            c.search(&ds, &q, 10, 50, None).unwrap()
        );
    }
    let other = SmallWorldIndex::build(
        &ds,
        IndexParams {
            seed: 1,
            ..Default::default()
        },
    )
    .unwrap();
    assert_ne!(other.to_bytes(), a.to_bytes());
}

#[test]
fn indexed_points_find_themselves() {
    // Not guaranteed by closest-M linking: a node can lose all in-links to
    // pruning, or greedy descent can stall. Exact on this graph, rare
    // elsewhere.
    let ds = gaussian(1000, 16, 4);
    let idx = default_index(&ds);
    assert_eq!(idx.level0_reachable(), 1000);
    for i in 0..1000 {
        let r = idx.search(&ds, ds.point(i), 1, 100, None).unwrap();
        assert_eq!((r.entries()[0].id, r.entries()[0].dist), (i, 0.0));
    }
    let mut misses = 0;
    for seed in 20..25 {
        let ds = gaussian(1000, 16, seed);
        let idx = default_index(&ds);
        misses += (0..1000)
            .filter(|&i| idx.search(&ds, ds.point(i), 1, 100, None).unwrap().entries()[0].id != i)
            .count();
    }
    assert!(misses <= 25, "{misses} of 5000 self-queries missed");
}

#[test]
fn full_beam_equals_exact_search() {
    let ds = gaussian(600, 8, 8);
    let idx = default_index(&ds);
    assert_eq!(idx.level0_reachable(), 600);
    let mut r = rng(9);
    for _ in 0..40 {
        let q: Vec<f32> = (0..8).map(|_| r.sample(StandardNormal)).collect();
        for k in [1, 10, 100] {
            assert_eq!(
                idx.search(&ds, &q, k, 600, None).unwrap(),
                knn_search(&ds, &q, k, None).unwrap()
            );
        }
    }
    let qs: Vec<Vec<f32>> = (0..20).map(|i| ds.point(i).to_vec()).collect();
    assert_eq!(recall_at_k(&idx, &ds, &qs, 1, 100).unwrap(), 1.0);
    assert_eq!(recall_at_k(&idx, &ds, &qs, 10, 600).unwrap(), 1.0);
}

#[test]
fn recall_is_monotone_in_ef_on_standard_dataset() {
    let ds = gaussian(3000, 16, 10);
    let idx = default_index(&ds);
    let mut r = rng(11);
    let qs: Vec<Vec<f32>> = (0..200)
        .map(|_| (0..16).map(|_| r.sample(StandardNormal)).collect())
        .collect();
    let mut last = 0.0;
    for ef in [10, 20, 50, 100, 200, 3000] {
        let rec = recall_at_k(&idx, &ds, &qs, 10, ef).unwrap();
        assert!(rec >= last, "ef {ef}: {rec} < {last}");
        last = rec;
    }
    assert_eq!(last, 1.0);
}

#[test]
fn distant_clusters_with_tiny_beam() {
    // two blobs 1000 apart; recall can drop but never exceeds 1
    let mut r = rng(12);
    let mut pts = Vec::new();
    for c in 0..2 {
        for _ in 0..200 {
            let x: f32 = r.sample(StandardNormal);
            let y: f32 = r.sample(StandardNormal);
            pts.push(vec![x + 1000.0 * c as f32, y]);
        }
    }
    let ds = LabeledDataset::new(pts, vec![0; 400], None).unwrap();
    let idx = SmallWorldIndex::build(
        &ds,
        IndexParams {
            max_neighbors: 2,
            ef_construction: 4,
            ..Default::default()
        },
    )
    .unwrap();
    let qs: Vec<Vec<f32>> = (0..400).step_by(7).map(|i| ds.point(i).to_vec()).collect();
    let rec = recall_at_k(&idx, &ds, &qs, 10, 1).unwrap();
    assert!((0.0..=1.0).contains(&rec));
}
