#![allow(dead_code)]

use hsp_core::LabeledDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(n: usize, dim: usize, classes: usize, seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let data: Vec<f32> = (0..n * dim).map(|_| r.random::<f32>()).collect();
    let labels = (0..n).map(|_| r.random_range(0..classes)).collect();
    LabeledDataset::from_flat(dim, data, labels, Some(classes)).unwrap()
}

pub fn gaussian(n: usize, dim: usize, seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let data: Vec<f32> = (0..n * dim).map(|_| r.sample(StandardNormal)).collect();
    LabeledDataset::from_flat(dim, data, vec![0; n], None).unwrap()
}

pub fn random_point(r: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    (0..dim).map(|_| r.random::<f32>()).collect()
}

fn as_f64(p: &[f32]) -> Vec<f64> {
    p.iter().map(|&x| x as f64).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// HSP by explicit half-spaces: candidates are visited nearest first and
/// kept unless they fall in the open half-space `{x : <x, v - q> > (|v|² - |q|²) / 2}`
/// of some kept `v`, i.e. the side of the bisector of `q` and `v` that
/// contains `v`.
pub fn hsp_oracle(ds: &LabeledDataset, query: &[f32], candidates: &[usize]) -> Vec<usize> {
    let q = as_f64(query);
    let qq = dot(&q, &q);
    let mut order: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&c| (dist2(&as_f64(ds.point(c)), &q), c))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    order.dedup_by_key(|e| e.1);
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut kept = Vec::new();
    for (_, c) in order {
        let pc = as_f64(ds.point(c));
        if planes.iter().any(|(w, b)| dot(&pc, w) > *b) {
            continue;
        }
        let normal: Vec<f64> = pc.iter().zip(&q).map(|(v, q)| v - q).collect();
        planes.push((normal, (dot(&pc, &pc) - qq) / 2.0));
        kept.push(c);
    }
    kept
}

/// Nearest candidate by brute force, smaller id on ties.
pub fn nearest(ds: &LabeledDataset, query: &[f32], candidates: &[usize]) -> usize {
    let q = as_f64(query);
    *candidates
        .iter()
        .min_by(|&&a, &&b| {
            dist2(&as_f64(ds.point(a)), &q)
                .partial_cmp(&dist2(&as_f64(ds.point(b)), &q))
                .unwrap()
                .then(a.cmp(&b))
        })
        .unwrap()
}

/// Sorts every id by (distance, id) and keeps the first `k`.
pub fn sort_all_knn(ds: &LabeledDataset, query: &[f32], k: usize, exclude: Option<usize>) -> Vec<usize> {
    let q = as_f64(query);
    let mut all: Vec<(f64, usize)> = (0..ds.len())
        .filter(|&i| Some(i) != exclude)
        .map(|i| (dist2(&as_f64(ds.point(i)), &q), i))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|e| e.1).collect()
}

/// Plain majority over the first `k` sorted ids; ties to the class whose
/// first supporter comes earliest, which is the nearest-supporter rule.
pub fn reference_knn_label(ds: &LabeledDataset, query: &[f32], k: usize, exclude: Option<usize>) -> usize {
    let ids = sort_all_knn(ds, query, k, exclude);
    let mut counts = vec![0usize; ds.num_classes()];
    let mut first = vec![usize::MAX; ds.num_classes()];
    for (rank, &i) in ids.iter().enumerate() {
        let l = ds.label(i);
        counts[l] += 1;
        first[l] = first[l].min(rank);
    }
    (0..ds.num_classes())
        .filter(|&c| counts[c] > 0)
        .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(first[b].cmp(&first[a])))
        .unwrap()
}

/// The synthetic benchmark used across the classifier tests: ten
/// unit-variance Gaussian classes in 32 dimensions, means 4 apart.
pub fn gaussian_benchmark(points_per_class: usize, seed: u64) -> LabeledDataset {
    use hsp_core::bench::{generate_synthetic, GeneratorKind, GeneratorSpec};
    generate_synthetic(&GeneratorSpec {
        kind: GeneratorKind::GaussianMixture,
        num_classes: 10,
        points_per_class,
        dimension: 32,
        class_separation: BENCHMARK_SEPARATION,
        seed,
    })
    .unwrap()
}

pub const BENCHMARK_SEPARATION: f64 = 4.0;

/// Splits off the first `test` ids as queries (generator output is already
/// class-interleaved and i.i.d.).
pub fn holdout(ds: &LabeledDataset, test: usize) -> (LabeledDataset, Vec<(Vec<f32>, usize)>) {
    let train_ids: Vec<usize> = (test..ds.len()).collect();
    let queries = (0..test).map(|i| (ds.point(i).to_vec(), ds.label(i))).collect();
    (ds.subset(&train_ids).unwrap(), queries)
}

pub fn accuracy<F: Fn(&[f32]) -> usize>(queries: &[(Vec<f32>, usize)], f: F) -> f64 {
    let hits = queries.iter().filter(|(q, l)| f(q) == *l).count();
    hits as f64 * 100.0 / queries.len() as f64
}
