//! Exact k-nearest-neighbor search by linear scan.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::hsp::Neighbor;
use crate::metric::{squared_distance, LabeledDataset};

/// `(squared distance, id)` with the crate-wide total order: distance
/// first, then smaller id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ranked {
    pub d2: f64,
    pub id: usize,
}

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2.total_cmp(&other.d2).then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Neighbors ascending by distance, equal distances by ascending id.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnResult {
    pub k: usize,
    entries: Vec<Neighbor>,
}

impl KnnResult {
    pub(crate) fn from_ranked(k: usize, ranked: impl IntoIterator<Item = Ranked>) -> Self {
        let entries = ranked
            .into_iter()
            .map(|r| Neighbor {
                id: r.id,
                dist: r.d2.sqrt(),
            })
            .collect();
        Self { k, entries }
    }

    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|n| n.id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The first `k` entries, which is exactly what a search with the
    /// smaller `k` would have returned.
    pub fn prefix(&self, k: usize) -> KnnResult {
        KnnResult {
            k,
            entries: self.entries[..k.min(self.entries.len())].to_vec(),
        }
    }
}

/// Exact top-`k` by `(distance, id)`. Asking for more than the dataset
/// holds returns everything. `exclude` drops one id (self-match).
pub fn knn_search(
    dataset: &LabeledDataset,
    query: &[f32],
    k: usize,
    exclude: Option<usize>,
) -> Result<KnnResult> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    dataset.check_query(query)?;
    let mut heap = BinaryHeap::with_capacity(k + 1);
    for (id, p) in dataset.points().enumerate() {
        if Some(id) == exclude {
            continue;
        }
        let r = Ranked {
            d2: squared_distance(p, query),
            id,
        };
        if heap.len() < k {
            heap.push(r);
        } else if r < *heap.peek().expect("k >= 1") {
            heap.pop();
            heap.push(r);
        }
    }
    Ok(KnnResult::from_ranked(k, heap.into_sorted_vec()))
}
