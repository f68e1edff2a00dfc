//! Points, labeled corpora and the Euclidean distance kernel.
//!
//! Components are stored as `f32` (the width of the usual feature-file
//! formats) and distances are accumulated in `f64` in index order, so a
//! given build produces bit-identical distances for the same inputs.

use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One point of the metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub id: usize,
    components: Vec<f32>,
}

impl FeatureVector {
    pub fn new(id: usize, components: Vec<f32>) -> Result<Self> {
        check_components(id, &components)?;
        Ok(Self { id, components })
    }

    pub fn components(&self) -> &[f32] {
        &self.components
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn into_components(self) -> Vec<f32> {
        self.components
    }
}

impl AsRef<[f32]> for FeatureVector {
    fn as_ref(&self) -> &[f32] {
        &self.components
    }
}

fn check_components(id: usize, components: &[f32]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::ZeroDimension);
    }
    if let Some(index) = components.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite { id, index });
    }
    Ok(())
}

/// Squared Euclidean distance, no dimension check.
///
/// Every ordering decision in the crate goes through this function; the
/// square root is only taken for reported distances.
#[inline]
pub fn squared_distance(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let d = x as f64 - y as f64;
        acc += d * d;
    }
    acc
}

/// Euclidean distance between two vectors of equal dimension.
pub fn distance(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(squared_distance(a, b).sqrt())
}

/// Immutable training corpus. Ids are `0..len()` in storage order.
#[derive(Debug)]
pub struct LabeledDataset {
    dimension: usize,
    data: Vec<f32>,
    labels: Vec<usize>,
    num_classes: usize,
    fingerprint: OnceLock<u64>,
}

impl Clone for LabeledDataset {
    fn clone(&self) -> Self {
        Self {
            dimension: self.dimension,
            data: self.data.clone(),
            labels: self.labels.clone(),
            num_classes: self.num_classes,
            fingerprint: self.fingerprint.clone(),
        }
    }
}

impl PartialEq for LabeledDataset {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension
            && self.num_classes == other.num_classes
            && self.labels == other.labels
            && self.data == other.data
    }
}

impl LabeledDataset {
    /// Builds a dataset from row vectors. `num_classes` defaults to one more
    /// than the largest label.
    pub fn new(
        vectors: Vec<Vec<f32>>,
        labels: Vec<usize>,
        num_classes: Option<usize>,
    ) -> Result<Self> {
        let dimension = vectors.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(dimension * vectors.len());
        for v in &vectors {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: v.len(),
                });
            }
            data.extend_from_slice(v);
        }
        Self::from_flat(dimension, data, labels, num_classes)
    }

    pub fn from_feature_vectors(
        vectors: Vec<FeatureVector>,
        labels: Vec<usize>,
        num_classes: Option<usize>,
    ) -> Result<Self> {
        Self::new(
            vectors.into_iter().map(FeatureVector::into_components).collect(),
            labels,
            num_classes,
        )
    }

    /// Builds a dataset from row-major storage.
    pub fn from_flat(
        dimension: usize,
        data: Vec<f32>,
        labels: Vec<usize>,
        num_classes: Option<usize>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if dimension == 0 {
            return Err(Error::ZeroDimension);
        }
        if !data.len().is_multiple_of(dimension) {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: data.len() % dimension,
            });
        }
        let n = data.len() / dimension;
        if n != labels.len() {
            return Err(Error::LabelCountMismatch {
                vectors: n,
                labels: labels.len(),
            });
        }
        for (id, row) in data.chunks_exact(dimension).enumerate() {
            check_components(id, row)?;
        }
        let max_label = labels.iter().copied().max().unwrap_or(0);
        let num_classes = num_classes.unwrap_or(max_label + 1);
        if let Some(index) = labels.iter().position(|&l| l >= num_classes) {
            return Err(Error::LabelOutOfRange {
                index,
                label: labels[index],
                num_classes,
            });
        }
        Ok(Self {
            dimension,
            data,
            labels,
            num_classes,
            fingerprint: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> usize {
        self.labels[id]
    }

    /// Components of point `id`. Panics if `id` is out of range.
    #[inline]
    pub fn point(&self, id: usize) -> &[f32] {
        &self.data[id * self.dimension..(id + 1) * self.dimension]
    }

    pub fn feature_vector(&self, id: usize) -> FeatureVector {
        FeatureVector {
            id,
            components: self.point(id).to_vec(),
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dimension)
    }

    pub fn as_flat(&self) -> &[f32] {
        &self.data
    }

    pub fn check_query(&self, query: &[f32]) -> Result<()> {
        if query.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: query.len(),
            });
        }
        Ok(())
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        if id >= self.len() {
            return Err(Error::IdOutOfRange { id, len: self.len() });
        }
        Ok(())
    }

    /// New dataset made of the given ids, re-numbered `0..ids.len()` in the
    /// order given. Keeps `num_classes`.
    pub fn subset(&self, ids: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(ids.len() * self.dimension);
        let mut labels = Vec::with_capacity(ids.len());
        for &id in ids {
            self.check_id(id)?;
            data.extend_from_slice(self.point(id));
            labels.push(self.labels[id]);
        }
        Self::from_flat(self.dimension, data, labels, Some(self.num_classes))
    }

    /// Content hash over dimension and raw component bits. Labels are not
    /// part of it: an index only depends on geometry.
    pub fn fingerprint(&self) -> u64 {
        *self.fingerprint.get_or_init(|| {
            let mut hasher = Sha256::new();
            hasher.update((self.len() as u64).to_le_bytes());
            hasher.update((self.dimension as u64).to_le_bytes());
            for c in &self.data {
                hasher.update(c.to_bits().to_le_bytes());
            }
            let digest = hasher.finalize();
            u64::from_le_bytes(digest[..8].try_into().expect("sha256 is 32 bytes"))
        })
    }
}
