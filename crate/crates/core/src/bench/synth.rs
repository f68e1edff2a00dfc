use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::LabeledDataset;

/// Standard deviation of the noise added to the two-moons arcs.
pub const MOON_NOISE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Unit-variance isotropic Gaussians whose means are pairwise
    /// `class_separation` apart.
    GaussianMixture,
    /// Two interleaved half circles in the first two coordinates; extra
    /// coordinates carry noise only. `class_separation` pushes the lower
    /// moon down.
    TwoMoons,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub num_classes: usize,
    pub points_per_class: usize,
    pub dimension: usize,
    pub class_separation: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_classes == 0 || self.points_per_class == 0 || self.dimension == 0 {
            return Err(Error::Config("generator counts must be positive".into()));
        }
        if !(self.class_separation >= 0.0 && self.class_separation.is_finite()) {
            return Err(Error::Config("class_separation must be finite and >= 0".into()));
        }
        if self.kind == GeneratorKind::TwoMoons && (self.num_classes != 2 || self.dimension < 2) {
            return Err(Error::Config("two_moons needs 2 classes and dimension >= 2".into()));
        }
        Ok(())
    }
}

/// Seeded synthetic corpus. Points are emitted round-robin over classes,
/// so the labels of ids `0, 1, 2, ...` cycle through `0..num_classes`.
pub fn generate_synthetic(spec: &GeneratorSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.num_classes * spec.points_per_class;
    let dim = spec.dimension;
    let mut data = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    match spec.kind {
        GeneratorKind::GaussianMixture => {
            let means = class_means(spec, &mut rng);
            for _ in 0..spec.points_per_class {
                for (class, mean) in means.iter().enumerate() {
                    for &m in mean {
                        let z: f64 = rng.sample(StandardNormal);
                        data.push((m + z) as f32);
                    }
                    labels.push(class);
                }
            }
        }
        GeneratorKind::TwoMoons => {
            let noise = Normal::new(0.0, MOON_NOISE).expect("valid sigma");
            for _ in 0..spec.points_per_class {
                for class in 0..2 {
                    let t = rng.random_range(0.0..std::f64::consts::PI);
                    let (x, y) = if class == 0 {
                        (t.cos(), t.sin())
                    } else {
                        (1.0 - t.cos(), 0.5 - t.sin() - spec.class_separation)
                    };
                    data.push((x + noise.sample(&mut rng)) as f32);
                    data.push((y + noise.sample(&mut rng)) as f32);
                    for _ in 2..dim {
                        data.push(noise.sample(&mut rng) as f32);
                    }
                    labels.push(class);
                }
            }
        }
    }
    LabeledDataset::from_flat(dim, data, labels, Some(spec.num_classes))
}

/// Means at `s / sqrt(2)` along distinct axes (pairwise distance exactly
/// `s`). With more classes than axes the directions are random unit
/// vectors instead, which are only approximately orthogonal.
fn class_means(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let radius = spec.class_separation / std::f64::consts::SQRT_2;
    (0..spec.num_classes)
        .map(|c| {
            let mut dir = vec![0.0; spec.dimension];
            if spec.num_classes <= spec.dimension {
                dir[c] = 1.0;
            } else {
                for d in dir.iter_mut() {
                    *d = rng.sample(StandardNormal);
                }
                let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                dir.iter_mut().for_each(|d| *d /= norm);
            }
            dir.into_iter().map(|d| d * radius).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: GeneratorKind) -> GeneratorSpec {
        GeneratorSpec {
            kind,
            num_classes: 2,
            points_per_class: 50,
            dimension: 4,
            class_separation: 3.0,
            seed: 11,
        }
    }

    #[test]
    fn deterministic() {
        for kind in [GeneratorKind::GaussianMixture, GeneratorKind::TwoMoons] {
            let a = generate_synthetic(&spec(kind)).unwrap();
            let b = generate_synthetic(&spec(kind)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), 100);
            assert_eq!(a.dimension(), 4);
            assert_eq!(&a.labels()[..4], &[0, 1, 0, 1]);
        }
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec(GeneratorKind::TwoMoons);
        s.num_classes = 3;
        assert!(generate_synthetic(&s).is_err());
        let mut s = spec(GeneratorKind::GaussianMixture);
        s.class_separation = -1.0;
        assert!(generate_synthetic(&s).is_err());
        s.class_separation = 1.0;
        s.points_per_class = 0;
        assert!(generate_synthetic(&s).is_err());
    }

    #[test]
    fn means_are_separated() {
        let mut s = spec(GeneratorKind::GaussianMixture);
        s.class_separation = 10.0;
        s.points_per_class = 2000;
        let ds = generate_synthetic(&s).unwrap();
        let mut centroid = [[0.0f64; 4]; 2];
        for (i, p) in ds.points().enumerate() {
            for d in 0..4 {
                centroid[ds.label(i)][d] += p[d] as f64 / 2000.0;
            }
        }
        let gap: f64 = (0..4)
            .map(|d| (centroid[0][d] - centroid[1][d]).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((gap - 10.0).abs() < 0.2, "{gap}");
    }
}
