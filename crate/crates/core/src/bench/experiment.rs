use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::load_dataset;
use super::report::{AccuracyReport, ReportRow};
use super::synth::{generate_synthetic, GeneratorSpec};
use crate::classify::{vote_neighborhood, ClassifierKind, VoteRule};
use crate::error::{Error, Result};
use crate::hsp::{hsp_neighbors, Neighbor};
use crate::index::{IndexParams, SmallWorldIndex};
use crate::knn::{knn_search, KnnResult};
use crate::metric::LabeledDataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Fvecs { vectors: PathBuf, labels: PathBuf },
    Csv(PathBuf),
    Synthetic(GeneratorSpec),
}

impl DataSource {
    pub fn load(&self) -> Result<LabeledDataset> {
        match self {
            DataSource::Fvecs { vectors, labels } => load_dataset(vectors, Some(labels)),
            DataSource::Csv(path) => load_dataset(path, None),
            DataSource::Synthetic(spec) => generate_synthetic(spec),
        }
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match self {
            DataSource::Fvecs { vectors, labels } => {
                fix(vectors);
                fix(labels);
            }
            DataSource::Csv(path) => fix(path),
            DataSource::Synthetic(_) => {}
        }
    }
}

fn default_test_count() -> usize {
    1000
}

fn default_k_min() -> usize {
    1
}

fn default_k_max() -> usize {
    300
}

fn default_classifiers() -> Vec<ClassifierKind> {
    ClassifierKind::ALL.to_vec()
}

fn default_rules() -> Vec<VoteRule> {
    VoteRule::ALL.to_vec()
}

/// A k-sweep experiment. Defaults follow the reference protocol: 1000
/// test queries, `k` from 1 to 300, all classifiers and rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataSource,
    #[serde(default = "default_test_count")]
    pub test_sample_count: usize,
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_classifiers")]
    pub classifiers: Vec<ClassifierKind>,
    #[serde(default = "default_rules")]
    pub rules: Vec<VoteRule>,
    #[serde(default)]
    pub index: IndexParams,
    #[serde(default)]
    pub seed: u64,
    /// Fill the `elapsed_ms` column. Off by default so that reports are
    /// byte-reproducible.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Reads a JSON config; relative data and output paths resolve against
    /// the config file's directory.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            cfg.data.rebase(dir);
            cfg.out = cfg.out.map(|o| dir.join(o));
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_min == 0 || self.k_max < self.k_min {
            return Err(Error::Config(format!(
                "need 1 <= k_min <= k_max, got {}..{}",
                self.k_min, self.k_max
            )));
        }
        if self.test_sample_count == 0 {
            return Err(Error::Config("test_sample_count must be positive".into()));
        }
        if self.classifiers.is_empty() || self.rules.is_empty() {
            return Err(Error::Config("need at least one classifier and one rule".into()));
        }
        if self.classifiers.iter().any(|c| c.uses_index()) {
            self.index.validate()?;
        }
        Ok(())
    }
}

/// Seeded sample of `test_count` ids without replacement. Returns
/// `(test, train)`, both ascending and disjoint.
pub fn split_test_train(n: usize, test_count: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if test_count >= n {
        return Err(Error::Config(format!(
            "test_sample_count {test_count} must be below the dataset size {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test = rand::seq::index::sample(&mut rng, n, test_count).into_vec();
    test.sort_unstable();
    let mut is_test = vec![false; n];
    for &t in &test {
        is_test[t] = true;
    }
    let train = (0..n).filter(|&i| !is_test[i]).collect();
    Ok((test, train))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<AccuracyReport> {
    config.validate()?;
    let dataset = config.data.load()?;
    let report = run_on_dataset(&dataset, config)?;
    if let Some(out) = &config.out {
        report.write_csv(out)?;
    }
    Ok(report)
}

type Cell = (ClassifierKind, VoteRule, Option<usize>);

/// Runs the sweep on an already loaded dataset (`config.data` is ignored).
///
/// Every k-NN ball comes from one search per query at `k_max`, cut down
/// to each `k`; approximate balls likewise come from one beam of width
/// `ef_search` while `k <= ef_search`. Both shortcuts return exactly what
/// a fresh search with that `k` would.
pub fn run_on_dataset(dataset: &LabeledDataset, config: &ExperimentConfig) -> Result<AccuracyReport> {
    config.validate()?;
    let (test_ids, train_ids) = split_test_train(dataset.len(), config.test_sample_count, config.seed)?;
    let train = dataset.subset(&train_ids)?;
    let queries: Vec<(&[f32], usize)> = test_ids
        .iter()
        .map(|&i| (dataset.point(i), dataset.label(i)))
        .collect();

    let mut kinds: Vec<ClassifierKind> = Vec::new();
    for &k in &config.classifiers {
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    let mut rules: Vec<VoteRule> = Vec::new();
    for &r in &config.rules {
        if !rules.contains(&r) {
            rules.push(r);
        }
    }

    let needs_exact = kinds
        .iter()
        .any(|k| matches!(k, ClassifierKind::Knn | ClassifierKind::AsymptoticHsp));
    let exact_balls: Vec<KnnResult> = if needs_exact {
        queries
            .par_iter()
            .map(|(q, _)| knn_search(&train, q, config.k_max, None))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let index = if kinds.iter().any(|k| k.uses_index()) {
        Some(SmallWorldIndex::build(&train, config.index)?)
    } else {
        None
    };
    let ef = config.index.ef_search;
    let ann_base: Vec<KnnResult> = match &index {
        Some(idx) => queries
            .par_iter()
            .map(|(q, _)| idx.search(&train, q, ef, ef, None))
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };

    let mut results: HashMap<Cell, (usize, u64)> = HashMap::new();
    let mut record = |kind: ClassifierKind, k: Option<usize>, hits: Vec<Vec<bool>>, ms: u64| {
        for (r, &rule) in rules.iter().enumerate() {
            let correct = hits.iter().filter(|h| h[r]).count();
            results.insert((kind, rule, k), (correct, ms));
        }
    };
    let judge = |neighbors: &[Neighbor], truth: usize| -> Result<Vec<bool>> {
        rules
            .iter()
            .map(|&rule| Ok(vote_neighborhood(&train, neighbors, rule)?.label == truth))
            .collect()
    };

    if kinds.contains(&ClassifierKind::Hsp) {
        let start = Instant::now();
        let all: Vec<usize> = (0..train.len()).collect();
        let hits = queries
            .par_iter()
            .map(|&(q, truth)| judge(hsp_neighbors(&train, q, &all)?.entries(), truth))
            .collect::<Result<Vec<_>>>()?;
        record(ClassifierKind::Hsp, None, hits, elapsed_ms(start));
    }

    for k in config.k_min..=config.k_max {
        for &kind in kinds.iter().filter(|k| k.takes_k()) {
            let start = Instant::now();
            let hits = queries
                .par_iter()
                .enumerate()
                .map(|(qi, &(q, truth))| {
                    let ball = match kind {
                        ClassifierKind::Knn | ClassifierKind::AsymptoticHsp => exact_balls[qi].prefix(k),
                        _ if k <= ef => ann_base[qi].prefix(k),
                        _ => index
                            .as_ref()
                            .expect("index built for probabilistic kinds")
                            .search(&train, q, k, ef, None)?,
                    };
                    match kind {
                        ClassifierKind::Knn | ClassifierKind::ProbabilisticKnn => {
                            judge(ball.entries(), truth)
                        }
                        _ => {
                            let ids: Vec<usize> = ball.ids().collect();
                            judge(hsp_neighbors(&train, q, &ids)?.entries(), truth)
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            record(kind, Some(k), hits, elapsed_ms(start));
        }
    }

    let n_test = queries.len();
    let mut rows = Vec::new();
    for &kind in &kinds {
        let ks: Vec<Option<usize>> = if kind.takes_k() {
            (config.k_min..=config.k_max).map(Some).collect()
        } else {
            vec![None]
        };
        for &rule in &rules {
            for &k in &ks {
                let (correct, ms) = results[&(kind, rule, k)];
                rows.push(ReportRow {
                    classifier: kind,
                    rule,
                    k,
                    accuracy: correct as f64 * 100.0 / n_test as f64,
                    n_test,
                    n_train: train.len(),
                    dim: dataset.dimension(),
                    seed: config.seed,
                    elapsed_ms: config.record_timing.then_some(ms),
                });
            }
        }
    }
    Ok(AccuracyReport { rows })
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}
