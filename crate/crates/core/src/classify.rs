//! Instance-based classifiers over exact, approximate and HSP
//! neighborhoods, with three voting rules.
//!
//! `exclude` arguments carry the training id of the query when the query
//! is itself a training point; that id is then kept out of every
//! neighborhood. Pass `None` for out-of-sample queries.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hsp::{hsp_neighbors, Neighbor};
use crate::index::{IndexParams, SmallWorldIndex};
use crate::knn::{knn_search, KnnResult};
use crate::metric::LabeledDataset;

/// Weight given to a neighbor at distance zero under inverse-distance voting.
pub const INVERSE_DISTANCE_AT_ZERO: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoteRule {
    Majority,
    Dudani,
    #[serde(rename = "invdist")]
    InverseDistance,
}

impl VoteRule {
    pub const ALL: [VoteRule; 3] = [VoteRule::Majority, VoteRule::Dudani, VoteRule::InverseDistance];

    pub fn name(self) -> &'static str {
        match self {
            VoteRule::Majority => "majority",
            VoteRule::Dudani => "dudani",
            VoteRule::InverseDistance => "invdist",
        }
    }
}

impl fmt::Display for VoteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VoteRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VoteRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown vote rule '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "knn")]
    Knn,
    #[serde(rename = "pknn")]
    ProbabilisticKnn,
    #[serde(rename = "hsp")]
    Hsp,
    #[serde(rename = "ahsp")]
    AsymptoticHsp,
    #[serde(rename = "pahsp")]
    ProbabilisticAsymptoticHsp,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::Knn,
        ClassifierKind::ProbabilisticKnn,
        ClassifierKind::Hsp,
        ClassifierKind::AsymptoticHsp,
        ClassifierKind::ProbabilisticAsymptoticHsp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::ProbabilisticKnn => "pknn",
            ClassifierKind::Hsp => "hsp",
            ClassifierKind::AsymptoticHsp => "ahsp",
            ClassifierKind::ProbabilisticAsymptoticHsp => "pahsp",
        }
    }

    pub fn takes_k(self) -> bool {
        self != ClassifierKind::Hsp
    }

    pub fn uses_index(self) -> bool {
        matches!(
            self,
            ClassifierKind::ProbabilisticKnn | ClassifierKind::ProbabilisticAsymptoticHsp
        )
    }

    pub fn is_hsp_family(self) -> bool {
        matches!(
            self,
            ClassifierKind::Hsp
                | ClassifierKind::AsymptoticHsp
                | ClassifierKind::ProbabilisticAsymptoticHsp
        )
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown classifier '{s}'")))
    }
}

/// A fully specified classifier. Construct with [`ClassifierSpec::new`],
/// which enforces that HSP has no `k`, every other kind has one, and the
/// probabilistic kinds carry index parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierSpec {
    kind: ClassifierKind,
    k: Option<usize>,
    rule: VoteRule,
    index: Option<IndexParams>,
}

impl ClassifierSpec {
    pub fn new(
        kind: ClassifierKind,
        k: Option<usize>,
        rule: VoteRule,
        index: Option<IndexParams>,
    ) -> Result<Self> {
        match (kind.takes_k(), k) {
            (false, Some(_)) => {
                return Err(Error::Config("the hsp classifier takes no k".into()))
            }
            (true, None) | (true, Some(0)) => {
                return Err(Error::Config(format!("{kind} needs k >= 1")))
            }
            _ => {}
        }
        let index = if kind.uses_index() {
            let p = index.ok_or_else(|| Error::Config(format!("{kind} needs index parameters")))?;
            p.validate()?;
            Some(p)
        } else {
            None
        };
        Ok(Self { kind, k, rule, index })
    }

    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn rule(&self) -> VoteRule {
        self.rule
    }

    pub fn index_params(&self) -> Option<&IndexParams> {
        self.index.as_ref()
    }

    /// Classifies one query. Probabilistic kinds need an `index` built
    /// over `dataset`.
    pub fn predict(
        &self,
        dataset: &LabeledDataset,
        index: Option<&SmallWorldIndex>,
        query: &[f32],
        exclude: Option<usize>,
    ) -> Result<Prediction> {
        let need_index = || {
            index.ok_or_else(|| Error::Config(format!("{} needs a built index", self.kind)))
        };
        let k = self.k.unwrap_or(0);
        match self.kind {
            ClassifierKind::Knn => classify_knn(dataset, query, k, self.rule, exclude),
            ClassifierKind::ProbabilisticKnn => {
                classify_probabilistic_knn(need_index()?, dataset, query, k, self.rule, exclude)
            }
            ClassifierKind::Hsp => classify_hsp(dataset, query, self.rule, exclude),
            ClassifierKind::AsymptoticHsp => {
                classify_asymptotic_hsp(dataset, query, k, self.rule, exclude)
            }
            ClassifierKind::ProbabilisticAsymptoticHsp => classify_probabilistic_asymptotic_hsp(
                need_index()?,
                dataset,
                query,
                k,
                self.rule,
                exclude,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    /// Accumulated weight per class seen in the neighborhood.
    pub votes: BTreeMap<usize, f64>,
    /// The neighborhood that voted, ascending by distance.
    pub neighbors: Vec<Neighbor>,
}

/// Per-neighbor vote weights for ascending `distances`.
///
/// Dudani weights fall linearly from 1 at the nearest to 0 at the farthest
/// neighbor, and are all 1 when nearest and farthest coincide.
pub fn vote_weights(distances: &[f64], rule: VoteRule) -> Result<Vec<f64>> {
    if distances.is_empty() {
        return Err(Error::EmptyNeighborhood);
    }
    if let Some(i) = distances.windows(2).position(|w| !matches!(w[0].partial_cmp(&w[1]), Some(Ordering::Less | Ordering::Equal))) {
        return Err(Error::NotAscending { index: i + 1 });
    }
    let weights = match rule {
        VoteRule::Majority => vec![1.0; distances.len()],
        VoteRule::Dudani => {
            let near = distances[0];
            let far = distances[distances.len() - 1];
            if far == near {
                vec![1.0; distances.len()]
            } else {
                distances.iter().map(|d| (far - d) / (far - near)).collect()
            }
        }
        VoteRule::InverseDistance => distances
            .iter()
            .map(|&d| if d == 0.0 { INVERSE_DISTANCE_AT_ZERO } else { 1.0 / d })
            .collect(),
    };
    Ok(weights)
}

/// Weighted vote over a neighborhood. `labels[i]` is the class of
/// `neighbors[i]`. The heaviest class wins; ties go to the class whose
/// nearest supporter is closest, then to the smaller class id.
pub fn tally_and_predict(
    neighbors: &[Neighbor],
    labels: &[usize],
    rule: VoteRule,
) -> Result<Prediction> {
    if neighbors.len() != labels.len() {
        return Err(Error::LabelCountMismatch {
            vectors: neighbors.len(),
            labels: labels.len(),
        });
    }
    let distances: Vec<f64> = neighbors.iter().map(|n| n.dist).collect();
    let weights = vote_weights(&distances, rule)?;
    let mut votes: BTreeMap<usize, f64> = BTreeMap::new();
    let mut nearest: BTreeMap<usize, f64> = BTreeMap::new();
    for ((&label, w), d) in labels.iter().zip(weights).zip(distances) {
        *votes.entry(label).or_insert(0.0) += w;
        nearest.entry(label).or_insert(d);
    }
    let label = votes
        .iter()
        .map(|(&class, &total)| (class, total, nearest[&class]))
        .max_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then(b.2.total_cmp(&a.2))
                .then(b.0.cmp(&a.0))
        })
        .map(|(class, _, _)| class)
        .expect("non-empty");
    Ok(Prediction {
        label,
        votes,
        neighbors: neighbors.to_vec(),
    })
}

/// Votes over any ascending neighborhood of `dataset` ids.
pub fn vote_neighborhood(
    dataset: &LabeledDataset,
    neighbors: &[Neighbor],
    rule: VoteRule,
) -> Result<Prediction> {
    let labels: Vec<usize> = neighbors.iter().map(|n| dataset.label(n.id)).collect();
    tally_and_predict(neighbors, &labels, rule)
}

/// Votes over a precomputed k-NN ball.
pub fn predict_from_ball(dataset: &LabeledDataset, ball: &KnnResult, rule: VoteRule) -> Result<Prediction> {
    vote_neighborhood(dataset, ball.entries(), rule)
}

/// Runs the HSP test inside a precomputed ball, then votes.
pub fn predict_hsp_in_ball(
    dataset: &LabeledDataset,
    query: &[f32],
    ball: &KnnResult,
    rule: VoteRule,
) -> Result<Prediction> {
    let ids: Vec<usize> = ball.ids().collect();
    let nbhd = hsp_neighbors(dataset, query, &ids)?;
    vote_neighborhood(dataset, nbhd.entries(), rule)
}

pub fn classify_knn(
    dataset: &LabeledDataset,
    query: &[f32],
    k: usize,
    rule: VoteRule,
    exclude: Option<usize>,
) -> Result<Prediction> {
    let ball = knn_search(dataset, query, k, exclude)?;
    predict_from_ball(dataset, &ball, rule)
}

/// k-NN vote with neighbors from the small-world index, searched with the
/// index's own `ef_search`.
pub fn classify_probabilistic_knn(
    index: &SmallWorldIndex,
    dataset: &LabeledDataset,
    query: &[f32],
    k: usize,
    rule: VoteRule,
    exclude: Option<usize>,
) -> Result<Prediction> {
    let ball = index.search(dataset, query, k, index.params().ef_search, exclude)?;
    predict_from_ball(dataset, &ball, rule)
}

/// HSP neighborhood over the whole training set, then vote. There is no
/// neighborhood-size parameter.
pub fn classify_hsp(
    dataset: &LabeledDataset,
    query: &[f32],
    rule: VoteRule,
    exclude: Option<usize>,
) -> Result<Prediction> {
    let candidates: Vec<usize> = (0..dataset.len()).filter(|&i| Some(i) != exclude).collect();
    let nbhd = hsp_neighbors(dataset, query, &candidates)?;
    vote_neighborhood(dataset, nbhd.entries(), rule)
}

/// HSP restricted to the exact k-NN ball of the query.
pub fn classify_asymptotic_hsp(
    dataset: &LabeledDataset,
    query: &[f32],
    k: usize,
    rule: VoteRule,
    exclude: Option<usize>,
) -> Result<Prediction> {
    let ball = knn_search(dataset, query, k, exclude)?;
    predict_hsp_in_ball(dataset, query, &ball, rule)
}

/// HSP restricted to the approximate k-NN ball returned by the index.
pub fn classify_probabilistic_asymptotic_hsp(
    index: &SmallWorldIndex,
    dataset: &LabeledDataset,
    query: &[f32],
    k: usize,
    rule: VoteRule,
    exclude: Option<usize>,
) -> Result<Prediction> {
    let ball = index.search(dataset, query, k, index.params().ef_search, exclude)?;
    predict_hsp_in_ball(dataset, query, &ball, rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nb(dists: &[f64]) -> Vec<Neighbor> {
        dists
            .iter()
            .enumerate()
            .map(|(id, &dist)| Neighbor { id, dist })
            .collect()
    }

    #[test]
    fn dudani_weights() {
        assert_eq!(vote_weights(&[1.0, 2.0, 3.0], VoteRule::Dudani).unwrap(), vec![1.0, 0.5, 0.0]);
        assert_eq!(vote_weights(&[2.0, 2.0, 2.0], VoteRule::Dudani).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn inverse_distance_weights() {
        assert_eq!(
            vote_weights(&[1.0, 2.0, 4.0], VoteRule::InverseDistance).unwrap(),
            vec![1.0, 0.5, 0.25]
        );
        assert_eq!(
            vote_weights(&[0.0, 2.0], VoteRule::InverseDistance).unwrap(),
            vec![1e12, 0.5]
        );
    }

    #[test]
    fn majority_is_all_ones() {
        assert_eq!(vote_weights(&[0.0, 3.0, 9.0], VoteRule::Majority).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn weight_errors() {
        assert!(matches!(
            vote_weights(&[2.0, 1.0], VoteRule::Majority),
            Err(Error::NotAscending { index: 1 })
        ));
        assert!(matches!(vote_weights(&[], VoteRule::Dudani), Err(Error::EmptyNeighborhood)));
        assert!(matches!(
            tally_and_predict(&[], &[], VoteRule::Majority),
            Err(Error::EmptyNeighborhood)
        ));
    }

    #[test]
    fn majority_vote() {
        let p = tally_and_predict(&nb(&[1.0, 2.0, 3.0]), &[0, 0, 1], VoteRule::Majority).unwrap();
        assert_eq!(p.label, 0);
        assert_eq!(p.votes[&0], 2.0);
        assert_eq!(p.votes[&1], 1.0);
    }

    #[test]
    fn tie_goes_to_nearest_supporter_then_smaller_class() {
        let p = tally_and_predict(&nb(&[1.0, 1.0]), &[1, 0], VoteRule::Majority).unwrap();
        assert_eq!(p.label, 0);
        let p = tally_and_predict(&nb(&[1.0, 2.0]), &[1, 0], VoteRule::Majority).unwrap();
        assert_eq!(p.label, 1);
    }

    #[test]
    fn dudani_vote() {
        // weights 1, 0.2, 0
        let p = tally_and_predict(&nb(&[1.0, 5.0, 6.0]), &[1, 0, 0], VoteRule::Dudani).unwrap();
        assert_eq!(p.label, 1);
        assert!((p.votes[&0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn single_neighbor_rules_agree() {
        let n = nb(&[0.7]);
        let labels = [3];
        let preds: Vec<usize> = VoteRule::ALL
            .iter()
            .map(|&r| tally_and_predict(&n, &labels, r).unwrap().label)
            .collect();
        assert_eq!(preds, vec![3, 3, 3]);
    }

    #[test]
    fn spec_constraints() {
        use ClassifierKind::*;
        assert!(ClassifierSpec::new(Hsp, Some(3), VoteRule::Majority, None).is_err());
        assert!(ClassifierSpec::new(Hsp, None, VoteRule::Majority, None).is_ok());
        assert!(ClassifierSpec::new(Knn, None, VoteRule::Majority, None).is_err());
        assert!(ClassifierSpec::new(AsymptoticHsp, Some(0), VoteRule::Majority, None).is_err());
        assert!(ClassifierSpec::new(ProbabilisticKnn, Some(3), VoteRule::Majority, None).is_err());
        let s = ClassifierSpec::new(ProbabilisticKnn, Some(3), VoteRule::Dudani, Some(IndexParams::default()))
            .unwrap();
        assert_eq!(s.k(), Some(3));
        let s = ClassifierSpec::new(Knn, Some(3), VoteRule::Majority, Some(IndexParams::default())).unwrap();
        assert!(s.index_params().is_none());
    }

    #[test]
    fn names_round_trip() {
        for k in ClassifierKind::ALL {
            assert_eq!(k.name().parse::<ClassifierKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        for r in VoteRule::ALL {
            assert_eq!(r.name().parse::<VoteRule>().unwrap(), r);
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{}\"", r.name()));
        }
        assert!("knnn".parse::<ClassifierKind>().is_err());
    }

    #[test]
    fn small_hsp_classification() {
        let ds = LabeledDataset::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            vec![0, 0, 1],
            None,
        )
        .unwrap();
        let p = classify_hsp(&ds, &[0.0, 0.0], VoteRule::Majority, None).unwrap();
        let mut ids: Vec<usize> = p.neighbors.iter().map(|n| n.id).collect();
        ids.sort();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(p.label, 0);
    }

    #[test]
    fn singleton_dataset() {
        let ds = LabeledDataset::new(vec![vec![4.0]], vec![2], None).unwrap();
        for r in VoteRule::ALL {
            assert_eq!(classify_hsp(&ds, &[0.0], r, None).unwrap().label, 2);
        }
        assert!(matches!(
            classify_hsp(&ds, &[4.0], VoteRule::Majority, Some(0)),
            Err(Error::EmptyCandidates)
        ));
    }

    #[test]
    fn one_nn_on_top_of_training_point() {
        let ds = LabeledDataset::new(vec![vec![0.0], vec![1.0], vec![2.0]], vec![0, 1, 0], None).unwrap();
        assert_eq!(classify_knn(&ds, &[1.0], 1, VoteRule::Majority, None).unwrap().label, 1);
        let p = classify_knn(&ds, &[1.0], 1, VoteRule::Majority, Some(1)).unwrap();
        assert_eq!(p.label, 0);
        assert!(p.neighbors.iter().all(|n| n.id != 1));
    }
}
