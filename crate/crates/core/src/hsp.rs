//! Half-space proximal neighbor selection and the graph it induces.
//!
//! Starting from all candidates, the nearest remaining candidate `v` is
//! taken (ties go to the smaller id) and every candidate `c` lying strictly
//! closer to `v` than to the center is discarded. The loop ends when no
//! candidate remains. No count or radius is involved anywhere: the size of
//! the neighborhood falls out of the geometry.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, BufRead, Write};

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{squared_distance, LabeledDataset};

/// A selected point and its (rooted) distance to the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub dist: f64,
}

/// Neighbors in selection order. Distances are non-decreasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Neighborhood {
    entries: Vec<Neighbor>,
}

impl Neighborhood {
    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|n| n.id)
    }

    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|n| n.dist)
    }

    pub fn into_entries(self) -> Vec<Neighbor> {
        self.entries
    }
}

/// Runs the HSP test for `query` against `candidates` (ids into `dataset`).
///
/// Duplicate ids in `candidates` are ignored. A candidate that coincides
/// with the query is selected first and eliminates nothing, since every
/// other point is equidistant from the two.
pub fn hsp_neighbors(
    dataset: &LabeledDataset,
    query: &[f32],
    candidates: &[usize],
) -> Result<Neighborhood> {
    dataset.check_query(query)?;
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut ids = candidates.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if let Some(&last) = ids.last() {
        dataset.check_id(last)?;
    }
    let alive = ids
        .into_iter()
        .map(|id| (id, squared_distance(dataset.point(id), query)))
        .collect();
    let nbhd = select(dataset, alive);
    #[cfg(debug_assertions)]
    if let Err(v) = check_neighborhood(dataset, query, candidates, &nbhd) {
        panic!("HSP invariant broken: {v}");
    }
    Ok(nbhd)
}

/// Core loop over `(id, squared distance to center)` pairs.
fn select(dataset: &LabeledDataset, mut alive: Vec<(usize, f64)>) -> Neighborhood {
    let mut entries = Vec::new();
    while !alive.is_empty() {
        let mut best = 0;
        for (i, &(id, d)) in alive.iter().enumerate().skip(1) {
            let (bid, bd) = alive[best];
            if d < bd || (d == bd && id < bid) {
                best = i;
            }
        }
        let (v, dv) = alive.swap_remove(best);
        entries.push(Neighbor { id: v, dist: dv.sqrt() });
        let pv = dataset.point(v);
        alive.retain(|&(c, dcq)| dcq <= squared_distance(dataset.point(c), pv));
    }
    Neighborhood { entries }
}

/// A broken HSP invariant, as reported by [`check_neighborhood`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    UnknownId(usize),
    RepeatedId(usize),
    DistanceMismatch { id: usize },
    NotNondecreasing { position: usize },
    FirstNotNearest { expected: usize, found: usize },
    Shadowed { earlier: usize, later: usize },
    Unexplained { candidate: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty neighborhood for a non-empty candidate set"),
            Violation::UnknownId(id) => write!(f, "id {id} is not a candidate"),
            Violation::RepeatedId(id) => write!(f, "id {id} selected twice"),
            Violation::DistanceMismatch { id } => write!(f, "stored distance of {id} is wrong"),
            Violation::NotNondecreasing { position } => {
                write!(f, "distance decreases at position {position}")
            }
            Violation::FirstNotNearest { expected, found } => {
                write!(f, "first neighbor is {found}, nearest candidate is {expected}")
            }
            Violation::Shadowed { earlier, later } => {
                write!(f, "{later} lies strictly closer to {earlier} than to the center")
            }
            Violation::Unexplained { candidate } => {
                write!(f, "candidate {candidate} was dropped but no neighbor forbids it")
            }
        }
    }
}

/// Re-checks a neighborhood against the candidate set it came from:
/// distinct known ids, exact distances, non-decreasing order, first entry
/// is the tie-broken nearest candidate, no later entry is shadowed by an
/// earlier one, and every dropped candidate is shadowed by some entry.
pub fn check_neighborhood(
    dataset: &LabeledDataset,
    query: &[f32],
    candidates: &[usize],
    nbhd: &Neighborhood,
) -> std::result::Result<(), Violation> {
    let cand: BTreeSet<usize> = candidates.iter().copied().collect();
    if cand.is_empty() {
        return Ok(());
    }
    if nbhd.is_empty() {
        return Err(Violation::Empty);
    }
    let sq_q = |id: usize| squared_distance(dataset.point(id), query);
    let mut seen = BTreeSet::new();
    for (pos, n) in nbhd.entries.iter().enumerate() {
        if !cand.contains(&n.id) {
            return Err(Violation::UnknownId(n.id));
        }
        if !seen.insert(n.id) {
            return Err(Violation::RepeatedId(n.id));
        }
        if n.dist != sq_q(n.id).sqrt() {
            return Err(Violation::DistanceMismatch { id: n.id });
        }
        if pos > 0 && n.dist < nbhd.entries[pos - 1].dist {
            return Err(Violation::NotNondecreasing { position: pos });
        }
    }
    let nearest = cand
        .iter()
        .copied()
        .min_by(|&a, &b| sq_q(a).total_cmp(&sq_q(b)).then(a.cmp(&b)))
        .expect("non-empty");
    if nbhd.entries[0].id != nearest {
        return Err(Violation::FirstNotNearest {
            expected: nearest,
            found: nbhd.entries[0].id,
        });
    }
    for (j, later) in nbhd.entries.iter().enumerate() {
        let pl = dataset.point(later.id);
        let dlq = sq_q(later.id);
        for earlier in &nbhd.entries[..j] {
            if squared_distance(pl, dataset.point(earlier.id)) < dlq {
                return Err(Violation::Shadowed {
                    earlier: earlier.id,
                    later: later.id,
                });
            }
        }
    }
    for &c in cand.iter().filter(|c| !seen.contains(c)) {
        let pc = dataset.point(c);
        let dcq = sq_q(c);
        let forbidden = nbhd
            .entries
            .iter()
            .any(|v| squared_distance(pc, dataset.point(v.id)) < dcq);
        if !forbidden {
            return Err(Violation::Unexplained { candidate: c });
        }
    }
    Ok(())
}

/// Directed HSP graph: the HSP test run at every point over all others.
#[derive(Debug, Clone, PartialEq)]
pub struct HspGraph {
    adjacency: Vec<Neighborhood>,
}

impl HspGraph {
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, node: usize) -> &Neighborhood {
        &self.adjacency[node]
    }

    pub fn adjacency(&self) -> &[Neighborhood] {
        &self.adjacency
    }

    /// Undirected edges `(min, max)` of the support.
    pub fn undirected_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for (u, nb) in self.adjacency.iter().enumerate() {
            for v in nb.ids() {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        edges
    }

    /// Writes one `node: id,id,...` line per node.
    pub fn write_adjacency<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, nb) in self.adjacency.iter().enumerate() {
            let ids: Vec<String> = nb.ids().map(|id| id.to_string()).collect();
            if ids.is_empty() {
                writeln!(out, "{u}:")?;
            } else {
                writeln!(out, "{u}: {}", ids.join(","))?;
            }
        }
        Ok(())
    }
}

/// Parses the text produced by [`HspGraph::write_adjacency`] into id lists.
pub fn read_adjacency<R: BufRead>(input: R) -> io::Result<Vec<Vec<usize>>> {
    let bad = |line: usize, msg: &str| {
        io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {msg}"))
    };
    let mut rows = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (node, rest) = line.split_once(':').ok_or_else(|| bad(lineno + 1, "missing ':'"))?;
        let node: usize = node.trim().parse().map_err(|_| bad(lineno + 1, "bad node id"))?;
        if node != rows.len() {
            return Err(bad(lineno + 1, "nodes out of order"));
        }
        let ids = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| bad(lineno + 1, "bad neighbor id")))
            .collect::<io::Result<Vec<usize>>>()?;
        rows.push(ids);
    }
    Ok(rows)
}

/// Builds the HSP graph. Nodes are processed in parallel; the output does
/// not depend on scheduling.
pub fn build_hsp_graph(dataset: &LabeledDataset) -> Result<HspGraph> {
    let n = dataset.len();
    let adjacency = (0..n)
        .into_par_iter()
        .map(|u| {
            if n == 1 {
                return Ok(Neighborhood::default());
            }
            let others: Vec<usize> = (0..n).filter(|&c| c != u).collect();
            hsp_neighbors(dataset, dataset.point(u), &others)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HspGraph { adjacency })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

pub fn out_degree_stats(graph: &HspGraph) -> Result<DegreeStats> {
    if graph.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let degrees = graph.adjacency.iter().map(Neighborhood::len);
    let min = degrees.clone().min().unwrap_or(0);
    let max = degrees.clone().max().unwrap_or(0);
    let mean = degrees.sum::<usize>() as f64 / graph.len() as f64;
    Ok(DegreeStats { min, max, mean })
}

/// Outcome of comparing the HSP support against the Euclidean MST.
#[derive(Debug, Clone, PartialEq)]
pub struct MstCheck {
    pub mst_edges: Vec<(usize, usize)>,
    /// MST edges missing from the undirected HSP support.
    pub missing: Vec<(usize, usize)>,
}

impl MstCheck {
    pub fn contained(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Dense O(n²) Prim over the complete Euclidean graph. Ties pick the
/// smaller id. Edges are returned as `(min, max)`.
pub fn euclidean_mst(dataset: &LabeledDataset) -> Vec<(usize, usize)> {
    let n = dataset.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let pc = dataset.point(current);
        let mut next = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let d = squared_distance(pc, dataset.point(v));
            if d < best[v] {
                best[v] = d;
                parent[v] = current;
            }
            if next == usize::MAX || best[v] < best[next] {
                next = v;
            }
        }
        in_tree[next] = true;
        let p = parent[next];
        edges.push((p.min(next), p.max(next)));
        current = next;
    }
    edges
}

pub fn verify_mst_containment(graph: &HspGraph, dataset: &LabeledDataset) -> MstCheck {
    let support = graph.undirected_edges();
    let mst_edges = euclidean_mst(dataset);
    let missing = mst_edges
        .iter()
        .copied()
        .filter(|e| !support.contains(e))
        .collect();
    MstCheck { mst_edges, missing }
}

/// Largest ratio of shortest-path length (over the undirected support,
/// Euclidean edge weights) to direct distance, over all pairs of points.
/// Pairs at distance zero are skipped.
pub fn empirical_stretch(graph: &HspGraph, dataset: &LabeledDataset) -> Result<f64> {
    let n = graph.len();
    let mut g = UnGraph::<(), f64>::with_capacity(n, 0);
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for (u, v) in graph.undirected_edges() {
        let w = squared_distance(dataset.point(u), dataset.point(v)).sqrt();
        g.add_edge(nodes[u], nodes[v], w);
    }
    let ratios = (0..n)
        .into_par_iter()
        .map(|s| {
            let dist = dijkstra(&g, nodes[s], None, |e| *e.weight());
            let mut worst = 1.0f64;
            for t in s + 1..n {
                let path = *dist
                    .get(&nodes[t])
                    .ok_or(Error::Disconnected { from: s, to: t })?;
                let direct = squared_distance(dataset.point(s), dataset.point(t)).sqrt();
                if direct > 0.0 {
                    worst = worst.max(path / direct);
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(1.0, f64::max))
}
