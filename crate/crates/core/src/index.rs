//! Layered small-world graph index for approximate k-NN (HNSW-style).
//!
//! Points are inserted one at a time. Each draws a top level from a
//! geometric distribution, descends greedily through the levels above it,
//! then beam-searches each of its own levels and links to the closest
//! `max_neighbors` points found. Neighbor lists that overflow are cut back
//! to their closest members. The diversity heuristic of the reference HNSW
//! is deliberately not used here.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::{knn_search, KnnResult, Ranked};
use crate::metric::{squared_distance, LabeledDataset};

const MAGIC: &[u8; 4] = b"HSPX";
const VERSION: u16 = 1;
const MAX_LEVEL: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexParams {
    /// Degree bound on levels above 0; level 0 allows twice as many.
    pub max_neighbors: usize,
    pub ef_construction: usize,
    pub ef_search: usize,
    /// Level assignment factor. `None` means `1 / ln(max_neighbors)`.
    pub level_scale: Option<f64>,
    pub seed: u64,
}

impl Default for IndexParams {
    fn default() -> Self {
        Self {
            max_neighbors: 16,
            ef_construction: 200,
            ef_search: 100,
            level_scale: None,
            seed: 0,
        }
    }
}

impl IndexParams {
    pub fn level_scale(&self) -> f64 {
        self.level_scale
            .unwrap_or_else(|| 1.0 / (self.max_neighbors as f64).ln())
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_neighbors < 2 {
            return Err(Error::Config("max_neighbors must be at least 2".into()));
        }
        if self.max_neighbors > u16::MAX as usize / 2 {
            return Err(Error::Config("max_neighbors too large".into()));
        }
        if self.ef_construction == 0 || self.ef_search == 0 {
            return Err(Error::Config("beam widths must be positive".into()));
        }
        let s = self.level_scale();
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Config(format!("level_scale must be positive, got {s}")));
        }
        Ok(())
    }

    fn cap(&self, level: usize) -> usize {
        if level == 0 {
            2 * self.max_neighbors
        } else {
            self.max_neighbors
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallWorldIndex {
    params: IndexParams,
    entry_point: usize,
    /// `links[node][level]`, present for levels `0..=top level of node`.
    links: Vec<Vec<Vec<u32>>>,
    fingerprint: u64,
}

struct Visited {
    marks: Vec<u32>,
    epoch: u32,
}

impl Visited {
    fn new(n: usize) -> Self {
        Self {
            marks: vec![0; n],
            epoch: 0,
        }
    }

    fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.marks.fill(0);
            self.epoch = 1;
        }
    }

    /// Returns true the first time `id` is seen since the last reset.
    fn insert(&mut self, id: usize) -> bool {
        if self.marks[id] == self.epoch {
            false
        } else {
            self.marks[id] = self.epoch;
            true
        }
    }
}

impl SmallWorldIndex {
    /// Builds the index by sequential insertion in id order. Deterministic
    /// for a fixed dataset and `params.seed`.
    pub fn build(dataset: &LabeledDataset, params: IndexParams) -> Result<Self> {
        params.validate()?;
        if dataset.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if dataset.len() > u32::MAX as usize {
            return Err(Error::Config("dataset too large for u32 ids".into()));
        }
        let params = IndexParams {
            level_scale: Some(params.level_scale()),
            ..params
        };
        let scale = params.level_scale();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let n = dataset.len();
        let mut index = SmallWorldIndex {
            params,
            entry_point: 0,
            links: Vec::with_capacity(n),
            fingerprint: dataset.fingerprint(),
        };
        let mut visited = Visited::new(n);

        for id in 0..n {
            let u: f64 = rng.random();
            let level = ((-(1.0 - u).ln() * scale).floor() as usize).min(MAX_LEVEL);
            index.links.push(vec![Vec::new(); level + 1]);
            if id == 0 {
                continue;
            }
            let query = dataset.point(id);
            let top = index.top_level();
            let mut entry = vec![Ranked {
                d2: squared_distance(query, dataset.point(index.entry_point)),
                id: index.entry_point,
            }];
            for l in (level + 1..=top).rev() {
                entry = index.search_level(dataset, query, &entry, 1, l, &mut visited);
            }
            for l in (0..=level.min(top)).rev() {
                let found =
                    index.search_level(dataset, query, &entry, params.ef_construction, l, &mut visited);
                let chosen: Vec<u32> = found
                    .iter()
                    .filter(|r| r.id != id)
                    .take(params.max_neighbors)
                    .map(|r| r.id as u32)
                    .collect();
                for &s in &chosen {
                    index.add_link(dataset, s as usize, id, l);
                }
                index.links[id][l] = chosen;
                entry = found;
            }
            if level > top {
                index.entry_point = id;
            }
        }
        Ok(index)
    }

    fn add_link(&mut self, dataset: &LabeledDataset, from: usize, to: usize, level: usize) {
        let cap = self.params.cap(level);
        let list = &mut self.links[from][level];
        list.push(to as u32);
        if list.len() <= cap {
            return;
        }
        let origin = dataset.point(from);
        let mut ranked: Vec<Ranked> = list
            .iter()
            .map(|&v| Ranked {
                d2: squared_distance(origin, dataset.point(v as usize)),
                id: v as usize,
            })
            .collect();
        ranked.sort_unstable();
        ranked.truncate(cap);
        *list = ranked.into_iter().map(|r| r.id as u32).collect();
    }

    /// Best-first beam search on one level. Returns up to `ef` points in
    /// ascending `(distance, id)` order.
    fn search_level(
        &self,
        dataset: &LabeledDataset,
        query: &[f32],
        entry: &[Ranked],
        ef: usize,
        level: usize,
        visited: &mut Visited,
    ) -> Vec<Ranked> {
        visited.reset();
        let mut frontier = BinaryHeap::new();
        let mut best: BinaryHeap<Ranked> = BinaryHeap::with_capacity(ef + 1);
        for &e in entry {
            if visited.insert(e.id) {
                frontier.push(Reverse(e));
                best.push(e);
                if best.len() > ef {
                    best.pop();
                }
            }
        }
        while let Some(Reverse(c)) = frontier.pop() {
            if best.len() >= ef && c > *best.peek().expect("non-empty") {
                break;
            }
            for &nb in &self.links[c.id][level] {
                let nb = nb as usize;
                if !visited.insert(nb) {
                    continue;
                }
                let r = Ranked {
                    d2: squared_distance(query, dataset.point(nb)),
                    id: nb,
                };
                if best.len() < ef || r < *best.peek().expect("non-empty") {
                    frontier.push(Reverse(r));
                    best.push(r);
                    if best.len() > ef {
                        best.pop();
                    }
                }
            }
        }
        best.into_sorted_vec()
    }

    pub fn params(&self) -> &IndexParams {
        &self.params
    }

    /// Changes the default query-time beam width. The graph is unaffected.
    pub fn set_ef_search(&mut self, ef_search: usize) {
        self.params.ef_search = ef_search.max(1);
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn entry_point(&self) -> usize {
        self.entry_point
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn top_level(&self) -> usize {
        self.links[self.entry_point].len() - 1
    }

    pub fn node_level(&self, id: usize) -> usize {
        self.links[id].len() - 1
    }

    pub fn neighbors(&self, id: usize, level: usize) -> &[u32] {
        self.links[id].get(level).map_or(&[], Vec::as_slice)
    }

    /// Number of nodes present on each level, bottom first.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.top_level() + 1];
        for node in &self.links {
            for s in sizes.iter_mut().take(node.len()) {
                *s += 1;
            }
        }
        sizes
    }

    /// Number of nodes reachable from the entry point on level 0,
    /// following directed links.
    pub fn level0_reachable(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.entry_point];
        seen[self.entry_point] = true;
        let mut count = 0;
        while let Some(u) = stack.pop() {
            count += 1;
            for &v in &self.links[u][0] {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        count
    }

    pub fn check_dataset(&self, dataset: &LabeledDataset) -> Result<()> {
        if dataset.len() != self.len() || dataset.fingerprint() != self.fingerprint {
            return Err(Error::StaleIndex);
        }
        Ok(())
    }

    /// Approximate top-`k`. The beam width is raised to `k` (plus one when
    /// excluding an id) if `ef_search` is smaller.
    pub fn search(
        &self,
        dataset: &LabeledDataset,
        query: &[f32],
        k: usize,
        ef_search: usize,
        exclude: Option<usize>,
    ) -> Result<KnnResult> {
        self.check_dataset(dataset)?;
        dataset.check_query(query)?;
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let ef = ef_search.max(k + usize::from(exclude.is_some()));
        let mut visited = Visited::new(self.len());
        let mut entry = vec![Ranked {
            d2: squared_distance(query, dataset.point(self.entry_point)),
            id: self.entry_point,
        }];
        for l in (1..=self.top_level()).rev() {
            entry = self.search_level(dataset, query, &entry, 1, l, &mut visited);
        }
        let found = self.search_level(dataset, query, &entry, ef, 0, &mut visited);
        Ok(KnnResult::from_ranked(
            k,
            found.into_iter().filter(|r| Some(r.id) != exclude).take(k),
        ))
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let p = &self.params;
        out.write_all(MAGIC)?;
        out.write_all(&VERSION.to_le_bytes())?;
        out.write_all(&(p.max_neighbors as u32).to_le_bytes())?;
        out.write_all(&(p.ef_construction as u32).to_le_bytes())?;
        out.write_all(&(p.ef_search as u32).to_le_bytes())?;
        out.write_all(&p.level_scale().to_le_bytes())?;
        out.write_all(&p.seed.to_le_bytes())?;
        out.write_all(&(self.entry_point as u32).to_le_bytes())?;
        out.write_all(&self.fingerprint.to_le_bytes())?;
        out.write_all(&(self.len() as u32).to_le_bytes())?;
        let levels = self.top_level() + 1;
        out.write_all(&(levels as u32).to_le_bytes())?;
        for (level, &size) in self.level_sizes().iter().enumerate() {
            out.write_all(&(size as u32).to_le_bytes())?;
            for (id, node) in self.links.iter().enumerate() {
                let Some(adj) = node.get(level) else { continue };
                out.write_all(&(id as u32).to_le_bytes())?;
                out.write_all(&(adj.len() as u16).to_le_bytes())?;
                for &v in adj {
                    out.write_all(&v.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes).map_err(|(offset, message)| Error::Format {
            path: path.to_owned(),
            offset,
            message,
        })
    }

    /// Parses the binary layout; errors carry the byte offset.
    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, (u64, String)> {
        let mut r = ByteReader { bytes, pos: 0 };
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| (0, "truncated header".to_string()))?;
        if &magic != MAGIC {
            return Err((0, "bad magic".into()));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err((4, format!("unsupported version {version}")));
        }
        let params = IndexParams {
            max_neighbors: r.u32()? as usize,
            ef_construction: r.u32()? as usize,
            ef_search: r.u32()? as usize,
            level_scale: Some(r.f64()?),
            seed: r.u64()?,
        };
        params.validate().map_err(|e| (r.pos as u64, e.to_string()))?;
        let entry_point = r.u32()? as usize;
        let fingerprint = r.u64()?;
        let n = r.u32()? as usize;
        let levels = r.u32()? as usize;
        if n == 0 || levels == 0 || levels > MAX_LEVEL + 1 || entry_point >= n {
            return Err((r.pos as u64, "inconsistent header".into()));
        }
        let mut links: Vec<Vec<Vec<u32>>> = vec![Vec::new(); n];
        for level in 0..levels {
            let size = r.u32()? as usize;
            if size > n {
                return Err((r.pos as u64, "level larger than node count".into()));
            }
            for _ in 0..size {
                let at = r.pos as u64;
                let id = r.u32()? as usize;
                if id >= n || links[id].len() != level {
                    return Err((at, format!("node {id} breaks level nesting at level {level}")));
                }
                let degree = r.u16()? as usize;
                if degree > params.cap(level) {
                    return Err((at, format!("node {id} exceeds degree bound")));
                }
                let mut adj = Vec::with_capacity(degree);
                for _ in 0..degree {
                    let v = r.u32()?;
                    if v as usize >= n {
                        return Err((r.pos as u64 - 4, format!("neighbor {v} out of range")));
                    }
                    adj.push(v);
                }
                links[id].push(adj);
            }
        }
        if links.iter().any(Vec::is_empty) {
            return Err((r.pos as u64, "node missing from level 0".into()));
        }
        if links[entry_point].len() != levels {
            return Err((r.pos as u64, "entry point is not on the top level".into()));
        }
        if r.pos != bytes.len() {
            return Err((r.pos as u64, "trailing bytes".into()));
        }
        Ok(Self {
            params,
            entry_point,
            links,
            fingerprint,
        })
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl ByteReader<'_> {
    fn take<const N: usize>(&mut self) -> std::result::Result<[u8; N], (u64, String)> {
        let mut buf = [0u8; N];
        self.read_exact(&mut buf)
            .map_err(|_| (self.pos as u64, "truncated".to_string()))?;
        Ok(buf)
    }

    fn u16(&mut self) -> std::result::Result<u16, (u64, String)> {
        self.take().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> std::result::Result<u32, (u64, String)> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> std::result::Result<u64, (u64, String)> {
        self.take().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> std::result::Result<f64, (u64, String)> {
        self.take().map(f64::from_le_bytes)
    }
}

impl Read for ByteReader<'_> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = buf.len().min(self.bytes.len() - self.pos);
        buf[..n].copy_from_slice(&self.bytes[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}

/// Mean over queries of `|approx ∩ exact| / k`, with the exact side from
/// a linear scan.
pub fn recall_at_k<Q: AsRef<[f32]> + Sync>(
    index: &SmallWorldIndex,
    dataset: &LabeledDataset,
    queries: &[Q],
    k: usize,
    ef_search: usize,
) -> Result<f64> {
    if queries.is_empty() {
        return Err(Error::Config("recall needs at least one query".into()));
    }
    let denom = k.min(dataset.len()) as f64;
    let hits = queries
        .par_iter()
        .map(|q| {
            let q = q.as_ref();
            let approx = index.search(dataset, q, k, ef_search, None)?;
            let exact = knn_search(dataset, q, k, None)?;
            let hit = approx
                .ids()
                .filter(|id| exact.ids().any(|e| e == *id))
                .count();
            Ok(hit as f64 / denom)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(hits.iter().sum::<f64>() / queries.len() as f64)
}
