//! The undirected weighted graph every algorithm consumes, its CSV ingestion
//! and induced-subgraph views.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::{Error, Result};

/// Dense node index in `0..node_count`.
pub type NodeId = usize;

/// Expected CSV header, matched case-sensitively.
pub const CSV_HEADER: [&str; 3] = ["Source", "Target", "weight"];

/// Read access shared by [`Graph`] and [`GraphView`]. Every algorithm in this
/// crate is generic over it.
pub trait Topology {
    fn node_count(&self) -> usize;

    fn edge_count(&self) -> usize;

    /// Neighbors of `u` sorted ascending by id. Panics if `u` is out of range;
    /// use [`Topology::neighbors`] for a checked lookup.
    fn adjacency(&self, u: NodeId) -> &[(NodeId, f64)];

    fn names(&self) -> &[Arc<str>];

    /// Whether random-walk style algorithms (PageRank) should follow edge
    /// weights instead of uniform transitions.
    fn weighted_transitions(&self) -> bool {
        false
    }

    fn name(&self, u: NodeId) -> &str {
        &self.names()[u]
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        if u < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                id: u,
                node_count: self.node_count(),
            })
        }
    }

    fn neighbors(&self, u: NodeId) -> Result<&[(NodeId, f64)]> {
        self.check_node(u)?;
        Ok(self.adjacency(u))
    }

    fn degree(&self, u: NodeId) -> Result<usize> {
        self.check_node(u)?;
        Ok(self.adjacency(u).len())
    }

    fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && self.adjacency(u).binary_search_by_key(&v, |&(n, _)| n).is_ok()
    }

    /// Sum of edge weights, each undirected edge counted once.
    fn total_weight(&self) -> f64 {
        (0..self.node_count())
            .flat_map(|u| self.adjacency(u).iter().filter(move |&&(v, _)| u < v))
            .map(|&(_, w)| w)
            .sum()
    }

    /// Undirected edges as `(u, v, w)` with `u < v`, ordered by `(u, v)`.
    fn edge_list(&self) -> Vec<(NodeId, NodeId, f64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.node_count() {
            for &(v, w) in self.adjacency(u) {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }
}

/// Counts gathered while building a graph from raw rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub nodes: usize,
    pub edges: usize,
    pub duplicates_resolved: usize,
    pub self_loops_dropped: usize,
}

/// Immutable undirected weighted graph with interned node names.
#[derive(Debug, Clone)]
pub struct Graph {
    names: Vec<Arc<str>>,
    index: HashMap<Arc<str>, NodeId>,
    adjacency: Vec<Vec<(NodeId, f64)>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from `(source, target, weight)` rows.
    ///
    /// Names are interned in first-appearance order. A repeated unordered pair
    /// keeps the weight of its last row, self-loop rows are dropped (their
    /// endpoint is still interned), and any row whose weight is not a finite
    /// positive number fails with [`Error::Ingest`].
    pub fn from_edge_list<I, S>(rows: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: AsRef<str>,
    {
        Self::from_edge_list_with_summary(rows).map(|(g, _)| g)
    }

    pub fn from_edge_list_with_summary<I, S>(rows: I) -> Result<(Graph, IngestSummary)>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: AsRef<str>,
    {
        let mut builder = Builder::default();
        for (i, (source, target, weight)) in rows.into_iter().enumerate() {
            builder.push(i + 1, source.as_ref(), target.as_ref(), weight)?;
        }
        Ok(builder.finish())
    }

    /// Reads a `Source,Target,weight` CSV file.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<(Graph, IngestSummary)> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_csv_reader(file, path)
    }

    /// Reads CSV from any reader; `origin` is only used in error messages.
    pub fn from_csv_reader<R: Read>(reader: R, origin: impl AsRef<Path>) -> Result<(Graph, IngestSummary)> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() != 3 || header.iter().zip(CSV_HEADER).any(|(a, b)| a != b) {
            return Err(Error::Header {
                path: origin.as_ref().to_path_buf(),
                found: header.iter().collect::<Vec<_>>().join(","),
            });
        }

        let mut builder = Builder::default();
        let mut record = csv::StringRecord::new();
        let mut row = 0;
        loop {
            row += 1;
            let ok = rdr.read_record(&mut record).map_err(|e| Error::Ingest {
                row,
                message: e.to_string(),
            })?;
            if !ok {
                break;
            }
            let line = record.position().map_or(row + 1, |p| p.line() as usize);
            let bad = |message: String| Error::Ingest {
                row,
                message: format!("{message} (line {line})"),
            };
            if record.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", record.len())));
            }
            let (source, target, raw) = (record[0].trim(), record[1].trim(), record[2].trim());
            if source.is_empty() || target.is_empty() {
                return Err(bad("empty node name".to_string()));
            }
            let weight: f64 = raw.parse().map_err(|_| bad(format!("unparsable weight `{raw}`")))?;
            builder.push(row, source, target, weight).map_err(|e| match e {
                Error::Ingest { message, .. } => bad(message),
                other => other,
            })?;
        }
        Ok(builder.finish())
    }

    /// Builds a graph over a fixed list of names and id-based edges. Node ids
    /// in the result equal the positions in `names`. Duplicate pairs keep the
    /// last weight; self-loops are dropped.
    pub fn from_parts<I>(names: Vec<Arc<str>>, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut builder = Builder::default();
        for name in &names {
            if builder.intern(name) != builder.names.len() - 1 {
                return Err(Error::domain(format!("duplicate node name `{name}`")));
            }
        }
        let n = names.len();
        for (i, (u, v, w)) in edges.into_iter().enumerate() {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::InvalidNode { id, node_count: n });
                }
            }
            builder.push_ids(i + 1, u, v, w)?;
        }
        Ok(builder.finish().0)
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let adj = self.adjacency.get(u)?;
        adj.binary_search_by_key(&v, |&(n, _)| n).ok().map(|i| adj[i].1)
    }

    /// Induced subgraph on `mask`. With `weighted == false` every edge reads as
    /// weight 1; with `weighted == true` PageRank also follows edge weights.
    pub fn project<I>(&self, mask: I, weighted: bool) -> Result<GraphView<'_>>
    where
        I: IntoIterator<Item = NodeId>,
    {
        let n = self.node_count();
        let mut keep = vec![false; n];
        for id in mask {
            self.check_node(id)?;
            keep[id] = true;
        }
        let base_ids: Vec<NodeId> = (0..n).filter(|&u| keep[u]).collect();
        let mut local = vec![usize::MAX; n];
        for (i, &b) in base_ids.iter().enumerate() {
            local[b] = i;
        }
        let mut edge_entries = 0;
        let adjacency: Vec<Vec<(NodeId, f64)>> = base_ids
            .iter()
            .map(|&b| {
                let row: Vec<(NodeId, f64)> = self.adjacency[b]
                    .iter()
                    .filter(|&&(v, _)| keep[v])
                    .map(|&(v, w)| (local[v], if weighted { w } else { 1.0 }))
                    .collect();
                edge_entries += row.len();
                row
            })
            .collect();
        Ok(GraphView {
            base: self,
            names: base_ids.iter().map(|&b| self.names[b].clone()).collect(),
            adjacency,
            base_ids,
            edge_count: edge_entries / 2,
            weighted,
        })
    }
}

impl Topology for Graph {
    fn node_count(&self) -> usize {
        self.names.len()
    }

    fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn adjacency(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[u]
    }

    fn names(&self) -> &[Arc<str>] {
        &self.names
    }
}

/// Induced subgraph of a [`Graph`]. Local ids are the masked base ids in
/// ascending order, so adjacency stays sorted and iteration order matches the
/// base graph restricted to the mask.
#[derive(Debug, Clone)]
pub struct GraphView<'g> {
    base: &'g Graph,
    names: Vec<Arc<str>>,
    adjacency: Vec<Vec<(NodeId, f64)>>,
    base_ids: Vec<NodeId>,
    edge_count: usize,
    weighted: bool,
}

impl<'g> GraphView<'g> {
    pub fn base(&self) -> &'g Graph {
        self.base
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn to_base(&self, local: NodeId) -> Option<NodeId> {
        self.base_ids.get(local).copied()
    }

    pub fn from_base(&self, base: NodeId) -> Option<NodeId> {
        self.base_ids.binary_search(&base).ok()
    }
}

impl Topology for GraphView<'_> {
    fn node_count(&self) -> usize {
        self.base_ids.len()
    }

    fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn adjacency(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[u]
    }

    fn names(&self) -> &[Arc<str>] {
        &self.names
    }

    fn weighted_transitions(&self) -> bool {
        self.weighted
    }
}

#[derive(Default)]
struct Builder {
    names: Vec<Arc<str>>,
    index: HashMap<Arc<str>, NodeId>,
    // Keyed by (min id, max id).
    edges: HashMap<(NodeId, NodeId), f64>,
    rows: usize,
    duplicates: usize,
    self_loops: usize,
}

impl Builder {
    fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        let name: Arc<str> = Arc::from(name);
        self.names.push(name.clone());
        self.index.insert(name, id);
        id
    }

    fn push(&mut self, row: usize, source: &str, target: &str, weight: f64) -> Result<()> {
        check_weight(row, weight)?;
        let u = self.intern(source);
        let v = self.intern(target);
        self.push_ids(row, u, v, weight)
    }

    fn push_ids(&mut self, row: usize, u: NodeId, v: NodeId, weight: f64) -> Result<()> {
        check_weight(row, weight)?;
        self.rows += 1;
        if u == v {
            self.self_loops += 1;
            return Ok(());
        }
        match self.edges.entry((u.min(v), u.max(v))) {
            Entry::Occupied(mut e) => {
                self.duplicates += 1;
                e.insert(weight);
            }
            Entry::Vacant(e) => {
                e.insert(weight);
            }
        }
        Ok(())
    }

    fn finish(self) -> (Graph, IngestSummary) {
        let n = self.names.len();
        let mut adjacency = vec![Vec::new(); n];
        for (&(u, v), &w) in &self.edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for row in &mut adjacency {
            row.sort_unstable_by_key(|&(v, _)| v);
        }
        let summary = IngestSummary {
            rows: self.rows,
            nodes: n,
            edges: self.edges.len(),
            duplicates_resolved: self.duplicates,
            self_loops_dropped: self.self_loops,
        };
        let graph = Graph {
            names: self.names,
            index: self.index,
            adjacency,
            edge_count: self.edges.len(),
        };
        (graph, summary)
    }
}

fn check_weight(row: usize, weight: f64) -> Result<()> {
    if weight.is_finite() && weight > 0.0 {
        Ok(())
    } else {
        Err(Error::Ingest {
            row,
            message: format!("weight must be a finite positive number, got {weight}"),
        })
    }
}
