//! Structural pair and node metrics used as link-prediction features.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::community::CommunityAssignment;
use crate::graph::{NodeId, Topology};
use crate::{Error, Result};

fn distinct<T: Topology + ?Sized>(g: &T, u: NodeId, v: NodeId) -> Result<()> {
    g.check_node(u)?;
    g.check_node(v)?;
    if u == v {
        return Err(Error::domain(format!(
            "pair metric needs two distinct nodes, got ({u}, {u})"
        )));
    }
    Ok(())
}

fn sorted_intersection(a: &[(NodeId, f64)], b: &[(NodeId, f64)]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

pub fn common_neighbors<T: Topology + ?Sized>(g: &T, u: NodeId, v: NodeId) -> Result<usize> {
    distinct(g, u, v)?;
    Ok(sorted_intersection(g.adjacency(u), g.adjacency(v)))
}

pub fn preferential_attachment<T: Topology + ?Sized>(g: &T, u: NodeId, v: NodeId) -> Result<usize> {
    distinct(g, u, v)?;
    Ok(g.adjacency(u).len() * g.adjacency(v).len())
}

/// Number of triangles through each node. Every edge `u < v` is intersected
/// with the neighbours above `v`, so each triangle is found exactly once.
pub fn triangles_per_node<T: Topology + ?Sized>(g: &T) -> Vec<usize> {
    let n = g.node_count();
    let mut tri = vec![0usize; n];
    for u in 0..n {
        let nu = g.adjacency(u);
        for &(v, _) in nu.iter().filter(|&&(v, _)| v > u) {
            let nv = g.adjacency(v);
            let above_u = &nu[nu.partition_point(|&(x, _)| x <= v)..];
            let above_v = &nv[nv.partition_point(|&(x, _)| x <= v)..];
            let (mut i, mut j) = (0, 0);
            while i < above_u.len() && j < above_v.len() {
                let (a, b) = (above_u[i].0, above_v[j].0);
                if a < b {
                    i += 1;
                } else if a > b {
                    j += 1;
                } else {
                    tri[u] += 1;
                    tri[v] += 1;
                    tri[a] += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    tri
}

/// Local clustering coefficient, 0 for nodes of degree below two.
pub fn local_clustering<T: Topology + ?Sized>(g: &T) -> Vec<f64> {
    clustering_from_triangles(g, &triangles_per_node(g))
}

fn clustering_from_triangles<T: Topology + ?Sized>(g: &T, tri: &[usize]) -> Vec<f64> {
    (0..g.node_count())
        .map(|u| {
            let d = g.adjacency(u).len();
            if d < 2 {
                0.0
            } else {
                tri[u] as f64 / (d * (d - 1) / 2) as f64
            }
        })
        .collect()
}

/// The ten per-pair features. Serialised names double as CSV column names and
/// configuration keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    CommonNeighbors,
    PrefAttachment,
    DegMin,
    DegMax,
    TriMin,
    TriMax,
    CcMin,
    CcMax,
    SameLouvain,
    SameLp,
}

impl Feature {
    pub const ALL: [Feature; 10] = [
        Feature::CommonNeighbors,
        Feature::PrefAttachment,
        Feature::DegMin,
        Feature::DegMax,
        Feature::TriMin,
        Feature::TriMax,
        Feature::CcMin,
        Feature::CcMax,
        Feature::SameLouvain,
        Feature::SameLp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::CommonNeighbors => "common_neighbors",
            Feature::PrefAttachment => "pref_attachment",
            Feature::DegMin => "deg_min",
            Feature::DegMax => "deg_max",
            Feature::TriMin => "tri_min",
            Feature::TriMax => "tri_max",
            Feature::CcMin => "cc_min",
            Feature::CcMax => "cc_max",
            Feature::SameLouvain => "same_louvain",
            Feature::SameLp => "same_lp",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown feature `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMetricRow {
    pub u: NodeId,
    pub v: NodeId,
    pub common_neighbors: usize,
    pub pref_attachment: usize,
    pub deg_min: usize,
    pub deg_max: usize,
    pub tri_min: usize,
    pub tri_max: usize,
    pub cc_min: f64,
    pub cc_max: f64,
    pub same_louvain: bool,
    pub same_lp: bool,
}

impl PairMetricRow {
    pub fn get(&self, f: Feature) -> f64 {
        match f {
            Feature::CommonNeighbors => self.common_neighbors as f64,
            Feature::PrefAttachment => self.pref_attachment as f64,
            Feature::DegMin => self.deg_min as f64,
            Feature::DegMax => self.deg_max as f64,
            Feature::TriMin => self.tri_min as f64,
            Feature::TriMax => self.tri_max as f64,
            Feature::CcMin => self.cc_min,
            Feature::CcMax => self.cc_max,
            Feature::SameLouvain => f64::from(u8::from(self.same_louvain)),
            Feature::SameLp => f64::from(u8::from(self.same_lp)),
        }
    }

    pub fn select(&self, features: &[Feature]) -> Vec<f64> {
        features.iter().map(|&f| self.get(f)).collect()
    }
}

/// One row per input pair, in input order. Node-level quantities are
/// computed once for the whole graph.
pub fn pair_features<T: Topology + ?Sized>(
    g: &T,
    pairs: &[(NodeId, NodeId)],
    louvain: &CommunityAssignment,
    lp: &CommunityAssignment,
) -> Result<Vec<PairMetricRow>> {
    let n = g.node_count();
    if louvain.len() != n || lp.len() != n {
        return Err(Error::domain("community assignment does not cover the graph"));
    }
    for &(u, v) in pairs {
        distinct(g, u, v)?;
    }
    let tri = triangles_per_node(g);
    let cc = clustering_from_triangles(g, &tri);

    Ok(pairs
        .iter()
        .map(|&(u, v)| {
            let (du, dv) = (g.adjacency(u).len(), g.adjacency(v).len());
            PairMetricRow {
                u,
                v,
                common_neighbors: sorted_intersection(g.adjacency(u), g.adjacency(v)),
                pref_attachment: du * dv,
                deg_min: du.min(dv),
                deg_max: du.max(dv),
                tri_min: tri[u].min(tri[v]),
                tri_max: tri[u].max(tri[v]),
                cc_min: cc[u].min(cc[v]),
                cc_max: cc[u].max(cc[v]),
                same_louvain: louvain.same(u, v),
                same_lp: lp.same(u, v),
            }
        })
        .collect())
}

/// Writes the rows as CSV: `source,target` names followed by the ten feature
/// columns, rows in input order.
pub fn write_feature_csv<T: Topology + ?Sized, W: Write>(g: &T, rows: &[PairMetricRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["source", "target"];
    header.extend(Feature::ALL.iter().map(|f| f.name()));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![g.name(r.u).to_string(), g.name(r.v).to_string()];
        rec.extend([
            r.common_neighbors.to_string(),
            r.pref_attachment.to_string(),
            r.deg_min.to_string(),
            r.deg_max.to_string(),
            r.tri_min.to_string(),
            r.tri_max.to_string(),
            r.cc_min.to_string(),
            r.cc_max.to_string(),
            r.same_louvain.to_string(),
            r.same_lp.to_string(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Graph;

    fn unit(edges: &[(&str, &str)]) -> Graph {
        Graph::from_edge_list(edges.iter().map(|&(a, b)| (a, b, 1.0))).unwrap()
    }

    fn k4() -> Graph {
        unit(&[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")])
    }

    #[test]
    fn common_neighbors_small() {
        let tri = unit(&[("a", "b"), ("b", "c"), ("c", "a")]);
        assert_eq!(common_neighbors(&tri, 0, 1).unwrap(), 1);
        assert_eq!(common_neighbors(&k4(), 2, 3).unwrap(), 2);
        assert!(common_neighbors(&tri, 1, 1).is_err());
        assert!(common_neighbors(&tri, 1, 9).is_err());
    }

    #[test]
    fn preferential_attachment_small() {
        let star = unit(&[("c", "x"), ("c", "y"), ("c", "z")]);
        assert_eq!(preferential_attachment(&star, 0, 1).unwrap(), 3);
        let (iso, _) = Graph::from_edge_list_with_summary([("p", "p", 1.0), ("q", "q", 1.0)]).unwrap();
        assert_eq!(preferential_attachment(&iso, 0, 1).unwrap(), 0);
        assert!(preferential_attachment(&iso, 0, 0).is_err());
    }

    #[test]
    fn triangles_and_clustering() {
        assert_eq!(triangles_per_node(&k4()), [3, 3, 3, 3]);
        let tree = unit(&[("r", "a"), ("r", "b"), ("a", "c"), ("a", "d")]);
        assert!(triangles_per_node(&tree).iter().all(|&t| t == 0));

        let tri = unit(&[("a", "b"), ("b", "c"), ("c", "a")]);
        assert_eq!(local_clustering(&tri), [1.0, 1.0, 1.0]);
        let star = unit(&[("c", "x"), ("c", "y"), ("c", "z")]);
        assert_eq!(local_clustering(&star), [0.0; 4]);
    }

    #[test]
    fn triangle_pair_row() {
        let tri = unit(&[("a", "b"), ("b", "c"), ("c", "a")]);
        let one = CommunityAssignment::all_in_one(3);
        let rows = pair_features(&tri, &[(0, 1)], &one, &one).unwrap();
        let r = rows[0];
        assert_eq!(r.common_neighbors, 1);
        assert_eq!(r.pref_attachment, 4);
        assert_eq!((r.deg_min, r.deg_max), (2, 2));
        assert_eq!((r.tri_min, r.tri_max), (1, 1));
        assert_eq!((r.cc_min, r.cc_max), (1.0, 1.0));
        assert!(r.same_louvain && r.same_lp);
    }

    #[test]
    fn isolated_pair_row() {
        let (iso, _) = Graph::from_edge_list_with_summary([("p", "p", 1.0), ("q", "q", 1.0)]).unwrap();
        let single = CommunityAssignment::singletons(2);
        let r = pair_features(&iso, &[(0, 1)], &single, &single).unwrap()[0];
        assert!(Feature::ALL.iter().all(|&f| r.get(f) == 0.0));
    }

    #[test]
    fn feature_names_round_trip() {
        for f in Feature::ALL {
            assert_eq!(f.name().parse::<Feature>().unwrap(), f);
        }
        assert!("adamic_adar".parse::<Feature>().is_err());
    }

    #[test]
    fn feature_csv_layout() {
        let tri = unit(&[("a", "b"), ("b", "c"), ("c", "a")]);
        let one = CommunityAssignment::all_in_one(3);
        let rows = pair_features(&tri, &[(0, 1), (2, 0)], &one, &one).unwrap();
        let mut buf = Vec::new();
        write_feature_csv(&tri, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "source,target,common_neighbors,pref_attachment,deg_min,deg_max,tri_min,tri_max,cc_min,cc_max,same_louvain,same_lp"
        );
        assert_eq!(lines[1], "a,b,1,4,2,2,1,1,1,1,true,true");
        assert!(lines[2].starts_with("c,a,"));
        assert_eq!(lines.len(), 3);
    }
}
