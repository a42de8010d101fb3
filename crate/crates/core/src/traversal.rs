//! Breadth-first search with optional stop conditions, and Prim's minimum
//! spanning tree.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use ordered_float::OrderedFloat;
use serde::Serialize;

use crate::graph::{NodeId, Topology};
use crate::Result;

/// Stop conditions for [`bfs`]. All absent means the whole component is
/// traversed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BfsTermination {
    pub targets: Option<HashSet<NodeId>>,
    pub max_depth: Option<usize>,
    /// Budget on the summed weight of tree edges used to reach visited nodes.
    pub max_cost: Option<f64>,
}

impl BfsTermination {
    pub fn depth(max_depth: usize) -> Self {
        Self {
            max_depth: Some(max_depth),
            ..Self::default()
        }
    }

    pub fn targets(targets: impl IntoIterator<Item = NodeId>) -> Self {
        Self {
            targets: Some(targets.into_iter().collect()),
            ..Self::default()
        }
    }

    pub fn cost(max_cost: f64) -> Self {
        Self {
            max_cost: Some(max_cost),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Exhausted,
    TargetHit,
    DepthLimit,
    CostBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfsResult {
    pub order: Vec<NodeId>,
    /// Hop distance of `order[i]` from the start.
    pub depths: Vec<usize>,
    /// Summed weight of the tree edges used to reach the visited nodes.
    pub cost: f64,
    pub terminated_by: Termination,
}

/// Queue-based BFS from `start`, enqueuing neighbours in ascending id order.
///
/// A node counts as visited when it is dequeued. Before visiting, the search
/// stops with [`Termination::DepthLimit`] if the node lies deeper than
/// `max_depth`, or with [`Termination::CostBudget`] if adding the weight of the
/// edge it was discovered through would push the accumulated cost past
/// `max_cost`. After visiting, it stops with [`Termination::TargetHit`] if the
/// node is a target. The start node is always visited at depth 0.
pub fn bfs<T: Topology + ?Sized>(g: &T, start: NodeId, term: &BfsTermination) -> Result<BfsResult> {
    g.check_node(start)?;
    let n = g.node_count();
    let mut discovered = vec![false; n];
    // (node, depth, weight of the edge it was discovered through)
    let mut queue: VecDeque<(NodeId, usize, f64)> = VecDeque::new();
    discovered[start] = true;
    queue.push_back((start, 0, 0.0));

    let mut order = Vec::new();
    let mut depths = Vec::new();
    let mut cost = 0.0;
    let mut terminated_by = Termination::Exhausted;

    while let Some((u, depth, edge_weight)) = queue.pop_front() {
        if term.max_depth.is_some_and(|d| depth > d) {
            terminated_by = Termination::DepthLimit;
            break;
        }
        if term.max_cost.is_some_and(|budget| cost + edge_weight > budget) {
            terminated_by = Termination::CostBudget;
            break;
        }
        cost += edge_weight;
        order.push(u);
        depths.push(depth);
        if term.targets.as_ref().is_some_and(|t| t.contains(&u)) {
            terminated_by = Termination::TargetHit;
            break;
        }
        for &(v, w) in g.adjacency(u) {
            if !discovered[v] {
                discovered[v] = true;
                queue.push_back((v, depth + 1, w));
            }
        }
    }

    Ok(BfsResult {
        order,
        depths,
        cost,
        terminated_by,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    pub start: NodeId,
    /// Tree edges as `(u, v, w)` with `u < v`, in the order Prim added them.
    pub edges: Vec<(NodeId, NodeId, f64)>,
    pub total_weight: f64,
}

/// `(weight, lo, hi, endpoint outside the tree)`.
type FrontierEdge = (OrderedFloat<f64>, NodeId, NodeId, NodeId);

/// Prim's algorithm over the component of `start`. Candidate edges are
/// ordered by `(weight, smaller endpoint, larger endpoint)`, so the tree is
/// unique even with tied weights.
pub fn prim_mst<T: Topology + ?Sized>(g: &T, start: NodeId) -> Result<SpanningTree> {
    g.check_node(start)?;
    let n = g.node_count();
    let mut in_tree = vec![false; n];
    let mut heap: BinaryHeap<Reverse<FrontierEdge>> = BinaryHeap::new();
    let mut edges = Vec::new();

    let push_frontier = |u: NodeId, in_tree: &[bool], heap: &mut BinaryHeap<_>| {
        for &(v, w) in g.adjacency(u) {
            if !in_tree[v] {
                heap.push(Reverse((OrderedFloat(w), u.min(v), u.max(v), v)));
            }
        }
    };

    in_tree[start] = true;
    push_frontier(start, &in_tree, &mut heap);
    while let Some(Reverse((OrderedFloat(w), lo, hi, v))) = heap.pop() {
        if in_tree[v] {
            continue;
        }
        in_tree[v] = true;
        edges.push((lo, hi, w));
        push_frontier(v, &in_tree, &mut heap);
    }

    let total_weight = edges.iter().map(|&(_, _, w)| w).sum();
    Ok(SpanningTree {
        start,
        edges,
        total_weight,
    })
}
