//! Simple undirected graphs with canonical edge indexing, line graphs, and
//! structural classification.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::SearchCaps;

/// A finite simple graph. Edges are stored as `(tail, head)` with
/// `tail < head` and sorted lexicographically; the edge index is the rank in
/// that order. The stored orientation is the reference for all downstream
/// orientation bookkeeping.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleGraph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u},{v}) out of range for {node_count} nodes"
                )));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self {
            node_count,
            edges: normalized,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = (u.min(v), u.max(v));
        self.edges.binary_search(&(a, b)).is_ok()
    }

    /// Canonical index of the edge `{u, v}`.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = (u.min(v), u.max(v));
        self.edges.binary_search(&(a, b)).ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.node_count
    }

    /// Incident `(edge index, end)` pairs at `v`, sorted by edge index.
    /// `end` is 0 when `v` is the stored tail, 1 when it is the head.
    pub fn incident_ends(&self, v: usize) -> Vec<(usize, u8)> {
        let mut out = Vec::with_capacity(self.degree(v));
        for (e, &(t, h)) in self.edges.iter().enumerate() {
            if t == v {
                out.push((e, 0));
            } else if h == v {
                out.push((e, 1));
            }
        }
        out
    }

    /// Graph file format: `nodes N` then one `u v` line per edge, canonical
    /// sorted order.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("nodes {}\n", self.node_count);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let node_count = header
            .strip_prefix("nodes")
            .ok_or_else(|| Error::Parse(format!("graph file must start with `nodes N`, got `{header}`")))?
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse("bad node count".into()))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let u = it
                .next()
                .ok_or_else(|| Error::Parse(format!("bad edge line `{line}`")))?
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad edge line `{line}`")))?;
            let v = it
                .next()
                .ok_or_else(|| Error::Parse(format!("bad edge line `{line}`")))?
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad edge line `{line}`")))?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("bad edge line `{line}`")));
            }
            edges.push((u, v));
        }
        Self::new(node_count, &edges)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.node_count {
            let _ = writeln!(out, "  {v};");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// Structural facts consumed by the Harary/Whitney classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphClassification {
    pub connected: bool,
    pub isolated_nodes: Vec<usize>,
    /// Edge indices whose both endpoints have degree 1.
    pub isolated_edges: Vec<usize>,
    pub regular_degree: Option<usize>,
    pub node_count: usize,
    pub edge_count: usize,
}

pub fn classify(g: &SimpleGraph) -> GraphClassification {
    let isolated_nodes: Vec<usize> = (0..g.node_count()).filter(|&v| g.degree(v) == 0).collect();
    let isolated_edges: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| g.degree(u) == 1 && g.degree(v) == 1)
        .map(|(e, _)| e)
        .collect();
    let regular_degree = if g.node_count() > 0 {
        let d = g.degree(0);
        (1..g.node_count()).all(|v| g.degree(v) == d).then_some(d)
    } else {
        None
    };
    GraphClassification {
        connected: g.is_connected(),
        isolated_nodes,
        isolated_edges,
        regular_degree,
        node_count: g.node_count(),
        edge_count: g.edge_count(),
    }
}

/// Line graph: one node per edge of `g`, adjacent iff the edges share an
/// endpoint. Also returns the edge-of-`g` to node-of-result index map (the
/// identity under canonical edge indexing, returned for explicitness).
pub fn line_graph(g: &SimpleGraph) -> (SimpleGraph, Vec<usize>) {
    let m = g.edge_count();
    let mut edges = Vec::new();
    for v in 0..g.node_count() {
        let incident = g.incident_ends(v);
        for i in 0..incident.len() {
            for j in i + 1..incident.len() {
                edges.push((incident[i].0, incident[j].0));
            }
        }
    }
    let lg = SimpleGraph::new(m, &edges).expect("line graph of a simple graph is simple");
    (lg, (0..m).collect())
}

/// Adjacency-preserving node bijection search with degree pruning.
/// Returns a witness mapping nodes of `a` to nodes of `b` when isomorphic.
pub fn graphs_isomorphic(
    a: &SimpleGraph,
    b: &SimpleGraph,
    caps: &SearchCaps,
) -> Result<Option<Vec<usize>>> {
    for g in [a, b] {
        if g.node_count() > caps.graph_iso {
            return Err(Error::CapExceeded {
                what: "graph isomorphism node count",
                limit: caps.graph_iso,
                actual: g.node_count(),
            });
        }
    }
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return Ok(None);
    }
    let n = a.node_count();
    let invariant = |g: &SimpleGraph, v: usize| -> (usize, Vec<usize>) {
        let mut nbr_degs: Vec<usize> = g.neighbors(v).iter().map(|&u| g.degree(u)).collect();
        nbr_degs.sort_unstable();
        (g.degree(v), nbr_degs)
    };
    let inv_a: Vec<_> = (0..n).map(|v| invariant(a, v)).collect();
    let inv_b: Vec<_> = (0..n).map(|v| invariant(b, v)).collect();
    {
        let mut sa = inv_a.clone();
        let mut sb = inv_b.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return Ok(None);
        }
    }

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        a: &SimpleGraph,
        b: &SimpleGraph,
        inv_a: &[(usize, Vec<usize>)],
        inv_b: &[(usize, Vec<usize>)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        v: usize,
    ) -> bool {
        let n = a.node_count();
        if v == n {
            return true;
        }
        'candidates: for w in 0..n {
            if used[w] || inv_a[v] != inv_b[w] {
                continue;
            }
            for u in 0..v {
                if a.has_edge(u, v) != b.has_edge(map[u], w) {
                    continue 'candidates;
                }
            }
            map[v] = w;
            used[w] = true;
            if extend(a, b, inv_a, inv_b, map, used, v + 1) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }
    if extend(a, b, &inv_a, &inv_b, &mut map, &mut used, 0) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

// Named graphs. The paw, diamond and K4 are the Whitney exceptional triple;
// the others recur throughout the tests.

/// Triangle with a pendant edge: nodes 0..4, edges {01, 02, 12, 23}.
pub fn paw() -> SimpleGraph {
    SimpleGraph::new(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap()
}

/// K4 minus one edge: edges {01, 02, 12, 13, 23}.
pub fn diamond() -> SimpleGraph {
    SimpleGraph::new(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap()
}

pub fn complete(n: usize) -> SimpleGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    SimpleGraph::new(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> SimpleGraph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    SimpleGraph::new(n, &edges).unwrap()
}

pub fn path(n: usize) -> SimpleGraph {
    let edges: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    SimpleGraph::new(n, &edges).unwrap()
}

/// Star with `leaves` leaves; node 0 is the center.
pub fn star(leaves: usize) -> SimpleGraph {
    let edges: Vec<(usize, usize)> = (1..=leaves).map(|v| (0, v)).collect();
    SimpleGraph::new(leaves + 1, &edges).unwrap()
}

/// One edge plus two isolated nodes: 4 nodes, edge {01}.
pub fn edge_plus_two_isolated() -> SimpleGraph {
    SimpleGraph::new(4, &[(0, 1)]).unwrap()
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    prop_compose! {
        fn arb_graph(max_n: usize)(n in 1..=max_n)(
            n in Just(n),
            mask in proptest::collection::vec(any::<bool>(), n * (n.saturating_sub(1)) / 2),
        ) -> SimpleGraph {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            SimpleGraph::new(n, &edges).unwrap()
        }
    }

    proptest! {
        #[test]
        fn line_graph_node_count_is_edge_count(g in arb_graph(8)) {
            let (lg, _) = line_graph(&g);
            prop_assert_eq!(lg.node_count(), g.edge_count());
            let expected: usize = (0..g.node_count())
                .map(|v| g.degree(v) * g.degree(v).saturating_sub(1) / 2)
                .sum();
            prop_assert_eq!(lg.edge_count(), expected);
        }

        #[test]
        fn classify_connected_matches_reachability(g in arb_graph(8)) {
            let c = classify(&g);
            // BFS from node 0 by hand.
            let mut seen = vec![false; g.node_count()];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &v in g.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            prop_assert_eq!(c.connected, seen.iter().all(|&s| s));
        }

        #[test]
        fn isomorphism_invariant_under_relabeling(g in arb_graph(7), seed in any::<u64>()) {
            // Random relabeling of g.
            let n = g.node_count();
            let mut images: Vec<usize> = (0..n).collect();
            let mut state = seed;
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                images.swap(i, j);
            }
            let edges: Vec<(usize, usize)> =
                g.edges().iter().map(|&(u, v)| (images[u], images[v])).collect();
            let h = SimpleGraph::new(n, &edges).unwrap();
            let caps = SearchCaps::default();
            prop_assert!(graphs_isomorphic(&g, &h, &caps).unwrap().is_some());
        }
    }
}
