//! Node automorphisms A(G), edge symmetries A*(G), induced edge symmetries
//! A'(G), and the Harary/Whitney classification relating them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, classify, graphs_isomorphic, line_graph, SimpleGraph};
use crate::group::Permutation;
use crate::SearchCaps;

/// Iterated neighbor-color refinement. The stable coloring is preserved by
/// every automorphism, so the backtracking search only maps within classes.
fn refine_colors(g: &SimpleGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut colors: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    loop {
        let mut signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nbr: Vec<usize> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
                nbr.sort_unstable();
                (colors[v], nbr)
            })
            .collect();
        let mut palette: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        for sig in &signatures {
            let next = palette.len();
            palette.entry(sig.clone()).or_insert(next);
        }
        let new_colors: Vec<usize> = signatures.drain(..).map(|sig| palette[&sig]).collect();
        if new_colors == colors {
            return colors;
        }
        colors = new_colors;
    }
}

/// Enumerates all adjacency-preserving node permutations, sorted
/// lexicographically by image array.
pub fn node_automorphisms(g: &SimpleGraph, caps: &SearchCaps) -> Result<Vec<Permutation>> {
    if g.node_count() > caps.node_aut {
        return Err(Error::CapExceeded {
            what: "automorphism search node count",
            limit: caps.node_aut,
            actual: g.node_count(),
        });
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(vec![Permutation::identity(0)]);
    }
    let colors = refine_colors(g);

    // Process the most constrained classes first.
    let mut class_size = BTreeMap::new();
    for &c in &colors {
        *class_size.entry(c).or_insert(0usize) += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (class_size[&colors[v]], colors[v], v));

    let mut map = vec![usize::MAX; n];
    let mut inverse = vec![usize::MAX; n];
    let mut found: Vec<Permutation> = Vec::new();

    fn extend(
        g: &SimpleGraph,
        colors: &[usize],
        order: &[usize],
        depth: usize,
        map: &mut Vec<usize>,
        inverse: &mut Vec<usize>,
        found: &mut Vec<Permutation>,
    ) {
        let n = g.node_count();
        if depth == n {
            found.push(Permutation::from_images(map.clone()).expect("bijection by construction"));
            return;
        }
        let v = order[depth];
        'candidates: for w in 0..n {
            if inverse[w] != usize::MAX || colors[w] != colors[v] {
                continue;
            }
            // Mapped neighbors of v must land on neighbors of w ...
            for &u in g.neighbors(v) {
                if map[u] != usize::MAX && !g.has_edge(map[u], w) {
                    continue 'candidates;
                }
            }
            // ... and mapped preimages of neighbors of w must be neighbors
            // of v, so adjacency is preserved in both directions.
            for &x in g.neighbors(w) {
                if inverse[x] != usize::MAX && !g.has_edge(inverse[x], v) {
                    continue 'candidates;
                }
            }
            map[v] = w;
            inverse[w] = v;
            extend(g, colors, order, depth + 1, map, inverse, found);
            inverse[w] = usize::MAX;
            map[v] = usize::MAX;
        }
    }
    extend(g, &colors, &order, 0, &mut map, &mut inverse, &mut found);
    found.sort_by(|a, b| a.images().cmp(b.images()));
    Ok(found)
}

/// Edge symmetries as automorphisms of the line graph, transported through
/// the canonical edge-to-line-node index map.
pub fn edge_symmetries(g: &SimpleGraph, caps: &SearchCaps) -> Result<Vec<Permutation>> {
    let (lg, _map) = line_graph(g);
    if lg.node_count() > caps.node_aut {
        return Err(Error::CapExceeded {
            what: "edge symmetry search edge count",
            limit: caps.node_aut,
            actual: lg.node_count(),
        });
    }
    node_automorphisms(&lg, caps)
}

/// An edge permutation induced by a node automorphism, together with the
/// per-edge orientation bookkeeping relative to the canonical storage
/// orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedEdgeMap {
    /// Image edge index per edge: `edge_perm[e]` is the index of
    /// `{pi(tail_e), pi(head_e)}`.
    pub edge_perm: Permutation,
    /// `flips[e]` is true iff the node map reverses the stored orientation
    /// of edge `e`, i.e. `pi(tail_e) > pi(head_e)`.
    pub flips: Vec<bool>,
    pub source: Option<Permutation>,
}

impl InducedEdgeMap {
    pub fn identity(edge_count: usize) -> Self {
        Self {
            edge_perm: Permutation::identity(edge_count),
            flips: vec![false; edge_count],
            source: None,
        }
    }

    /// Wraps a raw edge permutation with no orientation flips.
    pub fn from_raw(edge_perm: Permutation) -> Self {
        let n = edge_perm.degree();
        Self {
            edge_perm,
            flips: vec![false; n],
            source: None,
        }
    }

    /// Wraps a raw edge permutation with explicit flips.
    pub fn from_raw_with_flips(edge_perm: Permutation, flips: Vec<bool>) -> Result<Self> {
        if flips.len() != edge_perm.degree() {
            return Err(Error::DimensionMismatch {
                expected: edge_perm.degree(),
                got: flips.len(),
            });
        }
        Ok(Self {
            edge_perm,
            flips,
            source: None,
        })
    }

    /// Composition matching node-map composition: if `self` comes from `p`
    /// and `other` from `q`, the result corresponds to `p ∘ q` (apply `q`
    /// first). Flip bits compose by XOR along the image chain.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let edge_perm = self.edge_perm.compose(&other.edge_perm)?;
        let m = edge_perm.degree();
        let flips = (0..m)
            .map(|e| other.flips[e] ^ self.flips[other.edge_perm.apply(e)])
            .collect();
        let source = match (&self.source, &other.source) {
            (Some(p), Some(q)) => Some(p.compose(q)?),
            _ => None,
        };
        Ok(Self {
            edge_perm,
            flips,
            source,
        })
    }
}

/// Checks whether `pi` preserves adjacency.
pub fn is_automorphism(pi: &Permutation, g: &SimpleGraph) -> bool {
    if pi.degree() != g.node_count() {
        return false;
    }
    g.edges()
        .iter()
        .all(|&(u, v)| g.has_edge(pi.apply(u), pi.apply(v)))
}

/// Induces the edge map of a node automorphism per
/// `edge_perm[e] = index of {pi(tail_e), pi(head_e)}`.
pub fn induce_edge_map(pi: &Permutation, g: &SimpleGraph) -> Result<InducedEdgeMap> {
    if !is_automorphism(pi, g) {
        return Err(Error::NotAnAutomorphism);
    }
    let mut images = Vec::with_capacity(g.edge_count());
    let mut flips = Vec::with_capacity(g.edge_count());
    for &(t, h) in g.edges() {
        let (it, ih) = (pi.apply(t), pi.apply(h));
        images.push(g.edge_index(it, ih).expect("automorphism preserves edges"));
        flips.push(it > ih);
    }
    Ok(InducedEdgeMap {
        edge_perm: Permutation::from_images(images)?,
        flips,
        source: Some(pi.clone()),
    })
}

/// Node automorphisms, edge symmetries, and induced edge symmetries of one
/// graph, with their group orders.
#[derive(Clone, Debug)]
pub struct SymmetryGroups {
    pub node_auts: Vec<Permutation>,
    pub edge_syms: Vec<Permutation>,
    /// One representative per distinct induced edge permutation.
    pub induced: Vec<InducedEdgeMap>,
    /// Orders of (A(G), A*(G), A'(G)).
    pub orders: (usize, usize, usize),
}

impl SymmetryGroups {
    pub fn contains_induced(&self, edge_perm: &Permutation) -> bool {
        self.induced.iter().any(|m| &m.edge_perm == edge_perm)
    }
}

pub fn symmetry_groups(g: &SimpleGraph, caps: &SearchCaps) -> Result<SymmetryGroups> {
    let node_auts = node_automorphisms(g, caps)?;
    let edge_syms = edge_symmetries(g, caps)?;
    let mut induced: Vec<InducedEdgeMap> = Vec::new();
    for pi in &node_auts {
        let m = induce_edge_map(pi, g)?;
        if !induced.iter().any(|x| x.edge_perm == m.edge_perm) {
            induced.push(m);
        }
    }
    induced.sort_by(|a, b| a.edge_perm.images().cmp(b.edge_perm.images()));
    let orders = (node_auts.len(), edge_syms.len(), induced.len());
    Ok(SymmetryGroups {
        node_auts,
        edge_syms,
        induced,
        orders,
    })
}

/// Which of the three Whitney exceptional graphs a graph matches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExceptionalGraph {
    Paw,
    Diamond,
    K4,
}

/// Outcome of the Harary/Whitney classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhitneyStatus {
    /// More than one isolated node or at least one isolated edge; the
    /// induced map A(G) -> A'(G) need not be injective.
    HararyFails,
    /// One of the three graphs on which A(G), A'(G), A*(G) are not pairwise
    /// isomorphic.
    Exceptional(ExceptionalGraph),
    /// Everything else: the three groups agree (asserted for connected
    /// graphs with at least three nodes, where the classification applies).
    AllIsomorphic,
}

impl WhitneyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            WhitneyStatus::HararyFails => "harary_fails",
            WhitneyStatus::Exceptional(ExceptionalGraph::Paw) => "exceptional_paw",
            WhitneyStatus::Exceptional(ExceptionalGraph::Diamond) => "exceptional_diamond",
            WhitneyStatus::Exceptional(ExceptionalGraph::K4) => "exceptional_k4",
            WhitneyStatus::AllIsomorphic => "all_isomorphic",
        }
    }
}

/// Classifies a graph against the Harary hypothesis and Whitney's
/// exceptional triple, and returns the three symmetry groups.
pub fn whitney_status(g: &SimpleGraph, caps: &SearchCaps) -> Result<(WhitneyStatus, SymmetryGroups)> {
    let groups = symmetry_groups(g, caps)?;
    let c = classify(g);
    if c.isolated_nodes.len() > 1 || !c.isolated_edges.is_empty() {
        return Ok((WhitneyStatus::HararyFails, groups));
    }
    if c.connected && g.node_count() >= 3 {
        for (target, tag) in [
            (graph::paw(), ExceptionalGraph::Paw),
            (graph::diamond(), ExceptionalGraph::Diamond),
            (graph::complete(4), ExceptionalGraph::K4),
        ] {
            if g.node_count() == target.node_count()
                && g.edge_count() == target.edge_count()
                && graphs_isomorphic(g, &target, caps)?.is_some()
            {
                return Ok((WhitneyStatus::Exceptional(tag), groups));
            }
        }
        // Whitney: off the exceptional list the three orders coincide.
        debug_assert_eq!(groups.orders.0, groups.orders.1);
        debug_assert_eq!(groups.orders.0, groups.orders.2);
    }
    Ok((WhitneyStatus::AllIsomorphic, groups))
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

    fn brute_force_count(g: &SimpleGraph) -> usize {
        fn rec(g: &SimpleGraph, perm: &mut Vec<usize>, k: usize, count: &mut usize) {
            let n = g.node_count();
            if k == n {
                if g.edges().iter().all(|&(u, v)| g.has_edge(perm[u], perm[v])) {
                    *count += 1;
                }
                return;
            }
            for i in k..n {
                perm.swap(k, i);
                rec(g, perm, k + 1, count);
                perm.swap(k, i);
            }
        }
        let mut perm: Vec<usize> = (0..g.node_count()).collect();
        let mut count = 0;
        rec(g, &mut perm, 0, &mut count);
        count
    }

    proptest! {
        #[test]
        fn search_agrees_with_brute_force_on_random_graphs(g in arb_graph(7)) {
            let caps = SearchCaps::default();
            let auts = node_automorphisms(&g, &caps).unwrap();
            prop_assert_eq!(auts.len(), brute_force_count(&g));
            // Every returned permutation really is an automorphism, and the
            // set is closed under composition.
            for a in &auts {
                prop_assert!(is_automorphism(a, &g));
            }
            for a in auts.iter().step_by(3) {
                for b in auts.iter().step_by(5) {
                    let c = a.compose(b).unwrap();
                    prop_assert!(auts.binary_search_by(|x| x.images().cmp(c.images())).is_ok());
                }
            }
        }
    }
}
