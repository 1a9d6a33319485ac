//! Builds a finite connected simple graph whose automorphism group realizes
//! a given finite group, by gadget replacement on the Cayley color digraph,
//! and verifies the realization exhaustively.
//!
//! Gadget scheme, per generator index `i`:
//!
//! * non-involution, arc `u -> v`: internal path `u - p - q - v` with a
//!   pendant path of length `2i+1` at `p` and `2i+2` at `q`. The unequal
//!   pendants encode the arc direction, the lengths encode the color.
//! * involution, Cayley edge `{u, v}` (its two arcs collapse): internal path
//!   `u - p - v` with a pendant path of length `2i+2` at `p`.
//!
//! Pendant lengths are pairwise distinct across generator indices and across
//! the two internal positions. Correctness is not assumed: every realization
//! in the corpus is verified by [`verify_realization`].

use std::collections::HashMap;

use crate::automorphism::node_automorphisms;
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::group::{groups_isomorphic, FiniteGroup, Permutation};
use crate::SearchCaps;

/// The decoration scheme for one generator color.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetSpec {
    pub color: usize,
    pub involution: bool,
}

impl GadgetSpec {
    /// Pendant path lengths: `(at_p, at_q)`. The asymmetric gadget hangs
    /// `2i+1` off the tail-side node and `2i+2` off the head-side one; the
    /// symmetric gadget hangs `2i+2` off its single internal node.
    pub fn pendant_lengths(&self) -> (usize, Option<usize>) {
        if self.involution {
            (2 * self.color + 2, None)
        } else {
            (2 * self.color + 1, Some(2 * self.color + 2))
        }
    }
}

/// One replaced Cayley arc (or undirected Cayley edge, for involutions).
#[derive(Clone, Debug)]
pub struct Gadget {
    pub tail: usize,
    pub head: usize,
    pub color: usize,
    pub involution: bool,
    /// Gadget-internal nodes in positional order: `[p, q, s_1.., t_1..]` for
    /// the asymmetric gadget, `[p, t_1..]` for the symmetric one.
    pub nodes: Vec<usize>,
}

/// A Frucht-style realization: the decorated graph plus the bookkeeping
/// needed to read group structure back off the graph.
#[derive(Clone, Debug)]
pub struct FruchtRealization {
    pub graph: SimpleGraph,
    /// Nodes carrying group elements; node `u` is element `u`.
    pub group_nodes: Vec<usize>,
    pub gadgets: Vec<Gadget>,
}

impl FruchtRealization {
    fn gadget_lookup(&self) -> HashMap<(usize, usize, usize), usize> {
        self.gadgets
            .iter()
            .enumerate()
            .map(|(i, g)| ((g.tail, g.head, g.color), i))
            .collect()
    }
}

/// Builds the decorated graph. Group order 1 yields the single-node graph.
pub fn frucht_graph(group: &FiniteGroup) -> Result<FruchtRealization> {
    if group.generators().contains(&group.identity()) {
        return Err(Error::IdentityGenerator);
    }
    let order = group.order();
    if order == 1 {
        return Ok(FruchtRealization {
            graph: SimpleGraph::new(1, &[])?,
            group_nodes: vec![0],
            gadgets: Vec::new(),
        });
    }

    let mut next_node = order;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut gadgets: Vec<Gadget> = Vec::new();

    let pendant = |edges: &mut Vec<(usize, usize)>,
                       next_node: &mut usize,
                       at: usize,
                       len: usize|
     -> Vec<usize> {
        let mut chain = Vec::with_capacity(len);
        let mut prev = at;
        for _ in 0..len {
            let t = *next_node;
            *next_node += 1;
            edges.push((prev, t));
            chain.push(t);
            prev = t;
        }
        chain
    };

    for (color, &gen) in group.generators().iter().enumerate() {
        let spec = GadgetSpec {
            color,
            involution: group.is_involution(gen),
        };
        let (len_p, len_q) = spec.pendant_lengths();
        for u in 0..order {
            let v = group.multiply(u, gen);
            if spec.involution {
                if u > v {
                    continue; // each unordered Cayley edge once
                }
                let p = next_node;
                next_node += 1;
                edges.push((u, p));
                edges.push((p, v));
                let mut nodes = vec![p];
                nodes.extend(pendant(&mut edges, &mut next_node, p, len_p));
                gadgets.push(Gadget {
                    tail: u,
                    head: v,
                    color,
                    involution: spec.involution,
                    nodes,
                });
            } else {
                let p = next_node;
                let q = next_node + 1;
                next_node += 2;
                edges.push((u, p));
                edges.push((p, q));
                edges.push((q, v));
                let mut nodes = vec![p, q];
                nodes.extend(pendant(&mut edges, &mut next_node, p, len_p));
                nodes.extend(pendant(&mut edges, &mut next_node, q, len_q.unwrap()));
                gadgets.push(Gadget {
                    tail: u,
                    head: v,
                    color,
                    involution: spec.involution,
                    nodes,
                });
            }
        }
    }

    Ok(FruchtRealization {
        graph: SimpleGraph::new(next_node, &edges)?,
        group_nodes: (0..order).collect(),
        gadgets,
    })
}

/// The node automorphism extending the left translation `u -> a·u`
/// gadget-wise. Exists by construction; the tests check it is an
/// automorphism of the built graph.
pub fn left_translation(real: &FruchtRealization, group: &FiniteGroup, a: usize) -> Permutation {
    let n = real.graph.node_count();
    let mut images = vec![usize::MAX; n];
    for &u in &real.group_nodes {
        images[u] = group.multiply(a, u);
    }
    let lookup = real.gadget_lookup();
    for g in &real.gadgets {
        let (mut t, mut h) = (group.multiply(a, g.tail), group.multiply(a, g.head));
        if g.involution && t > h {
            std::mem::swap(&mut t, &mut h);
        }
        let target = &real.gadgets[lookup[&(t, h, g.color)]];
        for (&from, &to) in g.nodes.iter().zip(&target.nodes) {
            images[from] = to;
        }
    }
    Permutation::from_images(images).expect("left translation is a bijection")
}

/// Computes A(graph) exhaustively, abstracts it to a multiplication table,
/// and searches for an isomorphism with `group`. Returns the witness map
/// (group element -> index into the sorted automorphism list) when the
/// realization holds.
pub fn verify_realization(
    group: &FiniteGroup,
    graph: &SimpleGraph,
    caps: &SearchCaps,
) -> Result<Option<Vec<usize>>> {
    let auts = node_automorphisms(graph, caps)?;
    let abstract_group = FiniteGroup::from_permutation_set(auts)?;
    groups_isomorphic(group, &abstract_group, caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, dihedral_4, klein_four, symmetric_3};

    fn caps() -> SearchCaps {
        SearchCaps::for_realization()
    }

    #[test]
    fn trivial_group_gives_single_node() {
        let real = frucht_graph(&FiniteGroup::trivial(1)).unwrap();
        assert_eq!(real.graph.node_count(), 1);
        assert_eq!(real.graph.edge_count(), 0);
        assert!(verify_realization(&FiniteGroup::trivial(1), &real.graph, &caps())
            .unwrap()
            .is_some());
    }

    #[test]
    fn c2_gadget_is_the_expected_five_node_graph() {
        let real = frucht_graph(&cyclic(2)).unwrap();
        // nodes {0=identity, 1=g, 2=p, 3=t1, 4=t2},
        // edges {0p, p1, p t1, t1 t2}.
        assert_eq!(real.graph.node_count(), 5);
        assert_eq!(real.graph.edges(), &[(0, 2), (1, 2), (2, 3), (3, 4)]);
        let auts = node_automorphisms(&real.graph, &caps()).unwrap();
        assert_eq!(auts.len(), 2);
    }

    #[test]
    fn c3_realization_sizes_and_order() {
        let real = frucht_graph(&cyclic(3)).unwrap();
        // 3 group nodes + 3 gadgets x (2 internal + 1 + 2 pendant nodes).
        assert_eq!(real.graph.node_count(), 18);
        assert_eq!(real.graph.edge_count(), 18);
        assert!(real.graph.is_connected());
        let auts = node_automorphisms(&real.graph, &caps()).unwrap();
        assert_eq!(auts.len(), 3);
    }

    #[test]
    fn realization_is_connected_and_simple_on_corpus() {
        for group in [
            cyclic(1),
            cyclic(2),
            cyclic(3),
            cyclic(4),
            cyclic(5),
            cyclic(6),
            klein_four(),
            symmetric_3(),
            dihedral_4(),
        ] {
            let real = frucht_graph(&group).unwrap();
            assert!(real.graph.is_connected());
            // SimpleGraph construction already rejects loops and duplicates.
            let expected_group_degree = group
                .generators()
                .iter()
                .map(|&g| if group.is_involution(g) { 1 } else { 2 })
                .sum::<usize>();
            for &u in &real.group_nodes {
                if group.order() > 1 {
                    assert_eq!(real.graph.degree(u), expected_group_degree);
                }
            }
        }
    }

    #[test]
    fn left_translations_extend_to_automorphisms() {
        for group in [cyclic(3), cyclic(4), klein_four(), symmetric_3(), dihedral_4()] {
            let real = frucht_graph(&group).unwrap();
            for a in 0..group.order() {
                let pi = left_translation(&real, &group, a);
                assert!(crate::automorphism::is_automorphism(&pi, &real.graph));
                for &u in &real.group_nodes {
                    assert_eq!(pi.apply(u), group.multiply(a, u));
                }
            }
        }
    }

    #[test]
    fn verify_realization_small_groups() {
        for group in [cyclic(2), cyclic(3), cyclic(4), klein_four()] {
            let real = frucht_graph(&group).unwrap();
            let witness = verify_realization(&group, &real.graph, &caps()).unwrap();
            assert!(witness.is_some(), "order {}", group.order());
        }
    }

    #[test]
    fn pendant_lengths_are_pairwise_distinct() {
        // Any mix of involution and non-involution colors keeps the pendant
        // lengths distinct across colors and across the two positions.
        for invol_mask in 0..16u32 {
            let mut lengths = Vec::new();
            for color in 0..4 {
                let spec = GadgetSpec {
                    color,
                    involution: invol_mask >> color & 1 == 1,
                };
                let (p, q) = spec.pendant_lengths();
                lengths.push(p);
                if let Some(q) = q {
                    lengths.push(q);
                }
            }
            let mut sorted = lengths.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), lengths.len(), "mask {invol_mask}");
        }
    }

    #[test]
    fn k3_does_not_realize_c3() {
        // A(K3) is S3 of order 6.
        let witness =
            verify_realization(&cyclic(3), &crate::graph::complete(3), &caps()).unwrap();
        assert!(witness.is_none());
    }
}
