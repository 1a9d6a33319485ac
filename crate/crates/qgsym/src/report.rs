//! Machine-readable report structures emitted by the CLI. JSON is the
//! canonical output; the text renderings are formattings of the same data.
//! Schemas for each report live in `schemas/`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::automorphism::SymmetryGroups;
use crate::frucht::FruchtRealization;
use crate::group::Permutation;
use crate::symmetry::{
    ContinuityViolation, OperatorInfo, PawCounterexample, SymmetryCertificate, SymmetryReport,
};
use crate::Real;

fn to_f64<T: Real>(x: T) -> f64 {
    num_traits::ToPrimitive::to_f64(&x).unwrap_or(f64::NAN)
}

fn cycles(p: &Permutation) -> String {
    p.cycle_notation()
}

/// `aut` subcommand output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutReport {
    pub nodes: usize,
    pub edges: usize,
    pub node_aut_order: usize,
    pub edge_sym_order: usize,
    pub induced_order: usize,
    pub whitney_status: String,
    /// Greedy generating set of A(G), in disjoint-cycle notation.
    pub generators_in_cycle_notation: Vec<String>,
}

impl AutReport {
    pub fn new(
        graph: &crate::graph::SimpleGraph,
        whitney: crate::automorphism::WhitneyStatus,
        groups: &SymmetryGroups,
    ) -> crate::Result<Self> {
        let abstract_group = crate::group::FiniteGroup::from_permutation_set(groups.node_auts.clone())?;
        let perms = abstract_group.element_perms().expect("permutation-backed");
        let generators = abstract_group
            .generators()
            .iter()
            .map(|&i| cycles(&perms[i]))
            .collect();
        Ok(Self {
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            node_aut_order: groups.orders.0,
            edge_sym_order: groups.orders.1,
            induced_order: groups.orders.2,
            whitney_status: whitney.as_str().to_string(),
            generators_in_cycle_notation: generators,
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph: {} nodes, {} edges", self.nodes, self.edges);
        let _ = writeln!(out, "|A(G)|  = {}", self.node_aut_order);
        let _ = writeln!(out, "|A*(G)| = {}", self.edge_sym_order);
        let _ = writeln!(out, "|A'(G)| = {}", self.induced_order);
        let _ = writeln!(out, "whitney: {}", self.whitney_status);
        let _ = writeln!(out, "A(G) generators: {}", self.generators_in_cycle_notation.join(" "));
        out
    }
}

/// `spectrum` subcommand output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub nodes: usize,
    pub edges: usize,
    pub mesh: usize,
    pub modes: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicity_clusters: Vec<ClusterReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterReport {
    pub start: usize,
    pub count: usize,
    pub value: f64,
}

impl SpectrumReport {
    pub fn new<T: Real>(
        d: &crate::fem::Discretization<T>,
        sp: &crate::fem::Spectrum<T>,
        cluster_tol: T,
    ) -> Self {
        let eigenvalues: Vec<f64> = sp.eigenvalues.iter().map(|&x| to_f64(x)).collect();
        let multiplicity_clusters = crate::fem::multiplicity_clusters(&sp.eigenvalues, cluster_tol)
            .into_iter()
            .map(|(start, count)| ClusterReport {
                start,
                count,
                value: eigenvalues[start],
            })
            .collect();
        Self {
            nodes: d.graph.node_count(),
            edges: d.graph.edge_count(),
            mesh: d.mesh_n,
            modes: sp.eigenvalues.len(),
            eigenvalues,
            multiplicity_clusters,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "graph: {} nodes, {} edges; mesh {}, {} modes",
            self.nodes, self.edges, self.mesh, self.modes
        );
        for c in &self.multiplicity_clusters {
            let _ = writeln!(
                out,
                "lambda[{}..{}] = {:.9} (multiplicity {})",
                c.start,
                c.start + c.count,
                c.value,
                c.count
            );
        }
        out
    }

    /// Eigenvector traces per edge: `mode,edge,i,x,value` rows.
    pub fn render_csv<T: Real>(
        d: &crate::fem::Discretization<T>,
        sp: &crate::fem::Spectrum<T>,
    ) -> String {
        let mut out = String::from("mode,edge,i,x,value\n");
        let per_edge = d.dofs_per_edge();
        for (k, phi) in sp.eigenvectors.iter().enumerate() {
            for e in 0..d.graph.edge_count() {
                let off = d.edge_dof_offset[e];
                for i in 0..per_edge {
                    let x = i as f64 / d.mesh_n as f64;
                    let _ = writeln!(out, "{k},{e},{i},{x},{}", to_f64(phi[off + i]));
                }
            }
        }
        out
    }
}

/// One certified operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    /// "induced", "raw_edge" or "phase".
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_node_perm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_perm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flips: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub domain_invariant: bool,
    pub form_preserved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutator_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolution_residual: Option<f64>,
    pub verdict: bool,
    pub violations: Vec<ViolationReport>,
}

/// One violated continuity equation `psi_a(node) = psi_b(node)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationReport {
    pub node: usize,
    pub edge_a: usize,
    pub end_a: u8,
    pub edge_b: usize,
    pub end_b: u8,
    pub residual: f64,
}

impl CertificateReport {
    pub fn new<T: Real>(cert: &SymmetryCertificate<T>) -> Self {
        let (kind, source_node_perm, edge_perm, flips, theta) = match &cert.operator {
            OperatorInfo::Induced {
                source,
                edge_perm,
                flips,
            } => (
                "induced".to_string(),
                Some(cycles(source)),
                Some(cycles(edge_perm)),
                Some(flips.clone()),
                None,
            ),
            OperatorInfo::RawEdge { edge_perm, flips } => (
                "raw_edge".to_string(),
                None,
                Some(cycles(edge_perm)),
                Some(flips.clone()),
                None,
            ),
            OperatorInfo::Phase { theta } => {
                ("phase".to_string(), None, None, None, Some(*theta))
            }
        };
        Self {
            kind,
            source_node_perm,
            edge_perm,
            flips,
            theta,
            domain_invariant: cert.domain_invariant,
            form_preserved: cert.form_preserved,
            commutator_residual: cert.commutator_residual.map(to_f64),
            evolution_residual: cert.evolution_residual.map(to_f64),
            verdict: cert.verdict,
            violations: cert.violations.iter().map(ViolationReport::new).collect(),
        }
    }

    fn describe(&self) -> String {
        match self.kind.as_str() {
            "induced" => format!(
                "induced by node map {}",
                self.source_node_perm.as_deref().unwrap_or("?")
            ),
            "raw_edge" => format!("edge symmetry {}", self.edge_perm.as_deref().unwrap_or("?")),
            _ => format!("phase e^(i*{:.6})", self.theta.unwrap_or(f64::NAN)),
        }
    }
}

impl ViolationReport {
    pub fn new<T: Real>(v: &ContinuityViolation<T>) -> Self {
        Self {
            node: v.node,
            edge_a: v.edge_a,
            end_a: v.end_a,
            edge_b: v.edge_b,
            end_b: v.end_b,
            residual: to_f64(v.residual),
        }
    }
}

/// `verify` subcommand output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub nodes: usize,
    pub edges: usize,
    pub mesh: usize,
    pub tol: f64,
    pub evolution_tol: f64,
    pub seed: u64,
    pub node_aut_order: usize,
    pub edge_sym_order: usize,
    pub induced_order: usize,
    pub whitney_status: String,
    /// One certificate per node automorphism.
    pub induced: Vec<CertificateReport>,
    /// Edge symmetries not induced by node automorphisms, flips = false.
    pub non_induced: Vec<CertificateReport>,
    /// Global phase probes (U(1) subgroup).
    pub phases: Vec<CertificateReport>,
    /// Lower bound only: the realized symmetry group contains at least the
    /// image of A(G) (and always U(1)); equality is never claimed.
    pub realized_order_at_least: usize,
    pub all_induced_pass: bool,
}

impl VerifyReport {
    pub fn new<T: Real>(
        graph: &crate::graph::SimpleGraph,
        mesh: usize,
        tol: f64,
        evolution_tol: f64,
        seed: u64,
        report: &SymmetryReport<T>,
    ) -> Self {
        Self {
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            mesh,
            tol,
            evolution_tol,
            seed,
            node_aut_order: report.groups.orders.0,
            edge_sym_order: report.groups.orders.1,
            induced_order: report.groups.orders.2,
            whitney_status: report.whitney.as_str().to_string(),
            induced: report.induced.iter().map(CertificateReport::new).collect(),
            non_induced: report
                .non_induced
                .iter()
                .map(CertificateReport::new)
                .collect(),
            phases: report.phases.iter().map(CertificateReport::new).collect(),
            realized_order_at_least: report.realized_order_at_least,
            all_induced_pass: report.all_induced_pass,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "graph: {} nodes, {} edges; mesh {}; |A|={} |A*|={} |A'|={} ({})",
            self.nodes,
            self.edges,
            self.mesh,
            self.node_aut_order,
            self.edge_sym_order,
            self.induced_order,
            self.whitney_status
        );
        for group in [&self.induced, &self.non_induced, &self.phases] {
            for c in group {
                let _ = writeln!(
                    out,
                    "{} {}: domain={} form={}{}{}",
                    if c.verdict { "PASS" } else { "FAIL" },
                    c.describe(),
                    c.domain_invariant,
                    c.form_preserved,
                    c.commutator_residual
                        .map(|r| format!(" commutator={r:.3e}"))
                        .unwrap_or_default(),
                    c.evolution_residual
                        .map(|r| format!(" evolution={r:.3e}"))
                        .unwrap_or_default(),
                );
                for v in &c.violations {
                    let _ = writeln!(
                        out,
                        "  violated at node {}: edge {} (end {}) vs edge {} (end {}), residual {:.3e}",
                        v.node, v.edge_a, v.end_a, v.edge_b, v.end_b, v.residual
                    );
                }
            }
        }
        let _ = writeln!(
            out,
            "realized symmetry order >= {} (subgroup containment only)",
            self.realized_order_at_least
        );
        out
    }
}

/// `build` subcommand JSON annotation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildAnnotation {
    pub group_order: usize,
    pub nodes: usize,
    pub edges: usize,
    pub group_nodes: Vec<usize>,
    /// Keyed `"tail->head:color"` for directed arcs of non-involutions and
    /// `"tail-head:color"` for the collapsed edges of involutions; values
    /// are the gadget-internal nodes in positional order.
    pub gadget_of_arc: BTreeMap<String, Vec<usize>>,
}

impl BuildAnnotation {
    pub fn new(real: &FruchtRealization) -> Self {
        let mut gadget_of_arc = BTreeMap::new();
        for g in &real.gadgets {
            let key = if g.involution {
                format!("{}-{}:{}", g.tail, g.head, g.color)
            } else {
                format!("{}->{}:{}", g.tail, g.head, g.color)
            };
            gadget_of_arc.insert(key, g.nodes.clone());
        }
        Self {
            group_order: real.group_nodes.len(),
            nodes: real.graph.node_count(),
            edges: real.graph.edge_count(),
            group_nodes: real.group_nodes.clone(),
            gadget_of_arc,
        }
    }
}

/// `realize` subcommand output: the full pipeline report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizeReport {
    pub group_order: usize,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub aut_order: usize,
    pub isomorphic: bool,
    /// Witness map group element -> index into the sorted automorphism
    /// list, when the realization holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    pub verify: VerifyReport,
}

impl RealizeReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "group order {} -> graph with {} nodes, {} edges",
            self.group_order, self.graph_nodes, self.graph_edges
        );
        let _ = writeln!(
            out,
            "A(G) order {}: {}",
            self.aut_order,
            if self.isomorphic {
                "isomorphic to the input group"
            } else {
                "NOT isomorphic to the input group"
            }
        );
        out.push_str(&self.verify.render_text());
        out
    }
}

/// `counterexample paw` output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub graph: String,
    pub nodes: usize,
    pub edges: usize,
    pub center_node: usize,
    pub node_aut_order: usize,
    pub edge_sym_order: usize,
    pub induced_order: usize,
    /// The offending edge symmetry in 0-based cycle notation, and the same
    /// permutation in the 1-based e-labels used in narrative descriptions.
    pub edge_perm: String,
    pub edge_perm_labels: String,
    pub offending: CertificateReport,
}

impl CounterexampleReport {
    pub fn new<T: Real>(cx: &PawCounterexample<T>) -> Self {
        let offending = CertificateReport::new(&cx.offending);
        let edge_perm = offending.edge_perm.clone().unwrap_or_default();
        // 1-based display labels: edge i is e(i+1).
        let edge_perm_labels = match &cx.offending.operator {
            OperatorInfo::RawEdge { edge_perm, .. } | OperatorInfo::Induced { edge_perm, .. } => {
                let mut s = String::new();
                let mut seen = vec![false; edge_perm.degree()];
                for start in 0..edge_perm.degree() {
                    if seen[start] || edge_perm.apply(start) == start {
                        seen[start] = true;
                        continue;
                    }
                    s.push('(');
                    let mut p = start;
                    let mut first = true;
                    while !seen[p] {
                        seen[p] = true;
                        if !first {
                            s.push(' ');
                        }
                        let _ = write!(s, "e{}", p + 1);
                        first = false;
                        p = edge_perm.apply(p);
                    }
                    s.push(')');
                }
                s
            }
            _ => String::new(),
        };
        Self {
            graph: "paw".to_string(),
            nodes: cx.graph.node_count(),
            edges: cx.graph.edge_count(),
            center_node: cx.center_node,
            node_aut_order: cx.node_aut_order,
            edge_sym_order: cx.edge_sym_order,
            induced_order: cx.induced_order,
            edge_perm,
            edge_perm_labels,
            offending,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "paw graph ({} nodes, {} edges): |A|={}, |A*|={}, |A'|={}",
            self.nodes, self.edges, self.node_aut_order, self.edge_sym_order, self.induced_order
        );
        let _ = writeln!(
            out,
            "edge symmetry {} [{}] is not induced by any node automorphism",
            self.edge_perm_labels, self.edge_perm
        );
        let _ = writeln!(
            out,
            "domain invariant: {} -- the induced unitary breaks vertex continuity:",
            self.offending.domain_invariant
        );
        for v in &self.offending.violations {
            let _ = writeln!(
                out,
                "  at node {}: edge e{} (end {}) vs edge e{} (end {}), residual {:.3e}{}",
                v.node,
                v.edge_a + 1,
                v.end_a,
                v.edge_b + 1,
                v.end_b,
                v.residual,
                if v.node == self.center_node {
                    "  <- center vertex"
                } else {
                    ""
                }
            );
        }
        out
    }
}
