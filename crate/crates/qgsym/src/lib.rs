//! Finite groups as symmetry groups of quantum graphs.
//!
//! The pipeline: a finite permutation group is turned into a Cayley color
//! digraph, decorated into a simple graph whose automorphism group realizes
//! the given group ([`frucht`]), the graph is equipped with the metric-graph
//! Laplacian under Kirchhoff vertex conditions ([`fem`]), and edge
//! permutations are lifted to unitary operators on the discrete space and
//! certified (or refuted) as quantum-graph symmetries ([`symmetry`]).
//!
//! Numerical modules are generic over the scalar type through [`Real`];
//! the command-line front end and the concrete aliases below use `f64`.

#![forbid(unsafe_code)]

pub mod automorphism;
pub mod cli;
pub mod error;
pub mod fem;
pub mod frucht;
pub mod graph;
pub mod group;
pub mod report;
pub mod symmetry;

pub use error::{Error, Result};

/// Floating-point scalar for the numerical modules: `f32` or `f64`.
pub trait Real:
    nalgebra::RealField + num_traits::FromPrimitive + num_traits::ToPrimitive + Copy
{
}
impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar type.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}

// Concrete aliases at the default double precision.
pub type Discretization64 = fem::Discretization<f64>;
pub type Spectrum64 = fem::Spectrum<f64>;
pub type StateVector64 = fem::StateVector<f64>;
pub type SymmetryCertificate64 = symmetry::SymmetryCertificate<f64>;

/// Caps guarding the exhaustive searches.
#[derive(Debug, Clone, Copy)]
pub struct SearchCaps {
    /// Maximum node count for automorphism enumeration.
    pub node_aut: usize,
    /// Maximum node count for pairwise graph isomorphism testing.
    pub graph_iso: usize,
    /// Maximum group order for closure and group isomorphism search.
    pub group_order: usize,
}

impl SearchCaps {
    pub const DEFAULT_NODE_AUT: usize = 24;
    pub const DEFAULT_GRAPH_ISO: usize = 16;
    pub const DEFAULT_GROUP_ORDER: usize = 20160;

    /// Caps suitable for the group-realization pipeline, whose decorated
    /// graphs routinely exceed the conservative defaults.
    pub fn for_realization() -> Self {
        Self {
            node_aut: 128,
            ..Self::default()
        }
    }

    /// Applies the `QFG_CAP` environment override to every cap.
    pub fn with_env_override(mut self) -> Self {
        if let Ok(v) = std::env::var("QFG_CAP") {
            if let Ok(cap) = v.trim().parse::<usize>() {
                self.node_aut = cap;
                self.graph_iso = cap;
                self.group_order = cap;
            }
        }
        self
    }
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self {
            node_aut: Self::DEFAULT_NODE_AUT,
            graph_iso: Self::DEFAULT_GRAPH_ISO,
            group_order: Self::DEFAULT_GROUP_ORDER,
        }
    }
}
