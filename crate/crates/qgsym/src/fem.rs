//! Discretization of the metric-graph Laplacian: broken per-edge P1
//! elements with explicit vertex-continuity constraints, spectra of the
//! constrained operator, and unitary modal time evolution.
//!
//! Every edge is identified with the unit interval and carries its own DOFs
//! (endpoints duplicated), so edge permutations act on coefficient vectors
//! by block permutation. Vertex continuity is a constraint matrix `C`; the
//! discrete form domain is `ker C`, and the Kirchhoff flux condition is the
//! natural condition of the stiffness form on that kernel, never assembled
//! explicitly.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::{real, Real};

/// Complex coefficient vector in the broken space.
pub type StateVector<T> = DVector<Complex<T>>;

/// Absolute tolerance for membership in the discrete form domain.
pub const DOMAIN_TOL: f64 = 1e-10;

/// A graph plus a uniform per-edge mesh resolution.
#[derive(Clone, Debug)]
pub struct QuantumGraphSpec {
    pub graph: SimpleGraph,
    /// Subintervals per edge; at least 2.
    pub mesh_n: usize,
}

/// One continuity equation `psi_a(v) = psi_b(v)` between two edge endpoints
/// meeting at a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityRow {
    pub node: usize,
    pub edge_a: usize,
    pub end_a: u8,
    pub dof_a: usize,
    pub edge_b: usize,
    pub end_b: u8,
    pub dof_b: usize,
}

/// Assembled matrices of the broken P1 space.
#[derive(Clone, Debug)]
pub struct Discretization<T: Real> {
    pub graph: SimpleGraph,
    pub mesh_n: usize,
    pub dof_count: usize,
    /// Block-diagonal stiffness, one identical per-edge block.
    pub stiffness: DMatrix<T>,
    /// Block-diagonal consistent mass; symmetric positive definite.
    pub mass: DMatrix<T>,
    /// Continuity constraints; the discrete form domain is its kernel.
    pub constraints: DMatrix<T>,
    pub continuity_rows: Vec<ContinuityRow>,
    /// Mass-orthonormal basis of `ker C` (dof_count x domain_dim). Rows of
    /// DOFs identified by continuity are bitwise equal, which makes the
    /// domain-invariance checks downstream exact.
    pub domain_basis: DMatrix<T>,
    /// `domain_basis^T * stiffness * domain_basis`, symmetrized.
    pub restricted_stiffness: DMatrix<T>,
    pub edge_dof_offset: Vec<usize>,
    /// Continuity class per DOF (one class per graph node plus one per
    /// interior DOF).
    pub dof_class: Vec<usize>,
}

impl<T: Real> Discretization<T> {
    pub fn domain_dim(&self) -> usize {
        self.domain_basis.ncols()
    }

    pub fn dofs_per_edge(&self) -> usize {
        self.mesh_n + 1
    }

    /// DOF index of an edge endpoint (`end` 0 = stored tail, 1 = head).
    pub fn endpoint_dof(&self, edge: usize, end: u8) -> usize {
        self.edge_dof_offset[edge] + if end == 0 { 0 } else { self.mesh_n }
    }

    /// Largest continuity-equation residual of a state.
    pub fn constraint_residual(&self, psi: &StateVector<T>) -> T {
        let mut worst = T::zero();
        for row in &self.continuity_rows {
            let d = psi[row.dof_a] - psi[row.dof_b];
            worst = worst.max(nalgebra::ComplexField::modulus(d));
        }
        worst
    }

    pub fn in_domain(&self, psi: &StateVector<T>) -> bool {
        self.constraint_residual(psi) <= real(DOMAIN_TOL)
    }

    /// Mass inner product norm.
    pub fn mass_norm(&self, psi: &StateVector<T>) -> T {
        let (re, im) = split(psi);
        let q = (&re.transpose() * &self.mass * &re)[(0, 0)]
            + (&im.transpose() * &self.mass * &im)[(0, 0)];
        q.max(T::zero()).sqrt()
    }
}

pub(crate) fn split<T: Real>(psi: &StateVector<T>) -> (DVector<T>, DVector<T>) {
    (psi.map(|c| c.re), psi.map(|c| c.im))
}

pub(crate) fn join<T: Real>(re: DVector<T>, im: DVector<T>) -> StateVector<T> {
    DVector::from_iterator(
        re.len(),
        re.iter().zip(im.iter()).map(|(&r, &i)| Complex::new(r, i)),
    )
}

/// Per-edge P1 stiffness block `(1/h) tridiag(-1, 2, -1)` with unit corner
/// entries.
fn stiffness_block<T: Real>(mesh_n: usize) -> DMatrix<T> {
    let n = mesh_n + 1;
    let inv_h = T::from_usize(mesh_n).unwrap();
    let two = inv_h + inv_h;
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = if i == 0 || i == n - 1 { inv_h } else { two };
        if i + 1 < n {
            k[(i, i + 1)] = -inv_h;
            k[(i + 1, i)] = -inv_h;
        }
    }
    k
}

/// Per-edge consistent mass block `(h/6) tridiag(1, 4, 1)` with corner
/// entries 2.
fn mass_block<T: Real>(mesh_n: usize) -> DMatrix<T> {
    let n = mesh_n + 1;
    let h6 = T::one() / T::from_usize(6 * mesh_n).unwrap();
    let four = h6 * real::<T>(4.0);
    let two = h6 + h6;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = if i == 0 || i == n - 1 { two } else { four };
        if i + 1 < n {
            m[(i, i + 1)] = h6;
            m[(i + 1, i)] = h6;
        }
    }
    m
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let root = self.find(self.0[x]);
            self.0[x] = root;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller index as representative for determinism.
        if ra < rb {
            self.0[rb] = ra;
        } else {
            self.0[ra] = rb;
        }
    }
}

/// Assembles the broken-space matrices, the continuity constraints, and the
/// mass-orthonormal kernel basis.
pub fn discretize<T: Real>(spec: &QuantumGraphSpec) -> Result<Discretization<T>> {
    if spec.mesh_n < 2 {
        return Err(Error::MeshTooCoarse(spec.mesh_n));
    }
    if !spec.graph.is_connected() {
        return Err(Error::Disconnected);
    }
    if spec.graph.edge_count() == 0 {
        return Err(Error::InvalidGraph(
            "graph must have at least one edge to discretize".into(),
        ));
    }
    let graph = spec.graph.clone();
    let mesh_n = spec.mesh_n;
    let per_edge = mesh_n + 1;
    let m = graph.edge_count();
    let dof_count = m * per_edge;
    let edge_dof_offset: Vec<usize> = (0..m).map(|e| e * per_edge).collect();

    let kb = stiffness_block::<T>(mesh_n);
    let mb = mass_block::<T>(mesh_n);
    let mut stiffness = DMatrix::zeros(dof_count, dof_count);
    let mut mass = DMatrix::zeros(dof_count, dof_count);
    for e in 0..m {
        let off = edge_dof_offset[e];
        stiffness.view_mut((off, off), (per_edge, per_edge)).copy_from(&kb);
        mass.view_mut((off, off), (per_edge, per_edge)).copy_from(&mb);
    }

    // Continuity rows: consecutive pairing of the incident edge ends at each
    // node, sorted by edge index. Rank per node is deg(v) - 1.
    let mut continuity_rows = Vec::new();
    for v in 0..graph.node_count() {
        let ends = graph.incident_ends(v);
        for w in ends.windows(2) {
            let (edge_a, end_a) = w[0];
            let (edge_b, end_b) = w[1];
            let dof_a = edge_dof_offset[edge_a] + if end_a == 0 { 0 } else { mesh_n };
            let dof_b = edge_dof_offset[edge_b] + if end_b == 0 { 0 } else { mesh_n };
            continuity_rows.push(ContinuityRow {
                node: v,
                edge_a,
                end_a,
                dof_a,
                edge_b,
                end_b,
                dof_b,
            });
        }
    }
    let mut constraints = DMatrix::zeros(continuity_rows.len(), dof_count);
    for (r, row) in continuity_rows.iter().enumerate() {
        constraints[(r, row.dof_a)] = T::one();
        constraints[(r, row.dof_b)] = -T::one();
    }

    // Kernel of C, combinatorially: DOFs tied by continuity form classes
    // (one per graph node, one per interior DOF); the indicator vectors of
    // the classes span ker C exactly.
    let mut uf = UnionFind::new(dof_count);
    for row in &continuity_rows {
        uf.union(row.dof_a, row.dof_b);
    }
    let mut dof_class = vec![usize::MAX; dof_count];
    let mut class_count = 0usize;
    let mut class_of_root = std::collections::HashMap::new();
    for dof in 0..dof_count {
        let root = uf.find(dof);
        let class = *class_of_root.entry(root).or_insert_with(|| {
            let c = class_count;
            class_count += 1;
            c
        });
        dof_class[dof] = class;
    }
    let kdim = class_count;
    debug_assert_eq!(dof_count - kdim, continuity_rows.len());

    // Restricted mass and stiffness over the indicator basis, assembled
    // exactly from the per-edge blocks.
    let mut mass0 = DMatrix::<T>::zeros(kdim, kdim);
    let mut stiff0 = DMatrix::<T>::zeros(kdim, kdim);
    for e in 0..m {
        let off = edge_dof_offset[e];
        for i in 0..per_edge {
            for j in 0..per_edge {
                let (ci, cj) = (dof_class[off + i], dof_class[off + j]);
                mass0[(ci, cj)] += mb[(i, j)];
                stiff0[(ci, cj)] += kb[(i, j)];
            }
        }
    }

    // Mass-orthonormalize: with M0 = L L^T, the basis B = B0 L^{-T} has
    // B^T M B = I, and its rows stay constant on each class.
    let chol = nalgebra::Cholesky::new(mass0)
        .ok_or_else(|| Error::Numerical("restricted mass matrix not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .solve_lower_triangular(&DMatrix::<T>::identity(kdim, kdim))
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let u = l_inv.transpose(); // L^{-T}
    let mut domain_basis = DMatrix::<T>::zeros(dof_count, kdim);
    for dof in 0..dof_count {
        domain_basis.row_mut(dof).copy_from(&u.row(dof_class[dof]));
    }
    let mut restricted_stiffness = &l_inv * &stiff0 * l_inv.transpose();
    // Symmetrize away the rounding of the triple product.
    let rt = restricted_stiffness.transpose();
    restricted_stiffness = (&restricted_stiffness + &rt) * real::<T>(0.5);

    Ok(Discretization {
        graph,
        mesh_n,
        dof_count,
        stiffness,
        mass,
        constraints,
        continuity_rows,
        domain_basis,
        restricted_stiffness,
        edge_dof_offset,
        dof_class,
    })
}

/// Value of the Dirichlet form `a(psi, psi)`; real and nonnegative.
pub fn quadratic_form<T: Real>(d: &Discretization<T>, psi: &StateVector<T>) -> Result<T> {
    if psi.len() != d.dof_count {
        return Err(Error::DimensionMismatch {
            expected: d.dof_count,
            got: psi.len(),
        });
    }
    let (re, im) = split(psi);
    let q = (&re.transpose() * &d.stiffness * &re)[(0, 0)]
        + (&im.transpose() * &d.stiffness * &im)[(0, 0)];
    Ok(q.max(T::zero()))
}

/// Eigenpairs of the constrained operator, ascending; eigenvectors live in
/// the broken space and are mass-orthonormal.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<DVector<T>>,
}

/// Lowest `k` eigenpairs of the stiffness form on `ker C`.
pub fn spectrum<T: Real>(d: &Discretization<T>, k: usize) -> Result<Spectrum<T>> {
    let kdim = d.domain_dim();
    if k > kdim {
        return Err(Error::TooManyModes {
            requested: k,
            available: kdim,
        });
    }
    let eig = nalgebra::SymmetricEigen::new(d.restricted_stiffness.clone());
    let mut order: Vec<usize> = (0..kdim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("eigenvalues are finite")
    });
    let scale = order
        .iter()
        .map(|&i| eig.eigenvalues[i].abs())
        .fold(T::zero(), T::max);
    let clamp = real::<T>(1e-12) * scale.max(T::one());
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    for &i in order.iter().take(k) {
        let mut lambda = eig.eigenvalues[i];
        if lambda < T::zero() && -lambda <= clamp {
            lambda = T::zero();
        }
        eigenvalues.push(lambda);
        eigenvectors.push(&d.domain_basis * eig.eigenvectors.column(i));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Groups eigenvalues into near-degenerate clusters; returns `(start, len)`
/// per cluster. Two eigenvalues join when they differ by at most
/// `tol * max(1, |lambda|)`.
pub fn multiplicity_clusters<T: Real>(eigenvalues: &[T], tol: T) -> Vec<(usize, usize)> {
    let mut clusters = Vec::new();
    let mut start = 0usize;
    for i in 1..=eigenvalues.len() {
        let split_here = i == eigenvalues.len() || {
            let gap = eigenvalues[i] - eigenvalues[i - 1];
            gap > tol * T::one().max(eigenvalues[i].abs())
        };
        if split_here {
            clusters.push((start, i - start));
            start = i;
        }
    }
    clusters
}

/// Modal Schrödinger evolution `psi(t) = sum_k e^{-i lambda_k t} phi_k
/// (phi_k, psi0)_M` over a precomputed spectrum.
pub fn evolve_with<T: Real>(
    d: &Discretization<T>,
    sp: &Spectrum<T>,
    psi0: &StateVector<T>,
    t: T,
) -> Result<StateVector<T>> {
    if psi0.len() != d.dof_count {
        return Err(Error::DimensionMismatch {
            expected: d.dof_count,
            got: psi0.len(),
        });
    }
    let residual = d.constraint_residual(psi0);
    if residual > real(DOMAIN_TOL) {
        return Err(Error::StateOutsideDomain {
            residual: num_traits::ToPrimitive::to_f64(&residual).unwrap_or(f64::NAN),
        });
    }
    let (re, im) = split(psi0);
    let mre = &d.mass * &re;
    let mim = &d.mass * &im;
    let mut out_re = DVector::<T>::zeros(d.dof_count);
    let mut out_im = DVector::<T>::zeros(d.dof_count);
    for (lambda, phi) in sp.eigenvalues.iter().zip(&sp.eigenvectors) {
        let c_re = phi.dot(&mre);
        let c_im = phi.dot(&mim);
        // e^{-i lambda t} (c_re + i c_im)
        let angle = -*lambda * t;
        let (s, c) = angle.sin_cos();
        let w_re = c * c_re - s * c_im;
        let w_im = c * c_im + s * c_re;
        out_re.axpy(w_re, phi, T::one());
        out_im.axpy(w_im, phi, T::one());
    }
    Ok(join(out_re, out_im))
}

/// Modal evolution with a freshly computed `k`-mode spectrum.
pub fn evolve<T: Real>(
    d: &Discretization<T>,
    psi0: &StateVector<T>,
    t: T,
    k: usize,
) -> Result<StateVector<T>> {
    let sp = spectrum(d, k)?;
    evolve_with(d, &sp, psi0, t)
}
