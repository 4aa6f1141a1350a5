//! Graph Laplacians, dense symmetric spectra, Rayleigh quotients and
//! explicit test-function certificates for eigenvalue bounds.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Graph, KPartition, VertexSet};

pub const DEFAULT_DENSE_CAP: usize = 2000;
/// Accuracy target of the eigensolver, relative to the matrix norm.
pub const SOLVER_TOL: f64 = 1e-9;
/// Tolerance used when comparing spectral quantities in checks.
pub const CHECK_TOL: f64 = 1e-7;

/// The combinatorial Laplacian `deg(x) f(x) − Σ_{xy∈E} f(y)` as a dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

pub fn laplacian(g: &Graph) -> LaplacianMatrix {
    let n = g.n();
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n {
        m[(v, v)] = g.degree(v) as f64;
    }
    for &(u, v) in g.edges() {
        m[(u, v)] = -1.0;
        m[(v, u)] = -1.0;
    }
    LaplacianMatrix(m)
}

/// A real function on the vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction(pub Vec<f64>);

impl TestFunction {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &TestFunction) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `‖df‖² = Σ_{xy∈E} (f(x) − f(y))²`.
    pub fn energy(&self, g: &Graph) -> f64 {
        g.edges().iter().map(|&(u, v)| (self.0[u] - self.0[v]).powi(2)).sum()
    }
}

/// Laplacian eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<f64>,
    // Column i is the eigenvector of values[i].
    vectors: DMatrix<f64>,
    /// Largest `‖L v − λ v‖` over all computed pairs.
    pub residual: f64,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `λ_k`, 1-indexed as in `λ_1 <= … <= λ_n`.
    pub fn lambda(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.values.len() {
            return Err(Error::InvalidK { k, n: self.values.len() });
        }
        Ok(self.values[k - 1])
    }

    /// Unit eigenvector of `λ_k` (1-indexed), first nonzero entry positive.
    pub fn eigenvector(&self, k: usize) -> Result<TestFunction> {
        self.lambda(k)?;
        Ok(TestFunction(self.vectors.column(k - 1).iter().copied().collect()))
    }

    /// Number of eigenvalues below `threshold`.
    pub fn near_zero_count(&self, threshold: f64) -> usize {
        self.values.iter().filter(|&&v| v < threshold).count()
    }
}

pub fn spectrum(g: &Graph) -> Result<Spectrum> {
    spectrum_capped(g, DEFAULT_DENSE_CAP)
}

/// Full Laplacian spectrum by dense symmetric eigendecomposition.
pub fn spectrum_capped(g: &Graph, dense_cap: usize) -> Result<Spectrum> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidParameter("spectrum of the empty graph".into()));
    }
    if n > dense_cap {
        return Err(Error::CapExceeded { cap: "cap-dense", limit: dense_cap, n });
    }
    let lap = laplacian(g).0;
    let max_iter = 100 * n * n;
    let eig = SymmetricEigen::try_new(lap.clone(), f64::EPSILON, max_iter)
        .ok_or(Error::SolverFailure { residual: f64::NAN })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let scale = lap.norm().max(1.0);
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    let mut residual = 0.0f64;
    for (col, &i) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[i];
        let mut v: DVector<f64> = eig.eigenvectors.column(i).into_owned();
        v /= v.norm();
        if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                v.neg_mut();
            }
        }
        residual = residual.max((&lap * &v - &v * lambda).norm());
        values.push(if lambda.abs() <= SOLVER_TOL * scale { 0.0 } else { lambda });
        vectors.set_column(col, &v);
    }
    if residual > SOLVER_TOL * scale {
        return Err(Error::SolverFailure { residual });
    }
    Ok(Spectrum { values, vectors, residual })
}

/// `λ_2` of the induced subgraph on `block`; `None` for single vertices.
pub fn block_lambda2(g: &Graph, block: &VertexSet) -> Result<Option<f64>> {
    if block.len() < 2 {
        return Ok(None);
    }
    let (sub, _) = g.induced_subgraph(block)?;
    Ok(Some(spectrum(&sub)?.lambda(2)?))
}

/// `‖df‖² / ‖f‖²`.
pub fn rayleigh_quotient(g: &Graph, f: &TestFunction) -> Result<f64> {
    if f.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: f.len() });
    }
    let norm2 = f.dot(f);
    if norm2 == 0.0 {
        return Err(Error::UndefinedQuotient);
    }
    Ok(f.energy(g) / norm2)
}

/// A unit eigenvector for `λ_2`, orthogonal to the constants, first nonzero
/// entry positive.
///
/// When `λ_2 = λ_1` the eigenspace contains the constants; both computed
/// kernel vectors are projected off the all-ones direction and the larger
/// remainder is kept.
pub fn fiedler_vector(g: &Graph) -> Result<TestFunction> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter("Fiedler vector needs at least two vertices".into()));
    }
    let spec = spectrum(g)?;
    let lambda2 = spec.values[1];
    let cluster_tol = 1e-8 * spec.values[n - 1].max(1.0);
    let candidates: Vec<usize> = (0..n).filter(|&i| (spec.values[i] - lambda2).abs() <= cluster_tol).collect();

    let project = |i: usize| -> Vec<f64> {
        let col = spec.vectors.column(i);
        let mean = col.iter().sum::<f64>() / n as f64;
        col.iter().map(|x| x - mean).collect()
    };
    let mut best = project(1);
    let mut best_norm = best.iter().map(|x| x * x).sum::<f64>();
    for &i in &candidates {
        let p = project(i);
        let pn = p.iter().map(|x| x * x).sum::<f64>();
        if pn > best_norm + 1e-12 {
            best = p;
            best_norm = pn;
        }
    }
    let norm = best_norm.sqrt();
    let mut f: Vec<f64> = best.into_iter().map(|x| x / norm).collect();
    if let Some(first) = f.iter().copied().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            f.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(TestFunction(f))
}

/// Test functions certifying `λ_{k+1}(G) >= min_i λ_2(G^i)` for a k-partition.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpectralCertificate {
    /// `ψ_0 ≡ 1` followed by `ψ_1..ψ_{k−1}`, integer valued.
    pub psi: Vec<Vec<i64>>,
    /// Whether every pair of `ψ` functions has zero integer inner product.
    pub orthogonal: bool,
    /// `λ_2(G^i)` per block; `None` for single-vertex blocks.
    pub block_lambda2: Vec<Option<f64>>,
    /// `min_i λ_2(G^i)`, single-vertex blocks contributing 0.
    pub bound: f64,
}

pub fn block_spectral_certificate(g: &Graph, partition: &KPartition) -> Result<BlockSpectralCertificate> {
    partition.check_graph(g)?;
    let n = g.n();
    let blocks = partition.blocks();
    let k = blocks.len();

    let mut psi = vec![vec![1i64; n]];
    let mut prefix_size = 0i64;
    for i in 1..k {
        prefix_size += blocks[i - 1].len() as i64;
        let next = &blocks[i];
        let mut f = vec![0i64; n];
        for b in &blocks[..i] {
            for v in b.iter() {
                f[v] = next.len() as i64;
            }
        }
        for v in next.iter() {
            f[v] = -prefix_size;
        }
        psi.push(f);
    }
    let orthogonal = (0..psi.len())
        .all(|a| (a + 1..psi.len()).all(|b| psi[a].iter().zip(&psi[b]).map(|(x, y)| x * y).sum::<i64>() == 0));

    let block_lambda2 = blocks.iter().map(|b| block_lambda2(g, b)).collect::<Result<Vec<_>>>()?;
    let bound = block_lambda2.iter().map(|l| l.unwrap_or(0.0)).fold(f64::INFINITY, f64::min);
    Ok(BlockSpectralCertificate { psi, orthogonal, block_lambda2, bound })
}

/// Upper bound on `λ_m(G)` from indicator-type test functions on every
/// second block of a chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTestBound {
    /// `f_m = 1/√|B_{2m}|` on block `2m` (1-indexed), zero elsewhere.
    pub functions: Vec<TestFunction>,
    /// `‖df_m‖²` for each function.
    pub energies: Vec<f64>,
    /// `2 / |B_{2m}|` for each function.
    pub limits: Vec<f64>,
    /// Pairwise orthogonal with unit norms.
    pub orthonormal: bool,
    /// No edge joins the supports of two different functions, so the
    /// Rayleigh quotient on their span is at most the largest energy.
    pub supports_separated: bool,
    /// Every `‖df_m‖² <= 2/|B_{2m}| + tol`.
    pub within_limits: bool,
    /// `max_m ‖df_m‖²`.
    pub bound: f64,
}

pub fn chain_test_bound(g: &Graph, blocks: &[VertexSet], m_count: usize) -> Result<ChainTestBound> {
    let n = g.n();
    let mut covered = VertexSet::empty(n);
    for b in blocks {
        if b.host_size() != n {
            return Err(Error::InvalidSet(format!("block lives on {} vertices, graph has {n}", b.host_size())));
        }
        if b.is_empty() || !b.is_disjoint(&covered) {
            return Err(Error::InvalidSet("blocks must be nonempty and pairwise disjoint".into()));
        }
        covered = covered.union(b);
    }
    if m_count == 0 || 2 * m_count > blocks.len() {
        return Err(Error::InvalidParameter(format!(
            "m_count = {m_count} needs 1 <= m_count and {} blocks, have {}",
            2 * m_count,
            blocks.len()
        )));
    }

    let supports: Vec<&VertexSet> = (1..=m_count).map(|m| &blocks[2 * m - 1]).collect();
    let functions: Vec<TestFunction> = supports
        .iter()
        .map(|b| {
            let value = 1.0 / (b.len() as f64).sqrt();
            TestFunction((0..n).map(|v| if b.contains(v) { value } else { 0.0 }).collect())
        })
        .collect();
    let energies: Vec<f64> = functions.iter().map(|f| f.energy(g)).collect();
    let limits: Vec<f64> = supports.iter().map(|b| 2.0 / b.len() as f64).collect();

    let orthonormal = functions.iter().enumerate().all(|(i, f)| {
        (f.norm() - 1.0).abs() <= CHECK_TOL && functions[i + 1..].iter().all(|h| f.dot(h).abs() <= CHECK_TOL)
    });
    let supports_separated = g.edges().iter().all(|&(u, v)| {
        let owner = |x: usize| supports.iter().position(|b| b.contains(x));
        match (owner(u), owner(v)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    });
    let within_limits = energies.iter().zip(&limits).all(|(e, l)| *e <= l + CHECK_TOL);
    let bound = energies.iter().copied().fold(0.0, f64::max);
    Ok(ChainTestBound { functions, energies, limits, orthonormal, supports_separated, within_limits, bound })
}
