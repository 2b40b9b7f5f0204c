//! Dense symmetric matrices and their spectral factorization.
//!
//! Every quantity in this crate bottoms out in an eigendecomposition of a
//! small dense symmetric matrix: Laplacians, the resolvent `(I+L)^-1`, the
//! adversary's quadratic form and the mixed-graph products. Matrices are
//! stored densely in `nalgebra::DMatrix` and the eigensolver is nalgebra's
//! Householder tridiagonalization followed by implicit symmetric QR.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues closer than this (relative to the operator norm) are treated
/// as one eigenspace.
pub const CLUSTER_TOL: f64 = 1e-7;

/// A dense real symmetric matrix. Symmetry is checked once at construction
/// and the stored entries are then exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = m.amax();
        let mut asym = 0.0_f64;
        for i in 0..m.nrows() {
            for j in 0..i {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self::symmetrized(m))
    }

    /// Averages `m` with its transpose. Callers use this for products that are
    /// symmetric in exact arithmetic but carry rounding noise.
    pub fn symmetrized(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetrized needs a square matrix");
        let t = m.transpose();
        Self((m + t) * 0.5)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// The all-ones matrix `J`.
    pub fn ones(n: usize) -> Self {
        Self(DMatrix::from_element(n, n, 1.0))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    pub fn add(&self, other: &SymMatrix) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    /// `C * self * C` for symmetric `C`.
    pub fn congruence(&self, c: &SymMatrix) -> Result<Self> {
        self.check_dim(c.dim())?;
        Ok(Self::symmetrized(&c.0 * &self.0 * &c.0))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "vector length must match matrix");
        let v = &self.0 * DVector::from_column_slice(x);
        v.iter().copied().collect()
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let ax = self.mul_vec(x);
        ax.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: n,
            });
        }
        Ok(())
    }
}

/// Full spectral factorization `A = Σ λ_i v_i v_iᵀ` with eigenvalues sorted
/// ascending and column `i` of `vectors` paired with `values[i]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

/// Orthonormal basis of one eigenspace, possibly spanning several indices
/// when the eigenvalue is repeated.
#[derive(Debug, Clone)]
pub struct EigenspaceBasis {
    pub eigenvalue: f64,
    /// 0-based positions in the ascending spectrum.
    pub indices: Range<usize>,
    /// Columns are orthonormal eigenvectors.
    pub basis: DMatrix<f64>,
}

impl EigenspaceBasis {
    pub fn multiplicity(&self) -> usize {
        self.indices.len()
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.basis.column(k).iter().copied().collect()
    }
}

pub fn eig_sym(a: &SymMatrix) -> EigenDecomposition {
    let n = a.dim();
    if n == 0 {
        return EigenDecomposition {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    let eig = a.0.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        // Fix the sign so the first entry of largest magnitude is positive.
        let pivot = col.iamax();
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    EigenDecomposition { values, vectors }
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }

    pub fn lambda_min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn operator_norm(&self) -> f64 {
        self.lambda_min().abs().max(self.lambda_max().abs())
    }

    /// `Σ f(λ_i) v_i v_iᵀ`.
    pub fn matrix_function(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.with_values(&fv)
    }

    /// Rebuilds `V diag(values) Vᵀ` with the same eigenvectors.
    pub fn with_values(&self, values: &[f64]) -> SymMatrix {
        assert_eq!(values.len(), self.dim());
        let mut scaled = self.vectors.clone();
        for (k, &v) in values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(v);
        }
        SymMatrix::symmetrized(scaled * self.vectors.transpose())
    }

    /// Absolute tolerance used to decide that two eigenvalues coincide.
    pub fn cluster_tolerance(&self) -> f64 {
        CLUSTER_TOL * self.operator_norm().max(f64::MIN_POSITIVE)
    }

    /// Groups the spectrum into eigenspaces. Consecutive eigenvalues within
    /// [`cluster_tolerance`](Self::cluster_tolerance) share a cluster.
    pub fn eigenspaces(&self) -> Vec<EigenspaceBasis> {
        let tol = self.cluster_tolerance();
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.dim() {
            if i == self.dim() || self.values[i] - self.values[i - 1] > tol {
                out.push(self.eigenspace(start..i));
                start = i;
            }
        }
        out
    }

    /// The eigenspace containing position `i` of the ascending spectrum.
    pub fn eigenspace_of(&self, i: usize) -> EigenspaceBasis {
        self.eigenspaces()
            .into_iter()
            .find(|e| e.indices.contains(&i))
            .expect("index inside spectrum")
    }

    fn eigenspace(&self, indices: Range<usize>) -> EigenspaceBasis {
        let eigenvalue = self.values[indices.clone()].iter().sum::<f64>() / indices.len() as f64;
        let basis = self
            .vectors
            .columns(indices.start, indices.len())
            .into_owned();
        EigenspaceBasis {
            eigenvalue,
            indices,
            basis,
        }
    }
}

/// `a ⪯ b` in the Loewner order, up to `tol` relative to the larger norm.
pub fn psd_leq(a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<bool> {
    let diff = b.sub(a)?;
    let scale = operator_norm(a).max(operator_norm(b)).max(1.0);
    Ok(eig_sym(&diff).lambda_min() >= -tol * scale)
}

/// Spectral norm `max |λ_i|`.
pub fn operator_norm(a: &SymMatrix) -> f64 {
    eig_sym(a).operator_norm()
}

pub fn lambda_max(a: &SymMatrix) -> f64 {
    eig_sym(a).lambda_max()
}

pub fn lambda_min(a: &SymMatrix) -> f64 {
    eig_sym(a).lambda_min()
}
