//! Dense complex linear algebra over tensor-product Hilbert spaces.
//!
//! Matrices are plain [`faer::Mat<c64>`] values; the domain types
//! [`TensorShape`], [`DensityMatrix`] and [`PureState`] attach a tensor
//! factorization and enforce the physical invariants (Hermiticity, unit trace,
//! positivity, unit norm). Factor indices are zero-based, leftmost factor
//! first, and the leftmost factor is the most significant digit of a basis
//! index.

mod info;
mod spectral;
mod states;
mod tensor;

pub mod random;

pub use faer::{c64, Col, ColRef, Mat, MatRef};

pub use info::{
    entropy_of_spectrum, fidelity_bures, trace_distance, vn_entropy, FidelityBures,
};
pub use spectral::{
    eig_hermitian, eigvals_hermitian, general_eigenvalues, matmul, norms, op_norm,
    schmidt_decompose, singular_values, sqrt_psd, svd, HermitianEigen, Norms, Schmidt, Svd,
};
pub use states::{DensityMatrix, PureState};
pub use tensor::{
    bipartite_matrix, embed_operator, kron, partial_trace, partial_transpose, reduced_density,
    TensorShape,
};

use crate::error::{Error, Result};

/// Dense complex matrix. Rows and columns are at least one for every matrix
/// built by this crate.
pub type ComplexMatrix = Mat<c64>;

/// Tolerance for Hermiticity, trace and positivity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default cap on the total Hilbert-space dimension (2^14).
pub const DEFAULT_MAX_DIM: usize = 1 << 14;

/// Environment variable overriding [`DEFAULT_MAX_DIM`].
pub const MAX_DIM_ENV: &str = "GAPPED_ENT_MAX_DIM";

/// The active dimension cap.
pub fn max_dim() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}

pub fn check_dim(dim: usize) -> Result<()> {
    let cap = max_dim();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(())
}

pub(crate) fn check_square(m: MatRef<'_, c64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub(crate) fn check_finite(m: MatRef<'_, c64>) -> Result<()> {
    if m.is_all_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: MatRef<'_, c64>) -> f64 {
    let n = m.nrows().min(m.ncols());
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in j..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Hermiticity check scaled by the magnitude of the entries.
pub fn check_hermitian(m: MatRef<'_, c64>) -> Result<()> {
    check_square(m)?;
    check_finite(m)?;
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL * m.norm_max().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// `(m + m^dag) / 2`.
pub fn hermitian_part(m: MatRef<'_, c64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

pub fn dagger(m: MatRef<'_, c64>) -> Mat<c64> {
    m.adjoint().to_owned()
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::identity(n, n)
}

pub fn trace(m: MatRef<'_, c64>) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> c64 {
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn scale(m: MatRef<'_, c64>, s: c64) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub(crate) fn is_real(m: MatRef<'_, c64>) -> bool {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)].im != 0.0 {
                return false;
            }
        }
    }
    true
}

pub(crate) fn real_part(m: MatRef<'_, c64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

pub(crate) fn complexify(m: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0))
}
