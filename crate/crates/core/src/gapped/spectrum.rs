use faer::{c64, Mat, MatRef};
use serde::Serialize;

use super::model::{LocalOperator, SpinChainModel};
use crate::error::{Error, Result};
use crate::qlinalg::{
    bipartite_matrix, check_dim, dagger, eig_hermitian, entropy_of_spectrum, matmul, op_norm, singular_values,
    PureState, TensorShape,
};

/// Ground states closer than this in energy count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Full spectral resolution of `H_V`, energies shifted so that `E_0 = 0`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// Ascending, `energies[0] == 0`.
    pub energies: Vec<f64>,
    /// Unshifted ground energy.
    pub e0: f64,
    /// Eigenvectors as columns, aligned with `energies`.
    pub vectors: Mat<c64>,
    pub gap: f64,
    pub ground_state: PureState,
    pub shape: TensorShape,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `P_0 = |Ψ_0⟩⟨Ψ_0|`.
    pub fn p0(&self) -> Mat<c64> {
        let v = self.ground_state.as_slice();
        Mat::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    /// `⟨Ψ_0| O |Ψ_0⟩` for an operator on a subset of sites.
    pub fn expectation(&self, op: &LocalOperator) -> Result<f64> {
        let rho = crate::qlinalg::reduced_density(&self.ground_state, &op.sites)?;
        Ok(crate::qlinalg::trace_product(rho.as_ref(), op.mat.as_ref()).re)
    }

    /// `U^dag O U`.
    pub fn to_eigenbasis(&self, o: MatRef<'_, c64>) -> Mat<c64> {
        let ud = dagger(self.vectors.as_ref());
        matmul(matmul(ud.as_ref(), o).as_ref(), self.vectors.as_ref())
    }

    /// `U O U^dag`.
    pub fn from_eigenbasis(&self, o: MatRef<'_, c64>) -> Mat<c64> {
        let ud = dagger(self.vectors.as_ref());
        matmul(matmul(self.vectors.as_ref(), o).as_ref(), ud.as_ref())
    }
}

/// Dense diagonalization of `H_V`.
pub fn diagonalize(model: &SpinChainModel) -> Result<SpectralData> {
    check_dim(model.total_dim())?;
    let h = model.hamiltonian()?;
    spectral_data(h.as_ref(), model.shape()?)
}

pub(crate) fn spectral_data(h: MatRef<'_, c64>, shape: TensorShape) -> Result<SpectralData> {
    let eig = eig_hermitian(h)?;
    let e0 = eig.values[0];
    let energies: Vec<f64> = eig.values.iter().map(|e| e - e0).collect();
    let gap = energies.get(1).copied().unwrap_or(f64::INFINITY);
    if gap < DEGENERACY_TOL {
        return Err(Error::DegenerateGroundState { gap });
    }
    let psi: Vec<c64> = (0..eig.vectors.nrows()).map(|i| eig.vectors[(i, 0)]).collect();
    let ground_state = PureState::normalized(psi, shape.clone())?;
    Ok(SpectralData { energies, e0, vectors: eig.vectors, gap, ground_state, shape })
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyPoint {
    /// Cut after the first `m` sites.
    pub m: usize,
    pub entropy: f64,
}

/// `S(ρ_{[1,M]})` of the ground state for `M = 1..n-1`.
pub fn entropy_profile(spec: &SpectralData) -> Result<Vec<EntropyPoint>> {
    let n = spec.shape.len();
    let psi = spec.ground_state.as_slice();
    (1..n)
        .map(|m| {
            let left: Vec<usize> = (0..m).collect();
            let mat = bipartite_matrix(psi, &spec.shape, &left)?;
            let p: Vec<f64> = singular_values(mat.as_ref())?.iter().map(|s| s * s).collect();
            Ok(EntropyPoint { m, entropy: entropy_of_spectrum(&p) })
        })
        .collect()
}

/// `exp(-ω² / 4α)`, the Fourier transform of the normalized Gaussian `√(α/π) e^{-αt²}`.
pub fn gaussian_kernel(omega: f64, alpha: f64) -> f64 {
    (-omega * omega / (4.0 * alpha)).exp()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// `(O)_α = √(α/π) ∫ τ_t(O) e^{-αt²} dt` for the dynamics of the given
/// eigenbasis: entry `(m, n)` picks up `exp(-(E_m - E_n)²/4α)`.
pub fn filter_in_basis(energies: &[f64], vectors: MatRef<'_, c64>, o: MatRef<'_, c64>, alpha: f64) -> Result<Mat<c64>> {
    check_alpha(alpha)?;
    let n = energies.len();
    if o.nrows() != n || o.ncols() != n || vectors.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: o.nrows() });
    }
    let ud = dagger(vectors);
    let mut t = matmul(matmul(ud.as_ref(), o).as_ref(), vectors);
    for j in 0..n {
        for i in 0..n {
            t[(i, j)] *= gaussian_kernel(energies[i] - energies[j], alpha);
        }
    }
    Ok(matmul(matmul(vectors, t.as_ref()).as_ref(), ud.as_ref()))
}

/// Gaussian filter under `H_V`.
pub fn gaussian_filter(spec: &SpectralData, o: MatRef<'_, c64>, alpha: f64) -> Result<Mat<c64>> {
    filter_in_basis(&spec.energies, spec.vectors.as_ref(), o, alpha)
}

/// `(O)_α |Ψ_0⟩` computed from the single column `U^dag O Ψ_0`.
pub fn filter_on_ground(spec: &SpectralData, o: MatRef<'_, c64>, alpha: f64) -> Result<Vec<c64>> {
    check_alpha(alpha)?;
    let n = spec.dim();
    if o.nrows() != n || o.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: o.nrows() });
    }
    let psi = spec.ground_state.as_slice();
    let col = Mat::from_fn(n, 1, |i, _| psi[i]);
    let ud = dagger(spec.vectors.as_ref());
    let mut c = matmul(ud.as_ref(), matmul(o, col.as_ref()).as_ref());
    for m in 0..n {
        c[(m, 0)] *= gaussian_kernel(spec.energies[m], alpha);
    }
    let out = matmul(spec.vectors.as_ref(), c.as_ref());
    Ok((0..n).map(|i| out[(i, 0)]).collect())
}

/// `P̃_α = √(α/π) ∫ e^{i H̃_V t} e^{-αt²} dt` with `H̃_V` the shifted Hamiltonian.
pub fn approx_projector(spec: &SpectralData, alpha: f64) -> Result<Mat<c64>> {
    check_alpha(alpha)?;
    let n = spec.dim();
    let scaled = Mat::from_fn(n, n, |i, j| spec.vectors[(i, j)] * gaussian_kernel(spec.energies[j], alpha));
    Ok(matmul(scaled.as_ref(), dagger(spec.vectors.as_ref()).as_ref()))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProjectorError {
    /// `‖P̃_α - P_0‖` from the assembled operator.
    pub direct: f64,
    /// `max_{m ≥ 1} exp(-E_m²/4α)`.
    pub spectral: f64,
    /// `exp(-γ²/4α)`.
    pub bound: f64,
}

pub fn approx_projector_error(spec: &SpectralData, alpha: f64) -> Result<ProjectorError> {
    let mut diff = approx_projector(spec, alpha)?;
    diff -= spec.p0();
    let direct = op_norm(diff.as_ref())?;
    let spectral = spec.energies[1..].iter().map(|&e| gaussian_kernel(e, alpha)).fold(0.0, f64::max);
    Ok(ProjectorError { direct, spectral, bound: gaussian_kernel(spec.gap, alpha) })
}

/// Gauss-Hermite nodes and weights for `∫ f(x) e^{-x²} dx` (Golub-Welsch).
pub fn gauss_hermite(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 {
        return Err(Error::InvalidParameter("at least one quadrature node".into()));
    }
    let jac = Mat::from_fn(k, k, |i, j| {
        if i.abs_diff(j) == 1 {
            c64::new((i.max(j) as f64 / 2.0).sqrt(), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let eig = eig_hermitian(jac.as_ref())?;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let weights = (0..k).map(|j| sqrt_pi * eig.vectors[(0, j)].norm_sqr()).collect();
    Ok((eig.values, weights))
}

/// `√(α/π) ∫ f(t) e^{-αt²} dt` by `k`-node Gauss-Hermite quadrature.
pub fn gaussian_average<F>(alpha: f64, k: usize, mut f: F) -> Result<Mat<c64>>
where
    F: FnMut(f64) -> Mat<c64>,
{
    check_alpha(alpha)?;
    let (x, w) = gauss_hermite(k)?;
    let inv = 1.0 / std::f64::consts::PI.sqrt();
    let mut acc: Option<Mat<c64>> = None;
    for (xi, wi) in x.iter().zip(&w) {
        let term = f(xi / alpha.sqrt()) * faer::Scale(c64::new(wi * inv, 0.0));
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
    }
    Ok(acc.expect("k >= 1"))
}

/// `e^{iHt}` from a spectral resolution.
pub fn evolution(energies: &[f64], vectors: MatRef<'_, c64>, t: f64) -> Mat<c64> {
    let n = energies.len();
    let scaled = Mat::from_fn(n, n, |i, j| vectors[(i, j)] * c64::cis(energies[j] * t));
    matmul(scaled.as_ref(), dagger(vectors).as_ref())
}
