use super::{eigvals_hermitian, matmul, sqrt_psd, DensityMatrix};
use crate::error::{Error, Result};

/// `-Σ p ln p` over the positive entries; negatives are treated as zero.
pub fn entropy_of_spectrum(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum::<f64>().max(0.0)
}

/// Von Neumann entropy in nats.
pub fn vn_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.spectrum())
}

fn check_same(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    Ok(())
}

/// `‖ρ - σ‖₁ / 2`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same(rho, sigma)?;
    let diff = rho.mat() - sigma.mat();
    let ev = eigvals_hermitian(diff.as_ref())?;
    Ok(0.5 * ev.iter().map(|x| x.abs()).sum::<f64>())
}

/// Fidelity, Bures distance and trace distance of a pair of states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityBures {
    /// `F = Tr √(√ρ σ √ρ)`.
    pub fidelity: f64,
    /// `D = 2 √(1 - F)`.
    pub bures: f64,
    /// `T = ‖ρ - σ‖₁ / 2`.
    pub trace: f64,
}

pub fn fidelity_bures(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<FidelityBures> {
    check_same(rho, sigma)?;
    let sr = sqrt_psd(rho.mat())?;
    let inner = matmul(matmul(sr.as_ref(), sigma.mat()).as_ref(), sr.as_ref());
    let inner = super::hermitian_part(inner.as_ref());
    let f: f64 = eigvals_hermitian(inner.as_ref())?
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .sum::<f64>()
        .min(1.0);
    Ok(FidelityBures { fidelity: f, bures: 2.0 * (1.0 - f).max(0.0).sqrt(), trace: trace_distance(rho, sigma)? })
}
