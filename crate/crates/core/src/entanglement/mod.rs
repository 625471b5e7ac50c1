//! Entanglement functionals and the two finitely-correlated-state experiments.

mod eof;

use faer::{c64, Mat};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fcs::{self, FcsSpec};
use crate::qlinalg::{
    check_dim, eigvals_hermitian, entropy_of_spectrum, general_eigenvalues, matmul, norms,
    partial_transpose, vn_entropy, DensityMatrix, TensorShape,
};

pub use eof::{eof_from_factor, eof_optimize, Ensemble, EofOptions, EofResult};

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.shape().dims() != [2, 2] {
        return Err(Error::WrongShape(format!("expected 2x2 qubits, got {:?}", rho.shape().dims())));
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    // σ_y ⊗ σ_y is real: anti-diagonal (-1, 1, 1, -1)
    let yy = Mat::from_fn(4, 4, |i, j| {
        if i + j == 3 {
            c64::new(if i == 0 || i == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let m = rho.mat();
    let conj = Mat::from_fn(4, 4, |i, j| m[(i, j)].conj());
    let tilde = matmul(matmul(yy.as_ref(), conj.as_ref()).as_ref(), yy.as_ref());
    let r = matmul(m, tilde.as_ref());
    let mut ev: Vec<f64> = general_eigenvalues(r.as_ref())?.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok((ev[0] - ev[1] - ev[2] - ev[3]).clamp(0.0, 1.0))
}

/// Binary entropy in nats.
pub fn binary_entropy(x: f64) -> f64 {
    entropy_of_spectrum(&[x, 1.0 - x])
}

/// Closed-form two-qubit EoF from the concurrence.
pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?;
    Ok(binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PptReport {
    pub is_ppt: bool,
    pub min_eigenvalue: f64,
}

/// Positivity of the partial transpose on the `left` factors.
pub fn ppt_check(rho: &DensityMatrix, left: &[usize]) -> Result<PptReport> {
    rho.shape().check_factors(left)?;
    let mut m = rho.mat().to_owned();
    for &f in left {
        m = partial_transpose(m.as_ref(), rho.shape(), f)?;
    }
    let min = eigvals_hermitian(m.as_ref())?[0];
    Ok(PptReport { is_ppt: min >= -1e-10, min_eigenvalue: min })
}

/// `η(x) = -x ln x`.
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FannesReport {
    pub lhs: f64,
    pub rhs: f64,
    pub trace_norm: f64,
    pub holds: bool,
}

/// `|S(ρ) - S(σ)|` against `(ln d + 2) T + η(T)` with `T = ‖ρ - σ‖₁ ≤ 1/e`.
pub fn fannes_gap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<FannesReport> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let t = norms((rho.mat() - sigma.mat()).as_ref())?.trace;
    if t > (-1.0f64).exp() {
        return Err(Error::OutOfRegime { distance: t });
    }
    let lhs = (vn_entropy(rho) - vn_entropy(sigma)).abs();
    let rhs = ((rho.dim() as f64).ln() + 2.0) * t + eta(t);
    Ok(FannesReport { lhs, rhs, trace_norm: t, holds: lhs <= rhs + 1e-12 })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub eof_chain: f64,
    pub eof_ab: f64,
    pub gap: f64,
    pub gap_spread: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln gap_n` over the longest run with `gap_n > 1e-6`.
    pub slope: Option<f64>,
}

/// Slope of `ln y` against `x` over the longest contiguous run of `y > floor`.
pub fn log_slope(xs: &[f64], ys: &[f64], floor: f64) -> Option<f64> {
    let mut best = (0, 0);
    let mut start = 0;
    for i in 0..=ys.len() {
        if i == ys.len() || ys[i] <= floor {
            if i - start > best.1 - best.0 {
                best = (start, i);
            }
            start = i + 1;
        }
    }
    let (a, b) = best;
    if b - a < 2 {
        return None;
    }
    let n = (b - a) as f64;
    let mx = xs[a..b].iter().sum::<f64>() / n;
    let ly: Vec<f64> = ys[a..b].iter().map(|y| y.ln()).collect();
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = xs[a..b].iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs[a..b].iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// `gap_n = EoF(ρ_AB) - EoF(ρ_{[1,n]})` across `1 | [2,n]` for `n = 2..=n_max`.
pub fn convergence_experiment(spec: &FcsSpec, n_max: usize, opts: &EofOptions) -> Result<ConvergenceTable> {
    fcs::validate(spec)?;
    if n_max < 2 {
        return Err(Error::InvalidParameter("n_max must be at least 2".into()));
    }
    let d = spec.d();
    check_dim(d.saturating_mul(d.checked_pow(n_max as u32).unwrap_or(usize::MAX)))?;
    let ab = fcs::rho_ab(spec)?;
    let eof_ab = eof_optimize(&ab, &[0], opts)?;
    let mut rows = Vec::new();
    for n in 2..=n_max {
        let m = fcs::chain_factor(spec, n)?;
        let shape = TensorShape::uniform(d, n)?;
        let res = eof_from_factor(m.as_ref(), &shape, &[0], opts)?;
        rows.push(ConvergenceRow {
            n,
            eof_chain: res.value,
            eof_ab: eof_ab.value,
            gap: eof_ab.value - res.value,
            gap_spread: res.gap_estimate.max(eof_ab.gap_estimate),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let slope = log_slope(&xs, &ys, 1e-6);
    Ok(ConvergenceTable { rows, slope })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub p: usize,
    /// `‖ρ_{1,[p,n]} - ρ_1 ⊗ ρ_{[p,n]}‖₁`.
    pub t_p: f64,
    /// `c λ^{p-2}`.
    pub bound: f64,
    pub within: bool,
    /// `c_cb λ^{p-2}`.
    pub bound_cb: f64,
    pub within_cb: bool,
}

/// Trace-norm distance of the first spin from the block `[p, n]`.
pub fn distant_decay_experiment(spec: &FcsSpec, n: usize, ps: &[usize]) -> Result<Vec<DecayRow>> {
    let t = fcs::transfer(spec)?;
    let mut rows = Vec::new();
    for &p in ps {
        let block = fcs::rho_spin_block(spec, p, n)?;
        let k = block.shape().len();
        let first = block.reduce(&[0])?;
        let rest = block.reduce(&(1..k).collect::<Vec<_>>())?;
        let prod = first.tensor(&rest)?;
        let t_p = norms((block.mat() - prod.mat()).as_ref())?.trace;
        let scale = t.lambda.powi(p as i32 - 2);
        let (bound, bound_cb) = (t.c * scale, t.c_cb * scale);
        rows.push(DecayRow {
            p,
            t_p,
            bound,
            within: t_p <= bound + 1e-12,
            bound_cb,
            within_cb: t_p <= bound_cb + 1e-12,
        });
    }
    Ok(rows)
}
