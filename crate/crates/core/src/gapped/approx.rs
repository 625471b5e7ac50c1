use faer::{c64, Mat, MatRef};
use serde::Serialize;

use super::localize::localize;
use super::model::{LocalOperator, SpinChainModel, Term};
use super::region::{boundary_of, RegionSplit};
use super::spectrum::{filter_in_basis, gauss_hermite, gaussian_kernel, SpectralData};
use crate::error::{Error, Result};
use crate::qlinalg::{dagger, eig_hermitian, matmul, op_norm, reduced_density, trace_product, TensorShape};

/// Lattice dimension of every Hamiltonian handled here.
pub const LATTICE_DIM: usize = 1;

/// Decay rate in the Lieb-Robinson bound.
pub const LR_MU: f64 = 0.25;

/// Constants of the ground-state approximation for a chain with gap `γ` and
/// interaction strength `J`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PaperConstants {
    pub gamma: f64,
    pub j: f64,
    /// Lieb-Robinson velocity `4(2d-1)J`.
    pub v: f64,
    /// `ξ' = 4(1 + (v/γ)²)`.
    pub xi_prime: f64,
    /// `D = max(1/2, 2(d-1))`.
    pub d_exp: f64,
    pub c1: f64,
    pub mu: f64,
}

impl PaperConstants {
    pub fn new(gamma: f64, j: f64) -> Result<Self> {
        if !(gamma > 0.0 && j > 0.0) {
            return Err(Error::InvalidParameter(format!("need gamma > 0 and J > 0, got {gamma}, {j}")));
        }
        let d = LATTICE_DIM as f64;
        let v = 4.0 * (2.0 * d - 1.0) * j;
        let xi_prime = 4.0 * (1.0 + (v / gamma).powi(2));
        let d_exp = f64::max(0.5, 2.0 * (d - 1.0));
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let c1 = (2f64.powf(d + 2.0) / (sqrt_pi * (gamma * gamma + v * v).sqrt())
            + 2.0 * v / gamma
            + 3f64.powf(d + 2.0) * 4f64.powf(2.0 * d) * d.powf(d - 1.0))
            * (2.0 * d * j).powi(2)
            / v;
        Ok(Self { gamma, j, v, xi_prime, d_exp, c1, mu: LR_MU })
    }

    /// `α = γ² ξ' / 4ℓ`.
    pub fn alpha(&self, ell: usize) -> f64 {
        self.gamma * self.gamma * self.xi_prime / (4.0 * ell as f64)
    }

    /// `c = C₁ |∂A| ℓ^D e^{-ℓ/2ξ'}`.
    pub fn cutoff(&self, boundary: usize, ell: usize) -> f64 {
        let l = ell as f64;
        self.c1 * boundary as f64 * l.powf(self.d_exp) * (-l / (2.0 * self.xi_prime)).exp()
    }

    /// `e^{-ℓ/2ξ'}`.
    pub fn overlap_deficit(&self, ell: usize) -> f64 {
        (-(ell as f64) / (2.0 * self.xi_prime)).exp()
    }
}

/// `H_V = H_I + H_B + H_E` by the support rule, with commutator norms.
#[derive(Clone, Debug)]
pub struct HamiltonianSplit {
    /// Terms meeting `I`, on `A`.
    pub h_i: LocalOperator,
    /// Terms inside `B`, on `B`.
    pub h_b: LocalOperator,
    /// Terms meeting `E`, on `V \ A`.
    pub h_e: LocalOperator,
    /// `‖[H_V, H_X]‖` for `X = I, B, E`.
    pub commutators: [f64; 3],
    /// `8 d² J² |∂I|`, `8 d² J² (|∂I| + |∂E|)`, `8 d² J² |∂E|`.
    pub bounds: [f64; 3],
}

fn meets(t: &Term, set: &[usize]) -> bool {
    t.sites.iter().any(|s| set.contains(s))
}

fn inside(t: &Term, set: &[usize]) -> bool {
    t.sites.iter().all(|s| set.contains(s))
}

pub(crate) fn split_parts(model: &SpinChainModel, split: &RegionSplit) -> Result<[LocalOperator; 3]> {
    check_split(model, split)?;
    let h_i = model.sum_terms(&split.region, |t| meets(t, &split.interior))?;
    let h_b = model.sum_terms(&split.bulk, |t| inside(t, &split.bulk))?;
    let h_e = model.sum_terms(&split.complement(), |t| meets(t, &split.exterior))?;
    Ok([h_i, h_b, h_e])
}

fn check_split(model: &SpinChainModel, split: &RegionSplit) -> Result<()> {
    if split.n != model.n_sites() {
        return Err(Error::DimensionMismatch { expected: model.n_sites(), found: split.n });
    }
    if split.region.len() == split.n {
        return Err(Error::InvalidRegion("A must leave a non-empty complement".into()));
    }
    Ok(())
}

fn full_sites(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// `‖[H_V, O]‖` evaluated in the eigenbasis: entries `(E_m - E_n) Õ_mn`.
pub fn commutator_norm(spec: &SpectralData, o: MatRef<'_, c64>) -> Result<f64> {
    let mut t = spec.to_eigenbasis(o);
    let n = spec.dim();
    for j in 0..n {
        for i in 0..n {
            t[(i, j)] *= spec.energies[i] - spec.energies[j];
        }
    }
    op_norm(t.as_ref())
}

pub fn hamiltonian_split(model: &SpinChainModel, spec: &SpectralData, split: &RegionSplit) -> Result<HamiltonianSplit> {
    let parts = split_parts(model, split)?;
    let all = full_sites(split.n);
    let mut commutators = [0.0; 3];
    for (k, p) in parts.iter().enumerate() {
        let full = p.embed(model.local_dims(), &all)?;
        commutators[k] = commutator_norm(spec, full.as_ref())?;
    }
    let d = LATTICE_DIM as f64;
    let unit = 8.0 * d * d * model.j() * model.j();
    let bi = boundary_of(&split.interior, split.n).len() as f64;
    let be = boundary_of(&split.exterior, split.n).len() as f64;
    let [h_i, h_b, h_e] = parts;
    Ok(HamiltonianSplit { h_i, h_b, h_e, commutators, bounds: [unit * bi, unit * (bi + be), unit * be] })
}

/// Both sides of `‖(H̃_X)_α Ψ₀‖ ≤ ‖[H_V, H_X]‖ e^{-γ²/4α} / γ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FilterBound {
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub commutator: f64,
}

/// Precomputed data for sweeping `α` at fixed `H_X`.
#[derive(Clone, Debug)]
pub struct EnergyProbe {
    /// `|⟨m| H_X |Ψ₀⟩|²` for `m ≥ 1`, paired with `E_m`.
    weights: Vec<(f64, f64)>,
    commutator: f64,
    gap: f64,
}

impl EnergyProbe {
    pub fn new(spec: &SpectralData, h_x: MatRef<'_, c64>) -> Result<Self> {
        let n = spec.dim();
        if h_x.nrows() != n || h_x.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: h_x.nrows() });
        }
        let psi = spec.ground_state.as_slice();
        let col = Mat::from_fn(n, 1, |i, _| psi[i]);
        let c = matmul(dagger(spec.vectors.as_ref()).as_ref(), matmul(h_x, col.as_ref()).as_ref());
        // shifting H_X by its ground expectation removes exactly the m = 0 component
        let weights = (1..n).map(|m| (spec.energies[m], c[(m, 0)].norm_sqr())).collect();
        Ok(Self { weights, commutator: commutator_norm(spec, h_x)?, gap: spec.gap })
    }

    pub fn bound(&self, alpha: f64) -> FilterBound {
        let lhs = self.weights.iter().map(|&(e, w)| w * gaussian_kernel(e, alpha).powi(2)).sum::<f64>().sqrt();
        let rhs = self.commutator * gaussian_kernel(self.gap, alpha) / self.gap;
        FilterBound { alpha, lhs, rhs, commutator: self.commutator }
    }
}

pub fn filtered_energy_bound(spec: &SpectralData, h_x: MatRef<'_, c64>, alpha: f64) -> Result<FilterBound> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    Ok(EnergyProbe::new(spec, h_x)?.bound(alpha))
}

/// `M_I, M_B, M_E`: shifted `H_X` filtered under `H_A`, `H_{B(A;2ℓ)}` and `H_{V\A}`.
#[derive(Clone, Debug)]
pub struct Surrogates {
    pub alpha: f64,
    pub m_i: LocalOperator,
    pub m_b: LocalOperator,
    pub m_e: LocalOperator,
    /// `⟨Ψ₀| H_X |Ψ₀⟩` removed from each part.
    pub shifts: [f64; 3],
}

impl Surrogates {
    /// `M_I + M_B + M_E` on the whole chain.
    pub fn total(&self, dims: &[usize]) -> Result<Mat<c64>> {
        let all = full_sites(dims.len());
        let mut h = self.m_i.embed(dims, &all)?;
        h += self.m_b.embed(dims, &all)?;
        h += self.m_e.embed(dims, &all)?;
        Ok(h)
    }
}

fn filtered_part(
    model: &SpinChainModel,
    spec: &SpectralData,
    part: &LocalOperator,
    dynamics: &[usize],
    alpha: f64,
) -> Result<(LocalOperator, f64)> {
    let dims = model.local_dims();
    let shift = spec.expectation(part)?;
    let mut op = part.embed(dims, dynamics)?;
    for i in 0..op.nrows() {
        op[(i, i)] -= c64::new(shift, 0.0);
    }
    let mat = if dynamics.len() == model.n_sites() {
        filter_in_basis(&spec.energies, spec.vectors.as_ref(), op.as_ref(), alpha)?
    } else {
        let h = model.hamiltonian_on(dynamics)?;
        let eig = eig_hermitian(h.mat.as_ref())?;
        filter_in_basis(&eig.values, eig.vectors.as_ref(), op.as_ref(), alpha)?
    };
    Ok((LocalOperator { sites: dynamics.to_vec(), mat }, shift))
}

pub fn local_surrogates(
    model: &SpinChainModel,
    spec: &SpectralData,
    split: &RegionSplit,
    alpha: f64,
) -> Result<Surrogates> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let [h_i, h_b, h_e] = split_parts(model, split)?;
    let (m_i, s_i) = filtered_part(model, spec, &h_i, &split.region, alpha)?;
    let (m_b, s_b) = filtered_part(model, spec, &h_b, &split.ball(2 * split.ell), alpha)?;
    let (m_e, s_e) = filtered_part(model, spec, &h_e, &split.complement(), alpha)?;
    Ok(Surrogates { alpha, m_i, m_b, m_e, shifts: [s_i, s_b, s_e] })
}

/// `‖H̃_V - (M_I + M_B + M_E)‖`.
pub fn surrogate_error(model: &SpinChainModel, spec: &SpectralData, s: &Surrogates) -> Result<f64> {
    let mut diff = model.hamiltonian()?;
    for i in 0..diff.nrows() {
        diff[(i, i)] -= c64::new(spec.e0, 0.0);
    }
    diff -= s.total(model.local_dims())?;
    op_norm(diff.as_ref())
}

/// How `P_B(α)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum PbMethod {
    /// Gaussian time integral done in closed form in the two eigenbases.
    Exact,
    /// Gauss-Hermite quadrature with `nodes` nodes, checked against `2 · nodes`.
    Quadrature { nodes: usize },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GsOptions {
    pub alpha: f64,
    /// Spectral cutoff for `P_A`, `P_{V\A}`.
    pub cutoff: f64,
    pub method: PbMethod,
    /// Also compute the per-stage errors (several extra dense norms).
    pub diagnostics: bool,
}

impl GsOptions {
    /// `α` and the cutoff from [`PaperConstants`].
    pub fn paper(model: &SpinChainModel, spec: &SpectralData, split: &RegionSplit) -> Result<Self> {
        let k = PaperConstants::new(spec.gap, model.j())?;
        Ok(Self {
            alpha: k.alpha(split.ell),
            cutoff: k.cutoff(split.boundary.len(), split.ell),
            method: PbMethod::Exact,
            diagnostics: false,
        })
    }
}

/// Per-stage errors of the approximation chain.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GsDiagnostics {
    /// `e^{-γ²/4α}`, bounding `‖P̃_α - P₀‖`.
    pub filter_bound: f64,
    /// `‖H̃_V - Σ M_X‖`.
    pub surrogate_error: f64,
    /// `‖P̂_α - P₀‖`.
    pub hat_error: f64,
    /// `‖P_B(α) P_A P_E - P₀‖`.
    pub pb_alpha_error: f64,
    /// `‖P_B - P_B(α)‖`.
    pub localization_error: f64,
    /// `‖P_B‖`.
    pub p_b_norm: f64,
}

#[derive(Clone, Debug)]
pub struct GsApproxResult {
    pub p_a: LocalOperator,
    pub p_e: LocalOperator,
    /// Localized onto `B(A; 3ℓ)`.
    pub p_b: LocalOperator,
    /// `‖P_B P_A P_E - P₀‖`.
    pub error: f64,
    pub alpha: f64,
    pub cutoff: f64,
    pub rank_a: usize,
    pub rank_e: usize,
    /// `⟨Ψ₀|P_A|Ψ₀⟩`, `⟨Ψ₀|P_E|Ψ₀⟩`.
    pub overlap_a: f64,
    pub overlap_e: f64,
    pub diagnostics: Option<GsDiagnostics>,
}

/// `(X ⊗ Y)` with `X` on `a` and `Y` on `b`, `a ∪ b` the whole chain.
fn product_operator(dims: &[usize], a: &[usize], x: MatRef<'_, c64>, b: &[usize], y: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let shape = TensorShape::new(dims.to_vec())?;
    let oa = shape.offsets(a);
    let ob = shape.offsets(b);
    let n = shape.total();
    let mut out = Mat::<c64>::zeros(n, n);
    for (cb, &ocb) in ob.iter().enumerate() {
        for (ca, &oca) in oa.iter().enumerate() {
            let col = oca + ocb;
            for (rb, &orb) in ob.iter().enumerate() {
                let yv = y[(rb, cb)];
                if yv == c64::new(0.0, 0.0) {
                    continue;
                }
                for (ra, &ora) in oa.iter().enumerate() {
                    out[(ora + orb, col)] = x[(ra, ca)] * yv;
                }
            }
        }
    }
    Ok(out)
}

fn projector_below(values: &[f64], vectors: MatRef<'_, c64>, cutoff: f64) -> (Mat<c64>, usize) {
    let n = vectors.nrows();
    let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] < cutoff).collect();
    let sel = Mat::from_fn(n, keep.len(), |i, j| vectors[(i, keep[j])]);
    (matmul(sel.as_ref(), dagger(sel.as_ref()).as_ref()), keep.len())
}

fn minus_p0(mut m: Mat<c64>, psi: &[c64]) -> Mat<c64> {
    for j in 0..psi.len() {
        let cj = psi[j].conj();
        for i in 0..psi.len() {
            m[(i, j)] -= psi[i] * cj;
        }
    }
    m
}

/// Fourier-Gaussian kernel `√(α/π) ∫ e^{iωt} e^{-αt²} dt`, in closed form or
/// by quadrature.
fn kernel_table(freqs: impl Fn(usize, usize) -> f64, n: usize, alpha: f64, nodes: Option<&(Vec<f64>, Vec<f64>)>) -> Mat<c64> {
    match nodes {
        None => Mat::from_fn(n, n, |i, j| c64::new(gaussian_kernel(freqs(i, j), alpha), 0.0)),
        Some((x, w)) => {
            let inv = 1.0 / (std::f64::consts::PI.sqrt());
            let sa = alpha.sqrt();
            Mat::from_fn(n, n, |i, j| {
                let om = freqs(i, j);
                x.iter().zip(w).map(|(xk, wk)| c64::cis(om * xk / sa) * (wk * inv)).sum()
            })
        }
    }
}

/// Builds `P_A`, `P_{V\A}` and the localized `P_B` and measures `‖P_B P_A P_E - P₀‖`.
pub fn gs_projector_approx(
    model: &SpinChainModel,
    spec: &SpectralData,
    split: &RegionSplit,
    opts: &GsOptions,
) -> Result<GsApproxResult> {
    if !(opts.cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!("cutoff must be positive, got {}", opts.cutoff)));
    }
    let dims = model.local_dims();
    let n = split.n;
    let all = full_sites(n);
    let a = split.region.clone();
    let e = split.complement();
    let sur = local_surrogates(model, spec, split, opts.alpha)?;

    let ei = eig_hermitian(sur.m_i.mat.as_ref())?;
    let ee = eig_hermitian(sur.m_e.mat.as_ref())?;
    let (p_a, rank_a) = projector_below(&ei.values, ei.vectors.as_ref(), opts.cutoff);
    let (p_e, rank_e) = projector_below(&ee.values, ee.vectors.as_ref(), opts.cutoff);
    if rank_a == 0 {
        return Err(Error::EmptyProjector("P_A"));
    }
    if rank_e == 0 {
        return Err(Error::EmptyProjector("P_{V\\A}"));
    }
    let psi = &spec.ground_state;
    let overlap_a = trace_product(reduced_density(psi, &a)?.as_ref(), p_a.as_ref()).re;
    let overlap_e = trace_product(reduced_density(psi, &e)?.as_ref(), p_e.as_ref()).re;

    let h = sur.total(dims)?;
    let surrogate_err = if opts.diagnostics { Some(surrogate_error(model, spec, &sur)?) } else { None };
    let eh = eig_hermitian(h.as_ref())?;
    drop(h);

    // eigenbasis of M_I + M_E is the product of the two local ones
    let shape = TensorShape::new(dims.to_vec())?;
    let oa = shape.offsets(&a);
    let oe = shape.offsets(&e);
    let mut f = vec![0.0; shape.total()];
    for (ka, &x) in oa.iter().enumerate() {
        for (ke, &y) in oe.iter().enumerate() {
            f[x + y] = ei.values[ka] + ee.values[ke];
        }
    }
    let w = product_operator(dims, &a, ei.vectors.as_ref(), &e, ee.vectors.as_ref())?;
    let mut g = matmul(dagger(eh.vectors.as_ref()).as_ref(), w.as_ref());
    let total = shape.total();
    let freq = |i: usize, j: usize| eh.values[i] - f[j];
    let kern = match opts.method {
        PbMethod::Exact => kernel_table(freq, total, opts.alpha, None),
        PbMethod::Quadrature { nodes } => {
            let q1 = gauss_hermite(nodes)?;
            let q2 = gauss_hermite(2 * nodes)?;
            let k1 = kernel_table(freq, total, opts.alpha, Some(&q1));
            let k2 = kernel_table(freq, total, opts.alpha, Some(&q2));
            // ‖U (G ∘ ΔK) W^dag‖ ≤ ‖G ∘ ΔK‖_F
            let mut change = 0.0;
            for j in 0..total {
                for i in 0..total {
                    change += (g[(i, j)] * (k1[(i, j)] - k2[(i, j)])).norm_sqr();
                }
            }
            let change = change.sqrt();
            if change > 1e-6 {
                return Err(Error::QuadratureUnconverged { change });
            }
            k1
        }
    };
    for j in 0..total {
        for i in 0..total {
            g[(i, j)] *= kern[(i, j)];
        }
    }
    drop(kern);
    let pb_alpha = matmul(matmul(eh.vectors.as_ref(), g.as_ref()).as_ref(), dagger(w.as_ref()).as_ref());
    drop(g);
    drop(w);

    let b3 = split.ball(3 * split.ell);
    let p_b = if b3.len() == n {
        LocalOperator { sites: all.clone(), mat: pb_alpha.clone() }
    } else {
        localize(pb_alpha.as_ref(), dims, &b3)?
    };
    let pape = product_operator(dims, &a, p_a.as_ref(), &e, p_e.as_ref())?;
    let p_b_full = p_b.embed(dims, &all)?;
    let x = matmul(p_b_full.as_ref(), pape.as_ref());
    let error = op_norm(minus_p0(x, psi.as_slice()).as_ref())?;

    let diagnostics = if opts.diagnostics {
        let hat = {
            let m = eh.vectors.nrows();
            let scaled = Mat::from_fn(m, m, |i, j| eh.vectors[(i, j)] * gaussian_kernel(eh.values[j], opts.alpha));
            matmul(scaled.as_ref(), dagger(eh.vectors.as_ref()).as_ref())
        };
        let hat_error = op_norm(minus_p0(hat, psi.as_slice()).as_ref())?;
        let pb_alpha_error = op_norm(minus_p0(matmul(pb_alpha.as_ref(), pape.as_ref()), psi.as_slice()).as_ref())?;
        let localization_error = op_norm((&p_b_full - &pb_alpha).as_ref())?;
        Some(GsDiagnostics {
            filter_bound: gaussian_kernel(spec.gap, opts.alpha),
            surrogate_error: surrogate_err.unwrap_or(f64::NAN),
            hat_error,
            pb_alpha_error,
            localization_error,
            p_b_norm: op_norm(p_b.mat.as_ref())?,
        })
    } else {
        None
    };

    Ok(GsApproxResult {
        p_a: LocalOperator { sites: a, mat: p_a },
        p_e: LocalOperator { sites: e, mat: p_e },
        p_b,
        error,
        alpha: opts.alpha,
        cutoff: opts.cutoff,
        rank_a,
        rank_e,
        overlap_a,
        overlap_e,
        diagnostics,
    })
}
