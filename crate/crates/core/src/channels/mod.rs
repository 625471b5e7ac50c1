//! Depolarized Werner-Holevo channels
//! `W(X) = λ X + (1-λ)/(d-1) (Tr X · 1 - X^T)`.

use faer::{c64, Mat, MatRef};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{random, DensityMatrix, PureState, TensorShape};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DwhChannel {
    lambda: f64,
    d: usize,
}

impl DwhChannel {
    pub fn new(lambda: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("lambda {lambda} outside [0, 1]")));
        }
        if d < 2 {
            return Err(Error::InvalidParameter(format!("dimension {d} < 2")));
        }
        Ok(Self { lambda, d })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `Q = (1-λ)/(d-1)`.
    pub fn q(&self) -> f64 {
        (1.0 - self.lambda) / (self.d as f64 - 1.0)
    }

    /// `R = λ - Q`.
    pub fn r(&self) -> f64 {
        self.lambda - self.q()
    }

    /// `S = 2 λ Q`.
    pub fn s(&self) -> f64 {
        2.0 * self.lambda * self.q()
    }

    /// `P² = [Q² + (d-2) R²] S + (d-2) Q² R²`.
    pub fn p_sq(&self) -> f64 {
        let (q, r, s, dm2) = (self.q(), self.r(), self.s(), self.d as f64 - 2.0);
        (q * q + dm2 * r * r) * s + dm2 * q * q * r * r
    }

    /// Action on an arbitrary `d × d` operator.
    pub fn apply_operator(&self, x: MatRef<'_, c64>) -> Result<Mat<c64>> {
        let d = self.d;
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x.nrows() });
        }
        let tr: c64 = (0..d).map(|i| x[(i, i)]).sum();
        let (lam, q) = (self.lambda, self.q());
        Ok(Mat::from_fn(d, d, |i, j| {
            let id = if i == j { tr } else { c64::new(0.0, 0.0) };
            x[(i, j)] * lam + (id - x[(j, i)]) * q
        }))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_operator(rho.mat())?;
        Ok(DensityMatrix::new_unchecked(out, rho.shape().clone()))
    }

    /// `((d-2)λ² + 1)/(d-1)`.
    pub fn max_output_2norm_sq(&self) -> f64 {
        let d = self.d as f64;
        ((d - 2.0) * self.lambda * self.lambda + 1.0) / (d - 1.0)
    }

    fn check_input(&self, psi: &PureState) -> Result<()> {
        let d = self.d;
        if psi.shape().dims() != [d, d] {
            return Err(Error::WrongShape(format!("expected {d}x{d} input, got {:?}", psi.shape().dims())));
        }
        Ok(())
    }

    /// Closed-form `‖(W ⊗ W)(|ψ⟩⟨ψ|)‖₂²`.
    pub fn tensor_output_2norm_sq(&self, psi: &PureState) -> Result<f64> {
        self.check_input(psi)?;
        let red = Reductions::of(psi.as_slice(), self.d);
        let w = self.max_output_2norm_sq();
        let (q, r, s, dm2) = (self.q(), self.r(), self.s(), self.d as f64 - 2.0);
        Ok(w * w + s * s * red.overlap_conj_sq
            - 2.0 * (s + r * r) * (s + dm2 * q * q) * (1.0 - red.purity1)
            - s * w * (red.tt1 + red.tt2))
    }

    /// `(W ⊗ W)(|ψ⟩⟨ψ|)` assembled from the operator expansion
    /// `λ²P + λQ(ρ₁⊗1 + 1⊗ρ₂) - Q²(ρ₁ᵀ⊗1 + 1⊗ρ₂ᵀ) + Q²(1⊗1 + P̄) - (S/2)(P^{T₁} + P^{T₂})`.
    pub fn tensor_output(&self, psi: &PureState) -> Result<Mat<c64>> {
        self.check_input(psi)?;
        let d = self.d;
        let v = psi.as_slice();
        let red = Reductions::of(v, d);
        let (lam, q, s) = (self.lambda, self.q(), self.s());
        let p = |i: usize, j: usize| v[i] * v[j].conj();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Ok(Mat::from_fn(d * d, d * d, |row, col| {
            let (a, b) = (row / d, row % d);
            let (a2, b2) = (col / d, col % d);
            let r1 = red.rho1[a * d + a2] * delta(b, b2);
            let r2 = red.rho2[b * d + b2] * delta(a, a2);
            let r1t = red.rho1[a2 * d + a] * delta(b, b2);
            let r2t = red.rho2[b2 * d + b] * delta(a, a2);
            let pt1 = p(a2 * d + b, a * d + b2);
            let pt2 = p(a * d + b2, a2 * d + b);
            p(row, col) * (lam * lam) + (r1 + r2) * (lam * q) - (r1t + r2t) * (q * q)
                + (p(col, row) + delta(row, col)) * (q * q)
                - (pt1 + pt2) * (s / 2.0)
        }))
    }

    /// `‖(W ⊗ W)(|ψ⟩⟨ψ|)‖₂²` from the explicit operator.
    pub fn tensor_output_2norm_sq_direct(&self, psi: &PureState) -> Result<f64> {
        let m = self.tensor_output(psi)?;
        let n = m.nrows();
        Ok((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].norm_sqr()).sum())
    }

    /// `(W ⊗ W)(X)` by applying the channel to each factor in turn.
    pub fn apply_tensor_factorwise(&self, x: MatRef<'_, c64>) -> Result<Mat<c64>> {
        let d = self.d;
        if x.nrows() != d * d || x.ncols() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: x.nrows() });
        }
        let mut out = Mat::<c64>::zeros(d * d, d * d);
        // act on blocks: X = Σ E_ab ⊗ X_ab for the second factor, then the first
        let mut stage = Mat::<c64>::zeros(d * d, d * d);
        for a in 0..d {
            for a2 in 0..d {
                let block = Mat::from_fn(d, d, |b, b2| x[(a * d + b, a2 * d + b2)]);
                let w = self.apply_operator(block.as_ref())?;
                for b in 0..d {
                    for b2 in 0..d {
                        stage[(a * d + b, a2 * d + b2)] = w[(b, b2)];
                    }
                }
            }
        }
        for b in 0..d {
            for b2 in 0..d {
                let block = Mat::from_fn(d, d, |a, a2| stage[(a * d + b, a2 * d + b2)]);
                let w = self.apply_operator(block.as_ref())?;
                for a in 0..d {
                    for a2 in 0..d {
                        out[(a * d + b, a2 * d + b2)] = w[(a, a2)];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Reduced quantities of a bipartite pure state `ψ = Σ A_ab |a⟩|b⟩`.
struct Reductions {
    /// `ρ₁ = A A^dag`, row-major.
    rho1: Vec<c64>,
    /// `ρ₂ = Aᵀ conj(A)`, row-major.
    rho2: Vec<c64>,
    /// `Tr ρ₁²`.
    purity1: f64,
    /// `Tr ρ₁ ρ₁ᵀ`.
    tt1: f64,
    tt2: f64,
    /// `|⟨ψ|ψ̄⟩|²`.
    overlap_conj_sq: f64,
}

impl Reductions {
    fn of(v: &[c64], d: usize) -> Self {
        let mut rho1 = vec![c64::new(0.0, 0.0); d * d];
        let mut rho2 = vec![c64::new(0.0, 0.0); d * d];
        for a in 0..d {
            for a2 in 0..d {
                let mut acc1 = c64::new(0.0, 0.0);
                let mut acc2 = c64::new(0.0, 0.0);
                for k in 0..d {
                    acc1 += v[a * d + k] * v[a2 * d + k].conj();
                    acc2 += v[k * d + a] * v[k * d + a2].conj();
                }
                rho1[a * d + a2] = acc1;
                rho2[a * d + a2] = acc2;
            }
        }
        let purity1 = rho1.iter().map(|x| x.norm_sqr()).sum();
        let tt = |r: &[c64]| r.iter().map(|x| (x * x).re).sum::<f64>();
        let overlap: c64 = v.iter().map(|x| x * x).sum();
        Self { tt1: tt(&rho1), tt2: tt(&rho2), rho1, rho2, purity1, overlap_conj_sq: overlap.norm_sqr() }
    }
}

/// Multiplicativity gap `(‖W‖₂²)² - ‖(W ⊗ W)(|ψ⟩⟨ψ|)‖₂²` at one input.
#[derive(Clone, Debug)]
pub struct MultGapRecord {
    pub input: PureState,
    pub gap: f64,
    pub tensor_norm_sq: f64,
    pub single_norm_sq: f64,
}

pub fn mult_gap(ch: &DwhChannel, psi: &PureState) -> Result<MultGapRecord> {
    let tensor = ch.tensor_output_2norm_sq(psi)?;
    let single = ch.max_output_2norm_sq();
    Ok(MultGapRecord { input: psi.clone(), gap: single * single - tensor, tensor_norm_sq: tensor, single_norm_sq: single })
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: f64,
    pub state: PureState,
}

/// Hill climbing on `‖(W ⊗ W)(|ψ⟩⟨ψ|)‖₂²` by random complex perturbations,
/// best of `restarts` runs of `steps` proposals each.
pub fn mult_search<R: Rng + ?Sized>(ch: &DwhChannel, restarts: usize, steps: usize, rng: &mut R) -> Result<SearchResult> {
    let shape = TensorShape::uniform(ch.d, 2)?;
    let mut best: Option<SearchResult> = None;
    for _ in 0..restarts.max(1) {
        let mut psi = random::gaussian_state(rng, &shape);
        let mut val = ch.tensor_output_2norm_sq(&psi)?;
        let mut scale = 0.3;
        for _ in 0..steps {
            let g = random::gaussian_state(rng, &shape);
            let cand: Vec<c64> = psi.as_slice().iter().zip(g.as_slice()).map(|(a, b)| a + b * scale).collect();
            let Ok(cand) = PureState::normalized(cand, shape.clone()) else { continue };
            let cv = ch.tensor_output_2norm_sq(&cand)?;
            if cv > val {
                psi = cand;
                val = cv;
                scale = (scale * 1.2).min(1.0);
            } else {
                scale = (scale * 0.97).max(1e-6);
            }
        }
        if best.as_ref().is_none_or(|b| val > b.best) {
            best = Some(SearchResult { best: val, state: psi });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Tensor output norm at `Σ_i √σ_i |i⟩ ⊗ |i⟩`, whose Schmidt bases are
/// mutually conjugate (the standard basis is real).
pub fn conjugate_pair_norm(ch: &DwhChannel, sigma: &[f64]) -> Result<f64> {
    let d = ch.d;
    if sigma.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: sigma.len() });
    }
    let total: f64 = sigma.iter().sum();
    if sigma.iter().any(|&x| x < 0.0) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter("Schmidt weights must be a probability vector".into()));
    }
    let mut v = vec![c64::new(0.0, 0.0); d * d];
    for (i, &s) in sigma.iter().enumerate() {
        v[i * d + i] = c64::new(s.sqrt(), 0.0);
    }
    let psi = PureState::normalized(v, TensorShape::uniform(d, 2)?)?;
    ch.tensor_output_2norm_sq(&psi)
}

/// Outcome of the entrywise-positivity test.
#[derive(Clone, Debug, Serialize)]
pub struct EpReport {
    pub satisfied: bool,
    /// Smallest real part over all entries.
    pub min_entry: f64,
    /// Largest imaginary part in modulus.
    pub max_imag: f64,
    /// `(i, j, k, l)` of the smallest entry.
    pub witness: (usize, usize, usize, usize),
}

/// `Tr W(|e_l⟩⟨e_i|) W(|e_j⟩⟨e_k|)` in closed form, for basis vectors stored
/// as columns of `basis`.
pub fn ep_entry(ch: &DwhChannel, basis: MatRef<'_, c64>, i: usize, j: usize, k: usize, l: usize) -> c64 {
    let d = ch.d;
    let (lam, q, s) = (ch.lambda, ch.q(), ch.s());
    let dm2 = d as f64 - 2.0;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    // ⟨ē_a|e_b⟩ = e_aᵀ e_b ; ⟨e_a|ē_b⟩ = conj(e_aᵀ e_b)
    let bil = |a: usize, b: usize| -> c64 { (0..d).map(|r| basis[(r, a)] * basis[(r, b)]).sum() };
    let cross = bil(l, j) * bil(k, i).conj();
    c64::new((lam * lam + q * q) * delta(i, j) * delta(k, l) + (s + dm2 * q * q) * delta(i, l) * delta(j, k), 0.0)
        - cross * s
}

pub fn ep_check(ch: &DwhChannel, basis: MatRef<'_, c64>) -> Result<EpReport> {
    let d = ch.d;
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: basis.nrows() });
    }
    let gram = basis.adjoint() * basis;
    let dev = (&gram - Mat::<c64>::identity(d, d)).norm_max();
    if dev > 1e-10 {
        return Err(Error::NotOrthonormal { deviation: dev });
    }
    let mut min_entry = f64::INFINITY;
    let mut max_imag = 0.0f64;
    let mut witness = (0, 0, 0, 0);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let e = ep_entry(ch, basis, i, j, k, l);
                    max_imag = max_imag.max(e.im.abs());
                    if e.re < min_entry {
                        min_entry = e.re;
                        witness = (i, j, k, l);
                    }
                }
            }
        }
    }
    Ok(EpReport { satisfied: min_entry >= -1e-12 && max_imag <= 1e-12, min_entry, max_imag, witness })
}
