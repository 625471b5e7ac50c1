//! Pure translation-invariant finitely correlated states.
//!
//! A state is generated by an isometry `V : C^d ⊗ C^b → C^b` stored as a
//! `b × (d·b)` matrix whose column index is `s·b + β` (spin digit first).
//! `V_s` denotes the `b × b` block of spin level `s`, so that
//! `𝔼(A ⊗ B) = Σ_{s,s'} A_{ss'} V_s B V_{s'}^dag` and `Ê(B) = Σ_s V_s B V_s^dag`.

mod specs;

use faer::{c64, Mat, MatRef};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{
    check_dim, dagger, general_eigenvalues, hermitian_part, kron, matmul, norms, svd, DensityMatrix,
    TensorShape, eig_hermitian,
};

pub use specs::builtin_spec;

/// Isometry tolerance for `V V^dag = 1_b`.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Eigenvalues of `Ê` with modulus above `1 - PERIPHERAL_TOL` are peripheral.
pub const PERIPHERAL_TOL: f64 = 1e-8;
/// Largest power used by the decay-prefactor estimate.
pub const DECAY_HORIZON: usize = 30;
/// Norms of `Ê^n - Ê^∞` below this are rounding noise and skipped in the
/// prefactor estimate.
pub const DECAY_NOISE_FLOOR: f64 = 1e-12;

/// The pair `(d, b)` together with the generating isometry.
#[derive(Clone, Debug)]
pub struct FcsSpec {
    d: usize,
    b: usize,
    v: Mat<c64>,
}

impl FcsSpec {
    /// Checks only the shape; use [`validate`] for the physical conditions.
    pub fn new(d: usize, b: usize, v: Mat<c64>) -> Result<Self> {
        if d == 0 || b == 0 {
            return Err(Error::WrongShape("d and b must be positive".into()));
        }
        if v.nrows() != b || v.ncols() != d * b {
            return Err(Error::WrongShape(format!(
                "V must be {b}x{}, got {}x{}",
                d * b,
                v.nrows(),
                v.ncols()
            )));
        }
        if !v.is_all_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { d, b, v })
    }

    /// Builds `V` from its `d` blocks `V_s` (each `b × b`).
    pub fn from_blocks(blocks: &[Mat<c64>]) -> Result<Self> {
        let d = blocks.len();
        let b = blocks.first().map(|m| m.nrows()).unwrap_or(0);
        if blocks.iter().any(|m| m.nrows() != b || m.ncols() != b) {
            return Err(Error::WrongShape("blocks must all be b x b".into()));
        }
        let v = Mat::from_fn(b, d * b, |a, col| blocks[col / b][(a, col % b)]);
        Self::new(d, b, v)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn v(&self) -> MatRef<'_, c64> {
        self.v.as_ref()
    }

    pub fn block(&self, s: usize) -> Mat<c64> {
        let b = self.b;
        Mat::from_fn(b, b, |a, beta| self.v[(a, s * b + beta)])
    }

    /// `‖V V^dag - 1_b‖_max`.
    pub fn isometry_deviation(&self) -> f64 {
        let g = matmul(self.v.as_ref(), dagger(self.v.as_ref()).as_ref());
        (&g - Mat::<c64>::identity(self.b, self.b)).norm_max()
    }

    /// Same state with `V` multiplied by `s` (breaks the isometry unless |s|=1).
    pub fn scaled(&self, s: f64) -> Self {
        Self { d: self.d, b: self.b, v: Mat::from_fn(self.b, self.d * self.b, |i, j| self.v[(i, j)] * s) }
    }

    /// `𝔼(A ⊗ B) = V (A ⊗ B) V^dag`.
    pub fn expectation_map(&self, a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
        let ab = kron(a, b);
        matmul(matmul(self.v.as_ref(), ab.as_ref()).as_ref(), dagger(self.v.as_ref()).as_ref())
    }

    /// `Ê(B) = 𝔼(1 ⊗ B)`.
    pub fn apply_transfer(&self, b: MatRef<'_, c64>) -> Mat<c64> {
        let mut out = Mat::<c64>::zeros(self.b, self.b);
        for s in 0..self.d {
            let vs = self.block(s);
            out += matmul(matmul(vs.as_ref(), b).as_ref(), dagger(vs.as_ref()).as_ref());
        }
        out
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub isometry_deviation: f64,
    /// Number of eigenvalues of `Ê` with modulus `≥ 1 - 1e-8`.
    pub peripheral_count: usize,
    /// Largest modulus after removing the unit eigenvalue.
    pub lambda: f64,
}

/// Row-major vectorization `vec(B)_{αb+β} = B_{αβ}`.
pub fn vec_of(m: MatRef<'_, c64>) -> Vec<c64> {
    let b = m.ncols();
    (0..m.nrows() * b).map(|k| m[(k / b, k % b)]).collect()
}

fn unvec(v: &[c64], b: usize) -> Mat<c64> {
    Mat::from_fn(b, b, |i, j| v[i * b + j])
}

/// Matrix of `Ê` on row-major vectorized `b × b` matrices: `Σ_s V_s ⊗ conj(V_s)`.
pub fn transfer_matrix(spec: &FcsSpec) -> Mat<c64> {
    let b = spec.b;
    let mut e = Mat::<c64>::zeros(b * b, b * b);
    for s in 0..spec.d {
        let vs = spec.block(s);
        let conj = Mat::from_fn(b, b, |i, j| vs[(i, j)].conj());
        e += kron(vs.as_ref(), conj.as_ref());
    }
    e
}

fn spectrum_report(e: MatRef<'_, c64>) -> Result<(usize, f64)> {
    let mut moduli: Vec<f64> = general_eigenvalues(e)?.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let peripheral = moduli.iter().filter(|&&m| m >= 1.0 - PERIPHERAL_TOL).count();
    let lambda = moduli.get(1).copied().unwrap_or(0.0);
    Ok((peripheral, lambda))
}

/// Checks the isometry condition and that `Ê` has trivial peripheral spectrum.
pub fn validate(spec: &FcsSpec) -> Result<ValidationReport> {
    let dev = spec.isometry_deviation();
    if dev > ISOMETRY_TOL {
        return Err(Error::IsometryViolation { deviation: dev });
    }
    let (count, lambda) = spectrum_report(transfer_matrix(spec).as_ref())?;
    if count != 1 {
        return Err(Error::PeripheralSpectrum { count });
    }
    Ok(ValidationReport { isometry_deviation: dev, peripheral_count: count, lambda })
}

/// Transfer operator, its invariant state and decay constants.
#[derive(Clone, Debug)]
pub struct TransferData {
    /// `Ê` as a `b² × b²` matrix on row-major vectorized inputs.
    pub ehat: Mat<c64>,
    /// `ρ` with `Tr ρ Ê(B) = Tr ρ B`.
    pub fixed_point: DensityMatrix,
    /// Second-largest eigenvalue modulus of `Ê` (0 when `b = 1`).
    pub lambda: f64,
    /// Empirical prefactor with `‖Ê^n - Ê^∞‖ ≤ c λ^n` for `n ≤ 30`.
    pub c: f64,
    /// `‖Ê^n - Ê^∞‖_{1→1}` for `n = 0..=30`.
    pub decay_norms: Vec<f64>,
    /// Prefactor for the amplified norm `‖id ⊗ (Ê^n - Ê^∞)‖`, bounded above
    /// by the trace norm of the Choi matrix of the dual map.
    pub c_cb: f64,
}

impl TransferData {
    /// `Ê^∞(B) = Tr(ρ B) 1_b` as a matrix.
    pub fn ehat_infinity(&self) -> Mat<c64> {
        let b = self.fixed_point.dim();
        let rho = self.fixed_point.mat();
        Mat::from_fn(b * b, b * b, |r, c| {
            let (a, a2) = (r / b, r % b);
            let (beta, beta2) = (c / b, c % b);
            if a == a2 {
                rho[(beta2, beta)]
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }
}

/// Induced 1→1 norm of a superoperator matrix, maximized over matrix units.
pub fn superop_norm_1to1(m: MatRef<'_, c64>, b: usize) -> Result<f64> {
    let mut best = 0.0f64;
    for k in 0..b * b {
        let col: Vec<c64> = (0..b * b).map(|r| m[(r, k)]).collect();
        let out = unvec(&col, b);
        best = best.max(norms(out.as_ref())?.trace);
    }
    Ok(best)
}

/// `‖Σ_ij E_ij ⊗ Φ^*(E_ij)‖₁` for the Hilbert-Schmidt dual of the
/// superoperator `m`; an upper bound on the diamond norm of `Φ^*`.
pub fn dual_choi_trace_norm(m: MatRef<'_, c64>, b: usize) -> Result<f64> {
    // matrix of Φ^* is m^dag
    let choi = Mat::from_fn(b * b, b * b, |r, c| {
        let (i, a) = (r / b, r % b);
        let (j, bb) = (c / b, c % b);
        m[(i * b + j, a * b + bb)].conj()
    });
    Ok(norms(choi.as_ref())?.trace)
}

fn fixed_point(spec: &FcsSpec) -> Result<DensityMatrix> {
    let b = spec.b;
    // dual map ρ ↦ Σ V_s^dag ρ V_s
    let mut dual = Mat::<c64>::zeros(b * b, b * b);
    for s in 0..spec.d {
        let vs = spec.block(s);
        let vt = vs.transpose().to_owned();
        dual += kron(dagger(vs.as_ref()).as_ref(), vt.as_ref());
    }
    let shifted = &dual - Mat::<c64>::identity(b * b, b * b);
    let dec = svd(shifted.as_ref())?;
    let k = dec.s.len() - 1;
    let null: Vec<c64> = (0..b * b).map(|r| dec.v[(r, k)]).collect();
    let raw = unvec(&null, b);
    let tr: c64 = (0..b).map(|i| raw[(i, i)]).sum();
    if tr.norm() < 1e-12 {
        return Err(Error::SolverFailure);
    }
    let phased = Mat::from_fn(b, b, |i, j| raw[(i, j)] / tr);
    let herm = hermitian_part(phased.as_ref());
    // clamp rounding negatives, then renormalize
    let e = eig_hermitian(herm.as_ref())?;
    let clamped = e.apply_fn(|x| x.max(0.0));
    let t: f64 = (0..b).map(|i| clamped[(i, i)].re).sum();
    let rho = Mat::from_fn(b, b, |i, j| clamped[(i, j)] / t);
    DensityMatrix::new(rho, TensorShape::single(b)?)
}

/// Transfer matrix, invariant state, `λ` and the empirical prefactor `c`.
pub fn transfer(spec: &FcsSpec) -> Result<TransferData> {
    let report = validate(spec)?;
    let b = spec.b;
    let ehat = transfer_matrix(spec);
    let fixed_point = fixed_point(spec)?;
    let lambda = if b == 1 { 0.0 } else { report.lambda };
    let mut data = TransferData { ehat, fixed_point, lambda, c: 0.0, decay_norms: Vec::new(), c_cb: 0.0 };
    let einf = data.ehat_infinity();
    // (Ê - Ê^∞)^n = Ê^n - Ê^∞ for n ≥ 1, and the powers of the difference
    // avoid cancellation at large n
    let step = &data.ehat - &einf;
    let mut diff = Mat::<c64>::identity(b * b, b * b) - &einf;
    let (mut c, mut c_cb) = (0.0f64, 0.0f64);
    for n in 0..=DECAY_HORIZON {
        let norm = superop_norm_1to1(diff.as_ref(), b)?;
        data.decay_norms.push(norm);
        if lambda > 0.0 && norm > DECAY_NOISE_FLOOR {
            c = c.max(norm / lambda.powi(n as i32));
            let cb = dual_choi_trace_norm(diff.as_ref(), b)?;
            c_cb = c_cb.max(cb / lambda.powi(n as i32));
        }
        diff = if n == 0 { step.clone() } else { matmul(step.as_ref(), diff.as_ref()) };
    }
    data.c = c;
    data.c_cb = c_cb;
    Ok(data)
}

/// Memory state `ρ_{A⊗B} = V^dag ρ V` on shape `[d, b]`.
pub fn rho_ab(spec: &FcsSpec) -> Result<DensityMatrix> {
    let t = transfer(spec)?;
    let m = matmul(matmul(dagger(spec.v.as_ref()).as_ref(), t.fixed_point.mat()).as_ref(), spec.v.as_ref());
    let m = hermitian_part(m.as_ref());
    Ok(DensityMatrix::new_unchecked(m, TensorShape::new(vec![spec.d, spec.b])?))
}

/// Factor `M` (`d^n × b²`) with `ρ_{[1,n]} = M M^dag`.
///
/// Columns are indexed by `(i, β)`: `i` runs over an eigen-ensemble of the
/// invariant state and `β` over the traced memory.
pub fn chain_factor(spec: &FcsSpec, n: usize) -> Result<Mat<c64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("chain needs at least one site".into()));
    }
    let (d, b) = (spec.d, spec.b);
    let rows = d
        .checked_pow(n as u32)
        .ok_or(Error::DimensionCap { dim: usize::MAX, cap: crate::qlinalg::max_dim() })?;
    check_dim(rows.saturating_mul(b))?;
    let t = transfer(spec)?;
    let e = eig_hermitian(t.fixed_point.mat())?;
    let vbar = Mat::from_fn(b, d * b, |i, j| spec.v[(i, j)].conj());
    let mut m = Mat::<c64>::zeros(rows, b * b);
    for (i, &q) in e.values.iter().enumerate() {
        if q <= 0.0 {
            continue;
        }
        let sq = q.sqrt();
        // row vector sqrt(q) χ^T, then repeatedly apply V^dag on the memory
        let mut tmat = Mat::from_fn(1, b, |_, a| e.vectors[(a, i)] * sq);
        for _ in 0..n {
            let next = matmul(tmat.as_ref(), vbar.as_ref());
            let k = next.nrows();
            tmat = Mat::from_fn(k * d, b, |r, beta| next[(r / d, (r % d) * b + beta)]);
        }
        for r in 0..rows {
            for beta in 0..b {
                m[(r, i * b + beta)] = tmat[(r, beta)];
            }
        }
    }
    Ok(m)
}

/// `ρ_{[1,n]}` on `n` spin sites.
pub fn rho_chain(spec: &FcsSpec, n: usize) -> Result<DensityMatrix> {
    let m = chain_factor(spec, n)?;
    let rho = hermitian_part(matmul(m.as_ref(), dagger(m.as_ref()).as_ref()).as_ref());
    Ok(DensityMatrix::new_unchecked(rho, TensorShape::uniform(spec.d, n)?))
}

/// Factor of the reduced density on the `keep` factors of `M M^dag`, where
/// `M`'s rows carry `shape`: rows of the result run over `keep` (sorted) and
/// columns over (traced digits, original column).
pub fn reduce_factor(m: MatRef<'_, c64>, shape: &TensorShape, keep: &[usize]) -> Result<Mat<c64>> {
    shape.check_factors(keep)?;
    if m.nrows() != shape.total() {
        return Err(Error::DimensionMismatch { expected: shape.total(), found: m.nrows() });
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced = shape.complement(&keep);
    let ok = shape.offsets(&keep);
    let ot = shape.offsets(&traced);
    let cols = m.ncols();
    Ok(Mat::from_fn(ok.len(), ot.len() * cols, |a, c| m[(ok[a] + ot[c / cols], c % cols)]))
}

/// `ρ_{1,[p,n]}`: site 1 together with sites `p..=n` (one-based), on
/// `n - p + 2` factors.
pub fn rho_spin_block(spec: &FcsSpec, p: usize, n: usize) -> Result<DensityMatrix> {
    if p < 2 || p > n {
        return Err(Error::InvalidParameter(format!("need 2 <= p <= n, got p={p}, n={n}")));
    }
    let m = chain_factor(spec, n)?;
    let shape = TensorShape::uniform(spec.d, n)?;
    let keep: Vec<usize> = std::iter::once(0).chain(p - 1..n).collect();
    let f = reduce_factor(m.as_ref(), &shape, &keep)?;
    let rho = hermitian_part(matmul(f.as_ref(), dagger(f.as_ref()).as_ref()).as_ref());
    Ok(DensityMatrix::new_unchecked(rho, TensorShape::uniform(spec.d, keep.len())?))
}
