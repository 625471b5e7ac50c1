//! Entanglement of formation by descent over ensemble isometries.
//!
//! Every ensemble of `ρ = Σ_j X_j X_j^dag` (eigen-ensemble `X_j = √e_j |e_j⟩`)
//! with `L` members is `φ_l = Σ_j U_lj X_j` for an isometry `U` (`L × r`,
//! `U^dag U = 1`). The objective is `Σ_l p_l S(Tr_2 φ_l φ_l^dag / p_l)`.

use faer::{c64, Mat, MatRef, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{
    bipartite_matrix, eig_hermitian, random, svd, DensityMatrix, PureState, TensorShape,
};

/// Eigenvalues below this are treated as zero when forming the ensemble.
const RANK_TOL: f64 = 1e-12;
/// Floor for eigenvalues inside logarithms of the gradient.
const LOG_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, Serialize)]
pub struct EofOptions {
    pub restarts: usize,
    pub max_steps: usize,
    /// Stop once the value improves by less than this over `window` steps.
    pub tol: f64,
    pub window: usize,
    pub seed: u64,
}

impl Default for EofOptions {
    fn default() -> Self {
        Self { restarts: 32, max_steps: 5000, tol: 1e-9, window: 50, seed: 0 }
    }
}

/// Weighted pure-state decomposition.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Ensemble {
    /// `Σ p_i |φ_i⟩⟨φ_i|`.
    pub fn density(&self) -> Mat<c64> {
        let n = self.states.first().map(|s| s.as_slice().len()).unwrap_or(0);
        let mut m = Mat::<c64>::zeros(n, n);
        for (p, s) in self.weights.iter().zip(&self.states) {
            let v = s.as_slice();
            for j in 0..n {
                for i in 0..n {
                    m[(i, j)] += v[i] * v[j].conj() * *p;
                }
            }
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct EofResult {
    /// Best average entropy found, in nats.
    pub value: f64,
    pub ensemble: Ensemble,
    pub restarts_used: usize,
    /// True when the best restart stopped on the tolerance rule.
    pub converged: bool,
    /// Difference between the two best restart values.
    pub gap_estimate: f64,
}

pub(crate) struct Problem {
    r: usize,
    da: usize,
    /// `Y_{jk} = X_j X_k^dag` at index `j·r + k`.
    y: Vec<Mat<c64>>,
    /// Eigen-ensemble vectors (full dimension), for reconstructing states.
    xs: Vec<Vec<c64>>,
    shape: TensorShape,
}

pub(crate) struct Evaluation {
    pub value: f64,
    /// Euclidean gradient with `df = Re Σ conj(Γ_lj) dU_lj`.
    pub grad: Mat<c64>,
}

impl Problem {
    /// From a factor `M` with `ρ = M M^dag` (rows carry `shape`).
    pub(crate) fn from_factor(m: MatRef<'_, c64>, shape: &TensorShape, left: &[usize]) -> Result<Self> {
        if m.nrows() != shape.total() {
            return Err(Error::DimensionMismatch { expected: shape.total(), found: m.nrows() });
        }
        shape.check_factors(left)?;
        if left.is_empty() || left.len() == shape.len() {
            return Err(Error::EmptyBipartition);
        }
        let dec = svd(m)?;
        let mut xs = Vec::new();
        for (k, &s) in dec.s.iter().enumerate() {
            if s * s > RANK_TOL {
                xs.push((0..m.nrows()).map(|i| dec.u[(i, k)] * s).collect::<Vec<c64>>());
            }
        }
        Self::from_vectors(xs, shape, left)
    }

    pub(crate) fn from_density(rho: &DensityMatrix, left: &[usize]) -> Result<Self> {
        let shape = rho.shape();
        shape.check_factors(left)?;
        if left.is_empty() || left.len() == shape.len() {
            return Err(Error::EmptyBipartition);
        }
        let e = eig_hermitian(rho.mat())?;
        let n = rho.dim();
        let mut xs = Vec::new();
        for k in (0..n).rev() {
            let ev = e.values[k];
            if ev > RANK_TOL {
                let s = ev.sqrt();
                xs.push((0..n).map(|i| e.vectors[(i, k)] * s).collect::<Vec<c64>>());
            }
        }
        Self::from_vectors(xs, shape, left)
    }

    fn from_vectors(xs: Vec<Vec<c64>>, shape: &TensorShape, left: &[usize]) -> Result<Self> {
        let r = xs.len();
        if r == 0 {
            return Err(Error::InvalidDensity("zero matrix".into()));
        }
        let mats: Vec<Mat<c64>> = xs
            .iter()
            .map(|x| bipartite_matrix(x, shape, left))
            .collect::<Result<_>>()?;
        let da = mats[0].nrows();
        let mut y = Vec::with_capacity(r * r);
        for j in 0..r {
            for k in 0..r {
                y.push(&mats[j] * mats[k].adjoint());
            }
        }
        Ok(Self { r, da, y, xs, shape: shape.clone() })
    }

    pub(crate) fn rank(&self) -> usize {
        self.r
    }

    fn reduced(&self, u: MatRef<'_, c64>, l: usize) -> Mat<c64> {
        let (r, da) = (self.r, self.da);
        let mut out = Mat::<c64>::zeros(da, da);
        for j in 0..r {
            let a = u[(l, j)];
            if a == c64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..r {
                let coef = a * u[(l, k)].conj();
                let yjk = &self.y[j * r + k];
                for q in 0..da {
                    for p in 0..da {
                        out[(p, q)] += coef * yjk[(p, q)];
                    }
                }
            }
        }
        out
    }

    pub(crate) fn evaluate(&self, u: MatRef<'_, c64>, with_grad: bool) -> Evaluation {
        let (r, da) = (self.r, self.da);
        let big_l = u.nrows();
        let mut value = 0.0;
        let mut grad = Mat::<c64>::zeros(big_l, r);
        for l in 0..big_l {
            let rho_l = self.reduced(u, l);
            let p: f64 = (0..da).map(|i| rho_l[(i, i)].re).sum();
            if p <= 0.0 {
                continue;
            }
            let evd = rho_l.self_adjoint_eigen(Side::Lower).expect("small Hermitian eigenproblem");
            let s = evd.S().column_vector();
            let mus: Vec<f64> = (0..da).map(|i| s[i].re).collect();
            let ent: f64 = mus.iter().filter(|&&m| m > 0.0).map(|&m| -m * m.ln()).sum();
            value += ent + p * p.ln();
            if !with_grad {
                continue;
            }
            // G_l = ln(p) 1 - ln ρ_l
            let vecs = evd.U();
            let lp = p.ln();
            let g = Mat::from_fn(da, da, |a, b| {
                let mut acc = c64::new(0.0, 0.0);
                for k in 0..da {
                    let w = lp - mus[k].max(LOG_FLOOR).ln();
                    acc += vecs[(a, k)] * vecs[(b, k)].conj() * w;
                }
                acc
            });
            // t_kj = Tr(G_l Y_kj)
            let mut t = vec![c64::new(0.0, 0.0); r * r];
            for (idx, ykj) in self.y.iter().enumerate() {
                let mut acc = c64::new(0.0, 0.0);
                for a in 0..da {
                    for b in 0..da {
                        acc += g[(a, b)] * ykj[(b, a)];
                    }
                }
                t[idx] = acc;
            }
            for j in 0..r {
                let mut acc = c64::new(0.0, 0.0);
                for k in 0..r {
                    acc += u[(l, k)] * t[k * r + j];
                }
                grad[(l, j)] = acc * 2.0;
            }
        }
        Evaluation { value, grad }
    }

    pub(crate) fn ensemble(&self, u: MatRef<'_, c64>) -> Ensemble {
        let n = self.shape.total();
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for l in 0..u.nrows() {
            let mut v = vec![c64::new(0.0, 0.0); n];
            for j in 0..self.r {
                let a = u[(l, j)];
                for (vi, xi) in v.iter_mut().zip(&self.xs[j]) {
                    *vi += a * xi;
                }
            }
            let p: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            if p > 1e-14 {
                if let Ok(s) = PureState::normalized(v, self.shape.clone()) {
                    weights.push(p);
                    states.push(s);
                }
            }
        }
        Ensemble { weights, states }
    }
}

/// Polar factor `P Q^dag` of `a = P Σ Q^dag`.
fn retract(a: MatRef<'_, c64>) -> Mat<c64> {
    let dec = svd(a).expect("finite iterate");
    &dec.u * dec.v.adjoint()
}

fn tangent(u: MatRef<'_, c64>, g: MatRef<'_, c64>) -> Mat<c64> {
    let m = u.adjoint() * g;
    let n = m.nrows();
    let herm = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    g - u * &herm
}

struct Descent {
    value: f64,
    u: Mat<c64>,
    converged: bool,
}

fn descend(problem: &Problem, start: Mat<c64>, opts: &EofOptions) -> Descent {
    let mut u = start;
    let mut ev = problem.evaluate(u.as_ref(), true);
    let mut history = vec![ev.value];
    let mut step = 0.5;
    let mut converged = false;
    for it in 0..opts.max_steps {
        let xi = tangent(u.as_ref(), ev.grad.as_ref());
        if xi.norm_l2() < 1e-13 {
            converged = true;
            break;
        }
        let mut accepted = false;
        while step > 1e-14 {
            let cand = retract((&u - &xi * faer::Scale(c64::new(step, 0.0))).as_ref());
            let val = problem.evaluate(cand.as_ref(), false).value;
            if val < ev.value {
                u = cand;
                ev = problem.evaluate(u.as_ref(), true);
                step = (step * 1.5).min(10.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            converged = true;
            break;
        }
        history.push(ev.value);
        if it + 1 >= opts.window && history[history.len() - 1 - opts.window] - ev.value < opts.tol {
            converged = true;
            break;
        }
    }
    Descent { value: ev.value, u, converged }
}

pub(crate) fn optimize(problem: &Problem, opts: &EofOptions) -> EofResult {
    let r = problem.rank();
    let big_l = r * r;
    let mut runs: Vec<Descent> = Vec::with_capacity(opts.restarts.max(1));
    for restart in 0..opts.restarts.max(1) {
        let start = if restart == 0 {
            Mat::from_fn(big_l, r, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(restart as u64);
            retract(random::ginibre(&mut rng, big_l, r).as_ref())
        };
        runs.push(descend(problem, start, opts));
        if r == 1 {
            break;
        }
    }
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| runs[a].value.total_cmp(&runs[b].value));
    let best = &runs[order[0]];
    let gap_estimate = order.get(1).map(|&i| runs[i].value - best.value).unwrap_or(0.0);
    EofResult {
        value: best.value.max(0.0),
        ensemble: problem.ensemble(best.u.as_ref()),
        restarts_used: runs.len(),
        converged: best.converged,
        gap_estimate,
    }
}

/// EoF of `ρ` across `left | rest`; the entropy is taken on the `left` side.
pub fn eof_optimize(rho: &DensityMatrix, left: &[usize], opts: &EofOptions) -> Result<EofResult> {
    let problem = Problem::from_density(rho, left)?;
    Ok(optimize(&problem, opts))
}

/// EoF of `ρ = M M^dag` without forming `ρ`.
pub fn eof_from_factor(
    m: MatRef<'_, c64>,
    shape: &TensorShape,
    left: &[usize],
    opts: &EofOptions,
) -> Result<EofResult> {
    let problem = Problem::from_factor(m, shape, left)?;
    Ok(optimize(&problem, opts))
}
