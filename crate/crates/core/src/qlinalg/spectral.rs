use faer::{c64, Mat, MatRef, Side};
use std::cmp::Ordering;

use super::{
    bipartite_matrix, check_finite, check_hermitian, check_square, complexify, dagger, hermitian_deviation,
    is_real, real_part, PureState,
};
use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: Mat<c64>,
}

impl HermitianEigen {
    /// `Σ f(λ_k) v_k v_k^dag`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> Mat<c64> {
        let n = self.vectors.nrows();
        let k = self.values.len();
        let scaled = Mat::from_fn(n, k, |i, j| self.vectors[(i, j)] * f(self.values[j]));
        matmul(scaled.as_ref(), dagger(self.vectors.as_ref()).as_ref())
    }

    pub fn reconstruct(&self) -> Mat<c64> {
        self.apply_fn(|x| x)
    }
}

/// Hermitian eigen-decomposition. Real symmetric inputs take a faster real path.
pub fn eig_hermitian(m: MatRef<'_, c64>) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    if is_real(m) {
        let re = real_part(m);
        let evd = re.self_adjoint_eigen(Side::Lower).map_err(|_| Error::SolverFailure)?;
        let s = evd.S().column_vector();
        return Ok(HermitianEigen {
            values: (0..s.nrows()).map(|i| s[i]).collect(),
            vectors: complexify(evd.U()),
        });
    }
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::SolverFailure)?;
    let s = evd.S().column_vector();
    Ok(HermitianEigen {
        values: (0..s.nrows()).map(|i| s[i].re).collect(),
        vectors: evd.U().to_owned(),
    })
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    eigvals_unchecked(m)
}

fn eigvals_unchecked(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if is_real(m) {
        return real_part(m)
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::SolverFailure);
    }
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::SolverFailure)
}

/// Eigenvalues of a general square matrix (unordered).
pub fn general_eigenvalues(m: MatRef<'_, c64>) -> Result<Vec<c64>> {
    check_square(m)?;
    check_finite(m)?;
    m.eigenvalues().map_err(|_| Error::SolverFailure)
}

/// Matrix product; real operands use the real kernel.
pub fn matmul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let big = a.nrows() * a.ncols() + b.nrows() * b.ncols() > 4096;
    if big && is_real(a) && is_real(b) {
        let p = real_part(a) * real_part(b);
        return complexify(p.as_ref());
    }
    a * b
}

pub fn singular_values(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    check_finite(m)?;
    m.singular_values().map_err(|_| Error::SolverFailure)
}

/// Thin SVD `m = U diag(s) V^dag`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat<c64>,
    pub s: Vec<f64>,
    pub v: Mat<c64>,
}

pub fn svd(m: MatRef<'_, c64>) -> Result<Svd> {
    check_finite(m)?;
    let dec = m.thin_svd().map_err(|_| Error::SolverFailure)?;
    let s = dec.S().column_vector();
    Ok(Svd {
        u: dec.U().to_owned(),
        s: (0..s.nrows()).map(|i| s[i].re).collect(),
        v: dec.V().to_owned(),
    })
}

/// Trace norm, Hilbert-Schmidt norm and operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub trace: f64,
    pub hs: f64,
    pub op: f64,
}

pub fn norms(m: MatRef<'_, c64>) -> Result<Norms> {
    let s = singular_values(m)?;
    Ok(Norms {
        trace: s.iter().sum(),
        hs: s.iter().map(|x| x * x).sum::<f64>().sqrt(),
        op: s.first().copied().unwrap_or(0.0),
    })
}

/// Operator norm, using eigenvalues for (anti-)Hermitian input and the Gram
/// matrix otherwise. Cheaper than a full SVD on large matrices.
pub fn op_norm(m: MatRef<'_, c64>) -> Result<f64> {
    check_finite(m)?;
    let scale = m.norm_max();
    if scale == 0.0 {
        return Ok(0.0);
    }
    if m.nrows() == m.ncols() {
        let tol = 1e-13 * scale;
        if hermitian_deviation(m) <= tol {
            let ev = eigvals_unchecked(m)?;
            return Ok(ev.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        }
        let n = m.nrows();
        let skew_dev = (0..n)
            .flat_map(|j| (j..n).map(move |i| (i, j)))
            .fold(0.0f64, |a, (i, j)| a.max((m[(i, j)] + m[(j, i)].conj()).norm()));
        if skew_dev <= tol {
            let herm = Mat::from_fn(n, n, |i, j| m[(i, j)] * c64::new(0.0, 1.0));
            let ev = eigvals_unchecked(herm.as_ref())?;
            return Ok(ev.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        }
    }
    let gram = if m.ncols() <= m.nrows() {
        matmul(dagger(m.as_ref()).as_ref(), m)
    } else {
        matmul(m, dagger(m.as_ref()).as_ref())
    };
    let ev = eigvals_unchecked(gram.as_ref())?;
    Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Positive square root of a positive semidefinite matrix; eigenvalues in
/// `[-1e-10, 0)` are clamped to zero.
pub fn sqrt_psd(m: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let e = eig_hermitian(m)?;
    if let Some(&min) = e.values.first() {
        if min < -super::HERMITIAN_TOL * m.norm_max().max(1.0) {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
    }
    Ok(e.apply_fn(|x| x.max(0.0).sqrt()))
}

/// Schmidt decomposition `ψ = Σ_α c_α |l_α⟩ ⊗ |r_α⟩`.
#[derive(Clone, Debug)]
pub struct Schmidt {
    /// Coefficients `√σ_α`, descending; zero coefficients are dropped.
    pub coefficients: Vec<f64>,
    /// Left vectors as columns (space of the `left` factors, in listed order).
    pub left: Mat<c64>,
    /// Right vectors as columns (remaining factors, ascending).
    pub right: Mat<c64>,
}

impl Schmidt {
    /// Weights `σ_α = c_α²`.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }
}

fn lexical(a: MatRef<'_, c64>, i: usize, j: usize) -> Ordering {
    for r in 0..a.nrows() {
        let (x, y) = (a[(r, i)], a[(r, j)]);
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

pub fn schmidt_decompose(psi: &PureState, left: &[usize]) -> Result<Schmidt> {
    let shape = psi.shape();
    shape.check_factors(left)?;
    if left.is_empty() || left.len() == shape.len() {
        return Err(Error::EmptyBipartition);
    }
    let m = bipartite_matrix(psi.as_slice(), shape, left)?;
    let dec = svd(m.as_ref())?;
    let kept: Vec<usize> = (0..dec.s.len()).filter(|&k| dec.s[k] > 1e-13).collect();
    // ties broken by lexical order of the left vectors
    let mut order = kept.clone();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && (dec.s[order[end - 1]] - dec.s[order[end]]).abs() <= 1e-12 {
            end += 1;
        }
        order[start..end].sort_by(|&i, &j| lexical(dec.u.as_ref(), i, j));
        start = end;
    }
    let (dl, dr) = (dec.u.nrows(), dec.v.nrows());
    Ok(Schmidt {
        coefficients: order.iter().map(|&k| dec.s[k]).collect(),
        left: Mat::from_fn(dl, order.len(), |i, a| dec.u[(i, order[a])]),
        right: Mat::from_fn(dr, order.len(), |i, a| dec.v[(i, order[a])].conj()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{random, TensorShape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    #[test]
    fn diag_eigen_sorted() {
        let m = Mat::from_fn(3, 3, |i, j| if i == j { c([3.0, 1.0, 2.0][i]) } else { c(0.0) });
        let e = eig_hermitian(m.as_ref()).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((e.vectors[(2, 1)].norm() - 1.0).abs() < 1e-14);
        assert!((e.vectors[(0, 2)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let x = Mat::from_fn(2, 2, |i, j| if i != j { c(1.0) } else { c(0.0) });
        let ev = eigvals_hermitian(x.as_ref()).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = Mat::from_fn(2, 2, |i, j| if i < j { c(1.0) } else { c(0.0) });
        assert!(matches!(eig_hermitian(m.as_ref()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 5, 17, 40] {
            let m = random::random_hermitian(&mut rng, n);
            let e = eig_hermitian(m.as_ref()).unwrap();
            let residual = norms((&m - e.reconstruct()).as_ref()).unwrap().hs;
            let scale = norms(m.as_ref()).unwrap().hs;
            assert!(residual <= 1e-9 * scale, "n={n} residual {residual}");
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn norms_of_identity_and_projector() {
        let n = norms(Mat::<c64>::identity(4, 4).as_ref()).unwrap();
        assert!((n.trace - 4.0).abs() < 1e-14 && (n.hs - 2.0).abs() < 1e-14 && (n.op - 1.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let shape = TensorShape::single(5).unwrap();
        let psi = random::gaussian_state(&mut rng, &shape);
        let p = crate::qlinalg::DensityMatrix::from_pure(&psi);
        let n = norms(p.mat()).unwrap();
        assert!((n.trace - 1.0).abs() < 1e-12 && (n.hs - 1.0).abs() < 1e-12 && (n.op - 1.0).abs() < 1e-12);
    }

    #[test]
    fn op_norm_paths_agree_with_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random::random_hermitian(&mut rng, 12);
        let g = random::ginibre(&mut rng, 12, 7);
        let sq = random::ginibre(&mut rng, 9, 9);
        let skew = &sq - sq.adjoint();
        for m in [h, g, skew] {
            let a = op_norm(m.as_ref()).unwrap();
            let b = norms(m.as_ref()).unwrap().op;
            assert!((a - b).abs() < 1e-10 * b.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn schmidt_product_and_bell() {
        let shape = TensorShape::uniform(2, 2).unwrap();
        let prod = PureState::basis(&shape, 1).unwrap();
        let s = schmidt_decompose(&prod, &[0]).unwrap();
        assert_eq!(s.coefficients.len(), 1);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-14);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(vec![c(h), c(0.0), c(0.0), c(h)], shape.clone()).unwrap();
        let s = schmidt_decompose(&bell, &[0]).unwrap();
        assert_eq!(s.coefficients.len(), 2);
        for x in &s.coefficients {
            assert!((x - h).abs() < 1e-14);
        }
        assert!(matches!(schmidt_decompose(&bell, &[]), Err(Error::EmptyBipartition)));
        assert!(matches!(schmidt_decompose(&bell, &[0, 1]), Err(Error::EmptyBipartition)));
    }

    #[test]
    fn schmidt_reassembles_random_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shape = TensorShape::new(vec![3, 4]).unwrap();
        let psi = random::gaussian_state(&mut rng, &shape);
        let s = schmidt_decompose(&psi, &[0]).unwrap();
        let total: f64 = s.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let gram_l = s.left.adjoint() * &s.left;
        let gram_r = s.right.adjoint() * &s.right;
        let k = s.coefficients.len();
        assert!((&gram_l - Mat::<c64>::identity(k, k)).norm_max() < 1e-10);
        assert!((&gram_r - Mat::<c64>::identity(k, k)).norm_max() < 1e-10);
        let mut err = 0.0f64;
        for a in 0..3 {
            for b in 0..4 {
                let v: c64 = (0..k).map(|x| s.left[(a, x)] * s.right[(b, x)] * s.coefficients[x]).sum();
                err = err.max((v - psi.as_slice()[a * 4 + b]).norm());
            }
        }
        assert!(err < 1e-10);
    }

    #[test]
    fn schmidt_non_prefix_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let shape = TensorShape::new(vec![2, 3, 2]).unwrap();
        let psi = random::gaussian_state(&mut rng, &shape);
        let s = schmidt_decompose(&psi, &[1]).unwrap();
        let red = crate::qlinalg::reduced_density(&psi, &[1]).unwrap();
        let mut ev = eigvals_hermitian(red.as_ref()).unwrap();
        ev.reverse();
        for (w, e) in s.weights().iter().zip(ev) {
            assert!((w - e).abs() < 1e-12);
        }
    }
}
