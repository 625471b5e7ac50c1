use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use super::{check_dim, check_square, PureState};
use crate::error::{Error, Result};

/// Ordered list of subsystem dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorShape {
    dims: Vec<usize>,
}

impl TensorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::WrongShape("tensor shape needs at least one factor".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::WrongShape(format!("zero-dimensional factor in {dims:?}")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        check_dim(total)?;
        Ok(Self { dims })
    }

    /// `n` copies of a `d`-dimensional factor.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    /// A single factor.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of the dimensions of the given factors.
    pub fn dim_of(&self, factors: &[usize]) -> usize {
        factors.iter().map(|&f| self.dims[f]).product()
    }

    /// Shape made of the selected factors, in the given order.
    pub fn select(&self, factors: &[usize]) -> Result<TensorShape> {
        self.check_factors(factors)?;
        if factors.is_empty() {
            return TensorShape::new(vec![1]);
        }
        TensorShape::new(factors.iter().map(|&f| self.dims[f]).collect())
    }

    /// Factors not in `factors`, ascending.
    pub fn complement(&self, factors: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|f| !factors.contains(f)).collect()
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &TensorShape) -> Result<TensorShape> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        TensorShape::new(dims)
    }

    pub fn check_factors(&self, factors: &[usize]) -> Result<()> {
        for (k, &f) in factors.iter().enumerate() {
            if f >= self.len() {
                return Err(Error::FactorOutOfRange { index: f, len: self.len() });
            }
            if factors[..k].contains(&f) {
                return Err(Error::WrongShape(format!("factor {f} listed twice")));
            }
        }
        Ok(())
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.len()];
        for k in (0..self.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Contribution of every multi-index over `factors` (first listed factor
    /// most significant) to the flat basis index.
    pub(crate) fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(out.len() * self.dims[f]);
            for &o in &out {
                for digit in 0..self.dims[f] {
                    next.push(o + digit * strides[f]);
                }
            }
            out = next;
        }
        out
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

fn check_attached(m: MatRef<'_, c64>, shape: &TensorShape) -> Result<usize> {
    let n = check_square(m)?;
    if n != shape.total() {
        return Err(Error::DimensionMismatch { expected: shape.total(), found: n });
    }
    Ok(n)
}

/// Reduced operator on the `keep` factors (sorted ascending in the output).
pub fn partial_trace(m: MatRef<'_, c64>, shape: &TensorShape, keep: &[usize]) -> Result<Mat<c64>> {
    check_attached(m, shape)?;
    shape.check_factors(keep)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced = shape.complement(&keep);
    let ok = shape.offsets(&keep);
    let ot = shape.offsets(&traced);
    let dk = ok.len();
    let mut out = Mat::<c64>::zeros(dk, dk);
    for b in 0..dk {
        for a in 0..dk {
            let mut acc = c64::new(0.0, 0.0);
            for &t in &ot {
                acc += m[(ok[a] + t, ok[b] + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Transpose on a single tensor factor.
pub fn partial_transpose(m: MatRef<'_, c64>, shape: &TensorShape, factor: usize) -> Result<Mat<c64>> {
    let n = check_attached(m, shape)?;
    shape.check_factors(&[factor])?;
    let stride = shape.strides()[factor];
    let d = shape.dims()[factor];
    Ok(Mat::from_fn(n, n, |i, j| {
        let di = (i / stride) % d;
        let dj = (j / stride) % d;
        let ii = i - di * stride + dj * stride;
        let jj = j - dj * stride + di * stride;
        m[(ii, jj)]
    }))
}

/// Reshape a vector into the `left × rest` matrix for the bipartition where
/// `left` lists the row factors (in the given order).
pub fn bipartite_matrix(v: &[c64], shape: &TensorShape, left: &[usize]) -> Result<Mat<c64>> {
    if v.len() != shape.total() {
        return Err(Error::DimensionMismatch { expected: shape.total(), found: v.len() });
    }
    shape.check_factors(left)?;
    let right = shape.complement(left);
    let ol = shape.offsets(left);
    let or = shape.offsets(&right);
    Ok(Mat::from_fn(ol.len(), or.len(), |a, b| v[ol[a] + or[b]]))
}

/// Reduced density matrix of a pure state on the `keep` factors (sorted).
pub fn reduced_density(psi: &PureState, keep: &[usize]) -> Result<Mat<c64>> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let m = bipartite_matrix(psi.as_slice(), psi.shape(), &keep)?;
    Ok(&m * m.adjoint())
}

/// `op` acting on `sites` (in the listed order) tensored with the identity on
/// every other factor.
pub fn embed_operator(op: MatRef<'_, c64>, shape: &TensorShape, sites: &[usize]) -> Result<Mat<c64>> {
    shape.check_factors(sites)?;
    let k = check_square(op)?;
    if k != shape.dim_of(sites) {
        return Err(Error::DimensionMismatch { expected: shape.dim_of(sites), found: k });
    }
    let n = shape.total();
    let os = shape.offsets(sites);
    let rest = shape.complement(sites);
    let orest = shape.offsets(&rest);
    let mut out = Mat::<c64>::zeros(n, n);
    for &t in &orest {
        for b in 0..k {
            for a in 0..k {
                let v = op[(a, b)];
                if v != c64::new(0.0, 0.0) {
                    out[(os[a] + t, os[b] + t)] = v;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{eigvals_hermitian, random, DensityMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> Mat<c64> {
        Mat::from_fn(v.len(), v.len(), |i, j| if i == j { c64::new(v[i], 0.0) } else { c64::new(0.0, 0.0) })
    }

    fn pauli_x() -> Mat<c64> {
        Mat::from_fn(2, 2, |i, j| if i != j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
    }

    fn bell() -> Mat<c64> {
        let h = 0.5;
        Mat::from_fn(4, 4, |i, j| {
            if (i == 0 || i == 3) && (j == 0 || j == 3) {
                c64::new(h, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn kron_identity_and_scalar() {
        let i2 = Mat::<c64>::identity(2, 2);
        let k = kron(i2.as_ref(), i2.as_ref());
        assert!((&k - Mat::<c64>::identity(4, 4)).norm_max() == 0.0);
        let k = kron(diag(&[1.0, 2.0]).as_ref(), diag(&[3.0]).as_ref());
        assert!((&k - diag(&[3.0, 6.0])).norm_max() == 0.0);
    }

    #[test]
    fn kron_pauli_pair_flips_both_bits() {
        let xx = kron(pauli_x().as_ref(), pauli_x().as_ref());
        // e0⊗e0 = basis 0 maps to e1⊗e1 = basis 3
        for i in 0..4 {
            let expected = if i == 3 { 1.0 } else { 0.0 };
            assert_eq!(xx[(i, 0)], c64::new(expected, 0.0));
        }
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s2 = TensorShape::new(vec![2, 3]).unwrap();
        let rho = random::random_density(&mut rng, 2, 2);
        let sigma = random::random_density(&mut rng, 3, 3);
        let prod = kron(rho.as_ref(), sigma.as_ref());
        let red = partial_trace(prod.as_ref(), &s2, &[0]).unwrap();
        assert!((&red - &rho).norm_max() < 1e-14);
        let red = partial_trace(prod.as_ref(), &s2, &[1]).unwrap();
        assert!((&red - &sigma).norm_max() < 1e-14);

        let s22 = TensorShape::uniform(2, 2).unwrap();
        let red = partial_trace(bell().as_ref(), &s22, &[0]).unwrap();
        assert!((&red - Mat::<c64>::identity(2, 2) * faer::Scale(c64::new(0.5, 0.0))).norm_max() < 1e-15);
    }

    #[test]
    fn partial_trace_preserves_trace_by_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = TensorShape::new(vec![2, 3]).unwrap();
        let m = random::random_density(&mut rng, 6, 6);
        // direct summation oracle
        let mut direct = c64::new(0.0, 0.0);
        for i in 0..6 {
            direct += m[(i, i)];
        }
        for keep in [vec![0], vec![1], vec![0, 1], vec![]] {
            let red = partial_trace(m.as_ref(), &shape, &keep).unwrap();
            let t: c64 = (0..red.nrows()).map(|i| red[(i, i)]).sum();
            assert!((t - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_factor() {
        let shape = TensorShape::uniform(2, 2).unwrap();
        let err = partial_trace(bell().as_ref(), &shape, &[2]).unwrap_err();
        assert_eq!(err, Error::FactorOutOfRange { index: 2, len: 2 });
    }

    #[test]
    fn partial_transpose_of_product_and_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shape = TensorShape::uniform(2, 2).unwrap();
        let rho = random::random_density(&mut rng, 2, 2);
        let sigma = random::random_density(&mut rng, 2, 2);
        let prod = kron(rho.as_ref(), sigma.as_ref());
        let pt = partial_transpose(prod.as_ref(), &shape, 1).unwrap();
        let expected = kron(rho.as_ref(), sigma.transpose());
        assert!((&pt - &expected).norm_max() < 1e-15);

        let pt = partial_transpose(bell().as_ref(), &shape, 1).unwrap();
        let ev = eigvals_hermitian(pt.as_ref()).unwrap();
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        assert!(partial_transpose(bell().as_ref(), &shape, 2).is_err());
    }

    #[test]
    fn embed_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let shape = TensorShape::new(vec![2, 3, 2]).unwrap();
        let op = random::random_hermitian(&mut rng, 3);
        let full = embed_operator(op.as_ref(), &shape, &[1]).unwrap();
        let i2 = Mat::<c64>::identity(2, 2);
        let expected = kron(kron(i2.as_ref(), op.as_ref()).as_ref(), i2.as_ref());
        assert!((&full - &expected).norm_max() < 1e-15);
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let shape = TensorShape::new(vec![2, 3, 2]).unwrap();
        let psi = random::gaussian_state(&mut rng, &shape);
        let rho = DensityMatrix::from_pure(&psi);
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let a = reduced_density(&psi, &keep).unwrap();
            let b = partial_trace(rho.mat(), &shape, &keep).unwrap();
            assert!((&a - &b).norm_max() < 1e-14);
        }
    }
}
