use faer::{c64, Mat, MatRef};

use super::{
    check_hermitian, eigvals_hermitian, kron, partial_trace, reduced_density, trace, TensorShape,
    HERMITIAN_TOL,
};
use crate::error::{Error, Result};

/// Positive semidefinite, unit-trace matrix attached to a tensor shape.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: Mat<c64>,
    shape: TensorShape,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all to 1e-10).
    pub fn new(mat: Mat<c64>, shape: TensorShape) -> Result<Self> {
        if mat.nrows() != shape.total() {
            return Err(Error::DimensionMismatch { expected: shape.total(), found: mat.nrows() });
        }
        check_hermitian(mat.as_ref())?;
        let tr = trace(mat.as_ref());
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = eigvals_hermitian(mat.as_ref())?[0];
        if min < -HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { mat, shape })
    }

    /// For matrices that are densities by construction.
    pub(crate) fn new_unchecked(mat: Mat<c64>, shape: TensorShape) -> Self {
        debug_assert_eq!(mat.nrows(), shape.total());
        Self { mat, shape }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.as_slice();
        let n = v.len();
        let mat = Mat::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self { mat, shape: psi.shape().clone() }
    }

    pub fn maximally_mixed(shape: TensorShape) -> Self {
        let n = shape.total();
        let mat = Mat::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(1.0 / n as f64, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Self { mat, shape }
    }

    pub fn mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Reduced density on `keep` (sorted ascending).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let m = partial_trace(self.mat.as_ref(), &self.shape, &keep)?;
        Ok(Self::new_unchecked(m, self.shape.select(&keep)?))
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let shape = self.shape.concat(&other.shape)?;
        Ok(Self::new_unchecked(kron(self.mat.as_ref(), other.mat.as_ref()), shape))
    }

    /// Eigenvalues ascending, with small negatives clamped to zero.
    pub fn spectrum(&self) -> Vec<f64> {
        eigvals_hermitian(self.mat.as_ref())
            .expect("density matrix is Hermitian")
            .into_iter()
            .map(|x| x.max(0.0))
            .collect()
    }
}

/// Unit vector attached to a tensor shape.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vec: Vec<c64>,
    shape: TensorShape,
}

fn norm(v: &[c64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl PureState {
    /// Requires Euclidean norm 1 to within 1e-12.
    pub fn new(vec: Vec<c64>, shape: TensorShape) -> Result<Self> {
        if vec.len() != shape.total() {
            return Err(Error::DimensionMismatch { expected: shape.total(), found: vec.len() });
        }
        if vec.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = norm(&vec);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("norm {n}")));
        }
        Ok(Self { vec, shape })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(vec: Vec<c64>, shape: TensorShape) -> Result<Self> {
        let n = norm(&vec);
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::InvalidState("cannot normalize zero or non-finite vector".into()));
        }
        let vec = vec.into_iter().map(|x| x / n).collect();
        Self::new(vec, shape)
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(shape: &TensorShape, index: usize) -> Result<Self> {
        let n = shape.total();
        if index >= n {
            return Err(Error::InvalidState(format!("basis index {index} >= {n}")));
        }
        let mut vec = vec![c64::new(0.0, 0.0); n];
        vec[index] = c64::new(1.0, 0.0);
        Ok(Self { vec, shape: shape.clone() })
    }

    pub fn as_slice(&self) -> &[c64] {
        &self.vec
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> c64 {
        self.vec.iter().zip(&other.vec).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn conj(&self) -> PureState {
        Self { vec: self.vec.iter().map(|x| x.conj()).collect(), shape: self.shape.clone() }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// Reduced density on `keep`, computed from the amplitude matrix.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let m = reduced_density(self, &keep)?;
        Ok(DensityMatrix::new_unchecked(m, self.shape.select(&keep)?))
    }
}
