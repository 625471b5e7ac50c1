use faer::{c64, Mat, MatRef};
use rand::Rng;

use super::model::LocalOperator;
use crate::error::{Error, Result};
use crate::qlinalg::{embed_operator, matmul, partial_trace, random, TensorShape};

/// `⟨O⟩_S = Tr_{V\S}(O) / dim(V\S)`, the Haar average over unitaries on the
/// complement of `keep`, kept as an operator on `keep`.
pub fn localize(o: MatRef<'_, c64>, dims: &[usize], keep: &[usize]) -> Result<LocalOperator> {
    let shape = TensorShape::new(dims.to_vec())?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced: usize = shape.complement(&keep).iter().map(|&s| dims[s]).product();
    let mut mat = partial_trace(o, &shape, &keep)?;
    mat *= faer::Scale(c64::new(1.0 / traced as f64, 0.0));
    Ok(LocalOperator { sites: keep, mat })
}

/// Monte Carlo estimate of `∫ (1 ⊗ U) O (1 ⊗ U)^dag dU` over Haar unitaries on
/// the `avg` factors, with the entrywise standard error of the mean.
pub fn haar_average_mc<R: Rng + ?Sized>(
    o: MatRef<'_, c64>,
    dims: &[usize],
    avg: &[usize],
    samples: usize,
    rng: &mut R,
) -> Result<(Mat<c64>, Mat<f64>)> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let shape = TensorShape::new(dims.to_vec())?;
    let n = shape.total();
    let k = shape.dim_of(avg);
    let mut sum = Mat::<c64>::zeros(n, n);
    let mut sq = Mat::<f64>::zeros(n, n);
    for _ in 0..samples {
        let u = embed_operator(random::haar_unitary(rng, k).as_ref(), &shape, avg)?;
        let ud = crate::qlinalg::dagger(u.as_ref());
        let x = matmul(matmul(u.as_ref(), o).as_ref(), ud.as_ref());
        sum += &x;
        for j in 0..n {
            for i in 0..n {
                sq[(i, j)] += x[(i, j)].norm_sqr();
            }
        }
    }
    let s = samples as f64;
    let mean = &sum * faer::Scale(c64::new(1.0 / s, 0.0));
    let err = Mat::from_fn(n, n, |i, j| {
        let var = (sq[(i, j)] / s - mean[(i, j)].norm_sqr()).max(0.0);
        (var / (s - 1.0)).sqrt()
    });
    Ok((mean, err))
}
