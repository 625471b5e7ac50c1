//! Random matrices and states. Every sampler takes the generator explicitly.

use faer::{c64, Mat};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{dagger, matmul, svd, PureState, TensorShape};

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re, im)
}

/// `rows × cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat<c64> {
    let mut m = Mat::<c64>::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = gauss(rng);
        }
    }
    m
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn gaussian_state<R: Rng + ?Sized>(rng: &mut R, shape: &TensorShape) -> PureState {
    loop {
        let v: Vec<c64> = (0..shape.total()).map(|_| gauss(rng)).collect();
        if let Ok(psi) = PureState::normalized(v, shape.clone()) {
            return psi;
        }
    }
}

/// Haar-random unitary via the polar factor of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat<c64> {
    let g = ginibre(rng, n, n);
    let dec = svd(g.as_ref()).expect("finite Gaussian sample");
    matmul(dec.u.as_ref(), dagger(dec.v.as_ref()).as_ref())
}

/// Random density matrix of rank at most `rank`: `G G^dag / Tr` with `G` a
/// `dim × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Mat<c64> {
    let g = ginibre(rng, dim, rank.max(1));
    let m = matmul(g.as_ref(), dagger(g.as_ref()).as_ref());
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    Mat::from_fn(dim, dim, |i, j| {
        if i == j {
            c64::new(m[(i, i)].re / tr, 0.0)
        } else {
            m[(i, j)] / tr
        }
    })
}

/// Random Hermitian matrix `(G + G^dag) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat<c64> {
    let g = ginibre(rng, n, n);
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(g[(i, i)].re, 0.0)
        } else {
            (g[(i, j)] + g[(j, i)].conj()) * 0.5
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let u = haar_unitary(&mut rng, 5);
        let g = u.adjoint() * &u;
        assert!((&g - Mat::<c64>::identity(5, 5)).norm_max() < 1e-12);
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_density(&mut rng, 4, 2);
        let rho = super::super::DensityMatrix::new(m, TensorShape::single(4).unwrap()).unwrap();
        assert_eq!(rho.spectrum().iter().filter(|&&x| x > 1e-12).count(), 2);
    }
}
