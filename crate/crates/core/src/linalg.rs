//! Small dense complex linear algebra used across the crate.
//!
//! Metric matrices follow the chart convention `‖v‖² = Σ_{l,m} H_{lm} v_l v̄_m`,
//! i.e. `vᵀ H v̄`. Eigenvalues are the same as for the usual `v* H v` form
//! because `Hᵀ = H̄` for hermitian `H`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Eigenvalues (ascending) and matching unit eigenvectors of a hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0[0]
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMatrix(format!("{}x{} matrix", m.nrows(), m.ncols())))
}

/// Lower-triangular `L` with `m = L L*`.
pub fn cholesky_lower(m: &CMatrix) -> Result<CMatrix> {
    hermitian_part(m)
        .cholesky()
        .map(|ch| ch.l())
        .ok_or_else(|| Error::NotPositiveDefinite {
            point: "gram matrix".into(),
            min_eigenvalue: min_eigenvalue(m),
        })
}

/// Linear change of coordinates `z = A w` that makes the metric the identity:
/// `Aᵀ H Ā = I`.
pub fn normalizing_transform(gram: &CMatrix) -> Result<CMatrix> {
    let l = cholesky_lower(gram)?;
    Ok(inverse(&l)?.transpose())
}

/// Transforms a metric matrix under `z = A w`: returns `Aᵀ H Ā`.
pub fn pull_metric(h: &CMatrix, a: &CMatrix) -> CMatrix {
    a.transpose() * h * a.map(|x| x.conj())
}

/// Eigenvalues of `prime` relative to `base` (roots of `det(prime − λ base)`),
/// ascending.
pub fn generalized_eigenvalues(base: &CMatrix, prime: &CMatrix) -> Result<Vec<f64>> {
    let l = cholesky_lower(base)?;
    let linv = inverse(&l)?;
    let reduced = &linv * prime * linv.adjoint();
    Ok(hermitian_eigen(&reduced).0)
}

/// `Σ_{l,m} G_{lm} v_l w̄_m`.
pub fn inner(gram: &CMatrix, v: &[Complex64], w: &[Complex64]) -> Complex64 {
    let n = v.len();
    let mut acc = c(0.0, 0.0);
    for l in 0..n {
        for m in 0..n {
            acc += gram[(l, m)] * v[l] * w[m].conj();
        }
    }
    acc
}

pub fn norm_sq(gram: &CMatrix, v: &[Complex64]) -> f64 {
    inner(gram, v, v).re
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

pub fn complex_gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Haar-ish random unitary from the QR factorisation of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix the phase ambiguity so the distribution does not favour the identity
    let mut out = q.clone();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

/// Random hermitian positive definite matrix with eigenvalues in `[lo, hi]`.
pub fn random_hermitian_pd<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> CMatrix {
    let u = random_unitary(n, rng);
    let d = CMatrix::from_diagonal(&CVector::from_fn(n, |_, _| c(rng.random_range(lo..=hi), 0.0)));
    let m = &u * d * u.adjoint();
    hermitian_part(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalizing_transform_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian_pd(3, 0.5, 3.0, &mut rng);
        let a = normalizing_transform(&h).unwrap();
        let id = pull_metric(&h, &a);
        assert!((id - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn generalized_eigenvalues_of_scaled_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian_pd(2, 0.5, 3.0, &mut rng);
        let ev = generalized_eigenvalues(&h, &(&h * c(2.5, 0.0))).unwrap();
        for e in ev {
            assert!((e - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(4, &mut rng);
        assert!((u.adjoint() * &u - CMatrix::identity(4, 4)).norm() < 1e-12);
    }
}
