//! Moments of the uniform probability measure on the unit sphere of ℂⁿ and the
//! identities expressing Ricci and scalar curvature as sphere averages.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::curvature::{ricci_and_scalar, CurvatureTensor};
use crate::error::{Error, Result};
use crate::linalg::{self, c};
use crate::report::{Relation, VerificationReport, Witness};

/// Unitary-frame checks reject grams further than this from the identity.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Exact-mode identities pass at this absolute defect.
pub const EXACT_TOLERANCE: f64 = 1e-10;

/// Monte Carlo checks pass within this many standard errors.
pub const MC_SIGMAS: f64 = 4.0;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `⨍_{S^{2n−1}} v^α v̄^β dσ` for multi-indices of total degree
/// `|α| + |β| ∈ {2, 4}`. Equals `δ_{αβ} (n−1)! α! / (n−1+|α|)!`.
pub fn sphere_moment(n: usize, alpha: &[u8], beta: &[u8]) -> Result<f64> {
    if n == 0 || alpha.len() != n || beta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: alpha.len().min(beta.len()),
        });
    }
    let da: usize = alpha.iter().map(|&x| x as usize).sum();
    let db: usize = beta.iter().map(|&x| x as usize).sum();
    let total = da + db;
    if total != 2 && total != 4 {
        return Err(Error::UnsupportedDegree(total));
    }
    if alpha != beta {
        return Ok(0.0);
    }
    let afact: f64 = alpha.iter().map(|&x| factorial(x as usize)).product();
    Ok(factorial(n - 1) * afact / factorial(n - 1 + da))
}

/// Moment of `|v_j|²|v_k|²`.
pub fn fourth_moment(n: usize, j: usize, k: usize) -> Result<f64> {
    let mut a = vec![0u8; n];
    a[j] += 1;
    a[k] += 1;
    sphere_moment(n, &a, &a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereMomentTable {
    pub n: usize,
    pub second: f64,
    pub fourth_diagonal: f64,
    pub fourth_off_diagonal: f64,
}

impl SphereMomentTable {
    pub fn new(n: usize) -> Result<Self> {
        let mut e = vec![0u8; n];
        e[0] = 1;
        let second = sphere_moment(n, &e, &e)?;
        let fourth_diagonal = fourth_moment(n, 0, 0)?;
        let fourth_off_diagonal = if n > 1 { fourth_moment(n, 0, 1)? } else { 0.0 };
        Ok(Self {
            n,
            second,
            fourth_diagonal,
            fourth_off_diagonal,
        })
    }
}

/// A uniformly distributed point on the unit sphere of ℂⁿ.
pub fn sample_sphere<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v = linalg::complex_gaussian_vector(n, rng);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Mean and standard error of a Monte Carlo average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Averages `f` over `samples` uniform sphere points, split across `workers`
/// threads. Worker `w` draws from ChaCha stream `w` of `seed`, so the result is
/// fixed by `(samples, seed, workers)`.
pub fn monte_carlo<F>(n: usize, samples: usize, seed: u64, workers: usize, f: F) -> McEstimate
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    let workers = workers.clamp(1, samples.max(1));
    let chunk = samples / workers;
    let extra = samples % workers;
    let partials: Vec<(f64, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                let count = chunk + usize::from(w < extra);
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(w as u64);
                    let (mut s, mut s2) = (0.0, 0.0);
                    for _ in 0..count {
                        let x = f(&sample_sphere(n, &mut rng));
                        s += x;
                        s2 += x * x;
                    }
                    (s, s2)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let (s, s2) = partials.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let mean = s / m;
    let var = ((s2 / m - mean * mean) * m / (m - 1.0).max(1.0)).max(0.0);
    McEstimate {
        mean,
        std_error: (var / m).sqrt(),
        samples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AverageMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64, workers: usize },
}

fn require_unitary(t: &CurvatureTensor) -> Result<()> {
    let d = t.unitarity_defect();
    if d > UNITARY_TOLERANCE {
        Err(Error::NonUnitaryFrame(d))
    } else {
        Ok(())
    }
}

fn unit(n: usize, i: usize) -> Vec<u8> {
    let mut e = vec![0u8; n];
    e[i] = 1;
    e
}

fn mc_report(
    claim: &str,
    est: McEstimate,
    rhs: f64,
    seed: u64,
    witness_point: &[Complex64],
) -> VerificationReport {
    let tol = MC_SIGMAS * est.std_error;
    VerificationReport::compare(
        claim,
        Relation::Eq,
        est.mean,
        rhs,
        tol,
        Witness::new(format!("monte carlo, {} samples", est.samples))
            .with_seed(seed)
            .with_point(witness_point),
    )
    .with_detail("std_error", est.std_error)
    .with_detail("samples", est.samples as f64)
}

/// `⨍ HBC(v, w) dσ(w) = ρ(v, v̄) / (n ‖v‖²)` at a point where the frame is unitary.
pub fn average_hbc_identity(t: &CurvatureTensor, v: &[Complex64], mode: AverageMode) -> Result<VerificationReport> {
    require_unitary(t)?;
    let n = t.n();
    let nv = t.norm_sq(v);
    if nv <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let ricci = ricci_and_scalar(t)?.ricci;
    let mut rho_vv = c(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            rho_vv += ricci[(j, k)] * v[j] * v[k].conj();
        }
    }
    let rhs = rho_vv.re / (n as f64 * nv);
    match mode {
        AverageMode::Exact => {
            let mut lhs = c(0.0, 0.0);
            for l in 0..n {
                for m in 0..n {
                    let mom = sphere_moment(n, &unit(n, l), &unit(n, m))?;
                    if mom == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        for k in 0..n {
                            lhs += t.lowered(j, k, l, m) * v[j] * v[k].conj() * mom;
                        }
                    }
                }
            }
            let lhs = lhs.re / nv;
            Ok(VerificationReport::compare(
                "averages.hbc-ricci",
                Relation::Eq,
                lhs,
                rhs,
                EXACT_TOLERANCE,
                Witness::new("exact monomial moments").with_point(v),
            ))
        }
        AverageMode::MonteCarlo { samples, seed, workers } => {
            let est = monte_carlo(n, samples, seed, workers, |w| {
                t.theta(v, v, w, w).re / (nv * t.norm_sq(w))
            });
            Ok(mc_report("averages.hbc-ricci", est, rhs, seed, v))
        }
    }
}

/// `⨍ HSC(v) dσ(v) = (4π / (n(n+1))) scal` at a point where the frame is unitary.
pub fn average_hsc_identity(t: &CurvatureTensor, mode: AverageMode) -> Result<VerificationReport> {
    require_unitary(t)?;
    let n = t.n();
    let scal = ricci_and_scalar(t)?.scalar;
    let rhs = 4.0 * PI / (n as f64 * (n as f64 + 1.0)) * scal;
    match mode {
        AverageMode::Exact => {
            let mut lhs = c(0.0, 0.0);
            let mut alpha = vec![0u8; n];
            let mut beta = vec![0u8; n];
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        for m in 0..n {
                            alpha.iter_mut().for_each(|x| *x = 0);
                            beta.iter_mut().for_each(|x| *x = 0);
                            alpha[j] += 1;
                            alpha[l] += 1;
                            beta[k] += 1;
                            beta[m] += 1;
                            let mom = sphere_moment(n, &alpha, &beta)?;
                            if mom != 0.0 {
                                lhs += t.lowered(j, k, l, m) * mom;
                            }
                        }
                    }
                }
            }
            Ok(VerificationReport::compare(
                "averages.hsc-scalar",
                Relation::Eq,
                lhs.re,
                rhs,
                EXACT_TOLERANCE,
                Witness::new("exact monomial moments"),
            )
            .with_detail("imag_residue", lhs.im.abs()))
        }
        AverageMode::MonteCarlo { samples, seed, workers } => {
            let est = monte_carlo(n, samples, seed, workers, |v| t.theta(v, v, v, v).re / t.norm_sq(v).powi(2));
            Ok(mc_report("averages.hsc-scalar", est, rhs, seed, &[]))
        }
    }
}
