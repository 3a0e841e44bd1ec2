//! Royden's polarization lemma: an upper bound `K` on the holomorphic
//! sectional curvature of a bi-hermitian form controls sums of bisectional
//! terms over an orthogonal frame.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{perturbed_space_form, CurvatureTensor};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::report::{Relation, Status, VerificationReport, Witness};
use crate::sphere::sample_sphere;

/// Frames are limited to this many vectors (4^8 polarization terms).
pub const MAX_FRAME: usize = 8;

/// Orthogonality tolerance for frame vectors.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// Bounds and the polarization identity are checked at this relative tolerance.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// A form `Θ(ξ, η, ζ, τ) = Σ R_{jk̄lm̄} ξ_j η̄_k ζ_l τ̄_m` with the symmetries of
/// a Kähler curvature tensor, together with the inner product used for norms.
#[derive(Debug, Clone)]
pub struct BiHermitianForm {
    tensor: CurvatureTensor,
}

impl BiHermitianForm {
    pub fn new(tensor: CurvatureTensor) -> Self {
        Self { tensor }
    }

    pub fn n(&self) -> usize {
        self.tensor.n()
    }

    pub fn gram(&self) -> &CMatrix {
        self.tensor.gram()
    }

    pub fn tensor(&self) -> &CurvatureTensor {
        &self.tensor
    }

    pub fn theta(&self, a: &[Complex64], b: &[Complex64], x: &[Complex64], y: &[Complex64]) -> Complex64 {
        self.tensor.theta(a, b, x, y)
    }

    pub fn norm_sq(&self, v: &[Complex64]) -> f64 {
        self.tensor.norm_sq(v)
    }
}

/// Mutually orthogonal, nonzero vectors (not necessarily unit length).
#[derive(Debug, Clone)]
pub struct FrameSpec {
    vectors: Vec<Vec<Complex64>>,
}

impl FrameSpec {
    pub fn new(vectors: Vec<Vec<Complex64>>, gram: &CMatrix) -> Result<Self> {
        let n = gram.nrows();
        if vectors.is_empty() || vectors.len() > n.min(MAX_FRAME) {
            return Err(Error::InvalidInput(format!(
                "frame size {} outside 1..={}",
                vectors.len(),
                n.min(MAX_FRAME)
            )));
        }
        let mut worst = 0.0f64;
        for (a, va) in vectors.iter().enumerate() {
            if va.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: va.len(),
                });
            }
            if linalg::norm_sq(gram, va) <= 0.0 {
                return Err(Error::ZeroVector);
            }
            for vb in vectors.iter().skip(a + 1) {
                worst = worst.max(linalg::inner(gram, va, vb).norm());
            }
        }
        if worst > ORTHOGONALITY_TOLERANCE {
            return Err(Error::NonOrthogonalFrame(worst));
        }
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Multiplies each vector by the matching scalar.
    pub fn rescaled(&self, factors: &[Complex64], gram: &CMatrix) -> Result<Self> {
        let vectors = self
            .vectors
            .iter()
            .zip(factors)
            .map(|(v, f)| v.iter().map(|x| x * f).collect())
            .collect();
        Self::new(vectors, gram)
    }
}

/// `ν` random vectors made orthogonal for `gram`, each scaled by a random
/// complex factor with modulus in `[0.3, 3]`.
pub fn random_frame<R: Rng + ?Sized>(gram: &CMatrix, nu: usize, rng: &mut R) -> Result<FrameSpec> {
    let n = gram.nrows();
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(nu);
    while vectors.len() < nu {
        let mut v = linalg::complex_gaussian_vector(n, rng);
        // two passes of Gram–Schmidt for stability
        for _ in 0..2 {
            for u in &vectors {
                let coef = linalg::inner(gram, &v, u) / linalg::norm_sq(gram, u);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= coef * y;
                }
            }
        }
        let norm = linalg::norm_sq(gram, &v).sqrt();
        if norm < 1e-8 {
            continue;
        }
        let modulus = rng.random_range(0.3..=3.0);
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        let f = Complex64::from_polar(modulus / norm, phase);
        vectors.push(v.into_iter().map(|x| x * f).collect());
    }
    FrameSpec::new(vectors, gram)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationSums {
    /// `(1/4^ν) Σ_{ε ∈ ℤ₄^ν} Θ(ξ_ε, ξ_ε, ξ_ε, ξ_ε)` with `ξ_ε = Σ ε_α ξ_α`.
    pub full: f64,
    /// `Σ_α Θ(ξ_α,ξ_α,ξ_α,ξ_α) + Σ_{α≠γ} [Θ(ξ_α,ξ_α,ξ_γ,ξ_γ) + Θ(ξ_α,ξ_γ,ξ_γ,ξ_α)]`.
    pub reduced: f64,
}

impl PolarizationSums {
    pub fn defect(&self) -> f64 {
        (self.full - self.reduced).abs()
    }
}

pub fn polarization_sum(form: &BiHermitianForm, frame: &FrameSpec) -> PolarizationSums {
    let n = form.n();
    let xi = frame.vectors();
    let nu = xi.len();
    let roots = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
    let terms = 4usize.pow(nu as u32);
    let mut full = c(0.0, 0.0);
    let mut v = vec![c(0.0, 0.0); n];
    for code in 0..terms {
        v.iter_mut().for_each(|x| *x = c(0.0, 0.0));
        let mut rest = code;
        for x in xi {
            let eps = roots[rest % 4];
            rest /= 4;
            for (vi, xi_) in v.iter_mut().zip(x) {
                *vi += eps * xi_;
            }
        }
        full += form.theta(&v, &v, &v, &v);
    }
    let full = full.re / terms as f64;
    let mut reduced = c(0.0, 0.0);
    for a in 0..nu {
        reduced += form.theta(&xi[a], &xi[a], &xi[a], &xi[a]);
        for g in 0..nu {
            if g != a {
                reduced += form.theta(&xi[a], &xi[a], &xi[g], &xi[g]);
                reduced += form.theta(&xi[a], &xi[g], &xi[g], &xi[a]);
            }
        }
    }
    PolarizationSums {
        full,
        reduced: reduced.re,
    }
}

/// Gradient-type quantity `∂f/∂x̄` of `f(x) = Θ(x,x,x,x)` in a unitary frame.
fn wirtinger_gradient(t: &CurvatureTensor, x: &[Complex64]) -> Vec<Complex64> {
    let n = t.n();
    let mut g = vec![c(0.0, 0.0); n];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                for m in 0..n {
                    let r = t.lowered(j, k, l, m);
                    g[k] += r * x[j] * x[l] * x[m].conj();
                    g[m] += r * x[j] * x[k].conj() * x[l];
                }
            }
        }
    }
    g
}

fn ascend(t: &CurvatureTensor, mut x: Vec<Complex64>, steps: usize) -> f64 {
    let f = |x: &[Complex64]| t.theta(x, x, x, x).re;
    let mut fx = f(&x);
    let mut eta = 0.1;
    for _ in 0..steps {
        let g = wirtinger_gradient(t, &x);
        let radial: Complex64 = g.iter().zip(&x).map(|(a, b)| a * b.conj()).sum();
        let d: Vec<Complex64> = g.iter().zip(&x).map(|(a, b)| a - b * radial.re).collect();
        if d.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-30 {
            break;
        }
        loop {
            let mut y: Vec<Complex64> = x.iter().zip(&d).map(|(a, b)| a + b * eta).collect();
            let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            y.iter_mut().for_each(|z| *z /= norm);
            let fy = f(&y);
            if fy > fx {
                x = y;
                fx = fy;
                eta *= 1.5;
                break;
            }
            eta *= 0.5;
            if eta < 1e-12 {
                return fx;
            }
        }
    }
    fx
}

/// Empirical `K ≈ sup Θ(ξ,ξ,ξ,ξ)/‖ξ‖⁴`: best of `samples` uniform sphere points,
/// then projected gradient ascent from the best few. A lower estimate of the
/// true supremum.
pub fn hsc_upper_bound(form: &BiHermitianForm, samples: usize, steps: usize, seed: u64) -> Result<f64> {
    hsc_upper_bound_tensor(form.tensor(), samples, steps, seed)
}

pub fn hsc_upper_bound_tensor(t: &CurvatureTensor, samples: usize, steps: usize, seed: u64) -> Result<f64> {
    let t = if t.unitarity_defect() > 1e-12 {
        t.to_unitary_frame()?
    } else {
        t.clone()
    };
    let n = t.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scored: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(samples.max(1) + n);
    // coordinate axes are cheap, natural candidates
    for i in 0..n {
        let mut e = vec![c(0.0, 0.0); n];
        e[i] = c(1.0, 0.0);
        scored.push((t.theta(&e, &e, &e, &e).re, e));
    }
    for _ in 0..samples.max(1) {
        let v = sample_sphere(n, &mut rng);
        scored.push((t.theta(&v, &v, &v, &v).re, v));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].0;
    for (_, start) in scored.into_iter().take(4) {
        best = best.max(ascend(&t, start, steps));
    }
    Ok(best)
}

fn span_hypothesis_violation(form: &BiHermitianForm, frame: &FrameSpec, k: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
    let n = form.n();
    let nu = frame.len();
    let mut worst: Option<f64> = None;
    for _ in 0..200 {
        let coefs = linalg::complex_gaussian_vector(nu, rng);
        let mut v = vec![c(0.0, 0.0); n];
        for (cf, x) in coefs.iter().zip(frame.vectors()) {
            for (vi, xi) in v.iter_mut().zip(x) {
                *vi += cf * xi;
            }
        }
        let nv = form.norm_sq(&v);
        let ratio = form.theta(&v, &v, &v, &v).re / (nv * nv);
        if ratio > k + BOUND_TOLERANCE * k.abs().max(1.0) {
            worst = Some(worst.map_or(ratio, |w: f64| w.max(ratio)));
        }
    }
    worst
}

/// Checks both conclusions of the lemma for one frame. The hypothesis
/// `Θ(ξ,ξ,ξ,ξ) ≤ K‖ξ‖⁴` is re-tested on random vectors of the frame's span; if
/// it fails there the report is `SkippedHypothesis`.
pub fn royden_inequality_check(form: &BiHermitianForm, frame: &FrameSpec, k: f64) -> Result<VerificationReport> {
    let xi = frame.vectors();
    let nu = frame.len();
    let norms: Vec<f64> = xi.iter().map(|x| form.norm_sq(x)).collect();
    let s2: f64 = norms.iter().sum();
    let s4: f64 = norms.iter().map(|x| x * x).sum();
    let witness = Witness::new(format!("frame of {nu} vectors, K = {k:.6e}"))
        .with_point(&xi.iter().flatten().copied().collect::<Vec<_>>());

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ nu as u64);
    if let Some(found) = span_hypothesis_violation(form, frame, k, &mut rng) {
        return Ok(VerificationReport::skipped(
            "royden.inequality",
            Relation::Le,
            format!("HSC bound fails on the frame span: found {found:.6e} > K = {k:.6e}"),
            witness,
        ));
    }

    let mut lhs = c(0.0, 0.0);
    for a in xi {
        for b in xi {
            lhs += form.theta(a, a, b, b);
        }
    }
    let lhs = lhs.re;
    let scale = lhs.abs().max(k.abs() * s2 * s2).max(1.0);
    let tol = BOUND_TOLERANCE * scale;

    let sums = polarization_sum(form, frame);
    let mut children = vec![VerificationReport::compare(
        "royden.polarization",
        Relation::Eq,
        sums.full,
        sums.reduced,
        tol,
        witness.clone(),
    )];
    let general = 0.5 * k * (s2 * s2 + s4);
    children.push(VerificationReport::compare(
        "royden.general-bound",
        Relation::Le,
        lhs,
        general,
        tol,
        witness.clone(),
    ));
    if k <= 0.0 {
        let sharp = (nu as f64 + 1.0) / (2.0 * nu as f64) * k * s2 * s2;
        children.push(VerificationReport::compare(
            "royden.nonpositive-bound",
            Relation::Le,
            lhs,
            sharp,
            tol,
            witness.clone(),
        ));
    }
    Ok(VerificationReport::aggregate("royden.inequality", children, witness)
        .with_detail("lhs", lhs)
        .with_detail("k", k)
        .with_detail("sum_norm_sq", s2)
        .with_detail("sum_norm_fourth", s4))
}

/// Outcome of a randomized sweep of the lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct RoydenSweep {
    pub trials: usize,
    pub violations: usize,
    pub skipped: usize,
    pub tightened: usize,
    pub max_polarization_defect: f64,
    pub min_slack: f64,
    /// Index of the first violating trial, for reproduction.
    pub first_violation: Option<usize>,
}

#[derive(Debug, Clone)]
struct TrialOutcome {
    violated: bool,
    skipped: bool,
    tightened: bool,
    polarization_defect: f64,
    slack: f64,
}

/// Random form with empirically negative `K` in random (non-unitary)
/// coordinates, plus its estimate of `K`.
pub fn random_negative_form(n: usize, rng: &mut ChaCha8Rng) -> Result<(BiHermitianForm, f64)> {
    loop {
        let spread = rng.random_range(0.05..0.45);
        let t = perturbed_space_form(n, -1.0, spread, rng);
        let p = CMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            d + linalg::complex_gaussian(rng) * 0.4
        });
        if p.determinant().norm() < 1e-3 {
            continue;
        }
        let form = BiHermitianForm::new(t.transformed(&p)?);
        let k = hsc_upper_bound(&form, 400, 40, rng.random())?;
        if k < 0.0 {
            return Ok((form, k));
        }
    }
}

fn run_trial(seed: u64, index: usize, max_n: usize, max_nu: usize) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let n = rng.random_range(1..=max_n);
    let nu = rng.random_range(1..=n.min(max_nu));
    let (form, mut k) = random_negative_form(n, &mut rng)?;
    let frame = random_frame(form.gram(), nu, &mut rng)?;
    let mut report = royden_inequality_check(&form, &frame, k)?;
    let mut tightened = false;
    if report.status != Status::Pass {
        let tighter = hsc_upper_bound(&form, 8000, 300, rng.random())?;
        k = k.max(tighter);
        tightened = true;
        report = royden_inequality_check(&form, &frame, k)?;
    }
    let polarization_defect = report
        .children
        .iter()
        .find(|c| c.claim_id == "royden.polarization")
        .map_or(0.0, |c| (c.lhs - c.rhs).abs() / c.tolerance.max(1e-300) * BOUND_TOLERANCE);
    Ok(TrialOutcome {
        violated: report.status == Status::Fail,
        skipped: report.status == Status::SkippedHypothesis,
        tightened,
        polarization_defect,
        slack: if report.slack.is_nan() { f64::INFINITY } else { report.slack },
    })
}

/// Runs `trials` independent random (form, frame) checks with `n ≤ max_n` and
/// `ν ≤ max_nu`. Trial `i` draws from ChaCha stream `i` of `seed`, so the
/// result does not depend on `workers`.
pub fn royden_sweep(trials: usize, seed: u64, max_n: usize, max_nu: usize, workers: usize) -> Result<RoydenSweep> {
    let workers = workers.clamp(1, trials.max(1));
    let results: Vec<Result<TrialOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..trials)
                        .step_by(workers)
                        .map(|i| (i, run_trial(seed, i, max_n, max_nu)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let mut all: Vec<(usize, Result<TrialOutcome>)> = handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect();
        all.sort_by_key(|(i, _)| *i);
        all.into_iter().map(|(_, r)| r).collect()
    });
    let mut sweep = RoydenSweep {
        trials,
        violations: 0,
        skipped: 0,
        tightened: 0,
        max_polarization_defect: 0.0,
        min_slack: f64::INFINITY,
        first_violation: None,
    };
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        if r.violated {
            sweep.violations += 1;
            sweep.first_violation.get_or_insert(i);
        }
        sweep.skipped += usize::from(r.skipped);
        sweep.tightened += usize::from(r.tightened);
        sweep.max_polarization_defect = sweep.max_polarization_defect.max(r.polarization_defect);
        sweep.min_slack = sweep.min_slack.min(r.slack);
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{random_kahler_tensor, space_form_tensor};

    #[test]
    fn single_vector_sums_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let form = BiHermitianForm::new(random_kahler_tensor(3, &mut rng));
        let frame = random_frame(form.gram(), 1, &mut rng).unwrap();
        let s = polarization_sum(&form, &frame);
        let x = &frame.vectors()[0];
        let direct = form.theta(x, x, x, x).re;
        assert!((s.full - direct).abs() < 1e-12 * direct.abs().max(1.0));
        assert!((s.reduced - direct).abs() < 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn non_orthogonal_frame_is_rejected() {
        let g = CMatrix::identity(2, 2);
        let r = FrameSpec::new(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]], &g);
        assert!(matches!(r, Err(Error::NonOrthogonalFrame(_))));
    }

    #[test]
    fn space_form_bound_is_minus_one() {
        let form = BiHermitianForm::new(space_form_tensor(3, -1.0));
        let k = hsc_upper_bound(&form, 200, 20, 3).unwrap();
        assert!((k + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ascent_finds_the_maximum_of_a_diagonal_form() {
        // Θ(x) = Σ_j d_j |x_j|^4 with d < 0 peaks at −1/Σ(1/|d_j|) on the sphere
        let n: usize = 3;
        let d = [-3.0, -0.5, -2.0];
        let mut lowered = vec![c(0.0, 0.0); n.pow(4)];
        for j in 0..n {
            lowered[((j * n + j) * n + j) * n + j] = c(d[j], 0.0);
        }
        let t = CurvatureTensor::from_lowered(n, lowered, CMatrix::identity(n, n)).unwrap();
        let k = hsc_upper_bound(&BiHermitianForm::new(t), 50, 100, 9).unwrap();
        let expected = -1.0 / d.iter().map(|x: &f64| 1.0 / x.abs()).sum::<f64>();
        assert!((k - expected).abs() < 1e-9, "k = {k}");
    }
}
