//! Periodic solver for the approximate Kähler–Einstein family
//!
//! ```text
//! ω_ε = εω − Ric(ω) + (i/2π)∂∂̄u,    ω_εⁿ = e^u ωⁿ
//! ```
//!
//! on flat-torus charts (unit cell, `n ∈ {1, 2}`), plus the checks built on
//! its solutions. In coefficient form `H_ε = εH − ρ/2π + ∂∂̄u/2π` and the
//! equation is `F(u) = log det H_ε − u − log det H = 0`.
//!
//! Newton steps solve `Σ (H_ε⁻¹)_{kj} ∂_j∂̄_k δ/2π − δ = −F` by GMRES,
//! preconditioned with the constant-coefficient operator built from the grid
//! mean of `H_ε⁻¹`. Steps are damped by an Armijo search that rejects any
//! iterate on which `H_ε` stops being positive definite.

pub mod gmres;
pub mod spectral;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::curvature::{chern_curvature, ricci_and_scalar};
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, ModelKind, ModelMetric};
use crate::linalg::c;
use crate::report::{Relation, VerificationReport, Witness};
use gmres::gmres;
use spectral::SpectralGrid;

pub const MIN_GRID: usize = 8;
pub const KE_TOLERANCE: f64 = 1e-6;
pub const ELEMENTARY_TOLERANCE: f64 = 1e-8;
pub const SLOPE_TOLERANCE: f64 = 0.02;
pub const DEFAULT_EPS0: f64 = 1.0;
const GMRES_RESTART: usize = 40;
const GMRES_MAX_ITER: usize = 400;
const STEP_FLOOR: f64 = 1e-8;
const ARMIJO: f64 = 1e-4;

/// A hermitian `n × n` matrix with `n ≤ 2`, row-major.
#[derive(Debug, Clone, Copy)]
struct Small {
    n: usize,
    m: [Complex64; 4],
}

impl Small {
    fn at(field: &[Complex64], n: usize, len: usize, p: usize) -> Self {
        let mut m = [c(0.0, 0.0); 4];
        for j in 0..n {
            for k in 0..n {
                m[j * n + k] = field[(j * n + k) * len + p];
            }
        }
        Self { n, m }
    }

    fn det(&self) -> f64 {
        match self.n {
            1 => self.m[0].re,
            _ => self.m[0].re * self.m[3].re - self.m[1].norm_sqr(),
        }
    }

    fn min_eigenvalue(&self) -> f64 {
        match self.n {
            1 => self.m[0].re,
            _ => {
                let (a, d) = (self.m[0].re, self.m[3].re);
                0.5 * (a + d) - (0.25 * (a - d) * (a - d) + self.m[1].norm_sqr()).sqrt()
            }
        }
    }

    fn inverse(&self) -> Self {
        let det = self.det();
        let m = match self.n {
            1 => [c(1.0 / self.m[0].re, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            _ => [self.m[3] / det, -self.m[1] / det, -self.m[2] / det, self.m[0] / det],
        };
        Self { n: self.n, m }
    }

    /// `Re tr(A B)`.
    fn trace_product(&self, other: &Self) -> f64 {
        let n = self.n;
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += self.m[j * n + k] * other.m[k * n + j];
            }
        }
        acc.re
    }
}

#[derive(Debug, Clone)]
pub struct TorusMAProblem {
    pub n: usize,
    pub grid: usize,
    pub eps: f64,
    pub background: ModelMetric,
    spectral: Arc<SpectralGrid>,
    h: Vec<Complex64>,
    ric: Vec<Complex64>,
    log_det_h: Vec<f64>,
}

impl TorusMAProblem {
    pub fn len(&self) -> usize {
        self.spectral.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spectral(&self) -> &SpectralGrid {
        &self.spectral
    }

    /// Background metric coefficients `H_{jk}` at grid point `p`.
    pub fn metric(&self, p: usize, j: usize, k: usize) -> Complex64 {
        self.h[(j * self.n + k) * self.len() + p]
    }

    /// `ρ_{jk}/2π` of the background at grid point `p`.
    pub fn ricci_form(&self, p: usize, j: usize, k: usize) -> Complex64 {
        self.ric[(j * self.n + k) * self.len() + p]
    }

    pub fn log_det_metric(&self) -> &[f64] {
        &self.log_det_h
    }

    /// Same background and grid with a different `ε`.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let mut out = self.clone();
        out.eps = eps;
        Ok(out)
    }

    /// `∫ ωⁿ` over the unit cell.
    pub fn volume(&self) -> f64 {
        self.log_det_h.iter().map(|l| l.exp()).sum::<f64>() / self.len() as f64
    }

    /// `u⁰ = n log ε − log det H`, which makes `ω_ε = εω` exactly.
    pub fn initial_guess(&self) -> Vec<f64> {
        let base = self.n as f64 * self.eps.ln();
        self.log_det_h.iter().map(|l| base - l).collect()
    }

    /// The initial guess plus a trigonometric bump of size `amplitude·ε`,
    /// small enough to keep `ω_ε` positive.
    pub fn perturbed_guess(&self, amplitude: f64) -> Vec<f64> {
        let g = &self.spectral;
        self.initial_guess()
            .iter()
            .enumerate()
            .map(|(p, u)| {
                let x = g.point(p);
                u + amplitude * self.eps * ((2.0 * PI * x[0]).cos() + (2.0 * PI * x[1]).sin())
            })
            .collect()
    }

    /// `H_ε` for the given `u`, in the field layout.
    pub fn omega_eps(&self, u: &[f64]) -> Vec<Complex64> {
        let d = self.spectral.ddbar(u);
        let two_pi = 2.0 * PI;
        (0..self.h.len())
            .map(|i| self.h[i] * self.eps - self.ric[i] + d[i] / two_pi)
            .collect()
    }

    fn point_matrix(&self, field: &[Complex64], p: usize) -> Small {
        Small::at(field, self.n, self.len(), p)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Samples the background and its Ricci form on the grid.
pub fn assemble_problem(background: &ModelMetric, eps: f64, grid: usize) -> Result<TorusMAProblem> {
    background.validate()?;
    check_eps(eps)?;
    if !background.is_periodic() {
        return Err(Error::InvalidInput(format!("background {} is not periodic", background.name())));
    }
    let n = background.dim;
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidInput(format!("torus solver supports n = 1 or 2, got {n}")));
    }
    if grid < MIN_GRID || !grid.is_power_of_two() {
        return Err(Error::InvalidInput(format!("grid must be a power of two >= {MIN_GRID}, got {grid}")));
    }
    let spectral = Arc::new(SpectralGrid::new(n, grid));
    let len = spectral.len();
    let field = background.field();
    let mut h = vec![c(0.0, 0.0); n * n * len];
    let mut ric = vec![c(0.0, 0.0); n * n * len];
    let mut log_det_h = vec![0.0; len];
    for p in 0..len {
        let x = spectral.point(p);
        let coords = (0..n).map(|j| c(x[2 * j], x[2 * j + 1])).collect();
        let jet = field.evaluate_jet(&ChartPoint::new(coords)?, 2)?;
        let rho = ricci_and_scalar(&chern_curvature(&jet)?)?.ricci;
        for j in 0..n {
            for k in 0..n {
                h[(j * n + k) * len + p] = jet.value[(j, k)];
                ric[(j * n + k) * len + p] = rho[(j, k)] / (2.0 * PI);
            }
        }
        let det = Small::at(&h, n, len, p).det();
        if det <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                point: format!("{x:?}"),
                min_eigenvalue: det,
            });
        }
        log_det_h[p] = det.ln();
    }
    Ok(TorusMAProblem {
        n,
        grid,
        eps,
        background: background.clone(),
        spectral,
        h,
        ric,
        log_det_h,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Max-norm of `log det H_ε − u − log det H`.
    pub residual: f64,
    pub positivity_margin: f64,
    pub step: f64,
    pub gmres_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct MASolveState {
    pub u: Vec<f64>,
    /// Max-norm of the density defect `det H_ε − e^u det H`.
    pub residual_norm: f64,
    /// Max-norm of the logarithmic residual `F(u)`.
    pub log_residual_norm: f64,
    pub positivity_margin: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterationRecord>,
}

impl MASolveState {
    pub fn sup_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

struct Evaluation {
    heps: Vec<Complex64>,
    f: Vec<f64>,
    log_norm: f64,
    density_norm: f64,
    margin: f64,
}

fn evaluate(problem: &TorusMAProblem, u: &[f64]) -> Evaluation {
    let heps = problem.omega_eps(u);
    let len = problem.len();
    let mut f = vec![0.0; len];
    let mut margin = f64::INFINITY;
    let mut log_norm = 0.0f64;
    let mut density_norm = 0.0f64;
    for p in 0..len {
        let m = problem.point_matrix(&heps, p);
        margin = margin.min(m.min_eigenvalue());
        let det = m.det();
        let target = (u[p] + problem.log_det_h[p]).exp();
        density_norm = density_norm.max((det - target).abs());
        f[p] = if det > 0.0 { det.ln() - u[p] - problem.log_det_h[p] } else { f64::INFINITY };
        log_norm = log_norm.max(f[p].abs());
    }
    Evaluation {
        heps,
        f,
        log_norm,
        density_norm,
        margin,
    }
}

/// Solves from the standard initial guess.
pub fn solve(problem: &TorusMAProblem, tol: f64, max_iter: usize) -> Result<MASolveState> {
    solve_from(problem, problem.initial_guess(), tol, max_iter)
}

/// Damped Newton from `u0`. Converged when both the logarithmic and the
/// density residual are at most `tol`.
pub fn solve_from(problem: &TorusMAProblem, u0: Vec<f64>, tol: f64, max_iter: usize) -> Result<MASolveState> {
    if u0.len() != problem.len() {
        return Err(Error::DimensionMismatch {
            expected: problem.len(),
            got: u0.len(),
        });
    }
    let len = problem.len();
    let n = problem.n;
    let mut u = u0;
    let mut ev = evaluate(problem, &u);
    if ev.margin <= 0.0 {
        return Err(Error::PositivityLost(format!("initial guess: margin {:.3e}", ev.margin)));
    }
    let mut history = Vec::new();
    let mut step = 0.0;
    let mut inner = 0;
    for iteration in 0..=max_iter {
        history.push(IterationRecord {
            iteration,
            residual: ev.log_norm,
            positivity_margin: ev.margin,
            step,
            gmres_iterations: inner,
        });
        if ev.log_norm.max(ev.density_norm) <= tol {
            return Ok(MASolveState {
                u,
                residual_norm: ev.density_norm,
                log_residual_norm: ev.log_norm,
                positivity_margin: ev.margin,
                iterations: iteration,
                converged: true,
                history,
            });
        }
        if iteration == max_iter {
            break;
        }

        let inv: Vec<Small> = (0..len).map(|p| problem.point_matrix(&ev.heps, p).inverse()).collect();
        let mut mean = [c(0.0, 0.0); 4];
        for m in &inv {
            for (a, b) in mean.iter_mut().zip(&m.m) {
                *a += b / len as f64;
            }
        }
        let spectral = &problem.spectral;
        let apply = |d: &[f64]| -> Vec<f64> {
            let dd = spectral.ddbar(d);
            (0..len)
                .map(|p| inv[p].trace_product(&Small::at(&dd, n, len, p)) / (2.0 * PI) - d[p])
                .collect()
        };
        let precond = |v: &[f64]| -> Vec<f64> {
            spectral.multiplier(v, |xi| 1.0 / (spectral.constant_coefficient_symbol(&mean[..n * n], xi) / (2.0 * PI) - 1.0))
        };
        let rhs: Vec<f64> = ev.f.iter().map(|x| -x).collect();
        let mut delta = vec![0.0; len];
        let rtol = (0.1 * ev.log_norm).clamp(1e-14, 1e-3);
        let out = gmres(apply, precond, &rhs, &mut delta, rtol, GMRES_RESTART, GMRES_MAX_ITER);
        inner = out.iterations;

        let mut t = 1.0;
        let mut last_positive;
        loop {
            let cand: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a + t * b).collect();
            let ev2 = evaluate(problem, &cand);
            last_positive = ev2.margin > 0.0;
            if last_positive && (ev2.log_norm <= (1.0 - ARMIJO * t) * ev.log_norm || ev2.log_norm <= tol) {
                u = cand;
                ev = ev2;
                step = t;
                break;
            }
            t *= 0.5;
            if t < STEP_FLOOR {
                break;
            }
        }
        if t < STEP_FLOOR {
            return Err(if last_positive {
                Error::NotConverged {
                    iterations: iteration + 1,
                    residual: ev.log_norm,
                }
            } else {
                Error::PositivityLost(format!("step-halving floor reached at iteration {}", iteration + 1))
            });
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: ev.log_norm,
    })
}

fn problem_witness(problem: &TorusMAProblem) -> Witness {
    Witness::new(format!(
        "{} n={} grid={} eps={}",
        problem.background.name(),
        problem.n,
        problem.grid,
        problem.eps
    ))
}

/// `Ric(ω_ε) = −ω_ε + εω` on the grid, with `Ric(ω_ε)` from spectral
/// derivatives of `log det H_ε`.
pub fn verify_ke_relation(problem: &TorusMAProblem, state: &MASolveState) -> Result<VerificationReport> {
    if !state.converged {
        return Err(Error::Unsolved);
    }
    let len = problem.len();
    let n = problem.n;
    let heps = problem.omega_eps(&state.u);
    let logdet: Vec<f64> = (0..len).map(|p| problem.point_matrix(&heps, p).det().ln()).collect();
    let dd = problem.spectral.ddbar(&logdet);
    let mut defect = 0.0f64;
    for i in 0..n * n * len {
        let ric_eps = -dd[i] / (2.0 * PI);
        defect = defect.max((ric_eps + heps[i] - problem.h[i] * problem.eps).norm());
    }
    Ok(VerificationReport::compare(
        "ma.ke-relation",
        Relation::Le,
        defect,
        KE_TOLERANCE,
        0.0,
        problem_witness(problem),
    ))
}

/// `sup u_ε ≤ C` with `e^C = max (ε₀ω − Ric ω)ⁿ/ωⁿ`.
pub fn verify_sup_bound(problem: &TorusMAProblem, state: &MASolveState, eps0: f64) -> Result<VerificationReport> {
    if !state.converged {
        return Err(Error::Unsolved);
    }
    let c_bound = sup_bound_constant(problem, eps0)?;
    Ok(VerificationReport::compare(
        "ma.sup-bound",
        Relation::Le,
        state.sup_u(),
        c_bound,
        1e-12 * c_bound.abs().max(1.0),
        problem_witness(problem),
    )
    .with_detail("eps0", eps0))
}

/// `C = log max_grid det(ε₀H − ρ/2π)/det H`.
pub fn sup_bound_constant(problem: &TorusMAProblem, eps0: f64) -> Result<f64> {
    if !(eps0 > problem.eps) {
        return Err(Error::InvalidInput(format!("eps0 = {eps0} must exceed eps = {}", problem.eps)));
    }
    let len = problem.len();
    let shifted: Vec<Complex64> = (0..problem.h.len()).map(|i| problem.h[i] * eps0 - problem.ric[i]).collect();
    let mut best = f64::NEG_INFINITY;
    for p in 0..len {
        let m = problem.point_matrix(&shifted, p);
        if m.min_eigenvalue() <= 0.0 {
            return Err(Error::InvalidInput(format!("eps0 = {eps0}: ε₀ω − Ric(ω) not positive on the grid")));
        }
        best = best.max(m.det().ln() - problem.log_det_h[p]);
    }
    Ok(best)
}

/// Minimum over the grid of the relative slack of
/// `tr_ω ω_ε ≤ (tr_{ω_ε} ω)^{n−1} e^u / (n−1)!`.
pub fn elementary_inequality_slack(problem: &TorusMAProblem, state: &MASolveState) -> f64 {
    let len = problem.len();
    let n = problem.n;
    let heps = problem.omega_eps(&state.u);
    let factorial: f64 = (1..n).map(|k| k as f64).product();
    let mut worst = f64::INFINITY;
    for p in 0..len {
        let he = problem.point_matrix(&heps, p);
        let h = problem.point_matrix(&problem.h, p);
        let lhs = h.inverse().trace_product(&he);
        let rhs = he.inverse().trace_product(&h).powi(n as i32 - 1) * state.u[p].exp() / factorial;
        worst = worst.min((rhs - lhs) / rhs.abs().max(f64::MIN_POSITIVE));
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsSweepRecord {
    pub background: String,
    pub n: usize,
    pub grid: usize,
    pub eps: Vec<f64>,
    /// `∫ ω_εⁿ` over the cell.
    pub integrals: Vec<f64>,
    /// `εⁿ ∫ ωⁿ`.
    pub cohomological: Vec<f64>,
    pub sup_u: Vec<f64>,
    pub residuals: Vec<f64>,
    pub slope: Option<f64>,
    pub elementary_min_slack: f64,
    pub sup_bound: Option<f64>,
    pub aborted: Option<String>,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Solves along a decreasing list of `ε`, continuing from the previous
/// solution when that keeps `ω_ε` positive. A failed solve stops the sweep
/// and is recorded in `aborted`.
pub fn eps_sweep(background: &ModelMetric, grid: usize, eps_list: &[f64], tol: f64, max_iter: usize) -> Result<EpsSweepRecord> {
    if eps_list.is_empty() || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("eps list must be non-empty and strictly decreasing".into()));
    }
    let base = assemble_problem(background, eps_list[0], grid)?;
    let n = base.n;
    let volume = base.volume();
    let sup_bound = sup_bound_constant(&base.with_eps(eps_list[0])?, DEFAULT_EPS0.max(2.0 * eps_list[0])).ok();
    let mut rec = EpsSweepRecord {
        background: background.name().to_string(),
        n,
        grid,
        eps: Vec::new(),
        integrals: Vec::new(),
        cohomological: Vec::new(),
        sup_u: Vec::new(),
        residuals: Vec::new(),
        slope: None,
        elementary_min_slack: f64::INFINITY,
        sup_bound,
        aborted: None,
    };
    let mut prev: Option<(f64, Vec<f64>)> = None;
    for &eps in eps_list {
        let problem = base.with_eps(eps)?;
        let guess = match &prev {
            Some((pe, pu)) => {
                let shift = n as f64 * (eps / pe).ln();
                let g: Vec<f64> = pu.iter().map(|v| v + shift).collect();
                if evaluate(&problem, &g).margin > 0.0 {
                    g
                } else {
                    problem.initial_guess()
                }
            }
            None => problem.initial_guess(),
        };
        let state = match solve_from(&problem, guess, tol, max_iter) {
            Ok(s) => s,
            Err(e) => {
                rec.aborted = Some(Error::SweepAborted { eps, reason: e.to_string() }.to_string());
                break;
            }
        };
        let heps = problem.omega_eps(&state.u);
        let integral = (0..problem.len()).map(|p| problem.point_matrix(&heps, p).det()).sum::<f64>() / problem.len() as f64;
        rec.eps.push(eps);
        rec.integrals.push(integral);
        rec.cohomological.push(eps.powi(n as i32) * volume);
        rec.sup_u.push(state.sup_u());
        rec.residuals.push(state.residual_norm);
        rec.elementary_min_slack = rec.elementary_min_slack.min(elementary_inequality_slack(&problem, &state));
        prev = Some((eps, state.u));
    }
    rec.slope = loglog_slope(&rec.eps, &rec.integrals);
    Ok(rec)
}

/// Slope, elementary inequality, cohomological integral and a single sup
/// bound for the whole sweep.
pub fn sweep_report(rec: &EpsSweepRecord) -> VerificationReport {
    let n = rec.n as f64;
    let w = Witness::new(format!("{} n={} grid={} eps={:?}", rec.background, rec.n, rec.grid, rec.eps));
    let slope = match rec.slope {
        Some(s) => VerificationReport::compare("ma.integral-slope", Relation::Eq, s, n, SLOPE_TOLERANCE * n, w.clone()),
        None => VerificationReport::compare("ma.integral-slope", Relation::Eq, f64::NAN, n, 0.0, w.clone())
            .with_note("fewer than two solved points"),
    };
    let elementary = VerificationReport::compare(
        "ma.elementary-inequality",
        Relation::Ge,
        rec.elementary_min_slack,
        0.0,
        ELEMENTARY_TOLERANCE,
        w.clone(),
    );
    let coh_defect = rec
        .integrals
        .iter()
        .zip(&rec.cohomological)
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max);
    let coh = VerificationReport::compare("ma.cohomological-integral", Relation::Le, coh_defect, 1e-8, 0.0, w.clone());
    let mut children = vec![slope, elementary, coh];
    if let Some(cb) = rec.sup_bound {
        let sup = rec.sup_u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        children.push(VerificationReport::compare("ma.sweep-sup-bound", Relation::Le, sup, cb, 1e-12, w.clone()));
    }
    let mut r = VerificationReport::aggregate("ma.eps-sweep", children, w);
    if let Some(a) = &rec.aborted {
        r = r.fail_with(a.clone());
    }
    r
}

/// `−n log(4πn/((n+1)κ))`.
pub fn sup_lower_bound(n: usize, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidInput(format!("κ = {kappa}: bound needs κ > 0")));
    }
    let n = n as f64;
    Ok(-n * (4.0 * PI * n / ((n + 1.0) * kappa)).ln())
}

/// `C_ε (n+1)κ/(2n) ≤ 2π`.
pub fn integral_chain(n: usize, kappa: f64, c_eps: f64) -> Result<VerificationReport> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidInput(format!("κ = {kappa}: chain needs κ > 0")));
    }
    let nf = n as f64;
    let lhs = c_eps * (nf + 1.0) * kappa / (2.0 * nf);
    Ok(VerificationReport::compare(
        "ma.integral-chain",
        Relation::Le,
        lhs,
        2.0 * PI,
        1e-12,
        Witness::new(format!("n={n} kappa={kappa} C_eps={c_eps}")),
    ))
}

/// Integral inequality on a constant-curvature chart (Poincaré disc or
/// complex ball), where the approximate KE equation has the constant
/// solution `u = n log(ε − c)` with `Ric ω = cω`.
///
/// `c` is measured from the curvature engine at the origin; the residual of
/// the equation is checked at sample points, and both sides of
/// `∫ (n+1)κ/(2n) S_ε ω_εⁿ ≤ 2π ∫ ω_εⁿ` are integrated against a bump
/// supported in `|z| < 1/2`.
pub fn integral_inequality_check(model: &ModelMetric, eps: f64, kappa: Option<f64>) -> Result<VerificationReport> {
    check_eps(eps)?;
    if !matches!(model.kind, ModelKind::PoincareDisc | ModelKind::ComplexBall) {
        return Err(Error::InvalidInput(format!(
            "integral surrogate needs a constant negative curvature chart, got {}",
            model.name()
        )));
    }
    let kappa = kappa.or(model.kappa()).unwrap_or(0.0);
    if !(kappa > 0.0) {
        return Err(Error::InvalidInput(format!("κ = {kappa}: check not applicable")));
    }
    let n = model.dim;
    let nf = n as f64;
    let field = model.field();
    let jet0 = field.evaluate_jet(&ChartPoint::origin(n), 2)?;
    let rho0 = ricci_and_scalar(&chern_curvature(&jet0)?)?.ricci;
    let c_e = rho0[(0, 0)].re / (2.0 * PI) / jet0.value[(0, 0)].re;
    if eps - c_e <= 0.0 {
        return Err(Error::InvalidInput(format!("εω − Ric ω not positive: eps {eps}, Einstein constant {c_e}")));
    }
    let u = nf * (eps - c_e).ln();

    let radius = 0.5;
    let mut max_res = 0.0f64;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    let rings = 8;
    let spokes = 16;
    for a in 0..rings {
        let r = radius * (a as f64 + 0.5) / rings as f64;
        for b in 0..spokes {
            let th = 2.0 * PI * b as f64 / spokes as f64;
            let mut coords = vec![c(0.0, 0.0); n];
            // spread the sample over the coordinates so every direction is used
            for (j, z) in coords.iter_mut().enumerate() {
                let phase = th + j as f64 * 0.7;
                *z = Complex64::from_polar(r / nf.sqrt(), phase);
            }
            let p = ChartPoint::new(coords)?;
            let jet = field.evaluate_jet(&p, 2)?;
            let rho = ricci_and_scalar(&chern_curvature(&jet)?)?.ricci;
            let h = &jet.value;
            let he = h * c(eps, 0.0) - rho / c(2.0 * PI, 0.0);
            let det_h = h.determinant().re;
            let det_e = he.determinant().re;
            max_res = max_res.max((det_e.ln() - u - det_h.ln()).abs());
            let s_eps = crate::linalg::inverse(&he)?.transpose().component_mul(h).sum().re;
            let weight = (1.0 - (r / radius).powi(2)).powi(2) * r;
            lhs += weight * (nf + 1.0) * kappa / (2.0 * nf) * s_eps * det_e;
            rhs += weight * 2.0 * PI * det_e;
        }
    }
    let w = Witness::new(format!("{} n={n} eps={eps} kappa={kappa}", model.name()));
    let c_eps = (-u / nf).exp();
    let children = vec![
        VerificationReport::compare("ma.surrogate-residual", Relation::Le, max_res, 1e-10, 0.0, w.clone()),
        VerificationReport::compare(
            "ma.integral-inequality-surrogate",
            Relation::Le,
            lhs,
            rhs,
            1e-12 * rhs.abs(),
            w.clone(),
        ),
        integral_chain(n, kappa, c_eps)?,
        VerificationReport::compare("ma.sup-lower-bound", Relation::Ge, u, sup_lower_bound(n, kappa)?, 1e-12, w.clone()),
    ];
    Ok(VerificationReport::aggregate("ma.integral-inequality", children, w)
        .with_detail("einstein_constant", c_e)
        .with_detail("u", u)
        .with_detail("c_eps", c_eps))
}

pub const GRID_MAGIC: &[u8; 8] = b"KMAGRID1";

#[derive(Debug, Clone, PartialEq)]
pub struct GridDump {
    pub n: u32,
    pub grid: u32,
    pub eps: f64,
    pub values: Vec<f64>,
}

/// Little-endian: magic, `u32 n`, `u32 grid`, `f64 eps`, then `grid^{2n}`
/// values of `u` in grid order.
pub fn write_grid_dump(path: &Path, problem: &TorusMAProblem, state: &MASolveState) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(GRID_MAGIC)?;
    f.write_all(&(problem.n as u32).to_le_bytes())?;
    f.write_all(&(problem.grid as u32).to_le_bytes())?;
    f.write_all(&problem.eps.to_le_bytes())?;
    for v in &state.u {
        f.write_all(&v.to_le_bytes())?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_grid_dump(path: &Path) -> Result<GridDump> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 24 || &bytes[..8] != GRID_MAGIC {
        return Err(Error::InvalidInput("not a grid dump".into()));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let grid = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let eps = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let count = (grid as usize).pow(2 * n);
    let body = &bytes[24..];
    if body.len() != 8 * count {
        return Err(Error::InvalidInput(format!("expected {count} values, found {} bytes", body.len())));
    }
    let values = body.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    Ok(GridDump { n, grid, eps, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_constant_solution() {
        let p = assemble_problem(&ModelMetric::flat(1), 0.2, 16).unwrap();
        let s = solve(&p, 1e-12, 5).unwrap();
        assert_eq!(s.iterations, 0);
        assert!(s.u.iter().all(|u| (u - 0.2f64.ln()).abs() < 1e-14));
    }

    #[test]
    fn rejects_non_periodic_background() {
        assert!(assemble_problem(&ModelMetric::poincare_disc(1.0), 0.1, 16).is_err());
        assert!(assemble_problem(&ModelMetric::flat(1), 0.1, 12).is_err());
        assert!(assemble_problem(&ModelMetric::flat(1), -0.1, 16).is_err());
    }

    #[test]
    fn chain_arithmetic() {
        let r = integral_chain(1, 4.0, 1.0).unwrap();
        assert!(r.passed());
        assert_eq!(r.lhs, 4.0);
        assert!((sup_lower_bound(1, 2.0).unwrap() + PI.ln()).abs() < 1e-15);
    }

    #[test]
    fn slope_of_power_law() {
        let x = [0.4, 0.2, 0.1];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v * v).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 2.0).abs() < 1e-12);
    }
}
