//! Curve arithmetic behind the algebraic hyperbolicity criterion, Poincaré
//! distance on the unit disc, and the subharmonicity estimate for holomorphic
//! discs in manifolds with `HSC ≤ −κ`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, MetricField};
use crate::jet::{Jet, JetSpace};
use crate::linalg::{self, c, CMatrix};
use crate::report::{Relation, Status, VerificationReport, Witness};
use crate::schwarz::{normal_chart, MetricPair};

/// A compact curve `C → X` as the criterion sees it.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveData {
    pub genus: u32,
    /// `deg_ω C = ∫_C F*ω`.
    pub degree: f64,
    /// `m_p ≥ 2` at the points where the parametrization is not immersive.
    pub multiplicities: Vec<u32>,
}

impl CurveData {
    pub fn new(genus: u32, degree: f64, multiplicities: Vec<u32>) -> Result<Self> {
        if !(degree > 0.0 && degree.is_finite()) {
            return Err(Error::InvalidInput(format!("degree must be positive, got {degree}")));
        }
        if let Some(m) = multiplicities.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidInput(format!("multiplicity {m} < 2")));
        }
        Ok(Self {
            genus,
            degree,
            multiplicities,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionVerdict {
    /// `2g − 2 ≥ (κ/2π) deg + Σ(m_p − 1)` holds.
    Consistent,
    /// The inequality fails: no metric with `HSC ≤ −κ` on a manifold
    /// containing the curve.
    Obstructed,
}

#[derive(Debug, Clone)]
pub struct DemaillyOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: CriterionVerdict,
    pub report: VerificationReport,
}

impl DemaillyOutcome {
    pub fn obstructed(&self) -> bool {
        self.verdict == CriterionVerdict::Obstructed
    }
}

/// `2g − 2 ≥ (κ/2π) deg_ω C + Σ (m_p − 1)`. The report passes when the
/// inequality holds, so an obstructed curve gives a failing report.
pub fn demailly_bound(curve: &CurveData, kappa: f64) -> Result<DemaillyOutcome> {
    if !(kappa >= 0.0) {
        return Err(Error::InvalidInput(format!("κ must be non-negative, got {kappa}")));
    }
    let lhs = 2.0 * curve.genus as f64 - 2.0;
    let rhs = kappa / (2.0 * PI) * curve.degree + curve.multiplicities.iter().map(|&m| m as f64 - 1.0).sum::<f64>();
    let report = VerificationReport::compare(
        "hyperbolicity.algebraic-criterion",
        Relation::Ge,
        lhs,
        rhs,
        0.0,
        Witness::new(format!(
            "g={} deg={} m={:?} kappa={kappa}",
            curve.genus, curve.degree, curve.multiplicities
        )),
    );
    let verdict = if report.status == Status::Pass {
        CriterionVerdict::Consistent
    } else {
        CriterionVerdict::Obstructed
    };
    let report = report.with_note(match verdict {
        CriterionVerdict::Consistent => "consistent",
        CriterionVerdict::Obstructed => "obstructed",
    });
    Ok(DemaillyOutcome {
        lhs,
        rhs,
        verdict,
        report,
    })
}

/// Genus `(d−1)(d−2)/2` of a smooth plane curve of degree `d`.
pub fn pluecker_genus(d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    Ok((d - 1) * d.saturating_sub(2) / 2)
}

/// `deg T_C = 2 − 2g`.
pub fn hurwitz_tangent_degree(g: u64) -> i64 {
    2 - 2 * g as i64
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Parameters of the fibred surface example: a singular fibre `Γ′` of genus
/// `g` with a monomial singularity of type `(a, b)`, smooth fibres plane
/// curves of degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceExampleParams {
    pub g: u64,
    pub a: u64,
    pub b: u64,
    pub d: u64,
}

/// Checks every constraint of the construction separately and aggregates.
pub fn validate_surface_example(p: &SurfaceExampleParams) -> VerificationReport {
    let w = Witness::new(format!("g={} a={} b={} d={}", p.g, p.a, p.b, p.d));
    let ge = |id: &str, lhs: f64, rhs: f64| VerificationReport::compare(id, Relation::Ge, lhs, rhs, 0.0, w.clone());
    let smooth = pluecker_genus(p.d).unwrap_or(0);
    let nodal = smooth.saturating_sub(1);
    let min_genus = smooth.min(nodal).min(p.g);
    let mut children = vec![
        ge("surface.genus", p.g as f64, 2.0),
        ge("surface.a-below-b", p.b as f64 - p.a as f64, 1.0),
        ge("surface.a-positive", p.a as f64, 1.0),
        VerificationReport::compare("surface.coprime", Relation::Eq, gcd(p.a, p.b) as f64, 1.0, 0.0, w.clone()),
        ge("surface.a-large", p.a as f64, 2.0 * p.g as f64),
        ge("surface.degree", p.d as f64, 4.0),
        ge("surface.fibre-genera", min_genus as f64, 2.0)
            .with_detail("smooth", smooth as f64)
            .with_detail("special", p.g as f64)
            .with_detail("one_node", nodal as f64),
    ];
    // the special fibre must be obstructed for every κ ≥ 0; κ = 0 is the weakest case
    let special = CurveData {
        genus: p.g as u32,
        degree: 1.0,
        multiplicities: if p.a >= 2 { vec![p.a as u32] } else { vec![] },
    };
    let obstructed = demailly_bound(&special, 0.0).map(|o| o.obstructed()).unwrap_or(false);
    let (lhs, rhs) = (2.0 * p.g as f64 - 2.0, p.a as f64 - 1.0);
    let mut special_report = VerificationReport::compare("surface.special-fibre-obstructed", Relation::Le, lhs, rhs, 0.0, w.clone());
    if !obstructed {
        special_report = special_report.fail_with("special fibre satisfies the criterion");
    } else if special_report.slack <= 0.0 {
        special_report = special_report.fail_with("criterion holds with equality");
    }
    children.push(special_report);
    VerificationReport::aggregate("hyperbolicity.surface-example", children, w)
}

fn check_disc(z: Complex64) -> Result<()> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDomain {
            point: z.to_string(),
            domain: "unit disc".into(),
        });
    }
    Ok(())
}

/// Distance of the metric `|dz|²/(1−|z|²)²`: `artanh |z−w|/|1−w̄z|`.
pub fn poincare_distance(z: Complex64, w: Complex64) -> Result<f64> {
    check_disc(z)?;
    check_disc(w)?;
    let r = ((z - w) / (c(1.0, 0.0) - w.conj() * z)).norm();
    Ok(r.min(1.0).atanh())
}

/// The disc automorphism `z ↦ e^{iθ}(z − a)/(1 − āz)`.
pub fn mobius(a: Complex64, theta: f64) -> impl Fn(Complex64) -> Complex64 {
    move |z| Complex64::from_polar(1.0, theta) * (z - a) / (c(1.0, 0.0) - a.conj() * z)
}

/// A holomorphic disc `f(t) = Σ_k a_k t^k` into `ℂⁿ`, a polynomial so the
/// series converges everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscMap {
    pub coefficients: Vec<Vec<Complex64>>,
}

impl DiscMap {
    pub fn new(coefficients: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = coefficients.first().map(|v| v.len()).unwrap_or(0);
        if n == 0 || coefficients.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidInput("coefficients must be non-empty vectors of equal length".into()));
        }
        Ok(Self { coefficients })
    }

    /// Scalar polynomial, `n = 1`.
    pub fn scalar(coeffs: &[Complex64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&a| vec![a]).collect())
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].len()
    }

    /// `f^{(order)}(t)`.
    pub fn derivative(&self, t: Complex64, order: usize) -> Vec<Complex64> {
        let mut out = vec![c(0.0, 0.0); self.dim()];
        for (k, a) in self.coefficients.iter().enumerate().skip(order) {
            let falling: f64 = ((k - order + 1)..=k).map(|x| x as f64).product();
            let tk = t.powu((k - order) as u32) * falling;
            for (o, ai) in out.iter_mut().zip(a) {
                *o += ai * tk;
            }
        }
        out
    }

    pub fn eval(&self, t: Complex64) -> Vec<Complex64> {
        self.derivative(t, 0)
    }
}

/// `∂_t∂̄_t log(‖f′‖² + ε)` at `t` by exact jet composition, compared with
/// `(κa³ + ε(|φ′|² + κa²))/(a + ε)²` where `a = ‖f′(t)‖²` and `φ′` is the
/// second derivative of `f` in normal coordinates at `f(t)`.
pub fn subharmonicity_defect(metric: &MetricField, f: &DiscMap, t: Complex64, eps_reg: f64, kappa: f64) -> Result<VerificationReport> {
    let n = metric.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
    }
    if !(eps_reg >= 0.0) || !(kappa >= 0.0) {
        return Err(Error::InvalidInput("eps_reg and κ must be non-negative".into()));
    }
    let d1 = f.derivative(t, 1);
    if eps_reg == 0.0 && d1.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::InvalidInput(format!("f′({t}) = 0 with eps_reg = 0")));
    }
    let p = ChartPoint::new(f.eval(t))?;

    // jets in (s, s̄) of f(t+s) − f(t) and f′(t+s), to degree 2
    let space = JetSpace::cached(2, 2);
    let s = Jet::variable(&space, 0, 0.0);
    let taylor = |order: usize, k: usize| -> Vec<Jet> {
        let mut out = vec![Jet::zero(&space); n];
        for m in k..=2 {
            let fact: f64 = (1..=m).map(|x| x as f64).product();
            let coeff = f.derivative(t, order + m);
            let pow = (0..m).fold(Jet::constant(&space, 1.0), |acc, _| &acc * &s);
            for (o, ci) in out.iter_mut().zip(&coeff) {
                *o += &pow.scale(*ci / fact);
            }
        }
        out
    };
    let dz = taylor(0, 1);
    let mut increments = dz.clone();
    increments.extend(dz.iter().map(|j| j.conjugate()));
    let fp = taylor(1, 0);
    let fpb: Vec<Jet> = fp.iter().map(|j| j.conjugate()).collect();
    let h: Vec<Jet> = metric
        .coefficient_jets(&p, 2)?
        .iter()
        .map(|e| e.substitute(&increments))
        .collect();
    let mut norm = Jet::zero(&space);
    for l in 0..n {
        for m in 0..n {
            norm += &(&(&fp[l] * &h[l * n + m]) * &fpb[m]);
        }
    }
    let psi = (norm.clone() + eps_reg).ln();
    let laplacian = psi.derivative(&[0, 1]).re;
    let a = norm.value().re;

    let chart = normal_chart(&MetricPair::new(metric.clone(), metric.clone(), p.clone())?)?;
    let binv = linalg::inverse(&chart.map.linear)?;
    let v1 = &binv * CMatrix::from_column_slice(n, 1, &d1);
    let d2 = f.derivative(t, 2);
    let mut rhs = CMatrix::from_column_slice(n, 1, &d2);
    for e in 0..n {
        for i in 0..n {
            for j in 0..n {
                rhs[e] -= chart.map.q(e, i, j) * v1[i] * v1[j];
            }
        }
    }
    let phi = &binv * rhs;
    let phi_sq: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    let bound = (kappa * a.powi(3) + eps_reg * (phi_sq + kappa * a * a)) / (a + eps_reg).powi(2);

    let w = Witness::new(format!("{} at t={t}, eps_reg={eps_reg}, kappa={kappa}", metric.label())).with_point(p.coords());
    let main = VerificationReport::compare(
        "hyperbolicity.subharmonicity",
        Relation::Ge,
        laplacian,
        bound,
        1e-9 * bound.abs().max(1.0),
        w.clone(),
    )
    .with_detail("norm_sq", a)
    .with_detail("phi_sq", phi_sq)
    .with_detail("relative_gap", (laplacian - bound) / bound.abs().max(1.0));
    Ok(main)
}
