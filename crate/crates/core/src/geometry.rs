//! Chart points, metric fields, metric jets and the model catalog.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::linalg::{self, c, CMatrix};
use crate::report::{Relation, VerificationReport, Witness};

/// Points closer than this to the boundary of a bounded chart are rejected.
pub const DOMAIN_MARGIN: f64 = 1e-6;

/// Highest metric derivative order served by [`MetricField::evaluate_jet`].
pub const MAX_JET_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    coords: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("chart point needs at least one coordinate".into()));
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("chart point has a non-finite coordinate".into()));
        }
        Ok(Self { coords })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![c(0.0, 0.0); n.max(1)],
        }
    }

    /// Convenience for one-dimensional charts.
    pub fn scalar(z: Complex64) -> Self {
        Self { coords: vec![z] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn offset(&self, delta: &[Complex64]) -> Self {
        Self {
            coords: self.coords.iter().zip(delta).map(|(a, b)| a + b).collect(),
        }
    }

    /// Moves along one real axis: axis `2j` is Re z_j, axis `2j+1` is Im z_j.
    pub fn offset_real_axis(&self, axis: usize, h: f64) -> Self {
        let mut coords = self.coords.clone();
        if axis % 2 == 0 {
            coords[axis / 2].re += h;
        } else {
            coords[axis / 2].im += h;
        }
        Self { coords }
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartDomain {
    Whole,
    UnitBall,
    /// Unit disc in the listed coordinates, unconstrained in the others.
    Polydisc { coords: Vec<usize> },
    /// Periodic unit cell; every point is admissible (coordinates are read mod 1).
    PeriodicCell,
}

impl ChartDomain {
    pub fn contains(&self, p: &ChartPoint, margin: f64) -> bool {
        let limit = 1.0 - margin;
        match self {
            ChartDomain::Whole | ChartDomain::PeriodicCell => true,
            ChartDomain::UnitBall => p.coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() < limit,
            ChartDomain::Polydisc { coords } => coords
                .iter()
                .all(|&i| i < p.dim() && p.coords[i].norm() < limit),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ChartDomain::Whole => "C^n".into(),
            ChartDomain::UnitBall => "unit ball".into(),
            ChartDomain::Polydisc { coords } => format!("unit disc in coordinates {coords:?}"),
            ChartDomain::PeriodicCell => "periodic unit cell".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    CoefficientForm,
    PotentialForm,
}

type PotentialFn = dyn Fn(&[Jet], &[Jet]) -> Jet + Send + Sync;
type CoefficientFn = dyn Fn(&[Jet], &[Jet]) -> Vec<Jet> + Send + Sync;

#[derive(Clone)]
enum Source {
    Potential(Arc<PotentialFn>),
    Coefficients(Arc<CoefficientFn>),
}

/// A hermitian metric on a chart, given either by a Kähler potential `φ`
/// (`ω_{lm̄} = ∂_l ∂̄_m φ`) or by its coefficient matrix.
///
/// Closures receive the holomorphic coordinates `z` and their conjugates `z̄`
/// as independent jets and must return jets in the same space. Coefficient
/// closures return the `n×n` matrix row-major.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    domain: ChartDomain,
    source: Source,
    scale: f64,
    label: String,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("provenance", &self.provenance())
            .field("scale", &self.scale)
            .finish()
    }
}

impl MetricField {
    pub fn from_potential<F>(dim: usize, domain: ChartDomain, label: impl Into<String>, phi: F) -> Self
    where
        F: Fn(&[Jet], &[Jet]) -> Jet + Send + Sync + 'static,
    {
        Self {
            dim,
            domain,
            source: Source::Potential(Arc::new(phi)),
            scale: 1.0,
            label: label.into(),
        }
    }

    pub fn from_coefficients<F>(dim: usize, domain: ChartDomain, label: impl Into<String>, h: F) -> Self
    where
        F: Fn(&[Jet], &[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        Self {
            dim,
            domain,
            source: Source::Coefficients(Arc::new(h)),
            scale: 1.0,
            label: label.into(),
        }
    }

    /// The metric `factor · ω`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale *= factor;
        out.label = format!("{}*{}", factor, self.label);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> Provenance {
        match self.source {
            Source::Potential(_) => Provenance::PotentialForm,
            Source::Coefficients(_) => Provenance::CoefficientForm,
        }
    }

    fn check_point(&self, p: &ChartPoint) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        if !self.domain.contains(p, DOMAIN_MARGIN) {
            return Err(Error::OutsideDomain {
                point: p.to_string(),
                domain: self.domain.name(),
            });
        }
        Ok(())
    }

    /// Taylor expansions of the coefficients `ω_{lm̄}` around `p`, truncated at
    /// total degree `degree` in the `2n` variables `(z, z̄)`. Row-major `n×n`.
    pub fn coefficient_jets(&self, p: &ChartPoint, degree: usize) -> Result<Vec<Jet>> {
        self.check_point(p)?;
        let n = self.dim;
        let target = JetSpace::cached(2 * n, degree);
        let entries = match &self.source {
            Source::Potential(phi) => {
                let space = JetSpace::cached(2 * n, degree + 2);
                let (z, zb) = coordinate_jets(&space, p);
                let f = phi(&z, &zb);
                let mut out = Vec::with_capacity(n * n);
                for l in 0..n {
                    let fl = f.differentiate(l);
                    for m in 0..n {
                        out.push(fl.differentiate(n + m).truncate(&target));
                    }
                }
                out
            }
            Source::Coefficients(h) => {
                let (z, zb) = coordinate_jets(&target, p);
                let out = h(&z, &zb);
                if out.len() != n * n {
                    return Err(Error::DimensionMismatch {
                        expected: n * n,
                        got: out.len(),
                    });
                }
                out
            }
        };
        Ok(entries.into_iter().map(|e| e.scale(self.scale)).collect())
    }

    /// Metric jets at `p` up to `order` (derivatives of the coefficients).
    pub fn evaluate_jet(&self, p: &ChartPoint, order: usize) -> Result<MetricJet> {
        if order > MAX_JET_ORDER {
            return Err(Error::UnsupportedOrder {
                requested: order,
                max: MAX_JET_ORDER,
            });
        }
        let entries = self.coefficient_jets(p, order)?;
        MetricJet::from_entries(self.dim, entries, order, &p.to_string())
    }

    /// The coefficient matrix at `p`.
    pub fn value_at(&self, p: &ChartPoint) -> Result<CMatrix> {
        Ok(self.evaluate_jet(p, 0)?.value)
    }
}

fn coordinate_jets(space: &Arc<JetSpace>, p: &ChartPoint) -> (Vec<Jet>, Vec<Jet>) {
    let n = p.dim();
    let z = (0..n).map(|j| Jet::variable(space, j, p.coords[j])).collect();
    let zb = (0..n)
        .map(|j| Jet::variable(space, n + j, p.coords[j].conj()))
        .collect();
    (z, zb)
}

/// Value and derivatives of a metric's coefficient matrix at one point.
///
/// Index layout: `d1[(j*n + l)*n + m] = ∂ω_{lm̄}/∂z_j`,
/// `d1bar[(j*n + l)*n + m] = ∂ω_{lm̄}/∂z̄_j`,
/// `d2[((j*n + k)*n + l)*n + m] = ∂²ω_{lm̄}/∂z_j∂z̄_k`.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub n: usize,
    pub order: usize,
    pub value: CMatrix,
    pub d1: Vec<Complex64>,
    pub d1bar: Vec<Complex64>,
    pub d2: Vec<Complex64>,
    entries: Vec<Jet>,
}

impl MetricJet {
    /// Builds the jet from Taylor expansions of the coefficients in the `2n`
    /// variables `(z, z̄)`. Fails unless the value is hermitian positive definite.
    pub fn from_entries(n: usize, entries: Vec<Jet>, order: usize, at: &str) -> Result<Self> {
        let value = CMatrix::from_fn(n, n, |l, m| entries[l * n + m].value());
        let herm = linalg::hermitian_defect(&value);
        if herm > 1e-10 * (1.0 + value.norm()) {
            return Err(Error::InvalidInput(format!(
                "metric coefficients at {at} are not hermitian (defect {herm:e})"
            )));
        }
        let min_eig = linalg::min_eigenvalue(&value);
        if min_eig.is_nan() || min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                point: at.to_string(),
                min_eigenvalue: min_eig,
            });
        }
        let mut d1 = Vec::new();
        let mut d1bar = Vec::new();
        let mut d2 = Vec::new();
        if order >= 1 {
            for j in 0..n {
                for e in &entries {
                    d1.push(e.derivative(&[j]));
                    d1bar.push(e.derivative(&[n + j]));
                }
            }
        }
        if order >= 2 {
            for j in 0..n {
                for k in 0..n {
                    for e in &entries {
                        d2.push(e.derivative(&[j, n + k]));
                    }
                }
            }
        }
        Ok(Self {
            n,
            order,
            value,
            d1,
            d1bar,
            d2,
            entries,
        })
    }

    pub fn d1(&self, j: usize, l: usize, m: usize) -> Complex64 {
        self.d1[(j * self.n + l) * self.n + m]
    }

    pub fn d1bar(&self, j: usize, l: usize, m: usize) -> Complex64 {
        self.d1bar[(j * self.n + l) * self.n + m]
    }

    pub fn d2(&self, j: usize, k: usize, l: usize, m: usize) -> Complex64 {
        self.d2[((j * self.n + k) * self.n + l) * self.n + m]
    }

    /// Raw Taylor expansions of the coefficients, for consumers that need
    /// derivatives beyond order two.
    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    /// Largest violation of `∂ω_{lm̄}/∂z̄_j = conj(∂ω_{ml̄}/∂z_j)`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = linalg::hermitian_defect(&self.value);
        if self.order >= 1 {
            for j in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        worst = worst.max((self.d1bar(j, l, m) - self.d1(j, m, l).conj()).norm());
                    }
                }
            }
        }
        if self.order >= 2 {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        for m in 0..n {
                            worst = worst.max((self.d2(j, k, l, m) - self.d2(k, j, m, l).conj()).norm());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Largest `|∂_j ω_{lm̄} − ∂_l ω_{jm̄}|` and the indices `(j, l, m)` where it occurs.
    pub fn kahler_defect(&self) -> (f64, (usize, usize, usize)) {
        let n = self.n;
        let mut worst = (0.0, (0, 0, 0));
        for j in 0..n {
            for l in 0..n {
                for m in 0..n {
                    let d = (self.d1(j, l, m) - self.d1(l, j, m)).norm();
                    if d > worst.0 {
                        worst = (d, (j, l, m));
                    }
                }
            }
        }
        worst
    }
}

/// Verifies `dω = 0` at `p` through the symmetry of first derivatives.
pub fn check_kahler(metric: &MetricField, p: &ChartPoint, tol: f64) -> Result<VerificationReport> {
    let jet = metric.evaluate_jet(p, 1)?;
    let (defect, (j, l, m)) = jet.kahler_defect();
    Ok(VerificationReport::compare(
        "geometry.kahler-closedness",
        Relation::Le,
        defect,
        0.0,
        tol,
        Witness::new(format!("{} at {}", metric.label(), p)).with_point(p.coords()),
    )
    .with_detail("j", j as f64)
    .with_detail("l", l as f64)
    .with_detail("m", m as f64))
}

/// A holomorphic polynomial map `v ↦ base + B v + ½ Q(v, v)`.
///
/// `quadratic[(e*n + a)*n + b]` is symmetric in `a, b`.
#[derive(Debug, Clone)]
pub struct HolomorphicMap {
    pub base: ChartPoint,
    pub linear: CMatrix,
    pub quadratic: Vec<Complex64>,
}

impl HolomorphicMap {
    pub fn affine(base: ChartPoint, linear: CMatrix) -> Self {
        let n = base.dim();
        Self {
            base,
            linear,
            quadratic: vec![c(0.0, 0.0); n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn q(&self, e: usize, a: usize, b: usize) -> Complex64 {
        let n = self.dim();
        self.quadratic[(e * n + a) * n + b]
    }

    pub fn apply(&self, v: &[Complex64]) -> ChartPoint {
        let n = self.dim();
        let mut delta = vec![c(0.0, 0.0); n];
        for e in 0..n {
            for a in 0..n {
                delta[e] += self.linear[(e, a)] * v[a];
                for b in 0..n {
                    delta[e] += 0.5 * self.q(e, a, b) * v[a] * v[b];
                }
            }
        }
        self.base.offset(&delta)
    }

    /// Increments `Φ(v) − base` and the Jacobian `∂Φ_e/∂v_a` as jets in `v, v̄`.
    fn jets(&self, space: &Arc<JetSpace>) -> (Vec<Jet>, Vec<Jet>) {
        let n = self.dim();
        let v: Vec<Jet> = (0..n).map(|a| Jet::variable(space, a, 0.0)).collect();
        let mut inc = Vec::with_capacity(n);
        let mut jac = Vec::with_capacity(n * n);
        for e in 0..n {
            let mut acc = Jet::zero(space);
            for a in 0..n {
                acc += &v[a].scale(self.linear[(e, a)]);
                for b in 0..n {
                    acc += &(&v[a] * &v[b]).scale(0.5 * self.q(e, a, b));
                }
            }
            inc.push(acc);
            for a in 0..n {
                let mut d = Jet::constant(space, self.linear[(e, a)]);
                for b in 0..n {
                    d += &v[b].scale(self.q(e, a, b));
                }
                jac.push(d);
            }
        }
        (inc, jac)
    }
}

/// Jets at `v = 0` of the pullback `Φ*ω`, with coefficients `Jᵀ ω(Φ) J̄`.
pub fn pullback_jet(metric: &MetricField, map: &HolomorphicMap, order: usize) -> Result<MetricJet> {
    let n = metric.dim();
    let entries = metric.coefficient_jets(&map.base, order)?;
    let space = JetSpace::cached(2 * n, order);
    let (inc, jac) = map.jets(&space);
    let mut args: Vec<Jet> = inc.clone();
    args.extend(inc.iter().map(Jet::conjugate));
    let composed: Vec<Jet> = entries.iter().map(|e| e.substitute(&args)).collect();
    let jac_bar: Vec<Jet> = jac.iter().map(Jet::conjugate).collect();
    let mut pulled = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut acc = Jet::zero(&space);
            for l in 0..n {
                for m in 0..n {
                    acc += &(&(&jac[l * n + a] * &composed[l * n + m]) * &jac_bar[m * n + b]);
                }
            }
            pulled.push(acc);
        }
    }
    MetricJet::from_entries(n, pulled, order, &format!("pullback at {}", map.base))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Flat,
    PoincareDisc,
    FubiniStudyChart,
    ComplexBall,
    Product,
    PerturbedTorus,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Flat => "flat",
            ModelKind::PoincareDisc => "poincare-disc",
            ModelKind::FubiniStudyChart => "fubini-study-chart",
            ModelKind::ComplexBall => "complex-ball",
            ModelKind::Product => "product",
            ModelKind::PerturbedTorus => "perturbed-torus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "flat" => ModelKind::Flat,
            "poincare-disc" => ModelKind::PoincareDisc,
            "fubini-study-chart" => ModelKind::FubiniStudyChart,
            "complex-ball" => ModelKind::ComplexBall,
            "product" => ModelKind::Product,
            "perturbed-torus" => ModelKind::PerturbedTorus,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HscSign {
    Zero,
    NegativeConstant,
    PositiveConstant,
    NonPositiveWithFlatDirections,
    Indefinite,
}

impl HscSign {
    pub fn tag(self) -> &'static str {
        match self {
            HscSign::Zero => "zero",
            HscSign::NegativeConstant => "negative-constant",
            HscSign::PositiveConstant => "positive-constant",
            HscSign::NonPositiveWithFlatDirections => "non-positive, not quasi-negative",
            HscSign::Indefinite => "indefinite",
        }
    }
}

/// Closed-form test metrics.
///
/// | kind | metric | `scale` | `amplitude` |
/// |---|---|---|---|
/// | flat | `s Σ|dz|²` on ℂⁿ (also periodic) | s > 0 | unused |
/// | poincare-disc | `s (1−|z|²)⁻² |dz|²`, coefficient form | s > 0 | unused |
/// | fubini-study-chart | potential `s log(1+|z|²)` on ℂⁿ | s > 0 | unused |
/// | complex-ball | potential `−s log(1−|z|²)` on the unit ball | s > 0 | unused |
/// | product | disc × ℂ, potential `−s log(1−|z₁|²) + t|z₂|²` | s > 0 | t > 0 |
/// | perturbed-torus | `Π (1 + a cos 2π Re z_j)` diagonal, coefficient form | unused | 0 ≤ a < 1 |
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelMetric {
    pub kind: ModelKind,
    pub dim: usize,
    pub scale: f64,
    pub amplitude: f64,
}

impl ModelMetric {
    pub fn flat(dim: usize) -> Self {
        Self {
            kind: ModelKind::Flat,
            dim,
            scale: 1.0,
            amplitude: 0.0,
        }
    }

    pub fn poincare_disc(scale: f64) -> Self {
        Self {
            kind: ModelKind::PoincareDisc,
            dim: 1,
            scale,
            amplitude: 0.0,
        }
    }

    pub fn fubini_study(dim: usize, scale: f64) -> Self {
        Self {
            kind: ModelKind::FubiniStudyChart,
            dim,
            scale,
            amplitude: 0.0,
        }
    }

    pub fn complex_ball(dim: usize, scale: f64) -> Self {
        Self {
            kind: ModelKind::ComplexBall,
            dim,
            scale,
            amplitude: 0.0,
        }
    }

    pub fn product(disc_scale: f64, flat_scale: f64) -> Self {
        Self {
            kind: ModelKind::Product,
            dim: 2,
            scale: disc_scale,
            amplitude: flat_scale,
        }
    }

    pub fn perturbed_torus(dim: usize, amplitude: f64) -> Self {
        Self {
            kind: ModelKind::PerturbedTorus,
            dim,
            scale: 1.0,
            amplitude,
        }
    }

    /// Builds a model from its catalog name. `scale` and `amplitude` follow the
    /// table on [`ModelMetric`].
    pub fn from_name(name: &str, dim: usize, scale: f64, amplitude: f64) -> Result<Self> {
        let kind = ModelKind::from_name(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model '{name}'")))?;
        let m = Self {
            kind,
            dim,
            scale,
            amplitude,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(format!("{}: {msg}", self.kind.name())));
        if self.dim == 0 {
            return bad("dimension must be at least 1");
        }
        match self.kind {
            ModelKind::PoincareDisc if self.dim != 1 => bad("dimension must be 1"),
            ModelKind::Product if self.dim != 2 => bad("dimension must be 2"),
            ModelKind::Product if self.amplitude <= 0.0 => bad("flat factor scale must be positive"),
            ModelKind::PerturbedTorus if !(0.0..1.0).contains(&self.amplitude) => bad("amplitude must lie in [0, 1)"),
            ModelKind::PerturbedTorus if self.dim > 2 => bad("dimension must be 1 or 2"),
            _ if self.scale <= 0.0 => bad("scale must be positive"),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn parameter_range(&self) -> &'static str {
        match self.kind {
            ModelKind::Flat => "any n >= 1, scale > 0",
            ModelKind::PoincareDisc => "n = 1, scale > 0, |z| < 1",
            ModelKind::FubiniStudyChart => "any n >= 1, scale > 0, all of C^n",
            ModelKind::ComplexBall => "any n >= 1, scale > 0, |z| < 1",
            ModelKind::Product => "n = 2, disc scale > 0, flat scale > 0, |z1| < 1",
            ModelKind::PerturbedTorus => "n in {1, 2}, 0 <= amplitude < 1, periodic",
        }
    }

    pub fn hsc_sign(&self) -> HscSign {
        match self.kind {
            ModelKind::Flat => HscSign::Zero,
            ModelKind::PoincareDisc | ModelKind::ComplexBall => HscSign::NegativeConstant,
            ModelKind::FubiniStudyChart => HscSign::PositiveConstant,
            ModelKind::Product => HscSign::NonPositiveWithFlatDirections,
            ModelKind::PerturbedTorus if self.amplitude == 0.0 => HscSign::Zero,
            ModelKind::PerturbedTorus => HscSign::Indefinite,
        }
    }

    /// The holomorphic sectional curvature when it is constant.
    pub fn hsc_constant(&self) -> Option<f64> {
        match self.kind {
            ModelKind::Flat => Some(0.0),
            ModelKind::PoincareDisc | ModelKind::ComplexBall => Some(-2.0 / self.scale),
            ModelKind::FubiniStudyChart => Some(2.0 / self.scale),
            ModelKind::PerturbedTorus if self.amplitude == 0.0 => Some(0.0),
            _ => None,
        }
    }

    /// `κ ≥ 0` with `HSC ≤ −κ`, when the model has one from its closed form.
    pub fn kappa(&self) -> Option<f64> {
        match self.kind {
            ModelKind::Product => Some(0.0),
            _ => self.hsc_constant().filter(|h| *h <= 0.0).map(|h| -h),
        }
    }

    /// The constant `c` with `Ric(ω) = c·ω`, for Einstein models.
    pub fn einstein_constant(&self) -> Option<f64> {
        let n = self.dim as f64;
        let pi = std::f64::consts::PI;
        match self.kind {
            ModelKind::Flat => Some(0.0),
            ModelKind::PoincareDisc => Some(-1.0 / (pi * self.scale)),
            ModelKind::ComplexBall => Some(-(n + 1.0) / (2.0 * pi * self.scale)),
            ModelKind::FubiniStudyChart => Some((n + 1.0) / (2.0 * pi * self.scale)),
            ModelKind::PerturbedTorus if self.amplitude == 0.0 => Some(0.0),
            _ => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, ModelKind::Flat | ModelKind::PerturbedTorus)
    }

    pub fn field(&self) -> MetricField {
        let n = self.dim;
        let s = self.scale;
        let a = self.amplitude;
        let label = self.name();
        match self.kind {
            ModelKind::Flat => MetricField::from_potential(n, ChartDomain::Whole, label, move |z, zb| {
                let mut acc = Jet::zero(z[0].space());
                for (x, y) in z.iter().zip(zb) {
                    acc += &(x * y);
                }
                acc * s
            }),
            ModelKind::PoincareDisc => MetricField::from_coefficients(1, ChartDomain::UnitBall, label, move |z, zb| {
                let w = (&(&z[0] * &zb[0]) * -1.0) + 1.0;
                vec![w.powf(-2.0) * s]
            }),
            ModelKind::FubiniStudyChart => MetricField::from_potential(n, ChartDomain::Whole, label, move |z, zb| {
                let mut acc = Jet::constant(z[0].space(), 1.0);
                for (x, y) in z.iter().zip(zb) {
                    acc += &(x * y);
                }
                acc.ln() * s
            }),
            ModelKind::ComplexBall => MetricField::from_potential(n, ChartDomain::UnitBall, label, move |z, zb| {
                let mut acc = Jet::constant(z[0].space(), 1.0);
                for (x, y) in z.iter().zip(zb) {
                    acc -= &(x * y);
                }
                acc.ln() * (-s)
            }),
            ModelKind::Product => MetricField::from_potential(
                2,
                ChartDomain::Polydisc { coords: vec![0] },
                label,
                move |z, zb| {
                    let disc = ((&(&z[0] * &zb[0]) * -1.0) + 1.0).ln() * (-s);
                    let flat = &(&z[1] * &zb[1]) * a;
                    disc + flat
                },
            ),
            ModelKind::PerturbedTorus => {
                MetricField::from_coefficients(n, ChartDomain::PeriodicCell, label, move |z, zb| {
                    let space = z[0].space().clone();
                    let mut out = vec![Jet::zero(&space); n * n];
                    for j in 0..n {
                        // cos(2π Re z) = cos(π (z + z̄))
                        let arg = &(&z[j] + &zb[j]) * std::f64::consts::PI;
                        out[j * n + j] = (arg.cos() * a) + 1.0;
                    }
                    out
                })
            }
        }
    }

    /// A random admissible point, kept away from the boundary of bounded charts.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> ChartPoint {
        let n = self.dim;
        let polar = |rng: &mut R, rmax: f64| {
            let r = rmax * rng.random::<f64>().sqrt();
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(r, t)
        };
        let coords = match self.kind {
            ModelKind::ComplexBall => {
                let v = linalg::complex_gaussian_vector(n, rng);
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let r = 0.8 * rng.random::<f64>().powf(1.0 / (2.0 * n as f64));
                v.iter().map(|z| z * (r / norm)).collect()
            }
            ModelKind::PoincareDisc => vec![polar(rng, 0.8)],
            ModelKind::Product => vec![polar(rng, 0.8), polar(rng, 2.0)],
            ModelKind::PerturbedTorus => (0..n)
                .map(|_| c(rng.random::<f64>(), rng.random::<f64>()))
                .collect(),
            ModelKind::Flat | ModelKind::FubiniStudyChart => (0..n).map(|_| polar(rng, 1.5)).collect(),
        };
        ChartPoint { coords }
    }
}

/// The six reference models with default parameters.
pub fn model_catalog() -> Vec<ModelMetric> {
    vec![
        ModelMetric::flat(2),
        ModelMetric::poincare_disc(1.0),
        ModelMetric::fubini_study(1, 1.0),
        ModelMetric::complex_ball(2, 1.0),
        ModelMetric::product(1.0, 1.0),
        ModelMetric::perturbed_torus(1, 0.1),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_metric_is_identity_with_zero_derivatives() {
        let m = ModelMetric::flat(2).field();
        let p = ChartPoint::new(vec![c(0.3, 0.1), c(-0.2, 0.5)]).unwrap();
        let jet = m.evaluate_jet(&p, 2).unwrap();
        assert!((jet.value.clone() - CMatrix::identity(2, 2)).norm() < 1e-15);
        assert!(jet.d1.iter().chain(&jet.d1bar).chain(&jet.d2).all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn poincare_at_origin_is_one() {
        let m = ModelMetric::poincare_disc(1.0).field();
        let v = m.value_at(&ChartPoint::origin(1)).unwrap();
        assert!((v[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn boundary_points_are_rejected() {
        let m = ModelMetric::complex_ball(2, 1.0).field();
        let p = ChartPoint::new(vec![c(0.8, 0.0), c(0.6, 0.0)]).unwrap();
        assert!(matches!(m.evaluate_jet(&p, 0), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn order_above_maximum_is_rejected() {
        let m = ModelMetric::flat(1).field();
        assert!(matches!(
            m.evaluate_jet(&ChartPoint::origin(1), 7),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn negative_scale_is_not_positive_definite() {
        let m = ModelMetric::flat(1).field().scaled(-1.0);
        assert!(matches!(
            m.evaluate_jet(&ChartPoint::origin(1), 0),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn catalog_signs() {
        let tags: Vec<&str> = model_catalog().iter().map(|m| m.hsc_sign().tag()).collect();
        assert_eq!(
            tags,
            [
                "zero",
                "negative-constant",
                "positive-constant",
                "negative-constant",
                "non-positive, not quasi-negative",
                "indefinite"
            ]
        );
    }

    #[test]
    fn affine_pullback_of_flat_is_gram_of_linear_part() {
        let m = ModelMetric::flat(2).field();
        let b = CMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(0.0, 0.5), c(2.0, 0.0), c(-1.0, 0.0)]);
        let map = HolomorphicMap::affine(ChartPoint::origin(2), b.clone());
        let jet = pullback_jet(&m, &map, 2).unwrap();
        let expect = linalg::pull_metric(&CMatrix::identity(2, 2), &b);
        assert!((jet.value.clone() - expect).norm() < 1e-14);
    }
}
