//! Truncated multivariate Taylor polynomials ("jets") with complex coefficients.
//!
//! A [`Jet`] carries every partial derivative of a function up to a fixed total
//! degree at one base point. Holomorphic coordinates `z_j` and their conjugates
//! `z̄_j` are separate variables (Wirtinger calculus), so `∂/∂z_j` and
//! `∂/∂z̄_k` are read off independently. Arithmetic and elementary functions
//! propagate derivatives exactly; there is no step size anywhere.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

/// Monomial bookkeeping shared by all jets of the same shape.
pub struct JetSpace {
    nvars: usize,
    degree: usize,
    exponents: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, usize>,
    // (lhs, rhs, out) for every pair whose product survives truncation
    products: Vec<(u32, u32, u32)>,
    // product of factorials of the exponents, for derivative extraction
    weights: Vec<f64>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("degree", &self.degree)
            .field("monomials", &self.exponents.len())
            .finish()
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl JetSpace {
    pub fn new(nvars: usize, degree: usize) -> Arc<Self> {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        for d in 0..=degree {
            let mut current = vec![0u8; nvars];
            enumerate_degree(nvars, d, 0, &mut current, &mut exponents);
        }
        let lookup: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let total = |e: &[u8]| e.iter().map(|&x| x as usize).sum::<usize>();
        let mut products = Vec::new();
        for (i, a) in exponents.iter().enumerate() {
            let da = total(a);
            for (j, b) in exponents.iter().enumerate() {
                if da + total(b) > degree {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }
        let weights = exponents
            .iter()
            .map(|e| e.iter().map(|&x| factorial(x as usize)).product())
            .collect();
        Arc::new(Self {
            nvars,
            degree,
            exponents,
            lookup,
            products,
            weights,
        })
    }

    /// Shared instance for `(nvars, degree)`; building the product table is
    /// the expensive part, so spaces are cached for the life of the process.
    pub fn cached(nvars: usize, degree: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(
            guard
                .entry((nvars, degree))
                .or_insert_with(|| JetSpace::new(nvars, degree)),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        self.lookup.get(exponents).copied()
    }
}

// Emits all exponent vectors of total degree `d` in lexicographic order of the
// first variable descending, so that e_0, e_1, ... come out in variable order.
fn enumerate_degree(nvars: usize, d: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == nvars || nvars == 0 {
        if nvars > 0 {
            cur[pos] = d as u8;
        }
        out.push(cur.clone());
        if nvars > 0 {
            cur[pos] = 0;
        }
        return;
    }
    for k in (0..=d).rev() {
        cur[pos] = k as u8;
        enumerate_degree(nvars, d - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// A truncated Taylor expansion around a base point.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("value", &self.coeffs[0])
            .field("degree", &self.space.degree)
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, value: impl Into<Complex64>) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); space.len()];
        coeffs[0] = value.into();
        Self {
            space: Arc::clone(space),
            coeffs,
        }
    }

    /// The coordinate function `x_var` expanded around `value`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, value: impl Into<Complex64>) -> Self {
        assert!(var < space.nvars, "variable index out of range");
        let mut jet = Self::constant(space, value);
        if space.degree >= 1 {
            let mut e = vec![0u8; space.nvars];
            e[var] = 1;
            let idx = space.lookup[&e];
            jet.coeffs[idx] = Complex64::new(1.0, 0.0);
        }
        jet
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Partial derivative with the given multi-index, evaluated at the base point.
    ///
    /// Returns zero for multi-indices above the truncation degree.
    pub fn partial(&self, exponents: &[u8]) -> Complex64 {
        match self.space.index_of(exponents) {
            Some(i) => self.coeffs[i] * self.space.weights[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Derivative along a list of variables (repetitions allowed).
    pub fn derivative(&self, vars: &[usize]) -> Complex64 {
        let mut e = vec![0u8; self.space.nvars];
        for &v in vars {
            e[v] += 1;
        }
        self.partial(&e)
    }

    pub fn zero(space: &Arc<JetSpace>) -> Self {
        Self::constant(space, 0.0)
    }

    /// Exact derivative along one variable. The result lives in the same space,
    /// so its top-degree part is zero (one order of information is consumed).
    pub fn differentiate(&self, var: usize) -> Self {
        let mut out = self.zero_like();
        let mut e = vec![0u8; self.space.nvars];
        for (i, exps) in self.space.exponents.iter().enumerate() {
            e.copy_from_slice(exps);
            e[var] += 1;
            if let Some(j) = self.space.index_of(&e) {
                out.coeffs[i] = self.coeffs[j] * f64::from(e[var]);
            }
        }
        out
    }

    /// Re-expresses the jet in another space over the same variables, dropping
    /// monomials above the target degree.
    pub fn truncate(&self, target: &Arc<JetSpace>) -> Self {
        assert_eq!(target.nvars, self.space.nvars, "variable count differs");
        let mut out = Self::zero(target);
        for (i, exps) in target.exponents.iter().enumerate() {
            if let Some(j) = self.space.index_of(exps) {
                out.coeffs[i] = self.coeffs[j];
            }
        }
        out
    }

    /// Evaluates the Taylor polynomial at `base + increments`, where each
    /// increment is a jet in another space (usually with zero constant term).
    pub fn substitute(&self, increments: &[Jet]) -> Jet {
        assert_eq!(increments.len(), self.space.nvars, "one increment per variable");
        let target = Arc::clone(increments[0].space());
        let mut monomials: Vec<Jet> = Vec::with_capacity(self.space.len());
        let mut out = Jet::constant(&target, self.coeffs[0]);
        monomials.push(Jet::constant(&target, 1.0));
        for i in 1..self.space.len() {
            let exps = &self.space.exponents[i];
            let var = exps.iter().position(|&x| x > 0).unwrap_or(0);
            let mut prev = exps.clone();
            prev[var] -= 1;
            let p = self.space.lookup[&prev];
            let m = &monomials[p] * &increments[var];
            let c = self.coeffs[i];
            if c.re != 0.0 || c.im != 0.0 {
                for (o, v) in out.coeffs.iter_mut().zip(&m.coeffs) {
                    *o += c * v;
                }
            }
            monomials.push(m);
        }
        out
    }

    fn zero_like(&self) -> Self {
        Self {
            space: Arc::clone(&self.space),
            coeffs: vec![Complex64::new(0.0, 0.0); self.coeffs.len()],
        }
    }

    fn assert_same_space(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.space, &other.space)
                || (self.space.nvars == other.space.nvars && self.space.degree == other.space.degree),
            "jets from different spaces"
        );
    }

    fn mul_jet(&self, other: &Self) -> Self {
        self.assert_same_space(other);
        let mut out = self.zero_like();
        for &(i, j, k) in &self.space.products {
            let a = self.coeffs[i as usize];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            out.coeffs[k as usize] += a * other.coeffs[j as usize];
        }
        out
    }

    /// Applies a scalar function given its Taylor coefficients `f^(k)(a)/k!` at
    /// the base value `a`, for k = 0..=degree.
    pub fn compose(&self, taylor: &[Complex64]) -> Self {
        let degree = self.space.degree;
        debug_assert!(taylor.len() > degree);
        let mut h = self.clone();
        h.coeffs[0] = Complex64::new(0.0, 0.0);
        let mut out = Self::constant(&self.space, taylor[0]);
        let mut power = Self::constant(&self.space, 1.0);
        for coef in taylor.iter().take(degree + 1).skip(1) {
            power = power.mul_jet(&h);
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += coef * p;
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let a = self.value().exp();
        let taylor: Vec<Complex64> = (0..=self.space.degree)
            .map(|k| a / factorial(k))
            .collect();
        self.compose(&taylor)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let a = self.value();
        let mut taylor = vec![a.ln()];
        for k in 1..=self.space.degree {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            taylor.push(sign / (k as f64 * a.powi(k as i32)));
        }
        self.compose(&taylor)
    }

    /// Real power `x^p` on the principal branch.
    pub fn powf(&self, p: f64) -> Self {
        let a = self.value();
        let mut taylor = Vec::with_capacity(self.space.degree + 1);
        let mut binom = 1.0;
        for k in 0..=self.space.degree {
            if k > 0 {
                binom *= (p - (k as f64 - 1.0)) / k as f64;
            }
            taylor.push(a.powc(Complex64::new(p - k as f64, 0.0)) * binom);
        }
        self.compose(&taylor)
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        let inv = 1.0 / a;
        let mut taylor = Vec::with_capacity(self.space.degree + 1);
        let mut term = inv;
        for _ in 0..=self.space.degree {
            taylor.push(term);
            term = -term * inv;
        }
        self.compose(&taylor)
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn cos(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sin(), a.cos());
        let cycle = [c, -s, -c, s];
        let taylor: Vec<Complex64> = (0..=self.space.degree)
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose(&taylor)
    }

    pub fn sin(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sin(), a.cos());
        let cycle = [s, c, -s, -c];
        let taylor: Vec<Complex64> = (0..=self.space.degree)
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose(&taylor)
    }

    /// Complex conjugate of the represented function when the variables come in
    /// conjugate pairs `(x_0..x_{n-1}, x̄_0..x̄_{n-1})`: swaps the two halves of
    /// every exponent and conjugates the coefficients.
    pub fn conjugate(&self) -> Self {
        let nvars = self.space.nvars;
        assert!(nvars % 2 == 0, "conjugation needs paired variables");
        let half = nvars / 2;
        let mut out = self.zero_like();
        for (i, e) in self.space.exponents.iter().enumerate() {
            let mut swapped = vec![0u8; nvars];
            swapped[..half].copy_from_slice(&e[half..]);
            swapped[half..].copy_from_slice(&e[..half]);
            let j = self.space.lookup[&swapped];
            out.coeffs[j] = self.coeffs[i].conj();
        }
        out
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> Self {
        let f = factor.into();
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= f;
        }
        out
    }
}

/// Determinant of a square matrix of jets (row-major), by cofactor expansion.
///
/// Intended for the small dimensions used on charts (n ≤ 4).
pub fn jet_determinant(entries: &[Jet], n: usize) -> Jet {
    assert_eq!(entries.len(), n * n);
    match n {
        1 => entries[0].clone(),
        2 => &(&entries[0] * &entries[3]) - &(&entries[1] * &entries[2]),
        _ => {
            let mut acc = entries[0].zero_like();
            for col in 0..n {
                let minor: Vec<Jet> = (1..n)
                    .flat_map(|r| {
                        (0..n)
                            .filter(move |&c| c != col)
                            .map(move |c| entries[r * n + c].clone())
                    })
                    .collect();
                let term = &entries[col] * &jet_determinant(&minor, n - 1);
                if col % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            acc
        }
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.assert_same_space(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        self.assert_same_space(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl MulAssign<&Jet> for Jet {
    fn mul_assign(&mut self, rhs: &Jet) {
        *self = self.mul_jet(rhs);
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        self.mul_jet(&rhs.recip())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

macro_rules! scalar_ops {
    ($scalar:ty) => {
        impl Add<$scalar> for &Jet {
            type Output = Jet;
            fn add(self, rhs: $scalar) -> Jet {
                let mut out = self.clone();
                out.coeffs[0] += Complex64::from(rhs);
                out
            }
        }
        impl Add<$scalar> for Jet {
            type Output = Jet;
            fn add(self, rhs: $scalar) -> Jet {
                &self + rhs
            }
        }
        impl Sub<$scalar> for &Jet {
            type Output = Jet;
            fn sub(self, rhs: $scalar) -> Jet {
                let mut out = self.clone();
                out.coeffs[0] -= Complex64::from(rhs);
                out
            }
        }
        impl Sub<$scalar> for Jet {
            type Output = Jet;
            fn sub(self, rhs: $scalar) -> Jet {
                &self - rhs
            }
        }
        impl Mul<$scalar> for &Jet {
            type Output = Jet;
            fn mul(self, rhs: $scalar) -> Jet {
                self.scale(rhs)
            }
        }
        impl Mul<$scalar> for Jet {
            type Output = Jet;
            fn mul(self, rhs: $scalar) -> Jet {
                self.scale(rhs)
            }
        }
        impl Div<$scalar> for &Jet {
            type Output = Jet;
            fn div(self, rhs: $scalar) -> Jet {
                self.scale(Complex64::new(1.0, 0.0) / Complex64::from(rhs))
            }
        }
        impl Div<$scalar> for Jet {
            type Output = Jet;
            fn div(self, rhs: $scalar) -> Jet {
                &self / rhs
            }
        }
    };
}

scalar_ops!(f64);
scalar_ops!(Complex64);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomials_start_with_constant_then_variables() {
        let space = JetSpace::new(3, 2);
        assert_eq!(space.len(), 10);
        assert_eq!(space.exponents[0], vec![0, 0, 0]);
        assert_eq!(space.exponents[1], vec![1, 0, 0]);
        assert_eq!(space.exponents[2], vec![0, 1, 0]);
        assert_eq!(space.exponents[3], vec![0, 0, 1]);
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        // f(x, y) = x^3 y + 2 x y^2 at (1.5, -0.5)
        let space = JetSpace::new(2, 4);
        let x = Jet::variable(&space, 0, 1.5);
        let y = Jet::variable(&space, 1, -0.5);
        let f = &(&(&x * &x) * &(&x * &y)) + &(&(&x * &y) * &y).scale(2.0);
        assert!((f.value() - c(1.5f64.powi(3) * -0.5 + 2.0 * 1.5 * 0.25, 0.0)).norm() < 1e-14);
        // ∂x: 3x^2 y + 2y^2
        assert!((f.derivative(&[0]).re - (3.0 * 2.25 * -0.5 + 0.5)).abs() < 1e-14);
        // ∂x∂y: 3x^2 + 4y
        assert!((f.derivative(&[0, 1]).re - (3.0 * 2.25 - 2.0)).abs() < 1e-14);
        // ∂x∂x∂x∂y = 6
        assert!((f.derivative(&[0, 0, 0, 1]).re - 6.0).abs() < 1e-13);
    }

    #[test]
    fn log_of_exp_is_identity() {
        let space = JetSpace::new(2, 4);
        let x = Jet::variable(&space, 0, c(0.3, 0.2));
        let y = Jet::variable(&space, 1, c(-0.1, 0.4));
        let f = &(&x * &y) + &x;
        let g = f.exp().ln();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn reciprocal_and_power_agree() {
        let space = JetSpace::new(2, 3);
        let x = Jet::variable(&space, 0, 0.7);
        let y = Jet::variable(&space, 1, 0.2);
        let f = &(&x * &x) + &y + 1.0;
        let a = f.recip();
        let b = f.powf(-1.0);
        let prod = &a * &f;
        for (p, q) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((p - q).norm() < 1e-13);
        }
        assert!((prod.value() - c(1.0, 0.0)).norm() < 1e-14);
        for coef in &prod.coeffs()[1..] {
            assert!(coef.norm() < 1e-13);
        }
    }

    #[test]
    fn cosine_derivatives() {
        let space = JetSpace::new(1, 4);
        let x = Jet::variable(&space, 0, 0.4);
        let f = x.cos();
        assert!((f.derivative(&[0]).re + 0.4f64.sin()).abs() < 1e-14);
        assert!((f.derivative(&[0, 0]).re + 0.4f64.cos()).abs() < 1e-14);
        assert!((f.derivative(&[0, 0, 0, 0]).re - 0.4f64.cos()).abs() < 1e-13);
        let s = x.sin();
        assert!((s.derivative(&[0, 0, 0]).re + 0.4f64.cos()).abs() < 1e-13);
    }

    #[test]
    fn wirtinger_derivative_of_modulus_squared() {
        // |z|^2 = z z̄ : ∂z = z̄, ∂z∂z̄ = 1
        let space = JetSpace::new(2, 2);
        let z0 = c(0.3, -0.4);
        let z = Jet::variable(&space, 0, z0);
        let zb = Jet::variable(&space, 1, z0.conj());
        let f = &z * &zb;
        assert!((f.derivative(&[0]) - z0.conj()).norm() < 1e-15);
        assert!((f.derivative(&[0, 1]) - c(1.0, 0.0)).norm() < 1e-15);
        let g = f.conjugate();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn differentiate_matches_partial() {
        let space = JetSpace::new(2, 4);
        let x = Jet::variable(&space, 0, 0.3);
        let y = Jet::variable(&space, 1, -0.7);
        let f = (&x * &y).exp();
        let fx = f.differentiate(0);
        assert!((fx.value() - f.derivative(&[0])).norm() < 1e-14);
        assert!((fx.derivative(&[1, 1]) - f.derivative(&[0, 1, 1])).norm() < 1e-13);
    }

    #[test]
    fn substitution_composes_polynomials() {
        // f(x) = exp(x) at x0 = 0.2, composed with x = 0.2 + t + t^2
        let s1 = JetSpace::new(1, 5);
        let f = Jet::variable(&s1, 0, 0.2).exp();
        let s2 = JetSpace::new(1, 3);
        let t = Jet::variable(&s2, 0, 0.0);
        let inc = &t + &(&t * &t);
        let g = f.substitute(&[inc]);
        // direct: exp(0.2 + t + t^2)
        let direct = (&(&t + &(&t * &t)) + 0.2).exp();
        for (a, b) in g.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn cached_spaces_are_shared() {
        let a = JetSpace::cached(3, 2);
        let b = JetSpace::cached(3, 2);
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn determinant_of_three_by_three() {
        let space = JetSpace::new(1, 2);
        let t = Jet::variable(&space, 0, 0.0);
        let one = Jet::constant(&space, 1.0);
        let zero = Jet::constant(&space, 0.0);
        // diag(1+t, 2, 1+t) plus an off-diagonal t in (0,2)
        let m = vec![
            &one + &t,
            zero.clone(),
            t.clone(),
            zero.clone(),
            Jet::constant(&space, 2.0),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            &one + &t,
        ];
        let d = jet_determinant(&m, 3);
        // 2 (1+t)^2
        assert!((d.value().re - 2.0).abs() < 1e-15);
        assert!((d.derivative(&[0]).re - 4.0).abs() < 1e-15);
        assert!((d.derivative(&[0, 0]).re - 4.0).abs() < 1e-15);
    }
}
