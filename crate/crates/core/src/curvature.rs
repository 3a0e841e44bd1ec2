//! Chern curvature of Kähler metrics and the functionals built on it.
//!
//! Conventions. With `H_{lm} = ω_{lm̄}`, the lowered curvature is
//!
//! ```text
//! R_{jk̄lm̄} = −∂_j∂̄_k H_{lm} + Σ_{p,q} ∂_j H_{lp} (H⁻¹)_{pq} ∂̄_k H_{qm}
//! ```
//!
//! and the endomorphism coefficients are `c_{jkal} = Σ_b R_{jk̄ab̄} (H⁻¹)_{bl}`.
//! The curvature functional is `Θ(v, w, x, y) = Σ R_{jk̄lm̄} v_j w̄_k x_l ȳ_m`,
//! so `HSC(v) = Θ(v,v,v,v)/‖v‖⁴`. With this sign the disc metric
//! `(1−|z|²)⁻²|dz|²` has HSC ≡ −2 and the Fubini–Study chart HSC ≡ +2.
//!
//! In a unitary frame (`H = I` at the point) `c = R` and the usual symmetries
//! `c_{jklm} = c_{lmjk} = c_{lkjm} = c_{jmlk} = conj(c_{kjml})` hold.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::MetricJet;
use crate::linalg::{self, c, CMatrix};

#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    n: usize,
    lowered: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    frame_gram: CMatrix,
}

#[inline]
fn idx(n: usize, j: usize, k: usize, l: usize, m: usize) -> usize {
    ((j * n + k) * n + l) * n + m
}

impl CurvatureTensor {
    /// Builds the tensor from lowered components `R_{jk̄lm̄}` (layout
    /// `[j][k][l][m]`) and the metric matrix at the point.
    pub fn from_lowered(n: usize, lowered: Vec<Complex64>, frame_gram: CMatrix) -> Result<Self> {
        if lowered.len() != n.pow(4) {
            return Err(Error::DimensionMismatch {
                expected: n.pow(4),
                got: lowered.len(),
            });
        }
        if frame_gram.nrows() != n || frame_gram.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: frame_gram.nrows(),
            });
        }
        let inv = linalg::inverse(&frame_gram)?;
        let mut coeffs = vec![c(0.0, 0.0); lowered.len()];
        for j in 0..n {
            for k in 0..n {
                for a in 0..n {
                    for l in 0..n {
                        let mut acc = c(0.0, 0.0);
                        for b in 0..n {
                            acc += lowered[idx(n, j, k, a, b)] * inv[(b, l)];
                        }
                        coeffs[idx(n, j, k, a, l)] = acc;
                    }
                }
            }
        }
        Ok(Self {
            n,
            lowered,
            coeffs,
            frame_gram,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &CMatrix {
        &self.frame_gram
    }

    /// Lowered component `R_{jk̄lm̄}`.
    pub fn lowered(&self, j: usize, k: usize, l: usize, m: usize) -> Complex64 {
        self.lowered[idx(self.n, j, k, l, m)]
    }

    pub fn lowered_slice(&self) -> &[Complex64] {
        &self.lowered
    }

    /// Endomorphism coefficient `c_{jkal}` (coincides with the lowered one in
    /// unitary frames).
    pub fn coeff(&self, j: usize, k: usize, a: usize, l: usize) -> Complex64 {
        self.coeffs[idx(self.n, j, k, a, l)]
    }

    /// `Θ(v, w, x, y) = Σ R_{jk̄lm̄} v_j w̄_k x_l ȳ_m`.
    pub fn theta(&self, v: &[Complex64], w: &[Complex64], x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let n = self.n;
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                let vw = v[j] * w[k].conj();
                if vw.norm_sqr() == 0.0 {
                    continue;
                }
                for l in 0..n {
                    for m in 0..n {
                        acc += self.lowered[idx(n, j, k, l, m)] * vw * x[l] * y[m].conj();
                    }
                }
            }
        }
        acc
    }

    pub fn norm_sq(&self, v: &[Complex64]) -> f64 {
        linalg::norm_sq(&self.frame_gram, v)
    }

    /// Largest violation of the Kähler symmetries of the lowered tensor, which
    /// hold in any holomorphic coordinates.
    pub fn kahler_symmetry_defect(&self) -> f64 {
        let n = self.n;
        let r = |j, k, l, m| self.lowered[idx(n, j, k, l, m)];
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        let x = r(j, k, l, m);
                        worst = worst
                            .max((x - r(l, m, j, k)).norm())
                            .max((x - r(l, k, j, m)).norm())
                            .max((x - r(j, m, l, k)).norm())
                            .max((x - r(k, j, m, l).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// For a diagonal gram `diag(λ)`, the largest violation of
    /// `c_{jklm} λ_m = c_{lmjk} λ_k`, the weighted form of the pairing symmetry
    /// for endomorphism coefficients. `None` when the gram is not diagonal.
    pub fn weighted_symmetry_defect(&self) -> Option<f64> {
        let n = self.n;
        let g = &self.frame_gram;
        let scale = g.norm().max(1.0);
        for i in 0..n {
            for j in 0..n {
                if i != j && g[(i, j)].norm() > 1e-12 * scale {
                    return None;
                }
            }
        }
        let lam: Vec<f64> = (0..n).map(|i| g[(i, i)].re).collect();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        let a = self.coeff(j, k, l, m) * lam[m];
                        let b = self.coeff(l, m, j, k) * lam[k];
                        worst = worst.max((a - b).norm());
                    }
                }
            }
        }
        Some(worst)
    }

    /// Distance of the gram matrix from the identity (max entry).
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.frame_gram[(i, j)] - c(target, 0.0)).norm());
            }
        }
        worst
    }

    /// The tensor in new coordinates `z = P w`: lowered components transform as
    /// `R'_{abcd} = Σ P_{ja} P̄_{kb} P_{lc} P̄_{md} R_{jklm}` and `G' = Pᵀ G P̄`.
    pub fn transformed(&self, p: &CMatrix) -> Result<Self> {
        let n = self.n;
        let pb = p.map(|x| x.conj());
        // contract one index at a time to keep the cost at n^5
        let mut t = self.lowered.clone();
        for slot in 0..4 {
            let mat = if slot % 2 == 0 { p } else { &pb };
            let mut out = vec![c(0.0, 0.0); t.len()];
            for i0 in 0..n {
                for i1 in 0..n {
                    for i2 in 0..n {
                        for i3 in 0..n {
                            let dst = [i0, i1, i2, i3];
                            let mut acc = c(0.0, 0.0);
                            for s in 0..n {
                                let mut src = dst;
                                src[slot] = s;
                                acc += mat[(s, dst[slot])] * t[idx(n, src[0], src[1], src[2], src[3])];
                            }
                            out[idx(n, i0, i1, i2, i3)] = acc;
                        }
                    }
                }
            }
            t = out;
        }
        Self::from_lowered(n, t, linalg::pull_metric(&self.frame_gram, p))
    }

    /// The same tensor expressed in a frame orthonormal for its gram.
    pub fn to_unitary_frame(&self) -> Result<Self> {
        let a = linalg::normalizing_transform(&self.frame_gram)?;
        self.transformed(&a)
    }
}

/// Chern curvature from metric jets of order at least two.
pub fn chern_curvature(jet: &MetricJet) -> Result<CurvatureTensor> {
    if jet.order < 2 {
        return Err(Error::UnsupportedOrder {
            requested: jet.order,
            max: 2,
        });
    }
    let n = jet.n;
    let inv = linalg::inverse(&jet.value)?;
    let mut lowered = vec![c(0.0, 0.0); n.pow(4)];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                for m in 0..n {
                    let mut acc = -jet.d2(j, k, l, m);
                    for p in 0..n {
                        let a = jet.d1(j, l, p);
                        if a.norm_sqr() == 0.0 {
                            continue;
                        }
                        for q in 0..n {
                            acc += a * inv[(p, q)] * jet.d1bar(k, q, m);
                        }
                    }
                    lowered[idx(n, j, k, l, m)] = acc;
                }
            }
        }
    }
    CurvatureTensor::from_lowered(n, lowered, jet.value.clone())
}

/// A directional curvature value and the size of its discarded imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Directional {
    pub value: f64,
    pub imag_residue: f64,
}

/// Imaginary residues above this indicate a tensor without Kähler symmetry.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-8;

pub fn hbc_directional(t: &CurvatureTensor, v: &[Complex64], w: &[Complex64]) -> Result<Directional> {
    if v.len() != t.n || w.len() != t.n {
        return Err(Error::DimensionMismatch {
            expected: t.n,
            got: v.len().min(w.len()),
        });
    }
    let nv = t.norm_sq(v);
    let nw = t.norm_sq(w);
    if nv <= 0.0 || nw <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let z = t.theta(v, v, w, w) / (nv * nw);
    Ok(Directional {
        value: z.re,
        imag_residue: z.im.abs(),
    })
}

/// Holomorphic bisectional curvature `Θ(v,v,w,w)/(‖v‖²‖w‖²)`.
pub fn hbc(t: &CurvatureTensor, v: &[Complex64], w: &[Complex64]) -> Result<f64> {
    Ok(hbc_directional(t, v, w)?.value)
}

/// Holomorphic sectional curvature, the diagonal of [`hbc`].
pub fn hsc(t: &CurvatureTensor, v: &[Complex64]) -> Result<f64> {
    hbc(t, v, v)
}

pub fn hsc_directional(t: &CurvatureTensor, v: &[Complex64]) -> Result<Directional> {
    hbc_directional(t, v, v)
}

#[derive(Debug, Clone)]
pub struct RicciData {
    /// `ρ_{jk}` with `Ric = (i/2π) Σ ρ_{jk} dz_j ∧ dz̄_k`.
    pub ricci: CMatrix,
    /// `(1/2π) Σ ρ_{jk} (H⁻¹)_{kj}`.
    pub scalar: f64,
}

/// Ricci coefficients by the endomorphism trace `ρ_{jk} = Σ_l c_{jkll}` taken
/// against the inverse metric, and the Chern scalar curvature.
pub fn ricci_and_scalar(t: &CurvatureTensor) -> Result<RicciData> {
    let n = t.n;
    let inv = linalg::inverse(&t.frame_gram)?;
    let ricci = CMatrix::from_fn(n, n, |j, k| (0..n).map(|l| t.coeff(j, k, l, l)).sum());
    let mut s = c(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            s += ricci[(j, k)] * inv[(k, j)];
        }
    }
    Ok(RicciData {
        ricci,
        scalar: s.re / std::f64::consts::TAU,
    })
}

/// Projects a raw tensor onto the Kähler-symmetric subspace by averaging over
/// the group generated by `j↔l`, `k↔m` and `R_{jklm} ↦ conj(R_{kjml})`.
pub fn kahler_symmetrize(n: usize, raw: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); raw.len()];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                for m in 0..n {
                    let r = |a, b, c_, d| raw[idx(n, a, b, c_, d)];
                    let plain = r(j, k, l, m) + r(l, k, j, m) + r(j, m, l, k) + r(l, m, j, k);
                    let conj = r(k, j, m, l).conj() + r(k, l, m, j).conj() + r(m, j, k, l).conj() + r(m, l, k, j).conj();
                    out[idx(n, j, k, l, m)] = (plain + conj) / 8.0;
                }
            }
        }
    }
    out
}

/// Constant-HSC tensor `R = (h/2)(δ_{jk}δ_{lm} + δ_{jm}δ_{lk})` in a unitary
/// frame; its holomorphic sectional curvature is `h` in every direction.
pub fn space_form_tensor(n: usize, h: f64) -> CurvatureTensor {
    let mut lowered = vec![c(0.0, 0.0); n.pow(4)];
    for j in 0..n {
        for l in 0..n {
            lowered[idx(n, j, j, l, l)] += c(h / 2.0, 0.0);
            lowered[idx(n, j, l, l, j)] += c(h / 2.0, 0.0);
        }
    }
    CurvatureTensor::from_lowered(n, lowered, CMatrix::identity(n, n)).expect("identity gram")
}

/// Gaussian tensor symmetrized to Kähler symmetry, identity gram.
pub fn random_kahler_tensor<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CurvatureTensor {
    let raw = linalg::complex_gaussian_vector(n.pow(4), rng);
    CurvatureTensor::from_lowered(n, kahler_symmetrize(n, &raw), CMatrix::identity(n, n)).expect("identity gram")
}

/// `space_form(h) + spread · random` in a unitary frame.
pub fn perturbed_space_form<R: Rng + ?Sized>(n: usize, h: f64, spread: f64, rng: &mut R) -> CurvatureTensor {
    let base = space_form_tensor(n, h);
    let noise = random_kahler_tensor(n, rng);
    let lowered = base
        .lowered
        .iter()
        .zip(&noise.lowered)
        .map(|(a, b)| a + b * spread)
        .collect();
    CurvatureTensor::from_lowered(n, lowered, CMatrix::identity(n, n)).expect("identity gram")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ChartPoint, ModelMetric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_curvature_vanishes() {
        let m = ModelMetric::flat(2).field();
        let t = chern_curvature(&m.evaluate_jet(&ChartPoint::origin(2), 2).unwrap()).unwrap();
        assert!(t.lowered.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn space_form_has_constant_hsc() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = space_form_tensor(3, -1.5);
        for _ in 0..20 {
            let v = linalg::complex_gaussian_vector(3, &mut rng);
            assert!((hsc(&t, &v).unwrap() + 1.5).abs() < 1e-13);
        }
    }

    #[test]
    fn symmetrized_tensor_has_kahler_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_kahler_tensor(3, &mut rng);
        assert!(t.kahler_symmetry_defect() < 1e-14);
    }

    #[test]
    fn hsc_rejects_zero_vector() {
        let t = space_form_tensor(2, 1.0);
        assert_eq!(hsc(&t, &[c(0.0, 0.0), c(0.0, 0.0)]), Err(Error::ZeroVector));
    }

    #[test]
    fn transformation_preserves_hsc() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_kahler_tensor(2, &mut rng);
        let p = CMatrix::from_fn(2, 2, |_, _| linalg::complex_gaussian(&mut rng));
        let tp = t.transformed(&p).unwrap();
        let w = linalg::complex_gaussian_vector(2, &mut rng);
        let v: Vec<Complex64> = (0..2).map(|i| (0..2).map(|a| p[(i, a)] * w[a]).sum()).collect();
        assert!((hsc(&t, &v).unwrap() - hsc(&tp, &w).unwrap()).abs() < 1e-12);
        assert!(tp.kahler_symmetry_defect() < 1e-12);
    }
}
