//! Frozen registry of claim ids.
//!
//! Every report emitted by this crate or by the command-line verifier carries
//! one of these ids. The orientation string says how `slack` is computed.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub statement: &'static str,
    pub formula: &'static str,
    pub orientation: &'static str,
}

const GE: &str = "slack = lhs - rhs";
const LE: &str = "slack = rhs - lhs";
const EQ: &str = "slack = -|lhs - rhs|";
const AGG: &str = "worst child";

macro_rules! claim {
    ($id:expr, $st:expr, $f:expr, $o:expr) => {
        Claim {
            id: $id,
            statement: $st,
            formula: $f,
            orientation: $o,
        }
    };
}

pub static REGISTRY: &[Claim] = &[
    claim!("averages.broken-symmetry", "scalar averaging identity detects a broken Kähler symmetry", "defect > tol when c_1221 != c_1122", GE),
    claim!("averages.hbc-ricci", "Ricci form as the sphere average of bisectional curvature", "avg_w HBC(v,w) = rho(v,v)/(n |v|^2)", EQ),
    claim!("averages.hsc-scalar", "scalar curvature as the sphere average of sectional curvature", "avg_v HSC(v) = 4 pi scal / (n(n+1))", EQ),
    claim!("averages.moment-monte-carlo", "Monte Carlo fourth moments on the unit sphere", "|MC - exact| <= 4 sigma", EQ),
    claim!("averages.moment-table", "exact second and fourth moments on the unit sphere", "1/n, 2/(n(n+1)), 1/(n(n+1))", EQ),
    claim!("curvature.diagonal-restriction", "bisectional curvature restricts to sectional curvature", "HBC(v,v) = HSC(v)", EQ),
    claim!("curvature.einstein", "Einstein constant of the constant-curvature models", "rho = 2 pi c H", EQ),
    claim!("curvature.hsc-oracle", "sectional curvature of constant-curvature models", "HSC = closed-form constant", EQ),
    claim!("curvature.kahler-symmetry", "weighted Kähler symmetry of the curvature coefficients", "defect <= 1e-8", LE),
    claim!("curvature.ricci-logdet", "Ricci form from the log-determinant", "rho = -ddbar log det H (relative)", LE),
    claim!("curvature.sign-catalog", "sign of sectional curvature on the model catalog", "sign(HSC) as catalogued", GE),
    claim!("geometry.kahler-closedness", "closedness of the Kähler form", "d_j H_lm = d_l H_jm", LE),
    claim!("hyperbolicity.algebraic-criterion", "genus-degree inequality for curves under HSC <= -kappa", "2g - 2 >= kappa deg / 2pi + sum(m_p - 1)", GE),
    claim!("hyperbolicity.distance-isometry", "Poincaré distance is invariant under disc automorphisms", "rho(f z, f w) = rho(z, w)", EQ),
    claim!("hyperbolicity.distance-triangle", "triangle inequality for the Poincaré distance", "rho(z,w) <= rho(z,x) + rho(x,w)", LE),
    claim!("hyperbolicity.expected-obstruction", "curves that the criterion must obstruct", "2g - 2 < kappa deg / 2pi + sum(m_p - 1)", LE),
    claim!("hyperbolicity.hurwitz", "degree of the tangent bundle of a curve", "deg T_C = 2 - 2g", EQ),
    claim!("hyperbolicity.monotonicity", "obstruction is monotone in kappa, degree and multiplicity", "no obstructed -> consistent flip", GE),
    claim!("hyperbolicity.pluecker", "genus of a smooth plane curve", "(d-1)(d-2)/2", EQ),
    claim!("hyperbolicity.schwarz-pick", "holomorphic self-maps of the disc contract distance", "rho(f z, f w) <= rho(z, w)", LE),
    claim!("hyperbolicity.subharmonicity", "lower bound for the Laplacian of log(|f'|^2 + eps) along a disc", "ddbar psi >= (k a^3 + eps(|phi'|^2 + k a^2))/(a + eps)^2", GE),
    claim!("hyperbolicity.subharmonicity-strict", "strict subharmonicity off the zeros of f' when kappa > 0", "ddbar psi > 0", GE),
    claim!("hyperbolicity.surface-example", "constraints of the fibred surface example", "all constraints", AGG),
    claim!("hyperbolicity.surface-rejection", "each single-constraint violation is rejected", "failing constraint = intended one", EQ),
    claim!("ma.chain-negative-control", "inflated curvature breaks the integral chain", "C kappa' (n+1)/(2n) > 2 pi", GE),
    claim!("ma.cohomological-integral", "volume of the twisted form equals its cohomological value", "int w_eps^n = eps^n int w^n", LE),
    claim!("ma.elementary-inequality", "trace inequality between w and w_eps", "tr_w w_eps <= (tr_{w_eps} w)^{n-1} e^u / (n-1)!", GE),
    claim!("ma.eps-sweep", "behaviour of the twisted family as eps decreases", "all sweep checks", AGG),
    claim!("ma.flat-constant", "constant solution on the flat background", "u = n log eps", LE),
    claim!("ma.grid-convergence", "self-convergence of the solution under grid doubling", "|u_N - u_2N| <= 1e-6", LE),
    claim!("ma.integral-chain", "algebraic chain from the integral inequality", "C_eps (n+1) kappa / (2n) <= 2 pi", LE),
    claim!("ma.integral-inequality", "integral inequality on a constant negative curvature chart", "all surrogate checks", AGG),
    claim!("ma.integral-inequality-surrogate", "weighted integral inequality", "int (n+1)k/(2n) S_eps w_eps^n <= 2 pi int w_eps^n", LE),
    claim!("ma.integral-slope", "log-log slope of the volume against eps", "slope = n", EQ),
    claim!("ma.ke-relation", "twisted Kähler-Einstein relation", "Ric(w_eps) = -w_eps + eps w", LE),
    claim!("ma.quadratic-convergence", "Newton residual ratios at the end of the solve", "r_{k+1}/r_k <= 0.1", LE),
    claim!("ma.solution", "Monge-Ampère solve residual", "det H_eps = e^u det H", LE),
    claim!("ma.sup-bound", "uniform upper bound on the solution", "sup u <= log max det(eps0 H - rho/2pi)/det H", LE),
    claim!("ma.sup-bound-negative-control", "shifted solution violates the upper bound", "sup(u + 2|C| + 1) > C", GE),
    claim!("ma.sup-lower-bound", "lower bound on sup u from the integral chain", "sup u >= -n log(4 pi n/((n+1) kappa))", GE),
    claim!("ma.sup-lower-bound-formula", "arithmetic of the lower bound on sup u", "-n log(4 pi n/((n+1) kappa))", EQ),
    claim!("ma.surrogate-residual", "residual of the constant solution on the model chart", "|log det H_eps - u - log det H| <= 1e-10", LE),
    claim!("ma.sweep-monotone", "volumes decrease along the sweep", "int w_eps^n decreasing in eps", GE),
    claim!("ma.sweep-sup-bound", "one upper bound for the whole sweep", "sup u_eps <= C for all eps < eps0", LE),
    claim!("ma.torus-solve", "solve on the perturbed torus", "residual <= 1e-10", LE),
    claim!("ma.two-start", "uniqueness probe from two initial guesses", "|u_a - u_b| <= 1e-9", LE),
    claim!("royden.general-bound", "polarization bound for any curvature bound K", "sum Theta(a,a,b,b) <= K/2 ((sum|x|^2)^2 + sum|x|^4)", LE),
    claim!("royden.inequality", "polarization bounds for one form and frame", "all applicable bounds", AGG),
    claim!("royden.nonpositive-bound", "polarization bound for K <= 0", "sum Theta(a,a,b,b) <= (nu+1)/(2nu) K (sum|x|^2)^2", LE),
    claim!("royden.polarization", "fourth-roots-of-unity average equals the surviving terms", "full sum = reduced sum", EQ),
    claim!("royden.single-vector", "one-vector frame reduces to the hypothesis", "bound = K |x|^4", EQ),
    claim!("royden.sweep", "randomized sweep of the polarization bounds", "zero violations", LE),
    claim!("schwarz.estimate-lemmas", "three pointwise estimates for the trace", "all three terms", AGG),
    claim!("schwarz.inflated-kappa", "inflated curvature constant breaks the inequality", "violation expected", GE),
    claim!("schwarz.laplacian-equality", "Laplacian of the trace in normal coordinates", "-Lap S = sum rho'/l^2 + sum |d w'|^2/(...) - sum R/(l l)", EQ),
    claim!("schwarz.lemma-chain", "the three estimates imply the log-trace inequality", "lemmas pass => inequality passes", AGG),
    claim!("schwarz.lemma-matrix", "estimates and inequality over the pair matrix", "zero violations", AGG),
    claim!("schwarz.log-trace-inequality", "differential inequality for log of the trace", "-Lap log S >= (k(n+1)/(2n) + 2 pi mu/n) S - 2 pi lambda", GE),
    claim!("schwarz.quasi-negative", "pointwise inequality in the quasi-negative normalisation", "Lap T >= ((n+1)k/(2n) + eps/n) e^T - 1", GE),
    claim!("schwarz.quasi-negative-minoration", "weaker minoration of the quasi-negative inequality", "Lap T >= M e^T - 1", GE),
    claim!("schwarz.sharpness", "sharpness of the log-trace inequality on equality models", "holds at kappa, fails when inflated", AGG),
    claim!("schwarz.term1", "Ricci lower bound estimate", "sum rho'_ll/l^2 >= 2 pi(-lambda S + mu S^2/n)", GE),
    claim!("schwarz.term2", "gradient minoration", "sum |d w'|^2/(...) >= (1/S) sum |dS|^2/l", GE),
    claim!("schwarz.term3", "curvature term bounded by the HSC constant", "sum R_jjll/(l_j l_l) <= -k(n+1)/(2n) S^2", LE),
    claim!("schwarz.trace-dual-path", "trace by eigenvalues and by the form ratio", "sum 1/l = d/dt det(H' + tH)/det H'", EQ),
    claim!("schwarz.trace-lemma", "lower bound of log trace by the volume ratio", "log sum 1/l > -u/n", GE),
    claim!("schwarz.trace-lemma-sweep", "randomized sweep of the trace lemma", "zero strict violations", GE),
    claim!("schwarz.two-pi-convention", "two normalisations of the log-trace inequality agree", "2 pi Lap_q T = -Lap log S", EQ),
    claim!("surface.a-below-b", "singularity type has a < b", "b - a >= 1", GE),
    claim!("surface.a-large", "multiplicity large enough to obstruct the special fibre", "a >= 2g", GE),
    claim!("surface.a-positive", "singularity type has a > 0", "a >= 1", GE),
    claim!("surface.coprime", "singularity type is coprime", "gcd(a, b) = 1", EQ),
    claim!("surface.degree", "plane curve degree", "d >= 4", GE),
    claim!("surface.fibre-genera", "every fibre has genus at least 2", "min genus >= 2", GE),
    claim!("surface.genus", "genus of the special fibre", "g >= 2", GE),
    claim!("surface.special-fibre-obstructed", "special fibre violates the criterion", "2g - 2 < a - 1", LE),
];

pub fn lookup(id: &str) -> Option<&'static Claim> {
    REGISTRY.binary_search_by(|c| c.id.cmp(id)).ok().map(|i| &REGISTRY[i])
}
