//! Conditional entropy H(C|E) of binary cq-states through the error curve
//! s ↦ p_err of discriminating {s ω₀, (1−s) ω₁}, plus closed-form bounds and
//! the binary entropy of the advantage-distillation error rate.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use crate::classical_ht::ErrorBracket;
use crate::discrimination::{err_lower_fidelity, err_lower_symmetry, helstrom_error_weighted};
use crate::matcore::{chernoff_q, petz_q, DensityMatrix, MAX_TENSOR_DIM};
use crate::{domain, Error, Result};

/// Integral of a bracketed curve: lower and upper ends include the quadrature
/// error estimate and the truncated tail.
pub type EntropyBracket = ErrorBracket;

/// Classical register with priors, and one state of E per symbol.
#[derive(Clone, Debug)]
pub struct CqState {
    priors: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl CqState {
    pub fn new(priors: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if priors.len() != states.len() || priors.is_empty() {
            return Err(Error::DimensionMismatch(priors.len(), states.len()));
        }
        if priors.iter().any(|&p| !(p >= 0.0)) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution("priors must be nonnegative and sum to 1".into()));
        }
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch(d, s.dim()));
        }
        Ok(Self { priors, states })
    }

    pub fn binary(prior_0: f64, state_0: DensityMatrix, state_1: DensityMatrix) -> Result<Self> {
        Self::new(vec![prior_0, 1.0 - prior_0], vec![state_0, state_1])
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("binary entropy needs x in [0,1], got {x}"));
    }
    Ok(h2_unchecked(x))
}

fn h2_unchecked(x: f64) -> f64 {
    // (1−x)·log₂(1−x) through ln_1p keeps the x/ln 2 term for tiny x.
    let rest = if x < 1.0 { -(1.0 - x) * (-x).ln_1p() / LN_2 } else { 0.0 };
    -xlog2x(x) + rest
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    -rho.eigenvalues().iter().map(|&l| xlog2x(l)).sum::<f64>()
}

/// H(C|E) = H(CE) − H(E) from eigenvalues. H(CE) is block diagonal.
pub fn exact_cond_entropy(rho: &CqState) -> Result<f64> {
    let total = rho.priors.len() as u128 * rho.states[0].dim() as u128;
    if total > MAX_TENSOR_DIM as u128 {
        return Err(Error::Guard {
            what: "cq-state dimension",
            requested: total,
            limit: MAX_TENSOR_DIM as u128,
        });
    }
    let mut h_ce = 0.0;
    for (&p, w) in rho.priors.iter().zip(&rho.states) {
        if p > 0.0 {
            h_ce += -xlog2x(p) + p * von_neumann_entropy(w);
        }
    }
    let d = rho.states[0].dim();
    let mut avg = crate::CMatrix::zeros(d, d);
    for (&p, w) in rho.priors.iter().zip(&rho.states) {
        avg += w.matrix().scale(p);
    }
    let h_e = von_neumann_entropy(&DensityMatrix::new(avg)?);
    Ok(h_ce - h_e)
}

/// Error of discriminating {s ω₀, (1−s) ω₁} as a function of the prior s.
/// Values must lie in [0, min(s, 1−s)].
pub trait ErrorCurve: Sync {
    fn perr(&self, s: f64) -> ErrorBracket;
}

impl<F: Fn(f64) -> ErrorBracket + Sync> ErrorCurve for F {
    fn perr(&self, s: f64) -> ErrorBracket {
        self(s)
    }
}

/// Exact Helstrom curve of a pair of states.
#[derive(Clone, Debug)]
pub struct HelstromCurve {
    state_0: DensityMatrix,
    state_1: DensityMatrix,
}

impl HelstromCurve {
    pub fn new(state_0: DensityMatrix, state_1: DensityMatrix) -> Result<Self> {
        if state_0.dim() != state_1.dim() {
            return Err(Error::DimensionMismatch(state_0.dim(), state_1.dim()));
        }
        Ok(Self { state_0, state_1 })
    }
}

impl ErrorCurve for HelstromCurve {
    fn perr(&self, s: f64) -> ErrorBracket {
        let e = helstrom_error_weighted(s, &self.state_0, 1.0 - s, &self.state_1).expect("dimensions checked");
        ErrorBracket::exact(e)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    /// Number of dyadic panels [2^{−k−1}, 2^{−k}], k = 1..=panels, toward each end.
    pub panels: usize,
    /// Target absolute error of the whole integral.
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            panels: 48,
            tol: 1e-7,
            max_depth: 40,
        }
    }
}

impl QuadConfig {
    pub fn with_panels(panels: usize) -> Self {
        Self {
            panels,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.panels == 0 || self.panels > 1000 {
            return domain(format!("panel count {} outside 1..=1000", self.panels));
        }
        if !(self.tol > 0.0) {
            return domain("quadrature tolerance must be positive");
        }
        Ok(())
    }

    /// Width of the untreated interval next to each endpoint.
    pub fn floor(&self) -> f64 {
        0.5f64.powi(self.panels as i32 + 1)
    }
}

const GL_ORDER: usize = 32;
const QUAD_NOISE: f64 = 1e-13;

fn gauss_legendre() -> &'static [(f64, f64); GL_ORDER] {
    static NODES: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_ORDER;
        let mut out = [(0.0, 0.0); GL_ORDER];
        for i in 0..n / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            out[i] = (-x, w);
            out[n - 1 - i] = (x, w);
        }
        out
    })
}

#[derive(Clone, Copy, Default)]
struct Pair {
    lo: f64,
    hi: f64,
}

struct Integrator<'a, F> {
    f: &'a F,
    tol_density: f64,
    max_depth: u32,
    err: Pair,
}

impl<F: Fn(f64) -> Result<Pair>> Integrator<'_, F> {
    fn gl(&self, a: f64, b: f64) -> Result<Pair> {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = Pair::default();
        for &(x, w) in gauss_legendre() {
            let v = (self.f)(c + r * x)?;
            acc.lo += w * v.lo;
            acc.hi += w * v.hi;
        }
        Ok(Pair {
            lo: acc.lo * r,
            hi: acc.hi * r,
        })
    }

    fn adapt(&mut self, a: f64, b: f64, whole: Pair, depth: u32) -> Result<Pair> {
        let m = 0.5 * (a + b);
        let left = self.gl(a, m)?;
        let right = self.gl(m, b)?;
        let halves = Pair {
            lo: left.lo + right.lo,
            hi: left.hi + right.hi,
        };
        let diff_lo = (whole.lo - halves.lo).abs();
        let diff_hi = (whole.hi - halves.hi).abs();
        let diff = diff_lo.max(diff_hi);
        // Curve values carry ~1e-16 absolute round-off, which the 1/s weight
        // turns into noise of relative size 1e-16/s; stop refining below it.
        let noise = QUAD_NOISE * (b - a) / a;
        let allowed = (self.tol_density * (b - a)).max(0.1 * (halves.hi - halves.lo)).max(noise);
        if diff <= allowed || depth >= self.max_depth {
            self.err.lo += diff_lo;
            self.err.hi += diff_hi;
            return Ok(halves);
        }
        let l = self.adapt(a, m, left, depth + 1)?;
        let r = self.adapt(m, b, right, depth + 1)?;
        Ok(Pair {
            lo: l.lo + r.lo,
            hi: l.hi + r.hi,
        })
    }
}

/// ∫₀¹ g(s) ds for g bounded by `bound` near both ends, where `g(a, ā)`
/// receives s and 1−s separately so that values next to s = 1 stay accurate.
fn integrate_unit<G>(g: G, bound: f64, cfg: &QuadConfig) -> Result<EntropyBracket>
where
    G: Fn(f64, f64) -> Result<Pair>,
{
    cfg.validate()?;
    // Fold (½, 1) onto (0, ½].
    let folded = |u: f64| -> Result<Pair> {
        let ubar = 1.0 - u;
        let x = g(u, ubar)?;
        let y = g(ubar, u)?;
        Ok(Pair {
            lo: x.lo + y.lo,
            hi: x.hi + y.hi,
        })
    };
    let mut it = Integrator {
        f: &folded,
        tol_density: cfg.tol / 0.5,
        max_depth: cfg.max_depth,
        err: Pair::default(),
    };
    let mut total = Pair::default();
    let mut b = 0.5;
    for _ in 0..cfg.panels {
        let a = 0.5 * b;
        let whole = it.gl(a, b)?;
        let v = it.adapt(a, b, whole, 0)?;
        total.lo += v.lo;
        total.hi += v.hi;
        b = a;
    }
    let tail = 2.0 * bound * b;
    Ok(ErrorBracket {
        lower: total.lo - it.err.lo,
        upper: total.hi + it.err.hi + tail,
    })
}

fn checked_curve(curve: &dyn ErrorCurve, s: f64, s_bar: f64) -> Result<Pair> {
    let v = curve.perr(s);
    if !v.lower.is_finite() || !v.upper.is_finite() {
        return Err(Error::NonFinite(format!("error curve at s = {s}")));
    }
    let cap = s.min(s_bar);
    Ok(Pair {
        lo: v.lower.clamp(0.0, cap),
        hi: v.upper.clamp(0.0, cap),
    })
}

/// Uniform-prior representation H(C|E) = ∫₀¹ [p_err(s) + p_err(1−s)]/(2 s ln 2) ds.
pub fn entropy_integral(curve: &dyn ErrorCurve, cfg: &QuadConfig) -> Result<EntropyBracket> {
    let g = |s: f64, s_bar: f64| -> Result<Pair> {
        let a = checked_curve(curve, s, s_bar)?;
        let b = checked_curve(curve, s_bar, s)?;
        let k = 1.0 / (2.0 * s * LN_2);
        Ok(Pair {
            lo: (a.lo + b.lo) * k,
            hi: (a.hi + b.hi) * k,
        })
    };
    integrate_unit(g, 1.0 / LN_2, cfg)
}

/// General-prior representation
/// ∫₀¹ [1 − ‖s p₀ω₀ − (1−s)p₁ω₁‖₁ − ‖s p₁ω₁ − (1−s)p₀ω₀‖₁]/(2 s ln 2) ds.
pub fn entropy_integral_general(
    prior_0: f64,
    state_0: &DensityMatrix,
    state_1: &DensityMatrix,
    cfg: &QuadConfig,
) -> Result<EntropyBracket> {
    if !(0.0..=1.0).contains(&prior_0) {
        return domain(format!("prior {prior_0} outside [0,1]"));
    }
    if state_0.dim() != state_1.dim() {
        return Err(Error::DimensionMismatch(state_0.dim(), state_1.dim()));
    }
    let p1 = 1.0 - prior_0;
    let g = |s: f64, s_bar: f64| -> Result<Pair> {
        let e1 = helstrom_error_weighted(s * prior_0, state_0, s_bar * p1, state_1)?;
        let e2 = helstrom_error_weighted(s * p1, state_1, s_bar * prior_0, state_0)?;
        let v = (e1 + e2) / (s * LN_2);
        Ok(Pair { lo: v, hi: v })
    };
    integrate_unit(g, 2.0 / LN_2, cfg)
}

/// 1 − h₂(½ + F/2).
pub fn bound_fidelity_entropy(fid: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fid) {
        return domain(format!("fidelity {fid} outside [0,1]"));
    }
    Ok(one_minus_h2_centred(fid))
}

/// 1 − h₂((1+x)/2) = [(1+x)ln(1+x) + (1−x)ln(1−x)]/(2 ln 2) without the
/// cancellation of the direct difference; small x uses Σ x^{2k}/(k(2k−1)).
fn one_minus_h2_centred(x: f64) -> f64 {
    if x >= 1.0 {
        return 1.0;
    }
    let num = if x < 0.25 {
        let x2 = x * x;
        let mut pow = x2;
        let mut sum = 0.0;
        for k in 1..=40 {
            let kf = k as f64;
            let term = pow / (kf * (2.0 * kf - 1.0));
            sum += term;
            if term <= 1e-18 * sum {
                break;
            }
            pow *= x2;
        }
        sum
    } else {
        (1.0 + x) * x.ln_1p() + (1.0 - x) * (-x).ln_1p()
    };
    num / (2.0 * LN_2)
}

/// 2·p_err(½).
pub fn bound_minentropy_entropy(p_err_half: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_err_half) {
        return domain(format!("error {p_err_half} outside [0,1/2]"));
    }
    Ok(2.0 * p_err_half)
}

/// Integral of the pointwise maximum of the fidelity and symmetry error curves.
/// Never below either closed-form bound, which are the integrals of the two curves.
pub fn bound_combined(fid: f64, p_err_half: f64, cfg: &QuadConfig) -> Result<f64> {
    let bf = bound_fidelity_entropy(fid)?;
    let bm = bound_minentropy_entropy(p_err_half)?;
    let curve = |s: f64| ErrorBracket::exact(err_lower_fidelity(s, fid).max(err_lower_symmetry(s, p_err_half)));
    let v = entropy_integral(&curve, cfg)?;
    Ok(v.lower.max(bf).max(bm).min(1.0))
}

/// π·Q_α/(2 ln 2 · sin πα).
pub fn bound_upper_renyi(alpha: f64, q_alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0,1), got {alpha}"));
    }
    if !(q_alpha >= 0.0) {
        return domain("overlap must be nonnegative");
    }
    Ok(PI * q_alpha / (2.0 * LN_2 * (PI * alpha).sin()))
}

/// Smallest [`bound_upper_renyi`] over α ∈ {0.05, …, 0.95} and the Chernoff α.
/// Returns (bound, α).
pub fn bound_upper_renyi_min(state_0: &DensityMatrix, state_1: &DensityMatrix) -> Result<(f64, f64)> {
    let (_, a_star) = chernoff_q(state_0, state_1)?;
    let mut best = (f64::INFINITY, 0.5);
    let grid = (1..20).map(|k| k as f64 * 0.05);
    for a in grid.chain(std::iter::once(a_star)) {
        if !(a > 0.0 && a < 1.0) {
            continue;
        }
        let v = bound_upper_renyi(a, petz_q(a, state_0, state_1)?)?;
        if v < best.0 {
            best = (v, a);
        }
    }
    Ok(best)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&eps) {
        return domain(format!("error rate {eps} outside [0,1/2]"));
    }
    Ok(())
}

/// ln δₙ with δₙ = εⁿ/((1−ε)ⁿ + εⁿ).
pub fn ln_delta_n(eps: f64, n: usize) -> Result<f64> {
    check_eps(eps)?;
    if n == 0 {
        return domain("block length must be >= 1");
    }
    if eps == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let x = n as f64 * ((1.0 - eps).ln() - eps.ln());
    // −softplus(x)
    Ok(if x > 0.0 { -x - (-x).exp().ln_1p() } else { -x.exp().ln_1p() })
}

pub fn delta_n(eps: f64, n: usize) -> Result<f64> {
    Ok(ln_delta_n(eps, n)?.exp())
}

const SMALL_DELTA_LN: f64 = -644.7; // ln(1e-280)

/// ln h₂(δ) from ln δ, δ ∈ [0, ½]; uses h₂(δ) ≈ δ(1 − ln δ)/ln 2 once δ underflows.
pub fn ln_binary_entropy_from_ln(ln_delta: f64) -> f64 {
    if ln_delta == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if ln_delta < SMALL_DELTA_LN {
        return ln_delta + (1.0 - ln_delta).ln() - LN_2.ln();
    }
    h2_unchecked(ln_delta.exp()).ln()
}

/// h₂(δₙ).
pub fn h2_delta_n(eps: f64, n: usize) -> Result<f64> {
    Ok(ln_binary_entropy_from_ln(ln_delta_n(eps, n)?).exp())
}

/// h₂(δₙ) / (−n βⁿ log₂ β) with β = ε/(1−ε), evaluated in logs.
pub fn h2_delta_asymptote_ratio(eps: f64, n: usize) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return domain(format!("asymptote needs eps in (0,1/2), got {eps}"));
    }
    let ln_h = ln_binary_entropy_from_ln(ln_delta_n(eps, n)?);
    let ln_beta = eps.ln() - (1.0 - eps).ln();
    let ln_den = (n as f64).ln() + n as f64 * ln_beta + (-ln_beta / LN_2).ln();
    Ok((ln_h - ln_den).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bloch(x: f64, y: f64, z: f64) -> DensityMatrix {
        DensityMatrix::from_bloch(x, y, z).unwrap()
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let nodes = gauss_legendre();
        let w: f64 = nodes.iter().map(|n| n.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
        let x62: f64 = nodes.iter().map(|&(x, w)| w * x.powi(62)).sum();
        assert!((x62 - 2.0 / 63.0).abs() < 1e-14);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(0.842).unwrap() - 0.629503).abs() < 1e-6);
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn exact_entropy_examples() {
        let a = bloch(0.3, 0.1, 0.2);
        let same = CqState::binary(0.5, a.clone(), a).unwrap();
        assert!((exact_cond_entropy(&same).unwrap() - 1.0).abs() < 1e-12);
        let orth = CqState::binary(0.5, bloch(0.0, 0.0, 1.0), bloch(0.0, 0.0, -1.0)).unwrap();
        assert!(exact_cond_entropy(&orth).unwrap().abs() < 1e-12);
    }

    #[test]
    fn integral_examples() {
        let cfg = QuadConfig::default();
        let ident = |s: f64| ErrorBracket::exact(s.min(1.0 - s));
        let v = entropy_integral(&ident, &cfg).unwrap();
        assert!((v.lower - 1.0).abs() < 1e-10 && (v.upper - 1.0).abs() < 1e-10);
        let zero = |_s: f64| ErrorBracket::exact(0.0);
        let v = entropy_integral(&zero, &cfg).unwrap();
        assert_eq!(v.lower, 0.0);
        assert!(v.upper < 1e-14);
        let nan = |_s: f64| ErrorBracket::exact(f64::NAN);
        assert!(matches!(entropy_integral(&nan, &cfg), Err(Error::NonFinite(_))));
    }

    #[test]
    fn general_integral_examples() {
        let cfg = QuadConfig::default();
        let a = bloch(0.0, 0.0, 1.0);
        let b = bloch(0.5, 0.0, 0.3);
        assert!(entropy_integral_general(1.0, &a, &b, &cfg).unwrap().upper.abs() < 1e-12);
        let v = entropy_integral_general(0.5, &b, &b, &cfg).unwrap();
        assert!((v.midpoint() - 1.0).abs() < 1e-9);
        let exact = exact_cond_entropy(&CqState::binary(0.3, a.clone(), b.clone()).unwrap()).unwrap();
        let v = entropy_integral_general(0.3, &a, &b, &cfg).unwrap();
        assert!((v.midpoint() - exact).abs() < 1e-6, "{v:?} vs {exact}");
    }

    #[test]
    fn closed_form_examples() {
        assert!(bound_fidelity_entropy(0.0).unwrap().abs() < 1e-15);
        assert_eq!(bound_fidelity_entropy(1.0).unwrap(), 1.0);
        assert!((bound_fidelity_entropy(0.684).unwrap() - 0.370497).abs() < 1e-6);
        // Small F: value ≈ F²/(2 ln 2), which the plain difference would lose.
        let tiny = bound_fidelity_entropy(1e-9).unwrap();
        assert!((tiny / (1e-18 / (2.0 * LN_2)) - 1.0).abs() < 1e-12);
        for f in [0.2, 0.25, 0.3, 0.9] {
            let direct = 1.0 - binary_entropy(0.5 + 0.5 * f).unwrap();
            assert!((bound_fidelity_entropy(f).unwrap() - direct).abs() < 1e-15);
        }
        assert_eq!(bound_minentropy_entropy(0.0).unwrap(), 0.0);
        assert_eq!(bound_minentropy_entropy(0.5).unwrap(), 1.0);
        assert!((bound_minentropy_entropy(0.14645).unwrap() - 0.29290).abs() < 1e-12);
        let cfg = QuadConfig::default();
        assert!((bound_combined(1.0, 0.0, &cfg).unwrap() - 1.0).abs() < 1e-9);
        assert!(bound_combined(0.0, 0.0, &cfg).unwrap().abs() < 1e-12);
        assert_eq!(bound_upper_renyi(0.3, 0.0).unwrap(), 0.0);
        assert!((bound_upper_renyi(0.5, 1.0).unwrap() - PI / (2.0 * LN_2)).abs() < 1e-15);
        assert!(bound_upper_renyi(0.0, 1.0).is_err());
    }

    #[test]
    fn delta_examples() {
        for n in [1, 7, 1000] {
            assert!((delta_n(0.5, n).unwrap() - 0.5).abs() < 1e-15);
        }
        assert_eq!(delta_n(0.0, 3).unwrap(), 0.0);
        assert!((delta_n(0.1, 2).unwrap() - 0.01 / 0.82).abs() < 1e-15);
        let ln = ln_delta_n(0.1, 1000).unwrap();
        assert!((ln / 10f64.ln() + 954.2).abs() < 0.1);
        assert!(ln_delta_n(0.6, 1).is_err());
    }

    #[test]
    fn asymptote_examples() {
        let r60 = h2_delta_asymptote_ratio(0.3, 60).unwrap();
        assert!((r60 - 1.0).abs() < 0.05);
        let r = h2_delta_asymptote_ratio(0.45, 5).unwrap();
        assert!(r.is_finite() && r > 0.0);
        let seq: Vec<f64> = [20, 40, 80, 160]
            .iter()
            .map(|&n| (h2_delta_asymptote_ratio(0.25, n).unwrap() - 1.0).abs())
            .collect();
        assert!(seq.windows(2).all(|w| w[1] < w[0]), "{seq:?}");
    }

    #[test]
    fn small_delta_branch_is_continuous() {
        let ln_d = SMALL_DELTA_LN + 1e-9;
        let direct = ln_binary_entropy_from_ln(ln_d);
        let series = ln_d + (1.0 - ln_d).ln() - LN_2.ln();
        assert!((direct - series).abs() < 1e-12);
    }
}
