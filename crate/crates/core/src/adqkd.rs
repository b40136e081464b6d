//! Advantage distillation: Eve's conditional states, block-length-n entropy
//! bounds, key rates and verdicts.
//!
//! Conditional states are indexed by Alice's and Bob's raw bits (a, b) in the
//! order 00, 01, 10, 11. After a block of n rounds is accepted, Eve holds
//! ω₀ = (1−δₙ)ρ₀₀^⊗n + δₙρ₀₁^⊗n when Alice's bit is 0 and
//! ω₁ = (1−δₙ)ρ₁₁^⊗n + δₙρ₁₀^⊗n when it is 1.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::classical_ht::{ErrorBracket, ProductTest};
use crate::discrimination::{distinct_eigenvalue_count, err_lower_fidelity, ns_reduce};
use crate::entropy::{
    bound_fidelity_entropy, entropy_integral, ln_binary_entropy_from_ln, ln_delta_n, ErrorCurve, QuadConfig,
};
use crate::matcore::{chernoff_q, fidelity, petz_q, CMatrix, DensityMatrix, HermitianObservable, C64};
use crate::numerics::{bisect, log_add_exp};
use crate::{domain, Error, Result};

/// Tolerance on Q − β in [`asymptotic_verdict`].
pub const VERDICT_TOL: f64 = 1e-9;
/// Below this δₙ the second ensemble is left out of the error lower bound.
const DELTA_DROP: f64 = 1e-16;
const DEGENERATE_PROB: f64 = 1e-12;
const POVM_TOL: f64 = 1e-10;

/// Outcome pair (a, b) as an index into [`Scenario::states`].
pub fn outcome_index(a: usize, b: usize) -> usize {
    2 * a + b
}

#[derive(Clone, Debug)]
pub struct Scenario {
    eps: f64,
    beta_eps: f64,
    states: [DensityMatrix; 4],
}

impl Scenario {
    /// `states` in the order ρ₀₀, ρ₀₁, ρ₁₀, ρ₁₁.
    pub fn new(eps: f64, states: [DensityMatrix; 4]) -> Result<Self> {
        if !(0.0..=0.5).contains(&eps) {
            return domain(format!("error rate {eps} outside [0,1/2]"));
        }
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch(d, s.dim()));
        }
        Ok(Self {
            eps,
            beta_eps: eps / (1.0 - eps),
            states,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn beta_eps(&self) -> f64 {
        self.beta_eps
    }

    pub fn states(&self) -> &[DensityMatrix; 4] {
        &self.states
    }

    pub fn state(&self, a: usize, b: usize) -> &DensityMatrix {
        &self.states[outcome_index(a, b)]
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }
}

/// Joint state on Q_A ⊗ Q_B ⊗ E with Alice's and Bob's key-round measurements.
#[derive(Clone, Debug)]
pub struct TripartiteInput {
    state: DensityMatrix,
    povm_a: [CMatrix; 2],
    povm_b: [CMatrix; 2],
}

fn check_povm(name: &str, povm: &[CMatrix; 2]) -> Result<()> {
    for (k, m) in povm.iter().enumerate() {
        if m.nrows() != 2 || m.ncols() != 2 {
            return domain(format!("{name}[{k}] must be 2x2"));
        }
        let h = HermitianObservable::new(m.clone())?;
        let min = h.eigenvalues()[0];
        if min < -POVM_TOL {
            return Err(Error::NotPsd(min));
        }
    }
    let dev = (&povm[0] + &povm[1] - CMatrix::identity(2, 2)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > POVM_TOL {
        return domain(format!("{name} elements sum to identity only up to {dev:e}"));
    }
    Ok(())
}

impl TripartiteInput {
    pub fn new(state: DensityMatrix, povm_a: [CMatrix; 2], povm_b: [CMatrix; 2]) -> Result<Self> {
        if !state.dim().is_multiple_of(4) || state.dim() < 4 {
            return domain(format!("joint state dimension {} is not 4 * dim(E)", state.dim()));
        }
        check_povm("povm_a", &povm_a)?;
        check_povm("povm_b", &povm_b)?;
        Ok(Self { state, povm_a, povm_b })
    }

    pub fn eve_dim(&self) -> usize {
        self.state.dim() / 4
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// Unnormalised σ_{E|ab} = tr_{AB}[(M_a ⊗ N_b ⊗ I)ρ].
    fn eve_operator(&self, a: usize, b: usize) -> CMatrix {
        let de = self.eve_dim();
        let x = self.povm_a[a].kronecker(&self.povm_b[b]);
        let rho = self.state.matrix();
        CMatrix::from_fn(de, de, |e, f| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..4 {
                for l in 0..4 {
                    acc += x[(k, l)] * rho[(l * de + e, k * de + f)];
                }
            }
            acc
        })
    }

    /// p(a, b) indexed by [`outcome_index`].
    pub fn joint_probabilities(&self) -> [f64; 4] {
        let mut p = [0.0; 4];
        for a in 0..2 {
            for b in 0..2 {
                p[outcome_index(a, b)] = self.eve_operator(a, b).trace().re.max(0.0);
            }
        }
        p
    }
}

/// ρ_{ET|ab} ∝ Σᵢ σ_{E|a⊕i,b⊕i} ⊗ |i⟩⟨i|_T, with E first and the flip register T
/// second; ε = p(01) + p(10).
pub fn post_measurement_states(t: &TripartiteInput) -> Result<Scenario> {
    let de = t.eve_dim();
    let ops: Vec<CMatrix> = (0..4).map(|k| t.eve_operator(k / 2, k % 2)).collect();
    let probs = t.joint_probabilities();
    let mut states = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            let mut m = CMatrix::zeros(2 * de, 2 * de);
            for i in 0..2 {
                let src = &ops[outcome_index(a ^ i, b ^ i)];
                for r in 0..de {
                    for c in 0..de {
                        m[(2 * r + i, 2 * c + i)] = src[(r, c)];
                    }
                }
            }
            let tr = m.trace().re;
            if tr < DEGENERATE_PROB {
                return Err(Error::Degenerate(format!(
                    "outcome pair ({a},{b}) and its flip have probability {tr:e}"
                )));
            }
            states.push(DensityMatrix::new(m.unscale(tr))?);
        }
    }
    let eps = probs[outcome_index(0, 1)] + probs[outcome_index(1, 0)];
    if eps > 0.5 + 1e-12 {
        return domain(format!("error rate {eps} above 1/2; swap the labels of one party's outcomes"));
    }
    let eps = eps.clamp(0.0, 0.5);
    let states: [DensityMatrix; 4] = states.try_into().expect("four outcome pairs");
    Scenario::new(eps, states)
}

/// Error-curve lower bound for block length n, with the classical tables
/// built once and reused across priors.
pub struct BlockEvaluator {
    n: usize,
    delta: f64,
    fid_block: f64,
    e0: ProductTest,
    e1: Option<ProductTest>,
}

impl BlockEvaluator {
    /// `t_max` bounds |ln(s/(1−s))| for the priors that will be queried.
    pub fn new(sc: &Scenario, n: usize, bins: usize, t_max: f64) -> Result<Self> {
        let delta = ln_delta_n(sc.eps, n)?.exp();
        let ns0 = ns_reduce(sc.state(0, 0), sc.state(1, 1))?;
        let e0 = ProductTest::new(&ns0.p0, &ns0.p1, n, bins, t_max)?;
        let e1 = if delta >= DELTA_DROP {
            let ns1 = ns_reduce(sc.state(0, 1), sc.state(1, 0))?;
            Some(ProductTest::new(&ns1.p0, &ns1.p1, n, bins, t_max)?)
        } else {
            None
        };
        Ok(Self {
            n,
            delta,
            fid_block: block_fidelity_lower(sc, n)?,
            e0,
            e1,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// (1−δ)·½·P_cl(𝓔₀ⁿ(s)) + δ·½·P_cl(𝓔₁ⁿ(s)), each classical term taken at the
    /// lower end of its bracket.
    pub fn error_lower(&self, s: f64) -> f64 {
        if !(s > 0.0 && s < 1.0) {
            return 0.0;
        }
        let mut v = (1.0 - self.delta) * 0.5 * self.e0.bracket(s).lower;
        if let Some(e1) = &self.e1 {
            v += self.delta * 0.5 * e1.bracket(s).lower;
        }
        v.clamp(0.0, s.min(1.0 - s))
    }

    pub fn fidelity_lower(&self) -> f64 {
        self.fid_block
    }

    /// Pointwise max of the NS-based curve and the fidelity curve.
    pub fn combined_lower(&self, s: f64) -> f64 {
        self.error_lower(s).max(err_lower_fidelity(s, self.fid_block))
    }
}

fn lower_only(v: f64, s: f64) -> ErrorBracket {
    ErrorBracket {
        lower: v,
        upper: s.min(1.0 - s),
    }
}

/// Threshold range needed for the priors the quadrature visits.
pub fn quad_t_max(cfg: &QuadConfig) -> f64 {
    (cfg.panels as f64 + 1.0) * LN_2 + 1.0
}

pub fn block_error_lower(sc: &Scenario, n: usize, s: f64, bins: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return domain(format!("prior {s} outside [0,1]"));
    }
    if s == 0.0 || s == 1.0 {
        return Ok(0.0);
    }
    let t = (s.ln() - (1.0 - s).ln()).abs() + 1.0;
    Ok(BlockEvaluator::new(sc, n, bins, t)?.error_lower(s))
}

/// (1−δₙ)F(ρ₀₀,ρ₁₁)ⁿ + δₙF(ρ₀₁,ρ₁₀)ⁿ, a lower bound on F(ω₀, ω₁) by joint concavity.
pub fn block_fidelity_lower(sc: &Scenario, n: usize) -> Result<f64> {
    let delta = ln_delta_n(sc.eps, n)?.exp();
    let f0 = fidelity(sc.state(0, 0), sc.state(1, 1))?;
    let f1 = fidelity(sc.state(0, 1), sc.state(1, 0))?;
    Ok(((1.0 - delta) * f0.powi(n as i32) + delta * f1.powi(n as i32)).clamp(0.0, 1.0))
}

/// [(1−δₙ)Q₀₀;₁₁ⁿ + δₙQ₀₁;₁₀ⁿ]·π/(2 ln 2 (n+1)^{d²}).
pub fn chernoff_finite_lower(sc: &Scenario, n: usize) -> Result<f64> {
    let ln_d = ln_delta_n(sc.eps, n)?;
    let (q0, _) = chernoff_q(sc.state(0, 0), sc.state(1, 1))?;
    let (q1, _) = chernoff_q(sc.state(0, 1), sc.state(1, 0))?;
    let nf = n as f64;
    let ln_1md = (-ln_d.exp()).ln_1p();
    let mix = log_add_exp(ln_1md + nf * q0.ln(), ln_d + nf * q1.ln());
    let d2 = (sc.dim() * sc.dim()) as f64;
    let ln = mix + PI.ln() - (2.0 * LN_2).ln() - d2 * (nf + 1.0).ln();
    Ok(ln.exp())
}

fn acceptance_probability(eps: f64, n: usize) -> f64 {
    (1.0 - eps).powi(n as i32) + eps.powi(n as i32)
}

/// (H_lower − h₂(δₙ))·((1−ε)ⁿ + εⁿ)/n.
pub fn key_rate(sc: &Scenario, n: usize, entropy_lower: f64) -> Result<f64> {
    let h2 = ln_binary_entropy_from_ln(ln_delta_n(sc.eps, n)?).exp();
    Ok((entropy_lower - h2) * acceptance_probability(sc.eps, n) / n as f64)
}

/// H / h₂(δₙ), formed in logs so it survives δₙ far below the f64 range.
pub fn ratio_rn(sc: &Scenario, n: usize, entropy_value: f64) -> Result<f64> {
    let ln_d = ln_delta_n(sc.eps, n)?;
    if ln_d == f64::NEG_INFINITY {
        return Err(Error::Degenerate("delta_n = 0, the ratio is undefined".into()));
    }
    if entropy_value <= 0.0 {
        return Ok(0.0);
    }
    Ok((entropy_value.ln() - ln_binary_entropy_from_ln(ln_d)).exp())
}

/// Number of distinct eigenvalues of ρ^⊗n, bounded by counting multisets of the
/// nonzero eigenvalues, plus one for the kernel.
fn tensor_spectrum_count_ln(rho: &DensityMatrix, n: usize) -> f64 {
    let ev = rho.eigenvalues();
    let nonzero: Vec<f64> = ev.iter().copied().filter(|&l| l > 1e-12).collect();
    let t = if nonzero.is_empty() {
        1
    } else {
        distinct_eigenvalue_count(&DensityMatrix::diagonal(&normalised(&nonzero)).expect("positive diagonal"), 1e-9)
    };
    let mut ln_c = 0.0;
    for k in 1..t {
        ln_c += ((n + k) as f64 / k as f64).ln();
    }
    if nonzero.len() < ev.len() {
        log_add_exp(ln_c, 0.0)
    } else {
        ln_c
    }
}

fn normalised(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

const UPPER_ALPHAS: usize = 21;

/// Upper bound on p_err(ω₀, ω₁) at prior s from the four-hypothesis ensemble
/// {s(1−δ)ρ₀₀ⁿ, sδρ₀₁ⁿ, (1−s)(1−δ)ρ₁₁ⁿ, (1−s)δρ₁₀ⁿ}: splitting the mixtures
/// cannot lower the error, and the four-state error obeys the pairwise bound
/// 10(r−1)²T² Σ_{i<j} p_i^α p_j^{1−α} Q_α(A_i‖A_j).
pub struct BlockUpperCurve {
    ln_delta: f64,
    ln_1m_delta: f64,
    ln_prefactor: f64,
    /// n·ln Q_α for each pair, α on a grid of 21 points in [0, 1].
    ln_q: [[f64; UPPER_ALPHAS]; 6],
}

/// Hypotheses in the order 00, 01, 11, 10; 00 and 01 carry weight s.
const UPPER_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl BlockUpperCurve {
    pub fn new(sc: &Scenario, n: usize) -> Result<Self> {
        let ln_delta = ln_delta_n(sc.eps, n)?;
        let hyp = [sc.state(0, 0), sc.state(0, 1), sc.state(1, 1), sc.state(1, 0)];
        let mut ln_q = [[f64::NEG_INFINITY; UPPER_ALPHAS]; 6];
        for (p, &(i, j)) in UPPER_PAIRS.iter().enumerate() {
            for (k, slot) in ln_q[p].iter_mut().enumerate() {
                let a = k as f64 / (UPPER_ALPHAS - 1) as f64;
                let q = petz_q(a, hyp[i], hyp[j])?;
                *slot = if q > 0.0 { n as f64 * q.ln() } else { f64::NEG_INFINITY };
            }
        }
        let r: f64 = if ln_delta == f64::NEG_INFINITY { 2.0 } else { 4.0 };
        let ln_t = hyp
            .iter()
            .map(|h| tensor_spectrum_count_ln(h, n))
            .fold(f64::NEG_INFINITY, f64::max);
        let ln_prefactor = (10.0_f64 * (r - 1.0) * (r - 1.0)).ln() + 2.0 * ln_t;
        Ok(Self {
            ln_delta,
            ln_1m_delta: (-ln_delta.exp()).ln_1p(),
            ln_prefactor,
            ln_q,
        })
    }

    fn value(&self, s: f64, s_bar: f64) -> f64 {
        let ln_w = [
            s.ln() + self.ln_1m_delta,
            s.ln() + self.ln_delta,
            s_bar.ln() + self.ln_1m_delta,
            s_bar.ln() + self.ln_delta,
        ];
        let mut ln_sum = f64::NEG_INFINITY;
        for (p, &(i, j)) in UPPER_PAIRS.iter().enumerate() {
            if ln_w[i] == f64::NEG_INFINITY || ln_w[j] == f64::NEG_INFINITY {
                continue;
            }
            let best = self.ln_q[p]
                .iter()
                .enumerate()
                .map(|(k, lq)| {
                    let a = k as f64 / (UPPER_ALPHAS - 1) as f64;
                    a * ln_w[i] + (1.0 - a) * ln_w[j] + lq
                })
                .fold(f64::INFINITY, f64::min);
            ln_sum = log_add_exp(ln_sum, best);
        }
        (self.ln_prefactor + ln_sum).exp().min(s.min(s_bar))
    }
}

impl ErrorCurve for BlockUpperCurve {
    fn perr(&self, s: f64) -> ErrorBracket {
        let v = self.value(s, 1.0 - s);
        ErrorBracket { lower: 0.0, upper: v }
    }
}

/// Upper bound on H(C|E) of the block cq-state, at most 1.
pub fn block_upper_bound(sc: &Scenario, n: usize, cfg: &QuadConfig) -> Result<f64> {
    let curve = BlockUpperCurve::new(sc, n)?;
    Ok(entropy_integral(&curve, cfg)?.upper.min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Positive,
    Nonpositive,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Positive => "positive",
            Verdict::Nonpositive => "nonpositive",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Verdict::Positive),
            "nonpositive" => Ok(Verdict::Nonpositive),
            "inconclusive" => Ok(Verdict::Inconclusive),
            other => domain(format!("unknown verdict {other:?}")),
        }
    }
}

/// Per-block-length summary. Entropies are in bits.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub delta_n: f64,
    pub ln_delta_n: f64,
    pub h2_delta: f64,
    pub bound_fidelity: f64,
    pub bound_classical: f64,
    pub bound_combined: f64,
    pub chernoff_finite_lower: f64,
    pub upper_bound: f64,
    /// Key rate from `bound_combined`.
    pub key_rate: f64,
    /// 𝓡ₙ from `bound_combined`; NaN when δₙ = 0.
    pub ratio_rn: f64,
    /// Positive when `bound_combined` exceeds h₂(δₙ), nonpositive when
    /// `upper_bound` is below it.
    pub verdict: Verdict,
}

pub fn block_entropy_bounds(sc: &Scenario, n: usize, bins: usize, cfg: &QuadConfig) -> Result<BoundReport> {
    if n == 0 {
        return domain("block length must be >= 1");
    }
    let ln_d = ln_delta_n(sc.eps, n)?;
    let h2_delta = ln_binary_entropy_from_ln(ln_d).exp();
    let eval = BlockEvaluator::new(sc, n, bins, quad_t_max(cfg))?;

    let classical_curve = |s: f64| lower_only(eval.error_lower(s), s);
    let bound_classical = entropy_integral(&classical_curve, cfg)?.lower.max(0.0);
    let bound_fidelity = bound_fidelity_entropy(eval.fidelity_lower())?;
    let chernoff = chernoff_finite_lower(sc, n)?;
    let combined_curve = |s: f64| lower_only(eval.combined_lower(s), s);
    let bound_combined = entropy_integral(&combined_curve, cfg)?
        .lower
        .max(bound_fidelity)
        .max(bound_classical)
        .max(chernoff)
        .min(1.0);
    let upper_bound = block_upper_bound(sc, n, cfg)?.max(bound_combined);

    let verdict = if bound_combined > h2_delta {
        Verdict::Positive
    } else if upper_bound < h2_delta {
        Verdict::Nonpositive
    } else {
        Verdict::Inconclusive
    };
    let ratio = if ln_d == f64::NEG_INFINITY {
        f64::NAN
    } else {
        ratio_rn(sc, n, bound_combined)?
    };
    Ok(BoundReport {
        n,
        delta_n: ln_d.exp(),
        ln_delta_n: ln_d,
        h2_delta,
        bound_fidelity,
        bound_classical,
        bound_combined,
        chernoff_finite_lower: chernoff,
        upper_bound,
        key_rate: key_rate(sc, n, bound_combined)?,
        ratio_rn: ratio,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticVerdict {
    /// Chernoff overlap Q(ρ₀₀, ρ₁₁) and its minimiser.
    pub q: f64,
    pub alpha: f64,
    /// Squared root-fidelity F(ρ₀₀, ρ₁₁)².
    pub fidelity_sq: f64,
    pub beta_eps: f64,
    pub verdict: Verdict,
    /// Both states pure: then Q = F² and Q < β rules the key out for all n
    /// large enough, not just this sufficient test.
    pub pure_states: bool,
}

pub fn asymptotic_verdict(sc: &Scenario) -> Result<AsymptoticVerdict> {
    let (q, alpha) = chernoff_q(sc.state(0, 0), sc.state(1, 1))?;
    let f = fidelity(sc.state(0, 0), sc.state(1, 1))?;
    let beta = sc.beta_eps;
    let verdict = if q > beta + VERDICT_TOL {
        Verdict::Positive
    } else if q < beta - VERDICT_TOL {
        Verdict::Nonpositive
    } else {
        Verdict::Inconclusive
    };
    Ok(AsymptoticVerdict {
        q,
        alpha,
        fidelity_sq: f * f,
        beta_eps: beta,
        verdict,
        pure_states: sc.state(0, 0).is_pure(1e-9) && sc.state(1, 1).is_pure(1e-9),
    })
}

/// Bell basis in the order Φ⁺, Φ⁻, Ψ⁻, Ψ⁺, as vectors over |00⟩, |01⟩, |10⟩, |11⟩.
pub fn bell_basis() -> [[f64; 4]; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[h, 0.0, 0.0, h], [h, 0.0, 0.0, -h], [0.0, h, -h, 0.0], [0.0, h, h, 0.0]]
}

fn check_bell_inputs(lambdas: &[f64; 4], angles: &[f64; 4]) -> Result<()> {
    if lambdas.iter().any(|&l| !(l >= 0.0)) || (lambdas.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidDistribution("Bell weights must be a probability vector".into()));
    }
    if angles.iter().any(|a| !a.is_finite()) {
        return domain("measurement angles must be finite");
    }
    for (who, (x, y)) in [("Alice", (angles[0], angles[1])), ("Bob", (angles[2], angles[3]))] {
        if (x - y).cos().abs() > 1e-9 {
            return domain(format!("{who}'s outcome projectors are not orthogonal"));
        }
    }
    Ok(())
}

fn product_vector(alpha: f64, beta: f64) -> [f64; 4] {
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let (cb, sb) = (beta.cos(), beta.sin());
    [ca * cb, ca * sb, sa * cb, sa * sb]
}

/// Fidelities between Eve's pure post-measurement states for a Bell-diagonal
/// ρ_AB and real projective measurements. Outcome pairs are indexed by
/// [`outcome_index`]; entries touching a zero-probability outcome are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellFidelityTable {
    pub probabilities: [f64; 4],
    /// |⟨ψ_ab|ψ_a'b'⟩|
    pub root: [[Option<f64>; 4]; 4],
    /// |⟨ψ_ab|ψ_a'b'⟩|²
    pub squared: [[Option<f64>; 4]; 4],
}

impl BellFidelityTable {
    pub fn squared_fidelity(&self, ab: usize, ab2: usize) -> Result<f64> {
        self.squared[ab][ab2]
            .ok_or_else(|| Error::Degenerate(format!("outcome {ab} or {ab2} has probability zero")))
    }
}

/// `angles` are (α₀, α₁, β₀, β₁): outcome a of Alice projects on cos α_a|0⟩ + sin α_a|1⟩.
pub fn bell_diagonal_fidelity(lambdas: [f64; 4], angles: [f64; 4]) -> Result<BellFidelityTable> {
    check_bell_inputs(&lambdas, &angles)?;
    let basis = bell_basis();
    // c[ab][i] = ⟨α_a β_b | B_i⟩
    let mut c = [[0.0; 4]; 4];
    for a in 0..2 {
        for b in 0..2 {
            let v = product_vector(angles[a], angles[2 + b]);
            for (i, bi) in basis.iter().enumerate() {
                c[outcome_index(a, b)][i] = v.iter().zip(bi).map(|(x, y)| x * y).sum();
            }
        }
    }
    let gram = |x: usize, y: usize| -> f64 { (0..4).map(|i| lambdas[i] * c[x][i] * c[y][i]).sum() };
    let mut probabilities = [0.0; 4];
    for (k, p) in probabilities.iter_mut().enumerate() {
        *p = gram(k, k).max(0.0);
    }
    let mut root = [[None; 4]; 4];
    let mut squared = [[None; 4]; 4];
    for x in 0..4 {
        for y in 0..4 {
            if probabilities[x] < DEGENERATE_PROB || probabilities[y] < DEGENERATE_PROB {
                continue;
            }
            let r = (gram(x, y).abs() / (probabilities[x] * probabilities[y]).sqrt()).min(1.0);
            root[x][y] = Some(r);
            squared[x][y] = Some(r * r);
        }
    }
    Ok(BellFidelityTable {
        probabilities,
        root,
        squared,
    })
}

/// Purification Σᵢ √λᵢ |Bᵢ⟩_AB |i⟩_E with the matching real measurements.
pub fn bell_diagonal_input(lambdas: [f64; 4], angles: [f64; 4]) -> Result<TripartiteInput> {
    check_bell_inputs(&lambdas, &angles)?;
    let basis = bell_basis();
    let mut psi = vec![C64::new(0.0, 0.0); 16];
    for (i, bi) in basis.iter().enumerate() {
        for (ab, &amp) in bi.iter().enumerate() {
            psi[ab * 4 + i] += C64::new(lambdas[i].sqrt() * amp, 0.0);
        }
    }
    let state = DensityMatrix::pure(&psi)?;
    let proj = |t: f64| {
        let v = [t.cos(), t.sin()];
        CMatrix::from_fn(2, 2, |i, j| C64::new(v[i] * v[j], 0.0))
    };
    TripartiteInput::new(
        state,
        [proj(angles[0]), proj(angles[1])],
        [proj(angles[2]), proj(angles[3])],
    )
}

/// exp(θK) for the real antisymmetric K with K[j][i] = 1, K[i][j] = −1 (i < j).
fn reference_rotation(d: usize, theta: f64) -> CMatrix {
    let k = nalgebra::DMatrix::<f64>::from_fn(d, d, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => -theta,
        std::cmp::Ordering::Greater => theta,
        std::cmp::Ordering::Equal => 0.0,
    });
    k.exp().map(|x| C64::new(x, 0.0))
}

/// Deterministic pair (ρ, UρUᵀ) with ρ = diag(0.7, 0, 0, 0.3) and U a fixed
/// one-parameter rotation, the angle tuned by bisection on [0, 0.6] so that
/// the root fidelity equals `target` to 1e-12. Returns (ρ, UρUᵀ, θ).
pub fn reference_pair(target: f64) -> Result<(DensityMatrix, DensityMatrix, f64)> {
    let rho = DensityMatrix::diagonal(&[0.7, 0.0, 0.0, 0.3])?;
    let rotated = |theta: f64| -> Result<DensityMatrix> { rho.conjugated(&reference_rotation(4, theta)) };
    let fid_at = |theta: f64| -> f64 { fidelity(&rho, &rotated(theta).expect("rotation is unitary")).expect("same dim") };
    let (lo, hi) = (0.0, 0.6);
    if !(target <= fid_at(lo) && target >= fid_at(hi)) {
        return domain(format!("target fidelity {target} not reachable on the reference path"));
    }
    let theta = bisect(|t| fid_at(t) - target, lo, hi, 200);
    let sigma = rotated(theta)?;
    Ok((rho, sigma, theta))
}
