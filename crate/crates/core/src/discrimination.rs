//! Binary and multiple quantum state discrimination.

use crate::matcore::{self, petz_q, weighted_difference, DensityMatrix};
use crate::{domain, Error, Result};

/// Prior `prior_0` on `state_0`, the rest on `state_1`.
#[derive(Clone, Debug)]
pub struct BinaryEnsemble {
    prior_0: f64,
    state_0: DensityMatrix,
    state_1: DensityMatrix,
}

impl BinaryEnsemble {
    pub fn new(prior_0: f64, state_0: DensityMatrix, state_1: DensityMatrix) -> Result<Self> {
        check_prior(prior_0)?;
        if state_0.dim() != state_1.dim() {
            return Err(Error::DimensionMismatch(state_0.dim(), state_1.dim()));
        }
        Ok(Self {
            prior_0,
            state_0,
            state_1,
        })
    }

    pub fn prior_0(&self) -> f64 {
        self.prior_0
    }

    pub fn state_0(&self) -> &DensityMatrix {
        &self.state_0
    }

    pub fn state_1(&self) -> &DensityMatrix {
        &self.state_1
    }

    pub fn with_prior(&self, prior_0: f64) -> Result<Self> {
        check_prior(prior_0)?;
        Ok(Self {
            prior_0,
            ..self.clone()
        })
    }
}

fn check_prior(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("prior {p} outside [0,1]"));
    }
    Ok(())
}

/// Optimal error ½ − ½‖π₀ω₀ − π₁ω₁‖₁.
pub fn helstrom_error(e: &BinaryEnsemble) -> f64 {
    let p0 = e.prior_0;
    helstrom_error_weighted(p0, &e.state_0, 1.0 - p0, &e.state_1)
        .expect("ensemble dimensions were checked")
}

/// Optimal error for the sub-normalised pair {a·x, b·y}: ½(a + b − ‖a x − b y‖₁),
/// clamped to [0, min(a, b)].
pub fn helstrom_error_weighted(
    a: f64,
    x: &DensityMatrix,
    b: f64,
    y: &DensityMatrix,
) -> Result<f64> {
    let diff = weighted_difference(a, x, b, y)?;
    let norm = matcore::trace_norm(&diff);
    Ok((0.5 * (a + b - norm)).clamp(0.0, a.min(b)))
}

/// Fidelity lower bound ½(1 − √(1 − 4s(1−s)F²)).
pub fn err_lower_fidelity(s: f64, fid: f64) -> f64 {
    let x = 4.0 * s * (1.0 - s) * fid * fid;
    // ½(1 − √(1−x)) = ½x/(1 + √(1−x)), free of cancellation for small x.
    let v = 0.5 * x / (1.0 + (1.0 - x).max(0.0).sqrt());
    v.clamp(0.0, s.min(1.0 - s).max(0.0))
}

/// Lower bound 2·min(s, 1−s)·p_err(½) from the error at equal priors.
pub fn err_lower_symmetry(s: f64, p_half: f64) -> f64 {
    2.0 * s.min(1.0 - s) * p_half
}

/// Upper bound s^α (1−s)^{1−α} Q_α(ω₀‖ω₁) with s the ensemble prior.
pub fn err_upper_audenaert(alpha: f64, e: &BinaryEnsemble) -> Result<f64> {
    let q = petz_q(alpha, &e.state_0, &e.state_1)?;
    let s = e.prior_0;
    Ok(pow0(s, alpha) * pow0(1.0 - s, 1.0 - alpha) * q)
}

/// x^p with 0^0 = 1 (scalar weights, not supports).
fn pow0(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

/// Two distributions over the same finite alphabet plus a prior on the first.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPair {
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub prior_0: f64,
}

impl ClassicalPair {
    pub fn new(p0: Vec<f64>, p1: Vec<f64>, prior_0: f64) -> Result<Self> {
        check_prior(prior_0)?;
        if p0.len() != p1.len() {
            return Err(Error::DimensionMismatch(p0.len(), p1.len()));
        }
        for (name, p) in [("p0", &p0), ("p1", &p1)] {
            if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidDistribution(format!("{name} has a negative or non-finite entry")));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidDistribution(format!("{name} sums to {total}")));
            }
        }
        Ok(Self { p0, p1, prior_0 })
    }
}

/// Nussbaum–Szkoła distributions P₀(i,j) = λ_i|⟨x_i|y_j⟩|², P₁(i,j) = μ_j|⟨x_i|y_j⟩|²,
/// flattened row-major over (i, j), with prior ½. Eigenvalues below
/// [`matcore::CLIP_THRESHOLD`] count as zero, as in the matrix powers.
pub fn ns_reduce(tau: &DensityMatrix, sigma: &DensityMatrix) -> Result<ClassicalPair> {
    if tau.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(tau.dim(), sigma.dim()));
    }
    let d = tau.dim();
    let st = tau.spectrum();
    let ss = sigma.spectrum();
    let overlap = st.eigenvectors.adjoint() * &ss.eigenvectors;
    let clip = |l: f64| if l < matcore::CLIP_THRESHOLD { 0.0 } else { l };
    let mut p0 = Vec::with_capacity(d * d);
    let mut p1 = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let w = overlap[(i, j)].norm_sqr();
            p0.push(clip(st.eigenvalues[i]) * w);
            p1.push(clip(ss.eigenvalues[j]) * w);
        }
    }
    normalise(&mut p0);
    normalise(&mut p1);
    ClassicalPair::new(p0, p1, 0.5)
}

fn normalise(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    for v in p.iter_mut() {
        *v /= total;
    }
}

/// Half the classical error of the Nussbaum–Szkoła pair, a lower bound on the
/// quantum error of the same n-fold problem.
pub fn quantum_err_lower_from_classical(classical_err: f64) -> f64 {
    0.5 * classical_err
}

/// Number of distinct eigenvalues, merging values closer than `tol`.
pub fn distinct_eigenvalue_count(rho: &DensityMatrix, tol: f64) -> usize {
    let ev = rho.eigenvalues();
    let mut count = 1;
    let mut last = ev[0];
    for &v in &ev[1..] {
        if v - last > tol {
            count += 1;
            last = v;
        }
    }
    count
}

/// Multiple-hypothesis upper bound
/// min(1 − max p, 10(r−1)²T² Σ_{i<j} p_i^{α_ij} p_j^{1−α_ij} Q_{α_ij}(ρ_i‖ρ_j)).
/// Only the upper triangle of `alphas` is read.
pub fn multi_hyp_upper(states: &[DensityMatrix], priors: &[f64], alphas: &[Vec<f64>]) -> Result<f64> {
    let r = states.len();
    if r < 2 {
        return domain("multiple-hypothesis bound needs at least 2 states");
    }
    if priors.len() != r {
        return Err(Error::DimensionMismatch(priors.len(), r));
    }
    if alphas.len() != r || alphas.iter().any(|row| row.len() != r) {
        return domain("alpha matrix must be r x r");
    }
    if priors.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution("priors must be a probability vector".into()));
    }
    let t = states
        .iter()
        .map(|s| distinct_eigenvalue_count(s, 1e-9))
        .max()
        .unwrap_or(1) as f64;
    let mut sum = 0.0;
    for i in 0..r {
        for j in (i + 1)..r {
            let a = alphas[i][j];
            if priors[i] == 0.0 || priors[j] == 0.0 {
                continue;
            }
            let q = petz_q(a, &states[i], &states[j])?;
            sum += pow0(priors[i], a) * pow0(priors[j], 1.0 - a) * q;
        }
    }
    let rm1 = (r - 1) as f64;
    let raw = 10.0 * rm1 * rm1 * t * t * sum;
    let trivial = 1.0 - priors.iter().copied().fold(0.0, f64::max);
    Ok(raw.min(trivial))
}
