//! Data behind the two reference figures.

use std::path::Path;

use adkey_core::adqkd::BoundReport;
use adkey_core::discrimination::{helstrom_error, BinaryEnsemble};
use adkey_core::entropy::{
    bound_combined, bound_fidelity_entropy, bound_minentropy_entropy, exact_cond_entropy, CqState, QuadConfig,
};
use adkey_core::matcore::{fidelity, DensityMatrix};
use serde::Serialize;

use crate::error::{AppError, AppResult};
use crate::scenario_file::parse_scenario;
use crate::sweep::{fmt_num, sweep_scenario};

/// Shipped F = 0.684 scenario.
pub const FIG2_SCENARIO: &str = include_str!("../examples/fig2_f0684.json");

pub const FIG1_COLUMNS: [&str; 5] = ["lambda", "bound_fidelity", "bound_errorprob", "bound_integral", "exact_entropy"];
pub const FIG1_STEPS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fig1Row {
    pub lambda: f64,
    pub bound_fidelity: f64,
    pub bound_errorprob: f64,
    pub bound_integral: f64,
    pub exact_entropy: f64,
}

/// Equal priors, τ₀ on the +z axis and τ₁ at Bloch vector (λ/√2, 0, λ/√2).
pub fn fig1_states(lambda: f64) -> AppResult<(DensityMatrix, DensityMatrix)> {
    let c = lambda * std::f64::consts::FRAC_1_SQRT_2;
    let tau0 = DensityMatrix::from_bloch(0.0, 0.0, 1.0).map_err(|e| AppError::from_core("fig1", e))?;
    let tau1 = DensityMatrix::from_bloch(c, 0.0, c).map_err(|e| AppError::from_core(format!("lambda = {lambda}"), e))?;
    Ok((tau0, tau1))
}

pub fn fig1_row(lambda: f64, cfg: &QuadConfig) -> AppResult<Fig1Row> {
    let ctx = |e| AppError::from_core(format!("lambda = {lambda}"), e);
    let (tau0, tau1) = fig1_states(lambda)?;
    let fid = fidelity(&tau0, &tau1).map_err(ctx)?.min(1.0);
    let ens = BinaryEnsemble::new(0.5, tau0.clone(), tau1.clone()).map_err(ctx)?;
    let p_half = helstrom_error(&ens).clamp(0.0, 0.5);
    Ok(Fig1Row {
        lambda,
        bound_fidelity: bound_fidelity_entropy(fid).map_err(ctx)?,
        bound_errorprob: bound_minentropy_entropy(p_half).map_err(ctx)?,
        bound_integral: bound_combined(fid, p_half, cfg).map_err(ctx)?,
        exact_entropy: exact_cond_entropy(&CqState::binary(0.5, tau0, tau1).map_err(ctx)?).map_err(ctx)?,
    })
}

pub fn fig1_rows() -> AppResult<Vec<Fig1Row>> {
    let cfg = QuadConfig::default();
    (0..=FIG1_STEPS)
        .map(|k| fig1_row(k as f64 / FIG1_STEPS as f64, &cfg))
        .collect()
}

pub fn figure1(out: &Path) -> AppResult<Vec<Fig1Row>> {
    let rows = fig1_rows()?;
    let mut w = csv::Writer::from_path(out).map_err(|e| AppError::write(out, e))?;
    w.write_record(FIG1_COLUMNS).map_err(|e| AppError::write(out, e))?;
    for r in &rows {
        let rec = [r.lambda, r.bound_fidelity, r.bound_errorprob, r.bound_integral, r.exact_entropy].map(fmt_num);
        w.write_record(&rec).map_err(|e| AppError::write(out, e))?;
    }
    w.flush().map_err(|e| AppError::write(out, e))?;
    Ok(rows)
}

pub const FIG2_N_MAX: usize = 200;

/// Sweep of the shipped scenario over n = 1..=n_max.
pub fn figure2(out: &Path, n_max: usize, bins: usize, threads: Option<usize>) -> AppResult<Vec<BoundReport>> {
    if n_max < 1 {
        return Err(AppError::Validation("n_max must be >= 1".into()));
    }
    if bins < 64 || !bins.is_power_of_two() {
        return Err(AppError::Validation(format!("bins {bins} must be a power of two >= 64")));
    }
    let sc = parse_scenario(FIG2_SCENARIO, "fig2_f0684.json")?.into_scenario();
    let ns: Vec<usize> = (1..=n_max).collect();
    sweep_scenario(&sc, &ns, bins, &QuadConfig::default(), out, threads)
}
