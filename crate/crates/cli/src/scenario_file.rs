//! Scenario files: JSON with `"schema_version": 1` and a `mode` key.
//!
//! ```json
//! {"schema_version": 1, "mode": "conditional_states", "eps": 0.1,
//!  "states": {"00": M, "01": M, "10": M, "11": M}}
//! {"schema_version": 1, "mode": "tripartite", "state": M,
//!  "povm_a": [M, M], "povm_b": [M, M]}
//! {"schema_version": 1, "mode": "bell_diagonal", "lambdas": [l1, l2, l3, l4],
//!  "angles": {"a0": x, "a1": x, "b0": x, "b1": x}}
//! ```
//!
//! A matrix M is an array of rows, each entry a `[re, im]` pair or a plain
//! real number. Tripartite states are ordered Q_A ⊗ Q_B ⊗ E. Bell weights are
//! in the order Φ⁺, Φ⁻, Ψ⁻, Ψ⁺.

use std::path::Path;

use adkey_core::adqkd::{bell_diagonal_input, post_measurement_states, Scenario, TripartiteInput};
use adkey_core::{CMatrix, DensityMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

pub const SCHEMA_VERSION: u32 = 1;
/// Allowed gap between a stated ε and the one implied by a tripartite input.
pub const EPS_CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Complex([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

pub type MatrixJson = Vec<Vec<Entry>>;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalStates {
    #[serde(rename = "00")]
    pub s00: MatrixJson,
    #[serde(rename = "01")]
    pub s01: MatrixJson,
    #[serde(rename = "10")]
    pub s10: MatrixJson,
    #[serde(rename = "11")]
    pub s11: MatrixJson,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Angles {
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScenarioBody {
    ConditionalStates {
        eps: f64,
        states: ConditionalStates,
    },
    Tripartite {
        state: MatrixJson,
        povm_a: [MatrixJson; 2],
        povm_b: [MatrixJson; 2],
        /// Optional; checked against the measured error rate when present.
        #[serde(default)]
        eps: Option<f64>,
    },
    BellDiagonal {
        lambdas: [f64; 4],
        angles: Angles,
        #[serde(default)]
        eps: Option<f64>,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(flatten)]
    pub body: ScenarioBody,
}

/// A validated scenario file.
#[derive(Clone, Debug)]
pub enum LoadedScenario {
    Conditional(Scenario),
    Tripartite {
        input: Box<TripartiteInput>,
        scenario: Scenario,
    },
}

impl LoadedScenario {
    pub fn scenario(&self) -> &Scenario {
        match self {
            LoadedScenario::Conditional(s) => s,
            LoadedScenario::Tripartite { scenario, .. } => scenario,
        }
    }

    pub fn into_scenario(self) -> Scenario {
        match self {
            LoadedScenario::Conditional(s) => s,
            LoadedScenario::Tripartite { scenario, .. } => scenario,
        }
    }
}

pub fn matrix_from_json(name: &str, m: &MatrixJson) -> AppResult<CMatrix> {
    let d = m.len();
    if d == 0 {
        return Err(AppError::Validation(format!("{name}: empty matrix")));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != d {
            return Err(AppError::Validation(format!(
                "{name}: row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
    }
    let out = CMatrix::from_fn(d, d, |i, j| m[i][j].value());
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(AppError::Validation(format!("{name}: non-finite entry")));
    }
    Ok(out)
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Entry::Complex([m[(i, j)].re, m[(i, j)].im])).collect())
        .collect()
}

fn density(name: &str, m: &MatrixJson) -> AppResult<DensityMatrix> {
    let mat = matrix_from_json(name, m)?;
    DensityMatrix::new(mat).map_err(|e| AppError::from_core(name, e))
}

fn cross_check(stated: Option<f64>, scenario: &Scenario) -> AppResult<()> {
    if let Some(eps) = stated {
        if (eps - scenario.eps()).abs() > EPS_CROSS_CHECK_TOL {
            return Err(AppError::Validation(format!(
                "eps: stated {eps} but the measurement statistics give {}",
                scenario.eps()
            )));
        }
    }
    Ok(())
}

impl ScenarioFile {
    pub fn parse(text: &str, origin: &str) -> AppResult<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| AppError::Validation(format!("{origin}: parse error: {e}")))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(AppError::Validation(format!(
                "{origin}: unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn validate(&self) -> AppResult<LoadedScenario> {
        match &self.body {
            ScenarioBody::ConditionalStates { eps, states } => {
                let s = [
                    density("states.00", &states.s00)?,
                    density("states.01", &states.s01)?,
                    density("states.10", &states.s10)?,
                    density("states.11", &states.s11)?,
                ];
                let sc = Scenario::new(*eps, s).map_err(|e| AppError::from_core("scenario", e))?;
                Ok(LoadedScenario::Conditional(sc))
            }
            ScenarioBody::Tripartite {
                state,
                povm_a,
                povm_b,
                eps,
            } => {
                let rho = density("state", state)?;
                let pa = [
                    matrix_from_json("povm_a[0]", &povm_a[0])?,
                    matrix_from_json("povm_a[1]", &povm_a[1])?,
                ];
                let pb = [
                    matrix_from_json("povm_b[0]", &povm_b[0])?,
                    matrix_from_json("povm_b[1]", &povm_b[1])?,
                ];
                let input = TripartiteInput::new(rho, pa, pb).map_err(|e| AppError::from_core("tripartite", e))?;
                let scenario =
                    post_measurement_states(&input).map_err(|e| AppError::from_core("post-measurement states", e))?;
                cross_check(*eps, &scenario)?;
                Ok(LoadedScenario::Tripartite { input: Box::new(input), scenario })
            }
            ScenarioBody::BellDiagonal { lambdas, angles, eps } => {
                let input = bell_diagonal_input(*lambdas, [angles.a0, angles.a1, angles.b0, angles.b1])
                    .map_err(|e| AppError::from_core("bell_diagonal", e))?;
                let scenario =
                    post_measurement_states(&input).map_err(|e| AppError::from_core("post-measurement states", e))?;
                cross_check(*eps, &scenario)?;
                Ok(LoadedScenario::Tripartite { input: Box::new(input), scenario })
            }
        }
    }
}

pub fn parse_scenario(text: &str, origin: &str) -> AppResult<LoadedScenario> {
    ScenarioFile::parse(text, origin)?
        .validate()
        .map_err(|e| match e {
            AppError::Validation(m) => AppError::Validation(format!("{origin}: {m}")),
            AppError::Guard(m) => AppError::Guard(format!("{origin}: {m}")),
            other => other,
        })
}

pub fn load_scenario(path: &Path) -> AppResult<LoadedScenario> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::read(path, e))?;
    parse_scenario(&text, &path.display().to_string())
}

/// Scenario file for explicit conditional states.
pub fn conditional_states_file(sc: &Scenario, description: Option<String>) -> ScenarioFile {
    let m = |a: usize, b: usize| matrix_to_json(sc.state(a, b).matrix());
    ScenarioFile {
        schema_version: SCHEMA_VERSION,
        description,
        body: ScenarioBody::ConditionalStates {
            eps: sc.eps(),
            states: ConditionalStates {
                s00: m(0, 0),
                s01: m(0, 1),
                s10: m(1, 0),
                s11: m(1, 1),
            },
        },
    }
}
