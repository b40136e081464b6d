//! Block-length sweeps: config, parallel evaluation, CSV output and the
//! post-write validator.

use std::path::{Path, PathBuf};

use adkey_core::adqkd::{block_entropy_bounds, BoundReport, Scenario, Verdict};
use adkey_core::entropy::{ln_binary_entropy_from_ln, QuadConfig};
use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};
use crate::scenario_file::{load_scenario, SCHEMA_VERSION};

pub const COLUMNS: [&str; 11] = [
    "n",
    "delta_n",
    "h2_delta",
    "bound_fidelity",
    "bound_classical",
    "bound_combined",
    "chernoff_finite_lower",
    "upper_bound",
    "key_rate_from_combined",
    "ratio_Rn",
    "verdict",
];

/// Slack for the ordering checks between bounds in a row.
const ROW_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    /// Relative paths are taken from the config file's directory.
    pub scenario_path: PathBuf,
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "one")]
    pub n_step: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_panels")]
    pub quad_panels: usize,
    pub outputs: PathBuf,
}

fn one() -> usize {
    1
}

fn default_bins() -> usize {
    adkey_core::classical_ht::DEFAULT_BINS
}

fn default_panels() -> usize {
    QuadConfig::default().panels
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::read(path, e))?;
        let mut cfg: SweepConfig = serde_json::from_str(&text)
            .map_err(|e| AppError::Validation(format!("{}: parse error: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.scenario_path.is_relative() {
            cfg.scenario_path = base.join(&cfg.scenario_path);
        }
        if cfg.outputs.is_relative() {
            cfg.outputs = base.join(&cfg.outputs);
        }
        cfg.validate()
            .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> AppResult<()> {
        let bad = |m: String| Err(AppError::Validation(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {}", self.schema_version));
        }
        if self.n_min < 1 {
            return bad("n_min must be >= 1".into());
        }
        if self.n_max < self.n_min {
            return bad(format!("n_max {} below n_min {}", self.n_max, self.n_min));
        }
        if self.n_step < 1 {
            return bad("n_step must be >= 1".into());
        }
        if self.bins < 64 || !self.bins.is_power_of_two() {
            return bad(format!("bins {} must be a power of two >= 64", self.bins));
        }
        if !(1..=1000).contains(&self.quad_panels) {
            return bad(format!("quad_panels {} outside 1..=1000", self.quad_panels));
        }
        Ok(())
    }

    pub fn block_lengths(&self) -> Vec<usize> {
        (self.n_min..=self.n_max).step_by(self.n_step).collect()
    }

    pub fn quad(&self) -> QuadConfig {
        QuadConfig::with_panels(self.quad_panels)
    }
}

fn pool(threads: Option<usize>) -> AppResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        if k == 0 {
            return Err(AppError::Validation("--threads must be >= 1".into()));
        }
        b = b.num_threads(k);
    }
    b.build().map_err(|e| AppError::Output(format!("thread pool: {e}")))
}

/// One report per block length, in the order given.
pub fn compute_rows(
    sc: &Scenario,
    ns: &[usize],
    bins: usize,
    quad: &QuadConfig,
    threads: Option<usize>,
) -> AppResult<Vec<BoundReport>> {
    let pool = pool(threads)?;
    info!("evaluating {} block lengths on {} threads", ns.len(), pool.current_num_threads());
    pool.install(|| {
        ns.par_iter()
            .map(|&n| {
                let r = block_entropy_bounds(sc, n, bins, quad).map_err(|e| AppError::from_core(format!("n = {n}"), e))?;
                debug!("n = {n}: combined {:e}, fidelity {:e}", r.bound_combined, r.bound_fidelity);
                Ok(r)
            })
            .collect()
    })
}

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn record(r: &BoundReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        fmt_num(r.delta_n),
        fmt_num(r.h2_delta),
        fmt_num(r.bound_fidelity),
        fmt_num(r.bound_classical),
        fmt_num(r.bound_combined),
        fmt_num(r.chernoff_finite_lower),
        fmt_num(r.upper_bound),
        fmt_num(r.key_rate),
        fmt_num(r.ratio_rn),
        r.verdict.to_string(),
    ]
}

pub fn write_rows(path: &Path, rows: &[BoundReport]) -> AppResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| AppError::write(path, e))?;
    w.write_record(COLUMNS).map_err(|e| AppError::write(path, e))?;
    for r in rows {
        w.write_record(record(r)).map_err(|e| AppError::write(path, e))?;
    }
    w.flush().map_err(|e| AppError::write(path, e))
}

/// A parsed CSV row. `ln_delta_n` is not stored, so it is rebuilt from δₙ.
fn parse_row(rec: &csv::StringRecord) -> Result<BoundReport, String> {
    if rec.len() != COLUMNS.len() {
        return Err(format!("{} fields, expected {}", rec.len(), COLUMNS.len()));
    }
    let num = |i: usize| -> Result<f64, String> {
        rec[i]
            .parse::<f64>()
            .map_err(|_| format!("{}: cannot parse {:?}", COLUMNS[i], &rec[i]))
    };
    let delta_n = num(1)?;
    Ok(BoundReport {
        n: rec[0].parse().map_err(|_| format!("n: cannot parse {:?}", &rec[0]))?,
        delta_n,
        ln_delta_n: delta_n.ln(),
        h2_delta: num(2)?,
        bound_fidelity: num(3)?,
        bound_classical: num(4)?,
        bound_combined: num(5)?,
        chernoff_finite_lower: num(6)?,
        upper_bound: num(7)?,
        key_rate: num(8)?,
        ratio_rn: num(9)?,
        verdict: rec[10].parse().map_err(|e| format!("verdict: {e}"))?,
    })
}

/// Consistency of a single row.
pub fn check_row(r: &BoundReport) -> Result<(), String> {
    let unit = |name: &str, v: f64| -> Result<(), String> {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(format!("{name} = {v} outside [0,1]"))
        }
    };
    if r.n == 0 {
        return Err("n = 0".into());
    }
    if !(0.0..=0.5).contains(&r.delta_n) {
        return Err(format!("delta_n = {} outside [0,1/2]", r.delta_n));
    }
    unit("h2_delta", r.h2_delta)?;
    unit("bound_fidelity", r.bound_fidelity)?;
    unit("bound_classical", r.bound_classical)?;
    unit("bound_combined", r.bound_combined)?;
    unit("chernoff_finite_lower", r.chernoff_finite_lower)?;
    unit("upper_bound", r.upper_bound)?;
    if r.delta_n > 1e-300 {
        let h2 = ln_binary_entropy_from_ln(r.delta_n.ln()).exp();
        if (h2 - r.h2_delta).abs() > 1e-12 * h2.max(1e-300) {
            return Err(format!("h2_delta = {} but h2(delta_n) = {h2}", r.h2_delta));
        }
    }
    for (name, v) in [
        ("bound_fidelity", r.bound_fidelity),
        ("bound_classical", r.bound_classical),
        ("chernoff_finite_lower", r.chernoff_finite_lower),
    ] {
        if v > r.bound_combined + ROW_SLACK {
            return Err(format!("{name} = {v} exceeds bound_combined = {}", r.bound_combined));
        }
    }
    if r.bound_combined > r.upper_bound {
        return Err(format!(
            "bound_combined = {} exceeds upper_bound = {}",
            r.bound_combined, r.upper_bound
        ));
    }
    let expected = if r.bound_combined > r.h2_delta {
        Verdict::Positive
    } else if r.upper_bound < r.h2_delta {
        Verdict::Nonpositive
    } else {
        Verdict::Inconclusive
    };
    if r.verdict != expected {
        return Err(format!("verdict {} but the bounds give {expected}", r.verdict));
    }
    let gap = r.bound_combined - r.h2_delta;
    if r.key_rate.is_nan() || (gap > 0.0 && r.key_rate < 0.0) || (gap < 0.0 && r.key_rate > 0.0) {
        return Err(format!("key rate {} has the wrong sign", r.key_rate));
    }
    if r.key_rate.abs() > gap.abs() / r.n as f64 * (1.0 + 1e-12) {
        return Err(format!("key rate {} exceeds (H - h2)/n", r.key_rate));
    }
    if r.delta_n > 0.0 {
        if r.bound_combined == 0.0 && r.ratio_rn != 0.0 {
            return Err("ratio_Rn must be 0 when the entropy bound is 0".into());
        }
        if r.h2_delta > 1e-300 && r.bound_combined > 0.0 {
            let want = r.bound_combined / r.h2_delta;
            if want.is_finite() && (r.ratio_rn - want).abs() > 1e-9 * want {
                return Err(format!("ratio_Rn = {} but H/h2 = {want}", r.ratio_rn));
            }
        }
    } else if r.ratio_rn < 0.0 {
        // δₙ = 0 in the file is either ε = 0 (NaN) or underflow (any ratio ≥ 0).
        return Err(format!("ratio_Rn = {} is negative", r.ratio_rn));
    }
    Ok(())
}

/// Re-reads a sweep CSV, checks header, n-order and every row; when
/// `expected` is given also checks the values round-trip exactly.
pub fn validate_csv(path: &Path, expected: Option<&[BoundReport]>) -> AppResult<Vec<BoundReport>> {
    let fail = |m: String| AppError::Output(format!("{}: {m}", path.display()));
    let mut rd = csv::Reader::from_path(path).map_err(|e| fail(e.to_string()))?;
    let header = rd.headers().map_err(|e| fail(e.to_string()))?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(fail(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| fail(e.to_string()))?;
        let row = parse_row(&rec).map_err(|m| fail(format!("row {}: {m}", i + 1)))?;
        check_row(&row).map_err(|m| fail(format!("row {} (n = {}): {m}", i + 1, row.n)))?;
        if let Some(prev) = rows.last() {
            let prev: &BoundReport = prev;
            if row.n <= prev.n {
                return Err(fail(format!("row {}: n = {} not increasing", i + 1, row.n)));
            }
        }
        rows.push(row);
    }
    if let Some(exp) = expected {
        if exp.len() != rows.len() {
            return Err(fail(format!("{} rows written, {} read back", exp.len(), rows.len())));
        }
        for (a, b) in exp.iter().zip(&rows) {
            if record(a) != record(b) {
                return Err(fail(format!("n = {}: values do not round-trip", a.n)));
            }
        }
    }
    Ok(rows)
}

/// Evaluates, writes and validates one sweep.
pub fn run_sweep(cfg: &SweepConfig, threads: Option<usize>) -> AppResult<Vec<BoundReport>> {
    cfg.validate()?;
    let sc = load_scenario(&cfg.scenario_path)?.into_scenario();
    sweep_scenario(&sc, &cfg.block_lengths(), cfg.bins, &cfg.quad(), &cfg.outputs, threads)
}

pub fn sweep_scenario(
    sc: &Scenario,
    ns: &[usize],
    bins: usize,
    quad: &QuadConfig,
    out: &Path,
    threads: Option<usize>,
) -> AppResult<Vec<BoundReport>> {
    let rows = compute_rows(sc, ns, bins, quad, threads)?;
    write_rows(out, &rows)?;
    validate_csv(out, Some(&rows))?;
    info!("wrote {} rows to {}", rows.len(), out.display());
    Ok(rows)
}
