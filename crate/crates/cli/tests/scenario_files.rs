use std::path::PathBuf;

use adkey_cli::scenario_file::{conditional_states_file, load_scenario, parse_scenario, LoadedScenario};
use adkey_cli::AppError;
use adkey_core::adqkd::Scenario;
use adkey_core::matcore::fidelity;

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn validation_message(r: Result<LoadedScenario, AppError>) -> String {
    match r {
        Err(AppError::Validation(m)) => m,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn trivial_eve_has_four_equal_states() {
    let sc = load_scenario(&example("trivial_eve.json")).unwrap().into_scenario();
    assert_eq!(sc.eps(), 0.1);
    let m0 = sc.state(0, 0).matrix().clone();
    for (a, b) in [(0, 1), (1, 0), (1, 1)] {
        assert_eq!(sc.state(a, b).matrix(), &m0);
    }
}

// 4x4 real matrix exponential by scaling and squaring of a Taylor series.
fn expm4(k: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mul = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| {
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] = (0..4).map(|l| a[i][l] * b[l][j]).sum();
            }
        }
        c
    };
    let squarings = 10;
    let scale = 0.5_f64.powi(squarings);
    let a = k.map(|r| r.map(|x| x * scale));
    let mut sum = [[0.0; 4]; 4];
    let mut term = [[0.0; 4]; 4];
    for i in 0..4 {
        sum[i][i] = 1.0;
        term[i][i] = 1.0;
    }
    for j in 1..30 {
        term = mul(&term, &a).map(|r| r.map(|x| x / j as f64));
        for r in 0..4 {
            for c in 0..4 {
                sum[r][c] += term[r][c];
            }
        }
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

fn rotation(theta: f64) -> [[f64; 4]; 4] {
    let k: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| theta * (i.cmp(&j) as i32) as f64));
    expm4(&k)
}

// ρ = diag(p) with support {0, 3}: F(ρ, UρUᵀ) = ‖√ρ U √ρ‖₁, a 2x2 trace norm.
fn reference_fidelity(theta: f64) -> f64 {
    let p = [0.7_f64, 0.3];
    let idx = [0, 3];
    let u = rotation(theta);
    let m = |i: usize, j: usize| (p[i] * p[j]).sqrt() * u[idx[i]][idx[j]];
    let frob = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| m(i, j).powi(2)).sum::<f64>();
    let det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    (frob + 2.0 * det.abs()).sqrt()
}

#[test]
fn fig2_scenario_matches_an_independent_construction() {
    let sc = load_scenario(&example("fig2_f0684.json")).unwrap().into_scenario();
    assert_eq!(sc.eps(), 0.45);
    let f = fidelity(sc.state(0, 0), sc.state(1, 1)).unwrap();
    assert!((f - 0.684).abs() < 1e-9, "F = {f}");

    let (mut lo, mut hi) = (0.0, 0.6);
    assert!(reference_fidelity(lo) > 0.684 && reference_fidelity(hi) < 0.684);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if reference_fidelity(mid) > 0.684 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = rotation(lo);
    let p = [0.7, 0.0, 0.0, 0.3];
    let got = sc.state(1, 1).matrix();
    for i in 0..4 {
        for j in 0..4 {
            let want: f64 = (0..4).map(|l| u[i][l] * p[l] * u[j][l]).sum();
            assert!((got[(i, j)].re - want).abs() < 1e-12 && got[(i, j)].im == 0.0);
        }
    }
    let quarter = sc.state(0, 1).matrix();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(quarter[(i, j)].re, if i == j { 0.25 } else { 0.0 });
        }
    }
    assert_eq!(sc.state(1, 0).matrix(), quarter);
}

#[test]
fn tripartite_mode_measures_and_conditions() {
    // ρ_AB = 0.9 Φ⁺ + 0.1 Ψ⁺ with Eve's qubit in |0⟩; Z measurements give ε = 0.1.
    let h = 0.5;
    let mut rho = vec![vec![0.0; 8]; 8];
    // Indices are 4a + 2b + e with e = 0.
    for (w, v) in [(0.9, [(0usize, h), (6, h)]), (0.1, [(2, h), (4, h)])] {
        for &(i, x) in &v {
            for &(j, y) in &v {
                rho[i][j] += w * 2.0 * x * y;
            }
        }
    }
    let text = format!(
        r#"{{"schema_version": 1, "mode": "tripartite", "eps": 0.1,
            "state": {},
            "povm_a": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
            "povm_b": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]]}}"#,
        serde_json::to_string(&rho).unwrap()
    );
    let loaded = parse_scenario(&text, "inline").unwrap();
    assert!(matches!(loaded, LoadedScenario::Tripartite { .. }));
    let sc = loaded.scenario();
    assert!((sc.eps() - 0.1).abs() < 1e-12);
    // ρ_{ET|ab} is Eve's |0⟩ with T uniform over "no flip" and "flip".
    for a in 0..2 {
        for b in 0..2 {
            let m = sc.state(a, b).matrix();
            assert_eq!(m.nrows(), 4);
            assert!((m[(0, 0)].re - 0.5).abs() < 1e-12 && (m[(1, 1)].re - 0.5).abs() < 1e-12);
        }
    }

    let wrong = text.replace("\"eps\": 0.1", "\"eps\": 0.2");
    assert!(validation_message(parse_scenario(&wrong, "inline")).contains("eps"));
}

#[test]
fn bell_diagonal_mode() {
    let text = r#"{"schema_version": 1, "mode": "bell_diagonal",
        "lambdas": [0.85, 0.05, 0.05, 0.05],
        "angles": {"a0": 0.0, "a1": 1.5707963267948966, "b0": 0.0, "b1": 1.5707963267948966}}"#;
    let sc = parse_scenario(text, "inline").unwrap().into_scenario();
    assert!((sc.eps() - 0.1).abs() < 1e-12);
    // Eve's purifying system is 4-dimensional, times the flip register.
    assert_eq!(sc.dim(), 8);
}

#[test]
fn malformed_trace_names_matrix_and_deviation() {
    let text = std::fs::read_to_string(example("trivial_eve.json")).unwrap();
    let bad = text.replacen(
        r#""01": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]"#,
        r#""01": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.6, 0.0]]]"#,
        1,
    );
    assert_ne!(bad, text);
    let msg = validation_message(parse_scenario(&bad, "bad.json"));
    assert!(msg.contains("trace deviation"), "{msg}");
    assert!(msg.contains("states.01"), "{msg}");
}

#[test]
fn parse_errors_carry_line_context() {
    let text = "{\n  \"schema_version\": 1,\n  \"mode\": \"conditional_states\",\n  \"eps\": 0.1,\n  \"states\": [\n}";
    let msg = validation_message(parse_scenario(text, "broken.json"));
    assert!(msg.contains("broken.json") && msg.contains("line"), "{msg}");

    let unknown = r#"{"schema_version": 1, "mode": "nonsense"}"#;
    validation_message(parse_scenario(unknown, "x"));
    let version = r#"{"schema_version": 2, "mode": "bell_diagonal", "lambdas": [1, 0, 0, 0],
        "angles": {"a0": 0, "a1": 1.5707963267948966, "b0": 0, "b1": 1.5707963267948966}}"#;
    assert!(validation_message(parse_scenario(version, "x")).contains("schema_version"));
}

#[test]
fn non_hermitian_and_bad_eps_are_rejected() {
    let text = std::fs::read_to_string(example("trivial_eve.json")).unwrap();
    let skew = text.replacen(
        r#""10": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]"#,
        r#""10": [[[0.5, 0.0], [0.1, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]"#,
        1,
    );
    assert!(validation_message(parse_scenario(&skew, "x")).contains("states.10"));
    let eps = text.replace("\"eps\": 0.1", "\"eps\": 0.7");
    validation_message(parse_scenario(&eps, "x"));
}

#[test]
fn conditional_file_round_trips() {
    let sc = load_scenario(&example("fig2_f0684.json")).unwrap().into_scenario();
    let file = conditional_states_file(&sc, None);
    let text = serde_json::to_string(&file).unwrap();
    let back: Scenario = parse_scenario(&text, "rt").unwrap().into_scenario();
    assert_eq!(back.eps(), sc.eps());
    for a in 0..2 {
        for b in 0..2 {
            assert_eq!(back.state(a, b).matrix(), sc.state(a, b).matrix());
        }
    }
}
