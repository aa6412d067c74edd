//! End-to-end tests of the `drlab` binary: subcommands, wire formats, and
//! the exit-code contract (0 ok, 2 parse, 3 invalid operator, 4 dimension,
//! 5 precondition).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use drlab::drcalc::DrDiagnosis;
use drlab::linrel::LinearRelation;
use drlab::numerics::Matrix;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    fs::create_dir_all(&dir).expect("tmp dir exists");
    dir.join(name)
}

fn write_matrix(path: &Path, m: &Matrix) {
    fs::write(path, serde_json::to_string(m).unwrap()).unwrap();
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

/// Builds a relation file by running `rel --matrix` and saving its stdout,
/// so downstream commands also exercise the wrapped-output parser.
fn relation_file_from_matrix(name: &str, m: &Matrix) -> PathBuf {
    let matrix_path = tmp(&format!("{name}.matrix.json"));
    write_matrix(&matrix_path, m);
    let out = run(&["rel", "--matrix", matrix_path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rel_path = tmp(&format!("{name}.relation.json"));
    fs::write(&rel_path, out.stdout).unwrap();
    rel_path
}

fn normal_cone_file(name: &str, basis: &Matrix) -> PathBuf {
    let basis_path = tmp(&format!("{name}.basis.json"));
    write_matrix(&basis_path, basis);
    let out = run(&["rel", "--normal-cone", basis_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rel_path = tmp(&format!("{name}.relation.json"));
    fs::write(&rel_path, out.stdout).unwrap();
    rel_path
}

#[test]
fn rel_reports_asymmetry_of_the_rotation_generator() {
    let path = tmp("rotation.json");
    write_matrix(
        &path,
        &Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]),
    );
    let out = run(&["rel", "--matrix", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["diagnostics"]["monotone"], serde_json::json!(true));
    assert_eq!(
        value["diagnostics"]["maximally_monotone"],
        serde_json::json!(true)
    );
    assert_eq!(value["diagnostics"]["symmetric"], serde_json::json!(false));
    // The printed relation parses back through the module parser.
    let rel: LinearRelation = serde_json::from_value(value["relation"].clone()).unwrap();
    assert_eq!(rel.n(), 2);
}

#[test]
fn rel_normal_cone_resolvent_is_the_axis_projector() {
    let basis = Matrix::from_rows(&[vec![1.0], vec![0.0]]);
    let rel_path = normal_cone_file("axis", &basis);
    let text = fs::read_to_string(&rel_path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rel: LinearRelation = serde_json::from_value(value["relation"].clone()).unwrap();
    let j = rel.resolvent().unwrap();
    assert!(j.matrix().max_abs_diff(&Matrix::diagonal(&[1.0, 0.0])) <= 1e-12);
}

#[test]
fn rel_rejects_an_expansive_resolvent_with_exit_3() {
    let path = tmp("expansive.json");
    write_matrix(&path, &Matrix::identity(2).scale(1.1));
    let out = run(&["rel", "--resolvent", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rel_flags_a_non_monotone_operator_with_exit_3() {
    let path = tmp("negdef.json");
    write_matrix(&path, &Matrix::identity(2).scale(-1.0));
    let out = run(&["rel", "--matrix", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    // Diagnostics still print before the failure exit.
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["diagnostics"]["monotone"], serde_json::json!(false));
}

#[test]
fn rel_usage_errors_exit_2() {
    assert_eq!(run(&["rel"]).status.code(), Some(2));
    let garbled = tmp("garbled.json");
    fs::write(&garbled, "{not json").unwrap();
    assert_eq!(
        run(&["rel", "--matrix", garbled.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["rel", "--matrix", "/nonexistent/x.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn dr_diagnoses_the_two_lines_pair() {
    let a = normal_cone_file("dr_a", &Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let b = normal_cone_file("dr_b", &Matrix::from_rows(&[vec![1.0], vec![1.0]]));
    let out = run(&["dr", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let diag: DrDiagnosis = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(!diag.proximal);
    let expected = Matrix::from_rows(&[vec![0.5, -0.5], vec![0.5, 0.5]]);
    assert!(diag.t.max_abs_diff(&expected) <= 1e-12);
    let c = diag.recovered_c.as_matrix().unwrap();
    let c_expected = Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
    assert!(c.max_abs_diff(&c_expected) <= 1e-12);

    // Output floats survive a parser round trip bit-identically.
    let reparsed: DrDiagnosis =
        serde_json::from_str(&serde_json::to_string(&diag).unwrap()).unwrap();
    assert_eq!(reparsed.t.max_abs_diff(&diag.t), 0.0);
}

#[test]
fn dr_of_a_pair_with_itself_is_proximal() {
    let a = relation_file_from_matrix("self_pair", &Matrix::diagonal(&[1.0, 2.0]));
    let out = run(&["dr", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let diag: DrDiagnosis = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(diag.proximal);
}

#[test]
fn dr_rejects_mismatched_dimensions_with_exit_4() {
    let a = relation_file_from_matrix("two_dim", &Matrix::diagonal(&[1.0, 2.0]));
    let b = relation_file_from_matrix("three_dim", &Matrix::diagonal(&[1.0, 2.0, 3.0]));
    let out = run(&["dr", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn iterate_emits_the_trace_with_constant_contraction() {
    let a = normal_cone_file("it_a", &Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let b = normal_cone_file("it_b", &Matrix::from_rows(&[vec![1.0], vec![1.0]]));
    let out = run(&[
        "iterate",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--x0",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iter,x_1,x_2,shadow_1,shadow_2,step_norm"
    );
    let steps: Vec<f64> = lines
        .clone()
        .take_while(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .collect();
    assert!(steps.len() > 30);
    for pair in steps.windows(2).take(30) {
        let ratio = pair[1] / pair[0];
        assert!(
            (ratio - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-9,
            "ratio {ratio}"
        );
    }
    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("# summary: converged=true"));
    assert!(summary.contains("dist_to_Z="));
}

#[test]
fn iterate_from_the_origin_converges_in_one_step() {
    let a = normal_cone_file("it0_a", &Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let b = normal_cone_file("it0_b", &Matrix::from_rows(&[vec![1.0], vec![1.0]]));
    let out = run(&[
        "iterate",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--x0",
        "0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text
        .lines()
        .last()
        .unwrap()
        .contains("converged=true iterations_used=1"));
}

#[test]
fn iterate_reports_no_convergence_but_exits_zero() {
    let a = normal_cone_file("nc_a", &Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let b = normal_cone_file("nc_b", &Matrix::from_rows(&[vec![1.0], vec![1.0]]));
    let out = run(&[
        "iterate",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--x0",
        "1,1",
        "--max-iter",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text
        .lines()
        .last()
        .unwrap()
        .contains("converged=false (NoConvergence)"));
}

#[test]
fn iterate_writes_csv_to_the_out_path() {
    let a = normal_cone_file("csv_a", &Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let b = normal_cone_file("csv_b", &Matrix::from_rows(&[vec![1.0], vec![1.0]]));
    let out_path = tmp("trace.csv");
    let out = run(&[
        "iterate",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--x0",
        "1,1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("iter,x_1,x_2,shadow_1,shadow_2,step_norm"));
    // Summary goes to stdout, not into the file.
    assert!(!csv.contains("# summary"));
    assert!(stdout_str(&out).contains("# summary"));
}

#[test]
fn sweep_fractions_match_the_dimension() {
    let out_path = tmp("sweep_n1.csv");
    let out = run(&[
        "sweep",
        "--n",
        "1",
        "--trials",
        "50",
        "--seed",
        "7",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("in_D fraction: 50/50 = 1"));

    let out_path3 = tmp("sweep_n3.csv");
    let out = run(&[
        "sweep",
        "--n",
        "3",
        "--trials",
        "200",
        "--seed",
        "42",
        "--out",
        out_path3.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("in_D fraction: 0/200 = 0"));
    let csv = fs::read_to_string(&out_path3).unwrap();
    assert!(csv.starts_with("trial,commutator_norm,in_D,proximal,dist_to_perturbed"));
}

#[test]
fn sweep_output_is_byte_deterministic() {
    let first = tmp("det_1.csv");
    let second = tmp("det_2.csv");
    for path in [&first, &second] {
        let out = run(&[
            "sweep",
            "--n",
            "2",
            "--trials",
            "64",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn sweep_reads_config_json_and_flags_override_it() {
    let cfg = tmp("sweep_cfg.json");
    fs::write(
        &cfg,
        r#"{"n": 1, "trials": 10, "seed": 3, "commute_tol": 1e-8, "lambda_escape": 1e-3}"#,
    )
    .unwrap();
    let out_path = tmp("sweep_cfg.csv");
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "25",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("in_D fraction: 25/25 = 1"));
}

#[test]
fn escape_perturbs_the_zero_pair_within_the_bound() {
    let zero = relation_file_from_matrix("zero_pair", &Matrix::zeros(2, 2));
    let out = run(&[
        "escape",
        zero.to_str().unwrap(),
        zero.to_str().unwrap(),
        "--lambda",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(value["commutator_norm"].as_f64().unwrap() > 0.0);
    assert!(value["dist_moved"].as_f64().unwrap() <= 4e-3);
    let a: LinearRelation = serde_json::from_value(value["a_perturbed"].clone()).unwrap();
    assert!(a.is_symmetric(1e-9).unwrap());
}

#[test]
fn escape_rejects_a_non_commuting_pair_with_exit_5() {
    let a = normal_cone_file("esc_a", &Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let b = normal_cone_file("esc_b", &Matrix::from_rows(&[vec![1.0], vec![1.0]]));
    let out = run(&[
        "escape",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--lambda",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn escape_with_a_large_interior_step_still_works() {
    let zero = relation_file_from_matrix("zero_big", &Matrix::zeros(2, 2));
    let out = run(&[
        "escape",
        zero.to_str().unwrap(),
        zero.to_str().unwrap(),
        "--lambda",
        "0.999",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let small: serde_json::Value = serde_json::from_str(&stdout_str(&run(&[
        "escape",
        zero.to_str().unwrap(),
        zero.to_str().unwrap(),
        "--lambda",
        "1e-3",
    ])))
    .unwrap();
    assert!(
        value["dist_moved"].as_f64().unwrap() > small["dist_moved"].as_f64().unwrap(),
        "larger steps move farther"
    );
}
