//! End-to-end CLI contract: exit codes, file outputs, exported field
//! structure.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rodspec")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn analytic_table_reaches_101_pi_squared() {
    let out = Command::new(bin())
        .args(["analytic", "--bc", "mixed", "--ell1", "1", "--eps", "0.1", "--modes", "11"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.contains("mode 11"), "{last}");
    assert!(last.contains("lambda/pi^2 = 101"), "{last}");
}

#[test]
fn empty_eps_list_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(
        &cfg,
        r#"{
  "domain": {"kind": "prism", "ell1": 1.0, "eps": 0.1},
  "bc": "mixed",
  "eps_list": [],
  "n_modes": 1,
  "resolution": [8, 2, 2]
}"#,
    );
    let status = Command::new(bin())
        .args(["--quiet", "sweep", "--config", cfg.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn missing_config_exits_with_config_code() {
    let status = Command::new(bin())
        .args(["--quiet", "solve", "--config", "/nonexistent/nope.json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1)); // io error on the config path
}

#[test]
fn compare_exit_codes_follow_the_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cmp.json");
    write(
        &cfg,
        r#"{
  "domain": {"kind": "prism", "ell1": 1.0, "eps": 0.1},
  "bc": "mixed",
  "n_modes": 3,
  "resolution": [32, 4, 4],
  "tol": 1e-9
}"#,
    );
    // first three modes on (32,4,4) are well within 1%
    let ok = Command::new(bin())
        .args(["--quiet", "compare", "--config", cfg.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    // an absurd threshold forces the acceptance-failure code
    let tight = Command::new(bin())
        .args([
            "--quiet",
            "compare",
            "--config",
            cfg.to_str().unwrap(),
            "--max-rel-err",
            "1e-12",
        ])
        .status()
        .unwrap();
    assert_eq!(tight.code(), Some(4));
}

#[test]
fn limit1d_step_weight_matches_pi_squared() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("limit.json");
    write(
        &cfg,
        r#"{
  "ell1": 1.0,
  "n_modes": 1,
  "elements_1d": 1000,
  "pieces": [[0.0, 0.5, 4.0], [0.5, 1.0, 1.0]]
}"#,
    );
    let out = Command::new(bin())
        .args([
            "limit1d",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("limit1d_report.json")).unwrap())
            .unwrap();
    let lambda1 = report["lambda"][0].as_f64().unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((lambda1 - pi2).abs() <= 1e-3 * pi2, "{lambda1}");
    let oracle1 = report["oracle"][0].as_f64().unwrap();
    assert!((oracle1 - pi2).abs() <= 1e-8);
}

#[test]
fn solve_exports_fields_matrices_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("solve.json");
    write(
        &cfg,
        r#"{
  "domain": {"kind": "prism", "ell1": 1.0, "eps": 0.1},
  "bc": "mixed",
  "n_modes": 2,
  "resolution": [16, 2, 2],
  "tol": 1e-9
}"#,
    );
    let out_dir = dir.path().join("out");
    let status = Command::new(bin())
        .args([
            "--quiet",
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--vtk",
            "--dump-matrices",
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let csv = std::fs::read_to_string(out_dir.join("modes.csv")).unwrap();
    assert!(csv.starts_with("mode,eps,lambda,residual,classification,transverse_fraction\n"));
    assert_eq!(csv.lines().count(), 3);

    // mode 1 of the mixed prism is positive everywhere (zeros on the bases)
    let vtk1 = std::fs::read_to_string(out_dir.join("mode_001.vtk")).unwrap();
    let values = vtk_point_scalars(&vtk1);
    assert!(values.iter().all(|v| *v >= -1e-12));
    assert!(values.iter().any(|v| *v > 0.1));

    // mode 2 changes sign axially: averages over the two halves oppose
    let vtk2 = std::fs::read_to_string(out_dir.join("mode_002.vtk")).unwrap();
    let points = vtk_points(&vtk2);
    let values2 = vtk_point_scalars(&vtk2);
    let (mut left, mut right) = (0.0, 0.0);
    for (p, v) in points.iter().zip(&values2) {
        if p[0] < 0.5 {
            left += v;
        } else if p[0] > 0.5 {
            right += v;
        }
    }
    assert!(left * right < 0.0, "halves {left} vs {right}");

    let index: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("modes_index.json")).unwrap())
            .unwrap();
    assert_eq!(index.as_array().unwrap().len(), 2);
    assert_eq!(index[0]["file"], "mode_001.vtk");
    assert_eq!(index[0]["classification"], "longitudinal");

    let mtx = std::fs::read_to_string(out_dir.join("k.mtx")).unwrap();
    assert!(mtx.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
    assert!(out_dir.join("m.mtx").exists());
    assert!(out_dir.join("mesh.vtk").exists());
}

#[test]
fn dirichlet_mode_vanishes_on_every_boundary_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("diri.json");
    write(
        &cfg,
        r#"{
  "domain": {"kind": "prism", "ell1": 1.0, "eps": 0.1},
  "bc": "dirichlet",
  "n_modes": 1,
  "resolution": [8, 4, 4],
  "tol": 1e-9
}"#,
    );
    let out_dir = dir.path().join("out");
    let status = Command::new(bin())
        .args([
            "--quiet",
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--vtk",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let vtk = std::fs::read_to_string(out_dir.join("mode_001.vtk")).unwrap();
    let points = vtk_points(&vtk);
    let values = vtk_point_scalars(&vtk);
    assert_eq!(points.len(), values.len());
    let mut boundary_count = 0;
    for (p, v) in points.iter().zip(&values) {
        let on_boundary = p
            .iter()
            .any(|c| c.abs() <= 1e-12 || (c - 1.0).abs() <= 1e-12);
        if on_boundary {
            boundary_count += 1;
            assert_eq!(*v, 0.0, "nonzero trace at {p:?}");
        }
    }
    assert!(boundary_count > 0);
}

fn vtk_points(text: &str) -> Vec<[f64; 3]> {
    let mut lines = text.lines();
    let mut n = 0usize;
    for line in lines.by_ref() {
        if let Some(rest) = line.strip_prefix("POINTS ") {
            n = rest.split_whitespace().next().unwrap().parse().unwrap();
            break;
        }
    }
    (0..n)
        .map(|_| {
            let parts: Vec<f64> = lines
                .next()
                .unwrap()
                .split_whitespace()
                .map(|t| t.parse().unwrap())
                .collect();
            [parts[0], parts[1], parts[2]]
        })
        .collect()
}

fn vtk_point_scalars(text: &str) -> Vec<f64> {
    let mut lines = text.lines();
    for line in lines.by_ref() {
        if line.starts_with("LOOKUP_TABLE") {
            break;
        }
    }
    lines
        .take_while(|l| !l.is_empty() && !l.starts_with("SCALARS"))
        .map(|l| l.trim().parse().unwrap())
        .collect()
}
