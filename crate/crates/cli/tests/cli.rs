use std::path::{Path, PathBuf};
use std::process::Command;

fn reference() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml")
}

fn dce(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dce")).args(args).output().expect("run dce")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn columns(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let head: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect()).collect();
    (head, rows)
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference();
    for run in ["a", "b"] {
        let out = dir.path().join(run).join("mirror");
        let o = dce(&[
            "--config",
            cfg.to_str().unwrap(),
            "--grid-points",
            "40",
            "--out",
            out.to_str().unwrap(),
            "mirror-spectrum",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for t in ["T0mK", "T25mK", "T50mK"] {
        let a = std::fs::read(dir.path().join(format!("a/mirror_{t}.csv"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b/mirror_{t}.csv"))).unwrap();
        assert_eq!(a, b, "{t}");
    }
}

#[test]
fn mirror_spectrum_columns_and_physics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = dce(&[
        "--config",
        reference().to_str().unwrap(),
        "--grid-points",
        "20",
        "--temperature-mk",
        "0,50",
        "--out",
        out.to_str().unwrap(),
        "mirror-spectrum",
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("m_T0mK.csv")).unwrap();
    assert!(text.starts_with("# "));
    assert!(text.contains("# temperature_mk: 0"));
    let (head, rows) = columns(&dir.path().join("m_T0mK.csv"));
    assert_eq!(head, ["omega_over_omega_d", "n_thermal", "n_total_analytic", "n_total_numeric"]);
    assert_eq!(rows.len(), 20);
    assert!((rows[0][0] - 0.025).abs() < 1e-12);
    let peak = rows[10][2] / (4.0 * rows[10][0] * (1.0 - rows[10][0]));
    for r in &rows {
        assert_eq!(r[1], 0.0);
        assert!((r[2] - peak * 4.0 * r[0] * (1.0 - r[0])).abs() <= 1e-10 * peak);
    }
    let (_, hot) = columns(&dir.path().join("m_T50mK.csv"));
    let mid = &hot[10];
    assert!(mid[2] - mid[1] > mid[1], "DCE term should exceed the thermal one at midband");
}

#[test]
fn resonator_spectrum_writes_mode_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = dce(&[
        "--config",
        reference().to_str().unwrap(),
        "--grid-points",
        "50",
        "--out",
        out.to_str().unwrap(),
        "resonator-spectrum",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r_tuned_modes.json")).unwrap()).unwrap();
    let q0 = sidecar["modes"][0]["quality"].as_f64().unwrap();
    assert!((q0 - 20.0).abs() < 1e-6);
    let f0 = sidecar["modes"][0]["frequency_over_omega_d"].as_f64().unwrap();
    assert!((f0 - 0.5).abs() < 1e-9);
    assert!(dir.path().join("r_two_mode_T10mK.csv").exists());
    let (head, _) = columns(&dir.path().join("r_detuned_T25mK.csv"));
    assert_eq!(head, ["omega_over_omega_d", "n_thermal", "n_total"]);
}

#[test]
fn json_format_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = dce(&[
        "--config",
        reference().to_str().unwrap(),
        "--grid-points",
        "16",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
        "squeezing",
    ]);
    assert!(o.status.success());
    let series: dce_core::series::SpectrumSeries =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(series.axis_name, "delta_omega_over_omega_d");
    for name in ["mirror_theta_minus", "mirror_theta_plus", "resonator_theta_minus", "po_theta_minus", "po_theta_plus"]
    {
        assert!(series.column(name).is_some(), "{name}");
    }
    let squeezed = series.real_column("mirror_theta_minus").unwrap();
    let anti = series.real_column("mirror_theta_plus").unwrap();
    assert!(squeezed.iter().zip(anti).all(|(s, a)| s < &1.0 && a > &1.0));
}

#[test]
fn other_commands_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference();
    for (cmd, file, cols) in [
        ("correlations", "c.csv", vec!["delta_omega_over_omega_d", "mirror_T0mK", "resonator_T0mK"]),
        ("g2", "g.csv", vec!["tau_times_omega_d", "g2_mirror", "g2_resonator"]),
        (
            "po-compare",
            "p_Q50.csv",
            vec!["omega_over_gamma0", "elastic_raw", "elastic_aligned", "anomalous_raw", "anomalous_aligned"],
        ),
    ] {
        let out = dir.path().join(&file[..1]);
        let o = dce(&[
            "--config",
            cfg.to_str().unwrap(),
            "--grid-points",
            "11",
            "--temperature-mk",
            "0",
            "--out",
            out.to_str().unwrap(),
            cmd,
        ]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let (head, rows) = columns(&dir.path().join(file));
        assert_eq!(head, cols, "{cmd}");
        assert!(!rows.is_empty());
    }
    let out = dir.path().join("n");
    let o = dce(&[
        "--config",
        cfg.to_str().unwrap(),
        "--grid-points",
        "8",
        "--temperature-mk",
        "0",
        "--out",
        out.to_str().unwrap(),
        "numsolve",
    ]);
    assert!(o.status.success());
    let (head, rows) = columns(&dir.path().join("n_T0mK.csv"));
    let resid = head.iter().position(|h| h == "symplectic_residual").unwrap();
    assert!(rows.iter().all(|r| r[resid] < 1e-8));
}

#[test]
fn rate_prints_table_values() {
    let o = dce(&["rate", "--amplitude-m", "1e-9", "--frequency", "1e9"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("1.181e-9"), "{text}");
    let o = dce(&["rate", "--amplitude-m", "1e-9", "--frequency", "1e9", "--quality", "100"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("1.181e-7"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = dce(&["mirror-spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    let o = dce(&["--config", "/nonexistent/run.toml", "mirror-spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    let text = std::fs::read_to_string(reference()).unwrap();
    let both = text.replace("ej_bias_ratio = 1.3", "ej_bias_ratio = 1.3\next_flux_bias_phi0 = 0.1");
    let p = write_config(dir.path(), &both);
    let o = dce(&["--config", p.to_str().unwrap(), "mirror-spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ej_bias_ratio"));
    let o = dce(&["--config", reference().to_str().unwrap(), "--temperature-mk", "-5", "mirror-spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    let o = dce(&["rate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // Full drive on a Q0 = 50 resonator is above the parametric threshold.
    let text = std::fs::read_to_string(reference()).unwrap().replace("ej_drive_ratio = 0.02\n", "\n");
    let p = write_config(dir.path(), &text);
    let out = dir.path().join("r");
    let o = dce(&[
        "--config",
        p.to_str().unwrap(),
        "--grid-points",
        "10",
        "--out",
        out.to_str().unwrap(),
        "resonator-spectrum",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("threshold"));
}
