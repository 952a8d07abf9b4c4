use std::path::Path;
use std::process::{Command, Output};

use wrinkle_cli::{run_stiffness, run_sweep, RunConfig};
use wrinkle_core::fpp::PointCloud;
use wrinkle_core::io::{save_phase_map, write_point_cloud};
use wrinkle_core::shearography::PhaseMap;

fn wrinkle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wrinkle"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_of(o: &Output) -> serde_json::Value {
    let line = String::from_utf8(o.stderr.clone()).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(
        v["error"]["code"].as_i64().unwrap(),
        o.status.code().unwrap() as i64
    );
    v
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn severity_listing_has_nine_angles() {
    let out = stdout(&wrinkle(&["table2"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[1], "0.10,32.14");
    assert_eq!(lines[5], "0.30,62.05");
    assert_eq!(lines[9], "0.50,72.34");
}

#[test]
fn specimen_one_report() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&wrinkle(&["stiffness", "--preset", "specimen-I"]))).unwrap();
    assert_eq!(
        format!("{:.2}", v["wrinkle"]["ratio"].as_f64().unwrap()),
        "0.18"
    );
    assert_eq!(v["plies"], 8);
    assert_eq!(v["convergence"]["converged"], true);
    assert_eq!(v["no_degradation"], false);
}

#[test]
fn severe_quasi_isotropic_preset_matches_fixture() {
    let r = run_stiffness(&RunConfig::preset("quasi-30-a2.5").unwrap(), None, None).unwrap();
    // Brute-force reference values (4096 strips, 16 z-samples per ply).
    for (i, j, want) in [
        (0, 0, 2.589623086739e1),
        (1, 1, 4.195750807430e1),
        (2, 2, 1.423802589968e1),
        (5, 5, 8.301532318433e0),
    ] {
        assert!((r.stiffness_gpa[i][j] - want).abs() < 1e-4 * want);
    }
    assert_eq!(r.wrinkle.ratio, 0.5);
}

#[test]
fn zero_amplitude_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "flat.json",
        r#"{"layup": "[0/90]_2s", "wrinkle": {"wavelength": 5, "amplitude": 0}}"#,
    );
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&wrinkle(&["stiffness", "--config", &cfg]))).unwrap();
    assert_eq!(v["no_degradation"], true);
    assert!(v["convergence"]["max_entry_change"].as_f64().unwrap() < 1e-12);
}

#[test]
fn sweep_rows_and_ranges() {
    let out = stdout(&wrinkle(&["sweep", "--preset", "specimen-II"]));
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.windows(2).all(|w| w[1][2] <= w[0][2]));

    let mut cfg = RunConfig::preset("specimen-II").unwrap();
    cfg.sweep = Some(wrinkle_cli::config::SweepSpec {
        start: 0.3,
        stop: 0.2,
        step: 0.1,
    });
    assert_eq!(
        run_sweep(&cfg, None, None).unwrap(),
        format!("{}\n", wrinkle_cli::SWEEP_HEADER.join(","))
    );

    let ratio = 1.0 / 8.3;
    cfg.sweep = Some(wrinkle_cli::config::SweepSpec {
        start: ratio,
        stop: ratio,
        step: 0.1,
    });
    let single = run_sweep(&cfg, None, None).unwrap();
    let e_x: f64 = single
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    let report = run_stiffness(&RunConfig::preset("specimen-II").unwrap(), None, None).unwrap();
    assert_eq!(single.lines().count(), 2);
    assert!((e_x - report.effective_constants.e11).abs() <= 1e-12 * e_x);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let run = |threads: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_wrinkle"))
            .env("RAYON_NUM_THREADS", threads)
            .args(args)
            .output()
            .unwrap()
            .stdout
    };
    for args in [
        &["sweep", "--preset", "cross-ply-8-a0.5", "--strips", "64"][..],
        &["stiffness", "--preset", "quasi-30-a1"][..],
    ] {
        assert_eq!(run("1", args), run("4", args));
    }
}

#[test]
fn discretization_flags_apply() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&wrinkle(&[
        "stiffness",
        "--preset",
        "specimen-II",
        "--strips",
        "64",
        "--zpoints",
        "2",
    ])))
    .unwrap();
    assert_eq!(v["discretization"]["n_strips"], 64);
    assert_eq!(v["convergence"]["refined_discretization"]["n_z_points"], 4);
}

#[test]
fn compare_reproduces_both_conventions() {
    let shear = stdout(&wrinkle(&[
        "compare",
        "--preset",
        "shearography-specimen-I",
        "--denominator",
        "measured",
    ]));
    assert!(shear.lines().nth(1).unwrap().ends_with(",6.7%"));
    let fpp = stdout(&wrinkle(&["compare", "--preset", "fpp-specimen-I"]));
    assert!(fpp.lines().nth(1).unwrap().contains(",reference,"));
    assert!(fpp.lines().nth(1).unwrap().ends_with(",8.4%"));
    assert!(fpp.lines().nth(4).unwrap().ends_with(",15.6%"));

    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.csv", "measured,reference\n-375,-350\n3,3\n");
    let out = stdout(&wrinkle(&["compare", &f, "--denominator", "measured"]));
    assert_eq!(out.lines().nth(2).unwrap(), ",3,3,measured,0,0.0%");
}

#[test]
fn error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        "{\n  \"layup\": \"[0]_8\",\n  \"amplitude\": 1\n}\n",
    );
    let o = wrinkle(&["stiffness", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(error_of(&o)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("line 3"));

    let zero = write(dir.path(), "z.csv", "measured,reference\n0,1\n");
    let o = wrinkle(&["compare", &zero, "--denominator", "measured"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_of(&o)["error"]["kind"], "math");

    let o = wrinkle(&["compare", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    let o = wrinkle(&[
        "compare",
        "--preset",
        "fpp-specimen-I",
        "--denominator",
        "median",
    ]);
    assert_eq!(o.status.code(), Some(2));
    error_of(&o);
}

#[test]
fn shear_integrate_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let map = PhaseMap::unwrapped(ndarray::Array2::from_elem((5, 3), 1.0), 0.1).unwrap();
    let phase = dir.path().join("p.phm");
    save_phase_map(&phase, &map).unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"shear": {"shear": 5.0}, "phase": {"pixel_pitch": 0.1, "wrapped": false}}"#,
    );
    let out = stdout(&wrinkle(&[
        "shear-integrate",
        phase.to_str().unwrap(),
        "--config",
        &cfg,
    ]));
    let rows: Vec<f64> = out
        .lines()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    let slope = 632.8 / (4.0 * std::f64::consts::PI * 5.0) * 0.1;
    for (i, w) in rows.iter().enumerate() {
        assert!((w - slope * i as f64).abs() < 1e-9);
    }
}

#[test]
fn fpp_extract_writes_grid_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let lattice = |dz: f64, dx: f64| {
        PointCloud::new(
            (0..100)
                .map(|k| [(k % 10) as f64 * 0.5 + dx, (k / 10) as f64 * 0.5, dz])
                .collect(),
        )
        .unwrap()
    };
    let save = |name: &str, c: &PointCloud| {
        let p = dir.path().join(name);
        write_point_cloud(std::fs::File::create(&p).unwrap(), c).unwrap();
        p.to_str().unwrap().to_owned()
    };
    let (b, a, far) = (
        save("b.csv", &lattice(0.0, 0.0)),
        save("a.csv", &lattice(0.25, 0.0)),
        save("f.csv", &lattice(0.0, 50.0)),
    );
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"fpp": {"grid": {"origin": [0, 0], "spacing": [0.25, 0.25], "counts": [19, 19]}}}"#,
    );
    let out = dir.path().join("d.csv");
    let o = wrinkle(&[
        "fpp-extract",
        &b,
        &a,
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    stdout(&o);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().all(|l| l
        .split(',')
        .all(|v| (v.parse::<f64>().unwrap() - 0.25).abs() < 1e-12)));
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(side["mask_rle"], serde_json::json!([0, 361]));

    let o = wrinkle(&["fpp-extract", &b, &far, "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
}
