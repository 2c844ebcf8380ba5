use std::process::{Command, Output};

fn oscper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscper"))
        .args(args)
        .env_remove("OSC_QUAD_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    lines
        .map(|l| l.split(',').nth(i).unwrap().to_string())
        .collect()
}

fn numbers(csv: &str, name: &str) -> Vec<f64> {
    column(csv, name)
        .iter()
        .map(|v| v.parse().unwrap())
        .collect()
}

#[test]
fn period_auto_pms_row() {
    let out = stdout(&oscper(&[
        "period",
        "--potential",
        "duffing:mu=1",
        "--amplitude",
        "10",
        "--order",
        "1",
        "--lambda",
        "auto-pms",
    ]));
    let t = numbers(&out, "t_delta")[0];
    let exact = numbers(&out, "t_exact")[0];
    assert!((t - 0.720_730_8).abs() < 1e-7);
    assert!((exact - 0.736_288_960_821_622).abs() < 1e-10);
    assert!((numbers(&out, "rel_error")[0] - (t - exact) / exact).abs() < 1e-14);
}

#[test]
fn fixed_imaginary_lambda() {
    let out = stdout(&oscper(&[
        "period",
        "--potential",
        "pendulum",
        "--amplitude",
        "1.5",
        "--lambda",
        "fixed:0.5i",
    ]));
    assert_eq!(numbers(&out, "s")[0], -0.25);
}

#[test]
fn converge_pms_scale_is_fastest() {
    let out = stdout(&oscper(&[
        "converge",
        "--potential",
        "duffing:mu=1",
        "--amplitude",
        "10",
        "--orders",
        "0..20",
        "--lambda-scale",
        "0.9,1.0,1.1",
    ]));
    assert_eq!(
        out.lines().next().unwrap(),
        "order,lambda_scale,s,t_partial,t_exact,abs_percent_error,sup_delta"
    );
    let scales = numbers(&out, "lambda_scale");
    let orders = numbers(&out, "order");
    let errors = numbers(&out, "abs_percent_error");
    assert_eq!(errors.len(), 63);
    let at = |scale: f64, order: f64| {
        errors[scales
            .iter()
            .zip(&orders)
            .position(|(&s, &o)| s == scale && o == order)
            .unwrap()]
    };
    assert!(at(1.0, 20.0) < at(0.9, 20.0));
    assert!(at(1.0, 20.0) < at(1.1, 20.0));
    for scale in [0.9, 1.0, 1.1] {
        assert!(at(scale, 20.0) < 1e-3 * at(scale, 0.0));
    }
}

#[test]
fn deflect_columns() {
    let out = stdout(&oscper(&[
        "deflect",
        "--gm",
        "14.62725",
        "--r0-over-rsun",
        "1",
        "--rsun",
        "6.95e8",
    ]));
    let exact = numbers(&out, "dphi_exact")[0];
    let pms = numbers(&out, "dphi_pms")[0];
    let asym = numbers(&out, "dphi_asymptotic")[0];
    assert!((asym - 8.4186e-8).abs() < 1e-12);
    assert!((exact / asym - 1.0).abs() < 1e-4);
    assert!((pms / exact - 1.0).abs() < 1e-6);
}

#[test]
fn arcsec_scales_angles_only() {
    let rad = stdout(&oscper(&["deflect", "--r0-over-rsun", "1"]));
    let arc = stdout(&oscper(&["deflect", "--r0-over-rsun", "1", "--arcsec"]));
    let ratio = numbers(&arc, "dphi_exact")[0] / numbers(&rad, "dphi_exact")[0];
    assert!((ratio - 206_264.806).abs() < 1e-6);
    assert_eq!(column(&rad, "r0"), column(&arc, "r0"));
    assert_eq!(column(&rad, "rel_error_pms"), column(&arc, "rel_error_pms"));
    // 4 gm / r0 with gm = 14.62725 m, in arcsec
    assert!((numbers(&arc, "dphi_exact")[0] - 0.017_365).abs() < 1e-5);
}

#[test]
fn precess_mercury() {
    let out = stdout(&oscper(&["precess"]));
    let exact = numbers(&out, "dtheta_exact")[0];
    assert!((exact / 4.927e-9 - 1.0).abs() < 1e-3);
    assert!((numbers(&out, "dtheta_pms")[0] / exact - 1.0).abs() < 1e-6);
}

#[test]
fn csv_is_byte_stable() {
    let args = [
        "sweep",
        "deflect",
        "--var",
        "r0-over-rsun",
        "--grid",
        "1:100:12",
        "--log",
    ];
    let a = oscper(&args);
    let b = oscper(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r0: Vec<f64> = numbers(&stdout(&a), "r0_over_rsun");
    assert_eq!(r0.len(), 12);
    assert!(r0.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn json_mirrors_csv() {
    let csv = stdout(&oscper(&["pendulum", "--theta", "0.5,1.5707963267948966"]));
    let json = stdout(&oscper(&[
        "pendulum",
        "--theta",
        "0.5,1.5707963267948966",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let keys: Vec<&str> = rows[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(header, keys);
    let from_csv = numbers(&csv, "t_pms");
    for (row, t) in rows.iter().zip(from_csv) {
        assert!((row["t_pms"].as_f64().unwrap() - t).abs() <= 1e-14 * t);
    }
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let out = oscper(&["pendulum", "--theta", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("theta,s_pms,t_pms,t_exact,rel_error\n"));
}

#[test]
fn tolerance_from_environment() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_oscper"))
            .args(["anharmonic", "--rho", "1", "--n", "3", "--amplitude", "1"])
            .env("OSC_QUAD_TOL", tol)
            .output()
            .unwrap()
    };
    let loose = stdout(&run("1e-3"));
    let tight = stdout(&run("1e-13"));
    let (a, b) = (numbers(&loose, "t_exact")[0], numbers(&tight, "t_exact")[0]);
    assert!((a - b).abs() < 1e-3 * b);
    let bad = run("zero");
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("OSC_QUAD_TOL"));
}

#[test]
fn exit_codes() {
    // parse errors
    for args in [
        &["period", "--potential", "quartic", "--amplitude", "1"][..],
        &[
            "period",
            "--potential",
            "duffing:mu=1,k=2",
            "--amplitude",
            "1",
        ],
        &[
            "period",
            "--potential",
            "duffing:mu=1",
            "--amplitude",
            "1",
            "--lambda",
            "best",
        ],
        &["sweep", "pendulum", "--var", "phi", "--grid", "0.1:1:3"],
        &["sweep", "pendulum", "--var", "theta", "--grid", "0.1:1"],
        &["deflect"],
        &["frobnicate"],
    ] {
        let out = oscper(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    // domain errors
    for args in [
        &["period", "--potential", "pendulum", "--energy", "2.5"][..],
        &["deflect", "--r0", "40"],
        &["precess", "--l-over-gm", "5"],
        &["pendulum", "--theta", "3.5"],
    ] {
        let out = oscper(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("oscper: "));
    }
}

#[test]
fn sweeps_cover_every_kind() {
    let cases: [&[&str]; 5] = [
        &[
            "sweep",
            "period",
            "--potential",
            "duffing:mu=1",
            "--var",
            "amplitude",
            "--grid",
            "0.1:10:4",
            "--log",
        ],
        &["sweep", "pendulum", "--var", "theta", "--grid", "0.2:2.0:4"],
        &[
            "sweep",
            "anharmonic",
            "--rho",
            "1",
            "--n",
            "4",
            "--var",
            "amplitude",
            "--grid",
            "0.5:1.5:4",
        ],
        &[
            "sweep",
            "deflect",
            "--var",
            "r0",
            "--grid",
            "50:5000:4",
            "--log",
        ],
        &[
            "sweep",
            "precess",
            "--var",
            "l-over-gm",
            "--grid",
            "10:1000:4",
            "--log",
        ],
    ];
    for args in cases {
        let out = stdout(&oscper(args));
        assert_eq!(out.lines().count(), 5, "{args:?}");
    }
}
