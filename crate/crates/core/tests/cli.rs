use std::path::Path;
use std::process::{Command, Output};

fn uavloc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavloc"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn power_curve_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavloc(&["power-curve"], dir.path());
    assert!(out.status.success());
    let csv = read(&dir.path().join("power-curve.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("v_mps,induced_w,parasitic_w,blade_w,total_w")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 61);
    for r in &rows {
        assert_eq!(r.len(), 5);
        assert!((r[1] + r[2] + r[3] - r[4]).abs() < 1e-9 * r[4]);
    }
    assert!(String::from_utf8_lossy(&out.stdout).contains("hover"));
}

#[test]
fn sweep_schema_and_split_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavloc(
        &[
            "sweep-radius",
            "--trials",
            "5",
            "--r-min",
            "60",
            "--r-max",
            "120",
            "--r-step",
            "30",
            "--m-list",
            "3,4",
            "--out",
            "radius.csv",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for m in [3, 4] {
        let csv = read(&dir.path().join(format!("radius_m{m}.csv")));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "swept_value,mean_pos_err_m,mean_range_err_m,energy_j,coverage_m2,covered_nodes"
        );
        let radii: Vec<&str> = lines[1..]
            .iter()
            .map(|l| l.split(',').next().unwrap())
            .collect();
        assert_eq!(radii, ["60", "90", "120"]);
    }
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(
        summary.contains("M=3") && summary.contains("M=4"),
        "{summary}"
    );
}

#[test]
fn default_altitude_sweep_has_interior_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavloc(&["sweep-altitude", "--trials", "100"], dir.path());
    assert!(out.status.success());
    let csv = read(&dir.path().join("sweep-altitude.csv"));
    let best = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1])
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((100.0..=600.0).contains(&best.0), "{best:?}");
}

#[test]
fn evaluate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["evaluate", "--trials", "30", "--seed", "11"];
    assert!(
        uavloc(&[&args[..], &["--out", "a.csv"]].concat(), dir.path())
            .status
            .success()
    );
    assert!(
        uavloc(&[&args[..], &["--out", "b.csv"]].concat(), dir.path())
            .status
            .success()
    );
    let a = read(&dir.path().join("a.csv"));
    assert_eq!(a, read(&dir.path().join("b.csv")));
    assert_eq!(a.lines().count(), 2);
    assert!(a.ends_with('\n'));
}

#[test]
fn config_file_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "output_path = \"cov.csv\"\n[coverage]\ndelta = 3\n[grid]\nh_min = 200\nh_max = 400\nh_step = 200\n",
    )
    .unwrap();
    let out = uavloc(&["coverage", "--config", "run.toml"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(&dir.path().join("cov.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "h_m,r_c_m,coverage_m2,covered_nodes");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("200,"));
}

#[test]
fn bad_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[airframe]\nmass_kg = -1\n").unwrap();
    let out = uavloc(&["power-curve", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mass_kg"));

    std::fs::write(dir.path().join("typo.toml"), "[scenario]\nn_node = 5\n").unwrap();
    let out = uavloc(&["evaluate", "--config", "typo.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_node"));
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavloc(&["power-curve", "--out", "missing/dir/p.csv"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn infeasible_optimize_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavloc(
        &[
            "optimize", "--trials", "2", "--budget", "10", "--h-min", "200", "--h-max", "200",
            "--r-min", "100", "--r-max", "120", "--r-step", "20",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("energy budget"));
    let csv = read(&dir.path().join("optimize.csv"));
    assert_eq!(
        csv.lines().next(),
        Some("h_m,r_m,m_waypoints,t_h_s,mean_pos_err_m,energy_j,feasible")
    );
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",false")));
}

#[test]
fn optimize_reports_best_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavloc(
        &[
            "optimize", "--trials", "5", "--budget", "1e6", "--h-min", "150", "--h-max", "250",
            "--h-step", "100", "--r-min", "100", "--r-max", "120", "--r-step", "20", "--m-list",
            "3,4",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("best:"));
    let csv = read(&dir.path().join("optimize.csv"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn missing_budget_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavloc(&["optimize", "--trials", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget_j"));
}
