use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gcs_experiments::{
    evaluate_point, run_fig2, run_fig3, run_fig4, Fig2Config, Fig3Config, Fig4Config, Numerics,
    PointConfig, ThetaSpec,
};

fn bin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcs-experiments"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn real(s: &str) -> Option<f64> {
    (!s.is_empty()).then(|| s.parse().unwrap())
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn witness_reports_kerr_state_as_nonclassical() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["witness", "--alpha", "1", "--t", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("nonclassical     yes"));
    let (header, rows) = read_csv(&dir.path().join("witness.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col(&header, "nonclassical")], "1");
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("rows.witness.csv=1\n"));
}

#[test]
fn witness_on_coherent_state_is_classical() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["witness", "--alpha", "1.3", "--phi", "0.4", "--eps", "0", "--t", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nonclassical     no"));
    let (header, rows) = read_csv(&dir.path().join("witness.csv"));
    assert!(real(&rows[0][col(&header, "d3")]).unwrap().abs() < 1e-9);
}

#[test]
fn orthogonal_quadrature_blanks_g32_but_keeps_d3() {
    let dir = tempfile::tempdir().unwrap();
    // Kerr t = pi/4 with phi = 0 has arg<a> = -pi/4 - sin(pi/2), so this theta is orthogonal
    let theta = format!("value:{}", -PI / 4.0 - 1.0 + PI / 2.0);
    let o = bin(&["witness", "--alpha", "1", "--t", "pi/4", "--theta", &theta], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("g32              undefined"));
    let (header, rows) = read_csv(&dir.path().join("witness.csv"));
    assert_eq!(rows[0][col(&header, "g32")], "");
    assert_eq!(rows[0][col(&header, "divergence_flag")], "1");
    assert!(real(&rows[0][col(&header, "d3")]).unwrap() < 0.0);
}

#[test]
fn invalid_input_exits_with_two_before_writing() {
    let cases: [&[&str]; 6] = [
        &["witness", "--alpha", "-1", "--t", "0"],
        &["witness", "--alpha", "1", "--t", "0", "--eta", "1.5"],
        &["witness", "--alpha", "0", "--t", "0"],
        &["fig2", "--t-steps", "1"],
        &["fig2", "--t-min", "2", "--t-max", "1"],
        &["fig4", "--eta-list", "0.5,0"],
    ];
    for args in cases {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let o = bin(args, &out);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!out.join("manifest.txt").exists(), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["fig2", "--no-such-flag"], dir.path()).status.code(), Some(2));
}

#[test]
fn oversized_state_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &["sweep", "--alpha", "14", "--t-steps", "2", "--negativity"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

fn numerics() -> Numerics {
    Numerics::default()
}

fn assert_recomputed(point: PointConfig, g32: Option<f64>, gc32: f64) {
    let r = evaluate_point(&point, &numerics()).unwrap();
    assert!((r.gc32 - gc32).abs() <= 1e-12, "{point:?}: gc32 {} vs {gc32}", r.gc32);
    match (r.g32, g32) {
        (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12, "{point:?}: g32 {a} vs {b}"),
        (None, None) => {}
        (a, b) => panic!("{point:?}: g32 {a:?} vs {b:?}"),
    }
}

#[test]
fn figure_rows_are_recomputed_by_witness() {
    let dir = tempfile::tempdir().unwrap();
    let fig2 = Fig2Config {
        eps_list: vec![3.0],
        t_steps: 24,
        inset_steps: 5,
        ..Fig2Config::default()
    };
    run_fig2(&fig2, dir.path()).unwrap();
    let (h, rows) = read_csv(&dir.path().join("fig2_eps3.csv"));
    for row in rows.iter().step_by(5) {
        let point = PointConfig {
            alpha: 1.0,
            eps: 3.0,
            t: real(&row[col(&h, "t")]).unwrap(),
            theta: ThetaSpec::Match,
            ..PointConfig::default()
        };
        assert_recomputed(point, real(&row[col(&h, "g32")]), real(&row[col(&h, "gc32")]).unwrap());
    }
    let (h, rows) = read_csv(&dir.path().join("fig2_inset_eps3.csv"));
    assert!(!rows.is_empty());
    for row in rows.iter().step_by(3) {
        let point = PointConfig {
            alpha: 1.0,
            eps: 3.0,
            t: real(&row[col(&h, "t")]).unwrap(),
            theta: ThetaSpec::Value(real(&row[col(&h, "theta")]).unwrap()),
            ..PointConfig::default()
        };
        assert_recomputed(point, real(&row[col(&h, "g32")]), real(&row[col(&h, "gc32")]).unwrap());
    }

    let fig3 = Fig3Config {
        eps_list: vec![0.5],
        alpha_steps: 4,
        t_steps: 4,
        ..Fig3Config::default()
    };
    run_fig3(&fig3, dir.path()).unwrap();
    let (h, rows) = read_csv(&dir.path().join("fig3_eps0.5.csv"));
    assert_eq!(rows.len(), 16);
    for row in &rows {
        let alpha = real(&row[col(&h, "alpha")]).unwrap();
        let point = PointConfig {
            alpha,
            eps: 0.5,
            t: real(&row[col(&h, "t")]).unwrap(),
            ..PointConfig::default()
        };
        let gc = real(&row[col(&h, "gc32")]).unwrap();
        assert_recomputed(point, evaluate_point(&point, &numerics()).unwrap().g32, gc);
        let scaled = real(&row[col(&h, "abs_gc32_over_alpha_1p5")]).unwrap();
        assert_eq!(scaled, gc.abs() / alpha.powf(1.5));
    }

    let fig4 = Fig4Config {
        t_list: vec![PI / 2.0],
        eta_steps: 5,
        ..Fig4Config::default()
    };
    run_fig4(&fig4, dir.path()).unwrap();
    let (h, rows) = read_csv(&dir.path().join("fig4_t1.5708.csv"));
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let point = PointConfig {
            alpha: 1.0,
            t: PI / 2.0,
            eta: real(&row[col(&h, "eta")]).unwrap(),
            theta: ThetaSpec::Value(real(&row[col(&h, "theta")]).unwrap()),
            ..PointConfig::default()
        };
        assert_recomputed(point, real(&row[col(&h, "g32")]), real(&row[col(&h, "gc32")]).unwrap());
    }
}

#[test]
fn manifest_lists_every_csv_with_its_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["fig4", "--eta-steps", "3", "--t", "0.15,pi/4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    for name in ["fig4_t0.1500.csv", "fig4_t0.7854.csv"] {
        assert!(manifest.contains(&format!("rows.{name}=3\n")), "{manifest}");
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("t,one_minus_eta,eta,theta,gc32,g32,divergence_flag,negativity\n"));
        assert!(!text.contains('\r'));
    }
    assert!(manifest.contains("config.theta=match\n"));
    assert!(manifest.contains("tolerance.tail_tol="));
    assert!(manifest.lines().last().unwrap().starts_with("duration_seconds="));
}

#[test]
fn sweep_writes_one_row_per_time() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &["sweep", "--alpha", "1", "--eps", "3", "--t-max", "pi/3", "--t-steps", "7", "--negativity"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 7);
    let neg = col(&h, "negativity");
    assert!(real(&rows[0][neg]).unwrap() < 1e-4);
    assert!(real(&rows[3][neg]).unwrap() > 1e-2);
}
