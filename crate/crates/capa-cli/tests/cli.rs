//! End-to-end tests of the `capa` binary: exit codes, diagnostics,
//! reproducibility, and the dual-oracle columns of each command.

use capa_core::capacity::{
    asymptotic_sum_rate, sum_rate_capacity, LinkBudget,
};
use capa_core::quadrature::{closed_form_gain_planar, TwoUserChannel};
use capa_core::UserSource;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

fn capa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("capa-test-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

const TWO_USER_BASE: &str = "\
[wave]
lambda = 0.0107

[user.1]
r = 10.0
phi = 1.0471975511965976
theta = 0.5235987755982988
gamma_db = 30.0

[user.2]
r = 20.0
phi = 1.0471975511965976
theta = 0.5235987755982988
gamma_db = 40.0

[quadrature]
panel_order = 8
";

#[test]
fn missing_config_is_usage_error() {
    let out = capa(&["gain"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--config"));
}

#[test]
fn config_parse_error_reports_line_and_field() {
    let cfg = write_config(
        "badfield.conf",
        "[wave]\nlambda = 0.0107\n[user.1]\nr = ten\nphi = 1.0\ntheta = 0.5\ngamma_db = 30\n",
    );
    let out = capa(&["gain", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 4") && msg.contains("user.1.r"), "{msg}");
}

#[test]
fn empty_sweep_is_usage_error() {
    let body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = planar\nlx = 0.5\nlz = 0.5\n\n[sweep]\nkind = list\nvalues =\n"
    );
    let cfg = write_config("emptysweep.conf", &body);
    let out = capa(&["sweep-aperture", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oversized_correlation_grid_is_convergence_error() {
    // quarter-wavelength panels over a kilometer-scale aperture blow past
    // the panel cap, which the correlation computation refuses
    let body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = planar\nlx = 1.0\nlz = 1.0\n\n[sweep]\nkind = list\nvalues = 20000.0\n"
    );
    let cfg = write_config("hugesweep.conf", &body);
    let out = capa(&["sweep-aperture", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("convergence"));
}

#[test]
fn occupancy_above_one_is_usage_error() {
    let body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = spd\nmx = 5\nmz = 5\nspacing = 0.00535\n\n[occupancy]\nkind = list\nvalues = 0.5, 1.2\n"
    );
    let cfg = write_config("mu12.conf", &body);
    let out = capa(&["sweep-occupancy", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("element_side > spacing"));
}

#[test]
fn sweep_runs_are_byte_identical() {
    let body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = planar\nlx = 0.5\nlz = 0.5\n\n[sweep]\nkind = list\nvalues = 0.1, 0.3\n"
    );
    let cfg = write_config("repro.conf", &body);
    let one = capa(&["sweep-aperture", "--config", cfg.to_str().unwrap()]);
    let two = capa(&["sweep-aperture", "--config", cfg.to_str().unwrap()]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
    assert!(!one.stdout.is_empty());
}

#[test]
fn out_flag_writes_file() {
    let body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = planar\nlx = 0.5\nlz = 0.5\n\n[sweep]\nkind = list\nvalues = 0.1\n"
    );
    let cfg = write_config("outflag.conf", &body);
    let out_path = std::env::temp_dir().join(format!("capa-out-{}.csv", std::process::id()));
    let out = capa(&[
        "sweep-aperture",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert!(written.starts_with("L,a1,a2,"));
    std::fs::remove_file(out_path).ok();
}

#[test]
fn gain_dual_oracle_planar_and_grid() {
    // planar: quadrature matches the closed form to 1e-6
    let body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = planar\nlx = 1.0\nlz = 1.0\n\n[sweep]\nkind = list\nvalues = 0.2, 0.7\n"
    );
    let cfg = write_config("gainplanar.conf", &body);
    let out = capa(&["gain", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let gap: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(gap.abs() <= 1e-6, "{line}");
    }

    // element grid at the default lattice: exact quadrature vs the
    // occupation-ratio approximation within 2%
    let body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = spd\nspacing = 0.00535\nelement_side = 0.0030183\n\n[sweep]\nkind = list\nvalues = 0.2, 0.35\n"
    );
    let cfg = write_config("gainspd.conf", &body);
    let out = capa(&["gain", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let gap: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(gap.abs() <= 0.02, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 4); // two geometries x two users
}

fn region_points(csv: &str) -> Vec<(String, f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let mut p = l.split(',');
            let kind = p.next().unwrap().to_string();
            let r1: f64 = p.next().unwrap().parse().unwrap();
            let r2: f64 = p.next().unwrap().parse().unwrap();
            (kind, r1, r2)
        })
        .collect()
}

#[test]
fn region_grid_inside_contiguous_region() {
    let spd_body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = spd\nmx = 21\nmz = 21\nspacing = 0.00535\nelement_side = 0.0030183\n\n[region]\nsegment_points = 5\n"
    );
    let box_side = 21.0 * 0.00535;
    let capa_body = format!(
        "{TWO_USER_BASE}\n[aperture]\nkind = planar\nlx = {box_side}\nlz = {box_side}\n\n[region]\nsegment_points = 5\n"
    );
    let spd_cfg = write_config("regionspd.conf", &spd_body);
    let capa_cfg = write_config("regioncapa.conf", &capa_body);
    let spd_out = capa(&["region", "--config", spd_cfg.to_str().unwrap()]);
    let capa_out = capa(&["region", "--config", capa_cfg.to_str().unwrap()]);
    assert_eq!(spd_out.status.code(), Some(0));
    assert_eq!(capa_out.status.code(), Some(0));
    let spd = region_points(&String::from_utf8(spd_out.stdout).unwrap());
    let cap = region_points(&String::from_utf8(capa_out.stdout).unwrap());
    // corner dominance: every grid corner sits inside the contiguous region
    for kind in ["corner_21", "corner_12"] {
        let s = spd.iter().find(|(k, _, _)| k == kind).unwrap();
        let c = cap.iter().find(|(k, _, _)| k == kind).unwrap();
        assert!(s.1 <= c.1 + 1e-12 && s.2 <= c.2 + 1e-12, "{kind}: {s:?} vs {c:?}");
    }
    // corner sum rates agree within each variant
    let s21 = spd.iter().find(|(k, _, _)| k == "corner_21").unwrap();
    let s12 = spd.iter().find(|(k, _, _)| k == "corner_12").unwrap();
    assert!((s21.1 + s21.2 - s12.1 - s12.2).abs() <= 1e-9);
}

#[test]
fn verify_fast_passes_across_seeds_and_negative_control_fails() {
    let base = "\
[wave]
lambda = 0.0107

[user.1]
r = 10.0
phi = 1.0471975511965976
theta = 0.5235987755982988
gamma_db = 30.0

[aperture]
kind = planar
lx = 0.3
lz = 0.3

[oracle]
grid = 12
trials = 10000
";
    for seed in [1u64, 7, 2024] {
        let cfg = write_config(&format!("verify{seed}.conf"), base);
        let out = capa(&[
            "verify",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            &seed.to_string(),
        ]);
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        assert_eq!(out.status.code(), Some(0), "seed {seed}: {text}");
        assert_eq!(text.matches("PASS").count(), 6, "{text}");
    }

    // detuned whitening root must be caught
    let body = format!("{base}lambda_scale = 1.1\n");
    let cfg = write_config("verifyneg.conf", &body);
    let out = capa(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL whitening"), "{text}");
}

#[test]
fn help_exits_zero() {
    let out = capa(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["gain", "sweep-aperture", "sweep-occupancy", "region", "verify"] {
        assert!(text.contains(sub), "missing {sub} in help");
    }
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = capa(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

/// Infinite-aperture limit: with both gains at their closed-form values for
/// an enormous aperture and the correlation at its large-aperture limit of
/// zero, the sum rate lands within 0.2 bits of the asymptotic expression.
#[test]
fn sum_rate_reaches_asymptote_at_extreme_aperture() {
    let u1 = UserSource::new(10.0, PI / 3.0, PI / 6.0).unwrap();
    let u2 = UserSource::new(20.0, PI / 3.0, PI / 6.0).unwrap();
    let l = 1000.0 * 20.0;
    let a1 = closed_form_gain_planar(l, l, &u1).unwrap();
    let a2 = closed_form_gain_planar(l, l, &u2).unwrap();
    let ch = TwoUserChannel::new(a1, a2, Complex64::new(0.0, 0.0)).unwrap();
    let lb1 = LinkBudget::from_db(30.0).unwrap();
    let lb2 = LinkBudget::from_db(40.0).unwrap();
    let c = sum_rate_capacity(&lb1, &lb2, &ch);
    let limit = asymptotic_sum_rate(lb1.gamma_bar(), lb2.gamma_bar(), 1.0);
    assert!(
        (c - limit).abs() <= 0.2,
        "C = {c}, asymptote = {limit}"
    );
}
