//! End-to-end tests of the command-line surface: flag handling, file formats,
//! exit codes, and cross-command round trips.

use std::path::{Path, PathBuf};
use std::process::Command;

use sphdesign_core::approx::{wendland_field_at, wendland_phi};
use sphdesign_core::io;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sphdesign")
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("sphdesign-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin()).args(args).output().expect("spawn");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn grab(stdout: &str, key: &str) -> f64 {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} not in output:\n{stdout}"))
        .parse()
        .unwrap()
}

#[test]
fn verify_octahedron_design_and_nondesign_degrees() {
    let oct = data_dir().join("spd_t3.pts");
    let (code, stdout, _) = run(&["verify", "--points", oct.to_str().unwrap(), "--t", "3"]);
    assert_eq!(code, 0);
    assert!(grab(&stdout, "sqrtA") <= 1e-12);
    // The same six points fail degree 4 badly.
    let (code, stdout, _) = run(&["verify", "--points", oct.to_str().unwrap(), "--t", "4"]);
    assert_eq!(code, 0);
    assert!(grab(&stdout, "sqrtA") > 0.1);
    // Octahedron vertex separation is sqrt(2); the computed design carries
    // optimizer-level coordinate error, the exact vertices none.
    let (_, stdout, _) = run(&["verify", "--points", oct.to_str().unwrap(), "--t", "3"]);
    assert!((grab(&stdout, "min_separation") - 2.0f64.sqrt()).abs() < 1e-7);

    let exact = tmp("octahedron_exact.pts");
    let half = std::f64::consts::FRAC_PI_2;
    std::fs::write(
        &exact,
        format!(
            "# points N=6 t=3\n0 0\n{pi} 0\n{half} 0\n{half} {half}\n{half} {pi}\n{half} {three_half}\n",
            pi = std::f64::consts::PI,
            half = half,
            three_half = 3.0 * half,
        ),
    )
    .unwrap();
    let (code, stdout, _) = run(&["verify", "--points", exact.to_str().unwrap(), "--t", "3"]);
    assert_eq!(code, 0);
    assert!(grab(&stdout, "sqrtA") <= 1e-12);
    assert!((grab(&stdout, "min_separation") - 2.0f64.sqrt()).abs() < 1e-12);
}

#[test]
fn verify_rejects_malformed_file_with_exit_1() {
    let bad = tmp("broken.pts");
    std::fs::write(&bad, "# points N=5\n0.1 0.2\n").unwrap();
    let (code, _, stderr) = run(&["verify", "--points", bad.to_str().unwrap(), "--t", "2"]);
    assert_eq!(code, 1, "stderr: {stderr}");
}

#[test]
fn design_nonconvergence_exits_2_with_partial_output() {
    let out = tmp("unconverged.pts");
    let (code, _, _) = run(&[
        "design",
        "--init",
        "spiral",
        "--t",
        "16",
        "--max-iters",
        "1",
        "--eps",
        "1e-30",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(out.exists(), "partial output should still be written");
}

#[test]
fn resample_grid_mode_ceiling_and_clamping() {
    // 2x4 grid with distinct values; theta slightly past the equator maps to
    // row 2, phi=0 clamps to column 1, and the pole row clamps to 1.
    let grid = tmp("grid_2x4.grd");
    std::fs::write(&grid, "# grid m=2 n=4\n1 2 3 4\n5 6 7 8\n").unwrap();
    let pts = tmp("probe.pts");
    let theta_probe = std::f64::consts::FRAC_PI_2 + 0.01;
    std::fs::write(
        &pts,
        format!("# points N=2\n{theta_probe:.16e} 0.0\n0.0 1.0\n"),
    )
    .unwrap();
    let out = tmp("resampled.fld");
    let (code, _, _) = run(&[
        "resample",
        "--grid",
        grid.to_str().unwrap(),
        "--points",
        pts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let values = io::read_field(&out).unwrap();
    assert_eq!(values[0], 5.0); // row 2, col 1
    assert_eq!(values[1], 1.0); // pole clamps to row 1; phi=1.0 -> col ceil(1.0/(pi/2)) = 1
}

#[test]
fn resample_constant_grid_gives_constant_field() {
    let grid = tmp("grid_const.grd");
    let values = vec!["7.5"; 12].join(" ");
    std::fs::write(&grid, format!("# grid m=3 n=4\n{values}\n")).unwrap();
    let out = tmp("const.fld");
    let (code, _, _) = run(&[
        "resample",
        "--grid",
        grid.to_str().unwrap(),
        "--points",
        data_dir().join("spd_t5.pts").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(io::read_field(&out).unwrap().iter().all(|&v| v == 7.5));
}

#[test]
fn image_mode_uses_swapped_index_convention() {
    // One tall grid: image mode indexes rows by phi/d_theta, so a point with
    // phi just above zero and large theta still reads row 1.
    let grid = tmp("grid_img.grd");
    std::fs::write(&grid, "# grid m=2 n=2\n1 2\n3 4\n").unwrap();
    let pts = tmp("img_probe.pts");
    std::fs::write(&pts, "# points N=1\n3.0 0.1\n").unwrap();
    let out = tmp("img.fld");
    let (code, _, _) = run(&[
        "resample",
        "--image",
        grid.to_str().unwrap(),
        "--points",
        pts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    // i = ceil(0.1 / (pi/2)) = 1; j = ceil(3.0 / pi) = 1.
    assert_eq!(io::read_field(&out).unwrap()[0], 1.0);
}

#[test]
fn fmt_round_trip_through_files() {
    // Decompose then reconstruct samples of a low-degree harmonic over the
    // shipped (16,32) chain; the field file must come back to 1e-9.
    let chain16 = data_dir().join("spd_t16.pts");
    let chain32 = data_dir().join("spd_t32.pts");
    let (finest, _) = io::read_points(&chain32).unwrap();
    let field: Vec<f64> = (0..finest.len())
        .map(|i| {
            let y =
                sphdesign_core::sht::eval_ylm(7, 3, finest.theta()[i], finest.phi()[i]).unwrap();
            1.25 * y.re - 0.5 * y.im
        })
        .collect();
    let field_path = tmp("fmt_field.fld");
    io::write_field(&field_path, &field).unwrap();

    let pyramid_path = tmp("fmt.pyr");
    let (code, _, stderr) = run(&[
        "fmt",
        "--mode",
        "decompose",
        "--field",
        field_path.to_str().unwrap(),
        "--chain",
        chain16.to_str().unwrap(),
        chain32.to_str().unwrap(),
        "--bank",
        "eta2",
        "--out",
        pyramid_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");

    let back_path = tmp("fmt_back.fld");
    let (code, _, stderr) = run(&[
        "fmt",
        "--mode",
        "reconstruct",
        "--pyramid",
        pyramid_path.to_str().unwrap(),
        "--chain",
        chain16.to_str().unwrap(),
        chain32.to_str().unwrap(),
        "--bank",
        "eta2",
        "--out",
        back_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");

    let back = io::read_field(&back_path).unwrap();
    let err: f64 = field
        .iter()
        .zip(&back)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = field.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(err / norm < 1e-9, "round trip error {:.3e}", err / norm);
}

#[test]
fn project_recovers_one_hot_coefficients() {
    let design = data_dir().join("spd_t16.pts");
    let (points, _) = io::read_points(&design).unwrap();
    let field: Vec<f64> = (0..points.len())
        .map(|i| {
            sphdesign_core::sht::eval_ylm(2, 0, points.theta()[i], points.phi()[i])
                .unwrap()
                .re
        })
        .collect();
    let field_path = tmp("proj_field.fld");
    io::write_field(&field_path, &field).unwrap();
    let coeff_path = tmp("proj.shc");
    let (code, _, _) = run(&[
        "project",
        "--field",
        field_path.to_str().unwrap(),
        "--points",
        design.to_str().unwrap(),
        "--degree",
        "8",
        "--out",
        coeff_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let coeffs = io::read_coeffs(&coeff_path).unwrap();
    for l in 0..=8usize {
        for m in -(l as i64)..=(l as i64) {
            let expect = if (l, m) == (2, 0) { 1.0 } else { 0.0 };
            assert!(
                (coeffs.get(l, m) - num_complex::Complex64::new(expect, 0.0)).norm() < 1e-10,
                "({l},{m})"
            );
        }
    }
}

#[test]
fn wendland_cli_matches_direct_center_sum() {
    // A tiny point file holding the first octahedron center.
    let pts = tmp("wendland_probe.pts");
    std::fs::write(&pts, "# points N=1\n1.5707963267948966 0.0\n").unwrap();
    let out = tmp("wendland.fld");
    let (code, _, _) = run(&[
        "wendland",
        "--k",
        "0",
        "--points",
        pts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let got = io::read_field(&out).unwrap()[0];
    let expect = wendland_field_at(0, [1.0, 0.0, 0.0]).unwrap();
    assert!((got - expect).abs() < 1e-14);
    // And the direct multiplicity identity at a center.
    let by_shells = wendland_phi(0, 0.0).unwrap()
        + 4.0 * wendland_phi(0, 2.0f64.sqrt()).unwrap()
        + wendland_phi(0, 2.0).unwrap();
    assert!((got - by_shells).abs() < 1e-14);
}

#[test]
fn denoise_zero_sigma_reports_infinite_snr() {
    // Clean band-limited input and sigma = 0: exact recovery, inf sentinel.
    let chain: Vec<PathBuf> = ["spd_t16.pts", "spd_t32.pts"]
        .iter()
        .map(|n| data_dir().join(n))
        .collect();
    let (finest, _) = io::read_points(&chain[1]).unwrap();
    let field: Vec<f64> = (0..finest.len())
        .map(|i| {
            sphdesign_core::sht::eval_ylm(5, -2, finest.theta()[i], finest.phi()[i])
                .unwrap()
                .re
                + 0.3
        })
        .collect();
    let field_path = tmp("den_clean.fld");
    io::write_field(&field_path, &field).unwrap();
    let out = tmp("den_out.fld");
    let report = tmp("den_report.txt");
    let (code, stdout, stderr) = run(&[
        "denoise",
        "--field",
        field_path.to_str().unwrap(),
        "--chain",
        chain[0].to_str().unwrap(),
        chain[1].to_str().unwrap(),
        "--bank",
        "eta3",
        "--sigma",
        "0",
        "--layer",
        "27",
        "--out",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    // Recovery is exact to projection/reconstruction accuracy; SNR must be
    // huge or the sentinel.
    let line = stdout
        .lines()
        .find(|l| l.starts_with("snr_out "))
        .expect("snr_out line");
    let value = line.split_whitespace().nth(1).unwrap();
    let fine = value == "inf" || value.parse::<f64>().unwrap() > 80.0;
    assert!(fine, "snr_out = {value}");
    let report_text = std::fs::read_to_string(&report).unwrap();
    assert!(report_text.contains("snr_in"));
    assert!(report_text.contains("kill_ratio_0_1"));
}

#[test]
fn denoise_rejects_mismatched_sizes_with_exit_1() {
    let chain: Vec<PathBuf> = ["spd_t16.pts", "spd_t32.pts"]
        .iter()
        .map(|n| data_dir().join(n))
        .collect();
    let field_path = tmp("den_bad.fld");
    io::write_field(&field_path, &[1.0, 2.0, 3.0]).unwrap();
    let (code, _, _) = run(&[
        "denoise",
        "--field",
        field_path.to_str().unwrap(),
        "--chain",
        chain[0].to_str().unwrap(),
        chain[1].to_str().unwrap(),
        "--sigma",
        "0.1",
        "--layer",
        "15",
        "--out",
        tmp("den_bad_out.fld").to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn filters_csv_has_profiles() {
    let out = tmp("filters.csv");
    let (code, _, _) = run(&[
        "filters",
        "--bank",
        "eta3",
        "--t",
        "32",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("l,xi,a,b1,b2,b3"));
    assert_eq!(text.lines().count(), 34);
}

#[test]
fn outputs_identical_across_thread_counts() {
    // The fixed reduction trees make results bit-identical for any worker
    // count; compare full pipeline outputs under SPHDESIGN_THREADS=1 and 2.
    let chain: Vec<PathBuf> = ["spd_t16.pts", "spd_t32.pts"]
        .iter()
        .map(|n| data_dir().join(n))
        .collect();
    let field_path = tmp("det_field.fld");
    let (finest, _) = io::read_points(&chain[1]).unwrap();
    let field: Vec<f64> = (0..finest.len())
        .map(|i| (finest.theta()[i] * 2.0).sin() + 0.2 * (3.0 * finest.phi()[i]).cos())
        .collect();
    io::write_field(&field_path, &field).unwrap();

    let run_with = |threads: &str, out: &Path| {
        let status = Command::new(bin())
            .env("SPHDESIGN_THREADS", threads)
            .args([
                "denoise",
                "--field",
                field_path.to_str().unwrap(),
                "--chain",
                chain[0].to_str().unwrap(),
                chain[1].to_str().unwrap(),
                "--sigma",
                "0.1",
                "--seed",
                "7",
                "--layer",
                "15",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    let out1 = tmp("det_t1.fld");
    let out2 = tmp("det_t2.fld");
    run_with("1", &out1);
    run_with("2", &out2);
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out2).unwrap(),
        "outputs differ across thread counts"
    );
}
