use std::path::Path;
use std::process::{Command, Output};

use fso_dtat::image::{synthetic_scene, ImageTensor};
use fso_dtat::metrics::psnr;
use fso_dtat::report::CSV_COLUMNS;

fn fso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fso-dtat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fso(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fixture(dir: &Path, name: &str, seed: u64) -> String {
    let path = dir.join(name);
    synthetic_scene(64, 64, seed)
        .unwrap()
        .write_ppm(&path)
        .unwrap();
    path.to_str().unwrap().to_string()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn default_config_is_valid_json() {
    let text = ok(&["config", "coherent"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["baud_rate"], 25e9);
}

#[test]
fn channel_sample_emits_unit_mean_gains() {
    let text = ok(&[
        "channel", "sample", "--alpha", "7.109", "--beta", "5.578", "--n", "20000", "--seed", "3",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,fading_gain,rop_dbm"));
    let gains: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(gains.len(), 20000);
    let mean = gains.iter().sum::<f64>() / gains.len() as f64;
    assert!((mean - 1.0).abs() < 0.03, "{mean}");
}

#[test]
fn rop_series_is_reproducible() {
    let run = || ok(&["channel", "rop-series", "--n", "10", "--seed", "9"]);
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a.lines().count(), 11);
}

#[test]
fn analog_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let img = fixture(dir.path(), "a.ppm", 1);
    let (sym, meta, out) = (
        p(dir.path(), "a.sym"),
        p(dir.path(), "a.json"),
        p(dir.path(), "a_out.ppm"),
    );
    ok(&[
        "encode-analog",
        "--image",
        &img,
        "--ratio",
        "0.125",
        "--out-symbols",
        &sym,
        "--out-meta",
        &meta,
    ]);
    ok(&[
        "decode-analog",
        "--in-symbols",
        &sym,
        "--meta",
        &meta,
        "--noise-var",
        "0",
        "--out",
        &out,
    ]);
    let q = psnr(
        &ImageTensor::read_ppm(&img).unwrap(),
        &ImageTensor::read_ppm(&out).unwrap(),
    )
    .unwrap();
    assert!(q > 25.0, "PSNR {q}");
    let text = ok(&["metrics", "ms-ssim", "--a", &img, "--b", &out]);
    assert!(
        text.starts_with("ms_ssim=0.") && text.contains("ms_ssim_db="),
        "{text}"
    );
}

#[test]
fn analog_decode_rejects_a_foreign_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let img = fixture(dir.path(), "a.ppm", 1);
    let (sym, meta) = (p(dir.path(), "a.sym"), p(dir.path(), "a.json"));
    ok(&[
        "encode-analog",
        "--image",
        &img,
        "--ratio",
        "0.125",
        "--out-symbols",
        &sym,
        "--out-meta",
        &meta,
    ]);
    let (sym2, meta2) = (p(dir.path(), "b.sym"), p(dir.path(), "b.json"));
    ok(&[
        "encode-analog",
        "--image",
        &img,
        "--ratio",
        "0.0625",
        "--out-symbols",
        &sym2,
        "--out-meta",
        &meta2,
    ]);
    let out = fso(&[
        "decode-analog",
        "--in-symbols",
        &sym,
        "--meta",
        &meta2,
        "--noise-var",
        "0",
        "--out",
        &p(dir.path(), "x.ppm"),
    ]);
    assert!(!out.status.success());
}

#[test]
fn digital_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let img = fixture(dir.path(), "d.ppm", 2);
    let (sym, out) = (p(dir.path(), "d.sym"), p(dir.path(), "d_out.ppm"));
    ok(&[
        "encode-digital",
        "--image",
        &img,
        "--format",
        "16qam",
        "--out",
        &sym,
    ]);
    ok(&[
        "decode-digital",
        "--in",
        &sym,
        "--format",
        "16qam",
        "--dims",
        "64x64",
        "--out",
        &out,
    ]);
    let q = psnr(
        &ImageTensor::read_ppm(&img).unwrap(),
        &ImageTensor::read_ppm(&out).unwrap(),
    )
    .unwrap();
    assert!(q > 20.0, "PSNR {q}");
}

#[test]
fn single_frame_run_reports_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let img = fixture(dir.path(), "r.ppm", 3);
    let text = ok(&[
        "run", "imdd", "--scheme", "ook", "--image", &img, "--rop", "-5", "--seed", "4",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_COLUMNS.join(","));
    assert!(
        lines[1].starts_with("0,ook,-5,") && lines[1].ends_with(",true"),
        "{}",
        lines[1]
    );
}

#[test]
fn sweep_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "s.ppm", 4);
    let spec = p(dir.path(), "spec.json");
    std::fs::write(&spec, r#"{"rop_grid":[-8,-4],"frames_per_point":1,"schemes":["qpsk","analog"],"dataset":["s.ppm"]}"#)
        .unwrap();
    let (csv, json) = (p(dir.path(), "out.csv"), p(dir.path(), "out.json"));
    ok(&[
        "sweep",
        "rop",
        "--spec",
        &spec,
        "--out-csv",
        &csv,
        "--out-json",
        &json,
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["system"], "coherent");
}

#[test]
fn turbulence_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let img = fixture(dir.path(), "t.ppm", 5);
    let run = |name: &str| {
        let csv = p(dir.path(), name);
        ok(&[
            "turbulence",
            "--system",
            "imdd",
            "--captures",
            "3",
            "--image",
            &img,
            "--out-csv",
            &csv,
        ]);
        std::fs::read(csv).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 3 * 3);
}
