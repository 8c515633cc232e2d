use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use takum::decimal;
use takum::refformats::Format;
use takum::BigReal;

fn takum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_takum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = takum(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn decode_one() {
    let s = ok(&["codec", "decode", "takum12", "0x400"]);
    assert!(s.starts_with("takum12:0x400\n"));
    assert!(s.contains("ell=0"));
    assert!(s.trim_end().ends_with("value=1e0"));
}

#[test]
fn negate_one() {
    assert_eq!(ok(&["codec", "negate", "takum12", "0x400"]), "takum12:0xC00\n");
}

#[test]
fn round_boltzmann() {
    let s = ok(&["codec", "round", "takum16", "--", "1.380649e-23"]);
    assert_eq!(s, "takum16:0x0AB7 1.375520e-23\n");
}

#[test]
fn invert_and_resize() {
    assert_eq!(ok(&["codec", "invert", "takum12", "0x400"]), "takum12:0x400\n");
    assert_eq!(ok(&["codec", "invert", "takum12", "0"]), "takum12:0x800\n");
    assert_eq!(ok(&["codec", "resize", "takum8", "0x40", "-n", "16"]), "takum16:0x4000\n");
    assert_eq!(ok(&["codec", "compare", "takum8", "0x80", "0x01"]), "less\n");
}

#[test]
fn exit_codes() {
    assert_eq!(takum(&["codec", "invert", "takum12", "0x800"]).status.code(), Some(3));
    assert_eq!(takum(&["codec", "decode", "takum12", "0x1000"]).status.code(), Some(2));
    assert_eq!(takum(&["codec", "decode", "takum99", "0"]).status.code(), Some(2));
    assert_eq!(takum(&["codec", "round", "float16", "--", "1.2.3"]).status.code(), Some(2));
    assert_eq!(takum(&["codec", "invert", "posit8", "0x40"]).status.code(), Some(3));
    assert_eq!(takum(&["codec", "encode", "float16", "0.1"]).status.code(), Some(3));
    assert_eq!(takum(&["report", "nothing"]).status.code(), Some(2));
}

fn random_decimal(rng: &mut StdRng) -> String {
    let digits = rng.gen_range(1..=12);
    let mant: u64 = rng.gen_range(10u64.pow(digits - 1)..10u64.pow(digits));
    let sign = if rng.gen_bool(0.5) { "-" } else { "" };
    let e = rng.gen_range(-90..=90) - digits as i32 + 1;
    format!("{sign}{mant}e{e}")
}

#[test]
fn round_agrees_with_library() {
    let mut rng = StdRng::seed_from_u64(0x5eed_c0de);
    for tag in ["takum8", "takum16", "takum32", "lintakum16", "posit16", "bfloat16", "float32"] {
        let f: Format = tag.parse().unwrap();
        let inputs: Vec<String> = (0..10_000).map(|_| random_decimal(&mut rng)).collect();
        let mut args = vec!["codec", "round", tag, "--"];
        args.extend(inputs.iter().map(String::as_str));
        let out = ok(&args);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), inputs.len());
        for (x, line) in inputs.iter().zip(lines) {
            let d = decimal::parse(x).unwrap();
            let p = f.round(&BigReal::from_rational(d.value)).unwrap();
            let hex = line.split(' ').next().unwrap();
            assert_eq!(hex, f.hex(p), "{tag} {x}");
        }
    }
}

#[test]
fn cost_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["report", "cost", "--out", out]);
    let text = fs::read_to_string(dir.path().join("cost.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "value,takum,posit,elias_gamma,elias_delta");
    assert_eq!(lines.len(), 256);
    assert!(lines[255].starts_with("254,11,"));
    assert_eq!(lines[31], "30,8,11,9,9");
}

#[test]
fn waste_and_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["report", "waste", "--out", out]);
    ok(&["report", "dynrange", "--out", out]);
    let waste = fs::read_to_string(dir.path().join("waste.csv")).unwrap();
    let f64_row = waste.lines().find(|l| l.starts_with("float64,")).unwrap();
    assert!(f64_row.ends_with(",82.0312"), "{f64_row}");
    let dr = fs::read_to_string(dir.path().join("dynamic_range.csv")).unwrap();
    assert_eq!(
        dr.lines().next().unwrap(),
        "n,takum_min,takum_max,posit_min,posit_max,ieee_normal_min,ieee_subnormal_min,ieee_max"
    );
    assert_eq!(dr.lines().count(), 64);
}

#[test]
fn bounds_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["report", "bounds", "-n", "16", "--step", "1", "--out", out]);
    let text = fs::read_to_string(dir.path().join("error_bounds.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "log10_x,takum16,posit16,float16");
    assert_eq!(lines.len(), 122);
    assert!(lines[1].starts_with("-60,"));
    assert!(lines[121].starts_with("60,"));
}

#[test]
fn constants_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["report", "constants", "--out", out]);
    let si = fs::read_to_string(dir.path().join("constants_si.csv")).unwrap();
    let row = si.lines().find(|l| l.starts_with("takum16,")).unwrap();
    assert!(row.contains(",1.375520e-23,"), "{row}");
    let large = fs::read_to_string(dir.path().join("constants_large.csv")).unwrap();
    assert!(large.lines().any(|l| l == "float32,0,∞"));
}

fn no_temp_files(dir: &Path) {
    for e in fs::read_dir(dir).unwrap() {
        let name = e.unwrap().file_name().into_string().unwrap();
        assert!(name.ends_with(".csv"), "stray file {name}");
    }
}

#[test]
fn inversion_curve_all_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["report", "closure", "--op", "inv", "--format", "takum8", "--out", out]);
    let curve = fs::read_to_string(dir.path().join("inv-takum8.csv")).unwrap();
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "fraction,eta");
    assert_eq!(lines.len(), 82);
    assert!(lines[1..].iter().all(|l| l.ends_with(",inf")));
    let matrix = fs::read_to_string(dir.path().join("inv-takum8-matrix.csv")).unwrap();
    assert_eq!(matrix.lines().next(), Some("x,y,e_rel"));
    let summary = fs::read_to_string(dir.path().join("closure.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("inv,takum8,81,1,81,81,100.0000,0"));
    no_temp_files(dir.path());
}

#[test]
fn sub_diagonal_in_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["report", "closure", "--op", "sub", "--format", "takum8", "--out", out]);
    let m = fs::read_to_string(dir.path().join("sub-takum8-matrix.csv")).unwrap();
    let rows: Vec<Vec<&str>> = m.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 81 * 81);
    for r in rows.iter().filter(|r| r[0] == r[1]) {
        assert_eq!(r[2], "0");
    }
    // row-major: x constant per block of 81, y runs through the same order
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], rows[i / 81 * 81][0]);
        assert_eq!(r[1], rows[(i % 81) * 81][0]);
    }
}

#[test]
fn output_independent_of_jobs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(&a, "1"), (&b, "3")] {
        let out = dir.path().to_str().unwrap();
        ok(&["report", "closure", "--op", "mul", "--format", "posit8", "--jobs", jobs, "--out", out]);
    }
    for name in ["mul-posit8.csv", "mul-posit8-matrix.csv", "closure.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs across thread counts");
    }
}

#[test]
fn unsupported_sweep_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = takum(&["report", "closure", "--format", "float32", "--out", out]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}
