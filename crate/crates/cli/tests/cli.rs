use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use jacobi_cherednik::heat::HeatKernelField;
use jacobi_cherednik::transform::read_sampled_csv;
use serde_json::Value;

fn jc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jc")).args(args).output().expect("jc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is a JSON error")
}

/// `e^{-x²}(1 + x/2)` on `[-6, 6]`, small enough at the ends to truncate.
fn write_gaussian(path: &Path) {
    let mut s = String::from("x,re\n");
    for i in 0..=120 {
        let x = -6.0 + 0.1 * i as f64;
        s += &format!("{x},{}\n", (-x * x).exp() * (1.0 + 0.5 * x));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn eval_g_is_normalized_at_zero() {
    let o = jc(&["eval-g", "--alpha", "0.5", "--beta", "-0.5", "--lambda", "1", "--x", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");

    let o = jc(&["eval-g", "--alpha", "1.3", "--beta", "0.4", "--lambda", "-2", "--x", "0.7", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lambda"], -2.0);
    assert!(v["re"].is_number() && v["im"].as_f64().unwrap() != 0.0);
}

#[test]
fn usage_and_numerical_errors_have_distinct_codes() {
    assert_eq!(jc(&["eval-g", "--lambda", "1"]).status.code(), Some(2));
    assert_eq!(jc(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(jc(&["verify", "--threads", "0"]).status.code(), Some(2));

    let o = jc(&["eval-g", "--alpha", "0.1", "--beta", "0.5", "--lambda", "1", "--x", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "invalid_params");

    let o = jc(&["heat-kernel", "--t", "-1", "--x", "0", "--y", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = jc(&["semigroup", "--t", "1", "--in", "/nonexistent.csv", "--out", "/tmp/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "io");
}

#[test]
fn heat_kernel_value_and_field() {
    let o = jc(&["heat-kernel", "--alpha", "0.5", "--beta", "-0.5", "--t", "1", "--x", "0", "--y", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let parts: Vec<f64> = out.split_whitespace().map(|s| s.parse().unwrap()).collect();
    assert_eq!(parts.len(), 2);
    assert!((parts[0] - 0.241970724519143).abs() < 1e-10 && parts[1] < 1e-8);

    let o = jc(&["heat-kernel", "--t", "1", "--x", "0", "--y", "0", "--json"]);
    let field = HeatKernelField::<f64>::read_json(o.stdout.as_slice()).unwrap();
    assert_eq!(field.values[0][0], parts[0]);
}

#[test]
fn transform_forward_then_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    write_gaussian(&f);
    let lambdas = dir.path().join("l.csv");
    let ls: Vec<String> = (0..=240).map(|i| format!("{}", -12.0 + 0.1 * i as f64)).collect();
    fs::write(&lambdas, format!("lambda\n{}\n", ls.join("\n"))).unwrap();
    let g = dir.path().join("g.json");
    let o = jc(&[
        "transform", "forward", "--in", f.to_str().unwrap(), "--nodes", lambdas.to_str().unwrap(), "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let spectrum: Value = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(spectrum["lambdas"].as_array().unwrap().len(), 241);

    let xs = dir.path().join("x.csv");
    fs::write(&xs, "-1\n0\n0.5\n1.5\n").unwrap();
    let back = dir.path().join("back.csv");
    let o = jc(&[
        "transform", "inverse", "--in", g.to_str().unwrap(), "--nodes", xs.to_str().unwrap(), "--out",
        back.to_str().unwrap(), "--real", "--rel-tol", "1e-8", "--abs-tol", "1e-10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_sampled_csv(fs::File::open(&back).unwrap()).unwrap();
    for (x, v) in r.grid().iter().zip(r.values()) {
        let exact = (-x * x).exp() * (1.0 + 0.5 * x);
        assert!((v.re - exact).abs() < 1e-3, "x = {x}: {} vs {exact}", v.re);
    }

    let o = jc(&[
        "transform", "inverse", "--alpha", "1", "--beta", "0", "--in", g.to_str().unwrap(), "--nodes",
        xs.to_str().unwrap(), "--out", back.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"]["kind"], "mismatch");
}

#[test]
fn semigroup_routes_agree_and_poisson_residual_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    write_gaussian(&f);
    let run = |route: &str| {
        let out = dir.path().join(format!("{route}.csv"));
        let o = jc(&[
            "semigroup", "--t", "0.5", "--in", f.to_str().unwrap(), "--route", route, "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        read_sampled_csv(fs::File::open(out).unwrap()).unwrap()
    };
    let (a, b) = (run("spectral"), run("convolution"));
    for (u, v) in a.values().iter().zip(b.values()) {
        assert!((u - v).norm() < 1e-8);
    }

    let u = dir.path().join("u.csv");
    let o = jc(&["poisson", "--in", f.to_str().unwrap(), "--out", u.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&u).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,green,residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|s| s.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 121);
    assert!(rows.iter().all(|r| r[2] < 1e-4));
    // 𝒢 of a positive-mass bump is largest near its centre
    assert!(rows[60][1] > rows[0][1]);
}

#[test]
fn simulate_is_reproducible_and_formatted() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let base = [
        "simulate", "--alpha", "0.5", "--beta", "-0.5", "--t-step", "0.2", "--steps", "3", "--paths", "5", "--x0",
        "-0.3", "--seed", "9",
    ];
    let (a, b) = (path("a.csv"), path("b.csv"));
    assert_eq!(jc(&[&base[..], &["--out", &a]].concat()).status.code(), Some(0));
    assert_eq!(jc(&[&base[..], &["--out", &b, "--threads", "1"]].concat()).status.code(), Some(0));
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path_id,step,state"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5 * 4);
    assert_eq!(rows[0], "0,0,-0.3");

    // the stated mass does not match the kernel, so the table refuses it
    let o = jc(&[&base[..], &["--out", &path("c.csv"), "--mass", "formula"]].concat());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"]["kind"], "mass_mismatch");
}

#[test]
fn verify_reports_and_exit_codes() {
    let o = jc(&["verify", "--suite", "specfun", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suite"], "specfun");
    let props = v["properties"].as_array().unwrap();
    let all = props.iter().all(|p| p["pass"] == true);
    assert_eq!(o.status.code(), Some(if all { 0 } else { 1 }));
    for p in props {
        for key in ["name", "max_err", "tol", "pass"] {
            assert!(p.get(key).is_some(), "{key} missing");
        }
    }
    assert_eq!(o.stdout, jc(&["verify", "--suite", "specfun", "--json"]).stdout);

    let o = jc(&["verify", "--suite", "operator"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 3);
}
