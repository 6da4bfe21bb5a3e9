//! Acceptance criteria 1 to 14, evaluated from two runs of
//! `jc verify --suite all --json`.
//!
//! Each criterion is a set of verification properties; it passes iff all of
//! them pass. One PASS/FAIL line per criterion goes straight to stdout so it
//! shows without `--nocapture`. Red criteria are reported, not asserted,
//! unless `JC_ACCEPTANCE_STRICT` is set; the test itself checks that both
//! reports are well formed and cover every criterion.

use std::io::Write;
use std::process::Command;

use serde_json::Value;

const CRITERIA: [(&str, &[&str]); 13] = [
    ("normalization and homogeneity", &["specfun.g_normalization", "specfun.g_homogeneity"]),
    ("closed-form oracle", &["specfun.phi_closed_form"]),
    ("eigen-relations", &["operator.t_eigen_relation", "operator.t2_eigen_relation"]),
    ("transform of T²", &["transform.transform_t2_identity"]),
    ("Plancherel", &["transform.plancherel"]),
    ("heat-kernel mass", &["heat.kernel_mass_formula"]),
    ("kernel symmetry and positivity", &["heat.kernel_symmetry", "heat.kernel_positivity"]),
    ("semigroup law and Chapman–Kolmogorov", &["heat.semigroup_law", "heat.chapman_kolmogorov"]),
    ("heat-equation residual", &["heat.heat_equation"]),
    ("convolution identities", &["transform.convolution_theorem", "heat.semigroup_routes"]),
    (
        "reproducing kernel",
        &["rkhs.kernel_k_routes", "rkhs.reproducing_property", "rkhs.gram_psd"],
    ),
    ("Poisson equation", &["green.poisson_equation", "green.green_routes"]),
    (
        "Markov process",
        &["markov.kill_rate", "markov.conditioned_moments", "markov.generator_even"],
    ),
];

struct Run {
    code: i32,
    stdout: Vec<u8>,
}

fn verify_all() -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_jc"))
        .args(["verify", "--suite", "all", "--json"])
        .output()
        .expect("jc runs");
    assert!(out.stderr.is_empty(), "{}", String::from_utf8_lossy(&out.stderr));
    Run {
        code: out.status.code().expect("exit code"),
        stdout: out.stdout,
    }
}

fn describe(p: &Value) -> String {
    let name = p["name"].as_str().unwrap();
    let tol = p["tol"].as_f64().unwrap();
    match p["max_err"].as_f64() {
        Some(e) => format!("{name} {e:.2e}/{tol:.0e}"),
        None => format!("{name} error: {}", p["error"].as_str().unwrap_or("unknown")),
    }
}

#[test]
fn acceptance() {
    let first = verify_all();
    let second = verify_all();
    let report: Value = serde_json::from_slice(&first.stdout).expect("report is JSON");
    assert_eq!(report["suite"], "all");
    let props = report["properties"].as_array().expect("properties");
    for p in props {
        assert!(p["name"].is_string() && p["tol"].is_number() && p["pass"].is_boolean());
        assert!(p["max_err"].is_number() || p["max_err"].is_null());
    }
    let all_pass = props.iter().all(|p| p["pass"] == true);
    assert_eq!(first.code, if all_pass { 0 } else { 1 }, "exit code follows the report");

    let mut lines = Vec::new();
    let mut red = 0;
    for (k, (title, names)) in CRITERIA.iter().enumerate() {
        let members: Vec<&Value> = names
            .iter()
            .map(|n| props.iter().find(|p| p["name"] == *n).unwrap_or_else(|| panic!("missing property {n}")))
            .collect();
        let pass = members.iter().all(|p| p["pass"] == true);
        red += usize::from(!pass);
        let detail: Vec<String> = members.iter().map(|p| describe(p)).collect();
        lines.push(format!(
            "Criterion {}: {} ({title}; {})",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            detail.join(", ")
        ));
    }
    let identical = first.stdout == second.stdout;
    let pass14 = identical && first.code == 0 && second.code == 0;
    red += usize::from(!pass14);
    lines.push(format!(
        "Criterion 14: {} (determinism; exit codes {} and {}, reports {})",
        if pass14 { "PASS" } else { "FAIL" },
        first.code,
        second.code,
        if identical { "byte-identical" } else { "differ" }
    ));

    let mut out = std::io::stdout().lock();
    for l in &lines {
        writeln!(out, "{l}").unwrap();
    }
    writeln!(out, "{} of 14 criteria pass", 14 - red).unwrap();
    drop(out);

    assert!(identical, "verification reports differ between runs");
    if std::env::var_os("JC_ACCEPTANCE_STRICT").is_some() {
        assert_eq!(red, 0, "red criteria");
    }
}
