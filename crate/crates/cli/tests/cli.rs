use std::process::{Command, Output};

use serde_json::Value;

fn nadyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nadyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = nadyn(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn ordres_of_scaled_square_at_gauss() {
    let v = report(&["ordres", "--map", "t*z^2", "--point", "gauss"]);
    assert_eq!(v["ord_res"], "2/1");
    assert_eq!(v["hyp_res"], "0/1");
}

#[test]
fn minlocus_of_scaled_square() {
    let v = report(&["minlocus", "--map", "t*z^2"]);
    assert_eq!(v["minimizer"], serde_json::json!({"a": "0", "s": "-1/1"}));
    assert_eq!(v["verdict"], "stable");
    assert_eq!(v["hyp_res"], "-1/2");
    assert_eq!(v["unique"], true);
}

#[test]
fn equidist_rejects_totally_invariant_point() {
    let out = nadyn(&["equidist", "--map", "z^2", "--point", "gauss"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("totally invariant"));
}

#[test]
fn equidist_reports_levels_and_steps() {
    let v = report(&["equidist", "--map", "(z^2-t)/z", "--nmax", "3"]);
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert_eq!(levels[2]["point_mass"], "1/8");
    assert_eq!(v["tv"], serde_json::json!(["1/4", "1/8"]));
}

#[test]
fn slope_lists_measured_and_predicted() {
    let v = report(&["slope", "--map", "t*z^2"]);
    let s = &v["slopes"][0];
    assert_eq!(s["class"], "inf");
    assert_eq!(s["rhs"], s["measured"]);
}

#[test]
fn hypres_direct_agrees_with_closed_form() {
    let v = report(&["hypres", "--map", "t*z^2", "--point", "a=0;s=-1/2", "--direct"]);
    assert_eq!(v["hyp_res"], v["direct"]["value"]);
}

#[test]
fn syntax_and_usage_errors_exit_one() {
    assert_eq!(nadyn(&["ordres", "--map", "z^^2"]).status.code(), Some(1));
    assert_eq!(nadyn(&["no-such-verb"]).status.code(), Some(1));
    assert_eq!(nadyn(&["ordres"]).status.code(), Some(1));
    assert_eq!(nadyn(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["minlocus", "--map", "(z^2-t)/z"];
    assert_eq!(nadyn(&args).stdout, nadyn(&args).stdout);
}

#[test]
fn pretty_and_compact_carry_the_same_report() {
    let compact = report(&["depths", "--map", "t*z^2"]);
    let pretty = report(&["--pretty", "depths", "--map", "t*z^2"]);
    assert_eq!(compact, pretty);
}

#[test]
fn reduce_output_map_reparses() {
    let v = report(&["reduce", "--map", "(t*z^2+1)/t", "--point", "a=0;s=1"]);
    let printed = v["map"].as_str().unwrap().to_string();
    let again = report(&["reduce", "--map", &printed, "--point", "a=0;s=1"]);
    assert_eq!(v, again);
}

#[test]
fn degcheck_with_explicit_hypothesis() {
    let v = report(&[
        "degcheck", "--map", "t*z^2", "--t", "1e-3", "--n", "6",
        "--hypothesis", r#"[{"class":"inf","mass":"1/1"}]"#,
    ]);
    assert_eq!(v["per_t"].as_array().unwrap().len(), 1);
    assert!(v["max_discrepancy"].is_number() || v["max_discrepancy"].is_null());
}
