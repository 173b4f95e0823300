use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json")).display().to_string()
}

fn iwasawa(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_iwasawa"))
        .args(args)
        .env_remove("IWASAWA_CACHE_DIR")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn signed_reports_gcd_x() {
    let f = fixture("37a1");
    let (code, out, _) = iwasawa(&["signed", "--curve", &f, "--p", "17", "--level", "1", "--prec", "6"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["gcd"], "X");
    assert_eq!(v["gcd_certified"], true);
}

#[test]
fn verify_passes() {
    let f = fixture("37a1");
    let (code, out, _) = iwasawa(&["verify", "--curve", &f, "--p", "17", "--fine-char", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["delta_E"], 1);
}

#[test]
fn verify_fails_on_wrong_hypothesis() {
    let f = fixture("53a1");
    let (code, out, _) = iwasawa(&["verify", "--curve", &f, "--p", "3", "--fine-char", "Phi1"]);
    assert_eq!(code, 1);
    assert!(out.contains("\"verdict\": \"FAIL\""));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let (code, out, err) = iwasawa(&["signed", "--bogus"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("Usage"));
}

#[test]
fn invalid_prime_is_a_usage_error() {
    let f = fixture("37a1");
    let (code, _, err) = iwasawa(&["theta", "--curve", &f, "--p", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("odd prime"));
}

#[test]
fn computational_failure_exits_one() {
    let f = fixture("37a1");
    let (code, _, err) = iwasawa(&["signed", "--curve", &f, "--p", "5"]);
    assert_eq!(code, 1);
    assert!(err.contains("extract"));
}

#[test]
fn curve_info_lists_reduction() {
    let f = fixture("53a1");
    let (code, out, _) = iwasawa(&["curve-info", "--curve", &f, "--p", "5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["reduction"]["type"], "good-supersingular");
    assert_eq!(v["a_ell"]["3"], -3);
    assert_eq!(v["conductor_check"], "verified");
}

#[test]
fn export_import_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("53a1");
    let table = dir.path().join("t.csv").display().to_string();
    let (code, out, _) = iwasawa(&["symbols", "--curve", &f, "--p", "3", "--level", "1", "--table", &table, "--export"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"symmetry_violations\": 0"));
    let report = dir.path().join("r.csv").display().to_string();
    let args = ["report", "--curve", &f, "--p", "3", "--level", "1", "--table", &table, "--import", "--format", "csv", "--out", &report];
    let (code, out, _) = iwasawa(&args);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("curve,p,name,status,detail\n"));
    assert!(text.contains("53a1,3,KP,PASS"));

    let (code, out, _) = iwasawa(&["theta", "--curve", &f, "--p", "3", "--level", "1", "--table", &table, "--import"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["thetas"].as_array().unwrap().len(), 3);
    assert_eq!(v["compat"][0]["status"], "PASS");

    let (code, out, _) = iwasawa(&["gcd", "--curve", &f, "--p", "3", "--level", "1", "--table", &table, "--import"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"ideal\": \"X\""));
}

#[test]
fn import_without_table_is_a_usage_error() {
    let f = fixture("53a1");
    let (code, _, _) = iwasawa(&["report", "--curve", &f, "--p", "3", "--import"]);
    assert_eq!(code, 2);
}
