use std::process::{Command, Output};

use serde_json::Value;

fn polycell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polycell")).args(args).env_remove("POLYCELL_CAP").output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn hom_count_with_force() {
    let out = polycell(&["count-hom", "--a", "4", "--b", "6", "--n", "1", "--q", "2", "--force", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let hom = recs.iter().find(|r| r["kind"] == "hom").unwrap();
    assert_eq!(hom["count"], "1536");
    assert_eq!(hom["match"], true);
    assert_eq!(hom["forced"], true);
}

#[test]
fn hypothesis_refusal() {
    let out = polycell(&["count-hom", "--a", "2", "--b", "2", "--n", "1", "--q", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("characteristic 2"));
}

#[test]
fn hypothesis_holds_without_force() {
    let out = polycell(&["count-hom", "--a", "1", "--b", "2", "--n", "1", "--q", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let hom = records(&out).into_iter().find(|r| r["kind"] == "hom").unwrap();
    assert_eq!(hom["count"], "72");
    assert_eq!(hom["forced"], false);
}

#[test]
fn psi_certificates() {
    let out = polycell(&["verify-psi", "--degrees", "3,2", "--k", "1", "--q", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert!(recs.iter().filter(|r| r["record"] == "certificate").all(|r| r["passed"] == true));
    let whole = recs.iter().find(|r| r["record"] == "stratum-image").unwrap();
    assert_eq!(whole["image_count"], 54);
}

#[test]
fn cap_refusal_prints_projection() {
    let out = polycell(&["count-poly", "--degrees", "3,3", "--q", "2", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("64"));

    let via_env = Command::new(env!("CARGO_BIN_EXE_polycell"))
        .args(["count-poly", "--degrees", "3,3", "--q", "2"])
        .env("POLYCELL_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(via_env.status.code(), Some(3));
}

#[test]
fn usage_errors() {
    assert_eq!(polycell(&["count-poly", "--degrees", "2,1", "--q", "6"]).status.code(), Some(2));
    assert_eq!(polycell(&["count-poly", "--q", "2"]).status.code(), Some(2));
    assert_eq!(polycell(&["verify-psi", "--degrees", "1,2", "--k", "2", "--q", "2"]).status.code(), Some(2));
    assert_eq!(polycell(&["motive"]).status.code(), Some(2));
}

#[test]
fn extension_field_by_p_and_e() {
    let out = polycell(&["count-poly", "--degrees", "2,1", "--p", "2", "--e", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[0]["count"], "48");
}

#[test]
fn motive_classes() {
    let out = polycell(&["motive", "--a", "4", "--b", "6", "--n", "1", "--q", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let hom = records(&out).into_iter().find(|r| r["object"] == "Hom_1(P1,P(4,6))").unwrap();
    assert_eq!(hom["class"], "L^11 - L^9");
    assert_eq!(hom["measure"], "1536");
    let out = polycell(&["motive", "--degrees", "3,2", "--json"]);
    assert_eq!(records(&out)[0]["class"], "L^5 - L^4");
}

#[test]
fn reports_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3", "8"] {
        let jsonl = dir.path().join(format!("w{workers}.jsonl"));
        let csv = dir.path().join(format!("w{workers}.csv"));
        let out = polycell(&[
            "count-strata",
            "--degrees",
            "3,3",
            "--q",
            "3",
            "--workers",
            workers,
            "--jsonl",
            jsonl.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push((std::fs::read(&jsonl).unwrap(), std::fs::read(&csv).unwrap(), out.stdout));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let csv = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert!(csv.starts_with("name,q,params,count,predicted,match\n"));

    let decompose =
        |w: &str| polycell(&["decompose", "--degrees", "3,2,2", "--q", "2", "--workers", w, "--json"]).stdout;
    assert_eq!(decompose("1"), decompose("5"));
}

#[test]
fn verify_all_budgets() {
    let out = polycell(&["verify-all", "--budget", "0", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs.last().unwrap()["status"], "nothing run");
    assert!(recs.iter().filter(|r| r["record"] == "criterion").all(|r| r["outcome"] == "skipped"));

    // room for everything except the Hom stack enumerations
    let out = polycell(&["verify-all", "--budget", "3600000", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs.last().unwrap()["status"], "incomplete");
    let outcome = |id: u64| recs.iter().find(|r| r["id"] == id).unwrap()["outcome"].clone();
    assert_eq!(outcome(5), "skipped");
    assert_eq!(outcome(1), "passed");
    assert_eq!(outcome(6), "passed");
}

#[test]
fn verify_all_default_budget_is_complete() {
    let out = polycell(&["verify-all", "--json", "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let recs = records(&out);
    assert_eq!(recs.last().unwrap()["status"], "complete");
    assert_eq!(recs.iter().filter(|r| r["outcome"] == "passed").count(), 8);
}
