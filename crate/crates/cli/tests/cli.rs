use formcx::catalog::build_maxcut;
use formcx::factor::LPFactorization;
use formcx::problem::exact_guarantees;
use formcx::rational::rat;
use formcx::slack::build_slack;
use formcx::Matrix;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn formcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formcx"))
        .args(args)
        .env_remove("FORMCX_RANK_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn slack_maxcut_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let js = dir.path().join("maxcut.json");
    let out = formcx(&["slack", "--problem", "maxcut", "--n", "3", "--tau", "1", "--sigma", "1", "--out", path_str(&js)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(8), Some(8)));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(doc["entries"].as_array().unwrap().len(), 8);
    assert_eq!(doc["row_labels"].as_array().unwrap().len(), 8);
    assert_eq!(Matrix::load(&js).unwrap().shape(), (8, 8));

    let csv = dir.path().join("maxcut.csv");
    let out = formcx(&["slack", "--problem", "maxcut", "--n", "3", "--tau", "1", "--out", path_str(&csv)]);
    assert!(out.status.success());
    assert_eq!(Matrix::load(&csv).unwrap(), Matrix::load(&js).unwrap());
}

#[test]
fn slack_junta_counts_disjoint_ones() {
    let out = formcx(&["slack", "--problem", "junta", "--n", "5", "--k", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(10), Some(32)));
    assert_eq!(v["disjoint_ones"].as_u64(), Some(80));
}

#[test]
fn bad_rational_is_rejected() {
    let out = formcx(&["slack", "--problem", "maxcut", "--n", "3", "--tau", "1/0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero denominator"));
}

#[test]
fn library_errors_exit_nonzero() {
    let out = formcx(&["slack", "--problem", "maxcut", "--n", "3", "--tau", "1/2", "--sigma", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn certify_max2sat() {
    let out = formcx(&["certify", "--gadget", "maxcut-to-max2sat", "--n", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["exact_violations"].as_u64(), Some(0));
}

#[test]
fn certify_hamiltonian_enumerates_all_cycles() {
    let out = formcx(&["certify", "--gadget", "matching-to-hamiltonian", "--n2", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["target_solutions"].as_u64(), Some(2520));
    assert_eq!(v["constants"]["target_cycles"], Value::from("2520"));
}

#[test]
fn corrupted_reduction_reports_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("red.json");
    let out = formcx(&["export", "reduction", "--gadget", "maxcut-to-dicut", "--out", path_str(&file)]);
    assert!(out.status.success());
    let ok = formcx(&["certify", "--gadget", "maxcut-to-dicut", "--reduction", path_str(&file)]);
    assert!(ok.status.success());

    let mut red: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    red["beta"][2]["shift"] = Value::from("1/3");
    std::fs::write(&file, serde_json::to_string(&red).unwrap()).unwrap();
    let out = formcx(&["certify", "--gadget", "maxcut-to-dicut", "--reduction", path_str(&file)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(false));
    let source = red["beta"][2]["source"].as_u64().unwrap();
    assert_eq!(v["first_exact_violation"]["instance"].as_u64(), Some(source));
    assert_eq!(v["first_exact_violation"]["solution"].as_u64(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("(f1, s1) = ({source}, 0)")), "{err}");
}

#[test]
fn rank_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("eye3.json");
    std::fs::write(&file, r#"{"rows": 3, "cols": 3, "entries": [["1","0","0"],["0","1","0"],["0","0","1"]]}"#).unwrap();
    let out = formcx(&["rank", "--matrix", path_str(&file)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["lp_rank"]["interval"], Value::from("[3, 3]"));
    assert_eq!(v["nonnegative_rank"]["interval"], Value::from("[3, 3]"));
    assert_eq!(v["lp_rank"]["certificate_verified"], Value::Bool(true));
}

#[test]
fn roundtrip_maxcut() {
    let out = formcx(&["roundtrip", "--problem", "maxcut", "--n", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["extracted_size"].as_u64() <= v["inequalities"].as_u64());
}

#[test]
fn round_perturbed_maxcut() {
    let p = build_maxcut(3, None).unwrap();
    let g = exact_guarantees(&p).unwrap();
    let m = build_slack(&p, &g).unwrap().entries;
    let mut mt = m.clone();
    mt.set(0, 1, m.get(0, 1) + rat(1, 5));
    mt.set(3, 2, m.get(3, 2) + rat(1, 7));
    let dir = tempfile::tempdir().unwrap();
    let mfile = dir.path().join("perturbed.json");
    std::fs::write(&mfile, serde_json::to_string(&mt.to_document()).unwrap()).unwrap();
    let ffile = dir.path().join("ftilde.json");
    std::fs::write(&ffile, LPFactorization::trivial(&mt).unwrap().to_json()).unwrap();

    let out = formcx(&["round", "--problem", "maxcut", "--n", "3", "--mtilde", path_str(&mfile)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["terms"].as_u64().unwrap() >= 1);
    assert_eq!(v["c_prime"].as_array().unwrap().len(), 8);
    assert_eq!(v["size_bound"], Value::Null);

    let out = formcx(&["round", "--problem", "maxcut", "--n", "3", "--mtilde", path_str(&mfile), "--ftilde", path_str(&ffile)]);
    assert!(out.status.success());
    let v = json(&out);
    let k = v["terms"].as_u64().unwrap();
    assert!(v["size_bound"].as_u64().unwrap() <= 8 + 2 * k);
    assert!(v["certificate"].is_object());
}

#[test]
fn export_formulation_and_factorization() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let l = dir.path().join("l.json");
    assert!(formcx(&["export", "factorization", "--problem", "maxcut", "--n", "3", "--out", path_str(&f)]).status.success());
    assert!(formcx(&["export", "formulation", "--problem", "maxcut", "--n", "3", "--out", path_str(&l)]).status.success());
    let fact = LPFactorization::from_json(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let form = formcx::factor::LPFormulation::from_json(&std::fs::read_to_string(&l).unwrap()).unwrap();
    assert_eq!(form.size(), fact.size());
    let out = formcx(&["roundtrip", "--problem", "maxcut", "--n", "3", "--factorization", path_str(&f)]);
    assert!(out.status.success());
}

#[test]
fn reports_are_deterministic() {
    let a = formcx(&["certify", "--gadget", "maxcut-to-vertexcover", "--n", "4"]);
    let b = formcx(&["certify", "--gadget", "maxcut-to-vertexcover", "--n", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
