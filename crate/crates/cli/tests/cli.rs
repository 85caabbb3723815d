use std::path::Path;
use std::process::Command as Process;

use dirac_l2_cli::config::parse_list;
use dirac_l2_cli::*;
use proptest::prelude::*;

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_dirac-l2"))
}

fn exec(args: &[&str], out: &Path) -> (i32, String) {
    let o = bin().args(args).arg("--out").arg(out).output().expect("binary runs");
    let text = String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr);
    (o.status.code().unwrap_or(-1), text)
}

fn read_report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(report: &serde_json::Value) {
    let v = schema();
    let errs: Vec<String> = v.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errs.is_empty(), "{errs:?}");
}

fn metric(e: &serde_json::Value, k: &str) -> f64 {
    e["metrics"][k].as_f64().unwrap_or_else(|| panic!("{k} missing in {e}"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(exec(&["verify", "--identity", "bochner", "--n", "2", "--weight", "x1sq", "--trials", "5"], d).0, 0);
    assert_eq!(exec(&["verify", "--identity", "duality", "--trials", "0"], d).0, 2);
    assert_eq!(exec(&["verify", "--identity", "radial", "--domain", "ball:2"], d).0, 2);
    assert_eq!(exec(&["verify", "--identity", "general", "--weight", "log", "--domain", "cube:-1,1"], d).0, 2);
    assert_eq!(exec(&["verify", "--identity", "apriori2d", "--n", "3"], d).0, 2);
    assert_eq!(exec(&["obstruction", "--m", "1,x"], d).0, 2);
    assert_eq!(exec(&["obstruction", "--m", "1.5"], d).0, 2);
    assert_eq!(exec(&["sharpness", "--m", "1"], d).0, 2);
    assert_eq!(exec(&["solve", "--cells", "2"], d).0, 2);
    assert_eq!(exec(&["frobnicate"], d).0, 2);
    let (code, text) = exec(&["obstruction", "--n", "2"], d);
    assert_eq!(code, 2);
    assert!(text.contains("Laplace phi = 0"), "{text}");
    // a tolerance no run can meet
    let (code, text) = exec(&["verify", "--identity", "bochner", "--n", "2", "--trials", "2", "--tol", "0"], d);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("FAIL"));
}

#[test]
fn radial_example() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = exec(&["verify", "--identity", "radial", "--n", "3", "--m", "2", "--trials", "50"], dir.path());
    assert_eq!(code, 0);
    let r = read_report(dir.path());
    let entries = r["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 50);
    for (t, e) in entries.iter().enumerate() {
        assert_eq!(e["trial"].as_u64(), Some(t as u64));
        assert!(metric(e, "rel_residual") <= 1e-6);
    }
    assert_valid(&r);
    assert!(dir.path().join("entries.csv").exists());
    assert!(dir.path().join("verify_radial.csv").exists());
}

#[test]
fn obstruction_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = exec(&["obstruction", "--n", "3", "--m", "1,10,100"], dir.path());
    assert_eq!(code, 0);
    let r = read_report(dir.path());
    assert_valid(&r);
    let ratios: Vec<f64> = r["tables"]["obstruction"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row[2].as_f64().unwrap())
        .collect();
    assert_eq!(ratios.len(), 3);
    for (got, want) in ratios.iter().zip([3.0, 300.0, 30000.0]) {
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    }
    let (code, _) = exec(&["obstruction", "--n", "4", "--m", "1"], dir.path());
    assert_eq!(code, 0);
    let r = read_report(dir.path());
    let ratio = r["tables"]["obstruction"]["rows"][0][2].as_f64().unwrap();
    assert!((ratio - 8.0).abs() < 1e-12);
}

#[test]
fn sharpness_examples() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exec(&["sharpness", "--n", "3", "--m", "4,16,64"], dir.path()).0, 0);
    let r = read_report(dir.path());
    assert_valid(&r);
    let rows = r["tables"]["sharpness"]["rows"].as_array().unwrap();
    assert!(rows.last().unwrap()[1].as_f64().unwrap() >= 0.24);
    let cf = r["entries"].as_array().unwrap().iter().find(|e| e["label"] == "closed_form").unwrap();
    assert!(metric(cf, "u0_rel_error") <= 1e-6);
    assert_eq!(exec(&["sharpness", "--n", "2"], dir.path()).0, 0);
    assert_eq!(exec(&["sharpness", "--n", "3", "--weight", "x1sq"], dir.path()).0, 2);
}

#[test]
fn solve_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(exec(&["solve", "--weight", "x1sq", "--n", "2"], d).0, 0);
    assert_valid(&read_report(d));
    assert_eq!(exec(&["solve", "--weight", "gauss", "--n", "2", "--poisson", "--cells", "24"], d).0, 0);
    let r = read_report(d);
    assert_valid(&r);
    let levels = r["tables"]["solve_levels"]["rows"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    for row in levels {
        let (delta, poisson) = (row[4].as_f64().unwrap(), row[9].as_f64().unwrap());
        assert!(poisson <= (1.0 / 16.0) * (1.0 + delta));
    }
    assert_eq!(exec(&["solve", "--weight", "aniso", "--n", "2", "--a", "1.01,0.99"], d).0, 0);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Command::Verify, 2);
    cfg.identity = Some(IdentityKind::Weighted);
    cfg.trials = 3;
    cfg.kappa = Some(0.1 + 0.2);
    cfg.seed = u64::MAX;
    cfg.domain = Some(DomainConfig::Annulus { r0: 1.0 / 3.0, r1: 2.0 });
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    let out = dir.path().join("out");
    let (code, text) = exec(&["verify", "--config", path.to_str().unwrap()], &out);
    assert_eq!(code, 0, "{text}");
    let echoed: RunConfig = serde_json::from_value(read_report(&out)["config"].clone()).unwrap();
    assert_eq!(echoed, cfg);
    assert_eq!(exec(&["solve", "--config", path.to_str().unwrap()], &out).0, 2);
}

#[test]
fn deterministic_reports() {
    let mut cfg = RunConfig::new(Command::Verify, 3);
    cfg.identity = Some(IdentityKind::Duality);
    cfg.trials = 6;
    cfg.seed = 17;
    let a = run(&cfg).unwrap().without_timing().to_json();
    let b = run(&cfg).unwrap().without_timing().to_json();
    assert_eq!(a, b);
    cfg.seed = 18;
    assert_ne!(a, run(&cfg).unwrap().without_timing().to_json());
}

#[test]
fn env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["sharpness", "--n", "2", "--m", "2,4"])
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("sharpness.csv").exists());
}

#[test]
fn pass_is_recomputable() {
    let mut cfg = RunConfig::new(Command::Obstruction, 3);
    cfg.m_list = vec![1.0, 3.0];
    let report = run(&cfg).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_valid(&json);
    let back: ReportFile = serde_json::from_value(json).unwrap();
    for e in &back.entries {
        assert_eq!(e.recompute_pass(), e.pass, "{}", e.label);
        assert!(!e.checks.is_empty());
    }
    assert_eq!(back.summary.total, back.entries.len());
}

#[test]
fn failed_entries_fail_their_check() {
    let e = Entry::failed("x", "boom").finish(1.0);
    assert!(!e.pass);
    assert!(e.note.unwrap().contains("boom"));
    let e = Entry::new("y").metric("v", f64::NAN).check(Check::le("v", 1.0)).finish(0.0);
    assert!(!e.pass);
    let e = Entry::new("z").finish(0.0);
    assert!(!e.pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_json_round_trip(
        n in 2usize..9,
        seed in any::<u64>(),
        trials in 0usize..100,
        kappa in proptest::option::of(-1e6f64..1e6),
        m in proptest::collection::vec(-1e3f64..1e3, 0..5),
        r0 in 0.0f64..5.0,
        poisson in any::<bool>(),
    ) {
        let mut cfg = RunConfig::new(Command::Solve, n);
        cfg.seed = seed;
        cfg.trials = trials;
        cfg.kappa = kappa;
        cfg.m_list = m;
        cfg.poisson = poisson;
        cfg.domain = Some(DomainConfig::Annulus { r0, r1: r0 * 1.5 + 0.1 });
        cfg.weight.a = Some(vec![r0 / 7.0; n]);
        cfg.tolerances.identity = Some(r0 * 1e-7);
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), cfg.to_json());
    }

    #[test]
    fn list_parsing(v in proptest::collection::vec(-1e9f64..1e9, 1..6)) {
        let s: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        prop_assert_eq!(parse_list(&s.join(",")).unwrap(), v);
    }

    #[test]
    fn domain_parsing(r0 in 0.0f64..3.0, r1 in 3.0f64..9.0) {
        prop_assert_eq!(
            DomainConfig::parse(&format!("annulus:{r0:?},{r1:?}")).unwrap(),
            DomainConfig::Annulus { r0, r1 }
        );
    }
}
