use std::fs;
use std::path::PathBuf;

use hingekit::json::{emit_scenario, parse_scenario};
use hingekit_core::scenario::{classical_scenario, ScenarioParams, CLASSICAL_SCENARIOS};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with(args: &[&str], stdin: &str) -> Run {
    let mut argv = vec!["hingekit"];
    argv.extend_from_slice(args);
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = hingekit::run(argv, &mut input, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn run(args: &[&str]) -> Run {
    run_with(args, "")
}

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

fn analysis_command(name: &str) -> &'static str {
    match name {
        "desargues" => "analyze-platform",
        "planar-arm" | "generic-chain" => "analyze-chain",
        _ => "analyze-cycle",
    }
}

#[test]
fn classical_examples_match_goldens() {
    for name in CLASSICAL_SCENARIOS {
        let ex = run(&["example", name]);
        assert_eq!(ex.code, 0, "{name}: {}", ex.stderr);
        golden(&format!("{name}.json"), &ex.stdout);
        let r = run_with(&[analysis_command(name), "-"], &ex.stdout);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        golden(&format!("{name}.txt"), &r.stdout);
    }
}

#[test]
fn classical_examples_round_trip() {
    for name in CLASSICAL_SCENARIOS {
        let s = classical_scenario(name, &ScenarioParams::default()).unwrap();
        assert_eq!(parse_scenario(&emit_scenario(&s)).unwrap(), s, "{name}");
    }
}

#[test]
fn headline_verdicts() {
    let tc = run(&["example", "twisted-cubic-tangents"]).stdout;
    let r = run_with(&["analyze-cycle", "-", "--exact"], &tc);
    assert!(r.stdout.contains("exact: flexible (rank 5 < 6)"), "{}", r.stdout);
    assert!(r.stdout.contains("exact mobility: 1"));

    let de = run(&["example", "desargues"]).stdout;
    let r = run_with(&["analyze-platform", "-"], &de);
    assert!(r.stdout.contains("numeric: flexible (rank 2 < 3)"));
    let off = run(&["example", "desargues", "--values", "1/1000"]).stdout;
    let r = run_with(&["analyze-platform", "-", "--exact"], &off);
    assert!(r.stdout.contains("exact: rigid (rank 3 = 3)"));

    let arm = run(&["example", "planar-arm"]).stdout;
    let r = run_with(&["analyze-chain", "-"], &arm);
    assert!(r.stdout.contains("singular (rank 1 < 2)"));
    assert!(r.stdout.contains("witness line: through (3.000000e0, 0.000000e0) direction (1.000000e0, 0.000000e0)"));
    let r = run_with(&["analyze-chain", "-", "--theta=0.3,-0.2,0.4"], &arm);
    assert!(r.stdout.contains("regular (rank 2 = 2)"), "{}", r.stdout);
}

#[test]
fn json_output_is_machine_readable() {
    let tc = run(&["example", "twisted-cubic-tangents"]).stdout;
    let r = run_with(&["analyze-cycle", "-", "--json"], &tc);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["numeric"]["rank"], 5);
    assert_eq!(v["exact"]["mobility"], 1);
    assert_eq!(v["exact"]["conull"], serde_json::json!([3, 0, 0, 0, 0, 1]));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["analyze-cycle", "/nonexistent/file.json"]).code, 2);
    assert_eq!(run(&["no-such-command"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["example", "no-such-scenario"]).code, 2);

    let bad = "{\n  \"kind\": \"cycle\",\n  \"d\": 3,\n  \"axes\": [{\"origin\": [0, 0, \"zero\"], \"dirs\": [[1, 0, 0]]}]\n}";
    let r = run_with(&["analyze-cycle", "-"], bad);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("axes[0].origin[2]") && r.stderr.contains("line 4"), "{}", r.stderr);

    let chain = run(&["example", "planar-arm"]).stdout;
    let r = run_with(&["analyze-cycle", "-"], &chain);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("expected a cycle scenario"));

    let real = chain.replacen("\"origin\": [\n        0,", "\"origin\": [\n        0.5,", 1);
    assert_eq!(run_with(&["analyze-chain", "-"], &real).code, 0);
    let r = run_with(&["analyze-chain", "-", "--exact"], &real);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains("non-rational"));

    let chair = run(&["example", "cyclohexane-panels"]).stdout;
    let r = run_with(&["flex", "-"], &chair);
    assert_eq!(r.code, 3, "{}", r.stderr);

    let small = run(&["example", "generic-cycle", "--n", "3"]).stdout;
    assert_eq!(run_with(&["convert-linkage", "-"], &small).code, 2);
}

#[test]
fn linkage_conversion_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cyc = run(&["example", "generic-cycle"]).stdout;
    let r = run_with(&["convert-linkage", "-", "--json"], &cyc);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let path = dir.path().join("linkage.json");
    fs::write(&path, &r.stdout).unwrap();
    let lk = hingekit::json::parse_linkage(&r.stdout).unwrap();
    assert_eq!(hingekit::json::emit_linkage(&lk), r.stdout);
    let m = run(&["moduli", path.to_str().unwrap()]);
    assert_eq!(m.code, 0, "{}", m.stderr);
    assert!(m.stdout.contains("edges: 35") && m.stdout.contains("independent lengths: 21"));
}

#[test]
fn flex_stays_on_fiber_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("flex.csv");
    let cyc = run(&["example", "generic-cycle"]).stdout;
    let r = run_with(&["flex", "-", "--steps", "5", "--csv", csv.to_str().unwrap(), "--json"], &cyc);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(v["residuals"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap() < 1e-9));
    assert!(v["length_drift"].as_f64().unwrap() < 1e-6);
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("step,theta_1,"));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let chain = run(&["example", "generic-chain"]).stdout;
    let a = run_with(&["sweep", "-", "--samples", "200", "--seed", "7"], &chain);
    let b = run_with(&["sweep", "-", "--samples", "200", "--seed", "7", "--threads", "3"], &chain);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.starts_with("sample_index,theta_1,theta_2,theta_3,theta_4,rank,sigma_min,singular\n"));
    assert_eq!(a.stdout.lines().count(), 201);
    assert!(a.stderr.contains("samples: 200"));

    let path = dir.path().join("s.csv");
    let c = run_with(&["sweep", "-", "--samples", "200", "--seed", "7", "--csv", path.to_str().unwrap()], &chain);
    assert_eq!(c.code, 0);
    assert_eq!(fs::read_to_string(path).unwrap(), a.stdout);
    assert!(c.stdout.contains("singular: "));

    let other = run_with(&["sweep", "-", "--samples", "200", "--seed", "8"], &chain);
    assert_ne!(other.stdout, a.stdout);
}
