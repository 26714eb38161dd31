use std::process::Command;

fn divring(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_divring")).args(args).output().expect("binary runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap_or(-1))
}

fn json(args: &[&str]) -> (serde_json::Value, i32) {
    let mut v = vec!["--format", "json"];
    v.extend_from_slice(args);
    let (out, code) = divring(&v);
    (serde_json::from_str(&out).expect("valid json"), code)
}

#[test]
fn geometric_series_inverse() {
    let (out, code) = divring(&["invert", "--group", "c=-1", "--x", "1-t", "--a", "1", "--terms", "5"]);
    assert_eq!(code, 0);
    let terms: Vec<&str> = out.lines().filter(|l| l.contains(" * ")).collect();
    assert_eq!(terms, ["1 * 1", "1 * t", "1 * t^2", "1 * t^3", "1 * t^4"]);
}

#[test]
fn audits_exit_with_their_verdict() {
    assert_eq!(divring(&["exchange-audit", "--ring", "Zmod(2)", "--n", "2"]).1, 0);
    let (out, code) = divring(&["exchange-audit", "--ring", "Zmod(4)", "--n", "1"]);
    assert_eq!(code, 1);
    assert!(out.contains("M ⊋ {0,2} ⊋ {0}"), "{out}");
    assert_eq!(divring(&["strong-audit", "--ring", "Zmod(2)", "--n", "2", "--trials", "50"]).1, 0);
    assert_eq!(divring(&["malcolmson-audit"]).1, 0);
    assert_eq!(divring(&["matideal-audit", "--check", "module-conditions"]).1, 1);
}

#[test]
fn json_records_carry_axiom_instance_verdict_witness() {
    let (v, code) = json(&["matideal-audit", "--check", "module-conditions"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "violations");
    let results = v["results"].as_array().unwrap();
    for r in results {
        for key in ["axiom", "instance", "verdict", "witness"] {
            assert!(r.get(key).is_some(), "{key} missing in {r}");
        }
    }
    let dich = results.iter().find(|r| r["axiom"] == "kernel-dichotomy").unwrap();
    assert_eq!(dich["verdict"], "fail");
    assert!(dich["witness"].as_str().unwrap().contains("not one-to-one"));
}

#[test]
fn text_and_json_verdicts_agree() {
    let args = ["matideal-audit", "--check", "all"];
    let (text, code_text) = divring(&args);
    let (v, code_json) = json(&args);
    assert_eq!(code_text, code_json);
    for r in v["results"].as_array().unwrap() {
        let line = format!("  {}: {}", r["axiom"].as_str().unwrap(), r["verdict"].as_str().unwrap());
        assert!(text.contains(&line), "{line} not in\n{text}");
    }
}

#[test]
fn report_config_block_reproduces_the_run() {
    let args = ["partition", "--group", "c=zeta3", "--window", "6", "--expect-period", "3"];
    let (first, code) = divring(&args);
    assert_eq!(code, 0);
    let block: String = first
        .lines()
        .skip_while(|l| *l != "config:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .map(|l| format!("{}\n", l.trim()))
        .collect();
    let path = std::env::temp_dir().join(format!("divring-config-{}.cfg", std::process::id()));
    std::fs::write(&path, &block).unwrap();
    let (again, code) = divring(&["--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert_eq!(first, again);
}

#[test]
fn exit_codes() {
    assert_eq!(divring(&["no-such-command"]).1, 2);
    assert_eq!(divring(&["invert", "--x", "1-q", "--a", "1"]).1, 2);
    assert_eq!(divring(&["--help"]).1, 0);
    let (out, code) = divring(&["invert", "--x", "1-t", "--a", "1", "--terms", "50", "--max-index", "3"]);
    assert_eq!(code, 3, "{out}");
    assert!(out.contains("budget exhausted"));
}

#[test]
fn runs_are_deterministic() {
    let args = ["probe-q2", "--samples", "3", "--terms", "8"];
    assert_eq!(divring(&args), divring(&args));
}
