use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mcsa_core::report::parse_json;
use tempfile::TempDir;

const SAFE_TOY: &str = "
    var S : {ok, bad} init ok;
    event F1;
    block fail { guard: S = ok & F1 & !F1; S := bad; }
";

const TWO_FAULTS: &str = "
    var S : {ok, bad} init ok;
    event F1; event F2; event F3;
    block fail { guard: S = ok & F1 & F2; S := bad; }
    block fail3 { guard: S = ok & F3; S := bad; }
";

const FAULT_FREE_HAZARD: &str = "
    var S : {ok, bad} init ok;
    event F1;
    block drift { guard: S = ok; S := bad; }
";

fn a320() -> (PathBuf, PathBuf) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/models");
    (dir.join("a320.tsm"), dir.join("a320.ltl"))
}

fn mcsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcsa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let safe = write(&dir, "safe.tsm", SAFE_TOY);
    let o = mcsa(&["check", "--model", &safe, "--prop", "G S = ok"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("holds"));

    let o = mcsa(&[
        "check",
        "--model",
        &write(&dir, "h.tsm", TWO_FAULTS),
        "--prop",
        "G S = ok",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("cycle start"));

    let o = mcsa(&["check", "--model", "/no/such/file", "--prop", "G S = ok"]);
    assert_eq!(code(&o), 2);
    let o = mcsa(&["check", "--model", &safe, "--prop", "G (S = ok"]);
    assert_eq!(code(&o), 2);
    let o = mcsa(&["check", "--model", &safe, "--prop", "G T = ok"]);
    assert_eq!(code(&o), 2);
    let o = mcsa(&[
        "check",
        "--model",
        &write(&dir, "bad.tsm", "var S : {} init ;"),
        "--prop",
        "true",
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&mcsa(&["frobnicate"])), 2);
}

#[test]
fn check_a320_fails_with_trace() {
    let (model, prop) = a320();
    let dir = TempDir::new().unwrap();
    let dot = dir.path().join("reach.dot");
    let o = mcsa(&[
        "check",
        "--model",
        model.to_str().unwrap(),
        "--prop",
        prop.to_str().unwrap(),
        "--format",
        "json",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], false);
    assert!(!v["counterexample"]["cycle"].as_array().unwrap().is_empty());
    assert!(fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn mcs_on_fault_free_hazard_is_the_empty_set() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.tsm", FAULT_FREE_HAZARD);
    for strategy in ["naive", "systematic"] {
        let o = mcsa(&[
            "mcs",
            "--model",
            &m,
            "--prop",
            "G S = ok",
            "--strategy",
            strategy,
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o).lines().nth(1), Some("{}"));
    }
}

#[test]
fn mcs_report_contents() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.tsm", TWO_FAULTS);
    let out = dir.path().join("r.json");
    let o = mcsa(&[
        "mcs",
        "--model",
        &m,
        "--prop",
        "G S = ok",
        "--strategy",
        "naive",
        "--mode",
        "onthefly",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    // with --out the round table goes to standard output
    assert!(stdout(&o).starts_with("iteration,seconds,cumulative_seconds,ics_size,mcs_size\n"));
    let r = parse_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.strategy, "naive");
    assert_eq!(r.mode.as_deref(), Some("onthefly"));
    assert_eq!(r.sizes().len(), 2);
    assert_eq!(r.rounds.len(), 2);
    assert!(r
        .rounds
        .iter()
        .all(|x| x.ics_size >= x.mcs_size && x.seconds.is_some()));
    assert!(r.timings.is_some());

    let o = mcsa(&[
        "mcs", "--model", &m, "--prop", "G S = ok", "--format", "csv",
    ]);
    assert_eq!(stdout(&o), "size,iteration,events\n1,1,F3\n2,2,F1;F2\n");
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("iteration,"));
}

#[test]
fn a320_strategies_and_oracle_agree() {
    let (model, prop) = a320();
    let (model, prop) = (model.to_str().unwrap(), prop.to_str().unwrap());
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("sys.json");
    let orc = dir.path().join("oracle.csv");
    let o = mcsa(&[
        "mcs",
        "--model",
        model,
        "--prop",
        prop,
        "--format",
        "json",
        "--out",
        sys.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r = parse_json(&fs::read_to_string(&sys).unwrap()).unwrap();
    assert_eq!(r.mcs.len(), 21);
    assert!(r.sizes().windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(r.counters.unwrap().fixpoint_runs, 1);

    let o = mcsa(&[
        "oracle",
        "--model",
        model,
        "--prop",
        prop,
        "--format",
        "csv",
        "--out",
        orc.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let o = mcsa(&["diff", sys.to_str().unwrap(), orc.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn oracle_refuses_large_inputs() {
    let dir = TempDir::new().unwrap();
    let mut src = String::from("var S : {ok, bad} init ok;\n");
    for i in 0..20 {
        src.push_str(&format!("event F{i};\n"));
    }
    src.push_str("block fail { guard: S = ok & F0; S := bad; }\n");
    let m = write(&dir, "wide.tsm", &src);
    let o = mcsa(&["oracle", "--model", &m, "--prop", "G S = ok"]);
    assert_eq!(code(&o), 3);

    let m = write(&dir, "two.tsm", TWO_FAULTS);
    let o = mcsa(&[
        "oracle",
        "--model",
        &m,
        "--prop",
        "G S = ok",
        "--oracle-state-bound",
        "3",
    ]);
    assert_eq!(code(&o), 3);
    let o = mcsa(&["oracle", "--model", &m, "--prop", "G S = ok"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "2 minimal cut sets (oracle brute-force)\n{F3}\n{F1, F2}\n"
    );
}

#[test]
fn diff_reports() {
    let dir = TempDir::new().unwrap();
    let with_empty = write(
        &dir,
        "a.txt",
        "1 minimal cut sets (oracle brute-force)\n{}\n",
    );
    let none = write(&dir, "b.csv", "size,iteration,events\n");
    assert_eq!(code(&mcsa(&["diff", &with_empty, &with_empty])), 0);
    let o = mcsa(&["diff", &with_empty, &none]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), format!("only in {with_empty}: {{}}\n"));
    let bad = write(&dir, "c.json", "{ \"mcs\": 4 }");
    assert_eq!(code(&mcsa(&["diff", &with_empty, &bad])), 2);
    assert_eq!(code(&mcsa(&["diff", &with_empty, "/no/such/report"])), 2);
}

#[test]
fn random_model_runs_are_deterministic_and_agree() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.tsm");
    let prop = dir.path().join("p.ltl");
    let gen = |out: &Path| {
        mcsa(&[
            "gen-random-model",
            "--seed",
            "4",
            "--vars",
            "3",
            "--flags",
            "4",
            "--blocks",
            "7",
            "--schema",
            "always",
            "--prop-out",
            prop.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
    };
    assert_eq!(code(&gen(&model)), 0);
    let again = dir.path().join("m2.tsm");
    gen(&again);
    assert_eq!(fs::read(&model).unwrap(), fs::read(&again).unwrap());

    let run = |strategy: &str, name: &str| {
        let out = dir.path().join(name);
        let o = mcsa(&[
            "mcs",
            "--model",
            model.to_str().unwrap(),
            "--prop",
            prop.to_str().unwrap(),
            "--strategy",
            strategy,
            "--format",
            "json",
            "--no-timings",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        out
    };
    let a = run("systematic", "a.json");
    let b = run("systematic", "b.json");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let n = run("naive", "n.json");
    let o = mcsa(&["diff", a.to_str().unwrap(), n.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
