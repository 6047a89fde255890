use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn twoway(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoway")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_prints_the_output() {
    let fig1 = fixture("fig1.2wt");
    let o = twoway(&["simulate", path(&fig1), "--input", "aababb"]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("aabbab\n", 0));
    let o = twoway(&["simulate", path(&fixture("parity.2wt")), "--input", "a"]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("undefined (rejected)\n", 1));
    let o = twoway(&["simulate", path(&fixture("example4.fot")), "--input", "ab"]);
    assert_eq!(stdout(&o), "ab\n");
    let o = twoway(&["simulate", path(&fig1), "--input", "ab", "--trace"]);
    assert!(stdout(&o).starts_with("step\tpos\tsym\tstate\toutput\n0\t0\t^\t1\t\n"));
}

#[test]
fn errors_exit_with_two() {
    let o = twoway(&["simulate", "no-such-file.2wt", "--input", "a"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    let o = twoway(&["simulate", path(&fixture("fig1.2wt")), "--input", "abc"]);
    assert_eq!(code(&o), 2);
    let o = twoway(&["behaviors", path(&fixture("example4.fot")), "--input", "a"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn monoid_and_aperiodicity() {
    let fig1 = fixture("fig1.2wt");
    let o = twoway(&["monoid", path(&fig1), "--class", "bab"]);
    let text = stdout(&o);
    assert!(text.starts_with("9 elements\n"));
    assert!(text.ends_with("bab in [bb]\n"));
    let o = twoway(&["aperiodic", path(&fig1)]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("aperiodic (9 elements, index 2)\n", 0));
    let o = twoway(&["aperiodic", path(&fixture("parity.2wt"))]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness [a] with period 2"));

    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("fig1.monoid");
    assert_eq!(code(&twoway(&["monoid", path(&fig1), "-o", path(&m)])), 0);
    let o = twoway(&["--json", "aperiodic", path(&m)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["aperiodic"].as_bool(), v["elements"].as_u64(), v["index"].as_u64()), (Some(true), Some(9), Some(2)));
}

#[test]
fn translations_written_to_files_stay_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let fig1 = fixture("fig1.2wt");
    let fot = dir.path().join("fig1.fot");
    assert_eq!(code(&twoway(&["to-fot", path(&fig1), "-o", path(&fot)])), 0);
    let o = twoway(&["check-equiv", path(&fig1), path(&fot), "--max-len", "5"]);
    assert_eq!(stdout(&o), "equivalent-up-to-5\n");

    let ex4 = fixture("example4.fot");
    for stage in ["fola", "sfla", "twoway"] {
        let out = dir.path().join(format!("ex4.{stage}"));
        assert_eq!(code(&twoway(&["from-fot", path(&ex4), "--stage", stage, "-o", path(&out)])), 0, "{stage}");
        let o = twoway(&["check-equiv", path(&ex4), path(&out), "--max-len", "4"]);
        assert_eq!((stdout(&o).as_str(), code(&o)), ("equivalent-up-to-4\n", 0), "{stage}");
    }

    let norm = dir.path().join("norm.2wt");
    assert_eq!(code(&twoway(&["normalize", path(&fig1), "-o", path(&norm)])), 0);
    let o = twoway(&["check-equiv", path(&fig1), path(&norm), "--max-len", "6"]);
    assert_eq!(stdout(&o), "equivalent-up-to-6\n");

    // the mirror reads reversed inputs, so only the double mirror is comparable
    let (once, twice) = (dir.path().join("m1.2wt"), dir.path().join("m2.2wt"));
    assert_eq!(code(&twoway(&["mirror", path(&fig1), "-o", path(&once)])), 0);
    assert_eq!(code(&twoway(&["mirror", path(&once), "-o", path(&twice)])), 0);
    let o = twoway(&["check-equiv", path(&fig1), path(&twice), "--max-len", "6"]);
    assert_eq!(stdout(&o), "equivalent-up-to-6\n");
    let o = twoway(&["simulate", path(&once), "--input", "bbabaa"]);
    assert_eq!(stdout(&o), "aabbab\n");
}

#[test]
fn compose_with_identity() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.seq");
    std::fs::write(&id, "type: sequential\ninput: a b\noutput: a b\nstates: s\ninitial: s\nfinal: s\ns a -> s / a\ns b -> s / b\n")
        .unwrap();
    let fig1 = fixture("fig1.2wt");
    for right in [false, true] {
        let out = dir.path().join("c.2wt");
        let mut args = vec!["compose", path(&id), path(&fig1), "-o", path(&out)];
        if right {
            args.push("--right");
        }
        assert_eq!(code(&twoway(&args)), 0);
        let o = twoway(&["check-equiv", path(&fig1), path(&out), "--max-len", "5"]);
        assert_eq!(stdout(&o), "equivalent-up-to-5\n");
    }
}

#[test]
fn check_equiv_reports() {
    let (fig1, rev) = (fixture("fig1.2wt"), fixture("reverse.2wt"));
    let o = twoway(&["check-equiv", path(&fig1), path(&rev), "--max-len", "3"]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("counterexample \"a\" (\"ab\" vs \"a\")\n", 1));
    let o = twoway(&["--json", "check-equiv", path(&fig1), path(&fixture("example4.fot")), "--max-len", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "equivalent-up-to-3");
    assert_eq!(v["words_tested"], 14);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 6);
    let o = twoway(&["check-equiv", path(&fig1), path(&fixture("parity.2wt"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn eval_formula_on_words() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.formula");
    std::fs::write(&f, "type: formula\nalphabet: a b\nvars: x\n\n(exists y (and (le x y) (not (le y x)) (letter b y)))\n").unwrap();
    let o = twoway(&["eval-formula", path(&f), "--input", "aab", "--assign", "x=2"]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("true\n", 0));
    let o = twoway(&["eval-formula", path(&f), "--input", "aab", "--assign", "x=3"]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("false\n", 1));
    assert_eq!(code(&twoway(&["eval-formula", path(&f), "--input", "aab"])), 2);
}

#[test]
fn output_is_deterministic() {
    let ex4 = fixture("example4.fot");
    let runs: Vec<Vec<u8>> = (0..2).map(|_| twoway(&["from-fot", path(&ex4)]).stdout).collect();
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);
    let fig1 = fixture("fig1.2wt");
    let runs: Vec<Vec<u8>> = (0..2).map(|_| twoway(&["--json", "monoid", path(&fig1)]).stdout).collect();
    assert_eq!(runs[0], runs[1]);
}
