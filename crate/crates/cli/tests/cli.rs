use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run_with(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_smoothkit"));
    cmd.args(args)
        .env_remove("SMOOTHKIT_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn smoothkit");
    let mut pipe = child.stdin.take().expect("stdin");
    if let Some(s) = stdin {
        pipe.write_all(s.as_bytes()).expect("write stdin");
    }
    drop(pipe);
    child.wait_with_output().expect("wait")
}

fn run(args: &[&str]) -> Output {
    run_with(args, None, &[])
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn freq_reproduces_closed_form() {
    let o = run(&["freq", "--tau", "0001(1)"]);
    assert_eq!(o.status.code(), Some(0));
    let f = json(&o)["f_ones"].as_f64().unwrap();
    assert!((f - (0.5 - 1.0 / (13.0 - 5f64.sqrt()))).abs() < 1e-9);
}

#[test]
fn construct_example() {
    let o = run(&["construct", "--tau", "(1)", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "BABC|DCBAB");
}

#[test]
fn pattern_freq_of_forbidden_pair_is_zero() {
    let o = run(&["pattern-freq", "--tau", "(0)", "--word", "DD"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["value"].as_f64(), Some(0.0));
}

#[test]
fn derive_reads_stdin() {
    let o = run_with(&["derive"], Some("333|1113131\n"), &[]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines[0], "333|1113131");
    assert!(lines.len() >= 2);
    let arg = run(&["derive", "333|1113131"]);
    assert_eq!(stdout(&arg), stdout(&o));
}

#[test]
fn recode_and_back() {
    let o = run(&["recode", "--closure", "1", "333|111333"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "D|CD");
    let back = run(&["recode", "--inverse", "D|CD"]);
    assert_eq!(stdout(&back).trim(), "333|111333");
    // without closure the edge runs are untrusted
    assert_eq!(stdout(&run(&["recode", "333|111333"])).trim(), "C");
}

#[test]
fn compose_prints_printed_words() {
    let o = run(&["compose", "--bits", "000", "D"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim().replace('|', ""), "DCDABADCDADADCDABADCD");
}

#[test]
fn domain_error_exits_2() {
    let o = run(&["recode", "1111"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["freq"]).status.code(), Some(64));
    assert_eq!(run(&["freq", "--tau", "01(2)"]).status.code(), Some(64));
    assert_eq!(run(&["derive", "12|3"]).status.code(), Some(64));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["freq", "--help"]).status.code(), Some(0));
}

#[test]
fn budget_caps_enumeration() {
    let capped = run_with(
        &["fractal", "--rank", "3"],
        None,
        &[("SMOOTHKIT_BUDGET", "4")],
    );
    assert_eq!(capped.status.code(), Some(2));
    let fine = run_with(
        &["fractal", "--rank", "2"],
        None,
        &[("SMOOTHKIT_BUDGET", "4")],
    );
    assert_eq!(fine.status.code(), Some(0));
    let bad = run_with(
        &["fractal", "--rank", "2"],
        None,
        &[("SMOOTHKIT_BUDGET", "lots")],
    );
    assert_eq!(bad.status.code(), Some(64));
    let sup = run_with(&["sup", "--rank", "5"], None, &[("SMOOTHKIT_BUDGET", "16")]);
    assert_eq!(sup.status.code(), Some(2));
}

#[test]
fn fractal_csv() {
    let o = run(&["fractal", "--rank", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("prefix,ax,ay,bx,by,cx,cy,dx,dy,f_lo,f_hi")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert!(rows[0].starts_with("000,"));
    for r in rows {
        let v: Vec<f64> = r.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert_eq!(v.len(), 10);
        assert!(v[8] <= v[9]);
    }
}

#[test]
fn fractal_svg() {
    let o = run(&["fractal", "--rank", "4", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("<svg"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<title>").count(), 16);
}

#[test]
fn fractal_json() {
    let o = run(&["fractal", "--rank", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["fractal", "--rank", "6", "--format", "csv"][..],
        &["probe", "--samples", "5000", "--seed", "9"],
        &["sup", "--rank", "7"],
    ] {
        let par = run(args);
        let again = run(args);
        let mut seq_args = args.to_vec();
        seq_args.push("--sequential");
        let seq = run(&seq_args);
        assert_eq!(par.stdout, again.stdout);
        assert_eq!(par.stdout, seq.stdout);
    }
}

#[test]
fn probe_flags_non_contracting_alphabet() {
    let o = run(&["probe", "--alphabet", "1,9", "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["contracting"], false);
    let o = run(&["probe", "--alphabet", "{3,7}", "--samples", "2000"]);
    assert_eq!(json(&o)["contracting"], true);
}

#[test]
fn verify_passes_and_notes_erratum() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("0.8819660"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn sup_brackets_closed_form() {
    let o = run(&[
        "sup", "--rank", "10", "--domain", "half", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let target = 0.5 - 1.0 / (13.0 - 5f64.sqrt());
    assert!(v["lower"].as_f64().unwrap() <= target);
    assert!(v["upper"].as_f64().unwrap() >= target);
}
