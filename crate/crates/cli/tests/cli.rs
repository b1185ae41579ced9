use std::io::Write;
use std::process::{Command, Output, Stdio};

fn wdcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wdcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wdcalc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

const CTX: [&str; 4] = ["--ell", "5", "--q", "2"];

fn ctx_args<'a>(rest: &[&'a str]) -> Vec<&'a str> {
    let mut v: Vec<&str> = rest.to_vec();
    v.extend(CTX);
    v
}

#[test]
fn factors_of_a_cycle_have_trivial_l() {
    let o = wdcalc(&ctx_args(&["factors", "cyc(line(chi(t=1)); r=1)"]));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("L= 1\n"), "{out}");
    assert!(out.contains("GAMMA= ") && out.contains("EPSILON= unit: "));
}

#[test]
fn output_is_byte_stable() {
    let args = ctx_args(&["tensor", "seg(chi(t=1); r=3; a=1)", "{ seg(chi(t=2); r=2; a=0), cyc(line(chi(t=1)); r=1) }"]);
    assert_eq!(wdcalc(&args).stdout, wdcalc(&args).stdout);
}

#[test]
fn realize_then_decompose_round_trips() {
    let class = "{ seg(chi(t=1); r=2; a=3), cyc(line(chi(t=[0,1])); r=1) }";
    let normal = stdout(&wdcalc(&ctx_args(&["normalize", class])));
    let dump = wdcalc(&ctx_args(&["realize", class]));
    assert_eq!(dump.status.code(), Some(0));
    let back = with_stdin(&["decompose", "-"], &stdout(&dump));
    assert_eq!(back.status.code(), Some(0));
    assert_eq!(stdout(&back), normal);
}

#[test]
fn verify_preservation_prints_pass_table() {
    let o = wdcalc(&ctx_args(&["verify", "preservation", "--grid", "small"]));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("CTX "));
    assert!(out.ends_with("PASS\n"));
}

#[test]
fn oracle_reports_match() {
    let o = wdcalc(&["oracle", "--ell", "2", "--q", "3", "cyc(line(chi(t=1)); r=1)", "seg(chi(t=1); r=2; a=0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("VERDICT= MATCH"));
}

#[test]
fn correspond_shows_the_nilpotent_and_cyclic_parameters() {
    let o = wdcalc(&ctx_args(&["correspond", "stk(line=line(chi(t=1)), k=0; r=1)"]));
    let out = stdout(&o);
    assert!(out.contains("C= { cyc(line(chi(t=[1,0]@F(5^2))); r=1) }"), "{out}");
    assert_eq!(out.matches("seg(").count(), 4);
}

#[test]
fn json_mirrors_text_fields() {
    let o = wdcalc(&ctx_args(&["dual", "seg(chi(t=1); r=2; a=0)", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let text = stdout(&wdcalc(&ctx_args(&["dual", "seg(chi(t=1); r=2; a=0)"])));
    assert_eq!(format!("CLASS= {}\n", v["CLASS"].as_str().unwrap()), text);
}

#[test]
fn errors_exit_with_one_and_name_the_code() {
    let o = wdcalc(&ctx_args(&["normalize", "{ seg(chi(t=1); r=1; a=0"]));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error[ParseError]: parse error at position"), "{err}");
    let o = wdcalc(&ctx_args(&["cv", "{ cyc(line(chi(t=1)); r=1) }"]));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("ContainsCyc"));
    let o = wdcalc(&["normalize", "seg(chi(t=1); r=1; a=0)"]);
    assert_eq!(o.status.code(), Some(1));
    let o = wdcalc(&["--ell", "4", "--q", "3", "normalize", "{}"]);
    assert_eq!(o.status.code(), Some(1));
    let o = wdcalc(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fusion_file_is_loaded() {
    let dir = std::env::temp_dir().join(format!("wdcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fusion.txt");
    std::fs::write(
        &path,
        "IRR a dim=2 ord=4 dual=b\nIRR b dim=2 ord=4 dual=a\nFUSE a b -> (0,chi(t=1)) (1,chi(t=1)) (2,chi(t=1)) (3,chi(t=1))\n",
    )
    .unwrap();
    let o = wdcalc(&ctx_args(&["tensor", "seg(a; r=1; a=0)", "seg(b; r=1; a=0)", "--fusion-file", path.to_str().unwrap()]));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).matches("seg(").count(), 4);
    let o = wdcalc(&ctx_args(&["tensor", "seg(a; r=1; a=0)", "seg(a; r=1; a=0)", "--fusion-file", path.to_str().unwrap()]));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("MissingFusionRule"));
}

#[test]
fn twist_by_nu_and_by_character() {
    let o = wdcalc(&ctx_args(&["twist", "seg(chi(t=1); r=1; a=0)", "--nu", "-1"]));
    assert!(stdout(&o).contains("a=3"));
    let o = wdcalc(&ctx_args(&["twist", "seg(chi(t=1); r=1; a=0)"]));
    assert_eq!(o.status.code(), Some(1));
}
