use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn pgc<P: AsRef<std::ffi::OsStr>>(args: &[P]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn marginal_of_fig2() {
    let o = pgc(&[s(&data("fig2.circuit")), s(&data("fig2.parts")), s(&data("q.txt"))].iter().fold(
        vec!["marginalize".to_string()],
        |mut v, a| {
            v.push(a.clone());
            v
        },
    ));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn decimal_flag_adds_labelled_line() {
    let o = pgc(&["marginalize", &s(&data("fig2.circuit")), &s(&data("fig2.parts")), &s(&data("q.txt")), "--decimal", "3"]);
    assert_eq!(stdout(&o), "1/2\n~0.500 (approximate)\n");
}

#[test]
fn fig3_rejected_against_single_variable_parts() {
    let o = pgc(&["test-sml", &s(&data("fig3.circuit")), &s(&data("bad.parts")), "--seed", "7", "--confirm"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("rejected\nwitness: part"), "{text}");
    assert!(text.contains("confirmed true"));
}

#[test]
fn test_sml_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = pgc(&["compile", &s(&data("fig3.circuit")), "--out", &s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let parts = dir.path().join("c.json.parts");
    let a = pgc(&["test-sml", &s(&out), &s(&parts), "--seed", "11"]);
    let b = pgc(&["test-sml", &s(&out), &s(&parts), "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("accepted\n"));
}

#[test]
fn pm_count_of_fig4() {
    let o = pgc(&["oracle", "pm-count", &s(&data("fig4.graph"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "9");
}

#[test]
fn compile_then_marginalize_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex.json");
    let o = pgc(&["compile", &s(&data("example.circuit")), "--check", "--out", &s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let parts = dir.path().join("ex.json.parts");
    let o = pgc(&["check-dist", &s(&out), "--parts", &s(&parts)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2 2\n1 0 2/5\n1 1 3/5\n");
    let o = pgc(&["marginalize", &s(&out), &s(&parts), &s(&data("q.txt")), "--paranoid"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn compile_needs_out() {
    let o = pgc(&["compile", &s(&data("fig3.circuit"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_dist_of_fig3_prints_table() {
    let o = pgc(&["check-dist", &s(&data("fig3.circuit"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2 2\n0 0 1/6\n0 1 1/3\n1 0 1/6\n1 1 1/3\n");
}

#[test]
fn check_dist_flags_fig2_as_non_generating() {
    // The PC of Fig. 2 uses x/xb variables; as a binary PGC it is malformed.
    let o = pgc(&["check-dist", &s(&data("fig2.circuit"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = pgc(&["check-dist", &s(&data("fig2.circuit")), "--parts", &s(&data("fig2.parts"))]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_and_budget_codes() {
    assert_eq!(pgc(&["nonsense"]).status.code(), Some(2));
    assert_eq!(pgc(&["expand", "/no/such/file"]).status.code(), Some(2));
    let o = pgc(&["expand", &s(&data("fig3.circuit")), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let o = pgc(&["expand", &s(&data("fig3.circuit"))]);
    assert_eq!(stdout(&o).trim(), "1/6 + 1/6*z1 + 1/3*z1*z2 + 1/3*z2");
}

#[test]
fn eval_in_both_fields() {
    let dir = tempfile::tempdir().unwrap();
    let point = dir.path().join("p.txt");
    std::fs::write(&point, "x1 = 1\nxb1 = 0\nx2 = 0\nxb2 = 1\n").unwrap();
    let o = pgc(&["eval", &s(&data("fig2.circuit")), &s(&point)]);
    assert_eq!(stdout(&o).trim(), "1/6");
    let o = pgc(&["eval", &s(&data("fig2.circuit")), &s(&point), "--field", "fp"]);
    // 1/6 mod 2^61 - 1
    let p: u128 = (1 << 61) - 1;
    let inv6 = (0..6u128).map(|k| (k * p + 1) / 6).find(|v| (v * 6) % p == 1).unwrap();
    assert_eq!(stdout(&o).trim(), inv6.to_string());
}

#[test]
fn compose_round() {
    let dir = tempfile::tempdir().unwrap();
    let c1 = dir.path().join("a.json");
    assert_eq!(pgc(&["compile", &s(&data("fig3.circuit")), "--out", &s(&c1)]).status.code(), Some(0));
    let c2 = dir.path().join("b.json");
    assert_eq!(pgc(&["compile", &s(&data("example.circuit")), "--out", &s(&c2)]).status.code(), Some(0));
    let p1 = dir.path().join("a.json.parts");
    let p2 = dir.path().join("b.json.parts");

    let mix = dir.path().join("mix.json");
    let o = pgc(&["compose", "mix", &s(&c1), &s(&p1), &s(&c2), &s(&p2), "--alpha", "1/4", "--out", &s(&mix)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = pgc(&["check-dist", &s(&mix), "--parts", &s(&dir.path().join("mix.json.parts"))]);
    assert_eq!(stdout(&o), "2 2\n0 0 1/24\n0 1 1/12\n1 0 41/120\n1 1 8/15\n");

    let o = pgc(&["compose", "prod", &s(&c1), &s(&p1), &s(&c2), &s(&p2)]);
    assert_eq!(o.status.code(), Some(2), "overlapping scopes");

    let hier = dir.path().join("hier.json");
    let o = pgc(&[
        "compose", "hier", &s(&c1), &s(&p1), &s(&c1), &s(&p1), &s(&c2), &s(&p2), "--out", &s(&hier),
    ]);
    assert_eq!(o.status.code(), Some(2), "blocks must have disjoint scopes: {}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn dpp_commands() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("f.mat");
    let o = pgc(&["formula2dpp", &s(&data("formula.txt")), "--out", &s(&m)]);
    assert_eq!(stdout(&o).trim(), "size 23");
    let proj = dir.path().join("f.mat.proj");
    let o = pgc(&["verify-dpp", &s(&m), &s(&proj), "--formula", &s(&data("formula.txt"))]);
    assert_eq!(o.status.code(), Some(0));

    let wrong = dir.path().join("wrong.txt");
    std::fs::write(&wrong, "(y1 + 3) * (y2 * y3 + 1/2)").unwrap();
    let o = pgc(&["verify-dpp", &s(&m), &s(&proj), "--formula", &s(&wrong)]);
    assert_eq!(o.status.code(), Some(1));

    let text = std::fs::read_to_string(&m).unwrap().replacen("0 1 0 0 0 1", "D99 1 0 0 0 1", 1);
    std::fs::write(&m, text).unwrap();
    let o = pgc(&["verify-dpp", &s(&m), &s(&proj)]);
    assert_eq!(o.status.code(), Some(0), "a new diagonal variable is allowed");

    let a = dir.path().join("imm.mat");
    let o = pgc(&["abp2dpp", &s(&data("imm22.abp")), "--out", &s(&a), "--psd", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    let o = pgc(&["verify-dpp", &s(&a), &s(&dir.path().join("imm.mat.proj")), "--abp", &s(&data("imm22.abp"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = pgc(&["abp2dpp", &s(&data("imm22.abp")), "--out", &s(&a), "--psd", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn off_diagonal_variable_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.mat");
    std::fs::write(&m, "D1 y\n0 1\n").unwrap();
    let p = dir.path().join("m.proj");
    std::fs::write(&p, "").unwrap();
    assert_eq!(pgc(&["verify-dpp", &s(&m), &s(&p)]).status.code(), Some(1));
}

#[test]
fn reductions() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.graph");
    let o = pgc(&["gen-graph", "--kind", "3-regular", "--n", "4", "--seed", "5", "--out", &s(&g)]);
    assert_eq!(o.status.code(), Some(0));
    let again = pgc(&["gen-graph", "--kind", "3-regular", "--n", "4", "--seed", "5"]);
    assert_eq!(stdout(&again), std::fs::read_to_string(&g).unwrap());
    let o = pgc(&["verify-reduction", &s(&g), "--kind", "quaternary"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("identity holds"));

    let o = pgc(&["gen-graph", "--kind", "2-3", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2), "odd n");

    let k32 = dir.path().join("k32.graph");
    std::fs::write(&k32, "3 2\n1 1\n1 2\n2 1\n2 2\n3 1\n3 2\n").unwrap();
    assert_eq!(stdout(&pgc(&["oracle", "rmatch", &s(&k32)])).trim(), "6 + 6*x + x^2");
    assert_eq!(stdout(&pgc(&["oracle", "rmatch", &s(&k32), "--lambda", "2"])).trim(), "22");
    let o = pgc(&["verify-reduction", &s(&k32), "--kind", "ternary", "--lambda", "1"]);
    assert!(stdout(&o).starts_with("marginal 13/16\n"));

    let pgc_out = dir.path().join("t.json");
    let o = pgc(&["graph2pgc", &s(&k32), "--kind", "ternary", "--lambda", "1", "--out", &s(&pgc_out)]);
    assert_eq!(stdout(&o).trim(), "normalization 16");
    let o = pgc(&["check-dist", &s(&pgc_out), "--vars", &s(&dir.path().join("t.json.vars"))]);
    assert_eq!(o.status.code(), Some(0));
    let o = pgc(&["graph2pgc", &s(&k32), "--kind", "quaternary"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_reports_structure() {
    let o = pgc(&["validate", &s(&data("fig2.circuit"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("division-free true"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"variables":[],"nodes":[{"kind":"prod","children":[1]},{"kind":"const","value":"1"}],"output":0}"#).unwrap();
    assert_eq!(pgc(&["validate", &s(&bad)]).status.code(), Some(1));
}
