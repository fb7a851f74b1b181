use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn tg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tg")).args(args).env_remove("TG_NODE_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn graph_of(text: &str) -> tg_core::CanonicalTermGraph {
    let doc = tg_core::Document::parse(text).unwrap();
    tg_core::canonicalize(&doc.graphs[0].1)
}

#[test]
fn distance_of_identical_files_is_zero() {
    let g = fixture("cons-g2.tg");
    let o = tg(&["dist", &g, &g]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
    assert_eq!(stdout(&tg(&["sim", &g, &g])), "omega\n");
}

#[test]
fn distance_between_differing_graphs() {
    let o = tg(&["dist", &fixture("order-g0.tg"), &fixture("order-g1.tg")]);
    assert_eq!(stdout(&o), "2^-1\n");
}

#[test]
fn glb_of_rigid_lower_bounds() {
    let o = tg(&["glb", &fixture("glb-g1.tg"), &fixture("glb-g2.tg")]);
    assert_eq!(o.status.code(), Some(0));
    let expected = std::fs::read_to_string(fixture("glb-g5.tg")).unwrap();
    assert_eq!(graph_of(&stdout(&o)), graph_of(&expected));
}

#[test]
fn leq_exit_codes() {
    let (a, b) = (fixture("order-g0.tg"), fixture("order-g1.tg"));
    assert_eq!(tg(&["leq", &a, &b]).status.code(), Some(1));
    assert_eq!(tg(&["leq", "--simple", &a, &b]).status.code(), Some(0));
    assert_eq!(tg(&["leq", &a, &a]).status.code(), Some(0));
}

#[test]
fn lub_incompatible_is_negative() {
    let dir = std::env::temp_dir().join(format!("tg-lub-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.tg"), dir.join("b.tg"));
    std::fs::write(&a, "sig { f/2; a/0; b/0; }\ngraph p { root r; r: f(x, y); x: a; y: _|_; }\n").unwrap();
    std::fs::write(&b, "sig { f/2; a/0; b/0; }\ngraph q { root r; r: f(x, y); x: b; y: _|_; }\n").unwrap();
    let o = tg(&["lub", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("incompatible"));
    std::fs::remove_dir_all(dir).unwrap();
    let o = tg(&["lub", &fixture("lub-g.tg"), &fixture("lub-h.tg")]);
    assert_eq!(o.status.code(), Some(0));
    let expected = std::fs::read_to_string(fixture("lub-result.tg")).unwrap();
    assert_eq!(graph_of(&stdout(&o)), graph_of(&expected));
}

#[test]
fn parse_error_exits_two() {
    let dir = std::env::temp_dir().join(format!("tg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.tg");
    std::fs::write(&bad, "graph g { root r; r: f(r, }\n").unwrap();
    let o = tg(&["canon", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.tg:1:"));
    assert_eq!(tg(&["canon", "/nonexistent/x.tg"]).status.code(), Some(2));
    assert_eq!(tg(&["frobnicate"]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn node_cap_exits_three() {
    let o = Command::new(env!("CARGO_BIN_EXE_tg"))
        .args(["trunc", "-d", "3", &fixture("dup-rho2-omega-trunc4.tg")])
        .env("TG_NODE_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let runs: Vec<String> = (0..3)
        .map(|_| stdout(&tg(&["rewrite", &format!("{}#s1", fixture("cons.tg")), &fixture("cons-acycle.tg"), "--steps", "6"])))
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
    let e1 = stdout(&tg(&["enum", "--max-nodes", "2", "--bot"]));
    let e2 = stdout(&tg(&["enum", "--max-nodes", "2", "--bot"]));
    assert_eq!(e1, e2);
}

#[test]
fn enumeration_matches_golden() {
    let o = tg(&["enum", "--max-nodes", "2", "--sig", "f/2,a/0"]);
    let golden = std::fs::read_to_string(fixture("golden/enum-f2-a0-max2.tg")).unwrap();
    let a = tg_core::Document::parse(&stdout(&o)).unwrap();
    let b = tg_core::Document::parse(&golden).unwrap();
    let canon = |d: &tg_core::Document| d.graphs.iter().map(|(_, g)| tg_core::canonicalize(g)).collect::<Vec<_>>();
    assert_eq!(canon(&a), canon(&b));
}

#[test]
fn rewrite_reports_steps_and_limit() {
    let o = tg(&[
        "rewrite",
        &format!("{}#s1", fixture("cons.tg")),
        &fixture("cons-acycle.tg"),
        "--steps",
        "8",
        "--analyze",
        "p",
        "--depth",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("# step 2: rho1 at <1>"));
    assert!(out.contains("# depth-4-exact"));
    let limit = tg_core::Document::parse(&out).unwrap();
    assert_eq!(
        tg_core::unravel_to_depth(&limit.graphs[0].1, 8).to_string(),
        "cons(b,cons(b,cons(b,cons(_|_,_|_))))"
    );
}

#[test]
fn divergent_trace_is_not_cauchy() {
    let o = tg(&[
        "rewrite",
        &format!("{}#s3", fixture("dup.tg")),
        &fixture("dup-start.tg"),
        "--steps",
        "5",
        "--analyze",
        "m",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not Cauchy"));
}

#[test]
fn script_strategy() {
    let o = tg(&[
        "rewrite",
        &format!("{}#s1", fixture("cons.tg")),
        &fixture("cons-start.tg"),
        "--strategy",
        "script",
        "--script",
        "root:rho1,1:rho1",
        "--steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("end of script"));
}

#[test]
fn dot_for_graph_and_rule() {
    let o = tg(&["dot", &fixture("cons-g2.tg")]);
    let golden = std::fs::read_to_string(fixture("golden/cons-g2.dot")).unwrap();
    assert_eq!(stdout(&o), golden.replacen("digraph \"g2\"", "digraph \"g\"", 1));
    let o = tg(&["dot", &format!("{}#rho3", fixture("dup.tg"))]);
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("golden/dup-rho3.dot")).unwrap());
}
