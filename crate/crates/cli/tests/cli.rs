use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use foldlab::formats::{self, ExprDoc, GraphDoc, SectionDoc};
use foldlab::momentgraph::Side;
use foldlab::poly::Poly;
use foldlab::rootsys::{catalog_build, Family};
use foldlab::structalg::{Section, SectionExpr};
use foldlab::QScalar;
use serde_json::Value;

fn foldlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldlab")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn catalog_lists_folded_families() {
    let o = foldlab(&["catalog"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "foldlab.catalog/1");
    let text = v.to_string();
    for f in ["a2c2", "a2c3", "d2b3", "a4h2", "d6h3", "e8h4"] {
        assert!(text.contains(f), "{f}");
    }
}

#[test]
fn fold_writes_the_folded_system() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h3.json");
    let o = foldlab(&["fold", "--family", "d6h3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: formats::FoldingDoc = formats::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.num_roots, 30);
    assert_eq!(doc.w_tau_order, 120);
    assert!(!doc.crystallographic);
}

#[test]
fn graph_json_is_deterministic() {
    let a = foldlab(&["graph", "--family", "d2b3", "--theta", "default", "--side", "source"]);
    let b = foldlab(&["graph", "--family", "d2b3", "--theta", "default", "--side", "source"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: GraphDoc = formats::parse(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert_eq!(doc.vertices.len(), 96);
}

#[test]
fn graph_dot_has_one_line_per_vertex() {
    let o = foldlab(&["graph", "--family", "a2c2", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let vertices = text.lines().filter(|l| l.trim_start().starts_with('v') && !l.contains("->")).count();
    assert_eq!(vertices, 8);
    assert_eq!(text.matches(" -> ").count(), 16);
}

#[test]
fn check_accepts_sections_and_rejects_non_sections() {
    let dir = tempfile::tempdir().unwrap();
    let g = foldlab(&["graph", "--family", "a1", "--side", "source"]);
    assert_eq!(g.status.code(), Some(0));
    let graph = write(dir.path(), "a1.json", std::str::from_utf8(&g.stdout).unwrap());

    let d = catalog_build(Family::A(1)).unwrap();
    let alg = d.space().alg();
    let x = Poly::var(1, 0);
    let good = Section::new(Side::Source, 1, vec![x.clone(), x.neg()]).unwrap();
    let good = write(dir.path(), "good.json", &formats::to_string(&SectionDoc::new(&good, d.names(), alg)).unwrap());
    let o = foldlab(&["check", "--graph", &graph, "--section", &good]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["valid"], true);

    let bad = Section::new(Side::Source, 1, vec![Poly::one(1), Poly::zero(1)]).unwrap();
    let bad = write(dir.path(), "bad.json", &formats::to_string(&SectionDoc::new(&bad, d.names(), alg)).unwrap());
    let o = foldlab(&["check", "--graph", &graph, "--section", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["valid"], false);
    assert_eq!(v["report"]["violations"][0]["edge"], 0);
    assert_eq!(v["report"]["violations"][0]["label"], "a1");
}

#[test]
fn map_pushes_characteristic_classes_forward() {
    let dir = tempfile::tempdir().unwrap();
    let d = catalog_build(Family::A2C(2)).unwrap();
    let alg = d.space().alg();
    let e = SectionExpr::Char(Poly::var(3, 0)).mul(SectionExpr::Const(Poly::var(3, 1)));
    let expr = write(dir.path(), "expr.json", &formats::to_string(&ExprDoc::new(&e, Side::Source, d.names(), alg)).unwrap());
    let out = dir.path().join("image.json");
    let o = foldlab(&["map", "--family", "a2c2", "--section", &expr, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], "foldlab.map/1");
    assert_eq!(v["valid"], true);
    assert_eq!(v["image"]["values"].as_array().unwrap().len(), 8);

    // a non-section on the source graph is refused before pushing forward
    let mut values = vec![Poly::zero(3); 24];
    values[0] = Poly::constant(3, QScalar::from_i64(1));
    let z = Section::new(Side::Source, 3, values).unwrap();
    let bad = write(dir.path(), "bad.json", &formats::to_string(&SectionDoc::new(&z, d.names(), alg)).unwrap());
    let o = foldlab(&["map", "--family", "a2c2", "--section", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["valid"], false);
    assert!(!v["error"].as_str().unwrap().is_empty());
}

#[test]
fn hilbert_reports_graded_dimensions() {
    let o = foldlab(&["hilbert", "--family", "a2c2", "--max-degree", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "foldlab.hilbert/1");
    let dims: Vec<u64> = v["dims"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 2, 2, 2, 1]);
}

#[test]
fn verify_passes_with_fixed_seed() {
    let o = foldlab(&["verify", "--family", "a2c2", "--suite", "theorem", "--degree", "2", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "foldlab.verify/1");
    assert_eq!(v["passed"], true);
    let again = foldlab(&["verify", "--family", "a2c2", "--suite", "theorem", "--degree", "2", "--seed", "7"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn configuration_errors_exit_with_two() {
    let o = foldlab(&["graph", "--family", "e8h4", "--theta", "a2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("𝒯-preserved"));

    let o = foldlab(&["--json-errors", "fold", "--family", "f4"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"], "Config");

    assert_eq!(foldlab(&["verify", "--family", "a3", "--suite", "props"]).status.code(), Some(2));
    assert_eq!(foldlab(&["--threads", "0", "catalog"]).status.code(), Some(2));
    assert_eq!(foldlab(&["no-such-command"]).status.code(), Some(2));
}
