//! Versioned JSON documents and DOT export.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{FoldError, Result};
use crate::folding::FoldingContext;
use crate::momentgraph::{format_root, Edge, MomentGraph, Side};
use crate::poly::{Mono, Poly};
use crate::rootsys::RootSystem;
use crate::scalars::{Alg, AlgebraHeader, QScalar, QScalarJson};
use crate::structalg::{Section, SectionExpr};

pub const FOLDING_SCHEMA: &str = "foldlab.folding/1";
pub const GRAPH_SCHEMA: &str = "foldlab.graph/1";
pub const SECTION_SCHEMA: &str = "foldlab.section/1";
pub const EXPR_SCHEMA: &str = "foldlab.expr/1";
pub const POLY_SCHEMA: &str = "foldlab.poly/1";

fn check_schema(found: &str, expected: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(FoldError::Parse(format!("expected schema '{expected}', found '{found}'")))
    }
}

fn to_json(v: &[QScalar]) -> Vec<QScalarJson> {
    v.iter().map(QScalar::to_json).collect()
}

fn from_json(v: &[QScalarJson], alg: Alg) -> Vec<QScalar> {
    v.iter().map(|x| x.resolve(alg)).collect()
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| FoldError::Parse(e.to_string()))
}

pub fn to_string<T: Serialize>(doc: &T) -> Result<String> {
    serde_json::to_string_pretty(doc).map_err(|e| FoldError::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u8>,
    pub c: QScalarJson,
}

fn terms_of(p: &Poly) -> Vec<TermJson> {
    p.terms().map(|(m, c)| TermJson { exp: m.exps().to_vec(), c: c.to_json() }).collect()
}

fn poly_of(nvars: usize, terms: &[TermJson], alg: Alg) -> Result<Poly> {
    Poly::from_terms(nvars, terms.iter().map(|t| (Mono(t.exp.iter().copied().collect()), t.c.resolve(alg))))
}

/// A single polynomial: `{"vars": [...], "terms": [{"exp": [...], "c": ...}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyDoc {
    pub schema: String,
    pub algebra: AlgebraHeader,
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl PolyDoc {
    pub fn new(p: &Poly, vars: &[String], alg: Alg) -> Self {
        PolyDoc { schema: POLY_SCHEMA.into(), algebra: AlgebraHeader::of(alg), vars: vars.to_vec(), terms: terms_of(p) }
    }

    pub fn to_poly(&self) -> Result<Poly> {
        check_schema(&self.schema, POLY_SCHEMA)?;
        poly_of(self.vars.len(), &self.terms, self.algebra.resolve()?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldingDoc {
    pub schema: String,
    pub family: String,
    pub algebra: AlgebraHeader,
    pub source_roots: Vec<String>,
    pub invariant: Vec<String>,
    pub pairs: Vec<(String, String)>,
    pub folded_roots: Vec<String>,
    /// Source simple root behind each folded simple root.
    pub folded_from: Vec<String>,
    /// Ambient coordinates of the folded simple roots.
    pub delta_tau: Vec<Vec<QScalarJson>>,
    /// Lifted reflections as source words, first reflection first.
    pub lifts: Vec<Vec<String>>,
    pub cartan: Vec<Vec<QScalarJson>>,
    pub crystallographic: bool,
    pub num_roots: usize,
    pub num_positive: usize,
    pub positive_roots: Vec<Vec<QScalarJson>>,
    pub w_tau_order: u64,
}

impl FoldingDoc {
    pub fn new(family: &str, ctx: &FoldingContext) -> Self {
        let names = ctx.datum().names();
        let part = ctx.partition();
        let target = ctx.target();
        FoldingDoc {
            schema: FOLDING_SCHEMA.into(),
            family: family.into(),
            algebra: AlgebraHeader::of(ctx.datum().space().alg()),
            source_roots: names.to_vec(),
            invariant: part.invariant.iter().map(|&i| names[i].clone()).collect(),
            pairs: part.pairs.iter().map(|&(a, b)| (names[a].clone(), names[b].clone())).collect(),
            folded_roots: target.names().to_vec(),
            folded_from: ctx.sources().iter().map(|&s| names[s].clone()).collect(),
            delta_tau: ctx.delta_tau().iter().map(|v| to_json(v.coords())).collect(),
            lifts: ctx.lifts().iter().map(|w| w.iter().map(|&s| names[s].clone()).collect()).collect(),
            cartan: target.cartan().iter().map(|r| to_json(r)).collect(),
            crystallographic: target.is_crystallographic(),
            num_roots: ctx.phi_tau().len(),
            num_positive: target.num_positive(),
            positive_roots: target.positive_roots().iter().map(|r| to_json(r)).collect(),
            w_tau_order: ctx.w_tau_order(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(&self.schema, FOLDING_SCHEMA)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: u32,
    pub coords: Vec<QScalarJson>,
    pub word: Vec<u8>,
    pub rank: u32,
}

/// A moment graph: the root system (Gram matrix), positive roots used as
/// labels, vertices in weight coordinates and labeled edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub schema: String,
    pub side: Side,
    pub algebra: AlgebraHeader,
    pub root_names: Vec<String>,
    pub gram: Vec<Vec<QScalarJson>>,
    pub labels: Vec<Vec<QScalarJson>>,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<Edge>,
}

impl GraphDoc {
    pub fn new(g: &MomentGraph, alg: Alg) -> Self {
        let sys = g.system();
        GraphDoc {
            schema: GRAPH_SCHEMA.into(),
            side: g.side(),
            algebra: AlgebraHeader::of(alg),
            root_names: sys.names().to_vec(),
            gram: sys.gram().iter().map(|r| to_json(r)).collect(),
            labels: sys.positive_roots().iter().map(|r| to_json(r)).collect(),
            vertices: g
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| VertexJson { id: i as u32, coords: to_json(&v.coords), word: v.word.clone(), rank: v.rank })
                .collect(),
            edges: g.edges().to_vec(),
        }
    }

    /// Rebuilds the graph from its root system and base point, and checks that
    /// the result agrees with the document.
    pub fn to_graph(&self, bound: usize) -> Result<(MomentGraph, Alg)> {
        check_schema(&self.schema, GRAPH_SCHEMA)?;
        let alg = self.algebra.resolve()?;
        let gram = self.gram.iter().map(|r| from_json(r, alg)).collect();
        let sys = RootSystem::from_gram(self.root_names.clone(), gram, bound)?;
        let base = self.vertices.first().ok_or_else(|| FoldError::Parse("graph has no vertices".into()))?;
        let g = MomentGraph::build(self.side, sys, from_json(&base.coords, alg), bound)?;
        if GraphDoc::new(&g, alg) != *self {
            return Err(FoldError::Parse("graph document is inconsistent with its root system".into()));
        }
        Ok((g, alg))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionDoc {
    pub schema: String,
    pub side: Side,
    pub algebra: AlgebraHeader,
    pub vars: Vec<String>,
    pub values: Vec<Vec<TermJson>>,
}

impl SectionDoc {
    pub fn new(s: &Section, vars: &[String], alg: Alg) -> Self {
        SectionDoc {
            schema: SECTION_SCHEMA.into(),
            side: s.side(),
            algebra: AlgebraHeader::of(alg),
            vars: vars.to_vec(),
            values: s.values().iter().map(terms_of).collect(),
        }
    }

    pub fn to_section(&self) -> Result<Section> {
        check_schema(&self.schema, SECTION_SCHEMA)?;
        let alg = self.algebra.resolve()?;
        let n = self.vars.len();
        let values = self.values.iter().map(|t| poly_of(n, t, alg)).collect::<Result<_>>()?;
        Section::new(self.side, n, values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExprJson {
    Const(Vec<TermJson>),
    Char(Vec<TermJson>),
    Add(Box<ExprJson>, Box<ExprJson>),
    Mul(Box<ExprJson>, Box<ExprJson>),
}

impl ExprJson {
    fn of(e: &SectionExpr) -> Self {
        match e {
            SectionExpr::Const(p) => ExprJson::Const(terms_of(p)),
            SectionExpr::Char(p) => ExprJson::Char(terms_of(p)),
            SectionExpr::Add(a, b) => ExprJson::Add(Box::new(Self::of(a)), Box::new(Self::of(b))),
            SectionExpr::Mul(a, b) => ExprJson::Mul(Box::new(Self::of(a)), Box::new(Self::of(b))),
        }
    }

    fn to_expr(&self, n: usize, alg: Alg) -> Result<SectionExpr> {
        Ok(match self {
            ExprJson::Const(t) => SectionExpr::Const(poly_of(n, t, alg)?),
            ExprJson::Char(t) => SectionExpr::Char(poly_of(n, t, alg)?),
            ExprJson::Add(a, b) => a.to_expr(n, alg)?.add(b.to_expr(n, alg)?),
            ExprJson::Mul(a, b) => a.to_expr(n, alg)?.mul(b.to_expr(n, alg)?),
        })
    }
}

/// A section given symbolically by constants and characteristic classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExprDoc {
    pub schema: String,
    pub side: Side,
    pub algebra: AlgebraHeader,
    pub vars: Vec<String>,
    pub expr: ExprJson,
}

impl ExprDoc {
    pub fn new(e: &SectionExpr, side: Side, vars: &[String], alg: Alg) -> Self {
        ExprDoc {
            schema: EXPR_SCHEMA.into(),
            side,
            algebra: AlgebraHeader::of(alg),
            vars: vars.to_vec(),
            expr: ExprJson::of(e),
        }
    }

    pub fn to_expr(&self) -> Result<SectionExpr> {
        check_schema(&self.schema, EXPR_SCHEMA)?;
        self.expr.to_expr(self.vars.len(), self.algebra.resolve()?)
    }
}

/// Either kind of section input, told apart by the schema field.
pub enum SectionInput {
    Values(Section),
    Expr(SectionExpr),
}

pub fn parse_section_input(text: &str) -> Result<SectionInput> {
    #[derive(Deserialize)]
    struct Probe {
        schema: String,
    }
    let probe: Probe = parse(text)?;
    match probe.schema.as_str() {
        SECTION_SCHEMA => Ok(SectionInput::Values(parse::<SectionDoc>(text)?.to_section()?)),
        EXPR_SCHEMA => Ok(SectionInput::Expr(parse::<ExprDoc>(text)?.to_expr()?)),
        other => Err(FoldError::Parse(format!("'{other}' is not a section schema"))),
    }
}

/// Streams a graph in DOT format: one cluster per rank, edges labeled by roots.
pub fn write_dot(g: &MomentGraph, w: &mut impl Write) -> io::Result<()> {
    let names = g.system().names();
    writeln!(w, "digraph moment_graph {{")?;
    writeln!(w, "  rankdir=BT;")?;
    let max_rank = g.vertices().iter().map(|v| v.rank).max().unwrap_or(0);
    let mut by_rank: Vec<Vec<usize>> = vec![Vec::new(); max_rank as usize + 1];
    for (i, v) in g.vertices().iter().enumerate() {
        by_rank[v.rank as usize].push(i);
    }
    for (r, vs) in by_rank.iter().enumerate() {
        writeln!(w, "  subgraph cluster_rank{r} {{")?;
        writeln!(w, "    label=\"rank {r}\";")?;
        for &v in vs {
            writeln!(w, "    v{v};")?;
        }
        writeln!(w, "  }}")?;
    }
    let labels: Vec<String> = g.system().positive_roots().iter().map(|b| format_root(b, names)).collect();
    for e in g.edges() {
        writeln!(w, "  v{} -> v{} [label=\"{}\"];", e.src, e.dst, labels[e.label as usize])?;
    }
    writeln!(w, "}}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momentgraph::{build_graph, choose_theta, DEFAULT_VERTEX_BOUND};
    use crate::rootsys::{catalog_build, Family};
    use crate::structalg::char_class;

    #[test]
    fn graph_round_trip() {
        let d = catalog_build(Family::A(2)).unwrap();
        let cfg = choose_theta(&d, &[]).unwrap();
        let g = build_graph(&d, &cfg, DEFAULT_VERTEX_BOUND).unwrap();
        let alg = d.space().alg();
        let doc = GraphDoc::new(&g, alg);
        let text = to_string(&doc).unwrap();
        let back: GraphDoc = parse(&text).unwrap();
        assert_eq!(back, doc);
        let (g2, _) = back.to_graph(DEFAULT_VERTEX_BOUND).unwrap();
        assert_eq!(g2.edges(), g.edges());

        let mut tampered = doc.clone();
        tampered.edges.pop();
        assert!(tampered.to_graph(DEFAULT_VERTEX_BOUND).is_err());

        let s = char_class(&g, &Poly::var(2, 0)).unwrap();
        let sd = SectionDoc::new(&s, d.names(), alg);
        let back: SectionDoc = parse(&to_string(&sd).unwrap()).unwrap();
        assert_eq!(back.to_section().unwrap(), s);

        let mut dot = Vec::new();
        write_dot(&g, &mut dot).unwrap();
        let dot = String::from_utf8(dot).unwrap();
        assert!(dot.contains("label=\"a1+a2\""));
        assert_eq!(dot.matches("->").count(), 9);
    }

    #[test]
    fn wrong_schema() {
        let err = parse_section_input(r#"{"schema": "foldlab.graph/1"}"#).err().unwrap();
        assert!(matches!(err, FoldError::Parse(_)));
    }
}
