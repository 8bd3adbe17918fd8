use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FoldError, Result};
use crate::folding::FoldingContext;
use crate::momentgraph::{MomentGraph, Side, TauGraph};
use crate::poly::{monomials, pi_tau_hom, simple_reflection_poly, Mono, Poly};
use crate::scalars::{Alg, Mode, QScalar};

/// One polynomial per vertex of a moment graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    side: Side,
    nvars: usize,
    values: Vec<Poly>,
}

impl Section {
    pub fn new(side: Side, nvars: usize, values: Vec<Poly>) -> Result<Self> {
        if let Some(p) = values.iter().find(|p| p.nvars() != nvars) {
            return Err(FoldError::Dimension { expected: nvars, found: p.nvars() });
        }
        Ok(Section { side, nvars, values })
    }

    /// `s` in every slot.
    pub fn constant(side: Side, len: usize, s: Poly) -> Self {
        Section { side, nvars: s.nvars(), values: vec![s; len] }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Poly] {
        &self.values
    }

    pub fn value(&self, v: usize) -> &Poly {
        &self.values[v]
    }

    /// Largest degree among the values.
    pub fn degree(&self) -> Option<u32> {
        self.values.iter().filter_map(Poly::degree).max()
    }

    fn zip(&self, o: &Section, f: impl Fn(&Poly, &Poly) -> Poly) -> Result<Section> {
        if self.side != o.side || self.len() != o.len() || self.nvars != o.nvars {
            return Err(FoldError::Config("sections live on different graphs".into()));
        }
        let values = self.values.iter().zip(&o.values).map(|(a, b)| f(a, b)).collect();
        Ok(Section { side: self.side, nvars: self.nvars, values })
    }

    pub fn add(&self, o: &Section) -> Result<Section> {
        self.zip(o, Poly::add)
    }

    pub fn mul(&self, o: &Section) -> Result<Section> {
        self.zip(o, Poly::mul)
    }

    /// The `S`-module structure: `s · (z_x) = (s z_x)`.
    pub fn scale_by(&self, s: &Poly) -> Section {
        Section { side: self.side, nvars: self.nvars, values: self.values.iter().map(|z| s.mul(z)).collect() }
    }
}

/// A section built from constants and characteristic classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectionExpr {
    /// `s` at every vertex.
    Const(Poly),
    /// `c(t)`: `w(t)` at the vertex `wθ`; `t` must be `W_Θ`-invariant.
    Char(Poly),
    Add(Box<SectionExpr>, Box<SectionExpr>),
    Mul(Box<SectionExpr>, Box<SectionExpr>),
}

impl SectionExpr {
    /// `ρ(s₁ ⊗ s₂) = s₁ c(s₂)`.
    pub fn borel(s1: Poly, s2: Poly) -> Self {
        SectionExpr::Mul(Box::new(SectionExpr::Const(s1)), Box::new(SectionExpr::Char(s2)))
    }

    /// The twisted action `z · t = (z_x x(t))`.
    pub fn twisted(self, t: Poly) -> Self {
        SectionExpr::Mul(Box::new(self), Box::new(SectionExpr::Char(t)))
    }

    pub fn add(self, o: SectionExpr) -> Self {
        SectionExpr::Add(Box::new(self), Box::new(o))
    }

    pub fn mul(self, o: SectionExpr) -> Self {
        SectionExpr::Mul(Box::new(self), Box::new(o))
    }

    /// The same expression with every polynomial passed through `f`.
    pub fn map_polys(&self, f: &impl Fn(&Poly) -> Result<Poly>) -> Result<SectionExpr> {
        Ok(match self {
            SectionExpr::Const(p) => SectionExpr::Const(f(p)?),
            SectionExpr::Char(p) => SectionExpr::Char(f(p)?),
            SectionExpr::Add(a, b) => SectionExpr::Add(Box::new(a.map_polys(f)?), Box::new(b.map_polys(f)?)),
            SectionExpr::Mul(a, b) => SectionExpr::Mul(Box::new(a.map_polys(f)?), Box::new(b.map_polys(f)?)),
        })
    }

    pub fn nvars(&self) -> usize {
        match self {
            SectionExpr::Const(p) | SectionExpr::Char(p) => p.nvars(),
            SectionExpr::Add(a, _) | SectionExpr::Mul(a, _) => a.nvars(),
        }
    }
}

/// A spanning tree of an orbit along which `w(t)` is propagated: each vertex is
/// reached from its parent by applying a short word of simple reflections.
pub struct EvalTree<'a> {
    steps: Vec<Option<(usize, &'a [usize])>>,
    cartan: &'a [Vec<QScalar>],
    names: &'a [String],
    stabilizer: Vec<usize>,
}

impl<'a> EvalTree<'a> {
    /// The BFS tree of the graph itself.
    pub fn of_graph(g: &'a MomentGraph) -> Self {
        static GENS: [usize; 16] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];
        let steps = (0..g.num_vertices()).map(|v| g.parent(v).map(|(p, s)| (p, &GENS[s..=s]))).collect();
        let stabilizer = zero_set(&g.vertices()[0].coords);
        EvalTree { steps, cartan: g.system().cartan(), names: g.system().names(), stabilizer }
    }

    /// The folded BFS tree with each step replaced by its lift, so that the
    /// value at `y` is the source value at `ι(y)`.
    pub fn of_iota(ctx: &'a FoldingContext, tau: &'a TauGraph) -> Self {
        let g = &tau.graph;
        let steps =
            (0..g.num_vertices()).map(|v| g.parent(v).map(|(p, s)| (p, ctx.lifts()[s].as_slice()))).collect();
        let src = ctx.source();
        EvalTree { steps, cartan: src.cartan(), names: src.names(), stabilizer: zero_set(&tau.iota_coords[0]) }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.cartan.len()
    }

    pub fn stabilizer(&self) -> &[usize] {
        &self.stabilizer
    }

    /// Checks `s_i(t) = t` for the generators of the stabilizer.
    pub fn check_invariant(&self, t: &Poly) -> Result<()> {
        if t.nvars() != self.nvars() {
            return Err(FoldError::Dimension { expected: self.nvars(), found: t.nvars() });
        }
        for &i in &self.stabilizer {
            if simple_reflection_poly(t, self.cartan, i) != *t {
                return Err(FoldError::Invariant(format!(
                    "{t} is not invariant under the reflection in {}",
                    self.names[i]
                )));
            }
        }
        Ok(())
    }

    fn propagate(&self, t: &Poly) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::with_capacity(self.len());
        for step in &self.steps {
            let v = match step {
                None => t.clone(),
                Some((p, word)) => {
                    let mut f = out[*p].clone();
                    for &s in word.iter() {
                        f = simple_reflection_poly(&f, self.cartan, s);
                    }
                    f
                }
            };
            out.push(v);
        }
        out
    }
}

fn zero_set(coords: &[QScalar]) -> Vec<usize> {
    coords.iter().enumerate().filter(|(_, c)| c.is_zero()).map(|(i, _)| i).collect()
}

/// Evaluates [`SectionExpr`]s on a tree, caching characteristic classes.
pub struct Evaluator<'a> {
    tree: EvalTree<'a>,
    cache: HashMap<Poly, Vec<Poly>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(tree: EvalTree<'a>) -> Self {
        Evaluator { tree, cache: HashMap::new() }
    }

    pub fn tree(&self) -> &EvalTree<'a> {
        &self.tree
    }

    pub fn char_values(&mut self, t: &Poly) -> Result<Vec<Poly>> {
        if let Some(v) = self.cache.get(t) {
            return Ok(v.clone());
        }
        self.tree.check_invariant(t)?;
        let v = self.tree.propagate(t);
        self.cache.insert(t.clone(), v.clone());
        Ok(v)
    }

    pub fn eval(&mut self, e: &SectionExpr) -> Result<Vec<Poly>> {
        let n = self.tree.len();
        Ok(match e {
            SectionExpr::Const(p) => {
                if p.nvars() != self.tree.nvars() {
                    return Err(FoldError::Dimension { expected: self.tree.nvars(), found: p.nvars() });
                }
                vec![p.clone(); n]
            }
            SectionExpr::Char(t) => self.char_values(t)?,
            SectionExpr::Add(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                x.iter().zip(&y).map(|(p, q)| p.add(q)).collect()
            }
            SectionExpr::Mul(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                x.iter().zip(&y).map(|(p, q)| p.mul(q)).collect()
            }
        })
    }
}

/// Evaluates an expression on a graph.
pub fn evaluate(graph: &MomentGraph, e: &SectionExpr) -> Result<Section> {
    let values = Evaluator::new(EvalTree::of_graph(graph)).eval(e)?;
    Section::new(graph.side(), graph.system().rank(), values)
}

/// The characteristic class `c(t) = (w(t))_{wθ}`.
pub fn char_class(graph: &MomentGraph, t: &Poly) -> Result<Section> {
    evaluate(graph, &SectionExpr::Char(t.clone()))
}

/// The Borel map `ρ(s₁ ⊗ s₂) = s₁ c(s₂)`.
pub fn borel_map(graph: &MomentGraph, s1: &Poly, s2: &Poly) -> Result<Section> {
    evaluate(graph, &SectionExpr::borel(s1.clone(), s2.clone()))
}

/// `(z_x) · t = (z_x x(t))`.
pub fn twisted_action(graph: &MomentGraph, z: &Section, t: &Poly) -> Result<Section> {
    z.mul(&char_class(graph, t)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub edge: usize,
    pub src: u32,
    pub dst: u32,
    pub label: String,
    /// `z_src - z_dst` restricted to the hyperplane of the label.
    pub remainder: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionReport {
    pub edges_checked: usize,
    pub violations: Vec<Violation>,
}

impl SectionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The GKM conditions `z_x - z_y ∈ αS` on every edge.
pub fn check_section(graph: &MomentGraph, s: &Section, mode: Mode, alg: Option<Alg>) -> Result<SectionReport> {
    let all: Vec<usize> = (0..graph.edges().len()).collect();
    check_section_edges(graph, s, mode, alg, &all)
}

/// The GKM conditions on the listed edges only.
pub fn check_section_edges(
    graph: &MomentGraph,
    s: &Section,
    mode: Mode,
    alg: Option<Alg>,
    edges: &[usize],
) -> Result<SectionReport> {
    if s.len() != graph.num_vertices() || s.side() != graph.side() {
        return Err(FoldError::Config(format!(
            "section has {} {:?} values but the graph has {} {:?} vertices",
            s.len(),
            s.side(),
            graph.num_vertices(),
            graph.side()
        )));
    }
    let r = graph.system().rank();
    if s.nvars() != r {
        return Err(FoldError::Dimension { expected: r, found: s.nvars() });
    }
    let labels: Vec<Poly> = graph.system().positive_roots().iter().map(|b| Poly::linear(b)).collect();
    let dense = if mode == Mode::Field { Some(DenseRestriction::new(s, &labels)?) } else { None };
    let results: Vec<Result<Option<Violation>>> = edges
        .par_iter()
        .map(|&k| {
            let e = graph.edges()[k];
            let l = &labels[e.label as usize];
            let ok = match &dense {
                Some(d) => d.divisible(e.src as usize, e.dst as usize, e.label as usize),
                None => {
                    let diff = s.value(e.src as usize).sub(s.value(e.dst as usize));
                    diff.divide_by_linear(l, mode, alg)?.is_some()
                }
            };
            if ok {
                return Ok(None);
            }
            let diff = s.value(e.src as usize).sub(s.value(e.dst as usize));
            let (_, rem) = diff.div_rem_linear(l)?;
            let remainder = if rem.is_zero() { "quotient not integral".to_string() } else { rem.to_string() };
            Ok(Some(Violation { edge: k, src: e.src, dst: e.dst, label: graph.root_name(e.label as usize), remainder }))
        })
        .collect();
    let mut violations = Vec::new();
    for r in results {
        if let Some(v) = r? {
            violations.push(v);
        }
    }
    Ok(SectionReport { edges_checked: edges.len(), violations })
}

/// Section values as dense coordinate vectors together with, for every label,
/// the sparse matrix of restriction to the label's hyperplane. Restriction is
/// linear, so `z_x - z_y ∈ αS` iff the rows annihilate the coordinate difference.
struct DenseRestriction {
    coords: Vec<Vec<QScalar>>,
    rows: Vec<Vec<Vec<(usize, QScalar)>>>,
}

impl DenseRestriction {
    fn new(s: &Section, labels: &[Poly]) -> Result<Self> {
        let n = s.nvars();
        let degrees: BTreeSet<u32> = s.values().iter().flat_map(|p| p.terms().map(|(m, _)| m.degree())).collect();
        let basis: Vec<Mono> = degrees.iter().flat_map(|&d| monomials(n, d)).collect();
        let index: HashMap<&Mono, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let coords = s
            .values()
            .iter()
            .map(|p| {
                let mut v = vec![QScalar::zero(); basis.len()];
                for (m, c) in p.terms() {
                    v[index[m]] = c.clone();
                }
                v
            })
            .collect();
        let mut rows = Vec::with_capacity(labels.len());
        for l in labels {
            let mut by_row: BTreeMap<usize, Vec<(usize, QScalar)>> = BTreeMap::new();
            for (j, m) in basis.iter().enumerate() {
                let p = Poly::from_coords(n, std::slice::from_ref(m), &[QScalar::one()]);
                let (_, rem) = p.div_rem_linear(l)?;
                for (rm, c) in rem.terms() {
                    by_row.entry(index[rm]).or_default().push((j, c.clone()));
                }
            }
            rows.push(by_row.into_values().collect());
        }
        Ok(DenseRestriction { coords, rows })
    }

    fn divisible(&self, x: usize, y: usize, label: usize) -> bool {
        let (a, b) = (&self.coords[x], &self.coords[y]);
        self.rows[label].iter().all(|row| {
            let mut acc = QScalar::zero();
            for (j, c) in row {
                if a[*j] != b[*j] {
                    acc += &(c * &(&a[*j] - &b[*j]));
                }
            }
            acc.is_zero()
        })
    }
}

/// `ι*` without verification: `y ↦ π_τ(z_{ι(y)})`.
pub fn iota_star_unchecked(ctx: &FoldingContext, tau: &TauGraph, z: &Section) -> Result<Section> {
    let ids = tau
        .iota_ids
        .as_ref()
        .ok_or_else(|| FoldError::Config("ι was built without the source graph".into()))?;
    if z.side() != Side::Source {
        return Err(FoldError::Config("ι* takes a section of the source graph".into()));
    }
    let alg = ctx.datum().space().alg();
    let values = ids
        .iter()
        .map(|&i| pi_tau_hom(z.value(i as usize), ctx.fold_matrix(), alg))
        .collect::<Result<Vec<_>>>()?;
    Section::new(Side::Target, ctx.target().rank(), values)
}

/// `ι*(z)`, rejecting invalid input (unless `validate_input` is off) and
/// verifying the GKM conditions of the output on every folded edge.
pub fn iota_star(
    ctx: &FoldingContext,
    tau: &TauGraph,
    source: &MomentGraph,
    z: &Section,
    mode: Mode,
    validate_input: bool,
) -> Result<Section> {
    let alg = ctx.datum().space().alg();
    if validate_input {
        let rep = check_section(source, z, mode, Some(alg))?;
        if let Some(v) = rep.violations.first() {
            return Err(FoldError::Validation(format!(
                "input is not a section: edge {} ({} -> {}, label {}) leaves remainder {}",
                v.edge, v.src, v.dst, v.label, v.remainder
            )));
        }
    }
    let out = iota_star_unchecked(ctx, tau, z)?;
    verify_image(tau, &out, mode, alg)?;
    Ok(out)
}

/// `ι*` of an expression, evaluated at `ι(y)` through lifted words; no source
/// graph is needed.
pub fn iota_star_expr(ctx: &FoldingContext, tau: &TauGraph, e: &SectionExpr, mode: Mode) -> Result<Section> {
    let out = iota_star_expr_unchecked(ctx, tau, e)?;
    verify_image(tau, &out, mode, ctx.datum().space().alg())?;
    Ok(out)
}

pub fn iota_star_expr_unchecked(ctx: &FoldingContext, tau: &TauGraph, e: &SectionExpr) -> Result<Section> {
    let mut ev = Evaluator::new(EvalTree::of_iota(ctx, tau));
    iota_star_with(ctx, &mut ev, e)
}

/// As [`iota_star_expr_unchecked`] with a reusable evaluator on the `ι`-tree.
pub fn iota_star_with(ctx: &FoldingContext, ev: &mut Evaluator<'_>, e: &SectionExpr) -> Result<Section> {
    let alg = ctx.datum().space().alg();
    let values = ev
        .eval(e)?
        .iter()
        .map(|p| pi_tau_hom(p, ctx.fold_matrix(), alg))
        .collect::<Result<Vec<_>>>()?;
    Section::new(Side::Target, ctx.target().rank(), values)
}

fn verify_image(tau: &TauGraph, out: &Section, mode: Mode, alg: Alg) -> Result<()> {
    let rep = check_section(&tau.graph, out, mode, Some(alg))?;
    match rep.violations.first() {
        None => Ok(()),
        Some(v) => Err(FoldError::Invariant(format!(
            "ι* image violates {} of {} folded edge conditions; first: edge {} label {} remainder {}",
            rep.violations.len(),
            rep.edges_checked,
            v.edge,
            v.label,
            v.remainder
        ))),
    }
}
