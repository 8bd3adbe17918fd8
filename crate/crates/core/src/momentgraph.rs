//! Moment graphs of parabolic orbits `Wθ` and `W_τμ`, the Bruhat order, and
//! the vertex injection `ι`.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FoldError, Result};
use crate::folding::FoldingContext;
use crate::rootsys::{RootDatum, RootSystem};
use crate::scalars::QScalar;
use crate::weilmod::{LVector, UVector};

pub const DEFAULT_VERTEX_BOUND: usize = 250_000;
const BITSET_LIMIT: usize = 12_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

/// The parabolic data: `Θ`, the dominant vector `θ` and its folding `μ`.
#[derive(Debug, Clone)]
pub struct ThetaConfig {
    theta: Vec<usize>,
    theta_weights: Vec<QScalar>,
    theta_coords: Vec<QScalar>,
    theta_vec: UVector,
    folded: Option<FoldedTheta>,
}

#[derive(Debug, Clone)]
struct FoldedTheta {
    theta: Vec<usize>,
    mu_coords: Vec<QScalar>,
    mu_weights: Vec<QScalar>,
    mu: LVector,
}

/// `θ = Σ_{α ∉ Θ} ϖ_α` on the source side only.
pub fn choose_theta(datum: &RootDatum, theta: &[usize]) -> Result<ThetaConfig> {
    let sys = datum.system();
    let r = sys.rank();
    let mut theta: Vec<usize> = theta.to_vec();
    theta.sort_unstable();
    theta.dedup();
    if let Some(&bad) = theta.iter().find(|&&i| i >= r) {
        return Err(FoldError::Config(format!("Θ index {bad} out of range for rank {r}")));
    }
    let theta_weights: Vec<QScalar> =
        (0..r).map(|i| if theta.contains(&i) { QScalar::zero() } else { QScalar::one() }).collect();
    let theta_coords = sys.coords_of_weights(&theta_weights)?;
    let theta_vec = datum.root_vector(&theta_coords);
    for (j, a) in datum.simple_roots().iter().enumerate() {
        let b = datum.space().b_tau(&theta_vec, a);
        let ok = if theta.contains(&j) { b.is_zero() } else { b.signum() > 0 };
        if !ok {
            return Err(FoldError::Invariant(format!(
                "θ fails dominance at {}: B_τ(θ, α) = {b}",
                datum.names()[j]
            )));
        }
    }
    Ok(ThetaConfig { theta, theta_weights, theta_coords, theta_vec, folded: None })
}

/// `θ` together with `μ = π_τ(θ)`, after checking that 𝒯 preserves the span of `Θ`.
pub fn choose_theta_folded(ctx: &FoldingContext, theta: &[usize]) -> Result<ThetaConfig> {
    let datum = ctx.datum();
    let mut cfg = choose_theta(datum, theta)?;
    check_theta_preserved(datum, &cfg.theta)?;
    let mu_coords = ctx.fold_coords(&cfg.theta_coords);
    let target = ctx.target();
    let mu_weights = target.weights_of_root(&mu_coords);
    let folded_theta: Vec<usize> =
        (0..target.rank()).filter(|&i| cfg.theta.contains(&ctx.sources()[i])).collect();
    for (i, w) in mu_weights.iter().enumerate() {
        let ok = if folded_theta.contains(&i) { w.is_zero() } else { w.sign() > 0 };
        if !ok {
            return Err(FoldError::Invariant(format!(
                "μ is not dominant with stabilizer (W_Θ)_τ at {}: weight {w}",
                target.names()[i]
            )));
        }
    }
    let mu = ctx.folded_vector(&mu_coords);
    if mu != datum.space().fold_vector(&cfg.theta_vec) {
        return Err(FoldError::Invariant("folded coordinates of μ disagree with π_τ(θ)".into()));
    }
    cfg.folded = Some(FoldedTheta { theta: folded_theta, mu_coords, mu_weights, mu });
    Ok(cfg)
}

/// Every `𝒯α` with `α ∈ Θ` must lie in the span of `Θ`.
pub fn check_theta_preserved(datum: &RootDatum, theta: &[usize]) -> Result<()> {
    let t = datum
        .tau_matrix()
        .ok_or_else(|| FoldError::Validation("𝒯 does not preserve the root lattice".into()))?;
    for &j in theta {
        for i in 0..datum.rank() {
            if !t[(i, j)].is_zero() && !theta.contains(&i) {
                return Err(FoldError::Validation(format!(
                    "Θ is not 𝒯-preserved: 𝒯({}) involves {} which is not in Θ",
                    datum.names()[j],
                    datum.names()[i]
                )));
            }
        }
    }
    Ok(())
}

impl ThetaConfig {
    pub fn theta(&self) -> &[usize] {
        &self.theta
    }

    pub fn theta_weights(&self) -> &[QScalar] {
        &self.theta_weights
    }

    pub fn theta_coords(&self) -> &[QScalar] {
        &self.theta_coords
    }

    pub fn theta_vec(&self) -> &UVector {
        &self.theta_vec
    }

    pub fn folded_theta(&self) -> Option<&[usize]> {
        self.folded.as_ref().map(|f| f.theta.as_slice())
    }

    pub fn mu_coords(&self) -> Option<&[QScalar]> {
        self.folded.as_ref().map(|f| f.mu_coords.as_slice())
    }

    pub fn mu_weights(&self) -> Option<&[QScalar]> {
        self.folded.as_ref().map(|f| f.mu_weights.as_slice())
    }

    pub fn mu(&self) -> Option<&LVector> {
        self.folded.as_ref().map(|f| &f.mu)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    /// Weight coordinates `(α_i^∨(x))_i`.
    pub coords: Vec<QScalar>,
    /// Simple reflections applied to the base point, first one first.
    pub word: Vec<u8>,
    pub rank: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    /// Index into the positive roots of the graph's root system.
    pub label: u32,
}

/// Incidence counts collected while building the edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EdgeAudit {
    pub incidences: u64,
    pub fixed: u64,
    pub outgoing: u64,
    pub incoming: u64,
}

/// A moment graph on an orbit, with edges labeled by positive roots.
#[derive(Debug)]
pub struct MomentGraph {
    side: Side,
    system: RootSystem,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    parent: Vec<Option<(u32, u8)>>,
    transitions: Vec<u32>,
    index: HashMap<Vec<QScalar>, u32>,
    audit: EdgeAudit,
    reach: OnceLock<Vec<Vec<u64>>>,
}

impl Clone for MomentGraph {
    fn clone(&self) -> Self {
        MomentGraph {
            side: self.side,
            system: self.system.clone(),
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            parent: self.parent.clone(),
            transitions: self.transitions.clone(),
            index: self.index.clone(),
            audit: self.audit,
            reach: OnceLock::new(),
        }
    }
}

/// The folded graph with `ι` on its vertices.
#[derive(Debug, Clone)]
pub struct TauGraph {
    pub graph: MomentGraph,
    /// `ι(y)` in source weight coordinates.
    pub iota_coords: Vec<Vec<QScalar>>,
    /// Source words realizing `ι(y)`: the concatenated lifts of `y`'s word.
    pub iota_words: Vec<Vec<u8>>,
    /// `ι(y)` as a source vertex id, when the source graph was supplied.
    pub iota_ids: Option<Vec<u32>>,
}

pub fn build_graph(datum: &RootDatum, config: &ThetaConfig, bound: usize) -> Result<MomentGraph> {
    MomentGraph::build(Side::Source, datum.system().clone(), config.theta_weights.clone(), bound)
}

/// `W_τμ` and `ι`. If `source` is given, `ι` is also resolved to its vertex ids.
pub fn build_tau_graph(
    ctx: &FoldingContext,
    config: &ThetaConfig,
    source: Option<&MomentGraph>,
    bound: usize,
) -> Result<TauGraph> {
    let mu = config
        .mu_weights()
        .ok_or_else(|| FoldError::Config("Θ configuration carries no folded data".into()))?;
    let graph = MomentGraph::build(Side::Target, ctx.target().clone(), mu.to_vec(), bound)?;
    let src = ctx.source();
    let lift = |x: &[QScalar], g: usize| -> Vec<QScalar> {
        let mut v = x.to_vec();
        for &s in &ctx.lifts()[g] {
            v = src.simple_reflect_weights(&v, s);
        }
        v
    };
    let n = graph.num_vertices();
    let mut iota_coords: Vec<Vec<QScalar>> = vec![Vec::new(); n];
    let mut iota_words: Vec<Vec<u8>> = vec![Vec::new(); n];
    iota_coords[0] = config.theta_weights.clone();
    for y in 1..n {
        let (p, g) = graph.parent[y].expect("non-root vertices have parents");
        iota_coords[y] = lift(&iota_coords[p as usize], g as usize);
        let mut w = iota_words[p as usize].clone();
        w.extend(ctx.lifts()[g as usize].iter().map(|&s| s as u8));
        iota_words[y] = w;
    }
    let m = graph.system.rank();
    let bad = (0..n).into_par_iter().find_map_any(|y| {
        (0..m).find_map(|g| {
            let y2 = graph.transitions[y * m + g] as usize;
            (lift(&iota_coords[y], g) != iota_coords[y2]).then_some((y, g))
        })
    });
    if let Some((y, g)) = bad {
        return Err(FoldError::Invariant(format!(
            "ι is not well defined: lifting generator {} at folded vertex {y} disagrees with the orbit",
            graph.system.names()[g]
        )));
    }
    let distinct: HashSet<&Vec<QScalar>> = iota_coords.iter().collect();
    if distinct.len() != n {
        return Err(FoldError::Invariant("ι is not injective".into()));
    }
    let iota_ids = match source {
        Some(s) => Some(
            iota_coords
                .iter()
                .map(|c| {
                    s.vertex_id(c)
                        .ok_or_else(|| FoldError::Invariant("ι(y) is not a vertex of the source graph".into()))
                })
                .collect::<Result<Vec<u32>>>()?,
        ),
        None => None,
    };
    Ok(TauGraph { graph, iota_coords, iota_words, iota_ids })
}

impl MomentGraph {
    pub fn build(side: Side, system: RootSystem, base: Vec<QScalar>, bound: usize) -> Result<Self> {
        let r = system.rank();
        if base.len() != r {
            return Err(FoldError::Dimension { expected: r, found: base.len() });
        }
        let mut index: HashMap<Vec<QScalar>, u32> = HashMap::new();
        let mut vertices = vec![Vertex { coords: base.clone(), word: Vec::new(), rank: 0 }];
        let mut parent = vec![None];
        index.insert(base, 0);
        let mut frontier: Vec<u32> = vec![0];
        while !frontier.is_empty() {
            let images: Vec<Vec<Vec<QScalar>>> = frontier
                .par_iter()
                .map(|&v| (0..r).map(|g| system.simple_reflect_weights(&vertices[v as usize].coords, g)).collect())
                .collect();
            let mut next = Vec::new();
            for (&v, imgs) in frontier.iter().zip(images) {
                for (g, img) in imgs.into_iter().enumerate() {
                    if index.contains_key(&img) {
                        continue;
                    }
                    let id = vertices.len() as u32;
                    if vertices.len() >= bound {
                        return Err(FoldError::Resource(format!(
                            "orbit exceeds {bound} vertices; choose a larger Θ or raise the bound"
                        )));
                    }
                    let mut word = vertices[v as usize].word.clone();
                    word.push(g as u8);
                    index.insert(img.clone(), id);
                    vertices.push(Vertex { coords: img, word, rank: 0 });
                    parent.push(Some((v, g as u8)));
                    next.push(id);
                }
            }
            frontier = next;
        }
        let transitions: Vec<u32> = vertices
            .par_iter()
            .flat_map_iter(|x| {
                (0..r).map(|g| index[&system.simple_reflect_weights(&x.coords, g)]).collect::<Vec<_>>()
            })
            .collect();
        let npos = system.num_positive();
        let per_vertex: Vec<(u32, EdgeAudit, Vec<Edge>)> = vertices
            .par_iter()
            .enumerate()
            .map(|(v, x)| {
                let mut audit = EdgeAudit::default();
                let mut rank = 0u32;
                let mut out = Vec::new();
                for b in 0..npos {
                    audit.incidences += 1;
                    let p = system.pairing(&x.coords, b);
                    match p.sign() {
                        0 => audit.fixed += 1,
                        s if s > 0 => {
                            audit.outgoing += 1;
                            let y = system.reflect_weights(&x.coords, b, &p);
                            out.push(Edge { src: v as u32, dst: index[&y], label: b as u32 });
                        }
                        _ => {
                            audit.incoming += 1;
                            rank += 1;
                        }
                    }
                }
                (rank, audit, out)
            })
            .collect();
        let mut audit = EdgeAudit::default();
        let mut edges = Vec::new();
        for (v, (rank, a, out)) in per_vertex.into_iter().enumerate() {
            vertices[v].rank = rank;
            audit.incidences += a.incidences;
            audit.fixed += a.fixed;
            audit.outgoing += a.outgoing;
            audit.incoming += a.incoming;
            edges.extend(out);
        }
        Ok(MomentGraph { side, system, vertices, edges, parent, transitions, index, audit, reach: OnceLock::new() })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn system(&self) -> &RootSystem {
        &self.system
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn audit(&self) -> EdgeAudit {
        self.audit
    }

    /// BFS-tree parent of each vertex and the generator leading to it.
    pub fn parent(&self, v: usize) -> Option<(usize, usize)> {
        self.parent[v].map(|(p, g)| (p as usize, g as usize))
    }

    /// The vertex `s_g x`.
    pub fn transition(&self, v: usize, g: usize) -> usize {
        self.transitions[v * self.system.rank() + g] as usize
    }

    pub fn vertex_id(&self, coords: &[QScalar]) -> Option<u32> {
        self.index.get(coords).copied()
    }

    pub fn label_coords(&self, e: &Edge) -> &[QScalar] {
        &self.system.positive_roots()[e.label as usize]
    }

    /// Human-readable name of a positive root, e.g. `a1+2a2` or `(1+τ)b1+b2`.
    pub fn root_name(&self, idx: usize) -> String {
        format_root(&self.system.positive_roots()[idx], self.system.names())
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertices.len() {
            Err(FoldError::Lookup(format!("vertex {v} not in a graph with {} vertices", self.vertices.len())))
        } else {
            Ok(())
        }
    }

    /// `x ≤ y` in the order generated by the edges.
    pub fn bruhat_leq(&self, x: usize, y: usize) -> Result<bool> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if x == y {
            return Ok(true);
        }
        if self.vertices[x].rank >= self.vertices[y].rank {
            return Ok(false);
        }
        if self.vertices.len() <= BITSET_LIMIT {
            let reach = self.reach.get_or_init(|| self.reachability());
            return Ok(reach[x][y / 64] >> (y % 64) & 1 == 1);
        }
        let adj = self.adjacency();
        let target_rank = self.vertices[y].rank;
        let mut seen = HashSet::from([x]);
        let mut stack = vec![x];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if w == y {
                    return Ok(true);
                }
                if self.vertices[w].rank < target_rank && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        Ok(false)
    }

    /// Outgoing neighbours of each vertex.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.src as usize].push(e.dst as usize);
        }
        adj
    }

    fn reachability(&self) -> Vec<Vec<u64>> {
        let n = self.vertices.len();
        let words = n.div_ceil(64);
        let adj = self.adjacency();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.vertices[v].rank));
        let mut reach = vec![vec![0u64; words]; n];
        for v in order {
            let mut bits = vec![0u64; words];
            bits[v / 64] |= 1 << (v % 64);
            for &w in &adj[v] {
                for (b, r) in bits.iter_mut().zip(&reach[w]) {
                    *b |= r;
                }
            }
            reach[v] = bits;
        }
        reach
    }

    /// Structural self-checks: ranks increase along edges, the incidence
    /// counts balance, and every moved pair is joined by exactly one edge per root.
    pub fn check_structure(&self) -> Result<()> {
        let a = self.audit;
        let expected = self.vertices.len() as u64 * self.system.num_positive() as u64;
        if a.incidences != expected || a.fixed + a.outgoing + a.incoming != expected {
            return Err(FoldError::Invariant(format!("edge audit unbalanced: {a:?}, expected {expected}")));
        }
        if a.outgoing != a.incoming || a.outgoing != self.edges.len() as u64 {
            return Err(FoldError::Invariant(format!("edge audit: {a:?} with {} edges", self.edges.len())));
        }
        for e in &self.edges {
            if self.vertices[e.src as usize].rank >= self.vertices[e.dst as usize].rank {
                return Err(FoldError::Invariant(format!("rank does not increase along edge {e:?}")));
            }
        }
        let distinct: HashSet<&Edge> = self.edges.iter().collect();
        if distinct.len() != self.edges.len() {
            return Err(FoldError::Invariant("duplicate labeled edge".into()));
        }
        Ok(())
    }
}

impl TauGraph {
    /// Folded edges `y → y'` such that no source edge joins `ι(y)` and `ι(y')`
    /// with a label folding onto a multiple of the folded label.
    pub fn edge_defects(&self, ctx: &FoldingContext, source: &MomentGraph) -> Result<Vec<usize>> {
        let ids = self
            .iota_ids
            .as_ref()
            .ok_or_else(|| FoldError::Config("ι was built without the source graph".into()))?;
        let mut by_pair: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for e in source.edges() {
            by_pair.entry((e.src, e.dst)).or_default().push(e.label);
        }
        let mut defects = Vec::new();
        for (k, e) in self.graph.edges().iter().enumerate() {
            let (a, b) = (ids[e.src as usize], ids[e.dst as usize]);
            let beta = self.graph.label_coords(e);
            let labels = by_pair.get(&(a, b)).into_iter().chain(by_pair.get(&(b, a))).flatten();
            let matched = labels.into_iter().any(|&l| {
                let folded = ctx.fold_coords(&source.system().positive_roots()[l as usize]);
                proportional(&folded, beta)
            });
            if !matched {
                defects.push(k);
            }
        }
        Ok(defects)
    }
}

fn proportional(a: &[QScalar], b: &[QScalar]) -> bool {
    let Some(k) = b.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    let Ok(c) = a[k].try_div(&b[k]) else {
        return false;
    };
    !c.is_zero() && a.iter().zip(b).all(|(x, y)| *x == &c * y)
}

pub fn format_root(coords: &[QScalar], names: &[String]) -> String {
    let mut out = String::new();
    for (c, n) in coords.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let (neg, mag) = if c.sign() < 0 { (true, -c) } else { (false, c.clone()) };
        if neg {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if !mag.is_one() {
            let s = mag.to_string();
            if mag.is_base() {
                out.push_str(&s);
            } else {
                out.push('(');
                out.push_str(&s);
                out.push(')');
            }
        }
        out.push_str(n);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{catalog_build, Family};

    fn source(f: Family, theta: &[usize]) -> MomentGraph {
        let d = catalog_build(f).unwrap();
        let cfg = choose_theta(&d, theta).unwrap();
        build_graph(&d, &cfg, DEFAULT_VERTEX_BOUND).unwrap()
    }

    #[test]
    fn rank_one() {
        let g = source(Family::A(1), &[]);
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.edges(), &[Edge { src: 0, dst: 1, label: 0 }]);
        g.check_structure().unwrap();
    }

    #[test]
    fn a2_poset() {
        let g = source(Family::A(2), &[]);
        assert_eq!(g.num_vertices(), 6);
        assert_eq!(g.edges().len(), 9);
        g.check_structure().unwrap();
        let d = catalog_build(Family::A(2)).unwrap();
        let th = choose_theta(&d, &[]).unwrap();
        let at = |word: &[usize]| {
            let mut x = th.theta_weights().to_vec();
            for &i in word {
                x = g.system().simple_reflect_weights(&x, i);
            }
            g.vertex_id(&x).unwrap() as usize
        };
        // r1 r2 θ: apply r2 first
        assert!(g.bruhat_leq(0, at(&[1, 0])).unwrap());
        assert!(!g.bruhat_leq(at(&[0]), at(&[1])).unwrap());
        for v in 0..6 {
            assert!(g.bruhat_leq(0, v).unwrap());
            assert!(g.bruhat_leq(v, v).unwrap());
        }
        assert!(matches!(g.bruhat_leq(0, 6), Err(FoldError::Lookup(_))));
    }

    #[test]
    fn parabolic_orbit() {
        let g = source(Family::A(2), &[1]);
        assert_eq!(g.num_vertices(), 3);
        g.check_structure().unwrap();
    }

    #[test]
    fn a2c2_folded_graph() {
        let d = catalog_build(Family::A2C(2)).unwrap();
        let ctx = FoldingContext::new(d).unwrap();
        let cfg = choose_theta_folded(&ctx, &[]).unwrap();
        let src = build_graph(ctx.datum(), &cfg, DEFAULT_VERTEX_BOUND).unwrap();
        assert_eq!(src.num_vertices(), 24);
        let tg = build_tau_graph(&ctx, &cfg, Some(&src), DEFAULT_VERTEX_BOUND).unwrap();
        assert_eq!(tg.graph.num_vertices(), 8);
        tg.graph.check_structure().unwrap();
        assert!(!tg.edge_defects(&ctx, &src).unwrap().is_empty());
    }

    #[test]
    fn theta_preservation() {
        let d = catalog_build(Family::E8H4).unwrap();
        let err = check_theta_preserved(&d, &[1]).unwrap_err().to_string();
        assert!(err.contains("a2") && err.contains("a6"), "{err}");
        check_theta_preserved(&d, &[1, 5]).unwrap();
    }

    #[test]
    fn root_names() {
        let names = vec!["a1".to_string(), "a2".to_string()];
        assert_eq!(format_root(&[QScalar::one(), QScalar::from_i64(2)], &names), "a1+2a2");
        assert_eq!(format_root(&[QScalar::zero(), QScalar::from_i64(-1)], &names), "-a2");
    }
}
