//! Randomized verification suites with fixed seeds.
//!
//! * `theorem`: `ι*` of a generating sample of sections satisfies every GKM
//!   condition of the folded graph.
//! * `charm`: the Borel squares `ι* ∘ ρ = ρ_τ ∘ (π_τ ⊗ π_τ)`, the ring-map laws
//!   and compatibility with the augmentation ideals.
//! * `props`: the identities of the Weil restriction and the folding.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{FoldError, Result};
use crate::folding::FoldingContext;
use crate::linalg::{rank_of, Matrix};
use crate::momentgraph::{
    build_graph, build_tau_graph, choose_theta_folded, MomentGraph, TauGraph, ThetaConfig, DEFAULT_VERTEX_BOUND,
};
use crate::poly::{monomials, pi_tau_hom, Poly};
use crate::rootsys::{catalog_build, Family};
use crate::scalars::{Mode, QScalar, Rational};
use crate::structalg::{
    check_section, check_section_edges, evaluate, invariants_gen, iota_star, iota_star_expr_unchecked,
    iota_star_unchecked, iota_star_with,
    EvalTree, Evaluator, GradedStructure, Section, SectionExpr,
};
use crate::weilmod::UVector;

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_CASES: usize = 500;
/// Source graphs larger than this are not materialized; `ι*` is then
/// evaluated along lifted words only.
pub const SOURCE_GRAPH_LIMIT: usize = 40_000;
/// Source-side GKM checks look at a deterministic sample of this many edges.
pub const SOURCE_EDGE_SAMPLE: usize = 20_000;
/// Unknown bound for the augmented comparison in the charm suite.
pub const AUGMENTED_UNKNOWN_LIMIT: usize = 1_000;
/// Folded graphs up to this size get the vertex × root sweep on every sample
/// image; larger ones on the first few.
pub const SWEEP_VERTEX_LIMIT: usize = 1_000;
const MAX_DETAILS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorem,
    Charm,
    Props,
}

impl FromStr for Suite {
    type Err = FoldError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "theorem" => Ok(Suite::Theorem),
            "charm" => Ok(Suite::Charm),
            "props" => Ok(Suite::Props),
            other => Err(FoldError::Config(format!("unknown suite '{other}' (theorem, charm, props)"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Theorem => "theorem",
            Suite::Charm => "charm",
            Suite::Props => "props",
        })
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Largest polynomial degree in generated samples.
    pub degree: u32,
    pub seed: u64,
    /// Cases per randomized property.
    pub cases: usize,
    /// How many elements of each product-type category enter the theorem sample.
    pub sample_cap: usize,
    /// Θ choices to test; `None` means `∅` and the family's default.
    pub thetas: Option<Vec<Vec<usize>>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { degree: 2, seed: DEFAULT_SEED, cases: DEFAULT_CASES, sample_cap: 6, thetas: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// The first few failures.
    pub details: Vec<String>,
}

impl CheckOutcome {
    fn new(name: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), cases: 0, failures: 0, details: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => {
                self.cases += 1;
                self.fail(format!("{}: {e}", what()));
            }
        }
    }

    fn fail(&mut self, msg: String) {
        self.failures += 1;
        if self.details.len() < MAX_DETAILS {
            self.details.push(msg);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub family: String,
    pub suite: Suite,
    pub seed: u64,
    pub degree: u32,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn total_cases(&self) -> usize {
        self.checks.iter().map(|c| c.cases).sum()
    }
}

pub fn run_suite(family: Family, suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if !family.is_folded() {
        return Err(FoldError::Config(format!("family {family} carries no folding")));
    }
    let ctx = FoldingContext::new(catalog_build(family)?)?;
    let checks = match suite {
        Suite::Theorem => theorem_suite(&ctx, family, cfg)?,
        Suite::Charm => charm_suite(&ctx, family, cfg)?,
        Suite::Props => props_suite(&ctx, cfg)?,
    };
    Ok(SuiteReport { family: family.to_string(), suite, seed: cfg.seed, degree: cfg.degree, checks })
}

fn thetas_for(ctx: &FoldingContext, family: Family, cfg: &VerifyConfig) -> Vec<Vec<usize>> {
    cfg.thetas.clone().unwrap_or_else(|| {
        let default: Vec<usize> =
            family.default_theta().iter().filter_map(|n| ctx.datum().index_of(n)).collect();
        vec![Vec::new(), default]
    })
}

fn theta_label(ctx: &FoldingContext, theta: &[usize]) -> String {
    if theta.is_empty() {
        "Θ=∅".into()
    } else {
        let names: Vec<&str> = theta.iter().map(|&i| ctx.datum().names()[i].as_str()).collect();
        format!("Θ={{{}}}", names.join(","))
    }
}

/// The orbit graphs for one Θ; the source graph only if it is small enough.
pub struct Orbits {
    pub config: ThetaConfig,
    pub source: Option<MomentGraph>,
    pub tau: TauGraph,
}

pub fn build_orbits(ctx: &FoldingContext, theta: &[usize], source_limit: usize) -> Result<Orbits> {
    let config = choose_theta_folded(ctx, theta)?;
    let source = match build_graph(ctx.datum(), &config, source_limit) {
        Ok(g) => Some(g),
        Err(FoldError::Resource(_)) => None,
        Err(e) => return Err(e),
    };
    let tau = build_tau_graph(ctx, &config, source.as_ref(), DEFAULT_VERTEX_BOUND)?;
    Ok(Orbits { config, source, tau })
}

/// Every condition `z_y - z_{r_β y} ∈ βS` for all vertices `y` and all positive
/// roots `β`, found by reflecting rather than through the edge list. Roots
/// fixing `y` hold trivially. Returns the number of `(vertex, root)` pairs
/// examined and the violating ones.
pub fn condition_sweep(graph: &MomentGraph, s: &Section, mode: Mode) -> Result<(usize, Vec<(usize, usize)>)> {
    let sys = graph.system();
    let alg = s.values().iter().flat_map(|p| p.terms().map(|(_, c)| c.alg())).flatten().next();
    let mut count = 0;
    let mut bad = Vec::new();
    for (y, v) in graph.vertices().iter().enumerate() {
        for (b, beta) in sys.positive_roots().iter().enumerate() {
            count += 1;
            let p = sys.pairing(&v.coords, b);
            if p.is_zero() {
                continue;
            }
            let img = sys.reflect_weights(&v.coords, b, &p);
            let y2 = graph
                .vertex_id(&img)
                .ok_or_else(|| FoldError::Invariant(format!("orbit not closed at vertex {y}")))?;
            let diff = s.value(y).sub(s.value(y2 as usize));
            if diff.divide_by_linear(&Poly::linear(beta), mode, alg)?.is_none() {
                bad.push((y, b));
            }
        }
    }
    Ok((count, bad))
}

/// Constants, all degree-1 characteristic classes, products of pairs and
/// triples, S-multiples and twisted actions, up to `degree`.
pub fn generating_sample(
    ctx: &FoldingContext,
    theta: &[usize],
    degree: u32,
    cap: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(String, SectionExpr)>> {
    let src = ctx.source();
    let n = src.rank();
    let mut out: Vec<(String, SectionExpr)> = Vec::new();
    out.push(("1".into(), SectionExpr::Const(Poly::one(n))));
    let rand_lin = |rng: &mut ChaCha8Rng| loop {
        let p = Poly::random_homogeneous(n, 1, rng, None);
        if !p.is_zero() {
            return p;
        }
    };
    if degree == 0 {
        return Ok(out);
    }
    let s = rand_lin(rng);
    out.push((format!("const {s}"), SectionExpr::Const(s)));
    let inv1 = invariants_gen(src, theta, 1, Mode::Field, None)?;
    for t in &inv1 {
        out.push((format!("c({t})"), SectionExpr::Char(t.clone())));
    }
    if degree >= 2 {
        let mut inv2 = invariants_gen(src, theta, 2, Mode::Field, None)?;
        inv2.shuffle(rng);
        for t in inv2.into_iter().take(cap) {
            out.push((format!("c({t})"), SectionExpr::Char(t)));
        }
    }
    if inv1.is_empty() {
        return Ok(out);
    }
    let pick = |rng: &mut ChaCha8Rng| inv1[rng.gen_range(0..inv1.len())].clone();
    if degree >= 2 {
        let mut pairs: Vec<(usize, usize)> =
            (0..inv1.len()).flat_map(|i| (i..inv1.len()).map(move |j| (i, j))).collect();
        pairs.shuffle(rng);
        for (i, j) in pairs.into_iter().take(cap) {
            let (a, b) = (&inv1[i], &inv1[j]);
            out.push((
                format!("c({a})·c({b})"),
                SectionExpr::Char(a.clone()).mul(SectionExpr::Char(b.clone())),
            ));
        }
        for _ in 0..cap {
            let (s, t) = (rand_lin(rng), pick(rng));
            out.push((format!("{s} ⊗ {t}"), SectionExpr::borel(s, t)));
        }
        for _ in 0..cap.div_ceil(2) {
            let (t1, t2, s) = (pick(rng), pick(rng), rand_lin(rng));
            let z = SectionExpr::Char(t1.clone()).add(SectionExpr::Const(s.clone()));
            out.push((format!("(c({t1}) + {s})·{t2}"), z.twisted(t2)));
        }
    }
    if degree >= 3 {
        for _ in 0..cap {
            let (a, b, c) = (pick(rng), pick(rng), pick(rng));
            out.push((
                format!("c({a})·c({b})·c({c})"),
                SectionExpr::Char(a).mul(SectionExpr::Char(b)).mul(SectionExpr::Char(c)),
            ));
        }
        for _ in 0..cap.div_ceil(2) {
            let (s, t1, t2) = (rand_lin(rng), pick(rng), pick(rng));
            out.push((format!("({s} ⊗ {t1})·{t2}"), SectionExpr::borel(s, t1).twisted(t2)));
        }
    }
    Ok(out)
}

/// Rank of the span of `ι*ρ(S_i ⊗ S^{W_Θ}_{d-i})`, `i = 0..=d`, in degree `d`,
/// next to `dim 𝒵(𝒢_τ)_d`; equal numbers witness surjectivity in degree `d`.
pub fn surjectivity_witness(ctx: &FoldingContext, tau: &TauGraph, theta: &[usize], d: u32) -> Result<(usize, usize)> {
    let mut gs = GradedStructure::new(&tau.graph, crate::structalg::DEFAULT_UNKNOWN_BOUND);
    let target_dim = gs.basis(d)?.len();
    let n = ctx.source().rank();
    let mut rows = Vec::new();
    for i in 0..=d {
        let invs = invariants_gen(ctx.source(), theta, d - i, Mode::Field, None)?;
        for m in monomials(n, i) {
            let s1 = Poly::from_coords(n, std::slice::from_ref(&m), &[QScalar::one()]);
            for t in &invs {
                let img = iota_star_expr_unchecked(ctx, tau, &SectionExpr::borel(s1.clone(), t.clone()))?;
                rows.push(gs.coords_of(&img, d));
            }
        }
    }
    let width = tau.graph.num_vertices() * gs.monomials(d).len();
    Ok((rank_of(&rows, width), target_dim))
}

fn sample_edges(g: &MomentGraph, limit: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let m = g.edges().len();
    if m <= limit {
        return (0..m).collect();
    }
    let mut idx = rand::seq::index::sample(rng, m, limit).into_vec();
    idx.sort_unstable();
    idx
}

fn theorem_suite(ctx: &FoldingContext, family: Family, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let mut checks = Vec::new();
    let alg = ctx.datum().space().alg();
    for theta in thetas_for(ctx, family, cfg) {
        let label = theta_label(ctx, &theta);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let orbits = build_orbits(ctx, &theta, SOURCE_GRAPH_LIMIT)?;
        let tau = &orbits.tau;
        let sample = generating_sample(ctx, &theta, cfg.degree, cfg.sample_cap, &mut rng)?;

        let mut image = CheckOutcome::new(format!("{label}: ι* of the generating sample satisfies the folded GKM conditions"));
        let mut sweep = CheckOutcome::new(format!("{label}: vertex × positive-root condition sweep on ι*-images"));
        let mut lazy = Evaluator::new(EvalTree::of_iota(ctx, tau));
        let mut images = Vec::with_capacity(sample.len());
        for (name, e) in &sample {
            match iota_star_with(ctx, &mut lazy, e) {
                Ok(img) => {
                    let rep = check_section(&tau.graph, &img, Mode::Field, Some(alg));
                    image.record_result(rep.map(|r| r.is_valid()), || format!("ι*({name})"));
                    images.push(Some(img));
                }
                Err(err) => {
                    image.record(false, || format!("ι*({name}): {err}"));
                    images.push(None);
                }
            }
        }
        let swept = if tau.graph.num_vertices() <= SWEEP_VERTEX_LIMIT { sample.len() } else { 3 };
        for ((name, _), img) in sample.iter().zip(&images).take(swept) {
            if let Some(img) = img {
                let r = condition_sweep(&tau.graph, img, Mode::Field).map(|(_, bad)| bad.is_empty());
                sweep.record_result(r, || format!("sweep of ι*({name})"));
            }
        }
        checks.push(image);
        checks.push(sweep);

        if let Some(src) = &orbits.source {
            let mut valid = CheckOutcome::new(format!(
                "{label}: sample sections satisfy the source GKM conditions (≤ {SOURCE_EDGE_SAMPLE} edges each)"
            ));
            let mut agree =
                CheckOutcome::new(format!("{label}: materialized and lifted-word evaluations of ι* agree"));
            let edges = sample_edges(src, SOURCE_EDGE_SAMPLE, &mut rng);
            let mut ev = Evaluator::new(EvalTree::of_graph(src));
            for ((name, e), img) in sample.iter().zip(&images) {
                let z = match ev.eval(e).and_then(|v| Section::new(src.side(), src.system().rank(), v)) {
                    Ok(z) => z,
                    Err(err) => {
                        valid.record(false, || format!("{name}: {err}"));
                        continue;
                    }
                };
                let rep = check_section_edges(src, &z, Mode::Field, Some(alg), &edges);
                valid.record_result(rep.map(|r| r.is_valid()), || name.clone());
                let m = iota_star_unchecked(ctx, tau, &z);
                agree.record_result(m.map(|m| Some(&m) == img.as_ref()), || name.clone());
            }
            checks.push(valid);
            checks.push(agree);
        }
    }
    Ok(checks)
}

fn charm_suite(ctx: &FoldingContext, family: Family, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let mut checks = Vec::new();
    let alg = ctx.datum().space().alg();
    let src_sys = ctx.source();
    let n = src_sys.rank();
    let pi = |p: &Poly| pi_tau_hom(p, ctx.fold_matrix(), alg);
    for theta in thetas_for(ctx, family, cfg) {
        let label = theta_label(ctx, &theta);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let orbits = build_orbits(ctx, &theta, SOURCE_GRAPH_LIMIT)?;
        let Some(src) = orbits.source.as_ref() else {
            return Err(FoldError::Resource(format!(
                "the charm suite needs the source graph, which exceeds {SOURCE_GRAPH_LIMIT} vertices"
            )));
        };
        let tau = &orbits.tau;
        let dmax = cfg.degree.min(2);

        let mut s1s = vec![Poly::one(n)];
        for d in 1..=dmax {
            for _ in 0..2 {
                s1s.push(Poly::random_homogeneous(n, d, &mut rng, None));
            }
        }
        let mut s2s = Vec::new();
        for d in 0..=dmax {
            s2s.extend(invariants_gen(src_sys, &theta, d, Mode::Field, None)?);
        }
        let mut square =
            CheckOutcome::new(format!("{label}: ι*(ρ(s₁ ⊗ s₂)) = ρ_τ(π_τ s₁ ⊗ π_τ s₂), deg s₁, s₂ ≤ {dmax}"));
        for s1 in &s1s {
            for s2 in &s2s {
                let r = (|| -> Result<bool> {
                    let z = evaluate(src, &SectionExpr::borel(s1.clone(), s2.clone()))?;
                    let lhs = iota_star(ctx, tau, src, &z, Mode::Field, true)?;
                    let rhs = evaluate(&tau.graph, &SectionExpr::borel(pi(s1)?, pi(s2)?))?;
                    Ok(lhs == rhs)
                })();
                square.record_result(r, || format!("s₁ = {s1}, s₂ = {s2}"));
            }
        }
        checks.push(square);

        let mut mult = CheckOutcome::new(format!("{label}: ι*(zz′) = ι*(z)ι*(z′)"));
        let mut additive = CheckOutcome::new(format!("{label}: ι*(z + z′) = ι*(z) + ι*(z′)"));
        let inv1 = invariants_gen(src_sys, &theta, 1, Mode::Field, None)?;
        let ring_cases = (cfg.cases / 5).max(1);
        let random_section = |rng: &mut ChaCha8Rng| -> Result<Section> {
            let d = rng.gen_range(0..=1);
            let s = Poly::random_homogeneous(n, d, rng, None);
            let e = match inv1.choose(rng) {
                Some(t) if rng.gen_bool(0.7) => SectionExpr::borel(s, t.clone()),
                _ => SectionExpr::Const(s),
            };
            evaluate(src, &e)
        };
        for k in 0..ring_cases {
            let r = (|| -> Result<(bool, bool)> {
                let (z1, z2) = (random_section(&mut rng)?, random_section(&mut rng)?);
                let (i1, i2) = (iota_star_unchecked(ctx, tau, &z1)?, iota_star_unchecked(ctx, tau, &z2)?);
                let prod = iota_star_unchecked(ctx, tau, &z1.mul(&z2)?)?;
                let sum = iota_star_unchecked(ctx, tau, &z1.add(&z2)?)?;
                Ok((prod == i1.mul(&i2)?, sum == i1.add(&i2)?))
            })();
            match r {
                Ok((p, s)) => {
                    mult.record(p, || format!("case {k}"));
                    additive.record(s, || format!("case {k}"));
                }
                Err(e) => {
                    mult.record(false, || format!("case {k}: {e}"));
                    additive.record(false, || format!("case {k}: {e}"));
                }
            }
        }
        checks.push(mult);
        checks.push(additive);

        let mut aug = CheckOutcome::new(format!("{label}: ι*(𝕀𝒵)_d ⊆ (𝕀_τ𝒵_τ)_d"));
        let mut src_gs = GradedStructure::new(src, AUGMENTED_UNKNOWN_LIMIT);
        let mut tgt_gs = GradedStructure::new(&tau.graph, AUGMENTED_UNKNOWN_LIMIT);
        for d in 1..=dmax {
            let unknowns = src.num_vertices() * src_gs.monomials(d).len();
            if unknowns > AUGMENTED_UNKNOWN_LIMIT {
                break;
            }
            let r = (|| -> Result<bool> {
                let ideal = tgt_gs.ideal_part(d)?;
                let dim = tau.graph.num_vertices() * tgt_gs.monomials(d).len();
                let base = rank_of(&ideal, dim);
                let mut all = ideal;
                for v in src_gs.ideal_part(d)? {
                    let z = src_gs.section_of(&v, d)?;
                    all.push(tgt_gs.coords_of(&iota_star_unchecked(ctx, tau, &z)?, d));
                }
                Ok(rank_of(&all, dim) == base)
            })();
            aug.record_result(r, || format!("degree {d}"));
        }
        checks.push(aug);
    }
    Ok(checks)
}

fn random_u(rng: &mut ChaCha8Rng, slots: usize) -> UVector {
    UVector::new((0..2 * slots).map(|_| Rational::from_integer(rng.gen_range(-5..=5))).collect())
}

/// A random vector with `u_l · u_l ∈ k`: random first slots, the last slot
/// `(y, 1)` chosen to cancel the τ-part.
fn random_tau_rational(ctx: &FoldingContext, rng: &mut ChaCha8Rng) -> UVector {
    let space = ctx.datum().space();
    let alg = space.alg();
    let n = space.n();
    let mut coords: Vec<Rational> = (0..2 * (n - 1)).map(|_| Rational::from_integer(rng.gen_range(-4..=4))).collect();
    // τ-part of (y + τy')² is 2yy' + c₁y'²
    let mut t = Rational::zero();
    for p in coords.chunks(2) {
        t += &(&(&Rational::from_integer(2) * &p[0]) * &p[1]);
        t += &(alg.c1() * &(&p[1] * &p[1]));
    }
    let y = &(-(&t + alg.c1())) * &Rational::new(1, 2);
    coords.push(y);
    coords.push(Rational::one());
    UVector::new(coords)
}

fn props_suite(ctx: &FoldingContext, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let datum = ctx.datum();
    let space = datum.space();
    let alg = space.alg();
    let (c1, c2) = (alg.c1().clone(), alg.c2().clone());
    let n = space.n();
    let cases = cfg.cases;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    let mut adj = CheckOutcome::new("B_τ(z, 𝒯z′) = B_τ(𝒯z, z′)");
    let mut quad = CheckOutcome::new("𝒯² = c₁𝒯 − c₂");
    for _ in 0..cases {
        let (u, v) = (random_u(&mut rng, n), random_u(&mut rng, n));
        adj.record(space.b_tau(&u, &space.tau_op(&v)) == space.b_tau(&space.tau_op(&u), &v), || {
            format!("u = {u:?}, v = {v:?}")
        });
        let tu = space.tau_op(&u);
        let lhs = space.tau_op(&tu);
        let rhs = tu.scale(&c1).sub(&u.scale(&c2));
        quad.record(lhs == rhs, || format!("u = {u:?}"));
    }
    checks.push(adj);
    checks.push(quad);

    let roots: Vec<UVector> = ctx
        .source()
        .all_roots()
        .iter()
        .map(|m| datum.root_vector(m))
        .filter(|u| space.is_tau_rational(u).unwrap_or(false))
        .collect();
    let mut norm1 = CheckOutcome::new("τ-rational u: B_τ(u, 𝒯u) = 0");
    let mut norm2 = CheckOutcome::new("τ-rational u: B_τ(𝒯u, 𝒯u) = −c₂B_τ(u, u) = −c₂(u_l·u_l)");
    let mut norm3 = CheckOutcome::new("τ-rational u with u_l·u_l ≠ 0: u ≠ 𝒯u");
    for k in 0..cases {
        let u = if k % 4 == 0 && !roots.is_empty() {
            roots[rng.gen_range(0..roots.len())].clone()
        } else {
            random_tau_rational(ctx, &mut rng)
        };
        let tu = space.tau_op(&u);
        let x = space.pi_tau(&u);
        let q = x.dot(&x);
        if !q.is_base() {
            norm1.record(false, || format!("generated vector {u:?} is not τ-rational"));
            continue;
        }
        norm1.record(space.b_tau(&u, &tu).is_zero(), || format!("u = {u:?}"));
        let buu = space.b_tau(&u, &u);
        let ok2 = space.b_tau(&tu, &tu) == -(&c2 * &buu) && &buu == q.y();
        norm2.record(ok2, || format!("u = {u:?}"));
        if !q.is_zero() {
            norm3.record(u != tu, || format!("u = {u:?}"));
        }
    }
    checks.extend([norm1, norm2, norm3]);

    let mut eig = CheckOutcome::new("z = eigen_join(eigen_split(z)) and 𝒯z = eigen_join(τa, σb)");
    let (tau, sigma) = (alg.tau(), alg.sigma());
    for _ in 0..cases {
        let z = random_u(&mut rng, n);
        let r = (|| -> Result<bool> {
            let (a, b) = space.eigen_split(&z)?;
            let back = space.eigen_join(&a, &b)?;
            let tz = space.eigen_join(&a.scale(&tau), &b.scale(&sigma))?;
            Ok(back == z && tz == space.tau_op(&z))
        })();
        eig.record_result(r, || format!("z = {z:?}"));
    }
    checks.push(eig);

    let t = space.tau_matrix();
    let lifts: Vec<Matrix> = ctx.sources().iter().map(|&s| ctx.lift_reflection(s)).collect::<Result<_>>()?;
    let mut comm = CheckOutcome::new("lifted reflections and their products commute with 𝒯");
    for _ in 0..cases {
        let len = rng.gen_range(1..=6);
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..lifts.len())).collect();
        let r = (|| -> Result<bool> {
            let mut w = Matrix::identity(2 * n);
            for &g in &word {
                w = lifts[g].mul(&w)?;
            }
            Ok(w.mul(&t)? == t.mul(&w)?)
        })();
        comm.record_result(r, || format!("word {word:?}"));
    }
    checks.push(comm);

    let src = ctx.source();
    let tgt = ctx.target();
    let m = tgt.rank();
    let lift_mats: Vec<Matrix> = (0..m).map(|g| ctx.lift_matrix_on_roots(g)).collect();
    let mut equiv = CheckOutcome::new("π_τ(lift_g(β)) = s_g(π_τ(β)) on source roots");
    let all_src = src.all_roots();
    for _ in 0..cases {
        let beta = &all_src[rng.gen_range(0..all_src.len())];
        let g = rng.gen_range(0..m);
        let r = (|| -> Result<bool> {
            let lifted = lift_mats[g].apply(beta)?;
            Ok(ctx.fold_coords(&lifted) == tgt.simple_reflect_root(&ctx.fold_coords(beta), g))
        })();
        equiv.record_result(r, || format!("β = {beta:?}, g = {g}"));
    }
    checks.push(equiv);

    let mut stab = CheckOutcome::new("Φ_τ ⊆ π_τ(Φ)");
    stab.record_result(ctx.check_stabilization().map(|_| true), || "all of Φ_τ".into());
    let mut sign = CheckOutcome::new("Δ_τ-coordinates of Φ_τ are sign-coherent");
    sign.record_result(ctx.check_sign_coherence().map(|_| true), || "all of Φ_τ".into());
    for _ in 0..cases {
        let i = rng.gen_range(0..m);
        let len = rng.gen_range(0..=8);
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..m)).collect();
        let mut beta: Vec<QScalar> = (0..m).map(|j| QScalar::from_i64(i64::from(i == j))).collect();
        let mut lifted: Vec<QScalar> =
            (0..src.rank()).map(|j| QScalar::from_i64(i64::from(ctx.sources()[i] == j))).collect();
        let r = (|| -> Result<(bool, bool)> {
            for &g in &word {
                beta = tgt.simple_reflect_root(&beta, g);
                lifted = lift_mats[g].apply(&lifted)?;
            }
            let image = src.is_root(&lifted) && ctx.fold_coords(&lifted) == beta;
            let signs: Vec<i32> = beta.iter().map(QScalar::sign).collect();
            let coherent = signs.iter().all(|&s| s >= 0) || signs.iter().all(|&s| s <= 0);
            Ok((image, coherent && tgt.is_root(&beta)))
        })();
        match r {
            Ok((a, b)) => {
                stab.record(a, || format!("w = {word:?} applied to b{}", i + 1));
                sign.record(b, || format!("w = {word:?} applied to b{}", i + 1));
            }
            Err(e) => {
                stab.record(false, || format!("{e}"));
                sign.record(false, || format!("{e}"));
            }
        }
    }
    checks.push(stab);
    checks.push(sign);

    let mut dom = CheckOutcome::new("μ = π_τ(θ) is dominant with stabilizer (W_Θ)_τ");
    let r = src.rank();
    for _ in 0..cases {
        let theta: Vec<usize> = (0..r).filter(|_| rng.gen_bool(0.35)).collect();
        let preserved = crate::momentgraph::check_theta_preserved(datum, &theta).is_ok();
        if !preserved {
            let rejected = matches!(choose_theta_folded(ctx, &theta), Err(FoldError::Validation(_)));
            dom.record(rejected, || format!("non-preserved Θ {theta:?} was accepted"));
            continue;
        }
        let res = (|| -> Result<bool> {
            let cfg = choose_theta_folded(ctx, &theta)?;
            // a random dominant θ with the same stabilizer
            let weights: Vec<QScalar> = (0..r)
                .map(|i| if theta.contains(&i) { QScalar::zero() } else { QScalar::from_i64(rng.gen_range(1..=5)) })
                .collect();
            let coords = src.coords_of_weights(&weights)?;
            let mu = ctx.fold_coords(&coords);
            let ambient = ctx.folded_vector(&mu) == space.fold_vector(&datum.root_vector(&coords));
            let folded_theta = cfg.folded_theta().unwrap_or(&[]).to_vec();
            let ok = (0..m).all(|i| {
                let b = tgt.form_roots(&mu, &unit(m, i));
                if folded_theta.contains(&i) {
                    b.is_zero()
                } else {
                    b.sign() > 0
                }
            });
            Ok(ok && ambient)
        })();
        dom.record_result(res, || format!("Θ = {theta:?}"));
    }
    checks.push(dom);
    Ok(checks)
}

fn unit(m: usize, i: usize) -> Vec<QScalar> {
    (0..m).map(|j| QScalar::from_i64(i64::from(i == j))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig { cases: 60, sample_cap: 2, ..VerifyConfig::default() }
    }

    #[test]
    fn suites_pass_on_c2() {
        for suite in [Suite::Theorem, Suite::Charm, Suite::Props] {
            let rep = run_suite(Family::A2C(2), suite, &quick()).unwrap();
            for c in &rep.checks {
                assert!(c.passed(), "{suite}: {} failed: {:?}", c.name, c.details);
            }
        }
    }

    #[test]
    fn suite_names() {
        assert_eq!("Theorem".parse::<Suite>().unwrap(), Suite::Theorem);
        assert!("bogus".parse::<Suite>().is_err());
        assert!(run_suite(Family::A(2), Suite::Props, &quick()).is_err());
    }

    #[test]
    fn tau_rational_generator() {
        let ctx = FoldingContext::new(catalog_build(Family::A4H2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let u = random_tau_rational(&ctx, &mut rng);
            assert!(ctx.datum().space().is_tau_rational(&u).unwrap());
        }
    }

    #[test]
    fn sweep_rejects_non_section() {
        let ctx = FoldingContext::new(catalog_build(Family::A2C(2)).unwrap()).unwrap();
        let o = build_orbits(&ctx, &[], SOURCE_GRAPH_LIMIT).unwrap();
        let g = &o.tau.graph;
        let mut values = vec![Poly::zero(2); g.num_vertices()];
        values[0] = Poly::one(2);
        let s = Section::new(g.side(), 2, values).unwrap();
        let (count, bad) = condition_sweep(g, &s, Mode::Field).unwrap();
        assert_eq!(count, 2 * g.edges().len());
        assert!(!bad.is_empty());
    }
}
