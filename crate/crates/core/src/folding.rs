//! The twisted folding: folded simple roots, lifted reflections, the folded
//! root system `Φ_τ` and its reflection group `W_τ`.

use std::collections::{HashSet, VecDeque};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{FoldError, Result};
use crate::linalg::Matrix;
use crate::rootsys::{RootDatum, RootSystem, TauPartition, DEFAULT_ROOT_BOUND};
use crate::scalars::QScalar;
use crate::weilmod::LVector;

pub const DEFAULT_GROUP_BOUND: usize = 200_000;

/// A validated folded representation together with its folding.
#[derive(Debug, Clone)]
pub struct FoldingContext {
    datum: RootDatum,
    partition: TauPartition,
    sources: Vec<usize>,
    lifts: Vec<Vec<usize>>,
    delta_tau: Vec<LVector>,
    target: RootSystem,
    fold_matrix: Matrix,
    fold_factor: QScalar,
    phi_tau: Vec<Vec<QScalar>>,
    w_tau_order: u64,
}

/// Outcome of sampling elements of `W` that commute with 𝒯.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutantReport {
    pub sampled: usize,
    pub commuting: usize,
    pub commuting_in_w_tau: usize,
    pub w_tau_order: u64,
}

impl FoldingContext {
    pub fn new(datum: RootDatum) -> Result<Self> {
        Self::with_bounds(datum, DEFAULT_ROOT_BOUND, DEFAULT_GROUP_BOUND)
    }

    pub fn with_bounds(datum: RootDatum, root_bound: usize, group_bound: usize) -> Result<Self> {
        let partition = datum.validate_folded_rep()?;
        let alg = datum.space().alg();
        let fold_factor = alg.fold_factor();
        let mut sources: Vec<usize> = partition.invariant.clone();
        sources.extend(partition.rational());
        sources.sort_unstable();
        let delta_tau = fold_delta(&datum, &sources);
        let lifts: Vec<Vec<usize>> = sources
            .iter()
            .map(|&s| match partition.partner(s) {
                Some(t) if t != s => vec![s, t],
                _ => vec![s],
            })
            .collect();
        let m = sources.len();
        let r = datum.rank();
        let mut fold_matrix = Matrix::zeros(m, r);
        for (i, &s) in sources.iter().enumerate() {
            fold_matrix[(i, s)] = QScalar::one();
            if let Some(t) = partition.partner(s).filter(|&t| t != s) {
                fold_matrix[(i, t)] = fold_factor.clone();
            }
        }
        let names = sources.iter().enumerate().map(|(i, _)| format!("b{}", i + 1)).collect();
        let gram = delta_tau.iter().map(|a| delta_tau.iter().map(|b| a.dot(b)).collect()).collect();
        let target = RootSystem::from_gram(names, gram, root_bound)?;
        let phi_tau = close_under_reflections(&target, root_bound)?;
        let positive: HashSet<&Vec<QScalar>> =
            phi_tau.iter().filter(|b| b.iter().all(|x| x.sign() >= 0)).collect();
        let generated: HashSet<&Vec<QScalar>> = target.positive_roots().iter().collect();
        if positive != generated {
            return Err(FoldError::Invariant(
                "reflection closure and positive-root saturation disagree on Φ_τ".into(),
            ));
        }
        let w_tau_order = target.group_order_by_permutations(group_bound)?;
        let ctx = FoldingContext {
            datum,
            partition,
            sources,
            lifts,
            delta_tau,
            target,
            fold_matrix,
            fold_factor,
            phi_tau,
            w_tau_order,
        };
        for i in 0..m {
            let lift = ctx.lift_reflection(ctx.sources[i])?;
            let t = ctx.datum.space().tau_matrix();
            if lift.mul(&t)? != t.mul(&lift)? {
                return Err(FoldError::Invariant(format!(
                    "lifted reflection for {} does not commute with 𝒯",
                    ctx.datum.names()[ctx.sources[i]]
                )));
            }
        }
        Ok(ctx)
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn partition(&self) -> &TauPartition {
        &self.partition
    }

    /// Source simple-root index of each folded simple root.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    /// For each folded simple root, the source simple reflections whose
    /// product is its lift, in the order they are applied.
    pub fn lifts(&self) -> &[Vec<usize>] {
        &self.lifts
    }

    pub fn delta_tau(&self) -> &[LVector] {
        &self.delta_tau
    }

    pub fn target(&self) -> &RootSystem {
        &self.target
    }

    pub fn source(&self) -> &RootSystem {
        self.datum.system()
    }

    /// The `m x r` matrix sending source simple-root coordinates to folded
    /// simple-root coordinates: `α ↦ ᾱ`, `𝒯α ↦ t ᾱ`.
    pub fn fold_matrix(&self) -> &Matrix {
        &self.fold_matrix
    }

    /// `t = τ` in the non-split case and `t = 1` in the split case.
    pub fn fold_factor(&self) -> &QScalar {
        &self.fold_factor
    }

    /// All of `Φ_τ` in `Δ_τ`-coordinates.
    pub fn phi_tau(&self) -> &[Vec<QScalar>] {
        &self.phi_tau
    }

    pub fn phi_tau_positive(&self) -> &[Vec<QScalar>] {
        self.target.positive_roots()
    }

    pub fn w_tau_order(&self) -> u64 {
        self.w_tau_order
    }

    /// Index of the folded simple root coming from source simple root `s`.
    pub fn folded_index_of_source(&self, s: usize) -> Option<usize> {
        self.sources.iter().position(|&x| x == s)
    }

    /// The lift of the folded reflection for the source simple root `alpha`
    /// (in `Δ_rat ⊔ Δ^𝒯`), as a `2n x 2n` matrix over `k`.
    pub fn lift_reflection(&self, alpha: usize) -> Result<Matrix> {
        let space = self.datum.space();
        let simple = self.datum.simple_roots();
        if self.partition.image().contains(&alpha) {
            let partner = self.partition.partner(alpha).expect("image roots are paired");
            return Err(FoldError::Lookup(format!(
                "{} lies in 𝒯(Δ_rat); use its partner {}",
                self.datum.names()[alpha],
                self.datum.names()[partner]
            )));
        }
        let r_alpha = space.reflection_matrix(&simple[alpha])?;
        match self.partition.partner(alpha) {
            Some(t) if t != alpha => space.reflection_matrix(&simple[t])?.mul(&r_alpha),
            Some(_) => Ok(r_alpha),
            None => Err(FoldError::Lookup(format!("{} is not a simple root", alpha))),
        }
    }

    /// The same lift on source simple-root coordinates.
    pub fn lift_matrix_on_roots(&self, folded: usize) -> Matrix {
        let src = self.source();
        let mut m = Matrix::identity(src.rank());
        for &s in &self.lifts[folded] {
            m = src.simple_reflection_matrix(s).mul(&m).expect("square matrices");
        }
        m
    }

    /// Folded coordinates of a source vector given in simple-root coordinates.
    pub fn fold_coords(&self, source_coords: &[QScalar]) -> Vec<QScalar> {
        self.fold_matrix.apply(source_coords).expect("dimensions match")
    }

    /// `Σ c_i ᾱ_i`.
    pub fn folded_vector(&self, coords: &[QScalar]) -> LVector {
        let n = self.delta_tau[0].len();
        let mut acc = LVector::new(vec![QScalar::zero(); n]);
        for (c, a) in coords.iter().zip(&self.delta_tau) {
            if !c.is_zero() {
                acc = acc.add(&a.scale(c));
            }
        }
        acc
    }

    /// `Φ_τ ⊆ π_τ(Φ)`, compared on ambient vectors.
    pub fn check_stabilization(&self) -> Result<()> {
        let space = self.datum.space();
        let images: HashSet<LVector> = self
            .source()
            .all_roots()
            .iter()
            .map(|m| space.fold_vector(&self.datum.root_vector(m)))
            .collect();
        for beta in &self.phi_tau {
            if !images.contains(&self.folded_vector(beta)) {
                return Err(FoldError::Invariant(format!("folded root {beta:?} is not the image of a root")));
            }
        }
        Ok(())
    }

    /// Every root of `Φ_τ` is `±Σ (m_α + t m_{𝒯α}) ᾱ` with `m ≥ 0` coming
    /// from a positive source root; returns the number of roots checked.
    pub fn check_sign_coherence(&self) -> Result<usize> {
        let folded_positive: HashSet<Vec<QScalar>> =
            self.source().positive_roots().iter().map(|m| self.fold_coords(m)).collect();
        for beta in &self.phi_tau {
            let signs: Vec<i32> = beta.iter().map(QScalar::sign).collect();
            let pos = signs.iter().all(|&s| s >= 0);
            let neg = signs.iter().all(|&s| s <= 0);
            if !(pos || neg) {
                return Err(FoldError::Invariant(format!("folded root {beta:?} has mixed signs")));
            }
            let abs: Vec<QScalar> = if pos { beta.clone() } else { beta.iter().map(|x| -x).collect() };
            if !folded_positive.contains(&abs) {
                return Err(FoldError::Invariant(format!(
                    "folded root {beta:?} is not a nonnegative combination of the form m_α + t m_𝒯α"
                )));
            }
        }
        Ok(self.phi_tau.len())
    }

    /// Samples random elements of `W` and reports how many commute with 𝒯 and,
    /// of those, how many lie in `W_τ`. Nothing is asserted either way.
    pub fn sample_commutant(&self, samples: usize, word_len: usize, seed: u64) -> Result<CommutantReport> {
        let t = self
            .datum
            .tau_matrix()
            .ok_or_else(|| FoldError::Validation("𝒯 does not preserve the root lattice".into()))?;
        let r = self.source().rank();
        let to_int = |m: &Matrix| -> Vec<i64> {
            (0..r)
                .flat_map(|i| (0..r).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].y().to_i64().expect("integral Weyl group matrix"))
                .collect()
        };
        let mul = |a: &[i64], b: &[i64]| -> Vec<i64> {
            let mut out = vec![0i64; r * r];
            for i in 0..r {
                for k in 0..r {
                    let x = a[i * r + k];
                    if x != 0 {
                        for j in 0..r {
                            out[i * r + j] += x * b[k * r + j];
                        }
                    }
                }
            }
            out
        };
        let tm = to_int(t);
        let gens: Vec<Vec<i64>> = (0..r).map(|i| to_int(&self.source().simple_reflection_matrix(i))).collect();
        let lifts: Vec<Vec<i64>> = (0..self.sources.len()).map(|i| to_int(&self.lift_matrix_on_roots(i))).collect();
        let id: Vec<i64> = (0..r * r).map(|k| i64::from(k / r == k % r)).collect();
        let mut group: HashSet<Vec<i64>> = HashSet::new();
        group.insert(id.clone());
        let mut queue = VecDeque::from([id.clone()]);
        while let Some(g) = queue.pop_front() {
            for l in &lifts {
                let h = mul(l, &g);
                if group.insert(h.clone()) {
                    if group.len() > DEFAULT_GROUP_BOUND {
                        return Err(FoldError::Resource("W_τ too large to enumerate".into()));
                    }
                    queue.push_back(h);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = CommutantReport {
            sampled: samples,
            commuting: 0,
            commuting_in_w_tau: 0,
            w_tau_order: group.len() as u64,
        };
        for _ in 0..samples {
            let mut w = id.clone();
            for _ in 0..word_len {
                w = mul(&gens[rng.gen_range(0..r)], &w);
            }
            if mul(&w, &tm) == mul(&tm, &w) {
                report.commuting += 1;
                if group.contains(&w) {
                    report.commuting_in_w_tau += 1;
                }
            }
        }
        Ok(report)
    }
}

/// `Δ_τ`: the folded images of the given source simple roots.
pub fn fold_delta(datum: &RootDatum, sources: &[usize]) -> Vec<LVector> {
    sources.iter().map(|&s| datum.space().fold_vector(&datum.simple_roots()[s])).collect()
}

/// `W_τ(Δ_τ)` by breadth-first closure under the folded simple reflections,
/// positive roots first.
fn close_under_reflections(target: &RootSystem, bound: usize) -> Result<Vec<Vec<QScalar>>> {
    let m = target.rank();
    let mut seen: HashSet<Vec<QScalar>> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for i in 0..m {
        let mut e = vec![QScalar::zero(); m];
        e[i] = QScalar::one();
        seen.insert(e.clone());
        order.push(e.clone());
        queue.push_back(e);
    }
    while let Some(b) = queue.pop_front() {
        for i in 0..m {
            let img = target.simple_reflect_root(&b, i);
            if seen.insert(img.clone()) {
                if seen.len() > 2 * bound {
                    return Err(FoldError::Resource(format!(
                        "folded root closure exceeded {} roots; the input data diverge",
                        2 * bound
                    )));
                }
                order.push(img.clone());
                queue.push_back(img);
            }
        }
    }
    let (mut pos, neg): (Vec<_>, Vec<_>) = order.into_iter().partition(|b| b.iter().all(|x| x.sign() >= 0));
    pos.extend(neg);
    Ok(pos)
}
