use num_traits::One;
use serde::Serialize;

use super::system::{RootSystem, DEFAULT_ROOT_BOUND};
use crate::error::{FoldError, Result};
use crate::linalg::Matrix;
use crate::scalars::{QScalar, Rational};
use crate::weilmod::{FoldedSpace, UVector};

/// A crystallographic root system realized inside a Weil restriction `U`.
#[derive(Debug, Clone)]
pub struct RootDatum {
    space: FoldedSpace,
    names: Vec<String>,
    simple: Vec<UVector>,
    system: RootSystem,
    tau_matrix: Option<Matrix>,
}

/// `Δ = Δ^𝒯 ⊔ Δ_rat ⊔ 𝒯(Δ_rat)`, by simple-root index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauPartition {
    pub invariant: Vec<usize>,
    /// Pairs `(α, 𝒯α)` with `α ∈ Δ_rat`.
    pub pairs: Vec<(usize, usize)>,
}

impl TauPartition {
    pub fn rational(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn image(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    /// The partner of `i` under 𝒯 (itself for invariant roots).
    pub fn partner(&self, i: usize) -> Option<usize> {
        if self.invariant.contains(&i) {
            return Some(i);
        }
        self.pairs.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }
}

impl RootDatum {
    pub fn new(space: FoldedSpace, names: Vec<String>, simple: Vec<UVector>) -> Result<Self> {
        if names.len() != simple.len() || simple.is_empty() {
            return Err(FoldError::Config("need one name per simple root".into()));
        }
        for u in &simple {
            space.check(u)?;
        }
        let gram: Vec<Vec<QScalar>> = simple
            .iter()
            .map(|a| simple.iter().map(|b| QScalar::base(space.b_tau(a, b))).collect())
            .collect();
        let system = RootSystem::from_gram(names.clone(), gram, DEFAULT_ROOT_BOUND)?;
        if !system.is_crystallographic() {
            return Err(FoldError::Validation("source root system must be crystallographic".into()));
        }
        // α^∨(α) = 2 holds by construction of the Cartan matrix; the simple
        // roots must be linearly independent
        let cols: Vec<Vec<QScalar>> = simple.iter().map(UVector::as_qscalars).collect();
        let basis = Matrix::from_cols(&cols)?;
        if basis.rank() != simple.len() {
            return Err(FoldError::Validation("simple roots are linearly dependent".into()));
        }
        let mut tau_cols = Vec::with_capacity(simple.len());
        let mut preserved = true;
        for a in &simple {
            let img = space.tau_op(a).as_qscalars();
            match basis.solve(&img)? {
                Some(x) => tau_cols.push(x),
                None => {
                    preserved = false;
                    break;
                }
            }
        }
        let tau_matrix = if preserved { Some(Matrix::from_cols(&tau_cols)?) } else { None };
        Ok(RootDatum { space, names, simple, system, tau_matrix })
    }

    pub fn space(&self) -> &FoldedSpace {
        &self.space
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn simple_roots(&self) -> &[UVector] {
        &self.simple
    }

    pub fn system(&self) -> &RootSystem {
        &self.system
    }

    pub fn rank(&self) -> usize {
        self.simple.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The matrix of 𝒯 in the simple-root basis, if 𝒯 preserves their span.
    pub fn tau_matrix(&self) -> Option<&Matrix> {
        self.tau_matrix.as_ref()
    }

    /// `Σ m_j α_j`.
    pub fn root_vector(&self, coords: &[QScalar]) -> UVector {
        let mut acc = self.space.zero();
        for (m, a) in coords.iter().zip(&self.simple) {
            if !m.is_zero() {
                debug_assert!(m.is_base());
                acc = acc.add(&a.scale(m.y()));
            }
        }
        acc
    }

    /// Checks the conditions of a folded representation and computes the
    /// partition of the simple roots.
    pub fn validate_folded_rep(&self) -> Result<TauPartition> {
        let alg = self.space.alg();
        if *alg.c2() != -Rational::one() {
            return Err(FoldError::Validation(format!(
                "the τ-form agrees with the dot product only when c2 = -1 (got c2 = {})",
                alg.c2()
            )));
        }
        if alg.tau().sign() <= 0 {
            return Err(FoldError::Validation("the chosen root τ must be positive".into()));
        }
        let t = self.tau_matrix.as_ref().ok_or_else(|| {
            let bad = self
                .simple
                .iter()
                .position(|a| {
                    let cols: Vec<Vec<QScalar>> = self.simple.iter().map(UVector::as_qscalars).collect();
                    let basis = Matrix::from_cols(&cols).expect("columns have equal length");
                    basis.solve(&self.space.tau_op(a).as_qscalars()).ok().flatten().is_none()
                })
                .unwrap_or(0);
            FoldError::Validation(format!(
                "𝒯({}) does not lie in the span of the simple roots",
                self.names[bad]
            ))
        })?;
        for i in 0..t.rows() {
            for j in 0..t.cols() {
                let e = &t[(i, j)];
                if !(e.is_base() && e.y().is_integer()) {
                    return Err(FoldError::Validation(format!(
                        "𝒯 does not preserve the root lattice: entry ({}, {}) = {e}",
                        self.names[i], self.names[j]
                    )));
                }
            }
        }
        let det = t.det()?;
        if !(det.is_one() || (-&det).is_one()) {
            return Err(FoldError::Validation(format!("𝒯 has determinant {det} on the root lattice")));
        }
        let r = self.rank();
        let images: Vec<UVector> = self.simple.iter().map(|a| self.space.tau_op(a)).collect();
        let rational: Vec<bool> =
            self.simple.iter().map(|a| self.space.is_tau_rational(a)).collect::<Result<_>>()?;
        let mut assigned = vec![false; r];
        let mut invariant = Vec::new();
        let mut pairs = Vec::new();
        for j in 0..r {
            if assigned[j] {
                continue;
            }
            if images[j] == self.simple[j] {
                invariant.push(j);
                assigned[j] = true;
                continue;
            }
            let forward = (0..r).find(|&k| !assigned[k] && k != j && images[j] == self.simple[k]);
            let backward = (0..r).find(|&k| !assigned[k] && k != j && images[k] == self.simple[j]);
            match (forward, backward) {
                (Some(k), _) if rational[j] => {
                    pairs.push((j, k));
                    assigned[j] = true;
                    assigned[k] = true;
                }
                (_, Some(k)) if rational[k] => {
                    pairs.push((k, j));
                    assigned[j] = true;
                    assigned[k] = true;
                }
                _ => {
                    return Err(FoldError::Validation(format!(
                        "simple root {} is neither 𝒯-fixed nor part of a τ-rational pair in Δ",
                        self.names[j]
                    )))
                }
            }
        }
        pairs.sort_unstable();
        for &(a, b) in &pairs {
            let (ua, ub) = (&self.simple[a], &self.simple[b]);
            if !self.space.b_tau(ua, ub).is_zero() || self.space.b_tau(ua, ua) != self.space.b_tau(ub, ub) {
                return Err(FoldError::Validation(format!(
                    "pair ({}, {}) is not orthogonal of equal length",
                    self.names[a], self.names[b]
                )));
            }
        }
        Ok(TauPartition { invariant, pairs })
    }
}
