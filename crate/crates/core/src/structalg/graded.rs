use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::invariants::invariants_gen;
use super::section::{char_class, Section};
use crate::error::{FoldError, Result};
use crate::linalg::{rank_of, Matrix};
use crate::momentgraph::MomentGraph;
use crate::poly::{monomials, Mono, Poly};
use crate::scalars::{Mode, QScalar};

pub const DEFAULT_UNKNOWN_BOUND: usize = 3_000;

/// Dimensions over the fraction field of the degree-`d` pieces of `𝒵`,
/// `𝒵/𝕀𝒵` and `𝒵/(𝕀𝒵 + 𝒵·𝕀^{W_Θ})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GradedReport {
    pub degree: u32,
    pub dim_plain: usize,
    pub dim_augmented: usize,
    pub dim_reduced: usize,
}

/// Graded pieces of the structure algebra of one graph, computed by exact
/// linear algebra and cached per degree.
pub struct GradedStructure<'a> {
    graph: &'a MomentGraph,
    nvars: usize,
    bound: usize,
    bases: HashMap<u32, Vec<Vec<QScalar>>>,
}

impl<'a> GradedStructure<'a> {
    pub fn new(graph: &'a MomentGraph, bound: usize) -> Self {
        GradedStructure { graph, nvars: graph.system().rank(), bound, bases: HashMap::new() }
    }

    pub fn graph(&self) -> &'a MomentGraph {
        self.graph
    }

    pub fn monomials(&self, d: u32) -> Vec<Mono> {
        monomials(self.nvars, d)
    }

    /// Flattened coordinates (vertex-major, monomials ascending) of the
    /// degree-`d` part of a section.
    pub fn coords_of(&self, s: &Section, d: u32) -> Vec<QScalar> {
        let mons = self.monomials(d);
        s.values().iter().flat_map(|p| p.coords_in_degree(&mons)).collect()
    }

    pub fn section_of(&self, coords: &[QScalar], d: u32) -> Result<Section> {
        let mons = self.monomials(d);
        let dim = mons.len();
        let values = (0..self.graph.num_vertices())
            .map(|v| Poly::from_coords(self.nvars, &mons, &coords[v * dim..(v + 1) * dim]))
            .collect();
        Section::new(self.graph.side(), self.nvars, values)
    }

    /// A basis of `𝒵_d` in flattened coordinates.
    pub fn basis(&mut self, d: u32) -> Result<Vec<Vec<QScalar>>> {
        if let Some(b) = self.bases.get(&d) {
            return Ok(b.clone());
        }
        let mons = self.monomials(d);
        let dim = mons.len();
        let nv = self.graph.num_vertices();
        let unknowns = nv * dim;
        if unknowns > self.bound {
            return Err(FoldError::Resource(format!(
                "degree {d} needs {unknowns} unknowns (bound {}); use the sampled verification suites instead",
                self.bound
            )));
        }
        let mut restrictions: HashMap<u32, Vec<Vec<QScalar>>> = HashMap::new();
        let mut rows: Vec<Vec<QScalar>> = Vec::new();
        for e in self.graph.edges() {
            let r = match restrictions.get(&e.label) {
                Some(r) => r,
                None => {
                    let r = restriction_rows(self.graph.label_coords(e), &mons)?;
                    restrictions.entry(e.label).or_insert(r)
                }
            };
            for row in r {
                let mut full = vec![QScalar::zero(); unknowns];
                for (m, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        full[e.src as usize * dim + m] = c.clone();
                        full[e.dst as usize * dim + m] = -c;
                    }
                }
                rows.push(full);
            }
        }
        let basis = if rows.is_empty() {
            (0..unknowns)
                .map(|i| (0..unknowns).map(|j| if i == j { QScalar::one() } else { QScalar::zero() }).collect())
                .collect()
        } else {
            Matrix::from_rows(rows)?.nullspace()
        };
        self.bases.insert(d, basis.clone());
        Ok(basis)
    }

    pub fn basis_sections(&mut self, d: u32) -> Result<Vec<Section>> {
        self.basis(d)?.iter().map(|c| self.section_of(c, d)).collect()
    }

    /// Spanning vectors of `(𝕀𝒵)_d = Σ_i x_i 𝒵_{d-1}`.
    pub fn ideal_part(&mut self, d: u32) -> Result<Vec<Vec<QScalar>>> {
        if d == 0 {
            return Ok(Vec::new());
        }
        let prev = self.basis_sections(d - 1)?;
        let mut out = Vec::new();
        for i in 0..self.nvars {
            let x = Poly::var(self.nvars, i);
            for b in &prev {
                out.push(self.coords_of(&b.scale_by(&x), d));
            }
        }
        Ok(out)
    }

    /// Spanning vectors of `(𝕀𝒵 + 𝒵·𝕀^{W_Θ})_d`, the second summand through the
    /// twisted action.
    pub fn reduced_part(&mut self, d: u32) -> Result<Vec<Vec<QScalar>>> {
        let mut out = self.ideal_part(d)?;
        let stab: Vec<usize> =
            self.graph.vertices()[0].coords.iter().enumerate().filter(|(_, c)| c.is_zero()).map(|(i, _)| i).collect();
        for e in 1..=d {
            let invs = invariants_gen(self.graph.system(), &stab, e, Mode::Field, None)?;
            if invs.is_empty() {
                continue;
            }
            let lower = self.basis_sections(d - e)?;
            for t in &invs {
                let c = char_class(self.graph, t)?;
                for b in &lower {
                    out.push(self.coords_of(&b.mul(&c)?, d));
                }
            }
        }
        Ok(out)
    }

    pub fn report(&mut self, d: u32) -> Result<GradedReport> {
        let dim = self.graph.num_vertices() * self.monomials(d).len();
        let plain = self.basis(d)?.len();
        let aug = rank_of(&self.ideal_part(d)?, dim);
        let red = rank_of(&self.reduced_part(d)?, dim);
        Ok(GradedReport { degree: d, dim_plain: plain, dim_augmented: plain - aug, dim_reduced: plain - red })
    }
}

/// Rows of the map `S_d → S_d/αS_{d-1}` (restriction to `α = 0`), dropping rows
/// that vanish identically.
fn restriction_rows(alpha: &[QScalar], mons: &[Mono]) -> Result<Vec<Vec<QScalar>>> {
    let n = alpha.len();
    let l = Poly::linear(alpha);
    let cols: Vec<Vec<QScalar>> = mons
        .iter()
        .map(|m| {
            let p = Poly::from_coords(n, std::slice::from_ref(m), &[QScalar::one()]);
            p.div_rem_linear(&l).map(|(_, r)| r.coords_in_degree(mons))
        })
        .collect::<Result<_>>()?;
    let rows = (0..mons.len())
        .map(|i| cols.iter().map(|c| c[i].clone()).collect::<Vec<_>>())
        .filter(|row: &Vec<QScalar>| row.iter().any(|x| !x.is_zero()))
        .collect();
    Ok(rows)
}


