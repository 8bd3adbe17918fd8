use std::collections::{HashSet, VecDeque};

use num_traits::One;

use crate::error::{FoldError, Result};
use crate::linalg::Matrix;
use crate::poly::{monomials, simple_reflection_poly, Poly};
use crate::rootsys::RootSystem;
use crate::scalars::{Alg, Mode, QScalar, Rational};

/// Groups up to this order are averaged directly; larger ones use the
/// fixed-space solve.
pub const REYNOLDS_LIMIT: u64 = 1_000;

/// A basis of the degree-`d` invariants of the parabolic subgroup generated by
/// `gens`, as the common fixed space of the generators on `S_d`.
pub fn invariants_fixed(system: &RootSystem, gens: &[usize], d: u32) -> Vec<Poly> {
    let n = system.rank();
    let basis = monomials(n, d);
    if gens.is_empty() {
        return basis.iter().map(|m| Poly::from_coords(n, std::slice::from_ref(m), &[QScalar::one()])).collect();
    }
    let dim = basis.len();
    let mut m = Matrix::zeros(gens.len() * dim, dim);
    for (g, &i) in gens.iter().enumerate() {
        for (c, mono) in basis.iter().enumerate() {
            let p = Poly::from_coords(n, std::slice::from_ref(mono), &[QScalar::one()]);
            let img = simple_reflection_poly(&p, system.cartan(), i).sub(&p);
            for (r, x) in img.coords_in_degree(&basis).into_iter().enumerate() {
                m[(g * dim + r, c)] = x;
            }
        }
    }
    m.nullspace().iter().map(|v| Poly::from_coords(n, &basis, v)).collect()
}

/// The elements of the parabolic subgroup as matrices on simple-root coordinates.
pub fn parabolic_group(system: &RootSystem, gens: &[usize], bound: usize) -> Result<Vec<Matrix>> {
    let n = system.rank();
    let mats: Vec<Matrix> = gens.iter().map(|&i| system.simple_reflection_matrix(i)).collect();
    let mut seen: HashSet<Matrix> = HashSet::from([Matrix::identity(n)]);
    let mut out = vec![Matrix::identity(n)];
    let mut queue = VecDeque::from([Matrix::identity(n)]);
    while let Some(g) = queue.pop_front() {
        for s in &mats {
            let h = s.mul(&g)?;
            if seen.insert(h.clone()) {
                if seen.len() > bound {
                    return Err(FoldError::Resource(format!("parabolic subgroup exceeds {bound} elements")));
                }
                out.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(out)
}

/// `(1/|G|) Σ_g g(f)`.
pub fn reynolds(f: &Poly, group: &[Matrix], mode: Mode, alg: Option<Alg>) -> Result<Poly> {
    let order = group.len() as u64;
    check_order(order, mode, alg)?;
    let mut acc = Poly::zero(f.nvars());
    for g in group {
        acc.add_assign(&f.substitute_linear(g)?);
    }
    Ok(acc.scale(&QScalar::base(Rational::new(1, order as i64))))
}

fn check_order(order: u64, mode: Mode, alg: Option<Alg>) -> Result<()> {
    if mode == Mode::Integral {
        let ok = alg.is_some_and(|a| a.integer_invertible(order));
        if !ok {
            return Err(FoldError::Mode(format!(
                "the group order {order} is not invertible in the coefficient ring; \
                 averaging over the parabolic subgroup needs |W_Θ| invertible"
            )));
        }
    }
    Ok(())
}

/// Invariants by averaging every monomial, reduced to a basis.
pub fn invariants_reynolds(
    system: &RootSystem,
    gens: &[usize],
    d: u32,
    mode: Mode,
    alg: Option<Alg>,
) -> Result<Vec<Poly>> {
    let n = system.rank();
    let group = parabolic_group(system, gens, REYNOLDS_LIMIT as usize * 100)?;
    let basis = monomials(n, d);
    let mut rows = Vec::with_capacity(basis.len());
    for m in &basis {
        let p = Poly::from_coords(n, std::slice::from_ref(m), &[QScalar::one()]);
        rows.push(reynolds(&p, &group, mode, alg)?.coords_in_degree(&basis));
    }
    let mut mat = Matrix::from_rows(rows)?;
    let pivots = mat.rref();
    Ok((0..pivots.len()).map(|r| Poly::from_coords(n, &basis, mat.row(r))).collect())
}

/// Degree-`d` invariants of `⟨s_i : i ∈ gens⟩`: averaging for small groups and
/// `d ≥ 2`, the fixed-space solve otherwise.
pub fn invariants_gen(system: &RootSystem, gens: &[usize], d: u32, mode: Mode, alg: Option<Alg>) -> Result<Vec<Poly>> {
    let order = if gens.is_empty() { 1 } else { system.parabolic(gens)?.group_order_by_permutations(10_000_000)? };
    check_order(order, mode, alg)?;
    if d >= 2 && order <= REYNOLDS_LIMIT {
        invariants_reynolds(system, gens, d, mode, alg)
    } else {
        Ok(invariants_fixed(system, gens, d))
    }
}
