//! Sparse polynomials in the simple-root variables, linear substitutions and
//! division by linear forms.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use smallvec::SmallVec;

use crate::error::{FoldError, Result};
use crate::linalg::Matrix;
use crate::scalars::{Alg, Mode, Projection, QScalar};

/// An exponent vector, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub SmallVec<[u8; 8]>);

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Mono::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn exps(&self) -> &[u8] {
        &self.0
    }

    fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// All monomials of total degree `d` in `nvars` variables, in ascending order.
pub fn monomials(nvars: usize, d: u32) -> Vec<Mono> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Mono>) {
        if i + 1 == cur.len() {
            cur[i] = left as u8;
            out.push(Mono(SmallVec::from_slice(cur)));
            return;
        }
        for e in 0..=left {
            cur[i] = e as u8;
            rec(i + 1, left - e, cur, out);
        }
    }
    if nvars == 0 {
        return if d == 0 { vec![Mono::one(0)] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(0, d, &mut vec![0; nvars], &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Mono, QScalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: QScalar) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Mono::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, QScalar::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Mono::var(nvars, i), QScalar::one());
        p
    }

    /// `Σ c_i x_i`.
    pub fn linear(coeffs: &[QScalar]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Mono::var(n, i), c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Mono, QScalar)>) -> Result<Self> {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            if m.0.len() != nvars {
                return Err(FoldError::Dimension { expected: nvars, found: m.0.len() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &QScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_else(QScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Mono::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Mono::degree);
        match it.next() {
            Some(d) => it.all(|e| e == d),
            None => true,
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    fn add_term(&mut self, m: Mono, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn same_ring(&self, o: &Poly) {
        assert_eq!(self.nvars, o.nvars, "polynomials in different numbers of variables");
    }

    pub fn add_assign(&mut self, o: &Poly) {
        self.same_ring(o);
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.same_ring(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.same_ring(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &QScalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.same_ring(o);
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Replaces `x_j` by `images[j]`.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.nvars {
            return Err(FoldError::Dimension { expected: self.nvars, found: images.len() });
        }
        let target = images.first().map_or(0, Poly::nvars);
        if images.iter().any(|p| p.nvars != target) {
            return Err(FoldError::Config("substitution images live in different rings".into()));
        }
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().expect("nonempty").mul(&images[j]);
                    powers[j].push(next);
                }
                t = t.mul(&powers[j][e as usize]);
            }
            for (m, c) in t.terms {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Replaces `x_j` by `Σ_i M_ij x_i` (column `j` of `M`); `M` has one
    /// column per variable and one row per variable of the target ring.
    pub fn substitute_linear(&self, m: &Matrix) -> Result<Poly> {
        if m.cols() != self.nvars {
            return Err(FoldError::Dimension { expected: self.nvars, found: m.cols() });
        }
        let images: Vec<Poly> = (0..m.cols()).map(|j| Poly::linear(&m.col(j))).collect();
        if images.is_empty() {
            return Ok(Poly::constant(m.rows(), self.augment()));
        }
        self.substitute(&images)
    }

    /// The constant term.
    pub fn augment(&self) -> QScalar {
        self.coeff(&Mono::one(self.nvars))
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&QScalar) -> QScalar) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn coefficients_in(&self, alg: Alg) -> bool {
        self.terms.values().all(|c| alg.contains(c))
    }

    fn var_coeffs(&self, v: usize) -> Vec<Poly> {
        let mut parts: Vec<Poly> = Vec::new();
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            while parts.len() <= k {
                parts.push(Poly::zero(self.nvars));
            }
            let mut rest = m.clone();
            rest.0[v] = 0;
            parts[k].add_term(rest, c.clone());
        }
        parts
    }

    /// `f = q L + r` where `r` is free of the pivot variable of `L`; `r` is the
    /// restriction of `f` to the hyperplane `L = 0`.
    pub fn div_rem_linear(&self, l: &Poly) -> Result<(Poly, Poly)> {
        self.same_ring(l);
        if l.is_zero() {
            return Err(FoldError::Degenerate("division by the zero linear form".into()));
        }
        if l.terms.keys().any(|m| m.degree() != 1) {
            return Err(FoldError::Config("divisor is not a homogeneous linear form".into()));
        }
        let (pm, a) = l
            .terms
            .iter()
            .find(|(_, c)| c.inv().is_ok())
            .ok_or_else(|| FoldError::Degenerate("linear form has no invertible coefficient".into()))?;
        let v = pm.0.iter().position(|&e| e == 1).expect("degree-one monomial");
        let a_inv = a.inv()?;
        let mut rest = l.clone();
        rest.terms.remove(pm);
        let parts = self.var_coeffs(v);
        if parts.is_empty() {
            return Ok((Poly::zero(self.nvars), Poly::zero(self.nvars)));
        }
        // f = Σ f_k x_v^k, L = a x_v + R
        let n = parts.len() - 1;
        let mut q: Vec<Poly> = vec![Poly::zero(self.nvars); n.max(1)];
        let mut carry = Poly::zero(self.nvars);
        for k in (1..=n).rev() {
            let qk = parts[k].sub(&carry).scale(&a_inv);
            carry = rest.mul(&qk);
            q[k - 1] = qk;
        }
        let rem = parts[0].sub(&carry);
        let mut out = Poly::zero(self.nvars);
        for (k, qk) in q.into_iter().enumerate() {
            for (m, c) in qk.terms {
                let mut m = m;
                m.0[v] = k as u8;
                out.add_term(m, c);
            }
        }
        Ok((out, rem))
    }

    /// `f / L` if `L` divides `f`. In integral mode the quotient must also have
    /// coefficients in the ring of `alg`.
    pub fn divide_by_linear(&self, l: &Poly, mode: Mode, alg: Option<Alg>) -> Result<Option<Poly>> {
        let (q, r) = self.div_rem_linear(l)?;
        if !r.is_zero() {
            return Ok(None);
        }
        if mode == Mode::Integral {
            let alg = alg.ok_or_else(|| FoldError::Mode("integral mode needs a coefficient ring".into()))?;
            if !q.coefficients_in(alg) {
                return Ok(None);
            }
        }
        Ok(Some(q))
    }

    /// Coordinates in the monomial basis of degree `d` (ascending order).
    pub fn coords_in_degree(&self, basis: &[Mono]) -> Vec<QScalar> {
        basis.iter().map(|m| self.coeff(m)).collect()
    }

    pub fn from_coords(nvars: usize, basis: &[Mono], coords: &[QScalar]) -> Poly {
        let mut p = Poly::zero(nvars);
        for (m, c) in basis.iter().zip(coords) {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    /// A random homogeneous polynomial of degree `d` with small integer
    /// coefficients, optionally mixing in `τ`-parts.
    pub fn random_homogeneous(nvars: usize, d: u32, rng: &mut impl Rng, alg: Option<Alg>) -> Poly {
        let mut p = Poly::zero(nvars);
        for m in monomials(nvars, d) {
            if rng.gen_bool(0.5) {
                let y = rng.gen_range(-3..=3);
                let c = match alg {
                    Some(a) if !a.is_split() => a.from_ints(y, rng.gen_range(-2..=2)),
                    _ => QScalar::from_i64(y),
                };
                p.add_term(m, c);
            }
        }
        p
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let neg = c.sign() < 0;
            let mag = if neg { -c } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{e}", names[i]) })
                .collect();
            let coeff = if mag.is_base() { mag.to_string() } else { format!("({mag})") };
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => out.push_str(&coeff),
                (false, true) => out.push_str(&mono.join("*")),
                (false, false) => {
                    out.push_str(&coeff);
                    out.push('*');
                    out.push_str(&mono.join("*"));
                }
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

/// The ring map `S → S_τ`: `x_α ↦ Σ_i P_iα X_i` for the fold matrix `P`. In the
/// split case coefficients additionally pass through `p: l → k`.
pub fn pi_tau_hom(f: &Poly, fold_matrix: &Matrix, alg: Alg) -> Result<Poly> {
    let g = f.substitute_linear(fold_matrix)?;
    if alg.is_split() {
        Ok(g.map_coeffs(|c| {
            if c.is_base() {
                c.clone()
            } else {
                QScalar::base(c.project(Projection::PSplit).expect("split algebra projects"))
            }
        }))
    } else {
        Ok(g)
    }
}

/// `s_i` acting on `S` in simple-root variables.
pub fn simple_reflection_poly(f: &Poly, cartan: &[Vec<QScalar>], i: usize) -> Poly {
    let n = f.nvars();
    if f.degree().unwrap_or(0) <= 1 {
        // Σ c_j x_j ↦ Σ c_j x_j - (Σ_j c_j A_ij) x_i
        let mut shift = QScalar::zero();
        for (m, c) in f.terms() {
            if let Some(j) = m.0.iter().position(|&e| e == 1) {
                if !cartan[i][j].is_zero() {
                    shift += &(c * &cartan[i][j]);
                }
            }
        }
        let mut out = f.clone();
        out.add_term(Mono::var(n, i), -shift);
        return out;
    }
    let images: Vec<Poly> = (0..n)
        .map(|j| {
            let mut p = Poly::var(n, j);
            p.add_term(Mono::var(n, i), -&cartan[i][j]);
            p
        })
        .collect();
    f.substitute(&images).expect("dimensions match")
}
