//! The Weil restriction `U = R_{l/k} 𝒰`, its τ-operator and τ-form, and the
//! projection onto the τ-eigenspace.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{FoldError, Result};
use crate::linalg::Matrix;
use crate::scalars::{Alg, QScalar, Rational};

/// A free `l`-module of rank `n`, seen as a `k`-module of rank `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldedSpace {
    n: usize,
    alg: Alg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Tau,
    Sigma,
}

/// An element `((y1, y1'), ..., (yn, yn'))` of `U`, stored flat.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UVector {
    coords: Vec<Rational>,
}

/// An element of `𝒰` (equivalently of `U_τ`) in `l`-coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LVector {
    coords: Vec<QScalar>,
}

impl FoldedSpace {
    pub fn new(n: usize, alg: Alg) -> Result<Self> {
        if n == 0 {
            return Err(FoldError::Config("a folded space needs rank n >= 1".into()));
        }
        Ok(FoldedSpace { n, alg })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alg(&self) -> Alg {
        self.alg
    }

    pub fn zero(&self) -> UVector {
        UVector { coords: vec![Rational::zero(); 2 * self.n] }
    }

    pub fn check(&self, u: &UVector) -> Result<()> {
        if u.coords.len() != 2 * self.n {
            return Err(FoldError::Dimension { expected: 2 * self.n, found: u.coords.len() });
        }
        Ok(())
    }

    /// `(y, y') ↦ (-c2 y', y + c1 y')` in every slot, i.e. multiplication by τ.
    pub fn tau_op(&self, u: &UVector) -> UVector {
        let (c1, c2) = (self.alg.c1(), self.alg.c2());
        let mut out = Vec::with_capacity(u.coords.len());
        for pair in u.coords.chunks(2) {
            out.push(-(c2 * &pair[1]));
            out.push(&pair[0] + &(c1 * &pair[1]));
        }
        UVector { coords: out }
    }

    /// `B_τ(u, v) = pr_τ(u_l · v_l)`, and `B_σ = pr_σ(u_l · v_l)`.
    pub fn b_form(&self, u: &UVector, v: &UVector, kind: FormKind) -> Rational {
        match kind {
            FormKind::Tau => {
                let c2 = self.alg.c2();
                let mut acc = Rational::zero();
                for (a, b) in u.coords.chunks(2).zip(v.coords.chunks(2)) {
                    acc += &(&a[0] * &b[0]);
                    acc -= &(c2 * &(&a[1] * &b[1]));
                }
                acc
            }
            FormKind::Sigma => {
                let prod = self.pi_tau(u).dot(&self.pi_tau(v));
                prod.conj().y().clone()
            }
        }
    }

    pub fn b_tau(&self, u: &UVector, v: &UVector) -> Rational {
        self.b_form(u, v, FormKind::Tau)
    }

    /// `u ↦ u_l`, the coordinate form of `π_τ(u)` under `𝒰 ≅ U_τ`.
    pub fn pi_tau(&self, u: &UVector) -> LVector {
        LVector {
            coords: u.coords.chunks(2).map(|p| self.alg.elem(p[0].clone(), p[1].clone())).collect(),
        }
    }

    /// The vector a folded root system lives on: `π_τ(u)` in the non-split case
    /// and `p ∘ π_τ(u)` in the split case. The latter lies in the switch-invariant
    /// subspace and is recorded by one coordinate per slot, `(y + y')/2`.
    pub fn fold_vector(&self, u: &UVector) -> LVector {
        if !self.alg.is_split() {
            return self.pi_tau(u);
        }
        let half = Rational::new(1, 2);
        LVector {
            coords: u.coords.chunks(2).map(|p| QScalar::base(&(&p[0] + &p[1]) * &half)).collect(),
        }
    }

    pub fn from_lvector(&self, x: &LVector) -> UVector {
        let mut coords = Vec::with_capacity(2 * x.coords.len());
        for c in &x.coords {
            coords.push(c.y().clone());
            coords.push(c.yp().clone());
        }
        UVector { coords }
    }

    /// The `U_τ`/`U_σ` components `a = (y + τy')/(τ - σ)`, `b = (y + σy')/(σ - τ)`.
    pub fn eigen_split(&self, z: &UVector) -> Result<(LVector, LVector)> {
        let tau = self.alg.tau();
        let sigma = self.alg.sigma();
        let d = (&tau - &sigma).inv()?;
        let mut a = Vec::with_capacity(self.n);
        let mut b = Vec::with_capacity(self.n);
        for p in z.coords.chunks(2) {
            let y = QScalar::base(p[0].clone());
            let yp = QScalar::base(p[1].clone());
            a.push(&(&y + &(&tau * &yp)) * &d);
            b.push(-(&(&y + &(&sigma * &yp)) * &d));
        }
        Ok((LVector { coords: a }, LVector { coords: b }))
    }

    /// Inverse of [`eigen_split`](Self::eigen_split): `x = -σa - τb`, `x' = a + b`.
    pub fn eigen_join(&self, a: &LVector, b: &LVector) -> Result<UVector> {
        let tau = self.alg.tau();
        let sigma = self.alg.sigma();
        let mut coords = Vec::with_capacity(2 * self.n);
        for (ai, bi) in a.coords.iter().zip(&b.coords) {
            let x = -(&(&sigma * ai) + &(&tau * bi));
            let xp = ai + bi;
            if !x.is_base() || !xp.is_base() {
                return Err(FoldError::Invariant("eigen components do not recombine into U".into()));
            }
            coords.push(x.y().clone());
            coords.push(xp.y().clone());
        }
        Ok(UVector { coords })
    }

    /// `u` is τ-rational iff `u_l · u_l` lies in `k`.
    pub fn is_tau_rational(&self, u: &UVector) -> Result<bool> {
        if u.is_zero() {
            return Err(FoldError::Degenerate("τ-rationality of the zero vector".into()));
        }
        let x = self.pi_tau(u);
        Ok(x.dot(&x).is_base())
    }

    /// Coordinatewise conjugation ρ.
    pub fn conj(&self, u: &UVector) -> UVector {
        self.from_lvector(&self.pi_tau(u).conj())
    }

    /// The `2n x 2n` matrix of 𝒯 over `k`.
    pub fn tau_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(2 * self.n, 2 * self.n);
        for s in 0..self.n {
            let (i, j) = (2 * s, 2 * s + 1);
            m[(i, j)] = QScalar::base(-self.alg.c2());
            m[(j, i)] = QScalar::one();
            m[(j, j)] = QScalar::base(self.alg.c1().clone());
        }
        m
    }

    /// The `B_τ`-orthogonal reflection in `alpha` as a matrix over `k`.
    pub fn reflection_matrix(&self, alpha: &UVector) -> Result<Matrix> {
        let nn = self.b_tau(alpha, alpha);
        if nn.is_zero() {
            return Err(FoldError::Degenerate("reflection in an isotropic or zero vector".into()));
        }
        let dim = 2 * self.n;
        let mut m = Matrix::identity(dim);
        // column j is r(e_j) = e_j - 2 B(alpha, e_j)/B(alpha, alpha) alpha
        let two_over = &Rational::from_integer(2) / &nn;
        let c2 = self.alg.c2();
        for j in 0..dim {
            let b = if j % 2 == 0 { alpha.coords[j].clone() } else { -(c2 * &alpha.coords[j]) };
            if b.is_zero() {
                continue;
            }
            let f = &two_over * &b;
            for i in 0..dim {
                let v = &m[(i, j)] - &QScalar::base(&f * &alpha.coords[i]);
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    /// `r_α(u) = u - α^∨(u) α` with `α^∨(u) = 2 B_τ(α, u) / B_τ(α, α)`.
    pub fn reflect(&self, alpha: &UVector, u: &UVector) -> Result<UVector> {
        let nn = self.b_tau(alpha, alpha);
        if nn.is_zero() {
            return Err(FoldError::Degenerate("reflection in an isotropic or zero vector".into()));
        }
        let c = &(&Rational::from_integer(2) * &self.b_tau(alpha, u)) / &nn;
        Ok(u.sub(&alpha.scale(&c)))
    }

    pub fn apply_matrix(&self, m: &Matrix, u: &UVector) -> Result<UVector> {
        let v: Vec<QScalar> = u.coords.iter().cloned().map(QScalar::base).collect();
        let out = m.apply(&v)?;
        if !out.iter().all(QScalar::is_base) {
            return Err(FoldError::Invariant("matrix over k produced a τ-component".into()));
        }
        Ok(UVector { coords: out.into_iter().map(|x| x.y().clone()).collect() })
    }
}

impl UVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        UVector { coords }
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        UVector {
            coords: pairs
                .iter()
                .flat_map(|&(a, b)| [Rational::from_integer(a), Rational::from_integer(b)])
                .collect(),
        }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn slots(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Rational::is_zero)
    }

    pub fn add(&self, o: &UVector) -> UVector {
        UVector { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &UVector) -> UVector {
        UVector { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> UVector {
        UVector { coords: self.coords.iter().map(|a| a * c).collect() }
    }

    pub fn neg(&self) -> UVector {
        UVector { coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn as_qscalars(&self) -> Vec<QScalar> {
        self.coords.iter().cloned().map(QScalar::base).collect()
    }
}

impl LVector {
    pub fn new(coords: Vec<QScalar>) -> Self {
        LVector { coords }
    }

    pub fn coords(&self) -> &[QScalar] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<QScalar> {
        self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(QScalar::is_zero)
    }

    /// The `l`-bilinear dot product `Σ x_i x̂_i`.
    pub fn dot(&self, o: &LVector) -> QScalar {
        let mut acc = QScalar::zero();
        for (a, b) in self.coords.iter().zip(&o.coords) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
        acc
    }

    pub fn add(&self, o: &LVector) -> LVector {
        LVector { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &LVector) -> LVector {
        LVector { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &QScalar) -> LVector {
        LVector { coords: self.coords.iter().map(|a| a * c).collect() }
    }

    pub fn conj(&self) -> LVector {
        LVector { coords: self.coords.iter().map(QScalar::conj).collect() }
    }

    /// The reflection of `self` in `alpha` with respect to the `l`-dot product.
    pub fn reflect_in(&self, alpha: &LVector) -> Result<LVector> {
        let nn = alpha.dot(alpha);
        let c = (&QScalar::from_i64(2) * &alpha.dot(self)).try_div(&nn)?;
        Ok(self.sub(&alpha.scale(&c)))
    }
}
