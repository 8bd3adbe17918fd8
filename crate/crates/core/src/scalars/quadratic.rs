//! The quadratic separable algebra `l = k[x]/(x^2 - c1 x + c2)` and its
//! elements `y + τ y'` written in the τ-basis `{1, τ}`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{FoldError, Result};

/// Interned algebras are referenced by `&'static` pointer.
pub type Alg = &'static QuadraticAlgebra;

/// Coefficient-ring mode for divisibility and inversion verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Work over the fraction field.
    #[default]
    Field,
    /// Certify every quotient back into `k = Z[1/P]` (resp. `l`).
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    PrTau,
    PrSigma,
    PSplit,
}

/// `l = k[x]/(x^2 - c1 x + c2)` over `k = Z[1/P]`.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct QuadraticAlgebra {
    c1: Rational,
    c2: Rational,
    disc: Rational,
    split: bool,
    primes: Vec<u64>,
}

static REGISTRY: OnceLock<Mutex<Vec<Alg>>> = OnceLock::new();

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn is_rational_square(r: &Rational) -> bool {
    if r.signum() < 0 {
        return false;
    }
    let sq = |n: &BigInt| {
        let s = n.sqrt();
        &s * &s == *n
    };
    sq(&r.numer()) && sq(&r.denom())
}

impl QuadraticAlgebra {
    /// Validates and interns the algebra with the given polynomial and prime set.
    pub fn new(c1: Rational, c2: Rational, primes: &[u64]) -> Result<Alg> {
        let mut primes = primes.to_vec();
        primes.sort_unstable();
        primes.dedup();
        if let Some(p) = primes.iter().find(|p| !is_prime(**p)) {
            return Err(FoldError::Config(format!("{p} is not a prime")));
        }
        let in_k = |r: &Rational| r.denominator_supported_on(&primes);
        if !in_k(&c1) || !in_k(&c2) {
            return Err(FoldError::Config("c1 and c2 must lie in k".into()));
        }
        let disc = &(&c1 * &c1) - &(Rational::from_integer(4) * &c2);
        if c2.is_zero() || disc.is_zero() {
            return Err(FoldError::Config("p(x) must be separable with c2 != 0".into()));
        }
        let unit = |r: &Rational| r.recip().map(|i| in_k(&i)).unwrap_or(false);
        if !unit(&c2) {
            return Err(FoldError::Config(format!("c2 = {c2} is not invertible in k")));
        }
        if !unit(&disc) {
            return Err(FoldError::Config(format!("discriminant {disc} is not invertible in k")));
        }
        let split = is_rational_square(&disc);
        if split {
            if !(c1.is_zero() && c2 == -Rational::one()) {
                return Err(FoldError::Config(
                    "split algebras must be presented as x^2 - 1 (c1 = 0, c2 = -1)".into(),
                ));
            }
            if !primes.contains(&2) {
                return Err(FoldError::Config("split case requires 2 to be invertible in k".into()));
            }
        } else if disc.signum() <= 0 {
            return Err(FoldError::Config("non-split case requires a positive discriminant".into()));
        }
        let candidate = QuadraticAlgebra { c1, c2, disc, split, primes };
        let registry = REGISTRY.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = registry.lock().expect("algebra registry poisoned");
        if let Some(existing) = guard.iter().find(|a| ***a == candidate) {
            return Ok(existing);
        }
        let leaked: Alg = Box::leak(Box::new(candidate));
        guard.push(leaked);
        Ok(leaked)
    }

    /// The golden-section algebra `x^2 - x - 1`.
    pub fn golden(primes: &[u64]) -> Result<Alg> {
        Self::new(Rational::one(), -Rational::one(), primes)
    }

    /// The split algebra `x^2 - 1`, i.e. `k x k`.
    pub fn split(primes: &[u64]) -> Result<Alg> {
        Self::new(Rational::zero(), -Rational::one(), primes)
    }

    pub fn c1(&self) -> &Rational {
        &self.c1
    }

    pub fn c2(&self) -> &Rational {
        &self.c2
    }

    pub fn disc(&self) -> &Rational {
        &self.disc
    }

    pub fn is_split(&self) -> bool {
        self.split
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn elem(&'static self, y: Rational, yp: Rational) -> QScalar {
        QScalar { y, yp, alg: Some(self) }
    }

    pub fn from_ints(&'static self, y: i64, yp: i64) -> QScalar {
        self.elem(Rational::from_integer(y), Rational::from_integer(yp))
    }

    pub fn tau(&'static self) -> QScalar {
        self.from_ints(0, 1)
    }

    /// `σ = c1 - τ`.
    pub fn sigma(&'static self) -> QScalar {
        self.elem(self.c1.clone(), -Rational::one())
    }

    /// The scalar a QScalar coefficient is multiplied by when a variable for
    /// `T α` is folded onto `ᾱ`: τ in the non-split case, `p(τ) = 1` in the split case.
    pub fn fold_factor(&'static self) -> QScalar {
        if self.split {
            QScalar::one()
        } else {
            self.tau()
        }
    }

    /// Membership of a base scalar in `k = Z[1/P]`.
    pub fn base_contains(&self, r: &Rational) -> bool {
        r.denominator_supported_on(&self.primes)
    }

    /// Membership of an element in `l = k ⊕ kτ`.
    pub fn contains(&self, a: &QScalar) -> bool {
        self.base_contains(&a.y) && self.base_contains(&a.yp)
    }

    /// `|W|`-style invertibility of an integer in `k`.
    pub fn integer_invertible(&self, n: u64) -> bool {
        n != 0 && Rational::new(1, n as i64).denominator_supported_on(&self.primes)
    }
}

impl fmt::Display for QuadraticAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^2 - ({})x + ({}) over Z[1/{:?}]", self.c1, self.c2, self.primes)
    }
}

/// JSON header describing an algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraHeader {
    pub c1: Rational,
    pub c2: Rational,
    pub primes: Vec<u64>,
}

impl AlgebraHeader {
    pub fn of(alg: Alg) -> Self {
        AlgebraHeader { c1: alg.c1.clone(), c2: alg.c2.clone(), primes: alg.primes.clone() }
    }

    pub fn resolve(&self) -> Result<Alg> {
        QuadraticAlgebra::new(self.c1.clone(), self.c2.clone(), &self.primes)
    }
}

/// An element `y + τ y'`. Elements with `y' = 0` lie in `k` and may omit the
/// algebra; every element with `y' != 0` carries it.
#[derive(Clone)]
pub struct QScalar {
    y: Rational,
    yp: Rational,
    alg: Option<Alg>,
}

fn merge(a: &QScalar, b: &QScalar) -> Result<Option<Alg>> {
    match (a.alg, b.alg) {
        (Some(x), Some(y)) if !std::ptr::eq(x, y) => {
            if !a.yp.is_zero() && !b.yp.is_zero() {
                Err(FoldError::AlgebraMismatch)
            } else if a.yp.is_zero() {
                Ok(Some(y))
            } else {
                Ok(Some(x))
            }
        }
        (x, y) => Ok(x.or(y)),
    }
}

impl QScalar {
    /// An element of the base ring `k`.
    pub fn base(y: Rational) -> Self {
        QScalar { y, yp: Rational::zero(), alg: None }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::base(Rational::from_integer(n))
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn yp(&self) -> &Rational {
        &self.yp
    }

    pub fn alg(&self) -> Option<Alg> {
        self.alg
    }

    pub fn with_alg(mut self, alg: Alg) -> Result<Self> {
        if let Some(a) = self.alg {
            if !std::ptr::eq(a, alg) && !self.yp.is_zero() {
                return Err(FoldError::AlgebraMismatch);
            }
        }
        self.alg = Some(alg);
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.y.is_zero() && self.yp.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.y.is_one() && self.yp.is_zero()
    }

    /// True iff the element lies in `k` (zero τ-component).
    pub fn is_base(&self) -> bool {
        self.yp.is_zero()
    }

    fn need_alg(&self) -> Alg {
        self.alg.expect("QScalar with nonzero τ-part must carry its algebra")
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let alg = merge(self, other)?;
        Ok(QScalar { y: &self.y + &other.y, yp: &self.yp + &other.yp, alg })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let alg = merge(self, other)?;
        Ok(QScalar { y: &self.y - &other.y, yp: &self.yp - &other.yp, alg })
    }

    /// `(y,y')(ŷ,ŷ') = (yŷ - c2 y'ŷ', yŷ' + y'ŷ + c1 y'ŷ')`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let alg = merge(self, other)?;
        if self.yp.is_zero() {
            return Ok(QScalar { y: &self.y * &other.y, yp: &self.y * &other.yp, alg });
        }
        if other.yp.is_zero() {
            return Ok(QScalar { y: &self.y * &other.y, yp: &self.yp * &other.y, alg });
        }
        let a = alg.expect("nonzero τ-parts imply an algebra");
        let ypyp = &self.yp * &other.yp;
        let y = &(&self.y * &other.y) - &(&a.c2 * &ypyp);
        let yp = &(&(&self.y * &other.yp) + &(&self.yp * &other.y)) + &(&a.c1 * &ypyp);
        Ok(QScalar { y, yp, alg })
    }

    /// The involution ρ swapping τ and σ: `(y, y') ↦ (y + c1 y', -y')`.
    pub fn conj(&self) -> Self {
        if self.yp.is_zero() {
            return self.clone();
        }
        let a = self.need_alg();
        QScalar { y: &self.y + &(&a.c1 * &self.yp), yp: -&self.yp, alg: self.alg }
    }

    /// `N(a) = a ρ(a) = y^2 + c1 y y' + c2 y'^2`.
    pub fn norm(&self) -> Rational {
        if self.yp.is_zero() {
            return &self.y * &self.y;
        }
        let a = self.need_alg();
        &(&(&self.y * &self.y) + &(&(&a.c1 * &self.y) * &self.yp)) + &(&a.c2 * &(&self.yp * &self.yp))
    }

    /// Inverse over the fraction field.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(FoldError::DivisionByZero);
        }
        if self.yp.is_zero() {
            return Ok(QScalar { y: self.y.recip()?, yp: Rational::zero(), alg: self.alg });
        }
        let n = self.norm();
        if n.is_zero() {
            return Err(FoldError::NotInvertible(self.to_string()));
        }
        let c = self.conj();
        Ok(QScalar { y: &c.y / &n, yp: &c.yp / &n, alg: self.alg })
    }

    /// Inverse, certified to lie in `l` when `mode` is integral.
    pub fn inv_in(&self, mode: Mode) -> Result<Self> {
        let inv = self.inv()?;
        if mode == Mode::Integral {
            let member = match self.alg {
                Some(a) => a.contains(&inv),
                None => inv.y.is_integer(),
            };
            if !member {
                return Err(FoldError::NotInvertible(self.to_string()));
            }
        }
        Ok(inv)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inv()?)
    }

    /// Exact sign of the real number `y + τ y'` under the embedding
    /// `τ = (c1 + √D)/2`. In the split case this is the sign of `p(a) = y + y'`.
    pub fn sign(&self) -> i32 {
        if self.yp.is_zero() {
            return self.y.signum();
        }
        let alg = self.need_alg();
        if alg.split {
            return (&self.y + &self.yp).signum();
        }
        // y + τy' = A + B√D with A = y + c1 y'/2, B = y'/2.
        let half = Rational::new(1, 2);
        let a = &self.y + &(&(&alg.c1 * &self.yp) * &half);
        let b = &self.yp * &half;
        let (sa, sb) = (a.signum(), b.signum());
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        match (&a * &a).cmp(&(&(&b * &b) * &alg.disc)) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn project(&self, kind: Projection) -> Result<Rational> {
        match kind {
            Projection::PrTau => Ok(self.y.clone()),
            Projection::PrSigma => Ok(self.conj().y),
            Projection::PSplit => match self.alg {
                Some(a) if !a.split => {
                    Err(FoldError::Mode("p is only defined on split algebras".into()))
                }
                _ => Ok(&self.y + &self.yp),
            },
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QScalar { y: &self.y * r, yp: &self.yp * r, alg: self.alg }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QScalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Approximate real value, for display and test oracles only.
    pub fn to_f64(&self) -> f64 {
        if self.yp.is_zero() {
            return self.y.to_f64();
        }
        let alg = self.need_alg();
        if alg.split {
            return (&self.y + &self.yp).to_f64();
        }
        let tau = (alg.c1.to_f64() + alg.disc.to_f64().sqrt()) / 2.0;
        self.y.to_f64() + tau * self.yp.to_f64()
    }

    pub fn to_json(&self) -> QScalarJson {
        QScalarJson { y: self.y.clone(), yp: self.yp.clone() }
    }
}

impl PartialEq for QScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.y != other.y || self.yp != other.yp {
            return false;
        }
        if self.yp.is_zero() {
            return true;
        }
        match (self.alg, other.alg) {
            (Some(a), Some(b)) => std::ptr::eq(a, b),
            _ => true,
        }
    }
}

impl Eq for QScalar {}

impl Hash for QScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.y.hash(state);
        self.yp.hash(state);
    }
}

impl Zero for QScalar {
    fn zero() -> Self {
        QScalar::base(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        QScalar::is_zero(self)
    }
}

impl One for QScalar {
    fn one() -> Self {
        QScalar::base(Rational::one())
    }
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl From<Rational> for QScalar {
    fn from(r: Rational) -> Self {
        QScalar::base(r)
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::from_i64(n)
    }
}

macro_rules! qbinop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl<'a> $trait<&'a QScalar> for &'a QScalar {
            type Output = QScalar;
            fn $method(self, rhs: &'a QScalar) -> QScalar {
                self.$try(rhs).expect("mismatched quadratic algebras")
            }
        }
        impl $trait<QScalar> for QScalar {
            type Output = QScalar;
            fn $method(self, rhs: QScalar) -> QScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $method(self, rhs: &'a QScalar) -> QScalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<QScalar> for &'a QScalar {
            type Output = QScalar;
            fn $method(self, rhs: QScalar) -> QScalar {
                self.$method(&rhs)
            }
        }
    };
}

qbinop!(Add, add, try_add);
qbinop!(Sub, sub, try_sub);
qbinop!(Mul, mul, try_mul);

impl<'a> Div<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn div(self, rhs: &'a QScalar) -> QScalar {
        self.try_div(rhs).expect("division by a non-invertible element")
    }
}

impl Div<QScalar> for QScalar {
    type Output = QScalar;
    fn div(self, rhs: QScalar) -> QScalar {
        &self / &rhs
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { y: -&self.y, yp: -&self.yp, alg: self.alg }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, rhs: &QScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, rhs: &QScalar) {
        *self = &*self - rhs;
    }
}

impl Sum for QScalar {
    fn sum<I: Iterator<Item = QScalar>>(iter: I) -> Self {
        iter.fold(QScalar::zero(), |a, b| a + b)
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.y.is_zero(), self.yp.is_zero()) {
            (_, true) => write!(f, "{}", self.y),
            (true, false) => write!(f, "{}τ", self.yp),
            (false, false) => {
                if self.yp.signum() > 0 {
                    write!(f, "{}+{}τ", self.y, self.yp)
                } else {
                    write!(f, "{}{}τ", self.y, self.yp)
                }
            }
        }
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.y, self.yp)
    }
}

impl Serialize for QScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// On-disk form `{"y": "num/den", "yp": "num/den"}`; the algebra comes from the
/// enclosing document's header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QScalarJson {
    pub y: Rational,
    pub yp: Rational,
}

impl QScalarJson {
    pub fn resolve(&self, alg: Alg) -> QScalar {
        alg.elem(self.y.clone(), self.yp.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn golden() -> Alg {
        QuadraticAlgebra::golden(&[5]).unwrap()
    }

    fn split() -> Alg {
        QuadraticAlgebra::split(&[2]).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn golden_products() {
        let g = golden();
        assert_eq!(g.tau() * g.tau(), g.from_ints(1, 1));
        assert_eq!(g.from_ints(1, 1) * g.from_ints(1, 1), g.from_ints(2, 3));
    }

    #[test]
    fn split_zero_divisors() {
        let s = split();
        assert_eq!(s.from_ints(1, 1) * s.from_ints(1, -1), QScalar::zero());
        assert!(matches!(s.from_ints(1, 1).inv(), Err(FoldError::NotInvertible(_))));
    }

    #[test]
    fn inverses() {
        let g = golden();
        assert_eq!(g.tau().inv().unwrap(), g.from_ints(-1, 1));
        assert_eq!(QScalar::one().inv().unwrap(), QScalar::one());
        let d = g.tau() - g.sigma();
        assert_eq!(d, g.from_ints(-1, 2));
        assert_eq!(d.inv().unwrap(), g.elem(r(-1, 5), r(2, 5)));
        assert!(matches!(QScalar::zero().inv(), Err(FoldError::DivisionByZero)));
        // 2 is a unit in Z[1/5](τ) only over the fraction field
        assert!(QScalar::from_i64(2).inv_in(Mode::Integral).is_err());
        assert!(g.from_ints(5, 0).inv_in(Mode::Integral).is_ok());
        assert!(g.tau().inv_in(Mode::Integral).is_ok());
    }

    #[test]
    fn signs() {
        let g = golden();
        assert_eq!(g.sigma().sign(), -1);
        assert_eq!(g.tau().sign(), 1);
        assert_eq!(g.from_ints(-1, 2).sign(), 1);
        assert_eq!(QScalar::zero().sign(), 0);
        // 1 - τ^2 + τ = 0 exactly, i.e. (1, 0) + (1, 1)·(-1) + (0, 1) = 0
        assert_eq!((g.from_ints(1, 0) - g.tau() * g.tau() + g.tau()).sign(), 0);
        let s = split();
        assert_eq!(s.from_ints(1, -3).sign(), -1);
    }

    #[test]
    fn projections() {
        let g = golden();
        let s = split();
        assert_eq!(g.from_ints(3, 5).project(Projection::PrTau).unwrap(), Rational::from_integer(3));
        assert_eq!(g.from_ints(0, 7).project(Projection::PrTau).unwrap(), Rational::zero());
        assert_eq!(s.from_ints(1, 1).project(Projection::PSplit).unwrap(), Rational::from_integer(2));
        assert!(matches!(g.tau().project(Projection::PSplit), Err(FoldError::Mode(_))));
        // pr_σ = pr_τ ∘ ρ
        assert_eq!(g.from_ints(3, 5).project(Projection::PrSigma).unwrap(), Rational::from_integer(8));
    }

    #[test]
    fn tau_sigma_relations() {
        for a in [golden(), split()] {
            assert_eq!(a.tau() + a.sigma(), QScalar::base(a.c1().clone()));
            assert_eq!(a.tau() * a.sigma(), QScalar::base(a.c2().clone()));
        }
    }

    #[test]
    fn mismatched_algebras() {
        let g = golden();
        let other = QuadraticAlgebra::new(Rational::one(), Rational::from_integer(-3), &[3, 13]).unwrap();
        assert_eq!(g.tau().try_mul(&other.tau()), Err(FoldError::AlgebraMismatch));
        assert!(g.tau().try_mul(&other.from_ints(2, 0)).is_ok());
    }

    #[test]
    fn algebra_validation() {
        assert!(QuadraticAlgebra::golden(&[]).is_err()); // D = 5 not a unit in Z
        assert!(QuadraticAlgebra::split(&[3]).is_err()); // 2 must be invertible
        assert!(QuadraticAlgebra::new(Rational::zero(), Rational::one(), &[2]).is_err()); // D < 0
        assert!(QuadraticAlgebra::new(Rational::from_integer(3), Rational::from_integer(2), &[2, 3])
            .is_err()); // split, not normalized
        assert!(QuadraticAlgebra::golden(&[4]).is_err());
        assert!(std::ptr::eq(golden(), golden()));
    }

    fn arb_q(alg: Alg) -> impl Strategy<Value = QScalar> {
        (-40i64..40, 1i64..9, -40i64..40, 1i64..9)
            .prop_map(move |(a, b, c, d)| alg.elem(Rational::new(a, b), Rational::new(c, d)))
    }

    fn interval_sign(a: &QScalar) -> Option<i32> {
        // 60-digit decimal approximation of √5 bracketed from both sides
        let lo = 2.236_067_977_499_789_6_f64 - 1e-12;
        let hi = 2.236_067_977_499_789_6_f64 + 1e-12;
        let y = a.y().to_f64();
        let yp = a.yp().to_f64();
        let v1 = y + yp * (1.0 + lo) / 2.0;
        let v2 = y + yp * (1.0 + hi) / 2.0;
        let (l, h) = if v1 < v2 { (v1, v2) } else { (v2, v1) };
        if l > 1e-9 {
            Some(1)
        } else if h < -1e-9 {
            Some(-1)
        } else {
            None
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn ring_laws(a in arb_q(golden()), b in arb_q(golden()), c in arb_q(golden())) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), QScalar::one());
            }
        }

        #[test]
        fn split_ring_laws(a in arb_q(split()), b in arb_q(split()), c in arb_q(split())) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        }

        #[test]
        fn sign_matches_interval_oracle(a in arb_q(golden())) {
            if let Some(s) = interval_sign(&a) {
                prop_assert_eq!(a.sign(), s);
            }
        }
    }
}
