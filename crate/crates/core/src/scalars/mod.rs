//! Exact scalars: the base ring `k = Z[1/P]` (as rationals) and the quadratic
//! algebra `l = k(τ)`.

mod quadratic;
mod rational;

pub use quadratic::{Alg, AlgebraHeader, Mode, Projection, QScalar, QScalarJson, QuadraticAlgebra};
pub use rational::Rational;
