//! Exact computations with twisted quadratic foldings of root systems:
//! quadratic-algebra arithmetic, Weil restrictions, folded root systems,
//! moment graphs of parabolic orbits and their structure algebras.

pub mod error;
pub mod folding;
pub mod formats;
pub mod linalg;
pub mod momentgraph;
pub mod poly;
pub mod rootsys;
pub mod scalars;
pub mod structalg;
pub mod verify;
pub mod weilmod;

pub use error::{FoldError, Result};
pub use scalars::{Alg, Mode, QScalar, QuadraticAlgebra, Rational};
