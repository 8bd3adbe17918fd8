//! Root systems, root data realized in Weil restrictions, and the built-in
//! catalog of folded realizations.

mod catalog;
mod datum;
mod system;

pub use catalog::{catalog_build, parse_theta, Family, FOLDED_FAMILIES};
pub use datum::{RootDatum, TauPartition};
pub use system::{cartan_a, gram_from_cartan, names, RootSystem, DEFAULT_ROOT_BOUND};
