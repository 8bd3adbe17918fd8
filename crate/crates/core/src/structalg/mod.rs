//! Structure algebras of moment graphs: sections and the GKM conditions,
//! characteristic classes, the Borel map, the twisted action, `ι*`, graded
//! dimensions and parabolic invariants.

mod graded;
mod invariants;
mod section;

pub use graded::{GradedReport, GradedStructure, DEFAULT_UNKNOWN_BOUND};
pub use invariants::{
    invariants_fixed, invariants_gen, invariants_reynolds, parabolic_group, reynolds, REYNOLDS_LIMIT,
};
pub use section::{
    borel_map, char_class, check_section, check_section_edges, evaluate, iota_star, iota_star_expr,
    iota_star_expr_unchecked, iota_star_unchecked, iota_star_with, twisted_action, EvalTree, Evaluator, Section,
    SectionExpr, SectionReport, Violation,
};
