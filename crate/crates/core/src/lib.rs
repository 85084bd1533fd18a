//! Lightlike fronts, focal curves, BR-caustics and BR-Maxwell sets of world
//! sheets in anti-de Sitter 3-space, with singularity classification of the
//! momentary fronts.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod caustic_maxwell;
pub mod expr;
pub mod fixtures;
pub mod frames;
pub mod fronts;
pub mod jet;
pub mod oracle;
pub mod pseudo_metric;
pub mod singularities;
pub mod tolerances;
pub mod worldsheet;

pub use expr::{parse, Expr, ExprError, ExprVector4, Var};
pub use pseudo_metric::{CausalType, Hyperplane, SemiVector};
pub use tolerances::{SampleGrid, Tolerances};
pub use worldsheet::{ArcLengthMode, MomentaryCurve, ValidationReport, WorldSheet};
