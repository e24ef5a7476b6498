//! Finite fields, the message space `V` and its `F_p`-subgroups.

pub mod field;
pub mod space;
pub mod subgroup;

pub use field::{ff_add, ff_mul, FieldElement, FieldSpec};
pub use space::{FpSpace, VSpace, Vector};
pub use subgroup::{
    count_subgroups, echelonize, echelonize_points, enumerate_subgroups, gaussian_binomial, is_closed_under_addition,
    EnumBudget, SpanBuilder, SubgroupBasis, SubgroupIter,
};
