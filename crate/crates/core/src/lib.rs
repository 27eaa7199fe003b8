//! Generalised Paley graphs over finite fields, the cyclotomic association
//! schemes they come from, and exact automorphism-group computations.

pub mod arith;
pub mod autgroup;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod gpaley;
pub mod graph;
pub mod perm;
pub mod search;

pub use autgroup::{
    automorphism_group, color_automorphism_group, verify_theorem, CheckName, CheckResult, VerificationReport,
    VerifyOptions,
};
pub use cyclotomic::{CheckMode, CyclotomicScheme, IntersectionTable};
pub use error::{Error, ParamViolation, Result};
pub use field::{build_field, build_field_bounded, FieldElement, FieldSpec, DEFAULT_MAX_Q};
pub use gpaley::{Classification, ClassificationRecord, GPaleyParams, ParamSpec, Variant, SCHEMA};
pub use graph::{is_isomorphic, Graph};
pub use perm::{Permutation, PermutationGroup};
pub use search::SearchOptions;
