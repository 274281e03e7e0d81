//! Construction and certification of higgledy-piggledy sets of subspaces in
//! finite projective spaces, and the codes, saturating sets and resolving
//! sets derived from them.

pub mod coding;
pub mod constructions;
pub mod field;
pub mod higgledy;
pub mod io;
pub mod report;
pub(crate) mod linalg;
pub mod resolving;
pub mod search;
pub mod space;

pub use field::{Field, FieldElement, FieldError};
pub use space::{gaussian_binomial, ProjSpace, SpaceError, Subspace};
pub use higgledy::{
    coverage, find_transversal, is_higgledy_piggledy, lower_bound, lower_bound_lines, verify_strong_blocking, Arrangement,
    Certificate, Coverage, Method, MethodChoice, Provenance, Verdict, Witness,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/searches.md")]
    mod searches {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/resolving.md")]
    mod resolving {}
    #[doc = include_str!("../../../book/src/files.md")]
    mod files {}
}
