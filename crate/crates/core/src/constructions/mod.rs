//! Constructions of higgledy-piggledy sets.
//!
//! Every public constructor returns a [`Certified`] arrangement: the
//! arrangement has been run through the verifier before it is handed out.

use thiserror::Error;

use crate::field::FieldError;
use crate::higgledy::{is_higgledy_piggledy, Arrangement, ArrangementError, Certificate, MethodChoice, Provenance};
use crate::search::{self, SearchOutcome, SearchTemplate};
use crate::space::SpaceError;

mod basic;
mod pg4;
mod pg5;
mod spread;
mod subline;

pub use basic::{dualize, project, tetrahedron};
pub use pg4::{construct_pg4_six_lines, construct_pg4_six_planes, six_lines_with_trace, SixLineTrace};
pub use pg5::{
    construct_pg5_eight_planes, construct_pg5_seven_lines, construct_pg5_seven_solids, eight_planes_with_trace,
    seven_planes_spread_search, seven_planes_spread_search_with, EightPlaneTrace,
    SEVEN_PLANES_BUDGET,
};
pub use spread::{construct_pg3_four_lines, field_reduction, SpreadElementMap};
pub use subline::{in_linear_set_of_rank_at_most, subline_through, subline_triples_search, Subline};

/// Names accepted by [`construct_named`], plus `subline_triples`, which
/// yields sublines rather than an arrangement.
pub const NAMES: [&str; 9] = [
    "pg3_four_lines",
    "pg4_six_lines",
    "pg4_six_planes",
    "pg5_seven_lines",
    "pg5_seven_solids",
    "pg5_eight_planes",
    "tetrahedron",
    "subline_triples",
    "seven_planes_spread",
];

/// Builds the named arrangement over GF(q). `seed` replaces the master seed
/// of searched constructions and is ignored by deterministic ones; `n` is
/// the dimension for `tetrahedron`.
pub fn construct_named(name: &str, q: u32, seed: Option<u64>, n: usize) -> Result<Certified, ConstructionError> {
    match name {
        "pg3_four_lines" => construct_pg3_four_lines(q),
        "pg4_six_lines" => pg4::six_lines_seeded(q, seed),
        "pg4_six_planes" => pg4::six_planes_seeded(q, seed),
        "pg5_seven_lines" => pg5::seven_lines_seeded(q, seed),
        "pg5_seven_solids" => pg5::seven_solids_seeded(q, seed),
        "pg5_eight_planes" => pg5::eight_planes_seeded(q, seed),
        "tetrahedron" => tetrahedron(&crate::space::ProjSpace::new(n, crate::field::Field::gf(q)?)?),
        "seven_planes_spread" => {
            seven_planes_spread_search_with(q, SEARCH_BUDGET, seed.unwrap_or(pg5::SEVEN_PLANES_SEED))?
                .ok_or(ConstructionError::SearchBudgetExhausted { trials: SEARCH_BUDGET })
        }
        "subline_triples" => Err(ConstructionError::InvalidParameter(
            "subline_triples yields sublines, use subline_triples_search".into(),
        )),
        _ => Err(ConstructionError::UnknownName(name.to_string())),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("unknown construction {0:?}")]
    UnknownName(String),
    #[error("the projection centre lies in the hyperplane")]
    PointInHyperplane,
    #[error("the projection centre lies on element {0}")]
    PointOnElement(usize),
    #[error("extension field of order {0} exceeds 2^20")]
    FieldTooLarge(u64),
    #[error("the three points are not pairwise distinct")]
    DegenerateTriple,
    #[error("search budget of {trials} trials exhausted")]
    SearchBudgetExhausted { trials: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no admissible choice for {0}")]
    NoAdmissibleChoice(String),
    #[error("constructed set failed certification: {0}")]
    NotCertified(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

/// An arrangement together with the certificate that accepted it.
#[derive(Clone, Debug)]
pub struct Certified {
    pub arrangement: Arrangement,
    pub certificate: Certificate,
}

/// Verifies `arr` and fails unless it is higgledy-piggledy.
pub(crate) fn certify(arr: Arrangement, what: &str) -> Result<Certified, ConstructionError> {
    let certificate = is_higgledy_piggledy(&arr, MethodChoice::Auto);
    if !certificate.is_higpig() {
        return Err(ConstructionError::NotCertified(what.to_string()));
    }
    Ok(Certified {
        arrangement: arr,
        certificate,
    })
}

/// Trials allowed to the seeded search fallbacks.
pub const SEARCH_BUDGET: u64 = 1_000_000;

/// Runs `template` and turns its winner into a certified arrangement whose
/// provenance records the master seed and the winning trial.
pub(crate) fn by_search(template: &SearchTemplate, what: &str) -> Result<Certified, ConstructionError> {
    match search::run(template)? {
        SearchOutcome::Found {
            arrangement,
            certificate,
            trial,
            ..
        } => {
            if !certificate.is_higpig() {
                return Err(ConstructionError::NotCertified(what.to_string()));
            }
            let arrangement = arrangement.with_provenance(Provenance {
                construction: what.to_string(),
                q: template.space.q(),
                seed: Some(template.seed),
                choices: vec![trial],
            });
            Ok(Certified {
                arrangement,
                certificate,
            })
        }
        SearchOutcome::Exhausted { trials } => Err(ConstructionError::SearchBudgetExhausted { trials }),
    }
}
