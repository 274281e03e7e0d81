//! Seven lines, seven solids, seven and eight planes in PG(5, q).

use crate::higgledy::{MethodChoice, Provenance};
use crate::search::{self, Constraint, SearchOutcome, SearchTemplate};
use crate::space::Subspace;

use super::spread::{field_reduction, SpreadElementMap};
use super::subline::{in_linear_set_of_rank_at_most, subline_through, Subline};
use super::{by_search, certify, dualize, Certified, ConstructionError, SEARCH_BUDGET};

const EIGHT_PLANES_SEED: u64 = 0x6569_6768_7435;
const SEVEN_LINES_SEED: u64 = 0x7365_7665_6e35;
pub(crate) const SEVEN_PLANES_SEED: u64 = 0x7370_7265_6164;

/// Trials allowed to [`seven_planes_spread_search`].
pub const SEVEN_PLANES_BUDGET: u64 = 20_000;

/// The points of PG(1, q^3) behind the eight planes and the sublines used
/// to choose them.
#[derive(Clone, Debug)]
pub struct EightPlaneTrace {
    /// b1, b2, b3.
    pub sublines: [Subline; 3],
    /// C, B12, B13, B23, D1, D2, D3, Q.
    pub points: Vec<Subspace>,
    pub choices: Vec<u64>,
}

fn first_other(sub: &Subline, avoid: &[&Subspace], what: &str) -> Result<Subspace, ConstructionError> {
    sub.points()
        .iter()
        .find(|p| !avoid.contains(p))
        .cloned()
        .ok_or_else(|| ConstructionError::NoAdmissibleChoice(what.to_string()))
}

/// Eight points of PG(1, q^3) on three sublines that pairwise share two
/// points, all through a common point C, plus a point Q that puts the
/// eight outside every linear set of rank at most 3. Needs q >= 3.
pub fn eight_planes_with_trace(q: u32) -> Result<(Certified, EightPlaneTrace), ConstructionError> {
    if q < 3 {
        return Err(ConstructionError::InvalidParameter("sublines of size q+1 >= 4 are needed".into()));
    }
    let map = field_reduction(1, 2, q)?;
    let line = map.small();
    let frame = [line.point(&[0, 1])?, line.point(&[1, 0])?, line.point(&[1, 1])?];
    let b1 = subline_through(&frame[0], &frame[1], &frame[2])?;
    let (c, b12, b13) = (frame[0].clone(), frame[1].clone(), frame[2].clone());
    let d1 = first_other(&b1, &[&c, &b12, &b13], "D1")?;
    let mut choices = vec![d1.index()];
    let b23 = line
        .enumerate(0)?
        .find(|p| !b1.contains(p))
        .ok_or_else(|| ConstructionError::NoAdmissibleChoice("B23".into()))?;
    choices.push(b23.index());
    let b2 = subline_through(&c, &b12, &b23)?;
    let d2 = first_other(&b2, &[&c, &b12, &b23], "D2")?;
    let b3 = subline_through(&c, &b13, &b23)?;
    let d3 = first_other(&b3, &[&c, &b13, &b23], "D3")?;
    choices.extend([d2.index(), d3.index()]);
    let mut points = vec![c, b12, b13, b23, d1, d2, d3];

    let mut q_point = None;
    for cand in line.enumerate(0)? {
        if points.contains(&cand) {
            continue;
        }
        let mut all = points.clone();
        all.push(cand.clone());
        if in_linear_set_of_rank_at_most(&all, 3)?.is_none() {
            q_point = Some(cand);
            break;
        }
    }
    let q_point = q_point.ok_or_else(|| ConstructionError::NoAdmissibleChoice("Q".into()))?;
    choices.push(q_point.index());
    points.push(q_point);

    let arr = map.arrangement(&points)?.with_provenance(Provenance {
        construction: "pg5_eight_planes".into(),
        q,
        seed: None,
        choices: choices.clone(),
    });
    let certified = certify(arr, "pg5_eight_planes")?;
    Ok((
        certified,
        EightPlaneTrace {
            sublines: [b1, b2, b3],
            points,
            choices,
        },
    ))
}

fn spread_template(map: &SpreadElementMap, cardinality: usize, seed: u64, budget: u64) -> SearchTemplate {
    SearchTemplate {
        space: map.big().clone(),
        k: map.k() as i64,
        cardinality,
        constraints: vec![Constraint::AllFromSpread {
            n_small: map.n_small(),
        }],
        method: MethodChoice::Auto,
        budget,
        seed,
    }
}

/// Eight pairwise disjoint planes of PG(5, q) in higgledy-piggledy
/// arrangement, all elements of one Desarguesian spread. Built from
/// sublines for q >= 3, found by search for q = 2 or when the subline
/// construction cannot be completed.
pub fn construct_pg5_eight_planes(q: u32) -> Result<Certified, ConstructionError> {
    eight_planes_seeded(q, None)
}

/// [`construct_pg5_eight_planes`] with the search seed replaced by `seed`.
pub(crate) fn eight_planes_seeded(q: u32, seed: Option<u64>) -> Result<Certified, ConstructionError> {
    if q >= 3 {
        match eight_planes_with_trace(q) {
            Ok((c, _)) => return Ok(c),
            Err(ConstructionError::NoAdmissibleChoice(_) | ConstructionError::NotCertified(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let map = field_reduction(1, 2, q)?;
    by_search(&spread_template(&map, 8, seed.unwrap_or(EIGHT_PLANES_SEED), SEARCH_BUDGET), "pg5_eight_planes")
}

/// Seven pairwise disjoint lines of PG(5, q) in higgledy-piggledy
/// arrangement, found among the images of points of PG(2, q^2).
pub fn construct_pg5_seven_lines(q: u32) -> Result<Certified, ConstructionError> {
    seven_lines_seeded(q, None)
}

pub(crate) fn seven_lines_seeded(q: u32, seed: Option<u64>) -> Result<Certified, ConstructionError> {
    let map = field_reduction(2, 1, q)?;
    by_search(&spread_template(&map, 7, seed.unwrap_or(SEVEN_LINES_SEED), SEARCH_BUDGET), "pg5_seven_lines")
}

/// Seven solids of PG(5, q), q >= 7, dual to the seven lines.
pub fn construct_pg5_seven_solids(q: u32) -> Result<Certified, ConstructionError> {
    seven_solids_seeded(q, None)
}

pub(crate) fn seven_solids_seeded(q: u32, seed: Option<u64>) -> Result<Certified, ConstructionError> {
    if q < 7 {
        return Err(ConstructionError::InvalidParameter("seven solids need q >= 7".into()));
    }
    let lines = seven_lines_seeded(q, seed)?;
    let mut dual = dualize(&lines.arrangement)?;
    if !dual.certificate.is_higpig() {
        return Err(ConstructionError::NotCertified("pg5_seven_solids".into()));
    }
    if let Some(p) = dual.arrangement.provenance.as_mut() {
        p.construction = "pg5_seven_solids".into();
    }
    Ok(dual)
}

/// Searches for seven planes of PG(5, q) in higgledy-piggledy arrangement
/// among the images of points of PG(1, q^3), with the default budget.
pub fn seven_planes_spread_search(q: u32) -> Result<Option<Certified>, ConstructionError> {
    seven_planes_spread_search_with(q, SEVEN_PLANES_BUDGET, SEVEN_PLANES_SEED)
}

/// [`seven_planes_spread_search`] with an explicit budget and seed.
pub fn seven_planes_spread_search_with(q: u32, budget: u64, seed: u64) -> Result<Option<Certified>, ConstructionError> {
    let map = field_reduction(1, 2, q)?;
    let template = spread_template(&map, 7, seed, budget);
    match search::run(&template)? {
        SearchOutcome::Found {
            arrangement,
            certificate,
            trial,
            ..
        } if certificate.is_higpig() => Ok(Some(Certified {
            arrangement: arrangement.with_provenance(Provenance {
                construction: "seven_planes_spread".into(),
                q,
                seed: Some(seed),
                choices: vec![trial],
            }),
            certificate,
        })),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::higgledy::coverage;

    fn pairwise_disjoint(c: &Certified) -> bool {
        let e = c.arrangement.elements();
        (0..e.len()).all(|i| (i + 1..e.len()).all(|j| e[i].meet(&e[j]).unwrap().is_empty()))
    }

    #[test]
    fn eight_planes_q2_by_search() {
        let c = construct_pg5_eight_planes(2).unwrap();
        assert!(c.certificate.is_higpig());
        assert!(pairwise_disjoint(&c));
        assert_eq!(coverage(&c.arrangement).size(), 56);
    }

    #[test]
    fn eight_planes_q3_from_sublines() {
        let (c, t) = eight_planes_with_trace(3).unwrap();
        assert!(c.certificate.is_higpig());
        assert!(pairwise_disjoint(&c));
        assert_eq!(coverage(&c.arrangement).size(), 104);
        let [b1, b2, b3] = &t.sublines;
        assert_eq!(b1.meet_size(b2), 2);
        assert_eq!(b1.meet_size(b3), 2);
        assert_eq!(b2.meet_size(b3), 2);
    }

    #[test]
    fn seven_lines_q2() {
        let c = construct_pg5_seven_lines(2).unwrap();
        assert!(c.certificate.is_higpig());
        assert_eq!(c.arrangement.len(), 7);
        assert!(pairwise_disjoint(&c));
    }

    #[test]
    fn seven_solids_need_large_q() {
        assert!(construct_pg5_seven_solids(5).is_err());
    }

    #[test]
    fn seven_planes_q2() {
        let c = seven_planes_spread_search(2).unwrap().expect("seven planes");
        assert!(c.certificate.is_higpig());
        assert!(pairwise_disjoint(&c));
    }
}
