//! Six lines and six planes in PG(4, q).
//!
//! For q >= 3 the six lines are built in stages on pinned coordinates:
//! m = <e1,e2>, M1 = e1, M2 = e2, P12 = e3, P13 = e4, P23 = e5, so that
//! pi12 = <e1,e2,e3>, pi13 = <e1,e2,e4>, pi23 = <e1,e2,e5> and the solids
//! Sigma1 = <pi12,pi13>, Sigma2 = <pi12,pi23>, Sigma3 = <pi13,pi23> meet in m.

use crate::field::Field;
use crate::higgledy::{has_transversal, Arrangement, MethodChoice, Provenance};
use crate::search::{Constraint, SearchTemplate};
use crate::space::{ProjSpace, Subspace};

use super::{by_search, certify, dualize, Certified, ConstructionError, SEARCH_BUDGET};

const SIX_LINES_SEED: u64 = 0x6c69_6e65_7334;
const SIX_PLANES_SEED: u64 = 0x706c_616e_6534;

/// Intermediate objects of the staged six-line construction.
#[derive(Clone, Debug)]
pub struct SixLineTrace {
    /// l11, l12, l21, l22, l31, l32, in arrangement order.
    pub lines: Vec<Subspace>,
    pub m: Subspace,
    pub sigma: [Subspace; 3],
    /// pi12, pi13, pi23.
    pub pi: [Subspace; 3],
    pub p12: Subspace,
    pub s: Subspace,
    pub beta: Subspace,
    pub s_point: Subspace,
    /// The concurrency points of the bundles together with M1 and M2.
    pub conic: Vec<Subspace>,
    pub tangent: Subspace,
    pub m0: Subspace,
    pub m3: Subspace,
    /// The line of the bundle plane through S that is not a bundle line.
    pub r0: Subspace,
    pub q_point: Subspace,
    /// External line to the conic through M3 in beta.
    pub external: Subspace,
    pub delta: Subspace,
    pub choices: Vec<u64>,
}

fn err(what: &str) -> ConstructionError {
    ConstructionError::NoAdmissibleChoice(what.to_string())
}

fn unit(space: &ProjSpace, i: usize) -> Subspace {
    space.unit_point(i)
}

fn join(a: &Subspace, b: &Subspace) -> Subspace {
    a.join(b).expect("same space")
}

fn meet(a: &Subspace, b: &Subspace) -> Subspace {
    a.meet(b).expect("same space")
}

fn skew(a: &Subspace, b: &Subspace) -> bool {
    meet(a, b).is_empty()
}

/// Lines through `p` contained in `within`.
fn lines_through(p: &Subspace, within: &Subspace) -> Vec<Subspace> {
    p.subspaces_through(1).unwrap().filter(|l| within.contains(l)).collect()
}

/// The bundle of lines a3^(A), A on `a` minus P12, of a line `a` of pi12
/// through P12, with its common plane and point of concurrence.
struct Bundle {
    lines: Vec<Subspace>,
    plane: Subspace,
    apex: Subspace,
}

struct Frame {
    m: Subspace,
    sigma: [Subspace; 3],
    pi: [Subspace; 3],
    p12: Subspace,
    /// l11, l12 and l21, l22.
    l: [[Subspace; 2]; 2],
}

impl Frame {
    fn bundle(&self, a: &Subspace) -> Option<Bundle> {
        let mut lines = Vec::new();
        for pt in a.points() {
            if pt == self.p12 {
                continue;
            }
            let side = |i: usize| meet(&join(&pt, &self.l[i][0]), &join(&pt, &self.l[i][1]));
            let (a1, a2) = (side(0), side(1));
            if a1.dim() != 1 || a2.dim() != 1 {
                return None;
            }
            let a3 = meet(&join(&a1, &a2), &self.sigma[2]);
            if a3.dim() != 1 {
                return None;
            }
            lines.push(a3);
        }
        let plane = lines.iter().skip(1).fold(lines[0].clone(), |acc, l| join(&acc, l));
        let apex = lines.iter().skip(1).fold(lines[0].clone(), |acc, l| meet(&acc, l));
        (plane.dim() == 2 && apex.dim() == 0).then_some(Bundle { lines, plane, apex })
    }
}

/// Checks that `pts` has no three collinear points.
fn is_arc(pts: &[Subspace]) -> bool {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let l = join(&pts[i], &pts[j]);
            if pts.iter().enumerate().any(|(k, p)| k != i && k != j && l.contains(p)) {
                return false;
            }
        }
    }
    true
}

fn points_on(line: &Subspace, set: &[Subspace]) -> usize {
    set.iter().filter(|p| line.contains(p)).count()
}

/// Runs the stages after l11 and l21 are fixed. Returns `None` when one of
/// the configuration's genericity assertions fails for this choice.
fn complete(frame: Frame, choices: Vec<u64>) -> Result<Option<(Arrangement, SixLineTrace)>, ConstructionError> {
    let space = frame.m.space().clone();
    let q = space.q() as usize;
    let (m1, m2) = (unit(&space, 0), unit(&space, 1));
    let (p13, p23) = (unit(&space, 3), unit(&space, 4));
    let s = join(&p13, &p23);
    let beta = meet(&join(&frame.l[0][0], &frame.l[1][0]), &frame.sigma[2]);
    let s_point = meet(&s, &beta);
    if beta.dim() != 2 || s_point.dim() != 0 {
        return Ok(None);
    }

    // Every admissible line of pi12 through P12 meets m in a point other
    // than M1 and M2.
    let mut conic = vec![m1.clone(), m2.clone()];
    for x in frame.m.points() {
        if x == m1 || x == m2 {
            continue;
        }
        let Some(b) = frame.bundle(&join(&x, &frame.p12)) else {
            return Ok(None);
        };
        if !b.plane.contains(&s) || !beta.contains(&b.apex) || conic.contains(&b.apex) {
            return Ok(None);
        }
        conic.push(b.apex);
    }
    if conic.len() != q + 1 || !is_arc(&conic) || !conic.contains(&s_point) {
        return Ok(None);
    }

    let Some(tangent) = lines_through(&s_point, &beta).into_iter().find(|t| points_on(t, &conic) == 1) else {
        return Ok(None);
    };
    let m0 = meet(&tangent, &frame.m);
    if m0.dim() != 0 || m0 == m1 || m0 == m2 {
        return Ok(None);
    }
    let Some(b0) = frame.bundle(&join(&m0, &frame.p12)) else {
        return Ok(None);
    };
    if b0.apex != s_point {
        return Ok(None);
    }
    let Some(r0) = lines_through(&s_point, &b0.plane).into_iter().find(|l| !b0.lines.contains(l)) else {
        return Ok(None);
    };

    let mut choices = choices;
    let Some(m3) = frame.m.points().into_iter().find(|p| *p != m0 && *p != m1 && *p != m2) else {
        return Err(err("M3"));
    };
    choices.push(m3.index());
    let [_, pi13, pi23] = &frame.pi;
    let Some(r) = r0
        .points()
        .into_iter()
        .find(|p| !pi13.contains(p) && !pi23.contains(p) && !beta.contains(p))
    else {
        return Ok(None);
    };
    let l31 = join(&m3, &r);
    choices.push(l31.index());
    if b0.lines.iter().any(|a3| !skew(a3, &l31)) {
        return Ok(None);
    }
    let q_point = meet(&join(&frame.m, &l31), &s);

    let Some(external) = lines_through(&m3, &beta).into_iter().find(|e| points_on(e, &conic) == 0) else {
        return Ok(None);
    };
    let delta = join(&external, &q_point);

    let mut lines = vec![
        frame.l[0][0].clone(),
        frame.l[0][1].clone(),
        frame.l[1][0].clone(),
        frame.l[1][1].clone(),
        l31,
    ];
    let sigma3 = frame.sigma[2].clone();
    let mut found = None;
    for cand in sigma3.subspaces_within(1)? {
        if !skew(&cand, &frame.m) || lines.iter().any(|l| !skew(l, &cand)) {
            continue;
        }
        let mut elems = lines.clone();
        elems.push(cand.clone());
        let arr = Arrangement::new(&space, 1, elems)?;
        if !has_transversal(&arr, 2) {
            found = Some((cand, arr));
            break;
        }
    }
    let Some((l32, arr)) = found else {
        return Err(err("l32"));
    };
    choices.push(l32.index());
    lines.push(l32);
    let arr = arr.with_provenance(Provenance {
        construction: "pg4_six_lines".into(),
        q: space.q(),
        seed: None,
        choices: choices.clone(),
    });
    let trace = SixLineTrace {
        lines,
        m: frame.m,
        sigma: frame.sigma,
        pi: frame.pi,
        p12: frame.p12,
        s,
        beta,
        s_point,
        conic,
        tangent,
        m0,
        m3,
        r0,
        q_point,
        external,
        delta,
        choices,
    };
    Ok(Some((arr, trace)))
}

/// The staged construction for q >= 3, with its intermediate objects.
pub fn six_lines_with_trace(q: u32) -> Result<(Certified, SixLineTrace), ConstructionError> {
    if q < 3 {
        return Err(ConstructionError::InvalidParameter("the staged construction needs q >= 3".into()));
    }
    let space = ProjSpace::new(4, Field::gf(q)?)?;
    let e: Vec<Subspace> = (0..5).map(|i| unit(&space, i)).collect();
    let m = join(&e[0], &e[1]);
    let pi = [join(&m, &e[2]), join(&m, &e[3]), join(&m, &e[4])];
    let sigma = [join(&pi[0], &pi[1]), join(&pi[0], &pi[2]), join(&pi[1], &pi[2])];
    let l12 = join(&e[2], &e[3]);
    let l22 = join(&e[2], &e[4]);
    // l_i1: lines of Sigma_i through M_i, skew to l_i2, outside pi12 and pi_i3.
    let candidates = |i: usize, l2: &Subspace| -> Vec<Subspace> {
        lines_through(&e[i], &sigma[i])
            .into_iter()
            .filter(|l| skew(l, l2) && !pi[0].contains(l) && !pi[i + 1].contains(l))
            .collect()
    };
    let c1 = candidates(0, &l12);
    let c2 = candidates(1, &l22);
    for l11 in &c1 {
        for l21 in &c2 {
            let frame = Frame {
                m: m.clone(),
                sigma: sigma.clone(),
                pi: pi.clone(),
                p12: e[2].clone(),
                l: [[l11.clone(), l12.clone()], [l21.clone(), l22.clone()]],
            };
            if let Some((arr, trace)) = complete(frame, vec![l11.index(), l21.index()])? {
                return Ok((certify(arr, "pg4_six_lines")?, trace));
            }
        }
    }
    Err(err("l11 and l21"))
}

/// Six lines of PG(4, q) in higgledy-piggledy arrangement, exactly two of
/// which meet.
pub fn construct_pg4_six_lines(q: u32) -> Result<Certified, ConstructionError> {
    six_lines_seeded(q, None)
}

/// [`construct_pg4_six_lines`] with the search seed replaced by `seed`.
/// The staged path for q >= 3 takes no seed.
pub(crate) fn six_lines_seeded(q: u32, seed: Option<u64>) -> Result<Certified, ConstructionError> {
    if q >= 3 {
        return six_lines_with_trace(q).map(|(c, _)| c);
    }
    let space = ProjSpace::new(4, Field::gf(q)?)?;
    let template = SearchTemplate {
        space,
        k: 1,
        cardinality: 6,
        constraints: vec![Constraint::PairShares(0), Constraint::PairwiseDisjoint],
        method: MethodChoice::Auto,
        budget: SEARCH_BUDGET,
        seed: seed.unwrap_or(SIX_LINES_SEED),
    };
    by_search(&template, "pg4_six_lines")
}

/// Six planes of PG(4, q) in higgledy-piggledy arrangement, two of which
/// share a line. Searched for q <= 5, dual to the six lines otherwise.
pub fn construct_pg4_six_planes(q: u32) -> Result<Certified, ConstructionError> {
    six_planes_seeded(q, None)
}

pub(crate) fn six_planes_seeded(q: u32, seed: Option<u64>) -> Result<Certified, ConstructionError> {
    if q >= 7 {
        let lines = construct_pg4_six_lines(q)?;
        let mut dual = dualize(&lines.arrangement)?;
        if !dual.certificate.is_higpig() {
            return Err(ConstructionError::NotCertified("pg4_six_planes".into()));
        }
        if let Some(p) = dual.arrangement.provenance.as_mut() {
            p.construction = "pg4_six_planes".into();
        }
        return Ok(dual);
    }
    let space = ProjSpace::new(4, Field::gf(q)?)?;
    let template = SearchTemplate {
        space,
        k: 2,
        cardinality: 6,
        constraints: vec![Constraint::PairShares(1)],
        method: MethodChoice::Strong,
        budget: SEARCH_BUDGET,
        seed: seed.unwrap_or(SIX_PLANES_SEED),
    };
    by_search(&template, "pg4_six_planes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::higgledy::{coverage, Verdict};

    fn meeting_pairs(arr: &Arrangement) -> Vec<(usize, usize, i64)> {
        let e = arr.elements();
        let mut out = Vec::new();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let d = e[i].meet(&e[j]).unwrap().dim();
                if d >= 0 {
                    out.push((i, j, d));
                }
            }
        }
        out
    }

    #[test]
    fn six_lines_q2_by_search() {
        let c = construct_pg4_six_lines(2).unwrap();
        assert_eq!(c.certificate.verdict, Verdict::HigPig);
        assert_eq!(meeting_pairs(&c.arrangement).len(), 1);
        assert_eq!(coverage(&c.arrangement).size(), 17);
    }

    #[test]
    fn six_lines_q3_staged() {
        let (c, t) = six_lines_with_trace(3).unwrap();
        assert!(c.certificate.is_higpig());
        assert_eq!(meeting_pairs(&c.arrangement), vec![(1, 3, 0)]);
        assert_eq!(coverage(&c.arrangement).size(), 23);
        assert_eq!(t.conic.len(), 4);
        assert!(t.conic.contains(&t.s_point));
    }

    #[test]
    fn points_to_avoid_in_delta_are_few() {
        for q in [3, 4, 5] {
            let (_, t) = six_lines_with_trace(q).unwrap();
            let q = q as usize;
            let space = t.m.space().clone();
            let five = &t.lines[..5];
            let (m1, m2) = (space.unit_point(0), space.unit_point(1));
            let mut avoid: Vec<Subspace> = Vec::new();
            for plane in space.enumerate(2).unwrap() {
                if five.iter().any(|l| l.meet(&plane).unwrap().is_empty()) || plane == t.pi[0] {
                    continue;
                }
                let at = plane.meet(&t.pi[0]).unwrap();
                if at == m1 || at == m2 {
                    continue;
                }
                for p in plane.meet(&t.delta).unwrap().points() {
                    if !avoid.contains(&p) {
                        avoid.push(p);
                    }
                }
            }
            assert!(avoid.len() <= (q + 1) + (q - 3), "q={q}: {} points", avoid.len());
            if !avoid.contains(&t.q_point) {
                avoid.push(t.q_point.clone());
            }
            assert!(avoid.len() < 2 * q);
            let free = t.delta.subspaces_within(1).unwrap().filter(|l| avoid.iter().all(|p| !l.contains(p))).count();
            assert!(free > 0, "q={q}: no line of delta avoids the points");
        }
    }

    #[test]
    fn conic_and_tangent() {
        for q in [3, 4, 5, 7] {
            let (c, t) = six_lines_with_trace(q).unwrap();
            assert!(c.certificate.is_higpig());
            assert_eq!(t.conic.len(), q as usize + 1);
            assert!(is_arc(&t.conic));
            assert!(t.conic.iter().all(|p| t.beta.contains(p)));
            assert_eq!(points_on(&t.tangent, &t.conic), 1);
            assert!(t.tangent.contains(&t.s_point));
            assert!(t.m.contains(&t.m0) && t.m.contains(&t.m3));
            assert_eq!(points_on(&t.external, &t.conic), 0);
        }
    }

    #[test]
    fn six_planes_q2_share_a_line() {
        let c = construct_pg4_six_planes(2).unwrap();
        assert!(c.certificate.is_higpig());
        assert_eq!(meeting_pairs(&c.arrangement)[0].2, 1);
    }
}
