use std::collections::HashSet;

use crate::field::Field;
use crate::higgledy::{preferred_path, transversal_search};
use crate::space::{ProjSpace, Subspace};

use super::spread::SpreadElementMap;
use super::ConstructionError;

/// An F_q-subline of PG(1, q^m), where F_q is the immediate base of the
/// coordinate field.
#[derive(Clone, Debug)]
pub struct Subline {
    triple: [Subspace; 3],
    /// Members in generation order: the first defining point, then the
    /// points with parameter a = 0, 1, .. in the subfield.
    points: Vec<Subspace>,
    /// Sorted enumeration indices of the members.
    indices: Vec<u64>,
}

impl PartialEq for Subline {
    fn eq(&self, other: &Self) -> bool {
        self.indices == other.indices
    }
}

impl Eq for Subline {}

impl Subline {
    pub fn points(&self) -> &[Subspace] {
        &self.points
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn triple(&self) -> &[Subspace; 3] {
        &self.triple
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Subspace) -> bool {
        self.indices.binary_search(&p.index()).is_ok()
    }

    /// Number of common points.
    pub fn meet_size(&self, other: &Subline) -> usize {
        sorted_meet(&self.indices, &other.indices)
    }
}

fn sorted_meet(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// The subline through three distinct points of a projective line: the
/// image of `{(0,1)} ∪ {(1,a)}` under the map sending (0,1), (1,0), (1,1)
/// to `p1`, `p2`, `p3`.
pub fn subline_through(p1: &Subspace, p2: &Subspace, p3: &Subspace) -> Result<Subline, ConstructionError> {
    let space = p1.space();
    if space.dim() != 1 || p2.space() != space || p3.space() != space {
        return Err(ConstructionError::InvalidParameter("points of one projective line expected".into()));
    }
    if p1 == p2 || p1 == p3 || p2 == p3 {
        return Err(ConstructionError::DegenerateTriple);
    }
    let f = space.field();
    let (v1, v2, v3) = (p1.row(0), p2.row(0), p3.row(0));
    // v3 = lambda v1 + mu v2 by Cramer's rule.
    let det = f.sub(f.mul(v1[0], v2[1]), f.mul(v1[1], v2[0]));
    let lambda = f.div(f.sub(f.mul(v3[0], v2[1]), f.mul(v3[1], v2[0])), det);
    let mu = f.div(f.sub(f.mul(v1[0], v3[1]), f.mul(v1[1], v3[0])), det);
    let lv1: Vec<u32> = v1.iter().map(|&x| f.mul(lambda, x)).collect();
    let mv2: Vec<u32> = v2.iter().map(|&x| f.mul(mu, x)).collect();
    let mut points = vec![p1.clone()];
    for a in 0..f.base_order() {
        let v: Vec<u32> = (0..2).map(|i| f.add(mv2[i], f.mul(a, lv1[i]))).collect();
        points.push(space.point(&v)?);
    }
    let mut indices: Vec<u64> = points.iter().map(Subspace::index).collect();
    indices.sort_unstable();
    Ok(Subline {
        triple: [p1.clone(), p2.clone(), p3.clone()],
        points,
        indices,
    })
}

/// Looks for an (r-1)-subspace of PG(2m-1, q) meeting the field-reduction
/// image of every given point of PG(1, q^m). Such a subspace exists exactly
/// when the points lie in an F_q-linear set of rank at most r.
pub fn in_linear_set_of_rank_at_most(points: &[Subspace], r: usize) -> Result<Option<Subspace>, ConstructionError> {
    let Some(first) = points.first() else {
        return Err(ConstructionError::InvalidParameter("no points".into()));
    };
    let map = SpreadElementMap::from_extension(1, first.space().field())?;
    let m = map.k() + 1;
    if r == 0 || r > 2 * m - 1 {
        return Err(ConstructionError::InvalidParameter(format!("rank {r} out of range")));
    }
    let mut uniq: Vec<Subspace> = Vec::new();
    for p in points {
        if !uniq.contains(p) {
            uniq.push(p.clone());
        }
    }
    let arr = map.arrangement(&uniq)?;
    let d = r as i64 - 1;
    let found = transversal_search(&arr, d, preferred_path(&arr, d))?;
    Ok(found.witness.map(|(_, s)| s))
}

/// All sublines of the projective line `line`, each once, ordered by their
/// sorted member indices.
pub(crate) fn all_sublines(line: &ProjSpace) -> Result<Vec<Subline>, ConstructionError> {
    let pts: Vec<Subspace> = line.enumerate(0)?.collect();
    let n = pts.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            // Sublines through i and j partition the remaining points; keep
            // each one only when i and j are its two smallest members.
            let mut covered = vec![false; n];
            for k in j + 1..n {
                if covered[k] {
                    continue;
                }
                let s = subline_through(&pts[i], &pts[j], &pts[k])?;
                for &x in &s.indices {
                    covered[x as usize] = true;
                }
                if s.indices[0] == i as u64 && s.indices[1] == j as u64 {
                    out.push(s);
                }
            }
        }
    }
    out.sort_by(|a, b| a.indices.cmp(&b.indices));
    Ok(out)
}

/// Exhaustively searches PG(1, q^m) for three distinct F_q-sublines that
/// pairwise share exactly two points and have no common point. Returns the
/// first such triple in subline order.
pub fn subline_triples_search(q: u32, m: u32) -> Result<Option<[Subline; 3]>, ConstructionError> {
    if q < 3 {
        return Err(ConstructionError::InvalidParameter("q must be at least 3".into()));
    }
    let order = (q as u64).checked_pow(m).unwrap_or(u64::MAX);
    if order > 1 << 14 {
        return Err(ConstructionError::FieldTooLarge(order));
    }
    let ext = Field::gf(q)?.extension(m)?;
    let line = ProjSpace::new(1, ext)?;
    let subs = all_sublines(&line)?;
    let adj: Vec<Vec<usize>> = (0..subs.len())
        .map(|a| (0..subs.len()).filter(|&b| b != a && subs[a].meet_size(&subs[b]) == 2).collect())
        .collect();
    for a in 0..subs.len() {
        let na: HashSet<usize> = adj[a].iter().copied().collect();
        for &b in adj[a].iter().filter(|&&b| b > a) {
            for &c in adj[b].iter().filter(|&&c| c > b && na.contains(&c)) {
                let ab: Vec<u64> = subs[a].indices.iter().copied().filter(|x| subs[b].indices.binary_search(x).is_ok()).collect();
                if sorted_meet(&ab, &subs[c].indices) == 0 {
                    return Ok(Some([subs[a].clone(), subs[b].clone(), subs[c].clone()]));
                }
            }
        }
    }
    Ok(None)
}
