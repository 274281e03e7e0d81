//! Resolving sets of the point-hyperplane incidence graph of PG(N, q).
//!
//! Hyperplanes are stored as their dual points, so a point P and a
//! hyperplane with coordinates h are incident when P . h = 0. The graph is
//! never materialised: distances have a closed form.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::higgledy::Arrangement;
use crate::space::{ProjSpace, SpaceError, Subspace};

/// Largest vertex count handled.
pub const BUDGET: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolvingError {
    #[error("pick {0} is not a point of its line or lies on another line")]
    InvalidPicks(usize),
    #[error("arrangement must consist of lines")]
    NotLines,
    #[error("graph with {0} vertices exceeds the budget")]
    BudgetExceeded(u64),
    #[error("incidence graphs need N >= 2")]
    DimensionTooSmall,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    Point(Subspace),
    /// A hyperplane, stored as the point of its dual coordinates.
    Hyperplane(Subspace),
}

impl Vertex {
    /// The hyperplane itself, as an (N-1)-subspace.
    pub fn subspace(&self) -> Subspace {
        match self {
            Vertex::Point(p) => p.clone(),
            Vertex::Hyperplane(h) => h.dual(),
        }
    }
}

fn incident(space: &ProjSpace, a: &[u32], b: &[u32]) -> bool {
    let f = space.field();
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y))) == 0
}

/// Distance in the incidence graph, for N >= 2.
pub fn distance(u: &Vertex, v: &Vertex) -> u8 {
    match (u, v) {
        (Vertex::Point(a), Vertex::Point(b)) | (Vertex::Hyperplane(a), Vertex::Hyperplane(b)) => {
            if a == b {
                0
            } else {
                2
            }
        }
        (Vertex::Point(p), Vertex::Hyperplane(h)) | (Vertex::Hyperplane(h), Vertex::Point(p)) => {
            if incident(p.space(), p.row(0), h.row(0)) {
                1
            } else {
                3
            }
        }
    }
}

/// Every vertex: the points in enumeration order, then the hyperplanes in
/// the order of their dual points.
pub fn vertices(space: &ProjSpace) -> Result<Vec<Vertex>, ResolvingError> {
    if space.dim() < 2 {
        return Err(ResolvingError::DimensionTooSmall);
    }
    let n = space.num_points();
    if 2 * n > BUDGET {
        return Err(ResolvingError::BudgetExceeded(2 * n));
    }
    let pts: Vec<Subspace> = space.enumerate(0)?.collect();
    let mut all: Vec<Vertex> = pts.iter().cloned().map(Vertex::Point).collect();
    all.extend(pts.into_iter().map(Vertex::Hyperplane));
    Ok(all)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub resolving: bool,
    /// Two vertices with the same distance vector.
    pub collision: Option<(Vertex, Vertex)>,
}

/// Distance vectors packed two bits per entry.
fn signatures(all: &[Vertex], set: &[Vertex]) -> Vec<Vec<u64>> {
    let words = set.len().div_ceil(32).max(1);
    all.par_iter()
        .map(|v| {
            let mut sig = vec![0u64; words];
            for (i, s) in set.iter().enumerate() {
                sig[i / 32] |= (distance(v, s) as u64) << (2 * (i % 32));
            }
            sig
        })
        .collect()
}

fn first_collision(sigs: &[Vec<u64>]) -> Option<(usize, usize)> {
    let mut seen: HashMap<&[u64], usize> = HashMap::with_capacity(sigs.len());
    for (i, s) in sigs.iter().enumerate() {
        if let Some(&j) = seen.get(s.as_slice()) {
            return Some((j, i));
        }
        seen.insert(s, i);
    }
    None
}

/// Whether `set` resolves every vertex of the incidence graph of `space`.
pub fn is_resolving(space: &ProjSpace, set: &[Vertex]) -> Result<Resolution, ResolvingError> {
    let all = vertices(space)?;
    let sigs = signatures(&all, set);
    let collision = first_collision(&sigs).map(|(a, b)| (all[a].clone(), all[b].clone()));
    Ok(Resolution {
        resolving: collision.is_none(),
        collision,
    })
}

#[derive(Clone, Debug)]
pub struct LineResolvingSet {
    pub vertices: Vec<Vertex>,
    /// The punctured points, each line's points minus its pick.
    pub punctured: Vec<Subspace>,
    pub picks: Vec<Subspace>,
    /// Size of the set before any augmentation, twice the punctured count.
    pub candidate_size: usize,
    /// Vertices added greedily because the candidate did not resolve.
    pub augmentations: usize,
}

/// First point of each line that lies on no other line.
pub fn default_picks(arr: &Arrangement) -> Result<Vec<Subspace>, ResolvingError> {
    let e = arr.elements();
    (0..e.len())
        .map(|i| {
            e[i].points()
                .into_iter()
                .find(|p| e.iter().enumerate().all(|(j, l)| j == i || !l.contains(p)))
                .ok_or(ResolvingError::InvalidPicks(i))
        })
        .collect()
}

/// Resolving set from a higgledy-piggledy line set: the points of the lines
/// other than the picks, and the hyperplanes with those same coordinates.
/// If that candidate does not resolve the graph, vertices splitting the
/// largest class of equal distance vectors are added until it does.
pub fn resolving_from_lines(arr: &Arrangement, picks: Option<Vec<Subspace>>) -> Result<LineResolvingSet, ResolvingError> {
    if arr.k() != 1 {
        return Err(ResolvingError::NotLines);
    }
    let e = arr.elements();
    let picks = match picks {
        Some(p) => p,
        None => default_picks(arr)?,
    };
    if picks.len() != e.len() {
        return Err(ResolvingError::InvalidPicks(picks.len().min(e.len())));
    }
    for (i, p) in picks.iter().enumerate() {
        if p.dim() != 0 || !e[i].contains(p) || e.iter().enumerate().any(|(j, l)| j != i && l.contains(p)) {
            return Err(ResolvingError::InvalidPicks(i));
        }
    }
    let mut punctured: Vec<Subspace> = Vec::new();
    for (i, l) in e.iter().enumerate() {
        for p in l.points() {
            if p != picks[i] && !punctured.contains(&p) {
                punctured.push(p);
            }
        }
    }
    let mut set: Vec<Vertex> = punctured.iter().cloned().map(Vertex::Point).collect();
    set.extend(punctured.iter().cloned().map(Vertex::Hyperplane));
    let candidate_size = set.len();
    let all = vertices(arr.space())?;
    let mut augmentations = 0;
    loop {
        let sigs = signatures(&all, &set);
        if first_collision(&sigs).is_none() {
            break;
        }
        let mut classes: HashMap<&[u64], Vec<usize>> = HashMap::new();
        for (i, s) in sigs.iter().enumerate() {
            classes.entry(s.as_slice()).or_default().push(i);
        }
        let largest = classes.values().max_by_key(|c| (c.len(), std::cmp::Reverse(c[0]))).unwrap();
        // The vertex whose distances split the class into the most parts.
        let best = (0..all.len())
            .filter(|&v| !set.contains(&all[v]))
            .max_by_key(|&v| {
                let mut parts = [false; 4];
                for &i in largest {
                    parts[distance(&all[i], &all[v]) as usize] = true;
                }
                (parts.iter().filter(|&&x| x).count(), std::cmp::Reverse(v))
            })
            .expect("the whole vertex set resolves");
        set.push(all[best].clone());
        augmentations += 1;
    }
    Ok(LineResolvingSet {
        vertices: set,
        punctured,
        picks,
        candidate_size,
        augmentations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{construct_pg3_four_lines, tetrahedron};
    use crate::field::Field;
    use std::collections::VecDeque;

    fn pg(n: usize, q: u32) -> ProjSpace {
        ProjSpace::new(n, Field::gf(q).unwrap()).unwrap()
    }

    #[test]
    fn closed_form_matches_breadth_first_search() {
        for s in [pg(2, 2), pg(3, 2)] {
            let all = vertices(&s).unwrap();
            let n = all.len();
            let adj: Vec<Vec<usize>> = (0..n)
                .map(|i| (0..n).filter(|&j| distance(&all[i], &all[j]) == 1).collect())
                .collect();
            // Adjacency from incidence of actual subspaces, independent of
            // the dot-product shortcut.
            for i in 0..n {
                for &j in &adj[i] {
                    let (a, b) = (all[i].subspace(), all[j].subspace());
                    assert!(a.contains(&b) || b.contains(&a));
                }
            }
            for src in 0..n {
                let mut dist = vec![u8::MAX; n];
                dist[src] = 0;
                let mut queue = VecDeque::from([src]);
                while let Some(u) = queue.pop_front() {
                    for &w in &adj[u] {
                        if dist[w] == u8::MAX {
                            dist[w] = dist[u] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                for t in 0..n {
                    assert_eq!(dist[t], distance(&all[src], &all[t]));
                }
            }
        }
    }

    #[test]
    fn trivial_sets() {
        let s = pg(2, 2);
        let all = vertices(&s).unwrap();
        assert!(is_resolving(&s, &all).unwrap().resolving);
        let r = is_resolving(&s, &[]).unwrap();
        assert!(!r.resolving);
        assert!(r.collision.is_some());
    }

    #[test]
    fn order_of_the_set_does_not_matter() {
        let s = pg(3, 2);
        let c = construct_pg3_four_lines(2).unwrap();
        let mut set = resolving_from_lines(&c.arrangement, None).unwrap().vertices;
        let a = is_resolving(&s, &set).unwrap().resolving;
        set.reverse();
        assert_eq!(is_resolving(&s, &set).unwrap().resolving, a);
    }

    #[test]
    fn four_lines_give_8q() {
        for q in [2, 3] {
            let c = construct_pg3_four_lines(q).unwrap();
            let r = resolving_from_lines(&c.arrangement, None).unwrap();
            assert_eq!(r.candidate_size, 8 * q as usize);
            assert_eq!(r.augmentations, 0);
        }
    }

    #[test]
    fn bad_picks_rejected() {
        let c = tetrahedron(&pg(3, 2)).unwrap();
        let arr = &c.arrangement;
        // e1 lies on three edges of the tetrahedron.
        let mut picks = default_picks(arr).unwrap();
        picks[0] = arr.space().unit_point(0);
        assert_eq!(resolving_from_lines(arr, Some(picks)).unwrap_err(), ResolvingError::InvalidPicks(0));
    }

    #[test]
    fn punctured_count_matches_coverage() {
        let c = tetrahedron(&pg(3, 3)).unwrap();
        let arr = &c.arrangement;
        let r = resolving_from_lines(arr, None).unwrap();
        assert_eq!(r.punctured.len() as u64, crate::higgledy::coverage(arr).size() - arr.len() as u64);
    }
}
