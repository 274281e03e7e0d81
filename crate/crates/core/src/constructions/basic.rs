use crate::higgledy::{is_higgledy_piggledy, Arrangement, MethodChoice, Provenance};
use crate::space::{ProjSpace, Subspace};

use super::{certify, Certified, ConstructionError};

/// The N(N+1)/2 lines joining pairs of the standard frame points.
pub fn tetrahedron(space: &ProjSpace) -> Result<Certified, ConstructionError> {
    if space.dim() < 2 {
        return Err(ConstructionError::InvalidParameter("tetrahedron needs N >= 2".into()));
    }
    let n = space.cols();
    let mut lines = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            lines.push(space.span(&[&space.unit_point(i), &space.unit_point(j)])?);
        }
    }
    let arr = Arrangement::new(space, 1, lines)?.with_provenance(Provenance {
        construction: "tetrahedron".into(),
        q: space.q(),
        ..Default::default()
    });
    certify(arr, "tetrahedron")
}

/// Projects every element from the point `p` onto the hyperplane `sigma`,
/// returning the shadows in `sigma` identified with PG(N-1, q). Elements
/// with a common shadow are merged. The result carries a fresh certificate,
/// which may be negative.
pub fn project(arr: &Arrangement, sigma: &Subspace, p: &Subspace) -> Result<Certified, ConstructionError> {
    let space = arr.space();
    if sigma.dim() != space.dim() as i64 - 1 || p.dim() != 0 {
        return Err(ConstructionError::InvalidParameter("need a hyperplane and a point".into()));
    }
    if sigma.contains(p) {
        return Err(ConstructionError::PointInHyperplane);
    }
    if let Some(i) = arr.elements().iter().position(|e| e.contains(p)) {
        return Err(ConstructionError::PointOnElement(i));
    }
    let target = ProjSpace::new(space.dim() - 1, space.field().clone())?;
    // Coordinates in sigma relative to its canonical basis are the entries
    // at its pivot columns.
    let pivots: Vec<usize> = (0..sigma.rank())
        .map(|r| sigma.row(r).iter().position(|&x| x != 0).unwrap())
        .collect();
    let mut shadows: Vec<Subspace> = Vec::new();
    for e in arr.elements() {
        let shadow = space.meet(&space.span(&[p, e])?, sigma)?;
        let rows: Vec<Vec<u32>> = shadow
            .basis_rows()
            .iter()
            .map(|r| pivots.iter().map(|&c| r[c]).collect())
            .collect();
        let s = target.span_of_rows(&rows)?;
        if !shadows.contains(&s) {
            shadows.push(s);
        }
    }
    let arrangement = Arrangement::new(&target, arr.k(), shadows)?;
    let certificate = is_higgledy_piggledy(&arrangement, MethodChoice::Auto);
    Ok(Certified {
        arrangement,
        certificate,
    })
}

/// Replaces every element by its dual subspace and re-verifies the result.
pub fn dualize(arr: &Arrangement) -> Result<Certified, ConstructionError> {
    let space = arr.space();
    let elements: Vec<Subspace> = arr.elements().iter().map(Subspace::dual).collect();
    let mut arrangement = Arrangement::new(space, space.dim() as i64 - arr.k() - 1, elements)?;
    arrangement.provenance = arr.provenance.clone();
    let certificate = is_higgledy_piggledy(&arrangement, MethodChoice::Auto);
    Ok(Certified {
        arrangement,
        certificate,
    })
}
