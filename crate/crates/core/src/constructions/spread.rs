use crate::field::{Field, MAX_ORDER};
use crate::higgledy::{Arrangement, Provenance};
use crate::space::{ProjSpace, Subspace};

use super::subline::subline_through;
use super::{certify, Certified, ConstructionError};

/// Field reduction from PG(n', q^(k+1)) to PG((n'+1)(k+1)-1, q): every point
/// of the small space becomes a k-subspace of the big one, and these images
/// form a Desarguesian spread.
#[derive(Clone, Debug)]
pub struct SpreadElementMap {
    n_small: usize,
    k: usize,
    base: Field,
    ext: Field,
    small: ProjSpace,
    big: ProjSpace,
}

pub fn field_reduction(n_small: usize, k: usize, q: u32) -> Result<SpreadElementMap, ConstructionError> {
    if n_small == 0 || k == 0 {
        return Err(ConstructionError::InvalidParameter("n' and k must be positive".into()));
    }
    let order = (q as u64).checked_pow(k as u32 + 1).unwrap_or(u64::MAX);
    if order > MAX_ORDER {
        return Err(ConstructionError::FieldTooLarge(order));
    }
    let base = Field::gf(q)?;
    SpreadElementMap::from_extension(n_small, &base.extension(k as u32 + 1)?)
}

impl SpreadElementMap {
    /// Field reduction for an existing extension field, taken over its
    /// immediate base (the prime field when it has none).
    pub fn from_extension(n_small: usize, ext: &Field) -> Result<SpreadElementMap, ConstructionError> {
        let base = match ext.base() {
            Some(b) => b.clone(),
            None => Field::new(ext.characteristic(), 1, None)?,
        };
        let k = ext.degree() as usize - 1;
        if n_small == 0 || k == 0 {
            return Err(ConstructionError::InvalidParameter("n' and k must be positive".into()));
        }
        Ok(SpreadElementMap {
            n_small,
            k,
            small: ProjSpace::new(n_small, ext.clone())?,
            big: ProjSpace::new((n_small + 1) * (k + 1) - 1, base.clone())?,
            base,
            ext: ext.clone(),
        })
    }

    pub fn small(&self) -> &ProjSpace {
        &self.small
    }

    pub fn big(&self) -> &ProjSpace {
        &self.big
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn extension(&self) -> &Field {
        &self.ext
    }

    /// Dimension of the image subspaces.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_small(&self) -> usize {
        self.n_small
    }

    /// Image of the point with coordinates `x` over the extension field.
    pub fn image_of(&self, x: &[u32]) -> Subspace {
        let q = self.base.order();
        let rows: Vec<Vec<u32>> = (0..=self.k as u32)
            .map(|i| {
                // The basis 1, t, t^2, .. of the extension over GF(q).
                let lambda = q.pow(i);
                x.iter().flat_map(|&xj| self.ext.coeffs(self.ext.mul(lambda, xj))).collect()
            })
            .collect();
        self.big.span_of_rows(&rows).expect("coordinates in range")
    }

    pub fn image(&self, p: &Subspace) -> Subspace {
        self.image_of(p.row(0))
    }

    /// Images of the given points as an arrangement of k-subspaces.
    pub fn arrangement(&self, points: &[Subspace]) -> Result<Arrangement, ConstructionError> {
        let elems = points.iter().map(|p| self.image(p)).collect();
        Ok(Arrangement::new(&self.big, self.k as i64, elems)?)
    }
}

/// Four pairwise disjoint lines of PG(3, q): the images under field
/// reduction of the standard frame of PG(1, q^2) and the first point off
/// the subline it spans.
pub fn construct_pg3_four_lines(q: u32) -> Result<Certified, ConstructionError> {
    let map = field_reduction(1, 1, q)?;
    let line = map.small();
    let frame = [line.point(&[0, 1])?, line.point(&[1, 0])?, line.point(&[1, 1])?];
    let sub = subline_through(&frame[0], &frame[1], &frame[2])?;
    let (idx, fourth) = line
        .enumerate(0)?
        .enumerate()
        .find(|(_, p)| !sub.contains(p))
        .ok_or_else(|| ConstructionError::NoAdmissibleChoice("fourth point".into()))?;
    let mut points = frame.to_vec();
    points.push(fourth);
    let arr = map.arrangement(&points)?.with_provenance(Provenance {
        construction: "pg3_four_lines".into(),
        q,
        seed: None,
        choices: vec![idx as u64],
    });
    certify(arr, "pg3_four_lines")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::higgledy::coverage;
    use std::collections::HashSet;

    #[test]
    fn spread_partitions_the_big_space() {
        for (n, k, q) in [(1, 1, 2), (1, 1, 3), (1, 2, 2), (1, 2, 3), (2, 1, 2), (1, 1, 4), (1, 3, 2), (2, 1, 3), (1, 2, 4)] {
            let map = field_reduction(n, k, q).unwrap();
            let mut seen = HashSet::new();
            let mut count = 0u64;
            for p in map.small().enumerate(0).unwrap() {
                let img = map.image(&p);
                assert_eq!(img.dim(), k as i64);
                for pt in img.point_indices() {
                    assert!(seen.insert(pt), "images overlap");
                }
                count += 1;
            }
            assert_eq!(seen.len() as u64, map.big().num_points());
            assert_eq!(count, map.small().num_points());
        }
    }

    #[test]
    fn spread_sizes() {
        let m = field_reduction(1, 2, 3).unwrap();
        assert_eq!(m.small().num_points(), 28);
        assert_eq!(m.big().dim(), 5);
        let m = field_reduction(1, 1, 5).unwrap();
        assert_eq!(m.small().num_points(), 26);
        assert!(matches!(field_reduction(1, 4, 32), Err(ConstructionError::FieldTooLarge(_))));
    }

    #[test]
    fn four_lines_small_q() {
        for q in [2u32, 3] {
            let c = construct_pg3_four_lines(q).unwrap();
            let cov = coverage(&c.arrangement);
            assert_eq!(cov.size(), 4 * (q as u64 + 1));
            assert_eq!(cov.intersecting_pairs(), 0);
            assert!(c.certificate.is_higpig());
        }
    }
}
