//! Dense linear algebra on small row-major matrices of field indices.

use crate::field::Ops;

/// Brings `m` (row-major, `cols` columns) to reduced row echelon form in
/// place, moving zero rows to the bottom. Returns the rank.
pub(crate) fn rref<O: Ops>(o: O, m: &mut [u32], cols: usize) -> usize {
    if cols == 0 {
        return 0;
    }
    let rows = m.len() / cols;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in 0..cols {
                m.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = o.inv(m[rank * cols + c]);
        if inv != 1 {
            for j in c..cols {
                m[rank * cols + j] = o.mul(m[rank * cols + j], inv);
            }
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let f = m[r * cols + c];
            if f == 0 {
                continue;
            }
            let nf = o.neg(f);
            for j in c..cols {
                let v = m[rank * cols + j];
                if v != 0 {
                    m[r * cols + j] = o.add(m[r * cols + j], o.mul(nf, v));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of `m`, using `scratch` as working storage.
pub(crate) fn rank_with<O: Ops>(o: O, m: &[u32], cols: usize, scratch: &mut Vec<u32>) -> usize {
    scratch.clear();
    scratch.extend_from_slice(m);
    rref(o, scratch, cols)
}

/// Pivot column of every nonzero row of a matrix in RREF.
pub(crate) fn pivots(m: &[u32], rank: usize, cols: usize) -> Vec<usize> {
    (0..rank)
        .map(|r| (0..cols).find(|&c| m[r * cols + c] != 0).expect("nonzero row"))
        .collect()
}

/// Basis of `{x : m x^T = 0}` for `m` already in RREF with the given rank,
/// written row-major into `out`. Returns the number of basis rows.
pub(crate) fn null_space_of_rref<O: Ops>(o: O, m: &[u32], rank: usize, cols: usize, out: &mut Vec<u32>) -> usize {
    out.clear();
    let piv = pivots(m, rank, cols);
    let mut is_piv = vec![false; cols];
    for &p in &piv {
        is_piv[p] = true;
    }
    let mut n = 0;
    for free in (0..cols).filter(|&c| !is_piv[c]) {
        let start = out.len();
        out.resize(start + cols, 0);
        out[start + free] = 1;
        for (r, &p) in piv.iter().enumerate() {
            out[start + p] = o.neg(m[r * cols + free]);
        }
        n += 1;
    }
    n
}

/// `out = a * b^T`, where `a` is `ar x cols` and `b` is `br x cols`.
#[inline]
pub(crate) fn mul_t<O: Ops>(o: O, a: &[u32], b: &[u32], cols: usize, out: &mut Vec<u32>) {
    let ar = a.len() / cols.max(1);
    let br = b.len() / cols.max(1);
    out.clear();
    out.reserve(ar * br);
    for i in 0..ar {
        let ra = &a[i * cols..(i + 1) * cols];
        for j in 0..br {
            let rb = &b[j * cols..(j + 1) * cols];
            let mut acc = 0;
            for k in 0..cols {
                if ra[k] != 0 && rb[k] != 0 {
                    acc = o.add(acc, o.mul(ra[k], rb[k]));
                }
            }
            out.push(acc);
        }
    }
}

/// `coeffs * m`, a single row vector times an `rows x cols` matrix.
pub(crate) fn combine<O: Ops>(o: O, coeffs: &[u32], m: &[u32], cols: usize) -> Vec<u32> {
    let mut out = vec![0; cols];
    for (r, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for j in 0..cols {
            out[j] = o.add(out[j], o.mul(c, m[r * cols + j]));
        }
    }
    out
}

/// Scales a nonzero vector so that its first nonzero entry is one.
pub(crate) fn normalize<O: Ops>(o: O, v: &mut [u32]) {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        if lead != 1 {
            let inv = o.inv(lead);
            for x in v.iter_mut() {
                *x = o.mul(*x, inv);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn rref_identity_and_rank() {
        let f = Field::gf(3).unwrap();
        let mut m = vec![2, 1, 0, 1, 2, 0, 0, 0, 1];
        // Second row is twice the first.
        assert_eq!(rref(&f, &mut m, 3), 2);
        assert_eq!(&m[..6], &[1, 2, 0, 0, 0, 1]);
        assert_eq!(&m[6..], &[0, 0, 0]);
    }

    #[test]
    fn null_space_is_orthogonal() {
        let f = Field::gf(5).unwrap();
        let mut m = vec![1, 2, 3, 4, 0, 1, 1, 1];
        let r = rref(&f, &mut m, 4);
        let mut ns = Vec::new();
        let n = null_space_of_rref(&f, &m, r, 4, &mut ns);
        assert_eq!(n, 2);
        let mut prod = Vec::new();
        mul_t(&f, &m[..8], &ns, 4, &mut prod);
        assert!(prod.iter().all(|&x| x == 0));
    }
}
