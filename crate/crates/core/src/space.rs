//! Projective spaces PG(N, q) and their subspaces.
//!
//! A subspace is stored as the canonical reduced row echelon form of a
//! basis, so equality is plain matrix equality. Points are subspaces with a
//! single row whose first nonzero coordinate is one.
//!
//! # Enumeration order
//!
//! The d-subspaces of a space are numbered `0..count` as follows. Each RREF
//! matrix has a pivot pattern (the tuple of pivot columns). Patterns are
//! ordered by descending lexicographic order of the pivot tuple, so the
//! pattern whose first row starts furthest to the right comes first. Inside
//! one pattern the matrices are ordered lexicographically on their free
//! entries read row-major, with the last free entry varying fastest. For
//! points this is exactly the lexicographic order on normalised coordinate
//! vectors. Certificates refer to subspaces by this index.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("dimension {d} out of range for PG({n}, q)")]
    DimensionOutOfRange { d: i64, n: usize },
    #[error("subspaces belong to different projective spaces")]
    SpaceMismatch,
    #[error("argument out of range: {0}")]
    ArgumentOutOfRange(String),
    #[error("enumeration has more than 2^64 members")]
    EnumerationTooLarge,
    #[error("invalid coordinates: {0}")]
    InvalidCoordinates(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// PG(N, q) over a given field. Cheap to clone.
#[derive(Clone)]
pub struct ProjSpace(Arc<SpaceInner>);

struct SpaceInner {
    n: usize,
    field: Field,
    layouts: Vec<OnceLock<Result<Arc<Layout>, SpaceError>>>,
}

impl PartialEq for ProjSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.n == other.0.n && self.0.field == other.0.field)
    }
}

impl Eq for ProjSpace {}

impl fmt::Debug for ProjSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PG({},{})", self.0.n, self.0.field.order())
    }
}

/// One pivot pattern of the enumeration.
pub(crate) struct Pattern {
    pub(crate) pivots: Vec<usize>,
    /// Flat row-major positions of the free entries.
    pub(crate) free: Vec<usize>,
    pub(crate) count: u64,
    pub(crate) offset: u64,
}

/// Enumeration data for subspaces of one vector dimension.
pub(crate) struct Layout {
    pub(crate) rows: usize,
    pub(crate) cols: usize,
    pub(crate) q: u32,
    pub(crate) patterns: Vec<Pattern>,
    by_mask: HashMap<u64, usize>,
    pub(crate) total: u64,
}

/// A contiguous range of local indices inside one pivot pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct WorkUnit {
    pub(crate) pattern: usize,
    pub(crate) start: u64,
    pub(crate) end: u64,
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] != i + n - r) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

impl Layout {
    fn new(rows: usize, cols: usize, q: u32) -> Result<Layout, SpaceError> {
        let mut combos = combinations(cols, rows);
        combos.reverse();
        let mut patterns = Vec::with_capacity(combos.len());
        let mut by_mask = HashMap::with_capacity(combos.len());
        let mut offset: u64 = 0;
        for pivots in combos {
            let mut free = Vec::new();
            for (i, &p) in pivots.iter().enumerate() {
                for c in p + 1..cols {
                    if !pivots.contains(&c) {
                        free.push(i * cols + c);
                    }
                }
            }
            let count = (q as u64)
                .checked_pow(free.len() as u32)
                .ok_or(SpaceError::EnumerationTooLarge)?;
            let mask = pivots.iter().fold(0u64, |m, &p| m | 1 << p);
            by_mask.insert(mask, patterns.len());
            patterns.push(Pattern {
                pivots,
                free,
                count,
                offset,
            });
            offset = offset.checked_add(count).ok_or(SpaceError::EnumerationTooLarge)?;
        }
        Ok(Layout {
            rows,
            cols,
            q,
            patterns,
            by_mask,
            total: offset,
        })
    }

    /// Writes the matrix with the given pattern and local index into `m`.
    pub(crate) fn fill(&self, pattern: usize, mut local: u64, m: &mut [u32]) {
        let pat = &self.patterns[pattern];
        m.fill(0);
        for (i, &p) in pat.pivots.iter().enumerate() {
            m[i * self.cols + p] = 1;
        }
        let q = self.q as u64;
        for &pos in pat.free.iter().rev() {
            m[pos] = (local % q) as u32;
            local /= q;
        }
    }

    /// Advances `m` to the next matrix of the same pattern. Returns false
    /// once the pattern is exhausted.
    #[inline]
    pub(crate) fn advance(&self, pattern: usize, m: &mut [u32]) -> bool {
        for &pos in self.patterns[pattern].free.iter().rev() {
            m[pos] += 1;
            if m[pos] < self.q {
                return true;
            }
            m[pos] = 0;
        }
        false
    }

    pub(crate) fn locate(&self, index: u64) -> (usize, u64) {
        let p = self.patterns.partition_point(|pat| pat.offset <= index) - 1;
        (p, index - self.patterns[p].offset)
    }

    pub(crate) fn index_of(&self, m: &[u32]) -> u64 {
        let piv = linalg::pivots(m, self.rows, self.cols);
        let mask = piv.iter().fold(0u64, |acc, &p| acc | 1 << p);
        let p = self.by_mask[&mask];
        let pat = &self.patterns[p];
        let q = self.q as u64;
        pat.offset + pat.free.iter().fold(0u64, |acc, &pos| acc * q + m[pos] as u64)
    }

    /// Splits the whole enumeration into units of at most `chunk` members.
    pub(crate) fn work_units(&self, chunk: u64) -> Vec<WorkUnit> {
        let chunk = chunk.max(1);
        let mut out = Vec::new();
        for (p, pat) in self.patterns.iter().enumerate() {
            let mut s = 0;
            while s < pat.count {
                let e = (s + chunk).min(pat.count);
                out.push(WorkUnit {
                    pattern: p,
                    start: s,
                    end: e,
                });
                s = e;
            }
        }
        out
    }

    /// Calls `f(global_index, matrix)` for every member of `unit` until `f`
    /// returns false. Returns false if stopped early.
    #[inline]
    pub(crate) fn scan_unit(&self, unit: WorkUnit, buf: &mut Vec<u32>, mut f: impl FnMut(u64, &[u32]) -> bool) -> bool {
        buf.resize(self.rows * self.cols, 0);
        self.fill(unit.pattern, unit.start, buf);
        let base = self.patterns[unit.pattern].offset;
        let mut local = unit.start;
        while local < unit.end {
            if !f(base + local, buf) {
                return false;
            }
            local += 1;
            if local < unit.end {
                self.advance(unit.pattern, buf);
            }
        }
        true
    }
}

impl ProjSpace {
    pub fn new(n: usize, field: Field) -> Result<ProjSpace, SpaceError> {
        if n == 0 || n >= 63 {
            return Err(SpaceError::DimensionOutOfRange { d: n as i64, n });
        }
        let layouts = (0..=n + 1).map(|_| OnceLock::new()).collect();
        Ok(ProjSpace(Arc::new(SpaceInner { n, field, layouts })))
    }

    /// Projective dimension N.
    pub fn dim(&self) -> usize {
        self.0.n
    }

    /// Number of homogeneous coordinates, N + 1.
    pub fn cols(&self) -> usize {
        self.0.n + 1
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn q(&self) -> u32 {
        self.0.field.order()
    }

    fn check_dim(&self, d: i64) -> Result<usize, SpaceError> {
        if d < -1 || d > self.0.n as i64 {
            return Err(SpaceError::DimensionOutOfRange { d, n: self.0.n });
        }
        Ok((d + 1) as usize)
    }

    pub(crate) fn layout(&self, d: i64) -> Result<Arc<Layout>, SpaceError> {
        let r = self.check_dim(d)?;
        self.0.layouts[r]
            .get_or_init(|| Layout::new(r, self.cols(), self.q()).map(Arc::new))
            .clone()
    }

    /// Number of d-subspaces.
    pub fn count(&self, d: i64) -> Result<u64, SpaceError> {
        Ok(self.layout(d)?.total)
    }

    pub fn num_points(&self) -> u64 {
        self.count(0).expect("points always enumerable")
    }

    fn wrap(&self, rows: usize, data: Vec<u32>) -> Subspace {
        Subspace {
            space: self.clone(),
            rows,
            data,
        }
    }

    pub fn empty(&self) -> Subspace {
        self.wrap(0, Vec::new())
    }

    pub fn whole(&self) -> Subspace {
        let n = self.cols();
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        self.wrap(n, data)
    }

    /// The point whose i-th coordinate is one and all others zero (i from 0).
    pub fn unit_point(&self, i: usize) -> Subspace {
        let mut v = vec![0; self.cols()];
        v[i] = 1;
        self.wrap(1, v)
    }

    /// Span of the given row vectors (any number, any rank).
    pub fn span_of_rows(&self, rows: &[Vec<u32>]) -> Result<Subspace, SpaceError> {
        let n = self.cols();
        let q = self.q();
        let mut data = Vec::with_capacity(rows.len() * n);
        for r in rows {
            if r.len() != n {
                return Err(SpaceError::InvalidCoordinates(format!("expected {n} coordinates, got {}", r.len())));
            }
            if let Some(&x) = r.iter().find(|&&x| x >= q) {
                return Err(SpaceError::InvalidCoordinates(format!("entry {x} is not an element of GF({q})")));
            }
            data.extend_from_slice(r);
        }
        Ok(self.span_flat(data))
    }

    pub(crate) fn span_flat(&self, mut data: Vec<u32>) -> Subspace {
        let n = self.cols();
        let r = linalg::rref(self.field(), &mut data, n);
        data.truncate(r * n);
        self.wrap(r, data)
    }

    /// The point with homogeneous coordinates `v`.
    pub fn point(&self, v: &[u32]) -> Result<Subspace, SpaceError> {
        let s = self.span_of_rows(&[v.to_vec()])?;
        if s.rows != 1 {
            return Err(SpaceError::InvalidCoordinates("zero vector is not a point".into()));
        }
        Ok(s)
    }

    /// Every d-subspace in enumeration order.
    pub fn enumerate(&self, d: i64) -> Result<SubspaceIter, SpaceError> {
        let layout = self.layout(d)?;
        Ok(SubspaceIter {
            space: self.clone(),
            layout,
            next: 0,
        })
    }

    /// The d-subspace with the given enumeration index.
    pub fn subspace_at(&self, d: i64, index: u64) -> Result<Subspace, SpaceError> {
        let layout = self.layout(d)?;
        if index >= layout.total {
            return Err(SpaceError::ArgumentOutOfRange(format!("index {index} >= {}", layout.total)));
        }
        let (p, local) = layout.locate(index);
        let mut m = vec![0; layout.rows * layout.cols];
        layout.fill(p, local, &mut m);
        Ok(self.wrap(layout.rows, m))
    }

    /// Enumeration index of `s` among subspaces of its dimension.
    pub fn index_of(&self, s: &Subspace) -> Result<u64, SpaceError> {
        if s.space != *self {
            return Err(SpaceError::SpaceMismatch);
        }
        Ok(self.layout(s.dim())?.index_of(&s.data))
    }

    /// Enumeration index of the point with normalised coordinates `v`.
    pub(crate) fn point_index(&self, v: &[u32]) -> u64 {
        let q = self.q() as u64;
        let n = v.len();
        let p = v.iter().position(|&x| x != 0).expect("nonzero vector");
        // Patterns with a later pivot come first.
        let offset = (q.pow((n - 1 - p) as u32) - 1) / (q - 1);
        offset + v[p + 1..].iter().fold(0u64, |acc, &x| acc * q + x as u64)
    }

    /// A uniformly random d-subspace.
    pub fn random_subspace<R: Rng + ?Sized>(&self, d: i64, rng: &mut R) -> Result<Subspace, SpaceError> {
        let total = self.count(d)?;
        self.subspace_at(d, rng.gen_range(0..total))
    }

    /// A uniformly random d-subspace determined by `seed`.
    pub fn random_subspace_seeded(&self, d: i64, seed: u64) -> Result<Subspace, SpaceError> {
        self.random_subspace(d, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    fn check(&self, parts: &[&Subspace]) -> Result<(), SpaceError> {
        if parts.iter().all(|p| p.space == *self) {
            Ok(())
        } else {
            Err(SpaceError::SpaceMismatch)
        }
    }

    /// Smallest subspace containing all parts; the empty span is empty.
    pub fn span(&self, parts: &[&Subspace]) -> Result<Subspace, SpaceError> {
        self.check(parts)?;
        let data = parts.iter().flat_map(|p| p.data.iter().copied()).collect();
        Ok(self.span_flat(data))
    }

    /// Largest subspace contained in both `a` and `b`.
    pub fn meet(&self, a: &Subspace, b: &Subspace) -> Result<Subspace, SpaceError> {
        self.check(&[a, b])?;
        let da = a.dual();
        let db = b.dual();
        Ok(self.span(&[&da, &db])?.dual())
    }
}

/// Gaussian binomial coefficient `[n choose k]_q`.
pub fn gaussian_binomial(n: u32, k: u32, q: u32) -> Result<BigUint, SpaceError> {
    if k > n || q < 2 {
        return Err(SpaceError::ArgumentOutOfRange(format!("[{n} choose {k}]_{q}")));
    }
    let qb = BigUint::from(q);
    let one = BigUint::from(1u32);
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..k {
        num *= qb.pow(n - i) - &one;
        den *= qb.pow(k - i) - &one;
    }
    Ok(num / den)
}

/// Iterator over all d-subspaces in enumeration order.
pub struct SubspaceIter {
    space: ProjSpace,
    layout: Arc<Layout>,
    next: u64,
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.next >= self.layout.total {
            return None;
        }
        let (p, local) = self.layout.locate(self.next);
        let mut m = vec![0; self.layout.rows * self.layout.cols];
        self.layout.fill(p, local, &mut m);
        self.next += 1;
        Some(self.space.wrap(self.layout.rows, m))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.layout.total - self.next) as usize;
        (n, Some(n))
    }
}

/// A projective subspace in canonical form.
#[derive(Clone)]
pub struct Subspace {
    space: ProjSpace,
    rows: usize,
    data: Vec<u32>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.data == other.data && self.space == other.space
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.data.hash(state);
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.basis_rows())
    }
}

impl Subspace {
    pub fn space(&self) -> &ProjSpace {
        &self.space
    }

    /// Projective dimension; -1 for the empty subspace.
    pub fn dim(&self) -> i64 {
        self.rows as i64 - 1
    }

    /// Vector dimension (number of basis rows).
    pub fn rank(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    /// Canonical basis, row-major.
    pub fn basis(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let n = self.space.cols();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn basis_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Orthogonal complement under the standard bilinear form.
    pub fn dual(&self) -> Subspace {
        let n = self.space.cols();
        let mut out = Vec::new();
        linalg::null_space_of_rref(self.space.field(), &self.data, self.rows, n, &mut out);
        self.space.span_flat(out)
    }

    /// Whether `other` is contained in `self`.
    pub fn contains(&self, other: &Subspace) -> bool {
        if other.rows > self.rows {
            return false;
        }
        let span = self.space.span_flat([self.data.as_slice(), other.data.as_slice()].concat());
        span.rows == self.rows
    }

    /// Whether the vector `v` lies in `self` (the zero vector always does).
    pub fn contains_vector(&self, v: &[u32]) -> bool {
        let f = self.space.field();
        // Reduce against the pivots of the canonical basis.
        let n = self.space.cols();
        let mut w = v.to_vec();
        for i in 0..self.rows {
            let row = self.row(i);
            let p = row.iter().position(|&x| x != 0).unwrap();
            let c = w[p];
            if c != 0 {
                let nc = f.neg(c);
                for j in p..n {
                    w[j] = f.add(w[j], f.mul(nc, row[j]));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn meet(&self, other: &Subspace) -> Result<Subspace, SpaceError> {
        self.space.meet(self, other)
    }

    pub fn join(&self, other: &Subspace) -> Result<Subspace, SpaceError> {
        self.space.span(&[self, other])
    }

    /// Enumeration index among subspaces of the same dimension.
    pub fn index(&self) -> u64 {
        self.space.index_of(self).expect("subspace belongs to its own space")
    }

    /// All points of the subspace, in the enumeration order of PG(dim, q)
    /// mapped through the basis.
    pub fn points(&self) -> Vec<Subspace> {
        self.subspaces_within(0).expect("points of any subspace").collect()
    }

    /// Enumeration indices of all points of the subspace.
    pub fn point_indices(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_point_vector(|v| out.push(self.space.point_index(v)));
        out
    }

    /// Calls `f` on the normalised coordinates of every point.
    pub(crate) fn for_each_point_vector(&self, mut f: impl FnMut(&[u32])) {
        if self.rows == 0 {
            return;
        }
        let field = self.space.field();
        let sub = ProjSpace::new_unchecked(self.rows - 1, field.clone());
        let n = self.space.cols();
        let mut buf = Vec::new();
        let mut v = vec![0u32; n];
        if self.rows == 1 {
            f(&self.data);
            return;
        }
        let layout = sub.layout(0).unwrap();
        for unit in layout.work_units(u64::MAX) {
            layout.scan_unit(unit, &mut buf, |_, c| {
                v.iter_mut().for_each(|x| *x = 0);
                for (i, &ci) in c.iter().enumerate() {
                    if ci == 0 {
                        continue;
                    }
                    let row = &self.data[i * n..(i + 1) * n];
                    for j in 0..n {
                        if row[j] != 0 {
                            v[j] = field.add(v[j], field.mul(ci, row[j]));
                        }
                    }
                }
                linalg::normalize(field, &mut v);
                f(&v);
                true
            });
        }
    }

    /// All d-subspaces contained in `self`.
    pub fn subspaces_within(&self, d: i64) -> Result<impl Iterator<Item = Subspace> + '_, SpaceError> {
        if d > self.dim() || d < -1 {
            return Err(SpaceError::DimensionOutOfRange { d, n: self.dim().max(0) as usize });
        }
        let inner: Box<dyn Iterator<Item = Subspace>> = if self.rows == 0 {
            Box::new(std::iter::once(self.space.empty()))
        } else {
            let sub = ProjSpace::new_unchecked(self.rows - 1, self.space.field().clone());
            Box::new(sub.enumerate(d)?)
        };
        let n = self.space.cols();
        Ok(inner.map(move |c| {
            let mut data = Vec::with_capacity(c.rows * n);
            for i in 0..c.rows {
                data.extend(linalg::combine(self.space.field(), c.row(i), &self.data, n));
            }
            self.space.span_flat(data)
        }))
    }

    /// All d-subspaces containing `self`.
    pub fn subspaces_through(&self, d: i64) -> Result<impl Iterator<Item = Subspace> + '_, SpaceError> {
        let (quotient, complement) = self.quotient(d)?;
        let extra = d - self.dim();
        let inner: Box<dyn Iterator<Item = Subspace>> = match quotient {
            Some(qs) if extra > 0 => Box::new(qs.enumerate(extra - 1)?),
            _ => Box::new(std::iter::once(self.space.empty())),
        };
        Ok(inner.map(move |w| self.lift(&w, &complement)))
    }

    /// A uniformly random d-subspace containing `self`.
    pub fn random_through<R: Rng + ?Sized>(&self, d: i64, rng: &mut R) -> Result<Subspace, SpaceError> {
        let (quotient, complement) = self.quotient(d)?;
        let extra = d - self.dim();
        Ok(match quotient {
            Some(qs) if extra > 0 => self.lift(&qs.random_subspace(extra - 1, rng)?, &complement),
            _ => self.clone(),
        })
    }

    /// The space of the non-pivot coordinates, which parametrises the
    /// quotient by `self`, together with those coordinate positions.
    fn quotient(&self, d: i64) -> Result<(Option<ProjSpace>, Vec<usize>), SpaceError> {
        let n = self.space.cols();
        if d < self.dim() || d > self.space.dim() as i64 {
            return Err(SpaceError::DimensionOutOfRange { d, n: self.space.dim() });
        }
        let piv = linalg::pivots(&self.data, self.rows, n);
        let complement: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
        let qs = (!complement.is_empty())
            .then(|| ProjSpace::new_unchecked(complement.len() - 1, self.space.field().clone()));
        Ok((qs, complement))
    }

    fn lift(&self, w: &Subspace, complement: &[usize]) -> Subspace {
        let n = self.space.cols();
        let mut data = self.data.clone();
        for i in 0..w.rows {
            let start = data.len();
            data.resize(start + n, 0);
            for (k, &c) in complement.iter().enumerate() {
                data[start + c] = w.row(i)[k];
            }
        }
        self.space.span_flat(data)
    }
}

impl ProjSpace {
    /// Like [`ProjSpace::new`] but also allows PG(0, q), used for coordinate
    /// spaces of points.
    pub(crate) fn new_unchecked(n: usize, field: Field) -> ProjSpace {
        let layouts = (0..=n + 1).map(|_| OnceLock::new()).collect();
        ProjSpace(Arc::new(SpaceInner { n, field, layouts }))
    }
}
