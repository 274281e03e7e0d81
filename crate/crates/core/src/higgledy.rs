//! Arrangements of subspaces and their higgledy-piggledy certificates.
//!
//! A set K of k-subspaces of PG(N, q) is higgledy-piggledy when the union of
//! its points meets every (N-k)-subspace κ in a set spanning κ. Two
//! independent deciders are provided:
//!
//! * the strong scan checks that defining condition for every κ;
//! * the transversal scan looks for an (N-k-1)-subspace meeting every
//!   element. If none exists K is higgledy-piggledy; when |K| <= q the
//!   existence of one also proves that K is not.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::Ops;
use crate::linalg;
use crate::space::{Layout, ProjSpace, SpaceError, Subspace, WorkUnit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("k = {k} is out of range for PG({n}, q)")]
    InvalidK { k: i64, n: usize },
    #[error("element {index} has dimension {found}, expected {expected}")]
    WrongDimension { index: usize, expected: i64, found: i64 },
    #[error("elements {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// How an arrangement was produced; enough to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Provenance {
    pub construction: String,
    pub q: u32,
    pub seed: Option<u64>,
    /// Index of every deterministic pick, in the order the picks were made.
    pub choices: Vec<u64>,
}

/// An ordered set of pairwise distinct k-subspaces of one space.
#[derive(Clone, Debug)]
pub struct Arrangement {
    space: ProjSpace,
    k: i64,
    elements: Vec<Subspace>,
    pub provenance: Option<Provenance>,
}

impl PartialEq for Arrangement {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.k == other.k && self.elements == other.elements
    }
}

impl Arrangement {
    pub fn new(space: &ProjSpace, k: i64, elements: Vec<Subspace>) -> Result<Arrangement, ArrangementError> {
        let n = space.dim();
        if k < 0 || k >= n as i64 {
            return Err(ArrangementError::InvalidK { k, n });
        }
        for (i, e) in elements.iter().enumerate() {
            if e.space() != space {
                return Err(SpaceError::SpaceMismatch.into());
            }
            if e.dim() != k {
                return Err(ArrangementError::WrongDimension {
                    index: i,
                    expected: k,
                    found: e.dim(),
                });
            }
            if let Some(j) = elements[..i].iter().position(|x| x == e) {
                return Err(ArrangementError::Duplicate(j, i));
            }
        }
        Ok(Arrangement {
            space: space.clone(),
            k,
            elements,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, p: Provenance) -> Arrangement {
        self.provenance = Some(p);
        self
    }

    pub fn space(&self) -> &ProjSpace {
        &self.space
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.space.dim()
    }

    pub fn q(&self) -> u32 {
        self.space.q()
    }

    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The points on at least one element, in enumeration order.
    pub fn covered_points(&self) -> Vec<Subspace> {
        coverage(self)
            .points
            .iter()
            .map(|&i| self.space.subspace_at(0, i).expect("point index in range"))
            .collect()
    }

    /// Dimension of the subspaces a transversal must have, N - k - 1.
    pub fn transversal_dim(&self) -> i64 {
        self.n() as i64 - self.k - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    HigPig,
    NotHigPig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    StrongBlockingScan,
    TransversalScan,
}

/// Method requested by a caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Strong,
    Transversal,
}

/// Which enumeration the transversal search used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransversalPath {
    /// Every subspace of the transversal dimension.
    Full,
    /// Only subspaces through a point of each of the first two elements.
    Pruned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// An (N-k)-subspace whose intersection with the union does not span it.
    Deficient { index: u64, subspace: Subspace },
    /// An (N-k-1)-subspace meeting every element.
    Transversal { index: u64, subspace: Subspace },
}

impl Witness {
    pub fn subspace(&self) -> &Subspace {
        match self {
            Witness::Deficient { subspace, .. } | Witness::Transversal { subspace, .. } => subspace,
        }
    }

    pub fn index(&self) -> u64 {
        match self {
            Witness::Deficient { index, .. } | Witness::Transversal { index, .. } => *index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub method: Method,
    pub witness: Option<Witness>,
    pub covered_points: u64,
    pub intersection_dims: Vec<Vec<i64>>,
    /// Subspaces examined; for a failure, the witness index plus one.
    pub scanned: u64,
    pub elapsed_ms: u64,
    /// Set when the transversal scan took part.
    pub transversal_path: Option<TransversalPath>,
    /// Outcome of a cheap transversal scan run alongside a strong scan:
    /// `Some(true)` when a transversal exists.
    pub advisory_transversal: Option<bool>,
}

impl Certificate {
    pub fn is_higpig(&self) -> bool {
        self.verdict == Verdict::HigPig
    }

    /// Re-derives the failure described by the witness using only span and
    /// meet. Returns true for HigPig certificates without a witness.
    pub fn recheck(&self, arr: &Arrangement) -> bool {
        let space = arr.space();
        match (&self.verdict, &self.witness) {
            (Verdict::HigPig, None) => true,
            (Verdict::NotHigPig, Some(Witness::Deficient { subspace, .. })) => {
                if subspace.dim() != arr.n() as i64 - arr.k() {
                    return false;
                }
                let meets: Vec<Subspace> = arr.elements().iter().map(|e| space.meet(subspace, e).unwrap()).collect();
                let refs: Vec<&Subspace> = meets.iter().collect();
                space.span(&refs).unwrap().dim() < subspace.dim()
            }
            (Verdict::NotHigPig, Some(Witness::Transversal { subspace, .. })) => {
                subspace.dim() == arr.transversal_dim()
                    && arr.elements().iter().all(|e| !space.meet(subspace, e).unwrap().is_empty())
                    && arr.len() <= arr.q() as usize
            }
            (Verdict::NotHigPig, None) => arr.is_empty(),
            _ => false,
        }
    }
}

/// Point coverage of an arrangement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    /// Sorted enumeration indices of covered points.
    pub points: Vec<u64>,
    /// Entry (i, j) is the dimension of the meet of elements i and j.
    pub intersection_dims: Vec<Vec<i64>>,
}

impl Coverage {
    pub fn size(&self) -> u64 {
        self.points.len() as u64
    }

    /// Number of unordered pairs of distinct elements that meet.
    pub fn intersecting_pairs(&self) -> usize {
        let m = &self.intersection_dims;
        (0..m.len()).map(|i| (i + 1..m.len()).filter(|&j| m[i][j] >= 0).count()).sum()
    }
}

pub fn coverage(arr: &Arrangement) -> Coverage {
    let mut points: Vec<u64> = arr.elements().iter().flat_map(|e| e.point_indices()).collect();
    points.sort_unstable();
    points.dedup();
    Coverage {
        points,
        intersection_dims: intersection_dims(arr),
    }
}

pub fn intersection_dims(arr: &Arrangement) -> Vec<Vec<i64>> {
    let e = arr.elements();
    let mut m = vec![vec![0i64; e.len()]; e.len()];
    for i in 0..e.len() {
        m[i][i] = e[i].dim();
        for j in i + 1..e.len() {
            let d = e[i].meet(&e[j]).expect("same space").dim();
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

/// Per-worker scratch storage for the kernels.
#[derive(Default)]
struct Scratch {
    prod: Vec<u32>,
    kernel: Vec<u32>,
    acc: Vec<u32>,
    tmp: Vec<u32>,
}

/// Row-major annihilator bases of the elements, `s = N - k` rows each.
struct Annihilators {
    mats: Vec<Vec<u32>>,
    cols: usize,
}

impl Annihilators {
    fn new(arr: &Arrangement) -> Annihilators {
        Annihilators {
            mats: arr.elements().iter().map(|e| e.dual().basis().to_vec()).collect(),
            cols: arr.space().cols(),
        }
    }
}

/// True when the r-row matrix `kappa` spans a κ that the union fails to
/// span.
#[inline]
fn is_deficient<O: Ops>(o: O, kappa: &[u32], r: usize, ann: &Annihilators, sc: &mut Scratch) -> bool {
    sc.acc.clear();
    let mut acc_rank = 0;
    for a in &ann.mats {
        // Rows of A K^T give linear conditions on coefficient vectors c with
        // c K inside the element.
        linalg::mul_t(o, a, kappa, ann.cols, &mut sc.prod);
        let rank = linalg::rref(o, &mut sc.prod, r);
        if rank == r {
            continue;
        }
        linalg::null_space_of_rref(o, &sc.prod, rank, r, &mut sc.kernel);
        sc.acc.truncate(acc_rank * r);
        sc.acc.extend_from_slice(&sc.kernel);
        acc_rank = linalg::rref(o, &mut sc.acc, r);
        if acc_rank == r {
            return false;
        }
    }
    true
}

/// True when the t-row matrix `tr` meets every element.
#[inline]
fn meets_all<O: Ops>(o: O, tr: &[u32], t: usize, ann: &Annihilators, sc: &mut Scratch) -> bool {
    for a in &ann.mats {
        linalg::mul_t(o, a, tr, ann.cols, &mut sc.prod);
        if linalg::rank_with(o, &sc.prod, t, &mut sc.tmp) == t {
            return false;
        }
    }
    true
}

fn chunk_size(total: u64) -> u64 {
    let threads = rayon::current_num_threads() as u64;
    (total / (threads * 32).max(1)).clamp(256, 1 << 16)
}

/// Lowest global index in `layout` for which `hit` holds, scanning in
/// parallel. The result does not depend on the number of workers.
fn lowest_hit<F>(layout: &Layout, hit: F) -> Option<u64>
where
    F: Fn(&[u32], &mut Scratch) -> bool + Sync,
{
    let best = AtomicU64::new(u64::MAX);
    let units: Vec<WorkUnit> = layout.work_units(chunk_size(layout.total));
    units.par_iter().for_each_init(
        || (Scratch::default(), Vec::new()),
        |(sc, buf), &unit| {
            let base = layout.patterns[unit.pattern].offset;
            if base + unit.start >= best.load(Ordering::Relaxed) {
                return;
            }
            layout.scan_unit(unit, buf, |idx, m| {
                if hit(m, sc) {
                    best.fetch_min(idx, Ordering::Relaxed);
                    return false;
                }
                // Stop once a lower failure is already known.
                idx < best.load(Ordering::Relaxed)
            });
        },
    );
    match best.into_inner() {
        u64::MAX => None,
        b => Some(b),
    }
}

macro_rules! dispatch {
    ($space:expr, |$o:ident| $body:expr) => {
        match $space.field().small_tables() {
            Some($o) => $body,
            None => {
                let $o = $space.field();
                $body
            }
        }
    };
}

/// Decides the defining condition over every (N-k)-subspace.
pub fn verify_strong_blocking(arr: &Arrangement) -> Certificate {
    let start = Instant::now();
    let space = arr.space();
    let d = arr.n() as i64 - arr.k();
    let layout = space.layout(d).expect("dimension in range");
    let witness_index = if arr.is_empty() {
        Some(0)
    } else {
        let ann = Annihilators::new(arr);
        let r = layout.rows;
        dispatch!(space, |o| lowest_hit(&layout, |m, sc| is_deficient(o, m, r, &ann, sc)))
    };
    let cov = coverage(arr);
    let (verdict, witness, scanned) = match witness_index {
        None => (Verdict::HigPig, None, layout.total),
        Some(i) => (
            Verdict::NotHigPig,
            Some(Witness::Deficient {
                index: i,
                subspace: space.subspace_at(d, i).unwrap(),
            }),
            i + 1,
        ),
    };
    Certificate {
        verdict,
        method: Method::StrongBlockingScan,
        witness,
        covered_points: cov.size(),
        intersection_dims: cov.intersection_dims,
        scanned,
        elapsed_ms: start.elapsed().as_millis() as u64,
        transversal_path: None,
        advisory_transversal: None,
    }
}

/// Result of a transversal search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalSearch {
    /// Lowest-index d-subspace meeting every element.
    pub witness: Option<(u64, Subspace)>,
    pub path: TransversalPath,
    /// Subspaces tested.
    pub scanned: u64,
}

fn pruned_work(arr: &Arrangement, d: i64) -> Option<u128> {
    if arr.len() < 2 || d < 0 {
        return None;
    }
    let q = arr.q() as u128;
    let pts = |e: &Subspace| (q.pow(e.rank() as u32) - 1) / (q - 1);
    let n = arr.space().cols() as u32;
    // Subspaces of dimension d through a fixed line, or through a point.
    let through_line = if d >= 1 {
        crate::space::gaussian_binomial(n - 2, (d - 1) as u32, arr.q())
            .ok()
            .and_then(|b| u128::try_from(b).ok())?
    } else {
        1
    };
    Some(pts(&arr.elements()[0]) * pts(&arr.elements()[1]) * through_line)
}

/// Chooses the cheaper transversal path by estimated number of tests.
pub fn preferred_path(arr: &Arrangement, d: i64) -> TransversalPath {
    let full = arr.space().count(d).map(u128::from).unwrap_or(u128::MAX);
    match pruned_work(arr, d) {
        Some(p) if p < full => TransversalPath::Pruned,
        _ => TransversalPath::Full,
    }
}

/// Searches for a d-subspace meeting every element, following `path`.
/// Both paths return the same lowest-index witness.
pub fn transversal_search(arr: &Arrangement, d: i64, path: TransversalPath) -> Result<TransversalSearch, SpaceError> {
    let space = arr.space();
    let layout = space.layout(d)?;
    if arr.is_empty() {
        let w = (layout.total > 0).then(|| (0, space.subspace_at(d, 0).unwrap()));
        return Ok(TransversalSearch {
            witness: w,
            path: TransversalPath::Full,
            scanned: 1,
        });
    }
    let path = if arr.len() < 2 || d < 0 { TransversalPath::Full } else { path };
    let ann = Annihilators::new(arr);
    let t = layout.rows;
    match path {
        TransversalPath::Full => {
            let hit = dispatch!(space, |o| lowest_hit(&layout, |m, sc| meets_all(o, m, t, &ann, sc)));
            Ok(TransversalSearch {
                witness: hit.map(|i| (i, space.subspace_at(d, i).unwrap())),
                path,
                scanned: hit.map_or(layout.total, |i| i + 1),
            })
        }
        TransversalPath::Pruned => {
            let bases = pruned_bases(arr, d);
            let scanned = AtomicU64::new(0);
            let best = bases
                .par_iter()
                .map_init(Scratch::default, |sc, b| {
                    let mut local: Option<u64> = None;
                    for cand in b.subspaces_through(d).expect("dimension checked") {
                        scanned.fetch_add(1, Ordering::Relaxed);
                        let hit = dispatch!(space, |o| meets_all(o, cand.basis(), t, &ann, sc));
                        if hit {
                            let idx = layout.index_of(cand.basis());
                            local = Some(local.map_or(idx, |l| l.min(idx)));
                        }
                    }
                    local
                })
                .flatten()
                .min();
            Ok(TransversalSearch {
                witness: best.map(|i| (i, space.subspace_at(d, i).unwrap())),
                path,
                scanned: scanned.into_inner(),
            })
        }
    }
}

/// Spans of a point of the first element with a point of the second that
/// have dimension at most `d`.
fn pruned_bases(arr: &Arrangement, d: i64) -> Vec<Subspace> {
    let space = arr.space();
    let p1 = arr.elements()[0].points();
    let p2 = arr.elements()[1].points();
    let mut out = Vec::with_capacity(p1.len() * p2.len());
    for a in &p1 {
        for b in &p2 {
            let s = space.span(&[a, b]).unwrap();
            if s.dim() <= d {
                out.push(s);
            }
        }
    }
    out
}

/// Whether any d-subspace meets every element; stops at the first one.
pub fn has_transversal(arr: &Arrangement, d: i64) -> bool {
    let space = arr.space();
    let Ok(layout) = space.layout(d) else {
        return false;
    };
    if arr.is_empty() {
        return layout.total > 0;
    }
    let ann = Annihilators::new(arr);
    let t = layout.rows;
    let mut sc = Scratch::default();
    match preferred_path(arr, d) {
        TransversalPath::Pruned => pruned_bases(arr, d).iter().any(|b| {
            b.subspaces_through(d)
                .unwrap()
                .any(|c| dispatch!(space, |o| meets_all(o, c.basis(), t, &ann, &mut sc)))
        }),
        TransversalPath::Full => {
            dispatch!(space, |o| lowest_hit(&layout, |m, sc| meets_all(o, m, t, &ann, sc))).is_some()
        }
    }
}

/// The first (N-k-1)-subspace meeting every element, if any.
pub fn find_transversal(arr: &Arrangement) -> Option<Subspace> {
    let d = arr.transversal_dim();
    transversal_search(arr, d, preferred_path(arr, d))
        .ok()
        .and_then(|s| s.witness.map(|(_, w)| w))
}

const ADVISORY_LIMIT: u64 = 20_000;

/// Decides the higgledy-piggledy property.
///
/// `Auto` uses the transversal scan when |K| <= q, where it is a complete
/// decider, and the strong scan otherwise. An explicit `Transversal` request
/// with |K| > q is honoured when no transversal exists; if one is found the
/// strong scan decides, because a transversal proves nothing at that size.
pub fn is_higgledy_piggledy(arr: &Arrangement, choice: MethodChoice) -> Certificate {
    let small = arr.len() <= arr.q() as usize;
    let d = arr.transversal_dim();
    let use_transversal = match choice {
        MethodChoice::Auto => small,
        MethodChoice::Strong => false,
        MethodChoice::Transversal => true,
    };
    if !use_transversal {
        let mut cert = verify_strong_blocking(arr);
        if choice == MethodChoice::Auto && arr.space().count(d).is_ok_and(|c| c <= ADVISORY_LIMIT) {
            cert.advisory_transversal = Some(has_transversal(arr, d));
        }
        return cert;
    }
    let start = Instant::now();
    let path = preferred_path(arr, d);
    let search = transversal_search(arr, d, path).expect("dimension in range");
    if search.witness.is_some() && !small {
        let mut cert = verify_strong_blocking(arr);
        cert.transversal_path = Some(search.path);
        cert.advisory_transversal = Some(true);
        return cert;
    }
    let cov = coverage(arr);
    let (verdict, witness, scanned) = match search.witness {
        None => (Verdict::HigPig, None, search.scanned),
        Some((index, subspace)) => (
            Verdict::NotHigPig,
            Some(Witness::Transversal { index, subspace }),
            index + 1,
        ),
    };
    Certificate {
        verdict,
        method: Method::TransversalScan,
        witness,
        covered_points: cov.size(),
        intersection_dims: cov.intersection_dims,
        scanned,
        elapsed_ms: start.elapsed().as_millis() as u64,
        transversal_path: Some(search.path),
        advisory_transversal: None,
    }
}

/// Fast check used by searches: strong-scan verdict only, stopping at the
/// first deficient subspace in enumeration order.
pub fn quick_is_higpig(arr: &Arrangement) -> bool {
    if arr.is_empty() {
        return false;
    }
    let space = arr.space();
    let d = arr.n() as i64 - arr.k();
    let layout = space.layout(d).expect("dimension in range");
    let ann = Annihilators::new(arr);
    let r = layout.rows;
    let mut sc = Scratch::default();
    let mut buf = Vec::new();
    let mut ok = true;
    dispatch!(space, |o| {
        for unit in layout.work_units(u64::MAX) {
            if !layout.scan_unit(unit, &mut buf, |_, m| !is_deficient(o, m, r, &ann, &mut sc)) {
                ok = false;
                break;
            }
        }
    });
    ok
}

/// Lower bound on the size of a higgledy-piggledy set of k-subspaces of
/// PG(N, q), symmetric under k -> N-1-k.
pub fn lower_bound(n: u32, k: u32, q: u32) -> Result<u32, SpaceError> {
    if k >= n || q < 2 {
        return Err(SpaceError::ArgumentOutOfRange(format!("lower_bound({n}, {k}, {q})")));
    }
    let a = (k + 1) + (1..=k + 1).map(|i| (n - k - 1) / i).sum::<u32>();
    let b = (n - k) + (1..=n - k).map(|i| k / i).sum::<u32>();
    Ok(q.min(a.max(b)) + 1)
}

/// Lower bound on the size of a higgledy-piggledy line set of PG(N, q).
pub fn lower_bound_lines(n: u32, q: u32) -> Result<u32, SpaceError> {
    if n < 1 || q < 2 {
        return Err(SpaceError::ArgumentOutOfRange(format!("lower_bound_lines({n}, {q})")));
    }
    Ok(n + n / 2 - (n - 1) / q)
}
