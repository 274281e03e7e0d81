//! Linear codes from point sets: minimality, covering radius and
//! saturation.
//!
//! A point set of PG(k-1, q) given as the columns of a generator matrix
//! yields a minimal code exactly when it is a strong blocking set; given as
//! the columns of a parity-check matrix, it yields a covering code of
//! radius rho + 1 exactly when it is rho-saturating.

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::linalg;
use crate::space::{ProjSpace, SpaceError, Subspace};

/// Upper limit on brute-force state counts.
pub const BUDGET: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingError {
    #[error("the points span only a subspace of dimension {rank_minus_one}")]
    NotSpanning { rank_minus_one: i64 },
    #[error("matrix rows are linearly dependent")]
    RankDeficient,
    #[error("rows have inconsistent lengths or entries outside the field")]
    Malformed,
    #[error("work of {0} exceeds the brute-force budget")]
    BudgetExceeded(u64),
    #[error("the point set is empty")]
    Empty,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A linear [n, k]_q code with both a generator and a parity-check matrix.
#[derive(Clone, Debug)]
pub struct LinearCode {
    field: Field,
    n: usize,
    generator: Vec<Vec<u32>>,
    parity: Vec<Vec<u32>>,
}

fn flatten(rows: &[Vec<u32>], n: usize, q: u32) -> Result<Vec<u32>, CodingError> {
    if rows.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= q)) {
        return Err(CodingError::Malformed);
    }
    Ok(rows.concat())
}

/// Basis of the right null space of a full-rank matrix, as rows.
fn complement(field: &Field, rows: &[Vec<u32>], n: usize) -> Result<Vec<Vec<u32>>, CodingError> {
    let mut m = flatten(rows, n, field.order())?;
    let rank = linalg::rref(field, &mut m, n);
    if rank != rows.len() {
        return Err(CodingError::RankDeficient);
    }
    let mut out = Vec::new();
    let count = linalg::null_space_of_rref(field, &m, rank, n, &mut out);
    Ok((0..count).map(|i| out[i * n..(i + 1) * n].to_vec()).collect())
}

impl LinearCode {
    pub fn from_generator(field: &Field, generator: Vec<Vec<u32>>) -> Result<LinearCode, CodingError> {
        let n = generator.first().map_or(0, Vec::len);
        let parity = complement(field, &generator, n)?;
        Ok(LinearCode {
            field: field.clone(),
            n,
            generator,
            parity,
        })
    }

    pub fn from_parity(field: &Field, parity: Vec<Vec<u32>>) -> Result<LinearCode, CodingError> {
        let n = parity.first().map_or(0, Vec::len);
        let generator = complement(field, &parity, n)?;
        Ok(LinearCode {
            field: field.clone(),
            n,
            generator,
            parity,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dimension(&self) -> usize {
        self.generator.len()
    }

    pub fn redundancy(&self) -> usize {
        self.parity.len()
    }

    pub fn generator(&self) -> &[Vec<u32>] {
        &self.generator
    }

    pub fn parity(&self) -> &[Vec<u32>] {
        &self.parity
    }

    /// True when every coordinate is nonzero in some codeword.
    pub fn is_non_degenerate(&self) -> bool {
        (0..self.n).all(|j| self.generator.iter().any(|r| r[j] != 0))
    }

    /// `m G` for a message `m`.
    pub fn encode(&self, message: &[u32]) -> Vec<u32> {
        linalg::combine(&self.field, message, &self.generator.concat(), self.n)
    }

    /// `H x^T` for a word `x`.
    pub fn syndrome(&self, word: &[u32]) -> Vec<u32> {
        let mut out = Vec::new();
        linalg::mul_t(&self.field, &self.parity.concat(), word, self.n, &mut out);
        out
    }
}

/// Columns of `points`, as canonical coordinate vectors, stacked into a
/// matrix with N+1 rows.
pub fn points_matrix(points: &[Subspace]) -> Result<Vec<Vec<u32>>, CodingError> {
    let first = points.first().ok_or(CodingError::Empty)?;
    let space = first.space();
    let refs: Vec<&Subspace> = points.iter().collect();
    let span = space.span(&refs)?;
    if span.dim() != space.dim() as i64 {
        return Err(CodingError::NotSpanning {
            rank_minus_one: span.dim(),
        });
    }
    Ok((0..space.cols()).map(|i| points.iter().map(|p| p.row(0)[i]).collect()).collect())
}

/// The code whose generator matrix has the given points as columns.
pub fn code_from_points(points: &[Subspace]) -> Result<LinearCode, CodingError> {
    let g = points_matrix(points)?;
    LinearCode::from_generator(points[0].space().field(), g)
}

/// The code whose parity-check matrix has the given points as columns.
pub fn code_from_parity_points(points: &[Subspace]) -> Result<LinearCode, CodingError> {
    let h = points_matrix(points)?;
    LinearCode::from_parity(points[0].space().field(), h)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimality {
    pub minimal: bool,
    /// Two non-proportional codewords, the support of the first inside
    /// the support of the second.
    pub witness: Option<(Vec<u32>, Vec<u32>)>,
    /// Projective codeword classes examined.
    pub codewords: u64,
}

fn support(word: &[u32], words: usize) -> Vec<u64> {
    let mut s = vec![0u64; words];
    for (j, &x) in word.iter().enumerate() {
        if x != 0 {
            s[j / 64] |= 1 << (j % 64);
        }
    }
    s
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Brute-force minimality test over one codeword per scalar class.
pub fn is_minimal_code(code: &LinearCode) -> Result<Minimality, CodingError> {
    let k = code.dimension();
    let q = code.field.order() as u64;
    let total = q.checked_pow(k as u32).unwrap_or(u64::MAX);
    if total > BUDGET {
        return Err(CodingError::BudgetExceeded(total));
    }
    if k == 0 {
        return Ok(Minimality {
            minimal: true,
            witness: None,
            codewords: 0,
        });
    }
    let words = code.n.div_ceil(64).max(1);
    let messages = ProjSpace::new_unchecked(k - 1, code.field.clone());
    let mut classes: Vec<(u32, Vec<u64>, Vec<u32>)> = messages
        .enumerate(0)?
        .map(|m| {
            let c = code.encode(m.row(0));
            let s = support(&c, words);
            (s.iter().map(|w| w.count_ones()).sum(), s, c)
        })
        .collect();
    // A support can only sit inside one of at least its weight.
    classes.sort_by_key(|c| c.0);
    let found = (0..classes.len()).into_par_iter().find_first(|&i| {
        let (wi, si, _) = &classes[i];
        classes.iter().enumerate().any(|(j, (wj, sj, _))| j != i && wj >= wi && subset(si, sj))
    });
    let witness = found.map(|i| {
        let (wi, si, ci) = &classes[i];
        let (_, _, cj) = classes
            .iter()
            .enumerate()
            .find(|(j, (wj, sj, _))| *j != i && wj >= wi && subset(si, sj))
            .map(|(_, c)| c)
            .unwrap();
        (ci.clone(), cj.clone())
    });
    Ok(Minimality {
        minimal: witness.is_none(),
        witness,
        codewords: classes.len() as u64,
    })
}

/// Exact covering radius by breadth-first search over syndromes.
pub fn covering_radius(code: &LinearCode) -> Result<u32, CodingError> {
    Ok(syndrome_layers(code)?.len() as u32 - 1)
}

/// Number of syndromes first reached at each weight, from weight zero up.
/// The entries sum to q^r.
pub fn syndrome_layers(code: &LinearCode) -> Result<Vec<u64>, CodingError> {
    let f = &code.field;
    let q = f.order() as u64;
    let r = code.redundancy();
    let states = q.checked_pow(r as u32).unwrap_or(u64::MAX);
    if states > BUDGET {
        return Err(CodingError::BudgetExceeded(states));
    }
    let encode = |v: &[u32]| v.iter().rev().fold(0u64, |acc, &x| acc * q + x as u64);
    let mut steps: Vec<u64> = Vec::new();
    for j in 0..code.n {
        let col: Vec<u32> = code.parity.iter().map(|row| row[j]).collect();
        for a in 1..f.order() {
            let s = encode(&col.iter().map(|&x| f.mul(a, x)).collect::<Vec<_>>());
            if s != 0 && !steps.contains(&s) {
                steps.push(s);
            }
        }
    }
    // Index addition is digit-wise addition mod p, which for p = 2 is XOR of
    // the packed syndromes.
    let xor = f.characteristic() == 2;
    let p = f.characteristic() as u64;
    let add = |a: u64, b: u64| -> u64 {
        if xor {
            return a ^ b;
        }
        let (mut a, mut b, mut w, mut out) = (a, b, 1u64, 0u64);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * w;
            a /= p;
            b /= p;
            w *= p;
        }
        out
    };
    let mut seen = vec![false; states as usize];
    seen[0] = true;
    let mut frontier = vec![0u64];
    let mut layers = vec![1u64];
    loop {
        let mut next = Vec::new();
        for &s in &frontier {
            for &g in &steps {
                let t = add(s, g);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next.len() as u64);
        frontier = next;
    }
    if layers.iter().sum::<u64>() != states {
        return Err(CodingError::RankDeficient);
    }
    Ok(layers)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub saturated: bool,
    /// A point not rho-saturated by the set.
    pub witness: Option<Subspace>,
    pub subsets: u64,
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Whether every point of the space lies in a subspace of dimension at
/// most `rho` spanned by points of `set`.
pub fn is_saturating(set: &[Subspace], rho: usize) -> Result<Saturation, CodingError> {
    let first = set.first().ok_or(CodingError::Empty)?;
    let space = first.space().clone();
    let mut pts: Vec<Subspace> = Vec::new();
    for p in set {
        if !pts.contains(p) {
            pts.push(p.clone());
        }
    }
    let size = (rho + 1).min(pts.len());
    let subsets = binomial(pts.len() as u64, size as u64);
    let q = space.q() as u64;
    let per_span = (q.saturating_pow(rho as u32 + 1) - 1) / (q - 1);
    let work = subsets.saturating_mul(per_span);
    if work > BUDGET * 64 || space.num_points() > BUDGET {
        return Err(CodingError::BudgetExceeded(work));
    }
    let mut combo: Vec<usize> = (0..size).collect();
    let mut combos = Vec::with_capacity(subsets as usize);
    loop {
        combos.push(combo.clone());
        let Some(i) = (0..size).rev().find(|&i| combo[i] != i + pts.len() - size) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..size {
            combo[j] = combo[j - 1] + 1;
        }
    }
    let marks: Vec<Vec<u64>> = combos
        .par_chunks(64)
        .map(|chunk| {
            let mut local = Vec::new();
            for c in chunk {
                let refs: Vec<&Subspace> = c.iter().map(|&i| &pts[i]).collect();
                let span = space.span(&refs).expect("same space");
                span.for_each_point_vector(|v| local.push(space.point_index(v)));
            }
            local
        })
        .collect();
    let mut covered = vec![false; space.num_points() as usize];
    for idx in marks.into_iter().flatten() {
        covered[idx as usize] = true;
    }
    let witness = covered
        .iter()
        .position(|&c| !c)
        .map(|i| space.subspace_at(0, i as u64).expect("point index in range"));
    Ok(Saturation {
        saturated: witness.is_none(),
        witness,
        subsets,
    })
}

/// The least rho for which `set` is rho-saturating.
pub fn saturation_degree(set: &[Subspace]) -> Result<usize, CodingError> {
    let n = set.first().ok_or(CodingError::Empty)?.space().dim();
    for rho in 0..=n {
        if is_saturating(set, rho)?.saturated {
            return Ok(rho);
        }
    }
    Err(CodingError::NotSpanning {
        rank_minus_one: set[0].space().span(&set.iter().collect::<Vec<_>>())?.dim(),
    })
}

/// The same coordinates read in PG(N, F) for an extension F of the
/// coordinate field: base elements keep their indices in F.
pub fn embed_points(points: &[Subspace], ambient: &Field) -> Result<Vec<Subspace>, CodingError> {
    let first = points.first().ok_or(CodingError::Empty)?;
    if !ambient.is_extension_of(first.space().field()) {
        return Err(CodingError::Field(FieldError::NotAnExtensionOverRequestedBase));
    }
    let space = ProjSpace::new(first.space().dim(), ambient.clone())?;
    points.iter().map(|p| Ok(space.point(p.row(0))?)).collect()
}

/// Embeds a strong k-blocking set of PG(N, q) into PG(N, q^(N-k+1)) and
/// checks that it is (N-k)-saturating there.
pub fn embed_and_check(points: &[Subspace], k: usize) -> Result<(Vec<Subspace>, Saturation), CodingError> {
    let first = points.first().ok_or(CodingError::Empty)?;
    let n = first.space().dim();
    if k >= n {
        return Err(CodingError::Malformed);
    }
    let ambient = first.space().field().extension((n - k + 1) as u32)?;
    let embedded = embed_points(points, &ambient)?;
    let sat = is_saturating(&embedded, n - k)?;
    Ok((embedded, sat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(q: u32) -> Field {
        Field::gf(q).unwrap()
    }

    fn hamming_7_4() -> LinearCode {
        let h = vec![vec![1, 0, 1, 0, 1, 0, 1], vec![0, 1, 1, 0, 0, 1, 1], vec![0, 0, 0, 1, 1, 1, 1]];
        LinearCode::from_parity(&gf(2), h).unwrap()
    }

    /// Covering radius as the largest distance from any word to the code.
    fn brute_radius(code: &LinearCode) -> u32 {
        let f = code.field();
        let q = f.order();
        let n = code.len();
        let k = code.dimension();
        let all = |len: usize| -> Vec<Vec<u32>> {
            let mut out = vec![vec![]];
            for _ in 0..len {
                out = out.into_iter().flat_map(|v| (0..q).map(move |x| [v.clone(), vec![x]].concat())).collect();
            }
            out
        };
        let words: Vec<Vec<u32>> = all(k).iter().map(|m| code.encode(m)).collect();
        all(n)
            .iter()
            .map(|x| words.iter().map(|c| x.iter().zip(c).filter(|(a, b)| a != b).count()).min().unwrap() as u32)
            .max()
            .unwrap()
    }

    #[test]
    fn hamming_code_has_radius_one() {
        let c = hamming_7_4();
        assert_eq!(c.dimension(), 4);
        assert_eq!(covering_radius(&c).unwrap(), 1);
        assert_eq!(syndrome_layers(&c).unwrap(), vec![1, 7]);
        assert_eq!(brute_radius(&c), 1);
    }

    #[test]
    fn generator_and_parity_are_orthogonal() {
        let c = hamming_7_4();
        for row in c.generator() {
            assert!(c.syndrome(row).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn full_space_has_radius_zero() {
        let f = gf(3);
        let c = LinearCode::from_generator(&f, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(c.redundancy(), 0);
        assert_eq!(covering_radius(&c).unwrap(), 0);
    }

    #[test]
    fn frame_gives_identity_generator() {
        let s = ProjSpace::new(3, gf(3)).unwrap();
        let pts: Vec<Subspace> = (0..4).map(|i| s.unit_point(i)).collect();
        let c = code_from_points(&pts).unwrap();
        assert_eq!(c.generator(), &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        assert!(matches!(code_from_points(&pts[..3]), Err(CodingError::NotSpanning { rank_minus_one: 2 })));
    }

    #[test]
    fn nested_supports_are_not_minimal() {
        let f = gf(2);
        let c = LinearCode::from_generator(&f, vec![vec![1, 1, 0, 0], vec![1, 1, 1, 1]]).unwrap();
        let m = is_minimal_code(&c).unwrap();
        assert!(!m.minimal);
        let (a, b) = m.witness.unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| *x == 0 || *y != 0));
        assert_ne!(a, b);
    }

    #[test]
    fn whole_space_points_give_minimal_code() {
        let s = ProjSpace::new(2, gf(2)).unwrap();
        let pts: Vec<Subspace> = s.enumerate(0).unwrap().collect();
        assert!(is_minimal_code(&code_from_points(&pts).unwrap()).unwrap().minimal);
    }

    #[test]
    fn saturation_of_small_sets() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let s = ProjSpace::new(n, gf(q)).unwrap();
            let all: Vec<Subspace> = s.enumerate(0).unwrap().collect();
            assert_eq!(saturation_degree(&all).unwrap(), 0);
            let frame: Vec<Subspace> = (0..=n).map(|i| s.unit_point(i)).collect();
            // Brute force: a point is saturated at level rho when its
            // support has at most rho + 1 entries.
            let brute = all.iter().map(|p| p.row(0).iter().filter(|&&x| x != 0).count() - 1).max().unwrap();
            assert_eq!(saturation_degree(&frame).unwrap(), brute);
            assert_eq!(brute, n);
        }
    }

    #[test]
    fn saturating_sets_give_radius_rho_plus_one() {
        let s = ProjSpace::new(2, gf(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let all: Vec<Subspace> = s.enumerate(0).unwrap().collect();
        for _ in 0..20 {
            let size = rng.gen_range(3..8);
            let pick: Vec<Subspace> = all.choose_multiple(&mut rng, size).cloned().collect();
            let Ok(rho) = saturation_degree(&pick) else { continue };
            let code = code_from_parity_points(&pick).unwrap();
            assert_eq!(covering_radius(&code).unwrap() as usize, rho + 1);
        }
    }

    #[test]
    fn embedded_blocking_sets_saturate() {
        // The tetrahedron of PG(3, 2) is a strong 1-blocking set, hence
        // 2-saturating in PG(3, 8).
        let s = ProjSpace::new(3, gf(2)).unwrap();
        let tet = crate::constructions::tetrahedron(&s).unwrap();
        let pts: Vec<Subspace> =
            crate::higgledy::coverage(&tet.arrangement).points.iter().map(|&i| s.subspace_at(0, i).unwrap()).collect();
        let (emb, sat) = embed_and_check(&pts, 1).unwrap();
        assert_eq!(emb[0].space().q(), 8);
        assert!(sat.saturated);
        // A frame of PG(2, 3) is not strong blocking and spans only three
        // lines of PG(2, 9).
        let s = ProjSpace::new(2, gf(3)).unwrap();
        let frame: Vec<Subspace> = (0..3).map(|i| s.unit_point(i)).collect();
        let (_, sat) = embed_and_check(&frame, 1).unwrap();
        assert!(!sat.saturated);
        let witness = sat.witness.unwrap();
        assert!(witness.row(0).iter().all(|&x| x != 0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn radius_invariant_under_column_moves(seed in any::<u64>()) {
            let f = gf(3);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = ProjSpace::new(2, f.clone()).unwrap();
            let all: Vec<Subspace> = s.enumerate(0).unwrap().collect();
            let mut pick: Vec<Subspace> = all.choose_multiple(&mut rng, 6).cloned().collect();
            prop_assume!(s.span(&pick.iter().collect::<Vec<_>>()).unwrap().dim() == 2);
            let h = points_matrix(&pick).unwrap();
            let base = covering_radius(&LinearCode::from_parity(&f, h).unwrap()).unwrap();
            pick.shuffle(&mut rng);
            let mut h2 = points_matrix(&pick).unwrap();
            for j in 0..pick.len() {
                let a = rng.gen_range(1..3);
                for row in h2.iter_mut() {
                    row[j] = f.mul(a, row[j]);
                }
            }
            let code = LinearCode::from_parity(&f, h2).unwrap();
            prop_assert_eq!(covering_radius(&code).unwrap(), base);
            prop_assert_eq!(brute_radius(&code), base);
            let layers = syndrome_layers(&code).unwrap();
            prop_assert_eq!(layers.iter().sum::<u64>(), 27);
        }
    }
}
