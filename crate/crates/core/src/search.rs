//! Seeded randomized search for arrangements matching a template.
//!
//! Trial `t` of a search with master seed `s` is a pure function of
//! [`trial_seed`]`(s, t)`, so serial and parallel runs explore the same
//! trials and the lowest successful trial always wins.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constructions::{ConstructionError, SpreadElementMap};
use crate::field::Field;
use crate::higgledy::{has_transversal, is_higgledy_piggledy, quick_is_higpig, Arrangement, Certificate, MethodChoice};
use crate::space::{ProjSpace, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// The first two drawn elements both contain a random common
    /// subspace of this dimension.
    PairShares(i64),
    /// Every drawn element is the field-reduction image of a random point
    /// of PG(n', q^(k+1)).
    AllFromSpread { n_small: usize },
    /// Elements are pairwise disjoint, except for the pair forced to meet
    /// by [`Constraint::PairShares`].
    PairwiseDisjoint,
    /// Elements placed first, unchanged, in every trial.
    FixedElements(Vec<Subspace>),
}

#[derive(Clone, Debug)]
pub struct SearchTemplate {
    pub space: ProjSpace,
    pub k: i64,
    pub cardinality: usize,
    pub constraints: Vec<Constraint>,
    pub method: MethodChoice,
    pub budget: u64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found {
        arrangement: Arrangement,
        certificate: Certificate,
        trial: u64,
        seed: u64,
    },
    Exhausted {
        trials: u64,
    },
}

impl SearchOutcome {
    pub fn found(&self) -> Option<(&Arrangement, &Certificate)> {
        match self {
            SearchOutcome::Found {
                arrangement,
                certificate,
                ..
            } => Some((arrangement, certificate)),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

/// Seed of trial `t` under master seed `master`.
pub fn trial_seed(master: u64, t: u64) -> u64 {
    let mut z = master ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e019);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-element redraw limit before a trial is abandoned.
const ATTEMPTS: usize = 10_000;

impl SearchTemplate {
    fn fixed(&self) -> &[Subspace] {
        self.constraints
            .iter()
            .find_map(|c| match c {
                Constraint::FixedElements(v) => Some(v.as_slice()),
                _ => None,
            })
            .unwrap_or(&[])
    }

    fn pair_shares(&self) -> Option<i64> {
        self.constraints.iter().find_map(|c| match c {
            Constraint::PairShares(d) => Some(*d),
            _ => None,
        })
    }

    fn spread(&self) -> Option<usize> {
        self.constraints.iter().find_map(|c| match c {
            Constraint::AllFromSpread { n_small } => Some(*n_small),
            _ => None,
        })
    }

    fn disjoint(&self) -> bool {
        self.constraints.contains(&Constraint::PairwiseDisjoint)
    }

    /// Checks that the template can be satisfied at all.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |m: &str| Err(ConstructionError::InvalidParameter(m.to_string()));
        if self.budget == 0 {
            return bad("budget must be at least 1");
        }
        if self.k < 0 || self.k >= self.space.dim() as i64 {
            return bad("k out of range");
        }
        let fixed = self.fixed();
        if fixed.iter().any(|e| e.dim() != self.k || e.space() != &self.space) {
            return bad("fixed element of the wrong dimension or space");
        }
        let forced = fixed.len() + if self.pair_shares().is_some() { 2 } else { 0 };
        if forced > self.cardinality {
            return bad("cardinality below the number of forced elements");
        }
        if let Some(d) = self.pair_shares() {
            if d < 0 || d >= self.k {
                return bad("shared subspace must be smaller than the elements");
            }
        }
        if let Some(n_small) = self.spread() {
            if (n_small + 1) * (self.k as usize + 1) != self.space.cols() {
                return bad("spread parameters do not match the space");
            }
        }
        Ok(())
    }

    fn spread_map(&self) -> Result<Option<SpreadElementMap>, ConstructionError> {
        let Some(n_small) = self.spread() else {
            return Ok(None);
        };
        let base = self.space.field().clone();
        let ext: Field = base.extension(self.k as u32 + 1)?;
        let map = SpreadElementMap::from_extension(n_small, &ext)?;
        if map.big().field() != self.space.field() {
            return Err(ConstructionError::InvalidParameter("space field is not the spread base".into()));
        }
        Ok(Some(map))
    }

    /// Draws the arrangement of one trial, or `None` when the constraints
    /// could not be met within the redraw limit.
    pub fn draw(&self, seed: u64) -> Option<Arrangement> {
        let map = self.spread_map().ok()?;
        self.draw_with(map.as_ref(), seed)
    }

    fn draw_with(&self, map: Option<&SpreadElementMap>, seed: u64) -> Option<Arrangement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut elems: Vec<Subspace> = self.fixed().to_vec();
        let disjoint = self.disjoint();
        let mut pair: Option<(usize, usize)> = None;
        let admissible = |elems: &[Subspace], pair: Option<(usize, usize)>, e: &Subspace| {
            let i = elems.len();
            !elems.contains(e)
                && (!disjoint
                    || elems
                        .iter()
                        .enumerate()
                        .all(|(j, f)| pair == Some((j, i)) || e.meet(f).unwrap().is_empty()))
        };
        if let Some(d) = self.pair_shares() {
            let shared = self.space.random_subspace(d, &mut rng).ok()?;
            let first = (0..ATTEMPTS)
                .map(|_| shared.random_through(self.k, &mut rng).unwrap())
                .find(|e| admissible(&elems, None, e))?;
            elems.push(first);
            pair = Some((elems.len() - 1, elems.len()));
            let second = (0..ATTEMPTS)
                .map(|_| shared.random_through(self.k, &mut rng).unwrap())
                .find(|e| admissible(&elems, pair, e))?;
            elems.push(second);
        }
        while elems.len() < self.cardinality {
            let next = (0..ATTEMPTS)
                .map(|_| match map {
                    Some(m) => m.image(&m.small().random_subspace(0, &mut rng).unwrap()),
                    None => self.space.random_subspace(self.k, &mut rng).unwrap(),
                })
                .find(|e| admissible(&elems, pair, e))?;
            elems.push(next);
        }
        Arrangement::new(&self.space, self.k, elems).ok()
    }

    /// Whether `arr` satisfies every constraint, checked from scratch.
    pub fn satisfied_by(&self, arr: &Arrangement) -> bool {
        let e = arr.elements();
        if e.len() != self.cardinality || arr.k() != self.k || arr.space() != &self.space {
            return false;
        }
        let fixed = self.fixed();
        if e[..fixed.len().min(e.len())] != *fixed {
            return false;
        }
        let pair_at = self.pair_shares().map(|d| (fixed.len(), fixed.len() + 1, d));
        if let Some((i, j, d)) = pair_at {
            if e[i].meet(&e[j]).unwrap().dim() < d {
                return false;
            }
        }
        if self.disjoint() {
            for i in 0..e.len() {
                for j in i + 1..e.len() {
                    let exempt = pair_at.is_some_and(|(a, b, _)| (a, b) == (i, j));
                    if !exempt && !e[i].meet(&e[j]).unwrap().is_empty() {
                        return false;
                    }
                }
            }
        }
        if let Ok(Some(map)) = self.spread_map() {
            let spread: Vec<Subspace> = map.small().enumerate(0).unwrap().map(|p| map.image(&p)).collect();
            let start = fixed.len() + if pair_at.is_some() { 2 } else { 0 };
            if !e[start..].iter().all(|x| spread.contains(x)) {
                return false;
            }
        }
        true
    }

    fn accept(&self, arr: &Arrangement) -> bool {
        let small = arr.len() <= arr.q() as usize;
        match self.method {
            MethodChoice::Strong => quick_is_higpig(arr),
            MethodChoice::Auto if !small => quick_is_higpig(arr),
            _ => !has_transversal(arr, arr.transversal_dim()) || (!small && quick_is_higpig(arr)),
        }
    }
}

fn batch_size() -> u64 {
    (rayon::current_num_threads() as u64 * 16).max(64)
}

/// Runs trials `0..budget` and returns the lowest successful one.
pub fn run(template: &SearchTemplate) -> Result<SearchOutcome, ConstructionError> {
    template.validate()?;
    let map = template.spread_map()?;
    let mut start = 0;
    while start < template.budget {
        let end = (start + batch_size()).min(template.budget);
        let hit = (start..end)
            .into_par_iter()
            .filter_map(|t| {
                let seed = trial_seed(template.seed, t);
                let arr = template.draw_with(map.as_ref(), seed)?;
                template.accept(&arr).then_some((t, seed, arr))
            })
            .min_by_key(|(t, _, _)| *t);
        if let Some((trial, seed, arrangement)) = hit {
            let certificate = is_higgledy_piggledy(&arrangement, template.method);
            return Ok(SearchOutcome::Found {
                arrangement,
                certificate,
                trial,
                seed,
            });
        }
        start = end;
    }
    Ok(SearchOutcome::Exhausted {
        trials: template.budget,
    })
}
