//! Randomized and greedy d-hitting families, mainly for antichains, and the
//! counting bounds that sandwich their optimal size.
//!
//! Random permutations are drawn with `ChaCha8Rng::seed_from_u64(seed)` and
//! `SliceRandom::shuffle` (Fisher-Yates) from `rand` 0.8, so a seed gives the
//! same family on every platform.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{self, effective_depth, is_d_hitting};
use crate::poset::{Event, Family, Poset, Schedule};
use crate::shapes;

/// Largest `n` for which [`random_family`] verifies its output.
pub const VERIFY_LIMIT: usize = 10;

fn factorial(d: usize) -> f64 {
    (1..=d).map(|i| i as f64).product()
}

fn check_antichain_args(n: usize, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDepth {
            d,
            reason: "need d >= 2".into(),
        });
    }
    if n < d {
        return Err(Error::InvalidSize(format!("need n >= d, got n={n}, d={d}")));
    }
    Ok(())
}

/// `floor(d! * d * ln n) + 1`, a number of uniform random permutations for
/// which the expected number of missed d-tuples drops below one.
pub fn probabilistic_k(n: usize, d: usize) -> Result<u64> {
    check_antichain_args(n, d)?;
    let k = (factorial(d) * d as f64 * (n as f64).ln()).floor() as u64 + 1;
    debug_assert!(expected_misses_log(n, d, k) < 0.0);
    Ok(k)
}

/// Natural log of `n^d * (1 - 1/d!)^k`.
pub fn expected_misses_log(n: usize, d: usize, k: u64) -> f64 {
    d as f64 * (n as f64).ln() + k as f64 * (1.0 - 1.0 / factorial(d)).ln()
}

/// `ceil(d! * ln+(n^d / d!)) + d!` with `ln+(x) = max(0, ln x)`.
pub fn greedy_upper_bound(n: usize, d: usize) -> Result<u64> {
    check_antichain_args(n, d)?;
    let f = factorial(d);
    let ln_plus = (d as f64 * (n as f64).ln() - f.ln()).max(0.0);
    Ok((f * ln_plus).ceil() as u64 + f as u64)
}

/// `log2((n-1)_r) / log2(r+1)` with `r = floor((d-1)/2)` and `(m)_r` the
/// falling factorial. For `d = 3` this is `log2(n-1)`.
pub fn lower_bound(n: usize, d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidDepth {
            d,
            reason: "the counting lower bound needs d >= 3".into(),
        });
    }
    let r = (d - 1) / 2;
    if n <= r {
        return Err(Error::InvalidSize(format!("need n > {r} for d={d}")));
    }
    let num: f64 = (0..r).map(|i| ((n - 1 - i) as f64).log2()).sum();
    Ok(num / ((r + 1) as f64).log2())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub d: usize,
    /// General counting bound; absent for `d < 3`.
    pub lower: Option<f64>,
    /// `log2(n - 1)`, the bound for `d = 3`.
    pub lower_d3: f64,
    pub greedy_upper: u64,
    pub probabilistic_k: u64,
    /// `d / (2 log2(d + 1))`, the leading coefficient of the lower bound.
    pub slope: f64,
}

pub fn bounds_report(n: usize, d: usize) -> Result<BoundsReport> {
    check_antichain_args(n, d)?;
    Ok(BoundsReport {
        n,
        d,
        lower: if d >= 3 { Some(lower_bound(n, d)?) } else { None },
        lower_d3: ((n - 1) as f64).log2(),
        greedy_upper: greedy_upper_bound(n, d)?,
        probabilistic_k: probabilistic_k(n, d)?,
        slope: d as f64 / (2.0 * ((d + 1) as f64).log2()),
    })
}

#[derive(Clone, Debug)]
pub struct RandomFamily {
    pub poset: Poset,
    pub family: Family,
    /// Whether the family was checked by the oracle (only for `n <= 10`).
    pub verified: bool,
    /// Number of draws made, at least one.
    pub attempts: usize,
}

/// `probabilistic_k(n, d)` seeded random permutations of the antichain
/// `1..n`. Small instances are verified and redrawn up to `max_retries`
/// times.
pub fn random_family(n: usize, d: usize, seed: u64, max_retries: usize) -> Result<RandomFamily> {
    let k = probabilistic_k(n, d)? as usize;
    let poset = shapes::antichain(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let rows = (0..k)
            .map(|_| {
                let mut row: Vec<Event> = (0..n).collect();
                row.shuffle(rng);
                Schedule::new(row)
            })
            .collect();
        Family::from_rows(rows)
    };
    if n > VERIFY_LIMIT {
        return Ok(RandomFamily {
            family: draw(&mut rng),
            poset,
            verified: false,
            attempts: 1,
        });
    }
    let mut missed = None;
    for attempt in 0..=max_retries {
        let family = draw(&mut rng);
        let report = is_d_hitting(&poset, &family, d)?;
        if report.is_hitting {
            return Ok(RandomFamily {
                poset,
                family,
                verified: true,
                attempts: attempt + 1,
            });
        }
        missed = report.first_missed;
    }
    Err(Error::GenerationFailed {
        retries: max_retries,
        missed: missed.map(|t| poset.tuple_tokens(&t)).unwrap_or_default(),
    })
}

/// Where [`greedy_family`] takes its candidate schedules from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pool {
    /// Every schedule of the poset; fails when there are more than `budget`.
    Exact { budget: usize },
    /// `per_step` fresh random schedules at every step.
    Sampled { per_step: usize, seed: u64 },
}

/// Consecutive useless sampled steps tolerated before giving up.
const SAMPLED_PATIENCE: usize = 16;

/// Dense ids for the admissible tuples of a poset.
struct TupleIndex {
    n: u64,
    d: usize,
    dense: Option<Vec<u32>>,
    sparse: HashMap<u64, u32>,
    tuples: Vec<Vec<Event>>,
}

impl TupleIndex {
    fn new(p: &Poset, d: usize) -> Result<Self> {
        let n = p.len() as u64;
        let space = n.checked_pow(d as u32).ok_or_else(|| Error::Infeasible {
            what: "tuple index".into(),
            count: (n as u128).saturating_pow(d as u32),
            budget: u64::MAX as u128,
        })?;
        let mut idx = TupleIndex {
            n,
            d,
            dense: (space <= 1 << 22).then(|| vec![u32::MAX; space as usize]),
            sparse: HashMap::new(),
            tuples: Vec::new(),
        };
        let mut tuples = Vec::new();
        oracle::visit_admissible(p, d, &mut |t: &[Event]| tuples.push(t.to_vec()));
        for (i, t) in tuples.iter().enumerate() {
            let key = idx.key(t);
            match &mut idx.dense {
                Some(v) => v[key as usize] = i as u32,
                None => {
                    idx.sparse.insert(key, i as u32);
                }
            }
        }
        idx.tuples = tuples;
        Ok(idx)
    }

    fn key(&self, t: &[Event]) -> u64 {
        t.iter().fold(0, |k, &x| k * self.n + x as u64)
    }

    fn id(&self, key: u64) -> u32 {
        match &self.dense {
            Some(v) => v[key as usize],
            None => self.sparse[&key],
        }
    }

    /// Calls `f` with the id of every tuple hit by `s`, i.e. every length-`d`
    /// subsequence of `s`.
    fn for_each_hit(&self, s: &[Event], mut f: impl FnMut(u32)) {
        fn rec(ix: &TupleIndex, s: &[Event], start: usize, left: usize, key: u64, f: &mut impl FnMut(u32)) {
            if left == 0 {
                f(ix.id(key));
                return;
            }
            for i in start..=s.len() - left {
                rec(ix, s, i + 1, left - 1, key * ix.n + s[i] as u64, f);
            }
        }
        if s.len() >= self.d {
            rec(self, s, 0, self.d, 0, &mut f);
        }
    }

    fn gain(&self, s: &[Event], covered: &FixedBitSet) -> u64 {
        let mut g = 0;
        self.for_each_hit(s, |id| {
            if !covered.contains(id as usize) {
                g += 1;
            }
        });
        g
    }
}

/// A random linear extension: repeatedly schedules a uniformly chosen
/// enabled event.
pub fn random_schedule(p: &Poset, rng: &mut impl Rng) -> Schedule {
    let mut indeg: Vec<usize> = (0..p.len()).map(|x| p.predecessors(x).len()).collect();
    let mut avail: Vec<Event> = (0..p.len()).filter(|&x| indeg[x] == 0).collect();
    let mut out = Vec::with_capacity(p.len());
    while !avail.is_empty() {
        let x = avail.swap_remove(rng.gen_range(0..avail.len()));
        out.push(x);
        for &y in p.successors(x) {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                avail.push(y);
            }
        }
    }
    Schedule::new(out)
}

/// Greedy d-hitting family: repeatedly adds the candidate hitting the most
/// uncovered admissible tuples, the earliest candidate winning ties.
pub fn greedy_family(p: &Poset, d: usize, pool: Pool) -> Result<Family> {
    let d = effective_depth(p, d)?;
    let index = TupleIndex::new(p, d)?;
    let total = index.tuples.len();
    let mut covered = FixedBitSet::with_capacity(total);
    let mut uncovered = total;
    let mut rows = Vec::new();
    let take = |s: &Schedule, covered: &mut FixedBitSet, uncovered: &mut usize| {
        index.for_each_hit(s.events(), |id| {
            if !covered.put(id as usize) {
                *uncovered -= 1;
            }
        });
    };
    let witness = |covered: &FixedBitSet| {
        let first = (0..total).find(|&i| !covered.contains(i)).unwrap_or(0);
        Error::PoolExhausted {
            witness: index.tuples[first].iter().map(|&x| p.token(x).to_string()).collect(),
        }
    };

    match pool {
        Pool::Exact { budget } => {
            let all = oracle::all_schedules(p, budget)?.into_rows();
            let full = index.gain(all[0].events(), &covered);
            let mut heap: BinaryHeap<(u64, Reverse<u32>, usize)> =
                (0..all.len()).map(|i| (full, Reverse(i as u32), usize::MAX)).collect();
            while uncovered > 0 {
                let step = rows.len();
                let (g, Reverse(i), stamp) = heap.pop().ok_or_else(|| witness(&covered))?;
                let s = &all[i as usize];
                if stamp == step {
                    if g == 0 {
                        return Err(witness(&covered));
                    }
                    take(s, &mut covered, &mut uncovered);
                    rows.push(s.clone());
                } else {
                    heap.push((index.gain(s.events(), &covered), Reverse(i), step));
                }
            }
        }
        Pool::Sampled { per_step, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idle = 0;
            while uncovered > 0 {
                let cands: Vec<Schedule> = (0..per_step.max(1)).map(|_| random_schedule(p, &mut rng)).collect();
                let gains: Vec<u64> = cands.par_iter().map(|s| index.gain(s.events(), &covered)).collect();
                // max_by_key keeps the last maximum, so scan in reverse
                let best = (0..cands.len()).rev().max_by_key(|&i| gains[i]).unwrap();
                if gains[best] == 0 {
                    idle += 1;
                    if idle >= SAMPLED_PATIENCE {
                        return Err(witness(&covered));
                    }
                    continue;
                }
                idle = 0;
                take(&cands[best], &mut covered, &mut uncovered);
                rows.push(cands[best].clone());
            }
        }
    }
    Ok(Family::from_rows(rows))
}

/// For the column of each event `j != pivot`, the set of rows placing `j`
/// before `pivot`. Returns the first two events with equal columns, if any.
/// A 3-hitting family has none: `(i, pivot, j)` separates `i` from `j`.
pub fn pivot_column_collision(p: &Poset, f: &Family, pivot: Event) -> Option<(Event, Event)> {
    let pos: Vec<Vec<u32>> = f.rows().iter().map(|s| s.positions(p.len())).collect();
    let mut seen: HashMap<Vec<bool>, Event> = HashMap::new();
    for j in (0..p.len()).filter(|&j| j != pivot) {
        let col: Vec<bool> = pos.iter().map(|r| r[j] < r[pivot]).collect();
        if let Some(&i) = seen.get(&col) {
            return Some((i, j));
        }
        seen.insert(col, j);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{antichain, chain};

    #[test]
    fn probabilistic_k_values() {
        assert_eq!(probabilistic_k(8, 3).unwrap(), 38);
        assert_eq!(probabilistic_k(6, 3).unwrap(), 33);
        assert_eq!(probabilistic_k(2, 2).unwrap(), 3);
        assert_eq!(probabilistic_k(1024, 4).unwrap(), 666);
        // 2^2 * (1/2)^3 = 0.5
        assert!((expected_misses_log(2, 2, 3).exp() - 0.5).abs() < 1e-12);
        assert!(probabilistic_k(2, 3).is_err());
    }

    #[test]
    fn greedy_upper_values() {
        assert_eq!(greedy_upper_bound(8, 3).unwrap(), 33);
        assert_eq!(greedy_upper_bound(2, 2).unwrap(), 4);
        assert_eq!(greedy_upper_bound(64, 3).unwrap(), 71);
        assert_eq!(greedy_upper_bound(3, 3).unwrap(), 16);
    }

    #[test]
    fn lower_bound_values() {
        assert!((lower_bound(9, 3).unwrap() - 3.0).abs() < 1e-12);
        assert!((lower_bound(9, 5).unwrap() - 56f64.log2() / 3f64.log2()).abs() < 1e-12);
        assert!((lower_bound(9, 5).unwrap() - 3.664).abs() < 1e-3);
        assert_eq!(lower_bound(2, 3).unwrap(), 0.0);
        assert!(matches!(lower_bound(9, 2), Err(Error::InvalidDepth { .. })));
    }

    #[test]
    fn report_fields() {
        let r = bounds_report(64, 3).unwrap();
        assert!((r.lower_d3 - 63f64.log2()).abs() < 1e-12);
        assert_eq!(r.greedy_upper, 71);
        let r = bounds_report(4, 3).unwrap();
        assert!(r.lower.unwrap() <= r.greedy_upper as f64);
        assert!(bounds_report(4, 2).unwrap().lower.is_none());
    }

    #[test]
    fn random_family_counts_and_determinism() {
        let a = random_family(6, 3, 1, 20).unwrap();
        assert_eq!(a.family.len(), 33);
        assert!(a.verified);
        let b = random_family(6, 3, 1, 20).unwrap();
        assert_eq!(a.family, b.family);
        let c = random_family(2, 2, 7, 50).unwrap();
        assert!(is_d_hitting(&c.poset, &c.family, 2).unwrap().is_hitting);
    }

    #[test]
    fn random_family_can_fail() {
        // n = 2, d = 2 with three rows misses an order with probability 1/4
        let fails = (0..40u64).filter(|&s| random_family(2, 2, s, 0).is_err()).count();
        assert!(fails > 0);
        let err = (0..40u64).find_map(|s| random_family(2, 2, s, 0).err()).unwrap();
        assert!(matches!(err, Error::GenerationFailed { retries: 0, ref missed } if missed.len() == 2));
    }

    #[test]
    fn exact_greedy_examples() {
        let p = antichain(4).unwrap();
        let f = greedy_family(&p, 2, Pool::Exact { budget: 1000 }).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(p.render(&f.rows()[0]), "1 2 3 4");
        assert_eq!(p.render(&f.rows()[1]), "4 3 2 1");
        let c = chain(5).unwrap();
        assert_eq!(greedy_family(&c, 3, Pool::Exact { budget: 10 }).unwrap().len(), 1);
    }

    #[test]
    fn sampled_greedy_is_hitting() {
        let p = antichain(8).unwrap();
        let f = greedy_family(&p, 3, Pool::Sampled { per_step: 64, seed: 3 }).unwrap();
        assert!(is_d_hitting(&p, &f, 3).unwrap().is_hitting);
        assert_eq!(f, greedy_family(&p, 3, Pool::Sampled { per_step: 64, seed: 3 }).unwrap());
    }

    #[test]
    fn exact_pool_respects_budget() {
        let p = antichain(6).unwrap();
        assert!(matches!(
            greedy_family(&p, 3, Pool::Exact { budget: 100 }),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn pivot_columns() {
        let p = antichain(5).unwrap();
        let f = random_family(5, 3, 2, 20).unwrap().family;
        assert_eq!(pivot_column_collision(&p, &f, 4), None);
        let two = greedy_family(&p, 2, Pool::Exact { budget: 1000 }).unwrap();
        assert!(pivot_column_collision(&p, &two, 4).is_some());
    }
}
