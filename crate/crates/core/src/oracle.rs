//! Brute-force ground truth: linear-extension and admissible-tuple
//! enumeration, d-hitting verification, exact minimum family sizes on tiny
//! instances, and a canonical schedule hitting a given tuple.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poset::{DTuple, Event, Family, Poset, Schedule};

/// Default cap for schedule and tuple enumeration.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub schedules: Vec<Schedule>,
    /// Set when more than `cap` schedules exist; `schedules` is truncated.
    pub overflow: bool,
}

/// All linear extensions in lexicographic order of event indices, truncated
/// at `cap`.
pub fn enumerate_schedules(p: &Poset, cap: usize) -> Enumeration {
    struct Walk<'a> {
        p: &'a Poset,
        cap: usize,
        indeg: Vec<usize>,
        used: Vec<bool>,
        prefix: Vec<Event>,
        out: Vec<Schedule>,
        overflow: bool,
    }

    impl Walk<'_> {
        fn go(&mut self) {
            if self.overflow {
                return;
            }
            if self.prefix.len() == self.p.len() {
                if self.out.len() == self.cap {
                    self.overflow = true;
                } else {
                    self.out.push(Schedule::new(self.prefix.clone()));
                }
                return;
            }
            for x in 0..self.p.len() {
                if self.used[x] || self.indeg[x] > 0 {
                    continue;
                }
                self.used[x] = true;
                self.prefix.push(x);
                for &y in self.p.successors(x) {
                    self.indeg[y] -= 1;
                }
                self.go();
                for &y in self.p.successors(x) {
                    self.indeg[y] += 1;
                }
                self.prefix.pop();
                self.used[x] = false;
                if self.overflow {
                    return;
                }
            }
        }
    }

    let mut w = Walk {
        p,
        cap: cap.max(1),
        indeg: (0..p.len()).map(|x| p.predecessors(x).len()).collect(),
        used: vec![false; p.len()],
        prefix: Vec::with_capacity(p.len()),
        out: Vec::new(),
        overflow: false,
    };
    w.go();
    Enumeration {
        schedules: w.out,
        overflow: w.overflow,
    }
}

pub(crate) fn check_depth(p: &Poset, d: usize) -> Result<()> {
    if d < 2 || d > p.len() {
        return Err(Error::InvalidDepth {
            d,
            reason: format!("need 2 <= d <= {}", p.len()),
        });
    }
    Ok(())
}

/// Calls `f` on every admissible d-tuple whose first entry is `first`, in
/// lexicographic order.
fn admissible_from(p: &Poset, d: usize, first: Event, f: &mut impl FnMut(&[Event])) {
    fn rec(p: &Poset, d: usize, prefix: &mut Vec<Event>, f: &mut impl FnMut(&[Event])) {
        if prefix.len() == d {
            f(prefix);
            return;
        }
        for x in 0..p.len() {
            if prefix.iter().all(|&a| a != x && !p.le(x, a)) {
                prefix.push(x);
                rec(p, d, prefix, f);
                prefix.pop();
            }
        }
    }
    let mut prefix = vec![first];
    rec(p, d, &mut prefix, f);
}

/// Depth used for verification and exact search: `d` clamped to `|p|`.
/// A d-hitting family is d'-hitting for every `d' <= d`, so on a poset with
/// fewer than `d` events it must hit every ordering of the whole poset.
pub fn effective_depth(p: &Poset, d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidDepth {
            d,
            reason: "need d >= 2".into(),
        });
    }
    Ok(d.min(p.len()))
}

pub(crate) fn visit_admissible(p: &Poset, d: usize, f: &mut impl FnMut(&[Event])) {
    for first in 0..p.len() {
        admissible_from(p, d, first, f);
    }
}

/// Visits all admissible d-tuples in lexicographic order.
pub fn for_each_admissible(p: &Poset, d: usize, mut f: impl FnMut(&[Event])) -> Result<()> {
    check_depth(p, d)?;
    visit_admissible(p, d, &mut f);
    Ok(())
}

pub fn enumerate_admissible(p: &Poset, d: usize) -> Result<Vec<DTuple>> {
    let mut out = Vec::new();
    for_each_admissible(p, d, |t| out.push(DTuple::new(t.to_vec()).unwrap()))?;
    Ok(out)
}

pub fn count_admissible(p: &Poset, d: usize) -> Result<usize> {
    let mut n = 0;
    for_each_admissible(p, d, |_| n += 1)?;
    Ok(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub is_hitting: bool,
    pub admissible_count: usize,
    /// First admissible tuple (in enumeration order) hit by no row.
    pub first_missed: Option<DTuple>,
    /// Number of admissible tuples each row hits.
    pub per_row_hit_counts: Vec<u64>,
}

struct Partial {
    count: usize,
    missed: Option<Vec<Event>>,
    per_row: Vec<u64>,
}

fn verify_from(p: &Poset, d: usize, pos: &[Vec<u32>], first: Event) -> Partial {
    let rows = pos.len();
    let mut part = Partial {
        count: 0,
        missed: None,
        per_row: vec![0; rows],
    };
    // levels[k] = rows hitting the current prefix of length k + 1
    let mut levels: Vec<Vec<u32>> = vec![Vec::with_capacity(rows); d];
    levels[0].extend(0..rows as u32);
    let mut prefix = vec![first];

    fn rec(
        p: &Poset,
        d: usize,
        pos: &[Vec<u32>],
        prefix: &mut Vec<Event>,
        levels: &mut [Vec<u32>],
        part: &mut Partial,
    ) {
        let k = prefix.len();
        if k == d {
            part.count += 1;
            let hit = &levels[k - 1];
            if hit.is_empty() {
                if part.missed.is_none() {
                    part.missed = Some(prefix.clone());
                }
            } else {
                for &r in hit {
                    part.per_row[r as usize] += 1;
                }
            }
            return;
        }
        let last = prefix[k - 1];
        for x in 0..p.len() {
            if !prefix.iter().all(|&a| a != x && !p.le(x, a)) {
                continue;
            }
            let (done, rest) = levels.split_at_mut(k);
            let next = &mut rest[0];
            next.clear();
            next.extend(
                done[k - 1]
                    .iter()
                    .copied()
                    .filter(|&r| pos[r as usize][last] < pos[r as usize][x]),
            );
            prefix.push(x);
            rec(p, d, pos, prefix, levels, part);
            prefix.pop();
        }
    }

    rec(p, d, pos, &mut prefix, &mut levels, &mut part);
    part
}

/// Checks whether `f` is d-hitting for `p`. Work is split by the first tuple
/// entry across threads; the report is identical to a sequential run.
///
/// When `d > |p|` the check runs at depth `|p|`, see [`effective_depth`].
pub fn is_d_hitting(p: &Poset, f: &Family, d: usize) -> Result<VerifyReport> {
    let d = effective_depth(p, d)?;
    p.check_family(f)?;
    let pos: Vec<Vec<u32>> = f.rows().iter().map(|s| s.positions(p.len())).collect();
    let parts: Vec<Partial> = (0..p.len())
        .into_par_iter()
        .map(|first| verify_from(p, d, &pos, first))
        .collect();
    let mut report = VerifyReport {
        is_hitting: true,
        admissible_count: 0,
        first_missed: None,
        per_row_hit_counts: vec![0; f.len()],
    };
    for part in parts {
        report.admissible_count += part.count;
        if report.first_missed.is_none() {
            if let Some(m) = part.missed {
                report.first_missed = Some(DTuple::new(m).unwrap());
            }
        }
        for (acc, c) in report.per_row_hit_counts.iter_mut().zip(part.per_row) {
            *acc += c;
        }
    }
    report.is_hitting = report.first_missed.is_none();
    Ok(report)
}

/// Every schedule of `p` as one family, failing beyond `budget` schedules.
pub fn all_schedules(p: &Poset, budget: usize) -> Result<Family> {
    let e = enumerate_schedules(p, budget);
    if e.overflow {
        return Err(Error::Infeasible {
            what: "schedule enumeration".into(),
            count: budget as u128 + 1,
            budget: budget as u128,
        });
    }
    Ok(Family::from_rows(e.schedules))
}

/// Exact size of the smallest d-hitting family, by iterative deepening over
/// the family size with branching on the first uncovered tuple.
pub fn min_hitting_size(p: &Poset, d: usize, budget: usize) -> Result<usize> {
    let d = effective_depth(p, d)?;
    let schedules = all_schedules(p, budget)?.into_rows();
    let mut tuples = Vec::new();
    visit_admissible(p, d, &mut |t: &[Event]| tuples.push(DTuple::new(t.to_vec()).unwrap()));
    let t = tuples.len();

    let mut cover: Vec<FixedBitSet> = Vec::with_capacity(schedules.len());
    for s in &schedules {
        let pos = s.positions(p.len());
        let mut set = FixedBitSet::with_capacity(t);
        for (i, tup) in tuples.iter().enumerate() {
            if tup.events().windows(2).all(|w| pos[w[0]] < pos[w[1]]) {
                set.insert(i);
            }
        }
        cover.push(set);
    }
    // schedules with identical coverage are interchangeable
    let mut distinct: Vec<FixedBitSet> = Vec::new();
    for c in cover {
        if !distinct.contains(&c) {
            distinct.push(c);
        }
    }
    let mut hitters: Vec<Vec<usize>> = vec![Vec::new(); t];
    for (si, c) in distinct.iter().enumerate() {
        for i in c.ones() {
            hitters[i].push(si);
        }
    }

    fn search(
        k: usize,
        covered: &FixedBitSet,
        t: usize,
        distinct: &[FixedBitSet],
        hitters: &[Vec<usize>],
    ) -> bool {
        let Some(u) = (0..t).find(|&i| !covered.contains(i)) else {
            return true;
        };
        if k == 0 {
            return false;
        }
        hitters[u].iter().any(|&s| {
            let mut next = covered.clone();
            next.union_with(&distinct[s]);
            search(k - 1, &next, t, distinct, hitters)
        })
    }

    let empty = FixedBitSet::with_capacity(t);
    (0..=distinct.len())
        .find(|&k| search(k, &empty, t, &distinct, &hitters))
        .ok_or_else(|| Error::Infeasible {
            what: "exact search".into(),
            count: distinct.len() as u128,
            budget: budget as u128,
        })
}

/// The lexicographically least schedule placing `t` in order: the poset plus
/// the constraints `t[i] < t[i+1]`, topologically sorted with a min-heap.
pub fn schedule_hitting(p: &Poset, t: &DTuple) -> Result<Schedule> {
    if !p.is_admissible(t) {
        return Err(Error::Inadmissible(p.tuple_tokens(t)));
    }
    let n = p.len();
    let mut extra: Vec<Vec<Event>> = vec![Vec::new(); n];
    let mut indeg: Vec<usize> = (0..n).map(|x| p.predecessors(x).len()).collect();
    for w in t.events().windows(2) {
        extra[w[0]].push(w[1]);
        indeg[w[1]] += 1;
    }
    let mut heap: BinaryHeap<Reverse<Event>> =
        (0..n).filter(|&x| indeg[x] == 0).map(Reverse).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(Reverse(x)) = heap.pop() {
        out.push(x);
        for &y in p.successors(x).iter().chain(&extra[x]) {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                heap.push(Reverse(y));
            }
        }
    }
    debug_assert_eq!(out.len(), n, "admissible tuples never close a cycle");
    Ok(Schedule::new(out))
}
