//! Baseline families: the two DFS traversals of a tree, the bag-based
//! warm-up construction for any `d >= 3`, the interleavings of a chain with
//! one independent event, and the chain-plus-event lower bound.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::{Event, Family, Poset, Schedule};
use crate::shapes;
use crate::tree::TreeView;

/// `{leftdfs, rightdfs}`: preorder with children ascending, then descending.
pub fn dfs_family(tree: &Poset) -> Result<Family> {
    let t = TreeView::new(tree)?;
    Ok(Family::from_rows(vec![
        Schedule::new(t.preorder(false)),
        Schedule::new(t.preorder(true)),
    ]))
}

/// Output of the warm-up construction.
#[derive(Clone, Debug)]
pub struct WarmupFamily {
    /// Rows with duplicates removed.
    pub family: Family,
    /// Row count before duplicate removal: two per bag.
    pub rows_pre_dedup: usize,
    pub bags: usize,
}

/// Schedules the prefix events with all their predecessors, then completes
/// along `order` skipping what is already scheduled.
fn bag_row(t: &TreeView, prefix: &[Event], order: &[Event]) -> Schedule {
    let n = t.poset().len();
    let mut done = FixedBitSet::with_capacity(n);
    let mut row = Vec::with_capacity(n);
    for &a in prefix {
        for x in t.ancestors_from_root(a) {
            if !done.put(x) {
                row.push(x);
            }
        }
    }
    for &x in order {
        if !done.put(x) {
            row.push(x);
        }
    }
    Schedule::new(row)
}

/// Warm-up rows before deduplication. One bag per admissible arrangement
/// `(a_1, ..., a_{d-2})`; when `pivots` is given, `a_1` ranges over it only.
pub fn warmup_rows(tree: &Poset, d: usize, pivots: Option<&[Event]>) -> Result<(Vec<Schedule>, usize)> {
    if d < 3 {
        return Err(Error::InvalidDepth {
            d,
            reason: "the warm-up construction needs d >= 3".into(),
        });
    }
    let t = TreeView::new(tree)?;
    let left = t.preorder(false);
    let right = t.preorder(true);
    let k = d - 2;
    if k > tree.len() {
        return Ok((Vec::new(), 0));
    }

    let firsts: Vec<Event> = match pivots {
        Some(p) => {
            let mut p = p.to_vec();
            p.sort_unstable();
            p.dedup();
            p
        }
        None => (0..tree.len()).collect(),
    };

    let mut rows = Vec::new();
    let mut bags = 0;
    let mut prefix = Vec::with_capacity(k);
    fn rec(
        t: &TreeView,
        k: usize,
        prefix: &mut Vec<Event>,
        left: &[Event],
        right: &[Event],
        rows: &mut Vec<Schedule>,
        bags: &mut usize,
    ) {
        if prefix.len() == k {
            *bags += 1;
            rows.push(bag_row(t, prefix, left));
            rows.push(bag_row(t, prefix, right));
            return;
        }
        let p = t.poset();
        for x in 0..p.len() {
            if prefix.iter().all(|&a| a != x && !p.le(x, a)) {
                prefix.push(x);
                rec(t, k, prefix, left, right, rows, bags);
                prefix.pop();
            }
        }
    }
    for &a in &firsts {
        prefix.clear();
        prefix.push(a);
        rec(&t, k, &mut prefix, &left, &right, &mut rows, &mut bags);
    }
    Ok((rows, bags))
}

/// The `O(n^{d-2})` family: two rows per bag, deduplicated.
pub fn warmup_family(tree: &Poset, d: usize) -> Result<WarmupFamily> {
    let (rows, bags) = warmup_rows(tree, d, None)?;
    let rows_pre_dedup = rows.len();
    Ok(WarmupFamily {
        family: Family::from_rows(rows).dedup(),
        rows_pre_dedup,
        bags,
    })
}

/// Interleavings of `1 < ... < n` with `*`: for `d = 2` the two extremes,
/// for `d >= 3` all `n + 1` of them. Rows are listed by the position of `*`.
pub fn chain_event_family(n: usize, d: usize) -> Result<(Poset, Family)> {
    let p = shapes::chain_plus_event(n)?;
    if d < 2 {
        return Err(Error::InvalidDepth {
            d,
            reason: "d must be at least 2".into(),
        });
    }
    let star = p.index_of(shapes::INDEPENDENT_TOKEN)?;
    let chain: Vec<Event> = (1..=n)
        .map(|i| p.index_of(&i.to_string()))
        .collect::<Result<_>>()?;
    let slots: Vec<usize> = if d == 2 { vec![0, n] } else { (0..=n).collect() };
    let rows = slots
        .into_iter()
        .map(|i| {
            let mut row = chain.clone();
            row.insert(i, star);
            Schedule::new(row)
        })
        .collect();
    Ok((p, Family::from_rows(rows)))
}

/// `m + 1`, where `m` is the longest chain all of whose events are
/// incomparable to some single event; `1` when no such event exists. Any
/// d-hitting family with `d >= 3` has at least this many rows.
pub fn height_lower_bound(p: &Poset, d: usize) -> Result<usize> {
    if d < 3 {
        return Err(Error::InvalidDepth {
            d,
            reason: "the chain-plus-event bound applies for d >= 3".into(),
        });
    }
    let mut best = 0;
    for v in 0..p.len() {
        let mut mask = FixedBitSet::with_capacity(p.len());
        for x in 0..p.len() {
            if p.incomparable(v, x) {
                mask.insert(x);
            }
        }
        if mask.count_ones(..) > best {
            best = best.max(p.height_within(&mask));
        }
    }
    Ok(if best == 0 { 1 } else { best + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{is_d_hitting, min_hitting_size};
    use crate::shapes::{chain, chain_plus_event, complete_tree};

    #[test]
    fn dfs_rows_of_height_two() {
        let p = complete_tree(2).unwrap();
        let f = dfs_family(&p).unwrap();
        assert_eq!(p.render(&f.rows()[0]), "e 0 00 01 1 10 11");
        assert_eq!(p.render(&f.rows()[1]), "e 1 11 10 0 01 00");
    }

    #[test]
    fn dfs_of_single_node() {
        let p = complete_tree(0).unwrap();
        let f = dfs_family(&p).unwrap();
        assert_eq!(f.rows()[0], f.rows()[1]);
        assert_eq!(f.rows()[0].len(), 1);
    }

    #[test]
    fn dfs_rejects_non_tree() {
        assert!(matches!(
            dfs_family(&chain_plus_event(2).unwrap()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn warmup_small_trees_verified() {
        for (h, d) in [(1, 3), (2, 3)] {
            let p = complete_tree(h).unwrap();
            let w = warmup_family(&p, d).unwrap();
            let n = p.len();
            assert!(w.rows_pre_dedup <= 2 * n.pow(d as u32 - 2));
            assert!(is_d_hitting(&p, &w.family, d).unwrap().is_hitting);
        }
        // h = 1: three bags of two rows
        assert!(warmup_family(&complete_tree(1).unwrap(), 3).unwrap().rows_pre_dedup <= 6);
        assert!(warmup_family(&complete_tree(2).unwrap(), 3).unwrap().rows_pre_dedup <= 14);
    }

    #[test]
    fn warmup_bound_for_d4() {
        let p = complete_tree(2).unwrap();
        let w = warmup_family(&p, 4).unwrap();
        assert!(w.rows_pre_dedup <= 98);
        assert_eq!(w.rows_pre_dedup, 2 * w.bags);
    }

    #[test]
    fn warmup_rejects_small_depth() {
        assert!(matches!(
            warmup_family(&complete_tree(2).unwrap(), 2),
            Err(Error::InvalidDepth { .. })
        ));
    }

    #[test]
    fn chain_event_families() {
        let (p, f2) = chain_event_family(4, 2).unwrap();
        let r: Vec<String> = f2.rows().iter().map(|s| p.render(s)).collect();
        assert_eq!(r, vec!["* 1 2 3 4", "1 2 3 4 *"]);
        assert_eq!(chain_event_family(4, 3).unwrap().1.len(), 5);
        assert_eq!(chain_event_family(4, 5).unwrap().1.len(), 5);
        for d in 2..=5 {
            let (p, f) = chain_event_family(4, d).unwrap();
            assert!(is_d_hitting(&p, &f, d).unwrap().is_hitting);
        }
    }

    #[test]
    fn chain_event_family_is_minimal() {
        for n in 1..=4 {
            let (p, f) = chain_event_family(n, 3).unwrap();
            assert_eq!(min_hitting_size(&p, 3, 1000).unwrap(), f.len());
        }
    }

    #[test]
    fn height_bounds() {
        assert_eq!(height_lower_bound(&chain_plus_event(6).unwrap(), 3).unwrap(), 7);
        assert_eq!(height_lower_bound(&chain(6).unwrap(), 3).unwrap(), 1);
        assert_eq!(height_lower_bound(&complete_tree(3).unwrap(), 3).unwrap(), 4);
    }
}
