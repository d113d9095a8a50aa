//! Every construction checked against the brute-force oracle on small
//! instances.

use std::collections::HashMap;

use hitfam::antichain::{greedy_family, lower_bound, pivot_column_collision, random_family, Pool};
use hitfam::basic::{chain_event_family, dfs_family, height_lower_bound, warmup_family};
use hitfam::doubletree::{
    antichain_family_from_leaves, arbitrary_tree_family, build_m, doubletree_family, separation_check,
    tree_family,
};
use hitfam::harness::{parse_poset, poset_stats};
use hitfam::oracle::{enumerate_admissible, is_d_hitting, min_hitting_size};
use hitfam::pattern::{conforms, enumerate_patterns, pattern_family, pattern_of_tuple, schedule_for_pattern};
use hitfam::shapes::{antichain, chain_plus_event, complete_tree, double_tree};
use hitfam::{Family, Poset};

fn hitting(p: &Poset, f: &Family, d: usize) -> bool {
    is_d_hitting(p, f, d).unwrap().is_hitting
}

#[test]
fn dfs_is_two_hitting_and_optimal() {
    for h in 1..=5 {
        let p = complete_tree(h).unwrap();
        assert!(hitting(&p, &dfs_family(&p).unwrap(), 2));
    }
    for h in 1..=2 {
        assert_eq!(min_hitting_size(&complete_tree(h).unwrap(), 2, 100_000).unwrap(), 2);
    }
}

#[test]
fn warmup_within_bound() {
    for (d, h) in [(3, 1), (3, 2), (3, 3), (4, 1), (4, 2)] {
        let p = complete_tree(h).unwrap();
        let w = warmup_family(&p, d).unwrap();
        assert!(w.rows_pre_dedup <= 2 * p.len().pow(d as u32 - 2));
        assert!(hitting(&p, &w.family, d), "d={d} h={h}");
        assert!(w.family.len() >= height_lower_bound(&p, d).unwrap());
    }
}

#[test]
fn chain_plus_event_is_exact() {
    for n in 1..=5 {
        let p = chain_plus_event(n).unwrap();
        assert_eq!(min_hitting_size(&p, 3, 100_000).unwrap(), n + 1);
        let (q, f) = chain_event_family(n, 3).unwrap();
        assert!(hitting(&q, &f, 3));
        assert_eq!(f.len(), height_lower_bound(&q, 3).unwrap());
    }
}

#[test]
fn double_tree_matrices() {
    for h in 1..=3 {
        let (p, f) = doubletree_family(h).unwrap();
        assert!(hitting(&p, &f, 3), "h={h}");
        assert!(f.len() >= height_lower_bound(&p, 3).unwrap());
    }
    for h in 1..=4 {
        assert!(separation_check(&build_m(h).unwrap()));
    }
    assert!(min_hitting_size(&double_tree(1).unwrap(), 3, 1000).unwrap() >= 2);
}

#[test]
fn tree_and_leaf_families() {
    for h in 1..=3 {
        let (p, f) = tree_family(h).unwrap();
        assert_eq!((p.len(), f.len()), ((1 << (h + 1)) - 1, 4 * h));
        assert!(hitting(&p, &f, 3));
        let (q, g) = antichain_family_from_leaves(h).unwrap();
        assert_eq!((q.len(), g.len()), (1 << h, 4 * h));
        assert!(hitting(&q, &g, 3));
        assert!(g.len() as f64 >= lower_bound(q.len().max(3), 3).unwrap().ceil());
    }
}

#[test]
fn arbitrary_tree_embeddings() {
    // complete ternary tree of height 2
    let mut tokens = vec!["r".to_string()];
    let mut edges = Vec::new();
    for i in 0..3 {
        let c = format!("c{i}");
        for j in 0..3 {
            let g = format!("c{i}g{j}");
            edges.push((c.clone(), g.clone()));
            tokens.push(g);
        }
        edges.push(("r".to_string(), c.clone()));
        tokens.push(c);
    }
    let p = Poset::from_hasse(tokens, &edges).unwrap();
    assert_eq!(p.len(), 13);
    let f = arbitrary_tree_family(&p).unwrap();
    assert!(f.len() <= 4 * 2 * 2);
    assert!(hitting(&p, &f, 3));
    for r in f.rows() {
        p.check_schedule(r).unwrap();
    }
}

#[test]
fn pattern_coverage_and_hitting() {
    for h in 1..=2 {
        let tree = complete_tree(h).unwrap();
        let patterns = enumerate_patterns(3, h, 1_000_000).unwrap();
        let by_text: HashMap<String, usize> =
            patterns.iter().enumerate().map(|(i, p)| (p.to_string(), i)).collect();
        let schedules: Vec<_> = patterns.iter().map(|p| schedule_for_pattern(p, h).unwrap()).collect();
        for t in enumerate_admissible(&tree, 3).unwrap() {
            let own = pattern_of_tuple(&tree, &t).unwrap();
            let i = by_text[&own.to_string()];
            assert!(conforms(&tree, &t, &patterns[i]));
            // every pattern the tuple conforms to yields a hitting schedule
            for (j, p) in patterns.iter().enumerate() {
                if conforms(&tree, &t, p) {
                    assert!(schedules[j].hits(&t).unwrap());
                }
            }
        }
    }
}

#[test]
fn pattern_families_small() {
    for (d, h) in [(2, 2), (3, 2), (4, 2)] {
        let (p, f) = pattern_family(d, h, 1_000_000).unwrap();
        assert!(hitting(&p, &f, d), "d={d} h={h}");
    }
}

#[test]
fn antichain_families_respect_bounds() {
    for n in 4..=7 {
        let p = antichain(n).unwrap();
        let pivot = p.index_of(&n.to_string()).unwrap();
        for d in [3, 4] {
            let lb = lower_bound(n, d).unwrap().ceil() as usize;
            let r = random_family(n, d, 11, 20).unwrap();
            assert!(r.verified && r.family.len() >= lb);
            let g = greedy_family(&p, d, Pool::Exact { budget: 100_000 }).unwrap();
            assert!(hitting(&p, &g, d));
            assert!(g.len() >= lb);
            if d == 3 {
                assert_eq!(pivot_column_collision(&p, &r.family, pivot), None);
                assert_eq!(pivot_column_collision(&p, &g, pivot), None);
            }
        }
    }
}

/// Longest path counted in events, by memoised depth-first search over
/// the cover edges.
fn longest_chain(p: &Poset) -> usize {
    fn depth(p: &Poset, x: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(v) = memo[x] {
            return v;
        }
        let v = 1 + p.successors(x).iter().map(|&y| depth(p, y, memo)).max().unwrap_or(0);
        memo[x] = Some(v);
        v
    }
    let mut memo = vec![None; p.len()];
    (0..p.len()).map(|x| depth(p, x, &mut memo)).max().unwrap_or(0)
}

#[test]
fn stats_height_is_longest_chain() {
    let text = "poset v1\nevents 6\nevent a\nevent b\nevent c\nevent d\nevent e\nevent f\n\
                edge a b\nedge b c\nedge a d\nedge d e\nedge e f\nedge c f\nrace b d\n";
    let ap = parse_poset(text, false).unwrap();
    let s = poset_stats(&ap);
    assert_eq!(s.height, longest_chain(&ap.poset));
    assert_eq!(s.height, 4);
    assert_eq!((s.n_races, s.n_racing_events, s.is_tree), (1, 2, false));
    for h in 0..=4 {
        let t = complete_tree(h).unwrap();
        assert_eq!(t.height(), longest_chain(&t));
    }
    let dt = double_tree(3).unwrap();
    assert_eq!(dt.height(), longest_chain(&dt));
}
