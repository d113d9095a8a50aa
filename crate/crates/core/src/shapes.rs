//! Generators for the poset shapes used throughout the crate.
//!
//! Token conventions: chains and antichains use `"1".."n"`, the independent
//! event of a chain-plus-event is `"*"`, tree nodes are bitstring paths with
//! the root written `"e"`, and double-tree events are `"F:<path>"`,
//! `"S:<path>"` (the two tree sides) and `"L:<path>"` (shared leaves).

use crate::error::{Error, Result};
use crate::poset::Poset;

pub const ROOT_TOKEN: &str = "e";
pub const INDEPENDENT_TOKEN: &str = "*";

/// Largest complete-tree height accepted by the generators. The poset keeps
/// one reachability bitset per event, so memory grows as `4^h`.
pub const MAX_TREE_HEIGHT: usize = 12;
/// Largest double-tree half-height accepted by the generators.
pub const MAX_HALF_HEIGHT: usize = 11;

/// Token of a tree node given its path (`""` is the root).
pub fn path_token(path: &str) -> String {
    if path.is_empty() {
        ROOT_TOKEN.to_string()
    } else {
        path.to_string()
    }
}

/// Inverse of [`path_token`]; `None` if the token is not a tree node.
pub fn token_path(token: &str) -> Option<&str> {
    if token == ROOT_TOKEN {
        Some("")
    } else if !token.is_empty() && token.bytes().all(|b| b == b'0' || b == b'1') {
        Some(token)
    } else {
        None
    }
}

/// All bitstrings of length exactly `len`, in lexicographic order.
pub fn bitstrings(len: usize) -> Vec<String> {
    (0..1u64 << len)
        .map(|v| {
            (0..len)
                .rev()
                .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
                .collect()
        })
        .collect()
}

fn positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidSize(format!("{what} needs at least one event")))
    } else {
        Ok(())
    }
}

/// `1 < 2 < ... < n`.
pub fn chain(n: usize) -> Result<Poset> {
    positive(n, "chain")?;
    let tokens: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let edges: Vec<(String, String)> = tokens
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    Poset::from_hasse(tokens, &edges)
}

pub fn antichain(n: usize) -> Result<Poset> {
    positive(n, "antichain")?;
    Poset::from_hasse::<&str>((1..=n).map(|i| i.to_string()).collect(), &[])
}

/// A chain of `n` events in parallel with the single event `*`.
pub fn chain_plus_event(n: usize) -> Result<Poset> {
    positive(n, "chain")?;
    let single = Poset::from_hasse::<&str>(vec![INDEPENDENT_TOKEN.to_string()], &[])?;
    chain(n)?.parallel_compose(&single)
}

/// Complete binary tree of height `h`: all bitstrings of length `<= h`,
/// ordered by prefix.
pub fn complete_tree(h: usize) -> Result<Poset> {
    if h > MAX_TREE_HEIGHT {
        return Err(Error::InvalidSize(format!("tree height {h} is too large")));
    }
    let mut tokens = Vec::new();
    let mut edges = Vec::new();
    for len in 0..=h {
        for p in bitstrings(len) {
            if len < h {
                edges.push((path_token(&p), format!("{p}0")));
                edges.push((path_token(&p), format!("{p}1")));
            }
            tokens.push(path_token(&p));
        }
    }
    Poset::from_hasse(tokens, &edges)
}

/// Side of a double-tree event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// The tree directed from its root towards the shared leaves.
    First,
    /// A shared leaf.
    Leaf,
    /// The tree directed from the shared leaves towards its root.
    Second,
}

impl Side {
    pub fn tag(self) -> char {
        match self {
            Side::First => 'F',
            Side::Leaf => 'L',
            Side::Second => 'S',
        }
    }
}

/// Token of a double-tree event.
pub fn dt_token(side: Side, path: &str) -> String {
    format!("{}:{}", side.tag(), path_token(path))
}

/// Inverse of [`dt_token`].
pub fn parse_dt_token(token: &str) -> Option<(Side, &str)> {
    let (tag, rest) = token.split_once(':')?;
    let side = match tag {
        "F" => Side::First,
        "L" => Side::Leaf,
        "S" => Side::Second,
        _ => return None,
    };
    let path = token_path(rest)?;
    if side == Side::Leaf && path.is_empty() {
        return None;
    }
    Some((side, path))
}

/// Double tree of half-height `h >= 1`: two complete binary trees of height
/// `h` sharing their `2^h` leaves, `3 * 2^h - 2` events.
pub fn double_tree(h: usize) -> Result<Poset> {
    if h == 0 {
        return Err(Error::InvalidSize("double tree half-height must be at least 1".into()));
    }
    if h > MAX_HALF_HEIGHT {
        return Err(Error::InvalidSize(format!("double tree half-height {h} is too large")));
    }
    let mut tokens = Vec::new();
    let mut edges = Vec::new();
    for len in 0..h {
        for p in bitstrings(len) {
            tokens.push(dt_token(Side::First, &p));
            tokens.push(dt_token(Side::Second, &p));
            let child_side = if len + 1 == h { Side::Leaf } else { Side::First };
            let parent_side = if len + 1 == h { Side::Leaf } else { Side::Second };
            for b in ['0', '1'] {
                let c = format!("{p}{b}");
                edges.push((dt_token(Side::First, &p), dt_token(child_side, &c)));
                edges.push((dt_token(parent_side, &c), dt_token(Side::Second, &p)));
            }
        }
    }
    tokens.extend(bitstrings(h).iter().map(|p| dt_token(Side::Leaf, p)));
    Poset::from_hasse(tokens, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn chain_of_three_has_unique_schedule() {
        let p = chain(3).unwrap();
        let all = oracle::enumerate_schedules(&p, 100);
        assert_eq!(all.schedules.len(), 1);
        assert_eq!(p.render(&all.schedules[0]), "1 2 3");
    }

    #[test]
    fn singleton_chain() {
        let p = chain(1).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.covers().is_empty());
    }

    #[test]
    fn chain_of_five_closure() {
        let p = chain(5).unwrap();
        assert_eq!(p.covers().len(), 4);
        // oracle: pairs i <= j over 1..=5
        let expected = (1..=5).flat_map(|i| (i..=5).map(move |j| (i, j))).count();
        assert_eq!(expected, 15);
        assert_eq!(p.relation_size(), expected);
    }

    #[test]
    fn zero_sizes_rejected() {
        assert!(matches!(chain(0), Err(Error::InvalidSize(_))));
        assert!(matches!(antichain(0), Err(Error::InvalidSize(_))));
        assert!(matches!(chain_plus_event(0), Err(Error::InvalidSize(_))));
        assert!(matches!(double_tree(0), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn antichain_counts() {
        assert_eq!(oracle::enumerate_schedules(&antichain(3).unwrap(), 100).schedules.len(), 6);
        assert_eq!(oracle::enumerate_schedules(&antichain(1).unwrap(), 100).schedules.len(), 1);
        let p = antichain(4).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                if x != y {
                    assert!(p.incomparable(x, y));
                }
            }
        }
    }

    #[test]
    fn chain_plus_event_schedule_counts() {
        let count = |n| {
            oracle::enumerate_schedules(&chain_plus_event(n).unwrap(), 1000)
                .schedules
                .len()
        };
        assert_eq!(count(1), 2);
        assert_eq!(count(2), 3);
        assert_eq!(count(4), 5);
    }

    #[test]
    fn complete_tree_sizes() {
        assert_eq!(complete_tree(0).unwrap().len(), 1);
        assert_eq!(complete_tree(2).unwrap().len(), 7);
        let t3 = complete_tree(3).unwrap();
        assert_eq!(t3.len(), 15);
        let leaves = (0..t3.len()).filter(|&x| t3.successors(x).is_empty()).count();
        assert_eq!(leaves, 8);
        assert_eq!(t3.height(), 4);
    }

    #[test]
    fn tree_order_is_prefix_order() {
        let t = complete_tree(2).unwrap();
        assert!(t.leq("0", "01").unwrap());
        assert!(!t.leq("00", "01").unwrap());
        assert!(!t.leq("01", "00").unwrap());
        assert!(t.leq("e", "11").unwrap());
    }

    #[test]
    fn double_tree_small_cases() {
        let d1 = double_tree(1).unwrap();
        assert_eq!(d1.tokens(), &["F:e", "L:0", "L:1", "S:e"]);
        let d2 = double_tree(2).unwrap();
        assert_eq!(d2.len(), 10);
        assert!(d2.leq("F:e", "S:e").unwrap());
        assert!(d2.leq("F:0", "S:e").unwrap());
        assert!(d2.leq("F:0", "L:01").unwrap());
        assert!(d2.leq("L:01", "S:0").unwrap());
        assert!(!d2.leq("F:0", "S:1").unwrap());
        assert!(!d2.leq("L:00", "L:01").unwrap());
        for h in 1..=6 {
            assert_eq!(double_tree(h).unwrap().len(), 3 * (1 << h) - 2);
            assert_eq!(double_tree(h).unwrap().height(), 2 * h + 1);
        }
    }

    #[test]
    fn dt_tokens_round_trip() {
        assert_eq!(parse_dt_token("F:e"), Some((Side::First, "")));
        assert_eq!(parse_dt_token("L:01"), Some((Side::Leaf, "01")));
        assert_eq!(parse_dt_token("L:e"), None);
        assert_eq!(parse_dt_token("X:0"), None);
        assert_eq!(dt_token(Side::Second, "10"), "S:10");
    }
}
