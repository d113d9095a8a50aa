//! The inductive 4h-row matrix `M_h`, a 3-hitting family for the double tree
//! of half-height `h`, and the families it induces on complete binary trees,
//! antichains and arbitrary trees.
//!
//! `M_h` is split into four blocks of `2h` rows each:
//!
//! ```text
//!     [ MOO | MOI ]    rows 0 .. 2h
//!     [ MIO | MII ]    rows 2h .. 4h
//! ```
//!
//! The left column holds the first `3 * 2^(h-1) - 1` events of every row.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::{Event, Family, Poset, Schedule};
use crate::shapes::{self, parse_dt_token, path_token, Side};
use crate::tree::TreeView;

/// A double-tree event with its path packed into an integer, first step in
/// the most significant of the `len` low bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    side: Side,
    len: u8,
    path: u32,
}

impl Node {
    fn root(side: Side) -> Self {
        Node { side, len: 0, path: 0 }
    }

    fn child(self, bit: u32) -> Self {
        Node {
            side: self.side,
            len: self.len + 1,
            path: self.path << 1 | bit,
        }
    }

    fn with_side(self, side: Side) -> Self {
        Node { side, ..self }
    }

    /// The image under `(s, x) -> (s, l x)`.
    fn under(self, l: u32) -> Self {
        Node {
            side: self.side,
            len: self.len + 1,
            path: l << self.len | self.path,
        }
    }
}

fn parse_path(path: &str) -> Option<(u8, u32)> {
    if path.len() > 31 {
        return None;
    }
    let mut v = 0u32;
    for b in path.bytes() {
        v = v << 1 | (b == b'1') as u32;
    }
    Some((path.len() as u8, v))
}

/// Traversal of the sub-double-tree of half-height `k` whose roots sit at
/// `at`: both roots, with the two halves in between, subtree `first` first.
fn traversal(k: usize, at: Node, first: u32, out: &mut Vec<Node>) {
    if k == 0 {
        out.push(at.with_side(Side::Leaf));
        return;
    }
    out.push(at.with_side(Side::First));
    traversal(k - 1, at.child(first), first, out);
    traversal(k - 1, at.child(1 - first), first, out);
    out.push(at.with_side(Side::Second));
}

fn check_prefix(h: usize, prefix: &str) -> Result<Node> {
    let bad = || Error::Addressing(format!("`{prefix}` does not address a sub-double-tree of half-height {h}"));
    if h == 0 {
        return Err(Error::InvalidSize("half-height must be at least 1".into()));
    }
    if prefix.len() > h || !prefix.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(bad());
    }
    let (len, path) = parse_path(prefix).ok_or_else(bad)?;
    Ok(Node {
        side: Side::First,
        len,
        path,
    })
}

fn node_token(n: Node) -> String {
    let path: String = (0..n.len)
        .rev()
        .map(|i| if n.path >> i & 1 == 1 { '1' } else { '0' })
        .collect();
    shapes::dt_token(n.side, &path)
}

/// Left traversal of the sub-double-tree of `double_tree(h)` rooted at
/// `prefix`: first root, left traversal of subtree 0, then of subtree 1,
/// second root. A prefix of length `h` addresses a single shared leaf.
pub fn left_traversal(h: usize, prefix: &str) -> Result<Vec<String>> {
    let at = check_prefix(h, prefix)?;
    let mut out = Vec::new();
    traversal(h - prefix.len(), at, 0, &mut out);
    Ok(out.into_iter().map(node_token).collect())
}

/// Like [`left_traversal`] with subtree 1 visited before subtree 0.
pub fn right_traversal(h: usize, prefix: &str) -> Result<Vec<String>> {
    let at = check_prefix(h, prefix)?;
    let mut out = Vec::new();
    traversal(h - prefix.len(), at, 1, &mut out);
    Ok(out.into_iter().map(node_token).collect())
}

/// Rows of one half of `M_h`, each split at the block boundary.
type Half = Vec<(Vec<Node>, Vec<Node>)>;

fn base_half() -> Half {
    let f = Node::root(Side::First);
    let s = Node::root(Side::Second);
    let l0 = Node::root(Side::Leaf).child(0);
    let l1 = Node::root(Side::Leaf).child(1);
    vec![(vec![f, l0], vec![l1, s]), (vec![f, l1], vec![l0, s])]
}

fn shifted(xs: &[Node], l: u32) -> impl Iterator<Item = Node> + '_ {
    xs.iter().map(move |n| n.under(l))
}

/// One inductive step for a half. `o` and `i` give the subtree order inside
/// the left and right blocks; `first` selects left (0) or right (1)
/// traversals for the two extra rows.
fn grow_half(h: usize, half: &Half, o: [u32; 2], i: [u32; 2], first: u32) -> Half {
    let f = Node::root(Side::First);
    let s = Node::root(Side::Second);
    let mut out: Half = half
        .iter()
        .map(|(left, right)| {
            let mut a = vec![f];
            a.extend(shifted(left, o[0]));
            a.extend(shifted(left, o[1]));
            let mut b: Vec<Node> = shifted(right, i[0]).collect();
            b.extend(shifted(right, i[1]));
            b.push(s);
            (a, b)
        })
        .collect();
    for (x, y) in [(0, 1), (1, 0)] {
        let mut a = vec![f];
        traversal(h, Node::root(Side::First).child(x), first, &mut a);
        let mut b = Vec::new();
        traversal(h, Node::root(Side::First).child(y), first, &mut b);
        b.push(s);
        out.push((a, b));
    }
    out
}

/// `M_h` as a matrix over `double_tree(h)`.
#[derive(Clone, Debug)]
pub struct MMatrix {
    pub h: usize,
    pub poset: Poset,
    /// `4h` rows; duplicates are kept so row indices follow the induction.
    pub rows: Vec<Schedule>,
    /// `3 * 2^(h-1) - 1`: length of the left block of every row.
    pub block_width: usize,
}

/// The four blocks of `M_h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    OO,
    OI,
    IO,
    II,
}

impl MMatrix {
    /// Rows of one block, as slices of the full rows.
    pub fn block(&self, b: Block) -> Vec<&[Event]> {
        let half = 2 * self.h;
        let (rows, left) = match b {
            Block::OO => (0..half, true),
            Block::OI => (0..half, false),
            Block::IO => (half..2 * half, true),
            Block::II => (half..2 * half, false),
        };
        rows.map(|r| {
            let e = self.rows[r].events();
            if left {
                &e[..self.block_width]
            } else {
                &e[self.block_width..]
            }
        })
        .collect()
    }

    pub fn family(&self) -> Family {
        Family::from_rows(self.rows.clone())
    }
}

/// Builds `M_h` by the block induction, starting from the base case
/// `M_1` (each of the two schedules of `double_tree(1)` twice).
pub fn build_m(h: usize) -> Result<MMatrix> {
    let poset = shapes::double_tree(h)?;
    let mut top = base_half();
    let mut bottom = base_half();
    for k in 1..h {
        top = grow_half(k, &top, [0, 1], [1, 0], 0);
        bottom = grow_half(k, &bottom, [1, 0], [0, 1], 1);
    }

    let mut lookup: HashMap<Node, Event> = HashMap::with_capacity(poset.len());
    for (x, tok) in poset.tokens().iter().enumerate() {
        let (side, path) = parse_dt_token(tok).expect("double tree tokens");
        let (len, bits) = parse_path(path).expect("short path");
        lookup.insert(Node { side, len, path: bits }, x);
    }
    let rows = top
        .iter()
        .chain(&bottom)
        .map(|(a, b)| Schedule::new(a.iter().chain(b).map(|n| lookup[n]).collect()))
        .collect();
    Ok(MMatrix {
        h,
        poset,
        rows,
        block_width: 3 * (1 << (h - 1)) - 1,
    })
}

/// First admissible pair `(a1, a2)` for which the top half (`true`) or the
/// bottom half (`false`) has no row with `a1` in the left block and `a2` in
/// the right block.
pub fn separation_violation(m: &MMatrix) -> Option<(Event, Event, bool)> {
    let n = m.poset.len();
    let left_sets: Vec<FixedBitSet> = m
        .rows
        .iter()
        .map(|r| {
            let mut s = FixedBitSet::with_capacity(n);
            for &x in &r.events()[..m.block_width] {
                s.insert(x);
            }
            s
        })
        .collect();
    let (top, bottom) = left_sets.split_at(2 * m.h);
    for a in 0..n {
        for b in 0..n {
            if a == b || m.poset.le(b, a) {
                continue;
            }
            for (half, is_top) in [(top, true), (bottom, false)] {
                if !half.iter().any(|s| s.contains(a) && !s.contains(b)) {
                    return Some((a, b, is_top));
                }
            }
        }
    }
    None
}

/// Whether both halves of `M_h` separate every admissible pair across the
/// block boundary.
pub fn separation_check(m: &MMatrix) -> bool {
    separation_violation(m).is_none()
}

/// `M_h` as a family over `double_tree(h)`.
pub fn doubletree_family(h: usize) -> Result<(Poset, Family)> {
    let m = build_m(h)?;
    let f = m.family();
    Ok((m.poset, f))
}

/// Restricts the rows of `M_h` to the events kept by `rename`, renaming
/// them into `target`.
fn project(h: usize, target: Poset, rename: impl Fn(Side, &str) -> Option<String>) -> Result<(Poset, Family)> {
    let m = build_m(h)?;
    let map: Vec<Option<Event>> = m
        .poset
        .tokens()
        .iter()
        .map(|tok| {
            let (side, path) = parse_dt_token(tok).expect("double tree tokens");
            rename(side, path).map(|t| target.index_of(&t)).transpose()
        })
        .collect::<Result<_>>()?;
    let rows = m
        .rows
        .iter()
        .map(|r| Schedule::new(r.events().iter().filter_map(|&x| map[x]).collect()))
        .collect();
    Ok((target, Family::from_rows(rows)))
}

/// `4h` schedules 3-hitting the complete binary tree of height `h`: the
/// rows of `M_h` without the second tree.
pub fn tree_family(h: usize) -> Result<(Poset, Family)> {
    if h == 0 {
        return Err(Error::InvalidSize("tree height must be at least 1".into()));
    }
    project(h, shapes::complete_tree(h)?, |side, path| match side {
        Side::Second => None,
        _ => Some(path_token(path)),
    })
}

/// `4h` schedules 3-hitting the antichain of the `2^h` shared leaves; leaf
/// `b` becomes the event `int(b) + 1`.
pub fn antichain_family_from_leaves(h: usize) -> Result<(Poset, Family)> {
    if h == 0 {
        return Err(Error::InvalidSize("half-height must be at least 1".into()));
    }
    project(h, shapes::antichain(1 << h)?, |side, path| match side {
        Side::Leaf => Some((parse_path(path).expect("short path").1 + 1).to_string()),
        _ => None,
    })
}

/// A 3-hitting family for any tree. Each node gets a code made of one
/// `ceil(log2 D)`-bit child index per level (`D` the largest out-degree), so
/// the tree sits inside a complete binary tree of height
/// `height * ceil(log2 D)`; the rows of [`tree_family`] for that tree are
/// restricted to the codes in use. Paths (`D < 2`) have a single schedule.
pub fn arbitrary_tree_family(tree: &Poset) -> Result<Family> {
    let t = TreeView::new(tree)?;
    let delta = t.max_outdegree();
    if delta < 2 {
        return Ok(Family::from_rows(vec![Schedule::new(tree.topological_order())]));
    }
    let bits = (usize::BITS - (delta - 1).leading_zeros()) as usize;
    let height = t.height() * bits;
    if height > shapes::MAX_TREE_HEIGHT.min(shapes::MAX_HALF_HEIGHT) {
        return Err(Error::InvalidSize(format!(
            "enclosing binary tree of height {height} is too large"
        )));
    }

    let mut code = vec![String::new(); tree.len()];
    for x in t.preorder(false) {
        for (i, &c) in t.children(x).iter().enumerate() {
            let digits: String = (0..bits)
                .rev()
                .map(|j| if i >> j & 1 == 1 { '1' } else { '0' })
                .collect();
            code[c] = format!("{}{}", code[x], digits);
        }
    }
    let (big, fam) = tree_family(height)?;
    let mut back = vec![None; big.len()];
    for (x, c) in code.iter().enumerate() {
        back[big.index_of(&path_token(c))?] = Some(x);
    }
    let rows = fam
        .rows()
        .iter()
        .map(|r| Schedule::new(r.events().iter().filter_map(|&y| back[y]).collect()))
        .collect();
    Ok(Family::from_rows(rows))
}
