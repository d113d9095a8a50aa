//! Pattern-based d-hitting families for complete binary trees.
//!
//! A pattern summarises where a d-tuple sits in the tree: the shape of the
//! lca-closure of the tuple, which child lies on which side, the layer of
//! every inner node, and the order in which the tuple is hit. One schedule,
//! produced by cutting the tree into pieces, hits every tuple conforming to
//! a pattern, and every admissible tuple conforms to some pattern.
//!
//! Patterns are kept in canonical form: nodes are numbered in preorder and
//! the children of a binary node are listed with the side-0 child first.
//! Two patterns are isomorphic exactly when their canonical forms are
//! equal. The text form is
//!
//! ```text
//! pattern := "d=" INT " shape=" shape " heval=" ints " patsch=" ints
//! shape   := "L" | "U(" shape ")" | "B(" shape "," shape ")"
//! ints    := "-" | INT ("," INT)*
//! ```
//!
//! where `heval` lists the layers of the inner nodes in preorder and
//! `patsch` lists preorder node numbers in schedule order.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracle::schedule_hitting;
use crate::poset::{DTuple, Event, Family, Poset, Schedule};
use crate::tree::{CompleteTree, TreeView};

/// Planar shape of a pattern tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Leaf,
    Unary(Box<Shape>),
    Binary(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn size(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Unary(c) => 1 + c.size(),
            Shape::Binary(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// All shapes with exactly `m` nodes, in a fixed order.
    pub fn all(m: usize) -> Vec<Shape> {
        if m == 0 {
            return Vec::new();
        }
        if m == 1 {
            return vec![Shape::Leaf];
        }
        let mut out: Vec<Shape> = Shape::all(m - 1)
            .into_iter()
            .map(|c| Shape::Unary(Box::new(c)))
            .collect();
        for a in 1..m - 1 {
            let right = Shape::all(m - 1 - a);
            for l in Shape::all(a) {
                for r in &right {
                    out.push(Shape::Binary(Box::new(l.clone()), Box::new(r.clone())));
                }
            }
        }
        out
    }

    /// Parent of every node, nodes numbered in preorder.
    fn parents(&self) -> Vec<Option<usize>> {
        fn rec(s: &Shape, parent: Option<usize>, out: &mut Vec<Option<usize>>) {
            let me = out.len();
            out.push(parent);
            match s {
                Shape::Leaf => {}
                Shape::Unary(c) => rec(c, Some(me), out),
                Shape::Binary(a, b) => {
                    rec(a, Some(me), out);
                    rec(b, Some(me), out);
                }
            }
        }
        let mut out = Vec::new();
        rec(self, None, &mut out);
        out
    }

    /// Inverse of [`Shape::parents`]; `None` unless the parents describe a
    /// preorder numbering with out-degree at most two.
    fn from_parents(parent: &[Option<usize>]) -> Option<Shape> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for (x, p) in parent.iter().enumerate() {
            match p {
                None if x == 0 => {}
                Some(p) if *p < x => children[*p].push(x),
                _ => return None,
            }
        }
        fn build(x: usize, children: &[Vec<usize>], next: &mut usize) -> Option<Shape> {
            if x != *next {
                return None;
            }
            *next += 1;
            Some(match children[x].as_slice() {
                [] => Shape::Leaf,
                [c] => Shape::Unary(Box::new(build(*c, children, next)?)),
                [a, b] => {
                    let l = build(*a, children, next)?;
                    Shape::Binary(Box::new(l), Box::new(build(*b, children, next)?))
                }
                _ => return None,
            })
        }
        let mut next = 0;
        let s = build(0, &children, &mut next)?;
        (next == n).then_some(s)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Leaf => write!(f, "L"),
            Shape::Unary(c) => write!(f, "U({c})"),
            Shape::Binary(a, b) => write!(f, "B({a},{b})"),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Shape> {
        fn parse(b: &[u8], i: &mut usize) -> Option<Shape> {
            let expect = |i: &mut usize, c: u8| {
                (b.get(*i) == Some(&c)).then(|| *i += 1)
            };
            let tag = *b.get(*i)?;
            *i += 1;
            match tag {
                b'L' => Some(Shape::Leaf),
                b'U' => {
                    expect(i, b'(')?;
                    let c = parse(b, i)?;
                    expect(i, b')')?;
                    Some(Shape::Unary(Box::new(c)))
                }
                b'B' => {
                    expect(i, b'(')?;
                    let l = parse(b, i)?;
                    expect(i, b',')?;
                    let r = parse(b, i)?;
                    expect(i, b')')?;
                    Some(Shape::Binary(Box::new(l), Box::new(r)))
                }
                _ => None,
            }
        }
        let mut i = 0;
        match parse(s.as_bytes(), &mut i) {
            Some(shape) if i == s.len() => Ok(shape),
            _ => Err(Error::InvalidPattern(format!("bad shape `{s}`"))),
        }
    }
}

/// A pattern for depth `d`, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    d: usize,
    shape: Shape,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    heval: Vec<Option<usize>>,
    patsch: Vec<usize>,
}

impl Pattern {
    /// Checks every pattern condition: `d <= |D| <= 2d - 1`, at most `d - 1`
    /// inner nodes, layers defined exactly on inner nodes and strictly
    /// increasing downwards, and `patsch` a schedule of the pattern tree.
    pub fn new(d: usize, shape: Shape, heval: Vec<Option<usize>>, patsch: Vec<usize>) -> Result<Pattern> {
        let bad = |msg: String| Err(Error::InvalidPattern(msg));
        let parent = shape.parents();
        let m = parent.len();
        if d < 2 || m < d || m > 2 * d - 1 {
            return bad(format!("{m} nodes is outside [d, 2d-1] for d={d}"));
        }
        let mut children = vec![Vec::new(); m];
        for (x, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(x);
            }
        }
        let inner = children.iter().filter(|c| !c.is_empty()).count();
        if inner > d - 1 {
            return bad(format!("{inner} inner nodes exceed d-1={}", d - 1));
        }
        if heval.len() != m {
            return bad(format!("{} layers for {m} nodes", heval.len()));
        }
        for x in 0..m {
            if heval[x].is_some() == children[x].is_empty() {
                return bad(format!("layer of node {x} must be given iff it is an inner node"));
            }
            if let (Some(p), Some(l)) = (parent[x], heval[x]) {
                if heval[p].unwrap() >= l {
                    return bad(format!("layers must increase from node {p} to node {x}"));
                }
            }
        }
        let mut seen = vec![false; m];
        for &x in &patsch {
            if x >= m || seen[x] || parent[x].is_some_and(|p| !seen[p]) {
                return bad(format!("patsch {patsch:?} is not a schedule of the pattern tree"));
            }
            seen[x] = true;
        }
        if patsch.len() != m {
            return bad(format!("patsch {patsch:?} is not a schedule of the pattern tree"));
        }
        Ok(Pattern {
            d,
            shape,
            parent,
            children,
            heval,
            patsch,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    /// Side of `x` below its parent; defined only when `x` has a sibling.
    pub fn sib(&self, x: usize) -> Option<u8> {
        let p = self.parent[x]?;
        match self.children[p].as_slice() {
            [a, _] => Some(if *a == x { 0 } else { 1 }),
            _ => None,
        }
    }

    pub fn heval(&self, x: usize) -> Option<usize> {
        self.heval[x]
    }

    pub fn patsch(&self) -> &[usize] {
        &self.patsch
    }

    pub fn max_layer(&self) -> Option<usize> {
        self.heval.iter().flatten().copied().max()
    }
}

fn join(xs: impl Iterator<Item = usize>) -> String {
    let v: Vec<String> = xs.map(|x| x.to_string()).collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(",")
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={} shape={} heval={} patsch={}",
            self.d,
            self.shape,
            join(self.heval.iter().flatten().copied()),
            join(self.patsch.iter().copied())
        )
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Pattern> {
        let bad = || Error::InvalidPattern(format!("cannot parse `{s}`"));
        let fields: Vec<&str> = s.split_whitespace().collect();
        let [d, shape, heval, patsch] = fields.as_slice() else {
            return Err(bad());
        };
        let value = |field: &'static str, text: &str| -> Result<String> {
            text.strip_prefix(field)
                .and_then(|t| t.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(bad)
        };
        let ints = |text: String| -> Result<Vec<usize>> {
            if text == "-" {
                return Ok(Vec::new());
            }
            text.split(',').map(|x| x.parse().map_err(|_| bad())).collect()
        };
        let d: usize = value("d", d)?.parse().map_err(|_| bad())?;
        let shape: Shape = value("shape", shape)?.parse()?;
        let layers = ints(value("heval", heval)?)?;
        let patsch = ints(value("patsch", patsch)?)?;

        let parent = shape.parents();
        let inner: Vec<bool> = (0..parent.len())
            .map(|x| parent.iter().any(|p| *p == Some(x)))
            .collect();
        if layers.len() != inner.iter().filter(|&&b| b).count() {
            return Err(bad());
        }
        let mut it = layers.into_iter();
        let heval = inner.iter().map(|&b| if b { it.next() } else { None }).collect();
        Pattern::new(d, shape, heval, patsch)
    }
}

/// `4^(2d-1) / 3 * h^(d-1) * (2d-1)!`, an upper bound on the number of
/// patterns (saturating).
pub fn pattern_count_bound(d: usize, h: usize) -> u128 {
    if d < 2 {
        return 0;
    }
    let mut b: u128 = 4u128.saturating_pow(2 * d as u32 - 1);
    b = b.saturating_mul((h as u128).saturating_pow(d as u32 - 1));
    for i in 2..=(2 * d - 1) as u128 {
        b = b.saturating_mul(i);
    }
    b / 3
}

/// All layer assignments for the inner nodes of `shape`, strictly
/// increasing downwards, with values below `h`.
fn layer_assignments(parent: &[Option<usize>], inner: &[bool], h: usize) -> Vec<Vec<Option<usize>>> {
    fn rec(
        x: usize,
        parent: &[Option<usize>],
        inner: &[bool],
        h: usize,
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if x == parent.len() {
            out.push(cur.clone());
            return;
        }
        if !inner[x] {
            cur.push(None);
            rec(x + 1, parent, inner, h, cur, out);
            cur.pop();
            return;
        }
        let lo = parent[x].and_then(|p| cur[p]).map_or(0, |l| l + 1);
        for l in lo..h {
            cur.push(Some(l));
            rec(x + 1, parent, inner, h, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, parent, inner, h, &mut Vec::new(), &mut out);
    out
}

/// All schedules of a tree given by parent links, in lexicographic order.
fn tree_schedules(parent: &[Option<usize>]) -> Vec<Vec<usize>> {
    fn rec(parent: &[Option<usize>], done: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == parent.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..parent.len() {
            if !done[x] && parent[x].is_none_or(|p| done[p]) {
                done[x] = true;
                cur.push(x);
                rec(parent, done, cur, out);
                cur.pop();
                done[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(parent, &mut vec![false; parent.len()], &mut Vec::new(), &mut out);
    out
}

/// Every pattern for depth `d` on the tree of height `h`, up to
/// isomorphism, in canonical order. Fails once more than `budget` patterns
/// would be produced; the error carries [`pattern_count_bound`].
pub fn enumerate_patterns(d: usize, h: usize, budget: usize) -> Result<Vec<Pattern>> {
    if d < 2 {
        return Err(Error::InvalidDepth {
            d,
            reason: "need d >= 2".into(),
        });
    }
    if h < 1 {
        return Err(Error::InvalidSize("tree height must be at least 1".into()));
    }
    let mut out = Vec::new();
    for m in d..=2 * d - 1 {
        for shape in Shape::all(m) {
            let parent = shape.parents();
            let inner: Vec<bool> = (0..m).map(|x| parent.contains(&Some(x))).collect();
            if inner.iter().filter(|&&b| b).count() > d - 1 {
                continue;
            }
            let layers = layer_assignments(&parent, &inner, h);
            if layers.is_empty() {
                continue;
            }
            let orders = tree_schedules(&parent);
            if out.len() + layers.len() * orders.len() > budget {
                return Err(Error::Infeasible {
                    what: format!("pattern enumeration for d={d}, h={h}"),
                    count: pattern_count_bound(d, h),
                    budget: budget as u128,
                });
            }
            for heval in &layers {
                for patsch in &orders {
                    out.push(Pattern::new(d, shape.clone(), heval.clone(), patsch.clone())?);
                }
            }
        }
    }
    Ok(out)
}

/// The lca-closure of `xs` as a pattern tree: nodes in preorder (which is
/// token order for bitstring trees) and the parent of each.
fn closure_tree(t: &TreeView, xs: &[Event]) -> (Vec<Event>, Vec<Option<usize>>) {
    let nodes = t.lca_closure(xs);
    let mut parent = Vec::with_capacity(nodes.len());
    let mut stack: Vec<usize> = Vec::new();
    for (i, &x) in nodes.iter().enumerate() {
        while let Some(&top) = stack.last() {
            if t.poset().le(nodes[top], x) {
                break;
            }
            stack.pop();
        }
        parent.push(stack.last().copied());
        stack.push(i);
    }
    (nodes, parent)
}

/// The pattern that `t` conforms to by construction: the lca-closure of
/// its events, their depths as layers, and the order in which
/// [`schedule_hitting`] visits them.
pub fn pattern_of_tuple(tree: &Poset, t: &DTuple) -> Result<Pattern> {
    CompleteTree::from_poset(tree)?;
    let view = TreeView::new(tree)?;
    let hitting = schedule_hitting(tree, t)?;
    let (nodes, parent) = closure_tree(&view, t.events());
    let shape = Shape::from_parents(&parent).ok_or_else(|| Error::Shape("closure is not binary".into()))?;
    let heval = (0..nodes.len())
        .map(|i| parent.contains(&Some(i)).then(|| view.depth(nodes[i])))
        .collect();
    let patsch = hitting
        .events()
        .iter()
        .filter_map(|x| nodes.iter().position(|y| y == x))
        .collect();
    Pattern::new(t.len(), shape, heval, patsch)
}

/// Whether `t` conforms to `p` on `tree`. The isomorphism between the
/// pattern tree and the lca-closure is forced by the side condition, so it
/// suffices to compare canonical shapes, layers and the hitting order.
pub fn conforms(tree: &Poset, t: &DTuple, p: &Pattern) -> bool {
    if t.len() != p.d {
        return false;
    }
    let Ok(view) = TreeView::new(tree) else {
        return false;
    };
    let (nodes, parent) = closure_tree(&view, t.events());
    if parent != p.parent {
        return false;
    }
    for (i, &x) in nodes.iter().enumerate() {
        if p.heval[i].is_some_and(|l| l != view.depth(x)) {
            return false;
        }
    }
    let mut rank = vec![0; p.len()];
    for (r, &c) in p.patsch.iter().enumerate() {
        rank[c] = r;
    }
    let ranks: Vec<usize> = t
        .events()
        .iter()
        .map(|a| rank[nodes.iter().position(|y| y == a).unwrap()])
        .collect();
    ranks.windows(2).all(|w| w[0] < w[1])
}

/// Trace of one run of the cutting procedure.
#[derive(Clone, Debug)]
pub struct CutRun {
    pub schedule: Schedule,
    /// `U(c)` for every pattern node `c`, in scheduling order.
    pub pieces: Vec<Vec<Event>>,
}

struct CutState<'a> {
    tree: &'a TreeView<'a>,
    /// Enabled piece roots per pattern node, set when its parent is handled.
    roots: Vec<Option<Vec<Event>>>,
    scheduled: Vec<Event>,
    done: FixedBitSet,
}

impl CutState<'_> {
    fn check_roots(&self, c: usize, roots: &[Event], ext: usize) -> Result<()> {
        let p = self.tree.poset();
        for (i, &x) in roots.iter().enumerate() {
            if self.done.contains(x) || self.tree.parent(x).is_some_and(|q| !self.done.contains(q)) {
                return Err(Error::CutInvariant(format!(
                    "event `{}` for node {c} is not enabled",
                    p.token(x)
                )));
            }
            if self.tree.depth(x) > ext {
                return Err(Error::CutInvariant(format!(
                    "event `{}` lies below layer {ext} of node {c}",
                    p.token(x)
                )));
            }
            if roots[..i].iter().any(|&y| !p.incomparable(x, y)) {
                return Err(Error::CutInvariant(format!("roots of node {c} are not an antichain")));
            }
        }
        Ok(())
    }

    /// Schedules the subtree of `x` down to layer `ext` in lexicographic
    /// depth-first order; returns the events scheduled.
    fn schedule_piece(&mut self, x: Event, ext: usize, piece: &mut Vec<Event>) {
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            self.done.insert(y);
            self.scheduled.push(y);
            piece.push(y);
            if self.tree.depth(y) < ext {
                stack.extend(self.tree.children(y).iter().rev().copied());
            }
        }
    }
}

/// Runs the cutting procedure for `p` on the complete binary tree of height
/// `h` (given as `tree`).
pub fn cut(p: &Pattern, tree: &CompleteTree) -> Result<CutRun> {
    let h = tree.height();
    if p.max_layer().is_some_and(|l| l >= h) {
        return Err(Error::InvalidPattern(format!("layer {} does not exist at height {h}", p.max_layer().unwrap())));
    }
    let view = TreeView::new(tree.poset())?;
    let n = tree.poset().len();
    let mut st = CutState {
        tree: &view,
        roots: vec![None; p.len()],
        scheduled: Vec::with_capacity(n),
        done: FixedBitSet::with_capacity(n),
    };
    st.roots[0] = Some(vec![view.root()]);
    let mut pieces = Vec::with_capacity(p.len());
    for &c in &p.patsch {
        let ext = p.heval[c].unwrap_or(h);
        let roots = st.roots[c]
            .take()
            .ok_or_else(|| Error::CutInvariant(format!("node {c} handled before its parent")))?;
        st.check_roots(c, &roots, ext)?;
        let mut piece = Vec::new();
        for &x in &roots {
            st.schedule_piece(x, ext, &mut piece);
        }
        let enabled: Vec<Event> = piece
            .iter()
            .filter(|&&y| view.depth(y) == ext)
            .flat_map(|&y| view.children(y).iter().copied())
            .collect();
        match p.children[c].as_slice() {
            [] => {
                if !enabled.is_empty() {
                    return Err(Error::CutInvariant(format!("leaf node {c} leaves events unscheduled")));
                }
            }
            [only] => st.roots[*only] = Some(enabled),
            [c0, c1] => {
                let (zero, one): (Vec<Event>, Vec<Event>) = enabled
                    .into_iter()
                    .partition(|&z| tree.path(z).ends_with('0'));
                st.roots[*c0] = Some(zero);
                st.roots[*c1] = Some(one);
            }
            _ => unreachable!("pattern out-degree is at most two"),
        }
        pieces.push(piece);
    }
    let schedule = Schedule::new(st.scheduled);
    if schedule.len() != n {
        return Err(Error::CutInvariant(format!("{} of {n} events scheduled", schedule.len())));
    }
    tree.poset()
        .check_schedule(&schedule)
        .map_err(|e| Error::CutInvariant(e.to_string()))?;
    Ok(CutRun { schedule, pieces })
}

/// The schedule of the complete binary tree of height `h` built for `p`.
pub fn schedule_for_pattern(p: &Pattern, h: usize) -> Result<Schedule> {
    Ok(cut(p, &CompleteTree::new(h)?)?.schedule)
}

/// One cut schedule per pattern, duplicates removed (first occurrence
/// kept, in canonical pattern order).
pub fn pattern_family(d: usize, h: usize, budget: usize) -> Result<(Poset, Family)> {
    let tree = CompleteTree::new(h)?;
    let patterns = enumerate_patterns(d, h, budget)?;
    let rows = patterns
        .par_iter()
        .map(|p| cut(p, &tree).map(|r| r.schedule))
        .collect::<Result<Vec<_>>>()?;
    Ok((tree.poset().clone(), Family::from_rows(rows).dedup()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_admissible, is_d_hitting};
    use crate::shapes::complete_tree;

    fn tuple(p: &Poset, xs: &[&str]) -> DTuple {
        p.tuple(xs).unwrap()
    }

    #[test]
    fn shape_counts() {
        // Motzkin numbers count unary-binary planar trees
        let counts: Vec<usize> = (1..=7).map(|m| Shape::all(m).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 21, 51]);
        for s in Shape::all(5) {
            assert_eq!(s.to_string().parse::<Shape>().unwrap(), s);
            assert_eq!(Shape::from_parents(&s.parents()), Some(s));
        }
        assert!("B(L)".parse::<Shape>().is_err());
    }

    #[test]
    fn pattern_of_three_leaves() {
        let tree = complete_tree(2).unwrap();
        let t = tuple(&tree, &["00", "01", "11"]);
        let p = pattern_of_tuple(&tree, &t).unwrap();
        assert_eq!(p.to_string(), "d=3 shape=B(B(L,L),L) heval=0,1 patsch=0,1,2,3,4");
        assert_eq!(p.sib(1), Some(0));
        assert_eq!(p.sib(2), Some(0));
        assert_eq!(p.sib(3), Some(1));
        assert_eq!(p.sib(4), Some(1));
        assert_eq!(p.sib(0), None);
        assert!(conforms(&tree, &t, &p));

        let reversed = Pattern::new(3, p.shape().clone(), p.heval.clone(), vec![0, 4, 1, 3, 2]).unwrap();
        assert!(!conforms(&tree, &t, &reversed));
        let two = tuple(&tree, &["00", "01"]);
        assert!(!conforms(&tree, &two, &p));
    }

    #[test]
    fn pattern_of_pair_of_leaves() {
        let tree = complete_tree(1).unwrap();
        let p = pattern_of_tuple(&tree, &tuple(&tree, &["0", "1"])).unwrap();
        assert_eq!(p.len(), 3);
        let p = pattern_of_tuple(&tree, &tuple(&tree, &["1", "0"])).unwrap();
        assert_eq!(p.patsch(), &[0, 2, 1]);
    }

    #[test]
    fn inadmissible_tuple() {
        let tree = complete_tree(2).unwrap();
        assert!(matches!(
            pattern_of_tuple(&tree, &tuple(&tree, &["01", "0"])),
            Err(Error::Inadmissible(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        for p in enumerate_patterns(3, 2, 1_000_000).unwrap() {
            assert_eq!(p.to_string().parse::<Pattern>().unwrap(), p);
        }
        assert!("d=3 shape=L heval=- patsch=0".parse::<Pattern>().is_err());
        assert!("d=2 shape=U(L) heval=0 patsch=1,0".parse::<Pattern>().is_err());
    }

    #[test]
    fn invalid_patterns_rejected() {
        let s: Shape = "U(U(L))".parse().unwrap();
        assert!(Pattern::new(2, s.clone(), vec![Some(1), Some(0), None], vec![0, 1, 2]).is_err());
        assert!(Pattern::new(2, s.clone(), vec![Some(0), None, None], vec![0, 1, 2]).is_err());
        // three inner nodes exceed d - 1 = 2 for d = 3
        let s: Shape = "U(U(U(L)))".parse().unwrap();
        assert!(Pattern::new(3, s, vec![Some(0), Some(1), Some(2), None], vec![0, 1, 2, 3]).is_err());
    }

    #[test]
    fn counts_within_bound() {
        assert_eq!(pattern_count_bound(2, 1), 128);
        assert_eq!(pattern_count_bound(3, 2), 163_840);
        for (d, h) in [(2, 1), (2, 3), (3, 1), (3, 2), (3, 3), (4, 2)] {
            let n = enumerate_patterns(d, h, 1_000_000).unwrap().len() as u128;
            assert!(n > 0 && n <= pattern_count_bound(d, h));
        }
    }

    #[test]
    fn budget_error_carries_bound() {
        match enumerate_patterns(3, 3, 10) {
            Err(Error::Infeasible { count, budget, .. }) => {
                assert_eq!(count, pattern_count_bound(3, 3));
                assert_eq!(budget, 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chain_pattern_schedules_layers_in_order() {
        // inner chain at layers 0, 1 with a leaf below: the top two layers
        // are scheduled before anything deeper
        let p: Pattern = "d=3 shape=U(U(L)) heval=0,1 patsch=0,1,2".parse().unwrap();
        let tree = CompleteTree::new(3).unwrap();
        let run = cut(&p, &tree).unwrap();
        let depths: Vec<usize> = run.schedule.events()[..3].iter().map(|&x| tree.path(x).len()).collect();
        assert_eq!(depths, vec![0, 1, 1]);
        assert_eq!(run.pieces[0].len(), 1);
        assert_eq!(run.pieces[1].len(), 2);
    }

    #[test]
    fn pieces_partition_the_tree() {
        let tree = CompleteTree::new(3).unwrap();
        for p in enumerate_patterns(3, 3, 1_000_000).unwrap() {
            let run = cut(&p, &tree).unwrap();
            let mut all: Vec<Event> = run.pieces.concat();
            all.sort_unstable();
            assert_eq!(all, (0..15).collect::<Vec<_>>());
        }
    }

    #[test]
    fn height_mismatch() {
        let p: Pattern = "d=3 shape=U(U(L)) heval=0,1 patsch=0,1,2".parse().unwrap();
        assert!(matches!(schedule_for_pattern(&p, 1), Err(Error::InvalidPattern(_))));
    }

    #[test]
    fn cut_hits_the_source_tuple() {
        let tree = complete_tree(2).unwrap();
        for t in enumerate_admissible(&tree, 3).unwrap() {
            let p = pattern_of_tuple(&tree, &t).unwrap();
            assert!(schedule_for_pattern(&p, 2).unwrap().hits(&t).unwrap());
        }
    }

    #[test]
    fn family_small() {
        let (p, f) = pattern_family(3, 2, 1_000_000).unwrap();
        assert_eq!(p.len(), 7);
        assert!(is_d_hitting(&p, &f, 3).unwrap().is_hitting);
    }
}
