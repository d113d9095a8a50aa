//! Tree-shaped posets: parent/children structure, least common ancestors,
//! lca-closure and depth-first orders.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::{Event, Poset};
use crate::shapes::{self, token_path};

/// A poset whose Hasse diagram is a rooted tree directed away from the root.
/// Children are kept in canonical (ascending token) order; "left" means first.
#[derive(Clone, Debug)]
pub struct TreeView<'a> {
    poset: &'a Poset,
    root: Event,
    parent: Vec<Option<Event>>,
    depth: Vec<usize>,
}

impl<'a> TreeView<'a> {
    pub fn new(poset: &'a Poset) -> Result<Self> {
        let roots = poset.minimal_events();
        if roots.len() != 1 {
            return Err(Error::Shape(format!(
                "a tree needs exactly one root, found {}",
                roots.len()
            )));
        }
        let mut parent = vec![None; poset.len()];
        for x in 0..poset.len() {
            match poset.predecessors(x) {
                [] => {}
                [p] => parent[x] = Some(*p),
                _ => {
                    return Err(Error::Shape(format!(
                        "event `{}` has several immediate predecessors",
                        poset.token(x)
                    )))
                }
            }
        }
        let root = roots[0];
        let mut depth = vec![0; poset.len()];
        for x in poset.topological_order() {
            if let Some(p) = parent[x] {
                depth[x] = depth[p] + 1;
            }
        }
        Ok(TreeView {
            poset,
            root,
            parent,
            depth,
        })
    }

    pub fn poset(&self) -> &'a Poset {
        self.poset
    }

    pub fn root(&self) -> Event {
        self.root
    }

    pub fn parent(&self, x: Event) -> Option<Event> {
        self.parent[x]
    }

    pub fn children(&self, x: Event) -> &[Event] {
        self.poset.successors(x)
    }

    pub fn depth(&self, x: Event) -> usize {
        self.depth[x]
    }

    /// Height in edges: the depth of the deepest node.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn max_outdegree(&self) -> usize {
        (0..self.poset.len())
            .map(|x| self.children(x).len())
            .max()
            .unwrap_or(0)
    }

    /// Path from the root down to `x`, both included.
    pub fn ancestors_from_root(&self, x: Event) -> Vec<Event> {
        let mut path = vec![x];
        let mut cur = x;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn lca(&self, mut u: Event, mut v: Event) -> Event {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u].unwrap();
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v].unwrap();
        }
        while u != v {
            u = self.parent[u].unwrap();
            v = self.parent[v].unwrap();
        }
        u
    }

    pub fn lca_tokens(&self, u: &str, v: &str) -> Result<String> {
        let l = self.lca(self.poset.index_of(u)?, self.poset.index_of(v)?);
        Ok(self.poset.token(l).to_string())
    }

    /// Preorder visiting children left to right (`reverse = false`) or right
    /// to left.
    pub fn preorder(&self, reverse: bool) -> Vec<Event> {
        let mut out = Vec::with_capacity(self.poset.len());
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            out.push(x);
            let ch = self.children(x);
            if reverse {
                stack.extend(ch.iter().copied());
            } else {
                stack.extend(ch.iter().rev().copied());
            }
        }
        out
    }

    /// Smallest superset of `xs` closed under pairwise lca, in left preorder.
    ///
    /// Uses the fact that the closure is `xs` plus the lcas of consecutive
    /// elements in preorder.
    pub fn lca_closure(&self, xs: &[Event]) -> Vec<Event> {
        if xs.is_empty() {
            return Vec::new();
        }
        let rank = self.preorder_rank();
        let mut sorted: Vec<Event> = xs.to_vec();
        sorted.sort_by_key(|&x| rank[x]);
        sorted.dedup();
        let mut set = FixedBitSet::with_capacity(self.poset.len());
        for &x in &sorted {
            set.insert(x);
        }
        for w in sorted.windows(2) {
            set.insert(self.lca(w[0], w[1]));
        }
        let mut out: Vec<Event> = set.ones().collect();
        out.sort_by_key(|&x| rank[x]);
        out
    }

    pub fn preorder_rank(&self) -> Vec<usize> {
        let mut rank = vec![0; self.poset.len()];
        for (i, x) in self.preorder(false).into_iter().enumerate() {
            rank[x] = i;
        }
        rank
    }
}

/// The complete binary tree of height `h` together with bitstring helpers.
#[derive(Clone, Debug)]
pub struct CompleteTree {
    h: usize,
    poset: Poset,
}

impl CompleteTree {
    pub fn new(h: usize) -> Result<Self> {
        Ok(CompleteTree {
            h,
            poset: shapes::complete_tree(h)?,
        })
    }

    /// Recognises a poset that is exactly the complete binary tree with
    /// bitstring tokens.
    pub fn from_poset(p: &Poset) -> Result<Self> {
        let n = p.len() + 1;
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::Shape(format!("{} events is not 2^(h+1) - 1", p.len())));
        }
        let h = n.trailing_zeros() as usize - 1;
        let t = CompleteTree::new(h)?;
        if &t.poset != p {
            return Err(Error::Shape("poset is not a complete binary tree".into()));
        }
        Ok(t)
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    /// Bitstring path of an event (`""` for the root).
    pub fn path(&self, x: Event) -> &str {
        token_path(self.poset.token(x)).expect("complete tree tokens are bitstrings")
    }

    pub fn event(&self, path: &str) -> Event {
        self.poset
            .index_of(&shapes::path_token(path))
            .expect("path within the tree")
    }
}
