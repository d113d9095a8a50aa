//! Finite partial orders over string-tokened events, together with schedules
//! (linear extensions), families of schedules and d-tuples.
//!
//! Events are stored in canonical order: sorted by token bytes. Every index
//! handed out by a [`Poset`] refers to that order, so two posets built from
//! the same tokens and relation are indistinguishable.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Index of an event inside one [`Poset`].
pub type Event = usize;

#[derive(Clone)]
pub struct Poset {
    tokens: Vec<String>,
    index: HashMap<String, Event>,
    covers: Vec<(Event, Event)>,
    succ: Vec<Vec<Event>>,
    pred: Vec<Vec<Event>>,
    /// `up[x]` holds every `y` with `x <= y` (reflexive).
    up: Vec<FixedBitSet>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poset")
            .field("events", &self.tokens)
            .field("covers", &self.cover_tokens())
            .finish()
    }
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens && self.covers == other.covers
    }
}

impl Eq for Poset {}

/// Sorted, deduplicated token list plus the lookup table.
fn canonical_tokens(tokens: Vec<String>) -> Result<(Vec<String>, HashMap<String, Event>)> {
    let mut tokens = tokens;
    tokens.sort();
    for w in tokens.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidSize(format!("duplicate event token `{}`", w[0])));
        }
    }
    for t in &tokens {
        if t.is_empty() || t.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSize(format!("malformed event token {t:?}")));
        }
    }
    let index = tokens.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    Ok((tokens, index))
}

fn lookup(index: &HashMap<String, Event>, token: &str) -> Result<Event> {
    index
        .get(token)
        .copied()
        .ok_or_else(|| Error::MissingEvent(token.to_string()))
}

/// Kahn's algorithm; on failure returns the events that remain on a cycle.
fn topo_order(n: usize, succ: &[Vec<Event>]) -> std::result::Result<Vec<Event>, Vec<Event>> {
    let mut indeg = vec![0usize; n];
    for s in succ {
        for &y in s {
            indeg[y] += 1;
        }
    }
    let mut stack: Vec<Event> = (0..n).rev().filter(|&x| indeg[x] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in succ[x].iter().rev() {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                stack.push(y);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).filter(|&x| indeg[x] > 0).collect())
    }
}

/// Walks predecessor edges inside `stuck` until an event repeats. Every event
/// left over by Kahn's algorithm has a leftover predecessor, so this terminates
/// on a cycle.
fn cycle_witness(succ: &[Vec<Event>], stuck: &[Event]) -> Vec<Event> {
    let mut on = vec![false; succ.len()];
    for &x in stuck {
        on[x] = true;
    }
    let mut pred = vec![Vec::new(); succ.len()];
    for (x, s) in succ.iter().enumerate() {
        for &y in s {
            pred[y].push(x);
        }
    }
    let mut path = vec![stuck[0]];
    let mut seen = HashMap::new();
    seen.insert(stuck[0], 0usize);
    loop {
        let cur = *path.last().unwrap();
        let next = pred[cur].iter().copied().find(|&y| on[y]).unwrap();
        if let Some(&start) = seen.get(&next) {
            let mut cyc = path[start..].to_vec();
            cyc.push(next);
            cyc.reverse();
            return cyc;
        }
        seen.insert(next, path.len());
        path.push(next);
    }
}

impl Poset {
    fn assemble(
        tokens: Vec<String>,
        index: HashMap<String, Event>,
        mut edges: Vec<(Event, Event)>,
        strict_hasse: bool,
    ) -> Result<Poset> {
        let n = tokens.len();
        edges.sort_unstable();
        edges.dedup();
        let mut succ = vec![Vec::new(); n];
        for &(x, y) in &edges {
            if x == y {
                return Err(Error::Cycle(vec![tokens[x].clone(), tokens[x].clone()]));
            }
            succ[x].push(y);
        }
        let order = topo_order(n, &succ).map_err(|stuck| {
            Error::Cycle(
                cycle_witness(&succ, &stuck)
                    .into_iter()
                    .map(|x| tokens[x].clone())
                    .collect(),
            )
        })?;

        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for &x in order.iter().rev() {
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(x);
            for &y in &succ[x] {
                set.union_with(&up[y]);
            }
            up[x] = set;
        }

        // Hasse reduction: y covers x iff y is not reachable through another
        // successor of x.
        let mut covers = Vec::with_capacity(edges.len());
        for x in 0..n {
            let mut via = FixedBitSet::with_capacity(n);
            for &s in &succ[x] {
                for z in up[s].ones() {
                    if z != s {
                        via.insert(z);
                    }
                }
            }
            for &y in &succ[x] {
                if via.contains(y) {
                    if strict_hasse {
                        return Err(Error::TransitiveEdge(tokens[x].clone(), tokens[y].clone()));
                    }
                } else {
                    covers.push((x, y));
                }
            }
        }
        covers.sort_unstable();

        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(x, y) in &covers {
            succ[x].push(y);
            pred[y].push(x);
        }
        Ok(Poset {
            tokens,
            index,
            covers,
            succ,
            pred,
            up,
        })
    }

    /// Builds a poset from its Hasse diagram. Edges implied by other edges are
    /// rejected; duplicate edges are collapsed.
    pub fn from_hasse<S: AsRef<str>>(tokens: Vec<String>, edges: &[(S, S)]) -> Result<Poset> {
        let (tokens, index) = canonical_tokens(tokens)?;
        let edges = edges
            .iter()
            .map(|(a, b)| Ok((lookup(&index, a.as_ref())?, lookup(&index, b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(tokens, index, edges, true)
    }

    /// Builds a poset from any generating relation: the order is its
    /// reflexive-transitive closure and redundant pairs are dropped.
    pub fn from_relation<S: AsRef<str>>(tokens: Vec<String>, pairs: &[(S, S)]) -> Result<Poset> {
        let (tokens, index) = canonical_tokens(tokens)?;
        let edges = pairs
            .iter()
            .map(|(a, b)| Ok((lookup(&index, a.as_ref())?, lookup(&index, b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(tokens, index, edges, false)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, x: Event) -> &str {
        &self.tokens[x]
    }

    pub fn index_of(&self, token: &str) -> Result<Event> {
        lookup(&self.index, token)
    }

    pub fn contains_token(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Immediate predecessor/successor pairs, sorted.
    pub fn covers(&self) -> &[(Event, Event)] {
        &self.covers
    }

    pub fn cover_tokens(&self) -> Vec<(&str, &str)> {
        self.covers
            .iter()
            .map(|&(x, y)| (self.token(x), self.token(y)))
            .collect()
    }

    pub fn successors(&self, x: Event) -> &[Event] {
        &self.succ[x]
    }

    pub fn predecessors(&self, x: Event) -> &[Event] {
        &self.pred[x]
    }

    /// `x <= y`.
    #[inline]
    pub fn le(&self, x: Event, y: Event) -> bool {
        self.up[x].contains(y)
    }

    /// `x < y`.
    #[inline]
    pub fn lt(&self, x: Event, y: Event) -> bool {
        x != y && self.le(x, y)
    }

    #[inline]
    pub fn incomparable(&self, x: Event, y: Event) -> bool {
        !self.le(x, y) && !self.le(y, x)
    }

    /// The up-set of `x`, including `x`.
    pub fn upset(&self, x: Event) -> &FixedBitSet {
        &self.up[x]
    }

    pub fn leq(&self, x: &str, y: &str) -> Result<bool> {
        Ok(self.le(self.index_of(x)?, self.index_of(y)?))
    }

    /// Number of ordered pairs `(x, y)` with `x <= y`, reflexive ones included.
    pub fn relation_size(&self) -> usize {
        self.up.iter().map(|s| s.count_ones(..)).sum()
    }

    pub fn minimal_events(&self) -> Vec<Event> {
        (0..self.len()).filter(|&x| self.pred[x].is_empty()).collect()
    }

    /// Events in an order compatible with the poset (lexicographically least).
    pub fn topological_order(&self) -> Vec<Event> {
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<Event>> = (0..self.len())
            .filter(|&x| indeg[x] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(std::cmp::Reverse(x)) = heap.pop() {
            order.push(x);
            for &y in &self.succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    heap.push(std::cmp::Reverse(y));
                }
            }
        }
        order
    }

    /// Cardinality of the longest chain (in events).
    pub fn height(&self) -> usize {
        let mut longest = vec![1usize; self.len()];
        for x in self.topological_order() {
            for &y in &self.succ[x] {
                longest[y] = longest[y].max(longest[x] + 1);
            }
        }
        longest.into_iter().max().unwrap_or(0)
    }

    /// Longest chain made only of events in `mask`.
    pub fn height_within(&self, mask: &FixedBitSet) -> usize {
        let order = self.topological_order();
        let mut longest = vec![0usize; self.len()];
        let mut best = 0;
        for (i, &y) in order.iter().enumerate() {
            if !mask.contains(y) {
                continue;
            }
            let below = order[..i]
                .iter()
                .filter(|&&x| mask.contains(x) && self.le(x, y))
                .map(|&x| longest[x])
                .max()
                .unwrap_or(0);
            longest[y] = below + 1;
            best = best.max(longest[y]);
        }
        best
    }

    /// Checks that `s` is a linear extension of this poset.
    pub fn check_schedule(&self, s: &Schedule) -> Result<()> {
        if s.len() != self.len() {
            return Err(Error::InvalidFamily(format!(
                "schedule has {} events, poset has {}",
                s.len(),
                self.len()
            )));
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &x) in s.events().iter().enumerate() {
            if x >= self.len() {
                return Err(Error::InvalidFamily(format!("event index {x} out of range")));
            }
            if pos[x] != usize::MAX {
                return Err(Error::InvalidFamily(format!(
                    "event `{}` scheduled twice",
                    self.token(x)
                )));
            }
            pos[x] = i;
        }
        for &(x, y) in &self.covers {
            if pos[x] > pos[y] {
                return Err(Error::InvalidFamily(format!(
                    "`{}` scheduled after `{}`",
                    self.token(x),
                    self.token(y)
                )));
            }
        }
        Ok(())
    }

    pub fn check_family(&self, f: &Family) -> Result<()> {
        f.rows().iter().try_for_each(|s| self.check_schedule(s))
    }

    pub fn schedule_from_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Schedule> {
        tokens
            .iter()
            .map(|t| self.index_of(t.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(Schedule::new)
    }

    pub fn tuple<S: AsRef<str>>(&self, tokens: &[S]) -> Result<DTuple> {
        DTuple::new(
            tokens
                .iter()
                .map(|t| self.index_of(t.as_ref()))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Space-separated tokens of a schedule.
    pub fn render(&self, s: &Schedule) -> String {
        self.render_events(s.events())
    }

    pub fn render_events(&self, events: &[Event]) -> String {
        events
            .iter()
            .map(|&x| self.token(x))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn tuple_tokens(&self, t: &DTuple) -> Vec<String> {
        t.events().iter().map(|&x| self.tokens[x].clone()).collect()
    }

    /// Admissibility: `a_i <= a_j` or `a_i || a_j` for every `i <= j`.
    pub fn is_admissible(&self, t: &DTuple) -> bool {
        let e = t.events();
        (0..e.len()).all(|j| (0..j).all(|i| !self.le(e[j], e[i])))
    }

    /// Induced sub-order on `subset`.
    pub fn restrict(&self, subset: &[Event]) -> Result<Poset> {
        let mut keep = FixedBitSet::with_capacity(self.len());
        for &x in subset {
            if x >= self.len() {
                return Err(Error::MissingEvent(format!("#{x}")));
            }
            keep.insert(x);
        }
        let tokens: Vec<String> = keep.ones().map(|x| self.tokens[x].clone()).collect();
        let mut pairs = Vec::new();
        for x in keep.ones() {
            for y in self.up[x].ones() {
                if y != x && keep.contains(y) {
                    pairs.push((self.token(x), self.token(y)));
                }
            }
        }
        Poset::from_relation(tokens, &pairs)
    }

    pub fn restrict_tokens<S: AsRef<str>>(&self, subset: &[S]) -> Result<Poset> {
        let idx = subset
            .iter()
            .map(|t| self.index_of(t.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.restrict(&idx)
    }

    /// Keeps the events of `s` that exist in `sub` (matched by token),
    /// re-indexed for `sub`.
    pub fn restrict_schedule(&self, sub: &Poset, s: &Schedule) -> Schedule {
        Schedule::new(
            s.events()
                .iter()
                .filter_map(|&x| sub.index.get(self.token(x)).copied())
                .collect(),
        )
    }

    pub fn restrict_family(&self, sub: &Poset, f: &Family) -> Family {
        Family::from_rows(f.rows().iter().map(|s| self.restrict_schedule(sub, s)).collect())
    }

    /// Disjoint union; tokens must not collide.
    pub fn parallel_compose(&self, other: &Poset) -> Result<Poset> {
        if let Some(t) = other.tokens.iter().find(|t| self.index.contains_key(*t)) {
            return Err(Error::Collision(t.clone()));
        }
        let tokens = self.tokens.iter().chain(&other.tokens).cloned().collect();
        let edges: Vec<(&str, &str)> = self
            .cover_tokens()
            .into_iter()
            .chain(other.cover_tokens())
            .collect();
        Poset::from_hasse(tokens, &edges)
    }

    /// Renames every event; the relation is carried over unchanged.
    pub fn relabel(&self, rename: impl Fn(&str) -> String) -> Result<Poset> {
        let tokens = self.tokens.iter().map(|t| rename(t)).collect();
        let edges: Vec<(String, String)> = self
            .cover_tokens()
            .into_iter()
            .map(|(a, b)| (rename(a), rename(b)))
            .collect();
        Poset::from_hasse(tokens, &edges)
    }
}

/// A sequence of events; a schedule of a poset once validated by
/// [`Poset::check_schedule`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schedule(Vec<Event>);

impl Schedule {
    pub fn new(events: Vec<Event>) -> Self {
        Schedule(events)
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn into_events(self) -> Vec<Event> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `pos[x]` = index of `x` in the schedule, `u32::MAX` when absent.
    pub fn positions(&self, n: usize) -> Vec<u32> {
        let mut pos = vec![u32::MAX; n];
        for (i, &x) in self.0.iter().enumerate() {
            if x < n {
                pos[x] = i as u32;
            }
        }
        pos
    }

    /// Does the restriction of this schedule to the tuple's events equal the tuple?
    pub fn hits(&self, t: &DTuple) -> Result<bool> {
        let mut last = None;
        let mut ok = true;
        for &a in t.events() {
            let p = self
                .0
                .iter()
                .position(|&x| x == a)
                .ok_or_else(|| Error::MissingEvent(format!("#{a}")))?;
            if let Some(prev) = last {
                ok &= prev < p;
            }
            last = Some(p);
        }
        Ok(ok)
    }
}

/// Ordered multiset of schedules over one poset: the rows of an m×n matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Family {
    rows: Vec<Schedule>,
}

impl Family {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows(rows: Vec<Schedule>) -> Self {
        Family { rows }
    }

    pub fn push(&mut self, s: Schedule) {
        self.rows.push(s);
    }

    pub fn rows(&self) -> &[Schedule] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Schedule> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Drops repeated rows, keeping the first occurrence of each.
    pub fn dedup(&self) -> Family {
        let mut seen = std::collections::HashSet::new();
        Family {
            rows: self
                .rows
                .iter()
                .filter(|s| seen.insert(*s))
                .cloned()
                .collect(),
        }
    }

    pub fn extend(&mut self, other: Family) {
        self.rows.extend(other.rows);
    }
}

/// A tuple of `d >= 2` pairwise distinct events.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DTuple(Vec<Event>);

impl DTuple {
    pub fn new(events: Vec<Event>) -> Result<Self> {
        for (i, a) in events.iter().enumerate() {
            if events[..i].contains(a) {
                return Err(Error::InvalidTuple(format!("event #{a} repeated")));
            }
        }
        Ok(DTuple(events))
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
