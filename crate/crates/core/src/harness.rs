//! Text formats for posets and families, race annotations, the race-pruned
//! warm-up family, and run statistics.
//!
//! Poset files:
//!
//! ```text
//! poset v1
//! events 3
//! event a
//! event b
//! event c
//! edge a b        # a is an immediate predecessor of b
//! race b c        # optional, order-insensitive
//! ```
//!
//! Family files start with `family v1 d=<d>` and list one schedule per line,
//! tokens separated by spaces. In both formats `#` starts a comment and
//! blank lines are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::basic::{warmup_rows, WarmupFamily};
use crate::error::{Error, Result};
use crate::poset::{Event, Family, Poset, Schedule};
use crate::tree::TreeView;

/// A poset with unordered race pairs, stored as `(min, max)` event indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedPoset {
    pub poset: Poset,
    pub races: BTreeSet<(Event, Event)>,
}

impl AnnotatedPoset {
    pub fn new(poset: Poset) -> Self {
        AnnotatedPoset {
            poset,
            races: BTreeSet::new(),
        }
    }

    pub fn add_race(&mut self, a: &str, b: &str) -> Result<()> {
        let x = self.poset.index_of(a).map_err(|_| Error::Reference(a.into()))?;
        let y = self.poset.index_of(b).map_err(|_| Error::Reference(b.into()))?;
        if x == y {
            return Err(Error::InvalidTuple(format!("event `{a}` cannot race with itself")));
        }
        self.races.insert((x.min(y), x.max(y)));
        Ok(())
    }

    /// Events taking part in at least one race, ascending.
    pub fn racing_events(&self) -> Vec<Event> {
        let set: BTreeSet<Event> = self.races.iter().flat_map(|&(a, b)| [a, b]).collect();
        set.into_iter().collect()
    }
}

/// Meaningful lines with their 1-based numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Reads a poset file. Edges implied by other edges are an error unless
/// `repair` is set, in which case they are dropped.
pub fn parse_poset(text: &str, repair: bool) -> Result<AnnotatedPoset> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "poset v1")) => {}
        Some((n, l)) => return Err(parse_err(n, format!("expected `poset v1`, found `{l}`"))),
        None => return Err(parse_err(1, "empty input")),
    }
    let count: usize = match lines.next() {
        Some((n, l)) => {
            let mut w = l.split_whitespace();
            match (w.next(), w.next().and_then(|c| c.parse().ok()), w.next()) {
                (Some("events"), Some(c), None) => c,
                _ => return Err(parse_err(n, format!("expected `events <n>`, found `{l}`"))),
            }
        }
        None => return Err(parse_err(2, "missing `events <n>`")),
    };

    let mut tokens = Vec::with_capacity(count);
    let mut edges = Vec::new();
    let mut races = Vec::new();
    let mut last = 2;
    for (n, l) in lines {
        last = n;
        let w: Vec<&str> = l.split_whitespace().collect();
        match w.as_slice() {
            ["event", t] => {
                if !edges.is_empty() || !races.is_empty() {
                    return Err(parse_err(n, "events must precede edges and races"));
                }
                tokens.push(t.to_string());
            }
            ["edge", a, b] => {
                if !races.is_empty() {
                    return Err(parse_err(n, "edges must precede races"));
                }
                edges.push((a.to_string(), b.to_string()));
            }
            ["race", a, b] => races.push((a.to_string(), b.to_string())),
            _ => return Err(parse_err(n, format!("unrecognised line `{l}`"))),
        }
    }
    if tokens.len() != count {
        return Err(parse_err(last, format!("declared {count} events, found {}", tokens.len())));
    }
    let built = if repair {
        Poset::from_relation(tokens, &edges)
    } else {
        Poset::from_hasse(tokens, &edges)
    };
    let poset = built.map_err(|e| match e {
        Error::MissingEvent(t) => Error::Reference(t),
        other => other,
    })?;
    let mut ap = AnnotatedPoset::new(poset);
    for (a, b) in &races {
        ap.add_race(a, b)?;
    }
    Ok(ap)
}

/// Writes a poset file; events and edges in canonical order.
pub fn format_poset(ap: &AnnotatedPoset) -> String {
    let p = &ap.poset;
    let mut out = String::from("poset v1\n");
    let _ = writeln!(out, "events {}", p.len());
    for t in p.tokens() {
        let _ = writeln!(out, "event {t}");
    }
    for (a, b) in p.cover_tokens() {
        let _ = writeln!(out, "edge {a} {b}");
    }
    for &(a, b) in &ap.races {
        let _ = writeln!(out, "race {} {}", p.token(a), p.token(b));
    }
    out
}

/// Reads a family file for `p`; returns the declared depth and the rows,
/// each checked to be a schedule of `p`.
pub fn parse_family(p: &Poset, text: &str) -> Result<(usize, Family)> {
    let mut lines = content_lines(text);
    let d = match lines.next() {
        Some((n, l)) => l
            .strip_prefix("family v1 d=")
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| parse_err(n, format!("expected `family v1 d=<d>`, found `{l}`")))?,
        None => return Err(parse_err(1, "empty input")),
    };
    let mut family = Family::new();
    for (n, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let s = p.schedule_from_tokens(&toks).map_err(|e| match e {
            Error::MissingEvent(t) => Error::Reference(t),
            other => other,
        })?;
        p.check_schedule(&s)
            .map_err(|e| Error::InvalidFamily(format!("line {n}: {e}")))?;
        family.push(s);
    }
    Ok((d, family))
}

/// Writes a family file; `comment` lines go right after the header.
pub fn format_family(p: &Poset, f: &Family, d: usize, comment: Option<&str>) -> String {
    let mut out = format!("family v1 d={d}\n");
    if let Some(c) = comment {
        let _ = writeln!(out, "# {c}");
    }
    for s in f.rows() {
        out.push_str(&p.render(s));
        out.push('\n');
    }
    out
}

/// The warm-up family for `d = 3` with the first bag event restricted to
/// racing events: exactly `2r` rows before deduplication for `r` racing
/// events.
pub fn pruned_family(ap: &AnnotatedPoset, d: usize) -> Result<WarmupFamily> {
    if d != 3 {
        return Err(Error::InvalidDepth {
            d,
            reason: "race pruning is defined for d = 3 only".into(),
        });
    }
    let pivots = ap.racing_events();
    let (rows, bags): (Vec<Schedule>, usize) = warmup_rows(&ap.poset, d, Some(&pivots))?;
    let rows_pre_dedup = rows.len();
    Ok(WarmupFamily {
        family: Family::from_rows(rows).dedup(),
        rows_pre_dedup,
        bags,
    })
}

/// Summary of one generated family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub n_events: usize,
    /// Longest chain, counted in events.
    pub height: usize,
    pub family_size: usize,
    pub method: String,
    /// Present only when the oracle ran.
    pub verified: Option<bool>,
    pub admissible_tuples: Option<usize>,
}

/// Shape summary of an input poset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetStats {
    pub n_events: usize,
    pub n_covers: usize,
    /// Longest chain, counted in events.
    pub height: usize,
    pub n_minimal: usize,
    pub is_tree: bool,
    pub n_races: usize,
    pub n_racing_events: usize,
}

pub fn poset_stats(ap: &AnnotatedPoset) -> PosetStats {
    let p = &ap.poset;
    PosetStats {
        n_events: p.len(),
        n_covers: p.covers().len(),
        height: p.height(),
        n_minimal: p.minimal_events().len(),
        is_tree: TreeView::new(p).is_ok(),
        n_races: ap.races.len(),
        n_racing_events: ap.racing_events().len(),
    }
}
