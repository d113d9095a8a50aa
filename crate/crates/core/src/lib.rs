//! Hitting families of schedules for partial orders.
//!
//! A *schedule* is a linear extension of a partial order of events. A family
//! of schedules is *d-hitting* when every admissible ordering of every `d`
//! events appears in some schedule of the family, so running the family
//! exposes every bug that depends on the relative order of at most `d`
//! events.
//!
//! The crate provides:
//!
//! * [`poset`], [`shapes`], [`tree`]: the data model and generators for
//!   chains, antichains, complete trees and double trees;
//! * [`oracle`]: brute-force enumeration and verification;
//! * [`basic`]: DFS traversals and the bag-based warm-up family;
//! * [`antichain`]: random and greedy families plus size bounds;
//! * [`doubletree`]: the explicit `4h`-row 3-hitting matrix for double
//!   trees and its restrictions to trees and antichains;
//! * [`pattern`]: the pattern-based d-hitting family for complete trees;
//! * [`harness`]: text formats, race-pruned families and run statistics.

pub mod antichain;
pub mod basic;
pub mod doubletree;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod pattern;
pub mod poset;
pub mod shapes;
pub mod tree;

pub use error::{Error, Result};
pub use poset::{DTuple, Event, Family, Poset, Schedule};
