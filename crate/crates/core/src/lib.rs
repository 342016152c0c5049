//! Exact-arithmetic tools for iterated preimage trees of polynomial maps.
//!
//! The crate covers four areas:
//!
//! - [`tree`] and [`subgroup`]: automorphisms of complete d-ary trees in
//!   portrait form, subgroup closure, centralizers, branch stabilizers and
//!   their closed-form orders and Hausdorff dimensions.
//! - [`dynamics`]: exact rational maps over Q, iteration, Möbius conjugation
//!   and a collection of polynomial identities checked symbolically.
//! - [`delta`] and [`sieve`]: the `(δₙ, εₙ)` recursion over `Z[k]`, square
//!   tests, and congruence certificates showing `δₙ(k₀)` is never a square.
//! - [`density`]: prime divisors of integer orbits and their proportion.
//!
//! Runnable walkthroughs live in `examples/`; the `arboreal` binary exposes the
//! same checks from the command line.

pub mod cli;
pub mod delta;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod poly;
pub mod sieve;
pub mod subgroup;
pub mod tree;

pub use error::{Error, Result};
