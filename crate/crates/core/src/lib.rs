//! Exact and Monte-Carlo analysis of random permutations under the Ewens
//! measure, which weights a permutation by `theta^(number of cycles)`.
//!
//! The crate provides:
//!
//! * permutations, partial permutations and the Ewens measure itself
//!   (exact weights, a linear-time sequential sampler, brute-force
//!   enumeration for small sizes) in [`perm`] and [`ewens`];
//! * the set-partition lattice and the moment/cumulant calculus built on
//!   its Möbius function in [`setpart`];
//! * exact univariate rational-function arithmetic over big rationals in
//!   [`ratfun`], the substrate that turns cumulant decay rates into
//!   checkable degree inequalities;
//! * graphs, quotients and strong quotients in [`graph`];
//! * joint moments and cumulants of the elementary events `sigma(i) = s`,
//!   together with the decay-exponent check, in [`elementary`];
//! * permutation statistics (cycle counts, exceedances, adjacencies,
//!   dashed and bivincular patterns, general local statistics) and their
//!   closed-form limits in [`stats`];
//! * the exclusion-process bridge (cycle-to-word transform, exceedance
//!   words, shape/word codec, exact steady-state sampling and an
//!   independent Markov-chain simulator) in [`ssep`].
//!
//! The crate is `no_std` (with `alloc`); IO, serialization and the
//! statistical test harness live in the companion `ewens-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod dsu;

pub mod elementary;
pub mod ewens;
pub mod graph;
pub mod perm;
pub mod ratfun;
pub mod setpart;
pub mod ssep;
pub mod stats;

/// Exact arbitrary-precision rational, the coefficient domain for every
/// exact computation in this crate.
pub type Rat = num_rational::BigRational;

pub use elementary::{DecayReport, ElementarySpec};
pub use ewens::{enumerate_ewens, ewens_sample, ewens_weight, EwensParam};
pub use graph::SimpleGraph;
pub use perm::{PartialPermutation, Permutation};
pub use ratfun::{Degree, Poly, RatFun};
pub use setpart::SetPartition;
pub use ssep::{BinaryWord, Shape};
pub use stats::{BivincularPattern, DashedPattern, LocalStatistic};

use num_bigint::BigInt;

/// Shorthand for the exact rational `n / d`.
///
/// Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the exact rational `n`.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}
