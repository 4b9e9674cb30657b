// SPDX-License-Identifier: Apache-2.0

//! Maximal orders of iterated multiplicative functions.
//!
//! A rule `f` is fixed by a set `Q` of primes, a value sequence `g` with
//! `f(p^ν) = g(ν)` on `Q`, and a fallback for the other primes. The crate
//! evaluates `f` and `f(f(n))`, scans for the largest `f(f(n))` up to a bound,
//! computes minimal preimages, the series constant `C_g`, explicit extremal
//! witnesses, and audits synthetic rules against the hypotheses used by the
//! upper bound.

pub mod arith;
pub mod audit;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod fields;
pub mod forms;
pub mod mfunc;
pub mod record;

pub use error::{Error, Result};
