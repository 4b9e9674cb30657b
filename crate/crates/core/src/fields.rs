// SPDX-License-Identifier: Apache-2.0

//! Quadratic fields given by their fundamental discriminant: splitting of
//! rational primes, split-prime counts and the sequence of split primes.

use std::fmt;

use crate::arith::{self, factorize, kronecker};
use crate::error::{Error, Result};

/// A quadratic field `K`, identified by its fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticFieldSpec {
    discriminant: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplittingType {
    Ramified,
    Split,
    Inert,
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplittingType::Ramified => "ramified",
            SplittingType::Split => "split",
            SplittingType::Inert => "inert",
        })
    }
}

fn is_squarefree(n: u64) -> bool {
    factorize(n).entries().iter().all(|&(_, e)| e == 1)
}

impl QuadraticFieldSpec {
    /// Validate `discriminant` as a fundamental discriminant other than 1.
    pub fn new(discriminant: i64) -> Result<Self> {
        if discriminant == 0 || discriminant == 1 {
            return Err(Error::Validation(format!(
                "{discriminant} is not the discriminant of a quadratic field"
            )));
        }
        if discriminant == i64::MIN {
            return Err(Error::Validation("discriminant out of range".into()));
        }
        let ok = match discriminant.rem_euclid(4) {
            1 => is_squarefree(discriminant.unsigned_abs()),
            0 => {
                let m = discriminant / 4;
                matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
            }
            _ => false,
        };
        if ok {
            Ok(Self { discriminant })
        } else {
            Err(Error::Validation(format!(
                "{discriminant} is not a fundamental discriminant"
            )))
        }
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    /// Splitting of a prime not yet checked for primality.
    #[inline]
    pub(crate) fn classify_prime(&self, p: u64) -> SplittingType {
        match kronecker(self.discriminant, p) {
            0 => SplittingType::Ramified,
            1 => SplittingType::Split,
            _ => SplittingType::Inert,
        }
    }
}

impl fmt::Display for QuadraticFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.discriminant)
    }
}

/// How the prime `p` decomposes in `K`.
pub fn splitting_type(spec: &QuadraticFieldSpec, p: u64) -> Result<SplittingType> {
    if !arith::is_prime(p) {
        return Err(Error::Validation(format!("{p} is not prime")));
    }
    Ok(spec.classify_prime(p))
}

/// Logarithmic integral `li(x)` for `x > 1`, by Ramanujan's series.
pub fn li(x: f64) -> f64 {
    assert!(x > 1.0, "li requires x > 1");
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let l = x.ln();
    let mut sum = 0.0;
    let mut inner = 0.0;
    let mut fact = 1.0;
    let mut pow2 = 1.0;
    let mut k = 1u32;
    loop {
        fact *= k as f64;
        pow2 *= 2.0;
        if (k - 1).is_multiple_of(2) {
            inner += 1.0 / (2 * ((k - 1) / 2) + 1) as f64;
        }
        let sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        let term = sign * l.powi(k as i32) / (fact * pow2 / 2.0) * inner;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() || k > 400 {
            break;
        }
        k += 1;
    }
    EULER_GAMMA + l.ln() + x.sqrt() * sum
}

/// Exact number of split primes `<= x` together with `li(x)/2`.
pub fn split_prime_count(spec: &QuadraticFieldSpec, x: u64) -> Result<(u64, f64)> {
    if x < 2 {
        return Err(Error::Domain("split_prime_count requires x >= 2".into()));
    }
    if x > arith::DEFAULT_SIEVE_CAP {
        return Err(Error::Capacity {
            what: "split prime count",
            limit: arith::DEFAULT_SIEVE_CAP,
            requested: x,
        });
    }
    let count = arith::primes_up_to(x)
        .into_iter()
        .filter(|&p| spec.classify_prime(p) == SplittingType::Split)
        .count() as u64;
    Ok((count, li(x as f64) / 2.0))
}

/// The first `count` split primes, in increasing order.
pub fn split_primes(spec: &QuadraticFieldSpec, count: usize, search_cap: u64) -> Result<Vec<u64>> {
    arith::first_primes_where(
        count,
        |p| spec.classify_prime(p) == SplittingType::Split,
        search_cap,
    )
}

/// The `j`-th smallest split prime (1-based).
pub fn nth_split_prime(spec: &QuadraticFieldSpec, j: usize) -> Result<u64> {
    nth_split_prime_capped(spec, j, arith::DEFAULT_SIEVE_CAP)
}

pub fn nth_split_prime_capped(spec: &QuadraticFieldSpec, j: usize, search_cap: u64) -> Result<u64> {
    if j == 0 {
        return Err(Error::Domain("split primes are indexed from 1".into()));
    }
    Ok(*split_primes(spec, j, search_cap)?
        .last()
        .expect("non-empty"))
}
