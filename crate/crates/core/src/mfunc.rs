// SPDX-License-Identifier: Apache-2.0

//! Multiplicative functions given by a prime classifier and an exponent map.
//!
//! A [`MultiplicativeRule`] sends a prime power `p^ν` to `g(ν)` when `p` lies in
//! the distinguished prime set `Q`, and to a value in `{0, 1}` otherwise. The
//! divisor function `d(n^α)`, the quarter lattice count `δ` on `x² + y²` and the
//! ideal-counting function of a quadratic field are all instances.

use std::fmt;

use crate::arith::{self, Factorization, SpfTable};
use crate::error::{Error, Result};
use crate::fields::{QuadraticFieldSpec, SplittingType};

/// How a prime power `p^ν` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimeClass {
    /// `p ∈ Q`: `f(p^ν) = g(ν)`.
    InQ,
    /// `f(p^ν) = 1` for every `ν`.
    OffQOne,
    /// `f(p^ν) = 1` for even `ν`, `0` for odd `ν`.
    OffQParity,
    /// `f(p^ν) = 0` for `ν >= 1`.
    OffQZero,
}

/// The `{0, 1}` pattern applied to primes outside `Q` by the congruence and
/// explicit classifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OffQRule {
    One,
    Parity,
    Zero,
}

impl OffQRule {
    fn class(self) -> PrimeClass {
        match self {
            OffQRule::One => PrimeClass::OffQOne,
            OffQRule::Parity => PrimeClass::OffQParity,
            OffQRule::Zero => PrimeClass::OffQZero,
        }
    }
}

/// Continuation of a table-backed exponent map past its last listed value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    /// `g(ν) = slope·ν + intercept`.
    Affine { slope: u64, intercept: u64 },
    /// `g(ν) = g(ν - 1)·ratio`.
    Geometric { ratio: u64 },
}

/// The exponent map `g : ℕ₀ → ℕ` with `g(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GSpec {
    /// `g(ν) = αν + 1`.
    Affine(u64),
    /// Listed values `g(0), g(1), ...` followed by an extension rule.
    Table {
        values: Vec<u64>,
        extension: Extension,
    },
}

impl GSpec {
    pub fn affine(alpha: u64) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::Domain("affine exponent map needs alpha >= 1".into()));
        }
        Ok(GSpec::Affine(alpha))
    }

    pub fn table(values: Vec<u64>, extension: Extension) -> Result<Self> {
        if values.first() != Some(&1) {
            return Err(Error::Validation("g table must start with g(0) = 1".into()));
        }
        if values.contains(&0) {
            return Err(Error::Validation(
                "g takes values in the positive integers".into(),
            ));
        }
        match extension {
            Extension::Affine { slope: 0, .. } => {
                return Err(Error::Validation(
                    "affine extension needs a positive slope".into(),
                ))
            }
            Extension::Geometric { ratio: 0 } => {
                return Err(Error::Validation(
                    "geometric extension needs a positive ratio".into(),
                ))
            }
            Extension::Affine { slope, intercept } => {
                let first = values.len() as u64;
                if slope
                    .checked_mul(first)
                    .and_then(|v| v.checked_add(intercept))
                    .is_none()
                {
                    return Err(Error::Overflow("affine extension overflows".into()));
                }
            }
            _ => {}
        }
        Ok(GSpec::Table { values, extension })
    }

    /// `g(ν)`, or `None` when the value does not fit in 64 bits.
    pub fn eval(&self, nu: u64) -> Option<u64> {
        match self {
            GSpec::Affine(alpha) => alpha.checked_mul(nu)?.checked_add(1),
            GSpec::Table { values, extension } => {
                if let Some(&v) = values.get(nu as usize) {
                    return Some(v);
                }
                let len = values.len() as u64;
                match *extension {
                    Extension::Affine { slope, intercept } => {
                        slope.checked_mul(nu)?.checked_add(intercept)
                    }
                    Extension::Geometric { ratio } => {
                        let steps = u32::try_from(nu - len + 1).ok()?;
                        values[values.len() - 1].checked_mul(ratio.checked_pow(steps)?)
                    }
                }
            }
        }
    }

    /// The least `x >= 1` with `g(x) = y`, or `None` (infinity) when no such `x`.
    pub fn dagger(&self, y: u64) -> Option<u64> {
        match self {
            GSpec::Affine(alpha) => {
                if y > 1 && (y - 1).is_multiple_of(*alpha) {
                    Some((y - 1) / alpha)
                } else {
                    None
                }
            }
            GSpec::Table { values, extension } => {
                if let Some(x) = (1..values.len()).find(|&x| values[x] == y) {
                    return Some(x as u64);
                }
                let len = values.len() as u64;
                let start = len.max(1);
                match *extension {
                    Extension::Affine { slope, intercept } => {
                        if y < intercept || !(y - intercept).is_multiple_of(slope) {
                            return None;
                        }
                        let x = (y - intercept) / slope;
                        (x >= start).then_some(x)
                    }
                    Extension::Geometric { ratio } => {
                        let mut x = start;
                        loop {
                            let v = self.eval(x)?;
                            if v == y {
                                return Some(x);
                            }
                            if v > y || ratio == 1 {
                                return None;
                            }
                            x += 1;
                        }
                    }
                }
            }
        }
    }

    /// `g(1)`.
    pub fn at_one(&self) -> u64 {
        self.eval(1).expect("g(1) fits")
    }

    /// Asymptotic slope of `g` when it is eventually affine.
    pub fn asymptotic_slope(&self) -> Option<u64> {
        match self {
            GSpec::Affine(alpha) => Some(*alpha),
            GSpec::Table {
                extension: Extension::Affine { slope, .. },
                ..
            } => Some(*slope),
            _ => None,
        }
    }

    /// `(j0, s)` such that `g(j)/g(j-1) = 1 + 1/(j - 1 + s)` for every `j >= j0`,
    /// when `g` is eventually affine.
    pub(crate) fn affine_tail(&self) -> Option<(u64, f64)> {
        match self {
            GSpec::Affine(alpha) => Some((1, 1.0 / *alpha as f64)),
            GSpec::Table {
                values,
                extension: Extension::Affine { slope, intercept },
            } => Some((values.len() as u64 + 1, *intercept as f64 / *slope as f64)),
            _ => None,
        }
    }

    /// The least constant `c_f` with `g(x) <= c_f·x` for all `x >= 1`, when finite.
    pub fn sublinear_constant(&self) -> Option<f64> {
        match self {
            GSpec::Affine(alpha) => Some(*alpha as f64 + 1.0),
            GSpec::Table {
                values,
                extension: Extension::Affine { slope, intercept },
            } => {
                let first_ext = (values.len() as u64).max(1);
                let ext = *slope as f64 + *intercept as f64 / first_ext as f64;
                Some(
                    values
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(x, &v)| v as f64 / x as f64)
                        .fold(ext, f64::max),
                )
            }
            _ => None,
        }
    }
}

impl fmt::Display for GSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GSpec::Affine(a) => write!(f, "{a}v+1"),
            GSpec::Table { values, extension } => {
                write!(f, "table{values:?}")?;
                match extension {
                    Extension::Affine { slope, intercept } => {
                        write!(f, "+affine({slope},{intercept})")
                    }
                    Extension::Geometric { ratio } => write!(f, "+geometric({ratio})"),
                }
            }
        }
    }
}

/// Pseudo-inverse `g†(y) = inf{x >= 1 : g(x) = y}`; `None` stands for infinity.
pub fn g_dagger(g: &GSpec, y: u64) -> Option<u64> {
    g.dagger(y)
}

/// Which primes belong to `Q`, and what happens off `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classifier {
    AllPrimes,
    /// Split primes are in `Q`, ramified primes contribute 1, inert primes the parity rule.
    Field(QuadraticFieldSpec),
    Congruence {
        modulus: u64,
        residues: Vec<u64>,
        off: OffQRule,
    },
    /// `Q` is exactly the listed primes.
    Explicit {
        primes: Vec<u64>,
        off: OffQRule,
    },
}

impl Classifier {
    #[inline]
    pub fn classify(&self, p: u64) -> PrimeClass {
        match self {
            Classifier::AllPrimes => PrimeClass::InQ,
            Classifier::Field(spec) => match spec.classify_prime(p) {
                SplittingType::Split => PrimeClass::InQ,
                SplittingType::Ramified => PrimeClass::OffQOne,
                SplittingType::Inert => PrimeClass::OffQParity,
            },
            Classifier::Congruence {
                modulus,
                residues,
                off,
            } => {
                if residues.contains(&(p % modulus)) {
                    PrimeClass::InQ
                } else {
                    off.class()
                }
            }
            Classifier::Explicit { primes, off } => {
                if primes.binary_search(&p).is_ok() {
                    PrimeClass::InQ
                } else {
                    off.class()
                }
            }
        }
    }
}

/// A multiplicative function `f` built from a classifier and an exponent map.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeRule {
    pub name: String,
    pub classifier: Classifier,
    pub g: GSpec,
    /// Reciprocal density of `Q` among the primes.
    pub kappa_hint: f64,
}

/// `f(n) = d(n^α)`.
pub fn rule_divisor_power(alpha: u64) -> Result<MultiplicativeRule> {
    Ok(MultiplicativeRule {
        name: format!("divisor:{alpha}"),
        classifier: Classifier::AllPrimes,
        g: GSpec::affine(alpha)?,
        kappa_hint: 1.0,
    })
}

/// Number of ideals of norm `n` in the quadratic field `spec`.
pub fn rule_for_field(spec: &QuadraticFieldSpec) -> MultiplicativeRule {
    MultiplicativeRule {
        name: format!("field:{}", spec.discriminant()),
        classifier: Classifier::Field(*spec),
        g: GSpec::Affine(1),
        kappa_hint: 2.0,
    }
}

pub fn rule_for_discriminant(discriminant: i64) -> Result<MultiplicativeRule> {
    Ok(rule_for_field(&QuadraticFieldSpec::new(discriminant)?))
}

impl MultiplicativeRule {
    #[inline]
    pub fn classify(&self, p: u64) -> PrimeClass {
        self.classifier.classify(p)
    }

    /// `f(p^ν)`.
    pub fn prime_power(&self, p: u64, nu: u64) -> Result<u64> {
        if nu == 0 {
            return Ok(1);
        }
        Ok(match self.classify(p) {
            PrimeClass::InQ => self
                .g
                .eval(nu)
                .ok_or_else(|| Error::Overflow(format!("g({nu}) exceeds 64 bits")))?,
            PrimeClass::OffQOne => 1,
            PrimeClass::OffQParity => u64::from(nu.is_multiple_of(2)),
            PrimeClass::OffQZero => 0,
        })
    }

    /// `f(n)` for a factored `n`.
    pub fn eval(&self, n: &Factorization) -> Result<u64> {
        let mut acc: u64 = 1;
        for &(p, e) in n.entries() {
            let v = self.prime_power(p, e)?;
            if v == 0 {
                return Ok(0);
            }
            acc = acc
                .checked_mul(v)
                .ok_or_else(|| Error::Overflow(format!("f({n}) exceeds 64 bits")))?;
        }
        Ok(acc)
    }

    /// `f(n)` for `n >= 1`, factorizing with `table` when given.
    pub fn eval_int(&self, n: u64, table: Option<&SpfTable>) -> Result<u64> {
        if n == 0 {
            return Ok(1);
        }
        let f = match table {
            Some(t) => t.factorize(n),
            None => arith::factorize(n),
        };
        self.eval(&f)
    }

    /// `f(f(n))`, with the convention `f(0) = 1`.
    pub fn eval_iterated(&self, n: u64, table: Option<&SpfTable>) -> Result<u64> {
        let inner = self.eval_int(n, table)?;
        self.eval_int(inner, table)
    }

    /// Whether every prime factor of `n` lies in `Q`, i.e. `n ∈ ⟨Q⟩`.
    pub fn in_q_monoid(&self, n: &Factorization) -> bool {
        n.entries()
            .iter()
            .all(|&(p, _)| self.classify(p) == PrimeClass::InQ)
    }

    /// The first `count` primes of `Q` in increasing order.
    pub fn q_primes(&self, count: usize) -> Result<Vec<u64>> {
        self.q_primes_capped(count, arith::DEFAULT_SIEVE_CAP)
    }

    pub fn q_primes_capped(&self, count: usize, search_cap: u64) -> Result<Vec<u64>> {
        if let Classifier::Explicit { primes, .. } = &self.classifier {
            if count > primes.len() {
                return Err(Error::Capacity {
                    what: "explicit prime set",
                    limit: primes.len() as u64,
                    requested: count as u64,
                });
            }
            return Ok(primes[..count].to_vec());
        }
        arith::first_primes_where(count, |p| self.classify(p) == PrimeClass::InQ, search_cap)
    }
}

/// `f(n)` for a factored `n`.
pub fn eval(rule: &MultiplicativeRule, n: &Factorization) -> Result<u64> {
    rule.eval(n)
}

/// `f(f(n))` with `f(0) = 1`.
pub fn eval_iterated(rule: &MultiplicativeRule, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("eval_iterated requires n >= 1".into()));
    }
    rule.eval_iterated(n, None)
}
