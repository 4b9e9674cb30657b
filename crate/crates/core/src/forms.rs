// SPDX-License-Identifier: Apache-2.0

//! Exact lattice-point counts for positive definite binary quadratic forms.
//!
//! These counts are computed without any reference to factorization, so they
//! serve as an independent check on the closed formulas in [`crate::mfunc`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::arith::{isqrt, SpfTable};
use crate::error::{Error, Result};
use crate::mfunc::MultiplicativeRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Restriction {
    /// All of `ℤ²`.
    All,
    /// The half-open sector `x > 0, y >= 0` (plus the origin when `n = 0`).
    ///
    /// For `x² + y²` and `x² + xy + y²` this is a fundamental domain for the
    /// unit group, so the count equals the full count divided by 4 or 6.
    NonNegative,
}

/// The form `a x² + b xy + c y²` together with the divisor applied to its counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormSpec {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub normalizer: u64,
    pub restriction: Restriction,
}

impl FormSpec {
    pub fn new(a: i64, b: i64, c: i64, normalizer: u64, restriction: Restriction) -> Result<Self> {
        let det = 4 * (a as i128) * (c as i128) - (b as i128) * (b as i128);
        if a <= 0 || det <= 0 {
            return Err(Error::Validation(format!(
                "{a}x^2+{b}xy+{c}y^2 is not positive definite"
            )));
        }
        if ![1, 2, 4, 6].contains(&normalizer) {
            return Err(Error::Validation(format!(
                "normalizer {normalizer} not in {{1, 2, 4, 6}}"
            )));
        }
        Ok(Self {
            a,
            b,
            c,
            normalizer,
            restriction,
        })
    }

    /// `b² - 4ac`.
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Look up one of the named forms (see [`class_number_one_forms`]).
    pub fn preset(name: &str) -> Option<Self> {
        let named = |a, b, c, norm| FormSpec::new(a, b, c, norm, Restriction::All).ok();
        match name {
            "gaussian" => named(1, 0, 1, 4),
            "root-minus-two" => named(1, 0, 2, 2),
            "eisenstein" => named(1, 1, 1, 6),
            "eisenstein-sector" => FormSpec::new(1, 1, 1, 1, Restriction::NonNegative).ok(),
            "gaussian-sector" => FormSpec::new(1, 0, 1, 1, Restriction::NonNegative).ok(),
            _ => {
                let k: i64 = name.strip_prefix('k')?.parse().ok()?;
                [2, 3, 5, 11, 17, 41]
                    .contains(&k)
                    .then(|| named(1, 1, k, 2))
                    .flatten()
            }
        }
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}/{}", self.a, self.b, self.c, self.normalizer)?;
        if self.restriction == Restriction::NonNegative {
            write!(f, "+")?;
        }
        Ok(())
    }
}

/// Parses `a,b,c/normalizer`, with a trailing `+` for the sector restriction,
/// or one of the preset names.
impl FromStr for FormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(f) = FormSpec::preset(s) {
            return Ok(f);
        }
        let bad = || Error::Validation(format!("cannot parse form '{s}'"));
        let (body, restriction) = match s.strip_suffix('+') {
            Some(b) => (b, Restriction::NonNegative),
            None => (s, Restriction::All),
        };
        let (coeffs, norm) = body.split_once('/').ok_or_else(bad)?;
        let c: Vec<i64> = coeffs
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if c.len() != 3 {
            return Err(bad());
        }
        let norm: u64 = norm.trim().parse().map_err(|_| bad())?;
        FormSpec::new(c[0], c[1], c[2], norm, restriction)
    }
}

/// The class-number-one forms with their normalizers, each paired with the
/// fundamental discriminant of the matching imaginary quadratic field.
pub fn class_number_one_forms() -> Vec<(&'static str, FormSpec, i64)> {
    let names = [
        "gaussian",
        "root-minus-two",
        "eisenstein",
        "k2",
        "k3",
        "k5",
        "k11",
        "k17",
        "k41",
    ];
    names
        .iter()
        .map(|&name| {
            let f = FormSpec::preset(name).expect("preset exists");
            (name, f, f.discriminant())
        })
        .collect()
}

/// Number of `(x, y)` with `a x² + b xy + c y² = n`, restricted as the form says.
pub fn count_raw(form: &FormSpec, n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let (a, b) = (form.a as i128, form.b as i128);
    let det = 4 * a * form.c as i128 - b * b;
    let four_an = 4 * a * n as i128;
    // (2ax + by)² + det·y² = 4an
    let y_max = isqrt((four_an / det) as u128) as i128;
    let y_min = match form.restriction {
        Restriction::All => -y_max,
        Restriction::NonNegative => 0,
    };
    let mut count = 0u64;
    for y in y_min..=y_max {
        let disc = four_an - det * y * y;
        if disc < 0 {
            continue;
        }
        let s = isqrt(disc as u128) as i128;
        if s * s != disc {
            continue;
        }
        let roots: &[i128] = if s == 0 { &[0] } else { &[1, -1] };
        for &sign in roots {
            let num = -b * y + sign * s;
            if num % (2 * a) != 0 {
                continue;
            }
            let x = num / (2 * a);
            if form.restriction == Restriction::NonNegative && x <= 0 {
                continue;
            }
            count += 1;
        }
    }
    count
}

/// `count_raw / normalizer` for `n >= 1`, and `1` at `n = 0`.
pub fn count_normalized(form: &FormSpec, n: u64) -> Result<u64> {
    if n == 0 {
        return Ok(1);
    }
    let raw = count_raw(form, n);
    if !raw.is_multiple_of(form.normalizer) {
        return Err(Error::Integrity(format!(
            "raw count {raw} of {form} at n = {n} is not divisible by {}",
            form.normalizer
        )));
    }
    Ok(raw / form.normalizer)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub n: u64,
    pub raw: u64,
    /// `None` when the raw count is not divisible by the normalizer.
    pub normalized: Option<u64>,
    pub rule_value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub form: FormSpec,
    pub rule: String,
    pub limit: u64,
    pub mismatches: Vec<Mismatch>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare normalized counts with `rule` for every `1 <= n <= limit`.
pub fn crosscheck_range(
    form: &FormSpec,
    rule: &MultiplicativeRule,
    limit: u64,
) -> Result<CrosscheckReport> {
    if limit == 0 {
        return Err(Error::Domain("crosscheck needs limit >= 1".into()));
    }
    let table = if limit >= 2 {
        Some(crate::arith::sieve_spf(limit)?)
    } else {
        None
    };
    let table: Option<&SpfTable> = table.as_ref();
    let chunks: Vec<(u64, u64)> = chunk_ranges(1, limit, 4096);
    let parts: Vec<Result<Vec<Mismatch>>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut out = Vec::new();
            for n in lo..=hi {
                let raw = count_raw(form, n);
                let normalized = raw
                    .is_multiple_of(form.normalizer)
                    .then_some(raw / form.normalizer);
                let rule_value = rule.eval_int(n, table)?;
                if normalized != Some(rule_value) {
                    out.push(Mismatch {
                        n,
                        raw,
                        normalized,
                        rule_value,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut mismatches = Vec::new();
    for p in parts {
        mismatches.extend(p?);
    }
    Ok(CrosscheckReport {
        form: *form,
        rule: rule.name.clone(),
        limit,
        mismatches,
    })
}

/// Split `[lo, hi]` into consecutive closed ranges of at most `size` elements.
pub(crate) fn chunk_ranges(lo: u64, hi: u64, size: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = start.saturating_add(size - 1).min(hi);
        out.push((start, end));
        if end == u64::MAX {
            break;
        }
        start = end + 1;
    }
    out
}
