// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::mfunc::GSpec;

/// A certified value of `C_g = (8 Σ_{j>=1} log²(g(j)/g(j-1)))^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesConstant {
    /// Midpoint of the certified interval.
    pub value: f64,
    /// Half-width of the certified interval; `|value - C_g| <= tail_bound`.
    pub tail_bound: f64,
    pub terms_used: u64,
    pub lower: f64,
    pub upper: f64,
}

impl SeriesConstant {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

fn log_ratio(g: &GSpec, j: u64) -> Result<f64> {
    let hi = g
        .eval(j)
        .ok_or_else(|| Error::Overflow(format!("g({j}) exceeds 64 bits")))?;
    let lo = g
        .eval(j - 1)
        .ok_or_else(|| Error::Overflow(format!("g({}) exceeds 64 bits", j - 1)))?;
    if hi >= lo {
        // exact integer difference keeps the relative accuracy for ratios near 1
        Ok(((hi - lo) as f64 / lo as f64).ln_1p())
    } else {
        Ok((hi as f64 / lo as f64).ln())
    }
}

/// Partial sum `Σ_{j<=terms} log²(g(j)/g(j-1))`.
pub fn partial_sum(g: &GSpec, terms: u64) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 1..=terms {
        let l = log_ratio(g, j)?;
        // Kahan summation
        let y = l * l - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

/// Certified bounds on the series tail `Σ_{j>terms}` for an eventually affine `g`.
///
/// With `u_j = 1/(j - 1 + s)` and `u - u²/2 <= log(1 + u) <= u`, the tail lies in
/// `[1/(J+s) - 1/(2(J-1+s)²), 1/(J-1+s)]`.
fn tail_interval(terms: u64, shift: f64) -> (f64, f64) {
    let a = terms as f64 - 1.0 + shift;
    let upper = 1.0 / a;
    let lower = 1.0 / (a + 1.0) - 1.0 / (2.0 * a * a);
    (lower.max(0.0), upper)
}

/// Evaluate `C_g` to within `tol`, with a certified interval.
pub fn constant_c(g: &GSpec, tol: f64) -> Result<SeriesConstant> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let (first_affine, shift) = g.affine_tail().ok_or_else(|| {
        Error::Domain(format!(
            "g = {g} is not eventually affine; the series for C_g does not converge"
        ))
    })?;
    // half-width in C is about 2/J², so start near sqrt(2/tol)
    let mut terms = ((2.0 / tol).sqrt().ceil() as u64).max(first_affine).max(16);
    loop {
        let partial = partial_sum(g, terms)?;
        let (tlo, thi) = tail_interval(terms, shift);
        // compensated summation of terms each accurate to a few ulps
        let rounding = 16.0 * f64::EPSILON * partial;
        let lower = (8.0 * (partial + tlo - rounding)).sqrt();
        let upper = (8.0 * (partial + thi + rounding)).sqrt();
        let half = (upper - lower) / 2.0;
        if half <= tol {
            return Ok(SeriesConstant {
                value: (upper + lower) / 2.0,
                tail_bound: half,
                terms_used: terms,
                lower,
                upper,
            });
        }
        if terms > 1 << 32 {
            return Err(Error::Capacity {
                what: "series terms",
                limit: 1 << 32,
                requested: terms,
            });
        }
        terms *= 2;
    }
}
