// SPDX-License-Identifier: Apache-2.0

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::extremal::constant::constant_c;
use crate::mfunc::{GSpec, MultiplicativeRule, PrimeClass};

/// Both sides of `Σ_j log g(ν_j) <= (C_g/2)·(Σ_j j·ν_j)^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsBound {
    pub lhs: f64,
    /// Right side with `ν` sorted in non-increasing order (its minimum over orderings).
    pub rhs_sorted: f64,
    /// Right side in the order given.
    pub rhs_given: f64,
}

impl CsBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs_sorted && self.rhs_sorted <= self.rhs_given
    }
}

fn weighted(nu: &[u64]) -> f64 {
    nu.iter()
        .enumerate()
        .map(|(j, &v)| (j as f64 + 1.0) * v as f64)
        .sum()
}

/// Evaluate both sides with a caller-supplied `C_g`.
pub fn cs_bound_with(c_g: f64, g: &GSpec, nu: &[u64]) -> Result<CsBound> {
    let mut lhs = 0.0;
    for &v in nu {
        let gv = g
            .eval(v)
            .ok_or_else(|| Error::Overflow(format!("g({v}) exceeds 64 bits")))?;
        lhs += (gv as f64).ln();
    }
    let mut sorted = nu.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    Ok(CsBound {
        lhs,
        rhs_sorted: c_g / 2.0 * weighted(&sorted).sqrt(),
        rhs_given: c_g / 2.0 * weighted(nu).sqrt(),
    })
}

pub fn cs_bound(g: &GSpec, nu: &[u64]) -> Result<CsBound> {
    let c = constant_c(g, 1e-9)?;
    cs_bound_with(c.value, g, nu)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaBound {
    pub f_value: u64,
    /// `(c_f + ε)·log n / (s·log s)`.
    pub bound_base: f64,
    /// `bound_base^s`.
    pub bound: f64,
    /// `ω_Q(n)`.
    pub s: u64,
    pub c_f: f64,
}

/// Compare `f(n)` with `((c_f + ε) log n / (s log s))^s`, `s = ω_Q(n) >= 2`.
///
/// The comparison holds only up to an unspecified constant, so nothing is
/// asserted here; callers inspect the ratio.
pub fn omega_bound_diagnostic(rule: &MultiplicativeRule, n: u64, eps: f64) -> Result<OmegaBound> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let fac = factorize(n);
    let s = fac
        .entries()
        .iter()
        .filter(|&&(p, _)| rule.classify(p) == PrimeClass::InQ)
        .count() as u64;
    if s < 2 {
        return Err(Error::Domain(format!(
            "omega_Q({n}) = {s}; the bound needs at least two primes of Q"
        )));
    }
    let c_f = rule
        .g
        .sublinear_constant()
        .ok_or_else(|| Error::Domain(format!("g = {} has no linear bound", rule.g)))?;
    let sf = s as f64;
    let bound_base = (c_f + eps) * (n as f64).ln() / (sf * sf.ln());
    Ok(OmegaBound {
        f_value: rule.eval(&fac)?,
        bound_base,
        bound: bound_base.powf(sf),
        s,
        c_f,
    })
}
