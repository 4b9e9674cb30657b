// SPDX-License-Identifier: Apache-2.0

//! The explicit large-`f(f(n))` construction.
//!
//! For `g(ν) = αν + 1`, pick `t` blocks with exponents
//! `ν_j = ⌊1 - 1/α + 1/((α+1)^{j/t} - 1)⌋` and let
//! `n = ∏_j ∏_{i<=ν_j} q_{ν_1+…+ν_{j-1}+i}^{g†(q_j)}`, so that
//! `f(n) = ∏_j q_j^{ν_j}` and `f(f(n)) = ∏_j g(ν_j)`. Everything is kept in
//! factored or logarithmic form; `n` is never materialized.

use num_bigint::BigUint;

use crate::arith::{factorize, Factorization};
use crate::error::{Error, Result};
use crate::extremal::constant::constant_c;
use crate::mfunc::{GSpec, MultiplicativeRule};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalWitness {
    pub ln_x: f64,
    pub c_e: f64,
    pub epsilon: f64,
    pub c_g: f64,
    pub t: u64,
    pub nu: Vec<u64>,
    /// `y_i = #{j : ν_j >= i}` for `1 <= i <= ν_1`, counted from `nu`.
    pub y_counts: Vec<u64>,
    /// `⌊t/log(α+1) · log(1 + 1/(i - 1 + 1/α))⌋` for the same `i`.
    pub y_closed_form: Vec<u64>,
    pub n_factorization: Factorization,
    pub log_n: f64,
    /// `f(n)`, evaluated prime power by prime power on `n_factorization`.
    pub fn_factorization: Factorization,
    /// `f(f(n))` when it fits in 64 bits.
    pub ffn: Option<u64>,
    pub log_ffn: f64,
    /// `log f(f(n)) · log log x / sqrt(log x)`.
    pub ratio: f64,
}

impl ExtremalWitness {
    /// `n` itself, if it fits in 64 bits.
    pub fn n_value(&self) -> Result<u64> {
        self.n_factorization.value()
    }
}

/// `ε = c_e·log₃x / log₂x` and the block count `t`.
pub fn block_count(ln_x: f64, c_e: f64, g_at_one: u64, c_g: f64) -> (f64, i64) {
    let l2 = ln_x.ln();
    let l3 = l2.ln();
    let eps = c_e * l3 / l2;
    let t = ((8.0 * (g_at_one as f64).ln() / c_g - eps) * ln_x.sqrt() / l2).floor();
    (eps, t as i64)
}

/// Whether `ν_j >= i`, i.e. `(α+1)^j·g(i-1)^t <= g(i)^t`, decided exactly.
fn block_reaches(alpha: u64, t: u64, j: u64, i: u64) -> bool {
    let g = |v: u64| BigUint::from(alpha * v + 1);
    let t32 = u32::try_from(t).expect("t fits u32");
    let j32 = u32::try_from(j).expect("j fits u32");
    BigUint::from(alpha + 1).pow(j32) * g(i - 1).pow(t32) <= g(i).pow(t32)
}

/// The exponents `ν_1 >= … >= ν_t`.
pub fn block_exponents(alpha: u64, t: u64) -> Vec<u64> {
    (1..=t)
        .map(|j| {
            let mut i = 1;
            while block_reaches(alpha, t, j, i + 1) {
                i += 1;
            }
            i
        })
        .collect()
}

/// `⌊t/log(α+1) · log(g(i)/g(i-1))⌋`, written with `g(i)/g(i-1) = 1 + 1/(i - 1 + 1/α)`.
pub fn y_closed_form(alpha: u64, t: u64, i: u64) -> u64 {
    let ratio = (alpha * i + 1) as f64 / (alpha * (i - 1) + 1) as f64;
    (t as f64 / ((alpha + 1) as f64).ln() * ratio.ln()).floor() as u64
}

/// Build the witness for `x = e^{ln_x}`.
pub fn build_witness(rule: &MultiplicativeRule, ln_x: f64, c_e: f64) -> Result<ExtremalWitness> {
    let alpha = match rule.g {
        GSpec::Affine(a) => a,
        _ => {
            return Err(Error::Domain(
                "the witness construction needs g(v) = alpha*v + 1".into(),
            ))
        }
    };
    if !(c_e > 0.0) {
        return Err(Error::Domain("c_e must be positive".into()));
    }
    if !(ln_x > std::f64::consts::E) || !ln_x.is_finite() {
        return Err(Error::Domain(format!(
            "need log log log x > 0, i.e. ln x > e; got ln x = {ln_x}"
        )));
    }
    let c_g = constant_c(&rule.g, 1e-10)?.value;
    let g1 = alpha + 1;
    let (epsilon, t) = block_count(ln_x, c_e, g1, c_g);
    if t < 1 {
        let mut probe = ln_x;
        let mut admissible = None;
        for _ in 0..20_000 {
            probe *= 1.01;
            if block_count(probe, c_e, g1, c_g).1 >= 1 {
                admissible = Some(probe);
                break;
            }
        }
        return Err(Error::Domain(match admissible {
            Some(l) => format!(
                "t = {t} < 1 at ln x = {ln_x}; the least admissible ln x above it is about {l:.6}"
            ),
            None => format!("t = {t} < 1 at ln x = {ln_x} and no admissible x found nearby"),
        }));
    }
    let t = t as u64;
    let nu = block_exponents(alpha, t);
    let total: u64 = nu.iter().sum();
    let q = rule.q_primes(total as usize)?;

    let mut n_powers = Vec::with_capacity(total as usize);
    let mut offset = 0usize;
    for (j, &nu_j) in nu.iter().enumerate() {
        let exponent = rule.g.dagger(q[j]).ok_or_else(|| {
            Error::Domain(format!(
                "g takes no value {} (g-dagger is infinite), so q_{} cannot appear in f(n)",
                q[j],
                j + 1
            ))
        })?;
        for i in 0..nu_j as usize {
            n_powers.push((q[offset + i], exponent));
        }
        offset += nu_j as usize;
    }
    let n_factorization = Factorization::from_prime_powers(n_powers);

    // f(n) prime power by prime power, each value factorized
    let mut fn_factorization = Factorization::one();
    for &(p, e) in n_factorization.entries() {
        let v = rule.prime_power(p, e)?;
        if v == 0 {
            return Err(Error::Integrity(format!("f({p}^{e}) = 0 in the witness")));
        }
        fn_factorization = fn_factorization.mul(&factorize(v));
    }
    let expected = Factorization::from_prime_powers(q.iter().copied().zip(nu.iter().copied()));
    if fn_factorization != expected {
        return Err(Error::Integrity(format!(
            "f(n) = {fn_factorization} differs from prod q_j^nu_j = {expected}"
        )));
    }

    let mut log_ffn = 0.0;
    for &v in &nu {
        log_ffn += (rule.g.eval(v).expect("small exponent") as f64).ln();
    }
    let ffn = rule.eval(&fn_factorization).ok();

    let y_counts: Vec<u64> = (1..=nu[0])
        .map(|i| nu.iter().filter(|&&v| v >= i).count() as u64)
        .collect();
    let y_closed_form: Vec<u64> = (1..=nu[0]).map(|i| y_closed_form(alpha, t, i)).collect();

    let ratio = log_ffn * ln_x.ln() / ln_x.sqrt();
    Ok(ExtremalWitness {
        ln_x,
        c_e,
        epsilon,
        c_g,
        t,
        nu,
        y_counts,
        y_closed_form,
        log_n: n_factorization.ln(),
        n_factorization,
        fn_factorization,
        ffn,
        log_ffn,
        ratio,
    })
}
