// SPDX-License-Identifier: Apache-2.0

//! Finite-range audit of the seven hypotheses on `(Q, g)` used by the upper
//! bound.
//!
//! A2, A3, A4 and A6 are statements that can be checked exhaustively on a
//! finite range and are reported as pass or fail. A1, A5 and A7 are
//! asymptotic; for those the report carries least-squares fits and residuals.

use std::fmt;

use crate::arith::{factorize, DEFAULT_SIEVE_CAP};
use crate::error::{Error, Result};
use crate::mfunc::{Classifier, GSpec, MultiplicativeRule};
use crate::record::{csv_cell, Field, Record};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssumptionId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
}

impl AssumptionId {
    pub const ALL: [AssumptionId; 7] = [
        AssumptionId::A1,
        AssumptionId::A2,
        AssumptionId::A3,
        AssumptionId::A4,
        AssumptionId::A5,
        AssumptionId::A6,
        AssumptionId::A7,
    ];

    pub fn statement(self) -> &'static str {
        match self {
            AssumptionId::A1 => "q_j = kappa j (log j + log log j + O(1))",
            AssumptionId::A2 => "g is increasing",
            AssumptionId::A3 => "g(N) contains <Q>",
            AssumptionId::A4 => "g'(b) + c_* b g'(a) <= g'(ab) for a <= b in <Q>, c_* > 1/q_1",
            AssumptionId::A5 => "g(i)/g(i-1) = 1 + O(i^(-1/2-eps))",
            AssumptionId::A6 => "g(x) <= c_f x",
            AssumptionId::A7 => "g'(q) = c_dagger q + O(q/log q)",
        }
    }
}

impl fmt::Display for AssumptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    FitOnly,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::FitOnly => "fit-only",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionRecord {
    pub id: AssumptionId,
    pub status: Status,
    /// Human-readable description of the finite range examined.
    pub range: String,
    /// Fitted or verified constants, by name.
    pub details: Record,
    /// Present on every `Fail`.
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub rule: String,
    pub records: Vec<AssumptionRecord>,
}

impl AuditReport {
    pub fn get(&self, id: AssumptionId) -> &AssumptionRecord {
        self.records
            .iter()
            .find(|r| r.id == id)
            .expect("every assumption is reported")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditConfig {
    /// Indices `j` used for the fits of A1 and A7.
    pub j_range: (u64, u64),
    /// Exponents `ν` for A2, A5 and A6.
    pub nu_range: (u64, u64),
    /// Bound on `a` (A3) and on `ab` (A4).
    pub ab_budget: u64,
    /// A6 passes when `g(ν) <= c_f_cap·ν` on the whole `ν` range.
    pub c_f_cap: f64,
    /// Largest prime searched when listing `Q`.
    pub prime_search_cap: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            j_range: (1_000, 10_000),
            nu_range: (1, 10_000),
            ab_budget: 10_000,
            c_f_cap: 1e6,
            prime_search_cap: DEFAULT_SIEVE_CAP,
        }
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// The first primes of `Q`, as many as exist below the search cap up to `count`.
fn list_q(rule: &MultiplicativeRule, count: u64, cap: u64) -> (Vec<u64>, Option<Error>) {
    match rule.q_primes_capped(count as usize, cap) {
        Ok(v) => (v, None),
        Err(e) => {
            let partial = match &rule.classifier {
                Classifier::Explicit { primes, .. } => primes.clone(),
                _ => crate::arith::primes_up_to(cap.min(10_000_000))
                    .into_iter()
                    .filter(|&p| rule.classify(p) == crate::mfunc::PrimeClass::InQ)
                    .take(count as usize)
                    .collect(),
            };
            (partial, Some(e))
        }
    }
}

fn audit_a1(q: &[u64], shortfall: &Option<Error>, cfg: &AuditConfig) -> AssumptionRecord {
    let (lo, hi) = cfg.j_range;
    let range = format!("j in [{lo}, {hi}]");
    if let Some(e) = shortfall {
        return AssumptionRecord {
            id: AssumptionId::A1,
            status: Status::Fail,
            range,
            details: Record::new().with("primes_found", q.len()),
            counterexample: Some(format!("q_{} not found ({e})", q.len() + 1)),
        };
    }
    let lo = lo.max(3);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = 0.0f64;
    for j in lo..=hi {
        let jf = j as f64;
        let x = jf.ln() + jf.ln().ln();
        let y = q[j as usize - 1] as f64 / jf;
        ratio_min = ratio_min.min(y / x);
        ratio_max = ratio_max.max(y / x);
        xs.push(x);
        ys.push(y);
    }
    let (kappa, beta) = linear_fit(&xs, &ys);
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - kappa * x - beta).abs())
        .fold(0.0, f64::max);
    AssumptionRecord {
        id: AssumptionId::A1,
        status: Status::FitOnly,
        range,
        details: Record::new()
            .with("kappa_hat", kappa)
            .with("intercept", beta)
            .with("max_residual", max_residual)
            .with("ratio_min", ratio_min)
            .with("ratio_max", ratio_max),
        counterexample: None,
    }
}

fn audit_a2(g: &GSpec, cfg: &AuditConfig) -> AssumptionRecord {
    let (lo, hi) = cfg.nu_range;
    let range = format!("nu in [{lo}, {hi}]");
    // None is a value beyond 64 bits and compares above every finite value
    let key = |v: Option<u64>| v.map_or(u128::MAX, u128::from);
    let lo = lo.max(1);
    let mut prev = key(g.eval(lo - 1));
    let mut bad = None;
    for nu in lo..=hi {
        let cur = key(g.eval(nu));
        if cur <= prev && !(cur == u128::MAX && prev == u128::MAX) {
            bad = Some(nu);
            break;
        }
        prev = cur;
    }
    let overflow_from = (lo..=hi).find(|&nu| g.eval(nu).is_none());
    let mut details = Record::new();
    if let Some(nu) = overflow_from {
        details.push("exceeds_64_bits_from", nu);
    }
    AssumptionRecord {
        id: AssumptionId::A2,
        status: if bad.is_some() {
            Status::Fail
        } else {
            Status::Pass
        },
        range,
        details,
        counterexample: bad.map(|nu| {
            format!(
                "nu = {nu}: g({}) = {:?}, g({nu}) = {:?}",
                nu - 1,
                g.eval(nu - 1),
                g.eval(nu)
            )
        }),
    }
}

/// `⟨Q⟩ ∩ [2, limit]`.
fn q_monoid_upto(rule: &MultiplicativeRule, limit: u64) -> Vec<u64> {
    (2..=limit)
        .filter(|&a| rule.in_q_monoid(&factorize(a)))
        .collect()
}

fn audit_a3(g: &GSpec, monoid: &[u64], cfg: &AuditConfig) -> AssumptionRecord {
    let missing = monoid.iter().copied().find(|&a| g.dagger(a).is_none());
    AssumptionRecord {
        id: AssumptionId::A3,
        status: if missing.is_some() {
            Status::Fail
        } else {
            Status::Pass
        },
        range: format!("a in <Q>, 2 <= a <= {}", cfg.ab_budget),
        details: Record::new().with("elements_checked", monoid.len()),
        counterexample: missing.map(|a| format!("a = {a} is not a value of g")),
    }
}

fn audit_a4(g: &GSpec, monoid: &[u64], q1: Option<u64>, cfg: &AuditConfig) -> AssumptionRecord {
    let range = format!("a <= b in <Q>, q_1 <= a, ab <= {}", cfg.ab_budget);
    let Some(q1) = q1 else {
        return AssumptionRecord {
            id: AssumptionId::A4,
            status: Status::Fail,
            range,
            details: Record::new(),
            counterexample: Some("Q is empty".into()),
        };
    };
    let mut pairs = 0u64;
    let mut c_min = f64::INFINITY;
    let mut worst: Option<(u64, u64)> = None;
    let mut failure: Option<String> = None;
    for (ia, &a) in monoid.iter().enumerate() {
        if a < q1 {
            continue;
        }
        if a.saturating_mul(a) > cfg.ab_budget {
            break;
        }
        for &b in &monoid[ia..] {
            if a * b > cfg.ab_budget {
                break;
            }
            pairs += 1;
            let (Some(ga), Some(gb), Some(gab)) = (g.dagger(a), g.dagger(b), g.dagger(a * b))
            else {
                failure.get_or_insert_with(|| format!("(a, b) = ({a}, {b}): g-dagger is infinite"));
                continue;
            };
            let num = i128::from(gab) - i128::from(gb);
            let den = i128::from(b) * i128::from(ga);
            let c = num as f64 / den as f64;
            if c < c_min {
                c_min = c;
                worst = Some((a, b));
            }
            // c_* > 1/q_1 must be available for this pair: num/den > 1/q_1
            if num * i128::from(q1) <= den && failure.is_none() {
                failure = Some(format!(
                    "(a, b) = ({a}, {b}): (g'(ab) - g'(b)) / (b g'(a)) = {num}/{den} <= 1/{q1}"
                ));
            }
        }
    }
    let c_star = c_min.min(1.0);
    let mut details = Record::new()
        .with("pairs_checked", pairs)
        .with("q_1", q1)
        .with("c_star", if pairs > 0 { c_star } else { 1.0 });
    if let Some((a, b)) = worst {
        details.push("binding_pair", vec![a, b]);
    }
    AssumptionRecord {
        id: AssumptionId::A4,
        status: if failure.is_some() {
            Status::Fail
        } else {
            Status::Pass
        },
        range,
        details,
        counterexample: failure,
    }
}

fn audit_a5(g: &GSpec, cfg: &AuditConfig) -> AssumptionRecord {
    let (lo, hi) = cfg.nu_range;
    let lo = lo.max(2);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut last = lo;
    for i in lo..=hi {
        let (Some(a), Some(b)) = (g.eval(i - 1), g.eval(i)) else {
            break;
        };
        last = i;
        // g(i)/g(i-1) - 1 without cancellation
        let excess = (b as f64 - a as f64) / a as f64;
        if excess <= 0.0 {
            continue;
        }
        xs.push((i as f64).ln());
        ys.push(excess.ln());
    }
    let mut details = Record::new().with("points", xs.len());
    if xs.len() >= 2 {
        let (slope, _) = linear_fit(&xs, &ys);
        details.push("decay_exponent", -slope);
        details.push("eps_hat", -slope - 0.5);
    }
    AssumptionRecord {
        id: AssumptionId::A5,
        status: Status::FitOnly,
        range: format!("i in [{lo}, {last}]"),
        details,
        counterexample: None,
    }
}

fn audit_a6(g: &GSpec, cfg: &AuditConfig) -> AssumptionRecord {
    let (lo, hi) = cfg.nu_range;
    let lo = lo.max(1);
    let mut c_hat = 0.0f64;
    let mut bad = None;
    for nu in lo..=hi {
        match g.eval(nu) {
            Some(v) => {
                c_hat = c_hat.max(v as f64 / nu as f64);
                if bad.is_none() && v as f64 > cfg.c_f_cap * nu as f64 {
                    bad = Some(nu);
                }
            }
            None => {
                bad.get_or_insert(nu);
                break;
            }
        }
    }
    let mut details = Record::new().with("c_f_cap", cfg.c_f_cap);
    if bad.is_none() {
        details.push("c_f", c_hat);
    }
    AssumptionRecord {
        id: AssumptionId::A6,
        status: if bad.is_some() {
            Status::Fail
        } else {
            Status::Pass
        },
        range: format!("nu in [{lo}, {hi}]"),
        details,
        counterexample: bad.map(|nu| match g.eval(nu) {
            Some(v) => format!("nu = {nu}: g(nu) = {v} > {} * nu", cfg.c_f_cap),
            None => format!("nu = {nu}: g(nu) exceeds 64 bits"),
        }),
    }
}

fn audit_a7(rule: &MultiplicativeRule, q: &[u64], cfg: &AuditConfig) -> AssumptionRecord {
    let (lo, hi) = cfg.j_range;
    let lo = (lo.max(1) as usize).min(q.len() + 1);
    let hi = (hi as usize).min(q.len());
    let sample: Vec<(u64, Option<u64>)> = q
        .get(lo.saturating_sub(1)..hi)
        .unwrap_or(&[])
        .iter()
        .map(|&p| (p, rule.g.dagger(p)))
        .collect();
    let finite: Vec<(f64, f64)> = sample
        .iter()
        .filter_map(|&(p, d)| d.map(|d| (p as f64, d as f64)))
        .collect();
    let mut details = Record::new().with("primes_checked", sample.len());
    // least squares through the origin
    let sxy: f64 = finite.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = finite.iter().map(|(x, _)| x * x).sum();
    if sxx > 0.0 {
        let c = sxy / sxx;
        let max_residual = finite
            .iter()
            .map(|(x, y)| (y - c * x).abs() / (x / x.ln()))
            .fold(0.0, f64::max);
        details.push("c_dagger_fit", c);
        details.push("max_normalized_residual", max_residual);
    }
    if let Some(d) = sample.iter().find(|s| s.1.is_none()) {
        details.push("first_infinite", d.0);
    }
    if let GSpec::Affine(alpha) = rule.g {
        let exact = !sample.is_empty()
            && sample
                .iter()
                .all(|&(p, d)| d.is_some_and(|d| alpha * d == p - 1));
        details.push("exact", exact);
        if exact {
            details.push("c_dagger", 1.0 / alpha as f64);
            details.push("c_dagger_denominator", alpha);
        }
    }
    AssumptionRecord {
        id: AssumptionId::A7,
        status: Status::FitOnly,
        range: format!("q_j for j in [{lo}, {hi}]"),
        details,
        counterexample: None,
    }
}

/// Audit `rule` on the ranges in `cfg`. Problems are report content; only
/// malformed ranges are errors.
pub fn audit(rule: &MultiplicativeRule, cfg: &AuditConfig) -> Result<AuditReport> {
    let (jl, jh) = cfg.j_range;
    let (nl, nh) = cfg.nu_range;
    if jl == 0 || jl > jh || nl > nh || nh == 0 {
        return Err(Error::Validation(format!(
            "empty audit range: j in [{jl}, {jh}], nu in [{nl}, {nh}]"
        )));
    }
    if cfg.ab_budget < 2 {
        return Err(Error::Validation("ab budget must be at least 2".into()));
    }
    if !(cfg.c_f_cap > 0.0) {
        return Err(Error::Validation("c_f cap must be positive".into()));
    }
    let (q, shortfall) = list_q(rule, jh, cfg.prime_search_cap);
    let monoid = q_monoid_upto(rule, cfg.ab_budget);
    let records = vec![
        audit_a1(&q, &shortfall, cfg),
        audit_a2(&rule.g, cfg),
        audit_a3(&rule.g, &monoid, cfg),
        audit_a4(&rule.g, &monoid, q.first().copied(), cfg),
        audit_a5(&rule.g, cfg),
        audit_a6(&rule.g, cfg),
        audit_a7(rule, &q, cfg),
    ];
    Ok(AuditReport {
        rule: rule.name.clone(),
        records,
    })
}

impl AssumptionRecord {
    /// Output record with a fixed set of columns; the details are packed into
    /// one space-separated `key=value` string.
    pub fn to_record(&self, rule: &str) -> Record {
        let details = self
            .details
            .fields
            .iter()
            .map(|(k, v)| format!("{k}={}", csv_cell(v)))
            .collect::<Vec<_>>()
            .join(" ");
        Record::new()
            .with("rule", rule)
            .with("id", self.id.to_string())
            .with("status", self.status.to_string())
            .with("range", self.range.clone())
            .with("details", details)
            .with(
                "counterexample",
                Field::Str(self.counterexample.clone().unwrap_or_default()),
            )
    }
}
