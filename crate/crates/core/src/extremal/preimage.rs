// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_bigint::BigUint;

use crate::arith::{factorize, Factorization};
use crate::error::{Error, Result};
use crate::mfunc::{GSpec, MultiplicativeRule};

pub const DEFAULT_PARTITION_BUDGET: u64 = 1_000_000;

/// The least `m` with `f(m) = N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinPreimage {
    pub target: u64,
    pub m: Factorization,
    /// Exponents of `m` on `q_1 < q_2 < ...`, non-increasing.
    pub exponents: Vec<u64>,
    pub partitions_examined: u64,
}

/// Exact comparison of two factored integers.
///
/// Decided from the log-sizes when they differ by more than the accumulated
/// rounding error, otherwise by exact big-integer multiplication.
pub fn cmp_factored(a: &Factorization, b: &Factorization) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let (la, lb) = (a.ln(), b.ln());
    let slack = 64.0 * f64::EPSILON * (la + lb + 1.0);
    if la - lb > slack {
        return Ordering::Greater;
    }
    if lb - la > slack {
        return Ordering::Less;
    }
    big(a).cmp(&big(b))
}

fn big(f: &Factorization) -> BigUint {
    f.big_value()
}

fn from_exponents(q: &[u64], exponents: &[u64]) -> Factorization {
    Factorization::from_prime_powers(q.iter().copied().zip(exponents.iter().copied()))
}

/// Enumerate multiplicative partitions of `rest` into non-increasing parts from `parts`.
fn partitions(
    parts: &[u64],
    rest: u64,
    max_idx: usize,
    current: &mut Vec<u64>,
    visit: &mut dyn FnMut(&[u64]) -> Result<()>,
) -> Result<()> {
    if rest == 1 {
        return visit(current);
    }
    for idx in (0..=max_idx).rev() {
        let d = parts[idx];
        if d > rest {
            continue;
        }
        if rest.is_multiple_of(d) {
            current.push(d);
            partitions(parts, rest / d, idx, current, visit)?;
            current.pop();
        }
    }
    Ok(())
}

/// Least `m` with `f(m) = N`, for `N > 1` in the monoid generated by `Q`.
///
/// Every factorization `N = d_1···d_r` into values of `g` gives a candidate
/// `q_1^{g†(d_(1))}···q_r^{g†(d_(r))}` with exponents sorted descending; the
/// minimum over all such partitions is `m_N`.
pub fn min_preimage(rule: &MultiplicativeRule, target: u64, budget: u64) -> Result<MinPreimage> {
    if target <= 1 {
        return Err(Error::Domain("minimal preimage needs N > 1".into()));
    }
    let fac = factorize(target);
    if !rule.in_q_monoid(&fac) {
        return Err(Error::Domain(format!(
            "{target} has a prime factor outside Q"
        )));
    }
    let (big_omega, _) = fac.omega_counts();
    let q = rule.q_primes(big_omega as usize)?;

    let mut parts: Vec<u64> = divisors(&fac)
        .into_iter()
        .filter(|&d| d > 1 && rule.g.dagger(d).is_some())
        .collect();
    parts.sort_unstable();
    if parts.is_empty() {
        return Err(Error::Domain(format!(
            "{target} is not a product of values of g"
        )));
    }

    let mut best: Option<(Factorization, Vec<u64>)> = None;
    let mut examined = 0u64;
    let g: &GSpec = &rule.g;
    let mut visit = |partition: &[u64]| -> Result<()> {
        examined += 1;
        if examined > budget {
            return Err(Error::Capacity {
                what: "multiplicative partitions",
                limit: budget,
                requested: examined,
            });
        }
        let mut exps: Vec<u64> = partition
            .iter()
            .map(|&d| g.dagger(d).expect("filtered"))
            .collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        let cand = from_exponents(&q, &exps);
        let better = match &best {
            None => true,
            Some((m, e)) => match cmp_factored(&cand, m) {
                Ordering::Less => true,
                Ordering::Equal => exps < *e,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((cand, exps));
        }
        Ok(())
    };
    let last = parts.len() - 1;
    partitions(&parts, target, last, &mut Vec::new(), &mut visit)?;
    let (m, exponents) =
        best.ok_or_else(|| Error::Domain(format!("{target} is not a product of values of g")))?;
    Ok(MinPreimage {
        target,
        m,
        exponents,
        partitions_examined: examined,
    })
}

fn divisors(f: &Factorization) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in f.entries() {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out
}

/// Violations found by [`check_preimage_structure`]; all empty means the table passes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreimageStructureReport {
    /// Targets whose exponents are not non-increasing, or whose `m` leaves `Q`.
    pub structure: Vec<u64>,
    /// Pairs `(N', N)` with `N' | N` but `m_{N'} > m_N`.
    pub divisor: Vec<(u64, u64)>,
    /// `(N, j, k)`: `q_j > q_{r+1}^{1/s_k}` and yet `Ω(g(ν_j)) > k`.
    pub omega: Vec<(u64, usize, u64)>,
    pub divisor_pairs_checked: u64,
    pub omega_checks: u64,
}

impl PreimageStructureReport {
    pub fn passed(&self) -> bool {
        self.structure.is_empty() && self.divisor.is_empty() && self.omega.is_empty()
    }
}

/// Structural checks on a table of minimal preimages.
///
/// Checks that exponents are non-increasing on the primes of `Q`, that
/// `m_{N'} <= m_N` whenever `N' | N` within the table, and that
/// `Ω(g(ν_j)) <= k` whenever `q_j > q_{r+1}^{1/s_k}` with `s_k = c_*·q_1^k`.
pub fn check_preimage_structure(
    rule: &MultiplicativeRule,
    table: &[MinPreimage],
    k_range: RangeInclusive<u64>,
    c_star: f64,
) -> Result<PreimageStructureReport> {
    let mut report = PreimageStructureReport::default();
    let max_r = table.iter().map(|e| e.exponents.len()).max().unwrap_or(0);
    let q = rule.q_primes(max_r + 1)?;
    let by_target: HashMap<u64, &MinPreimage> = table.iter().map(|e| (e.target, e)).collect();

    for entry in table {
        let r = entry.exponents.len();
        let sorted = entry.exponents.windows(2).all(|w| w[0] >= w[1]);
        let on_q = entry.m == from_exponents(&q[..r], &entry.exponents);
        if !sorted || !on_q || rule.eval(&entry.m)? != entry.target {
            report.structure.push(entry.target);
        }

        for d in divisors(&factorize(entry.target)) {
            if d <= 1 || d == entry.target {
                continue;
            }
            if let Some(smaller) = by_target.get(&d) {
                report.divisor_pairs_checked += 1;
                if cmp_factored(&smaller.m, &entry.m) == Ordering::Greater {
                    report.divisor.push((d, entry.target));
                }
            }
        }

        let ln_next = (q[r] as f64).ln();
        for k in k_range.clone() {
            let s_k = c_star * (q[0] as f64).powi(k as i32);
            for (j, &nu) in entry.exponents.iter().enumerate() {
                if (q[j] as f64).ln() > ln_next / s_k {
                    report.omega_checks += 1;
                    let gv = rule
                        .g
                        .eval(nu)
                        .ok_or_else(|| Error::Overflow(format!("g({nu}) exceeds 64 bits")))?;
                    if factorize(gv).omega_counts().0 > k {
                        report.omega.push((entry.target, j + 1, k));
                    }
                }
            }
        }
    }
    report.divisor.sort_unstable();
    Ok(report)
}

/// Minimal preimages of every `N` in `2..=limit` that lies in `⟨Q⟩` and is a
/// product of values of `g`.
pub fn preimage_table(
    rule: &MultiplicativeRule,
    limit: u64,
    budget: u64,
) -> Result<Vec<MinPreimage>> {
    let mut out = Vec::new();
    for n in 2..=limit {
        match min_preimage(rule, n, budget) {
            Ok(e) => out.push(e),
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfunc::{rule_divisor_power, rule_for_discriminant};

    fn fz(pairs: &[(u64, u64)]) -> Factorization {
        Factorization::from_pairs(pairs.to_vec()).unwrap()
    }

    /// Least m <= limit with f(m) = N, for every N hit.
    fn brute_table(rule: &MultiplicativeRule, limit: u64) -> HashMap<u64, u64> {
        let mut out = HashMap::new();
        for m in 1..=limit {
            let v = rule.eval_int(m, None).unwrap();
            out.entry(v).or_insert(m);
        }
        out
    }

    #[test]
    fn divisor_sixteen() {
        let d = rule_divisor_power(1).unwrap();
        let r = min_preimage(&d, 16, DEFAULT_PARTITION_BUDGET).unwrap();
        assert_eq!(r.m.value().unwrap(), 120);
        assert_eq!(r.exponents, vec![3, 1, 1]);
        assert_eq!(brute_table(&d, 1000)[&16], 120);
    }

    #[test]
    fn delta_examples() {
        let delta = rule_for_discriminant(-4).unwrap();
        let r = min_preimage(&delta, 5, DEFAULT_PARTITION_BUDGET).unwrap();
        assert_eq!(r.m.value().unwrap(), 625);
        assert_eq!(brute_table(&delta, 10_000)[&5], 625);
        let r = min_preimage(&delta, 25, DEFAULT_PARTITION_BUDGET).unwrap();
        assert_eq!(r.m, fz(&[(5, 4), (13, 4)]));
        assert!(cmp_factored(&fz(&[(5, 24)]), &r.m) == Ordering::Greater);
    }

    #[test]
    fn domain_errors() {
        let delta = rule_for_discriminant(-4).unwrap();
        assert!(matches!(
            min_preimage(&delta, 1, 100),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            min_preimage(&delta, 6, 100),
            Err(Error::Domain(_))
        ));
        // d(n²) only takes odd values
        let d2 = rule_divisor_power(2).unwrap();
        assert!(matches!(min_preimage(&d2, 4, 100), Err(Error::Domain(_))));
        // d(6²) = d(36) = 9
        assert_eq!(min_preimage(&d2, 9, 100).unwrap().m.value().unwrap(), 6);
    }

    #[test]
    fn budget_is_enforced() {
        let d = rule_divisor_power(1).unwrap();
        assert!(matches!(
            min_preimage(&d, 2 * 3 * 5 * 7 * 11 * 13, 10),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn exact_comparison() {
        // 2^10 = 1024 vs 3^6 = 729 vs 1025 = 5²·41
        assert_eq!(
            cmp_factored(&fz(&[(2, 10)]), &fz(&[(3, 6)])),
            Ordering::Greater
        );
        assert_eq!(
            cmp_factored(&fz(&[(2, 10)]), &fz(&[(5, 2), (41, 1)])),
            Ordering::Less
        );
        // values far beyond 64 bits
        assert_eq!(
            cmp_factored(&fz(&[(2, 200), (3, 1)]), &fz(&[(2, 199), (5, 1)])),
            Ordering::Greater
        );
    }

    #[test]
    fn agrees_with_brute_force_small() {
        for rule in [
            rule_divisor_power(1).unwrap(),
            rule_for_discriminant(-4).unwrap(),
        ] {
            let brute = brute_table(&rule, 200_000);
            for e in preimage_table(&rule, 120, DEFAULT_PARTITION_BUDGET).unwrap() {
                match brute.get(&e.target) {
                    Some(&m) => assert_eq!(e.m.value().unwrap(), m, "{} N={}", rule.name, e.target),
                    None => assert!(e.m.ln() > (200_000f64).ln()),
                }
            }
        }
    }

    #[test]
    fn structure_small_tables() {
        let d = rule_divisor_power(1).unwrap();
        let t = preimage_table(&d, 200, DEFAULT_PARTITION_BUDGET).unwrap();
        let rep = check_preimage_structure(&d, &t, 1..=6, 1.0).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.divisor_pairs_checked > 0);

        let delta = rule_for_discriminant(-4).unwrap();
        let t = preimage_table(&delta, 200, DEFAULT_PARTITION_BUDGET).unwrap();
        assert!(t.iter().all(|e| delta.in_q_monoid(&factorize(e.target))));
        let rep = check_preimage_structure(&delta, &t, 1..=6, 1.0).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn structure_single_prime_is_vacuous() {
        let d = rule_divisor_power(1).unwrap();
        let t = vec![min_preimage(&d, 7, 100).unwrap()];
        let rep = check_preimage_structure(&d, &t, 1..=3, 1.0).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.divisor_pairs_checked, 0);
    }

    #[test]
    fn structure_flags_corrupted_entries() {
        let d = rule_divisor_power(1).unwrap();
        let mut t = preimage_table(&d, 16, DEFAULT_PARTITION_BUDGET).unwrap();
        // pretend m_8 were 2·3·5·7 (f = 16, not 8) and larger than m_16 = 120
        let e8 = t.iter_mut().find(|e| e.target == 8).unwrap();
        e8.m = fz(&[(2, 1), (3, 1), (5, 1), (7, 1)]);
        e8.exponents = vec![1, 1, 1, 1];
        let rep = check_preimage_structure(&d, &t, 1..=1, 1.0).unwrap();
        assert!(rep.structure.contains(&8));
        assert!(rep.divisor.contains(&(8, 16)));
    }
}
