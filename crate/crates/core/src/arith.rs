// SPDX-License-Identifier: Apache-2.0

//! Exact integer arithmetic: smallest-prime-factor sieve, factorization,
//! deterministic 64-bit primality, the Kronecker symbol and the Ω/ω counts.

use std::fmt;

use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`sieve_spf`] unless a caller passes its own cap.
pub const DEFAULT_SIEVE_CAP: u64 = 100_000_000;

/// A positive integer as a list of `(prime, exponent)` pairs with strictly
/// increasing primes. The empty list is `1`.
///
/// The value itself need not fit in 64 bits (minimal preimages and witnesses
/// are only ever handled in factored form); [`Factorization::value`] is checked.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Factorization {
    entries: Vec<(u64, u64)>,
}

impl Factorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Build from pairs, validating primality, ordering and exponents.
    pub fn from_pairs(pairs: Vec<(u64, u64)>) -> Result<Self> {
        for w in pairs.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Validation(format!(
                    "primes must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(p, e) in &pairs {
            if !is_prime(p) {
                return Err(Error::Validation(format!("{p} is not prime")));
            }
            if e == 0 {
                return Err(Error::Validation(format!("zero exponent on {p}")));
            }
        }
        Ok(Self { entries: pairs })
    }

    /// Build from arbitrary (possibly repeated, unsorted) prime powers.
    /// Primality is the caller's responsibility and is only debug-checked.
    pub fn from_prime_powers<I: IntoIterator<Item = (u64, u64)>>(powers: I) -> Self {
        let mut v: Vec<(u64, u64)> = powers.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable();
        let mut entries: Vec<(u64, u64)> = Vec::with_capacity(v.len());
        for (p, e) in v {
            debug_assert!(is_prime(p));
            match entries.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => entries.push((p, e)),
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn is_one(&self) -> bool {
        self.entries.is_empty()
    }

    /// p-adic valuation.
    pub fn valuation(&self, p: u64) -> u64 {
        self.entries
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// The integer itself, or an overflow error if it exceeds `u64`.
    pub fn value(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for &(p, e) in &self.entries {
            let e32 = u32::try_from(e)
                .map_err(|_| Error::Overflow(format!("{p}^{e} exceeds 64 bits")))?;
            let pe = p
                .checked_pow(e32)
                .ok_or_else(|| Error::Overflow(format!("{p}^{e} exceeds 64 bits")))?;
            acc = acc
                .checked_mul(pe)
                .ok_or_else(|| Error::Overflow(format!("{self} exceeds 64 bits")))?;
        }
        Ok(acc)
    }

    /// Natural logarithm of the value.
    /// The exact value, of any size.
    pub fn big_value(&self) -> num_bigint::BigUint {
        self.entries
            .iter()
            .fold(num_bigint::BigUint::from(1u32), |acc, &(p, e)| {
                acc * num_bigint::BigUint::from(p).pow(u32::try_from(e).expect("exponent fits u32"))
            })
    }

    pub fn ln(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(p, e)| e as f64 * (p as f64).ln())
            .sum()
    }

    /// Product of two factorizations.
    pub fn mul(&self, other: &Factorization) -> Factorization {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Factorization { entries: out }
    }

    /// `(Ω, ω)`: number of prime factors with and without multiplicity.
    pub fn omega_counts(&self) -> (u64, u64) {
        omega_counts(self)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// `(Ω(n), ω(n))` for a factored `n`.
pub fn omega_counts(f: &Factorization) -> (u64, u64) {
    let big = f.entries.iter().map(|&(_, e)| e).sum();
    (big, f.entries.len() as u64)
}

/// Smallest-prime-factor table for `2 ..= limit`. Immutable once built.
#[derive(Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl fmt::Debug for SpfTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpfTable")
            .field("limit", &self.limit)
            .finish()
    }
}

/// Sieve smallest prime factors up to `limit` (capped at [`DEFAULT_SIEVE_CAP`]).
pub fn sieve_spf(limit: u64) -> Result<SpfTable> {
    sieve_spf_capped(limit, DEFAULT_SIEVE_CAP)
}

pub fn sieve_spf_capped(limit: u64, cap: u64) -> Result<SpfTable> {
    if limit < 2 || limit > cap || limit > u32::MAX as u64 {
        return Err(Error::Capacity {
            what: "smallest-prime-factor sieve",
            limit: cap.min(u32::MAX as u64),
            requested: limit,
        });
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    for x in (2..=n).step_by(2) {
        spf[x] = 2;
    }
    let mut i = 3usize;
    while i <= n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            if let Some(sq) = i.checked_mul(i) {
                let mut j = sq;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += 2 * i;
                }
            }
        }
        i += 2;
    }
    Ok(SpfTable { limit, spf })
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, for `2 <= n <= limit`.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            None
        } else {
            Some(self.spf[n as usize] as u64)
        }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n >= 2 && n <= self.limit {
            self.spf[n as usize] as u64 == n
        } else {
            is_prime(n)
        }
    }

    /// Factorize by table lookup, falling back to trial division beyond the limit.
    pub fn factorize(&self, n: u64) -> Factorization {
        if n > self.limit {
            return factorize(n);
        }
        let mut entries = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            entries.push((p as u64, e));
        }
        Factorization { entries }
    }
}

/// Factorize `n >= 1` by trial division, stopping as soon as the cofactor is prime.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut entries = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e > 0 {
            entries.push((p, e));
        }
    }
    // 2*3*5 wheel
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut k = 0;
    while m > 1 {
        if d.checked_mul(d).is_none_or(|sq| sq > m) || is_prime(m) {
            entries.push((m, 1));
            break;
        }
        let mut e = 0;
        while m.is_multiple_of(d) {
            m /= d;
            e += 1;
        }
        if e > 0 {
            entries.push((d, e));
        }
        d += STEPS[k];
        k = (k + 1) % 8;
    }
    Factorization { entries }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // Sinclair's bases are a deterministic witness set below 2^64.
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= limit` in increasing order.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = vec![2u64];
    let mut i = 3usize;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            if let Some(sq) = i.checked_mul(i) {
                let mut j = sq;
                while j <= n {
                    composite[j] = true;
                    j += 2 * i;
                }
            }
        }
        i += 2;
    }
    out
}

/// The first `count` primes satisfying `keep`, sieving with a doubling bound.
/// Fails with a capacity error carrying the last bound tried once `cap` is reached.
pub fn first_primes_where<F: Fn(u64) -> bool>(count: usize, keep: F, cap: u64) -> Result<Vec<u64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut bound = ((count as f64) * ((count as f64).ln().max(1.0) + 3.0) * 2.5) as u64 + 100;
    loop {
        let bound_now = bound.min(cap);
        let found: Vec<u64> = primes_up_to(bound_now)
            .into_iter()
            .filter(|&p| keep(p))
            .take(count)
            .collect();
        if found.len() == count {
            return Ok(found);
        }
        if bound_now >= cap {
            return Err(Error::Capacity {
                what: "prime search bound",
                limit: cap,
                requested: count as u64,
            });
        }
        bound = bound.saturating_mul(2);
    }
}

/// Floor square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Kronecker symbol `(delta / n)` for `n >= 1`.
pub fn kronecker(delta: i64, n: u64) -> i8 {
    assert!(n >= 1, "kronecker requires n >= 1");
    let mut result: i8 = 1;
    let mut n = n;
    let tz = n.trailing_zeros();
    if tz > 0 {
        if delta % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 && matches!(delta.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= tz;
    }
    if n == 1 {
        return result;
    }
    let a = (delta as i128).rem_euclid(n as i128) as u64;
    result * jacobi(a, n)
}

/// Jacobi symbol `(a / n)` for odd `n`.
fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut t: i8 = 1;
    a %= n;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}
