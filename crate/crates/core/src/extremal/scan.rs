// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;

use crate::arith::{self, SpfTable};
use crate::error::{Error, Result};
use crate::forms::chunk_ranges;
use crate::mfunc::MultiplicativeRule;

pub const DEFAULT_SCAN_CAP: u64 = 100_000_000;
const CHUNK: u64 = 1 << 16;

/// `max_{n<=x} f(f(n))` with every maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxRecord {
    pub x: u64,
    pub max_value: u64,
    pub argmax: Vec<u64>,
}

impl MaxRecord {
    /// `M(x) = log max f(f(n))`.
    pub fn ln_max(&self) -> f64 {
        (self.max_value as f64).ln()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    /// Worker count; `0` uses the ambient rayon pool.
    pub threads: usize,
    pub cap: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            threads: 0,
            cap: DEFAULT_SCAN_CAP,
        }
    }
}

fn scan_chunk(
    rule: &MultiplicativeRule,
    table: Option<&SpfTable>,
    lo: u64,
    hi: u64,
) -> Result<(u64, Vec<u64>)> {
    let mut best = 0u64;
    let mut argmax = Vec::new();
    for n in lo..=hi {
        let v = rule.eval_iterated(n, table)?;
        if v > best {
            best = v;
            argmax.clear();
            argmax.push(n);
        } else if v == best {
            argmax.push(n);
        }
    }
    Ok((best, argmax))
}

/// Exhaustive scan of `f(f(n))` over `1 <= n <= x`.
///
/// The range is cut into fixed chunks, so the result does not depend on the
/// number of workers.
pub fn scan_max(rule: &MultiplicativeRule, x: u64, opts: ScanOptions) -> Result<MaxRecord> {
    if x == 0 {
        return Err(Error::Domain("scan_max requires x >= 1".into()));
    }
    if x > opts.cap {
        return Err(Error::Capacity {
            what: "scan range",
            limit: opts.cap,
            requested: x,
        });
    }
    let run = || -> Result<MaxRecord> {
        let table = if x >= 2 {
            Some(arith::sieve_spf_capped(x, opts.cap.max(2))?)
        } else {
            None
        };
        let table = table.as_ref();
        let parts: Vec<Result<(u64, Vec<u64>)>> = chunk_ranges(1, x, CHUNK)
            .into_par_iter()
            .map(|(lo, hi)| scan_chunk(rule, table, lo, hi))
            .collect();
        let mut best = 0u64;
        let mut argmax = Vec::new();
        for part in parts {
            let (v, ns) = part?;
            if v > best {
                best = v;
                argmax = ns;
            } else if v == best {
                argmax.extend(ns);
            }
        }
        Ok(MaxRecord {
            x,
            max_value: best,
            argmax,
        })
    };
    if opts.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?
            .install(run)
    }
}
