// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. Every result is one flat record, written as a json
//! line or a csv row; errors go to stderr as records of the same shape.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::arith::{self, Factorization};
use crate::audit::{audit, AuditConfig};
use crate::error::{Error, Result};
use crate::extremal::{
    build_witness, constant_c, min_preimage, scan_max, ScanOptions, DEFAULT_PARTITION_BUDGET,
    DEFAULT_SCAN_CAP,
};
use crate::fields::{nth_split_prime_capped, split_prime_count, QuadraticFieldSpec};
use crate::forms::{class_number_one_forms, crosscheck_range, CrosscheckReport, FormSpec};
use crate::mfunc::{
    rule_divisor_power, rule_for_discriminant, Classifier, Extension, GSpec, MultiplicativeRule,
    OffQRule,
};
use crate::record::{csv_cell, to_json_line, Field, Record};

pub const THREADS_ENV: &str = "MAXORDER_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    JsonLines,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "maxorder",
    version,
    about = "Maximal orders of iterated multiplicative functions"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json-lines", global = true)]
    format: Format,

    /// Worker threads for scans; 0 picks one per core.
    #[arg(long, env = THREADS_ENV, default_value_t = 0, global = true)]
    threads: usize,

    /// Largest range that a sieve-backed scan may cover.
    #[arg(long, default_value_t = DEFAULT_SCAN_CAP, global = true)]
    scan_cap: u64,

    /// Largest prime examined when listing primes of Q.
    #[arg(long, default_value_t = arith::DEFAULT_SIEVE_CAP, global = true)]
    search_cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RuleArg {
    /// divisor:ALPHA, field:DISCRIMINANT or synthetic:PATH
    #[arg(long)]
    rule: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// f(n)
    Eval {
        #[command(flatten)]
        rule: RuleArg,
        n: u64,
    },
    /// f(n) and f(f(n))
    Iter {
        #[command(flatten)]
        rule: RuleArg,
        n: u64,
    },
    /// max f(f(n)) over 1 <= n <= x, with every maximizer
    ScanMax {
        #[command(flatten)]
        rule: RuleArg,
        x: u64,
    },
    /// least m with f(m) = N
    MinPreimage {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(value_name = "N")]
        target: u64,
        /// Cap on the number of multiplicative partitions examined.
        #[arg(long, default_value_t = DEFAULT_PARTITION_BUDGET)]
        budget: u64,
    },
    /// explicit integer with large f(f(n)) for the scale x
    Witness {
        #[command(flatten)]
        rule: RuleArg,
        x: f64,
        /// Read X as ln x.
        #[arg(long)]
        ln_x: bool,
        /// Constant in eps = c_e log log log x / log log x.
        #[arg(long, default_value_t = 1.0)]
        c_e: f64,
    },
    /// the series constant C_g
    Constant {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// number of split primes up to x against li(x)/2
    SplitCount {
        #[arg(allow_negative_numbers = true)]
        discriminant: i64,
        x: u64,
    },
    /// j-th split prime
    NthSplit {
        #[arg(allow_negative_numbers = true)]
        discriminant: i64,
        j: usize,
    },
    /// compare normalized representation counts of a form with a rule on [1, limit]
    FormsCheck {
        /// Preset name, "a,b,c/normalizer" (append + for the sector count), or "all".
        form: String,
        limit: u64,
        /// Defaults to the field rule of the form's discriminant.
        #[arg(long)]
        rule: Option<String>,
    },
    /// finite-range check of the seven hypotheses on (Q, g)
    Audit {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long, default_value_t = 1_000)]
        j_min: u64,
        #[arg(long, default_value_t = 10_000)]
        j_max: u64,
        #[arg(long, default_value_t = 10_000)]
        nu_max: u64,
        #[arg(long, default_value_t = 10_000)]
        ab_budget: u64,
        #[arg(long, default_value_t = 1e6)]
        c_f_cap: f64,
    },
}

/// Streams records in one format. The csv header is written once, from the
/// first record.
pub struct Emitter<W: Write> {
    format: Format,
    out: W,
    header: Option<Vec<String>>,
}

impl<W: Write> Emitter<W> {
    pub fn new(format: Format, out: W) -> Self {
        Self {
            format,
            out,
            header: None,
        }
    }

    pub fn emit(&mut self, rec: &Record) -> std::io::Result<()> {
        match self.format {
            Format::JsonLines => writeln!(self.out, "{}", to_json_line(rec)),
            Format::Csv => {
                let names: Vec<String> = rec.header().iter().map(|s| s.to_string()).collect();
                let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
                if self.header.is_none() {
                    w.write_record(&names)?;
                    self.header = Some(names);
                }
                w.write_record(rec.fields.iter().map(|(_, v)| csv_cell(v)))?;
                let bytes = w.into_inner().map_err(|e| e.into_error())?;
                self.out.write_all(&bytes)
            }
        }
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Validation(_) | Error::Integrity(_) => 2,
        Error::Capacity { .. } | Error::Overflow(_) => 3,
    }
}

fn error_record(kind: &str, message: &str) -> Record {
    Record::new().with("error", kind).with("message", message)
}

fn exact(v: BigUint) -> Field {
    match u64::try_from(&v) {
        Ok(small) => small.into(),
        Err(_) => Field::Digits(v.to_string()),
    }
}

fn factored(f: &Factorization) -> Field {
    exact(f.big_value())
}

/// Parse `divisor:α`, `field:Δ` or `synthetic:path`.
pub fn parse_rule(selector: &str) -> Result<MultiplicativeRule> {
    let (kind, arg) = selector.split_once(':').ok_or_else(|| {
        Error::Validation(format!(
            "rule '{selector}' is not of the form divisor:A, field:D or synthetic:PATH"
        ))
    })?;
    match kind {
        "divisor" => rule_divisor_power(parse_num(arg, "alpha")?),
        "field" => rule_for_discriminant(parse_num(arg, "discriminant")?),
        "synthetic" => {
            let text = std::fs::read_to_string(arg)
                .map_err(|e| Error::Validation(format!("cannot read rule file {arg}: {e}")))?;
            parse_rule_spec(&text)
        }
        _ => Err(Error::Validation(format!("unknown rule kind '{kind}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad {what}: '{}'", s.trim())))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',').map(|x| parse_num(x, what)).collect()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Parse a synthetic rule description (see the README for the grammar).
pub fn parse_rule_spec(text: &str) -> Result<MultiplicativeRule> {
    let mut name = None;
    let mut q = None;
    let mut off = OffQRule::One;
    let mut g = None;
    let mut kappa = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Validation(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let value = value.trim();
        match key.trim() {
            "name" => name = Some(value.to_string()),
            "q" => q = Some(value.to_string()),
            "offq" => {
                off = match value {
                    "one" => OffQRule::One,
                    "parity" => OffQRule::Parity,
                    "zero" => OffQRule::Zero,
                    _ => {
                        return Err(Error::Validation(format!(
                            "line {}: offq must be one, parity or zero",
                            lineno + 1
                        )))
                    }
                }
            }
            "g" => g = Some(parse_g(value)?),
            "kappa" => kappa = Some(parse_num::<f64>(value, "kappa")?),
            other => {
                return Err(Error::Validation(format!(
                    "line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    let q = q.ok_or_else(|| Error::Validation("rule file has no 'q' line".into()))?;
    let g = g.ok_or_else(|| Error::Validation("rule file has no 'g' line".into()))?;
    let (classifier, default_kappa) = parse_q(&q, off)?;
    Ok(MultiplicativeRule {
        name: name.unwrap_or_else(|| "synthetic".into()),
        classifier,
        g,
        kappa_hint: kappa.unwrap_or(default_kappa),
    })
}

fn parse_q(q: &str, off: OffQRule) -> Result<(Classifier, f64)> {
    if q == "all" {
        return Ok((Classifier::AllPrimes, 1.0));
    }
    if let Some(d) = q.strip_prefix("field") {
        let spec = QuadraticFieldSpec::new(parse_num(d, "discriminant")?)?;
        return Ok((Classifier::Field(spec), 2.0));
    }
    if let Some(rest) = q.strip_prefix("mod") {
        let (m, rs) = rest
            .split_once(':')
            .ok_or_else(|| Error::Validation("expected 'q = mod M: r1,r2,...'".into()))?;
        let modulus: u64 = parse_num(m, "modulus")?;
        if modulus == 0 {
            return Err(Error::Validation("modulus must be positive".into()));
        }
        let mut residues: Vec<u64> = parse_list(rs, "residue")?;
        residues.iter_mut().for_each(|r| *r %= modulus);
        residues.sort_unstable();
        residues.dedup();
        let phi = (1..=modulus).filter(|&r| gcd(r, modulus) == 1).count() as f64;
        let units = residues.iter().filter(|&&r| gcd(r, modulus) == 1).count();
        if units == 0 {
            return Err(Error::Validation(
                "no residue class in q is coprime to the modulus, so Q is finite".into(),
            ));
        }
        return Ok((
            Classifier::Congruence {
                modulus,
                residues,
                off,
            },
            phi / units as f64,
        ));
    }
    if let Some(list) = q.strip_prefix("list") {
        let list = list.trim_start().strip_prefix(':').unwrap_or(list);
        let mut primes: Vec<u64> = parse_list(list, "prime")?;
        if let Some(&p) = primes.iter().find(|&&p| !arith::is_prime(p)) {
            return Err(Error::Validation(format!("{p} is not prime")));
        }
        primes.sort_unstable();
        primes.dedup();
        return Ok((Classifier::Explicit { primes, off }, 1.0));
    }
    Err(Error::Validation(format!("cannot parse q = '{q}'")))
}

fn parse_g(value: &str) -> Result<GSpec> {
    if let Some(a) = value.strip_prefix("affine") {
        return GSpec::affine(parse_num(a, "alpha")?);
    }
    if let Some(rest) = value.strip_prefix("table") {
        let (vals, ext) = rest.split_once(';').ok_or_else(|| {
            Error::Validation("expected 'g = table V0,V1,... ; extend ...'".into())
        })?;
        let values: Vec<u64> = parse_list(vals, "table value")?;
        let ext = ext.trim();
        let ext = ext
            .strip_prefix("extend")
            .ok_or_else(|| {
                Error::Validation("expected 'extend affine S I' or 'extend geometric R'".into())
            })?
            .trim();
        let words: Vec<&str> = ext.split_whitespace().collect();
        let extension = match words.as_slice() {
            ["affine", s, i] => Extension::Affine {
                slope: parse_num(s, "slope")?,
                intercept: parse_num(i, "intercept")?,
            },
            ["geometric", r] => Extension::Geometric {
                ratio: parse_num(r, "ratio")?,
            },
            _ => {
                return Err(Error::Validation(format!("cannot parse extension '{ext}'")));
            }
        };
        return GSpec::table(values, extension);
    }
    Err(Error::Validation(format!("cannot parse g = '{value}'")))
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if threads == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?
        .install(f)
}

fn crosscheck_record(rep: &CrosscheckReport) -> Record {
    let first: Vec<u64> = rep.mismatches.iter().take(10).map(|m| m.n).collect();
    Record::new()
        .with("form", rep.form.to_string())
        .with("rule", rep.rule.clone())
        .with("limit", rep.limit)
        .with("mismatches", rep.mismatches.len())
        .with("passed", rep.passed())
        .with("first_mismatches", first)
}

fn execute(cli: &Cli) -> Result<Vec<Record>> {
    let rule_of = |r: &RuleArg| parse_rule(&r.rule);
    Ok(match &cli.command {
        Command::Eval { rule, n } => {
            let rule = rule_of(rule)?;
            if *n == 0 {
                return Err(Error::Domain("n must be positive".into()));
            }
            vec![Record::new()
                .with("n", *n)
                .with("f", rule.eval_int(*n, None)?)
                .with("rule", rule.name)]
        }
        Command::Iter { rule, n } => {
            let rule = rule_of(rule)?;
            if *n == 0 {
                return Err(Error::Domain("n must be positive".into()));
            }
            let f = rule.eval_int(*n, None)?;
            vec![Record::new()
                .with("n", *n)
                .with("f", f)
                .with("ffn", rule.eval_int(f, None)?)
                .with("rule", rule.name)]
        }
        Command::ScanMax { rule, x } => {
            let rule = rule_of(rule)?;
            let r = scan_max(
                &rule,
                *x,
                ScanOptions {
                    threads: cli.threads,
                    cap: cli.scan_cap,
                },
            )?;
            vec![Record::new()
                .with("rule", rule.name)
                .with("x", r.x)
                .with("max_value", r.max_value)
                .with("ln_max", r.ln_max())
                .with("argmax", r.argmax)]
        }
        Command::MinPreimage {
            rule,
            target,
            budget,
        } => {
            let rule = rule_of(rule)?;
            let r = min_preimage(&rule, *target, *budget)?;
            vec![Record::new()
                .with("N", r.target)
                .with("m", factored(&r.m))
                .with("exponents", r.exponents)
                .with("factorization", r.m.to_string())
                .with("partitions_examined", r.partitions_examined)
                .with("rule", rule.name)]
        }
        Command::Witness { rule, x, ln_x, c_e } => {
            let rule = rule_of(rule)?;
            let l = if *ln_x {
                *x
            } else {
                if !(*x > 1.0) || !x.is_finite() {
                    return Err(Error::Domain(format!(
                        "x must be a finite number > 1, got {x}"
                    )));
                }
                x.ln()
            };
            let w = build_witness(&rule, l, *c_e)?;
            let ffn =
                w.nu.iter()
                    .map(|&v| BigUint::from(rule.g.eval(v).expect("small exponent")))
                    .product::<BigUint>();
            vec![Record::new()
                .with("rule", rule.name)
                .with("ln_x", w.ln_x)
                .with("c_e", w.c_e)
                .with("epsilon", w.epsilon)
                .with("c_g", w.c_g)
                .with("t", w.t)
                .with("nu", w.nu)
                .with("log_n", w.log_n)
                .with("log_ffn", w.log_ffn)
                .with("ffn", exact(ffn))
                .with("ratio", w.ratio)
                .with("y_counts", w.y_counts)
                .with("y_closed_form", w.y_closed_form)
                .with("f_n", w.fn_factorization.to_string())
                .with("n", w.n_factorization.to_string())]
        }
        Command::Constant { rule, tol } => {
            let rule = rule_of(rule)?;
            let c = constant_c(&rule.g, *tol)?;
            vec![Record::new()
                .with("rule", rule.name)
                .with("value", c.value)
                .with("tail_bound", c.tail_bound)
                .with("lower", c.lower)
                .with("upper", c.upper)
                .with("terms_used", c.terms_used)]
        }
        Command::SplitCount { discriminant, x } => {
            let spec = QuadraticFieldSpec::new(*discriminant)?;
            let (count, half_li) = split_prime_count(&spec, *x)?;
            vec![Record::new()
                .with("discriminant", *discriminant)
                .with("x", *x)
                .with("count", count)
                .with("li_half", half_li)
                .with("ratio", count as f64 / half_li)]
        }
        Command::NthSplit { discriminant, j } => {
            let spec = QuadraticFieldSpec::new(*discriminant)?;
            vec![Record::new()
                .with("discriminant", *discriminant)
                .with("j", *j)
                .with("prime", nth_split_prime_capped(&spec, *j, cli.search_cap)?)]
        }
        Command::FormsCheck { form, limit, rule } => {
            let forms: Vec<FormSpec> = if form == "all" {
                class_number_one_forms()
                    .into_iter()
                    .map(|(_, f, _)| f)
                    .collect()
            } else {
                vec![FormSpec::preset(form).map_or_else(|| form.parse(), Ok)?]
            };
            let fixed = rule.as_deref().map(parse_rule).transpose()?;
            let mut out = Vec::new();
            for f in forms {
                let r = match &fixed {
                    Some(r) => r.clone(),
                    None => rule_for_discriminant(f.discriminant())?,
                };
                let rep = with_pool(cli.threads, || crosscheck_range(&f, &r, *limit))?;
                out.push(crosscheck_record(&rep));
            }
            out
        }
        Command::Audit {
            rule,
            j_min,
            j_max,
            nu_max,
            ab_budget,
            c_f_cap,
        } => {
            let rule = rule_of(rule)?;
            let cfg = AuditConfig {
                j_range: (*j_min, *j_max),
                nu_range: (1, *nu_max),
                ab_budget: *ab_budget,
                c_f_cap: *c_f_cap,
                prime_search_cap: cli.search_cap,
            };
            let rep = audit(&rule, &cfg)?;
            rep.records.iter().map(|r| r.to_record(&rep.rule)).collect()
        }
    })
}

/// Run with explicit output streams; returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            let _ = writeln!(err, "{}", to_json_line(&error_record("usage", first)));
            return 1;
        }
    };
    let mut emitter = Emitter::new(cli.format, out);
    match execute(&cli) {
        Ok(records) => {
            for r in &records {
                if let Err(e) = emitter.emit(r) {
                    let _ = writeln!(err, "{}", to_json_line(&error_record("io", &e.to_string())));
                    return 1;
                }
            }
            let _ = emitter.flush();
            0
        }
        Err(e) => {
            let rec = error_record(e.kind(), &e.to_string());
            let mut errs = Emitter::new(cli.format, err);
            let _ = errs.emit(&rec);
            exit_code(&e)
        }
    }
}

/// Run against the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run_with(args, &mut out, &mut err)
}
