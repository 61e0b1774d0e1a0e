//! The `es-lab` command line.

use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::arith::Natural;
use crate::egyptian::{min_class_capped, two_term_all, Decomposition, DEFAULT_CLASS_CAP};
use crate::harness::{
    check_single, family_distribution, verify_range_with, RangeJob, RunOptions, SieveSkip, DEFAULT_CHUNK,
};
use crate::identities::{
    search_extended_identity, search_simple_identity, verify_identity, Catalog, IdentityStatus, ThreeTermIdentity,
};
use crate::sieve::{classify_residues, intersect_excepted, remove_identity_covered, run_plan, ExceptedSet, SievePlan};

#[derive(Debug, Parser)]
#[command(name = "es-lab", version, about = "Unit-fraction decompositions of 4/n and covering sieves")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write m/n as unit fractions.
    Decompose {
        #[arg(value_parser = parse_natural)]
        n: Natural,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
        terms: u8,
        /// Numerator m (two-term mode).
        #[arg(long, default_value_t = 4)]
        numerator: u64,
        /// List every two-term representation.
        #[arg(long)]
        all: bool,
    },
    /// Smallest class index of n with its witness.
    MinClass {
        #[arg(value_parser = parse_natural)]
        n: Natural,
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        max_class: u32,
    },
    /// Polynomial identity catalog and search.
    #[command(subcommand)]
    Identity(IdentityCommand),
    /// Modular covering sieve.
    #[command(subcommand)]
    Sieve(SieveCommand),
    /// Solve every n (or prime) in a range.
    Verify(VerifyArgs),
    /// Class histogram of P·s + σ.
    FamilyStats {
        p: u64,
        sigma: u64,
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        max_class: u32,
        #[arg(long)]
        primes_only: bool,
    },
    /// Solve a single n with timing.
    Check {
        #[arg(value_parser = parse_natural)]
        n: Natural,
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        max_class: u32,
    },
}

#[derive(Debug, Subcommand)]
enum IdentityCommand {
    /// Catalog entries and their status.
    List,
    /// Check one entry, or every entry.
    Verify { name: Option<String> },
    /// Simple template over offsets j <= max-offset.
    Search {
        p: u64,
        sigma: u64,
        #[arg(long, default_value_t = 10)]
        max_offset: u64,
    },
    /// Simple and extended templates.
    SearchExt {
        p: u64,
        sigma: u64,
        #[arg(long, default_value_t = 50)]
        max_offset: u64,
        #[arg(long, default_value_t = 2000)]
        coeff_bound: u64,
    },
}

#[derive(Debug, Args)]
struct SetSource {
    /// Built-in plan name or @file.json; repeat to intersect.
    #[arg(long)]
    plan: Vec<String>,
    /// Excepted set file, JSON or text.
    #[arg(long)]
    set: Vec<PathBuf>,
    /// Drop residues covered by three-term identities.
    #[arg(long)]
    remove_identities: bool,
}

#[derive(Debug, Subcommand)]
enum SieveCommand {
    /// Excepted residues of a plan.
    Run {
        #[arg(long)]
        plan: String,
    },
    /// Intersection of excepted sets.
    Intersect(SetSource),
    /// Squares, primes, and other residues of an excepted set.
    Classify(SetSource),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    from: u64,
    /// Exclusive upper bound.
    #[arg(long)]
    to: u64,
    #[arg(long)]
    primes_only: bool,
    #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
    max_class: u32,
    /// Fast-path primes outside this plan's excepted set.
    #[arg(long)]
    plan: Option<String>,
    /// Worker threads, 0 = all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk_size: u64,
}

fn parse_natural(s: &str) -> Result<Natural, String> {
    s.parse().map_err(|_| format!("{s:?} is not a non-negative integer"))
}

/// Small values as JSON numbers, the rest as decimal strings.
fn num(n: &Natural) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn denominators(d: &Decomposition) -> Value {
    Value::Array(d.denominators().iter().map(num).collect())
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Parses `args` (program name first) and executes. Returns 0 on success,
/// 1 for a counterexample or invalid identity, 2 for usage and input errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let progress = std::io::stderr().is_terminal();
    match dispatch(&cli, out, err, progress) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write, progress: bool) -> Result<i32> {
    let json = cli.json;
    match &cli.command {
        Command::Decompose { n, terms, numerator, all } => decompose(out, json, n, *terms, *numerator, *all),
        Command::MinClass { n, max_class } => {
            let (class, d) = min_class_capped(n, *max_class)?;
            if json {
                print_json(out, &json!({"n": num(n), "class": class.0, "denominators": denominators(&d)}))?;
            } else {
                writeln!(out, "{class} {d}")?;
            }
            Ok(0)
        }
        Command::Identity(c) => identity(out, json, c),
        Command::Sieve(c) => sieve(out, json, c),
        Command::Verify(a) => verify(out, err, json, a, progress),
        Command::FamilyStats { p, sigma, from, to, max_class, primes_only } => {
            let h = family_distribution(*p, *sigma, *from, *to, *max_class, *primes_only)?;
            if json {
                print_json(out, &serde_json::to_value(&h)?)?;
            } else {
                let which = if *primes_only { "primes" } else { "members" };
                writeln!(out, "{which} of {p}s+{sigma}, s = {from}..={to}, cap C_{max_class}")?;
                writeln!(out, "class\tcount\tshare%")?;
                for c in &h.counts {
                    writeln!(out, "C_{}\t{}\t{}", c.class, c.count, c.share)?;
                }
                writeln!(out, "exceptions: {}", h.exceptions.len())?;
            }
            Ok(if h.exceptions.is_empty() { 0 } else { 1 })
        }
        Command::Check { n, max_class } => match check_single(n, *max_class) {
            Ok(r) => {
                let ms = r.elapsed.as_secs_f64() * 1e3;
                if json {
                    print_json(
                        out,
                        &json!({"n": num(n), "class": r.class.0, "denominators": denominators(&r.decomposition), "elapsed_ms": ms}),
                    )?;
                } else {
                    writeln!(out, "{n}: {} {} in {ms:.3} ms", r.class, r.decomposition)?;
                }
                Ok(0)
            }
            Err(crate::harness::HarnessError::Egyptian(e @ crate::egyptian::EgyptianError::ClassCapExceeded { .. })) => {
                if json {
                    print_json(out, &json!({"n": num(n), "class": Value::Null, "error": e.to_string()}))?;
                } else {
                    writeln!(out, "{e}")?;
                }
                Ok(1)
            }
            Err(e) => Err(e.into()),
        },
    }
}

fn decompose(out: &mut dyn Write, json: bool, n: &Natural, terms: u8, m: u64, all: bool) -> Result<i32> {
    if terms == 3 {
        if all || m != 4 {
            bail!("--all and --numerator apply to --terms 2");
        }
        let (class, d) = min_class_capped(n, u32::MAX)?;
        if json {
            print_json(out, &json!({"n": num(n), "class": class.0, "denominators": denominators(&d)}))?;
        } else {
            writeln!(out, "4/{n} = {}", d.denominators().iter().map(|x| format!("1/{x}")).collect::<Vec<_>>().join(" + "))?;
        }
        return Ok(0);
    }
    let mut pairs = two_term_all(&Natural::from(m), n)?;
    if !all {
        pairs.truncate(1);
    }
    if json {
        let list: Vec<Value> = pairs.iter().map(|(a, b)| json!([num(a), num(b)])).collect();
        print_json(out, &json!({"n": num(n), "numerator": m, "pairs": list}))?;
    } else if pairs.is_empty() {
        writeln!(out, "{m}/{n} has no two-term representation")?;
    } else {
        for (a, b) in &pairs {
            writeln!(out, "{m}/{n} = 1/{a} + 1/{b}")?;
        }
    }
    Ok(0)
}

fn identity(out: &mut dyn Write, json: bool, c: &IdentityCommand) -> Result<i32> {
    let catalog = Catalog::builtin();
    match c {
        IdentityCommand::List => {
            if json {
                writeln!(out, "{}", catalog.to_json())?;
            } else {
                for e in catalog.entries() {
                    writeln!(out, "{}\t{}\t{}", e.name, status_word(e.status), e.identity)?;
                }
            }
            Ok(0)
        }
        IdentityCommand::Verify { name } => {
            let entries: Vec<_> = match name {
                Some(n) => vec![catalog.get(n).ok_or_else(|| anyhow!("unknown identity {n:?}"))?],
                None => catalog.entries().iter().collect(),
            };
            let mut rows = Vec::new();
            let mut bad = false;
            for e in entries {
                let holds = verify_identity(&e.identity);
                // A single named entry that fails is a finding; in the full
                // listing only uncorrected failures are.
                bad |= if name.is_some() { !holds } else { e.status == IdentityStatus::Invalid };
                rows.push((e, holds));
            }
            if json {
                let list: Vec<Value> = rows
                    .iter()
                    .map(|(e, holds)| json!({"name": e.name, "holds": holds, "status": e.status, "corrected_by": e.corrected_by}))
                    .collect();
                print_json(out, &Value::Array(list))?;
            } else {
                for (e, holds) in &rows {
                    let fix = e.corrected_by.as_deref().map(|c| format!(" (see {c})")).unwrap_or_default();
                    writeln!(out, "{}\t{}\t{}{fix}", e.name, if *holds { "holds" } else { "FAILS" }, status_word(e.status))?;
                }
            }
            Ok(if bad { 1 } else { 0 })
        }
        IdentityCommand::Search { p, sigma, max_offset } => {
            print_identities(out, json, &search_simple_identity(*p, *sigma, *max_offset)?)
        }
        IdentityCommand::SearchExt { p, sigma, max_offset, coeff_bound } => {
            print_identities(out, json, &search_extended_identity(*p, *sigma, *max_offset, *coeff_bound)?)
        }
    }
}

fn status_word(s: IdentityStatus) -> &'static str {
    match s {
        IdentityStatus::Verified => "verified",
        IdentityStatus::PrintedFormInvalidCorrected => "printed-form-invalid-corrected",
        IdentityStatus::Invalid => "invalid",
    }
}

fn print_identities(out: &mut dyn Write, json: bool, ids: &[ThreeTermIdentity]) -> Result<i32> {
    if json {
        print_json(out, &serde_json::to_value(ids)?)?;
    } else {
        for id in ids {
            writeln!(out, "{}\t{id}", id.claimed_class)?;
        }
        if ids.is_empty() {
            writeln!(out, "no identities found")?;
        }
    }
    Ok(0)
}

fn load_sets(src: &SetSource, catalog: &Catalog) -> Result<ExceptedSet> {
    let mut sets = Vec::new();
    for p in &src.plan {
        sets.push(run_plan(&SievePlan::load(p)?, catalog)?);
    }
    for path in &src.set {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let set = if text.trim_start().starts_with('{') {
            ExceptedSet::from_json(&text)?
        } else {
            ExceptedSet::from_text(&text)?
        };
        sets.push(set);
    }
    let mut iter = sets.into_iter();
    let first = iter.next().ok_or_else(|| anyhow!("give at least one --plan or --set"))?;
    let mut acc = iter.try_fold(first, |a, b| intersect_excepted(&a, &b))?;
    if src.remove_identities {
        acc = remove_identity_covered(&acc, catalog)?.0;
    }
    Ok(acc)
}

fn print_set(out: &mut dyn Write, json: bool, s: &ExceptedSet) -> Result<()> {
    if json {
        writeln!(out, "{}", s.to_json())?;
    } else {
        writeln!(out, "mod {} ({} residues): {}", s.modulus, s.len(), join(&s.residues))?;
    }
    Ok(())
}

fn sieve(out: &mut dyn Write, json: bool, c: &SieveCommand) -> Result<i32> {
    let catalog = Catalog::builtin();
    match c {
        SieveCommand::Run { plan } => {
            let set = run_plan(&SievePlan::load(plan)?, &catalog)?;
            print_set(out, json, &set)?;
        }
        SieveCommand::Intersect(src) => print_set(out, json, &load_sets(src, &catalog)?)?,
        SieveCommand::Classify(src) => {
            let set = load_sets(src, &catalog)?;
            let c = classify_residues(&set);
            if json {
                print_json(out, &json!({"modulus": set.modulus, "provenance": set.provenance, "classification": c}))?;
            } else {
                writeln!(out, "squares ({}): {}", c.squares.len(), join(&c.squares))?;
                writeln!(out, "primes ({}): {}", c.primes.len(), join(&c.primes))?;
                writeln!(out, "composite non-squares ({}): {}", c.composite_nonsquare.len(), join(&c.composite_nonsquare))?;
            }
        }
    }
    Ok(0)
}

fn verify(out: &mut dyn Write, err: &mut dyn Write, json: bool, a: &VerifyArgs, progress: bool) -> Result<i32> {
    let mut job = RangeJob::new(a.from, a.to, a.primes_only, a.max_class).with_chunk_size(a.chunk_size);
    if let Some(plan) = &a.plan {
        job = job.with_skip(SieveSkip::from_plan(&SievePlan::load(plan)?, &Catalog::builtin())?);
    }
    let report_progress = |done: u64, total: u64| eprint!("\r{done}/{total} chunks");
    let opts = RunOptions {
        threads: a.threads,
        checkpoint: a.checkpoint.clone(),
        stop_after_chunks: None,
        progress: if progress { Some(&report_progress) } else { None },
    };
    let report = verify_range_with(&job, &opts)?;
    if progress {
        writeln!(err)?;
    }
    if let Some(path) = &a.csv {
        report.write_csv(path)?;
    }
    if json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        writeln!(out, "examined {} in [{}, {}), {} ms", report.examined, a.from, a.to, report.elapsed_ms)?;
        writeln!(out, "class\tcount\tshare%")?;
        for c in &report.counts {
            writeln!(out, "C_{}\t{}\t{}", c.class, c.count, c.share)?;
        }
        if let Some(fp) = &report.fast_path {
            writeln!(out, "fast path: {} primes in C_{} or below", fp.count, fp.class_bound)?;
            for (r, class, count) in &fp.identity_covered {
                writeln!(out, "fast path: {count} primes = {r} mod {} in C_{class}", job.sieve_skip.as_ref().map_or(0, |s| s.excepted.modulus))?;
            }
        }
        let firsts: Vec<String> = report.first_occurrences.iter().map(|f| format!("C_{}:{}", f.class, f.n)).collect();
        writeln!(out, "first occurrences: {}", firsts.join(" "))?;
        writeln!(out, "exceptions: {}", join(&report.exceptions))?;
    }
    Ok(if report.exceptions.is_empty() { 0 } else { 1 })
}
