//! `sumfactor`: sieve tables, Goldbach strata, relation checks and the
//! verification suite from the command line.
//!
//! Exit codes: 0 when every check passes (or only evidence was reported),
//! 1 when a claim fails verification, 2 on a configuration error.
//!
//! Set specs use the grammar of `sumfactor_core::intsets::SetSpec`:
//! `odd>=3`, `odd>=3 \ {9,15,21}`, `primes>=3`, `rough>=5`, `int>=2`,
//! `composites`, `strata(1)`, `{2,3,5}`, and unions with `|`.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sumfactor_core::collapse::{check_relation, k_partitions, Relation};
use sumfactor_core::finite_ring::{relation_table_csv, zm_relation_table};
use sumfactor_core::intsets::{SetContext, SetSpec};
use sumfactor_core::strata::compute_strata;
use sumfactor_core::suite::{run_suite, SuiteReport, DEFAULT_LIMIT};
use sumfactor_core::{CompositeIndex, Exec, PrimeTable, RelationVerdict, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "sumfactor", version, about = "Sum-factor collapse relations: sieve, strata, relation checks, finite rings")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "SUMFACTOR_THREADS")]
    threads: Option<usize>,
    /// Record per-check wall time in reports (breaks byte-identity).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prime and odd-composite counts up to a bound.
    Sieve {
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
        /// Also report the k-th prime and the k-th odd composite.
        #[arg(long)]
        k: Option<u64>,
    },
    /// Stratify the odd composites up to a bound (CSV table by default).
    Strata {
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
        /// Also write the JSON census to this file.
        #[arg(long)]
        census: Option<PathBuf>,
    },
    /// Run the named verification battery.
    Verify {
        #[arg(long, default_value = "paper")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: u64,
    },
    /// Check one relation, e.g. "odd>=3 ~(2,2)~> odd>=3 \ {9}".
    Collapse {
        #[arg(long)]
        rel: String,
        /// Inclusive window `a..b`.
        #[arg(long, default_value = "1..10000")]
        window: String,
    },
    /// Exhaustive relation table over Z/mZ (CSV by default).
    Ring {
        #[arg(long)]
        modulus: u32,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
        /// Include pairs with C not contained in B.
        #[arg(long)]
        all_pairs: bool,
    },
    /// All k-partitions of a target into distinct parts from a set.
    Partitions {
        #[arg(long)]
        target: u64,
        #[arg(long)]
        set: String,
        #[arg(long)]
        k: u64,
    },
}

/// Distinguishes a failed claim (exit 1) from everything else.
enum Outcome {
    Pass,
    ClaimFailed,
}

fn parse_window(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("window '{s}' must look like a..b"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo = a.trim().parse().with_context(|| format!("bad window start '{a}'"))?;
    let hi = b.trim().parse().with_context(|| format!("bad window end '{b}'"))?;
    if lo > hi {
        bail!("inverted window {lo}..{hi}");
    }
    Ok((lo, hi))
}

fn exec_for(threads: Option<usize>) -> Result<Exec> {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring the worker pool")?;
        }
        Ok(Exec::Parallel)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(Exec::Sequential)
    }
}

fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verdict_outcome(v: &RelationVerdict) -> Outcome {
    if v.status == Status::Fails {
        Outcome::ClaimFailed
    } else {
        Outcome::Pass
    }
}

fn verdict_text(v: &RelationVerdict) -> String {
    let mut s = format!("{}: {}\n", v.status, v.note);
    if let Some(r) = v.certified_range {
        match r.hi {
            Some(hi) => s += &format!("certified on [{}, {hi}]\n", r.lo),
            None => s += &format!("certified from {} on\n", r.lo),
        }
    }
    if let Some(c) = &v.counterexample {
        s += &format!("counterexample: {}\n", serde_json::to_string(c).expect("serializes"));
    }
    for w in &v.witnesses {
        s += &format!("witness: {w}\n");
    }
    s
}

fn suite_text(r: &SuiteReport) -> String {
    let mut s = String::new();
    for c in &r.checks {
        s += &format!("{:<16} {:<28} [{}] {}\n", c.status.to_string(), c.claim, c.paper_ref, c.note);
        if let Some(x) = &c.counterexample {
            s += &format!("{:<16} counterexample {}\n", "", serde_json::to_string(x).expect("serializes"));
        }
    }
    let m = &r.summary;
    s += &format!(
        "{} checks: {} holds, {} on window, {} evidence, {} hypothesis failed, {} fail\n",
        m.total, m.holds, m.holds_on_window, m.evidence, m.hypothesis_failed, m.fails
    );
    s
}

fn suite_csv(r: &SuiteReport) -> String {
    let mut s = String::from("claim,paper_ref,status,range_lo,range_hi,counterexample\n");
    for c in &r.checks {
        let (lo, hi) = match c.certified_range {
            Some(r) => (r.lo.to_string(), r.hi.map(|h| h.to_string()).unwrap_or_else(|| "inf".into())),
            None => (String::new(), String::new()),
        };
        let cx = c
            .counterexample
            .as_ref()
            .map(|x| serde_json::to_string(x).expect("serializes"))
            .unwrap_or_default();
        s += &format!(
            "{},{},{},{lo},{hi},{}\n",
            csv_field(&c.claim),
            csv_field(&c.paper_ref),
            c.status,
            csv_field(&cx)
        );
    }
    s
}

fn run(cli: &Cli) -> Result<(String, Outcome)> {
    let exec = exec_for(cli.threads)?;
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Sieve { limit, k } => {
            let t = PrimeTable::new(*limit, exec)?;
            let composites = t.odd_composites().count() as u64;
            let mut v = json!({
                "schema": 1,
                "limit": limit,
                "pi": t.prime_count(),
                "odd_composites": composites,
            });
            if let Some(k) = k {
                v["nth_prime"] = json!(t.nth_prime(*k)?);
                v["nth_odd_composite"] = json!(CompositeIndex::new(&t).nth(*k)?);
            }
            let out = match fmt(Format::Json) {
                Format::Json => json_string(&v),
                Format::Csv | Format::Text => v
                    .as_object()
                    .expect("object")
                    .iter()
                    .filter(|(key, _)| key.as_str() != "schema")
                    .map(|(key, val)| format!("{key},{val}\n"))
                    .collect(),
            };
            Ok((out, Outcome::Pass))
        }
        Command::Strata { limit, census } => {
            let primes = PrimeTable::new(limit + 3, exec)?;
            let table = compute_strata(&primes, *limit, exec)?;
            let c = table.census();
            let census_json = json_string(&serde_json::to_value(&c)?);
            if let Some(path) = census {
                fs::write(path, &census_json).with_context(|| format!("writing {}", path.display()))?;
            }
            let out = match fmt(Format::Csv) {
                Format::Csv => table.to_csv(),
                Format::Json => census_json,
                Format::Text => {
                    let mut s = format!("{} odd composites <= {}\n", c.composites, c.limit);
                    for l in &c.layers {
                        s += &format!("layer {}: {} members in [{}, {}]\n", l.layer, l.count, l.min, l.max);
                    }
                    s += &format!("unassigned: {}\n", c.unassigned);
                    s
                }
            };
            let outcome = if c.unassigned == 0 { Outcome::Pass } else { Outcome::ClaimFailed };
            Ok((out, outcome))
        }
        Command::Verify { suite, limit } => {
            if suite != "paper" {
                bail!("unknown suite '{suite}' (available: paper)");
            }
            let report = run_suite(*limit, exec, cli.timings)?;
            let outcome = if report.failed().next().is_some() {
                Outcome::ClaimFailed
            } else {
                Outcome::Pass
            };
            let out = match fmt(Format::Json) {
                Format::Json => json_string(&serde_json::to_value(&report)?),
                Format::Csv => suite_csv(&report),
                Format::Text => suite_text(&report),
            };
            Ok((out, outcome))
        }
        Command::Collapse { rel, window } => {
            let relation: Relation = rel.parse()?;
            let (lo, hi) = parse_window(window)?;
            // Sums of two window members and 3 + c for strata need headroom.
            let primes = PrimeTable::new(hi.max(9) + 3, exec)?;
            let strata;
            let mut ctx = SetContext::new(&primes);
            if relation.b.uses_strata() || relation.c.uses_strata() {
                strata = compute_strata(&primes, hi.max(9), exec)?;
                ctx = ctx.with_strata(&strata);
            }
            let v = check_relation(&ctx, &relation, lo, hi, exec)?;
            let out = match fmt(Format::Json) {
                Format::Json => {
                    let mut val = serde_json::to_value(&v)?;
                    let obj = val.as_object_mut().expect("verdict is an object");
                    obj.insert("schema".into(), json!(1));
                    obj.insert("claim".into(), json!(relation.to_string()));
                    obj.insert("paper_ref".into(), json!("Def. 2.1"));
                    obj.insert("window".into(), json!([lo, hi]));
                    obj.insert("elapsed_ms".into(), Value::Null);
                    json_string(&val)
                }
                Format::Csv => format!(
                    "relation,status,note\n{},{},{}\n",
                    csv_field(&relation.to_string()),
                    v.status,
                    csv_field(&v.note)
                ),
                Format::Text => format!("{relation}\n{}", verdict_text(&v)),
            };
            Ok((out, verdict_outcome(&v)))
        }
        Command::Ring { modulus, nmax, all_pairs } => {
            let rows = zm_relation_table(*modulus, *nmax, *all_pairs, exec)?;
            let out = match fmt(Format::Csv) {
                Format::Csv => relation_table_csv(&rows),
                Format::Json => json_string(&json!({
                    "schema": 1,
                    "modulus": modulus,
                    "n_max": nmax,
                    "rows": rows,
                })),
                Format::Text => rows
                    .iter()
                    .filter(|r| r.implies())
                    .map(|r| format!("{} ~({},{})~> {}\n", r.b, r.m_fold, r.n_fold, r.c))
                    .collect(),
            };
            Ok((out, Outcome::Pass))
        }
        Command::Partitions { target, set, k } => {
            let spec: SetSpec = set.parse()?;
            let primes = PrimeTable::new((*target).max(9) + 3, exec)?;
            let strata;
            let mut ctx = SetContext::new(&primes);
            if spec.uses_strata() {
                strata = compute_strata(&primes, (*target).max(9), exec)?;
                ctx = ctx.with_strata(&strata);
            }
            let parts = k_partitions(&ctx, *target, &spec, *k)?;
            let out = match fmt(Format::Json) {
                Format::Json => json_string(&json!({
                    "schema": 1,
                    "target": target,
                    "set": spec.to_string(),
                    "k": k,
                    "partitions": parts,
                })),
                Format::Csv => {
                    let mut s = String::from("target,length,parts\n");
                    for p in &parts {
                        let terms: Vec<String> = p.parts.iter().map(|(b, m)| format!("{b}:{m}")).collect();
                        s += &format!("{},{},{}\n", p.target, p.length, terms.join(" "));
                    }
                    s
                }
                Format::Text => parts.iter().map(|p| format!("{p}\n")).collect(),
            };
            Ok((out, Outcome::Pass))
        }
    }
}

fn emit(cli: &Cli, out: &str) -> Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, out).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(out.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(&cli).and_then(|(out, outcome)| emit(&cli, &out).map(|_| outcome));
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::ClaimFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
