//! `zeroapn`: command-line checks, spectra, classification, family sweeps
//! and certificate replay for 0-APN power functions over GF(2^n).
//!
//! Exit codes: 0 = property holds / all checks pass, 1 = property fails,
//! 2 = usage or configuration error (including unrecorded certificate tags).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use zeroapn::diffprops::{CheckReport, PowerMap};
use zeroapn::equiv;
use zeroapn::gf2n::FieldCtx;
use zeroapn::gf2poly::BitPoly;
use zeroapn::verify;

#[derive(Parser)]
#[command(name = "zeroapn", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Field modulus as a hex bitstring (defaults to the smallest
    /// irreducible of the right degree)
    #[arg(long, global = true, env = "ZEROAPN_MODULUS")]
    modulus: Option<String>,
    /// Worker thread cap
    #[arg(long, global = true, env = "ZEROAPN_THREADS")]
    threads: Option<usize>,
    /// Directory for cached per-instance reports
    #[arg(long, global = true, env = "ZEROAPN_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Seed recorded in reports (all algebra here is deterministic)
    #[arg(long, global = true, env = "ZEROAPN_SEED", default_value_t = 0)]
    seed: u64,
    /// Lift the field-size ceiling on exhaustive scans
    #[arg(long, global = true, env = "ZEROAPN_FORCE")]
    force: bool,
    /// Emit JSON (line-delimited for multi-instance commands)
    #[arg(long, global = true, env = "ZEROAPN_JSON")]
    json: bool,
    /// File of `n <hex>` lines overriding default moduli per degree
    #[arg(long, global = true, env = "ZEROAPN_MODULUS_TABLE")]
    modulus_table: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// 0-APN check and differential uniformity for x^d over GF(2^n)
    Check {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        d: u64,
    },
    /// Full differential spectrum of x^d over GF(2^n)
    Spectrum {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        d: u64,
    },
    /// x0-APN check at an arbitrary base point
    X0check {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        d: u64,
        /// Base point as a hex field element
        #[arg(long, default_value = "0")]
        x0: String,
    },
    /// Sweep all families over every valid m with n below a ceiling
    Table1 {
        /// Field degree ceiling
        #[arg(long, default_value_t = 20)]
        max_n: u32,
        /// Restrict to a single family id
        #[arg(long)]
        only: Option<u32>,
    },
    /// Replay a recorded theorem chain as a machine-checked certificate
    Certify {
        /// Theorem tag (3.1, 3.2, 3.3, 3.4-case1, 3.4-case2, 3.5, 3.6,
        /// 4m-1-case1, 4m-1-case2)
        tag: String,
        /// Write the certificate JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Match an exponent against the known-family catalog
    Classify {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        d: u64,
        /// Extra catalog file (same line format as the built-in catalog)
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Print the cyclotomic coset of d mod 2^n - 1
    Coset {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        d: u64,
    },
    /// Pairwise coset-equivalence matrix of all families reaching degree n
    InequivMatrix {
        #[arg(short)]
        n: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        zeroapn::run::configure_threads(t);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn field(g: &Global, n: u32) -> Result<FieldCtx, String> {
    if let Some(hex) = &g.modulus {
        let p = BitPoly::from_hex(hex).map_err(|e| e.to_string())?;
        return FieldCtx::with_modulus(n, p).map_err(|e| e.to_string());
    }
    if let Some(path) = &g.modulus_table {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let table = zeroapn::gf2n::parse_modulus_table(&text).map_err(|e| e.to_string())?;
        if let Some(p) = table.get(&n) {
            return FieldCtx::with_modulus(n, p.clone()).map_err(|e| e.to_string());
        }
    }
    FieldCtx::new(n).map_err(|e| e.to_string())
}

fn power_map(g: &Global, n: u32, d: u64) -> Result<PowerMap, String> {
    let ctx = Arc::new(field(g, n)?);
    PowerMap::new(ctx, d).ok_or_else(|| format!("exponent {d} is degenerate modulo 2^{n}-1"))
}

#[derive(Serialize)]
struct Stamped<T: Serialize> {
    seed: u64,
    #[serde(flatten)]
    inner: T,
}

fn emit<T: Serialize>(g: &Global, value: &T, human: String) {
    if g.json {
        let st = Stamped {
            seed: g.seed,
            inner: value,
        };
        println!("{}", serde_json::to_string(&st).expect("serializable report"));
    } else {
        println!("{human}");
    }
}

fn cache_path(g: &Global, n: u32, modulus_hex: &str, d: u64) -> Option<PathBuf> {
    g.cache_dir.as_ref().map(|dir| {
        dir.join(format!(
            "zeroapn-v{}-n{}-m{}-d{}.json",
            env!("CARGO_PKG_VERSION"),
            n,
            modulus_hex,
            d
        ))
    })
}

/// Runs (or replays from cache) the standard check for one instance.
fn cached_check(g: &Global, n: u32, d: u64) -> Result<CheckReport, String> {
    let map = power_map(g, n, d)?;
    let key = cache_path(g, n, &map.ctx().modulus_hex(), map.exponent());
    if let Some(path) = &key {
        if let Ok(text) = fs::read_to_string(path) {
            if let Ok(report) = serde_json::from_str::<CheckReport>(&text) {
                return Ok(report);
            }
        }
    }
    let report = CheckReport::run(&map);
    if let Some(path) = &key {
        if let Some(dir) = path.parent() {
            let _ = fs::create_dir_all(dir);
        }
        let _ = fs::write(path, serde_json::to_string(&report).expect("report json"));
    }
    Ok(report)
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let g = &cli.global;
    match &cli.command {
        Command::Check { n, d } => {
            let report = cached_check(g, *n, *d)?;
            let human = if report.zero_apn {
                format!(
                    "x^{} over GF(2^{}) is 0-APN; differential uniformity {}",
                    report.d, report.n, report.uniformity
                )
            } else {
                format!(
                    "x^{} over GF(2^{}) is NOT 0-APN; witnesses: {}",
                    report.d,
                    report.n,
                    report.witnesses.join(", ")
                )
            };
            let ok = report.zero_apn;
            emit(g, &report, human);
            Ok(exit_bool(ok))
        }
        Command::Spectrum { n, d } => {
            let map = power_map(g, *n, *d)?;
            let spec = map.diff_spectrum(g.force).map_err(|e| e.to_string())?;
            #[derive(Serialize)]
            struct SpectrumReport {
                n: u32,
                d: u64,
                modulus_hex: String,
                spectrum: Vec<(u64, u64)>,
            }
            let report = SpectrumReport {
                n: *n,
                d: map.exponent(),
                modulus_hex: map.ctx().modulus_hex(),
                spectrum: spec.clone(),
            };
            let human = spec
                .iter()
                .map(|(k, c)| format!("{k}: {c}"))
                .collect::<Vec<_>>()
                .join("\n");
            emit(g, &report, human);
            Ok(ExitCode::SUCCESS)
        }
        Command::X0check { n, d, x0 } => {
            let map = power_map(g, *n, *d)?;
            let x0 = u64::from_str_radix(x0, 16).map_err(|e| e.to_string())?;
            if x0 >= map.ctx().size() {
                return Err(format!("x0 = {x0:x} is outside GF(2^{n})"));
            }
            let ok = map.is_x0_apn(x0);
            #[derive(Serialize)]
            struct X0Report {
                n: u32,
                d: u64,
                x0: String,
                x0_apn: bool,
            }
            emit(
                g,
                &X0Report {
                    n: *n,
                    d: map.exponent(),
                    x0: format!("{x0:x}"),
                    x0_apn: ok,
                },
                format!(
                    "x^{} over GF(2^{}) is {}{}-APN at x0 = {x0:x}",
                    map.exponent(),
                    n,
                    if ok { "" } else { "NOT " },
                    x0
                ),
            );
            Ok(exit_bool(ok))
        }
        Command::Table1 { max_n, only } => {
            let mut all_ok = true;
            for fam in verify::families() {
                if only.is_some_and(|id| id != fam.id) {
                    continue;
                }
                for m in verify::MIN_M.. {
                    let (d, n) = match verify::family_instantiate(fam.id, m) {
                        Ok(dn) => dn,
                        Err(verify::VerifyError::ConstraintViolated(_)) => continue,
                        Err(_) => break,
                    };
                    if n > *max_n {
                        break;
                    }
                    let report = cached_check(g, n, d)?;
                    all_ok &= report.zero_apn;
                    #[derive(Serialize)]
                    struct Row<'a> {
                        family: u32,
                        m: i128,
                        #[serde(flatten)]
                        check: &'a CheckReport,
                    }
                    emit(
                        g,
                        &Row {
                            family: fam.id,
                            m,
                            check: &report,
                        },
                        format!(
                            "family {:2} m={m}: d={d} n={n} zero_apn={} uniformity={}",
                            fam.id, report.zero_apn, report.uniformity
                        ),
                    );
                }
            }
            Ok(exit_bool(all_ok))
        }
        Command::Certify { tag, out } => {
            let cert = match verify::verify_theorem_symbolic(tag) {
                Ok(c) => c,
                Err(
                    e @ (verify::VerifyError::UnknownTheorem(_)
                    | verify::VerifyError::TranscriptionMissing(_)),
                ) => return Err(e.to_string()),
                Err(e) => return Err(e.to_string()),
            };
            let json = serde_json::to_string_pretty(&cert).expect("certificate json");
            if let Some(path) = out {
                fs::write(path, &json).map_err(|e| e.to_string())?;
            }
            let human = cert
                .steps
                .iter()
                .map(|s| {
                    format!(
                        "[{}] {}: {}",
                        if s.ok { "ok" } else { "FAIL" },
                        s.operation,
                        s.detail
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            if g.json || out.is_none() {
                println!("{json}");
            } else {
                println!("{human}");
            }
            Ok(exit_bool(cert.ok))
        }
        Command::Classify { n, d, catalog } => {
            let mut cat = equiv::default_catalog();
            if let Some(path) = catalog {
                let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
                cat.extend(equiv::parse_catalog(&text).map_err(|e| e.to_string())?);
            }
            let hits = equiv::classify(*d, *n, &cat);
            let coset = equiv::cyclotomic_coset(*d, *n);
            #[derive(Serialize)]
            struct ClassifyReport {
                n: u32,
                d: u64,
                coset: Vec<u64>,
                matches: Vec<equiv::Classification>,
            }
            let human = if hits.is_empty() {
                format!("x^{d} over GF(2^{n}): no catalog match; coset {coset:?}")
            } else {
                hits.iter()
                    .map(|h| {
                        format!(
                            "x^{d} over GF(2^{n}) ~ {} ({}, member d={}{})",
                            h.family,
                            h.kind,
                            h.member_exponent,
                            if h.via_inverse { ", via inverse" } else { "" }
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            emit(
                g,
                &ClassifyReport {
                    n: *n,
                    d: *d,
                    coset,
                    matches: hits,
                },
                human,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Coset { n, d } => {
            let coset = equiv::cyclotomic_coset(*d, *n);
            #[derive(Serialize)]
            struct CosetReport {
                n: u32,
                d: u64,
                coset: Vec<u64>,
            }
            emit(
                g,
                &CosetReport {
                    n: *n,
                    d: *d,
                    coset: coset.clone(),
                },
                format!("{coset:?}"),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::InequivMatrix { n } => {
            let mut instances = Vec::new();
            for fam in verify::families() {
                for m in verify::MIN_M..=(*n as i128) {
                    if let Ok((d, fam_n)) = verify::family_instantiate(fam.id, m) {
                        if fam_n == *n {
                            instances.push((format!("family-{}", fam.id), d));
                        }
                    }
                }
            }
            let report = equiv::pairwise_inequivalence_report(*n, &instances);
            let mut human = String::new();
            for (i, l) in report.labels.iter().enumerate() {
                let row: String = report.equivalent[i]
                    .iter()
                    .map(|&b| if b { '1' } else { '.' })
                    .collect();
                human.push_str(&format!(
                    "{l:>10} d={:<6} {row}\n",
                    report.exponents[i]
                ));
            }
            emit(g, &report, human.trim_end().to_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_bool(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
