//! `pendlab` — command-line frontend for the PEND verification library.
//!
//! Exit codes: 0 verified / success, 1 refutation or oracle mismatch,
//! 2 insufficient range only, 3 usage errors, 4 internal failures.

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use pendlab::cache::{cache_file_name, read_table, write_table, Cacheable};
use pendlab::families::FamilyReport;
use pendlab::newman::is_prime;
use pendlab::partitions::{a_table, pend_bruteforce, pend_table, TableKind};
use pendlab::ring::{Exact, Parity, Residue};
use pendlab::series::{expand_quotient, EtaQuotient, Series, SeriesError};
use pendlab::verify::{
    exit_code, identity_report, newman_report, sellers_report, theorem_report, theta_report,
    IdentityReport, NewmanConfig, NewmanPrimeReport, NewmanReport, SellersReport, SweepOutcome,
    TheoremReport, ThetaReport,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "pendlab",
    version,
    about = "Exact verification toolkit for the PEND partition function",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print PEND counts for an index `n` or an inclusive range `a..b`.
    Pend {
        /// Index `n` or inclusive range `a..b` (decimal).
        range: String,
        /// Report values modulo M (2 selects the parity backend).
        #[arg(long = "mod", value_name = "M")]
        modulus: Option<u64>,
        /// Coefficient backend (defaults to exact, or follows --mod).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Cross-check printed values against brute-force enumeration (n ≤ 60).
        #[arg(long)]
        oracle: bool,
        /// Directory for table caching (default: $PENDLAB_CACHE).
        #[arg(long = "cache-dir", value_name = "DIR")]
        cache_dir: Option<PathBuf>,
    },
    /// Expand an eta quotient `k:e,...` to its first N coefficients.
    Expand {
        /// Quotient in the `k:e` comma-separated grammar, e.g. "1:-1,2:1".
        quotient: String,
        /// Number of coefficients to print (indices 0..N-1).
        #[arg(value_name = "N")]
        n: u64,
        /// Report values modulo M (2 selects the parity backend).
        #[arg(long = "mod", value_name = "M")]
        modulus: Option<u64>,
        /// Coefficient backend (defaults to exact, or follows --mod).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Cross-check against brute-force enumeration (pend/p quotients only).
        #[arg(long)]
        oracle: bool,
    },
    /// Run a verification campaign; the exit code mirrors the report status.
    Verify {
        /// Campaign to run.
        #[arg(value_enum)]
        target: TargetArg,
        /// Table order (campaign-specific default).
        #[arg(long = "N", value_name = "N")]
        n: Option<u64>,
        /// Check modulus where the target admits one (identity: 2, sellers: 3).
        #[arg(long = "mod", value_name = "M")]
        modulus: Option<u64>,
        /// Backend override where the target admits one.
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Prime(s) to test; repeatable (newman, theorem).
        #[arg(long = "p", value_name = "P", action = ArgAction::Append)]
        primes: Vec<u64>,
        /// Family level bound (theorem) or ladder depth (sellers).
        #[arg(long, value_name = "K")]
        k: Option<u32>,
        /// Sweep bound (newman) or product order (theta).
        #[arg(long = "n-max", value_name = "NMAX")]
        n_max: Option<u64>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Directory for table caching (default: $PENDLAB_CACHE).
        #[arg(long = "cache-dir", value_name = "DIR")]
        cache_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Parity,
    Residue,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Identity,
    Theta,
    Newman,
    Theorem,
    Sellers,
}

/// CLI failure carrying its exit class.
enum Failure {
    /// Bad arguments or argument combinations → exit 3.
    Usage(String),
    /// Computation or I/O failure → exit 4.
    Internal(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn internal(err: impl std::fmt::Display) -> Failure {
    Failure::Internal(err.to_string())
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Pend {
            range,
            modulus,
            backend,
            format,
            oracle,
            cache_dir,
        } => cmd_pend(
            &range,
            modulus,
            backend,
            format,
            oracle,
            cache_dir.as_deref(),
        ),
        Command::Expand {
            quotient,
            n,
            modulus,
            backend,
            format,
            oracle,
        } => cmd_expand(&quotient, n, modulus, backend, format, oracle),
        Command::Verify {
            target,
            n,
            modulus,
            backend,
            primes,
            k,
            n_max,
            format,
            cache_dir,
        } => cmd_verify(
            target,
            n,
            modulus,
            backend,
            &primes,
            k,
            n_max,
            format,
            cache_dir.as_deref(),
        ),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            3
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            4
        }
    }
}

// ---------------------------------------------------------------------------
// Backend selection and table loading
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum BackendChoice {
    Exact,
    Parity,
    Residue(u64),
}

impl BackendChoice {
    fn name(self) -> &'static str {
        match self {
            BackendChoice::Exact => "exact",
            BackendChoice::Parity => "parity",
            BackendChoice::Residue(_) => "residue",
        }
    }

    fn modulus(self) -> Option<u64> {
        match self {
            BackendChoice::Exact => None,
            BackendChoice::Parity => Some(2),
            BackendChoice::Residue(m) => Some(m),
        }
    }

    /// Backend component of the cache file name; residue embeds its modulus.
    fn cache_label(self) -> String {
        match self {
            BackendChoice::Exact => "exact".into(),
            BackendChoice::Parity => "parity".into(),
            BackendChoice::Residue(m) => format!("residue{m}"),
        }
    }
}

fn resolve_backend(
    backend: Option<BackendArg>,
    modulus: Option<u64>,
) -> Result<BackendChoice, Failure> {
    if let Some(m) = modulus {
        if m < 2 {
            return Err(usage("--mod must be at least 2"));
        }
    }
    match (backend, modulus) {
        (None, None) => Ok(BackendChoice::Exact),
        (None, Some(2)) => Ok(BackendChoice::Parity),
        (None, Some(m)) => Ok(BackendChoice::Residue(m)),
        (Some(BackendArg::Exact), None) => Ok(BackendChoice::Exact),
        (Some(BackendArg::Exact), Some(_)) => {
            Err(usage("--backend exact conflicts with --mod; drop one"))
        }
        (Some(BackendArg::Parity), None | Some(2)) => Ok(BackendChoice::Parity),
        (Some(BackendArg::Parity), Some(m)) => {
            Err(usage(format!("--backend parity works modulo 2, not {m}")))
        }
        (Some(BackendArg::Residue), Some(m)) => Ok(BackendChoice::Residue(m)),
        (Some(BackendArg::Residue), None) => Err(usage("--backend residue requires --mod M")),
    }
}

/// One of the three concrete table representations.
enum AnySeries {
    Exact(Series<Exact>),
    Parity(Series<Parity>),
    Residue(Series<Residue>),
}

impl AnySeries {
    fn value_string(&self, n: usize) -> String {
        match self {
            AnySeries::Exact(s) => s.coeff(n).to_string(),
            AnySeries::Parity(s) => if *s.coeff(n) { "1" } else { "0" }.to_string(),
            AnySeries::Residue(s) => s.coeff(n).to_string(),
        }
    }
}

fn effective_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("PENDLAB_CACHE").map(PathBuf::from))
}

/// Load a table through the cache directory when one is configured. Cache
/// problems never fail the command: unreadable or mismatched files are
/// reported to stderr and the table is rebuilt (and re-written best-effort).
fn table_with_cache<T, F>(
    dir: Option<&Path>,
    kind: TableKind,
    label: &str,
    order: usize,
    modulus_field: u64,
    build: F,
) -> Result<T, Failure>
where
    T: Cacheable,
    F: FnOnce() -> Result<T, SeriesError>,
{
    let path = dir.map(|d| d.join(cache_file_name(kind, label, order)));
    if let Some(path) = &path {
        if path.exists() {
            match read_table::<T>(path) {
                Ok((stored_kind, table))
                    if stored_kind == kind
                        && table.coeff_count() == order
                        && table.modulus_field() == modulus_field =>
                {
                    return Ok(table);
                }
                Ok(_) => {
                    eprintln!(
                        "warning: cache file {} holds a different table; rebuilding",
                        path.display()
                    );
                }
                Err(err) => {
                    eprintln!("warning: ignoring cache file {}: {err}", path.display());
                }
            }
        }
    }
    let table = build().map_err(internal)?;
    if let Some(path) = &path {
        let dir = dir.expect("path implies dir");
        if let Err(err) = std::fs::create_dir_all(dir)
            .map_err(Into::into)
            .and_then(|()| write_table(path, kind, &table))
        {
            eprintln!(
                "warning: could not write cache file {}: {err}",
                path.display()
            );
        }
    }
    Ok(table)
}

fn load_table(
    dir: Option<&Path>,
    kind: TableKind,
    choice: BackendChoice,
    order: usize,
) -> Result<AnySeries, Failure> {
    let build_series = |ring_order: usize| match kind {
        TableKind::Pend => pend_table(Exact, ring_order).map(|t| t.into_series()),
        TableKind::A => a_table(Exact, ring_order).map(|t| t.into_series()),
        TableKind::P => pendlab::partitions::p_table(Exact, ring_order).map(|t| t.into_series()),
    };
    match choice {
        BackendChoice::Exact => {
            let series = table_with_cache(dir, kind, "exact", order, 0, || build_series(order))?;
            Ok(AnySeries::Exact(series))
        }
        BackendChoice::Parity => {
            let series = table_with_cache(dir, kind, "parity", order, 2, || match kind {
                TableKind::Pend => pend_table(Parity, order).map(|t| t.into_series()),
                TableKind::A => a_table(Parity, order).map(|t| t.into_series()),
                TableKind::P => {
                    pendlab::partitions::p_table(Parity, order).map(|t| t.into_series())
                }
            })?;
            Ok(AnySeries::Parity(series))
        }
        BackendChoice::Residue(m) => {
            let ring = Residue::new(m).ok_or_else(|| usage("--mod must be at least 2"))?;
            let label = choice.cache_label();
            let series = table_with_cache(dir, kind, &label, order, m, || match kind {
                TableKind::Pend => pend_table(ring, order).map(|t| t.into_series()),
                TableKind::A => a_table(ring, order).map(|t| t.into_series()),
                TableKind::P => pendlab::partitions::p_table(ring, order).map(|t| t.into_series()),
            })?;
            Ok(AnySeries::Residue(series))
        }
    }
}

// ---------------------------------------------------------------------------
// pend
// ---------------------------------------------------------------------------

/// Parse `n` or inclusive `a..b`, decimal only.
fn parse_range(text: &str) -> Result<(u64, u64), Failure> {
    let parse_num = |tok: &str, what: &str| -> Result<u64, Failure> {
        tok.trim()
            .parse::<u64>()
            .map_err(|_| usage(format!("{what} `{tok}` is not a decimal integer")))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let start = parse_num(lo, "range start")?;
        let end = parse_num(hi, "range end")?;
        if end < start {
            return Err(usage(format!("empty range {start}..{end}")));
        }
        Ok((start, end))
    } else {
        let n = parse_num(text, "index")?;
        Ok((n, n))
    }
}

/// Hard ceiling on coefficient counts so typos don't attempt absurd allocations.
const MAX_ORDER: u64 = 1 << 32;

fn order_from_end(end: u64) -> Result<usize, Failure> {
    let order = end
        .checked_add(1)
        .filter(|&o| o <= MAX_ORDER)
        .ok_or_else(|| {
            usage(format!(
                "range end {end} is too large (max {})",
                MAX_ORDER - 1
            ))
        })?;
    usize::try_from(order).map_err(|_| usage("range does not fit in memory on this platform"))
}

#[derive(Serialize)]
struct SeriesOutput {
    target: &'static str,
    backend: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    modulus: Option<u64>,
    start: u64,
    values: Vec<String>,
}

fn print_window(
    target: &'static str,
    series: &AnySeries,
    choice: BackendChoice,
    start: u64,
    end: u64,
    format: FormatArg,
) -> Result<(), Failure> {
    match format {
        FormatArg::Json => {
            let out = SeriesOutput {
                target,
                backend: choice.name(),
                modulus: choice.modulus(),
                start,
                values: (start..=end)
                    .map(|n| series.value_string(n as usize))
                    .collect(),
            };
            println!("{}", serde_json::to_string(&out).map_err(internal)?);
        }
        FormatArg::Csv | FormatArg::Text => {
            let mut buf = String::new();
            if format == FormatArg::Csv {
                buf.push_str("n,value\n");
            }
            for n in start..=end {
                let _ = writeln!(buf, "{n},{}", series.value_string(n as usize));
            }
            print!("{buf}");
        }
    }
    Ok(())
}

/// Compare table values against brute-force partition enumeration for
/// indices start..=min(end, 60), reduced into the active backend.
fn run_oracle(
    series: &AnySeries,
    choice: BackendChoice,
    start: u64,
    end: u64,
    count_fn: impl Fn(u64) -> Result<u64, Failure>,
) -> Result<(), Failure> {
    let top = end.min(60);
    for n in start..=top {
        let count = count_fn(n)?;
        let expected = match choice {
            BackendChoice::Exact => count.to_string(),
            BackendChoice::Parity => (count % 2).to_string(),
            BackendChoice::Residue(m) => (count % m).to_string(),
        };
        let got = series.value_string(n as usize);
        if got != expected {
            return Err(Failure::Internal(format!(
                "oracle mismatch at n={n}: table has {got}, enumeration gives {expected}"
            )));
        }
    }
    Ok(())
}

fn cmd_pend(
    range: &str,
    modulus: Option<u64>,
    backend: Option<BackendArg>,
    format: FormatArg,
    oracle: bool,
    cache_dir: Option<&Path>,
) -> Result<i32, Failure> {
    let (start, end) = parse_range(range)?;
    let order = order_from_end(end)?;
    let choice = resolve_backend(backend, modulus)?;
    let dir = effective_cache_dir(cache_dir);
    let series = load_table(dir.as_deref(), TableKind::Pend, choice, order)?;
    if oracle {
        if let Err(Failure::Internal(msg)) = run_oracle(&series, choice, start, end, |n| {
            pend_bruteforce(n).map_err(internal)
        }) {
            eprintln!("error: {msg}");
            return Ok(1);
        }
    }
    print_window("pend", &series, choice, start, end, format)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

fn cmd_expand(
    quotient_text: &str,
    n: u64,
    modulus: Option<u64>,
    backend: Option<BackendArg>,
    format: FormatArg,
    oracle: bool,
) -> Result<i32, Failure> {
    if n == 0 {
        return Err(usage("N must be at least 1"));
    }
    if n > MAX_ORDER {
        return Err(usage(format!("N {n} is too large (max {MAX_ORDER})")));
    }
    let quotient = EtaQuotient::from_str(quotient_text).map_err(|e| usage(e.to_string()))?;
    let order = n as usize;
    let choice = resolve_backend(backend, modulus)?;
    let series = match choice {
        BackendChoice::Exact => {
            AnySeries::Exact(expand_quotient(Exact, &quotient, order).map_err(internal)?)
        }
        BackendChoice::Parity => {
            AnySeries::Parity(expand_quotient(Parity, &quotient, order).map_err(internal)?)
        }
        BackendChoice::Residue(m) => {
            let ring = Residue::new(m).ok_or_else(|| usage("--mod must be at least 2"))?;
            AnySeries::Residue(expand_quotient(ring, &quotient, order).map_err(internal)?)
        }
    };
    if oracle {
        let count_fn: Box<dyn Fn(u64) -> Result<u64, Failure>> =
            if quotient == TableKind::Pend.quotient() {
                Box::new(|n| pend_bruteforce(n).map_err(internal))
            } else if quotient == TableKind::P.quotient() {
                Box::new(|n| {
                    let mut count = 0u64;
                    pendlab::partitions::for_each_partition(n, |_| count += 1).map_err(internal)?;
                    Ok(count)
                })
            } else {
                return Err(usage(
                    "--oracle only applies to the pend quotient (1:-1,2:1,4:-1,6:-1,12:1) \
                     or the partition quotient (1:-1)",
                ));
            };
        if let Err(Failure::Internal(msg)) = run_oracle(&series, choice, 0, n - 1, count_fn) {
            eprintln!("error: {msg}");
            return Ok(1);
        }
    }
    print_window("expand", &series, choice, 0, n - 1, format)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn reject_flag(given: bool, msg: &str) -> Result<(), Failure> {
    if given {
        Err(usage(msg))
    } else {
        Ok(())
    }
}

fn validated_primes(primes: &[u64], defaults: &[u64]) -> Result<Vec<u64>, Failure> {
    let list: Vec<u64> = if primes.is_empty() {
        defaults.to_vec()
    } else {
        primes.to_vec()
    };
    for &p in &list {
        if p < 5 {
            return Err(usage(format!("--p {p}: primes below 5 are not supported")));
        }
        if !is_prime(p) {
            return Err(usage(format!("--p {p}: not a prime")));
        }
    }
    Ok(list)
}

fn order_arg(n: Option<u64>, default: u64) -> Result<usize, Failure> {
    let n = n.unwrap_or(default);
    if n == 0 {
        return Err(usage("--N must be at least 1"));
    }
    if n > MAX_ORDER {
        return Err(usage(format!("--N {n} is too large (max {MAX_ORDER})")));
    }
    Ok(n as usize)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    target: TargetArg,
    n: Option<u64>,
    modulus: Option<u64>,
    backend: Option<BackendArg>,
    primes: &[u64],
    k: Option<u32>,
    n_max: Option<u64>,
    format: FormatArg,
    cache_dir: Option<&Path>,
) -> Result<i32, Failure> {
    let dir = effective_cache_dir(cache_dir);
    match target {
        TargetArg::Identity => {
            reject_flag(
                !primes.is_empty(),
                "--p does not apply to `verify identity`",
            )?;
            reject_flag(k.is_some(), "--k does not apply to `verify identity`")?;
            reject_flag(
                n_max.is_some(),
                "--n-max does not apply to `verify identity`",
            )?;
            if let Some(m) = modulus {
                if m != 2 {
                    return Err(usage(
                        "`verify identity` is a mod-2 check; only --mod 2 applies",
                    ));
                }
            }
            if let Some(b) = backend {
                if b != BackendArg::Parity {
                    return Err(usage(
                        "`verify identity` runs on the parity backend; drop --backend",
                    ));
                }
            }
            let order = order_arg(n, 100_000)?;
            let pend =
                table_with_cache(dir.as_deref(), TableKind::Pend, "parity", order, 2, || {
                    pend_table(Parity, order).map(|t| t.into_series())
                })?;
            let a = table_with_cache(dir.as_deref(), TableKind::A, "parity", order, 2, || {
                a_table(Parity, order).map(|t| t.into_series())
            })?;
            let report = identity_report(&pend, &a).map_err(internal)?;
            emit_report(
                format,
                &report,
                identity_csv(&report),
                identity_text(&report),
            )?;
            Ok(exit_code(report.status))
        }
        TargetArg::Theta => {
            reject_flag(!primes.is_empty(), "--p does not apply to `verify theta`")?;
            reject_flag(k.is_some(), "--k does not apply to `verify theta`")?;
            reject_flag(
                modulus.is_some(),
                "`verify theta` uses exact arithmetic; drop --mod",
            )?;
            if let Some(b) = backend {
                if b != BackendArg::Exact {
                    return Err(usage(
                        "`verify theta` uses exact arithmetic; drop --backend",
                    ));
                }
            }
            let series_order = order_arg(n, 2000)?;
            let product_order = order_arg(n_max, 500)?;
            let report = theta_report(series_order, product_order).map_err(internal)?;
            emit_report(format, &report, theta_csv(&report), theta_text(&report))?;
            Ok(exit_code(report.status))
        }
        TargetArg::Newman => {
            reject_flag(
                n.is_some(),
                "`verify newman` sizes its tables from --n-max; drop --N",
            )?;
            reject_flag(k.is_some(), "--k does not apply to `verify newman`")?;
            reject_flag(
                modulus.is_some(),
                "`verify newman` replicates over fixed built-in moduli; drop --mod",
            )?;
            let (run_exact, run_replication) = match backend {
                None => (true, true),
                Some(BackendArg::Exact) => (true, false),
                Some(BackendArg::Residue) => (false, true),
                Some(BackendArg::Parity) => {
                    return Err(usage(
                        "`verify newman` needs exact or residue arithmetic, not parity",
                    ))
                }
            };
            let primes = validated_primes(primes, &[5, 7, 11, 13])?;
            let config = NewmanConfig {
                primes,
                n_max,
                run_exact,
                run_replication,
            };
            let report = newman_report(&config).map_err(internal)?;
            emit_report(format, &report, newman_csv(&report), newman_text(&report))?;
            Ok(exit_code(report.status))
        }
        TargetArg::Theorem => {
            reject_flag(
                n_max.is_some(),
                "--n-max does not apply to `verify theorem`",
            )?;
            if let Some(m) = modulus {
                if m != 2 {
                    return Err(usage(
                        "`verify theorem` is a mod-2 campaign; only --mod 2 applies",
                    ));
                }
            }
            if let Some(b) = backend {
                if b != BackendArg::Parity {
                    return Err(usage(
                        "`verify theorem` runs on the parity backend; drop --backend",
                    ));
                }
            }
            let primes = validated_primes(primes, &[5, 7, 11])?;
            let order = order_arg(n, 1_000_000)?;
            let table =
                table_with_cache(dir.as_deref(), TableKind::Pend, "parity", order, 2, || {
                    pend_table(Parity, order).map(|t| t.into_series())
                })?;
            let report = theorem_report(&primes, k.unwrap_or(0), &table).map_err(internal)?;
            emit_report(format, &report, theorem_csv(&report), theorem_text(&report))?;
            Ok(exit_code(report.status))
        }
        TargetArg::Sellers => {
            reject_flag(!primes.is_empty(), "--p does not apply to `verify sellers`")?;
            reject_flag(
                n_max.is_some(),
                "--n-max does not apply to `verify sellers`",
            )?;
            if let Some(m) = modulus {
                if m != 3 {
                    return Err(usage(
                        "`verify sellers` is a mod-3 campaign; only --mod 3 applies",
                    ));
                }
            }
            if let Some(b) = backend {
                if b != BackendArg::Residue {
                    return Err(usage(
                        "`verify sellers` runs on the residue backend; drop --backend",
                    ));
                }
            }
            let alpha_max = k.unwrap_or(3);
            if alpha_max == 0 {
                return Err(usage("--k must be at least 1 for `verify sellers`"));
            }
            let order = order_arg(n, 100_000)?;
            let ring = Residue::new(3).expect("3 is a valid modulus");
            let table = table_with_cache(
                dir.as_deref(),
                TableKind::Pend,
                "residue3",
                order,
                3,
                || pend_table(ring, order).map(|t| t.into_series()),
            )?;
            let report = sellers_report(alpha_max, &table).map_err(internal)?;
            emit_report(format, &report, sellers_csv(&report), sellers_text(&report))?;
            Ok(exit_code(report.status))
        }
    }
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

fn emit_report<T: Serialize>(
    format: FormatArg,
    report: &T,
    csv: String,
    text: String,
) -> Result<(), Failure> {
    match format {
        FormatArg::Json => println!("{}", serde_json::to_string(report).map_err(internal)?),
        FormatArg::Csv => print!("{csv}"),
        FormatArg::Text => print!("{text}"),
    }
    Ok(())
}

fn opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn identity_csv(r: &IdentityReport) -> String {
    let mut out =
        String::from("target,modulus,order,n_checked,mismatch_count,first_mismatch,status\n");
    let first = r.mismatches.first().map(|m| m.index);
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{}",
        r.target,
        r.modulus,
        r.order,
        r.n_checked,
        r.mismatch_count,
        opt_u64(first),
        r.status
    );
    out
}

fn identity_text(r: &IdentityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "identity: modulus {}, checked {} indices, {} mismatches",
        r.modulus, r.n_checked, r.mismatch_count
    );
    for m in &r.mismatches {
        let _ = writeln!(
            out,
            "  mismatch at n={}: pend {} vs a {}",
            m.index, m.pend, m.a
        );
    }
    let _ = writeln!(out, "overall: {}", r.status);
    out
}

fn theta_csv(r: &ThetaReport) -> String {
    let mut out = String::from("name,status,detail\n");
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{},{},{}",
            c.name,
            c.status,
            c.detail.clone().unwrap_or_default()
        );
    }
    out
}

fn theta_text(r: &ThetaReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "theta: series order {}, product order {}",
        r.series_order, r.product_order
    );
    for c in &r.checks {
        match &c.detail {
            Some(d) => {
                let _ = writeln!(out, "  {}: {} ({d})", c.name, c.status);
            }
            None => {
                let _ = writeln!(out, "  {}: {}", c.name, c.status);
            }
        }
    }
    let _ = writeln!(out, "overall: {}", r.status);
    out
}

fn newman_sweep_csv(
    out: &mut String,
    prime: &NewmanPrimeReport,
    sweep: &str,
    modulus: Option<u64>,
    o: &SweepOutcome,
) {
    let _ = writeln!(
        out,
        "{},{},{},{},{sweep},{},{},{},{}",
        prime.p,
        prime.delta,
        prime.alpha,
        prime.omega_parity,
        opt_u64(modulus),
        o.n_max,
        o.all_zero,
        opt_u64(o.first_failure)
    );
}

fn newman_csv(r: &NewmanReport) -> String {
    let mut out =
        String::from("p,delta,alpha,omega_parity,sweep,modulus,n_max,all_zero,first_failure\n");
    for pr in &r.primes {
        if let Some(o) = &pr.exact {
            newman_sweep_csv(&mut out, pr, "exact", None, o);
        }
        if let Some(o) = &pr.step3 {
            newman_sweep_csv(&mut out, pr, "step3", None, o);
        }
        for rep in &pr.replication {
            let o = SweepOutcome {
                n_max: rep.n_max,
                all_zero: rep.all_zero,
                first_failure: rep.first_failure,
            };
            newman_sweep_csv(&mut out, pr, "replication", Some(rep.modulus), &o);
        }
    }
    out
}

fn sweep_line(out: &mut String, label: &str, o: &SweepOutcome) {
    match o.first_failure {
        None => {
            let _ = writeln!(out, "  {label} n<={}: all residuals zero", o.n_max);
        }
        Some(n) => {
            let _ = writeln!(
                out,
                "  {label} n<={}: first nonzero residual at n={n}",
                o.n_max
            );
        }
    }
}

fn newman_text(r: &NewmanReport) -> String {
    let mut out = String::new();
    for pr in &r.primes {
        let _ = writeln!(
            out,
            "p={}: delta {}, alpha {}, omega parity {}",
            pr.p, pr.delta, pr.alpha, pr.omega_parity
        );
        if let Some(o) = &pr.exact {
            sweep_line(&mut out, "exact sweep", o);
        }
        if let Some(o) = &pr.step3 {
            sweep_line(&mut out, "step3 sweep", o);
        }
        for rep in &pr.replication {
            let o = SweepOutcome {
                n_max: rep.n_max,
                all_zero: rep.all_zero,
                first_failure: rep.first_failure,
            };
            sweep_line(&mut out, &format!("replication mod {}", rep.modulus), &o);
        }
    }
    let _ = writeln!(out, "overall: {}", r.status);
    out
}

fn family_csv_row(out: &mut String, prefix: &str, f: &FamilyReport) {
    let counterexamples = f
        .counterexamples
        .iter()
        .map(|c| format!("{}:{}", c.index, c.observed))
        .collect::<Vec<_>>()
        .join(";");
    let _ = writeln!(
        out,
        "{prefix}{},{},{},{},{},{},{},{},{}",
        f.modulus,
        f.residue,
        f.check_modulus,
        f.expected_residue,
        f.status,
        f.n_checked,
        opt_u64(f.max_index),
        counterexamples,
        f.provenance
    );
}

fn family_text_line(out: &mut String, f: &FamilyReport) {
    if f.modulus == 0 {
        let _ = writeln!(
            out,
            "  point index {} expect {} (mod {}): {} [{}]",
            f.residue, f.expected_residue, f.check_modulus, f.status, f.provenance
        );
    } else {
        let _ = writeln!(
            out,
            "  family A={} B={} expect {} (mod {}): {}, {} indices checked{} [{}]",
            f.modulus,
            f.residue,
            f.expected_residue,
            f.check_modulus,
            f.status,
            f.n_checked,
            f.max_index
                .map(|m| format!(" (max {m})"))
                .unwrap_or_default(),
            f.provenance
        );
    }
}

fn theorem_csv(r: &TheoremReport) -> String {
    let mut out = String::from(
        "p,case,A,B,mod,expected,status,n_checked,max_index,counterexamples,provenance\n",
    );
    for pr in &r.primes {
        for f in &pr.families {
            family_csv_row(&mut out, &format!("{},{},", pr.p, pr.case), f);
        }
    }
    out
}

fn theorem_text(r: &TheoremReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "theorem: table order {}, k max {}",
        r.table_order, r.k_max
    );
    for pr in &r.primes {
        let _ = writeln!(
            out,
            "p={}: {} (pend({}) parity {})",
            pr.p, pr.case, pr.delta, pr.pend_delta_parity
        );
        for f in &pr.families {
            family_text_line(&mut out, f);
        }
    }
    let _ = writeln!(out, "overall: {}", r.status);
    out
}

fn sellers_csv(r: &SellersReport) -> String {
    let mut out =
        String::from("A,B,mod,expected,status,n_checked,max_index,counterexamples,provenance\n");
    for f in &r.families {
        family_csv_row(&mut out, "", f);
    }
    out
}

fn sellers_text(r: &SellersReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "sellers: table order {}, ladder depth {}",
        r.table_order, r.alpha_max
    );
    for f in &r.families {
        family_text_line(&mut out, f);
    }
    let _ = writeln!(out, "overall: {}", r.status);
    out
}
