//! Command-line front end for the zetamoments library.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use zetamoments::arith::{arith_deriv_tensor, PrimeTable};
use zetamoments::checks::{combinatorial_suite, toeplitz_suite, SuiteReport};
use zetamoments::cue::{
    derivative_moment_exact, derivative_moment_leading, mc_moment, scaled_limit_series, shifted_moment_exact,
    Observable, Sampler,
};
use zetamoments::predict::{
    compare, derive_integrand, second_moment_integrand, stieltjes_head, symbolic_form, LogPolynomial,
};
use zetamoments::zeta::{
    discrete_moment, find_zeros, import_zero_table, max_imag_ratio, read_zero_cache, theta, write_zero_cache,
    MomentTrace, ZeroLimit, ZeroRecord,
};
use zetamoments::{Error, ShiftSet, ValueVector};

const DEFAULT_SEED: u64 = 20_240_607;
const SCHEMA: &str = "# schema v1";

mod exit {
    pub const OUTSIDE_BAND: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const UNSUPPORTED: u8 = 3;
    pub const MALFORMED: u8 = 4;
    pub const MISSING_CACHE: u8 = 5;
    pub const INTEGRITY: u8 = 6;
}

#[derive(Parser, Debug)]
#[command(name = "zetamoments", version, about = "CUE moments, zeta zeros and moment-polynomial predictions")]
struct Cli {
    /// Worker thread cap for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Randomized symmetric-function and Toeplitz identity suites.
    Symcheck(SymcheckArgs),
    /// Exact, Monte Carlo and leading-order CUE moments side by side.
    Cue(CueArgs),
    /// Derive the moment polynomial in L = log(t/2π) for derivative orders.
    Derive(DeriveArgs),
    /// Compute or import zeta zeros into a cache file.
    Zeros(ZerosArgs),
    /// Cumulative sum of zeta-derivative products over cached zeros.
    Sum(SumArgs),
    /// Cumulative sum against the predicted moment polynomial.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct SymcheckArgs {
    /// Instances per suite [default: 500 alternating sums, 200 Toeplitz draws]
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("observable").required(true).args(["shifts", "orders"]))]
struct CueArgs {
    /// Matrix size N.
    #[arg(long)]
    matrix_size: usize,
    /// Comma-separated complex shifts, e.g. `0.05,0.11` or `0.1+0.02i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    shifts: Option<Vec<Complex64>>,
    /// Comma-separated derivative orders, e.g. `1,1`.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<u32>>,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct DeriveArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    orders: Vec<u32>,
    /// Number of primes in the arithmetic factor.
    #[arg(long, default_value_t = 1000)]
    primes: usize,
    /// Write coefficients as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    /// Number of zeros from the first.
    #[arg(long, conflicts_with = "max_t")]
    count: Option<usize>,
    /// All zeros with ordinate up to this height.
    #[arg(long)]
    max_t: Option<f64>,
    #[arg(long, default_value = "zeros.tsv")]
    cache: PathBuf,
    /// Import an external `index gamma` table instead of computing.
    #[arg(long)]
    import: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SumArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    orders: Vec<u32>,
    #[arg(long, default_value = "zeros.tsv")]
    cache: PathBuf,
    /// Use only the first this many cached zeros.
    #[arg(long)]
    count: Option<usize>,
    /// Zeros per output row [default: 1 up to 10000 zeros, else 10]
    #[arg(long)]
    stride: Option<usize>,
    /// CSV destination (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    orders: Vec<u32>,
    #[arg(long, default_value = "zeros.tsv")]
    cache: PathBuf,
    #[arg(long, default_value_t = 1000)]
    primes: usize,
    /// Use only the first this many cached zeros.
    #[arg(long)]
    count: Option<usize>,
    /// Zeros per output row [default: 1 up to 10000 zeros, else 10]
    #[arg(long)]
    stride: Option<usize>,
    /// CSV destination; a gnuplot script is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Code(u8, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type CmdResult = std::result::Result<u8, Failure>;

fn parse_complex(s: &str) -> Result<Complex64, String> {
    s.trim().parse::<Complex64>().map_err(|e| format!("`{s}` is not a complex number: {e}"))
}

/// Output sinks for one invocation.
struct Io<'a> {
    out: &'a mut dyn std::io::Write,
    err: &'a mut dyn std::io::Write,
}

fn main() -> ExitCode {
    let (mut stdout, mut stderr) = (std::io::stdout().lock(), std::io::stderr());
    ExitCode::from(run(std::env::args_os(), &mut Io { out: &mut stdout, err: &mut stderr }))
}

fn run<I, T>(args: I, io: &mut Io) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(io.err, "{text}");
                exit::USAGE
            } else {
                let _ = write!(io.out, "{text}");
                0
            };
        }
    };
    if let Some(t) = cli.threads {
        // A second build in the same process fails harmlessly.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Symcheck(a) => cmd_symcheck(a, io),
        Command::Cue(a) => cmd_cue(a, cli.threads, io),
        Command::Derive(a) => cmd_derive(a, io),
        Command::Zeros(a) => cmd_zeros(a, io),
        Command::Sum(a) => cmd_sum(a, io),
        Command::Compare(a) => cmd_compare(a, io),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Code(code, msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            code
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(io.err, "error: {e}");
            match e {
                Error::Domain(_) => exit::USAGE,
                Error::UnsupportedOrder(_) => exit::UNSUPPORTED,
                Error::Parse { .. } => exit::MALFORMED,
                Error::Integrity { .. } => exit::INTEGRITY,
                _ => 1,
            }
        }
    }
}

fn print_suite(r: &SuiteReport, io: &mut Io) -> std::io::Result<()> {
    writeln!(io.out, 
        "{:<42} {:>5} instances  max rel err {:.3e}  zero-branch max {:.3e}  tol {:.0e}  {:>8.1} ms  {}",
        r.name,
        r.instances,
        r.max_rel_error,
        r.max_zero_branch,
        r.tolerance,
        r.elapsed.as_secs_f64() * 1e3,
        if r.passed() { "PASS" } else { "FAIL" }
    )
}

fn cmd_symcheck(a: &SymcheckArgs, io: &mut Io) -> CmdResult {
    let sums = combinatorial_suite(a.count.unwrap_or(500), a.seed)?;
    let toeplitz = toeplitz_suite(a.count.unwrap_or(200), a.seed)?;
    print_suite(&sums, io)?;
    print_suite(&toeplitz, io)?;
    Ok(if sums.passed() && toeplitz.passed() { 0 } else { exit::OUTSIDE_BAND })
}

fn fmt_c(z: Complex64) -> String {
    format!("{:>+22.12e} {:>+22.12e}i", z.re, z.im)
}

fn cmd_cue(a: &CueArgs, threads: Option<usize>, io: &mut Io) -> CmdResult {
    let n = a.matrix_size;
    if n == 0 {
        return Err(Failure::Code(exit::USAGE, "--matrix-size must be positive".into()));
    }
    let (observable, exact, leading, leading_label) = match (&a.shifts, &a.orders) {
        (Some(shifts), _) => {
            let exact = shifted_moment_exact(n, &ShiftSet::new(shifts.clone()));
            let scaled = ValueVector::new(shifts.iter().map(|s| s * n as f64).collect())?;
            (Observable::Shifts(shifts.clone()), exact, scaled_limit_series(&scaled, 60), "scaled limit (a = Nα)")
        }
        (None, Some(orders)) => {
            let exact = derivative_moment_exact(n, orders)?;
            (Observable::Orders(orders.clone()), exact, derivative_moment_leading(orders, n), "leading order in N")
        }
        (None, None) => unreachable!("clap requires one observable"),
    };
    let est = mc_moment(n, &observable, a.samples, a.seed, Sampler::default(), threads)?;
    let sigmas = est.deviation_sigmas(exact);
    writeln!(io.out, "N = {n}, samples = {}, seed = {}", a.samples, a.seed)?;
    writeln!(io.out, "{:<24}{}", "exact", fmt_c(exact))?;
    writeln!(io.out, "{:<24}{}", "monte carlo", fmt_c(est.mean))?;
    writeln!(io.out, "{:<24}{:>+22.12e} {:>+22.12e}", "  stderr (re, im)", est.stderr_re, est.stderr_im)?;
    writeln!(io.out, "{:<24}{}", leading_label, fmt_c(leading))?;
    let inside = sigmas < 3.0;
    writeln!(io.out, "deviation {sigmas:.3} sigma: {}", if inside { "within 3 sigma" } else { "OUTSIDE 3 sigma" })?;
    Ok(if inside { 0 } else { exit::OUTSIDE_BAND })
}

fn cmd_derive(a: &DeriveArgs, io: &mut Io) -> CmdResult {
    let primes = PrimeTable::first(a.primes);
    let p = derive_integrand(&a.orders, &primes)?;
    let integrated = p.antiderivative_coeffs();
    let orders = join(&a.orders);
    writeln!(io.out, "orders {orders}, {} primes", a.primes)?;
    if let Some(s) = symbolic_form(&a.orders) {
        writeln!(io.out, "symbolic: {s}")?;
    }
    writeln!(io.out, "{:>6} {:>24} {:>24}", "power", "integrand", "integrated (T/2π)")?;
    for m in (0..=p.degree()).rev() {
        writeln!(io.out, "{:>6} {:>+24.15e} {:>+24.15e}", format!("L^{m}"), p.coeffs()[m], integrated[m])?;
    }
    if a.orders == [1, 1] {
        let tensor = arith_deriv_tensor(2, 3, &primes)?;
        let closed = second_moment_integrand(&tensor, stieltjes_head()?)?;
        let diff = max_diff(&p, &closed);
        writeln!(io.out, "closed-form path agrees to {diff:.3e}")?;
    }
    if let Some(out) = &a.out {
        let mut csv = format!("{SCHEMA}\npower,integrand,integrated\n");
        for m in 0..=p.degree() {
            let _ = writeln!(csv, "{m},{},{}", p.coeffs()[m], integrated[m]);
        }
        fs::write(out, csv)?;
    }
    Ok(0)
}

fn max_diff(a: &LogPolynomial, b: &LogPolynomial) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n)
        .map(|m| (a.coeffs().get(m).unwrap_or(&0.0) - b.coeffs().get(m).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn cache_covers(zeros: &[ZeroRecord], limit: ZeroLimit) -> bool {
    match limit {
        ZeroLimit::MaxCount(c) => zeros.len() >= c,
        ZeroLimit::MaxT(t) => zeros.last().is_some_and(|z| z.gamma >= t),
    }
}

fn truncate(mut zeros: Vec<ZeroRecord>, limit: Option<ZeroLimit>) -> Vec<ZeroRecord> {
    match limit {
        Some(ZeroLimit::MaxCount(c)) => zeros.truncate(c),
        Some(ZeroLimit::MaxT(t)) => zeros.retain(|z| z.gamma <= t),
        None => {}
    }
    zeros
}

fn cmd_zeros(a: &ZerosArgs, io: &mut Io) -> CmdResult {
    let limit = match (a.count, a.max_t) {
        (Some(c), _) => Some(ZeroLimit::MaxCount(c)),
        (None, Some(t)) => Some(ZeroLimit::MaxT(t)),
        (None, None) => None,
    };
    if let Some(src) = &a.import {
        let zeros = truncate(import_zero_table(src)?, limit);
        write_zero_cache(&a.cache, &zeros)?;
        let last = zeros.last().expect("import is nonempty");
        writeln!(io.out, "imported {} zeros up to {} into {}", zeros.len(), last.gamma, a.cache.display())?;
        return Ok(0);
    }
    let Some(limit) = limit else {
        return Err(Failure::Code(exit::USAGE, "one of --count, --max-t or --import is required".into()));
    };
    if a.cache.exists() {
        let cached = read_zero_cache(&a.cache)?;
        if cache_covers(&cached, limit) {
            writeln!(io.out, "cache hit: {} already holds {} zeros; nothing to do", a.cache.display(), cached.len())?;
            return Ok(0);
        }
    }
    let zeros = match find_zeros(limit) {
        Ok(z) => z,
        Err(e @ Error::Integrity { .. }) => {
            writeln!(io.err, "integrity: FAILED")?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    write_zero_cache(&a.cache, &zeros)?;
    let last = zeros.last().expect("limit is positive");
    let counting = theta(last.gamma) / std::f64::consts::PI + 1.0;
    writeln!(io.out, "wrote {} zeros to {}", zeros.len(), a.cache.display())?;
    writeln!(io.out, "first {:.9}, last {:.9}", zeros[0].gamma, last.gamma)?;
    writeln!(io.out, 
        "integrity: every Gram block holds its expected number of sign changes; θ(T)/π + 1 = {counting:.3} at the last zero"
    )?;
    writeln!(io.out, "max tolerance {:.1e}", zeros.iter().map(|z| z.tolerance).fold(0.0, f64::max))?;
    Ok(0)
}

fn load_zeros(cache: &Path, count: Option<usize>) -> std::result::Result<Vec<ZeroRecord>, Failure> {
    if !cache.exists() {
        return Err(Failure::Code(
            exit::MISSING_CACHE,
            format!("zero cache {} not found; run `zeros` first", cache.display()),
        ));
    }
    let zeros = read_zero_cache(cache)?;
    if let Some(c) = count {
        if c > zeros.len() {
            return Err(Failure::Code(
                exit::MISSING_CACHE,
                format!("cache holds {} zeros, {c} requested", zeros.len()),
            ));
        }
    }
    Ok(truncate(zeros, count.map(ZeroLimit::MaxCount)))
}

fn default_stride(zeros: usize) -> usize {
    if zeros > 10_000 {
        10
    } else {
        1
    }
}

fn emit(out: Option<&Path>, text: &str, io: &mut Io) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => {
            write!(io.out, "{text}")?;
            Ok(())
        }
    }
}

fn cmd_sum(a: &SumArgs, io: &mut Io) -> CmdResult {
    let zeros = load_zeros(&a.cache, a.count)?;
    let trace = discrete_moment(&zeros, &a.orders, a.stride.unwrap_or(default_stride(zeros.len())))?;
    let mut csv = format!("{SCHEMA}\nT,re_sum,im_sum\n");
    for r in &trace.rows {
        let _ = writeln!(csv, "{},{},{}", r.t, r.sum.re, r.sum.im);
    }
    emit(a.out.as_deref(), &csv, io)?;
    Ok(0)
}

fn comparison_csv(trace: &MomentTrace) -> String {
    let mut csv = format!("{SCHEMA}\nT,re_sum,im_sum,prediction,residual_leading,residual_full\n");
    for r in &trace.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.t, r.sum.re, r.sum.im, r.prediction, r.residual_leading, r.residual_full
        );
    }
    csv
}

fn plot_script(csv: &Path, orders: &str) -> String {
    let data = csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "# gnuplot script; run from the directory holding {data}\n\
         set datafile separator ','\n\
         set terminal pngcairo size 960,600\n\
         set xlabel 'T'\n\
         set key left top\n\
         set output '{stem}_sum.png'\n\
         set title 'Re sum over zeros, orders ({orders})'\n\
         plot '{data}' skip 2 using 1:2 with lines title 'Re sum', \\\n     '' skip 2 using 1:4 with lines title 'prediction'\n\
         set output '{stem}_leading.png'\n\
         set title 'Residual against the leading term'\n\
         plot '{data}' skip 2 using 1:5 with lines title 'residual (leading)'\n\
         set output '{stem}_full.png'\n\
         set title 'Residual against the full polynomial'\n\
         plot '{data}' skip 2 using 1:6 with lines title 'residual (full)'\n"
    )
}

fn cmd_compare(a: &CompareArgs, io: &mut Io) -> CmdResult {
    let zeros = load_zeros(&a.cache, a.count)?;
    let p = derive_integrand(&a.orders, &PrimeTable::first(a.primes))?;
    let trace = discrete_moment(&zeros, &a.orders, a.stride.unwrap_or(default_stride(zeros.len())))?;
    let trace = compare(&trace, &p)?;
    let csv = comparison_csv(&trace);
    let last = trace.rows.last().expect("zeros are nonempty");
    let max_abs = |f: fn(&zetamoments::zeta::TraceRow) -> f64| trace.rows.iter().map(|r| f(r).abs()).fold(0.0, f64::max);
    let summary = format!(
        "{} zeros, {} rows; top: Re sum {:.6e}, prediction {:.6e}, relative residual {:.3e}\n\
         max |residual_leading| {:.6e}, max |residual_full| {:.6e}, max |Im|/|Re| beyond zero 1000: {}",
        zeros.len(),
        trace.rows.len(),
        last.sum.re,
        last.prediction,
        (last.residual_full / last.sum.re).abs(),
        max_abs(|r| r.residual_leading),
        max_abs(|r| r.residual_full),
        if zeros.len() > 1000 { format!("{:.3e}", max_imag_ratio(&trace, 1000)) } else { "n/a".into() },
    );
    match &a.out {
        Some(out) => {
            fs::write(out, &csv)?;
            let script = out.with_extension("gp");
            fs::write(&script, plot_script(out, &join(&a.orders)))?;
            writeln!(io.out, "{summary}")?;
            writeln!(io.out, "wrote {} and {}", out.display(), script.display())?;
        }
        None => {
            write!(io.out, "{csv}")?;
            writeln!(io.err, "{summary}")?;
        }
    }
    Ok(0)
}
