//! Command-line front end.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for parse and usage errors, 3 when a lattice enumeration exceeds its
//! budget.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::Rational64;
use serde_json::json;

use crate::arith::is_prime;
use crate::error::Error;
use crate::eta::{eta_quotient_expansion, EtaQuotient};
use crate::k3cases::{
    assemble_global, eigenform_check, find_case, global_inverse, load_cases, modularity_report, modularity_reports,
    seed_cases, CaseRecord,
};
use crate::orbifold::{
    cyclic_hilb_oracle, half_norm, local_z, nakajima_coefficient, nakajima_multivariate, Route,
};
use crate::qseries::{parse_rational, Exponent, QSeries};
use crate::refine::{chi_y_series, hodge_series_y, zbir_euler_consistency};
use crate::rootsys::{
    ade_data, order_for_coefficients, strange_formula_residual, theta_eta_identity_residual, theta_series, AdeType,
};
use crate::suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Exact q-series for Hilbert schemes of points on ADE quotients and K3 quotients.
#[derive(Debug, Parser)]
#[command(name = "etaforge", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand an eta quotient such as "1^8 2^8".
    Expand {
        #[arg(long, value_parser = parse_eta)]
        eta: EtaQuotient,
        /// Exclusive exponent bound, e.g. 100 or 57/8.
        #[arg(long, value_parser = parse_order)]
        order: Exponent,
        #[arg(long)]
        json: bool,
    },
    /// Shifted root-lattice theta function of an ADE type.
    Theta {
        #[arg(long, value_parser = parse_type)]
        delta: AdeType,
        #[arg(long, value_parser = parse_order)]
        order: Exponent,
        #[arg(long)]
        json: bool,
    },
    /// Local series of an ADE type by one of three constructions.
    Local {
        #[arg(long, value_parser = parse_type)]
        delta: AdeType,
        #[arg(long, value_parser = parse_order)]
        order: Exponent,
        #[arg(long, value_parser = parse_route, default_value = "nakajima")]
        route: Route,
        #[arg(long)]
        json: bool,
    },
    /// Global series of a K3 quotient; `--report` prints the JSON modularity report.
    Case {
        /// Case file; the bundled table is used when omitted.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Xiao number; every case in the table when omitted.
        #[arg(long)]
        xiao: Option<u32>,
        #[arg(long, default_value_t = 100)]
        order: i64,
        #[arg(long)]
        report: bool,
    },
    /// Verify one family of identities.
    Verify {
        #[arg(long, value_enum)]
        which: Which,
        /// Restrict to one ADE type where the family is indexed by type.
        #[arg(long, value_parser = parse_type)]
        delta: Option<AdeType>,
        /// Exponent bound, or the length bound for `oracle`.
        #[arg(long, value_parser = parse_order)]
        order: Option<Exponent>,
    },
    /// Hecke eigenform test of the modular form of a case.
    Hecke {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        xiao: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,11,13")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 100)]
        order: i64,
    },
    /// chi_y series, Hodge series, or the birational Euler check.
    #[command(group(ArgGroup::new("kind").required(true).multiple(true).args(["chiy", "hodge", "zbir"])))]
    Refine {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        xiao: u32,
        #[arg(long)]
        chiy: bool,
        #[arg(long)]
        hodge: bool,
        #[arg(long)]
        zbir: bool,
        #[arg(long, default_value_t = 20)]
        order: i64,
        #[arg(long)]
        json: bool,
    },
    /// Run every acceptance criterion and print a pass/fail table.
    Suite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Three constructions of the local series agree; A types give 1/eta.
    Thm12,
    /// Theta functions equal their eta quotients.
    Thm13,
    /// Structure of the global eta products for every case.
    Thm14,
    Strange,
    Rigid,
    Oracle,
}

fn parse_eta(s: &str) -> Result<EtaQuotient, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_order(s: &str) -> Result<Exponent, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_type(s: &str) -> Result<AdeType, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_route(s: &str) -> Result<Route, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Parse(_) | Error::InvalidType(_) | Error::InvalidCase { .. } => EXIT_PARSE,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Failure of a command: a library error or a usage problem found after parsing.
enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<bool, Failure>;

/// Parses `args` (program name first) and runs the command, writing to the
/// given streams. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_PARSE
        }
    }
}

/// Runs with the process arguments and standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Expand { eta, order, json } => {
            let s = eta_quotient_expansion(&eta, order);
            print_series(out, &s, json)?;
            Ok(true)
        }
        Command::Theta { delta, order, json } => {
            let s = theta_series(delta, order)?;
            print_series(out, &s, json)?;
            Ok(true)
        }
        Command::Local { delta, order, route, json } => {
            let s = local_z(delta, order, route)?;
            print_series(out, &s, json)?;
            Ok(true)
        }
        Command::Case { file, xiao, order, report } => cmd_case(out, file, xiao, order, report),
        Command::Verify { which, delta, order } => cmd_verify(out, which, delta, order),
        Command::Hecke { file, xiao, primes, order } => {
            if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
                return Err(Failure::Usage(format!("{p} is not prime")));
            }
            let cases = load(file)?;
            let case = pick(&cases, xiao)?;
            let r = eigenform_check(case, &primes, order)?;
            writeln!(out, "xiao {} weight {} character ({}/.)", xiao, r.weight, r.character_discriminant)?;
            for c in &r.checks {
                writeln!(out, "{}  {}  {}", status(c.pass), c.name, c.detail)?;
            }
            Ok(r.passed())
        }
        Command::Refine { file, xiao, chiy, hodge, zbir, order, json } => {
            cmd_refine(out, file, xiao, (chiy, hodge, zbir), order, json)
        }
        Command::Suite => {
            let results = suite::run_all();
            let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            writeln!(out, "etaforge acceptance suite")?;
            writeln!(out, "timestamp: {stamp}")?;
            write!(out, "{}", suite::format_table(&results))?;
            let passed = results.iter().filter(|r| r.pass).count();
            writeln!(out, "{passed}/{} criteria pass", results.len())?;
            Ok(passed == results.len())
        }
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn print_series(out: &mut dyn Write, s: &QSeries, json: bool) -> std::io::Result<()> {
    if json {
        writeln!(out, "{}", s.to_json())
    } else {
        writeln!(out, "{}", s.to_text())
    }
}

fn load(file: Option<PathBuf>) -> std::result::Result<Vec<CaseRecord>, Failure> {
    match file {
        None => Ok(seed_cases()),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(load_cases(&text)?)
        }
    }
}

fn pick(cases: &[CaseRecord], xiao: u32) -> std::result::Result<&CaseRecord, Failure> {
    find_case(cases, xiao).ok_or_else(|| Failure::Usage(format!("no case with xiao number {xiao}")))
}

fn cmd_case(out: &mut dyn Write, file: Option<PathBuf>, xiao: Option<u32>, order: i64, report: bool) -> CmdResult {
    let cases = load(file)?;
    let selected: Vec<CaseRecord> = match xiao {
        Some(x) => vec![pick(&cases, x)?.clone()],
        None => cases,
    };
    if report {
        let reports = modularity_reports(&selected, order, order.max(0) as usize)?;
        let ok = reports.iter().all(|r| r.passed());
        let value = if reports.len() == 1 {
            reports[0].to_json()
        } else {
            json!(reports.iter().map(|r| r.to_json()).collect::<Vec<_>>())
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json"))?;
        return Ok(ok);
    }
    for case in &selected {
        let z = assemble_global(case)?;
        let inv = global_inverse(case)?;
        writeln!(out, "case {case}")?;
        writeln!(out, "  a = {}, e(X/G) = {}", case.a, case.euler_quotient)?;
        writeln!(out, "  Z = {z}")?;
        writeln!(out, "  Z^-1 = {inv} (weight {})", inv.weight())?;
        writeln!(out, "  Z^-1 = {}", eta_quotient_expansion(&inv, Rational64::from_integer(order)))?;
    }
    Ok(true)
}

/// Types of rank at most 8.
fn default_types() -> Vec<AdeType> {
    AdeType::all_up_to(8)
}

fn cmd_verify(out: &mut dyn Write, which: Which, delta: Option<AdeType>, order: Option<Exponent>) -> CmdResult {
    let mut all = true;
    let mut line = |out: &mut dyn Write, pass: bool, text: String| -> std::io::Result<()> {
        all &= pass;
        writeln!(out, "{}  {text}", status(pass))
    };
    match which {
        Which::Strange => {
            let types = delta.map(|t| vec![t]).unwrap_or_else(suite::strange_targets);
            for t in types {
                let r = strange_formula_residual(t)?;
                line(out, r == Rational64::from_integer(0), format!("{t}  residual {r}"))?;
            }
        }
        Which::Thm12 => {
            let order = order.unwrap_or(Rational64::from_integer(20));
            let types = delta.map(|t| vec![t]).unwrap_or_else(default_types);
            for t in types {
                let n = local_z(t, order, Route::Nakajima)?;
                let e = local_z(t, order, Route::Eta)?;
                let th = local_z(t, order, Route::Theta)?;
                let mut pass = n == e && e == th;
                if t.is_a() {
                    pass &= n == eta_quotient_expansion(&EtaQuotient::eta_power(1, -1), order);
                }
                line(out, pass, format!("{t}  eta, theta and orbifold routes below q^{order}"))?;
            }
        }
        Which::Thm13 => {
            let targets: Vec<(AdeType, Exponent)> = match (delta, order) {
                (Some(t), Some(o)) => vec![(t, o)],
                (Some(t), None) => vec![(t, order_for_coefficients(t, 60)?)],
                (None, o) => suite::theta_targets()
                    .into_iter()
                    .map(|(t, c)| Ok((t, o.map_or_else(|| order_for_coefficients(t, c), Ok)?)))
                    .collect::<crate::Result<_>>()?,
            };
            for (t, o) in targets {
                let res = theta_eta_identity_residual(t, o)?;
                let text = match res.valuation() {
                    None => format!("{t}  residual zero below q^{o}"),
                    Some(v) => format!("{t}  residual nonzero at q^{v}"),
                };
                line(out, res.is_zero(), text)?;
            }
        }
        Which::Thm14 => {
            let len = order.map(|o| o.ceil().to_integer()).unwrap_or(50).max(2);
            for case in seed_cases() {
                let r = modularity_report(&case, len, len as usize)?;
                let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                let text = if failed.is_empty() {
                    format!("xiao {:>2}  Z^-1 = {}  weight {}  level {}", r.xiao, r.eta_quotient, r.weight, r.level)
                } else {
                    format!("xiao {:>2}  failed {}", r.xiao, failed.join(", "))
                };
                line(out, failed.is_empty(), text)?;
            }
        }
        Which::Rigid => {
            let types = delta.map(|t| vec![t]).unwrap_or_else(suite::rigid_targets);
            for t in types {
                let data = ade_data(t)?;
                let vs = suite::rigid_vectors(t, 100, suite::RIGID_SEED);
                let mut bad = None;
                for mu in &vs {
                    if nakajima_coefficient(t, mu, half_norm(&data, mu))? != BigInt::from(1) {
                        bad = Some(mu.clone());
                        break;
                    }
                }
                let text = match &bad {
                    None => format!("{t}  coefficient 1 for {} random vectors", vs.len()),
                    Some(mu) => format!("{t}  coefficient differs from 1 at {mu:?}"),
                };
                line(out, bad.is_none(), text)?;
            }
        }
        Which::Oracle => {
            let n = order.map(|o| o.to_integer()).unwrap_or(12);
            if n < 0 {
                return Err(Failure::Usage("length bound must be nonnegative".into()));
            }
            let ks: Vec<usize> = match delta {
                Some(AdeType::A(n)) => vec![n + 1],
                Some(t) => return Err(Failure::Usage(format!("the oracle covers A types only, not {t}"))),
                None => vec![2, 3],
            };
            for k in ks {
                let o = cyclic_hilb_oracle(k, n as usize)?;
                let m = nakajima_multivariate(AdeType::A(k - 1), n as u64)?;
                line(out, o == m, format!("k = {k}  {} multidegrees up to total degree {n}", o.len()))?;
            }
        }
    }
    Ok(all)
}

fn cmd_refine(
    out: &mut dyn Write,
    file: Option<PathBuf>,
    xiao: u32,
    (chiy, hodge, zbir): (bool, bool, bool),
    order: i64,
    json: bool,
) -> CmdResult {
    let mut all = true;
    if hodge {
        let h = hodge_series_y(order.max(0) as usize);
        if json {
            writeln!(out, "{}", h.to_json())?;
        } else {
            for (n, p) in h.coeffs.iter().enumerate() {
                let terms: Vec<String> = p.iter().map(|((a, b), c)| format!("{c}*u^{a}v^{b}")).collect();
                writeln!(out, "t^{n}: {}", terms.join(" + "))?;
            }
        }
    }
    if chiy || zbir {
        let cases = load(file)?;
        let case = pick(&cases, xiao)?;
        if chiy {
            let s = chi_y_series(case, order)?;
            let z = eta_quotient_expansion(&assemble_global(case)?, Rational64::from_integer(s.order()));
            let pass = s.eval_y_one() == z && s.is_palindromic();
            all &= pass;
            if json {
                writeln!(out, "{}", s.to_json())?;
            } else {
                writeln!(out, "{s}")?;
                writeln!(out, "{}  y = 1 gives Z, symmetric under y -> 1/y", status(pass))?;
            }
        }
        if zbir {
            let pass = zbir_euler_consistency(case, order);
            all &= pass;
            writeln!(out, "{}  xiao {xiao}: birational Euler product is 1 below q^{order}", status(pass))?;
        }
    }
    Ok(all)
}
