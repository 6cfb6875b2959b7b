//! Command-line front end. Reports go to stdout (or `--out`), a short summary to stderr.
//!
//! Exit codes: 0 when every check passes, 2 when a bound is violated, 1 on any error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::certifier::{
    certify_theorem_scheduled, sweep, Spacing, SweepReport, SweepSpec, TheoremId, TheoremMode,
    TheoremReport,
};
use crate::constants::universal;
use crate::empirical::{
    compound_poisson, kolmogorov_to_normal, moments, standardize, verify_inequality, BoundKind,
    LatticeDistribution, MomentProfile, VerificationRow,
};
use crate::error::{Error, Result};
use crate::quadrature::tolerance_from_env;
use crate::random_sums::{poisson_be_bound, HeavyTail, MixedBound, Scenario};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sharpbe",
    version,
    about = "Certified Berry-Esseen constants and bound evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for independent cells and rows.
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Spot,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Universal constants.
    Constants,
    /// Certify the constant of one of the two main inequalities.
    Certify(CertifyArgs),
    /// Bracketed sweep of C(eps) over an eps range.
    Sweep(SweepArgs),
    /// Exact distances for normalized sums of a lattice law against a bound.
    Empirical(EmpiricalArgs),
    /// Exact distance of a standardized compound Poisson sum against its bound.
    Poisson(PoissonArgs),
    /// Bounds for mixed Poisson sums.
    Mixed(MixedArgs),
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub theorem: u8,
    #[arg(long, value_enum, default_value_t = Mode::Spot)]
    pub mode: Mode,
    #[arg(long)]
    pub target: Option<f64>,
    /// Tail schedule `eps_max:N,...`; `inf` closes the range.
    #[arg(long)]
    pub schedule: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub eps_lo: f64,
    #[arg(long)]
    pub eps_hi: f64,
    #[arg(long)]
    pub target: f64,
    #[arg(long, default_value_t = 25)]
    pub cells: usize,
    /// `geometric`, `uniform` or `equalized[:pilot]`.
    #[arg(long, default_value = "equalized:12")]
    pub spacing: String,
    #[arg(long, default_value_t = 0)]
    pub max_depth: usize,
    #[arg(long)]
    pub schedule: Option<String>,
    /// Also maximize over finite n.
    #[arg(long)]
    pub include_finite: bool,
}

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    /// `rademacher`, `two_point:p`, a JSON file or inline JSON.
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value_t = 20)]
    pub n_max: u64,
    /// `theorem1`, `theorem2` or `classical:C`.
    #[arg(long, default_value = "theorem2")]
    pub bound: String,
}

#[derive(Debug, Args)]
pub struct PoissonArgs {
    #[arg(long)]
    pub dist: String,
    /// One or more intensities, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tail_tol: f64,
}

#[derive(Debug, Args)]
pub struct MixedArgs {
    /// `gamma:r,t`, `exponential:t`, `heavy:alpha,t` or `structural:ell,s,e_abs_v,delta,t`.
    #[arg(long)]
    pub scenario: String,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta3: f64,
}

struct Outcome {
    report: String,
    summary: String,
    passed: bool,
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome) {
                eprintln!("error: {e}");
                return EXIT_ERROR;
            }
            eprint!("{}", outcome.summary);
            if outcome.passed {
                EXIT_PASS
            } else {
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, &outcome.report),
        None => {
            print!("{}", outcome.report);
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let tol = tolerance_from_env()?;
    let threads = cli.parallelism.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Constants => cmd_constants(cli.format, tol),
        Command::Certify(a) => cmd_certify(a, cli.format, tol),
        Command::Sweep(a) => cmd_sweep(a, cli.format, tol),
        Command::Empirical(a) => cmd_empirical(a, cli.format),
        Command::Poisson(a) => cmd_poisson(a, cli.format),
        Command::Mixed(a) => cmd_mixed(a, cli.format),
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// `x` with 12 significant digits.
fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (11 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Serialize)]
struct ConstantsReport {
    theta0: f64,
    kappa: f64,
    esseen_lower: f64,
    bhattacharya_bound: f64,
    tolerance: f64,
}

fn cmd_constants(format: Format, tol: f64) -> Result<Outcome> {
    let u = universal();
    let rows = [
        ("theta0", u.theta0),
        ("kappa", u.kappa),
        ("esseen_lower", u.esseen_lower),
        ("bhattacharya_bound", u.bhattacharya_bound),
    ];
    let report = match format {
        Format::Json => json(&ConstantsReport {
            theta0: u.theta0,
            kappa: u.kappa,
            esseen_lower: u.esseen_lower,
            bhattacharya_bound: u.bhattacharya_bound,
            tolerance: tol,
        }),
        Format::Csv => {
            let mut s = String::from("name,value\n");
            for (name, v) in rows {
                let _ = writeln!(s, "{name},{v:e}");
            }
            s
        }
    };
    let summary = rows
        .iter()
        .map(|(name, v)| format!("{name}={}", sig12(*v)))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    Ok(Outcome {
        report,
        summary,
        passed: true,
    })
}

/// Parses `eps_max:N,...`.
pub fn parse_schedule(s: &str) -> Result<Vec<(f64, u64)>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (e, n) = part
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("schedule entry `{part}` needs eps_max:N")))?;
        let e: f64 = match e.trim() {
            "inf" => f64::INFINITY,
            v => v
                .parse()
                .map_err(|_| Error::Input(format!("bad eps_max `{v}`")))?,
        };
        let n: u64 = n
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad N `{n}`")))?;
        out.push((e, n));
    }
    if out.is_empty() {
        return Err(Error::Input("empty schedule".into()));
    }
    if out.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::Input("schedule eps_max values must increase".into()));
    }
    Ok(out)
}

fn parse_spacing(s: &str) -> Result<Spacing> {
    match s.trim() {
        "geometric" => Ok(Spacing::Geometric),
        "uniform" => Ok(Spacing::Uniform),
        "equalized" => Ok(Spacing::Equalized { pilot: 12 }),
        other => other
            .strip_prefix("equalized:")
            .and_then(|p| p.parse().ok())
            .map(|pilot| Spacing::Equalized { pilot })
            .ok_or_else(|| Error::Input(format!("unknown spacing `{other}`"))),
    }
}

fn cell_summary(report: &SweepReport, gates: bool, out: &mut String) {
    for c in &report.cells {
        let _ = writeln!(
            out,
            "cell [{:.5}, {:.5}] depth {} C(eps2)={:.6} bracket={:.6} {}",
            c.eps1,
            c.eps2,
            c.depth,
            c.c_eps2,
            c.bracket,
            match (c.passed, gates) {
                (true, _) => "ok",
                (false, true) => "FAIL",
                (false, false) => "above",
            }
        );
    }
    let _ = writeln!(
        out,
        "sweep max {:.6} against {} ({})",
        report.global_max,
        report.target,
        if report.passed { "pass" } else { "fail" }
    );
}

fn theorem_csv(r: &TheoremReport) -> String {
    let mut s = String::from("kind,label,value,limit,passed\n");
    for g in &r.regimes {
        let _ = writeln!(
            s,
            "regime,{},{:e},{:e},{}",
            g.name, g.value, g.limit, g.passed
        );
    }
    for (kind, list) in [("spot", &r.spots), ("neighbourhood", &r.neighbourhood)] {
        for c in list {
            let _ = writeln!(
                s,
                "{kind},{},{:e},{:e},{}",
                c.label, c.certificate.c, c.limit, c.passed
            );
        }
    }
    if let Some(sw) = &r.sweep {
        let _ = writeln!(
            s,
            "sweep,{} max,{:e},{:e},{}",
            sw.mode, sw.global_max, sw.target, sw.passed
        );
    }
    s
}

fn cmd_certify(a: &CertifyArgs, format: Format, tol: f64) -> Result<Outcome> {
    let id = if a.theorem == 1 {
        TheoremId::One
    } else {
        TheoremId::Two
    };
    let mode = match a.mode {
        Mode::Spot => TheoremMode::Spot,
        Mode::Full => TheoremMode::Full,
    };
    let schedule = a.schedule.as_deref().map(parse_schedule).transpose()?;
    let r = certify_theorem_scheduled(id, mode, a.target, schedule, tol)?;
    let report = match format {
        Format::Json => r.to_json() + "\n",
        Format::Csv => theorem_csv(&r),
    };
    let mut summary = String::new();
    for g in &r.regimes {
        let _ = writeln!(
            summary,
            "{}: {:.6} <= {:.6} {}",
            g.name,
            g.value,
            g.limit,
            ok(g.passed)
        );
    }
    for c in r.spots.iter().chain(&r.neighbourhood) {
        let _ = writeln!(
            summary,
            "{}: C={:.6} <= {:.6} {}",
            c.label,
            c.certificate.c,
            c.limit,
            ok(c.passed)
        );
    }
    if let Some(sw) = &r.sweep {
        if !r.sweep_gates {
            summary.push_str("informational sweep:\n");
        }
        cell_summary(sw, r.sweep_gates, &mut summary);
    }
    let _ = writeln!(
        summary,
        "certification {}",
        if r.passed { "passed" } else { "FAILED" }
    );
    Ok(Outcome {
        report,
        summary,
        passed: r.passed,
    })
}

fn ok(p: bool) -> &'static str {
    if p {
        "ok"
    } else {
        "FAIL"
    }
}

fn cmd_sweep(a: &SweepArgs, format: Format, tol: f64) -> Result<Outcome> {
    let mut spec = SweepSpec::new(a.k, a.eps_lo, a.eps_hi, a.target);
    spec.cells = a.cells;
    spec.spacing = parse_spacing(&a.spacing)?;
    spec.max_depth = a.max_depth;
    spec.include_finite = a.include_finite;
    spec.search = spec.search.with_tol(tol);
    if let Some(s) = &a.schedule {
        spec.n_tail_schedule = parse_schedule(s)?;
    }
    let r = sweep(&spec)?;
    let report = match format {
        Format::Json => r.to_json() + "\n",
        Format::Csv => r.to_csv(),
    };
    let mut summary = String::new();
    cell_summary(&r, true, &mut summary);
    Ok(Outcome {
        report,
        summary,
        passed: r.passed,
    })
}

fn load_dist(spec: &str) -> Result<LatticeDistribution> {
    let path = std::path::Path::new(spec);
    if !spec.trim_start().starts_with('{') && path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {spec}: {e}")))?;
        return LatticeDistribution::from_json(&text);
    }
    LatticeDistribution::parse(spec)
}

#[derive(Serialize)]
struct EmpiricalReport {
    bound: BoundKind,
    beta3: f64,
    rows: Vec<VerificationRow>,
    passed: bool,
}

fn cmd_empirical(a: &EmpiricalArgs, format: Format) -> Result<Outcome> {
    if a.n_max == 0 {
        return Err(Error::Input("--n-max must be at least 1".into()));
    }
    let dist = standardize(&load_dist(&a.dist)?)?;
    let bound = BoundKind::parse(&a.bound)?;
    let beta3 = moments(&dist)?.beta3;
    let rows = verify_inequality(&dist, 1..=a.n_max, bound)?;
    let passed = rows.iter().all(|r| r.pass);
    let report = match format {
        Format::Json => json(&EmpiricalReport {
            bound,
            beta3,
            rows: rows.clone(),
            passed,
        }),
        Format::Csv => {
            let mut s = String::from("n,rho,bound,margin,pass\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{:e},{:e},{:e},{}",
                    r.n, r.rho, r.bound, r.margin, r.pass
                );
            }
            s
        }
    };
    let failing = rows.iter().filter(|r| !r.pass).count();
    let summary = format!(
        "{} rows, {} passing, min margin {:.6e}\n",
        rows.len(),
        rows.len() - failing,
        rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    );
    Ok(Outcome {
        report,
        summary,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
struct PoissonRow {
    lambda: f64,
    rho: f64,
    truncation_mass: f64,
    truncation_m: u64,
    bound: f64,
    margin: f64,
    pass: bool,
}

fn cmd_poisson(a: &PoissonArgs, format: Format) -> Result<Outcome> {
    use rayon::prelude::*;
    let dist = load_dist(&a.dist)?;
    let m = moments(&dist)?;
    let rows: Vec<PoissonRow> = a
        .lambda
        .par_iter()
        .map(|&lambda| {
            let bound = poisson_be_bound(&m, lambda)?;
            let cp = compound_poisson(&dist, lambda, a.tail_tol)?;
            let rho = kolmogorov_to_normal(&cp.dist);
            // the truncated law is within truncation_mass of the full one at every point
            let lower = rho - cp.truncation_mass;
            Ok(PoissonRow {
                lambda,
                rho,
                truncation_mass: cp.truncation_mass,
                truncation_m: cp.m,
                bound,
                margin: bound - lower,
                pass: lower <= bound,
            })
        })
        .collect::<Result<_>>()?;
    let passed = rows.iter().all(|r| r.pass);
    let report = match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut s = String::from("lambda,rho,truncation_mass,bound,margin,pass\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{:e},{:e},{:e},{:e},{}",
                    r.lambda, r.rho, r.truncation_mass, r.bound, r.margin, r.pass
                );
            }
            s
        }
    };
    let mut summary = String::new();
    for r in &rows {
        let _ = writeln!(
            summary,
            "lambda={} rho={:.6} bound={:.6} {}",
            r.lambda,
            r.rho,
            r.bound,
            ok(r.pass)
        );
    }
    Ok(Outcome {
        report,
        summary,
        passed,
    })
}

#[derive(Serialize)]
struct MixedReport {
    scenario: Scenario,
    moments: MomentProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    heavy_tail: Option<HeavyTail>,
    bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
}

fn cmd_mixed(a: &MixedArgs, format: Format) -> Result<Outcome> {
    let scenario = Scenario::parse(&a.scenario)?;
    let m = MomentProfile::new(a.mu, a.sigma2, a.beta3)?;
    let heavy_tail = match scenario {
        Scenario::Heavy { alpha, t } => Some(HeavyTail::new(alpha, t)?),
        _ => None,
    };
    let MixedBound { bound, epsilon, .. } = scenario.evaluate(&m)?;
    let epsilon = epsilon.is_finite().then_some(epsilon);
    let report = match format {
        Format::Json => json(&MixedReport {
            scenario,
            moments: m,
            heavy_tail,
            bound,
            epsilon,
        }),
        Format::Csv => format!(
            "scenario,bound,epsilon\n{},{:e},{}\n",
            a.scenario.replace(',', ";"),
            bound,
            epsilon.map_or(String::new(), |e| format!("{e:e}"))
        ),
    };
    Ok(Outcome {
        report,
        summary: format!("bound={}\n", sig12(bound)),
        passed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(3.995895679077886), "3.99589567908");
        assert_eq!(sig12(0.09916191351477184), "0.0991619135148");
        assert_eq!(sig12(123.0), "123.000000000");
    }

    #[test]
    fn schedule_parsing() {
        assert_eq!(
            parse_schedule("0.1:600, 0.2:300,inf:200").unwrap(),
            vec![(0.1, 600), (0.2, 300), (f64::INFINITY, 200)]
        );
        assert!(parse_schedule("0.2:1,0.1:2").is_err());
        assert!(parse_schedule("x").is_err());
        assert!(parse_schedule("").is_err());
    }

    #[test]
    fn spacing_parsing() {
        assert_eq!(
            parse_spacing("equalized:7").unwrap(),
            Spacing::Equalized { pilot: 7 }
        );
        assert_eq!(parse_spacing("uniform").unwrap(), Spacing::Uniform);
        assert!(parse_spacing("log").is_err());
    }

    #[test]
    fn argument_errors_exit_one() {
        assert_eq!(run(["sharpbe", "certify", "--theorem", "3"]), EXIT_ERROR);
        assert_eq!(run(["sharpbe", "nonsense"]), EXIT_ERROR);
    }
}
