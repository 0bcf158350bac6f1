use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use taukit::matmodels::{
    bimoment_degree_for, bimoments, moment_degree_for, moments, z2_ext_det, z2_ext_series, z2_gaussian_closed,
    z_n_ext_series, z_n_rho_det,
};
use taukit::symfunc::{schur_char, schur_jt, schur_miwa};
use taukit::tau::{apply_conv, baker_akhiezer, tau_hypergeom_det, tau_hypergeom_series};
use taukit::verify::{run_suites, suites_for};
use taukit::{
    EigenList, FlowVector, MeasureSpec, MiwaShift, Partition, Report, RhoSequence, TauError, TauSeries, VerifyConfig,
};

mod config;

/// Schur functions, tau-functions and matrix-model checks.
///
/// Prints one JSON object per line on stdout and a summary on stderr. The
/// exit code is 0 iff every reported comparison passes. `taukit --config
/// run.json` reads the command and its flags from a JSON file instead.
#[derive(Parser, Debug)]
#[command(name = "taukit", version)]
struct Cli {
    /// Write the JSON lines here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a Schur function by Jacobi-Trudi and, on eigenvalues, by the bialternant.
    Schur(SchurArgs),
    /// Hypergeometric tau-functions, convolution and the Baker-Akhiezer function.
    #[command(subcommand)]
    Tau(TauCommand),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Externally coupled one- and two-matrix models.
    #[command(subcommand)]
    Matmodel(MatmodelCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Series,
    Det,
    Both,
}

#[derive(Args, Debug)]
struct SchurArgs {
    /// Parts of the partition, e.g. 2,1
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<u32>,
    /// Flow variables t_1, t_2, ...
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "eigs")]
    t: Option<Vec<f64>>,
    /// Eigenvalues a_1, ..., a_N
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eigs: Option<Vec<f64>>,
    /// Largest accepted relative deviation between the two routes.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum TauCommand {
    /// det(rho_+(a_i b_j))/(Delta(A)Delta(B)) and its Schur series.
    Hypergeom(HypergeomArgs),
    /// Apply the convolution symmetry to a stored tau-series.
    Convolve(ConvolveArgs),
    /// Baker-Akhiezer function of a stored tau-series.
    Baker(BakerArgs),
}

#[derive(Args, Debug)]
struct HypergeomArgs {
    /// exp | binomial:a=..,zeta=.. | custom:file=..
    #[arg(long)]
    rho: String,
    #[arg(long = "N")]
    n: usize,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    b: Vec<f64>,
    #[arg(long, value_enum, default_value = "both")]
    method: Method,
    #[arg(long, default_value_t = 20)]
    cutoff: u32,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ConvolveArgs {
    #[arg(long)]
    rho: String,
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; the series is printed inline when absent.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Convention {
    Standard,
    PaperLiteral,
    Both,
}

#[derive(Args, Debug)]
struct BakerArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    /// Flow variables (default all zero).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    t: Vec<f64>,
    #[arg(long, value_enum, default_value = "standard")]
    convention: Convention,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Haar samples for the Monte Carlo suites.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Matrix size of the HCIZ suite.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Tolerance overrides, e.g. prop2=1e-4,hciz=3
    #[arg(long, value_delimiter = ',')]
    tol: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum MatmodelCommand {
    /// Z_{N,rho}(A) by the determinant formula and the convolved moment series.
    One(OneArgs),
    /// Z^2_{N,rho,rho~}(A, B) for a Gaussian pair with exp(xy) coupling.
    Two(TwoArgs),
}

#[derive(Args, Debug)]
struct OneArgs {
    /// gauss:sigma=.. | table:file=..
    #[arg(long)]
    measure: String,
    #[arg(long)]
    rho: String,
    #[arg(long = "N")]
    n: usize,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    a: Vec<f64>,
    #[arg(long, value_enum, default_value = "both")]
    method: Method,
    #[arg(long, default_value_t = 18)]
    cutoff: u32,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args, Debug)]
struct TwoArgs {
    /// Both measures are exp(-sigma x^2); needs 4 sigma^2 > 1.
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    rho: String,
    #[arg(long)]
    rhot: String,
    #[arg(long = "N")]
    n: usize,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    b: Vec<f64>,
    #[arg(long, value_enum, default_value = "det")]
    method: Method,
    #[arg(long, default_value_t = 14)]
    cutoff: u32,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// Tolerance against the Gaussian closed form.
    #[arg(long, default_value_t = 1e-8)]
    closed_tol: f64,
}

type CliResult<T> = Result<T, String>;

fn ctx<T>(what: &str, r: Result<T, TauError>) -> CliResult<T> {
    r.map_err(|e| format!("{what}: {e}"))
}

/// Collected output lines and the pass state of their comparisons.
#[derive(Default)]
struct Out {
    lines: Vec<String>,
    checks: usize,
    failed: Vec<String>,
}

impl Out {
    fn value(&mut self, v: Value) {
        self.lines.push(v.to_string());
    }

    fn report(&mut self, r: Report) {
        if r.tolerance.is_some() {
            self.checks += 1;
        }
        if !r.pass {
            self.failed.push(r.quantity.clone());
        }
        self.lines.push(r.to_json_line());
    }
}

fn eigen(name: &str, v: &[f64], n: usize) -> CliResult<EigenList> {
    if v.len() != n {
        return Err(format!("--{name} needs N = {n} values, got {}", v.len()));
    }
    ctx(name, EigenList::new(v.to_vec()))
}

fn rho_arg(spec: &str) -> CliResult<RhoSequence> {
    ctx("--rho", RhoSequence::from_spec(spec, None))
}

fn cmd_schur(a: &SchurArgs, out: &mut Out) -> CliResult<()> {
    let lambda = ctx("--lambda", Partition::new(a.lambda.clone()))?;
    match (&a.t, &a.eigs) {
        (Some(t), None) => {
            let t = ctx("--t", FlowVector::new(t.clone()))?;
            out.value(json!({"quantity": "schur", "lambda": lambda, "method": "jacobi-trudi", "value": schur_jt(&lambda, &t)}));
        }
        (None, Some(e)) => {
            let e = ctx("--eigs", EigenList::new(e.clone()))?;
            let jt = schur_miwa(&lambda, &e);
            match schur_char(&lambda, &e) {
                Ok(ch) => out.report(Report::compare(
                    format!("schur {lambda}"),
                    "bialternant vs Jacobi-Trudi on Miwa variables",
                    ch,
                    jt,
                    a.tol,
                )),
                Err(TauError::Degenerate { gap }) => out.value(json!({
                    "quantity": format!("schur {lambda}"), "method": "jacobi-trudi on Miwa variables (degenerate spectrum)",
                    "value": jt, "min_gap": gap,
                })),
                Err(e) => return Err(e.to_string()),
            }
        }
        _ => return Err("schur needs exactly one of --t or --eigs".into()),
    }
    Ok(())
}

fn cmd_hypergeom(h: &HypergeomArgs, out: &mut Out) -> CliResult<()> {
    let rho = rho_arg(&h.rho)?;
    let a = eigen("a", &h.a, h.n)?;
    let b = eigen("b", &h.b, h.n)?;
    let series = if h.method != Method::Det {
        let s = ctx("series", tau_hypergeom_series(&rho, h.n as i64, &a, &b, h.cutoff))?;
        out.value(json!({
            "quantity": "tau_hypergeom", "method": format!("series, cutoff {}", h.cutoff),
            "value": s.value, "top_stratum": s.top_stratum, "converged": s.converged(),
        }));
        Some(s.value)
    } else {
        None
    };
    let det = if h.method != Method::Series {
        let d = ctx("determinant", tau_hypergeom_det(&rho, &a, &b))?;
        out.value(json!({
            "quantity": "tau_hypergeom", "method": "determinant",
            "value": d.value, "condition": d.condition, "ill_conditioned": d.ill_conditioned(),
        }));
        Some(d.value)
    } else {
        None
    };
    if let (Some(s), Some(d)) = (series, det) {
        out.report(Report::compare("tau_hypergeom", "series vs determinant", s, d, h.tol));
    }
    Ok(())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_convolve(c: &ConvolveArgs, out: &mut Out) -> CliResult<()> {
    let rho = rho_arg(&c.rho)?;
    let tau = ctx("--in", TauSeries::from_json(&read(&c.input)?))?;
    let conv = ctx("convolution", apply_conv(&rho, &tau))?;
    let text = conv.to_json();
    match &c.out {
        Some(p) => {
            fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display()))?;
            out.value(json!({"quantity": "convolve", "rho": c.rho, "terms": conv.len(), "out": p.display().to_string()}));
        }
        None => {
            let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            out.value(json!({"quantity": "convolve", "rho": c.rho, "terms": conv.len(), "series": v}));
        }
    }
    Ok(())
}

fn cmd_baker(b: &BakerArgs, out: &mut Out) -> CliResult<()> {
    let tau = ctx("--in", TauSeries::from_json(&read(&b.input)?))?;
    let t = if b.t.is_empty() { FlowVector::zeros(1) } else { ctx("--t", FlowVector::new(b.t.clone()))? };
    let shifts: &[MiwaShift] = match b.convention {
        Convention::Standard => &[MiwaShift::Standard],
        Convention::PaperLiteral => &[MiwaShift::PaperLiteral],
        Convention::Both => &[MiwaShift::Standard, MiwaShift::PaperLiteral],
    };
    for &s in shifts {
        let v = ctx("baker", baker_akhiezer(&tau, b.z, &t, s))?;
        out.value(json!({"quantity": "baker_akhiezer", "method": s.name(), "z": b.z, "value": v}));
    }
    Ok(())
}

fn cmd_verify(v: &VerifyArgs, out: &mut Out) -> CliResult<Vec<String>> {
    let mut cfg = VerifyConfig {
        seed: v.seed,
        samples: v.samples,
        n: v.n,
        ..Default::default()
    };
    for kv in &v.tol {
        let (k, x) = kv.split_once('=').ok_or_else(|| format!("--tol expects key=value, got {kv:?}"))?;
        let x: f64 = x.parse().map_err(|_| format!("--tol {k}: not a number: {x:?}"))?;
        ctx("--tol", cfg.tolerances.set(k, x))?;
    }
    let suites = ctx("--suite", suites_for(&v.suite))?;
    let mut summary = Vec::new();
    for (suite, reports) in ctx("verify", run_suites(&suites, &cfg))? {
        let ok = reports.iter().all(|r| r.pass);
        summary.push(format!("{:<20} {}", suite.name(), if ok { "pass" } else { "FAIL" }));
        for r in reports {
            out.report(r);
        }
    }
    Ok(summary)
}

fn cmd_one(o: &OneArgs, out: &mut Out) -> CliResult<()> {
    let m = ctx("--measure", MeasureSpec::from_spec(&o.measure, None))?;
    let rho = rho_arg(&o.rho)?;
    let a = eigen("a", &o.a, o.n)?;
    let det = if o.method != Method::Series {
        let d = ctx("determinant", z_n_rho_det(&rho, &m, &a))?;
        out.value(json!({"quantity": "z_n_rho", "method": "determinant", "value": d.value, "condition": d.condition}));
        Some(d.value)
    } else {
        None
    };
    let series = if o.method != Method::Det {
        let mm = ctx("moments", moments(&m, moment_degree_for(o.cutoff, o.n)))?;
        let s = ctx("series", z_n_ext_series(&rho, &mm, &a, o.cutoff))?;
        out.value(json!({
            "quantity": "z_n_rho", "method": format!("series, cutoff {}", o.cutoff),
            "value": s.value, "top_stratum": s.top_stratum,
        }));
        Some(s.value)
    } else {
        None
    };
    if let (Some(s), Some(d)) = (series, det) {
        out.report(Report::compare("z_n_rho", "series vs determinant", s, d, o.tol));
    }
    Ok(())
}

fn cmd_two(t: &TwoArgs, out: &mut Out) -> CliResult<()> {
    let q = 4.0 * t.sigma * t.sigma - 1.0;
    if !(q > 0.0) {
        return Err(format!("coupled integral diverges: need 4 sigma^2 > 1, got sigma = {}", t.sigma));
    }
    let g = ctx("--sigma", MeasureSpec::gauss(t.sigma))?;
    let rho = rho_arg(&t.rho)?;
    let rho_t = ctx("--rhot", RhoSequence::from_spec(&t.rhot, None))?;
    let a = eigen("a", &t.a, t.n)?;
    let b = eigen("b", &t.b, t.n)?;
    let det = ctx("determinant", z2_ext_det(&rho, &rho_t, &g, &g, &a, &b))?;
    out.value(json!({"quantity": "z2", "method": "determinant", "value": det.value, "condition": det.condition}));
    if t.method != Method::Det {
        let bm = ctx("bimoments", bimoments(&g, &g, bimoment_degree_for(t.cutoff, t.n)))?;
        let s = ctx("series", z2_ext_series(&rho, &rho_t, &bm, &a, &b, t.cutoff))?;
        out.report(Report::compare(
            "z2",
            format!("series (cutoff {}) vs determinant", t.cutoff),
            s.value,
            det.value,
            t.tol,
        ));
    }
    if t.rho.trim() == "exp" && t.rhot.trim() == "exp" {
        let c = ctx("closed form", z2_gaussian_closed(t.sigma, &a, &b))?;
        out.report(Report::compare("z2_gaussian", "rederived closed form vs determinant", c.rederived, det.value, t.closed_tol));
        out.report(Report::info("z2_gaussian_paper_literal", "displayed constants vs determinant", c.paper_literal, det.value));
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<(Out, Vec<String>)> {
    let mut out = Out::default();
    let mut summary = Vec::new();
    match &cli.command {
        Command::Schur(a) => cmd_schur(a, &mut out)?,
        Command::Tau(TauCommand::Hypergeom(h)) => cmd_hypergeom(h, &mut out)?,
        Command::Tau(TauCommand::Convolve(c)) => cmd_convolve(c, &mut out)?,
        Command::Tau(TauCommand::Baker(b)) => cmd_baker(b, &mut out)?,
        Command::Verify(v) => summary = cmd_verify(v, &mut out)?,
        Command::Matmodel(MatmodelCommand::One(o)) => cmd_one(o, &mut out)?,
        Command::Matmodel(MatmodelCommand::Two(t)) => cmd_two(t, &mut out)?,
    }
    Ok((out, summary))
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    let (out, summary) = match run(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut text = out.lines.join("\n");
    text.push('\n');
    let written = match &cli.output {
        Some(p) => fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for line in &summary {
        eprintln!("{line}");
    }
    if out.failed.is_empty() {
        if out.checks > 0 {
            eprintln!("{} checks passed", out.checks);
        }
        ExitCode::SUCCESS
    } else {
        eprintln!("{} of {} checks failed: {}", out.failed.len(), out.checks, out.failed.join(", "));
        ExitCode::from(1)
    }
}
