//! Command-line front end.
//!
//! Every subcommand produces long-form rows `(quantity, param, at, value)`
//! with all numbers as decimal strings. JSON output wraps them as
//!
//! ```text
//! { "schema_version": 1, "inputs": {...}, "results": [rows...],
//!   "provenance": { "tool_version", "seed", "precision_bits", "tol" } }
//! ```
//!
//! and CSV output writes the same rows under a header, followed by
//! `provenance` rows. Exit codes: 0 success, 2 invalid input, 3 numerical
//! failure, 1 I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymptotics::{
    all_real_log_asymptotic, clt_log_density_with, clt_parameters, energy_breakdown, ld_rate,
    no_real_log_asymptotic, small_alpha_rate,
};
use crate::error::{Error, Result};
use crate::exact_dist::{exact_moments, factor_weights, probability, probability_table};
use crate::exactnum::HighPrecFloat;
use crate::intermediate::{intermediate_rate, scaled_log_z, tail_exponents};
use crate::montecarlo::{compare_exact_empirical, estimate_distribution};

pub const SCHEMA_VERSION: u32 = 1;
pub const PRECISION_ENV: &str = "SPHERICAL_REALS_PRECISION";

#[derive(Parser, Debug)]
#[command(
    name = "spherical-reals",
    version,
    about = "Real-eigenvalue statistics of the real spherical ensemble A B^-1"
)]
pub struct Cli {
    /// Working precision in bits for exact values.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 256, value_parser = clap::value_parser!(u32).range(53..=1_000_000))]
    pub precision: u32,

    /// Absolute tolerance for quadrature and root finding.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Significant digits printed for each value.
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    pub digits: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the payload here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Exact p_{N,M}, for one M or the whole table.
    Exact(ExactArgs),
    /// Exact mean and variance of the real-eigenvalue count.
    Moments(MomentsArgs),
    /// Large-deviation rate and its electrostatic breakdown.
    Ldp(LdpArgs),
    /// Intermediate-deviation exponent for M = x sqrt(N).
    Idp(IdpArgs),
    /// Local CLT log density over a window of M.
    Clt(CltArgs),
    /// All-real and no-real asymptotes.
    Asym(AsymArgs),
    /// Convergence of log Z_N(xi) / sqrt(N/2) to its limit.
    Propcheck(PropcheckArgs),
    /// Monte Carlo estimate of the distribution.
    Mc(McArgs),
    /// Exact table against Monte Carlo or against the asymptotic regimes.
    Compare(CompareArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ExactArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub n: u32,
    /// Also check the closed forms against sums over the exact table.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct LdpArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Also report -N^2 r(alpha) for this N.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct IdpArgs {
    #[arg(long, required_unless_present = "x_grid", conflicts_with = "x_grid")]
    pub x: Option<f64>,
    /// Sweep `start,stop,count` (inclusive, evenly spaced).
    #[arg(long, value_name = "START,STOP,COUNT")]
    pub x_grid: Option<String>,
    /// Also report sqrt(N) * exponent for this N.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct CltArgs {
    #[arg(long)]
    pub n: u32,
    /// A single M; otherwise every M of the right parity within the window.
    #[arg(long)]
    pub m: Option<u32>,
    /// Window half-width in units of the standard deviation.
    #[arg(long, default_value_t = 3.0)]
    pub width: f64,
    /// Centre on the exact finite-N mean instead of sqrt(pi N / 2).
    #[arg(long)]
    pub exact_mean: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct AsymArgs {
    #[arg(long)]
    pub n: u32,
    /// Also report the exact log p_{N,0} and log p_{N,N} (even N).
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PropcheckArgs {
    #[arg(long, default_value_t = 0.5)]
    pub xi: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [40u32, 80, 160, 320])]
    pub n: Vec<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct McArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    /// Exact table against Monte Carlo.
    Mc,
    /// Exact log p against the large-deviation, intermediate and CLT forms.
    Overlay,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    #[arg(long, value_enum, default_value_t = CompareMode::Mc)]
    pub mode: CompareMode,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Row {
    pub quantity: String,
    pub param: String,
    pub at: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: Option<u64>,
    pub precision_bits: u32,
    pub tol: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Payload {
    pub schema_version: u32,
    pub inputs: serde_json::Value,
    pub results: Vec<Row>,
    pub provenance: Provenance,
}

struct Rows<'a> {
    cli: &'a Cli,
    rows: Vec<Row>,
}

impl Rows<'_> {
    fn push(
        &mut self,
        quantity: &str,
        param: impl Into<String>,
        at: impl Into<String>,
        value: String,
    ) {
        self.rows.push(Row {
            quantity: quantity.to_string(),
            param: param.into(),
            at: at.into(),
            value,
        });
    }

    fn float(&mut self, quantity: &str, param: impl Into<String>, at: impl Into<String>, v: f64) {
        let s = format_f64(v, self.cli.digits);
        self.push(quantity, param, at, s);
    }

    fn exact(
        &mut self,
        quantity: &str,
        param: impl Into<String>,
        at: impl Into<String>,
        v: &HighPrecFloat,
    ) {
        let s = v.to_scientific(self.cli.digits as usize);
        self.push(quantity, param, at, s);
    }

    fn count(&mut self, quantity: &str, param: impl Into<String>, at: impl Into<String>, v: u64) {
        self.push(quantity, param, at, v.to_string());
    }
}

/// `f64` in scientific notation; at most 17 significant digits are printed
/// since more carry no information.
pub fn format_f64(v: f64, digits: u32) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let d = digits.clamp(1, 17) as usize;
    format!("{:.*e}", d - 1, v)
}

fn n_param(n: u32) -> String {
    format!("N={n}")
}

fn m_at(m: u32) -> String {
    format!("M={m}")
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::OutOfRange {
        name: "x_grid",
        value: f64::NAN,
        range: "START,STOP,COUNT with 0 < START <= STOP and COUNT >= 1",
    };
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if count == 0 || start.is_nan() || start <= 0.0 || stop.is_nan() || stop < start {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect())
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        })
    }
}

/// Compute the payload for parsed arguments.
pub fn execute(cli: &Cli) -> Result<Payload> {
    check_tol(cli.tol)?;
    let bits = cli.precision;
    let tol = cli.tol;
    let mut out = Rows {
        cli,
        rows: Vec::new(),
    };
    let mut seed = None;
    match &cli.command {
        Command::Exact(a) => match a.m {
            Some(m) => {
                let e = probability(a.n, m, bits)?;
                out.exact("p", n_param(a.n), m_at(m), &e.p_numeric);
                out.float("log_p", n_param(a.n), m_at(m), e.p_numeric.ln_abs());
                out.push(
                    "p_symbolic",
                    n_param(a.n),
                    m_at(m),
                    e.p_symbolic.to_string(),
                );
            }
            None => {
                let table = probability_table(a.n, bits)?;
                for e in &table.entries {
                    out.exact("p", n_param(a.n), m_at(e.m), &e.p_numeric);
                }
                for e in &table.entries {
                    out.float("log_p", n_param(a.n), m_at(e.m), e.p_numeric.ln_abs());
                }
            }
        },
        Command::Moments(a) => {
            let mo = exact_moments(a.n, bits)?;
            out.exact("mean", n_param(a.n), "", &mo.mean);
            out.exact("variance", n_param(a.n), "", &mo.variance);
            out.push(
                "mean_symbolic",
                n_param(a.n),
                "",
                mo.mean_symbolic.to_string(),
            );
            out.push(
                "variance_symbolic",
                n_param(a.n),
                "",
                mo.variance_symbolic.to_string(),
            );
            out.float(
                "mean_over_sqrt_n",
                n_param(a.n),
                "",
                mo.mean.to_f64() / f64::from(a.n).sqrt(),
            );
            out.float(
                "variance_over_mean",
                n_param(a.n),
                "",
                mo.variance.to_f64() / mo.mean.to_f64(),
            );
            if a.verify {
                let table = probability_table(a.n, bits)?;
                let ok = mo.matches_table(&table);
                out.push(
                    "table_check",
                    n_param(a.n),
                    "",
                    if ok { "exact" } else { "mismatch" }.into(),
                );
            }
        }
        Command::Ldp(a) => {
            let r = ld_rate(a.alpha)?;
            let b = energy_breakdown(a.alpha)?;
            let p = format!("alpha={:?}", a.alpha);
            out.float("rate", &p, "", r);
            out.float("small_alpha_rate", &p, "", small_alpha_rate(a.alpha));
            out.float("theta0", &p, "", b.theta0);
            out.float("e_annulus", &p, "", b.e_annulus);
            out.float("e_equator", &p, "", b.e_equator);
            out.float("e_cross", &p, "", b.e_cross);
            out.float("e_total", &p, "", b.total);
            out.float("v_a_equator", &p, "", b.v_a_equator);
            out.float("v_e", &p, "", b.v_e);
            if let Some(n) = a.n {
                let nf = f64::from(n);
                out.float("log_p_estimate", &p, n_param(n), -nf * nf * r);
            }
        }
        Command::Idp(a) => {
            let xs = match (&a.x, &a.x_grid) {
                (Some(x), _) => vec![*x],
                (None, Some(g)) => parse_grid(g)?,
                (None, None) => unreachable!("clap requires one of --x, --x-grid"),
            };
            for x in xs {
                let r = intermediate_rate(x, tol)?;
                let (left, right) = tail_exponents(x);
                let at = format!("x={x:?}");
                out.float("mu_star", "", &at, r.mu_star);
                out.float("exponent", "", &at, r.exponent);
                out.float("left_tail", "", &at, left);
                out.float("right_tail", "", &at, right);
                out.count("quadrature_evals", "", &at, r.quadrature_evals as u64);
                if let Some(n) = a.n {
                    out.float(
                        "log_p_estimate",
                        n_param(n),
                        &at,
                        f64::from(n).sqrt() * r.exponent,
                    );
                }
            }
        }
        Command::Clt(a) => {
            let params = clt_parameters(a.n, a.exact_mean)?;
            out.float("c", n_param(a.n), "", params.c);
            out.float("mu_n", n_param(a.n), "", params.mu_n);
            out.float("sigma2", n_param(a.n), "", params.sigma2);
            let ms: Vec<u32> = match a.m {
                Some(m) => {
                    if m > a.n || (a.n - m) % 2 == 1 {
                        return Err(Error::Parity { n: a.n, m });
                    }
                    vec![m]
                }
                None => {
                    let half = a.width * params.sigma2.sqrt();
                    let lo = (params.mu_n - half).max(0.0).ceil() as u32;
                    let hi = ((params.mu_n + half).floor() as u32).min(a.n);
                    (lo..=hi).filter(|m| (a.n - m) % 2 == 0).collect()
                }
            };
            for m in ms {
                out.float(
                    "log_density",
                    n_param(a.n),
                    m_at(m),
                    clt_log_density_with(&params, f64::from(m)),
                );
            }
        }
        Command::Asym(a) => {
            if a.n < 2 {
                return Err(Error::TooSmall(a.n, 2));
            }
            out.float(
                "all_real_log_asymptotic",
                n_param(a.n),
                m_at(a.n),
                all_real_log_asymptotic(a.n),
            );
            out.float(
                "no_real_log_asymptotic",
                n_param(a.n),
                m_at(0),
                no_real_log_asymptotic(a.n),
            );
            if a.exact {
                let w = factor_weights(a.n)?;
                out.float(
                    "log_p_exact",
                    n_param(a.n),
                    m_at(a.n),
                    w.log_p_all_real(bits),
                );
                out.float("log_p_exact", n_param(a.n), m_at(0), w.log_p_no_real(bits));
            }
        }
        Command::Propcheck(a) => {
            let at = format!("xi={:?}", a.xi);
            for &n in &a.n {
                let s = scaled_log_z(n, a.xi, bits, tol)?;
                out.float("finite_n", n_param(n), &at, s.finite_n);
                out.float("limit", n_param(n), &at, s.limit);
                out.float("abs_error", n_param(n), &at, (s.finite_n - s.limit).abs());
            }
        }
        Command::Mc(a) => {
            seed = Some(a.seed);
            let d = estimate_distribution(a.n, a.trials, a.seed)?;
            for (m, c) in &d.counts {
                out.count("count", n_param(a.n), m_at(*m), *c);
            }
            for (m, p) in &d.phat {
                out.float("phat", n_param(a.n), m_at(*m), *p);
            }
            for (m, s) in &d.stderr {
                out.float("stderr", n_param(a.n), m_at(*m), *s);
            }
            out.float("mean_hat", n_param(a.n), "", d.mean_hat);
            out.float("var_hat", n_param(a.n), "", d.var_hat);
            out.count("trials", n_param(a.n), "", d.trials);
            out.count("discarded", n_param(a.n), "", d.discarded);
        }
        Command::Compare(a) => match a.mode {
            CompareMode::Mc => {
                seed = Some(a.seed);
                let r = compare_exact_empirical(a.n, a.trials, a.seed, bits)?;
                for row in &r.rows {
                    out.float("p_exact", n_param(a.n), m_at(row.m), row.p_exact);
                    out.float("phat", n_param(a.n), m_at(row.m), row.phat);
                    out.float("z", n_param(a.n), m_at(row.m), row.z);
                }
                out.float("tv_distance", n_param(a.n), "", r.tv_distance);
                out.float("mean_exact", n_param(a.n), "", r.mean_exact);
                out.float("mean_hat", n_param(a.n), "", r.empirical.mean_hat);
                out.float("mean_z", n_param(a.n), "", r.mean_z);
                out.float("fano_ratio", n_param(a.n), "", r.fano_ratio);
                out.count("discarded", n_param(a.n), "", r.empirical.discarded);
            }
            CompareMode::Overlay => overlay(&mut out, a.n, bits, tol)?,
        },
    }
    Ok(Payload {
        schema_version: SCHEMA_VERSION,
        inputs: serde_json::to_value(&cli.command).expect("arguments serialize"),
        results: out.rows,
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            precision_bits: bits,
            tol: format_f64(tol, 17),
        },
    })
}

/// Exact `log p_{N,M}` next to each regime's prediction. The CLT density is
/// converted to a lattice probability with the factor 2 of the parity grid.
fn overlay(out: &mut Rows<'_>, n: u32, bits: u32, tol: f64) -> Result<()> {
    let table = probability_table(n, bits)?;
    let params = clt_parameters(n, false)?;
    let nf = f64::from(n);
    for e in &table.entries {
        let at = m_at(e.m);
        out.float("log_p_exact", n_param(n), &at, e.p_numeric.ln_abs());
        out.float(
            "log_p_clt",
            n_param(n),
            &at,
            2f64.ln() + clt_log_density_with(&params, f64::from(e.m)),
        );
        if e.m > 0 {
            let alpha = f64::from(e.m) / nf;
            out.float("log_p_ldp", n_param(n), &at, -nf * nf * ld_rate(alpha)?);
            let x = f64::from(e.m) / nf.sqrt();
            out.float(
                "log_p_idp",
                n_param(n),
                &at,
                nf.sqrt() * intermediate_rate(x, tol)?.exponent,
            );
        }
    }
    Ok(())
}

pub fn render(payload: &Payload, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(payload).expect("payload serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &payload.results {
                w.serialize(row).expect("in-memory write");
            }
            let p = &payload.provenance;
            let extra = [
                ("schema_version", payload.schema_version.to_string()),
                ("tool_version", p.tool_version.clone()),
                ("seed", p.seed.map(|s| s.to_string()).unwrap_or_default()),
                ("precision_bits", p.precision_bits.to_string()),
                ("tol", p.tol.clone()),
            ];
            for (key, value) in extra {
                w.serialize(Row {
                    quantity: "provenance".into(),
                    param: key.into(),
                    at: String::new(),
                    value,
                })
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
        }
    }
}

/// Write `contents` to `path` through a sibling temporary file and a rename.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Parse `args`, run, write the payload and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let payload = match execute(&cli) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_numerical() { 3 } else { 2 };
        }
    };
    let text = render(&payload, cli.format);
    let written = match &cli.output {
        Some(path) => write_atomic(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            1
        }
    }
}
