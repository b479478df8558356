//! Command-line front end.
//!
//! Every command produces one [`Table`]: a versioned schema line, named
//! columns and rows. CSV output starts with `# <schema>`; JSON output is
//! `{"schema", "columns", "rows"}` with the same cells in the same order.
//!
//! Exit codes: 0 success, 2 usage, 3 domain/parse, 4 precision,
//! 5 conditioning, 6 i/o. Failures print one JSON error record on stderr.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{block_variation, mertens_m, MertensTable};
use crate::arith::ratio_to_f64;
use crate::dseries::{
    dirichlet_f, euler_combination, f_over_zeta, mellin_f, nu_series_partial, SeriesValue,
};
use crate::elements::{fvas_partial_sum, phi_partial_sum_norm, Element, InnerProductEngine};
use crate::error::{Error, Result};
use crate::numerics::PrecisionBudget;
use crate::projection::{
    appendix_projections, chi_gap, nu0_sum_identity, nu_table, project, GramCache, SolveOptions,
    Variant,
};

pub const CACHE_ENV: &str = "NYMAN_GRAM_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Settings shared by all commands.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Absolute error target for series evaluations.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub abs_tol: f64,
    /// Work cap for a single series.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub max_terms: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Gram cache file.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Double-double accumulation and factorisation.
    #[arg(long, global = true)]
    pub extended: bool,
    /// Cross-check inner products against adaptive quadrature.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Solve Gram systems even above the conditioning limit.
    #[arg(long, global = true)]
    pub allow_ill_conditioned: bool,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            abs_tol: 1e-10,
            max_terms: 10_000_000,
            format: OutputFormat::Csv,
            cache: None,
            extended: false,
            oracle: false,
            allow_ill_conditioned: false,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn budget(&self) -> PrecisionBudget {
        PrecisionBudget {
            abs_tol: self.abs_tol,
            max_terms: self.max_terms,
            extended: self.extended,
            ..PrecisionBudget::default()
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            extended: self.extended,
            allow_ill_conditioned: self.allow_ill_conditioned,
        }
    }

    fn open_cache(&self) -> Result<GramCache> {
        match &self.cache {
            Some(p) => GramCache::open(p),
            None => Ok(GramCache::in_memory()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nyman", version, about = "Numerical workbench for the Nyman-Beurling space")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Inner product of two elements, e.g. `inner e:1 phi:3` or `inner "e:2 - 1/2*e:1" chi`.
    Inner { a: String, b: String },
    /// Best approximation of chi from the span of size N.
    Project {
        #[arg(long = "N", default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = Variant::Full)]
        variant: Variant,
    },
    /// Distance d_N for several N.
    Distance {
        #[arg(long = "N", value_delimiter = ',', default_values_t = [1usize, 2, 5, 10, 20, 50, 100])]
        n: Vec<usize>,
        #[arg(long, default_value_t = Variant::Full)]
        variant: Variant,
    },
    /// Table of nu-hat(k, N) = -c(k, N) against mu(k).
    Nu {
        #[arg(long = "N", value_delimiter = ',', default_values_t = [25usize, 50, 100])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        kmax: u64,
    },
    /// Dirichlet series of an element on a grid of s values.
    Dirichlet {
        /// Element, e.g. "e:3 - 1/3*e:1".
        #[arg(long, default_value = "chi")]
        f: String,
        /// Explicit s values such as `2`, `0.75+14.13i`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Vec<String>,
        /// Grid `sigma + i t` with t from --t-from to --t-to (used when --s is absent).
        #[arg(long, default_value_t = 2.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t_from: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t_to: f64,
        #[arg(long, default_value_t = 1)]
        t_steps: usize,
        #[arg(long, value_enum, default_value_t = SeriesKind::Dirichlet)]
        method: SeriesKind,
        /// Number of terms for partial sums.
        #[arg(long, default_value_t = 100_000)]
        terms: u64,
        /// Projection size for `--method nu`.
        #[arg(long = "N", default_value_t = 100)]
        n: usize,
    },
    /// Diagnostics.
    Diag {
        #[command(subcommand)]
        which: Diag,
    },
    /// Projection of e1 on the span of the eps_k and the functional kappa'.
    Appendix {
        #[arg(long = "K", default_value_t = 1000)]
        k: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    /// Partial sums of sum u(n) n^-s.
    Dirichlet,
    /// s times the Mellin transform (zero-lambda elements).
    Mellin,
    /// Atom-wise closed form through zeta.
    Closed,
    /// Partial sums of sum w(n) n^-s.
    OverZeta,
    /// Partial sums of sum nu-hat(n) n^-s.
    Nu,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Diag {
    /// ||sum_{k<=K} phi_k/k|| for K = 1..=K.
    PhiNorm {
        #[arg(long = "K", default_value_t = 1000)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        every: u64,
    },
    /// ||sum_{k<=K} f_k/k|| and <beta_K, eps_d> for d <= 5.
    FvasNorm {
        #[arg(long = "K", value_delimiter = ',', default_values_t = [10u64, 100, 1000, 10000])]
        k: Vec<u64>,
    },
    /// sum over 2^j-blocks of x^alpha |m(t) - m(x)| dt/t^2 style variation.
    BlockVariation {
        #[arg(long, value_delimiter = ',', default_values_t = [1000.0])]
        x: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
    },
    /// m(x) = sum_{n<=x} mu(n)/n.
    Mertens {
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 100.0, 1000.0, 10000.0])]
        x: Vec<f64>,
    },
    /// sum_{2<=k<=N} c0(k, N)/k.
    Nu0Sum {
        #[arg(long = "N", value_delimiter = ',', default_values_t = [10usize, 50, 100])]
        n: Vec<usize>,
    },
    /// ||chi_N - chi_{0,N}|| and d_{0,N}^2 - d_N^2.
    ChiGap {
        #[arg(long = "N", value_delimiter = ',', default_values_t = [10usize, 50, 100])]
        n: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty(Option<()>),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i8> for Cell {
    fn from(v: i8) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map(Cell::Float).unwrap_or(Cell::Empty(None))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(schema: &str, columns: &[&str]) -> Self {
        Table {
            schema: format!("nyman {schema} v1"),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.schema, self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Float(v) => format!("{v:.17e}"),
                    Cell::Text(s) if s.contains([',', '"', '\n']) => {
                        format!("\"{}\"", s.replace('"', "\"\""))
                    }
                    Cell::Text(s) => s.clone(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Empty(_) => String::new(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        // Non-finite floats have no JSON literal; serde_json writes them as null.
        serde_json::to_string_pretty(self).expect("table serializes") + "\n"
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Exit code for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Pole | Error::LengthMismatch { .. } | Error::Parse(_) => 3,
        Error::Precision { .. } => 4,
        Error::Conditioning { .. } | Error::NotPositiveDefinite { .. } => 5,
        Error::GramEntry { source, .. } => exit_code(source),
        Error::Io(_) => 6,
    }
}

/// Machine-readable error record.
pub fn error_record(e: &Error) -> String {
    serde_json::json!({
        "error": e.kind(),
        "exit_code": exit_code(e),
        "message": e.to_string(),
    })
    .to_string()
}

/// `2`, `-1.5`, `0.75+14.1347i`, `0.5-3i`, `2i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("cannot read complex number '{text}'"));
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not the leading one or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    Ok(Complex64::new(
        re.parse().map_err(|_| bad())?,
        im.parse().map_err(|_| bad())?,
    ))
}

fn s_grid(s: &[String], sigma: f64, t_from: f64, t_to: f64, t_steps: usize) -> Result<Vec<Complex64>> {
    if !s.is_empty() {
        return s.iter().map(|x| parse_complex(x)).collect();
    }
    if t_steps == 0 {
        return Err(Error::domain("--t-steps must be at least 1"));
    }
    Ok((0..t_steps)
        .map(|i| {
            let t = if t_steps == 1 {
                t_from
            } else {
                t_from + (t_to - t_from) * i as f64 / (t_steps - 1) as f64
            };
            Complex64::new(sigma, t)
        })
        .collect())
}

fn series_row(s: Complex64, v: &SeriesValue) -> Vec<Cell> {
    vec![
        s.re.into(),
        s.im.into(),
        v.value.re.into(),
        v.value.im.into(),
        v.tail_bound.into(),
        v.method.as_str().into(),
        v.terms_used.into(),
        v.last_term_abs.into(),
        v.exploratory.into(),
    ]
}

/// Runs one command and returns its table. The Gram cache, if any, is
/// flushed before returning.
pub fn execute(config: &RunConfig, command: &Command) -> Result<Table> {
    let engine = InnerProductEngine::new(config.budget());
    let opts = config.solve_options();
    let mut cache = config.open_cache()?;
    let table = run_command(config, command, &engine, &mut cache, opts);
    cache.flush()?;
    table
}

fn run_command(
    config: &RunConfig,
    command: &Command,
    engine: &InnerProductEngine,
    cache: &mut GramCache,
    opts: SolveOptions,
) -> Result<Table> {
    match command {
        Command::Inner { a, b } => {
            let ea = Element::parse(a)?;
            let eb = Element::parse(b)?;
            let r = engine.inner_product(&ea, &eb)?;
            let mut t = Table::new(
                "inner",
                &["a", "b", "value", "err", "method", "exact", "oracle_value", "oracle_err", "delta"],
            );
            let (ov, oe, delta) = if config.oracle {
                let o = engine.oracle_inner_product(&ea, &eb)?;
                (Some(o.value), Some(o.err), Some(o.value - r.value))
            } else {
                (None, None, None)
            };
            let exact = r.exact.as_ref().map(|q| q.to_string()).unwrap_or_default();
            t.push(vec![
                ea.to_string().into(),
                eb.to_string().into(),
                r.value.into(),
                r.err.into(),
                r.method.as_str().into(),
                exact.into(),
                ov.into(),
                oe.into(),
                delta.into(),
            ]);
            Ok(t)
        }
        Command::Project { n, variant } => {
            let g = project(*n, *variant, engine, cache, opts)?;
            let s = g.solution()?;
            let mut t = Table::new(
                "project",
                &[
                    "N", "variant", "k", "c", "c_err", "d", "d_sq", "d_sq_err", "condition",
                ],
            );
            for (&k, &c) in g.indices.iter().zip(&s.coefficients) {
                t.push(vec![
                    (*n).into(),
                    variant.as_str().into(),
                    k.into(),
                    c.into(),
                    s.coefficient_err.into(),
                    s.distance().into(),
                    s.distance_sq.into(),
                    s.distance_sq_err.into(),
                    s.condition_estimate.into(),
                ]);
            }
            Ok(t)
        }
        Command::Distance { n, variant } => {
            let mut t = Table::new(
                "distance",
                &["N", "variant", "d", "d_sq", "d_sq_err", "condition", "lambda_min", "lambda_max"],
            );
            for &ni in n {
                let g = project(ni, *variant, engine, cache, opts)?;
                let s = g.solution()?;
                t.push(vec![
                    ni.into(),
                    variant.as_str().into(),
                    s.distance().into(),
                    s.distance_sq.into(),
                    s.distance_sq_err.into(),
                    s.condition_estimate.into(),
                    s.lambda_min.into(),
                    s.lambda_max.into(),
                ]);
            }
            Ok(t)
        }
        Command::Nu { n, kmax } => {
            let nt = nu_table(n, *kmax, engine, cache, opts)?;
            let mut t = Table::new(
                "nu-table",
                &["k", "N", "c", "c_err", "c0", "c0_err", "nu_hat", "nu0_hat", "mobius", "match"],
            );
            for r in &nt.rows {
                t.push(vec![
                    r.k.into(),
                    r.n.into(),
                    r.c.into(),
                    r.c_err.into(),
                    r.c0.into(),
                    r.c0_err.into(),
                    r.nu_hat.into(),
                    r.nu0_hat.into(),
                    r.mobius.into(),
                    r.matches.into(),
                ]);
            }
            Ok(t)
        }
        Command::Dirichlet {
            f,
            s,
            sigma,
            t_from,
            t_to,
            t_steps,
            method,
            terms,
            n,
        } => {
            let f = Element::parse(f)?;
            let grid = s_grid(s, *sigma, *t_from, *t_to, *t_steps)?;
            let values: Vec<SeriesValue> = match method {
                SeriesKind::Nu => grid
                    .iter()
                    .map(|&z| nu_series_partial(z, *n, *terms, engine, cache, opts))
                    .collect::<Result<_>>()?,
                _ => grid
                    .par_iter()
                    .map(|&z| match method {
                        SeriesKind::Dirichlet => dirichlet_f(&f, z, *terms),
                        SeriesKind::Mellin => mellin_f(&f, z),
                        SeriesKind::Closed => euler_combination(&f, z),
                        SeriesKind::OverZeta => f_over_zeta(&f, z, *terms),
                        SeriesKind::Nu => unreachable!(),
                    })
                    .collect::<Result<_>>()?,
            };
            let mut t = Table::new(
                "dirichlet",
                &[
                    "s_re",
                    "s_im",
                    "value_re",
                    "value_im",
                    "err",
                    "method",
                    "terms",
                    "last_term_abs",
                    "exploratory",
                ],
            );
            for (z, v) in grid.iter().zip(&values) {
                t.push(series_row(*z, v));
            }
            Ok(t)
        }
        Command::Diag { which } => run_diag(which, engine, cache, opts),
        Command::Appendix { k } => {
            let a = appendix_projections(*k)?;
            let mut t = Table::new(
                "appendix",
                &["k", "coefficient", "step_value", "partial_norm_sq", "tail_estimate", "tail_estimate_err",
                  "tail_bound", "residual_norm_sq", "residual_norm_sq_err", "kappa_prime_scalar"],
            );
            for (i, (&c, &sv)) in a.coefficients.iter().zip(&a.step_values).enumerate() {
                t.push(vec![
                    (i as u64 + 1).into(),
                    c.into(),
                    sv.into(),
                    a.partial_norm_sq.into(),
                    a.tail_estimate.into(),
                    a.tail_estimate_err.into(),
                    a.tail_bound.into(),
                    a.residual_norm_sq.into(),
                    a.residual_norm_sq_err.into(),
                    a.kappa_prime_scalar.into(),
                ]);
            }
            Ok(t)
        }
    }
}

fn run_diag(
    which: &Diag,
    engine: &InnerProductEngine,
    cache: &mut GramCache,
    opts: SolveOptions,
) -> Result<Table> {
    match which {
        Diag::PhiNorm { k, every } => {
            if *every == 0 {
                return Err(Error::domain("--every must be at least 1"));
            }
            let ks: Vec<u64> = (1..=*k).filter(|i| i % every == 0 || i == k || *i == 1).collect();
            let reports = ks
                .par_iter()
                .map(|&i| phi_partial_sum_norm(i, &[]))
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table::new("phi-norm", &["K", "norm", "norm_err", "norm_sq_exact"]);
            for r in reports {
                let exact = r.norm_sq_exact.map(|q| q.to_string()).unwrap_or_default();
                t.push(vec![r.k.into(), r.norm.into(), r.norm_err.into(), exact.into()]);
            }
            Ok(t)
        }
        Diag::FvasNorm { k } => {
            let limit = k.iter().copied().max().unwrap_or(1) as usize;
            let table = MertensTable::new(limit);
            let coords = [1u64, 2, 3, 4, 5];
            let mut cols = vec!["K", "norm", "norm_err"];
            cols.extend(["coord_1", "coord_2", "coord_3", "coord_4", "coord_5"]);
            let mut t = Table::new("fvas-norm", &cols);
            for &ki in k {
                let r = fvas_partial_sum(ki, &coords, &table)?;
                let mut row: Vec<Cell> = vec![r.k.into(), r.norm.into(), r.norm_err.into()];
                row.extend(coords.iter().map(|d| Cell::from(r.weak_coords.get(d).copied())));
                t.push(row);
            }
            Ok(t)
        }
        Diag::BlockVariation { x, alpha } => {
            let mut t = Table::new("block-variation", &["x", "alpha", "value"]);
            for &xi in x {
                t.push(vec![xi.into(), (*alpha).into(), block_variation(xi, *alpha)?.into()]);
            }
            Ok(t)
        }
        Diag::Mertens { x } => {
            let mut t = Table::new("mertens", &["x", "m", "m_exact"]);
            for &xi in x {
                let q = mertens_m(xi)?;
                t.push(vec![xi.into(), ratio_to_f64(&q).into(), q.to_string().into()]);
            }
            Ok(t)
        }
        Diag::Nu0Sum { n } => {
            let mut t = Table::new("nu0-sum", &["N", "sum_c0_over_k", "err"]);
            for &ni in n {
                let (v, e) = nu0_sum_identity(ni, engine, cache, opts)?;
                t.push(vec![ni.into(), v.into(), e.into()]);
            }
            Ok(t)
        }
        Diag::ChiGap { n } => {
            let mut t = Table::new(
                "chi-gap",
                &["N", "gap", "distance_sq_difference", "d_full", "d_zero"],
            );
            for &ni in n {
                let g = chi_gap(ni, engine, cache, opts)?;
                t.push(vec![
                    ni.into(),
                    g.gap.into(),
                    g.distance_sq_difference.into(),
                    g.d_full.into(),
                    g.d_zero.into(),
                ]);
            }
            Ok(t)
        }
    }
}

/// Parses `args`, runs, and writes the output. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli.config, &cli.command).and_then(|table| {
        let text = table.render(cli.config.format);
        match &cli.config.out {
            Some(p) => std::fs::write(p, text).map_err(Error::from),
            None => {
                use std::io::Write;
                let mut out = std::io::stdout().lock();
                match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                    // Reader went away (e.g. `| head`): not an error of ours.
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    r => r.map_err(Error::from),
                }
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_record(&e));
            exit_code(&e)
        }
    }
}
