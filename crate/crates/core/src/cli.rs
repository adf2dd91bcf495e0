//! Command-line front end: argument model, dispatch, and CSV/JSON emission.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};

use crate::analysis::{
    critical_table, llt_table, theorem1_limit, theorem1_table, theorem34_table, theorem36_table,
    ConvergenceTable, KSequence,
};
use crate::dist::{beta_binomial_pmf, marginal_spin_count_pmf, MixingLaw, PolyaUrn};
use crate::error::{Error, Result};
use crate::model::{exact_spin_count_pmf, gamma_pair, solve_magnetization, ModelParams};
use crate::pmf::Pmf;
use crate::tv::tv_discrete;

/// Environment variable consulted for the worker count when `--threads` is absent.
pub const THREADS_ENV: &str = "CW_CHAOS_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "cw-chaos",
    version,
    about = "Exact Curie-Weiss spin-count laws and total-variation limit studies",
    allow_negative_numbers = true
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: OutputFormat,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for table rows and mixture sums.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub h: f64,
}

#[derive(Debug, Clone, Args)]
#[group(required = false, multiple = false)]
pub struct MarginalSize {
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Magnetization, limiting variance and beta parameters.
    Solve(ModelArgs),
    /// Exact law of the positive-spin count.
    Pmf {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "N")]
        n: u64,
    },
    /// Exact law of the positive-spin count among k spins.
    Marginal {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "N")]
        n: u64,
        #[command(flatten)]
        size: MarginalSize,
    },
    /// Observed TV to the product reference law, with its predicted limit.
    Tv {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "N")]
        n: u64,
        #[command(flatten)]
        size: MarginalSize,
    },
    /// Predicted limiting TV for k/N -> alpha.
    Limit {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
    },
    /// sqrt(N)-scaled sup error of the local limit approximation.
    Llt {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        ns: Vec<u64>,
    },
    /// TV to the beta-binomial approximant (subcritical or field regime).
    Gap34 {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        ns: Vec<u64>,
        #[command(flatten)]
        size: MarginalSize,
    },
    /// TV to the symmetric two-beta approximant (h = 0, beta > 1).
    Gap36 {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        ns: Vec<u64>,
        #[command(flatten)]
        size: MarginalSize,
    },
    /// Observed vs predicted TV along a sequence of N.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        ns: Vec<u64>,
        #[arg(long, conflicts_with = "sqrt")]
        alpha: Option<f64>,
        /// Use k = ceil(sqrt(N)) instead of k = round(alpha N).
        #[arg(long)]
        sqrt: bool,
    },
    /// Kolmogorov distance to the quartic limit law at (beta, h) = (1, 0).
    Critical {
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        ns: Vec<u64>,
    },
    /// Seeded Polya urn draws against the exact beta-binomial law.
    Urn {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 100_000)]
        draws: u64,
    },
}

/// A cell of emitted output.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Null,
}

/// What a command produces: one flat record, or a header plus rows.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Record(Vec<(String, Cell)>),
    Rows {
        header: Vec<String>,
        rows: Vec<Vec<Cell>>,
    },
}

/// `x` with 12 significant digits, `%g`-style, independent of locale.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_sig(*v),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => format_sig(*v)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

impl Output {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let mut line = |cells: Vec<String>| {
            out.push_str(&cells.join(","));
            out.push('\n');
        };
        match self {
            Output::Record(fields) => {
                line(fields.iter().map(|(k, _)| k.clone()).collect());
                line(fields.iter().map(|(_, v)| v.csv()).collect());
            }
            Output::Rows { header, rows } => {
                line(header.clone());
                for row in rows {
                    line(row.iter().map(Cell::csv).collect());
                }
            }
        }
        out
    }

    fn render_json(&self) -> String {
        let object = |keys: &mut dyn Iterator<Item = (&String, &Cell)>| {
            Value::Object(keys.map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
        };
        let value = match self {
            Output::Record(fields) => object(&mut fields.iter().map(|(k, v)| (k, v))),
            Output::Rows { header, rows } => {
                let rows = rows
                    .iter()
                    .map(|row| object(&mut header.iter().zip(row.iter())))
                    .collect();
                let mut map = Map::new();
                map.insert("rows".into(), Value::Array(rows));
                Value::Object(map)
            }
        };
        let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
        s.push('\n');
        s
    }
}

pub const TABLE_HEADER: [&str; 5] = ["N", "k", "observed", "predicted", "gap"];

impl From<&ConvergenceTable> for Output {
    fn from(table: &ConvergenceTable) -> Self {
        Output::Rows {
            header: TABLE_HEADER.iter().map(|s| s.to_string()).collect(),
            rows: table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.n as i64),
                        Cell::Int(r.k as i64),
                        Cell::Float(r.observed),
                        Cell::Float(r.predicted),
                        Cell::Float(r.gap),
                    ]
                })
                .collect(),
        }
    }
}

fn write_output(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Writes a convergence table as CSV (`N,k,observed,predicted,gap`) or JSON.
pub fn emit_table(table: &ConvergenceTable, format: OutputFormat, path: Option<&Path>) -> Result<()> {
    write_output(&Output::from(table).render(format), path)
}

fn record(fields: Vec<(&str, Cell)>) -> Output {
    Output::Record(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn pmf_output(pmf: &Pmf) -> Output {
    Output::Rows {
        header: vec!["l".into(), "p".into(), "log_p".into()],
        rows: pmf
            .log_probs()
            .iter()
            .enumerate()
            .map(|(i, &lp)| {
                vec![
                    Cell::Int(pmf.offset() + i as i64),
                    Cell::Float(lp.exp()),
                    if lp.is_finite() { Cell::Float(lp) } else { Cell::Null },
                ]
            })
            .collect(),
    }
}

fn describe_law(law: &MixingLaw) -> String {
    match law {
        MixingLaw::Point(p) => format!("point({})", format_sig(*p)),
        MixingLaw::Beta { a, b } => format!("beta({} {})", format_sig(*a), format_sig(*b)),
        MixingLaw::Finite(parts) => {
            let inner: Vec<String> = parts
                .iter()
                .map(|(w, c)| format!("{}*{}", format_sig(*w), describe_law(c)))
                .collect();
            format!("mixture({})", inner.join(" + "))
        }
    }
}

fn params_of(model: &ModelArgs) -> Result<ModelParams> {
    ModelParams::new(model.beta, model.h)
}

fn k_sequence(size: &MarginalSize, default_alpha: Option<f64>) -> Result<KSequence> {
    match (size.k, size.alpha.or(default_alpha)) {
        (Some(k), _) => Ok(KSequence::Fixed(k)),
        (None, Some(alpha)) => Ok(KSequence::Linear(alpha)),
        (None, None) => Err(Error::domain("one of --k or --alpha is required")),
    }
}

/// Computes the command's output without writing it.
pub fn execute(config: &RunConfig) -> Result<Output> {
    let threads = config.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
    });
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?
            .install(|| dispatch(config)),
        _ => dispatch(config),
    }
}

fn dispatch(config: &RunConfig) -> Result<Output> {
    match &config.command {
        Command::Solve(model) => {
            let params = params_of(model)?;
            let sol = solve_magnetization(&params)?;
            let g = gamma_pair(&params)?;
            Ok(record(vec![
                ("beta", Cell::Float(params.beta())),
                ("h", Cell::Float(params.h())),
                ("regime", Cell::Text(params.regime().name().into())),
                ("m", Cell::Float(sol.m)),
                ("v2", Cell::Float(sol.v2)),
                ("gamma1", Cell::Float(g.gamma1)),
                ("gamma2", Cell::Float(g.gamma2)),
            ]))
        }
        Command::Pmf { model, n } => Ok(pmf_output(&exact_spin_count_pmf(*n, &params_of(model)?)?)),
        Command::Marginal { model, n, size } => {
            let k = k_sequence(size, None)?.k_for(*n)?;
            Ok(pmf_output(&marginal_spin_count_pmf(*n, k, &params_of(model)?)?))
        }
        Command::Tv { model, n, size } => {
            let k = k_sequence(size, None)?.k_for(*n)?;
            let alpha = k as f64 / *n as f64;
            let table = theorem1_table(&params_of(model)?, KSequence::Linear(alpha), &[*n])?;
            Ok(Output::from(&table))
        }
        Command::Limit { model, alpha } => {
            let params = params_of(model)?;
            let p = theorem1_limit(&params, *alpha)?;
            Ok(record(vec![
                ("beta", Cell::Float(params.beta())),
                ("h", Cell::Float(params.h())),
                ("regime", Cell::Text(p.regime.name().into())),
                ("alpha", Cell::Float(p.alpha)),
                ("predicted_tv", Cell::Float(p.predicted_tv)),
                ("sigma_alpha_sq", Cell::Float(p.sigma_alpha_sq)),
                ("reference", Cell::Text(describe_law(&p.reference_law))),
            ]))
        }
        Command::Llt { model, ns } => Ok(Output::from(&llt_table(&params_of(model)?, ns)?)),
        Command::Gap34 { model, ns, size } => Ok(Output::from(&theorem34_table(
            &params_of(model)?,
            k_sequence(size, Some(1.0))?,
            ns,
        )?)),
        Command::Gap36 { beta, ns, size } => Ok(Output::from(&theorem36_table(
            *beta,
            k_sequence(size, Some(1.0))?,
            ns,
        )?)),
        Command::Sweep {
            model,
            ns,
            alpha,
            sqrt,
        } => {
            let ks = if *sqrt {
                KSequence::Sqrt
            } else {
                KSequence::Linear(alpha.unwrap_or(1.0))
            };
            Ok(Output::from(&theorem1_table(&params_of(model)?, ks, ns)?))
        }
        Command::Critical { ns } => Ok(Output::from(&critical_table(ns)?)),
        Command::Urn { k, a, b, draws } => {
            let empirical = PolyaUrn::new(*a, *b, config.seed)?.empirical_pmf(*k, *draws)?;
            let exact = beta_binomial_pmf(*k, *a, *b)?;
            Ok(record(vec![
                ("k", Cell::Int(*k as i64)),
                ("a", Cell::Float(*a)),
                ("b", Cell::Float(*b)),
                ("draws", Cell::Int(*draws as i64)),
                ("seed", Cell::Int(config.seed as i64)),
                ("empirical_mean", Cell::Float(empirical.mean())),
                ("exact_mean", Cell::Float(exact.mean())),
                ("tv", Cell::Float(tv_discrete(&empirical, &exact)?)),
            ]))
        }
    }
}

/// Executes the command and writes its output to `--output` or standard output.
pub fn run(config: &RunConfig) -> Result<()> {
    let out = execute(config)?;
    write_output(&out.render(config.format), config.output.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ConvergenceRow;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("cw-chaos").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(2.0), "2");
        assert_eq!(format_sig(0.1), "0.1");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_sig(123456.789), "123456.789");
        assert_eq!(format_sig(1e-7), "1e-7");
        assert_eq!(format_sig(1.5e-300), "1.5e-300");
        assert_eq!(format_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_sig(999999999999.9), "1e12");
        assert_eq!(format_sig(0.00012345), "0.00012345");
        assert_eq!(format_sig(f64::NAN), "nan");
    }

    #[test]
    fn empty_and_single_row_tables() {
        let empty = ConvergenceTable::default();
        assert_eq!(Output::from(&empty).render(OutputFormat::Csv), "N,k,observed,predicted,gap\n");
        let one = ConvergenceTable {
            rows: vec![ConvergenceRow::new(256, 128, 0.25, 0.125)],
        };
        let csv = Output::from(&one).render(OutputFormat::Csv);
        assert_eq!(csv, "N,k,observed,predicted,gap\n256,128,0.25,0.125,0.125\n");
        let json: Value = serde_json::from_str(&Output::from(&one).render(OutputFormat::Json)).unwrap();
        assert_eq!(json["rows"][0]["N"], 256);
        assert_eq!(json["rows"][0]["gap"], 0.125);
    }

    #[test]
    fn emit_table_reports_path_on_failure() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("t.csv");
        let err = emit_table(&ConvergenceTable::default(), OutputFormat::Csv, Some(&bad)).unwrap_err();
        assert_eq!(err.kind(), "IoError");
        assert!(err.to_string().contains("missing"));
        let good = dir.path().join("t.json");
        emit_table(&ConvergenceTable::default(), OutputFormat::Json, Some(&good)).unwrap();
        assert!(fs::read_to_string(good).unwrap().contains("rows"));
    }

    #[test]
    fn parses_flags() {
        let c = parse(&["sweep", "--beta", "0.5", "--h", "-0.3", "--alpha", "1", "--Ns", "256,1024", "--format", "json"]);
        assert_eq!(c.format, OutputFormat::Json);
        match c.command {
            Command::Sweep { model, ns, alpha, sqrt } => {
                assert_eq!(model.h, -0.3);
                assert_eq!(ns, vec![256, 1024]);
                assert_eq!(alpha, Some(1.0));
                assert!(!sqrt);
            }
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::try_parse_from(["cw-chaos", "marginal", "--beta", "1", "--N", "4", "--k", "2", "--alpha", "0.5"]).is_err());
        assert!(RunConfig::try_parse_from(["cw-chaos", "solve"]).is_err());
    }

    #[test]
    fn solve_and_limit_records() {
        let out = execute(&parse(&["solve", "--beta", "2", "--h", "0"])).unwrap();
        let json: Value = serde_json::from_str(&out.render(OutputFormat::Json)).unwrap();
        assert!((json["m"].as_f64().unwrap() - 0.9575040).abs() < 1e-7);
        assert!(json["gamma1"].as_f64().unwrap() > 0.0);
        let out = execute(&parse(&["limit", "--beta", "0.5", "--h", "0", "--alpha", "0"])).unwrap();
        let json: Value = serde_json::from_str(&out.render(OutputFormat::Json)).unwrap();
        assert_eq!(json["predicted_tv"], 0.0);
        assert_eq!(json["reference"], "point(0.5)");
        let err = execute(&parse(&["limit", "--beta", "1", "--h", "0", "--alpha", "0.5"])).unwrap_err();
        assert_eq!(err.kind(), "CriticalPoint");
    }

    #[test]
    fn pmf_rows() {
        let out = execute(&parse(&["pmf", "--beta", "0.7", "--N", "1"])).unwrap();
        assert_eq!(out.render(OutputFormat::Csv), "l,p,log_p\n0,0.5,-0.69314718056\n1,0.5,-0.69314718056\n");
        let out = execute(&parse(&["marginal", "--beta", "0.7", "--N", "6", "--k", "6"])).unwrap();
        match out {
            Output::Rows { rows, .. } => assert_eq!(rows.len(), 7),
            other => panic!("{other:?}"),
        }
        assert!(execute(&parse(&["marginal", "--beta", "0.7", "--N", "6"])).is_err());
    }

    #[test]
    fn json_round_trips_printed_values() {
        let out = execute(&parse(&["sweep", "--beta", "0.8", "--h", "0.3", "--Ns", "32,64", "--alpha", "0.5"])).unwrap();
        let csv = out.render(OutputFormat::Csv);
        let json: Value = serde_json::from_str(&out.render(OutputFormat::Json)).unwrap();
        for (line, row) in csv.lines().skip(1).zip(json["rows"].as_array().unwrap()) {
            let cells: Vec<&str> = line.split(',').collect();
            for (i, key) in TABLE_HEADER.iter().enumerate() {
                let printed: f64 = cells[i].parse().unwrap();
                assert_eq!(row[*key].as_f64().unwrap(), printed);
            }
        }
    }
}
