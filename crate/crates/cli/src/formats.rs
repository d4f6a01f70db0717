//! Input files (coins, amplitudes, distributions) and the table writer.

use std::fs;
use std::io::Write;
use std::path::Path;

use lively_core::linalg::c64;
use lively_core::{CoinMatrix, CoinSpec, Distribution, InitialStateSpec, SchedulePolicy, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::Format;
use crate::error::{CliError, CliResult};

type JsonMatrix = [[[f64; 2]; 3]; 3];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeFile {
    n: usize,
    a: usize,
    amplitudes: Vec<[f64; 2]>,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::param(format!("{}: {e}", path.display())))
}

fn to_matrix(m: &JsonMatrix) -> CoinMatrix {
    CoinMatrix::from_fn(|i, j| c64(m[i][j][0], m[i][j][1]))
}

/// `grover`, `identity`, `custom:<file>` or `schedule:<file>`.
pub fn parse_coin(spec: &str, policy: SchedulePolicy) -> CliResult<CoinSpec> {
    let coin = match spec.split_once(':') {
        None if spec == "grover" => CoinSpec::Grover,
        None if spec == "identity" => CoinSpec::Identity,
        Some(("custom", path)) => CoinSpec::Custom(to_matrix(&parse_json::<JsonMatrix>(Path::new(path))?)),
        Some(("schedule", path)) => {
            let coins: Vec<JsonMatrix> = parse_json(Path::new(path))?;
            CoinSpec::Schedule {
                coins: coins.iter().map(to_matrix).collect(),
                policy,
            }
        }
        _ => return Err(CliError::param(format!("unknown coin `{spec}`"))),
    };
    coin.validate()?;
    Ok(coin)
}

fn parse_index(s: &str, what: &str) -> CliResult<usize> {
    s.trim()
        .parse()
        .map_err(|_| CliError::param(format!("invalid {what} `{s}`")))
}

/// `uniform-coin:<x0>`, `basis:<c>,<x0>`, `mixed-coin:<x0>` or `custom:<file>`.
pub fn parse_initial(spec: &str, n: usize, a: usize) -> CliResult<InitialStateSpec> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::param(format!("initial state `{spec}` needs a `kind:` prefix")))?;
    let initial = match kind {
        "uniform-coin" => InitialStateSpec::UniformCoin {
            x0: parse_index(rest, "position")?,
        },
        "mixed-coin" => InitialStateSpec::MixedCoin {
            x0: parse_index(rest, "position")?,
        },
        "basis" => {
            let (c, x) = rest
                .split_once(',')
                .ok_or_else(|| CliError::param(format!("basis state `{rest}` must be `c,x0`")))?;
            InitialStateSpec::Basis {
                coin: parse_index(c, "coin direction")?,
                x0: parse_index(x, "position")?,
            }
        }
        "custom" => {
            let path = Path::new(rest);
            let file: AmplitudeFile = parse_json(path)?;
            if file.n != n || file.a != a {
                return Err(CliError::param(format!(
                    "{} was written for n = {}, a = {} but the walk has n = {n}, a = {a}",
                    path.display(),
                    file.n,
                    file.a
                )));
            }
            InitialStateSpec::Custom(file.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect())
        }
        _ => return Err(CliError::param(format!("unknown initial state kind `{kind}`"))),
    };
    initial.validate(n)?;
    Ok(initial)
}

/// Reads a distribution written by this tool, as CSV or (by extension) JSON.
pub fn read_distribution(path: &Path) -> CliResult<Distribution> {
    let bad = |msg: String| CliError::param(format!("{}: {msg}", path.display()));
    let text = read_text(path)?;
    let mut rows: Vec<(usize, f64)> = Vec::new();
    if path.extension().is_some_and(|e| e == "json") {
        let doc: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        let cols = doc["columns"].as_array().ok_or_else(|| bad("missing columns".into()))?;
        if cols.len() != 2 || cols[0] != "position" || cols[1] != "probability" {
            return Err(bad("not a position,probability table".into()));
        }
        for row in doc["rows"].as_array().ok_or_else(|| bad("missing rows".into()))? {
            let x = row[0].as_u64().ok_or_else(|| bad(format!("bad position in {row}")))?;
            let p = row[1]
                .as_f64()
                .ok_or_else(|| bad(format!("bad probability in {row}")))?;
            rows.push((x as usize, p));
        }
    } else {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| bad(e.to_string()))?;
        if headers != vec!["position", "probability"] {
            return Err(bad(format!("unexpected header {headers:?}")));
        }
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let x = record[0]
                .parse()
                .map_err(|_| bad(format!("bad position `{}`", &record[0])))?;
            let p = record[1]
                .parse()
                .map_err(|_| bad(format!("bad probability `{}`", &record[1])))?;
            rows.push((x, p));
        }
    }
    if rows.iter().enumerate().any(|(i, (x, _))| i != *x) {
        return Err(bad("positions must be 0, 1, 2, ... in order".into()));
    }
    if rows.iter().any(|(_, p)| !p.is_finite() || *p < 0.0) {
        return Err(bad("probabilities must be finite and nonnegative".into()));
    }
    Distribution::from_probabilities(rows.into_iter().map(|(_, p)| p).collect()).map_err(|e| bad(e.to_string()))
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) if x.is_finite() => Value::from(format_float(*x).parse::<f64>().unwrap_or(*x)),
            Cell::Float(x) => Value::from(format_float(*x)),
            Cell::Bool(b) => Value::from(*b),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Twelve significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub command: String,
    pub version: &'static str,
    pub n: Option<usize>,
    pub a: Option<usize>,
    pub coin: Option<String>,
    pub initial: Option<String>,
    pub edge: Option<usize>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub method: Option<String>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Tolerances {
    pub grouping: Option<f64>,
    pub periodicity: Option<f64>,
    pub coin_unitarity: f64,
}

impl Metadata {
    pub fn new(command: &str) -> Self {
        Metadata {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            n: None,
            a: None,
            coin: None,
            initial: None,
            edge: None,
            seed: None,
            steps: None,
            method: None,
            tolerances: Tolerances {
                coin_unitarity: lively_core::model::COIN_UNITARITY_TOL,
                ..Tolerances::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn from_distribution(d: &Distribution) -> Self {
        let mut t = Table::new(&["position", "probability"]);
        for (x, p) in d.probabilities().iter().enumerate() {
            t.push(vec![Cell::Int(x as u64), Cell::Float(*p)]);
        }
        t
    }

    pub fn render(&self, format: Format, meta: &Metadata) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let encode = |e: csv::Error| CliError::param(format!("csv encoding failed: {e}"));
                w.write_record(&self.columns).map_err(encode)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(encode)?;
                }
                w.into_inner()
                    .map_err(|e| CliError::param(format!("csv encoding failed: {e}")))
            }
            Format::Json => {
                let doc = serde_json::json!({
                    "metadata": meta,
                    "columns": self.columns,
                    "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                });
                let mut bytes = serde_json::to_vec_pretty(&doc)
                    .map_err(|e| CliError::param(format!("json encoding failed: {e}")))?;
                bytes.push(b'\n');
                Ok(bytes)
            }
        }
    }
}

pub fn emit(bytes: &[u8], output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
