//! The `OutputRecord` every command produces, and its CSV and JSON forms.
//!
//! CSV output starts with `# key: value` comment lines carrying everything
//! except the rows, followed by a header and one line per row. Floats are
//! written with 17 significant digits, so both forms parse back bit-exact.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use polymoments::Method;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("malformed CSV record: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing `# {0}:` line")]
    MissingField(&'static str),
    #[error("unknown row kind `{0}`")]
    UnknownKind(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub params: Value,
    pub rows: Rows,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: Option<String>,
    pub seed: Option<u64>,
    pub shard_plan: Option<String>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub threads: usize,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "items", rename_all = "snake_case")]
pub enum Rows {
    Moments(Vec<MomentRow>),
    Table(Vec<TableRow>),
    Curve(Vec<CurveRow>),
    Checks(Vec<CheckRow>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub n: u32,
    pub r: f64,
    pub m: i32,
    pub value: f64,
    pub method: Method,
    pub err_estimate: Option<f64>,
    pub quadrature_pdf: Option<f64>,
    pub quadrature_cdf: Option<f64>,
    pub monte_carlo: Option<f64>,
    pub mc_std_error: Option<f64>,
}

/// `n` is `"inf"` on the disc row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: String,
    pub quantity: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub x: f64,
    pub value: f64,
    pub chord_pdf: Option<f64>,
    pub circle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub n: Option<u32>,
    pub m: Option<i32>,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Formats `v` with 17 significant digits, positional where that stays
/// short and scientific otherwise.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..=16).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // A carry can add a digit (9.99… → 10.0…); positional form still
        // holds at least 17 significant digits, which is what matters.
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.16e}")
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

fn method_name(m: Method) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

impl Rows {
    pub fn kind(&self) -> &'static str {
        match self {
            Rows::Moments(_) => "moments",
            Rows::Table(_) => "table",
            Rows::Curve(_) => "curve",
            Rows::Checks(_) => "checks",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Rows::Moments(v) => v.len(),
            Rows::Table(v) => v.len(),
            Rows::Curve(v) => v.len(),
            Rows::Checks(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn header(&self) -> &'static [&'static str] {
        match self {
            Rows::Moments(_) => &[
                "n",
                "r",
                "m",
                "value",
                "method",
                "err_estimate",
                "quadrature_pdf",
                "quadrature_cdf",
                "monte_carlo",
                "mc_std_error",
            ],
            Rows::Table(_) => &["n", "quantity", "value"],
            Rows::Curve(_) => &["x", "value", "chord_pdf", "circle"],
            Rows::Checks(_) => &["name", "n", "m", "discrepancy", "tolerance", "passed"],
        }
    }

    fn records(&self) -> Vec<Vec<String>> {
        match self {
            Rows::Moments(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        format_f64(r.r),
                        r.m.to_string(),
                        format_f64(r.value),
                        method_name(r.method),
                        opt_f64(r.err_estimate),
                        opt_f64(r.quadrature_pdf),
                        opt_f64(r.quadrature_cdf),
                        opt_f64(r.monte_carlo),
                        opt_f64(r.mc_std_error),
                    ]
                })
                .collect(),
            Rows::Table(rows) => rows
                .iter()
                .map(|r| vec![r.n.clone(), r.quantity.clone(), format_f64(r.value)])
                .collect(),
            Rows::Curve(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        format_f64(r.x),
                        format_f64(r.value),
                        opt_f64(r.chord_pdf),
                        opt_f64(r.circle),
                    ]
                })
                .collect(),
            Rows::Checks(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        opt(r.n),
                        opt(r.m),
                        format_f64(r.discrepancy),
                        format_f64(r.tolerance),
                        r.passed.to_string(),
                    ]
                })
                .collect(),
        }
    }
}

impl OutputRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, OutputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema_version: {}\n", self.schema_version));
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# kind: {}\n", self.rows.kind()));
        out.push_str(&format!("# params: {}\n", compact(&self.params)));
        out.push_str(&format!("# metadata: {}\n", compact(&self.metadata)));
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(self.rows.header())
            .expect("in-memory write");
        for record in self.rows.records() {
            writer.write_record(&record).expect("in-memory write");
        }
        let body = writer.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(body).expect("CSV of UTF-8 fields"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, OutputError> {
        let field = |key: &'static str| {
            let prefix = format!("# {key}: ");
            text.lines()
                .find_map(|l| l.strip_prefix(&prefix))
                .ok_or(OutputError::MissingField(key))
        };
        let kind = field("kind")?;
        let body: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        let rows = match kind {
            "moments" => Rows::Moments(parse_rows(&body)?),
            "table" => Rows::Table(parse_rows(&body)?),
            "curve" => Rows::Curve(parse_rows(&body)?),
            "checks" => Rows::Checks(parse_rows(&body)?),
            other => return Err(OutputError::UnknownKind(other.to_owned())),
        };
        Ok(OutputRecord {
            schema_version: field("schema_version")?.to_owned(),
            command: field("command")?.to_owned(),
            params: serde_json::from_str(field("params")?)?,
            rows,
            metadata: serde_json::from_str(field("metadata")?)?,
        })
    }
}

fn parse_rows<T: DeserializeOwned>(body: &str) -> Result<Vec<T>, OutputError> {
    csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, csv::Error>>()
        .map_err(OutputError::from)
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records always serialize")
}
