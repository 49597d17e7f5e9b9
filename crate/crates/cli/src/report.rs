//! Report rows and their CSV, JSON and Markdown renderings.

use std::path::Path;

use bellcg::Rational;
use serde::Serialize;

use crate::CliError;

pub const COLUMNS: [&str; 13] = [
    "index",
    "name",
    "scenario",
    "L",
    "N",
    "Q",
    "theta_over_pi",
    "lambda",
    "lambda_me",
    "eta_sym",
    "facet",
    "correlation_form",
    "lifted_from",
];

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub index: usize,
    pub name: String,
    pub scenario: String,
    #[serde(rename = "L")]
    pub l: i64,
    #[serde(rename = "N", serialize_with = "ser_rational")]
    pub n: Rational,
    #[serde(rename = "Q")]
    pub q: f64,
    pub theta_over_pi: f64,
    pub lambda: f64,
    pub lambda_me: f64,
    pub eta_sym: f64,
    #[serde(rename = "facet")]
    pub is_facet: bool,
    pub correlation_form: bool,
    pub lifted_from: Option<String>,
    /// Quantum value with the maximally entangled state.
    #[serde(rename = "Q_me")]
    pub q_me: f64,
    /// Optimal no-click outputs, Alice's then Bob's, one digit per setting.
    pub noclick: String,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl AnalysisReport {
    /// Violated row invariants; empty for a well-formed row.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (col, v) in [
            ("Q", self.q),
            ("theta_over_pi", self.theta_over_pi),
            ("lambda", self.lambda),
            ("lambda_me", self.lambda_me),
            ("eta_sym", self.eta_sym),
        ] {
            if !v.is_finite() {
                out.push(format!("{col} is not finite"));
            }
        }
        for (col, v) in [
            ("lambda", self.lambda),
            ("lambda_me", self.lambda_me),
            ("eta_sym", self.eta_sym),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                out.push(format!("{col} = {v} outside (0, 1]"));
            }
        }
        if self.q < self.l as f64 - 1e-9 {
            out.push(format!("Q = {} below local bound {}", self.q, self.l));
        }
        if !(0.0..=0.25).contains(&self.theta_over_pi) {
            out.push(format!(
                "theta_over_pi = {} outside [0, 1/4]",
                self.theta_over_pi
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ReportRow {
    Ok(AnalysisReport),
    Failed {
        index: usize,
        name: String,
        scenario: String,
        #[serde(rename = "error")]
        message: String,
    },
}

impl ReportRow {
    pub fn index(&self) -> usize {
        match self {
            ReportRow::Ok(r) => r.index,
            ReportRow::Failed { index, .. } => *index,
        }
    }

    pub fn report(&self) -> Option<&AnalysisReport> {
        match self {
            ReportRow::Ok(r) => Some(r),
            ReportRow::Failed { .. } => None,
        }
    }
}

/// Fixed six-decimal rendering. Rust's formatter rounds the exact binary
/// value, sending exact ties to the even digit.
pub fn fmt_real(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn csv_fields(row: &ReportRow) -> Vec<String> {
    match row {
        ReportRow::Ok(r) => vec![
            r.index.to_string(),
            r.name.clone(),
            r.scenario.clone(),
            r.l.to_string(),
            r.n.to_string(),
            fmt_real(r.q),
            fmt_real(r.theta_over_pi),
            fmt_real(r.lambda),
            fmt_real(r.lambda_me),
            fmt_real(r.eta_sym),
            r.is_facet.to_string(),
            r.correlation_form.to_string(),
            r.lifted_from.clone().unwrap_or_default(),
        ],
        ReportRow::Failed {
            index,
            name,
            scenario,
            ..
        } => {
            let mut f = vec![index.to_string(), name.clone(), scenario.clone()];
            f.resize(COLUMNS.len(), String::new());
            f
        }
    }
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for row in rows {
        w.write_record(csv_fields(row)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn to_json(rows: &[ReportRow]) -> String {
    serde_json::to_string_pretty(rows).expect("serializable rows") + "\n"
}

pub fn to_markdown(rows: &[ReportRow]) -> String {
    let mut out = format!("| {} |\n", COLUMNS.join(" | "));
    out += &format!("|{}\n", "---|".repeat(COLUMNS.len()));
    for row in rows {
        let mut f = csv_fields(row);
        if let ReportRow::Failed { message, .. } = row {
            f[COLUMNS.len() - 1] = format!("failed: {message}");
        }
        out += &format!("| {} |\n", f.join(" | "));
    }
    out
}

/// A report row as read back from CSV. Numeric cells may be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRecord {
    pub index: usize,
    pub name: String,
    pub scenario: String,
    pub l: Option<f64>,
    pub n: Option<f64>,
    pub q: Option<f64>,
    pub theta_over_pi: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_me: Option<f64>,
    pub eta_sym: Option<f64>,
    pub facet: Option<bool>,
    pub correlation_form: Option<bool>,
    pub lifted_from: Option<String>,
}

/// Parses a decimal or an exact fraction such as `-1/2`.
fn parse_number(cell: &str) -> Option<Result<f64, String>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return None;
    }
    let parsed = match cell.split_once('/') {
        Some((p, q)) => match (p.trim().parse::<f64>(), q.trim().parse::<f64>()) {
            (Ok(p), Ok(q)) if q != 0.0 => Ok(p / q),
            _ => Err(format!("invalid fraction `{cell}`")),
        },
        None => cell
            .parse::<f64>()
            .map_err(|_| format!("invalid number `{cell}`")),
    };
    Some(parsed)
}

fn parse_bool(cell: &str) -> Option<Result<bool, String>> {
    match cell.trim() {
        "" => None,
        "true" => Some(Ok(true)),
        "false" => Some(Ok(false)),
        other => Some(Err(format!("invalid boolean `{other}`"))),
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRecord>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    if headers.iter().ne(COLUMNS.iter().copied()) {
        return Err(format!(
            "expected header `{}`, found `{}`",
            COLUMNS.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let row = i + 1;
        let ctx = |msg: String| format!("data row {row}: {msg}");
        let num = |k: usize| parse_number(&rec[k]).transpose().map_err(ctx);
        let flag = |k: usize| parse_bool(&rec[k]).transpose().map_err(ctx);
        out.push(ReportRecord {
            index: rec[0]
                .parse()
                .map_err(|_| ctx(format!("invalid index `{}`", &rec[0])))?,
            name: rec[1].to_string(),
            scenario: rec[2].to_string(),
            l: num(3)?,
            n: num(4)?,
            q: num(5)?,
            theta_over_pi: num(6)?,
            lambda: num(7)?,
            lambda_me: num(8)?,
            eta_sym: num(9)?,
            facet: flag(10)?,
            correlation_form: flag(11)?,
            lifted_from: Some(rec[12].to_string()).filter(|s| !s.is_empty()),
        });
    }
    Ok(out)
}

pub fn read_csv(path: &Path) -> Result<Vec<ReportRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text).map_err(|msg| CliError::Report {
        path: path.to_path_buf(),
        msg,
    })
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    fn sample() -> AnalysisReport {
        AnalysisReport {
            index: 1,
            name: "CHSH".into(),
            scenario: "2x2".into(),
            l: 0,
            n: Rational::new(-1, 2),
            q: 0.20710678118654746,
            theta_over_pi: 0.25,
            lambda: 0.7071067811865476,
            lambda_me: 0.7071067811865476,
            eta_sym: 0.8284271247461902,
            is_facet: true,
            correlation_form: true,
            lifted_from: None,
            q_me: 0.20710678118654746,
            noclick: "00/00".into(),
        }
    }

    #[test]
    fn six_decimals_half_even() {
        assert_eq!(fmt_real(0.25), "0.250000");
        // 0.0000125 is not a binary tie; these exact ties are.
        assert_eq!(format!("{:.1}", 0.25), "0.2");
        assert_eq!(format!("{:.1}", 0.75), "0.8");
        assert_eq!(fmt_real(-1e-12), "0.000000");
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&[ReportRow::Ok(sample())]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "1,CHSH,2x2,0,-1/2,0.207107,0.250000,0.707107,0.707107,0.828427,true,true,"
        );
    }

    #[test]
    fn csv_reads_back() {
        let rows = vec![
            ReportRow::Ok(sample()),
            ReportRow::Failed {
                index: 2,
                name: "bad".into(),
                scenario: "3x3".into(),
                message: "boom".into(),
            },
        ];
        let recs = parse_csv(&to_csv(&rows)).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].n, Some(-0.5));
        assert_eq!(recs[0].lambda, Some(0.707107));
        assert_eq!(recs[0].facet, Some(true));
        assert_eq!(recs[1].q, None);
        assert_eq!(recs[1].lifted_from, None);
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse_csv("index,name\n1,x\n").is_err());
    }

    #[test]
    fn invariants() {
        assert!(sample().violations().is_empty());
        let mut bad = sample();
        bad.lambda = 0.0;
        bad.q = -1.0;
        assert_eq!(bad.violations().len(), 2);
    }

    #[test]
    fn json_and_markdown() {
        let json = to_json(&[ReportRow::Ok(sample())]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v[0]["N"], "-1/2");
        assert_eq!(v[0]["facet"], true);
        let md = to_markdown(&[ReportRow::Ok(sample())]);
        assert_eq!(md.lines().count(), 3);
        assert!(md.contains("| 1 | CHSH | 2x2 |"));
    }
}
