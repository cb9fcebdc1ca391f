//! Table emission: CSV (17 significant digits, byte-deterministic) and JSON
//! (columns as arrays).

use std::io::Write;
use std::path::Path;

use crate::config::OutputFormat;
use crate::experiments::{SweepResult, TransientResult};

/// A column-ordered numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn from_transient(res: &TransientResult) -> Self {
        let headers =
            vec!["t", "re_sm", "im_sm", "sz", "pe", "T", "R", "S", "netT", "N", "W"];
        let rows = res
            .trajectory
            .times
            .iter()
            .zip(&res.trajectory.states)
            .zip(&res.channels)
            .map(|((t, s), ch)| {
                vec![
                    *t,
                    s.s_minus.re,
                    s.s_minus.im,
                    s.s_z,
                    s.excited_population(),
                    ch.transmitted,
                    ch.reflected,
                    ch.leaked,
                    ch.net_transmitted,
                    ch.total,
                    ch.absorption,
                ]
            })
            .collect();
        Self { headers, rows }
    }

    pub fn from_sweep(res: &SweepResult) -> Self {
        match res {
            SweepResult::TwoLevel(rows) => Self {
                headers: vec!["p", "pe", "N", "betaR", "betaT", "W"],
                rows: rows
                    .iter()
                    .map(|r| vec![r.p, r.pe, r.total, r.beta_r, r.beta_t, r.absorption])
                    .collect(),
            },
            SweepResult::ThreeLevel(rows) => Self {
                headers: vec!["p", "Pg", "PX", "PXX", "N3L", "betaR3L", "betaR2L"],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![r.p, r.p_g, r.p_x, r.p_xx, r.emission_rate, r.beta_r_3l, r.beta_r_2l]
                    })
                    .collect(),
            },
        }
    }

    pub fn scalar(name: &'static str, value: f64) -> Self {
        Self { headers: vec![name], rows: vec![vec![value]] }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut obj = serde_json::Map::new();
        for (i, h) in self.headers.iter().enumerate() {
            let col: Vec<serde_json::Value> = self
                .rows
                .iter()
                .map(|row| {
                    serde_json::Number::from_f64(row[i])
                        .map_or(serde_json::Value::Null, serde_json::Value::Number)
                })
                .collect();
            obj.insert((*h).to_string(), serde_json::Value::Array(col));
        }
        serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("json")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// 17 significant digits: round-trip exact for every f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        // canonicalize -0.0
        let v = if v == 0.0 { 0.0 } else { v };
        format!("{v:.16e}")
    }
}

pub fn write_table(
    table: &Table,
    format: OutputFormat,
    path: Option<&Path>,
) -> std::io::Result<()> {
    let rendered = table.render(format);
    match path {
        Some(path) => std::fs::write(path, rendered),
        None => std::io::stdout().write_all(rendered.as_bytes()),
    }
}
