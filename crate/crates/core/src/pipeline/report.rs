use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::checks::{InequalityReport, SweepSummary};
use crate::error::Result;

/// One line of a report: an inequality, a residual or a scalar diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub check: String,
    /// Test function, ψ or other qualifier; empty when not applicable.
    #[serde(default)]
    pub label: String,
    pub t_prime: Option<f64>,
    pub t: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// Defect for inequalities, residual or gap otherwise.
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

impl StatRow {
    pub fn from_inequality(r: &InequalityReport, label: &str) -> Self {
        StatRow {
            check: r.check.clone(),
            label: label.to_string(),
            t_prime: Some(r.t_prime),
            t: Some(r.t),
            lhs: Some(r.lhs),
            rhs: Some(r.rhs),
            value: r.defect,
            tol: r.tol,
            passed: r.passed,
        }
    }

    pub fn from_sweep(s: &SweepSummary, label: &str) -> Self {
        StatRow::from_inequality(&s.worst, label)
    }

    /// Nonnegative quantity that passes when `value <= tol`.
    pub fn scalar(check: &str, label: &str, value: f64, tol: f64) -> Self {
        StatRow {
            check: check.to_string(),
            label: label.to_string(),
            t_prime: None,
            t: None,
            lhs: None,
            rhs: None,
            value,
            tol,
            passed: value <= tol,
        }
    }

    pub fn flag(check: &str, label: &str, passed: bool) -> Self {
        StatRow {
            check: check.to_string(),
            label: label.to_string(),
            t_prime: None,
            t: None,
            lhs: None,
            rhs: None,
            value: if passed { 0.0 } else { 1.0 },
            tol: 0.0,
            passed,
        }
    }
}

/// Time series point, long format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub series: String,
    pub t: f64,
    pub value: f64,
}

/// Value of a diagnostic at one step size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub check: String,
    pub label: String,
    pub dt: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub title: String,
    pub rows: Vec<StatRow>,
    #[serde(default)]
    pub series: Vec<SeriesPoint>,
    #[serde(default)]
    pub convergence: Vec<ConvergencePoint>,
}

#[derive(Serialize)]
struct CsvLine<'a> {
    section: &'a str,
    check: &'a str,
    label: &'a str,
    t_prime: Option<f64>,
    t: Option<f64>,
    dt: Option<f64>,
    lhs: Option<f64>,
    rhs: Option<f64>,
    value: f64,
    tol: Option<f64>,
    passed: Option<bool>,
}

impl StatReport {
    pub fn new(title: impl Into<String>) -> Self {
        StatReport {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: StatRow) {
        self.rows.push(row);
    }

    pub fn push_series(&mut self, series: &str, times: &[f64], values: &[f64]) {
        for (t, v) in times.iter().zip(values) {
            self.series.push(SeriesPoint {
                series: series.to_string(),
                t: *t,
                value: *v,
            });
        }
    }

    pub fn push_convergence(&mut self, check: &str, label: &str, dt: f64, value: f64) {
        self.convergence.push(ConvergencePoint {
            check: check.into(),
            label: label.into(),
            dt,
            value,
        });
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &StatRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Single long-format table; the `section` column says which part a line
    /// comes from (`row`, `series` or `convergence`).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(CsvLine {
                section: "row",
                check: &r.check,
                label: &r.label,
                t_prime: r.t_prime,
                t: r.t,
                dt: None,
                lhs: r.lhs,
                rhs: r.rhs,
                value: r.value,
                tol: Some(r.tol),
                passed: Some(r.passed),
            })?;
        }
        for s in &self.series {
            w.serialize(CsvLine {
                section: "series",
                check: &s.series,
                label: "",
                t_prime: None,
                t: Some(s.t),
                dt: None,
                lhs: None,
                rhs: None,
                value: s.value,
                tol: None,
                passed: None,
            })?;
        }
        for c in &self.convergence {
            w.serialize(CsvLine {
                section: "convergence",
                check: &c.check,
                label: &c.label,
                t_prime: None,
                t: None,
                dt: Some(c.dt),
                lhs: None,
                rhs: None,
                value: c.value,
                tol: None,
                passed: None,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}
