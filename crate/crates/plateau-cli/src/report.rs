//! Check rows and their CSV/JSON serialization. Emission is fully
//! deterministic: no timestamps, float formatting via the shortest
//! round-trip representation.

use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub quantity: String,
    pub component_indices: String,
    pub value: f64,
    pub std_error: f64,
    pub target: Option<f64>,
    pub rel_dev: Option<f64>,
    pub pass: bool,
}

impl Row {
    /// Deterministic value against a target with a relative tolerance.
    pub fn checked(quantity: &str, indices: &str, value: f64, target: f64, rel_tol: f64) -> Row {
        let scale = target.abs().max(f64::MIN_POSITIVE);
        let rel = (value - target).abs() / scale;
        Row {
            quantity: quantity.into(),
            component_indices: indices.into(),
            value,
            std_error: 0.0,
            target: Some(target),
            rel_dev: Some(rel),
            pass: rel < rel_tol,
        }
    }

    /// Value against an absolute bound (target 0 situations).
    pub fn bounded(quantity: &str, indices: &str, value: f64, abs_tol: f64) -> Row {
        Row {
            quantity: quantity.into(),
            component_indices: indices.into(),
            value,
            std_error: 0.0,
            target: Some(0.0),
            rel_dev: None,
            pass: value.abs() <= abs_tol,
        }
    }

    /// Monte Carlo value against a target within `n_sigma` standard errors.
    pub fn sigma_checked(
        quantity: &str,
        indices: &str,
        value: f64,
        std_error: f64,
        target: f64,
        n_sigma: f64,
    ) -> Row {
        let dev = (value - target).abs();
        Row {
            quantity: quantity.into(),
            component_indices: indices.into(),
            value,
            std_error,
            target: Some(target),
            rel_dev: Some(dev / target.abs().max(f64::MIN_POSITIVE)),
            pass: dev <= n_sigma * std_error + 1e-15,
        }
    }

    /// Informational row that never fails the run.
    pub fn info(quantity: &str, indices: &str, value: f64, target: Option<f64>) -> Row {
        let rel = target.map(|t| (value - t).abs() / t.abs().max(f64::MIN_POSITIVE));
        Row {
            quantity: quantity.into(),
            component_indices: indices.into(),
            value,
            std_error: 0.0,
            target,
            rel_dev: rel,
            pass: true,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config_version: u32,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(command: &str, config_version: u32, rows: Vec<Row>) -> Report {
        Report {
            command: command.into(),
            config_version,
            rows,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,component_indices,value,std_error,target,rel_dev,pass\n");
        for r in &self.rows {
            let target = r.target.map(|t| fmt_f64(t)).unwrap_or_default();
            let rel = r.rel_dev.map(|t| fmt_f64(t)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.quantity,
                r.component_indices,
                fmt_f64(r.value),
                fmt_f64(r.std_error),
                target,
                rel,
                if r.pass { "pass" } else { "fail" }
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// Human-readable pass/fail table for stdout.
    pub fn render_table(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.quantity.len() + r.component_indices.len())
            .max()
            .unwrap_or(0)
            + 2;
        let mut out = String::new();
        for r in &self.rows {
            let name = if r.component_indices.is_empty() {
                r.quantity.clone()
            } else {
                format!("{}[{}]", r.quantity, r.component_indices)
            };
            let status = if r.pass { "PASS" } else { "FAIL" };
            let _ = write!(out, "{status}  {name:width$}  value={:+.9e}", r.value);
            if r.std_error != 0.0 {
                let _ = write!(out, "  sigma={:.3e}", r.std_error);
            }
            if let Some(t) = r.target {
                let _ = write!(out, "  target={:+.9e}", t);
            }
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip float formatting (deterministic across runs).
pub fn fmt_f64(x: f64) -> String {
    let mut buf = ryu_like(x);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_like(x: f64) -> String {
    format!("{x}")
}

/// Two-column plot CSV.
pub fn plot_csv(header: (&str, &str), rows: &[(f64, f64)]) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (a, b) in rows {
        let _ = writeln!(out, "{},{}", fmt_f64(*a), fmt_f64(*b));
    }
    out
}
