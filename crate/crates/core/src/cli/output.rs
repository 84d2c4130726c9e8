//! Aligned `key = value` reports. The output is valid TOML, so it can be
//! read back by scripts, and stays readable in a terminal.

use std::fmt::Write as _;

use crate::domain::NormReport;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Formats a float as a TOML float that round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        let s = format!("{x}");
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Default)]
pub struct KvReport {
    entries: Vec<(String, String)>,
}

impl KvReport {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.int("format_version", REPORT_FORMAT_VERSION as i64);
        r.string("command", command);
        r
    }

    pub fn raw(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn float(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.raw(key, fmt_f64(value))
    }

    pub fn int(&mut self, key: impl Into<String>, value: i64) -> &mut Self {
        self.raw(key, value.to_string())
    }

    pub fn boolean(&mut self, key: impl Into<String>, value: bool) -> &mut Self {
        self.raw(key, value.to_string())
    }

    pub fn string(&mut self, key: impl Into<String>, value: &str) -> &mut Self {
        self.raw(key, format!("{value:?}"))
    }

    pub fn floats(&mut self, key: impl Into<String>, values: &[f64]) -> &mut Self {
        let body: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
        self.raw(key, format!("[{}]", body.join(", ")))
    }

    pub fn norm_report(&mut self, prefix: &str, rep: &NormReport) -> &mut Self {
        self.string(format!("{prefix}.method"), rep.method.as_str())
            .float(format!("{prefix}.value"), rep.value)
            .float(format!("{prefix}.argmax_center_dist"), rep.argmax_ball.center_dist())
            .float(format!("{prefix}.argmax_radius"), rep.argmax_ball.radius())
            .float(format!("{prefix}.abs_uncertainty"), rep.abs_uncertainty)
    }

    pub fn render(&self) -> String {
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k:<width$} = {v}");
        }
        out
    }
}
