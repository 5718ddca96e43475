use std::collections::BTreeMap;
use std::fmt::Write;

use kzb_core::C64;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub name: String,
    pub point: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Case {
    /// A NaN residual fails.
    pub fn new(name: impl Into<String>, point: impl Into<String>, residual: f64, tol: f64) -> Self {
        Case { name: name.into(), point: point.into(), residual, tol, pass: residual <= tol }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub seed: u64,
    pub config_echo: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub info: BTreeMap<String, Value>,
    pub cases: Vec<Case>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, config_echo: BTreeMap<String, Value>, cases: Vec<Case>) -> Self {
        let pass = cases.iter().all(|c| c.pass);
        SuiteReport { suite: suite.into(), pass, seed, config_echo, info: BTreeMap::new(), cases }
    }

    /// Apply a global tolerance override to every case.
    pub fn with_tol(mut self, tol: Option<f64>) -> Self {
        if let Some(t) = tol {
            for c in &mut self.cases {
                c.tol = t;
                c.pass = c.residual <= t;
            }
            self.pass = self.cases.iter().all(|c| c.pass);
        }
        self
    }

    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.pass).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let echo: Vec<String> = self.config_echo.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "suite {} ({})", self.suite, echo.join(" "));
        for (k, v) in &self.info {
            let _ = writeln!(out, "  {k}: {v}");
        }
        let width = self.cases.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.cases {
            let _ = writeln!(
                out,
                "  {}  {:<width$}  residual {:.3e}  tol {:.1e}  {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tol,
                c.point,
            );
        }
        let _ = writeln!(
            out,
            "{}: {}/{} passed{}",
            self.suite,
            self.passed(),
            self.cases.len(),
            if self.pass { "" } else { "  FAILED" }
        );
        out
    }
}

/// `a+bi` with a fixed number of digits.
pub fn fmt_c(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}
