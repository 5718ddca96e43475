//! Settings resolved from flags, `KZB_*` environment variables, a plain
//! `key = value` config file and built-in defaults, in that order.

use std::collections::BTreeMap;
use std::path::Path;

use kzb_core::specfun::SpecfunConfig;
use kzb_core::C64;
use serde_json::Value;

use crate::CliError;

/// Values given on the command line; `None` when the flag is absent.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub degree: Option<usize>,
    pub qtol: Option<f64>,
    pub tol: Option<f64>,
    pub fd_step: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub seed: u64,
    /// `None` lets each suite use its own truncation degrees.
    pub degree: Option<usize>,
    pub qtol: f64,
    /// Replaces every case tolerance when set.
    pub tol: Option<f64>,
    pub fd_step: f64,
    /// `None` lets each suite use its own number of sample points.
    pub points: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: 1,
            degree: None,
            qtol: SpecfunConfig::default().q_tol,
            tol: None,
            fd_step: 1e-4,
            points: None,
        }
    }
}

const KEYS: [&str; 6] = ["seed", "degree", "qtol", "tol", "fd_step", "points"];

impl Settings {
    /// Resolve with `env` standing in for the process environment.
    pub fn resolve(
        flags: &Overrides,
        config_file: Option<&Path>,
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(path) = config_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
            for (key, value) in parse_config(&text)? {
                s.set(&key, &value, "config file")?;
            }
        }
        for key in KEYS {
            let var = format!("KZB_{}", key.to_uppercase());
            if let Some(v) = env(&var) {
                s.set(key, &v, &var)?;
            }
        }
        if let Some(v) = flags.seed {
            s.seed = v;
        }
        if let Some(v) = flags.degree {
            s.degree = Some(v);
        }
        if let Some(v) = flags.qtol {
            s.qtol = v;
        }
        if let Some(v) = flags.tol {
            s.tol = Some(v);
        }
        if let Some(v) = flags.fd_step {
            s.fd_step = v;
        }
        if let Some(v) = flags.points {
            s.points = Some(v);
        }
        s.validate()?;
        Ok(s)
    }

    fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), CliError> {
        let bad = |e: String| CliError::Usage(format!("{origin}: bad value {value:?} for {key}: {e}"));
        let v = value.trim();
        match key {
            "seed" => self.seed = v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "degree" => self.degree = Some(v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?),
            "qtol" => self.qtol = v.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            "tol" => self.tol = Some(v.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?),
            "fd_step" => self.fd_step = v.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            "points" => self.points = Some(v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?),
            _ => return Err(CliError::Usage(format!("{origin}: unknown key {key:?}"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.qtol > 0.0 && self.qtol < 1.0) {
            return Err(CliError::Usage(format!("qtol must lie in (0, 1), got {}", self.qtol)));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return Err(CliError::Usage(format!("fd-step must lie in (0, 0.1), got {}", self.fd_step)));
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0) {
                return Err(CliError::Usage(format!("tol must be nonnegative, got {t}")));
            }
        }
        if self.points == Some(0) {
            return Err(CliError::Usage("points must be positive".into()));
        }
        if let Some(n) = self.degree {
            if n == 0 || n > kzb_core::nca::MAX_CAP {
                return Err(CliError::Usage(format!("degree must lie in 1..={}", kzb_core::nca::MAX_CAP)));
            }
        }
        Ok(())
    }

    pub fn specfun_config(&self) -> SpecfunConfig {
        SpecfunConfig { q_tol: self.qtol, ..SpecfunConfig::default() }
    }

    pub fn echo(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert("seed".into(), self.seed.into());
        m.insert("degree".into(), self.degree.map(Value::from).unwrap_or(Value::Null));
        m.insert("qtol".into(), self.qtol.into());
        m.insert("tol".into(), self.tol.map(Value::from).unwrap_or(Value::Null));
        m.insert("fd_step".into(), self.fd_step.into());
        m.insert("points".into(), self.points.map(Value::from).unwrap_or(Value::Null));
        m
    }
}

/// `key = value` lines; `#` starts a comment. Dashes in keys are read as
/// underscores.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        out.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses `1.2i`, `0.3+1.1i`, `-0.5`, `i`, `-2e-3-0.5i` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty number".into());
    }
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("bad complex number {s:?}"));
    if let Some((re, im)) = s.split_once(',') {
        return Ok(C64::new(num(re)?, num(im)?));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(num(&s)?, 0.0));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (num(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => num(t)?,
    };
    Ok(C64::new(re, im))
}
