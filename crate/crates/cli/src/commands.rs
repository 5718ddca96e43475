use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use kzb_core::ratstruct::WeierstrassFrame;
use kzb_core::specfun::EisensteinCache;
use kzb_core::transport::{transport, PathSpec, TransportOptions, TransportResult};
use kzb_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::Settings;
use crate::report::{fmt_c, SuiteReport};
use crate::suites::{form_identity_cases, frame_cases, realness_case, run_suite};
use crate::{Cli, CliError, Command, Function, RatcheckArgs, SpecfunArgs, TransportArgs, VerifyArgs};

/// What a command prints and the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

/// Run a parsed command line; `env` looks up environment variables.
pub fn run(cli: &Cli, env: impl Fn(&str) -> Option<String>) -> Result<Output, CliError> {
    let settings = Settings::resolve(&cli.overrides(), cli.config.as_deref(), env)?;
    match &cli.command {
        Command::Specfun(a) => specfun(a, &settings, cli.json),
        Command::Verify(a) => verify(a, &settings, cli.json),
        Command::Transport(a) => transport_cmd(a, &settings, cli.json),
        Command::Ratcheck(a) => ratcheck(a, &settings, cli.json),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn specfun(a: &SpecfunArgs, s: &Settings, json: bool) -> Result<Output, CliError> {
    let need = |v: Option<C64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--fn {:?} needs --{flag}", a.function)));
    let need_k = || a.k.ok_or_else(|| CliError::Usage("--k is required for this function".into()));
    let kmax = a.k.unwrap_or(0).max(8);
    let c = EisensteinCache::new(a.tau, kmax, s.specfun_config())?;
    let value = match a.function {
        Function::Theta => c.theta(need(a.xi, "xi")?)?,
        Function::BigE => {
            let k = need_k()?;
            if k == 0 {
                return Err(CliError::Usage("E_k needs k >= 1".into()));
            }
            c.big_e_all(need(a.xi, "xi")?, k)?[k]
        }
        Function::SmallE => c.e(need_k()?)?,
        Function::F => c.kronecker_f(need(a.xi, "xi")?, need(a.alpha, "alpha")?)?,
        Function::F2 => c.kronecker_f2prime(need(a.xi, "xi")?, need(a.alpha, "alpha")?)?,
        Function::Wp => c.wp(need(a.xi, "xi")?)?,
    };
    // print 0 rather than -0
    let (re, im) = (value.re + 0.0, value.im + 0.0);
    let out = if json {
        pretty(&json!({ "fn": format!("{:?}", a.function), "value": [re, im] }))
    } else {
        format!("{re} {im}\n")
    };
    Ok(Output::ok(out))
}

fn verify(a: &VerifyArgs, s: &Settings, json: bool) -> Result<Output, CliError> {
    let reports = a
        .suite
        .names()
        .into_iter()
        .map(|name| run_suite(name, s, a.inject_sign_flip))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let json_text = if reports.len() == 1 { pretty(&reports[0]) } else { pretty(&reports) };
    if let Some(path) = &a.report {
        write(path, &json_text)?;
    }
    let stdout = if json { json_text } else { reports.iter().map(SuiteReport::to_text).collect() };
    Ok(Output { stdout, code: if pass { 0 } else { 1 } })
}

fn summary(r: &TransportResult, top: usize) -> String {
    let mut terms: Vec<_> = r.phi.terms().filter(|(_, c)| c.norm() > 0.0).collect();
    terms.sort_by(|(wa, a), (wb, b)| b.norm().total_cmp(&a.norm()).then(wa.code().cmp(&wb.code())));
    let mut out = String::new();
    let _ = writeln!(out, "degree {}  error estimate {:.3e}", r.phi.cap(), r.error_estimate);
    let profile: Vec<String> = r.degree_profile.iter().map(|v| format!("{v:.3e}")).collect();
    let _ = writeln!(out, "largest coefficient per degree: {}", profile.join(" "));
    let label = |w: &kzb_core::nca::Word| if w.is_empty() { "1".to_string() } else { w.to_string() };
    let width = terms.iter().take(top).map(|(w, _)| label(w).len()).max().unwrap_or(1);
    for (w, c) in terms.iter().take(top) {
        let _ = writeln!(out, "  {:<width$}  {:+.12e} {:+.12e}i", label(w), c.re, c.im);
    }
    out
}

fn transport_cmd(a: &TransportArgs, s: &Settings, json: bool) -> Result<Output, CliError> {
    let mut path = PathSpec::from_json(&read(&a.path)?, s.degree.unwrap_or(4))?;
    if let Some(n) = s.degree {
        path = path.with_degree(n);
    }
    let mut opts = TransportOptions { config: s.specfun_config(), ..TransportOptions::default() };
    if let Some(q) = a.quad {
        opts.quad_points = q;
        opts.max_quad_points = opts.max_quad_points.max(q);
    }
    if let Some(t) = s.tol {
        opts.tol = t;
    }
    let r = transport(&path, &opts)?;
    let json_text = pretty(&r.to_json_value());
    if let Some(out) = &a.out {
        write(out, &json_text)?;
    }
    let stdout = if a.summary && !json { summary(&r, 12) } else { json_text };
    Ok(Output::ok(stdout))
}

/// Sample points `a + b tau` with fractional coordinates in [0.15, 0.45],
/// well inside the fundamental parallelogram.
fn frame_points(tau: C64, n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0.15..0.45) + rng.gen_range(0.15..0.45) * tau).collect()
}

fn ratcheck(a: &RatcheckArgs, s: &Settings, json: bool) -> Result<Output, CliError> {
    let f = WeierstrassFrame::from_json(&read(&a.frame)?, s.specfun_config())?;
    let deg = s.degree.unwrap_or(6);
    let n = s.points.unwrap_or(3);
    let mut cases = Vec::new();
    for (i, xi) in frame_points(f.tau, n, s.seed).into_iter().enumerate() {
        let p = format!("#{i} N={deg} xi={}", fmt_c(xi));
        cases.extend(form_identity_cases(&f, xi, s.fd_step, &p)?);
        cases.extend(frame_cases(&f, xi, deg, s.fd_step, &p)?);
    }
    if f.tau.re == 0.0 && f.u.im == 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        for i in 0..n {
            let xi = C64::new(rng.gen_range(0.1..0.4), 0.0);
            cases.push(realness_case(&f, xi, deg, &format!("#{i} N={deg} xi={}", fmt_c(xi)))?);
        }
    }
    let mut report = SuiteReport::new("ratcheck", s.seed, s.echo(), cases).with_tol(s.tol);
    let c = |z: C64| json!([z.re, z.im]);
    report.info = BTreeMap::from([
        ("tau".to_string(), c(f.tau)),
        ("u".to_string(), c(f.u)),
        ("g2".to_string(), c(f.g2)),
        ("g3".to_string(), c(f.g3)),
        ("delta".to_string(), c(f.delta)),
    ]);
    let code = if report.pass { 0 } else { 1 };
    let stdout = if json { pretty(&report) } else { report.to_text() };
    Ok(Output { stdout, code })
}
