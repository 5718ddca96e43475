//! Identity suites over seeded random points. Points are drawn up front from
//! one generator, evaluated in parallel and reported in draw order.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use kzb_core::kzb::{
    curvature_residual, mc_residual, nu_section, quasi_periodicity_residuals, sl2_residual, AffineSection,
    ConnForm, ConnOperator, FormEval, Kzb, TauSeries,
};
use kzb_core::ratstruct::{
    algebraic_connection, e1_tau_derivative_residual, e2_tau_derivative_residual, ek_polynomial_residual,
    form_identities_residual, frame_invariance_residual, gauge_transform, gauged_fiber_closed_form,
    gm_rescaling_residual, psi_algebraic_check, WeierstrassFrame,
};
use kzb_core::specfun::{
    fay_residual, heat_residual, kronecker_shift_residuals, modularity_residual, EisensteinCache, Sl2,
    SpecfunConfig,
};
use kzb_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::Settings;
use crate::report::{fmt_c, Case, SuiteReport};
use crate::CliError;

pub const SUITES: [&str; 7] =
    ["scalar-identities", "quasiperiodicity", "flatness", "sl2", "maurer-cartan", "prop523", "rationality"];

/// Tolerance for identities evaluated without differencing.
const TOL_EXACT: f64 = 1e-8;
/// Tolerance for identities checked by central differences.
const TOL_FD: f64 = 1e-6;
/// Allowed deviation of the error ratio from 4 under step halving.
const TOL_RATIO: f64 = 0.5;

/// Run one suite. `flip_psi_t` replaces the connection by one with the sign
/// of its `t -> A` derivation term flipped, which is not flat.
pub fn run_suite(name: &str, s: &Settings, flip_psi_t: bool) -> Result<SuiteReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let cfg = s.specfun_config();
    let cases = match name {
        "scalar-identities" => scalar_identities(s, cfg, &mut rng)?,
        "quasiperiodicity" => quasiperiodicity(s, cfg, &mut rng)?,
        "flatness" => flatness(s, cfg, &mut rng, flip_psi_t)?,
        "sl2" => sl2(s, cfg, &mut rng)?,
        "maurer-cartan" => maurer_cartan(s, cfg, &mut rng)?,
        "prop523" => coframe_identities(s, cfg, &mut rng)?,
        "rationality" => rationality(s, cfg, &mut rng)?,
        _ => return Err(CliError::Usage(format!("unknown suite {name:?}"))),
    };
    Ok(SuiteReport::new(name, s.seed, s.echo(), cases).with_tol(s.tol))
}

fn par_cases<P, F>(points: &[P], f: F) -> Result<Vec<Case>, CliError>
where
    P: Sync,
    F: Fn(usize, &P) -> kzb_core::Result<Vec<Case>> + Sync,
{
    let results: Vec<_> = points.par_iter().enumerate().map(|(i, p)| f(i, p)).collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn random_tau(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0))
}

/// `0.05 <= |z| <= 0.4`, away from every lattice point when `Im tau >= 0.8`.
fn random_small(rng: &mut ChaCha8Rng, rmin: f64) -> C64 {
    C64::from_polar(rng.gen_range(rmin..0.4), rng.gen_range(0.0..TAU))
}

fn random_u(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(-PI..PI))
}

fn degrees(s: &Settings, default: &[usize]) -> Vec<usize> {
    s.degree.map(|d| vec![d]).unwrap_or_else(|| default.to_vec())
}

fn scalar_identities(s: &Settings, cfg: SpecfunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let n = s.points.unwrap_or(20);
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let tau = random_tau(rng);
        let xi = random_small(rng, 0.05);
        let a1 = random_small(rng, 0.05);
        let a2 = loop {
            let a = random_small(rng, 0.05);
            if (a + a1).norm() >= 0.05 && (a - a1).norm() >= 0.05 {
                break a;
            }
        };
        pts.push((tau, xi, a1, a2));
    }
    let h = s.fd_step;
    par_cases(&pts, |i, &(tau, xi, a1, a2)| {
        let c = EisensteinCache::new(tau, 8, cfg)?;
        let cs = EisensteinCache::new(Sl2::S.act(tau), 8, cfg)?;
        let p = format!("#{i} tau={} xi={} alpha={}", fmt_c(tau), fmt_c(xi), fmt_c(a1));
        let (r1, r2) = kronecker_shift_residuals(&c, xi, a1)?;
        Ok(vec![
            Case::new("F(xi+1) = F", &p, r1, TOL_EXACT),
            Case::new("F(xi+tau) = exp(-2 pi i alpha) F", &p, r2, TOL_EXACT),
            Case::new("modularity under S", &p, modularity_residual(&c, &cs, xi, a1, &Sl2::S)?, TOL_EXACT),
            Case::new("mixed heat equation", &p, heat_residual(&c, xi, a1, h)?, TOL_FD),
            Case::new(
                "Fay identity",
                format!("{p} alpha2={}", fmt_c(a2)),
                fay_residual(&c, xi, a1, a2)?,
                TOL_EXACT,
            ),
        ])
    })
}

fn quasiperiodicity(s: &Settings, cfg: SpecfunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let n = s.points.unwrap_or(20);
    let pts: Vec<_> = (0..n).map(|_| (random_tau(rng), random_small(rng, 0.05))).collect();
    let mut out = Vec::new();
    for deg in degrees(s, &[6]) {
        let kzb = Kzb::new(deg)?;
        out.extend(par_cases(&pts, |i, &(tau, xi)| {
            let c = kzb.cache(tau, cfg)?;
            let q = quasi_periodicity_residuals(&kzb, &c, xi)?;
            let p = format!("#{i} N={deg} tau={} xi={}", fmt_c(tau), fmt_c(xi));
            Ok(vec![
                Case::new("xi -> xi+1", &p, q.xi_shift_one, 1e-9),
                Case::new("xi -> xi+tau", &p, q.xi_shift_tau, 1e-9),
                Case::new("tau coefficient shift", &p, q.tau_row, 1e-8),
            ])
        })?);
    }
    Ok(out)
}

fn flatness(s: &Settings, cfg: SpecfunConfig, rng: &mut ChaCha8Rng, flip: bool) -> Result<Vec<Case>, CliError> {
    let n = s.points.unwrap_or(10);
    let pts: Vec<_> = (0..n).map(|_| (random_tau(rng), random_small(rng, 0.05))).collect();
    let mut out = Vec::new();
    for deg in degrees(s, &[4, 6]) {
        let mut kzb = Kzb::new(deg)?;
        if flip {
            kzb = kzb.with_flipped_psi_t();
        }
        let form = ConnForm::new(kzb, cfg);
        out.extend(par_cases(&pts, |i, &(tau, xi)| {
            let p = format!("#{i} N={deg} tau={} xi={}", fmt_c(tau), fmt_c(xi));
            Ok(vec![Case::new("curvature", p, curvature_residual(&form, xi, tau, s.fd_step)?, TOL_FD)])
        })?);
        // the residual is pure difference error: halving h divides it by 4
        let (xi, tau) = (C64::new(0.23, 0.11), C64::new(0.0, 1.2));
        let r1 = curvature_residual(&form, xi, tau, 1e-2)?;
        let r2 = curvature_residual(&form, xi, tau, 5e-3)?;
        let p = format!("N={deg} tau={} xi={} h=1e-2,5e-3", fmt_c(tau), fmt_c(xi));
        out.push(Case::new("curvature ratio under h halving, minus 4", p, (r1 / r2 - 4.0).abs(), TOL_RATIO));
    }
    Ok(out)
}

/// A word of length 2 or 3 in S, T and their inverses.
fn random_word(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(2..=3);
    (0..len).map(|_| ['S', 'T', 's', 't'][rng.gen_range(0..4)]).collect()
}

fn sl2(s: &Settings, cfg: SpecfunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let n = s.points.unwrap_or(5);
    let pts: Vec<_> = (0..n)
        .map(|_| (random_tau(rng), random_small(rng, 0.05), random_word(rng), random_word(rng)))
        .collect();
    let kzb = Kzb::new(s.degree.unwrap_or(6))?;
    par_cases(&pts, |i, (tau, xi, w1, w2)| {
        let p = format!("#{i} N={} tau={} xi={}", kzb.cap(), fmt_c(*tau), fmt_c(*xi));
        let mut out = Vec::new();
        for w in ["S", "T", w1.as_str(), w2.as_str()] {
            let g = Sl2::from_word(w)?;
            out.push(Case::new(format!("equivariance under {w}"), &p, sl2_residual(&kzb, cfg, *xi, *tau, &g)?, TOL_FD));
        }
        Ok(out)
    })
}

fn nu_half(kzb: Kzb, cfg: SpecfunConfig) -> TauSeries {
    Arc::new(move |tau: C64| {
        let c = kzb.cache(tau, cfg)?;
        Ok(nu_section(&kzb, &AffineSection::constant(C64::new(0.5, 0.0)), &c)?.left)
    })
}

fn maurer_cartan(s: &Settings, cfg: SpecfunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let n = s.points.unwrap_or(3);
    let deg = s.degree.unwrap_or(6);
    let pts: Vec<_> = (0..n).map(|_| (random_tau(rng), random_small(rng, 0.05))).collect();
    let kzb = Kzb::new(deg)?;
    let nu = nu_half(kzb.clone(), cfg);
    let form = ConnForm::new(kzb, cfg);
    let twisted = form.twist(nu.clone());
    let neg: TauSeries = {
        let nu = nu.clone();
        Arc::new(move |t: C64| Ok(-nu(t)?))
    };
    let back = twisted.twist(neg);
    let h = s.fd_step;
    par_cases(&pts, |i, &(tau, xi)| {
        let p = format!("#{i} N={deg} tau={}", fmt_c(tau));
        let zero = |_: C64| Ok(ConnOperator::zero(deg));
        let nu_op = |t: C64| Ok(ConnOperator::from_left(nu(t)?));
        let (a, b) = (form.eval(xi, tau)?, back.eval(xi, tau)?);
        let round = a.xi.action_residual(&b.xi)?.max(a.tau.action_residual(&b.tau)?);
        let px = format!("{p} xi={}", fmt_c(xi));
        Ok(vec![
            Case::new("Maurer-Cartan, mu = 0", &p, mc_residual(&zero, &[tau], h)?, TOL_FD),
            Case::new("Maurer-Cartan, mu = nu_sigma, sigma = 1/2", &p, mc_residual(&nu_op, &[tau], h)?, TOL_FD),
            Case::new("twisted curvature", &px, curvature_residual(&twisted, xi, tau, h)?, TOL_FD),
            Case::new("twist by mu then -mu", &px, round, 1e-12),
        ])
    })
}

/// The three differential identities of the Weierstrass frame, with the
/// step-halving ratio of each.
pub fn form_identity_cases(f: &WeierstrassFrame, xi: C64, h: f64, p: &str) -> kzb_core::Result<Vec<Case>> {
    let r = form_identities_residual(f, xi, h)?;
    let a = form_identities_residual(f, xi, 2e-2)?;
    let b = form_identities_residual(f, xi, 1e-2)?;
    let ratio = |x: f64, y: f64| (x / y - 4.0).abs();
    Ok(vec![
        Case::new("d Delta + 12 Delta kappa = 0", p, r.delta, TOL_FD),
        Case::new("d g2 - 6 g3 varpi + 4 kappa g2 = 0", p, r.g2, TOL_FD),
        Case::new("dx - y eta - (2x^2 - g2/3) varpi + 2x kappa = 0", p, r.x, 1e-5),
        Case::new("d Delta ratio under h halving, minus 4", p, ratio(a.delta, b.delta), TOL_RATIO),
        Case::new("d g2 ratio under h halving, minus 4", p, ratio(a.g2, b.g2), TOL_RATIO),
        Case::new("dx ratio under h halving, minus 4", p, ratio(a.x, b.x), TOL_RATIO),
    ])
}

fn coframe_identities(s: &Settings, cfg: SpecfunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let n = s.points.unwrap_or(5);
    let pts: Vec<_> = (0..n).map(|_| (random_tau(rng), random_u(rng), random_small(rng, 0.15))).collect();
    par_cases(&pts, |i, &(tau, u, xi)| {
        let f = WeierstrassFrame::new(tau, u, cfg)?;
        let p = format!("#{i} tau={} u={} xi={}", fmt_c(tau), fmt_c(u), fmt_c(xi));
        form_identity_cases(&f, xi, s.fd_step, &p)
    })
}

/// Checks of the gauged connection and its algebraic form at one frame and
/// one point.
pub fn frame_cases(f: &WeierstrassFrame, xi: C64, deg: usize, h: f64, p: &str) -> kzb_core::Result<Vec<Case>> {
    let kzb = Kzb::new(deg)?;
    let c = f.cache();
    let gauged = gauge_transform(&kzb, c, xi)?;
    let closed = gauged_fiber_closed_form(c, xi, deg)?;
    let ek = (2..=8).map(|k| ek_polynomial_residual(k, f, xi)).collect::<kzb_core::Result<Vec<_>>>()?;
    let psi = psi_algebraic_check(f, deg, 1e-3)?;
    let de = 1e-4;
    Ok(vec![
        Case::new("y^2 = 4x^3 - g2 x - g3", p, f.cubic_residual(xi)?, TOL_EXACT),
        Case::new("gauged fiber coefficient, closed form", p, gauged.xi.left.sup_diff(&closed), TOL_EXACT),
        Case::new("2 pi i dE_1/dtau = E_3 - E_1 E_2", p, e1_tau_derivative_residual(c, xi, h.max(de))?, TOL_FD),
        Case::new("2 pi i de_2/dtau = 5 e_4 - e_2^2", p, e2_tau_derivative_residual(c, h.max(de))?, TOL_FD),
        Case::new("E_k as polynomials in x, y, g2, g3, k <= 8", p, ek.iter().cloned().fold(0.0, f64::max), 1e-7),
        Case::new("frame invariance under S", p, frame_invariance_residual(&Sl2::S, f, xi, deg)?, TOL_FD),
        Case::new("frame invariance under T", p, frame_invariance_residual(&Sl2::T, f, xi, deg)?, TOL_FD),
        Case::new("weights under u -> 2u", p, gm_rescaling_residual(C64::new(2.0, 0.0), f, xi, deg)?, TOL_EXACT),
        Case::new("d + psi_t in T, S: closed form", p, psi.closed_form, TOL_EXACT),
        Case::new("kappa coefficient of T d/dT, minus 1", p, (psi.kappa_t - 1.0).norm(), TOL_EXACT),
        Case::new("varpi coefficient of T d/dS over g2, minus 1/12", p, (psi.g2_coefficient - 1.0 / 12.0).norm(), TOL_EXACT),
        Case::new("psi_S bracket kernel in g2, g3", p, psi.psi_kernel, TOL_EXACT),
    ])
}

/// Largest imaginary part of the algebraic connection at a real frame and
/// real `xi`, where `(x, y)` are real.
pub fn realness_case(f: &WeierstrassFrame, xi: C64, deg: usize, p: &str) -> kzb_core::Result<Case> {
    let conn = algebraic_connection(f, xi, deg)?;
    Ok(Case::new("imaginary parts at a real frame", p, conn.max_imaginary(), TOL_EXACT))
}

/// `e_8 = (3/7) e_4^2`, the constant fixed by the Weierstrass recursion
/// `c_4 = c_2^2 / 3` for the Laurent coefficients of wp.
const E8_OVER_E4_SQUARED: f64 = 3.0 / 7.0;

fn rationality(s: &Settings, cfg: SpecfunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let n = s.points.unwrap_or(3);
    let deg = s.degree.unwrap_or(6);
    let pts: Vec<_> = (0..n).map(|_| (random_tau(rng), random_u(rng), random_small(rng, 0.1))).collect();
    let real: Vec<_> = (0..n)
        .map(|_| (C64::new(0.0, rng.gen_range(0.9..1.6)), C64::new(rng.gen_range(0.6..1.4), 0.0), C64::new(rng.gen_range(0.1..0.4), 0.0)))
        .collect();
    let mut out = par_cases(&pts, |i, &(tau, u, xi)| {
        let f = WeierstrassFrame::new(tau, u, cfg)?;
        let p = format!("#{i} N={deg} tau={} u={} xi={}", fmt_c(tau), fmt_c(u), fmt_c(xi));
        frame_cases(&f, xi, deg, s.fd_step, &p)
    })?;
    out.extend(par_cases(&real, |i, &(tau, u, xi)| {
        let f = WeierstrassFrame::new(tau, u, cfg)?;
        let p = format!("#{i} N={deg} tau={} u={} xi={}", fmt_c(tau), fmt_c(u), fmt_c(xi));
        Ok(vec![realness_case(&f, xi, deg, &p)?])
    })?);
    for tau in [C64::new(0.0, 1.0), C64::new(0.0, 1.7), C64::new(0.3, 1.1)] {
        let c = EisensteinCache::new(tau, 16, cfg)?;
        let p = format!("tau={}", fmt_c(tau));
        let odd = (1..=8).map(|m| c.e(2 * m - 1).map(|v| v.norm())).collect::<kzb_core::Result<Vec<_>>>()?;
        out.push(Case::new("e_k = 0 for odd k <= 15", &p, odd.iter().cloned().fold(0.0, f64::max), 0.0));
        let r = c.e(8)? / c.e(4)?.powi(2);
        out.push(Case::new("e_8 / e_4^2 = 3/7", &p, (r - E8_OVER_E4_SQUARED).norm(), TOL_EXACT));
    }
    Ok(out)
}
