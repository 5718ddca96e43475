//! Quasi-periodicity, flatness, modular equivariance and twisting of the
//! connection at seeded random points.

use std::sync::Arc;

use kzb_core::kzb::{
    curvature_residual, mc_residual, nu_section, quasi_periodicity_residuals, sl2_residual, AffineSection,
    ConnForm, ConnOperator, FormEval, Kzb, TauSeries,
};
use kzb_core::nca::{is_primitive, TruncatedSeries};
use kzb_core::specfun::{Sl2, SpecfunConfig};
use kzb_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng) -> (C64, C64) {
    let tau = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0));
    let r = rng.gen_range(0.05..0.4);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    (C64::from_polar(r, phi), tau)
}

#[test]
fn quasi_periodicity_at_random_points() {
    let cfg = SpecfunConfig::default();
    let kzb = Kzb::new(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (xi, tau) = random_point(&mut rng);
        let c = kzb.cache(tau, cfg).unwrap();
        let q = quasi_periodicity_residuals(&kzb, &c, xi).unwrap();
        assert!(q.xi_shift_one < 1e-9 && q.xi_shift_tau < 1e-9, "{q:?}");
        assert!(q.tau_row < 1e-8, "{q:?}");
    }
}

#[test]
fn flatness_at_random_points() {
    let cfg = SpecfunConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [4, 6] {
        let form = ConnForm::new(Kzb::new(n).unwrap(), cfg);
        for _ in 0..4 {
            let (xi, tau) = random_point(&mut rng);
            let r = curvature_residual(&form, xi, tau, 1e-4).unwrap();
            assert!(r < 1e-6, "N={n}: {r}");
        }
    }
    let form = ConnForm::new(Kzb::new(8).unwrap(), cfg);
    let r = curvature_residual(&form, C64::new(0.23, 0.11), C64::new(0.0, 1.2), 1e-4).unwrap();
    assert!(r < 1e-6, "N=8: {r}");
}

#[test]
fn curvature_scales_quadratically() {
    let form = ConnForm::new(Kzb::new(6).unwrap(), SpecfunConfig::default());
    let (xi, tau) = (C64::new(0.23, 0.11), C64::new(0.0, 1.2));
    let r1 = curvature_residual(&form, xi, tau, 1e-2).unwrap();
    let r2 = curvature_residual(&form, xi, tau, 5e-3).unwrap();
    assert!((r1 / r2 - 4.0).abs() < 0.3, "{}", r1 / r2);
}

#[test]
fn flipped_psi_t_is_not_flat() {
    let form = ConnForm::new(Kzb::new(6).unwrap().with_flipped_psi_t(), SpecfunConfig::default());
    let r = curvature_residual(&form, C64::new(0.23, 0.11), C64::new(0.0, 1.2), 1e-4).unwrap();
    assert!(r > 1e-2, "{r}");
}

#[test]
fn modular_equivariance() {
    let cfg = SpecfunConfig::default();
    let kzb = Kzb::new(6).unwrap();
    let (xi, tau) = (C64::new(0.2, 0.05), C64::new(0.0, 1.5));
    assert_eq!(sl2_residual(&kzb, cfg, xi, tau, &Sl2::IDENTITY).unwrap(), 0.0);
    assert!(sl2_residual(&kzb, cfg, xi, tau, &Sl2::T).unwrap() < 1e-9);
    assert!(sl2_residual(&kzb, cfg, xi, tau, &Sl2::S).unwrap() < 1e-6);
    for w in ["STs", "TTS"] {
        let g = Sl2::from_word(w).unwrap();
        assert!(sl2_residual(&kzb, cfg, xi, C64::new(0.1, 1.3), &g).unwrap() < 1e-6, "{w}");
    }
    // the residual detects a wrong transformation rule
    let wrong = kzb.clone().with_flipped_psi_t();
    assert!(sl2_residual(&wrong, cfg, xi, tau, &Sl2::S).unwrap() > 1e-3);
}

fn nu_half(kzb: Kzb, cfg: SpecfunConfig) -> TauSeries {
    Arc::new(move |tau: C64| {
        let c = kzb.cache(tau, cfg)?;
        Ok(nu_section(&kzb, &AffineSection::constant(C64::new(0.5, 0.0)), &c)?.left)
    })
}

#[test]
fn maurer_cartan_and_twists() {
    let cfg = SpecfunConfig::default();
    let kzb = Kzb::new(6).unwrap();
    let samples = [C64::new(0.0, 1.1), C64::new(0.3, 0.9), C64::new(-0.2, 1.6)];
    let zero = |_: C64| Ok(ConnOperator::zero(6));
    assert_eq!(mc_residual(&zero, &samples, 1e-4).unwrap(), 0.0);

    let nu = nu_half(kzb.clone(), cfg);
    let nu_op = {
        let nu = nu.clone();
        move |tau: C64| Ok(ConnOperator::from_left(nu(tau)?))
    };
    assert!(mc_residual(&nu_op, &samples, 1e-4).unwrap() < 1e-6);

    // a non-holomorphic form: the residual is O(1) and stable under refinement
    let bad = |tau: C64| Ok(ConnOperator::from_left(TruncatedSeries::a(6).scale(tau.conj())));
    let r1 = mc_residual(&bad, &samples, 1e-3).unwrap();
    let r2 = mc_residual(&bad, &samples, 1e-4).unwrap();
    assert!(r1 > 0.5 && (r1 - r2).abs() < 1e-8);

    let form = ConnForm::new(kzb.clone(), cfg);
    let twisted = form.twist(nu.clone());
    let (xi, tau) = (C64::new(0.23, 0.11), C64::new(0.0, 1.2));
    assert!(curvature_residual(&twisted, xi, tau, 1e-4).unwrap() < 1e-6);
    let neg: TauSeries = {
        let nu = nu.clone();
        Arc::new(move |t: C64| Ok(-nu(t)?))
    };
    let back = twisted.twist(neg);
    let (a, b) = (form.eval(xi, tau).unwrap(), back.eval(xi, tau).unwrap());
    assert!(a.tau.action_residual(&b.tau).unwrap() < 1e-12);
    assert!(a.xi.action_residual(&b.xi).unwrap() < 1e-12);
    // the twist really changes the tau coefficient
    assert!(twisted.eval(xi, tau).unwrap().tau.action_residual(&a.tau).unwrap() > 1e-3);
}

#[test]
fn connection_coefficients_are_lie_elements() {
    let cfg = SpecfunConfig::default();
    let kzb = Kzb::new(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..3 {
        let (xi, tau) = random_point(&mut rng);
        let om = kzb.omega(&kzb.cache(tau, cfg).unwrap(), xi).unwrap();
        for s in [&om.xi.left, &om.tau.left, &om.tau.der.image_t, &om.tau.der.image_a] {
            assert!(is_primitive(s, 1e-10));
        }
    }
}

#[test]
fn affine_section_pullback_matches_path_derivative() {
    // nu_sigma for sigma(tau) = tau/3 equals nu_tau + (1/3) nu_xi; compare the
    // xi-part against a difference quotient along the path tau -> sigma(tau)
    let cfg = SpecfunConfig::default();
    let kzb = Kzb::new(5).unwrap();
    let tau = C64::new(0.1, 1.2);
    let sec = AffineSection { a: C64::new(1.0 / 3.0, 0.0), b: C64::new(0.0, 0.0) };
    let c = kzb.cache(tau, cfg).unwrap();
    let nu = nu_section(&kzb, &sec, &c).unwrap();
    let direct = kzb.nu_tau(&c, tau / 3.0).unwrap().checked_add(&kzb.nu_xi(&c, tau / 3.0).unwrap().scale(C64::new(1.0 / 3.0, 0.0))).unwrap();
    assert!(nu.action_residual(&direct).unwrap() < 1e-12);
}
