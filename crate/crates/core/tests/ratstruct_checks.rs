//! Weierstrass frames, the gauged connection and its algebraic form.

use std::f64::consts::PI;

use kzb_core::kzb::Kzb;
use kzb_core::ratstruct::{
    algebraic_connection, e1_tau_derivative_residual, e2_tau_derivative_residual, ek_polynomial_oracle,
    ek_polynomial_residual, form_identities_residual, frame_invariance_residual, gauge_transform,
    gauged_fiber_closed_form, gm_rescaling_residual, psi_algebraic_check, scaled_eisenstein, WeierstrassFrame,
};
use kzb_core::specfun::{EisensteinCache, Sl2, SpecfunConfig};
use kzb_core::{Error, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn frame(tau: C64, u: C64) -> WeierstrassFrame {
    WeierstrassFrame::new(tau, u, SpecfunConfig::default()).unwrap()
}

/// wp from row sums of pi^2 / sin^2.
fn wp_rows(xi: C64, tau: C64) -> C64 {
    let s2 = |x: C64| PI * PI / ((PI * x).sin() * (PI * x).sin());
    let mut s = s2(xi) - PI * PI / 3.0;
    for n in 1..80 {
        let nt = tau * n as f64;
        s += s2(xi + nt) + s2(xi - nt) - 2.0 * s2(nt);
    }
    s
}

/// wp' from row sums of -2 pi^3 cos / sin^3.
fn wp_prime_rows(xi: C64, tau: C64) -> C64 {
    let d = |x: C64| -2.0 * PI.powi(3) * (PI * x).cos() / (PI * x).sin().powi(3);
    let mut s = d(xi);
    for n in 1..30 {
        let nt = tau * n as f64;
        s += d(xi + nt) + d(xi - nt);
    }
    s
}

fn random_xi(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.1..0.4), rng.gen_range(0.0..std::f64::consts::TAU))
}

#[test]
fn frame_point_matches_row_sums_and_lies_on_the_cubic() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (tau, u) in [(c(0.0, 1.0), c(1.0, 0.0)), (c(0.2, 1.3), c(0.7, 0.4)), (c(-0.4, 0.9), c(1.5, -0.2))] {
        let f = frame(tau, u);
        let xi = random_xi(&mut rng);
        let (x, y) = f.point(xi).unwrap();
        assert!((x * u * u - wp_rows(xi, tau)).norm() < 1e-9 * x.norm().max(1.0));
        let yr = wp_prime_rows(xi, tau);
        assert!((y * u.powi(3) - yr).norm() < 1e-8 * yr.norm().max(1.0), "{} {}", y * u.powi(3), yr);
        assert!(f.cubic_residual(xi).unwrap() < 1e-8);
        // dy/dxi = u (6x^2 - g2/2)
        let h = 1e-4;
        let yp = (f.point(xi + h).unwrap().1 - f.point(xi - h).unwrap().1) / (2.0 * h);
        let rhs = u * (6.0 * x * x - f.g2 / 2.0);
        assert!((yp - rhs).norm() < 1e-6 * rhs.norm().max(1.0));
    }
}

#[test]
fn invariants_from_theta_constants() {
    // g2 = (2/3) pi^4 (a^8 + b^8 + c^8) / u^4 with the Jacobi theta constants
    let tau = c(0.1, 1.1);
    let q = (c(0.0, PI) * tau).exp();
    let (mut t2, mut t3, mut t4) = (c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
    for n in 0..40 {
        let nf = n as f64 + 0.5;
        t2 += 2.0 * q.powf(nf * nf);
    }
    for n in 1..40 {
        let m = (n * n) as f64;
        t3 += 2.0 * q.powf(m);
        t4 += 2.0 * if n % 2 == 0 { 1.0 } else { -1.0 } * q.powf(m);
    }
    let u = c(0.8, 0.3);
    let f = frame(tau, u);
    let g2 = 2.0 / 3.0 * PI.powi(4) * (t2.powi(8) + t3.powi(8) + t4.powi(8)) / u.powi(4);
    assert!((f.g2 - g2).norm() < 1e-9 * g2.norm());
    // Delta = (2 pi)^12 eta^24 / u^12 with eta^3 = theta_2 theta_3 theta_4 / 2
    let eta3 = t2 * t3 * t4 / 2.0;
    let delta = (2.0 * PI).powi(12) * eta3.powi(8) / u.powi(12);
    assert!((f.delta - delta).norm() < 1e-8 * delta.norm());
}

#[test]
fn eisenstein_polynomials_in_the_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (tau, u) in [(c(0.0, 1.2), c(1.0, 0.0)), (c(0.3, 1.1), c(0.6, -0.5))] {
        let f = frame(tau, u);
        for _ in 0..3 {
            let xi = random_xi(&mut rng);
            let (x, y) = f.point(xi).unwrap();
            let e3 = ek_polynomial_oracle(3, &f, xi).unwrap();
            assert!((e3 + y / 2.0).norm() < 1e-8 * y.norm().max(1.0));
            let e4 = ek_polynomial_oracle(4, &f, xi).unwrap();
            assert!((e4 - (x * x - f.g2 / 10.0)).norm() < 1e-12 * e4.norm().max(1.0));
            for k in 2..=8 {
                let r = ek_polynomial_residual(k, &f, xi).unwrap();
                assert!(r < 1e-7, "k = {k}: {r}");
            }
        }
        // u^-k e_k from the invariants against the series
        for k in 4..=12 {
            let direct = f.cache().e(k).unwrap() / u.powi(k as i32);
            let poly = scaled_eisenstein(k, f.g2, f.g3).unwrap();
            assert!((direct - poly).norm() < 1e-10 * direct.norm().max(1e-3), "k = {k}");
        }
        for k in [3, 5, 7, 9] {
            assert_eq!(scaled_eisenstein(k, f.g2, f.g3).unwrap(), c(0.0, 0.0));
            assert_eq!(f.cache().e(k).unwrap(), c(0.0, 0.0));
        }
    }
    assert!(matches!(ek_polynomial_oracle(9, &frame(c(0.0, 1.0), c(1.0, 0.0)), c(0.2, 0.1)), Err(Error::UnsupportedIndex(9))));
}

#[test]
fn gauged_fiber_matches_closed_form() {
    let cfg = SpecfunConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for n in [4, 6, 8] {
        let kzb = Kzb::new(n).unwrap();
        for _ in 0..4 {
            let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0));
            let xi = random_xi(&mut rng);
            let cc = kzb.cache(tau, cfg).unwrap();
            let gauged = gauge_transform(&kzb, &cc, xi).unwrap();
            let closed = gauged_fiber_closed_form(&cc, xi, n).unwrap();
            assert!(gauged.xi.left.sup_diff(&closed) < 1e-8, "N = {n}");
            assert!(gauged.xi.right.is_zero());
        }
    }
}

#[test]
fn gauge_round_trip() {
    let cfg = SpecfunConfig::default();
    let kzb = Kzb::new(6).unwrap();
    let cc = kzb.cache(c(0.2, 1.1), cfg).unwrap();
    let xi = c(0.23, -0.11);
    let om = kzb.omega(&cc, xi).unwrap();
    let t = kzb_core::nca::TruncatedSeries::t(6);
    let e1 = cc.e1(xi).unwrap();
    let g = t.scale(-e1).exp_trunc().unwrap();
    let g_inv = t.scale(e1).exp_trunc().unwrap();
    let back = om.xi.conjugate_by_left(&g, &g_inv).unwrap().conjugate_by_left(&g_inv, &g).unwrap();
    assert!(back.checked_sub(&om.xi).unwrap().sup_norm() < 1e-12);
}

#[test]
fn tau_derivatives_by_differences() {
    let cc = EisensteinCache::new(c(0.15, 1.05), 8, SpecfunConfig::default()).unwrap();
    for xi in [c(0.2, 0.1), c(-0.31, 0.27)] {
        assert!(e1_tau_derivative_residual(&cc, xi, 1e-4).unwrap() < 1e-6);
    }
    assert!(e2_tau_derivative_residual(&cc, 1e-4).unwrap() < 1e-6);
}

#[test]
fn algebraic_fiber_coefficients() {
    let f = frame(c(0.1, 1.2), c(0.9, 0.3));
    let xi = c(0.27, 0.08);
    let (x, _) = f.point(xi).unwrap();
    let k = algebraic_connection(&f, xi, 6).unwrap().fiber_k();
    assert!((k.coeff_str("t").unwrap() - x).norm() < 1e-8);
    assert!((k.coeff_str("A").unwrap() - 1.0).norm() < 1e-8);
    // the k = 2 term -(x/2) ad_T^2 S
    assert!((k.coeff_str("ttA").unwrap() + x / 2.0).norm() < 1e-8);
    assert!((k.coeff_str("tAt").unwrap() - x).norm() < 1e-8);
}

#[test]
fn frame_invariance_under_generators_and_words() {
    let f = frame(c(0.0, 1.4), c(1.0, 0.0));
    let xi = c(0.21, 0.13);
    for w in ["", "S", "T", "ST", "TST"] {
        let g = Sl2::from_word(w).unwrap();
        let r = frame_invariance_residual(&g, &f, xi, 6).unwrap();
        assert!(r < 1e-6, "{w}: {r}");
    }
    assert_eq!(frame_invariance_residual(&Sl2::from_word("").unwrap(), &f, xi, 6).unwrap(), 0.0);
    let f = frame(c(0.3, 1.1), c(0.7, -0.4));
    for w in ["S", "T", "TS"] {
        let r = frame_invariance_residual(&Sl2::from_word(w).unwrap(), &f, c(-0.17, 0.22), 6).unwrap();
        assert!(r < 1e-6, "{w}: {r}");
    }
}

#[test]
fn gm_rescaling_weights() {
    let f = frame(c(0.1, 1.2), c(1.0, 0.0));
    for lambda in [c(2.0, 0.0), c(0.6, 0.8)] {
        let r = gm_rescaling_residual(lambda, &f, c(0.19, -0.07), 6).unwrap();
        assert!(r < 1e-8, "{lambda}: {r}");
    }
}

#[test]
fn form_identities_with_difference_scaling() {
    let f = frame(c(0.0, 1.2), c(1.0, 0.0));
    let xi = c(0.23, 0.14);
    let r = form_identities_residual(&f, xi, 1e-4).unwrap();
    assert!(r.delta < 1e-6 && r.g2 < 1e-6 && r.x < 1e-5, "{r:?}");
    let g = frame(c(0.25, 0.95), c(0.8, 0.5));
    assert!(form_identities_residual(&g, c(-0.3, 0.1), 1e-4).unwrap().max() < 1e-5);
    // the residual is pure truncation error: halving h divides it by about 4
    let a = form_identities_residual(&f, xi, 2e-2).unwrap();
    let b = form_identities_residual(&f, xi, 1e-2).unwrap();
    for (ra, rb) in [(a.delta, b.delta), (a.g2, b.g2), (a.x, b.x)] {
        let ratio = ra / rb;
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }
}

#[test]
fn psi_terms_in_algebraic_letters() {
    for (tau, u) in [(c(0.0, 1.2), c(1.0, 0.0)), (c(0.2, 1.05), c(0.7, 0.6))] {
        let f = frame(tau, u);
        let p = psi_algebraic_check(&f, 6, 1e-3).unwrap();
        assert!(p.closed_form < 1e-8, "{p:?}");
        assert!((p.kappa_t - 1.0).norm() < 1e-8, "{p:?}");
        assert!((p.g2_coefficient - 1.0 / 12.0).norm() < 1e-8, "{p:?}");
        assert!(p.psi_kernel < 1e-8, "{p:?}");
    }
}

#[test]
fn coefficients_real_on_real_frames() {
    // square and rectangular lattices with real periods and real xi give real (x, y)
    for tau in [c(0.0, 1.0), c(0.0, 1.3)] {
        let f = frame(tau, c(1.1, 0.0));
        assert!(f.g2.im.abs() < 1e-12 * f.g2.norm() && f.g3.im.abs() < 1e-12 * f.g3.norm().max(1.0));
        for xi in [c(0.17, 0.0), c(0.33, 0.0)] {
            let (x, y) = f.point(xi).unwrap();
            assert!(x.im.abs() < 1e-12 * x.norm() && y.im.abs() < 1e-12 * y.norm());
            let conn = algebraic_connection(&f, xi, 6).unwrap();
            assert!(conn.max_imaginary() < 1e-8, "{}", conn.max_imaginary());
        }
    }
}

#[test]
fn singular_and_bad_frames() {
    let cfg = SpecfunConfig::default();
    assert!(WeierstrassFrame::new(c(0.0, 1.0), c(0.0, 0.0), cfg).is_err());
    // far up the cusp Delta is below the relative floor
    assert!(matches!(WeierstrassFrame::new(c(0.0, 6.0), c(1.0, 0.0), cfg), Err(Error::SingularFrame(_))));
    let f = WeierstrassFrame::from_json(r#"{"tau":[0.1,1.2],"u":[1.0,0.0]}"#, cfg).unwrap();
    assert_eq!(f.tau, c(0.1, 1.2));
    assert!(WeierstrassFrame::from_json(r#"{"tau":[0.1,1.2]}"#, cfg).is_err());
}
