//! Special functions against independent formulas: the theta series, row
//! sums of cotangents, brute-force lattice sums, finite differences and
//! extrapolated limits.

use std::f64::consts::PI;

use kzb_core::specfun::{
    e1_shift_residuals, fay_residual, heat_residual, kronecker_shift_residuals, modularity_residual,
    EisensteinCache, Sl2, SpecfunConfig,
};
use kzb_core::{C64, TWO_PI_I};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn cache(tau: C64, k: usize) -> EisensteinCache {
    EisensteinCache::new(tau, k, SpecfunConfig::default()).unwrap()
}

/// theta_1(xi) = 2 sum_{n>=0} (-1)^n exp(pi i tau (n+1/2)^2) sin((2n+1) pi xi)
fn theta_series(xi: C64, tau: C64) -> C64 {
    let mut s = c(0.0, 0.0);
    for n in 0..60 {
        let nf = n as f64 + 0.5;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * (c(0.0, PI) * tau * nf * nf).exp() * (PI * (2.0 * n as f64 + 1.0) * xi).sin();
    }
    2.0 * s
}

/// Eisenstein-ordered row sums: sum_n pi cot(pi (xi + n tau)).
fn e1_rows(xi: C64, tau: C64) -> C64 {
    let mut s = PI / (PI * xi).tan();
    for n in 1..80 {
        let a = PI / (PI * (xi + tau * n as f64)).tan();
        let b = PI / (PI * (xi - tau * n as f64)).tan();
        s += a + b;
    }
    s
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

/// e_2 in Eisenstein order: pi^2/3 + sum_{n != 0} pi^2 / sin^2(pi n tau).
fn e2_rows(tau: C64) -> C64 {
    let mut s = c(PI * PI / 3.0, 0.0);
    for n in 1..80 {
        let x = PI * tau * n as f64;
        s += 2.0 * PI * PI / (x.sin() * x.sin());
    }
    s
}

/// Square lattice sum sum' (n tau + m)^{-k} over max(|n|,|m|) <= m_max.
fn lattice_sum(tau: C64, k: i32, m_max: i64) -> C64 {
    let mut s = c(0.0, 0.0);
    for n in -m_max..=m_max {
        for m in -m_max..=m_max {
            if n == 0 && m == 0 {
                continue;
            }
            s += (tau * n as f64 + m as f64).powi(-k);
        }
    }
    s
}

/// Richardson extrapolation of f(h) = L + a h^2 + b h^4 + ... to h -> 0.
fn richardson_even(f: impl Fn(f64) -> C64, h: f64) -> C64 {
    let a0 = f(h);
    let a1 = f(h / 2.0);
    let a2 = f(h / 4.0);
    let b0 = (4.0 * a1 - a0) / 3.0;
    let b1 = (4.0 * a2 - a1) / 3.0;
    (16.0 * b1 - b0) / 15.0
}

#[test]
fn theta_matches_series_form() {
    for (xi, tau) in [(c(0.31, 0.07), c(0.0, 1.0)), (c(-0.4, 0.3), c(0.3, 0.9)), (c(1.7, -0.6), c(-0.2, 1.4))] {
        let cc = cache(tau, 4);
        let a = cc.theta(xi).unwrap();
        let b = theta_series(xi, tau);
        assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()), "{a} vs {b}");
    }
}

#[test]
fn theta_symmetries() {
    let cc = cache(c(0.0, 1.0), 4);
    assert_eq!(cc.theta(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    let xi = c(0.31, 0.07);
    assert!((cc.theta(-xi).unwrap() + cc.theta(xi).unwrap()).norm() < 1e-12);
    let cc = cache(c(0.0, 1.3), 4);
    let x = c(0.2, 0.0);
    assert!((cc.theta(x + 1.0).unwrap() + cc.theta(x).unwrap()).norm() < 1e-12);
    // theta(xi + tau) = -q^{-1/2} z^{-1} theta(xi)
    let tau = cc.tau;
    let lhs = cc.theta(x + tau).unwrap();
    let rhs = -(-TWO_PI_I * tau / 2.0).exp() * (-TWO_PI_I * x).exp() * cc.theta(x).unwrap();
    assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
}

#[test]
fn theta_prime_at_zero() {
    let tau = c(0.1, 0.9);
    let cc = cache(tau, 4);
    let h = 1e-3;
    let fd = (theta_series(c(h, 0.0), tau) - theta_series(c(-h, 0.0), tau)) / (2.0 * h);
    let fd2 = (theta_series(c(h / 2.0, 0.0), tau) - theta_series(c(-h / 2.0, 0.0), tau)) / h;
    let extrap = (4.0 * fd2 - fd) / 3.0;
    assert!((cc.theta_prime0() - extrap).norm() < 1e-9);
}

#[test]
fn theta_zeros_only_on_lattice() {
    let tau = c(0.2, 1.1);
    let cc = cache(tau, 4);
    // grid over the fundamental parallelogram, shifted off the lattice points
    let mut min_off = f64::INFINITY;
    for a in 0..50 {
        for b in 0..50 {
            let s = (a as f64 + 0.5) / 50.0;
            let t = (b as f64 + 0.5) / 50.0;
            let xi = tau * t + s;
            min_off = min_off.min(cc.theta(xi).unwrap().norm() / kzb_core::specfun::lattice_distance(xi, tau));
        }
    }
    // |theta| is bounded below by a multiple of the lattice distance
    assert!(min_off > 1e-2, "{min_off}");
    for (n, m) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        assert!(cc.theta(tau * n + m).unwrap().norm() < 1e-13);
    }
}

#[test]
fn e1_matches_row_sums_and_shifts() {
    for (xi, tau) in [(c(0.23, 0.11), c(0.0, 1.1)), (c(-0.31, -0.2), c(0.4, 0.95))] {
        let cc = cache(tau, 4);
        let a = cc.e1(xi).unwrap();
        let b = e1_rows(xi, tau);
        assert!((a - b).norm() < 1e-11, "{a} vs {b}");
        let (r1, r2) = e1_shift_residuals(&cc, xi).unwrap();
        assert!(r1 < 1e-10 && r2 < 1e-10, "{r1} {r2}");
    }
}

#[test]
fn e1_residue_is_one() {
    let cc = cache(c(0.1, 1.2), 4);
    let dir = c(1.0, 1.0);
    let lim = richardson_even(|h| dir * h * cc.e1(dir * h).unwrap(), 1e-2);
    assert!((lim - 1.0).norm() < 1e-10, "{lim}");
}

#[test]
fn e2_against_rows_and_laurent_coefficient() {
    for tau in [c(0.0, 1.0), c(0.3, 1.1), c(-0.45, 0.7)] {
        let cc = cache(tau, 6);
        let e2 = cc.e(2).unwrap();
        assert!((e2 - e2_rows(tau)).norm() < 1e-11, "{e2}");
        // E_1(xi) = 1/xi - e_2 xi - e_4 xi^3 - ...
        let dir = c(0.6, 0.8);
        let lim = richardson_even(|h| -(cc.e1(dir * h).unwrap() - 1.0 / (dir * h)) / (dir * h), 2e-2);
        assert!((lim - e2).norm() < 1e-8, "{lim} vs {e2}");
    }
}

#[test]
fn odd_series_vanish_and_special_points() {
    let cc = cache(c(0.0, 1.0), 8);
    for k in [1, 3, 5, 7] {
        assert_eq!(cc.e(k).unwrap(), c(0.0, 0.0));
    }
    assert!(cc.e(6).unwrap().norm() < 1e-10);
    let rho = (TWO_PI_I / 3.0).exp();
    let cr = cache(rho, 4);
    assert!(cr.e(4).unwrap().norm() < 1e-8);
}

#[test]
fn e4_e6_against_lattice_sums() {
    let tau = c(0.3, 1.1);
    let cc = cache(tau, 8);
    // square truncation error behaves like a/M^2 + b/M^4; extrapolate in M
    for k in [4, 6] {
        let s1 = lattice_sum(tau, k, 150);
        let s2 = lattice_sum(tau, k, 300);
        let lim = (4.0 * s2 - s1) / 3.0;
        let e = cc.e(k as usize).unwrap();
        assert!((lim - e).norm() < 1e-7 * e.norm(), "k={k}: {lim} vs {e}");
    }
}

#[test]
fn e8_over_e4_squared_is_three_sevenths() {
    // Determine the constant from brute-force lattice sums first.
    let tau = c(0.0, 1.7);
    let s1 = lattice_sum(tau, 4, 150);
    let s2 = lattice_sum(tau, 4, 300);
    let e4 = (4.0 * s2 - s1) / 3.0;
    let e8 = lattice_sum(tau, 8, 300);
    let ratio = e8 / (e4 * e4);
    assert!(ratio.im.abs() < 1e-8);
    let mut found = None;
    'outer: for den in 1..=100i64 {
        for num in 1..=den {
            if (ratio.re - num as f64 / den as f64).abs() < 1e-7 {
                found = Some((num, den));
                break 'outer;
            }
        }
    }
    let (num, den) = found.expect("no small rational found");
    assert_eq!((num, den), (3, 7));
    // the q-series values agree with the constant at several points
    for tau in [c(0.0, 1.0), c(0.0, 1.7), c(0.3, 1.1)] {
        let cc = cache(tau, 8);
        let r = cc.e(8).unwrap() / cc.e(4).unwrap().powi(2);
        assert!((r - num as f64 / den as f64).norm() < 1e-8, "{r}");
    }
}

#[test]
fn cache_is_stable_under_more_terms() {
    for tau in [c(0.0, 1.0), c(0.4, 0.3), c(0.0, 0.06)] {
        let cc = cache(tau, 12);
        for k in (2..=12).step_by(2) {
            let a = cc.e(k).unwrap();
            let b = cc.e_with_cutoff(k, cc.q_cutoff + 8);
            assert!((a - b).norm() <= cc.precision_target * a.norm().max(1.0), "k={k} tau={tau}");
        }
    }
}

#[test]
fn wp_against_row_sums() {
    for (xi, tau) in [(c(0.2, 0.1), c(0.0, 1.2)), (c(0.41, -0.33), c(0.35, 0.85))] {
        let cc = cache(tau, 4);
        let a = cc.wp(xi).unwrap();
        let b = wp_rows(xi, tau);
        assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "{a} vs {b}");
        // wp' = -2 E_3 against differences of the row-sum oracle
        let h = 1e-3;
        let d = (-wp_rows(xi + 2.0 * h, tau) + 8.0 * wp_rows(xi + h, tau) - 8.0 * wp_rows(xi - h, tau)
            + wp_rows(xi - 2.0 * h, tau))
            / (12.0 * h);
        assert!((cc.wp_prime(xi).unwrap() - d).norm() < 1e-7 * d.norm().max(1.0));
    }
}

#[test]
fn big_e_recursion_and_parity() {
    let tau = c(0.15, 1.05);
    let cc = cache(tau, 8);
    let xi = c(0.27, 0.12);
    let h = 1e-4;
    let at = |x: C64| cc.big_e_all(x, 8).unwrap();
    let (p2, p1, m1, m2) = (at(xi + 2.0 * h), at(xi + h), at(xi - h), at(xi - 2.0 * h));
    let e = at(xi);
    for k in 1..=7 {
        let d = (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h);
        let r = e[k + 1] + d / k as f64;
        assert!(r.norm() < 1e-8 * e[k + 1].norm().max(1.0), "k={k}: {r}");
    }
    let em = at(-xi);
    for k in 1..=8 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert!((em[k] - sign * e[k]).norm() < 1e-9 * e[k].norm().max(1.0));
    }
}

#[test]
fn big_e_against_lattice_sums() {
    // E_k for k >= 3 is an absolutely convergent lattice sum
    let tau = c(0.1, 1.3);
    let xi = c(0.21, 0.17);
    let cc = cache(tau, 6);
    let e = cc.big_e_all(xi, 5).unwrap();
    for k in [3, 4, 5] {
        let sum = |m_max: i64| {
            let mut s = c(0.0, 0.0);
            for n in -m_max..=m_max {
                for m in -m_max..=m_max {
                    s += (xi + tau * n as f64 + m as f64).powi(-k);
                }
            }
            s
        };
        let (s1, s2) = (sum(200), sum(400));
        let lim = if k == 3 { s2 } else { (4.0 * s2 - s1) / 3.0 };
        assert!((lim - e[k as usize]).norm() < 1e-6 * e[k as usize].norm().max(1.0), "k={k}");
    }
}

#[test]
fn kronecker_matches_double_series() {
    // valid for 0 < Im xi, Im alpha < Im tau
    let tau = c(0.1, 1.2);
    let cc = cache(tau, 4);
    let (xi, al) = (c(0.23, 0.31), c(-0.17, 0.27));
    let q = (TWO_PI_I * tau).exp();
    let z = (TWO_PI_I * xi).exp();
    let w = (TWO_PI_I * al).exp();
    let mut s = c(0.0, 0.0);
    for m in 1..200 {
        for n in 1..200 {
            let qmn = q.powi(m * n);
            if qmn.norm() < 1e-30 {
                break;
            }
            s += (z.powi(m) * w.powi(n) - z.powi(-m) * w.powi(-n)) * qmn;
        }
    }
    let series = TWO_PI_I * (1.0 - 1.0 / (1.0 - z) - 1.0 / (1.0 - w) - s);
    let f = cc.kronecker_f(xi, al).unwrap();
    assert!((f - series).norm() < 1e-11, "{f} vs {series}");
}

#[test]
fn kronecker_basic_identities() {
    let tau = c(0.0, 1.2);
    let cc = cache(tau, 4);
    let (xi, al) = (c(0.2, 0.1), c(0.15, 0.0));
    let (r1, r2) = kronecker_shift_residuals(&cc, xi, al).unwrap();
    assert!(r1 < 1e-10 && r2 < 1e-10);
    assert!((cc.kronecker_f(xi, al).unwrap() - cc.kronecker_f(al, xi).unwrap()).norm() < 1e-12);

    // residue in xi is 1
    let dir = c(0.8, 0.6);
    let lim = richardson_even(|h| {
        let x = dir * h;
        // x F(x, al) = 1 + x E_1(al) + ..., so average +x and -x
        (x * cc.kronecker_f(x, al).unwrap() + (-x) * cc.kronecker_f(-x, al).unwrap()) / 2.0
    }, 1e-2);
    assert!((lim - 1.0).norm() < 1e-9, "{lim}");

    // d/dalpha against Richardson-extrapolated central differences
    let fd = |h: f64| (cc.kronecker_f(xi, al + h).unwrap() - cc.kronecker_f(xi, al - h).unwrap()) / (2.0 * h);
    let d = (4.0 * fd(5e-6) - fd(1e-5)) / 3.0;
    assert!((cc.kronecker_f2prime(xi, al).unwrap() - d).norm() < 1e-7);
    // symmetry: dF/dxi(xi, al) = dF/dalpha(al, xi)
    let a = cc.kronecker_f1prime(xi, al).unwrap();
    let b = cc.kronecker_f2prime(al, xi).unwrap();
    assert!((a - b).norm() < 1e-9);

    // alpha^2 F2' -> -1
    let lim = richardson_even(|h| {
        let a = dir * h;
        (a * a * cc.kronecker_f2prime(xi, a).unwrap() + a * a * cc.kronecker_f2prime(xi, -a).unwrap()) / 2.0
    }, 1e-2);
    assert!((lim + 1.0).norm() < 1e-8, "{lim}");
}

#[test]
fn heat_equation() {
    let cc = cache(c(0.0, 1.1), 4);
    let (xi, al) = (c(0.23, 0.0), c(0.31, 0.0));
    let r = heat_residual(&cc, xi, al, 1e-4).unwrap();
    assert!(r < 1e-6, "{r}");
    let r1 = heat_residual(&cc, xi, al, 2e-2).unwrap();
    let r2 = heat_residual(&cc, xi, al, 1e-2).unwrap();
    let ratio = r1 / r2;
    assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
    let cc = cache(c(0.3, 0.9), 4);
    assert!(heat_residual(&cc, c(-0.12, 0.2), c(0.3, -0.15), 1e-4).unwrap() < 1e-6);
}

#[test]
fn fay_identity() {
    let cc = cache(c(0.0, 1.3), 4);
    let xi = c(0.21, 0.05);
    assert!(fay_residual(&cc, xi, c(0.13, 0.1), c(-0.3, 0.2)).unwrap() < 1e-8);
    assert!(fay_residual(&cc, xi, c(0.17, -0.1), c(0.17, -0.1)).unwrap() < 1e-12);
    let cc = cache(c(0.2, 0.95), 4);
    assert!(fay_residual(&cc, c(-0.3, 0.11), c(0.25, 0.3), c(0.1, -0.05)).unwrap() < 1e-8);
}

#[test]
fn modularity_of_kronecker() {
    let tau = c(0.0, 1.5);
    let cc = cache(tau, 4);
    let (xi, al) = (c(0.2, 0.0), c(0.3, 0.0));
    assert_eq!(modularity_residual(&cc, &cc, xi, al, &Sl2::IDENTITY).unwrap(), 0.0);
    let cs = cache(Sl2::S.act(tau), 4);
    assert!(modularity_residual(&cc, &cs, xi, al, &Sl2::S).unwrap() < 1e-8);
    let ct = cache(Sl2::T.act(tau), 4);
    assert!(modularity_residual(&cc, &ct, xi, al, &Sl2::T).unwrap() < 1e-10);
    assert!(modularity_residual(&cc, &ct, xi, al, &Sl2 { a: 1, b: 1, c: 1, d: 1 }).is_err());
}

#[test]
fn g_coefficients_reproduce_kronecker() {
    let tau = c(0.1, 1.1);
    let cc = cache(tau, 12);
    let xi = c(0.3, 0.15);
    let g = cc.g_coefficients(xi, 12).unwrap();
    assert_eq!(g[0], c(1.0, 0.0));
    assert!((g[1] - cc.e1(xi).unwrap()).norm() < 1e-14);
    // g_1 also equals lim (F - 1/alpha)
    let lim = {
        let f = |h: f64| cc.kronecker_f(xi, c(h, 0.0)).unwrap() - 1.0 / h;
        let fd = |h: f64| (f(h) + f(-h)) / 2.0;
        (4.0 * fd(5e-4) - fd(1e-3)) / 3.0
    };
    assert!((lim - g[1]).norm() < 1e-7, "{lim}");
    for k in 0..16 {
        let al = c(0.1, 0.0) * (TWO_PI_I * k as f64 / 16.0).exp() * if k % 2 == 0 { 1.0 } else { 0.5 };
        let mut s = c(0.0, 0.0);
        for (j, gj) in g.iter().enumerate() {
            s += gj * al.powi(j as i32);
        }
        let direct = al * cc.kronecker_f(xi, al).unwrap();
        assert!((s - direct).norm() < 1e-8, "{al}: {}", (s - direct).norm());
    }
    let al = c(0.05, 0.0);
    let s: C64 = g.iter().enumerate().map(|(j, gj)| gj * al.powi(j as i32)).sum();
    assert!((s - al * cc.kronecker_f(xi, al).unwrap()).norm() < 1e-9);
}

#[test]
fn guards() {
    let cfg = SpecfunConfig::default();
    assert!(EisensteinCache::new(c(0.0, -1.0), 4, cfg).is_err());
    assert!(EisensteinCache::new(c(0.0, 0.01), 4, cfg).is_err());
    let cc = cache(c(0.0, 1.0), 4);
    assert!(cc.e1(c(1.0, 1.0)).is_err());
    assert!(cc.kronecker_f(c(0.0, 1e-8), c(0.3, 0.0)).is_err());
    assert!(cc.e(5).is_err());
}

#[test]
fn g_coefficients_match_exponential_formula() {
    let tau = c(-0.2, 0.9);
    let cc = cache(tau, 10);
    for xi in [c(0.3, 0.15), c(0.45, -0.2), c(0.12, 0.3)] {
        let g = cc.g_coefficients(xi, 10).unwrap();
        let ge = cc.g_coefficients_exp(xi, 10).unwrap();
        for (k, (a, b)) in g.iter().zip(&ge).enumerate() {
            assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()), "k={k}: {a} vs {b}");
        }
    }
}

#[test]
fn theta_derivatives_match_product_form() {
    let tau = c(0.3, 0.7);
    let cc = cache(tau, 4);
    let xi = c(0.2, 0.4);
    let d = cc.theta_derivatives(xi, 2).unwrap();
    let th = |x: C64| cc.theta(x).unwrap();
    assert!((d[0] - th(xi)).norm() < 1e-13 * th(xi).norm());
    let d0 = cc.theta_derivatives(c(0.0, 0.0), 1).unwrap();
    assert!(d0[0].norm() < 1e-14);
    assert!((d0[1] - cc.theta_prime0()).norm() < 1e-12);
    let h = 1e-4;
    let fd = (th(xi + h) - th(xi - h)) / (2.0 * h);
    assert!((fd - d[1]).norm() < 1e-7 * d[1].norm());
}
