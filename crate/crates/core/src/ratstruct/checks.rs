use super::frame::{scaled_eisenstein, WeierstrassFrame};
use super::gauge::{algebraic_connection, e1_tau_derivative, e2_tau_derivative, generator_change};
use crate::kzb::Kzb;
use crate::nca::{bibracket, BivariateSeries, Derivation, Substitution, TruncatedSeries};
use crate::specfun::{EisensteinCache, Sl2};
use crate::{Result, C64, TWO_PI_I};

/// Coefficient difference of the algebraic connection computed in a frame
/// and in its transform by `g`, at `xi` and `xi/(c tau + d)`.
pub fn frame_invariance_residual(g: &Sl2, frame: &WeierstrassFrame, xi: C64, n: usize) -> Result<f64> {
    let other = frame.transform(g)?;
    let j = Sl2::new(g.a, g.b, g.c, g.d)?.j(frame.tau);
    let a = algebraic_connection(frame, xi, n)?;
    let b = algebraic_connection(&other, xi / j, n)?;
    a.sup_diff(&b)
}

/// Residual of the weight rule under `u -> lambda u`: with `Xi: T -> T/lambda,
/// S -> lambda S` the parts satisfy `K'_eta = lambda^-1 Xi K_eta Xi^-1`,
/// `K'_varpi = lambda^-2 Xi K_varpi Xi^-1`, `K'_kappa = Xi K_kappa Xi^-1`.
pub fn gm_rescaling_residual(lambda: C64, frame: &WeierstrassFrame, xi: C64, n: usize) -> Result<f64> {
    let other = frame.rescale(lambda)?;
    let a = algebraic_connection(frame, xi, n)?;
    let b = algebraic_connection(&other, xi, n)?;
    let t = TruncatedSeries::t(n);
    let s = TruncatedSeries::a(n);
    let xi_map = Substitution::new(t.scale(lambda.inv()), s.scale(lambda))?;
    let xi_inv = Substitution::new(t.scale(lambda), s.scale(lambda.inv()))?;
    let mut worst: f64 = 0.0;
    for (pa, pb, w) in [(&a.eta, &b.eta, 1), (&a.varpi, &b.varpi, 2), (&a.kappa, &b.kappa, 0)] {
        let expected = pa.conjugate_by_automorphism(&xi_map, &xi_inv)?.scale(lambda.powi(-w));
        worst = worst.max(pb.checked_sub(&expected)?.sup_norm());
    }
    Ok(worst)
}

/// Relative residuals of the three differential identities
/// `d Delta + 12 Delta kappa = 0`, `d g2 - 6 g3 varpi + 4 kappa g2 = 0`,
/// `dx - y eta - (2x^2 - g2/3) varpi + 2x kappa = 0`, each divided by the
/// sum of the absolute values of its terms, worst over the coordinate
/// directions `xi`, `tau`, `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormIdentities {
    pub delta: f64,
    pub g2: f64,
    pub x: f64,
}

impl FormIdentities {
    pub fn max(&self) -> f64 {
        self.delta.max(self.g2).max(self.x)
    }
}

pub fn form_identities_residual(frame: &WeierstrassFrame, xi: C64, h: f64) -> Result<FormIdentities> {
    let cfg = frame.config();
    let (tau, u) = (frame.tau, frame.u);
    let c = frame.cache();
    let e2 = c.e(2)?;
    let e1 = c.e1(xi)?;
    let (x, y) = frame.point(xi)?;
    let (g2, g3, delta) = (frame.g2, frame.g3, frame.delta);

    // values of (Delta, g2, x) at shifted coordinates
    let at = |dxi: C64, dtau: C64, du: C64| -> Result<[C64; 3]> {
        let f = WeierstrassFrame::new(tau + dtau, u + du, cfg)?;
        Ok([f.delta, f.g2, f.point(xi + dxi)?.0])
    };
    let zero = C64::new(0.0, 0.0);
    let hu = h * u.norm().max(1.0);
    let diff = |p: [C64; 3], m: [C64; 3], step: f64| -> [C64; 3] {
        [0, 1, 2].map(|i| (p[i] - m[i]) / (2.0 * step))
    };
    let d_xi = diff(at(C64::new(h, 0.0), zero, zero)?, at(C64::new(-h, 0.0), zero, zero)?, h);
    let d_tau = diff(at(zero, C64::new(h, 0.0), zero)?, at(zero, C64::new(-h, 0.0), zero)?, h);
    let d_u = diff(at(zero, zero, C64::new(hu, 0.0))?, at(zero, zero, C64::new(-hu, 0.0))?, hu);

    // components of the coframe on (dxi, dtau, du)
    let kappa = [zero, e2 / TWO_PI_I, u.inv()];
    let varpi = [zero, u * u / TWO_PI_I, zero];
    let eta = [u, u * e1 / TWO_PI_I, zero];
    let derivs = [d_xi, d_tau, d_u];

    let rel = |terms: &[C64]| -> f64 {
        let scale: f64 = terms.iter().map(|v| v.norm()).sum();
        if scale == 0.0 {
            0.0
        } else {
            terms.iter().sum::<C64>().norm() / scale
        }
    };
    let mut out = FormIdentities { delta: 0.0, g2: 0.0, x: 0.0 };
    for dir in 0..3 {
        let d = derivs[dir];
        out.delta = out.delta.max(rel(&[d[0], 12.0 * delta * kappa[dir]]));
        out.g2 = out.g2.max(rel(&[d[1], -6.0 * g3 * varpi[dir], 4.0 * kappa[dir] * g2]));
        out.x = out.x.max(rel(&[
            d[2],
            -y * eta[dir],
            -(2.0 * x * x - g2 / 3.0) * varpi[dir],
            2.0 * x * kappa[dir],
        ]));
    }
    Ok(out)
}

/// `|2 pi i dE_1/dtau - (E_3 - E_1 E_2)|` with the derivative by central
/// differences of step `h`, divided by the larger of `1` and the two sides.
pub fn e1_tau_derivative_residual(c: &EisensteinCache, xi: C64, h: f64) -> Result<f64> {
    let cfg = *c.config();
    let kmax = c.kmax();
    let cp = EisensteinCache::new(c.tau + h, kmax, cfg)?;
    let cm = EisensteinCache::new(c.tau - h, kmax, cfg)?;
    let fd = (cp.e1(xi)? - cm.e1(xi)?) / (2.0 * h);
    Ok(relative(fd * TWO_PI_I, e1_tau_derivative(c, xi)? * TWO_PI_I))
}

/// `|2 pi i de_2/dtau - (5 e_4 - e_2^2)|` by central differences, relative
/// as above.
pub fn e2_tau_derivative_residual(c: &EisensteinCache, h: f64) -> Result<f64> {
    let cfg = *c.config();
    let kmax = c.kmax();
    let cp = EisensteinCache::new(c.tau + h, kmax, cfg)?;
    let cm = EisensteinCache::new(c.tau - h, kmax, cfg)?;
    let fd = (cp.e(2)? - cm.e(2)?) / (2.0 * h);
    Ok(relative(fd * TWO_PI_I, e2_tau_derivative(c)? * TWO_PI_I))
}

fn relative(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Outcome of [`psi_algebraic_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiCheck {
    /// Difference between the transformed `d + psi_t d/dt`, with the change
    /// of generators differentiated numerically, and the closed form
    /// `kappa (T d_T - S d_S) + varpi (-S d_T + (g2/12) T d_S)`.
    pub closed_form: f64,
    /// Coefficient of `T` in the `kappa` image of `T`; equals 1.
    pub kappa_t: C64,
    /// Coefficient of `T` in the `varpi` image of `S`, divided by `g2`; equals 1/12.
    pub g2_coefficient: C64,
    /// Difference between the transformed `psi_A` per `varpi` and the kernel
    /// `-(1/2)(k-1)(-1)^{j-1} u^-k e_k` on `[ad_T^i S, ad_T^j S]`, `k = i+j+1`,
    /// with `u^-k e_k` taken as polynomials in `g2`, `g3`.
    pub psi_kernel: f64,
}

impl PsiCheck {
    pub fn max(&self) -> f64 {
        self.closed_form
            .max((self.kappa_t - 1.0).norm())
            .max((self.g2_coefficient - 1.0 / 12.0).norm())
            .max(self.psi_kernel)
    }
}

pub fn psi_algebraic_check(frame: &WeierstrassFrame, n: usize, h: f64) -> Result<PsiCheck> {
    let kzb = Kzb::new(n)?;
    let c = frame.cache();
    let cfg = frame.config();
    let (tau, u) = (frame.tau, frame.u);
    let e2 = c.e(2)?;
    let (rho, rho_inv) = generator_change(e2, u, n)?;
    let t = TruncatedSeries::t(n);
    let s = TruncatedSeries::a(n);

    // -(d rho) rho^-1 on the new letters by fourth-order differences
    let rho_at = |dtau: f64, du: f64| -> Result<Substitution> {
        let e2s = if dtau == 0.0 { e2 } else { EisensteinCache::new(tau + dtau, 4, cfg)?.e(2)? };
        Ok(generator_change(e2s, u + du, n)?.0)
    };
    let fd = |dir: usize| -> Result<Derivation> {
        let step = if dir == 0 { h } else { h * u.norm().max(1.0) };
        let shift = |k: f64| if dir == 0 { (k * step, 0.0) } else { (0.0, k * step) };
        let mut images = Vec::new();
        for l in [&t, &s] {
            let base = rho_inv.apply(l)?;
            let mut acc = TruncatedSeries::zero(n);
            for (k, w) in [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)] {
                let (dt, du) = shift(k);
                acc.axpy(C64::new(w / (12.0 * step), 0.0), &rho_at(dt, du)?.apply(&base)?);
            }
            images.push(-&acc);
        }
        Derivation::new(images[0].clone(), images[1].clone())
    };
    let d_tau = fd(0)?;
    let d_u = fd(1)?;
    let psi_t = kzb.psi_t().der.conjugate(&rho, &rho_inv)?;
    let tau_total = d_tau.checked_add(&psi_t)?;
    let kappa = d_u.scale(u);
    let varpi = tau_total.scale(TWO_PI_I / (u * u)).checked_sub(&d_u.scale(e2 / u))?;
    let kappa_expected = Derivation::new(t.clone(), -&s)?;
    let varpi_expected = Derivation::new(-&s, t.scale(frame.g2 / 12.0))?;
    let closed_form = kappa
        .checked_sub(&kappa_expected)?
        .image_t
        .sup_norm()
        .max(kappa.checked_sub(&kappa_expected)?.image_a.sup_norm())
        .max(varpi.checked_sub(&varpi_expected)?.image_t.sup_norm())
        .max(varpi.checked_sub(&varpi_expected)?.image_a.sup_norm());
    let kappa_t = kappa.image_t.coeff_str("t")?;
    let g2_coefficient = varpi.image_a.coeff_str("t")? / frame.g2;

    // psi_A per varpi in the new letters
    let psi_a = kzb.psi_a(c)?.der.conjugate(&rho, &rho_inv)?.scale(TWO_PI_I / (u * u));
    let cap = n.saturating_sub(2);
    let mut kernel = BivariateSeries::zero(cap);
    for k in (4..=(cap + 1)).step_by(2) {
        let ek = scaled_eisenstein(k, frame.g2, frame.g3)?;
        for j in 1..(k - 1) {
            let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
            kernel.set(k - 1 - j, j, -0.5 * (k as f64 - 1.0) * sign * ek);
        }
    }
    let expected = bibracket(&kernel, &s, &s, &t)?;
    let psi_kernel = psi_a.image_a.sup_diff(&expected).max(psi_a.image_t.sup_norm());
    Ok(PsiCheck { closed_form, kappa_t, g2_coefficient, psi_kernel })
}
