use super::{ConnOperator, FormEval, Kzb};
use crate::nca::{Derivation, Substitution, TruncatedSeries};
use crate::specfun::{EisensteinCache, Sl2, SpecfunConfig};
use crate::{Result, C64, TWO_PI_I};

/// Residuals of the lattice-shift behaviour of the connection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiPeriodicity {
    /// `Omega(xi + 1) = Omega(xi)`, both coefficients.
    pub xi_shift_one: f64,
    /// `Omega_xi(xi + tau) = exp(-2 pi i ad_t) Omega_xi(xi)`.
    pub xi_shift_tau: f64,
    /// `dtau` row of `nabla|_{xi+tau} = exp(-2 pi i t) nabla|_xi exp(2 pi i t)`.
    pub tau_row: f64,
}

pub fn quasi_periodicity_residuals(kzb: &Kzb, c: &EisensteinCache, xi: C64) -> Result<QuasiPeriodicity> {
    let n = kzb.cap();
    let om = kzb.omega(c, xi)?;
    let om1 = kzb.omega(c, xi + 1.0)?;
    let omt = kzb.omega(c, xi + c.tau)?;
    let t = TruncatedSeries::t(n);
    let g = t.scale(-TWO_PI_I).exp_trunc()?;
    let g_inv = t.scale(TWO_PI_I).exp_trunc()?;
    let xi_shift_one = om1.xi.action_residual(&om.xi)?.max(om1.tau.action_residual(&om.tau)?);
    let xi_shift_tau = omt.xi.action_residual(&om.xi.conjugate_by_left(&g, &g_inv)?)?;
    // pulling back along xi -> xi + tau turns dxi into dxi + dtau
    let lhs = omt.xi.checked_add(&omt.tau)?;
    let rhs = om.tau.conjugate_by_left(&g, &g_inv)?;
    let tau_row = lhs.action_residual(&rhs)?;
    Ok(QuasiPeriodicity { xi_shift_one, xi_shift_tau, tau_row })
}

/// Sup over words of length `<= N-1` of the curvature
/// `d_xi Omega_tau - d_tau Omega_xi + [Omega_xi, Omega_tau]`, with central
/// differences of step `h`, divided by the largest of `1` and the sups of the
/// three terms.
pub fn curvature_residual(form: &dyn FormEval, xi: C64, tau: C64, h: f64) -> Result<f64> {
    curvature_residual_with(form, xi, tau, h, form.cap().saturating_sub(1))
}

pub fn curvature_residual_with(form: &dyn FormEval, xi: C64, tau: C64, h: f64, max_len: usize) -> Result<f64> {
    let om = form.eval(xi, tau)?;
    let tp = form.eval(xi + h, tau)?.tau;
    let tm = form.eval(xi - h, tau)?.tau;
    let xp = form.eval(xi, tau + h)?.xi;
    let xm = form.eval(xi, tau - h)?.xi;
    let inv = C64::new(1.0 / (2.0 * h), 0.0);
    let d_xi_tau = tp.checked_sub(&tm)?.scale(inv);
    let d_tau_xi = xp.checked_sub(&xm)?.scale(inv);
    let bracket = om.xi.bracket(&om.tau)?;
    let k = d_xi_tau.checked_sub(&d_tau_xi)?.checked_add(&bracket)?;
    let zero = ConnOperator::zero(form.cap());
    let mut scale: f64 = 1.0;
    for term in [&d_xi_tau, &d_tau_xi, &bracket] {
        scale = scale.max(term.action_residual_up_to(&zero, max_len)?);
    }
    Ok(k.action_residual_up_to(&zero, max_len)? / scale)
}

/// Residual of the modular equivariance of the connection under `g`.
///
/// With `j = c tau + d`, `xi' = xi/j`, `tau' = g tau`, the automorphism
/// `Phi: t -> t/j, A -> j A + 2 pi i c t` and `M = exp(2 pi i c xi t / j)`,
/// the gauge transformation `G = M^{-1} o Phi` must carry the pulled-back
/// form to the original one: `g^* Omega = G^{-1} dG + G^{-1} Omega G`. Both
/// coordinate rows are compared through their action on all basis words.
pub fn sl2_residual(kzb: &Kzb, config: SpecfunConfig, xi: C64, tau: C64, g: &Sl2) -> Result<f64> {
    let g = Sl2::new(g.a, g.b, g.c, g.d)?;
    let n = kzb.cap();
    let j = g.j(tau);
    let cc = g.c as f64;
    let tau_p = g.act(tau);
    let xi_p = xi / j;
    let c0 = kzb.cache(tau, config)?;
    let c1 = kzb.cache(tau_p, config)?;
    let om = kzb.omega(&c0, xi)?;
    let omp = kzb.omega(&c1, xi_p)?;

    // pulled back form: dxi' = dxi/j - c xi/j^2 dtau, dtau' = dtau/j^2
    let lhs_xi = omp.xi.scale(j.inv());
    let lhs_tau = omp.xi.scale(-cc * xi / (j * j)).checked_add(&omp.tau.scale((j * j).inv()))?;

    let t = TruncatedSeries::t(n);
    let a = TruncatedSeries::a(n);
    let phi = Substitution::new(t.scale(j.inv()), a.scale(j).checked_add(&t.scale(TWO_PI_I * cc))?)?;
    let phi_inv = Substitution::new(t.scale(j), a.scale(j.inv()).checked_sub(&t.scale(TWO_PI_I * cc))?)?;
    let s = t.scale(TWO_PI_I * cc * xi / j);
    let m = s.exp_trunc()?;
    let m_inv = (-&s).exp_trunc()?;

    // M Omega M^{-1} + M d(M^{-1}), then conjugated by Phi^{-1}
    let mut inner_xi = om.xi.conjugate_by_left(&m, &m_inv)?;
    inner_xi.left -= &t.scale(TWO_PI_I * cc / j);
    let mut inner_tau = om.tau.conjugate_by_left(&m, &m_inv)?;
    inner_tau.left += &t.scale(TWO_PI_I * cc * cc * xi / (j * j));
    let rhs_xi = inner_xi.conjugate_by_automorphism(&phi_inv, &phi)?;
    let mut rhs_tau = inner_tau.conjugate_by_automorphism(&phi_inv, &phi)?;
    // Phi^{-1} d_tau Phi: t -> -c t / j, A -> c A / j - 2 pi i c^2 t
    let dphi = Derivation::new(
        t.scale(C64::new(-cc, 0.0) / j),
        a.scale(C64::new(cc, 0.0) / j).checked_sub(&t.scale(TWO_PI_I * cc * cc))?,
    )?;
    rhs_tau.der = rhs_tau.der.checked_add(&dphi)?;

    Ok(lhs_xi.action_residual(&rhs_xi)?.max(lhs_tau.action_residual(&rhs_tau)?))
}

/// Maurer-Cartan residual of a `dtau` form `mu(tau) dtau` on the upper
/// half-plane. Wedge terms of a single `dtau` component vanish, so the
/// equation reduces to `d(mu dtau) = 0`, i.e. `d mu / d conj(tau) = 0`. The
/// Wirtinger derivative `(d_x + i d_y)/2` is taken by fourth-order central
/// differences of step `h` at each sample; the largest component coefficient
/// is returned.
pub fn mc_residual(mu: &dyn Fn(C64) -> Result<ConnOperator>, tau_samples: &[C64], h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let i = C64::new(0.0, 1.0);
    for &tau in tau_samples {
        let d = |dir: C64| -> Result<ConnOperator> {
            let near = mu(tau + dir * h)?.checked_sub(&mu(tau - dir * h)?)?;
            let far = mu(tau + dir * (2.0 * h))?.checked_sub(&mu(tau - dir * (2.0 * h))?)?;
            near.scale(C64::new(8.0 / (12.0 * h), 0.0)).checked_sub(&far.scale(C64::new(1.0 / (12.0 * h), 0.0)))
        };
        let dbar = d(C64::new(1.0, 0.0))?.checked_add(&d(i)?.scale(i))?.scale(C64::new(0.5, 0.0));
        worst = worst.max(dbar.sup_norm());
    }
    Ok(worst)
}
