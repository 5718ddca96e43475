use super::frame::WeierstrassFrame;
use crate::kzb::{ConnOperator, Kzb, Omega};
use crate::nca::{ad_series, exp_series_coeffs, Derivation, Substitution, TruncatedSeries};
use crate::specfun::EisensteinCache;
use crate::{Result, C64, TWO_PI_I};

/// `d E_1 / d tau = (E_3 - E_1 E_2) / 2 pi i`.
pub fn e1_tau_derivative(c: &EisensteinCache, xi: C64) -> Result<C64> {
    let e = c.big_e_all(xi, 3)?;
    Ok((e[3] - e[1] * e[2]) / TWO_PI_I)
}

/// `d e_2 / d tau = (5 e_4 - e_2^2) / 2 pi i`.
pub fn e2_tau_derivative(c: &EisensteinCache) -> Result<C64> {
    let e2 = c.e(2)?;
    Ok((5.0 * c.e(4)? - e2 * e2) / TWO_PI_I)
}

/// The connection after the gauge transformation by left multiplication
/// with `g = exp(-E_1 t)`: `g omega g^-1 + g d(g^-1)`, in the letters `t`, `A`.
pub fn gauge_transform(kzb: &Kzb, c: &EisensteinCache, xi: C64) -> Result<Omega> {
    let n = kzb.cap();
    let om = kzb.omega(c, xi)?;
    let e = c.big_e_all(xi, 2)?;
    let t = TruncatedSeries::t(n);
    let g = t.scale(-e[1]).exp_trunc()?;
    let g_inv = t.scale(e[1]).exp_trunc()?;
    // g d(g^-1) = dE_1 t, with d_xi E_1 = -E_2
    let mut xi_part = om.xi.conjugate_by_left(&g, &g_inv)?;
    xi_part.left.axpy(-e[2], &t);
    let mut tau_part = om.tau.conjugate_by_left(&g, &g_inv)?;
    tau_part.left.axpy(e1_tau_derivative(c, xi)?, &t);
    Ok(Omega { xi: xi_part, tau: tau_part })
}

/// `-[(E_2 - e_2) t + exp(-sum_{k>=2} (-ad_t)^k/k (E_k - e_k))(A + e_2 t)]`.
pub fn gauged_fiber_closed_form(c: &EisensteinCache, xi: C64, n: usize) -> Result<TruncatedSeries> {
    let e = c.big_e_all(xi, n.max(2))?;
    let mut s = vec![C64::new(0.0, 0.0); n + 1];
    for (k, sk) in s.iter_mut().enumerate().skip(2) {
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        *sk = sign * (e[k] - c.e(k)?) / k as f64;
    }
    let h = exp_series_coeffs(&s, n);
    let t = TruncatedSeries::t(n);
    let e2 = c.e(2)?;
    let mut out = ad_series(&t, &h, &TruncatedSeries::a(n))?;
    out.axpy(e2, &t);
    out.axpy(e[2] - e2, &t);
    Ok(-&out)
}

/// The change of generators `T = u t`, `S = (A + e_2 t)/u` as a pair
/// `(rho, rho_inv)`: `rho` rewrites a series in `t, A` in the new letters
/// (stored in the slots of `t`, `A`), `rho_inv` goes back.
pub fn generator_change(tau_e2: C64, u: C64, n: usize) -> Result<(Substitution, Substitution)> {
    let t = TruncatedSeries::t(n);
    let a = TruncatedSeries::a(n);
    let rho = Substitution::new(t.scale(u.inv()), a.scale(u).checked_sub(&t.scale(tau_e2 / u))?)?;
    let rho_inv = Substitution::new(t.scale(u), a.checked_add(&t.scale(tau_e2))?.scale(u.inv()))?;
    Ok((rho, rho_inv))
}

/// Connection in the letters `T` (slot `t`) and `S` (slot `A`), written on
/// the coframe `eta = u(dxi + E_1 dtau/2 pi i)`, `varpi = u^2 dtau/2 pi i`,
/// `kappa = e_2 dtau/2 pi i + du/u`, with `nabla = d + eta_part eta +
/// varpi_part varpi + kappa_part kappa`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicConn {
    pub g2: C64,
    pub g3: C64,
    pub x: C64,
    pub y: C64,
    pub eta: ConnOperator,
    pub varpi: ConnOperator,
    pub kappa: ConnOperator,
}

impl AlgebraicConn {
    /// `K` with `nabla|_fiber = d - K u dxi`.
    pub fn fiber_k(&self) -> TruncatedSeries {
        -&self.eta.left
    }

    pub fn parts(&self) -> [&ConnOperator; 3] {
        [&self.eta, &self.varpi, &self.kappa]
    }

    /// Largest coefficient difference over the three parts.
    pub fn sup_diff(&self, other: &AlgebraicConn) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (a, b) in self.parts().iter().zip(other.parts()) {
            worst = worst.max(a.checked_sub(b)?.sup_norm());
        }
        Ok(worst)
    }

    /// Largest imaginary part of any coefficient.
    pub fn max_imaginary(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in self.parts() {
            for s in [&p.left, &p.right, &p.der.image_t, &p.der.image_a] {
                worst = s.as_slice().iter().fold(worst, |m, c| m.max(c.im.abs()));
            }
        }
        worst
    }
}

/// Derivation part of the change of generators in the coordinate
/// directions, `-(d rho) rho^-1`, as `(tau_part, u_part)`:
/// `S -> (de_2/dtau) u^-2 T` along `tau`, `T -> T/u`, `S -> -S/u` along `u`.
pub fn generator_change_derivations(frame: &WeierstrassFrame, n: usize) -> Result<(Derivation, Derivation)> {
    let t = TruncatedSeries::t(n);
    let a = TruncatedSeries::a(n);
    let u = frame.u;
    let de2 = e2_tau_derivative(frame.cache())?;
    let tau_part = Derivation::new(TruncatedSeries::zero(n), t.scale(de2 / (u * u)))?;
    let u_part = Derivation::new(t.scale(u.inv()), a.scale(-u.inv()))?;
    Ok((tau_part, u_part))
}

/// Rewrite a gauged connection in the algebraic letters and coframe.
pub fn to_algebraic(gauged: &Omega, frame: &WeierstrassFrame, xi: C64, n: usize) -> Result<AlgebraicConn> {
    let c = frame.cache();
    let u = frame.u;
    let e2 = c.e(2)?;
    let e1 = c.e1(xi)?;
    let (rho, rho_inv) = generator_change(e2, u, n)?;
    let xi_part = gauged.xi.conjugate_by_automorphism(&rho, &rho_inv)?;
    let mut tau_part = gauged.tau.conjugate_by_automorphism(&rho, &rho_inv)?;
    let (d_tau, d_u) = generator_change_derivations(frame, n)?;
    tau_part.der = tau_part.der.checked_add(&d_tau)?;
    let u_part = ConnOperator::from_der(d_u);
    // dxi = eta/u - E_1 varpi/u^2, dtau = 2 pi i varpi/u^2, du = u kappa - e_2 varpi/u
    let eta = xi_part.scale(u.inv());
    let varpi = xi_part
        .scale(-e1 / (u * u))
        .checked_add(&tau_part.scale(TWO_PI_I / (u * u)))?
        .checked_add(&u_part.scale(-e2 / u))?;
    let kappa = u_part.scale(u);
    let (x, y) = frame.point(xi)?;
    Ok(AlgebraicConn { g2: frame.g2, g3: frame.g3, x, y, eta, varpi, kappa })
}

/// Gauge transform followed by [`to_algebraic`].
pub fn algebraic_connection(frame: &WeierstrassFrame, xi: C64, n: usize) -> Result<AlgebraicConn> {
    let kzb = Kzb::new(n)?;
    let gauged = gauge_transform(&kzb, frame.cache(), xi)?;
    to_algebraic(&gauged, frame, xi, n)
}
