use super::{EisensteinCache, Sl2};
use crate::{Error, Result, C64, TWO_PI_I};

/// `|2 pi i dF/dtau - d^2F/dxi dalpha|` with central differences of step `h`,
/// divided by the larger of `1` and the two sides.
pub fn heat_residual(c: &EisensteinCache, xi: C64, alpha: C64, h: f64) -> Result<f64> {
    let cp = c.at_tau(c.tau + h)?;
    let cm = c.at_tau(c.tau - h)?;
    let dtau = (cp.kronecker_f(xi, alpha)? - cm.kronecker_f(xi, alpha)?) / (2.0 * h);
    let f = |a: f64, b: f64| c.kronecker_f(xi + a, alpha + b);
    let mixed = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h);
    let lhs = TWO_PI_I * dtau;
    Ok((lhs - mixed).norm() / lhs.norm().max(mixed.norm()).max(1.0))
}

/// `|F(xi,a1) F2'(xi,a2) - F(xi,a2) F2'(xi,a1) - F(xi,a1+a2)(wp(a1) - wp(a2))|`.
pub fn fay_residual(c: &EisensteinCache, xi: C64, a1: C64, a2: C64) -> Result<f64> {
    c.guard("a1 + a2", a1 + a2)?;
    let lhs = c.kronecker_f(xi, a1)? * c.kronecker_f2prime(xi, a2)? - c.kronecker_f(xi, a2)? * c.kronecker_f2prime(xi, a1)?;
    let rhs = c.kronecker_f(xi, a1 + a2)? * (c.wp(a1)? - c.wp(a2)?);
    Ok((lhs - rhs).norm())
}

/// Residual of `F(xi/j, alpha/j; g tau) = j exp(2 pi i c xi alpha / j) F(xi, alpha; tau)`,
/// `j = c tau + d`. `cp` must be the cache at `g tau`.
pub fn modularity_residual(
    c: &EisensteinCache,
    cp: &EisensteinCache,
    xi: C64,
    alpha: C64,
    g: &Sl2,
) -> Result<f64> {
    let g = Sl2::new(g.a, g.b, g.c, g.d)?;
    let tp = g.act(c.tau);
    if (tp - cp.tau).norm() > 1e-12 * (1.0 + tp.norm()) {
        return Err(Error::InvalidArgument(format!("second cache is at {} but g tau = {}", cp.tau, tp)));
    }
    let j = g.j(c.tau);
    let lhs = cp.kronecker_f(xi / j, alpha / j)?;
    let rhs = j * (TWO_PI_I * g.c as f64 * xi * alpha / j).exp() * c.kronecker_f(xi, alpha)?;
    Ok((lhs - rhs).norm())
}

/// Residuals of `F(xi+1, alpha) = F(xi, alpha)` and
/// `F(xi+tau, alpha) = exp(-2 pi i alpha) F(xi, alpha)`.
pub fn kronecker_shift_residuals(c: &EisensteinCache, xi: C64, alpha: C64) -> Result<(f64, f64)> {
    let f = c.kronecker_f(xi, alpha)?;
    let r1 = (c.kronecker_f(xi + 1.0, alpha)? - f).norm();
    let r2 = (c.kronecker_f(xi + c.tau, alpha)? - (-TWO_PI_I * alpha).exp() * f).norm();
    Ok((r1, r2))
}

/// Residuals of `E_1(xi+1) = E_1(xi)` and `E_1(xi+tau) = E_1(xi) - 2 pi i`.
pub fn e1_shift_residuals(c: &EisensteinCache, xi: C64) -> Result<(f64, f64)> {
    let e = c.e1(xi)?;
    Ok(((c.e1(xi + 1.0)? - e).norm(), (c.e1(xi + c.tau)? - e + TWO_PI_I).norm()))
}
