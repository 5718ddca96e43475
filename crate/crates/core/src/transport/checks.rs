use std::f64::consts::TAU;

use super::path::{transport, transport_fiber_from, PathSpec};
use super::solver::TransportOptions;
use crate::kzb::Kzb;
use crate::nca::TruncatedSeries;
use crate::{Error, Result, C64, TWO_PI_I};

/// Sup-coefficient of the difference of the transports along two paths with
/// common endpoints.
pub fn homotopy_invariance_check(p1: &PathSpec, p2: &PathSpec, opts: &TransportOptions) -> Result<f64> {
    let same_kind = matches!(
        (p1, p2),
        (PathSpec::Fiber { .. }, PathSpec::Fiber { .. }) | (PathSpec::Family { .. }, PathSpec::Family { .. })
    );
    if !same_kind || p1.degree() != p2.degree() {
        return Err(Error::InvalidArgument("paths differ in kind or degree".into()));
    }
    if let (PathSpec::Fiber { tau: t1, .. }, PathSpec::Fiber { tau: t2, .. }) = (p1, p2) {
        if t1 != t2 {
            return Err(Error::InvalidArgument("fiber paths at different tau".into()));
        }
    }
    if let (PathSpec::Family { sigma1: a1, sigma2: a2, .. }, PathSpec::Family { sigma1: b1, sigma2: b2, .. }) = (p1, p2) {
        if a1 != b1 || a2 != b2 {
            return Err(Error::InvalidArgument("family paths carry different sections".into()));
        }
    }
    let (s1, e1) = p1.endpoints().ok_or_else(|| Error::InvalidArgument("empty path".into()))?;
    let (s2, e2) = p2.endpoints().ok_or_else(|| Error::InvalidArgument("empty path".into()))?;
    let tol = 1e-12 * (1.0 + s1.norm() + e1.norm());
    if (s1 - s2).norm() > tol || (e1 - e2).norm() > tol {
        return Err(Error::InvalidArgument("paths have different endpoints".into()));
    }
    let a = transport(p1, opts)?;
    let b = transport(p2, opts)?;
    Ok(a.phi.sup_diff(&b.phi))
}

/// Lattice direction of a translated segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeShift {
    One,
    Tau,
}

/// Residual of `T(a + tau -> b + tau) = exp(-2 pi i t) T(a -> b) exp(2 pi i t)`
/// for the straight segment, or of `T(a + 1 -> b + 1) = T(a -> b)`.
pub fn lattice_conjugation_check(
    a: C64,
    b: C64,
    tau: C64,
    shift: LatticeShift,
    degree: usize,
    opts: &TransportOptions,
) -> Result<f64> {
    let kzb = Kzb::new(degree)?;
    let c = kzb.cache(tau, opts.config)?;
    let one = TruncatedSeries::one(degree);
    let base = transport_fiber_from(&kzb, &c, &[a, b], &one, opts)?.phi;
    let d = match shift {
        LatticeShift::One => C64::new(1.0, 0.0),
        LatticeShift::Tau => tau,
    };
    let moved = transport_fiber_from(&kzb, &c, &[a + d, b + d], &one, opts)?.phi;
    let expected = match shift {
        LatticeShift::One => base,
        LatticeShift::Tau => {
            let t = TruncatedSeries::t(degree);
            let g = t.scale(-TWO_PI_I).exp_trunc()?;
            let g_inv = t.scale(TWO_PI_I).exp_trunc()?;
            g.checked_mul(&base)?.checked_mul(&g_inv)?
        }
    };
    Ok(moved.sup_diff(&expected))
}

/// Shortest nonzero lattice vector length, searched in a small window.
fn shortest_period(tau: C64) -> f64 {
    let mut best = f64::INFINITY;
    for m in -3i32..=3 {
        for n in -3i32..=3 {
            if m != 0 || n != 0 {
                best = best.min((C64::new(m as f64, 0.0) + tau * n as f64).norm());
            }
        }
    }
    best
}

/// Number of sides of the polygon standing in for the circle.
const LOOP_SIDES: usize = 32;

/// Transport once counterclockwise around `xi = 0`, based at `base`: out
/// along the ray to the circle of the given radius, around a polygon
/// inscribed in it, and back.
pub fn puncture_monodromy(
    tau: C64,
    radius: f64,
    base: C64,
    degree: usize,
    opts: &TransportOptions,
) -> Result<TruncatedSeries> {
    let short = shortest_period(tau);
    if !(radius > 1e3 * opts.config.pole_floor) {
        return Err(Error::InvalidArgument(format!("loop radius {radius} too small")));
    }
    if radius >= 0.5 * short {
        return Err(Error::InvalidArgument(format!("loop radius {radius} too large for periods of length {short}")));
    }
    if base.norm() == 0.0 {
        return Err(Error::InvalidArgument("base point at the puncture".into()));
    }
    let theta0 = base.arg();
    let mut vertices = vec![base];
    for k in 0..=LOOP_SIDES {
        let th = theta0 + TAU * k as f64 / LOOP_SIDES as f64;
        vertices.push(C64::from_polar(radius, th));
    }
    vertices.push(base);
    let kzb = Kzb::new(degree)?;
    let c = kzb.cache(tau, opts.config)?;
    Ok(transport_fiber_from(&kzb, &c, &vertices, &TruncatedSeries::one(degree), opts)?.phi)
}
