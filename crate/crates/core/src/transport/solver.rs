use super::quadrature::Rule;
use crate::kzb::ConnOperator;
use crate::nca::TruncatedSeries;
use crate::specfun::SpecfunConfig;
use crate::{Error, Result};

/// Quadrature and refinement settings for transport.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportOptions {
    /// Gauss-Legendre nodes per piece on the first attempt.
    pub quad_points: usize,
    /// Give up once doubling would exceed this many nodes.
    pub max_quad_points: usize,
    /// Accept a piece when doubling changes it by less than `tol * max(1, |phi|)`.
    pub tol: f64,
    /// A piece longer than `piece_ratio` times its distance to the nearest
    /// singularity is split in half.
    pub piece_ratio: f64,
    pub config: SpecfunConfig,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { quad_points: 32, max_quad_points: 512, tol: 1e-13, piece_ratio: 1.0, config: SpecfunConfig::default() }
    }
}

/// Solution of `phi' = -op(s) phi` on `s in [0, 1]` at `q` collocation nodes.
///
/// Every operator in use strictly raises the grading by (word length, number
/// of `A`), so the Picard iterates become stationary after finitely many
/// rounds; the loop stops as soon as an iterate reproduces itself.
pub(crate) fn collocate(
    op_at: &dyn Fn(f64) -> Result<ConnOperator>,
    phi0: &TruncatedSeries,
    q: usize,
) -> Result<TruncatedSeries> {
    let rule = Rule::cached(q);
    let n = phi0.cap();
    let ops = rule.nodes.iter().map(|&s| op_at(s)).collect::<Result<Vec<_>>>()?;
    let max_rounds = (n + 1) * (n + 2) / 2 + 2;
    let mut nodes = vec![phi0.clone(); q];
    let mut f: Vec<TruncatedSeries> = Vec::with_capacity(q);
    for _ in 0..max_rounds {
        f = ops.iter().zip(&nodes).map(|(op, y)| op.apply(y)).collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(q);
        for row in &rule.integral {
            let mut y = phi0.clone();
            for (wkl, fl) in row.iter().zip(&f) {
                y.axpy((-wkl).into(), fl);
            }
            next.push(y);
        }
        if next == nodes {
            break;
        }
        nodes = next;
    }
    let mut end = phi0.clone();
    for (w, fl) in rule.weights.iter().zip(&f) {
        end.axpy((-w).into(), fl);
    }
    Ok(end)
}

/// Collocation with node doubling until two successive answers agree.
/// Returns the finer answer and the size of the last change.
pub(crate) fn collocate_refined(
    op_at: &dyn Fn(f64) -> Result<ConnOperator>,
    phi0: &TruncatedSeries,
    opts: &TransportOptions,
) -> Result<(TruncatedSeries, f64)> {
    if opts.quad_points == 0 {
        return Err(Error::InvalidArgument("quad_points must be positive".into()));
    }
    let mut q = opts.quad_points;
    let mut coarse = collocate(op_at, phi0, q)?;
    loop {
        if 2 * q > opts.max_quad_points {
            return Err(Error::NonConvergent(format!("quadrature did not settle with {q} nodes")));
        }
        let fine = collocate(op_at, phi0, 2 * q)?;
        let delta = fine.sup_diff(&coarse);
        if delta <= opts.tol * fine.sup_norm().max(1.0) {
            return Ok((fine, delta));
        }
        coarse = fine;
        q *= 2;
    }
}

/// Split `[0, 1]` into pieces no longer than `ratio * dist(midpoint)`, where
/// `dist` is measured in the same units as `length`, the length of `[0, 1]`.
pub(crate) fn split_pieces(
    length: f64,
    dist: &dyn Fn(f64) -> f64,
    ratio: f64,
    floor: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut stack = vec![(0.0, 1.0, 0usize)];
    while let Some((s0, s1, depth)) = stack.pop() {
        let mid = 0.5 * (s0 + s1);
        let d = dist(mid);
        if d < floor {
            return Err(Error::InvalidArgument(format!("path passes within {d:e} of a singularity")));
        }
        if length * (s1 - s0) > ratio * d && depth < 40 {
            stack.push((mid, s1, depth + 1));
            stack.push((s0, mid, depth + 1));
        } else {
            out.push((s0, s1));
        }
    }
    Ok(out)
}
