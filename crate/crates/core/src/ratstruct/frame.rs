use serde::Deserialize;

use crate::nca::MAX_CAP;
use crate::specfun::{EisensteinCache, Sl2, SpecfunConfig};
use crate::{Error, Result, C64};

/// Frames with `|Delta|` below this fraction of `max(|g2|^3, 27|g3|^2)` are
/// treated as singular.
pub const DELTA_FLOOR: f64 = 1e-10;

/// A period `u` of the algebraic differential together with `tau`, and the
/// resulting Weierstrass invariants `g2 = 60 u^-4 e_4`, `g3 = 140 u^-6 e_6`.
#[derive(Clone, Debug)]
pub struct WeierstrassFrame {
    pub tau: C64,
    pub u: C64,
    pub g2: C64,
    pub g3: C64,
    pub delta: C64,
    cache: EisensteinCache,
}

impl WeierstrassFrame {
    pub fn new(tau: C64, u: C64, config: SpecfunConfig) -> Result<Self> {
        if u.norm() == 0.0 || !u.norm().is_finite() {
            return Err(Error::InvalidArgument(format!("frame period u = {u} must be finite and nonzero")));
        }
        let cache = EisensteinCache::new(tau, MAX_CAP, config)?;
        let g2 = 60.0 * cache.e(4)? / u.powi(4);
        let g3 = 140.0 * cache.e(6)? / u.powi(6);
        let delta = g2 * g2 * g2 - 27.0 * g3 * g3;
        let scale = (g2.norm().powi(3)).max(27.0 * g3.norm_sqr());
        if delta.norm() <= DELTA_FLOOR * scale {
            return Err(Error::SingularFrame(delta.norm() / scale));
        }
        Ok(WeierstrassFrame { tau, u, g2, g3, delta, cache })
    }

    /// Frame file: `{"tau":[re,im],"u":[re,im]}`.
    pub fn from_json(s: &str, config: SpecfunConfig) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct FrameFile {
            tau: [f64; 2],
            u: [f64; 2],
        }
        let f: FrameFile = serde_json::from_str(s)?;
        Self::new(C64::new(f.tau[0], f.tau[1]), C64::new(f.u[0], f.u[1]), config)
    }

    pub fn cache(&self) -> &EisensteinCache {
        &self.cache
    }

    pub fn config(&self) -> SpecfunConfig {
        *self.cache.config()
    }

    /// The frame `(g tau, (c tau + d) u)`, which has the same invariants.
    pub fn transform(&self, g: &Sl2) -> Result<Self> {
        let g = Sl2::new(g.a, g.b, g.c, g.d)?;
        Self::new(g.act(self.tau), g.j(self.tau) * self.u, self.config())
    }

    /// The frame `(tau, lambda u)`.
    pub fn rescale(&self, lambda: C64) -> Result<Self> {
        Self::new(self.tau, lambda * self.u, self.config())
    }

    /// `(x, y) = (u^-2 (E_2 - e_2), -2 u^-3 E_3)` at `xi`.
    pub fn point(&self, xi: C64) -> Result<(C64, C64)> {
        let e = self.cache.big_e_all(xi, 3)?;
        let x = (e[2] - self.cache.e(2)?) / (self.u * self.u);
        let y = -2.0 * e[3] / self.u.powi(3);
        Ok((x, y))
    }

    /// Relative residual of `y^2 = 4x^3 - g2 x - g3` at `xi`.
    pub fn cubic_residual(&self, xi: C64) -> Result<f64> {
        let (x, y) = self.point(xi)?;
        let terms = [y * y, 4.0 * x * x * x, self.g2 * x, self.g3];
        let scale: f64 = terms.iter().map(|v| v.norm()).sum();
        Ok((terms[0] - terms[1] + terms[2] + terms[3]).norm() / scale)
    }

    /// `u^-k e_k` from the invariants, without touching `e_k` itself.
    pub fn scaled_eisenstein(&self, k: usize) -> Result<C64> {
        scaled_eisenstein(k, self.g2, self.g3)
    }
}

/// `u^-k e_k` as a polynomial in `g2`, `g3`, from the Laurent coefficients of
/// `wp(z) = z^-2 + sum_m c_m z^{2m-2}`: `c_2 = g2/20`, `c_3 = g3/28` and
/// `c_m = 3/((2m+1)(m-3)) sum_{j=2}^{m-2} c_j c_{m-j}`, with `c_m = (2m-1) e_{2m}`.
pub fn scaled_eisenstein(k: usize, g2: C64, g3: C64) -> Result<C64> {
    if k < 3 {
        return Err(Error::UnsupportedIndex(k));
    }
    if k % 2 == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    let m_max = k / 2;
    let mut c = vec![C64::new(0.0, 0.0); m_max.max(3) + 1];
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for m in 4..=m_max {
        let mut s = C64::new(0.0, 0.0);
        for j in 2..=(m - 2) {
            s += c[j] * c[m - j];
        }
        c[m] = s * 3.0 / (((2 * m + 1) * (m - 3)) as f64);
    }
    Ok(c[m_max] / (2 * m_max - 1) as f64)
}

/// Polynomial in `x`, `y` reduced modulo `y^2 = 4x^3 - g2 x - g3`, stored as
/// `sum_i (p0[i] + p1[i] y) x^i`.
#[derive(Clone, Debug, PartialEq)]
struct CurvePoly {
    p0: Vec<C64>,
    p1: Vec<C64>,
}

impl CurvePoly {
    fn x() -> Self {
        CurvePoly { p0: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], p1: vec![] }
    }

    fn add_x_power(v: &mut Vec<C64>, i: usize, c: C64) {
        if v.len() <= i {
            v.resize(i + 1, C64::new(0.0, 0.0));
        }
        v[i] += c;
    }

    /// Derivation with `dx = y`, `dy = 6x^2 - g2/2`.
    fn derive(&self, g2: C64, g3: C64) -> Self {
        let mut out = CurvePoly { p0: vec![], p1: vec![] };
        for (i, &c) in self.p0.iter().enumerate() {
            if i > 0 {
                Self::add_x_power(&mut out.p1, i - 1, c * i as f64);
            }
        }
        for (i, &c) in self.p1.iter().enumerate() {
            // d(x^i y) = i x^{i-1} y^2 + x^i (6x^2 - g2/2)
            if i > 0 {
                let k = c * i as f64;
                Self::add_x_power(&mut out.p0, i + 2, 4.0 * k);
                Self::add_x_power(&mut out.p0, i, -g2 * k);
                Self::add_x_power(&mut out.p0, i - 1, -g3 * k);
            }
            Self::add_x_power(&mut out.p0, i + 2, 6.0 * c);
            Self::add_x_power(&mut out.p0, i, -g2 * c / 2.0);
        }
        out
    }

    fn scale(&mut self, s: C64) {
        self.p0.iter_mut().chain(self.p1.iter_mut()).for_each(|c| *c *= s);
    }

    fn eval(&self, x: C64, y: C64) -> C64 {
        let horner = |v: &[C64]| v.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c);
        horner(&self.p0) + y * horner(&self.p1)
    }
}

/// `u^-k (E_k - e_k)` at `xi` evaluated as a polynomial in `x, y, g2, g3`,
/// built from `u^-(k+1) E_{k+1} = -(1/k) d(u^-k E_k)` starting at
/// `u^-2 (E_2 - e_2) = x`. Supported for `2 <= k <= 8`.
pub fn ek_polynomial_oracle(k: usize, frame: &WeierstrassFrame, xi: C64) -> Result<C64> {
    if !(2..=8).contains(&k) {
        return Err(Error::UnsupportedIndex(k));
    }
    let (g2, g3) = (frame.g2, frame.g3);
    // p represents u^-j E_j minus its constant e-term only for j = 2
    let mut p = CurvePoly::x();
    for j in 2..k {
        p = p.derive(g2, g3);
        p.scale(C64::new(-1.0 / j as f64, 0.0));
    }
    let (x, y) = frame.point(xi)?;
    let mut v = p.eval(x, y);
    if k >= 4 {
        v -= scaled_eisenstein(k, g2, g3)?;
    }
    Ok(v)
}

/// `|oracle - u^-k (E_k - e_k)|` relative to the size of the direct value.
pub fn ek_polynomial_residual(k: usize, frame: &WeierstrassFrame, xi: C64) -> Result<f64> {
    let oracle = ek_polynomial_oracle(k, frame, xi)?;
    let c = frame.cache();
    let direct = (c.big_e_all(xi, k)?[k] - c.e(k)?) / frame.u.powi(k as i32);
    Ok((oracle - direct).norm() / direct.norm().max(1.0))
}
