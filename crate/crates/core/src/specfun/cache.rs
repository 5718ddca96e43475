use std::f64::consts::PI;

use super::point::{lattice_distance, ModularPoint, TorusPoint};
use super::tables::{zeta, Tables};
use super::SpecfunConfig;
use crate::{Error, Result, C64, TWO_PI_I};

const MAX_TERMS: usize = 1_000_000;

/// Everything that depends on `tau` only: the nome, the Eisenstein series
/// `e_1..e_K`, the eta product and the fixed tables.
#[derive(Clone, Debug)]
pub struct EisensteinCache {
    pub tau: C64,
    pub q: C64,
    /// Number of q-series terms used for the stored `e_k`.
    pub q_cutoff: usize,
    /// Relative change allowed when more q-series terms are added.
    pub precision_target: f64,
    e: Vec<C64>,
    q8: C64,
    eta_prod: C64,
    config: SpecfunConfig,
    tables: Tables,
}

impl EisensteinCache {
    /// Cache holding `e_1..e_kmax` at `tau`.
    pub fn new(tau: C64, kmax: usize, config: SpecfunConfig) -> Result<Self> {
        let mp = ModularPoint::new(tau)?;
        if tau.im < config.min_im_tau {
            return Err(Error::TauTooLow { im: tau.im, floor: config.min_im_tau });
        }
        let kmax = kmax.max(2);
        let tables = Tables::new(kmax + 2);
        let q = mp.q;
        let q8 = (TWO_PI_I * tau / 8.0).exp();

        let mut eta_prod = C64::new(1.0, 0.0);
        let mut qj = q;
        let mut j = 0;
        while qj.norm() >= config.q_tol * 1e-3 {
            eta_prod *= 1.0 - qj;
            qj *= q;
            j += 1;
            if j > MAX_TERMS {
                return Err(Error::NonConvergent("eta product".into()));
            }
        }

        let mut cache = EisensteinCache {
            tau,
            q,
            q_cutoff: 0,
            precision_target: 1e-13,
            e: vec![C64::new(0.0, 0.0); kmax + 1],
            q8,
            eta_prod,
            config,
            tables,
        };
        let mut cutoff = 0;
        for k in (2..=kmax).step_by(2) {
            let (v, n) = cache.e_even_adaptive(k)?;
            cache.e[k] = v;
            cutoff = cutoff.max(n);
        }
        cache.q_cutoff = cutoff;
        Ok(cache)
    }

    pub fn config(&self) -> &SpecfunConfig {
        &self.config
    }

    /// Largest `k` with `e_k` stored.
    pub fn kmax(&self) -> usize {
        self.e.len() - 1
    }

    /// Same cache data at another `tau`.
    pub fn at_tau(&self, tau: C64) -> Result<Self> {
        Self::new(tau, self.kmax(), self.config)
    }

    pub(crate) fn check_point(&self, p: &TorusPoint) -> Result<()> {
        if (p.tau - self.tau).norm() > 1e-14 * (1.0 + self.tau.norm()) {
            return Err(Error::InvalidArgument(format!(
                "point built for tau = {} used with a cache at tau = {}",
                p.tau, self.tau
            )));
        }
        Ok(())
    }

    pub fn torus_point(&self, xi: C64) -> TorusPoint {
        TorusPoint::new(xi, self.tau)
    }

    /// Rejects points within the pole floor of the lattice.
    pub fn guard(&self, what: &'static str, xi: C64) -> Result<()> {
        let dist = lattice_distance(xi, self.tau);
        if dist < self.config.pole_floor {
            return Err(Error::Pole { what, re: xi.re, im: xi.im, dist });
        }
        Ok(())
    }

    // term of the q-expansion: 2 (2 pi i)^k/(k-1)! Li_{1-k}(q^n)
    fn e_term(&self, k: usize, qn: C64) -> C64 {
        TWO_PI_I.powi(k as i32) * 2.0 / self.tables.factorial[k - 1] * self.tables.li_neg(k - 1, qn)
    }

    fn e_even_adaptive(&self, k: usize) -> Result<(C64, usize)> {
        let base = C64::new(2.0 * zeta(k), 0.0);
        let mut sum = C64::new(0.0, 0.0);
        let mut qn = self.q;
        // beyond this index the terms n^{k-1}|q|^n decrease
        let peak = ((k - 1) as f64 / -self.q.norm().ln()).ceil() as usize;
        let mut n = 1;
        loop {
            let term = self.e_term(k, qn);
            sum += term;
            if n > peak && term.norm() < self.config.q_tol * (base + sum).norm().max(1e-300) {
                break;
            }
            n += 1;
            qn *= self.q;
            if n > MAX_TERMS {
                return Err(Error::NonConvergent(format!("q-series of e_{k}")));
            }
        }
        Ok((base + sum, n))
    }

    /// `e_k` with a fixed number of q-series terms.
    pub fn e_with_cutoff(&self, k: usize, terms: usize) -> C64 {
        if k % 2 == 1 {
            return C64::new(0.0, 0.0);
        }
        let tables;
        let t = if k < self.tables.capacity() {
            &self.tables
        } else {
            tables = Tables::new(k + 2);
            &tables
        };
        let mut sum = C64::new(0.0, 0.0);
        let mut qn = self.q;
        for _ in 0..terms {
            sum += TWO_PI_I.powi(k as i32) * 2.0 / t.factorial[k - 1] * t.li_neg(k - 1, qn);
            qn *= self.q;
        }
        sum + 2.0 * zeta(k)
    }

    /// `e_k(tau)`; exactly zero for odd `k`.
    pub fn e(&self, k: usize) -> Result<C64> {
        if k == 0 || k > self.kmax() {
            return Err(Error::CacheCapacity { have: self.kmax(), need: k });
        }
        Ok(self.e[k])
    }

    /// All stored values, `e_all()[k] = e_k` (index 0 unused).
    pub fn e_all(&self) -> &[C64] {
        &self.e
    }

    /// `theta'(0) = 2 pi q^{1/8} prod (1 - q^j)^3`.
    pub fn theta_prime0(&self) -> C64 {
        2.0 * PI * self.q8 * self.eta_prod.powi(3)
    }

    /// `prod_{j >= 1} (1 - q^j)`.
    pub fn eta_product(&self) -> C64 {
        self.eta_prod
    }

    /// Jacobi product `-i q^{1/8} (z^{1/2} - z^{-1/2}) prod (1 - z q^j)(1 - q^j / z)(1 - q^j)`.
    pub fn theta(&self, xi: C64) -> Result<C64> {
        let zh = (C64::new(0.0, PI) * xi).exp();
        let z = zh * zh;
        let zi = z.inv();
        let mut prod = C64::new(1.0, 0.0);
        let mut qj = self.q;
        let mut j = 0;
        loop {
            let (a, b) = (z * qj, zi * qj);
            if a.norm() < self.config.q_tol && b.norm() < self.config.q_tol && qj.norm() < self.config.q_tol {
                break;
            }
            prod *= (1.0 - a) * (1.0 - b);
            qj *= self.q;
            j += 1;
            if j > MAX_TERMS {
                return Err(Error::NonConvergent("theta product".into()));
            }
        }
        Ok(C64::new(0.0, -1.0) * self.q8 * (zh - zh.inv()) * prod * self.eta_prod)
    }

    fn cot_pi(xi: C64) -> C64 {
        let z = (TWO_PI_I * xi).exp();
        if z.norm_sqr() > 1.0 {
            let zi = z.inv();
            C64::new(0.0, 1.0) * (1.0 + zi) / (1.0 - zi)
        } else {
            C64::new(0.0, 1.0) * (z + 1.0) / (z - 1.0)
        }
    }

    /// `E_1 = theta'/theta`.
    pub fn e1(&self, xi: C64) -> Result<C64> {
        Ok(self.big_e_all(xi, 1)?[1])
    }

    /// `E_1..E_kmax` at `xi` (index 0 unused), from
    /// `E_k = (-1)^{k-1} pi^k P_{k-1}(cot pi xi)/(k-1)!
    ///       + (2 pi i)^k/(k-1)! sum_j [Li_{1-k}(q^j/z) + (-1)^k Li_{1-k}(z q^j)]`.
    pub fn big_e_all(&self, xi: C64, kmax: usize) -> Result<Vec<C64>> {
        self.guard("xi", xi)?;
        let tables_local;
        let t = if kmax <= self.tables.capacity() {
            &self.tables
        } else {
            tables_local = Tables::new(kmax + 2);
            &tables_local
        };
        let c = Self::cot_pi(xi);
        let z = (TWO_PI_I * xi).exp();
        let zi = z.inv();
        let mut sums = vec![C64::new(0.0, 0.0); kmax + 1];
        let mut qj = self.q;
        let mut j = 0;
        loop {
            let (a, b) = (z * qj, zi * qj);
            if a.norm() < self.config.q_tol && b.norm() < self.config.q_tol {
                break;
            }
            for (k, s) in sums.iter_mut().enumerate().skip(1) {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                *s += t.li_neg(k - 1, b) + sign * t.li_neg(k - 1, a);
            }
            qj *= self.q;
            j += 1;
            if j > MAX_TERMS {
                return Err(Error::NonConvergent("Eisenstein function q-series".into()));
            }
        }
        let mut out = vec![C64::new(0.0, 0.0); kmax + 1];
        for k in 1..=kmax {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let fk = t.factorial[k - 1];
            out[k] = sign * PI.powi(k as i32) * t.cot_poly(k - 1, c) / fk + TWO_PI_I.powi(k as i32) / fk * sums[k];
        }
        Ok(out)
    }

    /// `wp = E_2 - e_2`.
    pub fn wp(&self, xi: C64) -> Result<C64> {
        Ok(self.big_e_all(xi, 2)?[2] - self.e[2])
    }

    /// `wp' = -2 E_3`.
    pub fn wp_prime(&self, xi: C64) -> Result<C64> {
        Ok(-2.0 * self.big_e_all(xi, 3)?[3])
    }

    /// `F(xi, alpha) = theta'(0) theta(xi + alpha) / (theta(xi) theta(alpha))`.
    pub fn kronecker_f(&self, xi: C64, alpha: C64) -> Result<C64> {
        self.guard("xi", xi)?;
        self.guard("alpha", alpha)?;
        Ok(self.theta_prime0() * self.theta(xi + alpha)? / (self.theta(xi)? * self.theta(alpha)?))
    }

    /// `dF/dalpha = F (E_1(xi + alpha) - E_1(alpha))`; `xi + alpha` must be
    /// off the lattice as well.
    pub fn kronecker_f2prime(&self, xi: C64, alpha: C64) -> Result<C64> {
        let f = self.kronecker_f(xi, alpha)?;
        self.guard("xi + alpha", xi + alpha)?;
        Ok(f * (self.e1(xi + alpha)? - self.e1(alpha)?))
    }

    /// `dF/dxi = F (E_1(xi + alpha) - E_1(xi))`.
    pub fn kronecker_f1prime(&self, xi: C64, alpha: C64) -> Result<C64> {
        let f = self.kronecker_f(xi, alpha)?;
        self.guard("xi + alpha", xi + alpha)?;
        Ok(f * (self.e1(xi + alpha)? - self.e1(xi)?))
    }

    /// `theta^{(k)}(xi)` for `k = 0..=n` from the series
    /// `theta(x) = 2 sum_{m>=0} (-1)^m exp(pi i tau (m+1/2)^2) sin((2m+1) pi x)`,
    /// differentiated term by term. Exponents are combined before
    /// exponentiating so large `Im xi` does not overflow.
    pub fn theta_derivatives(&self, xi: C64, n: usize) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        let i = C64::new(0.0, 1.0);
        let vertex = xi.im.abs() / self.tau.im + 1.0;
        let mut max_log = f64::NEG_INFINITY;
        let mut m = 0usize;
        loop {
            let mf = m as f64 + 0.5;
            let base = C64::new(0.0, PI) * self.tau * mf * mf;
            let w = 2.0 * mf * PI;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let ep = base + i * w * xi;
            let em = base - i * w * xi;
            let lw = w.ln();
            let mut largest = f64::NEG_INFINITY;
            for (k, o) in out.iter_mut().enumerate() {
                // d^k/dx^k sin(w x) = (w^k / 2i) (i^k e^{i w x} - (-i)^k e^{-i w x})
                let ik = i.powi(k as i32);
                let lk = k as f64 * lw;
                let a = (ep + lk).exp() * ik;
                let b = (em + lk).exp() * ik.conj();
                *o += sign * (a - b) / i;
                largest = largest.max((ep.re + lk).max(em.re + lk));
            }
            max_log = max_log.max(largest);
            if mf > vertex && largest < max_log + self.config.q_tol.ln() {
                break;
            }
            m += 1;
            if m > MAX_TERMS {
                return Err(Error::NonConvergent("theta series".into()));
            }
        }
        Ok(out)
    }

    /// Taylor coefficients `g_0..g_n` of `G(alpha) = alpha F(xi, alpha)`.
    ///
    /// Computed as the product of the expansions of `theta'(0) alpha / theta(alpha)`
    /// and `theta(xi + alpha) / theta(xi)`, both from derivatives of the theta
    /// series. This agrees with `exp(-sum_k (-alpha)^k/k (E_k(xi) - e_k))`
    /// (see [`g_coefficients_exp`](Self::g_coefficients_exp)) but avoids the
    /// cancellation of the `xi^{-k}` growth of `E_k` near the lattice.
    pub fn g_coefficients(&self, xi: C64, n: usize) -> Result<Vec<C64>> {
        if n > self.kmax() {
            return Err(Error::CacheCapacity { have: self.kmax(), need: n });
        }
        self.guard("xi", xi)?;
        let t = &self.tables;
        let d0 = self.theta_derivatives(C64::new(0.0, 0.0), n + 1)?;
        // theta(alpha) / (theta'(0) alpha) = sum u_m alpha^m
        let u: Vec<C64> = (0..=n).map(|m| d0[m + 1] / (t.factorial[m + 1] * d0[1])).collect();
        let mut a = vec![C64::new(0.0, 0.0); n + 1];
        a[0] = C64::new(1.0, 0.0);
        for m in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=m {
                acc += u[k] * a[m - k];
            }
            a[m] = -acc;
        }
        let dx = self.theta_derivatives(xi, n)?;
        let b: Vec<C64> = (0..=n).map(|j| dx[j] / (t.factorial[j] * dx[0])).collect();
        let mut g = vec![C64::new(0.0, 0.0); n + 1];
        for m in 0..=n {
            for k in 0..=m {
                g[m] += a[k] * b[m - k];
            }
        }
        g[0] = C64::new(1.0, 0.0);
        Ok(g)
    }

    /// Taylor coefficients of `exp(-sum_k (-alpha)^k/k (E_k(xi) - e_k))`.
    pub fn g_coefficients_exp(&self, xi: C64, n: usize) -> Result<Vec<C64>> {
        if n > self.kmax() {
            return Err(Error::CacheCapacity { have: self.kmax(), need: n });
        }
        let big = self.big_e_all(xi, n.max(1))?;
        let mut s = vec![C64::new(0.0, 0.0); n + 1];
        for k in 1..=n {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            s[k] = sign * (big[k] - self.e[k]) / k as f64;
        }
        Ok(crate::nca::exp_series_coeffs(&s, n))
    }
}
