use std::sync::Arc;

use super::ConnOperator;
use crate::nca::{bibracket, BivariateSeries, Derivation, TruncatedSeries, MAX_CAP};
use crate::specfun::{EisensteinCache, SpecfunConfig};
use crate::{Error, Result, C64, TWO_PI_I};

/// The two coordinate coefficients of the connection at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Omega {
    pub xi: ConnOperator,
    pub tau: ConnOperator,
}

/// Builder for the connection coefficients at truncation degree `cap`.
#[derive(Clone, Debug)]
pub struct Kzb {
    cap: usize,
    /// `ad_t^k (A)` for `k = 0..cap-1`.
    ad_a: Vec<TruncatedSeries>,
    psi_t_sign: f64,
}

impl Kzb {
    pub fn new(cap: usize) -> Result<Self> {
        if cap == 0 || cap > MAX_CAP {
            return Err(Error::CapTooLarge(cap));
        }
        let t = TruncatedSeries::t(cap);
        let mut ad_a = vec![TruncatedSeries::a(cap)];
        for k in 1..cap {
            ad_a.push(t.lie_bracket(&ad_a[k - 1])?);
        }
        Ok(Kzb { cap, ad_a, psi_t_sign: 1.0 })
    }

    /// Same connection with the sign of `psi_t` reversed. Only useful as a
    /// negative control: the result is not flat.
    pub fn with_flipped_psi_t(mut self) -> Self {
        self.psi_t_sign = -self.psi_t_sign;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of Eisenstein series a cache needs for this builder.
    pub fn kmax(&self) -> usize {
        self.cap.max(2)
    }

    pub fn cache(&self, tau: C64, config: SpecfunConfig) -> Result<EisensteinCache> {
        EisensteinCache::new(tau, self.kmax(), config)
    }

    fn check_cache(&self, c: &EisensteinCache) -> Result<()> {
        if c.kmax() < self.kmax() {
            return Err(Error::CacheCapacity { have: c.kmax(), need: self.kmax() });
        }
        Ok(())
    }

    /// `sum_k coeffs[k] ad_t^k (A)`.
    pub fn ad_t_series_of_a(&self, coeffs: &[C64]) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.cap);
        for (k, c) in coeffs.iter().enumerate().take(self.cap) {
            out.axpy(*c, &self.ad_a[k]);
        }
        out
    }

    /// Coefficients of `-G(alpha)` and `-(1/2 pi i)(G' - (G-1)/alpha)`.
    pub fn nu_scalar_coefficients(&self, c: &EisensteinCache, xi: C64) -> Result<(Vec<C64>, Vec<C64>)> {
        self.check_cache(c)?;
        let g = c.g_coefficients(xi, self.cap)?;
        let xi_c: Vec<C64> = g.iter().take(self.cap).map(|v| -v).collect();
        let tau_c: Vec<C64> = (0..self.cap).map(|j| -(g[j + 1] * j as f64) / TWO_PI_I).collect();
        Ok((xi_c, tau_c))
    }

    /// `(nu_xi, nu_tau)` at `xi`.
    pub fn nu(&self, c: &EisensteinCache, xi: C64) -> Result<(ConnOperator, ConnOperator)> {
        let (a, b) = self.nu_scalar_coefficients(c, xi)?;
        Ok((
            ConnOperator::from_left(self.ad_t_series_of_a(&a)),
            ConnOperator::from_left(self.ad_t_series_of_a(&b)),
        ))
    }

    pub fn nu_xi(&self, c: &EisensteinCache, xi: C64) -> Result<ConnOperator> {
        Ok(self.nu(c, xi)?.0)
    }

    pub fn nu_tau(&self, c: &EisensteinCache, xi: C64) -> Result<ConnOperator> {
        Ok(self.nu(c, xi)?.1)
    }

    /// Kernel `f` with `psi_A(A) = f[[A, A]]`: the expansion of
    /// `-(1/2)(1/2 pi i) XY/(X+Y) (wp~(X) - wp~(Y))`, `wp~(z) = sum_{k>=4} (k-1) e_k z^{k-2}`.
    pub fn psi_a_kernel(&self, c: &EisensteinCache) -> Result<BivariateSeries> {
        self.check_cache(c)?;
        let cap = self.cap.saturating_sub(2);
        let mut f = BivariateSeries::zero(cap);
        for k in (4..=(cap + 1)).step_by(2) {
            let ek = c.e(k)?;
            let base = -0.5 * (k as f64 - 1.0) * ek / TWO_PI_I;
            for j in 1..(k - 1) {
                let i = k - 1 - j;
                let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
                f.set(i, j, base * sign);
            }
        }
        Ok(f)
    }

    pub fn psi_a(&self, c: &EisensteinCache) -> Result<ConnOperator> {
        let f = self.psi_a_kernel(c)?;
        let a = TruncatedSeries::a(self.cap);
        let img = bibracket(&f, &a, &a, &TruncatedSeries::t(self.cap))?;
        Ok(ConnOperator::from_der(Derivation::new(TruncatedSeries::zero(self.cap), img)?))
    }

    /// `t -> -(1/2 pi i) A`, `A -> 0`.
    pub fn psi_t(&self) -> ConnOperator {
        let img = TruncatedSeries::a(self.cap).scale(-self.psi_t_sign / TWO_PI_I);
        ConnOperator::from_der(Derivation { image_t: img, image_a: TruncatedSeries::zero(self.cap) })
    }

    pub fn omega(&self, c: &EisensteinCache, xi: C64) -> Result<Omega> {
        let (nx, nt) = self.nu(c, xi)?;
        let tau = nt.checked_add(&self.psi_a(c)?)?.checked_add(&self.psi_t())?;
        Ok(Omega { xi: nx, tau })
    }
}

/// Scalar-valued series in `tau`, used for twists.
pub type TauSeries = Arc<dyn Fn(C64) -> Result<TruncatedSeries> + Send + Sync>;

/// Anything that can produce connection coefficients at `(xi, tau)`.
pub trait FormEval: Sync {
    fn cap(&self) -> usize;
    fn eval(&self, xi: C64, tau: C64) -> Result<Omega>;
}

/// The connection, optionally twisted by right multiplications.
#[derive(Clone)]
pub struct ConnForm {
    kzb: Kzb,
    config: SpecfunConfig,
    twists: Vec<TauSeries>,
}

impl ConnForm {
    pub fn new(kzb: Kzb, config: SpecfunConfig) -> Self {
        ConnForm { kzb, config, twists: Vec::new() }
    }

    pub fn kzb(&self) -> &Kzb {
        &self.kzb
    }

    pub fn config(&self) -> &SpecfunConfig {
        &self.config
    }

    /// Twist by `mu`: right multiplication by `mu(tau)` is subtracted from
    /// the `dtau` coefficient.
    pub fn twist(&self, mu: TauSeries) -> ConnForm {
        let mut out = self.clone();
        out.twists.push(mu);
        out
    }

    pub fn eval_with_cache(&self, c: &EisensteinCache, xi: C64) -> Result<Omega> {
        let mut om = self.kzb.omega(c, xi)?;
        for mu in &self.twists {
            let m = mu(c.tau)?;
            om.tau.right -= &m;
        }
        Ok(om)
    }
}

impl FormEval for ConnForm {
    fn cap(&self) -> usize {
        self.kzb.cap
    }

    fn eval(&self, xi: C64, tau: C64) -> Result<Omega> {
        let c = self.kzb.cache(tau, self.config)?;
        self.eval_with_cache(&c, xi)
    }
}

/// A holomorphic section `tau -> sigma(tau)` of the family of curves.
pub trait Section: Send + Sync {
    fn value(&self, tau: C64) -> C64;
    fn derivative(&self, tau: C64) -> C64;
}

/// `sigma(tau) = a tau + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineSection {
    pub a: C64,
    pub b: C64,
}

impl AffineSection {
    pub fn constant(b: C64) -> Self {
        AffineSection { a: C64::new(0.0, 0.0), b }
    }
}

impl Section for AffineSection {
    fn value(&self, tau: C64) -> C64 {
        self.a * tau + self.b
    }

    fn derivative(&self, _tau: C64) -> C64 {
        self.a
    }
}

/// Section given by a closure; the derivative uses central differences.
pub struct FnSection<F> {
    pub f: F,
    pub h: f64,
}

impl<F: Fn(C64) -> C64 + Send + Sync> Section for FnSection<F> {
    fn value(&self, tau: C64) -> C64 {
        (self.f)(tau)
    }

    fn derivative(&self, tau: C64) -> C64 {
        ((self.f)(tau + self.h) - (self.f)(tau - self.h)) / (2.0 * self.h)
    }
}

/// Pullback of `nu` along a section: `nu_tau(sigma, tau) + sigma' nu_xi(sigma, tau)`.
/// `c` is the cache at `tau`.
pub fn nu_section(kzb: &Kzb, section: &dyn Section, c: &EisensteinCache) -> Result<ConnOperator> {
    let s = section.value(c.tau);
    let (nx, nt) = kzb.nu(c, s)?;
    nt.checked_add(&nx.scale(section.derivative(c.tau)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nca::{is_primitive, Word};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn nu_xi_low_degree_coefficients() {
        let kzb = Kzb::new(6).unwrap();
        let cc = kzb.cache(c(0.1, 1.2), SpecfunConfig::default()).unwrap();
        let xi = c(0.23, 0.11);
        let nx = kzb.nu_xi(&cc, xi).unwrap();
        assert!(nx.der.is_zero());
        let e1 = cc.e1(xi).unwrap();
        assert!((nx.left.coeff_str("A").unwrap() + 1.0).norm() < 1e-15);
        assert!((nx.left.coeff_str("tA").unwrap() + e1).norm() < 1e-10);
        assert!((nx.left.coeff_str("At").unwrap() - e1).norm() < 1e-10);
    }

    #[test]
    fn nu_tau_matches_scalar_function() {
        // h(alpha) = alpha F2'(xi, alpha) + 1/alpha, regular at 0
        let kzb = Kzb::new(12).unwrap();
        let cc = kzb.cache(c(0.0, 1.1), SpecfunConfig::default()).unwrap();
        let xi = c(0.3, 0.1);
        let (_, tc) = kzb.nu_scalar_coefficients(&cc, xi).unwrap();
        let al = c(0.05, 0.0);
        let series: C64 = tc.iter().enumerate().map(|(j, v)| -TWO_PI_I * v * al.powi(j as i32)).sum();
        let direct = al * cc.kronecker_f2prime(xi, al).unwrap() + 1.0 / al;
        assert!((series - direct).norm() < 1e-7, "{series} vs {direct}");
        // coefficient of A vanishes; that of [t, A] is -g_2/(2 pi i)
        assert_eq!(tc[0], c(0.0, 0.0));
        let g = cc.g_coefficients(xi, 3).unwrap();
        assert!((tc[1] + g[2] / TWO_PI_I).norm() < 1e-14);
    }

    #[test]
    fn psi_terms() {
        let kzb = Kzb::new(6).unwrap();
        let cc = kzb.cache(c(0.2, 1.0), SpecfunConfig::default()).unwrap();
        let pt = kzb.psi_t();
        let t = TruncatedSeries::t(6);
        let a = TruncatedSeries::a(6);
        assert!(pt.der.image_t.sup_diff(&a.scale(-1.0 / TWO_PI_I)) < 1e-16);
        assert!(pt.der.image_a.is_zero());
        let tt = &t * &t;
        let expected = (&a * &t + &t * &a).scale(-1.0 / TWO_PI_I);
        assert!(pt.apply(&tt).unwrap().sup_diff(&expected) < 1e-16);

        let pa = kzb.psi_a(&cc).unwrap();
        let ad1 = t.lie_bracket(&a).unwrap();
        let ad2 = t.lie_bracket(&ad1).unwrap();
        let lowest = ad2.lie_bracket(&ad1).unwrap().scale(-3.0 * cc.e(4).unwrap() / TWO_PI_I);
        // at N = 6 the only other contribution has degree 6 (k = 6 would need degree 7)
        let deg5 = pa.der.image_a.weight_filtration(-5);
        assert!(deg5.sup_diff(&lowest) < 1e-10);
        assert!(is_primitive(&pa.der.image_a, 1e-12));
        // antisymmetric kernel: swapping the variables flips the sign
        let f = kzb.psi_a_kernel(&cc).unwrap();
        assert!(f.swap().max_abs_diff(&f.scale(c(-1.0, 0.0))) < 1e-15);
        let swapped = bibracket(&f.swap(), &a, &a, &t).unwrap();
        assert!(swapped.sup_diff(&-&pa.der.image_a) < 1e-14);
        let by_bracket_swap = {
            let mut s = TruncatedSeries::zero(6);
            for i in 0..=f.cap() {
                for j in 0..=(f.cap() - i) {
                    let l = TruncatedSeries::ad_pow(&t, j, &a).unwrap();
                    let r = TruncatedSeries::ad_pow(&t, i, &a).unwrap();
                    s.axpy(f.get(j, i), &l.lie_bracket(&r).unwrap());
                }
            }
            s
        };
        assert!(by_bracket_swap.sup_diff(&pa.der.image_a) < 1e-14);
    }

    #[test]
    fn omega_components_are_primitive() {
        let kzb = Kzb::new(6).unwrap();
        let cc = kzb.cache(c(-0.2, 0.9), SpecfunConfig::default()).unwrap();
        let om = kzb.omega(&cc, c(0.17, -0.21)).unwrap();
        assert!(om.xi.der.is_zero());
        for s in [&om.xi.left, &om.tau.left, &om.tau.der.image_t, &om.tau.der.image_a] {
            assert!(is_primitive(s, 1e-10));
        }
        // xi-periodicity
        let om1 = kzb.omega(&cc, c(1.17, -0.21)).unwrap();
        assert!(om1.xi.action_residual(&om.xi).unwrap() < 1e-10);
        assert!(om1.tau.action_residual(&om.tau).unwrap() < 1e-10);
        let _ = Word::EMPTY;
    }

    #[test]
    fn sections() {
        let kzb = Kzb::new(5).unwrap();
        let tau = c(0.1, 1.2);
        let cc = kzb.cache(tau, SpecfunConfig::default()).unwrap();
        let konst = AffineSection::constant(c(0.5, 0.0));
        let a = nu_section(&kzb, &konst, &cc).unwrap();
        assert!(a.action_residual(&kzb.nu_tau(&cc, c(0.5, 0.0)).unwrap()).unwrap() == 0.0);
        let aff = AffineSection { a: c(1.0 / 3.0, 0.0), b: c(0.0, 0.0) };
        let fns = FnSection { f: |t: C64| t / 3.0, h: 1e-5 };
        let x = nu_section(&kzb, &aff, &cc).unwrap();
        let y = nu_section(&kzb, &fns, &cc).unwrap();
        assert!(x.action_residual(&y).unwrap() < 1e-8);
    }
}
