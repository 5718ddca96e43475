//! Fixed tables used by the q-series: Eulerian numbers for the
//! polylogarithms of negative index, the polynomials expressing the
//! derivatives of `cot`, and even zeta values.

use crate::C64;

#[derive(Clone, Debug)]
pub(crate) struct Tables {
    /// `eulerian[m][i] = A(m, i)`.
    eulerian: Vec<Vec<f64>>,
    /// `cot_poly[m]` are the coefficients of `P_m` with
    /// `d^m/dx^m cot(x) = P_m(cot x)`.
    cot_poly: Vec<Vec<f64>>,
    pub factorial: Vec<f64>,
}

impl Tables {
    pub fn new(kmax: usize) -> Self {
        let m_max = kmax.max(2);
        let mut eulerian = vec![vec![1.0]];
        for m in 1..=m_max {
            let prev = &eulerian[m - 1];
            let mut row = vec![0.0; m];
            for (i, r) in row.iter_mut().enumerate() {
                let a = if i < prev.len() { (i + 1) as f64 * prev[i] } else { 0.0 };
                let b = if i >= 1 && i - 1 < prev.len() { (m - i) as f64 * prev[i - 1] } else { 0.0 };
                *r = a + b;
            }
            if m == 1 {
                row = vec![1.0];
            }
            eulerian.push(row);
        }
        let mut cot_poly = vec![vec![0.0, 1.0]];
        for m in 0..m_max {
            // P_{m+1} = -(1 + c^2) P_m'
            let p = &cot_poly[m];
            let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(i, a)| i as f64 * a).collect();
            let mut next = vec![0.0; dp.len() + 2];
            for (i, a) in dp.iter().enumerate() {
                next[i] -= a;
                next[i + 2] -= a;
            }
            cot_poly.push(next);
        }
        let mut factorial = vec![1.0];
        for k in 1..=(m_max + 2) {
            factorial.push(factorial[k - 1] * k as f64);
        }
        Tables { eulerian, cot_poly, factorial }
    }

    pub fn capacity(&self) -> usize {
        self.eulerian.len() - 1
    }

    /// `Li_{-m}(w) = sum_{n >= 1} n^m w^n`, continued to `|w| > 1`.
    pub fn li_neg(&self, m: usize, w: C64) -> C64 {
        if w.norm_sqr() > 1.0 {
            let inv = w.inv();
            let v = self.li_neg_inner(m, inv);
            return if m == 0 {
                -1.0 - v
            } else if m % 2 == 0 {
                -v
            } else {
                v
            };
        }
        self.li_neg_inner(m, w)
    }

    fn li_neg_inner(&self, m: usize, w: C64) -> C64 {
        let one_minus = C64::new(1.0, 0.0) - w;
        if m == 0 {
            return w / one_minus;
        }
        let row = &self.eulerian[m];
        let mut poly = C64::new(0.0, 0.0);
        for a in row.iter().rev() {
            poly = poly * w + a;
        }
        w * poly / one_minus.powi(m as i32 + 1)
    }

    /// `P_m(c)`.
    pub fn cot_poly(&self, m: usize, c: C64) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        for a in self.cot_poly[m].iter().rev() {
            v = v * c + a;
        }
        v
    }
}

/// `zeta(k)` for `k >= 2` by Euler-Maclaurin summation.
pub(crate) fn zeta(k: usize) -> f64 {
    let s = k as f64;
    let m = 128usize;
    let mut sum = 0.0;
    for n in (1..m).rev() {
        sum += (n as f64).powf(-s);
    }
    let mf = m as f64;
    sum + mf.powf(1.0 - s) / (s - 1.0) + 0.5 * mf.powf(-s) + s / 12.0 * mf.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * mf.powf(-s - 3.0)
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * mf.powf(-s - 5.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_values() {
        assert!((zeta(2) - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta(4) - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta(6) - PI.powi(6) / 945.0).abs() < 1e-15);
        assert!((zeta(12) - 691.0 * PI.powi(12) / 638512875.0).abs() < 1e-14);
    }

    #[test]
    fn negative_polylog_matches_series() {
        let t = Tables::new(8);
        let w = C64::new(0.3, -0.2);
        for m in 0..=8usize {
            let mut direct = C64::new(0.0, 0.0);
            let mut wn = w;
            for n in 1..400 {
                direct += wn * (n as f64).powi(m as i32);
                wn *= w;
            }
            assert!((t.li_neg(m, w) - direct).norm() < 1e-12 * (1.0 + direct.norm()), "m={m}");
        }
    }

    #[test]
    fn negative_polylog_inversion() {
        // Li_{-m}(w) is a rational function; compare the continued value with
        // the closed form evaluated directly outside the unit disc.
        let t = Tables::new(6);
        let w = C64::new(1.7, 0.9);
        for m in 0..=6usize {
            let direct = t.li_neg_inner(m, w);
            assert!((t.li_neg(m, w) - direct).norm() < 1e-12 * (1.0 + direct.norm()), "m={m}");
        }
    }

    #[test]
    fn cot_derivatives() {
        // compare with finite differences of cot
        let t = Tables::new(4);
        let x = 0.37f64;
        let cot = |x: f64| 1.0 / x.tan();
        let h = 1e-4;
        let d1 = (cot(x + h) - cot(x - h)) / (2.0 * h);
        let d2 = (cot(x + h) - 2.0 * cot(x) + cot(x - h)) / (h * h);
        let c = C64::new(cot(x), 0.0);
        assert!((t.cot_poly(1, c).re - d1).abs() < 1e-6);
        assert!((t.cot_poly(2, c).re - d2).abs() < 1e-5);
    }
}
