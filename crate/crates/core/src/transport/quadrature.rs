use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss-Legendre rule on `[0, 1]` together with its integration matrix:
/// `integral[k][l] = int_0^{nodes[k]} ell_l(s) ds` for the Lagrange basis on
/// the nodes. Collocating `y' = f` with it is exact for polynomials of
/// degree `< n`.
#[derive(Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub integral: Vec<Vec<f64>>,
}

/// `P_0(x) ..= P_n(x)`.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    if n >= 1 {
        p[1] = x;
    }
    for m in 1..n {
        p[m + 1] = ((2 * m + 1) as f64 * x * p[m] - m as f64 * p[m - 1]) / (m + 1) as f64;
    }
    p
}

/// Nodes and weights on `[-1, 1]` by Newton iteration from the Chebyshev guess.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let p = legendre_all(n, z);
            dp = n as f64 * (z * p[n] - p[n - 1]) / (z * z - 1.0);
            let dz = p[n] / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let p = legendre_all(n, z);
                dp = n as f64 * (z * p[n] - p[n - 1]) / (z * z - 1.0);
                break;
            }
        }
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

impl Rule {
    pub fn new(n: usize) -> Rule {
        assert!(n >= 1);
        let (x, w) = gauss_legendre(n);
        let p: Vec<Vec<f64>> = x.iter().map(|&xi| legendre_all(n, xi)).collect();
        // ell_l = w_l sum_m (2m+1)/2 P_m(x_l) P_m, and
        // int_{-1}^x P_m = (P_{m+1} - P_{m-1})/(2m+1), int_{-1}^x P_0 = x + 1
        let mut integral = vec![vec![0.0; n]; n];
        for k in 0..n {
            for l in 0..n {
                let mut s = 0.5 * (x[k] + 1.0);
                for m in 1..n {
                    s += 0.5 * p[l][m] * (p[k][m + 1] - p[k][m - 1]);
                }
                // map [-1,1] to [0,1]
                integral[k][l] = 0.5 * w[l] * s;
            }
        }
        Rule {
            nodes: x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
            weights: w.iter().map(|v| 0.5 * v).collect(),
            integral,
        }
    }

    /// Shared rule for `n` nodes.
    pub fn cached(n: usize) -> Arc<Rule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
        let map = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().unwrap_or_else(|e| e.into_inner());
        guard.entry(n).or_insert_with(|| Arc::new(Rule::new(n))).clone()
    }
}
