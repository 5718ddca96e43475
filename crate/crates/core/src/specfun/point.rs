use crate::{Error, Result, C64, TWO_PI_I};

/// A point of the upper half-plane together with its nome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularPoint {
    pub tau: C64,
    pub q: C64,
}

impl ModularPoint {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(Error::Divergence(tau.im));
        }
        Ok(ModularPoint { tau, q: (TWO_PI_I * tau).exp() })
    }
}

/// A point of the fiber `C / (Z tau + Z)`, lifted to `C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    pub xi: C64,
    pub tau: C64,
    pub z: C64,
    pub lattice_distance: f64,
}

impl TorusPoint {
    pub fn new(xi: C64, tau: C64) -> Self {
        TorusPoint { xi, tau, z: (TWO_PI_I * xi).exp(), lattice_distance: lattice_distance(xi, tau) }
    }
}

/// Distance from `xi` to the nearest point of `Z tau + Z`.
pub fn lattice_distance(xi: C64, tau: C64) -> f64 {
    let n0 = (xi.im / tau.im).round() as i64;
    let mut best = f64::INFINITY;
    for n in (n0 - 2)..=(n0 + 2) {
        let r = xi - tau * n as f64;
        let m0 = r.re.round() as i64;
        for m in (m0 - 1)..=(m0 + 1) {
            best = best.min((r - m as f64).norm());
        }
    }
    best
}

/// Element of `SL2(Z)` acting on `tau` by Moebius transformations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sl2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Sl2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::NotUnimodular { a, b, c, d });
        }
        Ok(Sl2 { a, b, c, d })
    }

    pub const IDENTITY: Sl2 = Sl2 { a: 1, b: 0, c: 0, d: 1 };
    pub const S: Sl2 = Sl2 { a: 0, b: -1, c: 1, d: 0 };
    pub const T: Sl2 = Sl2 { a: 1, b: 1, c: 0, d: 1 };

    /// `c tau + d`.
    pub fn j(&self, tau: C64) -> C64 {
        tau * self.c as f64 + self.d as f64
    }

    pub fn act(&self, tau: C64) -> C64 {
        (tau * self.a as f64 + self.b as f64) / self.j(tau)
    }

    pub fn mul(&self, o: &Sl2) -> Sl2 {
        Sl2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Sl2 {
        Sl2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Product of `S` and `T^{+-1}` letters, e.g. `"STTs"` (`s`, `t` are inverses).
    pub fn from_word(w: &str) -> Result<Sl2> {
        let mut g = Sl2::IDENTITY;
        for ch in w.chars() {
            let m = match ch {
                'S' => Sl2::S,
                's' => Sl2::S.inverse(),
                'T' => Sl2::T,
                't' => Sl2::T.inverse(),
                _ => return Err(Error::InvalidArgument(format!("bad SL2 word {w:?}"))),
            };
            g = g.mul(&m);
        }
        Ok(g)
    }
}
