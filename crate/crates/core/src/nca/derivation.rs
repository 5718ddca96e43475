use super::{block_offset, bibracket, divided_difference, ad_series, BivariateSeries, Letter, TruncatedSeries};
use crate::{Error, Result, C64};

/// Derivation of the free algebra, fixed by the images of the two letters.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    pub image_t: TruncatedSeries,
    pub image_a: TruncatedSeries,
}

impl Derivation {
    pub fn new(image_t: TruncatedSeries, image_a: TruncatedSeries) -> Result<Self> {
        if image_t.cap() != image_a.cap() {
            return Err(Error::CapMismatch { left: image_t.cap(), right: image_a.cap() });
        }
        Ok(Derivation { image_t, image_a })
    }

    pub fn zero(cap: usize) -> Self {
        Derivation { image_t: TruncatedSeries::zero(cap), image_a: TruncatedSeries::zero(cap) }
    }

    /// `t d/dt - A d/dA` style diagonal derivations: `t -> a t`, `A -> b A`.
    pub fn diagonal(cap: usize, a: C64, b: C64) -> Self {
        Derivation { image_t: TruncatedSeries::t(cap).scale(a), image_a: TruncatedSeries::a(cap).scale(b) }
    }

    pub fn cap(&self) -> usize {
        self.image_t.cap()
    }

    pub fn is_zero(&self) -> bool {
        self.image_t.is_zero() && self.image_a.is_zero()
    }

    pub fn image(&self, l: Letter) -> &TruncatedSeries {
        match l {
            Letter::T => &self.image_t,
            Letter::A => &self.image_a,
        }
    }

    /// Leibniz extension applied to `x`.
    pub fn apply(&self, x: &TruncatedSeries) -> Result<TruncatedSeries> {
        let n = x.cap();
        if n != self.cap() {
            return Err(Error::CapMismatch { left: self.cap(), right: n });
        }
        let mut out = TruncatedSeries::zero(n);
        if self.is_zero() {
            return Ok(out);
        }
        let out_c = out.coeffs_mut();
        for d in 1..=n {
            let blk = x.block(d);
            for (code, &c) in blk.iter().enumerate() {
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                // split the word at position p: prefix (p letters), letter, suffix (s letters)
                for p in 0..d {
                    let s = d - p - 1;
                    let letter = Letter::from_bit(code >> s);
                    let prefix = code >> (s + 1);
                    let suffix = code & ((1usize << s) - 1);
                    let img = self.image(letter);
                    for k in 0..=(n - p - s) {
                        let iblk = img.block(k);
                        let dst = block_offset(p + k + s);
                        let hi = prefix << (k + s);
                        for (v, &iv) in iblk.iter().enumerate() {
                            if iv != C64::new(0.0, 0.0) {
                                out_c[dst + (hi | (v << s) | suffix)] += c * iv;
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Commutator `[self, other] = self o other - other o self`.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation> {
        let it = self.apply(&other.image_t)?.checked_sub(&other.apply(&self.image_t)?)?;
        let ia = self.apply(&other.image_a)?.checked_sub(&other.apply(&self.image_a)?)?;
        Ok(Derivation { image_t: it, image_a: ia })
    }

    pub fn scale(&self, c: C64) -> Derivation {
        Derivation { image_t: self.image_t.scale(c), image_a: self.image_a.scale(c) }
    }

    pub fn checked_add(&self, other: &Derivation) -> Result<Derivation> {
        Ok(Derivation {
            image_t: self.image_t.checked_add(&other.image_t)?,
            image_a: self.image_a.checked_add(&other.image_a)?,
        })
    }

    pub fn checked_sub(&self, other: &Derivation) -> Result<Derivation> {
        Ok(Derivation {
            image_t: self.image_t.checked_sub(&other.image_t)?,
            image_a: self.image_a.checked_sub(&other.image_a)?,
        })
    }

    /// `phi o self o phi^{-1}`.
    pub fn conjugate(&self, phi: &Substitution, phi_inv: &Substitution) -> Result<Derivation> {
        let it = phi.apply(&self.apply(&phi_inv.image_t)?)?;
        let ia = phi.apply(&self.apply(&phi_inv.image_a)?)?;
        Ok(Derivation { image_t: it, image_a: ia })
    }
}

/// Algebra endomorphism given by the images of the letters.
#[derive(Clone, Debug, PartialEq)]
pub struct Substitution {
    pub image_t: TruncatedSeries,
    pub image_a: TruncatedSeries,
}

impl Substitution {
    pub fn new(image_t: TruncatedSeries, image_a: TruncatedSeries) -> Result<Self> {
        if image_t.cap() != image_a.cap() {
            return Err(Error::CapMismatch { left: image_t.cap(), right: image_a.cap() });
        }
        Ok(Substitution { image_t, image_a })
    }

    pub fn identity(cap: usize) -> Self {
        Substitution { image_t: TruncatedSeries::t(cap), image_a: TruncatedSeries::a(cap) }
    }

    pub fn apply(&self, x: &TruncatedSeries) -> Result<TruncatedSeries> {
        x.substitute(&self.image_t, &self.image_a)
    }

    /// `self o other`.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution> {
        Ok(Substitution { image_t: self.apply(&other.image_t)?, image_a: self.apply(&other.image_a)? })
    }
}

/// Sup-coefficient of `ad_t(f[[B,C]]) - ((X+Y) f)[[B,C]]`.
pub fn jacobi_residual(
    f: &BivariateSeries,
    b: &TruncatedSeries,
    c: &TruncatedSeries,
    t: &TruncatedSeries,
) -> Result<f64> {
    let lhs = t.lie_bracket(&bibracket(f, b, c, t)?)?;
    let rhs = bibracket(&f.mul_x_plus_y(), b, c, t)?;
    Ok(lhs.sup_diff(&rhs))
}

/// Sup-coefficient of
/// `D(f(ad_t)B) - ((f(X+Y) - f(Y))/X)[[D(t), B]] - f(ad_t) D(B)`.
pub fn derivation_of_adseries_residual(
    d: &Derivation,
    f: &[C64],
    b: &TruncatedSeries,
    t: &TruncatedSeries,
) -> Result<f64> {
    let lhs = d.apply(&ad_series(t, f, b)?)?;
    let kernel = divided_difference(f, b.cap());
    let rhs = bibracket(&kernel, &d.apply(t)?, b, t)?.checked_add(&ad_series(t, f, &d.apply(b)?)?)?;
    Ok(lhs.sup_diff(&rhs))
}

/// Sup-coefficient of `D(exp x) - exp(x) ((1 - exp(-ad_x))/ad_x)(D x)` for
/// `x` without constant term.
pub fn exp_derivation_residual(d: &Derivation, x: &TruncatedSeries) -> Result<f64> {
    let n = x.cap();
    let e = x.exp_trunc()?;
    let lhs = d.apply(&e)?;
    // (1 - exp(-X))/X = sum_k (-1)^k X^k/(k+1)!
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut fact = 1.0;
    for k in 0..=n {
        fact *= (k + 1) as f64;
        coeffs.push(C64::new(if k % 2 == 0 { 1.0 } else { -1.0 } / fact, 0.0));
    }
    let rhs = e.checked_mul(&ad_series(x, &coeffs, &d.apply(x)?)?)?;
    Ok(lhs.sup_diff(&rhs))
}
