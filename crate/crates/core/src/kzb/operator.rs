use crate::nca::{Derivation, Substitution, TruncatedSeries, Word};
use crate::{Error, Result, C64};

/// Operator `x -> left x + x right + der(x)` on the truncated algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnOperator {
    pub left: TruncatedSeries,
    pub right: TruncatedSeries,
    pub der: Derivation,
}

impl ConnOperator {
    pub fn zero(cap: usize) -> Self {
        ConnOperator { left: TruncatedSeries::zero(cap), right: TruncatedSeries::zero(cap), der: Derivation::zero(cap) }
    }

    pub fn from_left(left: TruncatedSeries) -> Self {
        let cap = left.cap();
        ConnOperator { left, right: TruncatedSeries::zero(cap), der: Derivation::zero(cap) }
    }

    pub fn from_right(right: TruncatedSeries) -> Self {
        let cap = right.cap();
        ConnOperator { left: TruncatedSeries::zero(cap), right, der: Derivation::zero(cap) }
    }

    pub fn from_der(der: Derivation) -> Self {
        let cap = der.cap();
        ConnOperator { left: TruncatedSeries::zero(cap), right: TruncatedSeries::zero(cap), der }
    }

    pub fn cap(&self) -> usize {
        self.left.cap()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.cap() != n {
            return Err(Error::CapMismatch { left: self.cap(), right: n });
        }
        Ok(())
    }

    pub fn apply(&self, x: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check(x.cap())?;
        let mut out = self.left.checked_mul(x)?;
        if !self.right.is_zero() {
            out += &x.checked_mul(&self.right)?;
        }
        if !self.der.is_zero() {
            out += &self.der.apply(x)?;
        }
        Ok(out)
    }

    /// Commutator `self o other - other o self`, again an operator of this form.
    pub fn bracket(&self, other: &ConnOperator) -> Result<ConnOperator> {
        self.check(other.cap())?;
        let left = self
            .left
            .lie_bracket(&other.left)?
            .checked_add(&self.der.apply(&other.left)?)?
            .checked_sub(&other.der.apply(&self.left)?)?;
        let right = other
            .right
            .lie_bracket(&self.right)?
            .checked_add(&self.der.apply(&other.right)?)?
            .checked_sub(&other.der.apply(&self.right)?)?;
        let der = self.der.commutator(&other.der)?;
        Ok(ConnOperator { left, right, der })
    }

    pub fn checked_add(&self, o: &ConnOperator) -> Result<ConnOperator> {
        Ok(ConnOperator {
            left: self.left.checked_add(&o.left)?,
            right: self.right.checked_add(&o.right)?,
            der: self.der.checked_add(&o.der)?,
        })
    }

    pub fn checked_sub(&self, o: &ConnOperator) -> Result<ConnOperator> {
        Ok(ConnOperator {
            left: self.left.checked_sub(&o.left)?,
            right: self.right.checked_sub(&o.right)?,
            der: self.der.checked_sub(&o.der)?,
        })
    }

    pub fn scale(&self, c: C64) -> ConnOperator {
        ConnOperator { left: self.left.scale(c), right: self.right.scale(c), der: self.der.scale(c) }
    }

    /// `g o self o g^{-1}` for left multiplication by an invertible `g`.
    pub fn conjugate_by_left(&self, g: &TruncatedSeries, g_inv: &TruncatedSeries) -> Result<ConnOperator> {
        let mut left = g.checked_mul(&self.left)?.checked_mul(g_inv)?;
        if !self.der.is_zero() {
            left += &g.checked_mul(&self.der.apply(g_inv)?)?;
        }
        Ok(ConnOperator { left, right: self.right.clone(), der: self.der.clone() })
    }

    /// `phi o self o phi^{-1}` for an algebra automorphism `phi`.
    pub fn conjugate_by_automorphism(&self, phi: &Substitution, phi_inv: &Substitution) -> Result<ConnOperator> {
        Ok(ConnOperator {
            left: phi.apply(&self.left)?,
            right: phi.apply(&self.right)?,
            der: self.der.conjugate(phi, phi_inv)?,
        })
    }

    /// Largest coefficient of `(self - other)(w)` over all words `w` of
    /// length at most `max_len`.
    pub fn action_residual_up_to(&self, other: &ConnOperator, max_len: usize) -> Result<f64> {
        let diff = self.checked_sub(other)?;
        let n = self.cap();
        let mut worst: f64 = 0.0;
        for w in Word::all_up_to(max_len.min(n)) {
            let x = TruncatedSeries::monomial(n, w, C64::new(1.0, 0.0));
            worst = worst.max(diff.apply(&x)?.sup_norm());
        }
        Ok(worst)
    }

    /// [`action_residual_up_to`](Self::action_residual_up_to) over all words.
    pub fn action_residual(&self, other: &ConnOperator) -> Result<f64> {
        self.action_residual_up_to(other, self.cap())
    }

    /// Largest coefficient among the three components.
    pub fn sup_norm(&self) -> f64 {
        self.left
            .sup_norm()
            .max(self.right.sup_norm())
            .max(self.der.image_t.sup_norm())
            .max(self.der.image_a.sup_norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample(n: usize, s: f64) -> ConnOperator {
        ConnOperator {
            left: TruncatedSeries::from_terms(n, [("A", c(1.0, s)), ("tA", c(-0.5, 0.0)), ("At", c(0.5, 0.2))]).unwrap(),
            right: TruncatedSeries::from_terms(n, [("t", c(s, 1.0)), ("AA", c(0.3, 0.0))]).unwrap(),
            der: Derivation::new(
                TruncatedSeries::from_terms(n, [("A", c(0.0, -s))]).unwrap(),
                TruncatedSeries::from_terms(n, [("tA", c(1.0, 0.0)), ("At", c(-1.0, 0.0))]).unwrap(),
            )
            .unwrap(),
        }
    }

    #[test]
    fn bracket_matches_composition() {
        let n = 5;
        let (a, b) = (sample(n, 0.7), sample(n, -1.3));
        let br = a.bracket(&b).unwrap();
        for w in Word::all_up_to(n) {
            let x = TruncatedSeries::monomial(n, w, c(1.0, 0.0));
            let lhs = br.apply(&x).unwrap();
            let rhs = a.apply(&b.apply(&x).unwrap()).unwrap() - b.apply(&a.apply(&x).unwrap()).unwrap();
            assert!(lhs.sup_diff(&rhs) < 1e-12, "{w}");
        }
    }

    #[test]
    fn conjugations_match_composition() {
        let n = 4;
        let op = sample(n, 0.4);
        let x0 = TruncatedSeries::from_terms(n, [("t", c(0.0, 2.0)), ("A", c(1.0, 0.0))]).unwrap();
        let g = x0.exp_trunc().unwrap();
        let g_inv = (-&x0).exp_trunc().unwrap();
        let conj = op.conjugate_by_left(&g, &g_inv).unwrap();
        let phi = Substitution::new(
            TruncatedSeries::t(n).scale(c(2.0, 0.0)),
            TruncatedSeries::from_terms(n, [("A", c(0.5, 0.0)), ("t", c(1.0, 1.0))]).unwrap(),
        )
        .unwrap();
        let phi_inv = Substitution::new(
            TruncatedSeries::t(n).scale(c(0.5, 0.0)),
            TruncatedSeries::from_terms(n, [("A", c(2.0, 0.0)), ("t", c(-1.0, -1.0))]).unwrap(),
        )
        .unwrap();
        assert!(phi.compose(&phi_inv).unwrap().image_a.sup_diff(&TruncatedSeries::a(n)) < 1e-15);
        let conj_phi = op.conjugate_by_automorphism(&phi, &phi_inv).unwrap();
        for w in Word::all_up_to(n) {
            let x = TruncatedSeries::monomial(n, w, c(1.0, 0.0));
            let direct = &g * op.apply(&(&g_inv * &x)).unwrap();
            assert!(conj.apply(&x).unwrap().sup_diff(&direct) < 1e-12);
            let direct = phi.apply(&op.apply(&phi_inv.apply(&x).unwrap()).unwrap()).unwrap();
            assert!(conj_phi.apply(&x).unwrap().sup_diff(&direct) < 1e-12);
        }
    }
}
