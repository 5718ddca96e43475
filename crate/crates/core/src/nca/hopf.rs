use super::{TruncatedSeries, Word};
use crate::C64;

/// Element of `R (x) R` restricted to pairs of words with total length at
/// most `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSeries {
    cap: usize,
    offsets: Vec<Vec<usize>>,
    coeffs: Vec<C64>,
}

impl TensorSeries {
    pub fn zero(cap: usize) -> Self {
        let mut offsets = Vec::with_capacity(cap + 1);
        let mut off = 0;
        for d1 in 0..=cap {
            let mut row = Vec::with_capacity(cap + 1 - d1);
            for d2 in 0..=(cap - d1) {
                row.push(off);
                off += 1usize << (d1 + d2);
            }
            offsets.push(row);
        }
        TensorSeries { cap, offsets, coeffs: vec![C64::new(0.0, 0.0); off] }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn index(&self, u: &Word, v: &Word) -> Option<usize> {
        if u.len() + v.len() > self.cap {
            return None;
        }
        Some(self.offsets[u.len()][v.len()] + ((u.code() << v.len()) | v.code()))
    }

    pub fn get(&self, u: &Word, v: &Word) -> C64 {
        self.index(u, v).map_or(C64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    fn add_at(&mut self, u: &Word, v: &Word, c: C64) {
        if let Some(i) = self.index(u, v) {
            self.coeffs[i] += c;
        }
    }

    /// `x (x) y`, restricted to the stored pairs.
    pub fn outer(x: &TruncatedSeries, y: &TruncatedSeries) -> Self {
        let mut out = Self::zero(x.cap());
        for (u, a) in x.terms() {
            for (v, b) in y.terms() {
                out.add_at(&u, &v, a * b);
            }
        }
        out
    }

    pub fn sup_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.cap, other.cap, "truncation mismatch");
        self.coeffs.iter().zip(&other.coeffs).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Nonzero entries as `(left word, right word, coefficient)`.
    pub fn terms(&self) -> Vec<(Word, Word, C64)> {
        let mut out = Vec::new();
        for d1 in 0..=self.cap {
            for d2 in 0..=(self.cap - d1) {
                let off = self.offsets[d1][d2];
                for code in 0..(1usize << (d1 + d2)) {
                    let c = self.coeffs[off + code];
                    if c != C64::new(0.0, 0.0) {
                        out.push((Word::from_code(d1, code >> d2), Word::from_code(d2, code & ((1 << d2) - 1)), c));
                    }
                }
            }
        }
        out
    }
}

/// Deshuffle coproduct: `t` and `A` are primitive.
pub fn coproduct(x: &TruncatedSeries) -> TensorSeries {
    let mut out = TensorSeries::zero(x.cap());
    for (w, c) in x.terms() {
        let d = w.len();
        for mask in 0..(1usize << d) {
            let (mut lc, mut ll, mut rc, mut rl) = (0usize, 0usize, 0usize, 0usize);
            for p in 0..d {
                let bit = (w.code() >> (d - 1 - p)) & 1;
                if (mask >> (d - 1 - p)) & 1 == 1 {
                    lc = (lc << 1) | bit;
                    ll += 1;
                } else {
                    rc = (rc << 1) | bit;
                    rl += 1;
                }
            }
            out.add_at(&Word::from_code(ll, lc), &Word::from_code(rl, rc), c);
        }
    }
    out
}

/// Largest deviation of `Delta x` from `x (x) 1 + 1 (x) x`.
pub fn primitive_defect(x: &TruncatedSeries) -> f64 {
    let one = TruncatedSeries::one(x.cap());
    let mut expected = TensorSeries::outer(x, &one);
    let right = TensorSeries::outer(&one, x);
    for (e, r) in expected.coeffs.iter_mut().zip(&right.coeffs) {
        *e += r;
    }
    coproduct(x).sup_diff(&expected)
}

pub fn is_primitive(x: &TruncatedSeries, tol: f64) -> bool {
    primitive_defect(x) <= tol
}

/// Largest deviation of `Delta g` from `g (x) g`, including the constant term.
pub fn grouplike_defect(g: &TruncatedSeries) -> f64 {
    let d = coproduct(g).sup_diff(&TensorSeries::outer(g, g));
    d.max((g.constant_term() - C64::new(1.0, 0.0)).norm())
}

pub fn is_grouplike(g: &TruncatedSeries, tol: f64) -> bool {
    grouplike_defect(g) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn letters_are_primitive() {
        let d = coproduct(&TruncatedSeries::t(3));
        let terms = d.terms();
        assert_eq!(terms.len(), 2);
        assert_eq!(d.get(&w("t"), &w("")), c(1.0));
        assert_eq!(d.get(&w(""), &w("t")), c(1.0));
    }

    #[test]
    fn coproduct_of_ta() {
        let x = TruncatedSeries::from_terms(3, [("tA", c(1.0))]).unwrap();
        let d = coproduct(&x);
        assert_eq!(d.terms().len(), 4);
        for (u, v) in [("tA", ""), ("t", "A"), ("A", "t"), ("", "tA")] {
            assert_eq!(d.get(&w(u), &w(v)), c(1.0));
        }
    }

    #[test]
    fn primitive_and_grouplike() {
        let n = 5;
        let t = TruncatedSeries::t(n);
        let a = TruncatedSeries::a(n);
        let ta = t.lie_bracket(&a).unwrap();
        assert!(is_primitive(&t.lie_bracket(&ta).unwrap(), 1e-14));
        assert!(!is_primitive(&(&t * &a), 1e-3));
        assert!(is_grouplike(&t.exp_trunc().unwrap(), 1e-12));
        assert!(is_grouplike(&ta.exp_trunc().unwrap(), 1e-12));
        assert!(!is_grouplike(&(TruncatedSeries::one(n) + &t), 1e-3));
    }
}
