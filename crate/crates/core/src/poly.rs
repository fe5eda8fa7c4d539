//! Laurent polynomials in `q` with arbitrary-precision integer coefficients.
//!
//! - `QPolynomial` is the generating-function type produced by the weighted
//!   counting oracle: a sparse exponent -> coefficient map.
//! - JSON form is an object `{"exponent": "coefficient"}` with both sides as
//!   decimal strings, so coefficients survive 64-bit boundaries unharmed.
//! - `RawFrac` is an *unreduced* fraction used internally by the product
//!   formulas. Equality is decided by cross-multiplication; gcd reduction is
//!   deferred to the API edge, which matters on a single core.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A Laurent polynomial in `q` over the integers.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QPolynomial {
    terms: BTreeMap<i64, BigInt>,
}

impl QPolynomial {
    pub fn zero() -> Self {
        QPolynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    /// `coeff * q^exp`; the zero coefficient produces the zero polynomial.
    pub fn monomial(exp: i64, coeff: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        QPolynomial { terms }
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        Self::monomial(0, n.into())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn add_term(&mut self, exp: i64, coeff: &BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    /// The polynomial multiplied by `q^k`.
    pub fn shifted(&self, k: i64) -> Self {
        QPolynomial {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Schoolbook product; fine at the term counts this crate produces.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = QPolynomial::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }

    /// Value at `q = 1`, i.e. the coefficient sum.
    pub fn at_one(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.terms.values() {
            acc += c;
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, q: &BigRational) -> BigRational {
        let f = self.eval_frac(q.numer(), q.denom());
        f.into_rational()
    }

    /// Exact evaluation at `q = u/v` as an unreduced fraction.
    ///
    /// Descending Horner over the dense exponent range; the accumulator is
    /// multiplied by small integers only, which keeps every step linear in the
    /// operand size.
    pub fn eval_frac(&self, u: &BigInt, v: &BigInt) -> RawFrac {
        let (lo, hi) = match (self.low_degree(), self.degree()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return RawFrac::from_int(BigInt::zero()),
        };
        let span = (hi - lo) as usize;
        // vpow[k] = v^k
        let mut vpow = Vec::with_capacity(span + 1);
        vpow.push(BigInt::one());
        for k in 1..=span {
            let next = &vpow[k - 1] * v;
            vpow.push(next);
        }
        let mut acc = BigInt::zero();
        for e in (lo..=hi).rev() {
            acc *= u;
            if let Some(c) = self.terms.get(&e) {
                acc += c * &vpow[(hi - e) as usize];
            }
        }
        // acc / v^span evaluates P(q) / q^lo; reinstate q^lo.
        let mut f = RawFrac { num: acc, den: vpow.pop().unwrap() };
        f.mul_monomial(u, v, lo);
        f
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            match e {
                0 => write!(f, "{}", c)?,
                1 if c.is_one() => write!(f, "q")?,
                1 => write!(f, "{}*q", c)?,
                _ if c.is_one() => write!(f, "q^{}", e)?,
                _ => write!(f, "{}*q^{}", c, e)?,
            }
        }
        Ok(())
    }
}

impl Serialize for QPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            map.serialize_entry(&e.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for QPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = QPolynomial;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map from exponent strings to coefficient strings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut poly = QPolynomial::zero();
                while let Some((k, v)) = access.next_entry::<String, String>()? {
                    let exp: i64 = k.parse().map_err(serde::de::Error::custom)?;
                    let coeff: BigInt = v.parse().map_err(serde::de::Error::custom)?;
                    poly.add_term(exp, &coeff);
                }
                Ok(poly)
            }
        }
        deserializer.deserialize_map(V)
    }
}

// ---------------------------------------------------------------------------
// Unreduced fractions
// ---------------------------------------------------------------------------

/// An unreduced fraction of big integers. The denominator is never zero; its
/// sign is unconstrained (equality and reduction handle signs).
#[derive(Clone, Debug)]
pub struct RawFrac {
    pub num: BigInt,
    pub den: BigInt,
}

impl RawFrac {
    pub fn one() -> Self {
        RawFrac { num: BigInt::one(), den: BigInt::one() }
    }

    pub fn from_int(n: BigInt) -> Self {
        RawFrac { num: n, den: BigInt::one() }
    }

    pub fn mul_assign(&mut self, other: &RawFrac) {
        self.num *= &other.num;
        self.den *= &other.den;
    }

    pub fn div_assign(&mut self, other: &RawFrac) {
        debug_assert!(!other.num.is_zero(), "division by zero RawFrac");
        self.num *= &other.den;
        self.den *= &other.num;
    }

    /// Multiply by `(u/v)^e`, where `e` may be negative.
    pub fn mul_monomial(&mut self, u: &BigInt, v: &BigInt, e: i64) {
        if e == 0 {
            return;
        }
        let (hi, lo) = if e > 0 { (u, v) } else { (v, u) };
        let k = e.unsigned_abs() as u32;
        self.num *= pow_ref(hi, k);
        self.den *= pow_ref(lo, k);
    }

    /// Exact equality by cross-multiplication.
    pub fn eq_frac(&self, other: &RawFrac) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    /// Does this fraction equal the given integer?
    pub fn eq_int(&self, n: &BigInt) -> bool {
        self.num == n * &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn into_rational(self) -> BigRational {
        BigRational::new(self.num, self.den)
    }
}

pub(crate) fn pow_ref(base: &BigInt, exp: u32) -> BigInt {
    use num_traits::Pow;
    Pow::pow(base, exp)
}

/// Natural logarithm of a positive big integer, accurate to double precision
/// regardless of magnitude (`to_f64` alone would overflow past ~1e308).
pub fn ln_bigint(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "ln of a non-positive integer");
    let bits = n.bits();
    if bits <= 52 {
        let small: f64 = n.to_string().parse().unwrap();
        return small.ln();
    }
    let shift = bits - 52;
    let top: BigInt = n >> shift;
    let top_f: f64 = top.to_string().parse().unwrap();
    top_f.ln() + (shift as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn monomial_and_degree() {
        let p = QPolynomial::monomial(3, BigInt::from(5));
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.low_degree(), Some(3));
        assert_eq!(p.coeff(3), BigInt::from(5));
        assert_eq!(p.coeff(0), BigInt::zero());
        assert!(QPolynomial::zero().degree().is_none());
    }

    #[test]
    fn mul_matches_hand_product() {
        // (1 + q)(1 + q^2) = 1 + q + q^2 + q^3
        let a = QPolynomial::one().add(&QPolynomial::monomial(1, BigInt::one()));
        let b = QPolynomial::one().add(&QPolynomial::monomial(2, BigInt::one()));
        let p = a.mul(&b);
        assert_eq!(p.num_terms(), 4);
        for e in 0..=3 {
            assert_eq!(p.coeff(e), BigInt::one());
        }
        assert_eq!(p.at_one(), BigInt::from(4));
    }

    #[test]
    fn eval_at_rational_points() {
        // p = 2 + 3q + q^3
        let mut p = QPolynomial::from_int(2);
        p.add_term(1, &BigInt::from(3));
        p.add_term(3, &BigInt::one());
        assert_eq!(p.eval(&q(1, 1)), q(6, 1));
        assert_eq!(p.eval(&q(2, 1)), q(16, 1));
        // 2 + 3/2 + 1/8 = 29/8
        assert_eq!(p.eval(&q(1, 2)), q(29, 8));
    }

    #[test]
    fn eval_handles_negative_exponents() {
        // q^-2 + q
        let mut p = QPolynomial::monomial(-2, BigInt::one());
        p.add_term(1, &BigInt::one());
        assert_eq!(p.eval(&q(2, 1)), q(9, 4));
    }

    #[test]
    fn serde_roundtrip() {
        let mut p = QPolynomial::monomial(2, BigInt::from(7));
        p.add_term(5, &"123456789012345678901234567890".parse::<BigInt>().unwrap());
        let s = serde_json::to_string(&p).unwrap();
        let back: QPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn frac_equality_is_cross_multiplied() {
        let a = RawFrac { num: BigInt::from(2), den: BigInt::from(4) };
        let b = RawFrac { num: BigInt::from(-1), den: BigInt::from(-2) };
        assert!(a.eq_frac(&b));
        assert!(a.eq_int(&BigInt::zero()) == false);
    }

    #[test]
    fn ln_bigint_tracks_f64() {
        let n = BigInt::from(1_000_000_007i64);
        assert!((ln_bigint(&n) - 1.0e9f64.ln()).abs() < 1e-6);
        let huge = pow_ref(&BigInt::from(10), 500);
        assert!((ln_bigint(&huge) - 500.0 * 10f64.ln()).abs() < 1e-6);
    }
}
