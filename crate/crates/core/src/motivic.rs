//! Laurent polynomials in a fractional power of the Lefschetz class `L`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// An element of `Z[L^{±1/r}]`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MotivicClass {
    terms: BTreeMap<Rational64, i64>,
}

/// Dimension or Gorenstein weight: a rational, or `-inf` for the zero class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    NegInfinity,
    Value(Rational64),
}

impl Weight {
    pub fn value(self) -> Option<Rational64> {
        match self {
            Weight::Value(v) => Some(v),
            Weight::NegInfinity => None,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::NegInfinity => write!(f, "-inf"),
            Weight::Value(v) => write!(f, "{v}"),
        }
    }
}

impl MotivicClass {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn one() -> Self {
        Self::monomial(1, Rational64::zero())
    }
    /// `c * L^e`.
    pub fn monomial(c: i64, e: Rational64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(e, c);
        }
        MotivicClass { terms }
    }
    /// `L^(num/den)`.
    pub fn l_pow(num: i64, den: i64) -> Self {
        Self::monomial(1, Rational64::new(num, den))
    }
    /// `L`.
    pub fn lefschetz() -> Self {
        Self::l_pow(1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least common denominator `r` of the exponents.
    pub fn denominator(&self) -> i64 {
        self.terms.keys().fold(1, |r, e| r.lcm(e.denom()))
    }

    /// `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    fn accumulate(&mut self, e: Rational64, c: i64) {
        let slot = self.terms.entry(e).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    /// Largest exponent with nonzero coefficient.
    pub fn dim(&self) -> Weight {
        self.terms
            .keys()
            .next_back()
            .map_or(Weight::NegInfinity, |&e| Weight::Value(e))
    }
}

impl Add for &MotivicClass {
    type Output = MotivicClass;
    fn add(self, rhs: &MotivicClass) -> MotivicClass {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.accumulate(e, c);
        }
        out
    }
}

impl Neg for &MotivicClass {
    type Output = MotivicClass;
    fn neg(self) -> MotivicClass {
        MotivicClass {
            terms: self.terms.iter().map(|(&e, &c)| (e, -c)).collect(),
        }
    }
}

impl Sub for &MotivicClass {
    type Output = MotivicClass;
    fn sub(self, rhs: &MotivicClass) -> MotivicClass {
        self + &(-rhs)
    }
}

impl Mul for &MotivicClass {
    type Output = MotivicClass;
    fn mul(self, rhs: &MotivicClass) -> MotivicClass {
        let mut out = MotivicClass::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.accumulate(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

pub fn mot_add(a: &MotivicClass, b: &MotivicClass) -> MotivicClass {
    a + b
}
pub fn mot_mul(a: &MotivicClass, b: &MotivicClass) -> MotivicClass {
    a * b
}
pub fn mot_dim(a: &MotivicClass) -> Weight {
    a.dim()
}

impl fmt::Display for MotivicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            match (i, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if e.is_zero() {
                write!(f, "{}", c.abs())?;
            } else {
                write!(f, "{} * L^({e})", c.abs())?;
            }
        }
        Ok(())
    }
}

/// The two measures whose difference gives the twisted sectoroid measure of
/// `A_i` on the coarse moduli of `M_{1,1}`: `(L-1) L^{-i-1+7i/6}` and the
/// untwisted part `(L-1) L^{-6i-1+7i/6}`.
pub fn m11bar_twisted_parts(i: i64) -> (MotivicClass, MotivicClass) {
    let lm1 = &MotivicClass::lefschetz() - &MotivicClass::one();
    let seven_sixths = Rational64::new(7 * i, 6);
    let a = MotivicClass::monomial(1, Rational64::from(-i - 1) + seven_sixths);
    let b = MotivicClass::monomial(1, Rational64::from(-6 * i - 1) + seven_sixths);
    (&lm1 * &a, &lm1 * &b)
}

/// `(L-1)(L^{i/6-1} - L^{-29i/6-1})` together with its Gorenstein weight.
pub fn m11bar_sectoroid_measure(i: i64) -> Result<(MotivicClass, Weight)> {
    if i < 1 {
        return Err(Error::Config(format!(
            "sectoroid index must be positive, got {i}"
        )));
    }
    let lm1 = &MotivicClass::lefschetz() - &MotivicClass::one();
    let inner = &MotivicClass::monomial(1, Rational64::new(i, 6) - Rational64::one())
        - &MotivicClass::monomial(1, Rational64::new(-29 * i, 6) - Rational64::one());
    let class = &lm1 * &inner;
    let gw = class.dim();
    Ok((class, gw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn ring_examples() {
        let lm1 = &MotivicClass::lefschetz() - &MotivicClass::one();
        let sq = &lm1 * &lm1;
        assert_eq!(sq.to_string(), "1 * L^(2) - 2 * L^(1) + 1");
        assert_eq!(sq.dim(), Weight::Value(r(2, 1)));
        let a = MotivicClass::l_pow(1, 6);
        assert_eq!(&a * &a, MotivicClass::l_pow(1, 3));
        assert_eq!(&sq + &MotivicClass::zero(), sq);
        assert_eq!(MotivicClass::zero().dim(), Weight::NegInfinity);
        assert_eq!(MotivicClass::l_pow(1, 6).denominator(), 6);
    }

    #[test]
    fn sectoroid_measures() {
        assert_eq!(
            m11bar_sectoroid_measure(1).unwrap().1,
            Weight::Value(r(1, 6))
        );
        assert_eq!(
            m11bar_sectoroid_measure(6).unwrap().1,
            Weight::Value(r(1, 1))
        );
        let lm1 = &MotivicClass::lefschetz() - &MotivicClass::one();
        let expect = &lm1 * &(&MotivicClass::l_pow(-2, 3) - &MotivicClass::l_pow(-32, 3));
        assert_eq!(m11bar_sectoroid_measure(2).unwrap().0, expect);
        assert!(m11bar_sectoroid_measure(0).is_err());
    }

    #[test]
    fn difference_of_parts_matches_closed_form() {
        for i in 1..=60 {
            let (a, b) = m11bar_twisted_parts(i);
            assert_eq!(&a - &b, m11bar_sectoroid_measure(i).unwrap().0);
        }
    }

    #[test]
    fn dim_is_additive() {
        let xs = [
            &MotivicClass::lefschetz() - &MotivicClass::one(),
            MotivicClass::l_pow(-5, 6),
            &MotivicClass::l_pow(7, 3) + &MotivicClass::monomial(-4, r(1, 2)),
        ];
        for x in &xs {
            for y in &xs {
                let (dx, dy) = (x.dim().value().unwrap(), y.dim().value().unwrap());
                assert_eq!((x * y).dim(), Weight::Value(dx + dy));
            }
        }
    }
}
