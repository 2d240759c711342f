//! Elements of `F_q(t)` in lowest terms with a monic denominator.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::place::Place;
use crate::poly::{Degree, Poly};
use crate::series::LaurentSeries;
use crate::text::parse_terms;

/// A valuation: an integer or `+inf` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// `num/den` reduced to lowest terms; errors on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Config("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let lc = den.leading();
        if lc != Fe::ONE {
            let inv = den.field().inv(lc).unwrap();
            num = num.scale(inv);
            den = den.scale(inv);
        }
        if num.is_zero() {
            den = Poly::one(num.field());
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        let one = Poly::one(p.field());
        RationalFunction { num: p, den: one }
    }

    pub fn zero(field: &FiniteField) -> Self {
        Self::from_poly(Poly::zero(field))
    }

    pub fn field(&self) -> &FiniteField {
        self.num.field()
    }
    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        Self::new(n, &self.den * &o.den).unwrap()
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> Self {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }
    /// `None` when dividing by zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        (!o.is_zero()).then(|| Self::new(&self.num * &o.den, &self.den * &o.num).unwrap())
    }

    /// `ord_v(self)`, `Infinity` for zero.
    pub fn valuation_at(&self, v: &Place) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinity;
        }
        match v {
            Place::Infinite => {
                let d = |p: &Poly| p.degree().finite().unwrap() as i64;
                Valuation::Finite(d(&self.den) - d(&self.num))
            }
            Place::Finite(pi) => {
                Valuation::Finite(multiplicity(&self.num, pi) - multiplicity(&self.den, pi))
            }
        }
    }

    /// Laurent expansion in the uniformizer at `v` (`t - c` for a rational
    /// finite place, `1/t` at infinity), exact below `prec`.
    pub fn expand_at(&self, v: &Place, prec: i64) -> Result<LaurentSeries> {
        let k = self.field();
        if self.is_zero() {
            return Ok(LaurentSeries::zero(k, prec));
        }
        let (num, den, shift) = match v {
            Place::Infinite => {
                // num(1/s)/den(1/s) = s^(deg den - deg num) * rev(num)(s) / rev(den)(s)
                let rev = |p: &Poly| Poly::new(k, p.coeffs().iter().rev().copied().collect());
                (
                    rev(&self.num),
                    rev(&self.den),
                    self.den.deg_i64() - self.num.deg_i64(),
                )
            }
            Place::Finite(pi) => {
                if pi.degree() != Degree::Finite(1) {
                    return Err(Error::Unsupported(format!(
                        "expansion at the degree {} place {pi} needs a residue field extension",
                        pi.degree()
                    )));
                }
                let c = k.neg(pi.coeff(0));
                (taylor_shift(&self.num, c), taylor_shift(&self.den, c), 0)
            }
        };
        let vn = num.low_order().unwrap() as i64 + shift;
        let vd = den.low_order().unwrap() as i64;
        let rel = (prec - (vn - vd)).max(1);
        let ns = LaurentSeries::from_poly_shifted(&num, shift, vn + rel);
        let ds = LaurentSeries::from_poly_shifted(&den, 0, vd + rel);
        Ok(ns.div(&ds)?.truncate(prec))
    }

    /// Parses `num/den` or a bare polynomial.
    pub fn parse(field: &FiniteField, s: &str) -> Result<Self> {
        let (n, d) = match split_fraction(s) {
            Some((n, d)) => (parse_poly(field, n)?, parse_poly(field, d)?),
            None => (parse_poly(field, s)?, Poly::one(field)),
        };
        Self::new(n, d).map_err(|_| Error::Parse(format!("zero denominator in `{s}`")))
    }
}

fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

fn strip_outer_parens(s: &str) -> &str {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
        // Only strip if the parens enclose everything.
        let mut depth = 0;
        for (i, ch) in t.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 && i != t.len() - 1 {
                        return t;
                    }
                }
                _ => {}
            }
        }
        return inner;
    }
    t
}

/// Parses a polynomial in `t`.
pub fn parse_poly(field: &FiniteField, s: &str) -> Result<Poly> {
    let s = strip_outer_parens(s);
    let ts = parse_terms(field, s, "t")?;
    if ts.big_o.is_some() || ts.terms.iter().any(|&(e, _)| e < 0) {
        return Err(Error::Parse(format!("`{s}` is not a polynomial")));
    }
    let n = ts
        .terms
        .iter()
        .map(|&(e, _)| e as usize + 1)
        .max()
        .unwrap_or(0);
    let mut v = vec![Fe::ZERO; n];
    for (e, c) in ts.terms {
        v[e as usize] = field.add(v[e as usize], c);
    }
    Ok(Poly::new(field, v))
}

/// Exponent of `pi` in `f` (nonzero `f`).
pub fn multiplicity(f: &Poly, pi: &Poly) -> i64 {
    let mut f = f.clone();
    let mut m = 0;
    while let Some(q) = f.exact_div(pi) {
        f = q;
        m += 1;
    }
    m
}

/// Coefficients of `f(u + c)` in `u`.
fn taylor_shift(f: &Poly, c: Fe) -> Poly {
    let k = f.field();
    let lin = Poly::new(k, vec![c, Fe::ONE]);
    f.coeffs().iter().rev().fold(Poly::zero(k), |acc, &a| {
        &(&acc * &lin) + &Poly::constant(k, a)
    })
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::place::places_up_to;

    fn f2() -> FiniteField {
        FiniteField::prime(2).unwrap()
    }

    #[test]
    fn valuations() {
        let k = f2();
        let t2 = RationalFunction::parse(&k, "t^2").unwrap();
        let t_place = Place::finite(Poly::t(&k)).unwrap();
        assert_eq!(t2.valuation_at(&t_place), Valuation::Finite(2));
        let x = RationalFunction::parse(&k, "1/(t+1)").unwrap();
        let p1 = Place::finite(Poly::from_ints(&k, &[1, 1])).unwrap();
        assert_eq!(x.valuation_at(&p1), Valuation::Finite(-1));
        let t = RationalFunction::parse(&k, "t").unwrap();
        assert_eq!(t.valuation_at(&Place::Infinite), Valuation::Finite(-1));
        assert_eq!(
            RationalFunction::zero(&k).valuation_at(&Place::Infinite),
            Valuation::Infinity
        );
    }

    #[test]
    fn expansions() {
        let k = f2();
        let t_place = Place::finite(Poly::t(&k)).unwrap();
        let x = RationalFunction::parse(&k, "1/(1+t)").unwrap();
        assert_eq!(
            x.expand_at(&t_place, 3).unwrap().to_string(),
            "1 + t + t^2 + O(t^3)"
        );
        let t = RationalFunction::parse(&k, "t").unwrap();
        assert_eq!(t.expand_at(&t_place, 5).unwrap().to_string(), "t + O(t^5)");
        let inv = RationalFunction::parse(&k, "1/t").unwrap();
        assert_eq!(
            inv.expand_at(&Place::Infinite, 2).unwrap().to_string(),
            "t + O(t^2)"
        );
        let k4 = FiniteField::with_order(4).unwrap();
        let quad = Place::finite(Poly::from_ints(&k, &[1, 1, 1])).unwrap();
        assert!(RationalFunction::parse(&k, "t")
            .unwrap()
            .expand_at(&quad, 3)
            .is_err());
        let _ = k4;
    }

    #[test]
    fn expansion_at_shifted_place_reconstructs() {
        let k = FiniteField::prime(5).unwrap();
        let x = RationalFunction::parse(&k, "(t^2 + 3)/(t^3 + 2*t + 1)").unwrap();
        for v in places_up_to(&k, 1) {
            let s = x.expand_at(&v, 12).unwrap();
            assert_eq!(
                Valuation::Finite(s.valuation().unwrap()),
                x.valuation_at(&v)
            );
        }
    }

    #[test]
    fn parse_format_roundtrip() {
        let k = FiniteField::prime(3).unwrap();
        let x = RationalFunction::parse(&k, "(2*t + 1)/(t^2 + 2)").unwrap();
        assert_eq!(RationalFunction::parse(&k, &x.to_string()).unwrap(), x);
        // 2t+2 over 2t^2+2t normalizes to 1/t
        let y = RationalFunction::parse(&k, "(2*t+2)/(2*t^2+2*t)").unwrap();
        assert_eq!(y.to_string(), "(1)/(t)");
    }
}
