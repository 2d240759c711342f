//! Dense univariate polynomials over a small finite field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::field::{Fe, FiniteField};

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`,
/// which sorts below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial in `t` with coefficients in `F_q`, constant term first and
/// no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: FiniteField,
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn new(field: &FiniteField, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    /// From small integers interpreted in the prime field.
    pub fn from_ints(field: &FiniteField, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &FiniteField) -> Self {
        Self::new(field, Vec::new())
    }
    pub fn one(field: &FiniteField) -> Self {
        Self::constant(field, Fe::ONE)
    }
    pub fn constant(field: &FiniteField, c: Fe) -> Self {
        Self::new(field, vec![c])
    }
    /// `c * t^n`.
    pub fn monomial(field: &FiniteField, c: Fe, n: usize) -> Self {
        let mut v = vec![Fe::ZERO; n + 1];
        v[n] = c;
        Self::new(field, v)
    }
    /// The variable `t`.
    pub fn t(field: &FiniteField) -> Self {
        Self::monomial(field, Fe::ONE, 1)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }
    /// Degree as an integer, with `-1` standing in for the zero polynomial
    /// where a plain number is unavoidable (e.g. loop bounds).
    pub fn deg_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }
    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }
    pub fn is_monic(&self) -> bool {
        self.leading() == Fe::ONE
    }
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `t`-adic valuation; `None` for zero.
    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: Fe) -> Self {
        let k = &self.field;
        Self::new(k, self.coeffs.iter().map(|&x| k.mul(x, c)).collect())
    }

    /// The monic associate (zero stays zero).
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self
            .field
            .inv(self.leading())
            .expect("nonzero leading coefficient");
        self.scale(inv)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let k = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| k.add(k.mul(acc, x), c))
    }

    pub fn derivative(&self) -> Self {
        let k = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| k.mul_int(c, i as i64))
            .collect();
        Self::new(k, v)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let k = &self.field;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(k), self.clone());
        }
        let inv = k.inv(d.leading()).unwrap();
        let mut r = self.coeffs.clone();
        let mut qv = vec![Fe::ZERO; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = k.mul(r[i], inv);
            if c.is_zero() {
                continue;
            }
            qv[i - dd] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                r[idx] = k.sub(r[idx], k.mul(c, dc));
            }
        }
        (Poly::new(k, qv), Poly::new(k, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact quotient when `d` divides `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    fn mul_mod(&self, other: &Poly, m: &Poly) -> Poly {
        (self * other).rem(m)
    }

    /// `self^e mod m` for a big exponent given as repeated `q`-powering.
    fn frobenius_mod(&self, m: &Poly) -> Poly {
        // x -> x^q by square-and-multiply on q.
        let mut e = self.field.order();
        let mut base = self.rem(m);
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            base = base.mul_mod(&base, m);
            e >>= 1;
        }
        acc
    }

    /// Irreducibility over `F_q` (Ben-Or): no factor of degree `<= n/2`.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            Degree::Finite(n) if n >= 1 => n,
            _ => return false,
        };
        if n == 1 {
            return true;
        }
        let x = Poly::t(&self.field);
        let mut xq = x.clone();
        for _ in 0..n / 2 {
            xq = xq.frobenius_mod(self);
            let g = self.gcd(&(&xq - &x));
            if !g.is_constant() {
                return false;
            }
        }
        true
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let d = self.derivative();
        if d.is_zero() {
            // A p-th power in characteristic p (or a constant).
            return self.is_constant();
        }
        self.gcd(&d).is_constant()
    }

    /// All monic polynomials of exact degree `d`, in lexicographic order of
    /// their coefficient codes (constant term varies fastest).
    pub fn monics_of_degree(field: &FiniteField, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = field.order() as u64;
        let count = q.pow(d as u32);
        (0..count).map(move |mut code| {
            let mut v = Vec::with_capacity(d + 1);
            for _ in 0..d {
                v.push(Fe((code % q) as u16));
                code /= q;
            }
            v.push(Fe::ONE);
            Poly::new(field, v)
        })
    }

    /// All polynomials of degree `< d` (including zero), by code.
    pub fn all_below_degree(field: &FiniteField, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = field.order() as u64;
        let count = q.pow(d as u32);
        (0..count).map(move |mut code| {
            let mut v = Vec::with_capacity(d);
            for _ in 0..d {
                v.push(Fe((code % q) as u16));
                code /= q;
            }
            Poly::new(field, v)
        })
    }

    /// Lexicographic comparison key: degree first, then coefficients from the
    /// top down.
    pub fn cmp_canonical(&self, other: &Poly) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }

    pub fn format_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let k = &self.field;
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = k.format(c);
            parts.push(match i {
                0 => cs,
                _ if c == Fe::ONE => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_in("t"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_in("t"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let k = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            k,
            (0..n).map(|i| k.add(self.coeff(i), rhs.coeff(i))).collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let k = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            k,
            (0..n).map(|i| k.sub(self.coeff(i), rhs.coeff(i))).collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let k = &self.field;
        Poly::new(k, self.coeffs.iter().map(|&c| k.neg(c)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let k = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(k);
        }
        let mut v = vec![Fe::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = k.add(v[i + j], k.mul(a, b));
            }
        }
        Poly::new(k, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_degree_is_sentinel() {
        let k = FiniteField::prime(2).unwrap();
        let z = Poly::zero(&k);
        assert_eq!(z.degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(
            std::cmp::max(z.degree(), Poly::one(&k).degree()),
            Degree::Finite(0)
        );
    }

    #[test]
    fn division_identity() {
        let k = FiniteField::new(3, 2).unwrap();
        let a = Poly::from_ints(&k, &[1, 2, 0, 1, 1, 2]);
        let b = Poly::from_ints(&k, &[2, 0, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // Number of monic irreducibles of degree n over F_q: (1/n) sum mu(d) q^(n/d).
        let expected = |q: i64, n: usize| -> usize {
            let mu = |m: usize| -> i64 {
                let mut m = m;
                let mut r = 1;
                let mut d = 2;
                while d * d <= m {
                    if m % d == 0 {
                        m /= d;
                        if m % d == 0 {
                            return 0;
                        }
                        r = -r;
                    }
                    d += 1;
                }
                if m > 1 {
                    r = -r;
                }
                r
            };
            let s: i64 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| mu(d) * q.pow((n / d) as u32))
                .sum();
            (s / n as i64) as usize
        };
        for (q, nmax) in [(2u32, 6usize), (3, 4), (4, 3), (5, 2)] {
            let k = FiniteField::with_order(q).unwrap();
            for n in 1..=nmax {
                let c = Poly::monics_of_degree(&k, n)
                    .filter(|f| f.is_irreducible())
                    .count();
                assert_eq!(c, expected(q as i64, n), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn squarefree_detects_squares() {
        let k = FiniteField::prime(3).unwrap();
        let f = Poly::from_ints(&k, &[1, 1]);
        assert!(f.is_squarefree());
        assert!(!(&f * &f).is_squarefree());
        // t^3 + 1 = (t+1)^3 in characteristic 3
        assert!(!Poly::from_ints(&k, &[1, 0, 0, 1]).is_squarefree());
    }
}
