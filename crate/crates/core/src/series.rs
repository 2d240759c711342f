//! Truncated Laurent series over `F_q` with explicit precision, and
//! Artin–Schreier reduction.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::poly::Poly;
use crate::text::{format_terms, parse_terms};

/// `Σ_{n >= start} c_n t^n + O(t^prec)`.
///
/// Coefficients are stored densely for `start <= n < prec`; the first one
/// is nonzero unless the series is zero to the stated precision, in which
/// case the vector is empty and `start == prec`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: FiniteField,
    start: i64,
    coeffs: Vec<Fe>,
    prec: i64,
}

/// Result of Artin–Schreier reduction: `x = reduced + wp(witness)` to the
/// precision of `x`.
#[derive(Clone, Debug)]
pub struct AsReduction {
    pub reduced: LaurentSeries,
    pub pole_order: u64,
    pub witness: LaurentSeries,
}

impl LaurentSeries {
    fn normalized(field: &FiniteField, start: i64, mut coeffs: Vec<Fe>, prec: i64) -> Self {
        let lead = coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        let start = if coeffs.is_empty() {
            prec
        } else {
            start + lead as i64
        };
        LaurentSeries {
            field: field.clone(),
            start,
            coeffs,
            prec,
        }
    }

    /// `O(t^prec)`.
    pub fn zero(field: &FiniteField, prec: i64) -> Self {
        LaurentSeries {
            field: field.clone(),
            start: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    /// From `(exponent, coefficient)` pairs; terms at or above `prec` are dropped.
    pub fn from_terms(field: &FiniteField, terms: &[(i64, Fe)], prec: i64) -> Self {
        let lo = terms
            .iter()
            .map(|t| t.0)
            .filter(|&e| e < prec)
            .min()
            .unwrap_or(prec);
        let mut v = vec![Fe::ZERO; (prec - lo) as usize];
        for &(e, c) in terms {
            if e < prec {
                let i = (e - lo) as usize;
                v[i] = field.add(v[i], c);
            }
        }
        Self::normalized(field, lo, v, prec)
    }

    /// `t^shift * f + O(t^prec)`.
    pub fn from_poly_shifted(f: &Poly, shift: i64, prec: i64) -> Self {
        let terms: Vec<(i64, Fe)> = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as i64 + shift, c))
            .collect();
        Self::from_terms(f.field(), &terms, prec)
    }

    pub fn from_poly(f: &Poly, prec: i64) -> Self {
        Self::from_poly_shifted(f, 0, prec)
    }

    /// `c * t^n + O(t^prec)`.
    pub fn monomial(field: &FiniteField, c: Fe, n: i64, prec: i64) -> Self {
        Self::from_terms(field, &[(n, c)], prec)
    }

    pub fn constant(field: &FiniteField, c: Fe, prec: i64) -> Self {
        Self::monomial(field, c, 0, prec)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }
    pub fn precision(&self) -> i64 {
        self.prec
    }
    /// `None` when zero to the stated precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }
    /// Lower bound on the valuation: the valuation, or the precision if zero.
    pub fn order_lower_bound(&self) -> i64 {
        self.start
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// Number of exact coefficients from the leading one.
    pub fn relative_precision(&self) -> i64 {
        self.prec - self.start
    }

    /// Coefficient of `t^n`; `None` at or above the precision.
    pub fn coeff(&self, n: i64) -> Option<Fe> {
        if n >= self.prec {
            None
        } else if n < self.start {
            Some(Fe::ZERO)
        } else {
            Some(self.coeffs[(n - self.start) as usize])
        }
    }

    /// Leading coefficient (zero for the zero series).
    pub fn leading(&self) -> Fe {
        self.coeffs.first().copied().unwrap_or(Fe::ZERO)
    }

    /// Nonzero terms, ascending.
    pub fn terms(&self) -> Vec<(i64, Fe)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (self.start + i as i64, c))
            .collect()
    }

    /// Lowers the precision to `min(prec, self.prec)`.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        let keep = (prec - self.start).max(0) as usize;
        let v = self.coeffs[..keep.min(self.coeffs.len())].to_vec();
        Self::normalized(&self.field, self.start.min(prec), v, prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = &self.field;
        let prec = self.prec.min(o.prec);
        let lo = self.start.min(o.start).min(prec);
        let v = (lo..prec)
            .map(|n| k.add(self.coeff(n).unwrap(), o.coeff(n).unwrap()))
            .collect();
        Self::normalized(k, lo, v, prec)
    }

    pub fn neg(&self) -> Self {
        let k = &self.field;
        LaurentSeries {
            field: k.clone(),
            start: self.start,
            coeffs: self.coeffs.iter().map(|&c| k.neg(c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: Fe) -> Self {
        let k = &self.field;
        if c.is_zero() {
            return Self::zero(k, self.prec);
        }
        LaurentSeries {
            field: k.clone(),
            start: self.start,
            coeffs: self.coeffs.iter().map(|&x| k.mul(x, c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiplication by `t^n`.
    pub fn shift(&self, n: i64) -> Self {
        LaurentSeries {
            field: self.field.clone(),
            start: self.start + n,
            coeffs: self.coeffs.clone(),
            prec: self.prec + n,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = &self.field;
        let prec = match (self.is_zero(), o.is_zero()) {
            (true, true) => self.prec + o.prec,
            (true, false) => self.prec + o.start,
            (false, true) => self.start + o.prec,
            (false, false) => {
                self.start + o.start + self.relative_precision().min(o.relative_precision())
            }
        };
        if self.is_zero() || o.is_zero() {
            return Self::zero(k, prec);
        }
        let start = self.start + o.start;
        let len = (prec - start) as usize;
        let mut v = vec![Fe::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(len - i) {
                v[i + j] = k.add(v[i + j], k.mul(a, b));
            }
        }
        Self::normalized(k, start, v, prec)
    }

    /// Multiplicative inverse; errors on a series that is zero to its precision.
    pub fn inv(&self) -> Result<Self> {
        let k = &self.field;
        if self.is_zero() {
            return Err(Error::Precision(format!(
                "cannot invert O(t^{}): leading term unknown",
                self.prec
            )));
        }
        let n = self.coeffs.len();
        let c0inv = k.inv(self.coeffs[0]).unwrap();
        let mut w = vec![Fe::ZERO; n];
        w[0] = c0inv;
        for m in 1..n {
            let mut acc = Fe::ZERO;
            for i in 1..=m {
                acc = k.add(acc, k.mul(self.coeffs[i], w[m - i]));
            }
            w[m] = k.neg(k.mul(acc, c0inv));
        }
        Ok(Self::normalized(k, -self.start, w, -self.start + n as i64))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut b = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc: Option<Self> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&b),
                    None => b.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        // x^0 = 1 to the relative precision of x
        Ok(acc.unwrap_or_else(|| {
            Self::constant(&self.field, Fe::ONE, self.relative_precision().max(1))
        }))
    }

    /// A square root, for odd characteristic.  The valuation must be even
    /// and the leading coefficient a square; the root with the
    /// [`FiniteField::sqrt`] leading coefficient is returned.
    pub fn sqrt(&self) -> Result<Option<Self>> {
        let k = &self.field;
        if k.p() == 2 {
            return Err(Error::Unsupported(
                "series square roots in characteristic 2".into(),
            ));
        }
        if self.is_zero() {
            return Err(Error::Precision(
                "square root of a series known only to be O(t^N)".into(),
            ));
        }
        if self.start.rem_euclid(2) != 0 {
            return Ok(None);
        }
        let Some(s0) = k.sqrt(self.coeffs[0]) else {
            return Ok(None);
        };
        let n = self.coeffs.len();
        let inv2s0 = k.inv(k.mul_int(s0, 2)).unwrap();
        let mut s = vec![Fe::ZERO; n];
        s[0] = s0;
        for m in 1..n {
            let mut acc = self.coeffs[m];
            for i in 1..m {
                acc = k.sub(acc, k.mul(s[i], s[m - i]));
            }
            s[m] = k.mul(acc, inv2s0);
        }
        let h = self.start / 2;
        Ok(Some(Self::normalized(k, h, s, h + n as i64)))
    }

    /// Applies a coefficient map (e.g. an embedding into a larger field).
    pub fn map_coeffs(&self, target: &FiniteField, f: impl Fn(Fe) -> Fe) -> Self {
        let v = self.coeffs.iter().map(|&c| f(c)).collect();
        Self::normalized(target, self.start, v, self.prec)
    }

    /// Base change along an embedding table from [`FiniteField::embedding_into`].
    pub fn base_change(&self, target: &FiniteField, embedding: &[Fe]) -> Self {
        self.map_coeffs(target, |c| embedding[c.0 as usize])
    }

    /// Substitutes `t = s^2 / u0`, returning a series in `s`.
    pub fn substitute_ramified(&self, u0: Fe) -> Self {
        let k = &self.field;
        let uinv = k.inv(u0).expect("nonzero u0");
        let terms: Vec<(i64, Fe)> = self
            .terms()
            .into_iter()
            .map(|(n, c)| (2 * n, k.mul(c, k.pow(uinv, n))))
            .collect();
        let prec = 2 * self.prec;
        if terms.is_empty() {
            return Self::zero(k, prec);
        }
        Self::from_terms(k, &terms, prec)
    }

    /// Termwise `c -> c^p`, `t -> t^p`: the Frobenius `x -> x^p`.
    pub fn frobenius(&self) -> Self {
        let k = &self.field;
        let p = k.p() as i64;
        let terms: Vec<(i64, Fe)> = self
            .terms()
            .into_iter()
            .map(|(n, c)| (p * n, k.frobenius(c)))
            .collect();
        Self::from_terms(k, &terms, p * self.prec).truncate(p * self.prec)
    }

    /// `x^p - x`.
    pub fn wp(&self) -> Self {
        self.frobenius().sub(self)
    }

    /// Artin–Schreier reduction modulo `wp` (see [`AsReduction`]).
    ///
    /// The reduced representative keeps only polar exponents prime to `p`
    /// and a constant term reduced modulo `wp(F_q)`; the positive part is
    /// dropped since `wp` is bijective on `t F_q[[t]]`.
    pub fn as_reduce_with_witness(&self) -> Result<AsReduction> {
        let k = &self.field;
        let p = k.p() as i64;
        if self.prec < 1 {
            return Err(Error::Precision(format!(
                "Artin-Schreier reduction needs exact polar part and constant term, got O(t^{})",
                self.prec
            )));
        }
        // Polar part, dense from the most negative exponent up to -1.
        let lo = self.start.min(0);
        let mut polar: Vec<Fe> = (lo..0).map(|n| self.coeff(n).unwrap()).collect();
        let mut witness_terms: Vec<(i64, Fe)> = Vec::new();
        for n in lo..0 {
            let i = (n - lo) as usize;
            let a = polar[i];
            if a.is_zero() || n % p != 0 {
                continue;
            }
            // a t^n = wp(b t^(n/p)) + b t^(n/p) with b = a^(1/p)
            let b = k.pth_root(a);
            let m = n / p;
            polar[i] = Fe::ZERO;
            let j = (m - lo) as usize;
            polar[j] = k.add(polar[j], b);
            witness_terms.push((m, b));
        }
        let c = self.coeff(0).unwrap();
        let rep = k.wp_reduce(c);
        let diff = k.sub(c, rep);
        if !diff.is_zero() {
            let y = k
                .elements()
                .find(|&y| k.wp(y) == diff)
                .expect("trace-zero element is in wp(F_q)");
            witness_terms.push((0, y));
        }
        let mut reduced_terms: Vec<(i64, Fe)> = polar
            .iter()
            .enumerate()
            .map(|(i, &c)| (lo + i as i64, c))
            .collect();
        reduced_terms.push((0, rep));
        let reduced = Self::from_terms(k, &reduced_terms, self.prec);
        let pole_order = reduced.valuation().map_or(0, |v| (-v).max(0)) as u64;

        // Positive part h: g = -(h + h^p + h^(p^2) + ...) solves wp(g) = h.
        let pos_terms: Vec<(i64, Fe)> = self.terms().into_iter().filter(|t| t.0 > 0).collect();
        let mut witness = Self::from_terms(k, &witness_terms, self.prec);
        let mut h = Self::from_terms(k, &pos_terms, self.prec);
        while !h.is_zero() {
            witness = witness.sub(&h);
            h = h.frobenius().truncate(self.prec);
        }
        Ok(AsReduction {
            reduced,
            pole_order,
            witness,
        })
    }

    /// `(reduced, pole_order)`.
    pub fn as_reduce(&self) -> Result<(Self, u64)> {
        let r = self.as_reduce_with_witness()?;
        Ok((r.reduced, r.pole_order))
    }

    pub fn format_in(&self, var: &str) -> String {
        let mut terms = self.terms();
        terms.sort_by_key(|t| t.0);
        let body = format_terms(&self.field, &terms, var);
        let o = if self.prec == 1 {
            format!("O({var})")
        } else {
            format!("O({var}^{})", self.prec)
        };
        if body.is_empty() {
            o
        } else {
            format!("{body} + {o}")
        }
    }

    /// Parses `c_v*t^v + ... + O(t^N)`.  Without a big-O term the series is
    /// taken exact up to `default_prec`.
    pub fn parse(field: &FiniteField, s: &str, default_prec: i64) -> Result<Self> {
        let ts = parse_terms(field, s, "t")?;
        let prec = ts.big_o.unwrap_or(default_prec);
        if let Some(&(e, _)) = ts.terms.iter().find(|t| t.0 >= prec && !t.1.is_zero()) {
            return Err(Error::Parse(format!(
                "term t^{e} lies inside O(t^{prec}) in `{s}`"
            )));
        }
        Ok(Self::from_terms(field, &ts.terms, prec))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_in("t"))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_in("t"))
    }
}
