//! Tate's algorithm over `F_q[[t]]` in characteristic 3, used as an
//! independent oracle for minimal discriminants and conductors.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::series::LaurentSeries;

/// Kodaira symbol of the special fibre.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kodaira {
    I(u64),
    II,
    III,
    IV,
    IStar(u64),
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    /// Number of irreducible components of the special fibre.
    pub fn components(self) -> u64 {
        match self {
            Kodaira::I(0) => 1,
            Kodaira::I(n) => n,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::IStar(n) => n + 5,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TateResult {
    pub kodaira: Kodaira,
    /// Valuation of the minimal discriminant.
    pub min_disc: u64,
    /// Conductor exponent from Ogg's formula.
    pub conductor: u64,
    /// Number of `t^12` reductions performed after making the model integral.
    pub reductions: u64,
}

/// Generalized Weierstrass coefficients `[a1, a2, a3, a4, a6]`.
pub type GeneralCoefficients = [LaurentSeries; 5];

/// Completes the square: `y^2 = x^3 + (a2 + a1^2) x^2 + (a4 - a1 a3) x + (a6 + a3^2)`
/// (using `1/4 = 1`, `1/2 = -1` in characteristic 3).
pub fn complete_square(a: &GeneralCoefficients) -> Result<[LaurentSeries; 3]> {
    let [a1, a2, a3, a4, a6] = a;
    if a1.field().p() != 3 {
        return Err(Error::Unsupported(
            "this Tate's algorithm is for characteristic 3".into(),
        ));
    }
    Ok([
        a2.add(&a1.mul(a1)),
        a4.sub(&a1.mul(a3)),
        a6.add(&a3.mul(a3)),
    ])
}

/// Discriminant of `y^2 = x^3 + a2 x^2 + a4 x + a6` in characteristic 3.
pub fn short_discriminant(
    a2: &LaurentSeries,
    a4: &LaurentSeries,
    a6: &LaurentSeries,
) -> LaurentSeries {
    let a2sq = a2.mul(a2);
    a2sq.mul(a4)
        .mul(a4)
        .sub(&a2sq.mul(a2).mul(a6))
        .sub(&a4.mul(a4).mul(a4))
}

fn divisible(x: &LaurentSeries, k: i64, what: &str) -> Result<bool> {
    if x.precision() < k {
        return Err(Error::Precision(format!(
            "{what} is known only to O(t^{}), need t^{k}",
            x.precision()
        )));
    }
    Ok(x.order_lower_bound() >= k)
}

fn residue(x: &LaurentSeries, k: i64) -> Result<Fe> {
    x.coeff(k)
        .ok_or_else(|| Error::Precision(format!("coefficient t^{k} beyond O(t^{})", x.precision())))
}

fn valuation(x: &LaurentSeries, what: &str) -> Result<i64> {
    x.valuation()
        .ok_or_else(|| Error::Precision(format!("{what} vanishes to O(t^{})", x.precision())))
}

struct Short {
    a2: LaurentSeries,
    a4: LaurentSeries,
    a6: LaurentSeries,
}

impl Short {
    fn field(&self) -> &FiniteField {
        self.a2.field()
    }

    /// `x -> x + r`.
    fn translate(&mut self, r: &LaurentSeries) {
        let r2 = r.mul(r);
        let a6 = self
            .a6
            .add(&r.mul(&self.a4))
            .add(&r2.mul(&self.a2))
            .add(&r2.mul(r));
        let a4 = self
            .a4
            .add(&r.mul(&self.a2).scale(self.field().from_int(2)));
        self.a4 = a4;
        self.a6 = a6;
    }

    /// Divides `a_i` by `t^{i k}`; negative `k` multiplies.
    fn rescale(&mut self, k: i64) {
        self.a2 = self.a2.shift(-2 * k);
        self.a4 = self.a4.shift(-4 * k);
        self.a6 = self.a6.shift(-6 * k);
    }

    fn disc(&self) -> LaurentSeries {
        short_discriminant(&self.a2, &self.a4, &self.a6)
    }
}

/// Multiple root in `F_q` of `x^3 + b x^2 + c x + d`, if any, and whether it is triple.
fn multiple_root(k: &FiniteField, b: Fe, c: Fe, d: Fe) -> Option<(Fe, bool)> {
    let f = |x: Fe| k.add(k.mul(k.add(k.mul(k.add(x, b), x), c), x), d);
    // derivative in characteristic 3: 2 b x + c
    let df = |x: Fe| k.add(k.mul(k.mul_int(b, 2), x), c);
    let r = k.elements().find(|&x| f(x).is_zero() && df(x).is_zero())?;
    // triple iff (x - r)^3 = x^3 - r^3, i.e. b = c = 0
    Some((r, b.is_zero() && c.is_zero()))
}

/// Tate's algorithm for `y^2 = x^3 + a2 x^2 + a4 x + a6` over `F_q((t))`.
pub fn tate_short(
    a2: &LaurentSeries,
    a4: &LaurentSeries,
    a6: &LaurentSeries,
) -> Result<TateResult> {
    let k = a2.field().clone();
    if k.p() != 3 {
        return Err(Error::Unsupported(
            "this Tate's algorithm is for characteristic 3".into(),
        ));
    }
    let mut e = Short {
        a2: a2.clone(),
        a4: a4.clone(),
        a6: a6.clone(),
    };
    valuation(&e.disc(), "discriminant")?;
    // integral model
    let mut scale = 0i64;
    for (x, i) in [(&e.a2, 2i64), (&e.a4, 4), (&e.a6, 6)] {
        if let Some(v) = x.valuation() {
            if v < 0 {
                scale = scale.max((-v + i - 1) / i);
            }
        }
    }
    e.rescale(-scale);
    let mut reductions = 0;
    loop {
        let vd = valuation(&e.disc(), "discriminant")?;
        let prec = e.a2.precision().min(e.a4.precision()).min(e.a6.precision());
        let done = |kod: Kodaira| -> Result<TateResult> {
            let m = kod.components();
            Ok(TateResult {
                kodaira: kod,
                min_disc: vd as u64,
                conductor: vd as u64 + 1 - m,
                reductions,
            })
        };
        if vd == 0 {
            return done(Kodaira::I(0));
        }
        // singular point of the reduction
        let (r0, _) = multiple_root(
            &k,
            residue(&e.a2, 0)?,
            residue(&e.a4, 0)?,
            residue(&e.a6, 0)?,
        )
        .ok_or_else(|| Error::Numerical("no singular point on a singular reduction".into()))?;
        e.translate(&LaurentSeries::constant(&k, r0, prec));
        if !divisible(&e.a2, 1, "a2")? {
            return done(Kodaira::I(vd as u64));
        }
        if !divisible(&e.a6, 2, "a6")? {
            return done(Kodaira::II);
        }
        let b8 = e.a2.mul(&e.a6).sub(&e.a4.mul(&e.a4));
        if !divisible(&b8, 3, "b8")? {
            return done(Kodaira::III);
        }
        if !divisible(&e.a6, 3, "a6")? {
            return done(Kodaira::IV);
        }
        let (b, c, d) = (residue(&e.a2, 1)?, residue(&e.a4, 2)?, residue(&e.a6, 3)?);
        match multiple_root(&k, b, c, d) {
            None => return done(Kodaira::IStar(0)),
            Some((_, false)) => {
                // potentially multiplicative: n = -v(j), j = a2^6 / disc
                let vj = 6 * valuation(&e.a2, "a2")? - vd;
                return done(Kodaira::IStar((-vj).max(1) as u64));
            }
            Some((r, true)) => {
                e.translate(&LaurentSeries::monomial(&k, r, 1, prec));
            }
        }
        if !residue(&e.a6, 4)?.is_zero() {
            return done(Kodaira::IVStar);
        }
        if !divisible(&e.a4, 4, "a4")? {
            return done(Kodaira::IIIStar);
        }
        if !divisible(&e.a6, 6, "a6")? {
            return done(Kodaira::IIStar);
        }
        e.rescale(1);
        reductions += 1;
    }
}

/// Tate's algorithm on a generalized Weierstrass equation.
pub fn tate_minimal_disc(a: &GeneralCoefficients) -> Result<TateResult> {
    let [a2, a4, a6] = complete_square(a)?;
    tate_short(&a2, &a4, &a6)
}
