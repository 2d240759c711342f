//! Conductor and minimal-discriminant exponents of elliptic curves
//! `z^2 = w^3 + a2 w^2 + a4 w + a6` over `F_{3^f}((t))`, computed from
//! `j`, the parities `α₂`/`α₄` and the Artin–Schreier jump of the 3-torsion
//! field over `K(δ)`.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::place::{places_up_to, Place};
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::series::LaurentSeries;
use crate::tate::{self, GeneralCoefficients, Kodaira, TateResult};

/// Short Weierstrass model in characteristic 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a2: LaurentSeries,
    pub a4: LaurentSeries,
    pub a6: LaurentSeries,
}

impl WeierstrassModel {
    pub fn new(a2: LaurentSeries, a4: LaurentSeries, a6: LaurentSeries) -> Result<Self> {
        let k = a2.field();
        if k.p() != 3 {
            return Err(Error::Config(format!(
                "characteristic must be 3, got {}",
                k.p()
            )));
        }
        if a4.field() != k || a6.field() != k {
            return Err(Error::Config("coefficients over different fields".into()));
        }
        let m = WeierstrassModel { a2, a4, a6 };
        if m.discriminant().is_zero() {
            return Err(Error::Precision(format!(
                "discriminant vanishes to O(t^{}); singular or too little precision",
                m.discriminant().precision()
            )));
        }
        Ok(m)
    }

    /// From a generalized equation, by completing the square.
    pub fn from_general(a: &GeneralCoefficients) -> Result<Self> {
        let [a2, a4, a6] = tate::complete_square(a)?;
        Self::new(a2, a4, a6)
    }

    pub fn field(&self) -> &FiniteField {
        self.a2.field()
    }

    pub fn precision(&self) -> i64 {
        self.a2
            .precision()
            .min(self.a4.precision())
            .min(self.a6.precision())
    }

    pub fn truncate(&self, prec: i64) -> Self {
        WeierstrassModel {
            a2: self.a2.truncate(prec),
            a4: self.a4.truncate(prec),
            a6: self.a6.truncate(prec),
        }
    }

    pub fn discriminant(&self) -> LaurentSeries {
        tate::short_discriminant(&self.a2, &self.a4, &self.a6)
    }

    pub fn is_j_zero(&self) -> bool {
        self.a2.is_zero()
    }

    /// `j = a2^6 / Δ` (in characteristic 3, `c4 = b2^2 = a2^2`).
    pub fn j_invariant(&self) -> Result<LaurentSeries> {
        self.a2.pow(6)?.div(&self.discriminant())
    }

    /// `(w, z) -> (u^2 w + r, u^3 z)`.
    pub fn change_coordinates(&self, u: &LaurentSeries, r: &LaurentSeries) -> Result<Self> {
        let k = self.field();
        let two = k.from_int(2);
        let r2 = r.mul(r);
        let a2 = self.a2.div(&u.pow(2)?)?;
        let a4 = self.a4.add(&r.mul(&self.a2).scale(two)).div(&u.pow(4)?)?;
        let a6 = self
            .a6
            .add(&r.mul(&self.a4))
            .add(&r2.mul(&self.a2))
            .add(&r2.mul(r))
            .div(&u.pow(6)?)?;
        Self::new(a2, a4, a6)
    }

    pub fn base_change(&self, target: &FiniteField) -> Result<Self> {
        let emb = self.field().embedding_into(target)?;
        Self::new(
            self.a2.base_change(target, &emb),
            self.a4.base_change(target, &emb),
            self.a6.base_change(target, &emb),
        )
    }

    pub fn general(&self) -> GeneralCoefficients {
        let z = LaurentSeries::zero(self.field(), self.precision());
        [
            z.clone(),
            self.a2.clone(),
            z,
            self.a4.clone(),
            self.a6.clone(),
        ]
    }
}

/// General change of variables `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
pub fn change_general(
    a: &GeneralCoefficients,
    u: &LaurentSeries,
    r: &LaurentSeries,
    s: &LaurentSeries,
    t: &LaurentSeries,
) -> Result<GeneralCoefficients> {
    let [a1, a2, a3, a4, a6] = a;
    let k = a1.field();
    let c = |n: i64| k.from_int(n);
    let a1n = a1.add(&s.scale(c(2))).div(u)?;
    let a2n = a2
        .sub(&s.mul(a1))
        .add(&r.scale(c(3)))
        .sub(&s.mul(s))
        .div(&u.pow(2)?)?;
    let a3n = a3.add(&r.mul(a1)).add(&t.scale(c(2))).div(&u.pow(3)?)?;
    let a4n = a4
        .sub(&s.mul(a3))
        .add(&r.mul(a2).scale(c(2)))
        .sub(&t.add(&r.mul(s)).mul(a1))
        .add(&r.mul(r).scale(c(3)))
        .sub(&s.mul(t).scale(c(2)))
        .div(&u.pow(4)?)?;
    let a6n = a6
        .add(&r.mul(a4))
        .add(&r.mul(r).mul(a2))
        .add(&r.mul(r).mul(r))
        .sub(&t.mul(a3))
        .sub(&t.mul(t))
        .sub(&r.mul(t).mul(a1))
        .div(&u.pow(6)?)?;
    Ok([a1n, a2n, a3n, a4n, a6n])
}

/// Which model of `K(δ)` carried the jump computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaModel {
    Trivial,
    Ramified,
    Unramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Jump {
    /// Reduced pole order of `ξ` in the normalized valuation of `K(δ)`.
    pub bj: u64,
    /// `2 bj / e(K(δ)/K)`.
    pub bj_prime: u64,
    pub delta_degree: u8,
    pub model: DeltaModel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalEllipticInvariants {
    pub ord0: u64,
    pub ordinf: u64,
    pub alpha2: Option<u8>,
    pub alpha4: Option<u8>,
    pub bj_prime: Option<u64>,
    pub delta_degree: Option<u8>,
    pub fe: Option<u8>,
    pub ff: u64,
    pub fd: u64,
}

fn val(x: &LaurentSeries, what: &str) -> Result<i64> {
    x.valuation()
        .ok_or_else(|| Error::Precision(format!("{what} vanishes to O(t^{})", x.precision())))
}

/// `(ord0, ordinf, α₂ or α₄)`; the last entry is `Err(α₄)` when `j = 0`.
pub fn basic_orders(e: &WeierstrassModel) -> Result<(u64, u64, std::result::Result<u8, u8>)> {
    if e.is_j_zero() {
        let v4 = val(&e.a4, "a4")?;
        return Ok((0, 0, Err(v4.mod_floor(&4) as u8)));
    }
    let v2 = val(&e.a2, "a2")?;
    let vj = 6 * v2 - val(&e.discriminant(), "discriminant")?;
    Ok((
        vj.max(0) as u64,
        (-vj).max(0) as u64,
        Ok(v2.mod_floor(&2) as u8),
    ))
}

/// `√x` in `K(√x)`, together with the substitution that realizes that field.
struct DeltaField {
    model: DeltaModel,
    root: LaurentSeries,
    /// Carries a series over `K` into the model.
    lift: Box<dyn Fn(&LaurentSeries) -> LaurentSeries>,
}

fn delta_field(x: &LaurentSeries) -> Result<DeltaField> {
    let k = x.field().clone();
    let v = val(x, "discriminant")?;
    let c = x.leading();
    if v.rem_euclid(2) == 1 {
        // t = s^2 / c, so x = c^(1-v) s^(2v) (1 + ...), a square
        let root = x.substitute_ramified(c).sqrt()?.ok_or_else(|| {
            Error::Numerical("ramified model failed to produce a square root".into())
        })?;
        return Ok(DeltaField {
            model: DeltaModel::Ramified,
            root,
            lift: Box::new(move |y: &LaurentSeries| y.substitute_ramified(c)),
        });
    }
    if k.is_square(c) {
        let root = x
            .sqrt()?
            .ok_or_else(|| Error::Numerical("square root failed".into()))?;
        return Ok(DeltaField {
            model: DeltaModel::Trivial,
            root,
            lift: Box::new(|y: &LaurentSeries| y.clone()),
        });
    }
    let big = FiniteField::new(k.p(), 2 * k.degree())?;
    let emb = k.embedding_into(&big)?;
    let root = x.base_change(&big, &emb).sqrt()?.ok_or_else(|| {
        Error::Numerical("square root over the quadratic extension failed".into())
    })?;
    Ok(DeltaField {
        model: DeltaModel::Unramified,
        root,
        lift: Box::new(move |y: &LaurentSeries| y.base_change(&big, &emb)),
    })
}

/// The jump of `K(e_1, e_2, e_3) / K(δ)` from `T^3 - T = ξ`, with
/// `ξ = √Δ / a2^3 = 1/√j` when `j ≠ 0` and `ξ = a6 / √Δ` (`√Δ = a4 √(-a4)`) when `j = 0`.
pub fn jump(e: &WeierstrassModel) -> Result<Jump> {
    let disc = e.discriminant();
    let d = delta_field(&disc)?;
    let xi = if e.is_j_zero() {
        (d.lift)(&e.a6).div(&d.root)?
    } else {
        d.root.div(&(d.lift)(&e.a2).pow(3)?)?
    };
    let (_, bj) = xi.as_reduce()?;
    let (degree, ram) = match d.model {
        DeltaModel::Trivial => (1, 1),
        DeltaModel::Ramified => (2, 2),
        DeltaModel::Unramified => (2, 1),
    };
    if (2 * bj) % ram != 0 {
        return Err(Error::Numerical(format!(
            "jump {bj} is not compatible with ramification index {ram}"
        )));
    }
    Ok(Jump {
        bj,
        bj_prime: 2 * bj / ram,
        delta_degree: degree,
        model: d.model,
    })
}

fn compute(e: &WeierstrassModel) -> Result<LocalEllipticInvariants> {
    let (ord0, ordinf, alpha) = basic_orders(e)?;
    let (alpha2, alpha4) = match alpha {
        Ok(a) => (Some(a), None),
        Err(a) => (None, Some(a)),
    };
    if ordinf > 0 {
        let a2 = alpha2.unwrap() as u64;
        return Ok(LocalEllipticInvariants {
            ord0,
            ordinf,
            alpha2,
            alpha4,
            bj_prime: None,
            delta_degree: None,
            fe: None,
            ff: 1 + a2,
            fd: ordinf + 6 * a2,
        });
    }
    let fe: i64 = match (alpha2, alpha4) {
        (Some(a2), _) => (-(ord0 as i64) + 6 * a2 as i64).rem_euclid(12),
        (None, Some(a4)) => 3 * a4 as i64,
        _ => unreachable!(),
    };
    let j = jump(e)?;
    let bjp = j.bj_prime as i64;
    let fd = 12 * Integer::div_floor(&(10 - fe + bjp), &12) + fe;
    if fd < 0 {
        return Err(Error::Numerical(format!(
            "negative discriminant exponent {fd}"
        )));
    }
    let ff = if fd == 0 { 0 } else { 2 + j.bj_prime };
    Ok(LocalEllipticInvariants {
        ord0,
        ordinf,
        alpha2,
        alpha4,
        bj_prime: Some(j.bj_prime),
        delta_degree: Some(j.delta_degree),
        fe: Some(fe as u8),
        ff,
        fd: fd as u64,
    })
}

/// All local invariants, recomputed at half the input precision; a
/// disagreement or a failure at either precision is a precision error.
pub fn local_invariants(e: &WeierstrassModel) -> Result<LocalEllipticInvariants> {
    let full = compute(e)?;
    let half_prec = e.precision() / 2;
    let half = WeierstrassModel::new(
        e.a2.truncate(half_prec),
        e.a4.truncate(half_prec),
        e.a6.truncate(half_prec),
    )
    .and_then(|m| compute(&m))
    .map_err(|err| Error::Precision(format!("not stable at half precision {half_prec}: {err}")))?;
    if half != full {
        return Err(Error::Precision(format!(
            "invariants change between precision {half_prec} and {}",
            e.precision()
        )));
    }
    Ok(full)
}

pub fn conductor_exponent(e: &WeierstrassModel) -> Result<u64> {
    Ok(local_invariants(e)?.ff)
}

pub fn min_disc_exponent(e: &WeierstrassModel) -> Result<u64> {
    Ok(local_invariants(e)?.fd)
}

/// Tate's algorithm on the model, for comparison.
pub fn tate_oracle(e: &WeierstrassModel) -> Result<TateResult> {
    tate::tate_short(&e.a2, &e.a4, &e.a6)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaceRow {
    pub place: String,
    pub ff: u64,
    pub fd: u64,
}

/// `𝔉 = q^conductor`, `𝔇 = q^discriminant`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalEllipticHeights {
    pub conductor: u64,
    pub discriminant: u64,
    pub places: Vec<PlaceRow>,
}

fn strip_linear_factors(f: &Poly) -> Poly {
    let k = f.field();
    let mut g = f.clone();
    for c in k.elements() {
        let lin = Poly::new(k, vec![k.neg(c), Fe::ONE]);
        while let Some(h) = g.exact_div(&lin) {
            if g.degree().finite() == Some(0) {
                break;
            }
            g = h;
        }
    }
    g
}

/// Local data at every degree-1 place and infinity; heights are powers of `q`.
pub fn global_heights(
    a2: &RationalFunction,
    a4: &RationalFunction,
    a6: &RationalFunction,
    prec: i64,
) -> Result<GlobalEllipticHeights> {
    let k = a2.field().clone();
    let disc = {
        let a2sq = a2.mul(a2);
        a2sq.mul(a4)
            .mul(a4)
            .sub(&a2sq.mul(a2).mul(a6))
            .sub(&a4.mul(a4).mul(a4))
    };
    if disc.is_zero() {
        return Err(Error::Config("singular curve: discriminant is zero".into()));
    }
    for f in [disc.num(), disc.den(), a2.den(), a4.den(), a6.den()] {
        if !strip_linear_factors(f).is_constant() {
            return Err(Error::Unsupported(format!(
                "possible bad reduction at a place of degree > 1 dividing {f}"
            )));
        }
    }
    let mut places = Vec::new();
    let (mut cond, mut dsc) = (0, 0);
    for v in places_up_to(&k, 1) {
        let m = WeierstrassModel::new(
            a2.expand_at(&v, prec)?,
            a4.expand_at(&v, prec)?,
            a6.expand_at(&v, prec)?,
        )?;
        let inv = local_invariants(&m)?;
        if inv.ff > 0 || inv.fd > 0 {
            cond += inv.ff;
            dsc += inv.fd;
            places.push(PlaceRow {
                place: match &v {
                    Place::Infinite => "inf".into(),
                    _ => v.to_string(),
                },
                ff: inv.ff,
                fd: inv.fd,
            });
        }
    }
    Ok(GlobalEllipticHeights {
        conductor: cond,
        discriminant: dsc,
        places,
    })
}

/// Random integral model: each coefficient is `t^v` times a unit polynomial,
/// or zero; `a2 = 0` is drawn often enough to exercise `j = 0`.
pub fn random_integral_model<R: Rng>(
    field: &FiniteField,
    rng: &mut R,
    prec: i64,
) -> Result<WeierstrassModel> {
    let mut coeff = |vmax: i64, zero_weight: f64| {
        if rng.gen_bool(zero_weight) {
            return LaurentSeries::zero(field, prec);
        }
        let v = rng.gen_range(0..=vmax);
        let len = rng.gen_range(1..=4);
        let units: Vec<Fe> = field.units().collect();
        let mut terms = vec![(v, units[rng.gen_range(0..units.len())])];
        for i in 1..len {
            terms.push((
                v + i,
                field
                    .elements()
                    .nth(rng.gen_range(0..field.order() as usize))
                    .unwrap(),
            ));
        }
        LaurentSeries::from_terms(field, &terms, prec)
    };
    let a2 = coeff(5, 0.25);
    let a4 = coeff(8, 0.2);
    let a6 = coeff(10, 0.1);
    WeierstrassModel::new(a2, a4, a6)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TateMismatch {
    pub model: String,
    pub invariants: LocalEllipticInvariants,
    pub tate: TateResult,
}

/// Outcome of comparing the closed formulas with Tate's algorithm.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TateComparison {
    pub compared: u64,
    /// Draws rejected as singular or not stable at half precision.
    pub skipped: u64,
    pub multiplicative: u64,
    pub additive_potentially_good: u64,
    pub good: u64,
    pub mismatches: Vec<TateMismatch>,
}

impl TateComparison {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn describe(e: &WeierstrassModel) -> String {
    format!(
        "[{}, {}, {}]",
        e.a2.format_in("t"),
        e.a4.format_in("t"),
        e.a6.format_in("t")
    )
}

/// Compares `(ff, fd)` with Tate's algorithm on `count` stable random models.
pub fn compare_with_tate(
    field: &FiniteField,
    count: u64,
    seed: u64,
    prec: i64,
) -> Result<TateComparison> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TateComparison::default();
    while out.compared < count {
        if out.skipped > 20 * count {
            return Err(Error::Budget(format!(
                "too many unstable draws ({})",
                out.skipped
            )));
        }
        let Ok(e) = random_integral_model(field, &mut rng, prec) else {
            out.skipped += 1;
            continue;
        };
        let inv = match local_invariants(&e) {
            Ok(inv) => inv,
            Err(Error::Precision(_)) => {
                out.skipped += 1;
                continue;
            }
            Err(err) => return Err(err),
        };
        let tate = tate_oracle(&e)?;
        out.compared += 1;
        let ok = if inv.ordinf > 0 {
            out.multiplicative += 1;
            matches!(tate.kodaira, Kodaira::I(n) if n > 0)
                || matches!(tate.kodaira, Kodaira::IStar(n) if n > 0)
        } else if inv.fd == 0 {
            out.good += 1;
            tate.kodaira == Kodaira::I(0)
        } else {
            out.additive_potentially_good += 1;
            inv.ff == 2 + inv.bj_prime.unwrap_or(0)
        };
        if !ok || inv.fd != tate.min_disc || inv.ff != tate.conductor {
            out.mismatches.push(TateMismatch {
                model: describe(&e),
                invariants: inv,
                tate,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> FiniteField {
        FiniteField::prime(3).unwrap()
    }

    fn s(k: &FiniteField, x: &str) -> LaurentSeries {
        LaurentSeries::parse(k, x, 40).unwrap()
    }

    fn model(k: &FiniteField, a2: &str, a4: &str, a6: &str) -> WeierstrassModel {
        WeierstrassModel::new(s(k, a2), s(k, a4), s(k, a6)).unwrap()
    }

    #[test]
    fn j_invariant_examples() {
        let k = k3();
        // z^2 = w^3 + w^2 - 1/j0 has j = j0
        let e = model(&k, "1", "0", "2*t^-1 + 2");
        let j = e.j_invariant().unwrap();
        let expect = s(&k, "t^-1 + 1").inv().unwrap();
        assert_eq!(j.truncate(30), expect.truncate(30));
        // Legendre: a2 = -(1+λ), a4 = λ, a6 = 0
        let lam = s(&k, "2 + t");
        let one = s(&k, "1");
        let e = WeierstrassModel::new(
            lam.add(&one).neg(),
            lam.clone(),
            LaurentSeries::zero(&k, 40),
        )
        .unwrap();
        let lm1 = lam.sub(&one);
        let want = lam
            .add(&one)
            .pow(6)
            .unwrap()
            .div(&lam.mul(&lam).mul(&lm1).mul(&lm1))
            .unwrap();
        assert_eq!(e.j_invariant().unwrap().truncate(30), want.truncate(30));
        // λ = -1 gives j = 0
        let e = WeierstrassModel::new(
            LaurentSeries::zero(&k, 40),
            s(&k, "2"),
            LaurentSeries::zero(&k, 40),
        )
        .unwrap();
        assert!(e.is_j_zero());
    }

    #[test]
    fn basic_order_examples() {
        let k = k3();
        assert_eq!(
            basic_orders(&model(&k, "1", "0", "2*t")).unwrap(),
            (0, 1, Ok(0))
        );
        assert_eq!(
            basic_orders(&model(&k, "1", "0", "2*t^-1")).unwrap(),
            (1, 0, Ok(0))
        );
        assert_eq!(
            basic_orders(&model(&k, "0", "t^2", "1")).unwrap(),
            (0, 0, Err(2))
        );
    }

    #[test]
    fn jump_examples() {
        let k = k3();
        let j = jump(&model(&k, "1", "0", "2*t^-1")).unwrap();
        assert_eq!((j.bj, j.bj_prime, j.model), (1, 1, DeltaModel::Ramified));
        // j = t^2 with Δ = t^-2: δ trivial, ξ = t^-1
        let j = jump(&model(&k, "1", "0", "2*t^-2")).unwrap();
        assert_eq!((j.bj, j.bj_prime, j.model), (1, 2, DeltaModel::Trivial));
        // unit j = 1 (Δ = 1)
        let j = jump(&model(&k, "1", "0", "2")).unwrap();
        assert_eq!(j.bj_prime, 0);
    }

    #[test]
    fn closed_form_examples() {
        let k = k3();
        let good = local_invariants(&model(&k, "1", "0", "1")).unwrap();
        assert_eq!((good.ff, good.fd), (0, 0));
        let mult = local_invariants(&model(&k, "1", "0", "2*t")).unwrap();
        assert_eq!((mult.ff, mult.fd), (1, 1));
        let jt = local_invariants(&model(&k, "1", "0", "2*t^-1")).unwrap();
        assert_eq!((jt.fe, jt.ff, jt.fd), (Some(11), 3, 11));
        let jt2 = local_invariants(&model(&k, "1", "0", "2*t^-2")).unwrap();
        assert_eq!((jt2.ff, jt2.fd), (4, 10));
    }

    #[test]
    fn unramified_delta_uses_ramification_index() {
        // Δ = 2 t^-2 has a nonsquare leading coefficient over F_3
        let k = k3();
        let e = model(&k, "1", "0", "t^-2");
        let j = jump(&e).unwrap();
        assert_eq!(
            (j.model, j.delta_degree, j.bj, j.bj_prime),
            (DeltaModel::Unramified, 2, 1, 2)
        );
        let inv = local_invariants(&e).unwrap();
        let oracle = tate_oracle(&e).unwrap();
        assert_eq!((inv.fd, inv.ff), (oracle.min_disc, oracle.conductor));
    }

    #[test]
    fn global_examples() {
        let k = k3();
        let rf = |x: &str| RationalFunction::parse(&k, x).unwrap();
        let good = global_heights(&rf("1"), &rf("0"), &rf("1"), 30).unwrap();
        assert_eq!((good.conductor, good.discriminant), (0, 0));
        // j = t: z^2 = w^3 + w^2 - 1/t
        let h = global_heights(&rf("1"), &rf("0"), &rf("2/t"), 30).unwrap();
        assert_eq!((h.conductor, h.discriminant), (4, 12));
        assert_eq!(
            h.places,
            vec![
                PlaceRow {
                    place: "t".into(),
                    ff: 3,
                    fd: 11
                },
                PlaceRow {
                    place: "inf".into(),
                    ff: 1,
                    fd: 1
                },
            ]
        );
        let h = global_heights(&rf("1"), &rf("0"), &rf("2*t"), 30).unwrap();
        assert_eq!(
            h.places[0],
            PlaceRow {
                place: "t".into(),
                ff: 1,
                fd: 1
            }
        );
        assert!(global_heights(&rf("1"), &rf("0"), &rf("1/(t^2 + 1)"), 30).is_err());
    }

    #[test]
    fn invariant_under_coordinate_change_and_unramified_base_change() {
        let k = k3();
        let f9 = FiniteField::with_order(9).unwrap();
        for (a2, a4, a6) in [
            ("1", "0", "2*t^-1"),
            ("1 + t", "t^3", "t^5"),
            ("0", "t^2", "1 + t"),
            ("t", "t", "t^4"),
        ] {
            let e = model(&k, a2, a4, a6);
            let base = local_invariants(&e).unwrap();
            let moved = e
                .change_coordinates(&s(&k, "t + t^2"), &s(&k, "1 + 2*t"))
                .unwrap();
            let inv = local_invariants(&moved).unwrap();
            assert_eq!((inv.ff, inv.fd), (base.ff, base.fd));
            let up = local_invariants(&e.base_change(&f9).unwrap()).unwrap();
            assert_eq!((up.ff, up.fd), (base.ff, base.fd));
        }
    }

    #[test]
    fn general_models_reduce_to_short_form() {
        let k = k3();
        let e = model(&k, "1 + t", "t^3", "t^5");
        let g = change_general(
            &e.general(),
            &s(&k, "1"),
            &s(&k, "t"),
            &s(&k, "1 + t"),
            &s(&k, "t^2"),
        )
        .unwrap();
        let back = WeierstrassModel::from_general(&g).unwrap();
        assert_eq!(
            local_invariants(&back).unwrap(),
            local_invariants(&e).unwrap()
        );
        assert_eq!(
            tate::tate_minimal_disc(&g).unwrap().min_disc,
            local_invariants(&e).unwrap().fd
        );
    }

    #[test]
    fn agrees_with_tate_on_random_models() {
        for q in [3, 9] {
            let k = FiniteField::with_order(q).unwrap();
            let rep = compare_with_tate(&k, 60, 7, 40).unwrap();
            assert!(rep.multiplicative > 0 && rep.good > 0 && rep.additive_potentially_good > 0);
            assert!(
                rep.passed(),
                "{:#?}",
                &rep.mismatches[..rep.mismatches.len().min(3)]
            );
        }
    }
}
