//! Global counts over `F = F_q(t)`: Artin–Schreier classes for `(Z/p)^r`
//! under conductor and discriminant heights, points of `P^1`, and square
//! classes in odd characteristic.
//!
//! Every class in `F / ℘F` has a unique representative
//! `c + Σ_v Σ_{p∤k} a_{v,k}/π_v^k + Σ_{p∤k} a_k t^k` with `deg a_{v,k} < deg π_v`
//! and `c` drawn from a fixed transversal of `F_q / ℘F_q`.  Partial
//! fractions commute with Frobenius, so the class group splits as constants
//! times a product of local polar groups, and only pole orders matter for
//! the heights.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::place::{places_up_to, Place};
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightKind {
    Conductor,
    Discriminant,
}

impl std::str::FromStr for HeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conductor" => Ok(HeightKind::Conductor),
            "discriminant" | "disc" => Ok(HeightKind::Discriminant),
            _ => Err(Error::Parse(format!("unknown height `{s}`"))),
        }
    }
}

/// Polar part at one place: `Σ a_k / π^k` (finite) or `Σ a_k t^k` (infinity),
/// with `p ∤ k` and nonzero coefficients only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPart {
    pub place: Place,
    pub terms: Vec<(u64, Poly)>,
}

impl LocalPart {
    pub fn pole_order(&self) -> u64 {
        self.terms.iter().map(|(k, _)| *k).max().unwrap_or(0)
    }

    fn coeff(&self, k: u64) -> Option<&Poly> {
        self.terms.iter().find(|(j, _)| *j == k).map(|(_, a)| a)
    }
}

/// One Artin–Schreier class in normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsForm {
    pub constant: Fe,
    /// Nonzero local parts, sorted by place.
    pub parts: Vec<LocalPart>,
}

impl AsForm {
    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.parts.is_empty()
    }

    pub fn part_at(&self, v: &Place) -> Option<&LocalPart> {
        self.parts.iter().find(|lp| &lp.place == v)
    }

    /// The representative as a rational function.
    pub fn to_rational_function(&self, field: &FiniteField) -> RationalFunction {
        let mut acc = RationalFunction::from_poly(Poly::constant(field, self.constant));
        for lp in &self.parts {
            for (k, a) in &lp.terms {
                let term = match &lp.place {
                    Place::Infinite => RationalFunction::from_poly(
                        a * &Poly::monomial(field, Fe::ONE, *k as usize),
                    ),
                    Place::Finite(pi) => {
                        RationalFunction::new(a.clone(), pi.pow(*k as u32)).expect("nonzero place")
                    }
                };
                acc = acc.add(&term);
            }
        }
        acc
    }

    /// `Σ λ_i x_i` over `F_p`.
    pub fn combine(field: &FiniteField, xs: &[AsForm], lambda: &[u32]) -> AsForm {
        let mut constant = Fe::ZERO;
        let mut parts: BTreeMap<Place, BTreeMap<u64, Poly>> = BTreeMap::new();
        for (x, &l) in xs.iter().zip(lambda) {
            if l == 0 {
                continue;
            }
            let s = field.from_int(l as i64);
            constant = field.add(constant, field.mul(s, x.constant));
            for lp in &x.parts {
                let slot = parts.entry(lp.place.clone()).or_default();
                for (k, a) in &lp.terms {
                    let cur = slot.remove(k).unwrap_or_else(|| Poly::zero(field));
                    let sum = &cur + &a.scale(s);
                    if !sum.is_zero() {
                        slot.insert(*k, sum);
                    }
                }
            }
        }
        let parts = parts
            .into_iter()
            .filter(|(_, t)| !t.is_empty())
            .map(|(place, t)| LocalPart {
                place,
                terms: t.into_iter().collect(),
            })
            .collect();
        AsForm { constant, parts }
    }
}

/// A class of `H^1(F, (Z/p)^r)`, one normal form per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalASClass {
    pub field: FiniteField,
    pub components: Vec<AsForm>,
}

impl GlobalASClass {
    pub fn r(&self) -> usize {
        self.components.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(AsForm::is_zero)
    }

    /// Nontrivial but unramified everywhere (a constant field extension).
    pub fn is_constant(&self) -> bool {
        !self.is_trivial() && self.components.iter().all(|c| c.parts.is_empty())
    }

    /// Places where some coordinate has a polar part.
    pub fn support(&self) -> Vec<Place> {
        let mut v: Vec<Place> = self
            .components
            .iter()
            .flat_map(|c| c.parts.iter().map(|lp| lp.place.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Reduced pole order at `v` of the class `χ(x)` for a character `χ`.
    fn character_pole(&self, v: &Place, chi: &[u32]) -> u64 {
        let k = &self.field;
        let mut orders: Vec<u64> = self
            .components
            .iter()
            .filter_map(|c| c.part_at(v))
            .flat_map(|lp| lp.terms.iter().map(|(j, _)| *j))
            .collect();
        orders.sort_unstable_by(|a, b| b.cmp(a));
        orders.dedup();
        for j in orders {
            let mut s = Poly::zero(k);
            for (c, &l) in self.components.iter().zip(chi) {
                if let Some(a) = c.part_at(v).and_then(|lp| lp.coeff(j)) {
                    s = &s + &a.scale(k.from_int(l as i64));
                }
            }
            if !s.is_zero() {
                return j;
            }
        }
        0
    }
}

impl fmt::Display for GlobalASClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| c.to_rational_function(&self.field).to_string())
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A point with its local exponents; the height is `q^log_q_height`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightedPoint {
    pub exponents: Vec<(Place, u64)>,
    pub log_q_height: u64,
    pub constant: bool,
}

impl HeightedPoint {
    pub fn height(&self, q: u32) -> BigUint {
        BigUint::from(q).pow(self.log_q_height as u32)
    }
}

fn characters(p: u32, r: usize) -> Vec<Vec<u32>> {
    let n = (p as usize).pow(r as u32);
    (0..n)
        .map(|mut c| {
            (0..r)
                .map(|_| {
                    let d = (c % p as usize) as u32;
                    c /= p as usize;
                    d
                })
                .collect()
        })
        .collect()
}

fn heighted(x: &GlobalASClass, kind: HeightKind) -> HeightedPoint {
    let p = x.field.p();
    let chars = characters(p, x.r());
    let mut exponents = Vec::new();
    for v in x.support() {
        let c = match kind {
            HeightKind::Conductor => {
                let m = x
                    .components
                    .iter()
                    .filter_map(|c| c.part_at(&v))
                    .map(LocalPart::pole_order)
                    .max()
                    .unwrap_or(0);
                if m == 0 {
                    0
                } else {
                    m + 1
                }
            }
            HeightKind::Discriminant => chars
                .iter()
                .skip(1)
                .map(|chi| match x.character_pole(&v, chi) {
                    0 => 0,
                    m => m + 1,
                })
                .sum(),
        };
        if c > 0 {
            exponents.push((v, c));
        }
    }
    let log_q_height = exponents.iter().map(|(v, c)| v.degree() as u64 * c).sum();
    HeightedPoint {
        exponents,
        log_q_height,
        constant: x.is_constant(),
    }
}

/// Local rule: reduced pole order `m` gives exponent `m + 1`.
pub fn conductor_height(x: &GlobalASClass) -> HeightedPoint {
    heighted(x, HeightKind::Conductor)
}

/// Conductor-discriminant sum over the nonzero characters, place by place.
pub fn discriminant_height(x: &GlobalASClass) -> HeightedPoint {
    heighted(x, HeightKind::Discriminant)
}

pub fn height_of(x: &GlobalASClass, kind: HeightKind) -> HeightedPoint {
    heighted(x, kind)
}

/// The fixed transversal of `F_q / ℘F_q`.
pub fn constant_representatives(field: &FiniteField) -> Vec<Fe> {
    field
        .elements()
        .filter(|&x| field.wp_reduce(x) == x)
        .collect()
}

fn allowed_orders(p: u32, max_order: u64) -> Vec<u64> {
    (1..=max_order).filter(|k| k % p as u64 != 0).collect()
}

fn local_parts(field: &FiniteField, v: &Place, orders: &[u64]) -> Vec<Option<LocalPart>> {
    let coeffs: Vec<Poly> = match v {
        Place::Infinite => field.elements().map(|c| Poly::constant(field, c)).collect(),
        Place::Finite(pi) => Poly::all_below_degree(field, pi.degree().finite().unwrap()).collect(),
    };
    let mut out: Vec<Vec<(u64, Poly)>> = vec![Vec::new()];
    for &k in orders {
        out = out
            .into_iter()
            .flat_map(|terms| {
                coeffs.iter().map(move |a| {
                    let mut t = terms.clone();
                    if !a.is_zero() {
                        t.push((k, a.clone()));
                    }
                    t
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|terms| {
            (!terms.is_empty()).then(|| LocalPart {
                place: v.clone(),
                terms,
            })
        })
        .collect()
}

/// All normal forms with polar support on `∞` and the finite places of
/// degree `<= support_deg`, pole orders `<= max_order`.
pub fn enumerate_forms(
    field: &FiniteField,
    support_deg: usize,
    max_order: u64,
    budget: u64,
) -> Result<Vec<AsForm>> {
    let places = places_up_to(field, support_deg);
    let orders = allowed_orders(field.p(), max_order);
    let mut total = BigUint::from(field.p());
    for v in &places {
        total *= BigUint::from(v.residue_order(field.order())).pow(orders.len() as u32);
    }
    if total > BigUint::from(budget) {
        return Err(Error::Budget(format!(
            "{total} normal forms exceed the budget of {budget}"
        )));
    }
    let mut forms: Vec<Vec<LocalPart>> = vec![Vec::new()];
    for v in &places {
        let locals = local_parts(field, v, &orders);
        forms = forms
            .into_iter()
            .flat_map(|f| {
                locals.iter().map(move |lp| {
                    let mut g = f.clone();
                    g.extend(lp.clone());
                    g
                })
            })
            .collect();
    }
    let consts = constant_representatives(field);
    Ok(consts
        .iter()
        .flat_map(|&c| {
            forms.iter().map(move |parts| AsForm {
                constant: c,
                parts: parts.clone(),
            })
        })
        .collect())
}

/// All classes of `(Z/p)^r` built from [`enumerate_forms`], in lexicographic
/// order of the coordinates; the trivial class comes first.
pub fn enumerate_as_classes(
    field: &FiniteField,
    r: usize,
    support_deg: usize,
    max_order: u64,
    budget: u64,
) -> Result<Vec<GlobalASClass>> {
    if r == 0 {
        return Err(Error::Config("rank must be positive".into()));
    }
    let forms = enumerate_forms(field, support_deg, max_order, budget)?;
    let total = BigUint::from(forms.len()).pow(r as u32);
    if total > BigUint::from(budget) {
        return Err(Error::Budget(format!(
            "{total} classes exceed the budget of {budget}"
        )));
    }
    let n = forms.len();
    let count = n.pow(r as u32);
    Ok((0..count)
        .map(|mut code| {
            let mut comps = vec![
                AsForm {
                    constant: Fe::ZERO,
                    parts: Vec::new()
                };
                r
            ];
            for slot in comps.iter_mut().rev() {
                *slot = forms[code % n].clone();
                code /= n;
            }
            GlobalASClass {
                field: field.clone(),
                components: comps,
            }
        })
        .collect())
}

/// Heights for a batch of classes, in input order.
pub fn heights(classes: &[GlobalASClass], kind: HeightKind) -> Vec<HeightedPoint> {
    classes.par_iter().map(|x| heighted(x, kind)).collect()
}

/// Smallest exponent a ramified place of degree 1 can carry, and the
/// per-unit-of-pole-order weight.
fn height_weights(p: u32, r: u32, kind: HeightKind) -> u64 {
    match kind {
        HeightKind::Conductor => 1,
        HeightKind::Discriminant => (p as u64).pow(r) - (p as u64).pow(r - 1),
    }
}

fn log_floor(q: u32, b: u128) -> u64 {
    let mut e = 0;
    let mut x: u128 = q as u128;
    while x <= b {
        e += 1;
        x = match x.checked_mul(q as u128) {
            Some(y) => y,
            None => break,
        };
    }
    e
}

/// Least `(support degree, pole order)` an enumeration needs to contain
/// every class of height `<= bmax`.
pub fn coverage_requirements(
    field: &FiniteField,
    r: u32,
    kind: HeightKind,
    bmax: u128,
) -> (usize, u64) {
    let l = log_floor(field.order(), bmax);
    let w = height_weights(field.p(), r, kind);
    let p = field.p() as u64;
    let need_order = (1..=(l / w).saturating_sub(1))
        .rev()
        .find(|m| m % p != 0)
        .unwrap_or(0);
    ((l / (2 * w)) as usize, need_order)
}

/// Fails unless every class of height `<= bmax` has support degree
/// `<= support_deg` and pole orders `<= max_order`.
pub fn certify_coverage(
    field: &FiniteField,
    r: u32,
    kind: HeightKind,
    support_deg: usize,
    max_order: u64,
    bmax: u128,
) -> Result<()> {
    let (need_deg, need_order) = coverage_requirements(field, r, kind, bmax);
    if support_deg < need_deg || max_order < need_order {
        let l = log_floor(field.order(), bmax);
        return Err(Error::Coverage(format!(
            "heights up to q^{l} need support degree {need_deg} and pole order {need_order}, \
             enumeration has {support_deg} and {max_order}"
        )));
    }
    Ok(())
}

/// `N(B)` for each `B`; nontrivial constant classes are dropped unless
/// `include_constant`.
pub fn count_table(
    q: u32,
    points: &[HeightedPoint],
    bs: &[u128],
    include_constant: bool,
) -> Vec<(u128, u64)> {
    let mut hs: Vec<u64> = points
        .iter()
        .filter(|x| include_constant || !x.constant)
        .map(|x| x.log_q_height)
        .collect();
    hs.sort_unstable();
    bs.iter()
        .map(|&b| {
            let l = if b == 0 { None } else { Some(log_floor(q, b)) };
            let n = match l {
                None => 0,
                Some(l) => hs.partition_point(|&h| h <= l) as u64,
            };
            (b, n)
        })
        .collect()
}

/// Counts of classes by `(degree, exponent)` support pattern.
pub fn pattern_census(points: &[HeightedPoint]) -> BTreeMap<Vec<(usize, u64)>, u64> {
    let mut out = BTreeMap::new();
    for x in points {
        let mut key: Vec<(usize, u64)> =
            x.exponents.iter().map(|(v, c)| (v.degree(), *c)).collect();
        key.sort_unstable();
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

fn gauss(n: u32, k: u32, p: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= p.pow(n - i) - 1;
        den *= p.pow(i + 1) - 1;
    }
    num / den
}

/// Local census at a place with residue field `F_p^n`: entry `c` counts
/// tuples of `r` polar parts (normal form) with local exponent `c`, for
/// `c <= wmax`.
///
/// Only kernels matter: for each pole order `k` the coefficients form a
/// linear map `F_p^r → F_p^n`, and the characters with jump `< k` are the
/// common kernel of the maps in orders `>= k`.  The state is the dimension
/// of that kernel.
pub fn local_census(p: u32, n: u32, r: u32, kind: HeightKind, wmax: u64) -> Result<Vec<u128>> {
    let pp = p as u128;
    let w = height_weights(p, r, kind);
    let top = (wmax / w).max(1);
    let orders: Vec<u64> = allowed_orders(p, top).into_iter().rev().collect();
    let qn = pp
        .checked_pow(n)
        .ok_or_else(|| Error::Budget("residue field too large".into()))?;
    // state: (dim of undetermined characters, exponent so far) -> count
    let mut states: BTreeMap<(u32, u64), u128> = BTreeMap::new();
    states.insert((r, 0), 1);
    for &k in &orders {
        let mut next: BTreeMap<(u32, u64), u128> = BTreeMap::new();
        for (&(d, acc), &cnt) in &states {
            let free = qn
                .checked_pow(r - d)
                .ok_or_else(|| Error::Budget("local count overflow".into()))?;
            for d2 in 0..=d {
                let drop = d - d2;
                if drop > n {
                    continue;
                }
                let inj: u128 = (0..drop).map(|i| qn - pp.pow(i)).product();
                let ways = gauss(d, d2, pp)
                    .checked_mul(inj)
                    .and_then(|x| x.checked_mul(free))
                    .and_then(|x| x.checked_mul(cnt))
                    .ok_or_else(|| Error::Budget("local count overflow".into()))?;
                let add = match kind {
                    HeightKind::Conductor if d == r && d2 < r => k + 1,
                    HeightKind::Conductor => 0,
                    HeightKind::Discriminant => (k + 1) * (pp.pow(d) - pp.pow(d2)) as u64,
                };
                let e = acc + add;
                if e <= wmax {
                    *next.entry((d2, e)).or_insert(0) += ways;
                }
            }
        }
        states = next;
    }
    let mut out = vec![0u128; wmax as usize + 1];
    for ((_, e), c) in states {
        out[e as usize] += c;
    }
    Ok(out)
}

/// Number of monic irreducible polynomials of degree `d` over `F_q`.
pub fn irreducible_count(q: u64, d: u32) -> u128 {
    fn mobius(mut n: u32) -> i128 {
        let mut m = 1;
        let mut f = 2;
        while f * f <= n {
            if n % f == 0 {
                n /= f;
                if n % f == 0 {
                    return 0;
                }
                m = -m;
            }
            f += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    }
    let s: i128 = (1..=d)
        .filter(|e| d % e == 0)
        .map(|e| mobius(d / e) * (q as i128).pow(e))
        .sum();
    (s / d as i128) as u128
}

fn poly_mul_trunc(a: &[u128], b: &[u128], lmax: usize) -> Result<Vec<u128>> {
    let mut out = vec![0u128; lmax + 1];
    for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
        for (j, &y) in b.iter().enumerate().take(lmax + 1 - i) {
            out[i + j] = x
                .checked_mul(y)
                .and_then(|z| z.checked_add(out[i + j]))
                .ok_or_else(|| Error::Budget("global count overflow".into()))?;
        }
    }
    Ok(out)
}

fn poly_pow_trunc(a: &[u128], mut e: u128, lmax: usize) -> Result<Vec<u128>> {
    let mut out = vec![0u128; lmax + 1];
    out[0] = 1;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            out = poly_mul_trunc(&out, &base, lmax)?;
        }
        e >>= 1;
        if e > 0 {
            base = poly_mul_trunc(&base, &base, lmax)?;
        }
    }
    Ok(out)
}

/// Entry `e` counts classes of height exactly `q^e`, for `e <= lmax`.
pub fn as_height_census(
    field: &FiniteField,
    r: u32,
    kind: HeightKind,
    lmax: u64,
    include_constant: bool,
) -> Result<Vec<u128>> {
    let p = field.p();
    let f = field.degree();
    let w = height_weights(p, r, kind);
    let lm = lmax as usize;
    let mut total = vec![0u128; lm + 1];
    total[0] = 1;
    let max_deg = lmax / (2 * w);
    for d in 1..=max_deg {
        let local = local_census(p, f * d as u32, r, kind, lmax / d)?;
        let mut spread = vec![0u128; lm + 1];
        for (c, &n) in local.iter().enumerate() {
            if c as u64 * d <= lmax {
                spread[c * d as usize] = n;
            }
        }
        let mut places = irreducible_count(field.order() as u64, d as u32);
        if d == 1 {
            places += 1;
        }
        total = poly_mul_trunc(&total, &poly_pow_trunc(&spread, places, lm)?, lm)?;
    }
    let consts = (p as u128).pow(r);
    for x in total.iter_mut() {
        *x = x
            .checked_mul(consts)
            .ok_or_else(|| Error::Budget("global count overflow".into()))?;
    }
    if !include_constant {
        total[0] -= consts - 1;
    }
    Ok(total)
}

/// `N(q^e)` for `e = 0..=lmax`.
pub fn as_count_table(
    field: &FiniteField,
    r: u32,
    kind: HeightKind,
    lmax: u64,
    include_constant: bool,
) -> Result<Vec<(u128, u128)>> {
    let census = as_height_census(field, r, kind, lmax, include_constant)?;
    let q = field.order() as u128;
    let mut acc = 0u128;
    Ok(census
        .iter()
        .enumerate()
        .map(|(e, &n)| {
            acc += n;
            (q.pow(e as u32), acc)
        })
        .collect())
}

/// Points of `P^1(F_q(t))` by exact height exponent `max(deg f, deg g)`,
/// by enumerating coprime pairs with the lower coordinate monic, plus `(1:0)`.
pub fn p1_census(field: &FiniteField, kmax: u32, budget: u64) -> Result<Vec<u64>> {
    let q = field.order() as u64;
    let work = q.checked_pow(2 * kmax + 2).unwrap_or(u64::MAX);
    if work > budget {
        return Err(Error::Budget(format!(
            "P^1 enumeration needs {work} pairs, budget {budget}"
        )));
    }
    let kmax = kmax as usize;
    let mut out = vec![0u64; kmax + 1];
    out[0] += 1;
    let gs: Vec<Poly> = (0..=kmax)
        .flat_map(|d| Poly::monics_of_degree(field, d))
        .collect();
    let fs: Vec<Poly> = Poly::all_below_degree(field, kmax + 1).collect();
    let rows: Vec<Vec<u64>> = gs
        .par_iter()
        .map(|g| {
            let mut row = vec![0u64; kmax + 1];
            let dg = g.degree().finite().unwrap();
            for f in &fs {
                if g.gcd(f).is_constant() {
                    let df = f.degree().finite().unwrap_or(0);
                    row[dg.max(df)] += 1;
                }
            }
            row
        })
        .collect();
    for row in rows {
        for (o, x) in out.iter_mut().zip(row) {
            *o += x;
        }
    }
    Ok(out)
}

/// `#{x in P^1(F_q(t)) : H(x) <= B}` with `H = q^{max(deg f, deg g)}`.
pub fn count_p1(field: &FiniteField, b: u128, budget: u64) -> Result<u64> {
    if b == 0 {
        return Ok(0);
    }
    let k = log_floor(field.order(), b) as u32;
    Ok(p1_census(field, k, budget)?.iter().sum())
}

/// Square classes of `F_q(t)^*` by total ramified degree: entry `R` counts
/// classes `u·D` (`u` mod squares, `D` monic squarefree) ramified at the
/// places of `D` and at infinity when `deg D` is odd.
pub fn mu2_census(field: &FiniteField, rmax: u32, budget: u64) -> Result<Vec<u64>> {
    if field.p() == 2 {
        return Err(Error::Config(
            "square classes need odd characteristic".into(),
        ));
    }
    let q = field.order() as u64;
    let work = q.checked_pow(rmax + 1).unwrap_or(u64::MAX);
    if work > budget {
        return Err(Error::Budget(format!(
            "square-class enumeration needs {work} polynomials, budget {budget}"
        )));
    }
    let mut out = vec![0u64; rmax as usize + 1];
    for d in 0..=rmax as usize {
        let ram = d + d % 2;
        if ram > rmax as usize {
            continue;
        }
        let n = Poly::monics_of_degree(field, d)
            .par_bridge()
            .filter(|f| f.is_squarefree())
            .count() as u64;
        out[ram] += 2 * n;
    }
    Ok(out)
}

fn q_power_le(q: u32, exp: Rational64, b: u128) -> bool {
    // q^(n/d) <= b  <=>  q^n <= b^d
    let n = *exp.numer();
    let d = *exp.denom();
    if n <= 0 {
        return b >= 1;
    }
    BigUint::from(q).pow(n as u32) <= BigUint::from(b).pow(d as u32)
}

/// `#{square classes : Π_{v ramified} q_v^{c0} <= B}`, counting both
/// unramified classes at height 1.
pub fn count_mu2_classes(field: &FiniteField, b: u128, c0: Rational64, budget: u64) -> Result<u64> {
    if c0 <= Rational64::zero() {
        return Err(Error::Config("c0 must be positive".into()));
    }
    if b == 0 {
        return Ok(0);
    }
    let l = log_floor(field.order(), b) as i64;
    let rmax = (Rational64::from(l) / c0).floor().to_integer().max(0) as u32;
    let census = mu2_census(field, rmax, budget)?;
    Ok(census
        .iter()
        .enumerate()
        .filter(|(rd, _)| q_power_le(field.order(), c0 * Rational64::from(*rd as i64), b))
        .map(|(_, n)| n)
        .sum())
}

/// Heights `q^{d·k}` of `P^1` points under `O(d)`.
pub fn p1_multiset(
    field: &FiniteField,
    kmax: u32,
    d: u32,
    budget: u64,
) -> Result<crate::asymptotics::HeightMultiset> {
    let q = field.order() as f64;
    let census = p1_census(field, kmax, budget)?;
    crate::asymptotics::HeightMultiset::new(
        census
            .iter()
            .enumerate()
            .map(|(k, &n)| (q.powi((d as usize * k) as i32), n))
            .collect(),
    )
}

/// Heights `q^{c0·R}` of square classes.
pub fn mu2_multiset(
    field: &FiniteField,
    rmax: u32,
    c0: Rational64,
    budget: u64,
) -> Result<crate::asymptotics::HeightMultiset> {
    let q = field.order() as f64;
    let c = c0.to_f64().unwrap_or(f64::NAN);
    let census = mu2_census(field, rmax, budget)?;
    crate::asymptotics::HeightMultiset::new(
        census
            .iter()
            .enumerate()
            .map(|(rd, &n)| (q.powf(c * rd as f64), n))
            .collect(),
    )
}

pub fn write_table_csv<W: Write, T: fmt::Display>(out: W, rows: &[(u128, T)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["B", "count"])?;
    for (b, n) in rows {
        w.write_record([b.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{torsor_count, AbelianPGroup};

    fn f(q: u32) -> FiniteField {
        FiniteField::with_order(q).unwrap()
    }

    const BUDGET: u64 = 5_000_000;

    #[test]
    fn enumeration_sizes() {
        let k = f(2);
        assert_eq!(enumerate_as_classes(&k, 1, 0, 1, BUDGET).unwrap().len(), 4);
        assert_eq!(enumerate_as_classes(&k, 1, 1, 1, BUDGET).unwrap().len(), 16);
        assert_eq!(enumerate_as_classes(&k, 1, 1, 0, BUDGET).unwrap().len(), 2);
        assert_eq!(constant_representatives(&f(4)).len(), 2);
        assert_eq!(constant_representatives(&f(9)).len(), 3);
        assert!(matches!(
            enumerate_as_classes(&k, 2, 3, 5, 1000),
            Err(Error::Budget(_))
        ));
        let xs = enumerate_as_classes(&k, 1, 1, 1, BUDGET).unwrap();
        assert!(xs[0].is_trivial());
    }

    #[test]
    fn height_examples() {
        let k = f(2);
        let t = Poly::t(&k);
        let form = |parts: Vec<LocalPart>| AsForm {
            constant: Fe::ZERO,
            parts,
        };
        let one = Poly::one(&k);
        let cls = |c: Vec<AsForm>| GlobalASClass {
            field: k.clone(),
            components: c,
        };
        let triv = cls(vec![form(vec![])]);
        assert_eq!(conductor_height(&triv).log_q_height, 0);
        let at_inf = cls(vec![form(vec![LocalPart {
            place: Place::Infinite,
            terms: vec![(1, one.clone())],
        }])]);
        assert_eq!(conductor_height(&at_inf).height(2), BigUint::from(4u32));
        assert_eq!(at_inf.to_string(), "(t)");
        let v0 = Place::finite(t.clone()).unwrap();
        let v1 = Place::finite(&t + &one).unwrap();
        let two = cls(vec![form(vec![
            LocalPart {
                place: v0.clone(),
                terms: vec![(1, one.clone())],
            },
            LocalPart {
                place: v1,
                terms: vec![(1, one.clone())],
            },
        ])]);
        assert_eq!(conductor_height(&two).height(2), BigUint::from(16u32));
        let pair = cls(vec![
            form(vec![LocalPart {
                place: v0,
                terms: vec![(1, one.clone())],
            }]),
            form(vec![]),
        ]);
        assert_eq!(discriminant_height(&pair).height(2), BigUint::from(16u32));
        let k3 = f(3);
        let t_over_f3 = GlobalASClass {
            field: k3.clone(),
            components: vec![AsForm {
                constant: Fe::ZERO,
                parts: vec![LocalPart {
                    place: Place::Infinite,
                    terms: vec![(1, Poly::one(&k3))],
                }],
            }],
        };
        assert_eq!(
            discriminant_height(&t_over_f3).height(3),
            BigUint::from(81u32)
        );
    }

    #[test]
    fn count_table_examples() {
        let k = f(2);
        let xs = enumerate_as_classes(&k, 1, 1, 1, BUDGET).unwrap();
        let pts = heights(&xs, HeightKind::Conductor);
        assert_eq!(count_table(2, &pts, &[1, 4], true), vec![(1, 2), (4, 8)]);
        assert_eq!(count_table(2, &pts, &[1, 4], false), vec![(1, 1), (4, 7)]);
        assert_eq!(count_table(2, &[], &[100], true), vec![(100, 0)]);
        assert!(certify_coverage(&k, 1, HeightKind::Conductor, 1, 1, 4).is_ok());
        assert!(matches!(
            certify_coverage(&k, 1, HeightKind::Conductor, 1, 1, 64),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn normal_forms_are_distinct_classes() {
        // a nonzero difference must be ramified somewhere or have nonzero trace
        for q in [2, 3, 4] {
            let k = f(q);
            let xs = enumerate_forms(&k, 1, 2, BUDGET).unwrap();
            let places = places_up_to(&k, 1);
            let stride = (xs.len() / 40).max(1);
            for (i, a) in xs.iter().enumerate().step_by(stride) {
                for b in xs.iter().skip(i + 1).step_by(stride + 1) {
                    let diff = AsForm::combine(&k, &[a.clone(), b.clone()], &[1, k.p() - 1]);
                    let rf = diff.to_rational_function(&k);
                    let ramified = places.iter().any(|v| {
                        let s = rf.expand_at(v, 4).unwrap();
                        s.as_reduce().unwrap().1 > 0
                    });
                    assert!(
                        ramified || !k.trace(diff.constant).is_zero(),
                        "{a:?} ~ {b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn pole_orders_match_series_reduction() {
        let k = f(3);
        let xs = enumerate_forms(&k, 1, 4, BUDGET).unwrap();
        for x in xs.iter().step_by(37) {
            let rf = x.to_rational_function(&k);
            for v in places_up_to(&k, 1) {
                let expect = x.part_at(&v).map_or(0, LocalPart::pole_order);
                assert_eq!(rf.expand_at(&v, 2).unwrap().as_reduce().unwrap().1, expect);
            }
        }
    }

    #[test]
    fn local_global_consistency() {
        for (q, r, mo) in [(2, 1, 5), (3, 1, 3), (4, 1, 2), (2, 2, 3)] {
            let k = f(q);
            let g = AbelianPGroup::elementary(k.p(), r).unwrap();
            let xs = enumerate_as_classes(&k, r as usize, 1, mo, BUDGET).unwrap();
            for v in places_up_to(&k, 1) {
                let mut census = vec![0u64; mo as usize + 2];
                for x in &xs {
                    let sup = x.support();
                    if sup.is_empty() || sup == [v.clone()] {
                        let c = conductor_height(x).log_q_height;
                        census[c as usize] += 1;
                    }
                }
                for (n, &got) in census.iter().enumerate() {
                    let want = torsor_count(&g, &k, n as u64).unwrap();
                    assert_eq!(BigUint::from(got), want, "q={q} r={r} v={v} n={n}");
                }
            }
        }
    }

    #[test]
    fn census_matches_enumeration() {
        for (q, r, kind, sd, mo, lmax) in [
            (2, 1, HeightKind::Conductor, 2, 3, 4),
            (3, 1, HeightKind::Conductor, 1, 2, 3),
            (3, 1, HeightKind::Discriminant, 1, 2, 6),
            (2, 2, HeightKind::Discriminant, 1, 1, 5),
            (2, 2, HeightKind::Conductor, 1, 1, 3),
        ] {
            let k = f(q);
            certify_coverage(&k, r, kind, sd, mo, (q as u128).pow(lmax as u32)).unwrap();
            let xs = enumerate_as_classes(&k, r as usize, sd, mo, BUDGET).unwrap();
            let pts = heights(&xs, kind);
            let census = as_height_census(&k, r, kind, lmax, true).unwrap();
            for e in 0..=lmax {
                let n = pts.iter().filter(|x| x.log_q_height == e).count() as u128;
                assert_eq!(n, census[e as usize], "q={q} r={r} {kind:?} e={e}");
            }
        }
    }

    #[test]
    fn local_census_totals() {
        // all tuples with pole orders below the cut are counted once
        let (p, n, r) = (2u32, 1u32, 2u32);
        let census = local_census(p, n, r, HeightKind::Conductor, 4).unwrap();
        let s: u128 = census.iter().sum();
        assert_eq!(s, 4u128.pow(2));
        let census = local_census(3, 1, 1, HeightKind::Conductor, 3).unwrap();
        assert_eq!(census, vec![1, 0, 2, 6]);
    }

    #[test]
    fn irreducible_counts() {
        let k = f(3);
        for d in 1..=4 {
            let n = crate::place::finite_places_of_degree(&k, d).len() as u128;
            assert_eq!(irreducible_count(3, d as u32), n);
        }
        assert_eq!(irreducible_count(2, 8), 30);
    }

    #[test]
    fn p1_examples() {
        assert_eq!(count_p1(&f(2), 1, BUDGET).unwrap(), 3);
        assert_eq!(count_p1(&f(2), 2, BUDGET).unwrap(), 9);
        assert_eq!(count_p1(&f(3), 1, BUDGET).unwrap(), 4);
        for q in [2u64, 3, 4] {
            let c = p1_census(&f(q as u32), 3, BUDGET).unwrap();
            assert_eq!(c[0], q + 1);
            for k in 1..=3u32 {
                assert_eq!(c[k as usize], q.pow(2 * k - 1) * (q * q - 1));
            }
        }
    }

    #[test]
    fn mu2_examples() {
        let k = f(3);
        let one = Rational64::from(1);
        assert_eq!(count_mu2_classes(&k, 1, one, BUDGET).unwrap(), 2);
        assert_eq!(count_mu2_classes(&k, 3, one, BUDGET).unwrap(), 2);
        assert_eq!(count_mu2_classes(&k, 9, one, BUDGET).unwrap(), 20);
        assert_eq!(
            count_mu2_classes(&k, 1, Rational64::from(2), BUDGET).unwrap(),
            2
        );
        assert!(count_mu2_classes(&f(2), 4, one, BUDGET).is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let k = f(2);
        let run = || {
            let mut buf = Vec::new();
            write_table_csv(
                &mut buf,
                &as_count_table(&k, 1, HeightKind::Conductor, 6, true).unwrap(),
            )
            .unwrap();
            buf
        };
        let a = run();
        assert_eq!(a, run());
        assert!(String::from_utf8(a)
            .unwrap()
            .starts_with("B,count\n1,2\n2,2\n4,8\n"));
    }
}
