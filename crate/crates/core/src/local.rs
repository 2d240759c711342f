//! Torsor counts by conductor for abelian `p`-groups over `F_q((t))`.
//!
//! A `G`-torsor over the punctured disc is a homomorphism from the
//! abelianised absolute Galois group, i.e. from `Z x F_q^* x U` with
//! `U = 1 + tF_q[[t]]`.  Its conductor exponent is the least `n` for which
//! the homomorphism kills `1 + t^n F_q[[t]]`.

use std::fmt;
use std::io::Write;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FiniteField;

/// A finite abelian `p`-group `⊕ Z/p^{n_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianPGroup {
    p: u32,
    exponents: Vec<u32>,
}

impl AbelianPGroup {
    /// From the exponents `n_j` of the cyclic factors (any order, zeros dropped).
    pub fn new(p: u32, exponents: &[u32]) -> Result<Self> {
        if !(2..=97).contains(&p) || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(Error::Config(format!("{p} is not a supported prime")));
        }
        let mut exponents: Vec<u32> = exponents.iter().copied().filter(|&n| n > 0).collect();
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Ok(AbelianPGroup { p, exponents })
    }

    pub fn cyclic(p: u32, n: u32) -> Result<Self> {
        Self::new(p, &[n])
    }

    /// `(Z/p)^r`.
    pub fn elementary(p: u32, r: u32) -> Result<Self> {
        Self::new(p, &vec![1; r as usize])
    }

    /// Parses `z4z2`-style names (cyclic orders, which must share a prime),
    /// or `zp:R` for `(Z/p)^R` with `p` supplied by the caller.
    pub fn parse(s: &str, p_hint: Option<u32>) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse group `{s}`"));
        let s = s.trim().to_ascii_lowercase();
        if let Some(r) = s.strip_prefix("zp:") {
            let r: u32 = r.parse().map_err(|_| bad())?;
            let p = p_hint.ok_or_else(|| {
                Error::Config(format!("group `{s}` needs the characteristic from --q"))
            })?;
            return Self::elementary(p, r);
        }
        let orders: Vec<u32> = s
            .split('z')
            .skip(1)
            .map(|x| x.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if !s.starts_with('z') || orders.is_empty() {
            return Err(bad());
        }
        let p = (2..=orders[0])
            .find(|d| orders[0] % d == 0)
            .ok_or_else(bad)?;
        let mut exps = Vec::new();
        for o in orders {
            let mut m = o;
            let mut e = 0;
            while m > 1 && m % p == 0 {
                m /= p;
                e += 1;
            }
            if m != 1 || e == 0 {
                return Err(Error::Config(format!("`{s}` is not an abelian p-group")));
            }
            exps.push(e);
        }
        if let Some(ph) = p_hint {
            if ph != p {
                return Err(Error::Config(format!(
                    "group `{s}` is a {p}-group but the field has characteristic {ph}"
                )));
            }
        }
        Self::new(p, &exps)
    }

    /// Compact name, e.g. `z4z2`; `z1` for the trivial group.
    pub fn name(&self) -> String {
        if self.exponents.is_empty() {
            return "z1".into();
        }
        self.exponents
            .iter()
            .map(|&n| format!("z{}", self.p.pow(n)))
            .collect()
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }
    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    /// `#G`.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.exponents.iter().sum::<u32>())
    }

    /// `e` with `p^e` the exponent of `G`.
    pub fn e(&self) -> u32 {
        self.exponents.first().copied().unwrap_or(0)
    }

    /// `r_i = #{j : n_j >= i}` for `i = 1..=e`.
    pub fn ranks(&self) -> Vec<u32> {
        (1..=self.e())
            .map(|i| self.exponents.iter().filter(|&&n| n >= i).count() as u32)
            .collect()
    }

    /// `r_i` for any `i >= 1` (zero beyond `e`).
    pub fn rank(&self, i: u32) -> u32 {
        self.exponents.iter().filter(|&&n| n >= i).count() as u32
    }

    /// Least `h` with `p^h G` cyclic.
    pub fn h(&self) -> u32 {
        self.ranks().iter().filter(|&&r| r > 1).count() as u32
    }
}

impl fmt::Display for AbelianPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|&n| format!("Z/{}", self.p.pow(n)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// All abelian `p`-groups of order `p^1 .. <= max_order`, by partitions.
pub fn catalog(p: u32, max_order: u64) -> Vec<AbelianPGroup> {
    fn partitions(n: u32, max: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            acc.push(k);
            partitions(n - k, k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let mut n = 1;
    while (p as u64).pow(n) <= max_order {
        let mut parts = Vec::new();
        partitions(n, n, &mut Vec::new(), &mut parts);
        out.extend(parts.iter().map(|e| AbelianPGroup::new(p, e).unwrap()));
        n += 1;
    }
    out
}

fn p_pow(p: u32, i: u32) -> u64 {
    (p as u64).pow(i)
}

/// `floor((n-1)/p^{i-1}) - floor((n-1)/p^i)`, the multiplicity of `p^i`-rank
/// contributions per unit of `f` in `U_{n,q}`.
fn unit_rank_unit(n: u64, p: u32, i: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    (n - 1) / p_pow(p, i - 1) - (n - 1) / p_pow(p, i)
}

/// `r_i(U_{n,q})` for `i = 1, 2, ...` while nonzero.
pub fn unit_ranks(n: u64, q: &FiniteField) -> Vec<u64> {
    let (p, f) = (q.p(), q.degree() as u64);
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let r = f * unit_rank_unit(n, p, i);
        if r == 0 {
            break;
        }
        out.push(r);
        i += 1;
    }
    out
}

/// `#Hom(A, G) = p^{Σ r_i(A) r_i(G)}` for a finite abelian `p`-group `A`
/// given by its ranks.
pub fn hom_count(a_ranks: &[u64], g: &AbelianPGroup) -> BigUint {
    let e: u64 = a_ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| r * g.rank(i as u32 + 1) as u64)
        .sum();
    BigUint::from(g.p()).pow(e as u32)
}

/// `dim(n) = Σ_i (floor((n-1)/p^{i-1}) - floor((n-1)/p^i)) r_i(G)`, so that
/// `#Hom(U_{n,q}, G) = q^{dim(n)}`.
pub fn hom_dimension(g: &AbelianPGroup, n: u64) -> u64 {
    (1..=g.e())
        .map(|i| unit_rank_unit(n, g.p(), i) * g.rank(i) as u64)
        .sum()
}

fn check_char(g: &AbelianPGroup, q: &FiniteField) -> Result<()> {
    if g.p() != q.p() {
        return Err(Error::Config(format!(
            "group {g} is a {}-group but F_{} has characteristic {}",
            g.p(),
            q.order(),
            q.p()
        )));
    }
    Ok(())
}

/// Number of `G`-torsors over `Spec F_q((t))` with conductor exponent `n`.
///
/// `n = 0` counts the unramified ones (`#G`, from the `Z` factor), `n = 1`
/// is always empty since tame inertia maps trivially to a `p`-group.
pub fn torsor_count(g: &AbelianPGroup, q: &FiniteField, n: u64) -> Result<BigUint> {
    check_char(g, q)?;
    let order = g.order();
    Ok(match n {
        0 => order,
        1 => BigUint::zero(),
        _ => {
            let qq = BigUint::from(q.order());
            let hi = qq.pow(hom_dimension(g, n) as u32);
            let lo = qq.pow(hom_dimension(g, n - 1) as u32);
            order * (hi - lo)
        }
    })
}

/// Dimension of the locus of conductor exactly `n`; `None` when it is empty
/// (exactly when `p^e | n - 1`).
pub fn fiber_dimension(g: &AbelianPGroup, n: u64) -> Option<u64> {
    if n == 0 {
        return Some(0);
    }
    let pe = p_pow(g.p(), g.e());
    ((n - 1) % pe != 0).then(|| hom_dimension(g, n))
}

/// The closed-form `a = (1 + (p-1) Σ p^{e-i} r_i) / p^e`.
pub fn conductor_a(g: &AbelianPGroup) -> Rational64 {
    let (p, e) = (g.p() as i64, g.e());
    let s: i64 = (1..=e).map(|i| p.pow(e - i) * g.rank(i) as i64).sum();
    Rational64::new(1 + (p - 1) * s, p.pow(e))
}

/// `D(n) = dim(n) - a n`, defined when `p^e ∤ n - 1`.
pub fn d_excess(g: &AbelianPGroup, n: u64) -> Result<Rational64> {
    let d = fiber_dimension(g, n)
        .filter(|_| n >= 2)
        .ok_or_else(|| Error::Config(format!("conductor {n} is empty or tame for {g}")))?;
    Ok(Rational64::from(d as i64) - conductor_a(g) * Rational64::from(n as i64))
}

/// `(a, b)` for a height together with the maximizing window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalInvariants {
    #[serde(serialize_with = "crate::local::ser_ratio")]
    pub a: Rational64,
    pub b: u64,
    pub argmax: Vec<u64>,
}

pub(crate) fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Closed-form invariants of the conductor height.
pub fn conductor_invariants(g: &AbelianPGroup) -> LocalInvariants {
    let (p, e, h) = (g.p(), g.e(), g.h());
    let pe = p_pow(p, e);
    let ph = p_pow(p, h);
    let argmax: Vec<u64> = (2..=pe)
        .filter(|&n| (n - 1) % pe != 0 && n % ph == 0)
        .collect();
    let b = if h == 0 { pe - 1 } else { p_pow(p, e - h) };
    debug_assert_eq!(b as usize, argmax.len());
    LocalInvariants {
        a: conductor_a(g),
        b,
        argmax,
    }
}

/// Closed-form invariants of the Artin–Schreier conductor `c' = c - 1`.
pub fn as_conductor_invariants(g: &AbelianPGroup) -> LocalInvariants {
    LocalInvariants {
        a: Rational64::from(1 + g.rank(1) as i64),
        b: 1,
        argmax: vec![2],
    }
}

/// Maximizes `(dim(n) + 1) / (n - shift)` over nonempty `2 <= n <= nmax`,
/// with `shift = 0` for the conductor and `1` for the Artin–Schreier
/// conductor.
pub fn window_maximum(g: &AbelianPGroup, nmax: u64, shift: u64) -> LocalInvariants {
    let mut best: Option<Rational64> = None;
    let mut argmax = Vec::new();
    for n in 2..=nmax {
        let Some(d) = fiber_dimension(g, n) else {
            continue;
        };
        let ratio = Rational64::new(d as i64 + 1, (n - shift) as i64);
        match best {
            Some(b) if ratio < b => {}
            Some(b) if ratio == b => argmax.push(n),
            _ => {
                best = Some(ratio);
                argmax = vec![n];
            }
        }
    }
    LocalInvariants {
        a: best.unwrap_or_else(Rational64::zero),
        b: argmax.len() as u64,
        argmax,
    }
}

/// One row of a local count table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCountRow {
    pub n: u64,
    pub count: BigUint,
    pub dimension: Option<u64>,
}

pub fn count_table(g: &AbelianPGroup, q: &FiniteField, nmax: u64) -> Result<Vec<LocalCountRow>> {
    (0..=nmax)
        .map(|n| {
            let count = torsor_count(g, q, n)?;
            let dimension = if count.is_zero() {
                None
            } else {
                fiber_dimension(g, n)
            };
            Ok(LocalCountRow {
                n,
                count,
                dimension,
            })
        })
        .collect()
}

/// Writes `p,f,group,n,count,dimension`.
pub fn write_count_csv<W: Write>(
    out: W,
    g: &AbelianPGroup,
    q: &FiniteField,
    rows: &[LocalCountRow],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "f", "group", "n", "count", "dimension"])?;
    for r in rows {
        w.write_record([
            q.p().to_string(),
            q.degree().to_string(),
            g.name(),
            r.n.to_string(),
            r.count.to_string(),
            r.dimension.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sum of counts over `0 <= n <= nmax`; equals `#G * q^{dim(nmax)}`.
pub fn cumulative_count(g: &AbelianPGroup, q: &FiniteField, nmax: u64) -> Result<BigUint> {
    let mut s = BigUint::zero();
    for n in 0..=nmax {
        s += torsor_count(g, q, n)?;
    }
    Ok(s)
}

/// `#Hom(Z x F_q^* x U_{n,q}, G)` in closed form.
pub fn total_hom_count(g: &AbelianPGroup, q: &FiniteField, n: u64) -> BigUint {
    let u = unit_ranks(n.max(1), q);
    g.order() * hom_count(&u, g)
}
