//! Independent oracles: explicit unit-group arithmetic for local torsor
//! counts, and exhaustive class vectors for the discriminant formula.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::disc::{character_sum_disc, disc_exponent, profile_of_class};
use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::global::constant_representatives;
use crate::local::{catalog, torsor_count, AbelianPGroup};
use crate::series::LaurentSeries;

/// Truncated power series mod `t^n`, coefficients `c[0..n]`.
fn mul_trunc(k: &FiniteField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let n = a.len();
    let mut out = vec![Fe::ZERO; n];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b[..n - i].iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    out
}

fn pow_trunc(k: &FiniteField, a: &[Fe], mut e: u64) -> Vec<Fe> {
    let mut acc = vec![Fe::ZERO; a.len()];
    acc[0] = Fe::ONE;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_trunc(k, &acc, &base);
        }
        base = mul_trunc(k, &base, &base);
        e >>= 1;
    }
    acc
}

fn digits(code: u16, p: u32, f: u32) -> Vec<u32> {
    let mut c = code as u32;
    (0..f)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

/// Rank over `F_p` of a list of vectors.
fn rank_mod_p(mut rows: Vec<Vec<u32>>, p: u32) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = (1..p).find(|x| x * rows[rank][c] % p == 1).unwrap();
        for v in rows[rank].iter_mut() {
            *v = *v * inv % p;
        }
        let pr = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let m = row[c];
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x = (*x + p * p - m * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Largest group order enumerated element by element.
pub const EXPLICIT_LIMIT: u64 = 1 << 16;

/// `log_p #U[p^m]` for `U = (1 + t F_q[[t]]) / (1 + t^n F_q[[t]])`, by
/// testing `u^{p^m} = 1` on every element.
pub fn unit_torsion_explicit(q: &FiniteField, n: u64, m: u32) -> Result<u32> {
    let (p, qq) = (q.p() as u64, q.order() as u64);
    let size = qq
        .checked_pow(n.saturating_sub(1) as u32)
        .filter(|&s| s <= EXPLICIT_LIMIT);
    let Some(size) = size else {
        return Err(Error::Budget(format!(
            "unit group of F_{qq} mod t^{n} is too large to enumerate"
        )));
    };
    if n <= 1 {
        return Ok(0);
    }
    let e = p.pow(m);
    let len = n as usize;
    let mut hits = 0u64;
    for code in 0..size {
        let mut u = vec![Fe::ZERO; len];
        u[0] = Fe::ONE;
        let mut c = code;
        for x in u.iter_mut().skip(1) {
            *x = Fe((c % qq) as u16);
            c /= qq;
        }
        let w = pow_trunc(q, &u, e);
        if w[0] == Fe::ONE && w[1..].iter().all(|x| x.is_zero()) {
            hits += 1;
        }
    }
    let mut log = 0;
    let mut h = hits;
    while h > 1 {
        if h % p != 0 {
            return Err(Error::Numerical(format!(
                "torsion subgroup has order {hits}, not a power of {p}"
            )));
        }
        h /= p;
        log += 1;
    }
    Ok(log)
}

/// Same quantity from the `F_p`-linear map `x -> (1 + x)^{p^m} - 1` on
/// `t F_q[t] / t^n`, evaluated on an `F_p`-basis by explicit multiplication.
pub fn unit_torsion_linear(q: &FiniteField, n: u64, m: u32) -> u32 {
    if n <= 1 {
        return 0;
    }
    let (p, f) = (q.p(), q.degree());
    let e = (p as u64).pow(m);
    let len = n as usize;
    let mut rows = Vec::new();
    for k in 1..len {
        for i in 0..f {
            let mut u = vec![Fe::ZERO; len];
            u[0] = Fe::ONE;
            u[k] = Fe((p as u16).pow(i));
            let w = pow_trunc(q, &u, e);
            rows.push(
                w[1..]
                    .iter()
                    .flat_map(|&c| digits(c.0, p, f))
                    .collect::<Vec<u32>>(),
            );
        }
    }
    let dim = rows.len();
    (dim - rank_mod_p(rows, p)) as u32
}

/// Oracle for the number of `G`-torsors over `F_q((t))` with conductor
/// exactly `n`, from `Hom(Z x F_q^* x U_{n,q}, G)` computed in the unit group.
pub struct LocalOracle {
    q: FiniteField,
    cache: HashMap<(u64, u32), u32>,
}

impl LocalOracle {
    pub fn new(q: &FiniteField) -> Self {
        LocalOracle {
            q: q.clone(),
            cache: HashMap::new(),
        }
    }

    fn torsion(&mut self, n: u64, m: u32) -> u32 {
        let q = &self.q;
        *self
            .cache
            .entry((n, m))
            .or_insert_with(|| match unit_torsion_explicit(q, n, m) {
                Ok(x) => x,
                Err(_) => unit_torsion_linear(q, n, m),
            })
    }

    /// `#Hom(U_{n,q}, G) = Π_k #U[p^{e_k}]` for `G = ⊕ Z/p^{e_k}`.
    pub fn hom_units(&mut self, g: &AbelianPGroup, n: u64) -> BigUint {
        let logs: Vec<u32> = g
            .exponents()
            .iter()
            .map(|&ek| self.torsion(n, ek))
            .collect();
        let e: u32 = logs.iter().sum();
        BigUint::from(g.p()).pow(e)
    }

    /// `#Hom(F_q^*, G) = Π gcd(q - 1, p^{e_k})`.
    pub fn hom_tame(&self, g: &AbelianPGroup) -> BigUint {
        let qm1 = self.q.order() as u64 - 1;
        g.exponents()
            .iter()
            .map(|&ek| BigUint::from(qm1.gcd(&(g.p() as u64).pow(ek))))
            .product::<BigUint>()
    }

    /// Homomorphisms with conductor exactly `n`.
    pub fn torsor_count(&mut self, g: &AbelianPGroup, n: u64) -> BigUint {
        let unram = g.order();
        let tame = self.hom_tame(g);
        match n {
            0 => unram,
            1 => unram * (tame - BigUint::one()),
            _ => {
                let hi = self.hom_units(g, n);
                let lo = self.hom_units(g, n - 1);
                unram * tame * (hi - lo)
            }
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LocalSweep {
    pub cases: u64,
    pub mismatches: Vec<String>,
}

/// `torsor_count` against [`LocalOracle`] for every group of order at most
/// `max_order` and every `(q, n)` in range.
pub fn local_sweep(primes: &[u32], max_order: u64, qs: &[u32], nmax: u64) -> Result<LocalSweep> {
    let jobs: Vec<(u32, u32)> = primes
        .iter()
        .flat_map(|&p| qs.iter().map(move |&q| (p, q)))
        .filter(|&(p, q)| q % p == 0 && FiniteField::with_order(q).is_ok_and(|k| k.p() == p))
        .collect();
    let parts: Vec<Result<LocalSweep>> = jobs
        .par_iter()
        .map(|&(p, q)| {
            let k = FiniteField::with_order(q)?;
            let mut oracle = LocalOracle::new(&k);
            let mut out = LocalSweep::default();
            for g in catalog(p, max_order) {
                for n in 0..=nmax {
                    let got = torsor_count(&g, &k, n)?;
                    let want = oracle.torsor_count(&g, n);
                    out.cases += 1;
                    if got != want {
                        out.mismatches
                            .push(format!("G={g} q={q} n={n}: {got} vs oracle {want}"));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut total = LocalSweep::default();
    for part in parts {
        let part = part?;
        total.cases += part.cases;
        total.mismatches.extend(part.mismatches);
    }
    Ok(total)
}

/// Every reduced class `a_0 + Σ_{k <= max_pole, p ∤ k} a_k t^{-k}` over
/// `F_q`, with `a_0` running over representatives of `F_q / ℘(F_q)`.
pub fn reduced_classes(field: &FiniteField, max_pole: u64, prec: i64) -> Vec<LaurentSeries> {
    let p = field.p() as u64;
    let orders: Vec<i64> = (1..=max_pole)
        .filter(|k| k % p != 0)
        .map(|k| -(k as i64))
        .collect();
    let constants = constant_representatives(field);
    let q = field.order() as u64;
    let total = q.pow(orders.len() as u32);
    let mut out = Vec::with_capacity(total as usize * constants.len());
    for mut code in 0..total {
        let mut terms: Vec<(i64, Fe)> = orders
            .iter()
            .map(|&k| {
                let c = Fe((code % q) as u16);
                code /= q;
                (k, c)
            })
            .collect();
        for &c in &constants {
            terms.push((0, c));
            out.push(LaurentSeries::from_terms(field, &terms, prec));
            terms.pop();
        }
    }
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiscSweep {
    pub classes: u64,
    pub mismatches: Vec<String>,
}

/// `disc_exponent(profile_of_class(h))` against the character sum for every
/// class vector of rank `r` with pole orders at most `max_pole`.
pub fn disc_sweep(field: &FiniteField, r: usize, max_pole: u64) -> Result<DiscSweep> {
    let parts = reduced_classes(field, max_pole, 1);
    let n = parts.len() as u64;
    let total = n
        .checked_pow(r as u32)
        .ok_or_else(|| Error::Budget("too many class vectors".into()))?;
    let results: Vec<Result<Option<String>>> = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let h: Vec<LaurentSeries> = (0..r)
                .map(|_| {
                    let x = parts[(code % n) as usize].clone();
                    code /= n;
                    x
                })
                .collect();
            let via_profile = disc_exponent(&profile_of_class(&h)?.profile);
            let via_chars = character_sum_disc(&h)?;
            Ok((via_profile != via_chars).then(|| {
                let shown: Vec<String> = h.iter().map(|x| x.format_in("t")).collect();
                format!(
                    "[{}]: profile {via_profile}, characters {via_chars}",
                    shown.join(", ")
                )
            }))
        })
        .collect();
    let mut out = DiscSweep {
        classes: total,
        mismatches: Vec::new(),
    };
    for r in results {
        if let Some(m) = r? {
            out.mismatches.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::total_hom_count;

    #[test]
    fn explicit_and_linear_torsion_agree() {
        for q in [2, 3, 4, 8, 9] {
            let k = FiniteField::with_order(q).unwrap();
            for n in 1..=8 {
                for m in 1..=3 {
                    if let Ok(x) = unit_torsion_explicit(&k, n, m) {
                        assert_eq!(x, unit_torsion_linear(&k, n, m), "q={q} n={n} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn small_unit_groups() {
        // 1 + t F_2[t]/t^3 is cyclic of order 4
        let k = FiniteField::prime(2).unwrap();
        assert_eq!(unit_torsion_explicit(&k, 3, 1).unwrap(), 1);
        assert_eq!(unit_torsion_explicit(&k, 3, 2).unwrap(), 2);
        // 1 + t F_2[t]/t^4 is Z/4 x Z/2
        assert_eq!(unit_torsion_explicit(&k, 4, 1).unwrap(), 2);
        assert_eq!(unit_torsion_explicit(&k, 4, 2).unwrap(), 3);
    }

    #[test]
    fn oracle_matches_total_hom_count() {
        let k = FiniteField::with_order(4).unwrap();
        let mut o = LocalOracle::new(&k);
        for g in catalog(2, 8) {
            for n in 2..=10 {
                assert_eq!(
                    g.order() * o.hom_units(&g, n),
                    total_hom_count(&g, &k, n),
                    "{g} n={n}"
                );
            }
        }
    }

    #[test]
    fn small_sweeps() {
        let s = local_sweep(&[2, 3], 9, &[2, 3, 4], 8).unwrap();
        assert!(s.mismatches.is_empty(), "{:?}", s.mismatches);
        let k = FiniteField::prime(2).unwrap();
        let d = disc_sweep(&k, 2, 5).unwrap();
        assert_eq!(d.classes, 256);
        assert!(d.mismatches.is_empty(), "{:?}", d.mismatches);
    }
}
