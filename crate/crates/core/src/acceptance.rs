//! The acceptance matrix: ten criteria, each checked against an
//! independent computation and reported as one PASS/FAIL line.

use std::time::{Duration, Instant};

use num_rational::Rational64;
use serde::Serialize;

use crate::asymptotics::{
    growth_fit, phi_displayed_sum, phi_exact, phi_leading, phi_quadrature, product_count,
    product_rate, ratio_band, GrowthRate, HeightMultiset,
};
use crate::disc::{disc_invariants, disc_invariants_search};
use crate::elliptic::compare_with_tate;
use crate::field::FiniteField;
use crate::global::{as_count_table, HeightKind};
use crate::invariants::{gerbe_product_invariants, Count};
use crate::local::{catalog, conductor_invariants, window_maximum};
use crate::motivic::{m11bar_sectoroid_measure, Weight};
use crate::verify::{disc_sweep, local_sweep};

/// Criteria that cannot hold as stated, with the reason. They are run and
/// reported but do not make the suite fail.
pub const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(
    5,
    "leading term of Phi_k is off by about b1*b2/((k+1) log B) at B = e^20, over 10% once b1*b2 >= 2(k+1)",
)];

pub struct Outcome {
    pub ok: bool,
    pub detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() < limit
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn c1_local_oracle() -> Outcome {
    let t = Instant::now();
    match local_sweep(&[2, 3], 27, &[2, 3, 4, 8, 9], 20) {
        Ok(s) => {
            let fast = within(t, Duration::from_secs(60));
            let first = s
                .mismatches
                .first()
                .map(|m| format!(", first: {m}"))
                .unwrap_or_default();
            outcome(
                s.mismatches.is_empty() && fast,
                format!(
                    "{} cases, {} mismatches{first}",
                    s.cases,
                    s.mismatches.len()
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c2_conductor_ab() -> Outcome {
    let mut checked = 0;
    for g in catalog(2, 27).into_iter().chain(catalog(3, 27)) {
        let (p, e, h) = (g.p() as i64, g.e(), g.h());
        let pe = p.pow(e);
        let s: i64 = (1..=e).map(|i| p.pow(e - i) * g.rank(i) as i64).sum();
        let a = r(1 + (p - 1) * s, pe);
        let b = if h == 0 { pe - 1 } else { p.pow(e - h) } as u64;
        let inv = conductor_invariants(&g);
        if inv.a != a || inv.b != b {
            return outcome(
                false,
                format!(
                    "{g}: closed form ({}, {}) vs displayed ({a}, {b})",
                    inv.a, inv.b
                ),
            );
        }
        let w = window_maximum(&g, 3 * (pe * pe) as u64, 0);
        if w != inv {
            return outcome(
                false,
                format!("{g}: window search ({}, {}) vs ({a}, {b})", w.a, w.b),
            );
        }
        checked += 1;
    }
    outcome(true, format!("{checked} groups"))
}

fn c3_disc_ab() -> Outcome {
    let t = Instant::now();
    for p in [2u32, 3, 5] {
        for rk in 1..=3u32 {
            let (pi, ri) = (p as i64, rk as i64);
            let a = r(1 + ri * (pi - 1), pi * (pi.pow(rk) - 1));
            let b = if rk == 1 {
                p as u64 - 1
            } else if (p, rk) == (2, 2) {
                4
            } else {
                1
            };
            let Ok(inv) = disc_invariants(p, rk) else {
                return outcome(false, format!("disc_invariants({p}, {rk}) failed"));
            };
            if (inv.a, inv.b) != (a, b) {
                return outcome(
                    false,
                    format!("(p,r)=({p},{rk}): ({}, {}) vs ({a}, {b})", inv.a, inv.b),
                );
            }
            let search = disc_invariants_search(p, rk, 3 * (p as u64).pow(rk));
            if search != inv {
                return outcome(
                    false,
                    format!("(p,r)=({p},{rk}): maximizers differ from exhaustive search"),
                );
            }
        }
    }
    let fast = within(t, Duration::from_secs(120));
    outcome(fast, format!("9 (p, r) pairs"))
}

fn c4_disc_characters() -> Outcome {
    let mut classes = 0;
    for q in [2, 3] {
        let k = FiniteField::prime(q).unwrap();
        for rank in 1..=2 {
            match disc_sweep(&k, rank, 9) {
                Ok(s) if s.mismatches.is_empty() => classes += s.classes,
                Ok(s) => return outcome(false, s.mismatches[0].clone()),
                Err(e) => return outcome(false, e.to_string()),
            }
        }
    }
    outcome(true, format!("{classes} class vectors"))
}

fn c5_phi() -> Outcome {
    let mut worst = 0.0f64;
    for b in [10.0, 1e3, 1e6] {
        for b1 in 0..=4 {
            for b2 in 0..=4 {
                let (Ok(x), Ok(y)) = (phi_exact(b, b1, b2), phi_quadrature(-1.0, b, b1, b2, 1e-12))
                else {
                    return outcome(
                        false,
                        format!("evaluation failed at B={b} beta=({b1},{b2})"),
                    );
                };
                worst = worst.max((x - y).abs() / y.abs());
            }
        }
    }
    if worst >= 1e-9 {
        return outcome(false, format!("phi_exact relative error {worst:e}"));
    }
    let (Ok(disp), Ok(quad)) = (
        Ok::<f64, ()>(phi_displayed_sum(1e3, 1, 1)),
        phi_quadrature(-1.0, 1e3, 1, 1, 1e-12),
    ) else {
        return outcome(false, "quadrature failed at (1,1)");
    };
    if ((disp - quad) / quad).abs() < 1e-3 {
        return outcome(
            false,
            "displayed Phi_{-1} sum unexpectedly matches quadrature",
        );
    }
    let b = 20f64.exp();
    let mut bad = Vec::new();
    for k in [0.0, 0.5, 1.0] {
        for b1 in 0..=4 {
            for b2 in 0..=4 {
                let (Ok((lead, _)), Ok(quad)) = (
                    phi_leading(k, b, b1, b2),
                    phi_quadrature(k, b, b1, b2, 1e-10),
                ) else {
                    return outcome(
                        false,
                        format!("leading term failed at k={k} beta=({b1},{b2})"),
                    );
                };
                let ratio = quad / lead;
                if (ratio - 1.0).abs() > 0.1 {
                    bad.push(format!("k={k} ({b1},{b2}) {ratio:.3}"));
                }
            }
        }
    }
    let first: Vec<_> = bad.iter().take(3).cloned().collect();
    outcome(
        bad.is_empty(),
        format!(
            "exact err {worst:.1e}; leading ratio outside 10% on {}/75 grid points [{}]",
            bad.len(),
            first.join("; ")
        ),
    )
}

fn c6_product() -> Outcome {
    let n = 1_000_000u64;
    let Ok(x) = HeightMultiset::new((1..=n).map(|h| (h as f64, 1)).collect()) else {
        return outcome(false, "multiset construction failed");
    };
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for e in 4..=12 {
        let b = 10f64.powf(e as f64 / 2.0);
        let ratio = product_count(&x, &x, b) as f64 / (b * b.ln());
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    if lo < 0.5 || hi > 2.0 {
        return outcome(false, format!("ratio band [{lo:.3}, {hi:.3}]"));
    }
    for a1 in 0..=3 {
        for a2 in 0..=3 {
            for b1 in 0..=3 {
                for b2 in 0..=3 {
                    let got = product_rate(
                        GrowthRate {
                            alpha: a1 as f64,
                            beta: b1,
                        },
                        GrowthRate {
                            alpha: a2 as f64,
                            beta: b2,
                        },
                    );
                    // N ~ B^a (log B)^(b-1): equal a adds b, otherwise the larger a wins
                    let want = match a1.cmp(&a2) {
                        std::cmp::Ordering::Greater => (a1, b1 + 1),
                        std::cmp::Ordering::Less => (a2, b2 + 1),
                        std::cmp::Ordering::Equal => (a1, (b1 + 1) + (b2 + 1)),
                    };
                    if (got.alpha, got.beta + 1) != (want.0 as f64, want.1) {
                        return outcome(false, format!("rate ({a1},{b1})x({a2},{b2}) = {got:?}"));
                    }
                }
            }
        }
    }
    outcome(
        true,
        format!("ratio band [{lo:.3}, {hi:.3}], 256 rate pairs"),
    )
}

fn table(q: u32, r: u32, emax: u64, emin: u64) -> Result<Vec<(f64, f64)>, String> {
    let k = FiniteField::prime(q).map_err(|e| e.to_string())?;
    let rows =
        as_count_table(&k, r, HeightKind::Conductor, emax, true).map_err(|e| e.to_string())?;
    let qf = q as f64;
    Ok(rows
        .into_iter()
        .enumerate()
        .filter(|&(e, _)| e as u64 >= emin)
        .map(|(e, (_, n))| (qf.powi(e as i32), n as f64))
        .collect())
}

fn c7_global() -> Outcome {
    let t = Instant::now();
    let z2 = match table(2, 1, 16, 4) {
        Ok(t) => t,
        Err(e) => return outcome(false, e),
    };
    let (lo, hi) = ratio_band(
        &z2,
        GrowthRate {
            alpha: 1.0,
            beta: 0,
        },
    );
    let band_ok = lo > 0.0 && hi / lo < 10.0;
    // odd exponents carry an extra factor 1/2 from the parity of the conductor
    let even: Vec<(f64, f64)> = z2.iter().copied().step_by(2).collect();
    let fit2 = match growth_fit(&even) {
        Ok(f) => f,
        Err(e) => return outcome(false, e.to_string()),
    };
    let z2_ok = band_ok && (fit2.alpha - 1.0).abs() < 0.1 && fit2.beta_minus_1.abs() < 0.3;
    let z3 = match table(3, 1, 20, 4) {
        Ok(t) => t,
        Err(e) => return outcome(false, e),
    };
    let fit3 = match growth_fit(&z3) {
        Ok(f) => f,
        Err(e) => return outcome(false, e.to_string()),
    };
    let fast = within(t, Duration::from_secs(600));
    outcome(
        z2_ok && fit3.beta_minus_1 > 0.3 && fast,
        format!(
            "Z/2: U/L={:.2}, even-exponent fit a={:.3} b-1={:.3}; Z/3: fit a={:.3} b-1={:.3}",
            hi / lo,
            fit2.alpha,
            fit2.beta_minus_1,
            fit3.alpha,
            fit3.beta_minus_1
        ),
    )
}

fn c8_elliptic() -> Outcome {
    let t = Instant::now();
    let mut parts = Vec::new();
    for q in [3, 9] {
        let k = FiniteField::with_order(q).unwrap();
        match compare_with_tate(&k, 100, 2024 + q as u64, 40) {
            Ok(rep) if rep.passed() => parts.push(format!(
                "F_{q}: {} models ({} mult, {} add, {} good, {} unstable skipped)",
                rep.compared,
                rep.multiplicative,
                rep.additive_potentially_good,
                rep.good,
                rep.skipped
            )),
            Ok(rep) => {
                return outcome(
                    false,
                    format!(
                        "F_{q}: {} mismatches, e.g. {:?}",
                        rep.mismatches.len(),
                        rep.mismatches[0]
                    ),
                )
            }
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let fast = within(t, Duration::from_secs(300));
    outcome(fast, parts.join("; "))
}

fn c9_motivic() -> Outcome {
    for i in 1..=60 {
        match m11bar_sectoroid_measure(i) {
            Ok((_, Weight::Value(w))) if w == r(i, 6) => {}
            Ok((_, w)) => return outcome(false, format!("i={i}: gw = {w:?}")),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(true, "i = 1..60")
}

fn c10_gerbe() -> Outcome {
    for d in 1..=3i64 {
        for c0 in [r(1, 2), r(1, 1), r(2, 1)] {
            let x = r(2, d);
            let y = c0.recip();
            let (a, b) = if x == y { (x, 2) } else { (x.max(y), 1) };
            match gerbe_product_invariants(d, c0) {
                Ok(inv) if inv.a == a && inv.b == Count::Finite(b) => {}
                Ok(inv) => {
                    return outcome(false, format!("d={d} c0={c0}: ({}, {:?})", inv.a, inv.b))
                }
                Err(e) => return outcome(false, e.to_string()),
            }
        }
    }
    outcome(true, "9 (d, c0) pairs")
}

pub type Check = fn() -> Outcome;

pub const CRITERIA: [(u32, &str, Check); 10] = [
    (
        1,
        "local torsor counts vs unit-group oracle",
        c1_local_oracle,
    ),
    (
        2,
        "conductor a/b closed form and window search",
        c2_conductor_ab,
    ),
    (3, "discriminant a/b and maximizer sets", c3_disc_ab),
    (
        4,
        "discriminant vs character-sum oracle",
        c4_disc_characters,
    ),
    (5, "Phi_k exact, quadrature and leading term", c5_phi),
    (6, "product counts and rates", c6_product),
    (7, "global growth for Z/2 and Z/3", c7_global),
    (8, "elliptic char 3 vs Tate's algorithm", c8_elliptic),
    (9, "Gorenstein weights of M11bar sectoroids", c9_motivic),
    (10, "gerbe x product invariants", c10_gerbe),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub known_unattainable: Option<&'static str>,
}

impl CriterionResult {
    /// A failure that is not on the known-unattainable list.
    pub fn is_unexpected_failure(&self) -> bool {
        !self.passed && self.known_unattainable.is_none()
    }

    pub fn lines(&self) -> Vec<String> {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let mut out = vec![format!(
            "{tag} criterion {:>2}: {} ({}; {:.1}s)",
            self.id, self.name, self.detail, self.seconds
        )];
        if let (false, Some(why)) = (self.passed, self.known_unattainable) {
            out.push(format!("     known unattainable: {why}"));
        }
        out
    }
}

pub fn run_criterion(id: u32) -> Option<CriterionResult> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let t = Instant::now();
    let o = check();
    Some(CriterionResult {
        id,
        name,
        passed: o.ok,
        detail: o.detail,
        seconds: t.elapsed().as_secs_f64(),
        known_unattainable: KNOWN_UNATTAINABLE.iter().find(|k| k.0 == id).map(|k| k.1),
    })
}

/// Runs the selected criteria (all when `only` is empty) in order, calling
/// `report` as each finishes.
pub fn run(only: &[u32], mut report: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter(|c| only.is_empty() || only.contains(&c.0))
        .filter_map(|c| run_criterion(c.0))
        .inspect(|r| report(r))
        .collect()
}
