//! The integrals `Φ_k(B, β₁, β₂) = ∫₁^B u^k log(u)^β₁ log(B/u)^β₂ du`,
//! Abel-summation counting on products of height sets, and growth fitting.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `Φ_{-1}(B, β₁, β₂)` through the integration-by-parts recursion
/// `Φ(β₁, β₂) = β₂/(β₁+1) · Φ(β₁+1, β₂-1)`, `Φ(m, 0) = log(B)^{m+1}/(m+1)`.
pub fn phi_exact(b: f64, beta1: u32, beta2: u32) -> Result<f64> {
    if b.is_nan() || b <= 1.0 {
        return Err(Error::Config(format!("B must exceed 1, got {b}")));
    }
    let l = b.ln();
    let mut coef = 1.0;
    let (mut m, mut n) = (beta1, beta2);
    while n > 0 {
        coef *= f64::from(n) / f64::from(m + 1);
        m += 1;
        n -= 1;
    }
    Ok(coef * l.powi(m as i32 + 1) / f64::from(m + 1))
}

/// The finite sum `Σ_{i=0}^{β₂} β₁!β₂! log(B)^{β₁+1+i} / ((β₁+i+1)!(β₂-i)!)`.
/// Kept for comparison; it disagrees with the integral once `β₁, β₂ ≥ 1`.
pub fn phi_displayed_sum(b: f64, beta1: u32, beta2: u32) -> f64 {
    let l = b.ln();
    (0..=beta2)
        .map(|i| {
            factorial(beta1) * factorial(beta2) * l.powi((beta1 + 1 + i) as i32)
                / (factorial(beta1 + i + 1) * factorial(beta2 - i))
        })
        .sum()
}

/// Leading term `β₂! B^{k+1} log(B)^{β₁} / (k+1)^{β₂+1}` of `Φ_k` for
/// `k > -1`, and the scale of the error term.
pub fn phi_leading(k: f64, b: f64, beta1: u32, beta2: u32) -> Result<(f64, f64)> {
    if k <= -1.0 || b <= 1.0 {
        return Err(Error::Config(format!(
            "need k > -1 and B > 1, got k={k}, B={b}"
        )));
    }
    let l = b.ln();
    let bk = b.powf(k + 1.0);
    let leading = factorial(beta2) * bk * l.powi(beta1 as i32) / (k + 1.0).powi(beta2 as i32 + 1);
    let err = if beta1 >= 1 {
        bk * l.powi(beta1 as i32 - 1)
    } else {
        l.powi(beta2 as i32)
    };
    Ok((leading, err))
}

/// `Φ_k` by double-exponential quadrature in `x = log u`; `tol` is relative.
pub fn phi_quadrature(k: f64, b: f64, beta1: u32, beta2: u32, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || b <= 1.0 {
        return Err(Error::Config(format!(
            "need tol > 0 and B > 1, got tol={tol}, B={b}"
        )));
    }
    let l = b.ln();
    let f =
        |x: f64| ((k + 1.0) * x).exp() * x.powi(beta1 as i32) * (l - x).max(0.0).powi(beta2 as i32);
    let rough = quadrature::integrate(f, 0.0, l, 1e-6);
    let target = tol * rough.integral.abs().max(f64::MIN_POSITIVE);
    let out = quadrature::integrate(f, 0.0, l, target);
    if !out.integral.is_finite() || out.error_estimate > target {
        return Err(Error::Numerical(format!(
            "quadrature did not converge: estimate {} with error {} (target {target})",
            out.integral, out.error_estimate
        )));
    }
    Ok(out.integral)
}

/// A countable set with heights, stored as sorted `(height, multiplicity)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct HeightMultiset {
    items: Vec<(f64, u64)>,
    cumulative: Vec<u64>,
}

impl HeightMultiset {
    /// Merges repeated heights and drops zero multiplicities.
    pub fn new(mut items: Vec<(f64, u64)>) -> Result<Self> {
        if let Some(&(h, _)) = items.iter().find(|(h, _)| !(*h >= 1.0)) {
            return Err(Error::Config(format!(
                "heights must be at least 1, got {h}"
            )));
        }
        items.retain(|&(_, m)| m > 0);
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, u64)> = Vec::with_capacity(items.len());
        for (h, m) in items {
            match merged.last_mut() {
                Some(last) if last.0 == h => last.1 += m,
                _ => merged.push((h, m)),
            }
        }
        let cumulative = merged
            .iter()
            .scan(0u64, |acc, &(_, m)| {
                *acc += m;
                Some(*acc)
            })
            .collect();
        Ok(HeightMultiset {
            items: merged,
            cumulative,
        })
    }

    /// Heights `q^k` with the given multiplicities.
    pub fn from_q_powers(q: u64, rows: &[(u32, u64)]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|&(k, m)| ((q as f64).powi(k as i32), m))
                .collect(),
        )
    }

    pub fn items(&self) -> &[(f64, u64)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `N(B) = #{x : H(x) ≤ B}`.
    pub fn count(&self, b: f64) -> u64 {
        match self.items.partition_point(|&(h, _)| h <= b) {
            0 => 0,
            i => self.cumulative[i - 1],
        }
    }
}

/// `N_{X×Y}(B) = Σ_{x∈X} N_Y(B / H(x))`.
pub fn product_count(x: &HeightMultiset, y: &HeightMultiset, b: f64) -> u64 {
    let end = x.items.partition_point(|&(hx, _)| hx <= b);
    x.items[..end]
        .par_iter()
        .map(|&(hx, m)| {
            let i = y.items.partition_point(|&(hy, _)| hx * hy <= b);
            if i == 0 {
                0
            } else {
                m * y.cumulative[i - 1]
            }
        })
        .sum()
}

/// Growth `B^α (log B)^β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRate {
    pub alpha: f64,
    pub beta: u32,
}

/// Rate of the product height: the larger `α` wins; equal `α` adds the
/// log powers plus one.
pub fn product_rate(x: GrowthRate, y: GrowthRate) -> GrowthRate {
    if x.alpha > y.alpha {
        x
    } else if y.alpha > x.alpha {
        y
    } else {
        GrowthRate {
            alpha: x.alpha,
            beta: x.beta + y.beta + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub alpha: f64,
    pub beta_minus_1: f64,
    pub residual: f64,
}

/// Least-squares fit of `log N = α log B + (β-1) log log B + c`.
pub fn growth_fit(table: &[(f64, f64)]) -> Result<FitReport> {
    if table.len() < 4 {
        return Err(Error::Config(format!(
            "need at least 4 rows, got {}",
            table.len()
        )));
    }
    for w in table.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::Config("B must be strictly increasing".into()));
        }
    }
    if let Some(&(b, n)) = table
        .iter()
        .find(|&&(b, n)| b < std::f64::consts::E || !(n > 0.0))
    {
        return Err(Error::Config(format!(
            "row ({b}, {n}) needs B >= e and N > 0"
        )));
    }
    let rows = table.len();
    let a = DMatrix::from_fn(rows, 3, |i, j| {
        let lb = table[i].0.ln();
        match j {
            0 => lb,
            1 => lb.ln(),
            _ => 1.0,
        }
    });
    let y = DVector::from_fn(rows, |i, _| table[i].1.ln());
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= smax * 1e-10 {
        return Err(Error::Numerical("degenerate design matrix".into()));
    }
    let coef = svd
        .solve(&y, 1e-12)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let r = &a * &coef - &y;
    Ok(FitReport {
        alpha: coef[0],
        beta_minus_1: coef[1],
        residual: (r.norm_squared() / rows as f64).sqrt(),
    })
}

/// Min and max of `N(B) / (B^α log^β B)` over the table.
pub fn ratio_band(table: &[(f64, f64)], rate: GrowthRate) -> (f64, f64) {
    table
        .iter()
        .map(|&(b, n)| n / (b.powf(rate.alpha) * b.ln().powi(rate.beta as i32)))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        })
}

#[derive(Serialize, Deserialize)]
struct Row {
    #[serde(rename = "B")]
    b: f64,
    count: f64,
}

pub fn read_table<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize::<Row>()
        .map(|row| Ok(row.map(|x| (x.b, x.count))?))
        .collect()
}

pub fn write_table<W: Write>(w: W, table: &[(f64, u64)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["B", "count"])?;
    for &(b, n) in table {
        wtr.write_record([b.to_string(), n.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn phi_minus_one_examples() {
        let b = 1234.5f64;
        let l = b.ln();
        assert!(close(phi_exact(b, 0, 0).unwrap(), l, 1e-14));
        assert!(close(phi_exact(b, 1, 1).unwrap(), l.powi(3) / 6.0, 1e-14));
        assert!(close(phi_exact(b, 2, 0).unwrap(), l.powi(3) / 3.0, 1e-14));
        assert!(close(
            phi_displayed_sum(b, 1, 1),
            l * l / 2.0 + l.powi(3) / 6.0,
            1e-14
        ));
        assert!(phi_exact(1.0, 0, 0).is_err());
    }

    #[test]
    fn phi_exact_matches_quadrature() {
        for b in [10.0, 1e3, 1e6] {
            for b1 in 0..=4 {
                for b2 in 0..=4 {
                    let e = phi_exact(b, b1, b2).unwrap();
                    let q = phi_quadrature(-1.0, b, b1, b2, 1e-11).unwrap();
                    assert!(close(e, q, 1e-9), "B={b} ({b1},{b2}): {e} vs {q}");
                }
            }
        }
    }

    #[test]
    fn phi_exact_closed_form_and_recursion() {
        let b = 77.0f64;
        let l = b.ln();
        for b1 in 0..=5u32 {
            for b2 in 0..=5u32 {
                let v = phi_exact(b, b1, b2).unwrap();
                let closed = factorial(b1) * factorial(b2) * l.powi((b1 + b2 + 1) as i32)
                    / factorial(b1 + b2 + 1);
                assert!(close(v, closed, 1e-12));
                // the boundary term vanishes for β₂ ≥ 1
                let rhs = if b2 == 0 {
                    l.powi(b1 as i32 + 1)
                } else {
                    f64::from(b2) * phi_exact(b, b1 + 1, b2 - 1).unwrap()
                };
                assert!(close(v * f64::from(1 + b1), rhs, 1e-12));
            }
        }
    }

    #[test]
    fn phi_leading_examples() {
        let b = 5000.0f64;
        let (lead, _) = phi_leading(0.0, b, 0, 1).unwrap();
        assert!(close(lead, b, 1e-12));
        let exact = b - b.ln() - 1.0;
        assert!(close(
            phi_quadrature(0.0, b, 0, 1, 1e-10).unwrap(),
            exact,
            1e-9
        ));
        let (lead, _) = phi_leading(1.0, b, 0, 0).unwrap();
        assert!(close(lead, b * b / 2.0, 1e-12));
        assert!(close(
            phi_quadrature(1.0, b, 0, 0, 1e-10).unwrap(),
            (b * b - 1.0) / 2.0,
            1e-9
        ));
        // at log B = 10 the ratio is still (100 - 40 + 6)/100, inside the error scale
        let e10 = 10f64.exp();
        let (lead, err) = phi_leading(0.0, e10, 2, 1).unwrap();
        let q = phi_quadrature(0.0, e10, 2, 1, 1e-10).unwrap();
        assert!((q / lead - 0.66).abs() < 1e-3, "ratio {}", q / lead);
        assert!((q - lead).abs() < 5.0 * err);
        let e40 = 40f64.exp();
        let (lead, _) = phi_leading(0.0, e40, 2, 1).unwrap();
        let q = phi_quadrature(0.0, e40, 2, 1, 1e-10).unwrap();
        assert!((q / lead - 1.0).abs() < 0.15);
        assert!(phi_leading(-1.0, b, 0, 0).is_err());
    }

    #[test]
    fn product_count_examples() {
        let x = HeightMultiset::new((1..=10).map(|h| (h as f64, 1)).collect()).unwrap();
        assert_eq!(product_count(&x, &x, 10.0), 27);
        let one = HeightMultiset::new(vec![(1.0, 1)]).unwrap();
        for b in [1.0, 3.5, 10.0, 100.0] {
            assert_eq!(product_count(&x, &one, b), x.count(b));
        }
        assert_eq!(product_count(&one, &one, 1.0), 1);
        assert!(HeightMultiset::new(vec![(0.5, 1)]).is_err());
    }

    #[test]
    fn product_rate_examples() {
        let g = |alpha, beta| GrowthRate { alpha, beta };
        assert_eq!(product_rate(g(1.0, 0), g(1.0, 0)), g(1.0, 1));
        assert_eq!(product_rate(g(2.0, 3), g(1.0, 5)), g(2.0, 3));
        assert_eq!(product_rate(g(1.0, 1), g(1.0, 2)), g(1.0, 4));
    }

    #[test]
    fn growth_fit_examples() {
        let exact: Vec<_> = (4..=12)
            .map(|k| (f64::from(k).exp(), f64::from(k).exp()))
            .collect();
        let f = growth_fit(&exact).unwrap();
        assert!((f.alpha - 1.0).abs() < 1e-6 && f.beta_minus_1.abs() < 1e-6);
        let blogb: Vec<_> = (4..=12)
            .map(|k| (f64::from(k).exp(), f64::from(k).exp() * f64::from(k)))
            .collect();
        let f = growth_fit(&blogb).unwrap();
        assert!((f.alpha - 1.0).abs() < 0.05 && (f.beta_minus_1 - 1.0).abs() < 0.3);
        assert!(growth_fit(&exact[..3]).is_err());
    }

    #[test]
    fn product_band_for_divisor_sums() {
        // pairs (x, y) of positive integers with xy <= B grow like B log B
        let x = HeightMultiset::new((1..=4096).map(|h| (h as f64, 1)).collect()).unwrap();
        let table: Vec<_> = (9..=12)
            .map(|k| {
                let b = f64::from(1u32 << k);
                (b, product_count(&x, &x, b) as f64)
            })
            .collect();
        let (lo, hi) = ratio_band(
            &table,
            GrowthRate {
                alpha: 1.0,
                beta: 1,
            },
        );
        assert!(hi / lo < 20.0);
    }

    #[test]
    fn csv_roundtrip() {
        let mut buf = Vec::new();
        write_table(&mut buf, &[(2.0, 3), (4.0, 9)]).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "B,count\n2,3\n4,9\n"
        );
        assert_eq!(read_table(&buf[..]).unwrap(), vec![(2.0, 3.0), (4.0, 9.0)]);
    }

    fn arb_multiset() -> impl Strategy<Value = HeightMultiset> {
        prop::collection::vec((1u32..40, 1u64..4), 1..12).prop_map(|v| {
            HeightMultiset::new(v.into_iter().map(|(h, m)| (h as f64, m)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn product_count_laws(x in arb_multiset(), y in arb_multiset(), b in 1u32..400, db in 0u32..50) {
            let b = f64::from(b);
            let n = product_count(&x, &y, b);
            prop_assert_eq!(n, product_count(&y, &x, b));
            prop_assert!(n <= product_count(&x, &y, b + f64::from(db)));
            prop_assert!(n <= x.count(b) * y.count(b));
            let brute: u64 = x.items().iter()
                .flat_map(|&(hx, mx)| y.items().iter().map(move |&(hy, my)| (hx * hy, mx * my)))
                .filter(|&(h, _)| h <= b)
                .map(|(_, m)| m)
                .sum();
            prop_assert_eq!(n, brute);
        }
    }
}
