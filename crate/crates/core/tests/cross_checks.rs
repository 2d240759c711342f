use num_bigint::BigUint;
use proptest::prelude::*;
use stacky_core::asymptotics::{product_count, HeightMultiset};
use stacky_core::global::{
    as_count_table, count_table, coverage_requirements, enumerate_as_classes, heights, p1_census,
    HeightKind,
};
use stacky_core::local::{catalog, torsor_count};
use stacky_core::verify::LocalOracle;
use stacky_core::FiniteField;

#[test]
fn local_counts_match_unit_group_oracle() {
    for (p, f) in [(2, 1), (2, 2), (3, 1)] {
        let field = FiniteField::new(p, f).unwrap();
        let mut oracle = LocalOracle::new(&field);
        for g in catalog(p, 16) {
            for n in 0..=12 {
                assert_eq!(
                    torsor_count(&g, &field, n).unwrap(),
                    oracle.torsor_count(&g, n),
                    "{} n={n}",
                    g.name()
                );
            }
        }
    }
}

#[test]
fn census_matches_enumeration() {
    for (p, r, kind, lmax) in [
        (2, 1, HeightKind::Conductor, 4u64),
        (3, 1, HeightKind::Conductor, 3),
        (2, 2, HeightKind::Discriminant, 6),
    ] {
        let field = FiniteField::new(p, 1).unwrap();
        let q = p as u128;
        let bmax = q.pow(lmax as u32);
        let census = as_count_table(&field, r, kind, lmax, true).unwrap();
        let (sd, mo) = coverage_requirements(&field, r, kind, bmax);
        let classes = enumerate_as_classes(&field, r as usize, sd, mo, 50_000_000).unwrap();
        let bs: Vec<u128> = census.iter().map(|&(b, _)| b).collect();
        let direct = count_table(p, &heights(&classes, kind), &bs, true);
        for ((b, n), (_, m)) in census.iter().zip(&direct) {
            assert_eq!(*n, *m as u128, "p={p} r={r} B={b}");
        }
    }
}

#[test]
fn p1_cumulative_counts() {
    for (p, f) in [(2u32, 1u32), (3, 1), (2, 2)] {
        let field = FiniteField::new(p, f).unwrap();
        let q = p.pow(f);
        let census = p1_census(&field, 3, 1 << 30).unwrap();
        let mut acc = 0u64;
        for (k, n) in census.iter().enumerate() {
            acc += n;
            assert_eq!(acc, (q as u64).pow(2 * k as u32 + 1) + 1, "q={q} k={k}");
        }
    }
}

proptest! {
    #[test]
    fn product_count_is_symmetric_and_monotone(
        xs in prop::collection::vec((1u32..200, 1u64..4), 1..30),
        ys in prop::collection::vec((1u32..200, 1u64..4), 1..30),
        b in 1.0f64..5000.0,
    ) {
        let x = HeightMultiset::new(xs.iter().map(|&(h, m)| (h as f64, m)).collect()).unwrap();
        let y = HeightMultiset::new(ys.iter().map(|&(h, m)| (h as f64, m)).collect()).unwrap();
        let n = product_count(&x, &y, b);
        prop_assert_eq!(n, product_count(&y, &x, b));
        prop_assert!(n <= product_count(&x, &y, 2.0 * b));
        let brute: u64 = xs.iter().flat_map(|&(h1, m1)| ys.iter().map(move |&(h2, m2)| (h1 as f64 * h2 as f64, m1 * m2)))
            .filter(|&(h, _)| h <= b).map(|(_, m)| m).sum();
        prop_assert_eq!(n, brute);
    }

    #[test]
    fn torsor_counts_sum_to_hom_count(n in 0u64..10) {
        let field = FiniteField::new(2, 1).unwrap();
        let mut oracle = LocalOracle::new(&field);
        for g in catalog(2, 8) {
            let total: BigUint = (0..=n).map(|k| torsor_count(&g, &field, k).unwrap()).sum();
            let unramified = g.order();
            let hom = if n == 0 { unramified } else { unramified * oracle.hom_tame(&g) * oracle.hom_units(&g, n) };
            prop_assert_eq!(total, hom);
        }
    }
}
