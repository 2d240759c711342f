//! The `a`/`b` calculus for raised heights: `a` is the supremum of
//! `(dim + 1) / c` over a sectoroid family and `b` counts the maximizers.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A count that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    fn plus(self, o: Count) -> Count {
        match (self, o) {
            (Count::Finite(a), Count::Finite(b)) => Count::Finite(a + b),
            _ => Count::Infinite,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Count {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n),
            Count::Infinite => s.serialize_str("inf"),
        }
    }
}

/// One sectoroid (or a batch of `multiplicity` sectoroids with the same data).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub label: String,
    pub dim: Rational64,
    pub c: Rational64,
    pub multiplicity: Count,
}

impl Entry {
    pub fn new(label: impl Into<String>, dim: Rational64, c: Rational64) -> Self {
        Entry {
            label: label.into(),
            dim,
            c,
            multiplicity: Count::Finite(1),
        }
    }

    pub fn with_multiplicity(mut self, m: Count) -> Self {
        self.multiplicity = m;
        self
    }

    pub fn ratio(&self) -> Rational64 {
        (self.dim + Rational64::one()) / self.c
    }
}

/// Bound on the entries omitted from an infinite family.
///
/// Every omitted entry has index `>= n` and ratio `<= sup_bound` (`<` if
/// `strict`), and `sup_bound` is the least such bound.  `samples` are
/// omitted ratios on `[n, 5n]` that the engine re-checks against the bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailCertificate {
    pub n: u64,
    pub sup_bound: Rational64,
    pub strict: bool,
    pub samples: Vec<(u64, Rational64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SectoroidFamily {
    pub entries: Vec<Entry>,
    pub infinite: bool,
    pub tail: Option<TailCertificate>,
}

impl SectoroidFamily {
    pub fn finite(entries: Vec<Entry>) -> Self {
        SectoroidFamily {
            entries,
            infinite: false,
            tail: None,
        }
    }

    pub fn infinite(entries: Vec<Entry>, tail: TailCertificate) -> Self {
        SectoroidFamily {
            entries,
            infinite: true,
            tail: Some(tail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RaisedInvariants {
    #[serde(serialize_with = "crate::local::ser_ratio")]
    pub a: Rational64,
    pub b: Count,
    pub argmax_labels: Vec<String>,
    pub attained: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RaisedInvariants {
    /// Invariants known in closed form.
    pub fn known(a: Rational64, b: u64) -> Self {
        RaisedInvariants {
            a,
            b: Count::Finite(b),
            argmax_labels: Vec::new(),
            attained: true,
            warnings: Vec::new(),
        }
    }
}

pub fn ab_invariants(fam: &SectoroidFamily) -> Result<RaisedInvariants> {
    for e in &fam.entries {
        if e.c <= Rational64::zero() {
            return Err(Error::Config(format!(
                "entry `{}` has non-positive raising value {}",
                e.label, e.c
            )));
        }
    }
    if fam.infinite && fam.tail.is_none() {
        return Err(Error::Config(
            "infinite family without a tail certificate".into(),
        ));
    }
    let window_max = fam.entries.iter().map(Entry::ratio).max();
    let mut warnings = Vec::new();

    let mut a = match window_max {
        Some(m) => m,
        None if fam.tail.is_none() => {
            return Err(Error::Config("empty family".into()));
        }
        None => Rational64::zero(),
    };
    let mut attained = !fam.entries.is_empty();

    if let Some(t) = &fam.tail {
        for &(i, r) in &t.samples {
            let ok = if t.strict {
                r < t.sup_bound
            } else {
                r <= t.sup_bound
            };
            if i < t.n || !ok {
                return Err(Error::Numerical(format!(
                    "tail certificate fails at sample {i}: ratio {r} vs bound {}",
                    t.sup_bound
                )));
            }
        }
        let wm = window_max.unwrap_or(t.sup_bound - Rational64::one());
        if t.sup_bound > wm {
            if !t.strict {
                return Err(Error::Numerical(format!(
                    "tail bound {} exceeds the window maximum {wm} and may be attained outside the window",
                    t.sup_bound
                )));
            }
            a = t.sup_bound;
            attained = false;
            warnings.push(format!(
                "supremum {a} is not attained; b is reported as 0 (log exponent -1)"
            ));
        } else if t.sup_bound == wm && !t.strict {
            return Err(Error::Numerical(format!(
                "tail may attain the window maximum {wm}; b cannot be certified"
            )));
        }
    }

    if !attained {
        return Ok(RaisedInvariants {
            a,
            b: Count::Finite(0),
            argmax_labels: Vec::new(),
            attained,
            warnings,
        });
    }
    let mut b = Count::Finite(0);
    let mut argmax_labels = Vec::new();
    for e in fam.entries.iter().filter(|e| e.ratio() == a) {
        b = b.plus(e.multiplicity);
        argmax_labels.push(e.label.clone());
    }
    Ok(RaisedInvariants {
        a,
        b,
        argmax_labels,
        attained,
        warnings,
    })
}

/// Invariants of a product height: `a = max`, and `b` sums over the
/// factors attaining it.
pub fn product_combine(x: &RaisedInvariants, y: &RaisedInvariants) -> Result<RaisedInvariants> {
    if !x.attained || !y.attained {
        return Err(Error::Config(
            "product of invariants with a non-attained supremum".into(),
        ));
    }
    let a = x.a.max(y.a);
    let mut b = Count::Finite(0);
    let mut labels = Vec::new();
    let mut warnings = Vec::new();
    for f in [x, y] {
        if f.a == a {
            b = b.plus(f.b);
            labels.extend(f.argmax_labels.iter().cloned());
            warnings.extend(f.warnings.iter().cloned());
        }
    }
    Ok(RaisedInvariants {
        a,
        b,
        argmax_labels: labels,
        attained: true,
        warnings,
    })
}

/// Anticanonical invariants of a Fano variety with canonical singularities:
/// `a = 1`, `b = ρ + γ` (Picard rank plus crepant divisors).
pub fn fano_ab(rho: u64, gamma: u64) -> Result<RaisedInvariants> {
    if rho == 0 {
        return Err(Error::Config("Picard rank must be at least 1".into()));
    }
    Ok(RaisedInvariants::known(Rational64::one(), rho + gamma))
}

/// The `μ_2`-gerbe over the open part of the coarse space of `M_{1,1}`
/// with weight `d` and twisted raising value `c0`: the product of `(2/d, 1)`
/// and `(1/c0, 1)`.
pub fn gerbe_product_invariants(d: i64, c0: Rational64) -> Result<RaisedInvariants> {
    if d <= 0 || c0 <= Rational64::zero() {
        return Err(Error::Config("d and c0 must be positive".into()));
    }
    let mut base = RaisedInvariants::known(Rational64::new(2, d), 1);
    base.argmax_labels = vec!["coarse".into()];
    let mut gerbe = RaisedInvariants::known(c0.recip(), 1);
    gerbe.argmax_labels = vec!["mu2".into()];
    product_combine(&base, &gerbe)
}

#[derive(Deserialize, Serialize)]
struct EntryJson {
    label: String,
    dim: String,
    c: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiplicity: Option<serde_json::Value>,
}

#[derive(Deserialize, Serialize)]
struct TailJson {
    #[serde(rename = "N")]
    n: u64,
    sup: String,
    #[serde(default = "yes")]
    strict: bool,
    #[serde(default)]
    samples: Vec<(u64, String)>,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize, Serialize)]
struct FamilyJson {
    entries: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailJson>,
    #[serde(default)]
    infinite: bool,
}

pub fn parse_ratio(s: &str) -> Result<Rational64> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.trim().split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n.trim().parse().map_err(|_| bad())?, d))
        }
        None => Ok(Rational64::from(
            s.trim().parse::<i64>().map_err(|_| bad())?,
        )),
    }
}

impl SectoroidFamily {
    /// Reads `{"entries":[{"label","dim":"p/q","c":"p/q"}],"tail":{"N":..,"sup":..}}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FamilyJson = serde_json::from_str(s)?;
        let entries = raw
            .entries
            .into_iter()
            .map(|e| {
                let multiplicity = match e.multiplicity {
                    None => Count::Finite(1),
                    Some(serde_json::Value::String(s)) if s == "inf" => Count::Infinite,
                    Some(v) => Count::Finite(v.as_u64().ok_or_else(|| {
                        Error::Parse(format!("bad multiplicity {v} for `{}`", e.label))
                    })?),
                };
                Ok(Entry {
                    label: e.label,
                    dim: parse_ratio(&e.dim)?,
                    c: parse_ratio(&e.c)?,
                    multiplicity,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let tail = raw
            .tail
            .map(|t| -> Result<TailCertificate> {
                Ok(TailCertificate {
                    n: t.n,
                    sup_bound: parse_ratio(&t.sup)?,
                    strict: t.strict,
                    samples: t
                        .samples
                        .iter()
                        .map(|(i, r)| Ok((*i, parse_ratio(r)?)))
                        .collect::<Result<_>>()?,
                })
            })
            .transpose()?;
        Ok(SectoroidFamily {
            entries,
            infinite: raw.infinite || tail.is_some(),
            tail,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = FamilyJson {
            entries: self
                .entries
                .iter()
                .map(|e| EntryJson {
                    label: e.label.clone(),
                    dim: e.dim.to_string(),
                    c: e.c.to_string(),
                    multiplicity: match e.multiplicity {
                        Count::Finite(1) => None,
                        Count::Finite(n) => Some(n.into()),
                        Count::Infinite => Some("inf".into()),
                    },
                })
                .collect(),
            tail: self.tail.as_ref().map(|t| TailJson {
                n: t.n,
                sup: t.sup_bound.to_string(),
                strict: t.strict,
                samples: t.samples.iter().map(|(i, r)| (*i, r.to_string())).collect(),
            }),
            infinite: self.infinite,
        };
        serde_json::to_string(&raw).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn basic_examples() {
        let f = SectoroidFamily::finite(vec![Entry::new("A", r(0, 1), r(1, 1))]);
        let x = ab_invariants(&f).unwrap();
        assert_eq!((x.a, x.b), (r(1, 1), Count::Finite(1)));
        let f = SectoroidFamily::finite(vec![
            Entry::new("A", r(1, 1), r(2, 1)),
            Entry::new("B", r(1, 1), r(2, 1)),
            Entry::new("C", r(0, 1), r(1, 1)),
        ]);
        let x = ab_invariants(&f).unwrap();
        assert_eq!((x.a, x.b), (r(1, 1), Count::Finite(3)));
        assert!(ab_invariants(&SectoroidFamily::finite(vec![Entry::new(
            "Z",
            r(0, 1),
            r(0, 1)
        )]))
        .is_err());
        let mut inf = SectoroidFamily::finite(vec![Entry::new("A", r(0, 1), r(1, 1))]);
        inf.infinite = true;
        assert!(ab_invariants(&inf).is_err());
    }

    #[test]
    fn infinite_multiplicity() {
        let f = SectoroidFamily::finite(vec![
            Entry::new("A", r(0, 1), r(1, 1)).with_multiplicity(Count::Infinite),
            Entry::new("B", r(0, 1), r(2, 1)),
        ]);
        assert_eq!(ab_invariants(&f).unwrap().b, Count::Infinite);
    }

    #[test]
    fn unattained_supremum() {
        // ratios 1 - 1/n approach 1 without reaching it
        let entries: Vec<Entry> = (2..10)
            .map(|n| Entry::new(format!("n{n}"), r(n - 2, 1), r(n, 1)))
            .collect();
        let samples = (10..50u64)
            .map(|n| (n, r(n as i64 - 1, n as i64)))
            .collect();
        let f = SectoroidFamily::infinite(
            entries,
            TailCertificate {
                n: 10,
                sup_bound: r(1, 1),
                strict: true,
                samples,
            },
        );
        let x = ab_invariants(&f).unwrap();
        assert_eq!((x.a, x.b, x.attained), (r(1, 1), Count::Finite(0), false));
        assert!(!x.warnings.is_empty());
    }

    #[test]
    fn bad_certificate_is_rejected() {
        let f = SectoroidFamily::infinite(
            vec![Entry::new("A", r(0, 1), r(1, 1))],
            TailCertificate {
                n: 2,
                sup_bound: r(1, 2),
                strict: true,
                samples: vec![(3, r(2, 3))],
            },
        );
        assert!(ab_invariants(&f).is_err());
    }

    #[test]
    fn product_examples() {
        let one = RaisedInvariants::known(r(1, 1), 1);
        let x = product_combine(&one, &one).unwrap();
        assert_eq!((x.a, x.b), (r(1, 1), Count::Finite(2)));
        let x = product_combine(
            &RaisedInvariants::known(r(2, 1), 3),
            &RaisedInvariants::known(r(1, 1), 5),
        )
        .unwrap();
        assert_eq!((x.a, x.b), (r(2, 1), Count::Finite(3)));
        let x = gerbe_product_invariants(1, r(1, 2)).unwrap();
        assert_eq!((x.a, x.b), (r(2, 1), Count::Finite(2)));
    }

    #[test]
    fn fano_examples() {
        assert_eq!(fano_ab(1, 2).unwrap().b, Count::Finite(3));
        assert_eq!(fano_ab(1, 0).unwrap().b, Count::Finite(1));
        assert_eq!(fano_ab(4, 1).unwrap().b, Count::Finite(5));
        assert!(fano_ab(0, 1).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let s = r#"{"entries":[{"label":"n2","dim":"1","c":"2"},{"label":"n3","dim":"2","c":"3"}],"tail":{"N":4,"sup":"1","strict":true,"samples":[[4,"3/4"]]}}"#;
        let f = SectoroidFamily::from_json(s).unwrap();
        assert_eq!(f.entries.len(), 2);
        assert_eq!(SectoroidFamily::from_json(&f.to_json()).unwrap(), f);
        let x = ab_invariants(&f).unwrap();
        assert_eq!((x.a, x.b), (r(1, 1), Count::Finite(2)));
        let mut loose = f.clone();
        loose.tail.as_mut().unwrap().strict = false;
        assert!(ab_invariants(&loose).is_err());
    }

    fn arb_entries() -> impl Strategy<Value = Vec<Entry>> {
        prop::collection::vec((0i64..6, 1i64..4, 1i64..6, 1i64..3), 1..8).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (dn, dd, cn, cd))| Entry::new(format!("e{i}"), r(dn, dd), r(cn, cd)))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn order_independent(mut es in arb_entries(), seed in any::<u64>()) {
            let base = ab_invariants(&SectoroidFamily::finite(es.clone())).unwrap();
            let n = es.len();
            es.rotate_left((seed as usize) % n);
            es.reverse();
            let other = ab_invariants(&SectoroidFamily::finite(es)).unwrap();
            prop_assert_eq!((base.a, base.b), (other.a, other.b));
        }

        #[test]
        fn refinement_invariant(es in arb_entries(), splits in prop::collection::vec(0u8..3, 8)) {
            // Each entry keeps one top-dimensional piece plus lower-dimensional ones.
            let base = ab_invariants(&SectoroidFamily::finite(es.clone())).unwrap();
            let mut refined = Vec::new();
            for (i, e) in es.iter().enumerate() {
                refined.push(e.clone());
                for k in 0..splits[i % splits.len()] {
                    let lower = e.dim - Rational64::from(k as i64 + 1);
                    refined.push(Entry::new(format!("{}.{k}", e.label), lower, e.c));
                }
            }
            let fine = ab_invariants(&SectoroidFamily::finite(refined)).unwrap();
            prop_assert_eq!((base.a, base.b), (fine.a, fine.b));
        }

        #[test]
        fn product_is_commutative_and_associative(a1 in 1i64..4, a2 in 1i64..4, a3 in 1i64..4, b1 in 1u64..4, b2 in 1u64..4, b3 in 1u64..4) {
            let x = RaisedInvariants::known(r(a1, 2), b1);
            let y = RaisedInvariants::known(r(a2, 2), b2);
            let z = RaisedInvariants::known(r(a3, 2), b3);
            let xy = product_combine(&x, &y).unwrap();
            let yx = product_combine(&y, &x).unwrap();
            prop_assert_eq!((xy.a, xy.b), (yx.a, yx.b));
            let l = product_combine(&xy, &z).unwrap();
            let rr = product_combine(&x, &product_combine(&y, &z).unwrap()).unwrap();
            prop_assert_eq!((l.a, l.b), (rr.a, rr.b));
        }
    }
}
