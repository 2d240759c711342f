//! Discriminant exponents of `(Z/p)^r`-torsors over `F_q((t))`.
//!
//! A torsor is a vector `h = (h_1, .., h_r)` of Artin–Schreier classes.
//! The conductors of the characters `χ(h) = Σ χ_i h_i` define a flag of
//! subspaces of the dual group together with jumps `j_1 > .. > j_s`, and
//! the discriminant exponent follows from the conductor-discriminant
//! formula.

use std::collections::BTreeMap;
use std::io::Write;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::LaurentSeries;

/// Jumps `j_1 > .. > j_s` (prime to `p`) and flag dimensions
/// `r = r_1 > r_2 > .. > r_{s+1} >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FlagProfile {
    pub p: u32,
    pub r: u32,
    pub jumps: Vec<u64>,
    pub dims: Vec<u32>,
}

impl FlagProfile {
    pub fn new(p: u32, r: u32, jumps: Vec<u64>, dims: Vec<u32>) -> Result<Self> {
        let ok = dims.len() == jumps.len() + 1
            && dims[0] == r
            && dims.windows(2).all(|w| w[0] > w[1])
            && jumps.windows(2).all(|w| w[0] > w[1])
            && jumps.iter().all(|&j| j > 0 && j % p as u64 != 0);
        if !ok {
            return Err(Error::Config(format!(
                "invalid flag profile p={p} r={r} jumps={jumps:?} dims={dims:?}"
            )));
        }
        Ok(FlagProfile { p, r, jumps, dims })
    }

    /// The trivial profile (`s = 0`).
    pub fn trivial(p: u32, r: u32) -> Self {
        FlagProfile {
            p,
            r,
            jumps: Vec::new(),
            dims: vec![r],
        }
    }

    pub fn s(&self) -> usize {
        self.jumps.len()
    }

    /// `u = r - r_{s+1}`, the rank of the connected part.
    pub fn u(&self) -> u32 {
        self.r - self.dims[self.s()]
    }

    fn layers(&self) -> impl Iterator<Item = (u64, u32, u32)> + '_ {
        self.jumps
            .iter()
            .enumerate()
            .map(|(i, &j)| (j, self.dims[i], self.dims[i + 1]))
    }
}

fn pw(p: u32, e: u32) -> i64 {
    (p as i64).pow(e)
}

/// `Σ (j_i + 1)(p^{r_i} - p^{r_{i+1}})`.
pub fn disc_exponent(prof: &FlagProfile) -> i64 {
    prof.layers()
        .map(|(j, a, b)| (j as i64 + 1) * (pw(prof.p, a) - pw(prof.p, b)))
        .sum()
}

/// `Σ (r_i - r_{i+1}) (j_i - floor(j_i/p))`.
pub fn sector_dimension(prof: &FlagProfile) -> i64 {
    let p = prof.p as u64;
    prof.layers()
        .map(|(j, a, b)| (a - b) as i64 * (j - j / p) as i64)
        .sum()
}

/// `(1 + dim) / disc`, for `s >= 1`.
pub fn alpha_ratio(prof: &FlagProfile) -> Result<Rational64> {
    let d = disc_exponent(prof);
    if d == 0 {
        return Err(Error::Config(
            "alpha is undefined for the trivial profile".into(),
        ));
    }
    Ok(Rational64::new(1 + sector_dimension(prof), d))
}

/// All characters of `(F_p)^r` as coordinate vectors, index = base-`p` code.
pub fn characters(p: u32, r: u32) -> Vec<Vec<u32>> {
    (0..pw(p, r) as u32)
        .map(|mut c| {
            (0..r)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    d
                })
                .collect()
        })
        .collect()
}

/// Conductor of a reduced (or unreduced) Artin–Schreier class: reduced
/// pole order plus one, or zero when unramified.
pub fn class_conductor(x: &LaurentSeries) -> Result<u64> {
    let (_, m) = x.as_reduce()?;
    Ok(if m == 0 { 0 } else { m + 1 })
}

/// Profile of a class vector together with the flag `V_1 ⊋ .. ⊋ V_{s+1}`,
/// each subspace given by the character codes it contains.
#[derive(Clone, Debug)]
pub struct ClassProfile {
    pub profile: FlagProfile,
    pub flag: Vec<Vec<u32>>,
    /// `conductors[code]` for every character.
    pub conductors: Vec<u64>,
}

/// `χ(h)` for the character with coordinates `chi`.
pub fn character_image(h: &[LaurentSeries], chi: &[u32]) -> LaurentSeries {
    let k = h[0].field();
    let prec = h.iter().map(|x| x.precision()).min().unwrap();
    h.iter()
        .zip(chi)
        .fold(LaurentSeries::zero(k, prec), |acc, (x, &c)| {
            acc.add(&x.scale(k.from_int(c as i64)))
        })
}

pub fn profile_of_class(h: &[LaurentSeries]) -> Result<ClassProfile> {
    if h.is_empty() {
        return Err(Error::Config("empty class vector".into()));
    }
    let p = h[0].field().p();
    let r = h.len() as u32;
    let chars = characters(p, r);
    let conductors: Vec<u64> = chars
        .iter()
        .map(|chi| class_conductor(&character_image(h, chi)))
        .collect::<Result<_>>()?;
    let mut levels: Vec<u64> = conductors.iter().copied().filter(|&c| c > 0).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let jumps: Vec<u64> = levels.iter().map(|c| c - 1).collect();
    let mut flag = vec![(0..chars.len() as u32).collect::<Vec<_>>()];
    for &j in &jumps {
        flag.push(
            (0..chars.len() as u32)
                .filter(|&c| conductors[c as usize] <= j)
                .collect(),
        );
    }
    let dims: Vec<u32> = flag
        .iter()
        .map(|v| {
            let mut d = 0;
            while pw(p, d) < v.len() as i64 {
                d += 1;
            }
            if pw(p, d) != v.len() as i64 {
                return Err(Error::Numerical(format!(
                    "level set of size {} is not a subspace",
                    v.len()
                )));
            }
            Ok(d)
        })
        .collect::<Result<_>>()?;
    let profile = FlagProfile::new(p, r, jumps, dims)?;
    Ok(ClassProfile {
        profile,
        flag,
        conductors,
    })
}

/// `Σ_{χ ≠ 0} c(χ(h))`, the conductor-discriminant character sum.
pub fn character_sum_disc(h: &[LaurentSeries]) -> Result<i64> {
    let p = h[0].field().p();
    let chars = characters(p, h.len() as u32);
    let mut s = 0;
    for chi in chars.iter().skip(1) {
        s += class_conductor(&character_image(h, chi))? as i64;
    }
    Ok(s)
}

/// Gaussian binomial `[n choose k]_p`.
pub fn gaussian_binomial(n: u32, k: u32, p: u32) -> u64 {
    if k > n {
        return 0;
    }
    let p = p as u64;
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num *= p.pow(n - i) - 1;
        den *= p.pow(i + 1) - 1;
    }
    num / den
}

/// Number of flags `F_p^r = V_1 ⊋ .. ⊋ V_{s+1}` with the given dimensions.
pub fn flag_count(p: u32, dims: &[u32]) -> u64 {
    dims.windows(2)
        .map(|w| gaussian_binomial(w[0], w[1], p))
        .product()
}

/// Explicit enumeration of subspaces of `F_p^r` as bitmasks over character
/// codes; usable for `p^r <= 64`.
pub fn subspaces(p: u32, r: u32) -> Vec<u64> {
    let chars = characters(p, r);
    let n = chars.len();
    assert!(n <= 64, "subspace enumeration needs p^r <= 64");
    let code = |v: &[u32]| {
        v.iter()
            .rev()
            .fold(0usize, |a, &d| a * p as usize + d as usize)
    };
    let add =
        |a: &[u32], b: &[u32]| -> Vec<u32> { a.iter().zip(b).map(|(x, y)| (x + y) % p).collect() };
    let mut found = std::collections::BTreeSet::new();
    let mut frontier = vec![1u64]; // {0}
    found.insert(1u64);
    while let Some(mask) = frontier.pop() {
        for (i, v) in chars.iter().enumerate() {
            if mask >> i & 1 == 1 {
                continue;
            }
            // span(mask ∪ {v})
            let mut m = mask;
            loop {
                let members: Vec<usize> = (0..n).filter(|&j| m >> j & 1 == 1).collect();
                let mut grown = m;
                for &a in &members {
                    let mut w = chars[a].clone();
                    for _ in 0..p {
                        w = add(&w, v);
                        grown |= 1 << code(&w);
                    }
                }
                if grown == m {
                    break;
                }
                m = grown;
            }
            if found.insert(m) {
                frontier.push(m);
            }
        }
    }
    found.into_iter().collect()
}

/// Counts flags with the given dimensions by walking explicit subspaces.
pub fn flag_count_explicit(p: u32, dims: &[u32]) -> u64 {
    let subs = subspaces(p, dims[0]);
    let size = |d: u32| pw(p, d) as u32;
    fn walk(subs: &[u64], cur: u64, rest: &[u32]) -> u64 {
        match rest.split_first() {
            None => 1,
            Some((&sz, tail)) => subs
                .iter()
                .filter(|&&s| s.count_ones() == sz && s & cur == s && s != cur)
                .map(|&s| walk(subs, s, tail))
                .sum(),
        }
    }
    let full = subs.iter().copied().max_by_key(|s| s.count_ones()).unwrap();
    let sizes: Vec<u32> = dims[1..].iter().map(|&d| size(d)).collect();
    walk(&subs, full, &sizes)
}

/// A maximizing profile and the number of flags realizing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub profile: FlagProfile,
    pub flags: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscInvariants {
    #[serde(serialize_with = "crate::local::ser_ratio")]
    pub a: Rational64,
    pub b: u64,
    pub witnesses: Vec<Witness>,
}

/// `(1 + r(p-1)) / (p(p^r - 1))`.
pub fn disc_a(p: u32, r: u32) -> Rational64 {
    Rational64::new(1 + r as i64 * (p as i64 - 1), p as i64 * (pw(p, r) - 1))
}

/// Closed-form discriminant invariants with their maximizers.
pub fn disc_invariants(p: u32, r: u32) -> Result<DiscInvariants> {
    if r == 0 {
        return Err(Error::Config("rank must be at least 1".into()));
    }
    let prof = |j: u64, dims: Vec<u32>| FlagProfile::new(p, r, vec![j], dims).unwrap();
    let witnesses: Vec<Witness> = if r == 1 {
        (1..p as u64)
            .map(|j| Witness {
                profile: prof(j, vec![1, 0]),
                flags: 1,
            })
            .collect()
    } else if p == 2 && r == 2 {
        vec![
            Witness {
                profile: prof(1, vec![2, 0]),
                flags: 1,
            },
            Witness {
                profile: prof(1, vec![2, 1]),
                flags: 3,
            },
        ]
    } else {
        vec![Witness {
            profile: prof(p as u64 - 1, vec![r, 0]),
            flags: 1,
        }]
    };
    let b = witnesses.iter().map(|w| w.flags).sum();
    Ok(DiscInvariants {
        a: disc_a(p, r),
        b,
        witnesses,
    })
}

/// All valid profiles with `j_1 <= jmax`, sorted.
pub fn enumerate_profiles(p: u32, r: u32, jmax: u64) -> Vec<FlagProfile> {
    let js: Vec<u64> = (1..=jmax).filter(|j| j % p as u64 != 0).collect();
    let mut dim_seqs = Vec::new();
    fn dims_rec(cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let last = *cur.last().unwrap();
        if cur.len() > 1 {
            out.push(cur.clone());
        }
        for d in (0..last).rev() {
            cur.push(d);
            dims_rec(cur, out);
            cur.pop();
        }
    }
    dims_rec(&mut vec![r], &mut dim_seqs);
    let mut out = Vec::new();
    for dims in dim_seqs {
        let s = dims.len() - 1;
        let mut idx: Vec<usize> = (0..s).collect();
        // combinations of s jumps, in decreasing order
        if s > js.len() {
            continue;
        }
        loop {
            let jumps: Vec<u64> = idx.iter().rev().map(|&i| js[i]).collect();
            out.push(FlagProfile {
                p,
                r,
                jumps,
                dims: dims.clone(),
            });
            let mut k = s;
            while k > 0 && idx[k - 1] == js.len() - s + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for m in k..s {
                idx[m] = idx[m - 1] + 1;
            }
        }
    }
    out.sort();
    out
}

/// Exhaustive maximization of `alpha_ratio` over `j_1 <= jmax`, counting
/// maximizers with their flag multiplicities.
pub fn disc_invariants_search(p: u32, r: u32, jmax: u64) -> DiscInvariants {
    let profiles = enumerate_profiles(p, r, jmax);
    let best = profiles
        .par_iter()
        .map(|pr| alpha_ratio(pr).unwrap())
        .reduce(|| Rational64::new(0, 1), |a, b| a.max(b));
    let mut witnesses: Vec<Witness> = profiles
        .into_par_iter()
        .filter(|pr| alpha_ratio(pr).unwrap() == best)
        .map(|pr| {
            let flags = flag_count(p, &pr.dims);
            Witness { profile: pr, flags }
        })
        .collect();
    witnesses.sort_by(|a, b| a.profile.cmp(&b.profile));
    let b = witnesses.iter().map(|w| w.flags).sum();
    DiscInvariants {
        a: best,
        b,
        witnesses,
    }
}

/// A `j_1` beyond which every profile has `alpha` strictly below `disc_a`.
///
/// In the variables `l_i >= 0` with `k_λ = Σ_{i>=λ} l_i`, the excess
/// `f = dim - a disc` is `Σ c_i l_i + Σ {k_i/p}` with all `c_i < 0`, so
/// `f <= c_max k_1 + u(p-1)/p`; rank-`u` profiles scale by `p^{r-u}`.
pub fn tail_bound(p: u32, r: u32) -> u64 {
    let pf = p as f64;
    let mut bound = 0u64;
    for u in 1..=r {
        let a = disc_a(p, u);
        let a = *a.numer() as f64 / *a.denom() as f64;
        let cmax = (1..=u)
            .map(|i| i as f64 * (pf - 1.0) / pf - a * (pf.powi(u as i32) - pf.powi((u - i) as i32)))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(cmax < 0.0);
        let n = ((1.0 + u as f64 * (pf - 1.0) / pf) / -cmax).floor() as u64 + 1;
        bound = bound.max(n);
    }
    bound
}

/// `(1 + r'(p-1)) / (p^{r-r'+1}(p^{r'} - 1))`, the rank-`r'` maximum seen
/// inside rank `r`.
pub fn sub_rank_alpha(p: u32, r: u32, rp: u32) -> Rational64 {
    Rational64::new(
        1 + rp as i64 * (p as i64 - 1),
        pw(p, r - rp + 1) * (pw(p, rp) - 1),
    )
}

/// Writes `p,r,s,jumps,dims,dimension,disc,alpha` rows.
pub fn write_profiles_csv<W: Write>(out: W, profiles: &[FlagProfile]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "r", "s", "jumps", "dims", "dimension", "disc", "alpha"])?;
    let join = |v: Vec<String>| v.join(";");
    for pr in profiles {
        let alpha = alpha_ratio(pr).map(|a| a.to_string()).unwrap_or_default();
        w.write_record([
            pr.p.to_string(),
            pr.r.to_string(),
            pr.s().to_string(),
            join(pr.jumps.iter().map(|j| j.to_string()).collect()),
            join(pr.dims.iter().map(|d| d.to_string()).collect()),
            sector_dimension(pr).to_string(),
            disc_exponent(pr).to_string(),
            alpha,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Histogram of profiles of all class vectors, keyed by profile.
pub fn profile_census(classes: &[Vec<LaurentSeries>]) -> Result<BTreeMap<FlagProfile, u64>> {
    let mut m = BTreeMap::new();
    for h in classes {
        *m.entry(profile_of_class(h)?.profile).or_insert(0) += 1;
    }
    Ok(m)
}
