use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};
use stacky_core::asymptotics::{
    growth_fit, phi_exact, phi_leading, phi_quadrature, product_count, ratio_band, read_table,
    write_table, GrowthRate, HeightMultiset,
};
use stacky_core::disc::{
    character_sum_disc, disc_exponent, enumerate_profiles, profile_of_class, write_profiles_csv,
};
use stacky_core::elliptic::{
    compare_with_tate, global_heights, local_invariants, tate_oracle, WeierstrassModel,
};
use stacky_core::global::{
    as_count_table, certify_coverage, count_mu2_classes, count_table, coverage_requirements,
    enumerate_as_classes, heights, mu2_multiset, p1_census, p1_multiset, write_table_csv,
    HeightKind,
};
use stacky_core::invariants::{
    ab_invariants, fano_ab, gerbe_product_invariants, parse_ratio, RaisedInvariants,
    SectoroidFamily,
};
use stacky_core::local::{
    as_conductor_invariants, conductor_invariants, count_table as local_count_table,
    write_count_csv, AbelianPGroup,
};
use stacky_core::verify::local_sweep;
use stacky_core::{acceptance, Error, FiniteField, LaurentSeries, RationalFunction};

use crate::args::*;
use crate::CliError;

type Res = std::result::Result<(), CliError>;

fn sink(out: &Option<std::path::PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(Error::from)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn emit_json(out: &Option<std::path::PathBuf>, v: &Value) -> Res {
    let mut w = sink(out)?;
    let s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    writeln!(w, "{s}").map_err(Error::from)?;
    w.flush().map_err(Error::from)?;
    Ok(())
}

fn field(q: u32) -> Result<FiniteField, CliError> {
    Ok(FiniteField::with_order(q)?)
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Core(Error::Config(msg.into()))
}

/// `q^0, q^1, ...` up to `bmax`.
fn q_powers(q: u32, bmax: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut b = 1u128;
    while b <= bmax {
        out.push(b);
        match b.checked_mul(q as u128) {
            Some(x) => b = x,
            None => break,
        }
    }
    out
}

pub fn local(a: &LocalArgs) -> Res {
    let k = field(a.q)?;
    let g = AbelianPGroup::parse(&a.group, Some(k.p()))?;
    let rows = local_count_table(&g, &k, a.nmax)?;
    let mut w = sink(&a.output.out)?;
    write_count_csv(&mut w, &g, &k, &rows)?;
    Ok(())
}

pub fn disc(a: &DiscArgs) -> Res {
    if !a.class.is_empty() {
        let q = a.q.ok_or_else(|| config("--class needs --q"))?;
        let k = field(q)?;
        let h: Vec<LaurentSeries> = a
            .class
            .iter()
            .map(|s| LaurentSeries::parse(&k, s, 1))
            .collect::<stacky_core::Result<_>>()?;
        let cp = profile_of_class(&h)?;
        let v = json!({
            "profile": cp.profile,
            "flag": cp.flag,
            "conductors": cp.conductors,
            "disc_exponent": disc_exponent(&cp.profile),
            "character_sum": character_sum_disc(&h)?,
        });
        return emit_json(&a.output.out, &v);
    }
    let (Some(p), Some(r)) = (a.p, a.r) else {
        return Err(config("disc needs --p and --r, or --q with --class"));
    };
    if r == 0 {
        return Err(config("rank must be positive"));
    }
    let jmax = a.jmax.unwrap_or(3 * (p as u64).pow(r));
    FiniteField::prime(p)?;
    let profiles = enumerate_profiles(p, r, jmax);
    let mut w = sink(&a.output.out)?;
    write_profiles_csv(&mut w, &profiles)?;
    Ok(())
}

fn raised(inv: &RaisedInvariants) -> Value {
    serde_json::to_value(inv).unwrap_or(Value::Null)
}

pub fn invariants(a: &InvariantsArgs) -> Res {
    if let Some(path) = &a.family {
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        let fam = SectoroidFamily::from_json(&text)?;
        return emit_json(&a.output.out, &raised(&ab_invariants(&fam)?));
    }
    if let Some(rho) = a.rho {
        return emit_json(&a.output.out, &raised(&fano_ab(rho, a.gamma)?));
    }
    let c0 = a.c0.as_deref().map(parse_ratio).transpose()?;
    match a.height {
        HeightSel::O1 | HeightSel::Mu2 if a.d.is_some() && c0.is_some() => {
            let inv = gerbe_product_invariants(a.d.unwrap(), c0.unwrap())?;
            emit_json(&a.output.out, &raised(&inv))
        }
        HeightSel::O1 => {
            let d = a.d.ok_or_else(|| config("o1 needs --d"))?;
            if d < 1 {
                return Err(config("--d must be positive"));
            }
            let inv = RaisedInvariants::known(num_rational::Rational64::new(2, d), 1);
            emit_json(&a.output.out, &raised(&inv))
        }
        HeightSel::Mu2 => {
            let c0 = c0.ok_or_else(|| config("mu2 needs --c0"))?;
            if c0 <= num_rational::Rational64::from(0) {
                return Err(config("--c0 must be positive"));
            }
            let inv = RaisedInvariants::known(c0.recip(), 1);
            emit_json(&a.output.out, &raised(&inv))
        }
        HeightSel::EllipticFf | HeightSel::EllipticFd => Err(CliError::Core(Error::Unsupported(
            "no closed-form a/b for elliptic heights; pass a sectoroid family with --family".into(),
        ))),
        sel => {
            let spec = a
                .group
                .as_deref()
                .ok_or_else(|| config("--group is required"))?;
            let g = AbelianPGroup::parse(spec, None)?;
            let v = match sel {
                HeightSel::Conductor => serde_json::to_value(conductor_invariants(&g)),
                HeightSel::AsConductor => serde_json::to_value(as_conductor_invariants(&g)),
                _ => {
                    if g.exponents().iter().any(|&e| e != 1) {
                        return Err(config(format!(
                            "discriminant invariants need an elementary group, got {g}"
                        )));
                    }
                    let d = stacky_core::disc::disc_invariants(g.p(), g.exponents().len() as u32)?;
                    serde_json::to_value(d)
                }
            }
            .map_err(Error::from)?;
            emit_json(&a.output.out, &v)
        }
    }
}

fn height_kind(sel: HeightSel) -> Result<HeightKind, CliError> {
    match sel {
        HeightSel::Conductor => Ok(HeightKind::Conductor),
        HeightSel::Discriminant => Ok(HeightKind::Discriminant),
        other => Err(config(format!(
            "global counts support conductor and discriminant heights, not {other:?}"
        ))),
    }
}

pub fn global(a: &GlobalArgs) -> Res {
    let k = field(a.q)?;
    let g = AbelianPGroup::parse(&a.group, Some(k.p()))?;
    if g.p() != k.p() || g.exponents().iter().any(|&e| e != 1) {
        return Err(CliError::Core(Error::Unsupported(format!(
            "global counts need an elementary abelian {}-group, got {g}",
            k.p()
        ))));
    }
    let r = g.exponents().len() as u32;
    let kind = height_kind(a.height)?;
    let bs = q_powers(a.q, a.bmax);
    let include_constant = !a.no_constant;
    let mut w = sink(&a.output.out)?;
    match a.method {
        Method::Census => {
            let lmax = bs.len().saturating_sub(1) as u64;
            let rows = as_count_table(&k, r, kind, lmax, include_constant)?;
            write_table_csv(&mut w, &rows)?;
        }
        Method::Enumerate => {
            let (need_sd, need_mo) = coverage_requirements(&k, r, kind, a.bmax);
            let (sd, mo) = (
                a.support_deg.unwrap_or(need_sd),
                a.max_order.unwrap_or(need_mo),
            );
            certify_coverage(&k, r, kind, sd, mo, a.bmax)?;
            let classes = enumerate_as_classes(&k, r as usize, sd, mo, a.budget)?;
            let pts = heights(&classes, kind);
            let rows = count_table(a.q, &pts, &bs, include_constant);
            write_table_csv(&mut w, &rows)?;
        }
    }
    Ok(())
}

pub fn p1(a: &P1Args) -> Res {
    let k = field(a.q)?;
    let bs = q_powers(a.q, a.bmax);
    let census = p1_census(&k, bs.len().saturating_sub(1) as u32, a.budget)?;
    let mut acc = 0u64;
    let rows: Vec<(u128, u64)> = bs
        .iter()
        .zip(&census)
        .map(|(&b, &n)| {
            acc += n;
            (b, acc)
        })
        .collect();
    write_table_csv(sink(&a.output.out)?, &rows)?;
    Ok(())
}

pub fn mu2(a: &Mu2Args) -> Res {
    let k = field(a.q)?;
    let c0 = parse_ratio(&a.c0)?;
    let rows: Vec<(u128, u64)> = q_powers(a.q, a.bmax)
        .into_iter()
        .map(|b| Ok((b, count_mu2_classes(&k, b, c0, a.budget)?)))
        .collect::<stacky_core::Result<_>>()?;
    write_table_csv(sink(&a.output.out)?, &rows)?;
    Ok(())
}

pub fn elliptic(a: &EllipticArgs) -> Res {
    let k = field(a.q)?;
    if k.p() != 3 {
        return Err(config(format!(
            "elliptic invariants are for characteristic 3, got q = {}",
            a.q
        )));
    }
    if a.global {
        if a.q != 3 {
            return Err(CliError::Core(Error::Unsupported(
                "global heights are implemented over F_3(t)".into(),
            )));
        }
        let rf = |s: &str| RationalFunction::parse(&k, s);
        let h = global_heights(&rf(&a.a2)?, &rf(&a.a4)?, &rf(&a.a6)?, a.prec)?;
        let mut v = serde_json::to_value(&h).map_err(Error::from)?;
        v["F"] = json!(format!("3^{}", h.conductor));
        v["D"] = json!(format!("3^{}", h.discriminant));
        return emit_json(&a.output.out, &v);
    }
    let s = |x: &str| LaurentSeries::parse(&k, x, a.prec);
    let e = WeierstrassModel::new(s(&a.a2)?, s(&a.a4)?, s(&a.a6)?)?;
    let inv = local_invariants(&e)?;
    let tate = tate_oracle(&e)?;
    let mut v = serde_json::to_value(&inv).map_err(Error::from)?;
    v["kodaira"] = json!(tate.kodaira.to_string());
    v["tate"] = serde_json::to_value(&tate).map_err(Error::from)?;
    emit_json(&a.output.out, &v)
}

pub fn asym(a: &AsymArgs) -> Res {
    if let Some(path) = &a.table {
        let file = File::open(path).map_err(Error::from)?;
        let table: Vec<(f64, f64)> = read_table(file)?
            .into_iter()
            .filter(|&(b, _)| b >= a.bmin)
            .collect();
        let fit = growth_fit(&table)?;
        let mut v = serde_json::to_value(fit).map_err(Error::from)?;
        if let Some(rate) = &a.rate {
            if rate.len() != 2 {
                return Err(config("--rate takes two values, alpha,beta"));
            }
            if rate[1] < 0.0 || rate[1].fract() != 0.0 {
                return Err(config(
                    "the log power of --rate must be a nonnegative integer",
                ));
            }
            let (lo, hi) = ratio_band(
                &table,
                GrowthRate {
                    alpha: rate[0],
                    beta: rate[1] as u32,
                },
            );
            v["band"] = json!([lo, hi]);
        }
        return emit_json(&a.output.out, &v);
    }
    let b = a.b.ok_or_else(|| config("asym needs --table or --B"))?;
    let quad = phi_quadrature(a.k, b, a.beta1, a.beta2, a.tol)?;
    let mut v = json!({"k": a.k, "B": b, "beta1": a.beta1, "beta2": a.beta2, "quadrature": quad});
    if a.k == -1.0 {
        v["exact"] = json!(phi_exact(b, a.beta1, a.beta2)?);
    } else {
        let (lead, err) = phi_leading(a.k, b, a.beta1, a.beta2)?;
        v["leading"] = json!(lead);
        v["error_scale"] = json!(err);
    }
    emit_json(&a.output.out, &v)
}

fn multiset(spec: &str, budget: u64) -> Result<HeightMultiset, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let int = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| CliError::Core(Error::Parse(format!("bad integer `{s}` in `{spec}`"))))
    };
    match parts.as_slice() {
        ["range", n] => Ok(HeightMultiset::new(
            (1..=int(n)?).map(|h| (h as f64, 1)).collect(),
        )?),
        ["p1", q, kmax, rest @ ..] if rest.len() <= 1 => {
            let d = rest.first().map(|s| int(s)).transpose()?.unwrap_or(1);
            Ok(p1_multiset(
                &field(int(q)? as u32)?,
                int(kmax)? as u32,
                d as u32,
                budget,
            )?)
        }
        ["mu2", q, rmax, rest @ ..] if rest.len() <= 1 => {
            let c0 = rest
                .first()
                .map(|s| parse_ratio(s))
                .transpose()?
                .unwrap_or_else(|| 1.into());
            Ok(mu2_multiset(
                &field(int(q)? as u32)?,
                int(rmax)? as u32,
                c0,
                budget,
            )?)
        }
        _ if Path::new(spec).exists() => {
            let mut rdr = csv::Reader::from_path(spec).map_err(Error::from)?;
            let mut items = Vec::new();
            for row in rdr.deserialize::<(f64, u64)>() {
                items.push(row.map_err(Error::from)?);
            }
            Ok(HeightMultiset::new(items)?)
        }
        _ => Err(config(format!(
            "unknown multiset `{spec}`: use range:N, p1:Q:K[:D], mu2:Q:R[:C0] or a CSV file"
        ))),
    }
}

pub fn product(a: &ProductArgs) -> Res {
    let x = multiset(&a.left, a.budget)?;
    let y = multiset(&a.right, a.budget)?;
    let rows: Vec<(f64, u64)> =
        a.bs.iter()
            .map(|&b| (b, product_count(&x, &y, b)))
            .collect();
    write_table(sink(&a.output.out)?, &rows)?;
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Res {
    let mut lines = Vec::new();
    let mut failed = 0;
    let mut report = Vec::new();
    match a.suite {
        Suite::Acceptance => {
            let results = acceptance::run(&a.only, |r| {
                for l in r.lines() {
                    println!("{l}");
                }
            });
            failed = results.iter().filter(|r| r.is_unexpected_failure()).count();
            report = results
                .iter()
                .map(|r| serde_json::to_value(r).unwrap_or(Value::Null))
                .collect();
        }
        Suite::Tate => {
            for q in [3, 9] {
                let rep = compare_with_tate(&field(q)?, a.count, a.seed, 40)?;
                let tag = if rep.passed() { "PASS" } else { "FAIL" };
                failed += usize::from(!rep.passed());
                lines.push(format!(
                    "{tag} tate F_{q}: {} models, {} mismatches ({} mult, {} add, {} good, {} skipped)",
                    rep.compared,
                    rep.mismatches.len(),
                    rep.multiplicative,
                    rep.additive_potentially_good,
                    rep.good,
                    rep.skipped
                ));
                report.push(serde_json::to_value(&rep).map_err(Error::from)?);
            }
        }
        Suite::Local => {
            let rep = local_sweep(&[2, 3], 27, &[2, 3, 4, 8, 9], 20)?;
            let ok = rep.mismatches.is_empty();
            failed += usize::from(!ok);
            lines.push(format!(
                "{} local: {} cases, {} mismatches",
                if ok { "PASS" } else { "FAIL" },
                rep.cases,
                rep.mismatches.len()
            ));
            report.push(serde_json::to_value(&rep).map_err(Error::from)?);
        }
    }
    for l in &lines {
        println!("{l}");
    }
    if a.json.is_some() {
        emit_json(&a.json, &Value::Array(report))?;
    }
    if failed > 0 {
        return Err(CliError::Verification(failed));
    }
    Ok(())
}
