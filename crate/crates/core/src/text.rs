//! Parsing of the textual term sums shared by polynomials, rational
//! functions and Laurent series: `c*t^e + ... - t + c`, with an optional
//! trailing `O(t^N)`.

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};

/// A parsed sum of monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermSum {
    pub terms: Vec<(i64, Fe)>,
    /// Exponent of a trailing big-O term, if present.
    pub big_o: Option<i64>,
}

/// Splits at top-level `+`/`-`, keeping the sign with each chunk.  A minus
/// directly after `^` belongs to an exponent.
fn split_signed(s: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    let mut prev = ' ';
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (ch == '+' || (ch == '-' && prev != '^')) {
            if !cur.trim().is_empty() {
                out.push((neg, cur.trim().to_string()));
            }
            cur.clear();
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev = ch;
        }
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur.trim().to_string()));
    }
    out
}

fn parse_exponent(mono: &str, var: &str) -> Option<i64> {
    let rest = mono.strip_prefix(var)?;
    let rest = rest.trim();
    if rest.is_empty() {
        return Some(1);
    }
    let e = rest.strip_prefix('^')?.trim();
    let e = e
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .unwrap_or(e);
    e.trim().parse().ok()
}

fn rsplit_top_star(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    let mut hit = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => hit = Some(i),
            _ => {}
        }
    }
    hit.map(|i| (&s[..i], &s[i + 1..]))
}

/// Parses a term sum in the variable `var`.
pub fn parse_terms(field: &FiniteField, s: &str, var: &str) -> Result<TermSum> {
    let bad = |m: &str| Error::Parse(format!("cannot parse `{m}` in `{s}`"));
    let mut terms = Vec::new();
    let mut big_o = None;
    let s = s.trim();
    if s.is_empty() {
        return Err(bad(s));
    }
    for (neg, chunk) in split_signed(s) {
        if let Some(inner) = chunk.strip_prefix("O(").and_then(|x| x.strip_suffix(')')) {
            let e = parse_exponent(inner.trim(), var).ok_or_else(|| bad(&chunk))?;
            if big_o.replace(e).is_some() {
                return Err(bad(&chunk));
            }
            continue;
        }
        let (coef, exp) = match rsplit_top_star(&chunk) {
            Some((c, m)) if parse_exponent(m.trim(), var).is_some() => (
                field.parse(c.trim())?,
                parse_exponent(m.trim(), var).unwrap(),
            ),
            Some(_) => return Err(bad(&chunk)),
            None => match parse_exponent(&chunk, var) {
                Some(e) => (Fe::ONE, e),
                None => (field.parse(&chunk)?, 0),
            },
        };
        let coef = if neg { field.neg(coef) } else { coef };
        terms.push((exp, coef));
    }
    Ok(TermSum { terms, big_o })
}

/// Renders `c*var^e` terms (descending order is the caller's business).
pub fn format_terms(field: &FiniteField, terms: &[(i64, Fe)], var: &str) -> String {
    let parts: Vec<String> = terms
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|&(e, c)| {
            let mono = match e {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{e}"),
            };
            match (e, c == Fe::ONE) {
                (0, _) => field.format(c),
                (_, true) => mono,
                _ => format!("{}*{mono}", field.format(c)),
            }
        })
        .collect();
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signed_and_negative_exponents() {
        let k = FiniteField::prime(3).unwrap();
        let ts = parse_terms(&k, "2*t^-3 - t + 1 + O(t^4)", "t").unwrap();
        assert_eq!(ts.terms, vec![(-3, Fe(2)), (1, Fe(2)), (0, Fe(1))]);
        assert_eq!(ts.big_o, Some(4));
    }

    #[test]
    fn parses_extension_coefficients() {
        let k = FiniteField::new(2, 2).unwrap();
        let ts = parse_terms(&k, "(a+1)*t^2 + a", "t").unwrap();
        assert_eq!(ts.terms.len(), 2);
        assert_eq!(ts.terms[0].1, k.parse("a+1").unwrap());
    }

    #[test]
    fn rejects_garbage() {
        let k = FiniteField::prime(2).unwrap();
        assert!(parse_terms(&k, "x^2", "t").is_err());
        assert!(parse_terms(&k, "", "t").is_err());
    }
}
