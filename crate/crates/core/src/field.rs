//! Small finite fields `F_q`, `q = p^f <= 343`, backed by dense tables.
//!
//! Elements are encoded as integers `0..q` whose base-`p` digits are the
//! coefficients (constant term first) of a polynomial in a fixed generator
//! `a`.  The generator is a root of the lexicographically least monic
//! primitive polynomial of degree `f`, so codes `0..p` are exactly the prime
//! field and multiplication goes through discrete log tables.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Primes the desk-scale guard admits.
pub const ALLOWED_PRIMES: [u32; 4] = [2, 3, 5, 7];
/// Largest admissible cardinality.
pub const MAX_Q: u32 = 343;

/// An element of a [`FiniteField`], by code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u32,
    f: u32,
    q: u32,
    /// Monic modulus, constant term first, length `f + 1`.
    modulus: Vec<u32>,
    add: Vec<u16>,
    neg: Vec<u16>,
    /// `exp[i] = a^i` for `0 <= i < 2(q-1)`.
    exp: Vec<u16>,
    /// `log[x]` for nonzero `x`; `log[0]` unused.
    log: Vec<u32>,
    /// Absolute trace to `F_p`, as a prime-field code.
    trace: Vec<u16>,
    /// Least code in each class of `F_q / wp(F_q)`, indexed by trace.
    wp_rep: Vec<u16>,
}

/// The field `F_q` with `q = p^f`.  Cheap to clone.
#[derive(Clone)]
pub struct FiniteField {
    t: Arc<Tables>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.f == other.t.f
    }
}
impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.t.q)
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Multiply two polynomials over `F_p` modulo the monic `modulus`.
fn mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * f];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (f..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus[..f].iter().enumerate() {
            prod[k - f + i] = (prod[k - f + i] + (p - c) * m) % p;
        }
    }
    prod.truncate(f);
    prod
}

fn digits(mut code: u32, p: u32, f: u32) -> Vec<u32> {
    (0..f)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Order of `x` in `F_p[x]/(modulus)` if it reaches 1 within `q - 1` steps.
fn generator_order(modulus: &[u32], p: u32) -> Option<u32> {
    let f = modulus.len() - 1;
    let q = p.pow(f as u32);
    let mut x = vec![0u32; f];
    if f == 1 {
        x[0] = (p - modulus[0]) % p;
    } else {
        x[1] = 1;
    }
    let one = {
        let mut v = vec![0u32; f];
        v[0] = 1;
        v
    };
    let mut cur = x.clone();
    for k in 1..q {
        if cur == one {
            return Some(k);
        }
        if cur.iter().all(|&c| c == 0) {
            return None;
        }
        cur = mulmod(&cur, &x, modulus, p);
    }
    None
}

impl FiniteField {
    /// Builds `F_{p^f}`.  Rejects non-primes, `p` outside `{2,3,5,7}`, and
    /// `p^f > 343`.
    pub fn new(p: u32, f: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if !ALLOWED_PRIMES.contains(&p) {
            return Err(Error::Config(format!(
                "characteristic {p} outside {{2,3,5,7}}"
            )));
        }
        if f == 0 {
            return Err(Error::Config("extension degree must be at least 1".into()));
        }
        let q = p.checked_pow(f).filter(|&q| q <= MAX_Q).ok_or_else(|| {
            Error::Config(format!("field of size {p}^{f} exceeds the limit {MAX_Q}"))
        })?;

        // Least monic primitive polynomial, ordered by its code (constant first).
        let mut modulus = None;
        for code in 0..q {
            let mut m = digits(code, p, f);
            m.push(1);
            if m[0] == 0 {
                continue;
            }
            if generator_order(&m, p) == Some(q - 1) {
                modulus = Some(m);
                break;
            }
        }
        let modulus = modulus.expect("a primitive polynomial exists");

        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut neg = vec![0u16; qs];
        for a in 0..q {
            let da = digits(a, p, f);
            let na: Vec<u32> = da.iter().map(|&x| (p - x) % p).collect();
            neg[a as usize] = undigits(&na, p) as u16;
            for b in 0..q {
                let db = digits(b, p, f);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = undigits(&s, p) as u16;
            }
        }

        let gen: Vec<u32> = if f == 1 {
            vec![(p - modulus[0]) % p]
        } else {
            let mut g = vec![0u32; f as usize];
            g[1] = 1;
            g
        };
        let mut exp = vec![0u16; 2 * (qs - 1)];
        let mut log = vec![0u32; qs];
        let mut cur = {
            let mut v = vec![0u32; f as usize];
            v[0] = 1;
            v
        };
        for i in 0..(qs - 1) {
            let c = undigits(&cur, p);
            exp[i] = c as u16;
            log[c as usize] = i as u32;
            cur = mulmod(&cur, &gen, &modulus, p);
        }
        for i in (qs - 1)..exp.len() {
            exp[i] = exp[i - (qs - 1)];
        }

        let mut field = FiniteField {
            t: Arc::new(Tables {
                p,
                f,
                q,
                modulus,
                add,
                neg,
                exp,
                log,
                trace: Vec::new(),
                wp_rep: Vec::new(),
            }),
        };

        let trace: Vec<u16> = (0..q as u16)
            .map(|x| {
                let mut acc = Fe::ZERO;
                let mut y = Fe(x);
                for _ in 0..f {
                    acc = field.add(acc, y);
                    y = field.frobenius(y);
                }
                acc.0
            })
            .collect();
        let mut wp_rep = vec![u16::MAX; p as usize];
        for x in 0..q as u16 {
            let t = trace[x as usize] as usize;
            if wp_rep[t] == u16::MAX {
                wp_rep[t] = x;
            }
        }
        let tables = Arc::get_mut(&mut field.t).expect("unique during construction");
        tables.trace = trace;
        tables.wp_rep = wp_rep;
        Ok(field)
    }

    /// Prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    /// Builds the field of cardinality `q`.
    pub fn with_order(q: u32) -> Result<Self> {
        for &p in &ALLOWED_PRIMES {
            let mut n = q;
            let mut f = 0;
            while n > 1 && n % p == 0 {
                n /= p;
                f += 1;
            }
            if n == 1 && f > 0 {
                return Self::new(p, f);
            }
        }
        Err(Error::Config(format!(
            "{q} is not a power of 2, 3, 5 or 7 (or exceeds {MAX_Q})"
        )))
    }

    pub fn p(&self) -> u32 {
        self.t.p
    }
    pub fn degree(&self) -> u32 {
        self.t.f
    }
    pub fn order(&self) -> u32 {
        self.t.q
    }

    /// The modulus defining the generator, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.t.q as u16).map(Fe)
    }

    /// Nonzero elements in code order.
    pub fn units(&self) -> impl Iterator<Item = Fe> + '_ {
        (1..self.t.q as u16).map(Fe)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.t.p as i64) as u16)
    }

    /// `Some(n)` if `x` lies in the prime field.
    pub fn to_prime(&self, x: Fe) -> Option<u32> {
        ((x.0 as u32) < self.t.p).then_some(x.0 as u32)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.t.add[a.0 as usize * self.t.q as usize + b.0 as usize])
    }
    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.t.neg[a.0 as usize])
    }
    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            return Fe::ZERO;
        }
        let i = self.t.log[a.0 as usize] + self.t.log[b.0 as usize];
        Fe(self.t.exp[i as usize])
    }
    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return None;
        }
        let n = self.t.q - 1;
        let l = self.t.log[a.0 as usize];
        Some(Fe(self.t.exp[((n - l) % n) as usize]))
    }
    /// `a / b`; panics on division by zero.
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b).expect("division by zero in F_q"))
    }
    pub fn pow(&self, a: Fe, e: i64) -> Fe {
        if a.is_zero() {
            return if e == 0 { Fe::ONE } else { Fe::ZERO };
        }
        let n = (self.t.q - 1) as i64;
        let l = self.t.log[a.0 as usize] as i64;
        Fe(self.t.exp[(l * e).rem_euclid(n) as usize])
    }
    /// Integer multiple `n * a`.
    pub fn mul_int(&self, a: Fe, n: i64) -> Fe {
        self.mul(a, self.from_int(n))
    }

    /// `x^p`.
    pub fn frobenius(&self, x: Fe) -> Fe {
        self.pow(x, self.t.p as i64)
    }
    /// The unique `p`-th root, `x^(q/p)`.
    pub fn pth_root(&self, x: Fe) -> Fe {
        self.pow(x, (self.t.q / self.t.p) as i64)
    }

    /// Generator `a` of the multiplicative group.
    pub fn generator(&self) -> Fe {
        Fe(self.t.exp[1 % (self.t.exp.len().max(1))])
    }
    /// Discrete log base the generator, for nonzero `x`.
    pub fn log(&self, x: Fe) -> Option<u32> {
        (!x.is_zero()).then(|| self.t.log[x.0 as usize])
    }

    pub fn is_square(&self, x: Fe) -> bool {
        x.is_zero() || self.t.p == 2 || self.t.log[x.0 as usize] % 2 == 0
    }
    /// A square root if one exists; the one with even-or-lower log is chosen
    /// deterministically.
    pub fn sqrt(&self, x: Fe) -> Option<Fe> {
        if x.is_zero() {
            return Some(Fe::ZERO);
        }
        if self.t.p == 2 {
            return Some(self.pth_root(x));
        }
        let l = self.t.log[x.0 as usize];
        (l % 2 == 0).then(|| Fe(self.t.exp[(l / 2) as usize]))
    }

    /// Absolute trace `F_q -> F_p`, as an element of the prime field.
    pub fn trace(&self, x: Fe) -> Fe {
        Fe(self.t.trace[x.0 as usize])
    }

    /// `x^p - x`.
    pub fn wp(&self, x: Fe) -> Fe {
        self.sub(self.frobenius(x), x)
    }

    /// Canonical representative of `x` modulo `wp(F_q)`: the least code with
    /// the same trace (the kernel of the trace is exactly `wp(F_q)`).
    pub fn wp_reduce(&self, x: Fe) -> Fe {
        Fe(self.t.wp_rep[self.trace(x).0 as usize])
    }

    /// Images of this field's elements in `big`, which must contain it.
    /// The generator is sent to the least root of its minimal polynomial.
    pub fn embedding_into(&self, big: &FiniteField) -> Result<Vec<Fe>> {
        if big.p() != self.p() || big.degree() % self.degree() != 0 {
            return Err(Error::Config(format!(
                "{self:?} does not embed into {big:?}"
            )));
        }
        let g = self.generator();
        let n = self.order() - 1;
        // Minimal polynomial of g over F_p, via its Frobenius orbit.
        let f = self.degree() as usize;
        let mut minpoly = vec![Fe::ONE];
        let mut conj = g;
        for _ in 0..f {
            // minpoly *= (X - conj) in self.
            let mut next = vec![Fe::ZERO; minpoly.len() + 1];
            for (i, &c) in minpoly.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], c);
                next[i] = self.sub(next[i], self.mul(c, conj));
            }
            minpoly = next;
            conj = self.frobenius(conj);
        }
        let coeffs: Vec<i64> = minpoly
            .iter()
            .map(|&c| self.to_prime(c).expect("minimal polynomial over F_p") as i64)
            .collect();
        let root = big
            .units()
            .find(|&x| {
                let mut acc = Fe::ZERO;
                for &c in coeffs.iter().rev() {
                    acc = big.add(big.mul(acc, x), big.from_int(c));
                }
                acc.is_zero()
            })
            .ok_or_else(|| Error::Config("no root of the minimal polynomial".into()))?;
        let mut map = vec![Fe::ZERO; self.order() as usize];
        let mut cur = Fe::ONE;
        for i in 0..n {
            map[self.t.exp[i as usize] as usize] = cur;
            cur = big.mul(cur, root);
        }
        Ok(map)
    }

    /// Renders an element: an integer for prime-field elements, otherwise a
    /// parenthesised polynomial in the generator `a`.
    pub fn format(&self, x: Fe) -> String {
        if let Some(n) = self.to_prime(x) {
            return n.to_string();
        }
        let d = digits(x.0 as u32, self.t.p, self.t.f);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        format!("({})", parts.join("+"))
    }

    /// Parses the output of [`FiniteField::format`] (integers, or sums of
    /// `c*a^i` terms, optionally parenthesised).
    pub fn parse(&self, s: &str) -> Result<Fe> {
        let s = s.trim();
        let s = s
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .unwrap_or(s);
        let bad = || Error::Parse(format!("bad field element `{s}`"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(self.from_int(n));
        }
        let mut d = vec![0u32; self.t.f as usize];
        for term in s.split('+') {
            let term = term.trim();
            let (c, mono) = match term.split_once('*') {
                Some((c, m)) => (c.trim().parse::<i64>().map_err(|_| bad())?, m.trim()),
                None if term.starts_with('a') => (1, term),
                None => (term.parse::<i64>().map_err(|_| bad())?, ""),
            };
            let i = match mono {
                "" => 0,
                "a" => 1,
                m => m
                    .strip_prefix("a^")
                    .and_then(|e| e.parse::<usize>().ok())
                    .ok_or_else(bad)?,
            };
            if i >= d.len() {
                return Err(bad());
            }
            d[i] = ((d[i] as i64 + c).rem_euclid(self.t.p as i64)) as u32;
        }
        Ok(Fe(undigits(&d, self.t.p) as u16))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_rejects_out_of_range() {
        assert!(FiniteField::new(11, 1).is_err());
        assert!(FiniteField::new(4, 1).is_err());
        assert!(FiniteField::new(2, 9).is_err());
        assert!(FiniteField::new(7, 3).is_ok());
        assert!(FiniteField::new(3, 5).is_ok());
    }

    #[test]
    fn field_axioms_small() {
        for (p, f) in [(2, 1), (2, 3), (3, 2), (5, 1), (7, 2)] {
            let k = FiniteField::new(p, f).unwrap();
            for a in k.elements() {
                assert_eq!(k.add(a, k.neg(a)), Fe::ZERO);
                if !a.is_zero() {
                    assert_eq!(k.mul(a, k.inv(a).unwrap()), Fe::ONE);
                }
                assert_eq!(k.frobenius(k.pth_root(a)), a);
                for b in k.elements() {
                    for c in [Fe::ONE, k.generator()] {
                        // distributivity against a couple of multipliers
                        assert_eq!(k.mul(c, k.add(a, b)), k.add(k.mul(c, a), k.mul(c, b)));
                    }
                }
            }
        }
    }

    #[test]
    fn wp_kernel_is_trace_kernel() {
        for (p, f) in [(2, 2), (3, 2), (2, 3), (5, 1)] {
            let k = FiniteField::new(p, f).unwrap();
            let image: std::collections::BTreeSet<Fe> = k.elements().map(|x| k.wp(x)).collect();
            assert_eq!(image.len() as u32, k.order() / p);
            for x in k.elements() {
                assert_eq!(image.contains(&x), k.trace(x).is_zero());
                assert!(image.contains(&k.sub(x, k.wp_reduce(x))));
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = FiniteField::new(3, 1).unwrap();
        let mid = FiniteField::new(3, 2).unwrap();
        let big = FiniteField::new(3, 4).unwrap();
        for (a, b) in [(&small, &mid), (&mid, &big)] {
            let e = a.embedding_into(b).unwrap();
            for x in a.elements() {
                for y in a.elements() {
                    assert_eq!(
                        e[a.add(x, y).0 as usize],
                        b.add(e[x.0 as usize], e[y.0 as usize])
                    );
                    assert_eq!(
                        e[a.mul(x, y).0 as usize],
                        b.mul(e[x.0 as usize], e[y.0 as usize])
                    );
                }
            }
        }
    }

    #[test]
    fn squares_and_roots() {
        let k = FiniteField::new(3, 2).unwrap();
        let squares = k.units().filter(|&x| k.is_square(x)).count();
        assert_eq!(squares, 4);
        for x in k.elements() {
            if let Some(r) = k.sqrt(x) {
                assert_eq!(k.mul(r, r), x);
            }
        }
    }

    #[test]
    fn format_parse_roundtrip() {
        let k = FiniteField::new(5, 3).unwrap();
        for x in k.elements() {
            assert_eq!(k.parse(&k.format(x)).unwrap(), x);
        }
    }
}
