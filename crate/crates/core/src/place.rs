//! Places of the rational function field `F_q(t)`.

use std::cmp::Ordering;
use std::fmt;

use crate::field::FiniteField;
use crate::poly::Poly;

/// A place of `F_q(t)`: a monic irreducible polynomial or the place at
/// infinity.  Ordered by degree, then lexicographically, with infinity last.
#[derive(Clone, PartialEq, Eq)]
pub enum Place {
    Finite(Poly),
    Infinite,
}

impl Place {
    /// A finite place; `None` unless `pi` is monic irreducible.
    pub fn finite(pi: Poly) -> Option<Place> {
        (pi.is_monic() && pi.is_irreducible()).then_some(Place::Finite(pi))
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(pi) => pi.degree().finite().expect("nonzero place polynomial"),
            Place::Infinite => 1,
        }
    }

    /// Residue field cardinality `q_v = q^deg(v)`.
    pub fn residue_order(&self, q: u32) -> u64 {
        (q as u64).pow(self.degree() as u32)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite)
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            Place::Finite(pi) => Some(pi),
            Place::Infinite => None,
        }
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinite, Place::Infinite) => Ordering::Equal,
            (Place::Infinite, _) => Ordering::Greater,
            (_, Place::Infinite) => Ordering::Less,
            (Place::Finite(a), Place::Finite(b)) => a.cmp_canonical(b),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(pi) => write!(f, "{pi}"),
            Place::Infinite => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Monic irreducibles of exact degree `d`, in canonical order.
pub fn finite_places_of_degree(field: &FiniteField, d: usize) -> Vec<Place> {
    Poly::monics_of_degree(field, d)
        .filter(|f| f.is_irreducible())
        .map(Place::Finite)
        .collect()
}

/// All finite places of degree `<= d`, followed by the infinite place.
pub fn places_up_to(field: &FiniteField, d: usize) -> Vec<Place> {
    let mut out: Vec<Place> = (1..=d)
        .flat_map(|k| finite_places_of_degree(field, k))
        .collect();
    out.push(Place::Infinite);
    out
}
