//! Exact counting of stacky torsors and raised-height invariants over
//! function fields of positive characteristic.

pub mod acceptance;
pub mod asymptotics;
pub mod disc;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod global;
pub mod invariants;
pub mod local;
pub mod motivic;
pub mod place;
pub mod poly;
pub mod ratfunc;
pub mod series;
pub mod tate;
pub mod text;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Fe, FiniteField};
pub use place::{places_up_to, Place};
pub use poly::{Degree, Poly};
pub use ratfunc::{RationalFunction, Valuation};
pub use series::{AsReduction, LaurentSeries};
