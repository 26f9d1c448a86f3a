//! Exact coefficient rings and truncated `q^(1/8)` series.

mod coeff;
mod linear_form;
mod mupoly;
pub mod rational;
mod series;

pub use coeff::Coeff;
pub use linear_form::{LinearForm, Symbol};
pub use mupoly::MuPoly;
pub use rational::Rational;
pub use series::{PuiseuxSeries, DENOM, EXACT};
