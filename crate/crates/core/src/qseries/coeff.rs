use std::fmt;

use num_traits::{One, Zero};

use super::linear_form::{LinearForm, Symbol};
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// Coefficient ring of a [`PuiseuxSeries`](super::PuiseuxSeries).
///
/// Two rings are provided: exact rationals, and linear forms over the
/// tabulated symbols `H_l`, `R_n`. Linear forms are a module over the
/// rationals rather than a ring, so products are only defined when one factor
/// is constant; `try_mul` reports the other case as an error.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn from_rational(r: Rational) -> Self;
    fn accumulate(&mut self, other: &Self);
    fn negated(&self) -> Self;
    fn scaled(&self, r: &Rational) -> Self;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn try_inv(&self) -> Result<Self>;

    /// Value of a tabulated coefficient. The numeric ring needs a known value;
    /// the symbolic ring always returns the bare symbol.
    fn tabulated(sym: Symbol, known: Option<&Rational>) -> Option<Self>;

    /// Canonical text form (`p/q` for rationals, `1/4*H1-6*H0` for forms).
    fn render(&self) -> String;
}

impl Coeff for Rational {
    fn zero_value() -> Self {
        Zero::zero()
    }

    fn one_value() -> Self {
        One::one()
    }

    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }

    fn from_rational(r: Rational) -> Self {
        r
    }

    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }

    fn negated(&self) -> Self {
        -self
    }

    fn scaled(&self, r: &Rational) -> Self {
        self * r
    }

    fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }

    fn try_inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::NonInvertible("0".into()))
        } else {
            Ok(self.recip())
        }
    }

    fn tabulated(_sym: Symbol, known: Option<&Rational>) -> Option<Self> {
        known.cloned()
    }

    fn render(&self) -> String {
        format_rational(self)
    }
}

impl Coeff for LinearForm {
    fn zero_value() -> Self {
        LinearForm::default()
    }

    fn one_value() -> Self {
        LinearForm::constant(One::one())
    }

    fn is_zero_value(&self) -> bool {
        LinearForm::is_zero(self)
    }

    fn from_rational(r: Rational) -> Self {
        LinearForm::constant(r)
    }

    fn accumulate(&mut self, other: &Self) {
        self.add_in_place(other);
    }

    fn negated(&self) -> Self {
        self.scale(&-<Rational as One>::one())
    }

    fn scaled(&self, r: &Rational) -> Self {
        self.scale(r)
    }

    fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.is_constant() {
            Ok(other.scale(self.constant_part()))
        } else if other.is_constant() {
            Ok(self.scale(other.constant_part()))
        } else {
            Err(Error::SymbolicProduct)
        }
    }

    fn try_inv(&self) -> Result<Self> {
        if self.is_constant() && !Zero::is_zero(self.constant_part()) {
            Ok(LinearForm::constant(self.constant_part().recip()))
        } else {
            Err(Error::NonInvertible(self.to_string()))
        }
    }

    fn tabulated(sym: Symbol, _known: Option<&Rational>) -> Option<Self> {
        Some(LinearForm::symbol(sym))
    }

    fn render(&self) -> String {
        self.to_string()
    }
}
