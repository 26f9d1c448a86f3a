use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::coeff::Coeff;
use super::linear_form::{LinearForm, Symbol};
use super::rational::{format_rational, rat, Rational};
use crate::error::{Error, Result};

/// Exponent denominator used by every modular object in this crate.
pub const DENOM: u32 = 8;

/// Precision of a series that is known exactly (a polynomial).
pub const EXACT: i64 = i64::MAX / 4;

fn clamp(p: i64) -> i64 {
    p.min(EXACT)
}

/// Truncated Laurent series `sum_e c_e q^(e/denom)`.
///
/// `prec` is the guaranteed window: every exponent `e < prec` is correct,
/// every exponent `e >= prec` is unknown. Arithmetic keeps the window sound,
/// so a coefficient read inside it never depends on the truncation.
#[derive(Clone, Debug)]
pub struct PuiseuxSeries<C: Coeff = Rational> {
    denom: u32,
    coeffs: BTreeMap<i64, C>,
    prec: i64,
}

impl<C: Coeff> PuiseuxSeries<C> {
    /// Builds a series on the `q^(1/8)` lattice, dropping zero terms and terms
    /// at or beyond `prec`.
    pub fn new<I>(terms: I, prec: i64) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
    {
        Self::with_denom(DENOM, terms, prec)
    }

    pub fn with_denom<I>(denom: u32, terms: I, prec: i64) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
    {
        let prec = clamp(prec);
        let mut coeffs: BTreeMap<i64, C> = BTreeMap::new();
        for (e, c) in terms {
            if e >= prec {
                continue;
            }
            match coeffs.get_mut(&e) {
                Some(slot) => slot.accumulate(&c),
                None => {
                    coeffs.insert(e, c);
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero_value());
        PuiseuxSeries { denom, coeffs, prec }
    }

    pub fn zero(prec: i64) -> Self {
        Self::new(std::iter::empty(), prec)
    }

    pub fn constant(c: C) -> Self {
        Self::new([(0, c)], EXACT)
    }

    pub fn one() -> Self {
        Self::constant(C::one_value())
    }

    /// `c * q^(e/8)`, known exactly.
    pub fn monomial(e: i64, c: C) -> Self {
        Self::new([(e, c)], EXACT)
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    /// Smallest stored exponent; equals the precision for the zero series.
    pub fn valuation(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<(i64, &C)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, c))
    }

    /// Coefficient of `q^(e/8)`; fails outside the guaranteed window.
    pub fn coeff(&self, e: i64) -> Result<C> {
        if e >= self.prec {
            return Err(Error::InsufficientPrecision(format!(
                "exponent {e}/{} requested, series known below {}/{}",
                self.denom, self.prec, self.denom
            )));
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(C::zero_value))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of `q^0`. Needs a positive precision; a series of positive
    /// valuation simply has constant term zero.
    pub fn constant_term(&self) -> Result<C> {
        if self.prec <= 0 {
            return Err(Error::InsufficientPrecision(format!(
                "constant term needs precision > 0, have {}",
                self.prec
            )));
        }
        Ok(self.coeffs.get(&0).cloned().unwrap_or_else(C::zero_value))
    }

    /// Drops everything at or above `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        Self {
            denom: self.denom,
            coeffs: self.coeffs.range(..prec).map(|(e, c)| (*e, c.clone())).collect(),
            prec,
        }
    }

    /// Multiplies by `q^(k/8)`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            prec: if self.is_exact() { EXACT } else { clamp(self.prec + k) },
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return Self::zero(self.prec).with_same_denom(self);
        }
        Self {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.scaled(r))).collect(),
            prec: self.prec,
        }
    }

    fn with_same_denom(mut self, other: &Self) -> Self {
        self.denom = other.denom;
        self
    }

    fn check_denom(&self, other_denom: u32) -> Result<()> {
        if self.denom != other_denom {
            Err(Error::DenominatorMismatch(self.denom, other_denom))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_denom(other.denom)?;
        let prec = self.prec.min(other.prec);
        let mut coeffs: BTreeMap<i64, C> = self.coeffs.range(..prec).map(|(e, c)| (*e, c.clone())).collect();
        for (e, c) in other.coeffs.range(..prec) {
            match coeffs.get_mut(e) {
                Some(slot) => {
                    slot.accumulate(c);
                    if slot.is_zero_value() {
                        coeffs.remove(e);
                    }
                }
                None => {
                    coeffs.insert(*e, c.clone());
                }
            }
        }
        Ok(Self {
            denom: self.denom,
            coeffs,
            prec,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.negated())
    }

    pub fn negated(&self) -> Self {
        Self {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.negated())).collect(),
            prec: self.prec,
        }
    }

    fn product_precision(&self, other_val: i64, other_prec: i64, self_val: i64) -> i64 {
        let left = if self.prec == EXACT {
            EXACT
        } else {
            self.prec.saturating_add(other_val)
        };
        let right = if other_prec == EXACT {
            EXACT
        } else {
            other_prec.saturating_add(self_val)
        };
        clamp(left.min(right))
    }

    /// Cauchy product with the window `min(a.prec + val b, b.prec + val a)`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_denom(other.denom)?;
        let prec = self.product_precision(other.valuation(), other.prec, self.valuation());
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in other.coeffs.range(..prec.saturating_sub(*e1)) {
                let term = c1.try_mul(c2)?;
                match acc.get_mut(&(e1 + e2)) {
                    Some(slot) => slot.accumulate(&term),
                    None => {
                        acc.insert(e1 + e2, term);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero_value());
        Ok(Self {
            denom: self.denom,
            coeffs: acc,
            prec,
        })
    }

    /// Product with a rational series; never fails on the coefficient ring.
    pub fn mul_rational(&self, other: &PuiseuxSeries<Rational>) -> Result<Self> {
        self.check_denom(other.denom())?;
        let prec = self.product_precision(other.valuation(), other.precision(), self.valuation());
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (e2, r) in other.terms() {
            for (e1, c) in self.coeffs.range(..prec.saturating_sub(e2)) {
                let term = c.scaled(r);
                match acc.get_mut(&(e1 + e2)) {
                    Some(slot) => slot.accumulate(&term),
                    None => {
                        acc.insert(e1 + e2, term);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero_value());
        Ok(Self {
            denom: self.denom,
            coeffs: acc,
            prec,
        })
    }

    /// `[other * self]_{q^0}` without forming the full product.
    pub fn constant_term_of_product(&self, other: &PuiseuxSeries<Rational>) -> Result<C> {
        self.check_denom(other.denom())?;
        let prec = self.product_precision(other.valuation(), other.precision(), self.valuation());
        if prec <= 0 {
            return Err(Error::InsufficientPrecision(format!(
                "constant term of product needs precision > 0, have {prec}"
            )));
        }
        let mut acc = C::zero_value();
        for (e, r) in other.terms() {
            if let Some(c) = self.coeffs.get(&-e) {
                acc.accumulate(&c.scaled(r));
            }
        }
        Ok(acc)
    }

    /// Multiplicative inverse. The result has valuation `-v` and window
    /// `-v + (prec - v)`, where `v` is the valuation of `self`.
    pub fn inverse(&self) -> Result<Self> {
        let (v, lead) = self.leading().ok_or(Error::ZeroSeries)?;
        let lead_inv = lead.try_inv()?;
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Self::monomial(-v, lead_inv).with_same_denom(self));
        }
        let rel = self.prec - v;
        let mut out: Vec<C> = Vec::with_capacity(rel.max(0) as usize);
        for n in 0..rel {
            if n == 0 {
                out.push(lead_inv.clone());
                continue;
            }
            let mut t = C::zero_value();
            for (e, c) in self.coeffs.range(v + 1..=v + n) {
                let prev = &out[(n - (e - v)) as usize];
                if !prev.is_zero_value() {
                    t.accumulate(&c.try_mul(prev)?);
                }
            }
            out.push(t.try_mul(&lead_inv)?.negated());
        }
        Ok(Self::with_denom(
            self.denom,
            out.into_iter().enumerate().map(|(i, c)| (i as i64 - v, c)),
            rel - v,
        ))
    }

    /// Binary exponentiation; `k = 0` gives the exact series 1.
    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut result = Self::one().with_same_denom(self);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `q d/dq`: maps `c q^(e/8)` to `c (e/8) q^(e/8)`.
    pub fn q_derive(&self) -> Self {
        let d = self.denom as i64;
        Self {
            denom: self.denom,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| **e != 0)
                .map(|(e, c)| (*e, c.scaled(&rat(*e, d))))
                .collect(),
            prec: self.prec,
        }
    }

    /// Agreement on every exponent below the smaller of the two windows.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.denom != other.denom {
            return false;
        }
        let prec = self.prec.min(other.prec);
        let a = self.coeffs.range(..prec);
        let b = other.coeffs.range(..prec);
        a.eq(b)
    }

    /// Renders `exponent:coefficient` pairs in ascending order, e.g.
    /// `1/8:1 9/8:-3`.
    pub fn render_pairs(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(e, c)| format!("{e}:{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        self.coeffs
            .iter()
            .map(|(e, c)| (format_rational(&rat(*e, self.denom as i64)), c.render()))
            .collect()
    }
}

impl<C: Coeff> PartialEq for PuiseuxSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other)
    }
}

impl PuiseuxSeries<LinearForm> {
    /// Substitutes numeric values for every symbol.
    pub fn evaluate<F>(&self, value_of: F) -> Result<PuiseuxSeries<Rational>>
    where
        F: Fn(Symbol) -> Option<Rational>,
    {
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (e, c) in &self.coeffs {
            terms.push((*e, c.evaluate(&value_of)?));
        }
        Ok(PuiseuxSeries::with_denom(self.denom, terms, self.prec))
    }
}

impl PuiseuxSeries<Rational> {
    /// Lifts a rational series into any coefficient ring.
    pub fn lift<C: Coeff>(&self) -> PuiseuxSeries<C> {
        PuiseuxSeries::with_denom(
            self.denom,
            self.coeffs.iter().map(|(e, c)| (*e, C::from_rational(c.clone()))),
            self.prec,
        )
    }

    pub fn from_integer_terms<I>(terms: I, prec: i64) -> Self
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        Self::new(
            terms.into_iter().map(|(e, c)| (e, Rational::from_integer(c.into()))),
            prec,
        )
    }
}

impl<C: Coeff> fmt::Display for PuiseuxSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_pairs())?;
        if !self.is_exact() {
            if !self.coeffs.is_empty() {
                f.write_str(" ")?;
            }
            write!(f, "+ O(q^{})", format_rational(&rat(self.prec, self.denom as i64)))?;
        }
        Ok(())
    }
}

// Operator sugar. These panic only on a denominator mismatch, which cannot
// arise from the `q^(1/8)` constructors; `checked_*` returns it as an error.

impl<C: Coeff> Add for &PuiseuxSeries<C> {
    type Output = PuiseuxSeries<C>;
    fn add(self, rhs: Self) -> PuiseuxSeries<C> {
        self.checked_add(rhs).expect("series denominators differ")
    }
}

impl<C: Coeff> Sub for &PuiseuxSeries<C> {
    type Output = PuiseuxSeries<C>;
    fn sub(self, rhs: Self) -> PuiseuxSeries<C> {
        self.checked_sub(rhs).expect("series denominators differ")
    }
}

impl<C: Coeff> Neg for &PuiseuxSeries<C> {
    type Output = PuiseuxSeries<C>;
    fn neg(self) -> PuiseuxSeries<C> {
        self.negated()
    }
}

impl Mul for &PuiseuxSeries<Rational> {
    type Output = PuiseuxSeries<Rational>;
    fn mul(self, rhs: Self) -> PuiseuxSeries<Rational> {
        self.checked_mul(rhs).expect("series denominators differ")
    }
}

impl<C: Coeff> Add for PuiseuxSeries<C> {
    type Output = PuiseuxSeries<C>;
    fn add(self, rhs: Self) -> PuiseuxSeries<C> {
        &self + &rhs
    }
}

impl<C: Coeff> Sub for PuiseuxSeries<C> {
    type Output = PuiseuxSeries<C>;
    fn sub(self, rhs: Self) -> PuiseuxSeries<C> {
        &self - &rhs
    }
}

impl Mul for PuiseuxSeries<Rational> {
    type Output = PuiseuxSeries<Rational>;
    fn mul(self, rhs: Self) -> PuiseuxSeries<Rational> {
        &self * &rhs
    }
}

impl Mul<&Rational> for &PuiseuxSeries<Rational> {
    type Output = PuiseuxSeries<Rational>;
    fn mul(self, rhs: &Rational) -> PuiseuxSeries<Rational> {
        self.scale(rhs)
    }
}

impl One for PuiseuxSeries<Rational> {
    fn one() -> Self {
        PuiseuxSeries::constant(<Rational as One>::one())
    }
}
