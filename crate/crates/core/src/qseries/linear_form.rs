use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// A tabulated coefficient that is not computed from a closed formula.
///
/// `H(l)` is the coefficient of `q^{-1/8 + l/2}` in the holomorphic part of the
/// weight 1/2 form; `R(n)` is the coefficient of `q^{n/2}` in the weight 3/2
/// form attached to the (0,1) sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    H(u32),
    R(u32),
}

impl Symbol {
    pub fn index(&self) -> u32 {
        match *self {
            Symbol::H(l) | Symbol::R(l) => l,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::H(l) => write!(f, "H{l}"),
            Symbol::R(n) => write!(f, "R{n}"),
        }
    }
}

impl std::str::FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, tail) = s.split_at(s.len().min(1));
        let idx: u32 = tail.parse().map_err(|_| Error::Parse(format!("bad symbol {s:?}")))?;
        match head {
            "H" => Ok(Symbol::H(idx)),
            "R" => Ok(Symbol::R(idx)),
            _ => Err(Error::Parse(format!("bad symbol {s:?}"))),
        }
    }
}

/// `constant + sum_s c_s * s` over the tabulated symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearForm {
    constant: Rational,
    terms: BTreeMap<Symbol, Rational>,
}

impl LinearForm {
    pub fn constant(c: Rational) -> Self {
        LinearForm {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s, Rational::one());
        LinearForm {
            constant: Rational::zero(),
            terms,
        }
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn coefficient(&self, s: Symbol) -> Rational {
        self.terms.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Symbol, &Rational)> {
        self.terms.iter()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn add_term(&mut self, s: Symbol, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(s).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.add_in_place(other);
        out
    }

    pub fn add_in_place(&mut self, other: &LinearForm) {
        self.constant += &other.constant;
        for (s, c) in &other.terms {
            self.add_term(*s, c);
        }
    }

    pub fn scale(&self, r: &Rational) -> LinearForm {
        if r.is_zero() {
            return LinearForm::default();
        }
        LinearForm {
            constant: &self.constant * r,
            terms: self.terms.iter().map(|(s, c)| (*s, c * r)).collect(),
        }
    }

    /// Substitutes values for every symbol. Fails on the first unassigned one.
    pub fn evaluate<F>(&self, value_of: F) -> Result<Rational>
    where
        F: Fn(Symbol) -> Option<Rational>,
    {
        let mut acc = self.constant.clone();
        for (s, c) in &self.terms {
            let v = value_of(*s).ok_or(Error::MissingCoefficient(*s))?;
            acc += c * v;
        }
        Ok(acc)
    }
}

impl fmt::Display for LinearForm {
    /// Symbols are printed family by family with descending index, e.g.
    /// `1/4*H1-6*H0` or `-1/2*R1+13*R0`, followed by the constant.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut ordered: Vec<(&Symbol, &Rational)> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| match (a, b) {
            (Symbol::H(x), Symbol::H(y)) | (Symbol::R(x), Symbol::R(y)) => y.cmp(x),
            _ => a.cmp(b),
        });
        for (s, c) in ordered {
            let body = if c.is_one() {
                s.to_string()
            } else if (-c).is_one() {
                format!("-{s}")
            } else {
                format!("{}*{s}", format_rational(c))
            };
            if !out.is_empty() && !body.starts_with('-') {
                out.push('+');
            }
            out.push_str(&body);
        }
        if !self.constant.is_zero() || out.is_empty() {
            let body = format_rational(&self.constant);
            if !out.is_empty() && !body.starts_with('-') {
                out.push('+');
            }
            out.push_str(&body);
        }
        f.write_str(&out)
    }
}
