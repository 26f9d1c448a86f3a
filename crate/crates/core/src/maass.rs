//! Holomorphic parts of the four harmonic Maass forms and the mock theta
//! function `M(q)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qseries::rational::{int, parse_rational, rat};
use crate::qseries::{Coeff, PuiseuxSeries, Rational, Symbol};

/// Hurwitz class number by enumeration of reduced forms `[a, b, c]` with
/// `b^2 - 4ac = -n`. Classes of `a(x^2+y^2)` count `1/2`, classes of
/// `a(x^2+xy+y^2)` count `1/3`, and `H(0) = -1/12`.
pub fn hurwitz(n: u64) -> Rational {
    if n == 0 {
        return rat(-1, 12);
    }
    if n % 4 == 1 || n % 4 == 2 {
        return <Rational as Zero>::zero();
    }
    let n = n as i64;
    let mut twelve_h: i64 = 0;
    let mut a: i64 = 1;
    while 3 * a * a <= n {
        for b in -a..=a {
            let disc = b * b + n;
            if disc % (4 * a) != 0 {
                continue;
            }
            let c = disc / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (a == c || -b == a) {
                continue;
            }
            twelve_h += if b == 0 && a == c {
                6
            } else if b == a && a == c {
                4
            } else {
                12
            };
        }
        a += 1;
    }
    rat(twelve_h, 12)
}

/// `hurwitz(n)` for every `n < bound`, computed in parallel.
pub fn hurwitz_table(bound: u64) -> Vec<Rational> {
    (0..bound).into_par_iter().map(hurwitz).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaassFamily {
    Q10,
    Q00,
    Q01,
    Q11,
}

impl MaassFamily {
    pub fn from_ab(a: u8, b: u8) -> Result<Self> {
        match (a, b) {
            (1, 0) => Ok(MaassFamily::Q10),
            (0, 0) => Ok(MaassFamily::Q00),
            (0, 1) => Ok(MaassFamily::Q01),
            (1, 1) => Ok(MaassFamily::Q11),
            _ => Err(Error::InvalidSetup(format!("no Maass form for ({a},{b})"))),
        }
    }

    /// Smallest exponent, in `q^(1/8)` units.
    pub fn leading_exponent(&self) -> i64 {
        match self {
            MaassFamily::Q10 | MaassFamily::Q11 => -1,
            MaassFamily::Q00 | MaassFamily::Q01 => 0,
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self, MaassFamily::Q01 | MaassFamily::Q11)
    }
}

impl fmt::Display for MaassFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MaassFamily::Q10 => "Q10",
            MaassFamily::Q00 => "Q00",
            MaassFamily::Q01 => "Q01",
            MaassFamily::Q11 => "Q11",
        };
        f.write_str(s)
    }
}

/// Tabulated coefficients `H_l` of `Q11` and `R_n` of `Q01`.
///
/// The defaults are the five published values of each; further entries can be
/// loaded from a text file.
#[derive(Debug, Clone, PartialEq)]
pub struct MaassData {
    h: BTreeMap<u32, Rational>,
    r: BTreeMap<u32, Rational>,
}

impl Default for MaassData {
    fn default() -> Self {
        let h = [1, 28, 39, 196, 161]
            .iter()
            .enumerate()
            .map(|(l, v)| (l as u32, int(*v)))
            .collect();
        let r = [rat(-1, 8), rat(-1, 4), rat(1, 2), int(-1), rat(5, 4)]
            .into_iter()
            .enumerate()
            .map(|(n, v)| (n as u32, v))
            .collect();
        MaassData { h, r }
    }
}

impl MaassData {
    pub fn empty() -> Self {
        MaassData {
            h: BTreeMap::new(),
            r: BTreeMap::new(),
        }
    }

    pub fn get(&self, sym: Symbol) -> Option<&Rational> {
        match sym {
            Symbol::H(l) => self.h.get(&l),
            Symbol::R(n) => self.r.get(&n),
        }
    }

    pub fn insert(&mut self, sym: Symbol, value: Rational) {
        match sym {
            Symbol::H(l) => self.h.insert(l, value),
            Symbol::R(n) => self.r.insert(n, value),
        };
    }

    /// Value lookup suitable for [`LinearForm::evaluate`](crate::qseries::LinearForm::evaluate).
    pub fn value(&self, sym: Symbol) -> Option<Rational> {
        self.get(sym).cloned()
    }

    /// Merges lines of the form `H5 123` or `R7 -3/4`; `#` starts a comment.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(sym), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected `<symbol> <value>`",
                    lineno + 1
                )));
            };
            let sym = Symbol::from_str(sym).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let val = parse_rational(val).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            self.insert(sym, val);
        }
        Ok(())
    }

    /// Defaults extended by the entries of `path`.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let mut data = MaassData::default();
        data.merge_text(&text)?;
        Ok(data)
    }
}

/// Holomorphic part `Q+` of the family, correct below `prec`.
///
/// `Q10 = q^(-1/8) sum_{l>0} H(4l-1) q^(l/2)`, `Q00 = sum_{l>=0} H(4l) q^(l/2)`,
/// `Q01 = sum_n R_n q^(n/2)`, `Q11 = q^(-1/8) sum_l H_l q^(l/2)`.
/// Hurwitz-backed families are always numeric. Table-backed ones use the
/// coefficient ring's `tabulated` rule, so the numeric ring fails with
/// `MissingCoefficient` at the first unknown entry.
pub fn q_plus<C: Coeff>(family: MaassFamily, prec: i64, data: &MaassData) -> Result<PuiseuxSeries<C>> {
    let lead = family.leading_exponent();
    let mut terms = Vec::new();
    let mut l: u32 = 0;
    while lead + 4 * (l as i64) < prec {
        let e = lead + 4 * (l as i64);
        let c = match family {
            MaassFamily::Q10 if l == 0 => None,
            MaassFamily::Q10 => Some(C::from_rational(hurwitz(4 * l as u64 - 1))),
            MaassFamily::Q00 => Some(C::from_rational(hurwitz(4 * l as u64))),
            MaassFamily::Q01 | MaassFamily::Q11 => {
                let sym = if family == MaassFamily::Q11 {
                    Symbol::H(l)
                } else {
                    Symbol::R(l)
                };
                Some(C::tabulated(sym, data.get(sym)).ok_or(Error::MissingCoefficient(sym))?)
            }
        };
        if let Some(c) = c {
            terms.push((e, c));
        }
        l += 1;
    }
    Ok(PuiseuxSeries::new(terms, prec))
}

/// Ramanujan-type mock theta function `M(q)`, correct below `prec`.
///
/// With `y = q^(1/8)` and
/// `F(y) = sum_n (-1)^(n+1) y^((n+1)^2) prod_{k<=n} (1-y^(2k-1)) / prod_{k<=n+1} (1+y^(2k-1))^2`,
/// `M(q) = q^(-1/8) F(q)`. Exponents are stored in `q^(1/8)` units, so the
/// stored exponent `e` is the power of `q` in `M(q^8) = -q^7 + 2q^15 - ...`.
pub fn mock_theta_m(prec: i64) -> Result<PuiseuxSeries> {
    // F is built on the lattice y = q, i.e. in steps of 8.
    let work = prec + 1;
    let y_pow = |k: i64, c: i64| PuiseuxSeries::new([(8 * k, int(c))], work);
    let one = PuiseuxSeries::new([(0, int(1))], work);

    let mut total = PuiseuxSeries::zero(work);
    let mut numer = one.clone();
    let mut denom = one.clone();
    let mut n: i64 = 0;
    loop {
        let lead = (n + 1) * (n + 1);
        if 8 * lead >= work {
            break;
        }
        let factor = one.checked_add(&y_pow(2 * n + 1, 1))?;
        denom = denom.checked_mul(&factor)?.checked_mul(&factor)?;
        let term = y_pow(lead, if n % 2 == 0 { -1 } else { 1 })
            .checked_mul(&numer)?
            .checked_mul(&denom.inverse()?)?;
        total = total.checked_add(&term)?;
        numer = numer.checked_mul(&one.checked_sub(&y_pow(2 * n + 1, 1))?)?;
        n += 1;
    }
    Ok(total.shift(-1).truncate(prec))
}
