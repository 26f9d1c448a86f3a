use std::collections::BTreeMap;

use super::coeff::Coeff;
use super::rational::{factorial, Rational};
use super::series::PuiseuxSeries;
use crate::error::Result;

/// Polynomial in the blowup variable `mu`, truncated above `mu_degree`, whose
/// coefficients are q-series.
#[derive(Clone, Debug)]
pub struct MuPoly<C: Coeff = Rational> {
    coeffs: BTreeMap<u32, PuiseuxSeries<C>>,
    mu_degree: u32,
}

impl<C: Coeff> MuPoly<C> {
    pub fn new(mu_degree: u32) -> Self {
        MuPoly {
            coeffs: BTreeMap::new(),
            mu_degree,
        }
    }

    /// A `mu`-constant.
    pub fn constant(s: PuiseuxSeries<C>, mu_degree: u32) -> Self {
        let mut p = Self::new(mu_degree);
        p.set(0, s);
        p
    }

    pub fn mu_degree(&self) -> u32 {
        self.mu_degree
    }

    /// Stores `s` at `mu^k`; ignored when `k` exceeds the truncation.
    pub fn set(&mut self, k: u32, s: PuiseuxSeries<C>) {
        if k <= self.mu_degree {
            self.coeffs.insert(k, s);
        }
    }

    /// The `mu^k` coefficient, if one is stored.
    pub fn get(&self, k: u32) -> Option<&PuiseuxSeries<C>> {
        self.coeffs.get(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &PuiseuxSeries<C>)> {
        self.coeffs.iter().map(|(k, s)| (*k, s))
    }

    /// True when every stored coefficient is the zero series.
    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(PuiseuxSeries::is_zero)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let deg = self.mu_degree.min(other.mu_degree);
        let mut out = Self::new(deg);
        for k in 0..=deg {
            let s = match (self.coeffs.get(&k), other.coeffs.get(&k)) {
                (Some(a), Some(b)) => a.checked_add(b)?,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => continue,
            };
            out.set(k, s);
        }
        Ok(out)
    }

    /// Polynomial product truncated at the smaller `mu_degree`.
    pub fn mu_mul(&self, other: &Self) -> Result<Self> {
        let deg = self.mu_degree.min(other.mu_degree);
        let mut out = Self::new(deg);
        for (i, a) in &self.coeffs {
            for (j, b) in other.coeffs.range(..=deg.saturating_sub(*i)) {
                if i + j > deg {
                    continue;
                }
                let term = a.checked_mul(b)?;
                let next = match out.coeffs.get(&(i + j)) {
                    Some(acc) => acc.checked_add(&term)?,
                    None => term,
                };
                out.set(i + j, next);
            }
        }
        Ok(out)
    }
}

impl MuPoly<Rational> {
    /// `exp(-mu^2 t) = sum_k (-t)^k mu^(2k) / k!`, truncated at `mu_degree`.
    pub fn exp_neg_mu2(t: &PuiseuxSeries<Rational>, mu_degree: u32) -> Result<Self> {
        let mut out = Self::new(mu_degree);
        let minus_t = t.negated();
        let mut power = PuiseuxSeries::one();
        for k in 0..=mu_degree / 2 {
            if k > 0 {
                power = power.checked_mul(&minus_t)?;
            }
            let inv_fact = Rational::from_integer(factorial(k)).recip();
            out.set(2 * k, power.scale(&inv_fact));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rational::{int, rat};

    fn mu() -> MuPoly {
        let mut p = MuPoly::new(4);
        p.set(1, PuiseuxSeries::one());
        p
    }

    #[test]
    fn mu_squared_truncates() {
        let sq = mu().mu_mul(&mu()).unwrap();
        assert!(sq.get(2).unwrap().agrees_with(&PuiseuxSeries::one()));
        let mut low: MuPoly = MuPoly::new(1);
        low.set(1, PuiseuxSeries::one());
        assert!(low.mu_mul(&low).unwrap().get(2).is_none());
    }

    #[test]
    fn exponential_matches_scalar_expansion() {
        let t = PuiseuxSeries::monomial(2, int(1));
        let e = MuPoly::exp_neg_mu2(&t, 6).unwrap();
        let c = PuiseuxSeries::monomial(0, int(3));
        let prod = e.mu_mul(&MuPoly::constant(c, 6)).unwrap();
        assert!(prod.get(0).unwrap().agrees_with(&PuiseuxSeries::monomial(0, int(3))));
        assert!(prod.get(2).unwrap().agrees_with(&PuiseuxSeries::monomial(2, int(-3))));
        assert!(prod.get(4).unwrap().agrees_with(&PuiseuxSeries::monomial(4, rat(3, 2))));
        assert!(prod
            .get(6)
            .unwrap()
            .agrees_with(&PuiseuxSeries::monomial(6, rat(-1, 2))));
        assert!(prod.get(1).is_none());
    }
}
