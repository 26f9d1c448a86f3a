//! Walls and chambers on CP1 x CP1: the limiting-chamber formula at `F+`,
//! wall-crossing terms, and the consistency check against the spin sum.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::engine::{p1xp1_coeff, Engine, Group};
use crate::error::{Error, Result};
use crate::qseries::rational::{bernoulli_numbers, binomial, factorial, int, pow_i, rat, sign_pow};
use crate::qseries::{PuiseuxSeries, Rational};

/// Magnitude of the wall-crossing prefactor `-i * WC_PREFACTOR`.
pub const WC_PREFACTOR: i64 = 1;

/// `lambda = (M1 + rho_f/2) F + (M2 + rho_g/2) G` with `F^2 = G^2 = 0`,
/// `F.G = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WallVector {
    pub m1: i64,
    pub m2: i64,
    pub rho_f: u8,
    pub rho_g: u8,
}

impl WallVector {
    pub fn new(m1: i64, m2: i64, rho_f: u8, rho_g: u8) -> Self {
        WallVector { m1, m2, rho_f, rho_g }
    }

    /// Coefficient of `F`.
    pub fn lambda_f(&self) -> Rational {
        rat(2 * self.m1 + self.rho_f as i64, 2)
    }

    /// Coefficient of `G`.
    pub fn lambda_g(&self) -> Rational {
        rat(2 * self.m2 + self.rho_g as i64, 2)
    }

    pub fn lambda_sq(&self) -> Rational {
        int(2) * self.lambda_f() * self.lambda_g()
    }

    /// `(lambda, S)` for `S = kf f + 2 kg g`, as the pair of coefficients of
    /// `kf` and `kg`.
    pub fn pairing_with_s(&self) -> (Rational, Rational) {
        (self.lambda_g(), int(2) * self.lambda_f())
    }
}

impl fmt::Display for WallVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})F+({})G",
            crate::qseries::rational::format_rational(&self.lambda_f()),
            crate::qseries::rational::format_rational(&self.lambda_g())
        )
    }
}

/// Period point `omega(eps) = (alpha0 + alpha1 eps) F + (beta0 + beta1 eps) G`
/// in the limit `eps -> 0+`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberSpec {
    pub name: &'static str,
    pub alpha: (Rational, Rational),
    pub beta: (Rational, Rational),
}

impl ChamberSpec {
    /// `omega = F + eps G`.
    pub fn f_plus() -> Self {
        ChamberSpec {
            name: "F+",
            alpha: (int(1), int(0)),
            beta: (int(0), int(1)),
        }
    }

    /// `omega = (1+eps)/2 F + (1-eps) G`.
    pub fn half_f_plus_g() -> Self {
        ChamberSpec {
            name: "F/2+G",
            alpha: (rat(1, 2), rat(1, 2)),
            beta: (int(1), int(-1)),
        }
    }

    /// `omega(eps)^2 = 2 alpha(eps) beta(eps)` is positive for small `eps`.
    pub fn is_positive(&self) -> bool {
        let c0 = &self.alpha.0 * &self.beta.0;
        let c1 = &self.alpha.0 * &self.beta.1 + &self.alpha.1 * &self.beta.0;
        let c2 = &self.alpha.1 * &self.beta.1;
        [c0, c1, c2]
            .into_iter()
            .find(|c| !c.is_zero())
            .is_some_and(|c| c.is_positive())
    }

    /// Sign of `omega(eps) . lambda` as `eps -> 0+`.
    pub fn side(&self, w: &WallVector) -> i8 {
        let (lf, lg) = (w.lambda_f(), w.lambda_g());
        let v0 = &self.alpha.0 * &lg + &self.beta.0 * &lf;
        let v1 = &self.alpha.1 * &lg + &self.beta.1 * &lf;
        let v = if v0.is_zero() { v1 } else { v0 };
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }
}

/// Most negative `lambda^2` that can contribute to the coefficient of
/// `p^m kf^i kg^j` with `i + j = degree`.
///
/// The integrand `theta4^8/h^3 u^m T^c h^-t` has valuation
/// `-(3 + 2m + degree) + 4c` in `q^(1/8)` units, so a constant term needs
/// `-lambda^2/2 <= (3 + 2m + degree)/8`.
pub fn wall_budget(m: u32, degree: u32) -> Rational {
    rat(-(3 + 2 * m as i64 + degree as i64), 4)
}

/// Every `lambda` on the lattice shifted by `rho/2` with
/// `lambda_sq_min <= lambda^2 < 0`, in `(M1, M2)` order.
fn walls_in_budget(rho: (u8, u8), lambda_sq_min: &Rational) -> Vec<WallVector> {
    if !lambda_sq_min.is_negative() {
        return Vec::new();
    }
    // |lambda_f|, |lambda_g| >= 1/2 on a wall, so each is at most |min|.
    let bound = lambda_sq_min.abs().ceil().to_integer();
    let bound = i64::try_from(bound).unwrap_or(i64::MAX / 4) + 1;
    let mut out = Vec::new();
    for m1 in -bound..=bound {
        for m2 in -bound..=bound {
            let w = WallVector::new(m1, m2, rho.0, rho.1);
            let sq = w.lambda_sq();
            if sq.is_negative() && &sq >= lambda_sq_min {
                out.push(w);
            }
        }
    }
    out
}

/// Walls `lambda` with `lambda_sq_min <= lambda^2 < 0`, `from . lambda > 0`
/// and `to . lambda < 0`, sorted by `(M1, M2)`.
pub fn enumerate_walls(
    from: &ChamberSpec,
    to: &ChamberSpec,
    rho: (u8, u8),
    lambda_sq_min: &Rational,
) -> Vec<WallVector> {
    walls_in_budget(rho, lambda_sq_min)
        .into_iter()
        .filter(|w| from.side(w) > 0 && to.side(w) < 0)
        .collect()
}

/// Walls `lambda` with `lambda_sq_min <= lambda^2 < 0` orthogonal to `from`
/// at `eps = 0` and with `to . lambda < 0`.
pub fn boundary_walls(
    from: &ChamberSpec,
    to: &ChamberSpec,
    rho: (u8, u8),
    lambda_sq_min: &Rational,
) -> Vec<WallVector> {
    walls_in_budget(rho, lambda_sq_min)
        .into_iter()
        .filter(|w| (&from.alpha.0 * w.lambda_g() + &from.beta.0 * w.lambda_f()).is_zero() && to.side(w) < 0)
        .collect()
}

/// Real and imaginary parts of one wall-crossing coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallTerm {
    pub real: Rational,
    pub imaginary: Rational,
}

/// `[q^(-lambda^2/2) theta4^8/h^3 u^m T^c h^-t]_{q^0}`.
fn shifted_constant_term(engine: &Engine, w: &WallVector, m: u32, c: u32, t: i64) -> Result<Rational> {
    let shift = -(w.lambda_f() * w.lambda_g()) * int(8);
    if !shift.is_integer() {
        return Err(Error::InvalidSetup(format!("{w} does not lie on the q^(1/8) lattice")));
    }
    let shift: i64 = i64::try_from(shift.to_integer()).map_err(|_| Error::InvalidSetup(format!("{w} is too large")))?;
    let forms = engine.forms();
    let h_part = if t >= 0 {
        engine.h_inv_pow(t as u32)?
    } else {
        forms.h.pow((-t) as u32)?
    };
    let series = forms
        .inv_h2_f2
        .checked_mul(&engine.u_pow(m)?)?
        .checked_mul(&engine.t_pow(c)?)?
        .checked_mul(&h_part)?;
    series.constant_term_of_product(&PuiseuxSeries::monomial(shift, int(1)))
}

/// Both parts of the coefficient of `p^m kf^i kg^j` in
/// `WC(lambda) = -i [q^(-lambda^2/2) 1/(h^2 f2) exp(2pu + S^2 T - i (lambda,S)/h)]_{q^0}`,
/// scaled by [`WC_PREFACTOR`], with `S^2 = 4 kf kg` and the sign
/// `(-1)^(lambda - lambda0, w2)` for `w2 = w2f F + w2g G`.
pub fn wc_term_parts(engine: &Engine, w: &WallVector, w2: (u8, u8), m: u32, i: u32, j: u32) -> Result<WallTerm> {
    let sq = w.lambda_sq();
    if !sq.is_negative() {
        return Err(Error::NotAWall(crate::qseries::rational::format_rational(&sq)));
    }
    let (pf, pg) = w.pairing_with_s();
    let sign = sign_pow(w.m1 * w2.1 as i64 + w.m2 * w2.0 as i64);
    let mut real = Rational::zero();
    let mut imaginary = Rational::zero();
    for c in 0..=i.min(j) {
        let (r1, r2) = (i - c, j - c);
        let t = r1 + r2;
        let weight = Rational::new(
            BigInt::from(2).pow(m) * BigInt::from(4).pow(c),
            factorial(m) * factorial(c),
        ) * Rational::from_integer(binomial(t, r1))
            * pow_i(&pf, r1 as i64)
            * pow_i(&pg, r2 as i64)
            / Rational::from_integer(factorial(t));
        if weight.is_zero() {
            continue;
        }
        let ct = shifted_constant_term(engine, w, m, c, t as i64)?;
        // -i (-i)^t = (-i)^(t+1)
        let value = weight * ct * int(sign * WC_PREFACTOR);
        if t % 2 == 1 {
            real += value * int(sign_pow((t as i64 + 1) / 2));
        } else {
            imaginary -= value * int(sign_pow(t as i64 / 2));
        }
    }
    Ok(WallTerm { real, imaginary })
}

/// Rational value of a wall-crossing coefficient; a nonzero imaginary part is
/// reported as an error.
pub fn wc_term(engine: &Engine, w: &WallVector, w2: (u8, u8), m: u32, i: u32, j: u32) -> Result<Rational> {
    let parts = wc_term_parts(engine, w, w2, m, i, j)?;
    if !parts.imaginary.is_zero() {
        return Err(Error::ImaginaryResidue(format!(
            "{} at {w}",
            crate::qseries::rational::format_rational(&parts.imaginary)
        )));
    }
    Ok(parts.real)
}

/// Laurent coefficient of `x^(2k-1)` in `cot x` (`csc = false`) or `csc x`.
pub fn cot_csc_coefficient(k: u32, csc: bool) -> Rational {
    let b = bernoulli_numbers(2 * k as usize)[2 * k as usize].clone();
    let fact = Rational::from_integer(factorial(2 * k));
    if csc {
        let two = pow_i(&int(2), 2 * k as i64 - 1);
        int(sign_pow(k as i64 + 1)) * int(2) * (two - int(1)) * b / fact
    } else {
        int(sign_pow(k as i64)) * pow_i(&int(2), 2 * k as i64) * b / fact
    }
}

/// Coefficient of `p^m kf^i kg^j` in the `F+` limiting-chamber formula
/// `-1/4 [1/(h^2 f2) exp(2pu + S^2 T) cot(kg/h)]_{q^0}`, with `csc` in
/// place of `cot` when `rho_f = 1` and identically zero when `rho_g = 1`.
pub fn z_limiting(engine: &Engine, rho_f: u8, rho_g: u8, m: u32, i: u32, j: u32) -> Result<Rational> {
    if rho_g != 0 {
        return Ok(Rational::zero());
    }
    // kf only enters through S^2 T = 4 kf kg T, so c = i and cot supplies kg^(j-i).
    let c = i;
    let r = j as i64 - c as i64;
    if r < -1 || r.rem_euclid(2) == 0 {
        return Ok(Rational::zero());
    }
    let k = ((r + 1) / 2) as u32;
    let laurent = cot_csc_coefficient(k, rho_f == 1);
    let weight = Rational::new(
        BigInt::from(2).pow(m) * BigInt::from(4).pow(c),
        factorial(m) * factorial(c),
    ) * laurent;
    let forms = engine.forms();
    let h_part = if r >= 0 {
        engine.h_inv_pow(r as u32)?
    } else {
        forms.h.clone()
    };
    let ct = forms
        .inv_h2_f2
        .checked_mul(&engine.u_pow(m)?)?
        .checked_mul(&engine.t_pow(c)?)?
        .checked_mul(&h_part)?
        .constant_term()?;
    Ok(rat(-1, 4) * weight * ct)
}

/// Lattice shift `(rho_f, rho_g)` and `w2` used for each group.
pub fn group_lattice(group: Group) -> ((u8, u8), (u8, u8)) {
    match group {
        Group::Su2 => ((0, 0), (0, 0)),
        Group::So3 => ((1, 0), (0, 0)),
    }
}

/// The three sides of `Z(F/2+G) - Z(F+) = sum WC(lambda)` for one monomial.
///
/// `walls` are the crossings under the `eps` deformation. `boundary` holds the
/// walls through `F/2+G` itself, which the deformation places on the `F+`
/// side.
#[derive(Debug, Clone, PartialEq)]
pub struct ChamberDifference {
    pub z_half: Rational,
    pub z_fplus: Rational,
    pub walls: Vec<(WallVector, Rational)>,
    pub wall_sum: Rational,
    pub boundary: Vec<(WallVector, Rational)>,
}

impl ChamberDifference {
    /// The identity with walls resolved by the `eps` deformation.
    pub fn holds(&self) -> bool {
        &self.z_half - &self.z_fplus == self.wall_sum
    }

    /// The identity with each boundary wall counted at half weight.
    pub fn holds_at_midpoint(&self) -> bool {
        let half: Rational = self.boundary.iter().map(|(_, v)| v).sum::<Rational>() * rat(1, 2);
        &self.z_half - &self.z_fplus == &self.wall_sum + half
    }
}

pub fn chamber_difference(engine: &Engine, group: Group, m: u32, i: u32, j: u32) -> Result<ChamberDifference> {
    let (rho, w2) = group_lattice(group);
    let z_half: Rational = p1xp1_coeff(engine, group, m, i, j)?;
    let z_fplus = z_limiting(engine, rho.0, rho.1, m, i, j)?;
    let (from, to) = (ChamberSpec::half_f_plus_g(), ChamberSpec::f_plus());
    let budget = wall_budget(m, i + j);
    let mut terms = Vec::new();
    let mut wall_sum = Rational::zero();
    for w in enumerate_walls(&from, &to, rho, &budget) {
        let v = wc_term(engine, &w, w2, m, i, j)?;
        wall_sum += &v;
        terms.push((w, v));
    }
    let boundary = boundary_walls(&from, &to, rho, &budget)
        .into_iter()
        .map(|w| Ok((w, wc_term(engine, &w, w2, m, i, j)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChamberDifference {
        z_half,
        z_fplus,
        walls: terms,
        wall_sum,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_coefficients() {
        let cot: Vec<Rational> = (0..5).map(|k| cot_csc_coefficient(k, false)).collect();
        assert_eq!(cot, vec![int(1), rat(-1, 3), rat(-1, 45), rat(-2, 945), rat(-1, 4725)]);
        let csc: Vec<Rational> = (0..5).map(|k| cot_csc_coefficient(k, true)).collect();
        assert_eq!(
            csc,
            vec![int(1), rat(1, 6), rat(7, 360), rat(31, 15120), rat(127, 604800)]
        );
    }

    #[test]
    fn chambers_are_positive() {
        assert!(ChamberSpec::f_plus().is_positive());
        assert!(ChamberSpec::half_f_plus_g().is_positive());
    }

    #[test]
    fn empty_budget_has_no_walls() {
        let w = enumerate_walls(&ChamberSpec::half_f_plus_g(), &ChamberSpec::f_plus(), (0, 0), &int(0));
        assert!(w.is_empty());
    }

    #[test]
    fn minus_two_walls() {
        let all = enumerate_walls(&ChamberSpec::half_f_plus_g(), &ChamberSpec::f_plus(), (0, 0), &int(-2));
        assert_eq!(all, vec![WallVector::new(1, -1, 0, 0)]);
        let back = enumerate_walls(&ChamberSpec::f_plus(), &ChamberSpec::half_f_plus_g(), (0, 0), &int(-2));
        assert_eq!(back, vec![WallVector::new(-1, 1, 0, 0)]);
    }

    #[test]
    fn tie_break_uses_deformation() {
        // lambda = F - 2G is orthogonal to F/2 + G; the deformation gives -2 eps M1 < 0.
        let w = WallVector::new(1, -2, 0, 0);
        assert_eq!(ChamberSpec::half_f_plus_g().side(&w), -1);
        assert_eq!(ChamberSpec::half_f_plus_g().side(&WallVector::new(-1, 2, 0, 0)), 1);
    }
}
