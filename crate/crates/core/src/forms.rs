//! q-expansions of theta nullwerte, their derivatives, `eta^3`, `E2`, the
//! u-plane forms `u`, `h`, `T`, `f2`, and the blowup kernels.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::qseries::rational::{factorial, int, sign_pow};
use crate::qseries::{MuPoly, PuiseuxSeries, Rational};

/// Extra window used while assembling quotients so that inversions of `h`
/// and `theta4^8` do not eat into the requested precision.
const ASSEMBLY_SLACK: i64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormName {
    Theta2,
    Theta3,
    Theta4,
    Eta3,
    E2,
    U,
    H,
    T,
    F2,
}

impl FormName {
    pub const ALL: [FormName; 9] = [
        FormName::Theta2,
        FormName::Theta3,
        FormName::Theta4,
        FormName::Eta3,
        FormName::E2,
        FormName::U,
        FormName::H,
        FormName::T,
        FormName::F2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FormName::Theta2 => "theta2",
            FormName::Theta3 => "theta3",
            FormName::Theta4 => "theta4",
            FormName::Eta3 => "eta3",
            FormName::E2 => "E2",
            FormName::U => "u",
            FormName::H => "h",
            FormName::T => "T",
            FormName::F2 => "f2",
        }
    }
}

impl fmt::Display for FormName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormName::ALL.iter().find(|n| n.as_str() == s).copied().ok_or_else(|| {
            let known: Vec<&str> = FormName::ALL.iter().map(FormName::as_str).collect();
            Error::Parse(format!("unknown form {s:?}; expected one of {}", known.join(", ")))
        })
    }
}

/// The `k`-th derivative in `v` at `v = 0` of `theta_ab(v|tau)`.
///
/// `theta_ab(v) = sum_n q^((2n+a)^2/8) e^(pi i (2n+a)(v + b/2))`, so the
/// derivative is `(pi i)^k sum_n (2n+a)^k i^((2n+a) b) q^((2n+a)^2/8)`.
/// Since `i^((2n+a)b) = i^(ab) (-1)^(nb)` the stored series is
/// `sum_n (-1)^(nb) (2n+a)^k q^((2n+a)^2/8)` and the dropped phase is
/// `pi^k i^(k+ab)`, see [`ThetaDerivSpec::phase_power`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThetaDerivSpec {
    pub a: u8,
    pub b: u8,
    pub k: u32,
}

impl ThetaDerivSpec {
    pub fn new(a: u8, b: u8, k: u32) -> Result<Self> {
        if a > 1 || b > 1 {
            return Err(Error::InvalidSetup(format!(
                "theta characteristic ({a},{b}) must be 0 or 1"
            )));
        }
        Ok(ThetaDerivSpec { a, b, k })
    }

    /// Power of `i` in the phase `pi^k i^(k+ab)` factored out of the series.
    pub fn phase_power(&self) -> u32 {
        self.k + (self.a * self.b) as u32
    }

    /// The stored series vanishes identically exactly when `k + ab` is odd:
    /// terms `n` and `-n-a` cancel in pairs.
    pub fn vanishes(&self) -> bool {
        self.phase_power() % 2 == 1
    }
}

/// Stored series of [`ThetaDerivSpec`], truncated below `prec`.
pub fn theta_deriv(spec: ThetaDerivSpec, prec: i64) -> PuiseuxSeries {
    let a = spec.a as i64;
    let b = spec.b as i64;
    let mut terms = Vec::new();
    if prec > 0 {
        let mut n: i64 = 0;
        loop {
            let mut any = false;
            for m in [n, -n - 1] {
                let r = 2 * m + a;
                if r * r >= prec {
                    continue;
                }
                any = true;
                let sign = sign_pow(m * b);
                let c = BigInt::from(sign) * BigInt::from(r).pow(spec.k);
                terms.push((r * r, Rational::from_integer(c)));
            }
            if !any {
                break;
            }
            n += 1;
        }
    }
    PuiseuxSeries::new(terms, prec)
}

fn eisenstein_e2(prec: i64) -> PuiseuxSeries {
    let mut terms = vec![(0, int(1))];
    let mut n: i64 = 1;
    while 8 * n < prec {
        let sigma: i64 = (1..=n).filter(|d| n % d == 0).sum();
        terms.push((8 * n, int(-24 * sigma)));
        n += 1;
    }
    PuiseuxSeries::new(terms, prec)
}

fn eta_cubed(prec: i64) -> PuiseuxSeries {
    let mut terms = Vec::new();
    let mut n: i64 = 0;
    while (2 * n + 1) * (2 * n + 1) < prec {
        terms.push(((2 * n + 1) * (2 * n + 1), int(sign_pow(n) * (2 * n + 1))));
        n += 1;
    }
    PuiseuxSeries::new(terms, prec)
}

/// All forms entering the u-plane formulas, built eagerly to one window and
/// immutable afterwards.
///
/// `h = theta2 theta3 / 2`, `u = (theta2^4 + theta3^4) / (8 h^2)`,
/// `T = -(E2/h^2 - 8u)/24`, `f2 = h / theta4^8`.
#[derive(Debug, Clone)]
pub struct Forms {
    prec: i64,
    pub theta2: PuiseuxSeries,
    pub theta3: PuiseuxSeries,
    pub theta4: PuiseuxSeries,
    pub eta3: PuiseuxSeries,
    pub e2: PuiseuxSeries,
    pub h: PuiseuxSeries,
    pub u: PuiseuxSeries,
    pub t: PuiseuxSeries,
    pub f2: PuiseuxSeries,
    pub h_inv: PuiseuxSeries,
    pub theta4_inv: PuiseuxSeries,
    /// `1/(h^2 f2) = theta4^8 / h^3`.
    pub inv_h2_f2: PuiseuxSeries,
}

impl Forms {
    /// Builds every form so that each is correct at least below `prec`.
    pub fn new(prec: i64) -> Result<Self> {
        if prec <= 0 {
            return Err(Error::InsufficientPrecision(format!(
                "form window must be positive, got {prec}"
            )));
        }
        let work = prec + ASSEMBLY_SLACK;
        let theta2 = theta_deriv(ThetaDerivSpec { a: 1, b: 0, k: 0 }, work);
        let theta3 = theta_deriv(ThetaDerivSpec { a: 0, b: 0, k: 0 }, work);
        let theta4 = theta_deriv(ThetaDerivSpec { a: 0, b: 1, k: 0 }, work);
        let e2 = eisenstein_e2(work);
        let half = Rational::new(1.into(), 2.into());

        let h = theta2.checked_mul(&theta3)?.scale(&half);
        let h2 = h.checked_mul(&h)?;
        let h2_inv = h2.inverse()?;
        let u = theta2
            .pow(4)?
            .checked_add(&theta3.pow(4)?)?
            .checked_mul(&h2_inv)?
            .scale(&Rational::new(1.into(), 8.into()));
        let t = e2
            .checked_mul(&h2_inv)?
            .checked_sub(&u.scale(&int(8)))?
            .scale(&Rational::new((-1).into(), 24.into()));
        let theta4_8 = theta4.pow(8)?;
        let f2 = h.checked_mul(&theta4_8.inverse()?)?;
        let h_inv = h.inverse()?;
        let inv_h2_f2 = theta4_8.checked_mul(&h2.checked_mul(&h)?.inverse()?)?;
        let theta4_inv = theta4.inverse()?;

        let cut = |s: PuiseuxSeries| s.truncate(prec);
        Ok(Forms {
            prec,
            theta2: cut(theta2),
            theta3: cut(theta3),
            theta4: cut(theta4),
            eta3: eta_cubed(prec),
            e2: cut(e2),
            h: cut(h),
            u: cut(u),
            t: cut(t),
            f2: cut(f2),
            h_inv: cut(h_inv),
            theta4_inv: cut(theta4_inv),
            inv_h2_f2: cut(inv_h2_f2),
        })
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn get(&self, name: FormName) -> &PuiseuxSeries {
        match name {
            FormName::Theta2 => &self.theta2,
            FormName::Theta3 => &self.theta3,
            FormName::Theta4 => &self.theta4,
            FormName::Eta3 => &self.eta3,
            FormName::E2 => &self.e2,
            FormName::U => &self.u,
            FormName::H => &self.h,
            FormName::T => &self.t,
            FormName::F2 => &self.f2,
        }
    }
}

/// q-expansion of a named form, correct below `prec`.
pub fn basic_form(name: FormName, prec: i64) -> Result<PuiseuxSeries> {
    match name {
        FormName::Theta2 => Ok(theta_deriv(ThetaDerivSpec { a: 1, b: 0, k: 0 }, prec)),
        FormName::Theta3 => Ok(theta_deriv(ThetaDerivSpec { a: 0, b: 0, k: 0 }, prec)),
        FormName::Theta4 => Ok(theta_deriv(ThetaDerivSpec { a: 0, b: 1, k: 0 }, prec)),
        FormName::Eta3 => Ok(eta_cubed(prec)),
        FormName::E2 => Ok(eisenstein_e2(prec)),
        _ => Ok(Forms::new(prec)?.get(name).clone()),
    }
}

/// Sign `(-1)^(ab)` applied to the kernel so that its `mu^1` coefficient for
/// `(a,b) = (1,1)` is `+1`, matching the blowup relation `D(z e) = D(z)`.
pub const KERNEL_SIGN_11: i64 = -1;

/// Blowup kernel `K_ab(mu) = e^(-mu^2 T) theta_ab(mu/(2 pi h)) / theta4`,
/// normalised by [`KERNEL_SIGN_11`] in the `(1,1)` sector.
///
/// With `v = mu/(2 pi h)` the `k`-th Taylor term of `theta_ab` is
/// `(pi i)^k i^(ab) S_k mu^k / (k! (2 pi h)^k) = i^(k+ab) S_k mu^k / (2^k k! h^k)`
/// where `S_k` is the stored derivative series. Only even `k + ab` survive,
/// so the phase is the real sign `(-1)^((k+ab)/2)`.
pub fn blowup_kernel(forms: &Forms, a: u8, b: u8, mu_degree: u32) -> Result<MuPoly> {
    let spec0 = ThetaDerivSpec::new(a, b, 0)?;
    let work = forms.precision() + ASSEMBLY_SLACK;
    let ab = (spec0.a * spec0.b) as i64;
    let overall = if ab == 1 { KERNEL_SIGN_11 } else { 1 };

    let mut theta_part = MuPoly::new(mu_degree);
    let mut h_pow = PuiseuxSeries::one();
    for k in 0..=mu_degree {
        if k > 0 {
            h_pow = h_pow.checked_mul(&forms.h_inv)?;
        }
        let spec = ThetaDerivSpec { k, ..spec0 };
        if spec.vanishes() {
            continue;
        }
        let sign = sign_pow((k as i64 + ab) / 2) * overall;
        let denom = BigInt::from(2).pow(k) * factorial(k);
        let c = Rational::new(BigInt::from(sign), denom);
        let s = theta_deriv(spec, work)
            .checked_mul(&forms.theta4_inv)?
            .checked_mul(&h_pow)?
            .scale(&c);
        theta_part.set(k, s);
    }
    MuPoly::exp_neg_mu2(&forms.t, mu_degree)?.mu_mul(&theta_part)
}

/// Coefficients `c_0..c_d` with `s = sum_i c_i u^i` on the common window, or
/// `None` when no such polynomial of degree `<= d` exists.
///
/// `u` has valuation `-2` with leading coefficient `1/8`, so the powers are
/// triangular in the leading exponent and the system is solved by peeling off
/// the most polar term.
pub fn express_in_u(forms: &Forms, s: &PuiseuxSeries, d: u32) -> Result<Option<Vec<Rational>>> {
    let mut powers = vec![PuiseuxSeries::one()];
    for i in 1..=d as usize {
        let next = powers[i - 1].checked_mul(&forms.u)?;
        powers.push(next);
    }
    let mut residual = s.clone();
    let mut coeffs = vec![Rational::from_integer(0.into()); d as usize + 1];
    for i in (0..=d as usize).rev() {
        let e = -2 * i as i64;
        let lead = powers[i].coeff(e)?;
        let c = residual.coeff(e)? / lead;
        residual = residual.checked_sub(&powers[i].scale(&c))?;
        coeffs[i] = c;
    }
    if residual.is_zero() {
        Ok(Some(coeffs))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rational::rat;

    #[test]
    fn parses_names() {
        for n in FormName::ALL {
            assert_eq!(n.as_str().parse::<FormName>().unwrap(), n);
        }
        assert!("theta1".parse::<FormName>().is_err());
    }

    #[test]
    fn eisenstein_leading_terms() {
        let e2 = eisenstein_e2(40);
        assert_eq!(e2.coeff(8).unwrap(), int(-24));
        assert_eq!(e2.coeff(16).unwrap(), int(-72));
        assert_eq!(e2.coeff(24).unwrap(), int(-96));
    }

    #[test]
    fn eta_cubed_leading_terms() {
        let e = eta_cubed(60);
        assert_eq!(e.render_pairs(), "1/8:1 9/8:-3 25/8:5 49/8:-7");
    }

    #[test]
    fn leading_terms_of_u_h_t_f2() {
        let f = Forms::new(24).unwrap();
        assert_eq!(f.u.leading().map(|(e, c)| (e, c.clone())), Some((-2, rat(1, 8))));
        assert_eq!(f.h.leading().map(|(e, c)| (e, c.clone())), Some((1, int(1))));
        assert_eq!(f.t.leading().map(|(e, c)| (e, c.clone())), Some((2, int(1))));
        assert_eq!(f.f2.valuation(), 1);
        assert!(f.u.precision() >= 24 && f.t.precision() >= 24);
    }

    #[test]
    fn theta_parity() {
        for a in 0..2u8 {
            for b in 0..2u8 {
                for k in 0..8 {
                    let spec = ThetaDerivSpec::new(a, b, k).unwrap();
                    assert_eq!(theta_deriv(spec, 200).is_zero(), spec.vanishes(), "{spec:?}");
                }
            }
        }
    }

    #[test]
    fn theta1_derivative_is_twice_eta_cubed() {
        let s = theta_deriv(ThetaDerivSpec::new(1, 1, 1).unwrap(), 200);
        assert!(s.agrees_with(&eta_cubed(200).scale(&int(2))));
    }
}
