//! Evaluated u-plane coefficients `D^ab_mn`, their blowup refinements
//! `Dhat^ab_mn(mu)`, and the generating-function tables built from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{blowup_kernel, Forms};
use crate::maass::{q_plus, MaassData, MaassFamily};
use crate::qseries::rational::{binomial, factorial, sign_pow};
use crate::qseries::{Coeff, MuPoly, PuiseuxSeries, Rational};

/// Safety margin added by [`precision_plan`].
pub const PLAN_MARGIN: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Cp2,
    Cp2Hat,
    P1xP1,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::Cp2 => "cp2",
            Target::Cp2Hat => "cp2hat",
            Target::P1xP1 => "p1xp1",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cp2" => Ok(Target::Cp2),
            "cp2hat" => Ok(Target::Cp2Hat),
            "p1xp1" => Ok(Target::P1xP1),
            _ => Err(Error::Parse(format!(
                "unknown target {s:?}; expected cp2, cp2hat or p1xp1"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Su2,
    So3,
}

impl Group {
    pub fn as_str(&self) -> &'static str {
        match self {
            Group::Su2 => "su2",
            Group::So3 => "so3",
        }
    }

    /// Sign of the `(a,b)` sector in the CP1 x CP1 spin sum.
    pub fn spin_sign(&self, a: u8, b: u8) -> i64 {
        match self {
            Group::Su2 => sign_pow((a * b) as i64),
            Group::So3 => sign_pow(((a + 1) * b) as i64),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "su2" => Ok(Group::Su2),
            "so3" => Ok(Group::So3),
            _ => Err(Error::Parse(format!("unknown group {s:?}; expected su2 or so3"))),
        }
    }
}

/// Period point of the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chamber {
    /// `omega = H` on CP2.
    H,
    /// `omega = H - eps E` on the blowup.
    HMinusEpsE,
    /// `omega = F/2 + G` on CP1 x CP1.
    HalfFPlusG,
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chamber::H => "H",
            Chamber::HMinusEpsE => "H-eps*E",
            Chamber::HalfFPlusG => "F/2+G",
        })
    }
}

/// Lattice data reduced to the theta characteristic `(a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeSetup {
    pub target: Target,
    pub sigma: i32,
    pub a: u8,
    pub b: u8,
    pub chamber: Chamber,
}

impl LatticeSetup {
    /// CP2 with `b = 1`; `a = 1` for SO(3) and `a = 0` for SU(2).
    pub fn cp2(group: Group) -> Self {
        LatticeSetup {
            target: Target::Cp2,
            sigma: 1,
            a: (group == Group::So3) as u8,
            b: 1,
            chamber: Chamber::H,
        }
    }

    /// The blowup with the sector of `group`.
    pub fn cp2hat(group: Group) -> Self {
        LatticeSetup {
            target: Target::Cp2Hat,
            sigma: 0,
            chamber: Chamber::HMinusEpsE,
            ..Self::cp2(group)
        }
    }

    /// The blowup with an explicit characteristic, including the
    /// non-geometric `b = 0` sectors.
    pub fn cp2hat_sector(a: u8, b: u8) -> Result<Self> {
        if a > 1 || b > 1 {
            return Err(Error::InvalidSetup(format!("characteristic ({a},{b}) must be 0 or 1")));
        }
        Ok(LatticeSetup {
            target: Target::Cp2Hat,
            sigma: 0,
            a,
            b,
            chamber: Chamber::HMinusEpsE,
        })
    }

    /// CP1 x CP1 at `omega = F/2 + G`; all four sectors enter the spin sum.
    pub fn p1xp1() -> Self {
        LatticeSetup {
            target: Target::P1xP1,
            sigma: 0,
            a: 0,
            b: 0,
            chamber: Chamber::HalfFPlusG,
        }
    }

    pub fn for_target(target: Target, group: Group) -> Self {
        match target {
            Target::Cp2 => Self::cp2(group),
            Target::Cp2Hat => Self::cp2hat(group),
            Target::P1xP1 => Self::p1xp1(),
        }
    }
}

/// q-window guaranteed to resolve `D^ab_mn` and its `mu` coefficients up to
/// `mu_degree`: `2(m+n) + (3+2n) + 1 + 1 + mu_degree + 8`.
pub fn precision_plan(setup: &LatticeSetup, m: u32, n: u32, mu_degree: u32) -> i64 {
    let mu = if setup.target == Target::Cp2 { 0 } else { mu_degree };
    2 * (m + n) as i64 + (3 + 2 * n) as i64 + 2 + mu as i64 + PLAN_MARGIN
}

/// Exact coefficient `(-1)^j C(k,j) 12^j / prod_{i<j} (3/2 - ab + i)` of
/// `E2^(k-j) (q d/dq)^j Q` in the bracket `E^k[Q]`.
pub fn ek_weight(k: u32, ab: u8, j: u32) -> Rational {
    let mut w = Rational::from_integer(BigInt::from(sign_pow(j as i64)) * binomial(k, j) * BigInt::from(12).pow(j));
    for i in 0..j {
        w /= Rational::new(BigInt::from(3 - 2 * ab as i64 + 2 * i as i64), BigInt::from(2));
    }
    w
}

/// Keys and values of a generating-function table.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantTable<C: Coeff> {
    pub setup: LatticeSetup,
    pub group: Group,
    /// Names of the key components, e.g. `["m", "n"]` or `["m", "i", "j"]`.
    pub index_names: Vec<&'static str>,
    /// How a key maps to a monomial of the generating function.
    pub convention: &'static str,
    pub precision: i64,
    pub entries: BTreeMap<Vec<u32>, C>,
}

/// Bounds for a table request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRequest {
    pub max_p: u32,
    pub max_kappa: u32,
    pub mu_degree: u32,
    /// Overrides [`precision_plan`] when set.
    pub precision: Option<i64>,
}

/// Forms, kernels and power caches at one fixed window. Immutable once built,
/// so it can be shared across worker threads.
#[derive(Debug, Clone)]
pub struct Engine {
    forms: Forms,
    data: MaassData,
    mu_degree: u32,
    kernels: BTreeMap<(u8, u8), MuPoly>,
    theta4_9: PuiseuxSeries,
    u_pows: Vec<PuiseuxSeries>,
    h_inv_pows: Vec<PuiseuxSeries>,
    e2_pows: Vec<PuiseuxSeries>,
    t_pows: Vec<PuiseuxSeries>,
}

fn powers(base: &PuiseuxSeries, max: u32) -> Result<Vec<PuiseuxSeries>> {
    let mut out = vec![PuiseuxSeries::one()];
    for i in 1..=max as usize {
        let next = out[i - 1].checked_mul(base)?;
        out.push(next);
    }
    Ok(out)
}

fn cached_pow(cache: &[PuiseuxSeries], base: &PuiseuxSeries, k: u32) -> Result<PuiseuxSeries> {
    match cache.get(k as usize) {
        Some(s) => Ok(s.clone()),
        None => base.pow(k),
    }
}

impl Engine {
    /// Builds forms to `window`, kernels to `mu_degree`, and power caches
    /// large enough for coefficients with `m + n <= max_weight`.
    pub fn new(window: i64, mu_degree: u32, max_weight: u32, data: MaassData) -> Result<Self> {
        let forms = Forms::new(window)?;
        let mut kernels = BTreeMap::new();
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            kernels.insert((a, b), blowup_kernel(&forms, a, b, mu_degree)?);
        }
        let theta4_9 = forms.theta4.pow(9)?;
        let u_pows = powers(&forms.u, max_weight + 2)?;
        let h_inv_pows = powers(&forms.h_inv, 2 * max_weight + mu_degree + 6)?;
        let e2_pows = powers(&forms.e2, max_weight)?;
        let t_pows = powers(&forms.t, mu_degree / 2 + 1)?;
        Ok(Engine {
            forms,
            data,
            mu_degree,
            kernels,
            theta4_9,
            u_pows,
            h_inv_pows,
            e2_pows,
            t_pows,
        })
    }

    pub fn forms(&self) -> &Forms {
        &self.forms
    }

    pub fn data(&self) -> &MaassData {
        &self.data
    }

    pub fn precision(&self) -> i64 {
        self.forms.precision()
    }

    pub fn mu_degree(&self) -> u32 {
        self.mu_degree
    }

    pub fn kernel(&self, a: u8, b: u8) -> Result<&MuPoly> {
        self.kernels
            .get(&(a, b))
            .ok_or_else(|| Error::InvalidSetup(format!("characteristic ({a},{b}) must be 0 or 1")))
    }

    pub fn u_pow(&self, k: u32) -> Result<PuiseuxSeries> {
        cached_pow(&self.u_pows, &self.forms.u, k)
    }

    pub fn h_inv_pow(&self, k: u32) -> Result<PuiseuxSeries> {
        cached_pow(&self.h_inv_pows, &self.forms.h_inv, k)
    }

    pub fn t_pow(&self, k: u32) -> Result<PuiseuxSeries> {
        cached_pow(&self.t_pows, &self.forms.t, k)
    }

    fn e2_pow(&self, k: u32) -> Result<PuiseuxSeries> {
        cached_pow(&self.e2_pows, &self.forms.e2, k)
    }

    /// `R^ab_mnk = (-1)^(k+ab+1) (2n-ab+1)!/(k!(n-k)!) 2^(m-3k-ab-1)/3^n
    /// theta4 u^(m+n-k) / (h^(3+2k-ab) f2)`.
    ///
    /// `1/f2 = theta4^8/h`, so the series part is `theta4^9 u^(m+n-k) h^-(4+2k-ab)`.
    pub fn r_factor(&self, a: u8, b: u8, m: u32, n: u32, k: u32) -> Result<PuiseuxSeries> {
        if k > n || a > 1 || b > 1 {
            return Err(Error::InvalidSetup(format!(
                "R factor needs 0 <= k <= n and a,b in {{0,1}}; got a={a} b={b} n={n} k={k}"
            )));
        }
        let ab = (a * b) as i64;
        let (m_, n_, k_) = (m as i64, n as i64, k as i64);
        let mut c = Rational::new(
            BigInt::from(sign_pow(k_ + ab + 1)) * factorial((2 * n_ - ab + 1) as u32),
            factorial(k) * factorial(n - k) * BigInt::from(3).pow(n),
        );
        let two_pow = m_ - 3 * k_ - ab - 1;
        let two = BigInt::from(2).pow(two_pow.unsigned_abs() as u32);
        c = if two_pow >= 0 {
            c * Rational::from_integer(two)
        } else {
            c / Rational::from_integer(two)
        };
        let s = self
            .theta4_9
            .checked_mul(&self.u_pow(m + n - k)?)?
            .checked_mul(&self.h_inv_pow((4 + 2 * k_ - ab) as u32)?)?;
        Ok(s.scale(&c))
    }

    /// `E^k[Q] = sum_j ek_weight(k, ab, j) E2^(k-j) (q d/dq)^j Q`.
    pub fn ek_bracket<C: Coeff>(&self, k: u32, ab: u8, q: &PuiseuxSeries<C>) -> Result<PuiseuxSeries<C>> {
        let mut total: Option<PuiseuxSeries<C>> = None;
        let mut dq = q.clone();
        for j in 0..=k {
            if j > 0 {
                dq = dq.q_derive();
            }
            let term = dq.mul_rational(&self.e2_pow(k - j)?)?.scale(&ek_weight(k, ab, j));
            total = Some(match total {
                Some(t) => t.checked_add(&term)?,
                None => term,
            });
        }
        Ok(total.expect("k >= 0 gives at least one term"))
    }

    /// `sum_k [R^ab_mnk * extra * E^k[Q_ab]]_{q^0}` with `extra = 1` for
    /// `D` and a kernel coefficient for `Dhat`.
    ///
    /// The bracket is linear in `Q`, so only the last product involves the
    /// coefficient ring, and `Q` is built exactly to the window that the
    /// constant term can see.
    fn bracket<C: Coeff>(&self, a: u8, b: u8, m: u32, n: u32, extra: Option<&PuiseuxSeries>) -> Result<C> {
        let ab = a * b;
        let family = MaassFamily::from_ab(a, b)?;
        let mut parts = Vec::with_capacity(n as usize + 1);
        for k in 0..=n {
            let r = self.r_factor(a, b, m, n, k)?;
            let mult = match extra {
                Some(x) => r.checked_mul(x)?,
                None => r,
            };
            if !mult.is_zero() {
                parts.push((k, mult));
            }
        }
        if parts.is_empty() {
            return Ok(C::zero_value());
        }
        let min_val = parts.iter().map(|(_, s)| s.valuation()).min().unwrap_or(0);
        let need = (1 - min_val).max(family.leading_exponent() + 1);
        let q: PuiseuxSeries<C> = q_plus(family, need, &self.data)?;

        let mut derivs = vec![q];
        let mut total = C::zero_value();
        for (k, mult) in &parts {
            while derivs.len() <= *k as usize {
                let next = derivs.last().expect("non-empty").q_derive();
                derivs.push(next);
            }
            for j in 0..=*k {
                let outer = mult.checked_mul(&self.e2_pow(k - j)?)?;
                let ct = derivs[j as usize].constant_term_of_product(&outer)?;
                total.accumulate(&ct.scaled(&ek_weight(*k, ab, j)));
            }
        }
        Ok(total)
    }

    /// `D^ab_mn`.
    pub fn d_coeff<C: Coeff>(&self, a: u8, b: u8, m: u32, n: u32) -> Result<C> {
        self.bracket(a, b, m, n, None)
    }

    /// Coefficient of `mu^t` in `Dhat^ab_mn`.
    pub fn dhat_coeff<C: Coeff>(&self, a: u8, b: u8, m: u32, n: u32, t: u32) -> Result<C> {
        if t > self.mu_degree {
            return Err(Error::InvalidSetup(format!(
                "mu^{t} requested but kernels were built to mu^{}",
                self.mu_degree
            )));
        }
        match self.kernel(a, b)?.get(t) {
            Some(k) if !k.is_zero() => self.bracket(a, b, m, n, Some(k)),
            _ => Ok(C::zero_value()),
        }
    }

    /// `Dhat^ab_mn` as coefficients of `mu^0 ..= mu^mu_degree`.
    pub fn dhat_poly<C: Coeff>(&self, a: u8, b: u8, m: u32, n: u32) -> Result<Vec<C>> {
        (0..=self.mu_degree).map(|t| self.dhat_coeff(a, b, m, n, t)).collect()
    }
}

/// Coefficient of `kf^i kg^j` in `(kf + kg)^e (kg - kf)^t`.
pub fn spin_monomial_weight(e: u32, t: u32, i: u32, j: u32) -> BigInt {
    if e + t != i + j {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(0);
    for x in 0..=e.min(i) {
        let y = i - x;
        if y > t {
            continue;
        }
        acc += binomial(e, x) * binomial(t, y) * BigInt::from(sign_pow(y as i64));
    }
    acc
}

/// One term `(a, b, n, t)` of the CP1 x CP1 spin sum for a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct SpinTerm {
    a: u8,
    b: u8,
    n: u32,
    t: u32,
}

fn spin_terms(degree: u32) -> Vec<(SpinTerm, u32)> {
    let mut out = Vec::new();
    for (a, b) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
        let ab = (a * b) as u32;
        for n in 0..=degree {
            let e = 2 * n + 1 - ab;
            if e > degree {
                continue;
            }
            out.push((SpinTerm { a, b, n, t: degree - e }, e));
        }
    }
    out
}

/// Cells of a table request, in key order.
fn table_keys(setup: &LatticeSetup, req: &TableRequest) -> Vec<Vec<u32>> {
    let ab = (setup.a * setup.b) as u32;
    let mut keys = Vec::new();
    for m in 0..=req.max_p {
        match setup.target {
            Target::Cp2 | Target::Cp2Hat => {
                let mut n = 0;
                while 2 * n < req.max_kappa + ab {
                    if setup.target == Target::Cp2 {
                        keys.push(vec![m, n]);
                    } else {
                        for t in 0..=req.mu_degree {
                            keys.push(vec![m, n, t]);
                        }
                    }
                    n += 1;
                }
            }
            Target::P1xP1 => {
                for d in 0..=req.max_kappa {
                    for i in 0..=d {
                        keys.push(vec![m, i, d - i]);
                    }
                }
            }
        }
    }
    keys
}

/// Window used for a whole table: the largest plan over its cells.
pub fn table_precision(setup: &LatticeSetup, req: &TableRequest) -> i64 {
    if let Some(p) = req.precision {
        return p;
    }
    let (max_n, mu) = match setup.target {
        Target::Cp2 => (req.max_kappa.div_ceil(2), 0),
        Target::Cp2Hat => (req.max_kappa.div_ceil(2), req.mu_degree),
        Target::P1xP1 => (req.max_kappa.div_ceil(2), req.max_kappa),
    };
    precision_plan(setup, req.max_p, max_n, mu)
}

/// Engine sized for a table request.
pub fn engine_for(setup: &LatticeSetup, req: &TableRequest, data: MaassData) -> Result<Engine> {
    let mu = match setup.target {
        Target::Cp2 => 0,
        Target::Cp2Hat => req.mu_degree,
        Target::P1xP1 => req.max_kappa,
    };
    let max_weight = req.max_p + req.max_kappa.div_ceil(2);
    Engine::new(table_precision(setup, req), mu, max_weight, data)
}

fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// CP1 x CP1 coefficient of `p^m kf^i kg^j` from precomputed `Dhat` values.
fn p1xp1_entry<C: Coeff>(group: Group, m: u32, i: u32, j: u32, dhat: &BTreeMap<(SpinTerm, u32), C>) -> C {
    let mut total = C::zero_value();
    for (term, e) in spin_terms(i + j) {
        let w = spin_monomial_weight(e, term.t, i, j);
        if w == BigInt::from(0) {
            continue;
        }
        let Some(v) = dhat.get(&(term, m)) else { continue };
        let scale = Rational::new(
            BigInt::from(group.spin_sign(term.a, term.b)) * w,
            BigInt::from(2) * factorial(m) * factorial(e),
        );
        total.accumulate(&v.scaled(&scale));
    }
    total
}

/// Coefficient of `p^m kf^i kg^j` in the CP1 x CP1 generating function at
/// `omega = F/2 + G`:
/// `1/2 sum_ab sign_ab p^m/m! kappa^e/e! Dhat^ab_mn(mu)` with `e = 2n-ab+1`,
/// `kappa = kf + kg`, `mu = kg - kf`.
pub fn p1xp1_coeff<C: Coeff>(engine: &Engine, group: Group, m: u32, i: u32, j: u32) -> Result<C> {
    let mut dhat = BTreeMap::new();
    for (term, e) in spin_terms(i + j) {
        if spin_monomial_weight(e, term.t, i, j) == BigInt::from(0) {
            continue;
        }
        let v: C = engine.dhat_coeff(term.a, term.b, m, term.n, term.t)?;
        dhat.insert((term, m), v);
    }
    Ok(p1xp1_entry(group, m, i, j, &dhat))
}

/// Builds the generating-function table of `setup` for `group`.
///
/// Cells are computed in parallel and merged in key order, so the output does
/// not depend on the number of worker threads.
pub fn z_table<C: Coeff>(
    engine: &Engine,
    setup: &LatticeSetup,
    group: Group,
    req: &TableRequest,
) -> Result<InvariantTable<C>> {
    let keys = table_keys(setup, req);
    type Parts<C> = (Vec<&'static str>, &'static str, Vec<(Vec<u32>, C)>);
    let (index_names, convention, entries): Parts<C> = match setup.target {
        Target::Cp2 => {
            let vals = keys
                .par_iter()
                .map(|k| engine.d_coeff::<C>(setup.a, setup.b, k[0], k[1]))
                .collect();
            (
                vec!["m", "n"],
                "Z = sum p^m/m! kappa^(2n-ab+1)/(2n-ab+1)! D_mn",
                keys.into_iter().zip(first_error(vals)?).collect(),
            )
        }
        Target::Cp2Hat => {
            let vals = keys
                .par_iter()
                .map(|k| engine.dhat_coeff::<C>(setup.a, setup.b, k[0], k[1], k[2]))
                .collect();
            (
                vec!["m", "n", "t"],
                "Z = sum p^m/m! kappa^(2n-ab+1)/(2n-ab+1)! mu^t [mu^t]Dhat_mn",
                keys.into_iter().zip(first_error(vals)?).collect(),
            )
        }
        Target::P1xP1 => {
            let mut needed: BTreeSet<(SpinTerm, u32)> = BTreeSet::new();
            for k in &keys {
                for (term, e) in spin_terms(k[1] + k[2]) {
                    if spin_monomial_weight(e, term.t, k[1], k[2]) != BigInt::from(0) {
                        needed.insert((term, k[0]));
                    }
                }
            }
            let needed: Vec<(SpinTerm, u32)> = needed.into_iter().collect();
            let vals = needed
                .par_iter()
                .map(|(s, m)| engine.dhat_coeff::<C>(s.a, s.b, *m, s.n, s.t))
                .collect();
            let dhat: BTreeMap<(SpinTerm, u32), C> = needed.into_iter().zip(first_error(vals)?).collect();
            let entries = keys
                .into_iter()
                .map(|k| {
                    let v = p1xp1_entry(group, k[0], k[1], k[2], &dhat);
                    (k, v)
                })
                .collect();
            (
                vec!["m", "i", "j"],
                "Z = sum c_mij p^m kf^i kg^j with S = kf f + 2 kg g",
                entries,
            )
        }
    };
    Ok(InvariantTable {
        setup: *setup,
        group,
        index_names,
        convention,
        precision: engine.precision(),
        entries: entries.into_iter().collect(),
    })
}
