//! Invariant suites run by `uplane check`.

use std::fmt;

use clap::ValueEnum;
use num_traits::Zero;
use serde::Serialize;

use crate::chambers::{chamber_difference, ChamberDifference, WallVector};
use crate::engine::{engine_for, precision_plan, Engine, Group, LatticeSetup, TableRequest};
use crate::error::Result;
use crate::forms::{express_in_u, Forms};
use crate::maass::{hurwitz, mock_theta_m, q_plus, MaassData, MaassFamily};
use crate::qseries::rational::{format_rational, int, rat};
use crate::qseries::{LinearForm, PuiseuxSeries, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Maass,
    Blowup,
    Tables,
    Wallcross,
    All,
}

impl Suite {
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Identities,
                Suite::Maass,
                Suite::Blowup,
                Suite::Tables,
                Suite::Wallcross,
            ],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_possible_value().expect("no skipped variants");
        f.write_str(s.get_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Case {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Case {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((ok, detail)) => Case::new(name, ok, detail),
            Err(e) => Case::new(name, false, e.to_string()),
        }
    }
}

/// One evaluated wall term, as exported to CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallRow {
    pub group: String,
    pub m: u32,
    pub i: u32,
    pub j: u32,
    pub kind: &'static str,
    pub m1: i64,
    pub m2: i64,
    pub lambda_f: String,
    pub lambda_g: String,
    pub lambda_sq: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: Vec<Case>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub walls: Vec<WallRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Case> {
        self.cases.iter().find(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub so3: bool,
    pub data: MaassData,
}

pub fn run_suite(suite: Suite, opts: &CheckOptions) -> SuiteReport {
    let mut report = SuiteReport {
        suite,
        cases: Vec::new(),
        notes: Vec::new(),
        walls: Vec::new(),
    };
    match suite {
        Suite::Identities => identities(&mut report),
        Suite::Maass => maass(&mut report),
        Suite::Blowup => blowup(&mut report),
        Suite::Tables => tables(&mut report),
        Suite::Wallcross => wallcross(&mut report, opts),
        Suite::All => {
            for s in Suite::All.expand() {
                let sub = run_suite(s, opts);
                report.cases.extend(sub.cases);
                report.notes.extend(sub.notes);
                report.walls.extend(sub.walls);
            }
        }
    }
    report
}

/// Window of the identity suite, in `q^(1/8)` steps.
pub const IDENTITY_WINDOW: i64 = 208;

fn identities(report: &mut SuiteReport) {
    let forms = match Forms::new(IDENTITY_WINDOW) {
        Ok(f) => f,
        Err(e) => {
            report.cases.push(Case::new("forms", false, e.to_string()));
            return;
        }
    };
    report.cases.push(Case::from_result(
        "theta3^4 = theta2^4 + theta4^4",
        (|| {
            let lhs = forms.theta3.pow(4)?;
            let rhs = forms.theta2.pow(4)?.checked_add(&forms.theta4.pow(4)?)?;
            let diff = lhs.checked_sub(&rhs)?;
            Ok((diff.is_zero(), format!("window {}", diff.precision())))
        })(),
    ));
    report.cases.push(Case::from_result(
        "2 eta^3 = theta2 theta3 theta4",
        (|| {
            let lhs = forms.eta3.scale(&int(2));
            let rhs = forms.theta2.checked_mul(&forms.theta3)?.checked_mul(&forms.theta4)?;
            let diff = lhs.checked_sub(&rhs)?;
            Ok((diff.is_zero(), format!("window {}", diff.precision())))
        })(),
    ));
    report.cases.push(Case::from_result(
        "E2 = 1 - 24 sum sigma(n) q^n",
        (|| {
            for n in 1..=25i64 {
                let sigma: i64 = (1..=n).filter(|d| n % d == 0).sum();
                let got = forms.e2.coeff(8 * n)?;
                if got != int(-24 * sigma) {
                    return Ok((false, format!("q^{n}: got {got}, expected {}", -24 * sigma)));
                }
            }
            Ok((forms.e2.coeff(0)? == int(1), "through q^25".to_string()))
        })(),
    ));
}

/// The published class numbers `H(n)` for `n in {0, 3, 4, 7, 8, 11, 12}`.
pub fn hurwitz_reference() -> Vec<(u64, Rational)> {
    vec![
        (0, rat(-1, 12)),
        (3, rat(1, 3)),
        (4, rat(1, 2)),
        (7, int(1)),
        (8, int(1)),
        (11, int(1)),
        (12, rat(4, 3)),
    ]
}

fn maass(report: &mut SuiteReport) {
    for (n, want) in hurwitz_reference() {
        let got = hurwitz(n);
        report.cases.push(Case::new(
            format!("H({n})"),
            got == want,
            format!("got {}", format_rational(&got)),
        ));
    }
    report.cases.push(Case::from_result(
        "Q11+ through q^2",
        (|| {
            let q = q_plus::<Rational>(MaassFamily::Q11, 16, &MaassData::default())?;
            let r = q.render_pairs();
            Ok((r == "-1/8:1 3/8:28 7/8:39 11/8:196 15/8:161", r))
        })(),
    ));
    report.cases.push(Case::from_result(
        "M(q^8) = -q^7 + 2q^15 - 3q^23",
        (|| {
            let m = mock_theta_m(24)?;
            let r = m.render_pairs();
            Ok((r == "7/8:-1 15/8:2 23/8:-3", r))
        })(),
    ));
}

/// Window used for the kernel checks.
pub const KERNEL_WINDOW: i64 = 40;

/// `sum_i c_i u^i` on the window of `forms`.
fn u_polynomial(forms: &Forms, coeffs: &[Rational]) -> Result<PuiseuxSeries> {
    let mut total = PuiseuxSeries::zero(forms.precision());
    let mut power = PuiseuxSeries::one();
    for (i, c) in coeffs.iter().enumerate() {
        if i > 0 {
            power = power.checked_mul(&forms.u)?;
        }
        total = total.checked_add(&power.scale(c))?;
    }
    Ok(total)
}

/// Published `mu`-expansions of the kernels as polynomials in `u`, indexed by
/// the power of `mu`.
pub fn kernel_reference(a: u8, b: u8) -> Vec<(u32, Vec<Rational>)> {
    match (a, b) {
        (1, 1) => vec![
            (0, vec![]),
            (1, vec![int(1)]),
            (2, vec![]),
            (3, vec![int(0), rat(-2, 6)]),
            (4, vec![]),
            (5, vec![rat(2, 120), int(0), rat(4, 120)]),
            (6, vec![]),
            (7, vec![int(0), rat(-12, 5040), int(0), rat(-8, 5040)]),
        ],
        _ => vec![
            (0, vec![int(1)]),
            (1, vec![]),
            (2, vec![]),
            (3, vec![]),
            (4, vec![rat(-2, 24)]),
            (5, vec![]),
            (6, vec![int(0), rat(16, 720)]),
            (7, vec![]),
            (8, vec![rat(-4, 40320), int(0), rat(-128, 40320)]),
        ],
    }
}

/// Engine for the blowup relations with `m + n <= max_weight`.
pub fn blowup_engine(max_weight: u32, data: MaassData) -> Result<Engine> {
    let mut window = 0;
    for m in 0..=max_weight {
        for n in 0..=max_weight - m {
            window = window
                .max(precision_plan(&LatticeSetup::cp2(Group::So3), m + 2, n, 0))
                .max(precision_plan(&LatticeSetup::cp2hat(Group::So3), m, n, 6));
        }
    }
    Engine::new(window, 6, max_weight + 2, data)
}

/// Checks the blowup relations for one `(m, n)` over linear forms in the
/// tabulated coefficients. Returns the first failing relation.
pub fn blowup_relations(engine: &Engine, m: u32, n: u32) -> Result<Option<String>> {
    let d = |a: u8, mm: u32| engine.d_coeff::<LinearForm>(a, 1, mm, n);
    let dh = |a: u8, t: u32| engine.dhat_coeff::<LinearForm>(a, 1, m, n, t);
    let scaled = |f: LinearForm, num: i64, den: i64| f.scale(&rat(num, den));
    let checks = [
        ("[mu^1] Dhat11", dh(1, 1)?, d(1, m)?),
        ("[mu^3] Dhat11", dh(1, 3)?, scaled(d(1, m + 1)?, -1, 6)),
        (
            "[mu^5] Dhat11",
            dh(1, 5)?,
            scaled(d(1, m + 2)?.add(&scaled(d(1, m)?, 2, 1)), 1, 120),
        ),
        ("[mu^0] Dhat01", dh(0, 0)?, d(0, m)?),
        ("[mu^4] Dhat01", dh(0, 4)?, scaled(d(0, m)?, -2, 24)),
        ("[mu^6] Dhat01", dh(0, 6)?, scaled(d(0, m + 1)?, 8, 720)),
    ];
    for (name, lhs, rhs) in checks {
        if lhs != rhs {
            return Ok(Some(format!("{name} at (m,n)=({m},{n}): {lhs} vs {rhs}")));
        }
    }
    Ok(None)
}

fn blowup(report: &mut SuiteReport) {
    let forms = match Forms::new(KERNEL_WINDOW) {
        Ok(f) => f,
        Err(e) => {
            report.cases.push(Case::new("forms", false, e.to_string()));
            return;
        }
    };
    for (a, b, deg) in [(1u8, 1u8, 9u32), (0, 1, 8)] {
        let name = format!("K{a}{b}");
        let kernel = match crate::forms::blowup_kernel(&forms, a, b, deg) {
            Ok(k) => k,
            Err(e) => {
                report.cases.push(Case::new(name, false, e.to_string()));
                continue;
            }
        };
        for (k, coeffs) in kernel_reference(a, b) {
            report.cases.push(Case::from_result(
                format!("{name} mu^{k} series"),
                (|| {
                    let want = u_polynomial(&forms, &coeffs)?;
                    let got = kernel
                        .get(k)
                        .cloned()
                        .unwrap_or_else(|| PuiseuxSeries::zero(forms.precision()));
                    Ok((
                        got.agrees_with(&want),
                        format!("window {}", got.precision().min(want.precision())),
                    ))
                })(),
            ));
        }
        for k in 0..=deg {
            report.cases.push(Case::from_result(
                format!("{name} mu^{k} in Q[u]"),
                (|| {
                    let Some(s) = kernel.get(k) else {
                        return Ok((true, "zero".to_string()));
                    };
                    let poly = express_in_u(&forms, s, k / 2)?;
                    Ok((
                        poly.is_some(),
                        poly.map_or("residual".to_string(), |p| render_u_poly(&p)),
                    ))
                })(),
            ));
        }
        if a == 1 {
            if let Some(s) = kernel.get(9) {
                if !s.is_zero() {
                    report.notes.push(format!(
                        "K11 has a non-zero mu^9 coefficient {}",
                        express_in_u(&forms, s, 4)
                            .ok()
                            .flatten()
                            .map_or("?".to_string(), |p| render_u_poly(&p))
                    ));
                }
            }
        }
    }
    let weight = 4;
    let engine = match blowup_engine(weight, MaassData::default()) {
        Ok(e) => e,
        Err(e) => {
            report.cases.push(Case::new("blowup engine", false, e.to_string()));
            return;
        }
    };
    for m in 0..=weight {
        for n in 0..=weight - m {
            report.cases.push(Case::from_result(
                format!("blowup relations (m,n)=({m},{n})"),
                (|| {
                    Ok(match blowup_relations(&engine, m, n)? {
                        None => (true, String::new()),
                        Some(msg) => (false, msg),
                    })
                })(),
            ));
        }
    }
}

fn render_u_poly(c: &[Rational]) -> String {
    let parts: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| match i {
            0 => format_rational(v),
            1 => format!("{}*u", format_rational(v)),
            _ => format!("{}*u^{i}", format_rational(v)),
        })
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// A published CP2 row `(m, n)` with numeric and symbolic values of `D^11`
/// and `D^01`.
pub type GoldenRow = ((u32, u32), [Rational; 2], [&'static str; 2]);

pub fn golden_table() -> Vec<GoldenRow> {
    vec![
        ((0, 0), [int(1), rat(-3, 2)], ["1/4*H1-6*H0", "-1/2*R1+13*R0"]),
        (
            (0, 2),
            [rat(3, 16), int(1)],
            ["49/64*H2-9/4*H1+2133/64*H0", "-2*R2+7*R1-30*R0"],
        ),
        (
            (1, 1),
            [rat(5, 16), int(-1)],
            ["7/64*H2-1/4*H1+195/64*H0", "-1/4*R2+1/2*R1+6*R0"],
        ),
        (
            (2, 0),
            [rat(19, 16), rat(-13, 8)],
            ["1/64*H2+1/4*H1-411/64*H0", "-1/32*R2-7/16*R1+55/4*R0"],
        ),
    ]
}

fn tables(report: &mut SuiteReport) {
    let engine = match Engine::new(40, 0, 4, MaassData::default()) {
        Ok(e) => e,
        Err(e) => {
            report.cases.push(Case::new("engine", false, e.to_string()));
            return;
        }
    };
    for ((m, n), nums, syms) in golden_table() {
        for (col, a) in [(0usize, 1u8), (1, 0)] {
            report.cases.push(Case::from_result(
                format!("D{a}1 ({m},{n}) numeric"),
                (|| {
                    let v: Rational = engine.d_coeff(a, 1, m, n)?;
                    Ok((v == nums[col], format_rational(&v)))
                })(),
            ));
            report.cases.push(Case::from_result(
                format!("D{a}1 ({m},{n}) symbolic"),
                (|| {
                    let v: LinearForm = engine.d_coeff(a, 1, m, n)?;
                    let s = v.to_string();
                    Ok((s == syms[col], s))
                })(),
            ));
        }
    }
}

/// Largest `p` power and `kappa` degree of the wall-crossing grid.
pub const WALL_GRID: (u32, u32) = (2, 6);

/// Engine sized for the wall-crossing grid.
pub fn wall_engine(data: MaassData) -> Result<Engine> {
    let req = TableRequest {
        max_p: WALL_GRID.0,
        max_kappa: WALL_GRID.1,
        mu_degree: WALL_GRID.1,
        precision: None,
    };
    engine_for(&LatticeSetup::p1xp1(), &req, data)
}

fn wall_rows(group: Group, m: u32, i: u32, j: u32, diff: &ChamberDifference) -> Vec<WallRow> {
    let row = |kind: &'static str, w: &WallVector, v: &Rational| WallRow {
        group: group.to_string(),
        m,
        i,
        j,
        kind,
        m1: w.m1,
        m2: w.m2,
        lambda_f: format_rational(&w.lambda_f()),
        lambda_g: format_rational(&w.lambda_g()),
        lambda_sq: format_rational(&w.lambda_sq()),
        value: format_rational(v),
    };
    diff.walls
        .iter()
        .map(|(w, v)| row("crossing", w, v))
        .chain(diff.boundary.iter().map(|(w, v)| row("boundary", w, v)))
        .collect()
}

fn wallcross(report: &mut SuiteReport, opts: &CheckOptions) {
    let engine = match wall_engine(opts.data.clone()) {
        Ok(e) => e,
        Err(e) => {
            report.cases.push(Case::new("engine", false, e.to_string()));
            return;
        }
    };
    let mut groups = vec![Group::Su2];
    if opts.so3 {
        groups.push(Group::So3);
    }
    for group in groups {
        let mut strict_failures = 0;
        for m in 0..=WALL_GRID.0 {
            for d in 0..=WALL_GRID.1 {
                for i in 0..=d {
                    let j = d - i;
                    let name = format!("{group} (m,i,j)=({m},{i},{j})");
                    match chamber_difference(&engine, group, m, i, j) {
                        Ok(diff) => {
                            let ok = match group {
                                Group::Su2 => diff.holds(),
                                Group::So3 => diff.holds_at_midpoint(),
                            };
                            if !diff.holds() {
                                strict_failures += 1;
                            }
                            let detail = format!(
                                "Z_half={} Z_F+={} walls={} boundary={}",
                                format_rational(&diff.z_half),
                                format_rational(&diff.z_fplus),
                                format_rational(&diff.wall_sum),
                                diff.boundary.len()
                            );
                            report.walls.extend(wall_rows(group, m, i, j, &diff));
                            report.cases.push(Case::new(name, ok, detail));
                        }
                        Err(e) => report.cases.push(Case::new(name, false, e.to_string())),
                    }
                }
            }
        }
        if group == Group::So3 {
            report.notes.push(format!(
                "so3: walls through F/2+G counted at half weight; {strict_failures} cells fail if they are resolved by the eps deformation instead"
            ));
        }
    }
}
