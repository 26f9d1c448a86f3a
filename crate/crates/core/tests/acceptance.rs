//! The eight acceptance criteria, one pass/fail line each.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use uplane::chambers::{chamber_difference, enumerate_walls, wall_budget, wc_term_parts, z_limiting, ChamberSpec};
use uplane::engine::{engine_for, table_precision, z_table, Engine, Group, LatticeSetup, TableRequest, Target};
use uplane::forms::{blowup_kernel, express_in_u, Forms};
use uplane::maass::{hurwitz, mock_theta_m, q_plus, MaassData, MaassFamily};
use uplane::qseries::rational::{int, rat};
use uplane::qseries::{LinearForm, PuiseuxSeries, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_table() -> Outcome {
    let e = Engine::new(40, 0, 4, MaassData::default()).map_err(|e| e.to_string())?;
    let rows = [(0, 0), (0, 2), (1, 1), (2, 0)];
    let d11 = [int(1), rat(3, 16), rat(5, 16), rat(19, 16)];
    let d01 = [rat(-3, 2), int(1), int(-1), rat(-13, 8)];
    let s11 = [
        "1/4*H1-6*H0",
        "49/64*H2-9/4*H1+2133/64*H0",
        "7/64*H2-1/4*H1+195/64*H0",
        "1/64*H2+1/4*H1-411/64*H0",
    ];
    let s01 = [
        "-1/2*R1+13*R0",
        "-2*R2+7*R1-30*R0",
        "-1/4*R2+1/2*R1+6*R0",
        "-1/32*R2-7/16*R1+55/4*R0",
    ];
    for (idx, &(m, n)) in rows.iter().enumerate() {
        for (a, num, sym) in [(1u8, &d11[idx], s11[idx]), (0, &d01[idx], s01[idx])] {
            let v: Rational = e.d_coeff(a, 1, m, n).map_err(|e| e.to_string())?;
            ensure(&v == num, || format!("D{a}1({m},{n}) = {v}"))?;
            let f: LinearForm = e.d_coeff(a, 1, m, n).map_err(|e| e.to_string())?;
            ensure(f.to_string() == sym, || format!("D{a}1({m},{n}) = {f}"))?;
        }
    }
    Ok("8 numeric and 8 symbolic entries".into())
}

fn maass_data() -> Outcome {
    let table = [
        (0, rat(-1, 12)),
        (3, rat(1, 3)),
        (4, rat(1, 2)),
        (7, int(1)),
        (8, int(1)),
        (11, int(1)),
        (12, rat(4, 3)),
    ];
    for (n, want) in &table {
        ensure(&hurwitz(*n) == want, || format!("H({n}) = {}", hurwitz(*n)))?;
    }
    let q = q_plus::<Rational>(MaassFamily::Q11, 16, &MaassData::default()).map_err(|e| e.to_string())?;
    let want = PuiseuxSeries::from_integer_terms([(-1, 1), (3, 28), (7, 39), (11, 196), (15, 161)], 16);
    ensure(q == want && q.precision() == 16, || format!("Q11+ = {q}"))?;
    let m = mock_theta_m(24).map_err(|e| e.to_string())?;
    let want = PuiseuxSeries::from_integer_terms([(7, -1), (15, 2), (23, -3)], 24);
    ensure(m == want, || format!("M = {m}"))?;
    Ok("7 class numbers, Q11+ through q^2, M(q^8)".into())
}

fn u_poly(f: &Forms, c: &[Rational]) -> PuiseuxSeries {
    let mut acc = PuiseuxSeries::zero(f.precision());
    for (i, ci) in c.iter().enumerate() {
        acc = acc.checked_add(&f.u.pow(i as u32).unwrap().scale(ci)).unwrap();
    }
    acc
}

fn blowup_kernels() -> Outcome {
    let f = Forms::new(40).map_err(|e| e.to_string())?;
    let ws: Vec<(u32, Vec<Rational>)> = vec![
        (1, vec![int(1)]),
        (3, vec![int(0), rat(-1, 3)]),
        (5, vec![rat(2, 120), int(0), rat(4, 120)]),
        (7, vec![int(0), rat(-12, 5040), int(0), rat(-8, 5040)]),
    ];
    let ws3: Vec<(u32, Vec<Rational>)> = vec![
        (0, vec![int(1)]),
        (4, vec![rat(-2, 24)]),
        (6, vec![int(0), rat(16, 720)]),
        (8, vec![rat(-4, 40320), int(0), rat(-128, 40320)]),
    ];
    let mut sign = None;
    for (a, deg, expect) in [(1u8, 7u32, ws), (0, 8, ws3)] {
        let k = blowup_kernel(&f, a, 1, deg).map_err(|e| e.to_string())?;
        for t in 0..=deg {
            let got = k.get(t).cloned().unwrap_or_else(|| PuiseuxSeries::zero(f.precision()));
            ensure(got.precision() >= 32, || format!("window {}", got.precision()))?;
            let want = expect
                .iter()
                .find(|(e, _)| *e == t)
                .map(|(_, c)| u_poly(&f, c))
                .unwrap_or_else(|| PuiseuxSeries::zero(f.precision()));
            let s = if a == 1 {
                *sign.get_or_insert(if got.agrees_with(&want) { 1 } else { -1 })
            } else {
                1
            };
            ensure(got.agrees_with(&want.scale(&int(s))), || format!("K{a}1 mu^{t}"))?;
            ensure(
                express_in_u(&f, &got, t / 2).map_err(|e| e.to_string())?.is_some(),
                || format!("K{a}1 mu^{t} not in Q[u]"),
            )?;
        }
    }
    Ok(format!("sign of K11 is {:+}", sign.unwrap_or(1)))
}

fn blowup_relations() -> Outcome {
    let e = Engine::new(48, 6, 6, MaassData::default()).map_err(|e| e.to_string())?;
    let mut global: Option<Rational> = None;
    let err = |e: uplane::Error| e.to_string();
    for m in 0..=4u32 {
        for n in 0..=4 - m {
            let d11 = |mm| e.d_coeff::<LinearForm>(1, 1, mm, n);
            let d01 = |mm| e.d_coeff::<LinearForm>(0, 1, mm, n);
            let h11 = |t| e.dhat_coeff::<LinearForm>(1, 1, m, n, t);
            let h01 = |t| e.dhat_coeff::<LinearForm>(0, 1, m, n, t);
            let base = d11(m).map_err(err)?;
            let s = global
                .get_or_insert_with(|| {
                    if h11(1).map(|h| h == base).unwrap_or(false) {
                        int(1)
                    } else {
                        int(-1)
                    }
                })
                .clone();
            let checks = [
                (h11(1).map_err(err)?, base.scale(&s)),
                (h11(3).map_err(err)?, d11(m + 1).map_err(err)?.scale(&(-&s / int(6)))),
                (
                    h11(5).map_err(err)?,
                    d11(m + 2)
                        .map_err(err)?
                        .add(&base.scale(&int(2)))
                        .scale(&(&s / int(120))),
                ),
                (h01(0).map_err(err)?, d01(m).map_err(err)?),
                (h01(4).map_err(err)?, d01(m).map_err(err)?.scale(&rat(-2, 24))),
                (h01(6).map_err(err)?, d01(m + 1).map_err(err)?.scale(&rat(8, 720))),
            ];
            for (i, (lhs, rhs)) in checks.iter().enumerate() {
                ensure(lhs == rhs, || format!("relation {i} at ({m},{n}): {lhs} vs {rhs}"))?;
            }
        }
    }
    Ok(format!("15 cells, global sign {}", global.unwrap_or(int(1))))
}

fn wall_engine() -> Result<Engine, String> {
    let req = TableRequest {
        max_p: 2,
        max_kappa: 6,
        mu_degree: 6,
        precision: None,
    };
    engine_for(&LatticeSetup::p1xp1(), &req, MaassData::default()).map_err(|e| e.to_string())
}

fn wall_crossing() -> Outcome {
    let e = wall_engine()?;
    let mut cells = 0;
    let mut terms = 0;
    for m in 0..=2 {
        for d in 0..=6u32 {
            for w in enumerate_walls(
                &ChamberSpec::half_f_plus_g(),
                &ChamberSpec::f_plus(),
                (0, 0),
                &wall_budget(m, d),
            ) {
                for i in 0..=d {
                    let p = wc_term_parts(&e, &w, (0, 0), m, i, d - i).map_err(|e| e.to_string())?;
                    ensure(p.imaginary == int(0), || format!("imaginary residue at {w}"))?;
                    terms += 1;
                }
            }
            for i in 0..=d {
                let diff = chamber_difference(&e, Group::Su2, m, i, d - i).map_err(|e| e.to_string())?;
                ensure(diff.holds(), || format!("({m},{i},{}): {diff:?}", d - i))?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells, {terms} wall terms real"))
}

fn vanishing() -> Outcome {
    let e = wall_engine()?;
    let grid: Vec<(u8, u32, u32, u32)> = (0..20)
        .map(|k| ((k % 2) as u8, (k / 10) as u32, (k % 5) as u32, (k % 7) as u32))
        .collect();
    for &(rho_f, m, i, j) in &grid {
        let v = z_limiting(&e, rho_f, 1, m, i, j).map_err(|e| e.to_string())?;
        ensure(v == int(0), || format!("({rho_f},1) ({m},{i},{j}) = {v}"))?;
    }
    Ok(format!("{} points", grid.len()))
}

fn identities() -> Outcome {
    let f = Forms::new(208).map_err(|e| e.to_string())?;
    let jac = f
        .theta3
        .pow(4)
        .unwrap()
        .checked_sub(&f.theta2.pow(4).unwrap().checked_add(&f.theta4.pow(4).unwrap()).unwrap())
        .unwrap();
    ensure(jac.is_zero() && jac.precision() >= 200, || "Jacobi identity".into())?;
    let eta = f
        .theta2
        .checked_mul(&f.theta3)
        .unwrap()
        .checked_mul(&f.theta4)
        .unwrap()
        .checked_sub(&f.eta3.scale(&int(2)))
        .unwrap();
    ensure(eta.is_zero() && eta.precision() >= 200, || "2 eta^3".into())?;
    for n in 1..=25i64 {
        let sigma: i64 = (1..=n).filter(|d| n % d == 0).sum();
        ensure(f.e2.coeff(8 * n).ok() == Some(int(-24 * sigma)), || {
            format!("E2 at q^{n}")
        })?;
    }
    Ok(format!("window {}", jac.precision().min(eta.precision())))
}

fn stability() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut checked = 0;
    for target in [Target::Cp2, Target::Cp2Hat, Target::P1xP1] {
        for group in [Group::So3, Group::Su2] {
            let setup = LatticeSetup::for_target(target, group);
            let mut req = TableRequest {
                max_p: 3,
                max_kappa: 5,
                mu_degree: 5,
                precision: None,
            };
            let build = |req: &TableRequest| {
                let e = engine_for(&setup, req, MaassData::default()).map_err(|e| e.to_string())?;
                z_table::<LinearForm>(&e, &setup, group, req).map_err(|e| e.to_string())
            };
            let base = build(&req)?;
            req.precision = Some(table_precision(&setup, &req) + 8);
            let wide = build(&req)?;
            let mut keys: Vec<&Vec<u32>> = base.entries.keys().collect();
            keys.shuffle(&mut rng);
            for k in keys.into_iter().take(10) {
                ensure(base.entries[k] == wide.entries[k], || format!("{target} {group} {k:?}"))?;
                checked += 1;
            }
        }
    }
    ensure(checked >= 50, || format!("only {checked} cells"))?;
    Ok(format!("{checked} cells"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("golden table", golden_table, Some(10)),
        ("Maass data", maass_data, None),
        ("blowup kernels", blowup_kernels, None),
        ("blowup relations", blowup_relations, Some(60)),
        ("wall-crossing SU(2)", wall_crossing, Some(120)),
        ("vanishing branch", vanishing, None),
        ("identity suite", identities, None),
        ("stability", stability, None),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let took = start.elapsed();
        if let (Ok(_), Some(s)) = (&outcome, limit) {
            if took > Duration::from_secs(*s) {
                outcome = Err(format!("took {took:.1?}, limit {s}s"));
            }
        }
        match &outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({took:.2?})", i + 1),
            Err(e) => {
                println!("FAIL [{}] {name}: {e} ({took:.2?})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
