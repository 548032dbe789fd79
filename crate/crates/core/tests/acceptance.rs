//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use common::*;
use frobound::bounds::{
    bound_u0_minus_one, bound_u0_one, bound_u0_zero, exclusion_certificate, explicit_formula_identity, Bound,
};
use frobound::family::{
    family_coefficients, family_identity_check, family_product_check, family_threshold, quantum_numerator,
};
use frobound::optimizer::{minimal_degree_search, optimize, LpProblem, MAX_ROUNDS};
use frobound::{datasets, CosinePoly, Error, QField, Regime, ThetaSet, WeilPoly};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases: 100, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn linear(b: &Bound) -> Result<(QField, QField), String> {
    match b {
        Bound::Linear { slope, intercept } => Ok((slope.clone(), intercept.clone())),
        other => Err(format!("expected a linear bound, got {}", other)),
    }
}

fn ree_bound() -> Outcome {
    let f = CosinePoly::parse(&["1", "sqrt(3)", "7/6", "1/3*sqrt(3)", "1/6"]).map_err(e)?;
    ensure(f == datasets::polynomial("ree-q3-quartic").map_err(e)?, "built-in polynomial differs")?;
    let cert = bound_u0_one(&f, &ThetaSet::full(), 3).map_err(e)?;
    ensure(cert.psi_rinv == QField::ratio(41, 27), format!("psi(1/r) = {}", cert.psi_rinv))?;
    ensure(cert.psi_r == int(11), format!("psi(r) = {}", cert.psi_r))?;
    let (slope, intercept) = linear(&cert.bound)?;
    ensure(slope == QField::ratio(54, 41), format!("slope {}", slope))?;
    ensure(intercept == QField::ratio(338, 41), format!("intercept {}", intercept))?;
    // 54/41 (g - 15) + 28 expanded
    ensure(intercept == &QField::ratio(54, 41) * &int(-15) + int(28), "not 54/41 (g-15) + 28")?;
    ensure(cert.bound.max_points(15) == Some(BigInt::from(28)), "value at g = 15")?;
    cert.verify().map_err(e)?;
    Ok(format!("{}", cert.bound))
}

fn elliptic_bound() -> Outcome {
    let f = CosinePoly::parse(&["0", "7/10*sqrt(2)", "0", "1/2*sqrt(2)", "0", "1/5*sqrt(2)"]).map_err(e)?;
    ensure(f == datasets::polynomial("elliptic-q2-quintic").map_err(e)?, "built-in polynomial differs")?;
    let s = qf("1/2*sqrt(2)");
    let q = qf("1/4*sqrt(2)");
    let theta = ThetaSet::from_points(vec![-&s, -&q, int(0), q, s]).map_err(e)?;
    let cert = bound_u0_zero(&f, &theta, 2).map_err(e)?;
    ensure(cert.psi_rinv == int(1) && cert.psi_r == int(5), format!("psi = {}, {}", cert.psi_r, cert.psi_rinv))?;
    match &cert.bound {
        Bound::Constant { value, floor, .. } if *value == int(6) && *floor == BigInt::from(6) => {}
        other => return Err(format!("bound {}", other)),
    }
    ensure(cert.conditions.a && cert.conditions.b, "conditions (a), (b)")?;
    Ok(format!("{}", cert.bound))
}

fn decomposable_genus() -> Outcome {
    let f = CosinePoly::parse(&["-1", "-4/3", "7/9", "26/9", "16/9"]).map_err(e)?;
    ensure(f == datasets::polynomial("decomposable-q4").map_err(e)?, "built-in polynomial differs")?;
    let theta = ThetaSet::from_points(vec![int(0), QField::ratio(-3, 4), int(-1)]).map_err(e)?;
    ensure(f.psi(&QField::ratio(1, 2)).is_zero(), "psi(1/2) != 0")?;
    ensure(f.psi(&int(2)) == int(52), "psi(2) != 52")?;
    let cert = bound_u0_minus_one(&f, &theta, 4).map_err(e)?;
    ensure(cert.conditions.d == Some(true), "condition (d)")?;
    match &cert.bound {
        Bound::GenusCap { two_g_max, genus_max } if *two_g_max == int(52) && *genus_max == BigInt::from(26) => {}
        other => return Err(format!("bound {}", other)),
    }
    Ok(format!("{}", cert.bound))
}

fn exclusions() -> Outcome {
    let s2 = qf("sqrt(2)");
    let half = QField::ratio(1, 2);
    let x_34 = -&(&s2 * &half); // cos 3π/4
    let f2 = CosinePoly::from_power(
        &frobound::PowerPoly::new(vec![-half.clone(), int(1)])
            .map_err(e)?
            .mul(&frobound::PowerPoly::new(vec![-x_34.clone(), int(1)]).map_err(e)?),
    )
    .map_err(e)?;
    ensure(f2 == datasets::polynomial("exclusion-quadratic-q2").map_err(e)?, "built-in quadratic differs")?;
    let f2 = f2.normalize_u0().map_err(e)?;
    let ex = exclusion_certificate(&f2, 2, &half, &x_34, Regime::U0OneRelaxed).map_err(e)?;
    let (slope, intercept) = linear(&ex.base.bound)?;
    let expect_slope = (int(8) - &int(2) * &s2) / int(7);
    ensure(slope == expect_slope, format!("slope {}", slope))?;
    ensure(intercept == &(&expect_slope * &int(-1)) + &int(5), format!("intercept {}", intercept))?;
    ensure(ex.base.psi_rinv == &int(2) + &(&s2 * &half), format!("psi(1/r) = {}", ex.base.psi_rinv))?;
    ensure(ex.base.psi_r == &int(6) + &(&int(2) * &s2), format!("psi(r) = {}", ex.base.psi_r))?;
    let i = &ex.excluded;
    ensure(i.lo == x_34 && i.hi == half && !i.lo_closed && !i.hi_closed, format!("excluded {}", i))?;
    ex.base.verify().map_err(e)?;

    let cubic = CosinePoly::parse(&["1", "3*sqrt(2)", "0", "2*sqrt(2)"]).map_err(e)?;
    ensure(cubic == datasets::polynomial("exclusion-cubic-q2").map_err(e)?, "built-in cubic differs")?;
    let ex2 = exclusion_certificate(&cubic, 2, &x_34, &int(-1), Regime::U0OneRelaxed).map_err(e)?;
    let (slope, intercept) = linear(&ex2.base.bound)?;
    ensure(slope == half, format!("slope {}", slope))?;
    ensure(intercept == &(&half * &int(-1)) + &int(5), format!("intercept {}", intercept))?;
    ensure(ex2.base.psi_rinv == int(4) && ex2.base.psi_r == int(14), "cubic psi values")?;
    let j = &ex2.excluded;
    ensure(j.lo == int(-1) && j.hi == x_34 && j.lo_closed && !j.hi_closed, format!("excluded {}", j))?;
    ex2.base.verify().map_err(e)?;
    Ok(format!("{} | {}", ex.statement(), ex2.statement()))
}

fn identities() -> Outcome {
    let cases = [("x11-q4", "decomposable-q4"), ("genus3-q2", "elliptic-q2-quintic"), ("ree-q3", "ree-q3-quartic")];
    for (curve, poly) in cases {
        let w = datasets::curve(curve).map_err(e)?;
        let f = datasets::polynomial(poly).map_err(e)?;
        let rep = explicit_formula_identity(&f, &w).map_err(e)?;
        ensure(rep.lhs == rep.rhs, format!("{}: {} != {}", curve, rep.lhs, rep.rhs))?;
        let counts = w.point_counts(6);
        ensure(counts.as_slice() == newton_counts(&w, 6).as_slice(), format!("{}: counts disagree", curve))?;
    }
    let x11 = datasets::curve("x11-q4").map_err(e)?;
    ensure(x11.genus() == 26 && *x11.point_counts(1).get(1) == BigInt::from(55), "X(11) data")?;
    let g3 = datasets::curve("genus3-q2").map_err(e)?;
    let c = g3.point_counts(5);
    let six = BigInt::from(6);
    ensure(g3.genus() == 3 && [1, 3, 5].iter().all(|&m| *c.get(m) == six), "genus-3 data")?;
    let ree = datasets::curve("ree-q3").map_err(e)?;
    ensure(ree.genus() == 15 && ree.point_counts(4).as_slice().iter().all(|n| *n == BigInt::from(28)), "Ree data")?;

    // Every genus-3 product of elliptic factors over F_2 with N_1 = N_3 = N_5 = 6.
    let mut hits = Vec::new();
    for a in -2i64..=2 {
        for b in a..=2 {
            for d in b..=2 {
                let w = WeilPoly::new(2, vec![(a, 1), (b, 1), (d, 1)]).map_err(e)?;
                let c = w.point_counts(5);
                if [1, 3, 5].iter().all(|&m| *c.get(m) == six) {
                    hits.push((a, b, d));
                }
            }
        }
    }
    ensure(hits == vec![(-1, 2, 2)], format!("genus-3 search found {:?}", hits))?;
    Ok("three identities exact; N_1=55/g=26, N_1=N_3=N_5=6 (unique), N_1..N_4=28".into())
}

fn family() -> Outcome {
    let mut worst = 0.0f64;
    for m in 4..=32usize {
        ensure(family_identity_check(m).map_err(e)?, format!("identity fails at m = {}", m))?;
        let fam = family_coefficients(m).map_err(e)?;
        for n in 2..=m - 2 {
            let (a, b) = (fam.get(n).expect("in range"), fam.get(m - n).expect("in range"));
            ensure(a.exact == b.exact, format!("u_{} != u_{} at m = {}", n, m - n, m))?;
            ensure(!quantum_numerator(n as i64, m).is_zero_at_root(), format!("u_{} vanishes at m = {}", n, m))?;
        }
        for n in [0, 1, m as i64 - 1, m as i64] {
            ensure(quantum_numerator(n, m).is_zero_in_ring(), format!("window open at n = {}, m = {}", n, m))?;
        }
        let p = family_product_check(m, 50, m as u64).map_err(e)?;
        ensure(p.passed && p.samples == 50, format!("product form off by {:e} at m = {}", p.max_deviation, m))?;
        worst = worst.max(p.max_deviation);
    }
    let suzuki = family_threshold(4, 8).map_err(e)?;
    let ree = family_threshold(6, 3).map_err(e)?;
    ensure(suzuki.threshold == int(65) && suzuki.holds(), format!("m=4, q=8: {}", suzuki.threshold))?;
    ensure(ree.threshold == int(28) && ree.holds(), format!("m=6, q=3: {}", ree.threshold))?;
    let n_suzuki = datasets::curve("suzuki-q8").map_err(e)?.point_counts(1).get(1).clone();
    let n_ree = datasets::curve("ree-q3").map_err(e)?.point_counts(1).get(1).clone();
    ensure(n_suzuki == BigInt::from(65) && n_ree == BigInt::from(28), "Suzuki/Ree point counts")?;
    Ok(format!("m = 4..32 exact; product form max deviation {:.2e}; thresholds 65 and 28", worst))
}

fn optimizer() -> Outcome {
    let elliptic = datasets::theta_set("elliptic-q2").map_err(e)?;
    let p = LpProblem::new(2, elliptic.clone(), Regime::U0Zero, 5, 0).map_err(e)?;
    let a = optimize(&p, MAX_ROUNDS).map_err(e)?;
    ensure(a.objective == int(5), format!("u0_zero objective {}", a.objective))?;
    ensure(a.certificate.psi_r == int(5), "certified psi(r)")?;

    let three = datasets::theta_set("elliptic-q4-from-f2").map_err(e)?;
    let p = LpProblem::new(4, three.clone(), Regime::U0MinusOne, 4, 0).map_err(e)?;
    let b = optimize(&p, MAX_ROUNDS).map_err(e)?;
    ensure(b.objective == int(52), format!("u0_minus_one objective {}", b.objective))?;
    ensure(b.certificate.genus_cap() == Some(&BigInt::from(26)), "certified cap")?;

    let (d, _) = minimal_degree_search(4, &three, Regime::U0MinusOne, 16, 0).map_err(e)?;
    ensure(d == 4, format!("D_min = {} for q = 4", d))?;
    let p3 = LpProblem::new(4, three, Regime::U0MinusOne, 3, 0).map_err(e)?;
    ensure(matches!(optimize(&p3, MAX_ROUNDS), Err(Error::Infeasible)), "D = 3 should be infeasible")?;
    let (d2, _) = minimal_degree_search(2, &elliptic, Regime::U0Zero, 16, 0).map_err(e)?;
    ensure(d2 == 5, format!("D_min = {} for q = 2", d2))?;
    Ok(format!("objectives {} and {}; D_min = {} (q=4), {} (q=2)", a.objective, b.objective, d, d2))
}

fn properties() -> Outcome {
    let mut r = runner();
    r.run(&identity_pair(), |(w, f)| check_identity(&w, &f).map_err(TestCaseError::fail))
        .map_err(|err| format!("identity: {}", err))?;
    let mut r = runner();
    r.run(&(rooted_poly(), theta_set()), |(f, theta)| check_nonneg(&f, &theta).map_err(TestCaseError::fail))
        .map_err(|err| format!("nonnegativity: {}", err))?;
    let certs = emitted_certificates().map_err(e)?;
    let mut checked = 0usize;
    for cert in &certs {
        let mut r = runner();
        r.run(&compatible_curve(cert), |w| check_soundness(cert, &w).map_err(TestCaseError::fail))
            .map_err(|err| format!("soundness ({} q={}): {}", cert.regime, cert.q, err))?;
        checked += 100;
    }
    Ok(format!("100 identities, 100 sign tests, {} certificate/curve pairs over {} certificates", checked, certs.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("linear bound, q=3", ree_bound),
        ("constant bound on elliptic angles, q=2", elliptic_bound),
        ("genus cap for decomposable Jacobians", decomposable_genus),
        ("angle exclusions, q=2", exclusions),
        ("explicit-formula identities and point counts", identities),
        ("cyclotomic family, m = 4..32", family),
        ("LP optimizer recovery", optimizer),
        ("property suites", properties),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS [{}] {} ({} ms): {}", i + 1, name, ms, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {} ({} ms): {}", i + 1, name, ms, why);
            }
        }
    }
    let total = start.elapsed();
    let budget = Duration::from_secs(60);
    if total > budget {
        failed += 1;
        println!("FAIL [time] total {:.1} s exceeds {} s", total.as_secs_f64(), budget.as_secs());
    } else {
        println!("PASS [time] total {:.1} s within {} s", total.as_secs_f64(), budget.as_secs());
    }
    println!("{} of {} criteria passed", criteria.len() + 1 - failed, criteria.len() + 1);
    if failed > 0 {
        std::process::exit(1);
    }
}
