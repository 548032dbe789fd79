//! The fixed suite of worked examples, each checked against its stated value.

use num_bigint::BigInt;
use serde::Serialize;

use crate::bounds::{
    bound_u0_minus_one, bound_u0_zero, certify, exclusion_certificate, explicit_formula_identity, Bound, Regime,
};
use crate::cosine_poly::CosinePoly;
use crate::datasets;
use crate::error::{Error, Result};
use crate::exactnum::QField;
use crate::family::family_threshold;

/// One claim, the value computed for it, and whether they agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub id: String,
    pub claim: String,
    pub computed: String,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
    pub all_matched: bool,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let flag = if r.matched { "ok" } else { "MISMATCH" };
            out.push_str(&format!("[{:>8}] {:<22} {}\n           computed: {}\n", flag, r.id, r.claim, r.computed));
        }
        let n = self.rows.iter().filter(|r| r.matched).count();
        out.push_str(&format!("{}/{} claims reproduced\n", n, self.rows.len()));
        out
    }
}

/// Deliberate corruption of one built-in input, for exercising the
/// mismatch path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// Perturbs the top coefficient of the genus-free q = 2 polynomial.
    CorruptPolynomial,
}

fn q(s: &str) -> QField {
    s.parse().expect("literal")
}

fn int(n: i64) -> QField {
    QField::from_integer(n)
}

fn row(id: &str, claim: &str, f: impl FnOnce() -> Result<(String, bool)>) -> Row {
    let (computed, matched) = f().unwrap_or_else(|e| (format!("error: {}", e), false));
    Row { id: id.into(), claim: claim.into(), computed, matched }
}

fn linear(b: &Bound) -> Result<(QField, QField)> {
    match b {
        Bound::Linear { slope, intercept } => Ok((slope.clone(), intercept.clone())),
        other => Err(Error::Internal(format!("expected a linear bound, got {}", other))),
    }
}

fn constant(b: &Bound) -> Result<QField> {
    match b {
        Bound::Constant { value, .. } => Ok(value.clone()),
        other => Err(Error::Internal(format!("expected a constant bound, got {}", other))),
    }
}

fn normalized_f2() -> Result<CosinePoly> {
    datasets::polynomial("exclusion-quadratic-q2")?.normalize_u0()
}

/// Runs every row of the suite.
pub fn reproduce(fault: Fault) -> Report {
    let quintic = || -> Result<CosinePoly> {
        let f = datasets::polynomial("elliptic-q2-quintic")?;
        if fault == Fault::CorruptPolynomial {
            let mut u = f.coeffs().to_vec();
            u[5] = &u[5] + &QField::ratio(1, 10);
            return CosinePoly::new(u);
        }
        Ok(f)
    };

    let rows = vec![
        row("ree-linear-bound", "q=3: N <= 54/41 (g-15) + 28", || {
            let f = datasets::polynomial("ree-q3-quartic")?;
            let cert = certify(&f, &datasets::theta_set("full")?, 3, Regime::U0One)?;
            let (slope, intercept) = linear(&cert.bound)?;
            let expect_slope = QField::ratio(54, 41);
            let expect_intercept = &expect_slope * &int(-15) + int(28);
            let ok = slope == expect_slope
                && intercept == expect_intercept
                && cert.psi_rinv == QField::ratio(41, 27)
                && cert.psi_r == int(11);
            Ok((format!("N <= ({})*g + ({}); psi(r)={}, psi(1/r)={}", slope, intercept, cert.psi_r, cert.psi_rinv), ok))
        }),
        row("ree-tightness", "Deligne-Lusztig curve, q=3: g=15, N=28, N_1=N_2=N_3=N_4", || {
            let w = datasets::curve("ree-q3")?;
            let f = datasets::polynomial("ree-q3-quartic")?;
            let rep = explicit_formula_identity(&f, &w)?;
            let cert = certify(&f, &datasets::theta_set("full")?, 3, Regime::U0One)?;
            let counts = w.point_counts(4);
            let at15 = cert.bound.max_points(15);
            let ok = w.genus() == 15
                && counts.as_slice().iter().all(|n| n == &BigInt::from(28))
                && rep.is_tight()
                && at15 == Some(BigInt::from(28));
            Ok((
                format!(
                    "g={}, N_1..N_4={:?}, bound at g=15: {:?}, tight={}",
                    w.genus(),
                    counts.as_slice().iter().map(|n| n.to_string()).collect::<Vec<_>>(),
                    at15.map(|v| v.to_string()),
                    rep.is_tight()
                ),
                ok,
            ))
        }),
        row("quadratic-exclusion", "q=2: N > (8-2*sqrt(2))/7 (g-1) + 5 => angle in (pi/3, 3pi/4)", || {
            let ex = exclusion_certificate(
                &normalized_f2()?,
                2,
                &QField::ratio(1, 2),
                &q("-1/2*sqrt(2)"),
                Regime::U0OneRelaxed,
            )?;
            let (slope, intercept) = linear(&ex.base.bound)?;
            let expect = q("8/7 - 2/7*sqrt(2)");
            let ok = slope == expect
                && intercept == &int(5) - &expect
                && ex.excluded.lo == q("-1/2*sqrt(2)")
                && ex.excluded.hi == QField::ratio(1, 2)
                && !ex.excluded.lo_closed
                && !ex.excluded.hi_closed;
            Ok((ex.statement(), ok))
        }),
        row("cubic-exclusion", "q=2: N > (g-1)/2 + 5 => angle in (3pi/4, pi]", || {
            let f = datasets::polynomial("exclusion-cubic-q2")?;
            let ex = exclusion_certificate(&f, 2, &q("-1/2*sqrt(2)"), &int(-1), Regime::U0OneRelaxed)?;
            let (slope, intercept) = linear(&ex.base.bound)?;
            let ok = slope == QField::ratio(1, 2)
                && intercept == QField::ratio(9, 2)
                && ex.base.psi_rinv == int(4)
                && ex.base.psi_r == int(14)
                && ex.excluded.lo_closed
                && !ex.excluded.hi_closed;
            Ok((ex.statement(), ok))
        }),
        row("elliptic-constant-bound", "q=2, elliptic angles: N <= 6", || {
            let cert = bound_u0_zero(&quintic()?, &datasets::theta_set("elliptic-q2")?, 2)?;
            let value = constant(&cert.bound)?;
            let ok = value == int(6) && cert.psi_rinv == int(1) && cert.psi_r == int(5);
            Ok((format!("N <= {}; psi(r)={}, psi(1/r)={}", value, cert.psi_r, cert.psi_rinv), ok))
        }),
        row("genus3-tightness", "genus-3 curve over F_2: N_1 = N_3 = N_5 = 6", || {
            let w = datasets::curve("genus3-q2")?;
            let rep = explicit_formula_identity(&quintic()?, &w)?;
            let c = w.point_counts(5);
            let six = BigInt::from(6);
            let ok = [1, 3, 5].iter().all(|&m| c.get(m) == &six) && rep.is_tight() && rep.lhs == int(6);
            Ok((format!("N_1,N_3,N_5 = {},{},{}; lhs = rhs = {}", c.get(1), c.get(3), c.get(5), rep.lhs), ok))
        }),
        row("family-m2", "cos(theta): N > r^2 + 1 => negative trace", || {
            let t = family_threshold(2, 5)?;
            let ok = t.threshold == int(6) && t.excluded == "(pi/2, pi]";
            Ok((t.statement(), ok))
        }),
        row("family-m3", "cos(theta) + cos(2 theta): N > r^3 + 1 => angle in (pi/3, pi)", || {
            let t = family_threshold(3, 2)?;
            let ok = t.threshold == q("1 + 2*sqrt(2)") && t.excluded == "(pi/3, pi)";
            Ok((t.statement(), ok))
        }),
        row("decomposable-genus-cap", "F_2 curves with decomposable Jacobian: 2g <= 52", || {
            let cert = bound_u0_minus_one(
                &datasets::polynomial("decomposable-q4")?,
                &datasets::theta_set("elliptic-q4-from-f2")?,
                4,
            )?;
            let cap = cert.genus_cap().cloned();
            let ok = cert.conditions.d == Some(true) && cert.psi_r == int(52) && cap == Some(BigInt::from(26));
            Ok((format!("{}", cert.bound), ok))
        }),
        row("x11-tightness", "X(11) over F_4: g=26, N=55", || {
            let w = datasets::curve("x11-q4")?;
            let rep = explicit_formula_identity(&datasets::polynomial("decomposable-q4")?, &w)?;
            let c = w.point_counts(4);
            let ok = w.genus() == 26 && c.as_slice().iter().all(|n| n == &BigInt::from(55)) && rep.is_tight();
            Ok((format!("g={}, N_1..N_4 all {}, identity {} = {}", w.genus(), c.get(1), rep.lhs, rep.rhs), ok))
        }),
        row("suzuki-threshold", "m=4, q=8: threshold 65; Suzuki curve has N=65", || {
            let t = family_threshold(4, 8)?;
            let n = datasets::curve("suzuki-q8")?.point_counts(1).get(1).clone();
            let ok = t.threshold == int(65) && n == BigInt::from(65) && t.admits(&n);
            Ok((format!("{}; Suzuki N={}", t.statement(), n), ok))
        }),
        row("ree-threshold", "m=6, q=3: threshold 28; Ree curve has N=28", || {
            let t = family_threshold(6, 3)?;
            let n = datasets::curve("ree-q3")?.point_counts(1).get(1).clone();
            let ok = t.threshold == int(28) && n == BigInt::from(28) && t.admits(&n);
            Ok((format!("{}; Ree N={}", t.statement(), n), ok))
        }),
    ];
    let all_matched = rows.iter().all(|r| r.matched);
    Report { rows, all_matched }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let r = reproduce(Fault::None);
        assert_eq!(r.rows.len(), 12);
        for row in &r.rows {
            assert!(row.matched, "{}: {}", row.id, row.computed);
        }
    }

    #[test]
    fn corruption_is_caught() {
        let r = reproduce(Fault::CorruptPolynomial);
        assert!(!r.all_matched);
        assert!(r.rows.iter().any(|row| row.id == "elliptic-constant-bound" && !row.matched));
    }
}
