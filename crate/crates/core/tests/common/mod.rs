//! Strategies and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use frobound::bounds::{certify, exclusion_certificate, explicit_formula_identity, BoundCertificate};
use frobound::datasets;
use frobound::exactnum::squarefree_part;
use frobound::family::{family_threshold, ThresholdProof};
use frobound::poly::PowerPoly;
use frobound::{CosinePoly, QField, Regime, ThetaSet, WeilPoly};

pub const FIELD_SIZES: [u64; 8] = [2, 3, 4, 5, 7, 8, 9, 12];

pub fn int(n: i64) -> QField {
    QField::from_integer(n)
}

pub fn qf(s: &str) -> QField {
    s.parse().expect("literal")
}

/// Largest `t` with `t² ≤ 4q`.
pub fn trace_bound(q: u64) -> i64 {
    let mut t = 0i64;
    while (t + 1) * (t + 1) <= 4 * q as i64 {
        t += 1;
    }
    t
}

pub fn small_rational() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

/// `a + b√d`, with `b = 0` when `d = 1`.
pub fn qfield_in(d: u64) -> impl Strategy<Value = QField> {
    (small_rational(), small_rational()).prop_map(move |(a, b)| {
        if d == 1 {
            QField::from_rational(a)
        } else {
            QField::new(a, b, d).expect("squarefree radicand")
        }
    })
}

/// Cosine polynomial of degree 1..=max_deg over ℚ(√d).
pub fn cosine_poly_in(d: u64, max_deg: usize) -> impl Strategy<Value = CosinePoly> {
    (proptest::collection::vec(qfield_in(d), 1..=max_deg), qfield_in(d)).prop_map(|(mut u, top)| {
        let top = if top.is_zero() { QField::one() } else { top };
        u.push(top);
        CosinePoly::new(u).expect("valid coefficients")
    })
}

pub fn weil_poly(q: u64, max_factors: usize) -> impl Strategy<Value = WeilPoly> {
    let t = trace_bound(q);
    proptest::collection::vec((-t..=t, 1u32..=3), 1..=max_factors)
        .prop_map(move |factors| WeilPoly::new(q, factors).expect("positive multiplicities"))
}

/// A random curve-like zeta numerator and a polynomial over a compatible field.
pub fn identity_pair() -> impl Strategy<Value = (WeilPoly, CosinePoly)> {
    proptest::sample::select(FIELD_SIZES.to_vec())
        .prop_flat_map(|q| (weil_poly(q, 5), cosine_poly_in(squarefree_part(q), 7)))
}

/// `±∏(x − aᵢ)^{eᵢ}` with rational roots in [−1, 1], converted to the cosine
/// basis; such polynomials touch zero often, which is where a sign test is
/// most likely to go wrong.
pub fn rooted_poly() -> impl Strategy<Value = CosinePoly> {
    let root = (1i64..=8).prop_flat_map(|q| (-q..=q).prop_map(move |p| BigRational::new(p.into(), q.into())));
    let factors = proptest::collection::vec((root, 1u32..=2), 1..=5);
    (factors, any::<bool>(), 0i64..=2).prop_map(|(factors, negate, shift)| {
        let mut p = PowerPoly::constant(QField::one());
        for (a, e) in factors {
            let lin = PowerPoly::new(vec![-QField::from_rational(a), QField::one()]).expect("rational");
            p = p.mul(&lin.pow(e));
        }
        if negate {
            p = p.neg();
        }
        let p = p.add(&PowerPoly::constant(QField::ratio(shift, 100)));
        let p = if p.degree().unwrap_or(0) == 0 { p.add(&PowerPoly::x()) } else { p };
        CosinePoly::from_power(&p).expect("rational polynomial")
    })
}

/// The full range, a finite set, or a union of up to three intervals plus points.
pub fn theta_set() -> impl Strategy<Value = ThetaSet> {
    let endpoint = (-16i64..=16).prop_map(|k| QField::ratio(k, 16));
    let interval = (endpoint.clone(), endpoint.clone()).prop_map(|(a, b)| {
        if a.try_cmp(&b).expect("rational").is_le() {
            (a, b)
        } else {
            (b, a)
        }
    });
    prop_oneof![
        Just(ThetaSet::full()),
        (proptest::collection::vec(interval, 1..=3), proptest::collection::vec(endpoint, 0..=3))
            .prop_map(|(ivs, pts)| ThetaSet::new(ivs, pts).expect("valid set")),
    ]
}

/// `Σ uₙ cos(n·arccos x)` in floating point, independent of the power basis.
pub fn eval_cos_f64(f: &CosinePoly, x: f64) -> f64 {
    let t = x.clamp(-1.0, 1.0).acos();
    f.coeffs().iter().enumerate().map(|(n, u)| u.to_f64() * (n as f64 * t).cos()).sum()
}

/// `Tₙ(x)` by the three-term recurrence, exactly.
pub fn chebyshev_eval(f: &CosinePoly, x: &QField) -> QField {
    let mut prev = QField::one();
    let mut cur = x.clone();
    let mut s = f.coeff(0);
    for (n, u) in f.coeffs().iter().enumerate().skip(1) {
        if n > 1 {
            let next = &(&int(2) * x) * &cur - &prev;
            prev = std::mem::replace(&mut cur, next);
        }
        s = &s + &(u * &cur);
    }
    s
}

/// `N₁ … N_M` by expanding `P(T)` and applying Newton's identities.
pub fn newton_counts(w: &WeilPoly, upto: usize) -> Vec<BigInt> {
    let q = BigInt::from(w.q());
    let mut p = vec![BigInt::from(1)];
    for &(a, e) in w.factors() {
        for _ in 0..e {
            let quad = [BigInt::from(1), BigInt::from(a), q.clone()];
            let mut next = vec![BigInt::from(0); p.len() + 2];
            for (i, c) in p.iter().enumerate() {
                for (j, d) in quad.iter().enumerate() {
                    next[i + j] += c * d;
                }
            }
            p = next;
        }
    }
    // P(T) = ∏(1 − αT); c_k are the coefficients, s_k the power sums of α.
    let c = |k: usize| p.get(k).cloned().unwrap_or_default();
    let mut s: Vec<BigInt> = vec![BigInt::from(0); upto + 1];
    for k in 1..=upto {
        let mut v = -BigInt::from(k as u64) * c(k);
        for i in 1..k {
            v -= c(i) * &s[k - i];
        }
        s[k] = v;
    }
    (1..=upto).map(|k| q.pow(k as u32) + 1 - &s[k]).collect()
}

/// `x = −a/(2√q)` for every Weil-admissible trace whose angle lies in `theta`.
pub fn compatible_traces(q: u64, theta: &ThetaSet) -> Vec<i64> {
    let t = trace_bound(q);
    let half_rinv = QField::sqrt_of(q).inv() * QField::ratio(-1, 2);
    (-t..=t).filter(|&a| theta.contains(&(&half_rinv * &int(a)))).collect()
}

/// The report's sides, recomputed from Newton-identity counts and the
/// three-term Chebyshev recurrence.
pub fn check_identity(w: &WeilPoly, f: &CosinePoly) -> Result<(), String> {
    let rep = explicit_formula_identity(f, w).map_err(|e| e.to_string())?;
    if rep.lhs != rep.rhs {
        return Err(format!("lhs {} != rhs {}", rep.lhs, rep.rhs));
    }
    let deg = f.degree();
    let n: Vec<QField> = newton_counts(w, deg).into_iter().map(|v| QField::from_rational(v.into())).collect();
    let rinv = QField::sqrt_of(w.q()).inv();
    let mut lhs = &n[0] * &f.psi(&rinv);
    for k in 2..=deg {
        lhs = &lhs + &(&(&f.coeff(k) * &(&n[k - 1] - &n[0])) * &rinv.pow(k as i32));
    }
    let mut rhs = &(f.u0() * &int(2 * w.genus() as i64)) + &(&f.psi(&QField::sqrt_of(w.q())) + &f.psi(&rinv));
    for (x, e) in w.angle_multiset() {
        rhs = &rhs - &(&chebyshev_eval(f, &x) * &int(2 * e as i64));
    }
    if lhs != rep.lhs || rhs != rep.rhs {
        return Err(format!("oracle gives {} = {}, report {} = {}", lhs, rhs, rep.lhs, rep.rhs));
    }
    Ok(())
}

pub const SCAN_TOLERANCE: f64 = 1e-9;
const SCAN_POINTS: usize = 4000;

/// Exact sign decision against a dense floating scan of Θ.
pub fn check_nonneg(f: &CosinePoly, theta: &ThetaSet) -> Result<(), String> {
    let mut min = f64::INFINITY;
    for (lo, hi) in theta.intervals() {
        let (lo, hi) = (lo.to_f64(), hi.to_f64());
        for i in 0..=SCAN_POINTS {
            let x = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
            min = min.min(eval_cos_f64(f, x));
        }
    }
    for p in theta.points() {
        min = min.min(eval_cos_f64(f, p.to_f64()));
    }
    let verdict = f.is_nonneg_on(theta);
    match verdict.witness() {
        None if min < -SCAN_TOLERANCE => Err(format!("claimed nonnegative, scan finds {:e}", min)),
        None => Ok(()),
        Some(w) => {
            let v = f.eval_f(w).map_err(|e| e.to_string())?;
            if !theta.contains(w) || !v.is_negative() {
                return Err(format!("bad witness {} (f = {})", w, v));
            }
            Ok(())
        }
    }
}

/// The bound certificates produced for the worked examples.
pub fn emitted_certificates() -> frobound::Result<Vec<BoundCertificate>> {
    let mut out = vec![
        certify(&datasets::polynomial("ree-q3-quartic")?, &ThetaSet::full(), 3, Regime::U0One)?,
        certify(
            &datasets::polynomial("elliptic-q2-quintic")?,
            &datasets::theta_set("elliptic-q2")?,
            2,
            Regime::U0Zero,
        )?,
        certify(
            &datasets::polynomial("decomposable-q4")?,
            &datasets::theta_set("elliptic-q4-from-f2")?,
            4,
            Regime::U0MinusOne,
        )?,
    ];
    let f2 = datasets::polynomial("exclusion-quadratic-q2")?.normalize_u0()?;
    out.push(exclusion_certificate(&f2, 2, &QField::ratio(1, 2), &qf("-1/2*sqrt(2)"), Regime::U0OneRelaxed)?.base);
    let cubic = datasets::polynomial("exclusion-cubic-q2")?;
    out.push(exclusion_certificate(&cubic, 2, &qf("-1/2*sqrt(2)"), &int(-1), Regime::U0OneRelaxed)?.base);
    for (m, q) in [(2, 5), (3, 2), (4, 8), (6, 3)] {
        if let ThresholdProof::Certified(ex) = family_threshold(m, q)?.proof {
            out.push(ex.base);
        }
    }
    Ok(out)
}

/// Curve-like zeta numerators whose angles all lie in the certificate's Θ.
pub fn compatible_curve(cert: &BoundCertificate) -> impl Strategy<Value = WeilPoly> {
    let q = cert.q;
    let upto = cert.f.degree().max(1);
    let traces = compatible_traces(q, &cert.theta);
    proptest::collection::vec((proptest::sample::select(traces), 1u32..=3), 1..=6)
        .prop_map(move |factors| WeilPoly::new(q, factors).expect("positive multiplicities"))
        .prop_filter("point counts must be curve-like", move |w| w.validate(upto).passed())
}

pub fn check_soundness(cert: &BoundCertificate, w: &WeilPoly) -> Result<(), String> {
    if !cert.covers_angles(w) {
        return Err(format!("{} has an angle outside the certificate's set", w));
    }
    if !cert.admits(w) {
        return Err(format!("{} with N_1 = {} violates {}", w, w.point_counts(1).get(1), cert.bound));
    }
    Ok(())
}
