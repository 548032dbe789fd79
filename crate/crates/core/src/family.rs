//! The one-parameter family of auxiliary functions
//!
//! ```text
//! f(θ) = (1 + cos mθ) / (4(cos θ − cos α)(cos θ − cos 3α)) = Σ_{n=2}^{m−2} uₙ cos nθ,
//! uₙ = sin(n−1)α sin nα sin(n+1)α / (sin α sin 2α sin 3α),   α = π/m,
//! ```
//!
//! which is nonnegative outside `(α, 3α)` and symmetric with `uₙ = u_{m−n}`,
//! so a curve with more than `r^m + 1` points has an angle in `(π/m, 3π/m)`.
//!
//! Coefficients are exact elements of `ℚ[x]/(x^m + 1)` with `x = e^{iπ/m}`.
//! Writing `[k] = x^k − x^{−k}` and `y = x²`,
//! `uₙ = [n−1][n][n+1] / ([1][2][3]) = x^{6−3n}·G_n(y)` where `G_n` is a
//! Gaussian binomial coefficient. The ring has zero divisors, so equality is
//! decided after reducing by the minimal polynomial `Φ_{2m}` of `x`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::bounds::{exclusion_certificate, Bound, ExclusionCertificate, Regime};
use crate::cosine_poly::CosinePoly;
use crate::error::{Error, Result};
use crate::exactnum::{squarefree_part, QField};
use crate::poly::PowerPoly;

/// Working precision of every floating family check, in bits.
pub const PRECISION: usize = 128;
/// Largest `m` accepted by the family operations.
pub const MAX_M: usize = 64;

const RM: RoundingMode = RoundingMode::ToEven;

/// Residue in `ℚ[x]/(x^m + 1)`, stored as the `m` coefficients of
/// `1, x, …, x^{m−1}`.
#[derive(Clone, Debug)]
pub struct CycloElem {
    m: usize,
    c: Vec<BigRational>,
}

impl CycloElem {
    pub fn new(m: usize, c: Vec<BigRational>) -> Result<Self> {
        if m == 0 || c.len() != m {
            return Err(Error::Domain(format!("expected {} coefficients, got {}", m, c.len())));
        }
        Ok(CycloElem { m, c })
    }

    pub fn zero(m: usize) -> Self {
        CycloElem { m, c: vec![BigRational::zero(); m] }
    }

    pub fn one(m: usize) -> Self {
        Self::monomial(0, m)
    }

    /// `x^k` for any integer `k`, using `x^m = −1`.
    pub fn monomial(k: i64, m: usize) -> Self {
        let period = 2 * m as i64;
        let k = k.rem_euclid(period) as usize;
        let mut e = Self::zero(m);
        if k < m {
            e.c[k] = BigRational::one();
        } else {
            e.c[k - m] = -BigRational::one();
        }
        e
    }

    /// The quantum integer `[k] = x^k − x^{−k}`.
    pub fn quantum(k: i64, m: usize) -> Self {
        &Self::monomial(k, m) - &Self::monomial(-k, m)
    }

    /// `p(x²)` for a polynomial `p` in `y`.
    pub fn from_y_poly(p: &PowerPoly, m: usize) -> Result<Self> {
        let mut e = Self::zero(m);
        for (i, c) in p.coeffs().iter().enumerate() {
            let c = c.to_rational().ok_or_else(|| Error::Internal("irrational coefficient".into()))?;
            e = &e + &Self::monomial(2 * i as i64, m).scale(&c);
        }
        Ok(e)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        CycloElem { m: self.m, c: self.c.iter().map(|v| v * k).collect() }
    }

    /// Every stored coefficient is zero.
    pub fn is_zero_in_ring(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Coefficients of the remainder modulo `Φ_{2m}`.
    pub fn reduced(&self) -> Vec<BigRational> {
        let p =
            PowerPoly::new(self.c.iter().cloned().map(QField::from_rational).collect()).expect("rational coefficients");
        let (_, r) = p.div_rem(&cyclotomic(2 * self.m)).expect("nonzero modulus");
        r.coeffs().iter().map(|v| v.to_rational().expect("rational")).collect()
    }

    /// Whether the element vanishes at `x = e^{iπ/m}`.
    pub fn is_zero_at_root(&self) -> bool {
        self.reduced().is_empty()
    }

    /// `(Re, Im)` at `x = e^{iπ/m}`.
    pub fn eval(&self, cc: &mut Consts) -> (BigFloat, BigFloat) {
        let alpha = pi(cc).div(&BigFloat::from_u64(self.m as u64, PRECISION), PRECISION, RM);
        let mut re = BigFloat::from_i64(0, PRECISION);
        let mut im = BigFloat::from_i64(0, PRECISION);
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = alpha.mul(&BigFloat::from_u64(k as u64, PRECISION), PRECISION, RM);
            let cf = rational_to_float(c, cc);
            re = re.add(&cf.mul(&angle.cos(PRECISION, RM, cc), PRECISION, RM), PRECISION, RM);
            im = im.add(&cf.mul(&angle.sin(PRECISION, RM, cc), PRECISION, RM), PRECISION, RM);
        }
        (re, im)
    }

    /// The exact real value at `x = e^{iπ/m}` when `cos(kπ/m)` and
    /// `sin(kπ/m)` all lie in a quadratic field, i.e. for `m ∈ {1, 2, 3, 4, 6}`.
    pub fn to_qfield(&self) -> Option<QField> {
        let mut re = QField::zero();
        let mut im = QField::zero();
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (cos, sin) = exact_cos_sin(k as i64, self.m)?;
            let c = QField::from_rational(c.clone());
            re = re.checked_add(&(&c * &cos)).ok()?;
            im = im.checked_add(&(&c * &sin)).ok()?;
        }
        im.is_zero().then_some(re)
    }
}

/// `cos(kπ/m)` and `sin(kπ/m)` when both are quadratic irrationalities.
pub fn exact_cos_sin(k: i64, m: usize) -> Option<(QField, QField)> {
    if m == 0 || 24 % (2 * m) != 0 {
        return None;
    }
    // angle kπ/m = jπ/12
    let j = (k * 12 / m as i64).rem_euclid(24);
    let cos12 = |j: i64| -> Option<QField> {
        let j = j.rem_euclid(24);
        let j = if j > 12 { 24 - j } else { j };
        let s = match j {
            0 => "1",
            2 => "1/2*sqrt(3)",
            3 => "1/2*sqrt(2)",
            4 => "1/2",
            6 => "0",
            8 => "-1/2",
            9 => "-1/2*sqrt(2)",
            10 => "-1/2*sqrt(3)",
            12 => "-1",
            _ => return None,
        };
        s.parse().ok()
    };
    Some((cos12(j)?, cos12(6 - j)?))
}

thread_local! {
    static CYCLOTOMIC: RefCell<HashMap<usize, PowerPoly>> = RefCell::new(HashMap::new());
}

/// The cyclotomic polynomial `Φ_n`.
pub fn cyclotomic(n: usize) -> PowerPoly {
    if let Some(p) = CYCLOTOMIC.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    let mut xn = vec![QField::zero(); n + 1];
    xn[0] = QField::from_integer(-1);
    xn[n] = QField::one();
    let mut p = PowerPoly::new(xn).expect("rational");
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = p.exact_div(&cyclotomic(d)).expect("x^n - 1 is the product of its cyclotomic factors");
    }
    CYCLOTOMIC.with(|c| c.borrow_mut().insert(n, p.clone()));
    p
}

impl PartialEq for CycloElem {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && (self - other).is_zero_at_root()
    }
}

impl<'a> std::ops::Add<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn add(self, rhs: &CycloElem) -> CycloElem {
        assert_eq!(self.m, rhs.m, "mixing rings");
        CycloElem { m: self.m, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> std::ops::Sub<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: &CycloElem) -> CycloElem {
        assert_eq!(self.m, rhs.m, "mixing rings");
        CycloElem { m: self.m, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> std::ops::Mul<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn mul(self, rhs: &CycloElem) -> CycloElem {
        assert_eq!(self.m, rhs.m, "mixing rings");
        let m = self.m;
        let mut c = vec![BigRational::zero(); m];
        for (i, a) in self.c.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in rhs.c.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let k = i + j;
                if k < m {
                    c[k] += a * b;
                } else {
                    c[k - m] -= a * b;
                }
            }
        }
        CycloElem { m, c }
    }
}

impl std::ops::Sub<CycloElem> for CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: CycloElem) -> CycloElem {
        &self - &rhs
    }
}

impl std::ops::Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        CycloElem { m: self.m, c: self.c.iter().map(|v| -v).collect() }
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.c.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let (neg, abs) = (c.is_negative(), c.abs());
            let sep = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let mono = match k {
                0 => String::new(),
                1 => "x".into(),
                k => format!("x^{}", k),
            };
            let body = match (k, abs.is_one()) {
                (0, _) => abs.to_string(),
                (_, true) => mono,
                _ => format!("{}*{}", abs, mono),
            };
            write!(f, "{}{}", sep, body)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn pi(cc: &mut Consts) -> BigFloat {
    cc.pi(PRECISION, RM)
}

fn rational_to_float(r: &BigRational, cc: &mut Consts) -> BigFloat {
    let mut parse = |n: &BigInt| BigFloat::parse(&n.to_string(), Radix::Dec, PRECISION, RM, cc);
    let (n, d) = (parse(r.numer()), parse(r.denom()));
    n.div(&d, PRECISION, RM)
}

/// Fresh constants cache for the floating checks.
pub fn consts() -> Consts {
    Consts::new().expect("constants cache")
}

/// `10^{-20}`, the tolerance for every floating family comparison.
pub fn tolerance(cc: &mut Consts) -> BigFloat {
    BigFloat::parse("1e-20", Radix::Dec, PRECISION, RM, cc)
}

/// Nearest `f64` to a wide float.
pub fn to_f64(v: &BigFloat) -> f64 {
    v.to_string().parse().unwrap_or(f64::NAN)
}

fn check_m(m: usize, min: usize) -> Result<()> {
    if m < min {
        return Err(Error::Domain(format!("m = {} must be at least {}", m, min)));
    }
    if m > MAX_M {
        return Err(Error::Domain(format!("m = {} exceeds the cap {}", m, MAX_M)));
    }
    Ok(())
}

fn y_minus_one_pow(k: usize) -> PowerPoly {
    let mut c = vec![QField::zero(); k + 1];
    c[0] = QField::from_integer(-1);
    c[k] = QField::one();
    PowerPoly::new(c).expect("rational")
}

/// `(y^{n+1}−1)(y^n−1)(y^{n−1}−1) / ((y³−1)(y²−1)(y−1))` in `ℚ[y]`.
pub fn gauss_binom3_poly(n: usize) -> Result<PowerPoly> {
    if n < 2 {
        return Err(Error::Domain(format!("n = {} must be at least 2", n)));
    }
    let num = y_minus_one_pow(n + 1).mul(&y_minus_one_pow(n)).mul(&y_minus_one_pow(n - 1));
    let den = y_minus_one_pow(3).mul(&y_minus_one_pow(2)).mul(&y_minus_one_pow(1));
    num.exact_div(&den)
}

/// The Gaussian binomial above evaluated at `y = x²` in `ℚ[x]/(x^m+1)`.
pub fn gauss_binom3(n: usize, m: usize) -> Result<CycloElem> {
    check_m(m, 4)?;
    if n < 2 || n + 2 > m {
        return Err(Error::Domain(format!("n = {} outside 2..={}", n, m - 2)));
    }
    CycloElem::from_y_poly(&gauss_binom3_poly(n)?, m)
}

/// `[n−1][n][n+1]` for any integer `n`.
pub fn quantum_numerator(n: i64, m: usize) -> CycloElem {
    &(&CycloElem::quantum(n - 1, m) * &CycloElem::quantum(n, m)) * &CycloElem::quantum(n + 1, m)
}

/// `[1][2][3]`.
pub fn quantum_denominator(m: usize) -> CycloElem {
    quantum_numerator(2, m)
}

#[derive(Clone, Debug)]
pub struct FamilyCoeff {
    pub n: usize,
    pub exact: CycloElem,
    /// The sine-product value at 128 bits.
    pub value: BigFloat,
}

/// `u₂ … u_{m−2}` for one `m`.
#[derive(Clone, Debug)]
pub struct FamilyPoly {
    m: usize,
    u: Vec<FamilyCoeff>,
}

impl FamilyPoly {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[FamilyCoeff] {
        &self.u
    }

    /// `uₙ` for `2 ≤ n ≤ m−2`.
    pub fn get(&self, n: usize) -> Option<&FamilyCoeff> {
        n.checked_sub(2).and_then(|i| self.u.get(i))
    }

    pub fn exact_coeffs(&self) -> Vec<CycloElem> {
        self.u.iter().map(|c| c.exact.clone()).collect()
    }

    /// `Σ uₙ cos nθ` at 128 bits.
    pub fn eval(&self, theta: &BigFloat, cc: &mut Consts) -> BigFloat {
        let mut s = BigFloat::from_i64(0, PRECISION);
        for c in &self.u {
            let nt = theta.mul(&BigFloat::from_u64(c.n as u64, PRECISION), PRECISION, RM);
            s = s.add(&c.value.mul(&nt.cos(PRECISION, RM, cc), PRECISION, RM), PRECISION, RM);
        }
        s
    }

    /// The family member as an exact cosine polynomial, when `m ∈ {4, 6}`.
    pub fn to_cosine_poly(&self) -> Option<CosinePoly> {
        let mut u = vec![QField::zero(); 2];
        for c in &self.u {
            u.push(c.exact.to_qfield()?);
        }
        CosinePoly::new(u).ok()
    }
}

fn sine_formula(n: usize, m: usize, cc: &mut Consts) -> BigFloat {
    let alpha = pi(cc).div(&BigFloat::from_u64(m as u64, PRECISION), PRECISION, RM);
    let mut sin = |k: i64| alpha.mul(&BigFloat::from_i64(k, PRECISION), PRECISION, RM).sin(PRECISION, RM, cc);
    let n = n as i64;
    let num = sin(n - 1).mul(&sin(n), PRECISION, RM).mul(&sin(n + 1), PRECISION, RM);
    let den = sin(1).mul(&sin(2), PRECISION, RM).mul(&sin(3), PRECISION, RM);
    num.div(&den, PRECISION, RM)
}

fn close(a: &BigFloat, b: &BigFloat, tol: &BigFloat) -> bool {
    let scale = BigFloat::from_i64(1, PRECISION).max(&a.abs());
    let diff = a.sub(b, PRECISION, RM).abs();
    diff.cmp(&tol.mul(&scale, PRECISION, RM)).is_some_and(|c| c < 0)
}

/// Exact coefficients with all structural checks: `uₙ·[1][2][3] =
/// [n−1][n][n+1]` in the ring, `[n−1][n][n+1] = 0` for `n ∈ {0, 1, m−1, m}`,
/// `uₙ = u_{m−n}`, agreement with the sine formula, and positivity.
pub fn family_coefficients(m: usize) -> Result<FamilyPoly> {
    check_m(m, 4)?;
    let den = quantum_denominator(m);
    for n in [0, 1, m as i64 - 1, m as i64] {
        if !quantum_numerator(n, m).is_zero_in_ring() {
            return Err(Error::Internal(format!("u_{} does not vanish for m = {}", n, m)));
        }
    }
    let mut cc = consts();
    let tol = tolerance(&mut cc);
    let mut u = Vec::with_capacity(m - 3);
    for n in 2..=m - 2 {
        let exact = &CycloElem::monomial(6 - 3 * n as i64, m) * &gauss_binom3(n, m)?;
        if !(&exact * &den - quantum_numerator(n as i64, m)).is_zero_in_ring() {
            return Err(Error::Internal(format!("u_{} * [1][2][3] != [n-1][n][n+1] for m = {}", n, m)));
        }
        let value = sine_formula(n, m, &mut cc);
        let (re, im) = exact.eval(&mut cc);
        if !close(&value, &re, &tol) || !close(&BigFloat::from_i64(0, PRECISION), &im, &tol) {
            return Err(Error::Internal(format!("u_{} disagrees with the sine formula for m = {}", n, m)));
        }
        if !value.is_positive() {
            return Err(Error::Internal(format!("u_{} is not positive for m = {}", n, m)));
        }
        u.push(FamilyCoeff { n, exact, value });
    }
    for n in 2..=m - 2 {
        if u[n - 2].exact != u[m - n - 2].exact {
            return Err(Error::Internal(format!("u_{} != u_{} for m = {}", n, m - n, m)));
        }
    }
    Ok(FamilyPoly { m, u })
}

/// Whether `(Σ uₙtⁿ)(t² − (x+x⁻¹)t + 1)(t² − (x³+x⁻³)t + 1) = t²(1 + t^m)`
/// holds coefficient-wise, with `u[i] = u_{i+2}`.
pub fn identity_holds(m: usize, u: &[CycloElem]) -> bool {
    let mut p = vec![CycloElem::zero(m); 2];
    p.extend(u.iter().cloned());
    let c1 = &CycloElem::monomial(1, m) + &CycloElem::monomial(-1, m);
    let c3 = &CycloElem::monomial(3, m) + &CycloElem::monomial(-3, m);
    for c in [c1, c3] {
        // multiply by t² − c·t + 1
        let mut next = vec![CycloElem::zero(m); p.len() + 2];
        for (i, a) in p.iter().enumerate() {
            next[i] = &next[i] + a;
            next[i + 1] = &next[i + 1] - &(&c * a);
            next[i + 2] = &next[i + 2] + a;
        }
        p = next;
    }
    p.iter().enumerate().all(|(i, v)| if i == 2 || i == m + 2 { *v == CycloElem::one(m) } else { v.is_zero_at_root() })
}

/// Exact check of the rational-function identity for the family at `m`.
pub fn family_identity_check(m: usize) -> Result<bool> {
    let f = family_coefficients(m)?;
    Ok(identity_holds(m, &f.exact_coeffs()))
}

/// Outcome of comparing the cosine sum against the product form.
#[derive(Clone, Debug)]
pub struct ProductCheck {
    pub samples: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

/// `2^{m−3} ∏_{k=2}^{m−1} (cos θ − cos(2k+1)α)` at 128 bits.
pub fn product_form(m: usize, theta: &BigFloat, cc: &mut Consts) -> BigFloat {
    let alpha = pi(cc).div(&BigFloat::from_u64(m as u64, PRECISION), PRECISION, RM);
    let x = theta.cos(PRECISION, RM, cc);
    let mut p = BigFloat::from_i64(2, PRECISION).powi(m - 3, PRECISION, RM);
    for k in 2..m as u64 {
        let a = alpha.mul(&BigFloat::from_u64(2 * k + 1, PRECISION), PRECISION, RM);
        p = p.mul(&x.sub(&a.cos(PRECISION, RM, cc), PRECISION, RM), PRECISION, RM);
    }
    p
}

/// Compares both sides at `samples` angles drawn uniformly from `[0, π]`.
pub fn family_product_check(m: usize, samples: usize, seed: u64) -> Result<ProductCheck> {
    let f = family_coefficients(m)?;
    let mut cc = consts();
    let tol = tolerance(&mut cc);
    let mut rng = StdRng::seed_from_u64(seed);
    let pi = pi(&mut cc);
    let mut worst = BigFloat::from_i64(0, PRECISION);
    for _ in 0..samples {
        let t = BigFloat::from_f64(rng.gen_range(0.0..1.0), PRECISION);
        let theta = pi.mul(&t, PRECISION, RM);
        let d = f.eval(&theta, &mut cc).sub(&product_form(m, &theta, &mut cc), PRECISION, RM).abs();
        worst = worst.max(&d);
    }
    let passed = worst.cmp(&tol).is_some_and(|c| c < 0);
    Ok(ProductCheck { samples, max_deviation: to_f64(&worst), passed })
}

/// How a family threshold was established.
#[derive(Clone, Debug)]
pub enum ThresholdProof {
    /// Through the bound engine, with exact angle endpoints.
    Certified(Box<ExclusionCertificate>),
    /// Through the verified family conditions, for general `m`.
    Family { identity: bool, symmetric: bool, positive: bool, product: ProductCheck },
}

/// "More than `r^m + 1` points forces an angle in the excluded range."
#[derive(Clone, Debug)]
pub struct FamilyThreshold {
    pub m: usize,
    pub q: u64,
    pub threshold: QField,
    pub floor: BigInt,
    /// Excluded angle range, as text in units of π.
    pub excluded: String,
    pub proof: ThresholdProof,
}

impl FamilyThreshold {
    pub fn statement(&self) -> String {
        format!("N > {} => some Frobenius angle in {}", self.threshold, self.excluded)
    }

    /// Whether the proof went through.
    pub fn holds(&self) -> bool {
        match &self.proof {
            ThresholdProof::Certified(_) => true,
            ThresholdProof::Family { identity, symmetric, positive, product } => {
                *identity && *symmetric && *positive && product.passed
            }
        }
    }

    /// Whether a curve with `n` points stays within the threshold.
    pub fn admits(&self, n: &BigInt) -> bool {
        n <= &self.floor
    }
}

fn certified_threshold(
    m: usize,
    q: u64,
    f: &CosinePoly,
    alpha_x: &QField,
    beta_x: &QField,
    excluded: String,
) -> Result<FamilyThreshold> {
    let cert = exclusion_certificate(f, q, alpha_x, beta_x, Regime::U0Zero)?;
    let (value, floor) = match &cert.base.bound {
        Bound::Constant { value, floor, symmetry_m: Some(sm) } if *sm == m => (value.clone(), floor.clone()),
        other => {
            return Err(Error::Internal(format!("expected a symmetric constant bound for m = {}, got {}", m, other)))
        }
    };
    Ok(FamilyThreshold { m, q, threshold: value, floor, excluded, proof: ThresholdProof::Certified(Box::new(cert)) })
}

/// `kπ/m` in lowest terms, e.g. "pi/2" or "3pi/4".
fn pi_multiple(k: usize, m: usize) -> String {
    let g = num_integer::gcd(k, m);
    let (k, m) = (k / g, m / g);
    let num = if k == 1 { "pi".to_string() } else { format!("{}pi", k) };
    if m == 1 {
        num
    } else {
        format!("{}/{}", num, m)
    }
}

/// Threshold `r^m + 1` with its proof.
///
/// `m = 2` and `m = 3` use `cos θ` and `cos θ + cos 2θ`; `m = 4` with
/// `√q ∈ ℚ(√2)` and `m = 6` with `√q ∈ ℚ(√3)` run the family member
/// through the bound engine exactly; every other case rests on the
/// verified family identity, symmetry, positivity and product form.
pub fn family_threshold(m: usize, q: u64) -> Result<FamilyThreshold> {
    check_m(m, 2)?;
    if q < 2 {
        return Err(Error::Domain(format!("field size q = {} must be at least 2", q)));
    }
    let minus_one = QField::from_integer(-1);
    match m {
        2 => return certified_threshold(2, q, &CosinePoly::cos_n(1), &QField::zero(), &minus_one, "(pi/2, pi]".into()),
        3 => {
            let f = CosinePoly::parse(&["0", "1", "1"])?;
            return certified_threshold(3, q, &f, &QField::ratio(1, 2), &minus_one, "(pi/3, pi)".into());
        }
        _ => {}
    }
    let excluded = format!("({}, {})", pi_multiple(1, m), pi_multiple(3, m));
    let family = family_coefficients(m)?;
    let d = squarefree_part(q);
    if (m == 4 && d == 2) || (m == 6 && d == 3) {
        let f = family.to_cosine_poly().ok_or_else(|| Error::Internal("family member is not quadratic".into()))?;
        let (alpha_x, _) = exact_cos_sin(1, m).expect("tabulated");
        let (beta_x, _) = exact_cos_sin(3, m).expect("tabulated");
        return certified_threshold(m, q, &f, &alpha_x, &beta_x, excluded);
    }
    let u = family.exact_coeffs();
    let identity = identity_holds(m, &u);
    let symmetric = (2..=m - 2).all(|n| u[n - 2] == u[m - n - 2]);
    let positive = family.coeffs().iter().all(|c| c.value.is_positive());
    let product = family_product_check(m, 50, m as u64)?;
    let threshold = QField::sqrt_of(q).pow(m as i32) + QField::one();
    Ok(FamilyThreshold {
        m,
        q,
        floor: threshold.floor(),
        threshold,
        excluded,
        proof: ThresholdProof::Family { identity, symmetric, positive, product },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn ring_basics() {
        let m = 5;
        let x = CycloElem::monomial(1, m);
        let mut p = CycloElem::one(m);
        for _ in 0..m {
            p = &p * &x;
        }
        assert!((&p + &CycloElem::one(m)).is_zero_in_ring());
        assert_eq!(CycloElem::monomial(-1, m).coeffs()[m - 1], r(-1));
        assert!(CycloElem::quantum(0, m).is_zero_in_ring());
        assert!(CycloElem::quantum(m as i64, m).is_zero_in_ring());
    }

    #[test]
    fn cyclotomic_polynomials() {
        let phi = |n| cyclotomic(n).coeffs().iter().map(|c| c.to_f64() as i64).collect::<Vec<_>>();
        assert_eq!(phi(1), vec![-1, 1]);
        assert_eq!(phi(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(phi(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(phi(10), vec![1, -1, 1, -1, 1]);
    }

    #[test]
    fn gauss_binomials() {
        assert_eq!(gauss_binom3_poly(2).unwrap(), PowerPoly::from_ratios(&[1], 1));
        assert_eq!(gauss_binom3_poly(3).unwrap(), PowerPoly::from_ratios(&[1, 1, 1, 1], 1));
        assert_eq!(gauss_binom3(2, 9).unwrap(), CycloElem::one(9));
        assert!(gauss_binom3(1, 9).is_err());
        assert!(gauss_binom3(8, 9).is_err());
    }

    // coefficient of T^i in 1/((1−T)(1−yT)(1−y²T)(1−y³T)) is [i+3 choose 3]_y
    fn series_oracle(i: usize) -> Vec<i64> {
        let mut coeffs = vec![vec![0i64; 3 * i + 1]; i + 1];
        coeffs[0][0] = 1;
        for shift in 0..4 {
            for t in 1..=i {
                for e in 0..coeffs[t].len() {
                    if e >= shift {
                        coeffs[t][e] += coeffs[t - 1][e - shift];
                    }
                }
            }
        }
        let mut v = coeffs[i].clone();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    #[test]
    fn gauss_binomials_match_series() {
        for i in 0..=6 {
            let p = gauss_binom3_poly(i + 2).unwrap();
            let got: Vec<i64> = p.coeffs().iter().map(|c| c.to_f64() as i64).collect();
            assert_eq!(got, series_oracle(i), "i = {}", i);
        }
    }

    #[test]
    fn small_family_members() {
        let f4 = family_coefficients(4).unwrap();
        assert_eq!(f4.coeffs().len(), 1);
        assert_eq!(f4.to_cosine_poly().unwrap(), CosinePoly::cos_n(2));
        let f6 = family_coefficients(6).unwrap();
        assert_eq!(f6.to_cosine_poly().unwrap(), CosinePoly::parse(&["0", "0", "1", "sqrt(3)", "1"]).unwrap());
        let f5 = family_coefficients(5).unwrap();
        assert_eq!(f5.get(2).unwrap().exact, f5.get(3).unwrap().exact);
        assert!(family_coefficients(3).is_err());
    }

    #[test]
    fn identity_detects_perturbation() {
        assert!(family_identity_check(4).unwrap());
        assert!(family_identity_check(7).unwrap());
        let mut u = family_coefficients(6).unwrap().exact_coeffs();
        u[1] = &u[1] + &CycloElem::one(6);
        assert!(!identity_holds(6, &u));
    }

    #[test]
    fn product_form_at_zero() {
        let mut cc = consts();
        let f = family_coefficients(6).unwrap();
        let zero = BigFloat::from_i64(0, PRECISION);
        let expect = 2.0 + 3f64.sqrt();
        assert!((to_f64(&product_form(6, &zero, &mut cc)) - expect).abs() < 1e-12);
        assert!((to_f64(&f.eval(&zero, &mut cc)) - expect).abs() < 1e-12);
        assert!(family_product_check(12, 50, 7).unwrap().passed);
    }

    #[test]
    fn exact_trig_table() {
        let (c, s) = exact_cos_sin(1, 6).unwrap();
        assert_eq!(c, "1/2*sqrt(3)".parse().unwrap());
        assert_eq!(s, QField::ratio(1, 2));
        let (c, s) = exact_cos_sin(3, 4).unwrap();
        assert_eq!(c, "-1/2*sqrt(2)".parse().unwrap());
        assert_eq!(s, "1/2*sqrt(2)".parse().unwrap());
        assert!(exact_cos_sin(1, 5).is_none());
        assert_eq!(exact_cos_sin(7, 6).unwrap().0, "-1/2*sqrt(3)".parse().unwrap());
    }

    #[test]
    fn thresholds() {
        let t = family_threshold(4, 8).unwrap();
        assert_eq!(t.threshold, QField::from_integer(65));
        assert!(matches!(t.proof, ThresholdProof::Certified(_)));
        assert!(t.admits(&BigInt::from(65)));
        assert!(!t.admits(&BigInt::from(66)));
        let t = family_threshold(6, 3).unwrap();
        assert_eq!(t.floor, BigInt::from(28));
        let t = family_threshold(2, 7).unwrap();
        assert_eq!(t.threshold, QField::from_integer(8));
        let t = family_threshold(3, 4).unwrap();
        assert_eq!(t.threshold, QField::from_integer(9));
        let t = family_threshold(5, 2).unwrap();
        assert!(t.holds());
        assert_eq!(t.threshold, "1 + 4*sqrt(2)".parse().unwrap());
    }

    #[test]
    fn endpoint_at_pi_matches_label() {
        // cos θ is negative at π, cos θ + cos 2θ vanishes there
        for (m, q, closed) in [(2, 5, true), (3, 2, false)] {
            let t = family_threshold(m, q).unwrap();
            let ThresholdProof::Certified(cert) = &t.proof else { panic!("m = {} not certified", m) };
            assert_eq!(cert.excluded.lo_closed, closed, "m = {}", m);
            assert_eq!(t.excluded.ends_with(']'), closed);
        }
    }
}
