//! Explicit-formula bounds and their certificates.
//!
//! For a curve of genus `g` over F_q with Frobenius angles `θ_j`, write
//! `r = √q`. Summing `N₁r⁻ⁿ + (N_n − N₁)r⁻ⁿ = rⁿ + r⁻ⁿ − Σ 2cos nθ_j` against
//! the coefficients of `f(θ) = u₀ + Σ uₙ cos nθ` gives the identity
//!
//! ```text
//! N₁ψ(r⁻¹) + Σ_{n≥2} uₙ(N_n − N₁)r⁻ⁿ = 2u₀g + ψ(r) + ψ(r⁻¹) − 2 Σ_j f(θ_j)
//! ```
//!
//! With `uₙ ≥ 0` for `n ≥ 2` (so the left-hand slack is nonnegative, since
//! `N_n ≥ N₁`) and `f ≥ 0` on a set Θ holding every angle, the right-hand
//! sum can be dropped and one of three bounds follows, depending on `u₀`:
//!
//! * `u₀ = 1`: `N ψ(r⁻¹) ≤ 2g + ψ(r⁻¹) + ψ(r)`, linear in the genus;
//! * `u₀ = 0`: `N ψ(r⁻¹) ≤ ψ(r⁻¹) + ψ(r)`, independent of the genus;
//! * `u₀ = −1`: `N ψ(r⁻¹) + 2g ≤ ψ(r) + ψ(r⁻¹)`, which caps the genus when
//!   `ψ(r⁻¹) = 0`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cosine_poly::CosinePoly;
use crate::error::{Error, Result};
use crate::exactnum::{squarefree_part, QField};
use crate::poly::{shared_radicand, SturmChain};
use crate::theta_sets::ThetaSet;
use crate::zeta::WeilPoly;

/// Which value `u₀` takes, and how strict the coefficient condition is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `u₀ = 1` and `uₙ ≥ 0` for every `n ≥ 1`, with `f ≥ 0` on Θ.
    U0One,
    /// `u₀ = 1` and `uₙ ≥ 0` only for `n ≥ 2`.
    U0OneRelaxed,
    /// `u₀ = 0`: genus-free point bound.
    U0Zero,
    /// `u₀ = −1`: genus bound.
    U0MinusOne,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::U0One, Regime::U0OneRelaxed, Regime::U0Zero, Regime::U0MinusOne];

    pub fn u0(self) -> i64 {
        match self {
            Regime::U0One | Regime::U0OneRelaxed => 1,
            Regime::U0Zero => 0,
            Regime::U0MinusOne => -1,
        }
    }

    /// Smallest index whose coefficient must be nonnegative.
    pub fn first_constrained(self) -> usize {
        match self {
            Regime::U0One => 1,
            _ => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::U0One => "u0_one",
            Regime::U0OneRelaxed => "u0_one_relaxed",
            Regime::U0Zero => "u0_zero",
            Regime::U0MinusOne => "u0_minus_one",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL.into_iter().find(|r| r.as_str() == s).ok_or_else(|| Error::Parse(format!("unknown regime '{}'", s)))
    }
}

/// The four hypotheses a bound may rest on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// Sign pattern of the coefficients.
    A,
    /// `f ≥ 0` on Θ.
    B,
    /// `uₙ = u_{m−n}` for `n = 0..m`.
    C,
    /// `ψ(r⁻¹) = 0`.
    D,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Condition::A => "a",
            Condition::B => "b",
            Condition::C => "c",
            Condition::D => "d",
        };
        write!(f, "({})", c)
    }
}

/// Result of checking conditions (a)–(d). `None` means not applicable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conditions {
    pub a: bool,
    pub b: bool,
    pub c: Option<bool>,
    pub d: Option<bool>,
    /// The symmetry index `m` that (c) was checked against.
    pub symmetry_m: Option<usize>,
    /// A point of Θ where `f < 0`, when (b) fails.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<QField>,
}

impl Conditions {
    /// First failing condition among (a), (b) and any required ones.
    pub fn first_failure(&self, require_c: bool, require_d: bool) -> Option<Condition> {
        if !self.a {
            Some(Condition::A)
        } else if !self.b {
            Some(Condition::B)
        } else if require_c && self.c != Some(true) {
            Some(Condition::C)
        } else if require_d && self.d != Some(true) {
            Some(Condition::D)
        } else {
            None
        }
    }
}

/// Radicand of the session for field size `q`, checked against the data.
fn session_radicand(q: u64, f: &CosinePoly, theta: &ThetaSet) -> Result<u64> {
    if q < 2 {
        return Err(Error::Domain(format!("field size q = {} must be at least 2", q)));
    }
    let r = QField::sqrt_of(q);
    let d = shared_radicand(f.coeffs().iter().chain([&r]))?;
    let td = theta.radicand();
    if td > 1 && d > 1 && td != d {
        return Err(Error::RadicandMismatch(d, td));
    }
    Ok(d.max(squarefree_part(q)))
}

/// `(ψ(r), ψ(r⁻¹))` for `r = √q`.
pub fn psi_pair(f: &CosinePoly, q: u64) -> (QField, QField) {
    let r = QField::sqrt_of(q);
    (f.psi(&r), f.psi(&r.inv()))
}

/// Whether `uₙ = u_{m−n}` for `n = 0..m`, with `m > deg ψ`.
pub fn is_symmetric(f: &CosinePoly, m: usize) -> bool {
    m > f.degree() && (0..=m).all(|n| f.coeff(n) == f.coeff(m - n))
}

/// Smallest `m` for which condition (c) holds, if any.
pub fn detect_symmetry(f: &CosinePoly) -> Option<usize> {
    let deg = f.degree();
    if deg == 0 {
        return None;
    }
    (deg + 1..=2 * deg).find(|&m| is_symmetric(f, m))
}

/// Evaluates conditions (a)–(d) for `f` on Θ under `regime`.
pub fn check_conditions(
    f: &CosinePoly,
    theta: &ThetaSet,
    regime: Regime,
    q: u64,
    symmetry_m: Option<usize>,
) -> Result<Conditions> {
    session_radicand(q, f, theta)?;
    let expected = QField::from_integer(regime.u0());
    if f.u0() != &expected {
        return Err(Error::RegimeMismatch {
            regime: regime.to_string(),
            expected: expected.to_string(),
            found: f.u0().to_string(),
        });
    }
    let a = f.coeffs().iter().skip(regime.first_constrained()).all(|u| u.sign() >= 0);
    let nonneg = f.is_nonneg_on(theta);
    let c = symmetry_m.map(|m| is_symmetric(f, m));
    let d = (regime == Regime::U0MinusOne).then(|| psi_pair(f, q).1.is_zero());
    Ok(Conditions { a, b: nonneg.holds(), c, d, symmetry_m, witness: nonneg.witness().cloned() })
}

/// The inequality a certificate proves for every curve over F_q whose
/// Frobenius angles all lie in Θ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    /// `N ≤ slope·g + intercept`.
    Linear { slope: QField, intercept: QField },
    /// `N ≤ value`; equals `r^m + 1` when the coefficients are symmetric.
    Constant {
        value: QField,
        #[serde(with = "bigint_str")]
        floor: BigInt,
        symmetry_m: Option<usize>,
    },
    /// `2g ≤ two_g_max`.
    GenusCap {
        two_g_max: QField,
        #[serde(with = "bigint_str")]
        genus_max: BigInt,
    },
    /// `N·n_coeff + 2g ≤ rhs`.
    Combined { n_coeff: QField, rhs: QField },
}

impl Bound {
    /// Whether a curve with `n` points and genus `g` satisfies the bound.
    pub fn admits(&self, n: &BigInt, g: u64) -> bool {
        let n = QField::from_rational(n.clone().into());
        let g = QField::from_integer(g as i64);
        let two_g = &g * &QField::from_integer(2);
        match self {
            Bound::Linear { slope, intercept } => (slope * &g + intercept - n).sign() >= 0,
            Bound::Constant { value, .. } => (value - &n).sign() >= 0,
            Bound::GenusCap { two_g_max, .. } => (two_g_max - &two_g).sign() >= 0,
            Bound::Combined { n_coeff, rhs } => (rhs - &(n * n_coeff + two_g)).sign() >= 0,
        }
    }

    /// Integer point bound at genus `g`, where the bound constrains `N`.
    pub fn max_points(&self, g: u64) -> Option<BigInt> {
        match self {
            Bound::Linear { slope, intercept } => Some((slope * &QField::from_integer(g as i64) + intercept).floor()),
            Bound::Constant { floor, .. } => Some(floor.clone()),
            Bound::Combined { n_coeff, rhs } if n_coeff.is_positive() => {
                let two_g = QField::from_integer(2 * g as i64);
                Some(((rhs - &two_g) / n_coeff.clone()).floor())
            }
            _ => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Linear { slope, intercept } => write!(f, "N <= ({})*g + ({})", slope, intercept),
            Bound::Constant { value, floor, .. } if value.is_rational() && value.rational_part().is_integer() => {
                write!(f, "N <= {}", floor)
            }
            Bound::Constant { value, floor, .. } => write!(f, "N <= {} (so N <= {})", value, floor),
            Bound::GenusCap { two_g_max, genus_max } => {
                write!(f, "2g <= {} (so g <= {})", two_g_max, genus_max)
            }
            Bound::Combined { n_coeff, rhs } => write!(f, "({})*N + 2g <= {}", n_coeff, rhs),
        }
    }
}

/// What an extremal curve must satisfy for the bound to be attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tightness {
    /// `N_n = N₁` for each listed `n` (those with `uₙ ≠ 0`, `n ≥ 2`).
    PointCountsEqual { indices: Vec<usize> },
    /// `f(θ_j) = 0` for every angle: the listed points of Θ are the known
    /// zeros of `f`, and `interior_roots[i]` counts further distinct zeros
    /// strictly inside the i-th interval of Θ.
    AnglesAtZeros { zeros: Vec<QField>, interior_roots: Vec<usize> },
}

fn tightness(f: &CosinePoly, theta: &ThetaSet) -> Vec<Tightness> {
    let indices: Vec<usize> = (2..=f.degree()).filter(|&n| !f.coeff(n).is_zero()).collect();
    let p = f.to_power();
    let mut zeros: Vec<QField> = theta.points().iter().filter(|x| p.eval(x).is_zero()).cloned().collect();
    let mut interior_roots = Vec::new();
    for (lo, hi) in theta.intervals() {
        for e in [lo, hi] {
            if p.eval(e).is_zero() && !zeros.contains(e) {
                zeros.push(e.clone());
            }
        }
        let n = if p.is_zero() { 0 } else { SturmChain::new(&p).map(|c| c.count_open(lo, hi)).unwrap_or(0) };
        interior_roots.push(n);
    }
    zeros.sort_by(|a, b| a.try_cmp(b).expect("same field"));
    vec![Tightness::PointCountsEqual { indices }, Tightness::AnglesAtZeros { zeros, interior_roots }]
}

/// A verified bound together with everything needed to re-check it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub regime: Regime,
    pub q: u64,
    pub f: CosinePoly,
    pub theta: ThetaSet,
    pub psi_r: QField,
    pub psi_rinv: QField,
    pub bound: Bound,
    pub conditions: Conditions,
    pub tightness: Vec<Tightness>,
}

fn condition_error(conds: &Conditions, c: Condition) -> Error {
    let witness = if c == Condition::B { conds.witness.clone().map(Box::new) } else { None };
    Error::ConditionFailed { condition: c, witness }
}

/// Checks the hypotheses for `regime` and derives the bound.
pub fn certify(f: &CosinePoly, theta: &ThetaSet, q: u64, regime: Regime) -> Result<BoundCertificate> {
    let symmetry_m = if regime == Regime::U0Zero { detect_symmetry(f) } else { None };
    let conditions = check_conditions(f, theta, regime, q, symmetry_m)?;
    if let Some(c) = conditions.first_failure(false, false) {
        return Err(condition_error(&conditions, c));
    }
    let (psi_r, psi_rinv) = psi_pair(f, q);
    let bound = match regime {
        Regime::U0One | Regime::U0OneRelaxed | Regime::U0Zero => {
            if !psi_rinv.is_positive() {
                return Err(Error::Unusable(format!("psi(1/sqrt(q)) = {} is not positive", psi_rinv)));
            }
            let intercept = (&psi_r + &psi_rinv) / psi_rinv.clone();
            if regime == Regime::U0Zero {
                if let Some(m) = symmetry_m {
                    let expected = QField::sqrt_of(q).pow(m as i32) + QField::one();
                    if intercept != expected {
                        return Err(Error::Internal(format!(
                            "symmetric coefficients (m = {}) gave {} instead of r^m + 1 = {}",
                            m, intercept, expected
                        )));
                    }
                }
                Bound::Constant { floor: intercept.floor(), value: intercept, symmetry_m }
            } else {
                let slope = QField::from_integer(2) / psi_rinv.clone();
                Bound::Linear { slope, intercept }
            }
        }
        Regime::U0MinusOne => match psi_rinv.sign() {
            0 => {
                let genus_max = (&psi_r / &QField::from_integer(2)).floor();
                Bound::GenusCap { two_g_max: psi_r.clone(), genus_max }
            }
            1 => Bound::Combined { n_coeff: psi_rinv.clone(), rhs: &psi_r + &psi_rinv },
            _ => return Err(condition_error(&conditions, Condition::D)),
        },
    };
    Ok(BoundCertificate {
        regime,
        q,
        f: f.clone(),
        theta: theta.clone(),
        psi_r,
        psi_rinv,
        bound,
        tightness: tightness(f, theta),
        conditions,
    })
}

/// `u₀ = 1` with `uₙ ≥ 0` for all `n ≥ 1`: `N ≤ (2/ψ(r⁻¹))·g + (ψ(r)+ψ(r⁻¹))/ψ(r⁻¹)`.
pub fn bound_u0_one(f: &CosinePoly, theta: &ThetaSet, q: u64) -> Result<BoundCertificate> {
    certify(f, theta, q, Regime::U0One)
}

/// `u₀ = 0`: `N ≤ (ψ(r)+ψ(r⁻¹))/ψ(r⁻¹)`.
pub fn bound_u0_zero(f: &CosinePoly, theta: &ThetaSet, q: u64) -> Result<BoundCertificate> {
    certify(f, theta, q, Regime::U0Zero)
}

/// `u₀ = −1`: `2g ≤ ψ(r)` when `ψ(r⁻¹) = 0`, otherwise the combined
/// inequality `N·ψ(r⁻¹) + 2g ≤ ψ(r) + ψ(r⁻¹)` when `ψ(r⁻¹) > 0`.
pub fn bound_u0_minus_one(f: &CosinePoly, theta: &ThetaSet, q: u64) -> Result<BoundCertificate> {
    certify(f, theta, q, Regime::U0MinusOne)
}

impl BoundCertificate {
    /// Genus cap `⌊ψ(r)/2⌋`, present only when condition (d) holds.
    pub fn genus_cap(&self) -> Option<&BigInt> {
        match &self.bound {
            Bound::GenusCap { genus_max, .. } => Some(genus_max),
            _ => None,
        }
    }

    /// Re-derives the certificate from its inputs and compares.
    pub fn verify(&self) -> Result<()> {
        let again = certify(&self.f, &self.theta, self.q, self.regime)?;
        if &again != self {
            return Err(Error::Internal("certificate does not match its re-derivation".into()));
        }
        Ok(())
    }

    /// Whether the curve with zeta numerator `w` satisfies the certified
    /// inequality.
    pub fn admits(&self, w: &WeilPoly) -> bool {
        let n1 = w.point_counts(1);
        self.bound.admits(n1.get(1), w.genus())
    }

    /// Whether every angle of `w` lies in Θ.
    pub fn covers_angles(&self, w: &WeilPoly) -> bool {
        w.angle_multiset().iter().all(|(x, _)| self.theta.contains(x))
    }
}

/// Both sides of the explicit formula for concrete zeta data.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub lhs: QField,
    pub rhs: QField,
    /// `uₙ(N_n − N₁)r⁻ⁿ` for `n = 2..deg f`.
    pub slack: Vec<(usize, QField)>,
    /// `2 Σ_j f(θ_j)` over all `g` angles.
    pub angle_sum: QField,
}

impl IdentityReport {
    /// Whether every slack term and the angle sum vanish.
    pub fn is_tight(&self) -> bool {
        self.angle_sum.is_zero() && self.slack.iter().all(|(_, s)| s.is_zero())
    }
}

/// Evaluates both sides of the explicit formula exactly.
pub fn explicit_formula_identity(f: &CosinePoly, w: &WeilPoly) -> Result<IdentityReport> {
    let q = w.q();
    let r = QField::sqrt_of(q);
    shared_radicand(f.coeffs().iter().chain([&r]))?;
    let deg = f.degree();
    if deg == 0 {
        return Err(Error::Degenerate("psi has degree 0".into()));
    }
    let counts = w.point_counts(deg);
    let n = |m: usize| QField::from_rational(counts.get(m).clone().into());
    let (psi_r, psi_rinv) = psi_pair(f, q);
    let rinv = r.inv();

    let slack: Vec<(usize, QField)> = (2..=deg).map(|k| (k, f.coeff(k) * (n(k) - n(1)) * rinv.pow(k as i32))).collect();
    let lhs = slack.iter().fold(&n(1) * &psi_rinv, |acc, (_, s)| acc + s);

    let mut angle_sum = QField::zero();
    for (x, e) in w.angle_multiset() {
        angle_sum = angle_sum + f.eval_f(&x)? * QField::from_integer(e as i64);
    }
    angle_sum = angle_sum * QField::from_integer(2);
    let two_u0_g = f.u0() * &QField::from_integer(2 * w.genus() as i64);
    let rhs = two_u0_g + &psi_r + &psi_rinv - &angle_sum;

    if lhs != rhs {
        return Err(Error::Internal(format!("explicit formula broke: {} != {}", lhs, rhs)));
    }
    Ok(IdentityReport { lhs, rhs, slack, angle_sum })
}

/// The set of angles a curve must hit when it violates a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcludedInterval {
    pub lo: QField,
    pub hi: QField,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl fmt::Display for ExcludedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{}{}, {}{}", open, self.lo, self.hi, close)
    }
}

/// "Exceeding the bound forces an angle with `cos θ` in the excluded interval."
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExclusionCertificate {
    pub base: BoundCertificate,
    pub excluded: ExcludedInterval,
}

impl ExclusionCertificate {
    pub fn statement(&self) -> String {
        let premise = match &self.base.bound {
            Bound::Linear { slope, intercept } => format!("N > ({})*g + ({})", slope, intercept),
            Bound::Constant { value, .. } => format!("N > {}", value),
            Bound::GenusCap { two_g_max, .. } => format!("2g > {}", two_g_max),
            Bound::Combined { n_coeff, rhs } => format!("({})*N + 2g > {}", n_coeff, rhs),
        };
        format!("{} => some Frobenius angle has cos(theta) in {}", premise, self.excluded)
    }
}

/// Certificate for `Θ = [0, π] ∖ (α, β)` given `cos α` and `cos β`.
///
/// With `β = π` (`beta_x = −1`) the point `π` stays in Θ when `f(π) ≥ 0`, so
/// the excluded set is `(α, π)`. Otherwise it is the half-open `(α, π]`,
/// i.e. `cos θ ∈ [−1, cos α)`.
pub fn exclusion_certificate(
    f: &CosinePoly,
    q: u64,
    alpha_x: &QField,
    beta_x: &QField,
    regime: Regime,
) -> Result<ExclusionCertificate> {
    let minus_one = QField::from_integer(-1);
    if alpha_x == beta_x {
        return Err(Error::Domain("excluded angle interval is empty".into()));
    }
    let (theta, excluded) = if beta_x == &minus_one {
        let keep_pi = !f.eval_f(&minus_one)?.is_negative();
        let theta = if keep_pi {
            ThetaSet::new(vec![(alpha_x.clone(), QField::one())], vec![minus_one.clone()])?
        } else {
            ThetaSet::angles_up_to(alpha_x)?
        };
        let ex = ExcludedInterval { lo: minus_one, hi: alpha_x.clone(), lo_closed: !keep_pi, hi_closed: false };
        (theta, ex)
    } else {
        let theta = ThetaSet::complement_of_interval(alpha_x, beta_x)?;
        let ex = ExcludedInterval { lo: beta_x.clone(), hi: alpha_x.clone(), lo_closed: false, hi_closed: false };
        (theta, ex)
    };
    let base = certify(f, &theta, q, regime)?;
    Ok(ExclusionCertificate { base, excluded })
}

mod bigint_str {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}
