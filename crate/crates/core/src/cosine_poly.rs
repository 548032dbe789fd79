//! Cosine polynomials `f(θ) = u₀ + Σ uₙ cos nθ`, their power series
//! `ψ(x) = Σ_{n≥1} uₙ xⁿ`, and exact nonnegativity on an angle set.
//!
//! Everything happens in the coordinate `x = cos θ`: `cos nθ = Tₙ(x)` with
//! `Tₙ` the Chebyshev polynomials of the first kind.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::QField;
use crate::poly::{component_samples, nonroot_between, shared_radicand, PowerPoly, SturmChain};
use crate::theta_sets::ThetaSet;

/// Largest degree accepted in exact mode.
pub const MAX_DEGREE: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CosinePolyRepr")]
pub struct CosinePoly {
    u: Vec<QField>,
}

#[derive(Deserialize)]
struct CosinePolyRepr {
    u: Vec<QField>,
}

impl TryFrom<CosinePolyRepr> for CosinePoly {
    type Error = Error;
    fn try_from(r: CosinePolyRepr) -> Result<Self> {
        CosinePoly::new(r.u)
    }
}

/// Chebyshev polynomials `T₀ … T_n` in the power basis.
pub fn chebyshev_table(n: usize) -> Vec<PowerPoly> {
    let mut t = vec![PowerPoly::constant(QField::one())];
    if n == 0 {
        return t;
    }
    t.push(PowerPoly::x());
    let two_x = PowerPoly::x().scale(&QField::from_integer(2));
    for k in 2..=n {
        let next = two_x.mul(&t[k - 1]).sub(&t[k - 2]);
        t.push(next);
    }
    t
}

impl CosinePoly {
    /// Coefficients `u₀, u₁, …`; trailing zeros are dropped.
    pub fn new(mut u: Vec<QField>) -> Result<Self> {
        shared_radicand(&u)?;
        while u.len() > 1 && u.last().is_some_and(QField::is_zero) {
            u.pop();
        }
        if u.is_empty() {
            u.push(QField::zero());
        }
        if u.len() - 1 > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(u.len() - 1, MAX_DEGREE));
        }
        Ok(CosinePoly { u })
    }

    /// Parses each coefficient with the `QField` literal syntax.
    pub fn parse(coeffs: &[&str]) -> Result<Self> {
        Self::new(coeffs.iter().map(|s| s.parse()).collect::<Result<_>>()?)
    }

    pub fn zero() -> Self {
        CosinePoly { u: vec![QField::zero()] }
    }

    /// `cos nθ`.
    pub fn cos_n(n: usize) -> Self {
        let mut u = vec![QField::zero(); n + 1];
        u[n] = QField::one();
        CosinePoly { u }
    }

    pub fn coeffs(&self) -> &[QField] {
        &self.u
    }

    pub fn coeff(&self, n: usize) -> QField {
        self.u.get(n).cloned().unwrap_or_else(QField::zero)
    }

    pub fn u0(&self) -> &QField {
        &self.u[0]
    }

    pub fn degree(&self) -> usize {
        self.u.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.u.len() == 1 && self.u[0].is_zero()
    }

    pub fn radicand(&self) -> u64 {
        shared_radicand(&self.u).unwrap_or(0)
    }

    pub fn scale(&self, k: &QField) -> CosinePoly {
        CosinePoly::new(self.u.iter().map(|c| c * k).collect()).expect("same radicand")
    }

    /// Divides by `u₀`, which must be positive.
    pub fn normalize_u0(&self) -> Result<CosinePoly> {
        if !self.u[0].is_positive() {
            return Err(Error::Unusable(format!("cannot normalize u0 = {} to 1", self.u[0])));
        }
        Ok(self.scale(&self.u[0].inv()))
    }

    /// `P(x)` with `P(cos θ) = f(θ)`.
    pub fn to_power(&self) -> PowerPoly {
        let table = chebyshev_table(self.degree());
        self.u.iter().zip(&table).fold(PowerPoly::zero(), |acc, (u, t)| acc.add(&t.scale(u)))
    }

    /// Inverse of [`CosinePoly::to_power`].
    pub fn from_power(p: &PowerPoly) -> Result<Self> {
        let Some(deg) = p.degree() else {
            return Ok(Self::zero());
        };
        if deg > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(deg, MAX_DEGREE));
        }
        let table = chebyshev_table(deg);
        let mut rest = p.clone();
        let mut u = vec![QField::zero(); deg + 1];
        for k in (0..=deg).rev() {
            let c = rest.coeff(k);
            if c.is_zero() {
                continue;
            }
            // T_k has leading coefficient 2^(k-1) for k ≥ 1
            let lead = table[k].lead().expect("nonzero").clone();
            let uk = &c / &lead;
            rest = rest.sub(&table[k].scale(&uk));
            u[k] = uk;
        }
        Self::new(u)
    }

    /// `f` at the angle whose cosine is `x`; requires `x ∈ [−1, 1]`.
    pub fn eval_f(&self, x: &QField) -> Result<QField> {
        shared_radicand(self.u.iter().chain([x]))?;
        if x > &QField::one() || x < &QField::from_integer(-1) {
            return Err(Error::Domain(format!("cos θ = {} lies outside [-1, 1]", x)));
        }
        Ok(self.to_power().eval(x))
    }

    /// `ψ(x) = Σ_{n≥1} uₙ xⁿ`.
    pub fn psi(&self, x: &QField) -> QField {
        self.u.iter().skip(1).rev().fold(QField::zero(), |acc, u| (&acc + u) * x)
    }

    /// Exact decision of `f ≥ 0` on every point and interval of `theta`.
    pub fn is_nonneg_on(&self, theta: &ThetaSet) -> Nonnegativity {
        let p = self.to_power();
        if p.is_zero() {
            return Nonnegativity::Nonnegative;
        }
        for x in theta.points() {
            if p.eval(x).is_negative() {
                return Nonnegativity::Negative { witness: x.clone() };
            }
        }
        let odd = p.odd_multiplicity_part();
        for (lo, hi) in theta.intervals() {
            if !nonneg_on_interval(&p, &odd, lo, hi) {
                return Nonnegativity::Negative { witness: negative_witness(&p, lo, hi) };
            }
        }
        Nonnegativity::Nonnegative
    }
}

/// Sign can only change at roots of odd multiplicity; with none inside the
/// interval one interior sample and the endpoints decide.
fn nonneg_on_interval(p: &PowerPoly, odd: &PowerPoly, lo: &QField, hi: &QField) -> bool {
    if p.eval(lo).is_negative() || p.eval(hi).is_negative() {
        return false;
    }
    if odd.degree().unwrap_or(0) > 0 {
        let chain = SturmChain::new(odd).expect("nonzero");
        if chain.count_open(lo, hi) > 0 {
            return false;
        }
    }
    !p.eval(&nonroot_between(p, lo, hi)).is_negative()
}

/// A rational point of `(lo, hi)` where `p < 0`, assuming one exists.
fn negative_witness(p: &PowerPoly, lo: &QField, hi: &QField) -> QField {
    let samples = component_samples(p, lo, hi).expect("nonzero polynomial");
    samples.into_iter().find(|x| p.eval(x).is_negative()).unwrap_or_else(|| {
        if p.eval(lo).is_negative() {
            lo.clone()
        } else {
            hi.clone()
        }
    })
}

/// Outcome of an exact nonnegativity check.
#[derive(Clone, Debug, PartialEq)]
pub enum Nonnegativity {
    Nonnegative,
    /// `f(witness) < 0` with `witness` in the set.
    Negative {
        witness: QField,
    },
}

impl Nonnegativity {
    pub fn holds(&self) -> bool {
        matches!(self, Nonnegativity::Nonnegative)
    }

    pub fn witness(&self) -> Option<&QField> {
        match self {
            Nonnegativity::Nonnegative => None,
            Nonnegativity::Negative { witness } => Some(witness),
        }
    }
}

impl fmt::Display for CosinePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, u) in self.u.iter().enumerate() {
            if u.is_zero() && !(n == 0 && self.u.len() == 1) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "({})", u)?,
                1 => write!(f, "({}) cos θ", u)?,
                _ => write!(f, "({}) cos {}θ", u, n)?,
            }
        }
        Ok(())
    }
}
