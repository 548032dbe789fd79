//! Zeta numerators made of quadratic factors and the point counts they
//! determine.
//!
//! A factor `(1 + aT + qT²)^e` contributes `e` conjugate pairs of Frobenius
//! eigenvalues with `α + ᾱ = −a`, hence angle `cos θ = −a / (2√q)`. The
//! power sums `s_m = αᵐ + ᾱᵐ` satisfy `s₀ = 2`, `s₁ = −a` and
//! `s_m = −a·s_{m−1} − q·s_{m−2}`, and
//! `N_m = qᵐ + 1 − Σ e·s_m`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::QField;

/// `P(T) = ∏ (1 + aT + qT²)^e` over F_q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeilPolyRepr")]
pub struct WeilPoly {
    q: u64,
    factors: Vec<(i64, u32)>,
}

#[derive(Deserialize)]
struct WeilPolyRepr {
    q: u64,
    factors: Vec<(i64, u32)>,
}

impl TryFrom<WeilPolyRepr> for WeilPoly {
    type Error = Error;
    fn try_from(r: WeilPolyRepr) -> Result<Self> {
        WeilPoly::new(r.q, r.factors)
    }
}

impl WeilPoly {
    /// Multiplicities must be positive and `q ≥ 2`; the Weil bound on each
    /// factor is checked by [`WeilPoly::validate`], not here.
    pub fn new(q: u64, factors: Vec<(i64, u32)>) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("field size q = {} must be at least 2", q)));
        }
        if let Some((a, _)) = factors.iter().find(|(_, e)| *e == 0) {
            return Err(Error::Domain(format!("factor with trace {} has multiplicity 0", a)));
        }
        Ok(WeilPoly { q, factors })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn factors(&self) -> &[(i64, u32)] {
        &self.factors
    }

    pub fn genus(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64).sum()
    }

    /// `N₁, …, N_M`.
    pub fn point_counts(&self, upto: usize) -> PointCounts {
        let q = BigInt::from(self.q);
        let mut totals = vec![BigInt::zero(); upto + 1];
        for &(a, e) in &self.factors {
            let a = BigInt::from(a);
            let e = BigInt::from(e);
            let mut prev = BigInt::from(2);
            let mut cur = -a.clone();
            for total in totals.iter_mut().skip(1) {
                *total += &e * &cur;
                let next = -&a * &cur - &q * &prev;
                prev = std::mem::replace(&mut cur, next);
            }
        }
        let mut qm = BigInt::from(1);
        let mut n = Vec::with_capacity(upto);
        for total in totals.iter().skip(1) {
            qm *= &q;
            n.push(&qm + 1 - total);
        }
        PointCounts { n }
    }

    /// `(cos θ, multiplicity)` for each factor, in ℚ(√squarefree(q)).
    pub fn angle_multiset(&self) -> Vec<(QField, u32)> {
        let half_rinv = QField::sqrt_of(self.q).inv() * QField::ratio(-1, 2);
        self.factors.iter().map(|&(a, e)| (&half_rinv * &QField::from_integer(a), e)).collect()
    }

    /// Weil bound per factor, `N_m ≥ 0` and `N_{dm} ≥ N_m` for `dm ≤ M`.
    pub fn validate(&self, upto: usize) -> Validation {
        for &(a, _) in &self.factors {
            if (a as i128) * (a as i128) > 4 * self.q as i128 {
                return Validation::Fail(Violation::WeilBound { a, q: self.q });
            }
        }
        let counts = self.point_counts(upto);
        let n = counts.as_slice();
        for (i, v) in n.iter().enumerate() {
            if v.is_negative() {
                return Validation::Fail(Violation::NegativeCount { m: i + 1, value: v.clone() });
            }
        }
        for m in 1..=upto {
            for dm in (2 * m..=upto).step_by(m) {
                if n[dm - 1] < n[m - 1] {
                    return Validation::Fail(Violation::Decreasing {
                        m,
                        dm,
                        n_m: n[m - 1].clone(),
                        n_dm: n[dm - 1].clone(),
                    });
                }
            }
        }
        Validation::Pass
    }
}

impl fmt::Display for WeilPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(a, e)| {
                let mid = match a {
                    0 => String::new(),
                    1 => " + T".into(),
                    -1 => " - T".into(),
                    a if a < 0 => format!(" - {}T", -a),
                    a => format!(" + {}T", a),
                };
                let base = format!("(1{} + {}T^2)", mid, self.q);
                if e == 1 {
                    base
                } else {
                    format!("{}^{}", base, e)
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(""))
        }
    }
}

/// `N₁ … N_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCounts {
    n: Vec<BigInt>,
}

impl PointCounts {
    /// `N_m` for `m ≥ 1`.
    pub fn get(&self, m: usize) -> &BigInt {
        &self.n[m - 1]
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    /// Tab-separated `m`, `N_m` rows with a header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("m\tN_m\n");
        for (i, v) in self.n.iter().enumerate() {
            out.push_str(&format!("{}\t{}\n", i + 1, v));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validation {
    Pass,
    Fail(Violation),
}

impl Validation {
    pub fn passed(&self) -> bool {
        matches!(self, Validation::Pass)
    }
}

/// First violated constraint found by [`WeilPoly::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WeilBound { a: i64, q: u64 },
    NegativeCount { m: usize, value: BigInt },
    Decreasing { m: usize, dm: usize, n_m: BigInt, n_dm: BigInt },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WeilBound { a, q } => {
                write!(f, "factor trace {} violates a^2 <= 4q = {}", a, 4 * q)
            }
            Violation::NegativeCount { m, value } => write!(f, "N_{} = {} is negative", m, value),
            Violation::Decreasing { m, dm, n_m, n_dm } => {
                write!(f, "N_{} = {} is smaller than N_{} = {}", dm, n_dm, m, n_m)
            }
        }
    }
}
