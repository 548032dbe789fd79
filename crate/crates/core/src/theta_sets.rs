//! Allowed-angle sets Θ ⊆ [0, π], stored in the coordinate `x = cos θ`.
//!
//! Because cosine is decreasing on [0, π], an angle interval `(α, β)` maps
//! to the x-interval `(cos β, cos α)`. Every set is a sorted list of
//! disjoint closed x-intervals plus finitely many isolated points.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::QField;
use crate::poly::shared_radicand;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThetaSetRepr")]
pub struct ThetaSet {
    intervals: Vec<(QField, QField)>,
    points: Vec<QField>,
}

#[derive(Deserialize)]
struct ThetaSetRepr {
    #[serde(default)]
    intervals: Vec<(QField, QField)>,
    #[serde(default)]
    points: Vec<QField>,
}

impl TryFrom<ThetaSetRepr> for ThetaSet {
    type Error = Error;
    fn try_from(r: ThetaSetRepr) -> Result<Self> {
        ThetaSet::new(r.intervals, r.points)
    }
}

fn cmp(a: &QField, b: &QField) -> Ordering {
    a.try_cmp(b).expect("radicands validated")
}

fn in_unit_range(x: &QField) -> bool {
    cmp(x, &QField::from_integer(-1)) != Ordering::Less && cmp(x, &QField::one()) != Ordering::Greater
}

impl ThetaSet {
    /// Validates and normalizes: degenerate intervals become points,
    /// overlapping intervals are merged, points inside intervals are dropped.
    pub fn new(intervals: Vec<(QField, QField)>, points: Vec<QField>) -> Result<Self> {
        shared_radicand(intervals.iter().flat_map(|(a, b)| [a, b]).chain(points.iter()))?;
        let mut points = points;
        let mut ivs = Vec::new();
        for (lo, hi) in intervals {
            if !in_unit_range(&lo) || !in_unit_range(&hi) {
                return Err(Error::Domain(format!("interval [{}, {}] leaves [-1, 1]", lo, hi)));
            }
            match cmp(&lo, &hi) {
                Ordering::Greater => return Err(Error::Domain(format!("reversed interval [{}, {}]", lo, hi))),
                Ordering::Equal => points.push(lo),
                Ordering::Less => ivs.push((lo, hi)),
            }
        }
        ivs.sort_by(|a, b| cmp(&a.0, &b.0));
        let mut merged: Vec<(QField, QField)> = Vec::new();
        for (lo, hi) in ivs {
            if let Some(last) = merged.last_mut() {
                if cmp(&lo, &last.1) != Ordering::Greater {
                    if cmp(&hi, &last.1) == Ordering::Greater {
                        last.1 = hi;
                    }
                    continue;
                }
            }
            merged.push((lo, hi));
        }
        for p in &points {
            if !in_unit_range(p) {
                return Err(Error::Domain(format!("point {} leaves [-1, 1]", p)));
            }
        }
        let mut set = ThetaSet { intervals: merged, points: Vec::new() };
        points.sort_by(cmp);
        points.dedup();
        let kept: Vec<QField> = points.into_iter().filter(|p| !set.in_intervals(p)).collect();
        set.points = kept;
        Ok(set)
    }

    /// All of [0, π], i.e. x ∈ [−1, 1].
    pub fn full() -> Self {
        ThetaSet { intervals: vec![(QField::from_integer(-1), QField::one())], points: Vec::new() }
    }

    pub fn from_points(points: Vec<QField>) -> Result<Self> {
        Self::new(Vec::new(), points)
    }

    /// `[0, π] ∖ (α, β)` given `alpha_x = cos α` and `beta_x = cos β`, so
    /// `beta_x ≤ alpha_x`. Equal arguments give the full range.
    pub fn complement_of_interval(alpha_x: &QField, beta_x: &QField) -> Result<Self> {
        alpha_x.common_radicand(beta_x)?;
        if !in_unit_range(alpha_x) || !in_unit_range(beta_x) {
            return Err(Error::Domain("interval endpoints must lie in [-1, 1]".into()));
        }
        match cmp(beta_x, alpha_x) {
            Ordering::Greater => {
                Err(Error::Domain(format!("cos β = {} exceeds cos α = {}; expected α ≤ β", beta_x, alpha_x)))
            }
            Ordering::Equal => Ok(Self::full()),
            Ordering::Less => Self::new(
                vec![(QField::from_integer(-1), beta_x.clone()), (alpha_x.clone(), QField::one())],
                Vec::new(),
            ),
        }
    }

    /// `[0, α]`, the complement of the half-open `(α, π]`.
    pub fn angles_up_to(alpha_x: &QField) -> Result<Self> {
        if !in_unit_range(alpha_x) {
            return Err(Error::Domain(format!("cos α = {} leaves [-1, 1]", alpha_x)));
        }
        Self::new(vec![(alpha_x.clone(), QField::one())], Vec::new())
    }

    /// Angles of every Weil-admissible integer trace over F_q:
    /// `{ t / (2√q) : t ∈ ℤ, t² ≤ 4q }`.
    pub fn admissible_trace_angles(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("field size q = {} must be at least 2", q)));
        }
        let two_r_inv = QField::sqrt_of(q).inv() * QField::ratio(1, 2);
        let bound = (4 * q as i128, 0i64);
        let mut t = 0i64;
        while ((t + 1) as i128).pow(2) <= bound.0 {
            t += 1;
        }
        let points = (-t..=t).map(|k| &two_r_inv * &QField::from_integer(k)).collect();
        Self::from_points(points)
    }

    /// Image of a finite set under the angle doubling `x ↦ 2x² − 1`, which is
    /// the angle of α² when α has angle θ.
    pub fn frobenius_square_pushforward(&self) -> Result<Self> {
        if !self.intervals.is_empty() {
            return Err(Error::UnsupportedShape("angle doubling is only defined here for finite point sets".into()));
        }
        let two = QField::from_integer(2);
        let pts = self.points.iter().map(|x| &(&two * &(x * x)) - &QField::one()).collect();
        Self::from_points(pts)
    }

    pub fn intervals(&self) -> &[(QField, QField)] {
        &self.intervals
    }

    pub fn points(&self) -> &[QField] {
        &self.points
    }

    pub fn is_finite(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    fn in_intervals(&self, x: &QField) -> bool {
        self.intervals.iter().any(|(lo, hi)| cmp(lo, x) != Ordering::Greater && cmp(x, hi) != Ordering::Greater)
    }

    pub fn contains(&self, x: &QField) -> bool {
        self.in_intervals(x) || self.points.iter().any(|p| p == x)
    }

    pub fn radicand(&self) -> u64 {
        shared_radicand(self.intervals.iter().flat_map(|(a, b)| [a, b]).chain(self.points.iter())).unwrap_or(0)
    }
}
