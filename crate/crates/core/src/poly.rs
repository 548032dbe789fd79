//! Univariate polynomials over ℚ(√d) in the variable `x = cos θ`, with
//! Sturm chains and exact real-root isolation.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::QField;

/// `c[0] + c[1]·x + … + c[n]·xⁿ`, trailing coefficient nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PowerPolyRepr")]
pub struct PowerPoly {
    c: Vec<QField>,
}

#[derive(Deserialize)]
struct PowerPolyRepr {
    c: Vec<QField>,
}

impl TryFrom<PowerPolyRepr> for PowerPoly {
    type Error = Error;
    fn try_from(r: PowerPolyRepr) -> Result<Self> {
        PowerPoly::new(r.c)
    }
}

/// Radicand shared by all values, or a mismatch error.
pub(crate) fn shared_radicand<'a>(values: impl IntoIterator<Item = &'a QField>) -> Result<u64> {
    let mut acc = QField::zero();
    for v in values {
        let d = acc.common_radicand(v)?;
        acc = QField::zero().with_radicand(d)?;
    }
    Ok(acc.radicand())
}

impl PowerPoly {
    pub fn new(c: Vec<QField>) -> Result<Self> {
        shared_radicand(&c)?;
        Ok(Self::from_coeffs(c))
    }

    pub(crate) fn from_coeffs(mut c: Vec<QField>) -> Self {
        while c.last().is_some_and(QField::is_zero) {
            c.pop();
        }
        PowerPoly { c }
    }

    pub fn zero() -> Self {
        PowerPoly { c: Vec::new() }
    }

    pub fn constant(v: QField) -> Self {
        Self::from_coeffs(vec![v])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        PowerPoly { c: vec![QField::zero(), QField::one()] }
    }

    /// Polynomial with rational coefficients `num[i]/den`.
    pub fn from_ratios(num: &[i64], den: i64) -> Self {
        Self::from_coeffs(num.iter().map(|&n| QField::ratio(n, den)).collect())
    }

    pub fn coeffs(&self) -> &[QField] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&QField> {
        self.c.last()
    }

    pub fn coeff(&self, i: usize) -> QField {
        self.c.get(i).cloned().unwrap_or_else(QField::zero)
    }

    pub fn eval(&self, x: &QField) -> QField {
        self.c.iter().rev().fold(QField::zero(), |acc, c| &acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn add(&self, other: &PowerPoly) -> PowerPoly {
        let n = self.c.len().max(other.c.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &PowerPoly) -> PowerPoly {
        let n = self.c.len().max(other.c.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &PowerPoly) -> PowerPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![QField::zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, k: &QField) -> PowerPoly {
        Self::from_coeffs(self.c.iter().map(|c| c * k).collect())
    }

    pub fn neg(&self) -> PowerPoly {
        PowerPoly { c: self.c.iter().map(|c| -c).collect() }
    }

    pub fn pow(&self, e: u32) -> PowerPoly {
        (0..e).fold(Self::constant(QField::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> PowerPoly {
        Self::from_coeffs(self.c.iter().enumerate().skip(1).map(|(i, c)| c * &QField::from_integer(i as i64)).collect())
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &PowerPoly) -> Result<(PowerPoly, PowerPoly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = divisor.c[dd].checked_inv()?;
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![QField::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let coef = &rem[k + dd] * &lead_inv;
            if coef.is_zero() {
                continue;
            }
            for (j, dc) in divisor.c.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&coef * dc);
            }
            quot[k] = coef;
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Exact quotient; errors when the division leaves a remainder.
    pub fn exact_div(&self, divisor: &PowerPoly) -> Result<PowerPoly> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Internal("polynomial division left a remainder".into()));
        }
        Ok(q)
    }

    pub fn monic(&self) -> PowerPoly {
        match self.lead() {
            Some(l) => self.scale(&l.inv()),
            None => Self::zero(),
        }
    }

    /// Divides by `|lead|`, keeping the sign pattern of the polynomial.
    fn sign_normalized(&self) -> PowerPoly {
        match self.lead() {
            Some(l) => self.scale(&l.abs().inv()),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &PowerPoly) -> PowerPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> PowerPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Yun's squarefree decomposition: `self = lead · ∏ aᵢ^i` with monic
    /// pairwise coprime squarefree `aᵢ` (index 0 holds `a₁`).
    pub fn squarefree_factors(&self) -> Vec<PowerPoly> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.exact_div(&a0).expect("gcd divides");
        let c = d.exact_div(&a0).expect("gcd divides");
        let mut dd = c.sub(&b.derivative());
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&dd);
            let nb = b.exact_div(&a).expect("gcd divides");
            let nc = dd.exact_div(&a).expect("gcd divides");
            dd = nc.sub(&nb.derivative());
            out.push(a);
            b = nb;
        }
        out
    }

    /// Product of the factors that occur with odd multiplicity; its roots are
    /// exactly the points where the polynomial changes sign.
    pub fn odd_multiplicity_part(&self) -> PowerPoly {
        self.squarefree_factors()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .fold(Self::constant(QField::one()), |acc, (_, f)| acc.mul(&f))
    }

    /// Rebuilds the polynomial with every coefficient tagged with radicand `d`.
    pub fn with_radicand(&self, d: u64) -> Result<PowerPoly> {
        Ok(PowerPoly { c: self.c.iter().map(|c| c.with_radicand(d)).collect::<Result<_>>()? })
    }

    pub fn radicand(&self) -> u64 {
        shared_radicand(&self.c).unwrap_or(0)
    }
}

impl fmt::Display for PowerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})x", c)?,
                _ => write!(f, "({})x^{}", c, i)?,
            }
        }
        Ok(())
    }
}

/// Sturm chain of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<PowerPoly>,
}

impl SturmChain {
    /// Builds the chain of the squarefree part of `p`.
    pub fn new(p: &PowerPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Degenerate("Sturm chain of the zero polynomial".into()));
        }
        let p0 = p.squarefree_part().sign_normalized();
        let mut chain = vec![p0.clone(), p0.derivative().sign_normalized()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1])?;
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().sign_normalized());
        }
        Ok(SturmChain { chain })
    }

    pub fn base(&self) -> &PowerPoly {
        &self.chain[0]
    }

    /// Number of sign changes of the chain at `x`, zeros skipped.
    pub fn variations(&self, x: &QField) -> usize {
        let mut last = 0;
        let mut count = 0;
        for p in &self.chain {
            let s = p.eval(x).sign();
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count(&self, lo: &QField, hi: &QField) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }

    /// Distinct real roots in the open interval `(lo, hi)`.
    pub fn count_open(&self, lo: &QField, hi: &QField) -> usize {
        let c = self.count(lo, hi);
        if self.base().eval(hi).is_zero() {
            c - 1
        } else {
            c
        }
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_count(p: &PowerPoly, lo: &QField, hi: &QField) -> Result<usize> {
    if lo.try_cmp(hi) != Some(Ordering::Less) {
        return Err(Error::Domain(format!("empty interval ({}, {}]", lo, hi)));
    }
    Ok(SturmChain::new(p)?.count(lo, hi))
}

/// A rational strictly inside `(lo, hi)` that is not a root of `p`.
pub(crate) fn nonroot_between(p: &PowerPoly, lo: &QField, hi: &QField) -> QField {
    let width = hi - lo;
    let mut k = 2i64;
    loop {
        // probe points lo + j/k·width for j = 1..k, tightening as k doubles
        for j in 1..k {
            let lo_j = lo + &(&width * &QField::ratio(2 * j - 1, 2 * k));
            let hi_j = lo + &(&width * &QField::ratio(2 * j + 1, 2 * k));
            let x = QField::from_rational(QField::rational_between(&lo_j, &hi_j));
            if !p.eval(&x).is_zero() {
                return x;
            }
        }
        k *= 2;
    }
}

/// Isolating open intervals `(a, b)`, one per distinct root of `p` inside
/// `(lo, hi)`, sorted and with disjoint closures except where they share
/// the outer endpoints. Inner endpoints are rationals that are not roots.
pub fn isolate_roots(p: &PowerPoly, lo: &QField, hi: &QField) -> Result<Vec<(QField, QField)>> {
    let chain = SturmChain::new(p)?;
    let base = chain.base().clone();
    let mut out = Vec::new();
    let total = chain.count_open(lo, hi);
    let mut stack = vec![(lo.clone(), hi.clone(), total)];
    while let Some((a, b, k)) = stack.pop() {
        match k {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let m = nonroot_between(&base, &a, &b);
                let left = chain.count(&a, &m);
                stack.push((m.clone(), b, k - left));
                stack.push((a, m, left));
            }
        }
    }
    out.sort_by(|x, y| x.0.try_cmp(&y.0).unwrap_or(Ordering::Equal));
    Ok(out)
}

/// One sample point inside every connected component of `(lo, hi)` minus the
/// roots of `p`. `p` has constant nonzero sign on each component.
pub fn component_samples(p: &PowerPoly, lo: &QField, hi: &QField) -> Result<Vec<QField>> {
    let chain = SturmChain::new(p)?;
    let base = chain.base().clone();
    let mut iso = isolate_roots(p, lo, hi)?;
    if iso.is_empty() {
        return Ok(vec![nonroot_between(&base, lo, hi)]);
    }
    // shrink the outer intervals until they no longer touch lo / hi
    if let Some(first) = iso.first_mut() {
        while first.0 == *lo {
            let m = nonroot_between(&base, &first.0, &first.1);
            if chain.count(&first.0, &m) == 0 {
                first.0 = m;
            } else {
                first.1 = m;
            }
        }
    }
    if let Some(last) = iso.last_mut() {
        while last.1 == *hi {
            let m = nonroot_between(&base, &last.0, &last.1);
            if chain.count(&last.0, &m) == 0 {
                last.0 = m;
            } else {
                last.1 = m;
            }
        }
    }
    let mut samples = vec![iso[0].0.clone()];
    samples.extend(iso.iter().map(|(_, b)| b.clone()));
    Ok(samples)
}

/// Integer constant shorthand.
#[cfg(test)]
pub(crate) fn int(n: i64) -> QField {
    QField::from_integer(n)
}
