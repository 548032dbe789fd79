//! Exact arithmetic in a real quadratic field ℚ(√d).
//!
//! A [`QField`] is `a + b·√d` with arbitrary-precision rational `a`, `b` and a
//! squarefree radicand `d`. Values built with `d ∈ {0, 1}` are plain rationals
//! and embed into every ℚ(√d); two values with different radicands `d ≥ 2`
//! never mix.
//!
//! Signs are decided with rational comparisons only, so the field is totally
//! ordered without any floating approximation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Returns `true` when `d` has no square factor `p² > 1`.
pub fn is_squarefree(d: u64) -> bool {
    if d < 4 {
        return true;
    }
    let mut n = d;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Splits `q = s²·d` with `d` squarefree and returns `(s, d)`.
pub fn squarefree_decompose(q: u64) -> (u64, u64) {
    if q == 0 {
        return (0, 0);
    }
    let mut s = 1u64;
    let mut d = q;
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        while d.is_multiple_of(p * p) {
            d /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, d)
}

/// Squarefree part of `q`: the radicand of the field containing `√q`.
pub fn squarefree_part(q: u64) -> u64 {
    squarefree_decompose(q).1
}

/// An element `a + b·√d` of a real quadratic field.
#[derive(Clone, Debug)]
pub struct QField {
    a: BigRational,
    b: BigRational,
    d: u64,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QField {
    /// Builds and normalizes `a + b√d`.
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(Error::InvalidRadicand(d as i64));
        }
        Ok(Self::normalized(a, b, d))
    }

    /// Same as [`QField::new`] but accepting a signed radicand, as read from
    /// untrusted input.
    pub fn make(a: BigRational, b: BigRational, d: i64) -> Result<Self> {
        if d < 0 {
            return Err(Error::InvalidRadicand(d));
        }
        Self::new(a, b, d as u64)
    }

    fn normalized(a: BigRational, b: BigRational, d: u64) -> Self {
        match d {
            0 => QField { a, b: BigRational::zero(), d },
            1 => QField { a: a + b, b: BigRational::zero(), d },
            _ => QField { a, b, d },
        }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QField { a, b: BigRational::zero(), d: 0 }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    /// The rational `p/q` as a field element.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// `b·√d`.
    pub fn surd(b: BigRational, d: u64) -> Result<Self> {
        Self::new(BigRational::zero(), b, d)
    }

    /// `√q` inside ℚ(√squarefree(q)).
    pub fn sqrt_of(q: u64) -> Self {
        let (s, d) = squarefree_decompose(q);
        let s = BigRational::from_integer(BigInt::from(s));
        if d <= 1 {
            Self::from_rational(s)
        } else {
            Self::normalized(BigRational::zero(), s, d)
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The value as a rational, if it has no surd part.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.a.clone())
    }

    /// Radicand shared by two operands, or a mismatch error.
    pub fn common_radicand(&self, other: &QField) -> Result<u64> {
        if self.d == other.d {
            Ok(self.d)
        } else if self.d <= 1 {
            Ok(other.d)
        } else if other.d <= 1 {
            Ok(self.d)
        } else {
            Err(Error::RadicandMismatch(self.d, other.d))
        }
    }

    /// Re-tags a value so that it carries radicand `d`.
    pub fn with_radicand(&self, d: u64) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(Error::InvalidRadicand(d as i64));
        }
        if self.d == d {
            return Ok(self.clone());
        }
        if self.is_rational() {
            return Ok(Self::normalized(self.a.clone(), BigRational::zero(), d));
        }
        Err(Error::RadicandMismatch(self.d, d))
    }

    /// `a − b√d`.
    pub fn conjugate(&self) -> Self {
        QField { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// `a² − d·b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * rat(self.d as i64)
    }

    pub fn checked_add(&self, rhs: &QField) -> Result<QField> {
        let d = self.common_radicand(rhs)?;
        Ok(Self::normalized(&self.a + &rhs.a, &self.b + &rhs.b, d))
    }

    pub fn checked_sub(&self, rhs: &QField) -> Result<QField> {
        let d = self.common_radicand(rhs)?;
        Ok(Self::normalized(&self.a - &rhs.a, &self.b - &rhs.b, d))
    }

    pub fn checked_mul(&self, rhs: &QField) -> Result<QField> {
        let d = self.common_radicand(rhs)?;
        if self.b.is_zero() {
            return Ok(Self::normalized(&self.a * &rhs.a, &self.a * &rhs.b, d));
        }
        if rhs.b.is_zero() {
            return Ok(Self::normalized(&self.a * &rhs.a, &self.b * &rhs.a, d));
        }
        let dd = rat(d as i64);
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dd;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Ok(Self::normalized(a, b, d))
    }

    pub fn checked_inv(&self) -> Result<QField> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::normalized(&self.a / &n, -(&self.b / &n), self.d))
    }

    pub fn checked_div(&self, rhs: &QField) -> Result<QField> {
        self.common_radicand(rhs)?;
        self.checked_mul(&rhs.checked_inv()?)
    }

    pub fn inv(&self) -> QField {
        self.checked_inv().expect("inverse of zero")
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i32) -> QField {
        let mut base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QField { a: BigRational::one(), b: BigRational::zero(), d: self.d };
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact sign of `a + b√d` as `-1`, `0` or `1`.
    pub fn sign(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let db2 = &self.b * &self.b * rat(self.d as i64);
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> QField {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Compares two values; `None` on radicand mismatch.
    pub fn try_cmp(&self, other: &QField) -> Option<Ordering> {
        let diff = self.checked_sub(other).ok()?;
        Some(diff.sign().cmp(&0))
    }

    /// Rational bracket `lo ≤ value ≤ hi` with `hi − lo ≤ 2^-bits` times a
    /// factor depending on `|b|`.
    pub fn bracket(&self, bits: u32) -> (BigRational, BigRational) {
        if self.b.is_zero() {
            return (self.a.clone(), self.a.clone());
        }
        let (lo, hi) = sqrt_bracket(self.d, bits);
        let x = &self.a + &self.b * &lo;
        let y = &self.a + &self.b * &hi;
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.bracket(64);
        let mid = (lo + hi) / rat(2);
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.to_rational() {
            return r.floor().to_integer();
        }
        let (lo, _) = self.bracket(8);
        let mut k = lo.floor().to_integer();
        loop {
            let below = self - &QField::from_rational(BigRational::from_integer(k.clone()));
            if below.sign() < 0 {
                k -= 1;
                continue;
            }
            let next = &below - &QField::one();
            if next.sign() >= 0 {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// A rational strictly between `lo` and `hi`; requires `lo < hi`.
    pub fn rational_between(lo: &QField, hi: &QField) -> BigRational {
        debug_assert!(lo.try_cmp(hi) == Some(Ordering::Less));
        let mut bits = 16;
        loop {
            let (_, lo_hi) = lo.bracket(bits);
            let (hi_lo, _) = hi.bracket(bits);
            if lo_hi < hi_lo {
                let mid = (lo_hi + hi_lo) / rat(2);
                return simplest_in_open(&mid, lo, hi).unwrap_or(mid);
            }
            bits *= 2;
        }
    }
}

/// Tries a few low-height rationals near `mid` so that witnesses stay readable.
fn simplest_in_open(mid: &BigRational, lo: &QField, hi: &QField) -> Option<BigRational> {
    for den in [1i64, 2, 4, 8, 10, 16, 100, 1000, 10000] {
        let den_b = BigInt::from(den);
        let num = (mid * BigRational::from_integer(den_b.clone())).round().to_integer();
        let cand = BigRational::new(num, den_b);
        let c = QField::from_rational(cand.clone());
        if lo.try_cmp(&c) == Some(Ordering::Less) && c.try_cmp(hi) == Some(Ordering::Less) {
            return Some(cand);
        }
    }
    None
}

fn sign_of(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Rational bracket of `√d` of width at most `2^-bits`.
fn sqrt_bracket(d: u64, bits: u32) -> (BigRational, BigRational) {
    let scale = BigInt::one() << (2 * bits as usize);
    let root = (BigInt::from(d) * &scale).sqrt();
    let den = BigInt::one() << (bits as usize);
    let lo = BigRational::new(root.clone(), den.clone());
    let hi = BigRational::new(root + 1, den);
    (lo, hi)
}

impl PartialEq for QField {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl PartialOrd for QField {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other)
    }
}

impl Neg for QField {
    type Output = QField;
    fn neg(self) -> QField {
        QField { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Neg for &QField {
    type Output = QField;
    fn neg(self) -> QField {
        QField { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QField> for &QField {
            type Output = QField;
            fn $method(self, rhs: &QField) -> QField {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{}", e),
                }
            }
        }
        impl $trait<QField> for QField {
            type Output = QField;
            fn $method(self, rhs: QField) -> QField {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QField> for QField {
            type Output = QField;
            fn $method(self, rhs: &QField) -> QField {
                (&self).$method(rhs)
            }
        }
        impl $trait<QField> for &QField {
            type Output = QField;
            fn $method(self, rhs: QField) -> QField {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl From<i64> for QField {
    fn from(n: i64) -> Self {
        QField::from_integer(n)
    }
}

impl From<BigRational> for QField {
    fn from(r: BigRational) -> Self {
        QField::from_rational(r)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Human-readable exact form, e.g. `1/2 - 1/4*sqrt(2)`.
impl fmt::Display for QField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let babs = self.b.abs();
        let surd = if babs.is_one() {
            format!("sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", fmt_rational(&babs), self.d)
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{}", surd)
            } else {
                write!(f, "{}", surd)
            }
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {} {}", fmt_rational(&self.a), op, surd)
        }
    }
}

/// Parses `p/q` (or a bare integer) into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{}'", s));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Accepts sums of terms `r`, `sqrt(n)` and `r*sqrt(n)`, e.g.
/// `1/2 - 1/4*sqrt(2)`, or the JSON object form.
impl FromStr for QField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        let bad = || Error::Parse(format!("invalid quadratic-field literal '{}'", s));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        let mut depth = 0;
        for (i, &c) in bytes.iter().enumerate() {
            match c {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if i > start && depth == 0 && bytes[i - 1] != b'/' => {
                    terms.push(&compact[start..i]);
                    start = i;
                }
                _ => {}
            }
        }
        terms.push(&compact[start..]);

        let mut a = BigRational::zero();
        let mut b = BigRational::zero();
        let mut d: Option<u64> = None;
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            let mut value = if let Some(pos) = body.find("sqrt(") {
                let coeff = body[..pos].trim_end_matches('*');
                let close = body[pos..].find(')').ok_or_else(bad)? + pos;
                let rad: u64 = body[pos + 5..close].parse().map_err(|_| bad())?;
                let tail = &body[close + 1..];
                let mut c = if coeff.is_empty() { BigRational::one() } else { parse_rational(coeff)? };
                if let Some(den) = tail.strip_prefix('/') {
                    c /= parse_rational(den)?;
                } else if !tail.is_empty() {
                    return Err(bad());
                }
                if !is_squarefree(rad) {
                    return Err(Error::InvalidRadicand(rad as i64));
                }
                match d {
                    Some(prev) if prev != rad => return Err(Error::RadicandMismatch(prev, rad)),
                    _ => d = Some(rad),
                }
                (BigRational::zero(), c)
            } else {
                (parse_rational(body)?, BigRational::zero())
            };
            if neg {
                value = (-value.0, -value.1);
            }
            a += value.0;
            b += value.1;
        }
        Ok(QField::normalized(a, b, d.unwrap_or(0)))
    }
}

#[derive(Serialize, Deserialize)]
struct QFieldRepr {
    a: String,
    b: String,
    d: i64,
}

fn rational_to_json(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Serialize for QField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QFieldRepr { a: rational_to_json(&self.a), b: rational_to_json(&self.b), d: self.d as i64 }.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QFieldInput {
    Object(QFieldRepr),
    Literal(String),
    Integer(i64),
}

/// Accepts the object form, a literal such as `"1/2 - sqrt(2)/4"`, or an
/// integer.
impl<'de> Deserialize<'de> for QField {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match QFieldInput::deserialize(de)? {
            QFieldInput::Object(repr) => {
                let a = parse_rational(&repr.a).map_err(D::Error::custom)?;
                let b = parse_rational(&repr.b).map_err(D::Error::custom)?;
                QField::make(a, b, repr.d).map_err(D::Error::custom)
            }
            QFieldInput::Literal(s) => s.parse().map_err(D::Error::custom),
            QFieldInput::Integer(n) => Ok(QField::from_integer(n)),
        }
    }
}
