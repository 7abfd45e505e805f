//! Exact integer kernel: square roots and the two quadratic rings used by the
//! censuses.
//!
//! Elements of `O_K` (imaginary) and `O_L` (real) are stored in integral-basis
//! coordinates `u + v*omega`, never as numerator/denominator pairs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Returns the non-negative square root of `n` when `n` is a perfect square.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    if let Some(small) = n.to_u128() {
        return isqrt_exact_u128(small).map(BigInt::from);
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Square root of `n` if it is a perfect square, for the fixed-width fast paths.
#[inline]
pub fn isqrt_exact_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    isqrt_exact_u128(n as u128).map(|r| r as i128)
}

#[inline]
fn isqrt_exact_u128(n: u128) -> Option<u128> {
    let r = match u64::try_from(n) {
        Ok(small) => small.isqrt() as u128,
        Err(_) => n.isqrt(),
    };
    (r * r == n).then_some(r)
}

/// Smallest integer `r` with `r*r >= n`.
pub fn ceil_sqrt_u64(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Checks that `n >= min` and that no prime square divides `n`.
pub fn validate_squarefree(n: i64, min: i64) -> Result<()> {
    if n < min {
        return Err(Error::FieldOutOfRange { value: n, min });
    }
    let mut m = n as u64;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return Err(Error::NotSquareFree(n));
            }
        }
        p += 1;
    }
    Ok(())
}

/// Exact sign of `p + q*sqrt(d)` for a non-square `d > 0`.
pub fn sign_surd(p: &BigInt, q: &BigInt, d: i64) -> Ordering {
    let sp = p.sign_cmp();
    let sq = q.sign_cmp();
    match (sp, sq) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (a, b) if a == b => a,
        // opposite signs: the larger magnitude wins
        (sp, _) => {
            let lhs = p * p;
            let rhs = q * q * BigInt::from(d);
            match lhs.cmp(&rhs) {
                Ordering::Greater => sp,
                Ordering::Less => sp.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

/// Fixed-width version of [`sign_surd`]; falls back to big integers on overflow.
#[inline]
pub fn sign_surd_i128(p: i128, q: i128, d: i64) -> Ordering {
    let sp = p.cmp(&0);
    let sq = q.cmp(&0);
    match (sp, sq) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (a, b) if a == b => a,
        (sp, _) => {
            let lhs = p.checked_mul(p);
            let rhs = q.checked_mul(q).and_then(|x| x.checked_mul(d as i128));
            match (lhs, rhs) {
                (Some(l), Some(r)) => match l.cmp(&r) {
                    Ordering::Greater => sp,
                    Ordering::Less => sp.reverse(),
                    Ordering::Equal => Ordering::Equal,
                },
                _ => sign_surd(&BigInt::from(p), &BigInt::from(q), d),
            }
        }
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

/// Element `u + v*omega` of the ring of integers of `K = Q(sqrt(-D))`.
///
/// `omega = sqrt(-D)` when `D = 1, 2 (mod 4)` and `omega = (1 + sqrt(-D))/2`
/// when `D = 3 (mod 4)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadIntK {
    d: i64,
    u: BigInt,
    v: BigInt,
}

impl QuadIntK {
    pub fn new(d: i64, u: impl Into<BigInt>, v: impl Into<BigInt>) -> Result<Self> {
        validate_squarefree(d, 1)?;
        Ok(Self {
            d,
            u: u.into(),
            v: v.into(),
        })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn v(&self) -> &BigInt {
        &self.v
    }

    pub fn half_integer_basis(&self) -> bool {
        self.d % 4 == 3
    }

    /// `t * conj(t)`.
    pub fn norm(&self) -> BigInt {
        let d = BigInt::from(self.d);
        if self.half_integer_basis() {
            // ((2u+v)^2 + D v^2) / 4 = u^2 + uv + v^2 (1+D)/4
            &self.u * &self.u + &self.u * &self.v + &self.v * &self.v * ((d + 1) / 4)
        } else {
            &self.u * &self.u + &self.v * &self.v * d
        }
    }

    /// `t^2 + conj(t)^2`.
    pub fn trace_sq(&self) -> BigInt {
        let d = BigInt::from(self.d);
        if self.half_integer_basis() {
            // ((2u+v)^2 - D v^2) / 2 = 2u^2 + 2uv + v^2 (1-D)/2
            BigInt::from(2) * (&self.u * &self.u + &self.u * &self.v)
                + &self.v * &self.v * ((BigInt::one() - d) / 2)
        } else {
            BigInt::from(2) * (&self.u * &self.u - &self.v * &self.v * d)
        }
    }

    pub fn is_real(&self) -> bool {
        self.v.is_zero()
    }

    /// True when the real part of `t` vanishes.
    pub fn is_purely_imaginary(&self) -> bool {
        if self.half_integer_basis() {
            (BigInt::from(2) * &self.u + &self.v).is_zero()
        } else {
            self.u.is_zero()
        }
    }

    pub fn conj(&self) -> Self {
        let (u, v) = if self.half_integer_basis() {
            (&self.u + &self.v, -&self.v)
        } else {
            (self.u.clone(), -&self.v)
        };
        Self { d: self.d, u, v }
    }

    pub fn neg(&self) -> Self {
        Self {
            d: self.d,
            u: -&self.u,
            v: -&self.v,
        }
    }

    /// Complex value `(re, im)` at double precision.
    pub fn to_complex(&self) -> (f64, f64) {
        let u = self.u.to_f64().unwrap_or(f64::NAN);
        let v = self.v.to_f64().unwrap_or(f64::NAN);
        let root = (self.d as f64).sqrt();
        if self.half_integer_basis() {
            (u + v / 2.0, v * root / 2.0)
        } else {
            (u, v * root)
        }
    }
}

impl fmt::Display for QuadIntK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}w", self.u, self.v)
    }
}

/// Element `u + v*omega_L` of the ring of integers of `L = Q(sqrt(d))`.
///
/// `omega_L = sqrt(d)` when `d = 2, 3 (mod 4)` and `(1 + sqrt(d))/2` when
/// `d = 1 (mod 4)`. The identity embedding sends `sqrt(d)` to the positive root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RealQuadElem {
    d: i64,
    u: BigInt,
    v: BigInt,
}

impl RealQuadElem {
    pub fn new(d: i64, u: impl Into<BigInt>, v: impl Into<BigInt>) -> Result<Self> {
        validate_squarefree(d, 2)?;
        Ok(Self {
            d,
            u: u.into(),
            v: v.into(),
        })
    }

    /// Constructor for callers that already validated `d`.
    pub(crate) fn new_unchecked(d: i64, u: impl Into<BigInt>, v: impl Into<BigInt>) -> Self {
        Self {
            d,
            u: u.into(),
            v: v.into(),
        }
    }

    pub fn rational(d: i64, n: impl Into<BigInt>) -> Result<Self> {
        Self::new(d, n, 0)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn v(&self) -> &BigInt {
        &self.v
    }

    fn half_integer_basis(&self) -> bool {
        self.d % 4 == 1
    }

    /// `(p, q, den)` with `sigma_1 = (p + q sqrt d)/den` and `sigma_2 = (p - q sqrt d)/den`.
    pub fn surd_form(&self) -> (BigInt, BigInt, i64) {
        if self.half_integer_basis() {
            (BigInt::from(2) * &self.u + &self.v, self.v.clone(), 2)
        } else {
            (self.u.clone(), self.v.clone(), 1)
        }
    }

    /// `(sigma_1(x), sigma_2(x))`, identity embedding first.
    pub fn embeddings(&self) -> (f64, f64) {
        let (p, q, den) = self.surd_form();
        let p = p.to_f64().unwrap_or(f64::NAN);
        let q = q.to_f64().unwrap_or(f64::NAN);
        let s = (self.d as f64).sqrt();
        let den = den as f64;
        ((p + q * s) / den, (p - q * s) / den)
    }

    /// Exact sign of the identity embedding.
    pub fn sign_sigma1(&self) -> Ordering {
        let (p, q, _) = self.surd_form();
        sign_surd(&p, &q, self.d)
    }

    /// Exact sign of the non-identity embedding.
    pub fn sign_sigma2(&self) -> Ordering {
        let (p, q, _) = self.surd_form();
        sign_surd(&p, &(-q), self.d)
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign_sigma1() == Ordering::Greater && self.sign_sigma2() == Ordering::Greater
    }

    /// Rational trace `sigma_1 + sigma_2`.
    pub fn trace(&self) -> BigInt {
        if self.half_integer_basis() {
            BigInt::from(2) * &self.u + &self.v
        } else {
            BigInt::from(2) * &self.u
        }
    }

    /// Rational norm `sigma_1 * sigma_2`.
    pub fn norm(&self) -> BigInt {
        let d = BigInt::from(self.d);
        if self.half_integer_basis() {
            &self.u * &self.u + &self.u * &self.v - &self.v * &self.v * ((d - 1) / 4)
        } else {
            &self.u * &self.u - &self.v * &self.v * d
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    fn check_same_field(&self, other: &Self) {
        assert_eq!(self.d, other.d, "ring elements from different fields");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_field(other);
        Self::new_unchecked(self.d, &self.u + &other.u, &self.v + &other.v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_field(other);
        Self::new_unchecked(self.d, &self.u - &other.u, &self.v - &other.v)
    }

    pub fn neg(&self) -> Self {
        Self::new_unchecked(self.d, -&self.u, -&self.v)
    }

    pub fn add_int(&self, n: i64) -> Self {
        Self::new_unchecked(self.d, &self.u + n, self.v.clone())
    }

    pub fn scale(&self, n: i64) -> Self {
        Self::new_unchecked(self.d, &self.u * n, &self.v * n)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_field(other);
        let uu = &self.u * &other.u;
        let vv = &self.v * &other.v;
        let cross = &self.u * &other.v + &self.v * &other.u;
        if self.half_integer_basis() {
            // omega^2 = omega + (d-1)/4
            let c = BigInt::from((self.d - 1) / 4);
            Self::new_unchecked(self.d, uu + &vv * c, cross + vv)
        } else {
            Self::new_unchecked(self.d, uu + vv * self.d, cross)
        }
    }

    /// Square root inside `O_L`, decided exactly.
    ///
    /// Writes `2s = X + Y sqrt(d)` and solves `X^2 + d Y^2 = M`, `2XY = N`
    /// where `4x = M + N sqrt(d)`; every candidate is confirmed by squaring.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.sign_sigma1() == Ordering::Less || self.sign_sigma2() == Ordering::Less {
            return None;
        }
        let (p, q, den) = self.surd_form();
        // 4x in the (1, sqrt d) basis
        let scale = BigInt::from(4 / den);
        let m = &p * &scale;
        let n = &q * &scale;
        let d = BigInt::from(self.d);
        let norm = &m * &m - &n * &n * &d;
        let root_norm = is_perfect_square(&norm)?;
        let two = BigInt::from(2);
        for cand in [&m + &root_norm, &m - &root_norm] {
            if cand.is_negative() || !(&cand % &two).is_zero() {
                continue;
            }
            let Some(x) = is_perfect_square(&(&cand / &two)) else {
                continue;
            };
            let y = if x.is_zero() {
                match is_perfect_square(&(&m / &d)) {
                    Some(y) if &y * &y * &d == m => y,
                    _ => continue,
                }
            } else {
                if !(&n % (&two * &x)).is_zero() {
                    continue;
                }
                &n / (&two * &x)
            };
            for (sx, sy) in [(x.clone(), y.clone()), (-&x, -&y)] {
                if let Some(s) = self.same_field_from_doubled_surd(&sx, &sy) {
                    if s.mul(&s) == *self {
                        return Some(s);
                    }
                }
            }
        }
        None
    }

    /// Element with `2 sigma_1 = x + y sqrt(d)`, if it lies in `O_L`.
    fn same_field_from_doubled_surd(&self, x: &BigInt, y: &BigInt) -> Option<Self> {
        let two = BigInt::from(2);
        if self.half_integer_basis() {
            // 2(u + v omega) = (2u + v) + v sqrt d
            let v = y.clone();
            let twice_u = x - &v;
            if !(&twice_u % &two).is_zero() {
                return None;
            }
            Some(Self::new_unchecked(self.d, twice_u / &two, v))
        } else {
            if !(x % &two).is_zero() || !(y % &two).is_zero() {
                return None;
            }
            Some(Self::new_unchecked(self.d, x / &two, y / &two))
        }
    }
}

impl fmt::Display for RealQuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}w", self.u, self.v)
    }
}
