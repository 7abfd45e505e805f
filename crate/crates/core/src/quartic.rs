//! Palindromic quartics `p(x) = x^4 + a x^3 + b x^2 + a x + 1`.
//!
//! Substituting `y = x + 1/x` gives `x^2 r(x + 1/x) = p(x)` with
//! `r(y) = y^2 + a y + (b - 2)`. The Salem root pattern (one real root above 1,
//! its inverse, and a non-real pair on the unit circle) is the statement that
//! `r` has one root above 2 and one strictly inside `(-2, 2)`, i.e.
//! `r(2) < 0 < r(-2)`. Irreducibility over `Q` is then equivalent to the
//! discriminant of `r` not being a perfect square.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{is_perfect_square, isqrt_exact_i128};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SalemQuartic {
    a: BigInt,
    b: BigInt,
}

/// Witness that `p(x^2) = q(x) q(-x)` with
/// `q(x) = x^4 + sqrt(alpha) x^3 + d x^2 + sqrt(alpha) x + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtWitness {
    /// Positive square root of `p(-1)`.
    pub k: BigInt,
    /// Middle coefficient of `q`.
    pub d_coeff: BigInt,
    /// `4 - a + sign * 2k`.
    pub alpha: BigInt,
    pub sign: i8,
}

impl SalemQuartic {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    fn small(&self) -> Option<(i64, i64)> {
        Some((self.a.to_i64()?, self.b.to_i64()?))
    }

    /// Coefficients in ascending degree; palindromic by construction.
    pub fn coefficients(&self) -> [BigInt; 5] {
        [
            BigInt::one(),
            self.a.clone(),
            self.b.clone(),
            self.a.clone(),
            BigInt::one(),
        ]
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        // Horner on [1, a, b, a, 1]
        let mut acc = BigInt::one();
        for c in [&self.a, &self.b, &self.a] {
            acc = acc * x + c;
        }
        acc * x + 1
    }

    /// `p(-1) = 2 + b - 2a`.
    pub fn value_at_minus_one(&self) -> BigInt {
        BigInt::from(2) + &self.b - BigInt::from(2) * &self.a
    }

    /// Discriminant of `r(y)`: `a^2 - 4b + 8`.
    pub fn y_discriminant(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(4) * &self.b + 8
    }

    /// True iff `p` is irreducible over `Q` and its largest root is a Salem number.
    pub fn is_salem(&self) -> bool {
        if let Some((a, b)) = self.small() {
            return is_salem_i64(a, b);
        }
        let two = BigInt::from(2);
        let r_at_2 = &self.b + &two * &self.a + &two;
        let r_at_minus_2 = &self.b - &two * &self.a + &two;
        r_at_2.is_negative()
            && r_at_minus_2.is_positive()
            && is_perfect_square(&self.y_discriminant()).is_none()
    }

    /// Both square-root witnesses when `p(-1)` is a perfect square.
    ///
    /// Meaningful for Salem quartics; for other input it only reports the
    /// algebraic factorisation data.
    pub fn square_root_witness(&self) -> Option<[SqrtWitness; 2]> {
        let k = is_perfect_square(&self.value_at_minus_one())?;
        if k.is_zero() {
            return None;
        }
        let two = BigInt::from(2);
        let four = BigInt::from(4);
        let branch = |sign: i8| {
            let sk = if sign > 0 { k.clone() } else { -&k };
            SqrtWitness {
                k: k.clone(),
                d_coeff: &two + &sk,
                alpha: &four - &self.a + &two * &sk,
                sign,
            }
        };
        Some([branch(1), branch(-1)])
    }

    /// Expands `q(x) q(-x)` over `Z[sqrt(alpha)]` and compares with `p(x^2)`.
    pub fn verify_sqrt_factor(&self, w: &SqrtWitness) -> bool {
        if !w.alpha.is_positive() {
            return false;
        }
        // coefficient = (rational part, multiple of sqrt(alpha))
        type Surd = (BigInt, BigInt);
        let zero = || BigInt::zero();
        let q: [Surd; 5] = [
            (BigInt::one(), zero()),
            (zero(), BigInt::one()),
            (w.d_coeff.clone(), zero()),
            (zero(), BigInt::one()),
            (BigInt::one(), zero()),
        ];
        let q_neg: Vec<Surd> = q
            .iter()
            .enumerate()
            .map(|(i, (r, s))| {
                if i % 2 == 1 {
                    (-r, -s)
                } else {
                    (r.clone(), s.clone())
                }
            })
            .collect();
        let mut prod: Vec<Surd> = vec![(zero(), zero()); 9];
        for (i, (r1, s1)) in q.iter().enumerate() {
            for (j, (r2, s2)) in q_neg.iter().enumerate() {
                let slot = &mut prod[i + j];
                slot.0 += r1 * r2 + s1 * s2 * &w.alpha;
                slot.1 += r1 * s2 + s1 * r2;
            }
        }
        let c = self.coefficients();
        let target: [BigInt; 9] = [
            c[0].clone(),
            zero(),
            c[1].clone(),
            zero(),
            c[2].clone(),
            zero(),
            c[3].clone(),
            zero(),
            c[4].clone(),
        ];
        prod.iter()
            .zip(target.iter())
            .all(|((r, s), t)| s.is_zero() && r == t)
    }

    /// Exact test `lambda <= q` through the sign of `p(q)`.
    pub fn salem_le(&self, q: i64) -> Result<bool> {
        if q < 2 {
            return Err(Error::BoundTooSmall { q, min: 2 });
        }
        if !self.is_salem() {
            return Err(Error::Precondition(format!(
                "{self} is not a Salem quartic"
            )));
        }
        if let Some((a, b)) = self.small() {
            return Ok(salem_le_unchecked(a, b, q));
        }
        Ok(!self.eval(&BigInt::from(q)).is_negative())
    }

    /// The Salem root at double precision.
    pub fn salem_value(&self) -> Result<f64> {
        if !self.is_salem() {
            return Err(Error::Precondition(format!(
                "{self} is not a Salem quartic"
            )));
        }
        let a = self
            .a
            .to_f64()
            .ok_or_else(|| Error::Capacity("a exceeds f64".into()))?;
        let b = self
            .b
            .to_f64()
            .ok_or_else(|| Error::Capacity("b exceeds f64".into()))?;
        Ok(salem_value_f64(a, b))
    }

    /// Maps the quartic of `lambda^(1/2)` to the quartic of `lambda`.
    ///
    /// With `q(x) q(-x) = p(x^2)` and `q = (A, B)` this gives
    /// `p = (2B - A^2, B^2 - 2A^2 + 2)`, so `p(-1) = (B - 2)^2`.
    pub fn lift_half_power(&self) -> SalemQuartic {
        let a2 = &self.a * &self.a;
        let two = BigInt::from(2);
        SalemQuartic {
            a: &two * &self.b - &a2,
            b: &self.b * &self.b - &two * &a2 + &two,
        }
    }
}

impl From<(i64, i64)> for SalemQuartic {
    fn from((a, b): (i64, i64)) -> Self {
        Self::new(a, b)
    }
}

impl fmt::Display for SalemQuartic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x^4 + ({})x^3 + ({})x^2 + ({})x + 1",
            self.a, self.b, self.a
        )
    }
}

/// [`SalemQuartic::is_salem`] on machine integers; all intermediates fit in `i128`.
#[inline]
pub fn is_salem_i64(a: i64, b: i64) -> bool {
    let (a, b) = (a as i128, b as i128);
    b + 2 * a + 2 < 0 && b - 2 * a + 2 > 0 && isqrt_exact_i128(a * a - 4 * b + 8).is_none()
}

/// `p(q) >= 0` for `p = (a, b)`, without the Salem precondition check.
///
/// Uses checked `i128` arithmetic and falls back to big integers on overflow.
#[inline]
pub fn salem_le_unchecked(a: i64, b: i64, q: i64) -> bool {
    match eval_i128(a, b, q) {
        Some(v) => v >= 0,
        None => !SalemQuartic::new(a, b).eval(&BigInt::from(q)).is_negative(),
    }
}

#[inline]
fn eval_i128(a: i64, b: i64, q: i64) -> Option<i128> {
    let (a, b, q) = (a as i128, b as i128, q as i128);
    let mut acc = q.checked_add(a)?;
    acc = acc.checked_mul(q)?.checked_add(b)?;
    acc = acc.checked_mul(q)?.checked_add(a)?;
    acc.checked_mul(q)?.checked_add(1)
}

/// Salem root of `(a, b)` in floating point, assuming the Salem root pattern.
///
/// Uses `y+ - 2 = -r(2) / (2 - y-)` and `y- = (b - 2) / y+` to avoid
/// cancellation when the root is close to 1.
pub fn salem_value_f64(a: f64, b: f64) -> f64 {
    let disc = a * a - 4.0 * b + 8.0;
    let y_plus = (-a + disc.sqrt()) / 2.0;
    let y_minus = (b - 2.0) / y_plus;
    let y_minus_2 = -(b + 2.0 * a + 2.0) / (2.0 - y_minus);
    let root = (y_minus_2 * (y_plus + 2.0)).sqrt();
    (y_plus + root) / 2.0
}
