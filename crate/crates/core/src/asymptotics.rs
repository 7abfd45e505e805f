//! Leading constants, power-law fits, and the mean-multiplicity report.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// RMS log residual above which the smallest-`Q` point is dropped and the fit redone.
pub const FIT_RESIDUAL_THRESHOLD: f64 = 0.01;

/// Minimum number of points a fit may use.
pub const MIN_FIT_POINTS: usize = 3;

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `omega_m = 2^(m(m+1)) / (m+1) * prod_{k=0}^{m-1} k!^2 / (2k+1)!`, the leading
/// constant of the count of Salem numbers of degree `2m + 2`.
pub fn omega(m: u32) -> Result<BigRational> {
    if m < 1 {
        return Err(Error::InvalidArgument("omega requires m >= 1".into()));
    }
    let m = m as u64;
    let mut num = BigInt::one() << (m * (m + 1));
    let mut den = BigInt::from(m + 1);
    for k in 0..m {
        let f = factorial(k);
        num *= &f * &f;
        den *= factorial(2 * k + 1);
    }
    Ok(BigRational::new(num, den))
}

/// Least-squares fit of `count = constant * Q^exponent` in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub constant: f64,
    pub exponent: f64,
    /// RMS of the log-space residuals.
    pub residual: f64,
    pub points_used: usize,
    /// Smallest-`Q` points excluded by the residual rule, in order of exclusion.
    pub dropped: Vec<f64>,
}

fn ols(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (intercept, slope, (rss / n).sqrt())
}

/// Fits `points = [(Q, count), ...]`.
///
/// While the RMS residual exceeds [`FIT_RESIDUAL_THRESHOLD`] and more than
/// [`MIN_FIT_POINTS`] points remain, the point with the smallest `Q` is dropped.
pub fn power_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} points given, at least {MIN_FIT_POINTS} required",
            points.len()
        )));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.0 > 0.0 && p.1 > 0.0 && p.0.is_finite() && p.1.is_finite()))
    {
        return Err(Error::InvalidArgument(format!(
            "non-positive point ({}, {})",
            p.0, p.1
        )));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    if pts.windows(2).all(|w| w[0].0 == w[1].0) {
        return Err(Error::InsufficientData(
            "all points share the same Q".into(),
        ));
    }
    let mut dropped = Vec::new();
    loop {
        let (intercept, slope, residual) = ols(&pts);
        if residual > FIT_RESIDUAL_THRESHOLD && pts.len() > MIN_FIT_POINTS {
            log::info!(
                "fit residual {residual:.3e} above threshold; dropping Q={}",
                pts[0].0
            );
            dropped.push(pts.remove(0).0);
            continue;
        }
        return Ok(FitResult {
            constant: intercept.exp(),
            exponent: slope,
            residual,
            points_used: pts.len(),
            dropped,
        });
    }
}

/// One row of the mean-multiplicity report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityRow {
    pub ell: f64,
    /// `e^((n-1) l) / ((n-1) l)`
    pub geodesic_count: f64,
    /// `sum_{m=1}^{n/2-1} omega_m e^((m+1) l) + (e^l - 2)`
    pub salem_bound: f64,
    pub mean_mult_lower: f64,
}

/// Lower bound for the mean multiplicity of lengths of an arithmetic `n`-orbifold,
/// at `l = step, 2 step, ...` up to `ell_max`.
///
/// The number of Salem numbers of degree at most `n` with `lambda <= e^l` is
/// instantiated by the leading terms `omega_m Q^(m+1)` for degrees `4..=n` and
/// `Q - 2` for degree 2.
pub fn multiplicity_report(n: u32, ell_max: f64, step: f64) -> Result<Vec<MultiplicityRow>> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "n={n} must be even and at least 4"
        )));
    }
    if !(step >= 1.0 && step.is_finite() && ell_max >= step && ell_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= step <= ell_max, got step={step} ell_max={ell_max}"
        )));
    }
    let omegas: Vec<f64> = (1..n / 2)
        .map(|m| omega(m).map(|w| w.to_f64().unwrap_or(f64::INFINITY)))
        .collect::<Result<_>>()?;
    let steps = (ell_max / step + 1e-9).floor() as u64;
    let dim = (n - 1) as f64;
    let mut rows = Vec::with_capacity(steps as usize);
    for i in 1..=steps {
        let ell = i as f64 * step;
        let geodesic_count = (dim * ell).exp() / (dim * ell);
        let salem_bound = omegas
            .iter()
            .enumerate()
            .map(|(j, w)| w * ((j as f64 + 2.0) * ell).exp())
            .sum::<f64>()
            + (ell.exp() - 2.0);
        let mean_mult_lower = geodesic_count / salem_bound;
        if !(geodesic_count.is_finite() && salem_bound.is_finite() && mean_mult_lower.is_finite()) {
            return Err(Error::Capacity(format!("report overflows f64 at l={ell}")));
        }
        rows.push(MultiplicityRow {
            ell,
            geodesic_count,
            salem_bound,
            mean_mult_lower,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;
    use proptest::prelude::*;

    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(1).unwrap(), q(2, 1));
        // 2^6 / 3 * (0!^2/1!) * (1!^2/3!) = 64/18
        assert_eq!(omega(2).unwrap(), q(32, 9));
        // 2^12 / 4 * (1/1) * (1/6) * (4/120)
        assert_eq!(omega(3).unwrap(), q(256, 45));
        assert!(omega(0).is_err());
    }

    #[test]
    fn omega_large_m_is_exact() {
        let w = omega(50).unwrap();
        assert!(!w.is_zero());
        // recurrence: omega_{m+1}/omega_m = 2^(2m+2) (m+1) m!^2 / ((m+2) (2m+1)!)
        for m in 1u32..50 {
            let ratio = omega(m + 1).unwrap() / omega(m).unwrap();
            let mm = m as u64;
            let f = factorial(mm);
            let expected = BigRational::new(
                (BigInt::one() << (2 * mm + 2)) * BigInt::from(mm + 1) * &f * &f,
                BigInt::from(mm + 2) * factorial(2 * mm + 1),
            );
            assert_eq!(ratio, expected, "m={m}");
        }
    }

    #[test]
    fn exact_power_data() {
        let fit = power_fit(&[(10.0, 200.0), (100.0, 20_000.0), (1000.0, 2e6)]).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-9);
        assert!((fit.constant - 2.0).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
        assert_eq!(fit.points_used, 3);
    }

    #[test]
    fn drops_contaminated_small_q() {
        let mut pts: Vec<(f64, f64)> = [100.0, 200.0, 400.0, 800.0, 1600.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powf(1.5)))
            .collect();
        pts[0].1 *= 1.5;
        let fit = power_fit(&pts).unwrap();
        assert_eq!(fit.dropped, vec![100.0]);
        assert_eq!(fit.points_used, 4);
        assert!((fit.exponent - 1.5).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(
            power_fit(&[(1.0, 1.0), (2.0, 2.0)]),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            power_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 3.0)]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(power_fit(&[(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_synthetic_power_laws(c in 0.01f64..100.0, s in 0.2f64..3.0, start in 1.0f64..50.0) {
            let pts: Vec<_> = (0..6).map(|i| {
                let x = start * 2f64.powi(i);
                (x, c * x.powf(s))
            }).collect();
            let fit = power_fit(&pts).unwrap();
            prop_assert!((fit.exponent - s).abs() < 1e-9);
            prop_assert!((fit.constant / c - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn report_examples() {
        let rows = multiplicity_report(4, 10.0, 1.0).unwrap();
        assert_eq!(rows.len(), 10);
        let r = &rows[9];
        assert_eq!(r.ell, 10.0);
        assert!((r.geodesic_count / (30f64.exp() / 30.0) - 1.0).abs() < 1e-12);
        assert!((r.salem_bound / (2.0 * 20f64.exp()) - 1.0).abs() < 1e-4);
        assert!((r.mean_mult_lower / (10f64.exp() / 60.0) - 1.0).abs() < 1e-4);

        for r in multiplicity_report(6, 5.0, 1.0).unwrap() {
            assert!(r.geodesic_count > 0.0 && r.salem_bound > 0.0 && r.mean_mult_lower > 0.0);
            assert_eq!(r.mean_mult_lower, r.geodesic_count / r.salem_bound);
        }
    }

    #[test]
    fn report_leading_constant() {
        let rows = multiplicity_report(4, 40.0, 1.0).unwrap();
        let scaled: Vec<f64> = rows
            .iter()
            .map(|r| r.mean_mult_lower * r.ell * (-r.ell).exp())
            .collect();
        assert!((scaled.last().unwrap() - 1.0 / 6.0).abs() < 1e-12);
        for w in rows.windows(2) {
            assert!(w[1].mean_mult_lower > w[0].mean_mult_lower);
        }
        // n = 6: ratio l e^(-2l) -> 1/(5 omega_2) = 9/160
        let rows = multiplicity_report(6, 30.0, 1.5).unwrap();
        let r = rows.last().unwrap();
        assert!((r.mean_mult_lower * r.ell * (-2.0 * r.ell).exp() - 9.0 / 160.0).abs() < 1e-9);
    }

    #[test]
    fn report_rejects_bad_input() {
        for (n, l, s) in [
            (5, 10.0, 1.0),
            (2, 10.0, 1.0),
            (4, 10.0, 0.5),
            (4, 1.0, 2.0),
        ] {
            assert!(matches!(
                multiplicity_report(n, l, s),
                Err(Error::InvalidArgument(_))
            ));
        }
        assert!(multiplicity_report(4, 400.0, 1.0)
            .unwrap_err()
            .is_capacity());
    }
}
