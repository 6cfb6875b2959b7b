//! Universal numerical constants of the smoothing-inequality pipeline.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{find_root, maximize_scalar};
use crate::special::normal_cdf;

/// Shift parameter and constant of the first sharpened inequality.
pub const THEOREM1_K: f64 = 0.425;
pub const THEOREM1_CONSTANT: f64 = 0.335789;
/// Shift parameter and constant of the second sharpened inequality.
pub const THEOREM2_K: f64 = 1.0;
pub const THEOREM2_CONSTANT: f64 = 0.3051;

/// Rounded universal bound used in the regime-boundary arithmetic (`ε ≥ 0.541 / C`).
pub const UNIVERSAL_BOUND_ROUNDED: f64 = 0.541;

/// Constants of the small-ε estimate `ρ ≤ (0.2727 β³ + 0.2041)/√n`.
pub const SMALL_EPS_SLOPE: f64 = 0.2727;
pub const SMALL_EPS_INTERCEPT: f64 = 0.2041;

const THETA0_TOL: f64 = 1e-12;
const KAPPA_SCAN_POINTS: usize = 200_000;
const KAPPA_SCAN_TOL: f64 = 1e-6;

/// `θ² + 2θ sin θ + 6(cos θ − 1)`; its root in `(π, 2π)` is θ₀.
pub fn theta_equation(theta: f64) -> f64 {
    theta * theta + 2.0 * theta * theta.sin() + 6.0 * (theta.cos() - 1.0)
}

/// `3(1 − cos θ) − θ sin θ − θ²/2`, the same equation scaled by −1/2.
pub fn theta_equation_alt(theta: f64) -> f64 {
    3.0 * (1.0 - theta.cos()) - theta * theta.sin() - 0.5 * theta * theta
}

pub fn compute_theta0(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "must be positive"));
    }
    find_root(theta_equation, PI, 2.0 * PI, tol)
}

/// `(cos x − 1 + x²/2)/x³`, with a series branch where the numerator cancels.
pub fn cubic_taylor_ratio(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        return x / 24.0 - x * x2 / 720.0 + x * x2 * x2 / 40320.0;
    }
    (x.cos() - 1.0 + 0.5 * x * x) / (x * x * x)
}

/// ϰ from the closed form at θ₀, cross-checked against a grid scan of the ratio on (0, 4π].
pub fn compute_kappa(theta0: f64) -> Result<f64> {
    if !(theta0 > PI && theta0 < 2.0 * PI) {
        return Err(domain("theta0", theta0, "must lie in (pi, 2pi)"));
    }
    let closed = cubic_taylor_ratio(theta0);
    let scan = kappa_grid_scan(KAPPA_SCAN_POINTS);
    if scan > closed + KAPPA_SCAN_TOL {
        return Err(Error::KappaMismatch { scan, closed });
    }
    Ok(closed)
}

/// Max of the cubic Taylor ratio over an equispaced grid on (0, 4π].
pub fn kappa_grid_scan(points: usize) -> f64 {
    let h = 4.0 * PI / points as f64;
    (1..=points)
        .map(|i| cubic_taylor_ratio(i as f64 * h))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Esseen's lower bound `(√10 + 3)/(6√(2π))`.
pub fn esseen_lower_constant() -> f64 {
    (10f64.sqrt() + 3.0) / (6.0 * (2.0 * PI).sqrt())
}

/// `sup_{x>0} Φ(x) − x²/(1+x²)`, the universal bound on ρ(F, Φ) for standardized F.
pub fn bhattacharya_bound() -> f64 {
    let objective = |x: f64| normal_cdf(x) - x * x / (1.0 + x * x);
    // the objective is smooth with a single interior mode on [0, 10]
    maximize_scalar(objective, 0.0, 10.0, 1e-12)
        .map(|(_, v)| v)
        .unwrap_or(f64::NAN)
}

/// Constant `C_k` supplied by the small-ε estimate, when it applies.
///
/// With `g(b) = (0.2727 b + 0.2041)/(b + k)` monotone in `b ≥ 1`, the sup is
/// `max{g(1), 0.2727}`: that is 0.2727 for `k ≥ 0.75` and `0.4768/(1+k)` for `k ≤ 0.74`.
/// Applies for `ε ≤ 0.05(1+k)`.
pub fn small_eps_regime(k: f64, epsilon: f64) -> Result<Option<f64>> {
    if !(0.0..=1.0).contains(&k) {
        return Err(domain("k", k, "must lie in [0, 1]"));
    }
    if !(epsilon > 0.0) {
        return Err(domain("epsilon", epsilon, "must be positive"));
    }
    if epsilon > 0.05 * (1.0 + k) {
        return Ok(None);
    }
    let at_one = (SMALL_EPS_SLOPE + SMALL_EPS_INTERCEPT) / (1.0 + k);
    Ok(Some(at_one.max(SMALL_EPS_SLOPE)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalConstants {
    pub theta0: f64,
    pub kappa: f64,
    pub esseen_lower: f64,
    pub bhattacharya_bound: f64,
}

impl UniversalConstants {
    pub fn compute() -> Result<Self> {
        let theta0 = compute_theta0(THETA0_TOL)?;
        let kappa = compute_kappa(theta0)?;
        Ok(Self {
            theta0,
            kappa,
            esseen_lower: esseen_lower_constant(),
            bhattacharya_bound: bhattacharya_bound(),
        })
    }
}

static UNIVERSAL: OnceLock<UniversalConstants> = OnceLock::new();

/// Process-wide constants, computed on first use.
pub fn universal() -> &'static UniversalConstants {
    UNIVERSAL.get_or_init(|| UniversalConstants::compute().expect("universal constants"))
}

#[inline]
pub fn theta0() -> f64 {
    universal().theta0
}

#[inline]
pub fn kappa() -> f64 {
    universal().kappa
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta0_value_and_bracket() {
        let t = compute_theta0(1e-9).unwrap();
        assert!((t - 3.99589567).abs() < 1e-7);
        assert!(theta_equation(PI) < 0.0);
        assert!(theta_equation(2.0 * PI) > 0.0);
        assert!((theta_equation(PI) - (PI * PI - 12.0)).abs() < 1e-12);
        assert!((theta_equation(2.0 * PI) - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn theta0_bisection_brackets() {
        let tol = 1e-10;
        let t = compute_theta0(tol).unwrap();
        assert!(theta_equation(t - tol) * theta_equation(t + tol) <= 0.0);
        // residual scaled by the slope at the root
        let slope = (theta_equation(t + 1e-6) - theta_equation(t - 1e-6)) / 2e-6;
        assert!(theta_equation(t).abs() <= slope.abs() * tol);
    }

    #[test]
    fn both_equation_forms_agree() {
        let a = compute_theta0(1e-13).unwrap();
        let b = find_root(theta_equation_alt, PI, 2.0 * PI, 1e-13).unwrap();
        assert!((a - b).abs() < 1e-9);
        for &x in &[3.3, 4.0, 5.1] {
            assert!((theta_equation(x) + 2.0 * theta_equation_alt(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_value_and_identity() {
        let c = universal();
        assert!((c.kappa - 0.09916191).abs() < 1e-7);
        let t = c.theta0;
        let lhs = t * t / 2.0 - c.kappa * t.powi(3);
        assert!((lhs - (1.0 - t.cos())).abs() < 1e-10);
        assert!(c.kappa * c.theta0 < 0.5);
    }

    #[test]
    fn kappa_grid_scan_does_not_exceed_closed_form() {
        assert!(kappa_grid_scan(100_000) <= kappa() + 1e-6);
        assert!(compute_kappa(2.0).is_err());
    }

    #[test]
    fn cubic_ratio_small_argument() {
        assert!((cubic_taylor_ratio(1e-6) - 1e-6 / 24.0).abs() < 1e-18);
        let x: f64 = 0.0099;
        let direct = (x.cos() - 1.0 + 0.5 * x * x) / (x * x * x);
        assert!((cubic_taylor_ratio(x) - direct).abs() < 1e-6);
    }

    #[test]
    fn esseen_constant() {
        let c = esseen_lower_constant();
        assert!((c - 0.409732).abs() < 1e-5);
        assert!(c < 0.4785);
        assert!(c > 2.0 / (3.0 * (2.0 * PI).sqrt()));
        assert!((2.0 / (3.0 * (2.0 * PI).sqrt()) - 0.2659).abs() < 1e-4);
    }

    #[test]
    fn bhattacharya_value() {
        let b = bhattacharya_bound();
        assert!((b - 0.54093654).abs() < 1e-6);
        assert!(b >= 0.5);
        let tail = normal_cdf(50.0) - 2500.0 / 2501.0;
        assert!(tail > 0.0 && tail < 1e-3);
    }

    #[test]
    fn small_eps_regime_values() {
        let c = small_eps_regime(0.425, 0.07).unwrap().unwrap();
        assert!((c - 0.3346).abs() < 1e-4);
        assert_eq!(small_eps_regime(1.0, 0.1).unwrap(), Some(0.2727));
        assert_eq!(small_eps_regime(0.425, 0.5).unwrap(), None);
        assert!((0.05f64 * 1.425 - 0.07125).abs() < 1e-15);
        assert!(small_eps_regime(1.2, 0.01).is_err());
        assert!(small_eps_regime(-0.1, 0.01).is_err());
    }
}
