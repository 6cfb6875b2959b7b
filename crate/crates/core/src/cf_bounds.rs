//! Majorants of the characteristic function of a normalized sum and bounds on its distance
//! to the Gaussian characteristic function.
//!
//! All remainder bounds share the shape
//!
//! ```text
//! r(t) = c · e^{-t²/2} ∫_0^{|t|} (u²/2) exp(w(u)) du
//! ```
//!
//! with a prefactor `c` and a log-weight `w`. [`RemainderIntegrand`] captures that pair, and
//! [`RemainderTable`] evaluates `r` at many points by accumulating the integral once on a
//! fixed panel grid.

use serde::{Deserialize, Serialize};

use crate::constants::{kappa, theta0};
use crate::error::{domain, Error, Result};
use crate::quadrature::{find_root, gk21, integrate_with_breaks, CertifiedValue, DEFAULT_TOL};

/// The piecewise function χ(t, ε) bounding `-ln|f(t)|` in terms of the third moment.
pub fn chi(t: f64, eps: f64) -> f64 {
    let t = t.abs();
    let x = eps * t;
    let th0 = theta0();
    if x <= th0 {
        0.5 * t * t - kappa() * eps * t * t * t
    } else if x <= 2.0 * std::f64::consts::PI {
        (1.0 - x.cos()) / (eps * eps)
    } else {
        0.0
    }
}

/// Points `|t|` where χ(·, ε) switches branch.
pub fn chi_breaks(eps: f64) -> [f64; 2] {
    [theta0() / eps, 2.0 * std::f64::consts::PI / eps]
}

/// `[1 − (2/n)χ(t, ε)]^{n/2}`, or `None` when the bracket is negative.
pub fn f1(t: f64, eps: f64, n: u64) -> Option<f64> {
    let nf = n as f64;
    let bracket = 1.0 - 2.0 * chi(t, eps) / nf;
    if bracket < 0.0 {
        None
    } else {
        Some(bracket.powf(0.5 * nf))
    }
}

pub fn f2(t: f64, eps: f64) -> f64 {
    (-chi(t, eps)).exp()
}

pub fn f3(t: f64, eps: f64) -> f64 {
    let t = t.abs();
    (-0.5 * t * t + kappa() * eps * t * t * t).exp()
}

/// `f1` where defined, `f2` otherwise; both bound `|f_n(t)|`.
pub fn f1_or_f2(t: f64, eps: f64, n: u64) -> f64 {
    f1(t, eps, n).unwrap_or_else(|| f2(t, eps))
}

/// The interval of `|t|` on which `1 − (2/n)χ(t, ε) < 0`, if any.
///
/// `ε²χ(x/ε, ε)` is unimodal in `x` with peak `1/(54ϰ²)` at `x = 1/(3ϰ)`, so the set is empty
/// or a single interval.
pub fn f1_negative_interval(eps: f64, n: u64) -> Option<(f64, f64)> {
    let kap = kappa();
    let level = 0.5 * n as f64 * eps * eps;
    let peak_x = 1.0 / (3.0 * kap);
    if level >= 1.0 / (54.0 * kap * kap) {
        return None;
    }
    let g = |x: f64| eps * eps * chi(x / eps, eps) - level;
    let lo = find_root(g, 0.0, peak_x, 1e-14).ok()?;
    let hi = find_root(g, peak_x, 2.0 * std::f64::consts::PI, 1e-14).ok()?;
    Some((lo / eps, hi / eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemainderKind {
    R1,
    R2,
    R3,
}

/// Prefactor and log-weight of a remainder bound (see the module docs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RemainderIntegrand {
    /// Finite-`n` bounds at Lyapunov fraction `ell`.
    Finite {
        kind: RemainderKind,
        ell: f64,
        n: u64,
    },
    /// Uniform in `n ≥ n_tail`, exponent `((N−1)/N)·χ(u, ε + (1−k)/√N)`.
    UniformR2 { eps: f64, n_tail: u64, k: f64 },
}

impl RemainderIntegrand {
    pub fn prefactor(&self) -> f64 {
        match *self {
            Self::Finite { ell, .. } => ell,
            Self::UniformR2 { eps, .. } => eps,
        }
    }

    /// The ε at which χ is evaluated inside the integrand.
    pub fn chi_eps(&self) -> f64 {
        match *self {
            Self::Finite { ell, n, .. } => ell + 1.0 / (n as f64).sqrt(),
            Self::UniformR2 { eps, n_tail, k } => eps + (1.0 - k) / (n_tail as f64).sqrt(),
        }
    }

    /// `w(u)` such that the integrand is `(u²/2)·exp(w(u))`.
    pub fn log_weight(&self, u: f64) -> f64 {
        let eps = self.chi_eps();
        match *self {
            Self::Finite { kind, n, .. } => {
                let nf = n as f64;
                match kind {
                    RemainderKind::R1 => {
                        if n == 1 {
                            return 0.5 * u * u;
                        }
                        let c = chi(u, eps);
                        let bracket = 1.0 - 2.0 * c / nf;
                        if bracket > 0.0 {
                            0.5 * u * u + 0.5 * (nf - 1.0) * bracket.ln()
                        } else {
                            0.5 * u * u - (nf - 1.0) / nf * c
                        }
                    }
                    RemainderKind::R2 => 0.5 * u * u - (nf - 1.0) / nf * chi(u, eps),
                    RemainderKind::R3 => {
                        let ke = kappa() * eps;
                        ke * u * u * u + u * u / (2.0 * nf) * (1.0 - 2.0 * ke * u)
                    }
                }
            }
            Self::UniformR2 { n_tail, .. } => {
                let nf = n_tail as f64;
                0.5 * u * u - (nf - 1.0) / nf * chi(u, eps)
            }
        }
    }

    fn uses_chi(&self) -> bool {
        !matches!(
            self,
            Self::Finite {
                kind: RemainderKind::R3,
                ..
            }
        )
    }

    fn breaks(&self) -> Vec<f64> {
        if self.uses_chi() {
            chi_breaks(self.chi_eps()).to_vec()
        } else {
            Vec::new()
        }
    }

    /// `e^{-s²/2}∫_0^s (u²/2)exp(w(u)) du` by direct adaptive quadrature.
    pub fn scaled_integral(&self, s: f64, tol: f64) -> Result<CertifiedValue> {
        let s = s.abs();
        if s == 0.0 {
            return Ok(CertifiedValue::exact(0.0));
        }
        let half_s2 = 0.5 * s * s;
        let mut points = vec![0.0];
        points.extend(self.breaks().into_iter().filter(|&b| b < s));
        points.push(s);
        integrate_with_breaks(
            |u| 0.5 * u * u * (self.log_weight(u) - half_s2).exp(),
            &points,
            tol,
        )
    }

    /// The remainder bound at `t`, by direct quadrature.
    pub fn evaluate(&self, t: f64, tol: f64) -> Result<CertifiedValue> {
        let c = self.prefactor();
        if c == 0.0 {
            return Ok(CertifiedValue::exact(0.0));
        }
        Ok(self.scaled_integral(t, tol / c)?.scale(c))
    }
}

fn check_finite_args(ell: f64, n: u64) -> Result<()> {
    if !(ell >= 0.0) || !ell.is_finite() {
        return Err(domain("ell", ell, "Lyapunov fraction must be nonnegative"));
    }
    if n == 0 {
        return Err(domain("n", 0.0, "must be at least 1"));
    }
    Ok(())
}

/// Remainder bound with the `f1` power inside (`f2` form where the bracket is negative).
pub fn r1(t: f64, ell: f64, n: u64) -> Result<CertifiedValue> {
    remainder(RemainderKind::R1, t, ell, n, DEFAULT_TOL)
}

pub fn r2(t: f64, ell: f64, n: u64) -> Result<CertifiedValue> {
    remainder(RemainderKind::R2, t, ell, n, DEFAULT_TOL)
}

pub fn r3(t: f64, ell: f64, n: u64) -> Result<CertifiedValue> {
    remainder(RemainderKind::R3, t, ell, n, DEFAULT_TOL)
}

pub fn remainder(
    kind: RemainderKind,
    t: f64,
    ell: f64,
    n: u64,
    tol: f64,
) -> Result<CertifiedValue> {
    check_finite_args(ell, n)?;
    RemainderIntegrand::Finite { kind, ell, n }.evaluate(t, tol)
}

/// `T(N, ε) = min{N^{1/4} ε^{-1/2}, (2ϰε)^{-1}}`.
pub fn cutoff_t(n_tail: u64, eps: f64) -> f64 {
    let nf = n_tail as f64;
    (nf.powf(0.25) / eps.sqrt()).min(1.0 / (2.0 * kappa() * eps))
}

fn check_uniform_args(eps: f64, n_tail: u64, k: f64) -> Result<()> {
    if n_tail == 0 {
        return Err(domain("N", 0.0, "must be at least 1"));
    }
    if !(k <= 1.0) {
        return Err(domain("k", k, "must not exceed 1"));
    }
    if !(eps > k / (n_tail as f64).sqrt()) {
        return Err(domain("eps", eps, "uniform bounds need eps > k/sqrt(N)"));
    }
    Ok(())
}

/// `f_j(t, ε + (1−k)/√N)` for `j ∈ {1, 2}`; for `j = 1` the power uses `n = N`.
///
/// Only the `j = 2` form dominates `f_j(t, ε + (1−k)/√n[, n])` for every `n ≥ N`:
/// `[1 − 2x/n]^{n/2}` grows with `n`, so the `j = 1` value is a bound at `n = N` only.
pub fn uniform_f(j: u8, t: f64, eps: f64, n_tail: u64, k: f64) -> Result<f64> {
    check_uniform_args(eps, n_tail, k)?;
    let shifted = eps + (1.0 - k) / (n_tail as f64).sqrt();
    match j {
        1 => Ok(f1_or_f2(t, shifted, n_tail)),
        2 => Ok(f2(t, shifted)),
        _ => Err(domain("j", j as f64, "only j = 1 and j = 2 are defined")),
    }
}

/// Uniform-in-`n ≥ N` version of `r2` (prefactor ε).
pub fn uniform_r2(t: f64, eps: f64, n_tail: u64, k: f64) -> Result<CertifiedValue> {
    check_uniform_args(eps, n_tail, k)?;
    RemainderIntegrand::UniformR2 { eps, n_tail, k }.evaluate(t, DEFAULT_TOL)
}

pub(crate) fn uniform_r3_raw(t: f64, eps: f64) -> f64 {
    let t = t.abs();
    let kap = kappa();
    (kap * eps * t * t * t).exp_m1() * (-0.5 * t * t).exp() / (6.0 * kap)
}

/// Closed-form uniform bound `(e^{ϰε|t|³} − 1)e^{-t²/2}/(6ϰ)`, valid for `|t| ≤ T(N, ε)`.
pub fn uniform_r3(t: f64, eps: f64, n_tail: u64) -> Result<f64> {
    check_uniform_args(eps, n_tail, 1.0)?;
    let cutoff = cutoff_t(n_tail, eps);
    if t.abs() > cutoff {
        return Err(Error::Cutoff {
            reach: t.abs(),
            cutoff,
        });
    }
    Ok(uniform_r3_raw(t, eps))
}

const TABLE_PANEL: f64 = 0.25;

/// Cumulative evaluation of a remainder bound on `[0, s_max]`.
///
/// Stores `S(u_i) = e^{-u_i²/2}∫_0^{u_i}(u²/2)e^{w(u)}du` at panel nodes (branch points of χ
/// are nodes), so each later evaluation costs a single Gauss–Kronrod panel. The scaling by
/// `e^{-u²/2}` keeps every stored quantity bounded.
#[derive(Debug, Clone)]
pub struct RemainderTable {
    integrand: RemainderIntegrand,
    nodes: Vec<f64>,
    scaled: Vec<f64>,
    scaled_err: Vec<f64>,
    panel_tol: f64,
}

impl RemainderTable {
    pub fn new(integrand: RemainderIntegrand, s_max: f64, tol: f64) -> Result<Self> {
        let s_max = s_max.abs();
        let mut nodes = vec![0.0];
        let mut breaks: Vec<f64> = integrand
            .breaks()
            .into_iter()
            .filter(|&b| b > 0.0 && b < s_max)
            .collect();
        breaks.push(s_max);
        let mut left = 0.0;
        for b in breaks {
            let pieces = ((b - left) / TABLE_PANEL).ceil().max(1.0) as usize;
            for i in 1..=pieces {
                nodes.push(if i == pieces {
                    b
                } else {
                    left + (b - left) * i as f64 / pieces as f64
                });
            }
            left = b;
        }
        let panel_tol = tol / nodes.len().max(1) as f64;
        let mut scaled = vec![0.0; nodes.len()];
        let mut scaled_err = vec![0.0; nodes.len()];
        for i in 1..nodes.len() {
            let (a, b) = (nodes[i - 1], nodes[i]);
            let carry = (0.5 * (a * a - b * b)).exp();
            let panel = panel_integral(&integrand, a, b, b, panel_tol)?;
            scaled[i] = scaled[i - 1] * carry + panel.estimate;
            scaled_err[i] = scaled_err[i - 1] * carry + panel.error_bound;
        }
        Ok(Self {
            integrand,
            nodes,
            scaled,
            scaled_err,
            panel_tol,
        })
    }

    pub fn integrand(&self) -> &RemainderIntegrand {
        &self.integrand
    }

    pub fn s_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// The remainder bound at `t` with `|t| ≤ s_max`.
    pub fn evaluate(&self, t: f64) -> Result<CertifiedValue> {
        let s = t.abs();
        if s > self.s_max() * (1.0 + 1e-12) {
            return Err(domain("t", t, "outside the tabulated range"));
        }
        let s = s.min(self.s_max());
        let i = match self.nodes.partition_point(|&x| x <= s) {
            0 => 0,
            p => p - 1,
        };
        let a = self.nodes[i];
        let carry = (0.5 * (a * a - s * s)).exp();
        let partial = if s > a {
            panel_integral(&self.integrand, a, s, s, self.panel_tol)?
        } else {
            CertifiedValue::exact(0.0)
        };
        let value = CertifiedValue::new(
            self.scaled[i] * carry + partial.estimate,
            self.scaled_err[i] * carry + partial.error_bound,
        );
        Ok(value.scale(self.integrand.prefactor()))
    }
}

/// `e^{-s²/2}∫_a^b (u²/2)e^{w(u)}du` over a χ-smooth panel: one GK21 rule, adaptive only if
/// the embedded error estimate misses the tolerance.
fn panel_integral(
    integrand: &RemainderIntegrand,
    a: f64,
    b: f64,
    s: f64,
    tol: f64,
) -> Result<CertifiedValue> {
    let half_s2 = 0.5 * s * s;
    let f = |u: f64| 0.5 * u * u * (integrand.log_weight(u) - half_s2).exp();
    let p = gk21(&f, a, b)?;
    if p.error <= tol {
        return Ok(CertifiedValue::new(p.value, p.error));
    }
    integrate_with_breaks(f, &[a, b], tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS_GRID: [f64; 6] = [0.05, 0.2, 0.5, 0.9, 1.4, 2.0];

    #[test]
    fn chi_zero_and_far_field() {
        for &e in &EPS_GRID {
            assert_eq!(chi(0.0, e), 0.0);
            assert_eq!(chi(2.0 * std::f64::consts::PI / e + 1.0, e), 0.0);
        }
    }

    #[test]
    fn chi_continuous_at_breaks() {
        for &e in &EPS_GRID {
            let [b1, b2] = chi_breaks(e);
            let left = chi(b1 * (1.0 - 1e-12), e);
            let right = chi(b1 * (1.0 + 1e-12), e);
            assert!((left - right).abs() < 1e-9 / (e * e));
            assert!((chi(b1, e) - (1.0 - theta0().cos()) / (e * e)).abs() < 1e-10 / (e * e));
            assert!(chi(b2 * (1.0 - 1e-12), e).abs() < 1e-9 / (e * e));
        }
    }

    #[test]
    fn chi_within_gaussian_envelope_and_monotone() {
        for i in 0..200 {
            let t = i as f64 * 0.1;
            for w in EPS_GRID.windows(2) {
                let (lo, hi) = (chi(t, w[0]), chi(t, w[1]));
                assert!(lo >= 0.0 && lo <= 0.5 * t * t + 1e-12);
                assert!(lo + 1e-12 >= hi, "t={t} eps {w:?}");
            }
        }
    }

    #[test]
    fn f_values_at_origin() {
        for &e in &EPS_GRID {
            assert_eq!(f1(0.0, e, 7), Some(1.0));
            assert_eq!(f2(0.0, e), 1.0);
            assert_eq!(f3(0.0, e), 1.0);
        }
    }

    #[test]
    fn f1_negative_bracket_is_absent() {
        // n = 2, eps = 0.5: χ near θ0/eps is ~6.8, so 1 − χ < 0
        let t = theta0() / 0.5;
        let b = 1.0 - chi(t, 0.5);
        assert!(b < 0.0);
        assert_eq!(f1(t, 0.5, 2), None);
        assert_eq!(f1_or_f2(t, 0.5, 2), f2(t, 0.5));
    }

    #[test]
    fn negative_bracket_interval() {
        let (lo, hi) = f1_negative_interval(0.5, 2).unwrap();
        for i in 0..400 {
            let t = i as f64 * 0.05;
            let inside = t > lo && t < hi;
            let negative = f1(t, 0.5, 2).is_none();
            if (t - lo).abs() > 1e-9 && (t - hi).abs() > 1e-9 {
                assert_eq!(inside, negative, "t={t}");
            }
        }
        // n·ε² ≥ 4 whenever n ≥ n_* and the f1 argument is ℓ + 1/√n
        assert!(f1_negative_interval(2.0 / 5f64.sqrt(), 5).is_none());
    }

    #[test]
    fn f3_below_one_near_origin() {
        let e = 0.8;
        let t = 0.4 / (kappa() * e) * 0.99;
        assert!(kappa() * e * t < 0.5);
        assert!(f3(t, e) < 1.0);
    }

    #[test]
    fn majorant_chain_on_grid() {
        for i in 0..50 {
            let t = 0.01 + i as f64 * 0.4;
            for j in 0..20 {
                let e = 0.05 + j as f64 * 0.1;
                let v2 = f2(t, e);
                let v3 = f3(t, e);
                assert!(v2 <= v3 * (1.0 + 1e-12), "t={t} e={e}");
                for &n in &[2u64, 5, 30] {
                    if let Some(v1) = f1(t, e, n) {
                        assert!(v1 <= v2 * (1.0 + 1e-12));
                    }
                }
                assert!(f2(t, e) <= f2(t, e + 0.05) + 1e-15);
            }
        }
    }

    #[test]
    fn remainder_chain_on_grid() {
        for i in 1..=25 {
            let t = i as f64 * 0.2;
            for &ell in &[0.05, 0.2, 0.5] {
                for &n in &[2u64, 10, 50] {
                    let a = r1(t, ell, n).unwrap();
                    let b = r2(t, ell, n).unwrap();
                    let c = r3(t, ell, n).unwrap();
                    assert!(a.lower() <= b.upper(), "t={t} ell={ell} n={n}");
                    assert!(b.lower() <= c.upper(), "t={t} ell={ell} n={n}");
                }
            }
        }
        let a = r1(2.0, 0.3, 10).unwrap();
        let b = r2(2.0, 0.3, 10).unwrap();
        assert!(b.estimate >= a.estimate);
    }

    #[test]
    fn remainders_vanish_at_zero_and_zero_ell() {
        assert_eq!(r1(0.0, 0.3, 4).unwrap().estimate, 0.0);
        assert_eq!(r2(0.0, 0.3, 4).unwrap().estimate, 0.0);
        assert_eq!(r3(0.0, 0.3, 4).unwrap().estimate, 0.0);
        for &t in &[0.5, 3.0, 9.0] {
            assert_eq!(r1(t, 0.0, 4).unwrap().estimate, 0.0);
        }
    }

    #[test]
    fn r2_r3_monotone_in_ell() {
        for &t in &[0.5, 1.5, 3.0, 5.0] {
            for &n in &[3u64, 20] {
                let mut prev2 = 0.0;
                let mut prev3 = 0.0;
                for i in 1..10 {
                    let ell = i as f64 * 0.07;
                    let v2 = r2(t, ell, n).unwrap().estimate;
                    let v3 = r3(t, ell, n).unwrap().estimate;
                    assert!(v2 + 1e-12 >= prev2);
                    assert!(v3 + 1e-12 >= prev3);
                    prev2 = v2;
                    prev3 = v3;
                }
            }
        }
    }

    #[test]
    fn cutoff_values() {
        let c = cutoff_t(200, 1.0);
        assert!((c - 3.7606).abs() < 1e-3);
        for &e in &[0.3f64, 0.985, 1.5] {
            let expected = (3.7606 / e.sqrt()).min(5.0423 / e);
            assert!((cutoff_t(200, e) - expected).abs() < 2e-3 * expected);
        }
        let big = 1e4;
        assert!((cutoff_t(200, big) - 1.0 / (2.0 * kappa() * big)).abs() < 1e-15);
    }

    #[test]
    fn uniform_f_special_cases() {
        for &t in &[0.0, 1.0, 4.0] {
            let a = uniform_f(2, t, 0.7, 50, 1.0).unwrap();
            let b = uniform_f(2, t, 0.7, 5000, 1.0).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, f2(t, 0.7));
        }
        assert_eq!(uniform_f(1, 0.0, 0.7, 50, 0.4).unwrap(), 1.0);
        assert_eq!(uniform_f(2, 0.0, 0.7, 50, 0.4).unwrap(), 1.0);
        assert!(uniform_f(2, 1.0, 0.01, 100, 0.425).is_err());
        assert!(uniform_f(3, 1.0, 0.5, 100, 0.425).is_err());
    }

    #[test]
    fn uniform_f2_dominates_tail() {
        let (n_tail, k) = (100u64, 0.425);
        for &e in &[0.2, 0.6, 1.2] {
            for i in 0..40 {
                let t = i as f64 * 0.3;
                let u = uniform_f(2, t, e, n_tail, k).unwrap();
                for &n in &[n_tail, 2 * n_tail, 10 * n_tail] {
                    let shifted = e + (1.0 - k) / (n as f64).sqrt();
                    assert!(u + 1e-15 >= f1_or_f2(t, shifted, n));
                    assert!(u + 1e-15 >= f2(t, shifted));
                }
            }
        }
    }

    #[test]
    fn uniform_r3_closed_form_matches_integral() {
        let eps = 0.985;
        for &t in &[0.3, 1.0, 2.5, 3.7] {
            let closed = uniform_r3(t, eps, 200).unwrap();
            let kap = kappa();
            let integral = crate::quadrature::integrate(
                |u| u * u * (kap * eps * u * u * u).exp(),
                0.0,
                t,
                1e-12,
            )
            .unwrap();
            let via = 0.5 * eps * (-0.5 * t * t).exp() * integral.estimate;
            assert!((closed - via).abs() < 1e-11, "t={t}: {closed} vs {via}");
        }
        assert_eq!(uniform_r3(0.0, eps, 200).unwrap(), 0.0);
        assert!(matches!(
            uniform_r3(3.9, eps, 200),
            Err(Error::Cutoff { .. })
        ));
    }

    #[test]
    fn uniform_r3_dominates_finite_r3() {
        let n_tail = 200u64;
        for &eps in &[0.3, 0.985, 1.5] {
            let cut = cutoff_t(n_tail, eps);
            for i in 1..=8 {
                let t = cut * i as f64 / 8.0;
                let u = uniform_r3(t, eps, n_tail).unwrap();
                for &n in &[n_tail, 2 * n_tail, 10 * n_tail] {
                    let ell = eps - 1.0 / (n as f64).sqrt();
                    let finite = r3(t, ell, n).unwrap();
                    assert!(u * (1.0 + 1e-9) >= finite.lower(), "eps={eps} t={t} n={n}");
                }
            }
        }
    }

    #[test]
    fn uniform_r2_dominates_finite_r2() {
        let (n_tail, k) = (100u64, 0.425);
        for &eps in &[0.3, 0.8] {
            for &t in &[1.0, 3.0, 6.0] {
                let u = uniform_r2(t, eps, n_tail, k).unwrap();
                for &n in &[n_tail, 2 * n_tail, 10 * n_tail] {
                    let ell = eps - k / (n as f64).sqrt();
                    let finite = r2(t, ell, n).unwrap();
                    assert!(u.upper() >= finite.lower(), "eps={eps} t={t} n={n}");
                }
            }
        }
    }

    #[test]
    fn table_agrees_with_direct_quadrature() {
        let cases = [
            RemainderIntegrand::Finite {
                kind: RemainderKind::R1,
                ell: 0.5,
                n: 5,
            },
            RemainderIntegrand::Finite {
                kind: RemainderKind::R2,
                ell: 0.3,
                n: 8,
            },
            RemainderIntegrand::Finite {
                kind: RemainderKind::R1,
                ell: 0.05,
                n: 400,
            },
            RemainderIntegrand::UniformR2 {
                eps: 0.4,
                n_tail: 100,
                k: 0.425,
            },
        ];
        for c in cases {
            let table = RemainderTable::new(c, 30.0, 1e-10).unwrap();
            for i in 0..=60 {
                let t = i as f64 * 0.5;
                let a = table.evaluate(t).unwrap();
                let b = c.evaluate(t, 1e-11).unwrap();
                assert!((a.estimate - b.estimate).abs() <= 2e-10, "{c:?} t={t}");
            }
        }
    }
}
