//! The four-term smoothing bound `D(ℓ, n, t₀, T)` and its uniform-in-`n` counterpart.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cf_bounds::{
    chi_breaks, cutoff_t, f1, f1_negative_interval, f2, f3, uniform_r3_raw, RemainderIntegrand,
    RemainderKind, RemainderTable,
};
use crate::error::{domain, Error, Result};
use crate::kernel::{kernel_abs_raw, smoothing_weight_raw};
use crate::quadrature::{gaussian_tail_over_t, integrate_with_breaks, CertifiedValue};

/// Which bound on `|f_n|` enters the second term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MajorantKind {
    F1,
    F2,
    F3,
}

/// Remainder used for the uniform tail; `Auto` picks the closed form when `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformRemainder {
    Auto,
    R2,
    R3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSettings {
    pub remainder: RemainderKind,
    pub majorant: MajorantKind,
    pub uniform_remainder: UniformRemainder,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self {
            remainder: RemainderKind::R1,
            majorant: MajorantKind::F1,
            uniform_remainder: UniformRemainder::Auto,
        }
    }
}

/// `n` fixed, or every `n ≥ N` at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NMode {
    Finite(u64),
    Uniform(u64),
}

/// The four certified terms of `D`, in order: remainder integral, majorant integral,
/// Gaussian tail, smoothing term.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DBreakdown {
    pub terms: [CertifiedValue; 4],
}

impl DBreakdown {
    pub fn total(&self) -> CertifiedValue {
        self.terms
            .iter()
            .fold(CertifiedValue::exact(0.0), |acc, &t| acc + t)
    }

    pub fn upper(&self) -> f64 {
        self.total().upper()
    }

    pub fn quad_error(&self) -> f64 {
        self.terms.iter().map(|t| t.error_bound).sum()
    }
}

fn check_window(t0: f64, big_t: f64) -> Result<()> {
    if !(t0 > 0.0 && t0 <= 1.0) {
        return Err(domain("t0", t0, "must lie in (0, 1]"));
    }
    if !(big_t > 0.0) || !big_t.is_finite() {
        return Err(domain("T", big_t, "must be positive"));
    }
    Ok(())
}

/// Break points in `t ∈ [lo, hi]` for an integrand in `s = T·t` with kinks at `s_breaks`.
fn t_breaks(lo: f64, hi: f64, big_t: f64, s_breaks: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo];
    pts.extend(
        s_breaks
            .iter()
            .map(|s| s / big_t)
            .filter(|&t| t > lo && t < hi),
    );
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts
}

/// `2∫_0^{t₀}|K(t)|r(Tt)dt` for a pointwise upper bound `r`.
fn remainder_term<R: Fn(f64) -> f64>(
    r: R,
    t0: f64,
    big_t: f64,
    s_breaks: &[f64],
    tol: f64,
) -> Result<CertifiedValue> {
    let pts = t_breaks(0.0, t0, big_t, s_breaks);
    let v = integrate_with_breaks(|t| kernel_abs_raw(t) * r(big_t * t), &pts, 0.5 * tol)?;
    Ok(v.scale(2.0))
}

/// `2∫_{t₀}^1|K(t)|f(Tt)dt`.
fn majorant_term<F: Fn(f64) -> f64>(
    f: F,
    t0: f64,
    big_t: f64,
    s_breaks: &[f64],
    tol: f64,
) -> Result<CertifiedValue> {
    if t0 >= 1.0 {
        return Ok(CertifiedValue::exact(0.0));
    }
    let pts = t_breaks(t0, 1.0, big_t, s_breaks);
    let v = integrate_with_breaks(|t| kernel_abs_raw(t) * f(big_t * t), &pts, 0.5 * tol)?;
    Ok(v.scale(2.0))
}

fn gaussian_terms(t0: f64, big_t: f64, tol: f64) -> Result<[CertifiedValue; 2]> {
    let tail = gaussian_tail_over_t(big_t * t0)?.scale(1.0 / PI);
    let half_t2 = 0.5 * big_t * big_t;
    let smooth = integrate_with_breaks(
        |t| smoothing_weight_raw(t) * (-half_t2 * t * t).exp(),
        &[0.0, t0],
        0.5 * tol,
    )?
    .scale(2.0);
    Ok([tail, smooth])
}

/// Table lookup that reports failure as NaN, which the quadrature rejects.
fn table_upper(table: &RemainderTable, s: f64) -> f64 {
    table.evaluate(s).map(|v| v.upper()).unwrap_or(f64::NAN)
}

/// `D(ℓ, n, t₀, T)` with the default majorants (`r₁`, `f₁` with `f₂` fallback).
pub fn d_bound(ell: f64, n: u64, t0: f64, big_t: f64) -> Result<CertifiedValue> {
    d_bound_with(
        ell,
        n,
        t0,
        big_t,
        BoundSettings::default(),
        crate::quadrature::DEFAULT_TOL,
    )
    .map(|b| b.total())
}

pub fn d_bound_with(
    ell: f64,
    n: u64,
    t0: f64,
    big_t: f64,
    settings: BoundSettings,
    tol: f64,
) -> Result<DBreakdown> {
    if !(ell >= 0.0) || !ell.is_finite() {
        return Err(domain("ell", ell, "must be nonnegative"));
    }
    if n < 2 {
        return Err(domain("n", n as f64, "the smoothing bound needs n >= 2"));
    }
    check_window(t0, big_t)?;
    let eps_n = ell + 1.0 / (n as f64).sqrt();
    let chi_b = chi_breaks(eps_n);
    let tol4 = 0.25 * tol;

    let first = if ell == 0.0 {
        CertifiedValue::exact(0.0)
    } else {
        let integrand = RemainderIntegrand::Finite {
            kind: settings.remainder,
            ell,
            n,
        };
        let table = RemainderTable::new(integrand, big_t * t0, tol4)?;
        let s_breaks: &[f64] = if settings.remainder == RemainderKind::R3 {
            &[]
        } else {
            &chi_b
        };
        remainder_term(|s| table_upper(&table, s), t0, big_t, s_breaks, tol4)?
    };

    let mut s_breaks = chi_b.to_vec();
    let second = match settings.majorant {
        MajorantKind::F1 => {
            if let Some((lo, hi)) = f1_negative_interval(eps_n, n) {
                s_breaks.extend([lo, hi]);
            }
            majorant_term(
                |s| f1(s, eps_n, n).unwrap_or_else(|| f2(s, eps_n)),
                t0,
                big_t,
                &s_breaks,
                tol4,
            )?
        }
        MajorantKind::F2 => majorant_term(|s| f2(s, eps_n), t0, big_t, &s_breaks, tol4)?,
        MajorantKind::F3 => majorant_term(|s| f3(s, eps_n), t0, big_t, &[], tol4)?,
    };
    let [third, fourth] = gaussian_terms(t0, big_t, tol4)?;
    Ok(DBreakdown {
        terms: [first, second, third, fourth],
    })
}

/// Resolves `Auto` to the remainder actually used for the tail at shift `k`.
pub fn resolve_uniform(k: f64, choice: UniformRemainder) -> UniformRemainder {
    match choice {
        UniformRemainder::Auto if k == 1.0 => UniformRemainder::R3,
        UniformRemainder::Auto => UniformRemainder::R2,
        other => other,
    }
}

/// Bound on `sup_{n ≥ N} D(ε − k/√n, n, t₀, T)`.
pub fn d_bound_uniform(
    eps: f64,
    k: f64,
    n_tail: u64,
    t0: f64,
    big_t: f64,
) -> Result<CertifiedValue> {
    d_bound_uniform_with(
        eps,
        k,
        n_tail,
        t0,
        big_t,
        UniformRemainder::Auto,
        crate::quadrature::DEFAULT_TOL,
    )
    .map(|b| b.total())
}

/// The majorant in the second term is `f₂` at the shifted ε, which dominates every `n ≥ N`
/// (and `f₁` at any such `n`).
pub fn d_bound_uniform_with(
    eps: f64,
    k: f64,
    n_tail: u64,
    t0: f64,
    big_t: f64,
    choice: UniformRemainder,
    tol: f64,
) -> Result<DBreakdown> {
    if !(0.0..=1.0).contains(&k) {
        return Err(domain("k", k, "must lie in [0, 1]"));
    }
    if n_tail == 0 {
        return Err(domain("N", 0.0, "must be at least 1"));
    }
    if !(eps > k / (n_tail as f64).sqrt()) || !eps.is_finite() {
        return Err(domain("eps", eps, "uniform bounds need eps > k/sqrt(N)"));
    }
    check_window(t0, big_t)?;
    let tol4 = 0.25 * tol;
    let shifted = eps + (1.0 - k) / (n_tail as f64).sqrt();

    let first = match resolve_uniform(k, choice) {
        UniformRemainder::R3 => {
            if k != 1.0 {
                return Err(domain("k", k, "the closed-form tail remainder needs k = 1"));
            }
            let cutoff = cutoff_t(n_tail, eps);
            let reach = big_t * t0;
            if reach > cutoff {
                return Err(Error::Cutoff { reach, cutoff });
            }
            remainder_term(|s| uniform_r3_raw(s, eps), t0, big_t, &[], tol4)?
        }
        _ => {
            let integrand = RemainderIntegrand::UniformR2 { eps, n_tail, k };
            let table = RemainderTable::new(integrand, big_t * t0, tol4)?;
            remainder_term(
                |s| table_upper(&table, s),
                t0,
                big_t,
                &chi_breaks(shifted),
                tol4,
            )?
        }
    };
    let second = majorant_term(|s| f2(s, shifted), t0, big_t, &chi_breaks(shifted), tol4)?;
    let [third, fourth] = gaussian_terms(t0, big_t, tol4)?;
    Ok(DBreakdown {
        terms: [first, second, third, fourth],
    })
}

/// Evaluates `D` for either mode with default settings.
pub fn d_bound_mode(
    eps: f64,
    k: f64,
    mode: NMode,
    t0: f64,
    big_t: f64,
    tol: f64,
) -> Result<DBreakdown> {
    match mode {
        NMode::Finite(n) => {
            let ell = eps - k / (n as f64).sqrt();
            if ell < 0.0 {
                return Err(domain("eps", eps, "eps - k/sqrt(n) must be nonnegative"));
            }
            d_bound_with(ell, n, t0, big_t, BoundSettings::default(), tol)
        }
        NMode::Uniform(n_tail) => {
            d_bound_uniform_with(eps, k, n_tail, t0, big_t, UniformRemainder::Auto, tol)
        }
    }
}

/// Independent re-evaluation: nested adaptive quadrature with the remainder integral
/// recomputed from scratch at every outer node.
pub(crate) fn d_bound_nested(
    eps: f64,
    k: f64,
    mode: NMode,
    t0: f64,
    big_t: f64,
    tol: f64,
) -> Result<DBreakdown> {
    check_window(t0, big_t)?;
    let tol4 = 0.25 * tol;
    // outer nodes cost one inner integration each, so the inner tolerance is kept tight
    let inner_tol = 1e-3 * tol4;
    let (integrand, closed_form, majorant_eps, s_breaks): (
        Option<RemainderIntegrand>,
        bool,
        f64,
        Vec<f64>,
    ) = match mode {
        NMode::Finite(n) => {
            let ell = eps - k / (n as f64).sqrt();
            if ell < 0.0 || n < 2 {
                return Err(domain("n", n as f64, "infeasible finite mode"));
            }
            let eps_n = ell + 1.0 / (n as f64).sqrt();
            let mut b = chi_breaks(eps_n).to_vec();
            if let Some((lo, hi)) = f1_negative_interval(eps_n, n) {
                b.extend([lo, hi]);
            }
            (
                Some(RemainderIntegrand::Finite {
                    kind: RemainderKind::R1,
                    ell,
                    n,
                }),
                false,
                eps_n,
                b,
            )
        }
        NMode::Uniform(n_tail) => {
            let shifted = eps + (1.0 - k) / (n_tail as f64).sqrt();
            match resolve_uniform(k, UniformRemainder::Auto) {
                UniformRemainder::R3 => {
                    let cutoff = cutoff_t(n_tail, eps);
                    if big_t * t0 > cutoff {
                        return Err(Error::Cutoff {
                            reach: big_t * t0,
                            cutoff,
                        });
                    }
                    (None, true, shifted, chi_breaks(shifted).to_vec())
                }
                _ => (
                    Some(RemainderIntegrand::UniformR2 { eps, n_tail, k }),
                    false,
                    shifted,
                    chi_breaks(shifted).to_vec(),
                ),
            }
        }
    };

    let first = if closed_form {
        remainder_term(|s| uniform_r3_raw(s, eps), t0, big_t, &[], tol4)?
    } else {
        let ig = integrand.expect("remainder integrand");
        if ig.prefactor() == 0.0 {
            CertifiedValue::exact(0.0)
        } else {
            let inner = |s: f64| {
                ig.evaluate(s, inner_tol)
                    .map(|v| v.upper())
                    .unwrap_or(f64::NAN)
            };
            remainder_term(inner, t0, big_t, &chi_breaks(ig.chi_eps()), tol4)?
        }
    };
    let second = match mode {
        NMode::Finite(n) => majorant_term(
            |s| f1(s, majorant_eps, n).unwrap_or_else(|| f2(s, majorant_eps)),
            t0,
            big_t,
            &s_breaks,
            tol4,
        )?,
        NMode::Uniform(_) => majorant_term(|s| f2(s, majorant_eps), t0, big_t, &s_breaks, tol4)?,
    };
    let [third, fourth] = gaussian_terms(t0, big_t, tol4)?;
    Ok(DBreakdown {
        terms: [first, second, third, fourth],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_ell_kills_first_term() {
        let b = d_bound_with(0.0, 6, 0.4, 6.0, BoundSettings::default(), 1e-9).unwrap();
        assert_eq!(b.terms[0].estimate, 0.0);
        for t in &b.terms[1..] {
            assert!(t.estimate > 0.0);
        }
    }

    #[test]
    fn first_extremal_point() {
        let eps = 0.822;
        let ell = eps - 0.425 / 5f64.sqrt();
        let d = d_bound(ell, 5, 0.385, 5.755).unwrap();
        let c = d.upper() / eps;
        assert!(c <= 0.335789, "{c}");
        assert!(c > 0.3355, "{c}");
    }

    #[test]
    fn uniform_extremal_point() {
        let d = d_bound_uniform(0.985, 1.0, 200, 0.356, 6.147).unwrap();
        let c = d.upper() / 0.985;
        assert!(c <= 0.3051 && c > 0.304, "{c}");
    }

    #[test]
    fn cutoff_violation_is_rejected() {
        let err = d_bound_uniform(0.985, 1.0, 200, 0.9, 6.0).unwrap_err();
        assert!(matches!(err, Error::Cutoff { .. }));
    }

    #[test]
    fn argument_checks() {
        assert!(d_bound(0.1, 1, 0.3, 5.0).is_err());
        assert!(d_bound(-0.1, 5, 0.3, 5.0).is_err());
        assert!(d_bound(0.1, 5, 0.0, 5.0).is_err());
        assert!(d_bound(0.1, 5, 1.2, 5.0).is_err());
        assert!(d_bound(0.1, 5, 0.3, 0.0).is_err());
        assert!(d_bound_uniform(0.05, 1.0, 200, 0.3, 5.0).is_err());
    }

    #[test]
    fn variants_are_ordered() {
        let (ell, n, t0, big_t) = (0.4, 6, 0.35, 6.5);
        let eval = |remainder, majorant| {
            let s = BoundSettings {
                remainder,
                majorant,
                uniform_remainder: UniformRemainder::Auto,
            };
            d_bound_with(ell, n, t0, big_t, s, 1e-10).unwrap()
        };
        let a = eval(RemainderKind::R1, MajorantKind::F1);
        let b = eval(RemainderKind::R2, MajorantKind::F2);
        let c = eval(RemainderKind::R3, MajorantKind::F3);
        assert!(a.total().lower() <= b.total().upper());
        assert!(b.total().lower() <= c.total().upper());
    }

    #[test]
    fn nested_matches_tabulated() {
        let cases = [
            (0.822, 0.425, NMode::Finite(5), 0.385, 5.755),
            (0.4, 0.425, NMode::Uniform(100), 0.3, 12.0),
            (0.985, 1.0, NMode::Uniform(200), 0.356, 6.147),
        ];
        for (eps, k, mode, t0, big_t) in cases {
            let a = d_bound_mode(eps, k, mode, t0, big_t, 1e-9).unwrap();
            let b = d_bound_nested(eps, k, mode, t0, big_t, 1e-9).unwrap();
            let gap = (a.total().estimate - b.total().estimate).abs();
            assert!(
                gap <= a.quad_error() + b.quad_error() + 1e-10,
                "{mode:?}: {gap}"
            );
        }
    }
}
