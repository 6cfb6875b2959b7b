//! Closed-form bounds for Poisson and mixed Poisson random sums.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::constants::THEOREM2_CONSTANT;
use crate::empirical::MomentProfile;
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_with_breaks, minimize_scalar};
use crate::special::ln_gamma;

/// Search interval for the free parameter of the mixed Poisson bounds.
pub const EPS_SEARCH: (f64, f64) = (1e-6, 1.0 - 1e-6);

const SEARCH_TOL: f64 = 1e-12;

fn second_moment_cubed(m: &MomentProfile) -> f64 {
    (m.mu * m.mu + m.sigma2).powf(1.5)
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(name, v, "must be positive and finite"))
    }
}

fn nonneg(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(name, v, "must be nonnegative and finite"))
    }
}

/// `0.3051·β³/((μ²+σ²)^{3/2}√λ)` for the standardized Poisson random sum.
pub fn poisson_be_bound(m: &MomentProfile, lambda: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    positive("sigma2", m.sigma2)?;
    Ok(THEOREM2_CONSTANT * m.beta3 / (second_moment_cubed(m) * lambda.sqrt()))
}

/// Upper bound `νβ³(1 + 40ν)` on the centred third absolute moment of a compound Poisson
/// variable with parameter `ν ≤ 1`.
pub fn compound_third_moment_bound(m: &MomentProfile, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(domain("nu", nu, "must lie in (0, 1]"));
    }
    Ok(nu * m.beta3 * (1.0 + 40.0 * nu))
}

/// Third absolute moment bound for one of `n` i.i.d. compound Poisson summands with
/// parameter `λ/n`, after standardization.
pub fn standardized_third_moment_bound(m: &MomentProfile, lambda: f64, n: u64) -> Result<f64> {
    positive("lambda", lambda)?;
    positive("sigma2", m.sigma2)?;
    let nf = n as f64;
    if nf < lambda {
        return Err(domain("n", nf, "must be at least lambda"));
    }
    Ok(m.beta3 * (1.0 + 40.0 * lambda / nf) * nf.sqrt() / (second_moment_cubed(m) * lambda.sqrt()))
}

/// `0.3051·β³·E Λ_t^{-1/2} + δ_t/2`.
pub fn theorem5_bound(beta3: f64, inv_sqrt_moment: f64, delta_t: f64) -> f64 {
    THEOREM2_CONSTANT * beta3 * inv_sqrt_moment + 0.5 * delta_t
}

/// `Γ(r − ½)/(Γ(r)√t)`.
pub fn gamma_inverse_sqrt_moment(r: f64, t: f64) -> Result<f64> {
    if !(r > 0.5) || !r.is_finite() {
        return Err(domain("r", r, "must exceed 1/2"));
    }
    positive("t", t)?;
    Ok((ln_gamma(r - 0.5) - ln_gamma(r)).exp() / t.sqrt())
}

pub fn q_factor(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain("epsilon", epsilon, "must lie in (0, 1)"));
    }
    let tail = (1.0 + epsilon).sqrt()
        / ((1.0 + (1.0 - epsilon).sqrt()) * (2.0 * PI * E * (1.0 - epsilon)).sqrt());
    Ok((1.0 / epsilon).max(tail))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralSpec {
    /// `E Λ_t = ℓt`.
    pub ell: f64,
    /// `D Λ_t = s²t`.
    pub s: f64,
    pub e_abs_v: f64,
    pub delta_t: f64,
    /// `E|Λ_t − t|/√t`.
    pub mean_abs_dev: f64,
}

impl StructuralSpec {
    pub fn validate(&self) -> Result<()> {
        positive("ell", self.ell)?;
        nonneg("s", self.s)?;
        nonneg("e_abs_v", self.e_abs_v)?;
        nonneg("delta_t", self.delta_t)?;
        nonneg("mean_abs_dev", self.mean_abs_dev)
    }
}

/// Value of a bound together with the minimizing `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedBound {
    pub bound: f64,
    pub epsilon: f64,
    pub objective: f64,
}

fn require_drift(m: &MomentProfile) -> Result<()> {
    if m.mu == 0.0 || !m.mu.is_finite() {
        return Err(domain(
            "mu",
            m.mu,
            "must be nonzero; use the zero-mean bound instead",
        ));
    }
    positive("sigma2", m.sigma2)
}

pub fn theorem6_objective(m: &MomentProfile, spec: &StructuralSpec, epsilon: f64) -> Result<f64> {
    let q = q_factor(epsilon)?;
    let lead = THEOREM2_CONSTANT * m.beta3
        / (second_moment_cubed(m) * ((1.0 - epsilon) * spec.ell).sqrt());
    Ok(lead + spec.s / spec.ell * (spec.e_abs_v / epsilon + q))
}

pub fn theorem8_objective(
    m: &MomentProfile,
    e_abs_v: f64,
    mean_abs_dev: f64,
    epsilon: f64,
) -> Result<f64> {
    let q = q_factor(epsilon)?;
    let lead = THEOREM2_CONSTANT * m.beta3 / (second_moment_cubed(m) * (1.0 - epsilon).sqrt());
    Ok(lead + e_abs_v / epsilon + q * mean_abs_dev)
}

fn infimum<F: Fn(f64) -> Result<f64>>(f: F) -> Result<(f64, f64)> {
    // the objective is finite on the open interval, so unwrap stays inside the closure domain
    let g = |e: f64| f(e).unwrap_or(f64::INFINITY);
    minimize_scalar(g, EPS_SEARCH.0, EPS_SEARCH.1, SEARCH_TOL)
}

/// `δ̃_t + t^{-1/2}·inf_ε{…}` for the mixed Poisson sum with `E Λ_t = ℓt`, `D Λ_t = s²t`.
pub fn theorem6_bound(m: &MomentProfile, spec: &StructuralSpec, t: f64) -> Result<MixedBound> {
    require_drift(m)?;
    spec.validate()?;
    positive("t", t)?;
    let (epsilon, objective) = infimum(|e| theorem6_objective(m, spec, e))?;
    Ok(MixedBound {
        bound: spec.delta_t + objective / t.sqrt(),
        epsilon,
        objective,
    })
}

/// [`theorem6_bound`] with `E|V| = 1`.
pub fn unit_v_bound(m: &MomentProfile, spec: &StructuralSpec, t: f64) -> Result<MixedBound> {
    theorem6_bound(
        m,
        &StructuralSpec {
            e_abs_v: 1.0,
            ..*spec
        },
        t,
    )
}

/// `δ̂_t + t^{-1/2}·inf_ε{…}` for `E Λ_t = t` with a possibly heavy-tailed limit `V`.
pub fn theorem8_bound(
    m: &MomentProfile,
    e_abs_v: f64,
    mean_abs_dev: f64,
    delta_hat: f64,
    t: f64,
) -> Result<MixedBound> {
    require_drift(m)?;
    nonneg("e_abs_v", e_abs_v)?;
    nonneg("mean_abs_dev", mean_abs_dev)?;
    nonneg("delta_hat", delta_hat)?;
    positive("t", t)?;
    let (epsilon, objective) = infimum(|e| theorem8_objective(m, e_abs_v, mean_abs_dev, e))?;
    Ok(MixedBound {
        bound: delta_hat + objective / t.sqrt(),
        epsilon,
        objective,
    })
}

/// Inputs of the heavy-tailed example:
/// `(Λ_t − t)/√t = max{−√t, V} + c_t` with `c_t = ((2α+1)√t/α − 1)/(2t^{(α+1)/2})`
/// and `V` symmetric with density `(α−1)/(2(|x|+1)^α)`, `2 < α < 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeavyTail {
    pub alpha: f64,
    pub t: f64,
    pub e_abs_v: f64,
    pub mean_abs_dev: f64,
    /// `E(Λ_t − t)/√t`.
    pub mean_shift: f64,
    pub delta_hat: f64,
}

impl HeavyTail {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        if !(alpha > 2.0 && alpha < 3.0) {
            return Err(domain("alpha", alpha, "must lie in (2, 3)"));
        }
        positive("t", t)?;
        let rt = t.sqrt();
        let c = ((2.0 * alpha + 1.0) / alpha * rt - 1.0) / (2.0 * t.powf((alpha + 1.0) / 2.0));
        let cdf = |v: f64| {
            if v <= 0.0 {
                0.5 * (1.0 - v).powf(1.0 - alpha)
            } else {
                1.0 - 0.5 * (1.0 + v).powf(1.0 - alpha)
            }
        };
        let density = |x: f64| 0.5 * (alpha - 1.0) * (1.0 + x.abs()).powf(-alpha);
        let a = rt + 1.0;

        // E max{−√t, V} = E(−√t − V)⁺ by symmetry
        let mean_shift = a.powf(2.0 - alpha) / (2.0 * (alpha - 2.0)) + c;
        let negative_part = if c >= rt {
            0.0
        } else {
            let mut pts = vec![-rt, -c];
            if -rt < 0.0 && 0.0 < -c {
                pts.insert(1, 0.0);
            }
            let inner = integrate_with_breaks(|x| (-x - c) * density(x), &pts, 1e-13)?;
            0.5 * a.powf(1.0 - alpha) * (rt - c) + inner.estimate
        };
        let mean_abs_dev = mean_shift + 2.0 * negative_part;

        // sup_v |P(max{−√t,V} + c < v) − P(V < v)|
        let edge = -rt + c;
        let v = (0.5 * c).max(edge);
        let delta_hat = (cdf(v - c) - cdf(v)).abs().max(cdf(edge));

        Ok(Self {
            alpha,
            t,
            e_abs_v: 1.0 / (alpha - 2.0),
            mean_abs_dev,
            mean_shift,
            delta_hat,
        })
    }

    pub fn bound(&self, m: &MomentProfile) -> Result<MixedBound> {
        theorem8_bound(m, self.e_abs_v, self.mean_abs_dev, self.delta_hat, self.t)
    }
}

/// Mixed Poisson scenario presets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// Gamma structural law with shape `r`; `δ_t = 0`.
    Gamma {
        r: f64,
        t: f64,
    },
    Exponential {
        t: f64,
    },
    Heavy {
        alpha: f64,
        t: f64,
    },
    Structural {
        spec: StructuralSpec,
        t: f64,
    },
}

fn parse_params(body: &str, names: &[&str]) -> Result<Vec<f64>> {
    let parts: Vec<&str> = body
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    if parts.len() != names.len() {
        return Err(Error::Input(format!(
            "expected {} parameters ({}), got `{body}`",
            names.len(),
            names.join(",")
        )));
    }
    let mut out = vec![f64::NAN; names.len()];
    for (i, part) in parts.iter().enumerate() {
        let (slot, raw) = match part.split_once('=') {
            Some((k, v)) => (
                names
                    .iter()
                    .position(|n| *n == k.trim())
                    .ok_or_else(|| Error::Input(format!("unknown parameter `{k}`")))?,
                v.trim(),
            ),
            None => (i, *part),
        };
        out[slot] = raw
            .parse()
            .map_err(|_| Error::Input(format!("bad number `{raw}`")))?;
    }
    if out.iter().any(|v| v.is_nan()) {
        return Err(Error::Input(format!("missing parameter in `{body}`")));
    }
    Ok(out)
}

impl Scenario {
    /// `gamma:r,t`, `exponential:t`, `heavy:alpha,t`, `structural:ell,s,e_abs_v,delta,t`;
    /// parameters may also be given as `name=value`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("scenario `{s}` needs the form kind:params")))?;
        match kind {
            "gamma" => {
                let v = parse_params(body, &["r", "t"])?;
                Ok(Self::Gamma { r: v[0], t: v[1] })
            }
            "exponential" => {
                let v = parse_params(body, &["t"])?;
                Ok(Self::Exponential { t: v[0] })
            }
            "heavy" => {
                let v = parse_params(body, &["alpha", "t"])?;
                Ok(Self::Heavy {
                    alpha: v[0],
                    t: v[1],
                })
            }
            "structural" => {
                let v = parse_params(body, &["ell", "s", "e_abs_v", "delta", "t"])?;
                Ok(Self::Structural {
                    spec: StructuralSpec {
                        ell: v[0],
                        s: v[1],
                        e_abs_v: v[2],
                        delta_t: v[3],
                        mean_abs_dev: 0.0,
                    },
                    t: v[4],
                })
            }
            other => Err(Error::Input(format!("unknown scenario `{other}`"))),
        }
    }

    pub fn evaluate(&self, m: &MomentProfile) -> Result<MixedBound> {
        match *self {
            Self::Gamma { r, t } => Ok(MixedBound {
                bound: theorem5_bound(m.beta3, gamma_inverse_sqrt_moment(r, t)?, 0.0),
                epsilon: f64::NAN,
                objective: f64::NAN,
            }),
            Self::Exponential { t } => Self::Gamma { r: 1.0, t }.evaluate(m),
            Self::Heavy { alpha, t } => HeavyTail::new(alpha, t)?.bound(m),
            Self::Structural { spec, t } => theorem6_bound(m, &spec, t),
        }
    }
}
