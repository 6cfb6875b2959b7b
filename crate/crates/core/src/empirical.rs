//! Exact distribution oracle: lattice laws, their normalized convolution powers and compound
//! Poisson mixtures, and Kolmogorov distances to limit laws.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{THEOREM1_CONSTANT, THEOREM1_K, THEOREM2_CONSTANT, THEOREM2_K};
use crate::error::{domain, Error, Result};
use crate::quadrature::integrate_with_breaks;
use crate::special::{ln_gamma, normal_cdf};

/// Default cap on the number of support points produced by convolution.
pub const SUPPORT_CAP: usize = 1_000_000;

const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub p: f64,
}

/// Finite discrete law with strictly increasing locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDistribution {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct AtomsFile {
    atoms: Vec<Atom>,
}

impl LatticeDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Distribution("no atoms".into()));
        }
        for a in &atoms {
            if !a.x.is_finite() || !a.p.is_finite() || a.p < 0.0 {
                return Err(Error::Distribution(format!("bad atom x={} p={}", a.x, a.p)));
            }
        }
        if atoms.windows(2).any(|w| !(w[0].x < w[1].x)) {
            return Err(Error::Distribution(
                "locations must be strictly increasing".into(),
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Distribution(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    /// Sorts, merges coincident locations and drops zero masses; masses need not sum to 1.
    fn from_unsorted(mut atoms: Vec<Atom>) -> Self {
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if (a.x - last.x).abs() <= 1e-12 * (1.0 + a.x.abs()) => last.p += a.p,
                _ => merged.push(a),
            }
        }
        merged.retain(|a| a.p > 0.0);
        Self { atoms: merged }
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(x, p)| Atom { x, p }).collect())
    }

    pub fn rademacher() -> Self {
        Self {
            atoms: vec![Atom { x: -1.0, p: 0.5 }, Atom { x: 1.0, p: 0.5 }],
        }
    }

    /// Standardized Bernoulli: `(B − p)/√(pq)` with `P(B = 1) = p`.
    pub fn two_point(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "must lie in (0, 1)"));
        }
        let q = 1.0 - p;
        let s = (p * q).sqrt();
        Self::new(vec![Atom { x: -p / s, p: q }, Atom { x: q / s, p }])
    }

    pub fn point_mass(x: f64) -> Self {
        Self {
            atoms: vec![Atom { x, p: 1.0 }],
        }
    }

    /// `"rademacher"`, `"two_point:p"`, or a JSON document `{"atoms": [{"x", "p"}, ...]}`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s == "rademacher" {
            return Ok(Self::rademacher());
        }
        if let Some(rest) = s.strip_prefix("two_point:") {
            let p = rest
                .trim_start_matches("p=")
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("bad two_point parameter `{rest}`")))?;
            return Self::two_point(p);
        }
        Self::from_json(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: AtomsFile = serde_json::from_str(s)
            .map_err(|e| Error::Input(format!("malformed distribution: {e}")))?;
        Self::new(file.atoms)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.p).sum()
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.atoms.iter().take_while(|a| a.x < x).map(|a| a.p).sum()
    }
}

/// `(μ, σ², β³)` with `β³ = E|X|³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile {
    pub mu: f64,
    pub sigma2: f64,
    pub beta3: f64,
}

impl MomentProfile {
    pub fn new(mu: f64, sigma2: f64, beta3: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(domain("sigma2", sigma2, "must be positive"));
        }
        if !mu.is_finite() {
            return Err(domain("mu", mu, "must be finite"));
        }
        // Lyapunov: E|X|³ ≥ (E X²)^{3/2}
        let second = mu * mu + sigma2;
        if !(beta3 >= second.powf(1.5) * (1.0 - 1e-12)) {
            return Err(domain("beta3", beta3, "violates E|X|^3 >= (E X^2)^{3/2}"));
        }
        Ok(Self { mu, sigma2, beta3 })
    }

    pub fn is_standardized(&self) -> bool {
        self.mu.abs() <= 1e-12 && (self.sigma2 - 1.0).abs() <= 1e-12
    }
}

pub fn moments(dist: &LatticeDistribution) -> Result<MomentProfile> {
    let mu: f64 = dist.atoms.iter().map(|a| a.p * a.x).sum();
    let sigma2: f64 = dist.atoms.iter().map(|a| a.p * (a.x - mu).powi(2)).sum();
    if !(sigma2 > 0.0) {
        return Err(domain("sigma2", sigma2, "zero variance"));
    }
    let beta3: f64 = dist.atoms.iter().map(|a| a.p * a.x.abs().powi(3)).sum();
    Ok(MomentProfile { mu, sigma2, beta3 })
}

/// Affine map to mean 0 and variance 1; masses are unchanged.
pub fn standardize(dist: &LatticeDistribution) -> Result<LatticeDistribution> {
    let m = moments(dist)?;
    let sd = m.sigma2.sqrt();
    Ok(LatticeDistribution {
        atoms: dist
            .atoms
            .iter()
            .map(|a| Atom {
                x: (a.x - m.mu) / sd,
                p: a.p,
            })
            .collect(),
    })
}

/// Locations as `offset + k·step` with integer `k ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeForm {
    pub offset: f64,
    pub step: f64,
    pub masses: Vec<f64>,
}

const MAX_LATTICE_DIVISOR: usize = 1000;

pub fn lattice_form(dist: &LatticeDistribution) -> Result<LatticeForm> {
    let atoms = &dist.atoms;
    let offset = atoms[0].x;
    if atoms.len() == 1 {
        return Ok(LatticeForm {
            offset,
            step: 1.0,
            masses: vec![atoms[0].p],
        });
    }
    let diffs: Vec<f64> = atoms.iter().map(|a| a.x - offset).collect();
    let d_min = atoms
        .windows(2)
        .map(|w| w[1].x - w[0].x)
        .fold(f64::INFINITY, f64::min);
    let span = diffs[diffs.len() - 1];
    for m in 1..=MAX_LATTICE_DIVISOR {
        let step = d_min / m as f64;
        let fits = diffs.iter().all(|&d| {
            let k = d / step;
            (k - k.round()).abs() <= 1e-9 * (1.0 + k.abs())
        });
        if fits {
            let len = (span / step).round() as usize + 1;
            if len > SUPPORT_CAP {
                return Err(Error::SupportLimit {
                    size: len,
                    cap: SUPPORT_CAP,
                });
            }
            let mut masses = vec![0.0; len];
            for (a, d) in atoms.iter().zip(&diffs) {
                masses[(d / step).round() as usize] += a.p;
            }
            return Ok(LatticeForm {
                offset,
                step,
                masses,
            });
        }
    }
    Err(Error::Distribution(
        "locations do not lie on a common rational lattice".into(),
    ))
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn check_support(len: usize, cap: usize) -> Result<()> {
    if len > cap {
        Err(Error::SupportLimit { size: len, cap })
    } else {
        Ok(())
    }
}

/// Law of `(X₁ + … + Xₙ)/√n`.
pub fn convolve_power(dist: &LatticeDistribution, n: u64) -> Result<LatticeDistribution> {
    convolve_power_capped(dist, n, SUPPORT_CAP)
}

pub fn convolve_power_capped(
    dist: &LatticeDistribution,
    n: u64,
    cap: usize,
) -> Result<LatticeDistribution> {
    if n == 0 {
        return Err(domain("n", 0.0, "must be at least 1"));
    }
    let form = lattice_form(dist)?;
    let len = (form.masses.len() - 1)
        .checked_mul(n as usize)
        .and_then(|v| v.checked_add(1))
        .unwrap_or(usize::MAX);
    check_support(len, cap)?;
    let mut acc = form.masses.clone();
    for _ in 1..n {
        acc = convolve(&acc, &form.masses);
    }
    let scale = (n as f64).sqrt();
    let base = n as f64 * form.offset;
    Ok(LatticeDistribution::from_unsorted(
        acc.iter()
            .enumerate()
            .map(|(j, &p)| Atom {
                x: (base + j as f64 * form.step) / scale,
                p,
            })
            .collect(),
    ))
}

/// `sup_x |F(x) − Φ(x)|`, comparing both one-sided limits of `F` at every atom.
pub fn kolmogorov_to_normal(dist: &LatticeDistribution) -> f64 {
    kolmogorov_to(dist, normal_cdf)
}

/// Same scan against an arbitrary continuous distribution function.
pub fn kolmogorov_to<G: Fn(f64) -> f64>(dist: &LatticeDistribution, g: G) -> f64 {
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    for a in &dist.atoms {
        let gx = g(a.x);
        let above = below + a.p;
        sup = sup.max((below - gx).abs()).max((above - gx).abs());
        below = above;
    }
    sup
}

/// Truncated compound Poisson law.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundPoisson {
    /// Law of `(S_λ − λμ)/√(λ(μ²+σ²))` restricted to `N_λ ≤ M`; total mass `1 − truncation_mass`.
    pub dist: LatticeDistribution,
    pub truncation_mass: f64,
    pub m: u64,
}

/// Smallest `M` with the Chernoff bound `e^{-λ}(eλ/(M+1))^{M+1} ≤ tail_tol` on `P(N_λ > M)`.
pub fn poisson_truncation(lambda: f64, tail_tol: f64) -> u64 {
    let mut m = lambda.ceil() as u64;
    loop {
        let k = (m + 1) as f64;
        let log_bound = -lambda + k * (1.0 + lambda.ln() - k.ln());
        if k > lambda && log_bound <= tail_tol.ln() {
            return m;
        }
        m += 1;
    }
}

fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    let kf = k as f64;
    (-lambda + kf * lambda.ln() - ln_gamma(kf + 1.0)).exp()
}

pub fn compound_poisson(
    dist: &LatticeDistribution,
    lambda: f64,
    tail_tol: f64,
) -> Result<CompoundPoisson> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain("lambda", lambda, "must be positive"));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(domain("tail_tol", tail_tol, "must lie in (0, 1)"));
    }
    let m_stats = moments(dist)?;
    let second = m_stats.mu * m_stats.mu + m_stats.sigma2;
    let center = lambda * m_stats.mu;
    let scale = (lambda * second).sqrt();
    let form = lattice_form(dist)?;
    let m = poisson_truncation(lambda, tail_tol);
    check_support(
        (form.masses.len() - 1).saturating_mul(m as usize) + 1,
        SUPPORT_CAP,
    )?;

    let mut atoms = vec![Atom {
        x: -center / scale,
        p: poisson_pmf(lambda, 0),
    }];
    let mut power = vec![1.0];
    for k in 1..=m {
        power = convolve(&power, &form.masses);
        let w = poisson_pmf(lambda, k);
        let base = k as f64 * form.offset;
        atoms.extend(
            power
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(j, &p)| Atom {
                    x: (base + j as f64 * form.step - center) / scale,
                    p: w * p,
                }),
        );
    }
    // tail mass summed forward, so there is no cancellation against 1
    let mut truncation_mass = 0.0;
    let mut k = m + 1;
    loop {
        let term = poisson_pmf(lambda, k);
        truncation_mass += term;
        if term <= 1e-18 * truncation_mass.max(1e-300) || k > m + 10_000 {
            break;
        }
        k += 1;
    }
    Ok(CompoundPoisson {
        dist: LatticeDistribution::from_unsorted(atoms),
        truncation_mass,
        m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "constant", rename_all = "snake_case")]
pub enum BoundKind {
    /// `0.335789(β³ + 0.425)/√n`.
    Theorem1,
    /// `0.3051(β³ + 1)/√n`.
    Theorem2,
    /// `C·β³/√n`.
    Classical(f64),
}

impl BoundKind {
    pub fn value(&self, beta3: f64, n: u64) -> f64 {
        let rn = (n as f64).sqrt();
        match *self {
            Self::Theorem1 => THEOREM1_CONSTANT * (beta3 + THEOREM1_K) / rn,
            Self::Theorem2 => THEOREM2_CONSTANT * (beta3 + THEOREM2_K) / rn,
            Self::Classical(c) => c * beta3 / rn,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "theorem1" | "1" => Ok(Self::Theorem1),
            "theorem2" | "2" => Ok(Self::Theorem2),
            other => {
                let c = other
                    .strip_prefix("classical:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::Input(format!("unknown bound `{other}`")))?;
                Ok(Self::Classical(c))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub n: u64,
    pub rho: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Exact `ρ(F_n, Φ)` against the chosen bound for every `n` in the range.
pub fn verify_inequality(
    dist: &LatticeDistribution,
    n_range: std::ops::RangeInclusive<u64>,
    bound: BoundKind,
) -> Result<Vec<VerificationRow>> {
    let m = moments(dist)?;
    if !m.is_standardized() {
        return Err(Error::Distribution(
            "verification needs a standardized law (mean 0, variance 1)".into(),
        ));
    }
    let ns: Vec<u64> = n_range.collect();
    ns.par_iter()
        .map(|&n| {
            let rho = kolmogorov_to_normal(&convolve_power(dist, n)?);
            let b = bound.value(m.beta3, n);
            Ok(VerificationRow {
                n,
                rho,
                bound: b,
                margin: b - rho,
                pass: rho <= b,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitLaw {
    Laplace,
    /// `∫Φ(x/√y)dG(y)` with `G` the gamma law of shape `r` and rate `r`.
    GammaScaleMixture {
        r: f64,
    },
}

/// Laplace law with unit variance, density `e^{-√2|x|}/√2`.
pub fn laplace_cdf(x: f64) -> f64 {
    if x < 0.0 {
        0.5 * (SQRT_2 * x).exp()
    } else {
        1.0 - 0.5 * (-SQRT_2 * x).exp()
    }
}

pub fn limit_cdf(law: LimitLaw, x: f64) -> Result<f64> {
    match law {
        LimitLaw::Laplace => Ok(laplace_cdf(x)),
        LimitLaw::GammaScaleMixture { r } => gamma_mixture_cdf(r, x, 1e-11),
    }
}

fn gamma_mixture_cdf(r: f64, x: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain("r", r, "must be positive"));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    // y = e^u: the gamma(r, r) density times the Jacobian is r^r e^{ru − r e^u}/Γ(r)
    let log_norm = r * r.ln() - ln_gamma(r);
    let weight = |u: f64| (log_norm + r * u - r * u.exp()).exp();
    let lo = (1e-300f64.ln() / r).clamp(-700.0, -40.0);
    let hi = (1.0 + (40.0 + r.ln().abs()) / r).ln() + 3.0;
    let pts: Vec<f64> = (0..=16).map(|i| lo + (hi - lo) * i as f64 / 16.0).collect();
    let v = integrate_with_breaks(|u| normal_cdf(x * (-0.5 * u).exp()) * weight(u), &pts, tol)?;
    Ok(v.estimate.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_pmf(n: u64, k: u64) -> f64 {
        let (nf, kf) = (n as f64, k as f64);
        (ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0) - nf * 2f64.ln()).exp()
    }

    #[test]
    fn construction_checks() {
        assert!(LatticeDistribution::from_pairs(&[]).is_err());
        assert!(LatticeDistribution::from_pairs(&[(0.0, 0.4), (1.0, 0.4)]).is_err());
        assert!(LatticeDistribution::from_pairs(&[(1.0, 0.5), (0.0, 0.5)]).is_err());
        assert!(LatticeDistribution::from_pairs(&[(0.0, -0.5), (1.0, 1.5)]).is_err());
        assert!(LatticeDistribution::parse("two_point:1.5").is_err());
        assert!(LatticeDistribution::parse("{\"atoms\": 3}").is_err());
        let d = LatticeDistribution::parse(r#"{"atoms":[{"x":-1.0,"p":0.5},{"x":1.0,"p":0.5}]}"#)
            .unwrap();
        assert_eq!(d, LatticeDistribution::rademacher());
    }

    #[test]
    fn moment_examples() {
        let m = moments(&LatticeDistribution::rademacher()).unwrap();
        assert_eq!((m.mu, m.sigma2, m.beta3), (0.0, 1.0, 1.0));
        let t = moments(&LatticeDistribution::two_point(0.9).unwrap()).unwrap();
        assert!(t.mu.abs() < 1e-15 && (t.sigma2 - 1.0).abs() < 1e-12);
        assert!((t.beta3 - 0.82 / 0.3).abs() < 1e-12);
        assert!(moments(&LatticeDistribution::point_mass(2.0)).is_err());
    }

    #[test]
    fn standardize_examples() {
        let r = LatticeDistribution::rademacher();
        assert_eq!(standardize(&r).unwrap(), r);
        let shifted = LatticeDistribution::from_pairs(&[(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert_eq!(standardize(&shifted).unwrap(), r);
        let d = LatticeDistribution::from_pairs(&[(0.0, 0.2), (1.0, 0.5), (3.0, 0.3)]).unwrap();
        let once = standardize(&d).unwrap();
        let twice = standardize(&once).unwrap();
        for (a, b) in once.atoms().iter().zip(twice.atoms()) {
            assert!((a.x - b.x).abs() < 1e-14 && a.p == b.p);
        }
    }

    #[test]
    fn convolution_examples() {
        let r = LatticeDistribution::rademacher();
        let two = convolve_power(&r, 2).unwrap();
        let want = [(-SQRT_2, 0.25), (0.0, 0.5), (SQRT_2, 0.25)];
        assert_eq!(two.atoms().len(), 3);
        for (a, (x, p)) in two.atoms().iter().zip(want) {
            assert!((a.x - x).abs() < 1e-15 && (a.p - p).abs() < 1e-15);
        }
        let twenty = convolve_power(&r, 20).unwrap();
        for (k, a) in twenty.atoms().iter().enumerate() {
            assert!((a.p - binomial_pmf(20, k as u64)).abs() < 1e-15);
        }
        let d = LatticeDistribution::two_point(0.9).unwrap();
        for n in [1, 3, 7, 15] {
            let c = convolve_power(&d, n).unwrap();
            let m = moments(&c).unwrap();
            assert!(m.mu.abs() < 1e-12 && (m.sigma2 - 1.0).abs() < 1e-10);
            assert!((c.total_mass() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn lattice_detection() {
        let d = LatticeDistribution::from_pairs(&[(0.1, 0.3), (0.4, 0.3), (1.0, 0.4)]).unwrap();
        let f = lattice_form(&d).unwrap();
        assert!((f.step - 0.3).abs() < 1e-12);
        assert_eq!(f.masses.len(), 4);
        let bad = LatticeDistribution::from_pairs(&[(0.0, 0.5), (1.0, 0.25), (2f64.sqrt(), 0.25)])
            .unwrap();
        assert!(matches!(lattice_form(&bad), Err(Error::Distribution(_))));
        let r = LatticeDistribution::rademacher();
        assert!(matches!(
            convolve_power_capped(&r, 50, 10),
            Err(Error::SupportLimit { .. })
        ));
    }

    #[test]
    fn kolmogorov_examples() {
        let r = LatticeDistribution::rademacher();
        let rho = kolmogorov_to_normal(&r);
        assert!((rho - (normal_cdf(1.0) - 0.5)).abs() < 1e-15);
        assert!((rho - 0.341345).abs() < 1e-6);
        assert_eq!(
            kolmogorov_to_normal(&LatticeDistribution::point_mass(0.0)),
            0.5
        );
    }

    #[test]
    fn atom_scan_matches_dense_grid() {
        let d = convolve_power(&LatticeDistribution::two_point(0.7).unwrap(), 5).unwrap();
        let exact = kolmogorov_to_normal(&d);
        let mut grid: f64 = 0.0;
        let m = 200_000;
        for i in 0..=m {
            let x = -6.0 + 12.0 * i as f64 / m as f64;
            let f_left = d.cdf_left(x);
            grid = grid.max((f_left - normal_cdf(x)).abs());
        }
        assert!(grid <= exact + 1e-12);
        assert!(exact - grid < 1e-4, "{exact} vs {grid}");
    }

    #[test]
    fn compound_small_lambda_is_nearly_a_point_mass() {
        let d = LatticeDistribution::two_point(0.3).unwrap();
        let cp = compound_poisson(&d, 0.01, 1e-12).unwrap();
        let top =
            cp.dist.atoms().iter().fold(
                Atom { x: 0.0, p: 0.0 },
                |a, b| if b.p > a.p { *b } else { a },
            );
        assert!((top.p - (-0.01f64).exp()).abs() < 1e-12);
        assert!(top.x.abs() < 1e-15);
        assert!((cp.dist.total_mass() + cp.truncation_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compound_moments_and_accounting() {
        let r = LatticeDistribution::rademacher();
        let cp = compound_poisson(&r, 4.0, 1e-12).unwrap();
        assert!((cp.dist.total_mass() + cp.truncation_mass - 1.0).abs() < 1e-12);
        let mean: f64 = cp.dist.atoms().iter().map(|a| a.p * a.x).sum();
        let var: f64 = cp.dist.atoms().iter().map(|a| a.p * a.x * a.x).sum();
        assert!(mean.abs() < 1e-10 && (var - 1.0).abs() < 1e-8);
        let rho = kolmogorov_to_normal(&cp.dist);
        assert!(rho - cp.truncation_mass <= 0.15255);
    }

    #[test]
    fn truncation_doubling_is_stable() {
        let r = LatticeDistribution::rademacher();
        let a = compound_poisson(&r, 10.0, 1e-6).unwrap();
        let b = compound_poisson(&r, 10.0, 1e-12).unwrap();
        assert!(b.m > a.m);
        let gap = (kolmogorov_to_normal(&a.dist) - kolmogorov_to_normal(&b.dist)).abs();
        assert!(gap <= a.truncation_mass + 1e-15);
        assert!(a.truncation_mass <= 1e-6);
    }

    #[test]
    fn inequality_rows() {
        let r = LatticeDistribution::rademacher();
        let rows = verify_inequality(&r, 1..=1, BoundKind::Theorem1).unwrap();
        assert!((rows[0].bound - 0.335789 * 1.425).abs() < 1e-12);
        assert!(rows[0].pass);
        let rows = verify_inequality(&r, 1..=1, BoundKind::Theorem2).unwrap();
        assert!((rows[0].bound - 0.6102).abs() < 1e-12);
        let shifted = LatticeDistribution::from_pairs(&[(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert!(verify_inequality(&shifted, 1..=3, BoundKind::Theorem2).is_err());
        assert_eq!(
            BoundKind::parse("classical:0.4785").unwrap(),
            BoundKind::Classical(0.4785)
        );
    }

    #[test]
    fn symmetric_input_gives_symmetric_masses() {
        let d = LatticeDistribution::from_pairs(&[(-2.0, 0.2), (0.0, 0.6), (2.0, 0.2)]).unwrap();
        let c = convolve_power(&d, 9).unwrap();
        let a = c.atoms();
        for i in 0..a.len() {
            let j = a.len() - 1 - i;
            assert!((a[i].p - a[j].p).abs() < 1e-15);
            assert!((a[i].x + a[j].x).abs() < 1e-12);
        }
    }

    #[test]
    fn laplace_and_gamma_mixture() {
        assert_eq!(laplace_cdf(0.0), 0.5);
        for &x in &[0.1, 0.7, 2.0, 5.0] {
            assert!((laplace_cdf(x) + laplace_cdf(-x) - 1.0).abs() < 1e-15);
            let m = limit_cdf(LimitLaw::GammaScaleMixture { r: 1.0 }, x).unwrap();
            assert!((m - laplace_cdf(x)).abs() < 1e-9, "x={x}: {m}");
        }
        let wide = limit_cdf(LimitLaw::GammaScaleMixture { r: 1e4 }, 1.0).unwrap();
        assert!((wide - normal_cdf(1.0)).abs() < 1e-3);
        assert!(limit_cdf(LimitLaw::GammaScaleMixture { r: 0.0 }, 1.0).is_err());
    }
}
