//! ε-sweeps with `max_{[ε₁,ε₂]} C ≤ C(ε₂)·ε₂/ε₁` bracketing, and the two theorem certifications.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    c_of_epsilon, n_star, optimize_t0_t, verify_certificate, CEstimate, CPolicy, Certificate,
    NMode, SearchPolicy,
};
use crate::constants::{
    small_eps_regime, universal, THEOREM1_CONSTANT, THEOREM1_K, THEOREM2_CONSTANT, THEOREM2_K,
    UNIVERSAL_BOUND_ROUNDED,
};
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Geometric,
    Uniform,
    /// Cells sized from a pilot run of `C` so that all brackets come out roughly equal.
    Equalized {
        pilot: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub k: f64,
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub target: f64,
    pub cells: usize,
    pub spacing: Spacing,
    pub max_depth: usize,
    /// `(ε_max, N)` pairs in increasing `ε_max`; the first entry with `ε ≤ ε_max` applies,
    /// the last one covers everything above.
    pub n_tail_schedule: Vec<(f64, u64)>,
    pub include_finite: bool,
    pub search: SearchPolicy,
}

impl SweepSpec {
    pub fn new(k: f64, eps_lo: f64, eps_hi: f64, target: f64) -> Self {
        Self {
            k,
            eps_lo,
            eps_hi,
            target,
            cells: 20,
            spacing: Spacing::Geometric,
            max_depth: 4,
            n_tail_schedule: vec![(f64::INFINITY, 200)],
            include_finite: false,
            search: SearchPolicy::default(),
        }
    }

    pub fn n_tail(&self, eps: f64) -> u64 {
        self.n_tail_schedule
            .iter()
            .find(|(hi, _)| eps <= *hi)
            .or(self.n_tail_schedule.last())
            .map_or(200, |&(_, n)| n)
    }

    fn schedule_breaks(&self) -> Vec<f64> {
        self.n_tail_schedule
            .iter()
            .map(|&(hi, _)| hi)
            .filter(|&b| b > self.eps_lo && b < self.eps_hi)
            .collect()
    }

    fn policy_at(&self, eps: f64) -> CPolicy {
        CPolicy {
            n_tail: self.n_tail(eps),
            include_finite: self.include_finite,
            search: self.search.clone(),
        }
    }

    pub fn mode_label(&self) -> &'static str {
        if self.include_finite {
            "full"
        } else {
            "uniform_only"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub eps1: f64,
    pub eps2: f64,
    pub c_eps2: f64,
    /// `C(ε₂)·ε₂/ε₁`.
    pub bracket: f64,
    pub depth: usize,
    pub passed: bool,
    pub witness: Option<Certificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalPoint {
    pub epsilon: f64,
    pub n_mode: Option<NMode>,
    pub t0: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub k: f64,
    pub target: f64,
    pub mode: String,
    pub cells: Vec<CellRecord>,
    /// Max of the cell brackets.
    pub global_max: f64,
    pub extremal_points: Vec<ExtremalPoint>,
    /// Indices into `cells` whose bracket exceeds the target after refinement.
    pub failing: Vec<usize>,
    pub passed: bool,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps1,eps2,c_eps2,bracket,depth,passed,n_mode,t0,T\n");
        for c in &self.cells {
            let (mode, t0, big_t) = match &c.witness {
                Some(w) => (
                    match w.n_mode {
                        NMode::Finite(n) => format!("n={n}"),
                        NMode::Uniform(n) => format!("N>={n}"),
                    },
                    w.t0,
                    w.big_t,
                ),
                None => ("universal".into(), f64::NAN, f64::NAN),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                c.eps1, c.eps2, c.c_eps2, c.bracket, c.depth, c.passed, mode, t0, big_t
            ));
        }
        out
    }
}

type Cache = BTreeMap<u64, CEstimate>;

fn evaluate_all(spec: &SweepSpec, points: &[f64], cache: &mut Cache) -> Result<()> {
    let todo: Vec<f64> = points
        .iter()
        .copied()
        .filter(|e| !cache.contains_key(&e.to_bits()))
        .collect();
    let results: Vec<Result<CEstimate>> = todo
        .par_iter()
        .map(|&e| c_of_epsilon(e, spec.k, &spec.policy_at(e)))
        .collect();
    for (e, r) in todo.into_iter().zip(results) {
        cache.insert(e.to_bits(), r?);
    }
    Ok(())
}

fn geometric_nodes(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    let mut v: Vec<f64> = (0..=cells)
        .map(|i| lo * (r * i as f64 / cells as f64).exp())
        .collect();
    v[0] = lo;
    v[cells] = hi;
    v
}

fn uniform_nodes(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=cells)
        .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
        .collect();
    v[cells] = hi;
    v
}

/// Piecewise-linear interpolation of `ln C` against `ln ε`.
fn interpolate_log(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let lx = x.ln();
    let i = xs.partition_point(|&v| v.ln() <= lx).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1].ln(), xs[i].ln());
    let (y0, y1) = (ys[i - 1].ln(), ys[i].ln());
    let w = ((lx - x0) / (x1 - x0)).clamp(0.0, 1.0);
    (y0 + w * (y1 - y0)).exp()
}

/// Walks down from `hi` with `ε₁ = ε₂·Ĉ(ε₂)/B`.
fn shoot(lo: f64, hi: f64, bound: f64, c_hat: &dyn Fn(f64) -> f64, cap: usize) -> Vec<f64> {
    let mut nodes = vec![hi];
    let mut e = hi;
    while e > lo && nodes.len() <= cap + 1 {
        e = (e * c_hat(e) / bound).max(lo);
        nodes.push(e);
    }
    nodes.reverse();
    nodes
}

fn equalized_nodes(spec: &SweepSpec, pilot: usize, cache: &mut Cache) -> Result<Vec<f64>> {
    let (lo, hi, cells) = (spec.eps_lo, spec.eps_hi, spec.cells);
    let pilot_pts = geometric_nodes(lo, hi, pilot.max(2) - 1);
    evaluate_all(spec, &pilot_pts, cache)?;
    let ys: Vec<f64> = pilot_pts
        .iter()
        .map(|e| cache[&e.to_bits()].c.max(1e-12))
        .collect();
    let c_hat = |e: f64| interpolate_log(&pilot_pts, &ys, e);
    let c_max = ys.iter().copied().fold(0.0, f64::max);
    let (mut b_lo, mut b_hi) = (c_max, c_max * hi / lo * 1.000001);
    for _ in 0..80 {
        let mid = 0.5 * (b_lo + b_hi);
        if shoot(lo, hi, mid, &c_hat, cells).len() - 1 <= cells {
            b_hi = mid;
        } else {
            b_lo = mid;
        }
    }
    let mut nodes = shoot(lo, hi, b_hi, &c_hat, cells);
    // fill up to the requested count by splitting the widest cells
    while nodes.len() - 1 < cells {
        let (i, _) = nodes
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, w[1] / w[0]))
            .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let mid = (nodes[i] * nodes[i + 1]).sqrt();
        nodes.insert(i + 1, mid);
    }
    Ok(nodes)
}

fn cell_record(eps1: f64, eps2: f64, est: &CEstimate, depth: usize, target: f64) -> CellRecord {
    let bracket = est.c * eps2 / eps1;
    CellRecord {
        eps1,
        eps2,
        c_eps2: est.c,
        bracket,
        depth,
        passed: bracket <= target,
        witness: est.worst,
    }
}

/// Partitions `[eps_lo, eps_hi]`, brackets every cell and bisects failing cells.
pub fn sweep(spec: &SweepSpec) -> Result<SweepReport> {
    if !(spec.eps_lo > 0.0 && spec.eps_lo < spec.eps_hi) {
        return Err(domain("eps_lo", spec.eps_lo, "need 0 < eps_lo < eps_hi"));
    }
    if spec.cells == 0 {
        return Err(domain("cells", 0.0, "need at least one cell"));
    }
    let mut cache = Cache::new();
    let mut nodes = match spec.spacing {
        Spacing::Geometric => geometric_nodes(spec.eps_lo, spec.eps_hi, spec.cells),
        Spacing::Uniform => uniform_nodes(spec.eps_lo, spec.eps_hi, spec.cells),
        Spacing::Equalized { pilot } => equalized_nodes(spec, pilot, &mut cache)?,
    };
    nodes.extend(spec.schedule_breaks());
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    evaluate_all(spec, &nodes[1..], &mut cache)?;

    let mut cells: Vec<(f64, f64, usize)> = nodes.windows(2).map(|w| (w[0], w[1], 0)).collect();
    loop {
        let failing: Vec<usize> = cells
            .iter()
            .enumerate()
            .filter(|(_, &(a, b, d))| {
                d < spec.max_depth && cache[&b.to_bits()].c * b / a > spec.target
            })
            .map(|(i, _)| i)
            .collect();
        if failing.is_empty() {
            break;
        }
        let mids: Vec<f64> = failing
            .iter()
            .map(|&i| (cells[i].0 * cells[i].1).sqrt())
            .collect();
        evaluate_all(spec, &mids, &mut cache)?;
        for (&i, &m) in failing.iter().zip(&mids).rev() {
            let (a, b, d) = cells[i];
            cells[i] = (m, b, d + 1);
            cells.insert(i, (a, m, d + 1));
        }
    }

    let records: Vec<CellRecord> = cells
        .iter()
        .map(|&(a, b, d)| cell_record(a, b, &cache[&b.to_bits()], d, spec.target))
        .collect();
    let global_max = records.iter().map(|c| c.bracket).fold(0.0, f64::max);
    let failing: Vec<usize> = records
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.passed)
        .map(|(i, _)| i)
        .collect();
    let mut evaluated: Vec<&CEstimate> = cache.values().collect();
    evaluated.sort_by(|a, b| b.c.total_cmp(&a.c).then(a.epsilon.total_cmp(&b.epsilon)));
    let extremal_points = evaluated
        .iter()
        .take(3)
        .map(|e| ExtremalPoint {
            epsilon: e.epsilon,
            n_mode: e.worst.map(|w| w.n_mode),
            t0: e.worst.map_or(f64::NAN, |w| w.t0),
            big_t: e.worst.map_or(f64::NAN, |w| w.big_t),
            c: e.c,
        })
        .collect();
    Ok(SweepReport {
        k: spec.k,
        target: spec.target,
        mode: spec.mode_label().into(),
        passed: failing.is_empty(),
        cells: records,
        global_max,
        extremal_points,
        failing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremMode {
    /// Extremal points, their neighbourhoods and an informational uniform-tail sweep.
    Spot,
    /// The whole ε range with every finite `n`; hours of compute.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub label: String,
    pub certificate: Certificate,
    pub limit: f64,
    pub passed: bool,
    pub independently_verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub k: f64,
    pub target: f64,
    pub mode: TheoremMode,
    pub regimes: Vec<RegimeCheck>,
    pub spots: Vec<SpotCheck>,
    pub neighbourhood: Vec<SpotCheck>,
    pub sweep: Option<SweepReport>,
    /// Whether the sweep counts towards `passed`.
    pub sweep_gates: bool,
    pub passed: bool,
}

impl TheoremReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Slack allowed on neighbourhood scans around the reported extremal ε.
pub const NEIGHBOURHOOD_SLACK: f64 = 5e-4;

struct TheoremSetup {
    k: f64,
    default_target: f64,
    eps_small: f64,
    eps_large: f64,
    schedule: Vec<(f64, u64)>,
    spots: Vec<(NMode, f64, f64, f64)>,
}

fn setup(id: TheoremId) -> TheoremSetup {
    match id {
        TheoremId::One => TheoremSetup {
            k: THEOREM1_K,
            default_target: THEOREM1_CONSTANT,
            eps_small: 0.07,
            eps_large: 1.62,
            schedule: vec![(0.1, 600), (0.2, 300), (f64::INFINITY, 100)],
            spots: vec![
                (NMode::Finite(5), 0.822, 0.385, 5.755),
                (NMode::Finite(8), 0.504, 0.293, 8.911),
            ],
        },
        TheoremId::Two => TheoremSetup {
            k: THEOREM2_K,
            default_target: THEOREM2_CONSTANT,
            eps_small: 0.1,
            eps_large: 1.78,
            schedule: vec![(f64::INFINITY, 200)],
            spots: vec![(NMode::Uniform(200), 0.985, 0.356, 6.147)],
        },
    }
}

fn mode_label(m: NMode) -> String {
    match m {
        NMode::Finite(n) => format!("n={n}"),
        NMode::Uniform(n) => format!("n>={n}"),
    }
}

fn spot(label: String, cert: Certificate, limit: f64, tol: f64) -> Result<SpotCheck> {
    let v = verify_certificate(&cert, tol)?;
    Ok(SpotCheck {
        label,
        passed: cert.c <= limit,
        independently_verified: v.ok(),
        certificate: cert,
        limit,
    })
}

pub fn certify_theorem1(mode: TheoremMode) -> Result<TheoremReport> {
    certify_theorem_with(TheoremId::One, mode, None, crate::quadrature::DEFAULT_TOL)
}

pub fn certify_theorem2(mode: TheoremMode) -> Result<TheoremReport> {
    certify_theorem_with(TheoremId::Two, mode, None, crate::quadrature::DEFAULT_TOL)
}

/// Default `N` schedule of the tail for each theorem.
pub fn default_schedule(id: TheoremId) -> Vec<(f64, u64)> {
    setup(id).schedule
}

pub fn certify_theorem_with(
    id: TheoremId,
    mode: TheoremMode,
    target: Option<f64>,
    tol: f64,
) -> Result<TheoremReport> {
    certify_theorem_scheduled(id, mode, target, None, tol)
}

/// As [`certify_theorem_with`], optionally replacing the tail schedule.
pub fn certify_theorem_scheduled(
    id: TheoremId,
    mode: TheoremMode,
    target: Option<f64>,
    schedule: Option<Vec<(f64, u64)>>,
    tol: f64,
) -> Result<TheoremReport> {
    let mut s = setup(id);
    if let Some(sched) = schedule {
        if sched.is_empty() {
            return Err(domain("schedule", 0.0, "needs at least one entry"));
        }
        s.schedule = sched;
    }
    let target = target.unwrap_or(s.default_target);
    let bb = universal().bhattacharya_bound;

    let small = small_eps_regime(s.k, s.eps_small)?;
    let regimes = vec![
        RegimeCheck {
            name: format!("small-eps constant at eps={}", s.eps_small),
            value: small.unwrap_or(f64::INFINITY),
            limit: target,
            passed: small.is_some_and(|c| c <= target),
        },
        RegimeCheck {
            name: "universal bound / target".into(),
            value: bb / target,
            limit: s.eps_large,
            passed: bb / target <= s.eps_large,
        },
        RegimeCheck {
            name: "rounded universal bound / target".into(),
            value: UNIVERSAL_BOUND_ROUNDED / target,
            limit: s.eps_large,
            passed: UNIVERSAL_BOUND_ROUNDED / target <= s.eps_large,
        },
    ];

    let search = SearchPolicy::default().with_tol(tol);
    let mut spots = Vec::new();
    let mut neighbourhood = Vec::new();
    for &(n_mode, eps, t0, big_t) in &s.spots {
        let cert = Certificate::evaluate(s.k, eps, n_mode, t0, big_t, tol)?;
        spots.push(spot(
            format!("{} eps={eps} t0={t0} T={big_t}", mode_label(n_mode)),
            cert,
            target,
            tol,
        )?);
        let seeded = search.clone().with_seeds(&[(t0, big_t)]);
        for j in -2i32..=2 {
            let e = eps + 0.005 * j as f64;
            // a finite n is only admissible while n ≥ n_*(ε)
            if let NMode::Finite(n) = n_mode {
                if n < n_star(s.k, e)? {
                    continue;
                }
            }
            let (_, _, cert) = optimize_t0_t(e, s.k, n_mode, &seeded)?;
            neighbourhood.push(spot(
                format!("{} eps={e:.3} optimized", mode_label(n_mode)),
                cert,
                target + NEIGHBOURHOOD_SLACK,
                tol,
            )?);
        }
    }

    let mut spec = SweepSpec::new(s.k, s.eps_small, s.eps_large, target);
    spec.n_tail_schedule = s.schedule.clone();
    spec.search = search;
    let sweep_gates = mode == TheoremMode::Full;
    match mode {
        TheoremMode::Spot => {
            spec.cells = 20;
            spec.spacing = Spacing::Equalized { pilot: 12 };
            spec.max_depth = 0;
            spec.include_finite = false;
        }
        TheoremMode::Full => {
            spec.cells = 60;
            spec.spacing = Spacing::Equalized { pilot: 16 };
            spec.max_depth = 6;
            spec.include_finite = true;
        }
    }
    let report = sweep(&spec)?;

    let passed = regimes.iter().all(|r| r.passed)
        && spots.iter().all(|c| c.passed && c.independently_verified)
        && neighbourhood.iter().all(|c| c.passed)
        && (!sweep_gates || report.passed);
    Ok(TheoremReport {
        theorem: id,
        k: s.k,
        target,
        mode,
        regimes,
        spots,
        neighbourhood,
        sweep: Some(report),
        sweep_gates,
        passed,
    })
}
