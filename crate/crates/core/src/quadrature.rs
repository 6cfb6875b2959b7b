//! Certified one-dimensional quadrature and scalar search.
//!
//! Integrals are computed by a globally adaptive Gauss–Kronrod (10/21) scheme. The panel
//! error is the raw difference between the embedded Gauss and Kronrod sums, which for the
//! smooth integrands used here overstates the Kronrod error by orders of magnitude. The
//! returned [`CertifiedValue`] carries that sum as its error bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::exp_integral_e1;

/// Absolute tolerance applied to every integral term unless overridden.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Environment variable that overrides [`DEFAULT_TOL`] for the CLI.
pub const TOL_ENV_VAR: &str = "BE_CERTIFY_TOL";

const MAX_PANELS: usize = 4000;

/// A numerical value together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub estimate: f64,
    pub error_bound: f64,
}

impl CertifiedValue {
    pub fn new(estimate: f64, error_bound: f64) -> Self {
        Self {
            estimate,
            error_bound: error_bound.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    pub fn upper(&self) -> f64 {
        self.estimate + self.error_bound
    }

    pub fn lower(&self) -> f64 {
        self.estimate - self.error_bound
    }

    /// Multiplies by a nonnegative constant.
    pub fn scale(self, c: f64) -> Self {
        debug_assert!(c >= 0.0);
        Self::new(self.estimate * c, self.error_bound * c)
    }
}

impl Add for CertifiedValue {
    type Output = CertifiedValue;

    fn add(self, rhs: Self) -> Self {
        CertifiedValue::new(
            self.estimate + rhs.estimate,
            self.error_bound + rhs.error_bound,
        )
    }
}

/// Reads the tolerance override from the environment, falling back to [`DEFAULT_TOL`].
pub fn tolerance_from_env() -> Result<f64> {
    match std::env::var(TOL_ENV_VAR) {
        Ok(raw) => {
            let tol: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("{TOL_ENV_VAR}={raw} is not a number")))?;
            if tol.is_finite() && tol > 0.0 {
                Ok(tol)
            } else {
                Err(Error::Input(format!("{TOL_ENV_VAR} must be positive")))
            }
        }
        Err(_) => Ok(DEFAULT_TOL),
    }
}

#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One Gauss–Kronrod 10/21 panel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

pub(crate) fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    if !f_center.is_finite() {
        return Err(Error::NotFinite { x: center });
    }
    let mut kronrod = f_center * WGK21[10];
    let mut gauss = 0.0;
    let mut abs_sum = f_center.abs() * WGK21[10];
    for j in 0..10 {
        let dx = half * XGK21[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(Error::NotFinite { x: x1 });
        }
        if !f2.is_finite() {
            return Err(Error::NotFinite { x: x2 });
        }
        kronrod += WGK21[j] * (f1 + f2);
        abs_sum += WGK21[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG10[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let roundoff = 4.0 * f64::EPSILON * abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(roundoff);
    Ok(Panel { a, b, value, error })
}

struct Queued(Panel);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<CertifiedValue> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Adaptive integration over `[points[0], points[last]]` with the interior points used as
/// initial panel boundaries (kinks, branch switches).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: f64,
) -> Result<CertifiedValue> {
    if points.len() < 2 {
        return Err(Error::Input("integration needs at least two points".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    let a = points[0];
    let b = *points.last().unwrap();
    if !(a <= b) {
        return Err(Error::Input(format!(
            "lower limit {a} exceeds upper limit {b}"
        )));
    }
    if a == b {
        return Ok(CertifiedValue::exact(0.0));
    }
    let mut cuts: Vec<f64> = points
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x >= a && *x <= b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));

    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let p = gk21(&f, w[0], w[1])?;
        total_err += p.error;
        heap.push(Queued(p));
    }
    while total_err > tol && heap.len() < MAX_PANELS {
        let Queued(worst) = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(Queued(worst));
            break;
        }
        let left = gk21(&f, worst.a, mid)?;
        let right = gk21(&f, mid, worst.b)?;
        total_err += left.error + right.error - worst.error;
        heap.push(Queued(left));
        heap.push(Queued(right));
    }
    let mut panels: Vec<Panel> = heap.into_iter().map(|q| q.0).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    if error > tol {
        return Err(Error::Quadrature {
            a,
            b,
            tol,
            achieved: error,
        });
    }
    Ok(CertifiedValue::new(value, error))
}

/// `∫_a^∞ e^{-u²/2} du/u = E1(a²/2)/2` for `a > 0`.
pub fn gaussian_tail_over_t(a: f64) -> Result<CertifiedValue> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain {
            name: "a",
            value: a,
            reason: "the tail integral diverges unless a > 0",
        });
    }
    let value = 0.5 * exp_integral_e1(0.5 * a * a);
    Ok(CertifiedValue::new(value, 1e-14 * value + 1e-300))
}

/// Bisection root of `f` on `[a, b]`; requires `f(a)·f(b) ≤ 0`.
pub fn find_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() {
        return Err(Error::NotFinite { x: lo });
    }
    if f_hi.is_nan() {
        return Err(Error::NotFinite { x: hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { a, b });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid.is_nan() {
            return Err(Error::NotFinite { x: mid });
        }
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const SCAN_POINTS: usize = 64;
const VERIFY_POINTS: usize = 1024;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_nan() {
        Err(Error::NotFinite { x })
    } else {
        Ok(v)
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = checked(f, x1)?;
    let mut f2 = checked(f, x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = checked(f, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = checked(f, x2)?;
        }
        if x2 - x1 <= 0.0 {
            break;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

fn grid_best<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, points: usize) -> Result<(usize, f64, f64)> {
    let mut best = (0, a, f64::NEG_INFINITY);
    for i in 0..=points {
        let x = a + (b - a) * i as f64 / points as f64;
        let v = checked(f, x)?;
        if v > best.2 {
            best = (i, x, v);
        }
    }
    Ok(best)
}

/// Maximizes `f` on `[a, b]`: a coarse scan brackets the best cell, golden-section search
/// refines it, and a dense verification grid guards against a missed interior mode.
/// Returns `(argmax, max)`.
pub fn maximize_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a < b) {
        if a == b {
            return Ok((a, checked(&f, a)?));
        }
        return Err(Error::Input(format!("empty interval [{a}, {b}]")));
    }
    let step = (b - a) / SCAN_POINTS as f64;
    let (i, gx, gv) = grid_best(&f, a, b, SCAN_POINTS)?;
    let lo = (a + step * (i as f64 - 1.0)).max(a);
    let hi = (a + step * (i as f64 + 1.0)).min(b);
    let (mut bx, mut bv) = golden_max(&f, lo, hi, tol)?;
    if gv > bv {
        bx = gx;
        bv = gv;
    }
    let vstep = (b - a) / VERIFY_POINTS as f64;
    let (j, vx, vv) = grid_best(&f, a, b, VERIFY_POINTS)?;
    if vv > bv + tol.max(1e-15) * (1.0 + bv.abs()) {
        let lo = (a + vstep * (j as f64 - 1.0)).max(a);
        let hi = (a + vstep * (j as f64 + 1.0)).min(b);
        let (rx, rv) = golden_max(&f, lo, hi, tol)?;
        if rv >= vv {
            return Ok((rx, rv));
        }
        return Ok((vx, vv));
    }
    Ok((bx, bv))
}

/// Minimizes `f` on `[a, b]`; see [`maximize_scalar`]. Returns `(argmin, min)`.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let (x, v) = maximize_scalar(|x| -f(x), a, b, tol)?;
    Ok((x, -v))
}
