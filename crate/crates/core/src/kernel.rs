//! The Prawitz smoothing kernel on (0, 1).
//!
//! `K(t) = ½(1−t) + (i/2)[(1−t)cot(πt) + 1/π]`. Two moduli are needed: `|K(t)|` for the
//! characteristic-function terms, and `|K(t) − i/(2πt)| = ½(1−t)√(1 + (cot πt − 1/(πt))²)`
//! for the Gaussian term, whose pole at zero has been removed.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// `cot(πx) − 1/(πx)` on `(−1, 1)`; smooth through zero.
pub fn cot_minus_pole(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let y = PI * x;
        let y3 = y * y * y;
        return -y / 3.0 - y3 / 45.0 - 2.0 * y3 * y * y / 945.0;
    }
    1.0 / (PI * x).tan() - 1.0 / (PI * x)
}

fn check_open_unit(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(domain(
            "t",
            t,
            "kernel is evaluated on the open interval (0, 1)",
        ))
    }
}

pub(crate) fn kernel_abs_raw(t: f64) -> f64 {
    let re = 0.5 * (1.0 - t);
    let im = if t <= 0.5 {
        0.5 * ((1.0 - t) / (PI * t).tan() + 1.0 / PI)
    } else {
        // (1−t)cot(πt) + 1/π = −s·(cot(πs) − 1/(πs)) with s = 1−t
        let s = 1.0 - t;
        -0.5 * s * cot_minus_pole(s)
    };
    re.hypot(im)
}

pub(crate) fn smoothing_weight_raw(t: f64) -> f64 {
    let h = if t <= 0.5 {
        cot_minus_pole(t)
    } else {
        let s = 1.0 - t;
        -1.0 / (PI * s).tan() - 1.0 / (PI * t)
    };
    0.5 * (1.0 - t) * (1.0 + h * h).sqrt()
}

/// `|K(t)|` for `t ∈ (0, 1)`.
pub fn kernel_abs(t: f64) -> Result<f64> {
    check_open_unit(t)?;
    Ok(kernel_abs_raw(t))
}

/// `|K(t) − i/(2πt)|` for `t ∈ (0, 1)`; tends to ½ at 0⁺ and to 1/(2π) at 1⁻.
pub fn smoothing_weight(t: f64) -> Result<f64> {
    check_open_unit(t)?;
    Ok(smoothing_weight_raw(t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub abs_k: f64,
    pub smoothing_weight: f64,
}

impl KernelPoint {
    pub fn at(t: f64) -> Result<Self> {
        check_open_unit(t)?;
        Ok(Self {
            t,
            abs_k: kernel_abs_raw(t),
            smoothing_weight: smoothing_weight_raw(t),
        })
    }
}
