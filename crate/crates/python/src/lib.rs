//! Python bindings. Structured results come back as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sharpbe::certifier::{self, NMode, TheoremId, TheoremMode};
use sharpbe::empirical::{self, BoundKind, LatticeDistribution, LimitLaw, MomentProfile};
use sharpbe::quadrature::DEFAULT_TOL;
use sharpbe::random_sums::{self, Scenario};

fn err(e: sharpbe::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyclass(name = "Distribution", frozen)]
struct PyDistribution(LatticeDistribution);

#[pymethods]
impl PyDistribution {
    /// `rademacher`, `two_point:p` or a JSON document with an `atoms` list.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        LatticeDistribution::parse(spec).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_atoms(atoms: Vec<(f64, f64)>) -> PyResult<Self> {
        LatticeDistribution::from_pairs(&atoms)
            .map(Self)
            .map_err(err)
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        self.0.atoms().iter().map(|a| (a.x, a.p)).collect()
    }

    /// `(mu, sigma2, beta3)`.
    fn moments(&self) -> PyResult<(f64, f64, f64)> {
        let m = empirical::moments(&self.0).map_err(err)?;
        Ok((m.mu, m.sigma2, m.beta3))
    }

    fn standardize(&self) -> PyResult<Self> {
        empirical::standardize(&self.0).map(Self).map_err(err)
    }

    /// Law of the normalized sum of `n` copies.
    fn convolve_power(&self, n: u64) -> PyResult<Self> {
        empirical::convolve_power(&self.0, n).map(Self).map_err(err)
    }

    fn kolmogorov_to_normal(&self) -> f64 {
        empirical::kolmogorov_to_normal(&self.0)
    }

    /// Rows `{n, rho, bound, margin, pass}` as JSON; `bound` is `theorem1`, `theorem2` or `classical:C`.
    fn verify_inequality(&self, n_max: u64, bound: &str) -> PyResult<String> {
        let kind = BoundKind::parse(bound).map_err(err)?;
        let rows = empirical::verify_inequality(&self.0, 1..=n_max, kind).map_err(err)?;
        to_json(&rows)
    }

    /// `(rho, truncation_mass)` for the standardized compound Poisson sum.
    #[pyo3(signature = (lam, tail_tol = 1e-10))]
    fn compound_poisson_distance(&self, lam: f64, tail_tol: f64) -> PyResult<(f64, f64)> {
        let cp = empirical::compound_poisson(&self.0, lam, tail_tol).map_err(err)?;
        Ok((
            empirical::kolmogorov_to_normal(&cp.dist),
            cp.truncation_mass,
        ))
    }

    fn __len__(&self) -> usize {
        self.0.atoms().len()
    }
}

#[pyclass(name = "Certificate", frozen)]
struct PyCertificate(certifier::Certificate);

#[pymethods]
impl PyCertificate {
    /// Certified `D` and `C = D/eps`; `n_tail` switches to the bound uniform in `n >= n_tail`.
    #[new]
    #[pyo3(signature = (k, eps, t0, big_t, n = None, n_tail = None, tol = DEFAULT_TOL))]
    fn new(
        k: f64,
        eps: f64,
        t0: f64,
        big_t: f64,
        n: Option<u64>,
        n_tail: Option<u64>,
        tol: f64,
    ) -> PyResult<Self> {
        let mode = match (n, n_tail) {
            (Some(n), None) => NMode::Finite(n),
            (None, Some(n)) => NMode::Uniform(n),
            _ => return Err(PyValueError::new_err("give exactly one of n and n_tail")),
        };
        certifier::Certificate::evaluate(k, eps, mode, t0, big_t, tol)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        certifier::Certificate::from_json(s).map(Self).map_err(err)
    }

    #[getter]
    fn d(&self) -> f64 {
        self.0.d
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c
    }

    #[getter]
    fn terms(&self) -> [f64; 4] {
        self.0.terms
    }

    #[getter]
    fn quad_error(&self) -> f64 {
        self.0.quad_error
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// Independent recomputation; true when every stored figure is confirmed.
    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn verify(&self, tol: f64) -> PyResult<bool> {
        certifier::verify_certificate(&self.0, tol)
            .map(|v| v.ok())
            .map_err(err)
    }
}

#[pyfunction]
fn constants() -> PyResult<String> {
    to_json(sharpbe::universal())
}

#[pyfunction]
fn n_star(k: f64, eps: f64) -> PyResult<u64> {
    certifier::n_star(k, eps).map_err(err)
}

/// `(estimate, error_bound)` of `D` for a finite `n`.
#[pyfunction]
fn d_bound(ell: f64, n: u64, t0: f64, big_t: f64) -> PyResult<(f64, f64)> {
    certifier::d_bound(ell, n, t0, big_t)
        .map(|v| (v.estimate, v.error_bound))
        .map_err(err)
}

/// Theorem report as JSON; `mode` is `spot` or `full`.
#[pyfunction]
#[pyo3(signature = (theorem, mode = "spot", target = None, tol = DEFAULT_TOL))]
fn certify(theorem: u8, mode: &str, target: Option<f64>, tol: f64) -> PyResult<String> {
    let id = match theorem {
        1 => TheoremId::One,
        2 => TheoremId::Two,
        _ => return Err(PyValueError::new_err("theorem must be 1 or 2")),
    };
    let mode = match mode {
        "spot" => TheoremMode::Spot,
        "full" => TheoremMode::Full,
        _ => return Err(PyValueError::new_err("mode must be spot or full")),
    };
    let r = certifier::certify_theorem_with(id, mode, target, tol).map_err(err)?;
    Ok(r.to_json())
}

#[pyfunction]
fn poisson_be_bound(mu: f64, sigma2: f64, beta3: f64, lam: f64) -> PyResult<f64> {
    let m = MomentProfile::new(mu, sigma2, beta3).map_err(err)?;
    random_sums::poisson_be_bound(&m, lam).map_err(err)
}

/// Bound for a preset scenario such as `exponential:t=100` or `heavy:2.5,100`.
#[pyfunction]
#[pyo3(signature = (scenario, mu = 0.0, sigma2 = 1.0, beta3 = 1.0))]
fn mixed_bound(scenario: &str, mu: f64, sigma2: f64, beta3: f64) -> PyResult<f64> {
    let m = MomentProfile::new(mu, sigma2, beta3).map_err(err)?;
    let s = Scenario::parse(scenario).map_err(err)?;
    s.evaluate(&m).map(|b| b.bound).map_err(err)
}

#[pyfunction]
fn gamma_inverse_sqrt_moment(r: f64, t: f64) -> PyResult<f64> {
    random_sums::gamma_inverse_sqrt_moment(r, t).map_err(err)
}

#[pyfunction]
fn q_factor(eps: f64) -> PyResult<f64> {
    random_sums::q_factor(eps).map_err(err)
}

/// Laplace CDF when `r` is omitted, otherwise the gamma scale mixture with shape `r`.
#[pyfunction]
#[pyo3(signature = (x, r = None))]
fn limit_cdf(x: f64, r: Option<f64>) -> PyResult<f64> {
    let law = match r {
        None => LimitLaw::Laplace,
        Some(r) => LimitLaw::GammaScaleMixture { r },
    };
    empirical::limit_cdf(law, x).map_err(err)
}

#[pymodule]
fn sharpbe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(n_star, m)?)?;
    m.add_function(wrap_pyfunction!(d_bound, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_be_bound, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_bound, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_inverse_sqrt_moment, m)?)?;
    m.add_function(wrap_pyfunction!(q_factor, m)?)?;
    m.add_function(wrap_pyfunction!(limit_cdf, m)?)?;
    Ok(())
}
