use lmoment_core::arith::{Estimate as CoreEstimate, FactoredInt};
use lmoment_core::characters::{
    build_group, enumerate_characters, root_number as core_root_number, DirichletCharacter,
};
use lmoment_core::identities::{run_suite as core_run_suite, SuiteOptions, SUITES};
use lmoment_core::lfunction::{completed_lambda, l_value as core_l_value, ShiftPair as CoreShiftPair};
use lmoment_core::moments::{self, CoefficientVector, FamilySpec, MomentConfig};
use lmoment_core::transforms::{kernel_identity_check as core_kernel_check, KernelCheckConfig, VKernel};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

create_exception!(lmoment, BudgetError, PyException);

fn err(e: lmoment_core::Error) -> PyErr {
    match e {
        lmoment_core::Error::Budget { .. } => BudgetError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py_json<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

/// Shifts `(alpha, beta)`: nonzero, `alpha != ±beta`, modulus at most 1/2.
#[pyclass(name = "ShiftPair", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyShiftPair(CoreShiftPair);

#[pymethods]
impl PyShiftPair {
    #[new]
    fn new(alpha: Complex64, beta: Complex64) -> PyResult<Self> {
        CoreShiftPair::new(alpha, beta).map(Self).map_err(err)
    }

    /// `(0.9/log Q, 0.4/log Q)`
    #[staticmethod]
    fn auto(q: f64) -> PyResult<Self> {
        CoreShiftPair::auto(q).map(Self).map_err(err)
    }

    #[getter]
    fn alpha(&self) -> Complex64 {
        self.0.alpha()
    }

    #[getter]
    fn beta(&self) -> Complex64 {
        self.0.beta()
    }

    fn __repr__(&self) -> String {
        format!("ShiftPair({}, {})", self.0.alpha(), self.0.beta())
    }
}

#[pyclass(name = "Estimate", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyEstimate(CoreEstimate);

#[pymethods]
impl PyEstimate {
    #[getter]
    fn value(&self) -> Complex64 {
        self.0.value
    }

    #[getter]
    fn error(&self) -> f64 {
        self.0.error
    }

    fn __repr__(&self) -> String {
        format!("Estimate({} ± {:e})", self.0.value, self.0.error)
    }
}

/// Moduli `Q < q < 2Q` weighted by `W(q/Q)`, twisted by `chi(h) conj(chi(k))`.
#[pyclass(name = "Family", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFamily {
    spec: FamilySpec,
    cfg: MomentConfig,
}

#[pymethods]
impl PyFamily {
    #[new]
    #[pyo3(signature = (q, shifts=None, h=1, k=1, budget=None, prime_cutoff=None))]
    fn new(
        q: f64,
        shifts: Option<PyShiftPair>,
        h: u64,
        k: u64,
        budget: Option<u64>,
        prime_cutoff: Option<u64>,
    ) -> PyResult<Self> {
        let shifts = match shifts {
            Some(s) => s.0,
            None => CoreShiftPair::auto(q).map_err(err)?,
        };
        let mut cfg = MomentConfig::default();
        if let Some(b) = budget {
            cfg.budget = b;
        }
        if let Some(p) = prime_cutoff {
            cfg.euler.prime_cutoff = p;
        }
        Ok(Self {
            spec: FamilySpec::new(q, shifts, h, k).map_err(err)?,
            cfg,
        })
    }

    #[getter]
    fn shifts(&self) -> PyShiftPair {
        PyShiftPair(self.spec.shifts)
    }

    #[getter]
    fn moduli(&self) -> Vec<u64> {
        self.spec.moduli()
    }

    fn delta_bruteforce(&self, py: Python<'_>) -> PyResult<PyEstimate> {
        py.detach(|| moments::delta_bruteforce(&self.spec, &self.cfg))
            .map(|b| PyEstimate(b.raw))
            .map_err(err)
    }

    fn main_term_theorem1(&self, py: Python<'_>) -> PyResult<Complex64> {
        py.detach(|| moments::main_term_theorem1(&self.spec, &self.cfg))
            .map_err(err)
    }

    fn main_term_executed(&self, py: Python<'_>) -> PyResult<PyEstimate> {
        py.detach(|| moments::main_term_executed(&self.spec, &self.cfg))
            .map(PyEstimate)
            .map_err(err)
    }

    fn diagonal_term(&self, py: Python<'_>) -> PyResult<Complex64> {
        py.detach(|| moments::diagonal_term(&self.spec, &self.cfg)).map_err(err)
    }

    /// Full comparison report as a dict.
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = py
            .detach(|| moments::moment_report(&self.spec, &self.cfg))
            .map_err(err)?;
        to_py_json(py, &r)
    }

    /// Bilinear form over `{h: lambda_h}`; the family's own twist is ignored.
    #[pyo3(signature = (coefficients, length_bound=None))]
    fn sweep<'py>(
        &self,
        py: Python<'py>,
        coefficients: Vec<(u64, Complex64)>,
        length_bound: Option<u64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let bound = length_bound.unwrap_or_else(|| coefficients.iter().map(|c| c.0).max().unwrap_or(1));
        let lambda = CoefficientVector::new(coefficients, bound).map_err(err)?;
        let r = py
            .detach(|| moments::weighted_sweep(&self.spec, &lambda, &self.cfg))
            .map_err(err)?;
        to_py_json(py, &r)
    }
}

#[pyclass(name = "Character", frozen)]
struct PyCharacter(DirichletCharacter);

#[pymethods]
impl PyCharacter {
    #[getter]
    fn modulus(&self) -> u64 {
        self.0.modulus()
    }

    #[getter]
    fn conductor(&self) -> u64 {
        self.0.conductor().value()
    }

    #[getter]
    fn exponents(&self) -> Vec<u64> {
        self.0.exponents().to_vec()
    }

    fn is_even(&self) -> bool {
        self.0.is_even()
    }

    fn is_primitive(&self) -> bool {
        self.0.is_primitive()
    }

    fn __call__(&self, n: u64) -> Complex64 {
        self.0.value(n)
    }

    fn root_number(&self) -> PyResult<Complex64> {
        core_root_number(&self.0).map_err(err)
    }

    /// `L(s, chi)`
    fn l_value(&self, s: Complex64) -> PyResult<Complex64> {
        core_l_value(s, &self.0).map_err(err)
    }

    /// `Lambda(1/2 + s, chi)`
    fn completed_lambda(&self, s: Complex64) -> PyResult<Complex64> {
        completed_lambda(s, &self.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Character(q={}, exponents={:?})", self.0.modulus(), self.0.exponents())
    }
}

/// Characters mod `q`, optionally only the even and/or primitive ones.
#[pyfunction]
#[pyo3(signature = (q, even_only=true, primitive_only=true))]
fn characters(q: u64, even_only: bool, primitive_only: bool) -> PyResult<Vec<PyCharacter>> {
    let group = build_group(&FactoredInt::new(q).map_err(err)?).map_err(err)?;
    Ok(enumerate_characters(&group, even_only, primitive_only)
        .into_iter()
        .map(PyCharacter)
        .collect())
}

/// `V_{alpha,beta}(x)`
#[pyfunction]
fn v_kernel(x: f64, shifts: PyShiftPair) -> PyResult<Complex64> {
    VKernel::new(&shifts.0, 0.05).and_then(|k| k.eval(x)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, z, c))]
fn kernel_identity_check<'py>(py: Python<'py>, r: f64, z: Complex64, c: f64) -> PyResult<Bound<'py, PyAny>> {
    let k = py
        .detach(|| core_kernel_check(r, z, c, &KernelCheckConfig::default()))
        .map_err(err)?;
    to_py_json(py, &k)
}

/// Runs one identity suite at its default size.
#[pyfunction]
fn run_suite<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| core_run_suite(name, &SuiteOptions::default()))
        .map_err(err)?;
    to_py_json(py, &r)
}

#[pymodule]
pub fn lmoment(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyShiftPair>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyFamily>()?;
    m.add_class::<PyCharacter>()?;
    m.add_function(wrap_pyfunction!(characters, m)?)?;
    m.add_function(wrap_pyfunction!(v_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("SUITES", SUITES.to_vec())?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    Ok(())
}
