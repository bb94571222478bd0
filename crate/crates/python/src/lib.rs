use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use semicert::certkit::{
    verify_certificate, PiecewiseCertificate, VerificationReport, VerifyOptions,
};
use semicert::construct::{cover_sphere, CoverOptions};
use semicert::detrepr::{
    quadratic_determinantal_representation, verify_determinantal_representation,
};
use semicert::domination::{
    certify_quadratic_2x2, check_domination, orthant_certificate_from_domination,
    univariate_certificate_at_zero, DominationOutcome,
};
use semicert::matpoly::{determinant, smith_normal_form, MatrixPolynomial, NamedMatrix};
use semicert::poly::rational::{fmt_rational, parse_rational};
use semicert::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. }
        | Error::InvalidArgument(_)
        | Error::Dimension(_)
        | Error::NvarsMismatch { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn rationals(xs: &[String]) -> PyResult<Vec<semicert::Rational>> {
    xs.iter()
        .map(|s| parse_rational(s.trim()).map_err(err))
        .collect()
}

/// A polynomial with exact rational coefficients.
#[pyclass(name = "Polynomial", module = "semicert_py", skip_from_py_object)]
#[derive(Clone)]
struct PyPolynomial {
    vars: Vec<String>,
    poly: semicert::Polynomial,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    fn new(expr: &str, vars: Vec<String>) -> PyResult<Self> {
        let poly = semicert::Polynomial::parse(expr, &vars).map_err(err)?;
        Ok(PyPolynomial { vars, poly })
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.vars.clone()
    }

    fn degree(&self) -> i64 {
        self.poly.degree()
    }

    /// Exact value at a point given as rational strings, e.g. `["1/2", "3"]`.
    fn evaluate(&self, point: Vec<String>) -> PyResult<String> {
        let v = self.poly.evaluate(&rationals(&point)?).map_err(err)?;
        Ok(fmt_rational(&v))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.vars == other.vars && self.poly == other.poly
    }

    fn __str__(&self) -> String {
        self.poly.to_string_with(&self.vars)
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({:?}, {:?})", self.__str__(), self.vars)
    }
}

/// A matrix whose entries are polynomials in named variables.
#[pyclass(name = "Matrix", module = "semicert_py", skip_from_py_object)]
#[derive(Clone)]
struct PyMatrix {
    inner: NamedMatrix,
}

impl PyMatrix {
    fn wrap(vars: &[String], matrix: MatrixPolynomial) -> Self {
        PyMatrix {
            inner: NamedMatrix {
                vars: vars.to_vec(),
                matrix,
            },
        }
    }
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<String>>, vars: Vec<String>) -> PyResult<Self> {
        let refs: Vec<Vec<&str>> = rows
            .iter()
            .map(|r| r.iter().map(String::as_str).collect())
            .collect();
        let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
        let matrix = MatrixPolynomial::parse_rows(&slices, &vars).map_err(err)?;
        Ok(PyMatrix::wrap(&vars, matrix))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyMatrix {
            inner: NamedMatrix::parse(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.vars.clone()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.matrix.rows(), self.inner.matrix.cols())
    }

    fn entry(&self, i: usize, j: usize) -> PyResult<PyPolynomial> {
        let m = &self.inner.matrix;
        if i >= m.rows() || j >= m.cols() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(PyPolynomial {
            vars: self.inner.vars.clone(),
            poly: m.get(i, j).clone(),
        })
    }

    fn is_symmetric(&self) -> bool {
        self.inner.matrix.is_symmetric()
    }

    fn determinant(&self) -> PyResult<PyPolynomial> {
        Ok(PyPolynomial {
            vars: self.inner.vars.clone(),
            poly: determinant(&self.inner.matrix).map_err(err)?,
        })
    }

    /// Invariant factors of a univariate matrix; raises if `E·D·F = M` fails to check.
    fn smith(&self) -> PyResult<Vec<String>> {
        let s = smith_normal_form(&self.inner.matrix).map_err(err)?;
        s.check(&self.inner.matrix).map_err(err)?;
        let var = self.inner.vars[0].as_str();
        Ok(s.d
            .iter()
            .map(|p| p.to_polynomial(1, 0).to_string_with(&[var]))
            .collect())
    }

    /// Certificate over the unit sphere for a positive definite form.
    #[pyo3(signature = (grid = 32, cap_shrink = "3/4"))]
    fn cover_sphere(
        &self,
        py: Python<'_>,
        grid: usize,
        cap_shrink: &str,
    ) -> PyResult<PyCertificate> {
        let opts = CoverOptions {
            grid,
            cap_shrink: parse_rational(cap_shrink).map_err(err)?,
            ..CoverOptions::default()
        };
        let m = &self.inner;
        let cert = py
            .detach(|| cover_sphere(&m.matrix, &m.vars, &opts))
            .map_err(err)?;
        Ok(PyCertificate { inner: cert })
    }

    /// Orthant certificate at `point`, or `None` when domination fails there.
    #[pyo3(signature = (point, signs = None))]
    fn domination(
        &self,
        point: Vec<String>,
        signs: Option<Vec<i8>>,
    ) -> PyResult<Option<PyCertificate>> {
        let x0 = rationals(&point)?;
        let signs = signs.unwrap_or_else(|| vec![1; x0.len()]);
        match check_domination(&self.inner.matrix, &x0).map_err(err)? {
            DominationOutcome::Fails { .. } => Ok(None),
            DominationOutcome::Satisfied(w) => {
                let (cert, _) = orthant_certificate_from_domination(
                    &self.inner.matrix,
                    &signs,
                    &w,
                    &self.inner.vars,
                )
                .map_err(err)?;
                Ok(Some(PyCertificate { inner: cert }))
            }
        }
    }

    /// Certificate on `[0, δ]` for a univariate matrix psd near `0⁺`.
    fn zero_plus(&self) -> PyResult<PyCertificate> {
        let cert =
            univariate_certificate_at_zero(&self.inner.matrix, &self.inner.vars).map_err(err)?;
        Ok(PyCertificate { inner: cert })
    }

    /// Whether `det self == f` exactly and `self` is psd at sampled points.
    #[pyo3(signature = (f, samples = 200, seed = 0))]
    fn represents(&self, f: &PyPolynomial, samples: usize, seed: u64) -> PyResult<bool> {
        let c = verify_determinantal_representation(&self.inner.matrix, &f.poly, samples, seed)
            .map_err(err)?;
        Ok(c.passed())
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }
}

/// Outcome of verifying a certificate.
#[pyclass(name = "Report", module = "semicert_py", frozen)]
struct PyReport {
    #[pyo3(get)]
    passed: bool,
    #[pyo3(get)]
    identities_exact: bool,
    #[pyo3(get)]
    weights_exact: bool,
    #[pyo3(get)]
    fully_exact: bool,
    summary: String,
}

impl From<VerificationReport> for PyReport {
    fn from(r: VerificationReport) -> Self {
        PyReport {
            passed: r.passed(),
            identities_exact: r.identities_exact(),
            weights_exact: r.weights_exact(),
            fully_exact: r.fully_exact(),
            summary: r.to_string(),
        }
    }
}

#[pymethods]
impl PyReport {
    fn __bool__(&self) -> bool {
        self.passed
    }

    fn __str__(&self) -> String {
        self.summary.clone()
    }
}

/// A piecewise certificate of positive semidefiniteness.
#[pyclass(name = "Certificate", module = "semicert_py", skip_from_py_object)]
#[derive(Clone)]
struct PyCertificate {
    inner: PiecewiseCertificate,
}

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyCertificate {
            inner: PiecewiseCertificate::parse(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn num_pieces(&self) -> usize {
        self.inner.pieces.len()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner
            .pieces
            .iter()
            .map(|p| p.piece.label.clone())
            .collect()
    }

    #[getter]
    fn target(&self) -> PyMatrix {
        PyMatrix::wrap(&self.inner.vars, self.inner.target.clone())
    }

    #[pyo3(signature = (samples = None, seed = None))]
    fn verify(
        &self,
        py: Python<'_>,
        samples: Option<usize>,
        seed: Option<u64>,
    ) -> PyResult<PyReport> {
        let opts = VerifyOptions {
            samples,
            seed,
            ..VerifyOptions::default()
        };
        let r = py
            .detach(|| verify_certificate(&self.inner, &opts))
            .map_err(err)?;
        Ok(r.into())
    }
}

/// Diagonal quadratic determinantal representation of a psd univariate
/// polynomial: `(matrix, relative_residual, exact)`.
#[pyfunction]
fn detrep(f: &PyPolynomial) -> PyResult<(PyMatrix, f64, bool)> {
    let rep = quadratic_determinantal_representation(&f.poly).map_err(err)?;
    Ok((
        PyMatrix::wrap(&f.vars, rep.matrix),
        rep.relative_residual,
        rep.residual_exact_zero,
    ))
}

/// Certificate for the 2×2 quadratic family: `(branch, certificate)`, or
/// `(None, reason)` when it is not psd near `0⁺`.
#[pyfunction]
fn certify_quadratic(coeffs: Vec<String>) -> PyResult<(Option<String>, Py<PyAny>)> {
    let c = rationals(&coeffs)?;
    if c.len() != 6 {
        return Err(PyValueError::new_err("expected a1, a2, b1, b2, c1, c2"));
    }
    let out = certify_quadratic_2x2(&c[0], &c[1], &c[2], &c[3], &c[4], &c[5]).map_err(err)?;
    Python::attach(|py| match out {
        semicert::domination::QuadraticOutcome::Certified {
            branch,
            certificate,
        } => Ok((
            Some(format!("{branch:?}")),
            Py::new(py, PyCertificate { inner: certificate })?.into_any(),
        )),
        semicert::domination::QuadraticOutcome::Uncertified { reason } => {
            Ok((None, reason.into_pyobject(py)?.into_any().unbind()))
        }
    })
}

/// Named certificates from the built-in gallery.
#[pyfunction]
fn gallery_certificates() -> Vec<(String, PyCertificate)> {
    semicert::gallery::certificates()
        .into_iter()
        .map(|(id, c)| (id.to_string(), PyCertificate { inner: c }))
        .collect()
}

/// Runs the gallery: `(all_passed, table)`.
#[pyfunction]
#[pyo3(signature = (filter = None, samples = 200))]
fn run_gallery(py: Python<'_>, filter: Option<String>, samples: usize) -> (bool, String) {
    let r = py.detach(|| semicert::gallery::run_gallery_with(filter.as_deref(), samples));
    (r.passed(), r.to_string())
}

#[pymodule]
fn semicert_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(detrep, m)?)?;
    m.add_function(wrap_pyfunction!(certify_quadratic, m)?)?;
    m.add_function(wrap_pyfunction!(gallery_certificates, m)?)?;
    m.add_function(wrap_pyfunction!(run_gallery, m)?)?;
    Ok(())
}
