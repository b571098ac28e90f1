//! Python bindings. Reports are returned as JSON strings; decode them with
//! `json.loads`.

use finplane::eigen::Eigenfunctions;
use finplane::hecke::{HeckeCtx, PFunction};
use finplane::spectra::{self, ARule, Method};
use finplane::verify::{self, TheoremSet, Tolerances};
use finplane::{DeltaChoice, FieldCtx, PlaneCtx};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(err)
}

/// The plane over `F_q` together with its Hecke algebra.
#[pyclass(name = "Plane", frozen)]
struct PyPlane {
    hecke: HeckeCtx,
}

impl PyPlane {
    fn eigen(&self) -> Eigenfunctions<'_> {
        Eigenfunctions::new(&self.hecke)
    }
}

#[pymethods]
impl PyPlane {
    #[new]
    #[pyo3(signature = (q, delta=None))]
    fn new(q: u32, delta: Option<u32>) -> PyResult<Self> {
        let field = FieldCtx::new(q, DeltaChoice::from(delta)).map_err(err)?;
        Ok(Self { hecke: HeckeCtx::new(PlaneCtx::new(field)) })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.hecke.q()
    }

    #[getter]
    fn delta(&self) -> u32 {
        self.hecke.plane().field().delta()
    }

    #[getter]
    fn num_points(&self) -> usize {
        self.hecke.plane().num_points()
    }

    #[getter]
    fn four_delta(&self) -> u32 {
        self.hecke.plane().four_delta()
    }

    /// Points as `(x, y)` pairs in canonical order.
    fn points(&self) -> Vec<(u32, u32)> {
        self.hecke.plane().points().iter().map(|p| (p.x, p.y)).collect()
    }

    fn distance(&self, i: usize, j: usize) -> PyResult<u32> {
        let n = self.num_points();
        if i >= n || j >= n {
            return Err(err(format!("point index out of range 0..{n}")));
        }
        Ok(self.hecke.plane().distance_idx(i, j))
    }

    fn sphere_size(&self, a: u32) -> PyResult<usize> {
        if a >= self.q() {
            return Err(err(format!("a = {a} is not in F_{}", self.q())));
        }
        Ok(self.hecke.plane().sphere_size(a))
    }

    fn edges(&self, a: u32) -> PyResult<Vec<(usize, usize)>> {
        spectra::edge_list(self.hecke.plane(), a).map_err(err)
    }

    /// Spherical representations as JSON: index, kind, dim.
    fn reps(&self) -> PyResult<String> {
        to_json(&self.hecke.reps())
    }

    fn idempotent(&self, i: usize) -> PyResult<Vec<Complex64>> {
        Ok(self.hecke.idempotent(i).map_err(err)?.values)
    }

    fn eigenvalue(&self, i: usize, a: u32) -> PyResult<f64> {
        if i >= self.hecke.reps().len() || a >= self.q() {
            return Err(err("index out of range"));
        }
        Ok(spectra::eigenvalue_formula(&self.hecke, i, a))
    }

    /// Formula eigenvalues with multiplicity, sorted.
    fn spectrum(&self, a: u32) -> PyResult<Vec<f64>> {
        if a >= self.q() {
            return Err(err(format!("a = {a} is not in F_{}", self.q())));
        }
        Ok(spectra::formula_multiset(&self.hecke, a))
    }

    fn bruteforce_spectrum(&self, a: u32) -> PyResult<Vec<f64>> {
        spectra::eigenvalues_bruteforce(&self.hecke, a).map_err(err)
    }

    #[pyo3(signature = (a, method="formula"))]
    fn spectrum_report(&self, a: u32, method: &str) -> PyResult<String> {
        let method = match method {
            "formula" => Method::Formula,
            "bruteforce" => Method::Bruteforce,
            other => return Err(err(format!("unknown method `{other}`"))),
        };
        to_json(&spectra::spectrum_report(&self.hecke, a, method).map_err(err)?)
    }

    /// `(bound, max nontrivial |λ|, pass)`.
    fn ramanujan(&self, a: u32) -> PyResult<(f64, f64, bool)> {
        if a >= self.q() {
            return Err(err(format!("a = {a} is not in F_{}", self.q())));
        }
        let r = spectra::ramanujan_check(&self.hecke, a);
        Ok((r.bound, r.max_nontrivial, r.pass))
    }

    #[pyo3(signature = (theorems="1,2,3,4"))]
    fn verify(&self, theorems: &str) -> PyResult<String> {
        let which = TheoremSet::parse(theorems).map_err(err)?;
        to_json(&verify::verify(&self.hecke, which, &Tolerances::default()).map_err(err)?)
    }

    fn chi_func(&self, i: u32) -> PyResult<Vec<Complex64>> {
        Ok(self.eigen().chi_func(i).map_err(err)?.values)
    }

    fn psi_star_eta(&self, a: u32, i: usize) -> PyResult<Vec<Complex64>> {
        Ok(self.eigen().psi_star_eta(a, i).map_err(err)?.values)
    }

    fn terras_k(&self, i: u32, a: u32) -> PyResult<Vec<Complex64>> {
        Ok(self.eigen().terras_k(i, a).map_err(err)?.values)
    }

    fn evans_h(&self, t: u32, i: u32, a: u32) -> PyResult<Vec<Complex64>> {
        Ok(self.eigen().evans_h(t, i, a).map_err(err)?.values)
    }

    fn c_sum(&self, i: i64, a: u32) -> Complex64 {
        self.eigen().c_sum(i, a)
    }

    /// Largest relative eigen-residual of `values` over all adjacency operators.
    fn eigen_residual(&self, values: Vec<Complex64>) -> PyResult<f64> {
        if values.len() != self.num_points() {
            return Err(err(format!("expected {} values", self.num_points())));
        }
        Ok(self.eigen().eigen_residual(&PFunction { values }))
    }

    fn __repr__(&self) -> String {
        format!("Plane(q={}, delta={})", self.q(), self.delta())
    }
}

#[pyfunction]
fn is_prime(n: u32) -> bool {
    finplane::field::is_prime(n)
}

#[pyfunction]
fn semicircle_cdf(x: f64) -> f64 {
    spectra::semicircle_cdf(x)
}

/// Moment and histogram rows for odd primes in `lo..=hi`, as JSON.
#[pyfunction]
#[pyo3(signature = (lo, hi, bins=20, a=None))]
fn sato_tate(py: Python<'_>, lo: u32, hi: u32, bins: usize, a: Option<u32>) -> PyResult<String> {
    if bins == 0 {
        return Err(err("bins must be positive"));
    }
    let rule = a.map_or(ARule::SmallestValid, ARule::Fixed);
    let qs = spectra::odd_primes(lo, hi);
    let rows = py.detach(|| spectra::sato_tate_report(&qs, rule, bins)).map_err(err)?;
    to_json(&rows)
}

#[pymodule]
fn pyfinplane(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPlane>()?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(semicircle_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(sato_tate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
