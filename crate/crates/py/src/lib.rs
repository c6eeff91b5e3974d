//! Python bindings. Instances and reports cross the boundary as objects
//! wrapping the Rust values; rationals are exposed as `"p/q"` strings.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use crossrelax_core::acceptance::{run_acceptance as run_suite, AcceptanceOptions};
use crossrelax_core::generators::{
    gen_edge_cover_tight, gen_mcst_gap, gen_planar_mincut_gap, random_intersection, random_lattice, random_mcst, rng_for,
};
use crossrelax_core::report::{solve_instance, Report as CoreReport};
use crossrelax_core::structures::io::{decode, digest, encode, to_canonical_json};
use crossrelax_core::structures::{AnyInstance, LatticeVariant};
use crossrelax_core::{Error, Rational};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn variant(name: &str) -> PyResult<LatticeVariant> {
    name.parse::<LatticeVariant>().map_err(|_| PyValueError::new_err(format!("unknown variant `{name}`")))
}

/// A problem instance of any supported kind.
#[pyclass(name = "Instance", module = "crossrelax", frozen)]
struct PyInstance {
    inner: AnyInstance,
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyInstance {
            inner: decode(text).map_err(py_err)?,
        })
    }

    /// Seeded random instance; `kind` is `mcst`, `intersection` or `lattice`.
    #[staticmethod]
    #[pyo3(signature = (kind, seed, index=0, variant="general"))]
    fn random(kind: &str, seed: u64, index: u64, variant: &str) -> PyResult<Self> {
        let mut rng = rng_for(seed, index);
        let inner = match kind {
            "mcst" => AnyInstance::Mcst(random_mcst(&mut rng).map_err(py_err)?),
            "intersection" => AnyInstance::Intersection(random_intersection(&mut rng).map_err(py_err)?),
            "lattice" => {
                let v = self::variant(variant)?;
                AnyInstance::Lattice(random_lattice(&mut rng, v, false).map_err(py_err)?)
            }
            other => return Err(PyValueError::new_err(format!("unknown kind `{other}`"))),
        };
        Ok(PyInstance { inner })
    }

    /// Bipartite edge cover on a `4n`-cycle.
    #[staticmethod]
    fn edge_cover(n: usize) -> PyResult<Self> {
        Ok(PyInstance {
            inner: AnyInstance::Intersection(gen_edge_cover_tight(n).map_err(py_err)?),
        })
    }

    /// Tree gap family; returns the instance and the generator report as JSON.
    #[staticmethod]
    fn mcst_gap(e: usize) -> PyResult<(Self, String)> {
        let g = gen_mcst_gap(e).map_err(py_err)?;
        Ok((
            PyInstance {
                inner: AnyInstance::GeneralMcst(g.instance),
            },
            to_canonical_json(&g.report),
        ))
    }

    /// Planar path lattice gap; returns the instance and its report as JSON.
    #[staticmethod]
    fn planar_gap(k: usize) -> PyResult<(Self, String)> {
        let g = gen_planar_mincut_gap(k).map_err(py_err)?;
        Ok((
            PyInstance {
                inner: AnyInstance::Lattice(g.instance),
            },
            to_canonical_json(&g.report),
        ))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    fn digest(&self) -> String {
        digest(&self.inner)
    }

    fn to_json(&self) -> String {
        encode(&self.inner)
    }

    /// Runs the matching algorithm. `verify` adds the exhaustive checks.
    #[pyo3(signature = (verify=true, variant=None))]
    fn solve(&self, py: Python<'_>, verify: bool, variant: Option<&str>) -> PyResult<PyReport> {
        let mut inst = self.inner.clone();
        if let Some(name) = variant {
            let v = self::variant(name)?;
            match &mut inst {
                AnyInstance::Lattice(l) => {
                    l.variant = v;
                    l.check_variant().map_err(py_err)?;
                }
                _ => return Err(PyValueError::new_err("variant applies to lattice instances only")),
            }
        }
        let solved = py.detach(|| solve_instance(&inst, verify)).map_err(py_err)?;
        Ok(PyReport {
            inner: solved.report,
            trace: solved.trace,
        })
    }

    fn __repr__(&self) -> String {
        format!("Instance(kind={:?}, digest={:?})", self.inner.kind(), &digest(&self.inner)[..12])
    }
}

/// Outcome and guarantee checks of one solve.
#[pyclass(name = "Report", module = "crossrelax", frozen)]
struct PyReport {
    inner: CoreReport,
    trace: String,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    #[getter]
    fn solution(&self) -> Vec<usize> {
        self.inner.outcome.solution.clone()
    }

    #[getter]
    fn cost(&self) -> String {
        self.inner.outcome.cost.exact.to_string()
    }

    #[getter]
    fn lp_optimum(&self) -> String {
        self.inner.outcome.lp_optimum.exact.to_string()
    }

    #[getter]
    fn instance_digest(&self) -> String {
        self.inner.instance_digest.clone()
    }

    /// `(name, bound, achieved, pass)` per check.
    #[getter]
    fn checks(&self) -> Vec<(String, String, String, bool)> {
        self.inner
            .checks
            .iter()
            .map(|c| (c.name.clone(), c.bound.exact.to_string(), c.achieved.exact.to_string(), c.pass))
            .collect()
    }

    /// Step trace as JSON lines.
    #[getter]
    fn trace(&self) -> String {
        self.trace.clone()
    }

    fn to_json(&self) -> String {
        to_canonical_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(algorithm={:?}, cost={}, passed={})",
            self.inner.algorithm,
            self.inner.outcome.cost.exact,
            self.inner.passed()
        )
    }
}

/// Exact rational normalisation, e.g. `"6/8"` to `"3/4"`.
#[pyfunction]
fn normalize_rational(text: &str) -> PyResult<String> {
    text.parse::<Rational>()
        .map(|r| r.to_string())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Runs acceptance criteria 1 to 9; returns `(id, title, passed, detail)`.
#[pyfunction]
#[pyo3(signature = (seed=2024, jobs=1))]
fn run_acceptance(py: Python<'_>, seed: u64, jobs: usize) -> PyResult<Vec<(usize, String, bool, String)>> {
    let opts = AcceptanceOptions {
        seed,
        jobs,
        ..AcceptanceOptions::default()
    };
    let results = py.detach(|| run_suite(&opts)).map_err(py_err)?;
    Ok(results.into_iter().map(|r| (r.id, r.title, r.passed, r.detail)).collect())
}

#[pymodule]
fn crossrelax(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(normalize_rational, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}
