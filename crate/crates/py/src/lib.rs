//! Python module `padic`: lattices, lattice relations and the property
//! checks, with scalars passed as strings (`"3/4"`) or ints.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use padic_lattice::json::{lattice_json, parse_lattice, parse_relation, relation_json};
use padic_lattice::random::RandomSpec;
use padic_lattice::verify;
use padic_lattice::{compose, Lattice as CoreLattice, PadicContext, Relation as CoreRelation, Scalar};

fn err(e: padic_lattice::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scalar(obj: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(Scalar::from_int(i));
    }
    let s: String = obj.extract()?;
    s.parse().map_err(err)
}

fn vector(obj: &Bound<'_, PyAny>) -> PyResult<Vec<Scalar>> {
    obj.try_iter()?.map(|x| scalar(&x?)).collect()
}

fn vectors(obj: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<Scalar>>> {
    obj.try_iter()?.map(|v| vector(&v?)).collect()
}

fn context(p: u64) -> PyResult<PadicContext> {
    PadicContext::new(p).map_err(err)
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn to_python(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let loads = py.import("json")?.getattr("loads")?;
    Ok(loads.call1((value.to_string(),))?.unbind())
}

/// A lattice in `Q_p^n`, stored by its canonical basis.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "padic")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Lattice(CoreLattice);

#[pymethods]
impl Lattice {
    /// Lattice spanned by `generators`, each a list of `n` scalars.
    #[new]
    fn new(p: u64, generators: &Bound<'_, PyAny>) -> PyResult<Self> {
        let gens = vectors(generators)?;
        let n = gens.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(PyValueError::new_err("generators: need at least one nonempty vector"));
        }
        CoreLattice::from_generators(context(p)?, n, &gens).map(Lattice).map_err(err)
    }

    #[staticmethod]
    fn standard(p: u64, n: usize) -> PyResult<Self> {
        Ok(Lattice(CoreLattice::standard(context(p)?, n)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_lattice(text).map(Lattice).map_err(err)
    }

    fn to_json(&self) -> String {
        lattice_json(&self.0).to_string()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.ctx().p()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// Columns of the canonical basis.
    fn basis(&self) -> Vec<Vec<String>> {
        self.0.basis().columns().iter().map(|c| strings(c)).collect()
    }

    fn sum(&self, other: &Lattice) -> PyResult<Self> {
        self.0.sum(&other.0).map(Lattice).map_err(err)
    }

    fn meet(&self, other: &Lattice) -> PyResult<Self> {
        self.0.meet(&other.0).map(Lattice).map_err(err)
    }

    fn dual(&self) -> Self {
        Lattice(self.0.dual())
    }

    /// Norm exponent `m` with `‖v‖ = p^m`, or `None` for the zero vector.
    fn norm(&self, v: &Bound<'_, PyAny>) -> PyResult<Option<i64>> {
        Ok(self.0.norm(&vector(v)?).map_err(err)?.finite())
    }

    fn member(&self, v: &Bound<'_, PyAny>) -> PyResult<bool> {
        self.0.member(&vector(v)?).map_err(err)
    }

    fn contains(&self, other: &Lattice) -> PyResult<bool> {
        self.0.contains(&other.0).map_err(err)
    }

    fn complex_distance(&self, other: &Lattice) -> PyResult<Vec<i64>> {
        Ok(self.0.complex_distance(&other.0).map_err(err)?.ks().to_vec())
    }

    fn __repr__(&self) -> String {
        format!("Lattice({})", self.to_json())
    }
}

/// A lattice in `Q_p^n ⊕ Q_p^n` read as a relation from the first block to
/// the second.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "padic")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Relation(CoreRelation);

#[pymethods]
impl Relation {
    #[new]
    fn new(p: u64, n: usize, generators: &Bound<'_, PyAny>) -> PyResult<Self> {
        CoreRelation::from_generators(context(p)?, n, &vectors(generators)?)
            .map(Relation)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_relation(text).map(Relation).map_err(err)
    }

    #[staticmethod]
    fn block_diagonal(source: &Lattice, target: &Lattice) -> PyResult<Self> {
        CoreRelation::block_diagonal(&source.0, &target.0).map(Relation).map_err(err)
    }

    fn to_json(&self) -> String {
        relation_json(&self.0).to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn dom(&self) -> Lattice {
        Lattice(self.0.dom())
    }

    fn im(&self) -> Lattice {
        Lattice(self.0.im())
    }

    fn ker(&self) -> Lattice {
        Lattice(self.0.ker())
    }

    fn indef(&self) -> Lattice {
        Lattice(self.0.indef())
    }

    fn act(&self, r: &Lattice) -> PyResult<Lattice> {
        self.0.act(&r.0).map(Lattice).map_err(err)
    }

    /// `self ∘ h`: `h` acts first.
    fn compose(&self, h: &Relation) -> PyResult<Self> {
        compose(&self.0, &h.0).map(Relation).map_err(err)
    }

    /// Rows of the structure map `dom/ker → im/indef`.
    fn structure_map(&self) -> Vec<Vec<String>> {
        let g = self.0.structure_map();
        (0..g.rows()).map(|i| strings(g.row(i))).collect()
    }

    fn __repr__(&self) -> String {
        format!("Relation({})", self.to_json())
    }
}

fn spec(p: u64, n: usize, bound: u32, trials: u64, seed: u64) -> PyResult<RandomSpec> {
    context(p)?;
    Ok(RandomSpec {
        seed,
        p,
        n,
        bound,
        trials,
    })
}

/// Randomized check of the compression theorem; returns the report dict.
#[pyfunction]
#[pyo3(signature = (p=2, n=2, bound=3, trials=100, seed=0))]
fn check_theorem(py: Python<'_>, p: u64, n: usize, bound: u32, trials: u64, seed: u64) -> PyResult<Py<PyAny>> {
    let report = py.detach(|| spec(p, n, bound, trials, seed).map(|s| verify::check_theorem(&s)))?;
    to_python(py, &serde_json::to_value(report).expect("serializable"))
}

/// Supporting lemma checks; returns a list of report dicts.
#[pyfunction]
#[pyo3(signature = (p=2, n=2, bound=3, trials=100, seed=0))]
fn check_lemmas(py: Python<'_>, p: u64, n: usize, bound: u32, trials: u64, seed: u64) -> PyResult<Py<PyAny>> {
    let reports = py.detach(|| spec(p, n, bound, trials, seed).map(|s| verify::check_lemmas(&s)))?;
    to_python(py, &serde_json::to_value(reports).expect("serializable"))
}

/// Agreement with the brute-force oracle in the window of radius `window`.
#[pyfunction]
#[pyo3(signature = (p=2, n=1, window=1, trials=100, seed=0))]
fn oracle_diff(py: Python<'_>, p: u64, n: usize, window: u32, trials: u64, seed: u64) -> PyResult<Py<PyAny>> {
    let reports = py.detach(|| spec(p, n, window, trials, seed).map(|s| verify::oracle_diff(&s, window)))?;
    to_python(py, &serde_json::to_value(reports).expect("serializable"))
}

#[pymodule]
fn padic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Lattice>()?;
    m.add_class::<Relation>()?;
    m.add_function(wrap_pyfunction!(check_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemmas, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_diff, m)?)?;
    Ok(())
}
