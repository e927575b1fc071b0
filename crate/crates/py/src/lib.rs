//! Python bindings. Reports and trace records come back as plain dicts
//! and lists; the core types are wrapped as classes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use debilandia::engine::{run_traced, step as engine_step};
use debilandia::instance::{build_list, enumerate_tuples, Verdict};
use debilandia::solver::{self, SolverConfig, DEFAULT_CAP};
use debilandia::tile::{Mask, Point};
use debilandia::{embedding, grid, verifier};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(value_err)?)
}

#[pyclass(name = "TileAtlas", module = "debilandia", frozen)]
struct PyTileAtlas(debilandia::TileAtlas);

#[pymethods]
impl PyTileAtlas {
    /// The built-in atlas.
    #[new]
    fn new() -> Self {
        PyTileAtlas(debilandia::atlas_default())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        debilandia::TileAtlas::from_json(text)
            .map(PyTileAtlas)
            .map_err(value_err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        debilandia::TileAtlas::load(path).map(PyTileAtlas).map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// Kind name for a 16-character mask string, or None for junk.
    fn classify(&self, mask: &str) -> PyResult<Option<String>> {
        let m: Mask = mask.parse().map_err(value_err)?;
        Ok(self.0.classify(m).map(|k| k.name()))
    }
}

fn atlas_or_default(atlas: Option<&PyTileAtlas>) -> debilandia::TileAtlas {
    atlas.map_or_else(debilandia::atlas_default, |a| a.0.clone())
}

#[pyclass(name = "GameState", module = "debilandia")]
struct PyGameState(grid::GameState);

#[pymethods]
impl PyGameState {
    /// Recognizes `points`, a sequence of (x, y) pairs.
    #[staticmethod]
    #[pyo3(signature = (points, atlas = None))]
    fn from_points(points: Vec<(i64, i64)>, atlas: Option<&PyTileAtlas>) -> Self {
        let points: Vec<Point> = points.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        PyGameState(grid::recognize(&points, &atlas_or_default(atlas)))
    }

    /// Direct layout of a machine given as JSON.
    #[staticmethod]
    fn from_machine(machine_json: &str) -> PyResult<Self> {
        let m = debilandia::TmSpec::from_json(machine_json).map_err(value_err)?;
        embedding::direct_state(&m).map(PyGameState).map_err(value_err)
    }

    #[getter]
    fn junk_cells(&self) -> usize {
        self.0.junk_cells()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn hash(&self) -> u64 {
        grid::state_hash(&self.0)
    }

    fn snapshot<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serialize(py, &self.0.to_snapshot())
    }

    #[pyo3(signature = (atlas = None))]
    fn points(&self, atlas: Option<&PyTileAtlas>) -> Vec<(i64, i64)> {
        self.0
            .points(&atlas_or_default(atlas))
            .into_iter()
            .map(|p| (p.x, p.y))
            .collect()
    }

    /// One generation: (next state, outcome dict).
    fn step<'py>(&self, py: Python<'py>) -> PyResult<(PyGameState, Bound<'py, PyAny>)> {
        let (next, outcome) = engine_step(&self.0);
        Ok((PyGameState(next), serialize(py, &outcome)?))
    }

    /// Runs up to `max_gens` generations. Returns a summary dict with a
    /// `trace` list of per-generation records.
    fn run<'py>(&self, py: Python<'py>, max_gens: usize) -> PyResult<Bound<'py, PyAny>> {
        let mut trace = Vec::new();
        let r = run_traced(&self.0, max_gens, |rec| trace.push(rec));
        let summary = serde_json::json!({
            "status": r.status,
            "stopped": r.status.stopped(),
            "generations_run": r.generations_run,
            "final_hash": format!("{:016x}", grid::state_hash(&r.final_state)),
            "trace": trace,
        });
        to_py(py, &summary)
    }

    /// The machine the tiles describe, as JSON, or raises ValueError.
    fn extract_machine(&self) -> PyResult<String> {
        embedding::extract_tm(&self.0).map(|m| m.to_json()).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("GameState(tiles={}, junk_cells={})", self.0.len(), self.0.junk_cells())
    }
}

#[pyclass(name = "Instance", module = "debilandia", frozen)]
struct PyInstance(debilandia::Instance);

#[pymethods]
impl PyInstance {
    #[new]
    fn new(a: Vec<u64>) -> PyResult<Self> {
        debilandia::Instance::new(a).map(PyInstance).map_err(value_err)
    }

    #[getter]
    fn a(&self) -> Vec<u64> {
        self.0.a().to_vec()
    }

    #[getter]
    fn b(&self) -> Vec<u64> {
        self.0.b()
    }

    /// Canonical list with `e` generations and marker 25 or 43.
    fn encode(&self, e: usize, marker: u64) -> PyResult<Vec<u64>> {
        let v = Verdict::from_marker(marker).ok_or_else(|| PyValueError::new_err("marker must be 25 or 43"))?;
        Ok(build_list(&enumerate_tuples(&self.0), e, v).0)
    }

    /// Verifier report as a dict.
    #[pyo3(signature = (list, atlas = None))]
    fn verify<'py>(&self, py: Python<'py>, list: Vec<u64>, atlas: Option<&PyTileAtlas>) -> PyResult<Bound<'py, PyAny>> {
        let report = verifier::verify(&self.0, &debilandia::CandidateList(list), &atlas_or_default(atlas));
        serialize(py, &report)
    }

    /// Certificate list, or None when no machine arises from the points.
    #[pyo3(signature = (max_e, cap = DEFAULT_CAP, atlas = None))]
    fn solve(&self, max_e: usize, cap: usize, atlas: Option<&PyTileAtlas>) -> PyResult<Option<Vec<u64>>> {
        let r = solver::construct_certificate(&self.0, max_e, &atlas_or_default(atlas), SolverConfig { cap })
            .map_err(value_err)?;
        Ok(r.outcome.list().map(|l| l.0.clone()))
    }

    fn __repr__(&self) -> String {
        format!("Instance([{}])", self.0)
    }
}

/// Growth table rows as dicts.
#[pyfunction]
#[pyo3(signature = (sizes, trials, seed = 0xDEB1, max_e = 1000, cap = DEFAULT_CAP))]
fn growth_probe<'py>(
    py: Python<'py>,
    sizes: Vec<usize>,
    trials: usize,
    seed: u64,
    max_e: usize,
    cap: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let rows = solver::growth_probe(
        &sizes,
        trials,
        seed,
        max_e,
        &debilandia::atlas_default(),
        SolverConfig { cap },
    )
    .map_err(value_err)?;
    // claimed counts can exceed u64; report them as strings
    let rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["claimed_cells"] = serde_json::Value::String(r.claimed_cells.to_string());
            v
        })
        .collect();
    to_py(py, &serde_json::Value::Array(rows))
}

/// `2ET + 2E + 3P + 18T + 10` and `2N² + 33N` for `T` pairs and `E` generations.
#[pyfunction]
fn cost_bounds(t: u64, e: u64) -> (u64, u64) {
    let l = verifier::CostLedger::with_sizes(t, e);
    (verifier::f_of(&l), verifier::bound_of(l.n))
}

#[pymodule]
#[pyo3(name = "debilandia")]
fn debilandia_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTileAtlas>()?;
    m.add_class::<PyGameState>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(growth_probe, m)?)?;
    m.add_function(wrap_pyfunction!(cost_bounds, m)?)?;
    Ok(())
}
