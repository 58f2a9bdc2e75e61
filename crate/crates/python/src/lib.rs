use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gatevm::bench::{generate_benchmark as generate, BenchmarkSpec};
use gatevm::runtime::{default_workers, evaluate, ExecMode};
use gatevm::sim::{format_bits, parse_bits};
use gatevm::transpile::hellinger_fidelity as fidelity;
use gatevm::{PassConfig, PassKind, SignedDistribution};

fn err(e: gatevm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dict(d: &SignedDistribution) -> BTreeMap<String, f64> {
    d.sorted()
        .into_iter()
        .map(|(k, v)| (format_bits(k, d.num_bits), v))
        .collect()
}

fn from_dict(map: BTreeMap<String, f64>) -> PyResult<SignedDistribution> {
    let bits = map.keys().map(String::len).max().unwrap_or(0);
    let mut d = SignedDistribution::new(bits);
    for (k, v) in map {
        let key =
            parse_bits(&k).ok_or_else(|| PyValueError::new_err(format!("bad bitstring `{k}`")))?;
        d.add(key, v);
    }
    Ok(d)
}

fn exec_mode(shots: Option<u64>) -> ExecMode {
    shots.map_or(ExecMode::Exact, |shots| ExecMode::Sampled { shots })
}

/// A circuit over the native gate set.
#[pyclass(name = "Circuit", module = "pygatevm", skip_from_py_object)]
#[derive(Clone)]
struct PyCircuit {
    inner: gatevm::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[staticmethod]
    fn from_qasm(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: gatevm::parse_qasm(text).map_err(err)?,
        })
    }

    fn to_qasm(&self) -> String {
        gatevm::emit_qasm(&self.inner)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits
    }

    #[getter]
    fn two_qubit_count(&self) -> usize {
        self.inner.two_qubit_count()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Exact output distribution as a bitstring dictionary.
    fn simulate(&self) -> PyResult<BTreeMap<String, f64>> {
        Ok(to_dict(&gatevm::run_exact(&self.inner).map_err(err)?))
    }

    #[pyo3(signature = (max_fragment_size=None, budget=3, exact=false, seed=0, passes="cc,dr,qr"))]
    fn compile(
        &self,
        max_fragment_size: Option<usize>,
        budget: usize,
        exact: bool,
        seed: u64,
        passes: &str,
    ) -> PyResult<PyProgram> {
        let kinds = PassKind::parse_list(passes).map_err(err)?;
        let size = max_fragment_size.unwrap_or(self.inner.num_qubits.div_ceil(2));
        let cfg = PassConfig::new(size, budget)
            .with_seed(seed)
            .with_exact(exact);
        let compiled = gatevm::compile(&self.inner, &kinds, &cfg).map_err(err)?;
        Ok(PyProgram {
            dependencies: Some(compiled.virtual_circuit.dependency_count()),
            inner: compiled.program,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(num_qubits={}, instructions={})",
            self.inner.num_qubits,
            self.inner.len()
        )
    }
}

/// A compiled program: fragments with placeholders for virtual gates.
#[pyclass(name = "Program", module = "pygatevm")]
struct PyProgram {
    inner: gatevm::CompiledProgram,
    dependencies: Option<usize>,
}

#[pymethods]
impl PyProgram {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: gatevm::CompiledProgram::from_json(text).map_err(err)?,
            dependencies: None,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    #[getter]
    fn num_virtual_gates(&self) -> usize {
        self.inner.num_virtual_gates()
    }

    #[getter]
    fn fragment_widths(&self) -> Vec<usize> {
        self.inner.fragments.iter().map(|f| f.width()).collect()
    }

    #[getter]
    fn instance_counts(&self) -> Vec<u128> {
        self.inner
            .fragments
            .iter()
            .map(|f| f.num_instances())
            .collect()
    }

    /// Qubit dependency count of the compiled circuit, when known.
    #[getter]
    fn dependencies(&self) -> Option<usize> {
        self.dependencies
    }

    /// Execute every instance and knit. Sampled when `shots` is given.
    #[pyo3(signature = (shots=None, seed=0, workers=None))]
    fn run(
        &self,
        py: Python<'_>,
        shots: Option<u64>,
        seed: u64,
        workers: Option<usize>,
    ) -> PyResult<BTreeMap<String, f64>> {
        let workers = workers.unwrap_or_else(default_workers);
        let d = py
            .detach(|| evaluate(&self.inner, exec_mode(shots), seed, workers))
            .map_err(err)?;
        Ok(to_dict(&d))
    }

    fn __repr__(&self) -> String {
        format!(
            "Program(fragments={:?}, virtual_gates={})",
            self.fragment_widths(),
            self.num_virtual_gates()
        )
    }
}

/// Benchmark circuit such as `ghz`, `bv`, `vqe-1` or `qaoa-2`.
#[pyfunction]
#[pyo3(signature = (family, num_qubits, seed=0))]
fn generate_benchmark(family: &str, num_qubits: usize, seed: u64) -> PyResult<PyCircuit> {
    let spec = BenchmarkSpec::new(family.parse().map_err(err)?, num_qubits, seed);
    Ok(PyCircuit {
        inner: generate(&spec).map_err(err)?,
    })
}

/// Hellinger fidelity of two bitstring dictionaries.
#[pyfunction]
#[pyo3(signature = (p, q, clip=true))]
fn hellinger_fidelity(
    p: BTreeMap<String, f64>,
    q: BTreeMap<String, f64>,
    clip: bool,
) -> PyResult<f64> {
    fidelity(&from_dict(p)?, &from_dict(q)?, clip).map_err(err)
}

#[pymodule]
fn pygatevm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyProgram>()?;
    m.add_function(wrap_pyfunction!(generate_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(hellinger_fidelity, m)?)?;
    Ok(())
}
