//! Config-driven experiment runs: compile, schedule and evaluate every
//! benchmark under every pass setup.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::compile::compile;
use crate::error::{Error, Result};
use crate::passes::{PassConfig, PassKind};
use crate::runtime::{
    default_workers, execute, instantiate, knit, schedule, ExecMode, GlobalCoefficients,
    MAX_GLOBAL_INSTANCES,
};
use crate::sim::{run_exact, MAX_QUBITS};
use crate::transpile::{falcon27, hellinger_fidelity, ErrorRates, QpuModel};

use super::{generate_benchmark, BenchmarkSpec};

/// One pass configuration to apply to every benchmark.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassSetup {
    /// Row label; derived from the other fields when absent.
    #[serde(default)]
    pub label: Option<String>,
    /// Comma separated pass list; empty compiles without virtualization.
    #[serde(default = "standard_passes")]
    pub passes: String,
    /// Largest fragment width; half the benchmark width, rounded up, when absent.
    #[serde(default)]
    pub max_fragment_size: Option<usize>,
    #[serde(default)]
    pub budget: usize,
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub seed: u64,
}

fn standard_passes() -> String {
    "cc,dr,qr".into()
}

impl PassSetup {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| {
            let passes = if self.passes.trim().is_empty() {
                "none"
            } else {
                self.passes.as_str()
            };
            let size = self
                .max_fragment_size
                .map_or_else(|| "half".to_string(), |s| s.to_string());
            let kind = if self.exact { "exact" } else { "greedy" };
            format!("{passes}/s={size}/b={}/{kind}", self.budget)
        })
    }

    fn config(&self, num_qubits: usize) -> PassConfig {
        PassConfig::new(
            self.max_fragment_size.unwrap_or(num_qubits.div_ceil(2)),
            self.budget,
        )
        .with_seed(self.seed)
        .with_exact(self.exact)
    }
}

fn default_setups() -> Vec<PassSetup> {
    vec![PassSetup {
        label: None,
        passes: standard_passes(),
        max_fragment_size: None,
        budget: 3,
        exact: false,
        seed: 0,
    }]
}

fn default_mode() -> ExecMode {
    ExecMode::Exact
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// A 27-qubit heavy-hex device with typical superconducting error rates.
pub fn default_fleet() -> Vec<QpuModel> {
    let errors = ErrorRates {
        one_qubit: 3e-4,
        two_qubit: 1e-2,
        measure: 2e-2,
        reset: 2e-2,
    };
    vec![QpuModel::new("heavy_hex_27", &falcon27(), errors)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub benchmarks: Vec<BenchmarkSpec>,
    #[serde(default = "default_setups")]
    pub pass_configs: Vec<PassSetup>,
    /// QPUs used for scheduling and metrics; a heavy-hex device when empty.
    #[serde(default)]
    pub fleet: Vec<QpuModel>,
    #[serde(default = "default_mode")]
    pub mode: ExecMode,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; the runtime default when absent.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    /// Execute and knit programs small enough to simulate.
    #[serde(default = "yes")]
    pub simulate: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One benchmark under one pass setup. Optional columns are empty when the
/// step did not run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub benchmark: String,
    pub num_qubits: usize,
    pub seed: u64,
    pub setup: String,
    /// `ok`, or `width_unreachable` when qubit reuse could not meet the size.
    pub status: String,
    pub virtual_gates: Option<usize>,
    pub fragments: Option<usize>,
    pub max_width: Option<usize>,
    pub dependencies: Option<usize>,
    pub instances: Option<u128>,
    pub depth: Option<usize>,
    pub cnots: Option<usize>,
    pub min_esp: Option<f64>,
    pub fidelity: Option<f64>,
    pub l_inf: Option<f64>,
}

/// Wall-clock seconds per stage of one case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseTiming {
    pub benchmark: String,
    pub setup: String,
    pub compile: f64,
    pub instantiate: Option<f64>,
    pub execute: Option<f64>,
    pub knit: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub timings: Vec<CaseTiming>,
}

impl ExperimentReport {
    /// The table without timings; identical inputs give identical bytes.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(ROW_HEADER).map_err(csv_error)?;
        }
        for r in &self.rows {
            w.serialize(r).map_err(csv_error)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn timings_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.timings)?)
    }
}

const ROW_HEADER: [&str; 15] = [
    "benchmark",
    "num_qubits",
    "seed",
    "setup",
    "status",
    "virtual_gates",
    "fragments",
    "max_width",
    "dependencies",
    "instances",
    "depth",
    "cnots",
    "min_esp",
    "fidelity",
    "l_inf",
];

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidConfig(format!("csv: {e}"))
}

fn seconds(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn run_case(
    cfg: &ExperimentConfig,
    spec: &BenchmarkSpec,
    setup: &PassSetup,
    fleet: &[QpuModel],
) -> Result<(ReportRow, CaseTiming)> {
    let circuit = generate_benchmark(spec)?;
    let mut row = ReportRow {
        benchmark: spec.label(),
        num_qubits: spec.num_qubits,
        seed: spec.seed,
        setup: setup.label(),
        status: "ok".into(),
        virtual_gates: None,
        fragments: None,
        max_width: None,
        dependencies: None,
        instances: None,
        depth: None,
        cnots: None,
        min_esp: None,
        fidelity: None,
        l_inf: None,
    };
    let mut timing = CaseTiming {
        benchmark: row.benchmark.clone(),
        setup: row.setup.clone(),
        compile: 0.0,
        instantiate: None,
        execute: None,
        knit: None,
    };

    let passes = PassKind::parse_list(&setup.passes)?;
    let start = Instant::now();
    let compiled = compile(&circuit, &passes, &setup.config(spec.num_qubits));
    timing.compile = seconds(start);
    let compiled = match compiled {
        Ok(c) => c,
        Err(Error::WidthUnreachable { .. }) => {
            row.status = "width_unreachable".into();
            return Ok((row, timing));
        }
        Err(e) => return Err(e),
    };
    let vc = &compiled.virtual_circuit;
    let program = &compiled.program;
    row.virtual_gates = Some(vc.virtual_gates().len());
    row.fragments = Some(program.fragments.len());
    row.max_width = Some(vc.max_fragment_width());
    row.dependencies = Some(vc.dependency_count());
    row.instances = Some(program.fragments.iter().map(|f| f.num_instances()).sum());

    let mut qpus = fleet.to_vec();
    let assignments = schedule(program, &mut qpus, cfg.alpha, cfg.beta)?;
    row.depth = assignments.iter().map(|a| a.depth).max();
    row.cnots = assignments.iter().map(|a| a.cnot_count).max();
    row.min_esp = assignments.iter().map(|a| a.esp).reduce(f64::min);

    let simulable = circuit.num_qubits <= MAX_QUBITS
        && 6usize
            .checked_pow(program.coeff_vectors.len() as u32)
            .is_some_and(|n| n <= MAX_GLOBAL_INSTANCES);
    if cfg.simulate && simulable {
        let workers = cfg.workers.unwrap_or_else(default_workers);
        let start = Instant::now();
        for set in instantiate(program)? {
            for i in 0..set.count {
                std::hint::black_box(set.circuit(program, i));
            }
        }
        timing.instantiate = Some(seconds(start));
        let start = Instant::now();
        let results = execute(program, cfg.mode, cfg.seed, workers)?;
        timing.execute = Some(seconds(start));
        let start = Instant::now();
        let coeffs = GlobalCoefficients::new(&program.coeff_vectors)?;
        let knitted = knit(program, &results, &coeffs, workers)?;
        timing.knit = Some(seconds(start));
        let ideal = run_exact(&circuit)?;
        row.l_inf = Some(knitted.l_inf_distance(&ideal));
        row.fidelity = Some(hellinger_fidelity(&knitted, &ideal, true)?);
    }
    Ok((row, timing))
}

/// Every benchmark crossed with every pass setup, in config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let fleet = if cfg.fleet.is_empty() {
        default_fleet()
    } else {
        cfg.fleet.clone()
    };
    let mut report = ExperimentReport::default();
    for spec in &cfg.benchmarks {
        for setup in &cfg.pass_configs {
            let (row, timing) = run_case(cfg, spec, setup, &fleet)?;
            report.rows.push(row);
            report.timings.push(timing);
        }
    }
    Ok(report)
}
