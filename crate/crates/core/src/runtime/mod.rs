//! Instantiation, execution and knitting of compiled programs.

mod knit;
mod schedule;

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::codegen::{CompiledProgram, ParamCircuit};
use crate::error::{Error, Result};
use crate::sim::{run_exact, run_sampled, SignedDistribution};

pub use crate::transpile::{ErrorRates, QpuModel};
pub use knit::{knit, GlobalCoefficients, MAX_GLOBAL_INSTANCES};
pub use schedule::{fragment_metrics, load_fleet, schedule, score, Assignment};

/// Most instances a single fragment may expand to.
pub const MAX_FRAGMENT_INSTANCES: u64 = 10_000_000;

/// Environment variable overriding the default worker count.
pub const WORKERS_ENV: &str = "GATEVM_WORKERS";

/// Worker count from `GATEVM_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w: &usize| w >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// All instances of one fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSet {
    pub fragment: usize,
    /// Program gate indices that select this fragment's instances.
    pub gates: Vec<usize>,
    pub count: u64,
}

impl InstanceSet {
    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Decomposition index chosen for each of `gates` by instance `i`.
    pub fn tuple(&self, mut i: u64) -> Vec<usize> {
        let mut t = vec![0; self.gates.len()];
        for slot in t.iter_mut().rev() {
            *slot = (i % 6) as usize;
            i /= 6;
        }
        t
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.count).map(|i| self.tuple(i))
    }

    pub fn circuit(&self, program: &CompiledProgram, i: u64) -> Circuit {
        program.fragments[self.fragment].instantiate(i)
    }
}

fn instance_count(fragment: usize, f: &ParamCircuit) -> Result<u64> {
    let count = f.num_instances();
    if count > u128::from(MAX_FRAGMENT_INSTANCES) {
        return Err(Error::InstanceOverflow {
            fragment,
            count,
            limit: MAX_FRAGMENT_INSTANCES,
        });
    }
    Ok(count as u64)
}

/// One [`InstanceSet`] per fragment: `6^k_j` instances for a fragment touched
/// by `k_j` virtual gates, the last gate varying fastest.
pub fn instantiate(program: &CompiledProgram) -> Result<Vec<InstanceSet>> {
    program
        .fragments
        .iter()
        .enumerate()
        .map(|(j, f)| {
            Ok(InstanceSet {
                fragment: j,
                gates: f.gates.clone(),
                count: instance_count(j, f)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum ExecMode {
    Exact,
    Sampled { shots: u64 },
}

/// Per fragment, the signed distribution of every instance in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentResults {
    pub fragments: Vec<Vec<SignedDistribution>>,
}

/// Mix `(seed, fragment, instance)` into an independent stream seed.
pub fn instance_seed(seed: u64, fragment: usize, instance: u64) -> u64 {
    let mut z = seed
        ^ (fragment as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ instance.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_instance(circuit: &Circuit, mode: ExecMode, seed: u64) -> Result<SignedDistribution> {
    match mode {
        ExecMode::Exact => run_exact(circuit),
        ExecMode::Sampled { shots } => Ok(run_sampled(circuit, shots, seed)?.to_distribution()),
    }
}

/// Run every instance of every fragment on the simulator. Instances are
/// shared out to `workers` threads; results do not depend on the split.
pub fn execute(
    program: &CompiledProgram,
    mode: ExecMode,
    seed: u64,
    workers: usize,
) -> Result<FragmentResults> {
    let sets = instantiate(program)?;
    let jobs: Vec<(usize, u64)> = sets
        .iter()
        .flat_map(|s| (0..s.count).map(move |i| (s.fragment, i)))
        .collect();
    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, jobs.len().max(1));
    let mut slots: Vec<Option<Result<SignedDistribution>>> =
        (0..jobs.len()).map(|_| None).collect();
    let produced: Vec<Vec<(usize, Result<SignedDistribution>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let k = next.fetch_add(1, Ordering::Relaxed);
                        let Some(&(f, i)) = jobs.get(k) else { break };
                        let circuit = program.fragments[f].instantiate(i);
                        out.push((k, run_instance(&circuit, mode, instance_seed(seed, f, i))));
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    for (k, r) in produced.into_iter().flatten() {
        slots[k] = Some(r);
    }
    let mut fragments: Vec<Vec<SignedDistribution>> = sets
        .iter()
        .map(|s| Vec::with_capacity(s.count as usize))
        .collect();
    for ((f, _), slot) in jobs.iter().zip(slots) {
        fragments[*f].push(slot.expect("every job ran")?);
    }
    Ok(FragmentResults { fragments })
}

/// Execute and knit: the reconstructed distribution of the original circuit.
pub fn evaluate(
    program: &CompiledProgram,
    mode: ExecMode,
    seed: u64,
    workers: usize,
) -> Result<SignedDistribution> {
    let results = execute(program, mode, seed, workers)?;
    let coeffs = GlobalCoefficients::new(&program.coeff_vectors)?;
    knit(program, &results, &coeffs, workers)
}
