//! Dependency reduction: virtualize gates that tie many qubits together.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ir::{GateId, VirtualCircuit};

use super::PassConfig;

/// Most real two-qubit gates the exhaustive reducer accepts.
pub const EXACT_GATE_LIMIT: usize = 16;

/// Calls `f` on every k-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Gate set of size at most `cfg.budget` minimising the qubit-dependency
/// count; smaller sets win ties, then lexicographic order.
pub fn best_dependency_subset(vc: &VirtualCircuit, budget: usize) -> Result<Vec<GateId>> {
    let gates = vc.real_two_qubit_gates();
    if gates.len() > EXACT_GATE_LIMIT {
        return Err(Error::InstanceTooLarge {
            what: "two-qubit gates",
            size: gates.len(),
            limit: EXACT_GATE_LIMIT,
        });
    }
    let mut best = (vc.dependency_count(), Vec::new());
    let mut failure = None;
    for k in 1..=budget.min(gates.len()) {
        for_each_subset(gates.len(), k, &mut |subset| {
            if failure.is_some() {
                return;
            }
            let mut trial = vc.clone();
            for &i in subset {
                if let Err(e) = trial.virt_gate(gates[i]) {
                    failure = Some(e);
                    return;
                }
            }
            let count = trial.dependency_count();
            if count < best.0 {
                best = (count, subset.iter().map(|&i| gates[i]).collect());
            }
        });
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(best.1),
    }
}

pub fn reduce_dependencies_exact(vc: &VirtualCircuit, cfg: &PassConfig) -> Result<VirtualCircuit> {
    let chosen = best_dependency_subset(vc, cfg.budget)?;
    let mut out = vc.clone();
    for g in chosen {
        out.virt_gate(g)?;
    }
    Ok(out)
}

/// Up to `cfg.budget` rounds of virtualizing a gate of maximal
/// `ancestors * descendants`; stops once every cost is zero.
pub fn reduce_dependencies_greedy(vc: &VirtualCircuit, cfg: &PassConfig) -> Result<VirtualCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = vc.clone();
    for _ in 0..cfg.budget {
        let costs = out.gate_costs();
        let Some(max) = costs.iter().map(|(_, c)| *c).max() else {
            break;
        };
        if max == 0 {
            break;
        }
        let top: Vec<GateId> = costs
            .iter()
            .filter(|(_, c)| *c == max)
            .map(|(g, _)| *g)
            .collect();
        let pick = *top.choose(&mut rng).expect("non-empty");
        out.virt_gate(pick)?;
    }
    Ok(out)
}
