use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::sim::SignedDistribution;

use super::ErrorRates;

/// Longest chain of operations sharing a qubit; barriers do not count.
pub fn depth(c: &Circuit) -> usize {
    let mut level = vec![0usize; c.num_qubits];
    for inst in c
        .instructions
        .iter()
        .filter(|i| i.kind != GateKind::Barrier)
    {
        let l = inst.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in &inst.qubits {
            level[q] = l;
        }
    }
    level.into_iter().max().unwrap_or(0)
}

pub fn cnot_count(c: &Circuit) -> usize {
    c.instructions
        .iter()
        .filter(|i| i.kind == GateKind::Cx)
        .count()
}

/// Estimated success probability: product of `1 - e` over all operations
/// except barriers.
pub fn esp(c: &Circuit, rates: &ErrorRates) -> f64 {
    c.instructions
        .iter()
        .filter_map(|i| rates.of(i.kind))
        .map(|e| 1.0 - e)
        .product()
}

fn check_distribution(d: &SignedDistribution) -> Result<()> {
    if let Some((k, v)) = d.entries.iter().find(|(_, v)| **v < 0.0) {
        return Err(Error::NotADistribution(format!(
            "negative weight {v} at {k}"
        )));
    }
    let total = d.total();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::NotADistribution(format!("total weight {total}")));
    }
    Ok(())
}

/// `(1 - H^2)^2` with `H` the Hellinger distance; both inputs must be
/// probability distributions.
pub fn hellinger_fidelity_raw(p: &SignedDistribution, q: &SignedDistribution) -> Result<f64> {
    check_distribution(p)?;
    check_distribution(q)?;
    let mut keys: Vec<u64> = p.entries.keys().chain(q.entries.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let sum: f64 = keys
        .iter()
        .map(|&k| (p.get(k).sqrt() - q.get(k).sqrt()).powi(2))
        .sum();
    let h2 = 0.5 * sum;
    Ok(((1.0 - h2).powi(2)).clamp(0.0, 1.0))
}

/// Hellinger fidelity; with `clip`, negative weights are dropped and both
/// inputs renormalised first.
pub fn hellinger_fidelity(
    p: &SignedDistribution,
    q: &SignedDistribution,
    clip: bool,
) -> Result<f64> {
    if clip {
        hellinger_fidelity_raw(&p.clipped(), &q.clipped())
    } else {
        hellinger_fidelity_raw(p, q)
    }
}
