//! Choosing a QPU for every fragment.

use serde::{Deserialize, Serialize};

use crate::codegen::{CompiledProgram, ParamCircuit};
use crate::error::{Error, Result};
use crate::transpile::{cnot_count, depth, esp, map_and_route, QpuModel};

/// Where a fragment runs and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub fragment: usize,
    pub qpu: String,
    /// Index of the chosen QPU in the fleet.
    pub index: usize,
    pub score: f64,
    pub esp: f64,
    pub depth: usize,
    pub cnot_count: usize,
}

/// `alpha * (1 - queue / max_queue) + beta * esp`; the queue term is 1 when
/// every queue is empty.
pub fn score(alpha: f64, beta: f64, queue: u64, max_queue: u64, esp: f64) -> f64 {
    let w = if max_queue == 0 {
        0.0
    } else {
        queue as f64 / max_queue as f64
    };
    alpha * (1.0 - w) + beta * esp
}

/// Transpiled depth, CNOT count and success probability of a fragment on
/// `qpu`; every placeholder is counted as one single-qubit operation.
pub fn fragment_metrics(f: &ParamCircuit, qpu: &QpuModel) -> Result<(usize, usize, f64)> {
    let pc = map_and_route(&f.circuit, qpu)?;
    let placeholder_factor = (1.0 - qpu.errors.one_qubit).powi(f.placeholders.len() as i32);
    Ok((
        depth(&pc.circuit),
        cnot_count(&pc.circuit),
        esp(&pc.circuit, &qpu.errors) * placeholder_factor,
    ))
}

/// Assign every fragment to the best scoring QPU that is large enough. Ties
/// go to the smaller name. The chosen QPU's queue grows by the fragment's
/// instance count before the next fragment is placed.
pub fn schedule(
    program: &CompiledProgram,
    qpus: &mut [QpuModel],
    alpha: f64,
    beta: f64,
) -> Result<Vec<Assignment>> {
    if alpha < 0.0 || beta < 0.0 {
        return Err(Error::InvalidConfig(
            "alpha and beta must be non-negative".into(),
        ));
    }
    for q in qpus.iter() {
        q.validate()?;
    }
    let mut out = Vec::with_capacity(program.fragments.len());
    for (j, f) in program.fragments.iter().enumerate() {
        let width = f.width();
        let candidates: Vec<usize> = (0..qpus.len())
            .filter(|&i| qpus[i].num_qubits >= width)
            .collect();
        if candidates.is_empty() {
            return Err(Error::NoFittingQpu { fragment: j, width });
        }
        let max_queue = candidates
            .iter()
            .map(|&i| qpus[i].queue_length)
            .max()
            .unwrap_or(0);
        let mut best: Option<Assignment> = None;
        for &i in &candidates {
            let (d, cx, e) = fragment_metrics(f, &qpus[i])?;
            let s = score(alpha, beta, qpus[i].queue_length, max_queue, e);
            let better = match &best {
                None => true,
                Some(b) => s > b.score || (s == b.score && qpus[i].name < b.qpu),
            };
            if better {
                best = Some(Assignment {
                    fragment: j,
                    qpu: qpus[i].name.clone(),
                    index: i,
                    score: s,
                    esp: e,
                    depth: d,
                    cnot_count: cx,
                });
            }
        }
        let chosen = best.expect("at least one candidate");
        let added = u64::try_from(f.num_instances()).unwrap_or(u64::MAX);
        let q = &mut qpus[chosen.index];
        q.queue_length = q.queue_length.saturating_add(added);
        out.push(chosen);
    }
    Ok(out)
}

/// Parse a fleet file: a JSON list of QPU descriptions.
pub fn load_fleet(text: &str) -> Result<Vec<QpuModel>> {
    let fleet: Vec<QpuModel> = serde_json::from_str(text)?;
    for q in &fleet {
        q.validate()?;
    }
    Ok(fleet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, Instruction};
    use crate::codegen::generate;
    use crate::ir::VirtualCircuit;
    use crate::transpile::{line, ErrorRates};

    fn program() -> CompiledProgram {
        let mut c = Circuit::new(2);
        c.push(Instruction::h(0)).push(Instruction::cx(0, 1));
        generate(&VirtualCircuit::from_circuit(&c).unwrap())
    }

    fn fleet(queues: [u64; 2], errs: [f64; 2]) -> Vec<QpuModel> {
        (0..2)
            .map(|i| {
                let mut q = QpuModel::new(format!("q{i}"), &line(3), ErrorRates::uniform(errs[i]));
                q.queue_length = queues[i];
                q
            })
            .collect()
    }

    #[test]
    fn empty_queue_wins_on_queue_weight() {
        let mut f = fleet([10, 0], [0.01, 0.01]);
        let a = schedule(&program(), &mut f, 1.0, 0.0).unwrap();
        assert_eq!(a[0].qpu, "q1");
        assert_eq!(f[1].queue_length, 1);
    }

    #[test]
    fn esp_weight_ignores_queues() {
        let mut f = fleet([0, 100], [0.05, 0.01]);
        let a = schedule(&program(), &mut f, 0.0, 1.0).unwrap();
        assert_eq!(a[0].qpu, "q1");
    }

    #[test]
    fn too_small_fleet_fails() {
        let mut f = vec![QpuModel::new("tiny", &line(1), ErrorRates::ZERO)];
        assert!(matches!(
            schedule(&program(), &mut f, 1.0, 1.0),
            Err(Error::NoFittingQpu { .. })
        ));
    }

    #[test]
    fn fleet_round_trip() {
        let f = fleet([1, 2], [0.0, 0.1]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(load_fleet(&text).unwrap(), f);
    }
}
