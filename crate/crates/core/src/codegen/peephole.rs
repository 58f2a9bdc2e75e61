//! Cancellation of adjacent self-inverse gates and merging of rotations.

use std::f64::consts::TAU;

use crate::circuit::{GateKind, Instruction};

use super::ParamCircuit;

const ZERO_ANGLE: f64 = 1e-12;

fn self_inverse(kind: GateKind) -> bool {
    matches!(
        kind,
        GateKind::H | GateKind::X | GateKind::Y | GateKind::Z | GateKind::Cx | GateKind::Cz
    )
}

fn rotation(kind: GateKind) -> bool {
    matches!(
        kind,
        GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rzz
    )
}

fn symmetric(kind: GateKind) -> bool {
    matches!(kind, GateKind::Cz | GateKind::Rzz)
}

fn same_operands(a: &Instruction, b: &Instruction) -> bool {
    a.kind == b.kind
        && (a.qubits == b.qubits
            || (symmetric(a.kind)
                && a.qubits.len() == 2
                && a.qubits[0] == b.qubits[1]
                && a.qubits[1] == b.qubits[0]))
}

fn is_zero_angle(t: f64) -> bool {
    let r = t.rem_euclid(TAU);
    r < ZERO_ANGLE || TAU - r < ZERO_ANGLE
}

/// Cancel adjacent self-inverse pairs and merge consecutive rotations about
/// the same axis. Placeholders, measurements, resets and barriers are never
/// moved or crossed. Equivalent up to global phase for every instantiation.
pub fn peephole_optimize(pc: &ParamCircuit) -> ParamCircuit {
    let c = &pc.circuit;
    let mut out: Vec<Option<Instruction>> = Vec::with_capacity(c.instructions.len());
    let mut new_index: Vec<usize> = Vec::with_capacity(c.instructions.len());
    let mut top: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits];

    for inst in &c.instructions {
        new_index.push(out.len());
        let shared = {
            let first = top[inst.qubits[0]].last().copied();
            first.filter(|p| inst.qubits.iter().all(|&q| top[q].last() == Some(p)))
        };
        let prev = shared.and_then(|p| out[p].as_ref().map(|i| (p, i)));
        if let Some((p, prev)) = prev {
            if same_operands(prev, inst) && prev.qubits.len() == inst.qubits.len() {
                if self_inverse(inst.kind) {
                    out[p] = None;
                    for &q in &inst.qubits {
                        top[q].pop();
                    }
                    continue;
                }
                if rotation(inst.kind) {
                    let angle = prev.angle.unwrap_or(0.0) + inst.angle.unwrap_or(0.0);
                    if is_zero_angle(angle) {
                        out[p] = None;
                        for &q in &inst.qubits {
                            top[q].pop();
                        }
                    } else if let Some(i) = out[p].as_mut() {
                        i.angle = Some(angle);
                    }
                    continue;
                }
            }
        }
        if rotation(inst.kind) && inst.angle.is_some_and(is_zero_angle) {
            continue;
        }
        for &q in &inst.qubits {
            top[q].push(out.len());
        }
        out.push(Some(inst.clone()));
    }

    let mut compact = vec![0usize; out.len() + 1];
    let mut kept = Vec::with_capacity(out.len());
    for (i, inst) in out.into_iter().enumerate() {
        compact[i] = kept.len();
        if let Some(inst) = inst {
            kept.push(inst);
        }
    }
    let mut result = pc.clone();
    result.circuit.instructions = kept;
    for p in &mut result.placeholders {
        p.position = compact[new_index[p.position]];
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;

    fn wrap(c: Circuit) -> ParamCircuit {
        ParamCircuit {
            circuit: c,
            output_qubits: vec![],
            placeholders: vec![],
            param_vectors: vec![],
            gates: vec![],
        }
    }

    #[test]
    fn hadamards_cancel() {
        let mut c = Circuit::new(1);
        c.push(Instruction::h(0)).push(Instruction::h(0));
        assert!(peephole_optimize(&wrap(c)).circuit.is_empty());
    }

    #[test]
    fn rotations_merge() {
        let mut c = Circuit::new(1);
        c.push(Instruction::rz(0, 0.25))
            .push(Instruction::rz(0, 0.5));
        let out = peephole_optimize(&wrap(c)).circuit;
        assert_eq!(out.instructions, vec![Instruction::rz(0, 0.75)]);
    }

    #[test]
    fn nested_pairs_cancel() {
        let mut c = Circuit::new(2);
        c.push(Instruction::h(0))
            .push(Instruction::cx(0, 1))
            .push(Instruction::cx(0, 1))
            .push(Instruction::h(0))
            .push(Instruction::cz(1, 0))
            .push(Instruction::cz(0, 1));
        assert!(peephole_optimize(&wrap(c)).circuit.is_empty());
    }

    #[test]
    fn reversed_cx_does_not_cancel() {
        let mut c = Circuit::new(2);
        c.push(Instruction::cx(0, 1)).push(Instruction::cx(1, 0));
        assert_eq!(peephole_optimize(&wrap(c)).circuit.len(), 2);
    }

    #[test]
    fn barriers_block_and_positions_follow() {
        let mut c = Circuit::new(1);
        c.push(Instruction::x(0))
            .push(Instruction::x(0))
            .push(Instruction::h(0))
            .push(Instruction::barrier(&[0]))
            .push(Instruction::h(0));
        let mut pc = wrap(c);
        pc.placeholders.push(super::super::Placeholder {
            position: 3,
            gate: 0,
            side: super::super::Side::A,
            wire: 0,
        });
        let out = peephole_optimize(&pc);
        assert_eq!(out.circuit.len(), 3);
        assert_eq!(out.placeholders[0].position, 1);
    }
}
