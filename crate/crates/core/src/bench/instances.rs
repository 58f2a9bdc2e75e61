//! Small hand-built instances with known optimal pass outcomes.

use crate::circuit::{Circuit, Instruction};

/// Two triangles `{0,1,2}` and `{3,4,5}` with two CX per triangle edge,
/// joined by the single-gate edges `(2,3)` and `(5,0)`. The best balanced
/// three-qubit cut separates the triangles at weight 2.
pub fn two_cluster_example() -> Circuit {
    let mut c = Circuit::new(6).with_name("two_cluster");
    for q in 0..6 {
        c.push(Instruction::h(q));
    }
    for base in [0, 3] {
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            c.push(Instruction::cx(base + a, base + b));
            c.push(Instruction::rz(base + b, 0.3));
            c.push(Instruction::cx(base + a, base + b));
        }
    }
    c.push(Instruction::cx(2, 3)).push(Instruction::cx(5, 0));
    c
}

/// Four qubits with two-qubit gates on `(2,3) (1,2) (0,3) (0,1) (0,2) (0,3)`
/// in program order. The `(0,1)` gate is the unique most expensive one,
/// with three ancestors and two descendants.
pub fn dependency_example() -> Circuit {
    let mut c = Circuit::new(4).with_name("dependency");
    for (a, b) in [(2, 3), (1, 2), (0, 3), (0, 1), (0, 2), (0, 3)] {
        c.push(Instruction::cx(a, b));
    }
    c
}
