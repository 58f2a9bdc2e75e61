//! One-call compilation from a circuit to an executable program.

use crate::circuit::Circuit;
use crate::codegen::{generate, peephole_optimize, CompiledProgram};
use crate::error::Result;
use crate::ir::VirtualCircuit;
use crate::passes::{PassConfig, PassKind, PassRecord, Pipeline};

#[derive(Debug, Clone)]
pub struct Compiled {
    pub virtual_circuit: VirtualCircuit,
    pub program: CompiledProgram,
    pub records: Vec<PassRecord>,
}

/// Lift `c`, run `passes` in order, extract the fragments and clean each
/// one with the peephole optimizer.
pub fn compile(c: &Circuit, passes: &[PassKind], cfg: &PassConfig) -> Result<Compiled> {
    let vc = VirtualCircuit::from_circuit(c)?;
    let out = Pipeline::from_kinds(passes).run(&vc, cfg)?;
    let mut program = generate(&out.circuit);
    for f in &mut program.fragments {
        *f = peephole_optimize(f);
    }
    Ok(Compiled {
        virtual_circuit: out.circuit,
        program,
        records: out.records,
    })
}
