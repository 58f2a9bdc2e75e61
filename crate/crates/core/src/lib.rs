//! Gate virtualization toolchain: parse a circuit, replace selected
//! two-qubit gates by sums of local instances, cut it into small fragments,
//! execute the fragment instances and knit the results back together.

#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod circuit;
pub mod codegen;
mod compile;
pub mod error;
pub mod ir;
pub mod passes;
pub mod qasm;
pub mod runtime;
pub mod sim;
pub mod transpile;

pub use circuit::{Circuit, GateKind, Instruction};
pub use codegen::CompiledProgram;
pub use compile::{compile, Compiled};
pub use error::{Error, Result};
pub use ir::{GateDecomposition, GateId, LocalAction, VirtualCircuit};
pub use passes::{PassConfig, PassKind, Pipeline};
pub use qasm::{emit_qasm, parse_qasm};
pub use sim::{run_exact, run_sampled, ShotCounts, SignedDistribution};
