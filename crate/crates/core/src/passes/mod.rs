//! Optimization passes over a [`VirtualCircuit`] and the pipeline that runs
//! them under a shared virtualization budget.

mod cut;
mod dependency;
mod reuse;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ir::VirtualCircuit;

pub use cut::{
    bisect_kl, cut_exact, cut_greedy_kl, partition_exact, partition_kl, CutSolution, WeightedGraph,
    EXACT_CUT_LIMIT,
};
pub use dependency::{
    best_dependency_subset, reduce_dependencies_exact, reduce_dependencies_greedy, EXACT_GATE_LIMIT,
};
pub use reuse::reuse_qubits;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassConfig {
    /// Largest fragment width allowed.
    pub max_fragment_size: usize,
    /// Gates that may still be virtualized.
    pub budget: usize,
    pub seed: u64,
    /// Use the exhaustive variants.
    pub exact: bool,
}

impl PassConfig {
    pub fn new(max_fragment_size: usize, budget: usize) -> Self {
        Self {
            max_fragment_size,
            budget,
            seed: 0,
            exact: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_exact(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_fragment_size == 0 {
            return Err(Error::InvalidConfig(
                "max fragment size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A transformation of a virtual circuit. Custom passes can be added to a
/// [`Pipeline`] next to the built-in ones.
pub trait Pass: Send + Sync {
    fn name(&self) -> &str;
    fn run(&self, vc: &VirtualCircuit, cfg: &PassConfig) -> Result<VirtualCircuit>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PassKind {
    /// Circuit cutter.
    Cc,
    /// Dependency reducer.
    Dr,
    /// Qubit reuser.
    Qr,
}

impl PassKind {
    pub const STANDARD: [PassKind; 3] = [PassKind::Cc, PassKind::Dr, PassKind::Qr];

    pub fn name(self) -> &'static str {
        match self {
            PassKind::Cc => "cc",
            PassKind::Dr => "dr",
            PassKind::Qr => "qr",
        }
    }

    /// Parse a comma separated list such as `cc,dr,qr`.
    pub fn parse_list(s: &str) -> Result<Vec<PassKind>> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for PassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cc" => Ok(PassKind::Cc),
            "dr" => Ok(PassKind::Dr),
            "qr" => Ok(PassKind::Qr),
            other => Err(Error::InvalidConfig(format!("unknown pass `{other}`"))),
        }
    }
}

impl Pass for PassKind {
    fn name(&self) -> &str {
        PassKind::name(*self)
    }

    fn run(&self, vc: &VirtualCircuit, cfg: &PassConfig) -> Result<VirtualCircuit> {
        match (self, cfg.exact) {
            (PassKind::Cc, true) => cut_exact(vc, cfg),
            (PassKind::Cc, false) => cut_greedy_kl(vc, cfg),
            (PassKind::Dr, true) => reduce_dependencies_exact(vc, cfg),
            (PassKind::Dr, false) => reduce_dependencies_greedy(vc, cfg),
            (PassKind::Qr, _) => reuse_qubits(vc, cfg),
        }
    }
}

/// One executed pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassRecord {
    pub pass: String,
    pub virtualized: usize,
    pub budget_left: usize,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub circuit: VirtualCircuit,
    pub records: Vec<PassRecord>,
}

/// Ordered passes sharing one budget: every pass receives what the previous
/// ones left over.
pub struct Pipeline {
    passes: Vec<Box<dyn Pass>>,
}

impl Default for Pipeline {
    fn default() -> Self {
        Self::from_kinds(&PassKind::STANDARD)
    }
}

impl Pipeline {
    pub fn empty() -> Self {
        Self { passes: Vec::new() }
    }

    pub fn from_kinds(kinds: &[PassKind]) -> Self {
        Self {
            passes: kinds
                .iter()
                .map(|k| Box::new(*k) as Box<dyn Pass>)
                .collect(),
        }
    }

    pub fn with_pass(mut self, pass: impl Pass + 'static) -> Self {
        self.passes.push(Box::new(pass));
        self
    }

    pub fn names(&self) -> Vec<String> {
        self.passes.iter().map(|p| p.name().to_string()).collect()
    }

    pub fn run(&self, vc: &VirtualCircuit, cfg: &PassConfig) -> Result<PipelineOutput> {
        cfg.validate()?;
        let mut circuit = vc.clone();
        let mut budget = cfg.budget;
        let mut records = Vec::with_capacity(self.passes.len());
        for pass in &self.passes {
            let step_cfg = PassConfig {
                budget,
                ..cfg.clone()
            };
            let before = circuit.virtual_gates().len();
            let next = pass.run(&circuit, &step_cfg)?;
            let virtualized = next.virtual_gates().len() - before;
            if virtualized > budget {
                return Err(Error::InvalidConfig(format!(
                    "pass `{}` virtualized {virtualized} gates with a budget of {budget}",
                    pass.name()
                )));
            }
            budget -= virtualized;
            circuit = next;
            records.push(PassRecord {
                pass: pass.name().to_string(),
                virtualized,
                budget_left: budget,
            });
        }
        Ok(PipelineOutput { circuit, records })
    }
}

/// The standard cut, dependency-reduction, reuse sequence.
pub fn run_pipeline(vc: &VirtualCircuit, cfg: &PassConfig) -> Result<VirtualCircuit> {
    Pipeline::default().run(vc, cfg).map(|o| o.circuit)
}
