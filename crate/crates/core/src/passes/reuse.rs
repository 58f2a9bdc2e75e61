//! Qubit reuse: let a later qubit run on the wire of a finished one.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ir::VirtualCircuit;

use super::PassConfig;

/// Reuse wires inside every fragment wider than `cfg.max_fragment_size`
/// until it fits. Fails if a fragment stays too wide.
pub fn reuse_qubits(vc: &VirtualCircuit, cfg: &PassConfig) -> Result<VirtualCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = vc.clone();
    for f in 0..out.fragments().len() {
        while out.fragment_width(f) > cfg.max_fragment_size {
            let candidates: Vec<(usize, usize)> = out
                .reuse_candidates()
                .into_iter()
                .filter(|&(i, _)| out.position(i).fragment == f)
                .collect();
            let Some(&(i, j)) = candidates.choose(&mut rng) else {
                return Err(Error::WidthUnreachable {
                    fragment: f,
                    width: out.fragment_width(f),
                    max: cfg.max_fragment_size,
                });
            };
            out.reuse(i, j)?;
        }
    }
    Ok(out)
}
