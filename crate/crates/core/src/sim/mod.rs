//! Statevector execution of fragment circuits.
//!
//! [`run_exact`] branches over every mid-circuit measurement and reset and
//! returns the signed outcome distribution; [`run_sampled`] draws shots from
//! the same outcome law with a seeded generator.

pub mod choi;
mod statevector;

use std::collections::{BTreeMap, HashMap};

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};

pub use statevector::{single_qubit_matrix, two_qubit_matrix, Matrix2, StateVector};

/// Largest circuit the statevector engine accepts.
pub const MAX_QUBITS: usize = 26;

/// Entries below this magnitude are dropped from simulator outputs.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// Branches whose probability falls below this are not explored.
const BRANCH_EPS: f64 = 1e-15;

/// Above this many mid-circuit measurements/resets, sampling switches from
/// outcome enumeration to per-shot trajectories.
const MAX_ENUMERATED_BRANCH_POINTS: usize = 16;

/// Render `bits` as a `width`-character string, bit 0 rightmost.
pub fn format_bits(bits: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bits(s: &str) -> Option<u64> {
    if s.len() > 64 {
        return None;
    }
    s.chars().try_fold(0u64, |acc, ch| match ch {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

/// Sparse map from outcome bitstrings to signed weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignedDistribution {
    pub num_bits: usize,
    pub entries: HashMap<u64, f64>,
}

impl SignedDistribution {
    pub fn new(num_bits: usize) -> Self {
        Self {
            num_bits,
            entries: HashMap::new(),
        }
    }

    pub fn from_pairs(num_bits: usize, pairs: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let mut d = Self::new(num_bits);
        for (k, v) in pairs {
            d.add(k, v);
        }
        d
    }

    pub fn get(&self, bits: u64) -> f64 {
        self.entries.get(&bits).copied().unwrap_or(0.0)
    }

    pub fn add(&mut self, bits: u64, value: f64) {
        *self.entries.entry(bits).or_insert(0.0) += value;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.sorted().iter().map(|(_, v)| v).sum()
    }

    /// Entries in ascending bitstring order.
    pub fn sorted(&self) -> Vec<(u64, f64)> {
        let mut v: Vec<(u64, f64)> = self.entries.iter().map(|(&k, &v)| (k, v)).collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }

    pub fn prune(&mut self, tol: f64) {
        self.entries.retain(|_, v| v.abs() >= tol);
    }

    pub fn l_inf_distance(&self, other: &SignedDistribution) -> f64 {
        self.keys_union(other)
            .into_iter()
            .map(|k| (self.get(k) - other.get(k)).abs())
            .fold(0.0, f64::max)
    }

    pub fn l1_distance(&self, other: &SignedDistribution) -> f64 {
        self.keys_union(other)
            .into_iter()
            .map(|k| (self.get(k) - other.get(k)).abs())
            .sum()
    }

    pub fn total_variation(&self, other: &SignedDistribution) -> f64 {
        0.5 * self.l1_distance(other)
    }

    fn keys_union(&self, other: &SignedDistribution) -> Vec<u64> {
        let mut keys: Vec<u64> = self
            .entries
            .keys()
            .chain(other.entries.keys())
            .copied()
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    }

    /// Clip negative weights to zero and renormalise.
    pub fn clipped(&self) -> SignedDistribution {
        let positive: Vec<(u64, f64)> = self.sorted().into_iter().filter(|e| e.1 > 0.0).collect();
        let total: f64 = positive.iter().map(|e| e.1).sum();
        let mut d = SignedDistribution::new(self.num_bits);
        if total > 0.0 {
            for (k, v) in positive {
                d.add(k, v / total);
            }
        }
        d
    }

    /// Marginal over the selected bit positions (in the given order).
    pub fn marginal(&self, bits: &[usize]) -> SignedDistribution {
        let mut d = SignedDistribution::new(bits.len());
        for (k, v) in self.sorted() {
            let key = bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | ((k >> b & 1) << i));
            d.add(key, v);
        }
        d
    }
}

impl Serialize for SignedDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = self
            .sorted()
            .into_iter()
            .map(|(k, v)| (format_bits(k, self.num_bits), v))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, f64>::deserialize(d)?;
        let num_bits = map.keys().map(String::len).max().unwrap_or(0);
        let mut out = SignedDistribution::new(num_bits);
        for (k, v) in map {
            let bits = parse_bits(&k)
                .ok_or_else(|| serde::de::Error::custom(format!("bad bitstring `{k}`")))?;
            out.add(bits, v);
        }
        Ok(out)
    }
}

/// Shot histogram of a sampled run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotCounts {
    pub shots: u64,
    pub num_bits: usize,
    pub counts: BTreeMap<u64, u64>,
    /// Counts weighted by each shot's measurement sign.
    pub signed_sum: BTreeMap<u64, i64>,
}

impl ShotCounts {
    /// Empirical signed distribution `signed_sum / shots`.
    pub fn to_distribution(&self) -> SignedDistribution {
        let mut d = SignedDistribution::new(self.num_bits);
        for (&k, &v) in &self.signed_sum {
            if v != 0 {
                d.add(k, v as f64 / self.shots as f64);
            }
        }
        d
    }
}

/// One leaf of the measurement tree: classical bits, sign parity, probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub bits: u64,
    pub negative: bool,
    pub prob: f64,
}

fn check_limits(c: &Circuit) -> Result<()> {
    if c.num_qubits > MAX_QUBITS {
        return Err(Error::QubitLimit {
            qubits: c.num_qubits,
            limit: MAX_QUBITS,
        });
    }
    if c.num_output_bits() > 64 {
        return Err(Error::InvalidInstruction(format!(
            "{} output bits exceed the 64-bit outcome key",
            c.num_output_bits()
        )));
    }
    c.validate()
}

/// Index of the first instruction of the terminal block made only of
/// recorded measurements and barriers.
fn terminal_start(c: &Circuit) -> usize {
    let mut start = c.instructions.len();
    while start > 0 {
        let inst = &c.instructions[start - 1];
        let terminal = match inst.kind {
            GateKind::Barrier => true,
            GateKind::Measure => inst.clbit.is_some(),
            _ => false,
        };
        if !terminal {
            break;
        }
        start -= 1;
    }
    start
}

struct Walker<'a> {
    circuit: &'a Circuit,
    prefix_end: usize,
    terminal: Vec<(usize, usize)>,
    leaves: HashMap<(u64, bool), f64>,
}

impl Walker<'_> {
    fn walk(
        &mut self,
        mut at: usize,
        mut state: StateVector,
        bits: u64,
        negative: bool,
        prob: f64,
    ) {
        while at < self.prefix_end {
            let inst = &self.circuit.instructions[at];
            match inst.kind {
                GateKind::Measure | GateKind::Reset => {
                    let q = inst.qubits[0];
                    let p1 = state.prob_one(q).clamp(0.0, 1.0);
                    let branches = [(false, 1.0 - p1), (true, p1)];
                    let live: Vec<(bool, f64)> =
                        branches.into_iter().filter(|b| b.1 > BRANCH_EPS).collect();
                    for (n, &(outcome, p)) in live.iter().enumerate() {
                        let mut s = if n + 1 == live.len() {
                            std::mem::replace(&mut state, StateVector::zero(0))
                        } else {
                            state.clone()
                        };
                        s.collapse(q, outcome, p);
                        let (mut b, mut neg) = (bits, negative);
                        if inst.kind == GateKind::Reset {
                            if outcome {
                                s.flip(q);
                            }
                        } else if let Some(cb) = inst.clbit {
                            b = (b & !(1u64 << cb)) | (u64::from(outcome) << cb);
                        } else {
                            neg ^= outcome;
                        }
                        self.walk(at + 1, s, b, neg, prob * p);
                    }
                    return;
                }
                GateKind::Barrier => {}
                _ => state.apply(inst),
            }
            at += 1;
        }
        let implicit = self.circuit.num_clbits == 0;
        for (i, a) in state.amplitudes().iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let key = if implicit {
                i as u64
            } else {
                self.terminal.iter().fold(bits, |acc, &(q, cb)| {
                    (acc & !(1u64 << cb)) | (((i >> q) & 1) as u64) << cb
                })
            };
            *self.leaves.entry((key, negative)).or_insert(0.0) += p * prob;
        }
    }
}

/// Enumerate the measurement tree of `c`, merging leaves with equal bits and
/// sign. Leaves are returned sorted by `(bits, negative)`.
pub fn outcomes(c: &Circuit) -> Result<Vec<Outcome>> {
    check_limits(c)?;
    let prefix_end = terminal_start(c);
    let terminal = c.instructions[prefix_end..]
        .iter()
        .filter(|i| i.kind == GateKind::Measure)
        .map(|i| (i.qubits[0], i.clbit.unwrap_or(0)))
        .collect();
    let mut w = Walker {
        circuit: c,
        prefix_end,
        terminal,
        leaves: HashMap::new(),
    };
    w.walk(0, StateVector::zero(c.num_qubits), 0, false, 1.0);
    let mut out: Vec<Outcome> = w
        .leaves
        .into_iter()
        .map(|((bits, negative), prob)| Outcome {
            bits,
            negative,
            prob,
        })
        .collect();
    out.sort_unstable_by_key(|o| (o.bits, o.negative));
    Ok(out)
}

/// Exact signed outcome distribution of `c`.
pub fn run_exact(c: &Circuit) -> Result<SignedDistribution> {
    let mut d = SignedDistribution::new(c.num_output_bits());
    for o in outcomes(c)? {
        d.add(o.bits, if o.negative { -o.prob } else { o.prob });
    }
    d.prune(DROP_TOLERANCE);
    Ok(d)
}

fn branch_points(c: &Circuit) -> usize {
    c.instructions[..terminal_start(c)]
        .iter()
        .filter(|i| matches!(i.kind, GateKind::Measure | GateKind::Reset))
        .count()
}

/// Seeded shot sampling. Mid-circuit measurements collapse the state per
/// outcome; each shot's sign is the parity of its signed outcomes.
pub fn run_sampled(c: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    check_limits(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    let mut signed_sum = BTreeMap::new();
    let mut record = |bits: u64, negative: bool| {
        *counts.entry(bits).or_insert(0u64) += 1;
        *signed_sum.entry(bits).or_insert(0i64) += if negative { -1 } else { 1 };
    };
    if branch_points(c) <= MAX_ENUMERATED_BRANCH_POINTS {
        let leaves = outcomes(c)?;
        let dist = WeightedIndex::new(leaves.iter().map(|o| o.prob))
            .map_err(|e| Error::NotADistribution(e.to_string()))?;
        for _ in 0..shots {
            let o = leaves[dist.sample(&mut rng)];
            record(o.bits, o.negative);
        }
    } else {
        for _ in 0..shots {
            let (bits, negative) = trajectory(c, &mut rng);
            record(bits, negative);
        }
    }
    Ok(ShotCounts {
        shots,
        num_bits: c.num_output_bits(),
        counts,
        signed_sum,
    })
}

fn trajectory(c: &Circuit, rng: &mut impl Rng) -> (u64, bool) {
    let mut state = StateVector::zero(c.num_qubits);
    let (mut bits, mut negative) = (0u64, false);
    for inst in &c.instructions {
        match inst.kind {
            GateKind::Measure | GateKind::Reset => {
                let q = inst.qubits[0];
                let p1 = state.prob_one(q).clamp(0.0, 1.0);
                let outcome = rng.gen::<f64>() < p1;
                state.collapse(q, outcome, if outcome { p1 } else { 1.0 - p1 });
                if inst.kind == GateKind::Reset {
                    if outcome {
                        state.flip(q);
                    }
                } else if let Some(cb) = inst.clbit {
                    bits = (bits & !(1u64 << cb)) | (u64::from(outcome) << cb);
                } else {
                    negative ^= outcome;
                }
            }
            GateKind::Barrier => {}
            _ => state.apply(inst),
        }
    }
    if c.num_clbits == 0 {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let amps = state.amplitudes();
        let mut pick = amps.len() - 1;
        for (i, a) in amps.iter().enumerate() {
            acc += a.norm_sqr();
            if r < acc {
                pick = i;
                break;
            }
        }
        bits = pick as u64;
    }
    (bits, negative)
}

/// Final statevector of a purely unitary circuit (barriers ignored).
pub fn final_state(c: &Circuit) -> Result<StateVector> {
    check_limits(c)?;
    let mut s = StateVector::zero(c.num_qubits);
    for inst in &c.instructions {
        if inst.kind.is_unitary() {
            s.apply(inst);
        } else if inst.kind != GateKind::Barrier {
            return Err(Error::InvalidInstruction(format!(
                "`{}` is not unitary",
                inst.kind
            )));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2);
        c.push(Instruction::h(0)).push(Instruction::cx(0, 1));
        c
    }

    #[test]
    fn bell_exact() {
        let d = run_exact(&bell()).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.get(0b00) - 0.5).abs() < 1e-12);
        assert!((d.get(0b11) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn signed_measurement_of_plus_cancels() {
        let mut c = Circuit::new(1);
        c.num_clbits = 1;
        c.push(Instruction::h(0))
            .push(Instruction::signed_measure(0));
        let leaves = outcomes(&c).unwrap();
        assert_eq!(leaves.len(), 2);
        assert!(leaves.iter().all(|o| (o.prob - 0.5).abs() < 1e-12));
        assert!(run_exact(&c).unwrap().total().abs() < 1e-12);
    }

    #[test]
    fn x_then_measure_is_deterministic() {
        let mut c = Circuit::new(1);
        c.num_clbits = 1;
        c.push(Instruction::x(0)).push(Instruction::measure(0, 0));
        let s = run_sampled(&c, 500, 3).unwrap();
        assert_eq!(s.counts.get(&1), Some(&500));
    }

    #[test]
    fn bell_sampled_within_five_sigma() {
        let shots = 20_000;
        let s = run_sampled(&bell(), shots, 11).unwrap();
        let f = s.counts.get(&0).copied().unwrap_or(0) as f64 / shots as f64;
        assert!((f - 0.5).abs() <= 0.02, "{f}");
        assert_eq!(s.counts.values().sum::<u64>(), shots);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let mut c = bell();
        c.push(Instruction::signed_measure(1))
            .push(Instruction::h(1));
        assert_eq!(
            run_sampled(&c, 1000, 5).unwrap(),
            run_sampled(&c, 1000, 5).unwrap()
        );
        assert_ne!(
            run_sampled(&c, 1000, 5).unwrap(),
            run_sampled(&c, 1000, 6).unwrap()
        );
    }

    #[test]
    fn reset_is_idempotent() {
        let mut once = Circuit::new(2);
        once.push(Instruction::h(0))
            .push(Instruction::cx(0, 1))
            .push(Instruction::reset(0));
        let mut twice = once.clone();
        twice.push(Instruction::reset(0));
        let (a, b) = (run_exact(&once).unwrap(), run_exact(&twice).unwrap());
        assert!(a.l_inf_distance(&b) < 1e-12);
        assert!((a.get(0b00) - 0.5).abs() < 1e-12 && (a.get(0b10) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn trajectories_match_enumeration_in_law() {
        // 17 mid-circuit measurements force the trajectory path.
        let mut c = Circuit::new(2);
        c.num_clbits = 2;
        for _ in 0..17 {
            c.push(Instruction::h(0))
                .push(Instruction::signed_measure(0));
        }
        c.push(Instruction::h(1))
            .push(Instruction::measure(0, 0))
            .push(Instruction::measure(1, 1));
        let exact = run_exact(&c).unwrap();
        let sampled = run_sampled(&c, 40_000, 1).unwrap().to_distribution();
        assert!(exact.l_inf_distance(&sampled) < 0.03);
    }

    #[test]
    fn qubit_limit_enforced() {
        let c = Circuit::new(MAX_QUBITS + 1);
        assert!(matches!(run_exact(&c), Err(Error::QubitLimit { .. })));
    }

    #[test]
    fn bitstrings_round_trip() {
        assert_eq!(format_bits(0b101, 4), "0101");
        assert_eq!(parse_bits("0101"), Some(0b101));
    }
}
