//! Reconstruction of the full distribution from fragment instance results.

use std::collections::HashMap;

use crate::codegen::CompiledProgram;
use crate::error::{Error, Result};
use crate::sim::SignedDistribution;

use super::FragmentResults;

/// Most global coefficients materialised at once.
pub const MAX_GLOBAL_INSTANCES: usize = 10_077_696; // 6^9

/// Final entries below this magnitude are dropped.
const KNIT_TOLERANCE: f64 = 1e-12;

/// Dense accumulation up to this many output bits.
const DENSE_BITS: usize = 20;

/// Tensor product of all per-gate coefficient vectors, last gate fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalCoefficients {
    num_gates: usize,
    values: Vec<f64>,
}

impl GlobalCoefficients {
    pub fn new(vectors: &[[f64; 6]]) -> Result<Self> {
        let size = 6usize
            .checked_pow(vectors.len() as u32)
            .filter(|&s| s <= MAX_GLOBAL_INSTANCES)
            .ok_or(Error::InstanceTooLarge {
                what: "global instances",
                size: usize::MAX,
                limit: MAX_GLOBAL_INSTANCES,
            })?;
        let mut values = Vec::with_capacity(size);
        values.push(1.0);
        for c in vectors {
            values = values
                .iter()
                .flat_map(|v| c.iter().map(move |x| v * x))
                .collect();
        }
        Ok(Self {
            num_gates: vectors.len(),
            values,
        })
    }

    pub fn num_gates(&self) -> usize {
        self.num_gates
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Per-gate digits of global index `i`.
    pub fn digits(&self, mut i: usize) -> Vec<usize> {
        let mut d = vec![0; self.num_gates];
        for slot in d.iter_mut().rev() {
            *slot = i % 6;
            i /= 6;
        }
        d
    }
}

enum Acc {
    Dense(Vec<f64>),
    Sparse(HashMap<u64, f64>),
}

impl Acc {
    fn new(bits: usize) -> Self {
        if bits <= DENSE_BITS {
            Acc::Dense(vec![0.0; 1 << bits])
        } else {
            Acc::Sparse(HashMap::new())
        }
    }

    fn add(&mut self, key: u64, v: f64) {
        match self {
            Acc::Dense(d) => d[key as usize] += v,
            Acc::Sparse(m) => *m.entry(key).or_insert(0.0) += v,
        }
    }

    fn merge(&mut self, other: Acc) {
        match (self, other) {
            (Acc::Dense(a), Acc::Dense(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            (Acc::Sparse(a), Acc::Sparse(b)) => {
                let mut keys: Vec<(u64, f64)> = b.into_iter().collect();
                keys.sort_unstable_by_key(|e| e.0);
                for (k, v) in keys {
                    *a.entry(k).or_insert(0.0) += v;
                }
            }
            _ => unreachable!("accumulators share one representation"),
        }
    }
}

/// Fragment results with keys moved to original qubit positions.
type Tables = Vec<Vec<Vec<(u64, f64)>>>;

fn scatter(program: &CompiledProgram, results: &FragmentResults) -> Tables {
    program
        .fragments
        .iter()
        .zip(&results.fragments)
        .map(|(f, dists)| {
            dists
                .iter()
                .map(|d| {
                    d.sorted()
                        .into_iter()
                        .map(|(k, v)| {
                            let key = f
                                .output_qubits
                                .iter()
                                .enumerate()
                                .fold(0u64, |acc, (c, &q)| acc | ((k >> c & 1) << q));
                            (key, v)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn expand(tables: &[&[(u64, f64)]], key: u64, weight: f64, acc: &mut Acc) {
    match tables.split_first() {
        None => acc.add(key, weight),
        Some((first, rest)) => {
            for &(k, v) in first.iter() {
                expand(rest, key | k, weight * v, acc);
            }
        }
    }
}

fn check_shapes(
    program: &CompiledProgram,
    results: &FragmentResults,
    coeffs: &GlobalCoefficients,
) -> Result<()> {
    if coeffs.num_gates() != program.gate_order.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} coefficient digits for {} virtual gates",
            coeffs.num_gates(),
            program.gate_order.len()
        )));
    }
    if results.fragments.len() != program.fragments.len() {
        return Err(Error::ShapeMismatch(format!(
            "results for {} fragments, program has {}",
            results.fragments.len(),
            program.fragments.len()
        )));
    }
    for (j, (f, r)) in program.fragments.iter().zip(&results.fragments).enumerate() {
        if u128::try_from(r.len()).ok() != Some(f.num_instances()) {
            return Err(Error::ShapeMismatch(format!(
                "fragment {j} has {} results for {} instances",
                r.len(),
                f.num_instances()
            )));
        }
        if f.gates.iter().any(|&g| g >= coeffs.num_gates()) {
            return Err(Error::ShapeMismatch(format!(
                "fragment {j} names an unknown gate"
            )));
        }
    }
    Ok(())
}

/// `sum_i C[i] * prod_j dist_j(i_j)` where `i_j` packs the digits of the gates
/// touching fragment `j`. The coefficient range is cut into `workers`
/// contiguous chunks summed independently, then merged in chunk order.
pub fn knit(
    program: &CompiledProgram,
    results: &FragmentResults,
    coeffs: &GlobalCoefficients,
    workers: usize,
) -> Result<SignedDistribution> {
    check_shapes(program, results, coeffs)?;
    let bits = program.num_qubits;
    let tables = scatter(program, results);
    let k = coeffs.num_gates();

    // touch[g] = (fragment, stride of g in that fragment's local index)
    let mut touch: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    for (j, f) in program.fragments.iter().enumerate() {
        let len = f.gates.len();
        for (pos, &g) in f.gates.iter().enumerate() {
            touch[g].push((j, 6usize.pow((len - 1 - pos) as u32)));
        }
    }

    let total = coeffs.len();
    let workers = workers.clamp(1, total);
    let chunk = total.div_ceil(workers);
    let run = |start: usize, end: usize| -> Acc {
        let mut acc = Acc::new(bits);
        let mut digits = coeffs.digits(start);
        let mut local = vec![0usize; tables.len()];
        for (g, &d) in digits.iter().enumerate() {
            for &(j, s) in &touch[g] {
                local[j] += d * s;
            }
        }
        let mut row: Vec<&[(u64, f64)]> = Vec::with_capacity(tables.len());
        for i in start..end {
            let c = coeffs.get(i);
            if c != 0.0 {
                row.clear();
                row.extend(tables.iter().zip(&local).map(|(t, &l)| t[l].as_slice()));
                expand(&row, 0, c, &mut acc);
            }
            for g in (0..k).rev() {
                digits[g] += 1;
                for &(j, s) in &touch[g] {
                    local[j] += s;
                }
                if digits[g] < 6 {
                    break;
                }
                digits[g] = 0;
                for &(j, s) in &touch[g] {
                    local[j] -= 6 * s;
                }
            }
        }
        acc
    };

    let parts: Vec<Acc> = if workers == 1 {
        vec![run(0, total)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let (start, end) = (w * chunk, ((w + 1) * chunk).min(total));
                    let run = &run;
                    scope.spawn(move || run(start, end))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("knit worker panicked"))
                .collect()
        })
    };
    let mut parts = parts.into_iter();
    let mut acc = parts.next().unwrap_or_else(|| Acc::new(bits));
    for p in parts {
        acc.merge(p);
    }
    let mut out = SignedDistribution::new(bits);
    match acc {
        Acc::Dense(d) => {
            for (key, v) in d.into_iter().enumerate() {
                if v.abs() >= KNIT_TOLERANCE {
                    out.add(key as u64, v);
                }
            }
        }
        Acc::Sparse(m) => {
            for (key, v) in m {
                if v.abs() >= KNIT_TOLERANCE {
                    out.add(key, v);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_are_tensor_products() {
        let a = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        let b = [1.0, -1.0, 2.0, -2.0, 3.0, -3.0];
        let c = GlobalCoefficients::new(&[a, b]).unwrap();
        assert_eq!(c.len(), 36);
        for i in 0..36 {
            let d = c.digits(i);
            assert_eq!(c.get(i), a[d[0]] * b[d[1]]);
        }
        assert_eq!(GlobalCoefficients::new(&[]).unwrap().values(), &[1.0]);
    }

    #[test]
    fn too_many_gates_are_refused() {
        assert!(GlobalCoefficients::new(&[[0.0; 6]; 10]).is_err());
    }
}
