//! Exhaustive classical ground truth.
//!
//! Enumeration runs over the native solution space (permutations, labeled
//! sequences with depot placements, labelings), never over the encoded
//! Hilbert space.

use serde::{Deserialize, Serialize};

use crate::encode::{native_objective, Encoding, ProblemInstance, Sense};
use crate::error::{Error, Result};
use crate::model::{assignment_to_index, Assignment, MemoryBudget};

/// Absolute tolerance for comparing objective values with the optimum.
pub const OPTIMUM_TOLERANCE: f64 = 1e-9;

/// Largest permutation length enumerated for TSP, scheduling and VRPs.
pub const MAX_SEQUENCE_LEN: usize = 9;
/// Largest labeling count `K^N` enumerated for cut and coloring.
pub const MAX_LABELINGS: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub optimal_value: f64,
    /// Every optimal native assignment, symmetric copies included.
    pub optimizers: Vec<Assignment>,
    pub sense: Sense,
}

impl ExactResult {
    pub fn is_optimal(&self, value: f64) -> bool {
        (value - self.optimal_value).abs() <= OPTIMUM_TOLERANCE
    }
}

/// Per-label multiplicities of a feasible native sequence, or `None` for
/// problems whose native space is a free labeling.
fn label_counts(inst: &ProblemInstance) -> Option<Vec<usize>> {
    let n = inst.size();
    match inst {
        ProblemInstance::Tsp { .. } | ProblemInstance::Scheduling { .. } => Some(vec![1; n]),
        ProblemInstance::Sdvrp { vehicles, .. } => {
            let mut c = vec![1; n + 1];
            c[0] = *vehicles;
            Some(c)
        }
        ProblemInstance::Mdvrp {
            vehicles_per_depot, ..
        } => {
            let mut c = vec![1; n];
            c.extend_from_slice(vehicles_per_depot);
            Some(c)
        }
        ProblemInstance::MaxKCut { .. } | ProblemInstance::Coloring { .. } => None,
    }
}

/// Calls `f` on every feasible native assignment in increasing
/// mixed-radix order.
fn for_each_feasible(inst: &ProblemInstance, mut f: impl FnMut(&[usize])) {
    let (sites, labels) = inst.qudo_shape();
    match label_counts(inst) {
        Some(mut counts) => {
            let n = inst.size();
            // Only MDVRP forbids two depots in cyclically adjacent positions.
            let is_separator = |l: usize| matches!(inst, ProblemInstance::Mdvrp { .. }) && l >= n;
            let mut seq = Vec::with_capacity(sites);
            multiset_sequences(&mut counts, &mut seq, sites, &is_separator, &mut f);
        }
        None => {
            let mut v = vec![0usize; sites];
            loop {
                f(&v);
                // odometer, last site fastest
                let mut i = sites;
                loop {
                    if i == 0 {
                        return;
                    }
                    i -= 1;
                    v[i] += 1;
                    if v[i] < labels {
                        break;
                    }
                    v[i] = 0;
                }
            }
        }
    }
}

fn multiset_sequences(
    counts: &mut [usize],
    seq: &mut Vec<usize>,
    len: usize,
    separator: &dyn Fn(usize) -> bool,
    f: &mut dyn FnMut(&[usize]),
) {
    if seq.len() == len {
        if !(separator(seq[0]) && separator(seq[len - 1])) {
            f(seq);
        }
        return;
    }
    for label in 0..counts.len() {
        if counts[label] == 0 {
            continue;
        }
        if separator(label) && seq.last().is_some_and(|&p| separator(p)) {
            continue;
        }
        counts[label] -= 1;
        seq.push(label);
        multiset_sequences(counts, seq, len, separator, f);
        seq.pop();
        counts[label] += 1;
    }
}

fn check_caps(inst: &ProblemInstance) -> Result<()> {
    let (sites, labels) = inst.qudo_shape();
    match label_counts(inst) {
        Some(_) if sites > MAX_SEQUENCE_LEN => Err(Error::ResourceLimit {
            what: "brute-force sequence length",
            required: sites as u128,
            budget: MAX_SEQUENCE_LEN,
        }),
        None => {
            let count = crate::model::hilbert_dim(sites, labels).unwrap_or(u128::MAX);
            if count > MAX_LABELINGS {
                Err(Error::ResourceLimit {
                    what: "brute-force labelings",
                    required: count,
                    budget: MAX_LABELINGS as usize,
                })
            } else {
                Ok(())
            }
        }
        Some(_) => Ok(()),
    }
}

/// Exact optimum of the penalty-free objective by exhaustive enumeration.
pub fn brute_force_optimum(inst: &ProblemInstance) -> Result<ExactResult> {
    inst.validate()?;
    check_caps(inst)?;
    let sense = inst.sense();
    let mut best: Option<f64> = None;
    let mut optimizers: Vec<Assignment> = Vec::new();
    for_each_feasible(inst, |v| {
        let value = native_objective(inst, v);
        match best {
            Some(b) if (value - b).abs() <= OPTIMUM_TOLERANCE => optimizers.push(Assignment(v.to_vec())),
            Some(b) if !sense.better(value, b) => {}
            _ => {
                best = Some(value);
                optimizers.clear();
                optimizers.push(Assignment(v.to_vec()));
            }
        }
    });
    let optimal_value = best.ok_or_else(|| Error::invalid("instance has no feasible solution"))?;
    Ok(ExactResult {
        optimal_value,
        optimizers,
        sense,
    })
}

/// Sorted basis indices of the register whose decoding is feasible.
pub fn enumerate_feasible(inst: &ProblemInstance, encoding: Encoding, budget: MemoryBudget) -> Result<Vec<usize>> {
    Ok(feasible_states(inst, encoding, budget)?
        .into_iter()
        .map(|(z, _)| z)
        .collect())
}

/// Feasible basis indices paired with their native assignments, sorted by
/// index.
pub fn feasible_states(
    inst: &ProblemInstance,
    encoding: Encoding,
    budget: MemoryBudget,
) -> Result<Vec<(usize, Assignment)>> {
    inst.validate()?;
    let (sites, dim) = inst.register_shape(encoding);
    budget.check(sites, dim, "feasible-set enumeration")?;
    let labels = inst.qudo_shape().1;
    let layout = inst.layout();
    let mut out = Vec::new();
    let mut failure = None;
    for_each_feasible(inst, |v| {
        let idx = match encoding {
            Encoding::Qudo => assignment_to_index(&Assignment(v.to_vec()), labels),
            Encoding::Qubo => assignment_to_index(&Assignment(layout.one_hot(v)), 2),
        };
        match idx {
            Ok(z) => out.push((z, Assignment(v.to_vec()))),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    out.sort_unstable_by_key(|(z, _)| *z);
    Ok(out)
}

/// `found / optimum`; `None` when the optimum is zero, except that a zero
/// found at a zero optimum counts as exact (ratio 1).
pub fn approximation_ratio(found: f64, exact: &ExactResult) -> Option<f64> {
    if exact.optimal_value.abs() <= OPTIMUM_TOLERANCE {
        return (found.abs() <= OPTIMUM_TOLERANCE).then_some(1.0);
    }
    Some(found / exact.optimal_value)
}
