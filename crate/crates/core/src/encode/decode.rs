//! Mapping measured basis states back to structured solutions.

use serde::{Deserialize, Serialize};

use super::{cyclic_pairs, Encoding, ProblemInstance};
use crate::error::{Error, Result};
use crate::model::Assignment;

/// One vehicle route: the depot that opens it and the customers it serves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub depot: usize,
    pub customers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionStructure {
    Tour(Vec<usize>),
    Routes(Vec<Route>),
    Labels(Vec<usize>),
    Order(Vec<usize>),
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedSolution {
    pub feasible: bool,
    /// Penalty-free cost (cut size for Max-K-Cut, monochromatic edge count
    /// for coloring); `None` when the state does not decode.
    pub true_objective: Option<f64>,
    pub structure: SolutionStructure,
    /// Coloring only: no monochromatic edge.
    pub proper: Option<bool>,
    /// The d-ary assignment behind the solution, when one exists.
    pub native: Option<Assignment>,
}

impl DecodedSolution {
    fn infeasible(native: Option<Assignment>) -> Self {
        Self {
            feasible: false,
            true_objective: None,
            structure: SolutionStructure::Empty,
            proper: None,
            native,
        }
    }
}

/// Decodes a basis state of the given encoding.
pub fn decode(inst: &ProblemInstance, encoding: Encoding, a: &Assignment) -> Result<DecodedSolution> {
    match encoding {
        Encoding::Qudo => native_decode(inst, a),
        Encoding::Qubo => {
            let layout = inst.layout();
            if a.len() != layout.num_vars() || a.values().iter().any(|&b| b > 1) {
                return Err(Error::invalid(format!(
                    "expected a bitstring of length {}",
                    layout.num_vars()
                )));
            }
            let bits = a.values();
            let mut native = Vec::with_capacity(layout.sites);
            for site in 0..layout.sites {
                let mut hot = (0..layout.labels).filter(|&l| bits[layout.var(site, l)] == 1);
                match (hot.next(), hot.next()) {
                    (Some(l), None) => native.push(l),
                    _ => return Ok(DecodedSolution::infeasible(None)),
                }
            }
            native_decode(inst, &Assignment(native))
        }
    }
}

/// Decodes a d-ary assignment, checking the problem's constraints directly.
pub fn native_decode(inst: &ProblemInstance, a: &Assignment) -> Result<DecodedSolution> {
    let (sites, labels) = inst.qudo_shape();
    if a.len() != sites || a.values().iter().any(|&v| v >= labels) {
        return Err(Error::invalid(format!(
            "expected {sites} values in [0, {labels})"
        )));
    }
    let v = a.values();
    let n = inst.size();
    let feasible = match inst {
        ProblemInstance::Tsp { .. } | ProblemInstance::Scheduling { .. } => counts_ok(v, labels, |_| 1),
        ProblemInstance::Sdvrp { vehicles, .. } => {
            counts_ok(v, labels, |l| if l == 0 { *vehicles } else { 1 })
        }
        ProblemInstance::Mdvrp {
            vehicles_per_depot, ..
        } => {
            counts_ok(v, labels, |l| if l < n { 1 } else { vehicles_per_depot[l - n] })
                && cyclic_pairs(sites).all(|(j, k)| !(v[j] >= n && v[k] >= n))
        }
        ProblemInstance::MaxKCut { .. } | ProblemInstance::Coloring { .. } => true,
    };
    if !feasible {
        return Ok(DecodedSolution::infeasible(Some(a.clone())));
    }
    let objective = native_objective(inst, v);
    let structure = match inst {
        ProblemInstance::Tsp { .. } => SolutionStructure::Tour(v.to_vec()),
        ProblemInstance::Scheduling { .. } => SolutionStructure::Order(v.to_vec()),
        ProblemInstance::Sdvrp { .. } => SolutionStructure::Routes(split_routes(v, |l| l == 0)),
        ProblemInstance::Mdvrp { .. } => SolutionStructure::Routes(split_routes(v, |l| l >= n)),
        ProblemInstance::MaxKCut { .. } | ProblemInstance::Coloring { .. } => {
            SolutionStructure::Labels(v.to_vec())
        }
    };
    let proper = matches!(inst, ProblemInstance::Coloring { .. }).then_some(objective == 0.0);
    Ok(DecodedSolution {
        feasible: true,
        true_objective: Some(objective),
        structure,
        proper,
        native: Some(a.clone()),
    })
}

fn counts_ok(v: &[usize], labels: usize, want: impl Fn(usize) -> usize) -> bool {
    let mut counts = vec![0usize; labels];
    for &x in v {
        counts[x] += 1;
    }
    counts.iter().enumerate().all(|(l, &c)| c == want(l))
}

/// Rotates the cyclic sequence to its first depot and cuts at every depot.
fn split_routes(v: &[usize], is_depot: impl Fn(usize) -> bool) -> Vec<Route> {
    let Some(start) = v.iter().position(|&l| is_depot(l)) else {
        return Vec::new();
    };
    let mut routes: Vec<Route> = Vec::new();
    for i in 0..v.len() {
        let l = v[(start + i) % v.len()];
        if is_depot(l) {
            routes.push(Route {
                depot: l,
                customers: Vec::new(),
            });
        } else if let Some(r) = routes.last_mut() {
            r.customers.push(l);
        }
    }
    routes
}

/// Penalty-free objective of a d-ary assignment (no feasibility check).
pub fn native_objective(inst: &ProblemInstance, v: &[usize]) -> f64 {
    match inst {
        ProblemInstance::Tsp { distances }
        | ProblemInstance::Sdvrp { distances, .. }
        | ProblemInstance::Mdvrp { distances, .. } => cyclic_pairs(v.len())
            .map(|(j, k)| distances[v[j]][v[k]])
            .sum(),
        ProblemInstance::MaxKCut { edges, .. } => {
            edges.iter().filter(|&&(a, b)| v[a] != v[b]).count() as f64
        }
        ProblemInstance::Coloring { edges, .. } => {
            edges.iter().filter(|&&(a, b)| v[a] == v[b]).count() as f64
        }
        ProblemInstance::Scheduling {
            processing,
            weights,
        } => v
            .iter()
            .enumerate()
            .map(|(pos, &job)| weights[job] * processing[job] * (pos + 1) as f64)
            .sum(),
    }
}
