//! d-ary (QUDO) Hamiltonians: one site per position or vertex, with
//! collision penalties in place of one-hot constraints.

use super::{cyclic_pairs, Encoding, PenaltyWeights, ProblemInstance};
use crate::error::Result;
use crate::model::DAryQuadraticModel;

/// Builds the QUDO energy model of `inst`.
pub fn encode_qudo(inst: &ProblemInstance, w: &PenaltyWeights) -> Result<DAryQuadraticModel> {
    inst.validate()?;
    w.validate_for(inst, Encoding::Qudo)?;
    let (sites, labels) = inst.qudo_shape();
    let mut m = DAryQuadraticModel::new(sites, labels)?;

    match inst {
        ProblemInstance::Tsp { distances } => {
            add_cyclic_cost(&mut m, distances);
            add_collisions(&mut m, 0..labels, w.a);
        }
        ProblemInstance::Sdvrp {
            distances,
            vehicles,
        } => {
            add_cyclic_cost(&mut m, distances);
            add_collisions(&mut m, 1..labels, w.a);
            let all: Vec<usize> = (0..sites).collect();
            m.add_count_penalty(&all, 0, *vehicles as f64, w.b);
        }
        ProblemInstance::Mdvrp {
            distances,
            vehicles_per_depot,
        } => {
            let n = inst.size();
            add_cyclic_cost(&mut m, distances);
            add_collisions(&mut m, 0..n, w.a);
            let all: Vec<usize> = (0..sites).collect();
            for (d, &vd) in vehicles_per_depot.iter().enumerate() {
                m.add_count_penalty(&all, n + d, vd as f64, w.b);
            }
            for (j, next) in cyclic_pairs(sites) {
                for d1 in n..labels {
                    for d2 in n..labels {
                        m.add_pair(j, d1, next, d2, w.c);
                    }
                }
            }
        }
        ProblemInstance::MaxKCut { edges, .. } => {
            // −Σ_E (1 − δ(s_i = s_j))
            m.add_offset(-(edges.len() as f64));
            for &(u, v) in edges {
                for a in 0..labels {
                    m.add_pair(u, a, v, a, 1.0);
                }
            }
        }
        ProblemInstance::Coloring { edges, .. } => {
            for &(u, v) in edges {
                for a in 0..labels {
                    m.add_pair(u, a, v, a, w.b);
                }
            }
        }
        ProblemInstance::Scheduling {
            processing,
            weights,
        } => {
            for pos in 0..sites {
                for (job, (p, wt)) in processing.iter().zip(weights).enumerate() {
                    m.add_linear(pos, job, wt * p * (pos + 1) as f64);
                }
            }
            add_collisions(&mut m, 0..labels, w.a);
        }
    }
    Ok(m)
}

fn add_cyclic_cost(m: &mut DAryQuadraticModel, distances: &[Vec<f64>]) {
    let labels = m.local_dim();
    for (j, next) in cyclic_pairs(m.num_sites()) {
        for a in 0..labels {
            for b in 0..labels {
                m.add_pair(j, a, next, b, distances[a][b]);
            }
        }
    }
}

/// `weight · Σ_{p<q} Σ_{a ∈ labels} δ(v_p = a) δ(v_q = a)`.
fn add_collisions(m: &mut DAryQuadraticModel, labels: std::ops::Range<usize>, weight: f64) {
    let sites = m.num_sites();
    for p in 0..sites {
        for q in p + 1..sites {
            for a in labels.clone() {
                m.add_pair(p, a, q, a, weight);
            }
        }
    }
}
