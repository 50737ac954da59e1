//! One-hot binary (QUBO) Hamiltonians with squared-constraint penalties.

use super::{cyclic_pairs, Encoding, OneHotLayout, PenaltyWeights, ProblemInstance};
use crate::error::Result;
use crate::model::QuboModel;

/// Builds the QUBO energy model of `inst`.
pub fn encode_qubo(inst: &ProblemInstance, w: &PenaltyWeights) -> Result<QuboModel> {
    inst.validate()?;
    w.validate_for(inst, Encoding::Qubo)?;
    let layout = inst.layout();
    let mut q = QuboModel::new(layout.num_vars())?;
    let (sites, labels) = (layout.sites, layout.labels);

    match inst {
        ProblemInstance::Tsp { distances } => {
            add_cyclic_cost(&mut q, &layout, distances);
            add_position_one_hot(&mut q, &layout, w.a);
            for city in 0..labels {
                q.add_squared_sum(&layout.label_vars(city), 1.0, w.a);
            }
        }
        ProblemInstance::Sdvrp {
            distances,
            vehicles,
        } => {
            add_cyclic_cost(&mut q, &layout, distances);
            add_position_one_hot(&mut q, &layout, w.a);
            for customer in 1..labels {
                q.add_squared_sum(&layout.label_vars(customer), 1.0, w.a);
            }
            q.add_squared_sum(&layout.label_vars(0), *vehicles as f64, w.b);
        }
        ProblemInstance::Mdvrp {
            distances,
            vehicles_per_depot,
        } => {
            let n = inst.size();
            add_cyclic_cost(&mut q, &layout, distances);
            add_position_one_hot(&mut q, &layout, w.a);
            for customer in 0..n {
                q.add_squared_sum(&layout.label_vars(customer), 1.0, w.a);
            }
            for (d, &vd) in vehicles_per_depot.iter().enumerate() {
                q.add_squared_sum(&layout.label_vars(n + d), vd as f64, w.b);
            }
            for (j, next) in cyclic_pairs(sites) {
                for d1 in n..labels {
                    for d2 in n..labels {
                        q.add_quadratic(layout.var(j, d1), layout.var(next, d2), w.c);
                    }
                }
            }
        }
        ProblemInstance::MaxKCut { edges, .. } => {
            // −Σ_E (1 − Σ_k x_ik x_jk)
            q.add_offset(-(edges.len() as f64));
            for &(u, v) in edges {
                for k in 0..labels {
                    q.add_quadratic(layout.var(u, k), layout.var(v, k), 1.0);
                }
            }
            add_position_one_hot(&mut q, &layout, w.a);
        }
        ProblemInstance::Coloring { edges, .. } => {
            add_position_one_hot(&mut q, &layout, w.a);
            for &(u, v) in edges {
                for k in 0..labels {
                    q.add_quadratic(layout.var(u, k), layout.var(v, k), w.b);
                }
            }
        }
        ProblemInstance::Scheduling {
            processing,
            weights,
        } => {
            for pos in 0..sites {
                for (job, (p, wt)) in processing.iter().zip(weights).enumerate() {
                    q.add_linear(layout.var(pos, job), wt * p * (pos + 1) as f64);
                }
            }
            add_position_one_hot(&mut q, &layout, w.a);
            for job in 0..labels {
                q.add_squared_sum(&layout.label_vars(job), 1.0, w.a);
            }
        }
    }
    Ok(q)
}

fn add_cyclic_cost(q: &mut QuboModel, layout: &OneHotLayout, distances: &[Vec<f64>]) {
    for (j, next) in cyclic_pairs(layout.sites) {
        for a in 0..layout.labels {
            for b in 0..layout.labels {
                let c = distances[a][b];
                if c != 0.0 {
                    q.add_quadratic(layout.var(j, a), layout.var(next, b), c);
                }
            }
        }
    }
}

/// `weight · Σ_site (Σ_label x − 1)²`: exactly one label per site.
fn add_position_one_hot(q: &mut QuboModel, layout: &OneHotLayout, weight: f64) {
    for site in 0..layout.sites {
        q.add_squared_sum(&layout.site_vars(site), 1.0, weight);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Assignment;

    #[test]
    fn variable_counts() {
        let tsp = ProblemInstance::Tsp {
            distances: vec![vec![0.0; 4]; 4],
        };
        let q = encode_qubo(&tsp, &PenaltyWeights::default_for(&tsp)).unwrap();
        assert_eq!(q.num_vars(), 16);
        let cut = ProblemInstance::MaxKCut {
            num_vertices: 5,
            edges: vec![(0, 1)],
            partitions: 3,
        };
        let q = encode_qubo(&cut, &PenaltyWeights::default_for(&cut)).unwrap();
        assert_eq!(q.num_vars(), 15);
    }

    #[test]
    fn single_edge_coloring_energies() {
        let inst = ProblemInstance::Coloring {
            num_vertices: 2,
            edges: vec![(0, 1)],
            colors: 2,
        };
        let q = encode_qubo(&inst, &PenaltyWeights::new(1.0, 1.0, 1.0)).unwrap();
        // x[v][k] at v*2 + k
        assert_eq!(q.evaluate(&Assignment(vec![1, 0, 0, 1])).unwrap(), 0.0);
        assert_eq!(q.evaluate(&Assignment(vec![1, 0, 1, 0])).unwrap(), 1.0);
        assert_eq!(q.evaluate(&Assignment(vec![0, 0, 1, 0])).unwrap(), 1.0);
    }

    #[test]
    fn tsp_one_hot_penalty_counts_violations() {
        let inst = ProblemInstance::Tsp {
            distances: vec![vec![0.0; 3]; 3],
        };
        let q = encode_qubo(&inst, &PenaltyWeights::new(10.0, 1.0, 1.0)).unwrap();
        let layout = inst.layout();
        let perm = layout.one_hot(&[2, 0, 1]);
        assert_eq!(q.evaluate(&Assignment(perm)).unwrap(), 0.0);
        // all-zero: three empty positions and three unvisited cities
        assert_eq!(q.evaluate(&Assignment(vec![0; 9])).unwrap(), 60.0);
    }
}
