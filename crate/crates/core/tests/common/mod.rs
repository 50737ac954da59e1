//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use qudo::bench::{generate_instance, SizeParams};
use qudo::encode::{PenaltyWeights, ProblemInstance, ProblemKind};

pub type C = Complex64;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn identity(d: usize) -> Vec<C> {
    let mut m = vec![c(0.0); d * d];
    for i in 0..d {
        m[i * d + i] = c(1.0);
    }
    m
}

pub fn matmul(a: &[C], b: &[C], d: usize) -> Vec<C> {
    let mut out = vec![c(0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `S + S†` with `S|a⟩ = |a+1 mod d⟩`.
pub fn shift_plus_adjoint(d: usize) -> Vec<C> {
    let mut m = vec![c(0.0); d * d];
    for a in 0..d {
        m[((a + 1) % d) * d + a] += c(1.0);
        m[((a + d - 1) % d) * d + a] += c(1.0);
    }
    m
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(m: &[C], d: usize) -> Vec<C> {
    let norm = m.iter().map(|x| x.norm()).fold(0.0, f64::max) * d as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a: Vec<C> = m.iter().map(|x| x * scale).collect();
    let mut term = identity(d);
    let mut sum = identity(d);
    for k in 1..=30 {
        term = matmul(&term, &a, d).into_iter().map(|x| x / k as f64).collect();
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum, d);
    }
    sum
}

/// Kronecker product of row-major `da × da` and `db × db` matrices.
pub fn kron(a: &[C], da: usize, b: &[C], db: usize) -> Vec<C> {
    let d = da * db;
    let mut out = vec![c(0.0); d * d];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k) * d + (j * db + l)] = a[i * da + j] * b[k * db + l];
                }
            }
        }
    }
    out
}

pub fn mat_vec(m: &[C], v: &[C]) -> Vec<C> {
    let d = v.len();
    (0..d).map(|i| (0..d).map(|j| m[i * d + j] * v[j]).sum()).collect()
}

/// Smallest benchmark size of each problem.
pub fn smallest_benchmark_instances(seed: u64) -> Vec<ProblemInstance> {
    vec![
        generate_instance(ProblemKind::Tsp, &SizeParams::new(3), seed).unwrap(),
        generate_instance(ProblemKind::Sdvrp, &SizeParams::new(3).with_vehicles(vec![2]), seed).unwrap(),
        generate_instance(
            ProblemKind::Mdvrp,
            &SizeParams::new(3).with_depots(2).with_vehicles(vec![1, 1]),
            seed,
        )
        .unwrap(),
        generate_instance(ProblemKind::MaxKCut, &SizeParams::new(5).with_k(2), seed).unwrap(),
        generate_instance(ProblemKind::Coloring, &SizeParams::new(5).with_k(3), seed).unwrap(),
        generate_instance(ProblemKind::Scheduling, &SizeParams::new(3), seed).unwrap(),
    ]
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// QUDO energy written straight from the Hamiltonian definitions (squares are not
/// expanded).
pub fn qudo_energy_reference(inst: &ProblemInstance, w: &PenaltyWeights, v: &[usize]) -> f64 {
    let len = v.len();
    let cyclic = |d: &[Vec<f64>]| (0..len).map(|j| d[v[j]][v[(j + 1) % len]]).sum::<f64>();
    let collisions = |labels: &dyn Fn(usize) -> bool| {
        let mut c = 0.0;
        for p in 0..len {
            for q in p + 1..len {
                if v[p] == v[q] && labels(v[p]) {
                    c += 1.0;
                }
            }
        }
        c
    };
    match inst {
        ProblemInstance::Tsp { distances } => cyclic(distances) + w.a * collisions(&|_| true),
        ProblemInstance::Sdvrp { distances, vehicles } => {
            let depots = v.iter().filter(|&&x| x == 0).count() as f64;
            cyclic(distances) + w.a * collisions(&|l| l != 0) + w.b * (depots - *vehicles as f64).powi(2)
        }
        ProblemInstance::Mdvrp {
            distances,
            vehicles_per_depot,
        } => {
            let n = inst.size();
            let mut e = cyclic(distances) + w.a * collisions(&|l| l < n);
            for (d, &vd) in vehicles_per_depot.iter().enumerate() {
                let count = v.iter().filter(|&&x| x == n + d).count() as f64;
                e += w.b * (count - vd as f64).powi(2);
            }
            for j in 0..len {
                if v[j] >= n && v[(j + 1) % len] >= n {
                    e += w.c;
                }
            }
            e
        }
        ProblemInstance::MaxKCut { edges, .. } => -edges.iter().map(|&(a, b)| 1.0 - delta(v[a], v[b])).sum::<f64>(),
        ProblemInstance::Coloring { edges, .. } => w.b * edges.iter().map(|&(a, b)| delta(v[a], v[b])).sum::<f64>(),
        ProblemInstance::Scheduling { processing, weights } => {
            let cost: f64 = (0..len).map(|j| weights[v[j]] * processing[v[j]] * (j + 1) as f64).sum();
            cost + w.a * collisions(&|_| true)
        }
    }
}

/// QUBO energy from the Hamiltonian definitions, with `x[site][label]` given as a
/// nested table.
pub fn qubo_energy_reference(inst: &ProblemInstance, w: &PenaltyWeights, x: &[Vec<u8>]) -> f64 {
    let sites = x.len();
    let labels = x[0].len();
    let xf = |s: usize, l: usize| x[s][l] as f64;
    let row_sum = |s: usize| (0..labels).map(|l| xf(s, l)).sum::<f64>();
    let col_sum = |l: usize| (0..sites).map(|s| xf(s, l)).sum::<f64>();
    let one_hot_sites = (0..sites).map(|s| (row_sum(s) - 1.0).powi(2)).sum::<f64>();
    let cyclic = |d: &[Vec<f64>]| {
        let mut e = 0.0;
        for j in 0..sites {
            let k = (j + 1) % sites;
            for a in 0..labels {
                for b in 0..labels {
                    e += d[a][b] * xf(j, a) * xf(k, b);
                }
            }
        }
        e
    };
    match inst {
        ProblemInstance::Tsp { distances } => {
            let cols = (0..labels).map(|l| (col_sum(l) - 1.0).powi(2)).sum::<f64>();
            cyclic(distances) + w.a * (one_hot_sites + cols)
        }
        ProblemInstance::Sdvrp { distances, vehicles } => {
            let cols = (1..labels).map(|l| (col_sum(l) - 1.0).powi(2)).sum::<f64>();
            cyclic(distances) + w.a * (one_hot_sites + cols) + w.b * (col_sum(0) - *vehicles as f64).powi(2)
        }
        ProblemInstance::Mdvrp {
            distances,
            vehicles_per_depot,
        } => {
            let n = inst.size();
            let cols = (0..n).map(|l| (col_sum(l) - 1.0).powi(2)).sum::<f64>();
            let mut e = cyclic(distances) + w.a * (one_hot_sites + cols);
            for (d, &vd) in vehicles_per_depot.iter().enumerate() {
                e += w.b * (col_sum(n + d) - vd as f64).powi(2);
            }
            for j in 0..sites {
                let k = (j + 1) % sites;
                for d1 in n..labels {
                    for d2 in n..labels {
                        e += w.c * xf(j, d1) * xf(k, d2);
                    }
                }
            }
            e
        }
        ProblemInstance::MaxKCut { edges, .. } => {
            let cut: f64 = edges
                .iter()
                .map(|&(a, b)| 1.0 - (0..labels).map(|l| xf(a, l) * xf(b, l)).sum::<f64>())
                .sum();
            -cut + w.a * one_hot_sites
        }
        ProblemInstance::Coloring { edges, .. } => {
            let mono: f64 = edges
                .iter()
                .map(|&(a, b)| (0..labels).map(|l| xf(a, l) * xf(b, l)).sum::<f64>())
                .sum();
            w.a * one_hot_sites + w.b * mono
        }
        ProblemInstance::Scheduling { processing, weights } => {
            let mut cost = 0.0;
            for j in 0..sites {
                for i in 0..labels {
                    cost += weights[i] * processing[i] * (j + 1) as f64 * xf(j, i);
                }
            }
            let cols = (0..labels).map(|l| (col_sum(l) - 1.0).powi(2)).sum::<f64>();
            cost + w.a * (one_hot_sites + cols)
        }
    }
}

/// Bits of basis index `z` arranged as `x[site][label]` under the instance's
/// one-hot layout.
pub fn qubo_table(inst: &ProblemInstance, z: usize) -> Vec<Vec<u8>> {
    let layout = inst.layout();
    let nv = layout.num_vars();
    let bits: Vec<u8> = (0..nv).map(|i| ((z >> (nv - 1 - i)) & 1) as u8).collect();
    (0..layout.sites)
        .map(|s| (0..layout.labels).map(|l| bits[layout.var(s, l)]).collect())
        .collect()
}

/// Sum of weighted completion times for a job order.
pub fn weighted_completion_time(processing: &[f64], weights: &[f64], order: &[usize]) -> f64 {
    let mut t = 0.0;
    let mut total = 0.0;
    for &j in order {
        t += processing[j];
        total += weights[j] * t;
    }
    total
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
