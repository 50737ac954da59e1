//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encode::{ProblemInstance, ProblemKind};
use crate::error::{Error, Result};

/// Resampling attempts before giving up on a connected graph.
const MAX_GRAPH_ATTEMPTS: usize = 10_000;

/// Size parameters shared by all problem kinds.
///
/// `n` is cities, customers, vertices or jobs. `vehicles` holds `V` for
/// SDVRP; for MDVRP it is either one total `V` (spread round-robin over
/// `depots`) or one `V_d` per depot.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SizeParams {
    pub n: usize,
    pub k: Option<usize>,
    pub depots: Option<usize>,
    pub vehicles: Vec<usize>,
}

impl SizeParams {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Default::default()
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_depots(mut self, depots: usize) -> Self {
        self.depots = Some(depots);
        self
    }

    pub fn with_vehicles(mut self, vehicles: Vec<usize>) -> Self {
        self.vehicles = vehicles;
        self
    }

    /// Per-depot vehicle counts for MDVRP.
    pub fn vehicles_per_depot(&self) -> Result<Vec<usize>> {
        let depots = self.depots.unwrap_or(self.vehicles.len().max(1));
        if depots == 0 {
            return Err(Error::invalid("MDVRP needs at least one depot"));
        }
        match self.vehicles.as_slice() {
            [] => Ok(vec![1; depots]),
            [total] if depots > 1 => {
                let mut v = vec![total / depots; depots];
                for slot in v.iter_mut().take(total % depots) {
                    *slot += 1;
                }
                Ok(v)
            }
            list if list.len() == depots => Ok(list.to_vec()),
            list => Err(Error::invalid(format!(
                "{} vehicle counts given for {depots} depots",
                list.len()
            ))),
        }
    }

    fn single_vehicle_count(&self) -> Result<usize> {
        match self.vehicles.as_slice() {
            [] => Ok(1),
            [v] => Ok(*v),
            _ => Err(Error::invalid("SDVRP takes a single vehicle count")),
        }
    }

    fn labels(&self, what: &str) -> Result<usize> {
        self.k
            .ok_or_else(|| Error::invalid(format!("{what} needs K")))
    }
}

/// Symmetric zero-diagonal matrix with entries on the grid `{0.5, 1.0, …, 10.0}`.
fn half_integer_distances(rng: &mut ChaCha8Rng, nodes: usize) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; nodes]; nodes];
    for i in 0..nodes {
        for j in i + 1..nodes {
            let v = rng.gen_range(1..=20u32) as f64 * 0.5;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Keeps each allowed pair with probability ½ until the graph is connected.
fn connected_random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<Vec<(usize, usize)>> {
    for _ in 0..MAX_GRAPH_ATTEMPTS {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if allowed(a, b) && rng.gen_bool(0.5) {
                    edges.push((a, b));
                }
            }
        }
        if is_connected(n, &edges) {
            return Ok(edges);
        }
    }
    Err(Error::invalid("could not sample a connected graph"))
}

/// Deterministic random instance for `(kind, sizes, seed)`.
pub fn generate_instance(kind: ProblemKind, sizes: &SizeParams, seed: u64) -> Result<ProblemInstance> {
    let n = sizes.n;
    if n == 0 {
        return Err(Error::invalid("size N must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match kind {
        ProblemKind::Tsp => ProblemInstance::Tsp {
            distances: half_integer_distances(&mut rng, n),
        },
        ProblemKind::Sdvrp => ProblemInstance::Sdvrp {
            distances: half_integer_distances(&mut rng, n + 1),
            vehicles: sizes.single_vehicle_count()?,
        },
        ProblemKind::Mdvrp => {
            let vehicles_per_depot = sizes.vehicles_per_depot()?;
            ProblemInstance::Mdvrp {
                distances: half_integer_distances(&mut rng, n + vehicles_per_depot.len()),
                vehicles_per_depot,
            }
        }
        ProblemKind::MaxKCut => {
            let k = sizes.labels("Max-K-Cut")?;
            ProblemInstance::MaxKCut {
                num_vertices: n,
                edges: connected_random_graph(&mut rng, n, |_, _| true)?,
                partitions: k,
            }
        }
        ProblemKind::Coloring => {
            let k = sizes.labels("graph coloring")?;
            if k > n {
                return Err(Error::invalid(format!(
                    "planted {k}-coloring needs at least {k} vertices"
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut group = vec![0; n];
            for (pos, &v) in order.iter().enumerate() {
                group[v] = pos % k;
            }
            ProblemInstance::Coloring {
                num_vertices: n,
                edges: connected_random_graph(&mut rng, n, |a, b| group[a] != group[b])?,
                colors: k,
            }
        }
        ProblemKind::Scheduling => {
            let processing = (0..n).map(|_| rng.gen_range(1..=9u32) as f64).collect();
            let weights = (0..n).map(|_| rng.gen_range(1..=9u32) as f64).collect();
            ProblemInstance::Scheduling {
                processing,
                weights,
            }
        }
    };
    inst.validate()?;
    Ok(inst)
}
