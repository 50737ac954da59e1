//! Problem instances and their QUBO / QUDO encodings.
//!
//! Label conventions used throughout:
//!
//! * TSP and scheduling: sites are tour/schedule positions, labels are
//!   cities/jobs `0..N`.
//! * Single-depot VRP: sites are the `M = N + V` sequence positions, label 0 is
//!   the depot and customers are `1..=N`.
//! * Multi-depot VRP: customers are `0..N`, depots are `N..N+D`.
//! * Max-K-Cut and coloring: sites are vertices, labels are partitions/colors.
//!
//! One-hot QUBO variables use the first subscript of the textbook
//! formulation as the major index: `X[label][position]` for the sequencing
//! problems and `x[vertex][label]` for the graph problems (see
//! [`OneHotLayout`]).

mod decode;
mod qubo;
mod qudo;
mod resources;

pub use decode::{decode, native_decode, native_objective, DecodedSolution, Route, SolutionStructure};
pub use qubo::encode_qubo;
pub use qudo::encode_qudo;
pub use resources::{resource_summary, HilbertDim, ResourceSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which formulation a model or basis index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Qubo,
    Qudo,
}

impl Encoding {
    pub fn as_str(self) -> &'static str {
        match self {
            Encoding::Qubo => "qubo",
            Encoding::Qudo => "qudo",
        }
    }
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Problem family tag, without data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Tsp,
    Sdvrp,
    Mdvrp,
    MaxKCut,
    Coloring,
    Scheduling,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Tsp => "tsp",
            ProblemKind::Sdvrp => "sdvrp",
            ProblemKind::Mdvrp => "mdvrp",
            ProblemKind::MaxKCut => "max_k_cut",
            ProblemKind::Coloring => "coloring",
            ProblemKind::Scheduling => "scheduling",
        }
    }
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::Tsp,
        ProblemKind::Sdvrp,
        ProblemKind::Mdvrp,
        ProblemKind::MaxKCut,
        ProblemKind::Coloring,
        ProblemKind::Scheduling,
    ];
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    /// Accepts the snake_case tag, with `-` allowed for `_`.
    fn from_str(s: &str) -> Result<Self> {
        let tag = s.trim().to_ascii_lowercase().replace('-', "_");
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.as_str() == tag || (tag == "maxkcut" && *k == ProblemKind::MaxKCut))
            .ok_or_else(|| Error::invalid(format!("unknown problem '{s}'")))
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qubo" => Ok(Encoding::Qubo),
            "qudo" => Ok(Encoding::Qudo),
            _ => Err(Error::invalid(format!("unknown encoding '{s}'"))),
        }
    }
}

/// Whether the true objective is minimized or maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// True if `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }
}

/// One of the six benchmark problems with its data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum ProblemInstance {
    Tsp {
        distances: Vec<Vec<f64>>,
    },
    /// Node 0 is the depot, customers are `1..=N`.
    Sdvrp {
        distances: Vec<Vec<f64>>,
        vehicles: usize,
    },
    /// Customers are nodes `0..N`, depots `N..N+D` with `D = vehicles_per_depot.len()`.
    Mdvrp {
        distances: Vec<Vec<f64>>,
        vehicles_per_depot: Vec<usize>,
    },
    MaxKCut {
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        partitions: usize,
    },
    Coloring {
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        colors: usize,
    },
    Scheduling {
        processing: Vec<f64>,
        weights: Vec<f64>,
    },
}

impl ProblemInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemInstance::Tsp { .. } => ProblemKind::Tsp,
            ProblemInstance::Sdvrp { .. } => ProblemKind::Sdvrp,
            ProblemInstance::Mdvrp { .. } => ProblemKind::Mdvrp,
            ProblemInstance::MaxKCut { .. } => ProblemKind::MaxKCut,
            ProblemInstance::Coloring { .. } => ProblemKind::Coloring,
            ProblemInstance::Scheduling { .. } => ProblemKind::Scheduling,
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            ProblemInstance::MaxKCut { .. } => Sense::Max,
            _ => Sense::Min,
        }
    }

    /// `N`: cities, customers, vertices or jobs.
    pub fn size(&self) -> usize {
        match self {
            ProblemInstance::Tsp { distances } => distances.len(),
            ProblemInstance::Sdvrp { distances, .. } => distances.len().saturating_sub(1),
            ProblemInstance::Mdvrp {
                distances,
                vehicles_per_depot,
            } => distances.len().saturating_sub(vehicles_per_depot.len()),
            ProblemInstance::MaxKCut { num_vertices, .. }
            | ProblemInstance::Coloring { num_vertices, .. } => *num_vertices,
            ProblemInstance::Scheduling { processing, .. } => processing.len(),
        }
    }

    /// Total vehicle count for the routing problems.
    pub fn total_vehicles(&self) -> Option<usize> {
        match self {
            ProblemInstance::Sdvrp { vehicles, .. } => Some(*vehicles),
            ProblemInstance::Mdvrp {
                vehicles_per_depot, ..
            } => Some(vehicles_per_depot.iter().sum()),
            _ => None,
        }
    }

    pub fn num_depots(&self) -> Option<usize> {
        match self {
            ProblemInstance::Sdvrp { .. } => Some(1),
            ProblemInstance::Mdvrp {
                vehicles_per_depot, ..
            } => Some(vehicles_per_depot.len()),
            _ => None,
        }
    }

    /// `K` for the graph problems.
    pub fn num_labels_k(&self) -> Option<usize> {
        match self {
            ProblemInstance::MaxKCut { partitions, .. } => Some(*partitions),
            ProblemInstance::Coloring { colors, .. } => Some(*colors),
            _ => None,
        }
    }

    /// QUDO register shape `(sites, local dimension)`.
    pub fn qudo_shape(&self) -> (usize, usize) {
        let n = self.size();
        match self {
            ProblemInstance::Tsp { .. } | ProblemInstance::Scheduling { .. } => (n, n),
            ProblemInstance::Sdvrp { vehicles, .. } => (n + vehicles, n + 1),
            ProblemInstance::Mdvrp {
                vehicles_per_depot, ..
            } => (
                n + vehicles_per_depot.iter().sum::<usize>(),
                n + vehicles_per_depot.len(),
            ),
            ProblemInstance::MaxKCut { partitions: k, .. }
            | ProblemInstance::Coloring { colors: k, .. } => (n, *k),
        }
    }

    pub fn layout(&self) -> OneHotLayout {
        let (sites, labels) = self.qudo_shape();
        let label_major = !matches!(
            self,
            ProblemInstance::MaxKCut { .. } | ProblemInstance::Coloring { .. }
        );
        OneHotLayout {
            sites,
            labels,
            label_major,
        }
    }

    /// Register shape `(sites, local dimension)` for an encoding.
    pub fn register_shape(&self, encoding: Encoding) -> (usize, usize) {
        match encoding {
            Encoding::Qudo => self.qudo_shape(),
            Encoding::Qubo => (self.layout().num_vars(), 2),
        }
    }

    pub fn distances(&self) -> Option<&[Vec<f64>]> {
        match self {
            ProblemInstance::Tsp { distances }
            | ProblemInstance::Sdvrp { distances, .. }
            | ProblemInstance::Mdvrp { distances, .. } => Some(distances),
            _ => None,
        }
    }

    /// Largest absolute coefficient of the penalty-free objective.
    pub fn objective_scale(&self) -> f64 {
        match self {
            ProblemInstance::Tsp { distances }
            | ProblemInstance::Sdvrp { distances, .. }
            | ProblemInstance::Mdvrp { distances, .. } => distances
                .iter()
                .flatten()
                .fold(0.0_f64, |m, &x| m.max(x.abs())),
            ProblemInstance::MaxKCut { .. } | ProblemInstance::Coloring { .. } => 1.0,
            ProblemInstance::Scheduling {
                processing,
                weights,
            } => {
                let n = processing.len() as f64;
                processing
                    .iter()
                    .zip(weights)
                    .fold(0.0_f64, |m, (p, w)| m.max((p * w).abs()))
                    * n
            }
        }
    }

    /// Checks the structural invariants of the instance data.
    pub fn validate(&self) -> Result<()> {
        match self {
            ProblemInstance::Tsp { distances } => {
                if distances.is_empty() {
                    return Err(Error::invalid("TSP needs at least one city"));
                }
                check_distances(distances)
            }
            ProblemInstance::Sdvrp {
                distances,
                vehicles,
            } => {
                if distances.len() < 2 {
                    return Err(Error::invalid("SDVRP needs a depot and at least one customer"));
                }
                if *vehicles == 0 {
                    return Err(Error::invalid("SDVRP needs at least one vehicle"));
                }
                check_distances(distances)
            }
            ProblemInstance::Mdvrp {
                distances,
                vehicles_per_depot,
            } => {
                let depots = vehicles_per_depot.len();
                if depots == 0 {
                    return Err(Error::invalid("MDVRP needs at least one depot"));
                }
                if distances.len() <= depots {
                    return Err(Error::invalid("MDVRP needs at least one customer"));
                }
                let v: usize = vehicles_per_depot.iter().sum();
                if v == 0 {
                    return Err(Error::invalid("MDVRP needs at least one vehicle"));
                }
                if v > distances.len() - depots {
                    return Err(Error::invalid(
                        "MDVRP with more vehicles than customers has no depot-separated sequence",
                    ));
                }
                check_distances(distances)
            }
            ProblemInstance::MaxKCut {
                num_vertices,
                edges,
                partitions: k,
            }
            | ProblemInstance::Coloring {
                num_vertices,
                edges,
                colors: k,
            } => {
                if *num_vertices == 0 {
                    return Err(Error::invalid("graph needs at least one vertex"));
                }
                if *k < 2 {
                    return Err(Error::invalid("need K ≥ 2 labels"));
                }
                check_edges(*num_vertices, edges)
            }
            ProblemInstance::Scheduling {
                processing,
                weights,
            } => {
                if processing.is_empty() || processing.len() != weights.len() {
                    return Err(Error::invalid(
                        "scheduling needs matching, non-empty processing and weight lists",
                    ));
                }
                if processing
                    .iter()
                    .chain(weights)
                    .any(|&x| !(x.is_finite() && x > 0.0))
                {
                    return Err(Error::invalid("processing times and weights must be positive"));
                }
                Ok(())
            }
        }
    }
}

fn check_distances(d: &[Vec<f64>]) -> Result<()> {
    let n = d.len();
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid("distance table must be square"));
        }
        if row[i] != 0.0 {
            return Err(Error::invalid("distance table must have a zero diagonal"));
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::invalid("distances must be finite"));
            }
            if x != d[j][i] {
                return Err(Error::invalid("distance table must be symmetric"));
            }
        }
    }
    Ok(())
}

fn check_edges(n: usize, edges: &[(usize, usize)]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::invalid(format!("edge ({u}, {v}) out of range")));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
        }
    }
    Ok(())
}

/// Penalty weights `A`, `B`, `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PenaltyWeights {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// `A = 2·n·s`, `B = A/2`, `C = A/4` where `n` is the number of QUDO
    /// sites and `s` the largest objective coefficient (1 if all are zero).
    pub fn default_for(inst: &ProblemInstance) -> Self {
        let (sites, _) = inst.qudo_shape();
        let scale = match inst.objective_scale() {
            s if s > 0.0 => s,
            _ => 1.0,
        };
        let a = 2.0 * sites as f64 * scale;
        Self {
            a,
            b: a / 2.0,
            c: a / 4.0,
        }
    }

    /// Rejects non-positive weights where the formulation uses them.
    pub fn validate_for(&self, inst: &ProblemInstance, encoding: Encoding) -> Result<()> {
        let need = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("penalty {name} must be positive, got {x}")))
            }
        };
        match (inst, encoding) {
            (ProblemInstance::Tsp { .. }, _) | (ProblemInstance::Scheduling { .. }, _) => {
                need("A", self.a)
            }
            (ProblemInstance::Sdvrp { .. }, _) => {
                need("A", self.a)?;
                need("B", self.b)
            }
            (ProblemInstance::Mdvrp { .. }, _) => {
                need("A", self.a)?;
                need("B", self.b)?;
                need("C", self.c)?;
                if self.a < self.b || self.b < self.c {
                    return Err(Error::invalid("MDVRP penalties must satisfy A ≥ B ≥ C"));
                }
                Ok(())
            }
            (ProblemInstance::MaxKCut { .. }, Encoding::Qubo) => need("A", self.a),
            (ProblemInstance::MaxKCut { .. }, Encoding::Qudo) => Ok(()),
            (ProblemInstance::Coloring { .. }, Encoding::Qubo) => {
                need("A", self.a)?;
                need("B", self.b)
            }
            (ProblemInstance::Coloring { .. }, Encoding::Qudo) => need("B", self.b),
        }
    }
}

/// Flattening of one-hot variables `(site, label)` into QUBO indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneHotLayout {
    pub sites: usize,
    pub labels: usize,
    /// `label · sites + site` when true, `site · labels + label` otherwise.
    pub label_major: bool,
}

impl OneHotLayout {
    pub fn num_vars(&self) -> usize {
        self.sites * self.labels
    }

    pub fn var(&self, site: usize, label: usize) -> usize {
        if self.label_major {
            label * self.sites + site
        } else {
            site * self.labels + label
        }
    }

    /// Variables of one site's one-hot block.
    pub fn site_vars(&self, site: usize) -> Vec<usize> {
        (0..self.labels).map(|l| self.var(site, l)).collect()
    }

    /// Variables selecting one label across all sites.
    pub fn label_vars(&self, label: usize) -> Vec<usize> {
        (0..self.sites).map(|s| self.var(s, label)).collect()
    }

    /// Bitstring of a d-ary assignment.
    pub fn one_hot(&self, native: &[usize]) -> Vec<usize> {
        let mut bits = vec![0; self.num_vars()];
        for (site, &label) in native.iter().enumerate() {
            bits[self.var(site, label)] = 1;
        }
        bits
    }
}

pub(crate) fn cyclic_pairs(len: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..len).map(move |j| (j, (j + 1) % len))
}
