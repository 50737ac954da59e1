//! Diagonal energy models over d-ary registers.
//!
//! A [`DAryQuadraticModel`] is a polynomial in the indicators `δ(v_j = a)`
//! with at most pairwise products. Binary models ([`QuboModel`]) embed into it
//! with `d = 2`. Basis states are addressed big-endian: site 0 is the most
//! significant digit of the mixed-radix index.
//!
//! Energies are accumulated site by site: the offset, then for each site `k`
//! its linear term followed by its couplings to sites `j < k` in ascending
//! `j`. [`DAryQuadraticModel::evaluate`], [`DAryQuadraticModel::build_diagonal`]
//! and [`QuboModel::evaluate`] all follow that order, so they agree bit for bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Parallelism;

/// Default ceiling on the number of basis states materialized at once.
pub const DEFAULT_BUDGET: usize = 1 << 26;

/// Maximum number of dense elements (diagonal entries or amplitudes) that
/// may be allocated for one register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryBudget(pub usize);

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget(DEFAULT_BUDGET)
    }
}

impl MemoryBudget {
    /// Returns `d^n` when it fits, a resource-limit error otherwise.
    pub fn check(self, num_sites: usize, local_dim: usize, what: &'static str) -> Result<usize> {
        match hilbert_dim(num_sites, local_dim) {
            Some(dim) if dim <= self.0 as u128 => Ok(dim as usize),
            Some(dim) => Err(Error::ResourceLimit {
                what,
                required: dim,
                budget: self.0,
            }),
            None => Err(Error::ResourceLimit {
                what,
                required: u128::MAX,
                budget: self.0,
            }),
        }
    }
}

/// `d^n`, or `None` on overflow.
pub fn hilbert_dim(num_sites: usize, local_dim: usize) -> Option<u128> {
    let exp = u32::try_from(num_sites).ok()?;
    (local_dim as u128).checked_pow(exp)
}

/// One value per site, each in `[0, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for Assignment {
    fn from(v: Vec<usize>) -> Self {
        Assignment(v)
    }
}

/// Decodes basis index `z` into big-endian base-`d` digits.
pub fn index_to_assignment(z: usize, num_sites: usize, local_dim: usize) -> Result<Assignment> {
    let dim = hilbert_dim(num_sites, local_dim)
        .ok_or_else(|| Error::invalid("register dimension overflows"))?;
    if local_dim == 0 || (z as u128) >= dim {
        return Err(Error::invalid(format!(
            "basis index {z} out of range for {local_dim}^{num_sites}"
        )));
    }
    let mut values = vec![0; num_sites];
    let mut rest = z;
    for slot in values.iter_mut().rev() {
        *slot = rest % local_dim;
        rest /= local_dim;
    }
    Ok(Assignment(values))
}

/// Inverse of [`index_to_assignment`].
pub fn assignment_to_index(a: &Assignment, local_dim: usize) -> Result<usize> {
    let mut z: usize = 0;
    for &v in a.values() {
        if v >= local_dim {
            return Err(Error::invalid(format!(
                "value {v} out of range for local dimension {local_dim}"
            )));
        }
        z = z
            .checked_mul(local_dim)
            .and_then(|z| z.checked_add(v))
            .ok_or_else(|| Error::invalid("basis index overflows usize"))?;
    }
    Ok(z)
}

/// Pairwise indicator polynomial over `n` sites of local dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DAryQuadraticModel {
    num_sites: usize,
    local_dim: usize,
    offset: f64,
    /// `linear[j][a]`, coefficient of `δ(v_j = a)`.
    linear: Vec<Vec<f64>>,
    /// Keyed `(k, j)` with `j < k` so iteration groups couplings by their
    /// higher site. Each table is `d × d` row-major, indexed `[v_j][v_k]`.
    #[serde(with = "pair_tables")]
    quadratic: BTreeMap<(usize, usize), Vec<f64>>,
}

impl DAryQuadraticModel {
    pub fn new(num_sites: usize, local_dim: usize) -> Result<Self> {
        if num_sites == 0 || local_dim == 0 {
            return Err(Error::invalid("model needs at least one site of dimension ≥ 1"));
        }
        Ok(Self {
            num_sites,
            local_dim,
            offset: 0.0,
            linear: vec![vec![0.0; local_dim]; num_sites],
            quadratic: BTreeMap::new(),
        })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &[Vec<f64>] {
        &self.linear
    }

    /// Coupling tables as `((j, k), table)` with `j < k`, ordered by `(k, j)`.
    pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), &[f64])> {
        self.quadratic
            .iter()
            .map(|(&(k, j), t)| ((j, k), t.as_slice()))
    }

    /// Coupling table for sites `j < k`, if any.
    pub fn pair_table(&self, j: usize, k: usize) -> Option<&[f64]> {
        self.quadratic.get(&(k, j)).map(Vec::as_slice)
    }

    pub fn hilbert_dim(&self) -> Option<u128> {
        hilbert_dim(self.num_sites, self.local_dim)
    }

    /// True when every coefficient and the offset are zero.
    pub fn is_zero(&self) -> bool {
        self.offset == 0.0
            && self.linear.iter().flatten().all(|&c| c == 0.0)
            && self.quadratic.values().flatten().all(|&c| c == 0.0)
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    pub fn add_linear(&mut self, site: usize, value: usize, c: f64) {
        self.linear[site][value] += c;
    }

    /// Adds `c·δ(v_j = a)·δ(v_k = b)`, folding into the canonical `j < k`
    /// table; a same-site product collapses onto the linear term.
    pub fn add_pair(&mut self, j: usize, a: usize, k: usize, b: usize, c: f64) {
        assert!(j < self.num_sites && k < self.num_sites, "site out of range");
        assert!(a < self.local_dim && b < self.local_dim, "value out of range");
        if c == 0.0 {
            return;
        }
        if j == k {
            if a == b {
                self.linear[j][a] += c;
            }
            return;
        }
        let (lo, va, hi, vb) = if j < k { (j, a, k, b) } else { (k, b, j, a) };
        let d = self.local_dim;
        let table = self
            .quadratic
            .entry((hi, lo))
            .or_insert_with(|| vec![0.0; d * d]);
        table[va * d + vb] += c;
    }

    /// Adds `weight · (Σ_{j ∈ sites} δ(v_j = value) − target)²`, expanded with
    /// `δ² = δ` into offset, linear and pairwise terms.
    pub fn add_count_penalty(&mut self, sites: &[usize], value: usize, target: f64, weight: f64) {
        self.offset += weight * target * target;
        for &j in sites {
            self.add_linear(j, value, weight * (1.0 - 2.0 * target));
        }
        for (x, &j) in sites.iter().enumerate() {
            for &k in &sites[x + 1..] {
                self.add_pair(j, value, k, value, 2.0 * weight);
            }
        }
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.num_sites {
            return Err(Error::invalid(format!(
                "assignment has {} entries, model has {} sites",
                a.len(),
                self.num_sites
            )));
        }
        if let Some(&v) = a.values().iter().find(|&&v| v >= self.local_dim) {
            return Err(Error::invalid(format!(
                "value {v} out of range for local dimension {}",
                self.local_dim
            )));
        }
        Ok(())
    }

    /// Energy of one assignment.
    pub fn evaluate(&self, a: &Assignment) -> Result<f64> {
        self.check_assignment(a)?;
        let v = a.values();
        let d = self.local_dim;
        let mut e = self.offset;
        for k in 0..self.num_sites {
            e += self.linear[k][v[k]];
            for (&(_, j), table) in self.quadratic.range((k, 0)..(k + 1, 0)) {
                e += table[v[j] * d + v[k]];
            }
        }
        Ok(e)
    }

    /// Dense energy vector over all `d^n` basis states with the default budget.
    pub fn build_diagonal(&self) -> Result<Vec<f64>> {
        self.build_diagonal_with(MemoryBudget::default(), Parallelism::default())
    }

    pub fn build_diagonal_with(&self, budget: MemoryBudget, par: Parallelism) -> Result<Vec<f64>> {
        let dim = budget.check(self.num_sites, self.local_dim, "energy diagonal")?;
        let n = self.num_sites;
        let d = self.local_dim;

        // partners[k] = couplings (j, table) with j < k, ascending j
        let mut partners: Vec<Vec<(usize, &[f64])>> = vec![Vec::new(); n];
        for (&(k, j), t) in &self.quadratic {
            partners[k].push((j, t.as_slice()));
        }

        // Fix the leading `prefix_len` sites per chunk; the last site always
        // stays inside the depth-first fill.
        let mut prefix_len = 0;
        let mut chunks = 1usize;
        while prefix_len + 1 < n && chunks < 256 {
            prefix_len += 1;
            chunks *= d;
        }
        let chunk_len = dim / chunks;

        let filler = DiagonalFill {
            model: self,
            partners: &partners,
        };
        let mut out = vec![0.0; dim];
        par.for_each_chunk_mut(&mut out, chunk_len, |ci, chunk| {
            let mut values = vec![0usize; n];
            let mut rest = ci;
            for s in (0..prefix_len).rev() {
                values[s] = rest % d;
                rest /= d;
            }
            let mut e = self.offset;
            for k in 0..prefix_len {
                e = filler.site_energy(k, &values, e);
            }
            filler.fill(prefix_len, &mut values, e, chunk);
        });
        Ok(out)
    }
}

struct DiagonalFill<'a> {
    model: &'a DAryQuadraticModel,
    partners: &'a [Vec<(usize, &'a [f64])>],
}

impl DiagonalFill<'_> {
    fn site_energy(&self, k: usize, values: &[usize], mut e: f64) -> f64 {
        let d = self.model.local_dim;
        e += self.model.linear[k][values[k]];
        for &(j, table) in &self.partners[k] {
            e += table[values[j] * d + values[k]];
        }
        e
    }

    fn fill(&self, site: usize, values: &mut [usize], prefix: f64, out: &mut [f64]) {
        let d = self.model.local_dim;
        let n = self.model.num_sites;
        if site + 1 == n {
            let lin = &self.model.linear[site];
            for (a, slot) in out.iter_mut().enumerate() {
                let mut e = prefix + lin[a];
                for &(j, table) in &self.partners[site] {
                    e += table[values[j] * d + a];
                }
                *slot = e;
            }
            return;
        }
        let stride = out.len() / d;
        for (a, block) in out.chunks_mut(stride).enumerate() {
            values[site] = a;
            let e = self.site_energy(site, values, prefix);
            self.fill(site + 1, values, e, block);
        }
    }
}

/// Binary quadratic model `offset + Σ_{i≤j} Q[i][j]·x_i·x_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboModel {
    num_vars: usize,
    /// Row-major `num_vars × num_vars`; only `i ≤ j` is populated.
    coeffs: Vec<f64>,
    offset: f64,
}

impl QuboModel {
    pub fn new(num_vars: usize) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::invalid("QUBO needs at least one variable"));
        }
        Ok(Self {
            num_vars,
            coeffs: vec![0.0; num_vars * num_vars],
            offset: 0.0,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `Q[i][j]` for `i ≤ j` (symmetric lookup otherwise).
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[i * self.num_vars + j]
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    pub fn add_linear(&mut self, i: usize, c: f64) {
        self.coeffs[i * self.num_vars + i] += c;
    }

    /// Adds `c·x_i·x_j`; `i == j` lands on the diagonal since `x² = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[i * self.num_vars + j] += c;
    }

    /// Adds `weight · (Σ_{i ∈ vars} x_i − target)²`.
    pub fn add_squared_sum(&mut self, vars: &[usize], target: f64, weight: f64) {
        self.offset += weight * target * target;
        for &i in vars {
            self.add_linear(i, weight * (1.0 - 2.0 * target));
        }
        for (x, &i) in vars.iter().enumerate() {
            for &j in &vars[x + 1..] {
                self.add_quadratic(i, j, 2.0 * weight);
            }
        }
    }

    pub fn evaluate(&self, bits: &Assignment) -> Result<f64> {
        if bits.len() != self.num_vars {
            return Err(Error::invalid(format!(
                "bitstring has {} entries, model has {} variables",
                bits.len(),
                self.num_vars
            )));
        }
        let x = bits.values();
        if x.iter().any(|&b| b > 1) {
            return Err(Error::invalid("QUBO assignment entries must be 0 or 1"));
        }
        let n = self.num_vars;
        let mut e = self.offset;
        for k in 0..n {
            if x[k] == 0 {
                continue;
            }
            e += self.coeffs[k * n + k];
            for j in 0..k {
                if x[j] == 1 {
                    e += self.coeffs[j * n + k];
                }
            }
        }
        Ok(e)
    }

    /// Embeds as a `d = 2` indicator model with `δ(x_i = 1) = x_i`.
    pub fn to_dary(&self) -> DAryQuadraticModel {
        let n = self.num_vars;
        let mut m = DAryQuadraticModel::new(n, 2).expect("num_vars ≥ 1");
        m.offset = self.offset;
        for i in 0..n {
            m.linear[i][1] = self.coeffs[i * n + i];
        }
        for k in 0..n {
            for j in 0..k {
                let c = self.coeffs[j * n + k];
                if c != 0.0 {
                    m.quadratic.insert((k, j), vec![0.0, 0.0, 0.0, c]);
                }
            }
        }
        m
    }

    pub fn build_diagonal_with(&self, budget: MemoryBudget, par: Parallelism) -> Result<Vec<f64>> {
        budget.check(self.num_vars, 2, "energy diagonal")?;
        self.to_dary().build_diagonal_with(budget, par)
    }
}

mod pair_tables {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct PairTable {
        sites: (usize, usize),
        table: Vec<f64>,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(usize, usize), Vec<f64>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let v: Vec<PairTable> = map
            .iter()
            .map(|(&(k, j), t)| PairTable {
                sites: (j, k),
                table: t.clone(),
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(usize, usize), Vec<f64>>, D::Error> {
        let v = Vec::<PairTable>::deserialize(d)?;
        let mut map = BTreeMap::new();
        for p in v {
            let (j, k) = p.sites;
            if j >= k {
                return Err(serde::de::Error::custom("pair keys must satisfy j < k"));
            }
            map.insert((k, j), p.table);
        }
        Ok(map)
    }
}
