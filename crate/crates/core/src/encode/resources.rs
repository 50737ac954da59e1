use serde::{Deserialize, Serialize};

use super::{Encoding, ProblemInstance};

/// `base^exponent`, kept symbolic so QUBO spaces like `2^64` stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertDim {
    pub base: usize,
    pub exponent: usize,
}

impl HilbertDim {
    /// Exact value, or `None` past `u128`.
    pub fn value(&self) -> Option<u128> {
        crate::model::hilbert_dim(self.exponent, self.base)
    }
}

impl std::fmt::Display for HilbertDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{}^{}={}", self.base, self.exponent, v),
            None => write!(f, "{}^{}", self.base, self.exponent),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceSummary {
    pub qubo_vars: usize,
    pub qubo_dim: HilbertDim,
    pub qudo_sites: usize,
    pub qudo_local_dim: usize,
    pub qudo_dim: HilbertDim,
}

impl ResourceSummary {
    pub fn dim(&self, encoding: Encoding) -> HilbertDim {
        match encoding {
            Encoding::Qubo => self.qubo_dim,
            Encoding::Qudo => self.qudo_dim,
        }
    }
}

/// Closed-form register sizes for both encodings.
pub fn resource_summary(inst: &ProblemInstance) -> ResourceSummary {
    let (sites, local_dim) = inst.qudo_shape();
    let qubo_vars = sites * local_dim;
    ResourceSummary {
        qubo_vars,
        qubo_dim: HilbertDim {
            base: 2,
            exponent: qubo_vars,
        },
        qudo_sites: sites,
        qudo_local_dim: local_dim,
        qudo_dim: HilbertDim {
            base: local_dim,
            exponent: sites,
        },
    }
}
