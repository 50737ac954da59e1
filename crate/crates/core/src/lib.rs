//! Qubit (QUBO) and qudit (QUDO) encodings of combinatorial problems, with a
//! dense QAOA simulator, a derivative-free optimizer, exact oracles and a
//! benchmark harness.

pub mod bench;
pub mod encode;
pub mod error;
pub mod model;
pub mod optim;
pub mod oracle;
pub mod par;
pub mod sim;

pub use error::{Error, Result};
pub use model::{Assignment, DAryQuadraticModel, MemoryBudget, QuboModel};
pub use par::Parallelism;
