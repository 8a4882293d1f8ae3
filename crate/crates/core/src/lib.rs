//! Executable structure-versus-randomness tools: Gowers and cube norms, Fourier and
//! graph structure theorems, density and energy increments, progression counting,
//! triangle removal and prime progression averages.

pub mod cli;
pub mod cyclic;
pub mod error;
pub mod fourier;
pub mod generators;
pub mod gowers;
pub mod graph;
pub mod growth;
pub mod primes;
pub mod reduce;
pub mod report;

pub use cyclic::{CyclicFunction, IntervalEmbedding, Spectrum};
pub use error::{Error, Result};
pub use growth::GrowthFunction;
