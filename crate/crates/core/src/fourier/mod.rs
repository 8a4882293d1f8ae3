//! Fourier-analytic structure theorems on Z/NZ and the density-increment pipeline.

mod chain;
mod fejer;
mod roth;
mod strong;
mod weak;

pub use chain::{structured_count_chain, ChainReport};
pub use fejer::{fejer_kernel, FejerKernel};
pub use roth::{
    density_increment_step, dirichlet_partition, roth_iterate, DirichletPartition,
    IncrementOutcome, Progression, ProgressionCertificate, PseudorandomCertificate, RothOutcome,
    INCREMENT_PHASE_TOLERANCE,
};
pub use strong::{strong_decompose, StrongBounds, StrongDecomposition};
pub use weak::{large_spectrum, weak_decompose, LargeSpectrum, WeakDecomposition};

use crate::cyclic::CyclicFunction;
use crate::error::{Error, Result};

/// Rejects inputs that are not real with values in `[0, 1]`.
pub(crate) fn check_unit_interval(f: &CyclicFunction) -> Result<Vec<f64>> {
    if !f.is_real(1e-12) {
        return Err(Error::ContractViolation(
            "function must be real-valued".into(),
        ));
    }
    let v = f.real_parts();
    if let Some((i, x)) = v
        .iter()
        .enumerate()
        .find(|(_, &x)| !(-1e-12..=1.0 + 1e-12).contains(&x))
    {
        return Err(Error::ContractViolation(format!(
            "value {x} at {i} outside [0,1]"
        )));
    }
    Ok(v)
}
