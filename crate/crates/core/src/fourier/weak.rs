use crate::cyclic::{CyclicFunction, Spectrum};
use crate::error::{invalid, Error, Result};
use crate::gowers;
use num_complex::Complex64;
use serde::Serialize;

/// Frequencies where `|f̂(ξ)| ≥ threshold`, in increasing order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LargeSpectrum {
    pub modulus: usize,
    pub threshold: f64,
    pub frequencies: Vec<usize>,
}

impl LargeSpectrum {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

pub fn large_spectrum(f: &CyclicFunction, threshold: f64) -> Result<LargeSpectrum> {
    if !(threshold > 0.0) {
        return Err(invalid("threshold must be positive"));
    }
    let s = f.dft();
    let spec = large_spectrum_of(&s, threshold.log2());
    let bound = s.energy() / (threshold * threshold);
    if spec.len() as f64 > bound * (1.0 + 1e-9) + 1e-9 {
        return Err(Error::PostconditionViolation(format!(
            "large spectrum has {} frequencies, Plancherel allows {bound}",
            spec.len()
        )));
    }
    Ok(spec)
}

/// Large spectrum at threshold `2^log2_threshold`; works for thresholds far below
/// the smallest positive double (exact zeros are never large).
pub(crate) fn large_spectrum_of(s: &Spectrum, log2_threshold: f64) -> LargeSpectrum {
    let frequencies = s
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, c)| coefficient_at_least(c.norm(), log2_threshold))
        .map(|(xi, _)| xi)
        .collect();
    LargeSpectrum {
        modulus: s.modulus(),
        threshold: log2_threshold.exp2(),
        frequencies,
    }
}

pub(crate) fn coefficient_at_least(magnitude: f64, log2_threshold: f64) -> bool {
    if log2_threshold > -1000.0 {
        magnitude >= log2_threshold.exp2()
    } else {
        magnitude > 0.0 && magnitude.log2() >= log2_threshold
    }
}

#[derive(Clone, Debug)]
pub struct WeakDecomposition {
    pub structured: CyclicFunction,
    pub pseudorandom: CyclicFunction,
    pub threshold: f64,
    pub phase_count: usize,
    pub pseudorandom_u2: f64,
}

/// Splits `f` into its Fourier restriction to frequencies with `|f̂| ≥ λ²` and the rest.
/// The pseudorandom part then has U² norm at most λ and there are at most λ⁻⁴ phases.
pub fn weak_decompose(f: &CyclicFunction, lambda: f64) -> Result<WeakDecomposition> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid("lambda must lie in (0,1)"));
    }
    let m = f.max_abs();
    if m > 1.0 + gowers::BOUND_SLACK {
        return Err(Error::ContractViolation(format!("|f| reaches {m} > 1")));
    }
    let s = f.dft();
    let thr = lambda * lambda;
    let zero = Complex64::new(0.0, 0.0);
    let mut big = Vec::with_capacity(s.modulus());
    let mut small = Vec::with_capacity(s.modulus());
    let mut phase_count = 0;
    for &c in s.coefficients() {
        if c.norm() >= thr {
            big.push(c);
            small.push(zero);
            phase_count += 1;
        } else {
            big.push(zero);
            small.push(c);
        }
    }
    let structured = Spectrum::new(big)?.idft();
    let pseudorandom = Spectrum::new(small)?.idft();

    let residual = structured.add(&pseudorandom)?.sub(f)?.l2_norm();
    if residual > 1e-9 {
        return Err(Error::PostconditionViolation(format!(
            "weak decomposition reassembly error {residual}"
        )));
    }
    let pseudorandom_u2 = gowers::u2(&pseudorandom);
    if pseudorandom_u2 > lambda + 1e-12 {
        return Err(Error::PostconditionViolation(format!(
            "pseudorandom U2 {pseudorandom_u2} > lambda {lambda}"
        )));
    }
    if phase_count as f64 > lambda.powi(-4) + 1e-9 {
        return Err(Error::PostconditionViolation(format!(
            "{phase_count} phases exceed lambda^-4"
        )));
    }
    Ok(WeakDecomposition {
        structured,
        pseudorandom,
        threshold: thr,
        phase_count,
        pseudorandom_u2,
    })
}
