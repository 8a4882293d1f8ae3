use super::weak::LargeSpectrum;
use crate::cyclic::{circle_distance, CyclicFunction};
use crate::error::{invalid, Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Nonnegative mean-one kernel built from the autocorrelation of a Bohr set.
///
/// `B = {x : |e(xξ/N) − 1| ≤ bohr_width for every target ξ}` and
/// `K(x) = N·#{(y,z) ∈ B² : y − z = x} / |B|²`, so `K̂(ξ) = |1̂_B(ξ)|² / (|B|/N)²`.
#[derive(Clone, Debug, Serialize)]
pub struct FejerKernel {
    pub modulus: usize,
    pub values: Vec<f64>,
    pub spectrum_targets: LargeSpectrum,
    pub epsilon: f64,
    pub bohr_width: f64,
    pub bohr_size: usize,
    /// `(y, w(y))` with `w(y) = K(y)/N`, over the support of `K`.
    #[serde(skip)]
    weights: Vec<(usize, f64)>,
}

impl FejerKernel {
    /// `B = {0}`: the kernel is `N·δ₀` and convolution is the identity.
    pub fn is_degenerate(&self) -> bool {
        self.bohr_size == 1
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn as_function(&self) -> CyclicFunction {
        CyclicFunction::from_vec_unchecked(
            self.values
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        )
    }

    /// `(f ∗ K)(x) = E_y f(x − y) K(y)` for real `f`.
    pub fn convolve(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.modulus;
        if f.len() != n {
            return Err(Error::ModulusMismatch {
                left: f.len(),
                right: n,
            });
        }
        let direct_cost = self.weights.len() as u128 * n as u128;
        if direct_cost <= 40_000_000 {
            let out = (0..n)
                .map(|x| {
                    let terms: Vec<f64> = self
                        .weights
                        .iter()
                        .map(|&(y, w)| w * f[(x + n - y) % n])
                        .collect();
                    crate::reduce::sum_f64(&terms)
                })
                .collect();
            return Ok(out);
        }
        let nonneg = f.iter().all(|&v| v >= 0.0);
        let conv = CyclicFunction::from_real(f)?.convolve(&self.as_function())?;
        Ok(conv
            .values()
            .iter()
            .map(|c| if nonneg { c.re.max(0.0) } else { c.re })
            .collect())
    }
}

fn in_bohr_set(x: usize, targets: &[usize], n: usize, width: f64) -> bool {
    targets.iter().all(|&xi| {
        let d = circle_distance(x as i128 * xi as i128, n);
        2.0 * (std::f64::consts::PI * d).sin().abs() <= width
    })
}

/// Exact difference counts `#{(y,z) ∈ B² : y − z = x}`.
fn difference_counts(bohr: &[usize], n: usize) -> Result<Vec<u64>> {
    let b = bohr.len();
    if b <= 2048 {
        let mut counts = vec![0u64; n];
        for &y in bohr {
            for &z in bohr {
                counts[(y + n - z) % n] += 1;
            }
        }
        return Ok(counts);
    }
    let ind = CyclicFunction::indicator(n, bohr.iter().map(|&x| x as u64))?;
    let spectrum = ind.dft();
    let power: Vec<Complex64> = spectrum
        .coefficients()
        .iter()
        .map(|c| Complex64::new(c.norm_sqr(), 0.0))
        .collect();
    let auto = crate::cyclic::Spectrum::new(power)?.idft();
    let scale = n as f64;
    let mut counts = Vec::with_capacity(n);
    for (x, v) in auto.values().iter().enumerate() {
        let c = v.re * scale;
        let r = c.round();
        if (c - r).abs() > 0.25 || r < 0.0 {
            return Err(Error::PostconditionViolation(format!(
                "difference count at {x} not integral: {c}"
            )));
        }
        counts.push(r as u64);
    }
    Ok(counts)
}

pub fn fejer_kernel(spec: &LargeSpectrum, epsilon: f64) -> Result<FejerKernel> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon must lie in (0,1)"));
    }
    let n = spec.modulus;
    if n == 0 {
        return Err(invalid("modulus must be positive"));
    }
    if let Some(&bad) = spec.frequencies.iter().find(|&&xi| xi >= n) {
        return Err(invalid(format!(
            "frequency {bad} out of range for modulus {n}"
        )));
    }
    let width = epsilon / 2.0;
    let mut targets: Vec<usize> = spec
        .frequencies
        .iter()
        .copied()
        .filter(|&xi| xi != 0)
        .collect();
    // Frequencies close to 0 reject the most points, so test them first.
    targets.sort_by(|&a, &b| {
        circle_distance(a as i128, n)
            .abs()
            .total_cmp(&circle_distance(b as i128, n).abs())
            .then(a.cmp(&b))
    });
    targets.dedup();
    let bohr: Vec<usize> = (0..n)
        .filter(|&x| in_bohr_set(x, &targets, n, width))
        .collect();
    let b = bohr.len();
    let counts = difference_counts(&bohr, n)?;
    let total: u64 = counts.iter().sum();
    if total != (b as u64) * (b as u64) {
        return Err(Error::PostconditionViolation(format!(
            "difference counts sum to {total}, expected {}",
            b * b
        )));
    }
    let b2 = (b as f64) * (b as f64);
    let values: Vec<f64> = counts.iter().map(|&c| n as f64 * c as f64 / b2).collect();
    let weights: Vec<(usize, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(y, &c)| (y, c as f64 / b2))
        .collect();

    let kernel = FejerKernel {
        modulus: n,
        values,
        spectrum_targets: spec.clone(),
        epsilon,
        bohr_width: width,
        bohr_size: b,
        weights,
    };
    verify(&kernel)?;
    Ok(kernel)
}

fn verify(k: &FejerKernel) -> Result<()> {
    let f = k.as_function();
    let mean = f.mean().re;
    if (mean - 1.0).abs() > 1e-9 {
        return Err(Error::PostconditionViolation(format!(
            "kernel mean {mean} != 1"
        )));
    }
    let hat = f.dft();
    for (xi, c) in hat.coefficients().iter().enumerate() {
        if c.im.abs() > 1e-9 || c.re < -1e-9 || c.re > 1.0 + 1e-9 {
            return Err(Error::PostconditionViolation(format!(
                "kernel transform {c} at {xi} outside [0,1]"
            )));
        }
    }
    for &xi in &k.spectrum_targets.frequencies {
        let c = hat.coefficients()[xi].re;
        if c < 1.0 - k.epsilon {
            return Err(Error::PostconditionViolation(format!(
                "kernel transform {c} at target {xi} below 1 - epsilon"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, freqs: Vec<usize>) -> LargeSpectrum {
        LargeSpectrum {
            modulus: n,
            threshold: 0.1,
            frequencies: freqs,
        }
    }

    #[test]
    fn trivial_targets_give_constant_kernel() {
        for freqs in [vec![], vec![0]] {
            let k = fejer_kernel(&spec(16, freqs), 0.3).unwrap();
            assert_eq!(k.bohr_size, 16);
            assert!(k.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn small_spectrum_invariants() {
        let k = fejer_kernel(&spec(101, vec![0, 1]), 0.1).unwrap();
        assert!(k.values.iter().all(|&v| v >= 0.0));
        let hat = k.as_function().dft();
        assert!(hat.coefficients()[1].re >= 0.9);
    }

    #[test]
    fn degenerate_kernel_is_identity() {
        let n = 64;
        let k = fejer_kernel(&spec(n, (0..n).collect()), 0.1).unwrap();
        assert!(k.is_degenerate());
        let f: Vec<f64> = (0..n).map(|x| (x % 7) as f64 / 7.0).collect();
        assert_eq!(k.convolve(&f).unwrap(), f);
    }

    #[test]
    fn fft_counts_match_direct_counts() {
        let n = 10_000;
        let bohr: Vec<usize> = (0..n).filter(|x| x % 3 == 0).collect();
        let fast = difference_counts(&bohr, n).unwrap();
        let mut direct = vec![0u64; n];
        for &y in &bohr {
            for &z in &bohr {
                direct[(y + n - z) % n] += 1;
            }
        }
        assert_eq!(fast, direct);
    }
}
