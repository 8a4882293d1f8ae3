use super::fejer::fejer_kernel;
use super::weak::{coefficient_at_least, large_spectrum_of};
use crate::cyclic::CyclicFunction;
use crate::error::{invalid, Error, Result};
use crate::gowers;
use crate::growth::GrowthFunction;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct StrongBounds {
    pub u2_of_fu: f64,
    pub u2_bound: f64,
    pub l2_of_fs: f64,
    pub l2_bound: f64,
    pub mean_delta: f64,
    pub reassembly_error: f64,
    pub structured_min: f64,
    pub structured_max: f64,
    pub pseudorandom_max_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongDecomposition {
    #[serde(skip)]
    pub structured: CyclicFunction,
    #[serde(skip)]
    pub small: CyclicFunction,
    #[serde(skip)]
    pub pseudorandom: CyclicFunction,
    #[serde(rename = "T")]
    pub complexity: usize,
    pub growth: GrowthFunction,
    pub epsilon: f64,
    /// Pigeonholed scale index `m`.
    pub scale_index: usize,
    /// `log₂ N_m` for `m = 1, …, m + 2`.
    pub log2_scales: Vec<f64>,
    pub annulus_mass: f64,
    pub bohr_sizes: [usize; 2],
    pub bounds: StrongBounds,
    pub warnings: Vec<String>,
}

fn log2_g(log2_n: f64, m: usize) -> f64 {
    (2.0 * log2_n).max((m as f64).log2() + log2_n)
}

/// `f = f_{U⊥} + f_S + f_U` with `f_{U⊥} = f ∗ K⁽ᵐ⁾`, `f_S = f ∗ K⁽ᵐ⁺¹⁾ − f ∗ K⁽ᵐ⁾`
/// and `f_U = f − f ∗ K⁽ᵐ⁺¹⁾`, where the kernels target the large spectrum at the
/// scales `N₁ = M`, `N_{m+1} = F(G(N_m))⁴`. Scales are tracked as base-2 logarithms.
pub fn strong_decompose(
    f: &CyclicFunction,
    epsilon: f64,
    growth: GrowthFunction,
) -> Result<StrongDecomposition> {
    growth.validate()?;
    let values = super::check_unit_interval(f)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon must lie in (0,1)"));
    }
    let m_inv = (1.0 / epsilon).round();
    if m_inv < 2.0 || (m_inv * epsilon - 1.0).abs() > 1e-9 {
        return Err(invalid(format!(
            "epsilon must be 1/M for an integer M >= 2, got {epsilon}"
        )));
    }
    let big_m = m_inv as usize;
    let max_index = big_m * big_m;

    let mut log2_scales = vec![(big_m as f64).log2()];
    while log2_scales.len() < max_index + 2 {
        let last = *log2_scales.last().unwrap();
        let next = 4.0 * growth.log2_eval(log2_g(last, big_m));
        log2_scales.push(next.max(last));
    }
    let scale = |m: usize| log2_scales[m - 1];

    let spectrum = f.dft();
    let magnitudes: Vec<f64> = spectrum.coefficients().iter().map(|c| c.norm()).collect();
    let budget = 2.0 / (big_m * big_m) as f64;
    let mut chosen = None;
    for m in 1..=max_index {
        let (hi, lo) = (-scale(m), -scale(m + 2));
        let mass: f64 = magnitudes
            .iter()
            .filter(|&&a| coefficient_at_least(a, lo) && !(a > 0.0 && a.log2() > hi))
            .map(|a| a * a)
            .sum();
        if mass <= budget {
            chosen = Some((m, mass));
            break;
        }
    }
    let (m, annulus_mass) = chosen.ok_or_else(|| {
        Error::PostconditionViolation("no scale satisfies the annulus pigeonhole".into())
    })?;

    let spec_m = large_spectrum_of(&spectrum, -scale(m));
    let spec_next = large_spectrum_of(&spectrum, -scale(m + 1));
    let complexity = spec_m.len();
    let k_m = fejer_kernel(&spec_m, epsilon)?;
    let k_next = fejer_kernel(&spec_next, epsilon)?;

    let mut warnings = Vec::new();
    for (name, k) in [("K(m)", &k_m), ("K(m+1)", &k_next)] {
        if k.is_degenerate() {
            warnings.push(format!(
                "{name} has a degenerate Bohr set; its convolution is the identity"
            ));
        }
    }

    let structured_v = k_m.convolve(&values)?;
    let coarse_v = k_next.convolve(&values)?;
    let small_v: Vec<f64> = coarse_v
        .iter()
        .zip(&structured_v)
        .map(|(a, b)| a - b)
        .collect();
    let pseudo_v: Vec<f64> = values.iter().zip(&coarse_v).map(|(a, b)| a - b).collect();

    let structured = CyclicFunction::from_real(&structured_v)?;
    let small = CyclicFunction::from_real(&small_v)?;
    let pseudorandom = CyclicFunction::from_real(&pseudo_v)?;

    let reassembly_error = structured
        .add(&small)?
        .add(&pseudorandom)?
        .sub(f)?
        .l2_norm();
    let u2_of_fu = if pseudo_v.iter().all(|&v| v == 0.0) {
        0.0
    } else {
        gowers::u2(&pseudorandom)
    };
    let f_t = growth.eval(complexity as u64);
    let bounds = StrongBounds {
        u2_of_fu,
        u2_bound: 4.0 / f_t,
        l2_of_fs: small.l2_norm(),
        l2_bound: 4.0 * epsilon,
        mean_delta: (structured.mean().re - f.mean().re).abs(),
        reassembly_error,
        structured_min: structured_v.iter().copied().fold(f64::INFINITY, f64::min),
        structured_max: structured_v
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
        pseudorandom_max_abs: pseudorandom.max_abs(),
    };
    check_bounds(&bounds)?;

    Ok(StrongDecomposition {
        structured,
        small,
        pseudorandom,
        complexity,
        growth,
        epsilon,
        scale_index: m,
        log2_scales: log2_scales[..m + 2].to_vec(),
        annulus_mass,
        bohr_sizes: [k_m.bohr_size, k_next.bohr_size],
        bounds,
        warnings,
    })
}

fn check_bounds(b: &StrongBounds) -> Result<()> {
    let fail = |what: String| Err(Error::PostconditionViolation(what));
    if b.reassembly_error > 1e-9 {
        return fail(format!("reassembly error {}", b.reassembly_error));
    }
    if b.structured_min < -1e-9 || b.structured_max > 1.0 + 1e-9 {
        return fail(format!(
            "structured part spans [{}, {}]",
            b.structured_min, b.structured_max
        ));
    }
    if b.mean_delta > 1e-9 {
        return fail(format!("structured mean drifts by {}", b.mean_delta));
    }
    if b.pseudorandom_max_abs > 1.0 + 1e-9 {
        return fail(format!(
            "pseudorandom part reaches {}",
            b.pseudorandom_max_abs
        ));
    }
    if b.u2_of_fu > b.u2_bound {
        return fail(format!(
            "U2 of pseudorandom part {} exceeds {}",
            b.u2_of_fu, b.u2_bound
        ));
    }
    if b.l2_of_fs > b.l2_bound {
        return fail(format!(
            "L2 of small part {} exceeds {}",
            b.l2_of_fs, b.l2_bound
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_half() {
        let f = CyclicFunction::from_real(&vec![0.5; 128]).unwrap();
        let d = strong_decompose(&f, 0.1, GrowthFunction::Exp(2)).unwrap();
        assert!(d
            .structured
            .values()
            .iter()
            .all(|v| (v.re - 0.5).abs() < 1e-12));
        assert!(d.small.max_abs() < 1e-12);
        assert!(d.pseudorandom.max_abs() < 1e-12);
        assert!(d.complexity <= 1);
    }

    #[test]
    fn random_half_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..512)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 })
            .collect();
        let f = CyclicFunction::from_real(&v).unwrap();
        let d = strong_decompose(&f, 0.1, GrowthFunction::Exp(2)).unwrap();
        assert!(d.bounds.u2_of_fu <= d.bounds.u2_bound);
    }

    #[test]
    fn rejects_bad_epsilon_and_range() {
        let f = CyclicFunction::from_real(&[0.5; 8]).unwrap();
        assert!(strong_decompose(&f, 0.3, GrowthFunction::Exp(2)).is_err());
        let g = CyclicFunction::from_real(&[1.5; 8]).unwrap();
        assert!(matches!(
            strong_decompose(&g, 0.5, GrowthFunction::Exp(2)),
            Err(Error::ContractViolation(_))
        ));
    }
}
