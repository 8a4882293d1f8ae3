use super::strong::{strong_decompose, StrongDecomposition};
use crate::cyclic::{CyclicFunction, Spectrum};
use crate::error::{invalid, Error, Result};
use crate::gowers;
use crate::growth::GrowthFunction;
use crate::report::Check;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub delta: f64,
    pub epsilon: f64,
    pub decomposition: StrongDecomposition,
    pub almost_period_count: usize,
    pub almost_period_density: f64,
    pub structured_mean: f64,
    pub structured_cube_mean: f64,
    pub lambda3: f64,
    pub links: Vec<Check>,
    pub all_hold: bool,
}

/// `E_x h(x) h(x+n) h(x+2n)` for real `h`.
fn triple_average(h: &[f64], n: usize) -> f64 {
    let len = h.len();
    let terms: Vec<f64> = (0..len)
        .map(|x| h[x] * h[(x + n) % len] * h[(x + 2 * n) % len])
        .collect();
    crate::reduce::sum_f64(&terms) / len as f64
}

/// Per-member check aggregated to the worst case.
fn worst_member(name: &str, members: &[usize], lhs: impl Fn(usize) -> f64, rhs: f64) -> Check {
    let worst =
        members
            .iter()
            .map(|&n| (n, lhs(n)))
            .fold(None::<(usize, f64)>, |w, (n, v)| match w {
                Some((_, wv)) if wv <= v => w,
                _ => Some((n, v)),
            });
    match worst {
        Some((n, v)) => Check::at_least(format!("{name} (worst n = {n})"), v, rhs),
        None => Check::at_least(format!("{name} (no members)"), rhs, rhs),
    }
}

/// Evaluates each link of the lower-bound chain for `Λ₃(f,f,f)` when `E f ≥ δ`.
pub fn structured_count_chain(
    f: &CyclicFunction,
    epsilon: f64,
    growth: GrowthFunction,
    delta: f64,
) -> Result<ChainReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta must lie in (0,1]"));
    }
    let mean_f = f.mean().re;
    if mean_f < delta - 1e-12 {
        return Err(Error::ContractViolation(format!(
            "mean {mean_f} < delta {delta}"
        )));
    }
    let decomposition = strong_decompose(f, epsilon, growth)?;
    let n = f.modulus();
    let h = decomposition.structured.real_parts();
    let g: Vec<f64> = decomposition
        .structured
        .add(&decomposition.small)?
        .real_parts();

    // ‖Tⁿh − h‖² = 2‖h‖² − 2 Re E_x h(x+n) h(x), with the autocorrelation from |ĥ|².
    let hat = decomposition.structured.dft();
    let power: Vec<Complex64> = hat
        .coefficients()
        .iter()
        .map(|c| Complex64::new(c.norm_sqr(), 0.0))
        .collect();
    let auto = Spectrum::new(power)?.idft();
    let energy = auto.values()[0].re;
    let members: Vec<usize> = (0..n)
        .filter(|&s| (2.0 * (energy - auto.values()[s].re)).max(0.0).sqrt() <= epsilon)
        .collect();
    let density = members.len() as f64 / n as f64;

    let structured_mean = crate::reduce::sum_f64(&h) / n as f64;
    let cubes: Vec<f64> = h.iter().map(|v| v * v * v).collect();
    let structured_cube_mean = crate::reduce::sum_f64(&cubes) / n as f64;
    let d3 = delta.powi(3);

    let mut links = vec![
        worst_member(
            "E h T^n h T^2n h >= E h^3 - 3 eps on almost periods",
            &members,
            |s| triple_average(&h, s),
            structured_cube_mean - 3.0 * epsilon - 1e-9,
        ),
        Check::at_least(
            "E h^3 >= (E h)^3",
            structured_cube_mean + 1e-12,
            structured_mean.powi(3),
        ),
        Check::at_least(
            "(E h)^3 - 3 eps >= delta^3 / 2",
            structured_mean.powi(3) - 3.0 * epsilon,
            d3 / 2.0,
        ),
        worst_member(
            "E g T^n g T^2n g >= delta^3 / 4 on almost periods",
            &members,
            |s| triple_average(&g, s),
            d3 / 4.0,
        ),
    ];

    let gf = CyclicFunction::from_real(&g)?;
    let lambda_g = gowers::ap3_spectral(&gf, &gf, &gf).re;
    links.push(Check::at_least(
        "Lambda3(g) >= delta^3 c / 4",
        lambda_g,
        d3 * density / 4.0,
    ));
    let lambda3 = gowers::ap3_spectral(f, f, f).re;
    let u2_fu = decomposition.bounds.u2_of_fu;
    links.push(Check::at_least(
        "Lambda3(f) >= Lambda3(g) - 7 ||f_U||_U2",
        lambda3 + 1e-9,
        lambda_g - 7.0 * u2_fu,
    ));
    links.push(Check::at_least(
        "Lambda3(f) >= delta^3 c / 8",
        lambda3,
        d3 * density / 8.0,
    ));

    let all_hold = links.iter().all(|c| c.pass);
    Ok(ChainReport {
        delta,
        epsilon,
        decomposition,
        almost_period_count: members.len(),
        almost_period_density: density,
        structured_mean,
        structured_cube_mean,
        lambda3,
        links,
        all_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_chain_is_exact() {
        let f = CyclicFunction::from_real(&vec![0.6; 64]).unwrap();
        let r = structured_count_chain(&f, 0.1, GrowthFunction::Exp(2), 0.6).unwrap();
        assert_eq!(r.almost_period_count, 64);
        assert!((r.lambda3 - 0.216).abs() < 1e-12);
        assert!(r.links[0].pass && r.links[1].pass);
    }

    #[test]
    fn mean_below_delta_rejected() {
        let f = CyclicFunction::from_real(&[0.1; 16]).unwrap();
        assert!(structured_count_chain(&f, 0.1, GrowthFunction::Exp(2), 0.5).is_err());
    }
}
