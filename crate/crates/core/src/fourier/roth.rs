use crate::cyclic::{embed_real_interval, IntervalEmbedding};
use crate::error::{invalid, Error, Result};
use crate::gowers;
use crate::primes::next_prime;
use serde::Serialize;

/// Phase fluctuation (in turns) allowed on each piece during a density-increment step.
pub const INCREMENT_PHASE_TOLERANCE: f64 = 1.0 / 16.0;

/// `{start + i·step : 0 ≤ i < length}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub start: u64,
    pub step: u64,
    pub length: u64,
}

impl Progression {
    pub fn element(&self, i: u64) -> u64 {
        self.start + i * self.step
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.length).map(|i| self.element(i))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirichletPartition {
    pub interval_length: u64,
    pub frequency: u64,
    pub modulus: u64,
    /// Step `s` with `‖ξs/N‖ ≤ 1/⌈√N⌉`.
    pub step: u64,
    /// Signed residue `d` with `ξs ≡ d (mod N)`, `|d| ≤ N/2`.
    pub drift: i64,
    pub tolerance: f64,
    pub pieces: Vec<Progression>,
}

fn signed_residue(a: i128, n: u64) -> i64 {
    let n = n as i128;
    let r = a.rem_euclid(n);
    (if 2 * r > n { r - n } else { r }) as i64
}

fn ceil_sqrt(n: u64) -> u64 {
    let mut q = (n as f64).sqrt() as u64;
    while q * q < n {
        q += 1;
    }
    while q > 0 && (q - 1) * (q - 1) >= n {
        q -= 1;
    }
    q
}

/// Splits `[1, L]` into progressions of a common step on which `x ↦ ξx/N` moves
/// by at most `tolerance` turns. Every piece is checked from exact residues.
fn partition_with_tolerance(l: u64, xi: u64, n: u64, tolerance: f64) -> Result<DirichletPartition> {
    let q = ceil_sqrt(n);
    let xi = xi % n;
    let (step, drift) = (1..=q.max(1))
        .map(|s| (s, signed_residue(xi as i128 * s as i128, n)))
        .find(|&(_, d)| d.unsigned_abs() as u128 * q as u128 <= n as u128)
        .ok_or_else(|| {
            Error::PostconditionViolation(format!("no Dirichlet step for xi={xi}, N={n}"))
        })?;
    let max_len = if drift == 0 {
        l
    } else {
        let mut len = 1 + (tolerance * n as f64 / drift.unsigned_abs() as f64).floor() as u64;
        while len > 1 && (len - 1) as f64 * drift.unsigned_abs() as f64 / n as f64 > tolerance {
            len -= 1;
        }
        len.min(l).max(1)
    };
    let mut pieces = Vec::new();
    for r in 1..=step.min(l) {
        let count = (l - r) / step + 1;
        let mut done = 0;
        while done < count {
            let len = max_len.min(count - done);
            pieces.push(Progression {
                start: r + done * step,
                step,
                length: len,
            });
            done += len;
        }
    }
    let partition = DirichletPartition {
        interval_length: l,
        frequency: xi,
        modulus: n,
        step,
        drift,
        tolerance,
        pieces,
    };
    verify_partition(&partition)?;
    Ok(partition)
}

fn verify_partition(p: &DirichletPartition) -> Result<()> {
    let mut covered = vec![false; p.interval_length as usize + 1];
    for piece in &p.pieces {
        let base = piece.start as i128 * p.frequency as i128;
        for (j, x) in piece.elements().enumerate() {
            if x == 0 || x > p.interval_length || covered[x as usize] {
                return Err(Error::PostconditionViolation(format!(
                    "piece covers {x} twice or out of range"
                )));
            }
            covered[x as usize] = true;
            let moved = signed_residue(x as i128 * p.frequency as i128 - base, p.modulus);
            if j > 0 && moved.unsigned_abs() as f64 / p.modulus as f64 > p.tolerance + 1e-15 {
                return Err(Error::PostconditionViolation(format!(
                    "phase moves {moved}/{} on piece starting at {}",
                    p.modulus, piece.start
                )));
            }
        }
    }
    if covered[1..].iter().any(|c| !c) {
        return Err(Error::PostconditionViolation(
            "partition does not cover the interval".into(),
        ));
    }
    Ok(())
}

/// Dirichlet partition of `[1, L]` with phase fluctuation at most `η²/100` per piece.
pub fn dirichlet_partition(l: u64, xi: u64, n: u64, eta: f64) -> Result<DirichletPartition> {
    if n == 0 || l == 0 {
        return Err(invalid("interval length and modulus must be positive"));
    }
    if 2 * l > n {
        return Err(invalid(format!(
            "interval length {l} exceeds half the modulus {n}"
        )));
    }
    if !(eta > 0.0) {
        return Err(invalid("eta must be positive"));
    }
    if eta * eta * (n as f64).sqrt() < 4.0 {
        return Err(Error::ScaleExhausted(format!(
            "eta^2 sqrt(N) = {} < 4",
            eta * eta * (n as f64).sqrt()
        )));
    }
    partition_with_tolerance(l, xi, n, eta * eta / 100.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudorandomCertificate {
    pub u2_value: f64,
    pub eta: f64,
    pub modulus: u64,
    pub mean: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProgressionCertificate {
    pub start: u64,
    pub difference: u64,
    pub length: u64,
    pub measured_density: f64,
    pub baseline_density: f64,
    pub gain: f64,
    pub frequency: u64,
    pub modulus: u64,
    pub u2_value: f64,
}

impl ProgressionCertificate {
    pub fn progression(&self) -> Progression {
        Progression {
            start: self.start,
            step: self.difference,
            length: self.length,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IncrementOutcome {
    Pseudorandom(PseudorandomCertificate),
    Increment(ProgressionCertificate),
}

fn mean_on(values: &[f64], p: &Progression) -> f64 {
    let terms: Vec<f64> = p.elements().map(|x| values[x as usize - 1]).collect();
    crate::reduce::sum_f64(&terms) / p.length as f64
}

/// One step of the density-increment argument for `f` on `[1, L]` (`values[i] = f(i+1)`).
pub fn density_increment_step(values: &[f64], eta: f64) -> Result<IncrementOutcome> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("eta must lie in (0,1)"));
    }
    let l = values.len();
    if l == 0 {
        return Err(invalid("interval must be nonempty"));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::ContractViolation(format!("value {v} outside [0,1]")));
    }
    let n = next_prime(3 * l as u64);
    let mean = crate::reduce::sum_f64(values) / l as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let emb = IntervalEmbedding::with_modulus(l, n as usize, 3)?;
    let g = embed_real_interval(&centered, &emb)?;
    let u2_value = gowers::u2(&g);
    if u2_value <= eta {
        return Ok(IncrementOutcome::Pseudorandom(PseudorandomCertificate {
            u2_value,
            eta,
            modulus: n,
            mean,
        }));
    }
    let spectrum = g.dft();
    let (xi, _) = spectrum.coefficients().iter().enumerate().skip(1).fold(
        (0usize, -1.0f64),
        |best, (i, c)| {
            if c.norm() > best.1 {
                (i, c.norm())
            } else {
                best
            }
        },
    );

    let partition = partition_with_tolerance(l as u64, xi as u64, n, INCREMENT_PHASE_TOLERANCE)?;
    if l > 1 && partition.pieces.iter().all(|p| p.length == 1) {
        return Err(Error::ScaleExhausted(format!(
            "every piece of the partition of [1,{l}] at frequency {xi} mod {n} is a single point"
        )));
    }
    let need = eta * eta / 400.0;
    let best = partition
        .pieces
        .iter()
        .map(|p| (p, mean_on(values, p) - mean))
        .filter(|(_, gain)| *gain >= need)
        .fold(None::<(&Progression, f64)>, |best, (p, gain)| match best {
            Some((bp, bg)) if bp.length > p.length || (bp.length == p.length && bg >= gain) => {
                Some((bp, bg))
            }
            _ => Some((p, gain)),
        });
    let (p, gain) = best.ok_or_else(|| {
        Error::IncrementNotFound(format!(
            "no piece of {} gains {need} at frequency {xi}",
            partition.pieces.len()
        ))
    })?;
    Ok(IncrementOutcome::Increment(ProgressionCertificate {
        start: p.start,
        difference: p.step,
        length: p.length,
        measured_density: mean + gain,
        baseline_density: mean,
        gain,
        frequency: xi as u64,
        modulus: n,
        u2_value,
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct RothOutcome {
    pub delta: f64,
    pub eta: f64,
    pub iteration_cap: u64,
    /// Increments in the coordinates of the original interval.
    pub iterations: Vec<ProgressionCertificate>,
    pub final_progression: Progression,
    pub final_density: f64,
    pub final_modulus: u64,
    pub pseudorandom: PseudorandomCertificate,
    /// `(a, d)` with `a, a+d, a+2d` in the final progression's copy of the set, `d` of either sign or zero.
    pub actual_count: u64,
    /// The same count for the full interval `[1, L′]`.
    pub interval_count: u64,
    /// `δ′³·interval_count − 7η·N′²`.
    pub ap3_count_lower_bound: f64,
    pub holds: bool,
}

fn interval_ap_pairs(l: u64) -> u64 {
    let odd = l.div_ceil(2);
    let even = l / 2;
    odd * odd + even * even
}

/// Density-increment iteration on `A ⊆ [1, L]` until the set looks pseudorandom on
/// the current progression, then compares the actual 3-AP count with the bound
/// obtained from the generalized von Neumann inequality.
pub fn roth_iterate(set: &[u64], l: u64, delta: f64, eta: f64) -> Result<RothOutcome> {
    if l == 0 {
        return Err(invalid("L must be positive"));
    }
    if !(delta > 0.0 && delta <= 1.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("need delta in (0,1] and eta in (0,1)"));
    }
    let mut member = vec![false; l as usize + 1];
    for &a in set {
        if a == 0 || a > l {
            return Err(Error::ContractViolation(format!(
                "element {a} outside [1,{l}]"
            )));
        }
        member[a as usize] = true;
    }
    let size = member.iter().filter(|&&b| b).count();
    if (size as f64) < delta * l as f64 * (1.0 - 1e-12) {
        return Err(Error::ContractViolation(format!(
            "|A| = {size} < delta L = {}",
            delta * l as f64
        )));
    }
    let iteration_cap = (400.0 * (1.0 - delta) / (eta * eta)).ceil() as u64;
    let mut current = Progression {
        start: 1,
        step: 1,
        length: l,
    };
    let mut iterations = Vec::new();
    loop {
        let values: Vec<f64> = current
            .elements()
            .map(|x| if member[x as usize] { 1.0 } else { 0.0 })
            .collect();
        match density_increment_step(&values, eta)? {
            IncrementOutcome::Increment(cert) => {
                let local = cert.progression();
                let next = Progression {
                    start: current.element(local.start - 1),
                    step: current.step * local.step,
                    length: local.length,
                };
                let hits = next.elements().filter(|&x| member[x as usize]).count() as u64;
                let base_hits = values.iter().filter(|&&v| v == 1.0).count() as u64;
                // gain ≥ η²/400 ⇔ 400·(hits·L₀ − base·L₁) ≥ η²·L₀·L₁, all integers except η².
                let lhs = 400.0
                    * (hits as f64 * current.length as f64 - base_hits as f64 * next.length as f64);
                if lhs < eta * eta * current.length as f64 * next.length as f64 * (1.0 - 1e-12) {
                    return Err(Error::PostconditionViolation(format!(
                        "recount of progression {next:?} does not confirm the gain"
                    )));
                }
                iterations.push(ProgressionCertificate {
                    start: next.start,
                    difference: next.step,
                    length: next.length,
                    measured_density: hits as f64 / next.length as f64,
                    baseline_density: base_hits as f64 / current.length as f64,
                    gain: hits as f64 / next.length as f64
                        - base_hits as f64 / current.length as f64,
                    ..cert
                });
                current = next;
                if iterations.len() as u64 > iteration_cap {
                    return Err(Error::PostconditionViolation(format!(
                        "{} increments exceed the density ceiling cap {iteration_cap}",
                        iterations.len()
                    )));
                }
            }
            IncrementOutcome::Pseudorandom(pseudorandom) => {
                let len = current.length as usize;
                let n = next_prime(3 * current.length);
                let emb = IntervalEmbedding::with_modulus(len, n as usize, 3)?;
                let f = embed_real_interval(&values, &emb)?;
                let raw = gowers::ap3_spectral(&f, &f, &f).re * (n as f64) * (n as f64);
                let rounded = raw.round();
                if (raw - rounded).abs() > 1e-3 * raw.abs().max(1.0) || rounded < 0.0 {
                    return Err(Error::PostconditionViolation(format!(
                        "spectral 3-AP count {raw} is not integral"
                    )));
                }
                let actual_count = rounded as u64;
                let interval_count = interval_ap_pairs(current.length);
                let d = pseudorandom.mean;
                let bound = d.powi(3) * interval_count as f64 - 7.0 * eta * (n as f64) * (n as f64);
                return Ok(RothOutcome {
                    delta,
                    eta,
                    iteration_cap,
                    iterations,
                    final_progression: current,
                    final_density: d,
                    final_modulus: n,
                    pseudorandom,
                    actual_count,
                    interval_count,
                    ap3_count_lower_bound: bound,
                    holds: actual_count as f64 >= bound,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frequency_is_one_piece() {
        let p = dirichlet_partition(100, 0, 10007, 0.5).unwrap();
        assert_eq!(
            p.pieces,
            vec![Progression {
                start: 1,
                step: 1,
                length: 100
            }]
        );
    }

    #[test]
    fn half_frequency_uses_step_two() {
        let p = partition_with_tolerance(50, 50, 100, 0.01).unwrap();
        assert_eq!(p.step, 2);
        assert_eq!(p.drift, 0);
        assert_eq!(p.pieces.len(), 2);
    }

    #[test]
    fn scale_exhaustion() {
        assert!(matches!(
            dirichlet_partition(10, 3, 101, 0.5),
            Err(Error::ScaleExhausted(_))
        ));
        let p = dirichlet_partition(5000, 73, 10007, 0.5).unwrap();
        assert_eq!(p.pieces.iter().map(|q| q.length).sum::<u64>(), 5000);
    }

    #[test]
    fn constant_is_pseudorandom() {
        let out = density_increment_step(&[0.3; 500], 0.1).unwrap();
        assert!(matches!(out, IncrementOutcome::Pseudorandom(ref c) if c.u2_value < 1e-12));
    }

    #[test]
    fn full_interval_has_no_iterations() {
        let set: Vec<u64> = (1..=200).collect();
        let out = roth_iterate(&set, 200, 1.0, 0.2).unwrap();
        assert!(out.iterations.is_empty());
        assert_eq!(out.actual_count, interval_ap_pairs(200));
        assert!(out.holds);
    }

    #[test]
    fn ap_pairs_formula() {
        for l in 1..30u64 {
            let brute = (1..=l)
                .flat_map(|a| (1..=l).map(move |c| (a, c)))
                .filter(|(a, c)| (a + c) % 2 == 0)
                .count() as u64;
            assert_eq!(interval_ap_pairs(l), brute);
        }
    }
}
