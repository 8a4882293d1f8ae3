use super::edge::{conditional_expectation, energy, matmul, EdgeFunction, VertexPartition};
use super::norms::{box2_norm, gram};
use crate::error::{invalid, Error, Result};
use crate::growth::GrowthFunction;
use crate::report::Check;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const DICHOTOMY_ATTEMPTS: usize = 64;

/// Sets `A`, `B` with `|E f 1_A 1_B| ≥ η⁴/4`.
#[derive(Clone, Debug, Serialize)]
pub struct BoxWitness {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
    pub correlation: f64,
    pub target: f64,
    pub attempts: usize,
    /// `(x', y')` maximizing the cube density `Q`.
    pub pivot: (usize, usize),
}

/// `E_{x,y} f(x,y) 1_A(x) 1_B(y)`.
pub fn rectangle_correlation(f: &EdgeFunction, a: &[bool], b: &[bool]) -> f64 {
    let n = f.vertex_count();
    let mut s = 0.0;
    for x in (0..n).filter(|&x| a[x]) {
        let row = f.row(x);
        s += (0..n).filter(|&y| b[y]).map(|y| row[y]).sum::<f64>();
    }
    s / (n * n) as f64
}

struct Pivot {
    pivot: (usize, usize),
    /// Nonnegative weights `(a_s, b_t)` of the best sign combination.
    a: Vec<f64>,
    b: Vec<f64>,
    combos: Vec<(Vec<f64>, Vec<f64>, f64)>,
}

fn pivot(f: &EdgeFunction) -> Pivot {
    let n = f.vertex_count();
    let g = gram(f);
    // H(y', x') = Σ_x f(x, y') G(x, x'); Q(x', y') = f(x', y') H(y', x') / n.
    let h = matmul(f.transpose().values(), &g, n);
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for xp in 0..n {
        for yp in 0..n {
            let q = f.get(xp, yp) * h[yp * n + xp] / n as f64;
            if q > best.2 {
                best = (xp, yp, q);
            }
        }
    }
    let (xp, yp) = (best.0, best.1);
    let a: Vec<f64> = (0..n).map(|x| f.get(x, yp)).collect();
    let b: Vec<f64> = f.row(xp).to_vec();
    let split = |v: &[f64], s: f64| -> Vec<f64> { v.iter().map(|x| (s * x).max(0.0)).collect() };
    let fb = |aw: &[f64], bw: &[f64]| -> f64 {
        let mut s = 0.0;
        for x in 0..n {
            if aw[x] != 0.0 {
                s += aw[x] * f.row(x).iter().zip(bw).map(|(u, v)| u * v).sum::<f64>();
            }
        }
        s / (n * n) as f64
    };
    let mut combos = Vec::with_capacity(4);
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            let (aw, bw) = (split(&a, sa), split(&b, sb));
            let v = fb(&aw, &bw);
            combos.push((aw, bw, v));
        }
    }
    let i = (0..4).fold(0, |bi, i| {
        if combos[i].2.abs() > combos[bi].2.abs() {
            i
        } else {
            bi
        }
    });
    Pivot {
        pivot: (xp, yp),
        a: combos[i].0.clone(),
        b: combos[i].1.clone(),
        combos,
    }
}

/// Greedy rounding of fractional weights: each side in turn becomes the set where the
/// linear functional has the sign of `value`. Never decreases `|correlation|`.
fn derandomized(f: &EdgeFunction, bw: &[f64], value: f64) -> (Vec<bool>, Vec<bool>) {
    let n = f.vertex_count();
    let sign = if value >= 0.0 { 1.0 } else { -1.0 };
    let a: Vec<bool> = (0..n)
        .map(|x| sign * f.row(x).iter().zip(bw).map(|(u, v)| u * v).sum::<f64>() > 0.0)
        .collect();
    let b: Vec<bool> = (0..n)
        .map(|y| sign * (0..n).filter(|&x| a[x]).map(|x| f.get(x, y)).sum::<f64>() > 0.0)
        .collect();
    (a, b)
}

fn random_round(w: &[f64], rng: &mut ChaCha8Rng) -> Vec<bool> {
    w.iter().map(|&p| rng.gen::<f64>() < p).collect()
}

/// Given `‖f‖_{□²} ≥ η` with `|f| ≤ 1`, finds `A`, `B` with `|E f 1_A 1_B| ≥ η⁴/4` by
/// seeded random rounding of the best sign combination.
pub fn box_dichotomy(f: &EdgeFunction, eta: f64, seed: u64) -> Result<BoxWitness> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta must lie in (0, 1]"));
    }
    if f.max_abs() > 1.0 + 1e-12 {
        return Err(Error::ContractViolation(
            "edge function exceeds magnitude 1".into(),
        ));
    }
    let norm = box2_norm(f);
    if norm < eta {
        return Err(Error::ContractViolation(format!(
            "box norm {norm} is below eta {eta}"
        )));
    }
    let target = eta.powi(4) / 4.0;
    let p = pivot(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for attempt in 1..=DICHOTOMY_ATTEMPTS {
        let a = random_round(&p.a, &mut rng);
        let b = random_round(&p.b, &mut rng);
        let c = rectangle_correlation(f, &a, &b);
        if c.abs() >= target {
            return Ok(BoxWitness {
                a,
                b,
                correlation: c,
                target,
                attempts: attempt,
                pivot: p.pivot,
            });
        }
        best = best.max(c.abs());
    }
    Err(Error::DichotomyFailed {
        attempts: DICHOTOMY_ATTEMPTS,
        target,
        best,
    })
}

/// Candidate rectangles for refining against the residual: greedy roundings of all four
/// sign combinations plus seeded random roundings of the best one.
fn rectangle_candidates(f: &EdgeFunction, seed: u64) -> Vec<(Vec<bool>, Vec<bool>)> {
    let p = pivot(f);
    let mut out: Vec<_> = p
        .combos
        .iter()
        .map(|(_, bw, v)| derandomized(f, bw, *v))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..DICHOTOMY_ATTEMPTS {
        let a = random_round(&p.a, &mut rng);
        let b = random_round(&p.b, &mut rng);
        out.push((a, b));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakRegularity {
    pub epsilon: f64,
    pub partition: VertexPartition,
    #[serde(skip)]
    pub structured: EdgeFunction,
    #[serde(skip)]
    pub pseudorandom: EdgeFunction,
    pub iterations: usize,
    pub generating_sets: usize,
    pub energies: Vec<f64>,
    pub residual_box2: f64,
    pub checks: Vec<Check>,
}

fn check_graphon(f: &EdgeFunction) -> Result<()> {
    if !f.in_unit_interval() {
        return Err(Error::ContractViolation(
            "edge weights must lie in [0, 1]".into(),
        ));
    }
    Ok(())
}

/// Energy increment: refine by dichotomy rectangles of the residual until its box norm is
/// at most `ε`. Each step must raise the energy by at least `ε⁸/16`.
pub fn weak_regularize(f: &EdgeFunction, epsilon: f64, seed: u64) -> Result<WeakRegularity> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid("epsilon must lie in (0, 1]"));
    }
    check_graphon(f)?;
    let n = f.vertex_count();
    let cap = (16.0 / epsilon.powi(8)).ceil() as usize;
    let gain = epsilon.powi(8) / 16.0;
    let mut p = VertexPartition::trivial(n);
    let mut structured = conditional_expectation(f, &p)?;
    let mut energies = vec![structured.l2_norm().powi(2)];
    let mut checks = Vec::new();
    let mut iterations = 0;
    loop {
        let residual = f.sub(&structured)?;
        let r = box2_norm(&residual);
        if r <= epsilon {
            let sets = 2 * iterations;
            checks.push(Check::at_most("residual box norm <= epsilon", r, epsilon));
            checks.push(Check::at_most(
                "generating sets <= 32/eps^8",
                sets as f64,
                32.0 / epsilon.powi(8),
            ));
            checks.push(Check::close(
                "reassembly",
                structured.add(&residual)?.sub(f)?.max_abs(),
                0.0,
                1e-12,
            ));
            return Ok(WeakRegularity {
                epsilon,
                partition: p,
                structured,
                pseudorandom: residual,
                iterations,
                generating_sets: sets,
                energies,
                residual_box2: r,
                checks,
            });
        }
        if iterations >= cap {
            return Err(Error::PostconditionViolation(format!(
                "energy increment exceeded {cap} iterations"
            )));
        }
        let w = box_dichotomy(&residual, epsilon, seed.wrapping_add(iterations as u64))?;
        p = p.refine(&w.a, &w.b);
        structured = conditional_expectation(f, &p)?;
        let e = structured.l2_norm().powi(2);
        let prev = *energies.last().unwrap();
        let c = Check::at_least(
            format!("energy gain at step {}", iterations + 1),
            e - prev,
            gain - 1e-12,
        );
        if !c.pass {
            return Err(Error::PostconditionViolation(format!(
                "energy rose by {} < eps^8/16 = {gain}",
                e - prev
            )));
        }
        checks.push(c);
        energies.push(e);
        iterations += 1;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphBounds {
    pub box2_of_fu: f64,
    pub box2_bound: f64,
    pub l2_of_fs: f64,
    pub l2_bound: f64,
    pub reassembly_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphDecomposition {
    pub epsilon: f64,
    pub growth: GrowthFunction,
    /// Partition `𝒫_n` whose conditional expectation is the structured part.
    pub partition: VertexPartition,
    /// The finer partition `𝒫_{n'}`.
    pub fine_partition: VertexPartition,
    #[serde(skip)]
    pub structured: EdgeFunction,
    #[serde(skip)]
    pub small: EdgeFunction,
    #[serde(skip)]
    pub pseudorandom: EdgeFunction,
    #[serde(rename = "T")]
    pub complexity: u64,
    pub n: u64,
    pub n_prime: u64,
    /// Energies of the refinement sequence until it becomes stationary.
    pub energies: Vec<f64>,
    pub stationary_from: usize,
    pub bounds: GraphBounds,
    pub checks: Vec<Check>,
}

/// Lazily built refinement sequence `𝒫_0 ⊆ 𝒫_1 ⊆ …`, constant once the residual vanishes.
struct Sequence<'a> {
    f: &'a EdgeFunction,
    seed: u64,
    partitions: Vec<VertexPartition>,
    energies: Vec<f64>,
    frozen: bool,
}

impl<'a> Sequence<'a> {
    fn new(f: &'a EdgeFunction, seed: u64) -> Result<Self> {
        let p = VertexPartition::trivial(f.vertex_count());
        let e = energy(f, &p)?;
        Ok(Self {
            f,
            seed,
            partitions: vec![p],
            energies: vec![e],
            frozen: false,
        })
    }

    fn extend(&mut self) -> Result<()> {
        let k = self.partitions.len() - 1;
        let p = &self.partitions[k];
        let residual = self.f.sub(&conditional_expectation(self.f, p)?)?;
        let eta = box2_norm(&residual);
        if eta <= 1e-12 || p.cell_count() == self.f.vertex_count() {
            self.frozen = true;
            return Ok(());
        }
        let mut best: Option<(VertexPartition, f64)> = None;
        for (a, b) in rectangle_candidates(&residual, self.seed.wrapping_add(k as u64)) {
            let q = p.refine(&a, &b);
            let e = energy(self.f, &q)?;
            if best.as_ref().map_or(true, |(_, be)| e > *be) {
                best = Some((q, e));
            }
        }
        let (q, e) = best.expect("candidate list is nonempty");
        let prev = self.energies[k];
        if e - prev < eta.powi(8) / 16.0 - 1e-12 {
            return Err(Error::PostconditionViolation(format!(
                "refinement {k} raised energy by {} < eta^8/16 = {}",
                e - prev,
                eta.powi(8) / 16.0
            )));
        }
        self.partitions.push(q);
        self.energies.push(e);
        Ok(())
    }

    fn index(&mut self, i: u128) -> Result<usize> {
        while !self.frozen && (self.partitions.len() as u128) <= i {
            self.extend()?;
        }
        Ok(i.min(self.partitions.len() as u128 - 1) as usize)
    }

    fn energy(&mut self, i: u128) -> Result<f64> {
        let k = self.index(i)?;
        Ok(self.energies[k])
    }
}

/// Strong regularity: `f = f_{U⊥} + f_S + f_U` with `f_{U⊥} = E(f | 𝒫_n)` of complexity
/// `T = 2n`, `‖f_S‖_{L²} ≤ 4ε` and `‖f_U‖_{□²} ≤ 4/F(T)`, found by a double pigeonhole over
/// the energy of a refinement sequence.
pub fn strong_regularize(
    f: &EdgeFunction,
    epsilon: f64,
    growth: GrowthFunction,
    seed: u64,
) -> Result<GraphDecomposition> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid("epsilon must lie in (0, 1]"));
    }
    growth.validate()?;
    check_graphon(f)?;
    let mut seq = Sequence::new(f, seed)?;
    let step = |n: u128| -> u128 {
        let fv = growth.eval_exact(n.saturating_mul(2).min(u64::MAX as u128) as u64);
        fv.saturating_pow(4)
    };
    // Outer pigeonhole over n_{j+1} = n_j + F(2 n_j)^4 + 1.
    let eps2 = epsilon * epsilon;
    let outer_cap = (1.0 / eps2).ceil() as usize + 1;
    let mut n: u128 = 0;
    let mut found = false;
    for _ in 0..=outer_cap {
        let next = n.saturating_add(step(n)).saturating_add(1);
        if seq.energy(next)? <= seq.energy(n)? + eps2 {
            found = true;
            break;
        }
        n = next;
    }
    if !found {
        return Err(Error::PostconditionViolation(
            "outer energy pigeonhole did not terminate".into(),
        ));
    }
    // Inner pigeonhole: first n' in [n, n + F(2n)^4] with E_{n'+1} ≤ E_{n'} + 1/F(2n)^4.
    let window = step(n);
    let tol = 1.0
        / growth
            .eval(n.saturating_mul(2).min(u64::MAX as u128) as u64)
            .powi(4);
    let mut n_prime = n;
    loop {
        if seq.energy(n_prime.saturating_add(1))? <= seq.energy(n_prime)? + tol {
            break;
        }
        if n_prime - n >= window {
            return Err(Error::PostconditionViolation(
                "inner energy pigeonhole did not terminate".into(),
            ));
        }
        n_prime = n_prime.saturating_add(1);
    }
    let coarse_idx = seq.index(n)?;
    let fine_idx = seq.index(n_prime)?;
    let coarse = seq.partitions[coarse_idx].clone();
    let fine = seq.partitions[fine_idx].clone();
    let structured = conditional_expectation(f, &coarse)?;
    let fine_exp = conditional_expectation(f, &fine)?;
    let small = fine_exp.sub(&structured)?;
    let pseudorandom = f.sub(&fine_exp)?;

    let complexity = n.saturating_mul(2).min(u64::MAX as u128) as u64;
    let fu = box2_norm(&pseudorandom);
    let fu_bound = 4.0 / growth.eval(complexity);
    let fs = small.l2_norm();
    let reassembly = structured
        .add(&small)?
        .add(&pseudorandom)?
        .sub(f)?
        .max_abs();
    let mut checks = vec![
        Check::at_most("box norm of f_U <= 4/F(T)", fu, fu_bound + 1e-12),
        Check::at_most("L2 norm of f_S <= 4 eps", fs, 4.0 * epsilon + 1e-12),
        Check::close("reassembly", reassembly, 0.0, 1e-12),
        Check::at_least(
            "structured part >= 0",
            structured.values().iter().fold(1.0f64, |m, v| m.min(*v)),
            -1e-12,
        ),
        Check::at_most("structured part <= 1", structured.max_abs(), 1.0 + 1e-12),
    ];
    let monotone = seq.energies.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    checks.push(Check::equal(
        "energies nondecreasing",
        monotone as u8 as f64,
        1.0,
    ));
    if let Some(c) = checks.iter().find(|c| !c.pass) {
        return Err(Error::PostconditionViolation(format!(
            "{}: {} vs {}",
            c.name, c.lhs, c.rhs
        )));
    }
    Ok(GraphDecomposition {
        epsilon,
        growth,
        partition: coarse,
        fine_partition: fine,
        structured,
        small,
        pseudorandom,
        complexity,
        n: n.min(u64::MAX as u128) as u64,
        n_prime: n_prime.min(u64::MAX as u128) as u64,
        stationary_from: seq.partitions.len() - 1,
        energies: seq.energies,
        bounds: GraphBounds {
            box2_of_fu: fu,
            box2_bound: fu_bound,
            l2_of_fs: fs,
            l2_bound: 4.0 * epsilon,
            reassembly_error: reassembly,
        },
        checks,
    })
}
