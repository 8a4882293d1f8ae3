//! Gowers uniformity norms U² and U³ on Z/NZ, the multiplicative derivative,
//! the 3- and 4-term progression counting forms, and runtime checks of the
//! generalized von Neumann inequalities.

use crate::cyclic::{check_same_modulus, CyclicFunction};
use crate::error::{invalid, Error, Result};
use crate::reduce;
use num_complex::Complex64;
use serde::Serialize;
use std::time::Instant;

/// Operands are "bounded by one" up to this slack.
pub const BOUND_SLACK: f64 = 1e-12;
/// Slack used when declaring an inequality to hold.
pub const INEQUALITY_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormKind {
    #[serde(rename = "U2_direct")]
    U2Direct,
    #[serde(rename = "U2_spectral")]
    U2Spectral,
    U3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Direct,
    Spectral,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub norm_kind: NormKind,
    pub value: f64,
    pub modulus: usize,
    /// Wall-clock seconds; omitted when timings are masked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

impl NormReport {
    pub fn without_timing(mut self) -> Self {
        self.elapsed = None;
        self
    }
}

/// `Δ_h f(x) = f(x+h) · conj(f(x))`.
pub fn derivative(f: &CyclicFunction, h: i64) -> CyclicFunction {
    let n = f.modulus();
    let shift = h.rem_euclid(n as i64) as usize;
    let v = f.values();
    let out = (0..n).map(|x| v[(x + shift) % n] * v[x].conj()).collect();
    CyclicFunction::from_vec_unchecked(out)
}

/// `Σ_ξ |f̂(ξ)|⁴`, i.e. the fourth power of the U² norm.
pub fn u2_fourth_power_spectral(f: &CyclicFunction) -> f64 {
    let s = f.dft();
    let quartics: Vec<f64> = s
        .coefficients()
        .iter()
        .map(|c| c.norm_sqr() * c.norm_sqr())
        .collect();
    reduce::sum_f64(&quartics)
}

/// `E_n |E_x f(x+n) conj(f(x))|²` by the defining double loop.
pub fn u2_fourth_power_direct(f: &CyclicFunction) -> f64 {
    let n = f.modulus();
    let v = f.values();
    let total = reduce::par_sum_f64(0..n, |shift| {
        let terms: Vec<Complex64> = (0..n).map(|x| v[(x + shift) % n] * v[x].conj()).collect();
        (reduce::sum_c64(&terms) / n as f64).norm_sqr()
    });
    total / n as f64
}

fn fourth_root(x: f64) -> f64 {
    x.max(0.0).sqrt().sqrt()
}

pub fn u2_norm(f: &CyclicFunction, method: NormMethod) -> NormReport {
    let start = Instant::now();
    let (kind, value) = match method {
        NormMethod::Direct => (NormKind::U2Direct, fourth_root(u2_fourth_power_direct(f))),
        NormMethod::Spectral => (
            NormKind::U2Spectral,
            fourth_root(u2_fourth_power_spectral(f)),
        ),
    };
    NormReport {
        norm_kind: kind,
        value,
        modulus: f.modulus(),
        elapsed: Some(start.elapsed().as_secs_f64()),
    }
}

/// Convenience: spectral U² value.
pub fn u2(f: &CyclicFunction) -> f64 {
    fourth_root(u2_fourth_power_spectral(f))
}

/// `E_n ‖Δ_n f‖_{U²}⁴`, the eighth power of the U³ norm. Each inner U² is spectral,
/// so the total cost is O(N² log N); the outer average runs in parallel.
pub fn u3_eighth_power(f: &CyclicFunction) -> f64 {
    let n = f.modulus();
    let total = reduce::par_sum_f64(0..n, |h| u2_fourth_power_spectral(&derivative(f, h as i64)));
    total / n as f64
}

pub fn u3_norm(f: &CyclicFunction) -> NormReport {
    let start = Instant::now();
    let value = u3_eighth_power(f).max(0.0).powf(0.125);
    NormReport {
        norm_kind: NormKind::U3,
        value,
        modulus: f.modulus(),
        elapsed: Some(start.elapsed().as_secs_f64()),
    }
}

pub fn u3(f: &CyclicFunction) -> f64 {
    u3_eighth_power(f).max(0.0).powf(0.125)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Naive,
    Spectral,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingFormResult {
    pub k: usize,
    pub value: Complex64,
    pub method: CountMethod,
    pub operand_moduli: usize,
}

fn check_operands(k: usize, fs: &[&CyclicFunction]) -> Result<usize> {
    if k != 3 && k != 4 {
        return Err(invalid(format!("k must be 3 or 4, got {k}")));
    }
    if fs.len() != k {
        return Err(invalid(format!("expected {k} operands, got {}", fs.len())));
    }
    let n = fs[0].modulus();
    for f in &fs[1..] {
        check_same_modulus(n, f.modulus())?;
    }
    Ok(n)
}

/// `E_{x,r} Π_j f_j(x + j r)`.
pub fn ap_form(
    k: usize,
    fs: &[&CyclicFunction],
    method: CountMethod,
) -> Result<CountingFormResult> {
    let n = check_operands(k, fs)?;
    let value = match method {
        CountMethod::Naive => ap_form_naive(fs),
        CountMethod::Spectral => {
            if k != 3 {
                return Err(invalid("spectral counting is only available for k = 3"));
            }
            ap3_spectral(fs[0], fs[1], fs[2])
        }
    };
    Ok(CountingFormResult {
        k,
        value,
        method,
        operand_moduli: n,
    })
}

fn ap_form_naive(fs: &[&CyclicFunction]) -> Complex64 {
    let n = fs[0].modulus();
    let vals: Vec<&[Complex64]> = fs.iter().map(|f| f.values()).collect();
    let total = reduce::par_sum_c64(0..n, |x| {
        let terms: Vec<Complex64> = (0..n)
            .map(|r| {
                let mut acc = vals[0][x];
                for (j, v) in vals.iter().enumerate().skip(1) {
                    acc *= v[(x + j * r) % n];
                }
                acc
            })
            .collect();
        reduce::sum_c64(&terms)
    });
    total / (n as f64 * n as f64)
}

/// `Σ_c f̂₀(c) f̂₁(−2c) f̂₂(c)`; equals the 3-term form by character orthogonality.
pub fn ap3_spectral(f0: &CyclicFunction, f1: &CyclicFunction, f2: &CyclicFunction) -> Complex64 {
    let n = f0.modulus() as i64;
    let a = f0.dft();
    let b = if std::ptr::eq(f1, f0) {
        a.clone()
    } else {
        f1.dft()
    };
    let c = if std::ptr::eq(f2, f0) {
        a.clone()
    } else {
        f2.dft()
    };
    let terms: Vec<Complex64> = (0..n)
        .map(|xi| a.at(xi) * b.at(-2 * xi) * c.at(xi))
        .collect();
    reduce::sum_c64(&terms)
}

#[derive(Clone, Debug, Serialize)]
pub struct GvnReport {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `|Λ_k(f₀,…)| ≤ min_j ‖f_j‖_{U^{k−1}}` for operands bounded by one.
pub fn verify_gvn(k: usize, fs: &[&CyclicFunction]) -> Result<GvnReport> {
    check_operands(k, fs)?;
    for (j, f) in fs.iter().enumerate() {
        let m = f.max_abs();
        if m > 1.0 + BOUND_SLACK {
            return Err(Error::ContractViolation(format!(
                "operand {j} has magnitude {m} > 1"
            )));
        }
    }
    let (lhs, rhs) = if k == 3 {
        let lhs = ap3_spectral(fs[0], fs[1], fs[2]).norm();
        let rhs = fs.iter().map(|f| u2(f)).fold(f64::INFINITY, f64::min);
        (lhs, rhs)
    } else {
        let lhs = ap_form_naive(fs).norm();
        let rhs = fs.iter().map(|f| u3(f)).fold(f64::INFINITY, f64::min);
        (lhs, rhs)
    };
    Ok(GvnReport {
        k,
        lhs,
        rhs,
        holds: lhs <= rhs + INEQUALITY_SLACK,
    })
}
