//! Functions on the cyclic group Z/NZ and the mean-normalized Fourier transform.
//!
//! Convention: `f̂(ξ) = E_x f(x) e(-xξ/N)` and `f(x) = Σ_ξ f̂(ξ) e(xξ/N)`, where
//! `e(t) = exp(2πit)`. Parseval then reads `Σ_ξ |f̂(ξ)|² = E_x |f(x)|²`.

use crate::error::{invalid, Error, Result};
use crate::reduce;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::io::{Read, Write};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    plan.process(buf);
}

/// `e(t) = exp(2πi t)`, with `t` reduced mod 1 first so large arguments keep precision.
pub fn unit_phase(t: f64) -> Complex64 {
    let frac = t - t.floor();
    let theta = std::f64::consts::TAU * frac;
    Complex64::new(theta.cos(), theta.sin())
}

/// `e(a/n)` computed from the exact residue `a mod n`.
pub fn root_of_unity(a: i128, n: usize) -> Complex64 {
    let r = a.rem_euclid(n as i128) as f64;
    unit_phase(r / n as f64)
}

/// Signed distance from `a/n` to the nearest integer, from exact residues.
pub fn circle_distance(a: i128, n: usize) -> f64 {
    let r = a.rem_euclid(n as i128);
    let n_i = n as i128;
    let d = if 2 * r > n_i { r - n_i } else { r };
    d as f64 / n as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct CyclicFunction {
    values: Vec<Complex64>,
}

impl CyclicFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("cyclic function needs modulus N >= 1"));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(invalid(format!("non-finite value at index {i}")));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(modulus: usize) -> Result<Self> {
        Self::constant(modulus, Complex64::new(0.0, 0.0))
    }

    pub fn constant(modulus: usize, c: Complex64) -> Result<Self> {
        Self::new(vec![c; modulus])
    }

    /// Indicator of a set of residues (taken mod N).
    pub fn indicator<I: IntoIterator<Item = u64>>(modulus: usize, set: I) -> Result<Self> {
        if modulus == 0 {
            return Err(invalid("cyclic function needs modulus N >= 1"));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); modulus];
        for a in set {
            v[(a % modulus as u64) as usize] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { values: v })
    }

    pub fn from_fn(modulus: usize, f: impl Fn(usize) -> Complex64) -> Result<Self> {
        Self::new((0..modulus).map(f).collect())
    }

    pub(crate) fn from_vec_unchecked(values: Vec<Complex64>) -> Self {
        debug_assert!(!values.is_empty());
        Self { values }
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at `x mod N`.
    pub fn at(&self, x: i64) -> Complex64 {
        let n = self.values.len() as i64;
        self.values[x.rem_euclid(n) as usize]
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn dft(&self) -> Spectrum {
        let n = self.modulus();
        let mut buf = self.values.clone();
        fft_in_place(&mut buf, false);
        let scale = 1.0 / n as f64;
        for v in &mut buf {
            *v *= scale;
        }
        Spectrum { coefficients: buf }
    }

    /// `result[x] = f[(x + r) mod N]`.
    pub fn shift(&self, r: i64) -> Self {
        let n = self.modulus() as i64;
        let r = r.rem_euclid(n) as usize;
        let mut v = Vec::with_capacity(self.values.len());
        v.extend_from_slice(&self.values[r..]);
        v.extend_from_slice(&self.values[..r]);
        Self { values: v }
    }

    pub fn mean(&self) -> Complex64 {
        reduce::sum_c64(&self.values) / self.modulus() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        (reduce::sum_f64(&sq) / self.modulus() as f64).sqrt()
    }

    pub fn conjugate(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        check_same_modulus(self.modulus(), other.modulus())?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Convolution `(f * g)(x) = E_y f(y) g(x - y)`, via the transform.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        check_same_modulus(self.modulus(), other.modulus())?;
        let a = self.dft();
        let b = other.dft();
        let coeffs = a
            .coefficients
            .iter()
            .zip(&b.coefficients)
            .map(|(x, y)| x * y)
            .collect();
        Ok(Spectrum {
            coefficients: coeffs,
        }
        .idft())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_triples(w, "index", &self.values)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        Self::new(read_triples(r, "index")?)
    }
}

pub(crate) fn check_same_modulus(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::ModulusMismatch { left: a, right: b });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(invalid("spectrum needs modulus N >= 1"));
        }
        Ok(Self { coefficients })
    }

    pub fn modulus(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient at frequency `ξ mod N`.
    pub fn at(&self, xi: i64) -> Complex64 {
        let n = self.coefficients.len() as i64;
        self.coefficients[xi.rem_euclid(n) as usize]
    }

    /// `f(x) = Σ_ξ f̂(ξ) e(xξ/N)`.
    pub fn idft(&self) -> CyclicFunction {
        let mut buf = self.coefficients.clone();
        fft_in_place(&mut buf, true);
        CyclicFunction { values: buf }
    }

    pub fn energy(&self) -> f64 {
        let sq: Vec<f64> = self.coefficients.iter().map(|c| c.norm_sqr()).collect();
        reduce::sum_f64(&sq)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_triples(w, "freq", &self.coefficients)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        Self::new(read_triples(r, "freq")?)
    }
}

fn write_triples<W: Write>(w: W, key: &str, values: &[Complex64]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([key, "re", "im"])?;
    for (i, v) in values.iter().enumerate() {
        wtr.write_record([i.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

fn read_triples<R: Read>(r: R, key: &str) -> Result<Vec<Complex64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = rdr.headers()?.clone();
    let expected = [key, "re", "im"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Parse(format!(
            "expected header `{key},re,im`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<(usize, Complex64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<&str> {
            rec.get(i).ok_or_else(|| Error::Parse("short row".into()))
        };
        let idx: usize = parse(0)?
            .parse()
            .map_err(|e| Error::Parse(format!("bad {key}: {e}")))?;
        let re: f64 = parse(1)?
            .parse()
            .map_err(|e| Error::Parse(format!("bad re: {e}")))?;
        let im: f64 = parse(2)?
            .parse()
            .map_err(|e| Error::Parse(format!("bad im: {e}")))?;
        rows.push((idx, Complex64::new(re, im)));
    }
    let n = rows.len();
    let mut out = vec![None; n];
    for (idx, v) in rows {
        if idx >= n || out[idx].is_some() {
            return Err(Error::Parse(format!(
                "{key} {idx} out of range or duplicated"
            )));
        }
        out[idx] = Some(v);
    }
    Ok(out.into_iter().map(|v| v.expect("filled")).collect())
}

/// Places an interval `[1, L]` inside `Z/MZ` with zero padding so that short
/// progressions cannot wrap around.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct IntervalEmbedding {
    interval_length: usize,
    ambient_modulus: usize,
    padding_factor: usize,
}

impl IntervalEmbedding {
    /// `M = padding_factor · L`.
    pub fn new(interval_length: usize, padding_factor: usize) -> Result<Self> {
        Self::with_modulus(
            interval_length,
            padding_factor * interval_length,
            padding_factor,
        )
    }

    /// Default padding `2k` for k-term progression work.
    pub fn for_progressions(interval_length: usize, k: usize) -> Result<Self> {
        Self::new(interval_length, 2 * k)
    }

    pub fn with_modulus(
        interval_length: usize,
        ambient_modulus: usize,
        padding_factor: usize,
    ) -> Result<Self> {
        if interval_length == 0 {
            return Err(invalid("interval length must be positive"));
        }
        if padding_factor < 2 {
            return Err(invalid("padding factor must be at least 2"));
        }
        if ambient_modulus < padding_factor * interval_length {
            return Err(invalid(format!(
                "ambient modulus {ambient_modulus} < padding_factor {padding_factor} x length {interval_length}"
            )));
        }
        Ok(Self {
            interval_length,
            ambient_modulus,
            padding_factor,
        })
    }

    pub fn interval_length(&self) -> usize {
        self.interval_length
    }

    pub fn ambient_modulus(&self) -> usize {
        self.ambient_modulus
    }

    pub fn padding_factor(&self) -> usize {
        self.padding_factor
    }
}

/// `values[i]` is the value at integer `i + 1`; it lands on residue `i + 1`.
pub fn embed_interval(values: &[Complex64], emb: &IntervalEmbedding) -> Result<CyclicFunction> {
    let l = emb.interval_length;
    if values.len() != l {
        return Err(invalid(format!(
            "expected {l} values, got {}",
            values.len()
        )));
    }
    if emb.ambient_modulus < 2 * l {
        return Err(invalid("ambient modulus below 2L"));
    }
    let mut v = vec![Complex64::new(0.0, 0.0); emb.ambient_modulus];
    v[1..=l].copy_from_slice(values);
    CyclicFunction::new(v)
}

pub fn embed_real_interval(values: &[f64], emb: &IntervalEmbedding) -> Result<CyclicFunction> {
    let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    embed_interval(&c, emb)
}
