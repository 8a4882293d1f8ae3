//! Sieving, the von Mangoldt function, the W-trick and prime progression averages.

use crate::cyclic::{embed_real_interval, CyclicFunction, IntervalEmbedding};
use crate::error::{invalid, Error, Result};
use crate::gowers::{self, CountMethod};
use crate::reduce;
use serde::Serialize;

/// Largest limit accepted by [`SieveTable::new`].
pub const TABLE_CAPACITY: u64 = 100_000_000;
/// Largest value `W·N + b` accepted by [`mangoldt_weights`].
pub const WEIGHT_CAPACITY: u64 = 1_000_000_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `≥ n`.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n.max(2);
    while !is_prime(m) {
        m += 1;
    }
    m
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Smallest-prime-factor table for `2 ≤ n ≤ limit`.
#[derive(Clone, Debug)]
pub struct SieveTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SieveTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > TABLE_CAPACITY {
            return Err(Error::Capacity {
                needed: limit,
                capacity: TABLE_CAPACITY,
            });
        }
        let size = limit as usize + 1;
        let mut spf = vec![0u32; size];
        for i in 2..size {
            if spf[i] == 0 {
                let mut j = i;
                while j < size {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Ok(Self { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            None
        } else {
            Some(self.spf[n as usize] as u64)
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(|&n| self.spf[n as usize] as u64 == n)
    }
}

/// `Λ(n)`: `log p` if `n = p^j`, otherwise 0.
pub fn von_mangoldt(n: u64, table: &SieveTable) -> Result<f64> {
    let p = table
        .smallest_prime_factor(n)
        .ok_or_else(|| invalid(format!("{n} outside the sieve range [2, {}]", table.limit)))?;
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    Ok(if m == 1 { (p as f64).ln() } else { 0.0 })
}

/// `Σ_{n ≤ x} Λ(n)`.
pub fn chebyshev_psi(x: u64, table: &SieveTable) -> Result<f64> {
    if x > table.limit {
        return Err(Error::Capacity {
            needed: x,
            capacity: table.limit,
        });
    }
    let terms: Vec<f64> = (2..=x)
        .map(|n| von_mangoldt(n, table))
        .collect::<Result<_>>()?;
    Ok(reduce::sum_f64(&terms))
}

/// `Λ_{W,b}(n) = (φ(W)/W) Λ(Wn + b)` for `1 ≤ n ≤ N`, with `W = Π_{p<w} p`, so the mean tends to 1.
#[derive(Clone, Debug, Serialize)]
pub struct MangoldtWeights {
    pub n: u64,
    pub w: u64,
    #[serde(rename = "W")]
    pub modulus: u64,
    pub b: u64,
    pub phi: u64,
    pub mean: f64,
    #[serde(skip)]
    values: Vec<f64>,
}

impl MangoldtWeights {
    /// `Λ_{W,b}(n)` for `1 ≤ n ≤ N`.
    pub fn value(&self, n: u64) -> Option<f64> {
        if n == 0 || n > self.n {
            None
        } else {
            Some(self.values[n as usize - 1])
        }
    }

    /// Values for `n = 1, …, N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn normalization(&self) -> f64 {
        self.phi as f64 / self.modulus as f64
    }
}

/// `(W, φ(W))` for `W = Π_{p<w} p`.
pub fn primorial_below(w: u64) -> Result<(u64, u64)> {
    let mut big_w = 1u64;
    let mut phi = 1u64;
    for p in (2..w).filter(|&p| is_prime(p)) {
        big_w = big_w
            .checked_mul(p)
            .ok_or_else(|| invalid(format!("primorial below {w} overflows")))?;
        phi *= p - 1;
    }
    Ok((big_w, phi))
}

fn small_primes(limit: u64) -> Vec<u64> {
    let size = limit as usize + 1;
    let mut composite = vec![false; size];
    let mut out = Vec::new();
    for i in 2..size {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < size {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Sieves the progression `W·n + b`, `1 ≤ n ≤ N`, for primes and prime powers.
pub fn mangoldt_weights(n: u64, w: u64, b: u64) -> Result<MangoldtWeights> {
    if n == 0 {
        return Err(invalid("N must be positive"));
    }
    if w < 2 {
        return Err(invalid("w must be at least 2"));
    }
    let (big_w, phi) = primorial_below(w)?;
    if b == 0 || gcd(b, big_w) != 1 {
        return Err(invalid(format!(
            "b = {b} must be positive and coprime to W = {big_w}"
        )));
    }
    let top = big_w
        .checked_mul(n)
        .and_then(|v| v.checked_add(b))
        .filter(|&v| v <= WEIGHT_CAPACITY)
        .ok_or(Error::Capacity {
            needed: big_w.saturating_mul(n).saturating_add(b),
            capacity: WEIGHT_CAPACITY,
        })?;
    let root = isqrt(top);
    let primes = small_primes(root);
    let len = n as usize;
    // `prime_mark[i]`: W(i+1)+b has no prime factor up to its square root.
    let mut prime_mark = vec![true; len];
    for &p in &primes {
        if big_w % p == 0 {
            continue;
        }
        // W·n + b ≡ 0 (mod p)  ⇔  n ≡ −b·W⁻¹ (mod p)
        let inv = mod_inverse(big_w % p, p).expect("p does not divide W");
        let r = mul_mod((p - b % p) % p, inv, p);
        let mut idx = if r == 0 { p } else { r };
        while idx <= n {
            if big_w * idx + b != p {
                prime_mark[idx as usize - 1] = false;
            }
            idx += p;
        }
    }
    let scale = phi as f64 / big_w as f64;
    let mut values: Vec<f64> = prime_mark
        .iter()
        .enumerate()
        .map(|(i, &is_p)| {
            let v = big_w * (i as u64 + 1) + b;
            if is_p && v > 1 {
                scale * (v as f64).ln()
            } else {
                0.0
            }
        })
        .collect();
    for &p in &primes {
        if big_w % p == 0 {
            continue;
        }
        let mut q = p as u128 * p as u128;
        while q <= top as u128 {
            let v = q as u64;
            if v > b && (v - b) % big_w == 0 {
                let idx = (v - b) / big_w;
                if (1..=n).contains(&idx) {
                    values[idx as usize - 1] = scale * (p as f64).ln();
                }
            }
            q *= p as u128;
        }
    }
    let mean = reduce::sum_f64(&values) / n as f64;
    Ok(MangoldtWeights {
        n,
        w,
        modulus: big_w,
        b,
        phi,
        mean,
        values,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeApReport {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub w: u64,
    pub b: u64,
    #[serde(rename = "W")]
    pub modulus: u64,
    /// Progressions are taken inside `[1, window]`, `window = k·N`.
    pub window: u64,
    pub progression_count: u64,
    pub average: f64,
    pub method: CountMethod,
    pub padded_modulus: u64,
}

/// Number of `(a, d)` with `d ≥ 1` and `a, …, a+(k−1)d ∈ [1, L]`.
pub fn progression_count(k: usize, l: u64) -> u64 {
    let span = k as u64 - 1;
    (1..)
        .map(|d| l.saturating_sub(span * d))
        .take_while(|&c| c > 0)
        .sum()
}

/// Sum over `d ≥ 1` of `Π_j f(a + jd)` for `k`-APs inside `values`.
fn naive_progression_sum(k: usize, values: &[f64]) -> f64 {
    let l = values.len();
    let span = k - 1;
    let max_d = if l > 0 { (l - 1) / span } else { 0 };
    reduce::par_sum_f64(1..max_d + 1, |d| {
        let terms: Vec<f64> = (0..l - span * d)
            .map(|a| {
                let mut acc = values[a];
                for j in 1..k {
                    if acc == 0.0 {
                        break;
                    }
                    acc *= values[a + j * d];
                }
                acc
            })
            .collect();
        reduce::sum_f64(&terms)
    })
}

/// Spectral version for `k = 3`: pad by `2k`, count all `(a, d)` mod `M`, then remove
/// `d = 0` and use the `d ↔ −d` symmetry.
fn spectral_progression_sum(values: &[f64]) -> Result<(f64, u64)> {
    let emb = IntervalEmbedding::for_progressions(values.len(), 3)?;
    let f = embed_real_interval(values, &emb)?;
    let m = emb.ambient_modulus() as f64;
    let all = gowers::ap3_spectral(&f, &f, &f).re * m * m;
    let cubes: Vec<f64> = values.iter().map(|v| v * v * v).collect();
    let diagonal = reduce::sum_f64(&cubes);
    Ok(((all - diagonal) / 2.0, emb.ambient_modulus() as u64))
}

/// Average of `Λ_{W,b}(a)⋯Λ_{W,b}(a+(k−1)d)` over progressions with `d ≥ 1` inside `[1, kN]`.
pub fn prime_ap_average(k: usize, n: u64, w: u64, b: u64) -> Result<PrimeApReport> {
    let method = if k == 3 {
        CountMethod::Spectral
    } else {
        CountMethod::Naive
    };
    prime_ap_average_with(k, n, w, b, method)
}

pub fn prime_ap_average_with(
    k: usize,
    n: u64,
    w: u64,
    b: u64,
    method: CountMethod,
) -> Result<PrimeApReport> {
    if k != 3 && k != 4 {
        return Err(invalid(format!("k must be 3 or 4, got {k}")));
    }
    if method == CountMethod::Spectral && k != 3 {
        return Err(invalid("spectral counting is only available for k = 3"));
    }
    let window = k as u64 * n;
    let weights = mangoldt_weights(window, w, b)?;
    let count = progression_count(k, window);
    let (sum, padded) = match method {
        CountMethod::Spectral => spectral_progression_sum(weights.values())?,
        CountMethod::Naive => (naive_progression_sum(k, weights.values()), window),
    };
    let average = if count == 0 { 0.0 } else { sum / count as f64 };
    Ok(PrimeApReport {
        k,
        n,
        w,
        b,
        modulus: weights.modulus,
        window,
        progression_count: count,
        average,
        method,
        padded_modulus: padded,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BiasReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub w: u64,
    pub b: u64,
    pub padded_modulus: u64,
    pub max_nonzero_coeff: f64,
    pub argmax: u64,
    /// Twenty largest `(ξ, |coefficient|)` with `ξ ≠ 0`.
    pub profile: Vec<(u64, f64)>,
    /// The same maximum for the bare window indicator `1_{[1,N]}`.
    pub window_baseline: f64,
}

/// Largest nonzero-frequency coefficients of `values − subtract` on `[1, N]`,
/// embedded in `Z/2NZ`.
pub fn centered_bias(values: &[f64], subtract: f64) -> Result<(f64, u64, Vec<(u64, f64)>, f64)> {
    let l = values.len();
    let emb = IntervalEmbedding::new(l, 2)?;
    let centered: Vec<f64> = values.iter().map(|v| v - subtract).collect();
    let f = embed_real_interval(&centered, &emb)?;
    let top = top_nonzero(&f, 20);
    let window = embed_real_interval(&vec![1.0; l], &emb)?;
    let baseline = top_nonzero(&window, 1).first().map(|p| p.1).unwrap_or(0.0);
    let (argmax, max) = top.first().copied().unwrap_or((0, 0.0));
    Ok((max, argmax, top, baseline))
}

fn top_nonzero(f: &CyclicFunction, count: usize) -> Vec<(u64, f64)> {
    let s = f.dft();
    let mut mags: Vec<(u64, f64)> = s
        .coefficients()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| (i as u64, c.norm()))
        .collect();
    mags.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    mags.truncate(count);
    mags
}

/// Fourier bias of `Λ_{W,b} − 1` on `[1, N]`.
pub fn fourier_bias(weights: &MangoldtWeights) -> Result<BiasReport> {
    let (max, argmax, profile, baseline) = centered_bias(weights.values(), 1.0)?;
    Ok(BiasReport {
        n: weights.n,
        w: weights.w,
        b: weights.b,
        padded_modulus: 2 * weights.n,
        max_nonzero_coeff: max,
        argmax,
        profile,
        window_baseline: baseline,
    })
}
