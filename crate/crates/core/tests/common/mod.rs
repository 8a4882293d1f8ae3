//! Brute-force reference implementations. Deliberately naive: each follows the
//! defining formula with plain loops and shares no code with the library.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// Uniform on the closed unit disc.
pub fn random_bounded(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let r = rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
        })
        .collect()
}

pub fn random_signs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// `f̂(ξ) = (1/N) Σ_x f(x) e(−xξ/N)` with the phase reduced mod N exactly.
pub fn dft(f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    (0..n)
        .map(|xi| {
            let mut s = Complex64::new(0.0, 0.0);
            for (x, v) in f.iter().enumerate() {
                let k = (x as u128 * xi as u128 % n as u128) as f64;
                s += v * e(-k / n as f64);
            }
            s / n as f64
        })
        .collect()
}

/// `E_{x,a,b} f(x) f̄(x+a) f̄(x+b) f(x+a+b)`.
pub fn u2_fourth(f: &[Complex64]) -> f64 {
    let n = f.len();
    let mut s = Complex64::new(0.0, 0.0);
    for x in 0..n {
        for a in 0..n {
            for b in 0..n {
                s += f[x] * f[(x + a) % n].conj() * f[(x + b) % n].conj() * f[(x + a + b) % n];
            }
        }
    }
    s.re / (n * n * n) as f64
}

/// `E_{x,h₁,h₂,h₃} Π_{ω ∈ {0,1}³} C^{|ω|} f(x + ω·h)`.
pub fn u3_eighth(f: &[Complex64]) -> f64 {
    let n = f.len();
    let mut total = 0.0;
    for h1 in 0..n {
        for h2 in 0..n {
            for h3 in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for x in 0..n {
                    let mut p = Complex64::new(1.0, 0.0);
                    for w in 0..8usize {
                        let shift = (w & 1) * h1 + ((w >> 1) & 1) * h2 + ((w >> 2) & 1) * h3;
                        let v = f[(x + shift) % n];
                        p *= if w.count_ones() % 2 == 1 { v.conj() } else { v };
                    }
                    s += p;
                }
                total += s.re;
            }
        }
    }
    total / (n as f64).powi(4)
}

/// `E_{x,r} Π_j f_j(x + j r)`.
pub fn ap_form(fs: &[&[Complex64]]) -> Complex64 {
    let n = fs[0].len();
    let mut s = Complex64::new(0.0, 0.0);
    for x in 0..n {
        for r in 0..n {
            let mut p = Complex64::new(1.0, 0.0);
            for (j, f) in fs.iter().enumerate() {
                p *= f[(x + j * r) % n];
            }
            s += p;
        }
    }
    s / (n * n) as f64
}

/// `#{(a, d) ∈ (ℤ/N)² : a + j d ∈ A for j < k}`.
pub fn ap_pairs(members: &[bool], k: usize) -> u64 {
    let n = members.len();
    let mut c = 0;
    for a in 0..n {
        for d in 0..n {
            if (0..k).all(|j| members[(a + j * d) % n]) {
                c += 1;
            }
        }
    }
    c
}

/// Row-major `n × n` matrix oracle for `‖f‖⁴_{□²}`.
pub fn box2_fourth(f: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for x in 0..n {
        for xp in 0..n {
            for y in 0..n {
                for yp in 0..n {
                    s += f[x * n + y] * f[x * n + yp] * f[xp * n + y] * f[xp * n + yp];
                }
            }
        }
    }
    s / (n as f64).powi(4)
}

pub fn triangle_form(f: &[f64], g: &[f64], h: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                s += f[x * n + y] * g[y * n + z] * h[z * n + x];
            }
        }
    }
    s / (n as f64).powi(3)
}

/// Octahedral average over `(x,x′,y,y′,z,z′)` for an `n³` array.
pub fn box3_eighth(f: &[f64], n: usize) -> f64 {
    let at = |x: usize, y: usize, z: usize| f[(x * n + y) * n + z];
    let mut s = 0.0;
    for x in 0..n {
        for xp in 0..n {
            for y in 0..n {
                for yp in 0..n {
                    for z in 0..n {
                        for zp in 0..n {
                            let mut p = 1.0;
                            for w in 0..8usize {
                                let a = if w & 1 == 0 { x } else { xp };
                                let b = if w & 2 == 0 { y } else { yp };
                                let c = if w & 4 == 0 { z } else { zp };
                                p *= at(a, b, c);
                            }
                            s += p;
                        }
                    }
                }
            }
        }
    }
    s / (n as f64).powi(6)
}

/// Unordered triangles in a symmetric 0/1 adjacency matrix.
pub fn triangles(adj: &[f64], n: usize) -> u64 {
    let mut c = 0;
    for x in 0..n {
        for y in x + 1..n {
            if adj[x * n + y] == 0.0 {
                continue;
            }
            for z in y + 1..n {
                if adj[y * n + z] != 0.0 && adj[x * n + z] != 0.0 {
                    c += 1;
                }
            }
        }
    }
    c
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some(p)` when `n = p^j`, by trial division.
pub fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        return Some(n);
    }
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    (m == 1).then_some(p)
}

pub fn mangoldt(n: u64) -> f64 {
    prime_power_base(n).map_or(0.0, |p| (p as f64).ln())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}
