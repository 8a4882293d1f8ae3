//! Example sets and functions: random, quasiperiodic, bracket-quadratic and
//! nested random sets, polynomial phases and skew-shift orbits.
//!
//! Spec strings look like `kind:param=value,...`, e.g.
//! `quadratic_quasi:alpha=1.41421356237,delta=0.3` or
//! `random_subset_of:of=linear_quasi,alpha=1.414,delta=0.5,keep=0.5,seed=3`.

use crate::cyclic::{root_of_unity, unit_phase, CyclicFunction};
use crate::error::{invalid, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Largest argument for which `{α·m}` is evaluated from an exact integer `m`.
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Random {
        delta: f64,
        seed: Option<u64>,
    },
    LinearQuasi {
        alpha: f64,
        delta: f64,
    },
    QuadraticQuasi {
        alpha: f64,
        delta: f64,
    },
    /// `{n : {⌊√2 n⌋·√3·n} ≤ δ}`
    BracketQuadratic {
        delta: f64,
    },
    RandomSubsetOf {
        inner: Box<GeneratorSpec>,
        keep: f64,
        seed: Option<u64>,
    },
    QuadraticPhase {
        xi: i64,
    },
    /// `e(P(x)/N)` with `P(x) = Σ c_j x^j`.
    PolynomialPhase {
        coefficients: Vec<i64>,
    },
    /// `n ↦ e(y_n)` along the orbit of `T(x, y) = (x + α, y + x)`.
    SkewShift {
        alpha: f64,
        x0: f64,
        y0: f64,
    },
}

/// `{α·m}` for an integer `m < 2⁵³`, using an error-free product.
fn frac_mul(alpha: f64, m: f64) -> f64 {
    let p = alpha * m;
    let e = alpha.mul_add(m, -p);
    let fl = p.floor();
    let mut r = (p - fl) + e;
    if r >= 1.0 {
        r -= 1.0;
    }
    if r < 0.0 {
        r += 1.0;
    }
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `⌊α·m⌋` for an integer `m < 2⁵³`.
fn floor_mul(alpha: f64, m: f64) -> f64 {
    (alpha * m - frac_mul(alpha, m)).round()
}

fn check_delta(name: &str, d: f64) -> Result<()> {
    if d > 0.0 && d <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in (0,1], got {d}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite")))
    }
}

impl GeneratorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::Random { .. } => "random",
            GeneratorSpec::LinearQuasi { .. } => "linear_quasi",
            GeneratorSpec::QuadraticQuasi { .. } => "quadratic_quasi",
            GeneratorSpec::BracketQuadratic { .. } => "bracket_quadratic",
            GeneratorSpec::RandomSubsetOf { .. } => "random_subset_of",
            GeneratorSpec::QuadraticPhase { .. } => "quadratic_phase",
            GeneratorSpec::PolynomialPhase { .. } => "polynomial_phase",
            GeneratorSpec::SkewShift { .. } => "skew_shift",
        }
    }

    pub fn is_set(&self) -> bool {
        !matches!(
            self,
            GeneratorSpec::QuadraticPhase { .. }
                | GeneratorSpec::PolynomialPhase { .. }
                | GeneratorSpec::SkewShift { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::Random { delta, seed } => {
                check_delta("delta", *delta)?;
                seed.ok_or_else(|| invalid("random generator needs a seed"))
                    .map(|_| ())
            }
            GeneratorSpec::LinearQuasi { alpha, delta }
            | GeneratorSpec::QuadraticQuasi { alpha, delta } => {
                check_finite("alpha", *alpha)?;
                check_delta("delta", *delta)
            }
            GeneratorSpec::BracketQuadratic { delta } => check_delta("delta", *delta),
            GeneratorSpec::RandomSubsetOf { inner, keep, seed } => {
                if !inner.is_set() {
                    return Err(invalid(format!(
                        "random_subset_of needs a set kind, got {}",
                        inner.kind()
                    )));
                }
                inner.validate()?;
                check_delta("keep", *keep)?;
                seed.ok_or_else(|| invalid("random_subset_of needs a seed"))
                    .map(|_| ())
            }
            GeneratorSpec::QuadraticPhase { .. } => Ok(()),
            GeneratorSpec::PolynomialPhase { coefficients } => {
                if coefficients.is_empty() {
                    Err(invalid("polynomial_phase needs at least one coefficient"))
                } else {
                    Ok(())
                }
            }
            GeneratorSpec::SkewShift { alpha, x0, y0 } => {
                check_finite("alpha", *alpha)?;
                check_finite("x0", *x0)?;
                check_finite("y0", *y0)
            }
        }
    }

    /// Fills in a seed for randomized kinds that do not carry one.
    pub fn with_default_seed(mut self, seed: u64) -> Self {
        match &mut self {
            GeneratorSpec::Random { seed: s, .. } => {
                s.get_or_insert(seed);
            }
            GeneratorSpec::RandomSubsetOf { inner, seed: s, .. } => {
                s.get_or_insert(seed);
                let derived = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
                *inner = Box::new((**inner).clone().with_default_seed(derived));
            }
            _ => {}
        }
        self
    }

    fn params(&self) -> Vec<(String, String)> {
        let s = |k: &str, v: String| (k.to_string(), v);
        match self {
            GeneratorSpec::Random { delta, seed } => {
                let mut p = vec![s("delta", delta.to_string())];
                if let Some(seed) = seed {
                    p.push(s("seed", seed.to_string()));
                }
                p
            }
            GeneratorSpec::LinearQuasi { alpha, delta }
            | GeneratorSpec::QuadraticQuasi { alpha, delta } => {
                vec![s("alpha", alpha.to_string()), s("delta", delta.to_string())]
            }
            GeneratorSpec::BracketQuadratic { delta } => vec![s("delta", delta.to_string())],
            GeneratorSpec::RandomSubsetOf { inner, keep, seed } => {
                let mut p = vec![s("of", inner.kind().to_string())];
                for (k, v) in inner.params() {
                    p.push((
                        if k == "seed" {
                            "inner_seed".to_string()
                        } else {
                            k
                        },
                        v,
                    ));
                }
                p.push(s("keep", keep.to_string()));
                if let Some(seed) = seed {
                    p.push(s("seed", seed.to_string()));
                }
                p
            }
            GeneratorSpec::QuadraticPhase { xi } => vec![s("xi", xi.to_string())],
            GeneratorSpec::PolynomialPhase { coefficients } => {
                let c: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                vec![s("coeffs", c.join(";"))]
            }
            GeneratorSpec::SkewShift { alpha, x0, y0 } => {
                vec![
                    s("alpha", alpha.to_string()),
                    s("x0", x0.to_string()),
                    s("y0", y0.to_string()),
                ]
            }
        }
    }

    fn from_params(kind: &str, mut p: BTreeMap<String, String>) -> Result<Self> {
        fn take<T: FromStr>(p: &mut BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
            match p.remove(key) {
                None => Ok(None),
                Some(v) => v
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::Parse(format!("bad value `{v}` for `{key}`"))),
            }
        }
        fn need<T: FromStr>(p: &mut BTreeMap<String, String>, key: &str) -> Result<T> {
            take(p, key)?.ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))
        }
        let spec = match kind {
            "random" => GeneratorSpec::Random {
                delta: need(&mut p, "delta")?,
                seed: take(&mut p, "seed")?,
            },
            "linear_quasi" => GeneratorSpec::LinearQuasi {
                alpha: need(&mut p, "alpha")?,
                delta: need(&mut p, "delta")?,
            },
            "quadratic_quasi" => GeneratorSpec::QuadraticQuasi {
                alpha: need(&mut p, "alpha")?,
                delta: need(&mut p, "delta")?,
            },
            "bracket_quadratic" => GeneratorSpec::BracketQuadratic {
                delta: need(&mut p, "delta")?,
            },
            "random_subset_of" => {
                let of: String = need(&mut p, "of")?;
                let keep = need(&mut p, "keep")?;
                let seed = take(&mut p, "seed")?;
                if let Some(inner_seed) = p.remove("inner_seed") {
                    p.insert("seed".into(), inner_seed);
                }
                let inner = Self::from_params(&of, std::mem::take(&mut p))?;
                GeneratorSpec::RandomSubsetOf {
                    inner: Box::new(inner),
                    keep,
                    seed,
                }
            }
            "quadratic_phase" => GeneratorSpec::QuadraticPhase {
                xi: need(&mut p, "xi")?,
            },
            "polynomial_phase" => {
                let raw: String = need(&mut p, "coeffs")?;
                let coefficients = raw
                    .split(';')
                    .map(|c| {
                        c.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))
                    })
                    .collect::<Result<Vec<i64>>>()?;
                GeneratorSpec::PolynomialPhase { coefficients }
            }
            "skew_shift" => GeneratorSpec::SkewShift {
                alpha: need(&mut p, "alpha")?,
                x0: take(&mut p, "x0")?.unwrap_or(0.0),
                y0: take(&mut p, "y0")?.unwrap_or(0.0),
            },
            other => return Err(Error::Parse(format!("unknown generator kind `{other}`"))),
        };
        if let Some(k) = p.keys().next() {
            return Err(Error::Parse(format!(
                "unknown parameter `{k}` for generator `{kind}`"
            )));
        }
        Ok(spec)
    }

    fn random_members(delta: f64, seed: u64, candidates: impl Iterator<Item = u64>) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        candidates.filter(|_| rng.gen::<f64>() < delta).collect()
    }

    fn contains_exact(&self, n: u64) -> Result<bool> {
        let nf = n as f64;
        Ok(match self {
            GeneratorSpec::LinearQuasi { alpha, delta } => frac_mul(*alpha, nf) <= *delta,
            GeneratorSpec::QuadraticQuasi { alpha, delta } => {
                let sq = nf * nf;
                if sq >= EXACT_LIMIT {
                    return Err(invalid(format!("n = {n} too large for exact n^2")));
                }
                frac_mul(*alpha, sq) <= *delta
            }
            GeneratorSpec::BracketQuadratic { delta } => {
                let m = floor_mul(std::f64::consts::SQRT_2, nf) * nf;
                if m >= EXACT_LIMIT {
                    return Err(invalid(format!(
                        "n = {n} too large for the bracket product"
                    )));
                }
                frac_mul(3f64.sqrt(), m) <= *delta
            }
            _ => unreachable!("deterministic set kinds only"),
        })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self
            .params()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        write!(f, "{}:{}", self.kind(), p.join(","))
    }
}

impl Serialize for GeneratorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
            if params
                .insert(k.trim().to_string(), v.trim().to_string())
                .is_some()
            {
                return Err(Error::Parse(format!("duplicate parameter `{k}`")));
            }
        }
        let spec = Self::from_params(kind.trim(), params)?;
        Ok(spec)
    }
}

/// The subset of `[1, L]` described by `spec`, in increasing order.
pub fn generate_set(spec: &GeneratorSpec, l: u64) -> Result<Vec<u64>> {
    if l == 0 {
        return Err(invalid("L must be at least 1"));
    }
    spec.validate()?;
    match spec {
        GeneratorSpec::Random { delta, seed } => {
            Ok(GeneratorSpec::random_members(*delta, seed.unwrap(), 1..=l))
        }
        GeneratorSpec::RandomSubsetOf { inner, keep, seed } => {
            let base = generate_set(inner, l)?;
            Ok(GeneratorSpec::random_members(
                *keep,
                seed.unwrap(),
                base.into_iter(),
            ))
        }
        s if s.is_set() => {
            let mut out = Vec::new();
            for n in 1..=l {
                if s.contains_exact(n)? {
                    out.push(n);
                }
            }
            Ok(out)
        }
        other => Err(invalid(format!(
            "`{}` describes a function, not a set",
            other.kind()
        ))),
    }
}

/// The function on `Z/NZ` described by `spec`. Set kinds give the indicator of
/// `generate_set(spec, N)` reduced mod `N`.
pub fn generate_function(spec: &GeneratorSpec, n: usize) -> Result<CyclicFunction> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    spec.validate()?;
    match spec {
        GeneratorSpec::QuadraticPhase { xi } => {
            let xi = *xi as i128;
            CyclicFunction::from_fn(n, |x| {
                let x = x as i128;
                root_of_unity(xi * x % n as i128 * x, n)
            })
        }
        GeneratorSpec::PolynomialPhase { coefficients } => {
            let m = n as i128;
            CyclicFunction::from_fn(n, |x| {
                let x = x as i128;
                let p = coefficients
                    .iter()
                    .rev()
                    .fold(0i128, |acc, &c| (acc * x + c as i128).rem_euclid(m));
                root_of_unity(p, n)
            })
        }
        GeneratorSpec::SkewShift { alpha, x0, y0 } => {
            // y_n = y0 + n·x0 + α·n(n−1)/2 (mod 1)
            let mut values = Vec::with_capacity(n);
            for k in 0..n as u64 {
                let tri = (k as f64) * (k as f64 - 1.0) / 2.0;
                if tri >= EXACT_LIMIT {
                    return Err(invalid("orbit too long for exact phase evaluation"));
                }
                let t = y0.rem_euclid(1.0) + frac_mul(*x0, k as f64) + frac_mul(*alpha, tri);
                values.push(unit_phase(t));
            }
            CyclicFunction::new(values)
        }
        set => {
            let members = generate_set(set, n as u64)?;
            CyclicFunction::indicator(n, members.into_iter().map(|m| m % n as u64))
        }
    }
}

/// Real 0/1 values of a set on `[1, L]`, `values[i]` for the integer `i + 1`.
pub fn set_indicator(members: &[u64], l: u64) -> Vec<f64> {
    let mut v = vec![0.0; l as usize];
    for &m in members {
        if (1..=l).contains(&m) {
            v[m as usize - 1] = 1.0;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn linear_quasi_small_case() {
        let s: GeneratorSpec = "linear_quasi:alpha=1.4142135623730951,delta=0.5"
            .parse()
            .unwrap();
        assert_eq!(generate_set(&s, 10).unwrap(), vec![1, 3, 5, 6, 8, 10]);
    }

    #[test]
    fn full_density_kinds() {
        let r: GeneratorSpec = "random:delta=1,seed=3".parse().unwrap();
        assert_eq!(generate_set(&r, 50).unwrap(), (1..=50).collect::<Vec<_>>());
        let q: GeneratorSpec = "quadratic_quasi:alpha=1.41421356237,delta=1"
            .parse()
            .unwrap();
        assert_eq!(generate_set(&q, 50).unwrap().len(), 50);
    }

    #[test]
    fn spec_round_trip() {
        for s in [
            "random:delta=0.3,seed=7",
            "linear_quasi:alpha=1.5,delta=0.25",
            "bracket_quadratic:delta=0.4",
            "random_subset_of:of=linear_quasi,alpha=1.5,delta=0.25,keep=0.5,seed=2",
            "random_subset_of:of=random,delta=0.5,inner_seed=4,keep=0.5,seed=2",
            "quadratic_phase:xi=3",
            "polynomial_phase:coeffs=0;0;0;1",
            "skew_shift:alpha=0.5,x0=0,y0=0",
        ] {
            let g: GeneratorSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
    }

    #[test]
    fn parse_errors() {
        assert!("random:delta=0.5,bogus=1".parse::<GeneratorSpec>().is_err());
        assert!("nope:delta=0.5".parse::<GeneratorSpec>().is_err());
        assert!("linear_quasi:alpha=1".parse::<GeneratorSpec>().is_err());
        let no_seed: GeneratorSpec = "random:delta=0.5".parse().unwrap();
        assert!(generate_set(&no_seed, 10).is_err());
        assert!(generate_set(&no_seed.with_default_seed(1), 10).is_ok());
        let bad: GeneratorSpec = "linear_quasi:alpha=1.5,delta=1.5".parse().unwrap();
        assert!(generate_set(&bad, 10).is_err());
    }

    #[test]
    fn frozen_orbit_and_zero_phase() {
        let s: GeneratorSpec = "skew_shift:alpha=0".parse().unwrap();
        let f = generate_function(&s, 64).unwrap();
        assert!(f
            .values()
            .iter()
            .all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let q: GeneratorSpec = "quadratic_phase:xi=0".parse().unwrap();
        assert!(generate_function(&q, 17)
            .unwrap()
            .values()
            .iter()
            .all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn exact_fractional_parts() {
        assert_eq!(frac_mul(0.5, 3.0), 0.5);
        assert_eq!(
            floor_mul(std::f64::consts::SQRT_2, 1_000_000.0),
            1_414_213.0
        );
        let x = frac_mul(std::f64::consts::SQRT_2, 1e15);
        assert!((0.0..1.0).contains(&x));
    }
}
