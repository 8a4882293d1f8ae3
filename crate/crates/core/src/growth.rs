//! Growth functions F: N → N from a fixed menu, so runs are reproducible and
//! can be echoed in reports.

use crate::error::{invalid, Error, Result};
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GrowthFunction {
    /// `n^p`
    Poly(u32),
    /// `base^n`
    Exp(u32),
    /// `n + c`
    Shift(u64),
    /// `⌈scale · base^n⌉`
    ScaledExp { scale: f64, base: u32 },
}

impl GrowthFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GrowthFunction::Poly(p) if p == 0 => Err(invalid("poly exponent must be >= 1")),
            GrowthFunction::Exp(b) if b < 2 => Err(invalid("exp base must be >= 2")),
            GrowthFunction::Shift(c) if c == 0 => Err(invalid("shift must be >= 1")),
            GrowthFunction::ScaledExp { scale, base }
                if !(scale >= 1.0 && scale.is_finite()) || base < 2 =>
            {
                Err(invalid("scaled_exp needs finite scale >= 1 and base >= 2"))
            }
            _ => Ok(()),
        }
    }

    /// `F(n)` as a float; saturates to `+inf`.
    pub fn eval(&self, n: u64) -> f64 {
        match *self {
            GrowthFunction::Poly(p) => (n as f64).powi(p as i32),
            GrowthFunction::Exp(b) => (b as f64).powf(n as f64),
            GrowthFunction::Shift(c) => n as f64 + c as f64,
            GrowthFunction::ScaledExp { scale, base } => {
                (scale * (base as f64).powf(n as f64)).ceil()
            }
        }
    }

    /// `F(n)` exactly, saturating at `u128::MAX`.
    pub fn eval_exact(&self, n: u64) -> u128 {
        match *self {
            GrowthFunction::Poly(p) => (n as u128).checked_pow(p).unwrap_or(u128::MAX),
            GrowthFunction::Exp(b) => {
                if n > 127 {
                    u128::MAX
                } else {
                    (b as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
                }
            }
            GrowthFunction::Shift(c) => n as u128 + c as u128,
            GrowthFunction::ScaledExp { .. } => {
                let v = self.eval(n);
                if v >= u128::MAX as f64 {
                    u128::MAX
                } else {
                    v as u128
                }
            }
        }
    }

    /// `log₂ F(n)` for `n = 2^log2_n`, usable when `n` itself is astronomically large.
    pub fn log2_eval(&self, log2_n: f64) -> f64 {
        match *self {
            GrowthFunction::Poly(p) => p as f64 * log2_n,
            GrowthFunction::Exp(b) => log2_n.exp2() * (b as f64).log2(),
            GrowthFunction::Shift(c) => {
                if log2_n > 60.0 {
                    log2_n
                } else {
                    (log2_n.exp2() + c as f64).log2()
                }
            }
            GrowthFunction::ScaledExp { scale, base } => {
                scale.log2() + log2_n.exp2() * (base as f64).log2()
            }
        }
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFunction::Poly(p) => write!(f, "poly:{p}"),
            GrowthFunction::Exp(b) => write!(f, "exp:{b}"),
            GrowthFunction::Shift(c) => write!(f, "shift:{c}"),
            GrowthFunction::ScaledExp { scale, base } => write!(f, "scaled_exp:{scale}:{base}"),
        }
    }
}

impl Serialize for GrowthFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for GrowthFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let arg = |p: Option<&str>| -> Result<String> {
            p.map(str::to_string)
                .ok_or_else(|| invalid(format!("growth function `{s}` is missing a parameter")))
        };
        let num = |v: String| -> Result<u64> {
            v.parse()
                .map_err(|_| invalid(format!("bad growth parameter `{v}`")))
        };
        let g = match kind {
            "poly" => GrowthFunction::Poly(num(arg(parts.next())?)? as u32),
            "exp" => GrowthFunction::Exp(num(arg(parts.next())?)? as u32),
            "shift" => GrowthFunction::Shift(num(arg(parts.next())?)?),
            "scaled_exp" => {
                let scale: f64 = arg(parts.next())?
                    .parse()
                    .map_err(|_| invalid("bad scale"))?;
                let base = num(arg(parts.next())?)? as u32;
                GrowthFunction::ScaledExp { scale, base }
            }
            other => {
                return Err(invalid(format!(
                    "unknown growth function `{other}` (poly, exp, shift, scaled_exp)"
                )))
            }
        };
        if parts.next().is_some() {
            return Err(invalid(format!(
                "trailing parameters in growth function `{s}`"
            )));
        }
        g.validate()?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["poly:2", "exp:2", "shift:4", "scaled_exp:100:8"] {
            assert_eq!(s.parse::<GrowthFunction>().unwrap().to_string(), s);
        }
        assert!("exp:1".parse::<GrowthFunction>().is_err());
        assert!("tower:2".parse::<GrowthFunction>().is_err());
        assert!("poly".parse::<GrowthFunction>().is_err());
    }

    #[test]
    fn values() {
        assert_eq!(GrowthFunction::Exp(2).eval(10), 1024.0);
        assert_eq!(GrowthFunction::Shift(4).eval_exact(6), 10);
        assert_eq!(GrowthFunction::Exp(2).eval_exact(200), u128::MAX);
        assert_eq!(GrowthFunction::Poly(3).eval_exact(5), 125);
        assert!((GrowthFunction::Exp(2).log2_eval(3.0) - 8.0).abs() < 1e-12);
        assert!((GrowthFunction::Poly(2).log2_eval(10.0) - 20.0).abs() < 1e-12);
    }
}
