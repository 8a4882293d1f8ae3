use super::edge::{matmul, EdgeFunction, TriFunction};
use crate::error::{Error, Result};
use crate::reduce;
use crate::report::Check;
use rayon::prelude::*;

/// `G(x, x') = E_y f(x, y) f(x', y)`.
pub(crate) fn gram(f: &EdgeFunction) -> Vec<f64> {
    let n = f.vertex_count();
    let mut g = vec![0.0; n * n];
    g.par_chunks_mut(n).enumerate().for_each(|(x, row)| {
        let fx = f.row(x);
        for (xp, out) in row.iter_mut().enumerate() {
            let s: f64 = fx.iter().zip(f.row(xp)).map(|(a, b)| a * b).sum();
            *out = s / n as f64;
        }
    });
    g
}

/// `‖f‖⁴_{□²} = E_{x,x'} G(x, x')²`.
pub fn box2_fourth_power(f: &EdgeFunction) -> f64 {
    let g = gram(f);
    let sq: Vec<f64> = g.iter().map(|v| v * v).collect();
    reduce::sum_f64(&sq) / sq.len() as f64
}

pub fn box2_norm(f: &EdgeFunction) -> f64 {
    box2_fourth_power(f).max(0.0).powf(0.25)
}

/// `E_{x,y,z} f(x,y) g(y,z) h(z,x)`.
pub fn triangle_form(f: &EdgeFunction, g: &EdgeFunction, h: &EdgeFunction) -> Result<f64> {
    let n = f.vertex_count();
    for other in [g, h] {
        if other.vertex_count() != n {
            return Err(Error::ModulusMismatch {
                left: n,
                right: other.vertex_count(),
            });
        }
    }
    // (gh)(y, x) = Σ_z g(y,z) h(z,x)
    let gh = matmul(g.values(), h.values(), n);
    let terms: Vec<f64> = (0..n * n)
        .map(|i| f.values()[i] * gh[(i % n) * n + i / n])
        .collect();
    Ok(reduce::sum_f64(&terms) / (n as f64).powi(3))
}

/// `|E f(x,y) g(y,z) h(z,x)| ≤ min(‖f‖, ‖g‖, ‖h‖)` in the box norm.
pub fn verify_graph_gvn(f: &EdgeFunction, g: &EdgeFunction, h: &EdgeFunction) -> Result<Check> {
    for (i, e) in [f, g, h].iter().enumerate() {
        if e.max_abs() > 1.0 + 1e-12 {
            return Err(Error::ContractViolation(format!(
                "operand {i} exceeds magnitude 1"
            )));
        }
    }
    let lhs = triangle_form(f, g, h)?.abs();
    let rhs = box2_norm(f).min(box2_norm(g)).min(box2_norm(h));
    Ok(Check::at_most(
        "|triangle form| <= min box norm",
        lhs,
        rhs + 1e-9,
    ))
}

/// `‖f‖⁸_{□³} = E_{x,x'} ‖g_{x,x'}‖⁴_{□²}` with `g_{x,x'}(y,z) = f(x,y,z) f(x',y,z)`.
pub fn box3_eighth_power(f: &TriFunction) -> f64 {
    let n = f.vertex_count();
    let slice = |x: usize| &f.values()[x * n * n..(x + 1) * n * n];
    let per_x = reduce::par_sum_f64(0..n * n, |i| {
        let (x, xp) = (i / n, i % n);
        let (a, b) = (slice(x), slice(xp));
        let g: Vec<f64> = a.iter().zip(b).map(|(u, v)| u * v).collect();
        box2_fourth_power(&EdgeFunction::from_vec_unchecked(n, g))
    });
    per_x / (n * n) as f64
}

pub fn box3_norm(f: &TriFunction) -> f64 {
    box3_eighth_power(f).max(0.0).powf(0.125)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_structure() {
        let f = EdgeFunction::from_fn(8, |x, y| if x < 4 && y >= 4 { 1.0 } else { 0.0 }).unwrap();
        assert!((box2_norm(&f) - 0.5).abs() < 1e-12);
        assert!((box2_norm(&EdgeFunction::constant(5, 1.0).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bipartite_has_no_triangles() {
        let f = EdgeFunction::from_fn(10, |x, y| ((x < 5) != (y < 5)) as u8 as f64).unwrap();
        assert_eq!(triangle_form(&f, &f, &f).unwrap(), 0.0);
    }

    #[test]
    fn box3_constant() {
        let f = TriFunction::new(4, vec![0.3; 64], true).unwrap();
        assert!((box3_norm(&f) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn gvn_on_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut r = || EdgeFunction::from_fn(12, |_, _| rng.gen_range(-1.0..1.0)).unwrap();
        let (f, g, h) = (r(), r(), r());
        assert!(verify_graph_gvn(&f, &g, &h).unwrap().pass);
    }
}
