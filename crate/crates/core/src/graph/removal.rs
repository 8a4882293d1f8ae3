use super::cayley::triangle_count;
use super::edge::{EdgeFunction, VertexPartition};
use super::regularity::{strong_regularize, GraphDecomposition};
use crate::error::{invalid, Error, Result};
use crate::growth::GrowthFunction;
use crate::report::Check;
use serde::Serialize;
use std::io::Write;

#[derive(Clone, Debug, Serialize)]
pub struct RemovalReport {
    pub delta: f64,
    pub epsilon: f64,
    pub growth: GrowthFunction,
    pub vertex_count: usize,
    #[serde(rename = "T")]
    pub complexity: u64,
    pub cells: usize,
    pub edges_before: u64,
    pub edges_removed: u64,
    pub removed_small_cells: u64,
    pub removed_irregular_pairs: u64,
    pub removed_sparse_pairs: u64,
    /// `edges_removed · 9 / (δ |V|²)`.
    #[serde(rename = "C")]
    pub c_measured: f64,
    pub triangles_before: u64,
    pub triangles_after: u64,
    /// `δ⁶ / (2 · 2^{3T})`.
    pub claimed_density: f64,
    /// Ordered triangle density `6 · triangles_before / |V|³`.
    pub triangle_density: f64,
    pub checks: Vec<Check>,
    pub decomposition: GraphDecomposition,
}

impl RemovalReport {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

/// Removes edges so that few triangles survive: edges touching small cells, edges in cell
/// pairs where the small part carries too much mass, and edges in sparse cell pairs.
pub fn triangle_removal(
    g: &EdgeFunction,
    delta: f64,
    seed: u64,
) -> Result<(EdgeFunction, RemovalReport)> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta must lie in (0, 1]"));
    }
    if !g.is_binary() || !g.is_symmetric() {
        return Err(Error::ContractViolation(
            "triangle removal needs an undirected 0/1 graph".into(),
        ));
    }
    let v = g.vertex_count();
    let epsilon = delta * delta / 100.0;
    let growth = GrowthFunction::ScaledExp {
        scale: 100.0 / delta.powi(6),
        base: 8,
    };
    let dec = strong_regularize(g, epsilon, growth, seed)?;
    let p: &VertexPartition = &dec.partition;
    let k = p.cell_count();
    let sizes = p.cell_sizes();
    let t = dec.complexity;

    let small_cell: Vec<bool> = sizes
        .iter()
        .map(|&s| (s as f64) < delta * v as f64 / (t as f64).exp2())
        .collect();
    let mut fs_mass = vec![0.0; k * k];
    let mut density = vec![0.0; k * k];
    for x in 0..v {
        for y in 0..v {
            let c = p.cell_of(x) * k + p.cell_of(y);
            fs_mass[c] += dec.small.get(x, y).powi(2);
            density[c] += g.get(x, y);
        }
    }
    let pair_size = |c: usize| (sizes[c / k] * sizes[c % k]) as f64;
    let irregular: Vec<bool> = (0..k * k)
        .map(|c| fs_mass[c] / pair_size(c) >= epsilon * epsilon / delta)
        .collect();
    let sparse: Vec<bool> = (0..k * k)
        .map(|c| density[c] / pair_size(c) < delta)
        .collect();

    let mut out = g.values().to_vec();
    let (mut r1, mut r2, mut r3) = (0u64, 0u64, 0u64);
    for x in 0..v {
        for y in x..v {
            if g.get(x, y) == 0.0 {
                continue;
            }
            let (cx, cy) = (p.cell_of(x), p.cell_of(y));
            let c = cx * k + cy;
            let hit = if small_cell[cx] || small_cell[cy] {
                r1 += 1;
                true
            } else if irregular[c] {
                r2 += 1;
                true
            } else if sparse[c] {
                r3 += 1;
                true
            } else {
                false
            };
            if hit {
                out[x * v + y] = 0.0;
                out[y * v + x] = 0.0;
            }
        }
    }
    let cleaned = EdgeFunction::new(v, out)?;
    let removed = r1 + r2 + r3;
    let before = triangle_count(g);
    let after = triangle_count(&cleaned);
    let c_measured = removed as f64 * 9.0 / (delta * (v * v) as f64);
    let claimed = delta.powi(6) / 2.0 / (3.0 * t as f64).exp2();
    let ordered_density = 6.0 * before as f64 / (v as f64).powi(3);
    let mut checks = vec![
        Check::at_most(
            "cleaned edges <= input edges",
            cleaned.edge_count() as f64,
            g.edge_count() as f64,
        ),
        Check::at_most(
            "triangles after <= triangles before",
            after as f64,
            before as f64,
        ),
    ];
    if after > 0 {
        checks.push(Check::at_least(
            "triangle density >= claimed c(delta)",
            ordered_density,
            claimed,
        ));
    }
    Ok((
        cleaned.clone(),
        RemovalReport {
            delta,
            epsilon,
            growth,
            vertex_count: v,
            complexity: t,
            cells: k,
            edges_before: g.edge_count(),
            edges_removed: removed,
            removed_small_cells: r1,
            removed_irregular_pairs: r2,
            removed_sparse_pairs: r3,
            c_measured,
            triangles_before: before,
            triangles_after: after,
            claimed_density: claimed,
            triangle_density: ordered_density,
            checks,
            decomposition: dec,
        },
    ))
}
