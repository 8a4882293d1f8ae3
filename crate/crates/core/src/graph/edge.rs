use crate::error::{invalid, Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::io::{BufRead, BufReader, Read, Write};

/// Real weights on `V × V`, bounded by one in magnitude, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFunction {
    n: usize,
    values: Vec<f64>,
}

impl EdgeFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("vertex count must be positive"));
        }
        if values.len() != n * n {
            return Err(invalid(format!(
                "expected {} entries, got {}",
                n * n,
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !v.is_finite() || v.abs() > 1.0 + 1e-12)
        {
            return Err(Error::ContractViolation(format!(
                "entry ({}, {}) = {} is not finite or exceeds 1",
                i / n,
                i % n,
                values[i]
            )));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(n, (0..n * n).map(|i| f(i / n, i % n)).collect())
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c; n * n])
    }

    pub(crate) fn from_vec_unchecked(n: usize, values: Vec<f64>) -> Self {
        Self { n, values }
    }

    /// Undirected 0/1 graph from an edge list.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut values = vec![0.0; n * n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            values[u * n + v] = 1.0;
            values[v * n + u] = 1.0;
        }
        Self::new(n, values)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.values[x * self.n..(x + 1) * self.n]
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|x| (0..x).all(|y| self.get(x, y) == self.get(y, x)))
    }

    pub fn in_unit_interval(&self) -> bool {
        self.values.iter().all(|&v| (0.0..=1.0).contains(&v))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        Self::from_vec_unchecked(
            n,
            (0..n * n)
                .map(|i| self.values[(i % n) * n + i / n])
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    fn zip(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ModulusMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(Self::from_vec_unchecked(
            self.n,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        ))
    }

    /// `(E_{x,y} |f|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        (crate::reduce::sum_f64(&sq) / sq.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Number of unordered edges `{u, v}` (loops counted once) of a 0/1 symmetric function.
    pub fn edge_count(&self) -> u64 {
        let n = self.n;
        (0..n)
            .map(|u| (u..n).filter(|&v| self.get(u, v) != 0.0).count() as u64)
            .sum()
    }

    /// `u v [weight]` lines, zero-indexed. Symmetric functions list each pair once.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        let sym = self.is_symmetric();
        let binary = self.is_binary();
        for u in 0..self.n {
            for v in (if sym { u } else { 0 })..self.n {
                let x = self.get(u, v);
                if x != 0.0 {
                    if binary {
                        writeln!(w, "{u} {v}")?;
                    } else {
                        writeln!(w, "{u} {v} {x}")?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Reads `u v [weight]` lines (weight defaults to 1). Edges are symmetrized unless
    /// `directed`. Blank lines and lines starting with `#` are skipped.
    pub fn read_edge_list<R: Read>(
        r: R,
        vertex_count: Option<usize>,
        directed: bool,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        let mut max_vertex = 0usize;
        for (lineno, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            if parts.len() < 2 || parts.len() > 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected `u v [weight]`",
                    lineno + 1
                )));
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {}: bad vertex `{s}`", lineno + 1)))
            };
            let (u, v) = (num(parts[0])?, num(parts[1])?);
            let w = match parts.get(2) {
                Some(s) => s
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad weight `{s}`", lineno + 1)))?,
                None => 1.0,
            };
            max_vertex = max_vertex.max(u).max(v);
            entries.push((u, v, w));
        }
        let n = vertex_count.unwrap_or(max_vertex + 1);
        let mut values = vec![0.0; n * n];
        for (u, v, w) in entries {
            if u >= n || v >= n {
                return Err(Error::Parse(format!(
                    "edge ({u}, {v}) exceeds vertex count {n}"
                )));
            }
            values[u * n + v] = w;
            if !directed {
                values[v * n + u] = w;
            }
        }
        Self::new(n, values)
    }
}

/// `C = A·B` for square row-major matrices, rows computed in parallel.
pub(crate) fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                let brow = &b[k * n..(k + 1) * n];
                for (o, bv) in row.iter_mut().zip(brow) {
                    *o += aik * bv;
                }
            }
        }
    });
    out
}

/// Weights on `V³` in `[0, 1]`; `symmetric` marks a 3-uniform hypergraph.
#[derive(Clone, Debug, PartialEq)]
pub struct TriFunction {
    n: usize,
    values: Vec<f64>,
    symmetric: bool,
}

impl TriFunction {
    pub fn new(n: usize, values: Vec<f64>, symmetric: bool) -> Result<Self> {
        if n == 0 {
            return Err(invalid("vertex count must be positive"));
        }
        if values.len() != n * n * n {
            return Err(invalid(format!(
                "expected {} entries, got {}",
                n * n * n,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::ContractViolation(format!("entry {v} outside [0,1]")));
        }
        let t = Self {
            n,
            values,
            symmetric,
        };
        if symmetric && !t.check_symmetry() {
            return Err(Error::ContractViolation(
                "hypergraph weights are not permutation-symmetric".into(),
            ));
        }
        Ok(t)
    }

    pub fn from_fn(
        n: usize,
        symmetric: bool,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        Self::new(
            n,
            (0..n * n * n)
                .map(|i| f(i / (n * n), (i / n) % n, i % n))
                .collect(),
            symmetric,
        )
    }

    fn check_symmetry(&self) -> bool {
        let n = self.n;
        (0..n).all(|x| {
            (0..n).all(|y| {
                (0..n).all(|z| {
                    let v = self.get(x, y, z);
                    v == self.get(y, x, z) && v == self.get(x, z, y)
                })
            })
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[(x * self.n + y) * self.n + z]
    }
}

/// A partition of `V`, used as the finite σ-algebra for conditional expectations.
/// Cell ids are `0..cell_count`, numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexPartition {
    cells: Vec<usize>,
    cell_count: usize,
}

impl VertexPartition {
    pub fn trivial(n: usize) -> Self {
        Self {
            cells: vec![0; n],
            cell_count: usize::from(n > 0),
        }
    }

    pub fn discrete(n: usize) -> Self {
        Self {
            cells: (0..n).collect(),
            cell_count: n,
        }
    }

    /// Accepts any labels; they are renumbered by first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let cells: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self {
            cell_count: map.len(),
            cells,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.cells[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.cells
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.cell_count];
        for &c in &self.cells {
            s[c] += 1;
        }
        s
    }

    /// Common refinement with `{A, Aᶜ}` and `{B, Bᶜ}`.
    pub fn refine(&self, a: &[bool], b: &[bool]) -> Self {
        let labels: Vec<usize> = self
            .cells
            .iter()
            .enumerate()
            .map(|(v, &c)| c * 4 + 2 * a[v] as usize + b[v] as usize)
            .collect();
        Self::from_labels(&labels)
    }

    /// Whether every cell of `self` lies inside a cell of `coarser`.
    pub fn refines(&self, coarser: &Self) -> bool {
        let mut image = vec![usize::MAX; self.cell_count];
        self.cells.iter().zip(&coarser.cells).all(|(&c, &d)| {
            if image[c] == usize::MAX {
                image[c] = d;
            }
            image[c] == d
        })
    }

    /// `vertex,cell` rows with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["vertex", "cell"])?;
        for (v, c) in self.cells.iter().enumerate() {
            wr.write_record([v.to_string(), c.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["vertex", "cell"] {
            return Err(Error::Parse(
                "partition CSV header must be `vertex,cell`".into(),
            ));
        }
        let mut rows: Vec<(usize, usize)> = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let p = |i: usize| {
                rec[i]
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad row {rec:?}")))
            };
            rows.push((p(0)?, p(1)?));
        }
        rows.sort();
        if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
            return Err(Error::Parse(
                "partition CSV must list each vertex 0..n once".into(),
            ));
        }
        Ok(Self::from_labels(
            &rows.iter().map(|r| r.1).collect::<Vec<_>>(),
        ))
    }
}

/// `E(f | 𝒫 ⊗ 𝒫)`: each entry replaced by the mean over its cell pair.
pub fn conditional_expectation(f: &EdgeFunction, p: &VertexPartition) -> Result<EdgeFunction> {
    let n = f.vertex_count();
    if p.vertex_count() != n {
        return Err(Error::ModulusMismatch {
            left: n,
            right: p.vertex_count(),
        });
    }
    let k = p.cell_count();
    let sizes = p.cell_sizes();
    let mut sums = vec![0.0; k * k];
    for x in 0..n {
        let cx = p.cell_of(x) * k;
        for (y, v) in f.row(x).iter().enumerate() {
            sums[cx + p.cell_of(y)] += v;
        }
    }
    let means: Vec<f64> = (0..k * k)
        .map(|i| sums[i] / (sizes[i / k] as f64 * sizes[i % k] as f64))
        .collect();
    Ok(EdgeFunction::from_vec_unchecked(
        n,
        (0..n * n)
            .map(|i| means[p.cell_of(i / n) * k + p.cell_of(i % n)])
            .collect(),
    ))
}

/// `‖E(f | 𝒫 ⊗ 𝒫)‖²_{L²}`.
pub fn energy(f: &EdgeFunction, p: &VertexPartition) -> Result<f64> {
    let e = conditional_expectation(f, p)?.l2_norm();
    Ok(e * e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refine_and_expectation() {
        let p = VertexPartition::trivial(4);
        let q = p.refine(&[true, true, false, false], &[true, false, true, false]);
        assert_eq!(q.cell_count(), 4);
        assert!(q.refines(&p));
        assert!(!p.refines(&q));
        let f = EdgeFunction::from_fn(4, |x, y| ((x + y) % 2) as f64).unwrap();
        let e = conditional_expectation(&f, &VertexPartition::trivial(4)).unwrap();
        assert!(e.values().iter().all(|&v| v == 0.5));
        let d = conditional_expectation(&f, &VertexPartition::discrete(4)).unwrap();
        assert_eq!(d, f);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = EdgeFunction::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0 1\n1 2\n3 4\n");
        assert_eq!(
            EdgeFunction::read_edge_list(&buf[..], Some(5), false).unwrap(),
            g
        );
        assert!(EdgeFunction::read_edge_list("0 x\n".as_bytes(), None, false).is_err());
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn partition_csv_round_trip() {
        let p = VertexPartition::from_labels(&[5, 5, 2, 7, 2]);
        assert_eq!(p.assignment(), &[0, 0, 1, 2, 1]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(VertexPartition::read_csv(&buf[..]).unwrap(), p);
    }

    #[test]
    fn matmul_small() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [0.0, 1.0, 1.0, 0.0];
        assert_eq!(matmul(&a, &b, 2), vec![2.0, 1.0, 4.0, 3.0]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(EdgeFunction::new(1, vec![1.5]).is_err());
        assert!(TriFunction::new(2, vec![0.5; 8], true).is_ok());
        let mut v = vec![0.0; 8];
        v[1] = 1.0;
        assert!(TriFunction::new(2, v, true).is_err());
    }
}
