use super::edge::{EdgeFunction, TriFunction};
use crate::error::{invalid, Error, Result};
use serde::Serialize;

/// Largest modulus for which the brute-force progression count is cross-checked.
pub const VERIFY_LIMIT: usize = 60;

/// Adjacency rows as bitsets, for exact triangle counting.
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn from_graph(g: &EdgeFunction) -> Self {
        let n = g.vertex_count();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for u in 0..n {
            for (v, &x) in g.row(u).iter().enumerate() {
                if x != 0.0 && u != v {
                    bits[u * words + v / 64] |= 1 << (v % 64);
                }
            }
        }
        Self { n, words, bits }
    }

    fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    fn has(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / 64] >> (v % 64) & 1 == 1
    }

    /// Unordered triangles, ignoring loops and treating any nonzero weight as an edge.
    pub fn triangle_count(&self) -> u64 {
        let mut t = 0u64;
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has(u, v) {
                    t += self
                        .row(u)
                        .iter()
                        .zip(self.row(v))
                        .map(|(a, b)| (a & b).count_ones() as u64)
                        .sum::<u64>();
                }
            }
        }
        t / 3
    }
}

pub fn triangle_count(g: &EdgeFunction) -> u64 {
    BitMatrix::from_graph(g).triangle_count()
}

/// Unordered 4-sets all of whose triples are hyperedges.
pub fn tetrahedron_count(h: &TriFunction) -> u64 {
    let n = h.vertex_count();
    let on = |a, b, c| h.get(a, b, c) != 0.0;
    let mut t = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if on(a, b, c) {
                    t += (c + 1..n)
                        .filter(|&d| on(a, b, d) && on(a, c, d) && on(b, c, d))
                        .count() as u64;
                }
            }
        }
    }
    t
}

/// Pairs `(a, d) ∈ (Z/N)²` with `a, a+d, …, a+(k−1)d ∈ A`, including `d = 0`.
pub fn cyclic_progression_count(members: &[bool], k: usize) -> u64 {
    let n = members.len();
    let mut c = 0;
    for a in 0..n {
        for d in 0..n {
            if (0..k).all(|i| members[(a + i * d) % n]) {
                c += 1;
            }
        }
    }
    c
}

fn membership(a: &[u64], n: usize) -> Result<Vec<bool>> {
    if n == 0 {
        return Err(invalid("modulus must be positive"));
    }
    let mut m = vec![false; n];
    for &x in a {
        m[(x % n as u64) as usize] = true;
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct CayleyGraph {
    pub modulus: usize,
    #[serde(skip)]
    pub graph: EdgeFunction,
    pub triangle_count: u64,
    /// `#{(a, d)}` with `a, a+d, a+2d ∈ A`, when cross-checked.
    pub progression_pairs: Option<u64>,
}

/// Tripartite graph on `Z/N × {1,2,3}` (vertices `x`, `N+y`, `2N+z`) with edges
/// `y+2z ∈ A`, `z−x ∈ A`, `−2x−y ∈ A`. Triangles are in `N`-to-one correspondence with
/// 3-term progressions in `A`.
pub fn cayley_tripartite(a: &[u64], n: usize) -> Result<CayleyGraph> {
    let m = membership(a, n)?;
    let r = |v: i64| m[v.rem_euclid(n as i64) as usize];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (i, j) = (i as i64, j as i64);
            if r(i + 2 * j) {
                edges.push((n + i as usize, 2 * n + j as usize));
            }
            if r(j - i) {
                edges.push((i as usize, 2 * n + j as usize));
            }
            if r(-2 * i - j) {
                edges.push((i as usize, n + j as usize));
            }
        }
    }
    let graph = EdgeFunction::from_edges(3 * n, edges)?;
    let triangles = triangle_count(&graph);
    let mut pairs = None;
    if n <= VERIFY_LIMIT {
        let p = cyclic_progression_count(&m, 3);
        if triangles != n as u64 * p {
            return Err(Error::PostconditionViolation(format!(
                "{triangles} triangles but N * #(a,d) = {}",
                n as u64 * p
            )));
        }
        pairs = Some(p);
    }
    Ok(CayleyGraph {
        modulus: n,
        graph,
        triangle_count: triangles,
        progression_pairs: pairs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CayleyHypergraph {
    pub modulus: usize,
    #[serde(skip)]
    pub hypergraph: TriFunction,
    pub tetrahedron_count: u64,
    pub progression_pairs: Option<u64>,
}

/// 4-partite 3-uniform hypergraph on `Z/N × {1,2,3,4}` with faces
/// `y+2z+3w`, `−x+z+2w`, `−2x−y+w`, `−3x−2y−z ∈ A`. Tetrahedra are in `N²`-to-one
/// correspondence with 4-term progressions in `A`.
pub fn cayley_3hypergraph(a: &[u64], n: usize) -> Result<CayleyHypergraph> {
    let m = membership(a, n)?;
    let r = |v: i64| m[v.rem_euclid(n as i64) as usize];
    let v = 4 * n;
    let mut values = vec![0.0; v * v * v];
    let mut set = |p: usize, q: usize, s: usize| {
        for (a, b, c) in [
            (p, q, s),
            (p, s, q),
            (q, p, s),
            (q, s, p),
            (s, p, q),
            (s, q, p),
        ] {
            values[(a * v + b) * v + c] = 1.0;
        }
    };
    for i in 0..n as i64 {
        for j in 0..n as i64 {
            for k in 0..n as i64 {
                let (iu, ju, ku) = (i as usize, j as usize, k as usize);
                // (x, y, z) = (i, j, k) and the other three face types
                if r(-3 * i - 2 * j - k) {
                    set(iu, n + ju, 2 * n + ku);
                }
                if r(-2 * i - j + k) {
                    set(iu, n + ju, 3 * n + ku);
                }
                if r(-i + j + 2 * k) {
                    set(iu, 2 * n + ju, 3 * n + ku);
                }
                if r(i + 2 * j + 3 * k) {
                    set(n + iu, 2 * n + ju, 3 * n + ku);
                }
            }
        }
    }
    let hypergraph = TriFunction::new(v, values, true)?;
    let tets = tetrahedron_count(&hypergraph);
    let mut pairs = None;
    if n <= VERIFY_LIMIT {
        let p = cyclic_progression_count(&m, 4);
        if tets != (n * n) as u64 * p {
            return Err(Error::PostconditionViolation(format!(
                "{tets} tetrahedra but N^2 * #(a,d) = {}",
                (n * n) as u64 * p
            )));
        }
        pairs = Some(p);
    }
    Ok(CayleyHypergraph {
        modulus: n,
        hypergraph,
        tetrahedron_count: tets,
        progression_pairs: pairs,
    })
}
