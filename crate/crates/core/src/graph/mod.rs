//! Dense graphs and 3-uniform hypergraphs: cut-type box norms, energy-increment
//! regularity, Cayley constructions from sets mod N, and triangle removal.

mod cayley;
mod edge;
mod norms;
mod regularity;
mod removal;

pub use cayley::{
    cayley_3hypergraph, cayley_tripartite, cyclic_progression_count, tetrahedron_count,
    triangle_count, BitMatrix, CayleyGraph, CayleyHypergraph, VERIFY_LIMIT,
};
pub use edge::{conditional_expectation, energy, EdgeFunction, TriFunction, VertexPartition};
pub use norms::{
    box2_fourth_power, box2_norm, box3_eighth_power, box3_norm, triangle_form, verify_graph_gvn,
};
pub use regularity::{
    box_dichotomy, rectangle_correlation, strong_regularize, weak_regularize, BoxWitness,
    GraphBounds, GraphDecomposition, WeakRegularity, DICHOTOMY_ATTEMPTS,
};
pub use removal::{triangle_removal, RemovalReport};
