//! Exact oracles and divisibility checks for the three extension models:
//! the hypergraph independence polynomial, the Potts model in Tutte form,
//! and binary symmetric Holant problems.

pub mod holant;
pub mod hyper;
pub mod potts;

pub use holant::{
    even_subgraph_tables, holant_ldc, holant_z, holant_z_poly, ising_line_graph_tables,
    HolantInstance,
};
pub use hyper::{
    hyper_ldc, hyper_marginal, hyper_ops, hyper_z, hyper_z_poly, lambda_c, lambda_s, DeletionKind,
    Hypergraph,
};
pub use potts::{potts_ldc, potts_z_spin, potts_z_tutte};
