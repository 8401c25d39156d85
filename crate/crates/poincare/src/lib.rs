//! Exact computation of multivariate Poincare series of divisor sequences.
//!
//! Given divisors `D_1, ..., D_k` on a finite connected multigraph (or on a
//! chain-of-loops metric graph), the Poincare series is the formal sum over
//! `n` in `N^k` of `(rank(n_1 D_1 + ... + n_k D_k) + 1) z^n`.  This crate
//! computes the series as a closed-form rational function in exact integer
//! arithmetic and can verify the result coefficient-by-coefficient against
//! independently computed divisor ranks.
//!
//! The main entry points are [`graph_series::poincare_graph`] and
//! [`chain_series::poincare_chain`]; the `poincare` binary wraps both behind
//! a JSON file interface.

pub mod chain;
pub mod chain_series;
pub mod cone;
pub mod error;
pub mod gf;
pub mod graph;
pub mod graph_series;
// pub mod io;
pub mod lattice;
pub mod matrix;
pub mod orthant;
// pub mod pipeline;
pub mod poly;
pub mod polyhedron;
pub mod rational;
pub mod smith;
pub mod symbolic;
pub mod tail;
pub mod torus;

pub use error::Error;
