//! Quasi-clique numbers of dense inhomogeneous random graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: immutable bit-row graphs, induced edge counting, DIMACS I/O.
//! * [`kernel`]: kernels `κ(x, y)` on the unit square (constant, rank-1,
//!   block, bilinear grid), their diagonal maximum and local infima.
//! * [`sampler`]: vertex weights, graphs `G(n, κ)` and the coupled triple
//!   `(G, G', G'')` built from one shared uniform per vertex pair.
//! * [`solver`]: exact and heuristic maximum γ-quasi-clique search.
//! * [`theory`]: Bernoulli KL divergence and the typical quasi-clique number.
//! * [`harness`]: reproducible Monte-Carlo experiments with CSV reports.

pub mod graph;
pub mod harness;
pub mod kernel;
pub mod sampler;
pub mod solver;
pub mod theory;

pub use graph::{Graph, GraphError, VertexSet};
pub use harness::{ExperimentConfig, ExperimentReport, HarnessError, Mode};
pub use kernel::{Kernel, KernelError, MaxPoint};
pub use sampler::{CoupledTriple, WeightedSample};
pub use solver::{Gamma, QuasiCliqueResult};
pub use theory::TheoryEstimates;
