//! Multipartite Bell inequalities from graph-state stabilizers.
//!
//! The crate builds Bell expressions from pairable X/Z stabilizers of a graph
//! state, decides whether they self-test the state, and certifies their
//! classical and quantum bounds numerically. It also fits linear fidelity
//! bounds `F >= s * beta + mu` for robust self-testing and derives the Bell
//! value above which genuine multipartite entanglement is certified.
//!
//! ```
//! use graphbell::inequality::lookup;
//! use graphbell::verify::brute_force_classical_bound;
//!
//! let e = lookup("ghz3:1").unwrap().expression();
//! assert_eq!(brute_force_classical_bound(&e).unwrap().value, 3.0);
//! ```

pub mod coloring;
pub mod error;
pub mod graph;
pub mod inequality;
pub mod linalg;
pub mod pauli;
pub mod robust;
pub mod state;
pub mod verify;

pub use coloring::{color_classes, Coloring};
pub use error::{Error, Result, Violation};
pub use graph::Graph;
pub use inequality::{BellConfig, BellExpression};
pub use linalg::HermitianOperator;
pub use pauli::{generators, gf2_rank, is_pairable, PauliWord};
pub use robust::LinearFidelityBound;
pub use state::{expectation, graph_state_vector, StateVector};
pub use verify::AngleAssignment;
