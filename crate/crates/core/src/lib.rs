//! Non-backtracking walks on finite graphs.
//!
//! Builds the simple and non-backtracking walk operators on a graph, certifies
//! the quantitative relation between their spectral gaps, solves the tree
//! Green-function system at complex energies, and checks the determinant
//! identities that tie the non-backtracking matrix to the characteristic
//! polynomial of the adjacency matrix (or of a weighted Schrödinger operator).

pub mod determinants;
pub mod error;
pub mod generate;
pub mod graph;
pub mod green;
pub mod linalg;
pub mod operators;
pub mod spectral;

pub use determinants::{DetReport, Identity, IharaReport, Tolerances};
pub use error::{Error, Hypothesis, Result};
pub use generate::{generate, random_tree, Family};
pub use graph::{parse_edge_list, to_edge_list, validate, Graph, ValidationReport, Weights};
pub use green::{solve_zeta, ZetaField};
pub use linalg::C64;
pub use operators::{EdgeFunction, OperatorMatrix, VertexFunction};
pub use spectral::{certify, SpectralCertificate};
