//! Discrete exterior calculus on geodesic balls of the hyperbolic plane
//! `H²(−a²)` and the flat plane, with L² and H¹ Hodge decompositions of
//! 1-cochains and an exact-rational check of the constant-curvature
//! Weitzenböck identities.

pub mod cli;
pub mod complex;
pub mod dec;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod hodge;
pub mod weitzenbock;

pub use complex::{apply_d, build_complex, interior_restriction, Cochain, CochainFile, SimplicialComplex};
pub use dec::{Dec, InnerProductSpace, SolveConfig, Space, SparseMatrix, StarWeights};
pub use error::{Error, Result};
pub use forms::BuiltinForm;
pub use geometry::{ball_mesh, cutoff_cochain, distance, triangle_area, Curvature, DiskPoint, TriMesh};
pub use hodge::{decompose, harmonic_diagnostics, stream_function, truncation_distance, HarmonicReport, HodgeSplit, StreamResult};
