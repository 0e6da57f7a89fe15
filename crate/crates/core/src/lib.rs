//! Exact lattices in `Q_p^n`: canonical forms, the complex distance between
//! two lattices, lattice algebra, and the Nazarov semigroup of lattice
//! relations acting on them. A brute-force finite model of window-bounded
//! lattices serves as an independent oracle.

pub mod dvr;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod relation;
pub mod scalar;

pub use error::{Error, Result};
pub use lattice::{ComplexDistance, Lattice, NormExponent, Subspace};
pub use matrix::Matrix;
pub use relation::{compose, graph_approx, Relation};
pub use scalar::{PadicContext, Scalar, Valuation};
pub mod json;
pub mod oracle;
pub mod random;
pub mod verify;
