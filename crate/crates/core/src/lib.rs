pub mod catalog;
pub mod det_lines;
pub mod dvr_linalg;
pub mod error;
pub mod field;
pub mod hilbert_poly;
pub mod langton;
pub mod lattice_model;
pub mod matrix;
pub mod quiver;
pub mod text;
pub mod torsion;
pub mod valued_field;

pub use dvr_linalg::{Lattice, MatrixK, SmithDecomposition};
pub use error::{Error, Result};
pub use field::{Extension, Field, PrimeField, Rationals};
pub use matrix::Matrix;
pub use torsion::TorsionModule;
pub use valued_field::{Backend, BackendKind, Scalar, Valuation};
