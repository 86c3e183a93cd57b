//! Finite combinatorics of plegma families and desk-scale computations with
//! higher order spreading models.

pub mod acceptance;
pub mod combin;
pub mod error;
pub mod norms;
pub mod num;
pub mod oracle;
pub mod plegma;
pub mod ramsey;
pub mod search;
pub mod sm;
pub mod subset;
pub mod vector;
pub mod zoo;

pub use error::{Error, Result};
pub use num::{NormValue, Rational};
pub use plegma::PlegmaTuple;
pub use subset::{FinSubset, Universe};
pub use vector::SparseVec;
