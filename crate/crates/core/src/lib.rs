//! Extended-precision laboratory for Nikishin systems, Cauchy biorthogonal
//! polynomials, multi-level Hermite–Padé forms and the associated vector
//! equilibrium problem.

pub mod asymptotics;
pub mod equilibrium;
pub mod error;
pub mod exec;
pub mod ext;
pub mod hp_solver;
pub mod linalg;
pub mod measures;
pub mod nikishin;
pub mod poly;
pub mod polyzeros;

pub use error::{Error, Result};
pub use exec::Exec;
pub use ext::{ExtComplex, ExtReal};
