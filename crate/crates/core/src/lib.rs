//! Numerical harmonic analysis on the ax+b group, the reduced Heisenberg group and SU(2):
//! coefficient functions, orthogonality relations, cyclic derivations and their norm bounds.

pub mod axb;
pub mod decomp;
pub mod error;
pub mod funcexpr;
pub mod heis;
pub mod interval;
pub mod jet;
pub mod linalg;
pub mod quadrature;
pub mod su2;

pub use error::{Error, Result};
pub use funcexpr::{DomainTag, FuncExpr, Measure, PlaneFunc};
pub use interval::Interval;
pub use num_complex::Complex64 as C64;
pub use quadrature::{BCutoff, IntegralResult, QuadConfig};
