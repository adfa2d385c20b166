//! Exact computation of G-fixed Hilbert scheme partition functions of K3
//! surfaces: truncated q-series, Dedekind eta quotients, shifted ADE theta
//! functions, local orbifold series, global eta products and their Hecke and
//! chi_y refinements.

pub mod arith;
pub mod cli;
pub mod error;
pub mod eta;
pub mod k3cases;
pub mod lattice;
pub mod orbifold;
pub mod qseries;
pub mod refine;
pub mod rootsys;
pub mod suite;

pub use error::{Error, Result};
pub use qseries::{Exponent, QSeries};
