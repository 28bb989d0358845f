//! Numerical workbench for univalent functions with quasiconformal extension.

pub mod beltrami;
pub mod error;
pub mod experiment;
pub mod extremal;
pub mod grunsky;
pub mod linalg;
pub mod metrics;
pub mod qcmap;
pub mod quaddiff;
pub mod quadrature;
pub mod series;

pub use error::{Error, Result};
pub use series::{LaurentSeries, Point, C64};
