pub mod embed;
pub mod error;
pub mod flaggeom;
pub mod flagset;
pub mod gf;
pub mod hyper;
pub mod linalg;
pub mod report;
pub mod rng;
pub mod semipoly;

pub use error::{Error, Result};
