pub mod chebyshev;
pub mod error;
pub mod io;
pub mod linalg;
pub mod pl;
pub mod poly;
pub mod rat;
pub mod ratgeom;
pub mod series;
pub mod suites;
pub mod svg;
pub mod testcurves;
pub mod toric;
pub mod valuations;

pub use error::{Error, Result};
pub use rat::{ExtRat, QVec, Rat};
