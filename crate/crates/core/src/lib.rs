//! Exact subdivisions, triangulated metric cones, entourage algebra on finite
//! nets, radialization homotopies and simplicial approximation.

pub mod approx;
pub mod coarse;
pub mod cone;
pub mod dyadic;
pub mod error;
pub mod exact;
pub mod geom;
pub mod metric;
pub mod radialize;
pub mod scenario;
pub mod subdivide;

pub use dyadic::{Dyadic, DyadicPoint};
pub use error::{Error, Result};
