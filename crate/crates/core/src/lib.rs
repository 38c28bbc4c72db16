//! Elliptic Newton flows on the torus.
//!
//! Two halves, joined by graph extraction:
//!
//! * a numerical side: lattices, elliptic functions realized from their
//!   divisors through Weierstrass sigma/zeta sums, the desingularized Newton
//!   vector field with its damped variant, trajectory integration and
//!   separatrix tracing;
//! * a combinatorial side: rotation-system maps on the torus, face traversal,
//!   duals, the angle and Euler properties, the single-face reduction
//!   pipeline, exhaustive enumeration, and a catalog of the small reference
//!   graphs.
//!
//! [`extract`] turns an integrated phase portrait into a combinatorial map and
//! matches it against the catalog.

pub mod batch;
pub mod cmap;
pub mod divisor;
pub mod elliptic;
pub mod error;
pub mod extract;
pub mod flow;
pub mod integrate;
pub mod lattice;
pub mod catalog;
pub mod props;
pub mod pseudo;
pub mod weierstrass;

pub use batch::ExecMode;
pub use error::{Error, Result};
