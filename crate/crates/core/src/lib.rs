//! Electrical networks and Lipschitz harmonic functions on 2-ended graphs.
//!
//! A 2-ended graph is given by a periodic [`LayeredSpec`]: a Z-indexed stack of
//! identical finite layers with fixed intra-layer and adjacent-layer edge rules.
//! Everything numeric happens on finite truncations of the expanded graph.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: specs, truncations, balls, spheres, terminal layers and cuts.
//! * [`solve`]: banded elimination for the grounded Laplacian, generic over
//!   exact rationals and `f64`.
//! * [`electric`]: edge/vertex fields, Kirchhoff residuals, Ohm duality and
//!   unit currents.
//! * [`harmonic`]: the ball-current limit producing a Lipschitz harmonic
//!   function, plus cut-flow and affine-fit evidence.
//! * [`symmetry`]: the cubic non-Cayley graph on `Z x Z/10`, its symbolic
//!   automorphisms and the mechanical claim checks.
//! * [`color`]: 3-edge-colouring of cubic specs driven by a harmonic function.
//! * [`saw`]: exact self-avoiding walk counts and growth-rate checks.
//! * [`cli`]: the `twoended` command-line front end.

#![forbid(unsafe_code)]

pub mod cli;
pub mod color;
pub mod electric;
pub mod error;
pub mod graph;
pub mod harmonic;
pub mod io;
pub mod numeric;
pub mod report;
pub mod saw;
pub mod solve;
pub mod specs;
pub mod symmetry;

pub use error::{Error, Result};
pub use graph::{BallView, Cut, Ends, Graph, LayeredSpec, Vertex};
pub use numeric::{NumericMode, Scalar};
