//! Discrete models for isoperimetric inequalities on hyperbolic surfaces.
//!
//! Surfaces are glued from pairs of pants ([`surface`]); collar geometry lives
//! in [`hypmath`]. [`isoperimetry`] searches geodesic domains for the
//! isoperimetric constant, [`netgraph`] builds the net graph of the thick part
//! and [`graphtools`] measures Cheeger constants, Gromov hyperbolicity and
//! boundary proxies on the resulting graphs.

pub mod bundled;
pub mod generate;
pub mod graphtools;
pub mod hypmath;
pub mod isoperimetry;
pub mod netgraph;
pub mod surface;
