pub mod automorphism;
pub mod digraph;
pub mod error;
pub mod orbits;
pub mod params;
pub mod perm;
mod refine;
pub mod enumerate;
pub mod orbit_matrix;
pub mod bits;
pub mod ga;
pub mod canon;
pub mod io;
pub mod catalog;
