//! Numerical laboratory for the low-frequency spectrum of the Laplacian on
//! thin 3D rod domains.
//!
//! The crate builds structured hexahedral meshes of the stretched reference
//! domain, assembles the anisotropic stiffness/mass pair for mixed, Neumann
//! or Dirichlet boundary conditions, computes the lowest eigenpairs by
//! shift-invert Lanczos, and cross-validates them against a closed-form
//! prism oracle and a 1D weighted Sturm-Liouville limit problem. The
//! `studies` module orchestrates eps-sweeps that track how the 3D spectrum
//! approaches the 1D limit as the rod gets thinner, and hosts the data
//! formats behind the `rodspec` CLI.

// index arithmetic reads clearest in the element kernels; negated
// comparisons are deliberate NaN-rejecting input guards
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod assembly;
pub mod cli;
pub mod error;
pub mod eigensolve;
pub mod geometry;
pub mod limit1d;
pub mod mesh;
pub mod modes;
pub mod sparse;
pub mod studies;
pub mod vtk;

pub use assembly::{assemble, BcMode, SparsePair};
pub use eigensolve::{solve_lowest, subspace_angle, EigenPair};
pub use error::{Error, Result};
pub use geometry::{CrossSection, Profile, RodDomain, RodKind};
pub use mesh::{build_mesh, mesh_quality, FaceTag, HexMesh};
