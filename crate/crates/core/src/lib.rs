//! Spherical t-designs and truncated spherical tight framelets.
//!
//! This crate computes spherical t-designs by trust-region minimization of the
//! variational functional `A_{N,t}`, builds truncated tight-framelet systems on
//! chains of those designs, and runs a multiscale local-soft-threshold denoising
//! pipeline for signals sampled on the sphere.
//!
//! The pieces fit together as follows:
//!
//! - [`sht`]: exact (dense) spherical harmonic evaluation and the
//!   synthesis/analysis transforms every other module consumes.
//! - [`pointsets`]: spiral, uniform, and icosahedral initial configurations plus
//!   the rotation-gauge normalization.
//! - [`variational`]: the functional `A_{N,t}`, its gradient, and its Hessian
//!   action, exposed as an objective over the gauge-reduced variables.
//! - [`trustregion`]: a generic trust-region minimizer with a Steihaug
//!   preconditioned-CG subproblem solver.
//! - [`approx`]: least-squares projection onto polynomial spaces by CG on the
//!   weighted normal equations, and Wendland test functions.
//! - [`framelet`]: filter banks from bump functions, quadrature chains, and the
//!   multi-level framelet decomposition/reconstruction.
//! - [`denoise`]: spherical-cap local-soft thresholding and the end-to-end
//!   denoising pipeline with SNR/PSNR metrics.
//! - [`io`]: the plain-text file formats used by the CLI.

pub mod approx;
pub mod denoise;
pub mod design;
pub mod error;
pub mod framelet;
pub mod index;
pub mod io;
pub mod pointsets;
pub mod sht;
pub mod trustregion;
pub mod variational;

pub use error::{Error, Result};
pub use sht::{HarmonicCoeffs, PointSet};
