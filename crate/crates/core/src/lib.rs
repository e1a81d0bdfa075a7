//! Gap probabilities of the Airy and Pearcey determinantal point processes.
//!
//! The probability that a determinantal point process has no particle in a
//! set `I` equals the Fredholm determinant `det(Id - K χ_I)` of its
//! correlation kernel. This crate evaluates that determinant for the Airy
//! kernel (on unions of intervals, the last one possibly semi-infinite) and
//! for the Pearcey kernel (on bounded unions of intervals), by three
//! independent routes that cross-validate each other:
//!
//! 1. **Real-line Nyström**: Gauss–Legendre discretisation of the kernel
//!    restricted to `I` ([`fredholm::airy_gap_probability`],
//!    [`fredholm::pearcey_gap_probability`]).
//! 2. **Contour operator**: an integrable kernel `f^T(λ) g(μ)/(λ-μ)` living
//!    on complex contours whose determinant equals the real-line one
//!    ([`fredholm::contour_det_airy`], [`fredholm::contour_det_pearcey`]).
//! 3. **Painlevé II**: for the Airy kernel on `[s,∞)`, the Tracy–Widom
//!    representation through the Hastings–McLeod solution ([`painleve`]).
//!
//! On top of the determinants, [`experiments`] drives three verifications:
//! finite-difference residuals of the nonlinear PDEs satisfied by the
//! Pearcey log-determinant, the large-gap factorisation of the Pearcey
//! determinant into two Airy determinants, and the large-`τ` decay of the
//! Pearcey log-determinant.
//!
//! The `gapprob` binary exposes each experiment as a subcommand with CSV or
//! JSON output; see the README for usage.

pub mod config;
pub mod contours;
pub mod error;
pub mod experiments;
pub mod fredholm;
pub mod kernels;
pub mod ode;
pub mod painleve;
pub mod phases;
pub mod quadrature;
pub mod special;
pub mod stencils;

pub use error::{Error, Result};
pub use quadrature::{IntervalUnion, QuadratureRule};
