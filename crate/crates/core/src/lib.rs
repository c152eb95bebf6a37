//! Numerical laboratory for minimal hypersurfaces asymptotic to the Lawson
//! cones `C(m, n) = {(x, y) ∈ R^m × R^n : (n-1)|x|² = (m-1)|y|²}`.
//!
//! The crate covers the full pipeline used by the `cjl` binary:
//!
//! * [`cone_spectra`]: link eigenvalues, indicial roots, stability and
//!   predicted decay rates of the dilation Jacobi field;
//! * [`profile`]: O(m)×O(n)-invariant minimal profiles, their curvature and
//!   geometric Jacobi fields;
//! * [`jacobi`]: the Emden–Fowler reduction and a three-interval
//!   variation-of-parameters solve of `J_Σ ψ = f`;
//! * [`plateau`]: the radial exterior Plateau graph, a dilation-degenerate
//!   example;
//! * [`decay`]: power-law and log-corrected decay fits;
//! * [`export`]: CSV/JSON writers shared by the front end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cone_spectra;
pub mod decay;
pub mod error;
pub mod export;
pub mod jacobi;
pub mod ode;
pub mod plateau;
pub mod profile;
pub mod quadrature;

pub use cone_spectra::{ConeSpec, Regime, SpectralData};
pub use decay::{DecayFit, IndicialMatch};
pub use error::{Error, OdeError, Result};
pub use jacobi::{EmdenFowlerData, FundamentalPair, JacobiSolution};
pub use ode::Tolerance;
pub use plateau::RadialGraph;
pub use profile::{GeometryTrace, ProfileCurve, SampleGrid, ShootingConfig, Start};
