//! Semiclassical double-well tunneling toolkit for magnetic Schrödinger
//! operators of the form `(hD - w'A(y))^2 + W(y)`.
//!
//! The library is organized around one physical pipeline:
//!
//! * [`model`] — Hamiltonian symbols, the affine rescaling between lab and
//!   well-adapted coordinates, the radial potential family and the effective
//!   potential `W`.
//! * [`critical`] — phase-space critical points (the microlocal wells), the
//!   fundamental matrix and its Floquet exponents, ellipticity checks and
//!   harmonic ground-level asymptotics.
//! * [`instanton`] — minimal geodesics of the degenerate Agmon metric
//!   `(W - E')_+ dy^2` between the two wells, with WKB phase and magnetic
//!   transport corrections along the path.
//! * [`grid`], [`operator`], [`eigen`] — rectangular grids, matrix-free
//!   Hermitian discretizations (gauge links, Dirichlet boxes and half-spaces)
//!   and Lanczos/shift-invert eigensolvers.
//! * [`spectral`] — symmetry-sector spectra, Dirichlet quasi-modes, h-sweeps
//!   of the tunneling splitting, and the weighted energy identity.
//! * [`gap`] — the interaction (flux) integral across the symmetry plane and
//!   its comparison with the directly computed splitting.
//! * [`monodromy`] — 2-D period propagator of the driven Hamiltonian and its
//!   correspondence with the stationary operator spectrum.
//! * [`phasespace`] — Gaussian-window (FBI) phase-space diagnostics.

pub mod config;
pub mod critical;
pub mod eigen;
pub mod gap;
pub mod grid;
pub mod instanton;
pub mod model;
pub mod monodromy;
pub mod operator;
pub mod phasespace;
pub mod spectral;

pub use model::{ModelParams, PhasePoint, RadialPotential, RegionLabel};
