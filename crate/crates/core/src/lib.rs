//! Balayage of radial-power measures onto boundaries of planar domains with
//! corners.
//!
//! The crate computes `ν = Bal(μ, ∂Ω)` for measures `dμ = (1 + o(1))|z − z₀|^{2b−2} d²z`
//! along three independent routes that are meant to be checked against each
//! other:
//!
//! * [`sector_exact`]: the exact series for circular sectors, with certified
//!   truncation bounds;
//! * [`harmonic_mc`] and [`balayage`]: walk-on-spheres simulation of Brownian
//!   exit, which gives harmonic measure and hence `ν(E) = ∫ ω(z, E, Ω) dμ(z)`;
//! * [`analysis`]: closed-form envelopes for `ν(∂Ω ∩ B_r(z₀))` and rate fits.
//!
//! [`coulomb`] applies the machinery to hard-wall equilibrium measures of
//! planar Coulomb gases.

pub mod analysis;
pub mod balayage;
pub mod coulomb;
pub mod error;
pub mod geometry;
pub mod harmonic_mc;
pub mod measures;
pub mod parallel;
pub mod quadrature;
pub mod sector_exact;

pub use error::{Error, Result};
pub use geometry::{BoundaryArc, ComplexPoint, CornerDomain, MultiCornerDomain, PlanarDomain, Side};
pub use harmonic_mc::{BoundaryWindow, McConfig, McEstimate};
pub use measures::{Multiplier, RadialPowerMeasure};
pub use sector_exact::{SectorSpec, SeriesEval};
