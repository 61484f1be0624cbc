//! Scattering amplitudes and Wigner phase times for one-dimensional
//! quantum systems: rectangular barriers on a line, N-arm waveguide
//! splitters, and flux-threaded rings with one or two leads.
//!
//! Everything is expressed in dimensionless units with `hbar = 1` and
//! `2m = 1`, so an incident energy `E` carries wavenumber `k = sqrt(E)`,
//! potentials are quoted in units of `E`, lengths in units of `1/k`, and
//! phase times in units of `1/E`. Absorptive media enter as complex
//! potentials `V = v_re - i*v_im` with `v_im >= 0`.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math is
//! routed through `libm`, so results are bit-reproducible across hosts.
//!
//! Modules:
//! - [`numerics`]: dense complex linear solver, branch-fixed square root,
//!   phase unwrapping, centered differentiation.
//! - [`scattering1d`]: reflection/transmission of a single barrier on an
//!   infinite line, complex step potential.
//! - [`splitter`]: N-arm waveguide junction (ideal current-conserving
//!   junction or a tunable-coupling junction matrix), one barrier per arm.
//! - [`ring`]: one-lead and two-lead rings threaded by a magnetic flux,
//!   closed-form single-barrier reflection, saturated-delay formulas.
//! - [`phasetime`]: Wigner delays from amplitude derivatives, saturation
//!   detection, parameter sweeps.
//! - [`verify`]: the self-check suite exercised by the acceptance tests
//!   and the `verify` CLI subcommand.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod numerics;
pub mod phasetime;
pub mod ring;
pub mod scattering1d;
pub mod splitter;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
