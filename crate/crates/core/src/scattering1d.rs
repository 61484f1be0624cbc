//! Single rectangular barrier (real or absorptive) on an infinite 1D
//! line, plus the complex step potential: amplitudes and phase times.
//!
//! The incident wave `exp(ikx)` arrives from the left. A barrier of
//! complex potential `V = v_re - i*v_im` occupies `[w, w + lb]` where
//! `w` is [`BarrierSpec::offset`] and `lb` is [`BarrierSpec::length`].
//! The reflected wave is `r * exp(-ikx)` and the transmitted wave is
//! `t * exp(ik(x - w - lb))`, i.e. `t` is referenced to the barrier's
//! far edge, so transmission delays are measured there.

use crate::error::{Error, Result};
use crate::numerics::{self, solve_dense, ComplexMatrix};
use crate::phasetime;
use alloc::vec;
use num_complex::Complex64;
// f64 math (sqrt, floor, trig, ...) for the no_std build; test, clippy,
// and rustdoc passes resolve the same calls through std or core
// intrinsics instead, so the lint is silenced rather than cfg'd.
#[allow(unused_imports)]
use num_traits::Float;

/// Incident energies closer than this to a real barrier height make the
/// evanescent wavenumber degenerate (kappa = 0) and are rejected.
pub const DEGENERACY_WINDOW: f64 = 1e-12;

/// One rectangular barrier: complex strength, length, and the free-space
/// offset between the measurement origin (junction) and the barrier edge.
///
/// Units: strengths in units of the incident energy, lengths in units of
/// the inverse incident wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    /// Real part of the barrier strength.
    pub v_re: f64,
    /// Absorption strength; the potential is `v_re - i*v_im`, so
    /// `v_im >= 0` means absorption only.
    pub v_im: f64,
    /// Barrier length `lb >= 0`.
    pub length: f64,
    /// Free-space distance `w >= 0` from the origin to the barrier start.
    pub offset: f64,
}

impl BarrierSpec {
    /// A purely real barrier with no offset.
    pub fn real(v_re: f64, length: f64) -> Self {
        Self {
            v_re,
            v_im: 0.0,
            length,
            offset: 0.0,
        }
    }

    /// Checks the documented invariants: finite fields, `length >= 0`,
    /// `offset >= 0`, `v_im >= 0`.
    pub fn validate(&self) -> Result<()> {
        let all_finite = self.v_re.is_finite()
            && self.v_im.is_finite()
            && self.length.is_finite()
            && self.offset.is_finite();
        if !all_finite {
            return Err(Error::InvalidSpec("barrier fields must be finite".into()));
        }
        if self.length < 0.0 {
            return Err(Error::InvalidSpec("barrier length must be >= 0".into()));
        }
        if self.offset < 0.0 {
            return Err(Error::InvalidSpec("barrier offset must be >= 0".into()));
        }
        if self.v_im < 0.0 {
            return Err(Error::InvalidSpec(
                "absorption strength v_im must be >= 0".into(),
            ));
        }
        Ok(())
    }

    /// The complex potential `v_re - i*v_im`.
    pub fn potential(&self) -> Complex64 {
        Complex64::new(self.v_re, -self.v_im)
    }

    /// Evanescent wavenumber `kappa = decaying_sqrt(V - E)`.
    ///
    /// Rejects the degenerate case `|E - v_re| < 1e-12` with `v_im = 0`,
    /// where the interior basis collapses.
    pub fn kappa(&self, energy: f64) -> Result<Complex64> {
        if self.v_im == 0.0 && (energy - self.v_re).abs() < DEGENERACY_WINDOW {
            return Err(Error::DegenerateEnergy);
        }
        numerics::decaying_sqrt(self.potential() - Complex64::new(energy, 0.0))
    }
}

/// Which amplitude a phase time differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Transmitted amplitude.
    Transmission,
    /// Reflected amplitude.
    Reflection,
}

/// Checks `energy > 0` (and finite) and returns the wavevector `sqrt(E)`.
pub(crate) fn wavevector(energy: f64) -> Result<f64> {
    if !energy.is_finite() || energy <= 0.0 {
        return Err(Error::InvalidSpec(
            "incident energy must be positive and finite".into(),
        ));
    }
    Ok(energy.sqrt())
}

/// Reflection and transmission amplitudes `(r, t)` of one barrier.
///
/// Solves the four matching conditions at the barrier edges. Interior
/// growth is referenced to the far edge (`D * exp(kappa(x - w - lb))`),
/// so entries stay bounded for arbitrarily opaque barriers. For
/// `v_im = 0`, `|r|^2 + |t|^2 = 1` to 1e-10.
pub fn barrier_amplitudes(energy: f64, barrier: &BarrierSpec) -> Result<(Complex64, Complex64)> {
    barrier.validate()?;
    let k = wavevector(energy)?;
    let kappa = barrier.kappa(energy)?;
    numerics::guard_exponent(kappa.re * barrier.length)?;

    let ik = Complex64::new(0.0, k);
    let x = (-kappa * barrier.length).exp();
    let eiw = Complex64::cis(k * barrier.offset);
    let emw = Complex64::cis(-k * barrier.offset);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    // Unknowns [r, c, d, t]:
    //   region I   exp(ikx) + r exp(-ikx)            x <= w
    //   region II  c exp(-kappa(x-w)) + d exp(kappa(x-w-lb))
    //   region III t exp(ik(x-w-lb))                 x >= w + lb
    let a = ComplexMatrix::from_rows(&[
        // continuity at x = w
        vec![-emw, one, x, zero],
        // derivative at x = w
        vec![ik * emw, -kappa, kappa * x, zero],
        // continuity at x = w + lb
        vec![zero, x, one, -one],
        // derivative at x = w + lb
        vec![zero, -kappa * x, kappa, -ik],
    ])?;
    let b = vec![eiw, ik * eiw, zero, zero];
    let sol = solve_dense(&a, &b)?;
    Ok((sol[0], sol[3]))
}

/// Reflection amplitude of the semi-infinite step `V = v_re - i*v_im`
/// for `x > 0`: `r = (ik + kappa) / (ik - kappa)`.
///
/// `|r| = 1` for a real step above the energy; absorption (`v_im > 0`)
/// gives `|r| < 1`.
pub fn step_reflection(energy: f64, v_re: f64, v_im: f64) -> Result<Complex64> {
    let k = wavevector(energy)?;
    if v_im == 0.0 && (energy - v_re).abs() < DEGENERACY_WINDOW {
        return Err(Error::DegenerateEnergy);
    }
    let kappa = numerics::decaying_sqrt(Complex64::new(v_re - energy, -v_im))?;
    let ik = Complex64::new(0.0, k);
    Ok((ik + kappa) / (ik - kappa))
}

/// Wigner phase time of one barrier amplitude: `d Arg[amplitude] / dE`,
/// in units of the inverse incident energy.
pub fn phase_time_1d(energy: f64, barrier: &BarrierSpec, mode: Mode) -> Result<f64> {
    phasetime::wigner_delay(
        |e| {
            let (r, t) = barrier_amplitudes(e, barrier)?;
            Ok(match mode {
                Mode::Reflection => r,
                Mode::Transmission => t,
            })
        },
        energy,
    )
}
