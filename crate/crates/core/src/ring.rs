//! Ring interferometer threaded by a magnetic flux, probed through one
//! or two leads.
//!
//! The ring circumference `L = lb_1 + lb_2 + w` is composed of up to
//! two rectangular barriers (lengths `lb_1`, `lb_2`) and one free
//! "well" stretch of length `w`. The enclosed flux, in units of the
//! flux quantum, turns into a total gauge phase `alpha = 2 pi flux`
//! distributed over the segments; observables depend only on the total.
//!
//! One-lead rings attach a single semi-infinite lead, so the only
//! channel is reflection and `|r| = 1` whenever the barriers are real.
//! Two-lead rings attach input and output leads at the two barrier
//! junctions (`w = 0`) and also transmit.
//!
//! Interior amplitudes use far-edge referencing inside barriers
//! (`B exp(kappa (u - lb))`), which keeps the matching matrices
//! uniformly bounded no matter how opaque the barriers are.

use crate::error::{Error, Result};
use crate::numerics::{self, solve_dense, ComplexMatrix};
use crate::phasetime;
use crate::scattering1d::{wavevector, BarrierSpec, Mode};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// f64 math (sqrt, floor, trig, ...) for the no_std build; test, clippy,
// and rustdoc passes resolve the same calls through std or core
// intrinsics instead, so the lint is silenced rather than cfg'd.
#[allow(unused_imports)]
use num_traits::Float;

/// How many leads probe the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leads {
    /// A single lead: reflection only.
    OneLead,
    /// Input and output leads at the two barrier junctions.
    TwoLead,
}

/// How the total gauge phase is apportioned over ring segments.
///
/// Physical observables are gauge independent; the choice only affects
/// intermediate matrix entries. [`FluxGauge::Proportional`] (the
/// default everywhere) spreads the phase in proportion to segment
/// length, [`FluxGauge::FirstSegment`] concentrates it on the first
/// barrier, which is handy for cross-checking gauge invariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxGauge {
    /// Phase per segment proportional to its length.
    Proportional,
    /// All phase on the first barrier segment.
    FirstSegment,
}

/// A flux-threaded ring.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSpec {
    /// First barrier (always present). Its `offset` must be zero: ring
    /// geometry is carried by `well_length`, not by barrier offsets.
    pub barrier1: BarrierSpec,
    /// Optional second barrier (required for two leads).
    pub barrier2: Option<BarrierSpec>,
    /// Free stretch `w >= 0` between the barriers (one lead only).
    pub well_length: f64,
    /// Enclosed flux in units of the flux quantum; only its fractional
    /// part matters.
    pub flux: f64,
    /// Lead configuration.
    pub leads: Leads,
}

impl RingSpec {
    /// Checks the documented shape invariants.
    pub fn validate(&self) -> Result<()> {
        self.barrier1.validate()?;
        if self.barrier1.offset != 0.0 {
            return Err(Error::InvalidSpec(
                "ring barriers take no offset; use well_length".into(),
            ));
        }
        if let Some(b2) = &self.barrier2 {
            b2.validate()?;
            if b2.offset != 0.0 {
                return Err(Error::InvalidSpec(
                    "ring barriers take no offset; use well_length".into(),
                ));
            }
        }
        if !self.well_length.is_finite() || self.well_length < 0.0 {
            return Err(Error::InvalidSpec("well_length must be >= 0".into()));
        }
        if !self.flux.is_finite() {
            return Err(Error::InvalidSpec("flux must be finite".into()));
        }
        match self.leads {
            Leads::OneLead => {
                if self.barrier2.is_none() && self.well_length > 0.0 {
                    return Err(Error::InvalidSpec(
                        "a single-barrier ring closes on itself: well_length must be 0".into(),
                    ));
                }
            }
            Leads::TwoLead => {
                if self.barrier2.is_none() {
                    return Err(Error::InvalidSpec(
                        "a two-lead ring needs both barriers".into(),
                    ));
                }
                if self.well_length != 0.0 {
                    return Err(Error::InvalidSpec(
                        "a two-lead ring has leads at both junctions: well_length must be 0"
                            .into(),
                    ));
                }
            }
        }
        if self.circumference() <= 0.0 {
            return Err(Error::InvalidSpec(
                "ring circumference must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Ring circumference `lb_1 + lb_2 + w`.
    pub fn circumference(&self) -> f64 {
        self.barrier1.length + self.barrier2.map_or(0.0, |b| b.length) + self.well_length
    }
}

/// Full solution of a ring at one energy.
///
/// Interior amplitudes follow the bases documented at module level;
/// fields not present in a given topology (e.g. the well amplitudes of
/// a two-lead ring) are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSolution {
    /// Reflection amplitude back into the (input) lead.
    pub r: Complex64,
    /// Transmission amplitude into the output lead (two leads only).
    pub t: Option<Complex64>,
    /// Decaying amplitude in barrier 1.
    pub a_1: Complex64,
    /// Growing (far-edge referenced) amplitude in barrier 1.
    pub b_1: Complex64,
    /// Forward oscillatory amplitude in the well.
    pub c: Complex64,
    /// Backward oscillatory amplitude in the well.
    pub d: Complex64,
    /// Decaying amplitude in barrier 2.
    pub a_2: Complex64,
    /// Growing (far-edge referenced) amplitude in barrier 2.
    pub b_2: Complex64,
}

/// Reduces flux to its fractional part (exactly, bit for bit) and
/// returns the total gauge phase `2 pi frac(flux)`.
fn gauge_phase(flux: f64) -> f64 {
    let frac = flux - flux.floor();
    2.0 * core::f64::consts::PI * frac
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Assembles the one-lead matching system.
///
/// Single-barrier rings produce a 3x3 system in `[r, A_1, B_1]`;
/// two-barrier rings a 7x7 system in `[r, A_1, B_1, C, D, A_2, B_2]`.
/// Exposed so tests can check residuals directly.
pub fn assemble_ring_one_lead(
    spec: &RingSpec,
    energy: f64,
    gauge: FluxGauge,
) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    spec.validate()?;
    if spec.leads != Leads::OneLead {
        return Err(Error::InvalidSpec(
            "one-lead assembly requires a one-lead spec".into(),
        ));
    }
    let k = wavevector(energy)?;
    let ik = Complex64::new(0.0, k);
    let one = Complex64::new(1.0, 0.0);
    let alpha = gauge_phase(spec.flux);
    let big_l = spec.circumference();

    let kappa1 = spec.barrier1.kappa(energy)?;
    numerics::guard_exponent(kappa1.re * spec.barrier1.length)?;
    let x1 = (-kappa1 * spec.barrier1.length).exp();

    let Some(barrier2) = spec.barrier2 else {
        // Single barrier spanning the whole ring; one gauge segment.
        let g = Complex64::cis(alpha);
        let m = ComplexMatrix::from_rows(&[
            // Wavefunction continuity at the junction, near side.
            vec![-one, one, x1],
            // Continuity after transporting once around the ring.
            vec![-one, g * x1, g],
            // Current conservation at the junction.
            vec![ik, -kappa1 + g * kappa1 * x1, kappa1 * x1 - g * kappa1],
        ])?;
        let rhs = vec![one, one, ik];
        return Ok((m, rhs));
    };

    let kappa2 = barrier2.kappa(energy)?;
    numerics::guard_exponent(kappa2.re * barrier2.length)?;
    let x3 = (-kappa2 * barrier2.length).exp();
    let w = spec.well_length;

    let (a1, a2, a3) = match gauge {
        FluxGauge::Proportional => (
            alpha * spec.barrier1.length / big_l,
            alpha * w / big_l,
            alpha * barrier2.length / big_l,
        ),
        FluxGauge::FirstSegment => (alpha, 0.0, 0.0),
    };
    let g1 = Complex64::cis(a1);
    let g2 = Complex64::cis(a2);
    let g3 = Complex64::cis(a3);
    let p = Complex64::cis(k * w);
    let pb = Complex64::cis(-k * w);
    let z = zero();

    // Unknowns [r, A_1, B_1, C, D, A_2, B_2].
    let m = ComplexMatrix::from_rows(&[
        // Junction continuity into barrier 1.
        vec![-one, one, x1, z, z, z, z],
        // Junction continuity out of barrier 2 (full loop transported).
        vec![-one, z, z, z, z, g3 * x3, g3],
        // Junction current conservation.
        vec![
            ik,
            -kappa1,
            kappa1 * x1,
            z,
            z,
            g3 * kappa2 * x3,
            -g3 * kappa2,
        ],
        // Barrier 1 -> well continuity.
        vec![z, g1 * x1, g1, -one, -one, z, z],
        // Barrier 1 -> well derivative.
        vec![z, -g1 * kappa1 * x1, g1 * kappa1, -ik, ik, z, z],
        // Well -> barrier 2 continuity.
        vec![z, z, z, g2 * p, g2 * pb, -one, -x3],
        // Well -> barrier 2 derivative.
        vec![z, z, z, g2 * ik * p, -g2 * ik * pb, kappa2, -kappa2 * x3],
    ])?;
    let rhs = vec![one, one, ik, z, z, z, z];
    Ok((m, rhs))
}

/// Solves a one-lead ring in the default (length-proportional) gauge.
pub fn solve_ring_one_lead(spec: &RingSpec, energy: f64) -> Result<RingSolution> {
    solve_ring_one_lead_gauged(spec, energy, FluxGauge::Proportional)
}

/// Solves a one-lead ring in an explicit gauge. Observables are gauge
/// independent; interior amplitudes are not.
pub fn solve_ring_one_lead_gauged(
    spec: &RingSpec,
    energy: f64,
    gauge: FluxGauge,
) -> Result<RingSolution> {
    let (m, rhs) = assemble_ring_one_lead(spec, energy, gauge)?;
    let x = solve_dense(&m, &rhs)?;
    Ok(if spec.barrier2.is_some() {
        RingSolution {
            r: x[0],
            t: None,
            a_1: x[1],
            b_1: x[2],
            c: x[3],
            d: x[4],
            a_2: x[5],
            b_2: x[6],
        }
    } else {
        RingSolution {
            r: x[0],
            t: None,
            a_1: x[1],
            b_1: x[2],
            c: zero(),
            d: zero(),
            a_2: zero(),
            b_2: zero(),
        }
    })
}

/// Assembles the two-lead matching system in
/// `[r, A_1, B_1, A_2, B_2, t]`. Exposed for residual tests.
pub fn assemble_ring_two_lead(
    spec: &RingSpec,
    energy: f64,
    flux: f64,
) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    spec.validate()?;
    if spec.leads != Leads::TwoLead {
        return Err(Error::InvalidSpec(
            "two-lead assembly requires a two-lead spec".into(),
        ));
    }
    if !flux.is_finite() {
        return Err(Error::InvalidSpec("flux must be finite".into()));
    }
    let k = wavevector(energy)?;
    let ik = Complex64::new(0.0, k);
    let one = Complex64::new(1.0, 0.0);
    let barrier2 = spec.barrier2.expect("validated above");

    let alpha = gauge_phase(flux);
    let big_l = spec.circumference();
    // The two arms are traversed in opposite senses around the flux.
    let gu = Complex64::cis(alpha * spec.barrier1.length / big_l);
    let gd = Complex64::cis(-alpha * barrier2.length / big_l);

    let kappa1 = spec.barrier1.kappa(energy)?;
    numerics::guard_exponent(kappa1.re * spec.barrier1.length)?;
    let x1 = (-kappa1 * spec.barrier1.length).exp();
    let kappa2 = barrier2.kappa(energy)?;
    numerics::guard_exponent(kappa2.re * barrier2.length)?;
    let x2 = (-kappa2 * barrier2.length).exp();
    let z = zero();

    let m = ComplexMatrix::from_rows(&[
        // Input junction continuity into each arm.
        vec![-one, one, x1, z, z, z],
        vec![-one, z, z, one, x2, z],
        // Input junction current conservation.
        vec![ik, -kappa1, kappa1 * x1, -kappa2, kappa2 * x2, z],
        // Output junction continuity from each arm.
        vec![z, gu * x1, gu, z, z, -one],
        vec![z, z, z, gd * x2, gd, -one],
        // Output junction current conservation.
        vec![
            z,
            -gu * kappa1 * x1,
            gu * kappa1,
            -gd * kappa2 * x2,
            gd * kappa2,
            -ik,
        ],
    ])?;
    let rhs = vec![one, one, ik, z, z, z];
    Ok((m, rhs))
}

/// Solves a two-lead ring at the given flux (the explicit `flux`
/// argument lets flux sweeps reuse one spec; it overrides `spec.flux`).
pub fn solve_ring_two_lead(spec: &RingSpec, energy: f64, flux: f64) -> Result<RingSolution> {
    let (m, rhs) = assemble_ring_two_lead(spec, energy, flux)?;
    let x = solve_dense(&m, &rhs)?;
    Ok(RingSolution {
        r: x[0],
        t: Some(x[5]),
        a_1: x[1],
        b_1: x[2],
        c: zero(),
        d: zero(),
        a_2: x[3],
        b_2: x[4],
    })
}

/// Closed-form reflection amplitude of a one-lead ring whose barrier
/// fills the whole circumference: real decay constant `kappa`, ring
/// length `circumference`, gauge phase `alpha`.
///
/// With `G = 2 kappa (cos(alpha) - cosh(kappa L))` and
/// `S = k sinh(kappa L)`, the amplitude is `r = (-G + iS) / (G + iS)`,
/// manifestly of unit modulus.
pub fn ring_reflection_closed_form(
    k: f64,
    kappa: f64,
    circumference: f64,
    alpha: f64,
) -> Result<Complex64> {
    if !(k.is_finite() && kappa.is_finite() && circumference.is_finite() && alpha.is_finite()) {
        return Err(Error::InvalidSpec(
            "closed form needs finite arguments".into(),
        ));
    }
    if k <= 0.0 || kappa <= 0.0 || circumference <= 0.0 {
        return Err(Error::InvalidSpec(
            "closed form needs k > 0, kappa > 0, circumference > 0".into(),
        ));
    }
    numerics::guard_exponent(kappa * circumference)?;
    let g = 2.0 * kappa * (alpha.cos() - (kappa * circumference).cosh());
    let s = k * (kappa * circumference).sinh();
    Ok(Complex64::new(-g, s) / Complex64::new(g, s))
}

/// Saturated (opaque-barrier) reflection phase time of a one-lead ring,
/// `(1/(k kappa) + k/kappa^3) / (2 + k^2/(2 kappa^2))`, in units of the
/// inverse incident energy. Callers must pass `k > 0`, `kappa > 0`.
pub fn tau_rs_saturated(k: f64, kappa: f64) -> f64 {
    debug_assert!(k > 0.0 && kappa > 0.0);
    (1.0 / (k * kappa) + k / kappa.powi(3)) / (2.0 + k * k / (2.0 * kappa * kappa))
}

/// Saturated (opaque-barrier) transmission phase time of a two-lead
/// ring. Algebraically equal to [`tau_rs_saturated`]; kept in its own
/// form as an independent cross-check. Callers must pass `k > 0`,
/// `kappa > 0`.
pub fn tau_ts_saturated(k: f64, kappa: f64) -> f64 {
    debug_assert!(k > 0.0 && kappa > 0.0);
    let k2 = k * k;
    let num = 4.0 * kappa.powi(3) + 5.0 * k2 * kappa + k2 * k2 / kappa;
    let den_inner = 2.0 * kappa * kappa - k2 / 2.0;
    num / (2.0 * k * (den_inner * den_inner + 4.0 * k2 * kappa * kappa))
}

/// Wigner phase time of a ring channel. One-lead rings only reflect;
/// asking for their transmission time is an invalid request.
pub fn ring_phase_time(spec: &RingSpec, energy: f64, mode: Mode) -> Result<f64> {
    spec.validate()?;
    match (spec.leads, mode) {
        (Leads::OneLead, Mode::Transmission) => Err(Error::InvalidSpec(
            "a one-lead ring has no transmission channel".into(),
        )),
        (Leads::OneLead, Mode::Reflection) => phasetime::wigner_delay(
            |e| solve_ring_one_lead(spec, e).map(|sol| sol.r),
            energy,
        ),
        (Leads::TwoLead, mode) => phasetime::wigner_delay(
            |e| {
                let sol = solve_ring_two_lead(spec, e, spec.flux)?;
                Ok(match mode {
                    Mode::Reflection => sol.r,
                    Mode::Transmission => sol.t.expect("two-lead rings transmit"),
                })
            },
            energy,
        ),
    }
}
