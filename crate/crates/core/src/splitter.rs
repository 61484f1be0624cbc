//! Y-junction splitter: one incident lead feeding `N >= 2` outgoing
//! arms, each optionally carrying a rectangular barrier.
//!
//! The lead carries `exp(ikx) + r exp(-ikx)` (junction at `x = 0`).
//! Arm `n` carries, measured outward from the junction,
//! `A_n exp(ikx) + B_n exp(-ikx)` before its barrier,
//! `C_n exp(-kappa x') + D_n exp(kappa (x' - lb))` inside it
//! (`x'` from the barrier's near edge), and `t_n exp(ik x'')` beyond it;
//! a free arm is just `t_n exp(ikx)`. Transmission amplitudes are
//! referenced to each barrier's far edge.
//!
//! Two junction models are supported: Kirchhoff-style matching
//! (continuity of the wavefunction plus current conservation), and a
//! tunable three-port coupler parameterized by a coupling strength
//! `epsilon` that reproduces the Kirchhoff junction at
//! `epsilon = 4/9`.

use crate::error::{Error, Result};
use crate::numerics::{self, solve_dense, ComplexMatrix};
use crate::phasetime;
use crate::scattering1d::{wavevector, BarrierSpec};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// f64 math (sqrt, floor, trig, ...) for the no_std build; test, clippy,
// and rustdoc passes resolve the same calls through std or core
// intrinsics instead, so the lint is silenced rather than cfg'd.
#[allow(unused_imports)]
use num_traits::Float;

/// One outgoing arm: either free or carrying a single barrier whose
/// near edge sits [`BarrierSpec::offset`] away from the junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSpec {
    /// The arm's barrier, or `None` for a free arm.
    pub barrier: Option<BarrierSpec>,
}

impl ArmSpec {
    /// An arm with no barrier.
    pub fn free() -> Self {
        Self { barrier: None }
    }

    /// An arm carrying the given barrier.
    pub fn with_barrier(barrier: BarrierSpec) -> Self {
        Self {
            barrier: Some(barrier),
        }
    }
}

/// How the junction joins the lead to the arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JunctionModel {
    /// Wavefunction continuity across all branches plus conservation of
    /// the probability current (zero net derivative).
    Griffith,
    /// Tunable three-port scattering junction with coupling
    /// `epsilon` in `(0, 1/2]`; only defined for exactly two arms.
    /// `epsilon = 4/9` reproduces [`JunctionModel::Griffith`].
    Buttiker {
        /// Lead-to-arm coupling strength.
        epsilon: f64,
    },
}

/// A lead joined to `N >= 2` arms through a junction model.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterSpec {
    /// Outgoing arms, in order.
    pub arms: Vec<ArmSpec>,
    /// Junction model.
    pub junction: JunctionModel,
}

impl SplitterSpec {
    /// Checks arm count, per-barrier invariants, and coupling bounds.
    pub fn validate(&self) -> Result<()> {
        if self.arms.len() < 2 {
            return Err(Error::InvalidSpec(
                "splitter needs at least two arms".into(),
            ));
        }
        for arm in &self.arms {
            if let Some(barrier) = &arm.barrier {
                barrier.validate()?;
            }
        }
        if let JunctionModel::Buttiker { epsilon } = self.junction {
            check_coupling(epsilon)?;
            if self.arms.len() != 2 {
                return Err(Error::InvalidSpec(format!(
                    "tunable junction is defined for exactly two arms, got {}",
                    self.arms.len()
                )));
            }
        }
        Ok(())
    }
}

/// Interior amplitudes of one barrier arm, in the two-oscillatory /
/// two-evanescent basis described at module level. `d` multiplies
/// `exp(kappa (x' - lb))`, i.e. it is referenced to the barrier's far
/// edge so that stored values stay O(1) for opaque barriers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmInterior {
    /// Outward oscillatory amplitude between junction and barrier.
    pub a: Complex64,
    /// Inward oscillatory amplitude between junction and barrier.
    pub b: Complex64,
    /// Decaying interior amplitude (near-edge referenced).
    pub c: Complex64,
    /// Growing interior amplitude (far-edge referenced).
    pub d: Complex64,
}

/// Full solution of a splitter at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterSolution {
    /// Reflection amplitude back into the lead.
    pub r: Complex64,
    /// Transmission amplitude of each arm, in arm order.
    pub t: Vec<Complex64>,
    /// Interior amplitudes per arm; `None` for free arms.
    pub interior: Vec<Option<ArmInterior>>,
}

fn check_coupling(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 0.5 {
        return Err(Error::CouplingOutOfRange { value: epsilon });
    }
    Ok(())
}

/// The 3x3 scattering matrix of the tunable junction.
///
/// With `s = sqrt(1 - 2 epsilon)`, the matrix is
/// `[[-s, sqrt(eps), sqrt(eps)], [sqrt(eps), (s-1)/2, (s+1)/2],
///   [sqrt(eps), (s+1)/2, (s-1)/2]]`, which is real, symmetric, and
/// unitary for every admissible coupling.
pub fn junction_smatrix(epsilon: f64) -> Result<ComplexMatrix> {
    check_coupling(epsilon)?;
    let s = (1.0 - 2.0 * epsilon).sqrt();
    let a = (s - 1.0) / 2.0;
    let b = (s + 1.0) / 2.0;
    let root_eps = epsilon.sqrt();
    let re = |x: f64| Complex64::new(x, 0.0);
    ComplexMatrix::from_rows(&[
        vec![re(-(a + b)), re(root_eps), re(root_eps)],
        vec![re(root_eps), re(a), re(b)],
        vec![re(root_eps), re(b), re(a)],
    ])
}

/// Column offsets of each arm's unknowns in the assembled system.
enum ArmSlots {
    Barrier {
        a: usize,
        b: usize,
        c: usize,
        d: usize,
        t: usize,
    },
    Free {
        t: usize,
    },
}

fn layout(spec: &SplitterSpec) -> (Vec<ArmSlots>, usize) {
    let mut slots = Vec::with_capacity(spec.arms.len());
    let mut next = 1; // unknown 0 is r
    for arm in &spec.arms {
        if arm.barrier.is_some() {
            slots.push(ArmSlots::Barrier {
                a: next,
                b: next + 1,
                c: next + 2,
                d: next + 3,
                t: next + 4,
            });
            next += 5;
        } else {
            slots.push(ArmSlots::Free { t: next });
            next += 1;
        }
    }
    (slots, next)
}

/// Per-arm matching quantities reused across rows.
struct ArmWaves {
    kappa: Complex64,
    decay: Complex64, // exp(-kappa * length)
    eiw: Complex64,   // exp(+ik * offset)
    emw: Complex64,   // exp(-ik * offset)
}

fn arm_waves(energy: f64, k: f64, barrier: &BarrierSpec) -> Result<ArmWaves> {
    let kappa = barrier.kappa(energy)?;
    numerics::guard_exponent(kappa.re * barrier.length)?;
    Ok(ArmWaves {
        kappa,
        decay: (-kappa * barrier.length).exp(),
        eiw: Complex64::cis(k * barrier.offset),
        emw: Complex64::cis(-k * barrier.offset),
    })
}

/// Builds the dense linear system `M x = rhs` whose solution vector is
/// `[r, then per arm (A, B, C, D, t) or just t]`.
///
/// Exposed so tests can check residuals and conditioning directly.
pub fn assemble_splitter(
    spec: &SplitterSpec,
    energy: f64,
) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    spec.validate()?;
    let k = wavevector(energy)?;
    let ik = Complex64::new(0.0, k);
    let one = Complex64::new(1.0, 0.0);

    let (slots, dim) = layout(spec);
    let waves: Vec<Option<ArmWaves>> = spec
        .arms
        .iter()
        .map(|arm| {
            arm.barrier
                .as_ref()
                .map(|b| arm_waves(energy, k, b))
                .transpose()
        })
        .collect::<Result<_>>()?;

    let mut m = ComplexMatrix::zeros(dim);
    let mut rhs = vec![Complex64::new(0.0, 0.0); dim];
    let mut row = 0;

    match spec.junction {
        JunctionModel::Griffith => {
            // Wavefunction continuity lead -> arm n: 1 + r = psi_n(0).
            for slot in &slots {
                m.set(row, 0, -one);
                match slot {
                    ArmSlots::Barrier { a, b, .. } => {
                        m.set(row, *a, one);
                        m.set(row, *b, one);
                    }
                    ArmSlots::Free { t } => m.set(row, *t, one),
                }
                rhs[row] = one;
                row += 1;
            }
            // Current conservation: sum of outward derivatives equals
            // the lead's incoming current ik (1 - r).
            m.set(row, 0, ik);
            for slot in &slots {
                match slot {
                    ArmSlots::Barrier { a, b, .. } => {
                        m.set(row, *a, ik);
                        m.set(row, *b, -ik);
                    }
                    ArmSlots::Free { t } => m.set(row, *t, ik),
                }
            }
            rhs[row] = ik;
            row += 1;
        }
        JunctionModel::Buttiker { epsilon } => {
            // Outgoing = S * incoming with incoming (1, B_1, B_2) and
            // outgoing (r, psi_1-out, psi_2-out).
            let s = junction_smatrix(epsilon)?;
            for j in 0..3 {
                let out_col = match j {
                    0 => 0,
                    _ => match &slots[j - 1] {
                        ArmSlots::Barrier { a, .. } => *a,
                        ArmSlots::Free { t } => *t,
                    },
                };
                m.set(row, out_col, one);
                for (c, slot) in slots.iter().enumerate() {
                    if let ArmSlots::Barrier { b, .. } = slot {
                        m.set(row, *b, -s.get(j, c + 1));
                    }
                }
                rhs[row] = s.get(j, 0);
                row += 1;
            }
        }
    }

    // Four matching rows per barrier arm.
    for (slot, wave) in slots.iter().zip(&waves) {
        if let (
            ArmSlots::Barrier { a, b, c, d, t },
            Some(ArmWaves {
                kappa,
                decay,
                eiw,
                emw,
            }),
        ) = (slot, wave.as_ref())
        {
            // Continuity at the barrier's near edge.
            m.set(row, *a, *eiw);
            m.set(row, *b, *emw);
            m.set(row, *c, -one);
            m.set(row, *d, -decay);
            row += 1;
            // Derivative at the near edge.
            m.set(row, *a, ik * eiw);
            m.set(row, *b, -ik * emw);
            m.set(row, *c, *kappa);
            m.set(row, *d, -kappa * decay);
            row += 1;
            // Continuity at the far edge.
            m.set(row, *c, *decay);
            m.set(row, *d, one);
            m.set(row, *t, -one);
            row += 1;
            // Derivative at the far edge.
            m.set(row, *c, -kappa * decay);
            m.set(row, *d, *kappa);
            m.set(row, *t, -ik);
            row += 1;
        }
    }
    debug_assert_eq!(row, dim);
    Ok((m, rhs))
}

/// Solves the splitter at one energy.
pub fn solve_splitter(spec: &SplitterSpec, energy: f64) -> Result<SplitterSolution> {
    let (m, rhs) = assemble_splitter(spec, energy)?;
    let x = solve_dense(&m, &rhs)?;
    let (slots, _) = layout(spec);
    let mut t = Vec::with_capacity(slots.len());
    let mut interior = Vec::with_capacity(slots.len());
    for slot in &slots {
        match slot {
            ArmSlots::Barrier {
                a,
                b,
                c,
                d,
                t: t_col,
            } => {
                t.push(x[*t_col]);
                interior.push(Some(ArmInterior {
                    a: x[*a],
                    b: x[*b],
                    c: x[*c],
                    d: x[*d],
                }));
            }
            ArmSlots::Free { t: t_col } => {
                t.push(x[*t_col]);
                interior.push(None);
            }
        }
    }
    Ok(SplitterSolution {
        r: x[0],
        t,
        interior,
    })
}

/// Phase times of every channel: `(tau_r, [tau_1, ..., tau_N])`.
///
/// The reflection time is referenced to the junction; each transmission
/// time to that arm's far barrier edge (or the junction for free arms).
pub fn splitter_phase_times(spec: &SplitterSpec, energy: f64) -> Result<(f64, Vec<f64>)> {
    let n = spec.arms.len();
    let channels: Vec<usize> = (0..=n).collect();
    let mut taus = phasetime::wigner_delays(
        |e| {
            let sol = solve_splitter(spec, e)?;
            let mut amps = Vec::with_capacity(n + 1);
            amps.push(sol.r);
            amps.extend(sol.t);
            Ok(amps)
        },
        energy,
        &channels,
    )?;
    let tau_r = taus.remove(0);
    Ok((tau_r, taus))
}
