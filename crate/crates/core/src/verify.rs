//! Built-in verification suite: twelve numbered end-to-end criteria
//! covering golden values, algebraic identities, unitarity, flux
//! behavior, and the qualitative phase-time effects the engine exists
//! to reproduce. Each criterion reports one or more labelled checks
//! with a measured value and an explicit expectation, so a report can
//! print measured/target/tolerance side by side.

use crate::error::{Error, Result};
use crate::phasetime::{
    detect_saturation, wigner_delay, wigner_delay_with_step, PhaseTimeSeries, SATURATION_TOL,
    SATURATION_WINDOW,
};
use crate::ring::{
    ring_phase_time, ring_reflection_closed_form, solve_ring_one_lead, solve_ring_two_lead,
    tau_rs_saturated, tau_ts_saturated, Leads, RingSpec,
};
use crate::scattering1d::{phase_time_1d, step_reflection, BarrierSpec, Mode};
use crate::splitter::{solve_splitter, splitter_phase_times, ArmSpec, JunctionModel, SplitterSpec};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// What a measured value is expected to satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    /// `|measured - target| <= tol`.
    Within { target: f64, tol: f64 },
    /// `measured <= bound` (inclusive: bounds are tolerances).
    Below { bound: f64 },
    /// `measured > bound` (strict: used for strict orderings).
    Above { bound: f64 },
}

/// One labelled measurement with its expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// Human-readable description of what was measured.
    pub label: String,
    /// The measured value (NaN always fails).
    pub measured: f64,
    /// What it must satisfy.
    pub expectation: Expectation,
}

impl Check {
    /// Whether the measurement satisfies its expectation.
    pub fn passed(&self) -> bool {
        match self.expectation {
            Expectation::Within { target, tol } => (self.measured - target).abs() <= tol,
            Expectation::Below { bound } => self.measured <= bound,
            Expectation::Above { bound } => self.measured > bound,
        }
    }
}

/// Outcome of one numbered criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    /// Criterion number (1-based, stable).
    pub number: usize,
    /// Short name.
    pub name: &'static str,
    /// The checks that make it up.
    pub checks: Vec<Check>,
}

impl CriterionResult {
    /// A criterion passes when every check passes (and none aborted).
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }
}

/// True when every criterion passed.
pub fn all_passed(results: &[CriterionResult]) -> bool {
    !results.is_empty() && results.iter().all(CriterionResult::passed)
}

/// Runs the full suite in order. Deterministic: repeated runs produce
/// identical reports.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion(1, "golden ring plateau", criterion_1),
        criterion(2, "negative saturated splitter delay", criterion_2),
        criterion(3, "saturated-time identity", criterion_3),
        criterion(4, "junction model equivalence", || {
            junction_equivalence_checks(4.0 / 9.0)
        }),
        criterion(5, "unitarity sweep", criterion_5),
        criterion(6, "ring closed-form consistency", criterion_6),
        criterion(7, "flux periodicity and visibility decay", criterion_7),
        criterion(8, "well-length independence", criterion_8),
        criterion(9, "resonance ordering in energy", criterion_9),
        criterion(10, "absorption splits the channels", criterion_10),
        criterion(11, "remote barrier tuning", criterion_11),
        criterion(12, "delays grow with junction coupling", criterion_12),
    ]
}

/// The junction-equivalence criterion with an explicit coupling, as a
/// negative-control hook: the suite runs it at 4/9 (where it must
/// pass); any other coupling must make it fail.
pub fn junction_equivalence(epsilon: f64) -> CriterionResult {
    criterion(4, "junction model equivalence", || {
        junction_equivalence_checks(epsilon)
    })
}

fn criterion(
    number: usize,
    name: &'static str,
    body: impl FnOnce() -> Result<Vec<Check>>,
) -> CriterionResult {
    let checks = body().unwrap_or_else(|e| {
        vec![Check {
            label: format!("criterion aborted: {e}"),
            measured: f64::NAN,
            expectation: Expectation::Below { bound: 0.0 },
        }]
    });
    CriterionResult {
        number,
        name,
        checks,
    }
}

// --- shared builders ---------------------------------------------------

fn one_lead_single(v_re: f64, v_im: f64, length: f64, flux: f64) -> RingSpec {
    RingSpec {
        barrier1: BarrierSpec {
            v_re,
            v_im,
            length,
            offset: 0.0,
        },
        barrier2: None,
        well_length: 0.0,
        flux,
        leads: Leads::OneLead,
    }
}

fn one_lead_double(v: f64, lb1: f64, lb2: f64, well: f64, flux: f64) -> RingSpec {
    RingSpec {
        barrier1: BarrierSpec {
            v_re: v,
            v_im: 0.0,
            length: lb1,
            offset: 0.0,
        },
        barrier2: Some(BarrierSpec {
            v_re: v,
            v_im: 0.0,
            length: lb2,
            offset: 0.0,
        }),
        well_length: well,
        flux,
        leads: Leads::OneLead,
    }
}

fn barrier_arm(v_re: f64, length: f64, offset: f64) -> ArmSpec {
    ArmSpec::with_barrier(BarrierSpec {
        v_re,
        v_im: 0.0,
        length,
        offset,
    })
}

/// Builds a series over integer lengths and returns its detected
/// saturated value, failing if no plateau appears.
fn saturated_over_lengths(
    lengths: impl Iterator<Item = f64>,
    mut tau_at: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let samples: Result<Vec<(f64, f64)>> = lengths.map(|l| Ok((l, tau_at(l)?))).collect();
    let series = PhaseTimeSeries::new("length", samples?)?;
    detect_saturation(&series, SATURATION_TOL, SATURATION_WINDOW)
        .saturated_value
        .ok_or_else(|| Error::InvalidSpec("expected a phase-time plateau".into()))
}

/// Reflection phase time with a fine-step retry, for scans that cross
/// sharp resonances.
fn resilient_ring_tau(spec: &RingSpec, energy: f64) -> Result<f64> {
    match ring_phase_time(spec, energy, Mode::Reflection) {
        Err(Error::NonConvergentDerivative) => wigner_delay_with_step(
            |e| solve_ring_one_lead(spec, e).map(|sol| sol.r),
            energy,
            1e-9 * energy,
        ),
        other => other,
    }
}

/// The criterion-1 plateau, shared with the flux-average cross-check.
fn golden_plateau() -> Result<f64> {
    saturated_over_lengths((1..=20).map(|i| i as f64), |lb| {
        ring_phase_time(&one_lead_single(5.0, 0.0, lb, 0.0), 1.0, Mode::Reflection)
    })
}

// --- criteria ----------------------------------------------------------

fn criterion_1() -> Result<Vec<Check>> {
    let plateau = golden_plateau()?;
    Ok(vec![
        Check {
            label: "saturated tau_r of the one-lead ring (V=5, E=1, flux 0)".into(),
            measured: plateau,
            expectation: Expectation::Within {
                target: 0.2941,
                tol: 1e-3,
            },
        },
        Check {
            label: "tau_rs_saturated(1, 2) against its formula".into(),
            measured: tau_rs_saturated(1.0, 2.0),
            expectation: Expectation::Within {
                target: 0.294118,
                tol: 1e-6,
            },
        },
    ])
}

fn criterion_2() -> Result<Vec<Check>> {
    let sat = saturated_over_lengths((1..=20).map(|i| i as f64), |lb1| {
        let spec = SplitterSpec {
            arms: vec![barrier_arm(15.0, lb1, 2.5), barrier_arm(5.0, 0.5, 2.5)],
            junction: JunctionModel::Griffith,
        };
        Ok(splitter_phase_times(&spec, 1.0)?.1[0])
    })?;
    Ok(vec![Check {
        label: "saturated tau_1 (V1=15, V2=5, lb2=0.5, w=2.5, E=1)".into(),
        measured: sat,
        expectation: Expectation::Within {
            target: -4.514,
            tol: 0.01,
        },
    }])
}

fn criterion_3() -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for i in 0..50 {
        let k = 0.1 + (3.0 - 0.1) * i as f64 / 49.0;
        for j in 0..50 {
            let kappa = 0.1 + (5.0 - 0.1) * j as f64 / 49.0;
            worst = worst.max((tau_rs_saturated(k, kappa) - tau_ts_saturated(k, kappa)).abs());
        }
    }
    Ok(vec![Check {
        label: "worst |tau_rs_saturated - tau_ts_saturated| on a 50x50 (k, kappa) grid".into(),
        measured: worst,
        expectation: Expectation::Below { bound: 1e-12 },
    }])
}

fn junction_equivalence_checks(epsilon: f64) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for v1 in [2.2, 3.0, 5.0, 8.0, 12.0] {
        for lb1 in [0.5, 1.0, 2.0, 4.0] {
            for energy in [0.6, 1.0, 1.3, 1.7, 2.1] {
                let arms = vec![barrier_arm(v1, lb1, 3.0), ArmSpec::free()];
                let kirchhoff = solve_splitter(
                    &SplitterSpec {
                        arms: arms.clone(),
                        junction: JunctionModel::Griffith,
                    },
                    energy,
                )?;
                let tunable = solve_splitter(
                    &SplitterSpec {
                        arms,
                        junction: JunctionModel::Buttiker { epsilon },
                    },
                    energy,
                )?;
                worst = worst
                    .max((kirchhoff.r - tunable.r).norm())
                    .max((kirchhoff.t[0] - tunable.t[0]).norm())
                    .max((kirchhoff.t[1] - tunable.t[1]).norm());
            }
        }
    }
    Ok(vec![Check {
        label: format!(
            "worst junction-model disagreement in r, t_1, t_2 at coupling {epsilon:.6} \
             over 100 configurations"
        ),
        measured: worst,
        expectation: Expectation::Below { bound: 1e-9 },
    }])
}

/// Deterministic 64-bit generator (SplitMix64) so the random-config
/// suite is reproducible bit for bit.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let unit = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * unit
    }

    fn chance(&mut self, p: f64) -> bool {
        self.uniform(0.0, 1.0) < p
    }

    /// A barrier height kept clear of the degenerate window around the
    /// incident energy.
    fn height_clear_of(&mut self, energy: f64) -> f64 {
        loop {
            let v = self.uniform(0.5, 8.0);
            if (v - energy).abs() >= 0.05 {
                return v;
            }
        }
    }
}

fn criterion_5() -> Result<Vec<Check>> {
    let mut rng = SplitMix64(0x5EED_0FC0_FFEE);

    let mut worst_splitter = 0.0f64;
    for _ in 0..400 {
        let energy = rng.uniform(0.3, 3.0);
        let tunable = rng.chance(0.5);
        let n_arms = if tunable {
            2
        } else {
            2 + (rng.next_u64() % 3) as usize
        };
        let arms: Vec<ArmSpec> = (0..n_arms)
            .map(|_| {
                if rng.chance(0.5) {
                    ArmSpec::with_barrier(BarrierSpec {
                        v_re: rng.height_clear_of(energy),
                        v_im: 0.0,
                        length: rng.uniform(0.0, 3.0),
                        offset: rng.uniform(0.0, 4.0),
                    })
                } else {
                    ArmSpec::free()
                }
            })
            .collect();
        let junction = if tunable {
            JunctionModel::Buttiker {
                epsilon: rng.uniform(0.01, 0.5),
            }
        } else {
            JunctionModel::Griffith
        };
        let sol = solve_splitter(&SplitterSpec { arms, junction }, energy)?;
        let flux = sol.r.norm_sqr() + sol.t.iter().map(|t| t.norm_sqr()).sum::<f64>();
        worst_splitter = worst_splitter.max((flux - 1.0).abs());
    }

    let mut worst_two_lead = 0.0f64;
    for _ in 0..300 {
        let energy = rng.uniform(0.3, 3.0);
        let spec = RingSpec {
            barrier1: BarrierSpec {
                v_re: rng.height_clear_of(energy),
                v_im: 0.0,
                length: rng.uniform(0.1, 3.0),
                offset: 0.0,
            },
            barrier2: Some(BarrierSpec {
                v_re: rng.height_clear_of(energy),
                v_im: 0.0,
                length: rng.uniform(0.1, 3.0),
                offset: 0.0,
            }),
            well_length: 0.0,
            flux: rng.uniform(0.0, 1.0),
            leads: Leads::TwoLead,
        };
        let sol = solve_ring_two_lead(&spec, energy, spec.flux)?;
        let flux = sol.r.norm_sqr() + sol.t.expect("two-lead rings transmit").norm_sqr();
        worst_two_lead = worst_two_lead.max((flux - 1.0).abs());
    }

    let mut worst_one_lead = 0.0f64;
    for _ in 0..300 {
        let energy = rng.uniform(0.3, 3.0);
        let spec = if rng.chance(0.5) {
            RingSpec {
                barrier1: BarrierSpec {
                    v_re: rng.height_clear_of(energy),
                    v_im: 0.0,
                    length: rng.uniform(0.5, 6.0),
                    offset: 0.0,
                },
                barrier2: None,
                well_length: 0.0,
                flux: rng.uniform(0.0, 1.0),
                leads: Leads::OneLead,
            }
        } else {
            RingSpec {
                barrier1: BarrierSpec {
                    v_re: rng.height_clear_of(energy),
                    v_im: 0.0,
                    length: rng.uniform(0.1, 3.0),
                    offset: 0.0,
                },
                barrier2: Some(BarrierSpec {
                    v_re: rng.height_clear_of(energy),
                    v_im: 0.0,
                    length: rng.uniform(0.1, 3.0),
                    offset: 0.0,
                }),
                well_length: rng.uniform(0.0, 4.0),
                flux: rng.uniform(0.0, 1.0),
                leads: Leads::OneLead,
            }
        };
        let sol = solve_ring_one_lead(&spec, energy)?;
        worst_one_lead = worst_one_lead.max((sol.r.norm() - 1.0).abs());
    }

    Ok(vec![
        Check {
            label: "worst | |r|^2 + sum |t_n|^2 - 1 | over 400 random splitters".into(),
            measured: worst_splitter,
            expectation: Expectation::Below { bound: 1e-10 },
        },
        Check {
            label: "worst | |r|^2 + |t|^2 - 1 | over 300 random two-lead rings".into(),
            measured: worst_two_lead,
            expectation: Expectation::Below { bound: 1e-10 },
        },
        Check {
            label: "worst | |r| - 1 | over 300 random one-lead rings".into(),
            measured: worst_one_lead,
            expectation: Expectation::Below { bound: 1e-10 },
        },
    ])
}

fn criterion_6() -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for i in 0..=28 {
        let length = 1.0 + 0.5 * i as f64;
        for j in 0..16 {
            let alpha = 2.0 * core::f64::consts::PI * j as f64 / 16.0;
            let flux = j as f64 / 16.0;
            let numeric = solve_ring_one_lead(&one_lead_single(2.0, 0.0, length, flux), 1.0)?.r;
            let reference = ring_reflection_closed_form(1.0, 1.0, length, alpha)?;
            worst = worst.max((numeric - reference).norm());
        }
    }
    Ok(vec![Check {
        label: "worst |solver - closed form| over L in [1, 15], alpha in [0, 2pi)".into(),
        measured: worst,
        expectation: Expectation::Below { bound: 1e-10 },
    }])
}

fn criterion_7() -> Result<Vec<Check>> {
    // 32 dyadic flux points cover one period exactly.
    let fluxes: Vec<f64> = (0..32).map(|j| j as f64 / 32.0).collect();
    let tau_at = |length: f64, flux: f64| {
        ring_phase_time(&one_lead_single(5.0, 0.0, length, flux), 1.0, Mode::Reflection)
    };

    let mut worst_period = 0.0f64;
    for &flux in &fluxes {
        let base = tau_at(6.0, flux)?;
        let shifted = tau_at(6.0, flux + 1.0)?;
        worst_period = worst_period.max((base - shifted).abs());
    }

    let mut p2p = Vec::new();
    let mut avg_l6 = 0.0;
    for &length in &[6.0, 7.0, 9.0] {
        let taus: Result<Vec<f64>> = fluxes.iter().map(|&f| tau_at(length, f)).collect();
        let taus = taus?;
        let hi = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = taus.iter().copied().fold(f64::INFINITY, f64::min);
        p2p.push(hi - lo);
        if length == 6.0 {
            avg_l6 = taus.iter().sum::<f64>() / taus.len() as f64;
        }
    }
    let plateau = golden_plateau()?;

    Ok(vec![
        Check {
            label: "worst |tau_r(flux) - tau_r(flux + 1)| on a dyadic flux grid".into(),
            measured: worst_period,
            expectation: Expectation::Below { bound: 1e-12 },
        },
        Check {
            label: "oscillation amplitude drop from L=6 to L=7".into(),
            measured: p2p[0] - p2p[1],
            expectation: Expectation::Above { bound: 0.0 },
        },
        Check {
            label: "oscillation amplitude drop from L=7 to L=9".into(),
            measured: p2p[1] - p2p[2],
            expectation: Expectation::Above { bound: 0.0 },
        },
        Check {
            label: "flux-averaged tau_r at L=6 against the saturated plateau".into(),
            measured: avg_l6,
            expectation: Expectation::Within {
                target: plateau,
                tol: 1e-3,
            },
        },
    ])
}

fn criterion_8() -> Result<Vec<Check>> {
    let mut sats = Vec::new();
    for &well in &[0.0, 5.0, 10.0] {
        let sat = saturated_over_lengths((1..=25).map(|i| i as f64), |lb1| {
            ring_phase_time(
                &one_lead_double(2.0, lb1, 5.0, well, 0.0),
                1.0,
                Mode::Reflection,
            )
        })?;
        sats.push(sat);
    }
    let mut spread = 0.0f64;
    for a in &sats {
        for b in &sats {
            spread = spread.max((a - b).abs());
        }
    }
    Ok(vec![Check {
        label: "spread of saturated tau_r across well lengths {0, 5, 10}".into(),
        measured: spread,
        expectation: Expectation::Below { bound: 1e-3 },
    }])
}

/// Locates the first interior resonance of `tau_r(w)` for criterion 9:
/// a coarse scan finds the first local maximum standing clear of the
/// background, then a recursive bracket zoom pins the narrow peak
/// (plain parabolic refinement under-resolves these Lorentzians by
/// orders of magnitude).
fn first_resonance(energy: f64) -> Result<(f64, f64)> {
    let tau_at = |w: f64| {
        let spec = one_lead_double(2.0, 5.0, 5.0, w, 0.0);
        resilient_ring_tau(&spec, energy)
    };
    let grid: Vec<f64> = (2..=600).map(|i| i as f64 * 0.01).collect();
    let taus: Result<Vec<f64>> = grid.iter().map(|&w| tau_at(w)).collect();
    let taus = taus?;
    let mut sorted = taus.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let threshold = 3.0 * (1.0 + median);
    let peak_idx = (1..taus.len() - 1)
        .find(|&i| taus[i] > taus[i - 1] && taus[i] > taus[i + 1] && taus[i] > threshold)
        .ok_or_else(|| Error::InvalidSpec("no resonance found in the scan window".into()))?;

    let mut lo = grid[peak_idx - 1];
    let mut hi = grid[peak_idx + 1];
    let mut best = (grid[peak_idx], taus[peak_idx]);
    for _ in 0..9 {
        let n = 21;
        let mut level: Vec<(f64, f64)> = Vec::with_capacity(n);
        for i in 0..n {
            let w = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            level.push((w, tau_at(w)?));
        }
        let (idx, &(w_best, tau_best)) = level
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("level is non-empty");
        best = (w_best, tau_best);
        lo = level[idx.saturating_sub(1)].0;
        hi = level[(idx + 1).min(n - 1)].0;
    }
    Ok(best)
}

fn criterion_9() -> Result<Vec<Check>> {
    let energies = [1.01, 1.2, 1.4, 1.6];
    let mut peaks = Vec::new();
    for &energy in &energies {
        peaks.push(first_resonance(energy)?);
    }
    let mut checks = Vec::new();
    for pair in peaks.windows(2) {
        let ((w_lo, h_lo), (w_hi, h_hi)) = (pair[0], pair[1]);
        checks.push(Check {
            label: format!("resonance position shifts down ({w_lo:.4} -> {w_hi:.4})"),
            measured: w_lo - w_hi,
            expectation: Expectation::Above { bound: 0.0 },
        });
        checks.push(Check {
            label: format!("resonance height falls ({h_lo:.1} -> {h_hi:.1})"),
            measured: h_lo - h_hi,
            expectation: Expectation::Above { bound: 0.0 },
        });
    }
    Ok(checks)
}

fn criterion_10() -> Result<Vec<Check>> {
    let barrier_at = |length: f64| BarrierSpec {
        v_re: 2.0,
        v_im: 10.0,
        length,
        offset: 0.0,
    };
    let lengths: Vec<f64> = (5..=50).map(|i| i as f64).collect();
    let trans: Result<Vec<(f64, f64)>> = lengths
        .iter()
        .map(|&l| Ok((l, phase_time_1d(1.0, &barrier_at(l), Mode::Transmission)?)))
        .collect();
    let trans = trans?;
    let min_rise = trans
        .windows(2)
        .map(|p| p[1].1 - p[0].1)
        .fold(f64::INFINITY, f64::min);
    let trans_series = PhaseTimeSeries::new("length", trans)?;
    let trans_plateau = detect_saturation(&trans_series, SATURATION_TOL, SATURATION_WINDOW)
        .saturated_value
        .is_some();

    let refl_sat = saturated_over_lengths(lengths.iter().copied(), |l| {
        phase_time_1d(1.0, &barrier_at(l), Mode::Reflection)
    })?;
    let step_tau = wigner_delay(|e| step_reflection(e, 2.0, 10.0), 1.0)?;

    Ok(vec![
        Check {
            label: "smallest increase of the absorbing transmission time per unit length".into(),
            measured: min_rise,
            expectation: Expectation::Above { bound: 0.0 },
        },
        Check {
            label: "absorbing transmission time plateau detected (1 = yes)".into(),
            measured: if trans_plateau { 1.0 } else { 0.0 },
            expectation: Expectation::Below { bound: 0.5 },
        },
        Check {
            label: "saturated absorbing reflection time against the step value".into(),
            measured: refl_sat,
            expectation: Expectation::Within {
                target: step_tau,
                tol: 1e-6,
            },
        },
    ])
}

fn criterion_11() -> Result<Vec<Check>> {
    let heights = [2.5, 5.0, 7.5, 10.0, 12.5];
    let mut taus = Vec::new();
    for &v2 in &heights {
        let spec = SplitterSpec {
            arms: vec![barrier_arm(5.0, 8.0, 3.0), barrier_arm(v2, 1.0, 3.0)],
            junction: JunctionModel::Griffith,
        };
        taus.push(splitter_phase_times(&spec, 1.0)?.1[0]);
    }
    let hi = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin = taus
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| heights[i])
        .expect("grid is non-empty");
    Ok(vec![
        Check {
            label: "tau_1s range while tuning the other arm's barrier height".into(),
            measured: hi - lo,
            expectation: Expectation::Above {
                bound: 10.0 * SATURATION_TOL,
            },
        },
        Check {
            label: "barrier height of the other arm at the tau_1s minimum".into(),
            measured: argmin,
            expectation: Expectation::Within {
                target: 5.0,
                tol: 1e-9,
            },
        },
    ])
}

fn criterion_12() -> Result<Vec<Check>> {
    let couplings = [1.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0];
    let mut saturated = Vec::new();
    for &epsilon in &couplings {
        let spec_at = |lb1: f64| SplitterSpec {
            arms: vec![barrier_arm(3.0, lb1, 3.0), ArmSpec::free()],
            junction: JunctionModel::Buttiker { epsilon },
        };
        let sat1 = saturated_over_lengths((1..=20).map(|i| i as f64), |lb1| {
            Ok(splitter_phase_times(&spec_at(lb1), 1.0)?.1[0])
        })?;
        let sat2 = saturated_over_lengths((1..=20).map(|i| i as f64), |lb1| {
            Ok(splitter_phase_times(&spec_at(lb1), 1.0)?.1[1])
        })?;
        saturated.push((epsilon, sat1, sat2));
    }
    let mut checks = Vec::new();
    for pair in saturated.windows(2) {
        let ((e_lo, t1_lo, t2_lo), (e_hi, t1_hi, t2_hi)) = (pair[0], pair[1]);
        checks.push(Check {
            label: format!("tau_1s rises from coupling {e_lo:.4} to {e_hi:.4}"),
            measured: t1_hi - t1_lo,
            expectation: Expectation::Above { bound: 0.0 },
        });
        checks.push(Check {
            label: format!("tau_2s rises from coupling {e_lo:.4} to {e_hi:.4}"),
            measured: t2_hi - t2_lo,
            expectation: Expectation::Above { bound: 0.0 },
        });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        let within = Check {
            label: "w".into(),
            measured: 1.0005,
            expectation: Expectation::Within {
                target: 1.0,
                tol: 1e-3,
            },
        };
        assert!(within.passed());
        let below = Check {
            label: "b".into(),
            measured: 1e-11,
            expectation: Expectation::Below { bound: 1e-10 },
        };
        assert!(below.passed());
        let above_fails_on_equal = Check {
            label: "a".into(),
            measured: 0.0,
            expectation: Expectation::Above { bound: 0.0 },
        };
        assert!(!above_fails_on_equal.passed());
        let nan_fails = Check {
            label: "n".into(),
            measured: f64::NAN,
            expectation: Expectation::Below { bound: 1.0 },
        };
        assert!(!nan_fails.passed());
    }

    #[test]
    fn perturbed_coupling_fails_the_equivalence_criterion() {
        let result = junction_equivalence(0.3);
        assert!(!result.passed(), "{result:?}");
    }

    #[test]
    fn special_coupling_passes_the_equivalence_criterion() {
        let result = junction_equivalence(4.0 / 9.0);
        assert!(result.passed(), "{result:?}");
    }

    #[test]
    fn empty_results_do_not_pass() {
        assert!(!all_passed(&[]));
        let empty = CriterionResult {
            number: 99,
            name: "empty",
            checks: Vec::new(),
        };
        assert!(!empty.passed());
    }
}
