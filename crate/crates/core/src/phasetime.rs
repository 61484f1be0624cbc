//! Wigner phase times — energy derivatives of scattering phases — plus
//! saturation detection and parameter sweeps over whole systems.
//!
//! The phase time of an amplitude `a(E)` is `d Arg[a] / dE`, evaluated
//! with a three-point central stencil at `E - h, E, E + h` after phase
//! unwrapping. The default step is `h = 1e-6 E`; the one-sided
//! differences must agree to a mixed relative/absolute tolerance or the
//! step is halved once before giving up with
//! [`Error::NonConvergentDerivative`]. All times are in units of the
//! inverse incident energy (`hbar = 1`).

use crate::error::{Error, Result};
use crate::numerics::unwrap_phases;
use crate::ring::{self, Leads, RingSpec};
use crate::scattering1d::{self, BarrierSpec, Mode};
use crate::splitter::{self, JunctionModel, SplitterSpec};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// f64 math (sqrt, floor, trig, ...) for the no_std build; test, clippy,
// and rustdoc passes resolve the same calls through std or core
// intrinsics instead, so the lint is silenced rather than cfg'd.
#[allow(unused_imports)]
use num_traits::Float;

/// Default finite-difference step as a fraction of the energy.
pub const DEFAULT_STEP_FRACTION: f64 = 1e-6;
/// Default tolerance of [`detect_saturation`].
pub const SATURATION_TOL: f64 = 1e-6;
/// Default window (consecutive samples) of [`detect_saturation`].
pub const SATURATION_WINDOW: usize = 5;

/// The two one-sided differences must agree to this mixed tolerance
/// (relative on the slope, floored at 1 in absolute terms, so that
/// near-zero delays are not spuriously rejected).
const STENCIL_AGREEMENT_TOL: f64 = 1e-3;
/// Last-resort step fraction [`run_sweep`] retries with near sharp
/// resonances, where the curvature term swamps the agreement check at
/// the default step.
const FALLBACK_STEP_FRACTION: f64 = 1e-9;

/// One three-point pass: per-channel phase-time estimates plus whether
/// every channel's one-sided differences agreed.
fn stencil<F>(f: &F, energy: f64, h: f64, channels: &[usize]) -> Result<(Vec<f64>, bool)>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    let lo = f(energy - h)?;
    let mid = f(energy)?;
    let hi = f(energy + h)?;
    let available = lo.len().min(mid.len()).min(hi.len());
    let mut taus = Vec::with_capacity(channels.len());
    let mut agree = true;
    for &c in channels {
        if c >= available {
            return Err(Error::DimensionMismatch {
                expected: c + 1,
                got: available,
            });
        }
        let phases = unwrap_phases(&[lo[c].arg(), mid[c].arg(), hi[c].arg()]);
        let d_minus = (phases[1] - phases[0]) / h;
        let d_plus = (phases[2] - phases[1]) / h;
        taus.push((phases[2] - phases[0]) / (2.0 * h));
        let gap = (d_plus - d_minus).abs();
        if gap > STENCIL_AGREEMENT_TOL * (1.0 + d_plus.abs().max(d_minus.abs())) {
            agree = false;
        }
    }
    Ok((taus, agree))
}

fn check_step(energy: f64, step: f64) -> Result<()> {
    if !energy.is_finite() || energy <= 0.0 {
        return Err(Error::InvalidSpec(
            "phase times need a positive finite energy".into(),
        ));
    }
    if !step.is_finite() || step <= 0.0 || step >= energy {
        return Err(Error::InvalidSpec(
            "finite-difference step must satisfy 0 < h < E".into(),
        ));
    }
    Ok(())
}

/// Phase times of several channels of a common amplitude vector, with
/// an explicit starting step. The agreement protocol (halve once, then
/// fail) is shared across channels so they are all evaluated at the
/// same three energies.
pub fn wigner_delays_with_step<F>(
    f: F,
    energy: f64,
    step: f64,
    channels: &[usize],
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    check_step(energy, step)?;
    let (taus, agree) = stencil(&f, energy, step, channels)?;
    if agree {
        return Ok(taus);
    }
    let (taus, agree) = stencil(&f, energy, step / 2.0, channels)?;
    if agree {
        Ok(taus)
    } else {
        Err(Error::NonConvergentDerivative)
    }
}

/// Phase times of several channels at the default step `1e-6 E`.
pub fn wigner_delays<F>(f: F, energy: f64, channels: &[usize]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    wigner_delays_with_step(f, energy, DEFAULT_STEP_FRACTION * energy, channels)
}

/// Phase time of a single amplitude at the default step `1e-6 E`.
pub fn wigner_delay<F>(f: F, energy: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let taus = wigner_delays(|e| f(e).map(|a| vec![a]), energy, &[0])?;
    Ok(taus[0])
}

/// Phase time of a single amplitude with an explicit starting step.
pub fn wigner_delay_with_step<F>(f: F, energy: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let taus = wigner_delays_with_step(|e| f(e).map(|a| vec![a]), energy, step, &[0])?;
    Ok(taus[0])
}

/// A phase time sampled along a strictly increasing parameter, plus the
/// result of saturation detection (if it has been run).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTimeSeries {
    /// Name of the swept parameter.
    pub parameter_name: String,
    /// `(parameter, phase time)` pairs, parameters strictly increasing.
    pub samples: Vec<(f64, f64)>,
    /// Mean of the first settled window, once detected.
    pub saturated_value: Option<f64>,
    /// Index (into `samples`) of the last sample of that window.
    pub saturation_index: Option<usize>,
}

impl PhaseTimeSeries {
    /// Builds a series, checking that parameters increase strictly and
    /// every entry is finite. Saturation fields start empty.
    pub fn new(parameter_name: impl Into<String>, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples
            .iter()
            .any(|(p, v)| !p.is_finite() || !v.is_finite())
        {
            return Err(Error::InvalidSpec("series entries must be finite".into()));
        }
        if samples.windows(2).any(|pair| pair[1].0 <= pair[0].0) {
            return Err(Error::InvalidSpec(
                "series parameters must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            parameter_name: parameter_name.into(),
            samples,
            saturated_value: None,
            saturation_index: None,
        })
    }
}

/// Finds the first window of `window` consecutive samples whose spread
/// is below `tol * (1 + |window mean|)` and records its mean as the
/// saturated value and its last sample as the saturation index.
///
/// Returns a copy of the series with the saturation fields filled in
/// (or cleared, if no window qualifies). The scan starts at the front,
/// so appending further samples can never change an already detected
/// plateau, and running the detector twice is idempotent. Series
/// shorter than the window, non-positive tolerances, and windows below
/// 2 yield no detection.
pub fn detect_saturation(series: &PhaseTimeSeries, tol: f64, window: usize) -> PhaseTimeSeries {
    let mut out = series.clone();
    out.saturated_value = None;
    out.saturation_index = None;
    if window < 2 || !tol.is_finite() || tol <= 0.0 || series.samples.len() < window {
        return out;
    }
    for end in (window - 1)..series.samples.len() {
        let values = &series.samples[end + 1 - window..=end];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &(_, v) in values {
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        let mean = sum / window as f64;
        if hi - lo <= tol * (1.0 + mean.abs()) {
            out.saturated_value = Some(mean);
            out.saturation_index = Some(end);
            break;
        }
    }
    out
}

/// Any scattering system the phase-time engine can drive.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    /// One rectangular barrier on a line.
    Barrier(BarrierSpec),
    /// A lead splitting into arms.
    Splitter(SplitterSpec),
    /// A flux-threaded ring.
    Ring(RingSpec),
}

impl SystemSpec {
    /// Validates the underlying spec.
    pub fn validate(&self) -> Result<()> {
        match self {
            SystemSpec::Barrier(b) => b.validate(),
            SystemSpec::Splitter(s) => s.validate(),
            SystemSpec::Ring(r) => r.validate(),
        }
    }

    /// Number of transmission channels: 1 for a barrier, one per arm
    /// for a splitter, 0 or 1 for one-/two-lead rings.
    pub fn transmission_channels(&self) -> usize {
        match self {
            SystemSpec::Barrier(_) => 1,
            SystemSpec::Splitter(s) => s.arms.len(),
            SystemSpec::Ring(r) => match r.leads {
                Leads::OneLead => 0,
                Leads::TwoLead => 1,
            },
        }
    }

    /// Every scattering amplitude at one energy: reflection first, then
    /// the transmission channels in order.
    pub fn amplitudes(&self, energy: f64) -> Result<Vec<Complex64>> {
        match self {
            SystemSpec::Barrier(b) => {
                let (r, t) = scattering1d::barrier_amplitudes(energy, b)?;
                Ok(vec![r, t])
            }
            SystemSpec::Splitter(s) => {
                let sol = splitter::solve_splitter(s, energy)?;
                let mut amps = Vec::with_capacity(sol.t.len() + 1);
                amps.push(sol.r);
                amps.extend(sol.t);
                Ok(amps)
            }
            SystemSpec::Ring(r) => match r.leads {
                Leads::OneLead => Ok(vec![ring::solve_ring_one_lead(r, energy)?.r]),
                Leads::TwoLead => {
                    let sol = ring::solve_ring_two_lead(r, energy, r.flux)?;
                    Ok(vec![sol.r, sol.t.expect("two-lead rings transmit")])
                }
            },
        }
    }
}

fn amplitude_index(system: &SystemSpec, mode: Mode, channel: usize) -> Result<usize> {
    match mode {
        Mode::Reflection => {
            if channel != 0 {
                return Err(Error::InvalidSpec(
                    "reflection has a single channel, index 0".into(),
                ));
            }
            Ok(0)
        }
        Mode::Transmission => {
            let n = system.transmission_channels();
            if channel >= n {
                return Err(Error::InvalidSpec(format!(
                    "transmission channel {channel} out of range: system has {n}"
                )));
            }
            Ok(1 + channel)
        }
    }
}

/// Phase time of one channel of any system, at the default step.
///
/// `channel` counts transmission channels from 0 (arm order for
/// splitters); reflection only accepts channel 0.
pub fn phase_time_of(system: &SystemSpec, energy: f64, mode: Mode, channel: usize) -> Result<f64> {
    system.validate()?;
    let index = amplitude_index(system, mode, channel)?;
    let taus = wigner_delays(|e| system.amplitudes(e), energy, &[index])?;
    Ok(taus[0])
}

/// A quantity recorded per sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Reflection phase time.
    TauR,
    /// Transmission phase time of a channel (0-based).
    TauT(usize),
    /// Transmission probability of a channel (0-based).
    TransmissionProb(usize),
    /// Reflection probability.
    ReflectionProb,
}

impl Observable {
    /// Column label, following the system's naming convention:
    /// splitters number their arms (`tau_1`, `T_2`, ...), single-channel
    /// systems use `tau_t` / `T`.
    pub fn label(&self, system: &SystemSpec) -> String {
        let numbered = matches!(system, SystemSpec::Splitter(_));
        match self {
            Observable::TauR => "tau_r".into(),
            Observable::ReflectionProb => "R".into(),
            Observable::TauT(i) => {
                if numbered {
                    format!("tau_{}", i + 1)
                } else {
                    "tau_t".into()
                }
            }
            Observable::TransmissionProb(i) => {
                if numbered {
                    format!("T_{}", i + 1)
                } else {
                    "T".into()
                }
            }
        }
    }
}

/// A uniform, inclusive parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// First point.
    pub start: f64,
    /// Last point (included when it lies on the step lattice).
    pub stop: f64,
    /// Positive step.
    pub step: f64,
}

impl Grid {
    /// The grid points `start + i * step`, reproducibly computed.
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::PlanInvalid("grid bounds must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::PlanInvalid("grid step must be positive".into()));
        }
        if self.stop < self.start {
            return Err(Error::PlanInvalid("grid stop must be >= start".into()));
        }
        let count = ((self.stop - self.start) / self.step + 1e-6).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// A parameter sweep: one system, one swept path, a grid, and the
/// observables to record at the incident `energy`.
///
/// Swept paths name system parameters: `length`, `offset`, `v_re`,
/// `v_im` for a barrier; `arm2.barrier.length` (1-based),
/// `arm*.barrier.length` (every barrier-carrying arm), or
/// `junction.epsilon` for a splitter; `barrier1.v_im`,
/// `barrier*.length`, `well_length`, or `flux` for a ring. The special
/// path `energy` sweeps the incident energy itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// System to sweep.
    pub system: SystemSpec,
    /// Path of the swept parameter (see type docs).
    pub swept: String,
    /// Grid of parameter values.
    pub grid: Grid,
    /// Quantities recorded per point.
    pub observables: Vec<Observable>,
    /// Incident energy (ignored per point only when `swept` is
    /// `energy`).
    pub energy: f64,
}

/// One sweep point: the parameter value, one entry per observable
/// (`None` when that point failed), and the failure code if any.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Swept parameter value.
    pub parameter: f64,
    /// Observable values, in plan order.
    pub values: Vec<Option<f64>>,
    /// Error code for failed points (see `Error::code`).
    pub error: Option<&'static str>,
}

/// Result of a sweep: the parameter name, observable column labels, and
/// one row per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Swept parameter path.
    pub parameter_name: String,
    /// Observable labels, in plan order.
    pub columns: Vec<String>,
    /// One row per grid point (empty when no observables were asked).
    pub rows: Vec<SweepRow>,
}

/// Assigns one scalar parameter of a system by path (grammar on
/// [`SweepPlan`]). The incident energy is not a system parameter and is
/// rejected here; sweeps handle it separately.
pub fn set_parameter(system: &mut SystemSpec, path: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidSpec("parameter values must be finite".into()));
    }
    match system {
        SystemSpec::Barrier(b) => set_barrier_field(b, path, value),
        SystemSpec::Splitter(s) => set_splitter_path(s, path, value),
        SystemSpec::Ring(r) => set_ring_path(r, path, value),
    }
}

fn set_barrier_field(barrier: &mut BarrierSpec, field: &str, value: f64) -> Result<()> {
    match field {
        "v_re" => barrier.v_re = value,
        "v_im" => barrier.v_im = value,
        "length" => barrier.length = value,
        "offset" => barrier.offset = value,
        _ => {
            return Err(Error::InvalidSpec(format!(
                "unknown barrier field {field:?}"
            )))
        }
    }
    Ok(())
}

fn set_splitter_path(spec: &mut SplitterSpec, path: &str, value: f64) -> Result<()> {
    if path == "junction.epsilon" {
        return match &mut spec.junction {
            JunctionModel::Buttiker { epsilon } => {
                *epsilon = value;
                Ok(())
            }
            JunctionModel::Griffith => Err(Error::InvalidSpec(
                "this junction model has no coupling parameter".into(),
            )),
        };
    }
    let Some(rest) = path.strip_prefix("arm") else {
        return Err(Error::InvalidSpec(format!(
            "unknown splitter parameter path {path:?}"
        )));
    };
    let Some((selector, field)) = rest.split_once(".barrier.") else {
        return Err(Error::InvalidSpec(format!(
            "unknown splitter parameter path {path:?}"
        )));
    };
    if selector == "*" {
        let mut any = false;
        for arm in &mut spec.arms {
            if let Some(barrier) = &mut arm.barrier {
                set_barrier_field(barrier, field, value)?;
                any = true;
            }
        }
        if !any {
            return Err(Error::InvalidSpec(
                "no arm carries a barrier to sweep".into(),
            ));
        }
        return Ok(());
    }
    let index: usize = selector.parse().map_err(|_| {
        Error::InvalidSpec(format!("unknown splitter parameter path {path:?}"))
    })?;
    if index == 0 || index > spec.arms.len() {
        return Err(Error::InvalidSpec(format!(
            "arm {index} out of range: splitter has {} arms",
            spec.arms.len()
        )));
    }
    match &mut spec.arms[index - 1].barrier {
        Some(barrier) => set_barrier_field(barrier, field, value),
        None => Err(Error::InvalidSpec(format!(
            "arm {index} is free: it has no barrier"
        ))),
    }
}

fn set_ring_path(spec: &mut RingSpec, path: &str, value: f64) -> Result<()> {
    match path {
        "well_length" => {
            spec.well_length = value;
            return Ok(());
        }
        "flux" => {
            spec.flux = value;
            return Ok(());
        }
        _ => {}
    }
    let Some(rest) = path.strip_prefix("barrier") else {
        return Err(Error::InvalidSpec(format!(
            "unknown ring parameter path {path:?}"
        )));
    };
    let Some((selector, field)) = rest.split_once('.') else {
        return Err(Error::InvalidSpec(format!(
            "unknown ring parameter path {path:?}"
        )));
    };
    match selector {
        "1" => set_barrier_field(&mut spec.barrier1, field, value),
        "2" => match &mut spec.barrier2 {
            Some(barrier) => set_barrier_field(barrier, field, value),
            None => Err(Error::InvalidSpec(
                "the ring has no second barrier".into(),
            )),
        },
        "*" => {
            set_barrier_field(&mut spec.barrier1, field, value)?;
            if let Some(barrier) = &mut spec.barrier2 {
                set_barrier_field(barrier, field, value)?;
            }
            Ok(())
        }
        _ => Err(Error::InvalidSpec(format!(
            "unknown ring parameter path {path:?}"
        ))),
    }
}

/// Runs a sweep. Structural problems (bad grid, unknown path, an
/// observable the system cannot supply, invalid base system) fail the
/// whole sweep with [`Error::PlanInvalid`]; per-point solver failures
/// are recorded in that row's `error` field instead, leaving the other
/// rows intact. Rows are evaluated sequentially in grid order, so
/// repeated runs of the same plan are bitwise identical.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepTable> {
    plan.system
        .validate()
        .map_err(|e| Error::PlanInvalid(format!("system: {e}")))?;
    if !plan.energy.is_finite() || plan.energy <= 0.0 {
        return Err(Error::PlanInvalid("plan energy must be positive".into()));
    }
    let points = plan.grid.points()?;
    let n_channels = plan.system.transmission_channels();
    for obs in &plan.observables {
        if let Observable::TauT(i) | Observable::TransmissionProb(i) = obs {
            if *i >= n_channels {
                return Err(Error::PlanInvalid(format!(
                    "observable wants transmission channel {i} but the system has {n_channels}"
                )));
            }
        }
    }
    let columns: Vec<String> = plan
        .observables
        .iter()
        .map(|o| o.label(&plan.system))
        .collect();
    if plan.observables.is_empty() {
        // Nothing to evaluate: a header-only table.
        return Ok(SweepTable {
            parameter_name: plan.swept.clone(),
            columns,
            rows: Vec::new(),
        });
    }
    let sweeping_energy = plan.swept == "energy";
    if !sweeping_energy {
        let mut probe = plan.system.clone();
        set_parameter(&mut probe, &plan.swept, points[0])
            .map_err(|e| Error::PlanInvalid(format!("swept path {:?}: {e}", plan.swept)))?;
    }

    // Amplitude indices needing a phase derivative, in first-use order.
    let mut delay_channels: Vec<usize> = Vec::new();
    for obs in &plan.observables {
        let idx = match obs {
            Observable::TauR => Some(0),
            Observable::TauT(i) => Some(1 + *i),
            _ => None,
        };
        if let Some(idx) = idx {
            if !delay_channels.contains(&idx) {
                delay_channels.push(idx);
            }
        }
    }
    let needs_amplitudes = plan
        .observables
        .iter()
        .any(|o| matches!(o, Observable::TransmissionProb(_) | Observable::ReflectionProb));

    let mut rows = Vec::with_capacity(points.len());
    for &point in &points {
        let mut system = plan.system.clone();
        let mut energy = plan.energy;
        if sweeping_energy {
            energy = point;
        } else {
            set_parameter(&mut system, &plan.swept, point)
                .map_err(|e| Error::PlanInvalid(format!("swept path {:?}: {e}", plan.swept)))?;
        }
        rows.push(evaluate_row(
            &system,
            energy,
            point,
            &plan.observables,
            &delay_channels,
            needs_amplitudes,
        ));
    }
    Ok(SweepTable {
        parameter_name: plan.swept.clone(),
        columns,
        rows,
    })
}

fn evaluate_row(
    system: &SystemSpec,
    energy: f64,
    parameter: f64,
    observables: &[Observable],
    delay_channels: &[usize],
    needs_amplitudes: bool,
) -> SweepRow {
    let evaluated = (|| -> Result<(Vec<f64>, Vec<Complex64>)> {
        if !energy.is_finite() || energy <= 0.0 {
            return Err(Error::InvalidSpec(
                "incident energy must be positive and finite".into(),
            ));
        }
        let delays = if delay_channels.is_empty() {
            Vec::new()
        } else {
            match wigner_delays(|e| system.amplitudes(e), energy, delay_channels) {
                Ok(d) => d,
                // Near a sharp resonance the default step straddles the
                // peak; retry once with a far smaller step before
                // declaring the point failed.
                Err(Error::NonConvergentDerivative) => wigner_delays_with_step(
                    |e| system.amplitudes(e),
                    energy,
                    FALLBACK_STEP_FRACTION * energy,
                    delay_channels,
                )?,
                Err(e) => return Err(e),
            }
        };
        let amps = if needs_amplitudes {
            system.amplitudes(energy)?
        } else {
            Vec::new()
        };
        Ok((delays, amps))
    })();
    match evaluated {
        Ok((delays, amps)) => {
            let delay_at = |idx: usize| {
                let pos = delay_channels
                    .iter()
                    .position(|&c| c == idx)
                    .expect("delay channel was collected above");
                delays[pos]
            };
            let values = observables
                .iter()
                .map(|obs| {
                    Some(match obs {
                        Observable::TauR => delay_at(0),
                        Observable::TauT(i) => delay_at(1 + i),
                        Observable::TransmissionProb(i) => amps[1 + i].norm_sqr(),
                        Observable::ReflectionProb => amps[0].norm_sqr(),
                    })
                })
                .collect();
            SweepRow {
                parameter,
                values,
                error: None,
            }
        }
        Err(e) => SweepRow {
            parameter,
            values: vec![None; observables.len()],
            error: Some(e.code()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitter::ArmSpec;

    #[test]
    fn linear_phase_gives_its_slope() {
        let tau = wigner_delay(|e| Ok(Complex64::cis(3.0 * e)), 1.0).unwrap();
        assert!((tau - 3.0).abs() <= 1e-9, "tau = {tau}");
    }

    #[test]
    fn quadratic_phase_gives_the_local_slope() {
        let tau = wigner_delay(|e| Ok(Complex64::cis(e * e)), 1.5).unwrap();
        assert!((tau - 3.0).abs() <= 1e-9, "tau = {tau}");
    }

    #[test]
    fn unwrapping_crosses_branch_cuts() {
        // Slope pi at E near the cut: principal args jump by ~2pi.
        let tau = wigner_delay(
            |e| Ok(Complex64::cis(core::f64::consts::PI * (1.0 + (e - 1.0) * 1e5))),
            1.0,
        )
        .unwrap();
        assert!(
            (tau - core::f64::consts::PI * 1e5).abs() <= 1.0,
            "tau = {tau}"
        );
    }

    #[test]
    fn modulus_changes_do_not_leak_into_the_delay() {
        let tau = wigner_delay(
            |e| Ok(Complex64::new(0.1 + 5.0 * (e - 1.0), 0.0) * Complex64::cis(2.0 * e)),
            1.0,
        )
        .unwrap();
        assert!((tau - 2.0).abs() <= 1e-9, "tau = {tau}");
    }

    #[test]
    fn moderate_curvature_succeeds_after_one_halving() {
        // Phase b (E-1)^2 / 2: one-sided slopes disagree by b*h, which
        // fails at h = 1e-6 for b = 1.5e3 and passes after halving.
        let b = 1.5e3;
        let tau = wigner_delay(|e| Ok(Complex64::cis(b * (e - 1.0) * (e - 1.0) / 2.0)), 1.0)
            .unwrap();
        assert!(tau.abs() <= 1e-6, "tau = {tau}");
    }

    #[test]
    fn excessive_curvature_is_reported() {
        let b = 5.0e3;
        let err = wigner_delay(|e| Ok(Complex64::cis(b * (e - 1.0) * (e - 1.0) / 2.0)), 1.0)
            .unwrap_err();
        assert_eq!(err, Error::NonConvergentDerivative);
    }

    #[test]
    fn step_bounds_are_checked() {
        assert!(wigner_delay(|_| Ok(Complex64::new(1.0, 0.0)), 0.0).is_err());
        assert!(wigner_delay(|_| Ok(Complex64::new(1.0, 0.0)), -1.0).is_err());
        assert!(
            wigner_delay_with_step(|_| Ok(Complex64::new(1.0, 0.0)), 1.0, 2.0).is_err()
        );
        assert!(
            wigner_delay_with_step(|_| Ok(Complex64::new(1.0, 0.0)), 1.0, 0.0).is_err()
        );
    }

    #[test]
    fn closure_errors_propagate() {
        let err = wigner_delay(|_| Err::<Complex64, _>(Error::SingularMatrix), 1.0).unwrap_err();
        assert_eq!(err, Error::SingularMatrix);
    }

    #[test]
    fn missing_channels_are_a_dimension_mismatch() {
        let err = wigner_delays(|_| Ok(vec![Complex64::new(1.0, 0.0)]), 1.0, &[2]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn default_step_result_is_stable_under_halving() {
        let barrier = BarrierSpec::real(5.0, 2.0);
        let f = |e: f64| scattering1d::barrier_amplitudes(e, &barrier).map(|(_, t)| t);
        let tau = wigner_delay(f, 1.0).unwrap();
        let tau_half = wigner_delay_with_step(f, 1.0, 0.5e-6).unwrap();
        assert!(
            (tau - tau_half).abs() <= 1e-4 * (1.0 + tau.abs()),
            "{tau} vs {tau_half}"
        );
    }

    fn series(values: &[f64]) -> PhaseTimeSeries {
        PhaseTimeSeries::new(
            "p",
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (i as f64, *v))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_series_saturates_immediately() {
        let s = detect_saturation(&series(&[5.0; 9]), 1e-6, 5);
        assert_eq!(s.saturated_value, Some(5.0));
        assert_eq!(s.saturation_index, Some(4));
    }

    #[test]
    fn rising_series_never_saturates() {
        let values: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let s = detect_saturation(&series(&values), 1e-6, 5);
        assert_eq!(s.saturated_value, None);
        assert_eq!(s.saturation_index, None);
    }

    #[test]
    fn detector_fires_at_the_first_settled_window() {
        let values: Vec<f64> = (0..30).map(|i| 1.0 + 0.5f64.powi(i)).collect();
        let s = detect_saturation(&series(&values), 1e-6, 5);
        let end = s.saturation_index.expect("must settle");
        // Window spread is 2^-(end-4) * (1 - 2^-4); find it by hand.
        let spread = |e: usize| 0.5f64.powi(e as i32 - 4) - 0.5f64.powi(e as i32);
        assert!(spread(end) <= 1e-6 * 2.0);
        assert!(spread(end - 1) > 1e-6 * 2.0);
    }

    #[test]
    fn detector_is_idempotent_and_append_insensitive() {
        let values: Vec<f64> = (0..30).map(|i| 1.0 + 0.5f64.powi(i)).collect();
        let first = detect_saturation(&series(&values), 1e-6, 5);
        let again = detect_saturation(&first, 1e-6, 5);
        assert_eq!(first, again);
        let longer = detect_saturation(&series(&values[..26]), 1e-6, 5);
        assert_eq!(first.saturated_value, longer.saturated_value);
        assert_eq!(first.saturation_index, longer.saturation_index);
    }

    #[test]
    fn short_series_and_bad_settings_yield_no_detection() {
        assert_eq!(
            detect_saturation(&series(&[1.0; 4]), 1e-6, 5).saturated_value,
            None
        );
        assert_eq!(
            detect_saturation(&series(&[1.0; 9]), -1.0, 5).saturated_value,
            None
        );
        assert_eq!(
            detect_saturation(&series(&[1.0; 9]), 1e-6, 1).saturated_value,
            None
        );
    }

    #[test]
    fn series_construction_validates_ordering_and_finiteness() {
        assert!(PhaseTimeSeries::new("p", vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(PhaseTimeSeries::new("p", vec![(1.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(PhaseTimeSeries::new("p", vec![(0.0, f64::NAN)]).is_err());
        assert!(PhaseTimeSeries::new("p", Vec::new()).is_ok());
    }

    #[test]
    fn phase_time_of_matches_the_direct_barrier_path() {
        let barrier = BarrierSpec::real(5.0, 2.0);
        let via_system = phase_time_of(
            &SystemSpec::Barrier(barrier),
            1.0,
            Mode::Transmission,
            0,
        )
        .unwrap();
        let direct = scattering1d::phase_time_1d(1.0, &barrier, Mode::Transmission).unwrap();
        assert!((via_system - direct).abs() <= 1e-12);
    }

    #[test]
    fn phase_time_of_checks_channels() {
        let barrier = SystemSpec::Barrier(BarrierSpec::real(5.0, 2.0));
        assert!(phase_time_of(&barrier, 1.0, Mode::Reflection, 1).is_err());
        assert!(phase_time_of(&barrier, 1.0, Mode::Transmission, 1).is_err());
        let one_lead = SystemSpec::Ring(RingSpec {
            barrier1: BarrierSpec::real(2.0, 4.0),
            barrier2: None,
            well_length: 0.0,
            flux: 0.0,
            leads: Leads::OneLead,
        });
        assert!(phase_time_of(&one_lead, 1.0, Mode::Transmission, 0).is_err());
        assert!(phase_time_of(&one_lead, 1.0, Mode::Reflection, 0).is_ok());
    }

    #[test]
    fn grid_points_are_inclusive_and_validated() {
        let grid = Grid {
            start: 0.5,
            stop: 2.0,
            step: 0.5,
        };
        assert_eq!(grid.points().unwrap(), vec![0.5, 1.0, 1.5, 2.0]);
        let fine = Grid {
            start: 0.05,
            stop: 0.9,
            step: 0.05,
        };
        let pts = fine.points().unwrap();
        assert_eq!(pts.len(), 18);
        assert!((pts[17] - 0.9).abs() <= 1e-12);
        assert!(Grid {
            start: 1.0,
            stop: 0.0,
            step: 0.5
        }
        .points()
        .is_err());
        assert!(Grid {
            start: 0.0,
            stop: 1.0,
            step: 0.0
        }
        .points()
        .is_err());
    }

    fn barrier_plan() -> SweepPlan {
        SweepPlan {
            system: SystemSpec::Barrier(BarrierSpec::real(5.0, 1.0)),
            swept: "length".into(),
            grid: Grid {
                start: 1.0,
                stop: 3.0,
                step: 1.0,
            },
            observables: vec![Observable::TauT(0), Observable::TransmissionProb(0)],
            energy: 1.0,
        }
    }

    #[test]
    fn sweeps_fill_rows_in_grid_order() {
        let table = run_sweep(&barrier_plan()).unwrap();
        assert_eq!(table.parameter_name, "length");
        assert_eq!(table.columns, vec!["tau_t".to_string(), "T".to_string()]);
        assert_eq!(table.rows.len(), 3);
        for (row, expected) in table.rows.iter().zip([1.0, 2.0, 3.0]) {
            assert_eq!(row.parameter, expected);
            assert!(row.error.is_none());
            assert!(row.values.iter().all(Option::is_some));
        }
        // Transmission probability falls with barrier length.
        let t: Vec<f64> = table.rows.iter().map(|r| r.values[1].unwrap()).collect();
        assert!(t[0] > t[1] && t[1] > t[2]);
    }

    #[test]
    fn sweeps_are_bitwise_reproducible() {
        let a = run_sweep(&barrier_plan()).unwrap();
        let b = run_sweep(&barrier_plan()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failed_points_are_marked_not_fatal() {
        let plan = SweepPlan {
            system: SystemSpec::Barrier(BarrierSpec::real(2.0, 1.0)),
            swept: "energy".into(),
            grid: Grid {
                start: 1.0,
                stop: 3.0,
                step: 0.5,
            },
            observables: vec![Observable::TauT(0)],
            energy: 1.0,
        };
        let table = run_sweep(&plan).unwrap();
        assert_eq!(table.rows.len(), 5);
        for row in &table.rows {
            if row.parameter == 2.0 {
                assert_eq!(row.error, Some("degenerate-energy"));
                assert_eq!(row.values, vec![None]);
            } else {
                assert!(row.error.is_none(), "at {}", row.parameter);
                assert!(row.values[0].is_some());
            }
        }
    }

    #[test]
    fn empty_observables_short_circuit() {
        let plan = SweepPlan {
            observables: Vec::new(),
            ..barrier_plan()
        };
        let table = run_sweep(&plan).unwrap();
        assert!(table.columns.is_empty());
        assert!(table.rows.is_empty());
    }

    #[test]
    fn structural_problems_fail_the_whole_sweep() {
        let bad_path = SweepPlan {
            swept: "bogus".into(),
            ..barrier_plan()
        };
        assert!(matches!(
            run_sweep(&bad_path).unwrap_err(),
            Error::PlanInvalid(_)
        ));
        let bad_channel = SweepPlan {
            observables: vec![Observable::TauT(3)],
            ..barrier_plan()
        };
        assert!(matches!(
            run_sweep(&bad_channel).unwrap_err(),
            Error::PlanInvalid(_)
        ));
        let bad_energy = SweepPlan {
            energy: -1.0,
            ..barrier_plan()
        };
        assert!(matches!(
            run_sweep(&bad_energy).unwrap_err(),
            Error::PlanInvalid(_)
        ));
        let one_lead_tau_t = SweepPlan {
            system: SystemSpec::Ring(RingSpec {
                barrier1: BarrierSpec::real(2.0, 4.0),
                barrier2: None,
                well_length: 0.0,
                flux: 0.0,
                leads: Leads::OneLead,
            }),
            swept: "barrier1.length".into(),
            observables: vec![Observable::TauT(0)],
            ..barrier_plan()
        };
        assert!(matches!(
            run_sweep(&one_lead_tau_t).unwrap_err(),
            Error::PlanInvalid(_)
        ));
    }

    #[test]
    fn splitter_columns_are_numbered() {
        let system = SystemSpec::Splitter(SplitterSpec {
            arms: vec![
                ArmSpec::with_barrier(BarrierSpec {
                    v_re: 5.0,
                    v_im: 0.0,
                    length: 1.0,
                    offset: 3.0,
                }),
                ArmSpec::free(),
            ],
            junction: JunctionModel::Griffith,
        });
        let plan = SweepPlan {
            system,
            swept: "arm1.barrier.length".into(),
            grid: Grid {
                start: 1.0,
                stop: 2.0,
                step: 1.0,
            },
            observables: vec![
                Observable::TauR,
                Observable::TauT(0),
                Observable::TauT(1),
                Observable::TransmissionProb(1),
                Observable::ReflectionProb,
            ],
            energy: 1.0,
        };
        let table = run_sweep(&plan).unwrap();
        assert_eq!(
            table.columns,
            vec!["tau_r", "tau_1", "tau_2", "T_2", "R"]
        );
        assert!(table.rows.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn parameter_paths_cover_the_documented_grammar() {
        let mut barrier = SystemSpec::Barrier(BarrierSpec::real(5.0, 1.0));
        set_parameter(&mut barrier, "v_im", 2.0).unwrap();
        set_parameter(&mut barrier, "offset", 1.5).unwrap();
        if let SystemSpec::Barrier(b) = &barrier {
            assert_eq!(b.v_im, 2.0);
            assert_eq!(b.offset, 1.5);
        }
        assert!(set_parameter(&mut barrier, "energy", 1.0).is_err());

        let mut splitter = SystemSpec::Splitter(SplitterSpec {
            arms: vec![
                ArmSpec::with_barrier(BarrierSpec::real(5.0, 1.0)),
                ArmSpec::with_barrier(BarrierSpec::real(3.0, 2.0)),
                ArmSpec::free(),
            ],
            junction: JunctionModel::Griffith,
        });
        set_parameter(&mut splitter, "arm2.barrier.v_re", 7.0).unwrap();
        set_parameter(&mut splitter, "arm*.barrier.length", 4.0).unwrap();
        if let SystemSpec::Splitter(s) = &splitter {
            assert_eq!(s.arms[1].barrier.unwrap().v_re, 7.0);
            assert_eq!(s.arms[0].barrier.unwrap().length, 4.0);
            assert_eq!(s.arms[1].barrier.unwrap().length, 4.0);
        }
        assert!(set_parameter(&mut splitter, "arm3.barrier.length", 1.0).is_err());
        assert!(set_parameter(&mut splitter, "arm0.barrier.length", 1.0).is_err());
        assert!(set_parameter(&mut splitter, "arm9.barrier.length", 1.0).is_err());
        assert!(set_parameter(&mut splitter, "junction.epsilon", 0.3).is_err());
        let mut tunable = SystemSpec::Splitter(SplitterSpec {
            arms: vec![ArmSpec::free(), ArmSpec::free()],
            junction: JunctionModel::Buttiker { epsilon: 0.2 },
        });
        set_parameter(&mut tunable, "junction.epsilon", 0.3).unwrap();
        if let SystemSpec::Splitter(s) = &tunable {
            assert_eq!(s.junction, JunctionModel::Buttiker { epsilon: 0.3 });
        }

        let mut ring = SystemSpec::Ring(RingSpec {
            barrier1: BarrierSpec::real(2.0, 5.0),
            barrier2: Some(BarrierSpec::real(2.0, 5.0)),
            well_length: 3.0,
            flux: 0.0,
            leads: Leads::OneLead,
        });
        set_parameter(&mut ring, "barrier2.length", 6.0).unwrap();
        set_parameter(&mut ring, "well_length", 4.0).unwrap();
        set_parameter(&mut ring, "flux", 0.25).unwrap();
        set_parameter(&mut ring, "barrier*.v_re", 3.0).unwrap();
        if let SystemSpec::Ring(r) = &ring {
            assert_eq!(r.barrier2.unwrap().length, 6.0);
            assert_eq!(r.well_length, 4.0);
            assert_eq!(r.flux, 0.25);
            assert_eq!(r.barrier1.v_re, 3.0);
            assert_eq!(r.barrier2.unwrap().v_re, 3.0);
        }
        let mut single = SystemSpec::Ring(RingSpec {
            barrier1: BarrierSpec::real(2.0, 5.0),
            barrier2: None,
            well_length: 0.0,
            flux: 0.0,
            leads: Leads::OneLead,
        });
        assert!(set_parameter(&mut single, "barrier2.length", 1.0).is_err());
        assert!(set_parameter(&mut single, "spin", 1.0).is_err());
    }
}
