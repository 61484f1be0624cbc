//! Experiment configuration: parsing, validation, and canonical
//! emission of the line-oriented `key = value` format.
//!
//! A config has three bracketed sections:
//!
//! ```text
//! [system]   # kind, energy, and the physical layout
//! [sweep]    # swept path, grid, optional per-curve variants
//! [output]   # observables (CSV columns) and an optional file path
//! ```
//!
//! Full-line `#` comments and blank lines are ignored. Later
//! assignments to the same key override earlier ones, which is also how
//! `--set section.key=value` overrides are applied. `parse_config` and
//! `emit_config` round-trip: parsing an emitted config reproduces the
//! original value exactly.

use std::collections::BTreeMap;

use thiserror::Error;
use wigner_core::phasetime::{set_parameter, Observable, SystemSpec};
use wigner_core::ring::{Leads, RingSpec};
use wigner_core::scattering1d::BarrierSpec;
use wigner_core::splitter::{ArmSpec, JunctionModel, SplitterSpec};

/// Configuration errors, each naming the offending key where one
/// exists.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("missing key `{key}`")]
    MissingKey { key: String },
    #[error("value out of range for `{key}`: {value}")]
    OutOfRange { key: String, value: String },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

type Result<T> = std::result::Result<T, ConfigError>;

/// The four system shapes the engine solves, matching the CLI
/// subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Barrier,
    Splitter,
    Ring1,
    Ring2,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Barrier => "barrier",
            SystemKind::Splitter => "splitter",
            SystemKind::Ring1 => "ring1",
            SystemKind::Ring2 => "ring2",
        }
    }

    fn parse(text: &str) -> Option<Self> {
        match text {
            "barrier" => Some(SystemKind::Barrier),
            "splitter" => Some(SystemKind::Splitter),
            "ring1" => Some(SystemKind::Ring1),
            "ring2" => Some(SystemKind::Ring2),
            _ => None,
        }
    }
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The swept grid plus optional per-curve variants. `path` and the
/// variant literals are kept exactly as typed: they name CSV columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub path: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub variant_path: Option<String>,
    pub variants: Vec<String>,
}

/// One requested CSV column: the token as typed (column name) and the
/// observable it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableColumn {
    pub token: String,
    pub observable: Observable,
}

/// A fully validated experiment: system, energy, sweep, and output
/// choices.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub energy: f64,
    pub sweep: SweepConfig,
    pub observables: Vec<ObservableColumn>,
    pub output_file: Option<String>,
}

impl ExperimentConfig {
    /// The system shape, for matching against the invoked subcommand.
    pub fn kind(&self) -> SystemKind {
        match &self.system {
            SystemSpec::Barrier(_) => SystemKind::Barrier,
            SystemSpec::Splitter(_) => SystemKind::Splitter,
            SystemSpec::Ring(r) => match r.leads {
                Leads::OneLead => SystemKind::Ring1,
                Leads::TwoLead => SystemKind::Ring2,
            },
        }
    }
}

/// One `--set section.key=value` override.
#[derive(Debug, Clone, PartialEq)]
pub struct SetOverride {
    pub section: String,
    pub key: String,
    pub value: String,
}

/// Parses a `--set` argument of the form `section.key=value`.
pub fn parse_set_override(arg: &str) -> Result<SetOverride> {
    let (path, value) = arg
        .split_once('=')
        .ok_or_else(|| ConfigError::Parse(format!("--set expects section.key=value, got `{arg}`")))?;
    let (section, key) = path.trim().split_once('.').ok_or_else(|| {
        ConfigError::Parse(format!("--set expects section.key=value, got `{arg}`"))
    })?;
    if !matches!(section, "system" | "sweep" | "output") {
        return Err(ConfigError::UnknownKey {
            key: format!("{section}.{key}"),
        });
    }
    Ok(SetOverride {
        section: section.to_string(),
        key: key.trim().to_string(),
        value: value.trim().to_string(),
    })
}

// --- raw section scan ----------------------------------------------------

#[derive(Clone, Copy)]
enum SectionTag {
    System,
    Sweep,
    Output,
}

#[derive(Default)]
struct RawSections {
    system: BTreeMap<String, String>,
    sweep: BTreeMap<String, String>,
    output: BTreeMap<String, String>,
}

impl RawSections {
    fn section_mut(&mut self, tag: SectionTag) -> &mut BTreeMap<String, String> {
        match tag {
            SectionTag::System => &mut self.system,
            SectionTag::Sweep => &mut self.sweep,
            SectionTag::Output => &mut self.output,
        }
    }
}

fn scan_sections(text: &str) -> Result<RawSections> {
    let mut raw = RawSections::default();
    let mut current: Option<SectionTag> = None;
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let name = inner.strip_suffix(']').ok_or_else(|| {
                ConfigError::Parse(format!("line {}: malformed section header `{line}`", index + 1))
            })?;
            current = Some(match name.trim() {
                "system" => SectionTag::System,
                "sweep" => SectionTag::Sweep,
                "output" => SectionTag::Output,
                other => {
                    return Err(ConfigError::UnknownKey {
                        key: format!("[{other}]"),
                    })
                }
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError::Parse(format!("line {}: expected `key = value`, got `{line}`", index + 1))
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Parse(format!(
                "line {}: empty key in `{line}`",
                index + 1
            )));
        }
        let tag = current.ok_or_else(|| {
            ConfigError::Parse(format!(
                "line {}: `{key}` appears before any [section]",
                index + 1
            ))
        })?;
        raw.section_mut(tag).insert(key.to_string(), value.trim().to_string());
    }
    Ok(raw)
}

// --- typed take helpers ---------------------------------------------------

fn take(map: &mut BTreeMap<String, String>, key: &str) -> Option<String> {
    map.remove(key)
}

fn take_required(map: &mut BTreeMap<String, String>, section: &str, key: &str) -> Result<String> {
    take(map, key).ok_or_else(|| ConfigError::MissingKey {
        key: format!("{section}.{key}"),
    })
}

fn parse_number(section: &str, key: &str, raw: &str) -> Result<f64> {
    let value: f64 = raw.parse().map_err(|_| {
        ConfigError::Parse(format!("key `{section}.{key}`: `{raw}` is not a number"))
    })?;
    if !value.is_finite() {
        return Err(ConfigError::OutOfRange {
            key: format!("{section}.{key}"),
            value: raw.to_string(),
        });
    }
    Ok(value)
}

fn take_number(map: &mut BTreeMap<String, String>, section: &str, key: &str) -> Result<Option<f64>> {
    match take(map, key) {
        Some(raw) => Ok(Some(parse_number(section, key, &raw)?)),
        None => Ok(None),
    }
}

fn require_number(map: &mut BTreeMap<String, String>, section: &str, key: &str) -> Result<f64> {
    let raw = take_required(map, section, key)?;
    parse_number(section, key, &raw)
}

fn check_nonnegative(section: &str, key: &str, value: f64) -> Result<f64> {
    if value < 0.0 {
        return Err(ConfigError::OutOfRange {
            key: format!("{section}.{key}"),
            value: format!("{value}"),
        });
    }
    Ok(value)
}

fn reject_leftovers(map: &BTreeMap<String, String>, section: &str) -> Result<()> {
    if let Some(key) = map.keys().next() {
        return Err(ConfigError::UnknownKey {
            key: format!("{section}.{key}"),
        });
    }
    Ok(())
}

// --- system builders --------------------------------------------------

fn build_barrier(map: &mut BTreeMap<String, String>) -> Result<SystemSpec> {
    let v_re = require_number(map, "system", "v_re")?;
    let v_im = check_nonnegative(
        "system",
        "v_im",
        take_number(map, "system", "v_im")?.unwrap_or(0.0),
    )?;
    let length = check_nonnegative("system", "length", require_number(map, "system", "length")?)?;
    let offset = check_nonnegative(
        "system",
        "offset",
        take_number(map, "system", "offset")?.unwrap_or(0.0),
    )?;
    Ok(SystemSpec::Barrier(BarrierSpec {
        v_re,
        v_im,
        length,
        offset,
    }))
}

fn build_splitter(map: &mut BTreeMap<String, String>) -> Result<SystemSpec> {
    let junction_raw = take(map, "junction").unwrap_or_else(|| "griffith".to_string());
    let epsilon_raw = take(map, "epsilon");
    let junction = match junction_raw.as_str() {
        "griffith" => {
            if epsilon_raw.is_some() {
                return Err(ConfigError::Parse(
                    "`epsilon` requires `junction = buttiker`".into(),
                ));
            }
            JunctionModel::Griffith
        }
        "buttiker" => {
            let raw = epsilon_raw.ok_or_else(|| ConfigError::MissingKey {
                key: "system.epsilon".into(),
            })?;
            let epsilon = parse_number("system", "epsilon", &raw)?;
            if !(epsilon > 0.0 && epsilon <= 0.5) {
                return Err(ConfigError::OutOfRange {
                    key: "system.epsilon".into(),
                    value: raw,
                });
            }
            JunctionModel::Buttiker { epsilon }
        }
        other => {
            return Err(ConfigError::OutOfRange {
                key: "system.junction".into(),
                value: other.to_string(),
            })
        }
    };

    let mut indices: Vec<usize> = map
        .keys()
        .filter_map(|key| {
            let rest = key.strip_prefix("arm")?;
            let (digits, _) = rest.split_once('.')?;
            digits.parse().ok()
        })
        .collect();
    indices.sort_unstable();
    indices.dedup();
    let count = indices.len();
    for expected in 1..=count.max(2) {
        if !indices.contains(&expected) {
            return Err(ConfigError::MissingKey {
                key: format!("system.arm{expected}"),
            });
        }
    }

    let mut arms = Vec::with_capacity(count);
    for n in 1..=count {
        let prefix = format!("arm{n}");
        let section = format!("system.{prefix}");
        let free = match take(map, &format!("{prefix}.free")) {
            None => false,
            Some(raw) => match raw.as_str() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(ConfigError::OutOfRange {
                        key: format!("{section}.free"),
                        value: other.to_string(),
                    })
                }
            },
        };
        let v_re = take_number(map, "system", &format!("{prefix}.v_re"))?;
        let v_im = take_number(map, "system", &format!("{prefix}.v_im"))?;
        let length = take_number(map, "system", &format!("{prefix}.length"))?;
        let offset = take_number(map, "system", &format!("{prefix}.offset"))?;
        if free {
            if v_re.is_some() || v_im.is_some() || length.is_some() || offset.is_some() {
                return Err(ConfigError::Parse(format!(
                    "`{prefix}` is free but declares barrier fields"
                )));
            }
            arms.push(ArmSpec::free());
        } else {
            let v_re = v_re.ok_or_else(|| ConfigError::MissingKey {
                key: format!("{section}.v_re"),
            })?;
            let length = length.ok_or_else(|| ConfigError::MissingKey {
                key: format!("{section}.length"),
            })?;
            let barrier = BarrierSpec {
                v_re,
                v_im: check_nonnegative("system", &format!("{prefix}.v_im"), v_im.unwrap_or(0.0))?,
                length: check_nonnegative("system", &format!("{prefix}.length"), length)?,
                offset: check_nonnegative("system", &format!("{prefix}.offset"), offset.unwrap_or(0.0))?,
            };
            arms.push(ArmSpec::with_barrier(barrier));
        }
    }

    if matches!(junction, JunctionModel::Buttiker { .. }) && arms.len() != 2 {
        return Err(ConfigError::Parse(
            "the tunable junction couples exactly two arms".into(),
        ));
    }
    Ok(SystemSpec::Splitter(SplitterSpec { arms, junction }))
}

fn take_ring_barrier(
    map: &mut BTreeMap<String, String>,
    prefix: &str,
    required: bool,
) -> Result<Option<BarrierSpec>> {
    let v_re = take_number(map, "system", &format!("{prefix}.v_re"))?;
    let v_im = take_number(map, "system", &format!("{prefix}.v_im"))?;
    let length = take_number(map, "system", &format!("{prefix}.length"))?;
    if v_re.is_none() && v_im.is_none() && length.is_none() {
        if required {
            return Err(ConfigError::MissingKey {
                key: format!("system.{prefix}.v_re"),
            });
        }
        return Ok(None);
    }
    let v_re = v_re.ok_or_else(|| ConfigError::MissingKey {
        key: format!("system.{prefix}.v_re"),
    })?;
    let length = length.ok_or_else(|| ConfigError::MissingKey {
        key: format!("system.{prefix}.length"),
    })?;
    Ok(Some(BarrierSpec {
        v_re,
        v_im: check_nonnegative("system", &format!("{prefix}.v_im"), v_im.unwrap_or(0.0))?,
        length: check_nonnegative("system", &format!("{prefix}.length"), length)?,
        offset: 0.0,
    }))
}

fn build_ring(map: &mut BTreeMap<String, String>, leads: Leads) -> Result<SystemSpec> {
    let barrier1 = take_ring_barrier(map, "barrier1", true)?.expect("required group");
    let barrier2 = take_ring_barrier(map, "barrier2", leads == Leads::TwoLead)?;
    let well_length = match leads {
        Leads::OneLead => check_nonnegative(
            "system",
            "well_length",
            take_number(map, "system", "well_length")?.unwrap_or(0.0),
        )?,
        // Two-lead rings place the barriers directly between the
        // junctions; a well key would be meaningless.
        Leads::TwoLead => 0.0,
    };
    if leads == Leads::OneLead && barrier2.is_none() && well_length > 0.0 {
        return Err(ConfigError::OutOfRange {
            key: "system.well_length".into(),
            value: format!("{well_length} (a well needs barrier2 on its far side)"),
        });
    }
    let flux = take_number(map, "system", "flux")?.unwrap_or(0.0);
    Ok(SystemSpec::Ring(RingSpec {
        barrier1,
        barrier2,
        well_length,
        flux,
        leads,
    }))
}

// --- sweep path resolution ----------------------------------------------

/// What a sweep (or variant) path addresses after alias resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum SweptTarget {
    /// The incident energy itself.
    Energy,
    /// A two-lead ring swept in the ratio of energy to barrier height.
    EnergyRatio,
    /// A system parameter, as a canonical assignment path.
    Param(String),
}

fn indexed(path: &str, prefix: &str) -> Option<usize> {
    path.strip_prefix(prefix)?.parse().ok()
}

/// Resolves a path as typed (canonical or alias) against the system it
/// will be applied to.
pub fn resolve_path(path: &str, system: &SystemSpec) -> Result<SweptTarget> {
    use SweptTarget::{Energy, EnergyRatio, Param};
    if path == "energy" {
        return Ok(Energy);
    }
    let unknown = || ConfigError::UnknownKey {
        key: format!("sweep path `{path}`"),
    };
    match system {
        SystemSpec::Barrier(_) => match path {
            "v_re" | "v_im" | "length" | "offset" => Ok(Param(path.to_string())),
            "v" => Ok(Param("v_re".into())),
            "vim" => Ok(Param("v_im".into())),
            "lb" => Ok(Param("length".into())),
            "w" => Ok(Param("offset".into())),
            _ => Err(unknown()),
        },
        SystemSpec::Splitter(_) => {
            if path.starts_with("arm") || path.starts_with("junction.") {
                return Ok(Param(path.to_string()));
            }
            match path {
                "epsilon" => return Ok(Param("junction.epsilon".into())),
                "lb" => return Ok(Param("arm*.barrier.length".into())),
                "w" => return Ok(Param("arm*.barrier.offset".into())),
                _ => {}
            }
            for (prefix, field) in [
                ("lb_", "length"),
                ("w_", "offset"),
                ("v_", "v_re"),
                ("vim_", "v_im"),
            ] {
                if let Some(n) = indexed(path, prefix) {
                    return Ok(Param(format!("arm{n}.barrier.{field}")));
                }
            }
            Err(unknown())
        }
        SystemSpec::Ring(ring) => {
            if path == "E_over_V" {
                if ring.leads != Leads::TwoLead {
                    return Err(unknown());
                }
                let matched = ring
                    .barrier2
                    .as_ref()
                    .is_some_and(|b2| b2.v_re == ring.barrier1.v_re);
                if !matched {
                    return Err(ConfigError::Parse(
                        "`E_over_V` sweeps need identical barrier heights (v_1 = v_2)".into(),
                    ));
                }
                return Ok(EnergyRatio);
            }
            if path.starts_with("barrier") || path == "well_length" || path == "flux" {
                return Ok(Param(path.to_string()));
            }
            match path {
                "phi" => return Ok(Param("flux".into())),
                "w" if ring.leads == Leads::OneLead => return Ok(Param("well_length".into())),
                "L" if ring.leads == Leads::OneLead => return Ok(Param("barrier1.length".into())),
                "lb" => return Ok(Param("barrier*.length".into())),
                _ => {}
            }
            for (prefix, field) in [("lb_", "length"), ("v_", "v_re"), ("vim_", "v_im")] {
                if let Some(n) = indexed(path, prefix) {
                    return Ok(Param(format!("barrier{n}.{field}")));
                }
            }
            Err(unknown())
        }
    }
}

/// Applies `value` through `canonical` to a scratch copy, verifying the
/// assignment is accepted and leaves a valid system.
fn probe_assignment(system: &SystemSpec, typed: &str, canonical: &str, value: f64) -> Result<()> {
    let mut trial = system.clone();
    set_parameter(&mut trial, canonical, value)
        .and_then(|()| trial.validate())
        .map_err(|e| ConfigError::Parse(format!("`{typed}` cannot take value {value}: {e}")))
}

// --- observables ------------------------------------------------------

/// Parses one observable token. Tokens are also the CSV column names;
/// `tau_*` tokens accept a trailing `s` (the conventional label when a
/// sweep reads off saturated values), mapping to the same observable.
fn parse_observable(token: &str, system: &SystemSpec) -> Result<Observable> {
    let channels = system.transmission_channels();
    let numbered = matches!(system, SystemSpec::Splitter(_));
    let unknown = || ConfigError::UnknownKey {
        key: format!("output.observables: `{token}`"),
    };
    if let Some(rest) = token.strip_prefix("tau_") {
        let rest = rest.strip_suffix('s').unwrap_or(rest);
        return match rest {
            "r" => Ok(Observable::TauR),
            "t" if !numbered && channels == 1 => Ok(Observable::TauT(0)),
            _ => match rest.parse::<usize>() {
                Ok(n) if numbered && (1..=channels).contains(&n) => Ok(Observable::TauT(n - 1)),
                _ => Err(unknown()),
            },
        };
    }
    if token == "R" {
        return Ok(Observable::ReflectionProb);
    }
    if token == "T" && !numbered && channels == 1 {
        return Ok(Observable::TransmissionProb(0));
    }
    if let Some(rest) = token.strip_prefix("T_") {
        if let Ok(n) = rest.parse::<usize>() {
            if numbered && (1..=channels).contains(&n) {
                return Ok(Observable::TransmissionProb(n - 1));
            }
        }
    }
    Err(unknown())
}

// --- top-level parse ---------------------------------------------------

/// Parses a config from text.
#[cfg_attr(not(test), allow(dead_code))] // the binary always goes through the override path
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_with_overrides(text, &[])
}

/// Parses a config from text, then applies `--set` overrides before
/// validation.
pub fn parse_config_with_overrides(
    text: &str,
    overrides: &[SetOverride],
) -> Result<ExperimentConfig> {
    let mut raw = scan_sections(text)?;
    for o in overrides {
        let tag = match o.section.as_str() {
            "system" => SectionTag::System,
            "sweep" => SectionTag::Sweep,
            "output" => SectionTag::Output,
            other => {
                return Err(ConfigError::UnknownKey {
                    key: format!("{other}.{}", o.key),
                })
            }
        };
        raw.section_mut(tag).insert(o.key.clone(), o.value.clone());
    }
    build(raw)
}

fn build(mut raw: RawSections) -> Result<ExperimentConfig> {
    // [system]
    let kind_raw = take_required(&mut raw.system, "system", "kind")?;
    let kind = SystemKind::parse(&kind_raw).ok_or_else(|| ConfigError::OutOfRange {
        key: "system.kind".into(),
        value: kind_raw,
    })?;
    let energy = require_number(&mut raw.system, "system", "energy")?;
    if energy <= 0.0 {
        return Err(ConfigError::OutOfRange {
            key: "system.energy".into(),
            value: format!("{energy}"),
        });
    }
    let system = match kind {
        SystemKind::Barrier => build_barrier(&mut raw.system)?,
        SystemKind::Splitter => build_splitter(&mut raw.system)?,
        SystemKind::Ring1 => build_ring(&mut raw.system, Leads::OneLead)?,
        SystemKind::Ring2 => build_ring(&mut raw.system, Leads::TwoLead)?,
    };
    reject_leftovers(&raw.system, "system")?;
    system
        .validate()
        .map_err(|e| ConfigError::Parse(format!("invalid system: {e}")))?;

    // [output]
    let observables = match take(&mut raw.output, "observables") {
        None => Vec::new(),
        Some(raw_list) => raw_list
            .split(',')
            .map(str::trim)
            .filter(|token| !token.is_empty())
            .map(|token| {
                Ok(ObservableColumn {
                    token: token.to_string(),
                    observable: parse_observable(token, &system)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let output_file = take(&mut raw.output, "file");
    reject_leftovers(&raw.output, "output")?;

    // [sweep]
    let path = take_required(&mut raw.sweep, "sweep", "path")?;
    let start = require_number(&mut raw.sweep, "sweep", "start")?;
    let stop = require_number(&mut raw.sweep, "sweep", "stop")?;
    let step = require_number(&mut raw.sweep, "sweep", "step")?;
    if step <= 0.0 {
        return Err(ConfigError::OutOfRange {
            key: "sweep.step".into(),
            value: format!("{step}"),
        });
    }
    if stop < start {
        return Err(ConfigError::OutOfRange {
            key: "sweep.stop".into(),
            value: format!("{stop} (below start {start})"),
        });
    }
    let variant_path = take(&mut raw.sweep, "variant_path");
    let variants_raw = take(&mut raw.sweep, "variants");
    let variants: Vec<String> = match (&variant_path, variants_raw) {
        (None, None) => Vec::new(),
        (Some(_), None) => {
            return Err(ConfigError::MissingKey {
                key: "sweep.variants".into(),
            })
        }
        (None, Some(_)) => {
            return Err(ConfigError::Parse(
                "`variants` requires `variant_path`".into(),
            ))
        }
        (Some(_), Some(list)) => {
            let items: Vec<String> = list
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(str::to_string)
                .collect();
            if items.is_empty() {
                return Err(ConfigError::OutOfRange {
                    key: "sweep.variants".into(),
                    value: list,
                });
            }
            items
        }
    };
    reject_leftovers(&raw.sweep, "sweep")?;

    let target = resolve_path(&path, &system)?;
    match &target {
        SweptTarget::Param(canonical) => probe_assignment(&system, &path, canonical, start)?,
        SweptTarget::Energy => {
            if start <= 0.0 {
                return Err(ConfigError::OutOfRange {
                    key: "sweep.start".into(),
                    value: format!("{start} (energy sweeps stay positive)"),
                });
            }
        }
        SweptTarget::EnergyRatio => {
            if variant_path.is_some() {
                return Err(ConfigError::Parse(
                    "`E_over_V` sweeps cannot carry variants".into(),
                ));
            }
            if start <= 0.0 {
                return Err(ConfigError::OutOfRange {
                    key: "sweep.start".into(),
                    value: format!("{start} (the energy ratio stays positive)"),
                });
            }
        }
    }
    if let Some(vp) = &variant_path {
        let vtarget = resolve_path(vp, &system)?;
        if vtarget == SweptTarget::EnergyRatio {
            return Err(ConfigError::Parse(
                "`E_over_V` cannot be a variant path".into(),
            ));
        }
        for literal in &variants {
            let value = parse_number("sweep", "variants", literal)?;
            match &vtarget {
                SweptTarget::Energy => {
                    if value <= 0.0 {
                        return Err(ConfigError::OutOfRange {
                            key: "sweep.variants".into(),
                            value: literal.clone(),
                        });
                    }
                }
                SweptTarget::Param(canonical) => probe_assignment(&system, vp, canonical, value)?,
                SweptTarget::EnergyRatio => unreachable!("rejected above"),
            }
        }
    }

    Ok(ExperimentConfig {
        system,
        energy,
        sweep: SweepConfig {
            path,
            start,
            stop,
            step,
            variant_path,
            variants,
        },
        observables,
        output_file,
    })
}

// --- canonical emission -------------------------------------------------
//
// Emission backs the `parse_config(emit_config(c)) == c` invariant and
// is exercised by the round-trip tests; the binary itself only parses.

#[cfg_attr(not(test), allow(dead_code))]
fn push_kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(&value.to_string());
    out.push('\n');
}

#[cfg_attr(not(test), allow(dead_code))]
fn emit_barrier_fields(out: &mut String, prefix: &str, barrier: &BarrierSpec, with_offset: bool) {
    push_kv(out, &format!("{prefix}v_re"), barrier.v_re);
    push_kv(out, &format!("{prefix}v_im"), barrier.v_im);
    push_kv(out, &format!("{prefix}length"), barrier.length);
    if with_offset {
        push_kv(out, &format!("{prefix}offset"), barrier.offset);
    }
}

/// Renders a config in canonical form. `parse_config(emit_config(c))`
/// reproduces `c` exactly.
#[cfg_attr(not(test), allow(dead_code))]
pub fn emit_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    out.push_str("[system]\n");
    push_kv(&mut out, "kind", cfg.kind().name());
    push_kv(&mut out, "energy", cfg.energy);
    match &cfg.system {
        SystemSpec::Barrier(b) => emit_barrier_fields(&mut out, "", b, true),
        SystemSpec::Splitter(s) => {
            match s.junction {
                JunctionModel::Griffith => push_kv(&mut out, "junction", "griffith"),
                JunctionModel::Buttiker { epsilon } => {
                    push_kv(&mut out, "junction", "buttiker");
                    push_kv(&mut out, "epsilon", epsilon);
                }
            }
            for (i, arm) in s.arms.iter().enumerate() {
                let prefix = format!("arm{}.", i + 1);
                match &arm.barrier {
                    None => push_kv(&mut out, &format!("{prefix}free"), "true"),
                    Some(b) => emit_barrier_fields(&mut out, &prefix, b, true),
                }
            }
        }
        SystemSpec::Ring(r) => {
            emit_barrier_fields(&mut out, "barrier1.", &r.barrier1, false);
            if let Some(b2) = &r.barrier2 {
                emit_barrier_fields(&mut out, "barrier2.", b2, false);
            }
            if r.leads == Leads::OneLead {
                push_kv(&mut out, "well_length", r.well_length);
            }
            push_kv(&mut out, "flux", r.flux);
        }
    }
    out.push_str("\n[sweep]\n");
    push_kv(&mut out, "path", &cfg.sweep.path);
    push_kv(&mut out, "start", cfg.sweep.start);
    push_kv(&mut out, "stop", cfg.sweep.stop);
    push_kv(&mut out, "step", cfg.sweep.step);
    if let Some(vp) = &cfg.sweep.variant_path {
        push_kv(&mut out, "variant_path", vp);
        push_kv(&mut out, "variants", cfg.sweep.variants.join(", "));
    }
    out.push_str("\n[output]\n");
    if !cfg.observables.is_empty() {
        let tokens: Vec<&str> = cfg.observables.iter().map(|o| o.token.as_str()).collect();
        push_kv(&mut out, "observables", tokens.join(", "));
    }
    if let Some(file) = &cfg.output_file {
        push_kv(&mut out, "file", file);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn minimal_barrier(extra: &str) -> String {
        format!(
            "[system]\nkind = barrier\nenergy = 1\nv_re = 5\nlength = 1\n{extra}\n\
             [sweep]\npath = lb\nstart = 0\nstop = 20\nstep = 1\n\n[output]\nobservables = tau_t\n"
        )
    }

    #[test]
    fn minimal_barrier_config_parses() {
        let cfg = parse_config(&minimal_barrier("")).unwrap();
        assert_eq!(cfg.kind(), SystemKind::Barrier);
        assert_eq!(cfg.energy, 1.0);
        assert_eq!(cfg.sweep.path, "lb");
        assert_eq!(cfg.observables.len(), 1);
        assert_eq!(cfg.observables[0].observable, Observable::TauT(0));
    }

    #[test]
    fn every_preset_round_trips() {
        for (name, text) in presets::PRESETS {
            let parsed = parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            let emitted = emit_config(&parsed);
            let reparsed = parse_config(&emitted).unwrap_or_else(|e| panic!("{name} emit: {e}"));
            assert_eq!(parsed, reparsed, "{name} did not round-trip");
            // Emission is a fixed point: emitting the reparse is identical.
            assert_eq!(emitted, emit_config(&reparsed), "{name} emit unstable");
        }
    }

    #[test]
    fn coupling_out_of_range_is_rejected() {
        let text = "[system]\nkind = splitter\nenergy = 1\njunction = buttiker\nepsilon = 0.7\n\
                    arm1.v_re = 3\narm1.length = 1\narm2.free = true\n\n\
                    [sweep]\npath = lb_1\nstart = 1\nstop = 5\nstep = 1\n\n[output]\n";
        match parse_config(text) {
            Err(ConfigError::OutOfRange { key, value }) => {
                assert_eq!(key, "system.epsilon");
                assert_eq!(value, "0.7");
            }
            other => panic!("expected OutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn negative_length_is_rejected() {
        let text = minimal_barrier("").replace("length = 1", "length = -2");
        match parse_config(&text) {
            Err(ConfigError::OutOfRange { key, .. }) => assert_eq!(key, "system.length"),
            other => panic!("expected OutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let text = minimal_barrier("mystery = 3");
        match parse_config(&text) {
            Err(ConfigError::UnknownKey { key }) => assert_eq!(key, "system.mystery"),
            other => panic!("{other:?}"),
        }
        let text = minimal_barrier("").replace("energy = 1\n", "");
        match parse_config(&text) {
            Err(ConfigError::MissingKey { key }) => assert_eq!(key, "system.energy"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn later_assignments_override_earlier_ones() {
        let text = minimal_barrier("v_re = 9");
        let cfg = parse_config(&text).unwrap();
        match &cfg.system {
            SystemSpec::Barrier(b) => assert_eq!(b.v_re, 9.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn set_overrides_apply_before_validation() {
        let overrides = [parse_set_override("system.v_re=12").unwrap()];
        let cfg = parse_config_with_overrides(&minimal_barrier(""), &overrides).unwrap();
        match &cfg.system {
            SystemSpec::Barrier(b) => assert_eq!(b.v_re, 12.0),
            other => panic!("{other:?}"),
        }
        assert!(parse_set_override("no-section=1").is_err());
        assert!(parse_set_override("a.b").is_err());
        assert!(matches!(
            parse_set_override("elsewhere.key=1"),
            Err(ConfigError::UnknownKey { .. })
        ));
    }

    #[test]
    fn splitter_arms_must_be_contiguous() {
        let text = "[system]\nkind = splitter\nenergy = 1\narm1.v_re = 3\narm1.length = 1\n\
                    arm3.free = true\n\n[sweep]\npath = lb_1\nstart = 1\nstop = 2\nstep = 1\n\n[output]\n";
        match parse_config(text) {
            Err(ConfigError::MissingKey { key }) => assert_eq!(key, "system.arm2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_arms_reject_barrier_fields() {
        let text = "[system]\nkind = splitter\nenergy = 1\narm1.free = true\narm1.v_re = 3\n\
                    arm2.free = true\n\n[sweep]\npath = energy\nstart = 1\nstop = 2\nstep = 1\n\n[output]\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn epsilon_needs_the_tunable_junction() {
        let text = "[system]\nkind = splitter\nenergy = 1\nepsilon = 0.4\narm1.v_re = 3\n\
                    arm1.length = 1\narm2.free = true\n\n\
                    [sweep]\npath = lb_1\nstart = 1\nstop = 2\nstep = 1\n\n[output]\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn ring_well_needs_second_barrier() {
        let text = "[system]\nkind = ring1\nenergy = 1\nbarrier1.v_re = 5\nbarrier1.length = 6\n\
                    well_length = 2\n\n[sweep]\npath = phi\nstart = 0\nstop = 1\nstep = 0.5\n\n[output]\n";
        match parse_config(text) {
            Err(ConfigError::OutOfRange { key, .. }) => assert_eq!(key, "system.well_length"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_lead_rings_reject_well_keys() {
        let text = "[system]\nkind = ring2\nenergy = 1\nbarrier1.v_re = 5\nbarrier1.length = 6\n\
                    barrier2.v_re = 5\nbarrier2.length = 6\nwell_length = 1\n\n\
                    [sweep]\npath = lb\nstart = 1\nstop = 2\nstep = 1\n\n[output]\n";
        match parse_config(text) {
            Err(ConfigError::UnknownKey { key }) => assert_eq!(key, "system.well_length"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn observable_tokens_are_validated() {
        let bad = minimal_barrier("").replace("observables = tau_t", "observables = tau_3");
        assert!(matches!(parse_config(&bad), Err(ConfigError::UnknownKey { .. })));
        let saturated = minimal_barrier("").replace("observables = tau_t", "observables = tau_ts, R, T");
        let cfg = parse_config(&saturated).unwrap();
        assert_eq!(cfg.observables[0].observable, Observable::TauT(0));
        assert_eq!(cfg.observables[0].token, "tau_ts");
        assert_eq!(cfg.observables[1].observable, Observable::ReflectionProb);
        assert_eq!(cfg.observables[2].observable, Observable::TransmissionProb(0));
    }

    #[test]
    fn one_lead_rings_have_no_transmission_observable() {
        let text = "[system]\nkind = ring1\nenergy = 1\nbarrier1.v_re = 5\nbarrier1.length = 6\n\n\
                    [sweep]\npath = phi\nstart = 0\nstop = 1\nstep = 0.5\n\n[output]\nobservables = tau_t\n";
        assert!(matches!(parse_config(text), Err(ConfigError::UnknownKey { .. })));
    }

    #[test]
    fn alias_resolution_is_kind_scoped() {
        let barrier = parse_config(&minimal_barrier("")).unwrap();
        assert_eq!(
            resolve_path("lb", &barrier.system).unwrap(),
            SweptTarget::Param("length".into())
        );
        assert!(resolve_path("lb_1", &barrier.system).is_err());

        let ring = parse_config(
            "[system]\nkind = ring1\nenergy = 1\nbarrier1.v_re = 5\nbarrier1.length = 6\n\n\
             [sweep]\npath = L\nstart = 1\nstop = 2\nstep = 1\n\n[output]\nobservables = tau_r\n",
        )
        .unwrap();
        assert_eq!(
            resolve_path("L", &ring.system).unwrap(),
            SweptTarget::Param("barrier1.length".into())
        );
        assert_eq!(
            resolve_path("phi", &ring.system).unwrap(),
            SweptTarget::Param("flux".into())
        );
        assert!(resolve_path("E_over_V", &ring.system).is_err());
    }

    #[test]
    fn ratio_sweeps_need_matched_heights() {
        let text = "[system]\nkind = ring2\nenergy = 1\nbarrier1.v_re = 5\nbarrier1.length = 15\n\
                    barrier2.v_re = 4\nbarrier2.length = 15\n\n\
                    [sweep]\npath = E_over_V\nstart = 0.05\nstop = 0.9\nstep = 0.05\n\n\
                    [output]\nobservables = tau_ts\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn sweeping_an_absent_barrier_fails_early() {
        let text = "[system]\nkind = ring1\nenergy = 1\nbarrier1.v_re = 5\nbarrier1.length = 6\n\n\
                    [sweep]\npath = lb_2\nstart = 1\nstop = 2\nstep = 1\n\n[output]\nobservables = tau_r\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn variants_and_variant_path_come_together() {
        let with_path = minimal_barrier("").replace(
            "path = lb\n",
            "path = lb\nvariant_path = v_re\n",
        );
        assert!(matches!(
            parse_config(&with_path),
            Err(ConfigError::MissingKey { .. })
        ));
        let with_values = minimal_barrier("").replace(
            "path = lb\n",
            "path = lb\nvariants = 1, 2\n",
        );
        assert!(matches!(parse_config(&with_values), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# leading comment\n\n".to_string() + &minimal_barrier("# inner comment");
        assert!(parse_config(&text).is_ok());
    }

    #[test]
    fn keys_before_sections_are_rejected() {
        assert!(matches!(
            parse_config("kind = barrier\n"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            parse_config("[weird]\nkind = barrier\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
    }
}
