//! Run configuration: a JSON document, optionally patched by `key=value`
//! overrides, validated in full before any computation starts.

use std::path::{Path, PathBuf};

use kwc_core::model::{Domain, Domain1D, DomainRadial, MaterialLaws};
use kwc_core::regnorm::{NormKind, RegularizedNorm};
use kwc_core::steady1d::EndCondition;
use kwc_core::stepper::StepConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Mode {
    Simulate1d,
    SimulateRadial,
    Steady1d,
    SteadyRadial,
    ScanFigure1,
    ScanFigure2,
    ScanFigure3,
    ScanFigure4,
}

impl Mode {
    pub fn is_radial(self) -> bool {
        matches!(self, Mode::SimulateRadial | Mode::SteadyRadial)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Prefix of every output file; defaults to the config file stem.
    #[serde(default)]
    pub name: Option<String>,
    /// Output directory; not part of the config hash.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub plots: bool,
    #[serde(default)]
    pub laws: LawsConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub stepper: StepperConfig,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub steady1d: Steady1dConfig,
    #[serde(default)]
    pub steady_radial: SteadyRadialConfig,
    #[serde(default)]
    pub figure1: Figure1Config,
    #[serde(default)]
    pub figure2: Figure2Config,
    #[serde(default)]
    pub two_jump: TwoJumpConfig,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct LawsConfig {
    pub delta0: f64,
}

impl Default for LawsConfig {
    fn default() -> Self {
        Self { delta0: 1e-3 }
    }
}

/// `gamma` holds the orientation data at `(0, 1)` or `(r₀, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct DomainConfig {
    pub gamma: [f64; 2],
    pub r0: f64,
    pub r_outer: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { gamma: [0.0, 1.0], r0: 1.0, r_outer: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct StepperConfig {
    pub h: f64,
    pub nu: f64,
    pub norm_kind: NormKind,
    pub n: usize,
    pub max_steps: usize,
    pub steady_tolerance: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub snapshot_stride: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        let d = StepConfig::default();
        Self {
            h: d.h,
            nu: d.norm.nu,
            norm_kind: d.norm.kind,
            n: 129,
            max_steps: d.max_steps,
            steady_tolerance: d.steady_tolerance,
            newton_tol: d.newton_tol,
            newton_max_iter: d.newton_max_iter,
            snapshot_stride: d.snapshot_stride,
        }
    }
}

impl StepperConfig {
    pub fn step_config(&self) -> StepConfig {
        StepConfig {
            h: self.h,
            norm: RegularizedNorm::new(self.norm_kind, self.nu),
            max_steps: self.max_steps,
            steady_tolerance: self.steady_tolerance,
            newton_tol: self.newton_tol,
            newton_max_iter: self.newton_max_iter,
            snapshot_stride: self.snapshot_stride,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum InitialData {
    /// `η` uniform on `[0, 1]`, `θ` uniform on `[−|γ|∞, |γ|∞]`, seeded.
    #[default]
    Random,
    /// Constant fields; `theta` defaults to the left/inner datum.
    Uniform { eta: f64, theta: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct Steady1dConfig {
    pub intervals: Vec<[f64; 2]>,
    pub left: EndCondition,
    pub right: EndCondition,
}

impl Default for Steady1dConfig {
    fn default() -> Self {
        Self { intervals: vec![[0.3, 0.6]], left: EndCondition::Atom, right: EndCondition::Atom }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct SteadyRadialConfig {
    pub jump_radii: Vec<f64>,
    /// One level per band; `null` marks the free middle level of a two-jump state.
    pub theta_levels: Vec<Option<f64>>,
    pub samples: usize,
    #[serde(default)]
    pub cross_validate: Option<CrossValidateConfig>,
}

impl Default for SteadyRadialConfig {
    fn default() -> Self {
        Self { jump_radii: vec![1.0], theta_levels: vec![Some(1.0)], samples: 513, cross_validate: None }
    }
}

/// Dynamics run from a perturbed analytic state; stepper settings come from `stepper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CrossValidateConfig {
    pub n: usize,
    pub amplitude: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 })
            .collect()
    }

    fn validate(&self, what: &str) -> Result<(), AppError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max && self.count >= 1) {
            return Err(AppError::Validation(format!(
                "{what}: need finite min <= max and count >= 1, got {:?}",
                self
            )));
        }
        if self.count > 1 && self.min == self.max {
            return Err(AppError::Validation(format!("{what}: count > 1 needs min < max")));
        }
        Ok(())
    }
}

/// Outer-jump existence scan: `f(r₀, R)` against `R` for each `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct Figure1Config {
    pub r0: f64,
    pub gammas: Vec<f64>,
    pub r_max: f64,
    pub points: usize,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self { r0: 1.0, gammas: vec![0.5, 0.9, 1.0, 2.0], r_max: 10.0, points: 1000 }
    }
}

/// Interior-jump map of `G` over `(r₁, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct Figure2Config {
    pub r0: f64,
    pub gamma: f64,
    pub r1: Range,
    pub r_outer: Range,
}

impl Default for Figure2Config {
    fn default() -> Self {
        Self {
            r0: 1.0,
            gamma: 2.0,
            r1: Range { min: 1.01, max: 20.0, count: 100 },
            r_outer: Range { min: 1.01, max: 30.0, count: 100 },
        }
    }
}

/// Two-jump conditions against `γ(R)`; `radii = [r₀, r₁, r₂, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct TwoJumpConfig {
    pub radii: Option<[f64; 4]>,
    pub gamma: Range,
}

impl Default for TwoJumpConfig {
    fn default() -> Self {
        Self { radii: None, gamma: Range { min: 0.0, max: 10.0, count: 401 } }
    }
}

impl TwoJumpConfig {
    pub fn radii_for(&self, mode: Mode) -> [f64; 4] {
        self.radii.unwrap_or(match mode {
            Mode::ScanFigure3 => [0.5, 1.0, 9.0, 10.0],
            _ => [1.0, 2.5, 9.0, 10.0],
        })
    }
}

/// Applies `a.b.c=value`; the value is parsed as JSON and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), AppError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| AppError::Validation(format!("override `{assignment}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(AppError::Validation(format!("override key `{key}` has an empty segment")));
        }
        let map = node
            .as_object_mut()
            .ok_or_else(|| AppError::Validation(format!("override `{key}`: `{part}` is below a non-object")))?;
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split always yields at least one segment")
}

impl RunConfig {
    /// Reads `path`, applies the overrides in order and validates.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut doc: Value =
            serde_json::from_str(&text).map_err(|e| AppError::Validation(format!("config is not valid JSON: {e}")))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let mut cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| AppError::Validation(format!("config schema: {e}")))?;
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("run")
    }

    /// SHA-256 of the canonical JSON with the output directory removed.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn material_laws(&self) -> Result<MaterialLaws, AppError> {
        Ok(MaterialLaws::new(self.laws.delta0)?)
    }

    pub fn domain(&self) -> Result<Domain, AppError> {
        let [g0, g1] = self.domain.gamma;
        Ok(if self.mode.is_radial() {
            Domain::Radial(DomainRadial::new(self.domain.r0, self.domain.r_outer, g0, g1)?)
        } else {
            Domain::Interval(Domain1D::new(g0, g1)?)
        })
    }

    pub fn validate(&self) -> Result<(), AppError> {
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(AppError::Validation(format!("name `{name}` must be a plain file stem")));
            }
        }
        let laws = self.material_laws()?;
        match self.mode {
            Mode::Simulate1d | Mode::SimulateRadial => {
                self.domain()?;
                self.validate_stepper(&laws)?;
                if let InitialData::Uniform { eta, theta } = self.initial {
                    if !(0.0..=1.0).contains(&eta) {
                        return Err(AppError::Validation(format!("initial eta = {eta} must lie in [0, 1]")));
                    }
                    if theta.is_some_and(|t| !t.is_finite()) {
                        return Err(AppError::Validation("initial theta must be finite".into()));
                    }
                }
            }
            Mode::Steady1d => {
                self.domain()?;
                if self.stepper.n < 3 {
                    return Err(AppError::Validation("stepper.n must be at least 3".into()));
                }
            }
            Mode::SteadyRadial => {
                self.domain()?;
                let s = &self.steady_radial;
                if s.samples < 2 {
                    return Err(AppError::Validation("steadyRadial.samples must be at least 2".into()));
                }
                if let Some(cv) = s.cross_validate {
                    self.validate_stepper(&laws)?;
                    if cv.n < 3 || cv.amplitude.is_nan() || cv.amplitude < 0.0 || cv.tolerance.is_nan() || cv.tolerance <= 0.0 {
                        return Err(AppError::Validation(format!("crossValidate out of range: {cv:?}")));
                    }
                }
            }
            Mode::ScanFigure1 => {
                let f = &self.figure1;
                if !(f.r0 > 0.0 && f.r_max > f.r0 && f.points >= 2 && !f.gammas.is_empty()) {
                    return Err(AppError::Validation(format!("figure1: need r0 > 0, rMax > r0, points >= 2, gammas nonempty; got {f:?}")));
                }
                if f.gammas.iter().any(|g| !g.is_finite()) {
                    return Err(AppError::Validation("figure1: gammas must be finite".into()));
                }
            }
            Mode::ScanFigure2 => {
                let f = &self.figure2;
                f.r1.validate("figure2.r1")?;
                f.r_outer.validate("figure2.rOuter")?;
                if !(f.r0 > 0.0 && f.gamma.is_finite() && f.r1.min > 0.0 && f.r_outer.min > 0.0) {
                    return Err(AppError::Validation(format!("figure2: radii must be positive, gamma finite; got {f:?}")));
                }
            }
            Mode::ScanFigure3 | Mode::ScanFigure4 => {
                let t = &self.two_jump;
                t.gamma.validate("twoJump.gamma")?;
                let [r0, r1, r2, r] = t.radii_for(self.mode);
                if !(r0 > 0.0 && r1 >= r0 && r2 > r1 && r >= r2) {
                    return Err(AppError::Validation(format!(
                        "twoJump.radii: need 0 < r0 <= r1 < r2 <= R, got {:?}",
                        [r0, r1, r2, r]
                    )));
                }
            }
        }
        Ok(())
    }

    fn validate_stepper(&self, laws: &MaterialLaws) -> Result<(), AppError> {
        if self.stepper.n < 3 {
            return Err(AppError::Validation("stepper.n must be at least 3".into()));
        }
        if self.stepper.max_steps == 0 {
            return Err(AppError::Validation("stepper.maxSteps must be at least 1".into()));
        }
        self.stepper.step_config().validate(laws)?;
        Ok(())
    }
}
