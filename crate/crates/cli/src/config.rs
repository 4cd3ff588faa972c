//! TOML run configuration.
//!
//! Units: N, mm, MPa. Toughness is entered in kJ/m², which equals N/mm in
//! this system, so Gc = 13 kJ/m² is written `toughness = 13.0`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use pf_fatigue::fatigue::{AccumulationRule, FatigueDegradation, FatigueParams};
use pf_fatigue::fem::{BfgsOptions, FemOptions, MeshOptions, NotchGeometry, NotchedSetup};
use pf_fatigue::homogeneous::{ControlMode, LifeOptions, DEFAULT_MAX_CYCLES};
use pf_fatigue::material::{MaterialParams, PfModel, SplitKind, DEFAULT_RESIDUAL_STIFFNESS};
use pf_fatigue::study::{preset, AmplitudeKind, Campaign, Solver};
use pf_fatigue::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub material: MaterialSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub fatigue: FatigueSection,
    pub loading: LoadingSection,
    #[serde(default)]
    pub life: LifeOptions,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notched: Option<NotchedSection>,
    #[serde(default)]
    pub output: OutputSection,
    /// Seed for randomized checks; the solvers themselves are deterministic.
    #[serde(default)]
    pub seed: u64,
    /// Free-form metadata written by `run` into the manifest; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<toml::Table>,
}

/// Either a preset name, explicit values, or a preset with overrides.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub youngs_modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toughness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_stiffness: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub phase_field: PfModel,
    pub split: SplitKind,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            phase_field: PfModel::At1,
            split: SplitKind::NoTension,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FatigueSection {
    pub alpha0: Option<f64>,
    pub n: Option<f64>,
    pub kappa: Option<f64>,
    /// Endurance stress σ_e; α_e and α_n follow from it.
    pub endurance_stress: Option<f64>,
    pub degradation: FatigueDegradation,
    pub accumulation: AccumulationRule,
}

impl Default for FatigueSection {
    fn default() -> Self {
        Self {
            alpha0: None,
            n: None,
            kappa: None,
            endurance_stress: None,
            degradation: FatigueDegradation::F2,
            accumulation: AccumulationRule::GeneralizedOnePerCycle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadingSection {
    #[serde(default = "default_control")]
    pub control: ControlMode,
    /// Whether `values` are amplitudes or peak loads.
    #[serde(default)]
    pub kind: AmplitudeKind,
    pub values: Vec<f64>,
    #[serde(default = "default_ratios")]
    pub ratios: Vec<f64>,
    #[serde(default = "default_max_cycles")]
    pub max_cycles: u64,
    #[serde(default = "default_substeps")]
    pub substeps_per_cycle: u32,
}

fn default_control() -> ControlMode {
    ControlMode::Load
}

fn default_ratios() -> Vec<f64> {
    vec![-1.0]
}

fn default_max_cycles() -> u64 {
    DEFAULT_MAX_CYCLES
}

fn default_substeps() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    #[default]
    Homogeneous,
    Notched,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub kind: SolverKind,
    pub bfgs: BfgsOptions,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotchedSection {
    /// Standard 12.7/6.35 mm bar with the root radius of this Kt (2, 3 or 5).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kt: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<NotchGeometry>,
    #[serde(default)]
    pub mesh: MeshOptions,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    /// Write a VTK snapshot every this many cycles (FEM only); 0 writes only
    /// the initiation and final states.
    pub snapshot_every: u64,
    pub verbosity: u8,
}

fn field_error(section: &str, e: Error) -> anyhow::Error {
    match e {
        Error::InvalidParameter { field, reason } => anyhow::anyhow!("invalid `{section}.{field}`: {reason}"),
        other => anyhow::anyhow!("invalid `{section}`: {other}"),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("configuration does not match the schema")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_toml_str(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "invalid `schema_version`: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            );
        }
        self.campaign().map(|_| ())
    }

    pub fn material(&self) -> Result<MaterialParams> {
        let m = &self.material;
        let base = match &m.preset {
            Some(name) => Some(preset(name).ok_or_else(|| anyhow::anyhow!("invalid `material.preset`: unknown preset `{name}`"))?),
            None => None,
        };
        let model = self.model.phase_field;
        let pick = |v: Option<f64>, from_preset: Option<f64>, field: &str| {
            v.or(from_preset)
                .ok_or_else(|| anyhow::anyhow!("missing `material.{field}` (give it or choose a preset)"))
        };
        let mat = MaterialParams {
            youngs_modulus: pick(m.youngs_modulus, base.as_ref().map(|p| p.youngs_modulus), "youngs_modulus")?,
            poisson_ratio: pick(m.poisson_ratio, base.as_ref().map(|p| p.poisson_ratio), "poisson_ratio")?,
            toughness: pick(m.toughness, base.as_ref().map(|p| p.toughness), "toughness")?,
            length_scale: pick(
                m.length_scale,
                base.as_ref().map(|p| p.material(model).length_scale),
                "length_scale",
            )?,
            residual_stiffness: m.residual_stiffness.unwrap_or(DEFAULT_RESIDUAL_STIFFNESS),
        };
        mat.validate().map_err(|e| field_error("material", e))?;
        Ok(mat)
    }

    pub fn fatigue_params(&self, mat: &MaterialParams) -> Result<FatigueParams> {
        let f = &self.fatigue;
        let base = self.material.preset.as_deref().and_then(preset);
        let pick = |v: Option<f64>, from_preset: Option<f64>, field: &str| {
            v.or(from_preset)
                .ok_or_else(|| anyhow::anyhow!("missing `fatigue.{field}` (give it or choose a preset)"))
        };
        let alpha0 = pick(f.alpha0, base.as_ref().map(|p| p.alpha0), "alpha0")?;
        let n = pick(f.n, base.as_ref().map(|p| p.n), "n")?;
        let kappa = pick(f.kappa, base.as_ref().map(|p| p.kappa), "kappa")?;
        let se = pick(f.endurance_stress, base.as_ref().map(|p| p.endurance_stress), "endurance_stress")?;
        if !(se.is_finite() && se >= 0.0) {
            bail!("invalid `fatigue.endurance_stress`: must be >= 0 (got {se})");
        }
        let mut fp = FatigueParams::for_material(mat, self.model.phase_field, alpha0, n, kappa, se, f.degradation)
            .map_err(|e| field_error("fatigue", e))?;
        fp.accumulation = f.accumulation;
        Ok(fp)
    }

    pub fn notched_setup(&self) -> Result<Option<NotchedSetup>> {
        if self.solver.kind == SolverKind::Homogeneous {
            if self.notched.is_some() {
                bail!("invalid `notched`: only allowed with `solver.kind = \"notched\"`");
            }
            return Ok(None);
        }
        let n = self
            .notched
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("missing `notched` section for the notched solver"))?;
        let geometry = match (n.kt, n.geometry) {
            (Some(kt), None) => NotchGeometry::for_kt(kt)
                .ok_or_else(|| anyhow::anyhow!("invalid `notched.kt`: expected 2, 3 or 5, got {kt}"))?,
            (None, Some(g)) => g,
            _ => bail!("invalid `notched`: give exactly one of `kt` and `geometry`"),
        };
        geometry.validate().map_err(|e| field_error("notched.geometry", e))?;
        let setup = NotchedSetup {
            geometry,
            mesh: n.mesh,
            fem: FemOptions {
                life: self.life,
                solver: self.solver.bfgs,
            },
        };
        setup.validate().map_err(|e| field_error("solver.bfgs", e))?;
        Ok(Some(setup))
    }

    pub fn campaign(&self) -> Result<Campaign> {
        let material = self.material()?;
        let fatigue = self.fatigue_params(&material)?;
        let solver = match self.notched_setup()? {
            Some(setup) => Solver::Notched(setup),
            None => Solver::Homogeneous,
        };
        let l = &self.loading;
        if let Some(v) = l.values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            bail!("invalid `loading.values`: entries must be > 0 (got {v})");
        }
        if let Some(r) = l.ratios.iter().find(|r| !(r.is_finite() && **r < 1.0)) {
            bail!("invalid `loading.ratios`: entries must be < 1 (got {r})");
        }
        if l.max_cycles == 0 {
            bail!("invalid `loading.max_cycles`: must be >= 1");
        }
        if l.substeps_per_cycle == 0 {
            bail!("invalid `loading.substeps_per_cycle`: must be >= 1");
        }
        let material_name = self
            .material
            .name
            .clone()
            .or_else(|| self.material.preset.clone())
            .unwrap_or_else(|| "custom".into());
        let campaign = Campaign {
            material_name,
            material,
            model: self.model.phase_field,
            split: self.model.split,
            fatigue,
            control: l.control,
            amplitude_kind: l.kind,
            amplitudes: l.values.clone(),
            ratios: l.ratios.clone(),
            max_cycles: l.max_cycles,
            substeps_per_cycle: l.substeps_per_cycle,
            options: self.life,
            solver,
        };
        campaign.validate().map_err(|e| field_error("loading", e))?;
        Ok(campaign)
    }
}
