//! JSON run configurations.

use crate::correlation::{BuildMode, SteadyState};
use crate::error::{Error, Result};
use crate::measures::{MeasureKind, MeasureSpec};
use crate::physics::{LatticeParams, ReservoirPair, ScatteringModel, TabulatedScatterer};
use crate::quadrature::QuadratureSpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Impurity scattering model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    ResonantLevel { eps0: f64 },
    ConstantTransmission { transmission: f64 },
    /// CSV of `k, Re t_L, Im t_L, Re r_L, Im r_L, Re t_R, Im t_R, Re r_R, Im r_R`;
    /// relative paths are resolved against the configuration file.
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirConfig {
    pub mu_left: f64,
    pub temp_left: f64,
    pub mu_right: f64,
    pub temp_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub ell_left: i64,
    pub ell_right: i64,
    /// Distance of the nearer interval from the impurity. Absent means the
    /// long-range limit; present switches the numeric pipeline to exact
    /// finite-distance matrices.
    #[serde(default)]
    pub d_min: Option<i64>,
}

/// Which bias a bias sweep varies. The left reservoir is moved, the right
/// one stays at its configured value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasParameter {
    /// `ΔT = T_L − T_R`
    DeltaT,
    /// `Δμ = μ_L − μ_R`
    DeltaMu,
}

impl BiasParameter {
    pub fn column(&self) -> &'static str {
        match self {
            Self::DeltaT => "delta_t",
            Self::DeltaMu => "delta_mu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepConfig {
    /// Vary `d_L − d_R` over `start, start + step, …, ≤ stop`.
    Distance { start: i64, stop: i64, step: i64 },
    /// Vary a bias at fixed `d_L − d_R`.
    Bias {
        parameter: BiasParameter,
        start: f64,
        stop: f64,
        step: f64,
        delta_d: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub kind: String,
    #[serde(default)]
    pub n: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineChoice {
    Numeric,
    Analytic,
    #[default]
    Both,
}

impl PipelineChoice {
    pub fn numeric(&self) -> bool {
        matches!(self, Self::Numeric | Self::Both)
    }

    pub fn analytic(&self) -> bool {
        matches!(self, Self::Analytic | Self::Both)
    }
}

impl std::str::FromStr for PipelineChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(Self::Numeric),
            "analytic" => Ok(Self::Analytic),
            "both" => Ok(Self::Both),
            other => Err(Error::Config(format!("unknown pipeline `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_depth")]
    pub max_depth: u32,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_depth() -> u32 {
    24
}

fn default_hopping() -> f64 {
    1.0
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: default_tol(),
            max_depth: default_depth(),
        }
    }
}

/// One sweep: model, reservoirs, geometry, measures and output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    #[serde(default = "default_hopping")]
    pub hopping: f64,
    #[serde(default)]
    pub impurity_halfwidth: i64,
    pub model: ModelConfig,
    pub reservoirs: ReservoirConfig,
    pub geometry: GeometryConfig,
    pub sweep: SweepConfig,
    pub measures: Vec<MeasureConfig>,
    #[serde(default)]
    pub pipeline: PipelineChoice,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Several runs that together make up one figure panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    pub figure: String,
    pub description: String,
    pub runs: Vec<RunConfig>,
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    /// Parses and validates; relative model paths are resolved against `base`.
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: Self = serde_json::from_str(text)?;
        if let (ModelConfig::Tabulated { path }, Some(base)) = (&mut cfg.model, base) {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Config("run name must not be empty".into()));
        }
        let g = &self.geometry;
        if g.ell_left < 1 || g.ell_right < 1 {
            return Err(Error::Config("interval lengths must be at least 1".into()));
        }
        if matches!(g.d_min, Some(d) if d < 0) {
            return Err(Error::Config("d_min must be non-negative".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::Config("at least one measure is required".into()));
        }
        self.measure_specs()?;
        if self.sweep_values().is_empty() {
            return Err(Error::Config("sweep range is empty".into()));
        }
        if !(self.quadrature.abs_tol > 0.0) {
            return Err(Error::Config("quadrature tolerance must be positive".into()));
        }
        LatticeParams::new(self.hopping, self.impurity_halfwidth).map_err(config_err)?;
        // every reservoir setting the sweep visits must be valid
        for v in self.sweep_values() {
            self.reservoirs_at(v).map_err(config_err)?;
        }
        Ok(())
    }

    /// Sweep variable values in row order.
    pub fn sweep_values(&self) -> Vec<f64> {
        match self.sweep {
            SweepConfig::Distance { start, stop, step } => {
                if step <= 0 || stop < start {
                    return Vec::new();
                }
                (start..=stop).step_by(step as usize).map(|d| d as f64).collect()
            }
            SweepConfig::Bias { start, stop, step, .. } => {
                if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                    return Vec::new();
                }
                // integer stepping avoids accumulating rounding in the grid
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|i| start + step * i as f64).collect()
            }
        }
    }

    pub fn measure_specs(&self) -> Result<Vec<MeasureSpec<f64>>> {
        let specs: Vec<MeasureSpec<f64>> = self
            .measures
            .iter()
            .map(|m| {
                let kind = MeasureKind::from_slug(&m.kind)
                    .ok_or_else(|| Error::Config(format!("unknown measure `{}`", m.kind)))?;
                MeasureSpec::new(kind, m.n).map_err(config_err)
            })
            .collect::<Result<_>>()?;
        let mut labels: Vec<String> = specs.iter().map(|s| s.label()).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != specs.len() {
            return Err(Error::Config("duplicate measure".into()));
        }
        Ok(specs)
    }

    /// Reservoirs for one sweep value (unchanged for distance sweeps).
    pub fn reservoirs_at(&self, value: f64) -> Result<ReservoirPair<f64>> {
        let r = &self.reservoirs;
        let (mut mu_l, mut t_l) = (r.mu_left, r.temp_left);
        if let SweepConfig::Bias { parameter, .. } = self.sweep {
            match parameter {
                BiasParameter::DeltaT => t_l = r.temp_right + value,
                BiasParameter::DeltaMu => mu_l = r.mu_right + value,
            }
        }
        ReservoirPair::new(mu_l, t_l, r.mu_right, r.temp_right)
    }

    pub fn lattice(&self) -> Result<LatticeParams<f64>> {
        LatticeParams::new(self.hopping, self.impurity_halfwidth)
    }

    pub fn scattering_model(&self) -> Result<ScatteringModel<f64>> {
        let params = self.lattice()?;
        match &self.model {
            ModelConfig::ResonantLevel { eps0 } => ScatteringModel::resonant_level(*eps0, &params),
            ModelConfig::ConstantTransmission { transmission } => ScatteringModel::constant_transmission(*transmission),
            ModelConfig::Tabulated { path } => {
                let file = std::fs::File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                ScatteringModel::new(TabulatedScatterer::from_csv(file)?)
            }
        }
    }

    pub fn state_at(&self, value: f64, model: &ScatteringModel<f64>) -> Result<SteadyState<f64>> {
        Ok(SteadyState::new(self.lattice()?, self.reservoirs_at(value)?, model.clone()))
    }

    pub fn quadrature_spec(&self) -> Result<QuadratureSpec<f64>> {
        QuadratureSpec::new(self.quadrature.abs_tol, self.quadrature.max_depth)
    }

    pub fn build_mode(&self) -> BuildMode {
        match self.geometry.d_min {
            Some(_) => BuildMode::Exact,
            None => BuildMode::LongRange,
        }
    }

    /// Label of the leading column of a bias sweep.
    pub fn bias_column(&self) -> Option<&'static str> {
        match self.sweep {
            SweepConfig::Bias { parameter, .. } => Some(parameter.column()),
            SweepConfig::Distance { .. } => None,
        }
    }
}

impl FigureConfig {
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut fig: Self = serde_json::from_str(text)?;
        if fig.runs.is_empty() {
            return Err(Error::Config(format!("figure {} has no runs", fig.figure)));
        }
        for run in &mut fig.runs {
            if let (ModelConfig::Tabulated { path }, Some(base)) = (&mut run.model, base) {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
            run.validate()?;
        }
        Ok(fig)
    }
}
