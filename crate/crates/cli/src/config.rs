//! Experiment configuration: TOML schema, validation, and construction of
//! the source density and target measure.

use serde::{Deserialize, Serialize};

use sdot_core::annealing::EpsSchedule;
use sdot_core::measures::{random_points_1d, BuiltinDensity, DiscreteTarget, SourceDensity};
use sdot_core::quadrature::QuadratureSettings;
use sdot_core::solver::NewtonSettings;

use crate::CliError;

pub type Density = SourceDensity<f64, 1>;
pub type Target = DiscreteTarget<f64, 1>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrink: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomTargetSection {
    pub n: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomTargetSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub eps_min: f64,
    pub eps_max: f64,
    pub points_per_decade: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub eps_start: f64,
    pub factor: f64,
    pub eps_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_tol_factor: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub eps: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = NewtonSettings::default();
        Self {
            tol: d.tol,
            max_iterations: d.max_iterations,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub order: usize,
    pub panels_per_axis: usize,
    pub kappa: f64,
    pub entropy_threshold: f64,
    pub max_depth: usize,
    pub grading_min_width: f64,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let d = QuadratureSettings::default();
        Self {
            order: d.order,
            panels_per_axis: d.panels_per_axis,
            kappa: d.kappa,
            entropy_threshold: d.entropy_threshold,
            max_depth: d.max_depth,
            grading_min_width: d.grading_min_width,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSection {
    pub eps: f64,
    pub sinkhorn_atoms: usize,
    pub random_directions: usize,
}

impl Default for CheckSection {
    fn default() -> Self {
        Self {
            eps: 0.5,
            sinkhorn_atoms: 1024,
            random_directions: 20,
        }
    }
}

/// Hooks for negative controls and planted data in tests.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestHooksSection {
    /// Perturbs the solved potential before the verification suite runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrupt_potential: Option<f64>,
    /// Replaces sweep values by eps^p.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_power: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: SourceSection,
    #[serde(default)]
    pub target: TargetSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSection>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub check: CheckSection,
    #[serde(default)]
    pub test_hooks: TestHooksSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
    }

    pub fn newton_settings(&self) -> NewtonSettings {
        NewtonSettings {
            tol: self.solver.tol,
            max_iterations: self.solver.max_iterations,
            ..NewtonSettings::default()
        }
    }

    pub fn quadrature_settings(&self) -> QuadratureSettings {
        QuadratureSettings {
            order: self.quadrature.order,
            panels_per_axis: self.quadrature.panels_per_axis,
            kappa: self.quadrature.kappa,
            entropy_threshold: self.quadrature.entropy_threshold,
            max_depth: self.quadrature.max_depth,
            grading_min_width: self.quadrature.grading_min_width,
        }
    }

    pub fn build_density(&self) -> Result<Density, CliError> {
        let s = &self.source;
        let family = match s.name.as_str() {
            "lebesgue" => BuiltinDensity::Lebesgue,
            "gaussian" => BuiltinDensity::Gaussian {
                sigma: s.sigma.unwrap_or(1.0),
            },
            "laplace" => BuiltinDensity::Laplace,
            "holder" => BuiltinDensity::Holder {
                alpha: s.alpha.unwrap_or(0.5),
            },
            "" => {
                return Err(CliError::Config(
                    "missing density name in [source]".into(),
                ))
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown density name {other:?} in [source] \
                     (expected lebesgue | gaussian | laplace | holder)"
                )))
            }
        };
        SourceDensity::builtin(family, s.shrink)
            .map_err(|e| CliError::Config(format!("invalid source: {e}")))
    }

    /// Builds the target; `seed_override` replaces the seed of a random
    /// target and is rejected for explicit targets.
    pub fn build_target(
        &self,
        rho: &Density,
        seed_override: Option<u64>,
    ) -> Result<Target, CliError> {
        let t = &self.target;
        match (&t.points, &t.random) {
            (Some(points), None) => {
                if seed_override.is_some() {
                    return Err(CliError::Config(
                        "--seed only applies to random targets".into(),
                    ));
                }
                let n = points.len();
                let weights = match &t.weights {
                    Some(w) => w.clone(),
                    None => vec![1.0 / n as f64; n],
                };
                DiscreteTarget::new(points.iter().map(|p| [*p]).collect(), weights)
                    .map_err(|e| CliError::Config(format!("invalid target: {e}")))
            }
            (None, Some(random)) => {
                if t.weights.is_some() {
                    return Err(CliError::Config(
                        "random targets carry uniform weights; drop target.weights".into(),
                    ));
                }
                let seed = seed_override.unwrap_or(random.seed);
                let lo = rho.domain().lo[0];
                let hi = rho.domain().hi[0];
                // minimum separation: five percent of the domain diameter
                let min_sep = 0.05 * (hi - lo);
                let pts = random_points_1d(lo, hi, random.n, min_sep, seed)
                    .map_err(|e| CliError::Config(format!("random target: {e}")))?;
                DiscreteTarget::new(
                    pts.into_iter().map(|p| [p]).collect(),
                    vec![1.0 / random.n as f64; random.n],
                )
                .map_err(|e| CliError::Config(format!("invalid target: {e}")))
            }
            (Some(_), Some(_)) => Err(CliError::Config(
                "target must be either explicit points or random, not both".into(),
            )),
            (None, None) => Err(CliError::Config(
                "missing target: set target.points or [target.random]".into(),
            )),
        }
    }

    pub fn grid_points(&self) -> Result<Vec<f64>, CliError> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [grid] section".into()))?;
        if !(g.eps_min > 0.0 && g.eps_max > g.eps_min) {
            return Err(CliError::Config(
                "grid needs 0 < eps_min < eps_max".into(),
            ));
        }
        if g.points_per_decade == 0 {
            return Err(CliError::Config("grid.points_per_decade must be >= 1".into()));
        }
        let decades = (g.eps_max / g.eps_min).log10();
        let n = (decades * g.points_per_decade as f64).round() as usize + 1;
        // descending order: sweeps warm-start from large regularization
        Ok((0..n)
            .map(|k| 10f64.powf(g.eps_max.log10() - decades * k as f64 / (n - 1) as f64))
            .collect())
    }

    pub fn schedule(&self) -> Result<(EpsSchedule, Option<f64>), CliError> {
        let s = self
            .schedule
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [schedule] section".into()))?;
        let sched = EpsSchedule::new(s.eps_start, s.factor, s.eps_final)
            .map_err(|e| CliError::Config(format!("invalid schedule: {e}")))?;
        Ok((sched, s.level_tol_factor))
    }
}

/// Quantities a sweep can emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    PsiDotNorm,
    PsiGapToZeroEps,
    CostGapResidual,
}

impl Quantity {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "psi_dot_norm" => Ok(Self::PsiDotNorm),
            "psi_gap_to_zero_eps" => Ok(Self::PsiGapToZeroEps),
            "cost_gap_residual" => Ok(Self::CostGapResidual),
            other => Err(CliError::Config(format!(
                "unknown quantity {other:?} (expected psi_dot_norm | \
                 psi_gap_to_zero_eps | cost_gap_residual)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PsiDotNorm => "psi_dot_norm",
            Self::PsiGapToZeroEps => "psi_gap_to_zero_eps",
            Self::CostGapResidual => "cost_gap_residual",
        }
    }
}
