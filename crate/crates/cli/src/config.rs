//! Run configuration: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use hybrid_nls::analysis::{Axis, SweepMode};
use hybrid_nls::grid::{LineGrid, LineSymmetry, RadialGrading, RadialGrid};
use hybrid_nls::solver::{Initialization, Nonlinearity, RunawayThresholds, Suppress};
use hybrid_nls::{Grids64, Params64, SolveConfig64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seed of the randomized checks.
    pub seed: u32,
    pub params: ParamsConfig,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub sweep: SweepConfig,
    pub thresholds: ThresholdConfig,
    pub verify: VerifyConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
    pub p: f64,
    pub r: f64,
    pub mu: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            sigma: 0.0,
            beta: 0.0,
            p: 4.0,
            r: 3.0,
            mu: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Even,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_length: f64,
    /// Nodes on `[0, L]`.
    pub n_line: usize,
    pub symmetry: Symmetry,
    /// Decay rate of fixed exponential tails at the line ends; 0 leaves
    /// the choice to the solver.
    pub exterior_rate: f64,
    pub radius: f64,
    /// Uniform cells of the radial mesh.
    pub n_radial: usize,
    pub first_edge: f64,
    pub ratio: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = RadialGrading::<f64>::default();
        Self {
            half_length: 20.0,
            n_line: 2001,
            symmetry: Symmetry::Even,
            exterior_rate: 0.0,
            radius: 20.0,
            n_radial: 1000,
            first_edge: g.first_edge,
            ratio: g.ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitConfig {
    GaussianBump,
    LinearGroundState,
    SolitonSeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuppressConfig {
    None,
    Plane,
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityConfig {
    Full,
    LinearOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunawayConfig {
    pub boundary_fraction: f64,
    pub centroid_fraction: f64,
    pub patience: usize,
    pub energy_above: f64,
    pub energy_below: f64,
}

impl Default for RunawayConfig {
    fn default() -> Self {
        let r = RunawayThresholds::<f64>::default();
        Self {
            boundary_fraction: r.boundary_fraction,
            centroid_fraction: r.centroid_fraction,
            patience: r.patience,
            energy_above: r.energy_above,
            energy_below: r.energy_below,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub initial_step: f64,
    pub backtracking: f64,
    pub tolerance: f64,
    pub energy_tolerance: f64,
    pub init: InitConfig,
    pub suppress: SuppressConfig,
    pub nonlinearity: NonlinearityConfig,
    pub seed_offset: f64,
    pub conjugate: bool,
    pub adapt_exterior: bool,
    pub runaway: RunawayConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolveConfig64::default();
        Self {
            max_iterations: s.max_iterations,
            initial_step: s.initial_step,
            backtracking: s.backtracking,
            tolerance: s.tolerance,
            energy_tolerance: s.energy_tolerance,
            init: InitConfig::GaussianBump,
            suppress: SuppressConfig::None,
            nonlinearity: NonlinearityConfig::Full,
            seed_offset: s.seed_offset,
            conjugate: s.conjugate,
            adapt_exterior: s.adapt_exterior,
            runaway: RunawayConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    Continuation,
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// One of `alpha`, `sigma`, `beta`, `mu`.
    pub axis: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub mode: ModeConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: "beta".into(),
            start: 0.0,
            stop: 5.0,
            steps: 21,
            mode: ModeConfig::Continuation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    pub sigma_bracket: [f64; 2],
    pub beta_bracket: [f64; 2],
    pub mu_bracket: [f64; 2],
    pub tolerance: f64,
    pub sigma: bool,
    pub beta: bool,
    pub mu: bool,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            sigma_bracket: [-1.0, 1.0],
            beta_bracket: [0.0, 5.0],
            mu_bracket: [0.1, 20.0],
            tolerance: 1e-6,
            sigma: true,
            beta: true,
            mu: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub e2q_tolerance: f64,
    /// Uniform radial cells of the identity grid.
    pub e2q_cells: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            e2q_tolerance: 1e-6,
            e2q_cells: 16_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u32>,
    pub out: Option<PathBuf>,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub mu: Option<f64>,
}

/// Library types built from a checked configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: Params64,
    pub grids: Grids64,
    pub solve: SolveConfig64,
    pub axis: Axis,
    pub mode: SweepMode,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow!("cannot parse config: {e}"))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("cannot serialize config")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        let p = &mut self.params;
        let pairs = [
            (&mut p.alpha, o.alpha),
            (&mut p.sigma, o.sigma),
            (&mut p.beta, o.beta),
            (&mut p.p, o.p),
            (&mut p.r, o.r),
            (&mut p.mu, o.mu),
        ];
        for (slot, value) in pairs {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(dir) = &o.out {
            self.output.dir = dir.clone();
        }
    }

    /// Checks every numeric constraint and builds the library types.
    pub fn resolve(&self) -> Result<Resolved> {
        let p = &self.params;
        let params = Params64::new(p.alpha, p.sigma, p.beta, p.p, p.r, p.mu)
            .map_err(|e| anyhow!("[params] {e}"))?;

        let g = &self.grid;
        let symmetry = match g.symmetry {
            Symmetry::Even => LineSymmetry::Even,
            Symmetry::Full => LineSymmetry::Full,
        };
        let line = LineGrid::new(g.half_length, g.n_line, symmetry)
            .and_then(|l| l.with_exterior_rate(g.exterior_rate))
            .map_err(|e| anyhow!("[grid] {e}"))?;
        let grading = RadialGrading {
            first_edge: g.first_edge,
            ratio: g.ratio,
        };
        let radial = RadialGrid::new(g.radius, g.n_radial, grading).map_err(|e| anyhow!("[grid] {e}"))?;

        let s = &self.solver;
        let solve = SolveConfig64 {
            max_iterations: s.max_iterations,
            initial_step: s.initial_step,
            backtracking: s.backtracking,
            tolerance: s.tolerance,
            energy_tolerance: s.energy_tolerance,
            runaway: RunawayThresholds {
                boundary_fraction: s.runaway.boundary_fraction,
                centroid_fraction: s.runaway.centroid_fraction,
                patience: s.runaway.patience,
                energy_above: s.runaway.energy_above,
                energy_below: s.runaway.energy_below,
            },
            init: match s.init {
                InitConfig::GaussianBump => Initialization::GaussianBump,
                InitConfig::LinearGroundState => Initialization::LinearGroundState,
                InitConfig::SolitonSeed => Initialization::SolitonSeed,
            },
            nonlinearity: match s.nonlinearity {
                NonlinearityConfig::Full => Nonlinearity::Full,
                NonlinearityConfig::LinearOnly => Nonlinearity::LinearOnly,
            },
            suppress: match s.suppress {
                SuppressConfig::None => Suppress::None,
                SuppressConfig::Plane => Suppress::Plane,
                SuppressConfig::Line => Suppress::Line,
            },
            seed_offset: s.seed_offset,
            conjugate: s.conjugate,
            record_history: true,
            adapt_exterior: s.adapt_exterior,
        };
        solve.validate().map_err(|e| anyhow!("[solver] {e}"))?;

        let w = &self.sweep;
        let axis: Axis = w.axis.parse().map_err(|e| anyhow!("[sweep] {e}"))?;
        if w.steps < 2 {
            return Err(anyhow!("[sweep] steps must be at least 2 (got {})", w.steps));
        }
        if !(w.start < w.stop) || !w.start.is_finite() || !w.stop.is_finite() {
            return Err(anyhow!(
                "[sweep] range must satisfy start < stop (got {} to {})",
                w.start,
                w.stop
            ));
        }
        let mode = match w.mode {
            ModeConfig::Continuation => SweepMode::Continuation,
            ModeConfig::Independent => SweepMode::Independent,
        };

        let t = &self.thresholds;
        for (name, [lo, hi]) in [
            ("sigma_bracket", t.sigma_bracket),
            ("beta_bracket", t.beta_bracket),
            ("mu_bracket", t.mu_bracket),
        ] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(anyhow!("[thresholds] {name} must satisfy lo < hi (got [{lo}, {hi}])"));
            }
        }
        if !(t.tolerance > 0.0) {
            return Err(anyhow!("[thresholds] tolerance must be positive"));
        }
        if !(self.verify.e2q_tolerance > 0.0) || self.verify.e2q_cells < 10 {
            return Err(anyhow!("[verify] e2q_tolerance must be positive and e2q_cells at least 10"));
        }

        Ok(Resolved {
            params,
            grids: Grids64::new(line, radial),
            solve,
            axis,
            mode,
        })
    }

    /// Sweep values `start + i (stop − start)/(steps − 1)`.
    pub fn sweep_values(&self) -> Vec<f64> {
        let w = &self.sweep;
        let n = w.steps.max(2);
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    w.stop
                } else {
                    w.start + (w.stop - w.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let r = RunConfig::default().resolve().unwrap();
        assert_eq!(r.axis, Axis::Beta);
        assert_eq!(r.grids.line.len(), 2001);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml("[params]\nmu = 2.5\n").unwrap();
        assert_eq!(c.params.mu, 2.5);
        assert_eq!(c.params.p, 4.0);
        assert_eq!(c.grid, GridConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("[params]\ngamma = 1.0\n").unwrap_err();
        assert!(format!("{err:#}").contains("gamma"));
    }

    #[test]
    fn sweep_values_hit_both_ends() {
        let c = RunConfig::default();
        let v = c.sweep_values();
        assert_eq!(v.len(), 21);
        assert_eq!((v[0], v[20]), (0.0, 5.0));
        assert_eq!(v[4], 1.0);
    }
}
