//! Scenario configuration: a TOML description of the grid, base metric,
//! bundle metric, Higgs field, target tensor recipe, and solver options,
//! plus the deterministic construction of the described objects.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fields::{HermitianMetricField, MatrixField};
use crate::geometry::BaseMetric;
use crate::grid::{GridSpec, ScalarField};
use crate::higgs::{hym_higgs_tensor, HiggsField};
use crate::instances::{
    random_endo_exp, random_metric, random_real_field, rng_for, standard_higgs,
    streams,
};
use crate::solver::NewtonOptions;

/// Complete description of a runnable scenario.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Seed for all pseudo-random instance generation.
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub grid: GridConfig,
    #[serde(default)]
    pub base_metric: BaseMetricConfig,
    pub bundle: BundleConfig,
    #[serde(default)]
    pub higgs: HiggsConfig,
    #[serde(default)]
    pub target: TargetConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Complex dimension (1 or 2).
    pub n: usize,
    /// Grid points per real axis.
    pub points: usize,
    /// Real periods, `2n` entries; defaults to all ones.
    #[serde(default)]
    pub periods: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseMetricConfig {
    /// `euclidean`, `constant`, or `conformal`.
    #[serde(default = "default_metric_family")]
    pub family: String,
    /// Diagonal entries for `constant`/`conformal` (length n).
    #[serde(default)]
    pub diag: Option<Vec<f64>>,
    /// Amplitude of the conformal exponent field.
    #[serde(default)]
    pub conformal_amplitude: f64,
    /// Mode cutoff for the conformal exponent field.
    #[serde(default = "default_max_mode")]
    pub conformal_max_mode: i64,
}

impl Default for BaseMetricConfig {
    fn default() -> Self {
        toml::from_str("").unwrap()
    }
}

fn default_metric_family() -> String {
    "euclidean".to_string()
}

fn default_max_mode() -> i64 {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleConfig {
    pub rank: usize,
    /// `identity` or `random`.
    #[serde(default = "default_h0_family")]
    pub h0: String,
    /// Amplitude of the random metric exponent.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Mode cutoff of the random metric exponent.
    #[serde(default = "default_max_mode")]
    pub max_mode: i64,
}

fn default_h0_family() -> String {
    "random".to_string()
}

fn default_amplitude() -> f64 {
    0.15
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiggsConfig {
    /// `standard` (nilpotent shift), `zero`, or `explicit`.
    #[serde(default = "default_higgs_kind")]
    pub kind: String,
    /// Complex scale of the standard field as `[re, im]`.
    #[serde(default = "default_higgs_scale")]
    pub scale: [f64; 2],
    /// Explicit constant component matrices, one per complex axis; each is a
    /// row-major list of `[re, im]` entries of length `rank^2`.
    #[serde(default)]
    pub matrices: Option<Vec<Vec<[f64; 2]>>>,
}

impl Default for HiggsConfig {
    fn default() -> Self {
        HiggsConfig {
            kind: default_higgs_kind(),
            scale: default_higgs_scale(),
            matrices: None,
        }
    }
}

fn default_higgs_kind() -> String {
    "standard".to_string()
}

fn default_higgs_scale() -> [f64; 2] {
    [0.3, 0.1]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    /// `manufactured` (tensor of a known nearby metric), `conformal`
    /// (tensor of `e^{-f} h0`), `omega-shift` (tensor of `h0` plus
    /// `epsilon` times the identity), or `file`.
    #[serde(default = "default_recipe")]
    pub recipe: String,
    /// Amplitude of the manufactured log-deviation.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Mode cutoff of the manufactured log-deviation / conformal factor.
    #[serde(default = "default_max_mode")]
    pub max_mode: i64,
    /// Amplitude of the conformal factor `f`.
    #[serde(default = "default_f_amplitude")]
    pub f_amplitude: f64,
    /// Shift for the `omega-shift` recipe.
    #[serde(default)]
    pub epsilon: f64,
    /// Field file for the `file` recipe.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

impl Default for TargetConfig {
    fn default() -> Self {
        TargetConfig {
            recipe: default_recipe(),
            amplitude: default_amplitude(),
            max_mode: default_max_mode(),
            f_amplitude: default_f_amplitude(),
            epsilon: 0.0,
            path: None,
        }
    }
}

fn default_recipe() -> String {
    "manufactured".to_string()
}

fn default_f_amplitude() -> f64 {
    0.2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol_sup")]
    pub tol_sup: f64,
    #[serde(default = "default_gmres_restart")]
    pub gmres_restart: usize,
    #[serde(default = "default_gmres_max_matvecs")]
    pub gmres_max_matvecs: usize,
    #[serde(default = "default_gmres_tol")]
    pub gmres_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        toml::from_str("").unwrap()
    }
}

fn default_max_iter() -> usize {
    NewtonOptions::default().max_iter
}

fn default_tol_sup() -> f64 {
    NewtonOptions::default().tol_sup
}

fn default_gmres_restart() -> usize {
    NewtonOptions::default().gmres_restart
}

fn default_gmres_max_matvecs() -> usize {
    NewtonOptions::default().gmres_max_matvecs
}

fn default_gmres_tol() -> f64 {
    NewtonOptions::default().gmres_tol
}

impl SolverConfig {
    pub fn newton_options(&self) -> NewtonOptions {
        NewtonOptions {
            max_iter: self.max_iter,
            tol_sup: self.tol_sup,
            gmres_restart: self.gmres_restart,
            gmres_max_matvecs: self.gmres_max_matvecs,
            gmres_tol: self.gmres_tol,
            ..NewtonOptions::default()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_flow_tol")]
    pub tol_sup: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        toml::from_str("").unwrap()
    }
}

fn default_dt() -> f64 {
    0.1
}

fn default_max_steps() -> usize {
    5000
}

fn default_flow_tol() -> f64 {
    1e-7
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    /// Tolerance for the eigenvalue conclusion.
    #[serde(default = "default_compare_tol")]
    pub tol: f64,
    /// Scale factor for the scaled comparison variant.
    #[serde(default)]
    pub scale: Option<f64>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        toml::from_str("").unwrap()
    }
}

fn default_compare_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write binary dumps of the solved metric factor and residual.
    #[serde(default)]
    pub write_fields: bool,
}

/// Concrete objects built from a [`ScenarioConfig`].
pub struct BuiltScenario {
    pub grid: GridSpec,
    pub g: BaseMetric,
    pub h0: HermitianMetricField,
    pub theta: HiggsField,
    /// Prescribed right-hand side tensor.
    pub p: MatrixField,
    /// Known solution factor `H* = h* h0^{-1}` when the recipe manufactures
    /// one (`manufactured`, `conformal`, and `omega-shift` with zero shift).
    pub h_star: Option<MatrixField>,
}

/// Overrides supplied on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_points: Option<usize>,
}

impl ScenarioConfig {
    /// Parses a scenario from a TOML file.
    pub fn from_path(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{e}")))
    }

    /// Parses a scenario from TOML text.
    pub fn from_toml(text: &str) -> Result<ScenarioConfig> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{e}")))
    }

    /// Deterministically builds the grid, metrics, Higgs field, and target
    /// tensor described by the config, applying CLI overrides.
    pub fn build(&self, overrides: &Overrides) -> Result<BuiltScenario> {
        let seed = overrides.seed.unwrap_or(self.seed);
        let points = overrides.grid_points.unwrap_or(self.grid.points);
        let n = self.grid.n;
        if n != 1 && n != 2 {
            return Err(Error::Config(format!(
                "complex dimension must be 1 or 2, got {n}"
            )));
        }
        let grid = match &self.grid.periods {
            Some(p) => GridSpec::new(n, points, p.clone())?,
            None => GridSpec::square(n, points)?,
        };

        let g = self.build_base_metric(&grid, seed)?;
        let h0 = self.build_h0(&grid, seed)?;
        let theta = self.build_higgs(&grid)?;
        let (p, h_star) = self.build_target(&grid, &g, &h0, &theta, seed)?;
        Ok(BuiltScenario {
            grid,
            g,
            h0,
            theta,
            p,
            h_star,
        })
    }

    fn build_base_metric(&self, grid: &GridSpec, seed: u64) -> Result<BaseMetric> {
        let n = grid.n();
        let cfg = &self.base_metric;
        let diag = match &cfg.diag {
            Some(d) => {
                if d.len() != n {
                    return Err(Error::Config(format!(
                        "base_metric.diag needs {n} entries, got {}",
                        d.len()
                    )));
                }
                d.clone()
            }
            None => vec![1.0; n],
        };
        let mut g0 = vec![Complex64::default(); n * n];
        for i in 0..n {
            g0[i * n + i] = Complex64::new(diag[i], 0.0);
        }
        match cfg.family.as_str() {
            "euclidean" => BaseMetric::euclidean(grid),
            "constant" => BaseMetric::constant(grid, g0),
            "conformal" => {
                let mut rng = rng_for(seed, streams::BASE_METRIC);
                let u = random_real_field(
                    grid,
                    &mut rng,
                    cfg.conformal_amplitude,
                    cfg.conformal_max_mode,
                );
                BaseMetric::conformal(grid, g0, u)
            }
            other => Err(Error::Config(format!("unknown base metric family `{other}`"))),
        }
    }

    fn build_h0(&self, grid: &GridSpec, seed: u64) -> Result<HermitianMetricField> {
        let cfg = &self.bundle;
        match cfg.h0.as_str() {
            "identity" => Ok(HermitianMetricField::identity(grid, cfg.rank)),
            "random" => {
                let mut rng = rng_for(seed, streams::BUNDLE_METRIC);
                random_metric(grid, cfg.rank, &mut rng, cfg.amplitude, cfg.max_mode)
            }
            other => Err(Error::Config(format!("unknown bundle metric family `{other}`"))),
        }
    }

    fn build_higgs(&self, grid: &GridSpec) -> Result<HiggsField> {
        let r = self.bundle.rank;
        let cfg = &self.higgs;
        match cfg.kind.as_str() {
            "zero" => Ok(HiggsField::zero(grid, r)),
            "standard" => standard_higgs(
                grid,
                r,
                Complex64::new(cfg.scale[0], cfg.scale[1]),
            ),
            "explicit" => {
                let mats = cfg.matrices.as_ref().ok_or_else(|| {
                    Error::Config("explicit Higgs field needs `matrices`".into())
                })?;
                if mats.len() != grid.n() {
                    return Err(Error::Config(format!(
                        "explicit Higgs field needs {} component matrices, got {}",
                        grid.n(),
                        mats.len()
                    )));
                }
                let mut comps = Vec::new();
                for m in mats {
                    if m.len() != r * r {
                        return Err(Error::Config(format!(
                            "Higgs component needs {} entries, got {}",
                            r * r,
                            m.len()
                        )));
                    }
                    comps.push(
                        m.iter()
                            .map(|[re, im]| Complex64::new(*re, *im))
                            .collect::<Vec<_>>(),
                    );
                }
                HiggsField::from_matrices(grid, r, &comps)
            }
            other => Err(Error::Config(format!("unknown Higgs field kind `{other}`"))),
        }
    }

    fn build_target(
        &self,
        grid: &GridSpec,
        g: &BaseMetric,
        h0: &HermitianMetricField,
        theta: &HiggsField,
        seed: u64,
    ) -> Result<(MatrixField, Option<MatrixField>)> {
        let cfg = &self.target;
        match cfg.recipe.as_str() {
            "manufactured" => {
                let mut rng = rng_for(seed, streams::TARGET);
                let h_star = random_endo_exp(grid, h0, &mut rng, cfg.amplitude, cfg.max_mode)?;
                let h1 = HermitianMetricField::new(h_star.matmul(h0.field()))?;
                let p = hym_higgs_tensor(&h1, theta, g)?;
                Ok((p, Some(h_star)))
            }
            "conformal" => {
                let mut rng = rng_for(seed, streams::TARGET);
                let f = random_real_field(grid, &mut rng, cfg.f_amplitude, cfg.max_mode);
                let ef = f.map(|z| Complex64::new((-z.re).exp(), 0.0));
                let h_star = MatrixField::identity(grid, h0.rank()).mul_scalar_field(&ef);
                let h1 = HermitianMetricField::new(h_star.matmul(h0.field()))?;
                let p = hym_higgs_tensor(&h1, theta, g)?;
                Ok((p, Some(h_star)))
            }
            "omega-shift" => {
                let s0 = hym_higgs_tensor(h0, theta, g)?;
                let shift = MatrixField::identity(grid, h0.rank())
                    .scale(Complex64::new(cfg.epsilon, 0.0));
                let h_star = if cfg.epsilon == 0.0 {
                    Some(MatrixField::identity(grid, h0.rank()))
                } else {
                    None
                };
                Ok((s0.add(&shift), h_star))
            }
            "file" => {
                let path = cfg.path.as_ref().ok_or_else(|| {
                    Error::Config("file recipe needs `target.path`".into())
                })?;
                if !path.exists() {
                    return Err(Error::Config(format!(
                        "target field file {} does not exist",
                        path.display()
                    )));
                }
                let p = crate::io::read_matrix_field(path)?;
                grid.same_grid(p.grid())?;
                if p.rank() != h0.rank() {
                    return Err(Error::Config(format!(
                        "target rank {} does not match bundle rank {}",
                        p.rank(),
                        h0.rank()
                    )));
                }
                Ok((p, None))
            }
            other => Err(Error::Config(format!("unknown target recipe `{other}`"))),
        }
    }
}

/// Conformal factor field of the `conformal` recipe, exposed for scenarios
/// that need the manufactured `f` itself.
pub fn conformal_target_factor(cfg: &ScenarioConfig, grid: &GridSpec, seed: u64) -> ScalarField {
    let mut rng = rng_for(seed, streams::TARGET);
    random_real_field(grid, &mut rng, cfg.target.f_amplitude, cfg.target.max_mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
seed = 7
[grid]
n = 1
points = 16
[bundle]
rank = 2
"#;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = ScenarioConfig::from_toml(BASIC).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.bundle.rank, 2);
        assert_eq!(cfg.higgs.kind, "standard");
        assert_eq!(cfg.target.recipe, "manufactured");
        let built = cfg.build(&Overrides::default()).unwrap();
        assert_eq!(built.grid.points_per_axis(), 16);
        assert!(built.h_star.is_some());
    }

    #[test]
    fn overrides_replace_seed_and_grid() {
        let cfg = ScenarioConfig::from_toml(BASIC).unwrap();
        let built = cfg
            .build(&Overrides {
                seed: Some(9),
                grid_points: Some(8),
            })
            .unwrap();
        assert_eq!(built.grid.points_per_axis(), 8);
        // Different seed produces a different target field.
        let base = cfg.build(&Overrides { seed: None, grid_points: Some(8) }).unwrap();
        assert!(built.p.sub(&base.p).frob_sup_norm() > 1e-8);
    }

    #[test]
    fn deterministic_build() {
        let cfg = ScenarioConfig::from_toml(BASIC).unwrap();
        let a = cfg.build(&Overrides::default()).unwrap();
        let b = cfg.build(&Overrides::default()).unwrap();
        assert_eq!(a.p.raw_data(), b.p.raw_data());
        assert_eq!(a.h0.field().raw_data(), b.h0.field().raw_data());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_recipes() {
        assert!(ScenarioConfig::from_toml("nonsense = 1").is_err());
        let bad = format!("{BASIC}\n[target]\nrecipe = \"bogus\"\n");
        let cfg = ScenarioConfig::from_toml(&bad).unwrap();
        let err = cfg.build(&Overrides::default()).err().unwrap();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_target_file_is_a_config_error() {
        let toml = format!(
            "{BASIC}\n[target]\nrecipe = \"file\"\npath = \"/nonexistent/p.bin\"\n"
        );
        let cfg = ScenarioConfig::from_toml(&toml).unwrap();
        let err = cfg.build(&Overrides::default()).err().unwrap();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn omega_shift_zero_is_exactly_solved_by_h0() {
        let toml = format!("{BASIC}\n[target]\nrecipe = \"omega-shift\"\nepsilon = 0.0\n");
        let cfg = ScenarioConfig::from_toml(&toml).unwrap();
        let built = cfg.build(&Overrides::default()).unwrap();
        let s0 = hym_higgs_tensor(&built.h0, &built.theta, &built.g).unwrap();
        assert!(built.p.sub(&s0).frob_sup_norm() < 1e-14);
        assert!(built.h_star.is_some());
    }
}
