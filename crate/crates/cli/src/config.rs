//! Scenario configuration: strict TOML with unknown keys rejected.
//!
//! The full grammar is documented in the repository README. Sections other
//! than `[flux]` are optional in the file; each subcommand validates that
//! the sections it needs are present.

use anyhow::{anyhow, bail, Context, Result};
use fluxjump::extremal::{ExtremalParams, ParametrizationSettings, RGrowth, WeightRule};
use fluxjump::flux::presets;
use fluxjump::oracles::{self, OracleField};
use fluxjump::scheme::{BoundaryMode, FluxKind, GridSolution, SchemeParams};
use fluxjump::{JumpFlux, JumpPoint, PlFunction, WeightAssignment};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub flux: FluxConfig,
    #[serde(default)]
    pub parametrization: ParametrizationConfig,
    pub regularization: Option<RegularizationConfig>,
    pub domain: Option<DomainConfig>,
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub scheme: SchemeConfig,
    pub extremal: Option<ExtremalConfig>,
    pub scoring: Option<ScoringConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxConfig {
    pub kind: String,
    pub state_range: [f64; 2],
    /// Point value at the jump; `heaviside` only (default 1/2).
    pub point: Option<f64>,
    /// Sampling intervals; `burgers` only (default 4000).
    pub intervals: Option<usize>,
    /// `custom` only.
    pub dimension: Option<usize>,
    pub jumps: Option<Vec<JumpConfig>>,
    pub pieces: Option<Vec<PieceConfig>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    pub location: f64,
    pub left: Vec<f64>,
    pub point: Vec<f64>,
    pub right: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    pub breakpoints: Vec<f64>,
    /// Row-major values, `breakpoints.len() * dimension` entries.
    pub values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParametrizationConfig {
    pub theta: f64,
    pub weights: Option<Vec<f64>>,
}

impl Default for ParametrizationConfig {
    fn default() -> Self {
        Self {
            theta: 0.5,
            weights: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationConfig {
    pub r: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub x_lo: f64,
    pub x_hi: f64,
    pub cells: usize,
    #[serde(default = "default_boundary")]
    pub boundary: String,
    pub boundary_values: Option<[f64; 2]>,
}

fn default_boundary() -> String {
    "constant".to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: String,
    /// heaviside_riemann only.
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub split: Option<f64>,
    /// custom_table only.
    pub x: Option<Vec<f64>>,
    pub u: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t_end: f64,
    pub snapshots: Option<Vec<f64>>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            snapshots: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchemeConfig {
    pub cfl: f64,
    pub flux: String,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            flux: "godunov".to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtremalConfig {
    pub r0: u64,
    pub r_growth: String,
    pub r_step: u64,
    pub r_factor: f64,
    pub stop_tol: f64,
    pub max_iterations: usize,
    pub monotonicity_slack: f64,
    pub window: Option<[f64; 2]>,
    pub truncation_radius: Option<f64>,
}

impl Default for ExtremalConfig {
    fn default() -> Self {
        Self {
            r0: 64,
            r_growth: "double".to_string(),
            r_step: 1,
            r_factor: 2.0,
            stop_tol: 1e-3,
            max_iterations: 8,
            monotonicity_slack: 1e-10,
            window: None,
            truncation_radius: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoringConfig {
    pub oracle: String,
    pub window: Option<[f64; 2]>,
}

/// Parse and hash a config file's text. Unknown keys and syntax errors are
/// reported with the TOML position.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let cfg: ConfigFile = toml::from_str(text).map_err(|e| anyhow!("config error: {e}"))?;
    Ok(cfg)
}

/// FNV-1a hash of the raw config text, used to stamp output files.
pub fn config_hash(text: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

impl ConfigFile {
    pub fn build_flux(&self) -> Result<JumpFlux> {
        let f = &self.flux;
        let range = (f.state_range[0], f.state_range[1]);
        let forbid = |field: Option<bool>, name: &str, kind: &str| -> Result<()> {
            if field == Some(true) {
                bail!("flux.{name} does not apply to flux kind {kind:?}");
            }
            Ok(())
        };
        let flux = match f.kind.as_str() {
            "heaviside" => {
                forbid(f.intervals.map(|_| true), "intervals", "heaviside")?;
                forbid(f.jumps.as_ref().map(|_| true), "jumps", "heaviside")?;
                forbid(f.pieces.as_ref().map(|_| true), "pieces", "heaviside")?;
                presets::heaviside_with_point(range, f.point.unwrap_or(0.5))
            }
            "indicator" => {
                forbid(f.point.map(|_| true), "point", "indicator")?;
                forbid(f.intervals.map(|_| true), "intervals", "indicator")?;
                forbid(f.jumps.as_ref().map(|_| true), "jumps", "indicator")?;
                forbid(f.pieces.as_ref().map(|_| true), "pieces", "indicator")?;
                presets::indicator(range)
            }
            "burgers" => {
                forbid(f.point.map(|_| true), "point", "burgers")?;
                forbid(f.jumps.as_ref().map(|_| true), "jumps", "burgers")?;
                forbid(f.pieces.as_ref().map(|_| true), "pieces", "burgers")?;
                presets::burgers(range, f.intervals.unwrap_or(4000))
            }
            "custom" => {
                let dim = f.dimension.unwrap_or(1);
                let jumps = f
                    .jumps
                    .as_ref()
                    .map(|js| {
                        js.iter()
                            .map(|j| {
                                JumpPoint::new(
                                    j.location,
                                    j.left.clone(),
                                    j.point.clone(),
                                    j.right.clone(),
                                )
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                let pieces = f
                    .pieces
                    .as_ref()
                    .ok_or_else(|| anyhow!("flux.pieces is required for kind \"custom\""))?
                    .iter()
                    .map(|p| PlFunction::new(p.breakpoints.clone(), p.values.clone(), dim))
                    .collect::<Result<Vec<_>, _>>()
                    .context("flux.pieces")?;
                JumpFlux::new(dim, range, jumps, pieces).context("flux")?
            }
            other => bail!(
                "unknown flux.kind {other:?} (expected heaviside, indicator, burgers or custom)"
            ),
        };
        Ok(flux)
    }

    pub fn weight_assignment(&self, flux: &JumpFlux) -> Result<WeightAssignment> {
        Ok(match &self.parametrization.weights {
            Some(w) => WeightAssignment::explicit(w.clone()).context("parametrization.weights")?,
            None => WeightAssignment::dyadic(flux.jumps().len()),
        })
    }

    pub fn domain(&self) -> Result<&DomainConfig> {
        let d = self
            .domain
            .as_ref()
            .ok_or_else(|| anyhow!("config needs a [domain] section for this command"))?;
        if d.cells < 2 {
            bail!("domain.cells must be at least 2, got {}", d.cells);
        }
        if !(d.x_lo < d.x_hi) {
            bail!("domain x_lo = {} must be below x_hi = {}", d.x_lo, d.x_hi);
        }
        Ok(d)
    }

    /// Initial data at the configured resolution; `cells` overrides the
    /// domain cell count (used by the refinement ladder).
    pub fn build_initial(&self, cells: Option<usize>) -> Result<GridSolution> {
        let d = self.domain()?;
        let init = self
            .initial
            .as_ref()
            .ok_or_else(|| anyhow!("config needs an [initial] section for this command"))?;
        let cells = cells.unwrap_or(d.cells);

        let averages: Box<dyn Fn(f64, f64) -> f64> = match init.kind.as_str() {
            "example1" => Box::new(oracles::example1_initial_cell_average),
            "example2" => Box::new(oracles::example2_initial_cell_average),
            "heaviside_riemann" => {
                let left = init.left.unwrap_or(1.0);
                let right = init.right.unwrap_or(0.0);
                let split = init.split.unwrap_or(0.0);
                Box::new(move |a, b| {
                    let below = (b.min(split) - a.min(split)).max(0.0);
                    (left * below + right * (b - a - below)) / (b - a)
                })
            }
            "custom_table" => {
                let xs = init
                    .x
                    .clone()
                    .ok_or_else(|| anyhow!("initial.x is required for custom_table"))?;
                let us = init
                    .u
                    .clone()
                    .ok_or_else(|| anyhow!("initial.u is required for custom_table"))?;
                let table = PlFunction::scalar(xs, us)
                    .context("initial custom_table")?
                    .with_clamping(true);
                Box::new(move |a, b| table.eval1(0.5 * (a + b)))
            }
            other => bail!(
                "unknown initial.kind {other:?} (expected example1, example2, \
                 heaviside_riemann or custom_table)"
            ),
        };

        let mut probe_dx = (d.x_hi - d.x_lo) / cells as f64;
        if !probe_dx.is_finite() || probe_dx <= 0.0 {
            probe_dx = 1.0;
        }
        let boundary = match d.boundary.as_str() {
            "periodic" => BoundaryMode::Periodic,
            "constant" => {
                let (l, r) = match d.boundary_values {
                    Some([l, r]) => (l, r),
                    None => (
                        averages(d.x_lo, d.x_lo + probe_dx),
                        averages(d.x_hi - probe_dx, d.x_hi),
                    ),
                };
                BoundaryMode::Constant { left: l, right: r }
            }
            other => bail!("unknown domain.boundary {other:?} (expected periodic or constant)"),
        };
        Ok(GridSolution::from_cell_averages(
            d.x_lo, d.x_hi, cells, boundary, averages,
        )?)
    }

    pub fn scheme_params(&self) -> Result<SchemeParams> {
        let kind = match self.scheme.flux.as_str() {
            "godunov" => FluxKind::Godunov,
            "engquist_osher" => FluxKind::EngquistOsher,
            other => bail!("unknown scheme.flux {other:?} (expected godunov or engquist_osher)"),
        };
        Ok(SchemeParams::new(self.scheme.cfl, kind).context("scheme.cfl")?)
    }

    pub fn times(&self) -> Result<(f64, Vec<f64>)> {
        let t_end = self.time.t_end;
        if !(t_end.is_finite() && t_end >= 0.0) {
            bail!("time.t_end must be finite and non-negative, got {t_end}");
        }
        let snapshots = match &self.time.snapshots {
            Some(s) => {
                for w in s.windows(2) {
                    if w[1] <= w[0] {
                        bail!("time.snapshots must be strictly increasing");
                    }
                }
                if s.iter().any(|&t| !(t > 0.0 && t <= t_end)) {
                    bail!("time.snapshots must lie in (0, t_end]");
                }
                s.clone()
            }
            None => vec![t_end],
        };
        Ok((t_end, snapshots))
    }

    pub fn extremal_params(&self, flux: &JumpFlux) -> Result<ExtremalParams> {
        let e = self.extremal.clone().unwrap_or_default();
        let r_growth = match e.r_growth.as_str() {
            "double" => RGrowth::Doubling,
            "additive" => RGrowth::Additive(e.r_step),
            "geometric" => RGrowth::Geometric(e.r_factor),
            other => bail!(
                "unknown extremal.r_growth {other:?} (expected double, additive or geometric)"
            ),
        };
        let weights = match &self.parametrization.weights {
            Some(w) => WeightRule::Explicit(w.clone()),
            None => WeightRule::Dyadic,
        };
        let _ = self.weight_assignment(flux)?; // validate weight values
        Ok(ExtremalParams {
            parametrization: ParametrizationSettings {
                weights,
                theta: self.parametrization.theta,
            },
            scheme: self.scheme_params()?,
            r0: e.r0,
            r_growth,
            max_iterations: e.max_iterations,
            stop_tol: e.stop_tol,
            monotonicity_slack: e.monotonicity_slack,
            window: e.window.map(|[a, b]| (a, b)),
            truncation_radius: e.truncation_radius,
        })
    }

    /// Scoring oracle and window (defaulting to the inner half of the domain).
    pub fn scoring(&self) -> Result<(OracleField, (f64, f64))> {
        let s = self
            .scoring
            .as_ref()
            .ok_or_else(|| anyhow!("config needs a [scoring] section for this command"))?;
        let oracle = OracleField::from_name(&s.oracle).ok_or_else(|| {
            anyhow!(
                "unknown scoring.oracle {:?} (expected example1_largest, \
                 example1_smallest or example2)",
                s.oracle
            )
        })?;
        let window = match s.window {
            Some([a, b]) => (a, b),
            None => {
                let d = self.domain()?;
                let quarter = 0.25 * (d.x_hi - d.x_lo);
                (d.x_lo + quarter, d.x_hi - quarter)
            }
        };
        Ok((oracle, window))
    }
}

trait ClonedOrDefault {
    type Out;
    fn cloned_or_default(&self) -> Self::Out;
}

impl ClonedOrDefault for Option<&ExtremalConfig> {
    type Out = ExtremalConfig;
    fn cloned_or_default(&self) -> ExtremalConfig {
        match self {
            Some(e) => ExtremalConfig {
                r0: e.r0,
                r_growth: e.r_growth.clone(),
                r_step: e.r_step,
                r_factor: e.r_factor,
                stop_tol: e.stop_tol,
                max_iterations: e.max_iterations,
                monotonicity_slack: e.monotonicity_slack,
                window: e.window,
                truncation_radius: e.truncation_radius,
            },
            None => ExtremalConfig::default(),
        }
    }
}
