//! Largest and smallest entropy solutions by monotone approximation.
//!
//! The largest solution is the decreasing limit of solves whose data is
//! raised to a constant d_m > d = max u0 outside the domain of interest,
//! while the flux regularization is tightened. On a bounded grid the
//! raised far field becomes a constant-boundary value; the three limits of
//! the construction (truncation radius, d_m down to d, regularization
//! index up) are coupled into one schedule indexed by m with a single stop
//! test on successive L1 increments over the analysis window. Successive
//! iterates are checked to be pointwise non-increasing there, up to a
//! configurable slack. The smallest solution is obtained from the largest
//! one of the mirrored problem u_t - div phi(-u) = 0 via u -> -u.

use crate::flux::{JumpFlux, JumpPoint};
use crate::parametrize::{build_parametrization, WeightAssignment};
use crate::regularize::regularize;
use crate::scheme::{run, BoundaryMode, GridSolution, SchemeParams};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtremalError {
    #[error("initial data range [{lo}, {hi}] leaves the flux state range [{flo}, {fhi}]")]
    DataOutsideRange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("state range cannot accommodate d_1 = {d1} (upper bound {hi})")]
    StateRangeOverflow { d1: f64, hi: f64 },
    #[error("extremal driver needs a scalar flux, got dimension {0}")]
    NotScalar(usize),
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("stop tolerance must be positive, got {0}")]
    BadStopTol(f64),
    #[error("regularization schedule overflowed or is not strictly increasing at m = {0}")]
    BadSchedule(usize),
    #[error(
        "monotonicity violated at iteration {iteration}, t = {time}, x = {x}: \
         iterate exceeds its predecessor by {excess:.3e} (slack {slack:.3e})"
    )]
    MonotonicityViolation {
        iteration: usize,
        time: f64,
        x: f64,
        excess: f64,
        slack: f64,
    },
    #[error(transparent)]
    Param(#[from] crate::parametrize::ParamError),
    #[error(transparent)]
    Reg(#[from] crate::regularize::RegError),
    #[error(transparent)]
    Scheme(#[from] crate::scheme::SchemeError),
    #[error(transparent)]
    Flux(#[from] crate::flux::FluxError),
}

/// How the plateau weights are assigned to the flux's jumps.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightRule {
    /// h_k = 2^{-k}.
    Dyadic,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParametrizationSettings {
    pub weights: WeightRule,
    pub theta: f64,
}

impl Default for ParametrizationSettings {
    fn default() -> Self {
        Self {
            weights: WeightRule::Dyadic,
            theta: 0.5,
        }
    }
}

impl ParametrizationSettings {
    pub fn assignment(&self, jumps: usize) -> Result<WeightAssignment, ExtremalError> {
        Ok(match &self.weights {
            WeightRule::Dyadic => WeightAssignment::dyadic(jumps),
            WeightRule::Explicit(w) => WeightAssignment::explicit(w.clone())?,
        })
    }
}

/// Growth rule for the regularization schedule r_m (strictly increasing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RGrowth {
    /// r_m = r0 * 2^m.
    Doubling,
    /// r_m = r0 + step * m.
    Additive(u64),
    /// r_m = ceil(r0 * q^m), forced strictly increasing.
    Geometric(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalParams {
    pub parametrization: ParametrizationSettings,
    pub scheme: SchemeParams,
    pub r0: u64,
    pub r_growth: RGrowth,
    pub max_iterations: usize,
    /// Stop when the windowed L1 increment between successive iterates
    /// drops to this value.
    pub stop_tol: f64,
    /// Per-cell slack for the pointwise monotonicity check between
    /// successive iterates.
    pub monotonicity_slack: f64,
    /// Analysis window; defaults to the inner half of the domain.
    pub window: Option<(f64, f64)>,
    /// Truncation radius: cells beyond it start at d_m. Defaults to the
    /// domain half-width (no interior truncation).
    pub truncation_radius: Option<f64>,
}

impl Default for ExtremalParams {
    fn default() -> Self {
        Self {
            parametrization: ParametrizationSettings::default(),
            scheme: SchemeParams::default(),
            r0: 64,
            r_growth: RGrowth::Doubling,
            max_iterations: 8,
            stop_tol: 1e-3,
            monotonicity_slack: 1e-10,
            window: None,
            truncation_radius: None,
        }
    }
}

impl ExtremalParams {
    fn r_at(&self, m: usize, prev: Option<u64>) -> Result<u64, ExtremalError> {
        let r = match self.r_growth {
            RGrowth::Doubling => {
                if m >= 63 {
                    return Err(ExtremalError::BadSchedule(m));
                }
                self.r0
                    .checked_mul(1u64 << m)
                    .ok_or(ExtremalError::BadSchedule(m))?
            }
            RGrowth::Additive(step) => self
                .r0
                .checked_add(step.max(1).checked_mul(m as u64).ok_or(ExtremalError::BadSchedule(m))?)
                .ok_or(ExtremalError::BadSchedule(m))?,
            RGrowth::Geometric(q) => {
                if !(q > 1.0) {
                    return Err(ExtremalError::BadSchedule(m));
                }
                let raw = (self.r0 as f64 * q.powi(m as i32)).ceil();
                if !raw.is_finite() || raw >= u64::MAX as f64 {
                    return Err(ExtremalError::BadSchedule(m));
                }
                raw as u64
            }
        };
        let r = match prev {
            Some(p) => r.max(p.checked_add(1).ok_or(ExtremalError::BadSchedule(m))?),
            None => r.max(1),
        };
        Ok(r)
    }

    fn window_for(&self, s: &GridSolution) -> (f64, f64) {
        self.window.unwrap_or_else(|| {
            let (lo, hi) = s.domain();
            let quarter = 0.25 * (hi - lo);
            (lo + quarter, hi - quarter)
        })
    }
}

/// Result of an extremal solve: snapshots of the final iterate plus the
/// iteration diagnostics.
#[derive(Debug, Clone)]
pub struct ExtremalResult {
    pub snapshots: Vec<GridSolution>,
    pub iterations: usize,
    /// Windowed L1 increments between successive iterates (from m = 2 on).
    pub increments: Vec<f64>,
    pub converged: bool,
    pub d_schedule: Vec<f64>,
    pub r_schedule: Vec<u64>,
    pub window: (f64, f64),
}

/// The mirrored problem: flux u -> -phi(-u) with jump triples reflected
/// and negated (left/right swapped), data and boundary constants negated.
/// Applying it twice returns the original problem exactly.
pub fn mirror_problem(
    f: &JumpFlux,
    u0: &GridSolution,
) -> Result<(JumpFlux, GridSolution), ExtremalError> {
    let (lo, hi) = f.state_range();
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<f64>>();
    let jumps: Vec<JumpPoint> = f
        .jumps()
        .iter()
        .rev()
        .map(|j| JumpPoint::new(-j.location, neg(&j.right), neg(&j.point), neg(&j.left)))
        .collect();
    let pieces = f.pieces().iter().rev().map(|p| p.mirrored()).collect();
    let mirrored = JumpFlux::new(f.dim(), (-hi, -lo), jumps, pieces)?;
    Ok((mirrored, u0.negated()))
}

/// Largest entropy solution of u_t + phi(u)_x = 0 with data `u0`.
pub fn solve_largest(
    f: &JumpFlux,
    u0: &GridSolution,
    params: &ExtremalParams,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<ExtremalResult, ExtremalError> {
    if f.dim() != 1 {
        return Err(ExtremalError::NotScalar(f.dim()));
    }
    if params.max_iterations == 0 {
        return Err(ExtremalError::NoIterations);
    }
    if !(params.stop_tol > 0.0) {
        return Err(ExtremalError::BadStopTol(params.stop_tol));
    }
    let (flo, fhi) = f.state_range();
    let (dlo, dhi) = (u0.min_value(), u0.max_value());
    if dlo < flo || dhi > fhi {
        return Err(ExtremalError::DataOutsideRange {
            lo: dlo,
            hi: dhi,
            flo,
            fhi,
        });
    }
    let d = dhi;
    let d1 = d + 0.5;
    if d1 > fhi {
        return Err(ExtremalError::StateRangeOverflow { d1, hi: fhi });
    }

    let weights = params.parametrization.assignment(f.jumps().len())?;
    let parametrization = build_parametrization(f, &weights, params.parametrization.theta)?;
    let window = params.window_for(u0);
    let periodic = u0.boundary() == BoundaryMode::Periodic;

    let mut prev_snaps: Option<Vec<GridSolution>> = None;
    let mut increments = Vec::new();
    let mut d_schedule = Vec::new();
    let mut r_schedule: Vec<u64> = Vec::new();
    let mut converged = false;

    for m in 1..=params.max_iterations {
        let d_m = d + 2f64.powi(-(m as i32));
        let r_m = params.r_at(m, r_schedule.last().copied())?;
        d_schedule.push(d_m);
        r_schedule.push(r_m);

        let boundary = if periodic {
            BoundaryMode::Periodic
        } else {
            BoundaryMode::Constant {
                left: d_m,
                right: d_m,
            }
        };
        let mut data = u0.values().to_vec();
        if let Some(radius) = params.truncation_radius {
            let (xl, xh) = u0.domain();
            let mid = 0.5 * (xl + xh);
            for (j, v) in data.iter_mut().enumerate() {
                if (u0.center(j) - mid).abs() > radius {
                    *v = d_m;
                }
            }
        }
        let (xl, xh) = u0.domain();
        let init = GridSolution::new(xl, xh, data, u0.time(), boundary)?;

        let rf = regularize(&parametrization, r_m)?;
        let snaps = run(&init, rf.phi_r(), &params.scheme, t_end, snapshot_times)?;

        if let Some(prev) = &prev_snaps {
            let mut increment: f64 = 0.0;
            for (snap, old) in snaps.iter().zip(prev) {
                for j in 0..snap.cells() {
                    let x = snap.center(j);
                    if x < window.0 || x > window.1 {
                        continue;
                    }
                    let excess = snap.values()[j] - old.values()[j];
                    if excess > params.monotonicity_slack {
                        return Err(ExtremalError::MonotonicityViolation {
                            iteration: m,
                            time: snap.time(),
                            x,
                            excess,
                            slack: params.monotonicity_slack,
                        });
                    }
                }
                increment = increment.max(snap.window_l1_distance(old, window)?);
            }
            increments.push(increment);
            prev_snaps = Some(snaps);
            if increment <= params.stop_tol {
                converged = true;
                break;
            }
        } else {
            prev_snaps = Some(snaps);
        }
    }

    Ok(ExtremalResult {
        snapshots: prev_snaps.unwrap(),
        iterations: r_schedule.len(),
        increments,
        converged,
        d_schedule,
        r_schedule,
        window,
    })
}

/// Smallest entropy solution: the negated largest solution of the mirrored
/// problem.
pub fn solve_smallest(
    f: &JumpFlux,
    u0: &GridSolution,
    params: &ExtremalParams,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<ExtremalResult, ExtremalError> {
    let (mf, mu0) = mirror_problem(f, u0)?;
    let mut res = solve_largest(&mf, &mu0, params, t_end, snapshot_times)?;
    for s in &mut res.snapshots {
        *s = s.negated();
    }
    let (wlo, whi) = res.window;
    res.window = (-whi, -wlo);
    res.d_schedule = res.d_schedule.iter().map(|d| -d).collect();
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::presets;
    use crate::scheme::FluxKind;

    fn quick_params() -> ExtremalParams {
        ExtremalParams {
            r0: 16,
            max_iterations: 4,
            stop_tol: 1e-8,
            ..ExtremalParams::default()
        }
    }

    #[test]
    fn mirror_of_point_one_heaviside() {
        // H with H(0) = 1 mirrors to -H(-u): jump triple (-1, -1, 0) at 0.
        let f = presets::heaviside_with_point((-2.0, 2.0), 1.0);
        let u0 = GridSolution::from_centers(-1.0, 1.0, 16, BoundaryMode::Periodic, |x| x * 0.1)
            .unwrap();
        let (mf, mu0) = mirror_problem(&f, &u0).unwrap();
        let j = &mf.jumps()[0];
        assert_eq!(j.location, 0.0);
        assert_eq!((j.left[0], j.point[0], j.right[0]), (-1.0, -1.0, 0.0));
        assert_eq!(mu0.values()[3], -u0.values()[3]);
    }

    #[test]
    fn mirror_of_burgers_negates_even_flux() {
        let f = presets::burgers((-2.0, 2.0), 64);
        let u0 =
            GridSolution::from_centers(-1.0, 1.0, 8, BoundaryMode::Periodic, |_| 0.0).unwrap();
        let (mf, _) = mirror_problem(&f, &u0).unwrap();
        for u in [-1.5, -0.25, 0.0, 1.0] {
            let v = mf.eval_point1(u).unwrap();
            assert_eq!(v, -f.eval_point1(-u).unwrap());
        }
    }

    #[test]
    fn mirror_is_involutive() {
        let f = presets::heaviside_with_point((-2.0, 3.0), 0.25);
        let u0 = GridSolution::from_centers(-1.0, 1.0, 8, BoundaryMode::Periodic, |x| x).unwrap();
        let (mf, mu0) = mirror_problem(&f, &u0).unwrap();
        let (mmf, mmu0) = mirror_problem(&mf, &mu0).unwrap();
        assert_eq!(mmf.state_range(), f.state_range());
        assert_eq!(mmf.jumps(), f.jumps());
        assert_eq!(mmu0.values(), u0.values());
        for (a, b) in mmf.pieces().iter().zip(f.pieces()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn constants_are_fixed_points_of_both_extremes() {
        let f = presets::heaviside((-2.0, 2.0));
        let u0 = GridSolution::new(-4.0, 4.0, vec![0.7; 64], 0.0, BoundaryMode::Periodic).unwrap();
        let largest = solve_largest(&f, &u0, &quick_params(), 0.5, &[]).unwrap();
        let smallest = solve_smallest(&f, &u0, &quick_params(), 0.5, &[]).unwrap();
        for s in largest.snapshots.iter().chain(&smallest.snapshots) {
            for &v in s.values() {
                assert_eq!(v, 0.7);
            }
        }
        assert!(largest.converged);
    }

    #[test]
    fn state_range_overflow_detected() {
        let f = presets::heaviside((-1.0, 1.0));
        let u0 = GridSolution::new(-4.0, 4.0, vec![0.9; 16], 0.0, BoundaryMode::Periodic).unwrap();
        // d_1 = 1.4 > 1.
        assert!(matches!(
            solve_largest(&f, &u0, &quick_params(), 0.1, &[]),
            Err(ExtremalError::StateRangeOverflow { .. })
        ));
    }

    #[test]
    fn periodic_extremes_agree_for_positive_data() {
        // States stay strictly positive, where the Heaviside flux is
        // constant: the unique periodic solution is stationary.
        let f = presets::heaviside((-2.0, 2.0));
        let u0 = GridSolution::from_centers(0.0, 1.0, 256, BoundaryMode::Periodic, |x| {
            0.5 + 0.4 * (2.0 * std::f64::consts::PI * x).sin()
        })
        .unwrap();
        let params = quick_params();
        let largest = solve_largest(&f, &u0, &params, 1.0, &[]).unwrap();
        let smallest = solve_smallest(&f, &u0, &params, 1.0, &[]).unwrap();
        let d = largest.snapshots[0]
            .l1_distance(&smallest.snapshots[0])
            .unwrap();
        assert!(d <= 1e-12, "largest vs smallest {d}");
        assert!((largest.snapshots[0].mean() - u0.mean()).abs() <= 1e-12);
    }

    #[test]
    fn ordering_largest_above_smallest() {
        let f = presets::heaviside((-2.0, 2.0));
        let u0 = GridSolution::from_cell_averages(
            -10.0,
            10.0,
            400,
            BoundaryMode::Constant {
                left: 0.0,
                right: 0.0,
            },
            crate::oracles::example1_initial_cell_average,
        )
        .unwrap();
        let params = ExtremalParams {
            r0: 512,
            r_growth: RGrowth::Additive(1),
            max_iterations: 3,
            stop_tol: 0.05,
            monotonicity_slack: 0.05,
            scheme: SchemeParams::new(0.5, FluxKind::Godunov).unwrap(),
            ..ExtremalParams::default()
        };
        let largest = solve_largest(&f, &u0, &params, 0.25, &[]).unwrap();
        let smallest = solve_smallest(&f, &u0, &params, 0.25, &[]).unwrap();
        let big = largest.snapshots.last().unwrap();
        let small = smallest.snapshots.last().unwrap();
        for j in 0..big.cells() {
            let x = big.center(j);
            if x >= -5.0 && x <= 5.0 {
                assert!(
                    small.values()[j] <= big.values()[j] + 1e-6,
                    "ordering violated at x={x}"
                );
            }
        }
    }

    #[test]
    fn stability_in_initial_data() {
        // Positive-part contraction of the extremal solutions in the data.
        let f = presets::heaviside((-2.0, 2.0));
        let pi2 = 2.0 * std::f64::consts::PI;
        let a = GridSolution::from_centers(0.0, 1.0, 128, BoundaryMode::Periodic, |x| {
            0.5 + 0.3 * (pi2 * x).sin()
        })
        .unwrap();
        let b = GridSolution::from_centers(0.0, 1.0, 128, BoundaryMode::Periodic, |x| {
            0.45 + 0.25 * (pi2 * (x + 0.1)).sin()
        })
        .unwrap();
        let params = quick_params();
        let ua = solve_largest(&f, &a, &params, 0.5, &[]).unwrap();
        let ub = solve_largest(&f, &b, &params, 0.5, &[]).unwrap();
        let pos_part = |p: &GridSolution, q: &GridSolution| {
            p.values()
                .iter()
                .zip(q.values())
                .map(|(x, y)| (x - y).max(0.0))
                .sum::<f64>()
                * p.dx()
        };
        let before = pos_part(&a, &b);
        let after = pos_part(&ua.snapshots[0], &ub.snapshots[0]);
        assert!(after <= before + 1e-10, "{after} > {before}");
    }
}
