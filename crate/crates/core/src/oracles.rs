//! Closed-form reference solutions and scoring.
//!
//! The Heaviside-flux Cauchy problem with data u0(x) = 1/(1+x^2) has the
//! stationary profile as its largest entropy solution, while the smallest
//! one opens a front along x = tan(t - pi/2) that sweeps the profile to
//! zero, with total mass (pi - t)^+. The indicator-flux Riemann problem
//! keeps the step H(x) stationary once the flux is extended to be
//! multivalued at the jump. These fields are the scoring targets for the
//! numerical pipeline.

use crate::scheme::GridSolution;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("window [{0}, {1}] is empty or outside the solution domain")]
    BadWindow(f64, f64),
    #[error("oracle {name} is not valid at t = {t}")]
    OutsideValidity { name: &'static str, t: f64 },
    #[error("weak residual needs snapshots starting at t = 0 in increasing time order")]
    BadSnapshots,
    #[error(transparent)]
    Scheme(#[from] crate::scheme::SchemeError),
}

/// Initial profile 1/(1+x^2).
pub fn example1_initial(x: f64) -> f64 {
    1.0 / (1.0 + x * x)
}

/// Exact cell average of the initial profile over [a, b].
pub fn example1_initial_cell_average(a: f64, b: f64) -> f64 {
    (b.atan() - a.atan()) / (b - a)
}

/// Largest entropy solution: the stationary profile, for all t.
pub fn example1_largest(_t: f64, x: f64) -> f64 {
    example1_initial(x)
}

/// Front position tan(t - pi/2) of the smallest solution, for 0 < t < pi.
pub fn example1_front(t: f64) -> f64 {
    debug_assert!(t > 0.0 && t < PI);
    (t - FRAC_PI_2).tan()
}

/// Rankine-Hugoniot front speed 1 + x^2 on the zero branch (diagnostic).
pub fn example1_front_speed(x: f64) -> f64 {
    1.0 + x * x
}

/// Smallest entropy solution: the profile right of the moving front,
/// identically zero from t = pi on.
pub fn example1_smallest(t: f64, x: f64) -> f64 {
    debug_assert!(t > 0.0);
    if t >= PI {
        return 0.0;
    }
    if x > example1_front(t) {
        example1_initial(x)
    } else {
        0.0
    }
}

/// Mass of the smallest solution over the whole line: (pi - t)^+.
pub fn example1_smallest_mass(t: f64) -> f64 {
    (PI - t).max(0.0)
}

/// The stationary step H(x) of the indicator-flux Riemann problem.
/// H(0) is pinned to 1 (right-continuous) so CSV diffs are deterministic.
pub fn example2_solution(_t: f64, x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Exact cell average of H(x) over [a, b].
pub fn example2_initial_cell_average(a: f64, b: f64) -> f64 {
    (b.max(0.0) - a.max(0.0)) / (b - a)
}

/// Named closed-form field (t, x) -> u with its validity domain in t.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleField {
    Example1Largest,
    Example1Smallest,
    Example2,
}

impl OracleField {
    pub fn name(&self) -> &'static str {
        match self {
            OracleField::Example1Largest => "example1_largest",
            OracleField::Example1Smallest => "example1_smallest",
            OracleField::Example2 => "example2",
        }
    }

    /// Earliest time the field is defined at.
    pub fn valid_from(&self) -> f64 {
        match self {
            OracleField::Example1Smallest => f64::MIN_POSITIVE,
            _ => 0.0,
        }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            OracleField::Example1Largest => example1_largest(t, x),
            OracleField::Example1Smallest => example1_smallest(t, x),
            OracleField::Example2 => example2_solution(t, x),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "example1_largest" => Some(OracleField::Example1Largest),
            "example1_smallest" => Some(OracleField::Example1Smallest),
            "example2" => Some(OracleField::Example2),
            _ => None,
        }
    }
}

/// Discrete L1 distance sum_j |u_j - oracle(t, x_j)| dx over cells whose
/// centers lie in `window`.
pub fn score(
    numerical: &GridSolution,
    oracle: &OracleField,
    window: (f64, f64),
) -> Result<f64, OracleError> {
    if numerical.time() < oracle.valid_from() {
        return Err(OracleError::OutsideValidity {
            name: oracle.name(),
            t: numerical.time(),
        });
    }
    score_fn(numerical, |t, x| oracle.eval(t, x), window)
}

/// `score` against an arbitrary reference field.
pub fn score_fn(
    numerical: &GridSolution,
    reference: impl Fn(f64, f64) -> f64,
    window: (f64, f64),
) -> Result<f64, OracleError> {
    let (lo, hi) = numerical.domain();
    if !(window.0 < window.1) || window.0 < lo || window.1 > hi {
        return Err(OracleError::BadWindow(window.0, window.1));
    }
    let t = numerical.time();
    let dx = numerical.dx();
    let mut acc = 0.0;
    for (j, &u) in numerical.values().iter().enumerate() {
        let x = numerical.center(j);
        if x >= window.0 && x <= window.1 {
            acc += (u - reference(t, x)).abs();
        }
    }
    Ok(acc * dx)
}

/// Position of the left-most upward crossing of `threshold(x)`, linearly
/// interpolated between cell centers. `None` when the field never reaches
/// the threshold.
pub fn detect_front(s: &GridSolution, threshold: impl Fn(f64) -> f64) -> Option<f64> {
    let n = s.cells();
    let excess = |j: usize| s.values()[j] - threshold(s.center(j));
    let mut prev = excess(0);
    if prev >= 0.0 {
        return Some(s.domain().0);
    }
    for j in 1..n {
        let cur = excess(j);
        if cur >= 0.0 {
            let x0 = s.center(j - 1);
            let x1 = s.center(j);
            let t = -prev / (cur - prev);
            return Some(x0 + t * (x1 - x0));
        }
        prev = cur;
    }
    None
}

/// Tent-shaped space-time test function
/// f(t, x) = amp * (1 - t/t1)^+ * (1 - |x - x0|/hw)^+.
#[derive(Debug, Clone, Copy)]
pub struct TentTestFunction {
    pub amplitude: f64,
    pub t1: f64,
    pub x0: f64,
    pub half_width: f64,
}

impl TentTestFunction {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.amplitude * (1.0 - t / self.t1).max(0.0) * self.space(x)
    }

    fn space(&self, x: f64) -> f64 {
        (1.0 - (x - self.x0).abs() / self.half_width).max(0.0)
    }

    /// Left-sided in t at the kink t = t1, so trapezoid quadrature over
    /// snapshots ending exactly at t1 integrates the tent exactly.
    pub fn dt(&self, t: f64, x: f64) -> f64 {
        if t > self.t1 {
            0.0
        } else {
            -self.amplitude / self.t1 * self.space(x)
        }
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        let d = x - self.x0;
        if d.abs() >= self.half_width || t >= self.t1 {
            0.0
        } else {
            -self.amplitude * d.signum() / self.half_width * (1.0 - t / self.t1)
        }
    }
}

/// Quadrature of the weak-form residual
///
/// ```text
/// R = int int [u f_t + phi(u) f_x] dt dx + int u(0, x) f(0, x) dx
/// ```
///
/// over the snapshots (trapezoid in t, midpoint over cells in x), with the
/// flux value of each state supplied by `flux_of`. A weak solution has
/// R = 0 for every test function; a Rankine-Hugoniot violation shows up as
/// a residual of the order of the flux mismatch.
pub fn weak_residual(
    snapshots: &[GridSolution],
    flux_of: impl Fn(f64) -> f64,
    test: &TentTestFunction,
) -> Result<f64, OracleError> {
    if snapshots.is_empty() || snapshots[0].time() != 0.0 {
        return Err(OracleError::BadSnapshots);
    }
    for w in snapshots.windows(2) {
        if w[1].time() <= w[0].time() || !w[0].same_grid(&w[1]) {
            return Err(OracleError::BadSnapshots);
        }
    }
    let m = snapshots.len();
    let dx = snapshots[0].dx();
    let mut acc = 0.0;
    for (i, snap) in snapshots.iter().enumerate() {
        let t = snap.time();
        let w_lo = if i == 0 { t } else { snapshots[i - 1].time() };
        let w_hi = if i == m - 1 { t } else { snapshots[i + 1].time() };
        let wt = 0.5 * (w_hi - w_lo);
        let mut spatial = 0.0;
        for (j, &u) in snap.values().iter().enumerate() {
            let x = snap.center(j);
            spatial += u * test.dt(t, x) + flux_of(u) * test.dx(t, x);
        }
        acc += wt * spatial * dx;
    }
    let init = &snapshots[0];
    let mut init_term = 0.0;
    for (j, &u) in init.values().iter().enumerate() {
        init_term += u * test.eval(0.0, init.center(j));
    }
    Ok(acc + init_term * dx)
}
