//! Conservative monotone finite-volume solver on a uniform 1-D grid.
//!
//! The update is the explicit conservative form
//!
//! ```text
//! u_j <- u_j - (dt/dx) (F_{j+1/2} - F_{j-1/2})
//! ```
//!
//! with a monotone two-point numerical flux (Godunov or Engquist-Osher)
//! evaluated exactly on piecewise-linear flux tables: interval extrema are
//! taken over the breakpoints inside `[uL, uR]` plus the endpoints, with no
//! sampling error. Under the CFL restriction `dt * L <= dx` (L the largest
//! flux slope over the realized state range) the scheme is monotone, so the
//! discrete maximum principle, L1 contraction, the comparison principle and
//! the cell entropy inequalities hold up to rounding.

use crate::pl::PlFunction;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("grid needs at least 2 cells, got {0}")]
    TooFewCells(usize),
    #[error("domain [{0}, {1}] is empty or not finite")]
    BadDomain(f64, f64),
    #[error("non-finite cell value at index {0}")]
    NonFinite(usize),
    #[error("time stamp must be finite and non-negative, got {0}")]
    BadTime(f64),
    #[error("boundary constants must be finite")]
    BadBoundary,
    #[error("cfl must lie in (0, 1], got {0}")]
    BadCfl(f64),
    #[error("numerical flux requires a scalar flux table, got dimension {0}")]
    NotScalarFlux(usize),
    #[error("state range [{lo}, {hi}] leaves the flux table range [{flo}, {fhi}]")]
    StateOutsideFlux { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("CFL violation: dt = {dt} exceeds the stable limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("t_end {t_end} precedes the current time {now}")]
    TimeReversal { t_end: f64, now: f64 },
    #[error("snapshot times must be strictly increasing and lie in (t0, t_end]")]
    BadSnapshots,
    #[error("step budget exhausted: over {0} steps in one run")]
    StepBudget(u64),
    #[error("grids are incompatible (domain, cell count, boundary or times)")]
    GridMismatch,
    #[error(transparent)]
    Pl(#[from] crate::pl::PlError),
}

/// Boundary handling for the 1-D grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryMode {
    Periodic,
    /// Ghost cells hold fixed far-field constants.
    Constant { left: f64, right: f64 },
}

/// Uniform cell-average field with a time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    x_lo: f64,
    x_hi: f64,
    u: Vec<f64>,
    time: f64,
    boundary: BoundaryMode,
}

impl GridSolution {
    pub fn new(
        x_lo: f64,
        x_hi: f64,
        u: Vec<f64>,
        time: f64,
        boundary: BoundaryMode,
    ) -> Result<Self, SchemeError> {
        if !(x_lo.is_finite() && x_hi.is_finite() && x_hi > x_lo) {
            return Err(SchemeError::BadDomain(x_lo, x_hi));
        }
        if u.len() < 2 {
            return Err(SchemeError::TooFewCells(u.len()));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(SchemeError::NonFinite(i));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(SchemeError::BadTime(time));
        }
        if let BoundaryMode::Constant { left, right } = boundary {
            if !(left.is_finite() && right.is_finite()) {
                return Err(SchemeError::BadBoundary);
            }
        }
        Ok(Self {
            x_lo,
            x_hi,
            u,
            time,
            boundary,
        })
    }

    /// Initialize from exact cell averages of a closed form.
    pub fn from_cell_averages(
        x_lo: f64,
        x_hi: f64,
        cells: usize,
        boundary: BoundaryMode,
        avg: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, SchemeError> {
        let dx = (x_hi - x_lo) / cells as f64;
        let u = (0..cells)
            .map(|j| avg(x_lo + j as f64 * dx, x_lo + (j + 1) as f64 * dx))
            .collect();
        Self::new(x_lo, x_hi, u, 0.0, boundary)
    }

    /// Initialize by sampling a closed form at cell centers.
    pub fn from_centers(
        x_lo: f64,
        x_hi: f64,
        cells: usize,
        boundary: BoundaryMode,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, SchemeError> {
        let dx = (x_hi - x_lo) / cells as f64;
        let u = (0..cells)
            .map(|j| f(x_lo + (j as f64 + 0.5) * dx))
            .collect();
        Self::new(x_lo, x_hi, u, 0.0, boundary)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x_lo, self.x_hi)
    }

    pub fn cells(&self) -> usize {
        self.u.len()
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.u.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    pub fn center(&self, j: usize) -> f64 {
        self.x_lo + (j as f64 + 0.5) * self.dx()
    }

    pub fn with_boundary(&self, boundary: BoundaryMode) -> Self {
        Self {
            boundary,
            ..self.clone()
        }
    }

    /// Field with every cell value negated (boundary constants too).
    pub fn negated(&self) -> Self {
        let boundary = match self.boundary {
            BoundaryMode::Periodic => BoundaryMode::Periodic,
            BoundaryMode::Constant { left, right } => BoundaryMode::Constant {
                left: -left,
                right: -right,
            },
        };
        Self {
            u: self.u.iter().map(|v| -v).collect(),
            boundary,
            ..*self
        }
    }

    pub fn min_value(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Range of states the next update can see: cells plus ghost constants.
    pub fn state_range_with_ghosts(&self) -> (f64, f64) {
        let mut lo = self.min_value();
        let mut hi = self.max_value();
        if let BoundaryMode::Constant { left, right } = self.boundary {
            lo = lo.min(left).min(right);
            hi = hi.max(left).max(right);
        }
        (lo, hi)
    }

    /// Sum of u_j dx.
    pub fn mass(&self) -> f64 {
        self.u.iter().sum::<f64>() * self.dx()
    }

    /// Mass divided by the domain length.
    pub fn mean(&self) -> f64 {
        self.u.iter().sum::<f64>() / self.u.len() as f64
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.x_lo == other.x_lo && self.x_hi == other.x_hi && self.u.len() == other.u.len()
    }

    /// Discrete L1 distance sum |u_j - w_j| dx over the whole domain.
    pub fn l1_distance(&self, other: &Self) -> Result<f64, SchemeError> {
        if !self.same_grid(other) {
            return Err(SchemeError::GridMismatch);
        }
        Ok(self
            .u
            .iter()
            .zip(&other.u)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.dx())
    }

    /// L1 distance restricted to cells whose centers lie in `window`.
    pub fn window_l1_distance(&self, other: &Self, window: (f64, f64)) -> Result<f64, SchemeError> {
        if !self.same_grid(other) {
            return Err(SchemeError::GridMismatch);
        }
        let dx = self.dx();
        let mut acc = 0.0;
        for j in 0..self.u.len() {
            let x = self.center(j);
            if x >= window.0 && x <= window.1 {
                acc += (self.u[j] - other.u[j]).abs();
            }
        }
        Ok(acc * dx)
    }

    /// Mass restricted to cells whose centers lie in `window`.
    pub fn window_mass(&self, window: (f64, f64)) -> f64 {
        let dx = self.dx();
        self.u
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let x = self.center(*j);
                x >= window.0 && x <= window.1
            })
            .map(|(_, v)| v)
            .sum::<f64>()
            * dx
    }
}

/// Two-point monotone flux family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    Godunov,
    EngquistOsher,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub cfl: f64,
    pub kind: FluxKind,
}

impl SchemeParams {
    pub fn new(cfl: f64, kind: FluxKind) -> Result<Self, SchemeError> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(SchemeError::BadCfl(cfl));
        }
        Ok(Self { cfl, kind })
    }

    pub fn godunov(cfl: f64) -> Result<Self, SchemeError> {
        Self::new(cfl, FluxKind::Godunov)
    }
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            kind: FluxKind::Godunov,
        }
    }
}

fn godunov_flux(phi: &PlFunction, ul: f64, ur: f64) -> f64 {
    if ul == ur {
        return phi.eval1(ul);
    }
    if ul < ur {
        phi.min_max_on(ul, ur).unwrap().0
    } else {
        phi.min_max_on(ur, ul).unwrap().1
    }
}

/// Prefix tables splitting a scalar PL flux into its increasing and
/// decreasing parts, so the Engquist-Osher flux is one lookup per argument.
struct EoTables<'a> {
    phi: &'a PlFunction,
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl<'a> EoTables<'a> {
    fn new(phi: &'a PlFunction) -> Self {
        let ys = phi.values_flat();
        let mut pos = Vec::with_capacity(ys.len());
        let mut neg = Vec::with_capacity(ys.len());
        pos.push(0.0);
        neg.push(0.0);
        for i in 1..ys.len() {
            let d = ys[i] - ys[i - 1];
            pos.push(pos[i - 1] + d.max(0.0));
            neg.push(neg[i - 1] + d.min(0.0));
        }
        Self { phi, pos, neg }
    }

    fn part(&self, x: f64, increasing: bool) -> f64 {
        let xs = self.phi.breakpoints();
        let ys = self.phi.values_flat();
        let table = if increasing { &self.pos } else { &self.neg };
        match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => table[i],
            Err(i) => {
                let i = i - 1;
                let y = self.phi.eval1(x);
                let d = y - ys[i];
                let partial = if increasing { d.max(0.0) } else { d.min(0.0) };
                table[i] + partial
            }
        }
    }

    // F(a, b) = phi(a ^ b) plus the one-sided variation between the
    // arguments; exactly consistent at a == b with no branch seam.
    fn flux(&self, ul: f64, ur: f64) -> f64 {
        if ul <= ur {
            self.phi.eval1(ul) + (self.part(ur, false) - self.part(ul, false))
        } else {
            self.phi.eval1(ur) + (self.part(ul, true) - self.part(ur, true))
        }
    }
}

/// Monotone two-point numerical flux, exact on PL flux tables.
pub fn numerical_flux(
    phi: &PlFunction,
    ul: f64,
    ur: f64,
    kind: FluxKind,
) -> Result<f64, SchemeError> {
    if phi.dim() != 1 {
        return Err(SchemeError::NotScalarFlux(phi.dim()));
    }
    let (lo, hi) = phi.x_range();
    for u in [ul, ur] {
        if !(u >= lo && u <= hi) {
            return Err(SchemeError::StateOutsideFlux {
                lo: ul.min(ur),
                hi: ul.max(ur),
                flo: lo,
                fhi: hi,
            });
        }
    }
    Ok(match kind {
        FluxKind::Godunov => godunov_flux(phi, ul, ur),
        FluxKind::EngquistOsher => EoTables::new(phi).flux(ul, ur),
    })
}

fn ghosted(s: &GridSolution, j: isize) -> f64 {
    let n = s.u.len() as isize;
    match s.boundary {
        BoundaryMode::Periodic => s.u[(j.rem_euclid(n)) as usize],
        BoundaryMode::Constant { left, right } => {
            if j < 0 {
                left
            } else if j >= n {
                right
            } else {
                s.u[j as usize]
            }
        }
    }
}

/// Largest stable time step for the field's realized state range, or
/// `f64::INFINITY` when the flux is constant over it.
pub fn max_stable_dt(phi: &PlFunction, s: &GridSolution, params: &SchemeParams) -> f64 {
    let (lo, hi) = s.state_range_with_ghosts();
    let l = phi.max_slope_norm_on(lo, hi);
    if l > 0.0 {
        params.cfl * s.dx() / l
    } else {
        f64::INFINITY
    }
}

/// One conservative explicit step of size `dt`. Refuses steps that violate
/// the CFL restriction for the realized state range.
pub fn step(
    s: &GridSolution,
    phi: &PlFunction,
    params: &SchemeParams,
    dt: f64,
) -> Result<GridSolution, SchemeError> {
    if phi.dim() != 1 {
        return Err(SchemeError::NotScalarFlux(phi.dim()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SchemeError::BadStep(dt));
    }
    let (lo, hi) = s.state_range_with_ghosts();
    let (flo, fhi) = phi.x_range();
    if lo < flo || hi > fhi {
        return Err(SchemeError::StateOutsideFlux {
            lo,
            hi,
            flo,
            fhi,
        });
    }
    let dx = s.dx();
    let l = phi.max_slope_norm_on(lo, hi);
    if dt * l > dx * (1.0 + 1e-9) {
        return Err(SchemeError::CflViolation {
            dt,
            limit: dx / l,
        });
    }

    let n = s.u.len();
    let mut faces = vec![0.0; n + 1];
    match params.kind {
        FluxKind::Godunov => {
            for (j, f) in faces.iter_mut().enumerate() {
                *f = godunov_flux(phi, ghosted(s, j as isize - 1), ghosted(s, j as isize));
            }
        }
        FluxKind::EngquistOsher => {
            let eo = EoTables::new(phi);
            for (j, f) in faces.iter_mut().enumerate() {
                *f = eo.flux(ghosted(s, j as isize - 1), ghosted(s, j as isize));
            }
        }
    }
    let lambda = dt / dx;
    let u = (0..n)
        .map(|j| s.u[j] - lambda * (faces[j + 1] - faces[j]))
        .collect();
    Ok(GridSolution {
        x_lo: s.x_lo,
        x_hi: s.x_hi,
        u,
        time: s.time + dt,
        boundary: s.boundary,
    })
}

const STEP_BUDGET: u64 = 1_000_000_000;

/// Advance from `s0` to `t_end` with adaptive CFL-limited steps, landing
/// exactly on each snapshot time. Returns the states at the snapshot times,
/// with the final state at `t_end` appended when not already requested.
pub fn run(
    s0: &GridSolution,
    phi: &PlFunction,
    params: &SchemeParams,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<Vec<GridSolution>, SchemeError> {
    if !(t_end.is_finite()) || t_end < s0.time {
        return Err(SchemeError::TimeReversal {
            t_end,
            now: s0.time,
        });
    }
    for w in snapshot_times.windows(2) {
        if w[1] <= w[0] {
            return Err(SchemeError::BadSnapshots);
        }
    }
    if snapshot_times.iter().any(|&t| {
        !t.is_finite() || (t <= s0.time && !(t == s0.time && t == t_end)) || t > t_end
    }) {
        return Err(SchemeError::BadSnapshots);
    }
    if t_end == s0.time {
        return Ok(vec![s0.clone()]);
    }
    let mut targets: Vec<f64> = snapshot_times.to_vec();
    if targets.last() != Some(&t_end) {
        targets.push(t_end);
    }

    let mut out = Vec::with_capacity(targets.len());
    let mut cur = s0.clone();
    let mut steps: u64 = 0;
    for &target in &targets {
        while cur.time < target {
            steps += 1;
            if steps > STEP_BUDGET {
                return Err(SchemeError::StepBudget(STEP_BUDGET));
            }
            let stable = max_stable_dt(phi, &cur, params);
            let remaining = target - cur.time;
            if stable >= remaining {
                cur = step(&cur, phi, params, remaining)?;
                cur.time = target;
            } else {
                cur = step(&cur, phi, params, stable)?;
            }
        }
        out.push(cur.clone());
    }
    Ok(out)
}

/// Largest positive cell residual of the discrete Kruzhkov inequality
///
/// ```text
/// (|u'_j - k| - |u_j - k|)/dt + (Q_{j+1/2} - Q_{j-1/2})/dx <= 0,
/// Q(uL, uR) = F(uL v k, uR v k) - F(uL ^ k, uR ^ k),
/// ```
///
/// where `next` was produced from `prev` by one step. Non-positive (up to
/// rounding) for monotone schemes under the CFL restriction, for every k.
pub fn entropy_residual(
    prev: &GridSolution,
    next: &GridSolution,
    phi: &PlFunction,
    params: &SchemeParams,
    k: f64,
) -> Result<f64, SchemeError> {
    if !prev.same_grid(next) || prev.boundary != next.boundary {
        return Err(SchemeError::GridMismatch);
    }
    let dt = next.time - prev.time;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SchemeError::GridMismatch);
    }
    if phi.dim() != 1 {
        return Err(SchemeError::NotScalarFlux(phi.dim()));
    }
    let (flo, fhi) = phi.x_range();
    let kc = k.clamp(flo, fhi);
    let dx = prev.dx();
    let n = prev.u.len();

    let eo = match params.kind {
        FluxKind::EngquistOsher => Some(EoTables::new(phi)),
        FluxKind::Godunov => None,
    };
    let face = |ul: f64, ur: f64| match &eo {
        Some(t) => t.flux(ul, ur),
        None => godunov_flux(phi, ul, ur),
    };
    let mut q = vec![0.0; n + 1];
    for (j, qf) in q.iter_mut().enumerate() {
        let ul = ghosted(prev, j as isize - 1);
        let ur = ghosted(prev, j as isize);
        *qf = face(ul.max(kc), ur.max(kc)) - face(ul.min(kc), ur.min(kc));
    }
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let r = ((next.u[j] - k).abs() - (prev.u[j] - k).abs()) / dt + (q[j + 1] - q[j]) / dx;
        worst = worst.max(r);
    }
    Ok(worst)
}
