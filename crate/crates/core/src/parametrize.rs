//! Monotone parametrization of the multivalued flux graph.
//!
//! For a flux with jumps at u_1 < ... < u_K and positive weights h_k, the
//! strictly increasing step map
//!
//! ```text
//! alpha(u) = u + sum_{u_k < u} h_k
//! ```
//!
//! opens a gap [alpha(u_k-), alpha(u_k+)] of width h_k at each jump. Its
//! maximal-monotone inverse b is continuous, non-decreasing, 1-Lipschitz,
//! and constant (= u_k) on each gap, with v - c <= b(v) <= v for
//! c = sum h_k. The flux trace g equals phi(b(v)) off the gaps; on the gap
//! for u_k it is the two-segment chain through
//!
//! ```text
//! (a_k, phi(u_k-)) -> (c_k, phi(u_k)) -> (b_k, phi(u_k+)),
//! ```
//!
//! with the interior node c_k = a_k + theta * (b_k - a_k). Together the
//! pair (b, g) is a continuous parametrization of the multivalued graph:
//! the point set {(b(v), g(v))} does not depend on the weights or theta.

use crate::flux::JumpFlux;
use crate::pl::PlFunction;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("weight assignment has {got} weights for {want} jumps")]
    WeightCount { got: usize, want: usize },
    #[error("weight #{0} is not a positive finite number")]
    BadWeight(usize),
    #[error("midpoint fraction theta must lie strictly inside (0, 1), got {0}")]
    BadTheta(f64),
    #[error("plateau for jump at {0} collapses at this floating-point resolution")]
    DegeneratePlateau(f64),
    #[error("flux dimensions differ: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error(transparent)]
    Pl(#[from] crate::pl::PlError),
    #[error(transparent)]
    Flux(#[from] crate::flux::FluxError),
}

/// Positive gap widths h_k, one per jump, in jump order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightAssignment {
    weights: Vec<f64>,
}

impl WeightAssignment {
    /// The default choice h_k = 2^{-k}, k = 1..count.
    pub fn dyadic(count: usize) -> Self {
        Self {
            weights: (1..=count as i32).map(|k| 2f64.powi(-k)).collect(),
        }
    }

    pub fn explicit(weights: Vec<f64>) -> Result<Self, ParamError> {
        for (i, &h) in weights.iter().enumerate() {
            if !(h.is_finite() && h > 0.0) {
                return Err(ParamError::BadWeight(i));
            }
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total mass c = sum h_k.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// One jump of the step map: location u_k and the gap [alpha(u_k-), alpha(u_k+)].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaJump {
    pub location: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Description of alpha as a monotone step-augmented map.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMap {
    jumps: Vec<AlphaJump>,
}

impl AlphaMap {
    pub fn jumps(&self) -> &[AlphaJump] {
        &self.jumps
    }

    /// The pair (alpha(u-), alpha(u+)); equal when u is not a jump location.
    pub fn eval(&self, u: f64) -> (f64, f64) {
        let mut below = 0.0;
        let mut through = 0.0;
        for j in &self.jumps {
            let h = j.upper - j.lower;
            if j.location < u {
                below += h;
                through += h;
            } else if j.location == u {
                through += h;
            }
        }
        (u + below, u + through)
    }

    /// The gap opened at jump k.
    pub fn gap(&self, k: usize) -> (f64, f64) {
        (self.jumps[k].lower, self.jumps[k].upper)
    }
}

/// Build the step map alpha(u) = u + sum_{u_k < u} h_k for the flux's jumps.
pub fn build_alpha(f: &JumpFlux, w: &WeightAssignment) -> Result<AlphaMap, ParamError> {
    if w.len() != f.jumps().len() {
        return Err(ParamError::WeightCount {
            got: w.len(),
            want: f.jumps().len(),
        });
    }
    let mut jumps = Vec::with_capacity(w.len());
    let mut prefix = 0.0;
    for (j, &h) in f.jumps().iter().zip(w.weights()) {
        let lower = j.location + prefix;
        prefix += h;
        jumps.push(AlphaJump {
            location: j.location,
            lower,
            upper: lower + h,
        });
    }
    Ok(AlphaMap { jumps })
}

/// Bookkeeping for one plateau of b: the v-interval [a, b] on which
/// b == location, the interior node c, and the width (== the weight h_k).
#[derive(Debug, Clone, PartialEq)]
pub struct Plateau {
    pub jump_index: usize,
    pub location: f64,
    pub a: f64,
    pub c: f64,
    pub b: f64,
    pub width: f64,
}

/// The continuous pair (b, g) on a shared v-breakpoint grid.
#[derive(Debug, Clone)]
pub struct Parametrization {
    dim: usize,
    b: PlFunction,
    g: PlFunction,
    plateaus: Vec<Plateau>,
    weights: WeightAssignment,
    theta: f64,
    state_range: (f64, f64),
    v_range: (f64, f64),
}

impl Parametrization {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The monotone, 1-Lipschitz state map b(v).
    pub fn b(&self) -> &PlFunction {
        &self.b
    }

    /// The flux trace g(v) in R^dim.
    pub fn g(&self) -> &PlFunction {
        &self.g
    }

    pub fn plateaus(&self) -> &[Plateau] {
        &self.plateaus
    }

    pub fn weights(&self) -> &WeightAssignment {
        &self.weights
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn state_range(&self) -> (f64, f64) {
        self.state_range
    }

    /// [alpha(u_min), alpha(u_max)].
    pub fn v_range(&self) -> (f64, f64) {
        self.v_range
    }

    /// Total plateau mass c = sum h_k.
    pub fn total_weight(&self) -> f64 {
        self.weights.total()
    }
}

/// Build the Lemma-1 parametrization of the (multivalued) flux graph.
///
/// `theta` places the interior plateau node at c_k = a_k + theta (b_k - a_k).
pub fn build_parametrization(
    f: &JumpFlux,
    w: &WeightAssignment,
    theta: f64,
) -> Result<Parametrization, ParamError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(ParamError::BadTheta(theta));
    }
    build_alpha(f, w)?; // validates the weight count
    let dim = f.dim();

    let mut vs: Vec<f64> = Vec::new();
    let mut bs: Vec<f64> = Vec::new();
    let mut gs: Vec<f64> = Vec::new();
    let mut plateaus = Vec::new();

    let push = |v: f64, u: f64, row: &[f64], vs: &mut Vec<f64>, bs: &mut Vec<f64>, gs: &mut Vec<f64>| {
        vs.push(v);
        bs.push(u);
        gs.extend_from_slice(row);
    };

    let mut offset = 0.0;
    for (k, piece) in f.pieces().iter().enumerate() {
        let skip_first = k > 0; // shared with the plateau's right endpoint
        for i in 0..piece.len() {
            if i == 0 && skip_first {
                continue;
            }
            let u = piece.breakpoints()[i];
            push(u + offset, u, piece.value_row(i), &mut vs, &mut bs, &mut gs);
        }
        if k < f.jumps().len() {
            let jump = &f.jumps()[k];
            let h = w.weights()[k];
            let a = *vs.last().unwrap(); // == u_k + offset
            let c = a + theta * h;
            let b = a + h;
            if !(a < c && c < b) {
                return Err(ParamError::DegeneratePlateau(jump.location));
            }
            push(c, jump.location, &jump.point, &mut vs, &mut bs, &mut gs);
            push(b, jump.location, &jump.right, &mut vs, &mut bs, &mut gs);
            plateaus.push(Plateau {
                jump_index: k,
                location: jump.location,
                a,
                c,
                b,
                width: h,
            });
            offset += h;
        }
    }

    let v_range = (vs[0], *vs.last().unwrap());
    let b = PlFunction::scalar(vs.clone(), bs)?;
    let g = PlFunction::new(vs, gs, dim)?;
    Ok(Parametrization {
        dim,
        b,
        g,
        plateaus,
        weights: w.clone(),
        theta,
        state_range: f.state_range(),
        v_range,
    })
}

/// Symmetric Hausdorff distance between the curves {(b1(v), g1(v))} and
/// {(b2(v), g2(v))} as point sets in R^{1+n}, estimated by dense sampling
/// of each polyline against exact point-to-segment distances on the other.
pub fn hausdorff_distance(
    b1: &PlFunction,
    g1: &PlFunction,
    b2: &PlFunction,
    g2: &PlFunction,
) -> Result<f64, ParamError> {
    if g1.dim() != g2.dim() {
        return Err(ParamError::DimMismatch(g1.dim(), g2.dim()));
    }
    let p = curve_vertices(b1, g1)?;
    let q = curve_vertices(b2, g2)?;
    Ok(directed_hausdorff(&p, &q).max(directed_hausdorff(&q, &p)))
}

/// True iff the two parametrized graphs agree within Hausdorff distance `tol`.
pub fn graphs_equivalent(
    p: &Parametrization,
    q: &Parametrization,
    tol: f64,
) -> Result<bool, ParamError> {
    if p.dim() != q.dim() {
        return Err(ParamError::DimMismatch(p.dim(), q.dim()));
    }
    Ok(hausdorff_distance(p.b(), p.g(), q.b(), q.g())? <= tol)
}

/// Vertices of the polyline v -> (b(v), g(v)) over the union of both
/// breakpoint grids.
fn curve_vertices(b: &PlFunction, g: &PlFunction) -> Result<Vec<Vec<f64>>, ParamError> {
    let dim = g.dim();
    let mut knots: Vec<f64> = b
        .breakpoints()
        .iter()
        .chain(g.breakpoints().iter())
        .copied()
        .collect();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    let (blo, bhi) = b.x_range();
    let (glo, ghi) = g.x_range();
    let lo = blo.max(glo);
    let hi = bhi.min(ghi);
    let mut out = Vec::new();
    let mut row = vec![0.0; dim];
    for v in knots {
        if v < lo || v > hi {
            continue;
        }
        let mut vertex = Vec::with_capacity(1 + dim);
        vertex.push(b.try_eval1(v)?);
        g.eval_into(v, &mut row)?;
        vertex.extend_from_slice(&row);
        out.push(vertex);
    }
    Ok(out)
}

const SAMPLES_PER_EDGE: usize = 16;

fn directed_hausdorff(p: &[Vec<f64>], q: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut probe = |pt: &[f64]| {
        let mut best = f64::INFINITY;
        for e in q.windows(2) {
            best = best.min(point_segment_dist(pt, &e[0], &e[1]));
            if best == 0.0 {
                break;
            }
        }
        if q.len() == 1 {
            best = dist(pt, &q[0]);
        }
        worst = worst.max(best);
    };
    if p.len() == 1 {
        probe(&p[0]);
        return worst;
    }
    let mut pt = vec![0.0; p[0].len()];
    for e in p.windows(2) {
        for s in 0..=SAMPLES_PER_EDGE {
            let t = s as f64 / SAMPLES_PER_EDGE as f64;
            for (i, v) in pt.iter_mut().enumerate() {
                *v = e[0][i] + t * (e[1][i] - e[0][i]);
            }
            probe(&pt);
        }
    }
    worst
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn point_segment_dist(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab2 = 0.0;
    let mut ap_ab = 0.0;
    for i in 0..p.len() {
        let d = b[i] - a[i];
        ab2 += d * d;
        ap_ab += (p[i] - a[i]) * d;
    }
    let t = if ab2 > 0.0 { (ap_ab / ab2).clamp(0.0, 1.0) } else { 0.0 };
    let mut d2 = 0.0;
    for i in 0..p.len() {
        let c = a[i] + t * (b[i] - a[i]);
        d2 += (p[i] - c) * (p[i] - c);
    }
    d2.sqrt()
}
