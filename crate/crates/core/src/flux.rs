//! Jump-continuous flux functions with a finite discontinuity set.
//!
//! A `JumpFlux` represents φ: R -> R^n on a declared state range
//! `[u_min, u_max]`. At finitely many interior points u_k it carries the
//! one-sided limits φ(u_k-), φ(u_k+) and the point value φ(u_k); between
//! jumps the continuous part is stored as a sampled piecewise-linear table.
//! Piece endpoints must agree bit-for-bit with the adjacent one-sided
//! values: the tables *define* those limits.

use crate::pl::PlFunction;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FluxError {
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("state range [{0}, {1}] is empty or not finite")]
    BadStateRange(f64, f64),
    #[error("jump #{0} has a value of dimension different from the flux dimension")]
    JumpDimMismatch(usize),
    #[error("jump locations must be strictly increasing (jump #{0})")]
    UnsortedJumps(usize),
    #[error("jump at {0} lies outside the open state range ({1}, {2})")]
    JumpOutsideRange(f64, f64, f64),
    #[error("expected {expected} continuous pieces covering the gaps, got {got}")]
    PieceCount { expected: usize, got: usize },
    #[error("piece #{piece} covers [{got_lo}, {got_hi}] but the gap is [{want_lo}, {want_hi}]")]
    PieceGapMismatch {
        piece: usize,
        got_lo: f64,
        got_hi: f64,
        want_lo: f64,
        want_hi: f64,
    },
    #[error("piece #{piece} has dimension {got}, flux has dimension {want}")]
    PieceDimMismatch { piece: usize, got: usize, want: usize },
    #[error("piece #{piece} endpoint value at u={at} does not equal the declared one-sided limit")]
    PieceEndpointMismatch { piece: usize, at: f64 },
    #[error("jump #{0} has a non-finite value")]
    NonFiniteJump(usize),
    #[error("state {arg} outside the state range [{lo}, {hi}]")]
    OutOfRange { arg: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Pl(#[from] crate::pl::PlError),
}

/// Which branch of the flux to read at a state value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Point,
    Right,
}

/// One discontinuity: the one-sided limits and the point value, each in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPoint {
    pub location: f64,
    pub left: Vec<f64>,
    pub point: Vec<f64>,
    pub right: Vec<f64>,
}

impl JumpPoint {
    pub fn new(location: f64, left: Vec<f64>, point: Vec<f64>, right: Vec<f64>) -> Self {
        Self {
            location,
            left,
            point,
            right,
        }
    }

    /// A jump where left, point and right coincide is not a discontinuity.
    pub fn is_degenerate(&self) -> bool {
        self.left == self.point && self.point == self.right
    }
}

/// A flux with finitely many jumps, total on its declared state range.
#[derive(Debug, Clone)]
pub struct JumpFlux {
    dim: usize,
    state_range: (f64, f64),
    jumps: Vec<JumpPoint>,
    /// `pieces[i]` covers the i-th gap: [u_min, u_1], [u_1, u_2], ...,
    /// [u_K, u_max]. Always `jumps.len() + 1` entries.
    pieces: Vec<PlFunction>,
    /// Locations of degenerate jumps dropped at construction.
    dropped: Vec<f64>,
}

impl JumpFlux {
    /// Validate and build a flux. Degenerate jumps (all three values equal)
    /// are removed and recorded; their neighbouring pieces are merged.
    pub fn new(
        dim: usize,
        state_range: (f64, f64),
        jumps: Vec<JumpPoint>,
        pieces: Vec<PlFunction>,
    ) -> Result<Self, FluxError> {
        if dim == 0 {
            return Err(FluxError::ZeroDim);
        }
        let (lo, hi) = state_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FluxError::BadStateRange(lo, hi));
        }
        for (i, j) in jumps.iter().enumerate() {
            if j.left.len() != dim || j.point.len() != dim || j.right.len() != dim {
                return Err(FluxError::JumpDimMismatch(i));
            }
            if !j.location.is_finite()
                || j.left.iter().any(|v| !v.is_finite())
                || j.point.iter().any(|v| !v.is_finite())
                || j.right.iter().any(|v| !v.is_finite())
            {
                return Err(FluxError::NonFiniteJump(i));
            }
            if i > 0 && j.location <= jumps[i - 1].location {
                return Err(FluxError::UnsortedJumps(i));
            }
            if j.location <= lo || j.location >= hi {
                return Err(FluxError::JumpOutsideRange(j.location, lo, hi));
            }
        }
        if pieces.len() != jumps.len() + 1 {
            return Err(FluxError::PieceCount {
                expected: jumps.len() + 1,
                got: pieces.len(),
            });
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.dim() != dim {
                return Err(FluxError::PieceDimMismatch {
                    piece: i,
                    got: p.dim(),
                    want: dim,
                });
            }
            let want_lo = if i == 0 { lo } else { jumps[i - 1].location };
            let want_hi = if i == jumps.len() { hi } else { jumps[i].location };
            let (got_lo, got_hi) = p.x_range();
            if got_lo != want_lo || got_hi != want_hi {
                return Err(FluxError::PieceGapMismatch {
                    piece: i,
                    got_lo,
                    got_hi,
                    want_lo,
                    want_hi,
                });
            }
        }
        // Piece endpoints define the one-sided limits; require bit equality.
        for (i, j) in jumps.iter().enumerate() {
            let below = &pieces[i];
            let above = &pieces[i + 1];
            if below.value_row(below.len() - 1) != j.left.as_slice() {
                return Err(FluxError::PieceEndpointMismatch {
                    piece: i,
                    at: j.location,
                });
            }
            if above.value_row(0) != j.right.as_slice() {
                return Err(FluxError::PieceEndpointMismatch {
                    piece: i + 1,
                    at: j.location,
                });
            }
        }

        // Drop degenerate jumps, stitching the adjacent pieces together.
        let mut dropped = Vec::new();
        let mut kept_jumps: Vec<JumpPoint> = Vec::with_capacity(jumps.len());
        let mut kept_pieces: Vec<PlFunction> = Vec::with_capacity(pieces.len());
        let mut pieces_iter = pieces.into_iter();
        kept_pieces.push(pieces_iter.next().unwrap());
        for j in jumps {
            let next_piece = pieces_iter.next().unwrap();
            if j.is_degenerate() {
                dropped.push(j.location);
                let prev = kept_pieces.pop().unwrap();
                kept_pieces.push(concat_pieces(prev, next_piece, dim)?);
            } else {
                kept_jumps.push(j);
                kept_pieces.push(next_piece);
            }
        }

        Ok(Self {
            dim,
            state_range,
            jumps: kept_jumps,
            pieces: kept_pieces,
            dropped,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state_range(&self) -> (f64, f64) {
        self.state_range
    }

    pub fn jumps(&self) -> &[JumpPoint] {
        &self.jumps
    }

    pub fn pieces(&self) -> &[PlFunction] {
        &self.pieces
    }

    /// Locations of degenerate jumps removed at construction.
    pub fn dropped_jumps(&self) -> &[f64] {
        &self.dropped
    }

    pub fn is_continuous(&self) -> bool {
        self.jumps.is_empty()
    }

    /// The sorted set D of retained discontinuity locations.
    pub fn discontinuity_set(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.location).collect()
    }

    /// One-sided evaluation. Away from D all three sides agree.
    pub fn eval_sided(&self, u: f64, side: Side) -> Result<Vec<f64>, FluxError> {
        let mut out = vec![0.0; self.dim];
        self.eval_sided_into(u, side, &mut out)?;
        Ok(out)
    }

    pub fn eval_sided_into(&self, u: f64, side: Side, out: &mut [f64]) -> Result<(), FluxError> {
        let (lo, hi) = self.state_range;
        if !(u >= lo && u <= hi) {
            return Err(FluxError::OutOfRange { arg: u, lo, hi });
        }
        if let Ok(k) = self
            .jumps
            .binary_search_by(|j| j.location.partial_cmp(&u).unwrap())
        {
            let j = &self.jumps[k];
            let row = match side {
                Side::Left => &j.left,
                Side::Point => &j.point,
                Side::Right => &j.right,
            };
            out.copy_from_slice(row);
            return Ok(());
        }
        let piece = self
            .jumps
            .partition_point(|j| j.location < u);
        self.pieces[piece].eval_into(u, out)?;
        Ok(())
    }

    /// Scalar point-value evaluation; requires dimension 1.
    pub fn eval_point1(&self, u: f64) -> Result<f64, FluxError> {
        let mut out = [0.0];
        self.eval_sided_into(u, Side::Point, &mut out)?;
        Ok(out[0])
    }
}

fn concat_pieces(a: PlFunction, b: PlFunction, dim: usize) -> Result<PlFunction, FluxError> {
    let mut xs = a.breakpoints().to_vec();
    let mut ys = a.values_flat().to_vec();
    // The seam values are bitwise equal by the endpoint checks above.
    xs.extend_from_slice(&b.breakpoints()[1..]);
    ys.extend_from_slice(&b.values_flat()[dim..]);
    Ok(PlFunction::new(xs, ys, dim)?)
}

/// Ready-made fluxes used by the examples and the scenario registry.
pub mod presets {
    use super::*;

    /// Heaviside flux H(u) = sign^+ u with a configurable point value at 0.
    pub fn heaviside_with_point(state_range: (f64, f64), point: f64) -> JumpFlux {
        let (lo, hi) = state_range;
        JumpFlux::new(
            1,
            state_range,
            vec![JumpPoint::new(0.0, vec![0.0], vec![point], vec![1.0])],
            vec![
                PlFunction::scalar(vec![lo, 0.0], vec![0.0, 0.0]).unwrap(),
                PlFunction::scalar(vec![0.0, hi], vec![1.0, 1.0]).unwrap(),
            ],
        )
        .unwrap()
    }

    /// Heaviside flux with the H(0) = 1/2 convention, under which the
    /// two-segment extension at the jump reduces to a single straight chord.
    pub fn heaviside(state_range: (f64, f64)) -> JumpFlux {
        heaviside_with_point(state_range, 0.5)
    }

    /// Indicator flux of the singleton {0}: zero everywhere except χ(0) = 1.
    pub fn indicator(state_range: (f64, f64)) -> JumpFlux {
        let (lo, hi) = state_range;
        JumpFlux::new(
            1,
            state_range,
            vec![JumpPoint::new(0.0, vec![0.0], vec![1.0], vec![0.0])],
            vec![
                PlFunction::scalar(vec![lo, 0.0], vec![0.0, 0.0]).unwrap(),
                PlFunction::scalar(vec![0.0, hi], vec![0.0, 0.0]).unwrap(),
            ],
        )
        .unwrap()
    }

    /// Burgers flux u^2/2 sampled on `intervals` uniform segments. No jumps.
    pub fn burgers(state_range: (f64, f64), intervals: usize) -> JumpFlux {
        let (lo, hi) = state_range;
        let piece = PlFunction::sample_scalar(lo, hi, intervals, |u| 0.5 * u * u).unwrap();
        JumpFlux::new(1, state_range, vec![], vec![piece]).unwrap()
    }

    /// Linear advection flux a*u. No jumps.
    pub fn linear(state_range: (f64, f64), speed: f64) -> JumpFlux {
        let (lo, hi) = state_range;
        let piece = PlFunction::scalar(vec![lo, hi], vec![speed * lo, speed * hi]).unwrap();
        JumpFlux::new(1, state_range, vec![], vec![piece]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;

    #[test]
    fn heaviside_is_a_valid_jump_flux() {
        let f = heaviside_with_point((-2.0, 2.0), 1.0);
        assert_eq!(f.dim(), 1);
        assert_eq!(f.discontinuity_set(), vec![0.0]);
        assert!(f.dropped_jumps().is_empty());
    }

    #[test]
    fn burgers_has_empty_discontinuity_set() {
        let f = burgers((-2.0, 2.0), 400);
        assert!(f.is_continuous());
        assert_eq!(f.discontinuity_set(), Vec::<f64>::new());
    }

    #[test]
    fn duplicate_jump_locations_rejected() {
        let mk = |loc| JumpPoint::new(loc, vec![0.0], vec![1.0], vec![1.0]);
        let piece = PlFunction::scalar(vec![-1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let err = JumpFlux::new(1, (-1.0, 1.0), vec![mk(0.0), mk(0.0)], vec![piece; 3]).unwrap_err();
        assert!(matches!(err, FluxError::UnsortedJumps(1)));
    }

    #[test]
    fn eval_sided_triples() {
        let f = heaviside_with_point((-2.0, 2.0), 1.0);
        assert_eq!(f.eval_sided(0.0, Side::Left).unwrap(), vec![0.0]);
        assert_eq!(f.eval_sided(0.0, Side::Point).unwrap(), vec![1.0]);
        assert_eq!(f.eval_sided(0.0, Side::Right).unwrap(), vec![1.0]);
        // Continuity away from D.
        for side in [Side::Left, Side::Point, Side::Right] {
            assert_eq!(f.eval_sided(0.5, side).unwrap(), vec![1.0]);
        }
        let chi = indicator((-2.0, 2.0));
        assert_eq!(chi.eval_sided(0.0, Side::Left).unwrap(), vec![0.0]);
        assert_eq!(chi.eval_sided(0.0, Side::Point).unwrap(), vec![1.0]);
        assert_eq!(chi.eval_sided(0.0, Side::Right).unwrap(), vec![0.0]);
    }

    #[test]
    fn eval_outside_state_range_errors() {
        let f = heaviside((-2.0, 2.0));
        assert!(matches!(
            f.eval_sided(3.0, Side::Point),
            Err(FluxError::OutOfRange { .. })
        ));
    }

    #[test]
    fn discontinuity_set_echoes_construction() {
        let piece = |a: f64, b: f64, v: f64| PlFunction::scalar(vec![a, b], vec![v, v]).unwrap();
        let f = JumpFlux::new(
            1,
            (-3.0, 3.0),
            vec![
                JumpPoint::new(-1.0, vec![0.0], vec![0.5], vec![1.0]),
                JumpPoint::new(2.0, vec![1.0], vec![2.0], vec![3.0]),
            ],
            vec![piece(-3.0, -1.0, 0.0), piece(-1.0, 2.0, 1.0), piece(2.0, 3.0, 3.0)],
        )
        .unwrap();
        assert_eq!(f.discontinuity_set(), vec![-1.0, 2.0]);
    }

    #[test]
    fn degenerate_jumps_dropped_with_record() {
        let piece = |a: f64, b: f64, v: f64| PlFunction::scalar(vec![a, b], vec![v, v]).unwrap();
        let f = JumpFlux::new(
            1,
            (-1.0, 1.0),
            vec![JumpPoint::new(0.0, vec![0.5], vec![0.5], vec![0.5])],
            vec![piece(-1.0, 0.0, 0.5), piece(0.0, 1.0, 0.5)],
        )
        .unwrap();
        assert!(f.is_continuous());
        assert_eq!(f.dropped_jumps(), &[0.0]);
        assert_eq!(f.pieces().len(), 1);
        assert_eq!(f.eval_point1(0.0).unwrap(), 0.5);
    }

    #[test]
    fn piece_endpoint_mismatch_rejected() {
        let f = JumpFlux::new(
            1,
            (-1.0, 1.0),
            vec![JumpPoint::new(0.0, vec![0.25], vec![0.5], vec![1.0])],
            vec![
                PlFunction::scalar(vec![-1.0, 0.0], vec![0.0, 0.0]).unwrap(),
                PlFunction::scalar(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap(),
            ],
        );
        assert!(matches!(f, Err(FluxError::PieceEndpointMismatch { .. })));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let f = burgers((-2.0, 2.0), 1000);
        let a = f.eval_point1(0.7311).unwrap();
        let b = f.eval_point1(0.7311).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
