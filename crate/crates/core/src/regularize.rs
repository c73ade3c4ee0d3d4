//! Strictly monotone regularization of the parametrization.
//!
//! For r >= 1 the map b_r(v) = b(v) + v/r is strictly increasing (segment
//! slopes in [1/r, 1 + 1/r]), so the flux becomes the single-valued
//! continuous function
//!
//! ```text
//! phi_r(u) = g(b_r^{-1}(u)),
//! ```
//!
//! which is materialized exactly on the pushed-forward breakpoint grid
//! u_j = b_r(v_j). The grid is extended with identity-slope tails beyond
//! the nominal v-range (flat in g) so that phi_r covers the declared state
//! range for every r; the added tails carry no new slope.

use crate::parametrize::Parametrization;
use crate::pl::PlFunction;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegError {
    #[error("regularization index r must be at least 1, got {0}")]
    BadIndex(u64),
    #[error("b_r breakpoints collapse at this floating-point resolution (index {0})")]
    GridCollapse(usize),
    #[error("state {arg} outside the regularized range [{lo}, {hi}]")]
    OutOfRange { arg: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Pl(#[from] crate::pl::PlError),
}

/// The strictly increasing map b_r and the single-valued flux phi_r.
#[derive(Debug, Clone)]
pub struct RegularizedFlux {
    r: u64,
    dim: usize,
    /// b_r on the (padded) v grid.
    b_r: PlFunction,
    /// phi_r on the u grid b_r(v_j); values are g(v_j).
    phi_r: PlFunction,
}

/// Build b_r(v) = b(v) + v/r and phi_r = g o b_r^{-1}.
pub fn regularize(p: &Parametrization, r: u64) -> Result<RegularizedFlux, RegError> {
    if r == 0 {
        return Err(RegError::BadIndex(r));
    }
    let rf = r as f64;
    let dim = p.dim();
    let (u_min, u_max) = p.state_range();
    let (v_min, v_max) = p.v_range();
    // Identity-slope tails generous enough that b_r(v_min - pad) < u_min and
    // b_r(v_max + pad) > u_max for every r >= 1.
    let pad = 1.0 + u_min.abs() + u_max.abs() + p.total_weight();

    let base = p.b().breakpoints();
    let n = base.len() + 2;
    let mut vs = Vec::with_capacity(n);
    let mut bs = Vec::with_capacity(n);
    let mut gs = Vec::with_capacity(n * dim);

    vs.push(v_min - pad);
    bs.push(u_min - pad);
    gs.extend_from_slice(p.g().value_row(0));
    for i in 0..base.len() {
        vs.push(base[i]);
        bs.push(p.b().values_flat()[i]);
        gs.extend_from_slice(p.g().value_row(i));
    }
    vs.push(v_max + pad);
    bs.push(u_max + pad);
    gs.extend_from_slice(p.g().value_row(base.len() - 1));

    let mut brs = Vec::with_capacity(n);
    for (&v, &b) in vs.iter().zip(&bs) {
        brs.push(b + v / rf);
    }
    for i in 1..brs.len() {
        if brs[i] <= brs[i - 1] {
            return Err(RegError::GridCollapse(i));
        }
    }

    let b_r = PlFunction::scalar(vs, brs.clone())?;
    let phi_r = PlFunction::new(brs, gs, dim)?;
    Ok(RegularizedFlux { r, dim, b_r, phi_r })
}

impl RegularizedFlux {
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn b_r(&self) -> &PlFunction {
        &self.b_r
    }

    pub fn phi_r(&self) -> &PlFunction {
        &self.phi_r
    }

    /// Exact piecewise-linear inversion of b_r (segment lookup plus one
    /// linear solve); monotone in u, exact at breakpoints.
    pub fn invert_br(&self, u: f64) -> Result<f64, RegError> {
        let us = self.phi_r.breakpoints();
        let vs = self.b_r.breakpoints();
        let (lo, hi) = self.phi_r.x_range();
        if !(u >= lo && u <= hi) {
            return Err(RegError::OutOfRange { arg: u, lo, hi });
        }
        match us.binary_search_by(|p| p.partial_cmp(&u).unwrap()) {
            Ok(i) => Ok(vs[i]),
            Err(i) => {
                let i = i - 1;
                let t = (u - us[i]) / (us[i + 1] - us[i]);
                let v = vs[i] + t * (vs[i + 1] - vs[i]);
                Ok(v.max(vs[i]).min(vs[i + 1]))
            }
        }
    }

    /// Largest segment slope magnitude of phi_r: a Lipschitz constant used
    /// by the CFL condition. Grows like r over plateaus.
    pub fn lipschitz_bound(&self) -> f64 {
        self.phi_r.max_slope_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::presets;
    use crate::parametrize::{build_parametrization, WeightAssignment};

    fn heaviside_param() -> Parametrization {
        let f = presets::heaviside((-2.0, 2.0));
        build_parametrization(&f, &WeightAssignment::explicit(vec![1.0]).unwrap(), 0.5).unwrap()
    }

    /// Hand-composed b_1 on the three pieces: 2v, v, 2v - 1.
    #[test]
    fn heaviside_r1_tables() {
        let rf = regularize(&heaviside_param(), 1).unwrap();
        for (&v, &br) in rf
            .b_r()
            .breakpoints()
            .iter()
            .zip(rf.b_r().values_flat())
        {
            let expect = if v < 0.0 {
                2.0 * v
            } else if v <= 1.0 {
                v
            } else {
                2.0 * v - 1.0
            };
            assert_eq!(br, expect, "b_1 at v={v}");
        }
        assert_eq!(rf.invert_br(0.5).unwrap(), 0.5);
    }

    #[test]
    fn br_uniform_distance_to_b() {
        let p = heaviside_param();
        let rf = regularize(&p, 4).unwrap();
        // max over the nominal grid of |b_r - b| = max|v| / r.
        let mut measured: f64 = 0.0;
        let mut vmax: f64 = 0.0;
        for &v in p.b().breakpoints() {
            let d = (rf.b_r().eval1(v) - p.b().eval1(v)).abs();
            measured = measured.max(d);
            vmax = vmax.max(v.abs());
        }
        assert_eq!(measured, vmax / 4.0);
    }

    #[test]
    fn burgers_phi_r_converges() {
        let f = presets::burgers((-2.0, 2.0), 256);
        let p = build_parametrization(&f, &WeightAssignment::dyadic(0), 0.5).unwrap();
        let mut prev = f64::INFINITY;
        for r in [1u64, 8, 64, 512] {
            let rf = regularize(&p, r).unwrap();
            let mut sup: f64 = 0.0;
            for i in 0..=200 {
                let u = -2.0 + 4.0 * (i as f64 / 200.0);
                let d = (rf.phi_r().eval1(u) - 0.5 * u * u).abs();
                sup = sup.max(d);
            }
            assert!(sup < prev || sup == 0.0, "sup error not decreasing at r={r}");
            prev = sup;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn invert_br_exact_at_breakpoints_and_monotone() {
        let rf = regularize(&heaviside_param(), 7).unwrap();
        let us = rf.phi_r().breakpoints().to_vec();
        let vs = rf.b_r().breakpoints().to_vec();
        for (u, v) in us.iter().zip(&vs) {
            assert_eq!(rf.invert_br(*u).unwrap(), *v);
        }
        let (lo, hi) = rf.phi_r().x_range();
        let mut last = f64::NEG_INFINITY;
        for i in 0..=500 {
            let u = (lo + (hi - lo) * (i as f64 / 500.0)).min(hi);
            let v = rf.invert_br(u).unwrap();
            assert!(v >= last);
            last = v;
            let round = rf.b_r().eval1(v);
            let scale = u.abs().max(1.0);
            assert!((round - u).abs() <= 1e-13 * scale, "round trip at u={u}");
        }
        assert!(matches!(
            rf.invert_br(lo - 1.0),
            Err(RegError::OutOfRange { .. })
        ));
    }

    #[test]
    fn lipschitz_grows_with_r() {
        let p = heaviside_param();
        assert_eq!(regularize(&p, 1).unwrap().lipschitz_bound(), 1.0);
        assert_eq!(regularize(&p, 10).unwrap().lipschitz_bound(), 10.0);
        let mut prev = 0.0;
        for r in [1u64, 2, 4, 8, 16] {
            let l = regularize(&p, r).unwrap().lipschitz_bound();
            assert!(l >= prev);
            prev = l;
        }
    }

    #[test]
    fn linear_flux_lipschitz() {
        let f = presets::linear((-1.0, 1.0), 2.0);
        let p = build_parametrization(&f, &WeightAssignment::dyadic(0), 0.5).unwrap();
        let rf = regularize(&p, 1_000_000).unwrap();
        let l = rf.lipschitz_bound();
        assert!((l - 2.0).abs() < 1e-4, "lipschitz {l}");
    }

    #[test]
    fn slope_bounds_hold() {
        let rf = regularize(&heaviside_param(), 3).unwrap();
        for s in rf.b_r().slopes().unwrap() {
            assert!(s >= 1.0 / 3.0 - 1e-12 && s <= 1.0 + 1.0 / 3.0 + 1e-12);
        }
    }

    #[test]
    fn consistency_at_breakpoints() {
        let p = heaviside_param();
        let rf = regularize(&p, 5).unwrap();
        // phi_r(b_r(v_j)) == g(v_j) exactly on the nominal grid.
        for (i, &v) in p.b().breakpoints().iter().enumerate() {
            let u = rf.b_r().eval1(v);
            assert_eq!(rf.phi_r().eval1(u), p.g().values_flat()[i]);
        }
    }

    #[test]
    fn rejects_r_zero() {
        assert!(matches!(
            regularize(&heaviside_param(), 0),
            Err(RegError::BadIndex(0))
        ));
    }

    #[test]
    fn covers_declared_state_range_for_all_r() {
        let p = heaviside_param();
        for r in [1u64, 2, 17, 1024, 1 << 40] {
            let rf = regularize(&p, r).unwrap();
            let (lo, hi) = rf.phi_r().x_range();
            assert!(lo <= -2.0 && hi >= 2.0, "r={r}: [{lo}, {hi}]");
        }
    }
}
