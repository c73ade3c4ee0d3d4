//! Seeded random problem generators for property and acceptance suites.
//!
//! Jump fluxes are generated on dyadic grids (locations, weights and values
//! all exactly representable), so structural identities of the
//! parametrization — plateau widths, slopes, sandwich bounds — can be
//! asserted with zero tolerance. Periodic scheme scenarios are constrained
//! to moderate Lipschitz constants so entropy residuals stay above the
//! floating-point noise floor of the 1e-12 checks.

use crate::flux::{JumpFlux, JumpPoint};
use crate::parametrize::WeightAssignment;
use crate::pl::PlFunction;
use crate::scheme::{BoundaryMode, FluxKind, GridSolution, SchemeParams};
use rand::Rng;

/// Dyadic value: i / 2^scale.
fn dy(i: i64, scale: i32) -> f64 {
    i as f64 * 2f64.powi(-scale)
}

/// Random jump flux on the state range [-8, 8]: 1..=5 jumps at distinct
/// multiples of 1/64 inside (-4, 4), values at multiples of 1/256 in
/// [-2, 2], pieces with up to 3 dyadic interior breakpoints.
pub fn random_dyadic_jump_flux(rng: &mut impl Rng, dim: usize) -> JumpFlux {
    let range = (-8.0, 8.0);
    let jump_count = rng.random_range(1..=5);
    let mut slots: Vec<i64> = Vec::new();
    while slots.len() < jump_count {
        let i = rng.random_range(-255..=255i64);
        if !slots.contains(&i) {
            slots.push(i);
        }
    }
    slots.sort_unstable();

    let mut val = |rng: &mut dyn rand::RngCore| -> Vec<f64> {
        (0..dim).map(|_| dy(rng.random_range(-512..=512), 8)).collect()
    };
    let mut jumps: Vec<JumpPoint> = Vec::new();
    for &s in &slots {
        let left = val(rng);
        let mut point = val(rng);
        let right = val(rng);
        if left == point && point == right {
            point[0] += dy(1, 8); // keep it a genuine discontinuity
        }
        jumps.push(JumpPoint::new(dy(s, 6), left, point, right));
    }

    let mut pieces = Vec::with_capacity(jumps.len() + 1);
    for g in 0..=jumps.len() {
        let (lo_i, lo_vals) = if g == 0 {
            (-512i64, val(rng))
        } else {
            (slots[g - 1], jumps[g - 1].right.clone())
        };
        let (hi_i, hi_vals) = if g == jumps.len() {
            (512i64, val(rng))
        } else {
            (slots[g], jumps[g].left.clone())
        };
        let mut inner: Vec<i64> = Vec::new();
        for _ in 0..rng.random_range(0..=3usize) {
            if hi_i - lo_i > 1 {
                let i = rng.random_range(lo_i + 1..hi_i);
                if !inner.contains(&i) {
                    inner.push(i);
                }
            }
        }
        inner.sort_unstable();
        let mut xs = vec![dy(lo_i, 6)];
        let mut ys = lo_vals;
        for &i in &inner {
            xs.push(dy(i, 6));
            ys.extend(val(rng));
        }
        xs.push(dy(hi_i, 6));
        ys.extend(hi_vals);
        pieces.push(PlFunction::new(xs, ys, dim).unwrap());
    }
    JumpFlux::new(dim, range, jumps, pieces).unwrap()
}

/// Random dyadic plateau weights 2^{-j}, j in 1..=6.
pub fn random_dyadic_weights(rng: &mut impl Rng, count: usize) -> WeightAssignment {
    WeightAssignment::explicit((0..count).map(|_| dy(1, rng.random_range(1..=6))).collect())
        .unwrap()
}

/// A dyadic midpoint fraction in {1/4, 1/2, 3/4}.
pub fn random_dyadic_theta(rng: &mut impl Rng) -> f64 {
    [0.25, 0.5, 0.75][rng.random_range(0..3usize)]
}

/// One random periodic scheme scenario: a scalar PL flux table with
/// Lipschitz constant at most ~6, periodic initial data inside the table's
/// state range, and scheme parameters keeping dt well above 1e-3.
pub struct PeriodicScenario {
    pub phi: PlFunction,
    pub initial: GridSolution,
    pub params: SchemeParams,
}

pub fn random_periodic_scenario(rng: &mut impl Rng) -> PeriodicScenario {
    let kind = if rng.random_bool(0.5) {
        FluxKind::Godunov
    } else {
        FluxKind::EngquistOsher
    };
    let params = SchemeParams::new(0.9, kind).unwrap();

    let phi = if rng.random_bool(0.5) {
        // Continuous random table on [-4, 4]: breakpoints every 1/2,
        // value steps at most 1 => slopes at most 2.
        let n = 16;
        let xs: Vec<f64> = (0..=n).map(|i| -4.0 + 0.5 * i as f64).collect();
        let mut ys = vec![dy(rng.random_range(-32..=32), 5)];
        for i in 1..=n {
            let step = dy(rng.random_range(-16..=16), 4);
            ys.push(ys[i - 1] + step);
        }
        PlFunction::scalar(xs, ys).unwrap()
    } else {
        // Regularized random jump flux with a wide plateau and small r:
        // plateau slopes r * |dg| / (theta h) <= 3 * 2 / 1 = 6.
        let location = dy(rng.random_range(-64..=64), 6);
        let lo = -8.0;
        let hi = 8.0;
        let vals = |rng: &mut dyn rand::RngCore| vec![dy(rng.random_range(-128..=128), 7)];
        let left = vals(rng);
        let mut point = vals(rng);
        let right = vals(rng);
        if left == point && point == right {
            point[0] += dy(1, 7);
        }
        let f = JumpFlux::new(
            1,
            (lo, hi),
            vec![JumpPoint::new(location, left.clone(), point, right.clone())],
            vec![
                PlFunction::scalar(vec![lo, location], vec![left[0], left[0]]).unwrap(),
                PlFunction::scalar(vec![location, hi], vec![right[0], right[0]]).unwrap(),
            ],
        )
        .unwrap();
        let w = WeightAssignment::explicit(vec![2.0]).unwrap();
        let p = crate::parametrize::build_parametrization(&f, &w, 0.5).unwrap();
        let r = rng.random_range(2..=3u64);
        crate::regularize::regularize(&p, r).unwrap().phi_r().clone()
    };

    let cells = 64;
    let modes = rng.random_range(1..=3);
    let amp = dy(rng.random_range(8..=24), 5);
    let base = dy(rng.random_range(-16..=16), 5);
    let initial = GridSolution::from_centers(0.0, 1.0, cells, BoundaryMode::Periodic, |x| {
        base + amp * (2.0 * std::f64::consts::PI * modes as f64 * x).sin()
    })
    .unwrap();
    PeriodicScenario {
        phi,
        initial,
        params,
    }
}
