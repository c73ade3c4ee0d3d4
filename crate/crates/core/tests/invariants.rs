//! Property suites over randomized inputs.
//!
//! Structural identities of the parametrization are checked with zero
//! tolerance on dyadic inputs (where every intermediate is exactly
//! representable); scheme invariants are checked at the rounding floor.

use fluxjump::flux::Side;
use fluxjump::parametrize::{build_parametrization, graphs_equivalent, WeightAssignment};
use fluxjump::regularize::regularize;
use fluxjump::scheme::{
    entropy_residual, max_stable_dt, step, BoundaryMode, GridSolution,
};
use fluxjump::testing::{
    random_dyadic_jump_flux, random_dyadic_theta, random_dyadic_weights, random_periodic_scenario,
};
use fluxjump::{mirror_problem, PlFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn parametrization_structural_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for case in 0..200 {
        let dim = if case % 7 == 0 { 2 } else { 1 };
        let f = random_dyadic_jump_flux(&mut rng, dim);
        let w = random_dyadic_weights(&mut rng, f.jumps().len());
        let theta = random_dyadic_theta(&mut rng);
        let p = build_parametrization(&f, &w, theta).unwrap();

        // Slopes of b lie in [0, 1]; on dyadic grids they are exactly 0 or 1.
        for s in p.b().slopes().unwrap() {
            assert!(s == 0.0 || s == 1.0, "case {case}: slope {s}");
        }
        // Plateau widths equal the assigned weights exactly.
        for (pl, &h) in p.plateaus().iter().zip(w.weights()) {
            assert_eq!(pl.b - pl.a, h, "case {case}: plateau width");
            assert_eq!(pl.width, h);
            assert_eq!(p.b().try_eval1(pl.a).unwrap(), pl.location);
            assert_eq!(p.b().try_eval1(pl.c).unwrap(), pl.location);
            assert_eq!(p.b().try_eval1(pl.b).unwrap(), pl.location);
        }
        // Sandwich bound v - c <= b(v) <= v at every breakpoint.
        let c = p.total_weight();
        for (&v, &bv) in p.b().breakpoints().iter().zip(p.b().values_flat()) {
            assert!(bv <= v, "case {case}: b({v}) = {bv} > v");
            assert!(v - c <= bv, "case {case}: b({v}) = {bv} < v - c");
        }
    }
}

#[test]
fn graph_matches_flux_off_plateaus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut exact_checks = 0usize;
    for _ in 0..60 {
        let f = random_dyadic_jump_flux(&mut rng, 1);
        let w = random_dyadic_weights(&mut rng, f.jumps().len());
        let p = build_parametrization(&f, &w, 0.5).unwrap();
        let on_plateau =
            |v: f64| p.plateaus().iter().any(|pl| v >= pl.a && v <= pl.b);
        let vs = p.b().breakpoints();
        // Breakpoints and dyadic segment midpoints: interpolation is exact
        // there, so the graph identity g(v) = phi(b(v)) holds bitwise.
        let mut probes: Vec<f64> = vs.to_vec();
        probes.extend(vs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        for v in probes {
            if on_plateau(v) {
                continue;
            }
            let u = p.b().try_eval1(v).unwrap();
            let g = p.g().try_eval1(v).unwrap();
            let phi = f.eval_sided(u, Side::Point).unwrap()[0];
            assert_eq!(g, phi, "v={v}, u={u}");
            exact_checks += 1;
        }
        // On plateaus g(v) lies on the two-segment chain.
        for pl in p.plateaus() {
            let jump = &f.jumps()[pl.jump_index];
            for t in [0.25, 0.5, 0.75] {
                let v = pl.a + t * (pl.b - pl.a);
                let g = p.g().try_eval1(v).unwrap();
                let (lo, hi) = if v <= pl.c {
                    (jump.left[0], jump.point[0])
                } else {
                    (jump.point[0], jump.right[0])
                };
                assert!(
                    g >= lo.min(hi) - 1e-14 && g <= lo.max(hi) + 1e-14,
                    "chain violation at v={v}"
                );
            }
        }
    }
    assert!(exact_checks > 1000, "only {exact_checks} exact graph checks");
}

/// The parametrized graph, as a point set, does not depend on the choice
/// of weights or interior node.
#[test]
fn reparametrization_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for case in 0..40 {
        let f = random_dyadic_jump_flux(&mut rng, 1);
        let p = build_parametrization(
            &f,
            &random_dyadic_weights(&mut rng, f.jumps().len()),
            random_dyadic_theta(&mut rng),
        )
        .unwrap();
        let q = build_parametrization(
            &f,
            &random_dyadic_weights(&mut rng, f.jumps().len()),
            random_dyadic_theta(&mut rng),
        )
        .unwrap();
        assert!(
            graphs_equivalent(&p, &q, 1e-10).unwrap(),
            "case {case}: graphs differ"
        );
    }
}

#[test]
fn mirror_involution_on_random_fluxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for _ in 0..40 {
        let f = random_dyadic_jump_flux(&mut rng, 1);
        let u0 = GridSolution::from_centers(-1.0, 1.0, 16, BoundaryMode::Periodic, |x| x * 0.3)
            .unwrap();
        let (mf, mu0) = mirror_problem(&f, &u0).unwrap();
        let (mmf, mmu0) = mirror_problem(&mf, &mu0).unwrap();
        assert_eq!(mmf.jumps(), f.jumps());
        assert_eq!(mmf.pieces(), f.pieces());
        assert_eq!(mmu0.values(), u0.values());
    }
}

#[test]
fn regularization_roundtrip_on_random_fluxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for _ in 0..40 {
        let f = random_dyadic_jump_flux(&mut rng, 1);
        let w = random_dyadic_weights(&mut rng, f.jumps().len());
        let p = build_parametrization(&f, &w, 0.5).unwrap();
        let r = 1u64 << rng.random_range(0..12u32);
        let rf = regularize(&p, r).unwrap();
        for s in rf.b_r().slopes().unwrap() {
            let r_inv = 1.0 / r as f64;
            assert!(s >= r_inv * (1.0 - 1e-12) && s <= 1.0 + r_inv * (1.0 + 1e-12));
        }
        let (lo, hi) = rf.phi_r().x_range();
        let mut prev_v = f64::NEG_INFINITY;
        for i in 0..=100 {
            let u = (lo + (hi - lo) * (i as f64 / 100.0)).min(hi);
            let v = rf.invert_br(u).unwrap();
            assert!(v >= prev_v, "inversion not monotone");
            prev_v = v;
            let back = rf.b_r().eval1(v);
            assert!((back - u).abs() <= 1e-13 * u.abs().max(1.0), "roundtrip {u}");
        }
    }
}

/// Monotone-scheme invariants on random periodic scenarios: exact
/// maximum/minimum principle, per-step L1 contraction, comparison
/// principle and entropy residuals at the rounding floor, plus mean
/// conservation over many steps.
#[test]
fn scheme_invariants_random_periodic() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    for case in 0..12 {
        let sc = random_periodic_scenario(&mut rng);
        let mut u = sc.initial.clone();
        // A comparable ordered partner: w0 = u0 + nonnegative dyadic bump.
        let bump = 0.25;
        let mut w = GridSolution::new(
            0.0,
            1.0,
            u.values()
                .iter()
                .enumerate()
                .map(|(j, v)| v + bump * ((j % 4) as f64) / 4.0)
                .collect(),
            0.0,
            BoundaryMode::Periodic,
        )
        .unwrap();
        let (min0, max0) = (u.min_value(), u.max_value());
        let mean0 = u.mean();
        let mut dist = u.l1_distance(&w).unwrap();
        // The min/max principle is bitwise exact for Godunov (interval
        // extrema compare shared candidates); Engquist-Osher carries a few
        // ulp of prefix-sum rounding.
        let principle_slack = match sc.params.kind {
            fluxjump::FluxKind::Godunov => 0.0,
            fluxjump::FluxKind::EngquistOsher => 1e-13,
        };
        for step_idx in 0..400 {
            let dt = max_stable_dt(&sc.phi, &u, &sc.params).min(1e-2);
            let dt = dt.min(max_stable_dt(&sc.phi, &w, &sc.params));
            let next_u = step(&u, &sc.phi, &sc.params, dt).unwrap();
            let next_w = step(&w, &sc.phi, &sc.params, dt).unwrap();
            assert!(
                next_u.min_value() >= min0 - principle_slack,
                "case {case}: min principle"
            );
            assert!(
                next_u.max_value() <= max0 + principle_slack,
                "case {case}: max principle"
            );
            let next_dist = next_u.l1_distance(&next_w).unwrap();
            assert!(
                next_dist <= dist + 1e-12,
                "case {case} step {step_idx}: contraction {next_dist} > {dist}"
            );
            for j in 0..next_u.cells() {
                assert!(
                    next_u.values()[j] <= next_w.values()[j] + 1e-12,
                    "case {case}: comparison principle at cell {j}"
                );
            }
            if step_idx % 50 == 0 {
                for _ in 0..10 {
                    let k = rng.random_range(-40..=40i64) as f64 / 10.0;
                    let r = entropy_residual(&u, &next_u, &sc.phi, &sc.params, k).unwrap();
                    assert!(r <= 1e-12, "case {case}: entropy residual {r} at k={k}");
                }
            }
            dist = next_dist;
            u = next_u;
            w = next_w;
        }
        assert!(
            (u.mean() - mean0).abs() <= 1e-13 * mean0.abs().max(1.0),
            "case {case}: mean drift"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Evaluation stays inside the segment's value interval and hits
    /// breakpoints exactly.
    #[test]
    fn pl_eval_bounded_and_exact(
        steps in prop::collection::vec((1u32..100, -100i64..100), 2..20),
        probe in 0.0f64..1.0,
    ) {
        let mut xs = vec![0.0f64];
        let mut ys = vec![0.0f64];
        for (dx, y) in &steps {
            xs.push(xs.last().unwrap() + *dx as f64 / 16.0);
            ys.push(*y as f64 / 8.0);
        }
        let f = PlFunction::scalar(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert_eq!(f.eval1(*x), *y);
        }
        let (lo, hi) = f.x_range();
        let x = lo + (hi - lo) * probe;
        let v = f.eval1(x);
        let seg = xs.partition_point(|&b| b < x).clamp(1, xs.len() - 1);
        let (y0, y1) = (ys[seg - 1], ys[seg]);
        prop_assert!(v >= y0.min(y1) && v <= y0.max(y1));
    }

    /// Godunov interval extrema agree with a dense-sampling oracle.
    #[test]
    fn godunov_extrema_match_sampling(
        vals in prop::collection::vec(-50i64..50, 3..12),
        a_frac in 0.0f64..1.0,
        b_frac in 0.0f64..1.0,
    ) {
        let xs: Vec<f64> = (0..vals.len()).map(|i| i as f64).collect();
        let ys: Vec<f64> = vals.iter().map(|&v| v as f64 / 8.0).collect();
        let f = PlFunction::scalar(xs, ys).unwrap();
        let (lo, hi) = f.x_range();
        let mut a = lo + (hi - lo) * a_frac;
        let mut b = lo + (hi - lo) * b_frac;
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let (mn, mx) = f.min_max_on(a, b).unwrap();
        let mut smn = f64::INFINITY;
        let mut smx = f64::NEG_INFINITY;
        for i in 0..=2000 {
            let x = a + (b - a) * (i as f64 / 2000.0);
            let v = f.eval1(x.min(hi));
            smn = smn.min(v);
            smx = smx.max(v);
        }
        prop_assert!(mn <= smn + 1e-12 && mn >= smn - 0.1);
        prop_assert!(mx >= smx - 1e-12 && mx <= smx + 0.1);
    }
}
