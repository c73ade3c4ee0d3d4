//! Entropy solutions of 1-D scalar conservation laws u_t + phi(u)_x = 0
//! whose flux has jump discontinuities.
//!
//! The flux is extended to a multivalued graph at each jump and traced by a
//! continuous pair (b, g) with b monotone and 1-Lipschitz ([`parametrize`]).
//! Regularizing b to the strictly increasing b_r = b + v/r turns the
//! problem into a classical one with continuous flux phi_r = g o b_r^{-1}
//! ([`regularize`]), solved by a conservative monotone finite-volume scheme
//! ([`scheme`]). The largest and smallest entropy solutions are selected by
//! monotone approximation from above, with the smallest obtained through
//! the mirror transform ([`extremal`]). Closed-form reference fields and
//! scoring utilities live in [`oracles`].

pub mod flux;
pub mod extremal;
pub mod oracles;
pub mod parametrize;
pub mod pl;
pub mod regularize;
pub mod scheme;
#[cfg(feature = "testing")]
pub mod testing;

pub use flux::{JumpFlux, JumpPoint, Side};
pub use parametrize::{
    build_alpha, build_parametrization, graphs_equivalent, hausdorff_distance, AlphaMap,
    Parametrization, Plateau, WeightAssignment,
};
pub use pl::PlFunction;
pub use regularize::{regularize, RegularizedFlux};
pub use scheme::{
    entropy_residual, max_stable_dt, numerical_flux, run, step, BoundaryMode, FluxKind,
    GridSolution, SchemeParams,
};
pub use extremal::{
    mirror_problem, solve_largest, solve_smallest, ExtremalParams, ExtremalResult, RGrowth,
    WeightRule,
};
pub use oracles::{score, score_fn, OracleField};
