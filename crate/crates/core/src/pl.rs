//! Piecewise-linear functions on a breakpoint grid.
//!
//! `PlFunction` is the shared numeric representation for every curve in this
//! crate: continuous flux pieces, the monotone map `b`, the flux trace `g`,
//! and the regularized flux. Values may be vector-valued (dimension `n`);
//! evaluation is linear interpolation between breakpoints, exact at the
//! breakpoints themselves. Extrapolation outside the breakpoint range is
//! refused unless clamping is explicitly enabled.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlError {
    #[error("need at least 2 breakpoints, got {0}")]
    TooFewBreakpoints(usize),
    #[error("breakpoints must be finite and strictly increasing (violation at index {0})")]
    NotIncreasing(usize),
    #[error("{values} values do not fit {breakpoints} breakpoints of dimension {dim}")]
    LengthMismatch {
        breakpoints: usize,
        values: usize,
        dim: usize,
    },
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),
    #[error("argument {arg} outside breakpoint range [{lo}, {hi}]")]
    OutOfRange { arg: f64, lo: f64, hi: f64 },
    #[error("operation requires dimension 1, function has dimension {0}")]
    NotScalar(usize),
}

/// A piecewise-linear map from a strictly increasing breakpoint grid into R^dim.
#[derive(Debug, Clone, PartialEq)]
pub struct PlFunction {
    xs: Vec<f64>,
    /// Row-major: `ys[i*dim..(i+1)*dim]` is the value at `xs[i]`.
    ys: Vec<f64>,
    dim: usize,
    clamp: bool,
}

impl PlFunction {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, dim: usize) -> Result<Self, PlError> {
        if dim == 0 {
            return Err(PlError::ZeroDim);
        }
        if xs.len() < 2 {
            return Err(PlError::TooFewBreakpoints(xs.len()));
        }
        if ys.len() != xs.len() * dim {
            return Err(PlError::LengthMismatch {
                breakpoints: xs.len(),
                values: ys.len(),
                dim,
            });
        }
        if !xs[0].is_finite() {
            return Err(PlError::NotIncreasing(0));
        }
        for i in 1..xs.len() {
            if !xs[i].is_finite() || xs[i] <= xs[i - 1] {
                return Err(PlError::NotIncreasing(i));
            }
        }
        if let Some(i) = ys.iter().position(|y| !y.is_finite()) {
            return Err(PlError::NonFinite(i));
        }
        Ok(Self {
            xs,
            ys,
            dim,
            clamp: false,
        })
    }

    pub fn scalar(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, PlError> {
        Self::new(xs, ys, 1)
    }

    /// Sample a scalar closed form on `n` uniform intervals over `[lo, hi]`.
    ///
    /// Breakpoints are `lo + (hi - lo) * i / n`, so dyadic fractions of the
    /// range land on exactly representable abscissae.
    pub fn sample_scalar(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self, PlError> {
        let xs: Vec<f64> = (0..=n)
            .map(|i| lo + (hi - lo) * (i as f64 / n as f64))
            .collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        Self::scalar(xs, ys)
    }

    /// Enable or disable constant extrapolation outside the breakpoint range.
    pub fn with_clamping(mut self, clamp: bool) -> Self {
        self.clamp = clamp;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values_flat(&self) -> &[f64] {
        &self.ys
    }

    pub fn value_row(&self, i: usize) -> &[f64] {
        &self.ys[i * self.dim..(i + 1) * self.dim]
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn check_range(&self, x: f64) -> Result<f64, PlError> {
        let (lo, hi) = self.x_range();
        if self.clamp {
            return Ok(x.clamp(lo, hi));
        }
        if x < lo || x > hi || x.is_nan() {
            return Err(PlError::OutOfRange { arg: x, lo, hi });
        }
        Ok(x)
    }

    /// Index of the segment containing `x` (in range), or `Ok(i)` for an
    /// exact breakpoint hit.
    fn locate(&self, x: f64) -> Result<usize, usize> {
        match self.xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => Ok(i),
            Err(i) => Err(i - 1),
        }
    }

    fn interp_component(&self, seg: usize, comp: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let y0 = self.ys[seg * self.dim + comp];
        let y1 = self.ys[(seg + 1) * self.dim + comp];
        let t = (x - x0) / (x1 - x0);
        let y = y0 + t * (y1 - y0);
        // Keep interpolants inside the segment's value interval so interval
        // extrema taken over breakpoints plus endpoints stay exact.
        y.max(y0.min(y1)).min(y0.max(y1))
    }

    /// Evaluate a scalar function. Panics on dimension mismatch or (without
    /// clamping) out-of-range arguments; use `try_eval1` on untrusted input.
    pub fn eval1(&self, x: f64) -> f64 {
        self.try_eval1(x).unwrap()
    }

    pub fn try_eval1(&self, x: f64) -> Result<f64, PlError> {
        if self.dim != 1 {
            return Err(PlError::NotScalar(self.dim));
        }
        let x = self.check_range(x)?;
        Ok(match self.locate(x) {
            Ok(i) => self.ys[i],
            Err(seg) => self.interp_component(seg, 0, x),
        })
    }

    pub fn eval_into(&self, x: f64, out: &mut [f64]) -> Result<(), PlError> {
        assert_eq!(out.len(), self.dim);
        let x = self.check_range(x)?;
        match self.locate(x) {
            Ok(i) => out.copy_from_slice(self.value_row(i)),
            Err(seg) => {
                for comp in 0..self.dim {
                    out[comp] = self.interp_component(seg, comp, x);
                }
            }
        }
        Ok(())
    }

    pub fn eval_vec(&self, x: f64) -> Result<Vec<f64>, PlError> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// Exact minimum and maximum of a scalar function over `[a, b]`,
    /// computed from the endpoint values and interior breakpoints.
    pub fn min_max_on(&self, a: f64, b: f64) -> Result<(f64, f64), PlError> {
        if self.dim != 1 {
            return Err(PlError::NotScalar(self.dim));
        }
        debug_assert!(a <= b);
        let va = self.try_eval1(a)?;
        let vb = self.try_eval1(b)?;
        let mut lo = va.min(vb);
        let mut hi = va.max(vb);
        let i0 = self.xs.partition_point(|&x| x <= a);
        let i1 = self.xs.partition_point(|&x| x < b);
        for i in i0..i1 {
            let y = self.ys[i];
            lo = lo.min(y);
            hi = hi.max(y);
        }
        Ok((lo, hi))
    }

    /// Largest segment slope magnitude (Euclidean norm of the value
    /// increment over the abscissa increment) across the whole range.
    pub fn max_slope_norm(&self) -> f64 {
        self.max_slope_norm_on(self.xs[0], *self.xs.last().unwrap())
    }

    /// Largest segment slope magnitude over segments intersecting `[a, b]`.
    pub fn max_slope_norm_on(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.x_range();
        let a = a.max(lo);
        let b = b.min(hi);
        if a >= b {
            return 0.0;
        }
        // Segments [i, i+1] with xs[i+1] > a and xs[i] < b.
        let first = self.xs.partition_point(|&x| x <= a).saturating_sub(1);
        let last = self.xs.partition_point(|&x| x < b);
        let mut m: f64 = 0.0;
        for i in first..last.min(self.xs.len() - 1) {
            let dx = self.xs[i + 1] - self.xs[i];
            let mut dy2 = 0.0;
            for comp in 0..self.dim {
                let d = self.ys[(i + 1) * self.dim + comp] - self.ys[i * self.dim + comp];
                dy2 += d * d;
            }
            m = m.max(dy2.sqrt() / dx);
        }
        m
    }

    /// Per-segment slopes of a scalar function.
    pub fn slopes(&self) -> Result<Vec<f64>, PlError> {
        if self.dim != 1 {
            return Err(PlError::NotScalar(self.dim));
        }
        Ok(self
            .xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect())
    }

    /// New function with every breakpoint and value negated and the order
    /// reversed, i.e. `x -> -f(-x)`. Exact in floating point.
    pub fn mirrored(&self) -> Self {
        let n = self.xs.len();
        let xs: Vec<f64> = self.xs.iter().rev().map(|&x| -x).collect();
        let mut ys = Vec::with_capacity(self.ys.len());
        for i in (0..n).rev() {
            for comp in 0..self.dim {
                ys.push(-self.ys[i * self.dim + comp]);
            }
        }
        Self {
            xs,
            ys,
            dim: self.dim,
            clamp: self.clamp,
        }
    }
}
