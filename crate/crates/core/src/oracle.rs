//! Function bundles consumed by the Caputo evaluator and the descent methods.

use alloc::vec::Vec;

use crate::bounds::SmoothnessProfile;
use crate::error::{Error, Result};

/// A closed real interval, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidParameter {
                name: "interval",
                value: lo,
                expected: "lo <= hi",
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub(crate) fn require(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { point: t })
        }
    }
}

/// A single-variable function with its first and (optionally) second derivative.
pub trait ScalarOracle {
    fn value(&self, t: f64) -> f64;
    fn deriv1(&self, t: f64) -> f64;
    /// `None` when the oracle has no second derivative.
    fn deriv2(&self, _t: f64) -> Option<f64> {
        None
    }
    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }
}

impl<T: ScalarOracle + ?Sized> ScalarOracle for &T {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn deriv1(&self, t: f64) -> f64 {
        (**self).deriv1(t)
    }
    fn deriv2(&self, t: f64) -> Option<f64> {
        (**self).deriv2(t)
    }
    fn domain(&self) -> Interval {
        (**self).domain()
    }
}

type PlainFn = fn(f64) -> f64;

/// [`ScalarOracle`] assembled from closures.
///
/// ```
/// use fracgd::oracle::{FnOracle, ScalarOracle};
/// let sq = FnOracle::new(|t| t * t, |t| 2.0 * t).with_deriv2(|_| 2.0);
/// assert_eq!(sq.deriv2(3.0), Some(2.0));
/// ```
#[derive(Clone)]
pub struct FnOracle<F, D1, D2 = PlainFn> {
    value: F,
    deriv1: D1,
    deriv2: Option<D2>,
    domain: Interval,
}

impl<F, D1> FnOracle<F, D1, PlainFn>
where
    F: Fn(f64) -> f64,
    D1: Fn(f64) -> f64,
{
    pub fn new(value: F, deriv1: D1) -> Self {
        Self {
            value,
            deriv1,
            deriv2: None,
            domain: Interval::REAL_LINE,
        }
    }

    pub fn with_deriv2<D2: Fn(f64) -> f64>(self, deriv2: D2) -> FnOracle<F, D1, D2> {
        FnOracle {
            value: self.value,
            deriv1: self.deriv1,
            deriv2: Some(deriv2),
            domain: self.domain,
        }
    }
}

impl<F, D1, D2> FnOracle<F, D1, D2> {
    pub fn on(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }
}

impl<F, D1, D2> ScalarOracle for FnOracle<F, D1, D2>
where
    F: Fn(f64) -> f64,
    D1: Fn(f64) -> f64,
    D2: Fn(f64) -> f64,
{
    fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }
    fn deriv1(&self, t: f64) -> f64 {
        (self.deriv1)(t)
    }
    fn deriv2(&self, t: f64) -> Option<f64> {
        self.deriv2.as_ref().map(|d| d(t))
    }
    fn domain(&self) -> Interval {
        self.domain
    }
}

/// Known minimizer of an objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub point: Vec<f64>,
    pub value: f64,
}

/// A `k`-dimensional objective.
///
/// The `*_along` methods evaluate the coordinate restriction
/// `f_{j,x}(y) = f(x + (y - x_j) e_j)`. Their defaults copy `x`; objectives
/// evaluated inside quadrature loops should override them.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], grad: &mut [f64]);
    fn profile(&self) -> SmoothnessProfile;

    fn optimum(&self) -> Option<Optimum> {
        None
    }

    /// Squared distance from `x` to the minimizer set. Objectives with
    /// several minimizers measure to the nearest one.
    fn dist_sq_to_optimum(&self, x: &[f64], optimum: &Optimum) -> f64 {
        dist_sq(x, &optimum.point)
    }

    fn value_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        let mut z = x.to_vec();
        z[j] = y;
        self.value(&z)
    }

    fn partial_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        let mut z = x.to_vec();
        z[j] = y;
        let mut g = alloc::vec![0.0; x.len()];
        self.gradient(&z, &mut g);
        g[j]
    }

    /// `∂²f/∂x_j²` at `x` with `x_j = y`, when available.
    fn second_partial_along(&self, _x: &[f64], _j: usize, _y: f64) -> Option<f64> {
        None
    }

    /// Domain of coordinate `j`.
    fn coordinate_domain(&self, _j: usize) -> Interval {
        Interval::REAL_LINE
    }

    /// Writes `H(x) v` into `out` and returns `true` when the objective is a
    /// quadratic with known Hessian. Used by exact line search.
    fn hessian_vec(&self, _x: &[f64], _v: &[f64], _out: &mut [f64]) -> bool {
        false
    }
}

impl<P: Objective + ?Sized> Objective for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        (**self).gradient(x, grad)
    }
    fn profile(&self) -> SmoothnessProfile {
        (**self).profile()
    }
    fn optimum(&self) -> Option<Optimum> {
        (**self).optimum()
    }
    fn dist_sq_to_optimum(&self, x: &[f64], optimum: &Optimum) -> f64 {
        (**self).dist_sq_to_optimum(x, optimum)
    }
    fn value_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        (**self).value_along(x, j, y)
    }
    fn partial_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        (**self).partial_along(x, j, y)
    }
    fn second_partial_along(&self, x: &[f64], j: usize, y: f64) -> Option<f64> {
        (**self).second_partial_along(x, j, y)
    }
    fn coordinate_domain(&self, j: usize) -> Interval {
        (**self).coordinate_domain(j)
    }
    fn hessian_vec(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        (**self).hessian_vec(x, v, out)
    }
}

/// The restriction of an [`Objective`] to coordinate `j` through `base`.
pub struct CoordinateSlice<'a, P: ?Sized> {
    problem: &'a P,
    base: &'a [f64],
    coord: usize,
}

/// Returns `f_{j,x}` as a [`ScalarOracle`].
pub fn coordinate_oracle<'a, P: Objective + ?Sized>(
    problem: &'a P,
    j: usize,
    x: &'a [f64],
) -> CoordinateSlice<'a, P> {
    CoordinateSlice {
        problem,
        base: x,
        coord: j,
    }
}

impl<P: Objective + ?Sized> ScalarOracle for CoordinateSlice<'_, P> {
    fn value(&self, t: f64) -> f64 {
        self.problem.value_along(self.base, self.coord, t)
    }
    fn deriv1(&self, t: f64) -> f64 {
        self.problem.partial_along(self.base, self.coord, t)
    }
    fn deriv2(&self, t: f64) -> Option<f64> {
        self.problem.second_partial_along(self.base, self.coord, t)
    }
    fn domain(&self) -> Interval {
        self.problem.coordinate_domain(self.coord)
    }
}

/// An objective reported with a different [`SmoothnessProfile`], e.g. a
/// strongly convex problem analysed as merely convex.
#[derive(Debug, Clone, Copy)]
pub struct WithProfile<P> {
    inner: P,
    profile: SmoothnessProfile,
}

impl<P: Objective> WithProfile<P> {
    pub fn new(inner: P, profile: SmoothnessProfile) -> Self {
        Self { inner, profile }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Objective> Objective for WithProfile<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.inner.gradient(x, grad)
    }
    fn profile(&self) -> SmoothnessProfile {
        self.profile
    }
    fn optimum(&self) -> Option<Optimum> {
        self.inner.optimum()
    }
    fn dist_sq_to_optimum(&self, x: &[f64], optimum: &Optimum) -> f64 {
        self.inner.dist_sq_to_optimum(x, optimum)
    }
    fn value_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        self.inner.value_along(x, j, y)
    }
    fn partial_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        self.inner.partial_along(x, j, y)
    }
    fn second_partial_along(&self, x: &[f64], j: usize, y: f64) -> Option<f64> {
        self.inner.second_partial_along(x, j, y)
    }
    fn coordinate_domain(&self, j: usize) -> Interval {
        self.inner.coordinate_domain(j)
    }
    fn hessian_vec(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        self.inner.hessian_vec(x, v, out)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
