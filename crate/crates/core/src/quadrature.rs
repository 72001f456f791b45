//! Quadrature rules used by the Caputo evaluator.
//!
//! The Caputo integral over `[c, x]` is mapped to `u ∈ [0, 1]`, where the
//! kernel becomes `(1 - u)^a` with `a > -1`. [`JacobiRule`] integrates
//! `∫_0^1 (1 - u)^a g(u) du` exactly for polynomial `g` of degree below
//! `2 * node_count`. Nodes and weights come from the Golub-Welsch eigenvalue
//! problem on the Jacobi recurrence matrix.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{check_range, Result};

/// Nodes used when no configuration is supplied.
pub const DEFAULT_NODE_COUNT: usize = 64;
/// Smallest accepted rule size.
pub const MIN_NODE_COUNT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    node_count: usize,
}

impl QuadratureConfig {
    pub fn new(node_count: usize) -> Result<Self> {
        check_range(
            "node_count",
            node_count as f64,
            node_count >= MIN_NODE_COUNT,
            "at least 8 nodes",
        )?;
        Ok(Self { node_count })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            node_count: DEFAULT_NODE_COUNT,
        }
    }
}

/// Gauss rule for `∫_0^1 (1 - u)^exponent g(u) du`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    exponent: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl JacobiRule {
    pub fn new(node_count: usize, exponent: f64) -> Result<Self> {
        check_range(
            "exponent",
            exponent,
            exponent > -1.0 && exponent.is_finite(),
            "a finite weight exponent above -1",
        )?;
        check_range(
            "node_count",
            node_count as f64,
            node_count >= 1,
            "at least 1 node",
        )?;

        // Recurrence matrix of the Jacobi polynomials P^(a, 0) on [-1, 1].
        let a = exponent;
        let b = 0.0;
        let n = node_count;
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let s = 2.0 * kf + a + b;
            jacobi[(k, k)] = if k == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                (b * b - a * a) / (s * (s + 2.0))
            };
            if k + 1 < n {
                let m = kf + 1.0;
                let sm = 2.0 * m + a + b;
                let off = 2.0 / sm
                    * libm::sqrt(m * (m + a) * (m + b) * (m + a + b) / ((sm + 1.0) * (sm - 1.0)));
                jacobi[(k, k + 1)] = off;
                jacobi[(k + 1, k)] = off;
            }
        }
        let eigen = jacobi.symmetric_eigen();

        // Total mass of (1 - u)^a on [0, 1].
        let mass = 1.0 / (a + 1.0);
        let mut pairs: Vec<(f64, f64)> = eigen
            .eigenvalues
            .iter()
            .zip(eigen.eigenvectors.row(0).iter())
            .map(|(&x, &v)| (0.5 * (x + 1.0), v * v * mass))
            .collect();
        pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self {
            exponent,
            nodes,
            weights,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in `(0, 1)`, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Approximates `∫_0^1 (1 - u)^exponent g(u) du`, calling `g` once per node.
    pub fn integrate<G: FnMut(f64) -> f64>(&self, mut g: G) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * g(u))
            .sum()
    }
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights at KRONROD_NODES[1], [3], [5], [7].
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive 7/15-point Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest Kronrod/Gauss difference is bisected until
/// the summed difference falls below `max(abs_tol, rel_tol * |estimate|)` or
/// `max_intervals` intervals are in use.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let (est, err) = kronrod_15(&mut f, a, b);
    let mut parts: Vec<(f64, f64, f64, f64)> = vec![(a, b, est, err)];
    let mut total = est;
    let mut total_err = err;
    while parts.len() < max_intervals.max(1) && total_err > abs_tol.max(rel_tol * total.abs()) {
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, e0, r0) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (e1, r1) = kronrod_15(&mut f, lo, mid);
        let (e2, r2) = kronrod_15(&mut f, mid, hi);
        total += e1 + e2 - e0;
        total_err += r1 + r2 - r0;
        parts.push((lo, mid, e1, r1));
        parts.push((mid, hi, e2, r2));
    }
    // Re-sum to shed the drift of the running updates.
    parts.iter().map(|p| p.2).sum()
}
