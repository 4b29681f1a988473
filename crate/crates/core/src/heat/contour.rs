//! `e^{-tL} v` as a Bromwich integral along a parabola.
//!
//! With `z(u) = (μ/t)(1 + iu)²` the inverse Laplace transform
//! `e^{-tL} v = (1/2πi) ∫ e^{zt} (z + L)⁻¹ v dz` is summed by the trapezoid
//! rule in `u`. The spectrum of `L` is real and nonnegative, so the rule is
//! a rational approximation of `e^{-x}` that is uniformly accurate on
//! `[0, ∞)`, stiffness included. Conjugate symmetry halves the solves.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Error;

use super::operator::RadialOperator;
use super::stiff::ShiftedSolver;

/// Nodes on the upper half of the contour, the real one included.
pub(crate) const NODES: usize = 21;
const STEP: f64 = 0.16;
const SCALE: f64 = 3.5;

/// `(z_k, w_k)` for time `t > 0`: `e^{-tx} ≈ Re Σ_k c_k w_k / (z_k + x)`
/// with `c_0 = 1` and `c_k = 2` otherwise.
pub(crate) fn nodes(t: f64) -> Vec<(Complex64, Complex64)> {
    let mu = SCALE / t;
    (0..NODES)
        .map(|k| {
            let u = Complex64::new(1.0, k as f64 * STEP);
            let z = mu * u * u;
            let dz = mu * 2.0 * Complex64::i() * u;
            let w = (z * t).exp() * dz * STEP / (2.0 * PI * Complex64::i());
            (z, if k == 0 { w } else { 2.0 * w })
        })
        .collect()
}

pub(crate) struct Evaluated {
    pub values: Vec<Vec<f64>>,
    /// Shifted tridiagonal solves performed.
    pub solves: u64,
}

/// Evaluates `e^{-tL} init` (or with `Lᵀ`) at every time.
pub(crate) fn propagate(
    op: &RadialOperator,
    init: &[f64],
    times: &[f64],
    transpose: bool,
) -> Result<Evaluated, Error> {
    let dim = op.dimension();
    let mut solver = ShiftedSolver::new(op, transpose);
    let mut x = vec![Complex64::new(0.0, 0.0); dim];
    let mut values = Vec::with_capacity(times.len());
    let mut solves = 0;
    for &t in times {
        if t == 0.0 {
            values.push(init.to_vec());
            continue;
        }
        let mut acc = vec![0.0; dim];
        for (z, w) in nodes(t) {
            solver.solve(z, 1.0, init, &mut x);
            solves += 1;
            for (a, xi) in acc.iter_mut().zip(&x) {
                *a += (w * xi).re;
            }
        }
        if acc.iter().any(|a| !a.is_finite()) {
            return Err(Error::SolverBreakdown { solver: "contour" });
        }
        // Values of a sub-Markov semigroup on nonnegative data; clamp the
        // quadrature noise around zero.
        if init.iter().all(|v| *v >= 0.0) {
            for a in &mut acc {
                *a = a.max(0.0);
            }
        }
        values.push(acc);
    }
    Ok(Evaluated { values, solves })
}
