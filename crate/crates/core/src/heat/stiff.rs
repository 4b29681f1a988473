//! L-stable integration of `u' = -L u` for stiff radial chains.
//!
//! Each step applies the (2,3) Padé approximant of `e^z`,
//! `R(z) = (1 + 2z/5 + z²/20) / (1 - 3z/5 + 3z²/20 - z³/60)`, which is the
//! stability function of the 3-stage Radau IIA method (order 5). In
//! partial fractions `R(z) = Σ_j ρ_j / (z - z_j)`, so a step costs one
//! real and one complex tridiagonal solve. Step sizes come from step
//! doubling.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::Error;

use super::operator::RadialOperator;

#[cfg(test)]
fn q_poly(z: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) - z * 0.6 + z * z * 0.15 - z * z * z / 60.0
}

fn q_deriv(z: Complex64) -> Complex64 {
    Complex64::new(-0.6, 0.0) + z * 0.3 - z * z / 20.0
}

fn p_poly(z: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) + z * 0.4 + z * z / 20.0
}

/// Poles and residues of `R`: the real pole first, then one of the
/// conjugate pair.
pub(crate) fn pade_poles() -> [(Complex64, Complex64); 2] {
    // z³ - 9z² + 36z - 60 = 0 has one real root; Newton from the right.
    let mut x = 4.0f64;
    for _ in 0..60 {
        let f = ((x - 9.0) * x + 36.0) * x - 60.0;
        let df = (3.0 * x - 18.0) * x + 36.0;
        x -= f / df;
    }
    // Deflate to z² + a z + b.
    let a = x - 9.0;
    let b = 36.0 + a * x;
    let disc = b - a * a / 4.0;
    let z1 = Complex64::new(x, 0.0);
    let z2 = Complex64::new(-a / 2.0, libm::sqrt(disc));
    let residue = |z: Complex64| p_poly(z) / q_deriv(z);
    [(z1, residue(z1)), (z2, residue(z2))]
}

/// Solves `(z I + h L) x = y` (or with `Lᵀ`); end states are eliminated
/// first, leaving a tridiagonal system on the main rows.
pub(crate) struct ShiftedSolver<'a> {
    op: &'a RadialOperator,
    transpose: bool,
    // scratch
    c: Vec<Complex64>,
    d: Vec<Complex64>,
}

impl<'a> ShiftedSolver<'a> {
    pub(crate) fn new(op: &'a RadialOperator, transpose: bool) -> Self {
        let n = op.radius();
        ShiftedSolver {
            op,
            transpose,
            c: vec![Complex64::new(0.0, 0.0); n],
            d: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub(crate) fn solve(&mut self, z: Complex64, h: f64, y: &[f64], x: &mut [Complex64]) {
        let op = self.op;
        let n = op.radius();
        let diag = op.diagonal();
        let (c, d) = (&mut self.c, &mut self.d);
        // Thomas forward sweep.
        for r in 0..n {
            let (left, right) = op.couplings(r, self.transpose);
            let mut a = z + h * diag[r];
            let mut rhs = Complex64::new(y[r], 0.0);
            if let Some((to_end, from_end)) = op.pendant_coupling(r, self.transpose) {
                let e = z + h;
                a -= h * h * to_end * from_end / e;
                rhs += h * to_end * y[n + r] / e;
            }
            let sub = -h * left;
            let denom = if r > 0 { a - sub * c[r - 1] } else { a };
            c[r] = -h * right / denom;
            d[r] = if r > 0 {
                (rhs - sub * d[r - 1]) / denom
            } else {
                rhs / denom
            };
        }
        x[n - 1] = d[n - 1];
        for r in (0..n - 1).rev() {
            x[r] = d[r] - c[r] * x[r + 1];
        }
        if op.pendant().is_some() {
            for r in 0..n {
                let (_, from_end) = op.pendant_coupling(r, self.transpose).unwrap_or((0.0, 0.0));
                x[n + r] = (y[n + r] + h * from_end * x[r]) / (z + h);
            }
        }
    }
}

struct Stepper<'a> {
    solver: ShiftedSolver<'a>,
    poles: [(Complex64, Complex64); 2],
    x: Vec<Complex64>,
}

impl Stepper<'_> {
    /// `out = R(-hL) y`.
    fn step(&mut self, h: f64, y: &[f64], out: &mut [f64]) {
        let [(z1, r1), (z2, r2)] = self.poles;
        self.solver.solve(z1, h, y, &mut self.x);
        for (o, x) in out.iter_mut().zip(&self.x) {
            *o = -(r1 * x).re;
        }
        self.solver.solve(z2, h, y, &mut self.x);
        for (o, x) in out.iter_mut().zip(&self.x) {
            *o -= 2.0 * (r2 * x).re;
        }
    }
}

#[derive(Debug)]
pub(crate) struct Integrated {
    pub values: Vec<Vec<f64>>,
    /// Step attempts, accepted or not.
    pub steps: u64,
}

/// Integrates from `init` at time 0 through every output time in `times`
/// (nondecreasing), keeping the estimated local error below `tol`.
pub(crate) fn integrate(
    op: &RadialOperator,
    init: &[f64],
    times: &[f64],
    transpose: bool,
    tol: f64,
    max_steps: u64,
) -> Result<Integrated, Error> {
    let dim = op.dimension();
    let mut stepper = Stepper {
        solver: ShiftedSolver::new(op, transpose),
        poles: pade_poles(),
        x: vec![Complex64::new(0.0, 0.0); dim],
    };
    let mut y = init.to_vec();
    let (mut full, mut half, mut two) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut t = 0.0;
    let mut h = 1e-3;
    let mut steps = 0u64;
    let mut values = Vec::with_capacity(times.len());
    for &target in times {
        while t < target {
            if steps >= max_steps {
                return Err(Error::SolverBudgetExceeded {
                    required: steps + 1,
                    budget: max_steps,
                    partial: times
                        .iter()
                        .zip(&values)
                        .map(|(&t, v): (&f64, &Vec<f64>)| (t, v[0]))
                        .collect(),
                });
            }
            steps += 1;
            let remaining = target - t;
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            stepper.step(h_try, &y, &mut full);
            stepper.step(h_try / 2.0, &y, &mut half);
            stepper.step(h_try / 2.0, &half, &mut two);
            let err = full
                .iter()
                .zip(&two)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let factor = if err == 0.0 {
                4.0
            } else {
                (0.9 * libm::pow(tol / err, 1.0 / 6.0)).clamp(0.2, 4.0)
            };
            if err <= tol {
                t = if last { target } else { t + h_try };
                core::mem::swap(&mut y, &mut two);
                if !last || factor < 1.0 {
                    h = h_try * factor;
                }
            } else {
                h = h_try * factor;
            }
        }
        values.push(y.clone());
    }
    Ok(Integrated { values, steps })
}
