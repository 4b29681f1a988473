//! `e^{-tL} v` by uniformization: with `q >= max diag(L)` the matrix
//! `P = I - L/q` is nonnegative and `e^{-tL} = Σ_n Pois(n; qt) Pⁿ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

use super::operator::RadialOperator;

/// Poisson weights of mean `mean` covering all but `tail` of the mass.
/// Returns the first index and the normalized weights from there on.
pub(crate) fn poisson_window(mean: f64, tail: f64) -> (usize, Vec<f64>) {
    if mean == 0.0 {
        return (0, vec![1.0]);
    }
    // Unnormalized weights relative to the mode; terms below `cut` times the
    // mode are dropped on both sides.
    let cut = tail * 1e-6;
    let mode = libm::floor(mean) as usize;
    let mut right = vec![1.0];
    let mut w = 1.0;
    let mut n = mode;
    while w > cut {
        n += 1;
        w *= mean / n as f64;
        right.push(w);
    }
    let mut left = Vec::new();
    let (mut w, mut n) = (1.0, mode);
    while n > 0 && w > cut {
        w *= n as f64 / mean;
        n -= 1;
        left.push(w);
    }
    let start = mode - left.len();
    left.reverse();
    left.extend(right);
    let total: f64 = left.iter().sum();
    for x in &mut left {
        *x /= total;
    }
    (start, left)
}

/// Upper bound on the number of matrix-vector products for the last time.
pub(crate) fn terms_needed(rate: f64, t: f64) -> u64 {
    let mean = rate * t;
    (mean + 12.0 * libm::sqrt(mean) + 40.0) as u64
}

#[derive(Debug)]
pub(crate) struct Propagated {
    /// `e^{-tL} v` (or with `Lᵀ`) for every requested time.
    pub values: Vec<Vec<f64>>,
    /// Matrix-vector products performed.
    pub products: u64,
}

/// Propagates `init` to every time in `times` (nondecreasing) in one pass.
pub(crate) fn propagate(
    op: &RadialOperator,
    init: &[f64],
    times: &[f64],
    transpose: bool,
    tail: f64,
    budget: u64,
) -> Result<Propagated, Error> {
    let dim = op.dimension();
    let q = op.max_rate().max(f64::MIN_POSITIVE);
    let windows: Vec<(usize, Vec<f64>)> =
        times.iter().map(|&t| poisson_window(q * t, tail)).collect();
    let last = windows.iter().map(|(s, w)| s + w.len()).max().unwrap_or(1);
    let required = last as u64 * dim as u64;
    let feasible = if required > budget {
        windows
            .iter()
            .take_while(|(s, w)| (s + w.len()) as u64 * dim as u64 <= budget)
            .count()
    } else {
        times.len()
    };
    let stop = windows[..feasible]
        .iter()
        .map(|(s, w)| s + w.len())
        .max()
        .unwrap_or(0);

    let mut values = vec![vec![0.0; dim]; feasible];
    let mut v = init.to_vec();
    let mut lv = vec![0.0; dim];
    for n in 0..stop {
        for (k, (start, w)) in windows[..feasible].iter().enumerate() {
            if n >= *start && n < start + w.len() {
                let weight = w[n - start];
                for (acc, x) in values[k].iter_mut().zip(&v) {
                    *acc += weight * x;
                }
            }
        }
        op.apply(&v, &mut lv, transpose);
        for (x, l) in v.iter_mut().zip(&lv) {
            // P has nonnegative entries; clamp the rounding noise.
            *x = (*x - l / q).max(0.0);
        }
    }
    if feasible < times.len() {
        return Err(Error::SolverBudgetExceeded {
            required,
            budget,
            partial: times.iter().zip(&values).map(|(&t, v)| (t, v[0])).collect(),
        });
    }
    Ok(Propagated {
        values,
        products: stop as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::operator::build_radial_operator;
    use crate::profile::RadialProfile;
    use crate::sequence::SequenceSpec;

    #[test]
    fn poisson_window_sums_to_one_and_centers() {
        for mean in [0.3, 5.0, 1e3, 1e6] {
            let (start, w) = poisson_window(mean, 1e-12);
            let total: f64 = w.iter().sum();
            assert!((total - 1.0).abs() < 1e-14);
            let m: f64 = w
                .iter()
                .enumerate()
                .map(|(i, p)| (start + i) as f64 * p)
                .sum();
            assert!((m - mean).abs() < 1e-9 * mean.max(1.0), "{m} vs {mean}");
            assert!((start + w.len()) as u64 <= terms_needed(1.0, mean));
        }
    }

    #[test]
    fn two_state_chain_matches_closed_form() {
        // single active row with rate 3: u(t) = e^{-3t}
        let op = RadialOperator::from_parts(vec![3.0], vec![0.0], None).unwrap();
        let out = propagate(&op, &[1.0], &[0.0, 0.5, 2.0], false, 1e-13, u64::MAX).unwrap();
        for (v, t) in out.values.iter().zip([0.0, 0.5, 2.0f64]) {
            assert!((v[0] - libm::exp(-3.0 * t)).abs() < 1e-13);
        }
    }

    #[test]
    fn budget_returns_partials() {
        let p = RadialProfile::tree(SequenceSpec::poly(2.0)).unwrap();
        let op = build_radial_operator(&p, 50).unwrap();
        let err =
            propagate(&op, &vec![1.0; 50], &[0.001, 100.0], false, 1e-12, 100_000).unwrap_err();
        match err {
            Error::SolverBudgetExceeded {
                partial,
                budget,
                required,
            } => {
                assert_eq!(partial.len(), 1);
                assert!(required > budget);
            }
            e => panic!("{e}"),
        }
    }
}
