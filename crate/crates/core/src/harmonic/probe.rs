//! Numerical boundedness test for a computed radial solution.

use super::series::{power_exponent, DIVERGENCE_THRESHOLD, RATIO_THRESHOLD, RATIO_WINDOW};
use super::RadialSolution;

/// Exponents of `d(r) ~ r^{-p}` within this distance of one are not decisive.
const PROBE_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundedness {
    /// `sup w` is finite, estimated as `w(R)` plus the extrapolated tail.
    Bounded {
        sup_estimate: f64,
    },
    /// `w` grows without bound. `rate_estimate` is the geometric mean of the
    /// trailing increment ratios (one for sub-geometric growth).
    Unbounded {
        rate_estimate: f64,
    },
    Undetermined,
}

/// Decides whether `w` stays bounded from its increments `d(r) > 0`.
///
/// Unbounded when `w` or the partial sums of the lower envelope `c(r) w(0)`
/// pass the divergence threshold, or when the trailing increments do not
/// decrease; bounded when the increments decay geometrically or like a
/// power `r^{-p}` with `p` clearly above one.
pub fn boundedness_probe(solution: &RadialSolution) -> Boundedness {
    let w = solution.values();
    let d = solution.increment_values();
    let w0 = w[0];
    let last_w = w[w.len() - 1];
    let lower: f64 = solution.envelope().iter().map(|c| c.to_f64() * w0).sum();
    if !(last_w - w0 < DIVERGENCE_THRESHOLD * w0) || !(lower < DIVERGENCE_THRESHOLD * w0) {
        return Boundedness::Unbounded {
            rate_estimate: trailing_rate(&d),
        };
    }
    if d.len() <= 2 * RATIO_WINDOW {
        return Boundedness::Undetermined;
    }
    let tail = &d[d.len() - RATIO_WINDOW - 1..];
    let ratios = || tail.windows(2).map(|p| p[1] / p[0]);
    let min_ratio = ratios().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios().fold(0.0f64, f64::max);
    let last_d = tail[RATIO_WINDOW];
    if min_ratio >= 1.0 {
        return Boundedness::Unbounded {
            rate_estimate: trailing_rate(&d),
        };
    }
    if max_ratio <= 1.0 - RATIO_THRESHOLD {
        return Boundedness::Bounded {
            sup_estimate: last_w + last_d * max_ratio / (1.0 - max_ratio),
        };
    }
    match power_exponent(&d) {
        Some(p) if p >= 1.0 + PROBE_MARGIN => Boundedness::Bounded {
            sup_estimate: last_w + last_d * d.len() as f64 / (p - 1.0),
        },
        Some(p) if p <= 1.0 - PROBE_MARGIN => Boundedness::Unbounded {
            rate_estimate: trailing_rate(&d),
        },
        _ => Boundedness::Undetermined,
    }
}

fn trailing_rate(d: &[f64]) -> f64 {
    let n = d.len().min(RATIO_WINDOW + 1);
    if n < 2 {
        return f64::NAN;
    }
    let tail = &d[d.len() - n..];
    let (a, b) = (tail[0], tail[n - 1]);
    if a > 0.0 && b.is_finite() {
        libm::pow(b / a, 1.0 / (n - 1) as f64)
    } else {
        f64::INFINITY
    }
}
