//! Convergence heuristics for numerically given positive series.

use libm::log;

/// Number of trailing term ratios inspected.
pub const RATIO_WINDOW: usize = 20;
/// Ratios at most `1 - RATIO_THRESHOLD` count as geometric decay.
pub const RATIO_THRESHOLD: f64 = 1e-3;
/// Partial sums at least this large count as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;
/// Fitted power-law exponents outside `[1 - POWER_MARGIN, 1 + POWER_MARGIN]`
/// are decisive.
pub const POWER_MARGIN: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesBehavior {
    Convergent,
    Divergent,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesAssessment {
    pub behavior: SeriesBehavior,
    pub partial_sum: f64,
    /// Estimated remainder beyond the last term, when convergent.
    pub tail_estimate: Option<f64>,
    /// Max trailing ratio or fitted decay exponent that decided the case.
    pub statistic: f64,
    pub terms: usize,
}

/// Fitted exponent `p` of `t(n) ~ n^{-p}` between the middle and the end of
/// the sequence, with `n` counted from one.
pub(crate) fn power_exponent(terms: &[f64]) -> Option<f64> {
    let n = terms.len();
    if n < 4 {
        return None;
    }
    let (h, last) = (n / 2 - 1, n - 1);
    let (a, b) = (terms[h], terms[last]);
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return None;
    }
    Some(log(a / b) / log((last + 1) as f64 / (h + 1) as f64))
}

/// Decides `Σ t(n)` from its first terms: a large partial sum or
/// non-decreasing trailing terms mean divergence, trailing ratios bounded
/// below one mean convergence, and otherwise the fitted power-law exponent
/// is compared with one. Anything closer to the boundary is `Undecided`.
pub fn assess_series(terms: &[f64]) -> SeriesAssessment {
    let partial_sum: f64 = terms.iter().sum();
    let mut out = SeriesAssessment {
        behavior: SeriesBehavior::Undecided,
        partial_sum,
        tail_estimate: None,
        statistic: f64::NAN,
        terms: terms.len(),
    };
    if !(partial_sum < DIVERGENCE_THRESHOLD) {
        out.behavior = SeriesBehavior::Divergent;
        return out;
    }
    if terms.len() <= 2 * RATIO_WINDOW {
        return out;
    }
    let tail = &terms[terms.len() - RATIO_WINDOW - 1..];
    if tail.iter().all(|&t| t == 0.0) {
        out.behavior = SeriesBehavior::Convergent;
        out.tail_estimate = Some(0.0);
        out.statistic = 0.0;
        return out;
    }
    if tail.iter().any(|&t| !(t > 0.0)) {
        return out;
    }
    let max_ratio = tail.windows(2).map(|p| p[1] / p[0]).fold(0.0f64, f64::max);
    let min_ratio = tail
        .windows(2)
        .map(|p| p[1] / p[0])
        .fold(f64::INFINITY, f64::min);
    let last = tail[RATIO_WINDOW];
    if min_ratio >= 1.0 {
        out.behavior = SeriesBehavior::Divergent;
        out.statistic = min_ratio;
    } else if max_ratio <= 1.0 - RATIO_THRESHOLD {
        out.behavior = SeriesBehavior::Convergent;
        out.statistic = max_ratio;
        out.tail_estimate = Some(last * max_ratio / (1.0 - max_ratio));
    } else if let Some(p) = power_exponent(terms) {
        out.statistic = p;
        if p >= 1.0 + POWER_MARGIN {
            out.behavior = SeriesBehavior::Convergent;
            out.tail_estimate = Some(last * terms.len() as f64 / (p - 1.0));
        } else if p <= 1.0 - POWER_MARGIN {
            out.behavior = SeriesBehavior::Divergent;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn terms(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|i| f(i as f64)).collect()
    }

    #[test]
    fn geometric_converges_with_tail() {
        let t = terms(100, |r| libm::pow(0.5, r));
        let a = assess_series(&t);
        assert_eq!(a.behavior, SeriesBehavior::Convergent);
        let total = a.partial_sum + a.tail_estimate.unwrap();
        assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_square_converges() {
        let t = terms(2000, |r| 1.0 / ((r + 1.0) * (r + 1.0)));
        assert_eq!(assess_series(&t).behavior, SeriesBehavior::Convergent);
    }

    #[test]
    fn constant_terms_diverge() {
        let t = terms(200, |_| 0.5);
        assert_eq!(assess_series(&t).behavior, SeriesBehavior::Divergent);
    }

    #[test]
    fn slow_power_law_diverges() {
        let t = terms(2000, |r| 1.0 / libm::sqrt(r + 1.0));
        assert_eq!(assess_series(&t).behavior, SeriesBehavior::Divergent);
    }

    #[test]
    fn harmonic_series_is_undecided() {
        let t = terms(2000, |r| 1.0 / (r + 1.0));
        assert_eq!(assess_series(&t).behavior, SeriesBehavior::Undecided);
    }

    #[test]
    fn huge_partial_sum_diverges() {
        let t = terms(50, |r| 1e5 * (r + 1.0));
        assert_eq!(assess_series(&t).behavior, SeriesBehavior::Divergent);
    }

    #[test]
    fn short_series_undecided() {
        let t = terms(10, |r| 1.0 / (r + 1.0));
        assert_eq!(assess_series(&t).behavior, SeriesBehavior::Undecided);
    }

    #[test]
    fn eventually_zero_converges() {
        let mut t = terms(100, |_| 0.0);
        t[3] = 1.0;
        let a = assess_series(&t);
        assert_eq!(a.behavior, SeriesBehavior::Convergent);
        assert_eq!(a.partial_sum, 1.0);
    }
}
