//! Monte Carlo of the minimal diffusion on the radial chain.
//!
//! At a vertex of valence `m` the walker waits an `Exp(m)` time and then
//! moves to a uniformly chosen neighbor. Only the radius is tracked, plus a
//! flag for sitting on an end vertex of a decorated tree. A path is killed
//! when it reaches the truncation sphere `S_R`, so the survival frequency
//! estimates the Dirichlet mass `M_R(t)` without bias.

use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::dd::Dd;
use crate::error::Error;
use crate::family::GraphFamily;
use crate::profile::RadialProfile;
use crate::sequence::SequenceSpec;

/// Above this ratio of same-sphere to moving rate, same-sphere jumps are not
/// drawn one by one. They form a Poisson stream independent of the moves, so
/// the wait for the next move is `Exp(moving)` and the stays in it are
/// `Poisson(m₀ · wait)`.
const STAY_RUN_AGGREGATION: f64 = 16.0;

/// Two-sided normal quantile for the reported confidence interval.
pub const CONFIDENCE_Z: f64 = 1.959_963_984_540_054;

/// Escape accounting, reported with every estimate.
pub const ESCAPE_POLICY: &str = "reaching S_R before the horizon counts as explosion";

/// Jump rates of the radial walk up to the truncation radius.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkModel {
    outward: Vec<f64>,
    inward: Vec<f64>,
    same: Vec<f64>,
    pendant: Vec<f64>,
}

fn to_f64(n: &BigUint) -> f64 {
    Dd::from_biguint(n).to_f64()
}

impl WalkModel {
    /// `k₊(r)`, `k₋(r)`, `m₀(r)` for `r < radius`.
    pub fn from_profile(profile: &RadialProfile, radius: usize) -> Result<Self, Error> {
        check_radius(radius)?;
        let mut model = WalkModel::empty(radius);
        for r in 0..radius {
            model.outward.push(to_f64(&profile.k_plus(r as u64)?));
            model.inward.push(to_f64(&profile.k_minus(r as u64)?));
            model.same.push(to_f64(&profile.m_zero(r as u64)?));
            model.pendant.push(0.0);
        }
        Ok(model)
    }

    /// A tree with `k̃(r)` end vertices on every vertex of `S_r`.
    pub fn decorated(
        branching: &SequenceSpec,
        decorations: &SequenceSpec,
        radius: usize,
    ) -> Result<Self, Error> {
        let mut model = WalkModel::from_profile(&RadialProfile::tree(branching.clone())?, radius)?;
        model.pendant = decorations
            .counts(radius as u64 - 1)?
            .iter()
            .map(to_f64)
            .collect();
        Ok(model)
    }

    /// The half-line with conductances `a(r)` between `r` and `r+1`.
    pub fn weighted_path(weights: &SequenceSpec, radius: usize) -> Result<Self, Error> {
        check_radius(radius)?;
        weights.validate()?;
        let mut model = WalkModel::empty(radius);
        for r in 0..radius as u64 {
            let a = weights.value(r);
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidSequence {
                    radius: Some(r),
                    what: "edge weights must be finite and positive",
                });
            }
            model
                .inward
                .push(model.outward.last().copied().unwrap_or(0.0));
            model.outward.push(a);
            model.same.push(0.0);
            model.pendant.push(0.0);
        }
        Ok(model)
    }

    pub fn from_family(family: &GraphFamily, radius: usize) -> Result<Self, Error> {
        match family {
            GraphFamily::DecoratedTree {
                branching,
                decorations,
            } => WalkModel::decorated(branching, decorations, radius),
            GraphFamily::WeightedPath { weights } => WalkModel::weighted_path(weights, radius),
            _ => WalkModel::from_profile(&family.lower_to_profile()?, radius),
        }
    }

    fn empty(radius: usize) -> Self {
        WalkModel {
            outward: Vec::with_capacity(radius),
            inward: Vec::with_capacity(radius),
            same: Vec::with_capacity(radius),
            pendant: Vec::with_capacity(radius),
        }
    }

    /// The truncation radius: reaching `S_R` kills the walker.
    pub fn radius(&self) -> usize {
        self.outward.len()
    }

    /// Holding rate `m(r)` at a vertex of `S_r`.
    pub fn rate(&self, r: usize) -> f64 {
        self.outward[r] + self.inward[r] + self.same[r] + self.pendant[r]
    }
}

fn check_radius(radius: usize) -> Result<(), Error> {
    if radius < 1 {
        return Err(Error::InvalidParameter(
            "truncation radius must be at least 1",
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathOutcome {
    SurvivedToHorizon,
    /// Killed on reaching `S_R` at this clock time.
    EscapedAt(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkState {
    pub radius: usize,
    /// On an end vertex hung on `S_radius`.
    pub at_end_vertex: bool,
    pub clock: f64,
    pub jumps: u64,
}

/// Seed of path `index` in a batch.
pub fn path_seed(seed_base: u64, index: u64) -> u64 {
    seed_base.wrapping_add(index)
}

fn exp<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e / rate
}

/// Number of same-sphere jumps in a wait, saturating where the mean leaves
/// the `u64` range.
fn stay_count<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if !(mean < 1e18) {
        return u64::MAX;
    }
    Poisson::new(mean).map_or(0, |d| d.sample(rng) as u64)
}

/// Runs one path until escape or until the clock passes `horizon`, calling
/// `visit` with the state after every move.
fn walk<F: FnMut(&WalkState)>(
    model: &WalkModel,
    horizon: f64,
    seed: u64,
    mut visit: F,
) -> PathOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = model.radius();
    let mut s = WalkState {
        radius: 0,
        at_end_vertex: false,
        clock: 0.0,
        jumps: 0,
    };
    visit(&s);
    loop {
        let r = s.radius;
        if s.at_end_vertex {
            s.clock += exp(&mut rng, 1.0);
            if !(s.clock <= horizon) {
                return PathOutcome::SurvivedToHorizon;
            }
            s.at_end_vertex = false;
            s.jumps = s.jumps.saturating_add(1);
            visit(&s);
            continue;
        }
        let out = model.outward[r];
        let inw = model.inward[r];
        let moving = out + inw + model.pendant[r];
        let skip = model.same[r] > STAY_RUN_AGGREGATION * moving;
        let same = if skip { 0.0 } else { model.same[r] };
        if skip {
            let hold = exp(&mut rng, moving);
            s.clock += hold;
            s.jumps = s
                .jumps
                .saturating_add(stay_count(&mut rng, model.same[r] * hold));
        } else {
            s.clock += exp(&mut rng, moving + same);
        }
        if !(s.clock <= horizon) {
            return PathOutcome::SurvivedToHorizon;
        }
        let u: f64 = rng.random::<f64>() * (moving + same);
        s.jumps = s.jumps.saturating_add(1);
        if u < out {
            s.radius += 1;
            if s.radius == n {
                visit(&s);
                return PathOutcome::EscapedAt(s.clock);
            }
        } else if u < out + inw {
            s.radius -= 1;
        } else if u < out + inw + same {
            // same sphere
        } else {
            // end vertices hung on S_{R-1} lie on S_R
            if r + 1 == n {
                s.radius = n;
                visit(&s);
                return PathOutcome::EscapedAt(s.clock);
            }
            s.at_end_vertex = true;
        }
        visit(&s);
    }
}

/// One path of the walk from the root with horizon `horizon`.
pub fn simulate_path(model: &WalkModel, horizon: f64, seed: u64) -> PathOutcome {
    walk(model, horizon, seed, |_| {})
}

/// As [`simulate_path`], also returning every visited state.
pub fn trace_path(model: &WalkModel, horizon: f64, seed: u64) -> (PathOutcome, Vec<WalkState>) {
    let mut trace = Vec::new();
    let outcome = walk(model, horizon, seed, |s| trace.push(*s));
    (outcome, trace)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalEstimate {
    pub horizon: f64,
    pub paths: u64,
    pub survivors: u64,
    pub escapes: u64,
    pub estimate: f64,
    /// `sqrt(p (1 - p) / N)` at the estimate.
    pub std_error: f64,
    /// Wilson score interval at [`CONFIDENCE_Z`].
    pub interval: (f64, f64),
    pub truncation_radius: usize,
    pub escape_policy: &'static str,
}

impl SurvivalEstimate {
    pub fn from_counts(
        horizon: f64,
        paths: u64,
        survivors: u64,
        truncation_radius: usize,
    ) -> Result<Self, Error> {
        if paths == 0 {
            return Err(Error::InvalidParameter("at least one path is required"));
        }
        if survivors > paths {
            return Err(Error::InvalidParameter("more survivors than paths"));
        }
        let n = paths as f64;
        let p = survivors as f64 / n;
        let z2 = CONFIDENCE_Z * CONFIDENCE_Z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half =
            CONFIDENCE_Z / (1.0 + z2 / n) * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
        Ok(SurvivalEstimate {
            horizon,
            paths,
            survivors,
            escapes: paths - survivors,
            estimate: p,
            std_error: libm::sqrt(p * (1.0 - p) / n),
            interval: ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0)),
            truncation_radius,
            escape_policy: ESCAPE_POLICY,
        })
    }
}

/// Survival frequencies at every time of `times` from `paths` paths seeded
/// `seed_base + i`. Each path is run once to the last time, so the
/// estimates share their random numbers and are nonincreasing in `t`.
pub fn estimate_survival_curve(
    model: &WalkModel,
    times: &[f64],
    paths: u64,
    seed_base: u64,
) -> Result<Vec<SurvivalEstimate>, Error> {
    check_horizons(times)?;
    if paths == 0 {
        return Err(Error::InvalidParameter("at least one path is required"));
    }
    let horizon = times[times.len() - 1];
    let outcomes = (0..paths).map(|i| simulate_path(model, horizon, path_seed(seed_base, i)));
    survival_counts(times, outcomes)
        .into_iter()
        .zip(times)
        .map(|(s, &t)| SurvivalEstimate::from_counts(t, paths, s, model.radius()))
        .collect()
}

/// Survival frequency at `t`.
pub fn estimate_survival(
    model: &WalkModel,
    t: f64,
    paths: u64,
    seed_base: u64,
) -> Result<SurvivalEstimate, Error> {
    Ok(estimate_survival_curve(model, &[t], paths, seed_base)?.remove(0))
}

/// Survivors at each time among `outcomes` run to the last time.
pub fn survival_counts<I: IntoIterator<Item = PathOutcome>>(
    times: &[f64],
    outcomes: I,
) -> Vec<u64> {
    let mut counts = alloc::vec![0u64; times.len()];
    for o in outcomes {
        for (c, &t) in counts.iter_mut().zip(times) {
            match o {
                PathOutcome::EscapedAt(tau) if tau <= t => {}
                _ => *c += 1,
            }
        }
    }
    counts
}

pub(crate) fn check_horizons(times: &[f64]) -> Result<(), Error> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidParameter(
            "horizons must be finite and positive",
        ));
    }
    if times.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidParameter("times must be strictly increasing"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::{dirichlet_mass_operator, family_operator, MassOptions};
    use crate::profile::IntraSphere;

    fn tree(k: SequenceSpec) -> GraphFamily {
        GraphFamily::SymmetricTree { branching: k }
    }

    #[test]
    fn half_line_walker_survives() {
        let p = RadialProfile::antitree(SequenceSpec::constant(1.0)).unwrap();
        let model = WalkModel::from_profile(&p, 1_000_000).unwrap();
        for seed in 0..20 {
            assert_eq!(
                simulate_path(&model, 10.0, seed),
                PathOutcome::SurvivedToHorizon
            );
        }
    }

    #[test]
    fn first_holding_time_has_mean_one_over_m0() {
        let model = WalkModel::from_family(&tree(SequenceSpec::constant(5.0)), 10).unwrap();
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|i| {
                let (_, trace) = trace_path(&model, 100.0, i);
                trace[1].clock
            })
            .sum::<f64>()
            / n as f64;
        // sd of the mean is 0.2 / sqrt(n) ~ 1.4e-3
        assert!((mean - 0.2).abs() < 6e-3, "{mean}");
    }

    #[test]
    fn trace_is_consistent() {
        let fam = GraphFamily::DecoratedTree {
            branching: SequenceSpec::poly(2.0),
            decorations: SequenceSpec::poly(1.0),
        };
        let model = WalkModel::from_family(&fam, 30).unwrap();
        let (outcome, trace) = trace_path(&model, 5.0, 7);
        assert_eq!(trace[0].clock, 0.0);
        for w in trace.windows(2) {
            assert!(w[1].clock > w[0].clock);
            assert_eq!(w[1].jumps, w[0].jumps + 1);
            let dr = w[1].radius as i64 - w[0].radius as i64;
            assert!(dr.abs() <= 1);
            if w[1].at_end_vertex || w[0].at_end_vertex {
                assert_eq!(dr, 0);
            }
        }
        if let PathOutcome::EscapedAt(c) = outcome {
            assert_eq!(trace.last().unwrap().clock, c);
            assert_eq!(trace.last().unwrap().radius, 30);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let model = WalkModel::from_family(&tree(SequenceSpec::poly(2.0)), 50).unwrap();
        let a = estimate_survival(&model, 1.0, 500, 42).unwrap();
        let b = estimate_survival(&model, 1.0, 500, 42).unwrap();
        assert_eq!(a, b);
        let c = estimate_survival(&model, 1.0, 500, 10_000).unwrap();
        assert_ne!(a.survivors, c.survivors);
    }

    #[test]
    fn zero_paths_rejected_and_one_path_is_binary() {
        let model = WalkModel::from_family(&tree(SequenceSpec::constant(2.0)), 5).unwrap();
        assert!(estimate_survival(&model, 1.0, 0, 1).is_err());
        for seed in 0..10 {
            let e = estimate_survival(&model, 1.0, 1, seed).unwrap();
            assert!(e.estimate == 0.0 || e.estimate == 1.0);
            assert!(e.interval.0 <= e.estimate && e.estimate <= e.interval.1);
        }
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        for (n, s) in [(10, 0), (10, 10), (100, 37), (100_000, 74_000)] {
            let e = SurvivalEstimate::from_counts(1.0, n, s, 10).unwrap();
            assert!(e.interval.0 <= e.estimate && e.estimate <= e.interval.1);
            assert_eq!(e.survivors + e.escapes, n);
        }
        let e = SurvivalEstimate::from_counts(1.0, 100, 50, 10).unwrap();
        assert!((e.interval.0 - 0.4038).abs() < 1e-3 && (e.interval.1 - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn survival_is_monotone_in_time() {
        let model = WalkModel::from_family(&tree(SequenceSpec::poly(2.0)), 40).unwrap();
        let est = estimate_survival_curve(&model, &[0.1, 0.5, 1.0, 2.0], 2000, 9).unwrap();
        for w in est.windows(2) {
            assert!(w[1].survivors <= w[0].survivors);
        }
    }

    #[test]
    fn matches_dirichlet_mass() {
        for fam in [
            tree(SequenceSpec::poly(2.0)),
            GraphFamily::DecoratedTree {
                branching: SequenceSpec::poly(2.0),
                decorations: SequenceSpec::poly(1.0),
            },
            GraphFamily::WeightedPath {
                weights: SequenceSpec::poly(3.0),
            },
        ] {
            let r = 20;
            let times = [0.5, 1.0];
            let model = WalkModel::from_family(&fam, r).unwrap();
            let est = estimate_survival_curve(&model, &times, 20_000, 3).unwrap();
            let op = family_operator(&fam, r).unwrap();
            let mass = dirichlet_mass_operator(&op, &times, &MassOptions::default()).unwrap();
            for (e, m) in est.iter().zip(&mass.rows[0].mass) {
                let sigma = libm::sqrt(m * (1.0 - m) / e.paths as f64);
                assert!(
                    (e.estimate - m).abs() <= 4.0 * sigma + 1e-12,
                    "{fam:?}: {} vs {m}",
                    e.estimate
                );
            }
        }
    }

    #[test]
    fn same_sphere_edges_shorten_holding_but_not_mass() {
        // Skipping over same-sphere jumps must leave the law of the
        // radius unchanged.
        let k = SequenceSpec::poly_shifted(1.0, 2.0);
        let plain = WalkModel::from_family(&tree(k.clone()), 6).unwrap();
        let complete = WalkModel::from_family(
            &GraphFamily::IntraSphereTree {
                branching: k,
                intra: IntraSphere::Complete,
            },
            6,
        )
        .unwrap();
        assert!(complete.rate(4) > STAY_RUN_AGGREGATION * plain.rate(4));
        let a = estimate_survival(&plain, 1.0, 20_000, 5).unwrap();
        let b = estimate_survival(&complete, 1.0, 20_000, 5).unwrap();
        let sigma = libm::sqrt(2.0) * a.std_error.max(b.std_error);
        assert!((a.estimate - b.estimate).abs() <= 4.0 * sigma);
    }
}
