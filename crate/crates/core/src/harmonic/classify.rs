//! Series criteria deciding stochastic completeness of a family.

use alloc::vec::Vec;

use crate::dd::Dd;
use crate::error::Error;
use crate::family::GraphFamily;
use crate::profile::RadialProfile;
use crate::sequence::{Growth, SequenceSpec};

use super::series::{assess_series, SeriesBehavior};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Incomplete,
    Complete,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// Trees: `Σ 1/k(r) < ∞` iff incomplete.
    InverseBranching,
    /// Spherically symmetric graphs: `Σ V(r)/(k₊(r) S(r)) < ∞` iff incomplete.
    VolumeOverOutwardFlux,
    /// `Σ 1/K₊(r) = ∞` implies complete; convergence says nothing.
    InverseOutwardDegree,
    /// Decorated trees: `Σ (k̃(r)+1)/k(r) < ∞` iff incomplete.
    DecoratedBranching,
    /// Weighted half-line: `Σ r/a(r) < ∞` iff incomplete.
    PathWeights,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::InverseBranching => "inverse-branching",
            Criterion::VolumeOverOutwardFlux => "volume-over-outward-flux",
            Criterion::InverseOutwardDegree => "inverse-outward-degree",
            Criterion::DecoratedBranching => "decorated-branching",
            Criterion::PathWeights => "path-weights",
        }
    }

    /// What convergence (`true`) or divergence (`false`) of the series implies.
    fn implies(self, convergent: bool) -> Option<Status> {
        match (self, convergent) {
            (Criterion::InverseOutwardDegree, true) => None,
            (_, true) => Some(Status::Incomplete),
            (_, false) => Some(Status::Complete),
        }
    }
}

/// One series test as evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct Evidence {
    pub criterion: Criterion,
    pub behavior: SeriesBehavior,
    /// Decided from the declared asymptotic classes rather than numerically.
    pub exact: bool,
    /// Implication of this test alone.
    pub implies: Option<Status>,
    /// `(r, Σ_{i<=r} t(i))` sampled at powers of two and at the last radius.
    pub partial_sums: Vec<(u64, f64)>,
    pub tail_estimate: Option<f64>,
    /// Radii `0..=r_max` summed.
    pub r_max: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    /// The test that decided, or the first test run when inconclusive.
    pub test: Criterion,
    /// True when every deciding test was evaluated symbolically.
    pub exact: bool,
    pub evidence: Vec<Evidence>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    /// Number of terms summed for numerical evidence and heuristics.
    pub radius: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { radius: 2000 }
    }
}

/// [`classify_with`] at the default options.
pub fn classify(family: &GraphFamily) -> Result<Verdict, Error> {
    classify_with(family, &ClassifyOptions::default())
}

/// Applies every series test that fits the family.
///
/// Parametric sequences (constant, polynomial, geometric, or a table whose
/// tail is one of those) are decided from their asymptotic classes; other
/// sequences fall back to [`assess_series`] on the first terms. Tests that
/// disagree make the verdict `Inconclusive`.
pub fn classify_with(family: &GraphFamily, opts: &ClassifyOptions) -> Result<Verdict, Error> {
    if opts.radius < 1 {
        return Err(Error::InvalidParameter(
            "classification radius must be at least 1",
        ));
    }
    let n = opts.radius;
    let mut evidence = Vec::new();
    match family {
        GraphFamily::DecoratedTree {
            branching,
            decorations,
        } => {
            branching.validate()?;
            decorations.validate()?;
            let growth = match (branching.growth(), decorations.growth()) {
                (Some(k), Some(kt)) => kt.max(Growth::ONE).div(k),
                _ => None,
            };
            let terms = (0..=n)
                .map(|r| Ok((count_f64(decorations, r)? + 1.0) / count_f64(branching, r)?))
                .collect::<Result<Vec<_>, Error>>()?;
            evidence.push(evaluate(Criterion::DecoratedBranching, growth, &terms));
        }
        GraphFamily::WeightedPath { weights } => {
            weights.validate()?;
            let growth = weights.growth().and_then(|a| {
                Growth::Order {
                    base: 1.0,
                    power: 1.0,
                }
                .div(a)
            });
            let terms = (0..=n)
                .map(|r| {
                    let a = weights.value(r);
                    if a.is_finite() && a > 0.0 {
                        Ok(r as f64 / a)
                    } else {
                        Err(Error::InvalidSequence {
                            radius: Some(r),
                            what: "edge weights must be finite and positive",
                        })
                    }
                })
                .collect::<Result<Vec<_>, Error>>()?;
            evidence.push(evaluate(Criterion::PathWeights, growth, &terms));
        }
        _ => {
            let profile = family.lower_to_profile()?;
            let outward = (0..=n)
                .map(|r| Ok(Dd::from_biguint(&profile.k_plus(r)?).to_f64()))
                .collect::<Result<Vec<f64>, Error>>()?;
            let inverse: Vec<f64> = outward.iter().map(|k| 1.0 / k).collect();
            let inverse_growth = profile.outward_growth().and_then(|g| Growth::ONE.div(g));
            if profile.is_tree() {
                evidence.push(evaluate(
                    Criterion::InverseBranching,
                    inverse_growth,
                    &inverse,
                ));
            }
            let flux_growth = profile
                .volume_over_sphere_growth()
                .zip(profile.outward_growth())
                .and_then(|(v, k)| v.div(k));
            let flux = volume_flux_terms(&profile, n)?;
            evidence.push(evaluate(
                Criterion::VolumeOverOutwardFlux,
                flux_growth,
                &flux,
            ));
            evidence.push(evaluate(
                Criterion::InverseOutwardDegree,
                inverse_growth,
                &inverse,
            ));
        }
    }
    Ok(decide(evidence))
}

fn count_f64(seq: &SequenceSpec, r: u64) -> Result<f64, Error> {
    Ok(Dd::from_biguint(&seq.count(r)?).to_f64())
}

/// `V(r) / (k₊(r) S(r))` for `r = 0..=n`, through `V/S = 1 + (V/S)(r-1) · S(r-1)/S(r)`.
pub(crate) fn volume_flux_terms(profile: &RadialProfile, n: u64) -> Result<Vec<f64>, Error> {
    let mut rho = Dd::ONE;
    let mut out = Vec::with_capacity(n as usize + 1);
    for r in 0..=n {
        if r > 0 {
            let (num, den) = profile.sphere_ratio(r)?;
            rho = Dd::ONE + rho * Dd::ratio(&num, &den);
        }
        out.push((rho / Dd::from_biguint(&profile.k_plus(r)?)).to_f64());
    }
    Ok(out)
}

fn evaluate(criterion: Criterion, growth: Option<Growth>, terms: &[f64]) -> Evidence {
    let assessment = assess_series(terms);
    let (behavior, exact) = match growth {
        Some(g) if g.summable() => (SeriesBehavior::Convergent, true),
        Some(_) => (SeriesBehavior::Divergent, true),
        None => (assessment.behavior, false),
    };
    let implies = match behavior {
        SeriesBehavior::Convergent => criterion.implies(true),
        SeriesBehavior::Divergent => criterion.implies(false),
        SeriesBehavior::Undecided => None,
    };
    let mut partial_sums = Vec::new();
    let mut acc = 0.0;
    for (r, t) in terms.iter().enumerate() {
        acc += t;
        if (r + 1).is_power_of_two() || r + 1 == terms.len() {
            partial_sums.push((r as u64, acc));
        }
    }
    Evidence {
        criterion,
        behavior,
        exact,
        implies,
        partial_sums,
        tail_estimate: if behavior == SeriesBehavior::Convergent {
            assessment.tail_estimate
        } else {
            None
        },
        r_max: terms.len() as u64 - 1,
    }
}

fn decide(evidence: Vec<Evidence>) -> Verdict {
    let deciding: Vec<&Evidence> = evidence.iter().filter(|e| e.implies.is_some()).collect();
    let first = evidence[0].criterion;
    match deciding.first() {
        None => Verdict {
            status: Status::Inconclusive,
            test: first,
            exact: false,
            evidence,
        },
        Some(lead) => {
            let status = lead.implies.unwrap_or(Status::Inconclusive);
            if deciding.iter().any(|e| e.implies != Some(status)) {
                return Verdict {
                    status: Status::Inconclusive,
                    test: first,
                    exact: false,
                    evidence,
                };
            }
            let test = lead.criterion;
            let exact = deciding.iter().all(|e| e.exact);
            Verdict {
                status,
                test,
                exact,
                evidence,
            }
        }
    }
}
