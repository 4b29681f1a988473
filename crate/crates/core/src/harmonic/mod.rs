//! Radial solutions of `(Δ + λ) w = 0` and the series criteria built on them.
//!
//! All three solvers share one recurrence. Writing `F(r)` for the outward
//! flux `out(r) · d(r)` with `d(r) = w(r+1) - w(r)`,
//!
//! ```text
//! F(r) = coef(r) · w(r) + carry(r) · F(r-1),    F(-1) = 0,
//! ```
//!
//! where `carry(r) = S(r-1)/S(r)` relates consecutive spheres. Sphere sizes
//! themselves are never formed, so factorial-type growth is no obstacle.

mod classify;
mod probe;
mod series;

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::dd::Dd;
use crate::error::Error;
use crate::profile::RadialProfile;
use crate::sequence::SequenceSpec;

pub use classify::{
    classify, classify_with, ClassifyOptions, Criterion, Evidence, Status, Verdict,
};
pub use probe::{boundedness_probe, Boundedness};
pub use series::{
    assess_series, SeriesAssessment, SeriesBehavior, DIVERGENCE_THRESHOLD, RATIO_THRESHOLD,
    RATIO_WINDOW,
};

/// The spectral parameter `λ > 0` and the constants derived from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaParam {
    lambda: f64,
}

impl LambdaParam {
    pub fn new(lambda: f64) -> Result<Self, Error> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(LambdaParam { lambda })
        } else {
            Err(Error::InvalidParameter(
                "lambda must be finite and positive",
            ))
        }
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }

    /// `λ / (1 + λ)`: an end vertex `e` hung on `x` carries `v(e) = v(x)/(1+λ)`,
    /// so it contributes `α v(x)` to `Δv(x)`.
    pub fn alpha(self) -> f64 {
        self.alpha_dd().to_f64()
    }

    /// `1 - ρ` with `ρ` the decaying root of `ρ² - (2+λ)ρ + 1 = 0`: an
    /// infinite ray hung on `x` carries `v = ρⁿ v(x)` and contributes
    /// `β v(x)` to `Δv(x)`. Equals `2λ / (λ + √(λ(λ+4)))`.
    pub fn beta(self) -> f64 {
        self.beta_dd().to_f64()
    }

    pub(crate) fn dd(self) -> Dd {
        Dd::from_f64(self.lambda)
    }

    pub(crate) fn alpha_dd(self) -> Dd {
        self.dd() / (Dd::ONE + self.lambda)
    }

    pub(crate) fn beta_dd(self) -> Dd {
        let l = self.dd();
        let root = (l * (l + 4.0)).sqrt();
        (l + l) / (l + root)
    }
}

/// What is hung on each tree vertex of a decorated tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attachment {
    /// `k̃(r)` valence-one end vertices.
    EndVertex,
    /// `k̃(r)` infinite rays.
    PathToInfinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionKind {
    Radial,
    DecoratedTree(Attachment),
    WeightedPath,
}

/// `w(0..=R)` with `w(0) = 1`, the increments `d(0..R)` and the envelope
/// coefficients `c(0..R)` with `c(r) w(0) <= d(r) <= c(r) w(r)`.
///
/// For a radial profile `c(r) = λ V(r) / (k₊(r) S(r))`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSolution {
    lambda: LambdaParam,
    kind: SolutionKind,
    w: Vec<Dd>,
    increments: Vec<Dd>,
    envelope: Vec<Dd>,
}

impl RadialSolution {
    pub fn lambda(&self) -> LambdaParam {
        self.lambda
    }

    pub fn kind(&self) -> SolutionKind {
        self.kind
    }

    /// The computed depth `R`.
    pub fn radius(&self) -> usize {
        self.increments.len()
    }

    pub fn w(&self) -> &[Dd] {
        &self.w
    }

    pub fn increments(&self) -> &[Dd] {
        &self.increments
    }

    pub fn envelope(&self) -> &[Dd] {
        &self.envelope
    }

    pub fn values(&self) -> Vec<f64> {
        self.w.iter().map(|x| x.to_f64()).collect()
    }

    pub fn increment_values(&self) -> Vec<f64> {
        self.increments.iter().map(|x| x.to_f64()).collect()
    }
}

/// Coefficients of one recurrence step.
struct Step {
    coef: Dd,
    /// `S(r-1)/S(r)`; ignored at `r = 0`.
    carry: Dd,
    outward: Dd,
}

fn run(
    lambda: LambdaParam,
    kind: SolutionKind,
    radius: usize,
    mut step: impl FnMut(u64) -> Result<Step, Error>,
) -> Result<RadialSolution, Error> {
    if radius < 1 {
        return Err(Error::InvalidParameter("radius must be at least 1"));
    }
    let mut sol = RadialSolution {
        lambda,
        kind,
        w: Vec::with_capacity(radius + 1),
        increments: Vec::with_capacity(radius),
        envelope: Vec::with_capacity(radius),
    };
    sol.w.push(Dd::ONE);
    let (mut flux, mut env) = (Dd::ZERO, Dd::ZERO);
    for r in 0..radius {
        let Step {
            coef,
            carry,
            outward,
        } = step(r as u64)?;
        let wr = sol.w[r];
        if r == 0 {
            flux = coef * wr;
            env = coef;
        } else {
            flux = coef * wr + carry * flux;
            env = coef + carry * env;
        }
        let d = flux / outward;
        let next = wr + d;
        if !(d.is_finite() && next.is_finite()) {
            return Err(Error::DivergedAt {
                radius: r,
                prefix: Box::new(sol),
            });
        }
        sol.increments.push(d);
        sol.envelope.push(env / outward);
        sol.w.push(next);
    }
    Ok(sol)
}

fn positive_count(seq: &SequenceSpec, r: u64, what: &'static str) -> Result<BigUint, Error> {
    let k = seq.count(r)?;
    if k.bits() == 0 {
        return Err(Error::InvalidSequence {
            radius: Some(r),
            what,
        });
    }
    Ok(k)
}

/// Radial `λ`-harmonic function of a spherically symmetric graph, by the
/// running-sum recurrence `k₊(r) S(r) d(r) = λ Σ_{i<=r} S(i) w(i)`.
///
/// `m₀` never enters: same-sphere differences of a radial function vanish.
pub fn solve_radial(
    profile: &RadialProfile,
    lambda: LambdaParam,
    radius: usize,
) -> Result<RadialSolution, Error> {
    let coef = lambda.dd();
    run(lambda, SolutionKind::Radial, radius, |r| {
        let carry = if r == 0 {
            Dd::ZERO
        } else {
            let (num, den) = profile.sphere_ratio(r)?;
            Dd::ratio(&num, &den)
        };
        Ok(Step {
            coef,
            carry,
            outward: Dd::from_biguint(&profile.k_plus(r)?),
        })
    })
}

/// Decorated tree: `k(r) d(r) = (c k̃(r) + λ) w(r) + d(r-1)` with `c = α`
/// for end vertices and `c = β` for rays.
///
/// With `k̃ ≡ 0` this is bit-for-bit [`solve_radial`] on the tree `T_k`.
pub fn solve_decorated_tree(
    branching: &SequenceSpec,
    decorations: &SequenceSpec,
    lambda: LambdaParam,
    radius: usize,
    attachment: Attachment,
) -> Result<RadialSolution, Error> {
    branching.validate()?;
    decorations.validate()?;
    let weight = match attachment {
        Attachment::EndVertex => lambda.alpha_dd(),
        Attachment::PathToInfinity => lambda.beta_dd(),
    };
    let base = lambda.dd();
    let mut prev_k = BigUint::one();
    run(
        lambda,
        SolutionKind::DecoratedTree(attachment),
        radius,
        |r| {
            let k = positive_count(branching, r, "branching number must be at least 1")?;
            let kt = decorations.count(r)?;
            let coef = if kt.bits() == 0 {
                base
            } else {
                base + weight * Dd::from_biguint(&kt)
            };
            let carry = if r == 0 {
                Dd::ZERO
            } else {
                Dd::ratio(&BigUint::one(), &prev_k)
            };
            let outward = Dd::from_biguint(&k);
            prev_k = k;
            Ok(Step {
                coef,
                carry,
                outward,
            })
        },
    )
}

/// Weighted half-line: `a(r) d(r) = λ Σ_{i<=r} v(i)`.
pub fn solve_weighted_path(
    weights: &SequenceSpec,
    lambda: LambdaParam,
    radius: usize,
) -> Result<RadialSolution, Error> {
    weights.validate()?;
    let coef = lambda.dd();
    run(lambda, SolutionKind::WeightedPath, radius, |r| {
        let a = weights.value(r);
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidSequence {
                radius: Some(r),
                what: "edge weights must be finite and positive",
            });
        }
        Ok(Step {
            coef,
            carry: Dd::ONE,
            outward: Dd::from_f64(a),
        })
    })
}
