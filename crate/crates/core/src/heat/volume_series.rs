//! Volume-growth series `Σ V(r)/S(r+1)` and `Σ V(r)/(k₊(r) S(r))`.
//!
//! The first series is a volume-growth condition that neither implies nor
//! is implied by stochastic completeness; comparing it with the second
//! (which decides completeness) exhibits both failures.

use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::dd::Dd;
use crate::error::Error;
use crate::harmonic::{assess_series, SeriesAssessment};
use crate::profile::RadialProfile;
use crate::sequence::SequenceSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeRatioSeries {
    /// Partial sums of `V(r)/S(r+1)` for `r = 0..=R`.
    pub volume_over_next_sphere: Vec<f64>,
    /// Partial sums of `V(r)/(k₊(r) S(r))`; empty for decorated trees, which
    /// are not spherically symmetric.
    pub volume_over_flux: Vec<f64>,
    pub next_sphere_assessment: SeriesAssessment,
    pub flux_assessment: Option<SeriesAssessment>,
}

fn partial_sums(terms: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    terms
        .iter()
        .map(|t| {
            acc += t;
            acc
        })
        .collect()
}

/// Both series for a radial profile, each term an exact big-integer ratio
/// rounded once.
pub fn volume_ratio_series(
    profile: &RadialProfile,
    radius: u64,
) -> Result<VolumeRatioSeries, Error> {
    let spheres = profile.spheres(radius + 1)?;
    let mut volume = BigUint::default();
    let mut next = Vec::with_capacity(radius as usize + 1);
    let mut flux = Vec::with_capacity(radius as usize + 1);
    for r in 0..=radius as usize {
        volume += &spheres[r];
        next.push(Dd::ratio(&volume, &spheres[r + 1]).to_f64());
        let out = profile.k_plus(r as u64)? * &spheres[r];
        flux.push(Dd::ratio(&volume, &out).to_f64());
    }
    Ok(VolumeRatioSeries {
        next_sphere_assessment: assess_series(&next),
        flux_assessment: Some(assess_series(&flux)),
        volume_over_next_sphere: partial_sums(&next),
        volume_over_flux: partial_sums(&flux),
    })
}

/// `Σ Ṽ(r)/S̃(r+1)` for a decorated tree, counting end vertices where they
/// sit: `S̃(r) = S(r) + k̃(r-1) S(r-1)` and `Ṽ(r) = Σ_{i<=r} S̃(i)`.
pub fn decorated_volume_ratio_series(
    branching: &SequenceSpec,
    decorations: &SequenceSpec,
    radius: u64,
) -> Result<VolumeRatioSeries, Error> {
    let tree = RadialProfile::tree(branching.clone())?;
    let spheres = tree.spheres(radius + 1)?;
    let kt = decorations.counts(radius)?;
    let decorated = |r: usize| {
        if r == 0 {
            spheres[0].clone()
        } else {
            &spheres[r] + &kt[r - 1] * &spheres[r - 1]
        }
    };
    let mut volume = BigUint::default();
    let mut next = Vec::with_capacity(radius as usize + 1);
    for r in 0..=radius as usize {
        volume += decorated(r);
        next.push(Dd::ratio(&volume, &decorated(r + 1)).to_f64());
    }
    Ok(VolumeRatioSeries {
        next_sphere_assessment: assess_series(&next),
        flux_assessment: None,
        volume_over_next_sphere: partial_sums(&next),
        volume_over_flux: Vec::new(),
    })
}
