//! The graph families studied by the crate and their lowering to profiles.

use crate::error::Error;
use crate::profile::{IntraSphere, RadialProfile};
use crate::sequence::SequenceSpec;

#[derive(Clone, Debug)]
pub enum GraphFamily {
    /// `T_k`: every vertex of `S_r` has `k(r)` children.
    SymmetricTree {
        branching: SequenceSpec,
    },
    /// `T_k` with `k̃(r)` valence-one end vertices hung on every vertex of
    /// `S_r`. Not spherically symmetric in the profile sense.
    DecoratedTree {
        branching: SequenceSpec,
        decorations: SequenceSpec,
    },
    /// `G_k`: `T_k` plus same-sphere edges.
    IntraSphereTree {
        branching: SequenceSpec,
        intra: IntraSphere,
    },
    /// `G_S`: every vertex of `S_r` adjacent to every vertex of `S_{r+1}`.
    Antitree {
        sphere: SequenceSpec,
    },
    /// The half-line `0 - 1 - 2 - ...` with edge weights `a(r) = a_{r,r+1}`.
    WeightedPath {
        weights: SequenceSpec,
    },
    CustomRadial(RadialProfile),
}

impl GraphFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GraphFamily::SymmetricTree { .. } => "symmetric tree",
            GraphFamily::DecoratedTree { .. } => "decorated tree",
            GraphFamily::IntraSphereTree { .. } => "tree with same-sphere edges",
            GraphFamily::Antitree { .. } => "antitree",
            GraphFamily::WeightedPath { .. } => "weighted path",
            GraphFamily::CustomRadial(_) => "custom radial graph",
        }
    }

    /// Lowers to a radial profile. Decorated trees and weighted paths carry
    /// their own solvers and are rejected with `UnsupportedLowering`.
    pub fn lower_to_profile(&self) -> Result<RadialProfile, Error> {
        match self {
            GraphFamily::SymmetricTree { branching } => RadialProfile::tree(branching.clone()),
            GraphFamily::IntraSphereTree { branching, intra } => {
                RadialProfile::tree_with_intra(branching.clone(), intra.clone())
            }
            GraphFamily::Antitree { sphere } => RadialProfile::antitree(sphere.clone()),
            GraphFamily::CustomRadial(profile) => Ok(profile.clone()),
            GraphFamily::DecoratedTree { .. } | GraphFamily::WeightedPath { .. } => {
                Err(Error::UnsupportedLowering {
                    family: self.name(),
                })
            }
        }
    }
}
