//! Spherically symmetric profiles `k₊(r), k₋(r), m₀(r), S(r)`.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, ProfileDefect};
use crate::sequence::{Growth, SequenceSpec};

/// Profile invariants are checked for `r <= DEFAULT_CHECK_RADIUS` on construction.
pub const DEFAULT_CHECK_RADIUS: u64 = 200;

/// Rule for the same-sphere edges of a profile.
#[derive(Clone, Debug, Default)]
pub enum IntraSphere {
    #[default]
    None,
    /// Every sphere is a complete graph, `m₀(r) = S(r) - 1`.
    Complete,
    /// Every sphere carries an `m₀(r)`-regular graph.
    Regular(SequenceSpec),
}

#[derive(Clone, Debug)]
enum Shape {
    Tree {
        branching: SequenceSpec,
    },
    Antitree {
        sphere: SequenceSpec,
    },
    Custom {
        k_plus: SequenceSpec,
        k_minus: SequenceSpec,
        sphere: SequenceSpec,
    },
}

/// Degree and sphere-size sequences of a spherically symmetric graph.
///
/// Sequences are evaluated lazily and exactly. For trees the sphere sizes
/// are partial products of the branching numbers and are only formed when
/// asked for, so operators that need just the degrees scale to large radii.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    shape: Shape,
    intra: IntraSphere,
}

impl RadialProfile {
    pub fn tree(branching: SequenceSpec) -> Result<Self, Error> {
        Self::tree_with_intra(branching, IntraSphere::None)
    }

    pub fn tree_with_intra(branching: SequenceSpec, intra: IntraSphere) -> Result<Self, Error> {
        branching.validate()?;
        Self::checked(Shape::Tree { branching }, intra)
    }

    /// Every vertex of `S_r` joined to every vertex of `S_{r+1}`.
    pub fn antitree(sphere: SequenceSpec) -> Result<Self, Error> {
        Self::antitree_with_intra(sphere, IntraSphere::None)
    }

    pub fn antitree_with_intra(sphere: SequenceSpec, intra: IntraSphere) -> Result<Self, Error> {
        sphere.validate()?;
        Self::checked(Shape::Antitree { sphere }, intra)
    }

    pub fn custom(
        k_plus: SequenceSpec,
        k_minus: SequenceSpec,
        m_zero: SequenceSpec,
        sphere: SequenceSpec,
    ) -> Result<Self, Error> {
        for s in [&k_plus, &k_minus, &m_zero, &sphere] {
            s.validate()?;
        }
        if !m_zero.count(0)?.is_zero() {
            return Err(Error::InconsistentProfile {
                radius: 0,
                defect: ProfileDefect::OriginDegrees,
            });
        }
        Self::checked(
            Shape::Custom {
                k_plus,
                k_minus,
                sphere,
            },
            IntraSphere::Regular(m_zero),
        )
    }

    fn checked(shape: Shape, intra: IntraSphere) -> Result<Self, Error> {
        if let IntraSphere::Regular(d) = &intra {
            d.validate()?;
        }
        let profile = RadialProfile { shape, intra };
        profile.check(DEFAULT_CHECK_RADIUS)?;
        Ok(profile)
    }

    /// Returns a copy with the same-sphere rule replaced. `m₀` never enters
    /// the radial recurrences or operators, only the holding rates of the walk.
    pub fn with_intra(&self, intra: IntraSphere) -> Result<Self, Error> {
        Self::checked(self.shape.clone(), intra)
    }

    pub fn intra(&self) -> &IntraSphere {
        &self.intra
    }

    /// Validates the profile invariants for `r <= radius`, naming the first
    /// radius that fails.
    pub fn check(&self, radius: u64) -> Result<(), Error> {
        let defect = |r, defect| Err(Error::InconsistentProfile { radius: r, defect });
        if !self.sphere(0)?.is_one() {
            return defect(0, ProfileDefect::OriginSphere);
        }
        if !self.k_minus(0)?.is_zero() || !self.m_zero(0)?.is_zero() {
            return defect(0, ProfileDefect::OriginDegrees);
        }
        let spheres = self.spheres(radius + 1)?;
        for r in 0..=radius {
            let i = r as usize;
            let kp = self.k_plus(r)?;
            if kp.is_zero() {
                return defect(r, ProfileDefect::NoOutwardEdge);
            }
            if &kp * &spheres[i] != self.k_minus(r + 1)? * &spheres[i + 1] {
                return defect(r, ProfileDefect::EdgeCount);
            }
            let intra = self.m_zero_with_sphere(r, &spheres[i])? * &spheres[i];
            if intra.bit(0) {
                return defect(r, ProfileDefect::OddIntraSphereEdges);
            }
        }
        Ok(())
    }

    pub fn k_plus(&self, r: u64) -> Result<BigUint, Error> {
        match &self.shape {
            Shape::Tree { branching } => branching.count(r),
            Shape::Antitree { sphere } => sphere.count(r + 1),
            Shape::Custom { k_plus, .. } => k_plus.count(r),
        }
    }

    pub fn k_minus(&self, r: u64) -> Result<BigUint, Error> {
        match &self.shape {
            Shape::Tree { .. } if r == 0 => Ok(BigUint::zero()),
            Shape::Tree { .. } => Ok(BigUint::one()),
            Shape::Antitree { .. } if r == 0 => Ok(BigUint::zero()),
            Shape::Antitree { sphere } => sphere.count(r - 1),
            Shape::Custom { k_minus, .. } => k_minus.count(r),
        }
    }

    pub fn m_zero(&self, r: u64) -> Result<BigUint, Error> {
        match &self.intra {
            IntraSphere::Complete => {
                let s = self.sphere(r)?;
                self.m_zero_with_sphere(r, &s)
            }
            _ => self.m_zero_with_sphere(r, &BigUint::zero()),
        }
    }

    /// `m₀(r)` given `S(r)` (only the complete-sphere rule needs it).
    fn m_zero_with_sphere(&self, r: u64, sphere: &BigUint) -> Result<BigUint, Error> {
        match &self.intra {
            IntraSphere::None => Ok(BigUint::zero()),
            IntraSphere::Complete => Ok(sphere - BigUint::one()),
            IntraSphere::Regular(_) if r == 0 && !matches!(self.shape, Shape::Custom { .. }) => {
                Ok(BigUint::zero())
            }
            IntraSphere::Regular(d) => d.count(r),
        }
    }

    pub fn sphere(&self, r: u64) -> Result<BigUint, Error> {
        match &self.shape {
            Shape::Tree { branching } => {
                let mut s = BigUint::one();
                for i in 0..r {
                    s *= branching.count(i)?;
                }
                Ok(s)
            }
            Shape::Antitree { sphere } | Shape::Custom { sphere, .. } => sphere.count(r),
        }
    }

    /// `S(0..=radius)`.
    pub fn spheres(&self, radius: u64) -> Result<Vec<BigUint>, Error> {
        match &self.shape {
            Shape::Tree { branching } => {
                let mut out = Vec::with_capacity(radius as usize + 1);
                let mut s = BigUint::one();
                out.push(s.clone());
                for i in 0..radius {
                    s *= branching.count(i)?;
                    out.push(s.clone());
                }
                Ok(out)
            }
            Shape::Antitree { sphere } | Shape::Custom { sphere, .. } => sphere.counts(radius),
        }
    }

    /// `V(0..=radius)`, `V(r) = Σ_{i<=r} S(i)`.
    pub fn volumes(&self, radius: u64) -> Result<Vec<BigUint>, Error> {
        let mut acc = BigUint::zero();
        Ok(self
            .spheres(radius)?
            .into_iter()
            .map(|s| {
                acc += s;
                acc.clone()
            })
            .collect())
    }

    /// `V(r)`, the number of vertices within distance `r` of the root.
    pub fn volume(&self, r: u64) -> Result<BigUint, Error> {
        Ok(self.spheres(r)?.into_iter().sum())
    }

    pub fn outward_degrees(&self, radius: u64) -> Result<Vec<BigUint>, Error> {
        (0..=radius).map(|r| self.k_plus(r)).collect()
    }

    pub fn inward_degrees(&self, radius: u64) -> Result<Vec<BigUint>, Error> {
        (0..=radius).map(|r| self.k_minus(r)).collect()
    }

    /// `m₀(0..=radius)`. For complete spheres on a tree this forms `S(r)`.
    pub fn intra_degrees(&self, radius: u64) -> Result<Vec<BigUint>, Error> {
        match &self.intra {
            IntraSphere::Complete => Ok(self
                .spheres(radius)?
                .into_iter()
                .map(|s| s - BigUint::one())
                .collect()),
            _ => (0..=radius).map(|r| self.m_zero(r)).collect(),
        }
    }

    /// `S(r-1) / S(r) = k₋(r) / k₊(r-1)` for `r >= 1`, as an exact pair.
    pub fn sphere_ratio(&self, r: u64) -> Result<(BigUint, BigUint), Error> {
        debug_assert!(r >= 1);
        Ok((self.k_minus(r)?, self.k_plus(r - 1)?))
    }

    pub fn is_tree(&self) -> bool {
        matches!(&self.shape, Shape::Tree { .. })
    }

    /// Branching sequence when the profile is a tree (with or without
    /// same-sphere edges).
    pub fn branching(&self) -> Option<&SequenceSpec> {
        match &self.shape {
            Shape::Tree { branching } => Some(branching),
            _ => None,
        }
    }

    /// Asymptotic class of `k₊`.
    pub fn outward_growth(&self) -> Option<Growth> {
        match &self.shape {
            Shape::Tree { branching } => branching.growth(),
            Shape::Antitree { sphere } => sphere.growth(),
            Shape::Custom { k_plus, .. } => k_plus.growth(),
        }
    }

    /// Asymptotic class of `V(r) / S(r)`.
    pub fn volume_over_sphere_growth(&self) -> Option<Growth> {
        match &self.shape {
            Shape::Tree { branching } => match branching.growth()? {
                // k ≡ c: S = c^r, V/S → c/(c-1) for c >= 2, V/S = r+1 for c = 1.
                Growth::Order { base, power } if base == 1.0 && power == 0.0 => {
                    let c = branching_tail_constant(branching)?;
                    if c >= 2.0 {
                        Some(Growth::ONE)
                    } else if c == 1.0 {
                        Some(Growth::Order {
                            base: 1.0,
                            power: 1.0,
                        })
                    } else {
                        None
                    }
                }
                // Growing branching: V(r)/S(r) → 1.
                Growth::Order { base, power } if base > 1.0 || (base == 1.0 && power > 0.0) => {
                    Some(Growth::ONE)
                }
                _ => None,
            },
            Shape::Antitree { sphere } | Shape::Custom { sphere, .. } => {
                let s = sphere.growth()?;
                let v = s.partial_sums()?;
                v.div(s)
            }
        }
    }
}

/// The eventual value of a constant-class branching sequence.
fn branching_tail_constant(seq: &SequenceSpec) -> Option<f64> {
    match seq {
        SequenceSpec::Constant(c) => Some(*c),
        SequenceSpec::Polynomial { power, scale, .. } if *power == 0.0 => Some(*scale),
        SequenceSpec::Geometric { scale, ratio } if *ratio == 1.0 => Some(*scale),
        SequenceSpec::Table { tail, .. } => branching_tail_constant(tail),
        _ => None,
    }
}
