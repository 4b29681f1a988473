//! The Dirichlet Laplacian of a ball, reduced to radial functions.

use alloc::vec::Vec;

use crate::dd::Dd;
use crate::error::Error;
use crate::family::GraphFamily;
use crate::profile::RadialProfile;
use crate::sequence::SequenceSpec;

/// `L u(r) = diag(r) u(r) - out(r) u(r+1) - in(r) u(r-1)` on rows
/// `0..R`, with `u(R) = 0` pinned.
///
/// A decorated tree adds one end state per row: `L u(e_r) = u(e_r) - u(r)`,
/// and row `r` gains `k̃(r) (u(r) - u(e_r))`. End vertices hung on `S_{R-1}`
/// lie on the boundary sphere, so row `R-1` loses `k₊(R-1) + k̃(R-1)` and its
/// end state is decoupled.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialOperator {
    diag: Vec<f64>,
    outward: Vec<f64>,
    inward: Vec<f64>,
    pendant: Option<Vec<f64>>,
}

impl RadialOperator {
    /// Assembles an operator from its coefficients; `inward[0]` must be 0.
    pub fn from_parts(
        outward: Vec<f64>,
        inward: Vec<f64>,
        pendant: Option<Vec<f64>>,
    ) -> Result<Self, Error> {
        let n = outward.len();
        if n == 0 || inward.len() != n || pendant.as_ref().is_some_and(|p| p.len() != n) {
            return Err(Error::InvalidParameter(
                "operator coefficient lengths differ",
            ));
        }
        let ok = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        if !ok(&outward) || !ok(&inward) || !pendant.as_deref().is_none_or(ok) || inward[0] != 0.0 {
            return Err(Error::InvalidParameter(
                "operator coefficients must be finite and nonnegative",
            ));
        }
        let diag = (0..n)
            .map(|r| outward[r] + inward[r] + pendant.as_ref().map_or(0.0, |p| p[r]))
            .collect();
        Ok(RadialOperator {
            diag,
            outward,
            inward,
            pendant,
        })
    }

    /// The truncation radius `R`: rows `0..R` are active.
    pub fn radius(&self) -> usize {
        self.diag.len()
    }

    /// Number of unknowns, counting end states.
    pub fn dimension(&self) -> usize {
        self.diag.len() * if self.pendant.is_some() { 2 } else { 1 }
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn outward(&self) -> &[f64] {
        &self.outward
    }

    pub fn inward(&self) -> &[f64] {
        &self.inward
    }

    pub fn pendant(&self) -> Option<&[f64]> {
        self.pendant.as_deref()
    }

    /// Row sums of `L`: zero except on the last row, where mass leaks
    /// through the boundary.
    pub fn row_deficits(&self) -> Vec<f64> {
        (0..self.radius())
            .map(|r| {
                let right = if r + 1 < self.radius() {
                    self.outward[r]
                } else {
                    0.0
                };
                let left = if r > 0 { self.inward[r] } else { 0.0 };
                let p = self.pendant_coupling(r, false).map_or(0.0, |(a, _)| a);
                self.diag[r] - right - left - p
            })
            .collect()
    }

    /// Largest diagonal entry, end states included.
    pub fn max_rate(&self) -> f64 {
        let m = self.diag.iter().copied().fold(0.0, f64::max);
        if self.pendant.is_some() {
            m.max(1.0)
        } else {
            m
        }
    }

    /// `out = L u` (or `Lᵀ u`). End states, if any, follow the main rows.
    pub fn apply(&self, u: &[f64], out: &mut [f64], transpose: bool) {
        let n = self.radius();
        for r in 0..n {
            let mut acc = self.diag[r] * u[r];
            if r + 1 < n {
                acc -= if transpose {
                    self.inward[r + 1]
                } else {
                    self.outward[r]
                } * u[r + 1];
            }
            if r > 0 {
                acc -= if transpose {
                    self.outward[r - 1]
                } else {
                    self.inward[r]
                } * u[r - 1];
            }
            out[r] = acc;
        }
        if self.pendant.is_some() {
            for r in 0..n {
                let (to_end, from_end) = self.pendant_coupling(r, transpose).unwrap_or((0.0, 0.0));
                out[r] -= to_end * u[n + r];
                out[n + r] = u[n + r] - from_end * u[r];
            }
        }
    }

    /// The pendant coupling as `(a, b)`: `L(r, e_r) = -a`, `L(e_r, r) = -b`.
    /// Rows without end vertices have `(0, 0)`.
    pub(crate) fn pendant_coupling(&self, r: usize, transpose: bool) -> Option<(f64, f64)> {
        self.pendant.as_ref().map(|p| match p[r] {
            k if k == 0.0 => (0.0, 0.0),
            k if transpose => (1.0, k),
            k => (k, 1.0),
        })
    }

    /// Off-diagonal couplings of row `r` as `(to r-1, to r+1)`.
    pub(crate) fn couplings(&self, r: usize, transpose: bool) -> (f64, f64) {
        let n = self.radius();
        let left = if r == 0 {
            0.0
        } else if transpose {
            self.outward[r - 1]
        } else {
            self.inward[r]
        };
        let right = if r + 1 >= n {
            0.0
        } else if transpose {
            self.inward[r + 1]
        } else {
            self.outward[r]
        };
        (left, right)
    }
}

fn to_f64(n: &num_bigint::BigUint) -> f64 {
    Dd::from_biguint(n).to_f64()
}

/// Radial chain of the ball of radius `radius`.
pub fn build_radial_operator(
    profile: &RadialProfile,
    radius: usize,
) -> Result<RadialOperator, Error> {
    if radius < 1 {
        return Err(Error::InvalidParameter("radius must be at least 1"));
    }
    let mut outward = Vec::with_capacity(radius);
    let mut inward = Vec::with_capacity(radius);
    for r in 0..radius as u64 {
        outward.push(to_f64(&profile.k_plus(r)?));
        inward.push(to_f64(&profile.k_minus(r)?));
    }
    RadialOperator::from_parts(outward, inward, None)
}

/// Two-band chain of a decorated tree: tree rows plus one end state per row.
pub fn build_decorated_operator(
    branching: &SequenceSpec,
    decorations: &SequenceSpec,
    radius: usize,
) -> Result<RadialOperator, Error> {
    let mut op = build_radial_operator(&RadialProfile::tree(branching.clone())?, radius)?;
    let mut pendant = decorations
        .counts(radius as u64 - 1)?
        .iter()
        .map(to_f64)
        .collect::<Vec<_>>();
    for (d, p) in op.diag.iter_mut().zip(&pendant) {
        *d += p;
    }
    // the last row's end vertices are boundary vertices
    pendant[radius - 1] = 0.0;
    op.pendant = Some(pendant);
    Ok(op)
}

/// Weighted half-line: `out(r) = a(r)`, `in(r) = a(r-1)`.
pub fn build_path_operator(weights: &SequenceSpec, radius: usize) -> Result<RadialOperator, Error> {
    if radius < 1 {
        return Err(Error::InvalidParameter("radius must be at least 1"));
    }
    weights.validate()?;
    let outward: Vec<f64> = (0..radius as u64).map(|r| weights.value(r)).collect();
    if let Some(r) = outward.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::InvalidSequence {
            radius: Some(r as u64),
            what: "edge weights must be finite and positive",
        });
    }
    let mut inward = Vec::with_capacity(radius);
    inward.push(0.0);
    inward.extend_from_slice(&outward[..radius - 1]);
    RadialOperator::from_parts(outward, inward, None)
}

/// The radial chain of any family.
pub fn family_operator(family: &GraphFamily, radius: usize) -> Result<RadialOperator, Error> {
    match family {
        GraphFamily::DecoratedTree {
            branching,
            decorations,
        } => build_decorated_operator(branching, decorations, radius),
        GraphFamily::WeightedPath { weights } => build_path_operator(weights, radius),
        _ => build_radial_operator(&family.lower_to_profile()?, radius),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::materialize_ball;
    use alloc::vec;

    #[test]
    fn binary_tree_rows() {
        let p = RadialProfile::tree(SequenceSpec::constant(2.0)).unwrap();
        let op = build_radial_operator(&p, 3).unwrap();
        assert_eq!(op.diagonal(), &[2.0, 3.0, 3.0]);
        assert_eq!(&op.outward()[..2], &[2.0, 2.0]);
        assert_eq!(&op.inward()[1..], &[1.0, 1.0]);
        assert_eq!(op.row_deficits(), vec![0.0, 0.0, 2.0]);
    }

    #[test]
    fn quadratic_antitree_rows_match_ball_degrees() {
        let fam = GraphFamily::Antitree {
            sphere: SequenceSpec::poly(2.0),
        };
        let op = family_operator(&fam, 3).unwrap();
        assert_eq!(op.diagonal(), &[4.0, 10.0, 20.0]);
        let ball = materialize_ball(&fam, 3).unwrap();
        for r in 0..3u32 {
            for v in ball.sphere(r) {
                assert_eq!(ball.degree(v) as f64, op.diagonal()[r as usize]);
            }
        }
    }

    #[test]
    fn deficit_is_last_outward_degree() {
        let p = RadialProfile::antitree(SequenceSpec::poly(3.0)).unwrap();
        let op = build_radial_operator(&p, 7).unwrap();
        let d = op.row_deficits();
        assert!(d[..6].iter().all(|&x| x == 0.0));
        assert_eq!(d[6], 512.0);
    }

    #[test]
    fn radial_action_is_the_laplacian() {
        let p = RadialProfile::tree(SequenceSpec::poly(1.0)).unwrap();
        let op = build_radial_operator(&p, 4).unwrap();
        let u = [1.0, 3.0, 2.0, 5.0];
        let mut out = [0.0; 4];
        op.apply(&u, &mut out, false);
        // k₊ = r+1, k₋ = 1, u(4) = 0
        assert_eq!(
            out,
            [
                1.0 * (1.0 - 3.0),
                2.0 * (3.0 - 2.0) + (3.0 - 1.0),
                3.0 * (2.0 - 5.0) + (2.0 - 3.0),
                4.0 * 5.0 + (5.0 - 2.0)
            ]
        );
    }

    #[test]
    fn transpose_is_adjoint() {
        let op = build_decorated_operator(&SequenceSpec::poly(2.0), &SequenceSpec::poly(1.0), 5)
            .unwrap();
        let n = op.dimension();
        let u: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let (mut lu, mut ltv) = (vec![0.0; n], vec![0.0; n]);
        op.apply(&u, &mut lu, false);
        op.apply(&v, &mut ltv, true);
        let a: f64 = lu.iter().zip(&v).map(|(x, y)| x * y).sum();
        let b: f64 = u.iter().zip(&ltv).map(|(x, y)| x * y).sum();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn decorated_rows_conserve_except_boundary() {
        let op = build_decorated_operator(&SequenceSpec::poly(2.0), &SequenceSpec::poly(1.0), 4)
            .unwrap();
        let d = op.row_deficits();
        assert_eq!(&d[..3], &[0.0, 0.0, 0.0]);
        assert_eq!(d[3], 16.0 + 4.0);
        assert_eq!(op.diagonal()[0], 1.0 + 1.0);
        assert_eq!(op.diagonal()[2], 9.0 + 1.0 + 3.0);
    }

    #[test]
    fn path_rows() {
        let op = build_path_operator(&SequenceSpec::poly(1.0), 3).unwrap();
        assert_eq!(op.diagonal(), &[1.0, 3.0, 5.0]);
    }
}
