//! Dirichlet heat kernels on materialized balls, and the comparison of a
//! tree `T_k` with the same tree plus complete spheres `G_k`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::ball::{materialize_ball, FiniteBall};
use crate::error::Error;
use crate::family::GraphFamily;
use crate::profile::{IntraSphere, RadialProfile};
use crate::sequence::SequenceSpec;

use super::mass::check_times;
use super::uniformization::poisson_window;

/// Vertex cap for [`comparison_test`] unless overridden.
pub const DEFAULT_KERNEL_CAP: usize = 20_000;

/// `p_t(x₀, ·)` on every vertex of the ball, with the boundary sphere held
/// at zero. Computed by uniformization with Poisson tail `tail`.
pub fn dirichlet_kernel(
    ball: &FiniteBall,
    times: &[f64],
    tail: f64,
) -> Result<Vec<Vec<f64>>, Error> {
    check_times(times)?;
    let n = ball.vertex_count();
    let interior: Vec<bool> = (0..n).map(|v| !ball.is_boundary(v)).collect();
    let q = (0..n)
        .filter(|&v| interior[v])
        .map(|v| ball.degree(v) as f64)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let windows: Vec<(usize, Vec<f64>)> =
        times.iter().map(|&t| poisson_window(q * t, tail)).collect();
    let stop = windows.iter().map(|(s, w)| s + w.len()).max().unwrap_or(1);

    let mut out = vec![vec![0.0; n]; times.len()];
    let mut p = vec![0.0; n];
    p[0] = if interior[0] { 1.0 } else { 0.0 };
    let mut next = vec![0.0; n];
    for step in 0..stop {
        for (k, (start, w)) in windows.iter().enumerate() {
            if step >= *start && step < start + w.len() {
                let weight = w[step - start];
                for (acc, x) in out[k].iter_mut().zip(&p) {
                    *acc += weight * x;
                }
            }
        }
        // p ← (I - Δ_D / q) p; Δ_D is symmetric so no transpose is needed.
        for v in 0..n {
            if !interior[v] {
                next[v] = 0.0;
                continue;
            }
            let mut lap = ball.degree(v) as f64 * p[v];
            for &u in ball.neighbors(v) {
                if interior[u] {
                    lap -= p[u];
                }
            }
            next[v] = (p[v] - lap / q).max(0.0);
        }
        core::mem::swap(&mut p, &mut next);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereKernel {
    pub radius: u32,
    /// Range of `p_t(x₀, x)` over `x ∈ S_r` on the tree.
    pub tree: (f64, f64),
    /// The same on the tree with complete spheres.
    pub complete: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelComparison {
    pub radius: u32,
    pub t: f64,
    pub tree_vertices: usize,
    pub complete_vertices: usize,
    pub spheres: Vec<SphereKernel>,
    /// Largest spread of `p_t(x₀, ·)` within one sphere, over both graphs.
    pub max_sphere_spread: f64,
    /// Largest `|p^{G_k} - p^{T_k}|` over matching vertices.
    pub max_cross_difference: f64,
}

/// Heat kernels from the root of `T_k` and `G_k` (complete spheres added)
/// on balls of radius `radius`. The kernels agree vertex for vertex: a
/// radial initial datum stays radial and same-sphere edges never act on it.
pub fn comparison_test(
    branching: &SequenceSpec,
    radius: u32,
    t: f64,
    cap: usize,
) -> Result<KernelComparison, Error> {
    let profile = RadialProfile::tree(branching.clone())?;
    let volume = profile.volume(u64::from(radius))?;
    let vertices = volume.to_u64().unwrap_or(u64::MAX);
    if vertices > cap as u64 {
        return Err(Error::CapExceeded { vertices, cap });
    }
    let tree = materialize_ball(
        &GraphFamily::SymmetricTree {
            branching: branching.clone(),
        },
        radius,
    )?;
    let complete = materialize_ball(
        &GraphFamily::IntraSphereTree {
            branching: branching.clone(),
            intra: IntraSphere::Complete,
        },
        radius,
    )?;
    let tail = 1e-15;
    let pt = dirichlet_kernel(&tree, &[t], tail)?.remove(0);
    let pc = dirichlet_kernel(&complete, &[t], tail)?.remove(0);

    let range = |ball: &FiniteBall, p: &[f64], r: u32| {
        ball.sphere(r)
            .map(|v| p[v])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            })
    };
    let mut spheres = Vec::with_capacity(radius as usize + 1);
    let (mut spread, mut cross) = (0.0f64, 0.0f64);
    for r in 0..=radius {
        let a = range(&tree, &pt, r);
        let b = range(&complete, &pc, r);
        spread = spread.max(a.1 - a.0).max(b.1 - b.0);
        spheres.push(SphereKernel {
            radius: r,
            tree: a,
            complete: b,
        });
    }
    // Both balls list sphere vertices in the same order.
    for (x, y) in pt.iter().zip(&pc) {
        cross = cross.max((x - y).abs());
    }
    Ok(KernelComparison {
        radius,
        t,
        tree_vertices: tree.vertex_count(),
        complete_vertices: complete.vertex_count(),
        spheres,
        max_sphere_spread: spread,
        max_cross_difference: cross,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::mass::{sphere_masses, MassOptions};
    use crate::heat::operator::{build_decorated_operator, family_operator};
    use nalgebra::{DMatrix, DVector};

    fn dense_kernel(ball: &FiniteBall, t: f64) -> DVector<f64> {
        let n = ball.vertex_count();
        let mut l = DMatrix::zeros(n, n);
        for v in 0..n {
            if ball.is_boundary(v) {
                continue;
            }
            l[(v, v)] = ball.degree(v) as f64;
            for &u in ball.neighbors(v) {
                if !ball.is_boundary(u) {
                    l[(v, u)] = -1.0;
                }
            }
        }
        let mut e = DVector::zeros(n);
        e[0] = 1.0;
        (-(l * t)).exp() * e
    }

    #[test]
    fn kernel_matches_dense_exponential() {
        let fam = GraphFamily::IntraSphereTree {
            branching: SequenceSpec::poly_shifted(1.0, 2.0),
            intra: IntraSphere::Complete,
        };
        let ball = materialize_ball(&fam, 3).unwrap();
        let got = dirichlet_kernel(&ball, &[0.5, 1.0], 1e-15).unwrap();
        for (k, t) in [0.5, 1.0].into_iter().enumerate() {
            let want = dense_kernel(&ball, t);
            for v in 0..ball.vertex_count() {
                assert!((got[k][v] - want[v]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn binary_tree_comparison() {
        let c = comparison_test(&SequenceSpec::constant(2.0), 4, 0.5, DEFAULT_KERNEL_CAP).unwrap();
        assert_eq!(c.tree_vertices, 31);
        assert!(c.max_sphere_spread <= 1e-12);
        assert!(c.max_cross_difference <= 1e-12);
    }

    #[test]
    fn time_zero_is_the_indicator() {
        let c = comparison_test(
            &SequenceSpec::poly_shifted(1.0, 2.0),
            3,
            0.0,
            DEFAULT_KERNEL_CAP,
        )
        .unwrap();
        assert_eq!(c.spheres[0].tree, (1.0, 1.0));
        assert_eq!(c.spheres[1].complete, (0.0, 0.0));
    }

    #[test]
    fn cap_is_enforced() {
        let err = comparison_test(&SequenceSpec::poly(2.0), 6, 1.0, 1000).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 1000, .. }));
    }

    #[test]
    fn radial_masses_match_full_ball() {
        let times = [0.5, 1.0];
        for fam in [
            GraphFamily::Antitree {
                sphere: SequenceSpec::poly(2.0),
            },
            GraphFamily::IntraSphereTree {
                branching: SequenceSpec::poly_shifted(1.0, 2.0),
                intra: IntraSphere::Complete,
            },
        ] {
            let ball = materialize_ball(&fam, 4).unwrap();
            let full = dirichlet_kernel(&ball, &times, 1e-15).unwrap();
            let op = family_operator(&fam, 4).unwrap();
            let radial = sphere_masses(&op, &times, &MassOptions::default()).unwrap();
            for k in 0..2 {
                for r in 0..4u32 {
                    let sum: f64 = ball.sphere(r).map(|v| full[k][v]).sum();
                    assert!((sum - radial[k][r as usize]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn decorated_masses_match_full_ball() {
        let (k, kt) = (SequenceSpec::poly(2.0), SequenceSpec::poly(1.0));
        let fam = GraphFamily::DecoratedTree {
            branching: k.clone(),
            decorations: kt.clone(),
        };
        let ball = materialize_ball(&fam, 4).unwrap();
        let full = dirichlet_kernel(&ball, &[0.7], 1e-15).unwrap().remove(0);
        let op = build_decorated_operator(&k, &kt, 4).unwrap();
        let radial = sphere_masses(&op, &[0.7], &MassOptions::default())
            .unwrap()
            .remove(0);
        for r in 0..4u32 {
            let (mut core, mut ends) = (0.0, 0.0);
            for v in ball.sphere(r) {
                match ball.vertices()[v].kind {
                    crate::ball::VertexKind::Core => core += full[v],
                    crate::ball::VertexKind::End => ends += full[v],
                }
            }
            assert!((core - radial[r as usize]).abs() < 1e-10, "core r={r}");
            if r >= 1 {
                // ends hung on S_{r-1} sit on S_r
                assert!(
                    (ends - radial[4 + r as usize - 1]).abs() < 1e-10,
                    "ends r={r}"
                );
            }
        }
    }
}
