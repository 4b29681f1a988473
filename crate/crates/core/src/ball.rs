//! Explicit finite balls of radial graph families.

use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::Error;
use crate::family::GraphFamily;
use crate::profile::RadialProfile;
use crate::sequence::SequenceSpec;

/// Hard limit on materialized balls.
pub const MAX_BALL_VERTICES: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// A vertex of the underlying radial graph.
    Core,
    /// A valence-one decoration.
    End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallVertex {
    pub radius: u32,
    /// Position within its sphere; core vertices come first.
    pub index: usize,
    pub kind: VertexKind,
}

/// The ball `{x : r(x) <= R}` as an explicit simple graph. Vertices are
/// numbered lexicographically by `(radius, index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBall {
    radius: u32,
    vertices: Vec<BallVertex>,
    sphere_start: Vec<usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl FiniteBall {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[BallVertex] {
        &self.vertices
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Degree within the ball. Equals the valence `m(x)` for `r(x) < R`.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Vertex ids of the sphere `S_r`.
    pub fn sphere(&self, r: u32) -> Range<usize> {
        let r = r as usize;
        self.sphere_start[r]..self.sphere_start[r + 1]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.vertices[v].radius == self.radius
    }

    /// `(m₊, m₋, m₀)` counted inside the ball.
    pub fn split_degree(&self, v: usize) -> (usize, usize, usize) {
        let r = self.vertices[v].radius;
        self.adjacency[v].iter().fold((0, 0, 0), |(p, m, z), &u| {
            let ru = self.vertices[u].radius;
            if ru > r {
                (p + 1, m, z)
            } else if ru < r {
                (p, m + 1, z)
            } else {
                (p, m, z + 1)
            }
        })
    }
}

fn small(n: &BigUint, radius: u64, what: &'static str) -> Result<usize, Error> {
    n.to_usize()
        .filter(|&v| v <= MAX_BALL_VERTICES)
        .ok_or(Error::Unrealizable { radius, what })
}

struct Builder {
    vertices: Vec<BallVertex>,
    sphere_start: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn add(&mut self, a: usize, b: usize) {
        self.edges.push(if a < b { (a, b) } else { (b, a) });
    }

    /// Joins `n_in` inner vertices to `n_out` outer ones so that each inner
    /// vertex has `out_deg` outer neighbors, by dealing the inner stubs
    /// cyclically over the outer sphere.
    fn biregular(&mut self, inner: usize, n_in: usize, outer: usize, n_out: usize, out_deg: usize) {
        for i in 0..n_in {
            for j in 0..out_deg {
                let stub = i * out_deg + j;
                self.add(inner + i, outer + stub % n_out);
            }
        }
    }

    /// A `d`-regular circulant graph on `n` vertices starting at `first`.
    fn circulant(&mut self, first: usize, n: usize, d: usize) {
        for i in 0..n {
            for off in 1..=d / 2 {
                let j = (i + off) % n;
                self.add(first + i, first + j);
            }
            if d % 2 == 1 && i < n / 2 {
                self.add(first + i, first + i + n / 2);
            }
        }
    }

    fn finish(mut self, radius: u32) -> FiniteBall {
        self.edges.sort_unstable();
        self.edges.dedup();
        let mut adjacency = alloc::vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        FiniteBall {
            radius,
            vertices: self.vertices,
            sphere_start: self.sphere_start,
            edges: self.edges,
            adjacency,
        }
    }
}

/// Materializes the ball of radius `radius` about the root.
///
/// End vertices of a decorated tree hung on `S_r` sit at radius `r + 1` and
/// are listed after the core vertices of that sphere.
pub fn materialize_ball(family: &GraphFamily, radius: u32) -> Result<FiniteBall, Error> {
    let (profile, decorations) = match family {
        GraphFamily::DecoratedTree {
            branching,
            decorations,
        } => (RadialProfile::tree(branching.clone())?, Some(decorations)),
        GraphFamily::WeightedPath { .. } => {
            return Err(Error::UnsupportedLowering {
                family: family.name(),
            })
        }
        _ => (family.lower_to_profile()?, None),
    };
    let r_max = u64::from(radius);

    let cores = profile
        .spheres(r_max)?
        .iter()
        .enumerate()
        .map(|(r, s)| small(s, r as u64, "sphere too large to materialize"))
        .collect::<Result<Vec<_>, _>>()?;
    let decor = match decorations {
        Some(seq) => decoration_counts(seq, r_max)?,
        None => alloc::vec![0; cores.len()],
    };

    let mut sizes = Vec::with_capacity(cores.len());
    let mut total = 0usize;
    for r in 0..cores.len() {
        let ends = if r == 0 {
            0
        } else {
            decor[r - 1] * cores[r - 1]
        };
        let size = cores[r] + ends;
        total = total.saturating_add(size);
        if total > MAX_BALL_VERTICES {
            return Err(Error::CapExceeded {
                vertices: total as u64,
                cap: MAX_BALL_VERTICES,
            });
        }
        sizes.push(size);
    }

    let mut b = Builder {
        vertices: Vec::with_capacity(total),
        sphere_start: Vec::with_capacity(sizes.len() + 1),
        edges: Vec::new(),
    };
    for (r, &size) in sizes.iter().enumerate() {
        b.sphere_start.push(b.vertices.len());
        for index in 0..size {
            let kind = if index < cores[r] {
                VertexKind::Core
            } else {
                VertexKind::End
            };
            b.vertices.push(BallVertex {
                radius: r as u32,
                index,
                kind,
            });
        }
    }
    b.sphere_start.push(b.vertices.len());

    for r in 0..cores.len() {
        let rr = r as u64;
        if r + 1 < cores.len() {
            let out_deg = small(&profile.k_plus(rr)?, rr, "outward degree too large")?;
            if out_deg > cores[r + 1] {
                return Err(Error::Unrealizable {
                    radius: rr,
                    what: "outward degree exceeds the next sphere",
                });
            }
            b.biregular(
                b.sphere_start[r],
                cores[r],
                b.sphere_start[r + 1],
                cores[r + 1],
                out_deg,
            );

            let first_end = b.sphere_start[r + 1] + cores[r + 1];
            for j in 0..cores[r] {
                for c in 0..decor[r] {
                    b.add(b.sphere_start[r] + j, first_end + j * decor[r] + c);
                }
            }
        }

        let same = small(&profile.m_zero(rr)?, rr, "same-sphere degree too large")?;
        if same > 0 {
            if same >= cores[r] {
                return Err(Error::Unrealizable {
                    radius: rr,
                    what: "same-sphere degree must be below the sphere size",
                });
            }
            if (same * cores[r]) % 2 == 1 {
                return Err(Error::Unrealizable {
                    radius: rr,
                    what: "odd number of same-sphere edge ends",
                });
            }
            b.circulant(b.sphere_start[r], cores[r], same);
        }
    }

    Ok(b.finish(radius))
}

fn decoration_counts(seq: &SequenceSpec, radius: u64) -> Result<Vec<usize>, Error> {
    (0..=radius)
        .map(|r| small(&seq.count(r)?, r, "decoration count too large"))
        .collect()
}
