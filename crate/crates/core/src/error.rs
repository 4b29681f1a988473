use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::harmonic::RadialSolution;

/// Which profile invariant failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileDefect {
    /// `S(0) != 1`.
    OriginSphere,
    /// `k₋(0) != 0` or `m₀(0) != 0`.
    OriginDegrees,
    /// `k₊(r) = 0`: the graph would be finite.
    NoOutwardEdge,
    /// `k₊(r) S(r) != k₋(r+1) S(r+1)`.
    EdgeCount,
    /// `m₀(r) S(r)` is odd.
    OddIntraSphereEdges,
}

impl fmt::Display for ProfileDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileDefect::OriginSphere => "S(0) must be 1",
            ProfileDefect::OriginDegrees => "k-(0) and m0(0) must vanish",
            ProfileDefect::NoOutwardEdge => "k+(r) must be at least 1",
            ProfileDefect::EdgeCount => "k+(r) S(r) != k-(r+1) S(r+1)",
            ProfileDefect::OddIntraSphereEdges => "m0(r) S(r) is odd",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sequence{}: {what}", radius.map(|r| alloc::format!(" at r = {r}")).unwrap_or_default())]
    InvalidSequence {
        radius: Option<u64>,
        what: &'static str,
    },

    #[error("{family} does not lower to a radial profile")]
    UnsupportedLowering { family: &'static str },

    #[error("inconsistent profile at r = {radius}: {defect}")]
    InconsistentProfile { radius: u64, defect: ProfileDefect },

    #[error("profile not realizable as a simple graph at r = {radius}: {what}")]
    Unrealizable { radius: u64, what: &'static str },

    /// The radial solution left the representable range; `prefix` holds the
    /// finite part, which is itself evidence of unboundedness.
    #[error("radial solution overflowed at r = {radius}")]
    DivergedAt {
        radius: usize,
        prefix: Box<RadialSolution>,
    },

    /// The solver would need more work than allowed. `partial` holds the
    /// `(t, mass)` pairs finished before giving up.
    #[error("solver budget exceeded: needs {required} units, budget is {budget}")]
    SolverBudgetExceeded {
        required: u64,
        budget: u64,
        partial: Vec<(f64, f64)>,
    },

    #[error("{solver} solver produced non-finite values")]
    SolverBreakdown { solver: &'static str },

    #[error("ball has {vertices} vertices, cap is {cap}")]
    CapExceeded { vertices: u64, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
