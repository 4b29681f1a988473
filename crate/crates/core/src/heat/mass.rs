//! Dirichlet heat mass `M_R(t) = (e^{-t Δ_R} 𝟙)(x₀)` and its limit in `R`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::family::GraphFamily;
use crate::profile::RadialProfile;

use super::operator::{build_radial_operator, family_operator, RadialOperator};
use super::{contour, stiff, uniformization};

/// Slack for the monotonicity checks, above solver noise.
const MONOTONE_SLACK: f64 = 1e-9;

/// The default time grid.
pub const DEFAULT_TIMES: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Uniformization,
    Stiff,
    Contour,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Uniformization => "uniformization",
            SolverKind::Stiff => "radau-pade",
            SolverKind::Contour => "contour",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    /// Uniformization while its cost stays under `auto_threshold`, else the
    /// contour integral.
    Auto,
    Uniformization,
    Stiff,
    Contour,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassOptions {
    pub solver: SolverChoice,
    /// Poisson tail mass dropped by uniformization.
    pub poisson_tail: f64,
    /// Local error per step of the stiff integrator.
    pub stiff_tolerance: f64,
    /// Maximal work (products times dimension) for uniformization.
    pub work_budget: u64,
    /// Maximal step attempts for the stiff integrator.
    pub max_steps: u64,
    /// `Auto` leaves uniformization above this work.
    pub auto_threshold: u64,
}

impl Default for MassOptions {
    fn default() -> Self {
        MassOptions {
            solver: SolverChoice::Auto,
            poisson_tail: 1e-12,
            stiff_tolerance: 1e-12,
            work_budget: 4_000_000_000,
            max_steps: 1_000_000,
            auto_threshold: 20_000_000,
        }
    }
}

/// `M_R(t)` on the time grid for one truncation radius.
#[derive(Clone, Debug, PartialEq)]
pub struct MassRow {
    pub radius: usize,
    pub mass: Vec<f64>,
    pub solver: SolverKind,
    /// Matrix-vector products (uniformization), step attempts (stiff) or
    /// shifted solves (contour).
    pub work: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassDiagnostics {
    /// Stopping tolerance of the doubling in `R`.
    pub doubling_tolerance: f64,
    pub poisson_tail: f64,
    pub stiff_tolerance: f64,
    /// True when `limit` comes from Aitken extrapolation of the last three rows.
    pub extrapolated: bool,
    /// The doubling stop rule is a heuristic: no rate in `R` is known.
    pub heuristic: bool,
    /// `0 <= M <= 1`, nonincreasing in `t` and nondecreasing in `R`.
    pub invariants_hold: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassCurve {
    pub times: Vec<f64>,
    pub rows: Vec<MassRow>,
    /// Estimate of `lim_R M_R(t)`.
    pub limit: Vec<f64>,
    /// `max` over the last two rows, per time; empty for a single row.
    pub differences: Vec<f64>,
    pub converged: bool,
    pub diagnostics: MassDiagnostics,
}

impl MassCurve {
    fn new(times: &[f64], opts: &MassOptions, doubling_tolerance: f64) -> Self {
        MassCurve {
            times: times.to_vec(),
            rows: Vec::new(),
            limit: Vec::new(),
            differences: Vec::new(),
            converged: false,
            diagnostics: MassDiagnostics {
                doubling_tolerance,
                poisson_tail: opts.poisson_tail,
                stiff_tolerance: opts.stiff_tolerance,
                extrapolated: false,
                heuristic: true,
                invariants_hold: true,
            },
        }
    }

    fn push(&mut self, row: MassRow) {
        let mut ok = row
            .mass
            .iter()
            .all(|&m| (-MONOTONE_SLACK..=1.0 + MONOTONE_SLACK).contains(&m));
        ok &= row.mass.windows(2).all(|p| p[1] <= p[0] + MONOTONE_SLACK);
        if let Some(prev) = self.rows.last() {
            ok &= prev
                .mass
                .iter()
                .zip(&row.mass)
                .all(|(a, b)| *b >= a - MONOTONE_SLACK);
            self.differences = prev
                .mass
                .iter()
                .zip(&row.mass)
                .map(|(a, b)| (b - a).abs())
                .collect();
        }
        self.diagnostics.invariants_hold &= ok;
        self.limit = row.mass.clone();
        self.rows.push(row);
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<(), Error> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidParameter(
            "times must be finite and nonnegative",
        ));
    }
    if times.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidParameter("times must be strictly increasing"));
    }
    Ok(())
}

/// `e^{-tL} v` (or with `Lᵀ`) at every time, by the chosen solver.
pub fn evolve(
    op: &RadialOperator,
    init: &[f64],
    times: &[f64],
    transpose: bool,
    opts: &MassOptions,
) -> Result<(Vec<Vec<f64>>, SolverKind, u64), Error> {
    check_times(times)?;
    if init.len() != op.dimension() {
        return Err(Error::InvalidParameter(
            "initial vector has the wrong length",
        ));
    }
    let t_max = times[times.len() - 1];
    let work =
        uniformization::terms_needed(op.max_rate(), t_max).saturating_mul(op.dimension() as u64);
    let kind = match opts.solver {
        SolverChoice::Uniformization => SolverKind::Uniformization,
        SolverChoice::Stiff => SolverKind::Stiff,
        SolverChoice::Contour => SolverKind::Contour,
        SolverChoice::Auto if work <= opts.auto_threshold => SolverKind::Uniformization,
        SolverChoice::Auto => SolverKind::Contour,
    };
    match kind {
        SolverKind::Uniformization => {
            let out = uniformization::propagate(
                op,
                init,
                times,
                transpose,
                opts.poisson_tail,
                opts.work_budget,
            )?;
            Ok((out.values, kind, out.products))
        }
        SolverKind::Stiff => {
            let out = stiff::integrate(
                op,
                init,
                times,
                transpose,
                opts.stiff_tolerance,
                opts.max_steps,
            )?;
            Ok((out.values, kind, out.steps))
        }
        SolverKind::Contour => {
            let out = contour::propagate(op, init, times, transpose)?;
            Ok((out.values, kind, out.solves))
        }
    }
}

/// Survival probabilities `u(t, r)` from every row: the solution of
/// `∂_t u = -L u`, `u(0) = 𝟙` on active states.
pub fn survival(
    op: &RadialOperator,
    times: &[f64],
    opts: &MassOptions,
) -> Result<(Vec<Vec<f64>>, SolverKind, u64), Error> {
    let mut init = vec![1.0; op.dimension()];
    if let Some(p) = op.pendant() {
        let n = op.radius();
        for r in 0..n {
            if p[r] == 0.0 {
                init[n + r] = 0.0;
            }
        }
    }
    evolve(op, &init, times, false, opts)
}

/// Mass of the walker started at the root on each row at each time:
/// `Σ_{x ∈ S_r} p_t(x₀, x)`, and for decorated trees the end states after
/// the main rows.
pub fn sphere_masses(
    op: &RadialOperator,
    times: &[f64],
    opts: &MassOptions,
) -> Result<Vec<Vec<f64>>, Error> {
    let mut init = vec![0.0; op.dimension()];
    init[0] = 1.0;
    Ok(evolve(op, &init, times, true, opts)?.0)
}

fn mass_row(op: &RadialOperator, times: &[f64], opts: &MassOptions) -> Result<MassRow, Error> {
    let (values, solver, work) = survival(op, times, opts)?;
    Ok(MassRow {
        radius: op.radius(),
        mass: values.iter().map(|u| u[0]).collect(),
        solver,
        work,
    })
}

/// `M_R(t)` for one radius.
pub fn dirichlet_mass(
    profile: &RadialProfile,
    radius: usize,
    times: &[f64],
    opts: &MassOptions,
) -> Result<MassCurve, Error> {
    let op = build_radial_operator(profile, radius)?;
    dirichlet_mass_operator(&op, times, opts)
}

/// `M_R(t)` for a prepared operator.
pub fn dirichlet_mass_operator(
    op: &RadialOperator,
    times: &[f64],
    opts: &MassOptions,
) -> Result<MassCurve, Error> {
    let mut curve = MassCurve::new(times, opts, f64::NAN);
    curve.push(mass_row(op, times, opts)?);
    curve.diagnostics.heuristic = false;
    Ok(curve)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoublingOptions {
    pub start_radius: usize,
    pub max_radius: usize,
    /// Stop once `max_t |M_{2R}(t) - M_R(t)|` is at most this.
    pub tolerance: f64,
}

impl Default for DoublingOptions {
    fn default() -> Self {
        DoublingOptions {
            start_radius: 8,
            max_radius: 1 << 20,
            tolerance: 1e-6,
        }
    }
}

/// Doubles `R` until successive masses agree or `max_radius` is reached.
///
/// `limit` is the last row, or an Aitken extrapolation of the last three
/// when their differences shrink geometrically.
pub fn mass_limit(
    family: &GraphFamily,
    times: &[f64],
    doubling: &DoublingOptions,
    opts: &MassOptions,
) -> Result<MassCurve, Error> {
    check_times(times)?;
    if doubling.start_radius < 1 || doubling.max_radius < doubling.start_radius {
        return Err(Error::InvalidParameter(
            "doubling radii must satisfy 1 <= start <= max",
        ));
    }
    let mut curve = MassCurve::new(times, opts, doubling.tolerance);
    let mut radius = doubling.start_radius;
    loop {
        let op = family_operator(family, radius)?;
        curve.push(mass_row(&op, times, opts)?);
        if curve.rows.len() >= 2 && curve.differences.iter().all(|d| *d <= doubling.tolerance) {
            curve.converged = true;
            break;
        }
        if radius >= doubling.max_radius {
            break;
        }
        radius = (radius * 2).min(doubling.max_radius);
    }
    if let [.., a, b, c] = curve.rows.as_slice() {
        let mut any = false;
        let limit = (0..times.len())
            .map(|k| match aitken(a.mass[k], b.mass[k], c.mass[k]) {
                Some(x) => {
                    any = true;
                    x
                }
                None => c.mass[k],
            })
            .collect();
        curve.limit = limit;
        curve.diagnostics.extrapolated = any;
    }
    Ok(curve)
}

/// Aitken's Δ² on an increasing sequence with shrinking steps, kept in `[m3, 1]`.
fn aitken(m1: f64, m2: f64, m3: f64) -> Option<f64> {
    let (d1, d2) = (m2 - m1, m3 - m2);
    if !(d1 > 0.0 && d2 > 0.0 && d2 < d1) {
        return None;
    }
    Some((m3 + d2 * d2 / (d1 - d2)).min(1.0))
}
