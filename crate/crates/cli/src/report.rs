//! Serializable views of the core results.

use serde::Serialize;
use stocomp_core::harmonic::{Boundedness, Evidence, SeriesAssessment, SeriesBehavior, Verdict};
use stocomp_core::heat::{KernelComparison, MassCurve, VolumeRatioSeries};
use stocomp_core::sim::SurvivalEstimate;

use crate::catalog::status_name;

fn behavior_name(b: SeriesBehavior) -> &'static str {
    match b {
        SeriesBehavior::Convergent => "convergent",
        SeriesBehavior::Divergent => "divergent",
        SeriesBehavior::Undecided => "undecided",
    }
}

#[derive(Serialize)]
pub struct EvidenceReport {
    pub criterion: &'static str,
    pub behavior: &'static str,
    pub exact: bool,
    pub implies: Option<&'static str>,
    pub partial_sums: Vec<(u64, f64)>,
    pub tail_estimate: Option<f64>,
    pub r_max: u64,
}

impl From<&Evidence> for EvidenceReport {
    fn from(e: &Evidence) -> Self {
        EvidenceReport {
            criterion: e.criterion.name(),
            behavior: behavior_name(e.behavior),
            exact: e.exact,
            implies: e.implies.map(status_name),
            partial_sums: e.partial_sums.clone(),
            tail_estimate: e.tail_estimate,
            r_max: e.r_max,
        }
    }
}

#[derive(Serialize)]
pub struct VerdictReport {
    pub family: &'static str,
    pub status: &'static str,
    pub test: &'static str,
    pub exact: bool,
    pub evidence: Vec<EvidenceReport>,
}

impl VerdictReport {
    pub fn new(family: &'static str, v: &Verdict) -> Self {
        VerdictReport {
            family,
            status: status_name(v.status),
            test: v.test.name(),
            exact: v.exact,
            evidence: v.evidence.iter().map(EvidenceReport::from).collect(),
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BoundednessReport {
    Bounded { sup_estimate: f64 },
    Unbounded { rate_estimate: f64 },
    Undetermined,
}

impl From<Boundedness> for BoundednessReport {
    fn from(b: Boundedness) -> Self {
        match b {
            Boundedness::Bounded { sup_estimate } => BoundednessReport::Bounded { sup_estimate },
            Boundedness::Unbounded { rate_estimate } => {
                BoundednessReport::Unbounded { rate_estimate }
            }
            Boundedness::Undetermined => BoundednessReport::Undetermined,
        }
    }
}

#[derive(Serialize)]
pub struct SolutionReport {
    pub family: &'static str,
    pub kind: &'static str,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub radius: usize,
    /// Radius at which `w` left the representable range, if it did.
    pub diverged_at: Option<usize>,
    pub w: Vec<f64>,
    pub increments: Vec<f64>,
    pub boundedness: BoundednessReport,
}

#[derive(Serialize)]
pub struct MassRowReport {
    #[serde(rename = "R")]
    pub radius: usize,
    pub mass: Vec<f64>,
    pub solver: &'static str,
    pub work: u64,
}

#[derive(Serialize)]
pub struct MassDiagnosticsReport {
    pub doubling_tolerance: Option<f64>,
    pub poisson_tail: f64,
    pub stiff_tolerance: f64,
    pub extrapolated: bool,
    pub heuristic: bool,
    pub invariants_hold: bool,
    pub converged: bool,
    pub last_differences: Vec<f64>,
}

#[derive(Serialize)]
pub struct MassReport {
    pub family: &'static str,
    pub times: Vec<f64>,
    pub rows: Vec<MassRowReport>,
    pub limit: Vec<f64>,
    pub deficit: Vec<f64>,
    pub diagnostics: MassDiagnosticsReport,
}

impl MassReport {
    pub fn new(family: &'static str, c: &MassCurve) -> Self {
        let d = &c.diagnostics;
        MassReport {
            family,
            times: c.times.clone(),
            rows: c
                .rows
                .iter()
                .map(|r| MassRowReport {
                    radius: r.radius,
                    mass: r.mass.clone(),
                    solver: r.solver.name(),
                    work: r.work,
                })
                .collect(),
            limit: c.limit.clone(),
            deficit: c.limit.iter().map(|m| 1.0 - m).collect(),
            diagnostics: MassDiagnosticsReport {
                doubling_tolerance: d
                    .doubling_tolerance
                    .is_finite()
                    .then_some(d.doubling_tolerance),
                poisson_tail: d.poisson_tail,
                stiff_tolerance: d.stiff_tolerance,
                extrapolated: d.extrapolated,
                heuristic: d.heuristic,
                invariants_hold: d.invariants_hold,
                converged: c.converged,
                last_differences: c.differences.clone(),
            },
        }
    }
}

/// `# stocomp mass-curve v1` followed by `R,t,mass` rows.
pub fn mass_csv(c: &MassCurve) -> String {
    let mut out = String::from("# stocomp mass-curve v1\nR,t,mass\n");
    for row in &c.rows {
        for (t, m) in c.times.iter().zip(&row.mass) {
            out.push_str(&format!("{},{},{}\n", row.radius, t, m));
        }
    }
    out
}

#[derive(Serialize)]
pub struct EstimateReport {
    pub horizon: f64,
    pub paths: u64,
    pub survivors: u64,
    pub escapes: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub interval: (f64, f64),
    pub truncation_radius: usize,
    pub escape_policy: &'static str,
    /// `M_R(t)` at the same truncation radius, when requested.
    pub dirichlet_mass: Option<f64>,
    /// `(estimate - M_R(t)) / sqrt(M_R(t)(1 - M_R(t))/N)`.
    pub z_score: Option<f64>,
}

impl EstimateReport {
    pub fn new(e: &SurvivalEstimate, mass: Option<f64>) -> Self {
        let z_score = mass.and_then(|m| {
            let sigma = (m * (1.0 - m) / e.paths as f64).sqrt();
            (sigma > 0.0).then(|| (e.estimate - m) / sigma)
        });
        EstimateReport {
            horizon: e.horizon,
            paths: e.paths,
            survivors: e.survivors,
            escapes: e.escapes,
            estimate: e.estimate,
            std_error: e.std_error,
            interval: e.interval,
            truncation_radius: e.truncation_radius,
            escape_policy: e.escape_policy,
            dirichlet_mass: mass,
            z_score,
        }
    }
}

#[derive(Serialize)]
pub struct SimulationReport {
    pub family: &'static str,
    pub generator: &'static str,
    pub seed_base: u64,
    pub estimates: Vec<EstimateReport>,
}

#[derive(Serialize)]
pub struct SphereKernelReport {
    pub radius: u32,
    pub tree: (f64, f64),
    pub complete: (f64, f64),
}

#[derive(Serialize)]
pub struct ComparisonReport {
    #[serde(rename = "R")]
    pub radius: u32,
    pub t: f64,
    pub tree_vertices: usize,
    pub complete_vertices: usize,
    pub max_sphere_spread: f64,
    pub max_cross_difference: f64,
    pub spheres: Vec<SphereKernelReport>,
}

impl From<&KernelComparison> for ComparisonReport {
    fn from(c: &KernelComparison) -> Self {
        ComparisonReport {
            radius: c.radius,
            t: c.t,
            tree_vertices: c.tree_vertices,
            complete_vertices: c.complete_vertices,
            max_sphere_spread: c.max_sphere_spread,
            max_cross_difference: c.max_cross_difference,
            spheres: c
                .spheres
                .iter()
                .map(|s| SphereKernelReport {
                    radius: s.radius,
                    tree: s.tree,
                    complete: s.complete,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct AssessmentReport {
    pub behavior: &'static str,
    pub partial_sum: f64,
    pub tail_estimate: Option<f64>,
    pub statistic: f64,
    pub terms: usize,
}

impl From<&SeriesAssessment> for AssessmentReport {
    fn from(a: &SeriesAssessment) -> Self {
        AssessmentReport {
            behavior: behavior_name(a.behavior),
            partial_sum: a.partial_sum,
            tail_estimate: a.tail_estimate,
            statistic: a.statistic,
            terms: a.terms,
        }
    }
}

#[derive(Serialize)]
pub struct VolumeSeriesReport {
    pub family: &'static str,
    #[serde(rename = "R")]
    pub radius: u64,
    pub volume_over_next_sphere: Vec<f64>,
    pub next_sphere: AssessmentReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub volume_over_flux: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux: Option<AssessmentReport>,
}

impl VolumeSeriesReport {
    pub fn new(family: &'static str, radius: u64, s: &VolumeRatioSeries) -> Self {
        VolumeSeriesReport {
            family,
            radius,
            volume_over_next_sphere: s.volume_over_next_sphere.clone(),
            next_sphere: (&s.next_sphere_assessment).into(),
            volume_over_flux: s.volume_over_flux.clone(),
            flux: s.flux_assessment.as_ref().map(AssessmentReport::from),
        }
    }
}

#[derive(Serialize)]
pub struct CatalogLine {
    pub name: String,
    pub source: String,
    pub expected: &'static str,
    pub got: &'static str,
    pub exact: bool,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct CatalogReport {
    pub passed: usize,
    pub failed: usize,
    pub entries: Vec<CatalogLine>,
}
