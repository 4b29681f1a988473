//! `stocomp`: command-line front end of `stocomp-core`.

pub mod catalog;
pub mod commands;
pub mod config;
pub mod input;
pub mod report;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use stocomp_core::harmonic::Attachment;
use stocomp_core::heat::DEFAULT_KERNEL_CAP;
use stocomp_core::GraphFamily;

use crate::commands::Outcome;
use crate::config::{
    check_positive, check_radius, check_times, doubling_options, mass_options, parse_times,
    resolve_family, ConfigFile, FamilyFlags,
};

#[derive(Parser, Debug)]
#[command(
    name = "stocomp",
    version,
    about = "Stochastic completeness of spherically symmetric graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide completeness by the series criteria.
    Classify(ClassifyArgs),
    /// Radial solution of (Δ + λ) w = 0 and its boundedness.
    Solve(SolveArgs),
    /// Dirichlet heat mass M_R(t), doubling R until it settles.
    Mass(MassArgs),
    /// Monte Carlo survival of the jump process.
    Simulate(SimulateArgs),
    /// Heat kernels of a tree with and without complete spheres, or the
    /// volume-growth series.
    Compare(CompareArgs),
    /// Classify every catalog family and check the expected verdicts.
    Catalog(CatalogArgs),
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// tree, decorated-tree, intra-sphere-tree, antitree, weighted-path or custom.
    #[arg(long)]
    pub family: Option<String>,
    /// Branching numbers k(r), e.g. "poly:2".
    #[arg(long)]
    pub k: Option<String>,
    /// End vertices per vertex k~(r) of a decorated tree.
    #[arg(long = "k-tilde")]
    pub k_tilde: Option<String>,
    /// Sphere sizes S(r) of an antitree or custom profile.
    #[arg(long = "S")]
    pub sphere: Option<String>,
    /// Edge weights a(r) of a weighted path.
    #[arg(long)]
    pub a: Option<String>,
    /// Outward degree k₊(r) of a custom profile
    #[arg(long = "k-plus")]
    pub k_plus: Option<String>,
    /// Inward degree k₋(r) of a custom profile
    #[arg(long = "k-minus")]
    pub k_minus: Option<String>,
    /// Same-sphere degree m₀(r) of a custom profile
    #[arg(long = "m-zero")]
    pub m_zero: Option<String>,
    /// Same-sphere edges: "none", "complete" or a degree sequence.
    #[arg(long)]
    pub intra: Option<String>,
}

impl CommonArgs {
    fn load(&self) -> Result<(ConfigFile, GraphFamily)> {
        let file = ConfigFile::load(self.config.as_deref())?;
        let flags = FamilyFlags {
            family: self.family.clone(),
            k: self.k.clone(),
            k_tilde: self.k_tilde.clone(),
            sphere: self.sphere.clone(),
            a: self.a.clone(),
            k_plus: self.k_plus.clone(),
            k_minus: self.k_minus.clone(),
            m_zero: self.m_zero.clone(),
            intra: self.intra.clone(),
        };
        let family = resolve_family(file.family.as_ref(), &flags)?;
        Ok((file, family))
    }
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Terms summed for numerical evidence [default: 2000].
    #[arg(long)]
    pub radius: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AttachmentArg {
    EndVertex,
    PathToInfinity,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// λ > 0 [default: 1].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Depth R [default: 200].
    #[arg(long)]
    pub radius: Option<u64>,
    /// What decorations are [default: end-vertex].
    #[arg(long, value_enum)]
    pub attachment: Option<AttachmentArg>,
}

#[derive(Args, Debug)]
pub struct MassArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated times [default: 0.1,0.5,1,2,5,10].
    #[arg(long)]
    pub times: Option<String>,
    /// Fixed truncation radius instead of doubling.
    #[arg(long)]
    pub radius: Option<u64>,
    /// First radius of the doubling
    #[arg(long)]
    pub start_radius: Option<usize>,
    /// Give up doubling beyond this radius
    #[arg(long)]
    pub max_radius: Option<usize>,
    /// Stop doubling once successive masses differ by at most this.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// auto, uniformization, radau-pade or contour.
    #[arg(long)]
    pub solver: Option<String>,
    /// Poisson tail mass dropped by uniformization
    #[arg(long)]
    pub poisson_tail: Option<f64>,
    /// Local error tolerance of the stiff solvers
    #[arg(long)]
    pub stiff_tolerance: Option<f64>,
    /// Write the mass curve as CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated horizons [default: 1].
    #[arg(long)]
    pub times: Option<String>,
    /// Number of paths N [default: 10000].
    #[arg(long)]
    pub paths: Option<u64>,
    /// Truncation radius R_sim [default: 200].
    #[arg(long)]
    pub radius: Option<u64>,
    /// Seed base; path i uses seed + i [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also report M_R(t) at the same radius.
    #[arg(long)]
    pub with_mass: bool,
    /// Write every path's states as CSV here (small N only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Ball radius [default: 4; 1000 with --volume-series].
    #[arg(long)]
    pub radius: Option<u64>,
    /// Time t [default: 1].
    #[arg(long)]
    pub t: Option<f64>,
    /// Largest ball materialized [default: 20000].
    #[arg(long)]
    pub cap: Option<usize>,
    /// Print Σ V(r)/S(r+1) and Σ V(r)/(k₊(r) S(r)) instead.
    #[arg(long)]
    pub volume_series: bool,
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// Catalog JSON file; the built-in catalog when absent.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Terms summed for numerical evidence [default: 2000].
    #[arg(long)]
    pub radius: Option<u64>,
    /// Print the built-in catalog as JSON and exit.
    #[arg(long)]
    pub dump: bool,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Classify(a) => {
            let (file, family) = a.common.load()?;
            let radius = check_radius("radius", a.radius.or(file.radius).unwrap_or(2000))?;
            commands::classify(&family, radius as u64)
        }
        Command::Solve(a) => {
            let (file, family) = a.common.load()?;
            let lambda = check_positive("lambda", a.lambda.or(file.lambda).unwrap_or(1.0))?;
            let radius = check_radius("radius", a.radius.or(file.radius).unwrap_or(200))?;
            let attachment = match (a.attachment, file.attachment.as_deref()) {
                (Some(AttachmentArg::EndVertex), _) | (None, None | Some("end-vertex")) => {
                    Attachment::EndVertex
                }
                (Some(AttachmentArg::PathToInfinity), _) | (None, Some("path-to-infinity")) => {
                    Attachment::PathToInfinity
                }
                (None, Some(other)) => {
                    bail!("attachment: unknown value `{other}` (end-vertex, path-to-infinity)")
                }
            };
            commands::solve(&family, lambda, radius, attachment)
        }
        Command::Mass(a) => {
            let (file, family) = a.common.load()?;
            let times = match (&a.times, &file.times) {
                (Some(s), _) => parse_times(s)?,
                (None, Some(t)) => t.clone(),
                (None, None) => commands::default_times(),
            };
            check_times(&times, true)?;
            let radius = a
                .radius
                .or(file.radius)
                .map(|r| check_radius("radius", r))
                .transpose()?;
            let options = mass_options(
                &file,
                a.solver.as_deref(),
                a.poisson_tail,
                a.stiff_tolerance,
            )?;
            let doubling = doubling_options(&file, a.start_radius, a.max_radius, a.tolerance)?;
            let out = a.out.clone().or(file.out.clone());
            commands::mass(&commands::MassRequest {
                family: &family,
                times: &times,
                radius,
                doubling,
                options,
                out: out.as_deref(),
            })
        }
        Command::Simulate(a) => {
            let (file, family) = a.common.load()?;
            let times = match (&a.times, &file.times, file.t) {
                (Some(s), _, _) => parse_times(s)?,
                (None, Some(t), _) => t.clone(),
                (None, None, Some(t)) => vec![t],
                (None, None, None) => vec![1.0],
            };
            check_times(&times, false)?;
            let paths = a.paths.or(file.paths).unwrap_or(10_000);
            let radius = check_radius("radius", a.radius.or(file.radius).unwrap_or(200))?;
            let trace = a.trace.clone().or(file.trace.clone());
            commands::simulate(&commands::SimulateRequest {
                family: &family,
                times: &times,
                paths,
                radius,
                seed: a.seed.or(file.seed).unwrap_or(0),
                with_mass: a.with_mass || file.with_mass.unwrap_or(false),
                trace: trace.as_deref(),
            })
        }
        Command::Compare(a) => {
            let (file, family) = a.common.load()?;
            if a.volume_series || file.volume_series.unwrap_or(false) {
                let radius = check_radius("radius", a.radius.or(file.radius).unwrap_or(1000))?;
                return commands::compare_volume(&family, radius as u64);
            }
            let radius = check_radius("radius", a.radius.or(file.radius).unwrap_or(4))?;
            let t = a.t.or(file.t).unwrap_or(1.0);
            if !(t.is_finite() && t >= 0.0) {
                bail!("t: must be finite and nonnegative, got {t}");
            }
            let cap = a.cap.or(file.cap).unwrap_or(DEFAULT_KERNEL_CAP);
            commands::compare_kernels(&family, radius as u32, t, cap)
        }
        Command::Catalog(a) => {
            if a.dump {
                return Ok(Outcome {
                    stdout: commands::json(&catalog::builtin_json())?,
                    code: 0,
                });
            }
            let entries = match &a.file {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading catalog {}", path.display()))?;
                    catalog::parse_catalog(&text)?
                }
                None => catalog::builtin(),
            };
            let radius = check_radius("radius", a.radius.unwrap_or(2000))?;
            commands::catalog(&entries, radius as u64)
        }
    }
}
