//! The subcommands. Each returns the text for stdout and an exit code;
//! files named by `--out` or `--trace` are written here.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use stocomp_core::harmonic::{
    boundedness_probe, classify_with, solve_decorated_tree, solve_radial, solve_weighted_path,
    Attachment, Boundedness, ClassifyOptions, LambdaParam, SolutionKind, Status,
};
use stocomp_core::heat::{
    comparison_test, decorated_volume_ratio_series, dirichlet_mass_operator, family_operator,
    mass_limit, volume_ratio_series, DoublingOptions, MassOptions, DEFAULT_TIMES,
};
use stocomp_core::sim::{
    path_seed, simulate_path, survival_counts, trace_path, PathOutcome, SurvivalEstimate, WalkModel,
};
use stocomp_core::{Error, GraphFamily, SequenceSpec};

use crate::catalog::{status_name, CatalogEntry};
use crate::report::*;

/// Longest trace accepted with `--trace`.
pub const MAX_TRACE_PATHS: u64 = 1000;

pub const GENERATOR: &str =
    "ChaCha8 (rand_chacha), path i seeded with seed_from_u64(seed_base + i)";

pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn ok(stdout: String) -> Outcome {
    Outcome { stdout, code: 0 }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn classify(family: &GraphFamily, radius: u64) -> Result<Outcome> {
    let verdict = classify_with(family, &ClassifyOptions { radius })?;
    let code = if verdict.status == Status::Inconclusive {
        2
    } else {
        0
    };
    Ok(Outcome {
        stdout: json(&VerdictReport::new(family.name(), &verdict))?,
        code,
    })
}

pub fn solve(
    family: &GraphFamily,
    lambda: f64,
    radius: usize,
    attachment: Attachment,
) -> Result<Outcome> {
    let lambda = LambdaParam::new(lambda)?;
    let solved = match family {
        GraphFamily::DecoratedTree {
            branching,
            decorations,
        } => solve_decorated_tree(branching, decorations, lambda, radius, attachment),
        GraphFamily::WeightedPath { weights } => solve_weighted_path(weights, lambda, radius),
        _ => solve_radial(&family.lower_to_profile()?, lambda, radius),
    };
    let (solution, diverged_at) = match solved {
        Ok(s) => (s, None),
        Err(Error::DivergedAt { radius, prefix }) => (*prefix, Some(radius)),
        Err(e) => return Err(e.into()),
    };
    let kind = match solution.kind() {
        SolutionKind::Radial => "radial",
        SolutionKind::DecoratedTree(Attachment::EndVertex) => "decorated-tree/end-vertex",
        SolutionKind::DecoratedTree(Attachment::PathToInfinity) => {
            "decorated-tree/path-to-infinity"
        }
        SolutionKind::WeightedPath => "weighted-path",
    };
    let boundedness = match boundedness_probe(&solution) {
        // Leaving the f64 range is unboundedness for every practical purpose;
        // report the last increment ratio.
        b if diverged_at.is_some() && !matches!(b, Boundedness::Unbounded { .. }) => {
            let d = solution.increment_values();
            let rate = match d.as_slice() {
                [.., a, b] => b / a,
                _ => f64::NAN,
            };
            BoundednessReport::Unbounded {
                rate_estimate: rate,
            }
        }
        b => b.into(),
    };
    let report = SolutionReport {
        family: family.name(),
        kind,
        lambda: lambda.lambda(),
        alpha: lambda.alpha(),
        beta: lambda.beta(),
        radius: solution.radius(),
        diverged_at,
        w: solution.values(),
        increments: solution.increment_values(),
        boundedness,
    };
    Ok(ok(json(&report)?))
}

pub struct MassRequest<'a> {
    pub family: &'a GraphFamily,
    pub times: &'a [f64],
    /// A fixed radius; `None` doubles the radius until convergence.
    pub radius: Option<usize>,
    pub doubling: DoublingOptions,
    pub options: MassOptions,
    pub out: Option<&'a Path>,
}

pub fn mass(req: &MassRequest) -> Result<Outcome> {
    let curve = match req.radius {
        Some(r) => {
            dirichlet_mass_operator(&family_operator(req.family, r)?, req.times, &req.options)?
        }
        None => mass_limit(req.family, req.times, &req.doubling, &req.options)?,
    };
    if let Some(path) = req.out {
        write_file(path, &mass_csv(&curve))?;
    }
    Ok(ok(json(&MassReport::new(req.family.name(), &curve))?))
}

pub struct SimulateRequest<'a> {
    pub family: &'a GraphFamily,
    pub times: &'a [f64],
    pub paths: u64,
    pub radius: usize,
    pub seed: u64,
    pub with_mass: bool,
    pub trace: Option<&'a Path>,
}

pub fn simulate(req: &SimulateRequest) -> Result<Outcome> {
    if req.paths == 0 {
        bail!("paths: at least one path is required");
    }
    let model = WalkModel::from_family(req.family, req.radius)?;
    let horizon = req.times[req.times.len() - 1];
    // Survivor counts add up in any order, so the result does not depend on
    // the thread schedule.
    let nt = req.times.len();
    let counts = (0..req.paths)
        .into_par_iter()
        .fold(
            || vec![0u64; nt],
            |mut acc, i| {
                let o = simulate_path(&model, horizon, path_seed(req.seed, i));
                for (a, c) in acc.iter_mut().zip(survival_counts(req.times, [o])) {
                    *a += c;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; nt],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    let masses = if req.with_mass {
        let op = family_operator(req.family, req.radius)?;
        Some(
            dirichlet_mass_operator(&op, req.times, &MassOptions::default())?
                .rows
                .remove(0)
                .mass,
        )
    } else {
        None
    };
    let estimates = req
        .times
        .iter()
        .zip(&counts)
        .enumerate()
        .map(|(k, (&t, &s))| {
            let e = SurvivalEstimate::from_counts(t, req.paths, s, req.radius)?;
            Ok(EstimateReport::new(&e, masses.as_ref().map(|m| m[k])))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(path) = req.trace {
        if req.paths > MAX_TRACE_PATHS {
            bail!(
                "trace: at most {MAX_TRACE_PATHS} paths can be traced, got {}",
                req.paths
            );
        }
        let mut csv =
            String::from("# stocomp walk-trace v1\npath,jump,clock,radius,end_vertex,outcome\n");
        for i in 0..req.paths {
            let (outcome, states) = trace_path(&model, horizon, path_seed(req.seed, i));
            let tag = match outcome {
                PathOutcome::SurvivedToHorizon => "survived",
                PathOutcome::EscapedAt(_) => "escaped",
            };
            for s in states {
                csv.push_str(&format!(
                    "{i},{},{},{},{},{tag}\n",
                    s.jumps, s.clock, s.radius, s.at_end_vertex as u8
                ));
            }
        }
        write_file(path, &csv)?;
    }
    let report = SimulationReport {
        family: req.family.name(),
        generator: GENERATOR,
        seed_base: req.seed,
        estimates,
    };
    Ok(ok(json(&report)?))
}

pub fn compare_kernels(family: &GraphFamily, radius: u32, t: f64, cap: usize) -> Result<Outcome> {
    let k: &SequenceSpec = match family {
        GraphFamily::SymmetricTree { branching }
        | GraphFamily::IntraSphereTree { branching, .. } => branching,
        _ => {
            bail!("compare: the kernel comparison needs a tree family (tree or intra-sphere-tree)")
        }
    };
    let c = comparison_test(k, radius, t, cap)?;
    Ok(ok(json(&ComparisonReport::from(&c))?))
}

pub fn compare_volume(family: &GraphFamily, radius: u64) -> Result<Outcome> {
    let series = match family {
        GraphFamily::DecoratedTree {
            branching,
            decorations,
        } => decorated_volume_ratio_series(branching, decorations, radius)?,
        GraphFamily::WeightedPath { .. } => bail!("compare: weighted paths have no sphere sizes"),
        _ => volume_ratio_series(&family.lower_to_profile()?, radius)?,
    };
    Ok(ok(json(&VolumeSeriesReport::new(
        family.name(),
        radius,
        &series,
    ))?))
}

pub fn catalog(entries: &[CatalogEntry], radius: u64) -> Result<Outcome> {
    let lines = entries
        .iter()
        .map(|e| {
            let v = classify_with(&e.family, &ClassifyOptions { radius })
                .with_context(|| format!("catalog entry `{}`", e.name))?;
            Ok(CatalogLine {
                name: e.name.clone(),
                source: e.source.clone(),
                expected: status_name(e.expected),
                got: status_name(v.status),
                exact: v.exact,
                pass: v.status == e.expected,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<&CatalogLine> = lines.iter().filter(|l| !l.pass).collect();
    for l in &failed {
        eprintln!(
            "catalog mismatch: `{}` expected {}, got {}",
            l.name, l.expected, l.got
        );
    }
    let report = CatalogReport {
        passed: lines.len() - failed.len(),
        failed: failed.len(),
        entries: lines,
    };
    let code = if report.failed == 0 { 0 } else { 1 };
    Ok(Outcome {
        stdout: json(&report)?,
        code,
    })
}

pub fn default_times() -> Vec<f64> {
    DEFAULT_TIMES.to_vec()
}
