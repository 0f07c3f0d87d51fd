use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::Serialize;

use s3pinch::catalog::{CatalogSurface, Side};
use s3pinch::certify::{eigen_certificate, gap_certificate, EigenCertificate};
use s3pinch::gridfile::{export_grid, read_grid};
use s3pinch::pinch::{beta_solve, f_inverse, improved_genus_factor, min_surface_max_a_bound, S3_VOLUME};
use s3pinch::quadrature::{genus_report_from_nodes, GapCertificate, GenusOptions, NodeSet};
use s3pinch::surface::Surface;
use s3pinch::tube::{monte_carlo_volume, sum_chain_from_nodes, ChainLink, SumChain};
use s3pinch::{GenusReport, RootResult, VolumeEstimate};

use crate::output::{render, render_table, Document, Format, Provenance, SCHEMA_VERSION};
use crate::{Cli, Command, Solve};

pub struct Output {
    pub text: String,
    pub code: u8,
    /// Write `text` here instead of stdout.
    pub path: Option<PathBuf>,
}

const BOUND_VIOLATION: u8 = 3;
const NUMERICAL_FAILURE: u8 = 4;

pub fn run(cli: &Cli) -> anyhow::Result<Output> {
    let provenance = Provenance { resolution: cli.resolution, seed: cli.seed, samples: cli.samples, tol: cli.tolerance() };
    let format = cli.format.unwrap_or(match cli.command {
        Command::SweepTori { .. } => Format::Csv,
        _ => Format::Json,
    });
    let ctx = Ctx { provenance, format };
    match &cli.command {
        Command::Check { surface } => {
            let s: CatalogSurface = surface.parse()?;
            let report = check(cli, &s, &s.to_string(), Some(&s))?;
            ctx.emit("check", report.passed(), BOUND_VIOLATION, &report)
        }
        Command::Import { path } => {
            let s = read_grid(path).with_context(|| format!("importing {}", path.display()))?;
            let report = check(cli, &s, &path.display().to_string(), None)?;
            ctx.emit("import", report.passed(), BOUND_VIOLATION, &report)
        }
        Command::SweepTori { a_min, a_max, steps } => {
            let rows = sweep_tori(*a_min, *a_max, *steps, cli.resolution)?;
            let passed = rows.iter().all(|r| r.slack >= -cli.tolerance() * (1.0 + r.integral_f));
            if format == Format::Json {
                let argmin = rows.iter().min_by(|x, y| x.slack.total_cmp(&y.slack)).cloned();
                return ctx.emit("sweep-tori", passed, BOUND_VIOLATION, &Sweep { argmin, rows });
            }
            let table: Vec<Vec<f64>> =
                rows.iter().map(|r| vec![r.a, r.area, r.traceless_norm, r.integral_f, r.slack]).collect();
            Ok(Output {
                text: render_table(&["a", "area", "traceless_norm", "integral_f", "slack"], &table, format),
                code: if passed { 0 } else { BOUND_VIOLATION },
                path: None,
            })
        }
        Command::Solve { what } => {
            let r = solve(what)?;
            ctx.emit("solve", r.converged, NUMERICAL_FAILURE, &r)
        }
        Command::Gap { surface } => {
            let s: CatalogSurface = surface.parse()?;
            let cert = gap_certificate(&s, &s.grid((cli.resolution, cli.resolution))?)?;
            let verdict = if cert.below_threshold { "below threshold" } else { "above threshold" };
            ctx.emit("gap", true, 0, &Gap { surface: s.to_string(), verdict, certificate: cert })
        }
        Command::Eigen { surface } => {
            let s: CatalogSurface = surface.parse()?;
            let cert = eigen_certificate(&s, &s.grid((cli.resolution, cli.resolution))?)?;
            let passed = cert.bounds.iter().all(|b| b.holds);
            ctx.emit("eigen", passed, BOUND_VIOLATION, &Eigen { surface: s.to_string(), certificate: cert })
        }
        Command::Export { surface, output } => {
            let s: CatalogSurface = surface.parse()?;
            let text = export_grid(&s, (cli.resolution, cli.resolution))?;
            Ok(Output { text, code: 0, path: output.clone() })
        }
    }
}

struct Ctx {
    provenance: Provenance,
    format: Format,
}

impl Ctx {
    fn emit<T: Serialize>(&self, command: &'static str, passed: bool, failure: u8, result: &T) -> anyhow::Result<Output> {
        let doc = Document { schema: SCHEMA_VERSION, command, provenance: self.provenance.clone(), passed, result };
        Ok(Output { text: render(&doc, self.format)?, code: if passed { 0 } else { failure }, path: None })
    }
}

#[derive(Debug, Serialize)]
struct MonteCarloSide {
    side: Side,
    estimate: VolumeEstimate,
    hk_upper: f64,
    /// Estimate within three standard errors of the known volume.
    within_3_sigma: Option<bool>,
}

#[derive(Debug, Serialize)]
struct Check {
    surface: String,
    genus: GenusReport,
    tube: SumChain,
    monte_carlo: Vec<MonteCarloSide>,
    inequalities: Vec<ChainLink>,
}

impl Check {
    fn passed(&self) -> bool {
        self.inequalities.iter().all(|l| l.holds)
    }
}

fn link(name: &str, lhs: f64, rhs: f64, equality: bool, tol: f64) -> ChainLink {
    let tol = tol * (1.0 + lhs.abs().max(rhs.abs()));
    let holds = if equality { (rhs - lhs).abs() <= tol } else { lhs <= rhs + tol };
    ChainLink { name: name.to_string(), lhs, rhs, equality, holds, slack: rhs - lhs }
}

fn check(cli: &Cli, surface: &dyn Surface, label: &str, catalog: Option<&CatalogSurface>) -> anyhow::Result<Check> {
    let grid = surface.grid((cli.resolution, cli.resolution))?;
    let nodes = NodeSet::evaluate(surface, &grid)?;
    let genus = genus_report_from_nodes(surface, &grid, &nodes, GenusOptions::default())?;
    let tube = sum_chain_from_nodes(&nodes, catalog.map(|c| c.exact().side_volumes))?;

    let mut inequalities = vec![
        link("genus_bound", genus.bound_lhs, genus.bound_rhs, false, cli.tolerance()),
        link("cubic_bound", genus.cubic_lhs, genus.cubic_rhs, false, cli.tolerance()),
    ];
    if catalog.is_some_and(|c| c.is_equality_case()) {
        inequalities.push(link("genus_bound_equality", genus.bound_lhs, genus.bound_rhs, true, cli.tolerance()));
    }
    inequalities.extend(tube.links(cli.tolerance()));

    let mut monte_carlo = Vec::new();
    if let (Some(c), true) = (catalog, cli.samples > 0) {
        for side in [Side::One, Side::Two] {
            let report = &tube.sides[side.index()];
            let estimate = monte_carlo_volume(c, side, cli.samples, cli.seed);
            let within_3_sigma = report.exact_volume.map(|e| (estimate.value - e.value).abs() <= 3.0 * estimate.stderr);
            monte_carlo.push(MonteCarloSide { side, estimate, hk_upper: report.hk_upper, within_3_sigma });
        }
    }
    Ok(Check { surface: label.to_string(), genus, tube, monte_carlo, inequalities })
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    a: f64,
    area: f64,
    traceless_norm: f64,
    integral_f: f64,
    slack: f64,
}

#[derive(Debug, Serialize)]
struct Sweep {
    argmin: Option<SweepRow>,
    rows: Vec<SweepRow>,
}

fn sweep_tori(a_min: f64, a_max: f64, steps: usize, resolution: usize) -> anyhow::Result<Vec<SweepRow>> {
    if steps == 0 {
        bail!(s3pinch::Error::Domain("steps must be >= 1".into()));
    }
    if !(0.0 < a_min && a_min <= a_max && a_max < 1.0) || (steps > 1 && a_min == a_max) {
        bail!(s3pinch::Error::Domain(format!("need 0 < a_min < a_max < 1, got [{a_min}, {a_max}]")));
    }
    let options = GenusOptions { refine: false, ..Default::default() };
    (0..steps)
        .map(|i| {
            let a = if steps == 1 { a_min } else { a_min + (a_max - a_min) * i as f64 / (steps - 1) as f64 };
            let t = CatalogSurface::flat_torus(a)?;
            let grid = t.grid((resolution, resolution))?;
            let rep = genus_report_from_nodes(&t, &grid, &NodeSet::evaluate(&t, &grid)?, options)?;
            Ok(SweepRow {
                a,
                area: rep.area,
                traceless_norm: rep.max_traceless_norm,
                integral_f: rep.integral_f,
                slack: rep.slack,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct SolveResult {
    equation: &'static str,
    target: f64,
    root: RootResult,
    converged: bool,
}

fn solve(what: &Solve) -> anyhow::Result<SolveResult> {
    let (equation, target, root) = match *what {
        Solve::Beta { g0, area } => {
            let root = beta_solve(g0, area)?;
            ("beta + (beta^2 - 1) atan(beta) = 2 g0 pi^2 / area", 2.0 * g0 as f64 * PI * PI / area, root)
        }
        Solve::Finv { y } => ("f(t) = y", y, f_inverse(y)?),
        Solve::MaxA { g, ambient } => {
            let ambient = ambient.unwrap_or(S3_VOLUME);
            let root = min_surface_max_a_bound(g, ambient)?;
            let target = (2.0 * PI * PI * (g as f64 - 1.0) + ambient) / (4.0 * PI * improved_genus_factor(g) as f64);
            ("max |A| >= f^-1((2 pi^2 (g - 1) + |M|) / (4 pi floor((g + 3) / 2)))", target, root)
        }
    };
    let converged = root.residual.abs() <= RootResult::residual_tolerance(target);
    Ok(SolveResult { equation, target, root, converged })
}

#[derive(Debug, Serialize)]
struct Gap {
    surface: String,
    verdict: &'static str,
    certificate: GapCertificate,
}

#[derive(Debug, Serialize)]
struct Eigen {
    surface: String,
    certificate: EigenCertificate,
}
