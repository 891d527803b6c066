use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use stokes_perturb_core::fields::{div_h, GridField};
use stokes_perturb_core::geometry::{rasterize, GridSlit, Policy, ShapeSpec};
use stokes_perturb_core::harness::{run_experiment, slit_discrimination, ConvergenceReport, Forcing};
use stokes_perturb_core::leray::{is_in_solenoidal, subspace_gap, Projector};
use stokes_perturb_core::resolvents::{
    assemble_scalar_laplace, assemble_stokes, assemble_vector_laplace, laplace_resolvent, stokes_resolvent,
    stokes_resolvent_streamfn, LaplaceField, LaplaceProblem, StokesProblem,
};
use stokes_perturb_core::solver::SolveStats;
use stokes_perturb_core::{BcMode, DomainMask, FaceAxis, Grid, MacField, VertexField};

use crate::cli::{AxisArg, Command, DomainArgs, DumpArgs, Global, LaplaceKind, OperatorArg, PolicyArg, ProjectArgs, RhsArg, ShapeKind, ShapesArgs, SolveArgs};
use crate::config::{Assertion, Config, Plan};
use crate::error::{CliError, Result};
use crate::exec::Threaded;
use crate::formats::{format_field, format_mask, format_matrix, read_field, read_mask, write_atomic, AnyField};
use crate::report;

pub fn run(global: &Global, command: &Command) -> Result<()> {
    match command {
        Command::Shapes(a) => cmd_shapes(global, a),
        Command::Solve(a) => cmd_solve(global, a),
        Command::Project(a) => cmd_project(global, a),
        Command::Sequence => cmd_sequence(global),
        Command::Dump(a) => cmd_dump(global, a),
    }
}

fn load_config(global: &Global) -> Result<Config> {
    match &global.config {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

fn stats_json(stats: &SolveStats, timings: bool) -> Value {
    let mut v = json!({ "iterations": stats.iterations, "residual": stats.residual });
    if timings {
        v["seconds"] = json!(stats.seconds);
    }
    v
}

fn domain(args: &DomainArgs) -> Result<DomainMask> {
    match &args.domain_file {
        Some(p) => read_mask(p),
        None => {
            if args.n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            Ok(DomainMask::full(Grid::unit_square(args.n)))
        }
    }
}

fn analytic(rhs: RhsArg) -> Option<Forcing> {
    match rhs {
        RhsArg::Gradient => Some(Forcing::Gradient { center: [0.5, 0.5], width: 0.2 }),
        RhsArg::Constant => Some(Forcing::Constant { value: [1.0, 0.0] }),
        RhsArg::Vortex => Some(Forcing::Vortex { center: [0.5, 0.5], radius: 0.3 }),
        RhsArg::Crossflow => Some(Forcing::Crossflow { from: 0.25, to: 0.75 }),
        RhsArg::File => None,
    }
}

fn read_input(rhs: RhsArg, file: Option<&PathBuf>, flag: &str, grid: &Grid) -> Result<Option<AnyField>> {
    if rhs != RhsArg::File {
        return Ok(None);
    }
    let path = file.ok_or_else(|| CliError::Usage(format!("{flag} is required with a `file` input")))?;
    read_field(path, grid).map(Some)
}

fn vector_input(rhs: RhsArg, file: Option<&PathBuf>, flag: &str, grid: &Grid) -> Result<MacField> {
    match read_input(rhs, file, flag, grid)? {
        Some(AnyField::Face(f)) => Ok(f),
        Some(other) => Err(CliError::Usage(format!("{flag} holds a {} field, expected face values", other.kind()))),
        None => Ok(analytic(rhs).expect("analytic input").vector(grid)),
    }
}

fn scalar_input(rhs: RhsArg, file: Option<&PathBuf>, flag: &str, grid: &Grid) -> Result<VertexField> {
    match read_input(rhs, file, flag, grid)? {
        Some(AnyField::Vertex(f)) => Ok(f),
        Some(other) => Err(CliError::Usage(format!("{flag} holds a {} field, expected vertex values", other.kind()))),
        None => Ok(analytic(rhs).expect("analytic input").scalar(grid)),
    }
}

fn cmd_shapes(global: &Global, a: &ShapesArgs) -> Result<()> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let grid = Grid::unit_square(a.n);
    let policy = match a.policy {
        PolicyArg::Center => Policy::Center,
        PolicyArg::Inner => Policy::Inner,
        PolicyArg::Outer => Policy::Outer,
    };
    let c = [a.center[0], a.center[1]];
    let mask = match a.shape {
        ShapeKind::Square => DomainMask::full(grid),
        ShapeKind::Disk => rasterize(&ShapeSpec::Disk { center: c, radius: a.radius }, &grid, policy)?,
        ShapeKind::Rect => rasterize(
            &ShapeSpec::Rect { corner: [c[0] - a.width / 2.0, c[1] - a.height / 2.0], width: a.width, height: a.height },
            &grid,
            policy,
        )?,
        ShapeKind::SlitSquare => {
            let axis = match a.slit_axis {
                AxisArg::X => FaceAxis::X,
                AxisArg::Y => FaceAxis::Y,
            };
            GridSlit::middle_half(&grid, axis).thickened(&grid, 0)?
        }
    };
    let path = global.out.join(&a.name);
    write_atomic(&path, format_mask(&mask).as_bytes())?;
    println!(
        "{}: {} cells, {} slit faces, components weak {} pseudo {}",
        path.display(),
        mask.cell_count(),
        mask.slits().len(),
        mask.components(BcMode::Weak).count,
        mask.components(BcMode::Pseudo).count
    );
    Ok(())
}

fn cmd_solve(global: &Global, a: &SolveArgs) -> Result<()> {
    let config = load_config(global)?;
    let mask = domain(&a.domain)?;
    let grid = *mask.grid();
    let solver = config.solver.options();
    let mut stats = json!({
        "operator": match (a.operator, a.laplace) {
            (OperatorArg::Stokes, _) => "stokes",
            (OperatorArg::Laplace, LaplaceKind::Scalar) => "scalar_laplace",
            (OperatorArg::Laplace, LaplaceKind::Vector) => "vector_laplace",
        },
        "mode": a.mode.name(),
        "shift": config.shift,
        "cells": mask.cell_count(),
    });
    let out = &global.out;
    match a.operator {
        OperatorArg::Laplace => {
            if a.oracle {
                return Err(CliError::Usage("--oracle applies to --operator stokes".into()));
            }
            let mut p = match a.laplace {
                LaplaceKind::Scalar => LaplaceProblem::scalar(
                    mask.clone(),
                    a.mode,
                    scalar_input(a.rhs, a.rhs_file.as_ref(), "--rhs-file", &grid)?,
                ),
                LaplaceKind::Vector => LaplaceProblem::vector(
                    mask.clone(),
                    a.mode,
                    vector_input(a.rhs, a.rhs_file.as_ref(), "--rhs-file", &grid)?,
                ),
            };
            p.shift = config.shift;
            p.solver = solver;
            if a.dump_matrix {
                let m = match a.laplace {
                    LaplaceKind::Scalar => assemble_scalar_laplace(&mask, a.mode, config.shift)?.system,
                    LaplaceKind::Vector => assemble_vector_laplace(&mask, a.mode, config.shift)?.system,
                };
                write_atomic(&out.join("matrix.txt"), format_matrix(m.matrix()).as_bytes())?;
            }
            let (u, s) = laplace_resolvent(&p)?;
            stats["solver"] = stats_json(&s, global.timings);
            stats["solution_norm"] = json!(u.norm());
            let field = match u {
                LaplaceField::Scalar(f) => AnyField::Vertex(f),
                LaplaceField::Vector(f) => AnyField::Face(f),
            };
            write_atomic(&out.join("solution.csv"), format_field(&field).as_bytes())?;
        }
        OperatorArg::Stokes => {
            let mut p = StokesProblem::new(mask.clone(), a.mode, vector_input(a.rhs, a.rhs_file.as_ref(), "--rhs-file", &grid)?)
                .projected(a.project_rhs);
            p.shift = config.shift;
            p.solver = solver;
            if a.dump_matrix {
                let sys = assemble_stokes(&mask, a.mode, config.shift)?;
                write_atomic(&out.join("matrix.txt"), format_matrix(sys.system.matrix()).as_bytes())?;
            }
            let sol = stokes_resolvent(&p)?;
            stats["solver"] = stats_json(&sol.stats, global.timings);
            stats["solution_norm"] = json!(sol.velocity.norm());
            stats["divergence_defect"] = json!(grid.h() * div_h(&sol.velocity).restrict(&mask).norm());
            if a.oracle {
                let stream = stokes_resolvent_streamfn(&p)?;
                let scale = sol.velocity.norm().max(f64::MIN_POSITIVE);
                let agreement = stream.velocity.minus(&sol.velocity)?.norm() / scale;
                stats["oracle_agreement"] = json!(agreement);
                stats["oracle_solver"] = stats_json(&stream.stats, global.timings);
            }
            write_atomic(&out.join("solution.csv"), format_field(&AnyField::Face(sol.velocity)).as_bytes())?;
            write_atomic(&out.join("pressure.csv"), format_field(&AnyField::Cell(sol.pressure)).as_bytes())?;
        }
    }
    write_json(&out.join("stats.json"), &stats)?;
    println!("{}", serde_json::to_string(&stats).unwrap_or_default());
    Ok(())
}

fn cmd_project(global: &Global, a: &ProjectArgs) -> Result<()> {
    let mask = domain(&a.domain)?;
    let grid = *mask.grid();
    let f = vector_input(a.input, a.field.as_ref(), "--field", &grid)?;
    let projector = Projector::new(&mask, a.mode)?;
    let d = projector.decompose(&f)?;
    let again = projector.apply(&d.solenoidal)?;
    let input_check = is_in_solenoidal(&f, &mask, a.mode)?;
    let output_check = is_in_solenoidal(&d.solenoidal, &mask, a.mode)?;
    let mut summary = json!({
        "mode": a.mode.name(),
        "components": projector.component_count(),
        "input_norm": f.norm(),
        "solenoidal_norm": d.solenoidal.norm(),
        "gradient_norm": d.gradient.norm(),
        "orthogonality": d.solenoidal.inner(&d.gradient)?,
        "idempotence_defect": again.minus(&d.solenoidal)?.norm(),
        "input_is_solenoidal": input_check.is_solenoidal,
        "input_div_defect": input_check.div_defect,
        "input_flux_defect": input_check.flux_defect,
        "input_distance": input_check.distance,
        "output_is_solenoidal": output_check.is_solenoidal,
        "output_div_defect": output_check.div_defect,
        "solver": stats_json(&d.stats, global.timings),
    });
    if a.gap_samples > 0 {
        summary["subspace_gap"] = json!(subspace_gap(&mask, a.gap_samples, global.seed)?);
        summary["seed"] = json!(global.seed);
    }
    let out = &global.out;
    write_atomic(&out.join("solenoidal.csv"), format_field(&AnyField::Face(d.solenoidal)).as_bytes())?;
    write_atomic(&out.join("gradient.csv"), format_field(&AnyField::Face(d.gradient)).as_bytes())?;
    write_json(&out.join("summary.json"), &summary)?;
    println!("{}", serde_json::to_string(&summary).unwrap_or_default());
    Ok(())
}

fn report_json(r: &ConvergenceReport) -> Value {
    json!({
        "level_mode": r.level_mode.name(),
        "limit_mode": r.limit_mode.name(),
        "errors": r.errors(),
        "relative_errors": r.relative_errors(),
        "rates": r.levels.iter().map(|l| l.rate).collect::<Vec<_>>(),
        "reference_norm": r.reference_norm,
        "reference_dofs": r.reference_dofs,
        "floor": r.floor,
        "non_monotone": r.non_monotone,
        "strictly_decreasing": r.strictly_decreasing(),
    })
}

fn write_reports(out: &Path, title: &str, runs: &[(String, ConvergenceReport)], timings: bool) -> Result<()> {
    for (k, (label, r)) in runs.iter().enumerate() {
        let name = if k == 0 { "report.csv".to_string() } else { format!("report_{label}.csv") };
        write_atomic(&out.join(name), report::csv(r, timings).as_bytes())?;
    }
    let series: Vec<(String, Vec<f64>)> = runs.iter().map(|(l, r)| (l.clone(), r.errors())).collect();
    write_atomic(&out.join("report.svg"), report::svg(title, &series).as_bytes())
}

fn cmd_sequence(global: &Global) -> Result<()> {
    let path = global.config.as_ref().ok_or_else(|| CliError::Usage("sequence needs --config".into()))?;
    let config = Config::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let exec = Threaded { threads: global.threads.max(1) };
    let out = &global.out;
    match config.plan(base)? {
        Plan::Sequence { specs, assertion } => {
            let mut runs = Vec::new();
            for (label, spec) in &specs {
                runs.push((label.clone(), run_experiment(spec, &exec)?));
            }
            let mut failures = Vec::new();
            let mut entries = serde_json::Map::new();
            for (label, r) in &runs {
                let ok = match assertion {
                    Assertion::Converged { factor } => r.converged(factor),
                    Assertion::StrictlyDecreasing => r.strictly_decreasing() && !r.non_monotone,
                    Assertion::None => true,
                };
                if !ok {
                    failures.push(label.clone());
                }
                let mut v = report_json(r);
                v["assertion_holds"] = json!(ok);
                entries.insert(label.clone(), v);
            }
            let direction = format!("{:?}", specs[0].1.direction).to_lowercase();
            write_reports(out, &format!("{:?} {direction}", specs[0].1.operator), &runs, global.timings)?;
            let summary = json!({ "runs": entries, "assertion_holds": failures.is_empty() });
            write_json(&out.join("summary.json"), &summary)?;
            println!("{}", serde_json::to_string(&summary).unwrap_or_default());
            if failures.is_empty() {
                Ok(())
            } else {
                Err(CliError::Assertion(format!("convergence assertion failed for {}", failures.join(", "))))
            }
        }
        Plan::Discrimination(spec) => {
            let d = slit_discrimination(&spec, &exec)?;
            let holds = d.delta > 0.0 && d.increasing_match <= 1e-8 && d.decreasing_match <= 1e-8;
            let runs = vec![("increasing".to_string(), d.increasing.clone()), ("decreasing".to_string(), d.decreasing.clone())];
            write_reports(out, &format!("slit discrimination, delta = {:.6}", d.delta), &runs, global.timings)?;
            let summary = json!({
                "delta": d.delta,
                "weak_norm": d.weak_norm,
                "pseudo_norm": d.pseudo_norm,
                "weak_slit_flux": d.weak_slit_flux,
                "pseudo_slit_flux": d.pseudo_slit_flux,
                "increasing_match": d.increasing_match,
                "decreasing_match": d.decreasing_match,
                "runs": { "increasing": report_json(&d.increasing), "decreasing": report_json(&d.decreasing) },
                "assertion_holds": holds,
            });
            write_json(&out.join("summary.json"), &summary)?;
            println!("{}", serde_json::to_string(&summary).unwrap_or_default());
            if holds {
                Ok(())
            } else {
                Err(CliError::Assertion("slit discrimination: limits do not match or delta is zero".into()))
            }
        }
    }
}

/// Per-cell magnitude used for the heat map.
fn cell_magnitudes(field: &AnyField, grid: &Grid) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.cell_count());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            out.push(match field {
                AnyField::Cell(f) => f.get(i, j).abs(),
                AnyField::Vertex(f) => {
                    (f.get(i, j).abs() + f.get(i + 1, j).abs() + f.get(i, j + 1).abs() + f.get(i + 1, j + 1).abs()) / 4.0
                }
                AnyField::Face(f) => {
                    use stokes_perturb_core::Face;
                    let u = (f.get(Face::x(i, j)) + f.get(Face::x(i + 1, j))) / 2.0;
                    let v = (f.get(Face::y(i, j)) + f.get(Face::y(i, j + 1))) / 2.0;
                    u.hypot(v)
                }
            });
        }
    }
    out
}

fn heat_map(mag: &[f64], mask: &DomainMask) -> String {
    let g = mask.grid();
    let px = (512 / g.nx().max(g.ny())).max(1);
    let (w, h) = (px * g.nx(), px * g.ny());
    let max = mag.iter().copied().fold(0.0, f64::max);
    let mut s = format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    s.push('\n');
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let fill = if !mask.contains(i, j) {
                "#808080".to_string()
            } else {
                let t = if max > 0.0 { mag[g.cell_index(i, j)] / max } else { 0.0 };
                let c = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
                format!("#{:02x}{:02x}{:02x}", c(255.0, 8.0), c(255.0, 48.0), c(255.0, 107.0))
            };
            s.push_str(&format!(
                r#"<rect x="{}" y="{}" width="{px}" height="{px}" fill="{fill}"/>"#,
                i * px,
                (g.ny() - 1 - j) * px
            ));
            s.push('\n');
        }
    }
    for f in mask.slits() {
        let [(x0, y0), (x1, y1)] = g.face_vertices(*f);
        s.push_str(&format!(
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="2"/>"#,
            x0 * px,
            (g.ny() - y0) * px,
            x1 * px,
            (g.ny() - y1) * px
        ));
        s.push('\n');
    }
    s.push_str("</svg>\n");
    s
}

fn cmd_dump(global: &Global, a: &DumpArgs) -> Result<()> {
    let mask = domain(&a.domain)?;
    let grid = *mask.grid();
    let field = read_field(&a.field, &grid)?;
    let mut summary = json!({
        "kind": field.kind(),
        "norm": field.norm(),
        "max_abs": field.max_abs(),
    });
    if let AnyField::Face(f) = &field {
        let check = is_in_solenoidal(f, &mask, a.mode)?;
        summary["mode"] = json!(a.mode.name());
        summary["div_defect"] = json!(check.div_defect);
        summary["flux_defect"] = json!(check.flux_defect);
        summary["is_solenoidal"] = json!(check.is_solenoidal);
    }
    let stem = a.field.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "field".into());
    let svg = heat_map(&cell_magnitudes(&field, &grid), &mask);
    write_atomic(&global.out.join(format!("{stem}.svg")), svg.as_bytes())?;
    println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
    Ok(())
}
