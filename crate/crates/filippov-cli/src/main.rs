//! `filippov` command-line tool: scenario runner plus direct subcommands
//! for classification, index computation, singularity search,
//! regularization checks, index-sum checks, and curve export.
//!
//! Exit codes: 0 success (all assertions pass), 1 analysis/assertion
//! failure, 2 scenario or flag validation error.

mod report;
mod spec;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use filippov::field::{
    find_singularities, trace_level_curve, PlanarFilippovField, SearchParams,
};
use filippov::geom::{vec2, Rect, Vec2};
use filippov::regularization::check_invariance;
use filippov::winding::{
    attach_indices, filippov_index_on_ball, sample_curve, verify_perturbation_bounds, ArcSpec,
};

use report::{
    AnalysisRecord, ClassifyDetail, Detail, EmitCurvesDetail, FindDetail, IndexDetail,
    PerturbationDetail, PhDetail, RegCheckDetail, RunReport,
};
use spec::{
    build_field, build_manifold, validate_scenario, AnalysisSpec, DefaultsSpec, FieldSpec,
    ScenarioSpec,
};

#[derive(Parser)]
#[command(
    name = "filippov",
    version,
    about = "Classify and index singularities of planar Filippov vector fields \
             and fields on built-in compact surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_pair(s: &str) -> Result<Pair, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `x,y`, got `{s}`"));
    }
    let x: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Pair(x, y))
}

fn parse_quad(s: &str) -> Result<Quad, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected `x0,y0,x1,y1`, got `{s}`"));
    }
    let mut vals = [0.0f64; 4];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p.trim().parse().map_err(|e| format!("{e}"))?;
    }
    Ok(Quad(vals))
}

fn parse_eps_list(s: &str) -> Result<EpsList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let v: f64 = part.trim().parse().map_err(|e| format!("{e}"))?;
        if v <= 0.0 {
            return Err(format!("epsilon must be positive, got {v}"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("expected at least one epsilon".to_string());
    }
    Ok(EpsList(out))
}

#[derive(Clone, Copy)]
struct Pair(f64, f64);

#[derive(Clone, Copy)]
struct Quad([f64; 4]);

#[derive(Clone)]
struct EpsList(Vec<f64>);

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario file: run each declared analysis, print a
    /// human-readable report, and write report.json (plus CSV curves) to
    /// the output directory.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "filippov-out")]
        out: PathBuf,
    },
    /// Classify a switching-set point of a planar field.
    Classify {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        point: Pair,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Index of the field on a ball.
    Index {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        center: Pair,
        #[arg(long)]
        radius: f64,
    },
    /// Locate singularities in a box and print a table with indices.
    Find {
        #[arg(long)]
        field: PathBuf,
        #[arg(long = "box", value_parser = parse_quad, allow_hyphen_values = true)]
        bounds: Quad,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Compare the corner-based index with the regularized index over an
    /// epsilon ladder and both built-in transition functions.
    RegCheck {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        center: Pair,
        #[arg(long)]
        radius: f64,
        #[arg(long, value_parser = parse_eps_list, allow_hyphen_values = true)]
        eps: Option<EpsList>,
        /// Also export the band edge curves (switch = +-eps) as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Index-sum check of a manifold scenario.
    Ph {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Export the field image curves along the boundary circle as CSV.
    EmitCurves {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        center: Pair,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl std::fmt::Display) -> Failure {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    fn compute(message: impl std::fmt::Display) -> Failure {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Failure::validation(format!("{what} file not found: {}", path.display()))
        } else {
            Failure::validation(format!("cannot read {what} {}: {e}", path.display()))
        }
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn load_field(path: &Path) -> Result<PlanarFilippovField, Failure> {
    let spec: FieldSpec = load_json(path, "field")?;
    build_field(&spec, "field").map_err(Failure::validation)
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Run { scenario, out } => run_scenario(&scenario, &out),
        Command::Classify { field, point, tol } => {
            let z = load_field(&field)?;
            let tol = tol.unwrap_or(filippov::defaults::CLASS_TOL);
            let class = z
                .classify_sigma_point(vec2(point.0, point.1), tol)
                .map_err(Failure::compute)?;
            let body = serde_json::json!({
                "tag": class.tag.to_string(),
                "lie_plus": class.lie_plus,
                "lie_minus": class.lie_minus,
                "class_tol": tol,
            });
            println!("{}", serde_json::to_string(&body).expect("serializable"));
            Ok(0)
        }
        Command::Index {
            field,
            center,
            radius,
        } => {
            let z = load_field(&field)?;
            let result = filippov_index_on_ball(&z, vec2(center.0, center.1), radius)
                .map_err(Failure::compute)?;
            println!("index={} residual={:.1e}", result.index, result.residual);
            Ok(0)
        }
        Command::Find {
            field,
            bounds,
            grid,
        } => {
            let z = load_field(&field)?;
            let [x0, y0, x1, y1] = bounds.0;
            if !(x0 < x1 && y0 < y1) {
                return Err(Failure::validation("box must satisfy x0 < x1 and y0 < y1"));
            }
            let rect = Rect::new(x0, y0, x1, y1);
            if !rect.is_inside(&z.domain) {
                return Err(Failure::validation("box leaves the field domain"));
            }
            let params = SearchParams {
                grid_n: grid.unwrap_or(filippov::defaults::GRID_N),
                ..Default::default()
            };
            let (rows, _) = find_with_indices(&z, rect, &params).map_err(Failure::compute)?;
            println!("{:<20} {:>14} {:>14} {:>7}", "kind", "x", "y", "index");
            for r in &rows {
                let idx = r
                    .index
                    .map(|i| i.to_string())
                    .unwrap_or_else(|| "-".to_string());
                println!("{:<20} {:>14.9} {:>14.9} {:>7}", r.kind, r.x, r.y, idx);
            }
            Ok(0)
        }
        Command::RegCheck {
            field,
            center,
            radius,
            eps,
            out,
        } => {
            let z = load_field(&field)?;
            let eps_list = eps
                .map(|e| e.0)
                .unwrap_or_else(|| filippov::defaults::EPS_LIST.to_vec());
            let center = vec2(center.0, center.1);
            let report =
                check_invariance(&z, center, radius, &eps_list).map_err(Failure::compute)?;
            let record = AnalysisRecord {
                op: "reg_check".to_string(),
                pass: Some(report.invariant),
                error: None,
                detail: Some(Detail::RegCheck(RegCheckDetail {
                    center: [center.x, center.y],
                    radius,
                    integer_tol: filippov::defaults::INTEGER_RESIDUAL_TOL,
                    report: report.clone(),
                })),
            };
            report::print_record(1, &record);
            if let Some(dir) = out {
                export_band_curves(&z, center, radius, &eps_list, &dir)?;
            }
            Ok(if report.invariant { 0 } else { 1 })
        }
        Command::Ph { scenario, grid } => {
            let sc: ScenarioSpec = load_json(&scenario, "scenario")?;
            validate_scenario(&sc).map_err(Failure::validation)?;
            if sc.kind != "manifold" {
                return Err(Failure::validation(
                    "ph requires a manifold scenario (kind = \"manifold\")",
                ));
            }
            let mf = build_manifold(sc.manifold.as_ref().expect("validated"), "manifold")
                .map_err(Failure::validation)?;
            let defaults = DefaultsSpec::effective(&sc.defaults);
            let grid = grid.unwrap_or(defaults.grid);
            let report = mf.poincare_hopf_check(grid).map_err(Failure::compute)?;
            let summary = report.summary_line();
            let record = AnalysisRecord {
                op: "ph".to_string(),
                pass: Some(report.pass),
                error: None,
                detail: Some(Detail::Ph(PhDetail {
                    grid,
                    dedup_tol: filippov::defaults::CHART_DEDUP_TOL,
                    report: report.clone(),
                    summary,
                })),
            };
            report::print_record(1, &record);
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::EmitCurves {
            field,
            center,
            radius,
            out,
        } => {
            let z = load_field(&field)?;
            let center = vec2(center.0, center.1);
            let (files, rows) = write_gamma_curves(&z, center, radius, &out, "")?;
            println!("wrote {} ({} rows each)", files.join(", "), rows);
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared analysis implementations
// ---------------------------------------------------------------------------

fn find_with_indices(
    z: &PlanarFilippovField,
    bounds: Rect,
    params: &SearchParams,
) -> Result<(Vec<report::SingularityRow>, usize), filippov::Error> {
    let singularities = attach_indices(z, &find_singularities(z, bounds, params)?);
    Ok((report::singularity_rows(&singularities), singularities.len()))
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), Failure> {
    let mut body = String::with_capacity(rows.len() * 32 + header.len() + 1);
    body.push_str(header);
    body.push('\n');
    for row in rows {
        body.push_str(row);
        body.push('\n');
    }
    fs::write(path, body)
        .map_err(|e| Failure::compute(format!("cannot write {}: {e}", path.display())))
}

/// Write gamma_plus.csv / gamma_minus.csv: the field image along the
/// boundary arcs on each side of the switching set (full circle for each
/// piece when the boundary does not cross the set).
fn write_gamma_curves(
    z: &PlanarFilippovField,
    center: Vec2,
    radius: f64,
    dir: &Path,
    prefix: &str,
) -> Result<(Vec<String>, usize), Failure> {
    const ROWS: usize = 512;
    fs::create_dir_all(dir)
        .map_err(|e| Failure::compute(format!("cannot create {}: {e}", dir.display())))?;
    let crossings = filippov::winding::boundary_sigma_crossings(z, center, radius)
        .map_err(Failure::compute)?;
    let (plus_arc, minus_arc) = match crossings {
        Some((t_a, t_b)) => {
            let mid = z
                .switch
                .eval(ArcSpec::full_circle(center, radius).point(0.5 * (t_a + t_b)))
                .map_err(Failure::compute)?;
            let tau = std::f64::consts::TAU;
            if mid > 0.0 {
                (
                    ArcSpec { center, radius, t_start: t_a, t_end: t_b },
                    ArcSpec { center, radius, t_start: t_b, t_end: t_a + tau },
                )
            } else {
                (
                    ArcSpec { center, radius, t_start: t_b, t_end: t_a + tau },
                    ArcSpec { center, radius, t_start: t_a + tau, t_end: t_b + tau },
                )
            }
        }
        None => (
            ArcSpec::full_circle(center, radius),
            ArcSpec::full_circle(center, radius),
        ),
    };

    let mut files = Vec::new();
    for (name, field, arc) in [
        ("gamma_plus.csv", &z.f_plus, plus_arc),
        ("gamma_minus.csv", &z.f_minus, minus_arc),
    ] {
        let samples = sample_curve(field, &arc, ROWS - 1).map_err(Failure::compute)?;
        let rows: Vec<String> = samples
            .iter()
            .map(|(t, v)| format!("{t},{},{}", v.x, v.y))
            .collect();
        let file_name = format!("{prefix}{name}");
        write_csv(&dir.join(&file_name), "t,vx,vy", &rows)?;
        files.push(file_name);
    }
    Ok((files, ROWS))
}

/// Export the traced band edges `switch = +-eps` as CSV polylines.
fn export_band_curves(
    z: &PlanarFilippovField,
    center: Vec2,
    radius: f64,
    eps_list: &[f64],
    dir: &Path,
) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::compute(format!("cannot create {}: {e}", dir.display())))?;
    let pad = 2.0 * radius;
    let bounds = Rect::new(
        (center.x - pad).max(z.domain.x0),
        (center.y - pad).max(z.domain.y0),
        (center.x + pad).min(z.domain.x1),
        (center.y + pad).min(z.domain.y1),
    );
    for &eps in eps_list {
        for (side, level) in [("plus", eps), ("minus", -eps)] {
            let polylines =
                trace_level_curve(z, level, bounds, filippov::defaults::GRID_N)
                    .map_err(Failure::compute)?;
            let mut rows = Vec::new();
            for (i, polyline) in polylines.iter().enumerate() {
                if i > 0 {
                    rows.push(String::new()); // blank line separates curves
                }
                rows.extend(polyline.iter().map(|p| format!("{},{}", p.x, p.y)));
            }
            let name = format!("band_{side}_{eps:e}.csv");
            write_csv(&dir.join(name), "x,y", &rows)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scenario runner
// ---------------------------------------------------------------------------

fn run_scenario(path: &Path, out_dir: &Path) -> Result<u8, Failure> {
    let sc: ScenarioSpec = load_json(path, "scenario")?;
    validate_scenario(&sc).map_err(Failure::validation)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| Failure::compute(format!("cannot create {}: {e}", out_dir.display())))?;

    let defaults = DefaultsSpec::effective(&sc.defaults);
    let eps_defaults = DefaultsSpec::eps_list(&sc.defaults);
    let field = match &sc.field {
        Some(fspec) => Some(build_field(fspec, "field").map_err(Failure::validation)?),
        None => None,
    };
    let manifold = match &sc.manifold {
        Some(mspec) => Some(build_manifold(mspec, "manifold").map_err(Failure::validation)?),
        None => None,
    };

    println!("scenario: {}", sc.name);
    let mut results = Vec::new();
    for (k, analysis) in sc.analyses.iter().enumerate() {
        let record = run_analysis(
            analysis,
            field.as_ref(),
            manifold.as_ref(),
            &defaults,
            &eps_defaults,
            out_dir,
            k,
        );
        report::print_record(k + 1, &record);
        results.push(record);
    }

    let all_passed = results
        .iter()
        .all(|r| r.error.is_none() && r.pass != Some(false));
    let run_report = RunReport {
        schema_version: 1,
        scenario: sc.name.clone(),
        results,
        all_passed,
    };
    let json = serde_json::to_string_pretty(&run_report).expect("serializable report");
    let report_path = out_dir.join("report.json");
    fs::write(&report_path, json)
        .map_err(|e| Failure::compute(format!("cannot write {}: {e}", report_path.display())))?;
    println!(
        "result: {} (report at {})",
        if all_passed { "PASS" } else { "FAIL" },
        report_path.display()
    );
    Ok(if all_passed { 0 } else { 1 })
}

fn run_analysis(
    analysis: &AnalysisSpec,
    field: Option<&PlanarFilippovField>,
    manifold: Option<&filippov::manifold::ManifoldField>,
    defaults: &spec::EffectiveDefaults,
    eps_defaults: &[f64],
    out_dir: &Path,
    position: usize,
) -> AnalysisRecord {
    match analysis {
        AnalysisSpec::Classify { point, expect_tag } => {
            let z = field.expect("validated planar scenario");
            match z.classify_sigma_point(vec2(point[0], point[1]), defaults.class_tol) {
                Ok(class) => {
                    let pass = expect_tag
                        .as_ref()
                        .map(|want| *want == class.tag.to_string());
                    AnalysisRecord {
                        op: "classify".to_string(),
                        pass,
                        error: None,
                        detail: Some(Detail::Classify(ClassifyDetail {
                            point: *point,
                            classification: class,
                            class_tol: defaults.class_tol,
                        })),
                    }
                }
                Err(e) => error_record("classify", e),
            }
        }
        AnalysisSpec::Index {
            center,
            radius,
            expect_index,
        } => {
            let z = field.expect("validated planar scenario");
            match filippov_index_on_ball(z, vec2(center[0], center[1]), *radius) {
                Ok(result) => AnalysisRecord {
                    op: "index".to_string(),
                    pass: expect_index.map(|want| want == result.index),
                    error: None,
                    detail: Some(Detail::Index(IndexDetail {
                        center: *center,
                        radius: *radius,
                        index: result.index,
                        residual: result.residual,
                        residual_tol: filippov::defaults::INTEGER_RESIDUAL_TOL,
                    })),
                },
                Err(e) => error_record("index", e),
            }
        }
        AnalysisSpec::Find {
            bounds,
            grid,
            expect_count,
            expect_kinds,
        } => {
            let z = field.expect("validated planar scenario");
            let rect = Rect::new(bounds[0], bounds[1], bounds[2], bounds[3]);
            let params = SearchParams {
                grid_n: grid.unwrap_or(defaults.grid),
                tol: defaults.tol,
                class_tol: defaults.class_tol,
            };
            match find_with_indices(z, rect, &params) {
                Ok((rows, count)) => {
                    let mut pass = None;
                    if let Some(want) = expect_count {
                        pass = Some(*want == count);
                    }
                    if let Some(kinds) = expect_kinds {
                        let mut found: Vec<String> =
                            rows.iter().map(|r| r.kind.clone()).collect();
                        found.sort();
                        let mut wanted = kinds.clone();
                        wanted.sort();
                        let kinds_ok = found == wanted;
                        pass = Some(pass.unwrap_or(true) && kinds_ok);
                    }
                    AnalysisRecord {
                        op: "find".to_string(),
                        pass,
                        error: None,
                        detail: Some(Detail::Find(FindDetail {
                            bounds: *bounds,
                            grid: params.grid_n,
                            tol: params.tol,
                            singularities: rows,
                        })),
                    }
                }
                Err(e) => error_record("find", e),
            }
        }
        AnalysisSpec::RegCheck {
            center,
            radius,
            eps,
            expect_index,
        } => {
            let z = field.expect("validated planar scenario");
            let eps_list = eps.clone().unwrap_or_else(|| eps_defaults.to_vec());
            match check_invariance(z, vec2(center[0], center[1]), *radius, &eps_list) {
                Ok(report) => {
                    let mut pass = report.invariant;
                    if let Some(want) = expect_index {
                        pass = pass && *want == report.filippov_index;
                    }
                    AnalysisRecord {
                        op: "reg_check".to_string(),
                        pass: Some(pass),
                        error: None,
                        detail: Some(Detail::RegCheck(RegCheckDetail {
                            center: *center,
                            radius: *radius,
                            integer_tol: filippov::defaults::INTEGER_RESIDUAL_TOL,
                            report,
                        })),
                    }
                }
                Err(e) => error_record("reg_check", e),
            }
        }
        AnalysisSpec::Perturbation {
            tilde,
            center,
            radius,
            expect_pass,
        } => {
            let z = field.expect("validated planar scenario");
            let z_tilde = match build_field(tilde, "analyses.tilde") {
                Ok(f) => f,
                Err(e) => return error_record("perturbation", e),
            };
            match verify_perturbation_bounds(z, &z_tilde, vec2(center[0], center[1]), *radius) {
                Ok(report) => AnalysisRecord {
                    op: "perturbation".to_string(),
                    pass: expect_pass.map(|want| want == report.all_pass),
                    error: None,
                    detail: Some(Detail::Perturbation(PerturbationDetail {
                        center: *center,
                        radius: *radius,
                        report,
                    })),
                },
                Err(e) => error_record("perturbation", e),
            }
        }
        AnalysisSpec::EmitCurves { center, radius } => {
            let z = field.expect("validated planar scenario");
            let prefix = format!("a{position}_");
            match write_gamma_curves(z, vec2(center[0], center[1]), *radius, out_dir, &prefix) {
                Ok((files, rows)) => AnalysisRecord {
                    op: "emit_curves".to_string(),
                    pass: None,
                    error: None,
                    detail: Some(Detail::EmitCurves(EmitCurvesDetail {
                        files,
                        rows_per_file: rows,
                    })),
                },
                Err(e) => AnalysisRecord {
                    op: "emit_curves".to_string(),
                    pass: Some(false),
                    error: Some(e.message),
                    detail: None,
                },
            }
        }
        AnalysisSpec::Ph {
            grid,
            expect_sum,
            expect_nonempty,
        } => {
            let mf = manifold.expect("validated manifold scenario");
            let grid = grid.unwrap_or(defaults.grid);
            match mf.poincare_hopf_check(grid) {
                Ok(report) => {
                    let mut pass = report.pass;
                    if let Some(want) = expect_sum {
                        pass = pass && *want == report.sum;
                    }
                    if expect_nonempty == &Some(true) {
                        pass = pass && !report.singularities.is_empty();
                    }
                    let summary = report.summary_line();
                    AnalysisRecord {
                        op: "ph".to_string(),
                        pass: Some(pass),
                        error: None,
                        detail: Some(Detail::Ph(PhDetail {
                            grid,
                            dedup_tol: filippov::defaults::CHART_DEDUP_TOL,
                            report,
                            summary,
                        })),
                    }
                }
                Err(e) => error_record("ph", e),
            }
        }
    }
}

fn error_record(op: &str, error: impl std::fmt::Display) -> AnalysisRecord {
    AnalysisRecord {
        op: op.to_string(),
        pass: Some(false),
        error: Some(error.to_string()),
        detail: None,
    }
}
