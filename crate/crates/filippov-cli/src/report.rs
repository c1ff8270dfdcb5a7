//! Machine-readable run reports. Serialization is deterministic: struct
//! field order is fixed and no timestamps are embedded.

use serde::Serialize;

use filippov::field::{SigmaClassification, Singularity};
use filippov::manifold::PoincareHopfReport;
use filippov::regularization::InvarianceReport;
use filippov::winding::PerturbationReport;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario: String,
    pub results: Vec<AnalysisRecord>,
    pub all_passed: bool,
}

#[derive(Debug, Serialize)]
pub struct AnalysisRecord {
    pub op: String,
    /// `None` when the analysis declared no expectation (informational).
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Detail>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Detail {
    Classify(ClassifyDetail),
    Index(IndexDetail),
    Find(FindDetail),
    RegCheck(RegCheckDetail),
    Perturbation(PerturbationDetail),
    EmitCurves(EmitCurvesDetail),
    Ph(PhDetail),
}

#[derive(Debug, Serialize)]
pub struct ClassifyDetail {
    pub point: [f64; 2],
    pub classification: SigmaClassification,
    pub class_tol: f64,
}

#[derive(Debug, Serialize)]
pub struct IndexDetail {
    pub center: [f64; 2],
    pub radius: f64,
    pub index: i64,
    pub residual: f64,
    pub residual_tol: f64,
}

#[derive(Debug, Serialize)]
pub struct SingularityRow {
    pub kind: String,
    pub x: f64,
    pub y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<i64>,
}

#[derive(Debug, Serialize)]
pub struct FindDetail {
    pub bounds: [f64; 4],
    pub grid: usize,
    pub tol: f64,
    pub singularities: Vec<SingularityRow>,
}

#[derive(Debug, Serialize)]
pub struct RegCheckDetail {
    pub center: [f64; 2],
    pub radius: f64,
    pub integer_tol: f64,
    pub report: InvarianceReport,
}

#[derive(Debug, Serialize)]
pub struct PerturbationDetail {
    pub center: [f64; 2],
    pub radius: f64,
    pub report: PerturbationReport,
}

#[derive(Debug, Serialize)]
pub struct EmitCurvesDetail {
    pub files: Vec<String>,
    pub rows_per_file: usize,
}

#[derive(Debug, Serialize)]
pub struct PhDetail {
    pub grid: usize,
    pub dedup_tol: f64,
    pub report: PoincareHopfReport,
    pub summary: String,
}

pub fn singularity_rows(list: &[Singularity]) -> Vec<SingularityRow> {
    list.iter()
        .map(|s| SingularityRow {
            kind: s.kind.to_string(),
            x: s.location.x,
            y: s.location.y,
            index: s.index,
        })
        .collect()
}

/// Human-readable rendering of one record, mirroring the JSON content.
pub fn print_record(number: usize, record: &AnalysisRecord) {
    let status = match record.pass {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "info",
    };
    if let Some(err) = &record.error {
        println!("[{number}] {} ERROR: {err}", record.op);
        return;
    }
    match &record.detail {
        Some(Detail::Classify(d)) => {
            println!(
                "[{number}] classify point=({}, {}) -> {} (lie+ = {}, lie- = {}) [tol {:.1e}] {status}",
                d.point[0],
                d.point[1],
                d.classification.tag,
                d.classification.lie_plus,
                d.classification.lie_minus,
                d.class_tol
            );
        }
        Some(Detail::Index(d)) => {
            println!(
                "[{number}] index center=({}, {}) r={} -> index={} residual={:.1e} [tol {:.1e}] {status}",
                d.center[0], d.center[1], d.radius, d.index, d.residual, d.residual_tol
            );
        }
        Some(Detail::Find(d)) => {
            println!(
                "[{number}] find box={:?} grid={} [residual tol {:.1e}] -> {} singularities {status}",
                d.bounds,
                d.grid,
                d.tol,
                d.singularities.len()
            );
            for s in &d.singularities {
                let idx = s
                    .index
                    .map(|i| i.to_string())
                    .unwrap_or_else(|| "-".to_string());
                println!("      {:<20} ({:.9}, {:.9})  index {}", s.kind, s.x, s.y, idx);
            }
        }
        Some(Detail::RegCheck(d)) => {
            println!(
                "[{number}] reg-check center=({}, {}) r={} -> corner index {} [integer tol {:.1e}] {status}",
                d.center[0], d.center[1], d.radius, d.report.filippov_index, d.integer_tol
            );
            for e in &d.report.entries {
                match e.index {
                    Some(idx) => println!(
                        "      phi={:<14} eps={:<8} (used {:<8}) -> {}",
                        e.phi, e.epsilon, e.epsilon_used, idx
                    ),
                    None => println!(
                        "      phi={:<14} eps={:<8} -> error: {}",
                        e.phi,
                        e.epsilon,
                        e.error.as_deref().unwrap_or("unknown")
                    ),
                }
            }
            println!(
                "      invariant: {}",
                if d.report.invariant { "yes" } else { "NO" }
            );
        }
        Some(Detail::Perturbation(d)) => {
            println!(
                "[{number}] perturbation center=({}, {}) r={} -> {} {status}",
                d.center[0],
                d.center[1],
                d.radius,
                if d.report.all_pass {
                    "all hypotheses hold"
                } else {
                    "hypothesis violated"
                }
            );
            for b in &d.report.bullets {
                let margin = b
                    .worst_margin
                    .map(|m| format!("{m:.3e}"))
                    .unwrap_or_else(|| "n/a".to_string());
                println!(
                    "      {:<55} {} (worst margin {margin}, {} samples)",
                    b.name,
                    if b.pass { "ok" } else { "VIOLATED" },
                    b.samples
                );
            }
        }
        Some(Detail::EmitCurves(d)) => {
            println!(
                "[{number}] emit-curves -> {} ({} rows each)",
                d.files.join(", "),
                d.rows_per_file
            );
        }
        Some(Detail::Ph(d)) => {
            println!(
                "[{number}] ph grid={} [dedup tol {:.1e}] {status}",
                d.grid, d.dedup_tol
            );
            for s in &d.report.singularities {
                println!(
                    "      chart {:<8} ({:.9}, {:.9})  {:<20} index {}  seen in {}",
                    s.chart,
                    s.location.x,
                    s.location.y,
                    s.kind.to_string(),
                    s.index,
                    s.charts_seen.join("+")
                );
            }
            for note in &d.report.inconclusive {
                println!("      inconclusive: {note}");
            }
            println!("      {}", d.summary);
        }
        None => println!("[{number}] {} {status}", record.op),
    }
}
