//! Scenario and field file formats, plus validation that turns them into
//! library objects. Validation errors name the offending field.

use serde::Deserialize;

use filippov::field::{PlanarFilippovField, PlanarMap, ScalarField, VectorField};
use filippov::geom::{vec2, Rect, Vec2};
use filippov::manifold::{builtin, Chart, ManifoldField, OverlapProbe};

/// A planar field file: component expressions, switching expression, and
/// the domain rectangle `[x0, y0, x1, y1]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub fplus: [String; 2],
    pub fminus: [String; 2],
    pub switch: String,
    pub domain: [f64; 4],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefaultsSpec {
    pub tol: Option<f64>,
    pub class_tol: Option<f64>,
    pub grid: Option<usize>,
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct EffectiveDefaults {
    pub tol: f64,
    pub class_tol: f64,
    pub grid: usize,
}

impl DefaultsSpec {
    pub fn effective(spec: &Option<DefaultsSpec>) -> EffectiveDefaults {
        let tol = spec
            .as_ref()
            .and_then(|d| d.tol)
            .unwrap_or(filippov::defaults::RESIDUAL_TOL);
        let class_tol = spec
            .as_ref()
            .and_then(|d| d.class_tol)
            .unwrap_or(filippov::defaults::CLASS_TOL);
        let grid = spec
            .as_ref()
            .and_then(|d| d.grid)
            .unwrap_or(filippov::defaults::GRID_N);
        EffectiveDefaults {
            tol,
            class_tol,
            grid,
        }
    }

    pub fn eps_list(spec: &Option<DefaultsSpec>) -> Vec<f64> {
        spec.as_ref()
            .and_then(|d| d.eps.clone())
            .unwrap_or_else(|| filippov::defaults::EPS_LIST.to_vec())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisSpec {
    Classify {
        point: [f64; 2],
        expect_tag: Option<String>,
    },
    Index {
        center: [f64; 2],
        radius: f64,
        expect_index: Option<i64>,
    },
    Find {
        #[serde(rename = "box")]
        bounds: [f64; 4],
        grid: Option<usize>,
        expect_count: Option<usize>,
        expect_kinds: Option<Vec<String>>,
    },
    RegCheck {
        center: [f64; 2],
        radius: f64,
        eps: Option<Vec<f64>>,
        expect_index: Option<i64>,
    },
    Perturbation {
        tilde: FieldSpec,
        center: [f64; 2],
        radius: f64,
        expect_pass: Option<bool>,
    },
    EmitCurves {
        center: [f64; 2],
        radius: f64,
    },
    Ph {
        grid: Option<usize>,
        expect_sum: Option<i64>,
        expect_nonempty: Option<bool>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub name: String,
    pub map_in: [String; 2],
    pub map_out: [String; 2],
    pub domain: [f64; 4],
    pub predicate: Option<String>,
    pub field: FieldSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapSpec {
    pub a: String,
    pub b: String,
    pub samples: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    /// One of: "sphere", "torus_constant", "torus_mixed".
    pub builtin: Option<String>,
    /// Sphere parameters (builtin = "sphere" only).
    pub rotation: Option<f64>,
    pub profile: Option<f64>,
    pub drift: Option<f64>,
    /// Custom atlas, used when `builtin` is absent.
    pub chi: Option<i64>,
    pub periods: Option<[f64; 2]>,
    pub charts: Option<Vec<ChartSpec>>,
    pub overlaps: Option<Vec<OverlapSpec>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub schema_version: u32,
    pub name: String,
    /// "planar" or "manifold".
    pub kind: String,
    pub field: Option<FieldSpec>,
    pub manifold: Option<ManifoldSpec>,
    pub defaults: Option<DefaultsSpec>,
    pub analyses: Vec<AnalysisSpec>,
}

/// Validation failure naming the offending field.
#[derive(Debug)]
pub struct ValidationError(pub String);

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ValidationError {}

fn rect_from(values: [f64; 4], path: &str) -> Result<Rect, ValidationError> {
    let [x0, y0, x1, y1] = values;
    if !(x0 < x1 && y0 < y1) {
        return Err(ValidationError(format!(
            "{path}: domain must satisfy x0 < x1 and y0 < y1, got [{x0}, {y0}, {x1}, {y1}]"
        )));
    }
    Ok(Rect::new(x0, y0, x1, y1))
}

pub fn build_field(spec: &FieldSpec, path: &str) -> Result<PlanarFilippovField, ValidationError> {
    let parse = |src: &str, field: &str| -> Result<_, ValidationError> {
        filippov::expr::parse_scalar(src)
            .map_err(|e| ValidationError(format!("{path}.{field}: {e}")))
    };
    let fplus = VectorField::Exprs(filippov::expr::VectorFieldExpr::new(
        parse(&spec.fplus[0], "fplus[0]")?,
        parse(&spec.fplus[1], "fplus[1]")?,
    ));
    let fminus = VectorField::Exprs(filippov::expr::VectorFieldExpr::new(
        parse(&spec.fminus[0], "fminus[0]")?,
        parse(&spec.fminus[1], "fminus[1]")?,
    ));
    let switch = ScalarField::Expr(parse(&spec.switch, "switch")?);
    let domain = rect_from(spec.domain, &format!("{path}.domain"))?;
    Ok(PlanarFilippovField::new(fplus, fminus, switch, domain))
}

pub fn build_manifold(
    spec: &ManifoldSpec,
    path: &str,
) -> Result<ManifoldField, ValidationError> {
    if let Some(builtin_name) = &spec.builtin {
        return match builtin_name.as_str() {
            "sphere" => Ok(builtin::sphere(
                spec.rotation.unwrap_or(1.0),
                spec.profile.unwrap_or(0.0),
                spec.drift.unwrap_or(0.3),
            )),
            "torus_constant" | "torus" => Ok(builtin::torus_constant()),
            "torus_mixed" => Ok(builtin::torus_mixed()),
            other => Err(ValidationError(format!(
                "{path}.builtin: unknown built-in manifold `{other}` \
                 (expected sphere, torus_constant, or torus_mixed)"
            ))),
        };
    }

    let charts_spec = spec.charts.as_ref().ok_or_else(|| {
        ValidationError(format!("{path}.charts: required for custom manifolds"))
    })?;
    let chi = spec
        .chi
        .ok_or_else(|| ValidationError(format!("{path}.chi: required for custom manifolds")))?;

    let mut charts = Vec::new();
    let mut fields = Vec::new();
    for (i, c) in charts_spec.iter().enumerate() {
        let cpath = format!("{path}.charts[{i}]");
        let parse_map = |exprs: &[String; 2], field: &str| -> Result<PlanarMap, ValidationError> {
            PlanarMap::parse(&exprs[0], &exprs[1])
                .map_err(|e| ValidationError(format!("{cpath}.{field}: {e}")))
        };
        let predicate = match &c.predicate {
            Some(src) => Some(ScalarField::Expr(
                filippov::expr::parse_scalar(src)
                    .map_err(|e| ValidationError(format!("{cpath}.predicate: {e}")))?,
            )),
            None => None,
        };
        charts.push(Chart {
            name: c.name.clone(),
            map_in: parse_map(&c.map_in, "map_in")?,
            map_out: parse_map(&c.map_out, "map_out")?,
            domain: rect_from(c.domain, &format!("{cpath}.domain"))?,
            predicate,
        });
        fields.push(build_field(&c.field, &format!("{cpath}.field"))?);
    }

    let overlaps = spec
        .overlaps
        .as_ref()
        .map(|list| {
            list.iter()
                .map(|o| OverlapProbe {
                    chart_a: o.a.clone(),
                    chart_b: o.b.clone(),
                    samples: o.samples.iter().map(|s| vec2(s[0], s[1])).collect(),
                })
                .collect()
        })
        .unwrap_or_default();

    let mf = ManifoldField {
        charts,
        fields,
        euler_characteristic: chi,
        overlaps,
        periods: spec.periods.map(|p| (p[0], p[1])),
    };
    for o in &mf.overlaps {
        for name in [&o.chart_a, &o.chart_b] {
            mf.chart_index(name).map_err(|_| {
                ValidationError(format!("{path}.overlaps: unknown chart `{name}`"))
            })?;
        }
    }
    Ok(mf)
}

pub fn validate_scenario(spec: &ScenarioSpec) -> Result<(), ValidationError> {
    if spec.schema_version != 1 {
        return Err(ValidationError(format!(
            "schema_version: unsupported version {} (expected 1)",
            spec.schema_version
        )));
    }
    match spec.kind.as_str() {
        "planar" => {
            let field_spec = spec
                .field
                .as_ref()
                .ok_or_else(|| ValidationError("field: required for planar scenarios".into()))?;
            let field = build_field(field_spec, "field")?;
            // Every referenced ball must lie inside the declared domain.
            for (i, a) in spec.analyses.iter().enumerate() {
                let ball = match a {
                    AnalysisSpec::Index { center, radius, .. }
                    | AnalysisSpec::RegCheck { center, radius, .. }
                    | AnalysisSpec::Perturbation { center, radius, .. }
                    | AnalysisSpec::EmitCurves { center, radius } => Some((center, radius)),
                    _ => None,
                };
                if let Some((c, r)) = ball {
                    if !field.domain.contains_ball(Vec2 { x: c[0], y: c[1] }, *r) {
                        return Err(ValidationError(format!(
                            "analyses[{i}]: ball at ({}, {}) with radius {r} leaves the domain",
                            c[0], c[1]
                        )));
                    }
                }
                if let AnalysisSpec::Find { bounds, .. } = a {
                    let b = rect_from(*bounds, &format!("analyses[{i}].box"))?;
                    if !b.is_inside(&field.domain) {
                        return Err(ValidationError(format!(
                            "analyses[{i}].box: search box leaves the domain"
                        )));
                    }
                }
                if matches!(a, AnalysisSpec::Ph { .. }) {
                    return Err(ValidationError(format!(
                        "analyses[{i}]: `ph` requires a manifold scenario"
                    )));
                }
            }
        }
        "manifold" => {
            let mspec = spec.manifold.as_ref().ok_or_else(|| {
                ValidationError("manifold: required for manifold scenarios".into())
            })?;
            build_manifold(mspec, "manifold")?;
            for (i, a) in spec.analyses.iter().enumerate() {
                if !matches!(a, AnalysisSpec::Ph { .. }) {
                    return Err(ValidationError(format!(
                        "analyses[{i}]: only `ph` analyses run on manifold scenarios"
                    )));
                }
            }
        }
        other => {
            return Err(ValidationError(format!(
                "kind: expected \"planar\" or \"manifold\", got \"{other}\""
            )))
        }
    }
    Ok(())
}
