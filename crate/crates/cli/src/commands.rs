use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use rnads_core::validation::{check_spec, interior_grid, rel_or_abs, PIPELINE_ABS, PIPELINE_REL};
use rnads_core::{
    ricci_closed_form, ricci_from_frame, run_suite, warp_frame, EvaluationPoint, Family, GeometryError, HorizonData,
    RicciComponents, SpacetimeParams,
};
use serde::Serialize;

use crate::args::{ChartArgs, CurvatureArgs, Drop, Format, HorizonsArgs, LimitsArgs, Route, VerifyArgs};
use crate::cache;
use crate::output::{csv_row, emit, json};

const PIPELINE_CHECK: &str = "ricci-pipeline-closed-form";

pub const CURVATURE_HEADER: &str = "r,mu,R_mumu,R_tt,R_thth,R_phph_over_sin2,scalar";
pub const CHART_HEADER: &str = "r,mu,lapse_sq";
pub const HORIZONS_HEADER: &str = "family,r_minus,r_plus,gap,extremality_margin";
const COMPONENTS: [&str; 5] = ["R_mumu", "R_tt", "R_thth", "R_phph_over_sin2", "scalar"];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Geometry(GeometryError),
    SelfCheck(String),
    VerifyFailed(usize),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Geometry(_) => 2,
            CliError::SelfCheck(_) => 3,
            CliError::VerifyFailed(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Geometry(e) => write!(f, "{e}"),
            CliError::SelfCheck(msg) => write!(f, "self-check failed: {msg}"),
            CliError::VerifyFailed(n) => write!(f, "verification failed: {n} check(s) did not pass"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Geometry(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CmdResult = Result<(), CliError>;

#[derive(Serialize)]
struct HorizonRecord {
    family: Family,
    #[serde(flatten)]
    horizons: HorizonData,
}

pub fn horizons(args: &HorizonsArgs) -> CmdResult {
    let params = args.params.params()?;
    let h = params.solve_horizons()?;
    let text = match args.out.format {
        Format::Csv => format!(
            "{HORIZONS_HEADER}\n{},{}",
            params.classify(),
            csv_row(&[h.r_minus, h.r_plus, h.gap, h.extremality_margin])
        ),
        Format::Json => json(&HorizonRecord {
            family: params.classify(),
            horizons: h,
        }),
    };
    emit(&text, args.out.output.as_deref())?;
    Ok(())
}

/// `N^2` on a table row: zero on a horizon, infinite at the central singularity.
fn table_lapse(params: &SpacetimeParams, h: &HorizonData, r: f64) -> rnads_core::Result<f64> {
    if r == 0.0 {
        Ok(f64::INFINITY)
    } else if r == h.r_minus || r == h.r_plus {
        Ok(0.0)
    } else {
        params.lapse_squared_factored(h, r)
    }
}

pub fn chart(args: &ChartArgs) -> CmdResult {
    let params = args.params.params()?;
    let chart = cache::load_or_build(&params, args.samples)?;
    let text = match args.out.format {
        Format::Json => chart.to_json(),
        Format::Csv => {
            let mut text = format!("{CHART_HEADER}\n");
            for (r, mu) in chart.table() {
                text.push_str(&csv_row(&[r, mu, table_lapse(&params, chart.horizons(), r)?]));
            }
            text
        }
    };
    emit(&text, args.out.output.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct CurvatureRow {
    r: f64,
    mu: f64,
    #[serde(rename = "R_mumu")]
    r_mumu: f64,
    #[serde(rename = "R_tt")]
    r_tt: f64,
    #[serde(rename = "R_thth")]
    r_thth: f64,
    #[serde(rename = "R_phph_over_sin2")]
    r_phph_over_sin2: f64,
    scalar: f64,
    #[serde(rename = "R_phph", skip_serializing_if = "Option::is_none")]
    r_phph: Option<f64>,
}

#[derive(Serialize)]
struct CurvatureTable {
    family: Family,
    params: SpacetimeParams,
    horizons: HorizonData,
    via: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    rows: Vec<CurvatureRow>,
}

fn overrides(pairs: &[(String, f64)]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut map = BTreeMap::new();
    for (name, value) in pairs {
        if check_spec(name).is_none() {
            return Err(CliError::Usage(format!("unknown check '{name}' in --tol")));
        }
        if !(*value >= 0.0) {
            return Err(CliError::Usage(format!("tolerance for '{name}' must be non-negative")));
        }
        map.insert(name.clone(), *value);
    }
    Ok(map)
}

pub fn curvature(args: &CurvatureArgs) -> CmdResult {
    let params = args.params.params()?;
    let rel = overrides(&args.tolerances)?
        .get(PIPELINE_CHECK)
        .copied()
        .unwrap_or(PIPELINE_REL);
    // The absolute floor at zero targets scales with the relative tolerance.
    let abs = rel * (PIPELINE_ABS / PIPELINE_REL);
    if let Some(theta) = args.theta {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(CliError::Usage(format!("--theta {theta} is outside [0, pi]")));
        }
    }
    let chart = cache::load_or_build(&params, args.samples)?;
    let points: Vec<EvaluationPoint> = match args.at_r {
        Some(r) => vec![EvaluationPoint::at_radius(r)],
        None => interior_grid(0.0, chart.mu_max(), args.grid as usize)
            .into_iter()
            .map(EvaluationPoint::at_mu)
            .collect(),
    };

    let mut rows = Vec::with_capacity(points.len());
    let mut worst = (0.0f64, 0.0f64, "");
    for point in points {
        let frame = warp_frame(&chart, point)?;
        let closed = ricci_closed_form(&params, frame.r)?;
        let ricci = match args.via {
            Route::Closed => closed,
            Route::Pipeline => {
                let generic = ricci_from_frame(&frame)?;
                for (k, (a, b)) in generic.as_array().iter().zip(closed.as_array()).enumerate() {
                    let miss = rel_or_abs(*a, b, rel, abs);
                    if miss > worst.0 {
                        worst = (miss, frame.r, COMPONENTS[k]);
                    }
                }
                generic
            }
        };
        rows.push(curvature_row(frame.r, frame.mu, &ricci, args.theta));
    }

    let text = match args.out.format {
        Format::Csv => {
            let mut text = String::from(CURVATURE_HEADER);
            if args.theta.is_some() {
                text.push_str(",R_phph");
            }
            text.push('\n');
            for row in &rows {
                let mut values = vec![
                    row.r,
                    row.mu,
                    row.r_mumu,
                    row.r_tt,
                    row.r_thth,
                    row.r_phph_over_sin2,
                    row.scalar,
                ];
                values.extend(row.r_phph);
                text.push_str(&csv_row(&values));
            }
            text
        }
        Format::Json => json(&CurvatureTable {
            family: params.classify(),
            params,
            horizons: *chart.horizons(),
            via: match args.via {
                Route::Closed => "closed",
                Route::Pipeline => "pipeline",
            },
            theta: args.theta,
            rows,
        }),
    };
    emit(&text, args.out.output.as_deref())?;

    if worst.0 > rel {
        return Err(CliError::SelfCheck(format!(
            "{} at r = {} misses the closed form by {:e} (tolerance {rel:e})",
            worst.2, worst.1, worst.0
        )));
    }
    Ok(())
}

fn curvature_row(r: f64, mu: f64, ricci: &RicciComponents, theta: Option<f64>) -> CurvatureRow {
    CurvatureRow {
        r,
        mu,
        r_mumu: ricci.r_mumu,
        r_tt: ricci.r_tt,
        r_thth: ricci.r_thth,
        r_phph_over_sin2: ricci.r_phph_over_sin2,
        scalar: ricci.scalar,
        r_phph: theta.map(|t| ricci.r_phph(t)),
    }
}

pub fn verify(args: &VerifyArgs) -> CmdResult {
    let families: BTreeSet<Family> = if args.family.is_empty() {
        Family::ALL.into_iter().collect()
    } else {
        args.family.iter().copied().collect()
    };
    let overrides = overrides(&args.tolerances)?;
    let start = Instant::now();
    let report = run_suite(&families, args.seed, &overrides).map_err(|e| CliError::Usage(e.to_string()))?;
    let elapsed = start.elapsed();
    emit(&report.to_json(), args.output.as_deref())?;

    let failed: Vec<_> = report.failures().collect();
    for f in &failed {
        eprintln!(
            "FAIL {} [{}]: max_error {:e} > tolerance {:e} ({})",
            f.name, f.family, f.max_error, f.tolerance, f.details
        );
    }
    eprintln!(
        "verify: {} results, {} failed, {:.3} s",
        report.results.len(),
        failed.len(),
        elapsed.as_secs_f64()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(failed.len()))
    }
}

#[derive(Serialize)]
struct LimitRow {
    r: f64,
    full: [f64; 5],
    truncated: [f64; 5],
}

#[derive(Serialize)]
struct LimitsTable {
    drop: &'static str,
    full: SpacetimeParams,
    truncated: SpacetimeParams,
    full_family: Family,
    truncated_family: Family,
    components: [&'static str; 5],
    /// Per component, `max |full - truncated|` over the grid.
    max_deviation: [f64; 5],
    rows: Vec<LimitRow>,
}

pub fn limits(args: &LimitsArgs) -> CmdResult {
    let full = args.params.params()?;
    let (truncated, drop) = match args.drop {
        Drop::Charge => (full.without_charge(), "charge"),
        Drop::Lambda => (full.without_ads(), "lambda"),
        Drop::Both => (full.without_charge().without_ads(), "both"),
    };
    let (a, b) = (full.solve_horizons()?, truncated.solve_horizons()?);
    let (lo, hi) = (a.r_minus.max(b.r_minus), a.r_plus.min(b.r_plus));
    if !(hi > lo) {
        return Err(GeometryError::InvalidParams(format!(
            "interiors do not overlap: ({}, {}) and ({}, {})",
            a.r_minus, a.r_plus, b.r_minus, b.r_plus
        ))
        .into());
    }

    let mut rows = Vec::with_capacity(args.grid as usize);
    let mut max_deviation = [0.0f64; 5];
    for r in interior_grid(lo, hi, args.grid as usize) {
        let x = ricci_closed_form(&full, r)?.as_array();
        let y = ricci_closed_form(&truncated, r)?.as_array();
        for c in 0..5 {
            max_deviation[c] = max_deviation[c].max((x[c] - y[c]).abs());
        }
        rows.push(LimitRow {
            r,
            full: x,
            truncated: y,
        });
    }

    let text = match args.out.format {
        Format::Csv => {
            let mut text = String::from("r");
            for prefix in ["full", "truncated"] {
                for c in COMPONENTS {
                    text.push_str(&format!(",{prefix}_{c}"));
                }
            }
            text.push('\n');
            for row in &rows {
                let mut values = vec![row.r];
                values.extend(row.full);
                values.extend(row.truncated);
                text.push_str(&csv_row(&values));
            }
            text
        }
        Format::Json => json(&LimitsTable {
            drop,
            full,
            truncated,
            full_family: full.classify(),
            truncated_family: truncated.classify(),
            components: COMPONENTS,
            max_deviation,
            rows,
        }),
    };
    emit(&text, args.out.output.as_deref())?;

    let summary: Vec<String> = COMPONENTS
        .iter()
        .zip(max_deviation)
        .map(|(c, d)| format!("{c}={d:e}"))
        .collect();
    eprintln!(
        "limits: {} -> {} over r in ({lo}, {hi}); max |full - truncated|: {}",
        full.classify(),
        truncated.classify(),
        summary.join(" ")
    );
    Ok(())
}
