//! Named cross-check suite over randomly sampled family members.
//!
//! Every check reports `max_error` against a tolerance and passes iff
//! `max_error <= tolerance`; failures (including numerical errors raised
//! while checking) are recorded as data. All defaults live in [`REGISTRY`].

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::chart::{rn_mu_analytic, rn_mu_unrooted, ChartTolerances, MuChart, DEFAULT_SAMPLES};
use crate::error::{GeometryError, Result as GeoResult};
use crate::geometry::{
    finite_difference_frame, horizon_continuity_check, identity_frame, ricci_closed_form, ricci_from_frame,
    warp_frame, EvaluationPoint, RicciComponents, WarpFrame, DEFAULT_FD_STEP_FRACTION,
};
use crate::spacetime::{params_from_horizons, Family, SpacetimeParams};

pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_DRAWS_PER_FAMILY: usize = 16;

/// Interior grid size for scalar and vanishing checks.
const GRID_POINTS: usize = 128;
/// Random interior points per family for the pipeline comparison.
const PIPELINE_POINTS: usize = 64;
/// Random mu values per family for the inversion roundtrip.
const ROUNDTRIP_POINTS: usize = 1000;
/// Finite-difference checks sit at these fractions of `mu_max`.
const FD_MU_FRACTIONS: [f64; 3] = [0.25, 0.5, 0.75];
/// Grid for the analytic RN comparisons.
const RN_GRID_POINTS: usize = 256;
/// Small AdS curvature used for the flat-limit comparisons.
const NEAR_FLAT_LAMBDA: f64 = 1e-8;
/// Observed deviation the unrooted RN antiderivative must reach.
const NEGATIVE_CONTROL_GAP: f64 = 1e-3;
/// Relative tolerance for the pipeline comparison and its absolute
/// counterpart at zero targets.
pub const PIPELINE_REL: f64 = 1e-7;
pub const PIPELINE_ABS: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct CheckSpec {
    pub name: &'static str,
    pub families: &'static [Family],
    pub tolerance: f64,
    pub description: &'static str,
}

const ALL: &[Family] = &Family::ALL;
const ADS_FAMILIES: &[Family] = &[Family::RnAds, Family::SchwAds];

pub const REGISTRY: &[CheckSpec] = &[
    CheckSpec {
        name: "angular-factorization",
        families: ALL,
        tolerance: 0.0,
        description: "R_phiphi(theta) = R_thth sin^2(theta) for theta in {0, pi/6, pi/2}",
    },
    CheckSpec {
        name: "chart-derivative-consistency",
        families: ALL,
        tolerance: 1e-6,
        description: "centred difference of mu(r) equals 1/N(r), relative",
    },
    CheckSpec {
        name: "chart-inversion-roundtrip",
        families: ALL,
        tolerance: 1e-9,
        description: "|F(F^-1(mu)) - mu| / max(1, mu_max) over 1000 random mu",
    },
    CheckSpec {
        name: "chart-limit-consistency",
        families: &[Family::RnAds],
        tolerance: 1e-5,
        description: "chart at 1/l^2 = 1e-8 against the analytic RN chart, pointwise relative",
    },
    CheckSpec {
        name: "chart-monotonicity",
        families: ALL,
        tolerance: 0.0,
        description: "number of non-increasing mu(r) pairs on sorted random radii and on the table",
    },
    CheckSpec {
        name: "chart-rn-analytic-agreement",
        families: &[Family::Rn],
        tolerance: 1e-9,
        description: "max |analytic RN mu - quadrature mu| on a 256-point grid",
    },
    CheckSpec {
        name: "horizon-continuity",
        families: ALL,
        tolerance: 0.1,
        description: "1 - observed order of closed-form convergence at r+ - eps, eps/gap in {1e-2, 1e-4, 1e-6}",
    },
    CheckSpec {
        name: "horizon-param-roundtrip",
        families: ALL,
        tolerance: 1e-10,
        description: "(Q^2, 1/l^2) recovered from (r+, r-, m), relative",
    },
    CheckSpec {
        name: "lapse-factored-agreement",
        families: ALL,
        tolerance: 1e-12,
        description: "|N^2 direct - N^2 factored| / max(1, |N^2|) at interior points",
    },
    CheckSpec {
        name: "ricci-pipeline-closed-form",
        families: ALL,
        tolerance: PIPELINE_REL,
        description: "generic warped-product Ricci vs closed forms at 64 random points (relative; 1e-9 absolute at zero targets)",
    },
    CheckSpec {
        name: "ricci-vanishing",
        families: &[Family::Schw],
        tolerance: 1e-9,
        description: "all Ricci components and the scalar vanish on a 128-point mu grid, absolute",
    },
    CheckSpec {
        name: "rn-boundary-mpi",
        families: &[Family::Rn],
        tolerance: 1e-8,
        description: "|mu_max - m pi| / (m pi)",
    },
    CheckSpec {
        name: "rn-unrooted-form-negative-control",
        families: &[Family::Rn],
        tolerance: 1.0,
        description: "1e-3 / max |unrooted arccos form - quadrature mu|; the unrooted form must miss by >= 1e-3",
    },
    CheckSpec {
        name: "scalar-minus-12-over-l2",
        families: ALL,
        tolerance: 1e-8,
        description: "pipeline scalar curvature equals -12/l^2 on a 128-point mu grid (relative; absolute when l = inf)",
    },
    CheckSpec {
        name: "truncation-commutes",
        families: ADS_FAMILIES,
        tolerance: 0.0,
        description: "closed forms with a parameter zeroed equal the truncated family bit-for-bit",
    },
    CheckSpec {
        name: "truncation-path-consistency",
        families: &[Family::RnAds],
        tolerance: 1e-5,
        description: "RN-AdS at 1/l^2 = 1e-8 reproduces RN tables; charge and both-parameter paths shrink monotonically",
    },
    CheckSpec {
        name: "warp-identity-order",
        families: ALL,
        tolerance: 0.1,
        description: "2 - observed order of the finite-difference derivatives under step halving",
    },
    CheckSpec {
        name: "warp-identity-suite",
        families: ALL,
        tolerance: 1e-6,
        description: "finite-difference warping derivatives at step 1e-4 (r+ - r-) vs the identities, relative",
    },
];

pub fn check_spec(name: &str) -> Option<&'static CheckSpec> {
    REGISTRY.iter().find(|c| c.name == name)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("no families selected")]
    EmptyFamilySet,
    #[error("unknown check '{0}'")]
    UnknownCheck(String),
    #[error("tolerance for '{name}' must be a non-negative number, got {value}")]
    InvalidTolerance { name: String, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub family: Family,
    #[serde(serialize_with = "finite_or_null")]
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub details: String,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledParams {
    pub family: Family,
    pub mass: f64,
    pub charge_sq: f64,
    pub ads_curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub version: u32,
    pub seed: u64,
    pub families: Vec<Family>,
    pub params_sampled: Vec<SampledParams>,
    pub results: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn get(&self, name: &str, family: Family) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.name == name && r.family == family)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub draws_per_family: usize,
    pub chart_samples: usize,
    pub chart_tolerances: ChartTolerances,
    pub tolerance_overrides: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            draws_per_family: DEFAULT_DRAWS_PER_FAMILY,
            chart_samples: DEFAULT_SAMPLES,
            chart_tolerances: ChartTolerances::default(),
            tolerance_overrides: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn tolerance(&self, spec: &CheckSpec) -> f64 {
        self.tolerance_overrides
            .get(spec.name)
            .copied()
            .unwrap_or(spec.tolerance)
    }
}

/// Run every registered check that applies to one of `families`.
pub fn run_suite(
    families: &BTreeSet<Family>,
    seed: u64,
    tolerance_overrides: &BTreeMap<String, f64>,
) -> Result<SuiteReport, ValidationError> {
    let config = SuiteConfig {
        tolerance_overrides: tolerance_overrides.clone(),
        ..SuiteConfig::with_seed(seed)
    };
    run_suite_with(families, &config)
}

pub fn run_suite_with(families: &BTreeSet<Family>, config: &SuiteConfig) -> Result<SuiteReport, ValidationError> {
    if families.is_empty() {
        return Err(ValidationError::EmptyFamilySet);
    }
    for (name, &value) in &config.tolerance_overrides {
        if check_spec(name).is_none() {
            return Err(ValidationError::UnknownCheck(name.clone()));
        }
        if !(value >= 0.0) {
            return Err(ValidationError::InvalidTolerance {
                name: name.clone(),
                value,
            });
        }
    }

    let mut params_sampled = Vec::new();
    let mut results = Vec::new();
    for &family in families {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, family.as_str()));
        let draws = sample_family(family, config.draws_per_family, &mut rng);
        params_sampled.extend(draws.iter().map(|p| SampledParams {
            family,
            mass: p.mass(),
            charge_sq: p.charge_sq(),
            ads_curvature: p.ads_curvature(),
        }));
        let ctx = Context::new(draws, config);
        for spec in REGISTRY.iter().filter(|s| s.families.contains(&family)) {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(mix(config.seed, family.as_str()), spec.name));
            let tolerance = config.tolerance(spec);
            let outcome = ctx.run(spec.name, &mut rng);
            let (max_error, details) = match outcome {
                Ok(v) => v,
                Err(e) => (f64::INFINITY, format!("error: {e}")),
            };
            results.push(CheckResult {
                name: spec.name.to_string(),
                family,
                max_error,
                tolerance,
                passed: max_error <= tolerance,
                details,
            });
        }
    }
    results.sort_by(|a, b| (a.name.as_str(), a.family).cmp(&(b.name.as_str(), b.family)));
    Ok(SuiteReport {
        version: REPORT_FORMAT_VERSION,
        seed: config.seed,
        families: families.iter().copied().collect(),
        params_sampled,
        results,
    })
}

/// FNV-1a over the seed bytes and a label; stable across platforms and releases.
fn mix(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(label.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Largest `Q^2 / m^2` with a horizon at fixed `lambda m^2` (the extremal charge).
pub fn extremal_charge_ratio(lambda_m2: f64) -> f64 {
    let p = SpacetimeParams::new(1.0, 0.0, lambda_m2).expect("valid");
    if lambda_m2 == 0.0 {
        return 1.0;
    }
    // max_r (2r - r^2 - lambda r^4) at m = 1, located on the derivative cubic.
    let r = crate::roots::newton_bisect(
        |r| (2.0 - 2.0 * r - 4.0 * lambda_m2 * r * r * r, -2.0 - 12.0 * lambda_m2 * r * r),
        0.0,
        1.0,
        0.0,
        crate::roots::MAX_ITERATIONS,
    )
    .expect("derivative cubic has a root in [0, 1]");
    p.horizon_polynomial(r).0
}

/// Log-uniform draws: m in [0.5, 2], lambda m^2 in [1e-4, 0.2],
/// Q^2/m^2 in [1e-3, 0.99 * extremal]; extremal or naked draws are rejected.
pub fn sample_family<R: Rng>(family: Family, draws: usize, rng: &mut R) -> Vec<SpacetimeParams> {
    let (charged, ads) = family.parameters();
    let mut out = Vec::with_capacity(draws);
    while out.len() < draws {
        let m = log_uniform(rng, 0.5, 2.0);
        let lambda_m2 = if ads { log_uniform(rng, 1e-4, 0.2) } else { 0.0 };
        let q2_m2 = if charged {
            log_uniform(rng, 1e-3, 0.99 * extremal_charge_ratio(lambda_m2))
        } else {
            0.0
        };
        let Ok(p) = SpacetimeParams::new(m, q2_m2 * m * m, lambda_m2 / (m * m)) else {
            continue;
        };
        if p.solve_horizons().is_ok() {
            out.push(p);
        }
    }
    out
}

/// Error of `actual` against `target`: relative, or absolute scaled by
/// `rel / abs` when the target is exactly zero.
pub fn rel_or_abs(actual: f64, target: f64, rel: f64, abs: f64) -> f64 {
    if target == 0.0 {
        actual.abs() * (rel / abs)
    } else {
        ((actual - target) / target).abs()
    }
}

fn rel_floor_one(actual: f64, target: f64) -> f64 {
    (actual - target).abs() / target.abs().max(1.0)
}

/// `n` equally spaced points strictly inside `(lo, hi)`.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64)
        .collect()
}

fn frame_components(frame: &WarpFrame) -> [f64; 5] {
    [frame.f1, frame.f2_prime, frame.f1_prime, frame.f1_pprime, frame.f2_pprime]
}

type CheckOutcome = GeoResult<(f64, String)>;

struct Context<'a> {
    params: Vec<SpacetimeParams>,
    charts: Vec<GeoResult<MuChart>>,
    config: &'a SuiteConfig,
}

impl<'a> Context<'a> {
    fn new(params: Vec<SpacetimeParams>, config: &'a SuiteConfig) -> Self {
        let charts = params
            .iter()
            .map(|p| MuChart::build(p, config.chart_samples, config.chart_tolerances))
            .collect();
        Self {
            params,
            charts,
            config,
        }
    }

    fn charts(&self) -> GeoResult<Vec<&MuChart>> {
        self.charts
            .iter()
            .map(|c| c.as_ref().map_err(Clone::clone))
            .collect()
    }

    fn build(&self, p: &SpacetimeParams) -> GeoResult<MuChart> {
        MuChart::build(p, self.config.chart_samples, self.config.chart_tolerances)
    }

    fn run(&self, name: &str, rng: &mut ChaCha8Rng) -> CheckOutcome {
        match name {
            "angular-factorization" => self.angular_factorization(),
            "chart-derivative-consistency" => self.chart_derivative(rng),
            "chart-inversion-roundtrip" => self.chart_roundtrip(rng),
            "chart-limit-consistency" => self.chart_limit(),
            "chart-monotonicity" => self.chart_monotonicity(rng),
            "chart-rn-analytic-agreement" => self.rn_analytic(),
            "horizon-continuity" => self.horizon_continuity(),
            "horizon-param-roundtrip" => self.param_roundtrip(),
            "lapse-factored-agreement" => self.lapse_factored(rng),
            "ricci-pipeline-closed-form" => self.pipeline(rng),
            "ricci-vanishing" => self.vanishing(),
            "rn-boundary-mpi" => self.rn_boundary(),
            "rn-unrooted-form-negative-control" => self.negative_control(),
            "scalar-minus-12-over-l2" => self.scalar_constant(),
            "truncation-commutes" => self.truncation_commutes(),
            "truncation-path-consistency" => self.truncation_path(),
            "warp-identity-order" => self.identity_order(),
            "warp-identity-suite" => self.identity_suite(),
            other => unreachable!("check '{other}' is registered but not implemented"),
        }
    }

    fn angular_factorization(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for p in &self.params {
            let h = p.solve_horizons()?;
            for r in interior_grid(h.r_minus, h.r_plus, 16) {
                let frame = identity_frame(p, r)?;
                let ric = ricci_from_frame(&frame)?;
                let generic = frame.f1_prime * frame.f2 * frame.f2_prime / frame.f1
                    + frame.f2 * frame.f2_pprime
                    + frame.f2_prime * frame.f2_prime
                    + 1.0;
                worst = worst.max((ric.r_phph_over_sin2 - ric.r_thth).abs());
                for theta in [0.0, PI / 6.0, FRAC_PI_2] {
                    let s2 = theta.sin() * theta.sin();
                    worst = worst.max((ric.r_phph(theta) - generic * s2).abs());
                }
            }
        }
        Ok((worst, "theta in {0, pi/6, pi/2}, 16 radii per draw".into()))
    }

    fn chart_derivative(&self, rng: &mut ChaCha8Rng) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for chart in self.charts()? {
            let h = chart.horizons();
            let step = 1e-5 * h.gap;
            for _ in 0..32 {
                let r = h.r_minus + h.gap * rng.gen_range(0.05..0.95);
                let fd = (chart.mu_of_r(r + step)? - chart.mu_of_r(r - step)?) / (2.0 * step);
                let exact = chart.mu_derivative(r)?;
                worst = worst.max(((fd - exact) / exact).abs());
            }
        }
        Ok((worst, "32 radii per draw, step 1e-5 (r+ - r-)".into()))
    }

    fn chart_roundtrip(&self, rng: &mut ChaCha8Rng) -> CheckOutcome {
        let charts = self.charts()?;
        let mut worst: f64 = 0.0;
        for i in 0..ROUNDTRIP_POINTS {
            let chart = charts[i % charts.len()];
            let mu = rng.gen_range(0.0..=chart.mu_max());
            let back = chart.mu_of_r(chart.r_of_mu(mu)?)?;
            worst = worst.max((back - mu).abs() / chart.mu_max().max(1.0));
        }
        Ok((worst, format!("{ROUNDTRIP_POINTS} random mu")))
    }

    fn chart_limit(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for p in &self.params {
            let near = SpacetimeParams::new(p.mass(), p.charge_sq(), NEAR_FLAT_LAMBDA)?;
            let chart = self.build(&near)?;
            let rn = p.without_ads().solve_horizons()?;
            let h = chart.horizons();
            for k in 1..RN_GRID_POINTS {
                let t = k as f64 / (RN_GRID_POINTS - 1) as f64;
                let a = chart.mu_of_r((h.r_minus + t * h.gap).min(h.r_plus))?;
                let b = rn_mu_analytic(p.mass(), rn.r_plus, rn.r_minus, (rn.r_minus + t * rn.gap).min(rn.r_plus))?;
                worst = worst.max(((a - b) / b).abs());
            }
        }
        Ok((worst, format!("1/l^2 = {NEAR_FLAT_LAMBDA:e}, matched fractional grid")))
    }

    fn chart_monotonicity(&self, rng: &mut ChaCha8Rng) -> CheckOutcome {
        let mut violations = 0usize;
        for chart in self.charts()? {
            let h = chart.horizons();
            let table: Vec<(f64, f64)> = chart.table().collect();
            violations += table.windows(2).filter(|w| !(w[1].1 > w[0].1)).count();
            let mut rs: Vec<f64> = (0..256)
                .map(|_| h.r_minus + h.gap * rng.gen::<f64>())
                .collect();
            rs.sort_by(f64::total_cmp);
            rs.dedup();
            let mus = rs.iter().map(|&r| chart.mu_of_r(r)).collect::<GeoResult<Vec<_>>>()?;
            violations += mus.windows(2).filter(|w| !(w[1] > w[0])).count();
        }
        Ok((violations as f64, "violations among sorted radii and table rows".into()))
    }

    fn rn_analytic(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for chart in self.charts()? {
            let h = chart.horizons();
            let m = chart.params().mass();
            for k in 0..RN_GRID_POINTS {
                let r = h.r_minus + h.gap * k as f64 / (RN_GRID_POINTS - 1) as f64;
                let r = r.min(h.r_plus);
                let exact = rn_mu_analytic(m, h.r_plus, h.r_minus, r)?;
                worst = worst.max((chart.mu_of_r(r)? - exact).abs());
            }
        }
        Ok((worst, format!("{RN_GRID_POINTS}-point grid, absolute")))
    }

    fn horizon_continuity(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        let mut orders = Vec::new();
        for p in &self.params {
            let h = p.solve_horizons()?;
            let eps: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|e| e * h.gap).collect();
            let report = horizon_continuity_check(p, &eps)?;
            let floor = 1e-13 * report.limit.as_array().iter().fold(1.0_f64, |a, b| a.max(b.abs()));
            if let Some(order) = report.min_order(floor) {
                orders.push(order);
                worst = worst.max(1.0 - order);
            }
        }
        let min = orders.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((
            worst,
            if orders.is_empty() {
                "all deviations below rounding floor".into()
            } else {
                format!("minimum observed order {min:.4}")
            },
        ))
    }

    fn param_roundtrip(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for p in &self.params {
            let h = p.solve_horizons()?;
            let (q2, lam) = params_from_horizons(h.r_plus, h.r_minus, p.mass())?;
            let m2 = p.mass() * p.mass();
            let err_q = if p.charge_sq() == 0.0 { q2.abs() / m2 } else { ((q2 - p.charge_sq()) / p.charge_sq()).abs() };
            let err_l = if p.ads_curvature() == 0.0 {
                lam.abs() * m2
            } else {
                ((lam - p.ads_curvature()) / p.ads_curvature()).abs()
            };
            worst = worst.max(err_q).max(err_l);
        }
        Ok((worst, "relative; Q^2/m^2 and m^2/l^2 absolute at zero".into()))
    }

    fn lapse_factored(&self, rng: &mut ChaCha8Rng) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for p in &self.params {
            let h = p.solve_horizons()?;
            for _ in 0..64 {
                let r = h.r_minus + h.gap * rng.gen_range(0.01..0.99);
                let direct = p.lapse_squared(r)?;
                let factored = p.lapse_squared_factored(&h, r)?;
                worst = worst.max((direct - factored).abs() / direct.abs().max(1.0));
            }
        }
        Ok((worst, "64 radii per draw".into()))
    }

    fn pipeline(&self, rng: &mut ChaCha8Rng) -> CheckOutcome {
        let charts = self.charts()?;
        let mut worst: f64 = 0.0;
        for i in 0..PIPELINE_POINTS {
            let chart = charts[i % charts.len()];
            let mu = chart.mu_max() * rng.gen_range(0.01..0.99);
            let frame = warp_frame(chart, EvaluationPoint::at_mu(mu))?;
            let generic = ricci_from_frame(&frame)?;
            let closed = ricci_closed_form(chart.params(), frame.r)?;
            worst = worst.max(component_error(&generic, &closed, false));
        }
        Ok((worst, format!("{PIPELINE_POINTS} random interior mu, R_mumu R_tt R_thth R_phph")))
    }

    fn vanishing(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for chart in self.charts()? {
            for mu in interior_grid(0.0, chart.mu_max(), GRID_POINTS) {
                let frame = warp_frame(chart, EvaluationPoint::at_mu(mu))?;
                let generic = ricci_from_frame(&frame)?;
                let closed = ricci_closed_form(chart.params(), frame.r)?;
                for v in generic.as_array().into_iter().chain(closed.as_array()) {
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok((worst, "max |component| over both routes on the mu grid, absolute".into()))
    }

    fn rn_boundary(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for chart in self.charts()? {
            let target = chart.params().mass() * PI;
            worst = worst.max(((chart.mu_max() - target) / target).abs());
        }
        Ok((worst, "relative".into()))
    }

    fn negative_control(&self) -> CheckOutcome {
        let mut smallest_miss = f64::INFINITY;
        for chart in self.charts()? {
            let h = chart.horizons();
            let m = chart.params().mass();
            let mut miss: f64 = 0.0;
            for k in 0..RN_GRID_POINTS {
                let r = (h.r_minus + h.gap * k as f64 / (RN_GRID_POINTS - 1) as f64).min(h.r_plus);
                let unrooted = rn_mu_unrooted(m, h.r_plus, h.r_minus, r)?;
                miss = miss.max((unrooted - chart.mu_of_r(r)?).abs());
            }
            smallest_miss = smallest_miss.min(miss);
        }
        Ok((
            NEGATIVE_CONTROL_GAP / smallest_miss,
            format!("smallest per-draw maximum deviation {smallest_miss:.6e}"),
        ))
    }

    fn scalar_constant(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        let mut worst_spread: f64 = 0.0;
        for chart in self.charts()? {
            let lam = chart.params().ads_curvature();
            let target = -12.0 * lam;
            let mut values = Vec::with_capacity(GRID_POINTS);
            for mu in interior_grid(0.0, chart.mu_max(), GRID_POINTS) {
                let s = ricci_from_frame(&warp_frame(chart, EvaluationPoint::at_mu(mu))?)?.scalar;
                let err = if target == 0.0 { s.abs() } else { ((s - target) / target).abs() };
                worst = worst.max(err);
                values.push(s);
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
            worst_spread = worst_spread.max(var.sqrt() / (12.0 * lam).max(1.0));
        }
        Ok((
            worst,
            format!("{GRID_POINTS}-point mu grid, pipeline route; max normalized std dev {worst_spread:.3e}"),
        ))
    }

    fn truncation_commutes(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for p in &self.params {
            let m = p.mass();
            let pairs = [
                (p.without_charge(), SpacetimeParams::new(m, 0.0, p.ads_curvature())?),
                (p.without_ads(), SpacetimeParams::new(m, p.charge_sq(), 0.0)?),
            ];
            for (truncated, direct) in pairs {
                let Ok(h) = direct.solve_horizons() else { continue };
                if truncated.solve_horizons()? != h {
                    worst = f64::INFINITY;
                }
                for r in interior_grid(h.r_minus, h.r_plus, 32) {
                    let a = ricci_closed_form(&truncated, r)?.as_array();
                    let b = ricci_closed_form(&direct, r)?.as_array();
                    for (x, y) in a.iter().zip(b) {
                        if x.to_bits() != y.to_bits() {
                            worst = worst.max((x - y).abs().max(f64::MIN_POSITIVE));
                        }
                    }
                }
            }
        }
        Ok((worst, "bitwise comparison of closed forms and horizons".into()))
    }

    fn truncation_path(&self) -> CheckOutcome {
        let mut lambda_path: f64 = 0.0;
        let mut non_shrinking = 0usize;
        let scales = [1e-4, 1e-6, 1e-8];
        for p in &self.params {
            let m = p.mass();
            let rn = SpacetimeParams::new(m, p.charge_sq(), 0.0)?;
            let sads = SpacetimeParams::new(m, 0.0, p.ads_curvature())?;
            let schw = SpacetimeParams::new(m, 0.0, 0.0)?;
            let paths: [(Box<dyn Fn(f64) -> GeoResult<SpacetimeParams>>, SpacetimeParams); 3] = [
                (Box::new(|s| SpacetimeParams::new(m, p.charge_sq(), p.ads_curvature() * s)), rn),
                (Box::new(|s| SpacetimeParams::new(m, p.charge_sq() * s, p.ads_curvature())), sads),
                (Box::new(|s| SpacetimeParams::new(m, p.charge_sq() * s, p.ads_curvature() * s)), schw),
            ];
            for (i, (path, limit)) in paths.iter().enumerate() {
                let limit_chart = self.build(limit)?;
                let mut devs = Vec::new();
                for &s in &scales {
                    let chart = self.build(&path(s)?)?;
                    devs.push(table_deviation(&chart, &limit_chart)?);
                }
                if devs.windows(2).any(|w| !(w[1] <= w[0])) {
                    non_shrinking += 1;
                }
                if i == 0 {
                    lambda_path = lambda_path.max(*devs.last().expect("three scales"));
                }
            }
        }
        let details = format!(
            "lambda path deviation at scale 1e-8: {lambda_path:.3e}; non-shrinking paths: {non_shrinking}"
        );
        let max_error = if non_shrinking > 0 { f64::INFINITY } else { lambda_path };
        Ok((max_error, details))
    }

    fn identity_suite(&self) -> CheckOutcome {
        let mut worst: f64 = 0.0;
        for chart in self.charts()? {
            let h = chart.horizons();
            let step = DEFAULT_FD_STEP_FRACTION * h.gap;
            for t in FD_MU_FRACTIONS {
                let r = chart.r_of_mu(t * chart.mu_max())?;
                let fd = finite_difference_frame(chart, r, step)?;
                let exact = identity_frame(chart.params(), fd.r)?;
                for (a, b) in frame_components(&fd).iter().zip(frame_components(&exact)) {
                    worst = worst.max(rel_floor_one(*a, b));
                }
            }
        }
        Ok((worst, "mu at 1/4, 1/2, 3/4 of mu_max; |fd - id| / max(1, |id|)".into()))
    }

    fn identity_order(&self) -> CheckOutcome {
        let (coarse, fine) = (4e-3, 2e-3);
        let mut err_coarse = 0.0;
        let mut err_fine = 0.0;
        for chart in self.charts()? {
            let h = chart.horizons();
            for t in FD_MU_FRACTIONS {
                let r = chart.r_of_mu(t * chart.mu_max())?;
                let exact = frame_components(&identity_frame(chart.params(), r)?);
                let a = frame_components(&finite_difference_frame(chart, r, coarse * h.gap)?);
                let b = frame_components(&finite_difference_frame(chart, r, fine * h.gap)?);
                // Derivatives only; f1 itself carries no truncation error.
                for c in 1..5 {
                    err_coarse += (a[c] - exact[c]).abs() / exact[c].abs().max(1.0);
                    err_fine += (b[c] - exact[c]).abs() / exact[c].abs().max(1.0);
                }
            }
        }
        let order = (err_coarse / err_fine).log2();
        Ok((2.0 - order, format!("observed order {order:.4} (steps {coarse} and {fine} of r+ - r-)")))
    }
}

/// Largest component error between two Ricci evaluations; the scalar is
/// included when `with_scalar` is set.
fn component_error(actual: &RicciComponents, target: &RicciComponents, with_scalar: bool) -> f64 {
    let n = if with_scalar { 5 } else { 4 };
    actual.as_array()[..n]
        .iter()
        .zip(&target.as_array()[..n])
        .map(|(a, b)| rel_or_abs(*a, *b, PIPELINE_REL, PIPELINE_ABS) / PIPELINE_REL)
        .fold(0.0, f64::max)
        * PIPELINE_REL
}

/// Max over a matched grid of `|a - b| / max(1, |b|)` for mu and every
/// closed-form curvature column. The grid spans the overlap of both interiors.
pub fn table_deviation(chart: &MuChart, reference: &MuChart) -> GeoResult<f64> {
    let (a, b) = (chart.horizons(), reference.horizons());
    let lo = a.r_minus.max(b.r_minus);
    let hi = a.r_plus.min(b.r_plus);
    if !(hi > lo) {
        return Err(GeometryError::InvalidParams("interiors do not overlap".into()));
    }
    let mut worst: f64 = 0.0;
    for r in interior_grid(lo, hi, 64) {
        let x = ricci_closed_form(chart.params(), r)?.as_array();
        let y = ricci_closed_form(reference.params(), r)?.as_array();
        for (u, v) in x.iter().zip(y) {
            worst = worst.max(rel_floor_one(*u, v));
        }
        worst = worst.max(rel_floor_one(chart.mu_of_r(r)?, reference.mu_of_r(r)?));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique_and_sorted() {
        let names: Vec<_> = REGISTRY.iter().map(|c| c.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
    }

    #[test]
    fn sampling_is_deterministic_and_nonextremal() {
        for family in Family::ALL {
            let a = sample_family(family, 16, &mut ChaCha8Rng::seed_from_u64(9));
            let b = sample_family(family, 16, &mut ChaCha8Rng::seed_from_u64(9));
            assert_eq!(a, b);
            for p in &a {
                assert_eq!(p.classify(), family);
                assert!(p.solve_horizons().is_ok());
            }
        }
    }

    #[test]
    fn extremal_ratio_flat_limit() {
        assert_eq!(extremal_charge_ratio(0.0), 1.0);
        let r = extremal_charge_ratio(0.05);
        assert!(r > 0.0 && r < 1.0);
        let at_cap = SpacetimeParams::new(1.0, r, 0.05).unwrap();
        assert!(at_cap.solve_horizons().is_err());
        let inside = SpacetimeParams::new(1.0, 0.99 * r, 0.05).unwrap();
        assert!(inside.solve_horizons().is_ok());
    }

    #[test]
    fn rejects_bad_config() {
        let none = BTreeSet::new();
        assert_eq!(run_suite(&none, 1, &BTreeMap::new()), Err(ValidationError::EmptyFamilySet));
        let fams: BTreeSet<_> = [Family::Schw].into();
        let mut o = BTreeMap::new();
        o.insert("no-such-check".to_string(), 1.0);
        assert!(matches!(run_suite(&fams, 1, &o), Err(ValidationError::UnknownCheck(_))));
        let mut o = BTreeMap::new();
        o.insert("rn-boundary-mpi".to_string(), -1.0);
        assert!(matches!(run_suite(&fams, 1, &o), Err(ValidationError::InvalidTolerance { .. })));
    }

    #[test]
    fn rel_or_abs_switches_at_zero() {
        assert_eq!(rel_or_abs(2.0, 1.0, 1e-7, 1e-9), 1.0);
        assert!((rel_or_abs(1e-9, 0.0, 1e-7, 1e-9) - 1e-7).abs() < 1e-22);
    }
}
