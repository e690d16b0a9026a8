//! The interior chart mu = F(r) = integral of dr / N from the inner horizon.
//!
//! Writing `r^2 N^2 = (r+ - r)(r - r-) g(r)` with
//! `g(r) = lambda r^2 + lambda (r+ + r-) r + 1 + lambda (r+^2 + r+ r- + r-^2)`,
//! the substitution `r = r- + (r+ - r-) sin^2(phi/2)`, `phi in [0, pi]`,
//! cancels both inverse-square-root endpoint factors and leaves the smooth
//! integrand `dmu/dphi = r / sqrt(g(r))`. Every quadrature and inversion in
//! this module works in `phi`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::quadrature::integrate;
use crate::roots::{newton_bisect, MAX_ITERATIONS};
use crate::spacetime::{HorizonData, SpacetimeParams};

/// Default number of tabulated nodes.
pub const DEFAULT_SAMPLES: usize = 512;
/// Smallest table a chart may be built with.
pub const MIN_SAMPLES: usize = 16;
/// Version tag written into exported chart files.
pub const CHART_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartTolerances {
    /// Relative tolerance of each adaptive quadrature.
    pub quadrature: f64,
    /// Bound on `|F(F^-1(mu)) - mu| / max(1, mu_max)`.
    pub inversion: f64,
}

impl Default for ChartTolerances {
    fn default() -> Self {
        Self {
            quadrature: 1e-10,
            inversion: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    angle: f64,
    r: f64,
    mu: f64,
}

/// Tabulated monotone map between r and mu on `[r-, r+]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuChart {
    params: SpacetimeParams,
    horizons: HorizonData,
    tolerances: ChartTolerances,
    nodes: Vec<Node>,
    mu_max: f64,
    // Constant term of g(r).
    g0: f64,
}

/// Chebyshev-spaced node angles in [0, pi]; dense near both horizons.
fn node_angle(k: usize, n: usize) -> f64 {
    0.5 * PI * (1.0 - (PI * k as f64 / (n - 1) as f64).cos())
}

impl MuChart {
    pub fn build(params: &SpacetimeParams, samples: usize, tolerances: ChartTolerances) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(GeometryError::InvalidChart(format!(
                "{samples} samples requested, at least {MIN_SAMPLES} required"
            )));
        }
        check_tolerances(&tolerances)?;
        let horizons = params.solve_horizons()?;
        let mut chart = Self::skeleton(*params, horizons, tolerances);

        let mut mu = 0.0;
        let mut prev = 0.0;
        chart.nodes.reserve(samples);
        for k in 0..samples {
            let angle = node_angle(k, samples);
            if k > 0 {
                mu += chart.integral(prev, angle)?;
            }
            chart.nodes.push(Node {
                angle,
                r: chart.radius_at(angle),
                mu,
            });
            prev = angle;
        }
        chart.mu_max = mu;
        Ok(chart)
    }

    pub fn with_defaults(params: &SpacetimeParams) -> Result<Self> {
        Self::build(params, DEFAULT_SAMPLES, ChartTolerances::default())
    }

    fn skeleton(params: SpacetimeParams, horizons: HorizonData, tolerances: ChartTolerances) -> Self {
        let lam = params.ads_curvature();
        let (rm, rp) = (horizons.r_minus, horizons.r_plus);
        Self {
            params,
            horizons,
            tolerances,
            nodes: Vec::new(),
            mu_max: 0.0,
            g0: 1.0 + lam * (rp * rp + rp * rm + rm * rm),
        }
    }

    pub fn params(&self) -> &SpacetimeParams {
        &self.params
    }

    pub fn horizons(&self) -> &HorizonData {
        &self.horizons
    }

    pub fn tolerances(&self) -> ChartTolerances {
        self.tolerances
    }

    /// `F(r+)`, the proper extent of the interior.
    pub fn mu_max(&self) -> f64 {
        self.mu_max
    }

    pub fn samples(&self) -> usize {
        self.nodes.len()
    }

    /// Tabulated `(r, mu)` pairs from `r-` to `r+`.
    pub fn table(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().map(|n| (n.r, n.mu))
    }

    /// Radius at chart angle `phi`; exact at both ends.
    fn radius_at(&self, angle: f64) -> f64 {
        let h = &self.horizons;
        if angle <= 0.0 {
            h.r_minus
        } else if angle >= PI {
            h.r_plus
        } else if angle <= 0.5 * PI {
            let s = (0.5 * angle).sin();
            h.r_minus + h.gap * s * s
        } else {
            let c = (0.5 * angle).cos();
            h.r_plus - h.gap * c * c
        }
    }

    /// Chart angle of radius `r`, computed from whichever horizon is nearer.
    fn angle_of(&self, r: f64) -> f64 {
        let h = &self.horizons;
        let below = r - h.r_minus;
        if below <= 0.5 * h.gap {
            2.0 * (below / h.gap).max(0.0).sqrt().min(1.0).asin()
        } else {
            PI - 2.0 * ((h.r_plus - r) / h.gap).max(0.0).sqrt().min(1.0).asin()
        }
    }

    /// `dmu/dphi`.
    fn integrand(&self, angle: f64) -> f64 {
        let r = self.radius_at(angle);
        let lam = self.params.ads_curvature();
        if lam == 0.0 {
            return r;
        }
        let h = &self.horizons;
        let g = lam * r * r + lam * (h.r_plus + h.r_minus) * r + self.g0;
        r / g.sqrt()
    }

    fn integral(&self, from: f64, to: f64) -> Result<f64> {
        Ok(integrate(|a| self.integrand(a), from, to, 0.0, self.tolerances.quadrature)?.value)
    }

    /// Index of the table panel `[nodes[k], nodes[k+1]]` holding `angle`.
    fn panel_of_angle(&self, angle: f64) -> usize {
        let k = self.nodes.partition_point(|n| n.angle <= angle);
        k.saturating_sub(1).min(self.nodes.len() - 2)
    }

    fn mu_at_angle(&self, angle: f64) -> Result<f64> {
        let k = self.panel_of_angle(angle);
        let node = &self.nodes[k];
        if angle == node.angle {
            return Ok(node.mu);
        }
        Ok(node.mu + self.integral(node.angle, angle)?)
    }

    /// `F(r)`; zero at `r-` and `mu_max` at `r+`.
    pub fn mu_of_r(&self, r: f64) -> Result<f64> {
        let h = &self.horizons;
        if !h.contains_closed(r) {
            return Err(GeometryError::domain("r", r, h.r_minus, h.r_plus, false));
        }
        if r == h.r_minus {
            return Ok(0.0);
        }
        if r == h.r_plus {
            return Ok(self.mu_max);
        }
        self.mu_at_angle(self.angle_of(r))
    }

    /// `dF/dr = 1/N(r)` at an interior radius.
    pub fn mu_derivative(&self, r: f64) -> Result<f64> {
        let h = &self.horizons;
        if !h.contains_open(r) {
            return Err(GeometryError::domain("r", r, h.r_minus, h.r_plus, true));
        }
        Ok(self.params.lapse_squared(r)?.sqrt().recip())
    }

    /// `F^-1(mu)`: the unique radius with `F(r) = mu`.
    ///
    /// The table brackets the solution in one panel, where Newton iteration on
    /// the chart angle (derivative `dmu/dphi`) is run to full precision with a
    /// bisection safeguard.
    pub fn r_of_mu(&self, mu: f64) -> Result<f64> {
        if !(mu >= 0.0 && mu <= self.mu_max) {
            return Err(GeometryError::domain("mu", mu, 0.0, self.mu_max, false));
        }
        if mu == 0.0 {
            return Ok(self.horizons.r_minus);
        }
        if mu == self.mu_max {
            return Ok(self.horizons.r_plus);
        }
        let k = self.nodes.partition_point(|n| n.mu <= mu).saturating_sub(1);
        let k = k.min(self.nodes.len() - 2);
        let (lo, hi) = (self.nodes[k], self.nodes[k + 1]);
        if mu == lo.mu {
            return Ok(lo.r);
        }

        let residual = |angle: f64| -> Result<f64> { Ok(lo.mu + self.integral(lo.angle, angle)? - mu) };
        if residual(hi.angle)? <= 0.0 {
            // mu within rounding of the upper node.
            return Ok(hi.r);
        }

        let mut failure = None;
        let angle = newton_bisect(
            |a| match residual(a) {
                Ok(v) => (v, self.integrand(a)),
                Err(e) => {
                    failure.get_or_insert(e);
                    (0.0, 1.0)
                }
            },
            lo.angle,
            hi.angle,
            0.0,
            MAX_ITERATIONS,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let r = self.radius_at(angle);

        let achieved = (self.mu_at_angle(angle)? - mu).abs();
        if achieved > self.tolerances.inversion * self.mu_max.max(1.0) {
            return Err(GeometryError::NoConvergence {
                what: "chart inversion",
                iterations: MAX_ITERATIONS,
            });
        }
        Ok(r)
    }

    pub fn to_file(&self) -> ChartFile {
        ChartFile {
            version: CHART_FORMAT_VERSION,
            params: self.params,
            horizons: self.horizons,
            mu_max: self.mu_max,
            tolerances: self.tolerances,
            table: self.nodes.iter().map(|n| [n.r, n.mu]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("chart serializes")
    }

    /// Rebuild a chart from an exported file.
    ///
    /// The horizons are re-solved from the stored parameters and must match
    /// bit-for-bit; node angles follow from the table length.
    pub fn from_file(file: ChartFile) -> Result<Self> {
        if file.version != CHART_FORMAT_VERSION {
            return Err(GeometryError::InvalidChart(format!(
                "unsupported chart version {} (expected {CHART_FORMAT_VERSION})",
                file.version
            )));
        }
        check_tolerances(&file.tolerances)?;
        let horizons = file.params.solve_horizons()?;
        if horizons != file.horizons {
            return Err(GeometryError::InvalidChart(
                "stored horizons do not match the stored parameters".into(),
            ));
        }
        let n = file.table.len();
        if n < MIN_SAMPLES {
            return Err(GeometryError::InvalidChart(format!("table has {n} rows, need {MIN_SAMPLES}")));
        }
        let mut chart = Self::skeleton(file.params, horizons, file.tolerances);
        for (k, [r, mu]) in file.table.iter().copied().enumerate() {
            let angle = node_angle(k, n);
            let expected = chart.radius_at(angle);
            if (r - expected).abs() > 1e-12 * horizons.r_plus {
                return Err(GeometryError::InvalidChart(format!(
                    "row {k}: r = {r} is not on the node grid (expected {expected})"
                )));
            }
            if k == 0 && mu != 0.0 {
                return Err(GeometryError::InvalidChart("first row must have mu = 0".into()));
            }
            if k > 0 && !(mu > chart.nodes[k - 1].mu) {
                return Err(GeometryError::InvalidChart(format!("mu is not increasing at row {k}")));
            }
            chart.nodes.push(Node { angle, r, mu });
        }
        let last = chart.nodes[n - 1].mu;
        if last != file.mu_max {
            return Err(GeometryError::InvalidChart(format!(
                "mu_max {} disagrees with the last table row {last}",
                file.mu_max
            )));
        }
        chart.mu_max = last;
        Ok(chart)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChartFile =
            serde_json::from_str(text).map_err(|e| GeometryError::InvalidChart(e.to_string()))?;
        Self::from_file(file)
    }
}

fn check_tolerances(t: &ChartTolerances) -> Result<()> {
    if !(t.quadrature > 0.0 && t.inversion > 0.0) || !t.quadrature.is_finite() || !t.inversion.is_finite() {
        return Err(GeometryError::InvalidChart(format!(
            "tolerances must be positive and finite ({t:?})"
        )));
    }
    Ok(())
}

/// On-disk chart: `{version, params, horizons, mu_max, tolerances, table: [[r, mu], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartFile {
    pub version: u32,
    pub params: SpacetimeParams,
    pub horizons: HorizonData,
    pub mu_max: f64,
    pub tolerances: ChartTolerances,
    pub table: Vec<[f64; 2]>,
}

/// Closed-form RN chart, `2m acos(sqrt((r+ - r)/(r+ - r-))) - sqrt((r+ - r)(r - r-))`.
///
/// Zero at `r-` and `m pi` at `r+`. It differentiates to `r / sqrt((r+ - r)(r - r-))`.
pub fn rn_mu_analytic(mass: f64, r_plus: f64, r_minus: f64, r: f64) -> Result<f64> {
    if !(r >= r_minus && r <= r_plus) {
        return Err(GeometryError::domain("r", r, r_minus, r_plus, false));
    }
    let gap = r_plus - r_minus;
    let above = (r_plus - r) / gap;
    Ok(2.0 * mass * above.sqrt().acos() - ((r_plus - r) * (r - r_minus)).sqrt())
}

/// The RN antiderivative with the arccos argument left unrooted,
/// `2m acos((r+ - r)/(r+ - r-)) - sqrt((r+ - r)(r - r-))`.
///
/// It has the same endpoint values as [`rn_mu_analytic`] but its derivative
/// is not `dr/N`, so it does not describe the chart. Kept as a negative
/// control for the quadrature.
pub fn rn_mu_unrooted(mass: f64, r_plus: f64, r_minus: f64, r: f64) -> Result<f64> {
    if !(r >= r_minus && r <= r_plus) {
        return Err(GeometryError::domain("r", r, r_minus, r_plus, false));
    }
    let gap = r_plus - r_minus;
    Ok(2.0 * mass * ((r_plus - r) / gap).acos() - ((r_plus - r) * (r - r_minus)).sqrt())
}
