//! Warping functions and Ricci curvature of `-dmu^2 + f1^2 dt^2 + f2^2 dOmega^2`.
//!
//! Two independent routes to the curvature: [`ricci_from_frame`] feeds the
//! warping functions and their mu-derivatives into the generic two-fiber
//! warped-product formulas, while [`ricci_closed_form`] evaluates the
//! family's simplified components directly from r.

use serde::Serialize;

use crate::chart::MuChart;
use crate::error::{GeometryError, Result};
use crate::spacetime::SpacetimeParams;

/// Where to evaluate: a radius or a chart coordinate, plus the polar angle
/// used only to reconstitute `R_phiphi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPoint {
    pub position: Position,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Position {
    Radius(f64),
    Mu(f64),
}

impl EvaluationPoint {
    pub fn at_radius(r: f64) -> Self {
        Self {
            position: Position::Radius(r),
            theta: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn at_mu(mu: f64) -> Self {
        Self {
            position: Position::Mu(mu),
            theta: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }
}

/// `f1 = N(r(mu))`, `f2 = r(mu)` and their first two mu-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WarpFrame {
    pub mu: f64,
    pub r: f64,
    pub f1: f64,
    pub f2: f64,
    pub f1_prime: f64,
    pub f2_prime: f64,
    pub f1_pprime: f64,
    pub f2_pprime: f64,
}

/// Nonvanishing Ricci components and the scalar curvature.
///
/// `R_phiphi` is stored divided by `sin^2 theta`; see [`RicciComponents::r_phph`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicciComponents {
    pub r_mumu: f64,
    pub r_tt: f64,
    pub r_thth: f64,
    pub r_phph_over_sin2: f64,
    pub scalar: f64,
}

impl RicciComponents {
    pub fn r_phph(&self, theta: f64) -> f64 {
        let s = theta.sin();
        self.r_phph_over_sin2 * (s * s)
    }

    /// Components in column order `R_mumu, R_tt, R_thth, R_phph/sin^2, R`.
    pub fn as_array(&self) -> [f64; 5] {
        [self.r_mumu, self.r_tt, self.r_thth, self.r_phph_over_sin2, self.scalar]
    }
}

fn interior_radius(params: &SpacetimeParams, r: f64) -> Result<f64> {
    // P = r^2 N^2 is concave, so N^2 > 0 exactly on the open interior.
    let n2 = params.lapse_squared(r)?;
    if !(n2 > 0.0) {
        return Err(GeometryError::Domain {
            quantity: "r",
            value: r,
            domain: format!("interior (N^2 > 0), N^2 = {n2}"),
        });
    }
    Ok(n2)
}

/// Warping functions at a strictly interior point, derivatives from the
/// family identities
/// `f2' = f1`, `f1' = -m/f2^2 + Q^2/f2^3 - lambda f2`,
/// `f1'' = -2 f1 f1'/f2 - Q^2 f1/f2^4 - 3 lambda f1`, `f2'' = f1'`.
pub fn warp_frame(chart: &MuChart, point: EvaluationPoint) -> Result<WarpFrame> {
    let h = chart.horizons();
    let (r, mu) = match point.position {
        Position::Radius(r) => {
            if !h.contains_open(r) {
                return Err(GeometryError::domain("r", r, h.r_minus, h.r_plus, true));
            }
            (r, chart.mu_of_r(r)?)
        }
        Position::Mu(mu) => {
            if !(mu > 0.0 && mu < chart.mu_max()) {
                return Err(GeometryError::domain("mu", mu, 0.0, chart.mu_max(), true));
            }
            (chart.r_of_mu(mu)?, mu)
        }
    };
    let mut frame = identity_frame(chart.params(), r)?;
    frame.mu = mu;
    Ok(frame)
}

/// [`warp_frame`] without a chart; `mu` is left as NaN.
pub fn identity_frame(params: &SpacetimeParams, r: f64) -> Result<WarpFrame> {
    let n2 = interior_radius(params, r)?;
    let (m, q2, lam) = (params.mass(), params.charge_sq(), params.ads_curvature());
    let f1 = n2.sqrt();
    let f2 = r;
    let f1_prime = -m / (f2 * f2) + q2 / (f2 * f2 * f2) - lam * f2;
    let f1_pprime = -2.0 * f1 * f1_prime / f2 - q2 * f1 / (f2 * f2 * f2 * f2) - 3.0 * lam * f1;
    Ok(WarpFrame {
        mu: f64::NAN,
        r,
        f1,
        f2,
        f1_prime,
        f2_prime: f1,
        f1_pprime,
        f2_pprime: f1_prime,
    })
}

/// Generic two-fiber warped-product Ricci tensor:
///
/// ```text
/// R_mumu = -f1''/f1 - 2 f2''/f2
/// R_tt   = 2 f1 f1' f2'/f2 + f1 f1''
/// R_thth = f1' f2 f2'/f1 + f2 f2'' + f2'^2 + 1
/// R_phph = R_thth sin^2 theta
/// ```
pub fn ricci_from_frame(frame: &WarpFrame) -> Result<RicciComponents> {
    let WarpFrame {
        f1,
        f2,
        f1_prime,
        f2_prime,
        f1_pprime,
        f2_pprime,
        ..
    } = *frame;
    if f1 == 0.0 || f2 == 0.0 || !f1.is_finite() || !f2.is_finite() {
        return Err(GeometryError::SingularFrame(format!("f1 = {f1}, f2 = {f2}")));
    }
    let r_mumu = -f1_pprime / f1 - 2.0 * f2_pprime / f2;
    let r_tt = 2.0 * f1 * f1_prime * f2_prime / f2 + f1 * f1_pprime;
    let r_thth = f1_prime * f2 * f2_prime / f1 + f2 * f2_pprime + f2_prime * f2_prime + 1.0;
    let mut out = RicciComponents {
        r_mumu,
        r_tt,
        r_thth,
        r_phph_over_sin2: r_thth,
        scalar: 0.0,
    };
    out.scalar = contract_scalar(&out, f1, f2)?;
    Ok(out)
}

/// Trace against `diag(-1, f1^2, f2^2, f2^2 sin^2 theta)`; theta cancels.
pub fn contract_scalar(components: &RicciComponents, f1: f64, f2: f64) -> Result<f64> {
    if f1 == 0.0 || f2 == 0.0 || !f1.is_finite() || !f2.is_finite() {
        return Err(GeometryError::SingularFrame(format!("f1 = {f1}, f2 = {f2}")));
    }
    let f2_sq = f2 * f2;
    Ok(-components.r_mumu
        + components.r_tt / (f1 * f1)
        + components.r_thth / f2_sq
        + components.r_phph_over_sin2 / f2_sq)
}

/// Family closed forms at a strictly interior radius:
/// `R_mumu = Q^2/r^4 + 3 lambda`, `R_tt = -(Q^2/r^4 + 3 lambda) N^2`,
/// `R_thth = Q^2/r^2 - 3 lambda r^2`, scalar `-12 lambda`.
pub fn ricci_closed_form(params: &SpacetimeParams, r: f64) -> Result<RicciComponents> {
    interior_radius(params, r)?;
    Ok(ricci_closed_form_unchecked(params, r))
}

/// Closed forms with no domain check; finite on and beyond the outer horizon.
pub fn ricci_closed_form_unchecked(params: &SpacetimeParams, r: f64) -> RicciComponents {
    let (q2, lam) = (params.charge_sq(), params.ads_curvature());
    let f1_sq = params.lapse_squared_unchecked(r);
    let r2 = r * r;
    let r4 = r2 * r2;
    let r_mumu = q2 / r4 + 3.0 * lam;
    let r_tt = -q2 * f1_sq / r4 - 3.0 * lam * f1_sq;
    let r_thth = q2 / r2 - 3.0 * lam * r2;
    RicciComponents {
        r_mumu,
        r_tt,
        r_thth,
        r_phph_over_sin2: r_thth,
        // Written so that lambda = 0 gives +0 rather than -0.
        scalar: 0.0 - 12.0 * lam,
    }
}

/// Default finite-difference step as a fraction of `r+ - r-`.
pub const DEFAULT_FD_STEP_FRACTION: f64 = 1e-4;

/// Warping-function derivatives by centred differences in mu.
///
/// Samples `f2 = F^-1(mu)` and `f1 = sqrt(N^2(f2))` at `mu` and `mu +- step`
/// through the chart; no derivative identity is used. `r` needs a margin of
/// `4 * step` from both horizons.
pub fn finite_difference_frame(chart: &MuChart, r: f64, step: f64) -> Result<WarpFrame> {
    let h = chart.horizons();
    let margin = 4.0 * step;
    if !(step > 0.0) || !(r - h.r_minus >= margin && h.r_plus - r >= margin) {
        return Err(GeometryError::Domain {
            quantity: "r",
            value: r,
            domain: format!(
                "[{}, {}] (margin 4 * step = {margin} from the horizons)",
                h.r_minus + margin,
                h.r_plus - margin
            ),
        });
    }
    let mu = chart.mu_of_r(r)?;
    if mu - step <= 0.0 || mu + step >= chart.mu_max() {
        return Err(GeometryError::domain("mu", mu, step, chart.mu_max() - step, true));
    }
    let params = chart.params();
    let sample = |m: f64| -> Result<(f64, f64)> {
        let radius = chart.r_of_mu(m)?;
        // Factored lapse: the expanded polynomial cancels to ~1e-14 near extremality,
        // which the second difference would amplify by 1/step^2.
        let n2 = params.lapse_squared_factored(h, radius)?;
        Ok((n2.max(0.0).sqrt(), radius))
    };
    let (f1_lo, f2_lo) = sample(mu - step)?;
    let (f1_mid, f2_mid) = sample(mu)?;
    let (f1_hi, f2_hi) = sample(mu + step)?;

    let d1 = |lo: f64, hi: f64| (hi - lo) / (2.0 * step);
    let d2 = |lo: f64, mid: f64, hi: f64| (hi - 2.0 * mid + lo) / (step * step);
    Ok(WarpFrame {
        mu,
        r: f2_mid,
        f1: f1_mid,
        f2: f2_mid,
        f1_prime: d1(f1_lo, f1_hi),
        f2_prime: d1(f2_lo, f2_hi),
        f1_pprime: d2(f1_lo, f1_mid, f1_hi),
        f2_pprime: d2(f2_lo, f2_mid, f2_hi),
    })
}

/// One row of a horizon-continuity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub epsilon: f64,
    pub components: RicciComponents,
    /// `|component(r+ - eps) - component(r+)|`, per component.
    pub deviation: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub r_plus: f64,
    /// Closed forms evaluated on the outer horizon itself.
    pub limit: RicciComponents,
    pub rows: Vec<ContinuityRow>,
}

impl ContinuityReport {
    /// Smallest observed convergence order over consecutive rows and
    /// components, ignoring deviations below `floor` (already converged).
    /// `None` when every deviation is below the floor.
    pub fn min_order(&self, floor: f64) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for pair in self.rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            for c in 0..5 {
                if a.deviation[c] <= floor || b.deviation[c] <= floor {
                    continue;
                }
                let order = (a.deviation[c] / b.deviation[c]).ln() / (a.epsilon / b.epsilon).ln();
                worst = Some(worst.map_or(order, |w| w.min(order)));
            }
        }
        worst
    }

    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.deviation)
            .fold(0.0, f64::max)
    }
}

/// Approach the outer horizon from inside along `r+ - eps` and compare the
/// closed-form components with their values on the horizon.
pub fn horizon_continuity_check(params: &SpacetimeParams, epsilons: &[f64]) -> Result<ContinuityReport> {
    let h = params.solve_horizons()?;
    let limit = ricci_closed_form_unchecked(params, h.r_plus);
    let lim = limit.as_array();
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let components = ricci_closed_form(params, h.r_plus - eps)?;
        let vals = components.as_array();
        let mut deviation = [0.0; 5];
        for c in 0..5 {
            deviation[c] = (vals[c] - lim[c]).abs();
        }
        rows.push(ContinuityRow {
            epsilon: eps,
            components,
            deviation,
        });
    }
    Ok(ContinuityReport {
        r_plus: h.r_plus,
        limit,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: f64, q2: f64, lam: f64) -> SpacetimeParams {
        SpacetimeParams::new(m, q2, lam).unwrap()
    }

    fn chart(m: f64, q2: f64, lam: f64) -> MuChart {
        MuChart::with_defaults(&params(m, q2, lam)).unwrap()
    }

    #[test]
    fn rn_frame_at_unit_radius() {
        let c = chart(1.25, 1.0, 0.0);
        let f = warp_frame(&c, EvaluationPoint::at_radius(1.0)).unwrap();
        assert!((f.f1 - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.f2, 1.0);
        assert!((f.f1_prime + 0.25).abs() < 1e-15);
        assert_eq!(f.f2_prime, f.f1);
        assert_eq!(f.f2_pprime, f.f1_prime);
    }

    #[test]
    fn schw_frame_at_unit_radius() {
        let f = identity_frame(&params(1.0, 0.0, 0.0), 1.0).unwrap();
        assert_eq!(f.f1, 1.0);
        assert_eq!(f.f1_prime, -1.0);
        assert_eq!(f.f1_pprime, 2.0);
    }

    #[test]
    fn frame_from_mu_matches_frame_from_r() {
        let c = chart(1.0, 0.25, 0.04);
        let r = 1.1;
        let by_r = warp_frame(&c, EvaluationPoint::at_radius(r)).unwrap();
        let by_mu = warp_frame(&c, EvaluationPoint::at_mu(by_r.mu)).unwrap();
        assert!((by_mu.r - r).abs() < 1e-12);
    }

    #[test]
    fn frame_domain_errors() {
        let c = chart(1.25, 1.0, 0.0);
        assert!(warp_frame(&c, EvaluationPoint::at_radius(2.0)).is_err());
        assert!(warp_frame(&c, EvaluationPoint::at_radius(0.5)).is_err());
        assert!(warp_frame(&c, EvaluationPoint::at_mu(0.0)).is_err());
        assert!(warp_frame(&c, EvaluationPoint::at_mu(c.mu_max())).is_err());
        assert!(ricci_closed_form(c.params(), 2.5).is_err());
    }

    #[test]
    fn generic_formula_direct_substitution() {
        let frame = WarpFrame {
            mu: 0.0,
            r: 1.0,
            f1: 1.0,
            f2: 1.0,
            f1_prime: 0.0,
            f2_prime: 1.0,
            f1_pprime: 0.0,
            f2_pprime: 0.0,
        };
        let ric = ricci_from_frame(&frame).unwrap();
        assert_eq!(ric.r_thth, 2.0);
        assert_eq!(ric.r_mumu, 0.0);
        assert_eq!(ric.r_tt, 0.0);
    }

    #[test]
    fn singular_frame() {
        let frame = WarpFrame {
            mu: 0.0,
            r: 1.0,
            f1: 0.0,
            f2: 1.0,
            f1_prime: 0.0,
            f2_prime: 0.0,
            f1_pprime: 0.0,
            f2_pprime: 0.0,
        };
        assert!(matches!(ricci_from_frame(&frame), Err(GeometryError::SingularFrame(_))));
        let ric = ricci_closed_form(&params(1.25, 1.0, 0.0), 1.0).unwrap();
        assert!(contract_scalar(&ric, 1.0, 0.0).is_err());
    }

    #[test]
    fn rn_closed_form_at_unit_radius() {
        let p = params(1.25, 1.0, 0.0);
        let closed = ricci_closed_form(&p, 1.0).unwrap();
        assert_eq!(closed.r_mumu, 1.0);
        assert_eq!(closed.r_tt, -0.5);
        assert_eq!(closed.r_thth, 1.0);
        assert_eq!(closed.scalar, 0.0);
        let pipe = ricci_from_frame(&identity_frame(&p, 1.0).unwrap()).unwrap();
        for (a, b) in pipe.as_array().iter().zip(closed.as_array()) {
            assert!((a - b).abs() < 1e-14, "{pipe:?} vs {closed:?}");
        }
    }

    #[test]
    fn ads_closed_form_examples() {
        let rnads = ricci_closed_form(&params(1.0, 1.0, 0.01), 1.0);
        // m = 1, Q^2 = 1 with lambda > 0 is naked; use a mass with an interior at r = 1.
        assert!(rnads.is_err());
        let rnads = ricci_closed_form(&params(1.5, 1.0, 0.01), 1.0).unwrap();
        assert!((rnads.r_mumu - 1.03).abs() < 1e-15);
        assert!((rnads.scalar + 0.12).abs() < 1e-15);
        let sads = ricci_closed_form(&params(1.0, 0.0, 0.01), 1.0).unwrap();
        assert!((sads.r_mumu - 0.03).abs() < 1e-15);
        assert!((sads.r_thth + 0.03).abs() < 1e-15);
    }

    #[test]
    fn truncation_is_bitwise() {
        let r = 0.7;
        let sads = params(1.0, 0.0, 0.03);
        let from_full = params(1.0, 0.4, 0.03).without_charge();
        assert_eq!(
            ricci_closed_form(&from_full, r).unwrap(),
            ricci_closed_form(&sads, r).unwrap()
        );
        let rn = params(1.0, 0.4, 0.0);
        let from_full = params(1.0, 0.4, 0.03).without_ads();
        assert_eq!(ricci_closed_form(&from_full, r).unwrap(), ricci_closed_form(&rn, r).unwrap());
    }

    #[test]
    fn phi_component_reconstitution() {
        let ric = ricci_closed_form(&params(1.0, 0.25, 0.04), 0.8).unwrap();
        assert_eq!(ric.r_phph(0.0), 0.0);
        assert_eq!(ric.r_phph(std::f64::consts::FRAC_PI_2), ric.r_thth);
        let s = (std::f64::consts::PI / 6.0).sin();
        assert_eq!(ric.r_phph(std::f64::consts::PI / 6.0), ric.r_thth * (s * s));
    }

    #[test]
    fn fd_margin_violation() {
        let c = chart(1.25, 1.0, 0.0);
        assert!(finite_difference_frame(&c, 1.99, 0.01).is_err());
        assert!(finite_difference_frame(&c, 0.51, 0.01).is_err());
        assert!(finite_difference_frame(&c, 1.25, 0.0).is_err());
    }

    #[test]
    fn continuity_rn_limit() {
        let rep = horizon_continuity_check(&params(1.25, 1.0, 0.0), &[1e-2, 1e-4, 1e-6]).unwrap();
        assert!((rep.limit.r_mumu - 0.0625).abs() < 1e-15);
        assert!(rep.rows[2].deviation[0] < 1e-6);
        assert!(rep.min_order(1e-13).unwrap() > 0.9);
    }

    #[test]
    fn continuity_rnads_scalar_constant() {
        let rep = horizon_continuity_check(&params(1.0, 0.25, 0.01), &[1e-2, 1e-4, 1e-6]).unwrap();
        for row in &rep.rows {
            assert!((row.components.scalar + 0.12).abs() < 1e-12);
        }
    }
}
