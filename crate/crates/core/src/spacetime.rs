//! Black-hole parameters, family classification, horizons and the lapse.
//!
//! The AdS scale enters only through `ads_curvature = 1/l^2`, so the
//! asymptotically flat limit l -> infinity is the ordinary value zero.
//! Geometric units (G = c = 1) throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::roots::{newton_bisect, MAX_ITERATIONS};

/// Normalized lapse maximum `max P / m^2` below which the horizons are
/// treated as coincident.
pub const EXTREMALITY_THRESHOLD: f64 = 1e-12;

/// Mass, squared charge and AdS curvature of an RN-AdS family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SpacetimeParams {
    mass: f64,
    charge_sq: f64,
    ads_curvature: f64,
}

#[derive(Deserialize)]
struct RawParams {
    mass: f64,
    charge_sq: f64,
    ads_curvature: f64,
}

impl TryFrom<RawParams> for SpacetimeParams {
    type Error = GeometryError;

    fn try_from(raw: RawParams) -> Result<Self> {
        SpacetimeParams::new(raw.mass, raw.charge_sq, raw.ads_curvature)
    }
}

impl SpacetimeParams {
    pub fn new(mass: f64, charge_sq: f64, ads_curvature: f64) -> Result<Self> {
        if !(mass.is_finite() && charge_sq.is_finite() && ads_curvature.is_finite()) {
            return Err(GeometryError::InvalidParams(format!(
                "parameters must be finite (m = {mass}, Q^2 = {charge_sq}, lambda = {ads_curvature})"
            )));
        }
        if charge_sq < 0.0 {
            return Err(GeometryError::InvalidParams(format!("Q^2 = {charge_sq} is negative")));
        }
        if ads_curvature < 0.0 {
            return Err(GeometryError::InvalidParams(format!(
                "lambda = 1/l^2 = {ads_curvature} is negative (de Sitter is not supported)"
            )));
        }
        if mass <= 0.0 {
            return Err(GeometryError::SchemeInapplicable(format!(
                "mass {mass} is not positive; the lapse is negative definite and there is no interior"
            )));
        }
        Ok(Self {
            mass,
            charge_sq,
            ads_curvature,
        })
    }

    /// Build from the charge `Q` and AdS radius `l` (`f64::INFINITY` for no
    /// cosmological constant).
    pub fn from_charge_and_radius(mass: f64, charge: f64, ads_radius: f64) -> Result<Self> {
        if !(ads_radius > 0.0) {
            return Err(GeometryError::InvalidParams(format!(
                "AdS radius {ads_radius} must be positive"
            )));
        }
        let lambda = if ads_radius.is_infinite() {
            0.0
        } else {
            1.0 / (ads_radius * ads_radius)
        };
        Self::new(mass, charge * charge, lambda)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn charge_sq(&self) -> f64 {
        self.charge_sq
    }

    /// `1/l^2`; zero for asymptotically flat members.
    pub fn ads_curvature(&self) -> f64 {
        self.ads_curvature
    }

    pub fn ads_radius(&self) -> f64 {
        if self.ads_curvature == 0.0 {
            f64::INFINITY
        } else {
            self.ads_curvature.sqrt().recip()
        }
    }

    /// Exact zero tests on Q^2 and lambda: the family is a modelling choice.
    pub fn classify(&self) -> Family {
        match (self.charge_sq > 0.0, self.ads_curvature > 0.0) {
            (true, true) => Family::RnAds,
            (false, true) => Family::SchwAds,
            (true, false) => Family::Rn,
            (false, false) => Family::Schw,
        }
    }

    /// Same mass with the charge set to zero.
    pub fn without_charge(&self) -> Self {
        Self {
            charge_sq: 0.0,
            ..*self
        }
    }

    /// Same mass with the cosmological constant removed (l -> infinity).
    pub fn without_ads(&self) -> Self {
        Self {
            ads_curvature: 0.0,
            ..*self
        }
    }

    /// Restrict to `family` by zeroing the parameters it lacks. Fails when the
    /// family needs a parameter that is already zero.
    pub fn truncate_to(&self, family: Family) -> Result<Self> {
        let (charged, ads) = family.parameters();
        if (charged && self.charge_sq == 0.0) || (ads && self.ads_curvature == 0.0) {
            return Err(GeometryError::InvalidParams(format!(
                "cannot restrict {} parameters to the {} family",
                self.classify(),
                family
            )));
        }
        let mut p = *self;
        if !charged {
            p.charge_sq = 0.0;
        }
        if !ads {
            p.ads_curvature = 0.0;
        }
        Ok(p)
    }

    /// `r^2 N^2(r) = -lambda r^4 - r^2 + 2 m r - Q^2`, with its r-derivative.
    pub fn horizon_polynomial(&self, r: f64) -> (f64, f64) {
        let (m, q2, lam) = (self.mass, self.charge_sq, self.ads_curvature);
        let r2 = r * r;
        let p = -lam * r2 * r2 - r2 + 2.0 * m * r - q2;
        let dp = -4.0 * lam * r2 * r - 2.0 * r + 2.0 * m;
        (p, dp)
    }

    /// `N^2 = -1 + 2m/r - Q^2/r^2 - lambda r^2`, the direct form.
    pub fn lapse_squared(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(GeometryError::domain("r", r, 0.0, f64::INFINITY, true));
        }
        Ok(self.lapse_squared_unchecked(r))
    }

    pub(crate) fn lapse_squared_unchecked(&self, r: f64) -> f64 {
        -1.0 + 2.0 * self.mass / r - self.charge_sq / (r * r) - self.ads_curvature * r * r
    }

    /// N^2 in the factored form built from the horizon radii.
    ///
    /// RN-AdS uses `(r+ - r)(r - r-)/(r^2) (lambda r^2 + lambda (r+ + r-) r + Q^2/(r+ r-))`;
    /// Schw-AdS uses `(rH - r)(lambda r^2 + lambda rH r + 2m/rH)/r`; RN uses
    /// `(r+ - r)(r - r-)/r^2`. Schwarzschild has no factored form of its own and
    /// uses the lambda -> 0 reading of the Schw-AdS one, `(2m - r)/r`.
    pub fn lapse_squared_factored(&self, horizons: &HorizonData, r: f64) -> Result<f64> {
        let (rm, rp) = (horizons.r_minus, horizons.r_plus);
        if !(r > rm && r < rp) {
            return Err(GeometryError::domain("r", r, rm, rp, true));
        }
        let (m, q2, lam) = (self.mass, self.charge_sq, self.ads_curvature);
        let n2 = match self.classify() {
            Family::RnAds => {
                (rp - r) * (r - rm) / (r * r) * (lam * r * r + lam * (rp + rm) * r + q2 / (rp * rm))
            }
            Family::SchwAds => (rp - r) * (lam * r * r + lam * rp * r + 2.0 * m / rp) / r,
            Family::Rn => (rp - r) * (r - rm) / (r * r),
            Family::Schw => (2.0 * m - r) / r,
        };
        Ok(n2)
    }

    /// Inner and outer horizon radii.
    ///
    /// RN uses the closed form, Schwarzschild `r+ = 2m`. The AdS families
    /// isolate the two roots of the concave quartic `r^2 N^2`: the maximum is
    /// located from the derivative cubic, and each root is then polished on
    /// its side of the maximum by bracketed Newton iteration.
    pub fn solve_horizons(&self) -> Result<HorizonData> {
        let m = self.mass;
        let m2 = m * m;
        match self.classify() {
            Family::Schw => Ok(HorizonData::new(0.0, 2.0 * m, 1.0)),
            Family::Rn => {
                let margin = (m2 - self.charge_sq) / m2;
                check_margin(margin)?;
                let r_plus = m + (m2 - self.charge_sq).sqrt();
                // r+ r- = Q^2; avoids the cancellation in m - sqrt(m^2 - Q^2).
                let r_minus = self.charge_sq / r_plus;
                Ok(HorizonData::new(r_minus, r_plus, margin))
            }
            Family::RnAds | Family::SchwAds => {
                // P' = 2m - 2r - 4 lambda r^3 is strictly decreasing, positive at 0, <= 0 at m.
                let lam = self.ads_curvature;
                let r_peak = newton_bisect(
                    |r| (2.0 * m - 2.0 * r - 4.0 * lam * r * r * r, -2.0 - 12.0 * lam * r * r),
                    0.0,
                    m,
                    0.0,
                    MAX_ITERATIONS,
                )?;
                let p_max = self.horizon_polynomial(r_peak).0;
                let margin = p_max / m2;
                check_margin(margin)?;
                // P(2m) = -16 lambda m^4 - Q^2 < 0.
                let r_plus =
                    newton_bisect(|r| self.horizon_polynomial(r), r_peak, 2.0 * m, 0.0, MAX_ITERATIONS)?;
                let r_minus = if self.charge_sq == 0.0 {
                    0.0
                } else {
                    newton_bisect(|r| self.horizon_polynomial(r), 0.0, r_peak, 0.0, MAX_ITERATIONS)?
                };
                Ok(HorizonData::new(r_minus, r_plus, margin))
            }
        }
    }
}

fn check_margin(margin: f64) -> Result<()> {
    if margin < -EXTREMALITY_THRESHOLD {
        Err(GeometryError::NakedSingularity { margin })
    } else if margin < EXTREMALITY_THRESHOLD {
        Err(GeometryError::ExtremalConfiguration { margin })
    } else {
        Ok(())
    }
}

impl fmt::Display for SpacetimeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "m = {}, Q^2 = {}, 1/l^2 = {}",
            self.mass, self.charge_sq, self.ads_curvature
        )
    }
}

/// Member of the RN-AdS family obtained by truncating Q and/or l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "RNAdS")]
    RnAds,
    #[serde(rename = "SchwAdS")]
    SchwAds,
    #[serde(rename = "RN")]
    Rn,
    #[serde(rename = "Schw")]
    Schw,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::RnAds, Family::SchwAds, Family::Rn, Family::Schw];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::RnAds => "RNAdS",
            Family::SchwAds => "SchwAdS",
            Family::Rn => "RN",
            Family::Schw => "Schw",
        }
    }

    /// (has charge, has cosmological constant)
    pub fn parameters(&self) -> (bool, bool) {
        match self {
            Family::RnAds => (true, true),
            Family::SchwAds => (false, true),
            Family::Rn => (true, false),
            Family::Schw => (false, false),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "rnads" => Ok(Family::RnAds),
            "schwads" | "schwarzschildads" => Ok(Family::SchwAds),
            "rn" | "reissnernordstrom" => Ok(Family::Rn),
            "schw" | "schwarzschild" => Ok(Family::Schw),
            _ => Err(GeometryError::InvalidParams(format!("unknown family '{s}'"))),
        }
    }
}

/// Inner and outer horizon radii with the extremality diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonData {
    pub r_minus: f64,
    pub r_plus: f64,
    pub gap: f64,
    /// `max_r r^2 N^2 / m^2`; zero at extremality, negative for a naked singularity.
    pub extremality_margin: f64,
}

impl HorizonData {
    fn new(r_minus: f64, r_plus: f64, extremality_margin: f64) -> Self {
        Self {
            r_minus,
            r_plus,
            gap: r_plus - r_minus,
            extremality_margin,
        }
    }

    pub fn contains_open(&self, r: f64) -> bool {
        r > self.r_minus && r < self.r_plus
    }

    pub fn contains_closed(&self, r: f64) -> bool {
        r >= self.r_minus && r <= self.r_plus
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.r_minus + self.r_plus)
    }
}

/// Recover `(Q^2, 1/l^2)` from the horizon radii and the mass.
///
/// `r_minus = 0` is accepted and describes the uncharged families. Rounding
/// can leave `2m - r+ - r-` a few ulps negative for an RN input; that residue
/// is read as the flat limit rather than an inconsistency.
pub fn params_from_horizons(r_plus: f64, r_minus: f64, mass: f64) -> Result<(f64, f64)> {
    if !(r_minus >= 0.0 && r_plus > r_minus && mass > 0.0) || !r_plus.is_finite() || !mass.is_finite() {
        return Err(GeometryError::InconsistentHorizons(format!(
            "need 0 <= r- < r+ and m > 0 (r+ = {r_plus}, r- = {r_minus}, m = {mass})"
        )));
    }
    let sum = r_plus + r_minus;
    let prod = r_plus * r_minus;
    let sum_sq = r_plus * r_plus + r_minus * r_minus;
    let mut excess = 2.0 * mass - sum;
    if excess < 0.0 && -excess <= 8.0 * f64::EPSILON * 2.0 * mass {
        excess = 0.0;
    }
    let lambda = excess / (sum * sum_sq);
    let charge_sq =
        prod * (2.0 * mass * (r_plus * r_plus + prod + r_minus * r_minus) - prod * sum) / (sum * sum_sq);
    if lambda < 0.0 || charge_sq < 0.0 {
        return Err(GeometryError::InconsistentHorizons(format!(
            "horizons r+ = {r_plus}, r- = {r_minus} with m = {mass} give Q^2 = {charge_sq}, 1/l^2 = {lambda}"
        )));
    }
    Ok((charge_sq, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: f64, q2: f64, lam: f64) -> SpacetimeParams {
        SpacetimeParams::new(m, q2, lam).unwrap()
    }

    #[test]
    fn classification_table() {
        assert_eq!(p(1.0, 0.25, 0.04).classify(), Family::RnAds);
        assert_eq!(p(1.0, 0.0, 0.04).classify(), Family::SchwAds);
        assert_eq!(p(1.0, 1.0, 0.0).classify(), Family::Rn);
        assert_eq!(p(1.0, 0.0, 0.0).classify(), Family::Schw);
        // No epsilon: a tiny charge is still a charge.
        assert_eq!(p(1.0, 1e-300, 0.0).classify(), Family::Rn);
    }

    #[test]
    fn invalid_params() {
        assert!(matches!(
            SpacetimeParams::new(0.0, 0.0, 0.0),
            Err(GeometryError::SchemeInapplicable(_))
        ));
        assert!(matches!(
            SpacetimeParams::new(-1.0, 1.0, 0.0),
            Err(GeometryError::SchemeInapplicable(_))
        ));
        assert!(SpacetimeParams::new(1.0, -0.1, 0.0).is_err());
        assert!(SpacetimeParams::new(1.0, 0.1, -0.1).is_err());
        assert!(SpacetimeParams::new(f64::NAN, 0.1, 0.0).is_err());
        assert!(SpacetimeParams::new(1.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn radius_conversion() {
        let q = SpacetimeParams::from_charge_and_radius(1.0, 0.5, 5.0).unwrap();
        assert_eq!(q.charge_sq(), 0.25);
        assert_eq!(q.ads_curvature(), 0.04);
        let flat = SpacetimeParams::from_charge_and_radius(1.0, 0.5, f64::INFINITY).unwrap();
        assert_eq!(flat.ads_curvature(), 0.0);
        assert_eq!(flat.ads_radius(), f64::INFINITY);
        assert!(SpacetimeParams::from_charge_and_radius(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn lapse_examples() {
        assert_eq!(p(1.25, 1.0, 0.0).lapse_squared(1.0).unwrap(), 0.5);
        assert_eq!(p(1.25, 1.0, 0.0).lapse_squared(2.0).unwrap(), 0.0);
        assert_eq!(p(1.0, 0.0, 0.0).lapse_squared(2.0).unwrap(), 0.0);
        assert!(p(1.0, 0.0, 0.0).lapse_squared(0.0).is_err());
        assert!(p(1.0, 0.0, 0.0).lapse_squared(-1.0).is_err());
    }

    #[test]
    fn factored_examples() {
        let rn = p(1.25, 1.0, 0.0);
        let h = rn.solve_horizons().unwrap();
        assert!((rn.lapse_squared_factored(&h, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(rn.lapse_squared_factored(&h, h.r_plus).is_err());
        assert!(rn.lapse_squared_factored(&h, h.r_minus).is_err());

        let schw = p(1.0, 0.0, 0.0);
        let hs = schw.solve_horizons().unwrap();
        assert_eq!(schw.lapse_squared_factored(&hs, 1.0).unwrap(), 1.0);
        assert!(schw.lapse_squared_factored(&hs, 2.0).is_err());
    }

    #[test]
    fn rn_horizons() {
        let h = p(1.25, 1.0, 0.0).solve_horizons().unwrap();
        assert!((h.r_minus - 0.5).abs() < 1e-15);
        assert!((h.r_plus - 2.0).abs() < 1e-15);
        assert!((h.gap - 1.5).abs() < 1e-15);
    }

    #[test]
    fn schw_horizons() {
        let h = p(1.0, 0.0, 0.0).solve_horizons().unwrap();
        assert_eq!(h.r_minus, 0.0);
        assert_eq!(h.r_plus, 2.0);
    }

    #[test]
    fn schw_ads_inner_horizon_is_exactly_zero() {
        let h = p(1.0, 0.0, 0.04).solve_horizons().unwrap();
        assert_eq!(h.r_minus, 0.0);
        assert!(p(1.0, 0.0, 0.04).lapse_squared(h.r_plus).unwrap().abs() < 1e-14);
    }

    #[test]
    fn extremal_and_naked() {
        assert!(matches!(
            p(1.0, 1.0, 0.0).solve_horizons(),
            Err(GeometryError::ExtremalConfiguration { .. })
        ));
        assert!(matches!(
            p(1.0, 1.5, 0.0).solve_horizons(),
            Err(GeometryError::NakedSingularity { .. })
        ));
        assert!(matches!(
            p(1.0, 0.9, 0.5).solve_horizons(),
            Err(GeometryError::NakedSingularity { .. })
        ));
    }

    #[test]
    fn params_from_horizons_examples() {
        let (q2, lam) = params_from_horizons(1.8, 0.2, 1.0).unwrap();
        assert!((q2 - 0.36).abs() < 1e-15);
        assert_eq!(lam, 0.0);
        let (q2, lam) = params_from_horizons(2.0, 0.5, 1.25).unwrap();
        assert!((q2 - 1.0).abs() < 1e-15);
        assert_eq!(lam, 0.0);
        // r+ + r- > 2m would need lambda < 0.
        assert!(matches!(
            params_from_horizons(2.0, 1.0, 1.0),
            Err(GeometryError::InconsistentHorizons(_))
        ));
        assert!(params_from_horizons(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("rnads".parse::<Family>().unwrap(), Family::RnAds);
        assert_eq!("RN-AdS".parse::<Family>().unwrap(), Family::RnAds);
        assert_eq!("schw".parse::<Family>().unwrap(), Family::Schw);
        assert_eq!("Schw-AdS".parse::<Family>().unwrap(), Family::SchwAds);
        assert!("kerr".parse::<Family>().is_err());
    }

    #[test]
    fn truncation() {
        let full = p(1.0, 0.25, 0.04);
        assert_eq!(full.truncate_to(Family::Rn).unwrap(), p(1.0, 0.25, 0.0));
        assert_eq!(full.truncate_to(Family::Schw).unwrap(), p(1.0, 0.0, 0.0));
        assert!(p(1.0, 0.0, 0.04).truncate_to(Family::RnAds).is_err());
    }

    #[test]
    fn params_deserialize_validates() {
        let ok: SpacetimeParams =
            serde_json::from_str(r#"{"mass":1.0,"charge_sq":0.25,"ads_curvature":0.04}"#).unwrap();
        assert_eq!(ok, p(1.0, 0.25, 0.04));
        assert!(serde_json::from_str::<SpacetimeParams>(r#"{"mass":-1.0,"charge_sq":0.25,"ads_curvature":0.04}"#)
            .is_err());
    }
}
