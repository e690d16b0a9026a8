//! Interior geometry of Reissner-Nordstrom-AdS black holes as a multiply
//! warped product `-dmu^2 + f1(mu)^2 dt^2 + f2(mu)^2 dOmega^2`.
//!
//! * [`spacetime`]: parameters, family classification, horizons and the lapse.
//! * [`chart`]: the interior coordinate `mu = F(r)` and its inverse.
//! * [`geometry`]: warping functions, Ricci components and the scalar curvature.
//! * [`validation`]: the named cross-check suite.

pub mod chart;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod roots;
pub mod spacetime;
pub mod validation;

pub use chart::{rn_mu_analytic, rn_mu_unrooted, ChartFile, ChartTolerances, MuChart};
pub use error::{GeometryError, Result};
pub use geometry::{
    contract_scalar, finite_difference_frame, horizon_continuity_check, identity_frame, ricci_closed_form,
    ricci_from_frame, warp_frame, ContinuityReport, EvaluationPoint, Position, RicciComponents, WarpFrame,
};
pub use spacetime::{params_from_horizons, Family, HorizonData, SpacetimeParams};
pub use validation::{run_suite, CheckResult, SuiteConfig, SuiteReport};
