use thiserror::Error;

/// Errors raised while building or evaluating interior geometry.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The warped-product construction needs a positive mass; with m <= 0 the
    /// lapse is negative everywhere and there is no interior region.
    #[error("warped-product scheme inapplicable: {0}")]
    SchemeInapplicable(String),

    #[error("extremal configuration: horizons coincide (normalized lapse maximum {margin:e})")]
    ExtremalConfiguration { margin: f64 },

    #[error("naked singularity: lapse has no positive root (normalized lapse maximum {margin:e})")]
    NakedSingularity { margin: f64 },

    #[error("inconsistent horizons: {0}")]
    InconsistentHorizons(String),

    #[error("{quantity} = {value} is outside the domain {domain}")]
    Domain {
        quantity: &'static str,
        value: f64,
        domain: String,
    },

    #[error("singular frame: {0}")]
    SingularFrame(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("invalid chart: {0}")]
    InvalidChart(String),
}

impl GeometryError {
    pub(crate) fn domain(quantity: &'static str, value: f64, lo: f64, hi: f64, open: bool) -> Self {
        let domain = if open {
            format!("({lo}, {hi})")
        } else {
            format!("[{lo}, {hi}]")
        };
        GeometryError::Domain {
            quantity,
            value,
            domain,
        }
    }

    /// True for the errors that describe a geometric configuration with no
    /// usable interior (as opposed to bad input or numerical failure).
    pub fn is_horizon_error(&self) -> bool {
        matches!(
            self,
            GeometryError::ExtremalConfiguration { .. }
                | GeometryError::NakedSingularity { .. }
                | GeometryError::SchemeInapplicable(_)
        )
    }
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
