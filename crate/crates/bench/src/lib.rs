//! Fixed parameter sets shared by the benchmarks.

use rnads_core::{Family, SpacetimeParams};

/// One representative nonextremal parameter set per family.
pub fn fixtures() -> Vec<(Family, SpacetimeParams)> {
    [(0.25, 0.04), (0.0, 0.04), (1.0, 0.0), (0.0, 0.0)]
        .into_iter()
        .map(|(q2, lam)| {
            let m = if q2 == 1.0 { 1.25 } else { 1.0 };
            let p = SpacetimeParams::new(m, q2, lam).expect("fixture parameters are valid");
            (p.classify(), p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_fixture_per_family() {
        let families: Vec<Family> = fixtures().iter().map(|(f, _)| *f).collect();
        assert_eq!(families, Family::ALL);
        for (_, p) in fixtures() {
            assert!(p.solve_horizons().is_ok());
        }
    }
}
