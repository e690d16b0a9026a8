//! Adaptive Gauss-Kronrod (7/15) quadrature for smooth integrands.

use crate::error::{GeometryError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the 7-point rule, paired with XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Cap on the number of subintervals in one adaptive integration.
pub const MAX_SUBINTERVALS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_centre = f(centre);

    let mut res_gauss = f_centre * WG[3];
    let mut res_kronrod = f_centre * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_centre - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    let abs_half = half.abs();
    let err = rescale_error((res_kronrod - res_gauss) * half, res_abs * abs_half, res_asc * abs_half);
    (value, err)
}

/// Integrate `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`.
///
/// Globally adaptive: the panel with the largest error estimate is bisected
/// until the summed estimate meets the target. The result is a deterministic
/// function of the inputs. Fails with `NoConvergence` when
/// [`MAX_SUBINTERVALS`] panels are not enough.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = gk15(&f, a, b);
    let mut panels = vec![Panel { a, b, value, error }];
    let mut evaluations = 15;

    loop {
        // Sum in left-to-right order so the result does not depend on split history.
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Quadrature {
                value: total,
                abs_error: total_err,
                evaluations,
            });
        }
        if panels.len() >= MAX_SUBINTERVALS {
            return Err(GeometryError::NoConvergence {
                what: "adaptive Gauss-Kronrod quadrature",
                iterations: panels.len(),
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            // Panel cannot be split further in double precision.
            return Err(GeometryError::NoConvergence {
                what: "adaptive Gauss-Kronrod quadrature",
                iterations: panels.len() + 1,
            });
        }
        let (v1, e1) = gk15(&f, p.a, mid);
        let (v2, e2) = gk15(&f, mid, p.b);
        evaluations += 30;
        panels.push(Panel { a: p.a, b: mid, value: v1, error: e1 });
        panels.push(Panel { a: mid, b: p.b, value: v2, error: e2 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        // K15 integrates degree-22 polynomials exactly.
        let q = integrate(|x| x.powi(10), 0.0, 1.0, 0.0, 1e-12).unwrap();
        assert!((q.value - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_needs_subdivision() {
        let q = integrate(|x| (30.0 * x).cos(), 0.0, PI / 2.0 + 0.1, 1e-13, 1e-10).unwrap();
        let exact = (30.0 * (PI / 2.0 + 0.1)).sin() / 30.0;
        assert!((q.value - exact).abs() < 1e-13, "{q:?} vs {exact}");
        assert!(q.evaluations > 15);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let fwd = integrate(|x| x.exp(), 0.0, 1.0, 0.0, 1e-13).unwrap().value;
        let bwd = integrate(|x| x.exp(), 1.0, 0.0, 0.0, 1e-13).unwrap().value;
        assert!((fwd + bwd).abs() < 1e-15);
        assert!((fwd - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 2.0, 2.0, 0.0, 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn unattainable_tolerance_reports_no_convergence() {
        let r = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, 0.0, 1e-300);
        assert!(matches!(r, Err(GeometryError::NoConvergence { .. })));
    }
}
