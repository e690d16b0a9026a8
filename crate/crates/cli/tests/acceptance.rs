//! Acceptance run: one PASS/FAIL line per criterion.
//! `cargo test -p rnads-cli --test acceptance -- --nocapture --test-threads=1`

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnads_core::validation::{interior_grid, sample_family, table_deviation};
use rnads_core::{
    contract_scalar, finite_difference_frame, horizon_continuity_check, identity_frame, params_from_horizons,
    ricci_closed_form, ricci_from_frame, rn_mu_analytic, rn_mu_unrooted, warp_frame, EvaluationPoint, Family,
    MuChart, SpacetimeParams, WarpFrame,
};

const SEED: u64 = 20_240_601;

fn rng(label: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ label)
}

fn verdict(n: u32, pass: bool, what: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {n}: {what}");
    assert!(pass, "criterion {n} failed: {what}");
}

fn chart(p: &SpacetimeParams) -> MuChart {
    MuChart::with_defaults(p).unwrap()
}

fn pipeline_at(chart: &MuChart, mu: f64) -> (WarpFrame, rnads_core::RicciComponents) {
    let frame = warp_frame(chart, EvaluationPoint::at_mu(mu)).unwrap();
    (frame, ricci_from_frame(&frame).unwrap())
}

#[test]
fn criterion_01_scalar_curvature_constants() {
    let start = Instant::now();
    let mut ads_rel: f64 = 0.0;
    for family in [Family::RnAds, Family::SchwAds] {
        for p in sample_family(family, 16, &mut rng(1)) {
            let c = chart(&p);
            let target = -12.0 * p.ads_curvature();
            for mu in interior_grid(0.0, c.mu_max(), 128) {
                let (frame, ric) = pipeline_at(&c, mu);
                let s = contract_scalar(&ric, frame.f1, frame.f2).unwrap();
                ads_rel = ads_rel.max(((s - target) / target).abs());
            }
        }
    }
    let mut rn_abs: f64 = 0.0;
    for p in sample_family(Family::Rn, 16, &mut rng(2)) {
        let c = chart(&p);
        for mu in interior_grid(0.0, c.mu_max(), 128) {
            let (frame, ric) = pipeline_at(&c, mu);
            rn_abs = rn_abs.max(contract_scalar(&ric, frame.f1, frame.f2).unwrap().abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        ads_rel <= 1e-8 && rn_abs <= 1e-8 && elapsed <= Duration::from_secs(2),
        &format!(
            "AdS scalar rel err {ads_rel:.3e} (tol 1e-8), RN scalar abs err {rn_abs:.3e} (tol 1e-8), {:.3} s (budget 2 s)",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_ricci_pipeline_vs_closed_forms() {
    let start = Instant::now();
    let (mut rel, mut abs): (f64, f64) = (0.0, 0.0);
    for (i, family) in Family::ALL.into_iter().enumerate() {
        let mut r = rng(10 + i as u64);
        let charts: Vec<MuChart> = sample_family(family, 8, &mut r).iter().map(chart).collect();
        for k in 0..64 {
            let c = &charts[k % charts.len()];
            let mu = c.mu_max() * r.gen_range(0.01..0.99);
            let (frame, generic) = pipeline_at(c, mu);
            let closed = ricci_closed_form(c.params(), frame.r).unwrap();
            for (a, b) in generic.as_array().iter().zip(closed.as_array()) {
                if b == 0.0 {
                    abs = abs.max(a.abs());
                } else {
                    rel = rel.max(((a - b) / b).abs());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        2,
        rel <= 1e-7 && abs <= 1e-9 && elapsed <= Duration::from_secs(2),
        &format!(
            "max rel err {rel:.3e} (tol 1e-7), max abs err at zero targets {abs:.3e} (tol 1e-9), {:.3} s (budget 2 s)",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_03_schwarzschild_interior_is_ricci_flat() {
    let mut worst: f64 = 0.0;
    for p in sample_family(Family::Schw, 16, &mut rng(3)) {
        let c = chart(&p);
        for mu in interior_grid(0.0, c.mu_max(), 128) {
            let (frame, generic) = pipeline_at(&c, mu);
            let closed = ricci_closed_form(&p, frame.r).unwrap();
            for v in generic.as_array().into_iter().chain(closed.as_array()) {
                worst = worst.max(v.abs());
            }
        }
    }
    verdict(3, worst <= 1e-9, &format!("max |component| {worst:.3e} (tol 1e-9)"));
}

/// `f1`, `f2'`, `f1'`, `f1''`, `f2''`.
fn frame_values(f: &WarpFrame) -> [f64; 5] {
    [f.f1, f.f2_prime, f.f1_prime, f.f1_pprime, f.f2_pprime]
}

#[test]
fn criterion_04_warp_identities() {
    let mut worst: f64 = 0.0;
    let (mut coarse_err, mut fine_err) = (0.0, 0.0);
    for (i, family) in Family::ALL.into_iter().enumerate() {
        for p in sample_family(family, 8, &mut rng(40 + i as u64)) {
            let c = chart(&p);
            let gap = c.horizons().gap;
            for t in [0.25, 0.5, 0.75] {
                let r = c.r_of_mu(t * c.mu_max()).unwrap();
                let exact = frame_values(&identity_frame(&p, r).unwrap());
                let fd = frame_values(&finite_difference_frame(&c, r, 1e-4 * gap).unwrap());
                let coarse = frame_values(&finite_difference_frame(&c, r, 4e-3 * gap).unwrap());
                let fine = frame_values(&finite_difference_frame(&c, r, 2e-3 * gap).unwrap());
                for k in 0..5 {
                    let scale = exact[k].abs().max(1.0);
                    worst = worst.max((fd[k] - exact[k]).abs() / scale);
                    if k > 0 {
                        coarse_err += (coarse[k] - exact[k]).abs() / scale;
                        fine_err += (fine[k] - exact[k]).abs() / scale;
                    }
                }
            }
        }
    }
    let order = (coarse_err / fine_err).log2();
    verdict(
        4,
        worst <= 1e-6 && order >= 1.9,
        &format!("max rel err at step 1e-4 gap {worst:.3e} (tol 1e-6), observed order {order:.4} (min 1.9)"),
    );
}

#[test]
fn criterion_05_rn_boundary_condition() {
    let params = sample_family(Family::Rn, 8, &mut rng(5));
    let (mut boundary, mut analytic): (f64, f64) = (0.0, 0.0);
    let mut smallest_miss = f64::INFINITY;
    for p in &params {
        let c = chart(p);
        let h = *c.horizons();
        let m = p.mass();
        boundary = boundary.max(((c.mu_max() - m * PI) / (m * PI)).abs());
        let mut miss: f64 = 0.0;
        for k in 0..256 {
            let r = (h.r_minus + h.gap * k as f64 / 255.0).min(h.r_plus);
            let quad = c.mu_of_r(r).unwrap();
            analytic = analytic.max((rn_mu_analytic(m, h.r_plus, h.r_minus, r).unwrap() - quad).abs());
            miss = miss.max((rn_mu_unrooted(m, h.r_plus, h.r_minus, r).unwrap() - quad).abs());
        }
        smallest_miss = smallest_miss.min(miss);
    }
    verdict(
        5,
        boundary <= 1e-8 && analytic <= 1e-9 && smallest_miss >= 1e-3,
        &format!(
            "mu_max vs m pi rel err {boundary:.3e} (tol 1e-8), analytic form max abs err {analytic:.3e} (tol 1e-9), \
             unrooted form smallest miss {smallest_miss:.3e} (min 1e-3)"
        ),
    );
}

#[test]
fn criterion_06_inversion_roundtrip() {
    let mut worst: f64 = 0.0;
    for (i, family) in Family::ALL.into_iter().enumerate() {
        let mut r = rng(60 + i as u64);
        let charts: Vec<MuChart> = sample_family(family, 8, &mut r).iter().map(chart).collect();
        for k in 0..1000 {
            let c = &charts[k % charts.len()];
            let mu = r.gen_range(0.0..=c.mu_max());
            let back = c.mu_of_r(c.r_of_mu(mu).unwrap()).unwrap();
            worst = worst.max((back - mu).abs() / c.mu_max().max(1.0));
        }
    }
    verdict(6, worst <= 1e-9, &format!("max |F(F^-1(mu)) - mu| / max(1, mu_max) {worst:.3e} (tol 1e-9)"));
}

#[test]
fn criterion_07_horizon_continuity() {
    let mut min_order = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for (i, family) in Family::ALL.into_iter().enumerate() {
        for p in sample_family(family, 8, &mut rng(70 + i as u64)) {
            let gap = p.solve_horizons().unwrap().gap;
            let eps: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|e| e * gap).collect();
            let report = horizon_continuity_check(&p, &eps).unwrap();
            let floor = 1e-13 * report.limit.as_array().iter().fold(1.0_f64, |a, b| a.max(b.abs()));
            if let Some(order) = report.min_order(floor) {
                min_order = min_order.min(order);
            }
            // Deviation per unit epsilon stays bounded as epsilon shrinks.
            let first = report.rows[0].deviation.iter().fold(0.0_f64, |a, &b| a.max(b)) / eps[0];
            let last = report.rows[2].deviation.iter().fold(0.0_f64, |a, &b| a.max(b)) / eps[2];
            if first > 0.0 {
                worst_ratio = worst_ratio.max(last / first);
            }
        }
    }
    verdict(
        7,
        min_order >= 0.9 && worst_ratio <= 2.0,
        &format!(
            "min observed order {min_order:.4} (min 0.9), growth of deviation/eps from 1e-2 to 1e-6 gap {worst_ratio:.3} (max 2)"
        ),
    );
}

#[test]
fn criterion_08_limit_consistency() {
    let mut lambda_dev: f64 = 0.0;
    let mut charge_mismatches = 0usize;
    for p in sample_family(Family::RnAds, 8, &mut rng(8)) {
        let m = p.mass();
        let near = SpacetimeParams::new(m, p.charge_sq(), 1e-8).unwrap();
        let rn = SpacetimeParams::new(m, p.charge_sq(), 0.0).unwrap();
        lambda_dev = lambda_dev.max(table_deviation(&chart(&near), &chart(&rn)).unwrap());

        let truncated = p.without_charge();
        let sads = SpacetimeParams::new(m, 0.0, p.ads_curvature()).unwrap();
        let h = sads.solve_horizons().unwrap();
        if truncated.solve_horizons().unwrap() != h {
            charge_mismatches += 1;
        }
        for r in interior_grid(h.r_minus, h.r_plus, 64) {
            let a = ricci_closed_form(&truncated, r).unwrap().as_array();
            let b = ricci_closed_form(&sads, r).unwrap().as_array();
            charge_mismatches += a.iter().zip(b).filter(|(x, y)| x.to_bits() != y.to_bits()).count();
        }
        let ta: Vec<(f64, f64)> = chart(&truncated).table().collect();
        let tb: Vec<(f64, f64)> = chart(&sads).table().collect();
        if ta != tb {
            charge_mismatches += 1;
        }
    }
    verdict(
        8,
        lambda_dev <= 1e-5 && charge_mismatches == 0,
        &format!(
            "lambda = 1e-8 vs RN table deviation {lambda_dev:.3e} (tol 1e-5), Q^2 = 0 truncation mismatches {charge_mismatches} (exact)"
        ),
    );
}

#[test]
fn criterion_09_parameter_roundtrip() {
    let mut worst: f64 = 0.0;
    for (i, family) in Family::ALL.into_iter().enumerate() {
        for p in sample_family(family, 64, &mut rng(90 + i as u64)) {
            let h = p.solve_horizons().unwrap();
            let (q2, lam) = params_from_horizons(h.r_plus, h.r_minus, p.mass()).unwrap();
            let m2 = p.mass() * p.mass();
            let err_q = if p.charge_sq() == 0.0 { q2.abs() / m2 } else { ((q2 - p.charge_sq()) / p.charge_sq()).abs() };
            let err_l = if p.ads_curvature() == 0.0 {
                lam.abs() * m2
            } else {
                ((lam - p.ads_curvature()) / p.ads_curvature()).abs()
            };
            worst = worst.max(err_q).max(err_l);
        }
    }
    verdict(9, worst <= 1e-10, &format!("max rel err on (Q^2, lambda) {worst:.3e} (tol 1e-10)"));
}

#[test]
fn criterion_10_verify_subcommand() {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_rnads"))
            .args(["verify", "--seed", "1"])
            .output()
            .unwrap();
        (out, start.elapsed())
    };
    let (first, elapsed) = run();
    let (second, _) = run();
    let code = first.status.code();
    let identical = first.stdout == second.stdout && !first.stdout.is_empty();
    verdict(
        10,
        code == Some(0) && second.status.code() == Some(0) && identical && elapsed <= Duration::from_secs(10),
        &format!(
            "exit {code:?} (want 0), reruns byte-identical: {identical}, {:.3} s (budget 10 s)",
            elapsed.as_secs_f64()
        ),
    );
}
