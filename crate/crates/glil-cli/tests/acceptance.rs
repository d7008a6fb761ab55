//! Acceptance suite: one test per criterion, one pass/fail line each
//! (run with `--nocapture` to see the lines for passing criteria).
//!
//! Statistical criteria run at fixed seeds with every threshold pinned in
//! code. Each test prints its measured numbers before asserting, so a red
//! criterion still reports exactly what was observed.

use std::fs;
use std::time::Instant;

use glil::gheat::{
    check_shift_inequality, check_tail_monotonicity, g_expectation, pde_tolerance,
    PdeSolverParams,
};
use glil::harness::{
    abs_power_constant, example_bounds, run_examples_experiment, run_invariance_experiment,
    ExampleKind, ExperimentConfig,
};
use glil::model::{TestFunction, TimeGrid, VolatilityInterval};
use glil::sim::{path_seed, realized_quadratic_variation, simulate_path, VolatilityPolicy};
use glil::strassen::{dist_to_strassen_ball, RescaledPath};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

#[path = "../../glil/tests/support/qp_oracle.rs"]
mod qp_oracle;

fn verdict(criterion: &str, pass: bool, detail: &str) -> bool {
    println!(
        "ACCEPTANCE {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn interval12() -> VolatilityInterval {
    VolatilityInterval::new(1.0, 2.0).unwrap()
}

fn per_seed(values: &serde_json::Value, key: &str) -> Vec<f64> {
    values[key]
        .as_array()
        .unwrap_or_else(|| panic!("missing {key}"))
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect()
}

fn fraction_within(vals: &[f64], lo: f64, hi: f64) -> f64 {
    vals.iter().filter(|&&v| v >= lo && v <= hi).count() as f64 / vals.len() as f64
}

#[test]
fn criterion_01_g_normal_moments() {
    let started = Instant::now();
    let iv = interval12();
    let p = PdeSolverParams::auto(1.0, &iv).unwrap();
    let upper = g_expectation(&TestFunction::Quadratic, 1.0, &iv, &p).unwrap();
    let lower = -g_expectation(&TestFunction::NegQuadratic, 1.0, &iv, &p).unwrap();
    let elapsed = started.elapsed();
    let rel_hi = (upper - 4.0).abs() / 4.0;
    let rel_lo = (lower - 1.0).abs();
    let pass = rel_hi <= 5e-3 && rel_lo <= 5e-3 && elapsed.as_secs_f64() < 10.0;
    assert!(
        verdict(
            "criterion 1 (G-normal moments)",
            pass,
            &format!(
                "E[B_1^2] = {upper:.6} (rel {rel_hi:.2e}), -E[-B_1^2] = {lower:.6} (rel {rel_lo:.2e}), {} ms",
                elapsed.as_millis()
            )
        ),
        "second-moment identities failed"
    );
}

#[test]
fn criterion_02_convex_concave_oracle() {
    let iv = interval12();
    let p = PdeSolverParams::auto(1.0, &iv).unwrap();
    let std = Normal::new(0.0, 1.0).unwrap();
    let cap = 3.0f64;
    let sd_hi = iv.high();
    let exp_clipped_closed_form = (sd_hi * sd_hi / 2.0).exp() * std.cdf((cap - sd_hi * sd_hi) / sd_hi)
        + cap.exp() * ((1.0 - cap) * (1.0 - std.cdf(cap / sd_hi)) + sd_hi * std.pdf(cap / sd_hi));
    let cases: Vec<(&str, TestFunction, f64)> = vec![
        ("|x|", TestFunction::Abs, sd_hi * (2.0 / std::f64::consts::PI).sqrt()),
        ("x^4", TestFunction::AbsPower { exponent: 4.0 }, 3.0 * sd_hi.powi(4)),
        (
            "-x^4",
            TestFunction::AbsPower { exponent: 4.0 }.negated(),
            -3.0 * iv.low().powi(4),
        ),
        ("exp-clipped", TestFunction::ExpClipped { cap }, exp_clipped_closed_form),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (name, phi, expect) in cases {
        let got = g_expectation(&phi, 1.0, &iv, &p).unwrap();
        let rel = (got - expect).abs() / expect.abs();
        detail.push_str(&format!("{name}: {got:.5} vs {expect:.5} (rel {rel:.1e}); "));
        pass &= rel <= 5e-3;
    }
    assert!(
        verdict("criterion 2 (convex/concave closed forms)", pass, &detail),
        "extremal Gaussian collapse failed"
    );
}

#[test]
fn criterion_03_shift_inequality_margins() {
    let iv = interval12();
    let p = PdeSolverParams::auto(1.0, &iv).unwrap();
    let bump = TestFunction::TriangularBump { width: 1.0, center: 0.0 };
    let bs = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
    let margins: Vec<f64> = bs
        .par_iter()
        .map(|&b| check_shift_inequality(&bump, b, 1.0, &iv, &p).unwrap())
        .collect();
    let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = worst >= -1e-4;
    assert!(
        verdict(
            "criterion 3 (shift-inequality margins)",
            pass,
            &format!("margins over b in {bs:?}: worst {worst:.2e}")
        ),
        "shift inequality violated beyond tolerance"
    );
}

#[test]
fn criterion_04_tail_monotonicity() {
    let iv = interval12();
    let ys = [0.5, 1.0, 2.0];
    let mut pass = true;
    let mut detail = String::new();
    for s in [0.25, 0.5, 1.0] {
        let t = 2.0 * s;
        let p = PdeSolverParams::auto(t, &iv).unwrap();
        for pt in check_tail_monotonicity(s, t, &ys, &iv, 0.02, &p).unwrap() {
            let ok = pt.v_s <= pt.v_t + 1e-4;
            pass &= ok;
            detail.push_str(&format!(
                "(s={s}, y={}): {:.4} <= {:.4} {}; ",
                pt.y,
                pt.v_s,
                pt.v_t,
                if ok { "ok" } else { "VIOLATED" }
            ));
        }
    }
    assert!(
        verdict("criterion 4 (tail monotonicity)", pass, &detail),
        "tail monotonicity violated beyond tolerance"
    );
}

#[test]
fn criterion_05_dual_representation_dominance() {
    let iv = interval12();
    let grid = TimeGrid::new(1.0, 200).unwrap();
    let policies = [VolatilityPolicy::constant(1.0, &iv).unwrap(),
        VolatilityPolicy::constant(1.5, &iv).unwrap(),
        VolatilityPolicy::constant(2.0, &iv).unwrap(),
        VolatilityPolicy::sign_feedback(2.0, 1.0, &iv).unwrap(),
        VolatilityPolicy::regime_switching(2.0, vec![1.0, 2.0], &iv).unwrap()];
    let n_paths = 2000usize;
    // common driver paths per policy, reused across all 200 functions
    let terminals: Vec<Vec<f64>> = policies
        .iter()
        .map(|pol| {
            (0..n_paths)
                .into_par_iter()
                .map(|i| {
                    let path = simulate_path(pol, &grid, path_seed(20_250_000, i as u64)).unwrap();
                    *path.values().last().unwrap()
                })
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let phis: Vec<TestFunction> = (0..200)
        .map(|_| {
            let n = 6 + (rng.gen::<u32>() % 6) as usize;
            let xs: Vec<f64> = (0..=n).map(|i| -8.0 + 16.0 * i as f64 / n as f64).collect();
            let ys: Vec<f64> = (0..=n).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            TestFunction::tabulated(xs, ys).unwrap()
        })
        .collect();

    let params = PdeSolverParams::auto(1.0, &iv).unwrap();
    let pde_values: Vec<f64> = phis
        .par_iter()
        .map(|phi| g_expectation(phi, 1.0, &iv, &params).unwrap())
        .collect();

    let mut cases = 0usize;
    let mut violations = 0usize;
    for (phi, pde) in phis.iter().zip(&pde_values) {
        for term in &terminals {
            let vals: Vec<f64> = term.iter().map(|&x| phi.eval(x)).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (vals.len() - 1) as f64;
            let se = (var / vals.len() as f64).sqrt();
            cases += 1;
            if mean > pde + 3.0 * se + pde_tolerance(*pde) {
                violations += 1;
            }
        }
    }
    let frac_ok = 1.0 - violations as f64 / cases as f64;
    let pass = frac_ok >= 0.99;
    assert!(
        verdict(
            "criterion 5 (dual-representation dominance)",
            pass,
            &format!("{violations}/{cases} violations ({:.2}% within bound)", 100.0 * frac_ok)
        ),
        "Monte Carlo exceeded the PDE sup too often"
    );
}

#[test]
fn criterion_06_quadratic_variation_band() {
    // dt = 1e-4 as stated; horizon 64 so the chi-square noise of QV/T
    // (sd ~ sigma^2 sqrt(2 dt / T) = 0.007 at sigma = 2) sits far inside
    // the +-0.05 band
    let iv = interval12();
    let horizon = 64.0;
    let steps = 640_000usize;
    let grid = TimeGrid::new(horizon, steps).unwrap();
    let policies = vec![
        VolatilityPolicy::constant(1.0, &iv).unwrap(),
        VolatilityPolicy::constant(2.0, &iv).unwrap(),
        VolatilityPolicy::sign_feedback(2.0, 1.0, &iv).unwrap(),
        VolatilityPolicy::regime_switching(1.0, vec![1.0, 2.0], &iv).unwrap(),
    ];
    let rates: Vec<f64> = policies
        .par_iter()
        .flat_map(|pol| {
            (0..20u64)
                .into_par_iter()
                .map(|seed| {
                    let path = simulate_path(pol, &grid, path_seed(606, seed)).unwrap();
                    realized_quadratic_variation(&path, 0.0, horizon).unwrap() / horizon
                })
                .collect::<Vec<f64>>()
        })
        .collect();
    let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pass = min >= 1.0 - 0.05 && max <= 4.0 + 0.05;
    assert!(
        verdict(
            "criterion 6 (quadratic variation band)",
            pass,
            &format!("QV/T over 4 policies x 20 seeds in [{min:.4}, {max:.4}] vs [0.95, 4.05]")
        ),
        "realized QV left the volatility band"
    );
}

#[test]
fn criterion_07_strassen_distance_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let m = 2 + (i % 7);
        let mut values = vec![0.0f64];
        let mut acc = 0.0;
        for _ in 0..m {
            acc += 0.9 * (rng.gen::<f64>() * 2.0 - 1.0);
            values.push(acc);
        }
        let path = RescaledPath::from_values(8.0, values).unwrap();
        for beta in [0.5, 1.0, 2.0] {
            let lib = dist_to_strassen_ball(&path, beta, 1e-4).unwrap();
            let oracle = qp_oracle::oracle_dist(path.values(), beta);
            worst = worst.max((lib - oracle).abs());
        }
    }
    let line: Vec<f64> = (0..=8).map(|i| 2.0 * i as f64 / 8.0).collect();
    let line_path = RescaledPath::from_values(8.0, line).unwrap();
    let d_line = dist_to_strassen_ball(&line_path, 1.0, 1e-4).unwrap();
    let pass = worst <= 1e-3 && (d_line - 1.0).abs() <= 1e-3;
    assert!(
        verdict(
            "criterion 7 (distance oracle battery)",
            pass,
            &format!("worst |bisection - brute force| = {worst:.2e}; d(2t, K_1) = {d_line:.6}")
        ),
        "QP distance disagrees with the brute-force oracle"
    );
}

fn lil_config(json: &str) -> ExperimentConfig {
    let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
    cfg.validate().unwrap();
    cfg
}

fn seeds_list() -> String {
    let list: Vec<String> = (0..20).map(|i| i.to_string()).collect();
    format!("[{}]", list.join(","))
}

#[test]
fn criterion_08_classical_regression() {
    let started = Instant::now();
    let cfg = lil_config(&format!(
        r#"{{
        "interval": {{"sigma_low": 1.0, "sigma_high": 1.0}},
        "policies": [{{"kind": "constant", "sigma": 1.0}}],
        "schedule": {{"kind": "geometric", "c": 1.5, "count": 64}},
        "horizon_cap": 10000000,
        "grid": {{"out_points": 64, "interp_m": 4, "steps_per_unit": 1}},
        "items": ["II"],
        "tolerances": {{"min_n": 10000.0, "distance_tol": 1e-3}},
        "seeds": {{"count": 20, "list": {seeds}}}
    }}"#,
        seeds = seeds_list()
    ));
    let out = run_invariance_experiment(&cfg, 0).unwrap();
    let item = out
        .items
        .iter()
        .find(|i| i.name == "constant(1).II.outer_containment")
        .unwrap();
    let outer = per_seed(&item.values, "per_seed_outer");
    let runmax = per_seed(&item.values, "per_seed_zeta1_runmax");
    let elapsed = started.elapsed();

    // clause 1: running max of |zeta_{n_k}(1)| in [0.75, 1.05] for >= 90% of
    // seeds, over n_k >= 1e4 (the small-n_k entries make the window
    // unattainable for every seed, see the outer-distance qualifier)
    let frac_window = fraction_within(&runmax, 0.75, 1.05);
    // clause 2: max_k d(zeta_{n_k}, K_1) <= 0.35 for n_k >= 1e4, >= 90%
    let frac_outer = fraction_within(&outer, 0.0, 0.35);
    let runtime_ok = elapsed.as_secs_f64() < 300.0;
    let pass = frac_window >= 0.9 && frac_outer >= 0.9 && runtime_ok;
    assert!(
        verdict(
            "criterion 8 (classical regression)",
            pass,
            &format!(
                "window [0.75,1.05]: {:.0}% of seeds (runmax values {:?}); outer <= 0.35: {:.0}% (max {:.3}); {} s",
                100.0 * frac_window,
                runmax.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>(),
                100.0 * frac_outer,
                outer.iter().cloned().fold(0.0f64, f64::max),
                elapsed.as_secs()
            )
        ),
        "classical Strassen regression failed (see printed per-seed values)"
    );
}

#[test]
fn criterion_09_g_case_envelope() {
    let cfg = lil_config(&format!(
        r#"{{
        "interval": {{"sigma_low": 1.0, "sigma_high": 2.0}},
        "policies": [
            {{"kind": "constant", "sigma": 1.0}},
            {{"kind": "constant", "sigma": 2.0}},
            {{"kind": "regime_switching", "rate": 1.0, "values": [1.0, 2.0]}}
        ],
        "schedule": {{"kind": "geometric", "c": 1.5, "count": 64}},
        "horizon_cap": 10000000,
        "grid": {{"out_points": 64, "interp_m": 4, "steps_per_unit": 1}},
        "net": {{"m": 4, "levels": 2, "max_paths": 20000, "radius_samples": 32}},
        "items": ["II", "III", "IV"],
        "tolerances": {{"min_n": 10000.0, "distance_tol": 1e-3}},
        "seeds": {{"count": 20, "list": {seeds}}}
    }}"#,
        seeds = seeds_list()
    ));
    let out = run_invariance_experiment(&cfg, 0).unwrap();
    let find = |name: &str| {
        out.items
            .iter()
            .find(|i| i.name == name)
            .unwrap_or_else(|| panic!("missing item {name}"))
    };

    let mut pass = true;
    let mut detail = String::new();
    // constant policies: item-8 checks against K_sigma (thresholds scale
    // with sigma)
    for sigma in [1.0f64, 2.0] {
        let iv_item = find(&format!("constant({sigma}).IV.constant_beta_cluster"));
        let outer = per_seed(&iv_item.values, "per_seed_outer");
        let runmax = per_seed(&iv_item.values, "per_seed_zeta1_runmax");
        let f_window = fraction_within(&runmax, 0.75 * sigma, 1.05 * sigma);
        let f_outer = fraction_within(&outer, 0.0, 0.35 * sigma);
        detail.push_str(&format!(
            "sigma={sigma}: window {:.0}%, outer {:.0}%; ",
            100.0 * f_window,
            100.0 * f_outer
        ));
        pass &= f_window >= 0.9 && f_outer >= 0.9;
    }
    // regime switching: outer containment in K_2 at the absolute 0.35 bound
    let regime = find("regime_switching(rate=1,2 values).II.outer_containment");
    let outer = per_seed(&regime.values, "per_seed_outer");
    let f_outer = fraction_within(&outer, 0.0, 0.35);
    detail.push_str(&format!("regime outer<=0.35: {:.0}%; ", 100.0 * f_outer));
    pass &= f_outer >= 0.9;
    // regime switching: K_1-net coverage minima non-increasing with
    // terminal median <= 0.6
    let cov = find("regime_switching(rate=1,2 values).III.coverage");
    let med = per_seed(&cov.values, "per_seed_cov_median");
    let monotone = cov.values["monotone"].as_bool().unwrap();
    let f_cov = fraction_within(&med, 0.0, 0.6);
    detail.push_str(&format!(
        "coverage median<=0.6: {:.0}% (monotone: {monotone})",
        100.0 * f_cov
    ));
    pass &= monotone && f_cov >= 0.9;

    assert!(
        verdict("criterion 9 (G-case envelope)", pass, &detail),
        "G-case envelope checks failed (see printed per-clause fractions)"
    );
}

fn examples_outcome(e41: &[f64], e42: &[f64], n_max: u64) -> glil::harness::LilOutcome {
    let cfg = lil_config(&format!(
        r#"{{
        "interval": {{"sigma_low": 1.0, "sigma_high": 2.0}},
        "policies": [
            {{"kind": "constant", "sigma": 1.0}},
            {{"kind": "constant", "sigma": 2.0}}
        ],
        "schedule": {{"kind": "geometric", "c": 2.0, "count": 20}},
        "horizon_cap": {n_max},
        "grid": {{"out_points": 64, "interp_m": 4, "steps_per_unit": 1}},
        "seeds": {{"count": 20, "list": {seeds}}},
        "examples": {{"n_max": {n_max}, "e41_alphas": {e41:?}, "e42_exponents": {e42:?}, "burn_in": 100}}
    }}"#,
        seeds = seeds_list()
    ));
    run_examples_experiment(&cfg, 0).unwrap()
}

#[test]
fn criterion_10_example_4_2() {
    // general-a quadrature must reproduce the particular constants
    let c2 = abs_power_constant(2.0).unwrap();
    let c1 = abs_power_constant(1.0).unwrap();
    let four_over_pi2 = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let quad_ok =
        (c2 - four_over_pi2).abs() <= 1e-6 && (c1 - 1.0 / 3f64.sqrt()).abs() <= 1e-6;

    let out = examples_outcome(&[], &[2.0], 1_000_000);
    let mut pass = quad_ok;
    let mut detail = format!(
        "c(2) = {c2:.9} vs 4/pi^2 (diff {:.1e}); c(1) diff {:.1e}; ",
        (c2 - four_over_pi2).abs(),
        (c1 - 1.0 / 3f64.sqrt()).abs()
    );
    for sigma in [1.0f64, 2.0] {
        let item = out
            .items
            .iter()
            .find(|i| i.name == format!("constant({sigma}).example_4_2(a=2)"))
            .unwrap();
        let runmax = per_seed(&item.values, "per_seed_runmax");
        let bound = sigma * sigma * four_over_pi2;
        let frac = fraction_within(&runmax, 0.5 * bound, 1.3 * bound);
        detail.push_str(&format!("sigma={sigma}: window {:.0}%; ", 100.0 * frac));
        pass &= frac >= 0.9;
    }
    assert!(
        verdict("criterion 10 (example: absolute-power sums)", pass, &detail),
        "absolute-power statistic checks failed (see printed fractions)"
    );
}

#[test]
fn criterion_11_example_4_1() {
    // the f = 1 bound constant is 1/sqrt(3) in closed form
    let iv = VolatilityInterval::new(1.0, 1.0).unwrap();
    let (lo, hi) = example_bounds(&ExampleKind::WeightedPower { alpha: 0.0 }, &iv).unwrap();
    let exact = 1.0 / 3f64.sqrt();
    let const_ok = (lo - exact).abs() <= 1e-12 && (hi - exact).abs() <= 1e-12;

    let out = examples_outcome(&[0.0], &[], 1_000_000);
    let mut pass = const_ok;
    let mut detail = format!("bound constant diff {:.1e}; ", (lo - exact).abs());
    for sigma in [1.0f64, 2.0] {
        let item = out
            .items
            .iter()
            .find(|i| i.name == format!("constant({sigma}).example_4_1(alpha=0)"))
            .unwrap();
        let runmax = per_seed(&item.values, "per_seed_runmax");
        let bound = sigma * exact;
        let frac = fraction_within(&runmax, 0.4 * bound, 1.3 * bound);
        detail.push_str(&format!("sigma={sigma}: window {:.0}%; ", 100.0 * frac));
        pass &= frac >= 0.9;
    }
    assert!(
        verdict("criterion 11 (example: weighted sums)", pass, &detail),
        "weighted-sum statistic checks failed (see printed fractions)"
    );
}

#[test]
fn criterion_12_report_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(
        &cfg_path,
        r#"{
            "interval": {"sigma_low": 1.0, "sigma_high": 2.0},
            "policies": [
                {"kind": "constant", "sigma": 1.5},
                {"kind": "regime_switching", "rate": 1.0, "values": [1.0, 2.0]}
            ],
            "schedule": {"kind": "geometric", "c": 2.0, "count": 10},
            "horizon_cap": 20000,
            "grid": {"out_points": 32, "interp_m": 4, "steps_per_unit": 1},
            "net": {"m": 4, "levels": 1, "max_paths": 5000, "radius_samples": 8},
            "tolerances": {"min_n": 100.0},
            "seeds": {"count": 3}
        }"#,
    )
    .unwrap();
    let run = |sub: &str| -> (Vec<u8>, Vec<u8>) {
        let out_dir = tempfile::tempdir().unwrap();
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_glil"))
            .env_remove("GLIL_SEED")
            .args([
                sub,
                "--config",
                cfg_path.to_str().unwrap(),
                "--seed",
                "7",
                "--out",
                out_dir.path().to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        (
            fs::read(out_dir.path().join("report.json")).unwrap(),
            fs::read(out_dir.path().join("report.csv")).unwrap(),
        )
    };
    let (json_a, csv_a) = run("lil");
    let (json_b, csv_b) = run("lil");
    let pass = json_a == json_b && csv_a == csv_b;
    assert!(
        verdict(
            "criterion 12 (byte-identical reports)",
            pass,
            &format!(
                "report.json {} bytes, report.csv {} bytes, identical across runs: {pass}",
                json_a.len(),
                csv_a.len()
            )
        ),
        "identical (config, seed) runs produced different bytes"
    );
}
