//! Experiment drivers: one long driver path per seed serves every n_k via
//! prefix rescaling. Paths are streamed — only the values needed for the
//! rescaled grids (and integer-time statistic accumulators) are kept, so a
//! 10^7-step run stays memory-light.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{GlilError, Result};
use crate::model::loglog_scale;
use crate::sim::policy::driver_rng;
use crate::sim::VolatilityPolicy;
use crate::strassen::{ball_net, dist_to_strassen_ball, BallNet, RescaledPath};

use super::config::{ExamplesConfig, ExperimentConfig, Runtime};
use super::report::{num, num_slice, CsvRow, ReportItem};
use super::statistics::{example_bounds, normalizer_abs_power, normalizer_weighted, ExampleKind, FunctionalMap};

/// Items plus the per-(policy, seed, n_k) CSV records of one experiment.
#[derive(Debug, Clone)]
pub struct LilOutcome {
    pub items: Vec<ReportItem>,
    pub csv_rows: Vec<CsvRow>,
    pub truncated: bool,
}

/// (steps per unit time, sink for the value at each integer time).
type IntegerTap<'a> = (u64, &'a mut dyn FnMut(u64, f64));

/// Streams one driver path, returning values at `times` (linear
/// interpolation between simulation grid points). When `integer_tap` is
/// set, the value at every integer time 1..=horizon is fed to it.
fn stream_path(
    policy: &VolatilityPolicy,
    seed: u64,
    dt: f64,
    total_steps: u64,
    times: &[f64],
    mut integer_tap: Option<IntegerTap<'_>>,
) -> Result<Vec<f64>> {
    let mut needed: Vec<u64> = Vec::with_capacity(2 * times.len());
    for &s in times {
        if s < 0.0 || s / dt > total_steps as f64 * (1.0 + 1e-12) {
            return Err(GlilError::Coverage(format!(
                "requested time {s} beyond simulated horizon"
            )));
        }
        let pos = s / dt;
        let lo = (pos.floor() as u64).min(total_steps);
        needed.push(lo);
        if pos - lo as f64 > 1e-12 {
            needed.push((lo + 1).min(total_steps));
        }
    }
    needed.sort_unstable();
    needed.dedup();
    let mut recorded: Vec<f64> = vec![0.0; needed.len()];

    let mut rng = driver_rng(seed);
    let mut state = policy.init_state(seed);
    let sqrt_dt = dt.sqrt();
    let mut x = 0.0f64;
    let mut ptr = 0usize;
    if needed.first() == Some(&0) {
        recorded[0] = 0.0;
        ptr = 1;
    }
    for k in 0..total_steps {
        let theta = policy.control(&mut state, k as f64 * dt, dt, x);
        let z: f64 = rng.sample(StandardNormal);
        x += theta * sqrt_dt * z;
        let step = k + 1;
        if ptr < needed.len() && needed[ptr] == step {
            recorded[ptr] = x;
            ptr += 1;
        }
        if let Some((spu, tap)) = integer_tap.as_mut() {
            if step % *spu == 0 {
                (tap)(step / *spu, x);
            }
        }
    }

    let lookup = |step: u64| -> f64 {
        let idx = needed.binary_search(&step).expect("step was recorded");
        recorded[idx]
    };
    Ok(times
        .iter()
        .map(|&s| {
            let pos = s / dt;
            let lo = (pos.floor() as u64).min(total_steps);
            let w = pos - lo as f64;
            if w <= 1e-12 || lo >= total_steps {
                lookup(lo)
            } else {
                (1.0 - w) * lookup(lo) + w * lookup(lo + 1)
            }
        })
        .collect())
}

/// Rescaled paths ζ_{n_k} for every schedule entry, from one streamed path.
fn compute_zetas(
    cfg: &ExperimentConfig,
    rt: &Runtime,
    policy: &VolatilityPolicy,
    seed: u64,
) -> Result<Vec<RescaledPath>> {
    let p = cfg.grid.out_points;
    let entries = &rt.schedule.entries;
    let dt = 1.0 / cfg.grid.steps_per_unit as f64;
    let max_n = *entries.last().unwrap();
    let total_steps = (max_n / dt).ceil() as u64;
    let mut times = Vec::with_capacity(entries.len() * p);
    for &n in entries {
        for j in 1..=p {
            times.push(n * j as f64 / p as f64);
        }
    }
    let sampled = stream_path(policy, seed, dt, total_steps, &times, None)?;
    let mut zetas = Vec::with_capacity(entries.len());
    for (k, &n) in entries.iter().enumerate() {
        let scale = loglog_scale(n)?;
        let mut vals = Vec::with_capacity(p + 1);
        vals.push(0.0);
        for j in 0..p {
            vals.push(sampled[k * p + j] / scale);
        }
        zetas.push(RescaledPath::from_values(n, vals)?);
    }
    Ok(zetas)
}

fn node_energy(zeta: &RescaledPath, m: usize) -> f64 {
    let p = zeta.intervals();
    let stride = p / m;
    let mf = m as f64;
    let mut e = 0.0;
    for i in 0..m {
        let d = zeta.values()[(i + 1) * stride] - zeta.values()[i * stride];
        e += d * d;
    }
    mf * e
}

struct RowData {
    n: f64,
    zeta1: f64,
    runmax_all: f64,
    dist_outer: f64,
    eta_energy: f64,
}

struct IvMetrics {
    outer: f64,
    cov_median: f64,
}

struct SeedLilMetrics {
    seed: u64,
    rows: Vec<RowData>,
    outer_max: f64,
    window_runmax: f64,
    frac_within_eps: f64,
    max_nn: f64,
    cov_median: f64,
    cov_max: f64,
    cov_monotone: bool,
    iv: Option<IvMetrics>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Terminal running minima of sup distances from the sequence to each net
/// target, checking the cumulative minima are non-increasing.
fn coverage_minima(zetas: &[RescaledPath], net: &BallNet, grid: usize) -> Result<(Vec<f64>, bool)> {
    let targets: Vec<RescaledPath> = net
        .paths
        .iter()
        .map(|t| t.resample(grid))
        .collect::<Result<Vec<_>>>()?;
    let mut monotone = true;
    let minima = targets
        .iter()
        .map(|target| {
            let mut running = f64::INFINITY;
            for z in zetas {
                let d = z.sup_distance(target)?;
                let next = running.min(d);
                if next > running {
                    monotone = false;
                }
                running = next;
            }
            Ok(running)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((minima, monotone))
}

fn run_lil_seed(
    cfg: &ExperimentConfig,
    rt: &Runtime,
    policy: &VolatilityPolicy,
    seed: u64,
    net_inner: &BallNet,
    net_iv: Option<(f64, &BallNet)>,
) -> Result<SeedLilMetrics> {
    let zetas = compute_zetas(cfg, rt, policy, seed)?;
    let tol = cfg.tolerances.distance_tol;
    let min_n = cfg.tolerances.min_n;
    let p = cfg.grid.out_points;

    let dists: Vec<f64> = zetas
        .iter()
        .map(|z| dist_to_strassen_ball(z, rt.beta_outer, tol))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(zetas.len());
    let mut runmax_all = 0.0f64;
    let mut window_runmax = 0.0f64;
    let mut outer_max = 0.0f64;
    let mut within = 0usize;
    let mut tail_count = 0usize;
    for (k, z) in zetas.iter().enumerate() {
        let zeta1 = z.value_at_one();
        runmax_all = runmax_all.max(zeta1.abs());
        if z.scale_param() >= min_n {
            tail_count += 1;
            window_runmax = window_runmax.max(zeta1.abs());
            outer_max = outer_max.max(dists[k]);
            if dists[k] <= cfg.tolerances.epsilon {
                within += 1;
            }
        }
        rows.push(RowData {
            n: z.scale_param(),
            zeta1,
            runmax_all,
            dist_outer: dists[k],
            eta_energy: node_energy(z, cfg.grid.interp_m),
        });
    }
    let frac_within_eps = if tail_count > 0 {
        within as f64 / tail_count as f64
    } else {
        1.0
    };

    // pairwise nearest-neighbor sup distances over the tail (compactness proxy)
    let tail: Vec<&RescaledPath> = zetas
        .iter()
        .filter(|z| z.scale_param() >= min_n)
        .collect();
    let mut max_nn = 0.0f64;
    if tail.len() >= 2 {
        for (i, a) in tail.iter().enumerate() {
            let mut nn = f64::INFINITY;
            for (j, b) in tail.iter().enumerate() {
                if i != j {
                    nn = nn.min(a.sup_distance(b)?);
                }
            }
            max_nn = max_nn.max(nn);
        }
    }

    let (mut cov, cov_monotone) = coverage_minima(&zetas, net_inner, p)?;
    let cov_max = cov.iter().cloned().fold(0.0f64, f64::max);
    let cov_median = median(&mut cov);

    let iv = match net_iv {
        Some((beta, net)) => {
            let mut outer = 0.0f64;
            for z in &zetas {
                if z.scale_param() >= min_n {
                    outer = outer.max(dist_to_strassen_ball(z, beta, tol)?);
                }
            }
            let (mut cov_iv, _) = coverage_minima(&zetas, net, p)?;
            Some(IvMetrics {
                outer,
                cov_median: median(&mut cov_iv),
            })
        }
        None => None,
    };

    Ok(SeedLilMetrics {
        seed,
        rows,
        outer_max,
        window_runmax,
        frac_within_eps,
        max_nn,
        cov_median,
        cov_max,
        cov_monotone,
        iv,
    })
}

fn pass_fraction(oks: &[bool], required: f64) -> bool {
    if oks.is_empty() {
        return false;
    }
    let frac = oks.iter().filter(|&&b| b).count() as f64 / oks.len() as f64;
    frac >= required - 1e-12
}

/// Runs items (I)–(IV) for every configured policy and seed: one long path
/// per seed, rescaled at each schedule entry.
pub fn run_invariance_experiment(cfg: &ExperimentConfig, base_seed: u64) -> Result<LilOutcome> {
    let rt = cfg.to_runtime()?;
    let seeds = cfg.seeds_for(base_seed);
    let tols = &cfg.tolerances;
    let want = |item: &str| cfg.items.iter().any(|i| i == item);

    let net_inner = ball_net(
        rt.beta_inner,
        cfg.net.m,
        cfg.net.levels,
        cfg.net.max_paths,
        cfg.net.radius_samples,
        base_seed ^ 0x6e65745f696e6e65,
    )?;

    let mut items = Vec::new();
    let mut csv_rows = Vec::new();
    items.push(ReportItem {
        name: "schedule".into(),
        values: json!({
            "entries": num_slice(&rt.schedule.entries),
            "count": rt.schedule.entries.len(),
        }),
        tolerances: json!({}),
        bounds: json!({"horizon_cap": num(cfg.horizon_cap)}),
        pass: true,
    });

    for (label, policy) in &rt.policies {
        let net_iv = match policy {
            VolatilityPolicy::Constant { sigma } if want("IV") => Some((
                *sigma,
                ball_net(
                    *sigma,
                    cfg.net.m,
                    cfg.net.levels,
                    cfg.net.max_paths,
                    cfg.net.radius_samples,
                    base_seed ^ 0x6e65745f69762020,
                )?,
            )),
            _ => None,
        };
        let per_seed: Vec<SeedLilMetrics> = seeds
            .par_iter()
            .map(|&s| {
                run_lil_seed(
                    cfg,
                    &rt,
                    policy,
                    s,
                    &net_inner,
                    net_iv.as_ref().map(|(b, n)| (*b, n)),
                )
            })
            .collect::<Result<Vec<_>>>()?;

        for m in &per_seed {
            for row in &m.rows {
                csv_rows.push(CsvRow {
                    policy: label.clone(),
                    seed: m.seed,
                    n: row.n,
                    metrics: vec![
                        ("zeta.value_at_1".into(), row.zeta1),
                        ("zeta.abs_runmax".into(), row.runmax_all),
                        ("II.dist_outer".into(), row.dist_outer),
                        ("interp.node_energy".into(), row.eta_energy),
                    ],
                });
            }
        }

        if want("I") {
            let oks: Vec<bool> = per_seed
                .iter()
                .map(|m| m.outer_max <= tols.epsilon)
                .collect();
            items.push(ReportItem {
                name: format!("{label}.I.relative_compactness"),
                values: json!({
                    "per_seed_max_dist": num_slice(&per_seed.iter().map(|m| m.outer_max).collect::<Vec<_>>()),
                    "per_seed_frac_within_eps": num_slice(&per_seed.iter().map(|m| m.frac_within_eps).collect::<Vec<_>>()),
                    "per_seed_max_nn_dist": num_slice(&per_seed.iter().map(|m| m.max_nn).collect::<Vec<_>>()),
                }),
                tolerances: json!({
                    "epsilon": num(tols.epsilon),
                    "min_n": num(tols.min_n),
                    "seed_pass_fraction": num(tols.seed_pass_fraction),
                }),
                bounds: json!({"beta_outer": num(rt.beta_outer)}),
                pass: pass_fraction(&oks, tols.seed_pass_fraction),
            });
        }
        if want("II") {
            let oks: Vec<bool> = per_seed
                .iter()
                .map(|m| m.outer_max <= tols.outer_threshold)
                .collect();
            items.push(ReportItem {
                name: format!("{label}.II.outer_containment"),
                values: json!({
                    "per_seed_outer": num_slice(&per_seed.iter().map(|m| m.outer_max).collect::<Vec<_>>()),
                    "per_seed_zeta1_runmax": num_slice(&per_seed.iter().map(|m| m.window_runmax).collect::<Vec<_>>()),
                }),
                tolerances: json!({
                    "outer_threshold": num(tols.outer_threshold),
                    "min_n": num(tols.min_n),
                    "seed_pass_fraction": num(tols.seed_pass_fraction),
                }),
                bounds: json!({"beta_outer": num(rt.beta_outer)}),
                pass: pass_fraction(&oks, tols.seed_pass_fraction),
            });
        }
        if want("III") {
            let thr = tols.coverage_median * rt.beta_inner;
            let oks: Vec<bool> = per_seed
                .iter()
                .map(|m| m.cov_median <= thr && m.cov_monotone)
                .collect();
            items.push(ReportItem {
                name: format!("{label}.III.coverage"),
                values: json!({
                    "per_seed_cov_median": num_slice(&per_seed.iter().map(|m| m.cov_median).collect::<Vec<_>>()),
                    "per_seed_cov_max": num_slice(&per_seed.iter().map(|m| m.cov_max).collect::<Vec<_>>()),
                    "monotone": per_seed.iter().all(|m| m.cov_monotone),
                    "net_size": net_inner.paths.len(),
                    "net_radius_estimate": num(net_inner.radius_estimate),
                }),
                tolerances: json!({
                    "coverage_median_threshold": num(thr),
                    "seed_pass_fraction": num(tols.seed_pass_fraction),
                }),
                bounds: json!({"beta_inner": num(rt.beta_inner)}),
                pass: pass_fraction(&oks, tols.seed_pass_fraction),
            });
        }
        if let Some((beta, _)) = &net_iv {
            let window = [tols.zeta1_window[0] * beta, tols.zeta1_window[1] * beta];
            let outer_thr = tols.outer_threshold * beta;
            let cov_thr = tols.coverage_median * beta;
            let oks: Vec<bool> = per_seed
                .iter()
                .map(|m| {
                    let iv = m.iv.as_ref().unwrap();
                    iv.outer <= outer_thr
                        && iv.cov_median <= cov_thr
                        && m.window_runmax >= window[0]
                        && m.window_runmax <= window[1]
                })
                .collect();
            items.push(ReportItem {
                name: format!("{label}.IV.constant_beta_cluster"),
                values: json!({
                    "beta": num(*beta),
                    "per_seed_outer": num_slice(&per_seed.iter().map(|m| m.iv.as_ref().unwrap().outer).collect::<Vec<_>>()),
                    "per_seed_cov_median": num_slice(&per_seed.iter().map(|m| m.iv.as_ref().unwrap().cov_median).collect::<Vec<_>>()),
                    "per_seed_zeta1_runmax": num_slice(&per_seed.iter().map(|m| m.window_runmax).collect::<Vec<_>>()),
                }),
                tolerances: json!({
                    "outer_threshold": num(outer_thr),
                    "coverage_median_threshold": num(cov_thr),
                    "zeta1_window": num_slice(&window),
                    "min_n": num(tols.min_n),
                    "seed_pass_fraction": num(tols.seed_pass_fraction),
                }),
                bounds: json!({"beta": num(*beta)}),
                pass: pass_fraction(&oks, tols.seed_pass_fraction),
            });
        }
    }

    Ok(LilOutcome {
        items,
        csv_rows,
        truncated: rt.schedule.truncated,
    })
}

struct SeedExampleMetrics {
    seed: u64,
    // per statistic: (runmax, terminal, checkpoint values aligned with checkpoints)
    e41: Vec<(f64, f64, Vec<f64>)>,
    e42: Vec<(f64, f64, Vec<f64>)>,
}

fn run_examples_seed(
    cfg: &ExperimentConfig,
    policy: &VolatilityPolicy,
    seed: u64,
    ex: &ExamplesConfig,
    checkpoints: &[u64],
) -> Result<SeedExampleMetrics> {
    let spu = cfg.grid.steps_per_unit as u64;
    let dt = 1.0 / spu as f64;
    let total_steps = ex.n_max * spu;
    let mut b = vec![0.0f64; ex.n_max as usize + 1];
    stream_path(
        policy,
        seed,
        dt,
        total_steps,
        &[],
        Some((spu, &mut |i, x| b[i as usize] = x)),
    )?;

    let run_stat = |weight: &dyn Fn(u64, f64) -> f64, normalize: &dyn Fn(u64, f64) -> f64| {
        let mut acc = 0.0f64;
        let mut runmax = 0.0f64;
        let mut terminal = 0.0f64;
        let mut at_checkpoints = Vec::with_capacity(checkpoints.len());
        let mut cp = 0usize;
        for n in 1..=ex.n_max {
            acc += weight(n, b[n as usize]);
            if n >= 3 {
                let stat = normalize(n, acc);
                if n >= ex.burn_in {
                    runmax = runmax.max(stat.abs());
                }
                terminal = stat;
                if cp < checkpoints.len() && checkpoints[cp] == n {
                    at_checkpoints.push(stat);
                    cp += 1;
                }
            }
        }
        (runmax, terminal, at_checkpoints)
    };

    let e41 = ex
        .e41_alphas
        .iter()
        .map(|&alpha| {
            run_stat(
                &|i, bi| (i as f64).powf(alpha) * bi,
                &|n, acc| acc * (n as f64).powf(-alpha) * normalizer_weighted(n).unwrap(),
            )
        })
        .collect();
    let e42 = ex
        .e42_exponents
        .iter()
        .map(|&a| {
            run_stat(
                &|_, bi| bi.abs().powf(a),
                &|n, acc| acc * normalizer_abs_power(a, n).unwrap(),
            )
        })
        .collect();

    Ok(SeedExampleMetrics { seed, e41, e42 })
}

/// Runs the weighted-sum and absolute-power statistics to `n_max`,
/// tracking running maxima against the limsup bound windows.
pub fn run_examples_experiment(cfg: &ExperimentConfig, base_seed: u64) -> Result<LilOutcome> {
    let rt = cfg.to_runtime()?;
    let ex = cfg
        .examples
        .clone()
        .ok_or_else(|| GlilError::Config("config has no examples section".into()))?;
    let seeds = cfg.seeds_for(base_seed);
    let checkpoints: Vec<u64> = rt
        .schedule
        .entries
        .iter()
        .map(|&n| n.round() as u64)
        .filter(|&n| n <= ex.n_max)
        .collect();

    let mut items = Vec::new();
    let mut csv_rows = Vec::new();

    for (label, policy) in &rt.policies {
        let per_seed: Vec<SeedExampleMetrics> = seeds
            .par_iter()
            .map(|&s| run_examples_seed(cfg, policy, s, &ex, &checkpoints))
            .collect::<Result<Vec<_>>>()?;

        // statistic bounds specialized to constant policies
        let bounds_for = |kind: &ExampleKind, power: f64| -> Result<(f64, f64)> {
            let (lo, hi) = example_bounds(kind, &rt.interval)?;
            match policy {
                VolatilityPolicy::Constant { sigma } => {
                    let c = lo / rt.interval.low().powf(power);
                    let b = sigma.powf(power) * c;
                    Ok((b, b))
                }
                _ => Ok((lo, hi)),
            }
        };

        for (si, &alpha) in ex.e41_alphas.iter().enumerate() {
            let (blo, bhi) = bounds_for(&ExampleKind::WeightedPower { alpha }, 1.0)?;
            let window = [ex.window_41[0] * blo, ex.window_41[1] * bhi];
            let oks: Vec<bool> = per_seed
                .iter()
                .map(|m| m.e41[si].0 >= window[0] && m.e41[si].0 <= window[1])
                .collect();
            items.push(ReportItem {
                name: format!("{label}.example_4_1(alpha={alpha})"),
                values: json!({
                    "per_seed_runmax": num_slice(&per_seed.iter().map(|m| m.e41[si].0).collect::<Vec<_>>()),
                    "per_seed_terminal": num_slice(&per_seed.iter().map(|m| m.e41[si].1).collect::<Vec<_>>()),
                    "n_max": ex.n_max,
                    "burn_in": ex.burn_in,
                }),
                tolerances: json!({
                    "window": num_slice(&window),
                    "seed_pass_fraction": num(cfg.tolerances.seed_pass_fraction),
                }),
                bounds: json!({"lower": num(blo), "upper": num(bhi)}),
                pass: pass_fraction(&oks, cfg.tolerances.seed_pass_fraction),
            });
        }
        for (si, &a) in ex.e42_exponents.iter().enumerate() {
            let (blo, bhi) = bounds_for(&ExampleKind::AbsPower { a }, a)?;
            let window = [ex.window_42[0] * blo, ex.window_42[1] * bhi];
            let oks: Vec<bool> = per_seed
                .iter()
                .map(|m| m.e42[si].0 >= window[0] && m.e42[si].0 <= window[1])
                .collect();
            items.push(ReportItem {
                name: format!("{label}.example_4_2(a={a})"),
                values: json!({
                    "per_seed_runmax": num_slice(&per_seed.iter().map(|m| m.e42[si].0).collect::<Vec<_>>()),
                    "per_seed_terminal": num_slice(&per_seed.iter().map(|m| m.e42[si].1).collect::<Vec<_>>()),
                    "n_max": ex.n_max,
                    "burn_in": ex.burn_in,
                }),
                tolerances: json!({
                    "window": num_slice(&window),
                    "seed_pass_fraction": num(cfg.tolerances.seed_pass_fraction),
                }),
                bounds: json!({"lower": num(blo), "upper": num(bhi)}),
                pass: pass_fraction(&oks, cfg.tolerances.seed_pass_fraction),
            });
        }

        for m in &per_seed {
            for (ci, &n) in checkpoints.iter().enumerate() {
                let mut metrics = Vec::new();
                for (si, &alpha) in ex.e41_alphas.iter().enumerate() {
                    metrics.push((format!("e41_alpha{alpha}.value"), m.e41[si].2[ci]));
                }
                for (si, &a) in ex.e42_exponents.iter().enumerate() {
                    metrics.push((format!("e42_a{a}.value"), m.e42[si].2[ci]));
                }
                csv_rows.push(CsvRow {
                    policy: label.clone(),
                    seed: m.seed,
                    n: n as f64,
                    metrics,
                });
            }
        }
    }

    Ok(LilOutcome {
        items,
        csv_rows,
        truncated: rt.schedule.truncated,
    })
}

/// Applies a continuous map to each ζ_{n_k} and compares running extremes
/// against the image bounds of K_σ̲ and K_σ̄.
pub fn functional_image_experiment(
    map: FunctionalMap,
    cfg: &ExperimentConfig,
    base_seed: u64,
) -> Result<LilOutcome> {
    let rt = cfg.to_runtime()?;
    let seeds = cfg.seeds_for(base_seed);
    let tols = &cfg.tolerances;

    let mut items = Vec::new();
    let mut csv_rows = Vec::new();
    for (label, policy) in &rt.policies {
        let per_seed: Vec<(u64, Vec<f64>)> = seeds
            .par_iter()
            .map(|&s| {
                let zetas = compute_zetas(cfg, &rt, policy, s)?;
                Ok((s, zetas.iter().map(|z| map.eval(z.values())).collect()))
            })
            .collect::<Result<Vec<_>>>()?;

        let image_low = map.image(rt.interval.low());
        let image_high = map.image(rt.interval.high());
        let window = [
            tols.zeta1_window[0] * image_low.1,
            tols.zeta1_window[1] * image_high.1,
        ];
        let mut runmaxes = Vec::with_capacity(per_seed.len());
        let mut runmins = Vec::with_capacity(per_seed.len());
        for (seed, vals) in &per_seed {
            let mut runmax = f64::NEG_INFINITY;
            let mut runmin = f64::INFINITY;
            for (k, &v) in vals.iter().enumerate() {
                runmax = runmax.max(v);
                runmin = runmin.min(v);
                csv_rows.push(CsvRow {
                    policy: label.clone(),
                    seed: *seed,
                    n: rt.schedule.entries[k],
                    metrics: vec![
                        (format!("image_{}.value", map.label()), v),
                        (format!("image_{}.runmax", map.label()), runmax),
                    ],
                });
            }
            runmaxes.push(runmax);
            runmins.push(runmin);
        }
        let oks: Vec<bool> = runmaxes
            .iter()
            .map(|&m| m >= window[0] && m <= window[1])
            .collect();
        items.push(ReportItem {
            name: format!("{label}.image_{}", map.label()),
            values: json!({
                "per_seed_runmax": num_slice(&runmaxes),
                "per_seed_runmin": num_slice(&runmins),
            }),
            tolerances: json!({
                "window": num_slice(&window),
                "seed_pass_fraction": num(tols.seed_pass_fraction),
            }),
            bounds: json!({
                "image_at_sigma_low": num_slice(&[image_low.0, image_low.1]),
                "image_at_sigma_high": num_slice(&[image_high.0, image_high.1]),
            }),
            pass: pass_fraction(&oks, tols.seed_pass_fraction),
        });
    }

    Ok(LilOutcome {
        items,
        csv_rows,
        truncated: rt.schedule.truncated,
    })
}

// Expose the streaming sampler to sibling tests.
#[cfg(test)]
pub(crate) fn stream_path_for_tests(
    policy: &VolatilityPolicy,
    seed: u64,
    dt: f64,
    total_steps: u64,
    times: &[f64],
) -> Result<Vec<f64>> {
    stream_path(policy, seed, dt, total_steps, times, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TimeGrid, VolatilityInterval};
    use crate::sim::simulate_path;

    #[test]
    fn streaming_matches_full_simulation() {
        let iv = VolatilityInterval::new(1.0, 2.0).unwrap();
        let policy = VolatilityPolicy::sign_feedback(2.0, 1.0, &iv).unwrap();
        let grid = TimeGrid::new(50.0, 200).unwrap();
        let full = simulate_path(&policy, &grid, 99).unwrap();
        let times = vec![0.0, 0.25, 12.5, 17.3, 50.0];
        let streamed = stream_path_for_tests(&policy, 99, 0.25, 200, &times).unwrap();
        for (s, t) in streamed.iter().zip(&times) {
            let expect = full.value_at(*t).unwrap();
            assert!(
                (s - expect).abs() < 1e-12,
                "mismatch at t={t}: {s} vs {expect}"
            );
        }
    }

    #[test]
    fn integer_tap_records_integer_times() {
        let iv = VolatilityInterval::new(1.0, 1.0).unwrap();
        let policy = VolatilityPolicy::constant(1.0, &iv).unwrap();
        let grid = TimeGrid::new(10.0, 40).unwrap();
        let full = simulate_path(&policy, &grid, 5).unwrap();
        let mut vals = [0.0f64; 11];
        stream_path(&policy, 5, 0.25, 40, &[], Some((4, &mut |i, x| vals[i as usize] = x)))
            .unwrap();
        for (i, v) in vals.iter().enumerate().skip(1) {
            let expect = full.values()[i * 4];
            assert_eq!(v.to_bits(), expect.to_bits(), "integer time {i}");
        }
    }
}
