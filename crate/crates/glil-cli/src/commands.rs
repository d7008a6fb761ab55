//! Subcommand implementations.

use std::fs;
use std::time::Instant;

use glil::gheat::{
    check_shift_inequality, check_tail_monotonicity, conjugate_g_expectation, g_expectation,
    pde_tolerance, upper_distribution_bounds, PdeSolverParams,
};
use glil::harness::{
    functional_image_experiment, run_examples_experiment, run_invariance_experiment,
    ExperimentReport, FunctionalMap, LilOutcome,
};
use glil::model::TimeGrid;
use glil::sim::{
    estimate_capacity_bounds, path_seed, realized_quadratic_variation, simulate_path,
    PolicyFamily,
};
use glil::strassen::{ball_net, dist_to_strassen_ball, RescaledPath};

use crate::args::{
    parse_event, parse_interval, parse_phi, parse_policy, parse_values, CapacityArgs, Cli,
    Command, GheatArgs, LilArgs, SimulateArgs, StrassenCommand,
};
use crate::config::{effective_seed, load_config};
use crate::error::CliError;
use crate::output::{config_hash, ensure_outdir, write_report};

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gheat(args) => gheat(&cli, args),
        Command::Simulate(args) => simulate(&cli, args),
        Command::Capacity(args) => capacity(&cli, args),
        Command::Strassen(args) => match &args.command {
            StrassenCommand::Dist { beta, tol, values } => strassen_dist(*beta, *tol, values),
            StrassenCommand::Net {
                beta,
                m,
                levels,
                cap,
                samples,
            } => strassen_net(&cli, *beta, *m, *levels, *cap, *samples),
            StrassenCommand::Cluster { config } => strassen_cluster(&cli, config),
        },
        Command::Lil(args) => lil(&cli, args, LilMode::Invariance),
        Command::Examples(args) => lil(&cli, args, LilMode::Examples),
    }
}

fn gheat(cli: &Cli, args: &GheatArgs) -> Result<(), CliError> {
    let interval = parse_interval(&args.sigma).map_err(CliError::Input)?;
    let phi = parse_phi(&args.phi).map_err(CliError::Input)?;
    let params =
        PdeSolverParams::with_resolution(args.t, &interval, args.points, args.halfwidth_sigmas)?;

    let value = g_expectation(&phi, args.t, &interval, &params)?;
    let conj = conjugate_g_expectation(&phi, args.t, &interval, &params)?;
    println!(
        "E[phi(B_t)]   = {value:.6} ± {:.1e}",
        pde_tolerance(value)
    );
    println!(
        "eps[phi(B_t)] = {conj:.6} ± {:.1e}",
        pde_tolerance(conj)
    );

    if let Some(y) = args.dist_y {
        let (lo, hi) = upper_distribution_bounds(y, args.t, &interval, args.delta, &params)?;
        println!("V(B_t <= {y}) in [{lo:.6}, {hi:.6}] (sandwich width {})", args.delta);
    }
    if let Some(b) = args.shift_b {
        let margin = check_shift_inequality(&phi, b, args.t, &interval, &params)?;
        println!("shift-inequality margin at b = {b}: {margin:.6e}");
    }
    if let Some(spec) = &args.tail {
        let (s, t) = spec
            .split_once(',')
            .ok_or_else(|| CliError::Input(format!("--tail expects \"s,t\", got {spec:?}")))?;
        let s: f64 = s.trim().parse().map_err(|e| CliError::Input(format!("--tail: {e}")))?;
        let t: f64 = t.trim().parse().map_err(|e| CliError::Input(format!("--tail: {e}")))?;
        let ys = parse_values(&args.ys).map_err(CliError::Input)?;
        let tail_params = PdeSolverParams::with_resolution(
            t,
            &interval,
            args.points,
            args.halfwidth_sigmas,
        )?;
        for pt in check_tail_monotonicity(s, t, &ys, &interval, args.delta, &tail_params)? {
            println!(
                "y = {}: V(|B_{s}| >= y) = {:.5} (gap {:.1e})  V(|B_{t}| >= y) = {:.5} (gap {:.1e})  monotone: {}",
                pt.y,
                pt.v_s,
                pt.gap_s,
                pt.v_t,
                pt.gap_t,
                pt.v_s <= pt.v_t + 1e-4
            );
        }
    }
    if cli.verbose > 0 {
        eprintln!(
            "solver: L = {:.3}, M = {}, N_t = {}",
            params.halfwidth, params.space_points, params.time_steps
        );
    }
    Ok(())
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), CliError> {
    let interval = parse_interval(&args.sigma).map_err(CliError::Input)?;
    let policy = parse_policy(&args.policy, &interval).map_err(CliError::Input)?;
    let grid = TimeGrid::new(args.horizon, args.steps)?;
    let seed = effective_seed(cli.seed, None)?;

    let mut paths = Vec::with_capacity(args.paths);
    for i in 0..args.paths {
        paths.push(simulate_path(&policy, &grid, path_seed(seed, i as u64))?);
    }
    for (i, p) in paths.iter().enumerate() {
        let terminal = *p.values().last().unwrap();
        if args.qv {
            let qv = realized_quadratic_variation(p, 0.0, args.horizon)?;
            println!(
                "path {i}: X_T = {terminal:.6}, QV/T = {:.6}",
                qv / args.horizon
            );
        } else {
            println!("path {i}: X_T = {terminal:.6}");
        }
    }
    if args.write {
        ensure_outdir(&cli.out)?;
        let mut text = String::from("t");
        for i in 0..paths.len() {
            text.push_str(&format!(",path{i}"));
        }
        text.push('\n');
        for k in 0..=args.steps {
            text.push_str(&format!("{}", grid.time_at(k)));
            for p in &paths {
                text.push_str(&format!(",{}", p.values()[k]));
            }
            text.push('\n');
        }
        let file = cli.out.join("paths.csv");
        fs::write(&file, text)
            .map_err(|e| CliError::Internal(format!("writing {}: {e}", file.display())))?;
        eprintln!("wrote {}", file.display());
    }
    Ok(())
}

fn capacity(cli: &Cli, args: &CapacityArgs) -> Result<(), CliError> {
    let interval = parse_interval(&args.sigma).map_err(CliError::Input)?;
    let event = parse_event(&args.event).map_err(CliError::Input)?;
    let policies = args
        .policies
        .split(';')
        .map(|s| parse_policy(s.trim(), &interval))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::Input)?;
    let labels: Vec<String> = policies.iter().map(|p| p.label()).collect();
    let family = PolicyFamily::new(policies, &interval)?;
    let grid = TimeGrid::new(args.horizon, args.steps)?;
    let seed = effective_seed(cli.seed, None)?;

    let cb = estimate_capacity_bounds(&event, &family, &grid, args.paths, seed)?;
    let json = serde_json::json!({
        "event": cb.event,
        "n_paths": cb.n_paths,
        "seed": seed,
        // finite families bound V from below and v from above only
        "upper_capacity_lower_bound": cb.upper_capacity_lb,
        "upper_capacity_stderr": cb.upper_capacity_lb_stderr,
        "upper_capacity_argmax_policy": labels[cb.upper_capacity_argmax],
        "lower_capacity_upper_bound": cb.lower_capacity_ub,
        "lower_capacity_stderr": cb.lower_capacity_ub_stderr,
        "lower_capacity_argmin_policy": labels[cb.lower_capacity_argmin],
        "per_policy": labels.iter().zip(&cb.per_policy).map(|(l, (f, se))| {
            serde_json::json!({"policy": l, "frequency": f, "stderr": se})
        }).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&json)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    println!("{text}");
    if args.write {
        ensure_outdir(&cli.out)?;
        let file = cli.out.join("capacity.json");
        fs::write(&file, format!("{text}\n"))
            .map_err(|e| CliError::Internal(format!("writing {}: {e}", file.display())))?;
        eprintln!("wrote {}", file.display());
    }
    Ok(())
}

fn strassen_dist(beta: f64, tol: f64, values: &str) -> Result<(), CliError> {
    let values = parse_values(values).map_err(CliError::Input)?;
    let path = RescaledPath::from_values(0.0, values)?;
    let d = dist_to_strassen_ball(&path, beta, tol)?;
    println!("d(x, K_{beta}) = {d:.6} (tol {tol})");
    Ok(())
}

fn strassen_net(
    cli: &Cli,
    beta: f64,
    m: usize,
    levels: usize,
    cap: usize,
    samples: usize,
) -> Result<(), CliError> {
    let seed = effective_seed(cli.seed, None)?;
    let net = ball_net(beta, m, levels, cap, samples, seed)?;
    println!(
        "net of K_{beta} on {m} intervals, {levels} levels: {} paths, sampled radius {:.4}",
        net.paths.len(),
        net.radius_estimate
    );
    Ok(())
}

fn strassen_cluster(cli: &Cli, config: &std::path::Path) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let seed = effective_seed(cli.seed, cfg.seed)?;
    let hash = config_hash(&cfg)?;
    let outcome = run_invariance_experiment(&cfg, seed)?;
    let report = ExperimentReport::new(hash, seed, outcome.items);
    let (json_path, csv_path) =
        write_report(&cli.out, "cluster_report", &report, &outcome.csv_rows)?;
    for item in &report.items {
        println!("{} {}", if item.pass { "pass" } else { "FAIL" }, item.name);
    }
    eprintln!(
        "wrote {}{}",
        json_path.display(),
        csv_path
            .map(|p| format!(" and {}", p.display()))
            .unwrap_or_default()
    );
    Ok(())
}

enum LilMode {
    Invariance,
    Examples,
}

fn parse_image_maps(spec: &str) -> Result<Vec<FunctionalMap>, CliError> {
    spec.split(',')
        .map(|s| match s.trim() {
            "eval1" => Ok(FunctionalMap::EvaluateAtOne),
            "runmax" => Ok(FunctionalMap::RunningMax),
            "supnorm" => Ok(FunctionalMap::SupNorm),
            "integral" => Ok(FunctionalMap::Integral),
            "zero" => Ok(FunctionalMap::Zero),
            other => Err(CliError::Input(format!(
                "unknown image map {other:?}; expected eval1|runmax|supnorm|integral|zero"
            ))),
        })
        .collect()
}

fn lil(cli: &Cli, args: &LilArgs, mode: LilMode) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = load_config(&args.config)?;
    let seed = effective_seed(cli.seed, cfg.seed)?;
    let hash = config_hash(&cfg)?;

    let (stem, mut outcome): (&str, LilOutcome) = match mode {
        LilMode::Invariance => ("report", run_invariance_experiment(&cfg, seed)?),
        LilMode::Examples => ("examples_report", run_examples_experiment(&cfg, seed)?),
    };
    // each image map has its own CSV layout, so each goes to its own file
    let mut image_files = Vec::new();
    if let Some(spec) = &args.image {
        for map in parse_image_maps(spec)? {
            let extra = functional_image_experiment(map, &cfg, seed)?;
            outcome.items.extend(extra.items);
            if !extra.csv_rows.is_empty() {
                image_files.push((map.label(), extra.csv_rows));
            }
        }
    }
    if outcome.truncated {
        eprintln!("note: schedule truncated at the configured horizon cap");
    }

    let report = ExperimentReport::new(hash, seed, outcome.items);
    let (json_path, csv_path) = write_report(&cli.out, stem, &report, &outcome.csv_rows)?;
    for (label, rows) in image_files {
        let text = glil::harness::csv_text(&rows)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let file = cli.out.join(format!("{stem}_image_{label}.csv"));
        fs::write(&file, text)
            .map_err(|e| CliError::Internal(format!("writing {}: {e}", file.display())))?;
    }

    for item in &report.items {
        println!(
            "{} {}",
            if item.pass { "pass" } else { "FAIL" },
            item.name
        );
    }
    eprintln!(
        "wrote {}{} in {} ms (seed {seed}, config {})",
        json_path.display(),
        csv_path
            .map(|p| format!(" and {}", p.display()))
            .unwrap_or_default(),
        started.elapsed().as_millis(),
        report.config_hash
    );
    Ok(())
}
