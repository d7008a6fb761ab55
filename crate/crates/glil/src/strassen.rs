//! Functional geometry for the iterated-logarithm cluster theorems:
//! loglog rescaling, Strassen balls K_β, sup-norm distance to K_β, finite
//! nets, and cluster diagnostics.
//!
//! Distances use grid maxima only; interpolation error is folded into the
//! caller's tolerance. The distance to K_β is computed by bisection on the
//! blowup radius ε, with the inner feasibility problem — minimize the
//! discrete Dirichlet energy inside the sup-norm tube |y − x| ≤ ε, y(0)=0 —
//! solved by projected coordinate descent over the tridiagonal energy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{GlilError, Result};
use crate::model::{loglog_scale, SamplePath};

/// A path prefix rescaled to [0,1] by the loglog normalization
/// ζ_u(t) = B(ut)/√(2u log log u), sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledPath {
    scale_param: f64,
    values: Vec<f64>,
}

impl RescaledPath {
    pub fn from_values(scale_param: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(GlilError::Domain("rescaled path needs at least two points".into()));
        }
        if values[0] != 0.0 {
            return Err(GlilError::Domain("rescaled paths start at 0".into()));
        }
        Ok(RescaledPath {
            scale_param,
            values,
        })
    }

    /// The source scale u (integer n or real u).
    pub fn scale_param(&self) -> f64 {
        self.scale_param
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of grid intervals.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid sup distance; both paths must share the grid.
    pub fn sup_distance(&self, other: &RescaledPath) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(GlilError::Grid(format!(
                "grid mismatch: {} vs {} points",
                self.values.len(),
                other.values.len()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Piecewise-linear resampling onto `points` intervals.
    pub fn resample(&self, points: usize) -> Result<RescaledPath> {
        if points < 1 {
            return Err(GlilError::Grid("resample needs at least one interval".into()));
        }
        let m = self.intervals();
        let values = (0..=points)
            .map(|j| {
                let pos = j as f64 / points as f64 * m as f64;
                let k = (pos.floor() as usize).min(m - 1);
                let w = pos - k as f64;
                self.values[k] * (1.0 - w) + self.values[k + 1] * w
            })
            .collect();
        RescaledPath::from_values(self.scale_param, values)
    }

    pub fn value_at_one(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// ζ_u(t) = B(ut)/√(2u log log u) sampled at `out_grid_points`+1 uniform
/// times, linearly interpolating the source path.
pub fn rescale(path: &SamplePath, u: f64, out_grid_points: usize) -> Result<RescaledPath> {
    let scale = loglog_scale(u)?;
    if path.horizon() < u * (1.0 - 1e-12) {
        return Err(GlilError::Coverage(format!(
            "path horizon {} does not cover u = {u}",
            path.horizon()
        )));
    }
    if out_grid_points < 1 {
        return Err(GlilError::Grid("need at least one output interval".into()));
    }
    let mut values = Vec::with_capacity(out_grid_points + 1);
    values.push(0.0);
    for j in 1..=out_grid_points {
        let t = u * j as f64 / out_grid_points as f64;
        values.push(path.value_at(t.min(path.horizon()))? / scale);
    }
    RescaledPath::from_values(u, values)
}

/// Piecewise-linear interpolant η agreeing with ζ at the nodes i/m.
/// `m` must divide the grid of ζ.
pub fn interpolate_nodes(zeta: &RescaledPath, m: usize) -> Result<RescaledPath> {
    let p = zeta.intervals();
    if m < 1 || !p.is_multiple_of(m) {
        return Err(GlilError::Grid(format!(
            "m = {m} does not divide the {p}-interval grid"
        )));
    }
    let stride = p / m;
    let mut values = vec![0.0; p + 1];
    for i in 0..m {
        let a = zeta.values()[i * stride];
        let b = zeta.values()[(i + 1) * stride];
        for j in 0..=stride {
            values[i * stride + j] = a + (b - a) * j as f64 / stride as f64;
        }
    }
    RescaledPath::from_values(zeta.scale_param(), values)
}

/// Discrete Dirichlet energy m·Σ(x_i − x_{i−1})² of a path on m intervals;
/// the piecewise-linear form of ∫₀¹|ẋ|²dt.
pub fn path_energy(x: &RescaledPath) -> f64 {
    energy_of(x.values())
}

fn energy_of(values: &[f64]) -> f64 {
    let m = (values.len() - 1) as f64;
    m * values
        .windows(2)
        .map(|w| (w[1] - w[0]) * (w[1] - w[0]))
        .sum::<f64>()
}

/// The Strassen ball K_β of paths from 0 with energy at most β².
#[derive(Debug, Clone, Copy)]
pub struct StrassenBall {
    pub beta: f64,
}

impl StrassenBall {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(GlilError::Domain(format!("beta must be >= 0, got {beta}")));
        }
        Ok(StrassenBall { beta })
    }

    /// Discrete membership at the path's own resolution.
    pub fn contains(&self, x: &RescaledPath) -> bool {
        path_energy(x) <= self.beta * self.beta
    }
}

/// Minimal energy over the tube |y − x| ≤ eps with y_0 = 0, by projected
/// cyclic coordinate descent (each coordinate step is a closed-form clamp).
fn min_energy_in_tube(x: &[f64], eps: f64, stop: f64, max_sweeps: usize) -> Result<f64> {
    let n = x.len() - 1; // intervals
    let mut y = x.to_vec();
    y[0] = 0.0;
    // y starts feasible (it is x itself, clamped at the origin)
    let mut prev_energy = energy_of(&y);
    for _ in 0..max_sweeps {
        for i in 1..n {
            let target = 0.5 * (y[i - 1] + y[i + 1]);
            y[i] = target.clamp(x[i] - eps, x[i] + eps);
        }
        y[n] = y[n - 1].clamp(x[n] - eps, x[n] + eps);
        let e = energy_of(&y);
        if prev_energy - e < stop {
            return Ok(e);
        }
        prev_energy = e;
    }
    Err(GlilError::Convergence(format!(
        "tube projection stalled after {max_sweeps} sweeps (eps = {eps})"
    )))
}

/// Sup-norm distance d(x, K_β) within `tol`, via bisection on ε with the
/// tube feasibility test min-energy ≤ β². The bracket [0, ‖x‖_∞] is valid
/// because y ≡ 0 is always feasible.
pub fn dist_to_strassen_ball(x: &RescaledPath, beta: f64, tol: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(GlilError::Domain(format!("beta must be >= 0, got {beta}")));
    }
    if !(tol > 0.0) {
        return Err(GlilError::Domain(format!("tol must be positive, got {tol}")));
    }
    let values = x.values();
    let n = x.intervals();
    let beta_sq = beta * beta;
    if energy_of(values) <= beta_sq {
        return Ok(0.0);
    }
    let stop = (tol * tol / n as f64).clamp(1e-18, 1e-12);
    let max_sweeps = 200_000;
    let mut lo = 0.0f64;
    let mut hi = x.sup_norm();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if min_energy_in_tube(values, mid, stop, max_sweeps)? <= beta_sq {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A finite surrogate net for K_β: piecewise-linear paths on m intervals
/// whose increments range over a scaled lattice, filtered to energy ≤ β².
#[derive(Debug, Clone)]
pub struct BallNet {
    pub beta: f64,
    pub m: usize,
    pub paths: Vec<RescaledPath>,
    /// Max over sampled K_β members of the distance to the net.
    pub radius_estimate: f64,
}

/// Builds the increment-lattice net. The lattice step is β/(m·levels), so
/// the extreme lines ±βt and the zero path are always members; the lattice
/// range covers single-interval extremes (|d| up to β/√m) and is then
/// filtered by the exact discrete energy.
pub fn ball_net(
    beta: f64,
    m: usize,
    levels: usize,
    max_paths: usize,
    radius_samples: usize,
    seed: u64,
) -> Result<BallNet> {
    if !(beta >= 0.0) || m < 1 || levels < 1 {
        return Err(GlilError::Domain(
            "ball_net needs beta >= 0, m >= 1, levels >= 1".into(),
        ));
    }
    if beta == 0.0 {
        let zero = RescaledPath::from_values(0.0, vec![0.0; m + 1])?;
        return Ok(BallNet {
            beta,
            m,
            paths: vec![zero],
            radius_estimate: 0.0,
        });
    }
    if m > 16 {
        return Err(GlilError::Size(format!("net dimension m = {m} too large")));
    }
    let step = beta / (m as f64 * levels as f64);
    let j_max = ((levels as f64) * (m as f64).sqrt()).ceil() as i64;
    let lattice_size = ((2 * j_max + 1) as u128).pow(m as u32);
    if lattice_size > max_paths as u128 * 64 {
        return Err(GlilError::Size(format!(
            "increment lattice has {lattice_size} candidates, cap {}",
            max_paths as u128 * 64
        )));
    }
    let budget = m as f64 * levels as f64 * levels as f64; // Σ j² bound
    let mut paths = Vec::new();
    let mut js = vec![-j_max; m];
    'outer: loop {
        let sq: i64 = js.iter().map(|&j| j * j).sum();
        if (sq as f64) <= budget * (1.0 + 1e-12) {
            let mut values = Vec::with_capacity(m + 1);
            values.push(0.0);
            let mut acc = 0.0;
            for &j in &js {
                acc += j as f64 * step;
                values.push(acc);
            }
            paths.push(RescaledPath::from_values(beta, values)?);
            if paths.len() > max_paths {
                return Err(GlilError::Size(format!(
                    "net exceeds the configured cap of {max_paths} paths"
                )));
            }
        }
        let mut k = 0;
        while k < m {
            js[k] += 1;
            if js[k] <= j_max {
                break;
            }
            js[k] = -j_max;
            k += 1;
        }
        if k == m {
            break 'outer;
        }
    }

    // net radius: worst sampled member of K_beta vs the net
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut radius: f64 = 0.0;
    for _ in 0..radius_samples {
        let g: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let r: f64 = rng.gen::<f64>().powf(1.0 / m as f64);
        let scale = beta / (m as f64).sqrt() * r / norm;
        let mut values = Vec::with_capacity(m + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for v in &g {
            acc += v * scale;
            values.push(acc);
        }
        let sample = RescaledPath::from_values(beta, values)?;
        let d = paths
            .iter()
            .map(|p| sample.sup_distance(p).unwrap())
            .fold(f64::INFINITY, f64::min);
        radius = radius.max(d);
    }

    Ok(BallNet {
        beta,
        m,
        paths,
        radius_estimate: radius,
    })
}

/// Per-target coverage outcome: the best approach to one net member.
#[derive(Debug, Clone, Copy)]
pub struct CoverageEntry {
    pub target: usize,
    pub min_distance: f64,
    pub argmin: usize,
}

/// Cluster diagnostics over a rescaled sequence: outer containment against
/// K_{β_out} and coverage of the given inner net.
#[derive(Debug, Clone)]
pub struct ClusterReport {
    pub outer: f64,
    pub outer_index: usize,
    pub coverage: Vec<CoverageEntry>,
}

pub fn cluster_report(
    zetas: &[RescaledPath],
    beta_out: f64,
    net: &BallNet,
    tol: f64,
) -> Result<ClusterReport> {
    if zetas.is_empty() {
        return Err(GlilError::Domain("cluster report needs at least one path".into()));
    }
    let grid = zetas[0].intervals();
    if zetas.iter().any(|z| z.intervals() != grid) {
        return Err(GlilError::Grid("all rescaled paths must share a grid".into()));
    }
    let dists: Vec<f64> = zetas
        .par_iter()
        .map(|z| dist_to_strassen_ball(z, beta_out, tol))
        .collect::<Result<Vec<_>>>()?;
    let (outer_index, outer) = dists
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, &d)| (i, d))
        .unwrap();

    let targets: Vec<RescaledPath> = net
        .paths
        .iter()
        .map(|p| p.resample(grid))
        .collect::<Result<Vec<_>>>()?;
    let coverage = targets
        .par_iter()
        .enumerate()
        .map(|(ti, target)| {
            let mut best = f64::INFINITY;
            let mut arg = 0usize;
            for (k, z) in zetas.iter().enumerate() {
                let d = z.sup_distance(target)?;
                if d < best {
                    best = d;
                    arg = k;
                }
            }
            Ok(CoverageEntry {
                target: ti,
                min_distance: best,
                argmin: arg,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ClusterReport {
        outer,
        outer_index,
        coverage,
    })
}
