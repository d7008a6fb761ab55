//! G-expectations via the fully nonlinear heat equation ∂_t u = G(∂_xx u).
//!
//! The generator G(α) = ½(σ̄²α⁺ − σ̲²α⁻) is monotone and sublinear, so an
//! explicit central-difference scheme under the CFL bound is monotone and
//! inherits the sublinear-expectation axioms exactly at the discrete level.
//! The scheme runs on a truncated domain [−L, L] with linear extrapolation
//! at the boundary; `u(t, 0)` is the G-expectation E[φ(B_t)] and the
//! conjugate ε[φ(B_t)] is −E[−φ(B_t)].
//!
//! Indicators are never fed to the solver directly: distribution values are
//! sandwiched between piecewise-linear ramps (the auxiliary-function
//! technique), which brackets V(B_t ≤ y) and V(|B_t| ≥ y).

use rayon::prelude::*;

use crate::error::{GlilError, Result};
use crate::model::{RampSide, TestFunction, VolatilityInterval};

/// Initial data larger than this on the truncated domain is rejected.
const GROWTH_CAP: f64 = 1e290;

/// CFL safety factor applied to the binding monotonicity constraint.
const CFL_SAFETY: f64 = 0.45;

/// Default spatial resolution (odd, so x = 0 is a grid point).
pub const DEFAULT_SPACE_POINTS: usize = 2001;

/// Default domain halfwidth multiplier: L = 8 σ̄ √t.
pub const DEFAULT_HALFWIDTH_SIGMAS: f64 = 8.0;

/// Solver tolerance model: max(1e-3·|value|, 1e-4) at default resolution.
pub fn pde_tolerance(value: f64) -> f64 {
    (1e-3 * value.abs()).max(1e-4)
}

/// The generator G(α) = ½(σ̄²α⁺ − σ̲²α⁻) of the G-normal distribution.
#[derive(Debug, Clone, Copy)]
pub struct GFunction {
    interval: VolatilityInterval,
}

impl GFunction {
    pub fn new(interval: VolatilityInterval) -> Self {
        GFunction { interval }
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        g_function(alpha, &self.interval)
    }

    pub fn interval(&self) -> &VolatilityInterval {
        &self.interval
    }
}

/// G(α) = ½(σ̄²α⁺ − σ̲²α⁻); monotone increasing, positively homogeneous,
/// subadditive.
pub fn g_function(alpha: f64, interval: &VolatilityInterval) -> f64 {
    if alpha >= 0.0 {
        0.5 * interval.high() * interval.high() * alpha
    } else {
        0.5 * interval.low() * interval.low() * alpha
    }
}

/// Resolution of the explicit solver: spatial halfwidth L, number of grid
/// points M (odd), and time steps N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeSolverParams {
    pub halfwidth: f64,
    pub space_points: usize,
    pub time_steps: usize,
}

impl PdeSolverParams {
    /// Default parameters for horizon `t`: L = 8σ̄√t, M = 2001, and the
    /// time step chosen from the CFL bound dt ≤ 0.45·dx²/σ̄².
    pub fn auto(t: f64, interval: &VolatilityInterval) -> Result<Self> {
        Self::with_resolution(t, interval, DEFAULT_SPACE_POINTS, DEFAULT_HALFWIDTH_SIGMAS)
    }

    /// Like [`PdeSolverParams::auto`] with explicit resolution knobs.
    pub fn with_resolution(
        t: f64,
        interval: &VolatilityInterval,
        space_points: usize,
        halfwidth_sigmas: f64,
    ) -> Result<Self> {
        if !(t > 0.0) {
            return Err(GlilError::Domain(format!("horizon must be positive, got {t}")));
        }
        if space_points < 5 || space_points.is_multiple_of(2) {
            return Err(GlilError::Domain(
                "space_points must be odd and at least 5".into(),
            ));
        }
        let halfwidth = halfwidth_sigmas * interval.high() * t.sqrt();
        let dx = 2.0 * halfwidth / (space_points - 1) as f64;
        let dt_max = CFL_SAFETY * dx * dx / (interval.high() * interval.high());
        let time_steps = (t / dt_max).ceil() as usize;
        Ok(PdeSolverParams {
            halfwidth,
            space_points,
            time_steps: time_steps.max(1),
        })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.halfwidth / (self.space_points - 1) as f64
    }

    /// Checks the CFL-type bound dt ≤ 0.45·dx²/σ̄² for horizon `t`.
    pub fn validate(&self, t: f64, interval: &VolatilityInterval) -> Result<()> {
        if self.space_points < 5 || self.space_points.is_multiple_of(2) {
            return Err(GlilError::Domain(
                "space_points must be odd and at least 5".into(),
            ));
        }
        if !(self.halfwidth > 0.0) || self.time_steps == 0 {
            return Err(GlilError::Domain("halfwidth and time_steps must be positive".into()));
        }
        let dx = self.dx();
        let dt = t / self.time_steps as f64;
        let bound = CFL_SAFETY * dx * dx / (interval.high() * interval.high());
        if dt > bound * (1.0 + 1e-9) {
            return Err(GlilError::Stability(format!(
                "dt = {dt:.3e} exceeds the CFL bound {bound:.3e} (= 0.45 dx^2 / sigma_high^2)"
            )));
        }
        Ok(())
    }
}

/// Curvature-sign snapshots of the solved value function, indexed by
/// remaining time. Used by the convexity-feedback policy.
#[derive(Debug, Clone)]
pub struct CurvatureTable {
    xmin: f64,
    dx: f64,
    times: Vec<f64>,
    signs: Vec<Vec<i8>>,
}

impl CurvatureTable {
    /// Sign (+1 convex, −1 concave) of ∂_xx u at the nearest snapshot time
    /// and nearest grid point.
    pub fn sign_at(&self, remaining: f64, x: f64) -> i8 {
        let row = match self
            .times
            .binary_search_by(|t| t.partial_cmp(&remaining).unwrap())
        {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i >= self.times.len() {
                    self.times.len() - 1
                } else if remaining - self.times[i - 1] <= self.times[i] - remaining {
                    i - 1
                } else {
                    i
                }
            }
        };
        let signs = &self.signs[row];
        let j = ((x - self.xmin) / self.dx).round();
        let j = (j.max(0.0) as usize).min(signs.len() - 1);
        signs[j]
    }
}

struct Solution {
    center: f64,
    table: Option<CurvatureTable>,
}

/// Explicit march of ∂_t u = G(∂_xx u) from datum φ over pde-time `t`.
fn solve(
    phi: &TestFunction,
    t: f64,
    interval: &VolatilityInterval,
    params: &PdeSolverParams,
    snapshot_times: &[f64],
) -> Result<Solution> {
    if !(t > 0.0) {
        return Err(GlilError::Domain(format!("horizon must be positive, got {t}")));
    }
    params.validate(t, interval)?;
    let m = params.space_points;
    let dx = params.dx();
    let xmin = -params.halfwidth;
    let n_steps = params.time_steps;
    let dt = t / n_steps as f64;

    let mut u: Vec<f64> = (0..m).map(|i| phi.eval(xmin + i as f64 * dx)).collect();
    if u.iter().any(|v| !v.is_finite() || v.abs() > GROWTH_CAP) {
        return Err(GlilError::Growth(format!(
            "initial datum overflows on [-{l}, {l}]",
            l = params.halfwidth
        )));
    }

    // snapshot step indices (remaining-time convention: pde-time == remaining time)
    let mut snap_steps: Vec<(usize, f64)> = snapshot_times
        .iter()
        .map(|&tau| (((tau / dt).round().max(0.0) as usize).min(n_steps), tau))
        .collect();
    snap_steps.sort_by_key(|&(s, _)| s);
    let mut table = if snapshot_times.is_empty() {
        None
    } else {
        Some(CurvatureTable {
            xmin,
            dx,
            times: Vec::new(),
            signs: Vec::new(),
        })
    };
    let mut snap_idx = 0usize;

    let coef_pos = 0.5 * interval.high() * interval.high() * dt / (dx * dx);
    let coef_neg = 0.5 * interval.low() * interval.low() * dt / (dx * dx);

    let record = |u: &[f64], step: usize, snap_idx: &mut usize, table: &mut Option<CurvatureTable>| {
        while *snap_idx < snap_steps.len() && snap_steps[*snap_idx].0 == step {
            if let Some(tab) = table.as_mut() {
                let mut row = vec![0i8; m];
                for i in 1..m - 1 {
                    row[i] = if u[i - 1] - 2.0 * u[i] + u[i + 1] >= 0.0 { 1 } else { -1 };
                }
                row[0] = row[1];
                row[m - 1] = row[m - 2];
                tab.times.push(step as f64 * dt);
                tab.signs.push(row);
            }
            *snap_idx += 1;
        }
    };
    record(&u, 0, &mut snap_idx, &mut table);

    let mut next = vec![0.0f64; m];
    for step in 1..=n_steps {
        for i in 1..m - 1 {
            let d2 = u[i - 1] - 2.0 * u[i] + u[i + 1];
            let coef = if d2 >= 0.0 { coef_pos } else { coef_neg };
            next[i] = u[i] + coef * d2;
        }
        next[0] = 2.0 * next[1] - next[2];
        next[m - 1] = 2.0 * next[m - 2] - next[m - 3];
        std::mem::swap(&mut u, &mut next);
        record(&u, step, &mut snap_idx, &mut table);
    }

    if u.iter().any(|v| !v.is_finite()) {
        return Err(GlilError::Growth("solution overflowed during the march".into()));
    }
    // snapshot rows were recorded in increasing step order == increasing remaining time
    Ok(Solution {
        center: u[(m - 1) / 2],
        table,
    })
}

/// E[φ(B_t)] = u(t, 0) where ∂_t u = G(∂_xx u), u(0,·) = φ.
pub fn g_expectation(
    phi: &TestFunction,
    t: f64,
    interval: &VolatilityInterval,
    params: &PdeSolverParams,
) -> Result<f64> {
    Ok(solve(phi, t, interval, params, &[])?.center)
}

/// The conjugate ε[φ(B_t)] = −E[−φ(B_t)].
pub fn conjugate_g_expectation(
    phi: &TestFunction,
    t: f64,
    interval: &VolatilityInterval,
    params: &PdeSolverParams,
) -> Result<f64> {
    Ok(-g_expectation(&phi.negated(), t, interval, params)?)
}

/// Curvature-sign table of the value function for datum `phi` at the given
/// remaining times (each in [0, horizon]).
pub fn curvature_table(
    phi: &TestFunction,
    horizon: f64,
    interval: &VolatilityInterval,
    params: &PdeSolverParams,
    remaining_times: &[f64],
) -> Result<CurvatureTable> {
    let sol = solve(phi, horizon, interval, params, remaining_times)?;
    sol.table
        .ok_or_else(|| GlilError::Domain("no snapshot times requested".into()))
}

/// The auxiliary pair (f, g) bracketing 1_{x ≤ level} with ramp width δ:
/// f ≤ 1_{(−∞, level]} ≤ g, both 1-Lipschitz with slope −1/δ on the ramp.
#[derive(Debug, Clone)]
pub struct SandwichPair {
    pub level: f64,
    pub delta: f64,
    pub lower: TestFunction,
    pub upper: TestFunction,
}

impl SandwichPair {
    pub fn new(level: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(GlilError::Domain(format!("sandwich width must be positive, got {delta}")));
        }
        Ok(SandwichPair {
            level,
            delta,
            lower: TestFunction::IndicatorRamp {
                level,
                delta,
                side: RampSide::Lower,
            },
            upper: TestFunction::IndicatorRamp {
                level,
                delta,
                side: RampSide::Upper,
            },
        })
    }
}

/// Piecewise-linear bracket (lower, upper) of 1_{|x| ≥ y}; requires 0 < δ < y.
pub fn abs_tail_sandwich(y: f64, delta: f64) -> Result<(TestFunction, TestFunction)> {
    if !(y > 0.0) || !(delta > 0.0) || delta >= y {
        return Err(GlilError::Domain(format!(
            "abs tail sandwich needs 0 < delta < y, got y={y}, delta={delta}"
        )));
    }
    let lower = TestFunction::tabulated(vec![-y - delta, -y, y, y + delta], vec![1.0, 0.0, 0.0, 1.0])?;
    let upper = TestFunction::tabulated(
        vec![-y, -y + delta, y - delta, y],
        vec![1.0, 0.0, 0.0, 1.0],
    )?;
    Ok((lower, upper))
}

/// Sandwich bounds (E[f(B_t)], E[g(B_t)]) for the upper distribution value
/// V(B_t ≤ y); the gap shrinks with δ by continuity of the distribution.
pub fn upper_distribution_bounds(
    y: f64,
    t: f64,
    interval: &VolatilityInterval,
    delta: f64,
    params: &PdeSolverParams,
) -> Result<(f64, f64)> {
    let pair = SandwichPair::new(y, delta)?;
    let lower = g_expectation(&pair.lower, t, interval, params)?;
    let upper = g_expectation(&pair.upper, t, interval, params)?;
    Ok((lower, upper))
}

/// Margin ε[φ(ξ−b)] − e^{−b²/(2σ̲²)}·ε[φ(ξ)] with ξ = B_t; the shift
/// inequality asserts it is nonnegative for even bounded positive φ.
pub fn check_shift_inequality(
    phi: &TestFunction,
    b: f64,
    t: f64,
    interval: &VolatilityInterval,
    params: &PdeSolverParams,
) -> Result<f64> {
    if !phi.is_even() || !phi.is_bounded() || !phi.is_positive() {
        return Err(GlilError::Shape(
            "shift inequality needs an even, bounded, positive test function".into(),
        ));
    }
    let eps_shifted = conjugate_g_expectation(&phi.shifted(b), t, interval, params)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    let eps_base = conjugate_g_expectation(phi, t, interval, params)?;
    let factor = (-b * b / (2.0 * interval.low() * interval.low())).exp();
    Ok(eps_shifted - factor * eps_base)
}

/// One tail comparison point: sandwich estimates of V(|B_s| ≥ y) and
/// V(|B_t| ≥ y) with their sandwich gaps.
#[derive(Debug, Clone, Copy)]
pub struct TailPoint {
    pub y: f64,
    pub v_s: f64,
    pub v_t: f64,
    pub gap_s: f64,
    pub gap_t: f64,
}

/// Sandwich-computed tail values at times s ≤ t for each threshold y.
/// Monotonicity V_s ≤ V_t holds at continuity points, i.e. where the
/// sandwich gaps are small.
pub fn check_tail_monotonicity(
    s: f64,
    t: f64,
    ys: &[f64],
    interval: &VolatilityInterval,
    delta: f64,
    params: &PdeSolverParams,
) -> Result<Vec<TailPoint>> {
    if !(s > 0.0) || s > t {
        return Err(GlilError::Domain(format!("need 0 < s <= t, got s={s}, t={t}")));
    }
    let tail_value = |y: f64, at: f64| -> Result<(f64, f64)> {
        let (lower, upper) = abs_tail_sandwich(y, delta)?;
        let lo = g_expectation(&lower, at, interval, params)?;
        let hi = g_expectation(&upper, at, interval, params)?;
        Ok((0.5 * (lo + hi), hi - lo))
    };
    ys.par_iter()
        .map(|&y| {
            let (v_s, gap_s) = tail_value(y, s)?;
            let (v_t, gap_t) = if t == s {
                (v_s, gap_s)
            } else {
                tail_value(y, t)?
            };
            Ok(TailPoint {
                y,
                v_s,
                v_t,
                gap_s,
                gap_t,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interval(lo: f64, hi: f64) -> VolatilityInterval {
        VolatilityInterval::new(lo, hi).unwrap()
    }

    /// Coarse but stable parameters for fast unit tests.
    fn coarse(t: f64, iv: &VolatilityInterval) -> PdeSolverParams {
        PdeSolverParams::with_resolution(t, iv, 401, 8.0).unwrap()
    }

    #[test]
    fn g_function_examples() {
        let iv = interval(1.0, 2.0);
        assert_relative_eq!(g_function(1.0, &iv), 2.0);
        assert_relative_eq!(g_function(-1.0, &iv), -0.5);
        assert_relative_eq!(g_function(0.0, &iv), 0.0);
    }

    #[test]
    fn g_function_homogeneous_and_subadditive() {
        let iv = interval(0.7, 1.9);
        for i in 0..50 {
            let a = -5.0 + 0.2 * i as f64;
            let b = 3.0 - 0.17 * i as f64;
            let lam = 0.3 * i as f64;
            assert_relative_eq!(
                g_function(lam * a, &iv),
                lam * g_function(a, &iv),
                max_relative = 1e-12,
                epsilon = 1e-12
            );
            assert!(g_function(a + b, &iv) <= g_function(a, &iv) + g_function(b, &iv) + 1e-12);
        }
    }

    #[test]
    fn second_moment_is_sigma_high_squared() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let v = g_expectation(&TestFunction::Quadratic, 1.0, &iv, &p).unwrap();
        assert_relative_eq!(v, 4.0, max_relative = 2e-3);
    }

    #[test]
    fn conjugate_second_moment_is_sigma_low_squared() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let v = g_expectation(&TestFunction::NegQuadratic, 1.0, &iv, &p).unwrap();
        assert_relative_eq!(v, -1.0, max_relative = 2e-3);
        let eps = conjugate_g_expectation(&TestFunction::Quadratic, 1.0, &iv, &p).unwrap();
        assert_relative_eq!(eps, 1.0, max_relative = 2e-3);
    }

    #[test]
    fn odd_datum_has_zero_expectation() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let v = g_expectation(&TestFunction::Identity, 1.0, &iv, &p).unwrap();
        assert!(v.abs() < 1e-10, "odd symmetry broken: {v}");
    }

    #[test]
    fn abs_moment_collapses_to_high_volatility() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let v = g_expectation(&TestFunction::Abs, 1.0, &iv, &p).unwrap();
        // |x| is convex: classical Gaussian value at sigma_high
        assert_relative_eq!(v, 1.5957691216057308, max_relative = 3e-3);
    }

    #[test]
    fn conjugacy_never_exceeds() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        for phi in [
            TestFunction::Abs,
            TestFunction::Quadratic,
            TestFunction::TriangularBump { width: 1.0, center: 0.3 },
        ] {
            let upper = g_expectation(&phi, 1.0, &iv, &p).unwrap();
            let lower = conjugate_g_expectation(&phi, 1.0, &iv, &p).unwrap();
            assert!(lower <= upper + 1e-12, "conjugacy violated: {lower} > {upper}");
        }
    }

    #[test]
    fn stability_error_when_cfl_violated() {
        let iv = interval(1.0, 2.0);
        let mut p = coarse(1.0, &iv);
        p.time_steps = 10;
        assert!(matches!(
            g_expectation(&TestFunction::Quadratic, 1.0, &iv, &p),
            Err(GlilError::Stability(_))
        ));
    }

    #[test]
    fn growth_error_when_datum_overflows() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let phi = TestFunction::Quadratic.scaled(1e300);
        assert!(matches!(
            g_expectation(&phi, 1.0, &iv, &p),
            Err(GlilError::Growth(_))
        ));
    }

    #[test]
    fn distribution_bounds_near_domain_edge_are_one() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let (lo, hi) = upper_distribution_bounds(p.halfwidth, 1.0, &iv, 0.01, &p).unwrap();
        assert_relative_eq!(lo, 1.0, max_relative = 1e-6);
        assert_relative_eq!(hi, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn classical_median_is_half() {
        let iv = interval(1.0, 1.0);
        let p = coarse(1.0, &iv);
        let (lo, hi) = upper_distribution_bounds(0.0, 1.0, &iv, 0.01, &p).unwrap();
        assert!(lo <= hi);
        assert!((lo - 0.5).abs() < 0.01, "lo = {lo}");
        assert!((hi - 0.5).abs() < 0.01, "hi = {hi}");
    }

    #[test]
    fn g_median_is_high_over_sum() {
        // V(B_1 <= 0) = sigma_high / (sigma_low + sigma_high): the worst-case
        // control is high volatility above 0, low below (oscillating BM).
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let (lo, hi) = upper_distribution_bounds(0.0, 1.0, &iv, 0.02, &p).unwrap();
        assert!(lo <= hi);
        let mid = 0.5 * (lo + hi);
        assert!((mid - 2.0 / 3.0).abs() < 0.05, "median bound {mid} far from 2/3");
    }

    #[test]
    fn shift_margin_zero_at_b_zero() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let bump = TestFunction::TriangularBump { width: 1.0, center: 0.0 };
        let m = check_shift_inequality(&bump, 0.0, 1.0, &iv, &p).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn shift_margin_nonnegative_for_bump() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let bump = TestFunction::TriangularBump { width: 1.0, center: 0.0 };
        let m = check_shift_inequality(&bump, 1.0, 1.0, &iv, &p).unwrap();
        assert!(m >= -1e-4, "margin {m}");
    }

    #[test]
    fn shift_margin_far_b_left_side_negligible() {
        let iv = interval(1.0, 2.0);
        let p = PdeSolverParams::with_resolution(1.0, &iv, 1201, 8.0).unwrap();
        let bump = TestFunction::TriangularBump { width: 1.0, center: 0.0 };
        let eps_base = conjugate_g_expectation(&bump, 1.0, &iv, &p).unwrap();
        let factor = (-25.0 / 2.0f64).exp();
        assert!(factor * eps_base < 1e-4, "left side not crushed");
        let m = check_shift_inequality(&bump, 5.0, 1.0, &iv, &p).unwrap();
        assert!(m >= -1e-6, "margin {m}");
    }

    #[test]
    fn shift_rejects_wrong_shape() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        assert!(matches!(
            check_shift_inequality(&TestFunction::Identity, 1.0, 1.0, &iv, &p),
            Err(GlilError::Shape(_))
        ));
        assert!(matches!(
            check_shift_inequality(&TestFunction::Abs, 1.0, 1.0, &iv, &p),
            Err(GlilError::Shape(_))
        ));
    }

    #[test]
    fn tail_equal_times_coincide() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let pts = check_tail_monotonicity(1.0, 1.0, &[0.5, 1.0], &iv, 0.05, &p).unwrap();
        for pt in pts {
            assert_eq!(pt.v_s, pt.v_t);
        }
    }

    #[test]
    fn tail_classical_gaussian_values() {
        let iv = interval(1.0, 1.0);
        let p = coarse(4.0, &iv);
        let pts = check_tail_monotonicity(1.0, 4.0, &[1.0], &iv, 0.05, &p).unwrap();
        // 2(1-Phi(1)) and 2(1-Phi(0.5)), frozen from the Gaussian CDF
        assert!((pts[0].v_s - 0.3173105078629141).abs() < 0.02, "v_s = {}", pts[0].v_s);
        assert!((pts[0].v_t - 0.6170750774519738).abs() < 0.02, "v_t = {}", pts[0].v_t);
        assert!(pts[0].v_s <= pts[0].v_t + 1e-4);
    }

    #[test]
    fn tail_monotone_in_time_for_g_case() {
        let iv = interval(1.0, 2.0);
        let p = coarse(2.0, &iv);
        let pts = check_tail_monotonicity(1.0, 2.0, &[1.0, 2.0], &iv, 0.05, &p).unwrap();
        for pt in pts {
            assert!(
                pt.v_s <= pt.v_t + 1e-4,
                "tail monotonicity violated at y={}: {} > {}",
                pt.y,
                pt.v_s,
                pt.v_t
            );
        }
    }

    #[test]
    fn curvature_table_signs_for_convex_datum() {
        let iv = interval(1.0, 2.0);
        let p = coarse(1.0, &iv);
        let tab = curvature_table(&TestFunction::Quadratic, 1.0, &iv, &p, &[0.0, 0.5, 1.0]).unwrap();
        for tau in [0.0, 0.5, 1.0] {
            for x in [-1.0, 0.0, 2.0] {
                assert_eq!(tab.sign_at(tau, x), 1);
            }
        }
    }
}
