//! Shared domain types: volatility intervals, time grids, sample paths,
//! test functions, and the iterated-logarithm normalization.
//!
//! All types here are immutable after construction and safe to share
//! across threads.

use serde::{Deserialize, Serialize};

use crate::error::{GlilError, Result};

/// The volatility pair (σ̲, σ̄) that defines the generator
/// G(α) = ½(σ̄²α⁺ − σ̲²α⁻) and the admissible control range.
///
/// The harness requires strict positivity 0 < σ̲ ≤ σ̄ < ∞; the degenerate
/// case σ̲ = σ̄ is the classical Brownian regression target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolatilityInterval {
    sigma_low: f64,
    sigma_high: f64,
}

impl VolatilityInterval {
    /// Validates and constructs the interval. Errors unless
    /// 0 < sigma_low ≤ sigma_high and both are finite.
    pub fn new(sigma_low: f64, sigma_high: f64) -> Result<Self> {
        validate_volatility_interval(sigma_low, sigma_high)
    }

    pub fn low(&self) -> f64 {
        self.sigma_low
    }

    pub fn high(&self) -> f64 {
        self.sigma_high
    }

    /// True when σ̲ = σ̄ (classical Brownian motion).
    pub fn is_degenerate(&self) -> bool {
        self.sigma_low == self.sigma_high
    }

    pub fn contains(&self, sigma: f64) -> bool {
        sigma >= self.sigma_low && sigma <= self.sigma_high
    }

    pub fn clamp(&self, sigma: f64) -> f64 {
        sigma.clamp(self.sigma_low, self.sigma_high)
    }
}

/// Checks 0 < sigma_low ≤ sigma_high < ∞ and builds the interval.
pub fn validate_volatility_interval(sigma_low: f64, sigma_high: f64) -> Result<VolatilityInterval> {
    if !sigma_low.is_finite() || !sigma_high.is_finite() {
        return Err(GlilError::Domain(format!(
            "volatility bounds must be finite, got ({sigma_low}, {sigma_high})"
        )));
    }
    if sigma_low <= 0.0 {
        return Err(GlilError::Domain(format!(
            "sigma_low must be strictly positive, got {sigma_low}"
        )));
    }
    if sigma_low > sigma_high {
        return Err(GlilError::Domain(format!(
            "volatility interval requires sigma_low <= sigma_high, got ({sigma_low}, {sigma_high})"
        )));
    }
    Ok(VolatilityInterval {
        sigma_low,
        sigma_high,
    })
}

/// Uniform time grid t_k = k·dt on [0, horizon] with `steps` intervals.
///
/// The degenerate grid (horizon 0, zero steps) is allowed and holds the
/// single point t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if horizon == 0.0 && steps == 0 {
            return Ok(TimeGrid { horizon, steps });
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(GlilError::Domain(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(GlilError::Domain(
                "steps must be >= 1 for a positive horizon".into(),
            ));
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.horizon / self.steps as f64
        }
    }

    pub fn time_at(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.dt()
        }
    }

    /// Index of an on-grid time, or `OffGrid` when `t` is not a grid point.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        if t < 0.0 || t > self.horizon * (1.0 + 1e-12) {
            return Err(GlilError::OffGrid(format!(
                "time {t} outside [0, {}]",
                self.horizon
            )));
        }
        if self.steps == 0 {
            return if t == 0.0 {
                Ok(0)
            } else {
                Err(GlilError::OffGrid(format!("time {t} on degenerate grid")))
            };
        }
        let ratio = t / self.dt();
        let k = ratio.round();
        if (ratio - k).abs() > 1e-9 * ratio.abs().max(1.0) {
            return Err(GlilError::OffGrid(format!(
                "time {t} is not a multiple of dt = {}",
                self.dt()
            )));
        }
        Ok((k as usize).min(self.steps))
    }
}

/// A discretized trajectory on a uniform time grid, starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.steps() + 1 {
            return Err(GlilError::Domain(format!(
                "path needs {} values for {} steps, got {}",
                grid.steps() + 1,
                grid.steps(),
                values.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(GlilError::Domain(format!(
                "canonical paths start at 0, got {}",
                values[0]
            )));
        }
        Ok(SamplePath { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    /// Linear interpolation between grid values; `t` must lie in [0, horizon].
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t > self.horizon() * (1.0 + 1e-12) {
            return Err(GlilError::Coverage(format!(
                "time {t} outside path horizon {}",
                self.horizon()
            )));
        }
        if self.grid.steps() == 0 {
            return Ok(0.0);
        }
        let pos = (t / self.grid.dt()).min(self.grid.steps() as f64);
        let k = pos.floor() as usize;
        if k >= self.grid.steps() {
            return Ok(self.values[self.grid.steps()]);
        }
        let w = pos - k as f64;
        Ok(self.values[k] * (1.0 - w) + self.values[k + 1] * w)
    }
}

/// Ramp side for the piecewise-linear sandwich of an indicator 1_{x ≤ level}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RampSide {
    /// f: 1 on (−∞, level−δ], linear down to 0 at level, 0 beyond.
    Lower,
    /// g: 1 on (−∞, level], linear down to 0 at level+δ, 0 beyond.
    Upper,
}

/// A tagged scalar test function φ, evaluable on any real.
///
/// The tags drive shape checks (even/bounded/positive) required by some
/// operations; tabulated functions are piecewise linear on their declared
/// support and clamped to the end values outside it.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// x²
    Quadratic,
    /// −x²
    NegQuadratic,
    /// x
    Identity,
    /// |x|
    Abs,
    /// |x|^a
    AbsPower { exponent: f64 },
    /// max(0, 1 − |x − center| / width); support radius `width`.
    TriangularBump { width: f64, center: f64 },
    /// Piecewise-linear sandwich half for 1_{x ≤ level} with ramp width δ.
    IndicatorRamp {
        level: f64,
        delta: f64,
        side: RampSide,
    },
    /// Piecewise linear through (xs[i], ys[i]); clamped outside [xs[0], xs[last]].
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
    /// exp(x) for x ≤ cap, continued linearly with slope e^cap above (convex, C¹).
    ExpClipped { cap: f64 },
    /// x − offset fed to the inner function.
    Shifted {
        offset: f64,
        inner: Box<TestFunction>,
    },
    /// factor · inner(x).
    Scaled {
        factor: f64,
        inner: Box<TestFunction>,
    },
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Quadratic => x * x,
            TestFunction::NegQuadratic => -x * x,
            TestFunction::Identity => x,
            TestFunction::Abs => x.abs(),
            TestFunction::AbsPower { exponent } => x.abs().powf(*exponent),
            TestFunction::TriangularBump { width, center } => {
                (1.0 - (x - center).abs() / width).max(0.0)
            }
            TestFunction::IndicatorRamp { level, delta, side } => match side {
                RampSide::Lower => {
                    if x <= level - delta {
                        1.0
                    } else if x >= *level {
                        0.0
                    } else {
                        (level - x) / delta
                    }
                }
                RampSide::Upper => {
                    if x <= *level {
                        1.0
                    } else if x >= level + delta {
                        0.0
                    } else {
                        (level + delta - x) / delta
                    }
                }
            },
            TestFunction::Tabulated { xs, ys } => {
                if xs.is_empty() {
                    return 0.0;
                }
                if x <= xs[0] {
                    return ys[0];
                }
                if x >= xs[xs.len() - 1] {
                    return ys[ys.len() - 1];
                }
                let idx = xs.partition_point(|&p| p <= x);
                let (x0, x1) = (xs[idx - 1], xs[idx]);
                let (y0, y1) = (ys[idx - 1], ys[idx]);
                let w = (x - x0) / (x1 - x0);
                y0 * (1.0 - w) + y1 * w
            }
            TestFunction::ExpClipped { cap } => {
                if x <= *cap {
                    x.exp()
                } else {
                    cap.exp() * (1.0 + (x - cap))
                }
            }
            TestFunction::Shifted { offset, inner } => inner.eval(x - offset),
            TestFunction::Scaled { factor, inner } => factor * inner.eval(x),
        }
    }

    /// Validated tabulated function; xs must be strictly increasing.
    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<TestFunction> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(GlilError::Domain(
                "tabulated function needs matching xs/ys with at least two points".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GlilError::Domain(
                "tabulated xs must be strictly increasing".into(),
            ));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(GlilError::Domain("tabulated values must be finite".into()));
        }
        Ok(TestFunction::Tabulated { xs, ys })
    }

    /// Samples `f` at `n+1` uniform points of [lo, hi] into a tabulated function.
    pub fn tabulate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Result<TestFunction> {
        if !(hi > lo) || n < 1 {
            return Err(GlilError::Domain("tabulate needs hi > lo and n >= 1".into()));
        }
        let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        TestFunction::tabulated(xs, ys)
    }

    pub fn negated(&self) -> TestFunction {
        self.scaled(-1.0)
    }

    pub fn scaled(&self, factor: f64) -> TestFunction {
        TestFunction::Scaled {
            factor,
            inner: Box::new(self.clone()),
        }
    }

    pub fn shifted(&self, offset: f64) -> TestFunction {
        TestFunction::Shifted {
            offset,
            inner: Box::new(self.clone()),
        }
    }

    /// Pointwise sum of two tabulated functions on the merged grid.
    pub fn add_tabulated(&self, other: &TestFunction) -> Result<TestFunction> {
        match (self, other) {
            (TestFunction::Tabulated { xs: xa, .. }, TestFunction::Tabulated { xs: xb, .. }) => {
                let mut xs: Vec<f64> = xa.iter().chain(xb.iter()).copied().collect();
                xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                xs.dedup();
                let ys = xs.iter().map(|&x| self.eval(x) + other.eval(x)).collect();
                TestFunction::tabulated(xs, ys)
            }
            _ => Err(GlilError::Shape(
                "add_tabulated requires two tabulated functions".into(),
            )),
        }
    }

    /// φ(−x) = φ(x) for all x.
    pub fn is_even(&self) -> bool {
        match self {
            TestFunction::Quadratic
            | TestFunction::NegQuadratic
            | TestFunction::Abs
            | TestFunction::AbsPower { .. } => true,
            TestFunction::TriangularBump { center, .. } => *center == 0.0,
            TestFunction::Tabulated { xs, ys } => {
                // symmetric support and mirrored values on the declared grid
                let n = xs.len();
                (0..n).all(|i| {
                    (xs[i] + xs[n - 1 - i]).abs() <= 1e-12 * xs[n - 1].abs().max(1.0)
                        && (ys[i] - ys[n - 1 - i]).abs() <= 1e-12 * ys[i].abs().max(1.0)
                })
            }
            TestFunction::Scaled { inner, .. } => inner.is_even(),
            TestFunction::Shifted { offset, inner } => *offset == 0.0 && inner.is_even(),
            _ => false,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            TestFunction::TriangularBump { .. }
            | TestFunction::IndicatorRamp { .. }
            | TestFunction::Tabulated { .. } => true,
            TestFunction::AbsPower { exponent } => *exponent == 0.0,
            TestFunction::Scaled { inner, .. } | TestFunction::Shifted { inner, .. } => {
                inner.is_bounded()
            }
            _ => false,
        }
    }

    /// Nonnegative everywhere (the sense required by the shift inequality).
    pub fn is_positive(&self) -> bool {
        match self {
            TestFunction::Quadratic
            | TestFunction::Abs
            | TestFunction::AbsPower { .. }
            | TestFunction::TriangularBump { .. }
            | TestFunction::IndicatorRamp { .. }
            | TestFunction::ExpClipped { .. } => true,
            TestFunction::Tabulated { ys, .. } => ys.iter().all(|&y| y >= 0.0),
            TestFunction::Scaled { factor, inner } => *factor >= 0.0 && inner.is_positive(),
            TestFunction::Shifted { inner, .. } => inner.is_positive(),
            _ => false,
        }
    }
}

/// The LIL normalization √(2n·log log n), natural logarithms.
///
/// Defined for n > e; strictly increasing for n ≥ e^e. Between e and e^e the
/// value is positive but the map n ↦ log log n is still below 1, so small-n
/// statistics live in non-monotone loglog territory.
pub fn loglog_scale(n: f64) -> Result<f64> {
    if !(n > std::f64::consts::E) {
        return Err(GlilError::Domain(format!(
            "loglog_scale needs n > e, got {n}"
        )));
    }
    Ok((2.0 * n * n.ln().ln()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interval_accepts_ordered_pair() {
        let iv = VolatilityInterval::new(1.0, 2.0).unwrap();
        assert_eq!(iv.low(), 1.0);
        assert_eq!(iv.high(), 2.0);
        assert!(!iv.is_degenerate());
    }

    #[test]
    fn interval_degenerate_is_classical() {
        let iv = VolatilityInterval::new(1.0, 1.0).unwrap();
        assert!(iv.is_degenerate());
    }

    #[test]
    fn interval_rejects_inverted_and_nonpositive() {
        assert!(matches!(
            VolatilityInterval::new(2.0, 1.0),
            Err(GlilError::Domain(_))
        ));
        assert!(matches!(
            VolatilityInterval::new(0.0, 1.0),
            Err(GlilError::Domain(_))
        ));
        assert!(matches!(
            VolatilityInterval::new(-1.0, 1.0),
            Err(GlilError::Domain(_))
        ));
        assert!(matches!(
            VolatilityInterval::new(1.0, f64::INFINITY),
            Err(GlilError::Domain(_))
        ));
        assert!(matches!(
            VolatilityInterval::new(f64::NAN, 1.0),
            Err(GlilError::Domain(_))
        ));
    }

    #[test]
    fn interval_validation_is_idempotent() {
        let iv = validate_volatility_interval(1.3, 1.7).unwrap();
        let again = validate_volatility_interval(iv.low(), iv.high()).unwrap();
        assert_eq!(iv, again);
    }

    #[test]
    fn loglog_scale_at_e_to_e() {
        // log log (e^e) = 1, so the scale is sqrt(2 e^e).
        let n = std::f64::consts::E.exp();
        let got = loglog_scale(n).unwrap();
        assert_relative_eq!(got, 5.505317836688317, max_relative = 1e-14);
    }

    #[test]
    fn loglog_scale_at_100() {
        // frozen from a 30-digit evaluation of sqrt(200 ln ln 100)
        let got = loglog_scale(100.0).unwrap();
        assert_relative_eq!(got, 17.476725241348283, max_relative = 1e-14);
    }

    #[test]
    fn loglog_scale_rejects_small_n() {
        assert!(matches!(loglog_scale(2.0), Err(GlilError::Domain(_))));
        assert!(matches!(
            loglog_scale(std::f64::consts::E),
            Err(GlilError::Domain(_))
        ));
    }

    #[test]
    fn loglog_scale_square_identity_and_monotone() {
        let mut prev = 0.0;
        for i in 0..200 {
            let n = 16.0 + i as f64 * 13.0; // n >= e^e
            let s = loglog_scale(n).unwrap();
            assert_relative_eq!(s * s, 2.0 * n * n.ln().ln(), max_relative = 1e-13);
            assert!(s > prev, "loglog_scale not increasing at n={n}");
            prev = s;
        }
    }

    #[test]
    fn time_grid_uniform_and_endpoints() {
        let g = TimeGrid::new(2.0, 8).unwrap();
        assert_eq!(g.time_at(0), 0.0);
        assert_eq!(g.time_at(8), 2.0);
        assert_relative_eq!(g.dt(), 0.25);
        assert_eq!(g.index_of(0.5).unwrap(), 2);
        assert!(matches!(g.index_of(0.3), Err(GlilError::OffGrid(_))));
    }

    #[test]
    fn degenerate_grid_is_a_point() {
        let g = TimeGrid::new(0.0, 0).unwrap();
        assert_eq!(g.dt(), 0.0);
        assert_eq!(g.index_of(0.0).unwrap(), 0);
        assert!(TimeGrid::new(1.0, 0).is_err());
    }

    #[test]
    fn sample_path_starts_at_zero() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        assert!(SamplePath::new(g, vec![0.0, 1.0, 2.0]).is_ok());
        assert!(SamplePath::new(g, vec![0.5, 1.0, 2.0]).is_err());
        assert!(SamplePath::new(g, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn sample_path_interpolates() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        let p = SamplePath::new(g, vec![0.0, 1.0, 3.0]).unwrap();
        assert_relative_eq!(p.value_at(0.25).unwrap(), 0.5);
        assert_relative_eq!(p.value_at(0.75).unwrap(), 2.0);
        assert!(p.value_at(1.5).is_err());
    }

    #[test]
    fn test_function_shapes() {
        let bump = TestFunction::TriangularBump {
            width: 1.0,
            center: 0.0,
        };
        assert!(bump.is_even() && bump.is_bounded() && bump.is_positive());
        assert_relative_eq!(bump.eval(0.0), 1.0);
        assert_relative_eq!(bump.eval(0.5), 0.5);
        assert_eq!(bump.eval(2.0), 0.0);

        let shifted = bump.shifted(1.0);
        assert!(!shifted.is_even());
        assert_relative_eq!(shifted.eval(1.0), 1.0);

        assert!(TestFunction::Abs.is_even());
        assert!(!TestFunction::Abs.is_bounded());
        assert!(!TestFunction::Identity.is_even());
    }

    #[test]
    fn indicator_ramp_sandwiches_step() {
        let f = TestFunction::IndicatorRamp {
            level: 0.5,
            delta: 0.1,
            side: RampSide::Lower,
        };
        let g = TestFunction::IndicatorRamp {
            level: 0.5,
            delta: 0.1,
            side: RampSide::Upper,
        };
        for i in -30..30 {
            let x = i as f64 * 0.05;
            let ind = if x <= 0.5 { 1.0 } else { 0.0 };
            assert!(f.eval(x) <= ind + 1e-12, "lower exceeds indicator at {x}");
            assert!(g.eval(x) >= ind - 1e-12, "upper below indicator at {x}");
        }
        assert_eq!(f.eval(0.4), 1.0);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(0.6), 0.0);
    }

    #[test]
    fn tabulated_eval_clamps_and_interpolates() {
        let t = TestFunction::tabulated(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(t.eval(-0.5), 0.5);
        assert_eq!(t.eval(-5.0), 0.0);
        assert_eq!(t.eval(5.0), 0.0);
        assert!(t.is_even());
        let sum = t.add_tabulated(&t).unwrap();
        assert_relative_eq!(sum.eval(0.0), 2.0);
    }

    #[test]
    fn abs_power_zero_exponent_is_constant_one() {
        let f = TestFunction::AbsPower { exponent: 0.0 };
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(-3.0), 1.0);
    }

    #[test]
    fn exp_clipped_is_convex_continuation() {
        let f = TestFunction::ExpClipped { cap: 1.0 };
        assert_relative_eq!(f.eval(0.0), 1.0);
        assert_relative_eq!(f.eval(1.0), 1f64.exp());
        // slope above the cap equals e^cap
        let e1 = 1f64.exp();
        assert_relative_eq!(f.eval(2.0), e1 * 2.0);
        assert_relative_eq!(f.eval(3.0) - f.eval(2.0), e1, max_relative = 1e-12);
    }
}
