//! Weighted-sum and absolute-power path statistics with their closed-form
//! or quadrature limsup bounds.
//!
//! S_n = (2n³ log log n)^{−1/2} Σ_{i=1}^n f(i/n)·B_i with limsup bounds
//! σ·(∫₀¹F²)^{1/2}, F(t) = ∫_t^1 f(s)ds.
//!
//! T_n = n^{−1−a/2} (2 log log n)^{−a/2} Σ_{i=1}^n |B_i|^a with limsup
//! bounds σ^a·c(a), c(a) = 2(a+2)^{a/2−1} / (a^{a/2} I(a)^a) and
//! I(a) = ∫₀¹ dt/√(1−t^a). The loglog exponent −a/2 matches both
//! particular cases a = 1, 2 and the rescaled-path representation
//! T_n ≈ ∫₀¹|ζ_n|^a dt.

use serde::{Deserialize, Serialize};

use crate::error::{GlilError, Result};
use crate::model::{SamplePath, TestFunction, VolatilityInterval};

/// Which example statistic a bound refers to.
#[derive(Debug, Clone, PartialEq)]
pub enum ExampleKind {
    /// Weighted sum with f(t) = t^α, α > −1.
    WeightedPower { alpha: f64 },
    /// Weighted sum with a tabulated Riemann-integrable weight on [0,1].
    WeightedFunction { f: TestFunction },
    /// Absolute power Σ|B_i|^a, a ≥ 1.
    AbsPower { a: f64 },
}

/// S_n for weight f evaluated on the path's integer-time values.
pub fn weighted_sum_statistic(f: &TestFunction, n: u64, path: &SamplePath) -> Result<f64> {
    let scale = normalizer_weighted(n)?;
    let mut sum = 0.0;
    for i in 1..=n {
        let b = integer_value(path, i)?;
        sum += f.eval(i as f64 / n as f64) * b;
    }
    Ok(sum * scale)
}

/// (2n³ log log n)^{−1/2}, shared by streaming accumulators.
pub fn normalizer_weighted(n: u64) -> Result<f64> {
    let nf = n as f64;
    if !(nf > std::f64::consts::E) {
        return Err(GlilError::Domain(format!("need n > e, got {n}")));
    }
    Ok(1.0 / (2.0 * nf.powi(3) * nf.ln().ln()).sqrt())
}

/// T_n for exponent a evaluated on the path's integer-time values.
pub fn abs_power_statistic(a: f64, n: u64, path: &SamplePath) -> Result<f64> {
    let scale = normalizer_abs_power(a, n)?;
    let mut sum = 0.0;
    for i in 1..=n {
        let b = integer_value(path, i)?;
        sum += b.abs().powf(a);
    }
    Ok(sum * scale)
}

/// n^{−1−a/2} (2 log log n)^{−a/2}, shared by streaming accumulators.
pub fn normalizer_abs_power(a: f64, n: u64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(GlilError::Domain(format!("need a >= 1, got {a}")));
    }
    let nf = n as f64;
    if !(nf > std::f64::consts::E) {
        return Err(GlilError::Domain(format!("need n > e, got {n}")));
    }
    Ok(nf.powf(-1.0 - a / 2.0) * (2.0 * nf.ln().ln()).powf(-a / 2.0))
}

fn integer_value(path: &SamplePath, i: u64) -> Result<f64> {
    let t = i as f64;
    if t > path.horizon() * (1.0 + 1e-12) {
        return Err(GlilError::Coverage(format!(
            "path horizon {} does not reach integer time {i}",
            path.horizon()
        )));
    }
    let idx = path.grid().index_of(t)?;
    Ok(path.values()[idx])
}

/// Limsup bounds (σ̲-scaled, σ̄-scaled) for an example statistic.
pub fn example_bounds(kind: &ExampleKind, interval: &VolatilityInterval) -> Result<(f64, f64)> {
    let (c, power) = match kind {
        ExampleKind::WeightedPower { alpha } => {
            if !(*alpha > -1.0) {
                return Err(GlilError::Domain(format!(
                    "weighted power needs alpha > -1, got {alpha}"
                )));
            }
            (1.0 / ((alpha + 1.5) * (alpha + 2.0)).sqrt(), 1.0)
        }
        ExampleKind::WeightedFunction { f } => (weighted_constant(f), 1.0),
        ExampleKind::AbsPower { a } => {
            if !(*a >= 1.0) {
                return Err(GlilError::Domain(format!("abs power needs a >= 1, got {a}")));
            }
            (abs_power_constant(*a)?, *a)
        }
    };
    Ok((
        interval.low().powf(power) * c,
        interval.high().powf(power) * c,
    ))
}

/// (∫₀¹ F²)^{1/2} with F(t) = ∫_t^1 f(s) ds, by composite trapezoid on a
/// fine fixed grid.
fn weighted_constant(f: &TestFunction) -> f64 {
    const N: usize = 8192;
    let h = 1.0 / N as f64;
    // reverse cumulative trapezoid for F, then trapezoid for F^2
    let vals: Vec<f64> = (0..=N).map(|i| f.eval(i as f64 * h)).collect();
    let mut big_f = vec![0.0; N + 1];
    for i in (0..N).rev() {
        big_f[i] = big_f[i + 1] + 0.5 * h * (vals[i] + vals[i + 1]);
    }
    let mut int_f2 = 0.0;
    for i in 0..N {
        int_f2 += 0.5 * h * (big_f[i] * big_f[i] + big_f[i + 1] * big_f[i + 1]);
    }
    int_f2.sqrt()
}

/// c(a) = 2(a+2)^{a/2−1} / (a^{a/2} I(a)^a) via quadrature of I(a).
pub fn abs_power_constant(a: f64) -> Result<f64> {
    let i_a = singular_unit_integral(a)?;
    Ok(2.0 * (a + 2.0).powf(a / 2.0 - 1.0) / (a.powf(a / 2.0) * i_a.powf(a)))
}

/// I(a) = ∫₀¹ dt/√(1−t^a), computed after the substitution t = 1−u² which
/// removes the endpoint singularity: the integrand becomes
/// g(u) = 2u/√(1−(1−u²)^a) with g(0) = 2/√a. Simpson panels are doubled
/// until the estimate stabilizes.
fn singular_unit_integral(a: f64) -> Result<f64> {
    let g = |u: f64| -> f64 {
        if u == 0.0 {
            return 2.0 / a.sqrt();
        }
        let denom = 1.0 - (1.0 - u * u).powf(a);
        2.0 * u / denom.sqrt()
    };
    let simpson = |panels: usize| -> f64 {
        let h = 1.0 / panels as f64;
        let mut acc = g(0.0) + g(1.0);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(i as f64 * h);
        }
        acc * h / 3.0
    };
    let mut panels = 64;
    let mut prev = simpson(panels);
    for _ in 0..14 {
        panels *= 2;
        let cur = simpson(panels);
        if (cur - prev).abs() <= 1e-12 * cur.abs().max(1.0) {
            if !cur.is_finite() || cur <= 0.0 {
                return Err(GlilError::Quadrature(format!(
                    "integral I({a}) evaluated to {cur}"
                )));
            }
            return Ok(cur);
        }
        prev = cur;
    }
    Err(GlilError::Quadrature(format!(
        "I({a}) failed to stabilize at {panels} panels"
    )))
}

/// Continuous maps of C[0,1] used by the image experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalMap {
    EvaluateAtOne,
    RunningMax,
    SupNorm,
    Integral,
    Zero,
}

impl FunctionalMap {
    pub fn eval(&self, values: &[f64]) -> f64 {
        match self {
            FunctionalMap::EvaluateAtOne => *values.last().unwrap(),
            FunctionalMap::RunningMax => values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)),
            FunctionalMap::SupNorm => values.iter().fold(0.0, |m, &v| m.max(v.abs())),
            FunctionalMap::Integral => {
                let p = values.len() - 1;
                let inner: f64 = values[1..p].iter().sum();
                (inner + 0.5 * (values[0] + values[p])) / p as f64
            }
            FunctionalMap::Zero => 0.0,
        }
    }

    /// Image interval of K_β under the map.
    pub fn image(&self, beta: f64) -> (f64, f64) {
        match self {
            FunctionalMap::EvaluateAtOne => (-beta, beta),
            FunctionalMap::RunningMax | FunctionalMap::SupNorm => (0.0, beta),
            // sup of ∫₀¹x over K_β is β/√3 (attained by ẋ ∝ 1−t)
            FunctionalMap::Integral => (-beta / 3f64.sqrt(), beta / 3f64.sqrt()),
            FunctionalMap::Zero => (0.0, 0.0),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FunctionalMap::EvaluateAtOne => "evaluate_at_1",
            FunctionalMap::RunningMax => "running_max",
            FunctionalMap::SupNorm => "sup_norm",
            FunctionalMap::Integral => "integral",
            FunctionalMap::Zero => "zero",
        }
    }
}
