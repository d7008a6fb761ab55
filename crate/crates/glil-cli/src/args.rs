//! Argument schema and the small spec parsers for functions, policies and
//! events.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use glil::model::{TestFunction, VolatilityInterval};
use glil::sim::{PathEvent, VolatilityPolicy};

#[derive(Debug, Parser)]
#[command(
    name = "glil",
    version,
    about = "G-expectations, controlled-volatility diffusions, capacities, and iterated-logarithm experiments",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed override (precedence: --seed > GLIL_SEED > config file > 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long, global = true, default_value = "reports")]
    pub out: PathBuf,
    /// Verbose diagnostics on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// G-expectations, distribution bounds and inequality checks via the
    /// G-heat equation.
    Gheat(GheatArgs),
    /// Simulate controlled-volatility paths and realized quadratic
    /// variation.
    Simulate(SimulateArgs),
    /// Capacity bounds for path events over a policy family.
    Capacity(CapacityArgs),
    /// Strassen-ball distances and nets.
    Strassen(StrassenArgs),
    /// Full invariance experiment from a config file.
    Lil(LilArgs),
    /// Weighted-sum and absolute-power statistics with limsup bounds.
    Examples(LilArgs),
}

#[derive(Debug, Args)]
pub struct GheatArgs {
    /// Test function: x2 | neg-x2 | x | abs | pow:A | bump:W[:C] | expclip:CAP
    #[arg(long, default_value = "x2")]
    pub phi: String,
    /// Horizon t.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Volatility interval "low,high".
    #[arg(long, default_value = "1,2")]
    pub sigma: String,
    /// Spatial grid points (odd).
    #[arg(long, default_value_t = glil::gheat::DEFAULT_SPACE_POINTS)]
    pub points: usize,
    /// Domain halfwidth in units of sigma_high*sqrt(t).
    #[arg(long, default_value_t = glil::gheat::DEFAULT_HALFWIDTH_SIGMAS)]
    pub halfwidth_sigmas: f64,
    /// Also bound the distribution value V(B_t <= y) by sandwiching.
    #[arg(long)]
    pub dist_y: Option<f64>,
    /// Sandwich ramp width.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Also check the shift inequality at this offset b (phi must be an
    /// even bounded positive function, e.g. bump:1).
    #[arg(long)]
    pub shift_b: Option<f64>,
    /// Also check tail monotonicity "s,t" at the thresholds --ys.
    #[arg(long)]
    pub tail: Option<String>,
    /// Tail thresholds "y1,y2,...".
    #[arg(long, default_value = "0.5,1")]
    pub ys: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Volatility interval "low,high".
    #[arg(long, default_value = "1,2")]
    pub sigma: String,
    /// Policy spec: constant:S | signfb:POS:NEG | regime:RATE:V1,V2 |
    /// piecewise:B1,..@V1,..
    #[arg(long, default_value = "constant:1")]
    pub policy: String,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    /// Write the simulated paths as CSV into the output directory.
    #[arg(long)]
    pub write: bool,
    /// Print realized quadratic variation per unit time.
    #[arg(long)]
    pub qv: bool,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long, default_value = "1,2")]
    pub sigma: String,
    /// Event spec: terminal-abs-geq:Y | terminal-leq:Y | supnorm-geq:Y
    #[arg(long, default_value = "terminal-abs-geq:1")]
    pub event: String,
    /// Semicolon-separated policy specs.
    #[arg(long, default_value = "constant:1;constant:2")]
    pub policies: String,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    /// Write the bounds JSON into the output directory.
    #[arg(long)]
    pub write: bool,
}

#[derive(Debug, Args)]
pub struct StrassenArgs {
    #[command(subcommand)]
    pub command: StrassenCommand,
}

#[derive(Debug, Subcommand)]
pub enum StrassenCommand {
    /// Sup-norm distance from a grid path (values "v0,v1,...", v0 = 0) to
    /// the Strassen ball K_beta.
    Dist {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long)]
        values: String,
    },
    /// Build an increment-lattice net of K_beta and report its size and
    /// sampled radius.
    Net {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 20_000)]
        cap: usize,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Cluster diagnostics (outer containment + net coverage) for the
    /// rescaled sequence of an experiment config.
    Cluster {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: std::path::PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct LilArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Also run functional-image checks for these maps
    /// (comma-separated: eval1,runmax,supnorm,integral,zero).
    #[arg(long)]
    pub image: Option<String>,
}

pub fn parse_interval(spec: &str) -> Result<VolatilityInterval, String> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"low,high\", got {spec:?}"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e| format!("sigma low: {e}"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| format!("sigma high: {e}"))?;
    VolatilityInterval::new(lo, hi).map_err(|e| e.to_string())
}

pub fn parse_phi(spec: &str) -> Result<TestFunction, String> {
    let mut parts = spec.split(':');
    let head = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let num = |s: &str| -> Result<f64, String> {
        s.parse::<f64>().map_err(|e| format!("{spec:?}: {e}"))
    };
    match (head, args.as_slice()) {
        ("x2", []) => Ok(TestFunction::Quadratic),
        ("neg-x2", []) => Ok(TestFunction::NegQuadratic),
        ("x", []) => Ok(TestFunction::Identity),
        ("abs", []) => Ok(TestFunction::Abs),
        ("pow", [a]) => Ok(TestFunction::AbsPower { exponent: num(a)? }),
        ("bump", [w]) => Ok(TestFunction::TriangularBump {
            width: num(w)?,
            center: 0.0,
        }),
        ("bump", [w, c]) => Ok(TestFunction::TriangularBump {
            width: num(w)?,
            center: num(c)?,
        }),
        ("expclip", [cap]) => Ok(TestFunction::ExpClipped { cap: num(cap)? }),
        _ => Err(format!(
            "unknown function {spec:?}; expected x2 | neg-x2 | x | abs | pow:A | bump:W[:C] | expclip:CAP"
        )),
    }
}

fn parse_list(spec: &str) -> Result<Vec<f64>, String> {
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("{spec:?}: {e}")))
        .collect()
}

pub fn parse_policy(spec: &str, interval: &VolatilityInterval) -> Result<VolatilityPolicy, String> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let wrap = |r: glil::Result<VolatilityPolicy>| r.map_err(|e| e.to_string());
    match head {
        "constant" => {
            let s: f64 = rest.parse().map_err(|e| format!("{spec:?}: {e}"))?;
            wrap(VolatilityPolicy::constant(s, interval))
        }
        "signfb" => {
            let vals = rest
                .split(':')
                .map(|s| s.parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| format!("{spec:?}: {e}"))?;
            if vals.len() != 2 {
                return Err(format!("{spec:?}: signfb needs POS:NEG"));
            }
            wrap(VolatilityPolicy::sign_feedback(vals[0], vals[1], interval))
        }
        "regime" => {
            let (rate, values) = rest
                .split_once(':')
                .ok_or_else(|| format!("{spec:?}: regime needs RATE:V1,V2"))?;
            let rate: f64 = rate.parse().map_err(|e| format!("{spec:?}: {e}"))?;
            wrap(VolatilityPolicy::regime_switching(
                rate,
                parse_list(values)?,
                interval,
            ))
        }
        "piecewise" => {
            let (breaks, values) = rest
                .split_once('@')
                .ok_or_else(|| format!("{spec:?}: piecewise needs B1,..@V1,.."))?;
            wrap(VolatilityPolicy::piecewise(
                parse_list(breaks)?,
                parse_list(values)?,
                interval,
            ))
        }
        _ => Err(format!(
            "unknown policy {spec:?}; expected constant | signfb | regime | piecewise"
        )),
    }
}

pub fn parse_event(spec: &str) -> Result<PathEvent, String> {
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| format!("event {spec:?} needs a level, e.g. terminal-abs-geq:1"))?;
    let level: f64 = rest.parse().map_err(|e| format!("{spec:?}: {e}"))?;
    match head {
        "terminal-abs-geq" => Ok(PathEvent::TerminalAbsGeq { level }),
        "terminal-leq" => Ok(PathEvent::TerminalLeq { level }),
        "supnorm-geq" => Ok(PathEvent::SupNormGeq { level }),
        _ => Err(format!(
            "unknown event {spec:?}; expected terminal-abs-geq | terminal-leq | supnorm-geq"
        )),
    }
}

pub fn parse_values(spec: &str) -> Result<Vec<f64>, String> {
    parse_list(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_specs_parse() {
        assert!(matches!(parse_phi("x2"), Ok(TestFunction::Quadratic)));
        assert!(matches!(parse_phi("pow:4"), Ok(TestFunction::AbsPower { .. })));
        assert!(matches!(
            parse_phi("bump:1:0.5"),
            Ok(TestFunction::TriangularBump { .. })
        ));
        assert!(parse_phi("wat").is_err());
    }

    #[test]
    fn policy_specs_parse_and_validate() {
        let iv = VolatilityInterval::new(1.0, 2.0).unwrap();
        assert!(parse_policy("constant:1.5", &iv).is_ok());
        assert!(parse_policy("constant:9", &iv).is_err());
        assert!(parse_policy("signfb:2:1", &iv).is_ok());
        assert!(parse_policy("regime:1:1,2", &iv).is_ok());
        assert!(parse_policy("piecewise:0.5@1,2", &iv).is_ok());
        assert!(parse_policy("mystery:1", &iv).is_err());
    }

    #[test]
    fn interval_and_event_specs_parse() {
        assert!(parse_interval("1,2").is_ok());
        assert!(parse_interval("2,1").is_err());
        assert!(parse_interval("1").is_err());
        assert!(parse_event("terminal-abs-geq:1").is_ok());
        assert!(parse_event("nope:1").is_err());
    }
}
