//! Scenario configuration files (TOML).
//!
//! ```toml
//! seed = 7
//!
//! [system.chain]
//! length = 3
//! beta = 1.0
//! epsilon = 0.5
//!
//! [tolerances]
//! stationary = 1e-8
//! ```
//!
//! Explicit systems reference matrix files relative to the config file:
//!
//! ```toml
//! [system.explicit]
//! dim_a = 2
//! dim_b = 2
//! hamiltonian = "h.mat"
//! beta = 0.7
//!
//! [system.explicit.dissipator]
//! kind = "reset"
//! target = "rho_a.mat"
//! rate = 1.0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    SteadyState,
    Uniqueness,
    NoGo,
    Decompose,
    Chain,
    Sweep,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::SteadyState => "steady-state",
            Scenario::Uniqueness => "uniqueness",
            Scenario::NoGo => "no-go",
            Scenario::Decompose => "decompose",
            Scenario::Chain => "chain",
            Scenario::Sweep => "sweep",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub length: usize,
    pub beta: f64,
    pub epsilon: f64,
    /// Second reset rate for the rate-independence check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_epsilon: Option<f64>,
}

impl ChainSpec {
    pub fn compare_epsilon(&self) -> f64 {
        self.compare_epsilon
            .unwrap_or(if self.epsilon == 1.0 { 0.5 } else { 1.0 })
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DissipatorSpec {
    /// Lifted reset channel towards `target` on the first factor.
    Reset { target: PathBuf, rate: f64 },
    /// Jump operators on the first factor, lifted to the whole space.
    Local {
        #[serde(default)]
        lamb_shift: Option<PathBuf>,
        jumps: Vec<PathBuf>,
    },
    /// Jump operators on the whole space.
    Global {
        #[serde(default)]
        lamb_shift: Option<PathBuf>,
        jumps: Vec<PathBuf>,
    },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub dim_a: usize,
    pub dim_b: usize,
    pub hamiltonian: PathBuf,
    pub dissipator: DissipatorSpec,
    /// Inverse temperature for the no-go scenario.
    #[serde(default)]
    pub beta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemSpec {
    Chain(ChainSpec),
    Explicit(ExplicitSpec),
}

/// Grid for the sweep scenario. Omitted axes take the value of the base
/// chain spec.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub lengths: Vec<usize>,
    #[serde(default)]
    pub betas: Vec<f64>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative singular-value cut for kernels.
    pub null_space: f64,
    pub stationary: f64,
    pub product: f64,
    pub gibbs: f64,
    pub cptp: f64,
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            null_space: lindbladlab::tensor::DEFAULT_NULL_TOL,
            stationary: lindbladlab::steady::STATIONARY_TOL,
            product: 1e-8,
            gibbs: 1e-10,
            cptp: 1e-9,
            positivity: lindbladlab::uniqueness::POSITIVITY_TOL,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 6] = ["null_space", "stationary", "product", "gibbs", "cptp", "positivity"];

    /// Sets tolerance `name`; `field` names the source in error messages.
    pub fn set(&mut self, name: &str, value: f64) -> std::result::Result<(), String> {
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("must be a positive finite number, got {value}"));
        }
        let slot = match name {
            "null_space" => &mut self.null_space,
            "stationary" => &mut self.stationary,
            "product" => &mut self.product,
            "gibbs" => &mut self.gibbs,
            "cptp" => &mut self.cptp,
            "positivity" => &mut self.positivity,
            _ => return Err(format!("unknown tolerance (expected one of {})", Self::NAMES.join(", "))),
        };
        *slot = value;
        Ok(())
    }
}

/// A `name=value` tolerance override from the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct TolOverride {
    pub name: String,
    pub value: f64,
}

impl FromStr for TolOverride {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
        let value = value
            .trim()
            .parse()
            .map_err(|_| format!("tolerance `{name}` has non-numeric value `{value}`"))?;
        Ok(TolOverride {
            name: name.trim().to_string(),
            value,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub system: SystemSpec,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub sweep: Option<SweepSpec>,
    /// Directory that relative matrix paths resolve against.
    pub base_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    chain: Option<ChainSpec>,
    explicit: Option<ExplicitSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: Option<RawSystem>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    sweep: Option<SweepSpec>,
}

impl ScenarioConfig {
    pub fn load(path: &Path, scenario: Scenario) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, path, &base, scenario)
    }

    /// Parses and validates config text. `file` is only used in messages.
    pub fn parse(text: &str, file: &Path, base_dir: &Path, scenario: Scenario) -> Result<Self> {
        let fail = |field: &str, message: String| CliError::Config {
            file: file.to_path_buf(),
            field: field.to_string(),
            message,
        };
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = match e.span() {
                Some(span) => {
                    let line = text[..span.start].matches('\n').count() + 1;
                    format!("line {line}")
                }
                None => "<document>".into(),
            };
            fail(&field, message)
        })?;

        let system = match raw.system {
            None => return Err(fail("system", "missing; give [system.chain] or [system.explicit]".into())),
            Some(RawSystem {
                chain: Some(_),
                explicit: Some(_),
            }) => {
                return Err(fail(
                    "system",
                    "both `system.chain` and `system.explicit` are given; specify exactly one system source".into(),
                ))
            }
            Some(RawSystem {
                chain: Some(c), ..
            }) => SystemSpec::Chain(c),
            Some(RawSystem {
                explicit: Some(x), ..
            }) => SystemSpec::Explicit(x),
            Some(_) => return Err(fail("system", "empty; give [system.chain] or [system.explicit]".into())),
        };

        let mut tolerances = Tolerances::default();
        for (name, &value) in &raw.tolerances {
            tolerances
                .set(name, value)
                .map_err(|m| fail(&format!("tolerances.{name}"), m))?;
        }

        let config = ScenarioConfig {
            scenario,
            system,
            tolerances,
            seed: raw.seed.unwrap_or(0),
            output: raw.output.map(|p| base_dir.join(p)),
            sweep: raw.sweep,
            base_dir: base_dir.to_path_buf(),
        };
        config.validate().map_err(|(field, m)| fail(&field, m))?;
        Ok(config)
    }

    /// Applies `--tol` overrides, which take precedence over the file.
    pub fn apply_overrides(&mut self, overrides: &[TolOverride]) -> Result<()> {
        for o in overrides {
            self.tolerances.set(&o.name, o.value).map_err(|message| CliError::Config {
                file: PathBuf::from("--tol"),
                field: format!("tolerances.{}", o.name),
                message,
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> std::result::Result<(), (String, String)> {
        let cap = lindbladlab::dim_cap();
        let check_chain = |c: &ChainSpec, at: &str| -> std::result::Result<(), (String, String)> {
            let err = |k: &str, m: String| Err((format!("{at}.{k}"), m));
            if c.length < 2 {
                return err("length", format!("must be at least 2, got {}", c.length));
            }
            if c.length >= usize::BITS as usize || (1usize << c.length) > cap {
                return err("length", format!("2^{} exceeds the dimension cap {cap}", c.length));
            }
            if !(c.beta.is_finite() && c.beta >= 0.0) {
                return err("beta", format!("must be finite and non-negative, got {}", c.beta));
            }
            if !(c.epsilon.is_finite() && c.epsilon > 0.0) {
                return err("epsilon", format!("must be positive, got {}", c.epsilon));
            }
            if let Some(e) = c.compare_epsilon {
                if !(e.is_finite() && e > 0.0 && e != c.epsilon) {
                    return err("compare_epsilon", format!("must be positive and differ from epsilon, got {e}"));
                }
            }
            Ok(())
        };
        match &self.system {
            SystemSpec::Chain(c) => check_chain(c, "system.chain")?,
            SystemSpec::Explicit(x) => {
                let at = "system.explicit";
                if x.dim_a == 0 || x.dim_b == 0 {
                    return Err((format!("{at}.dim_a"), "dimensions must be positive".into()));
                }
                if x.dim_a * x.dim_b > cap {
                    return Err((format!("{at}.dim_b"), format!("total dimension {} exceeds the cap {cap}", x.dim_a * x.dim_b)));
                }
                if let Some(b) = x.beta {
                    if !b.is_finite() {
                        return Err((format!("{at}.beta"), "must be finite".into()));
                    }
                }
                match &x.dissipator {
                    DissipatorSpec::Reset { rate, .. } if !(rate.is_finite() && *rate > 0.0) => {
                        return Err((format!("{at}.dissipator.rate"), format!("must be positive, got {rate}")));
                    }
                    DissipatorSpec::Local { jumps, .. } | DissipatorSpec::Global { jumps, .. } if jumps.is_empty() => {
                        return Err((format!("{at}.dissipator.jumps"), "at least one jump operator is required".into()));
                    }
                    _ => {}
                }
                if self.scenario == Scenario::NoGo && x.beta.is_none() {
                    return Err((format!("{at}.beta"), "required by the no-go scenario".into()));
                }
            }
        }

        match self.scenario {
            Scenario::Chain | Scenario::Sweep if !matches!(self.system, SystemSpec::Chain(_)) => {
                return Err(("system.chain".into(), format!("required by the {} scenario", self.scenario)));
            }
            Scenario::Sweep => {
                let SystemSpec::Chain(base) = &self.system else { unreachable!() };
                let sweep = self.sweep.clone().unwrap_or_default();
                for (i, &length) in sweep.lengths.iter().enumerate() {
                    check_chain(&ChainSpec { length, ..base.clone() }, "sweep")
                        .map_err(|(_, m)| (format!("sweep.lengths[{i}]"), m))?;
                }
                for (i, &beta) in sweep.betas.iter().enumerate() {
                    check_chain(&ChainSpec { beta, ..base.clone() }, "sweep")
                        .map_err(|(_, m)| (format!("sweep.betas[{i}]"), m))?;
                }
                for (i, &epsilon) in sweep.epsilons.iter().enumerate() {
                    let point = ChainSpec {
                        epsilon,
                        compare_epsilon: None,
                        ..base.clone()
                    };
                    check_chain(&point, "sweep").map_err(|(_, m)| (format!("sweep.epsilons[{i}]"), m))?;
                }
            }
            _ => {}
        }
        if self.sweep.is_some() && self.scenario != Scenario::Sweep {
            return Err(("sweep".into(), format!("only valid for the sweep scenario, not {}", self.scenario)));
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        self.base_dir.join(path)
    }

    /// Grid points of the sweep scenario in lexicographic (length, beta,
    /// epsilon) order.
    pub fn sweep_points(&self) -> Vec<ChainSpec> {
        let SystemSpec::Chain(base) = &self.system else {
            return Vec::new();
        };
        let sweep = self.sweep.clone().unwrap_or_default();
        let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
        let lengths = if sweep.lengths.is_empty() { vec![base.length] } else { sweep.lengths };
        let betas = or(&sweep.betas, base.beta);
        let epsilons = or(&sweep.epsilons, base.epsilon);
        let mut points = Vec::new();
        for &length in &lengths {
            for &beta in &betas {
                for &epsilon in &epsilons {
                    // The compare rate only survives when it cannot clash.
                    let compare_epsilon = base.compare_epsilon.filter(|&c| c != epsilon);
                    points.push(ChainSpec {
                        length,
                        beta,
                        epsilon,
                        compare_epsilon,
                    });
                }
            }
        }
        points
    }
}
