use std::path::{Path, PathBuf};
use std::sync::Arc;

use orbitcount::group::{Group, Presentation};
use orbitcount::metric::{Metric, MetricKind, WalkSpec};
use orbitcount::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Free {
        rank: usize,
    },
    Surface {
        genus: usize,
    },
    SmallCancellation {
        generators: Vec<String>,
        relators: Vec<String>,
    },
    Schottky {
        traces: [f64; 2],
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<Group> {
        let p = match self {
            GroupSpec::Free { rank } => Presentation::free(*rank)?,
            GroupSpec::Surface { genus } => Presentation::surface(*genus)?,
            GroupSpec::SmallCancellation {
                generators,
                relators,
            } => {
                let rels: Vec<&str> = relators.iter().map(String::as_str).collect();
                Presentation::small_cancellation(generators.clone(), &rels)?
            }
            GroupSpec::Schottky { traces } => Presentation::schottky(traces[0], traces[1])?,
        };
        Ok(Group::new(p))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    Word,
    ScaledWord {
        factor: f64,
    },
    GreenClosedForm,
    GreenNumeric {
        /// One probability per alphabet symbol; uniform when omitted.
        #[serde(default)]
        probs: Option<Vec<f64>>,
        #[serde(default = "default_absorbing")]
        absorbing_radius: usize,
    },
    FuchsianOrbit,
}

fn default_absorbing() -> usize {
    30
}

impl MetricSpec {
    pub fn build(&self, group: &Arc<Group>) -> Result<Metric> {
        let kind = match self {
            MetricSpec::Word => MetricKind::Word,
            MetricSpec::ScaledWord { factor } => MetricKind::ScaledWord(*factor),
            MetricSpec::GreenClosedForm => MetricKind::GreenClosedForm,
            MetricSpec::GreenNumeric {
                probs,
                absorbing_radius,
            } => {
                let walk = match probs {
                    Some(p) => WalkSpec {
                        probs: p.clone(),
                        identity: 0.0,
                    },
                    None => WalkSpec::uniform(group.alphabet_size()),
                };
                MetricKind::GreenNumeric {
                    walk,
                    absorbing_radius: *absorbing_radius,
                }
            }
            MetricSpec::FuchsianOrbit => MetricKind::FuchsianOrbit,
        };
        Metric::new(group.clone(), kind)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct AutomatonParams {
    /// Fixed radius; when absent radii 1..=max_rcone are tried in turn.
    pub rcone: Option<usize>,
    pub max_rcone: usize,
    pub validate_to: usize,
}

impl Default for AutomatonParams {
    fn default() -> Self {
        AutomatonParams {
            rcone: None,
            max_rcone: 6,
            validate_to: 6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ThermoParams {
    /// Fixed depth; when absent the depth is chosen adaptively in [1, max_depth].
    pub depth: Option<usize>,
    pub max_depth: usize,
    pub tol: f64,
    pub gibbs_depth: usize,
    /// Manhattan grid: [start, stop, count].
    pub manhattan_grid: (f64, f64, usize),
    /// Spectral scan grid: [start, stop, count].
    pub scan_grid: (f64, f64, usize),
    /// Roof power N for the mixing check.
    pub roof_power: usize,
    pub orbit_length: usize,
}

impl Default for ThermoParams {
    fn default() -> Self {
        ThermoParams {
            depth: None,
            max_depth: 8,
            tol: 1e-6,
            gibbs_depth: 6,
            manhattan_grid: (-1.0, 2.0, 31),
            scan_grid: (0.1, 30.0, 60),
            roof_power: 1,
            orbit_length: 8,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CountingParams {
    pub n_max: usize,
    pub eps: f64,
    pub poincare_n: usize,
}

impl Default for CountingParams {
    fn default() -> Self {
        CountingParams {
            n_max: 10,
            eps: 0.5,
            poincare_n: 10,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Inline group, or `group_file` pointing at a TOML file holding one.
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub group_file: Option<PathBuf>,
    #[serde(default)]
    pub metrics: Vec<MetricSpec>,
    #[serde(default)]
    pub automaton: AutomatonParams,
    #[serde(default)]
    pub thermo: ThermoParams,
    #[serde(default)]
    pub counting: CountingParams,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub depth: Option<usize>,
    pub rcone: Option<usize>,
    pub nmax: Option<usize>,
    pub eps: Option<f64>,
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path, ov: &Overrides) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = RunConfig::parse(&text)?;
        if cfg.group.is_none() {
            if let Some(f) = &cfg.group_file {
                let p = path.parent().unwrap_or(Path::new(".")).join(f);
                let t = std::fs::read_to_string(&p)
                    .map_err(|e| Error::Input(format!("cannot read {}: {e}", p.display())))?;
                cfg.group =
                    Some(toml::from_str(&t).map_err(|e| Error::Input(format!("group file: {e}")))?);
            }
        }
        cfg.apply(ov);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Input(format!("config: {e}")))
    }

    pub fn apply(&mut self, ov: &Overrides) {
        if let Some(o) = &ov.out {
            self.output_dir = o.clone();
        }
        if let Some(d) = ov.depth {
            self.thermo.depth = Some(d);
        }
        if let Some(r) = ov.rcone {
            self.automaton.rcone = Some(r);
        }
        if let Some(n) = ov.nmax {
            self.counting.n_max = n;
        }
        if let Some(e) = ov.eps {
            self.counting.eps = e;
        }
        if let Some(t) = ov.tol {
            self.thermo.tol = t;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.group.is_none() {
            return Err(Error::Input("config names no group".into()));
        }
        if self.metrics.len() > 2 {
            return Err(Error::Input("at most two metrics".into()));
        }
        if !(self.thermo.tol > 0.0) || !(self.counting.eps > 0.0) {
            return Err(Error::Input("tolerances must be positive".into()));
        }
        if self.thermo.manhattan_grid.2 < 2 || self.thermo.scan_grid.2 < 2 {
            return Err(Error::Input("grids need at least two points".into()));
        }
        Ok(())
    }

    pub fn group_spec(&self) -> &GroupSpec {
        self.group.as_ref().expect("validated")
    }

    /// Canonical serialization used for hashing.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        c.group_file = None;
        serde_json::to_string(&c).expect("config serializes")
    }
}
