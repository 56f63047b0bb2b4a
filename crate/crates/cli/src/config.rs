//! Flat key-value run configuration (one `key = value` per line, `#`
//! comments), with command-line flags overriding file values.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Quadratic,
    Hybrid,
    Bgk,
}

impl FromStr for ModelKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(Self::Quadratic),
            "hybrid" => Ok(Self::Hybrid),
            "bgk" => Ok(Self::Bgk),
            other => bail!("unknown model '{other}' (expected quadratic | hybrid | bgk)"),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Quadratic => "quadratic",
            Self::Hybrid => "hybrid",
            Self::Bgk => "bgk",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Experiment {
    Bkw,
    Bigaussian,
    Discontinuous,
    /// Initial coefficients from a CSV file of `k1,k2,k3,value` lines.
    CoefficientsFile(PathBuf),
}

impl FromStr for Experiment {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bkw" => Ok(Self::Bkw),
            "bigaussian" => Ok(Self::Bigaussian),
            "discontinuous" => Ok(Self::Discontinuous),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Self::CoefficientsFile(PathBuf::from(path))),
                _ => bail!(
                    "unknown experiment '{other}' (expected bkw | bigaussian | discontinuous | file:<path>)"
                ),
            },
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bkw => f.write_str("bkw"),
            Self::Bigaussian => f.write_str("bigaussian"),
            Self::Discontinuous => f.write_str("discontinuous"),
            Self::CoefficientsFile(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub eta: f64,
    pub m: u32,
    pub m0: u32,
    pub model: ModelKind,
    pub dt: f64,
    pub t_end: f64,
    pub experiment: Experiment,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    pub moment_every: u32,
    pub marginal_every: u32,
    /// Explicit marginal sample times; overrides `marginal_every` when
    /// nonempty.
    pub marginal_times: Vec<f64>,
    pub drop_floor: f64,
    pub memory_cap_gib: f64,
    pub single_thread: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eta: 5.0,
            m: 10,
            m0: 5,
            model: ModelKind::Hybrid,
            dt: 0.01,
            t_end: 1.0,
            experiment: Experiment::Bkw,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 200,
            cache_dir: PathBuf::from("cache"),
            output_dir: PathBuf::from("out"),
            moment_every: 1,
            marginal_every: 10,
            marginal_times: Vec::new(),
            drop_floor: 1e-14,
            memory_cap_gib: 8.0,
            single_thread: false,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!("line {}: expected 'key = value', got '{raw}'", lineno + 1)
            })?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "eta" => self.eta = value.parse()?,
            "m" => self.m = value.parse()?,
            "m0" => self.m0 = value.parse()?,
            "model" => self.model = value.parse()?,
            "dt" => self.dt = value.parse()?,
            "t_end" => self.t_end = value.parse()?,
            "experiment" => self.experiment = value.parse()?,
            "abs_tol" => self.abs_tol = value.parse()?,
            "rel_tol" => self.rel_tol = value.parse()?,
            "max_subdivisions" => self.max_subdivisions = value.parse()?,
            "cache_dir" => self.cache_dir = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "moment_every" => self.moment_every = value.parse()?,
            "marginal_every" => self.marginal_every = value.parse()?,
            "marginal_times" => {
                self.marginal_times = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|t| t.trim().parse::<f64>().map_err(Into::into))
                        .collect::<Result<_>>()?
                };
            }
            "drop_floor" => self.drop_floor = value.parse()?,
            "memory_cap_gib" => self.memory_cap_gib = value.parse()?,
            "single_thread" => self.single_thread = value.parse()?,
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    /// Serializes to the same flat format `apply_text` accepts.
    pub fn to_config_string(&self) -> String {
        let times = self
            .marginal_times
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "eta = {}\nm = {}\nm0 = {}\nmodel = {}\ndt = {}\nt_end = {}\n\
             experiment = {}\nabs_tol = {}\nrel_tol = {}\nmax_subdivisions = {}\n\
             cache_dir = {}\noutput_dir = {}\nmoment_every = {}\nmarginal_every = {}\n\
             marginal_times = {}\ndrop_floor = {}\nmemory_cap_gib = {}\nsingle_thread = {}\n",
            self.eta,
            self.m,
            self.m0,
            self.model,
            self.dt,
            self.t_end,
            self.experiment,
            self.abs_tol,
            self.rel_tol,
            self.max_subdivisions,
            self.cache_dir.display(),
            self.output_dir.display(),
            self.moment_every,
            self.marginal_every,
            times,
            self.drop_floor,
            self.memory_cap_gib,
            self.single_thread,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 3.0) {
            bail!("eta must satisfy eta > 3, got {}", self.eta);
        }
        if self.m0 > self.m {
            bail!(
                "m0 must not exceed m, got m0 = {} > m = {}",
                self.m0,
                self.m
            );
        }
        if !(self.dt > 0.0) {
            bail!("dt must be positive, got {}", self.dt);
        }
        if !(self.t_end >= 0.0) {
            bail!("t_end must be nonnegative, got {}", self.t_end);
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            bail!("quadrature tolerances must be positive and max_subdivisions >= 1");
        }
        if self.moment_every == 0 || self.marginal_every == 0 {
            bail!("sampling strides must be >= 1");
        }
        Ok(())
    }

    /// Extra checks that only apply when an experiment is integrated.
    pub fn validate_for_run(&self) -> Result<()> {
        if self.experiment == Experiment::Bkw && self.eta != 5.0 {
            bail!(
                "the bkw experiment requires eta = 5 (Maxwell molecules), got {}",
                self.eta
            );
        }
        Ok(())
    }

    pub fn quad_spec(&self) -> hboltz_core::quadrature::QuadratureSpec {
        hboltz_core::quadrature::QuadratureSpec {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }

    pub fn memory_cap_bytes(&self) -> u64 {
        (self.memory_cap_gib * (1u64 << 30) as f64) as u64
    }

    /// Cache file path for the tensor at (eta, M0).
    pub fn cache_file(&self) -> PathBuf {
        self.cache_dir
            .join(format!("A_eta{}_M{}.bin", self.eta, self.m0))
    }

    /// Degree cap actually integrated: the pure quadratic model runs on
    /// `I_{M0}` alone.
    pub fn effective_m(&self) -> u32 {
        match self.model {
            ModelKind::Quadratic => self.m0,
            _ => self.m,
        }
    }
}
