//! Flat `key = value` config files and the resolved run configuration.
//!
//! Config files use TOML syntax restricted to top-level scalars. Keys mirror
//! the long command-line flags with `-` written as `_`; flags win over file
//! values.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use nhpt_core::dynamics::IntegrationConfig;
use nhpt_core::operators::{eigendecompose, matrix_elements, EigenSystem, GeneralOperator, HermitianOperator};
use nhpt_core::scenarios::Model;

use crate::io::read_operator;
use crate::pulse_spec::PulseSpec;

pub const KNOWN_KEYS: &[&str] = &[
    "system", "h0", "h1", "pulse", "init", "t_max", "rel_tol", "abs_tol", "max_step", "points", "tails",
    "converge", "out", "seed", "trials", "suite", "min_dim", "max_dim", "param", "range", "samples",
    "omega_max", "method", "scale",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, toml::Value>,
    origin: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().context("config file is not valid key = value text")?;
        let mut values = BTreeMap::new();
        for (k, v) in table {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                bail!("unknown config key {k:?}");
            }
            if matches!(v, toml::Value::Table(_) | toml::Value::Array(_)) {
                bail!("config key {k:?} must hold a single value");
            }
            values.insert(k, v);
        }
        Ok(Self { values, origin: None })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        cfg.origin = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self> {
        path.map(Self::load).unwrap_or_else(|| Ok(Self::default()))
    }

    /// Value of `key` rendered as text, so numbers and strings parse alike.
    fn raw(&self, key: &str) -> Option<String> {
        self.values.get(key).map(|v| match v {
            toml::Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    /// Flag value if given, else the parsed config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("config key {key}: cannot parse {s:?}: {e}")),
        }
    }

    /// Relative paths in the file are taken from the file's directory.
    pub fn pick_path(&self, flag: Option<PathBuf>, key: &str) -> Result<Option<PathBuf>> {
        if flag.is_some() {
            return Ok(flag);
        }
        Ok(self.raw(key).map(|s| {
            let p = PathBuf::from(s);
            match self.origin.as_ref().and_then(|o| o.parent()) {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            }
        }))
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemSource {
    Builtin(Model),
    Files { h0: PathBuf, h1: PathBuf },
}

impl SystemSource {
    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ep2" => Ok(SystemSource::Builtin(Model::Ep2)),
            "ep3" => Ok(SystemSource::Builtin(Model::Ep3)),
            _ => bail!("unknown system {name:?}; expected ep2 or ep3 (or give --h0 and --h1)"),
        }
    }

    pub fn resolve(name: Option<String>, h0: Option<PathBuf>, h1: Option<PathBuf>) -> Result<Self> {
        match (name, h0, h1) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => bail!("give either a builtin system or operator files, not both"),
            (Some(n), None, None) => Self::builtin(&n),
            (None, Some(h0), Some(h1)) => Ok(SystemSource::Files { h0, h1 }),
            (None, Some(_), None) | (None, None, Some(_)) => bail!("operator files need both --h0 and --h1"),
            (None, None, None) => bail!("no system given; use --system ep2|ep3 or --h0/--h1"),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SystemSource::Builtin(m) => m.name().to_string(),
            SystemSource::Files { h0, h1 } => format!("files({}, {})", h0.display(), h1.display()),
        }
    }
}

/// Eigenbasis of H0 and H1 matrix elements, ready for integration.
#[derive(Clone, Debug)]
pub struct LoadedSystem {
    pub model: Option<Model>,
    pub h0: HermitianOperator,
    pub h1: GeneralOperator,
    pub basis: EigenSystem,
    pub h1e: GeneralOperator,
}

impl LoadedSystem {
    pub fn load(src: &SystemSource) -> Result<Self> {
        let (model, h0, h1) = match src {
            SystemSource::Builtin(m) => {
                let (h0, h1) = m.operators();
                (Some(*m), h0, h1)
            }
            SystemSource::Files { h0, h1 } => {
                let a = read_operator(h0)?;
                let b = read_operator(h1)?;
                if a.dim() != b.dim() {
                    bail!("H0 is {0}x{0} but H1 is {1}x{1}", a.dim(), b.dim());
                }
                let a = HermitianOperator::new(a).with_context(|| format!("{} must be Hermitian", h0.display()))?;
                (None, a, b)
            }
        };
        let basis = eigendecompose(&h0)?;
        let h1e = matrix_elements(&h1, &basis)?;
        Ok(Self { model, h0, h1, basis, h1e })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: SystemSource,
    pub pulse: PulseSpec,
    /// 1-based initial level.
    pub init: usize,
    pub integration: IntegrationConfig,
    pub out: PathBuf,
    pub converge: bool,
}

impl RunConfig {
    pub fn check_init(&self, dim: usize) -> Result<()> {
        if self.init < 1 || self.init > dim {
            bail!("initial state {} outside 1..={dim}", self.init);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let cfg = ConfigFile::parse("pulse = \"pole:A=1,tp=0.5\"\ninit = 2\nt_max = 500\ntails = true\n").unwrap();
        assert_eq!(cfg.pick::<usize>(None, "init").unwrap(), Some(2));
        assert_eq!(cfg.pick(Some(1usize), "init").unwrap(), Some(1));
        assert_eq!(cfg.pick::<f64>(None, "t_max").unwrap(), Some(500.0));
        assert_eq!(cfg.pick::<String>(None, "pulse").unwrap().as_deref(), Some("pole:A=1,tp=0.5"));
        assert!(cfg.flag(false, "tails").unwrap());
        assert_eq!(cfg.pick::<f64>(None, "rel_tol").unwrap(), None);
    }

    #[test]
    fn rejects_structure_and_unknown_keys() {
        assert!(ConfigFile::parse("colour = 1").is_err());
        assert!(ConfigFile::parse("[section]\ninit = 1").is_err());
        assert!(ConfigFile::parse("init = [1, 2]").is_err());
        assert!(ConfigFile::parse("init = ").is_err());
        let cfg = ConfigFile::parse("init = \"two\"").unwrap();
        assert!(cfg.pick::<usize>(None, "init").is_err());
    }

    #[test]
    fn system_sources() {
        assert_eq!(SystemSource::resolve(Some("EP3".into()), None, None).unwrap(), SystemSource::Builtin(Model::Ep3));
        assert!(SystemSource::resolve(None, Some("a".into()), None).is_err());
        assert!(SystemSource::resolve(None, None, None).is_err());
        assert!(SystemSource::resolve(Some("ep4".into()), None, None).is_err());
    }
}
