//! Layered flat configuration: built-in defaults, then an optional config
//! file (key=value lines, or a previously written run manifest), then
//! command-line `--key value` flags. Later layers win.

use crate::CliError;
use qfc_core::{
    burn_in_heuristic, thermal_equilibrium, wrap_angle, ControlPolicy, PolarState,
    ProtocolCoefficients, PublishedProtocol, Scheme, SimParams, ThermalMode, TrajectoryConfig,
};
use std::collections::BTreeMap;
use std::path::Path;

pub const KNOWN_KEYS: &[(&str, &str)] = &[
    ("k", "1"),
    ("gamma", "0.1"),
    ("n_t", "0.1"),
    ("omega", "10"),
    ("dt", "1e-4"),
    ("t_burn", "auto"),
    ("t_avg", "100"),
    ("seed", "1"),
    ("n_traj", "1000"),
    ("protocol", "published"),
    ("c0", "0"),
    ("c1", "-0.5"),
    ("c2", "0"),
    ("c3", "0"),
    ("thermal_mode", "lindblad"),
    ("scheme", "milstein"),
    ("initial_a", "auto"),
    ("initial_theta", "0"),
    ("switch_ratio", "45"),
    ("record_stride", "100"),
    ("omega_grid", "20,30,40,45,50,55,60,70"),
    ("budget", "60"),
    ("dims", "1"),
    ("points", ""),
    ("out", ""),
    ("workers", "0"),
];

#[derive(Debug, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn defaults() -> Self {
        let values = KNOWN_KEYS
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self { values }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !self.values.contains_key(key) {
            return Err(CliError::Config(format!("unknown config key '{key}'")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Load a config file: either key=value lines (# comments) or a JSON run
    /// manifest, whose "config" object is re-ingested.
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        if text.trim_start().starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("bad manifest {}: {e}", path.display())))?;
            let obj = v.get("config").and_then(|c| c.as_object()).ok_or_else(|| {
                CliError::Config(format!("manifest {} has no config object", path.display()))
            })?;
            for (key, val) in obj {
                let s = match val {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                self.set(key, &s)?;
            }
            return Ok(());
        }
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Apply `--key value` / `--key=value` flags. `--config <path>` loads a
    /// file at its position in the argument order.
    pub fn apply_flags(&mut self, args: &[String]) -> Result<(), CliError> {
        let mut i = 0;
        while i < args.len() {
            let arg = &args[i];
            let Some(stripped) = arg.strip_prefix("--") else {
                return Err(CliError::Config(format!("unexpected argument '{arg}'")));
            };
            let (key, value) = if let Some((k, v)) = stripped.split_once('=') {
                (k.to_string(), v.to_string())
            } else {
                i += 1;
                let v = args.get(i).ok_or_else(|| {
                    CliError::Config(format!("flag --{stripped} is missing a value"))
                })?;
                (stripped.to_string(), v.clone())
            };
            if key == "config" {
                self.load_file(Path::new(&value))?;
            } else {
                self.set(&key, &value)?;
            }
            i += 1;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        &self.values[key]
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.get(key).parse().map_err(|_| {
            CliError::Config(format!("{key} must be a number, got '{}'", self.get(key)))
        })
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.get(key).parse().map_err(|_| {
            CliError::Config(format!("{key} must be an integer, got '{}'", self.get(key)))
        })
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.get(key).parse().map_err(|_| {
            CliError::Config(format!("{key} must be an integer, got '{}'", self.get(key)))
        })
    }

    pub fn n_traj(&self) -> Result<usize, CliError> {
        let n = self.usize("n_traj")?;
        if n == 0 {
            return Err(CliError::Config("n_traj must be at least 1".into()));
        }
        Ok(n)
    }

    pub fn params(&self) -> Result<SimParams, CliError> {
        let mut p = SimParams {
            k: self.f64("k")?,
            gamma: self.f64("gamma")?,
            n_t: self.f64("n_t")?,
            omega: self.f64("omega")?,
            dt: self.f64("dt")?,
            t_burn: 0.0,
            t_avg: self.f64("t_avg")?,
            seed: self.u64("seed")?,
        };
        p.t_burn = match self.get("t_burn") {
            "auto" => burn_in_heuristic(&p),
            other => other.parse().map_err(|_| {
                CliError::Config(format!("t_burn must be a number or 'auto', got '{other}'"))
            })?,
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    pub fn coefficients(&self) -> Result<ProtocolCoefficients, CliError> {
        Ok(ProtocolCoefficients {
            c0: self.f64("c0")?,
            c1: self.f64("c1")?,
            c2: self.f64("c2")?,
            c3: self.f64("c3")?,
        })
    }

    pub fn protocol_table_row(&self, gamma: f64) -> Result<PublishedProtocol, CliError> {
        let mut proto = PublishedProtocol::for_gamma(gamma).ok_or_else(|| {
            CliError::Config(format!(
                "no published protocol table row for gamma = {gamma}; use protocol=explicit"
            ))
        })?;
        proto.switch_ratio = self.f64("switch_ratio")?;
        if proto.switch_ratio <= 0.0 {
            return Err(CliError::Config("switch_ratio must be positive".into()));
        }
        Ok(proto)
    }

    pub fn policy(&self, params: &SimParams) -> Result<ControlPolicy, CliError> {
        match self.get("protocol") {
            "published" => {
                let proto = self.protocol_table_row(params.gamma)?;
                if params.k <= 0.0 {
                    return Err(CliError::Config(
                        "protocol=published needs k > 0; use protocol=explicit".into(),
                    ));
                }
                Ok(ControlPolicy::published(params.omega, params.k, &proto))
            }
            "explicit" => Ok(ControlPolicy::explicit(self.coefficients()?)),
            "aligned" => Ok(ControlPolicy::aligned()),
            other => Err(CliError::Config(format!(
                "protocol must be published|explicit|aligned, got '{other}'"
            ))),
        }
    }

    pub fn thermal_mode(&self) -> Result<ThermalMode, CliError> {
        ThermalMode::parse(self.get("thermal_mode")).ok_or_else(|| {
            CliError::Config(format!(
                "thermal_mode must be lindblad|diffusive|jump, got '{}'",
                self.get("thermal_mode")
            ))
        })
    }

    pub fn scheme(&self) -> Result<Scheme, CliError> {
        Scheme::parse(self.get("scheme")).ok_or_else(|| {
            CliError::Config(format!(
                "scheme must be euler|milstein, got '{}'",
                self.get("scheme")
            ))
        })
    }

    /// Initial state: `initial_a = auto` is the thermal equilibrium of the
    /// configured bath; an explicit value overrides it, e.g. for transient
    /// trajectory plots from a chosen point.
    pub fn initial_state(&self, n_t: f64) -> Result<PolarState, CliError> {
        let theta = wrap_angle(self.f64("initial_theta")?);
        let a = match self.get("initial_a") {
            "auto" => {
                let eq = thermal_equilibrium(n_t);
                if theta == 0.0 {
                    return Ok(eq);
                }
                eq.a
            }
            other => other.parse().map_err(|_| {
                CliError::Config(format!(
                    "initial_a must be a number or 'auto', got '{other}'"
                ))
            })?,
        };
        if !(0.0..=1.0).contains(&a) {
            return Err(CliError::Config(format!(
                "initial_a must be in [0, 1], got {a}"
            )));
        }
        Ok(PolarState::new(a, theta))
    }

    pub fn trajectory_config(&self) -> Result<TrajectoryConfig, CliError> {
        let params = self.params()?;
        let policy = self.policy(&params)?;
        let mut traj = TrajectoryConfig::new(params, policy);
        traj.mode = self.thermal_mode()?;
        traj.scheme = self.scheme()?;
        traj.record_stride = self.usize("record_stride")?;
        traj.initial = self.initial_state(params.n_t)?;
        Ok(traj)
    }

    pub fn omega_grid(&self) -> Result<Vec<f64>, CliError> {
        let grid: Result<Vec<f64>, _> = self
            .get("omega_grid")
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect();
        let grid = grid.map_err(|_| {
            CliError::Config(format!("bad omega_grid '{}'", self.get("omega_grid")))
        })?;
        if grid.len() < 2 {
            return Err(CliError::Config(
                "omega_grid needs at least 2 points".into(),
            ));
        }
        Ok(grid)
    }

    /// Resolved configuration as ordered key-value pairs.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// FNV-1a over the canonical "key=value\n" listing. Keys that cannot
    /// change the computed numbers (output naming, thread count) are left
    /// out so the hash identifies the computation itself.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (k, v) in self.entries() {
            if k == "out" || k == "workers" {
                continue;
            }
            for b in k.bytes().chain(*b"=").chain(v.bytes()).chain(*b"\n") {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}
