//! Network configuration in a flat `key = value` text format.
//!
//! `#` starts a comment. Every key is optional; missing keys keep their
//! defaults. Lists (`altitude_set`) are comma separated.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::link::{db_to_linear, dbm_to_watts, ChannelParams, ZetaScheme};

/// Hover altitudes (m) for θ = 60°, R_cov = 100 m.
pub const TABLE_ALTITUDES: [f64; 10] = [
    86.71, 80.71, 72.21, 64.21, 58.21, 52.71, 48.21, 44.21, 43.71, 43.21,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    EqualInterval,
    Uniform,
}

impl SchemeKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "equal-interval" => Some(SchemeKind::EqualInterval),
            "uniform" => Some(SchemeKind::Uniform),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::EqualInterval => "equal-interval",
            SchemeKind::Uniform => "uniform",
        }
    }
}

/// How nodes are grouped into sub-regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    /// Even counts per sub-region, capacitated nearest-center assignment.
    Balanced,
    /// Plain nearest-center assignment; counts follow the placement.
    Placed,
}

impl Population {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "balanced" => Some(Population::Balanced),
            "placed" => Some(Population::Placed),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Population::Balanced => "balanced",
            Population::Placed => "placed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub n_nodes: usize,
    pub theta_deg: f64,
    pub p_u_dbm: f64,
    pub noise_dbm: f64,
    pub rate_bps: f64,
    pub cov_radius_m: f64,
    pub gamma_db: f64,
    pub alpha: f64,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub w_max: usize,
    /// Shadowing variance σ² in dB².
    pub shadow_var_db: f64,
    pub subslot_s: f64,
    pub seed: u64,
    pub trials: u64,
    pub scheme: SchemeKind,
    /// Common coefficient of the uniform scheme; `zeta_min` when unset.
    pub uniform_zeta: Option<f64>,
    pub population: Population,
    pub altitude_set: Vec<f64>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            n_nodes: 40,
            theta_deg: 60.0,
            p_u_dbm: 20.0,
            noise_dbm: -70.0,
            rate_bps: 64.0,
            cov_radius_m: 100.0,
            gamma_db: -3.0,
            alpha: 2.7,
            zeta_min: 0.1,
            zeta_max: 0.99,
            w_max: 12,
            shadow_var_db: 8.0,
            subslot_s: 1.0,
            seed: 1,
            trials: 100_000,
            scheme: SchemeKind::EqualInterval,
            uniform_zeta: None,
            population: Population::Balanced,
            altitude_set: TABLE_ALTITUDES.to_vec(),
        }
    }
}

pub const KEYS: [&str; 19] = [
    "n_nodes",
    "theta_deg",
    "p_u_dbm",
    "noise_dbm",
    "rate_bps",
    "cov_radius_m",
    "gamma_db",
    "alpha",
    "zeta_min",
    "zeta_max",
    "w_max",
    "shadow_var_db",
    "subslot_s",
    "seed",
    "trials",
    "scheme",
    "uniform_zeta",
    "population",
    "altitude_set",
];

fn num<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("cannot parse `{value}`"))
}

impl NetworkConfig {
    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            "n_nodes" => self.n_nodes = num(v)?,
            "theta_deg" => self.theta_deg = num(v)?,
            "p_u_dbm" => self.p_u_dbm = num(v)?,
            "noise_dbm" => self.noise_dbm = num(v)?,
            "rate_bps" => self.rate_bps = num(v)?,
            "cov_radius_m" => self.cov_radius_m = num(v)?,
            "gamma_db" => self.gamma_db = num(v)?,
            "alpha" => self.alpha = num(v)?,
            "zeta_min" => self.zeta_min = num(v)?,
            "zeta_max" => self.zeta_max = num(v)?,
            "w_max" => self.w_max = num(v)?,
            "shadow_var_db" => self.shadow_var_db = num(v)?,
            "subslot_s" => self.subslot_s = num(v)?,
            "seed" => self.seed = num(v)?,
            "trials" => self.trials = num(v)?,
            "scheme" => {
                self.scheme = SchemeKind::parse(v)
                    .ok_or_else(|| format!("unknown scheme `{v}` (equal-interval|uniform)"))?
            }
            "uniform_zeta" => self.uniform_zeta = Some(num(v)?),
            "population" => {
                self.population = Population::parse(v)
                    .ok_or_else(|| format!("unknown population `{v}` (balanced|placed)"))?
            }
            "altitude_set" => {
                self.altitude_set = v
                    .split(',')
                    .map(|s| num::<f64>(s.trim()))
                    .collect::<std::result::Result<_, _>>()?
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = NetworkConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value).map_err(|message| Error::Parse {
                line: idx + 1,
                message,
            })?;
        }
        Ok(cfg)
    }

    /// Apply `KEY=VALUE` overrides in order, then validate.
    pub fn with_overrides<S: AsRef<str>>(mut self, overrides: &[S]) -> Result<Self> {
        for o in overrides {
            let o = o.as_ref();
            let (key, value) = o.split_once('=').ok_or_else(|| Error::Validation {
                field: o.to_string(),
                message: "override must be KEY=VALUE".into(),
            })?;
            let key = key.trim();
            self.set(key, value).map_err(|message| Error::Validation {
                field: key.to_string(),
                message,
            })?;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &str, message: impl Into<String>) -> Result<()> {
            Err(Error::Validation {
                field: field.into(),
                message: message.into(),
            })
        }
        let finite = [
            ("theta_deg", self.theta_deg),
            ("p_u_dbm", self.p_u_dbm),
            ("noise_dbm", self.noise_dbm),
            ("rate_bps", self.rate_bps),
            ("cov_radius_m", self.cov_radius_m),
            ("gamma_db", self.gamma_db),
            ("alpha", self.alpha),
            ("shadow_var_db", self.shadow_var_db),
            ("subslot_s", self.subslot_s),
        ];
        if let Some((k, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return bad(k, "must be finite");
        }
        if self.n_nodes == 0 {
            return bad("n_nodes", "must be >= 1");
        }
        if !(self.theta_deg > 0.0 && self.theta_deg < 180.0) {
            return bad("theta_deg", "must lie in (0, 180)");
        }
        if !(self.rate_bps > 0.0) {
            return bad("rate_bps", "must be > 0");
        }
        if !(self.cov_radius_m > 0.0) {
            return bad("cov_radius_m", "must be > 0");
        }
        if !(self.alpha > 0.0) {
            return bad("alpha", "must be > 0");
        }
        if !(self.zeta_min > 0.0 && self.zeta_min < 1.0) {
            return bad("zeta_min", "must lie in (0, 1)");
        }
        if !(self.zeta_max > 0.0 && self.zeta_max < 1.0) {
            return bad("zeta_max", "must lie in (0, 1)");
        }
        if self.zeta_min >= self.zeta_max {
            return bad("zeta_min", "must be < zeta_max");
        }
        if let Some(z) = self.uniform_zeta {
            if !(z > 0.0 && z < 1.0) {
                return bad("uniform_zeta", "must lie in (0, 1)");
            }
        }
        if self.w_max == 0 {
            return bad("w_max", "must be >= 1");
        }
        if self.shadow_var_db < 0.0 {
            return bad("shadow_var_db", "must be >= 0");
        }
        if !(self.subslot_s > 0.0) {
            return bad("subslot_s", "must be > 0");
        }
        if self.trials == 0 {
            return bad("trials", "must be >= 1");
        }
        if self.altitude_set.is_empty() {
            return bad("altitude_set", "must not be empty");
        }
        if self.altitude_set.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return bad("altitude_set", "altitudes must be finite and > 0");
        }
        Ok(())
    }

    pub fn p_u_w(&self) -> f64 {
        dbm_to_watts(self.p_u_dbm)
    }

    pub fn noise_w(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn gamma_linear(&self) -> f64 {
        db_to_linear(self.gamma_db)
    }

    pub fn theta_rad(&self) -> f64 {
        self.theta_deg.to_radians()
    }

    /// Shadowing standard deviation in dB.
    pub fn sigma_db(&self) -> f64 {
        self.shadow_var_db.sqrt()
    }

    pub fn channel(&self) -> ChannelParams {
        ChannelParams {
            p_u: self.p_u_w(),
            noise: self.noise_w(),
            alpha: self.alpha,
            sigma_db: self.sigma_db(),
        }
    }

    pub fn zeta_scheme(&self) -> ZetaScheme {
        match self.scheme {
            SchemeKind::EqualInterval => ZetaScheme::EqualInterval,
            SchemeKind::Uniform => ZetaScheme::Uniform(self.uniform_zeta.unwrap_or(self.zeta_min)),
        }
    }

    /// Render in the same format `parse_str` reads.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let alts: Vec<String> = self.altitude_set.iter().map(|h| h.to_string()).collect();
        let _ = writeln!(s, "n_nodes = {}", self.n_nodes);
        let _ = writeln!(s, "theta_deg = {}", self.theta_deg);
        let _ = writeln!(s, "p_u_dbm = {}", self.p_u_dbm);
        let _ = writeln!(s, "noise_dbm = {}", self.noise_dbm);
        let _ = writeln!(s, "rate_bps = {}", self.rate_bps);
        let _ = writeln!(s, "cov_radius_m = {}", self.cov_radius_m);
        let _ = writeln!(s, "gamma_db = {}", self.gamma_db);
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "zeta_min = {}", self.zeta_min);
        let _ = writeln!(s, "zeta_max = {}", self.zeta_max);
        let _ = writeln!(s, "w_max = {}", self.w_max);
        let _ = writeln!(s, "shadow_var_db = {}", self.shadow_var_db);
        let _ = writeln!(s, "subslot_s = {}", self.subslot_s);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "scheme = {}", self.scheme.as_str());
        if let Some(z) = self.uniform_zeta {
            let _ = writeln!(s, "uniform_zeta = {z}");
        }
        let _ = writeln!(s, "population = {}", self.population.as_str());
        let _ = writeln!(s, "altitude_set = {}", alts.join(", "));
        s
    }
}

/// Read the config file (if any), apply overrides, validate.
pub fn load_config<S: AsRef<str>>(path: Option<&Path>, overrides: &[S]) -> Result<NetworkConfig> {
    let base = match path {
        Some(p) => NetworkConfig::parse_str(&std::fs::read_to_string(p)?)?,
        None => NetworkConfig::default(),
    };
    let cfg = base.with_overrides(overrides)?;
    cfg.validate()?;
    Ok(cfg)
}
