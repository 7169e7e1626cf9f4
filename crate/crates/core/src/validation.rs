//! Analytic outage against the Monte Carlo oracle.

use serde::{Deserialize, Serialize};

use crate::config::{NetworkConfig, Population};
use crate::error::{Error, Result};
use crate::geometry::{build_tiling, TargetArea};
use crate::link::SubregionLinks;
use crate::mc::{mc_subregion_outage, stream_seed, McEstimate};
use crate::network::deploy;
use crate::optimizer::{optimize_altitude, Mode};
use crate::outage::subregion_outage;

/// Largest accepted |analytic − Monte Carlo| outage gap.
pub const MODEL_TOLERANCE: f64 = 0.10;

/// Sub-region sizes checked by default.
pub const VALIDATION_NL: [usize; 4] = [2, 3, 5, 8];

#[derive(Debug, Clone)]
pub struct Instance {
    pub altitude: f64,
    pub subregion: usize,
    pub n_l: usize,
    pub links: SubregionLinks,
}

/// For every feasible altitude and every `n_l`, deploy `n_l · W` nodes with
/// balanced counts and take the first sub-region of the trajectory.
pub fn model_instances(cfg: &NetworkConfig, nl_values: &[usize]) -> Result<Vec<Instance>> {
    let area = TargetArea::new(cfg.cov_radius_m)?;
    let mut out = Vec::new();
    for &n_l in nl_values {
        for &h in &cfg.altitude_set {
            let plan = match build_tiling(h, cfg.theta_rad(), &area, cfg.w_max) {
                Ok(p) => p,
                Err(Error::Infeasible { .. }) => continue,
                Err(e) => return Err(e),
            };
            let c = NetworkConfig {
                n_nodes: n_l * plan.total_subregions,
                population: Population::Balanced,
                ..cfg.clone()
            };
            let dep = deploy(h, &c)?;
            out.push(Instance {
                altitude: h,
                subregion: 0,
                n_l,
                links: dep.links[0].clone(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceCheck {
    #[serde(rename = "H")]
    pub altitude: f64,
    pub subregion: usize,
    #[serde(rename = "N_l")]
    pub n_l: usize,
    #[serde(rename = "gamma_dB")]
    pub gamma_db: f64,
    pub scheme: String,
    pub trials: u64,
    pub outage_hat: f64,
    pub stderr: f64,
    pub analytic: f64,
    pub abs_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn check_instance(inst: &Instance, cfg: &NetworkConfig, tolerance: f64) -> Result<InstanceCheck> {
    let gamma = cfg.gamma_linear();
    let analytic = subregion_outage(&inst.links, gamma)?.outage;
    let mc: McEstimate = mc_subregion_outage(
        &inst.links,
        gamma,
        cfg.trials,
        stream_seed(cfg.seed, inst.subregion as u64),
    );
    let abs_err = (analytic - mc.outage_hat).abs();
    Ok(InstanceCheck {
        altitude: inst.altitude,
        subregion: inst.subregion,
        n_l: inst.n_l,
        gamma_db: cfg.gamma_db,
        scheme: cfg.scheme.as_str().to_string(),
        trials: cfg.trials,
        outage_hat: mc.outage_hat,
        stderr: mc.stderr,
        analytic,
        abs_err,
        tolerance,
        pass: abs_err <= tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<InstanceCheck>,
    pub h_star_analytic: f64,
    pub h_star_mc: f64,
    pub argmax_agree: bool,
    pub passed: bool,
}

pub fn validate_model(cfg: &NetworkConfig) -> Result<ValidationReport> {
    let checks = model_instances(cfg, &VALIDATION_NL)?
        .iter()
        .map(|i| check_instance(i, cfg, MODEL_TOLERANCE))
        .collect::<Result<Vec<_>>>()?;
    let a = optimize_altitude(&cfg.altitude_set, cfg, Mode::Analytic)?;
    let m = optimize_altitude(&cfg.altitude_set, cfg, Mode::Mc)?;
    let argmax_agree = a.h_star == m.h_star;
    let passed = argmax_agree && checks.iter().all(|c| c.pass);
    Ok(ValidationReport {
        checks,
        h_star_analytic: a.h_star,
        h_star_mc: m.h_star,
        argmax_agree,
        passed,
    })
}
