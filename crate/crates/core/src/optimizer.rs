//! Throughput objective, exhaustive altitude search and the parameter sweeps
//! built on top of it.

use serde::{Deserialize, Serialize};

use crate::config::{NetworkConfig, Population, SchemeKind};
use crate::error::{Error, Result};
use crate::geometry::{build_tiling, TargetArea};
use crate::mc::{mc_throughput, McEstimate};
use crate::network::{deploy, Deployment};
use crate::outage::subregion_outage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Mc,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Mode::Analytic),
            "mc" => Some(Mode::Mc),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Mc => "mc",
        }
    }
}

/// Bits delivered by one sub-region in its sub-slot.
pub fn subregion_bits(n_l: usize, subslot_s: f64, rate_bps: f64, outage: f64) -> f64 {
    n_l as f64 * subslot_s * rate_bps * (1.0 - outage)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub altitude: f64,
    pub subregions: usize,
    pub counts: Vec<usize>,
    pub outages: Vec<f64>,
    /// Successfully decoded bits per sub-region.
    pub bits: Vec<f64>,
    /// Bits per second of flight.
    pub throughput: f64,
    /// Standard error of `throughput` in Monte Carlo mode.
    pub stderr: Option<f64>,
}

impl SweepRow {
    pub fn flight_time(&self, subslot_s: f64) -> f64 {
        self.subregions as f64 * subslot_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltitudeSweep {
    pub rows: Vec<SweepRow>,
    /// Altitudes dropped because their tiling needs more than `w_max`
    /// sub-regions, with the count they would need.
    pub infeasible: Vec<(f64, usize)>,
}

fn row_from_outages(dep: &Deployment, cfg: &NetworkConfig, outages: Vec<f64>, stderr: Option<f64>) -> SweepRow {
    let bits: Vec<f64> = dep
        .links
        .iter()
        .zip(&outages)
        .map(|(l, &p)| subregion_bits(l.len(), cfg.subslot_s, cfg.rate_bps, p))
        .collect();
    let flight = dep.subregions() as f64 * cfg.subslot_s;
    SweepRow {
        altitude: dep.plan.altitude,
        subregions: dep.subregions(),
        counts: dep.links.iter().map(|l| l.len()).collect(),
        throughput: bits.iter().sum::<f64>() / flight,
        outages,
        bits,
        stderr,
    }
}

/// Evaluate the objective on an existing deployment.
pub fn evaluate(dep: &Deployment, cfg: &NetworkConfig, mode: Mode) -> Result<SweepRow> {
    let gamma = cfg.gamma_linear();
    match mode {
        Mode::Analytic => {
            let outages = dep
                .links
                .iter()
                .map(|l| subregion_outage(l, gamma).map(|o| o.outage))
                .collect::<Result<Vec<_>>>()?;
            Ok(row_from_outages(dep, cfg, outages, None))
        }
        Mode::Mc => {
            let est = mc_throughput(dep, gamma, cfg.rate_bps, cfg.trials, cfg.seed);
            let outages = est.outages.iter().map(|e: &McEstimate| e.outage_hat).collect();
            Ok(row_from_outages(dep, cfg, outages, Some(est.stderr)))
        }
    }
}

/// Network throughput at one altitude.
pub fn network_throughput(altitude: f64, cfg: &NetworkConfig, mode: Mode) -> Result<SweepRow> {
    evaluate(&deploy(altitude, cfg)?, cfg, mode)
}

pub fn altitude_sweep(altitudes: &[f64], cfg: &NetworkConfig, mode: Mode) -> Result<AltitudeSweep> {
    let mut rows = Vec::new();
    let mut infeasible = Vec::new();
    for &h in altitudes {
        match network_throughput(h, cfg, mode) {
            Ok(row) => rows.push(row),
            Err(Error::Infeasible { subregions, .. }) => infeasible.push((h, subregions)),
            Err(e) => return Err(e),
        }
    }
    Ok(AltitudeSweep { rows, infeasible })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub h_star: f64,
    pub c_star: f64,
    pub w_star: usize,
    pub sweep: AltitudeSweep,
}

/// Index of the best row; equal throughput prefers the higher altitude.
pub fn best_row(rows: &[SweepRow]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in rows.iter().enumerate() {
        best = match best {
            None => Some(i),
            Some(b) => {
                let cur = &rows[b];
                if r.throughput > cur.throughput
                    || (r.throughput == cur.throughput && r.altitude > cur.altitude)
                {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

pub fn optimum_of(sweep: AltitudeSweep, w_max: usize) -> Result<Optimum> {
    let i = best_row(&sweep.rows).ok_or(Error::AllInfeasible { w_max })?;
    let row = &sweep.rows[i];
    Ok(Optimum {
        h_star: row.altitude,
        c_star: row.throughput,
        w_star: row.subregions,
        sweep,
    })
}

/// Exhaustive search over a finite altitude set.
pub fn optimize_altitude(altitudes: &[f64], cfg: &NetworkConfig, mode: Mode) -> Result<Optimum> {
    if altitudes.is_empty() {
        return Err(Error::Domain("altitude set is empty".into()));
    }
    optimum_of(altitude_sweep(altitudes, cfg, mode)?, cfg.w_max)
}

/// Altitude set for another illumination angle: the footprint radii of
/// `cfg.altitude_set` at `cfg.theta_deg` are kept and converted back to
/// altitudes at `theta_deg`.
pub fn altitude_set_for_theta(cfg: &NetworkConfig, theta_deg: f64) -> Vec<f64> {
    let t_ref = (cfg.theta_rad() / 2.0).tan();
    let t = (theta_deg.to_radians() / 2.0).tan();
    cfg.altitude_set.iter().map(|h| h * t_ref / t).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub theta_deg: f64,
    pub n_nodes: usize,
    pub h_star: f64,
    pub throughput: f64,
}

pub fn sweep_theta(
    thetas_deg: &[f64],
    n_values: &[usize],
    cfg: &NetworkConfig,
    mode: Mode,
) -> Result<Vec<ThetaPoint>> {
    let mut out = Vec::new();
    for &n in n_values {
        for &theta in thetas_deg {
            if !(theta > 0.0 && theta < 180.0) {
                return Err(Error::Domain(format!("θ = {theta}° outside (0, 180)")));
            }
            let c = NetworkConfig {
                theta_deg: theta,
                n_nodes: n,
                ..cfg.clone()
            };
            let opt = optimize_altitude(&altitude_set_for_theta(cfg, theta), &c, mode)?;
            out.push(ThetaPoint {
                theta_deg: theta,
                n_nodes: n,
                h_star: opt.h_star,
                throughput: opt.c_star,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlPoint {
    pub n_l: usize,
    pub alpha: f64,
    pub h_star: f64,
    /// Decoded bits per sub-region at `h_star`, averaged over sub-regions.
    pub bits: f64,
}

/// Bits per sub-region at the best altitude when every sub-region holds
/// exactly `n_l` nodes. The network size at altitude `H` is `n_l · W(H)`.
pub fn sweep_nl(
    nl_values: &[usize],
    alphas: &[f64],
    cfg: &NetworkConfig,
    mode: Mode,
) -> Result<Vec<NlPoint>> {
    let area = TargetArea::new(cfg.cov_radius_m)?;
    let mut out = Vec::new();
    for &alpha in alphas {
        for &n_l in nl_values {
            if n_l == 0 {
                return Err(Error::Domain("N_l must be >= 1".into()));
            }
            let mut rows = Vec::new();
            for &h in &cfg.altitude_set {
                let plan = match build_tiling(h, cfg.theta_rad(), &area, cfg.w_max) {
                    Ok(p) => p,
                    Err(Error::Infeasible { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let c = NetworkConfig {
                    alpha,
                    n_nodes: n_l * plan.total_subregions,
                    population: Population::Balanced,
                    ..cfg.clone()
                };
                rows.push(network_throughput(h, &c, mode)?);
            }
            let i = best_row(&rows).ok_or(Error::AllInfeasible { w_max: cfg.w_max })?;
            out.push(NlPoint {
                n_l,
                alpha,
                h_star: rows[i].altitude,
                bits: rows[i].throughput * cfg.subslot_s,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemePair {
    pub gamma_db: f64,
    pub equal_interval: AltitudeSweep,
    pub uniform: AltitudeSweep,
}

impl SchemePair {
    /// Relative gain of the best equal-interval throughput over the best
    /// uniform one.
    pub fn gain(&self) -> f64 {
        let best = |s: &AltitudeSweep| s.rows.iter().map(|r| r.throughput).fold(0.0, f64::max);
        best(&self.equal_interval) / best(&self.uniform) - 1.0
    }
}

/// Both ζ schemes over the same altitudes, nodes and random streams.
pub fn sweep_zeta_scheme(cfg: &NetworkConfig, gammas_db: &[f64], mode: Mode) -> Result<Vec<SchemePair>> {
    gammas_db
        .iter()
        .map(|&g| {
            let run = |scheme| {
                let c = NetworkConfig {
                    gamma_db: g,
                    scheme,
                    ..cfg.clone()
                };
                altitude_sweep(&cfg.altitude_set, &c, mode)
            };
            Ok(SchemePair {
                gamma_db: g,
                equal_interval: run(SchemeKind::EqualInterval)?,
                uniform: run(SchemeKind::Uniform)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TABLE_ALTITUDES;

    fn row(h: f64, c: f64) -> SweepRow {
        SweepRow {
            altitude: h,
            subregions: 1,
            counts: vec![1],
            outages: vec![0.0],
            bits: vec![c],
            throughput: c,
            stderr: None,
        }
    }

    #[test]
    fn bits_examples() {
        assert_eq!(subregion_bits(10, 1.0, 64.0, 0.0), 640.0);
        assert_eq!(subregion_bits(10, 1.0, 64.0, 1.0), 0.0);
        assert_eq!(subregion_bits(5, 2.0, 64.0, 0.25), 480.0);
    }

    #[test]
    fn zero_outage_gives_upper_bound() {
        let cfg = NetworkConfig {
            noise_dbm: -200.0,
            shadow_var_db: 0.0,
            gamma_db: -60.0,
            ..NetworkConfig::default()
        };
        let r = network_throughput(52.71, &cfg, Mode::Analytic).unwrap();
        assert!(r.outages.iter().all(|&p| p == 0.0));
        assert!((r.throughput - 40.0 * 64.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn subslot_cancels() {
        let a = network_throughput(48.21, &NetworkConfig::default(), Mode::Analytic).unwrap();
        let cfg7 = NetworkConfig {
            subslot_s: 7.0,
            ..NetworkConfig::default()
        };
        let b = network_throughput(48.21, &cfg7, Mode::Analytic).unwrap();
        assert!((a.throughput - b.throughput).abs() <= 1e-12 * a.throughput);
        assert!((b.flight_time(7.0) - 49.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_altitudes_are_reported() {
        let cfg = NetworkConfig {
            w_max: 8,
            ..NetworkConfig::default()
        };
        assert!(matches!(
            network_throughput(43.21, &cfg, Mode::Analytic),
            Err(Error::Infeasible { .. })
        ));
        let sweep = altitude_sweep(&TABLE_ALTITUDES, &cfg, Mode::Analytic).unwrap();
        assert_eq!(sweep.rows.len(), 8);
        assert_eq!(sweep.infeasible.len(), 2);
        let just_low = optimize_altitude(&[43.21, 43.71], &cfg, Mode::Analytic);
        assert!(matches!(just_low, Err(Error::AllInfeasible { w_max: 8 })));
    }

    #[test]
    fn singleton_set() {
        let opt = optimize_altitude(&[58.21], &NetworkConfig::default(), Mode::Analytic).unwrap();
        assert_eq!(opt.h_star, 58.21);
        assert_eq!(opt.w_star, 5);
    }

    #[test]
    fn best_row_prefers_higher_altitude_on_ties() {
        let rows = vec![row(40.0, 3.0), row(60.0, 3.0), row(50.0, 2.0)];
        assert_eq!(best_row(&rows), Some(1));
        let rows = vec![row(60.0, 3.0), row(40.0, 3.0)];
        assert_eq!(best_row(&rows), Some(0));
        let rows = vec![row(60.0, 0.0), row(40.0, 5.0), row(50.0, 0.0)];
        assert_eq!(best_row(&rows), Some(1));
        assert_eq!(best_row(&[]), None);
    }

    #[test]
    fn optimum_is_max_of_sweep() {
        let opt = optimize_altitude(&TABLE_ALTITUDES, &NetworkConfig::default(), Mode::Analytic).unwrap();
        let max = opt.sweep.rows.iter().map(|r| r.throughput).fold(f64::MIN, f64::max);
        assert_eq!(opt.c_star, max);
    }

    #[test]
    fn theta_altitude_sets() {
        let cfg = NetworkConfig::default();
        let same = altitude_set_for_theta(&cfg, 60.0);
        for (a, b) in same.iter().zip(TABLE_ALTITUDES) {
            assert!((a - b).abs() < 1e-12);
        }
        // Footprint radii, and so the tiling, are preserved.
        let area = TargetArea::new(100.0).unwrap();
        for (h, h_ref) in altitude_set_for_theta(&cfg, 100.0).iter().zip(TABLE_ALTITUDES) {
            let a = build_tiling(*h, 100f64.to_radians(), &area, 12).unwrap();
            let b = build_tiling(h_ref, 60f64.to_radians(), &area, 12).unwrap();
            assert_eq!(a.total_subregions, b.total_subregions);
        }
    }

    #[test]
    fn nl_sweep_starts_with_single_node() {
        let cfg = NetworkConfig {
            gamma_db: -1.5,
            ..NetworkConfig::default()
        };
        let pts = sweep_nl(&[1], &[2.7], &cfg, Mode::Analytic).unwrap();
        let p = pts[0];
        let c = NetworkConfig {
            n_nodes: build_tiling(p.h_star, cfg.theta_rad(), &TargetArea::new(100.0).unwrap(), 12)
                .unwrap()
                .total_subregions,
            ..cfg.clone()
        };
        let r = network_throughput(p.h_star, &c, Mode::Analytic).unwrap();
        let mean_single = r.outages.iter().map(|o| 64.0 * (1.0 - o)).sum::<f64>() / r.subregions as f64;
        assert!((p.bits - mean_single).abs() < 1e-9);
    }
}
