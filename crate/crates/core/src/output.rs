//! CSV and JSON artifacts. Every file has a header row and a fixed column
//! order; floats are written in shortest round-trip form.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{FlightSchedule, RingGeometry, TilingPlan};
use crate::optimizer::{NlPoint, Optimum, SchemePair, ThetaPoint};
use crate::outage::StageParams;

/// Write to a sibling temp file, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn from_csv<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(bytes);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_atomic(path, &to_csv(rows)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "W")]
    pub w: usize,
    /// Nodes per sub-region, `N / W` rounded to nearest.
    #[serde(rename = "N_l")]
    pub n_l: usize,
}

impl Table1Row {
    pub fn new(plan: &TilingPlan, n_nodes: usize) -> Self {
        let w = plan.total_subregions;
        Table1Row {
            h: plan.altitude,
            w,
            n_l: (n_nodes as f64 / w as f64).round() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingDump {
    pub radius: f64,
    pub beta_rad: f64,
    pub w: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingDump {
    #[serde(rename = "H")]
    pub h: f64,
    pub r: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub rings: Vec<RingDump>,
    /// `Σ w_m` before the center sub-region is added.
    pub ring_sum: usize,
    pub center_subregion: bool,
    #[serde(rename = "W")]
    pub w: usize,
}

impl From<&TilingPlan> for TilingDump {
    fn from(p: &TilingPlan) -> Self {
        TilingDump {
            h: p.altitude,
            r: p.subregion_radius,
            m: p.disc_count,
            rings: p
                .rings
                .iter()
                .map(|r: &RingGeometry| RingDump {
                    radius: r.radius,
                    beta_rad: r.beta_rad,
                    w: r.w,
                })
                .collect(),
            ring_sum: p.ring_sum(),
            center_subregion: p.has_center_subregion,
            w: p.total_subregions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointRow {
    pub order: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub h_m: f64,
    pub subslot_s: f64,
}

pub fn waypoint_rows(s: &FlightSchedule) -> Vec<WaypointRow> {
    s.waypoints
        .iter()
        .enumerate()
        .map(|(i, w)| WaypointRow {
            order: i + 1,
            x_m: w.x,
            y_m: w.y,
            h_m: w.h,
            subslot_s: s.subslot_duration,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCsvRow {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "W")]
    pub w: usize,
    pub throughput: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    #[serde(rename = "H")]
    pub h: f64,
    pub scheme: String,
    #[serde(rename = "gamma_dB")]
    pub gamma_db: f64,
    pub throughput: f64,
}

pub fn fig2_rows(pairs: &[SchemePair]) -> Vec<Fig2Row> {
    let mut out = Vec::new();
    for p in pairs {
        for (scheme, sweep) in [("equal-interval", &p.equal_interval), ("uniform", &p.uniform)] {
            out.extend(sweep.rows.iter().map(|r| Fig2Row {
                h: r.altitude,
                scheme: scheme.to_string(),
                gamma_db: p.gamma_db,
                throughput: r.throughput,
            }));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub theta_deg: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub throughput_at_opt: f64,
}

impl From<&ThetaPoint> for Fig3Row {
    fn from(p: &ThetaPoint) -> Self {
        Fig3Row {
            theta_deg: p.theta_deg,
            n: p.n_nodes,
            throughput_at_opt: p.throughput,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Row {
    #[serde(rename = "N_l")]
    pub n_l: usize,
    pub alpha: f64,
    pub bits_at_opt: f64,
}

impl From<&NlPoint> for Fig4Row {
    fn from(p: &NlPoint) -> Self {
        Fig4Row {
            n_l: p.n_l,
            alpha: p.alpha,
            bits_at_opt: p.bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    #[serde(rename = "H")]
    pub h: f64,
    pub subregion: usize,
    #[serde(rename = "N_l")]
    pub n_l: usize,
    #[serde(rename = "gamma_dB")]
    pub gamma_db: f64,
    pub scheme: String,
    pub trials: u64,
    pub outage_hat: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRow {
    pub position: usize,
    pub mu_z: f64,
    pub sigma2_z: f64,
    pub mu_a: Option<f64>,
    pub sigma2_a: Option<f64>,
    pub mu_y: f64,
    pub sigma2_y: f64,
    pub decode_prob: f64,
}

impl From<&StageParams> for StageRow {
    fn from(s: &StageParams) -> Self {
        StageRow {
            position: s.position,
            mu_z: s.mu_z,
            sigma2_z: s.sigma2_z,
            mu_a: s.mu_a,
            sigma2_a: s.sigma2_a,
            mu_y: s.mu_y,
            sigma2_y: s.sigma2_y,
            decode_prob: s.decode_prob,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptJson {
    pub h_star: f64,
    pub c_star: f64,
    pub w_star: usize,
    pub w_max: usize,
    pub constraint_satisfied: bool,
    pub infeasible_altitudes: Vec<f64>,
    pub mode: String,
    pub scheme: String,
    pub gamma_db: f64,
    pub n_nodes: usize,
    pub seed: u64,
}

impl OptJson {
    pub fn new(opt: &Optimum, w_max: usize, mode: &str, scheme: &str, gamma_db: f64, n_nodes: usize, seed: u64) -> Self {
        OptJson {
            h_star: opt.h_star,
            c_star: opt.c_star,
            w_star: opt.w_star,
            w_max,
            constraint_satisfied: (1..=w_max).contains(&opt.w_star),
            infeasible_altitudes: opt.sweep.infeasible.iter().map(|(h, _)| *h).collect(),
            mode: mode.to_string(),
            scheme: scheme.to_string(),
            gamma_db,
            n_nodes,
            seed,
        }
    }
}
