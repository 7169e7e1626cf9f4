//! Backscatter link budget, reflection-coefficient assignment and SIC decoding
//! for a single sub-region.
//!
//! The UAV illuminates every node with power `P_u`; node `i` reflects a
//! fraction `ζ_i` of what it receives, so the signal arriving back at the UAV
//! carries the round-trip gain `ζ_i h_i² d_i^(-2α)`. Nodes are decoded in
//! order of assigned rank (closest first) and each decoded signal is removed
//! before the next stage.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Log-normal shadowing sample: `g ~ N(0, σ²)` in dB and `h = 10^(g/10)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub g: f64,
    pub h: f64,
}

impl ChannelDraw {
    pub fn from_db(g: f64) -> Self {
        ChannelDraw { g, h: db_to_linear(g) }
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R, sigma_db: f64) -> Self {
        let z: f64 = rng.sample(StandardNormal);
        Self::from_db(sigma_db * z)
    }
}

/// Power at the node from the UAV carrier.
pub fn received_power(p_u: f64, h: f64, d: f64, alpha: f64) -> f64 {
    p_u * h * d.powf(-alpha)
}

pub fn backscatter_power(zeta: f64, p_rx: f64) -> Result<f64> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::Domain(format!(
            "reflection coefficient must lie in (0, 1), got {zeta}"
        )));
    }
    Ok(zeta * p_rx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p_rx: f64,
    pub p_tx: f64,
    pub combined_gain: f64,
}

impl LinkBudget {
    pub fn new(p_u: f64, zeta: f64, h: f64, d: f64, alpha: f64) -> Result<Self> {
        let p_rx = received_power(p_u, h, d, alpha);
        let p_tx = backscatter_power(zeta, p_rx)?;
        Ok(LinkBudget {
            p_rx,
            p_tx,
            combined_gain: zeta * h * h * d.powf(-2.0 * alpha),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ZetaScheme {
    /// Closest node gets `zeta_max`, farthest gets `zeta_min`, evenly spaced.
    EqualInterval,
    /// Every node reflects with the same coefficient.
    Uniform(f64),
}

impl ZetaScheme {
    pub fn label(&self) -> &'static str {
        match self {
            ZetaScheme::EqualInterval => "equal-interval",
            ZetaScheme::Uniform(_) => "uniform",
        }
    }
}

/// Radio parameters shared by every node, in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub p_u: f64,
    pub noise: f64,
    pub alpha: f64,
    pub sigma_db: f64,
}

/// A node as seen from the waypoint: identity, reflection coefficient and
/// 3-D distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSlot {
    pub node_id: usize,
    pub zeta: f64,
    pub distance: f64,
}

fn by_distance(a: &(usize, f64), b: &(usize, f64)) -> std::cmp::Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// Assign reflection coefficients to `(node id, distance)` pairs. The result
/// is in ascending-distance order (ties by id).
pub fn assign_reflection_coeffs(
    nodes: &[(usize, f64)],
    zeta_min: f64,
    zeta_max: f64,
    scheme: ZetaScheme,
) -> Vec<LinkSlot> {
    let mut sorted = nodes.to_vec();
    sorted.sort_by(by_distance);
    let n = sorted.len();
    sorted
        .into_iter()
        .enumerate()
        .map(|(k, (node_id, distance))| {
            let zeta = match scheme {
                ZetaScheme::Uniform(z) => z,
                ZetaScheme::EqualInterval if n == 1 => zeta_max,
                ZetaScheme::EqualInterval => {
                    zeta_min + (n - 1 - k) as f64 * (zeta_max - zeta_min) / (n - 1) as f64
                }
            };
            LinkSlot {
                node_id,
                zeta,
                distance,
            }
        })
        .collect()
}

/// SIC decode order: descending ζ, then ascending distance, then id.
pub fn sic_order(mut slots: Vec<LinkSlot>) -> Vec<LinkSlot> {
    slots.sort_by(|a, b| {
        b.zeta
            .total_cmp(&a.zeta)
            .then(a.distance.total_cmp(&b.distance))
            .then(a.node_id.cmp(&b.node_id))
    });
    slots
}

/// The nodes of one sub-region in decode order, with the radio parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SubregionLinks {
    pub slots: Vec<LinkSlot>,
    pub channel: ChannelParams,
}

impl SubregionLinks {
    pub fn new(
        nodes: &[(usize, f64)],
        zeta_min: f64,
        zeta_max: f64,
        scheme: ZetaScheme,
        channel: ChannelParams,
    ) -> Self {
        let slots = sic_order(assign_reflection_coeffs(nodes, zeta_min, zeta_max, scheme));
        SubregionLinks { slots, channel }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Received power at the UAV per slot with unit shadowing.
    pub fn mean_free_powers(&self) -> Vec<f64> {
        let a2 = -2.0 * self.channel.alpha;
        self.slots
            .iter()
            .map(|s| self.channel.p_u * s.zeta * s.distance.powf(a2))
            .collect()
    }

    pub fn realize(&self, draws: &[ChannelDraw]) -> SubregionRealization {
        assert_eq!(draws.len(), self.slots.len());
        let records = self
            .slots
            .iter()
            .zip(draws)
            .map(|(s, d)| RealizedLink {
                node_id: s.node_id,
                zeta: s.zeta,
                distance: s.distance,
                h: d.h,
                combined_gain: s.zeta * d.h * d.h * s.distance.powf(-2.0 * self.channel.alpha),
            })
            .collect();
        SubregionRealization {
            records,
            noise_power: self.channel.noise,
            uav_power: self.channel.p_u,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizedLink {
    pub node_id: usize,
    pub zeta: f64,
    pub distance: f64,
    pub h: f64,
    pub combined_gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubregionRealization {
    pub records: Vec<RealizedLink>,
    pub noise_power: f64,
    pub uav_power: f64,
}

impl SubregionRealization {
    fn powers(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| self.uav_power * r.combined_gain)
    }
}

/// SINR of decode position `i` (0-based): all later positions interfere,
/// noise always adds.
pub fn sinr(i: usize, realization: &SubregionRealization) -> f64 {
    let p: Vec<f64> = realization.powers().collect();
    let interference: f64 = p[i + 1..].iter().sum();
    p[i] / (interference + realization.noise_power)
}

/// Per-stage SINR of the whole chain, computed back to front.
pub fn sinr_chain(powers: &[f64], noise: f64) -> Vec<f64> {
    let mut out = vec![0.0; powers.len()];
    let mut tail = 0.0;
    for i in (0..powers.len()).rev() {
        out[i] = powers[i] / (tail + noise);
        tail += powers[i];
    }
    out
}

/// Joint SIC success without allocating: true iff every stage clears
/// `gamma`.
pub fn sic_succeeds(powers: &[f64], noise: f64, gamma: f64) -> bool {
    let mut tail = 0.0;
    for &p in powers.iter().rev() {
        if p < gamma * (tail + noise) {
            return false;
        }
        tail += p;
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub sinr: Vec<f64>,
    pub success: Vec<bool>,
    pub joint_success: bool,
}

impl DecodeOutcome {
    pub fn outage(&self) -> bool {
        !self.joint_success
    }
}

pub fn decode_subregion(realization: &SubregionRealization, gamma: f64) -> DecodeOutcome {
    let p: Vec<f64> = realization.powers().collect();
    let sinr = sinr_chain(&p, realization.noise_power);
    let success: Vec<bool> = sinr.iter().map(|&s| s >= gamma).collect();
    let joint_success = success.iter().all(|&ok| ok);
    DecodeOutcome {
        sinr,
        success,
        joint_success,
    }
}

/// Debug record for one node of a realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub id: usize,
    pub d: f64,
    pub zeta: f64,
    pub h: f64,
    pub sinr: f64,
    pub success: bool,
}

pub fn realization_dump(realization: &SubregionRealization, gamma: f64) -> Vec<RealizationRecord> {
    let outcome = decode_subregion(realization, gamma);
    realization
        .records
        .iter()
        .zip(outcome.sinr.iter().zip(&outcome.success))
        .map(|(r, (&sinr, &success))| RealizationRecord {
            id: r.node_id,
            d: r.distance,
            zeta: r.zeta,
            h: r.h,
            sinr,
            success,
        })
        .collect()
}
