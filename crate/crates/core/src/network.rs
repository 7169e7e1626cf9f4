//! A network deployed at one altitude: the tiling, the node population and
//! the per-sub-region link sets seen from each waypoint.

use crate::config::{NetworkConfig, Population};
use crate::error::Result;
use crate::geometry::{
    assign_nodes, assign_nodes_balanced, balanced_counts, build_tiling, distance, place_nodes,
    Node, TargetArea, TilingPlan, Waypoint,
};
use crate::link::SubregionLinks;

#[derive(Debug, Clone)]
pub struct Deployment {
    pub plan: TilingPlan,
    pub nodes: Vec<Node>,
    pub counts: Vec<usize>,
    /// Links of sub-region `l`, in decode order, seen from waypoint `l`.
    pub links: Vec<SubregionLinks>,
}

impl Deployment {
    pub fn subregions(&self) -> usize {
        self.plan.total_subregions
    }

    pub fn waypoint(&self, l: usize) -> Waypoint {
        let c = self.plan.centers[l];
        Waypoint {
            x: c.x,
            y: c.y,
            h: self.plan.altitude,
        }
    }
}

pub fn deploy(altitude: f64, cfg: &NetworkConfig) -> Result<Deployment> {
    let area = TargetArea::new(cfg.cov_radius_m)?;
    let plan = build_tiling(altitude, cfg.theta_rad(), &area, cfg.w_max)?;
    let mut nodes = place_nodes(cfg.n_nodes, &area, cfg.seed);
    let counts = match cfg.population {
        Population::Balanced => {
            let quota = balanced_counts(cfg.n_nodes, plan.total_subregions);
            assign_nodes_balanced(&mut nodes, &plan, &quota)
        }
        Population::Placed => assign_nodes(&mut nodes, &plan),
    };

    let mut members: Vec<Vec<(usize, f64)>> = vec![Vec::new(); plan.total_subregions];
    for node in &nodes {
        let l = node.subregion.expect("every node is assigned");
        let c = plan.centers[l];
        let wp = Waypoint {
            x: c.x,
            y: c.y,
            h: altitude,
        };
        members[l].push((node.id, distance(node.position(), &wp)));
    }
    let links: Vec<SubregionLinks> = members
        .iter()
        .map(|m| {
            SubregionLinks::new(
                m,
                cfg.zeta_min,
                cfg.zeta_max,
                cfg.zeta_scheme(),
                cfg.channel(),
            )
        })
        .collect();
    for l in &links {
        for slot in &l.slots {
            nodes[slot.node_id].zeta = Some(slot.zeta);
        }
    }
    Ok(Deployment {
        plan,
        nodes,
        counts,
        links,
    })
}
