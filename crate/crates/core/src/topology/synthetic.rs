//! Synthetic metro topology standing in for a real metro network whose link
//! loads are not available.
//!
//! Backbone nodes (MACOs and transit offices) are scattered over a disc and
//! meshed to their nearest neighbours; ACOs sit around them and home onto
//! the closest backbone offices. Lengths are straight-line distances with a
//! fiber slack factor, loads are uniform draws. Everything is a pure function
//! of [`MetroParams`], so the shipped file can be regenerated bit for bit.

use std::collections::BTreeSet;

use rand::Rng;

use super::{LinkSpec, NodeSpec, Role, Topology};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct MetroParams {
    pub name: String,
    pub seed: u64,
    pub acos: usize,
    pub macos: usize,
    pub transits: usize,
    /// Backbone nodes lie in a disc of this radius.
    pub backbone_radius_km: f64,
    /// ACOs lie in an annulus `[inner, outer]`.
    pub access_radius_km: (f64, f64),
    /// Nearest-neighbour links per backbone node.
    pub backbone_degree: usize,
    /// Probability that an ACO is dual-homed.
    pub dual_homing: f64,
    /// Fiber route length over straight-line distance.
    pub slack: f64,
    pub backbone_load: (f64, f64),
    pub access_load: (f64, f64),
}

impl Default for MetroParams {
    fn default() -> Self {
        Self {
            name: "metro-synthetic-35x17".into(),
            seed: 20240917,
            acos: 35,
            macos: 17,
            transits: 10,
            backbone_radius_km: 5.0,
            access_radius_km: (2.0, 7.0),
            backbone_degree: 3,
            dual_homing: 0.3,
            slack: 1.2,
            backbone_load: (0.25, 0.8),
            access_load: (0.15, 0.8),
        }
    }
}

fn point_in_annulus<R: Rng>(rng: &mut R, inner: f64, outer: f64) -> (f64, f64) {
    // uniform over the area
    let r = (rng.random_range(inner * inner..=outer * outer)).sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    (r * theta.cos(), r * theta.sin())
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (x * s).round() / s
}

/// Generates the synthetic metro topology described by `params`.
pub fn metro(params: &MetroParams) -> Topology {
    let mut rng = seed::stream(params.seed);
    let mut nodes = Vec::new();
    let mut pos = Vec::new();

    for i in 1..=params.macos {
        nodes.push(NodeSpec {
            id: format!("MACO{i:02}"),
            role: Role::Maco,
        });
        pos.push(point_in_annulus(&mut rng, 0.0, params.backbone_radius_km));
    }
    for i in 1..=params.transits {
        nodes.push(NodeSpec {
            id: format!("T{i:02}"),
            role: Role::Transit,
        });
        pos.push(point_in_annulus(&mut rng, 0.0, params.backbone_radius_km));
    }
    let backbone = nodes.len();
    for i in 1..=params.acos {
        nodes.push(NodeSpec {
            id: format!("ACO{i:02}"),
            role: Role::Aco,
        });
        let (inner, outer) = params.access_radius_km;
        pos.push(point_in_annulus(&mut rng, inner, outer));
    }

    let nearest = |from: usize, among: std::ops::Range<usize>| -> Vec<usize> {
        let mut others: Vec<usize> = among.filter(|&j| j != from).collect();
        others.sort_by(|&a, &b| dist(pos[from], pos[a]).total_cmp(&dist(pos[from], pos[b])));
        others
    };

    // undirected edges as ordered index pairs, deduplicated
    let mut edges = BTreeSet::new();
    let mut add = |a: usize, b: usize| {
        edges.insert((a.min(b), a.max(b)));
    };

    // minimum spanning tree keeps the backbone connected
    let mut in_tree = vec![false; backbone];
    in_tree[0] = true;
    for _ in 1..backbone {
        let (a, b) = (0..backbone)
            .filter(|&a| in_tree[a])
            .flat_map(|a| (0..backbone).filter(|&b| !in_tree[b]).map(move |b| (a, b)))
            .min_by(|&(a, b), &(c, d)| dist(pos[a], pos[b]).total_cmp(&dist(pos[c], pos[d])))
            .expect("backbone has unreached nodes");
        in_tree[b] = true;
        add(a, b);
    }
    for u in 0..backbone {
        for v in nearest(u, 0..backbone)
            .into_iter()
            .take(params.backbone_degree)
        {
            add(u, v);
        }
    }
    let mut access_edges = BTreeSet::new();
    for u in backbone..nodes.len() {
        let homes = nearest(u, 0..backbone);
        let count = if rng.random_bool(params.dual_homing) {
            2
        } else {
            1
        };
        for &h in homes.iter().take(count) {
            access_edges.insert((h, u));
        }
    }

    let mut links = Vec::new();
    let mut push = |a: usize, b: usize, (lo, hi): (f64, f64), rng: &mut seed::Stream| {
        let length_km = round_to(params.slack * dist(pos[a], pos[b]), 1).max(0.1);
        let load = round_to(rng.random_range(lo..hi), 3);
        links.push(LinkSpec::new(
            &format!("L{:03}", links.len() + 1),
            &nodes[a].id,
            &nodes[b].id,
            length_km,
            load,
        ));
    };
    for (a, b) in edges {
        push(a, b, params.backbone_load, &mut rng);
    }
    for (a, b) in access_edges {
        push(a, b, params.access_load, &mut rng);
    }

    Topology::new(params.name.clone(), nodes, links).expect("generated topology is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::all_pairs;

    #[test]
    fn default_metro_has_595_pairs() {
        let t = metro(&MetroParams::default());
        assert_eq!(t.ids_with_role(Role::Aco).len(), 35);
        assert_eq!(t.ids_with_role(Role::Maco).len(), 17);
        assert_eq!(all_pairs(&t).len(), 595);
    }

    #[test]
    fn generation_is_deterministic() {
        let p = MetroParams::default();
        assert_eq!(metro(&p).to_toml(), metro(&p).to_toml());
        let other = MetroParams {
            seed: p.seed + 1,
            ..p.clone()
        };
        assert_ne!(metro(&p).to_toml(), metro(&other).to_toml());
    }
}
