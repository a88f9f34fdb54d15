//! Shortest-distance routing with a deterministic tie-break.
//!
//! Paths are ranked by total length; lengths within [`LENGTH_EPS_KM`] count as
//! equal and are then ranked by their link-id sequence, compared element-wise
//! as strings. The sequence is read from the endpoint with the smaller node id,
//! so `route(a, b)` is always `route(b, a)` reversed.

use std::cmp::Ordering;

use super::{PathSpec, Topology};
use crate::{Error, Result};

pub const LENGTH_EPS_KM: f64 = 1e-9;

#[derive(Debug, Clone)]
struct Label {
    length: f64,
    links: Vec<usize>,
}

fn compare(topo: &Topology, x: &Label, y: &Label) -> Ordering {
    if (x.length - y.length).abs() > LENGTH_EPS_KM {
        return x.length.total_cmp(&y.length);
    }
    let ids = |l: &Label| -> Vec<&str> {
        l.links
            .iter()
            .map(|&i| topo.links()[i].id.as_str())
            .collect()
    };
    ids(x).cmp(&ids(y))
}

/// Shortest path by total `length_km` between two nodes.
pub fn route(topology: &Topology, source: &str, destination: &str) -> Result<PathSpec> {
    let src = topology
        .node_idx(source)
        .ok_or_else(|| Error::UnknownNode(source.to_owned()))?;
    let dst = topology
        .node_idx(destination)
        .ok_or_else(|| Error::UnknownNode(destination.to_owned()))?;
    if src == dst {
        return Err(Error::InvalidPath(format!(
            "source and destination are both {source}"
        )));
    }
    if destination < source {
        return route(topology, destination, source).map(|p| p.reversed());
    }

    let n = topology.nodes().len();
    let mut best: Vec<Option<Label>> = vec![None; n];
    let mut settled = vec![false; n];
    best[src] = Some(Label {
        length: 0.0,
        links: Vec::new(),
    });

    loop {
        let next = (0..n)
            .filter(|&i| !settled[i])
            .filter_map(|i| best[i].as_ref().map(|l| (i, l)))
            .min_by(|(_, x), (_, y)| compare(topology, x, y))
            .map(|(i, _)| i);
        let Some(u) = next else { break };
        settled[u] = true;
        if u == dst {
            break;
        }
        let here = best[u].clone().expect("settled node has a label");
        for &l in topology.incident(u) {
            let v = topology.opposite(l, u);
            if settled[v] {
                continue;
            }
            let mut links = here.links.clone();
            links.push(l);
            let cand = Label {
                length: here.length + topology.links()[l].length_km,
                links,
            };
            let better = match &best[v] {
                None => true,
                Some(cur) => compare(topology, &cand, cur) == Ordering::Less,
            };
            if better {
                best[v] = Some(cand);
            }
        }
    }

    match best[dst].take() {
        Some(label) if settled[dst] => Ok(PathSpec {
            source: source.to_owned(),
            destination: destination.to_owned(),
            link_ids: label
                .links
                .iter()
                .map(|&i| topology.links()[i].id.clone())
                .collect(),
        }),
        _ => Err(Error::NoPath {
            source_node: source.to_owned(),
            destination: destination.to_owned(),
        }),
    }
}
