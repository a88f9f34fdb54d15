//! Metro topologies: file format, validation and shortest-distance routing.
//!
//! A topology file is a TOML document:
//!
//! ```toml
//! name = "two-path"
//!
//! [[nodes]]
//! id = "S"
//! role = "ACO"          # ACO | MACO | TRANSIT
//!
//! [[links]]
//! id = "L1"
//! a = "S"
//! b = "D"
//! length_km = 8.8
//! load = 0.842
//! mean_service_time_us = 1.0   # optional, defaults to 1.0
//! ```
//!
//! Unknown keys are rejected. Links are undirected.

mod routing;
pub mod synthetic;

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::delay::DEFAULT_SERVICE_TIME_US;
use crate::{Error, Result};

pub use routing::route;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Role {
    /// Access central office, a traffic source.
    Aco,
    /// Metro-aggregation central office hosting a data center.
    Maco,
    Transit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub id: String,
    pub a: String,
    pub b: String,
    pub length_km: f64,
    /// Utilization in (0, 1).
    pub load: f64,
    #[serde(default = "default_service_time")]
    pub mean_service_time_us: f64,
}

fn default_service_time() -> f64 {
    DEFAULT_SERVICE_TIME_US
}

impl LinkSpec {
    pub fn new(id: &str, a: &str, b: &str, length_km: f64, load: f64) -> Self {
        Self {
            id: id.to_owned(),
            a: a.to_owned(),
            b: b.to_owned(),
            length_km,
            load,
            mean_service_time_us: DEFAULT_SERVICE_TIME_US,
        }
    }

    /// The endpoint opposite to `node`, if `node` is an endpoint.
    pub fn other(&self, node: &str) -> Option<&str> {
        if self.a == node {
            Some(&self.b)
        } else if self.b == node {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn touches(&self, node: &str) -> bool {
        self.a == node || self.b == node
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyFile {
    name: String,
    #[serde(default)]
    nodes: Vec<NodeSpec>,
    #[serde(default)]
    links: Vec<LinkSpec>,
}

/// A validated, immutable network topology.
#[derive(Debug, Clone)]
pub struct Topology {
    name: String,
    nodes: Vec<NodeSpec>,
    links: Vec<LinkSpec>,
    node_index: HashMap<String, usize>,
    link_index: HashMap<String, usize>,
    /// link indices incident to each node
    adjacency: Vec<Vec<usize>>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.nodes == other.nodes && self.links == other.links
    }
}

impl Topology {
    /// Validates and indexes a topology.
    pub fn new(
        name: impl Into<String>,
        nodes: Vec<NodeSpec>,
        links: Vec<LinkSpec>,
    ) -> Result<Self> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if n.id.is_empty() {
                return Err(Error::Validation(format!("node #{i} has an empty id")));
            }
            if node_index.insert(n.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate node id {}", n.id)));
            }
        }

        let mut link_index = HashMap::with_capacity(links.len());
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (i, l) in links.iter().enumerate() {
            if l.id.is_empty() {
                return Err(Error::Validation(format!("link #{i} has an empty id")));
            }
            if link_index.insert(l.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate link id {}", l.id)));
            }
            if !(l.load > 0.0 && l.load < 1.0) {
                return Err(Error::Validation(format!(
                    "link {}: load {} outside (0, 1)",
                    l.id, l.load
                )));
            }
            if !(l.length_km > 0.0 && l.length_km.is_finite()) {
                return Err(Error::Validation(format!(
                    "link {}: length_km {} must be positive",
                    l.id, l.length_km
                )));
            }
            if !(l.mean_service_time_us > 0.0 && l.mean_service_time_us.is_finite()) {
                return Err(Error::Validation(format!(
                    "link {}: mean_service_time_us {} must be positive",
                    l.id, l.mean_service_time_us
                )));
            }
            let a = *node_index.get(&l.a).ok_or_else(|| {
                Error::Validation(format!("link {}: endpoint {} is not a node", l.id, l.a))
            })?;
            let b = *node_index.get(&l.b).ok_or_else(|| {
                Error::Validation(format!("link {}: endpoint {} is not a node", l.id, l.b))
            })?;
            if a == b {
                return Err(Error::Validation(format!(
                    "link {}: self-loop on {}",
                    l.id, l.a
                )));
            }
            adjacency[a].push(i);
            adjacency[b].push(i);
        }

        let topo = Self {
            name: name.into(),
            nodes,
            links,
            node_index,
            link_index,
            adjacency,
        };
        topo.check_connectivity()?;
        Ok(topo)
    }

    /// Every ACO must reach every MACO.
    fn check_connectivity(&self) -> Result<()> {
        let macos: Vec<usize> = self.role_indices(Role::Maco);
        if macos.is_empty() {
            return Ok(());
        }
        for aco in self.role_indices(Role::Aco) {
            let reached = self.reachable_from(aco);
            if let Some(&m) = macos.iter().find(|&&m| !reached[m]) {
                return Err(Error::Validation(format!(
                    "ACO {} cannot reach MACO {}",
                    self.nodes[aco].id, self.nodes[m].id
                )));
            }
        }
        Ok(())
    }

    fn role_indices(&self, role: Role) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].role == role)
            .collect()
    }

    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &l in &self.adjacency[u] {
                let v = self.opposite(l, u);
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    pub(crate) fn opposite(&self, link: usize, node: usize) -> usize {
        let l = &self.links[link];
        let a = self.node_index[&l.a];
        if a == node {
            self.node_index[&l.b]
        } else {
            a
        }
    }

    pub(crate) fn incident(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub(crate) fn node_idx(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: TopologyFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(file.name, file.nodes, file.links)
    }

    /// Serializes back to the file format; `from_toml_str(to_toml())` is the identity.
    pub fn to_toml(&self) -> String {
        let file = TopologyFile {
            name: self.name.clone(),
            nodes: self.nodes.clone(),
            links: self.links.clone(),
        };
        toml::to_string(&file).expect("topology serializes to TOML")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn links(&self) -> &[LinkSpec] {
        &self.links
    }

    pub fn node(&self, id: &str) -> Option<&NodeSpec> {
        self.node_index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn link(&self, id: &str) -> Option<&LinkSpec> {
        self.link_index.get(id).map(|&i| &self.links[i])
    }

    /// Node ids with the given role, sorted.
    pub fn ids_with_role(&self, role: Role) -> Vec<&str> {
        let mut ids: Vec<&str> = self
            .nodes
            .iter()
            .filter(|n| n.role == role)
            .map(|n| n.id.as_str())
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Checks the [`PathSpec`] invariants against this topology.
    pub fn validate_path(&self, path: &PathSpec) -> Result<()> {
        if self.node(&path.source).is_none() {
            return Err(Error::UnknownNode(path.source.clone()));
        }
        if self.node(&path.destination).is_none() {
            return Err(Error::UnknownNode(path.destination.clone()));
        }
        if path.link_ids.is_empty() {
            return Err(Error::InvalidPath("path has no links".into()));
        }
        let mut visited = HashSet::from([path.source.as_str()]);
        let mut at = path.source.as_str();
        for id in &path.link_ids {
            let link = self
                .link(id)
                .ok_or_else(|| Error::UnknownLink(id.clone()))?;
            let next = link.other(at).ok_or_else(|| {
                Error::InvalidPath(format!("link {id} does not continue from node {at}"))
            })?;
            if !visited.insert(next) {
                return Err(Error::InvalidPath(format!("node {next} visited twice")));
            }
            at = next;
        }
        if at != path.destination {
            return Err(Error::InvalidPath(format!(
                "path ends at {at}, expected {}",
                path.destination
            )));
        }
        Ok(())
    }

    /// Sum of link lengths along `path`; unknown links are skipped.
    pub fn path_length_km(&self, path: &PathSpec) -> f64 {
        path.link_ids
            .iter()
            .filter_map(|id| self.link(id))
            .map(|l| l.length_km)
            .sum()
    }
}

/// Reads and validates a topology file.
pub fn load_topology(path: impl AsRef<Path>) -> Result<Topology> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Parse(format!("{}: not UTF-8: {e}", path.display())))?;
    Topology::from_toml_str(text)
}

/// An ordered walk over links from `source` to `destination`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathSpec {
    pub source: String,
    pub destination: String,
    pub link_ids: Vec<String>,
}

impl PathSpec {
    pub fn reversed(&self) -> Self {
        Self {
            source: self.destination.clone(),
            destination: self.source.clone(),
            link_ids: self.link_ids.iter().rev().cloned().collect(),
        }
    }

    /// `"source->destination"`.
    pub fn label(&self) -> String {
        format!("{}->{}", self.source, self.destination)
    }
}

/// All (ACO, MACO) pairs, ACO-major, both sorted by id.
pub fn all_pairs(topology: &Topology) -> Vec<(String, String)> {
    let macos = topology.ids_with_role(Role::Maco);
    topology
        .ids_with_role(Role::Aco)
        .into_iter()
        .flat_map(|a| macos.iter().map(move |m| (a.to_owned(), (*m).to_owned())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: &str, role: Role) -> NodeSpec {
        NodeSpec {
            id: id.into(),
            role,
        }
    }

    const MINIMAL: &str = r#"
name = "minimal"

[[nodes]]
id = "S"
role = "ACO"

[[nodes]]
id = "D"
role = "MACO"

[[links]]
id = "L1"
a = "S"
b = "D"
length_km = 8.8
load = 0.842
"#;

    #[test]
    fn parses_minimal_file() {
        let t = Topology::from_toml_str(MINIMAL).unwrap();
        assert_eq!(t.name(), "minimal");
        assert_eq!(t.links().len(), 1);
        let l = t.link("L1").unwrap();
        assert_eq!(l.length_km, 8.8);
        assert_eq!(l.load, 0.842);
        assert_eq!(l.mean_service_time_us, 1.0);
    }

    #[test]
    fn load_of_one_is_rejected_by_link_name() {
        let text = MINIMAL.replace("load = 0.842", "load = 1.0");
        let err = Topology::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("L1"), "{err}");
    }

    #[test]
    fn unknown_field_is_a_parse_error() {
        let text = MINIMAL.replace("load = 0.842", "load = 0.842\ncolor = \"red\"");
        assert!(matches!(
            Topology::from_toml_str(&text),
            Err(Error::Parse(_))
        ));
        let text = format!("version = 2\n{MINIMAL}");
        assert!(matches!(
            Topology::from_toml_str(&text),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(
            Topology::from_toml_str("name = [unterminated"),
            Err(Error::Parse(_))
        ));
        let text = MINIMAL.replace("\"MACO\"", "\"DATACENTER\"");
        assert!(matches!(
            Topology::from_toml_str(&text),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn validation_errors_name_the_offender() {
        let nodes = vec![node("A", Role::Aco), node("A", Role::Maco)];
        let err = Topology::new("t", nodes, vec![]).unwrap_err();
        assert!(err.to_string().contains("duplicate node id A"), "{err}");

        let nodes = vec![node("A", Role::Aco), node("B", Role::Maco)];
        let links = vec![LinkSpec::new("X", "A", "Z", 1.0, 0.5)];
        let err = Topology::new("t", nodes.clone(), links).unwrap_err();
        assert!(
            err.to_string().contains("X") && err.to_string().contains("Z"),
            "{err}"
        );

        let links = vec![
            LinkSpec::new("X", "A", "B", 1.0, 0.5),
            LinkSpec::new("X", "A", "B", 1.0, 0.5),
        ];
        let err = Topology::new("t", nodes.clone(), links).unwrap_err();
        assert!(err.to_string().contains("duplicate link id X"), "{err}");

        let links = vec![LinkSpec::new("Y", "A", "B", 0.0, 0.5)];
        let err = Topology::new("t", nodes.clone(), links).unwrap_err();
        assert!(err.to_string().contains("Y"), "{err}");

        let links = vec![LinkSpec::new("Z0", "A", "B", 1.0, 0.0)];
        let err = Topology::new("t", nodes, links).unwrap_err();
        assert!(err.to_string().contains("Z0"), "{err}");
    }

    #[test]
    fn disconnected_aco_maco_pair_is_rejected() {
        let nodes = vec![
            node("A1", Role::Aco),
            node("A2", Role::Aco),
            node("M", Role::Maco),
        ];
        let links = vec![LinkSpec::new("L", "A1", "M", 1.0, 0.5)];
        let err = Topology::new("t", nodes, links).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("A2") && msg.contains("M"), "{msg}");
    }

    #[test]
    fn toml_round_trip_is_identity() {
        let t = Topology::from_toml_str(MINIMAL).unwrap();
        let again = Topology::from_toml_str(&t.to_toml()).unwrap();
        assert_eq!(t, again);
        assert_eq!(t.to_toml(), again.to_toml());
    }

    #[test]
    fn all_pairs_counts_and_order() {
        let mut nodes: Vec<NodeSpec> = ["a2", "a1"].iter().map(|i| node(i, Role::Aco)).collect();
        nodes.extend(["m3", "m1", "m2"].iter().map(|i| node(i, Role::Maco)));
        nodes.push(node("hub", Role::Transit));
        let links = nodes
            .iter()
            .filter(|n| n.id != "hub")
            .map(|n| LinkSpec::new(&format!("l-{}", n.id), &n.id, "hub", 1.0, 0.5))
            .collect();
        let t = Topology::new("star", nodes, links).unwrap();
        let pairs = all_pairs(&t);
        assert_eq!(pairs.len(), 6);
        assert_eq!(pairs[0], ("a1".to_string(), "m1".to_string()));
        assert_eq!(pairs[5], ("a2".to_string(), "m3".to_string()));
    }

    #[test]
    fn all_pairs_empty_without_macos() {
        let nodes = vec![node("a", Role::Aco), node("t", Role::Transit)];
        let t = Topology::new("t", nodes, vec![LinkSpec::new("l", "a", "t", 1.0, 0.5)]).unwrap();
        assert!(all_pairs(&t).is_empty());
    }

    #[test]
    fn validate_path_catches_broken_walks() {
        let t = Topology::from_toml_str(MINIMAL).unwrap();
        let ok = PathSpec {
            source: "S".into(),
            destination: "D".into(),
            link_ids: vec!["L1".into()],
        };
        t.validate_path(&ok).unwrap();
        t.validate_path(&ok.reversed()).unwrap();
        let unknown = PathSpec {
            link_ids: vec!["nope".into()],
            ..ok.clone()
        };
        assert!(matches!(
            t.validate_path(&unknown),
            Err(Error::UnknownLink(_))
        ));
        let repeated = PathSpec {
            link_ids: vec!["L1".into(), "L1".into()],
            ..ok.clone()
        };
        assert!(matches!(
            t.validate_path(&repeated),
            Err(Error::InvalidPath(_))
        ));
        let wrong_end = PathSpec {
            destination: "S".into(),
            ..ok
        };
        assert!(matches!(
            t.validate_path(&wrong_end),
            Err(Error::InvalidPath(_))
        ));
    }
}
