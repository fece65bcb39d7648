use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::RngCore;
use rand_distr::Normal;

use super::{clamp01, draw, Environment, Expectation, Normalization};
use crate::arms::{ArmSet, GroundSet};
use crate::error::{Error, Result};

const MAX_LISTED_MAXIMIZERS: usize = 1024;

/// Revenue over a social network: per community, the largest degree among the
/// chosen nodes, plus Gaussian noise, minus a per-node cost `alpha`. Raw
/// revenue is mapped into `[0,1]` by a [`Normalization`] and then clamped.
#[derive(Clone, Debug)]
pub struct NetworkRevenueEnv {
    ground: GroundSet,
    degrees: Vec<u32>,
    communities: Vec<ArmSet>,
    community_names: Vec<String>,
    alpha: f64,
    noise: Normal<f64>,
    sigma: f64,
    norm: Normalization,
}

impl NetworkRevenueEnv {
    /// Nodes are arms `0..degrees.len()`; `communities` must partition them.
    /// `bounds` defaults to `(-alpha * |V|, sum of per-community max degree)`.
    pub fn new(
        node_labels: Vec<String>,
        degrees: Vec<u32>,
        communities: Vec<(String, ArmSet)>,
        alpha: f64,
        sigma: f64,
        bounds: Option<(f64, f64)>,
    ) -> Result<Self> {
        let ground = GroundSet::with_labels(node_labels)?;
        if degrees.len() != ground.len() {
            return Err(Error::LengthMismatch {
                expected: ground.len(),
                got: degrees.len(),
            });
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidEnvironment(format!(
                "alpha must be >= 0, got {alpha}"
            )));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidEnvironment(format!(
                "sigma must be >= 0, got {sigma}"
            )));
        }
        let mut covered = ArmSet::EMPTY;
        for (name, c) in &communities {
            ground.check(*c)?;
            if c.is_empty() {
                return Err(Error::InvalidEnvironment(format!(
                    "community `{name}` is empty"
                )));
            }
            if !c.intersection(covered).is_empty() {
                return Err(Error::InvalidEnvironment(format!(
                    "community `{name}` overlaps another community"
                )));
            }
            covered = covered.union(*c);
        }
        if covered != ground.full() {
            let missing = ground.complement(covered).iter().next().unwrap();
            return Err(Error::InvalidEnvironment(format!(
                "node {} belongs to no community",
                ground.label(missing)
            )));
        }
        let (community_names, communities): (Vec<_>, Vec<_>) = communities.into_iter().unzip();
        let top: f64 = communities
            .iter()
            .map(|c| c.iter().map(|a| degrees[a]).max().unwrap_or(0) as f64)
            .sum();
        let (f_min, f_max) = bounds.unwrap_or((-alpha * ground.len() as f64, top));
        Ok(Self {
            norm: Normalization::new(f_min, f_max)?,
            noise: Normal::new(0.0, sigma).expect("validated"),
            ground,
            degrees,
            communities,
            community_names,
            alpha,
            sigma,
        })
    }

    pub fn degree(&self, node: usize) -> u32 {
        self.degrees[node]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn communities(&self) -> impl Iterator<Item = (&str, ArmSet)> {
        self.community_names
            .iter()
            .map(String::as_str)
            .zip(self.communities.iter().copied())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    /// Noiseless revenue before normalization.
    pub fn raw_mean(&self, s: ArmSet) -> f64 {
        let influence: u32 = self
            .communities
            .iter()
            .map(|c| {
                s.intersection(*c)
                    .iter()
                    .map(|a| self.degrees[a])
                    .max()
                    .unwrap_or(0)
            })
            .sum();
        influence as f64 - self.alpha * s.len() as f64
    }
}

impl Environment for NetworkRevenueEnv {
    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn sample(&self, s: ArmSet, rng: &mut dyn RngCore) -> f64 {
        let raw = self.raw_mean(s) + draw(&self.noise, rng);
        clamp01(self.norm.apply(raw))
    }

    /// The normalized noiseless revenue, which the default bounds keep inside
    /// `[0,1]`.
    fn expected_value(&self, s: ArmSet) -> Expectation {
        Expectation::exact(self.norm.apply(self.raw_mean(s)))
    }

    /// Keeping more than one node of a community only adds cost, so the
    /// optimum takes one top-degree node from each community whose top degree
    /// beats `alpha`. Only minimum-cardinality maximizers are listed.
    fn structural_maximizers(&self) -> Option<Vec<ArmSet>> {
        let mut sets = vec![ArmSet::EMPTY];
        for c in &self.communities {
            let top = c.iter().map(|a| self.degrees[a]).max()?;
            let gain = top as f64 - self.alpha;
            if gain <= 0.0 {
                continue;
            }
            let picks: Vec<usize> = c.iter().filter(|&a| self.degrees[a] == top).collect();
            sets = sets
                .iter()
                .flat_map(|s| picks.iter().map(move |&a| s.with(a)))
                .take(MAX_LISTED_MAXIMIZERS)
                .collect();
        }
        Some(sets)
    }
}

/// Reads an undirected edge list (`u v` per line, `#` comments) and a
/// community file (`node community` per line) into a [`NetworkRevenueEnv`].
///
/// Node ids are arbitrary non-negative integers, conventionally 1-based; the
/// node set is the set of ids appearing in the edge list, mapped to arms in
/// increasing id order. Duplicate edges are collapsed with a warning.
pub fn load_network(
    edge_list: &Path,
    communities: &Path,
    alpha: f64,
    sigma: f64,
    bounds: Option<(f64, f64)>,
) -> Result<NetworkRevenueEnv> {
    let edges_text = std::fs::read_to_string(edge_list).map_err(|e| Error::io(edge_list, e))?;
    let comm_text = std::fs::read_to_string(communities).map_err(|e| Error::io(communities, e))?;
    let (labels, degrees) = parse_edges(&edges_text, edge_list)?;
    let groups = parse_communities(&comm_text, communities, &labels)?;
    NetworkRevenueEnv::new(
        labels.iter().map(u64::to_string).collect(),
        degrees,
        groups,
        alpha,
        sigma,
        bounds,
    )
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then(|| (k + 1, line.split_whitespace().collect()))
    })
}

fn parse_edges(text: &str, path: &Path) -> Result<(Vec<u64>, Vec<u32>)> {
    let parse_err = |line, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut edges = BTreeSet::new();
    for (line, fields) in data_lines(text) {
        if fields.len() != 2 {
            return Err(parse_err(
                line,
                format!("expected `u v`, got {} fields", fields.len()),
            ));
        }
        let id = |f: &str| {
            f.parse::<u64>()
                .map_err(|_| parse_err(line, format!("bad node id `{f}`")))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        if u == v {
            return Err(parse_err(line, format!("self loop on node {u}")));
        }
        if !edges.insert((u.min(v), u.max(v))) {
            log::warn!(
                "{}:{line}: duplicate edge {u} {v} collapsed",
                path.display()
            );
        }
    }
    let mut degree: BTreeMap<u64, u32> = BTreeMap::new();
    for &(u, v) in &edges {
        *degree.entry(u).or_default() += 1;
        *degree.entry(v).or_default() += 1;
    }
    if degree.is_empty() {
        return Err(Error::InvalidEnvironment(format!(
            "{}: no edges",
            path.display()
        )));
    }
    Ok(degree.into_iter().unzip())
}

fn parse_communities(text: &str, path: &Path, labels: &[u64]) -> Result<Vec<(String, ArmSet)>> {
    let mut groups: BTreeMap<String, ArmSet> = BTreeMap::new();
    let mut seen = ArmSet::EMPTY;
    for (line, fields) in data_lines(text) {
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        if fields.len() != 2 {
            return Err(parse_err(format!(
                "expected `node community`, got {} fields",
                fields.len()
            )));
        }
        let node: u64 = fields[0]
            .parse()
            .map_err(|_| parse_err(format!("bad node id `{}`", fields[0])))?;
        let arm = labels
            .binary_search(&node)
            .map_err(|_| parse_err(format!("unknown node {node}")))?;
        if seen.contains(arm) {
            return Err(parse_err(format!("node {node} assigned twice")));
        }
        seen = seen.with(arm);
        let group = groups.entry(fields[1].to_string()).or_default();
        *group = group.with(arm);
    }
    Ok(groups.into_iter().collect())
}
