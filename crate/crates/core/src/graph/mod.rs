//! Conflict graph, its decomposition into independent instances, and the
//! structural statistics of the components.

mod instance;
mod treewidth;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conflict::{ConflictError, ConflictSet};
use crate::dsu::DisjointSet;
use crate::stats::{linear_regression, LinearFit};
use crate::trajectory::FlightSet;

pub use instance::Instance;
pub use treewidth::treewidth_estimate;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GraphError {
    #[error(transparent)]
    Conflict(#[from] ConflictError),
    #[error("conflict {conflict} references unknown flight {flight}")]
    UnknownFlight { conflict: usize, flight: String },
    #[error("power-law fit needs at least two non-empty degree bins, found {0}")]
    FitUndefined(usize),
    #[error("slope fit needs at least two components of distinct size at or above {min_size}, found {found}")]
    InsufficientData { min_size: usize, found: usize },
}

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        Self {
            adjacency: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Adds `{a, b}`; self-loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adjacency[a].insert(b);
            self.adjacency[b].insert(a);
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = DisjointSet::new(self.len());
        for (a, nbrs) in self.adjacency.iter().enumerate() {
            for &b in nbrs.range(a + 1..) {
                dsu.union(a, b);
            }
        }
        dsu.groups()
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> SimpleGraph {
        let local: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(n, &v)| (v, n)).collect();
        let mut g = SimpleGraph::new(vertices.len());
        for (n, v) in vertices.iter().enumerate() {
            for w in &self.adjacency[*v] {
                if let Some(&m) = local.get(w) {
                    g.add_edge(n, m);
                }
            }
        }
        g
    }

    /// Number of vertices of each degree, including degree zero.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for nbrs in &self.adjacency {
            *hist.entry(nbrs.len()).or_insert(0) += 1;
        }
        hist
    }
}

/// Flights as vertices; an edge per flight pair sharing at least one conflict.
#[derive(Clone, Debug, PartialEq)]
pub struct ConflictGraph {
    vertices: Vec<String>,
    graph: SimpleGraph,
    edge_conflicts: BTreeMap<(usize, usize), Vec<usize>>,
    d_max: i64,
}

impl ConflictGraph {
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn d_max(&self) -> i64 {
        self.d_max
    }

    pub fn vertex_index(&self, flight_id: &str) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_str().cmp(flight_id)).ok()
    }

    /// Conflict ids carried by the edge between two flights.
    pub fn edge_conflicts(&self, a: &str, b: &str) -> Option<&[usize]> {
        let (x, y) = (self.vertex_index(a)?, self.vertex_index(b)?);
        self.edge_conflicts.get(&(x.min(y), x.max(y))).map(Vec::as_slice)
    }

    pub fn edges(&self) -> impl Iterator<Item = ((&str, &str), &[usize])> + '_ {
        self.edge_conflicts
            .iter()
            .map(|(&(a, b), ids)| ((self.vertices[a].as_str(), self.vertices[b].as_str()), ids.as_slice()))
    }
}

/// Builds the conflict graph of `flights`; `conflicts` must stem from them.
pub fn build_conflict_graph(
    flights: &FlightSet,
    conflicts: &ConflictSet,
    d_max: i64,
) -> Result<ConflictGraph, GraphError> {
    let vertices: Vec<String> = flights.ids().map(str::to_owned).collect();
    let lookup = |conflict: usize, id: &str| {
        vertices
            .binary_search_by(|v| v.as_str().cmp(id))
            .map_err(|_| GraphError::UnknownFlight {
                conflict,
                flight: id.to_owned(),
            })
    };
    let mut graph = SimpleGraph::new(vertices.len());
    let mut edge_conflicts: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for c in conflicts.conflicts() {
        let a = lookup(c.id(), c.first())?;
        let b = lookup(c.id(), c.second())?;
        graph.add_edge(a, b);
        edge_conflicts.entry((a.min(b), a.max(b))).or_default().push(c.id());
    }
    Ok(ConflictGraph {
        vertices,
        graph,
        edge_conflicts,
        d_max,
    })
}

/// One instance per connected component, ordered by smallest flight id.
///
/// With `include_trivial == false`, components whose conflicts are all
/// avoided at zero delay (including singletons) are dropped.
pub fn extract_instances(graph: &ConflictGraph, conflicts: &ConflictSet, include_trivial: bool) -> Vec<Instance> {
    graph
        .graph
        .components()
        .into_iter()
        .filter_map(|component| {
            let flights: Vec<String> = component.iter().map(|&v| graph.vertices[v].clone()).collect();
            let members: BTreeSet<&str> = flights.iter().map(String::as_str).collect();
            let restricted = conflicts.restrict(|f| members.contains(f));
            let instance = Instance::new(flights, restricted, graph.d_max).expect("component is closed");
            (include_trivial || !instance.is_trivial()).then_some(instance)
        })
        .collect()
}

/// Least-squares power law `count ∝ degree^alpha` on the log-log histogram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub alpha_stderr: Option<f64>,
    pub log_intercept: f64,
}

/// Fits `alpha` over bins with nonzero degree and nonzero count.
pub fn power_law_fit(histogram: &BTreeMap<usize, usize>) -> Result<PowerLawFit, GraphError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = histogram
        .iter()
        .filter(|(&d, &c)| d > 0 && c > 0)
        .map(|(&d, &c)| ((d as f64).ln(), (c as f64).ln()))
        .unzip();
    let fit = linear_regression(&xs, &ys).ok_or(GraphError::FitUndefined(xs.len()))?;
    Ok(PowerLawFit {
        alpha: fit.slope,
        alpha_stderr: fit.slope_stderr,
        log_intercept: fit.intercept,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStats {
    pub histogram: BTreeMap<usize, usize>,
    pub fit: Result<PowerLawFit, GraphError>,
}

pub fn degree_stats(graph: &SimpleGraph) -> DegreeStats {
    let histogram = graph.degree_histogram();
    let fit = power_law_fit(&histogram);
    DegreeStats { histogram, fit }
}

/// Slope of treewidth versus component size over `(size, treewidth)`
/// samples with `size >= min_size`.
pub fn treewidth_size_slope(samples: &[(usize, usize)], min_size: usize) -> Result<LinearFit<f64>, GraphError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .filter(|(size, _)| *size >= min_size)
        .map(|&(size, tw)| (size as f64, tw as f64))
        .unzip();
    let found = xs.len();
    linear_regression(&xs, &ys).ok_or(GraphError::InsufficientData { min_size, found })
}

/// Component-level statistics of one conflict graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats {
    /// `(size, treewidth estimate)` per component, ordered like [`SimpleGraph::components`].
    pub components: Vec<(usize, usize)>,
    pub degrees: DegreeStats,
    pub treewidth_slope: Result<LinearFit<f64>, GraphError>,
}

pub fn graph_stats(graph: &SimpleGraph, min_size: usize) -> GraphStats {
    let components: Vec<(usize, usize)> = graph
        .components()
        .par_iter()
        .map(|c| (c.len(), treewidth_estimate(&graph.induced(c))))
        .collect();
    let treewidth_slope = treewidth_size_slope(&components, min_size);
    GraphStats {
        components,
        degrees: degree_stats(graph),
        treewidth_slope,
    }
}
