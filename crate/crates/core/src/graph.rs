//! Finite, connected, simple metric graphs.
//!
//! Every edge is identified with `[0, 1]`: its tail sits at `x = 0` and its
//! head at `x = 1`. Vertices and edges get dense ids in input order, and all
//! matrix layouts downstream are derived from those ids.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::GraphError;

/// Which end of an edge a vertex sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    /// `x = 0`.
    Tail,
    /// `x = 1`.
    Head,
}

impl Endpoint {
    /// Coordinate of the endpoint on the unit interval, 0 or 1.
    pub fn coordinate(self) -> usize {
        match self {
            Endpoint::Tail => 0,
            Endpoint::Head => 1,
        }
    }

    /// Outward orientation: `-1` at the tail, `+1` at the head.
    pub fn orientation(self) -> f64 {
        match self {
            Endpoint::Tail => -1.0,
            Endpoint::Head => 1.0,
        }
    }
}

/// One incident edge as seen from a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incident {
    pub edge: usize,
    pub end: Endpoint,
}

/// Incident edges of a vertex, sorted by edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexIncidence {
    pub vertex: usize,
    pub incident: Vec<Incident>,
}

impl VertexIncidence {
    pub fn valency(&self) -> usize {
        self.incident.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.incident.iter().map(|i| i.edge)
    }

    /// Edges with `l_j(v) = 0`.
    pub fn tail_side(&self) -> Vec<usize> {
        self.side(Endpoint::Tail)
    }

    /// Edges with `l_j(v) = 1`.
    pub fn head_side(&self) -> Vec<usize> {
        self.side(Endpoint::Head)
    }

    fn side(&self, end: Endpoint) -> Vec<usize> {
        self.incident
            .iter()
            .filter(|i| i.end == end)
            .map(|i| i.edge)
            .collect()
    }

    /// Position of `edge` in the sorted incidence list.
    pub fn position(&self, edge: usize) -> Option<usize> {
        self.incident.iter().position(|i| i.edge == edge)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    labels: Vec<usize>,
    edges: Vec<(usize, usize)>,
    incidence: Vec<VertexIncidence>,
}

impl MetricGraph {
    /// Builds the graph from `(tail, head)` vertex labels.
    ///
    /// Labels are arbitrary integers; dense vertex ids are assigned in order
    /// of first appearance. Rejects self-loops, repeated vertex pairs (in
    /// either orientation) and disconnected input.
    pub fn build(edge_list: &[(usize, usize)]) -> Result<Self, GraphError> {
        if edge_list.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut ids = BTreeMap::new();
        let mut labels = Vec::new();
        let mut intern = |label: usize| {
            *ids.entry(label).or_insert_with(|| {
                labels.push(label);
                labels.len() - 1
            })
        };
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (j, &(a, b)) in edge_list.iter().enumerate() {
            if a == b {
                return Err(GraphError::SelfLoop { edge: j, vertex: a });
            }
            let (ta, hb) = (intern(a), intern(b));
            let key = (ta.min(hb), ta.max(hb));
            if let Some(&first) = seen.get(&key) {
                return Err(GraphError::DuplicateEdge { first, second: j });
            }
            seen.insert(key, j);
            edges.push((ta, hb));
        }

        let n = labels.len();
        let mut incidence: Vec<VertexIncidence> = (0..n)
            .map(|v| VertexIncidence {
                vertex: v,
                incident: Vec::new(),
            })
            .collect();
        for (j, &(t, h)) in edges.iter().enumerate() {
            incidence[t].incident.push(Incident {
                edge: j,
                end: Endpoint::Tail,
            });
            incidence[h].incident.push(Incident {
                edge: j,
                end: Endpoint::Head,
            });
        }

        let graph = MetricGraph {
            labels,
            edges,
            incidence,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let n = self.vertex_count();
        let mut reached = vec![false; n];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for inc in &self.incidence[v].incident {
                let (t, h) = self.edges[inc.edge];
                let w = if t == v { h } else { t };
                if !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
        if reached.iter().all(|r| *r) {
            return Ok(());
        }
        let unreached: Vec<usize> = (0..n)
            .filter(|&v| !reached[v])
            .map(|v| self.labels[v])
            .collect();
        Err(GraphError::Disconnected { unreached })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `(tail, head)` dense vertex ids of edge `j`.
    pub fn edge(&self, j: usize) -> (usize, usize) {
        self.edges[j]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    pub fn incidence(&self, v: usize) -> Result<&VertexIncidence, GraphError> {
        self.incidence.get(v).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn incidences(&self) -> &[VertexIncidence] {
        &self.incidence
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = MetricGraph::build(&[(0, 1)]).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        let v0 = g.incidence(0).unwrap();
        assert_eq!(
            v0.incident,
            vec![Incident {
                edge: 0,
                end: Endpoint::Tail
            }]
        );
        assert_eq!(v0.incident[0].end.orientation(), -1.0);
        let v1 = g.incidence(1).unwrap();
        assert_eq!(v1.incident[0].end.coordinate(), 1);
        assert_eq!(v1.incident[0].end.orientation(), 1.0);
    }

    #[test]
    fn star_center_incidence() {
        // v0 -> v1, then v1 -> v2..v5
        let g = MetricGraph::build(&[(0, 1), (1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        let c = g.incidence(1).unwrap();
        assert_eq!(c.valency(), 5);
        assert_eq!(c.head_side(), vec![0]);
        assert_eq!(c.tail_side(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            MetricGraph::build(&[(0, 1), (0, 1)]),
            Err(GraphError::DuplicateEdge {
                first: 0,
                second: 1
            })
        );
        assert_eq!(
            MetricGraph::build(&[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge {
                first: 0,
                second: 1
            })
        );
        assert_eq!(
            MetricGraph::build(&[(0, 1), (2, 2)]),
            Err(GraphError::SelfLoop { edge: 1, vertex: 2 })
        );
        assert_eq!(
            MetricGraph::build(&[(0, 1), (2, 3)]),
            Err(GraphError::Disconnected {
                unreached: vec![2, 3]
            })
        );
        assert_eq!(MetricGraph::build(&[]), Err(GraphError::Empty));
        let g = MetricGraph::build(&[(0, 1)]).unwrap();
        assert_eq!(g.incidence(7), Err(GraphError::UnknownVertex(7)));
    }

    #[test]
    fn labels_are_interned_in_input_order() {
        let g = MetricGraph::build(&[(10, 4), (4, 7)]).unwrap();
        assert_eq!(g.labels(), &[10, 4, 7]);
        assert_eq!(g.edge(1), (1, 2));
        assert_eq!(g.vertex_by_label(7), Some(2));
    }
}
