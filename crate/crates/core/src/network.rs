//! A complete network model: graph, edge systems, vertex conditions and the
//! global flow matrix, plus the maps between physical fields `p` and the
//! arc state.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::edge::{Component, EdgeSpec, EdgeSystem, Tolerances};
use crate::error::{Error, KirchhoffError};
use crate::flow::{Coupling, NetworkState, Transport};
use crate::graph::MetricGraph;
use crate::kirchhoff::{
    assemble_global, build_vertex_condition_lenient, classify_column_sums, count_outgoing,
    ArcLayout, ColumnSumCase, GlobalFlowMatrix, VertexClass, VertexCondition,
};
use crate::linalg::{mat2_apply, Matrix};
use crate::quad;

#[derive(Clone, Debug)]
pub struct Network {
    graph: MetricGraph,
    systems: Vec<EdgeSystem>,
    conditions: Vec<VertexCondition>,
    layout: ArcLayout,
    global: Result<GlobalFlowMatrix, KirchhoffError>,
    tol: Tolerances,
}

impl Network {
    /// Builds the model. `phi` maps vertex labels to their condition rows;
    /// sinks may be omitted. A singular global system is not an error here:
    /// it is reported by [`Network::flow_matrix`] and [`Network::check`].
    pub fn build(
        edge_list: &[(usize, usize)],
        specs: &[EdgeSpec],
        phi: &BTreeMap<usize, Matrix>,
        grid: usize,
        tol: &Tolerances,
    ) -> Result<Self, Error> {
        let graph = MetricGraph::build(edge_list)?;
        if specs.len() != graph.edge_count() {
            return Err(KirchhoffError::EdgeCountMismatch {
                systems: specs.len(),
                edges: graph.edge_count(),
            }
            .into());
        }
        let systems = specs
            .iter()
            .enumerate()
            .map(|(j, s)| EdgeSystem::new(j, s.clone(), grid, tol))
            .collect::<Result<Vec<_>, _>>()?;
        let alpha: Vec<u8> = systems.iter().map(EdgeSystem::alpha).collect();

        for &label in phi.keys() {
            if graph.vertex_by_label(label).is_none() {
                return Err(crate::error::GraphError::UnknownVertex(label).into());
            }
        }
        let mut conditions = Vec::with_capacity(graph.vertex_count());
        for v in 0..graph.vertex_count() {
            let inc = graph.incidence(v)?;
            let label = graph.label(v);
            let k = count_outgoing(inc, &alpha);
            let rows = match phi.get(&label) {
                Some(m) => m.clone(),
                None if k == 0 => Matrix::zeros(0, 2 * inc.valency()),
                None => return Err(KirchhoffError::MissingCondition(label).into()),
            };
            let vc = build_vertex_condition_lenient(inc, &systems, &rows, tol)
                .map_err(|e| relabel(e, label))?;
            conditions.push(vc);
        }
        let global = assemble_global(&graph, &systems, &conditions, tol);
        Ok(Self {
            graph,
            systems,
            conditions,
            layout: ArcLayout::new(&alpha),
            global,
            tol: *tol,
        })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn systems(&self) -> &[EdgeSystem] {
        &self.systems
    }

    pub fn conditions(&self) -> &[VertexCondition] {
        &self.conditions
    }

    pub fn layout(&self) -> &ArcLayout {
        &self.layout
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn grid(&self) -> usize {
        self.systems[0].grid()
    }

    pub fn alpha(&self) -> Vec<u8> {
        self.systems.iter().map(EdgeSystem::alpha).collect()
    }

    pub fn flow_matrix(&self) -> Result<&GlobalFlowMatrix, KirchhoffError> {
        self.global.as_ref().map_err(Clone::clone)
    }

    pub fn transport(&self) -> Result<Transport, Error> {
        let g = self.flow_matrix()?;
        Ok(Transport::new(
            g.b.clone(),
            g.layout.forward_count(),
            g.speeds.clone(),
        )?)
    }

    /// Lower-order coupling, or `None` when every edge has `N-bar = 0`.
    pub fn coupling(&self) -> Option<Coupling> {
        if !self.systems.iter().any(EdgeSystem::has_lower_order) {
            return None;
        }
        let pairs = (0..self.systems.len())
            .map(|j| {
                [
                    self.layout.index_of(j, Component::Plus),
                    self.layout.index_of(j, Component::Minus),
                ]
            })
            .collect();
        let matrices = self
            .systems
            .iter()
            .map(|s| (0..=s.grid()).map(|i| s.lower_order_at_node(i)).collect())
            .collect();
        Some(Coupling { pairs, matrices })
    }

    /// Arc state from nodal `p^j = (p1, p2)` per edge.
    pub fn state_from_fields(&self, p: &[Vec<[f64; 2]>]) -> NetworkState {
        let g = self.grid();
        let mut values = vec![vec![0.0; g + 1]; self.layout.len()];
        for (j, (sys, pj)) in self.systems.iter().zip(p).enumerate() {
            let u = sys.riemann_transform(pj);
            let a = self.layout.index_of(j, Component::Plus);
            let b = self.layout.index_of(j, Component::Minus);
            for (i, ui) in u.iter().enumerate() {
                values[a][i] = ui[0];
                values[b][i] = ui[1];
            }
        }
        NetworkState { t: 0.0, values }
    }

    /// Nodal `p^j` per edge from an arc state.
    pub fn fields_from_state(&self, state: &NetworkState) -> Vec<Vec<[f64; 2]>> {
        self.systems
            .iter()
            .enumerate()
            .map(|(j, sys)| {
                let a = &state.values[self.layout.index_of(j, Component::Plus)];
                let b = &state.values[self.layout.index_of(j, Component::Minus)];
                (0..=sys.grid())
                    .map(|i| mat2_apply(sys.f_at(i), [a[i], b[i]]))
                    .collect()
            })
            .collect()
    }

    /// `1/2 sum_j int (p1^2 + p2^2)`.
    pub fn energy(&self, state: &NetworkState) -> f64 {
        let h = 1.0 / self.grid() as f64;
        self.fields_from_state(state)
            .iter()
            .map(|p| {
                let w: Vec<f64> = p.iter().map(|q| q[0] * q[0] + q[1] * q[1]).collect();
                0.5 * quad::integrate(&w, h)
            })
            .sum()
    }

    /// `sum_j int p1`.
    pub fn mass(&self, state: &NetworkState) -> f64 {
        let h = 1.0 / self.grid() as f64;
        self.fields_from_state(state)
            .iter()
            .map(|p| {
                let w: Vec<f64> = p.iter().map(|q| q[0]).collect();
                quad::integrate(&w, h)
            })
            .sum()
    }

    pub fn check(&self) -> CheckReport {
        let vertices = self
            .conditions
            .iter()
            .map(|vc| VertexReport {
                label: self.graph.label(vc.vertex),
                class: vc.class,
                valency: vc.phi.cols() / 2,
                k: vc.k,
                solvable: vc.is_solvable(),
                rcond: vc.rcond,
                rcond_equilibrated: vc.rcond_equilibrated,
            })
            .collect();
        let total_conditions = self.conditions.iter().map(|c| c.k).sum();
        let (global, column_sums, case, b) = match &self.global {
            Ok(g) => {
                let sums = g.column_sums();
                let case = classify_column_sums(&sums);
                (Ok(g.rcond), sums, Some(case), Some(g.b.clone()))
            }
            Err(e) => (Err(e.clone()), Vec::new(), None, None),
        };
        CheckReport {
            edges: self.graph.edge_count(),
            alpha: self.alpha(),
            vertices,
            total_conditions,
            global,
            b,
            column_sums,
            case,
        }
    }
}

fn relabel(e: KirchhoffError, label: usize) -> KirchhoffError {
    match e {
        KirchhoffError::WrongRowCount { rows, expected, .. } => KirchhoffError::WrongRowCount {
            vertex: label,
            rows,
            expected,
        },
        KirchhoffError::WrongColumnCount { cols, expected, .. } => {
            KirchhoffError::WrongColumnCount {
                vertex: label,
                cols,
                expected,
            }
        }
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexReport {
    pub label: usize,
    pub class: VertexClass,
    pub valency: usize,
    pub k: usize,
    pub solvable: bool,
    pub rcond: f64,
    pub rcond_equilibrated: f64,
}

/// Solvability summary of a network.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub edges: usize,
    pub alpha: Vec<u8>,
    pub vertices: Vec<VertexReport>,
    pub total_conditions: usize,
    /// Reciprocal condition number of `xi_out`, or the assembly error.
    pub global: Result<f64, KirchhoffError>,
    pub b: Option<Matrix>,
    pub column_sums: Vec<f64>,
    pub case: Option<ColumnSumCase>,
}

impl CheckReport {
    pub fn is_solvable(&self) -> bool {
        self.global.is_ok()
    }

    pub fn vertex(&self, label: usize) -> Option<&VertexReport> {
        self.vertices.iter().find(|v| v.label == label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn telegraph() -> EdgeSpec {
        EdgeSpec::constant([[0.0, -1.0], [-1.0, 0.0]])
    }

    fn phi(rows: &[(usize, &[&[f64]])]) -> BTreeMap<usize, Matrix> {
        rows.iter()
            .map(|(v, r)| (*v, Matrix::from_rows(r)))
            .collect()
    }

    #[test]
    fn dirichlet_line() {
        let net = Network::build(
            &[(0, 1)],
            &[telegraph()],
            &phi(&[(0, &[&[1.0, 0.0]]), (1, &[&[1.0, 0.0]])]),
            16,
            &Tolerances::default(),
        )
        .unwrap();
        let report = net.check();
        assert!(report.is_solvable());
        assert_eq!(report.column_sums, vec![1.0, 1.0]);
        assert_eq!(report.case, Some(ColumnSumCase::Case1));

        let p: Vec<[f64; 2]> = (0..=16)
            .map(|i| [i as f64 * 0.1, 1.0 - i as f64 * 0.05])
            .collect();
        let s = net.state_from_fields(std::slice::from_ref(&p));
        let back = net.fields_from_state(&s);
        for (a, b) in p.iter().zip(&back[0]) {
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
        assert!(net.coupling().is_none());
    }

    #[test]
    fn missing_and_unknown_vertices() {
        let err = Network::build(
            &[(0, 1)],
            &[telegraph()],
            &phi(&[(0, &[&[1.0, 0.0]])]),
            16,
            &Tolerances::default(),
        )
        .unwrap_err();
        assert_eq!(err, Error::Kirchhoff(KirchhoffError::MissingCondition(1)));
        let err = Network::build(
            &[(0, 1)],
            &[telegraph()],
            &phi(&[
                (0, &[&[1.0, 0.0]]),
                (1, &[&[1.0, 0.0]]),
                (5, &[&[1.0, 0.0]]),
            ]),
            16,
            &Tolerances::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Graph(_)));
    }

    #[test]
    fn global_failure_is_reported() {
        let net = Network::build(
            &[(0, 1)],
            &[telegraph()],
            &phi(&[(0, &[&[0.0, 0.0]]), (1, &[&[0.0, 0.0]])]),
            16,
            &Tolerances::default(),
        )
        .unwrap();
        let report = net.check();
        assert!(!report.is_solvable());
        assert!(!report.vertices[0].solvable);
        assert!(net.transport().is_err());
    }
}
