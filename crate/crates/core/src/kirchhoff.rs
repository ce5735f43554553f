//! Generalized Kirchhoff conditions `Phi_v p(v) = 0` and the global flow
//! matrix `B`.
//!
//! Every edge carries two Riemann invariants. Each one is an *arc*: a
//! forward arc (positive eigenvalue) enters its edge at the tail, a backward
//! arc at the head. Forward arcs are the `upsilon` unknowns, backward arcs
//! the `varpi` unknowns. Per arc there is one outgoing trace (fixed by the
//! vertex conditions) and one incoming trace, and `B` maps incoming traces
//! `(upsilon(1), varpi(0))` to outgoing ones `(upsilon(0), varpi(1))`.

use alloc::vec;
use alloc::vec::Vec;

use crate::edge::{Component, EdgeSystem, Tolerances};
use crate::error::KirchhoffError;
use crate::graph::{Endpoint, MetricGraph, VertexIncidence};
use crate::linalg::{Lu, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    /// Every characteristic enters the vertex; no conditions are imposed.
    Sink,
    /// Every characteristic leaves the vertex.
    Source,
    Transient,
}

impl VertexClass {
    pub fn name(self) -> &'static str {
        match self {
            VertexClass::Sink => "sink",
            VertexClass::Source => "source",
            VertexClass::Transient => "transient",
        }
    }
}

fn alpha_of(alpha: &[u8], edge: usize) -> u8 {
    alpha[edge]
}

pub fn classify_vertex(inc: &VertexIncidence, alpha: &[u8]) -> VertexClass {
    let sink = inc.incident.iter().all(|i| {
        matches!(
            (alpha_of(alpha, i.edge), i.end),
            (2, Endpoint::Head) | (0, Endpoint::Tail)
        )
    });
    let source = inc.incident.iter().all(|i| {
        matches!(
            (alpha_of(alpha, i.edge), i.end),
            (0, Endpoint::Head) | (2, Endpoint::Tail)
        )
    });
    if sink {
        VertexClass::Sink
    } else if source {
        VertexClass::Source
    } else {
        VertexClass::Transient
    }
}

/// `k_v = sum_j (2 (1 - alpha_j) l_j(v) + alpha_j)`.
pub fn count_outgoing(inc: &VertexIncidence, alpha: &[u8]) -> usize {
    let k: i64 = inc
        .incident
        .iter()
        .map(|i| {
            let a = i64::from(alpha_of(alpha, i.edge));
            let l = i.end.coordinate() as i64;
            2 * (1 - a) * l + a
        })
        .sum();
    k as usize
}

/// `k_v` from the partition of `J_v` by `alpha_j` and endpoint:
/// `|J^0_1| + 2|J^0_2| + |J^1_1| + 2|J^1_0|`.
pub fn count_outgoing_partition(inc: &VertexIncidence, alpha: &[u8]) -> usize {
    let count = |a: u8, end: Endpoint| {
        inc.incident
            .iter()
            .filter(|i| alpha_of(alpha, i.edge) == a && i.end == end)
            .count()
    };
    count(1, Endpoint::Tail)
        + 2 * count(2, Endpoint::Tail)
        + count(1, Endpoint::Head)
        + 2 * count(0, Endpoint::Head)
}

/// Whether component `c` of an edge with `alpha` positive eigenvalues
/// leaves the vertex at `end`.
pub fn is_outgoing(alpha: u8, component: Component, end: Endpoint) -> bool {
    let forward = component_is_forward(alpha, component);
    match end {
        Endpoint::Tail => forward,
        Endpoint::Head => !forward,
    }
}

/// `lambda+ > 0` iff `alpha >= 1`, `lambda- > 0` iff `alpha == 2`.
pub fn component_is_forward(alpha: u8, component: Component) -> bool {
    match component {
        Component::Plus => alpha >= 1,
        Component::Minus => alpha == 2,
    }
}

/// Outgoing flags `[u1, u2]` for each incident edge, in incidence order.
pub fn outgoing_mask(inc: &VertexIncidence, alpha: &[u8]) -> Vec<[bool; 2]> {
    inc.incident
        .iter()
        .map(|i| {
            let a = alpha_of(alpha, i.edge);
            [
                is_outgoing(a, Component::Plus, i.end),
                is_outgoing(a, Component::Minus, i.end),
            ]
        })
        .collect()
}

/// One Riemann invariant of one edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub edge: usize,
    pub component: Component,
    /// Positive eigenvalue: transported from `x = 0` towards `x = 1`.
    pub forward: bool,
}

impl Arc {
    /// Endpoint at which the arc's outgoing trace (the one fixed by the
    /// vertex conditions) sits.
    pub fn entry(&self) -> Endpoint {
        if self.forward {
            Endpoint::Tail
        } else {
            Endpoint::Head
        }
    }
}

/// Global arc numbering: forward arcs first, then backward arcs.
///
/// Forward: `u1` of edges with `alpha >= 1` by edge id, then `u2` of edges
/// with `alpha = 2`. Backward: `u1` of edges with `alpha = 0`, then `u2` of
/// edges with `alpha <= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcLayout {
    arcs: Vec<Arc>,
    forward: usize,
    index: Vec<[usize; 2]>,
}

impl ArcLayout {
    pub fn new(alpha: &[u8]) -> Self {
        let m = alpha.len();
        let mut arcs = Vec::with_capacity(2 * m);
        let mut push = |edge: usize, component: Component, forward: bool| {
            arcs.push(Arc {
                edge,
                component,
                forward,
            })
        };
        for (j, &a) in alpha.iter().enumerate() {
            if a >= 1 {
                push(j, Component::Plus, true);
            }
        }
        for (j, &a) in alpha.iter().enumerate() {
            if a == 2 {
                push(j, Component::Minus, true);
            }
        }
        for (j, &a) in alpha.iter().enumerate() {
            if a == 0 {
                push(j, Component::Plus, false);
            }
        }
        for (j, &a) in alpha.iter().enumerate() {
            if a <= 1 {
                push(j, Component::Minus, false);
            }
        }
        let forward = arcs.iter().filter(|a| a.forward).count();
        let mut index = vec![[0usize; 2]; m];
        for (k, arc) in arcs.iter().enumerate() {
            index[arc.edge][arc.component.index()] = k;
        }
        Self {
            arcs,
            forward,
            index,
        }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// `m+ = |J+|`.
    pub fn forward_count(&self) -> usize {
        self.forward
    }

    pub fn arc(&self, k: usize) -> Arc {
        self.arcs[k]
    }

    pub fn index_of(&self, edge: usize, component: Component) -> usize {
        self.index[edge][component.index()]
    }
}

/// Conditions `Phi_v p(v) = 0` at one vertex, split into outgoing and
/// incoming Riemann traces.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexCondition {
    pub vertex: usize,
    pub class: VertexClass,
    pub k: usize,
    /// `k_v x 2|J_v|`, columns `(p1^{j1}, p2^{j1}, p1^{j2}, ...)`.
    pub phi: Matrix,
    /// `Phi_v F(v)`, columns `(u1^{j1}, u2^{j1}, ...)`.
    pub psi: Matrix,
    /// `(edge, component)` of each column of `psi_out`.
    pub out_traces: Vec<(usize, Component)>,
    pub in_traces: Vec<(usize, Component)>,
    pub psi_out: Matrix,
    pub psi_in: Matrix,
    pub rcond: f64,
    /// Condition estimate after scaling every row of `psi_out` to unit
    /// max-norm.
    pub rcond_equilibrated: f64,
    /// `R_v = -psi_out^-1 psi_in`, when `psi_out` is nonsingular.
    pub resolution: Option<Matrix>,
}

impl VertexCondition {
    pub fn is_solvable(&self) -> bool {
        self.resolution.is_some()
    }

    /// Errors with [`KirchhoffError::LocallyUnsolvable`] unless solvable.
    pub fn require_solvable(&self) -> Result<&Self, KirchhoffError> {
        if self.is_solvable() {
            Ok(self)
        } else {
            Err(KirchhoffError::LocallyUnsolvable {
                vertex: self.vertex,
                rcond: self.rcond,
                rcond_equilibrated: self.rcond_equilibrated,
            })
        }
    }
}

/// Builds the vertex condition and rejects local unsolvability.
pub fn build_vertex_condition(
    inc: &VertexIncidence,
    systems: &[EdgeSystem],
    phi: &Matrix,
    tol: &Tolerances,
) -> Result<VertexCondition, KirchhoffError> {
    let vc = build_vertex_condition_lenient(inc, systems, phi, tol)?;
    vc.require_solvable()?;
    Ok(vc)
}

/// Builds the vertex condition; a singular `Phi_v F_out` is recorded
/// (`resolution = None`) instead of failing, so that global solvability can
/// still be tested.
pub fn build_vertex_condition_lenient(
    inc: &VertexIncidence,
    systems: &[EdgeSystem],
    phi: &Matrix,
    tol: &Tolerances,
) -> Result<VertexCondition, KirchhoffError> {
    let alpha: Vec<u8> = systems.iter().map(EdgeSystem::alpha).collect();
    let k = count_outgoing(inc, &alpha);
    let width = 2 * inc.valency();
    if phi.rows() != k {
        return Err(KirchhoffError::WrongRowCount {
            vertex: inc.vertex,
            rows: phi.rows(),
            expected: k,
        });
    }
    if phi.cols() != width {
        return Err(KirchhoffError::WrongColumnCount {
            vertex: inc.vertex,
            cols: phi.cols(),
            expected: width,
        });
    }

    // block-diagonal F(v)
    let mut fv = Matrix::zeros(width, width);
    for (b, i) in inc.incident.iter().enumerate() {
        let f = systems[i.edge].f_at_end(i.end.coordinate());
        for r in 0..2 {
            for c in 0..2 {
                fv[(2 * b + r, 2 * b + c)] = f[r][c];
            }
        }
    }
    let psi = phi.mul(&fv);

    let mut out_cols = Vec::new();
    let mut in_cols = Vec::new();
    let mut out_traces = Vec::new();
    let mut in_traces = Vec::new();
    for (b, (i, flags)) in inc
        .incident
        .iter()
        .zip(outgoing_mask(inc, &alpha))
        .enumerate()
    {
        for (c, component) in [Component::Plus, Component::Minus].into_iter().enumerate() {
            if flags[c] {
                out_cols.push(2 * b + c);
                out_traces.push((i.edge, component));
            } else {
                in_cols.push(2 * b + c);
                in_traces.push((i.edge, component));
            }
        }
    }
    let psi_out = psi.select_columns(&out_cols);
    let psi_in = psi.select_columns(&in_cols);

    let lu = Lu::factor(&psi_out);
    let rcond = lu.rcond();
    let rcond_equilibrated = Lu::factor(&psi_out.row_equilibrated()).rcond();
    let resolution = if lu.is_singular(tol.singular_rcond) {
        None
    } else {
        Some(lu.solve_matrix(&psi_in).scale(-1.0))
    };

    Ok(VertexCondition {
        vertex: inc.vertex,
        class: classify_vertex(inc, &alpha),
        k,
        phi: phi.clone(),
        psi,
        out_traces,
        in_traces,
        psi_out,
        psi_in,
        rcond,
        rcond_equilibrated,
        resolution,
    })
}

/// Boundary data of the reduced network problem.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalFlowMatrix {
    pub layout: ArcLayout,
    /// Coefficients of the outgoing traces `(upsilon(0), varpi(1))`.
    pub xi_out: Matrix,
    /// Coefficients of the incoming traces `(upsilon(1), varpi(0))`, moved to
    /// the right-hand side: `xi_out y_out = xi_in y_in`.
    pub xi_in: Matrix,
    pub b: Matrix,
    pub rcond: f64,
    /// `|lambda|` of every arc at the grid nodes.
    pub speeds: Vec<Vec<f64>>,
}

/// Which branch of the column-sum test on `|B|` holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnSumCase {
    /// All column sums `<= 1`: contraction in the `c`-norm.
    Case1,
    /// All column sums `>= 1`.
    Case2,
    /// Mixed.
    Case3,
}

impl ColumnSumCase {
    pub fn name(self) -> &'static str {
        match self {
            ColumnSumCase::Case1 => "case 1 (all column sums <= 1)",
            ColumnSumCase::Case2 => "case 2 (all column sums >= 1)",
            ColumnSumCase::Case3 => "case 3 (mixed column sums)",
        }
    }
}

/// Classifies column sums; ties at exactly 1 (within `1e-12`) count as
/// case 1.
pub fn classify_column_sums(sums: &[f64]) -> ColumnSumCase {
    const EPS: f64 = 1e-12;
    if sums.iter().all(|s| *s <= 1.0 + EPS) {
        ColumnSumCase::Case1
    } else if sums.iter().all(|s| *s >= 1.0 - EPS) {
        ColumnSumCase::Case2
    } else {
        ColumnSumCase::Case3
    }
}

impl GlobalFlowMatrix {
    /// Column sums of `|B|`, split as `b^{11}_j + b^{21}_j` for forward and
    /// `b^{12}_j + b^{22}_j` for backward columns.
    pub fn column_sums(&self) -> Vec<f64> {
        self.b.abs().column_sums()
    }

    pub fn column_sum_case(&self) -> ColumnSumCase {
        classify_column_sums(&self.column_sums())
    }
}

/// Stacks all vertex conditions into `xi_out`, `xi_in` and solves for `B`.
///
/// `conditions` holds one entry per vertex, in vertex order. Sinks carry an
/// empty `Phi_v`; their incoming traces get zero columns.
pub fn assemble_global(
    graph: &MetricGraph,
    systems: &[EdgeSystem],
    conditions: &[VertexCondition],
    tol: &Tolerances,
) -> Result<GlobalFlowMatrix, KirchhoffError> {
    let m = graph.edge_count();
    if systems.len() != m {
        return Err(KirchhoffError::EdgeCountMismatch {
            systems: systems.len(),
            edges: m,
        });
    }
    let total: usize = conditions.iter().map(|c| c.k).sum();
    if total != 2 * m {
        return Err(KirchhoffError::CountMismatch {
            total,
            expected: 2 * m,
        });
    }
    let alpha: Vec<u8> = systems.iter().map(EdgeSystem::alpha).collect();
    let layout = ArcLayout::new(&alpha);

    let n = 2 * m;
    let mut xi_out = Matrix::zeros(n, n);
    let mut xi_in = Matrix::zeros(n, n);
    let mut row = 0;
    for vc in conditions {
        let inc = graph.incidence(vc.vertex)?;
        let mask = outgoing_mask(inc, &alpha);
        for r in 0..vc.k {
            for (b, i) in inc.incident.iter().enumerate() {
                for component in [Component::Plus, Component::Minus] {
                    let c = component.index();
                    let arc = layout.index_of(i.edge, component);
                    let value = vc.psi[(r, 2 * b + c)];
                    if mask[b][c] {
                        xi_out[(row + r, arc)] += value;
                    } else {
                        xi_in[(row + r, arc)] -= value;
                    }
                }
            }
        }
        row += vc.k;
    }

    let lu = Lu::factor(&xi_out);
    let rcond = lu.rcond();
    if lu.is_singular(tol.singular_rcond) {
        return Err(KirchhoffError::GloballyUnsolvable { rcond });
    }
    let b = lu.solve_matrix(&xi_in);
    let speeds = layout
        .arcs()
        .iter()
        .map(|a| systems[a.edge].speed(a.component))
        .collect();
    Ok(GlobalFlowMatrix {
        layout,
        xi_out,
        xi_in,
        b,
        rcond,
        speeds,
    })
}

/// `B` assembled from the local resolutions `R_v` alone; `None` if some
/// vertex is locally unsolvable.
pub fn stack_local_resolutions(
    layout: &ArcLayout,
    conditions: &[VertexCondition],
) -> Option<Matrix> {
    let n = layout.len();
    let mut b = Matrix::zeros(n, n);
    for vc in conditions {
        let r = vc.resolution.as_ref()?;
        for (i, &(e_out, c_out)) in vc.out_traces.iter().enumerate() {
            let row = layout.index_of(e_out, c_out);
            for (j, &(e_in, c_in)) in vc.in_traces.iter().enumerate() {
                b[(row, layout.index_of(e_in, c_in))] += r[(i, j)];
            }
        }
    }
    Some(b)
}
