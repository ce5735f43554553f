//! Built-in model constructors: telegraph and random-walk edges, the
//! one-edge wave line, the supercritical Saint-Venant star and the
//! Nicaise-type star, together with machine-checkable expected facts.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::edge::{Component, EdgeSpec, Tolerances};
use crate::error::{Error, ScenarioError};
use crate::flow::NetworkState;
use crate::graph::VertexIncidence;
use crate::kirchhoff::{ColumnSumCase, VertexClass};
use crate::linalg::{mat2_max_abs, mat2_sub, Mat2, Matrix};
use crate::network::Network;
use crate::resolvent::ResolventWorkspace;

/// Names accepted by [`by_name`].
pub const BUILTIN: [&str; 6] = [
    "telegraph-dirichlet",
    "telegraph-mixed",
    "absorbing-edge",
    "saint-venant-star",
    "random-walk",
    "nicaise-star",
];

/// Scalar initial-data generator on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Zero,
    Constant(f64),
    /// `offset + amplitude * sin(pi * frequency * x + phase)`.
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        offset: f64,
    },
    /// `height * cos^2(pi (x - center) / (2 width))` on `|x - center| < width`.
    Bump {
        center: f64,
        width: f64,
        height: f64,
    },
}

impl Profile {
    pub fn sine(amplitude: f64, frequency: f64) -> Self {
        Profile::Sine {
            amplitude,
            frequency,
            phase: 0.0,
            offset: 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant(c) => c,
            Profile::Sine {
                amplitude,
                frequency,
                phase,
                offset,
            } => offset + amplitude * libm::sin(PI * frequency * x + phase),
            Profile::Bump {
                center,
                width,
                height,
            } => {
                let d = x - center;
                if d.abs() >= width {
                    0.0
                } else {
                    let c = libm::cos(PI * d / (2.0 * width));
                    height * c * c
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSettings {
    /// Cells per edge, shared by all edges.
    pub grid: usize,
    pub t_end: f64,
    /// Output times; empty means `t = 0` and `t_end` only.
    pub output_times: Vec<f64>,
    pub p_exponents: Vec<f64>,
    /// Whether the lower-order coupling `N-bar` is applied.
    pub coupling: bool,
    /// Largest propagation step; defaults to the window.
    pub max_step: Option<f64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            grid: 256,
            t_end: 1.0,
            output_times: Vec::new(),
            p_exponents: vec![1.0, 2.0],
            coupling: true,
            max_step: None,
        }
    }
}

impl SolverSettings {
    /// Output times, always including 0 and ending at `t_end`.
    pub fn times(&self) -> Vec<f64> {
        if self.output_times.is_empty() {
            if self.t_end > 0.0 {
                vec![0.0, self.t_end]
            } else {
                vec![0.0]
            }
        } else {
            self.output_times.clone()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResolventSettings {
    pub lambdas: Vec<f64>,
    /// Horizon of the Laplace-transform comparison; `None` disables it.
    pub laplace_t_max: Option<f64>,
}

/// Assertion about quantities the engine computes for a scenario.
#[derive(Clone, Debug, PartialEq)]
pub enum Fact {
    OutgoingCount {
        vertex: usize,
        k: usize,
    },
    Class {
        vertex: usize,
        class: VertexClass,
    },
    LocallySolvable {
        vertex: usize,
        solvable: bool,
    },
    TotalConditions(usize),
    GloballySolvable(bool),
    Alpha {
        edge: usize,
        alpha: u8,
    },
    /// Eigenvalues at `x = 0`.
    Eigenvalues {
        edge: usize,
        plus: f64,
        minus: f64,
    },
    /// `N-bar` at node 0.
    LowerOrder {
        edge: usize,
        matrix: Mat2,
    },
    FlowMatrix(Vec<Vec<f64>>),
    ColumnSums(Vec<f64>),
    Case(ColumnSumCase),
    ResolventSolvable {
        lambda: f64,
        solvable: bool,
    },
}

const FACT_TOL: f64 = 1e-12;

impl Fact {
    pub fn describe(&self) -> String {
        match self {
            Fact::OutgoingCount { vertex, k } => format!("k at vertex {vertex} is {k}"),
            Fact::Class { vertex, class } => format!("vertex {vertex} is a {}", class.name()),
            Fact::LocallySolvable { vertex, solvable } => {
                format!("vertex {vertex} locally solvable: {solvable}")
            }
            Fact::TotalConditions(n) => format!("total number of conditions is {n}"),
            Fact::GloballySolvable(s) => format!("globally solvable: {s}"),
            Fact::Alpha { edge, alpha } => format!("edge {edge} has alpha = {alpha}"),
            Fact::Eigenvalues { edge, plus, minus } => {
                format!("edge {edge} eigenvalues ({plus}, {minus})")
            }
            Fact::LowerOrder { edge, matrix } => format!("edge {edge} N-bar = {matrix:?}"),
            Fact::FlowMatrix(b) => format!("B = {b:?}"),
            Fact::ColumnSums(s) => format!("|B| column sums {s:?}"),
            Fact::Case(c) => format!("column sums fall in {}", c.name()),
            Fact::ResolventSolvable { lambda, solvable } => {
                format!("resolvent at lambda = {lambda} solvable: {solvable}")
            }
        }
    }

    pub fn holds(&self, net: &Network) -> bool {
        let report = net.check();
        let close = |a: f64, b: f64| (a - b).abs() <= FACT_TOL * (1.0 + b.abs());
        match self {
            Fact::OutgoingCount { vertex, k } => report.vertex(*vertex).is_some_and(|v| v.k == *k),
            Fact::Class { vertex, class } => {
                report.vertex(*vertex).is_some_and(|v| v.class == *class)
            }
            Fact::LocallySolvable { vertex, solvable } => report
                .vertex(*vertex)
                .is_some_and(|v| v.solvable == *solvable),
            Fact::TotalConditions(n) => report.total_conditions == *n,
            Fact::GloballySolvable(s) => report.is_solvable() == *s,
            Fact::Alpha { edge, alpha } => report.alpha.get(*edge) == Some(alpha),
            Fact::Eigenvalues { edge, plus, minus } => net.systems().get(*edge).is_some_and(|s| {
                close(s.eigenvalues(Component::Plus)[0], *plus)
                    && close(s.eigenvalues(Component::Minus)[0], *minus)
            }),
            Fact::LowerOrder { edge, matrix } => net.systems().get(*edge).is_some_and(|s| {
                mat2_max_abs(&mat2_sub(&s.lower_order_at_node(0), matrix)) <= FACT_TOL
            }),
            Fact::FlowMatrix(rows) => report.b.as_ref().is_some_and(|b| {
                b.rows() == rows.len()
                    && rows.iter().enumerate().all(|(i, r)| {
                        r.len() == b.cols()
                            && r.iter().enumerate().all(|(j, v)| close(b[(i, j)], *v))
                    })
            }),
            Fact::ColumnSums(s) => {
                report.column_sums.len() == s.len()
                    && report.column_sums.iter().zip(s).all(|(a, b)| close(*a, *b))
            }
            Fact::Case(c) => report.case == Some(*c),
            Fact::ResolventSolvable { lambda, solvable } => match net.transport() {
                Ok(tr) => ResolventWorkspace::new(&tr, *lambda, net.tolerances())
                    .is_ok_and(|ws| ws.is_solvable() == *solvable),
                Err(_) => false,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactOutcome {
    pub description: String,
    pub holds: bool,
}

/// A complete, runnable model description.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub edges: Vec<(usize, usize)>,
    pub specs: Vec<EdgeSpec>,
    /// Condition rows per vertex label; sinks are omitted.
    pub conditions: BTreeMap<usize, Matrix>,
    /// `(p1, p2)` initial profiles per edge.
    pub initial: Vec<[Profile; 2]>,
    pub solver: SolverSettings,
    pub resolvent: ResolventSettings,
    pub facts: Vec<Fact>,
}

impl Scenario {
    pub fn network(&self, tol: &Tolerances) -> Result<Network, Error> {
        Network::build(
            &self.edges,
            &self.specs,
            &self.conditions,
            self.solver.grid,
            tol,
        )
    }

    /// Nodal `(p1, p2)` per edge sampled from the initial profiles.
    pub fn initial_fields(&self) -> Vec<Vec<[f64; 2]>> {
        let g = self.solver.grid;
        self.initial
            .iter()
            .map(|[a, b]| {
                (0..=g)
                    .map(|i| {
                        let x = i as f64 / g as f64;
                        [a.eval(x), b.eval(x)]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn initial_state(&self, net: &Network) -> NetworkState {
        net.state_from_fields(&self.initial_fields())
    }

    pub fn check_facts(&self, net: &Network) -> Vec<FactOutcome> {
        self.facts
            .iter()
            .map(|f| FactOutcome {
                description: f.describe(),
                holds: f.holds(net),
            })
            .collect()
    }
}

/// Looks up a built-in scenario with its default parameters.
pub fn by_name(name: &str) -> Result<Scenario, ScenarioError> {
    match name {
        "telegraph-dirichlet" => Ok(telegraph_dirichlet()),
        "telegraph-mixed" => Ok(telegraph_mixed()),
        "absorbing-edge" => Ok(absorbing_edge()),
        "saint-venant-star" => build_saint_venant_star(3, 2.0, 1.0, 1.0),
        "random-walk" => random_walk_network(1.0, 1.0),
        "nicaise-star" => nicaise_star(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]),
        other => Err(ScenarioError::Unknown(other.to_string())),
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, ScenarioError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ScenarioError::BadCoefficient { name, value })
    }
}

/// `M = [[0, K], [L, 0]]`, eigenvalues `+-sqrt(LK)`. With
/// `paper_normalization` the eigenvectors are `[[K, K], [sqrt(LK), -sqrt(LK)]]`.
pub fn build_telegraph_edge(
    k: f64,
    l: f64,
    paper_normalization: bool,
) -> Result<EdgeSpec, ScenarioError> {
    let k = positive("K", k)?;
    let l = positive("L", l)?;
    let spec = EdgeSpec::constant([[0.0, k], [l, 0.0]]);
    Ok(if paper_normalization {
        let s = libm::sqrt(l * k);
        spec.with_eigenvectors([[k, k], [s, -s]])
    } else {
        spec
    })
}

/// `M = [[0, gamma], [gamma, 0]]`, `N = [[0, 0], [0, 2 rate]]`.
pub fn build_random_walk_edge(gamma: f64, rate: f64) -> Result<EdgeSpec, ScenarioError> {
    let gamma = positive("gamma", gamma)?;
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(ScenarioError::BadCoefficient {
            name: "rate",
            value: rate,
        });
    }
    let spec = EdgeSpec::constant([[0.0, gamma], [gamma, 0.0]]);
    Ok(if rate == 0.0 {
        spec
    } else {
        spec.with_lower_order([[0.0, 0.0], [0.0, 2.0 * rate]])
    })
}

/// Linearized Saint-Venant edge `M = [[V, H], [g, V]]` with eigenvectors
/// `[[H, H], [sqrt(gH), -sqrt(gH)]]`; requires Froude number `> 1`.
pub fn saint_venant_edge(v: f64, h: f64, g: f64) -> Result<EdgeSpec, ScenarioError> {
    let h = positive("H", h)?;
    let g = positive("g", g)?;
    let c = libm::sqrt(g * h);
    let froude = v / c;
    if !(froude > 1.0) {
        return Err(ScenarioError::Subcritical { froude });
    }
    Ok(EdgeSpec::constant([[v, h], [g, v]]).with_eigenvectors([[h, h], [c, -c]]))
}

/// One-edge wave system `p1_t = p2_x`, `p2_t = p1_x`.
pub fn wave_edge() -> EdgeSpec {
    EdgeSpec::constant([[0.0, -1.0], [-1.0, 0.0]])
}

/// Exterior Dirichlet row `p2 = 0`.
pub fn exterior_dirichlet() -> Matrix {
    Matrix::from_rows(&[[0.0, 1.0]])
}

/// Exterior dissipative row `p1 = alpha * nu * p2`, `alpha >= 0`.
pub fn exterior_dissipative(alpha: f64, nu: f64) -> Result<Matrix, ScenarioError> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(ScenarioError::BadCoefficient {
            name: "alpha",
            value: alpha,
        });
    }
    Ok(Matrix::from_rows(&[[1.0, -alpha * nu]]))
}

/// Rows `(0, nu^j phi^j)` for each basis vector of `X_v`, then `(phi^j, 0)`
/// for each basis vector of its complement. Columns follow `inc`.
pub fn build_nicaise_conditions(
    inc: &VertexIncidence,
    x_basis: &[Vec<f64>],
    x_perp_basis: &[Vec<f64>],
) -> Result<Matrix, ScenarioError> {
    let n = inc.valency();
    let bad = ScenarioError::WrongDimensions { valency: n };
    if x_basis.len() + x_perp_basis.len() != n
        || x_basis.iter().chain(x_perp_basis).any(|v| v.len() != n)
    {
        return Err(bad);
    }
    for a in x_basis {
        for b in x_perp_basis {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na = libm::sqrt(a.iter().map(|x| x * x).sum());
            let nb = libm::sqrt(b.iter().map(|x| x * x).sum());
            if dot.abs() > 1e-12 * na * nb {
                return Err(ScenarioError::NotOrthogonal { dot });
            }
        }
    }
    let mut phi = Matrix::zeros(n, 2 * n);
    for (r, v) in x_basis.iter().enumerate() {
        for (c, item) in inc.incident.iter().enumerate() {
            phi[(r, 2 * c + 1)] = item.end.orientation() * v[c];
        }
    }
    for (r, v) in x_perp_basis.iter().enumerate() {
        for c in 0..n {
            phi[(x_basis.len() + r, 2 * c)] = v[c];
        }
    }
    Ok(phi)
}

/// Orthogonal basis of the complement of `(1, ..., 1)` in `R^n`.
pub fn helmert_basis(n: usize) -> Vec<Vec<f64>> {
    (1..n)
        .map(|r| {
            let mut v = vec![0.0; n];
            for x in v.iter_mut().take(r) {
                *x = 1.0;
            }
            v[r] = -(r as f64);
            v
        })
        .collect()
}

/// The two flux functionals on the `p2` traces at a vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct KmnComparison {
    /// `sum_j nu^j p2^j`.
    pub kirchhoff: Vec<f64>,
    /// `sum_j nu^j K^j L^j p2^j`.
    pub weighted: Vec<f64>,
    /// Largest relative 2x2 minor of the stacked functionals.
    pub max_minor: f64,
    pub coincide: bool,
}

/// Compares the plain and the `KL`-weighted flux conditions at a vertex with
/// continuity of `p1`. Both have the same kernel iff the functionals are
/// parallel.
pub fn compare_kmn_kirchhoff(k: &[f64], l: &[f64], nu: &[f64]) -> KmnComparison {
    let kirchhoff: Vec<f64> = nu.to_vec();
    let weighted: Vec<f64> = nu
        .iter()
        .zip(k.iter().zip(l))
        .map(|(n, (k, l))| n * k * l)
        .collect();
    let scale_a = kirchhoff.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale_b = weighted.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = (scale_a * scale_b).max(f64::MIN_POSITIVE);
    let mut max_minor = 0.0f64;
    for i in 0..nu.len() {
        for j in i + 1..nu.len() {
            let m = kirchhoff[i] * weighted[j] - kirchhoff[j] * weighted[i];
            max_minor = max_minor.max(m.abs() / scale);
        }
    }
    KmnComparison {
        kirchhoff,
        weighted,
        max_minor,
        coincide: max_minor <= 1e-12,
    }
}

fn wave_line(
    name: &str,
    head_row: [f64; 2],
    b: Vec<Vec<f64>>,
    lambdas: Vec<f64>,
    facts: Vec<Fact>,
) -> Scenario {
    let mut conditions = BTreeMap::new();
    conditions.insert(0, Matrix::from_rows(&[[1.0, 0.0]]));
    conditions.insert(1, Matrix::from_rows(&[head_row]));
    let mut all = vec![
        Fact::Alpha { edge: 0, alpha: 1 },
        Fact::Eigenvalues {
            edge: 0,
            plus: 1.0,
            minus: -1.0,
        },
        Fact::TotalConditions(2),
        Fact::GloballySolvable(true),
        Fact::ColumnSums(vec![1.0, 1.0]),
        Fact::Case(ColumnSumCase::Case1),
        Fact::FlowMatrix(b),
    ];
    all.extend(facts);
    Scenario {
        name: name.to_string(),
        edges: vec![(0, 1)],
        specs: vec![wave_edge()],
        conditions,
        initial: vec![[Profile::sine(1.0, 1.0), Profile::Zero]],
        solver: SolverSettings {
            grid: 256,
            t_end: 2.0,
            output_times: (0..=8).map(|i| i as f64 * 0.25).collect(),
            p_exponents: vec![1.0, 2.0],
            coupling: false,
            max_step: None,
        },
        resolvent: ResolventSettings {
            lambdas,
            laplace_t_max: None,
        },
        facts: all,
    }
}

/// Wave edge with `p1(0) = p1(1) = 0`.
pub fn telegraph_dirichlet() -> Scenario {
    wave_line(
        "telegraph-dirichlet",
        [1.0, 0.0],
        vec![vec![0.0, -1.0], vec![-1.0, 0.0]],
        vec![-1.0, -0.1, 0.0, 0.1, 1.0],
        vec![
            Fact::ResolventSolvable {
                lambda: 0.0,
                solvable: false,
            },
            Fact::ResolventSolvable {
                lambda: 1.0,
                solvable: true,
            },
            Fact::ResolventSolvable {
                lambda: -1.0,
                solvable: true,
            },
        ],
    )
}

/// Wave edge with `p1(0) = p2(1) = 0`.
pub fn telegraph_mixed() -> Scenario {
    wave_line(
        "telegraph-mixed",
        [0.0, 1.0],
        vec![vec![0.0, -1.0], vec![1.0, 0.0]],
        vec![-1.0, 0.0, 1.0],
        vec![Fact::ResolventSolvable {
            lambda: 0.0,
            solvable: true,
        }],
    )
}

/// Wave edge with transparent ends `p1 = p2` at the tail and `p1 = -p2` at
/// the head, so `B = 0` and everything leaves after one transit.
pub fn absorbing_edge() -> Scenario {
    let mut conditions = BTreeMap::new();
    conditions.insert(0, Matrix::from_rows(&[[1.0, -1.0]]));
    conditions.insert(1, Matrix::from_rows(&[[1.0, 1.0]]));
    Scenario {
        name: "absorbing-edge".to_string(),
        edges: vec![(0, 1)],
        specs: vec![wave_edge()],
        conditions,
        initial: vec![[Profile::sine(1.0, 1.0), Profile::Zero]],
        solver: SolverSettings {
            grid: 256,
            t_end: 1.5,
            output_times: (0..=6).map(|i| i as f64 * 0.25).collect(),
            p_exponents: vec![1.0],
            coupling: false,
            max_step: None,
        },
        resolvent: ResolventSettings {
            lambdas: vec![1.0, 5.0],
            laplace_t_max: Some(20.0),
        },
        facts: vec![
            Fact::GloballySolvable(true),
            Fact::FlowMatrix(vec![vec![0.0, 0.0], vec![0.0, 0.0]]),
            Fact::ColumnSums(vec![0.0, 0.0]),
            Fact::Case(ColumnSumCase::Case1),
            Fact::ResolventSolvable {
                lambda: 1.0,
                solvable: true,
            },
        ],
    }
}

/// Star with inflow edge `e1 = (v0, v1)` and outflow edges `(v1, vj)`,
/// `j = 2..=n`. Vertex labels are `0..=n`.
pub fn build_saint_venant_star(
    n: usize,
    v: f64,
    h: f64,
    g: f64,
) -> Result<Scenario, ScenarioError> {
    build_saint_venant_star_with(n, v, h, g, Matrix::identity(2))
}

/// As [`build_saint_venant_star`] with explicit rows at `v0`.
pub fn build_saint_venant_star_with(
    n: usize,
    v: f64,
    h: f64,
    g: f64,
    v0_rows: Matrix,
) -> Result<Scenario, ScenarioError> {
    if n < 2 {
        return Err(ScenarioError::TooFewEdges(n));
    }
    let spec = saint_venant_edge(v, h, g)?;
    let mut edges = vec![(0, 1)];
    edges.extend((2..=n).map(|j| (1, j)));

    // Incidence at v1 lists edges in id order: e1 (head) first.
    let mut centre = Matrix::zeros(2 * n - 2, 2 * n);
    for j in 1..n {
        for c in 0..2 {
            let r = 2 * (j - 1) + c;
            centre[(r, 2 * j + c)] = 1.0;
            centre[(r, c)] = -1.0;
        }
    }
    let mut conditions = BTreeMap::new();
    conditions.insert(0, v0_rows);
    conditions.insert(1, centre);

    let c = libm::sqrt(g * h);
    let mut facts = vec![
        Fact::OutgoingCount { vertex: 0, k: 2 },
        Fact::Class {
            vertex: 0,
            class: VertexClass::Source,
        },
        Fact::OutgoingCount {
            vertex: 1,
            k: 2 * n - 2,
        },
        Fact::TotalConditions(2 * n),
        Fact::GloballySolvable(true),
        Fact::Eigenvalues {
            edge: 0,
            plus: v + c,
            minus: v - c,
        },
        Fact::Alpha { edge: 0, alpha: 2 },
    ];
    for j in 2..=n {
        facts.push(Fact::OutgoingCount { vertex: j, k: 0 });
        facts.push(Fact::Class {
            vertex: j,
            class: VertexClass::Sink,
        });
    }
    let mut initial = vec![[Profile::Zero, Profile::Zero]; n];
    initial[0] = [
        Profile::Bump {
            center: 0.5,
            width: 0.25,
            height: 0.1,
        },
        Profile::Zero,
    ];
    Ok(Scenario {
        name: "saint-venant-star".to_string(),
        edges,
        specs: vec![spec; n],
        conditions,
        initial,
        solver: SolverSettings {
            grid: 128,
            t_end: 1.0,
            output_times: (0..=4).map(|i| i as f64 * 0.25).collect(),
            p_exponents: vec![1.0],
            coupling: false,
            max_step: None,
        },
        resolvent: ResolventSettings {
            lambdas: vec![1.0],
            laplace_t_max: None,
        },
        facts,
    })
}

/// Two random-walk edges in a path with zero flux at the ends and
/// continuity of `p1` and `p2` at the middle vertex.
pub fn random_walk_network(gamma: f64, rate: f64) -> Result<Scenario, ScenarioError> {
    let spec = build_random_walk_edge(gamma, rate)?;
    let mut conditions = BTreeMap::new();
    conditions.insert(0, exterior_dirichlet());
    conditions.insert(
        1,
        Matrix::from_rows(&[[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]]),
    );
    conditions.insert(2, exterior_dirichlet());
    let wave = |phase: f64| {
        [
            Profile::Sine {
                amplitude: 0.5,
                frequency: 0.5,
                phase: phase + PI / 2.0,
                offset: 1.0,
            },
            Profile::Sine {
                amplitude: 0.3,
                frequency: 0.5,
                phase,
                offset: 0.0,
            },
        ]
    };
    let mut facts = vec![
        Fact::TotalConditions(4),
        Fact::GloballySolvable(true),
        Fact::Eigenvalues {
            edge: 0,
            plus: gamma,
            minus: -gamma,
        },
    ];
    if rate > 0.0 {
        facts.push(Fact::LowerOrder {
            edge: 0,
            matrix: [[rate, -rate], [-rate, rate]],
        });
    }
    Ok(Scenario {
        name: "random-walk".to_string(),
        edges: vec![(0, 1), (1, 2)],
        specs: vec![spec.clone(), spec],
        conditions,
        initial: vec![wave(0.0), wave(PI / 2.0)],
        solver: SolverSettings {
            grid: 256,
            t_end: 4.0,
            output_times: (0..=16).map(|i| i as f64 * 0.25).collect(),
            p_exponents: vec![1.0],
            coupling: true,
            max_step: Some(1.0 / 32.0),
        },
        resolvent: ResolventSettings {
            lambdas: vec![1.0],
            laplace_t_max: None,
        },
        facts,
    })
}

/// Telegraph star with centre `0` and leaves `1..=n`: continuity of `p1` and
/// zero net flux at the centre, `p2 = 0` at the leaves.
pub fn nicaise_star(k: &[f64], l: &[f64]) -> Result<Scenario, ScenarioError> {
    let n = k.len();
    if n < 2 {
        return Err(ScenarioError::TooFewEdges(n));
    }
    if l.len() != n {
        return Err(ScenarioError::WrongDimensions { valency: n });
    }
    let specs = k
        .iter()
        .zip(l)
        .map(|(k, l)| build_telegraph_edge(*k, *l, true))
        .collect::<Result<Vec<_>, _>>()?;
    let edges: Vec<(usize, usize)> = (1..=n).map(|j| (0, j)).collect();
    let graph = crate::graph::MetricGraph::build(&edges).expect("star graph");
    let inc = graph.incidence(0).expect("centre vertex");
    let centre = build_nicaise_conditions(inc, &[vec![1.0; n]], &helmert_basis(n))?;
    let mut conditions = BTreeMap::new();
    conditions.insert(0, centre);
    for j in 1..=n {
        conditions.insert(j, exterior_dirichlet());
    }
    let mut initial = vec![[Profile::Zero, Profile::Zero]; n];
    initial[0] = [
        Profile::Bump {
            center: 0.5,
            width: 0.25,
            height: 1.0,
        },
        Profile::Zero,
    ];
    Ok(Scenario {
        name: "nicaise-star".to_string(),
        edges,
        specs,
        conditions,
        initial,
        solver: SolverSettings {
            grid: 128,
            t_end: 2.0,
            output_times: (0..=8).map(|i| i as f64 * 0.25).collect(),
            p_exponents: vec![1.0, 2.0],
            coupling: false,
            max_step: None,
        },
        resolvent: ResolventSettings {
            lambdas: vec![1.0],
            laplace_t_max: None,
        },
        facts: vec![
            Fact::OutgoingCount { vertex: 0, k: n },
            Fact::LocallySolvable {
                vertex: 0,
                solvable: true,
            },
            Fact::TotalConditions(2 * n),
            Fact::GloballySolvable(true),
        ],
    })
}
