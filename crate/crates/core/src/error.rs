use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge list is empty")]
    Empty,
    #[error("edge {edge} is a self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {second} repeats the vertex pair of edge {first}")]
    DuplicateEdge { first: usize, second: usize },
    #[error(
        "graph is disconnected; vertices {unreached:?} are not reachable from the first vertex"
    )]
    Disconnected { unreached: Vec<usize> },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EdgeError {
    #[error("edge {edge}: not strictly hyperbolic at x = {x} (discriminant {discriminant:e})")]
    NotStrictlyHyperbolic {
        edge: usize,
        x: f64,
        discriminant: f64,
    },
    #[error("edge {edge}: eigenvalue {eigenvalue:e} at x = {x} is numerically zero")]
    ZeroEigenvalue {
        edge: usize,
        x: f64,
        eigenvalue: f64,
    },
    #[error("edge {edge}: eigenvalue {branch} changes sign along the edge")]
    SignChange { edge: usize, branch: &'static str },
    #[error("edge {edge}: tabulated coefficient needs at least 3 samples, got {samples}")]
    TooFewSamples { edge: usize, samples: usize },
    #[error("edge {edge}: eigenvector matrix is degenerate at x = {x} (det {det:e})")]
    DegenerateEigenvectors { edge: usize, x: f64, det: f64 },
    #[error("edge {edge}: supplied eigenvectors do not diagonalize M at x = {x} (residual {residual:e})")]
    BadEigenvectorOverride { edge: usize, x: f64, residual: f64 },
    #[error("edge {edge}: grid must have at least 2 intervals, got {grid}")]
    BadGrid { edge: usize, grid: usize },
    #[error("edge {edge}: non-finite coefficient")]
    NonFinite { edge: usize },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KirchhoffError {
    #[error("vertex {vertex}: {rows} condition rows supplied, {expected} outgoing values must be determined")]
    WrongRowCount {
        vertex: usize,
        rows: usize,
        expected: usize,
    },
    #[error(
        "vertex {vertex}: condition rows have {cols} columns, expected 2 x valency = {expected}"
    )]
    WrongColumnCount {
        vertex: usize,
        cols: usize,
        expected: usize,
    },
    #[error("vertex {vertex}: conditions do not determine the outgoing values (rcond {rcond:e}, row-equilibrated {rcond_equilibrated:e})")]
    LocallyUnsolvable {
        vertex: usize,
        rcond: f64,
        rcond_equilibrated: f64,
    },
    #[error("global outgoing matrix is singular (rcond {rcond:e})")]
    GloballyUnsolvable { rcond: f64 },
    #[error("number of conditions {total} differs from 2m = {expected}")]
    CountMismatch { total: usize, expected: usize },
    #[error("no vertex condition given for vertex {0}")]
    MissingCondition(usize),
    #[error("vertex {0} has more than one condition block")]
    DuplicateCondition(usize),
    #[error("edge systems do not match the graph ({systems} systems for {edges} edges)")]
    EdgeCountMismatch { systems: usize, edges: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("arc {arc}: speed {speed:e} at node {node} is not positive")]
    NonpositiveSpeed { arc: usize, node: usize, speed: f64 },
    #[error("step {t} exceeds the explicit window T = {window}")]
    WindowExceeded { t: f64, window: f64 },
    #[error("flow matrix is {rows}x{cols} but there are {arcs} arcs")]
    MatrixShape {
        rows: usize,
        cols: usize,
        arcs: usize,
    },
    #[error("forward arcs must precede backward arcs")]
    ArcOrder,
    #[error("arc {arc} has {len} samples, expected {expected}")]
    SampleCount {
        arc: usize,
        len: usize,
        expected: usize,
    },
    #[error("state contains a non-finite value on arc {arc}")]
    NonFinite { arc: usize },
    #[error("norm exponent must satisfy 1 <= p < inf, got {0}")]
    BadExponent(f64),
    #[error("requested time {0} is negative or not finite")]
    BadTime(f64),
    #[error("output times must be nondecreasing and not before the state time")]
    OutputOrder,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResolventError {
    #[error("boundary matrix I - B E(0,1) is singular at lambda = {lambda} (rcond {rcond:e})")]
    SingularBoundaryMatrix { lambda: f64, rcond: f64 },
    #[error("lambda = {lambda} with travel time {travel_time} overflows the exponential weights")]
    ExponentRange { lambda: f64, travel_time: f64 },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("coefficient {name} = {value} must be positive")]
    BadCoefficient { name: &'static str, value: f64 },
    #[error("Froude number {froude} <= 1: flow is not supercritical")]
    Subcritical { froude: f64 },
    #[error("star needs at least 2 edges, got {0}")]
    TooFewEdges(usize),
    #[error("basis vectors are not mutually orthogonal (dot product {dot:e})")]
    NotOrthogonal { dot: f64 },
    #[error("basis dimensions do not fit a vertex of valency {valency}")]
    WrongDimensions { valency: usize },
    #[error("unknown scenario {0:?}")]
    Unknown(alloc::string::String),
}

/// Any failure raised while assembling or running a network model.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Edge(#[from] EdgeError),
    #[error(transparent)]
    Kirchhoff(#[from] KirchhoffError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Failure of the pointwise 2x2 eigen-decomposition.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error("not strictly hyperbolic (discriminant {discriminant:e})")]
    NotStrictlyHyperbolic { discriminant: f64 },
    #[error("eigenvalue {eigenvalue:e} is numerically zero")]
    ZeroEigenvalue { eigenvalue: f64 },
}
