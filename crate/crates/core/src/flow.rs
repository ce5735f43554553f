//! Explicit characteristic propagator for the diagonal network system
//!
//! ```text
//! d_t upsilon_j + c_j d_x upsilon_j = 0   (forward arcs)
//! d_t varpi_j   - c_j d_x varpi_j   = 0   (backward arcs)
//! (upsilon(0), varpi(1)) = B (upsilon(1), varpi(0))
//! ```
//!
//! Within one window `t <= T = min_j T_j` every value is either a shifted
//! initial value or a combination of incoming boundary traces, so a step is
//! exact up to the linear interpolation of off-grid reads.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::FlowError;
use crate::linalg::{mat2_apply, mat2_expm, mat2_scale, Mat2, Matrix};
use crate::quad::{self, FirstCell};

/// Travel times `L_j(x) = int_0^x dz / c_j(z)` of every arc with a monotone
/// cubic inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct TravelTimeMap {
    grid: usize,
    times: Vec<Vec<f64>>,
    /// Hermite slopes `(left, right)` per interval after monotone limiting.
    slopes: Vec<Vec<(f64, f64)>>,
}

impl TravelTimeMap {
    pub fn new(speeds: &[Vec<f64>]) -> Result<Self, FlowError> {
        let grid = speeds.first().map_or(0, |s| s.len().saturating_sub(1));
        let h = 1.0 / grid as f64;
        let mut times = Vec::with_capacity(speeds.len());
        let mut slopes = Vec::with_capacity(speeds.len());
        for (arc, c) in speeds.iter().enumerate() {
            if c.len() != grid + 1 {
                return Err(FlowError::SampleCount {
                    arc,
                    len: c.len(),
                    expected: grid + 1,
                });
            }
            if let Some((node, &speed)) = c
                .iter()
                .enumerate()
                .find(|(_, s)| !(**s > 0.0) || !s.is_finite())
            {
                return Err(FlowError::NonpositiveSpeed { arc, node, speed });
            }
            let inv: Vec<f64> = c.iter().map(|s| 1.0 / s).collect();
            let l = quad::cumulative(&inv, h, FirstCell::Quadratic);
            let s = (0..grid)
                .map(|i| {
                    let delta = (l[i + 1] - l[i]) / h;
                    let (a, b) = (inv[i] / delta, inv[i + 1] / delta);
                    let r = a * a + b * b;
                    if r > 9.0 {
                        let tau = 3.0 / libm::sqrt(r);
                        (tau * a * delta, tau * b * delta)
                    } else {
                        (inv[i], inv[i + 1])
                    }
                })
                .collect();
            times.push(l);
            slopes.push(s);
        }
        Ok(Self {
            grid,
            times,
            slopes,
        })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn arc_count(&self) -> usize {
        self.times.len()
    }

    /// `L_j` at the grid nodes.
    pub fn times(&self, arc: usize) -> &[f64] {
        &self.times[arc]
    }

    /// `T_j = L_j(1)`.
    pub fn travel_time(&self, arc: usize) -> f64 {
        self.times[arc][self.grid]
    }

    /// `T = min_j T_j`, the length of the explicit window.
    pub fn window(&self) -> f64 {
        (0..self.arc_count())
            .map(|j| self.travel_time(j))
            .fold(f64::INFINITY, f64::min)
    }

    /// `L_j(x)` by the monotone Hermite interpolant.
    pub fn time_at(&self, arc: usize, x: f64) -> f64 {
        let (i, w) = cell(self.grid, x);
        self.hermite(arc, i, w)
    }

    fn hermite(&self, arc: usize, i: usize, w: f64) -> f64 {
        let h = 1.0 / self.grid as f64;
        let l = &self.times[arc];
        let (dl, dr) = self.slopes[arc][i];
        let w2 = w * w;
        let w3 = w2 * w;
        (2.0 * w3 - 3.0 * w2 + 1.0) * l[i]
            + (w3 - 2.0 * w2 + w) * h * dl
            + (-2.0 * w3 + 3.0 * w2) * l[i + 1]
            + (w3 - w2) * h * dr
    }

    /// `L_j^-1(tau)`, clamped to `[0, 1]`.
    pub fn position(&self, arc: usize, tau: f64) -> f64 {
        let l = &self.times[arc];
        let g = self.grid;
        if tau <= 0.0 {
            return 0.0;
        }
        if tau >= l[g] {
            return 1.0;
        }
        // last node with l[i] <= tau
        let i = l
            .partition_point(|v| *v <= tau)
            .saturating_sub(1)
            .min(g - 1);
        if tau == l[i] {
            return i as f64 / g as f64;
        }
        let span = l[i + 1] - l[i];
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut w = ((tau - l[i]) / span).clamp(0.0, 1.0);
        let h = 1.0 / g as f64;
        let (dl, dr) = self.slopes[arc][i];
        for _ in 0..60 {
            let f = self.hermite(arc, i, w) - tau;
            if f > 0.0 {
                hi = w;
            } else {
                lo = w;
            }
            if f.abs() <= 1e-15 * tau.max(span) {
                break;
            }
            let w2 = w * w;
            let dfdw = (6.0 * w2 - 6.0 * w) * l[i]
                + (3.0 * w2 - 4.0 * w + 1.0) * h * dl
                + (-6.0 * w2 + 6.0 * w) * l[i + 1]
                + (3.0 * w2 - 2.0 * w) * h * dr;
            let next = if dfdw > 0.0 { w - f / dfdw } else { f64::NAN };
            w = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        (i as f64 + w) * h
    }
}

fn cell(grid: usize, x: f64) -> (usize, f64) {
    let s = x.clamp(0.0, 1.0) * grid as f64;
    let i = (libm::floor(s) as usize).min(grid - 1);
    (i, s - i as f64)
}

/// Piecewise-linear read of nodal samples at `x in [0, 1]`.
pub fn interpolate(values: &[f64], x: f64) -> f64 {
    let g = values.len() - 1;
    let (i, w) = cell(g, x);
    if w == 0.0 {
        values[i]
    } else {
        (1.0 - w) * values[i] + w * values[i + 1]
    }
}

/// Sampled Riemann fields at one instant, in arc order (forward arcs
/// first).
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkState {
    pub t: f64,
    pub values: Vec<Vec<f64>>,
}

impl NetworkState {
    pub fn zeros(arcs: usize, grid: usize) -> Self {
        Self {
            t: 0.0,
            values: vec![vec![0.0; grid + 1]; arcs],
        }
    }

    pub fn grid(&self) -> usize {
        self.values.first().map_or(0, |v| v.len() - 1)
    }

    pub fn abs(&self) -> Self {
        Self {
            t: self.t,
            values: self
                .values
                .iter()
                .map(|v| v.iter().map(|x| x.abs()).collect())
                .collect(),
        }
    }

    /// Largest nodal difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

/// Lower-order coupling `N-bar` at the grid nodes of each edge, acting on
/// the arc pair `(u1, u2)` of that edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    /// Arc indices of `(u1, u2)` per edge.
    pub pairs: Vec<[usize; 2]>,
    /// `N-bar(x_i)` per edge.
    pub matrices: Vec<Vec<Mat2>>,
}

impl Coupling {
    /// Applies `exp(-N-bar h)` nodewise.
    pub fn apply(&self, state: &mut NetworkState, h: f64) {
        for (pair, mats) in self.pairs.iter().zip(&self.matrices) {
            for (i, n) in mats.iter().enumerate() {
                let e = mat2_expm(&mat2_scale(n, -h));
                let u = [state.values[pair[0]][i], state.values[pair[1]][i]];
                let v = mat2_apply(&e, u);
                state.values[pair[0]][i] = v[0];
                state.values[pair[1]][i] = v[1];
            }
        }
    }
}

/// Pure transport part of the network: flow matrix, arc split and travel
/// times.
#[derive(Clone, Debug, PartialEq)]
pub struct Transport {
    b: Matrix,
    forward: usize,
    speeds: Vec<Vec<f64>>,
    ttm: TravelTimeMap,
}

/// Options for [`Transport::evolve`].
#[derive(Clone, Debug, Default)]
pub struct EvolveOptions<'a> {
    /// Upper bound on the step; the window `T` is always respected.
    pub max_step: Option<f64>,
    /// Lower-order coupling applied by Strang splitting.
    pub coupling: Option<&'a Coupling>,
}

impl Transport {
    /// `speeds[j]` holds `c_j` at the grid nodes of arc `j`; arcs
    /// `0..forward` move towards `x = 1`.
    pub fn new(b: Matrix, forward: usize, speeds: Vec<Vec<f64>>) -> Result<Self, FlowError> {
        let arcs = speeds.len();
        if b.rows() != arcs || b.cols() != arcs {
            return Err(FlowError::MatrixShape {
                rows: b.rows(),
                cols: b.cols(),
                arcs,
            });
        }
        if forward > arcs {
            return Err(FlowError::ArcOrder);
        }
        let ttm = TravelTimeMap::new(&speeds)?;
        Ok(Self {
            b,
            forward,
            speeds,
            ttm,
        })
    }

    /// Same arcs and speeds with a different flow matrix.
    pub fn with_flow_matrix(&self, b: Matrix) -> Result<Self, FlowError> {
        if b.rows() != self.b.rows() || b.cols() != self.b.cols() {
            return Err(FlowError::MatrixShape {
                rows: b.rows(),
                cols: b.cols(),
                arcs: self.arcs(),
            });
        }
        Ok(Self { b, ..self.clone() })
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn arcs(&self) -> usize {
        self.speeds.len()
    }

    pub fn forward_count(&self) -> usize {
        self.forward
    }

    pub fn is_forward(&self, arc: usize) -> bool {
        arc < self.forward
    }

    pub fn grid(&self) -> usize {
        self.ttm.grid()
    }

    pub fn speeds(&self) -> &[Vec<f64>] {
        &self.speeds
    }

    pub fn travel_times(&self) -> &TravelTimeMap {
        &self.ttm
    }

    pub fn window(&self) -> f64 {
        self.ttm.window()
    }

    pub fn check_state(&self, state: &NetworkState) -> Result<(), FlowError> {
        if state.values.len() != self.arcs() {
            return Err(FlowError::MatrixShape {
                rows: self.b.rows(),
                cols: self.b.cols(),
                arcs: state.values.len(),
            });
        }
        let expected = self.grid() + 1;
        for (arc, v) in state.values.iter().enumerate() {
            if v.len() != expected {
                return Err(FlowError::SampleCount {
                    arc,
                    len: v.len(),
                    expected,
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(FlowError::NonFinite { arc });
            }
        }
        Ok(())
    }

    /// Value entering the network through the incoming trace of arc `k`
    /// at time `s` after the state's timestamp: `upsilon_k(1, s)` or
    /// `varpi_k(0, s)`. Requires `s <= T_k`.
    fn incoming_trace(&self, state: &NetworkState, k: usize, s: f64) -> f64 {
        let tk = self.ttm.travel_time(k);
        let y = if self.is_forward(k) {
            self.ttm.position(k, tk - s)
        } else {
            self.ttm.position(k, s)
        };
        interpolate(&state.values[k], y)
    }

    fn boundary_value(&self, state: &NetworkState, row: usize, s: f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.arcs() {
            let b = self.b[(row, k)];
            if b != 0.0 {
                acc += b * self.incoming_trace(state, k, s);
            }
        }
        acc
    }

    /// Exact transport over `0 <= t <= T`.
    pub fn propagate(&self, state: &NetworkState, t: f64) -> Result<NetworkState, FlowError> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(FlowError::BadTime(t));
        }
        let window = self.window();
        if t > window * (1.0 + 1e-12) {
            return Err(FlowError::WindowExceeded { t, window });
        }
        self.check_state(state)?;
        if t == 0.0 {
            return Ok(state.clone());
        }
        let t = t.min(window);
        let eps = 1e-13 * window.max(1.0);
        let g = self.grid();
        let mut values = Vec::with_capacity(self.arcs());
        for j in 0..self.arcs() {
            let l = self.ttm.times(j);
            let tj = self.ttm.travel_time(j);
            let old = &state.values[j];
            let mut out = Vec::with_capacity(g + 1);
            for &lx in l.iter() {
                let v = if self.is_forward(j) {
                    if lx > t + eps {
                        interpolate(old, self.ttm.position(j, lx - t))
                    } else {
                        self.boundary_value(state, j, (t - lx).max(0.0))
                    }
                } else {
                    let to_head = tj - lx;
                    if to_head > t + eps {
                        interpolate(old, self.ttm.position(j, lx + t))
                    } else {
                        self.boundary_value(state, j, (t - to_head).max(0.0))
                    }
                };
                out.push(v);
            }
            values.push(out);
        }
        Ok(NetworkState {
            t: state.t + t,
            values,
        })
    }

    /// Advances from `state` and returns one state per entry of
    /// `output_times` (absolute, nondecreasing, not before `state.t`).
    pub fn evolve(
        &self,
        state: &NetworkState,
        output_times: &[f64],
        options: &EvolveOptions<'_>,
    ) -> Result<Vec<NetworkState>, FlowError> {
        self.check_state(state)?;
        for &t in output_times {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(FlowError::BadTime(t));
            }
        }
        if output_times.windows(2).any(|w| w[1] < w[0])
            || output_times.first().is_some_and(|t| *t < state.t)
        {
            return Err(FlowError::OutputOrder);
        }
        let window = self.window();
        let max_step = options.max_step.map_or(window, |s| s.min(window));
        if !(max_step > 0.0) {
            return Err(FlowError::BadTime(max_step));
        }
        // Outputs are reached by one partial step from an anchor that only
        // ever advances by full steps, so dense output does not compound
        // interpolation error.
        let tol = |t: f64| 1e-13 * t.abs().max(1.0);
        let mut anchor = state.clone();
        let mut out = Vec::with_capacity(output_times.len());
        for &target in output_times {
            while target - anchor.t >= max_step - tol(target) {
                let t = anchor.t + max_step;
                anchor = self.step(&anchor, max_step, options.coupling)?;
                anchor.t = t;
            }
            let remaining = target - anchor.t;
            let mut s = if remaining <= tol(target) {
                anchor.clone()
            } else {
                self.step(&anchor, remaining, options.coupling)?
            };
            s.t = target;
            out.push(s);
        }
        Ok(out)
    }

    fn step(
        &self,
        state: &NetworkState,
        h: f64,
        coupling: Option<&Coupling>,
    ) -> Result<NetworkState, FlowError> {
        match coupling {
            None => self.propagate(state, h),
            Some(c) => {
                let mut s = state.clone();
                c.apply(&mut s, 0.5 * h);
                let mut s = self.propagate(&s, h)?;
                c.apply(&mut s, 0.5 * h);
                Ok(s)
            }
        }
    }

    /// `(sum_j int |v_j|^p)^(1/p)` by composite Simpson.
    pub fn lp_norm(&self, state: &NetworkState, p: f64) -> Result<f64, FlowError> {
        lp_norm(state, p)
    }

    /// `sum_j int |v_j| / c_j`.
    pub fn c_norm(&self, state: &NetworkState) -> f64 {
        weighted_c_norm(state, &self.speeds)
    }
}

pub fn lp_norm(state: &NetworkState, p: f64) -> Result<f64, FlowError> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(FlowError::BadExponent(p));
    }
    let h = 1.0 / state.grid() as f64;
    let total: f64 = state
        .values
        .iter()
        .map(|v| {
            let w: Vec<f64> = v.iter().map(|x| libm::pow(x.abs(), p)).collect();
            quad::integrate(&w, h)
        })
        .sum();
    Ok(libm::pow(total, 1.0 / p))
}

pub fn weighted_c_norm(state: &NetworkState, speeds: &[Vec<f64>]) -> f64 {
    let h = 1.0 / state.grid() as f64;
    state
        .values
        .iter()
        .zip(speeds)
        .map(|(v, c)| {
            let w: Vec<f64> = v.iter().zip(c).map(|(x, c)| x.abs() / c).collect();
            quad::integrate(&w, h)
        })
        .sum()
}
