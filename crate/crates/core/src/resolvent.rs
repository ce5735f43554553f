//! Resolvent `R(lambda, A_B) f` of the transport generator, evaluated from
//! the variation-of-constants formula along each arc.
//!
//! With `E_j(x) = exp(-lambda L_j(x))`:
//!
//! ```text
//! upsilon_j(x) = E_j(x) (upsilon0_j + int_0^x f_j / (c_j E_j))
//! varpi_j(x)   = (E_j(1) varpi0_j + int_x^1 E_j f_j / c_j) / E_j(x)
//! (I - B E(0,1)) (upsilon0, varpi0) = B rhs
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::edge::Tolerances;
use crate::error::{FlowError, ResolventError};
use crate::flow::{lp_norm, NetworkState, Transport};
use crate::linalg::{Lu, Matrix};
use crate::quad::{self, FirstCell};

/// Largest `|lambda| T_j` accepted before `exp` over- or underflows.
const EXPONENT_LIMIT: f64 = 700.0;

/// Everything that depends on `lambda` but not on `f`.
#[derive(Clone, Debug)]
pub struct ResolventWorkspace {
    transport: Transport,
    lambda: f64,
    /// `E_j` at the grid nodes.
    weights: Vec<Vec<f64>>,
    boundary: Matrix,
    lu: Lu,
    singular_rcond: f64,
    neumann: bool,
}

impl ResolventWorkspace {
    pub fn new(
        transport: &Transport,
        lambda: f64,
        tol: &Tolerances,
    ) -> Result<Self, ResolventError> {
        if !lambda.is_finite() {
            return Err(ResolventError::ExponentRange {
                lambda,
                travel_time: f64::NAN,
            });
        }
        let ttm = transport.travel_times();
        let n = transport.arcs();
        for j in 0..n {
            let tj = ttm.travel_time(j);
            if (lambda * tj).abs() > EXPONENT_LIMIT {
                return Err(ResolventError::ExponentRange {
                    lambda,
                    travel_time: tj,
                });
            }
        }
        let weights: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                ttm.times(j)
                    .iter()
                    .map(|l| libm::exp(-lambda * l))
                    .collect()
            })
            .collect();
        let g = transport.grid();
        let e01: Vec<f64> = weights.iter().map(|w| w[g]).collect();
        let boundary = Matrix::identity(n).sub(&transport.b().mul(&Matrix::diagonal(&e01)));
        let lu = Lu::factor(&boundary);
        let norm_b = transport.b().norm_inf();
        let neumann = norm_b == 0.0 || lambda > libm::log(norm_b) / ttm.window();
        Ok(Self {
            transport: transport.clone(),
            lambda,
            weights,
            boundary,
            lu,
            singular_rcond: tol.singular_rcond,
            neumann,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn transport(&self) -> &Transport {
        &self.transport
    }

    /// `I - B E(0,1)`.
    pub fn boundary_matrix(&self) -> &Matrix {
        &self.boundary
    }

    pub fn rcond(&self) -> f64 {
        self.lu.rcond()
    }

    pub fn is_solvable(&self) -> bool {
        !self.lu.is_singular(self.singular_rcond)
    }

    /// `lambda > ln |B|_inf / min_j T_j`, where the Neumann series for the
    /// boundary vector converges.
    pub fn neumann_valid(&self) -> bool {
        self.neumann
    }

    /// `E_j` at the nodes of arc `j`.
    pub fn weights(&self, arc: usize) -> &[f64] {
        &self.weights[arc]
    }

    /// `e_lambda(a, b) = exp(-lambda int_a^b dz / c_j)`.
    pub fn exponential_weight(&self, arc: usize, a: f64, b: f64) -> f64 {
        let ttm = self.transport.travel_times();
        libm::exp(-self.lambda * (ttm.time_at(arc, b) - ttm.time_at(arc, a)))
    }

    fn check(&self, f: &NetworkState) -> Result<(), ResolventError> {
        self.transport.check_state(f).map_err(ResolventError::from)
    }

    /// Running integrals per arc: `int_0^x f/(cE)` for forward arcs and
    /// `int_x^1 E f / c` for backward arcs.
    fn running_integrals(&self, f: &NetworkState) -> Vec<Vec<f64>> {
        let h = 1.0 / self.transport.grid() as f64;
        let speeds = self.transport.speeds();
        (0..self.transport.arcs())
            .map(|j| {
                let e = &self.weights[j];
                let c = &speeds[j];
                let fj = &f.values[j];
                let l = self.transport.travel_times().times(j);
                let n = fj.len() - 1;
                if self.transport.is_forward(j) {
                    let g: Vec<f64> = (0..fj.len()).map(|i| fj[i] / (c[i] * e[i])).collect();
                    let mut out = quad::cumulative(&g, h, FirstCell::Trapezoid);
                    out[1] = fitted_cell(
                        fj[0] / c[0],
                        fj[1] / c[1],
                        1.0 / e[0],
                        self.lambda * (l[1] - l[0]),
                        h,
                    );
                    out
                } else {
                    let g: Vec<f64> = (0..fj.len()).map(|i| e[i] * fj[i] / c[i]).collect();
                    let mut out = quad::cumulative_from_right(&g, h, FirstCell::Trapezoid);
                    out[n - 1] = fitted_cell(
                        fj[n - 1] / c[n - 1],
                        fj[n] / c[n],
                        e[n - 1],
                        -self.lambda * (l[n] - l[n - 1]),
                        h,
                    );
                    out
                }
            })
            .collect()
    }

    fn rhs_from(&self, running: &[Vec<f64>]) -> Vec<f64> {
        let g = self.transport.grid();
        running
            .iter()
            .enumerate()
            .map(|(j, r)| {
                if self.transport.is_forward(j) {
                    self.weights[j][g] * r[g]
                } else {
                    r[0]
                }
            })
            .collect()
    }

    /// Inhomogeneous boundary data `(int_0^1 e(s,1) f/c, int_0^1 e(0,s) f/c)`.
    pub fn boundary_rhs(&self, f: &NetworkState) -> Result<Vec<f64>, ResolventError> {
        self.check(f)?;
        Ok(self.rhs_from(&self.running_integrals(f)))
    }

    fn singular(&self) -> ResolventError {
        ResolventError::SingularBoundaryMatrix {
            lambda: self.lambda,
            rcond: self.rcond(),
        }
    }

    /// `(upsilon0, varpi0)` by a direct solve.
    pub fn boundary_vector(&self, f: &NetworkState) -> Result<Vec<f64>, ResolventError> {
        let rhs = self.boundary_rhs(f)?;
        self.solve_boundary(&rhs)
    }

    fn solve_boundary(&self, rhs: &[f64]) -> Result<Vec<f64>, ResolventError> {
        if !self.is_solvable() {
            return Err(self.singular());
        }
        Ok(self.lu.solve(&self.transport.b().mul_vec(rhs)))
    }

    /// `(upsilon0, varpi0)` by the truncated series `sum_n (B E)^n B rhs`,
    /// stopped once a term drops below `1e-12`. Returns the vector and the
    /// number of terms, or `None` when the series is not known to converge
    /// or did not settle within `10^4` terms.
    pub fn boundary_vector_series(
        &self,
        f: &NetworkState,
    ) -> Result<Option<(Vec<f64>, usize)>, ResolventError> {
        if !self.neumann {
            return Ok(None);
        }
        let rhs = self.boundary_rhs(f)?;
        let g = self.transport.grid();
        let b = self.transport.b();
        let mut term = b.mul_vec(&rhs);
        let mut sum = term.clone();
        for n in 1..=10_000usize {
            let size = term.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if size < 1e-12 {
                return Ok(Some((sum, n)));
            }
            let scaled: Vec<f64> = term
                .iter()
                .enumerate()
                .map(|(j, x)| x * self.weights[j][g])
                .collect();
            term = b.mul_vec(&scaled);
            for (s, t) in sum.iter_mut().zip(&term) {
                *s += t;
            }
        }
        Ok(None)
    }

    /// `R(lambda, A_B) f` at the grid nodes.
    pub fn apply(&self, f: &NetworkState) -> Result<NetworkState, ResolventError> {
        self.check(f)?;
        let running = self.running_integrals(f);
        let y = self.solve_boundary(&self.rhs_from(&running))?;
        let g = self.transport.grid();
        let values = (0..self.transport.arcs())
            .map(|j| {
                let e = &self.weights[j];
                let r = &running[j];
                if self.transport.is_forward(j) {
                    (0..=g).map(|i| e[i] * (y[j] + r[i])).collect()
                } else {
                    (0..=g).map(|i| (e[g] * y[j] + r[i]) / e[i]).collect()
                }
            })
            .collect();
        Ok(NetworkState { t: f.t, values })
    }

    /// Largest residual of `lambda v +- c v' = f` on nodes `3..=G-3`, with a
    /// fourth-order centered difference for `v'`.
    pub fn fd_residual(&self, f: &NetworkState, r: &NetworkState) -> f64 {
        let g = self.transport.grid();
        if g < 6 {
            return 0.0;
        }
        let h = 1.0 / g as f64;
        let mut worst = 0.0f64;
        for j in 0..self.transport.arcs() {
            let v = &r.values[j];
            let c = &self.transport.speeds()[j];
            let sign = if self.transport.is_forward(j) {
                1.0
            } else {
                -1.0
            };
            for i in 3..=g - 3 {
                let dv = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
                let res = self.lambda * v[i] + sign * c[i] * dv - f.values[j][i];
                worst = worst.max(res.abs());
            }
        }
        worst
    }

    /// Residual of the domain condition `(upsilon(0), varpi(1)) = B
    /// (upsilon(1), varpi(0))`.
    pub fn boundary_residual(&self, r: &NetworkState) -> f64 {
        let g = self.transport.grid();
        let n = self.transport.arcs();
        let incoming: Vec<f64> = (0..n)
            .map(|j| {
                if self.transport.is_forward(j) {
                    r.values[j][g]
                } else {
                    r.values[j][0]
                }
            })
            .collect();
        let mapped = self.transport.b().mul_vec(&incoming);
        (0..n)
            .map(|j| {
                let out = if self.transport.is_forward(j) {
                    r.values[j][0]
                } else {
                    r.values[j][g]
                };
                (out - mapped[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `h w int_0^1 e^{z t} (qa (1 - t) + qb t) dt`: one cell with `q` linear
/// and the exponential integrated exactly. Both weights are positive.
fn fitted_cell(qa: f64, qb: f64, w: f64, z: f64, h: f64) -> f64 {
    let (a, b) = if z.abs() <= 1.0 {
        // sum z^n / (n+2)! and sum (n+1) z^n / (n+2)!
        let (mut a, mut b) = (0.0, 0.0);
        let mut term = 0.5;
        for n in 0..24 {
            a += term;
            b += (n + 1) as f64 * term;
            term *= z / (n + 3) as f64;
        }
        (a, b)
    } else {
        let ez = libm::exp(z);
        ((ez - 1.0 - z) / (z * z), (z * ez - ez + 1.0) / (z * z))
    };
    h * w * (qa * a + qb * b)
}

/// Streaming trapezoid rule for `int e^{-lambda t} G(t) f dt` over
/// states pushed in time order.
#[derive(Clone, Debug)]
pub struct LaplaceAccumulator {
    lambda: f64,
    t0: f64,
    acc: Vec<Vec<f64>>,
    prev: Option<(f64, f64, NetworkState)>,
}

impl LaplaceAccumulator {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            t0: 0.0,
            acc: Vec::new(),
            prev: None,
        }
    }

    pub fn push(&mut self, s: &NetworkState) -> Result<(), FlowError> {
        match &self.prev {
            None => {
                self.t0 = s.t;
                self.acc = s.values.iter().map(|v| vec![0.0; v.len()]).collect();
            }
            Some((t, w, p)) => {
                if !(s.t > *t) {
                    return Err(FlowError::OutputOrder);
                }
                let ws = libm::exp(-self.lambda * (s.t - self.t0));
                let half = 0.5 * (s.t - t);
                for ((a, u), v) in self.acc.iter_mut().zip(&p.values).zip(&s.values) {
                    for ((x, y0), y1) in a.iter_mut().zip(u).zip(v) {
                        *x += half * (w * y0 + ws * y1);
                    }
                }
            }
        }
        let w = libm::exp(-self.lambda * (s.t - self.t0));
        self.prev = Some((s.t, w, s.clone()));
        Ok(())
    }

    /// Relative `L1` distance between the accumulated integral and
    /// `R(lambda) f`.
    pub fn residual(
        &self,
        ws: &ResolventWorkspace,
        f: &NetworkState,
    ) -> Result<f64, ResolventError> {
        let resolved = ws.apply(f)?;
        let l1 = |s: &NetworkState| lp_norm(s, 1.0).map_err(ResolventError::from);
        let scale = l1(f)?;
        if scale == 0.0 {
            return l1(&resolved);
        }
        if self.acc.is_empty() {
            return Err(FlowError::OutputOrder.into());
        }
        let values = self
            .acc
            .iter()
            .zip(&resolved.values)
            .map(|(a, r)| a.iter().zip(r).map(|(x, y)| x - y).collect())
            .collect();
        Ok(l1(&NetworkState { t: f.t, values })? / scale)
    }
}

/// Relative `L1` residual between `R(lambda) f` and the truncated
/// Laplace transform `int_0^tmax e^{-lambda t} G(t) f dt`, the integral taken
/// by the trapezoid rule over `trajectory` (starting with `f` itself).
pub fn laplace_check(
    ws: &ResolventWorkspace,
    f: &NetworkState,
    trajectory: &[NetworkState],
) -> Result<f64, ResolventError> {
    if trajectory.len() < 2 && lp_norm(f, 1.0)? != 0.0 {
        return Err(FlowError::OutputOrder.into());
    }
    let mut acc = LaplaceAccumulator::new(ws.lambda());
    for s in trajectory {
        acc.push(s)?;
    }
    acc.residual(ws, f)
}

/// As [`laplace_check`], evolving `f` itself with `steps_per_window` outputs
/// per window up to `t_max`, one window at a time.
pub fn laplace_residual(
    ws: &ResolventWorkspace,
    f: &NetworkState,
    t_max: f64,
    steps_per_window: usize,
) -> Result<f64, ResolventError> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(FlowError::BadTime(t_max).into());
    }
    let tr = ws.transport();
    let n = steps_per_window.max(1);
    let dt = tr.window() / n as f64;
    let total = libm::ceil(t_max / dt - 1e-9) as usize;
    let mut acc = LaplaceAccumulator::new(ws.lambda());
    acc.push(f)?;
    let mut state = f.clone();
    let mut k = 0;
    while k < total {
        let end = (k + n).min(total);
        let times: Vec<f64> = (k + 1..=end).map(|i| f.t + i as f64 * dt).collect();
        let out = tr.evolve(&state, &times, &crate::flow::EvolveOptions::default())?;
        for s in &out {
            acc.push(s)?;
        }
        state = out.last().cloned().unwrap_or(state);
        k = end;
    }
    acc.residual(ws, f)
}
