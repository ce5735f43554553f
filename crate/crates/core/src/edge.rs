//! Per-edge 2x2 hyperbolic systems `p_t + M(x) p_x + N(x) p = 0`.
//!
//! An [`EdgeSystem`] samples `M` on the solver grid, diagonalizes it at
//! every node and caches the eigenvalues, the eigenvector matrix
//! `F = [f+ | f-]` and its inverse. The Riemann invariants are
//! `u = F^-1 p`; `u1` travels with speed `lambda+`, `u2` with `lambda-`.

use alloc::vec::Vec;

use crate::error::{EdgeError, EigenError};
use crate::linalg::{
    mat2_add, mat2_apply, mat2_det, mat2_inv, mat2_max_abs, mat2_mul, mat2_scale, mat2_sub,
    mat2_trace, Mat2, MAT2_IDENTITY, MAT2_ZERO,
};

/// Numerical thresholds used when validating a network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Minimum discriminant `(tr M)^2 - 4 det M`.
    pub hyperbolicity: f64,
    /// Minimum eigenvalue magnitude.
    pub zero_eigenvalue: f64,
    /// Reciprocal condition number below which a matrix counts as singular.
    pub singular_rcond: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hyperbolicity: 1e-10,
            zero_eigenvalue: 1e-10,
            singular_rcond: 1e-12,
        }
    }
}

/// Matrix-valued coefficient on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientField {
    Constant(Mat2),
    /// Samples at `len` uniform nodes of `[0, 1]`, linearly interpolated.
    Tabulated(Vec<Mat2>),
}

impl CoefficientField {
    pub fn eval(&self, x: f64) -> Mat2 {
        match self {
            CoefficientField::Constant(m) => *m,
            CoefficientField::Tabulated(samples) => {
                let g = samples.len() - 1;
                let s = x.clamp(0.0, 1.0) * g as f64;
                let i = (libm::floor(s) as usize).min(g - 1);
                let w = s - i as f64;
                mat2_add(
                    &mat2_scale(&samples[i], 1.0 - w),
                    &mat2_scale(&samples[i + 1], w),
                )
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientField::Constant(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CoefficientField::Constant(m) => *m == MAT2_ZERO,
            CoefficientField::Tabulated(s) => s.iter().all(|m| *m == MAT2_ZERO),
        }
    }

    fn all_finite(&self) -> bool {
        let finite = |m: &Mat2| m.iter().flatten().all(|x| x.is_finite());
        match self {
            CoefficientField::Constant(m) => finite(m),
            CoefficientField::Tabulated(s) => s.iter().all(finite),
        }
    }
}

/// Eigenvalues `lambda- < lambda+` and eigenvectors of a 2x2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen2 {
    pub plus: f64,
    pub minus: f64,
    pub f_plus: [f64; 2],
    pub f_minus: [f64; 2],
}

impl Eigen2 {
    /// `F = [f+ | f-]` with eigenvectors as columns.
    pub fn matrix(&self) -> Mat2 {
        [
            [self.f_plus[0], self.f_minus[0]],
            [self.f_plus[1], self.f_minus[1]],
        ]
    }
}

/// Eigen-decomposition of a strictly hyperbolic 2x2 matrix with nonzero
/// eigenvalues. Eigenvectors have unit Euclidean norm and a positive first
/// nonzero component.
pub fn eigen_decompose(m: &Mat2, tol: &Tolerances) -> Result<Eigen2, EigenError> {
    let tr = mat2_trace(m);
    let det = mat2_det(m);
    let disc = tr * tr - 4.0 * det;
    if !(disc > tol.hyperbolicity) {
        return Err(EigenError::NotStrictlyHyperbolic { discriminant: disc });
    }
    let root = libm::sqrt(disc);
    // avoid cancellation: one root from the quadratic formula, the other from det
    let q = 0.5 * (tr + libm::copysign(root, tr));
    let (r1, r2) = if q == 0.0 {
        (0.5 * root, -0.5 * root)
    } else {
        (q, det / q)
    };
    let (plus, minus) = if r1 > r2 { (r1, r2) } else { (r2, r1) };
    for lam in [plus, minus] {
        if !(lam.abs() > tol.zero_eigenvalue) {
            return Err(EigenError::ZeroEigenvalue { eigenvalue: lam });
        }
    }
    Ok(Eigen2 {
        plus,
        minus,
        f_plus: eigenvector(m, plus),
        f_minus: eigenvector(m, minus),
    })
}

fn eigenvector(m: &Mat2, lam: f64) -> [f64; 2] {
    // rows of (M - lam I) are orthogonal to the eigenvector
    let a = [m[0][1], lam - m[0][0]];
    let b = [lam - m[1][1], m[1][0]];
    let na = a[0] * a[0] + a[1] * a[1];
    let nb = b[0] * b[0] + b[1] * b[1];
    let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
    let n = libm::sqrt(n);
    let mut v = [v[0] / n, v[1] / n];
    let first = if v[0].abs() > 1e-14 { v[0] } else { v[1] };
    if first < 0.0 {
        v = [-v[0], -v[1]];
    }
    v
}

/// Which Riemann invariant of an edge: `u1` (with `lambda+`) or `u2`
/// (with `lambda-`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Plus,
    Minus,
}

impl Component {
    pub fn index(self) -> usize {
        match self {
            Component::Plus => 0,
            Component::Minus => 1,
        }
    }
}

/// Input description of one edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub m: CoefficientField,
    pub n: Option<CoefficientField>,
    /// Explicit constant eigenvector matrix `[f+ | f-]`, replacing the
    /// default unit normalization.
    pub eigenvectors: Option<Mat2>,
}

impl EdgeSpec {
    pub fn constant(m: Mat2) -> Self {
        Self {
            m: CoefficientField::Constant(m),
            n: None,
            eigenvectors: None,
        }
    }

    pub fn with_lower_order(mut self, n: Mat2) -> Self {
        self.n = Some(CoefficientField::Constant(n));
        self
    }

    pub fn with_eigenvectors(mut self, f: Mat2) -> Self {
        self.eigenvectors = Some(f);
        self
    }
}

/// Diagonalized edge: cached eigen-data at the `grid + 1` solver nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSystem {
    id: usize,
    spec: EdgeSpec,
    grid: usize,
    lambda_plus: Vec<f64>,
    lambda_minus: Vec<f64>,
    f: Vec<Mat2>,
    f_inv: Vec<Mat2>,
    alpha: u8,
}

impl EdgeSystem {
    pub fn new(
        id: usize,
        spec: EdgeSpec,
        grid: usize,
        tol: &Tolerances,
    ) -> Result<Self, EdgeError> {
        if grid < 2 {
            return Err(EdgeError::BadGrid { edge: id, grid });
        }
        for field in core::iter::once(&spec.m).chain(spec.n.as_ref()) {
            if let CoefficientField::Tabulated(s) = field {
                if s.len() < 3 {
                    return Err(EdgeError::TooFewSamples {
                        edge: id,
                        samples: s.len(),
                    });
                }
            }
            if !field.all_finite() {
                return Err(EdgeError::NonFinite { edge: id });
            }
        }
        if let Some(f) = &spec.eigenvectors {
            if f.iter().flatten().any(|x| !x.is_finite()) {
                return Err(EdgeError::NonFinite { edge: id });
            }
        }

        let h = 1.0 / grid as f64;
        let mut lambda_plus = Vec::with_capacity(grid + 1);
        let mut lambda_minus = Vec::with_capacity(grid + 1);
        let mut f = Vec::with_capacity(grid + 1);
        let mut f_inv = Vec::with_capacity(grid + 1);
        let identity_tol = if spec.m.is_constant() { 1e-12 } else { 1e-10 };

        for i in 0..=grid {
            let x = i as f64 * h;
            let m = spec.m.eval(x);
            let eig = eigen_decompose(&m, tol).map_err(|e| match e {
                EigenError::NotStrictlyHyperbolic { discriminant } => {
                    EdgeError::NotStrictlyHyperbolic {
                        edge: id,
                        x,
                        discriminant,
                    }
                }
                EigenError::ZeroEigenvalue { eigenvalue } => EdgeError::ZeroEigenvalue {
                    edge: id,
                    x,
                    eigenvalue,
                },
            })?;
            let fx = match &spec.eigenvectors {
                Some(given) => {
                    let residual = override_residual(&m, given, &eig);
                    if residual > 1e-9 {
                        return Err(EdgeError::BadEigenvectorOverride {
                            edge: id,
                            x,
                            residual,
                        });
                    }
                    *given
                }
                None => {
                    let mut fx = eig.matrix();
                    // keep each eigenvector branch continuous along the edge
                    if let Some(prev) = f.last() {
                        align_columns(&mut fx, prev);
                    }
                    fx
                }
            };
            let det = mat2_det(&fx);
            let scale = mat2_max_abs(&fx);
            if !(det.abs() >= 1e-8 * scale * scale) || det.abs() < 1e-8 {
                return Err(EdgeError::DegenerateEigenvectors { edge: id, x, det });
            }
            let inv =
                mat2_inv(&fx).ok_or(EdgeError::DegenerateEigenvectors { edge: id, x, det })?;
            let err = mat2_max_abs(&mat2_sub(&mat2_mul(&fx, &inv), &MAT2_IDENTITY));
            if err > identity_tol {
                return Err(EdgeError::DegenerateEigenvectors { edge: id, x, det });
            }
            lambda_plus.push(eig.plus);
            lambda_minus.push(eig.minus);
            f.push(fx);
            f_inv.push(inv);
        }

        let alpha = classify(id, &lambda_plus, &lambda_minus)?;
        Ok(Self {
            id,
            spec,
            grid,
            lambda_plus,
            lambda_minus,
            f,
            f_inv,
            alpha,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn spec(&self) -> &EdgeSpec {
        &self.spec
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Number of positive eigenvalues, constant along the edge.
    pub fn alpha(&self) -> u8 {
        self.alpha
    }

    pub fn eigenvalues(&self, component: Component) -> &[f64] {
        match component {
            Component::Plus => &self.lambda_plus,
            Component::Minus => &self.lambda_minus,
        }
    }

    /// Whether the component moves from the tail (`x = 0`) to the head.
    pub fn is_forward(&self, component: Component) -> bool {
        self.eigenvalues(component)[0] > 0.0
    }

    /// Characteristic speed `|lambda|` of a component at every node.
    pub fn speed(&self, component: Component) -> Vec<f64> {
        self.eigenvalues(component)
            .iter()
            .map(|l| l.abs())
            .collect()
    }

    /// Eigenvector matrix at node `i`.
    pub fn f_at(&self, i: usize) -> &Mat2 {
        &self.f[i]
    }

    pub fn f_inv_at(&self, i: usize) -> &Mat2 {
        &self.f_inv[i]
    }

    /// Eigenvector matrix at the endpoint `x = 0` (`end = 0`) or `x = 1`.
    pub fn f_at_end(&self, end: usize) -> &Mat2 {
        &self.f[end * self.grid]
    }

    /// `u = F^-1 p` at every node.
    pub fn riemann_transform(&self, p: &[[f64; 2]]) -> Vec<[f64; 2]> {
        assert_eq!(p.len(), self.grid + 1);
        p.iter()
            .zip(&self.f_inv)
            .map(|(p, finv)| mat2_apply(finv, *p))
            .collect()
    }

    /// `p = F u` at every node.
    pub fn inverse_transform(&self, u: &[[f64; 2]]) -> Vec<[f64; 2]> {
        assert_eq!(u.len(), self.grid + 1);
        u.iter()
            .zip(&self.f)
            .map(|(u, f)| mat2_apply(f, *u))
            .collect()
    }

    /// Lower-order matrix of the diagonal system at node `i`:
    /// `F^-1 M F_x + F^-1 N F`, with `F_x` by centered differences
    /// (one-sided at the ends).
    pub fn lower_order_at_node(&self, i: usize) -> Mat2 {
        let g = self.grid;
        let h = 1.0 / g as f64;
        let x = i as f64 * h;
        let dfdx = if i == 0 {
            mat2_scale(&mat2_sub(&self.f[1], &self.f[0]), 1.0 / h)
        } else if i == g {
            mat2_scale(&mat2_sub(&self.f[g], &self.f[g - 1]), 1.0 / h)
        } else {
            mat2_scale(&mat2_sub(&self.f[i + 1], &self.f[i - 1]), 0.5 / h)
        };
        let m = self.spec.m.eval(x);
        let transport = mat2_mul(&self.f_inv[i], &mat2_mul(&m, &dfdx));
        match &self.spec.n {
            Some(n) => {
                let n = n.eval(x);
                mat2_add(
                    &transport,
                    &mat2_mul(&self.f_inv[i], &mat2_mul(&n, &self.f[i])),
                )
            }
            None => transport,
        }
    }

    /// Lower-order matrix at an arbitrary `x`, interpolated between nodes.
    pub fn lower_order_matrix(&self, x: f64) -> Mat2 {
        let s = x.clamp(0.0, 1.0) * self.grid as f64;
        let i = (libm::floor(s) as usize).min(self.grid - 1);
        let w = s - i as f64;
        mat2_add(
            &mat2_scale(&self.lower_order_at_node(i), 1.0 - w),
            &mat2_scale(&self.lower_order_at_node(i + 1), w),
        )
    }

    /// True when the lower-order matrix vanishes identically.
    pub fn has_lower_order(&self) -> bool {
        let n_zero = self.spec.n.as_ref().is_none_or(|n| n.is_zero());
        let f_const = self.spec.m.is_constant() || self.spec.eigenvectors.is_some();
        !(n_zero && f_const)
    }
}

fn align_columns(f: &mut Mat2, prev: &Mat2) {
    for c in 0..2 {
        let dot = f[0][c] * prev[0][c] + f[1][c] * prev[1][c];
        if dot < 0.0 {
            f[0][c] = -f[0][c];
            f[1][c] = -f[1][c];
        }
    }
}

fn override_residual(m: &Mat2, f: &Mat2, eig: &Eigen2) -> f64 {
    let mut worst = 0.0f64;
    for (c, lam) in [(0, eig.plus), (1, eig.minus)] {
        let v = [f[0][c], f[1][c]];
        let mv = mat2_apply(m, v);
        let norm = libm::hypot(v[0], v[1]).max(f64::MIN_POSITIVE);
        let r = libm::hypot(mv[0] - lam * v[0], mv[1] - lam * v[1]);
        let scale = (mat2_max_abs(m) + lam.abs()) * norm;
        worst = worst.max(r / scale.max(f64::MIN_POSITIVE));
    }
    worst
}

fn classify(edge: usize, plus: &[f64], minus: &[f64]) -> Result<u8, EdgeError> {
    let constant_sign = |v: &[f64]| v.iter().all(|l| *l > 0.0) || v.iter().all(|l| *l < 0.0);
    if !constant_sign(plus) {
        return Err(EdgeError::SignChange {
            edge,
            branch: "lambda+",
        });
    }
    if !constant_sign(minus) {
        return Err(EdgeError::SignChange {
            edge,
            branch: "lambda-",
        });
    }
    Ok(u8::from(plus[0] > 0.0) + u8::from(minus[0] > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerances = Tolerances {
        hyperbolicity: 1e-10,
        zero_eigenvalue: 1e-10,
        singular_rcond: 1e-12,
    };

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-13
    }

    #[test]
    fn symmetric_involution() {
        let e = eigen_decompose(&[[0.0, 1.0], [1.0, 0.0]], &TOL).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!(close(e.plus, 1.0) && close(e.minus, -1.0));
        assert!(close(e.f_plus[0], s) && close(e.f_plus[1], s));
        assert!(close(e.f_minus[0], s) && close(e.f_minus[1], -s));
    }

    #[test]
    fn telegraph_and_saint_venant_eigenvalues() {
        let e = eigen_decompose(&[[0.0, 4.0], [1.0, 0.0]], &TOL).unwrap();
        assert!(close(e.plus, 2.0) && close(e.minus, -2.0));
        // V = 2, g = 1, H = 1: V +- sqrt(gH)
        let e = eigen_decompose(&[[2.0, 1.0], [1.0, 2.0]], &TOL).unwrap();
        assert!(close(e.plus, 3.0) && close(e.minus, 1.0));
    }

    #[test]
    fn degenerate_matrices_are_rejected() {
        assert!(matches!(
            eigen_decompose(&MAT2_IDENTITY, &TOL),
            Err(EigenError::NotStrictlyHyperbolic { .. })
        ));
        assert!(matches!(
            eigen_decompose(&[[1.0, 0.0], [0.0, 0.0]], &TOL),
            Err(EigenError::ZeroEigenvalue { .. })
        ));
        // complex eigenvalues
        assert!(matches!(
            eigen_decompose(&[[0.0, -1.0], [1.0, 0.0]], &TOL),
            Err(EigenError::NotStrictlyHyperbolic { .. })
        ));
    }

    #[test]
    fn alpha_classification() {
        let sys = |m: Mat2| EdgeSystem::new(0, EdgeSpec::constant(m), 8, &TOL).unwrap();
        assert_eq!(sys([[0.0, 1.0], [1.0, 0.0]]).alpha(), 1);
        assert_eq!(sys([[2.0, 1.0], [1.0, 2.0]]).alpha(), 2);
        assert_eq!(sys([[-2.0, 1.0], [1.0, -2.0]]).alpha(), 0);
    }

    #[test]
    fn sign_change_is_an_error() {
        // V runs from -2 to 2 with gH = 1: lambda- = V - 1 crosses zero
        let m = CoefficientField::Tabulated(vec![
            [[-2.0, 1.0], [1.0, -2.0]],
            [[0.0, 1.0], [1.0, 0.0]],
            [[2.0, 1.0], [1.0, 2.0]],
        ]);
        let spec = EdgeSpec {
            m,
            n: None,
            eigenvectors: None,
        };
        // the zero eigenvalue sits between nodes at this grid
        let err = EdgeSystem::new(3, spec, 5, &TOL).unwrap_err();
        assert!(
            matches!(err, EdgeError::SignChange { edge: 3, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn riemann_transform_of_telegraph() {
        let spec = EdgeSpec::constant([[0.0, 1.0], [1.0, 0.0]])
            .with_eigenvectors([[1.0, 1.0], [1.0, -1.0]]);
        let sys = EdgeSystem::new(0, spec, 4, &TOL).unwrap();
        let p: Vec<[f64; 2]> = (0..5).map(|i| [i as f64, 1.0 - 0.5 * i as f64]).collect();
        let u = sys.riemann_transform(&p);
        for (pi, ui) in p.iter().zip(&u) {
            assert!(close(ui[0], 0.5 * (pi[0] + pi[1])));
            assert!(close(ui[1], 0.5 * (pi[0] - pi[1])));
        }
        let back = sys.inverse_transform(&u);
        for (a, b) in p.iter().zip(&back) {
            assert!(close(a[0], b[0]) && close(a[1], b[1]));
        }
        let zero = sys.riemann_transform(&[[0.0; 2]; 5]);
        assert!(zero.iter().all(|u| *u == [0.0, 0.0]));
    }

    #[test]
    fn saint_venant_eigenvector_override() {
        let (v, h, g) = (2.0f64, 1.0f64, 1.0f64);
        let c = (g * h).sqrt();
        let spec = EdgeSpec::constant([[v, h], [g, v]]).with_eigenvectors([[h, h], [c, -c]]);
        let sys = EdgeSystem::new(0, spec, 4, &TOL).unwrap();
        let u = sys.riemann_transform(&[[2.0, 0.0]; 5]);
        assert!(close(u[0][0], 1.0) && close(u[0][1], 1.0));

        let wrong = EdgeSpec::constant([[v, h], [g, v]]).with_eigenvectors([[h, h], [-c, c]]);
        assert!(matches!(
            EdgeSystem::new(0, wrong, 4, &TOL),
            Err(EdgeError::BadEigenvectorOverride { .. })
        ));
    }

    fn product_oracle(f: &Mat2, n: &Mat2) -> Mat2 {
        // explicit F^-1 N F with the adjugate written out by hand
        let det = f[0][0] * f[1][1] - f[0][1] * f[1][0];
        let inv = [
            [f[1][1] / det, -f[0][1] / det],
            [-f[1][0] / det, f[0][0] / det],
        ];
        let mut nf = [[0.0; 2]; 2];
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                nf[i][j] = (0..2).map(|k| n[i][k] * f[k][j]).sum();
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = (0..2).map(|k| inv[i][k] * nf[k][j]).sum();
            }
        }
        out
    }

    #[test]
    fn random_walk_lower_order_matrix() {
        let spec =
            EdgeSpec::constant([[0.0, 1.0], [1.0, 0.0]]).with_lower_order([[0.0, 0.0], [0.0, 2.0]]);
        let sys = EdgeSystem::new(0, spec, 16, &TOL).unwrap();
        let expected = product_oracle(sys.f_at(0), &[[0.0, 0.0], [0.0, 2.0]]);
        assert!(mat2_max_abs(&mat2_sub(&expected, &[[1.0, -1.0], [-1.0, 1.0]])) < 1e-14);
        for x in [0.0, 0.3, 1.0] {
            let nbar = sys.lower_order_matrix(x);
            assert!(
                mat2_max_abs(&mat2_sub(&nbar, &expected)) < 1e-13,
                "{nbar:?}"
            );
        }
    }

    #[test]
    fn constant_m_without_n_has_no_lower_order() {
        let sys =
            EdgeSystem::new(0, EdgeSpec::constant([[0.0, 3.0], [2.0, 0.0]]), 8, &TOL).unwrap();
        assert!(!sys.has_lower_order());
        for i in 0..=8 {
            assert_eq!(sys.lower_order_at_node(i), MAT2_ZERO);
        }
    }

    #[test]
    fn tabulated_coefficients_produce_transport_coupling() {
        // K varies along the edge, so F varies and F^-1 M F_x is nonzero
        let samples: Vec<Mat2> = (0..=4)
            .map(|i| [[0.0, 1.0 + 0.25 * i as f64], [1.0, 0.0]])
            .collect();
        let spec = EdgeSpec {
            m: CoefficientField::Tabulated(samples),
            n: None,
            eigenvectors: None,
        };
        let sys = EdgeSystem::new(0, spec, 32, &TOL).unwrap();
        assert!(sys.has_lower_order());
        assert!(mat2_max_abs(&sys.lower_order_at_node(16)) > 1e-3);
        for i in 0..=32 {
            let x = i as f64 / 32.0;
            let k = 1.0 + x;
            assert!((sys.eigenvalues(Component::Plus)[i] - k.sqrt()).abs() < 1e-12);
        }
    }
}
