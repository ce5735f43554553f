//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use kirchnet_core::edge::{EdgeSpec, Tolerances};
use kirchnet_core::flow::{EvolveOptions, NetworkState, Transport};
use kirchnet_core::graph::Endpoint;
use kirchnet_core::kirchhoff::stack_local_resolutions;
use kirchnet_core::linalg::Matrix;
use kirchnet_core::network::Network;
use kirchnet_core::resolvent::{laplace_check, ResolventWorkspace};
use kirchnet_core::scenarios::{
    absorbing_edge, build_saint_venant_star, compare_kmn_kirchhoff, random_walk_network,
    telegraph_dirichlet, telegraph_mixed,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn c1_boundary_counting() -> Outcome {
    for n in [3usize, 5, 8] {
        let s = build_saint_venant_star(n, 2.0, 1.0, 1.0).map_err(|e| e.to_string())?;
        let net = s.network(&tol()).map_err(|e| e.to_string())?;
        let r = net.check();
        let k = |v: usize| r.vertex(v).map(|x| x.k);
        ensure(k(0) == Some(2), || format!("N={n}: k_v0 = {:?}", k(0)))?;
        ensure(k(1) == Some(2 * n - 2), || {
            format!("N={n}: k_v1 = {:?}", k(1))
        })?;
        for j in 2..=n {
            ensure(k(j) == Some(0), || format!("N={n}: k_v{j} = {:?}", k(j)))?;
        }
        ensure(r.total_conditions == 2 * n, || {
            format!("N={n}: sum k = {}", r.total_conditions)
        })?;
    }
    Ok("N = 3, 5, 8: k_v0 = 2, k_v1 = 2N-2, heads 0, sum = 2m".into())
}

fn c2_spectrum_probe() -> Outcome {
    let probe = |net: &Network, lambda: f64| -> Result<(bool, f64), String> {
        let tr = net.transport().map_err(|e| e.to_string())?;
        let ws = ResolventWorkspace::new(&tr, lambda, &tol()).map_err(|e| e.to_string())?;
        Ok((ws.is_solvable(), ws.rcond()))
    };
    let d = telegraph_dirichlet()
        .network(&tol())
        .map_err(|e| e.to_string())?;
    let (s0, r0) = probe(&d, 0.0)?;
    ensure(!s0 && r0 < 1e-12, || {
        format!("Dirichlet lambda=0: solvable={s0}, rcond={r0:e}")
    })?;
    for l in [-1.0, -0.1, 0.1, 1.0] {
        let (s, r) = probe(&d, l)?;
        ensure(s, || format!("Dirichlet lambda={l}: rcond {r:e}"))?;
    }
    let m = telegraph_mixed()
        .network(&tol())
        .map_err(|e| e.to_string())?;
    let (sm, rm) = probe(&m, 0.0)?;
    ensure(sm, || format!("mixed lambda=0: rcond {rm:e}"))?;
    Ok(format!(
        "Dirichlet rcond(0) = {r0:.1e}; mixed rcond(0) = {rm:.3}"
    ))
}

/// Closed-form resolvent of `lambda p1 - p2' = 1`, `lambda p2 - p1' = x`,
/// `p1(0) = p2(1) = 0`.
fn mixed_closed_form(lambda: f64, x: f64) -> [f64; 2] {
    let e = |a: f64, x: f64| ((a * x).exp() - 1.0) / a;
    let s = |a: f64, x: f64| ((a * x).exp() - 1.0 - a * x) / (a * a);
    let jp1 = |x: f64| e(lambda, x) + e(-lambda, x);
    let jm1 = |x: f64| e(lambda, x) - e(-lambda, x);
    let jp2 = |x: f64| s(lambda, x) + s(-lambda, x);
    let jm2 = |x: f64| s(lambda, x) - s(-lambda, x);
    let rhs = jp1(1.0) + jm2(1.0);
    let a1 = rhs / (lambda.exp() + (-lambda).exp());
    let a2 = -a1;
    let (ep, em) = ((lambda * x).exp(), (-lambda * x).exp());
    [
        (a1 * ep + a2 * em) / 2.0 - (jm1(x) + jp2(x)) / 2.0,
        (a1 * ep - a2 * em) / 2.0 - (jp1(x) + jm2(x)) / 2.0,
    ]
}

fn c3_closed_form_resolvent() -> Outcome {
    let mut s = telegraph_mixed();
    s.solver.grid = 256;
    let net = s.network(&tol()).map_err(|e| e.to_string())?;
    let g = net.grid();
    let f: Vec<[f64; 2]> = (0..=g).map(|i| [1.0, i as f64 / g as f64]).collect();
    let tr = net.transport().map_err(|e| e.to_string())?;
    let ws = ResolventWorkspace::new(&tr, 1.0, &tol()).map_err(|e| e.to_string())?;
    let r = ws
        .apply(&net.state_from_fields(&[f]))
        .map_err(|e| e.to_string())?;
    let p = &net.fields_from_state(&r)[0];
    let mut err = 0.0f64;
    for (i, pi) in p.iter().enumerate() {
        let exact = mixed_closed_form(1.0, i as f64 / g as f64);
        err = err
            .max((pi[0] - exact[0]).abs())
            .max((pi[1] - exact[1]).abs());
    }
    ensure(err <= 1e-8, || format!("max error {err:e}"))?;
    Ok(format!("max error {err:.2e} at G = {g}"))
}

fn c4_wave_oracle() -> Outcome {
    let mut s = telegraph_dirichlet();
    s.solver.grid = 256;
    let net = s.network(&tol()).map_err(|e| e.to_string())?;
    let tr = net.transport().map_err(|e| e.to_string())?;
    let f = s.initial_state(&net);
    let times: Vec<f64> = (0..=16).map(|i| i as f64 * 0.125).collect();
    let out = tr
        .evolve(&f, &times, &EvolveOptions::default())
        .map_err(|e| e.to_string())?;
    let e0 = net.energy(&f);
    let g = net.grid();
    let mut err = 0.0f64;
    let mut drift = 0.0f64;
    for st in &out {
        let t = st.t;
        let p = &net.fields_from_state(st)[0];
        for (i, pi) in p.iter().enumerate() {
            let x = i as f64 / g as f64;
            let exact = [
                (PI * x).sin() * (PI * t).cos(),
                (PI * x).cos() * (PI * t).sin(),
            ];
            err = err
                .max((pi[0] - exact[0]).abs())
                .max((pi[1] - exact[1]).abs());
        }
        drift = drift.max((net.energy(st) - e0).abs());
    }
    ensure(err <= 2e-3, || format!("max error {err:e}"))?;
    ensure(drift <= 1e-6, || format!("energy drift {drift:e}"))?;
    Ok(format!("max error {err:.2e}, energy drift {drift:.2e}"))
}

const RANDOM_GRID: usize = 64;

/// Random arcs with one uniform speed.
fn random_arcs(rng: &mut StdRng, speed: (f64, f64)) -> (usize, usize, Vec<Vec<f64>>) {
    let n = rng.random_range(2..=6);
    let forward = rng.random_range(0..=n);
    let c = rng.random_range(speed.0..speed.1);
    (n, forward, vec![vec![c; RANDOM_GRID + 1]; n])
}

fn random_state(rng: &mut StdRng, arcs: usize, lo: f64) -> NetworkState {
    NetworkState {
        t: 0.0,
        values: (0..arcs)
            .map(|_| {
                (0..=RANDOM_GRID)
                    .map(|_| rng.random_range(lo..1.0))
                    .collect()
            })
            .collect(),
    }
}

fn c5_contraction() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = f64::NEG_INFINITY;
    for case in 0..50 {
        let (n, forward, speeds) = random_arcs(&mut rng, (0.5, 2.0));
        let mut b = Matrix::zeros(n, n);
        for j in 0..n {
            let target = rng.random_range(0.0..=1.0);
            let col: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let sum: f64 = col.iter().sum();
            for (i, v) in col.iter().enumerate() {
                b[(i, j)] = v / sum * target;
            }
        }
        let tr = Transport::new(b, forward, speeds).map_err(|e| e.to_string())?;
        let f = random_state(&mut rng, n, 0.0);
        let w = tr.window();
        let times: Vec<f64> = (1..=10).map(|k| k as f64 * w).collect();
        let out = tr
            .evolve(&f, &times, &EvolveOptions::default())
            .map_err(|e| e.to_string())?;
        let mut prev = tr.c_norm(&f);
        for st in &out {
            let c = tr.c_norm(st);
            worst = worst.max(c - prev);
            ensure(c <= prev + 1e-8, || {
                format!(
                    "case {case}: c-norm rose from {prev} to {c} at t = {}",
                    st.t
                )
            })?;
            prev = c;
        }
    }
    Ok(format!("50 scenarios, largest increase {worst:.2e}"))
}

fn c6_domination() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst = f64::NEG_INFINITY;
    for case in 0..25 {
        let (n, forward, speeds) = random_arcs(&mut rng, (0.5, 1.0));
        let mut b = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = rng.random_range(-1.0..1.0);
            }
        }
        let abs = b.abs();
        let scale = abs.norm_inf().max(abs.norm_one());
        let b = b.scale(2.0 / scale);
        let tr = Transport::new(b.clone(), forward, speeds).map_err(|e| e.to_string())?;
        let tr_abs = tr.with_flow_matrix(b.abs()).map_err(|e| e.to_string())?;
        let f = random_state(&mut rng, n, -1.0);
        let fa = f.abs();
        let w = tr.window();
        let mut times: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..3.0 * w)).collect();
        times.sort_by(f64::total_cmp);
        let opts = EvolveOptions::default();
        let g = tr.evolve(&f, &times, &opts).map_err(|e| e.to_string())?;
        let ga = tr_abs
            .evolve(&fa, &times, &opts)
            .map_err(|e| e.to_string())?;
        let ws = ResolventWorkspace::new(&tr, 2.0, &tol()).map_err(|e| e.to_string())?;
        let ws_abs = ResolventWorkspace::new(&tr_abs, 2.0, &tol()).map_err(|e| e.to_string())?;
        let r = ws.apply(&f).map_err(|e| e.to_string())?;
        let ra = ws_abs.apply(&fa).map_err(|e| e.to_string())?;
        let pairs = g.iter().zip(&ga).chain(std::iter::once((&r, &ra)));
        for (x, y) in pairs {
            for (u, v) in x.values.iter().zip(&y.values) {
                for (a, b) in u.iter().zip(v) {
                    let excess = a.abs() - b;
                    worst = worst.max(excess);
                    ensure(excess <= 1e-9, || {
                        format!("case {case}: |G_B f| exceeds G_|B| |f| by {excess:e}")
                    })?;
                }
            }
        }
    }
    Ok(format!("25 scenarios, largest excess {worst:.2e}"))
}

/// Overwrites the outgoing-end nodes with `B` times the incoming-end nodes,
/// so the data is continuous along characteristics through the vertices.
fn compatible(tr: &Transport, mut f: NetworkState) -> NetworkState {
    let g = f.grid();
    let fwd = tr.forward_count();
    let incoming: Vec<f64> = (0..tr.arcs())
        .map(|k| {
            if k < fwd {
                f.values[k][g]
            } else {
                f.values[k][0]
            }
        })
        .collect();
    let out = tr.b().mul_vec(&incoming);
    for (k, v) in out.into_iter().enumerate() {
        let i = if k < fwd { 0 } else { g };
        f.values[k][i] = v;
    }
    f
}

fn c7_semigroup() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let opts = EvolveOptions::default();
    for case in 0..30 {
        let (n, forward, speeds) = random_arcs(&mut rng, (0.5, 2.0));
        let mut b = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = rng.random_range(-1.0..1.0);
            }
        }
        let b = b.scale(1.0 / b.norm_inf().max(1e-300));
        let tr = Transport::new(b, forward, speeds).map_err(|e| e.to_string())?;
        let cell = tr.window() / RANDOM_GRID as f64;
        let s = rng.random_range(1..3 * RANDOM_GRID) as f64 * cell;
        let t = rng.random_range(1..3 * RANDOM_GRID) as f64 * cell;
        let f = compatible(&tr, random_state(&mut rng, n, -1.0));
        let whole = tr.evolve(&f, &[s + t], &opts).map_err(|e| e.to_string())?;
        let first = tr.evolve(&f, &[t], &opts).map_err(|e| e.to_string())?;
        let mut mid = first[0].clone();
        mid.t = 0.0;
        let second = tr.evolve(&mid, &[s], &opts).map_err(|e| e.to_string())?;
        let d = whole[0].max_abs_diff(&second[0]);
        worst = worst.max(d);
        ensure(d <= 1e-9, || {
            format!(
                "case {case}: difference {d:e} (n={n}, fwd={forward}, s={s}, t={t}, window={})",
                tr.window()
            )
        })?;
    }
    Ok(format!("30 scenarios, max difference {worst:.2e}"))
}

fn laplace_residual(mut scenario: kirchnet_core::scenarios::Scenario) -> Result<f64, String> {
    scenario.solver.grid = 128;
    let net = scenario.network(&tol()).map_err(|e| e.to_string())?;
    let tr = net.transport().map_err(|e| e.to_string())?;
    let f = scenario.initial_state(&net);
    let dt = tr.window() / (8.0 * net.grid() as f64);
    let steps = (20.0 / dt).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let traj = tr
        .evolve(&f, &times, &EvolveOptions::default())
        .map_err(|e| e.to_string())?;
    let ws = ResolventWorkspace::new(&tr, 5.0, &tol()).map_err(|e| e.to_string())?;
    laplace_check(&ws, &f, &traj).map_err(|e| e.to_string())
}

fn c8_laplace() -> Outcome {
    let d = laplace_residual(telegraph_dirichlet())?;
    let a = laplace_residual(absorbing_edge())?;
    ensure(d <= 1e-3, || format!("Dirichlet residual {d:e}"))?;
    ensure(a <= 1e-3, || format!("absorbing residual {a:e}"))?;
    Ok(format!("residuals: Dirichlet {d:.2e}, absorbing {a:.2e}"))
}

/// Gram determinant of the two functionals, relative.
fn parallel_oracle(a: &[f64], b: &[f64]) -> bool {
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let (aa, bb, ab) = (dot(a, a), dot(b, b), dot(a, b));
    (aa * bb - ab * ab).abs() <= 1e-10 * aa * bb
}

fn c9_kmn() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let mut tuples: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, bool)> = Vec::new();
    tuples.push((vec![2.5], vec![0.3], vec![-1.0], true));
    for i in 0..19 {
        let n = rng.random_range(2..=5);
        let kl = rng.random_range(0.2..5.0);
        let k: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
        let mut l: Vec<f64> = k.iter().map(|k| kl / k).collect();
        let nu: Vec<f64> = (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let equal = i % 2 == 0;
        if !equal {
            let j = rng.random_range(0..n);
            l[j] *= 1.0 + rng.random_range(1e-3..2.0);
        }
        tuples.push((k, l, nu, equal));
    }
    for (k, l, nu, expected) in &tuples {
        let r = compare_kmn_kirchhoff(k, l, nu);
        let oracle = parallel_oracle(&r.kirchhoff, &r.weighted);
        ensure(r.coincide == *expected && oracle == *expected, || {
            format!(
                "K={k:?} L={l:?}: verdict {} oracle {oracle}, expected {expected}",
                r.coincide
            )
        })?;
    }
    Ok(format!("{} tuples", tuples.len()))
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            if m != 0.0 {
                for k in c..n {
                    a[r][k] -= m * a[c][k];
                }
                for k in 0..b[r].len() {
                    b[r][k] -= m * b[c][k];
                }
            }
        }
    }
    for c in (0..n).rev() {
        for k in 0..b[c].len() {
            let mut s = b[c][k];
            for j in c + 1..n {
                s -= a[c][j] * b[j][k];
            }
            b[c][k] = s / a[c][c];
        }
    }
    Some(b)
}

fn random_graph(rng: &mut StdRng) -> Vec<(usize, usize)> {
    let v = rng.random_range(2..=6);
    let mut edges = Vec::new();
    for w in 1..v {
        let u = rng.random_range(0..w);
        edges.push(if rng.random::<bool>() { (u, w) } else { (w, u) });
    }
    for _ in 0..rng.random_range(0..=3) {
        let a = rng.random_range(0..v);
        let b = rng.random_range(0..v);
        if a != b && !edges.contains(&(a, b)) && !edges.contains(&(b, a)) {
            edges.push((a, b));
        }
    }
    edges
}

fn random_edge(rng: &mut StdRng) -> (EdgeSpec, [f64; 2]) {
    let mut lam: [f64; 2] = [rng.random_range(0.3..2.0), rng.random_range(0.3..2.0)];
    for l in lam.iter_mut() {
        if rng.random::<bool>() {
            *l = -*l;
        }
    }
    if (lam[0] - lam[1]).abs() < 0.1 {
        lam[1] = lam[0] + 0.5 * lam[0].signum();
    }
    let (hi, lo) = if lam[0] > lam[1] {
        (lam[0], lam[1])
    } else {
        (lam[1], lam[0])
    };
    let f = [
        [rng.random_range(0.5..1.5), rng.random_range(-1.0..1.0)],
        [rng.random_range(-1.0..1.0), rng.random_range(0.5..1.5)],
    ];
    let det = f[0][0] * f[1][1] - f[0][1] * f[1][0];
    let fi = [
        [f[1][1] / det, -f[0][1] / det],
        [-f[1][0] / det, f[0][0] / det],
    ];
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = f[i][0] * hi * fi[0][j] + f[i][1] * lo * fi[1][j];
        }
    }
    (EdgeSpec::constant(m), [hi, lo])
}

fn c10_local_global() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut attempts = 0;
    let mut arcs_total = 0;
    while done < 50 {
        attempts += 1;
        if attempts > 500 {
            return Err(format!("only {done} valid random networks in 500 attempts"));
        }
        let edges = random_graph(&mut rng);
        let (specs, lams): (Vec<_>, Vec<_>) = edges.iter().map(|_| random_edge(&mut rng)).unzip();
        // Outgoing traces counted independently from the eigenvalue signs.
        let outgoing = |lam: f64, end: Endpoint| (lam > 0.0) == (end == Endpoint::Tail);
        let labels: Vec<usize> = {
            let mut l: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            l.sort();
            l.dedup();
            l
        };
        let incident = |v: usize| -> Vec<(usize, Endpoint)> {
            let mut out = Vec::new();
            for (j, &(a, b)) in edges.iter().enumerate() {
                if a == v {
                    out.push((j, Endpoint::Tail));
                }
                if b == v {
                    out.push((j, Endpoint::Head));
                }
            }
            out
        };
        let mut phi = BTreeMap::new();
        for &v in &labels {
            let inc = incident(v);
            let k: usize = inc
                .iter()
                .map(|&(j, end)| lams[j].iter().filter(|&&l| outgoing(l, end)).count())
                .sum();
            if k > 0 {
                let rows: Vec<Vec<f64>> = (0..k)
                    .map(|_| {
                        (0..2 * inc.len())
                            .map(|_| rng.random_range(-1.0..1.0))
                            .collect()
                    })
                    .collect();
                phi.insert(v, Matrix::from_rows(&rows));
            }
        }
        let net = Network::build(&edges, &specs, &phi, 8, &tol()).map_err(|e| e.to_string())?;
        let report = net.check();
        if report
            .vertices
            .iter()
            .any(|v| !v.solvable || v.rcond_equilibrated < 1e-6)
        {
            continue;
        }
        let global = net.flow_matrix().map_err(|e| e.to_string())?;

        let arcs = net.layout().arcs();
        let m = arcs.len();
        let mut out = vec![vec![0.0; m]; m];
        let mut inn = vec![vec![0.0; m]; m];
        let mut row = 0;
        for &v in &labels {
            let Some(p) = phi.get(&v) else { continue };
            let inc = incident(v);
            for r in 0..p.rows() {
                for (pos, &(j, end)) in inc.iter().enumerate() {
                    let f = net.systems()[j].f_at_end(end.coordinate());
                    for (c, &lam) in lams[j].iter().enumerate() {
                        let coef = p[(r, 2 * pos)] * f[0][c] + p[(r, 2 * pos + 1)] * f[1][c];
                        let arc = arcs
                            .iter()
                            .position(|a| a.edge == j && a.component.index() == c)
                            .ok_or("arc not found")?;
                        if outgoing(lam, end) {
                            out[row][arc] += coef;
                        } else {
                            inn[row][arc] -= coef;
                        }
                    }
                }
                row += 1;
            }
        }
        ensure(row == m, || {
            format!("stacked system has {row} rows for {m} arcs")
        })?;
        let Some(bf) = gauss_solve(out, inn) else {
            return Err("brute-force system singular".into());
        };
        let local = stack_local_resolutions(net.layout(), net.conditions())
            .ok_or("local resolution missing")?;
        let scale = bf.iter().flatten().fold(1.0f64, |s, x| s.max(x.abs()));
        for i in 0..m {
            for j in 0..m {
                let d = ((bf[i][j] - global.b[(i, j)]).abs())
                    .max((local[(i, j)] - global.b[(i, j)]).abs())
                    / scale;
                worst = worst.max(d);
                ensure(d <= 1e-10, || {
                    format!("network {done}: B[{i},{j}] differs by {d:e}")
                })?;
            }
        }
        arcs_total += m;
        done += 1;
    }
    Ok(format!(
        "50 networks ({arcs_total} arcs), max deviation {worst:.2e}"
    ))
}

fn c11_mass() -> Outcome {
    let s = random_walk_network(1.0, 1.0).map_err(|e| e.to_string())?;
    let net = s.network(&tol()).map_err(|e| e.to_string())?;
    ensure(net.grid() == 256, || format!("grid {}", net.grid()))?;
    let tr = net.transport().map_err(|e| e.to_string())?;
    let coupling = net.coupling().ok_or("no coupling")?;
    let f = s.initial_state(&net);
    let times: Vec<f64> = (0..=64).map(|i| i as f64 / 16.0).collect();
    let opts = EvolveOptions {
        max_step: s.solver.max_step,
        coupling: Some(&coupling),
    };
    let out = tr.evolve(&f, &times, &opts).map_err(|e| e.to_string())?;
    let m0 = net.mass(&f);
    let drift = out
        .iter()
        .map(|st| (net.mass(st) - m0).abs())
        .fold(0.0f64, f64::max);
    let e_end = net.energy(out.last().ok_or("no output")?);
    ensure(drift <= 1e-6, || format!("mass drift {drift:e}"))?;
    ensure(e_end < net.energy(&f), || {
        "reaction did not dissipate energy".into()
    })?;
    Ok(format!("mass {m0:.6}, drift {drift:.2e} over [0, 4]"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 11] = [
        (
            1,
            "boundary counting",
            c1_boundary_counting,
            Duration::from_secs(1),
        ),
        (
            2,
            "resolvent spectrum probe",
            c2_spectrum_probe,
            Duration::from_secs(1),
        ),
        (
            3,
            "closed-form resolvent",
            c3_closed_form_resolvent,
            Duration::from_secs(1),
        ),
        (
            4,
            "wave-equation oracle",
            c4_wave_oracle,
            Duration::from_secs(10),
        ),
        (
            5,
            "case-1 contraction",
            c5_contraction,
            Duration::from_secs(30),
        ),
        (6, "domination", c6_domination, Duration::from_secs(30)),
        (7, "semigroup law", c7_semigroup, Duration::from_secs(10)),
        (
            8,
            "Laplace-transform consistency",
            c8_laplace,
            Duration::from_secs(30),
        ),
        (9, "KMN vs Kirchhoff", c9_kmn, Duration::from_secs(1)),
        (
            10,
            "local vs global resolution",
            c10_local_global,
            Duration::from_secs(30),
        ),
        (11, "mass conservation", c11_mass, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(msg) => println!("criterion {id:>2} PASS  {name}: {msg} ({elapsed:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {msg} ({elapsed:.2?})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
