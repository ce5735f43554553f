//! `check`, `simulate` and `resolvent` on a validated scenario.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use kirchnet_core::edge::Tolerances;
use kirchnet_core::error::ResolventError;
use kirchnet_core::flow::{lp_norm, EvolveOptions, NetworkState};
use kirchnet_core::network::{CheckReport, Network};
use kirchnet_core::resolvent::{laplace_residual, ResolventWorkspace};
use kirchnet_core::scenarios::Scenario;

use crate::config::OutputSection;
use crate::error::CliError;
use crate::report::{self, NormRow, ResolventRow, ResolventStatus};

/// Laplace-transform outputs per explicit window.
pub const LAPLACE_STEPS_PER_WINDOW: usize = 8;

pub fn network(s: &Scenario) -> Result<Network, CliError> {
    Ok(s.network(&Tolerances::default())?)
}

/// Solvability report; an unsolvable network is a report, not an error.
pub fn check(s: &Scenario) -> Result<CheckReport, CliError> {
    Ok(network(s)?.check())
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub states: Vec<NetworkState>,
    pub norms: Vec<NormRow>,
}

pub fn simulate(s: &Scenario) -> Result<Simulation, CliError> {
    let net = network(s)?;
    let tr = net.transport()?;
    let coupling = if s.solver.coupling {
        net.coupling()
    } else {
        None
    };
    let opts = EvolveOptions {
        max_step: s.solver.max_step,
        coupling: coupling.as_ref(),
    };
    let f = s.initial_state(&net);
    let states = tr
        .evolve(&f, &s.solver.times(), &opts)
        .map_err(|e| CliError::from(kirchnet_core::error::Error::from(e)))?;
    let norms = states
        .iter()
        .map(|st| {
            let lp = s
                .solver
                .p_exponents
                .iter()
                .map(|&p| lp_norm(st, p))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::from(kirchnet_core::error::Error::from(e)))?;
            Ok(NormRow {
                t: st.t,
                lp,
                c_norm: tr.c_norm(st),
                energy: net.energy(st),
                mass: net.mass(st),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Simulation { states, norms })
}

/// One row per `lambda`, applied to the initial data.
pub fn resolvent_sweep(s: &Scenario) -> Result<Vec<ResolventRow>, CliError> {
    let net = network(s)?;
    let tr = net.transport()?;
    let f = s.initial_state(&net);
    let tol = *net.tolerances();
    s.resolvent
        .lambdas
        .iter()
        .map(|&lambda| {
            let mut row = ResolventRow {
                lambda,
                status: ResolventStatus::Solvable,
                rcond: None,
                fd_residual: None,
                boundary_residual: None,
                laplace_residual: None,
            };
            let ws = match ResolventWorkspace::new(&tr, lambda, &tol) {
                Ok(ws) => ws,
                Err(ResolventError::ExponentRange { .. }) => {
                    row.status = ResolventStatus::ExponentRange;
                    return Ok(row);
                }
                Err(e) => return Err(core_err(e)),
            };
            row.rcond = Some(ws.rcond());
            let r = match ws.apply(&f) {
                Ok(r) => r,
                Err(ResolventError::SingularBoundaryMatrix { .. }) => {
                    row.status = ResolventStatus::Singular;
                    return Ok(row);
                }
                Err(e) => return Err(core_err(e)),
            };
            row.fd_residual = Some(ws.fd_residual(&f, &r));
            row.boundary_residual = Some(ws.boundary_residual(&r));
            if let Some(t_max) = s.resolvent.laplace_t_max {
                if lambda > 0.0 {
                    row.laplace_residual = Some(
                        laplace_residual(&ws, &f, t_max, LAPLACE_STEPS_PER_WINDOW * s.solver.grid)
                            .map_err(core_err)?,
                    );
                }
            }
            Ok(row)
        })
        .collect()
}

fn core_err(e: ResolventError) -> CliError {
    kirchnet_core::error::Error::from(e).into()
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(format!("creating {}", path.display()), e))
}

/// Writes the trajectory and norms files into `dir`; returns their paths.
pub fn write_simulation(
    sim: &Simulation,
    exponents: &[f64],
    dir: &Path,
    names: &OutputSection,
) -> Result<[std::path::PathBuf; 2], CliError> {
    let traj = dir.join(&names.trajectory);
    let norms = dir.join(&names.norms);
    report::write_trajectory(create(&traj)?, &sim.states)?;
    report::write_norms(create(&norms)?, exponents, &sim.norms)?;
    Ok([traj, norms])
}

pub fn write_resolvent(
    rows: &[ResolventRow],
    dir: &Path,
    names: &OutputSection,
) -> Result<std::path::PathBuf, CliError> {
    let path = dir.join(&names.resolvent);
    report::write_resolvent(create(&path)?, rows)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kirchnet_core::scenarios::{absorbing_edge, telegraph_dirichlet};

    #[test]
    fn zero_end_time_returns_initial_data() {
        let mut s = telegraph_dirichlet();
        s.solver.t_end = 0.0;
        s.solver.output_times.clear();
        let sim = simulate(&s).unwrap();
        let net = network(&s).unwrap();
        assert_eq!(sim.states.len(), 1);
        assert_eq!(sim.states[0].values, s.initial_state(&net).values);
    }

    #[test]
    fn absorbing_sweep_is_solvable() {
        let rows = resolvent_sweep(&absorbing_edge()).unwrap();
        assert!(rows.iter().all(|r| r.solvable()));
        assert!(rows.iter().all(|r| r.laplace_residual.is_some()));
    }
}
