//! Check report and CSV writers.

use std::io::Write;

use kirchnet_core::flow::NetworkState;
use kirchnet_core::network::CheckReport;

use crate::error::CliError;

/// Check report as two CSV blocks separated by a blank line: the per-vertex
/// table, then `quantity,value` pairs with the global verdict and the `|B|`
/// column sums.
pub fn check_text(r: &CheckReport) -> String {
    let mut s = String::from("vertex,class,valency,k,local_solvable,rcond,rcond_equilibrated\n");
    for v in &r.vertices {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            v.label,
            v.class.name(),
            v.valency,
            v.k,
            v.solvable,
            num(v.rcond),
            num(v.rcond_equilibrated)
        ));
    }
    s.push('\n');
    s.push_str("quantity,value\n");
    s.push_str(&format!("edges,{}\n", r.edges));
    let alpha: Vec<String> = r.alpha.iter().map(u8::to_string).collect();
    s.push_str(&format!("alpha,{}\n", alpha.join(" ")));
    s.push_str(&format!("total_conditions,{}\n", r.total_conditions));
    s.push_str(&format!("expected_conditions,{}\n", 2 * r.edges));
    match &r.global {
        Ok(rcond) => {
            s.push_str("global_solvable,true\n");
            s.push_str(&format!("global_rcond,{}\n", num(*rcond)));
        }
        Err(e) => {
            s.push_str("global_solvable,false\n");
            s.push_str(&format!(
                "global_error,\"{}\"\n",
                e.to_string().replace('"', "'")
            ));
        }
    }
    for (j, c) in r.column_sums.iter().enumerate() {
        s.push_str(&format!("column_sum_{j},{}\n", num(*c)));
    }
    if let Some(case) = r.case {
        s.push_str(&format!("case,{}\n", case.name()));
    }
    s
}

/// Shortest round-trip formatting, scientific outside `[1e-4, 1e7)`, with
/// `-0` folded to `0`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if (1e-4..1e7).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `t,arc,node,x,value` rows, one per grid node of every arc.
pub fn write_trajectory<W: Write>(out: W, states: &[NetworkState]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "arc", "node", "x", "value"])?;
    for s in states {
        let t = num(s.t);
        for (arc, vals) in s.values.iter().enumerate() {
            let g = vals.len() - 1;
            for (i, v) in vals.iter().enumerate() {
                let x = i as f64 / g as f64;
                w.write_record([&t, &arc.to_string(), &i.to_string(), &num(x), &num(*v)])?;
            }
        }
    }
    w.flush()
        .map_err(|e| CliError::io("writing trajectory", e))?;
    Ok(())
}

/// One row of the norms file.
#[derive(Clone, Debug, PartialEq)]
pub struct NormRow {
    pub t: f64,
    pub lp: Vec<f64>,
    pub c_norm: f64,
    pub energy: f64,
    pub mass: f64,
}

pub fn write_norms<W: Write>(out: W, exponents: &[f64], rows: &[NormRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(exponents.iter().map(|p| format!("l{}", num(*p))));
    header.extend(["c_norm", "energy", "mass"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![num(r.t)];
        rec.extend(r.lp.iter().map(|v| num(*v)));
        rec.extend([num(r.c_norm), num(r.energy), num(r.mass)]);
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io("writing norms", e))?;
    Ok(())
}

/// Outcome of one resolvent evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolventStatus {
    Solvable,
    Singular,
    ExponentRange,
}

impl ResolventStatus {
    pub fn name(self) -> &'static str {
        match self {
            ResolventStatus::Solvable => "solvable",
            ResolventStatus::Singular => "singular",
            ResolventStatus::ExponentRange => "exponent-range",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventRow {
    pub lambda: f64,
    pub status: ResolventStatus,
    pub rcond: Option<f64>,
    pub fd_residual: Option<f64>,
    pub boundary_residual: Option<f64>,
    pub laplace_residual: Option<f64>,
}

impl ResolventRow {
    pub fn solvable(&self) -> bool {
        self.status == ResolventStatus::Solvable
    }
}

pub fn write_resolvent<W: Write>(out: W, rows: &[ResolventRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "lambda",
        "solvable",
        "status",
        "rcond",
        "fd_residual",
        "boundary_residual",
        "laplace_residual",
    ])?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for r in rows {
        w.write_record([
            num(r.lambda),
            r.solvable().to_string(),
            r.status.name().to_string(),
            opt(r.rcond),
            opt(r.fd_residual),
            opt(r.boundary_residual),
            opt(r.laplace_residual),
        ])?;
    }
    w.flush()
        .map_err(|e| CliError::io("writing resolvent table", e))?;
    Ok(())
}
