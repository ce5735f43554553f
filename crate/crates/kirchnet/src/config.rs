//! TOML run configuration and its mapping to [`Scenario`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use kirchnet_core::edge::{CoefficientField, EdgeSpec};
use kirchnet_core::linalg::{Mat2, Matrix};
use kirchnet_core::scenarios::{Profile, ResolventSettings, Scenario, SolverSettings};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Smallest accepted number of cells per edge.
pub const MIN_GRID: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    pub graph: GraphSection,
    #[serde(rename = "edge", default)]
    pub edges: Vec<EdgeSection>,
    #[serde(rename = "vertex_condition", default)]
    pub vertex_conditions: Vec<VertexConditionSection>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub resolvent: ResolventSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    /// `[tail, head]` vertex labels; edge ids are positions in this list.
    pub edges: Vec<[usize; 2]>,
}

/// Constant matrix, samples at uniform nodes of `[0, 1]`, or a CSV file of
/// samples (one row `m11,m12,m21,m22` per node, header optional).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Constant(Mat2),
    Tabulated { samples: Vec<Mat2> },
    Csv { csv: PathBuf },
}

impl MatrixSpec {
    fn field(&self) -> Result<CoefficientField, CliError> {
        match self {
            MatrixSpec::Constant(m) => Ok(CoefficientField::Constant(*m)),
            MatrixSpec::Tabulated { samples } => Ok(CoefficientField::Tabulated(samples.clone())),
            MatrixSpec::Csv { csv } => Err(CliError::Validation(format!(
                "matrix file {} was not loaded",
                csv.display()
            ))),
        }
    }

    /// Replaces a `csv` reference (relative to `base`) by its samples.
    fn resolve(&mut self, base: &Path) -> Result<(), CliError> {
        let MatrixSpec::Csv { csv } = self else {
            return Ok(());
        };
        let path = base.join(&*csv);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        let mut samples = Vec::new();
        let mut reader = ::csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(::csv::Trim::All)
            .from_reader(text.as_bytes());
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            let vals: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match vals {
                Ok(v) if v.len() == 4 => samples.push([[v[0], v[1]], [v[2], v[3]]]),
                Err(_) if i == 0 => continue,
                _ => {
                    return Err(CliError::Parse(format!(
                        "{} line {}: expected 4 numbers m11,m12,m21,m22",
                        path.display(),
                        i + 1
                    )))
                }
            }
        }
        *self = MatrixSpec::Tabulated { samples };
        Ok(())
    }

    fn from_field(f: &CoefficientField) -> Self {
        match f {
            CoefficientField::Constant(m) => MatrixSpec::Constant(*m),
            CoefficientField::Tabulated(s) => MatrixSpec::Tabulated { samples: s.clone() },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    Sine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    Bump {
        center: f64,
        width: f64,
        height: f64,
    },
}

impl From<ProfileSpec> for Profile {
    fn from(p: ProfileSpec) -> Self {
        match p {
            ProfileSpec::Zero => Profile::Zero,
            ProfileSpec::Constant { value } => Profile::Constant(value),
            ProfileSpec::Sine {
                amplitude,
                frequency,
                phase,
                offset,
            } => Profile::Sine {
                amplitude,
                frequency,
                phase,
                offset,
            },
            ProfileSpec::Bump {
                center,
                width,
                height,
            } => Profile::Bump {
                center,
                width,
                height,
            },
        }
    }
}

impl From<Profile> for ProfileSpec {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Zero => ProfileSpec::Zero,
            Profile::Constant(value) => ProfileSpec::Constant { value },
            Profile::Sine {
                amplitude,
                frequency,
                phase,
                offset,
            } => ProfileSpec::Sine {
                amplitude,
                frequency,
                phase,
                offset,
            },
            Profile::Bump {
                center,
                width,
                height,
            } => ProfileSpec::Bump {
                center,
                width,
                height,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSection {
    pub id: usize,
    pub m: MatrixSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<MatrixSpec>,
    /// Explicit `[f+ | f-]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Mat2>,
    #[serde(default)]
    pub p1: ProfileSpec,
    #[serde(default)]
    pub p2: ProfileSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexConditionSection {
    pub vertex: usize,
    /// Rows of `Phi_v`, columns `(p1, p2)` per incident edge in edge-id order.
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub grid: usize,
    pub t_end: f64,
    #[serde(default)]
    pub output_times: Vec<f64>,
    #[serde(default = "default_exponents")]
    pub p_exponents: Vec<f64>,
    #[serde(default = "default_true")]
    pub coupling: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
}

fn default_exponents() -> Vec<f64> {
    vec![1.0, 2.0]
}

fn default_true() -> bool {
    true
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            grid: s.grid,
            t_end: s.t_end,
            output_times: s.output_times,
            p_exponents: s.p_exponents,
            coupling: s.coupling,
            max_step: s.max_step,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventSection {
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laplace_t_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_trajectory")]
    pub trajectory: String,
    #[serde(default = "default_norms")]
    pub norms: String,
    #[serde(default = "default_resolvent")]
    pub resolvent: String,
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}
fn default_trajectory() -> String {
    "trajectory.csv".into()
}
fn default_norms() -> String {
    "norms.csv".into()
}
fn default_resolvent() -> String {
    "resolvent.csv".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_dir(),
            trajectory: default_trajectory(),
            norms: default_norms(),
            resolvent: default_resolvent(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Reads and parses `path`, loading CSV matrix files relative to it.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for e in &mut cfg.edges {
            e.m.resolve(base)?;
            if let Some(n) = &mut e.n {
                n.resolve(base)?;
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    /// Validated scenario. Checks references and sizes; solvability is left
    /// to the engine.
    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let invalid = |msg: String| Err(CliError::Validation(msg));
        let m = self.graph.edges.len();
        if m == 0 {
            return invalid("[graph] edges is empty".into());
        }
        let mut slots: Vec<Option<&EdgeSection>> = vec![None; m];
        for e in &self.edges {
            match slots.get_mut(e.id) {
                None => {
                    return invalid(format!(
                        "[[edge]] id {} is not in [graph] edges (0..{m})",
                        e.id
                    ))
                }
                Some(Some(_)) => return invalid(format!("[[edge]] id {} is defined twice", e.id)),
                Some(slot) => *slot = Some(e),
            }
        }
        let mut specs = Vec::with_capacity(m);
        let mut initial = Vec::with_capacity(m);
        for (j, slot) in slots.iter().enumerate() {
            let Some(e) = slot else {
                return invalid(format!("edge {j} has no [[edge]] section"));
            };
            specs.push(EdgeSpec {
                m: e.m.field()?,
                n: e.n.as_ref().map(MatrixSpec::field).transpose()?,
                eigenvectors: e.eigenvectors,
            });
            initial.push([e.p1.into(), e.p2.into()]);
        }

        let labels: std::collections::BTreeSet<usize> =
            self.graph.edges.iter().flat_map(|e| [e[0], e[1]]).collect();
        let mut conditions = BTreeMap::new();
        for vc in &self.vertex_conditions {
            if !labels.contains(&vc.vertex) {
                return invalid(format!(
                    "[[vertex_condition]] vertex {} is not in the graph",
                    vc.vertex
                ));
            }
            if let Some(r) = vc.rows.iter().find(|r| r.len() != vc.rows[0].len()) {
                return invalid(format!(
                    "[[vertex_condition]] vertex {}: rows have different lengths ({} and {})",
                    vc.vertex,
                    vc.rows[0].len(),
                    r.len()
                ));
            }
            let valency = self
                .graph
                .edges
                .iter()
                .map(|e| (e[0] == vc.vertex) as usize + (e[1] == vc.vertex) as usize)
                .sum::<usize>();
            let phi = if vc.rows.is_empty() {
                Matrix::zeros(0, 2 * valency)
            } else {
                Matrix::from_rows(&vc.rows)
            };
            if conditions.insert(vc.vertex, phi).is_some() {
                return Err(CliError::Validation(
                    kirchnet_core::error::KirchhoffError::DuplicateCondition(vc.vertex).to_string(),
                ));
            }
        }

        let s = &self.solver;
        if s.grid < MIN_GRID {
            return invalid(format!("[solver] grid = {} is below {MIN_GRID}", s.grid));
        }
        if !(s.t_end >= 0.0) || !s.t_end.is_finite() {
            return invalid(format!(
                "[solver] t_end = {} must be finite and >= 0",
                s.t_end
            ));
        }
        if s.output_times
            .iter()
            .any(|t| !(*t >= 0.0) || !t.is_finite())
            || s.output_times.windows(2).any(|w| w[1] < w[0])
        {
            return invalid("[solver] output_times must be finite, >= 0 and nondecreasing".into());
        }
        if let Some(p) = s
            .p_exponents
            .iter()
            .find(|p| !(**p >= 1.0) || !p.is_finite())
        {
            return invalid(format!("[solver] p_exponents: {p} is not in [1, inf)"));
        }
        if let Some(h) = s.max_step {
            if !(h > 0.0) || !h.is_finite() {
                return invalid(format!("[solver] max_step = {h} must be positive"));
            }
        }
        if let Some(t) = self.resolvent.laplace_t_max {
            if !(t > 0.0) || !t.is_finite() {
                return invalid(format!("[resolvent] laplace_t_max = {t} must be positive"));
            }
        }
        Ok(Scenario {
            name: self.name.clone(),
            edges: self.graph.edges.iter().map(|e| (e[0], e[1])).collect(),
            specs,
            conditions,
            initial,
            solver: SolverSettings {
                grid: s.grid,
                t_end: s.t_end,
                output_times: s.output_times.clone(),
                p_exponents: s.p_exponents.clone(),
                coupling: s.coupling,
                max_step: s.max_step,
            },
            resolvent: ResolventSettings {
                lambdas: self.resolvent.lambdas.clone(),
                laplace_t_max: self.resolvent.laplace_t_max,
            },
            facts: Vec::new(),
        })
    }

    /// Config describing `s`; expected facts are not exported.
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            name: s.name.clone(),
            graph: GraphSection {
                edges: s.edges.iter().map(|&(a, b)| [a, b]).collect(),
            },
            edges: s
                .specs
                .iter()
                .zip(&s.initial)
                .enumerate()
                .map(|(id, (spec, init))| EdgeSection {
                    id,
                    m: MatrixSpec::from_field(&spec.m),
                    n: spec.n.as_ref().map(MatrixSpec::from_field),
                    eigenvectors: spec.eigenvectors,
                    p1: init[0].into(),
                    p2: init[1].into(),
                })
                .collect(),
            vertex_conditions: s
                .conditions
                .iter()
                .map(|(&vertex, phi)| VertexConditionSection {
                    vertex,
                    rows: phi.to_rows(),
                })
                .collect(),
            solver: SolverSection {
                grid: s.solver.grid,
                t_end: s.solver.t_end,
                output_times: s.solver.output_times.clone(),
                p_exponents: s.solver.p_exponents.clone(),
                coupling: s.solver.coupling,
                max_step: s.solver.max_step,
            },
            resolvent: ResolventSection {
                lambdas: s.resolvent.lambdas.clone(),
                laplace_t_max: s.resolvent.laplace_t_max,
            },
            output: OutputSection::default(),
        }
    }

    /// Applies `--grid`, `--tend` and `--lambda`.
    pub fn apply_overrides(&mut self, grid: Option<usize>, t_end: Option<f64>, lambdas: &[f64]) {
        if let Some(g) = grid {
            self.solver.grid = g;
        }
        if let Some(t) = t_end {
            self.solver.t_end = t;
            if !self.solver.output_times.is_empty() {
                self.solver.output_times.retain(|x| *x <= t);
                if self.solver.output_times.last() != Some(&t) {
                    self.solver.output_times.push(t);
                }
            }
        }
        if !lambdas.is_empty() {
            self.resolvent.lambdas = lambdas.to_vec();
        }
    }
}
