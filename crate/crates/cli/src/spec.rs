//! The `.alg` spec-file format (TOML) and its conversion to engine types.
//!
//! Indices in files are 1-based over the fibre, matching the names `e1..en`.

use std::collections::BTreeMap;
use std::path::Path;

use affine_algebroid::dynamics::StepConfig;
use affine_algebroid::symkernel::{parse, SymError};
use affine_algebroid::{AffineAlgebroid, AlgebroidError, Chart, Expr};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed spec file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("in {at}: {source}")]
    Expr { at: String, source: SymError },
    #[error("in {at}: {message}")]
    Semantic { at: String, message: String },
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub base: Vec<String>,
    /// Fibre coordinate names; `e_α` pairs with the `α`-th entry.
    #[serde(default)]
    pub fiber: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lagrangian: Option<String>,
    #[serde(default)]
    pub anchor: AnchorSpec,
    #[serde(default)]
    pub structure: StructureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrate: Option<IntegrateSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorSpec {
    #[serde(default)]
    pub rho0: Vec<String>,
    /// Rows are base coordinates, columns fibre indices.
    #[serde(default)]
    pub rho: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    #[serde(default, rename = "C0", skip_serializing_if = "Vec::is_empty")]
    pub c0: Vec<C0Entry>,
    #[serde(default, rename = "C", skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<CEntry>,
}

/// `C^γ_{0β}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct C0Entry {
    pub gamma: usize,
    pub beta: usize,
    pub value: String,
}

/// `C^γ_{αβ}` with `α < β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CEntry {
    pub gamma: usize,
    pub alpha: usize,
    pub beta: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateSpec {
    /// Value for every base and fibre coordinate.
    pub initial: BTreeMap<String, f64>,
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub monitors: Vec<MonitorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSpec {
    pub name: String,
    pub expr: String,
}

/// A loaded spec: the algebroid plus the optional Lagrangian and run setup.
#[derive(Debug, Clone)]
pub struct Model {
    pub id: String,
    pub algebroid: AffineAlgebroid,
    pub lagrangian: Option<Expr>,
    pub integrate: Option<IntegrateBlock>,
}

#[derive(Debug, Clone)]
pub struct IntegrateBlock {
    /// Ordered as the chart on `E`.
    pub initial: Vec<f64>,
    pub step: StepConfig,
    pub monitors: Vec<(String, Expr)>,
}

fn expr(text: &str, chart: &Chart, at: impl Into<String>) -> Result<Expr, SpecError> {
    parse(text, chart).map_err(|source| SpecError::Expr { at: at.into(), source })
}

fn semantic(at: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Semantic { at: at.into(), message: message.into() }
}

impl SpecFile {
    pub fn from_toml(text: &str) -> Result<Self, SpecError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec files only hold strings, integers and floats")
    }

    /// Check indices and parse every expression over its chart.
    pub fn build(&self, id: &str) -> Result<Model, SpecError> {
        let base = Chart::base(self.base.iter().cloned()).map_err(|source| SpecError::Expr { at: "base".into(), source })?;
        let m = base.len();
        let n = self.fiber.len();
        if self.anchor.rho0.len() != m {
            return Err(semantic("anchor.rho0", format!("expected {m} entries, found {}", self.anchor.rho0.len())));
        }
        if self.anchor.rho.len() != m {
            return Err(semantic("anchor.rho", format!("expected {m} rows, found {}", self.anchor.rho.len())));
        }
        let rho0 = self
            .anchor
            .rho0
            .iter()
            .enumerate()
            .map(|(i, s)| expr(s, &base, format!("anchor.rho0[{}]", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rho = Vec::with_capacity(m);
        for (i, row) in self.anchor.rho.iter().enumerate() {
            if row.len() != n {
                return Err(semantic(format!("anchor.rho[{}]", i + 1), format!("expected {n} columns, found {}", row.len())));
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(a, s)| expr(s, &base, format!("anchor.rho[{}][{}]", i + 1, a + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            rho.push(parsed);
        }
        let in_range = |at: &str, k: usize| {
            if (1..=n).contains(&k) {
                Ok(k - 1)
            } else {
                Err(semantic(at, format!("index {k} outside 1..={n}")))
            }
        };
        let mut c0 = Vec::new();
        for (k, e) in self.structure.c0.iter().enumerate() {
            let at = format!("structure.C0[{}]", k + 1);
            c0.push((in_range(&at, e.gamma)?, in_range(&at, e.beta)?, expr(&e.value, &base, &at)?));
        }
        let mut c = Vec::new();
        for (k, e) in self.structure.c.iter().enumerate() {
            let at = format!("structure.C[{}]", k + 1);
            if e.alpha >= e.beta {
                return Err(semantic(&at, format!("need alpha < beta, got ({}, {})", e.alpha, e.beta)));
            }
            c.push((in_range(&at, e.gamma)?, in_range(&at, e.alpha)?, in_range(&at, e.beta)?, expr(&e.value, &base, &at)?));
        }
        let algebroid = AffineAlgebroid::new(base, self.fiber.clone(), rho0, rho, c0, c)?;
        let total = algebroid.total_chart();
        let lagrangian = self.lagrangian.as_deref().map(|s| expr(s, &total, "lagrangian")).transpose()?;
        let integrate = self.integrate.as_ref().map(|b| b.build(&total)).transpose()?;
        Ok(Model { id: id.to_string(), algebroid, lagrangian, integrate })
    }

    /// Serialize a model back to file form; zero structure entries are dropped.
    pub fn from_model(model: &Model) -> Self {
        let a = &model.algebroid;
        let m = a.base().len();
        let n = a.fiber_dim();
        let anchor = AnchorSpec {
            rho0: (0..m).map(|i| a.rho0(i).to_string()).collect(),
            rho: (0..m).map(|i| (0..n).map(|al| a.rho(i, al).to_string()).collect()).collect(),
        };
        let mut structure = StructureSpec::default();
        for g in 0..n {
            for b in 0..n {
                let v = a.c0(g, b);
                if !v.is_literal_zero() {
                    structure.c0.push(C0Entry { gamma: g + 1, beta: b + 1, value: v.to_string() });
                }
                for al in 0..b {
                    let v = a.c(g, al, b);
                    if !v.is_literal_zero() {
                        structure.c.push(CEntry { gamma: g + 1, alpha: al + 1, beta: b + 1, value: v.to_string() });
                    }
                }
            }
        }
        let names = a.total_chart().names().to_vec();
        let integrate = model.integrate.as_ref().map(|b| IntegrateSpec {
            initial: names.iter().cloned().zip(b.initial.iter().copied()).collect(),
            t0: b.step.t0,
            t1: b.step.t1,
            h: b.step.h,
            monitors: b.monitors.iter().map(|(name, e)| MonitorSpec { name: name.clone(), expr: e.to_string() }).collect(),
        });
        SpecFile {
            base: a.base().names().to_vec(),
            fiber: a.fiber().to_vec(),
            lagrangian: model.lagrangian.as_ref().map(|l| l.to_string()),
            anchor,
            structure,
            integrate,
        }
    }
}

impl IntegrateSpec {
    fn build(&self, chart: &Chart) -> Result<IntegrateBlock, SpecError> {
        if let Some(extra) = self.initial.keys().find(|k| !chart.contains(k)) {
            return Err(semantic("integrate.initial", format!("`{extra}` is not a coordinate")));
        }
        let initial = chart
            .names()
            .iter()
            .map(|n| self.initial.get(n).copied().ok_or_else(|| semantic("integrate.initial", format!("missing `{n}`"))))
            .collect::<Result<_, _>>()?;
        let monitors = self
            .monitors
            .iter()
            .map(|mon| Ok((mon.name.clone(), expr(&mon.expr, chart, format!("integrate.monitors.{}", mon.name))?)))
            .collect::<Result<_, SpecError>>()?;
        Ok(IntegrateBlock { initial, step: StepConfig { t0: self.t0, t1: self.t1, h: self.h }, monitors })
    }
}

/// Read and build a spec file; the id is the file stem.
pub fn load(path: &Path) -> Result<Model, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    SpecFile::from_toml(&text)?.build(&id)
}
