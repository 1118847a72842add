//! Command implementations. Each returns human text and a JSON value;
//! the binary picks one according to `--json`.

use std::fmt::Write as _;

use affine_algebroid::algebroid::{Status, ValidateOptions};
use affine_algebroid::dynamics::{monitor, DynamicsError, Integrator, MonitorTable, StepConfig, Trajectory};
use affine_algebroid::lagrangian::{Lagrangian, LagrangianError};
use affine_algebroid::poisson::PoissonTensor;
use affine_algebroid::prolong::{Forces, ProlongError, ProlongedAlgebroid};
use affine_algebroid::symkernel::{parse, Witness};
use affine_algebroid::{Expr, KForm, ZeroTest};
use serde_json::{json, Value};
use thiserror::Error;

use crate::spec::{Model, SpecError, SpecFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Usage(String),
    /// A mathematical failure (singular Lagrangian, invalid source, ...).
    #[error("{0}")]
    Math(String),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Math(_) => 1,
            _ => 2,
        }
    }
}

impl From<LagrangianError> for CliError {
    fn from(e: LagrangianError) -> Self {
        match e {
            LagrangianError::Sym(s) => CliError::Usage(s.to_string()),
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<ProlongError> for CliError {
    fn from(e: ProlongError) -> Self {
        CliError::Math(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub zero_test: ZeroTest,
}

/// Output of one command. `failed` maps to exit code 1.
#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub failed: bool,
}

fn metadata(model: &Model, opts: &Options) -> Value {
    json!({
        "fixture": model.id,
        "seed": opts.zero_test.seed,
        "tol": opts.zero_test.tol,
        "samples": opts.zero_test.samples,
    })
}

fn point_text(w: &Witness) -> String {
    let coords: Vec<String> = w.point.iter().map(|(n, v)| format!("{n}={v:.6}")).collect();
    format!("at ({}) value {:.6e}", coords.join(", "), w.value)
}

pub fn validate(model: &Model, opts: &Options, exactness: Option<&str>) -> Result<Report, CliError> {
    let exactness = exactness
        .map(|s| parse(s, model.algebroid.base()).map_err(|e| CliError::Usage(format!("exactness probe: {e}"))))
        .transpose()?;
    let report = model.algebroid.validate(&ValidateOptions { zero_test: opts.zero_test.clone(), exactness });
    let pass = report.all_pass();
    let mut text = format!("{}: {}\n", model.id, if pass { "all axioms pass" } else { "axiom check failed" });
    for r in &report.results {
        let axiom = serde_json::to_value(r.axiom).unwrap();
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Unknown => "unknown",
        };
        let _ = write!(text, "  {:<16} {:<8} {} identities", axiom.as_str().unwrap(), status, r.identities_checked);
        if let Some(id) = &r.failed_identity {
            let _ = write!(text, "; {id} nonzero");
        }
        if let Some(w) = &r.witness {
            let _ = write!(text, " {}", point_text(w));
        }
        text.push('\n');
    }
    let json = json!({ "metadata": metadata(model, opts), "pass": pass, "results": report.results });
    Ok(Report { text, json, failed: !pass })
}

fn lagrangian(model: &Model) -> Result<Lagrangian, CliError> {
    let l = model
        .lagrangian
        .clone()
        .ok_or_else(|| CliError::Usage(format!("{}: spec has no `lagrangian`", model.id)))?;
    let p = ProlongedAlgebroid::new(&model.algebroid)?;
    Ok(Lagrangian::new(&p, l)?)
}

pub fn derive(model: &Model, opts: &Options) -> Result<Report, CliError> {
    let lag = lagrangian(model)?;
    let sode = lag.derive_sode(&opts.zero_test)?;
    let names = model.algebroid.base().names();
    let mut text = String::new();
    let xdot: Vec<Value> = sode
        .xdot()
        .iter()
        .zip(names)
        .map(|(e, n)| {
            let _ = writeln!(text, "xdot_{n} = {e}");
            json!({ "coordinate": n, "expr": e.to_string() })
        })
        .collect();
    let forces = match &sode.forces {
        Forces::Explicit(f) => {
            for (k, e) in f.iter().enumerate() {
                let _ = writeln!(text, "F_{} = {e}", k + 1);
            }
            json!({ "kind": "explicit", "F": f.iter().map(|e| e.to_string()).collect::<Vec<_>>() })
        }
        Forces::Implicit { hessian, rhs } => {
            text.push_str("forces are implicit: G F = b\n");
            for (a, row) in hessian.iter().enumerate() {
                for (b, e) in row.iter().enumerate() {
                    let _ = writeln!(text, "G[{}][{}] = {e}", a + 1, b + 1);
                }
            }
            for (a, e) in rhs.iter().enumerate() {
                let _ = writeln!(text, "b[{}] = {e}", a + 1);
            }
            json!({
                "kind": "implicit",
                "G": hessian.iter().map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "b": rhs.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            })
        }
    };
    let json = json!({
        "metadata": metadata(model, opts),
        "lagrangian": lag.expr().to_string(),
        "xdot": xdot,
        "forces": forces,
    });
    Ok(Report { text, json, failed: false })
}

fn components(frame: &[String], coeffs: &[Expr]) -> (String, Value) {
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, c) in frame.iter().zip(coeffs) {
        if !c.is_literal_zero() {
            let _ = writeln!(text, "  {name}: {c}");
            out.push(json!({ "frame": name, "coeff": c.to_string() }));
        }
    }
    if out.is_empty() {
        text.push_str("  0\n");
    }
    (text, Value::Array(out))
}

pub fn lift(model: &Model, opts: &Options, coeffs: &[String]) -> Result<Report, CliError> {
    let a = &model.algebroid;
    let rank = a.fiber_dim() + 1;
    if coeffs.len() != rank {
        return Err(CliError::Usage(format!("section needs {rank} coefficients (e0..e{}), got {}", rank - 1, coeffs.len())));
    }
    let parsed = coeffs
        .iter()
        .map(|s| parse(s, a.base()).map_err(|e| CliError::Usage(format!("section coefficient `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let zeta = a.section(parsed).map_err(|e| CliError::Usage(e.to_string()))?;
    let p = ProlongedAlgebroid::new(a)?;
    let frame = p.algebroid().frame();
    let complete = p.complete_lift(&zeta)?;
    let vertical = p.vertical_lift(&zeta)?;
    let (ct, cj) = components(frame, complete.coeffs());
    let (vt, vj) = components(frame, vertical.coeffs());
    let text = format!("complete lift:\n{ct}vertical lift:\n{vt}");
    let json = json!({
        "metadata": metadata(model, opts),
        "section": coeffs,
        "complete": cj,
        "vertical": vj,
    });
    Ok(Report { text, json, failed: false })
}

pub fn poisson(model: &Model, opts: &Options, pair: Option<(&str, &str)>) -> Result<Report, CliError> {
    let tensor = PoissonTensor::new(model.algebroid.vector()).map_err(|e| CliError::Usage(e.to_string()))?;
    let chart = tensor.chart();
    if let Some((f, g)) = pair {
        let pf = parse(f, chart).map_err(|e| CliError::Usage(format!("`{f}`: {e}")))?;
        let pg = parse(g, chart).map_err(|e| CliError::Usage(format!("`{g}`: {e}")))?;
        let b = tensor.bracket(&pf, &pg).map_err(|e| CliError::Usage(e.to_string()))?;
        let text = format!("{{{f}, {g}}} = {b}\n");
        let json = json!({ "metadata": metadata(model, opts), "f": f, "g": g, "bracket": b.to_string() });
        return Ok(Report { text, json, failed: false });
    }
    let names = chart.names();
    let mut text = String::new();
    let mut table = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let b = tensor.bracket(&chart.coordinate(i), &chart.coordinate(j)).map_err(|e| CliError::Usage(e.to_string()))?;
            if !b.is_literal_zero() {
                let _ = writeln!(text, "{{{}, {}}} = {b}", names[i], names[j]);
                table.push(json!({ "f": names[i], "g": names[j], "bracket": b.to_string() }));
            }
        }
    }
    let jacobi = tensor.jacobi(&opts.zero_test).is_zero();
    let affine = tensor.mu0_independent(&opts.zero_test).is_zero();
    let _ = writeln!(text, "jacobi: {}", if jacobi { "pass" } else { "FAIL" });
    let _ = writeln!(text, "independent of {}: {}", names[model.algebroid.base().len()], if affine { "yes" } else { "no" });
    let json = json!({
        "metadata": metadata(model, opts),
        "coordinates": names,
        "table": table,
        "jacobi": jacobi,
        "mu0_independent": affine,
    });
    Ok(Report { text, json, failed: !jacobi })
}

fn form_terms(w: &KForm) -> (String, Value) {
    let frame = w.algebroid().frame();
    let mut text = String::new();
    let mut out = Vec::new();
    for (idx, c) in w.terms() {
        let basis: Vec<&str> = idx.iter().map(|&i| frame[i].as_str()).collect();
        let basis = basis.join("^");
        let _ = writeln!(text, "  {basis}: {c}");
        out.push(json!({ "basis": basis, "coeff": c.to_string() }));
    }
    if out.is_empty() {
        text.push_str("  0\n");
    }
    (text, Value::Array(out))
}

pub fn export_forms(model: &Model, opts: &Options) -> Result<Report, CliError> {
    let lag = lagrangian(model)?;
    let (tt, tj) = form_terms(&lag.cartan_one_form());
    let (ot, oj) = form_terms(&lag.cartan_two_form());
    let text = format!("Theta_L (dual frame of {}):\n{tt}Omega_L:\n{ot}", lag.prolonged().algebroid().frame().join(", "));
    let json = json!({
        "metadata": metadata(model, opts),
        "frame": lag.prolonged().algebroid().frame(),
        "theta": tj,
        "omega": oj,
    });
    Ok(Report { text, json, failed: false })
}

pub fn normalize(model: &Model) -> Report {
    let spec = SpecFile::from_model(model);
    let text = spec.to_toml();
    Report { json: json!({ "spec": text }), text, failed: false }
}

/// Overrides for the run block of a spec file.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepOverrides {
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub h: Option<f64>,
}

/// A finished (or aborted) run.
#[derive(Debug, Clone)]
pub struct Run {
    pub metadata: Value,
    pub step: StepConfig,
    pub trajectory: Trajectory,
    pub monitors: MonitorTable,
    pub aborted: Option<String>,
}

pub fn integrate(model: &Model, opts: &Options, over: StepOverrides) -> Result<Run, CliError> {
    let block = model
        .integrate
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("{}: spec has no `integrate` block", model.id)))?;
    let step = StepConfig {
        t0: over.t0.unwrap_or(block.step.t0),
        t1: over.t1.unwrap_or(block.step.t1),
        h: over.h.unwrap_or(block.step.h),
    };
    step.nodes().map_err(|e| CliError::Usage(e.to_string()))?;
    let sode = lagrangian(model)?.derive_sode(&opts.zero_test)?;
    let int = Integrator::new(&sode).map_err(|e| CliError::Math(e.to_string()))?;
    let (trajectory, aborted) = match int.integrate(&block.initial, step) {
        Ok(t) => (t, None),
        Err(DynamicsError::Aborted { node, t, reason, partial }) => {
            (*partial, Some(format!("aborted at node {node} (t = {t}): {reason}")))
        }
        Err(e @ DynamicsError::Config(_)) | Err(e @ DynamicsError::StateLength { .. }) => {
            return Err(CliError::Usage(e.to_string()))
        }
        Err(e) => return Err(CliError::Math(e.to_string())),
    };
    let monitors = monitor(&trajectory, &block.monitors).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut metadata = metadata(model, opts);
    metadata["t0"] = json!(step.t0);
    metadata["t1"] = json!(step.t1);
    metadata["h"] = json!(step.h);
    Ok(Run { metadata, step, trajectory, monitors, aborted })
}

impl Run {
    pub fn header(&self) -> Vec<String> {
        let t = &self.trajectory;
        let mut h = vec!["t".to_string()];
        for (k, n) in t.names.iter().enumerate() {
            h.push(if k < t.base_len { format!("x_{n}") } else { format!("y_{n}") });
        }
        h.push("adm_residual".into());
        h.extend(self.monitors.names.iter().cloned());
        h
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        let t = &self.trajectory;
        for (k, time) in t.times.iter().enumerate() {
            let mut row = vec![time.to_string()];
            row.extend(t.states[k].iter().map(f64::to_string));
            row.push(t.adm_residual[k].to_string());
            row.extend(self.monitors.values[k].iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "metadata": self.metadata,
            "columns": self.header(),
            "trajectory": self.trajectory,
            "monitors": { "names": self.monitors.names, "values": self.monitors.values },
            "monitor_failures": self.monitors.failures.iter().map(|f| json!({
                "node": f.node, "monitor": f.monitor, "message": f.message,
            })).collect::<Vec<_>>(),
            "aborted": self.aborted,
        })
    }

    /// Largest relative change of each monitor against its first value.
    pub fn drifts(&self) -> Vec<Option<f64>> {
        (0..self.monitors.names.len())
            .map(|j| {
                let vals: Vec<f64> = self.monitors.column(j).flatten().collect();
                let first = *vals.first()?;
                let scale = first.abs().max(f64::MIN_POSITIVE);
                Some(vals.iter().map(|v| (v - first).abs() / scale).fold(0.0, f64::max))
            })
            .collect()
    }

    pub fn summary(&self) -> Report {
        let t = &self.trajectory;
        let mut text = String::new();
        let end = t.states.last();
        let max_res = t.adm_residual.iter().copied().fold(0.0, f64::max);
        if let (Some(time), Some(s)) = (t.times.last(), end) {
            let coords: Vec<String> = t.names.iter().zip(s).map(|(n, v)| format!("{n}={v:.10}")).collect();
            let _ = writeln!(text, "{} nodes, state at time {time}: {}", t.times.len(), coords.join(" "));
        }
        let _ = writeln!(text, "max admissibility residual {max_res:e}");
        let drifts = self.drifts();
        for (name, d) in self.monitors.names.iter().zip(&drifts) {
            match d {
                Some(d) => {
                    let _ = writeln!(text, "monitor {name}: max relative drift {d:e}");
                }
                None => {
                    let _ = writeln!(text, "monitor {name}: no evaluable samples");
                }
            }
        }
        if !self.monitors.failures.is_empty() {
            let _ = writeln!(text, "{} monitor evaluations failed", self.monitors.failures.len());
        }
        if let Some(a) = &self.aborted {
            let _ = writeln!(text, "{a}");
        }
        let json = json!({
            "metadata": self.metadata,
            "nodes": t.times.len(),
            "endpoint": end.map(|s| t.names.iter().cloned().zip(s.iter().copied()).collect::<std::collections::BTreeMap<_, _>>()),
            "max_adm_residual": max_res,
            "monitor_drift": self.monitors.names.iter().cloned().zip(drifts).collect::<std::collections::BTreeMap<_, _>>(),
            "monitor_failures": self.monitors.failures.len(),
            "aborted": self.aborted,
        });
        Report { text, json, failed: self.aborted.is_some() }
    }
}
