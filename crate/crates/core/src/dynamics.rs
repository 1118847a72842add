//! Fixed-step RK4 integration of pseudo-SODEs:
//! `ẋ^i = ρ^i_0 + ρ^i_α y^α`, `ẏ^α = F^α`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::prolong::{Forces, PseudoSode};
use crate::symkernel::{linalg, Compiled, EvalError, Expr};

#[derive(Debug, Clone, Error)]
pub enum DynamicsError {
    #[error("invalid step configuration: {0}")]
    Config(String),
    #[error("initial state has {found} entries, expected {expected}")]
    StateLength { expected: usize, found: usize },
    #[error("cannot compile `{name}`: {source}")]
    Compile { name: String, source: EvalError },
    /// The integration stopped; `partial` holds every node reached so far.
    #[error("aborted at node {node} (t = {t}): {reason}")]
    Aborted { node: usize, t: f64, reason: Abort, partial: Box<Trajectory> },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Abort {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Hessian singular")]
    Singular,
    #[error("non-finite state")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepConfig {
    pub t0: f64,
    pub t1: f64,
    pub h: f64,
}

impl StepConfig {
    /// `floor((t1 − t0)/h) + 1`; the grid never overshoots `t1`.
    pub fn nodes(&self) -> Result<usize, DynamicsError> {
        if !self.h.is_finite() || self.h <= 0.0 {
            return Err(DynamicsError::Config(format!("step h = {} must be positive", self.h)));
        }
        if !self.t0.is_finite() || !self.t1.is_finite() || self.t1 < self.t0 {
            return Err(DynamicsError::Config(format!("need finite t0 <= t1, got [{}, {}]", self.t0, self.t1)));
        }
        // Absorb round-off in the quotient so that e.g. 1/1e-3 yields 1001 nodes.
        let q = (self.t1 - self.t0) / self.h;
        Ok((q + 1e-9 * q.max(1.0)).floor() as usize + 1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    /// State coordinate names: base coordinates, then fibre coordinates.
    pub names: Vec<String>,
    /// Number of base coordinates at the front of each state.
    pub base_len: usize,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `max_i |ẋ^i − ρ^i(Γ)|` at each node.
    pub adm_residual: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorFailure {
    pub node: usize,
    pub monitor: String,
    pub message: String,
}

/// Monitor values per node; `None` where evaluation failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorTable {
    pub names: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
    pub failures: Vec<MonitorFailure>,
}

impl MonitorTable {
    pub fn column(&self, j: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        self.values.iter().map(move |r| r[j])
    }
}

/// Evaluate expressions over the `(x, y)` chart at every node.
pub fn monitor(traj: &Trajectory, exprs: &[(String, Expr)]) -> Result<MonitorTable, DynamicsError> {
    let compiled: Vec<Compiled> = exprs
        .iter()
        .map(|(n, e)| e.compile(&traj.names).map_err(|source| DynamicsError::Compile { name: n.clone(), source }))
        .collect::<Result<_, _>>()?;
    let mut failures = Vec::new();
    let values = traj
        .states
        .iter()
        .enumerate()
        .map(|(node, s)| {
            compiled
                .iter()
                .zip(exprs)
                .map(|(c, (n, _))| match c.eval(s) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        failures.push(MonitorFailure { node, monitor: n.clone(), message: e.to_string() });
                        None
                    }
                })
                .collect()
        })
        .collect();
    Ok(MonitorTable { names: exprs.iter().map(|(n, _)| n.clone()).collect(), values, failures })
}

enum CompiledForces {
    Explicit(Vec<Compiled>),
    Implicit { hessian: Vec<Vec<Compiled>>, rhs: Vec<Compiled> },
}

/// A pseudo-SODE compiled against the state layout `(x, y)`.
pub struct Integrator {
    names: Vec<String>,
    m: usize,
    xdot: Vec<Compiled>,
    forces: CompiledForces,
    /// `ρ¹(Γ)(x^i)`, compiled separately from `xdot` as a cross-check.
    anchor_x: Vec<Compiled>,
}

impl Integrator {
    pub fn new(sode: &PseudoSode) -> Result<Self, DynamicsError> {
        let p = &sode.prolonged;
        let chart = p.algebroid().chart();
        let names: Vec<String> = chart.names().to_vec();
        let m = p.source().base().len();
        let comp = |what: &str| {
            let names = &names;
            let what = what.to_string();
            move |e: &Expr| e.compile(names).map_err(|source| DynamicsError::Compile { name: what.clone(), source })
        };
        let xdot = sode.xdot().iter().map(comp("xdot")).collect::<Result<_, _>>()?;
        let forces = match &sode.forces {
            Forces::Explicit(f) => CompiledForces::Explicit(f.iter().map(comp("force")).collect::<Result<_, _>>()?),
            Forces::Implicit { hessian, rhs } => CompiledForces::Implicit {
                hessian: hessian.iter().map(|r| r.iter().map(comp("hessian")).collect()).collect::<Result<_, _>>()?,
                rhs: rhs.iter().map(comp("force")).collect::<Result<_, _>>()?,
            },
        };
        let gamma = p.sode_section(&vec![Expr::zero(); p.fiber_dim()]);
        let anchor_x = (0..m)
            .map(|i| comp("anchor")(&gamma.anchor_apply(&chart.coordinate(i))))
            .collect::<Result<_, _>>()?;
        Ok(Integrator { names, m, xdot, forces, anchor_x })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn rhs(&self, s: &[f64], out: &mut [f64]) -> Result<(), Abort> {
        for (o, c) in out[..self.m].iter_mut().zip(&self.xdot) {
            *o = c.eval(s)?;
        }
        match &self.forces {
            CompiledForces::Explicit(f) => {
                for (o, c) in out[self.m..].iter_mut().zip(f) {
                    *o = c.eval(s)?;
                }
            }
            CompiledForces::Implicit { hessian, rhs } => {
                let g: Vec<Vec<f64>> =
                    hessian.iter().map(|r| r.iter().map(|c| c.eval(s)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
                let b: Vec<f64> = rhs.iter().map(|c| c.eval(s)).collect::<Result<_, _>>()?;
                let f = linalg::solve_numeric(&g, &b).ok_or(Abort::Singular)?;
                out[self.m..].copy_from_slice(&f);
            }
        }
        Ok(())
    }

    /// Classical RK4 with a fixed step.
    pub fn integrate(&self, initial: &[f64], cfg: StepConfig) -> Result<Trajectory, DynamicsError> {
        let dim = self.names.len();
        if initial.len() != dim {
            return Err(DynamicsError::StateLength { expected: dim, found: initial.len() });
        }
        let nodes = cfg.nodes()?;
        let h = cfg.h;
        let mut traj = Trajectory {
            names: self.names.clone(),
            base_len: self.m,
            times: Vec::with_capacity(nodes),
            states: Vec::with_capacity(nodes),
            adm_residual: Vec::with_capacity(nodes),
        };
        let mut s = initial.to_vec();
        let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
        let mut tmp = vec![0.0; dim];
        for node in 0..nodes {
            let t = cfg.t0 + node as f64 * h;
            let step = |traj: &mut Trajectory, k1: &mut [f64]| -> Result<(), Abort> {
                if s.iter().any(|v| !v.is_finite()) {
                    return Err(Abort::NonFinite);
                }
                self.rhs(&s, k1)?;
                let mut res: f64 = 0.0;
                for (i, c) in self.anchor_x.iter().enumerate() {
                    res = res.max((k1[i] - c.eval(&s)?).abs());
                }
                traj.times.push(t);
                traj.states.push(s.clone());
                traj.adm_residual.push(res);
                Ok(())
            };
            if let Err(reason) = step(&mut traj, &mut k1) {
                return Err(DynamicsError::Aborted { node, t, reason, partial: Box::new(traj) });
            }
            if node + 1 == nodes {
                break;
            }
            let stages = (|| -> Result<(), Abort> {
                for i in 0..dim {
                    tmp[i] = s[i] + 0.5 * h * k1[i];
                }
                self.rhs(&tmp, &mut k2)?;
                for i in 0..dim {
                    tmp[i] = s[i] + 0.5 * h * k2[i];
                }
                self.rhs(&tmp, &mut k3)?;
                for i in 0..dim {
                    tmp[i] = s[i] + h * k3[i];
                }
                self.rhs(&tmp, &mut k4)
            })();
            if let Err(reason) = stages {
                return Err(DynamicsError::Aborted { node, t, reason, partial: Box::new(traj) });
            }
            for i in 0..dim {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        Ok(traj)
    }

    /// Independent trajectories in parallel; results keep the input order.
    pub fn integrate_batch(&self, initial: &[Vec<f64>], cfg: StepConfig) -> Vec<Result<Trajectory, DynamicsError>> {
        initial.par_iter().map(|s| self.integrate(s, cfg)).collect()
    }
}

// Compiled holds plain data, so sharing across rayon workers is fine.
const _: fn() = || {
    fn assert_sync<T: Sync>() {}
    assert_sync::<Integrator>();
};
