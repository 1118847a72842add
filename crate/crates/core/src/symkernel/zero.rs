//! Probabilistic identity testing.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::expr::Expr;

pub const DEFAULT_SAMPLES: usize = 25;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x5eed_a15e;

/// Term budget for the expansion attempt made before sampling.
const EXPAND_BUDGET: usize = 4096;

/// Per-variable sampling ranges; unlisted variables use `default`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub default: (f64, f64),
    pub ranges: BTreeMap<String, (f64, f64)>,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox { default: (-1.0, 1.0), ranges: BTreeMap::new() }
    }
}

impl SampleBox {
    pub fn with_range(mut self, var: &str, lo: f64, hi: f64) -> Self {
        self.ranges.insert(var.to_string(), (lo, hi));
        self
    }

    pub fn range(&self, var: &str) -> (f64, f64) {
        self.ranges.get(var).copied().unwrap_or(self.default)
    }
}

/// A sample point at which an identity failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<(String, f64)>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Zeroness {
    Zero,
    /// The witness is absent when simplification alone proved a nonzero constant.
    NonZero(Option<Witness>),
    Unknown,
}

impl Zeroness {
    pub fn is_zero(&self) -> bool {
        matches!(self, Zeroness::Zero)
    }
}

/// Sampling configuration for zero tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTest {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub domain: SampleBox,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest { samples: DEFAULT_SAMPLES, tol: DEFAULT_TOL, seed: DEFAULT_SEED, domain: SampleBox::default() }
    }
}

impl ZeroTest {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_domain(mut self, domain: SampleBox) -> Self {
        self.domain = domain;
        self
    }

    /// Decide whether `e` vanishes identically on the sampling box.
    ///
    /// `Zero` when simplification (or bounded expansion) reaches the literal 0,
    /// or every sample lies within `tol`. `NonZero` on a provably nonzero
    /// constant or on any sample exceeding `tol`. `Unknown` when fewer than
    /// half the samples could be evaluated.
    pub fn check(&self, e: &Expr) -> Zeroness {
        let s = e.simplify();
        if let Some(c) = s.as_number() {
            return if c.is_zero() { Zeroness::Zero } else { Zeroness::NonZero(None) };
        }
        if let Some(x) = s.expand(EXPAND_BUDGET) {
            if x.is_literal_zero() {
                return Zeroness::Zero;
            }
            if let Some(c) = x.as_number() {
                if !c.is_zero() {
                    return Zeroness::NonZero(None);
                }
            }
        }
        let vars: Vec<String> = s.free_vars().into_iter().collect();
        let compiled = match s.compile(&vars) {
            Ok(c) => c,
            Err(_) => return Zeroness::Unknown,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut point = vec![0.0; vars.len()];
        let mut valid = 0usize;
        for _ in 0..self.samples {
            for (slot, name) in point.iter_mut().zip(&vars) {
                let (lo, hi) = self.domain.range(name);
                *slot = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            }
            match compiled.eval(&point) {
                Ok(v) => {
                    valid += 1;
                    if v.abs() > self.tol {
                        return Zeroness::NonZero(Some(Witness {
                            point: vars.iter().cloned().zip(point.iter().copied()).collect(),
                            value: v,
                        }));
                    }
                }
                Err(_) => continue,
            }
        }
        if 2 * valid < self.samples {
            Zeroness::Unknown
        } else {
            Zeroness::Zero
        }
    }
}

/// Zero test with default sample count and tolerance on the given box.
pub fn is_zero(e: &Expr, domain: &SampleBox) -> Zeroness {
    ZeroTest { domain: domain.clone(), ..ZeroTest::default() }.check(e)
}
