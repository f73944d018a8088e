//! Identity suites: seeded corpora and the checks run on them.

use std::time::Instant;

use fdlab::{QuadConfig, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::report::{digest, digest_bytes, Record, SuiteSummary};

pub mod axb;
pub mod decomp;
pub mod heis;
pub mod su2;

/// Settings a suite may read while building its corpus.
pub struct Params {
    pub size: usize,
    pub seed: u64,
    pub max_n_heis: i64,
    pub max_n_su2: usize,
}

/// One check produced by a case.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub label: String,
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    /// Slack added to the tolerance, in the units of `residual`.
    pub tail: f64,
}

impl Outcome {
    /// |lhs − rhs|.
    pub fn abs(label: impl Into<String>, lhs: C64, rhs: C64) -> Outcome {
        Outcome { label: label.into(), lhs, rhs, residual: (lhs - rhs).norm(), tail: 0.0 }
    }

    /// |lhs − rhs| / scale; a zero scale falls back to the absolute residual.
    pub fn rel(label: impl Into<String>, lhs: C64, rhs: C64, scale: f64) -> Outcome {
        let s = if scale > 0.0 { scale } else { 1.0 };
        Outcome { label: label.into(), lhs, rhs, residual: (lhs - rhs).norm() / s, tail: 0.0 }
    }

    /// A residual that is not a difference of the two reported values.
    pub fn custom(label: impl Into<String>, lhs: C64, rhs: C64, residual: f64) -> Outcome {
        Outcome { label: label.into(), lhs, rhs, residual, tail: 0.0 }
    }

    pub fn with_tail(mut self, tail: f64) -> Outcome {
        self.tail = tail;
        self
    }
}

pub type Eval = Box<dyn Fn(&QuadConfig) -> fdlab::Result<Vec<Outcome>> + Send + Sync>;

/// One seeded input together with the checks run on it.
pub struct Case {
    pub inputs: serde_json::Value,
    pub eval: Eval,
}

impl Case {
    pub fn new<T: Serialize>(inputs: &T, eval: Eval) -> Case {
        Case { inputs: serde_json::to_value(inputs).expect("corpus inputs serialize"), eval }
    }
}

pub struct Suite {
    pub id: &'static str,
    pub statement: &'static str,
    pub reference: &'static str,
    pub residual: &'static str,
    pub tolerance: f64,
    /// Per-label defaults that override `tolerance`.
    pub label_tolerances: &'static [(&'static str, f64)],
    pub default_size: usize,
    /// What one unit of corpus size means, for `explain`.
    pub size_unit: &'static str,
    pub build: fn(&mut ChaCha8Rng, &Params) -> Vec<Case>,
}

pub static ALL: &[Suite] = &[
    axb::REP_UNITARITY,
    axb::REP_HOMOMORPHISM,
    axb::COEFF_TWO_PATH,
    axb::CONJ_SYMMETRY,
    axb::ORTHOGONALITY,
    axb::MADB_FD,
    axb::MADB_ALGEBRA_FD,
    axb::KEY_ESTIMATE,
    axb::NONVANISHING,
    axb::LEIBNIZ,
    axb::A_NORM,
    axb::D_FLAT_VALUES,
    heis::SCH_UNITARITY,
    heis::SCH_HOMOMORPHISM,
    heis::COEFF_TWO_PATH,
    heis::CONJ_SYMMETRY,
    heis::SQUARE_INTEGRABLE,
    heis::ORTHOGONALITY,
    heis::DTHETA_FD,
    heis::DERIVATION,
    heis::LAMBDA0_NULL,
    heis::KEY_ESTIMATE,
    heis::LEIBNIZ,
    heis::A_NORM,
    su2::HOMOMORPHISM,
    su2::TORUS,
    su2::SCHUR,
    su2::F_PI_BOUND,
    su2::KEY_ESTIMATE,
    su2::NONVANISHING,
    su2::PARTIAL_PHI_FD,
    su2::A_NORM,
    decomp::W_ISOMETRY,
    decomp::FTW,
    decomp::FTW_MIRRORED,
    decomp::LAMBDA_CONV,
    decomp::LAMBDA_CONV_IDENTITY,
    decomp::HEIS_TRANSLATION,
];

pub fn find(id: &str) -> Option<&'static Suite> {
    ALL.iter().find(|s| s.id == id)
}

/// The generator for `id` under `seed`: ChaCha8 keyed by SHA-256(seed ‖ id).
pub fn corpus_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

impl Suite {
    pub fn params(&self, cfg: &RunConfig) -> Params {
        Params {
            size: cfg.corpus_size.unwrap_or(self.default_size),
            seed: cfg.seed,
            max_n_heis: cfg.max_n_heis,
            max_n_su2: cfg.max_n_su2,
        }
    }

    pub fn corpus(&self, cfg: &RunConfig) -> Vec<Case> {
        let p = self.params(cfg);
        if p.size == 0 {
            return Vec::new();
        }
        (self.build)(&mut corpus_rng(cfg.seed, self.id), &p)
    }

    /// Tolerance for `label`, times `tol_scale`. Looked up as config `suite/label`,
    /// config `suite/<first segment of label>`, config `suite`, then the built-in
    /// defaults in the same order.
    pub fn tolerance_for(&self, label: &str, cfg: &RunConfig) -> f64 {
        let head = label.split('/').next().unwrap_or(label);
        let keys = [format!("{}/{label}", self.id), format!("{}/{head}", self.id), self.id.to_string()];
        let base = keys
            .iter()
            .find_map(|k| cfg.tolerances.get(k).copied())
            .or_else(|| {
                [label, head]
                    .iter()
                    .find_map(|l| self.label_tolerances.iter().find(|(x, _)| x == l).map(|(_, t)| *t))
            })
            .unwrap_or(self.tolerance);
        base * cfg.tol_scale
    }

    /// Builds the corpus, evaluates every case (in parallel, order preserved) and
    /// turns the outcomes into records.
    pub fn run(&self, cfg: &RunConfig) -> (SuiteSummary, Vec<Record>) {
        let cases = self.corpus(cfg);
        let digests: Vec<String> = cases.iter().map(|c| digest(&c.inputs)).collect();
        let corpus_digest = digest_bytes(digests.join(",").as_bytes());
        let results: Vec<(fdlab::Result<Vec<Outcome>>, f64)> = cases
            .par_iter()
            .map(|c| {
                let start = Instant::now();
                let r = (c.eval)(&cfg.quad);
                (r, start.elapsed().as_secs_f64() * 1e3)
            })
            .collect();
        let mut records = Vec::new();
        for (idx, ((res, ms), dg)) in results.into_iter().zip(&digests).enumerate() {
            match res {
                Ok(outcomes) => {
                    for o in outcomes {
                        let tolerance = self.tolerance_for(&o.label, cfg);
                        let pass = o.residual.is_finite() && o.residual <= tolerance + o.tail;
                        records.push(Record {
                            id: format!("{}/{idx}/{}", self.id, o.label),
                            inputs_digest: dg.clone(),
                            lhs: Some([o.lhs.re, o.lhs.im]),
                            rhs: Some([o.rhs.re, o.rhs.im]),
                            residual: o.residual.is_finite().then_some(o.residual),
                            tolerance,
                            tail_bound: o.tail,
                            wall_time_ms: ms,
                            pass,
                            error: None,
                        });
                    }
                }
                Err(e) => records.push(Record {
                    id: format!("{}/{idx}/error", self.id),
                    inputs_digest: dg.clone(),
                    lhs: None,
                    rhs: None,
                    residual: None,
                    tolerance: self.tolerance * cfg.tol_scale,
                    tail_bound: 0.0,
                    wall_time_ms: ms,
                    pass: false,
                    error: Some(e.to_string()),
                }),
            }
        }
        let passed = records.iter().filter(|r| r.pass).count();
        let summary = SuiteSummary {
            id: self.id.to_string(),
            corpus_size: cases.len(),
            corpus_digest,
            passed,
            failed: records.len() - passed,
        };
        (summary, records)
    }
}

// Shared corpus helpers.

pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
