//! Pointwise verification suites for the greedy-approximation inequalities.
//!
//! Each suite enumerates finite instances (vectors, greedy sets, competitor
//! sets, signs), evaluates both sides of the governing inequality, and
//! records every violation. Proof replays additionally check each labeled
//! intermediate step, so a failure pinpoints the first broken link rather
//! than only the end-to-end bound. Certified constants are re-derived at run
//! time; a suite aborts when a needed constant is absent. Every suite also
//! runs a negative control with a deliberately falsified premise and must
//! observe the resulting violation, otherwise the suite itself fails.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::constants::certified_constant;
use crate::error::{Error, Result};
use crate::exec::{default_parallelism, Parallelism};
use crate::spaces::NormSpace;
use crate::sparse::{Index, IndexSet, SignPattern, SparseVector};
use crate::weights::SetWeight;

pub mod cc;
pub mod counterexample;
pub mod lemma_l1;
pub mod m1;
pub mod m2_m5;
pub mod p42;
pub mod p50;
pub mod partially_greedy;
pub mod semi_greedy;

/// Shared suite configuration. Defaults match the command-line defaults.
#[derive(Clone)]
pub struct SuiteConfig {
    pub space: NormSpace,
    pub weight: SetWeight,
    pub dim: u64,
    pub seed: u64,
    pub tol: f64,
    pub family_size: usize,
    pub par: Parallelism,
}

impl SuiteConfig {
    pub fn new(space: NormSpace, weight: SetWeight) -> Self {
        SuiteConfig {
            space,
            weight,
            dim: 8,
            seed: 0,
            tol: 1e-9,
            family_size: 6,
            par: default_parallelism(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteStatus {
    Passed,
    ViolationsFound,
    Skipped,
}

/// Outcome of one suite run. `instances` counts checked tuples; every
/// violation carries the instance id it arose from, so reports are
/// reproducible line by line.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub theorem: String,
    pub instances: usize,
    pub violations: Vec<Violation>,
    pub constants_used: BTreeMap<String, f64>,
    pub seed: u64,
    pub status: SuiteStatus,
    pub negative_control_fired: bool,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        matches!(self.status, SuiteStatus::Passed | SuiteStatus::Skipped)
    }
}

/// Accumulates checks for one suite run. Violations keep enumeration order,
/// then get a stable sort by instance id so aggregation is canonical no
/// matter how the instances were scheduled.
pub(crate) struct Checker {
    theorem: String,
    tol: f64,
    instances: usize,
    violations: Vec<Violation>,
    constants: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl Checker {
    pub fn new(theorem: &str, tol: f64) -> Self {
        Checker {
            theorem: theorem.to_string(),
            tol,
            instances: 0,
            violations: Vec::new(),
            constants: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Fetches a certified constant or aborts the suite: checks must not
    /// silently pass when their constant product cannot be formed.
    pub fn need(&mut self, space: &NormSpace, weight: &SetWeight, name: &str) -> Result<f64> {
        match certified_constant(space, weight, name) {
            Some(v) => {
                self.constants.insert(name.to_string(), v);
                Ok(v)
            }
            None => Err(Error::MissingCertifiedConstant {
                constant: name.to_string(),
                space: space.name().to_string(),
                weight: weight.describe(),
            }),
        }
    }

    /// Records a non-catalog constant that entered a bound (norm envelope
    /// values and the like).
    pub fn record_constant(&mut self, name: &str, value: f64) {
        self.constants.insert(name.to_string(), value);
    }

    pub fn tick(&mut self) {
        self.instances += 1;
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// lhs ≤ rhs + tol, the standard inequality check. The negated form is
    /// load-bearing: a NaN on either side must register as a violation.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn check_le(&mut self, instance: &str, lhs: f64, rhs: f64, detail: &str) {
        if !(lhs <= rhs + self.tol) {
            self.violations.push(Violation {
                instance: instance.to_string(),
                lhs,
                rhs,
                detail: detail.to_string(),
            });
        }
    }

    /// Identity checks: both sides are built from the same stored
    /// coefficients, so the difference must vanish exactly.
    pub fn check_identity(
        &mut self,
        instance: &str,
        lhs: &SparseVector,
        rhs: &SparseVector,
        detail: &str,
    ) {
        let diff = lhs.sub(rhs);
        if !diff.is_zero() {
            self.violations.push(Violation {
                instance: instance.to_string(),
                lhs: diff.sup_norm(),
                rhs: 0.0,
                detail: format!("{detail}: coefficient mismatch {}", diff.sup_norm()),
            });
        }
    }

    /// Identity checks whose reconstruction reassociates floating-point
    /// additions; exactness up to one rounding per coordinate.
    pub fn check_near_identity(
        &mut self,
        instance: &str,
        lhs: &SparseVector,
        rhs: &SparseVector,
        detail: &str,
    ) {
        let gap = lhs.sub(rhs).sup_norm();
        let scale = 1.0 + lhs.sup_norm().max(rhs.sup_norm());
        if gap > 1e-12 * scale {
            self.violations.push(Violation {
                instance: instance.to_string(),
                lhs: gap,
                rhs: 1e-12 * scale,
                detail: format!("{detail}: coefficient gap {gap}"),
            });
        }
    }

    pub fn check_true(&mut self, instance: &str, ok: bool, detail: &str) {
        if !ok {
            self.violations.push(Violation {
                instance: instance.to_string(),
                lhs: 1.0,
                rhs: 0.0,
                detail: detail.to_string(),
            });
        }
    }

    /// Folds a nested suite run into this one, prefixing its instance ids.
    pub fn absorb(&mut self, prefix: &str, sub: SuiteReport) {
        self.instances += sub.instances;
        for v in sub.violations {
            self.violations.push(Violation {
                instance: format!("{prefix}/{}", v.instance),
                ..v
            });
        }
        self.constants.extend(sub.constants_used);
        for n in sub.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
    }

    pub fn finish(mut self, seed: u64, control_fired: bool) -> SuiteReport {
        if self.violations.is_empty() && !control_fired {
            self.violations.push(Violation {
                instance: "negative-control".to_string(),
                lhs: 0.0,
                rhs: 0.0,
                detail: "falsified premise produced no violation; the check has no teeth"
                    .to_string(),
            });
        }
        self.violations.sort_by(|a, b| a.instance.cmp(&b.instance));
        let status = if self.violations.is_empty() {
            SuiteStatus::Passed
        } else {
            SuiteStatus::ViolationsFound
        };
        SuiteReport {
            theorem: self.theorem,
            instances: self.instances,
            violations: self.violations,
            constants_used: self.constants,
            seed,
            status,
            negative_control_fired: control_fired,
            notes: self.notes,
        }
    }

    /// Premise-not-met exit: no checks ran, nothing to control.
    pub fn finish_skipped(mut self, seed: u64, reason: impl Into<String>) -> SuiteReport {
        self.notes.push(format!("skipped: {}", reason.into()));
        SuiteReport {
            theorem: self.theorem,
            instances: self.instances,
            violations: Vec::new(),
            constants_used: self.constants,
            seed,
            status: SuiteStatus::Skipped,
            negative_control_fired: false,
            notes: self.notes,
        }
    }
}

/// Scales a vector to sup-norm at most 1, as the largest-coefficient
/// inequalities require.
pub(crate) fn unit_sup(x: &SparseVector) -> SparseVector {
    let m = x.sup_norm();
    if m > 1.0 {
        x.scale(1.0 / m)
    } else {
        x.clone()
    }
}

/// All nonempty subsets of `pool` with at most `max_size` elements.
pub(crate) fn small_sets(pool: &[Index], max_size: usize) -> Vec<IndexSet> {
    let mut out = Vec::new();
    for k in 1..=max_size.min(pool.len()) {
        for combo in crate::tga::combinations(pool, k) {
            out.push(combo.into_iter().collect());
        }
    }
    out
}

/// Compact `{3,9,27}` rendering for instance ids.
pub(crate) fn fmt_set(set: &IndexSet) -> String {
    let inner: Vec<String> = set.iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Sign patterns on `set`: exhaustive up to `cap` elements, otherwise the
/// all-plus pattern only.
pub(crate) fn signs_on(set: &IndexSet, cap: usize) -> Vec<SignPattern> {
    if set.len() <= cap {
        (0..1u32 << set.len())
            .map(|k| SignPattern::enumerated(set, k))
            .collect()
    } else {
        vec![SignPattern::plus(set)]
    }
}

pub const SUITE_IDS: [&str; 9] = [
    "lemma-l1",
    "m1",
    "m2-m5",
    "cc",
    "m3-counterexample",
    "p42",
    "semi-greedy",
    "partially-greedy",
    "p50",
];

pub fn run_suite(id: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match id {
        "lemma-l1" => lemma_l1::run(cfg),
        "m1" => m1::run(cfg),
        "m2-m5" => m2_m5::run(cfg),
        "cc" => cc::run(cfg),
        "m3-counterexample" => counterexample::run(cfg),
        "p42" => p42::run(cfg),
        "semi-greedy" => semi_greedy::run(cfg),
        "partially-greedy" => partially_greedy::run(cfg),
        "p50" => p50::run(cfg),
        _ => Err(Error::UnknownSuite {
            name: id.to_string(),
            available: SUITE_IDS.join(", "),
        }),
    }
}

pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    SUITE_IDS.iter().map(|id| run_suite(id, cfg)).collect()
}
