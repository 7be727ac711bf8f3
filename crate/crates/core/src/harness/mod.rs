//! Seeded verification of the algebraic laws.
//!
//! Trial `t` of a run seeded with `s` draws every check's instance from the
//! stream `(derive_seed(s, t), stream_id(check id))`, so reports do not depend
//! on how trials are scheduled across threads.

pub mod algebra;
pub mod checks;
pub mod generate;
pub mod report;
pub mod rng;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use self::algebra::Algebra;
use self::checks::{checks_for, AxiomCheck, TolClass};
use self::rng::{derive_seed, stream_id, CounterRng};
use crate::effect::Model;
use crate::error::{Error, Result};

pub use self::report::{emit_report, replay, ReportFormat, VerificationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Effect,
    Convex,
    Sea,
    B1B2,
    Representation,
    Conditioning,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Effect,
        Suite::Convex,
        Suite::Sea,
        Suite::B1B2,
        Suite::Representation,
        Suite::Conditioning,
        Suite::All,
    ];

    pub fn parse(name: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidSuiteName(name.into()))
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Effect => "effect",
            Suite::Convex => "convex",
            Suite::Sea => "sea",
            Suite::B1B2 => "b1b2",
            Suite::Representation => "representation",
            Suite::Conditioning => "conditioning",
            Suite::All => "all",
        }
    }
}

/// Residual bounds per family of laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Algebraic laws; the `--tol` flag sets this one.
    pub axiom: f64,
    pub conditioning: f64,
    pub b1: f64,
    /// Identities that hold exactly for compatible inputs.
    pub exact: f64,
    pub transition: f64,
    /// Reconstruction through ill-conditioned linear solves.
    pub recovery: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            axiom: 1e-8,
            conditioning: 1e-9,
            b1: 1e-9,
            exact: 1e-12,
            transition: 1e-10,
            recovery: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn with_axiom(axiom: Option<f64>) -> Self {
        let mut t = Tolerances::default();
        if let Some(a) = axiom {
            t.axiom = a;
        }
        t
    }

    pub fn of(&self, class: TolClass) -> f64 {
        match class {
            TolClass::Axiom => self.axiom,
            TolClass::Conditioning => self.conditioning,
            TolClass::B1 => self.b1,
            TolClass::Exact => self.exact,
            TolClass::Transition => self.transition,
            TolClass::Recovery => self.recovery,
        }
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        [
            ("axiom", self.axiom),
            ("conditioning", self.conditioning),
            ("b1", self.b1),
            ("exact", self.exact),
            ("transition", self.transition),
            ("recovery", self.recovery),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// Outcome of one check on one trial: `None` when the law does not apply.
fn evaluate(check: &AxiomCheck, alg: &Algebra, seed: u64, trial: u64, tol: &Tolerances) -> Option<Option<Violation>> {
    let mut rng = CounterRng::new(derive_seed(seed, trial), stream_id(check.id));
    let instance = (check.generate)(alg.model, &mut rng)?;
    let bound = tol.of(check.class);
    let (residual, note) = match (check.residual)(alg, &instance) {
        Ok(r) if r.is_finite() => (r, None),
        Ok(r) => (f64::MAX, Some(format!("non-finite residual {r}"))),
        Err(e) => (f64::MAX, Some(e.to_string())),
    };
    Some((residual > bound || note.is_some()).then(|| Violation {
        axiom: check.id.to_string(),
        residual,
        instance,
        note,
    }))
}

/// Runs every check of `suite` for `trials` seeded trials.
///
/// `tol` overrides the axiom tolerance; the other families keep their defaults.
pub fn run_suite(suite: Suite, alg: &Algebra, trials: u64, seed: u64, tol: Option<f64>) -> VerificationReport {
    let start = Instant::now();
    let tolerances = Tolerances::with_axiom(tol);
    let checks = checks_for(suite);
    let model = alg.model;
    let partials: Vec<(u64, Vec<Violation>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut count = 0;
            let mut found = Vec::new();
            for check in &checks {
                if let Some(outcome) = evaluate(check, alg, seed, t, &tolerances) {
                    count += 1;
                    found.extend(outcome);
                }
            }
            (count, found)
        })
        .collect();
    let mut report = VerificationReport::empty(suite.name(), model.name(), model.dim(), seed);
    report.tolerances = tolerances.to_map();
    report.fault = alg.fault.map(|f| f.name().to_string());
    for (count, found) in partials {
        report.trials += count;
        report.violations.extend(found);
    }
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

/// Effect-algebra and convexity laws.
pub fn check_effect_convex_axioms(alg: &Algebra, trials: u64, seed: u64, tol: Option<f64>) -> VerificationReport {
    let a = run_suite(Suite::Effect, alg, trials, seed, tol);
    a.merge(run_suite(Suite::Convex, alg, trials, seed, tol))
}

/// Sequential-product laws and their consequences.
pub fn check_sea_axioms(alg: &Algebra, trials: u64, seed: u64, tol: Option<f64>) -> VerificationReport {
    run_suite(Suite::Sea, alg, trials, seed, tol)
}

/// The two trace conditions on Hilbert effects of dimension `d`.
pub fn check_b1_b2(d: usize, trials: u64, seed: u64, tol: Option<f64>) -> VerificationReport {
    let mut tolerances = Tolerances::default();
    if let Some(t) = tol {
        tolerances.b1 = t;
    }
    let alg = Algebra::new(Model::Hilbert(d));
    let start = Instant::now();
    let mut report = VerificationReport::empty(Suite::B1B2.name(), "hilbert", d, seed);
    for check in checks_for(Suite::B1B2) {
        for t in 0..trials {
            if let Some(outcome) = evaluate(check, &alg, seed, t, &tolerances) {
                report.trials += 1;
                report.violations.extend(outcome);
            }
        }
    }
    report.tolerances = tolerances.to_map();
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}
