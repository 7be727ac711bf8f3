//! Recognising which kind of algebra a model is: classical (one context),
//! Hilbertian (complete spectral set of contexts), or the trivial `[0, 1]`.

use serde::Serialize;

use super::{completeness_witness, is_context, recombine, spectral_resolution, Context};
use crate::classical::{enumerate_contexts, unsharpness_witness, FuzzyEvent};
use crate::effect::{Effect, Model};
use crate::harness::generate::{random_effect, random_unit_vector};
use crate::harness::rng::{stream_id, CounterRng};
use crate::linalg::{projector, SHARP_TOL};

// Largest classical algebra whose contexts are enumerated exhaustively.
const MAX_ENUMERATED_OUTCOMES: usize = 16;
const RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraClass {
    Classical,
    Hilbertian,
    Trivial,
    /// Some sampled check failed; see the evidence.
    Unresolved,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassificationEvidence {
    /// Number of contexts found by exhaustive search (classical only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contexts_found: Option<usize>,
    pub samples: usize,
    pub max_reconstruction_error: f64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: AlgebraClass,
    pub evidence: ClassificationEvidence,
}

/// Classifies a model from sampled evidence.
///
/// Classical algebras must have exactly one context (found by exhaustive
/// search), every unsharp sample must have a nonzero lower bound of itself
/// and its complement, and every sample must decompose over the context.
/// Hilbert algebras must resolve every sample spectrally and every sampled
/// unit vector must be the first atom of some context. Dimension one gives
/// the trivial algebra.
pub fn classify_algebra(model: Model, budget: usize, seed: u64) -> Classification {
    let mut evidence = ClassificationEvidence {
        samples: budget,
        ..Default::default()
    };
    if model.dim() == 1 {
        return Classification {
            class: AlgebraClass::Trivial,
            evidence,
        };
    }
    let mut rng = CounterRng::new(seed, stream_id("classify"));
    let class = match model {
        Model::Classical(n) => {
            if n <= MAX_ENUMERATED_OUTCOMES {
                let found = enumerate_contexts(n);
                evidence.contexts_found = Some(found.len());
                let singletons: Vec<FuzzyEvent> =
                    (0..n).map(|i| FuzzyEvent::indicator(n, i)).collect();
                if found != [singletons] {
                    evidence.failures.push("context search did not return exactly the singletons".into());
                }
            }
            for k in 0..budget {
                let f = random_effect(model, &mut rng);
                check_spectral(&f, &mut evidence, k);
                let fe = f.as_classical().expect("classical sample");
                if !crate::classical::is_sharp_classical(fe, SHARP_TOL) {
                    let below = unsharpness_witness(fe, SHARP_TOL).and_then(|g| {
                        let g = Effect::Classical(g);
                        let ok = g.leq(&f).ok()? && g.leq(&f.complement()).ok()?;
                        ok.then_some(())
                    });
                    if below.is_none() {
                        evidence.failures.push(format!("sample {k}: no unsharpness witness"));
                    }
                }
            }
            AlgebraClass::Classical
        }
        Model::Hilbert(d) => {
            for k in 0..budget {
                let b = random_effect(model, &mut rng);
                check_spectral(&b, &mut evidence, k);
                let phi = random_unit_vector(d, &mut rng);
                let witnessed = completeness_witness(&phi).ok().and_then(|ctx| {
                    let target = Effect::Hilbert(
                        crate::hilbert::HilbertEffect::new(projector(&phi).ok()?).ok()?,
                    );
                    let err = ctx.atoms()[0].distance(&target).ok()?;
                    (err <= RECONSTRUCTION_TOL).then_some(ctx)
                });
                match witnessed {
                    Some(ctx) if valid(&ctx) => {}
                    _ => evidence.failures.push(format!("sample {k}: no completeness witness")),
                }
            }
            AlgebraClass::Hilbertian
        }
    };
    Classification {
        class: if evidence.failures.is_empty() {
            class
        } else {
            AlgebraClass::Unresolved
        },
        evidence,
    }
}

fn valid(ctx: &Context) -> bool {
    is_context(ctx.atoms(), RECONSTRUCTION_TOL).unwrap_or(false)
}

fn check_spectral(b: &Effect, evidence: &mut ClassificationEvidence, k: usize) {
    let err = spectral_resolution(b).and_then(|(ctx, coeffs)| {
        if !valid(&ctx) {
            return Ok(f64::INFINITY);
        }
        Ok(recombine(&ctx, &coeffs)?
            .add_scaled(-1.0, &b.to_ambient())?
            .norm())
    });
    match err {
        Ok(e) if e <= RECONSTRUCTION_TOL => {
            evidence.max_reconstruction_error = evidence.max_reconstruction_error.max(e)
        }
        _ => evidence.failures.push(format!("sample {k}: spectral resolution failed")),
    }
}
