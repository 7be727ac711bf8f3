//! Seeded random instances for both models.
//!
//! Hilbert effects are random Hermitian matrices (Gaussian entries) whose
//! spectrum is affinely mapped onto `[u_lo, u_hi] ⊆ [0, 1]`; contexts are the
//! projectors onto a Haar-random orthonormal basis (Gram–Schmidt of a complex
//! Gaussian matrix); densities are `G†G / trace`; measurements are
//! `S^{-1/2} P_i S^{-1/2}` for random positive parts `P_i` with sum `S`.

use serde::{Deserialize, Serialize};

use super::rng::{stream_id, CounterRng};
use crate::classical::{FuzzyEvent, ProbabilityVector};
use crate::context::Context;
use crate::effect::{Effect, Model, State};
use crate::error::{Error, Result};
use crate::hilbert::{DensityState, HilbertEffect};
use crate::linalg::{hermitian_eigh, inner, projector, vector_norm, ComplexMatrix, C64};
use crate::sequential::Measurement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Effect,
    Sharp,
    Context,
    StateVector,
    StateDensity,
    Measurement,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub model: Model,
    pub kind: InstanceKind,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Generated {
    Effect(Effect),
    Context(Context),
    State(State),
    Measurement(Measurement),
}

/// Deterministic instance for a spec.
pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    if spec.model.dim() == 0 {
        return Err(Error::InvalidSpec("dimension must be positive".into()));
    }
    let mut rng = CounterRng::new(spec.seed, stream_id("generate"));
    let m = spec.model;
    Ok(match spec.kind {
        InstanceKind::Effect => Generated::Effect(random_effect(m, &mut rng)),
        InstanceKind::Sharp => Generated::Effect(random_sharp(m, &mut rng)),
        InstanceKind::Context => Generated::Context(random_context(m, &mut rng)),
        InstanceKind::StateVector => Generated::State(random_pure_state(m, &mut rng)),
        InstanceKind::StateDensity => Generated::State(random_mixed_state(m, &mut rng)),
        InstanceKind::Measurement => {
            let k = 2 + rng.index(3);
            Generated::Measurement(random_measurement(m, k, &mut rng))
        }
    })
}

fn ordered_pair(rng: &mut CounterRng, lo: f64, hi: f64) -> (f64, f64) {
    let x = rng.uniform(lo, hi);
    let y = rng.uniform(lo, hi);
    (x.min(y), x.max(y))
}

fn complex_gaussian(rng: &mut CounterRng) -> C64 {
    C64::new(rng.gaussian(), rng.gaussian())
}

/// Hermitian matrix with Gaussian entries.
pub fn random_hermitian(d: usize, rng: &mut CounterRng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d);
    for i in 0..d {
        m[(i, i)] = C64::new(rng.gaussian(), 0.0);
        for j in (i + 1)..d {
            let z = complex_gaussian(rng) * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random effect with spectrum (or entries) spread over `[u_lo, u_hi]`.
pub fn random_effect(model: Model, rng: &mut CounterRng) -> Effect {
    let (lo, hi) = ordered_pair(rng, 0.0, 1.0);
    random_effect_in(model, lo, hi, rng)
}

/// Random effect whose spectrum (or entries) lies in `[lo, hi] ⊆ [0, 1]`.
pub fn random_effect_in(model: Model, lo: f64, hi: f64, rng: &mut CounterRng) -> Effect {
    match model {
        Model::Classical(n) => Effect::Classical(
            FuzzyEvent::new((0..n).map(|_| rng.uniform(lo, hi)).collect())
                .expect("entries lie in [0, 1]"),
        ),
        Model::Hilbert(d) => {
            let h = random_hermitian(d, rng);
            let eig = hermitian_eigh(&h).expect("Gaussian Hermitian matrix");
            let (min, max) = (eig.min(), eig.max());
            let spread = max - min;
            let m = eig.map(|x| {
                if spread > 0.0 {
                    lo + (x - min) / spread * (hi - lo)
                } else {
                    hi
                }
            });
            Effect::Hilbert(HilbertEffect::new(m).expect("spectrum rescaled into [0, 1]"))
        }
    }
}

/// Effect with the given eigenvalues on the atoms of a context.
pub fn effect_on_context(ctx: &Context, coefficients: &[f64]) -> Effect {
    crate::context::recombine(ctx, coefficients)
        .and_then(|a| a.into_effect())
        .expect("coefficients lie in [0, 1]")
}

/// Haar-random unit vector.
pub fn random_unit_vector(d: usize, rng: &mut CounterRng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        let n = vector_norm(&v);
        if n > 1e-6 {
            return v.iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-random orthonormal basis of `C^d`.
pub fn random_basis(d: usize, rng: &mut CounterRng) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &basis {
                let c = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
        }
        let n = vector_norm(&v);
        if n > 1e-6 {
            basis.push(v.iter().map(|z| z / n).collect());
        }
    }
    basis
}

/// Random context: Haar basis in the Hilbert model, the unique context classically.
pub fn random_context(model: Model, rng: &mut CounterRng) -> Context {
    match model {
        Model::Classical(_) => Context::standard(model),
        Model::Hilbert(d) => {
            Context::from_vectors(random_basis(d, rng)).expect("Gram–Schmidt output is orthonormal")
        }
    }
}

/// Random rank-one projector (random singleton indicator classically).
pub fn random_atom(model: Model, rng: &mut CounterRng) -> Effect {
    match model {
        Model::Classical(n) => Effect::Classical(FuzzyEvent::indicator(n, rng.index(n))),
        Model::Hilbert(d) => {
            let v = random_unit_vector(d, rng);
            Effect::Hilbert(HilbertEffect::new(projector(&v).expect("unit vector")).expect("projector"))
        }
    }
}

/// Random projector of random rank (random indicator classically).
pub fn random_sharp(model: Model, rng: &mut CounterRng) -> Effect {
    let ctx = random_context(model, rng);
    let picks: Vec<f64> = (0..ctx.len()).map(|_| if rng.coin() { 1.0 } else { 0.0 }).collect();
    effect_on_context(&ctx, &picks)
}

/// Vector state, or a random point mass classically.
pub fn random_pure_state(model: Model, rng: &mut CounterRng) -> State {
    match model {
        Model::Classical(n) => State::Dirac {
            n,
            index: rng.index(n),
        },
        Model::Hilbert(d) => State::Vector(random_unit_vector(d, rng)),
    }
}

/// `G†G / trace` in the Hilbert model, normalised exponential weights classically.
pub fn random_mixed_state(model: Model, rng: &mut CounterRng) -> State {
    match model {
        Model::Classical(n) => State::Distribution(random_distribution(n, rng)),
        Model::Hilbert(d) => {
            let mut g = ComplexMatrix::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    g[(i, j)] = complex_gaussian(rng);
                }
            }
            let p = &g.adjoint() * &g;
            let tr = p.trace().re;
            State::Density(
                DensityState::new(p.scale(1.0 / tr).hermitian_part()).expect("normalised Gram matrix"),
            )
        }
    }
}

fn random_distribution(n: usize, rng: &mut CounterRng) -> ProbabilityVector {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.next_f64()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // put the rounding remainder on the largest weight
    let k = (0..n).fold(0, |b, i| if w[i] > w[b] { i } else { b });
    let rest: f64 = w.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, x)| x).sum();
    w[k] = 1.0 - rest;
    ProbabilityVector::new(w).expect("weights sum to one")
}

/// Either a pure or a mixed state, with equal odds.
pub fn random_state(model: Model, rng: &mut CounterRng) -> State {
    if rng.coin() {
        random_pure_state(model, rng)
    } else {
        random_mixed_state(model, rng)
    }
}

/// Random `k`-outcome measurement with unsharp elements.
pub fn random_measurement(model: Model, k: usize, rng: &mut CounterRng) -> Measurement {
    match model {
        Model::Classical(n) => {
            let parts: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..n).map(|_| rng.uniform(0.05, 1.0)).collect())
                .collect();
            let elements = (0..k)
                .map(|j| {
                    let vals = (0..n)
                        .map(|i| {
                            if j + 1 == k {
                                // remainder keeps the sum exact
                                let used: f64 = (0..j).map(|l| parts[l][i] / col_sum(&parts, i)).sum();
                                (1.0 - used).max(0.0)
                            } else {
                                parts[j][i] / col_sum(&parts, i)
                            }
                        })
                        .collect();
                    Effect::Classical(FuzzyEvent::new(vals).expect("normalised parts"))
                })
                .collect();
            Measurement::new(elements).expect("parts sum to the unit")
        }
        Model::Hilbert(d) => {
            let parts: Vec<ComplexMatrix> = (0..k)
                .map(|_| {
                    let mut g = ComplexMatrix::zeros(d);
                    for i in 0..d {
                        for j in 0..d {
                            g[(i, j)] = complex_gaussian(rng);
                        }
                    }
                    &g.adjoint() * &g
                })
                .collect();
            let mut s = ComplexMatrix::zeros(d);
            for p in &parts {
                s = &s + p;
            }
            let inv_sqrt = hermitian_eigh(&s.hermitian_part())
                .expect("sum of Gram matrices")
                .map(|x| 1.0 / x.sqrt());
            let mut elements: Vec<Effect> = parts
                .iter()
                .take(k - 1)
                .map(|p| {
                    let m = (&(&inv_sqrt * p) * &inv_sqrt).hermitian_part();
                    Effect::Hilbert(HilbertEffect::new(m).expect("normalised part"))
                })
                .collect();
            let mut rest = ComplexMatrix::identity(d);
            for e in &elements {
                rest = &rest - e.as_hilbert().expect("Hilbert element").matrix();
            }
            elements.push(Effect::Hilbert(HilbertEffect::new(rest).expect("remainder part")));
            Measurement::new(elements).expect("parts sum to the unit")
        }
    }
}

fn col_sum(parts: &[Vec<f64>], i: usize) -> f64 {
    parts.iter().map(|p| p[i]).sum()
}

/// Sharp measurement obtained by grouping the atoms of a random context
/// into at most `k` nonempty blocks.
pub fn random_sharp_measurement(model: Model, k: usize, rng: &mut CounterRng) -> (Measurement, Context, Vec<usize>) {
    let ctx = random_context(model, rng);
    let n = ctx.len();
    let blocks = k.clamp(1, n);
    // every block gets one atom, the rest are spread at random
    let mut label: Vec<usize> = (0..n).map(|i| if i < blocks { i } else { rng.index(blocks) }).collect();
    for i in (1..n).rev() {
        let j = rng.index(i + 1);
        label.swap(i, j);
    }
    let elements = (0..blocks)
        .map(|b| {
            let picks: Vec<f64> = label.iter().map(|&l| if l == b { 1.0 } else { 0.0 }).collect();
            effect_on_context(&ctx, &picks)
        })
        .collect();
    (
        Measurement::new(elements).expect("blocks partition the context"),
        ctx,
        label,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::is_context;

    #[test]
    fn same_spec_same_output() {
        for kind in [
            InstanceKind::Effect,
            InstanceKind::Sharp,
            InstanceKind::Context,
            InstanceKind::StateVector,
            InstanceKind::StateDensity,
            InstanceKind::Measurement,
        ] {
            for model in [Model::Hilbert(3), Model::Classical(4)] {
                let spec = GeneratorSpec { model, kind, seed: 11 };
                assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
            }
        }
    }

    #[test]
    fn generated_effect_is_valid() {
        let spec = GeneratorSpec {
            model: Model::Hilbert(4),
            kind: InstanceKind::Effect,
            seed: 9,
        };
        let Generated::Effect(Effect::Hilbert(h)) = generate(&spec).unwrap() else {
            panic!("expected a Hilbert effect")
        };
        let eig = hermitian_eigh(h.matrix()).unwrap();
        assert!(eig.min() >= -1e-10 && eig.max() <= 1.0 + 1e-10);
    }

    #[test]
    fn generated_context_is_valid() {
        let spec = GeneratorSpec {
            model: Model::Hilbert(3),
            kind: InstanceKind::Context,
            seed: 5,
        };
        let Generated::Context(ctx) = generate(&spec).unwrap() else {
            panic!("expected a context")
        };
        assert!(is_context(ctx.atoms(), 1e-8).unwrap());
    }

    #[test]
    fn measurements_sum_to_unit() {
        let mut rng = CounterRng::new(3, 0);
        for d in 1..=5 {
            for model in [Model::Hilbert(d), Model::Classical(d)] {
                let m = random_measurement(model, 3, &mut rng);
                assert_eq!(m.len(), 3);
                let (sharp, _, _) = random_sharp_measurement(model, 2, &mut rng);
                assert!(sharp.first_unsharp(1e-8).is_none());
            }
        }
    }
}
