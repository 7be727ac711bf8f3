//! The two trace conditions singling out the Lüders product among products
//! on Hilbert-space effects.

use super::{AxiomCheck, Instance, TolClass};
use crate::effect::{Effect, Model, State};
use crate::error::{Error, Result};
use crate::harness::algebra::Algebra;
use crate::harness::generate::{random_atom, random_effect, random_mixed_state};
use crate::harness::rng::CounterRng;
use crate::hilbert::{normalized_rank_one_residual, HilbertEffect};

pub(super) static B1B2: &[AxiomCheck] = &[
    AxiomCheck { id: "B1", class: TolClass::B1, generate: gen_b1, residual: b1 },
    AxiomCheck { id: "B2", class: TolClass::B1, generate: gen_b2, residual: b2 },
];

fn gen_b1(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let Model::Hilbert(_) = model else {
        return None;
    };
    Some(
        Instance::default()
            .state("rho", random_mixed_state(model, rng))
            .effect("a", random_effect(model, rng))
            .effect("b", random_effect(model, rng)),
    )
}

fn gen_b2(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let Model::Hilbert(_) = model else {
        return None;
    };
    Some(
        Instance::default()
            .effect("a", random_effect(model, rng))
            .effect("p", random_atom(model, rng)),
    )
}

/// The density matrix of a Hilbert state, as an effect.
fn density_effect(s: &State) -> Result<Effect> {
    let m = s
        .density_matrix()
        .ok_or_else(|| Error::InvalidState("B1 needs a Hilbert state".into()))?;
    Ok(Effect::Hilbert(HilbertEffect::new(m)?))
}

/// `|trace((a∘ρ) b) − trace(ρ (a∘b))|`.
fn b1(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    let rho = density_effect(i.s("rho")?)?;
    let lhs = super::pairing(&alg.product(a, &rho)?, b)?;
    let rhs = super::pairing(&rho, &alg.product(a, b)?)?;
    Ok((lhs - rhs).abs())
}

/// `(a∘P) / trace(a∘P)` is a rank-one projector whenever `a∘P ≠ 0`.
fn b2(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, p) = (i.e("a")?, i.e("p")?);
    let ap = alg.product(a, p)?;
    let m = ap
        .as_hilbert()
        .ok_or_else(|| Error::InvalidState("B2 needs Hilbert effects".into()))?
        .matrix();
    Ok(normalized_rank_one_residual(m).unwrap_or(0.0))
}
