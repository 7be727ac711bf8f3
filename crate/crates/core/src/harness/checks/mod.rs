//! Registry of randomized law checks.
//!
//! A check draws an [`Instance`] from a seeded stream and maps it to a
//! nonnegative residual; the law holds on the instance when the residual is
//! within the tolerance of the check's class. Residuals of implications whose
//! premise fails are zero; purely logical checks report `0` or `1`.

mod b1b2;
mod conditioning;
mod effect;
mod representation;
mod sea;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::algebra::Algebra;
use super::rng::CounterRng;
use super::Suite;
use crate::effect::{Effect, Model, State};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Tolerance families; see [`crate::harness::Tolerances`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TolClass {
    Axiom,
    Conditioning,
    B1,
    Exact,
    Transition,
    Recovery,
}

/// Named inputs of one check evaluation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub effects: BTreeMap<String, Effect>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub states: BTreeMap<String, State>,
    /// Contexts and measurements, as lists of effects.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub families: BTreeMap<String, Vec<Effect>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub matrices: BTreeMap<String, ComplexMatrix>,
}

impl Instance {
    pub fn effect(mut self, name: &str, e: Effect) -> Self {
        self.effects.insert(name.into(), e);
        self
    }

    pub fn scalar(mut self, name: &str, x: f64) -> Self {
        self.scalars.insert(name.into(), x);
        self
    }

    pub fn state(mut self, name: &str, s: State) -> Self {
        self.states.insert(name.into(), s);
        self
    }

    pub fn family(mut self, name: &str, f: Vec<Effect>) -> Self {
        self.families.insert(name.into(), f);
        self
    }

    pub fn matrix(mut self, name: &str, m: ComplexMatrix) -> Self {
        self.matrices.insert(name.into(), m);
        self
    }

    pub fn e(&self, name: &str) -> Result<&Effect> {
        self.effects.get(name).ok_or_else(|| Error::MissingField(name.into()))
    }

    pub fn x(&self, name: &str) -> Result<f64> {
        self.scalars.get(name).copied().ok_or_else(|| Error::MissingField(name.into()))
    }

    pub fn s(&self, name: &str) -> Result<&State> {
        self.states.get(name).ok_or_else(|| Error::MissingField(name.into()))
    }

    pub fn f(&self, name: &str) -> Result<&[Effect]> {
        self.families
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::MissingField(name.into()))
    }

    pub fn m(&self, name: &str) -> Result<&ComplexMatrix> {
        self.matrices.get(name).ok_or_else(|| Error::MissingField(name.into()))
    }
}

pub struct AxiomCheck {
    pub id: &'static str,
    pub class: TolClass,
    /// `None` when the law does not apply to the model.
    pub generate: fn(Model, &mut CounterRng) -> Option<Instance>,
    pub residual: fn(&Algebra, &Instance) -> Result<f64>,
}

/// Checks making up a suite, in a fixed order.
pub fn checks_for(suite: Suite) -> Vec<&'static AxiomCheck> {
    let lists: Vec<&'static [AxiomCheck]> = match suite {
        Suite::Effect => vec![effect::EFFECT],
        Suite::Convex => vec![effect::CONVEX],
        Suite::Sea => vec![sea::SEA],
        Suite::B1B2 => vec![b1b2::B1B2],
        Suite::Representation => vec![representation::REPRESENTATION],
        Suite::Conditioning => vec![conditioning::CONDITIONING],
        Suite::All => vec![
            effect::EFFECT,
            effect::CONVEX,
            sea::SEA,
            b1b2::B1B2,
            representation::REPRESENTATION,
            conditioning::CONDITIONING,
        ],
    };
    lists.into_iter().flatten().collect()
}

pub fn find(id: &str) -> Result<&'static AxiomCheck> {
    checks_for(Suite::All)
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownAxiom(id.into()))
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn dist(a: &Effect, b: &Effect) -> Result<f64> {
    a.distance(b)
}

/// `tr(XY)` or `Σ x_i y_i`.
fn pairing(x: &Effect, y: &Effect) -> Result<f64> {
    x.model().ensure_same(y.model())?;
    Ok(match (x.to_ambient(), y.to_ambient()) {
        (crate::effect::Ambient::Classical(a), crate::effect::Ambient::Classical(b)) => {
            a.iter().zip(&b).map(|(p, q)| p * q).sum()
        }
        (crate::effect::Ambient::Hilbert(a), crate::effect::Ambient::Hilbert(b)) => {
            a.trace_product(&b).re
        }
        _ => unreachable!("models checked above"),
    })
}

/// `‖a∘b − b∘a‖` under the algebra's product.
fn commutator(alg: &Algebra, a: &Effect, b: &Effect) -> Result<f64> {
    dist(&alg.product(a, b)?, &alg.product(b, a)?)
}

/// Deficit of `a ≤ b`, i.e. `max(0, −min spectrum(b − a))`.
fn deficit(a: &Effect, b: &Effect) -> Result<f64> {
    crate::effect::order_deficit(a, b)
}
