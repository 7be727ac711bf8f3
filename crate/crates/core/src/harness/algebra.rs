//! The operations a suite exercises, with optional deliberate faults so the
//! checks can be shown to catch broken models.

use serde::{Deserialize, Serialize};

use crate::classical::FuzzyEvent;
use crate::effect::{Ambient, Effect, Model, OrthSum};
use crate::error::Result;
use crate::hilbert::HilbertEffect;
use crate::linalg::{hermitian_eigh, inner, projector, vector_norm, EigenDecomposition, C64};
use crate::sequential::seq_product;

/// A deliberately broken ingredient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// `a ⊕ b` always defined, with `a + b` clipped back into `[0, u]`.
    ClippedSum,
    /// `a∘b = ½(ab + ba)` clipped into `[0, u]`.
    SymmetrizedProduct,
    /// `a∘b = ab`, kept even when it is not Hermitian.
    RawProduct,
    /// Context atoms are projectors onto unit vectors that were never
    /// orthogonalised, so they do not sum to the unit.
    UnnormalizedContext,
}

impl Fault {
    pub fn parse(name: &str) -> Option<Fault> {
        serde_json::from_value(serde_json::Value::String(name.to_string())).ok()
    }

    pub fn name(self) -> &'static str {
        match self {
            Fault::ClippedSum => "clipped-sum",
            Fault::SymmetrizedProduct => "symmetrized-product",
            Fault::RawProduct => "raw-product",
            Fault::UnnormalizedContext => "unnormalized-context",
        }
    }
}

/// A concrete model, possibly with one faulty operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Algebra {
    pub model: Model,
    pub fault: Option<Fault>,
}

impl Algebra {
    pub fn new(model: Model) -> Self {
        Algebra { model, fault: None }
    }

    pub fn with_fault(model: Model, fault: Fault) -> Self {
        Algebra {
            model,
            fault: Some(fault),
        }
    }

    pub fn sum(&self, a: &Effect, b: &Effect) -> Result<OrthSum> {
        if self.fault == Some(Fault::ClippedSum) {
            let s = a.to_ambient().add_scaled(1.0, &b.to_ambient())?;
            return Ok(OrthSum::Defined(clip(s)?));
        }
        a.orth_sum(b)
    }

    pub fn product(&self, a: &Effect, b: &Effect) -> Result<Effect> {
        match (self.fault, a, b) {
            (Some(Fault::SymmetrizedProduct), Effect::Hilbert(x), Effect::Hilbert(y)) => {
                let ab = x.matrix() * y.matrix();
                let ba = y.matrix() * x.matrix();
                clip(Ambient::Hilbert((&ab + &ba).scale(0.5)))
            }
            (Some(Fault::RawProduct), Effect::Hilbert(x), Effect::Hilbert(y)) => {
                a.model().ensure_same(b.model())?;
                Ok(Effect::Hilbert(HilbertEffect::unchecked(x.matrix() * y.matrix())))
            }
            _ => seq_product(a, b),
        }
    }

    /// Atoms of the context spanned by `vectors`: projectors onto the
    /// Gram–Schmidt orthonormalisation, or onto the merely normalised vectors
    /// under [`Fault::UnnormalizedContext`].
    pub fn context_atoms(&self, vectors: &[Vec<C64>]) -> Result<Vec<Effect>> {
        let orthogonalise = self.fault != Some(Fault::UnnormalizedContext);
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
        for v in vectors {
            let mut w = v.clone();
            if orthogonalise {
                for _ in 0..2 {
                    for u in &basis {
                        let c = inner(u, &w);
                        for (x, y) in w.iter_mut().zip(u) {
                            *x -= c * y;
                        }
                    }
                }
            }
            let n = vector_norm(&w);
            basis.push(w.iter().map(|z| z / n).collect());
        }
        basis
            .iter()
            .map(|v| Ok(Effect::Hilbert(HilbertEffect::new(projector(v)?)?)))
            .collect()
    }
}

/// Nearest effect in spectral terms: entries or eigenvalues clamped to `[0, 1]`.
fn clip(x: Ambient) -> Result<Effect> {
    match x {
        Ambient::Classical(v) => Ok(Effect::Classical(FuzzyEvent::new(
            v.into_iter().map(|t| t.clamp(0.0, 1.0)).collect(),
        )?)),
        Ambient::Hilbert(m) => {
            let eig = hermitian_eigh(&m.hermitian_part())?;
            let clamped = EigenDecomposition {
                eigenvalues: eig.eigenvalues.iter().map(|t| t.clamp(0.0, 1.0)).collect(),
                eigenvectors: eig.eigenvectors,
            };
            Ok(Effect::Hilbert(HilbertEffect::new(clamped.reconstruct())?))
        }
    }
}
