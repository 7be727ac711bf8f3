//! Model-independent effect interface: partial sum, orthosupplement, scalar
//! action, order, and states.

mod state;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classical::FuzzyEvent;
use crate::error::{Error, Result};
use crate::hilbert::{is_one_dimensional_sharp, is_sharp_hilbert, HilbertEffect};
use crate::linalg::{hermitian_eigh, ComplexMatrix, CLIP_TOL};

pub use state::{order_witness, LinearFunctional, State};

/// Which concrete algebra an element belongs to, with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Fuzzy events on `n` outcomes.
    Classical(usize),
    /// Effects on `C^d`.
    Hilbert(usize),
}

impl Model {
    pub fn parse(name: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        match name {
            "classical" => Ok(Model::Classical(dim)),
            "hilbert" => Ok(Model::Hilbert(dim)),
            other => Err(Error::InvalidSpec(format!("unknown model `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Classical(_) => "classical",
            Model::Hilbert(_) => "hilbert",
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Model::Classical(n) | Model::Hilbert(n) => n,
        }
    }

    pub(crate) fn ensure_same(&self, other: Model) -> Result<()> {
        if *self != other {
            return Err(Error::ModelMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.dim())
    }
}

/// Element of one of the concrete effect algebras.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EffectWire", into = "EffectWire")]
pub enum Effect {
    Classical(FuzzyEvent),
    Hilbert(HilbertEffect),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
enum EffectWire {
    Classical { values: Vec<f64> },
    Hilbert { matrix: ComplexMatrix },
}

impl TryFrom<EffectWire> for Effect {
    type Error = Error;
    fn try_from(w: EffectWire) -> Result<Self> {
        match w {
            EffectWire::Classical { values } => Ok(Effect::Classical(FuzzyEvent::new(values)?)),
            EffectWire::Hilbert { matrix } => Ok(Effect::Hilbert(HilbertEffect::new(matrix)?)),
        }
    }
}

impl From<Effect> for EffectWire {
    fn from(e: Effect) -> Self {
        match e {
            Effect::Classical(f) => EffectWire::Classical {
                values: f.values().to_vec(),
            },
            Effect::Hilbert(h) => EffectWire::Hilbert { matrix: h.into() },
        }
    }
}

impl From<FuzzyEvent> for Effect {
    fn from(f: FuzzyEvent) -> Self {
        Effect::Classical(f)
    }
}

impl From<HilbertEffect> for Effect {
    fn from(h: HilbertEffect) -> Self {
        Effect::Hilbert(h)
    }
}

/// Outcome of a partial orthogonal sum.
#[derive(Debug, Clone, PartialEq)]
pub enum OrthSum {
    Defined(Effect),
    Undefined,
}

impl OrthSum {
    pub fn is_defined(&self) -> bool {
        matches!(self, OrthSum::Defined(_))
    }

    pub fn defined(self) -> Option<Effect> {
        match self {
            OrthSum::Defined(e) => Some(e),
            OrthSum::Undefined => None,
        }
    }
}

/// Element of the ambient real vector space (vectors or Hermitian matrices),
/// where sums and real combinations are always defined.
#[derive(Debug, Clone, PartialEq)]
pub enum Ambient {
    Classical(Vec<f64>),
    Hilbert(ComplexMatrix),
}

impl Ambient {
    pub fn zero(model: Model) -> Self {
        match model {
            Model::Classical(n) => Ambient::Classical(vec![0.0; n]),
            Model::Hilbert(d) => Ambient::Hilbert(ComplexMatrix::zeros(d)),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            Ambient::Classical(v) => Model::Classical(v.len()),
            Ambient::Hilbert(m) => Model::Hilbert(m.dim()),
        }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &Ambient) -> Result<Ambient> {
        self.model().ensure_same(other.model())?;
        Ok(match (self, other) {
            (Ambient::Classical(x), Ambient::Classical(y)) => {
                Ambient::Classical(x.iter().zip(y).map(|(a, b)| a + c * b).collect())
            }
            (Ambient::Hilbert(x), Ambient::Hilbert(y)) => Ambient::Hilbert(x + &y.scale(c)),
            _ => unreachable!("models checked above"),
        })
    }

    /// Euclidean norm for vectors, Frobenius norm for matrices.
    pub fn norm(&self) -> f64 {
        match self {
            Ambient::Classical(x) => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Ambient::Hilbert(m) => m.frobenius_norm(),
        }
    }

    /// Smallest and largest eigenvalue (entry, classically).
    pub fn spectral_range(&self) -> Result<(f64, f64)> {
        match self {
            Ambient::Classical(x) => Ok((
                x.iter().cloned().fold(f64::INFINITY, f64::min),
                x.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            )),
            Ambient::Hilbert(m) => {
                let eig = hermitian_eigh(m)?;
                Ok((eig.min(), eig.max()))
            }
        }
    }

    /// Validates the element as an effect.
    pub fn into_effect(self) -> Result<Effect> {
        match self {
            Ambient::Classical(v) => Ok(Effect::Classical(FuzzyEvent::new(v)?)),
            Ambient::Hilbert(m) => Ok(Effect::Hilbert(HilbertEffect::new(m)?)),
        }
    }
}

impl Effect {
    pub fn model(&self) -> Model {
        match self {
            Effect::Classical(f) => Model::Classical(f.n()),
            Effect::Hilbert(h) => Model::Hilbert(h.dim()),
        }
    }

    /// The zero effect `θ`.
    pub fn zero(model: Model) -> Self {
        match model {
            Model::Classical(n) => Effect::Classical(FuzzyEvent::zero(n)),
            Model::Hilbert(d) => Effect::Hilbert(HilbertEffect::zero(d)),
        }
    }

    /// The unit effect `u`.
    pub fn unit(model: Model) -> Self {
        match model {
            Model::Classical(n) => Effect::Classical(FuzzyEvent::unit(n)),
            Model::Hilbert(d) => Effect::Hilbert(HilbertEffect::identity(d)),
        }
    }

    pub fn as_classical(&self) -> Option<&FuzzyEvent> {
        match self {
            Effect::Classical(f) => Some(f),
            Effect::Hilbert(_) => None,
        }
    }

    pub fn as_hilbert(&self) -> Option<&HilbertEffect> {
        match self {
            Effect::Hilbert(h) => Some(h),
            Effect::Classical(_) => None,
        }
    }

    pub fn to_ambient(&self) -> Ambient {
        match self {
            Effect::Classical(f) => Ambient::Classical(f.values().to_vec()),
            Effect::Hilbert(h) => Ambient::Hilbert(h.matrix().clone()),
        }
    }

    /// `a′ = u − a`.
    pub fn complement(&self) -> Effect {
        match self {
            Effect::Classical(f) => Effect::Classical(
                FuzzyEvent::new(f.values().iter().map(|v| 1.0 - v).collect())
                    .expect("complement of an effect stays in [0, 1]"),
            ),
            Effect::Hilbert(h) => {
                let m = &ComplexMatrix::identity(h.dim()) - h.matrix();
                Effect::Hilbert(HilbertEffect::new(m).unwrap_or_else(|_| {
                    // only reachable for unchecked payloads
                    HilbertEffect::unchecked(&ComplexMatrix::identity(h.dim()) - h.matrix())
                }))
            }
        }
    }

    /// `λa` for `λ ∈ [0, 1]`.
    pub fn scale(&self, lambda: f64) -> Result<Effect> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::ScalarOutOfRange(lambda));
        }
        Ok(match self {
            Effect::Classical(f) => Effect::Classical(FuzzyEvent::new(
                f.values().iter().map(|v| lambda * v).collect(),
            )?),
            Effect::Hilbert(h) => Effect::Hilbert(HilbertEffect::new(h.matrix().scale(lambda))?),
        })
    }

    /// `a ⊕ b`, defined exactly when `a + b ≤ u` (up to `clip_tol`).
    pub fn orth_sum(&self, other: &Effect) -> Result<OrthSum> {
        self.model().ensure_same(other.model())?;
        let sum = self.to_ambient().add_scaled(1.0, &other.to_ambient())?;
        let (_, hi) = sum.spectral_range()?;
        if hi > 1.0 + CLIP_TOL {
            return Ok(OrthSum::Undefined);
        }
        Ok(OrthSum::Defined(sum.into_effect()?))
    }

    /// `b − a` when `a ≤ b`, otherwise `None`.
    pub fn difference(&self, a: &Effect) -> Result<Option<Effect>> {
        if !a.leq(self)? {
            return Ok(None);
        }
        Ok(Some(self.to_ambient().add_scaled(-1.0, &a.to_ambient())?.into_effect()?))
    }

    /// `a ≤ b` iff `b − a` is positive up to `clip_tol`.
    pub fn leq(&self, other: &Effect) -> Result<bool> {
        Ok(order_deficit(self, other)? <= CLIP_TOL)
    }

    /// Euclidean or Frobenius distance between payloads.
    pub fn distance(&self, other: &Effect) -> Result<f64> {
        self.model().ensure_same(other.model())?;
        Ok(self.to_ambient().add_scaled(-1.0, &other.to_ambient())?.norm())
    }

    /// Payload norm.
    pub fn norm(&self) -> f64 {
        self.to_ambient().norm()
    }

    pub fn is_sharp(&self, tol: f64) -> bool {
        match self {
            Effect::Classical(f) => crate::classical::is_sharp_classical(f, tol),
            Effect::Hilbert(h) => is_sharp_hilbert(h, tol),
        }
    }

    /// Atom test: sharp, nonzero, and with nothing but multiples of itself below it.
    pub fn is_one_dimensional_sharp(&self) -> bool {
        match self {
            Effect::Classical(f) => crate::classical::is_one_dimensional(f),
            Effect::Hilbert(h) => is_one_dimensional_sharp(h),
        }
    }
}

/// How far `a ≤ b` fails: `max(0, −min spectrum(b − a))`.
pub fn order_deficit(a: &Effect, b: &Effect) -> Result<f64> {
    a.model().ensure_same(b.model())?;
    let diff = b.to_ambient().add_scaled(-1.0, &a.to_ambient())?;
    let (lo, _) = diff.spectral_range()?;
    Ok((-lo).max(0.0))
}
