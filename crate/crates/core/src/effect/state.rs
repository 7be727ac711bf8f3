use serde::{Deserialize, Serialize};

use super::{Ambient, Effect, Model};
use crate::classical::ProbabilityVector;
use crate::error::{Error, Result};
use crate::hilbert::DensityState;
use crate::linalg::{hermitian_eigh, vector_norm, ComplexMatrix, C64, CLIP_TOL, EQ_TOL};

// Evaluations may leave [0, 1] by at most this much before clamping.
const EVAL_SLACK: f64 = 1e-12;

/// A state on one of the concrete algebras.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateWire", into = "StateWire")]
pub enum State {
    /// Point mass `δ_i` on `n` outcomes.
    Dirac { n: usize, index: usize },
    Distribution(ProbabilityVector),
    /// Vector state `φ̂(A) = ⟨φ, Aφ⟩`.
    Vector(Vec<C64>),
    Density(DensityState),
}

#[derive(Serialize, Deserialize)]
struct StateWire {
    model: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<ComplexMatrix>,
}

impl StateWire {
    fn empty(model: &str, kind: &str) -> Self {
        StateWire {
            model: model.into(),
            kind: kind.into(),
            n: None,
            index: None,
            weights: None,
            re: None,
            im: None,
            matrix: None,
        }
    }
}

fn field<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::MissingField(name.into()))
}

impl TryFrom<StateWire> for State {
    type Error = Error;
    fn try_from(w: StateWire) -> Result<Self> {
        match (w.model.as_str(), w.kind.as_str()) {
            ("classical", "dirac") => State::dirac(field(w.n, "n")?, field(w.index, "index")?),
            ("classical", "pvec") => Ok(State::Distribution(ProbabilityVector::new(field(
                w.weights, "weights",
            )?)?)),
            ("hilbert", "vector") => {
                let re = field(w.re, "re")?;
                let im = w.im.unwrap_or_else(|| vec![0.0; re.len()]);
                if im.len() != re.len() {
                    return Err(Error::LengthMismatch {
                        expected: re.len(),
                        got: im.len(),
                    });
                }
                State::vector(re.iter().zip(&im).map(|(&r, &i)| C64::new(r, i)).collect())
            }
            ("hilbert", "density") => Ok(State::Density(DensityState::new(field(
                w.matrix, "matrix",
            )?)?)),
            (model, kind) => Err(Error::InvalidState(format!(
                "unknown state kind `{kind}` for model `{model}`"
            ))),
        }
    }
}

impl From<State> for StateWire {
    fn from(s: State) -> Self {
        match s {
            State::Dirac { n, index } => StateWire {
                n: Some(n),
                index: Some(index),
                ..StateWire::empty("classical", "dirac")
            },
            State::Distribution(p) => StateWire {
                weights: Some(p.weights().to_vec()),
                ..StateWire::empty("classical", "pvec")
            },
            State::Vector(v) => StateWire {
                re: Some(v.iter().map(|z| z.re).collect()),
                im: Some(v.iter().map(|z| z.im).collect()),
                ..StateWire::empty("hilbert", "vector")
            },
            State::Density(d) => StateWire {
                matrix: Some(d.into()),
                ..StateWire::empty("hilbert", "density")
            },
        }
    }
}

impl State {
    pub fn dirac(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidState(format!("index {index} out of range for {n} outcomes")));
        }
        Ok(State::Dirac { n, index })
    }

    /// Vector state; the amplitudes must form a unit vector.
    pub fn vector(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vector_norm(&amplitudes);
        if amplitudes.is_empty() || (norm - 1.0).abs() > EQ_TOL {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(State::Vector(amplitudes))
    }

    /// Uniform distribution or maximally mixed density.
    pub fn maximally_mixed(model: Model) -> Self {
        match model {
            Model::Classical(n) => State::Distribution(
                ProbabilityVector::new(vec![1.0 / n as f64; n])
                    .unwrap_or_else(|_| ProbabilityVector::dirac(n, 0)),
            ),
            Model::Hilbert(d) => State::Density(DensityState::maximally_mixed(d)),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            State::Dirac { n, .. } => Model::Classical(*n),
            State::Distribution(p) => Model::Classical(p.n()),
            State::Vector(v) => Model::Hilbert(v.len()),
            State::Density(d) => Model::Hilbert(d.dim()),
        }
    }

    /// Density matrix `|φ⟩⟨φ|` or `ρ` of a Hilbert-model state.
    pub fn density_matrix(&self) -> Option<ComplexMatrix> {
        match self {
            State::Vector(v) => Some(ComplexMatrix::outer(v, v)),
            State::Density(d) => Some(d.matrix().clone()),
            _ => None,
        }
    }

    /// Probability weights of a classical state.
    pub fn weights(&self) -> Option<Vec<f64>> {
        match self {
            State::Dirac { n, index } => Some(ProbabilityVector::dirac(*n, *index).weights().to_vec()),
            State::Distribution(p) => Some(p.weights().to_vec()),
            _ => None,
        }
    }

    /// `s(a)`, clamped to `[0, 1]` after allowing `1e-12` of drift.
    pub fn eval(&self, a: &Effect) -> Result<f64> {
        let v = self.extend().apply(&a.to_ambient())?;
        if !(-EVAL_SLACK..=1.0 + EVAL_SLACK).contains(&v) {
            return Err(Error::NotAnEffect(format!("state value {v} leaves [0, 1]")));
        }
        Ok(v.clamp(0.0, 1.0))
    }

    /// Unique linear extension to the ambient space.
    pub fn extend(&self) -> LinearFunctional {
        match self {
            State::Dirac { .. } | State::Distribution(_) => {
                LinearFunctional::Classical(self.weights().expect("classical state"))
            }
            State::Vector(_) | State::Density(_) => {
                LinearFunctional::Hilbert(self.density_matrix().expect("Hilbert state"))
            }
        }
    }
}

/// Linear functional on the ambient space: `x ↦ Σ μ_i x_i` or `X ↦ trace(G X)`.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearFunctional {
    Classical(Vec<f64>),
    Hilbert(ComplexMatrix),
}

impl LinearFunctional {
    pub fn model(&self) -> Model {
        match self {
            LinearFunctional::Classical(mu) => Model::Classical(mu.len()),
            LinearFunctional::Hilbert(g) => Model::Hilbert(g.dim()),
        }
    }

    pub fn apply(&self, x: &Ambient) -> Result<f64> {
        self.model().ensure_same(x.model())?;
        Ok(match (self, x) {
            (LinearFunctional::Classical(mu), Ambient::Classical(v)) => {
                mu.iter().zip(v).map(|(a, b)| a * b).sum()
            }
            (LinearFunctional::Hilbert(g), Ambient::Hilbert(m)) => g.trace_product(m).re,
            _ => unreachable!("models checked above"),
        })
    }
}

/// A state separating `a` from `b` when `a ≰ b`, or `None` when `a ≤ b`.
///
/// Classically this is the point mass at the coordinate where `a − b` is
/// largest; in the Hilbert model it is the eigenvector of `b − a` for its
/// most negative eigenvalue.
pub fn order_witness(a: &Effect, b: &Effect) -> Result<Option<State>> {
    a.model().ensure_same(b.model())?;
    if a.leq(b)? {
        return Ok(None);
    }
    match (a, b) {
        (Effect::Classical(x), Effect::Classical(y)) => {
            let (index, _) = x
                .values()
                .iter()
                .zip(y.values())
                .map(|(p, q)| p - q)
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, g)| if g > best.1 { (i, g) } else { best });
            Ok(Some(State::Dirac { n: x.n(), index }))
        }
        (Effect::Hilbert(x), Effect::Hilbert(y)) => {
            let eig = hermitian_eigh(&(y.matrix() - x.matrix()))?;
            debug_assert!(eig.min() < -CLIP_TOL);
            Ok(Some(State::Vector(eig.eigenvectors[0].clone())))
        }
        _ => unreachable!("models checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::FuzzyEvent;
    use crate::hilbert::HilbertEffect;
    use crate::linalg::{projector, real_vector};

    fn pplus() -> Effect {
        let s = 0.5f64.sqrt();
        Effect::Hilbert(HilbertEffect::new(projector(&real_vector(&[s, s])).unwrap()).unwrap())
    }

    fn p0() -> Effect {
        Effect::Hilbert(HilbertEffect::new(ComplexMatrix::from_real_diag(&[1.0, 0.0])).unwrap())
    }

    fn c(values: &[f64]) -> Effect {
        Effect::Classical(FuzzyEvent::new(values.to_vec()).unwrap())
    }

    #[test]
    fn evaluation_examples() {
        let ket0 = State::vector(real_vector(&[1.0, 0.0])).unwrap();
        assert!((ket0.eval(&Effect::unit(Model::Hilbert(2))).unwrap() - 1.0).abs() < 1e-15);
        assert!((ket0.eval(&pplus()).unwrap() - 0.5).abs() < 1e-15);
        // δ at the second outcome
        let delta = State::dirac(2, 1).unwrap();
        assert_eq!(delta.eval(&c(&[0.3, 0.9])).unwrap(), 0.9);
        assert!(matches!(
            delta.eval(&pplus()),
            Err(Error::ModelMismatch { .. })
        ));
        assert!(State::vector(real_vector(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn extension_is_unital_and_agrees() {
        let rho = State::maximally_mixed(Model::Hilbert(2));
        let f = rho.extend();
        let u = Effect::unit(Model::Hilbert(2)).to_ambient();
        assert!((f.apply(&u).unwrap() - 1.0).abs() < 1e-15);
        assert!((f.apply(&pplus().to_ambient()).unwrap() - rho.eval(&pplus()).unwrap()).abs() < 1e-15);
        let mu = State::Distribution(ProbabilityVector::new(vec![0.25, 0.75]).unwrap());
        assert!((mu.extend().apply(&Ambient::Classical(vec![2.0, -1.0])).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn witness_examples() {
        assert!(order_witness(&pplus(), &pplus()).unwrap().is_none());
        let w = order_witness(&c(&[0.9, 0.1]), &c(&[0.5, 0.5])).unwrap().unwrap();
        assert_eq!(w, State::Dirac { n: 2, index: 0 });
        let w = order_witness(&p0(), &pplus()).unwrap().unwrap();
        let gap = w.eval(&p0()).unwrap() - w.eval(&pplus()).unwrap();
        assert!((gap - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn state_json_round_trip() {
        let states = vec![
            State::dirac(3, 2).unwrap(),
            State::Distribution(ProbabilityVector::new(vec![0.5, 0.5]).unwrap()),
            State::vector(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap(),
            State::maximally_mixed(Model::Hilbert(2)),
        ];
        for s in states {
            let text = serde_json::to_string(&s).unwrap();
            let back: State = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s, "{text}");
        }
        let s: State = serde_json::from_str(r#"{"model":"hilbert","kind":"vector","re":[1,0]}"#).unwrap();
        assert_eq!(s, State::Vector(real_vector(&[1.0, 0.0])));
        assert!(serde_json::from_str::<State>(r#"{"model":"classical","kind":"dirac","n":2}"#).is_err());
    }
}
