//! Sequential structure shared by both models: the product `a∘b`,
//! compatibility, functions of an effect, measurements and conditioning.

mod conditioning;
mod vandermonde;

use serde::{Deserialize, Serialize};

use crate::classical::pointwise_product;
use crate::effect::{Ambient, Effect, Model, State};
use crate::error::{Error, Result};
use crate::hilbert::{commutes, hat_state as hilbert_hat_state, luders_product};
use crate::linalg::EQ_TOL;

pub use conditioning::{
    bayes_posterior, conditional_expectation, conditional_probability,
    total_probability_residual, BayesOutcome,
};
pub use vandermonde::{recover_atoms_vandermonde, recover_eigenprojections, EigenProjection};

/// `a∘b`: pointwise product classically, `a^{1/2} b a^{1/2}` on Hilbert space.
pub fn seq_product(a: &Effect, b: &Effect) -> Result<Effect> {
    a.model().ensure_same(b.model())?;
    match (a, b) {
        (Effect::Classical(f), Effect::Classical(g)) => {
            Ok(Effect::Classical(pointwise_product(f, g)?))
        }
        (Effect::Hilbert(x), Effect::Hilbert(y)) => Ok(Effect::Hilbert(luders_product(x, y)?)),
        _ => unreachable!("models checked above"),
    }
}

/// `a | b`, i.e. `a∘b = b∘a`. Classical effects always commute; Hilbert
/// effects are compatible exactly when the operators commute.
pub fn compatible(a: &Effect, b: &Effect, tol: f64) -> Result<bool> {
    a.model().ensure_same(b.model())?;
    match (a, b) {
        (Effect::Classical(_), Effect::Classical(_)) => {
            let ab = seq_product(a, b)?;
            let ba = seq_product(b, a)?;
            Ok(ab.distance(&ba)? <= tol)
        }
        (Effect::Hilbert(x), Effect::Hilbert(y)) => commutes(x, y, tol),
        _ => unreachable!("models checked above"),
    }
}

/// The state `â` of an atom `a`, characterised by `a∘b = â(b)·a`.
pub fn hat_state(a: &Effect) -> Result<State> {
    match a {
        Effect::Classical(f) => {
            if !a.is_one_dimensional_sharp() {
                return Err(Error::NotOneDimensionalSharp);
            }
            let index = f
                .values()
                .iter()
                .position(|&v| v > 0.5)
                .expect("atom has a support point");
            State::dirac(f.n(), index)
        }
        Effect::Hilbert(h) => hilbert_hat_state(h),
    }
}

/// Real polynomial `Σ α_i x^i`; coefficients may leave `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Powers `u, a, a∘a, …` up to `a^k`, each formed with the sequential product.
pub fn powers(a: &Effect, k: usize) -> Result<Vec<Effect>> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(Effect::unit(a.model()));
    for i in 1..=k {
        let next = if i == 1 {
            a.clone()
        } else {
            seq_product(a, &out[i - 1])?
        };
        out.push(next);
    }
    Ok(out)
}

/// `Σ α_i a^i` in the ambient space, with `a⁰ = u`.
pub fn evaluate_polynomial(a: &Effect, p: &Polynomial) -> Result<Ambient> {
    let pw = powers(a, p.degree())?;
    let mut total = Ambient::zero(a.model());
    for (c, x) in p.coeffs.iter().zip(&pw) {
        total = total.add_scaled(*c, &x.to_ambient())?;
    }
    Ok(total)
}

/// `p(a)` as an effect; fails when the value leaves `[0, u]`.
pub fn function_of_effect(a: &Effect, p: &Polynomial) -> Result<Effect> {
    evaluate_polynomial(a, p)?
        .into_effect()
        .map_err(|e| Error::ResultNotEffect(e.to_string()))
}

/// Finite list of effects summing to the unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementWire", into = "MeasurementWire")]
pub struct Measurement {
    elements: Vec<Effect>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementWire {
    elements: Vec<Effect>,
}

impl TryFrom<MeasurementWire> for Measurement {
    type Error = Error;
    fn try_from(w: MeasurementWire) -> Result<Self> {
        Measurement::new(w.elements)
    }
}

impl From<Measurement> for MeasurementWire {
    fn from(m: Measurement) -> Self {
        MeasurementWire {
            elements: m.elements,
        }
    }
}

impl Measurement {
    /// Validates that the elements share a model and sum to the unit within `eq_tol`.
    pub fn new(elements: Vec<Effect>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidMeasurement("no elements".into()));
        };
        let model = first.model();
        let mut total = Ambient::zero(model);
        for e in &elements {
            model.ensure_same(e.model())?;
            total = total.add_scaled(1.0, &e.to_ambient())?;
        }
        let defect = total.add_scaled(-1.0, &Effect::unit(model).to_ambient())?.norm();
        if defect > EQ_TOL * (model.dim() as f64).sqrt() {
            return Err(Error::InvalidMeasurement(format!(
                "elements sum to the unit only within {defect:.3e}"
            )));
        }
        Ok(Measurement { elements })
    }

    pub fn from_context(context: &crate::context::Context) -> Self {
        Measurement {
            elements: context.atoms().to_vec(),
        }
    }

    pub fn elements(&self) -> &[Effect] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn model(&self) -> Model {
        self.elements[0].model()
    }

    /// Index of the first element that is not sharp within `tol`.
    pub fn first_unsharp(&self, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| !e.is_sharp(tol))
    }
}

/// `b` is measurable relative to the measurement when it is compatible with
/// every element.
pub fn is_measurable(b: &Effect, m: &Measurement, tol: f64) -> Result<bool> {
    for a in m.elements() {
        if !compatible(b, a, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::FuzzyEvent;
    use crate::hilbert::HilbertEffect;
    use crate::linalg::{projector, real_vector, ComplexMatrix};

    fn h(diag: &[f64]) -> Effect {
        Effect::Hilbert(HilbertEffect::new(ComplexMatrix::from_real_diag(diag)).unwrap())
    }

    fn c(values: &[f64]) -> Effect {
        Effect::Classical(FuzzyEvent::new(values.to_vec()).unwrap())
    }

    fn pplus() -> Effect {
        let s = 0.5f64.sqrt();
        Effect::Hilbert(HilbertEffect::new(projector(&real_vector(&[s, s])).unwrap()).unwrap())
    }

    #[test]
    fn product_examples() {
        let a = pplus().scale(0.6).unwrap();
        let u = Effect::unit(Model::Hilbert(2));
        assert!(seq_product(&u, &a).unwrap().distance(&a).unwrap() < 1e-15);
        let b = h(&[0.3, 0.8]);
        let left = seq_product(&a.scale(0.5).unwrap(), &b).unwrap();
        let right = seq_product(&a, &b.scale(0.5).unwrap()).unwrap();
        let outer = seq_product(&a, &b).unwrap().scale(0.5).unwrap();
        assert!(left.distance(&outer).unwrap() < 1e-14);
        assert!(right.distance(&outer).unwrap() < 1e-14);
        let p = seq_product(&c(&[0.2, 0.5]), &c(&[0.5, 0.4])).unwrap();
        assert!(p.distance(&c(&[0.1, 0.2])).unwrap() < 1e-15);
        assert!(seq_product(&a, &c(&[0.1, 0.1])).is_err());
    }

    #[test]
    fn compatibility_examples() {
        assert!(compatible(&c(&[0.2, 0.7]), &c(&[0.9, 0.1]), 1e-12).unwrap());
        assert!(!compatible(&h(&[1.0, 0.0]), &pplus(), 1e-8).unwrap());
        assert!(compatible(&h(&[1.0, 0.0]), &h(&[0.0, 1.0]), 1e-12).unwrap());
    }

    #[test]
    fn polynomial_examples() {
        let b = h(&[0.3, 0.9]);
        let square_of_complement = Polynomial::new(vec![1.0, -2.0, 1.0]);
        let r = function_of_effect(&b, &square_of_complement).unwrap();
        assert!(r.distance(&h(&[0.49, 0.01])).unwrap() < 1e-15);
        let bc = b.complement();
        let direct = seq_product(&bc, &bc).unwrap();
        assert!(r.distance(&direct).unwrap() < 1e-15);
        let doubled = Polynomial::new(vec![0.0, 2.0]);
        assert!(matches!(
            function_of_effect(&h(&[0.9, 0.2]), &doubled),
            Err(Error::ResultNotEffect(_))
        ));
        assert!((Polynomial::new(vec![1.0, -2.0, 1.0]).eval(0.3) - 0.49).abs() < 1e-15);
    }

    #[test]
    fn hat_state_classical_and_hilbert() {
        let s = hat_state(&c(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(s, State::Dirac { n: 3, index: 1 });
        assert!(matches!(hat_state(&c(&[1.0, 1.0])), Err(Error::NotOneDimensionalSharp)));
        let s = hat_state(&h(&[1.0, 0.0])).unwrap();
        assert!((s.eval(&pplus()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn measurement_validation_and_json() {
        let m = Measurement::new(vec![h(&[0.3, 0.6]), h(&[0.7, 0.4])]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.starts_with(r#"{"elements":["#));
        let back: Measurement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(Measurement::new(vec![h(&[0.3, 0.6])]).is_err());
        assert_eq!(m.first_unsharp(1e-8), Some(0));
        assert!(is_measurable(&h(&[0.2, 0.5]), &m, 1e-12).unwrap());
        assert!(!is_measurable(&pplus(), &m, 1e-8).unwrap());
    }
}
