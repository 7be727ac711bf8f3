use serde::Serialize;

use super::{seq_product, Measurement};
use crate::effect::{Ambient, Effect, State};
use crate::error::{Error, Result};
use crate::linalg::{PROB_FLOOR, SHARP_TOL};

const SLACK: f64 = 1e-12;

fn ratio(num: f64, den: f64) -> f64 {
    let r = num / den;
    if (-SLACK..=1.0 + SLACK).contains(&r) {
        r.clamp(0.0, 1.0)
    } else {
        r
    }
}

/// `ω(b|a) = ω(a∘b) / ω(a)`; refuses to condition on `ω(a) ≤ prob_floor`.
pub fn conditional_probability(omega: &State, a: &Effect, b: &Effect) -> Result<f64> {
    let pa = omega.eval(a)?;
    if pa <= PROB_FLOOR {
        return Err(Error::ConditioningOnNull(pa));
    }
    Ok(ratio(omega.eval(&seq_product(a, b)?)?, pa))
}

/// Both sides of Bayes' rule for element `i` of a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesOutcome {
    /// `ω(a_i|b)`.
    pub direct: f64,
    /// `ω(b|a_i) ω(a_i) / ω(b)`.
    pub bayes: f64,
    pub residual: f64,
}

/// Compares `ω(a_i|b)` with `ω(b|a_i) ω(a_i) / ω(b)`. The two agree whenever
/// `b | a_i`.
pub fn bayes_posterior(omega: &State, m: &Measurement, b: &Effect, i: usize) -> Result<BayesOutcome> {
    let a = m.elements().get(i).ok_or(Error::LengthMismatch {
        expected: m.len(),
        got: i,
    })?;
    let pb = omega.eval(b)?;
    let pa = omega.eval(a)?;
    if pb <= PROB_FLOOR {
        return Err(Error::ConditioningOnNull(pb));
    }
    let direct = conditional_probability(omega, b, a)?;
    let bayes = conditional_probability(omega, a, b)? * pa / pb;
    Ok(BayesOutcome {
        direct,
        bayes,
        residual: (direct - bayes).abs(),
    })
}

/// `|ω(b) − Σ_i ω(a_i∘b)|`, zero when `b` is compatible with every `a_i`.
pub fn total_probability_residual(omega: &State, m: &Measurement, b: &Effect) -> Result<f64> {
    m.model().ensure_same(b.model())?;
    let mut total = 0.0;
    for a in m.elements() {
        total += omega.eval(&seq_product(a, b)?)?;
    }
    Ok((omega.eval(b)? - total).abs())
}

/// `E_ω(b|A) = Σ_i ω(b|a_i) a_i` for a sharp measurement.
///
/// Elements with `ω(a_i) ≤ prob_floor` carry no conditional probability and
/// are left out of the sum.
pub fn conditional_expectation(omega: &State, b: &Effect, m: &Measurement) -> Result<Effect> {
    m.model().ensure_same(b.model())?;
    if let Some(i) = m.first_unsharp(SHARP_TOL) {
        return Err(Error::MeasurementNotSharp(i));
    }
    let mut total = Ambient::zero(m.model());
    let mut retained = 0;
    for a in m.elements() {
        if omega.eval(a)? <= PROB_FLOOR {
            continue;
        }
        retained += 1;
        total = total.add_scaled(conditional_probability(omega, a, b)?, &a.to_ambient())?;
    }
    if retained == 0 {
        return Err(Error::AllWeightsNull);
    }
    total.into_effect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Context;
    use crate::effect::Model;
    use crate::hilbert::HilbertEffect;
    use crate::linalg::{projector, real_vector, ComplexMatrix};

    fn pplus() -> Effect {
        let s = 0.5f64.sqrt();
        Effect::Hilbert(HilbertEffect::new(projector(&real_vector(&[s, s])).unwrap()).unwrap())
    }

    fn std2() -> Measurement {
        Measurement::from_context(&Context::standard(Model::Hilbert(2)))
    }

    fn ket(v: &[f64]) -> State {
        State::vector(real_vector(v)).unwrap()
    }

    #[test]
    fn conditional_probability_examples() {
        let mixed = State::maximally_mixed(Model::Hilbert(2));
        let p0 = std2().elements()[0].clone();
        assert!((conditional_probability(&mixed, &p0, &pplus()).unwrap() - 0.5).abs() < 1e-15);
        assert!((conditional_probability(&mixed, &pplus(), &pplus()).unwrap() - 1.0).abs() < 1e-15);
        let p1 = std2().elements()[1].clone();
        assert!(matches!(
            conditional_probability(&ket(&[1.0, 0.0]), &p1, &pplus()),
            Err(Error::ConditioningOnNull(_))
        ));
    }

    #[test]
    fn bayes_fixed_instance() {
        let out = bayes_posterior(&ket(&[1.0, 0.0]), &std2(), &pplus(), 0).unwrap();
        assert!((out.direct - 0.5).abs() < 1e-12);
        assert!((out.bayes - 1.0).abs() < 1e-12);
        assert!((out.residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn total_probability_fixed_instance() {
        let s = 0.5f64.sqrt();
        let r = total_probability_residual(&ket(&[s, s]), &std2(), &pplus()).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        let diag = Effect::Hilbert(HilbertEffect::new(ComplexMatrix::from_real_diag(&[0.2, 0.9])).unwrap());
        assert!(total_probability_residual(&ket(&[s, s]), &std2(), &diag).unwrap() < 1e-15);
    }

    #[test]
    fn conditional_expectation_examples() {
        let mixed = State::maximally_mixed(Model::Hilbert(2));
        let e = conditional_expectation(&mixed, &pplus(), &std2()).unwrap();
        let half = Effect::unit(Model::Hilbert(2)).scale(0.5).unwrap();
        assert!(e.distance(&half).unwrap() < 1e-15);
        let unit = Effect::unit(Model::Hilbert(2));
        assert!(conditional_expectation(&mixed, &unit, &std2()).unwrap().distance(&unit).unwrap() < 1e-15);
        let diag = Effect::Hilbert(HilbertEffect::new(ComplexMatrix::from_real_diag(&[0.2, 0.9])).unwrap());
        assert!(conditional_expectation(&mixed, &diag, &std2()).unwrap().distance(&diag).unwrap() < 1e-15);
        let unsharp = Measurement::new(vec![half.clone(), half]).unwrap();
        assert!(matches!(
            conditional_expectation(&mixed, &pplus(), &unsharp),
            Err(Error::MeasurementNotSharp(0))
        ));
        // the |0⟩ state ignores P1, so only the P0 term is kept
        let e = conditional_expectation(&ket(&[1.0, 0.0]), &pplus(), &std2()).unwrap();
        let expected =
            Effect::Hilbert(HilbertEffect::new(ComplexMatrix::from_real_diag(&[0.5, 0.0])).unwrap());
        assert!(e.distance(&expected).unwrap() < 1e-15);
    }
}
