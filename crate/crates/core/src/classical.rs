//! Finite classical effect algebra: fuzzy events on `{0, …, n−1}`.

use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::effect::Effect;
use crate::error::{Error, Result};
use crate::linalg::{CLIP_TOL, SHARP_TOL};

/// A `[0,1]`-valued function on a finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyEvent {
    values: Vec<f64>,
}

impl FuzzyEvent {
    /// Validates entries against `[−clip_tol, 1 + clip_tol]` and clamps drift.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotAnEffect("empty outcome set".into()));
        }
        let mut values = values;
        for v in &mut values {
            if !v.is_finite() || *v < -CLIP_TOL || *v > 1.0 + CLIP_TOL {
                return Err(Error::NotAnEffect(format!("entry {v} outside [0, 1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(FuzzyEvent { values })
    }

    pub fn zero(n: usize) -> Self {
        FuzzyEvent {
            values: vec![0.0; n],
        }
    }

    pub fn unit(n: usize) -> Self {
        FuzzyEvent {
            values: vec![1.0; n],
        }
    }

    /// Indicator `χ_{i}` of a single outcome.
    pub fn indicator(n: usize, i: usize) -> Self {
        let mut values = vec![0.0; n];
        values[i] = 1.0;
        FuzzyEvent { values }
    }

    /// Indicator of the outcomes whose bits are set in `mask`.
    pub fn indicator_mask(n: usize, mask: u64) -> Self {
        FuzzyEvent {
            values: (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A probability measure on `{0, …, n−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProbabilityWire", into = "ProbabilityWire")]
pub struct ProbabilityVector {
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProbabilityWire {
    weights: Vec<f64>,
}

impl TryFrom<ProbabilityWire> for ProbabilityVector {
    type Error = Error;
    fn try_from(w: ProbabilityWire) -> Result<Self> {
        ProbabilityVector::new(w.weights)
    }
}

impl From<ProbabilityVector> for ProbabilityWire {
    fn from(p: ProbabilityVector) -> Self {
        ProbabilityWire { weights: p.weights }
    }
}

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidState("empty probability vector".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidState("negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(ProbabilityVector { weights })
    }

    pub fn dirac(n: usize, i: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[i] = 1.0;
        ProbabilityVector { weights }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: &FuzzyEvent) -> Result<f64> {
        check_len(self.n(), f.n())?;
        Ok(self.weights.iter().zip(&f.values).map(|(w, x)| w * x).sum())
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimMismatch { left: a, right: b });
    }
    Ok(())
}

/// `f∘g = fg`, the pointwise product.
pub fn pointwise_product(f: &FuzzyEvent, g: &FuzzyEvent) -> Result<FuzzyEvent> {
    check_len(f.n(), g.n())?;
    Ok(FuzzyEvent {
        values: f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect(),
    })
}

/// True when every entry is within `tol` of 0 or 1.
pub fn is_sharp_classical(f: &FuzzyEvent, tol: f64) -> bool {
    f.values.iter().all(|&v| v <= tol || v >= 1.0 - tol)
}

/// For an unsharp `f`, a nonzero `g` lying below both `f` and `f′`.
///
/// Its existence shows `f ∧ f′ ≠ 0`: at an outcome where `0 < f < 1`, put a
/// bump smaller than both `f` and `1 − f`.
pub fn unsharpness_witness(f: &FuzzyEvent, tol: f64) -> Option<FuzzyEvent> {
    let i = f.values.iter().position(|&v| v > tol && v < 1.0 - tol)?;
    let v = f.values[i];
    let mut g = FuzzyEvent::zero(f.n());
    g.values[i] = 0.5 * v.min(1.0 - v);
    Some(g)
}

/// The singleton indicators `{χ_0, …, χ_{n−1}}`, the only context of the algebra.
pub fn unique_context(n: usize) -> Result<Context> {
    if n == 0 {
        return Err(Error::InvalidContext("empty outcome set".into()));
    }
    Context::new(
        (0..n)
            .map(|i| Effect::Classical(FuzzyEvent::indicator(n, i)))
            .collect(),
    )
}

/// The isomorphism onto the function algebra: `J(Σ λ_i a_i)(ω_i) = λ_i`, with
/// the element given by its coefficients over the single context.
pub fn classical_iso_j(coefficients: &[f64]) -> Result<FuzzyEvent> {
    if let Some(&bad) = coefficients
        .iter()
        .find(|c| !c.is_finite() || **c < 0.0 || **c > 1.0)
    {
        return Err(Error::CoefficientOutOfRange(bad));
    }
    FuzzyEvent::new(coefficients.to_vec())
}

/// Inverse of [`classical_iso_j`]: the coefficients over the single context.
pub fn classical_iso_j_inverse(f: &FuzzyEvent) -> Vec<f64> {
    f.values.clone()
}

/// Every indicator function on `n` outcomes, indexed by bitmask.
pub fn sharp_elements(n: usize) -> Vec<FuzzyEvent> {
    assert!(n < 64, "outcome set too large to enumerate");
    (0..(1u64 << n))
        .map(|mask| FuzzyEvent::indicator_mask(n, mask))
        .collect()
}

/// One-dimensional test on a sharp event: `f ≠ 0` and every `g ≤ f` is a
/// multiple of `f`. For indicators this fails exactly when the support has
/// two or more points, witnessed by the indicator of one of them.
pub fn is_one_dimensional(f: &FuzzyEvent) -> bool {
    let support: Vec<usize> = (0..f.n()).filter(|&i| f.values[i] > SHARP_TOL).collect();
    match support.as_slice() {
        [] => false,
        [_] => is_sharp_classical(f, SHARP_TOL),
        [first, ..] => {
            // χ_first ≤ f but is not λf
            let g = FuzzyEvent::indicator(f.n(), *first);
            let lambda = g.values[*first] / f.values[*first];
            g.values
                .iter()
                .zip(&f.values)
                .all(|(a, b)| (a - lambda * b).abs() <= SHARP_TOL)
        }
    }
}

/// Exhaustive search for contexts: every set of one-dimensional sharp
/// elements whose entries add up to the unit.
pub fn enumerate_contexts(n: usize) -> Vec<Vec<FuzzyEvent>> {
    let atoms: Vec<FuzzyEvent> = sharp_elements(n)
        .into_iter()
        .filter(is_one_dimensional)
        .collect();
    assert!(atoms.len() < 32, "too many atoms to enumerate subsets");
    let mut found = Vec::new();
    for subset in 1u64..(1u64 << atoms.len()) {
        let members: Vec<&FuzzyEvent> = atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| subset >> k & 1 == 1)
            .map(|(_, a)| a)
            .collect();
        let sums_to_unit = (0..n).all(|i| {
            let total: f64 = members.iter().map(|a| a.values[i]).sum();
            (total - 1.0).abs() <= SHARP_TOL
        });
        if sums_to_unit {
            found.push(members.into_iter().cloned().collect());
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[f64]) -> FuzzyEvent {
        FuzzyEvent::new(v.to_vec()).unwrap()
    }

    #[test]
    fn product_examples() {
        let f = ev(&[0.2, 0.5]);
        assert_eq!(pointwise_product(&f, &FuzzyEvent::unit(2)).unwrap(), f);
        let p = pointwise_product(&f, &ev(&[0.5, 0.4])).unwrap();
        assert!((p.values()[0] - 0.1).abs() < 1e-15);
        assert!((p.values()[1] - 0.2).abs() < 1e-15);
        let z = pointwise_product(&FuzzyEvent::indicator(2, 0), &FuzzyEvent::indicator(2, 1))
            .unwrap();
        assert_eq!(z, FuzzyEvent::zero(2));
        assert!(matches!(
            pointwise_product(&f, &FuzzyEvent::unit(3)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn sharpness() {
        assert!(is_sharp_classical(&ev(&[1.0, 0.0, 1.0]), 1e-8));
        assert!(!is_sharp_classical(&ev(&[0.5, 0.0]), 1e-8));
        assert!(is_sharp_classical(&ev(&[1e-10, 1.0 - 1e-10]), 1e-8));
        let w = unsharpness_witness(&ev(&[0.5, 0.0]), 1e-8).unwrap();
        assert!(w.values()[0] > 0.0 && w.values()[0] < 0.5);
        assert!(unsharpness_witness(&ev(&[1.0, 0.0]), 1e-8).is_none());
    }

    #[test]
    fn fuzzy_event_validation() {
        assert!(FuzzyEvent::new(vec![1.2]).is_err());
        assert!(FuzzyEvent::new(vec![]).is_err());
        assert_eq!(FuzzyEvent::new(vec![-1e-12, 1.0 + 1e-12]).unwrap().values(), &[0.0, 1.0]);
    }

    #[test]
    fn unique_context_examples() {
        let c = unique_context(3).unwrap();
        assert_eq!(c.len(), 3);
        let one = unique_context(1).unwrap();
        assert_eq!(one.atoms()[0], Effect::Classical(FuzzyEvent::unit(1)));
        for i in 0..3 {
            for j in 0..3 {
                let a = c.atoms()[i].as_classical().unwrap();
                let b = c.atoms()[j].as_classical().unwrap();
                let p = pointwise_product(a, b).unwrap();
                let expected = if i == j { a.clone() } else { FuzzyEvent::zero(3) };
                assert_eq!(p, expected);
            }
        }
    }

    #[test]
    fn iso_j() {
        let f = classical_iso_j(&[0.3, 0.9]).unwrap();
        assert_eq!(f.values(), &[0.3, 0.9]);
        assert_eq!(classical_iso_j(&[1.0, 1.0]).unwrap(), FuzzyEvent::unit(2));
        assert!(matches!(
            classical_iso_j(&[0.3, 1.5]),
            Err(Error::CoefficientOutOfRange(_))
        ));
        assert_eq!(classical_iso_j_inverse(&f), vec![0.3, 0.9]);
    }

    #[test]
    fn exhaustive_context_search_finds_only_singletons() {
        for n in 1..=6 {
            let contexts = enumerate_contexts(n);
            assert_eq!(contexts.len(), 1, "n = {n}");
            let expected: Vec<FuzzyEvent> = (0..n).map(|i| FuzzyEvent::indicator(n, i)).collect();
            assert_eq!(contexts[0], expected);
        }
    }

    #[test]
    fn probability_vector_checks() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1]).is_err());
        let p: ProbabilityVector = serde_json::from_str(r#"{"weights":[0.25,0.75]}"#).unwrap();
        assert!((p.integrate(&ev(&[1.0, 0.0])).unwrap() - 0.25).abs() < 1e-15);
    }
}
