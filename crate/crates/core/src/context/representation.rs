//! Coordinates of context state spaces, comparability maps and the
//! representation maps `J`.

use serde::{Deserialize, Serialize};

use super::{context_distance, spectral_resolution, Context};
use crate::effect::{Effect, Model};
use crate::error::{Error, Result};
use crate::hilbert::{luders_product, HilbertEffect};
use crate::linalg::{inner, ComplexMatrix, EQ_TOL};
use crate::sequential::hat_state;

// Witness contexts closer than this to an input count as the same context.
const DISTINCT_TOL: f64 = 1e-6;

/// Matrix `Φ` whose columns are the atom vectors of a Hilbert-model context.
pub fn frame(context: &Context) -> Result<ComplexMatrix> {
    let vectors = context.vectors().ok_or_else(|| hilbert_only(context.model()))?;
    Ok(ComplexMatrix::from_columns(vectors))
}

fn hilbert_only(model: Model) -> Error {
    Error::ModelMismatch {
        left: model.to_string(),
        right: "hilbert".into(),
    }
}

/// Change of coordinates `U_AB` from the state space of `A` to that of `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityMap {
    pub source: Context,
    pub target: Context,
    pub unitary: ComplexMatrix,
}

/// `U_AB = Φ_B† Φ_A`: column `j` holds the coordinates of the `j`-th atom
/// vector of `A` in the basis of `B`. The classical algebra has a single
/// context, whose map to itself is the identity.
pub fn comparability_map(a: &Context, b: &Context) -> Result<ComparabilityMap> {
    a.model().ensure_same(b.model())?;
    let unitary = match a.model() {
        Model::Classical(n) => ComplexMatrix::identity(n),
        Model::Hilbert(_) => &frame(b)?.adjoint() * &frame(a)?,
    };
    Ok(ComparabilityMap {
        source: a.clone(),
        target: b.clone(),
        unitary,
    })
}

/// Largest deviation of `|⟨U_AB e_i, U_CB e_k⟩|²` from `â_i(c_k)` over all
/// atom pairs of `A` and `C`.
pub fn comparability_residual(a: &Context, b: &Context, c: &Context) -> Result<f64> {
    let uab = comparability_map(a, b)?.unitary;
    let ucb = comparability_map(c, b)?.unitary;
    let mut worst: f64 = 0.0;
    for i in 0..a.len() {
        let x = uab.column(i);
        for k in 0..c.len() {
            let y = ucb.column(k);
            let lhs = inner(&x, &y).norm_sqr();
            let rhs = super::transition_probability(&a.atoms()[i], &c.atoms()[k])?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// `J(b) = b_A`: the diagonal operator on the state space of `A` with
/// entries `â_i(b)`. Affine but in general not injective.
pub fn rep_j_single_context(b: &Effect, context: &Context) -> Result<ComplexMatrix> {
    context.model().ensure_same(b.model())?;
    let diag = context
        .atoms()
        .iter()
        .map(|a| hat_state(a)?.eval(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexMatrix::from_real_diag(&diag))
}

/// `J(b) = Σ λ_i P(U_AB â_i)` for the spectral resolution `b = Σ λ_i a_i`,
/// which in coordinates is `Φ_B† b Φ_B`.
pub fn rep_j_full(b: &Effect, context: &Context) -> Result<HilbertEffect> {
    context.model().ensure_same(b.model())?;
    let h = b.as_hilbert().ok_or_else(|| hilbert_only(b.model()))?;
    let phi = frame(context)?;
    HilbertEffect::new((&(&phi.adjoint() * h.matrix()) * &phi).hermitian_part())
}

/// `J⁻¹(X) = Φ_B X Φ_B†`.
pub fn rep_j_full_inverse(x: &HilbertEffect, context: &Context) -> Result<Effect> {
    if context.model() != Model::Hilbert(x.dim()) {
        return Err(Error::ModelMismatch {
            left: context.model().to_string(),
            right: Model::Hilbert(x.dim()).to_string(),
        });
    }
    let phi = frame(context)?;
    Ok(Effect::Hilbert(HilbertEffect::new(
        (&(&phi * x.matrix()) * &phi.adjoint()).hermitian_part(),
    )?))
}

/// Product transported to the image of `J`: `X·Y = J(J⁻¹X ∘ J⁻¹Y)`.
pub fn induced_product(x: &HilbertEffect, y: &HilbertEffect, context: &Context) -> Result<HilbertEffect> {
    let a = rep_j_full_inverse(x, context)?;
    let b = rep_j_full_inverse(y, context)?;
    let ab = luders_product(
        a.as_hilbert().expect("inverse image is a Hilbert effect"),
        b.as_hilbert().expect("inverse image is a Hilbert effect"),
    )?;
    rep_j_full(&Effect::Hilbert(ab), context)
}

/// A third context built from two disjoint ones.
#[derive(Debug, Clone, Serialize)]
pub struct ThirdContext {
    /// `c = ½a₁ + ½b₁`.
    pub effect: Effect,
    /// Spectral context of `c`.
    pub context: Context,
    pub distance_to_a: f64,
    pub distance_to_b: f64,
}

/// Spectral context of `½a₁ + ½b₁`, which differs from both `A` and `B`.
pub fn third_context_witness(a: &Context, b: &Context) -> Result<ThirdContext> {
    a.model().ensure_same(b.model())?;
    if !matches!(a.model(), Model::Hilbert(_)) {
        return Err(Error::ContextsNotDisjoint);
    }
    for x in a.atoms() {
        for y in b.atoms() {
            if x.distance(y)? <= EQ_TOL {
                return Err(Error::ContextsNotDisjoint);
            }
        }
    }
    let effect = a.atoms()[0]
        .scale(0.5)?
        .orth_sum(&b.atoms()[0].scale(0.5)?)?
        .defined()
        .expect("halves of two atoms are orthogonal");
    let (context, _) = spectral_resolution(&effect)?;
    let distance_to_a = context_distance(&context, a)?;
    let distance_to_b = context_distance(&context, b)?;
    let closest = distance_to_a.min(distance_to_b);
    if closest <= DISTINCT_TOL {
        return Err(Error::WitnessNotDistinct(closest));
    }
    Ok(ThirdContext {
        effect,
        context,
        distance_to_a,
        distance_to_b,
    })
}

#[cfg(test)]
mod tests {
    use super::super::contexts_equal;
    use super::*;
    use crate::linalg::{approx_eq, real_vector};

    fn plus_minus() -> Context {
        let s = 0.5f64.sqrt();
        Context::from_vectors(vec![real_vector(&[s, s]), real_vector(&[s, -s])]).unwrap()
    }

    #[test]
    fn comparability_examples() {
        let std = Context::standard(Model::Hilbert(2));
        let pm = plus_minus();
        let id = comparability_map(&pm, &pm).unwrap();
        assert!(approx_eq(&id.unitary, &ComplexMatrix::identity(2), 1e-15).unwrap());
        let u = comparability_map(&std, &pm).unwrap().unitary;
        assert!(u.as_slice().iter().all(|z| (z.norm_sqr() - 0.5).abs() < 1e-15));
        assert!(u.unitarity_defect() < 1e-15);
        let back = comparability_map(&pm, &std).unwrap().unitary;
        assert!(approx_eq(&back, &u.adjoint(), 1e-15).unwrap());
        assert!(comparability_residual(&std, &pm, &pm).unwrap() < 1e-15);
    }

    #[test]
    fn single_context_examples() {
        let std = Context::standard(Model::Hilbert(2));
        let pm = plus_minus();
        let j_atom = rep_j_single_context(&std.atoms()[1], &std).unwrap();
        assert_eq!(j_atom, ComplexMatrix::from_real_diag(&[0.0, 1.0]));
        let jp = rep_j_single_context(&pm.atoms()[0], &std).unwrap();
        let jm = rep_j_single_context(&pm.atoms()[1], &std).unwrap();
        assert!(approx_eq(&jp, &ComplexMatrix::from_real_diag(&[0.5, 0.5]), 1e-15).unwrap());
        // P+ and P− have the same image
        assert!(approx_eq(&jp, &jm, 1e-15).unwrap());
    }

    #[test]
    fn full_representation_round_trip() {
        let b = Effect::Hilbert(
            HilbertEffect::new(
                ComplexMatrix::from_parts(
                    &[vec![0.6, 0.1, 0.0], vec![0.1, 0.5, 0.2], vec![0.0, 0.2, 0.4]],
                    Some(&[vec![0.0, 0.05, -0.1], vec![-0.05, 0.0, 0.0], vec![0.1, 0.0, 0.0]]),
                )
                .unwrap(),
            )
            .unwrap(),
        );
        let (ctx, coeffs) = spectral_resolution(&b).unwrap();
        let jb = rep_j_full(&b, &ctx).unwrap();
        // in its own spectral frame b is diagonal
        assert!(approx_eq(jb.matrix(), &ComplexMatrix::from_real_diag(&coeffs), 1e-12).unwrap());
        let back = rep_j_full_inverse(&jb, &ctx).unwrap();
        assert!(back.distance(&b).unwrap() < 1e-12);
        let ju = rep_j_full(&Effect::unit(Model::Hilbert(3)), &ctx).unwrap();
        assert!(approx_eq(ju.matrix(), &ComplexMatrix::identity(3), 1e-14).unwrap());
    }

    #[test]
    fn third_context_fixed_instance() {
        let std = Context::standard(Model::Hilbert(2));
        let pm = plus_minus();
        let w = third_context_witness(&std, &pm).unwrap();
        let expected = ComplexMatrix::from_parts(&[vec![0.75, 0.25], vec![0.25, 0.25]], None).unwrap();
        assert!(approx_eq(w.effect.as_hilbert().unwrap().matrix(), &expected, 1e-15).unwrap());
        let (_, coeffs) = spectral_resolution(&w.effect).unwrap();
        let r = 0.5f64.sqrt();
        assert!((coeffs[0] - (1.0 + r) / 2.0).abs() < 1e-12);
        assert!((coeffs[1] - (1.0 - r) / 2.0).abs() < 1e-12);
        assert!(w.distance_to_a > 1e-6 && w.distance_to_b > 1e-6);
        assert!(matches!(
            third_context_witness(&std, &std),
            Err(Error::ContextsNotDisjoint)
        ));
        assert!(!contexts_equal(&w.context, &std, 1e-6).unwrap());
    }

    #[test]
    fn induced_product_on_standard_frame_is_luders() {
        let std = Context::standard(Model::Hilbert(2));
        let x = HilbertEffect::new(ComplexMatrix::from_parts(
            &[vec![0.5, 0.2], vec![0.2, 0.3]],
            None,
        ).unwrap())
        .unwrap();
        let y = HilbertEffect::new(ComplexMatrix::from_real_diag(&[0.9, 0.1])).unwrap();
        let p = induced_product(&x, &y, &std).unwrap();
        let direct = luders_product(&x, &y).unwrap();
        assert!(approx_eq(p.matrix(), direct.matrix(), 1e-14).unwrap());
    }
}
