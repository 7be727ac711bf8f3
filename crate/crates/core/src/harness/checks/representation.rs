//! Contexts, comparability maps, the representation `J` and its induced
//! product, dynamics and the third-context construction.

use super::{dist, flag, AxiomCheck, Instance, TolClass};
use crate::context::{
    completeness_witness, context_distance, dynamics_unitary, comparability_residual, induced_product,
    rep_j_full, rep_j_full_inverse, spectral_resolution, third_context_witness,
    transition_probability, Context,
};
use crate::effect::{Ambient, Effect, Model, OrthSum, State};
use crate::error::{Error, Result};
use crate::harness::algebra::Algebra;
use crate::harness::generate::{
    effect_on_context, random_atom, random_context, random_effect, random_effect_in,
    random_sharp, random_unit_vector,
};
use crate::harness::rng::CounterRng;
use crate::hilbert::{commutes, HilbertEffect};
use crate::linalg::{projector, ComplexMatrix, C64, SHARP_TOL};
use crate::sequential::{compatible, seq_product};

pub(super) static REPRESENTATION: &[AxiomCheck] = &[
    AxiomCheck { id: "CTX-VALID", class: TolClass::Axiom, generate: gen_context_source, residual: context_valid },
    AxiomCheck { id: "SPECTRAL", class: TolClass::Axiom, generate: gen_effect, residual: spectral },
    AxiomCheck { id: "TP-SYM", class: TolClass::Transition, generate: gen_atoms, residual: tp_symmetry },
    AxiomCheck { id: "CTX-COMPAT", class: TolClass::Axiom, generate: gen_context_pair, residual: compatible_contexts },
    AxiomCheck { id: "CTX-COMPOSE", class: TolClass::Transition, generate: gen_three_contexts, residual: comparability_consistency },
    AxiomCheck { id: "COMPLETE", class: TolClass::Axiom, generate: gen_unit_vector, residual: complete },
    AxiomCheck { id: "REP-ROUNDTRIP", class: TolClass::Axiom, generate: gen_rep, residual: roundtrip },
    AxiomCheck { id: "REP-AFFINE", class: TolClass::Axiom, generate: gen_rep, residual: rep_affine },
    AxiomCheck { id: "REP-SHARP", class: TolClass::Axiom, generate: gen_rep_sharp, residual: rep_sharp },
    AxiomCheck { id: "REP-COMMUTE", class: TolClass::Axiom, generate: gen_rep_compat, residual: rep_commutation },
    AxiomCheck { id: "REP-PRODUCT", class: TolClass::Axiom, generate: gen_rep, residual: induced_laws },
    AxiomCheck { id: "THIRD", class: TolClass::Axiom, generate: gen_two_contexts, residual: third },
    AxiomCheck { id: "DYN", class: TolClass::Transition, generate: gen_dynamics, residual: dynamics },
];

fn hilbert(model: Model) -> Option<usize> {
    match model {
        Model::Hilbert(d) => Some(d),
        Model::Classical(_) => None,
    }
}

fn atoms_of(ctx: &Context) -> Vec<Effect> {
    ctx.atoms().to_vec()
}

fn context_of(i: &Instance, name: &str) -> Result<Context> {
    Context::new(i.f(name)?.to_vec())
}

fn gen_effect(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(Instance::default().effect("b", random_effect(model, rng)))
}

/// Context candidates from three sources, tagged by `source`: Gaussian
/// vectors to be orthonormalised by the algebra (0), the spectral context of
/// a random effect (1), and a completeness witness (2).
fn gen_context_source(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let source = match model {
        Model::Classical(_) => 1,
        Model::Hilbert(_) => rng.index(3),
    };
    let inst = Instance::default().scalar("source", source as f64);
    Some(match (source, model) {
        (0, Model::Hilbert(d)) => {
            let cols: Vec<Vec<C64>> = (0..d)
                .map(|_| (0..d).map(|_| C64::new(rng.gaussian(), rng.gaussian())).collect())
                .collect();
            inst.matrix("vectors", ComplexMatrix::from_columns(&cols))
        }
        (2, Model::Hilbert(d)) => inst.matrix(
            "vectors",
            first_column(random_unit_vector(d, rng)),
        ),
        _ => inst.effect("b", random_effect(model, rng)),
    })
}

fn gen_atoms(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", random_atom(model, rng))
            .effect("b", random_atom(model, rng)),
    )
}

/// `B` is `A` reordered with fresh phases half of the time, otherwise unrelated.
fn gen_context_pair(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let a = random_context(model, rng);
    let b = match a.vectors() {
        Some(vs) if rng.coin() => {
            let mut vs: Vec<Vec<C64>> = vs
                .iter()
                .map(|v| {
                    let phase = C64::from_polar(1.0, rng.uniform(0.0, std::f64::consts::TAU));
                    v.iter().map(|z| z * phase).collect()
                })
                .collect();
            for k in (1..vs.len()).rev() {
                let j = rng.index(k + 1);
                vs.swap(k, j);
            }
            Context::from_vectors(vs).ok()?
        }
        _ => random_context(model, rng),
    };
    Some(
        Instance::default()
            .family("A", atoms_of(&a))
            .family("B", atoms_of(&b)),
    )
}

fn gen_three_contexts(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    hilbert(model)?;
    Some(
        Instance::default()
            .family("A", atoms_of(&random_context(model, rng)))
            .family("B", atoms_of(&random_context(model, rng)))
            .family("C", atoms_of(&random_context(model, rng))),
    )
}

fn gen_two_contexts(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    hilbert(model)?;
    Some(
        Instance::default()
            .family("A", atoms_of(&random_context(model, rng)))
            .family("B", atoms_of(&random_context(model, rng))),
    )
}

/// Square matrix carrying `v` as its first column, zeros elsewhere.
fn first_column(v: Vec<C64>) -> ComplexMatrix {
    let d = v.len();
    let mut cols = vec![vec![C64::new(0.0, 0.0); d]; d];
    cols[0] = v;
    ComplexMatrix::from_columns(&cols)
}

fn gen_unit_vector(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let d = hilbert(model)?;
    Some(Instance::default().matrix("phi", first_column(random_unit_vector(d, rng))))
}

fn gen_rep(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    hilbert(model)?;
    let half = |e: Effect| e.scale(0.5).expect("half lies in [0, 1]");
    Some(
        Instance::default()
            .effect("a", half(random_effect(model, rng)))
            .effect("b", random_effect(model, rng))
            .effect("c", half(random_effect(model, rng)))
            .scalar("lambda", rng.next_f64())
            .family("B", atoms_of(&random_context(model, rng))),
    )
}

fn gen_rep_sharp(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    hilbert(model)?;
    let a = if rng.coin() {
        random_sharp(model, rng)
    } else {
        random_effect_in(model, 0.1, 0.9, rng)
    };
    Some(
        Instance::default()
            .effect("a", a)
            .family("B", atoms_of(&random_context(model, rng))),
    )
}

/// A pair sharing a context half of the time, otherwise a generic pair.
fn gen_rep_compat(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    hilbert(model)?;
    let (a, b) = if rng.coin() {
        let ctx = random_context(model, rng);
        let n = ctx.len();
        let x: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        (effect_on_context(&ctx, &x), effect_on_context(&ctx, &y))
    } else {
        (random_effect(model, rng), random_effect(model, rng))
    };
    Some(
        Instance::default()
            .effect("a", a)
            .effect("b", b)
            .family("B", atoms_of(&random_context(model, rng))),
    )
}

fn gen_dynamics(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let d = hilbert(model)?;
    let theta: Vec<f64> = (0..d).map(|_| rng.uniform(-std::f64::consts::PI, std::f64::consts::PI)).collect();
    Some(
        Instance::default()
            .family("A", atoms_of(&random_context(model, rng)))
            .matrix("theta", ComplexMatrix::from_real_diag(&theta))
            .scalar("t1", rng.uniform(-2.0, 2.0))
            .scalar("t2", rng.uniform(-2.0, 2.0)),
    )
}

/// Largest of the idempotence, trace and completeness defects of a list of
/// would-be atoms.
pub(crate) fn context_defect(atoms: &[Effect]) -> Result<f64> {
    let Some(first) = atoms.first() else {
        return Ok(1.0);
    };
    let model = first.model();
    let mut worst: f64 = 0.0;
    let mut total = Ambient::zero(model);
    for a in atoms {
        let x = a.to_ambient();
        match &x {
            Ambient::Classical(v) => {
                let mass: f64 = v.iter().sum();
                let off: f64 = v.iter().map(|t| t.min(1.0 - t).abs()).fold(0.0, f64::max);
                worst = worst.max((mass - 1.0).abs()).max(off);
            }
            Ambient::Hilbert(m) => {
                worst = worst
                    .max((&(m * m) - m).frobenius_norm())
                    .max((m.trace().re - 1.0).abs());
            }
        }
        total = total.add_scaled(1.0, &x)?;
    }
    let defect = total.add_scaled(-1.0, &Effect::unit(model).to_ambient())?.norm();
    Ok(worst.max(defect / (model.dim() as f64).sqrt()))
}

fn context_valid(alg: &Algebra, i: &Instance) -> Result<f64> {
    let atoms = match i.x("source")? as usize {
        0 => {
            let m = i.m("vectors")?;
            let cols: Vec<Vec<C64>> = (0..m.dim()).map(|j| m.column(j)).collect();
            alg.context_atoms(&cols)?
        }
        2 => atoms_of(&completeness_witness(&i.m("vectors")?.column(0))?),
        _ => atoms_of(&spectral_resolution(i.e("b")?)?.0),
    };
    context_defect(&atoms)
}

/// `Σ λ_i a_i = b` with coefficients in `[0, 1]`, in descending order.
fn spectral(_: &Algebra, i: &Instance) -> Result<f64> {
    let b = i.e("b")?;
    let (ctx, lambdas) = spectral_resolution(b)?;
    let rebuilt = crate::context::recombine(&ctx, &lambdas)?;
    let mut r = rebuilt.add_scaled(-1.0, &b.to_ambient())?.norm();
    if matches!(b, Effect::Hilbert(_)) {
        r = r.max(flag(lambdas.windows(2).any(|w| w[0] < w[1])));
    }
    Ok(r.max(flag(lambdas.iter().any(|l| !(0.0..=1.0).contains(l)))))
}

fn tp_symmetry(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    Ok((transition_probability(a, b)? - transition_probability(b, a)?).abs())
}

/// Contexts whose atoms are pairwise compatible coincide.
fn compatible_contexts(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (context_of(i, "A")?, context_of(i, "B")?);
    for x in a.atoms() {
        for y in b.atoms() {
            if super::commutator(alg, x, y)? > 1e-9 {
                return Ok(0.0);
            }
        }
    }
    context_distance(&a, &b)
}

fn comparability_consistency(_: &Algebra, i: &Instance) -> Result<f64> {
    comparability_residual(&context_of(i, "A")?, &context_of(i, "B")?, &context_of(i, "C")?)
}

/// The witness context starts with `|φ⟩⟨φ|` and `φ̂` gives that atom probability 1.
fn complete(_: &Algebra, i: &Instance) -> Result<f64> {
    let phi = i.m("phi")?.column(0);
    let ctx = completeness_witness(&phi)?;
    let target = Effect::Hilbert(HilbertEffect::new(projector(&phi)?)?);
    let p = State::vector(phi)?.eval(&ctx.atoms()[0])?;
    Ok(dist(&ctx.atoms()[0], &target)?.max((p - 1.0).abs()).max(context_defect(ctx.atoms())?))
}

fn j(b: &Effect, ctx: &Context) -> Result<Effect> {
    Ok(Effect::Hilbert(rep_j_full(b, ctx)?))
}

fn roundtrip(_: &Algebra, i: &Instance) -> Result<f64> {
    let (b, ctx) = (i.e("b")?, context_of(i, "B")?);
    let image = rep_j_full(b, &ctx)?;
    dist(&rep_j_full_inverse(&image, &ctx)?, b)
}

/// `J(a ⊕ c) = J(a) + J(c)`, `J(λb) = λJ(b)` and `J(u) = I`.
fn rep_affine(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, c, lambda) = (i.e("a")?, i.e("b")?, i.e("c")?, i.x("lambda")?);
    let ctx = context_of(i, "B")?;
    let model = b.model();
    let mut r = dist(&j(&Effect::unit(model), &ctx)?, &Effect::unit(model))?;
    let scaled = j(&b.scale(lambda)?, &ctx)?.to_ambient();
    r = r.max(scaled.add_scaled(-lambda, &j(b, &ctx)?.to_ambient())?.norm());
    if let OrthSum::Defined(s) = a.orth_sum(c)? {
        let sum = j(&s, &ctx)?.to_ambient();
        let parts = j(a, &ctx)?.to_ambient().add_scaled(1.0, &j(c, &ctx)?.to_ambient())?;
        r = r.max(sum.add_scaled(-1.0, &parts)?.norm());
    }
    Ok(r)
}

fn rep_sharp(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, ctx) = (i.e("a")?, context_of(i, "B")?);
    Ok(flag(a.is_sharp(SHARP_TOL) != j(a, &ctx)?.is_sharp(SHARP_TOL)))
}

/// `a|b` exactly when `J(a)` and `J(b)` commute, and then `J(a∘b) = J(a)J(b)`.
fn rep_commutation(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, ctx) = (i.e("a")?, i.e("b")?, context_of(i, "B")?);
    let (ja, jb) = (rep_j_full(a, &ctx)?, rep_j_full(b, &ctx)?);
    let compat = compatible(a, b, 1e-8)?;
    if compat != commutes(&ja, &jb, 1e-8)? {
        return Ok(1.0);
    }
    if !compat {
        return Ok(0.0);
    }
    let jab = rep_j_full(&seq_product(a, b)?, &ctx)?;
    Ok((jab.matrix() - &(ja.matrix() * jb.matrix())).frobenius_norm())
}

/// The induced product on the image satisfies S1, S2 and S6 and stays
/// inside the effect interval.
fn induced_laws(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, c, lambda) = (i.e("a")?, i.e("b")?, i.e("c")?, i.x("lambda")?);
    let ctx = context_of(i, "B")?;
    let image = |e: &Effect| rep_j_full(e, &ctx);
    let prod = |x: &HilbertEffect, y: &HilbertEffect| induced_product(x, y, &ctx);
    let as_effect = |h: HilbertEffect| Effect::Hilbert(h);
    let (xa, xb, xc) = (image(a)?, image(b)?, image(c)?);
    let d = xa.dim();
    let identity = HilbertEffect::identity(d);
    let mut r = dist(&as_effect(prod(&identity, &xb)?), &as_effect(xb.clone()))?;
    let lhs = as_effect(prod(&xa, &image(&b.scale(lambda)?)?)?);
    let rhs = as_effect(prod(&xa, &xb)?).scale(lambda)?;
    r = r.max(dist(&lhs, &rhs)?);
    let Some(ac) = Effect::Hilbert(xa.clone()).orth_sum(&Effect::Hilbert(xc.clone()))?.defined() else {
        return Ok(r);
    };
    let ac = ac.as_hilbert().ok_or(Error::NotOneDimensionalSharp)?.clone();
    let whole = prod(&xb, &ac)?;
    let parts = as_effect(prod(&xb, &xa)?).to_ambient().add_scaled(1.0, &as_effect(prod(&xb, &xc)?).to_ambient())?;
    Ok(r.max(Effect::Hilbert(whole).to_ambient().add_scaled(-1.0, &parts)?.norm()))
}

/// The witness is a valid context, away from both inputs.
fn third(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (context_of(i, "A")?, context_of(i, "B")?);
    match third_context_witness(&a, &b) {
        Ok(w) => Ok(context_defect(w.context.atoms())?.max(flag(w.distance_to_a.min(w.distance_to_b) <= 1e-6))),
        Err(Error::ContextsNotDisjoint) => Ok(0.0),
        Err(Error::WitnessNotDistinct(_)) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// `U_t` is unitary and `U_{t₁+t₂} = U_{t₁} U_{t₂}`.
fn dynamics(_: &Algebra, i: &Instance) -> Result<f64> {
    let ctx = context_of(i, "A")?;
    let th = i.m("theta")?;
    let theta: Vec<f64> = (0..th.dim()).map(|k| th[(k, k)].re).collect();
    let (t1, t2) = (i.x("t1")?, i.x("t2")?);
    let u1 = dynamics_unitary(&ctx, &theta, t1)?;
    let u2 = dynamics_unitary(&ctx, &theta, t2)?;
    let u12 = dynamics_unitary(&ctx, &theta, t1 + t2)?;
    let law = (&u12 - &(&u1 * &u2)).frobenius_norm();
    Ok(law.max(u1.unitarity_defect()).max(u12.unitarity_defect()))
}
