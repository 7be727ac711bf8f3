//! Effect-algebra and convexity laws, plus the state pairing.

use super::{deficit, dist, flag, AxiomCheck, Instance, TolClass};
use crate::effect::{order_witness, Effect, Model, OrthSum};
use crate::error::Result;
use crate::harness::algebra::Algebra;
use crate::harness::generate::{random_effect, random_effect_in, random_state};
use crate::harness::rng::CounterRng;

pub(super) static EFFECT: &[AxiomCheck] = &[
    AxiomCheck { id: "E1", class: TolClass::Axiom, generate: gen_pair, residual: e1 },
    AxiomCheck { id: "E2", class: TolClass::Axiom, generate: gen_triple, residual: e2 },
    AxiomCheck { id: "E3", class: TolClass::Axiom, generate: gen_one, residual: e3 },
    AxiomCheck { id: "E3-UNIQUE", class: TolClass::Axiom, generate: gen_near_complement, residual: e3_unique },
    AxiomCheck { id: "E4", class: TolClass::Axiom, generate: gen_maybe_zero, residual: e4 },
    AxiomCheck { id: "COMPLEMENT", class: TolClass::Axiom, generate: gen_one, residual: involution },
    AxiomCheck { id: "ORDER-REV", class: TolClass::Axiom, generate: gen_ordered, residual: order_reversal },
    AxiomCheck { id: "ES", class: TolClass::Axiom, generate: gen_state_pair, residual: pairing_laws },
    AxiomCheck { id: "EXT", class: TolClass::Axiom, generate: gen_extension, residual: extension },
    AxiomCheck { id: "ORDER-WITNESS", class: TolClass::Axiom, generate: gen_pair, residual: witness },
];

pub(super) static CONVEX: &[AxiomCheck] = &[
    AxiomCheck { id: "C1", class: TolClass::Axiom, generate: gen_scalars, residual: c1 },
    AxiomCheck { id: "C2", class: TolClass::Axiom, generate: gen_scalars, residual: c2 },
    AxiomCheck { id: "C3", class: TolClass::Axiom, generate: gen_pair, residual: c3 },
    AxiomCheck { id: "C4", class: TolClass::Axiom, generate: gen_one, residual: c4 },
    AxiomCheck { id: "CONVEX", class: TolClass::Axiom, generate: gen_mixture, residual: mixture_defined },
    AxiomCheck { id: "AFFINE", class: TolClass::Axiom, generate: gen_mixture, residual: state_affine },
];

/// Random effect, shrunk by `1/k` half of the time so that sums of `k`
/// of them are defined.
fn shrinkable(model: Model, k: f64, rng: &mut CounterRng) -> Effect {
    let a = random_effect(model, rng);
    if rng.coin() {
        a.scale(1.0 / k).expect("1/k lies in [0, 1]")
    } else {
        a
    }
}

fn gen_one(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(Instance::default().effect("a", random_effect(model, rng)))
}

fn gen_pair(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", shrinkable(model, 2.0, rng))
            .effect("b", shrinkable(model, 2.0, rng))
            .scalar("lambda", rng.next_f64()),
    )
}

fn gen_triple(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", shrinkable(model, 3.0, rng))
            .effect("b", shrinkable(model, 3.0, rng))
            .effect("c", shrinkable(model, 3.0, rng)),
    )
}

/// `a` away from the interval ends, and `x = a′ + εh` with `h` either
/// positive or indefinite.
fn gen_near_complement(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let a = random_effect_in(model, 0.05, 0.95, rng);
    let h = random_effect(model, rng).to_ambient();
    let h = if rng.coin() {
        h
    } else {
        h.add_scaled(-0.5, &Effect::unit(model).to_ambient()).ok()?
    };
    let eps = rng.uniform(1e-4, 1e-2);
    let x = a.complement().to_ambient().add_scaled(eps, &h).ok()?.into_effect().ok()?;
    Some(Instance::default().effect("a", a).effect("x", x))
}

fn gen_maybe_zero(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let a = if rng.coin() {
        Effect::zero(model)
    } else {
        random_effect_in(model, 0.1, 1.0, rng)
    };
    Some(Instance::default().effect("a", a))
}

/// Half of the time `a = λb`, so that `a ≤ b`.
fn gen_ordered(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let b = random_effect(model, rng);
    let a = if rng.coin() {
        b.scale(rng.next_f64()).ok()?
    } else {
        random_effect(model, rng)
    };
    Some(Instance::default().effect("a", a).effect("b", b))
}

fn gen_state_pair(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", shrinkable(model, 2.0, rng))
            .effect("b", shrinkable(model, 2.0, rng))
            .scalar("lambda", rng.next_f64())
            .state("omega", random_state(model, rng)),
    )
}

fn gen_extension(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", random_effect(model, rng))
            .effect("b", random_effect(model, rng))
            .scalar("alpha", rng.uniform(-2.0, 2.0))
            .scalar("beta", rng.uniform(-2.0, 2.0))
            .state("omega", random_state(model, rng)),
    )
}

fn gen_scalars(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let alpha = rng.next_f64();
    Some(
        Instance::default()
            .effect("a", random_effect(model, rng))
            .scalar("alpha", alpha)
            .scalar("beta", rng.uniform(0.0, 1.0 - alpha)),
    )
}

fn gen_mixture(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", random_effect(model, rng))
            .effect("b", random_effect(model, rng))
            .scalar("lambda", rng.next_f64())
            .state("omega", random_state(model, rng)),
    )
}

/// Distance between two tri-state outcomes; a definedness mismatch counts 1.
fn outcome_gap(x: &OrthSum, y: &OrthSum) -> Result<f64> {
    match (x, y) {
        (OrthSum::Defined(p), OrthSum::Defined(q)) => dist(p, q),
        (OrthSum::Undefined, OrthSum::Undefined) => Ok(0.0),
        _ => Ok(1.0),
    }
}

fn e1(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    outcome_gap(&alg.sum(a, b)?, &alg.sum(b, a)?)
}

fn e2(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, c) = (i.e("a")?, i.e("b")?, i.e("c")?);
    let Some(ab) = alg.sum(a, b)?.defined() else {
        return Ok(0.0);
    };
    let Some(left) = alg.sum(&ab, c)?.defined() else {
        return Ok(0.0);
    };
    let Some(bc) = alg.sum(b, c)?.defined() else {
        return Ok(1.0);
    };
    outcome_gap(&OrthSum::Defined(left), &alg.sum(a, &bc)?)
}

fn e3(alg: &Algebra, i: &Instance) -> Result<f64> {
    let a = i.e("a")?;
    match alg.sum(a, &a.complement())? {
        OrthSum::Defined(s) => dist(&s, &Effect::unit(a.model())),
        OrthSum::Undefined => Ok(1.0),
    }
}

/// `a ⊕ x` lies exactly as far from `u` as `x` lies from `a′`, so `a′` is the
/// only solution of `a ⊕ x = u`.
fn e3_unique(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, x) = (i.e("a")?, i.e("x")?);
    match alg.sum(a, x)? {
        OrthSum::Defined(s) => {
            Ok((dist(&s, &Effect::unit(a.model()))? - dist(x, &a.complement())?).abs())
        }
        OrthSum::Undefined => Ok(0.0),
    }
}

/// `a ⊥ u` forces `a = 0`, and `0 ⊕ u = u`.
fn e4(alg: &Algebra, i: &Instance) -> Result<f64> {
    let a = i.e("a")?;
    let u = Effect::unit(a.model());
    let s = alg.sum(a, &u)?;
    if a.norm() == 0.0 {
        return match s {
            OrthSum::Defined(s) => dist(&s, &u),
            OrthSum::Undefined => Ok(1.0),
        };
    }
    Ok(if s.is_defined() { a.norm() } else { 0.0 })
}

fn involution(_: &Algebra, i: &Instance) -> Result<f64> {
    let a = i.e("a")?;
    dist(&a.complement().complement(), a)
}

fn order_reversal(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    if !a.leq(b)? {
        return Ok(0.0);
    }
    deficit(&b.complement(), &a.complement())
}

/// `ω(0) = 0`, `ω(u) = 1`, `ω(λa) = λω(a)` and additivity over defined sums.
fn pairing_laws(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, lambda, omega) = (i.e("a")?, i.e("b")?, i.x("lambda")?, i.s("omega")?);
    let model = a.model();
    let mut r = omega.eval(&Effect::zero(model))?.abs();
    r = r.max((omega.eval(&Effect::unit(model))? - 1.0).abs());
    r = r.max((omega.eval(&a.scale(lambda)?)? - lambda * omega.eval(a)?).abs());
    if let OrthSum::Defined(s) = alg.sum(a, b)? {
        r = r.max((omega.eval(&s)? - omega.eval(a)? - omega.eval(b)?).abs());
    }
    Ok(r)
}

fn extension(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, omega) = (i.e("a")?, i.e("b")?, i.s("omega")?);
    let (alpha, beta) = (i.x("alpha")?, i.x("beta")?);
    let f = omega.extend();
    let (fa, fb) = (f.apply(&a.to_ambient())?, f.apply(&b.to_ambient())?);
    let combo = crate::effect::Ambient::zero(a.model())
        .add_scaled(alpha, &a.to_ambient())?
        .add_scaled(beta, &b.to_ambient())?;
    let r = (fa - omega.eval(a)?).abs();
    let r = r.max((f.apply(&combo)? - alpha * fa - beta * fb).abs());
    Ok(r.max((f.apply(&Effect::unit(a.model()).to_ambient())? - 1.0).abs()))
}

/// A witness exists exactly when `a ≰ b`, and it separates strictly.
fn witness(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    match order_witness(a, b)? {
        None => Ok(flag(!a.leq(b)?)),
        Some(s) => Ok(flag(s.eval(a)? - s.eval(b)? <= 1e-12)),
    }
}

fn c1(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, alpha, beta) = (i.e("a")?, i.x("alpha")?, i.x("beta")?);
    dist(&a.scale(beta)?.scale(alpha)?, &a.scale(alpha * beta)?)
}

fn c2(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, alpha, beta) = (i.e("a")?, i.x("alpha")?, i.x("beta")?);
    let whole = a.scale((alpha + beta).min(1.0))?;
    outcome_gap(&OrthSum::Defined(whole), &alg.sum(&a.scale(alpha)?, &a.scale(beta)?)?)
}

fn c3(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, lambda) = (i.e("a")?, i.e("b")?, i.x("lambda")?);
    let Some(s) = alg.sum(a, b)?.defined() else {
        return Ok(0.0);
    };
    outcome_gap(
        &OrthSum::Defined(s.scale(lambda)?),
        &alg.sum(&a.scale(lambda)?, &b.scale(lambda)?)?,
    )
}

fn c4(_: &Algebra, i: &Instance) -> Result<f64> {
    let a = i.e("a")?;
    dist(&a.scale(1.0)?, a)
}

fn mixture_defined(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, lambda) = (i.e("a")?, i.e("b")?, i.x("lambda")?);
    Ok(flag(!alg.sum(&a.scale(lambda)?, &b.scale(1.0 - lambda)?)?.is_defined()))
}

fn state_affine(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, lambda, omega) = (i.e("a")?, i.e("b")?, i.x("lambda")?, i.s("omega")?);
    let Some(m) = alg.sum(&a.scale(lambda)?, &b.scale(1.0 - lambda)?)?.defined() else {
        return Ok(1.0);
    };
    Ok((omega.eval(&m)? - lambda * omega.eval(a)? - (1.0 - lambda) * omega.eval(b)?).abs())
}
