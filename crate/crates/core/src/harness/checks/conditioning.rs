//! Conditional probability, Bayes and total probability, and conditional
//! expectation over sharp measurements.
//!
//! These checks call the library's conditioning functions, which always use
//! the model's own product; product faults do not reach them.

use super::{commutator, dist, flag, AxiomCheck, Instance, TolClass};
use crate::effect::{Ambient, Effect, Model, OrthSum, State};
use crate::error::Result;
use crate::harness::algebra::Algebra;
use crate::harness::generate::{
    effect_on_context, random_atom, random_effect, random_sharp, random_sharp_measurement,
    random_state,
};
use crate::harness::rng::CounterRng;
use crate::linalg::{real_vector, C64, PROB_FLOOR};
use crate::sequential::{
    bayes_posterior, conditional_expectation, conditional_probability, hat_state, is_measurable,
    seq_product, total_probability_residual, Measurement,
};

pub(super) static CONDITIONING: &[AxiomCheck] = &[
    AxiomCheck { id: "CP", class: TolClass::Conditioning, generate: gen_pair, residual: cp },
    AxiomCheck { id: "CP-ATOM", class: TolClass::Transition, generate: gen_atom_pair, residual: cp_atom },
    AxiomCheck { id: "CP-SELF", class: TolClass::Conditioning, generate: gen_sharp, residual: cp_self },
    AxiomCheck { id: "TP", class: TolClass::Exact, generate: gen_codiagonal, residual: total_probability },
    AxiomCheck { id: "BAYES", class: TolClass::Exact, generate: gen_codiagonal, residual: bayes },
    AxiomCheck { id: "TP-CONVERSE", class: TolClass::Axiom, generate: gen_converse, residual: tp_converse },
    AxiomCheck { id: "CE-DEF", class: TolClass::Conditioning, generate: gen_expectation, residual: ce_defining },
    AxiomCheck { id: "CE-MEAS", class: TolClass::Conditioning, generate: gen_expectation, residual: ce_measurable },
    AxiomCheck { id: "CE-FIXED", class: TolClass::Conditioning, generate: gen_expectation, residual: ce_fixed },
    AxiomCheck { id: "CE-LINEAR", class: TolClass::Conditioning, generate: gen_expectation, residual: ce_linear },
    AxiomCheck { id: "CE-PULLOUT", class: TolClass::Conditioning, generate: gen_expectation, residual: ce_pull_out },
    AxiomCheck { id: "CE-SPLIT", class: TolClass::Conditioning, generate: gen_expectation, residual: ce_split },
    AxiomCheck { id: "CE-UNIT", class: TolClass::Conditioning, generate: gen_expectation, residual: ce_unit },
];

fn gen_pair(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", random_effect(model, rng))
            .effect("b", random_effect(model, rng))
            .state("omega", random_state(model, rng)),
    )
}

fn gen_atom_pair(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", random_atom(model, rng))
            .effect("b", random_effect(model, rng))
            .state("omega", random_state(model, rng)),
    )
}

fn gen_sharp(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", random_sharp(model, rng))
            .state("omega", random_state(model, rng)),
    )
}

fn coefficients(n: usize, lo: f64, hi: f64, rng: &mut CounterRng) -> Vec<f64> {
    (0..n).map(|_| rng.uniform(lo, hi)).collect()
}

/// Sharp measurement and an effect diagonal in the same context.
fn gen_codiagonal(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let k = 1 + rng.index(model.dim());
    let (m, ctx, _) = random_sharp_measurement(model, k, rng);
    let b = effect_on_context(&ctx, &coefficients(ctx.len(), 0.1, 0.9, rng));
    Some(
        Instance::default()
            .family("m", m.elements().to_vec())
            .effect("b", b)
            .state("omega", random_state(model, rng))
            .scalar("i", rng.index(m.len()) as f64),
    )
}

fn gen_converse(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    if model.dim() > 4 {
        return None;
    }
    let k = 1 + rng.index(model.dim());
    let (m, ctx, _) = random_sharp_measurement(model, k, rng);
    let b = if rng.coin() {
        effect_on_context(&ctx, &coefficients(ctx.len(), 0.0, 1.0, rng))
    } else {
        random_effect(model, rng)
    };
    Some(Instance::default().family("m", m.elements().to_vec()).effect("b", b))
}

/// Sharp measurement `m`, effects `b, c` (halved half of the time so their
/// sum is defined), `λ`, a state, and `g = Σ γ_k m_k` measurable relative to `m`.
fn gen_expectation(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let k = 1 + rng.index(model.dim());
    let (m, _, _) = random_sharp_measurement(model, k, rng);
    let shrink = if rng.coin() { 0.5 } else { 1.0 };
    let gammas = coefficients(m.len(), 0.0, 1.0, rng);
    let mut g = Ambient::zero(model);
    for (e, c) in m.elements().iter().zip(&gammas) {
        g = g.add_scaled(*c, &e.to_ambient()).ok()?;
    }
    Some(
        Instance::default()
            .family("m", m.elements().to_vec())
            .effect("b", random_effect(model, rng).scale(shrink).ok()?)
            .effect("c", random_effect(model, rng).scale(shrink).ok()?)
            .effect("g", g.into_effect().ok()?)
            .scalar("lambda", rng.next_f64())
            .state("omega", random_state(model, rng)),
    )
}

fn measurement(i: &Instance) -> Result<Measurement> {
    Measurement::new(i.f("m")?.to_vec())
}

/// `ω(a∘b) = ω(a) ω(b|a)` with `ω(b|a) ∈ [0, 1]`.
fn cp(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, omega) = (i.e("a")?, i.e("b")?, i.s("omega")?);
    if omega.eval(a)? <= PROB_FLOOR {
        return Ok(0.0);
    }
    let p = conditional_probability(omega, a, b)?;
    let r = (omega.eval(&seq_product(a, b)?)? - omega.eval(a)? * p).abs();
    Ok(r.max(flag(!(0.0..=1.0).contains(&p))))
}

/// `ω(b|a) = â(b)` for an atom `a`, whatever `ω` is.
fn cp_atom(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, omega) = (i.e("a")?, i.e("b")?, i.s("omega")?);
    if omega.eval(a)? <= PROB_FLOOR {
        return Ok(0.0);
    }
    Ok((conditional_probability(omega, a, b)? - hat_state(a)?.eval(b)?).abs())
}

/// `ω(a|a) = 1` for sharp `a`.
fn cp_self(_: &Algebra, i: &Instance) -> Result<f64> {
    let (a, omega) = (i.e("a")?, i.s("omega")?);
    if omega.eval(a)? <= PROB_FLOOR {
        return Ok(0.0);
    }
    Ok((conditional_probability(omega, a, a)? - 1.0).abs())
}

fn total_probability(_: &Algebra, i: &Instance) -> Result<f64> {
    total_probability_residual(i.s("omega")?, &measurement(i)?, i.e("b")?)
}

fn bayes(_: &Algebra, i: &Instance) -> Result<f64> {
    let (m, b, omega) = (measurement(i)?, i.e("b")?, i.s("omega")?);
    let k = i.x("i")? as usize;
    if omega.eval(&m.elements()[k])? <= PROB_FLOOR || omega.eval(b)? <= PROB_FLOOR {
        return Ok(0.0);
    }
    Ok(bayes_posterior(omega, &m, b, k)?.residual)
}

/// Vector states that separate Hermitian matrices: `e_k`, `(e_j + e_k)/√2`,
/// `(e_j + i e_k)/√2`, plus the eigenvectors of `b`.
fn tomographic_states(b: &Effect) -> Result<Vec<State>> {
    let d = b.model().dim();
    let Effect::Hilbert(h) = b else {
        return Ok((0..d).map(|index| State::Dirac { n: d, index }).collect());
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        out.push(State::vector(real_vector(&e))?);
        for k in (j + 1)..d {
            let mut plus = vec![C64::new(0.0, 0.0); d];
            plus[j] = C64::new(s, 0.0);
            plus[k] = C64::new(s, 0.0);
            out.push(State::vector(plus.clone())?);
            plus[k] = C64::new(0.0, s);
            out.push(State::vector(plus)?);
        }
    }
    for v in &h.eig()?.eigenvectors {
        out.push(State::vector(v.clone())?);
    }
    Ok(out)
}

/// A vanishing total-probability residual on a separating family of states
/// happens exactly when `b` is compatible with every element.
fn tp_converse(_: &Algebra, i: &Instance) -> Result<f64> {
    let (m, b) = (measurement(i)?, i.e("b")?);
    let mut worst: f64 = 0.0;
    for omega in tomographic_states(b)? {
        worst = worst.max(total_probability_residual(&omega, &m, b)?);
    }
    Ok(flag((worst <= 1e-12) != is_measurable(b, &m, 1e-8)?))
}

fn expectation(i: &Instance, b: &Effect) -> Result<Effect> {
    conditional_expectation(i.s("omega")?, b, &measurement(i)?)
}

/// Elements the expectation keeps: those of probability above the floor.
fn retained(i: &Instance) -> Result<Vec<Effect>> {
    let omega = i.s("omega")?;
    let mut out = Vec::new();
    for a in i.f("m")? {
        if omega.eval(a)? > PROB_FLOOR {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// `ω(a_i∘E) = ω(a_i∘b)` for every retained element.
fn ce_defining(_: &Algebra, i: &Instance) -> Result<f64> {
    let (b, omega) = (i.e("b")?, i.s("omega")?);
    let e = expectation(i, b)?;
    let mut worst: f64 = 0.0;
    for a in retained(i)? {
        worst = worst.max((omega.eval(&seq_product(&a, &e)?)? - omega.eval(&seq_product(&a, b)?)?).abs());
    }
    Ok(worst)
}

fn ce_measurable(alg: &Algebra, i: &Instance) -> Result<f64> {
    let e = expectation(i, i.e("b")?)?;
    let mut worst: f64 = 0.0;
    for a in i.f("m")? {
        worst = worst.max(commutator(&Algebra::new(alg.model), a, &e)?);
    }
    Ok(worst)
}

/// `E(g) = g` for `g` measurable relative to the measurement, up to the
/// elements the state does not see.
fn ce_fixed(_: &Algebra, i: &Instance) -> Result<f64> {
    let g = i.e("g")?;
    let e = expectation(i, g)?;
    let mut visible = Ambient::zero(g.model());
    for a in retained(i)? {
        visible = visible.add_scaled(1.0, &seq_product(&a, g)?.to_ambient())?;
    }
    Ok(e.to_ambient().add_scaled(-1.0, &visible)?.norm())
}

/// `E(b ⊕ c) = E(b) + E(c)` and `E(λb) = λE(b)`.
fn ce_linear(_: &Algebra, i: &Instance) -> Result<f64> {
    let (b, c, lambda) = (i.e("b")?, i.e("c")?, i.x("lambda")?);
    let eb = expectation(i, b)?.to_ambient();
    let mut r = expectation(i, &b.scale(lambda)?)?
        .to_ambient()
        .add_scaled(-lambda, &eb)?
        .norm();
    if let OrthSum::Defined(s) = b.orth_sum(c)? {
        let whole = expectation(i, &s)?.to_ambient();
        let parts = eb.add_scaled(1.0, &expectation(i, c)?.to_ambient())?;
        r = r.max(whole.add_scaled(-1.0, &parts)?.norm());
    }
    Ok(r)
}

/// `E(g∘b) = g∘E(b)` for `g` measurable relative to the measurement.
fn ce_pull_out(_: &Algebra, i: &Instance) -> Result<f64> {
    let (b, g) = (i.e("b")?, i.e("g")?);
    dist(&expectation(i, &seq_product(g, b)?)?, &seq_product(g, &expectation(i, b)?)?)
}

/// `E(b) = Σ_i E(a_i∘b)`.
fn ce_split(_: &Algebra, i: &Instance) -> Result<f64> {
    let b = i.e("b")?;
    let mut total = Ambient::zero(b.model());
    for a in i.f("m")? {
        total = total.add_scaled(1.0, &expectation(i, &seq_product(a, b)?)?.to_ambient())?;
    }
    Ok(expectation(i, b)?.to_ambient().add_scaled(-1.0, &total)?.norm())
}

fn ce_unit(_: &Algebra, i: &Instance) -> Result<f64> {
    let m = measurement(i)?;
    let u = Effect::unit(m.model());
    let e = expectation(i, &u)?;
    let mut visible = Ambient::zero(m.model());
    for a in retained(i)? {
        visible = visible.add_scaled(1.0, &a.to_ambient())?;
    }
    Ok(e.to_ambient().add_scaled(-1.0, &visible)?.norm())
}
