//! Sequential-product laws and their structural consequences.
//!
//! Premises such as `a|b` are met by construction: compatible pairs share a
//! context, and the `c|a, c|b` premise of S5 uses `a, b` that are block
//! diagonal with respect to the spectral projectors of `c`.

use super::{commutator, deficit, dist, flag, AxiomCheck, Instance, TolClass};
use crate::context::{spectral_resolution, Context};
use crate::effect::{Ambient, Effect, Model, OrthSum};
use crate::error::Result;
use crate::harness::algebra::Algebra;
use crate::harness::generate::{
    effect_on_context, random_atom, random_context, random_effect, random_effect_in, random_sharp,
};
use crate::harness::rng::CounterRng;
use crate::linalg::{hermitian_eigh, SHARP_TOL};
use crate::sequential::{recover_atoms_vandermonde, seq_product};

pub(super) static SEA: &[AxiomCheck] = &[
    AxiomCheck { id: "S0-CLOSURE", class: TolClass::Axiom, generate: gen_pair, residual: closure },
    AxiomCheck { id: "S1", class: TolClass::Axiom, generate: gen_additive, residual: s1 },
    AxiomCheck { id: "S2", class: TolClass::Axiom, generate: gen_pair, residual: s2 },
    AxiomCheck { id: "S3", class: TolClass::Axiom, generate: gen_disjoint, residual: s3 },
    AxiomCheck { id: "S4", class: TolClass::Axiom, generate: gen_compatible, residual: s4 },
    AxiomCheck { id: "S5", class: TolClass::Axiom, generate: gen_blocks, residual: s5 },
    AxiomCheck { id: "S6", class: TolClass::Axiom, generate: gen_pair, residual: s6 },
    AxiomCheck { id: "BELOW", class: TolClass::Axiom, generate: gen_pair, residual: below_first },
    AxiomCheck { id: "MONOTONE", class: TolClass::Axiom, generate: gen_below, residual: monotone },
    AxiomCheck { id: "IDEMPOTENT", class: TolClass::Axiom, generate: gen_maybe_sharp, residual: idempotent_iff_sharp },
    AxiomCheck { id: "SHARP-ORTHO", class: TolClass::Axiom, generate: gen_sharp_pair, residual: sharp_orthogonality },
    AxiomCheck { id: "SHARP-BELOW", class: TolClass::Axiom, generate: gen_sharp_pair, residual: sharp_below },
    AxiomCheck { id: "ATOM-COMPAT", class: TolClass::Axiom, generate: gen_atoms, residual: compatible_atoms },
    AxiomCheck { id: "PROD-MEAS", class: TolClass::Axiom, generate: gen_grouped, residual: product_measurable },
    AxiomCheck { id: "VANDERMONDE", class: TolClass::Recovery, generate: gen_separated, residual: vandermonde },
    AxiomCheck { id: "COMM", class: TolClass::Axiom, generate: gen_classical_pair, residual: commutative },
];

// Below this, `a∘b` counts as zero and `a|b` as holding when a law uses
// them as premises. Constructed premises sit near 1e-15.
const PREMISE_TOL: f64 = 1e-9;

fn gen_pair(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    Some(
        Instance::default()
            .effect("a", random_effect(model, rng))
            .effect("b", random_effect(model, rng))
            .scalar("lambda", rng.next_f64()),
    )
}

fn gen_classical_pair(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    match model {
        Model::Classical(_) => gen_pair(model, rng),
        Model::Hilbert(_) => None,
    }
}

fn gen_additive(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let half = |rng: &mut CounterRng| {
        let e = random_effect(model, rng);
        if rng.coin() {
            e.scale(0.5).expect("half lies in [0, 1]")
        } else {
            e
        }
    };
    Some(
        Instance::default()
            .effect("a", random_effect(model, rng))
            .effect("b", half(rng))
            .effect("c", half(rng)),
    )
}

fn random_coefficients(n: usize, rng: &mut CounterRng) -> Vec<f64> {
    (0..n).map(|_| rng.next_f64()).collect()
}

/// Half of the time `a` and `b` live on complementary groups of atoms of one
/// context, so that `a∘b = 0`.
fn gen_disjoint(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    if rng.coin() {
        return gen_pair(model, rng);
    }
    let ctx = random_context(model, rng);
    let side: Vec<bool> = (0..ctx.len()).map(|_| rng.coin()).collect();
    let a: Vec<f64> = side.iter().map(|&s| if s { rng.next_f64() } else { 0.0 }).collect();
    let b: Vec<f64> = side.iter().map(|&s| if s { 0.0 } else { rng.next_f64() }).collect();
    Some(
        Instance::default()
            .effect("a", effect_on_context(&ctx, &a))
            .effect("b", effect_on_context(&ctx, &b)),
    )
}

fn gen_compatible(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let ctx = random_context(model, rng);
    let n = ctx.len();
    Some(
        Instance::default()
            .effect("a", effect_on_context(&ctx, &random_coefficients(n, rng)))
            .effect("b", effect_on_context(&ctx, &random_coefficients(n, rng)))
            .effect("c", random_effect(model, rng)),
    )
}

/// `Σ_k P_k x P_k` for the projectors `P_k` of a partition of the context.
fn pinch(x: &Effect, blocks: &[Effect]) -> Result<Effect> {
    let mut total = Ambient::zero(x.model());
    for p in blocks {
        total = total.add_scaled(1.0, &seq_product(p, x)?.to_ambient())?;
    }
    total.into_effect()
}

/// `c = Σ γ_k P_k` over a random partition of a context into blocks, with
/// `a` and `b` block diagonal but otherwise random.
fn gen_blocks(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let ctx = random_context(model, rng);
    let n = ctx.len();
    let groups = 1 + rng.index(n);
    let label: Vec<usize> = (0..n).map(|i| if i < groups { i } else { rng.index(groups) }).collect();
    let blocks: Vec<Effect> = (0..groups)
        .map(|g| {
            let picks: Vec<f64> = label.iter().map(|&l| if l == g { 1.0 } else { 0.0 }).collect();
            effect_on_context(&ctx, &picks)
        })
        .collect();
    let gammas = random_coefficients(groups, rng);
    let c: Vec<f64> = label.iter().map(|&l| gammas[l]).collect();
    let shrink = if rng.coin() { 0.5 } else { 1.0 };
    let a = pinch(&random_effect(model, rng), &blocks).ok()?.scale(shrink).ok()?;
    let b = pinch(&random_effect(model, rng), &blocks).ok()?.scale(shrink).ok()?;
    Some(
        Instance::default()
            .effect("a", a)
            .effect("b", b)
            .effect("c", effect_on_context(&ctx, &c)),
    )
}

/// `a = b∘x ≤ b` half of the time, and a third effect `c`.
fn gen_below(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let b = random_effect(model, rng);
    let a = if rng.coin() {
        seq_product(&b, &random_effect(model, rng)).ok()?
    } else {
        random_effect(model, rng)
    };
    Some(
        Instance::default()
            .effect("a", a)
            .effect("b", b)
            .effect("c", random_effect(model, rng)),
    )
}

fn gen_maybe_sharp(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let a = if rng.coin() {
        random_sharp(model, rng)
    } else {
        random_effect_in(model, 0.1, 0.9, rng)
    };
    Some(Instance::default().effect("a", a))
}

/// Sharp `b`, and `a` that is below `b`, below `b′`, or random.
fn gen_sharp_pair(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let b = random_sharp(model, rng);
    let x = random_effect(model, rng);
    let a = match rng.index(3) {
        0 => seq_product(&b, &x).ok()?,
        1 => seq_product(&b.complement(), &x).ok()?,
        _ => x,
    };
    Some(Instance::default().effect("a", a).effect("b", b))
}

/// Two atoms: equal, orthogonal members of one context, or unrelated.
fn gen_atoms(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let (a, b) = match rng.index(3) {
        0 => {
            let a = random_atom(model, rng);
            (a.clone(), a)
        }
        1 => {
            let ctx = random_context(model, rng);
            let n = ctx.len();
            let i = rng.index(n);
            let j = rng.index(n);
            (ctx.atoms()[i].clone(), ctx.atoms()[j].clone())
        }
        _ => (random_atom(model, rng), random_atom(model, rng)),
    };
    Some(Instance::default().effect("a", a).effect("b", b))
}

/// `a = Σ λ_i a_i` over a context and `b = Σ μ_j b_j` over sharp groups of
/// the same atoms.
fn gen_grouped(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let ctx = random_context(model, rng);
    let n = ctx.len();
    let groups = 1 + rng.index(n);
    let label: Vec<usize> = (0..n).map(|_| rng.index(groups)).collect();
    let lambdas = random_coefficients(n, rng);
    let mus = random_coefficients(groups, rng);
    let parts: Vec<Effect> = (0..groups)
        .map(|g| {
            let picks: Vec<f64> = label.iter().map(|&l| if l == g { 1.0 } else { 0.0 }).collect();
            effect_on_context(&ctx, &picks)
        })
        .collect();
    let b: Vec<f64> = label.iter().map(|&l| mus[l]).collect();
    Some(
        Instance::default()
            .effect("a", effect_on_context(&ctx, &lambdas))
            .effect("b", effect_on_context(&ctx, &b))
            .family("context", ctx.atoms().to_vec())
            .family("b_parts", parts)
            .family("lambda", coefficient_effects(&lambdas))
            .family("mu", coefficient_effects(&mus)),
    )
}

/// Coefficient lists ride along as one-point classical effects so the
/// instance stays a plain record of effects.
fn coefficient_effects(values: &[f64]) -> Vec<Effect> {
    values
        .iter()
        .map(|&v| {
            Effect::Classical(crate::classical::FuzzyEvent::new(vec![v]).expect("coefficient in [0, 1]"))
        })
        .collect()
}

fn coefficients_of(family: &[Effect]) -> Vec<f64> {
    family
        .iter()
        .map(|e| e.as_classical().map(|f| f.values()[0]).unwrap_or(f64::NAN))
        .collect()
}

/// Coefficients at least 0.05 apart on a random context.
fn gen_separated(model: Model, rng: &mut CounterRng) -> Option<Instance> {
    let ctx = random_context(model, rng);
    let n = ctx.len();
    let gap = 0.05;
    let room = 1.0 - gap * (n as f64 - 1.0);
    if room < 0.0 {
        return None;
    }
    let mut base: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, room)).collect();
    base.sort_by(f64::total_cmp);
    let mut lambdas: Vec<f64> = base.iter().enumerate().map(|(i, x)| x + gap * i as f64).collect();
    for i in (1..n).rev() {
        let j = rng.index(i + 1);
        lambdas.swap(i, j);
    }
    Some(
        Instance::default()
            .effect("a", effect_on_context(&ctx, &lambdas))
            .family("context", ctx.atoms().to_vec())
            .family("lambda", coefficient_effects(&lambdas)),
    )
}

/// How far an effect payload is from `[0, u]`: Hermitian defect plus spectral excess.
pub(super) fn closure_defect(e: &Effect) -> Result<f64> {
    Ok(match e {
        Effect::Classical(f) => f
            .values()
            .iter()
            .map(|&v| (-v).max(v - 1.0).max(0.0))
            .fold(0.0, f64::max),
        Effect::Hilbert(h) => {
            let m = h.matrix();
            let eig = hermitian_eigh(&m.hermitian_part())?;
            m.hermitian_defect() + (-eig.min()).max(0.0) + (eig.max() - 1.0).max(0.0)
        }
    })
}

fn closure(alg: &Algebra, i: &Instance) -> Result<f64> {
    closure_defect(&alg.product(i.e("a")?, i.e("b")?)?)
}

/// `a∘(b ⊕ c) = a∘b ⊕ a∘c`.
fn s1(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, c) = (i.e("a")?, i.e("b")?, i.e("c")?);
    let Some(bc) = alg.sum(b, c)?.defined() else {
        return Ok(0.0);
    };
    let left = alg.product(a, &bc)?;
    match alg.sum(&alg.product(a, b)?, &alg.product(a, c)?)? {
        OrthSum::Defined(right) => dist(&left, &right),
        OrthSum::Undefined => Ok(1.0),
    }
}

fn s2(alg: &Algebra, i: &Instance) -> Result<f64> {
    let a = i.e("a")?;
    dist(&alg.product(&Effect::unit(a.model()), a)?, a)
}

fn s3(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    if alg.product(a, b)?.norm() > PREMISE_TOL {
        return Ok(0.0);
    }
    Ok(alg.product(b, a)?.norm())
}

/// `a|b` implies `a|b′` and `a∘(b∘c) = (a∘b)∘c`.
fn s4(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, c) = (i.e("a")?, i.e("b")?, i.e("c")?);
    if commutator(alg, a, b)? > PREMISE_TOL {
        return Ok(0.0);
    }
    let left = alg.product(a, &alg.product(b, c)?)?;
    let right = alg.product(&alg.product(a, b)?, c)?;
    Ok(commutator(alg, a, &b.complement())?.max(dist(&left, &right)?))
}

/// `c|a` and `c|b` imply `c|a∘b`, and `c|a⊕b` when the sum is defined.
fn s5(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, c) = (i.e("a")?, i.e("b")?, i.e("c")?);
    if commutator(alg, c, a)? > PREMISE_TOL || commutator(alg, c, b)? > PREMISE_TOL {
        return Ok(0.0);
    }
    let mut r = commutator(alg, c, &alg.product(a, b)?)?;
    if let OrthSum::Defined(s) = alg.sum(a, b)? {
        r = r.max(commutator(alg, c, &s)?);
    }
    Ok(r)
}

/// `(λa)∘b = a∘(λb) = λ(a∘b)`.
fn s6(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, lambda) = (i.e("a")?, i.e("b")?, i.x("lambda")?);
    let target = Ambient::zero(a.model()).add_scaled(lambda, &alg.product(a, b)?.to_ambient())?;
    let left = alg.product(&a.scale(lambda)?, b)?.to_ambient();
    let right = alg.product(a, &b.scale(lambda)?)?.to_ambient();
    Ok(left
        .add_scaled(-1.0, &target)?
        .norm()
        .max(right.add_scaled(-1.0, &target)?.norm()))
}

fn below_first(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    deficit(&alg.product(a, b)?, a)
}

/// `a ≤ b` implies `c∘a ≤ c∘b`.
fn monotone(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b, c) = (i.e("a")?, i.e("b")?, i.e("c")?);
    if !a.leq(b)? {
        return Ok(0.0);
    }
    deficit(&alg.product(c, a)?, &alg.product(c, b)?)
}

/// Spectrum in `{0, 1}` exactly when `a∘a = a`.
fn idempotent_iff_sharp(alg: &Algebra, i: &Instance) -> Result<f64> {
    let a = i.e("a")?;
    let (_, spectrum) = spectral_resolution(a)?;
    let sharp = spectrum.iter().all(|&x| x.min(1.0 - x).abs() <= SHARP_TOL);
    let idempotent = dist(&alg.product(a, a)?, a)? <= SHARP_TOL;
    Ok(flag(sharp != idempotent))
}

/// For sharp `b`: `a∘b = 0` exactly when `a ⊥ b`.
fn sharp_orthogonality(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    let null = alg.product(a, b)?.norm() <= PREMISE_TOL;
    Ok(flag(null != alg.sum(a, b)?.is_defined()))
}

/// For sharp `b`: `a ≤ b` exactly when `a∘b = b∘a = a`.
fn sharp_below(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    let gap = dist(&alg.product(a, b)?, a)?.max(dist(&alg.product(b, a)?, a)?);
    if a.leq(b)? {
        Ok(gap)
    } else {
        Ok(flag(gap <= 1e-6))
    }
}

/// Compatible atoms are equal or have null product.
fn compatible_atoms(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    if commutator(alg, a, b)? > PREMISE_TOL {
        return Ok(0.0);
    }
    Ok(dist(a, b)?.min(alg.product(a, b)?.norm()))
}

/// `a∘b = Σ_ij λ_i μ_j a_i∘b_j`.
fn product_measurable(alg: &Algebra, i: &Instance) -> Result<f64> {
    let (a, b) = (i.e("a")?, i.e("b")?);
    let (atoms, parts) = (i.f("context")?, i.f("b_parts")?);
    let (lambdas, mus) = (coefficients_of(i.f("lambda")?), coefficients_of(i.f("mu")?));
    let mut total = Ambient::zero(a.model());
    for (ai, l) in atoms.iter().zip(&lambdas) {
        for (bj, m) in parts.iter().zip(&mus) {
            total = total.add_scaled(l * m, &alg.product(ai, bj)?.to_ambient())?;
        }
    }
    Ok(total.add_scaled(-1.0, &alg.product(a, b)?.to_ambient())?.norm())
}

/// Interpolating polynomials evaluated with the algebra's own powers recover
/// every atom.
fn vandermonde(alg: &Algebra, i: &Instance) -> Result<f64> {
    let a = i.e("a")?;
    let atoms = i.f("context")?.to_vec();
    let lambdas = coefficients_of(i.f("lambda")?);
    let ctx = Context::new(atoms)?;
    let polys = recover_atoms_vandermonde(a, &lambdas, &ctx)?;
    let n = ctx.len();
    let mut powers = vec![Effect::unit(a.model()), a.clone()];
    while powers.len() < n {
        let next = alg.product(a, powers.last().expect("nonempty"))?;
        powers.push(next);
    }
    let mut worst: f64 = 0.0;
    for (p, atom) in polys.iter().zip(ctx.atoms()) {
        let mut total = Ambient::zero(a.model());
        for (c, x) in p.coeffs.iter().zip(&powers) {
            total = total.add_scaled(*c, &x.to_ambient())?;
        }
        worst = worst.max(total.add_scaled(-1.0, &atom.to_ambient())?.norm());
    }
    Ok(worst)
}

fn commutative(alg: &Algebra, i: &Instance) -> Result<f64> {
    commutator(alg, i.e("a")?, i.e("b")?)
}
