//! Acceptance criteria, one test per criterion. Each prints a single
//! `PASS`/`FAIL` line before asserting.
//!
//! Fixed instances are checked against hand-computed values:
//! * `ω = |+⟩`, `m = {P0, P1}`, `b = P+`: `ω(b) = 1` while `Σ ω(P_i P+ P_i) = ½`.
//! * `ω = |0⟩`, `b = P+`, `a = P0`: `ω(a|b) = ⟨0|½P+|0⟩ / ½ = ½` and
//!   `ω(b|a) ω(a) / ω(b) = ½ · 1 / ½ = 1`.
//! * `½P0 + ½P+ = [[¾, ¼], [¼, ¼]]` has trace 1 and determinant ⅛, hence
//!   eigenvalues `(1 ± 1/√2) / 2`.

use std::time::Instant;

use effectalg::context::{
    classify_algebra, context_distance, dynamics_unitary_ambient, recombine, rep_j_full,
    rep_j_full_inverse, rep_j_single_context, third_context_witness, transition_probability,
    AlgebraClass, Context,
};
use effectalg::effect::Ambient;
use effectalg::harness::algebra::{Algebra, Fault};
use effectalg::harness::checks::find;
use effectalg::harness::generate::{
    effect_on_context, random_context, random_effect, random_effect_in, random_sharp,
    random_state, random_unit_vector,
};
use effectalg::harness::rng::{stream_id, CounterRng};
use effectalg::harness::{check_b1_b2, replay, run_suite, Suite, Tolerances, VerificationReport};
use effectalg::hilbert::HilbertEffect;
use effectalg::linalg::{hermitian_eigh, inner, projector, psd_sqrt, real_vector, ComplexMatrix, C64};
use effectalg::sequential::{
    bayes_posterior, compatible, conditional_probability, evaluate_polynomial, function_of_effect,
    hat_state, recover_atoms_vandermonde, total_probability_residual,
};
use effectalg::{seq_product, Effect, Measurement, Model, State};

const SEED: u64 = 42;

fn verdict(n: u32, title: &str, ok: bool, detail: &str) {
    println!("criterion {n:>2} {}: {title} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {title} ({detail})");
}

fn rng(label: &str) -> CounterRng {
    CounterRng::new(SEED, stream_id(label))
}

fn hilbert(m: ComplexMatrix) -> Effect {
    Effect::Hilbert(HilbertEffect::new(m).unwrap())
}

fn matrix(e: &Effect) -> &ComplexMatrix {
    e.as_hilbert().unwrap().matrix()
}

fn ket(re: &[f64]) -> Vec<C64> {
    real_vector(re)
}

fn p0() -> Effect {
    hilbert(projector(&ket(&[1.0, 0.0])).unwrap())
}

fn p1() -> Effect {
    hilbert(projector(&ket(&[0.0, 1.0])).unwrap())
}

fn pm(sign: f64) -> Effect {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    hilbert(projector(&ket(&[s, sign * s])).unwrap())
}

fn violations_among(r: &VerificationReport, ids: &[&str]) -> usize {
    r.violations.iter().filter(|v| ids.contains(&v.axiom.as_str())).count()
}

#[test]
fn criterion_01_axiom_suites() {
    let start = Instant::now();
    let mut configs: Vec<Model> = (2..=8).map(Model::Classical).collect();
    configs.extend([2, 3, 4, 6].map(Model::Hilbert));
    let mut bad = Vec::new();
    let mut evaluations = 0;
    for model in configs {
        let alg = Algebra::new(model);
        for suite in [Suite::Effect, Suite::Convex, Suite::Sea] {
            let r = run_suite(suite, &alg, 1000, SEED, Some(1e-8));
            evaluations += r.trials;
            bad.extend(r.violations.iter().map(|v| format!("{model} {} {:.2e}", v.axiom, v.residual)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        "effect, convex and sequential laws, 1000 trials per configuration",
        bad.is_empty() && secs < 60.0,
        &format!("{evaluations} evaluations, {} violations {:?}, {secs:.1} s", bad.len(), bad.first()),
    );
}

#[test]
fn criterion_02_product_properties() {
    let ids = ["BELOW", "MONOTONE", "IDEMPOTENT", "SHARP-ORTHO", "SHARP-BELOW"];
    let mut bad = 0;
    for model in [Model::Classical(5), Model::Hilbert(3)] {
        bad += violations_among(&run_suite(Suite::Sea, &Algebra::new(model), 1000, SEED, Some(1e-8)), &ids);
    }
    // constructed sharp elements are idempotent, spectra inside [0.2, 0.8] are not
    let mut wrong = 0;
    let mut g = rng("criterion-2");
    for model in [Model::Classical(5), Model::Hilbert(2), Model::Hilbert(3), Model::Hilbert(4)] {
        for _ in 0..250 {
            let s = random_sharp(model, &mut g);
            let idem = seq_product(&s, &s).unwrap().distance(&s).unwrap() <= 1e-8;
            if !(idem && s.is_sharp(1e-8)) {
                wrong += 1;
            }
            let u = random_effect_in(model, 0.2, 0.8, &mut g);
            let gap = seq_product(&u, &u).unwrap().distance(&u).unwrap();
            if u.is_sharp(1e-8) || gap < 0.16 - 1e-12 {
                wrong += 1;
            }
        }
    }
    verdict(
        2,
        "product properties and idempotence versus sharpness",
        bad == 0 && wrong == 0,
        &format!("{bad} suite violations, {wrong} misjudged constructed instances"),
    );
}

#[test]
fn criterion_03_trace_conditions() {
    let mut suite_bad = 0;
    let mut b2_bad = 0;
    let mut direction_err: f64 = 0.0;
    let mut g = rng("criterion-3");
    for d in 2..=4 {
        suite_bad += check_b1_b2(d, 500, SEED, Some(1e-9)).violations.len();
    }
    let plus = {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[s, s])
    };
    for t in 0..500 {
        let d = 2 + t % 3;
        let model = Model::Hilbert(d);
        let a = random_effect(model, &mut g);
        let p = hilbert(projector(&random_unit_vector(d, &mut g)).unwrap());
        let ap = matrix(&seq_product(&a, &p).unwrap()).clone();
        let tr = ap.trace().re;
        if tr > 1e-6 {
            let eig = hermitian_eigh(&ap.scale(1.0 / tr)).unwrap();
            let top = eig.eigenvalues[d - 1];
            let rest = eig.eigenvalues[..d - 1].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if top < 1.0 - 1e-9 || rest > 1e-9 {
                b2_bad += 1;
            }
        }
        // with P = P+ the image is the projector onto a^{1/2}|+⟩
        if d == 2 {
            let a2 = random_effect(Model::Hilbert(2), &mut g);
            let prod = matrix(&seq_product(&a2, &pm(1.0)).unwrap()).clone();
            let tr = prod.trace().re;
            if tr > 1e-6 {
                let w = psd_sqrt(matrix(&a2)).unwrap().apply(&plus);
                let n = inner(&w, &w).re.sqrt();
                let dir: Vec<C64> = w.iter().map(|z| z / n).collect();
                let expect = projector(&dir).unwrap();
                direction_err = direction_err.max((&prod.scale(1.0 / tr) - &expect).frobenius_norm());
            }
        }
    }
    verdict(
        3,
        "trace conditions on the Lüders product",
        suite_bad == 0 && b2_bad == 0 && direction_err <= 1e-9,
        &format!("{suite_bad} suite violations, {b2_bad} rank-one failures, P+ direction error {direction_err:.2e}"),
    );
}

fn separated(n: usize, gap: f64, g: &mut CounterRng) -> Vec<f64> {
    loop {
        let xs: Vec<f64> = (0..n).map(|_| g.next_f64()).collect();
        let ok = (0..n).all(|i| ((i + 1)..n).all(|j| (xs[i] - xs[j]).abs() >= gap));
        if ok {
            return xs;
        }
    }
}

#[test]
fn criterion_04_vandermonde_recovery() {
    let mut g = rng("criterion-4");
    let mut worst: f64 = 0.0;
    let mut closed_form: f64 = 0.0;
    let mut cases = 0;
    for n in 2..=6 {
        for model in [Model::Classical(n), Model::Hilbert(n)] {
            for _ in 0..100 {
                let ctx = random_context(model, &mut g);
                let lambdas = separated(n, 0.05, &mut g);
                let a = recombine(&ctx, &lambdas).unwrap().into_effect().unwrap();
                let polys = recover_atoms_vandermonde(&a, &lambdas, &ctx).unwrap();
                for (p, atom) in polys.iter().zip(ctx.atoms()) {
                    let got = evaluate_polynomial(&a, p).unwrap();
                    worst = worst.max(got.add_scaled(-1.0, &atom.to_ambient()).unwrap().norm());
                }
                if n == 2 {
                    let (l1, l2) = (lambdas[0], lambdas[1]);
                    let unit = Effect::unit(model).to_ambient();
                    let numer = a.to_ambient().add_scaled(-l1, &unit).unwrap();
                    let formula = Ambient::zero(model).add_scaled(1.0 / (l2 - l1), &numer).unwrap();
                    let solver = function_of_effect(&a, &polys[1]).unwrap().to_ambient();
                    closed_form = closed_form.max(formula.add_scaled(-1.0, &solver).unwrap().norm());
                }
                cases += 1;
            }
        }
    }
    verdict(
        4,
        "atoms recovered as polynomials in the effect",
        worst <= 1e-6 && closed_form <= 1e-10,
        &format!("{cases} cases, worst atom error {worst:.2e}, two-atom closed form error {closed_form:.2e}"),
    );
}

#[test]
fn criterion_05_conditional_expectation() {
    let ids = ["CE-DEF", "CE-MEAS", "CE-FIXED", "CE-LINEAR", "CE-PULLOUT", "CE-SPLIT", "CE-UNIT"];
    let mut bad = 0;
    let mut evaluations = 0;
    for d in 2..=4 {
        let r = run_suite(Suite::Conditioning, &Algebra::new(Model::Hilbert(d)), 500, SEED, None);
        bad += violations_among(&r, &ids);
        evaluations += r.trials;
    }
    verdict(
        5,
        "conditional expectation identities at 1e-9",
        bad == 0,
        &format!("{bad} violations over {evaluations} conditioning evaluations"),
    );
}

#[test]
fn criterion_06_total_probability_and_bayes() {
    let mut bad = 0;
    for model in [Model::Classical(4), Model::Hilbert(2), Model::Hilbert(3), Model::Hilbert(4)] {
        let r = run_suite(Suite::Conditioning, &Algebra::new(model), 500, SEED, None);
        bad += violations_among(&r, &["TP", "BAYES"]);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = State::vector(ket(&[s, s])).unwrap();
    let zero = State::vector(ket(&[1.0, 0.0])).unwrap();
    let m = Measurement::new(vec![p0(), p1()]).unwrap();
    let tp = total_probability_residual(&plus, &m, &pm(1.0)).unwrap();
    let bayes = bayes_posterior(&zero, &m, &pm(1.0), 0).unwrap();
    let ok = bad == 0
        && (tp - 0.5).abs() <= 1e-12
        && (bayes.direct - 0.5).abs() <= 1e-12
        && (bayes.bayes - 1.0).abs() <= 1e-12;
    verdict(
        6,
        "total probability and Bayes",
        ok,
        &format!(
            "{bad} compatible violations, fixed residual {tp:.15}, direct {:.15} vs Bayes {:.15}",
            bayes.direct, bayes.bayes
        ),
    );
}

#[test]
fn criterion_07_conditioning_on_an_atom() {
    let mut g = rng("criterion-7");
    let mut worst: f64 = 0.0;
    for t in 0..500 {
        let d = 2 + t % 3;
        let model = Model::Hilbert(d);
        let phi = random_unit_vector(d, &mut g);
        let a = hilbert(projector(&phi).unwrap());
        let b = random_effect(model, &mut g);
        let omega = random_state(model, &mut g);
        if omega.eval(&a).unwrap() <= 1e-12 {
            continue;
        }
        let oracle = matrix(&b).expectation(&phi).re;
        let cp = conditional_probability(&omega, &a, &b).unwrap();
        worst = worst
            .max((cp - oracle).abs())
            .max((hat_state(&a).unwrap().eval(&b).unwrap() - oracle).abs());
    }
    verdict(7, "conditioning on an atom forgets the state", worst <= 1e-10, &format!("worst {worst:.2e}"));
}

#[test]
fn criterion_08_representation() {
    let mut g = rng("criterion-8");
    let mut round_trip: f64 = 0.0;
    for t in 0..500 {
        let model = Model::Hilbert(2 + t % 3);
        let b = random_effect(model, &mut g);
        let ctx = random_context(model, &mut g);
        let back = rep_j_full_inverse(&rep_j_full(&b, &ctx).unwrap(), &ctx).unwrap();
        round_trip = round_trip.max(back.distance(&b).unwrap());
    }
    let mut misses = 0;
    for t in 0..400 {
        let model = Model::Hilbert(2 + t % 3);
        let commuting = t < 200;
        let (a, b) = if commuting {
            let ctx = random_context(model, &mut g);
            let ca: Vec<f64> = (0..ctx.len()).map(|_| g.next_f64()).collect();
            let cb: Vec<f64> = (0..ctx.len()).map(|_| g.next_f64()).collect();
            (effect_on_context(&ctx, &ca), effect_on_context(&ctx, &cb))
        } else {
            (random_effect(model, &mut g), random_effect(model, &mut g))
        };
        let frame = random_context(model, &mut g);
        let ja = rep_j_full(&a, &frame).unwrap();
        let jb = rep_j_full(&b, &frame).unwrap();
        let images_commute = ja.matrix().commutator(jb.matrix()).frobenius_norm() <= 1e-8;
        let compat = compatible(&a, &b, 1e-8).unwrap();
        if compat != commuting || images_commute != commuting {
            misses += 1;
        }
    }
    verdict(
        8,
        "representation round trip and compatibility versus commuting images",
        round_trip <= 1e-8 && misses == 0,
        &format!("round trip {round_trip:.2e}, {misses} misclassified of 400"),
    );
}

#[test]
fn criterion_09_classification() {
    let mut wrong = Vec::new();
    for n in 2..=8 {
        let c = classify_algebra(Model::Classical(n), 200, SEED);
        if c.class != AlgebraClass::Classical {
            wrong.push(format!("classical {n}: {:?}", c.class));
        }
    }
    for d in 2..=4 {
        let c = classify_algebra(Model::Hilbert(d), 200, SEED);
        if c.class != AlgebraClass::Hilbertian {
            wrong.push(format!("hilbert {d}: {:?}", c.class));
        }
    }
    for model in [Model::Classical(1), Model::Hilbert(1)] {
        if classify_algebra(model, 200, SEED).class != AlgebraClass::Trivial {
            wrong.push(format!("{model} not trivial"));
        }
    }
    let std = Context::standard(Model::Hilbert(2));
    let jp = rep_j_single_context(&pm(1.0), &std).unwrap();
    let jm = rep_j_single_context(&pm(-1.0), &std).unwrap();
    let collapse = (&jp - &jm).frobenius_norm();
    let apart = pm(1.0).distance(&pm(-1.0)).unwrap();
    verdict(
        9,
        "classification and a non-injective single-context map",
        wrong.is_empty() && collapse <= 1e-15 && apart > 1.0,
        &format!("{wrong:?}, P+ and P- images differ by {collapse:.1e}"),
    );
}

#[test]
fn criterion_10_third_context() {
    let mut g = rng("criterion-10");
    let mut closest = f64::INFINITY;
    for d in 2..=4 {
        let model = Model::Hilbert(d);
        for _ in 0..100 {
            let a = random_context(model, &mut g);
            let b = random_context(model, &mut g);
            let w = third_context_witness(&a, &b).unwrap();
            closest = closest
                .min(context_distance(&w.context, &a).unwrap())
                .min(context_distance(&w.context, &b).unwrap());
        }
    }
    let std = Context::standard(Model::Hilbert(2));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pmc = Context::from_vectors(vec![ket(&[s, s]), ket(&[s, -s])]).unwrap();
    let w = third_context_witness(&std, &pmc).unwrap();
    let eig = hermitian_eigh(matrix(&w.effect)).unwrap();
    let expect = [(1.0 - s) / 2.0, (1.0 + s) / 2.0];
    let err = eig.eigenvalues.iter().zip(expect).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    verdict(
        10,
        "third context distinct from two disjoint ones",
        closest > 1e-6 && err <= 1e-10,
        &format!("closest distance {closest:.3e}, fixed eigenvalue error {err:.1e}"),
    );
}

#[test]
fn criterion_11_dynamics() {
    let mut g = rng("criterion-11");
    let mut worst: f64 = 0.0;
    for t in 0..100 {
        let model = Model::Hilbert(2 + t % 3);
        let ctx = random_context(model, &mut g);
        let theta: Vec<f64> = (0..ctx.len()).map(|_| g.uniform(-std::f64::consts::PI, std::f64::consts::PI)).collect();
        let (t1, t2) = (g.uniform(-2.0, 2.0), g.uniform(-2.0, 2.0));
        let u1 = dynamics_unitary_ambient(&ctx, &theta, t1).unwrap();
        let u2 = dynamics_unitary_ambient(&ctx, &theta, t2).unwrap();
        let u12 = dynamics_unitary_ambient(&ctx, &theta, t1 + t2).unwrap();
        let u0 = dynamics_unitary_ambient(&ctx, &theta, 0.0).unwrap();
        worst = worst
            .max(u1.unitarity_defect())
            .max(u2.unitarity_defect())
            .max((&(&u1 * &u2) - &u12).frobenius_norm())
            .max((&u0 - &ComplexMatrix::identity(model.dim())).frobenius_norm());
    }
    verdict(11, "unitarity and group law of context dynamics", worst <= 1e-10, &format!("worst {worst:.2e}"));
}

#[test]
fn criterion_12_transition_symmetry() {
    let mut g = rng("criterion-12");
    let mut asym: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for t in 0..500 {
        let d = 2 + t % 3;
        let (x, y) = (random_unit_vector(d, &mut g), random_unit_vector(d, &mut g));
        let a = hilbert(projector(&x).unwrap());
        let b = hilbert(projector(&y).unwrap());
        let ab = transition_probability(&a, &b).unwrap();
        let ba = transition_probability(&b, &a).unwrap();
        asym = asym.max((ab - ba).abs());
        oracle = oracle.max((ab - inner(&x, &y).norm_sqr()).abs());
    }
    verdict(
        12,
        "transition probability symmetry",
        asym <= 1e-10 && oracle <= 1e-10,
        &format!("asymmetry {asym:.2e}, overlap oracle error {oracle:.2e}"),
    );
}

#[test]
fn criterion_13_fault_injection() {
    let tol = Tolerances::default();
    let mut summary = Vec::new();
    let mut ok = true;
    for fault in [Fault::ClippedSum, Fault::SymmetrizedProduct, Fault::UnnormalizedContext] {
        let alg = Algebra::with_fault(Model::Hilbert(3), fault);
        let report = run_suite(Suite::All, &alg, 100, SEED, None);
        let parsed: VerificationReport = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        let mut replayed = 0;
        for v in parsed.violations.iter().filter(|v| v.note.is_none()) {
            let bound = tol.of(find(&v.axiom).unwrap().class);
            let r = replay(v, &alg).unwrap();
            if r > bound && (r - v.residual).abs() <= 1e-9 * v.residual.max(1.0) {
                replayed += 1;
            }
        }
        ok &= !report.violations.is_empty() && replayed > 0;
        summary.push(format!("{}: {} violations, {replayed} replayed", fault.name(), report.violations.len()));
    }
    verdict(13, "injected faults are caught and replay", ok, &summary.join("; "));
}
