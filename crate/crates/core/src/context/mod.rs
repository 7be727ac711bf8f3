//! Contexts: finest sharp measurements, i.e. sets of atoms summing to the unit.

mod classify;
mod representation;

use serde::{Deserialize, Serialize};

use crate::classical::unique_context;
use crate::effect::{Effect, Model};
use crate::error::{Error, Result};
use crate::hilbert::{atom_vector, HilbertEffect};
use crate::linalg::{
    extend_to_basis, inner, projector, vector_norm, ComplexMatrix, C64, CLUSTER_TOL, EQ_TOL,
    ZERO,
};

pub use classify::{classify_algebra, AlgebraClass, Classification, ClassificationEvidence};
pub use representation::{
    comparability_map, comparability_residual, frame, induced_product, rep_j_full, rep_j_full_inverse,
    rep_j_single_context, third_context_witness, ComparabilityMap, ThirdContext,
};

/// Set of one-dimensional sharp effects summing to the unit.
///
/// In the Hilbert model each atom is `|φ_i⟩⟨φ_i|`; the unit vectors `φ_i` are
/// kept alongside and fix the coordinates of the context's state space.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ContextWire", into = "ContextWire")]
pub struct Context {
    atoms: Vec<Effect>,
    vectors: Option<Vec<Vec<C64>>>,
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

#[derive(Serialize, Deserialize)]
struct ContextWire {
    atoms: Vec<Effect>,
}

impl TryFrom<ContextWire> for Context {
    type Error = Error;
    fn try_from(w: ContextWire) -> Result<Self> {
        Context::new(w.atoms)
    }
}

impl From<Context> for ContextWire {
    fn from(c: Context) -> Self {
        ContextWire { atoms: c.atoms }
    }
}

impl Context {
    /// Validates the atoms at `eq_tol`.
    pub fn new(atoms: Vec<Effect>) -> Result<Self> {
        if !is_context(&atoms, EQ_TOL)? {
            return Err(Error::InvalidContext(
                "atoms must be one-dimensional sharp and sum to the unit".into(),
            ));
        }
        let vectors = match atoms[0].model() {
            Model::Classical(_) => None,
            Model::Hilbert(_) => Some(
                atoms
                    .iter()
                    .map(|a| atom_vector(a.as_hilbert().expect("model checked")))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(Context { atoms, vectors })
    }

    /// Context of the projectors onto an orthonormal basis, keeping the given
    /// vectors as coordinates.
    pub fn from_vectors(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let atoms = vectors
            .iter()
            .map(|v| Ok(Effect::Hilbert(HilbertEffect::new(projector(v)?)?)))
            .collect::<Result<Vec<_>>>()?;
        if !is_context(&atoms, EQ_TOL)? {
            return Err(Error::InvalidContext("vectors are not an orthonormal basis".into()));
        }
        Ok(Context {
            atoms,
            vectors: Some(vectors),
        })
    }

    /// Standard basis of `C^d`, or the singleton indicators classically.
    pub fn standard(model: Model) -> Self {
        match model {
            Model::Classical(n) => unique_context(n).expect("n is positive"),
            Model::Hilbert(d) => Context::from_vectors(
                (0..d)
                    .map(|k| {
                        let mut e = vec![ZERO; d];
                        e[k] = C64::new(1.0, 0.0);
                        e
                    })
                    .collect(),
            )
            .expect("standard basis is orthonormal"),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Effect] {
        &self.atoms
    }

    pub fn model(&self) -> Model {
        self.atoms[0].model()
    }

    /// Unit vectors of the atoms (Hilbert model only).
    pub fn vectors(&self) -> Option<&[Vec<C64>]> {
        self.vectors.as_deref()
    }
}

/// True when every atom is one-dimensional sharp and the atoms add up to the
/// unit, both within `tol`.
pub fn is_context(atoms: &[Effect], tol: f64) -> Result<bool> {
    let Some(first) = atoms.first() else {
        return Ok(false);
    };
    let model = first.model();
    for a in atoms {
        model.ensure_same(a.model())?;
    }
    let atoms_ok = atoms.iter().all(|a| match a {
        Effect::Classical(_) => a.is_one_dimensional_sharp(),
        Effect::Hilbert(h) => {
            let m = h.matrix();
            (&(m * m) - m).frobenius_norm() <= tol && (m.trace().re - 1.0).abs() <= tol
        }
    });
    if !atoms_ok {
        return Ok(false);
    }
    let mut total = crate::effect::Ambient::zero(model);
    for a in atoms {
        total = total.add_scaled(1.0, &a.to_ambient())?;
    }
    let defect = total
        .add_scaled(-1.0, &Effect::unit(model).to_ambient())?
        .norm();
    Ok(defect <= tol * (model.dim() as f64).sqrt().max(1.0))
}

/// `b = λ₁a₁ ⊕ ⋯ ⊕ λₙaₙ` over a context, coefficients in descending order.
///
/// Repeated eigenvalues are expanded into several atoms sharing a
/// coefficient; the atoms inside such a cluster keep the eigensolver's
/// deterministic order. Classically the context is the unique one and the
/// coefficients are the entries of `b`.
pub fn spectral_resolution(b: &Effect) -> Result<(Context, Vec<f64>)> {
    match b {
        Effect::Classical(f) => Ok((unique_context(f.n())?, f.values().to_vec())),
        Effect::Hilbert(h) => {
            let eig = h.eig()?;
            let mut vectors = Vec::with_capacity(eig.dim());
            let mut coefficients = Vec::with_capacity(eig.dim());
            for range in eig.clusters(CLUSTER_TOL).into_iter().rev() {
                for k in range {
                    vectors.push(eig.eigenvectors[k].clone());
                    coefficients.push(eig.eigenvalues[k].clamp(0.0, 1.0));
                }
            }
            Ok((Context::from_vectors(vectors)?, coefficients))
        }
    }
}

/// `Σ λ_i a_i` in the ambient space.
pub fn recombine(context: &Context, coefficients: &[f64]) -> Result<crate::effect::Ambient> {
    if coefficients.len() != context.len() {
        return Err(Error::LengthMismatch {
            expected: context.len(),
            got: coefficients.len(),
        });
    }
    let mut total = crate::effect::Ambient::zero(context.model());
    for (a, &l) in context.atoms().iter().zip(coefficients) {
        total = total.add_scaled(l, &a.to_ambient())?;
    }
    Ok(total)
}

/// `â(c)`: the probability of atom `c` in the state fixed by atom `a`.
pub fn transition_probability(a: &Effect, c: &Effect) -> Result<f64> {
    a.model().ensure_same(c.model())?;
    if !a.is_one_dimensional_sharp() || !c.is_one_dimensional_sharp() {
        return Err(Error::NotOneDimensionalSharp);
    }
    match (a, c) {
        (Effect::Classical(x), Effect::Classical(y)) => {
            let i = x
                .values()
                .iter()
                .position(|&v| v > 0.5)
                .expect("atom has a support point");
            Ok(y.values()[i])
        }
        (Effect::Hilbert(x), Effect::Hilbert(y)) => {
            let u = atom_vector(x)?;
            let v = atom_vector(y)?;
            Ok(inner(&u, &v).norm_sqr())
        }
        _ => unreachable!("models checked above"),
    }
}

/// Bottleneck distance between two contexts: the smallest, over all
/// matchings of atoms, of the largest Frobenius distance of a matched pair.
/// Contexts of different sizes are infinitely far apart.
pub fn context_distance(a: &Context, b: &Context) -> Result<f64> {
    a.model().ensure_same(b.model())?;
    let n = a.len();
    if n != b.len() {
        return Ok(f64::INFINITY);
    }
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            dist[i][j] = a.atoms[i].distance(&b.atoms[j])?;
        }
    }
    let mut levels: Vec<f64> = dist.iter().flatten().cloned().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    // smallest threshold admitting a perfect matching
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(&dist, levels[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(levels[lo])
}

fn has_perfect_matching(dist: &[Vec<f64>], threshold: f64) -> bool {
    let n = dist.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    (0..n).all(|i| augment(i, dist, threshold, &mut owner, &mut vec![false; n]))
}

fn augment(
    i: usize,
    dist: &[Vec<f64>],
    threshold: f64,
    owner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for j in 0..dist.len() {
        if dist[i][j] <= threshold && !seen[j] {
            seen[j] = true;
            let free = match owner[j] {
                None => true,
                Some(k) => augment(k, dist, threshold, owner, seen),
            };
            if free {
                owner[j] = Some(i);
                return true;
            }
        }
    }
    false
}

/// Set equality of atoms within `tol`.
pub fn contexts_equal(a: &Context, b: &Context, tol: f64) -> Result<bool> {
    Ok(context_distance(a, b)? <= tol)
}

/// A context whose first atom is `|φ⟩⟨φ|`, completed by pivoted Gram–Schmidt
/// over the standard basis.
pub fn completeness_witness(phi: &[C64]) -> Result<Context> {
    let norm = vector_norm(phi);
    if phi.is_empty() || (norm - 1.0).abs() > EQ_TOL {
        return Err(Error::NotUnitVector { norm });
    }
    Context::from_vectors(extend_to_basis(&[phi.to_vec()], phi.len()))
}

/// `U_t = Σ_j e^{iθ_j t} P(â_j)` in the coordinates of the context, i.e.
/// `diag(e^{iθ_j t})`.
pub fn dynamics_unitary(context: &Context, theta: &[f64], t: f64) -> Result<ComplexMatrix> {
    if theta.len() != context.len() {
        return Err(Error::LengthMismatch {
            expected: context.len(),
            got: theta.len(),
        });
    }
    let mut u = ComplexMatrix::zeros(theta.len());
    for (j, th) in theta.iter().enumerate() {
        u[(j, j)] = C64::from_polar(1.0, th * t);
    }
    Ok(u)
}

/// The same unitary acting on the ambient space: `Φ diag(e^{iθ_j t}) Φ†`.
pub fn dynamics_unitary_ambient(context: &Context, theta: &[f64], t: f64) -> Result<ComplexMatrix> {
    let diag = dynamics_unitary(context, theta, t)?;
    let phi = frame(context)?;
    Ok(&(&phi * &diag) * &phi.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_vector;

    fn h(m: ComplexMatrix) -> Effect {
        Effect::Hilbert(HilbertEffect::new(m).unwrap())
    }

    fn plus_minus() -> Context {
        let s = 0.5f64.sqrt();
        Context::from_vectors(vec![real_vector(&[s, s]), real_vector(&[s, -s])]).unwrap()
    }

    #[test]
    fn recognition_examples() {
        let std3 = Context::standard(Model::Hilbert(3));
        assert!(is_context(std3.atoms(), 1e-8).unwrap());
        let p0 = std3.atoms()[0].clone();
        let pm = plus_minus();
        let p0_2 = Context::standard(Model::Hilbert(2)).atoms()[0].clone();
        assert!(!is_context(&[p0_2, pm.atoms()[0].clone()], 1e-8).unwrap());
        assert!(!is_context(&[Effect::unit(Model::Hilbert(2))], 1e-8).unwrap());
        assert!(is_context(&[Effect::unit(Model::Classical(1))], 1e-8).unwrap());
        assert!(is_context(&[Effect::unit(Model::Hilbert(1))], 1e-8).unwrap());
        assert!(matches!(
            is_context(&[p0, Effect::unit(Model::Classical(1))], 1e-8),
            Err(Error::ModelMismatch { .. })
        ));
    }

    #[test]
    fn spectral_resolution_examples() {
        let (ctx, coeffs) =
            spectral_resolution(&h(ComplexMatrix::from_real_diag(&[0.7, 0.7, 0.1]))).unwrap();
        assert_eq!(coeffs, vec![0.7, 0.7, 0.1]);
        assert_eq!(ctx, Context::standard(Model::Hilbert(3)));

        let pm = plus_minus();
        let (ctx, coeffs) = spectral_resolution(&pm.atoms()[0]).unwrap();
        assert!((coeffs[0] - 1.0).abs() < 1e-14 && coeffs[1].abs() < 1e-14);
        assert!(contexts_equal(&ctx, &pm, 1e-12).unwrap());
        assert!(ctx.atoms()[0].distance(&pm.atoms()[0]).unwrap() < 1e-14);

        let f = Effect::Classical(crate::classical::FuzzyEvent::new(vec![0.3, 0.9]).unwrap());
        let (ctx, coeffs) = spectral_resolution(&f).unwrap();
        assert_eq!(coeffs, vec![0.3, 0.9]);
        assert_eq!(ctx, Context::standard(Model::Classical(2)));
    }

    #[test]
    fn transition_examples() {
        let std = Context::standard(Model::Hilbert(2));
        let pm = plus_minus();
        let (p0, p1, pp) = (&std.atoms()[0], &std.atoms()[1], &pm.atoms()[0]);
        assert!((transition_probability(p0, p0).unwrap() - 1.0).abs() < 1e-15);
        assert!(transition_probability(p0, p1).unwrap().abs() < 1e-15);
        assert!((transition_probability(p0, pp).unwrap() - 0.5).abs() < 1e-15);
        let half = Effect::unit(Model::Hilbert(2)).scale(0.5).unwrap();
        assert!(matches!(
            transition_probability(p0, &half),
            Err(Error::NotOneDimensionalSharp)
        ));
    }

    #[test]
    fn matching_distance_ignores_order() {
        let pm = plus_minus();
        let swapped = Context::new(vec![pm.atoms()[1].clone(), pm.atoms()[0].clone()]).unwrap();
        assert_eq!(context_distance(&pm, &swapped).unwrap(), 0.0);
        let std = Context::standard(Model::Hilbert(2));
        // every pairing of P0, P1 with P+, P− is 1 apart in Frobenius norm
        assert!((context_distance(&std, &pm).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn completeness_examples() {
        let ctx = completeness_witness(&real_vector(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(ctx, Context::standard(Model::Hilbert(3)));
        let s = 0.5f64.sqrt();
        let ctx = completeness_witness(&real_vector(&[s, s])).unwrap();
        assert!(contexts_equal(&ctx, &plus_minus(), 1e-14).unwrap());
        assert!(ctx.atoms()[0].distance(&plus_minus().atoms()[0]).unwrap() < 1e-14);
        assert!(matches!(
            completeness_witness(&real_vector(&[1.0, 1.0])),
            Err(Error::NotUnitVector { .. })
        ));
    }

    #[test]
    fn dynamics_examples() {
        let std = Context::standard(Model::Hilbert(2));
        let u0 = dynamics_unitary(&std, &[0.3, 1.1], 0.0).unwrap();
        assert_eq!(u0, ComplexMatrix::identity(2));
        let flip = dynamics_unitary(&std, &[0.0, std::f64::consts::PI], 1.0).unwrap();
        assert!((&flip - &ComplexMatrix::from_real_diag(&[1.0, -1.0])).frobenius_norm() < 1e-15);
        let theta = [0.3, 1.1];
        let whole = dynamics_unitary(&std, &theta, 1.0).unwrap();
        let parts = &dynamics_unitary(&std, &theta, 0.4).unwrap()
            * &dynamics_unitary(&std, &theta, 0.6).unwrap();
        assert!((&whole - &parts).frobenius_norm() <= 1e-12);
        assert!(matches!(
            dynamics_unitary(&std, &[0.1], 1.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn context_json_round_trip() {
        let pm = plus_minus();
        let text = serde_json::to_string(&pm).unwrap();
        let back: Context = serde_json::from_str(&text).unwrap();
        assert_eq!(back, pm);
        let bad = r#"{"atoms":[{"model":"hilbert","matrix":{"dim":2,"re":[[1,0],[0,0]]}}]}"#;
        assert!(serde_json::from_str::<Context>(bad).is_err());
    }
}
