//! Hilbert-space effect algebra `E(C^d)`: operators `0 ≤ A ≤ I` with the
//! Lüders sequential product `A∘B = A^{1/2} B A^{1/2}`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::effect::State;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigh, ComplexMatrix, EigenDecomposition, CLIP_TOL, SHARP_TOL,
};

/// Hermitian operator with spectrum in `[0, 1]`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HilbertEffect {
    matrix: ComplexMatrix,
    eig: OnceLock<EigenDecomposition>,
    sqrt: OnceLock<ComplexMatrix>,
}

impl PartialEq for HilbertEffect {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl std::fmt::Debug for HilbertEffect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HilbertEffect {:?}", self.matrix)
    }
}

impl TryFrom<ComplexMatrix> for HilbertEffect {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        HilbertEffect::new(m)
    }
}

impl From<HilbertEffect> for ComplexMatrix {
    fn from(e: HilbertEffect) -> Self {
        e.matrix
    }
}

impl HilbertEffect {
    /// Validates Hermiticity and the spectrum, clamping eigenvalues that
    /// drifted at most `clip_tol` outside `[0, 1]`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() == 0 {
            return Err(Error::NotAnEffect("zero-dimensional matrix".into()));
        }
        let eig = hermitian_eigh(&matrix)?;
        if eig.min() < -CLIP_TOL || eig.max() > 1.0 + CLIP_TOL {
            return Err(Error::NotAnEffect(format!(
                "spectrum [{:.3e}, {:.3e}] leaves [0, 1]",
                eig.min(),
                eig.max()
            )));
        }
        if eig.min() < 0.0 || eig.max() > 1.0 {
            let clamped = EigenDecomposition {
                eigenvalues: eig.eigenvalues.iter().map(|x| x.clamp(0.0, 1.0)).collect(),
                eigenvectors: eig.eigenvectors,
            };
            let matrix = clamped.reconstruct();
            return Ok(HilbertEffect::with_eig(matrix, clamped));
        }
        Ok(HilbertEffect::with_eig(matrix.hermitian_part(), eig))
    }

    fn with_eig(matrix: ComplexMatrix, eig: EigenDecomposition) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(eig);
        HilbertEffect {
            matrix,
            eig: cell,
            sqrt: OnceLock::new(),
        }
    }

    /// Wraps a matrix without any validation. Only fault-injection models use
    /// this, to carry products that are not effects.
    pub(crate) fn unchecked(matrix: ComplexMatrix) -> Self {
        HilbertEffect {
            matrix,
            eig: OnceLock::new(),
            sqrt: OnceLock::new(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        HilbertEffect::unchecked(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        HilbertEffect::unchecked(ComplexMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eig(&self) -> Result<&EigenDecomposition> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let e = hermitian_eigh(&self.matrix)?;
        let _ = self.eig.set(e);
        Ok(self.eig.get().expect("eigendecomposition was just stored"))
    }

    /// Positive square root, cached.
    pub fn sqrt(&self) -> Result<&ComplexMatrix> {
        if let Some(s) = self.sqrt.get() {
            return Ok(s);
        }
        let eig = self.eig()?;
        if eig.min() < -CLIP_TOL {
            return Err(Error::NegativeEigenvalue { value: eig.min() });
        }
        let s = eig.map(crate::linalg::sqrt_eigenvalue);
        let _ = self.sqrt.set(s);
        Ok(self.sqrt.get().expect("square root was just stored"))
    }

    /// Numerical rank: eigenvalues above `sharp_tol`.
    pub fn rank(&self) -> Result<usize> {
        Ok(self
            .eig()?
            .eigenvalues
            .iter()
            .filter(|&&x| x > SHARP_TOL)
            .count())
    }
}

/// Density operator: positive semidefinite with unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityState {
    matrix: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for DensityState {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityState::new(m)
    }
}

impl From<DensityState> for ComplexMatrix {
    fn from(d: DensityState) -> Self {
        d.matrix
    }
}

impl DensityState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eig = hermitian_eigh(&matrix)?;
        if eig.min() < -CLIP_TOL {
            return Err(Error::InvalidState(format!(
                "density has eigenvalue {:.3e}",
                eig.min()
            )));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("density has trace {tr}")));
        }
        Ok(DensityState {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityState {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// The density viewed as an effect (its spectrum lies in `[0, 1]`).
    pub fn as_effect(&self) -> Result<HilbertEffect> {
        HilbertEffect::new(self.matrix.clone())
    }
}

fn check_dims(a: &HilbertEffect, b: &HilbertEffect) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `A∘B = A^{1/2} B A^{1/2}`.
pub fn luders_product(a: &HilbertEffect, b: &HilbertEffect) -> Result<HilbertEffect> {
    check_dims(a, b)?;
    let s = a.sqrt()?;
    let m = &(s * &b.matrix) * s;
    HilbertEffect::new(m.hermitian_part())
}

/// `‖AB − BA‖_F ≤ tol · max(1, ‖A‖_F ‖B‖_F)`.
pub fn commutes(a: &HilbertEffect, b: &HilbertEffect, tol: f64) -> Result<bool> {
    check_dims(a, b)?;
    let c = a.matrix.commutator(&b.matrix).frobenius_norm();
    Ok(c <= tol * (a.matrix.frobenius_norm() * b.matrix.frobenius_norm()).max(1.0))
}

/// `‖A² − A‖_F ≤ tol`.
pub fn is_sharp_hilbert(a: &HilbertEffect, tol: f64) -> bool {
    let sq = &a.matrix * &a.matrix;
    (&sq - &a.matrix).frobenius_norm() <= tol
}

/// True for a rank-one projector (within `sharp_tol`).
pub fn is_one_dimensional_sharp(a: &HilbertEffect) -> bool {
    is_sharp_hilbert(a, SHARP_TOL) && (a.matrix.trace().re - 1.0).abs() <= SHARP_TOL
}

/// Unit vector spanning the range of a rank-one projector, phase-normalised.
pub fn atom_vector(a: &HilbertEffect) -> Result<Vec<crate::linalg::C64>> {
    if !is_one_dimensional_sharp(a) {
        return Err(Error::NotOneDimensionalSharp);
    }
    let eig = a.eig()?;
    Ok(eig
        .eigenvectors
        .last()
        .cloned()
        .expect("dimension is positive"))
}

/// The state `â` of a one-dimensional sharp effect `a = |φ⟩⟨φ|`: the vector
/// state `φ`, which satisfies `a∘b = â(b)·a`.
pub fn hat_state(a: &HilbertEffect) -> Result<State> {
    let v = atom_vector(a)?;
    State::vector(v)
}

/// Model-specific extension of `â` to any nonzero sharp `a`:
/// `b ↦ trace(a b a) / trace(a)`, i.e. the density `a / trace(a)`.
pub fn hat_state_sharp(a: &HilbertEffect) -> Result<State> {
    if !is_sharp_hilbert(a, SHARP_TOL) {
        return Err(Error::NotOneDimensionalSharp);
    }
    let tr = a.matrix.trace().re;
    if tr < 0.5 {
        return Err(Error::NotOneDimensionalSharp);
    }
    Ok(State::Density(DensityState::new(a.matrix.scale(1.0 / tr))?))
}

/// `|trace((a∘ρ) b) − trace(ρ (a∘b))|`.
pub fn b1_residual(rho: &DensityState, a: &HilbertEffect, b: &HilbertEffect) -> Result<f64> {
    check_dims(a, b)?;
    let s = a.sqrt()?;
    let a_rho = &(s * rho.matrix()) * s;
    let a_b = luders_product(a, b)?;
    let lhs = a_rho.trace_product(b.matrix());
    let rhs = rho.matrix().trace_product(a_b.matrix());
    Ok((lhs - rhs).norm())
}

/// How far `(a∘P) / trace(a∘P)` is from a rank-one projector:
/// `max(1 − λ_max, max of the remaining |λ|)`. `None` when `a∘P` vanishes.
pub fn b2_residual(a: &HilbertEffect, p: &HilbertEffect) -> Result<Option<f64>> {
    let ap = luders_product(a, p)?;
    Ok(normalized_rank_one_residual(ap.matrix()))
}

pub(crate) fn normalized_rank_one_residual(m: &ComplexMatrix) -> Option<f64> {
    let tr = m.trace().re;
    if tr <= B2_NULL_TRACE {
        return None;
    }
    let eig = hermitian_eigh(&m.scale(1.0 / tr).hermitian_part()).ok()?;
    let top = eig.max();
    let rest = eig.eigenvalues[..eig.dim() - 1]
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    Some((1.0 - top).max(rest).max(0.0))
}

/// `a∘P` with trace at or below this is treated as the zero effect.
pub const B2_NULL_TRACE: f64 = 1e-6;

/// Vector `a^{1/2} φ` spanning the range of `a∘|φ⟩⟨φ|`.
pub fn b2_direction(a: &HilbertEffect, phi: &[crate::linalg::C64]) -> Result<Vec<crate::linalg::C64>> {
    Ok(a.sqrt()?.apply(phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{approx_eq, projector, real_vector, C64};

    fn eff(m: ComplexMatrix) -> HilbertEffect {
        HilbertEffect::new(m).unwrap()
    }

    fn p0() -> HilbertEffect {
        eff(ComplexMatrix::from_real_diag(&[1.0, 0.0]))
    }

    fn p1() -> HilbertEffect {
        eff(ComplexMatrix::from_real_diag(&[0.0, 1.0]))
    }

    fn pplus() -> HilbertEffect {
        let s = 0.5f64.sqrt();
        eff(projector(&real_vector(&[s, s])).unwrap())
    }

    #[test]
    fn luders_examples() {
        let b = pplus();
        let i = HilbertEffect::identity(2);
        assert!(approx_eq(luders_product(&i, &b).unwrap().matrix(), b.matrix(), 1e-14).unwrap());
        assert!(approx_eq(luders_product(&b, &b).unwrap().matrix(), b.matrix(), 1e-14).unwrap());
        let half_p0 = ComplexMatrix::from_real_diag(&[0.5, 0.0]);
        assert!(approx_eq(luders_product(&p0(), &b).unwrap().matrix(), &half_p0, 1e-14).unwrap());
        assert!(matches!(
            luders_product(&p0(), &HilbertEffect::identity(3)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn commutation_examples() {
        assert!(commutes(&pplus(), &pplus(), 1e-12).unwrap());
        assert!(commutes(&p0(), &p1(), 1e-12).unwrap());
        assert!(!commutes(&p0(), &pplus(), 1e-12).unwrap());
        // ‖[P0, P+]‖_F = 1/√2
        let c = p0().matrix().commutator(pplus().matrix()).frobenius_norm();
        assert!((c - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sharpness_examples() {
        assert!(is_sharp_hilbert(&pplus(), 1e-8));
        let half = eff(ComplexMatrix::identity(2).scale(0.5));
        assert!(!is_sharp_hilbert(&half, 1e-8));
        let nearly = eff(ComplexMatrix::from_real_diag(&[1.0, 1e-9]));
        assert!(is_sharp_hilbert(&nearly, 1e-8));
    }

    #[test]
    fn hat_state_examples() {
        let s = hat_state(&p0()).unwrap();
        assert!((s.eval(&p0().into()).unwrap() - 1.0).abs() < 1e-15);
        assert!((s.eval(&pplus().into()).unwrap() - 0.5).abs() < 1e-15);
        let half = eff(ComplexMatrix::identity(2).scale(0.5));
        assert!(matches!(hat_state(&half), Err(Error::NotOneDimensionalSharp)));
        assert!(matches!(
            hat_state(&HilbertEffect::identity(2)),
            Err(Error::NotOneDimensionalSharp)
        ));
    }

    #[test]
    fn hat_state_for_higher_rank_sharp() {
        let p = eff(ComplexMatrix::from_real_diag(&[1.0, 1.0, 0.0]));
        let s = hat_state_sharp(&p).unwrap();
        let b = eff(ComplexMatrix::from_real_diag(&[0.2, 0.6, 0.9]));
        // trace(p b p) / trace(p) = (0.2 + 0.6) / 2
        assert!((s.eval(&b.into()).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn construction_clamps_drift_and_rejects_excursions() {
        let drift = eff(ComplexMatrix::from_real_diag(&[1.0 + 5e-11, -5e-11]));
        assert_eq!(drift.matrix(), &ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        assert!(HilbertEffect::new(ComplexMatrix::from_real_diag(&[1.1, 0.0])).is_err());
        let not_herm =
            ComplexMatrix::from_parts(&[vec![0.5, 0.1], vec![0.0, 0.5]], None).unwrap();
        assert!(matches!(
            HilbertEffect::new(not_herm),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn b2_plus_direction() {
        // (a∘P+)/trace is the projector onto a^{1/2}|+⟩
        let a = eff(
            ComplexMatrix::from_parts(&[vec![0.6, 0.1], vec![0.1, 0.3]], Some(&[
                vec![0.0, 0.05],
                vec![-0.05, 0.0],
            ]))
            .unwrap(),
        );
        let s = 0.5f64.sqrt();
        let plus = vec![C64::new(s, 0.0), C64::new(s, 0.0)];
        let dir = b2_direction(&a, &plus).unwrap();
        let n = crate::linalg::vector_norm(&dir);
        let unit: Vec<C64> = dir.iter().map(|z| z / n).collect();
        let expected = projector(&unit).unwrap();
        let ap = luders_product(&a, &pplus()).unwrap();
        let normalized = ap.matrix().scale(1.0 / ap.matrix().trace().re);
        assert!(approx_eq(&normalized, &expected, 1e-12).unwrap());
        assert!(b2_residual(&a, &pplus()).unwrap().unwrap() < 1e-12);
    }

    #[test]
    fn b1_on_fixed_instance() {
        let rho = DensityState::maximally_mixed(2);
        let r = b1_residual(&rho, &p0(), &pplus()).unwrap();
        assert!(r < 1e-15);
    }
}
