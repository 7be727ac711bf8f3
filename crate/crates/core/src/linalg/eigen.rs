use super::{inner, vector_norm, ComplexMatrix, C64, CLIP_TOL, CLUSTER_TOL, EQ_TOL, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Sweeps continue until the off-diagonal mass reaches roundoff level or
/// stops shrinking; the result is accepted below the coarser bound.
const OFF_DIAGONAL_FINE: f64 = 1e-15;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
// Components this close to the largest modulus tie for phase fixing.
const PHASE_TIE: f64 = 1e-10;

/// Spectral data of a Hermitian matrix: ascending eigenvalues with orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<C64>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ f(λ_i) v_i v_i†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..d {
                let vi = v[i] * w;
                for j in 0..d {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// Matrix with the eigenvectors as columns.
    pub fn vector_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.eigenvectors)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Index ranges of eigenvalues that agree within `tol`.
    pub fn clusters(&self, tol: f64) -> Vec<std::ops::Range<usize>> {
        cluster_sorted(&self.eigenvalues, tol)
    }
}

fn cluster_sorted(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector has its phase fixed so
/// that its largest component (lowest index on ties) is real and positive.
/// Inside a degenerate cluster the basis is rebuilt from the standard basis
/// vectors projected onto the eigenspace, so repeated eigenvalues always get
/// the same basis no matter how the rotations went.
pub fn hermitian_eigh(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let d = a.dim();
    let scale = a.frobenius_norm().max(1.0);
    let defect = a.hermitian_defect();
    if defect > EQ_TOL * scale || !a.is_finite() {
        return Err(Error::NotHermitian { defect });
    }
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(d);

    let mut previous = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off < OFF_DIAGONAL_FINE * scale || off >= previous {
            break;
        }
        previous = off;
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if off_diagonal_norm(&m) >= OFF_DIAGONAL_TOL * scale {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let raw: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();

    let mut eigenvectors = Vec::with_capacity(d);
    for range in cluster_sorted(&eigenvalues, CLUSTER_TOL) {
        if range.len() == 1 {
            eigenvectors.push(canonical_phase(&raw[range.start]));
            continue;
        }
        let members = &raw[range.clone()];
        let candidates: Vec<Vec<C64>> = (0..d)
            .map(|k| {
                let mut proj = vec![ZERO; d];
                for u in members {
                    let coeff = u[k].conj();
                    for (p, ui) in proj.iter_mut().zip(u) {
                        *p += ui * coeff;
                    }
                }
                proj
            })
            .collect();
        eigenvectors.extend(pivoted_basis(&candidates, &[], range.len()));
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let d = m.dim();
    let apq = m[(p, q)];
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / r;
    let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = Φ R Φ† with R the real rotation and Φ the phase that makes a_pq real.
    let g_pp = C64::new(c, 0.0);
    let g_pq = phase * s;
    let g_qp = -phase.conj() * s;
    let g_qq = C64::new(c, 0.0);

    for k in 0..d {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * g_pp + akq * g_qp;
        m[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..d {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        m[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Rescales a nonzero vector by a unit phase so that its largest component
/// (lowest index among near-ties) is real and positive.
pub fn canonical_phase(v: &[C64]) -> Vec<C64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v.to_vec();
    }
    let k = v
        .iter()
        .position(|z| z.norm() >= max - PHASE_TIE * max.max(1.0))
        .unwrap_or(0);
    let phase = v[k].conj() / v[k].norm();
    v.iter().map(|z| z * phase).collect()
}

/// Picks `count` orthonormal vectors from the span of `candidates`, orthogonal
/// to `fixed`. At each step the candidate with the largest residual wins,
/// with the lowest index taking ties.
fn pivoted_basis(candidates: &[Vec<C64>], fixed: &[Vec<C64>], count: usize) -> Vec<Vec<C64>> {
    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(count);
    for _ in 0..count {
        let residuals: Vec<Vec<C64>> = candidates
            .iter()
            .map(|c| orthogonalize(c, fixed.iter().chain(chosen.iter())))
            .collect();
        let norms: Vec<f64> = residuals.iter().map(|r| vector_norm(r)).collect();
        let best = norms.iter().cloned().fold(0.0, f64::max);
        let k = norms
            .iter()
            .position(|&n| n >= best - PHASE_TIE)
            .unwrap_or(0);
        let r = &residuals[k];
        let n = norms[k];
        let unit: Vec<C64> = r.iter().map(|z| z / n).collect();
        chosen.push(canonical_phase(&unit));
    }
    chosen
}

fn orthogonalize<'a>(v: &[C64], basis: impl Iterator<Item = &'a Vec<C64>> + Clone) -> Vec<C64> {
    let mut r = v.to_vec();
    // two passes of classical Gram–Schmidt
    for _ in 0..2 {
        for u in basis.clone() {
            let c = inner(u, &r);
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri -= c * ui;
            }
        }
    }
    r
}

/// Extends orthonormal `vectors` to an orthonormal basis of `C^dim` with
/// pivoted Gram–Schmidt over the standard basis.
pub fn extend_to_basis(vectors: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let standard: Vec<Vec<C64>> = (0..dim)
        .map(|k| {
            let mut e = vec![ZERO; dim];
            e[k] = ONE;
            e
        })
        .collect();
    let mut basis = vectors.to_vec();
    let extra = pivoted_basis(&standard, vectors, dim.saturating_sub(vectors.len()));
    basis.extend(extra);
    basis
}

// Eigenvalues at or below this are rounding noise on a true zero. Without the
// snap a noise eigenvalue of 1e-16 would enter the root as 1e-8.
const SQRT_SNAP: f64 = 1e-13;

/// `√x` for an eigenvalue, with noise around zero snapped to zero.
pub(crate) fn sqrt_eigenvalue(x: f64) -> f64 {
    if x <= SQRT_SNAP {
        0.0
    } else {
        x.sqrt()
    }
}

/// Unique positive square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-clip_tol, 1e-13]` are treated as zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigh(a)?;
    if eig.min() < -CLIP_TOL {
        return Err(Error::NegativeEigenvalue { value: eig.min() });
    }
    Ok(eig.map(sqrt_eigenvalue))
}
